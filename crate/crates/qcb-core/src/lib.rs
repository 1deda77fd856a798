//! Canonical bases of quantum groups, based modules, tensor products and the
//! thickening realization, computed exactly.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

extern crate alloc;

pub mod coeff;
pub mod linalg;
pub mod datum;
pub mod falg;
pub mod cbasis;
pub mod modules;
pub mod tensor;
pub mod thicken;
pub mod udot;
pub mod verify;
