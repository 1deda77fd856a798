//! Datum files and built-in data.

use std::collections::BTreeMap;
use std::path::Path;

use qcb_core::datum::{CartanDatum, RootDatum};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// JSON datum file. The lattice fields are optional as a group: without
/// them the simply connected datum `Y = ℤ[I]`, `X = Hom(Y, ℤ)` is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumFile {
    pub generators: Vec<String>,
    pub cartan: Vec<Vec<i64>>,
    #[serde(rename = "rankY", default, skip_serializing_if = "Option::is_none")]
    pub rank_y: Option<usize>,
    #[serde(rename = "rankX", default, skip_serializing_if = "Option::is_none")]
    pub rank_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<Vec<i64>>>,
    #[serde(rename = "embedY", default, skip_serializing_if = "Option::is_none")]
    pub embed_y: Option<BTreeMap<String, Vec<i64>>>,
    #[serde(rename = "embedX", default, skip_serializing_if = "Option::is_none")]
    pub embed_x: Option<BTreeMap<String, Vec<i64>>>,
}

pub const BUILTIN: [&str; 5] = ["a1", "a2", "a1-thick", "a2-thick", "rank2-affine"];

impl DatumFile {
    /// Validates every invariant, reporting the first violation.
    pub fn build(&self) -> Result<RootDatum, CliError> {
        let cartan = CartanDatum::new(self.generators.clone(), self.cartan.clone()).map_err(|e| CliError::Datum(e.to_string()))?;
        let lattice = (&self.rank_y, &self.rank_x, &self.pairing, &self.embed_y, &self.embed_x);
        match lattice {
            (None, None, None, None, None) => Ok(RootDatum::simply_connected(cartan)),
            (Some(ry), Some(rx), Some(p), Some(ey), Some(ex)) => {
                let pick = |m: &BTreeMap<String, Vec<i64>>, what: &str| -> Result<Vec<Vec<i64>>, CliError> {
                    if let Some(extra) = m.keys().find(|k| !self.generators.contains(k)) {
                        return Err(CliError::Datum(format!("{} names unknown generator {}", what, extra)));
                    }
                    self.generators
                        .iter()
                        .map(|g| m.get(g).cloned().ok_or_else(|| CliError::Datum(format!("{} lacks generator {}", what, g))))
                        .collect()
                };
                let (ey, ex) = (pick(ey, "embedY")?, pick(ex, "embedX")?);
                RootDatum::new(cartan, *ry, *rx, p.clone(), ey, ex).map_err(|e| CliError::Datum(e.to_string()))
            }
            _ => Err(CliError::Datum(String::from("rankY, rankX, pairing, embedY and embedX must be given together"))),
        }
    }

    pub fn from_datum(d: &RootDatum) -> Self {
        let g = &d.cartan.gens;
        let by_gen = |rows: &[Vec<i64>]| g.iter().cloned().zip(rows.iter().cloned()).collect();
        DatumFile {
            generators: g.clone(),
            cartan: d.cartan.form.clone(),
            rank_y: Some(d.rank_y),
            rank_x: Some(d.rank_x),
            pairing: Some(d.pairing.clone()),
            embed_y: Some(by_gen(&d.embed_y)),
            embed_x: Some(by_gen(&d.embed_x)),
        }
    }
}

/// A built-in datum by name.
pub fn builtin(name: &str) -> Option<RootDatum> {
    let thick = |d: RootDatum| d.thicken().expect("finite type thickens").thick;
    match name {
        "a1" => Some(RootDatum::type_a(1)),
        "a2" => Some(RootDatum::type_a(2)),
        "a1-thick" => Some(thick(RootDatum::type_a(1))),
        "a2-thick" => Some(thick(RootDatum::type_a(2))),
        "rank2-affine" => {
            let c = CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, -2], vec![-2, 2]]).expect("valid form");
            Some(RootDatum::simply_connected(c))
        }
        _ => None,
    }
}

/// A loaded datum with the canonical JSON text used in cache keys.
#[derive(Debug, Clone)]
pub struct Loaded {
    /// Built-in name or the file path as given.
    pub name: String,
    pub datum: RootDatum,
    pub canonical: String,
}

/// Loads a built-in name, or else a JSON file.
pub fn load(arg: &str) -> Result<Loaded, CliError> {
    let datum = match builtin(arg) {
        Some(d) => d,
        None => {
            let path = Path::new(arg);
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Datum(format!("cannot read {}: {}", arg, e)))?;
            let file: DatumFile = serde_json::from_str(&text).map_err(|e| CliError::Datum(format!("{}: {}", arg, e)))?;
            file.build()?
        }
    };
    let canonical = serde_json::to_string(&DatumFile::from_datum(&datum)).expect("datum serializes");
    Ok(Loaded { name: arg.to_string(), datum, canonical })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip() {
        for name in BUILTIN {
            let d = builtin(name).unwrap();
            let f = DatumFile::from_datum(&d);
            let text = serde_json::to_string(&f).unwrap();
            let back: DatumFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.build().unwrap(), d, "{}", name);
        }
        assert_eq!(builtin("a2-thick").unwrap().rank(), 4);
        assert!(!builtin("rank2-affine").unwrap().cartan.is_spherical(&[0, 1]));
    }

    #[test]
    fn short_form_is_simply_connected() {
        let f: DatumFile = serde_json::from_str(r#"{"generators":["i","j"],"cartan":[[2,-1],[-1,2]]}"#).unwrap();
        let d = f.build().unwrap();
        assert_eq!(d.cartan.form, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(d.rank_x, 2);
    }

    #[test]
    fn first_violation_is_reported() {
        let bad = |s: &str| serde_json::from_str::<DatumFile>(s).unwrap().build().unwrap_err().to_string();
        assert!(bad(r#"{"generators":["i","j"],"cartan":[[2,-1],[-2,2]]}"#).contains("symmetric"));
        assert!(bad(r#"{"generators":["i","j"],"cartan":[[3,-1],[-1,2]]}"#).contains("i·i"));
        assert!(bad(r#"{"generators":["i"],"cartan":[[2]],"rankY":1}"#).contains("together"));
        let wrong_pairing = r#"{"generators":["i"],"cartan":[[2]],"rankY":1,"rankX":1,"pairing":[[2]],
            "embedY":{"i":[1]},"embedX":{"i":[1]}}"#;
        assert!(bad(wrong_pairing).contains("unimodular"));
        let incompatible = r#"{"generators":["i"],"cartan":[[2]],"rankY":1,"rankX":1,"pairing":[[1]],
            "embedY":{"i":[1]},"embedX":{"i":[1]}}"#;
        assert!(bad(incompatible).contains("differs"));
    }
}
