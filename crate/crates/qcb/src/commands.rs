//! The `cb`, `tensor-cb` and `verify` commands, returning their output text.

use std::path::Path;
use std::rc::Rc;

use qcb_core::cbasis::{weights_of_trace, CanonicalBasis, CbError};
use qcb_core::datum::{CartanDatum, Root};
use qcb_core::falg::DivWord;
use qcb_core::modules::{Label, ModCtx, ModError, Module};
use qcb_core::tensor::nfold;
use qcb_core::verify::{parse_factors, Factor};
use serde_json::{json, Value};

use crate::cache::{Cache, CacheKey};
use crate::datum_file::Loaded;
use crate::suite;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Largest module dimension built for `tensor-cb`.
const MODULE_CAP: usize = 4096;

impl From<CbError> for CliError {
    fn from(e: CbError) -> Self {
        match e {
            CbError::Verification { .. } => CliError::Verification(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ModError> for CliError {
    fn from(e: ModError) -> Self {
        match e {
            ModError::Cb(c) => c.into(),
            ModError::Verification(_) | ModError::Inexact(_) => CliError::Verification(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Parses `1,0,2` into a vector of the given length.
pub fn parse_vector(s: &str, len: usize, what: &str) -> Result<Vec<i64>, CliError> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("bad {} `{}`", what, s))))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{} `{}` needs {} entries", what, s, len)));
    }
    Ok(v)
}

/// `θ_i^{(a)}` words with generator labels, e.g. `θ1^(2)θ2`.
pub fn render_word(c: &CartanDatum, w: &DivWord, letter: &str) -> String {
    if w.is_empty() {
        return String::from("1");
    }
    w.iter()
        .map(|&(g, a)| if a == 1 { format!("{}{}", letter, c.gens[g]) } else { format!("{}{}^({})", letter, c.gens[g], a) })
        .collect()
}

fn cb_weight_json(cb: &CanonicalBasis, nu: &[i64]) -> Result<Value, CliError> {
    let b = cb.basis(nu)?;
    let elems: Vec<Value> = b
        .elems
        .iter()
        .map(|e| {
            let terms: Vec<Value> = e
                .expansion
                .iter()
                .map(|(w, c)| json!({"word": render_word(cb.cartan(), w, "θ"), "letters": w, "coeff": c.to_string()}))
                .collect();
            json!({"expansion": terms})
        })
        .collect();
    Ok(json!({"weight": nu, "elements": elems}))
}

fn render_sum(terms: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, (x, c)) in terms.iter().enumerate() {
        let (sign, c) = match c.strip_prefix('-') {
            Some(rest) if !rest.contains([' ']) => ("-", rest.to_string()),
            _ => ("+", c.clone()),
        };
        if k == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {} ", sign));
        }
        if c == "1" {
            out.push_str(x);
        } else if c.contains(' ') {
            out.push_str(&format!("({}){}", c, x));
        } else {
            out.push_str(&format!("{}·{}", c, x));
        }
    }
    out
}

/// `qcb cb`: canonical basis elements as divided-word expansions.
pub fn cmd_cb(loaded: &Loaded, weight: Option<&str>, max_tr: Option<usize>, format: Format, cache: &Cache) -> Result<String, CliError> {
    let d = &loaded.datum;
    let n = d.rank();
    let weights: Vec<Root> = match (weight, max_tr) {
        (Some(w), None) => {
            let nu = parse_vector(w, n, "weight")?;
            if nu.iter().any(|&a| a < 0) {
                return Err(CliError::Usage(format!("weight `{}` is not in ℕ[I]", w)));
            }
            vec![nu]
        }
        (None, Some(t)) => (0..=t).flat_map(|k| weights_of_trace(n, k)).collect(),
        _ => return Err(CliError::Usage(String::from("give exactly one of --weight and --max-tr"))),
    };
    let cb = CanonicalBasis::new(d.cartan.clone());
    let mut blocks = Vec::new();
    for nu in &weights {
        let key = CacheKey::new(&loaded.canonical, "cb", &serde_json::to_string(nu).expect("weight serializes"));
        let body = cache.get_or_insert_with(&key, || cb_weight_json(&cb, nu).map(|v| v.to_string()))?;
        let v: Value = match serde_json::from_str(&body) {
            Ok(v) => v,
            Err(_) => {
                let v = cb_weight_json(&cb, nu)?;
                cache.put(&key, &v.to_string())?;
                v
            }
        };
        blocks.push(v);
    }
    Ok(match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&Value::Array(blocks)).expect("json")),
        Format::Table => {
            let mut out = String::new();
            for b in &blocks {
                let elems = b["elements"].as_array().expect("elements");
                out.push_str(&format!("weight {}  ({} elements)\n", b["weight"], elems.len()));
                for (k, e) in elems.iter().enumerate() {
                    let terms: Vec<(String, String)> = e["expansion"]
                        .as_array()
                        .expect("expansion")
                        .iter()
                        .map(|t| (t["word"].as_str().unwrap_or("").to_string(), t["coeff"].as_str().unwrap_or("").to_string()))
                        .collect();
                    out.push_str(&format!("  b{} = {}\n", k, render_sum(&terms)));
                }
            }
            out
        }
    })
}

/// Total trace of a tensor label.
fn depth(label: &Label) -> i64 {
    label.iter().map(|(nu, _)| nu.iter().map(|a| a.abs()).sum::<i64>()).sum()
}

struct Namer<'a> {
    cb: &'a CanonicalBasis,
    factors: &'a [Factor],
}

impl Namer<'_> {
    fn element(&self, f: usize, nu: &Root, k: usize) -> Result<String, CliError> {
        let (letter, vector) = match &self.factors[f] {
            Factor::Lw(_) => ("E", "ξ"),
            Factor::Hw(_) => ("F", "η"),
        };
        let vector = if self.factors.len() > 2 { format!("{}{}", vector, f + 1) } else { vector.to_string() };
        let b = self.cb.basis(nu)?;
        let e = &b.elems[k].expansion;
        if e.len() == 1 && e[0].1.is_one() {
            let w = render_word(self.cb.cartan(), &e[0].0, letter);
            return Ok(if w == "1" { vector } else { format!("{}{}", w, vector) });
        }
        let sign = if letter == "E" { '+' } else { '-' };
        Ok(format!("b{:?}#{}{}{}", nu, k, sign, vector))
    }

    fn label(&self, l: &Label, sep: &str) -> Result<String, CliError> {
        let parts = l.iter().enumerate().map(|(f, (nu, k))| self.element(f, nu, *k)).collect::<Result<Vec<_>, _>>()?;
        Ok(parts.join(sep))
    }
}

fn factor_module(ctx: &ModCtx, f: &Factor) -> Result<Module, CliError> {
    let pick = |p: &[i64]| {
        ctx.datum.weight_with_pairings(p).ok_or_else(|| CliError::Usage(format!("factor {} needs {} pairings", f, ctx.datum.rank())))
    };
    Ok(match f {
        Factor::Lw(p) if p.len() == ctx.datum.rank() => ctx.simple_lw(&pick(p)?, MODULE_CAP)?,
        Factor::Hw(p) if p.len() == ctx.datum.rank() => ctx.simple_hw(&pick(p)?, MODULE_CAP)?,
        _ => return Err(CliError::Usage(format!("factor {} needs {} pairings", f, ctx.datum.rank()))),
    })
}

fn tensor_json(loaded: &Loaded, factors: &[Factor], weight_depth: usize) -> Result<Value, CliError> {
    let d = &loaded.datum;
    if !d.cartan.is_spherical(&(0..d.rank()).collect::<Vec<_>>()) {
        return Err(CliError::Usage(String::from("tensor-cb needs a finite-type datum")));
    }
    let ctx = ModCtx::new(d.clone());
    let ms = factors.iter().map(|f| factor_module(&ctx, f).map(Rc::new)).collect::<Result<Vec<_>, _>>()?;
    let based = nfold(ctx.cb.clone(), &ms)?;
    let namer = Namer { cb: &ctx.cb, factors };
    let exp = based.expansion.as_ref().ok_or_else(|| CliError::Usage(String::from("tensor-cb needs at least two factors")))?;
    let mut blocks = Vec::new();
    for (delta, cols) in exp {
        let labels = based.labels(delta);
        let keep: Vec<usize> = (0..labels.len()).filter(|&j| depth(&labels[j]) <= weight_depth as i64).collect();
        if keep.is_empty() {
            continue;
        }
        let mut elems = Vec::new();
        for &j in &keep {
            let terms = cols[j]
                .iter()
                .map(|(l, c)| Ok(json!({"pure": namer.label(l, "⊗")?, "coeff": c.to_string()})))
                .collect::<Result<Vec<_>, CliError>>()?;
            elems.push(json!({"label": namer.label(&labels[j], "◊")?, "expansion": terms}));
        }
        let rows = labels.iter().map(|l| namer.label(l, "⊗")).collect::<Result<Vec<_>, _>>()?;
        let matrix: Vec<Vec<String>> = labels
            .iter()
            .map(|l| keep.iter().map(|&j| cols[j].get(l).map_or_else(|| String::from("0"), |c| c.to_string())).collect())
            .collect();
        blocks.push(json!({
            "weight": based.weight(delta),
            "elements": elems,
            "transition": {"rows": rows, "matrix": matrix},
        }));
    }
    Ok(Value::Array(blocks))
}

/// `qcb tensor-cb`: diamond basis and transition matrix per weight, for
/// elements whose label has total depth at most `weight_depth`.
pub fn cmd_tensor_cb(loaded: &Loaded, factors: &str, weight_depth: usize, format: Format, cache: &Cache) -> Result<String, CliError> {
    let fs = parse_factors(factors).map_err(CliError::Usage)?;
    if !(2..=3).contains(&fs.len()) {
        return Err(CliError::Usage(String::from("give two or three factors")));
    }
    let params = json!({"factors": fs.iter().map(|f| f.to_string()).collect::<Vec<_>>(), "depth": weight_depth}).to_string();
    let key = CacheKey::new(&loaded.canonical, "tensor-cb", &params);
    let body = cache.get_or_insert_with(&key, || tensor_json(loaded, &fs, weight_depth).map(|v| v.to_string()))?;
    let v: Value = match serde_json::from_str(&body) {
        Ok(v) => v,
        Err(_) => {
            let v = tensor_json(loaded, &fs, weight_depth)?;
            cache.put(&key, &v.to_string())?;
            v
        }
    };
    Ok(match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&v).expect("json")),
        Format::Table => {
            let mut out = String::new();
            for b in v.as_array().expect("blocks") {
                out.push_str(&format!("weight {}\n", b["weight"]));
                for e in b["elements"].as_array().expect("elements") {
                    let terms: Vec<(String, String)> = e["expansion"]
                        .as_array()
                        .expect("expansion")
                        .iter()
                        .map(|t| (t["pure"].as_str().unwrap_or("").to_string(), t["coeff"].as_str().unwrap_or("").to_string()))
                        .collect();
                    out.push_str(&format!("  {} = {}\n", e["label"].as_str().unwrap_or(""), render_sum(&terms)));
                }
                let t = &b["transition"];
                for (r, row) in t["rows"].as_array().expect("rows").iter().zip(t["matrix"].as_array().expect("matrix")) {
                    let cells: Vec<&str> = row.as_array().expect("row").iter().map(|c| c.as_str().unwrap_or("")).collect();
                    out.push_str(&format!("    {:<16} | {}\n", r.as_str().unwrap_or(""), cells.join(" | ")));
                }
            }
            out
        }
    })
}

/// `qcb verify`: JSON lines, and whether every check passed.
pub fn cmd_verify(
    loaded: &Loaded,
    suite_arg: &str,
    config: Option<&Path>,
    jobs: usize,
    cache: &Cache,
) -> Result<(String, bool), CliError> {
    let specs = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {}", p.display(), e)))?;
            suite::parse_config(&text)?
        }
        None => suite::select(&loaded.datum, suite_arg)?,
    };
    let lines = suite::run(loaded, &specs, jobs, cache)?;
    let ok = lines.iter().all(suite::Line::passed);
    let text: String = lines.iter().map(|l| format!("{}\n", l.to_json(&loaded.name))).collect();
    Ok((text, ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum_file::load;

    #[test]
    fn rank_one_basis() {
        let l = load("a1").unwrap();
        let out = cmd_cb(&l, None, Some(4), Format::Table, &Cache::disabled()).unwrap();
        assert!(out.contains("b0 = θ1^(4)"), "{}", out);
        let v: Value = serde_json::from_str(&cmd_cb(&l, None, Some(4), Format::Json, &Cache::disabled()).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 5);
    }

    #[test]
    fn two_elements_in_a2() {
        let l = load("a2").unwrap();
        let v: Value = serde_json::from_str(&cmd_cb(&l, Some("1,1"), None, Format::Json, &Cache::disabled()).unwrap()).unwrap();
        assert_eq!(v[0]["elements"].as_array().unwrap().len(), 2);
        assert!(matches!(cmd_cb(&l, Some("1"), None, Format::Json, &Cache::disabled()), Err(CliError::Usage(_))));
        assert!(matches!(cmd_cb(&l, None, None, Format::Json, &Cache::disabled()), Err(CliError::Usage(_))));
    }

    #[test]
    fn lw_hw_diamond() {
        let l = load("a1").unwrap();
        let v: Value = serde_json::from_str(&cmd_tensor_cb(&l, "LW:1 HW:1", 4, Format::Json, &Cache::disabled()).unwrap()).unwrap();
        let labels: Vec<String> =
            v.as_array().unwrap().iter().flat_map(|b| b["elements"].as_array().unwrap().iter().map(|e| e["label"].as_str().unwrap().to_string())).collect();
        assert_eq!(labels.len(), 4);
        assert!(labels.contains(&String::from("E1ξ◊F1η")), "{:?}", labels);
        let v: Value = serde_json::from_str(&cmd_tensor_cb(&l, "LW:1 HW:1", 0, Format::Json, &Cache::disabled()).unwrap()).unwrap();
        let only = v.as_array().unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0]["elements"][0]["label"], "ξ◊η");
        let table = cmd_tensor_cb(&l, "HW:1 HW:1", 2, Format::Table, &Cache::disabled()).unwrap();
        assert!(table.contains("η◊F1η"), "{}", table);
    }

    #[test]
    fn sums_render() {
        let t = |x: &str, c: &str| (x.to_string(), c.to_string());
        assert_eq!(render_sum(&[t("a", "1"), t("b", "-v^-1"), t("c", "v + v^-1")]), "a - v^-1·b + (v + v^-1)c");
    }
}
