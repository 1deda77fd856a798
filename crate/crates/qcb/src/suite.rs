//! Check suites, parallel execution and JSON-lines reports.

use qcb_core::datum::RootDatum;
use qcb_core::verify::{run_check, within_bounds, CheckReport, CheckSpec, Factor, Status};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cache::{Cache, CacheKey};
use crate::datum_file::Loaded;
use crate::CliError;

/// The default checks for a datum, scaled to its rank. Module and `U̇`
/// checks need finite type; `U̇` checks run in rank one only. Modules use
/// `λ = ρ` up to rank two and the first fundamental weight beyond.
pub fn default_suite(d: &RootDatum) -> Vec<CheckSpec> {
    let n = d.rank();
    let lam: Vec<i64> = if n <= 2 { vec![1; n] } else { (0..n).map(|i| i64::from(i == 0)).collect() };
    let all: Vec<usize> = (0..n).collect();
    let finite = d.cartan.is_spherical(&all);
    let mut s = vec![
        CheckSpec::StructurePositivity { max_trace: match n {
            1 => 6,
            2 => 5,
            _ => 4,
        } },
        CheckSpec::CbOracle { max_trace: if n <= 2 { 6 } else { 4 }, max_dim: 3 },
        CheckSpec::Spherical { bound: 2000 },
    ];
    if !finite {
        return s;
    }
    let lw = Factor::Lw(lam.clone());
    let hw = Factor::Hw(lam.clone());
    s.push(CheckSpec::Transition { factors: vec![lw.clone(), hw.clone()] });
    s.push(CheckSpec::Transition { factors: vec![hw.clone(), hw.clone()] });
    if n == 1 {
        s.push(CheckSpec::Transition { factors: vec![Factor::Hw(vec![1]), Factor::Hw(vec![2]), Factor::Hw(vec![1])] });
    }
    s.push(CheckSpec::ActionPositivity { lambda: lam.clone(), max_trace: 2 });
    s.push(CheckSpec::TensorAction { factors: vec![lw, hw], max_trace: 2 });
    if n <= 2 {
        s.push(CheckSpec::Thickening { zeta: lam.clone(), lambda: lam.clone(), depth: 2 });
        s.push(CheckSpec::DemazureQuotient { lambda1: lam.clone(), lambda2: lam.clone(), word: vec![0], depth: 2 });
        s.push(CheckSpec::HighestQuotient { lambda1: lam.clone(), lambda2: lam.clone(), depth: 2 });
    }
    let words = if n >= 2 && d.cartan.dot(0, 1) == -1 { vec![vec![0, 1, 0], vec![1, 0, 1]] } else { vec![vec![0]] };
    s.push(CheckSpec::ReducedWords { lambda: lam.clone(), words });
    if n == 1 {
        s.push(CheckSpec::UdotMult { max_trace: 2, zeta_bound: 2 });
        s.push(CheckSpec::UdotAction { lambda: vec![1], max_trace: 2, zeta_bound: 1 });
    }
    s
}

/// `default`, or a comma- or space-separated list of check names drawn from
/// the default suite.
pub fn select(d: &RootDatum, suite: &str) -> Result<Vec<CheckSpec>, CliError> {
    let all = default_suite(d);
    let names: Vec<&str> = suite.split([',', ' ']).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(CliError::Usage(String::from("empty suite")));
    }
    if names == ["default"] {
        return Ok(all);
    }
    for name in &names {
        if !CheckSpec::NAMES.contains(name) {
            return Err(CliError::Usage(format!("unknown suite or check `{}`", name)));
        }
        if !all.iter().any(|s| s.name() == *name) {
            return Err(CliError::Usage(format!("check `{}` does not apply to this datum", name)));
        }
    }
    Ok(all.into_iter().filter(|s| names.contains(&s.name())).collect())
}

/// A suite file: a JSON array of `{"check": name, "params": {...}}`.
pub fn parse_config(text: &str) -> Result<Vec<CheckSpec>, CliError> {
    let specs: Vec<CheckSpec> = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("suite config: {}", e)))?;
    for s in &specs {
        within_bounds(s).map_err(CliError::Usage)?;
    }
    Ok(specs)
}

/// The cached part of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub checked: usize,
    pub max_pos_deg: Option<i32>,
    pub min_neg_deg: Option<i32>,
    pub counterexample: Option<String>,
}

impl From<&CheckReport> for Outcome {
    fn from(r: &CheckReport) -> Self {
        Outcome {
            status: r.status,
            checked: r.tally.checked,
            max_pos_deg: r.tally.max_pos_deg,
            min_neg_deg: r.tally.min_neg_deg,
            counterexample: r.tally.counterexample.clone(),
        }
    }
}

/// One report line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub spec: CheckSpec,
    pub outcome: Outcome,
}

impl Line {
    pub fn passed(&self) -> bool {
        self.outcome.status == Status::Pass
    }

    pub fn to_json(&self, datum: &str) -> String {
        let tagged = serde_json::to_value(&self.spec).expect("spec serializes");
        let mut params = match tagged.get("params") {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        params.insert("datum".into(), json!(datum));
        let o = &self.outcome;
        let v = json!({
            "check": self.spec.name(),
            "params": params,
            "status": o.status,
            "checked": o.checked,
            "max_pos_deg": o.max_pos_deg,
            "min_neg_deg": o.min_neg_deg,
            "counterexample": o.counterexample,
        });
        serde_json::to_string(&v).expect("report serializes")
    }
}

/// Runs `specs` on `jobs` threads (`0` = all cores), reusing cached
/// outcomes. Lines are sorted stably by check name, so the output does not
/// depend on `jobs`.
pub fn run(loaded: &Loaded, specs: &[CheckSpec], jobs: usize, cache: &Cache) -> Result<Vec<Line>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| CliError::Usage(e.to_string()))?;
    let datum = &loaded.datum;
    let mut lines: Vec<Line> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| -> Result<Line, CliError> {
                let params = serde_json::to_string(spec).expect("spec serializes");
                let key = CacheKey::new(&loaded.canonical, "verify", &params);
                let body = cache.get_or_insert_with(&key, || -> Result<String, CliError> {
                    let r = run_check(datum, spec);
                    Ok(serde_json::to_string(&Outcome::from(&r)).expect("outcome serializes"))
                })?;
                let outcome = match serde_json::from_str(&body) {
                    Ok(o) => o,
                    Err(_) => {
                        let o = Outcome::from(&run_check(datum, spec));
                        cache.put(&key, &serde_json::to_string(&o).expect("outcome serializes"))?;
                        o
                    }
                };
                Ok(Line { spec: spec.clone(), outcome })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    lines.sort_by(|a, b| a.spec.name().cmp(b.spec.name()));
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum_file::load;

    #[test]
    fn selection() {
        let a1 = RootDatum::type_a(1);
        assert_eq!(select(&a1, "default").unwrap(), default_suite(&a1));
        let picked = select(&a1, "spherical,cb_oracle").unwrap();
        assert_eq!(picked.iter().map(|s| s.name()).collect::<Vec<_>>(), ["cb_oracle", "spherical"]);
        assert!(matches!(select(&a1, "nonsense"), Err(CliError::Usage(_))));
        let aff = load("rank2-affine").unwrap().datum;
        assert!(matches!(select(&aff, "udot_mult"), Err(CliError::Usage(_))));
        assert_eq!(default_suite(&aff).len(), 3);
    }

    #[test]
    fn config_round_trip() {
        assert!(parse_config("[]").unwrap().is_empty());
        let specs = vec![CheckSpec::Spherical { bound: 10 }, CheckSpec::Transition { factors: vec![Factor::Lw(vec![1]), Factor::Hw(vec![1])] }];
        let text = serde_json::to_string(&specs).unwrap();
        assert!(text.contains(r#""check":"transition""#), "{}", text);
        assert_eq!(parse_config(&text).unwrap(), specs);
        assert!(parse_config(r#"[{"check":"structure_positivity","params":{"max_trace":50}}]"#).is_err());
        assert!(parse_config(r#"[{"check":"bogus","params":{}}]"#).is_err());
    }

    #[test]
    fn lines_are_independent_of_jobs() {
        let l = load("a1").unwrap();
        let specs = select(&l.datum, "spherical,transition,cb_oracle").unwrap();
        let a = run(&l, &specs, 1, &Cache::disabled()).unwrap();
        let b = run(&l, &specs, 3, &Cache::disabled()).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(Line::passed));
        let j = a[0].to_json("a1");
        let v: Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["check"], "cb_oracle");
        assert_eq!(v["params"]["datum"], "a1");
        assert_eq!(v["status"], "pass");
        assert!(v["counterexample"].is_null());
    }
}
