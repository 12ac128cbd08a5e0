//! Study config files and the parallel runner.
//!
//! A config file is a JSON object with the fields of
//! [`StudyConfig`], except that `scheme` and `n` may also be arrays. The
//! study then runs one cell per `(scheme, n)` pair. A scheme may carry a
//! `name` used to label its rows.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use weibcv_core::montecarlo::{aggregate, run_replication, StudyConfig, StudyReport};
use weibcv_core::{Parameter, Result};

/// One `(scheme, n)` combination of a study file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub scheme_name: String,
    pub config: StudyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub scheme_name: String,
    pub report: StudyReport,
}

/// Split a study file into cells. Errors are messages for the user.
pub fn parse_study(text: &str) -> std::result::Result<Vec<Cell>, String> {
    let root: Value = serde_json::from_str(text).map_err(|e| format!("line {}: {e}", e.line()))?;
    let obj = root.as_object().ok_or("study config must be a JSON object")?;
    let as_list = |key: &str| -> std::result::Result<Vec<Value>, String> {
        match obj.get(key) {
            Some(Value::Array(items)) if key == "n" || items.first().is_some_and(Value::is_object) => Ok(items.clone()),
            Some(v) => Ok(vec![v.clone()]),
            None => Err(format!("missing field `{key}`")),
        }
    };
    let schemes = as_list("scheme")?;
    let sizes = as_list("n")?;
    if schemes.is_empty() || sizes.is_empty() {
        return Err("`scheme` and `n` must not be empty".into());
    }

    let mut cells = Vec::new();
    for (k, scheme) in schemes.iter().enumerate() {
        let name = scheme.get("name").and_then(Value::as_str).map_or_else(|| format!("scheme{}", k + 1), str::to_owned);
        for n in &sizes {
            let mut one = obj.clone();
            one.insert("scheme".into(), scheme.clone());
            one.insert("n".into(), n.clone());
            let config: StudyConfig =
                serde_json::from_value(Value::Object(one)).map_err(|e| format!("{name}, n={n}: {e}"))?;
            config.validate().map_err(|e| format!("{name}, n={n}: {e}"))?;
            cells.push(Cell { scheme_name: name.clone(), config });
        }
    }
    Ok(cells)
}

/// Run one cell with replications spread over the rayon pool.
pub fn run_cell(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let outcomes =
        (0..config.replications).into_par_iter().map(|r| run_replication(config, r)).collect::<Result<Vec<_>>>()?;
    aggregate(config, &outcomes)
}

pub fn run_cells(cells: &[Cell]) -> Result<Vec<CellReport>> {
    cells.iter().map(|c| Ok(CellReport { scheme_name: c.scheme_name.clone(), report: run_cell(&c.config)? })).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub const REPORT_HEADER: [&str; 14] = [
    "scheme",
    "n",
    "m",
    "kind",
    "method",
    "parameter",
    "mse",
    "mean",
    "coverage",
    "avg_width",
    "used",
    "failure_rate",
    "unreliable",
    "rejected_samples",
];

/// One row per method or interval, parameter and cell.
pub fn report_rows(cells: &[CellReport]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in cells {
        let r = &c.report;
        let lead = |kind: &str, method: &str, p: Parameter| {
            vec![
                c.scheme_name.clone(),
                r.n.to_string(),
                r.m.to_string(),
                kind.to_owned(),
                method.to_owned(),
                p.name().to_owned(),
            ]
        };
        for row in &r.points {
            let mut v = lead("point", row.method.name(), row.parameter);
            v.extend([
                opt(row.mse),
                opt(row.mean),
                String::new(),
                String::new(),
                row.used.to_string(),
                row.failure_rate.to_string(),
                row.unreliable.to_string(),
                r.rejected_samples.to_string(),
            ]);
            rows.push(v);
        }
        for row in &r.intervals {
            let mut v = lead("interval", row.method.name(), row.parameter);
            v.extend([
                String::new(),
                String::new(),
                opt(row.coverage),
                opt(row.avg_width),
                row.used.to_string(),
                row.failure_rate.to_string(),
                row.unreliable.to_string(),
                r.rejected_samples.to_string(),
            ]);
            rows.push(v);
        }
    }
    rows
}

pub fn report_csv(cells: &[CellReport]) -> String {
    crate::table::to_csv(&REPORT_HEADER, &report_rows(cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"{
        "params_truth": {"kappa": 1.25, "tau": 0.525},
        "scheme": [{"name": "I", "t": [1,2,3,4], "p": [0,0,0,1]},
                   {"name": "III", "t": [1,2,3,4], "p": [0.25,0.25,0.25,1]}],
        "n": [50, 200],
        "L": 3, "methods": ["mle", "llse"], "intervals": ["maci"], "seed": 4
    }"#;

    #[test]
    fn cells_follow_config_axes() {
        let cells = parse_study(CFG).unwrap();
        let axes: Vec<_> = cells.iter().map(|c| (c.scheme_name.as_str(), c.config.n)).collect();
        assert_eq!(axes, [("I", 50), ("I", 200), ("III", 50), ("III", 200)]);
    }

    #[test]
    fn single_cell_config() {
        let text = CFG.replace("[50, 200]", "80");
        assert_eq!(parse_study(&text).unwrap().len(), 2);
    }

    #[test]
    fn parallel_matches_sequential() {
        let cells = parse_study(CFG).unwrap();
        let par = run_cell(&cells[0].config).unwrap();
        let seq = weibcv_core::montecarlo::run_study(&cells[0].config).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn invalid_scheme_is_reported() {
        let text = CFG.replace("[0,0,0,1]", "[0,0,0,0.5]");
        assert!(parse_study(&text).unwrap_err().contains("I, n=50"));
    }
}
