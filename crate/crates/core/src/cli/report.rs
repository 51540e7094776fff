//! Text, CSV and JSON renderings of evaluation results.
//!
//! Machine formats carry four decimals, the human table two. JSON numbers are parsed back
//! from the same four-decimal strings the CSV prints, so the two agree digit for digit.

use std::fmt::Write as _;

use serde_json::{json, Value};

use super::Format;
use crate::compose::{MonteCarloEstimate, PathRiskReport, RiskMatrix};
use crate::world::Path;

fn d2(x: f64) -> String {
    format!("{x:.2}")
}

fn d4(x: f64) -> String {
    format!("{x:.4}")
}

fn n4(x: f64) -> Value {
    let v: f64 = d4(x).parse().unwrap();
    json!(v)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

/// Left-aligned columns separated by two spaces.
fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|k| {
            rows.iter()
                .filter_map(|r| r.get(k))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (k, cell) in row.iter().enumerate() {
            if k + 1 < row.len() {
                let _ = write!(line, "{cell:<w$}  ", w = widths[k]);
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn matrix_json(matrix: &RiskMatrix, report: &PathRiskReport) -> Value {
    let elements: Vec<Value> = matrix
        .columns
        .iter()
        .map(|c| json!({"name": c.name, "category": c.category}))
        .collect();
    let states: Vec<Value> = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            json!({
                "index": i,
                "state": matrix.states[i],
                "risks": row.iter().map(|&r| n4(r)).collect::<Vec<_>>(),
                "finish_prob": n4(report.state_finish_probs[i]),
            })
        })
        .collect();
    json!({"elements": elements, "states": states})
}

fn matrix_table(matrix: &RiskMatrix, report: &PathRiskReport) -> String {
    let mut rows = vec![["i".to_string(), "state".to_string()]
        .into_iter()
        .chain(matrix.columns.iter().map(|c| c.name.clone()))
        .chain(["P(F_i)".to_string()])
        .collect::<Vec<_>>()];
    for (i, row) in matrix.rows.iter().enumerate() {
        rows.push(
            [i.to_string(), matrix.states[i].to_string()]
                .into_iter()
                .chain(row.iter().map(|&r| d2(r)))
                .chain([d2(report.state_finish_probs[i])])
                .collect(),
        );
    }
    aligned(&rows)
}

fn matrix_csv(matrix: &RiskMatrix, report: &PathRiskReport, additive: f64) -> String {
    let mut out = String::from("index,row,col");
    for c in &matrix.columns {
        let _ = write!(out, ",{}", c.name);
    }
    out.push_str(",finish_prob\n");
    for (i, row) in matrix.rows.iter().enumerate() {
        let s = matrix.states[i];
        let _ = write!(out, "{i},{},{}", s.row, s.col);
        for &r in row {
            let _ = write!(out, ",{}", d4(r));
        }
        let _ = writeln!(out, ",{}", d4(report.state_finish_probs[i]));
    }
    let pad = ",".repeat(matrix.columns.len() + 2);
    let _ = writeln!(out, "path_finish_prob{pad},{}", d4(report.path_finish_prob));
    let _ = writeln!(out, "path_risk{pad},{}", d4(report.path_risk));
    let _ = writeln!(out, "additive_cost{pad},{}", d4(additive));
    out
}

fn summary_line(report: &PathRiskReport, additive: f64) -> String {
    format!(
        "P(F) = {}  risk = {}  additive cost (locale) = {}\n",
        d2(report.path_finish_prob),
        d2(report.path_risk),
        d2(additive)
    )
}

pub fn eval(name: &str, matrix: &RiskMatrix, report: &PathRiskReport, additive: f64, format: Format) -> String {
    match format {
        Format::Table => format!(
            "path {name} ({} states)\n{}{}",
            matrix.rows.len(),
            matrix_table(matrix, report),
            summary_line(report, additive)
        ),
        Format::Csv => matrix_csv(matrix, report, additive),
        Format::Json => {
            let mut v = matrix_json(matrix, report);
            v["path"] = json!(name);
            v["path_finish_prob"] = n4(report.path_finish_prob);
            v["path_risk"] = n4(report.path_risk);
            v["additive_cost"] = n4(additive);
            pretty(&v)
        }
    }
}

pub fn plan(
    planner: &str,
    path: &Path,
    matrix: &RiskMatrix,
    report: &PathRiskReport,
    additive: f64,
    format: Format,
) -> String {
    match format {
        Format::Table => format!(
            "{planner} planner: {} states\n{}{}",
            path.len(),
            matrix_table(matrix, report),
            summary_line(report, additive)
        ),
        Format::Csv => matrix_csv(matrix, report, additive),
        Format::Json => {
            let mut v = matrix_json(matrix, report);
            v["planner"] = json!(planner);
            v["path"] = serde_json::to_value(path).unwrap();
            v["path_finish_prob"] = n4(report.path_finish_prob);
            v["path_risk"] = n4(report.path_risk);
            v["additive_cost"] = n4(additive);
            pretty(&v)
        }
    }
}

pub struct Ranked {
    pub name: String,
    pub states: usize,
    pub risk: f64,
    pub additive: f64,
}

/// Competition ranks (1 = best); equal values share a rank.
fn ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|w| *w < v).count())
        .collect()
}

/// Whether entry `i` is strictly ordered one way by risk and the other way by cost against
/// some other entry.
fn disagreements(entries: &[Ranked]) -> Vec<bool> {
    (0..entries.len())
        .map(|i| {
            entries.iter().any(|other| {
                let a = entries[i].risk.partial_cmp(&other.risk);
                let b = entries[i].additive.partial_cmp(&other.additive);
                matches!(
                    (a, b),
                    (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Greater))
                        | (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Less))
                )
            })
        })
        .collect()
}

pub fn compare(entries: &[Ranked], format: Format) -> String {
    let risk_rank = ranks(&entries.iter().map(|e| e.risk).collect::<Vec<_>>());
    let additive_rank = ranks(&entries.iter().map(|e| e.additive).collect::<Vec<_>>());
    let flags = disagreements(entries);
    let disagree = flags.iter().any(|&f| f);
    match format {
        Format::Table => {
            let mut rows = vec![[
                "path",
                "states",
                "risk",
                "additive",
                "risk rank",
                "additive rank",
                "disagrees",
            ]
            .map(String::from)
            .to_vec()];
            for (i, e) in entries.iter().enumerate() {
                rows.push(vec![
                    e.name.clone(),
                    e.states.to_string(),
                    d2(e.risk),
                    d2(e.additive),
                    risk_rank[i].to_string(),
                    additive_rank[i].to_string(),
                    if flags[i] { "yes" } else { "no" }.to_string(),
                ]);
            }
            let verdict = if disagree {
                "rankings disagree"
            } else {
                "rankings agree"
            };
            format!("{}{verdict}\n", aligned(&rows))
        }
        Format::Csv => {
            let mut out = String::from("path,states,path_risk,additive_cost,risk_rank,additive_rank,disagrees\n");
            for (i, e) in entries.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    e.name,
                    e.states,
                    d4(e.risk),
                    d4(e.additive),
                    risk_rank[i],
                    additive_rank[i],
                    flags[i]
                );
            }
            out
        }
        Format::Json => {
            let paths: Vec<Value> = entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    json!({
                        "path": e.name,
                        "states": e.states,
                        "path_risk": n4(e.risk),
                        "additive_cost": n4(e.additive),
                        "risk_rank": risk_rank[i],
                        "additive_rank": additive_rank[i],
                        "disagrees": flags[i],
                    })
                })
                .collect();
            pretty(&json!({"paths": paths, "disagreement": disagree}))
        }
    }
}

pub fn simulate(e: &MonteCarloEstimate, seed: u64, closed: f64, format: Format) -> String {
    let sigmas = if e.std_error > 0.0 {
        (e.estimate - closed).abs() / e.std_error
    } else if e.estimate == closed {
        0.0
    } else {
        f64::INFINITY
    };
    let within = sigmas < 3.0;
    match format {
        Format::Table => aligned(&[
            vec!["trials".into(), e.trials.to_string()],
            vec!["seed".into(), seed.to_string()],
            vec!["failures".into(), e.failures.to_string()],
            vec!["estimate".into(), d4(e.estimate)],
            vec!["std error".into(), d4(e.std_error)],
            vec!["closed form".into(), d4(closed)],
            vec!["deviation".into(), format!("{sigmas:.2} sigma")],
            vec!["within 3 sigma".into(), if within { "yes" } else { "no" }.into()],
        ]),
        Format::Csv => format!(
            "trials,seed,failures,estimate,std_error,closed_form,sigmas\n{},{seed},{},{},{},{},{}\n",
            e.trials,
            e.failures,
            d4(e.estimate),
            d4(e.std_error),
            d4(closed),
            d4(sigmas)
        ),
        Format::Json => pretty(&json!({
            "trials": e.trials,
            "seed": seed,
            "failures": e.failures,
            "estimate": n4(e.estimate),
            "std_error": n4(e.std_error),
            "closed_form": n4(closed),
            "sigmas": if sigmas.is_finite() { n4(sigmas) } else { Value::Null },
            "within_3_sigma": within,
        })),
    }
}
