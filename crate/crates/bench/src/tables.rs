//! Reproduction of the four benchmark tables.

use std::fmt::Write as _;

use dicke_qfi::operators::{
    build_hamiltonian, closed_form_extrema, extremal_eigenpair, Direction, HamiltonianSpec,
};
use dicke_qfi::optimize::{best_near_optimal, separable_bound, AxisSearchConfig, NearOptimal};
use dicke_qfi::qfi::{qfi_pure_symmetric, sensitivity};
use dicke_qfi::states::{build_probe, ProbeKind, ProbeSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BenchError, BenchResult};
use crate::reference::{
    TABLE1, TABLE3, TABLE3_SENSITIVITY_ABS, TABLE3_SEPARABLE_REL, TABLE4, TABLE4_REL,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

impl TableFormat {
    pub fn parse(s: &str) -> BenchResult<Self> {
        match s {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(BenchError::Config(format!("unknown table format '{s}'"))),
        }
    }
}

impl Table {
    fn new(title: &str, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    fn check(&mut self, label: String, passed: bool, detail: String) {
        self.checks.push(Check {
            label,
            passed,
            detail,
        });
    }

    pub fn render_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", line(&self.columns));
        for row in &self.rows {
            let _ = writeln!(out, "{}", line(row));
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", c.label, c.detail);
        }
        out
    }

    pub fn render(&self, format: TableFormat) -> BenchResult<String> {
        Ok(match format {
            TableFormat::Text => self.render_text(),
            TableFormat::Json => serde_json::to_string_pretty(self)? + "\n",
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| BenchError::Serialize(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| BenchError::Serialize(e.to_string()))?
            }
        })
    }
}

fn f4(x: f64) -> String {
    // No "-0.0000" for round-off below the printed precision.
    let x = if x.abs() < 5e-5 { 0.0 } else { x };
    format!("{x:.4}")
}

fn pairs(list: &[(usize, usize)]) -> String {
    list.iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Best Dicke pair per `N` under the linear generator.
pub fn table1(tolerance: f64) -> BenchResult<Table> {
    let mut t = Table::new(
        "Table I: near-optimal Dicke superpositions, linear generator",
        &["N", "best pairs", "F_Q", "published", "|diff|", "status"],
    );
    let cfg = AxisSearchConfig::default();
    let results: Vec<NearOptimal> = TABLE1
        .par_iter()
        .map(|&(n, _)| best_near_optimal(n, &HamiltonianSpec::linear(n), &cfg))
        .collect::<dicke_qfi::Result<_>>()?;
    for (&(n, published), best) in TABLE1.iter().zip(&results) {
        let diff = (best.best.qfi - published).abs();
        let ok = diff <= tolerance;
        t.rows.push(vec![
            n.to_string(),
            pairs(&best.ties),
            f4(best.best.qfi),
            format!("{published}"),
            f4(diff),
            if ok { "ok" } else { "MISMATCH" }.into(),
        ]);
        t.check(
            format!("table1 N={n}"),
            ok,
            format!(
                "{:.4} vs {published} (tolerance {tolerance})",
                best.best.qfi
            ),
        );
    }
    t.notes
        .push("GHZ pair (0,N) excluded; spin-flip partners (N-l',N-l) tie".into());
    Ok(t)
}

/// Closed-form extrema against the numerical spectrum at a tilted axis.
pub fn table2(ns: &[usize]) -> BenchResult<Table> {
    let mut t = Table::new(
        "Table II: extremal eigenvalues of the two-body generators",
        &[
            "r",
            "N",
            "lambda_max",
            "lambda_min",
            "phi_max",
            "phi_min",
            "F_Q opt",
            "numeric max",
            "numeric min",
            "max dev",
        ],
    );
    let tilt = Direction::new(0.9, 0.4);
    for r in 1..=4u8 {
        for &n in ns {
            let cf = closed_form_extrema(r, n)?;
            let h = build_hamiltonian(&HamiltonianSpec::two_body(r, n).with_axis(tilt))?;
            let num = extremal_eigenpair(&h)?;
            let dev = (num.lambda_max - cf.lambda_max)
                .abs()
                .max((num.lambda_min - cf.lambda_min).abs());
            t.rows.push(vec![
                r.to_string(),
                n.to_string(),
                f4(cf.lambda_max),
                f4(cf.lambda_min),
                cf.phi_max.label(n),
                cf.phi_min.label(n),
                f4(cf.optimal_qfi),
                f4(num.lambda_max),
                f4(num.lambda_min),
                format!("{dev:.1e}"),
            ]);
            t.check(
                format!("table2 r={r} N={n}"),
                dev < 1e-9
                    && (cf.optimal_qfi - cf.spread_squared()).abs()
                        <= 1e-12 * cf.optimal_qfi.max(1.0),
                format!("eigenvalue deviation {dev:.1e}"),
            );
        }
    }
    if ns.iter().any(|n| n % 2 == 1) {
        t.notes.push("r=3, odd N: lambda_min = -(N-1)/8, the value consistent with the F_Q row; the printed benchmark lists -N/8".into());
    }
    if ns.contains(&8) {
        t.notes.push(
            "r=4, N=8: closed-form optimum 156.25, while the benchmark table lists 144 (near-optimal |D_{0,4}>)"
                .into(),
        );
    }
    Ok(t)
}

/// Values behind the Table III row for one `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table3Values {
    pub r: u8,
    pub separable: f64,
    /// Optimal probe for r = 1..3, near-optimal pair for r = 4.
    pub probe: f64,
    pub probe_kind: String,
    pub optimal: f64,
    pub nl_snl: f64,
    pub nl_hl: f64,
}

pub fn table3_values() -> BenchResult<Vec<Table3Values>> {
    let n = 8;
    (1..=4u8)
        .into_par_iter()
        .map(|r| {
            let spec = HamiltonianSpec::two_body(r, n);
            let separable = separable_bound(&spec, &Default::default())?.qfi;
            let opt_state = build_probe(&ProbeSpec::new(ProbeKind::OptimalFor(spec), n))?;
            let optimal = qfi_pure_symmetric(&opt_state, &spec)?.value;
            let (probe, probe_kind) = if r == 4 {
                let best = best_near_optimal(n, &spec, &AxisSearchConfig::default())?;
                (best.best.qfi, format!("near-optimal {}", pairs(&best.ties)))
            } else {
                (optimal, "optimal".to_string())
            };
            Ok(Table3Values {
                r,
                separable,
                probe,
                probe_kind,
                optimal,
                nl_snl: sensitivity(separable),
                nl_hl: sensitivity(probe),
            })
        })
        .collect()
}

pub fn table3() -> BenchResult<Table> {
    let mut t = Table::new(
        "Table III: nonlinear benchmarks at N=8",
        &[
            "r",
            "F_Q sep",
            "F_Q probe",
            "probe",
            "dtheta NL-SNL",
            "dtheta NL-HL",
            "published",
        ],
    );
    let values = table3_values()?;
    for (v, p) in values.iter().zip(TABLE3.iter()) {
        t.rows.push(vec![
            v.r.to_string(),
            f4(v.separable),
            f4(v.probe),
            v.probe_kind.clone(),
            f4(v.nl_snl),
            f4(v.nl_hl),
            format!("{} / {} / {} / {}", p.separable, p.probe, p.nl_snl, p.nl_hl),
        ]);
        let sep_rel = (v.separable - p.separable).abs() / p.separable;
        t.check(
            format!("table3 r={} separable", v.r),
            sep_rel <= TABLE3_SEPARABLE_REL,
            format!(
                "{:.4} vs {} (rel {:.1e})",
                v.separable, p.separable, sep_rel
            ),
        );
        t.check(
            format!("table3 r={} probe", v.r),
            (v.probe - p.probe).abs() <= 1e-6,
            format!("{:.6} vs {}", v.probe, p.probe),
        );
        let ds = (v.nl_snl - p.nl_snl).abs();
        let dh = (v.nl_hl - p.nl_hl).abs();
        t.check(
            format!("table3 r={} sensitivities", v.r),
            ds <= TABLE3_SENSITIVITY_ABS && dh <= TABLE3_SENSITIVITY_ABS,
            format!(
                "NL-SNL {:.4} vs {}, NL-HL {:.4} vs {}",
                v.nl_snl, p.nl_snl, v.nl_hl, p.nl_hl
            ),
        );
        if v.r == 4 {
            t.notes.push(format!(
                "documented discrepancy: r=4 closed-form optimal probe gives {:.2} (NL-HL {:.4}); the table lists the near-optimal {:.0}",
                v.optimal,
                sensitivity(v.optimal),
                v.probe
            ));
        }
    }
    Ok(t)
}

fn spin_flip(n: usize, (a, b): (usize, usize)) -> (usize, usize) {
    (n - b, n - a)
}

pub fn table4() -> BenchResult<Table> {
    let mut t = Table::new(
        "Table IV: near-optimal Dicke superpositions, two-body generators",
        &[
            "N",
            "r",
            "best pairs",
            "F_Q",
            "published pair",
            "published",
            "rel err",
            "status",
        ],
    );
    let cfg = AxisSearchConfig::default();
    let results: Vec<NearOptimal> = TABLE4
        .par_iter()
        .map(|&(n, r, _, _)| best_near_optimal(n, &HamiltonianSpec::two_body(r, n), &cfg))
        .collect::<dicke_qfi::Result<_>>()?;
    for (&(n, r, pair, published), best) in TABLE4.iter().zip(&results) {
        let rel = (best.best.qfi - published).abs() / published;
        let pair_ok = best.ties.contains(&pair) || best.ties.contains(&spin_flip(n, pair));
        let ok = rel <= TABLE4_REL && pair_ok;
        t.rows.push(vec![
            n.to_string(),
            r.to_string(),
            pairs(&best.ties),
            f4(best.best.qfi),
            pairs(&[pair]),
            format!("{published}"),
            format!("{:.2}%", rel * 100.0),
            if ok { "ok" } else { "MISMATCH" }.into(),
        ]);
        t.check(
            format!("table4 N={n} r={r}"),
            ok,
            format!(
                "{:.4} vs {published} (rel {:.2}%), listed pair {} tie set",
                best.best.qfi,
                rel * 100.0,
                if pair_ok { "in" } else { "NOT in" }
            ),
        );
    }
    t.notes.push(
        "pairs reaching the optimal bound (lambda_max-lambda_min)^2 are excluded before ranking"
            .into(),
    );
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table3_reports_both_r4_values() {
        let v = table3_values().unwrap();
        let r4 = v.iter().find(|x| x.r == 4).unwrap();
        assert!((r4.probe - 144.0).abs() < 1e-6);
        assert!((r4.optimal - 156.25).abs() < 1e-9);
        assert!((r4.nl_hl - 1.0 / 12.0).abs() < 1e-9);
        let r1 = v.iter().find(|x| x.r == 1).unwrap();
        assert_eq!(r1.probe, r1.optimal);
    }

    #[test]
    fn renderings() {
        let t = table2(&[4, 5]).unwrap();
        assert!(t.passed());
        let text = t.render(TableFormat::Text).unwrap();
        assert!(text.lines().any(|l| l.starts_with("note: r=3, odd N")));
        assert!(!text.contains("-0.0000"));
        let csv = t.render(TableFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + 8);
        assert!(TableFormat::parse("xml").is_err());
    }
}
