//! JSON, CSV and text renderings of command reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::commands::{AnalysisOutput, SimulationOutput, SweepOutput, TestOutput, VerifyOutput};

/// Fixed-point with 15 decimals, or scientific with 14 for tiny magnitudes, so
/// every probability carries at least 12 significant digits.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.14e}")
    } else {
        format!("{x:.15}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_doc(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

pub fn analysis_csv(a: &AnalysisOutput) -> String {
    csv_doc(
        &[
            "kind",
            "p",
            "psp",
            "edge",
            "beats_chance",
            "premium_bound",
            "y",
            "optimal_y",
        ],
        [vec![
            a.kind.to_string(),
            num(a.p),
            num(a.psp),
            num(a.edge),
            a.beats_chance.to_string(),
            num(a.premium_bound),
            join(&a.y),
            join(&a.optimal_y),
        ]],
    )
}

pub fn analysis_text(a: &AnalysisOutput) -> String {
    let mut s = String::new();
    writeln!(s, "kind           {}", a.kind).unwrap();
    writeln!(s, "outcomes       {}", a.outcomes.len()).unwrap();
    for (k, (o, y)) in a.outcomes.iter().zip(&a.y).enumerate() {
        writeln!(
            s,
            "  [{k}] weight {}  success {}  y {}",
            num(o.weight),
            num(o.success_prob),
            num(*y)
        )
        .unwrap();
    }
    writeln!(s, "p              {}", num(a.p)).unwrap();
    writeln!(s, "psp            {}", num(a.psp)).unwrap();
    writeln!(s, "edge           {}", num(a.edge)).unwrap();
    writeln!(s, "beats_chance   {}", a.beats_chance).unwrap();
    writeln!(s, "premium_bound  {}", num(a.premium_bound)).unwrap();
    writeln!(s, "optimal_y      {}", join(&a.optimal_y)).unwrap();
    s
}

const SIM_HEADER: [&str; 12] = [
    "kind",
    "seed",
    "n",
    "hits",
    "successes",
    "p",
    "analytic_psp",
    "empirical_psp",
    "std_error",
    "ci_low",
    "ci_high",
    "hit_p_value",
];

pub fn simulation_csv(o: &SimulationOutput) -> String {
    let r = &o.result;
    csv_doc(
        &SIM_HEADER,
        [vec![
            o.kind.to_string(),
            o.seed.to_string(),
            r.n.to_string(),
            r.hits.to_string(),
            r.successes.to_string(),
            num(o.p),
            num(o.analytic_psp),
            num(r.empirical_psp),
            num(r.std_error),
            num(r.ci_low),
            num(r.ci_high),
            opt(o.hit_test.as_ref().map(|t| t.p_value)),
        ]],
    )
}

fn test_line(s: &mut String, label: &str, t: &Option<TestOutput>) {
    match t {
        Some(t) => {
            let rejects: Vec<String> = t
                .reject_at
                .iter()
                .map(|r| format!("{}:{}", r.alpha, if r.reject { "reject" } else { "keep" }))
                .collect();
            writeln!(
                s,
                "{label:<14} {} vs {}  p-value {}  {}",
                t.alternative,
                num(t.null_value),
                num(t.p_value),
                rejects.join(" ")
            )
            .unwrap();
        }
        None => writeln!(s, "{label:<14} n/a").unwrap(),
    }
}

pub fn simulation_text(o: &SimulationOutput) -> String {
    let r = &o.result;
    let mut s = String::new();
    writeln!(s, "kind           {}", o.kind).unwrap();
    writeln!(s, "seed           {} ({:?})", o.seed, o.seed_source).unwrap();
    writeln!(
        s,
        "trials         {} in {} partitions of {}",
        r.n, r.partitions, r.partition_size
    )
    .unwrap();
    writeln!(s, "p              {}", num(o.p)).unwrap();
    writeln!(s, "analytic_psp   {}", num(o.analytic_psp)).unwrap();
    writeln!(
        s,
        "empirical_psp  {}  (se {})",
        num(r.empirical_psp),
        num(r.std_error)
    )
    .unwrap();
    writeln!(s, "99% interval   [{}, {}]", num(r.ci_low), num(r.ci_high)).unwrap();
    writeln!(s, "success_rate   {}", num(r.successes as f64 / r.n as f64)).unwrap();
    test_line(&mut s, "hit_test", &o.hit_test);
    test_line(&mut s, "success_test", &o.success_test);
    if let Some(rows) = &o.railroad_table {
        writeln!(s).unwrap();
        writeln!(
            s,
            "{:<8}{:<8}{:<10}{:>20}{:>20}{:>20}",
            "station", "spinner", "train", "pointer_correct", "analytic", "empirical"
        )
        .unwrap();
        for row in rows {
            writeln!(
                s,
                "{:<8}{:<8}{:<10}{:>20}{:>20}{:>20}",
                row.station,
                row.spinner,
                row.direction,
                num(row.pointer_correct),
                num(row.analytic),
                num(row.empirical)
            )
            .unwrap();
        }
        let total: f64 = rows.iter().map(|r| r.analytic).sum();
        let seen: f64 = rows.iter().map(|r| r.empirical).sum();
        writeln!(
            s,
            "{:<26}{:>20}{:>20}{:>20}",
            "total",
            "",
            num(total),
            num(seen)
        )
        .unwrap();
    }
    s
}

const SWEEP_HEADER: [&str; 7] = [
    "param",
    "value",
    "p",
    "analytic_psp",
    "empirical_psp",
    "ci_low",
    "ci_high",
];

pub fn sweep_csv(o: &SweepOutput) -> String {
    csv_doc(
        &SWEEP_HEADER,
        o.rows.iter().map(|r| {
            vec![
                r.param.clone(),
                num(r.value),
                num(r.p),
                num(r.analytic_psp),
                opt(r.empirical_psp),
                opt(r.ci_low),
                opt(r.ci_high),
            ]
        }),
    )
}

pub fn sweep_text(o: &SweepOutput) -> String {
    let mut s = String::new();
    writeln!(s, "{} sweep over {}", o.kind, o.param).unwrap();
    writeln!(
        s,
        "{:>20}{:>20}{:>20}{:>20}",
        "value", "p", "analytic_psp", "empirical_psp"
    )
    .unwrap();
    for r in &o.rows {
        writeln!(
            s,
            "{:>20}{:>20}{:>20}{:>20}",
            num(r.value),
            num(r.p),
            num(r.analytic_psp),
            opt(r.empirical_psp)
        )
        .unwrap();
    }
    s
}

pub fn verify_csv(o: &VerifyOutput) -> String {
    csv_doc(
        &["suite", "instances", "applicable", "violations", "passed"],
        o.suites.iter().map(|r| {
            vec![
                r.name.to_string(),
                r.instances.to_string(),
                r.applicable.to_string(),
                r.violations.to_string(),
                r.passed.to_string(),
            ]
        }),
    )
}

pub fn verify_text(o: &VerifyOutput) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "seed {} ({:?}), {} instances per suite",
        o.seed, o.seed_source, o.instances
    )
    .unwrap();
    for r in &o.suites {
        writeln!(
            s,
            "{} {:<24} applicable {:>6}  violations {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.applicable,
            r.violations
        )
        .unwrap();
        if let Some(c) = &r.first_violation {
            writeln!(
                s,
                "     counterexample: {}",
                serde_json::to_string(c).expect("serializes")
            )
            .unwrap();
        }
    }
    writeln!(s, "three-outcome table: {}", o.three_outcome_table).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(num(0.572), "0.572000000000000");
        assert_eq!(num(0.0), "0.000000000000000");
        let tiny = num(1.234567890123456e-20);
        assert!(
            tiny.starts_with("1.2345678901234") && tiny.ends_with("e-20"),
            "{tiny}"
        );
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 0.333333333333333);
    }
}
