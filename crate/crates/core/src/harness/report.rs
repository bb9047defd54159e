//! Rendering of experiment reports.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{ExperimentReport, SIGNIFICANCE};
use crate::algorithms::TracePoint;

/// Anytime checkpoints, in percent of the evaluation budget.
pub const PLOT_CHECKPOINTS: [u64; 13] = [1, 2, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

const CSV_HEADER: [&str; 13] = [
    "sweep_var",
    "sweep_value",
    "model",
    "algorithm",
    "replicate",
    "final_f",
    "f_hat_in_run",
    "evaluations",
    "wall_ms",
    "mean",
    "std",
    "wilcoxon_p_vs_ref",
    "rank",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// The full report, re-readable by [`ExperimentReport::from_json`].
    Json,
    /// One row per cell plus one aggregate row per (setting, algorithm).
    Csv,
    /// A results table with the best mean in bold and significance marks.
    Markdown,
    /// Mean best-so-far estimate per (setting, algorithm, checkpoint).
    PlotData,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
            ReportFormat::PlotData => "plot.csv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "plot" | "plotdata" => Ok(ReportFormat::PlotData),
            _ => Err(format!("unknown report format `{s}` (expected json, csv, markdown or plot)")),
        }
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => csv_bytes(report),
        ReportFormat::Markdown => markdown(report).into_bytes(),
        ReportFormat::PlotData => plot_data(report),
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_bytes(report: &ExperimentReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    let var = report.sweep_var.as_str();
    let model = report.model.as_str();
    for &value in &report.values {
        for replicate in 0..report.replicates {
            for &alg in &report.algorithms {
                let cell = report
                    .cells
                    .iter()
                    .find(|c| c.sweep_value == value && c.replicate == replicate && c.algorithm == alg);
                let failed = report
                    .failures
                    .iter()
                    .any(|f| f.sweep_value == value && f.replicate == replicate && f.algorithm == alg);
                if cell.is_none() && !failed {
                    continue;
                }
                w.write_record([
                    var.to_string(),
                    value.to_string(),
                    model.to_string(),
                    alg.as_str().to_string(),
                    replicate.to_string(),
                    opt(cell.map(|c| c.final_f)),
                    opt(cell.map(|c| c.f_hat_in_run)),
                    opt(cell.map(|c| c.evaluations)),
                    opt(cell.and_then(|c| c.wall_ms)),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ])
                .expect("in-memory write");
            }
        }
        for row in report.aggregates.iter().filter(|r| r.sweep_value == value) {
            w.write_record([
                var.to_string(),
                value.to_string(),
                model.to_string(),
                row.algorithm.as_str().to_string(),
                "all".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                opt(row.mean),
                opt(row.std),
                opt(row.wilcoxon_p_vs_ref),
                opt(row.rank),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Two decimals with trailing zeros removed, as in `7`, `2.5` or `2.17`.
fn short(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let model = match report.model.as_str() {
        "interview" => "Interview",
        _ => "Coordination",
    };
    let _ = writeln!(out, "### {model} model: varying {}\n", report.sweep_var.symbol());
    let symbol = report.sweep_var.symbol().replace('|', "\\|");
    let _ = write!(out, "| {symbol} |");
    for v in &report.values {
        let _ = write!(out, " {v} |");
    }
    let _ = writeln!(out, " Avg.R. |");
    let _ = writeln!(out, "|---|{}---|", "---|".repeat(report.values.len()));

    let reference = report.reference;
    for (k, &alg) in report.algorithms.iter().enumerate() {
        let _ = write!(out, "| {} |", alg.label());
        for &value in &report.values {
            let Some(row) = report.aggregate(value, alg) else {
                let _ = write!(out, " - |");
                continue;
            };
            let (Some(mean), Some(std)) = (row.mean, row.std) else {
                let _ = write!(out, " failed |");
                continue;
            };
            let best = report
                .aggregates
                .iter()
                .filter(|r| r.sweep_value == value)
                .filter_map(|r| r.mean)
                .fold(f64::NEG_INFINITY, f64::max);
            let text = format!("{mean:.2}±{std:.2}");
            let text = if mean == best { format!("**{text}**") } else { text };
            let ref_mean = report.aggregate(value, reference).and_then(|r| r.mean);
            let marked = alg != reference
                && row.wilcoxon_p_vs_ref.is_some_and(|p| p < SIGNIFICANCE)
                && ref_mean.is_some_and(|m| m > mean);
            let _ = write!(out, " {text}{} |", if marked { " •" } else { "" });
        }
        let avg = report.average_ranks.get(k).and_then(|(_, r)| *r);
        let _ = writeln!(out, " {} |", avg.map(short).unwrap_or_else(|| "-".into()));
    }
    let _ = writeln!(
        out,
        "\nMean±std of the re-scored objective over {} instances. • marks algorithms that {} beats \
         significantly (Wilcoxon signed-rank, p < {SIGNIFICANCE}).",
        report.replicates,
        reference.label()
    );
    if !report.failures.is_empty() {
        let _ = writeln!(out, "\nFailed cells:\n");
        for f in &report.failures {
            let _ = writeln!(
                out,
                "- {} = {}, replicate {}, {}: {}",
                report.sweep_var.symbol(),
                f.sweep_value,
                f.replicate,
                f.algorithm.label(),
                f.message
            );
        }
    }
    out
}

/// Best-so-far value at `evaluations`; zero before the first trace point.
fn value_at(trace: &[TracePoint], evaluations: u64) -> f64 {
    trace
        .iter()
        .take_while(|t| t.evaluations <= evaluations)
        .last()
        .map_or(0.0, |t| t.best_f1)
}

fn plot_data(report: &ExperimentReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sweep_value", "algorithm", "checkpoint_pct", "evaluations", "mean_best_f_hat"])
        .expect("in-memory write");
    for &value in &report.values {
        for &alg in &report.algorithms {
            let cells: Vec<_> = report
                .cells
                .iter()
                .filter(|c| c.sweep_value == value && c.algorithm == alg)
                .collect();
            let Some(first) = cells.first() else { continue };
            for pct in PLOT_CHECKPOINTS {
                let at = (first.budget * pct).div_ceil(100);
                let mean = cells.iter().map(|c| value_at(&c.trace, at)).sum::<f64>() / cells.len() as f64;
                w.write_record([
                    value.to_string(),
                    alg.as_str().to_string(),
                    pct.to_string(),
                    at.to_string(),
                    mean.to_string(),
                ])
                .expect("in-memory write");
            }
        }
    }
    w.into_inner().expect("in-memory flush")
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::algorithms::Algorithm;

    fn cell(value: usize, replicate: usize, algorithm: Algorithm, f: f64) -> CellRecord {
        CellRecord {
            sweep_value: value,
            replicate,
            algorithm,
            budget: 1000,
            final_f: f,
            f_hat_in_run: f + 0.1,
            evaluations: 900,
            wall_ms: None,
            assignment: vec![(0, 0)],
            trace: vec![
                TracePoint { evaluations: 0, best_f1: 0.0 },
                TracePoint { evaluations: 15, best_f1: f / 2.0 },
                TracePoint { evaluations: 500, best_f1: f },
            ],
        }
    }

    fn sample_report() -> ExperimentReport {
        let algs = vec![Algorithm::Greedy, Algorithm::GsemoSr];
        let mut cells = Vec::new();
        for r in 0..6 {
            cells.push(cell(20, r, Algorithm::Greedy, 10.0 + r as f64));
            cells.push(cell(20, r, Algorithm::GsemoSr, 11.0 + r as f64 * 1.5));
        }
        let mut spec = SweepSpec::preset(SweepVariable::Migrants, Scale::Desk, ModelKind::Interview, 1);
        spec.values = vec![20];
        spec.replicates = 6;
        let (aggregates, average_ranks) = aggregate(&spec, &algs, Algorithm::GsemoSr, &cells);
        ExperimentReport {
            sweep_var: SweepVariable::Migrants,
            model: ModelKind::Interview,
            run_seed: 1,
            replicates: 6,
            samples: 100,
            rescore_samples: 1000,
            values: vec![20],
            algorithms: algs,
            reference: Algorithm::GsemoSr,
            cells,
            failures: vec![],
            aggregates,
            average_ranks,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut report = sample_report();
        report.values.clear();
        report.cells.clear();
        report.aggregates.clear();
        let text = String::from_utf8(emit_report(&report, ReportFormat::Csv)).unwrap();
        assert_eq!(text, format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn aggregate_mean_matches_replicate_rows() {
        let report = sample_report();
        let bytes = emit_report(&report, ReportFormat::Csv);
        let mut rdr = csv::Reader::from_reader(bytes.as_slice());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 12 + 2);
        for alg in ["greedy", "gsemo-sr"] {
            let finals: Vec<f64> = rows
                .iter()
                .filter(|r| &r[3] == alg && &r[4] != "all")
                .map(|r| r[5].parse().unwrap())
                .collect();
            let agg = rows.iter().find(|r| &r[3] == alg && &r[4] == "all").unwrap();
            let mean: f64 = agg[9].parse().unwrap();
            assert!((mean - finals.iter().sum::<f64>() / finals.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn markdown_bolds_best_and_marks_significance() {
        let text = String::from_utf8(emit_report(&sample_report(), ReportFormat::Markdown)).unwrap();
        // GSEMO-SR wins on all 6 pairs: exact two-sided p = 0.03125
        assert!(text.contains("| Greedy | 12.50±1.71 • | 2 |"), "{text}");
        assert!(text.contains("| MR-GSEMO-SR | **14.75±2.56** | 1 |"), "{text}");
        assert!(text.contains("\\|V\\|"));
    }

    #[test]
    fn plot_data_is_monotone() {
        let bytes = emit_report(&sample_report(), ReportFormat::PlotData);
        let mut rdr = csv::Reader::from_reader(bytes.as_slice());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2 * PLOT_CHECKPOINTS.len());
        for alg in ["greedy", "gsemo-sr"] {
            let ys: Vec<f64> = rows.iter().filter(|r| &r[1] == alg).map(|r| r[4].parse().unwrap()).collect();
            assert!(ys.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(ys[0], 0.0, "1% of 1000 is before the first improvement at 15");
        }
    }

    #[test]
    fn json_round_trip() {
        let report = sample_report();
        let back = ExperimentReport::from_json(&emit_report(&report, ReportFormat::Json)).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn short_numbers() {
        assert_eq!(short(7.0), "7");
        assert_eq!(short(2.5), "2.5");
        assert_eq!(short(2.1666), "2.17");
    }
}
