use std::fmt::Write;

use crate::bench::BenchReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

pub fn emit_report(reports: &[BenchReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
            out.push('\n');
            out
        }
        Format::Human => human_table(reports),
    }
}

fn human_table(reports: &[BenchReport]) -> String {
    let name_width = reports
        .iter()
        .map(|r| r.validator.len())
        .chain(["validator".len()])
        .max()
        .unwrap_or(0);
    let input_width = reports
        .iter()
        .map(|r| r.input.len())
        .chain(["input".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    writeln!(
        out,
        "{:<name_width$}  {:<input_width$}  {:>10}  {:>10}  {:>10}",
        "validator", "input", "bytes", "best GB/s", "mean GB/s"
    )
    .unwrap();
    for r in reports {
        let marker = if r.compensated { " (compensated)" } else { "" };
        writeln!(
            out,
            "{:<name_width$}  {:<input_width$}  {:>10}  {:>10.3}  {:>10.3}{marker}",
            r.validator,
            r.input,
            r.input_bytes,
            r.best_throughput / 1e9,
            r.mean_throughput / 1e9,
        )
        .unwrap();
    }
    out
}
