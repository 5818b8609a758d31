//! Repeater-chain scenarios read from TOML and their stage reports.

use std::io::Write;

use qdrepeater::protocols::{run_chain, ChainReport, Scenario};

use crate::output::{fmt_num, Format, Table};
use crate::CliError;

pub const STAGE_COLUMNS: [&str; 3] = ["stage", "probability", "fidelity"];

pub fn run(scenario: &Scenario) -> Result<ChainReport, CliError> {
    scenario
        .validate()
        .map_err(|e| CliError::Usage(format!("invalid scenario: {e}")))?;
    run_chain(scenario).map_err(|e| CliError::Runtime(e.to_string()))
}

/// One row per stage plus a closing `total` row.
pub fn stage_table(report: &ChainReport) -> Table {
    let mut t = Table::new(&STAGE_COLUMNS);
    for s in &report.stages {
        t.rows
            .push(vec![s.name.clone(), fmt_num(s.probability), fmt_num(s.fidelity)]);
    }
    t.rows.push(vec![
        "total".into(),
        fmt_num(report.probability),
        fmt_num(report.fidelity),
    ]);
    t
}

pub fn write_report(report: &ChainReport, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    if format == Format::Csv {
        return stage_table(report).write_csv(out);
    }
    let width = report
        .stages
        .iter()
        .map(|s| s.name.chars().count())
        .max()
        .unwrap_or(0)
        .max(5);
    writeln!(out, "chain {} to {}", report.endpoints.0, report.endpoints.1)?;
    writeln!(out, "{:<width$}  {:>11}  {:>8}", "stage", "probability", "fidelity")?;
    for s in &report.stages {
        writeln!(out, "{:<width$}  {:>11.6}  {:>8.6}", s.name, s.probability, s.fidelity)?;
    }
    writeln!(
        out,
        "fidelity {:.6}, probability {:.6}",
        report.fidelity, report.probability
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDEAL: &str = r#"
[[nodes]]
name = "A"
ideal = true

[[nodes]]
name = "B"
ideal = true

[[segments]]
left = "A"
right = "B"
noise_left = { theta = 0.4, phi = 1.3 }
"#;

    #[test]
    fn ideal_summary_line() {
        let s: Scenario = toml::from_str(IDEAL).unwrap();
        let r = run(&s).unwrap();
        let mut out = Vec::new();
        write_report(&r, Format::Text, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.ends_with("fidelity 1.000000, probability 1.000000\n"), "{text}");
        assert!(text.starts_with("chain A:0 to B:0\n"));
    }

    #[test]
    fn csv_has_total_row() {
        let s: Scenario = toml::from_str(IDEAL).unwrap();
        let t = stage_table(&run(&s).unwrap());
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1][0], "total");
    }

    #[test]
    fn invalid_scenario_is_usage_error() {
        let s: Scenario = toml::from_str(&IDEAL.replace("right = \"B\"", "right = \"C\"")).unwrap();
        assert!(matches!(run(&s), Err(CliError::Usage(_))));
    }
}
