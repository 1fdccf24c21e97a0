//! Report emission: deterministic CSV metrics, JSON metadata (including
//! wall-clock times, which are deliberately kept out of the CSV so repeated
//! runs are byte-identical), and plot-ready two-column data files.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use crate::analysis::{NormSeries, RateFit};
use crate::error::{Error, Result};
use crate::harness::sweep::ConvergenceReport;

const CSV_HEADER: &str = "# oldroyd-report-v1\n\
    epsilon,u_error_sup,z_norm,tau_sup_scaled,x_final,damping_rate_eps,blowup_time\n";

fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn opt17(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_default()
}

/// The deterministic CSV body for a report.
pub fn render_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(CSV_HEADER);
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig17(row.epsilon),
            sig17(row.u_error_sup),
            sig17(row.z_norm),
            sig17(row.tau_sup_scaled),
            sig17(row.x_final),
            opt17(row.damping_rate_eps),
            opt17(row.blowup),
        );
    }
    out
}

fn rate_json(fit: &Option<RateFit>) -> serde_json::Value {
    match fit {
        None => serde_json::Value::Null,
        Some(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "residual": f.residual,
        }),
    }
}

/// JSON metadata: everything in the CSV plus timing and fit diagnostics.
pub fn render_json(report: &ConvergenceReport) -> serde_json::Value {
    json!({
        "format": "oldroyd-report-v1",
        "config": report.config,
        "reference_steps": report.reference_steps,
        "largest_stable_epsilon": report.largest_stable_epsilon,
        "monotone": {
            "u_error": report.monotone.u_error,
            "z_norm": report.monotone.z_norm,
            "tau_sup": report.monotone.tau_sup,
        },
        "slopes": {
            "u_error": rate_json(&report.slopes.u_error),
            "z_norm": rate_json(&report.slopes.z_norm),
            "tau_sup": rate_json(&report.slopes.tau_sup),
        },
        "rows": report.rows.iter().map(|r| json!({
            "epsilon": r.epsilon,
            "omega": r.omega,
            "u_error_sup": r.u_error_sup,
            "z_norm": r.z_norm,
            "tau_sup_scaled": r.tau_sup_scaled,
            "x_final": r.x_final,
            "damping_rate_eps": r.damping_rate_eps,
            "blowup": r.blowup,
            "steps": r.steps,
            "wall_seconds": r.wall_seconds,
        })).collect::<Vec<_>>(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn two_column(series: &NormSeries, comment: &str) -> String {
    let mut out = format!("# {comment}\n");
    for (&t, &v) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{} {}", sig17(t), sig17(v));
    }
    out
}

/// Write report.csv, report.json, and plotdata/*.dat under `dir`.
pub fn write_report(report: &ConvergenceReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let plot = dir.join("plotdata");
    std::fs::create_dir_all(&plot).map_err(|e| Error::io(&plot, e))?;

    write_file(&dir.join("report.csv"), &render_csv(report))?;
    let json = serde_json::to_string_pretty(&render_json(report))
        .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
    write_file(&dir.join("report.json"), &(json + "\n"))?;

    // metric-vs-epsilon files
    let metric_files: [(&str, fn(&crate::harness::sweep::SweepRow) -> f64); 4] = [
        ("u_error.dat", |r| r.u_error_sup),
        ("z_norm.dat", |r| r.z_norm),
        ("tau_sup.dat", |r| r.tau_sup_scaled),
        ("x_final.dat", |r| r.x_final),
    ];
    for (name, getter) in metric_files {
        let mut s = NormSeries::new();
        for row in &report.rows {
            s.push(row.epsilon, getter(row));
        }
        write_file(&plot.join(name), &two_column(&s, "epsilon metric"))?;
    }

    // per-epsilon time series
    for (i, row) in report.rows.iter().enumerate() {
        write_file(
            &plot.join(format!("u_error_t_{i}.dat")),
            &two_column(&row.u_error_series, &format!("t u_error at epsilon = {}", row.epsilon)),
        )?;
        write_file(
            &plot.join(format!("z_l2_t_{i}.dat")),
            &two_column(&row.z_l2_series, &format!("t z_l2 at epsilon = {}", row.epsilon)),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentConfig, StressSpec};
    use crate::harness::sweep::sweep;

    fn tiny_report() -> ConvergenceReport {
        let text = r#"
            [grid]
            dims = 2
            m = 16

            [params]
            epsilons = [1e-1, 1e-2]

            [time]
            horizon = 0.1
            snapshot_stride = 0.05
        "#;
        let mut cfg: ExperimentConfig = toml::from_str(text).unwrap();
        cfg.initial.stress = StressSpec::IllPrepared { amplitude: 0.5, seed: 7 };
        sweep(&cfg, 1).unwrap()
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let report = tiny_report();
        let csv = render_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2 + report.rows.len());
        assert!(lines[0].starts_with("# oldroyd-report-v1"));
        assert!(lines[1].starts_with("epsilon,"));
        // 17 significant digits
        assert!(lines[2].contains("e-1") || lines[2].contains("e0"));
    }

    #[test]
    fn report_files_written_and_csv_deterministic() {
        let report = tiny_report();
        let dir = tempfile::tempdir().unwrap();
        write_report(&report, dir.path()).unwrap();
        for name in ["report.csv", "report.json"] {
            assert!(dir.path().join(name).is_file(), "{name} missing");
        }
        for name in ["u_error.dat", "z_norm.dat", "tau_sup.dat", "x_final.dat",
                     "u_error_t_0.dat", "z_l2_t_0.dat", "u_error_t_1.dat", "z_l2_t_1.dat"] {
            assert!(dir.path().join("plotdata").join(name).is_file(), "{name} missing");
        }
        let first = std::fs::read(dir.path().join("report.csv")).unwrap();
        // a separately computed sweep must render byte-identically
        let again = tiny_report();
        let dir2 = tempfile::tempdir().unwrap();
        write_report(&again, dir2.path()).unwrap();
        let second = std::fs::read(dir2.path().join("report.csv")).unwrap();
        assert_eq!(first, second, "CSV is not deterministic");
    }

    #[test]
    fn plotdata_time_series_length_matches_snapshots() {
        let report = tiny_report();
        let dir = tempfile::tempdir().unwrap();
        write_report(&report, dir.path()).unwrap();
        let text =
            std::fs::read_to_string(dir.path().join("plotdata").join("u_error_t_0.dat")).unwrap();
        let data_lines = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(data_lines, report.rows[0].u_error_series.len());
    }
}
