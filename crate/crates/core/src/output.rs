//! Result emission: trajectory and summary CSV files, optional SVG plots.
//!
//! All numeric values are written in scientific notation with 12 fractional
//! digits (13 significant digits), so files round-trip through `f64` parsing
//! and are byte-stable across repeated runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::scenarios::{SweepResult, TailSummary};

/// Column header of a trajectory CSV.
pub const TRAJECTORY_HEADER: &str = "t,E_B,W,E_cat,N_exc,trace_err,herm_err,min_eig";

/// Column header of a sweep summary CSV.
pub const SUMMARY_HEADER: &str =
    "sweep_param,sweep_value,tail_mean_W,tail_amplitude,catalyst_drift,min_eig_global";

/// Compact, lossless-enough token for a sweep value used in file names
/// (e.g. `0.8`, `2`, `1.05`).
pub fn sweep_value_token(value: f64) -> String {
    format!("{value}")
}

/// Write one trajectory as CSV: time, energies, work, diagnostics per row.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::with_capacity(traj.samples.len() * 160 + 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        writeln!(
            out,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            s.t,
            s.e_battery,
            s.ergotropy,
            s.e_catalyst,
            s.n_excitation,
            s.trace_err,
            s.herm_err,
            s.min_eigenvalue
        )
        .expect("string write cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write the per-sweep-point tail statistics as CSV.
pub fn write_summary_csv(path: &Path, param_name: &str, summaries: &[TailSummary]) -> Result<()> {
    let mut out = String::with_capacity(summaries.len() * 120 + 96);
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        // The sweep value is an input label, not a measurement: keep it in
        // the same compact form used in output file names.
        writeln!(
            out,
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
            param_name,
            sweep_value_token(s.sweep_value),
            s.tail_mean_w,
            s.tail_amplitude,
            s.catalyst_drift,
            s.min_eig_global
        )
        .expect("string write cannot fail");
    }
    fs::write(path, out)?;
    Ok(())
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Render the battery ergotropy of every sweep point as a self-contained SVG.
pub fn write_ergotropy_svg(path: &Path, result: &SweepResult) -> Result<()> {
    let width = 860.0;
    let height = 520.0;
    let (ml, mr, mt, mb) = (70.0, 170.0, 46.0, 54.0);
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let mut t_hi = 0.0f64;
    let mut w_lo = f64::INFINITY;
    let mut w_hi = f64::NEG_INFINITY;
    for traj in &result.trajectories {
        for s in &traj.samples {
            t_hi = t_hi.max(s.t);
            w_lo = w_lo.min(s.ergotropy);
            w_hi = w_hi.max(s.ergotropy);
        }
    }
    if !t_hi.is_finite() || t_hi <= 0.0 {
        t_hi = 1.0;
    }
    if !w_lo.is_finite() || !w_hi.is_finite() {
        w_lo = 0.0;
        w_hi = 1.0;
    }
    if w_hi - w_lo < 1e-12 {
        w_lo -= 0.5;
        w_hi += 0.5;
    }
    let pad = 0.05 * (w_hi - w_lo);
    let (ylo, yhi) = (w_lo - pad, w_hi + pad);

    let x_px = |t: f64| ml + t / t_hi * pw;
    let y_px = |w: f64| mt + ph - (w - ylo) / (yhi - ylo) * ph;

    let mut svg = String::with_capacity(64 * 1024);
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="26" font-family="sans-serif" font-size="17" text-anchor="middle">{}: battery ergotropy</text>"#,
        ml + pw / 2.0,
        result.scenario.name
    )
    .unwrap();

    // Grid, ticks, and labels.
    for i in 0..=5 {
        let t = t_hi * i as f64 / 5.0;
        let x = x_px(t);
        writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            mt,
            mt + ph
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{t:.2}</text>"#,
            mt + ph + 18.0
        )
        .unwrap();
        let w = ylo + (yhi - ylo) * i as f64 / 5.0;
        let y = y_px(w);
        writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            ml,
            ml + pw
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" text-anchor="end" dominant-baseline="middle">{w:.3}</text>"#,
            ml - 8.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle">t</text>"#,
        ml + pw / 2.0,
        height - 12.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.1})">W(t)</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    )
    .unwrap();

    // One polyline per sweep value, plus a legend entry.
    let param = result.scenario.sweep.name();
    for (i, (traj, summary)) in result
        .trajectories
        .iter()
        .zip(&result.summaries)
        .enumerate()
    {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::with_capacity(traj.samples.len() * 14);
        for s in &traj.samples {
            write!(points, "{:.2},{:.2} ", x_px(s.t), y_px(s.ergotropy)).unwrap();
        }
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
            points.trim_end()
        )
        .unwrap();
        let ly = mt + 14.0 + 22.0 * i as f64;
        let lx = ml + pw + 16.0;
        writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2.5"/>"#,
            lx + 26.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" dominant-baseline="middle">{param} = {}</text>"#,
            lx + 34.0,
            ly,
            sweep_value_token(summary.sweep_value)
        )
        .unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{IntegratorConfig, Sample, Trajectory};
    use crate::operators::{HilbertLayout, Operator, PhysicalParams};
    use crate::scenarios::{InitialState, Scenario, SweepParam};
    use crate::dynamics::KernelSpec;

    fn synthetic_trajectory(n: usize) -> Trajectory {
        let samples = (0..=n)
            .map(|k| {
                let t = k as f64 * 0.1;
                Sample {
                    t,
                    e_battery: 1.0 / 3.0,
                    ergotropy: (t * 0.7).sin().abs() * 0.2,
                    e_catalyst: -0.125,
                    n_excitation: 3.0,
                    trace_err: 1e-15,
                    herm_err: 2e-16,
                    min_eigenvalue: -1e-9,
                }
            })
            .collect();
        Trajectory {
            samples,
            states: Vec::new(),
            final_state: Operator::zeros((1, 1)),
        }
    }

    fn synthetic_result() -> SweepResult {
        let scenario = Scenario {
            name: "demo".into(),
            layout: HilbertLayout::new(2, 1, 2).unwrap(),
            params: PhysicalParams::default(),
            kernel: KernelSpec::Gaussian {
                kappa1: 1.8,
                kappa2: 1.8,
            },
            grid: IntegratorConfig {
                step: 0.1,
                t_max: 2.0,
                ..Default::default()
            },
            sweep: SweepParam::Lambda,
            sweep_values: vec![0.8, 1.8],
            initial: InitialState::CavityFock(1),
        };
        let summaries = vec![
            TailSummary {
                sweep_value: 0.8,
                tail_mean_w: 0.1,
                tail_amplitude: 0.05,
                catalyst_drift: 0.01,
                min_eig_global: -1e-9,
            },
            TailSummary {
                sweep_value: 1.8,
                tail_mean_w: 0.08,
                tail_amplitude: 0.04,
                catalyst_drift: 0.02,
                min_eig_global: -2e-9,
            },
        ];
        SweepResult {
            scenario,
            trajectories: vec![synthetic_trajectory(20), synthetic_trajectory(20)],
            summaries,
        }
    }

    #[test]
    fn trajectory_csv_has_header_rows_and_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let traj = synthetic_trajectory(20);
        write_trajectory_csv(&path, &traj).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TRAJECTORY_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 21);
        let fields: Vec<f64> = rows[3]
            .split(',')
            .map(|f| f.parse::<f64>().unwrap())
            .collect();
        assert_eq!(fields.len(), 8);
        // E_B = 1/3 must survive with at least 12 significant digits.
        assert!((fields[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn summary_csv_carries_the_sweep_parameter_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        let result = synthetic_result();
        write_summary_csv(&path, "lambda", &result.summaries).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SUMMARY_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("lambda,"));
        let value: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - 0.8).abs() < 1e-12);
    }

    #[test]
    fn svg_plot_draws_one_series_per_sweep_value() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let result = synthetic_result();
        write_ergotropy_svg(&path, &result).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.ends_with("</svg>\n"));
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.contains("lambda = 0.8"));
        assert!(text.contains("lambda = 1.8"));
    }

    #[test]
    fn sweep_value_tokens_are_compact() {
        assert_eq!(sweep_value_token(0.8), "0.8");
        assert_eq!(sweep_value_token(2.0), "2");
        assert_eq!(sweep_value_token(1.05), "1.05");
    }
}
