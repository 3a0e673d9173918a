//! Configuration resolution and the `run` / `validate` commands.
//!
//! A run is specified either by a bundled preset name or by an inline
//! `[scenario]` table in a TOML config file (never both). Flag-level
//! overrides (step size, end time, initial state, output directory, plots)
//! apply on top, with command-line flags taking precedence over file keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{IntegratorConfig, KernelSpec};
use crate::error::{Error, Result};
use crate::operators::{HilbertLayout, PhysicalParams};
use crate::output::{
    sweep_value_token, write_ergotropy_svg, write_summary_csv, write_trajectory_csv,
};
use crate::scenarios::{preset, run_scenario, InitialState, Scenario, SweepParam, TailSummary};

/// Top-level TOML config schema.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Bundled preset name (mutually exclusive with `[scenario]`).
    pub preset: Option<String>,
    /// Output directory.
    pub out: Option<PathBuf>,
    /// Emit SVG plots.
    pub plots: Option<bool>,
    /// Integration step override.
    pub h: Option<f64>,
    /// End-time override.
    pub t_max: Option<f64>,
    /// Initial state override (`paper-vacuum`, `fock:<n>`, `product:<levels>`).
    pub initial: Option<String>,
    /// Inline scenario definition.
    pub scenario: Option<ScenarioTable>,
}

/// Inline `[scenario]` table: every key optional, defaults from the reference
/// operating point.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTable {
    pub name: Option<String>,
    pub d_photon: Option<usize>,
    pub n_spins: Option<usize>,
    pub d_cat: Option<usize>,
    pub omega_c: Option<f64>,
    pub omega_a: Option<f64>,
    pub j_exchange: Option<f64>,
    pub g: Option<f64>,
    pub omega_cat: Option<f64>,
    pub lambda: Option<f64>,
    /// Gaussian kernel strength κ₁ (conflicts with `gamma`).
    pub kappa1: Option<f64>,
    /// Gaussian kernel falloff κ₂ (conflicts with `gamma`).
    pub kappa2: Option<f64>,
    /// Constant loss rate; selects the memoryless (delta-kernel) channel.
    pub gamma: Option<f64>,
    /// Override for the kernel memory cutoff.
    pub memory_cutoff: Option<f64>,
    /// One of `lambda`, `omega_c`, `omega_a`, `omega_cat`, `g`.
    pub sweep_param: Option<String>,
    pub sweep_values: Option<Vec<f64>>,
}

fn parse_sweep_param(s: &str) -> Result<SweepParam> {
    match s {
        "lambda" => Ok(SweepParam::Lambda),
        "omega_c" => Ok(SweepParam::OmegaC),
        "omega_a" => Ok(SweepParam::OmegaA),
        "omega_cat" => Ok(SweepParam::OmegaCat),
        "g" => Ok(SweepParam::G),
        _ => Err(Error::Config(format!(
            "unknown sweep_param '{s}'; expected lambda, omega_c, omega_a, omega_cat, or g"
        ))),
    }
}

fn scenario_from_table(table: &ScenarioTable) -> Result<Scenario> {
    let layout = HilbertLayout::new(
        table.d_photon.unwrap_or(6),
        table.n_spins.unwrap_or(3),
        table.d_cat.unwrap_or(2),
    )?;
    let defaults = PhysicalParams::default();
    let params = PhysicalParams {
        omega_c: table.omega_c.unwrap_or(defaults.omega_c),
        omega_a: table.omega_a.unwrap_or(defaults.omega_a),
        j_exchange: table.j_exchange.unwrap_or(defaults.j_exchange),
        g: table.g.unwrap_or(defaults.g),
        omega_cat: table.omega_cat.unwrap_or(defaults.omega_cat),
        lambda: table.lambda.unwrap_or(defaults.lambda),
    };
    let kernel = match table.gamma {
        Some(gamma) => {
            if table.kappa1.is_some() || table.kappa2.is_some() {
                return Err(Error::Config(
                    "gamma (memoryless channel) conflicts with kappa1/kappa2".into(),
                ));
            }
            KernelSpec::Delta { gamma }
        }
        None => KernelSpec::Gaussian {
            kappa1: table.kappa1.unwrap_or(1.8),
            kappa2: table.kappa2.unwrap_or(1.8),
        },
    };
    let sweep = match &table.sweep_param {
        Some(s) => parse_sweep_param(s)?,
        None => SweepParam::Lambda,
    };
    let sweep_values = match &table.sweep_values {
        Some(v) => v.clone(),
        None => {
            // Single-point sweep at the base value of the swept parameter.
            let base = match sweep {
                SweepParam::Lambda => params.lambda,
                SweepParam::OmegaC => params.omega_c,
                SweepParam::OmegaA => params.omega_a,
                SweepParam::OmegaCat => params.omega_cat,
                SweepParam::G => params.g,
            };
            vec![base]
        }
    };
    Ok(Scenario {
        name: table.name.clone().unwrap_or_else(|| "custom".into()),
        layout,
        params,
        kernel,
        grid: IntegratorConfig {
            memory_cutoff: table.memory_cutoff,
            ..Default::default()
        },
        sweep,
        sweep_values,
        initial: InitialState::CavityFock(3),
    })
}

/// Flag-level inputs collected by the binary.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub h: Option<f64>,
    pub t_max: Option<f64>,
    pub initial: Option<String>,
    pub plots: bool,
}

/// A fully resolved, validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
}

/// Merge preset/config/flags into a validated [`RunConfig`].
///
/// Precedence, lowest to highest: preset or `[scenario]` table, config-file
/// keys, command-line flags.
pub fn resolve_config(cli: &CliOverrides) -> Result<RunConfig> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config '{}': {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("invalid config '{}': {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let preset_name = cli.preset.clone().or_else(|| file.preset.clone());
    let mut scenario = match (&preset_name, &file.scenario) {
        (Some(name), None) => preset(name)?,
        (None, Some(table)) => scenario_from_table(table)?,
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "choose either a preset or an inline [scenario] block, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Config(
                "nothing to run: pass --preset <name> or a config with a [scenario] block".into(),
            ))
        }
    };

    if let Some(h) = file.h {
        scenario.grid.step = h;
    }
    if let Some(t) = file.t_max {
        scenario.grid.t_max = t;
    }
    if let Some(initial) = &file.initial {
        scenario.initial = InitialState::parse(initial)?;
    }
    if let Some(h) = cli.h {
        scenario.grid.step = h;
    }
    if let Some(t) = cli.t_max {
        scenario.grid.t_max = t;
    }
    if let Some(initial) = &cli.initial {
        scenario.initial = InitialState::parse(initial)?;
    }

    scenario.validate()?;
    Ok(RunConfig {
        scenario,
        out_dir: cli
            .out
            .clone()
            .or_else(|| file.out.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        emit_plots: cli.plots || file.plots.unwrap_or(false),
    })
}

/// Files written by [`cmd_run`] plus the sweep summaries for inspection.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub files: Vec<PathBuf>,
    pub summaries: Vec<TailSummary>,
}

fn trajectory_file_name(scenario: &Scenario, value: f64) -> String {
    format!(
        "{}_{}{}.csv",
        scenario.name,
        scenario.sweep.name(),
        sweep_value_token(value)
    )
}

/// Integrate the scenario and write one trajectory CSV per sweep value, a
/// summary CSV, and (optionally) an SVG plot into the output directory.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutputs> {
    fs::create_dir_all(&cfg.out_dir)?;
    let result = run_scenario(&cfg.scenario)?;
    let mut files = Vec::new();
    for (traj, summary) in result.trajectories.iter().zip(&result.summaries) {
        let path = cfg
            .out_dir
            .join(trajectory_file_name(&cfg.scenario, summary.sweep_value));
        write_trajectory_csv(&path, traj)?;
        files.push(path);
    }
    let summary_path = cfg.out_dir.join(format!("{}_summary.csv", cfg.scenario.name));
    write_summary_csv(&summary_path, cfg.scenario.sweep.name(), &result.summaries)?;
    files.push(summary_path);
    if cfg.emit_plots {
        let svg_path = cfg.out_dir.join(format!("{}_W.svg", cfg.scenario.name));
        write_ergotropy_svg(&svg_path, &result)?;
        files.push(svg_path);
    }
    Ok(RunOutputs {
        files,
        summaries: result.summaries,
    })
}

/// Human-readable echo of a resolved configuration (the `validate` command).
pub fn describe_config(cfg: &RunConfig) -> String {
    let sc = &cfg.scenario;
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", sc.name));
    out.push_str(&format!(
        "register: photon levels = {}, spins = {}, catalyst dim = {} (total dim {})\n",
        sc.layout.d_photon,
        sc.layout.n_spins,
        sc.layout.d_cat,
        sc.layout.dim()
    ));
    out.push_str(&format!(
        "params: omega_c = {}, omega_a = {}, j_exchange = {}, g = {}, omega_cat = {}, lambda = {}\n",
        sc.params.omega_c,
        sc.params.omega_a,
        sc.params.j_exchange,
        sc.params.g,
        sc.params.omega_cat,
        sc.params.lambda
    ));
    match sc.kernel {
        KernelSpec::Gaussian { kappa1, kappa2 } => {
            out.push_str(&format!(
                "kernel: gaussian, kappa1 = {kappa1}, kappa2 = {kappa2} (memoryless rate {:.6})\n",
                sc.kernel.markovian_rate()
            ));
        }
        KernelSpec::Delta { gamma } => {
            out.push_str(&format!("kernel: delta, gamma = {gamma}\n"));
        }
    }
    let steps = sc
        .grid
        .n_steps()
        .expect("validated grid always yields a step count");
    out.push_str(&format!(
        "grid: h = {}, t_max = {} ({} steps)\n",
        sc.grid.step, sc.grid.t_max, steps
    ));
    let values: Vec<String> = sc.sweep_values.iter().map(|v| sweep_value_token(*v)).collect();
    out.push_str(&format!(
        "sweep: {} over [{}]\n",
        sc.sweep.name(),
        values.join(", ")
    ));
    out.push_str(&format!("initial state: {}\n", sc.initial));
    out.push_str(&format!(
        "output: {} (plots: {})\n",
        cfg.out_dir.display(),
        cfg.emit_plots
    ));
    out
}

/// Read and resolve a config file directly (convenience for tests).
pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config '{}': {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config '{}': {e}", path.display())))
}
