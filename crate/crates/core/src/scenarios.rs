//! Named simulation scenarios: parameter points, sweeps, and tail statistics.
//!
//! A [`Scenario`] bundles everything one run needs — register shape, model
//! parameters, memory kernel, integration grid, the parameter being swept,
//! and the initial state. The bundled presets (`fig2a` … `fig5c`) cover the
//! standard operating points of the study: catalyst on/off comparisons,
//! cavity- and spin-frequency scans, catalyst-splitting scans, and
//! cavity-coupling scans.
//!
//! For each sweep value the driver integrates the finite-memory loss equation
//! and condenses the trajectory into a [`TailSummary`]: the late-time mean and
//! peak-to-peak amplitude of the battery ergotropy over the final quarter of
//! the run, the catalyst energy drift, and the most negative state eigenvalue
//! seen anywhere in the run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate_nz, IntegratorConfig, KernelSpec, Trajectory};
use crate::error::{Error, Result};
use crate::operators::{build_system, creal, HilbertLayout, Operator, PhysicalParams};

/// Which model parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Catalyst–spin coupling λ.
    Lambda,
    /// Cavity frequency ω_c.
    OmegaC,
    /// Spin splitting ω_a.
    OmegaA,
    /// Catalyst splitting ω_cat.
    OmegaCat,
    /// Cavity–spin coupling g.
    G,
}

impl SweepParam {
    /// Column/flag name of the swept parameter.
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::OmegaC => "omega_c",
            SweepParam::OmegaA => "omega_a",
            SweepParam::OmegaCat => "omega_cat",
            SweepParam::G => "g",
        }
    }

    /// Write the sweep value into a parameter set.
    pub fn apply(&self, params: &mut PhysicalParams, value: f64) {
        match self {
            SweepParam::Lambda => params.lambda = value,
            SweepParam::OmegaC => params.omega_c = value,
            SweepParam::OmegaA => params.omega_a = value,
            SweepParam::OmegaCat => params.omega_cat = value,
            SweepParam::G => params.g = value,
        }
    }
}

/// Initial state of a run.
///
/// The text forms accepted by configs and the CLI are `paper-vacuum`
/// (every subsystem in its ground state), `fock:<n>` (n photons, spins and
/// catalyst in their ground states), and `product:<l0,l1,…>` (one level per
/// slot, photon first, catalyst last).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialState {
    /// Every subsystem in its ground state.
    Vacuum,
    /// The cavity prepared with `n` photons, everything else in the ground state.
    CavityFock(usize),
    /// Arbitrary product of basis levels, one per slot.
    Product(Vec<usize>),
}

impl InitialState {
    /// Parse the textual form used by configs and the CLI.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "paper-vacuum" {
            return Ok(InitialState::Vacuum);
        }
        if let Some(n) = s.strip_prefix("fock:") {
            let n: usize = n.trim().parse().map_err(|_| {
                Error::Config(format!("invalid photon number in initial state '{s}'"))
            })?;
            return Ok(InitialState::CavityFock(n));
        }
        if let Some(levels) = s.strip_prefix("product:") {
            let levels: std::result::Result<Vec<usize>, _> =
                levels.split(',').map(|p| p.trim().parse()).collect();
            return levels
                .map(InitialState::Product)
                .map_err(|_| Error::Config(format!("invalid level list in initial state '{s}'")));
        }
        Err(Error::Config(format!(
            "unknown initial state '{s}'; expected paper-vacuum, fock:<n>, or product:<levels>"
        )))
    }

    /// Density matrix of this state on the given register.
    pub fn density_matrix(&self, layout: &HilbertLayout) -> Result<Operator> {
        let index = match self {
            InitialState::Vacuum => 0,
            InitialState::CavityFock(n) => {
                if *n >= layout.d_photon {
                    return Err(Error::InvalidParameter(format!(
                        "fock:{n} exceeds the photon cutoff {} (levels 0..{})",
                        layout.d_photon,
                        layout.d_photon - 1
                    )));
                }
                let mut levels = vec![0usize; layout.n_slots()];
                levels[layout.photon_slot()] = *n;
                layout.basis_index(&levels)?
            }
            InitialState::Product(levels) => layout.basis_index(levels)?,
        };
        let dim = layout.dim();
        let mut rho = Operator::zeros((dim, dim));
        rho[(index, index)] = creal(1.0);
        Ok(rho)
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Vacuum => write!(f, "paper-vacuum"),
            InitialState::CavityFock(n) => write!(f, "fock:{n}"),
            InitialState::Product(levels) => {
                let parts: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
                write!(f, "product:{}", parts.join(","))
            }
        }
    }
}

impl TryFrom<String> for InitialState {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        InitialState::parse(&s)
    }
}

impl From<InitialState> for String {
    fn from(s: InitialState) -> String {
        s.to_string()
    }
}

/// A fully specified simulation: one sweep of one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Name used for output files; alphanumeric plus `-` and `_`.
    pub name: String,
    pub layout: HilbertLayout,
    /// Parameters at the base point; the swept field is overwritten per value.
    pub params: PhysicalParams,
    pub kernel: KernelSpec,
    pub grid: IntegratorConfig,
    pub sweep: SweepParam,
    /// Strictly increasing list of values for the swept parameter.
    pub sweep_values: Vec<f64>,
    pub initial: InitialState,
}

impl Scenario {
    /// Validate every component and each sweep point.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::Config(format!(
                "scenario name '{}' must be non-empty and contain only letters, digits, '-', '_'",
                self.name
            )));
        }
        HilbertLayout::new(self.layout.d_photon, self.layout.n_spins, self.layout.d_cat)?;
        self.params.validate()?;
        self.kernel.validate()?;
        self.grid.validate()?;
        self.grid.n_steps()?;
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidParameter("sweep_values must not be empty".into()));
        }
        if self.sweep_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("sweep values must be finite".into()));
        }
        if self.sweep_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "sweep values must be strictly increasing".into(),
            ));
        }
        for &v in &self.sweep_values {
            let mut p = self.params;
            self.sweep.apply(&mut p, v);
            p.validate().map_err(|e| Error::SweepPoint {
                param: self.sweep.name().into(),
                value: v,
                source: Box::new(e),
            })?;
        }
        self.initial.density_matrix(&self.layout)?;
        Ok(())
    }
}

/// Names of the bundled presets.
pub fn preset_names() -> &'static [&'static str] {
    &[
        "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c",
    ]
}

fn base_scenario(name: &str) -> Scenario {
    Scenario {
        name: name.to_string(),
        layout: HilbertLayout::default(),
        params: PhysicalParams::default(),
        kernel: KernelSpec::Gaussian {
            kappa1: 1.8,
            kappa2: 1.8,
        },
        grid: IntegratorConfig::default(),
        sweep: SweepParam::Lambda,
        sweep_values: vec![0.0],
        initial: InitialState::CavityFock(3),
    }
}

/// Look up a bundled preset by name.
pub fn preset(name: &str) -> Result<Scenario> {
    let mut sc = base_scenario(name);
    match name {
        // Reference point without the catalyst coupling.
        "fig2a" => {}
        // Catalyst coupling scan at the reference frequencies.
        "fig2b" => {
            sc.sweep_values = vec![0.8, 1.8, 2.8];
        }
        // Cavity-frequency scan, catalyst decoupled / strongly coupled.
        "fig3a" | "fig3b" => {
            sc.sweep = SweepParam::OmegaC;
            sc.sweep_values = vec![2.0, 2.5, 3.0];
            sc.params.lambda = if name == "fig3a" { 0.0 } else { 1.8 };
        }
        // Spin-splitting scan against a far-detuned cavity.
        "fig4a" | "fig4b" => {
            sc.sweep = SweepParam::OmegaA;
            sc.sweep_values = vec![2.0, 2.5, 3.0];
            sc.params.omega_c = 0.85;
            sc.params.lambda = if name == "fig4a" { 0.0 } else { 0.8 };
        }
        // Catalyst-splitting scan at strong catalyst coupling.
        "fig5a" => {
            sc.sweep = SweepParam::OmegaCat;
            sc.sweep_values = vec![1.05, 1.15, 1.35];
            sc.params.lambda = 1.5;
            sc.params.omega_c = 0.75;
        }
        // Cavity-coupling scan with / without the catalyst.
        "fig5b" | "fig5c" => {
            sc.sweep = SweepParam::G;
            sc.sweep_values = vec![0.2, 0.4, 0.6];
            sc.params.lambda = if name == "fig5b" { 0.85 } else { 0.0 };
            sc.params.omega_cat = 1.35;
            sc.params.omega_a = 2.45;
            sc.params.omega_c = 2.25;
            sc.params.j_exchange = 2.5;
        }
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: preset_names().join(", "),
            })
        }
    }
    Ok(sc)
}

/// Late-time statistics of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailSummary {
    /// Value of the swept parameter.
    pub sweep_value: f64,
    /// Mean battery ergotropy over the tail window.
    pub tail_mean_w: f64,
    /// Peak-to-peak battery ergotropy over the tail window.
    pub tail_amplitude: f64,
    /// Largest deviation of the catalyst energy from its initial value.
    pub catalyst_drift: f64,
    /// Most negative state eigenvalue seen during the run.
    pub min_eig_global: f64,
}

/// All trajectories and summaries of one scenario, ordered by sweep value.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub trajectories: Vec<Trajectory>,
    pub summaries: Vec<TailSummary>,
}

/// The tail window `[0.75·t_end, t_end]` of a grid.
pub fn tail_window(grid: &IntegratorConfig) -> Result<(f64, f64)> {
    let n = grid.n_steps()?;
    let end = n as f64 * grid.step;
    Ok((0.75 * end, end))
}

fn tail_samples<'t>(
    traj: &'t Trajectory,
    window: (f64, f64),
) -> Result<impl Iterator<Item = &'t crate::dynamics::Sample>> {
    let (lo, hi) = window;
    let eps = 1e-12;
    let mut iter = traj
        .samples
        .iter()
        .filter(move |s| s.t >= lo - eps && s.t <= hi + eps)
        .peekable();
    if iter.peek().is_none() {
        return Err(Error::EmptyWindow { lo, hi });
    }
    Ok(iter)
}

/// Mean battery ergotropy over a time window.
pub fn tail_mean(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in tail_samples(traj, window)? {
        sum += s.ergotropy;
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Peak-to-peak battery ergotropy over a time window.
pub fn tail_amplitude(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in tail_samples(traj, window)? {
        lo = lo.min(s.ergotropy);
        hi = hi.max(s.ergotropy);
    }
    Ok(hi - lo)
}

/// Largest deviation of the catalyst energy from its initial value.
pub fn catalyst_drift(traj: &Trajectory) -> f64 {
    let e0 = traj.samples.first().map(|s| s.e_catalyst).unwrap_or(0.0);
    traj.samples
        .iter()
        .map(|s| (s.e_catalyst - e0).abs())
        .fold(0.0, f64::max)
}

fn run_sweep_point(sc: &Scenario, value: f64, window: (f64, f64)) -> Result<(Trajectory, TailSummary)> {
    let mut params = sc.params;
    sc.sweep.apply(&mut params, value);
    let ops = build_system(sc.layout, params)?;
    let rho0 = sc.initial.density_matrix(&sc.layout)?;
    let traj = integrate_nz(&ops, &sc.kernel, &rho0, &sc.grid)?;
    let summary = TailSummary {
        sweep_value: value,
        tail_mean_w: tail_mean(&traj, window)?,
        tail_amplitude: tail_amplitude(&traj, window)?,
        catalyst_drift: catalyst_drift(&traj),
        min_eig_global: traj.min_eigenvalue(),
    };
    Ok((traj, summary))
}

/// Integrate every sweep point (in parallel) and collect summaries in sweep
/// order. The pipeline is deterministic: no randomness enters anywhere, so
/// repeated runs produce bit-identical results.
pub fn run_scenario(sc: &Scenario) -> Result<SweepResult> {
    sc.validate()?;
    let window = tail_window(&sc.grid)?;
    let outcomes: Vec<Result<(Trajectory, TailSummary)>> = sc
        .sweep_values
        .par_iter()
        .map(|&v| {
            run_sweep_point(sc, v, window).map_err(|e| Error::SweepPoint {
                param: sc.sweep.name().into(),
                value: v,
                source: Box::new(e),
            })
        })
        .collect();
    let mut trajectories = Vec::with_capacity(outcomes.len());
    let mut summaries = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let (traj, summary) = outcome?;
        trajectories.push(traj);
        summaries.push(summary);
    }
    Ok(SweepResult {
        scenario: sc.clone(),
        trajectories,
        summaries,
    })
}
