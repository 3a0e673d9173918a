//! Simulator for a cavity-driven spin-chain quantum battery with a two-level
//! catalyst and finite-memory photon loss.
//!
//! The model is a truncated bosonic mode coupled to an open XX chain of
//! qubits (the battery) and, optionally, to an auxiliary two-level catalyst.
//! The cavity leaks photons into an environment whose memory is a Gaussian
//! kernel; the resulting evolution interpolates between fully coherent
//! exchange and constant-rate loss. The headline diagnostic is the battery's
//! ergotropy — the work a cyclic unitary process can still extract from the
//! reduced spin state.
//!
//! Modules, bottom-up:
//!
//! * [`operators`] — register layout, embeddings, Hamiltonian assembly;
//! * [`dynamics`] — memory-kernel, constant-rate, and closed-system
//!   integrators with per-step conservation diagnostics;
//! * [`observables`] — partial trace, passive states, ergotropy;
//! * [`scenarios`] — named presets, parameter sweeps, tail statistics;
//! * [`output`] — CSV and SVG emission;
//! * [`cli`] — config resolution behind the `qbattery` binary.
//!
//! # Example
//!
//! ```
//! use qbattery::dynamics::{integrate_nz, IntegratorConfig, KernelSpec};
//! use qbattery::operators::{build_system, HilbertLayout, PhysicalParams};
//! use qbattery::scenarios::InitialState;
//!
//! let layout = HilbertLayout::new(2, 1, 2)?;
//! let ops = build_system(layout, PhysicalParams::default())?;
//! let rho0 = InitialState::CavityFock(1).density_matrix(&layout)?;
//! let cfg = IntegratorConfig { step: 0.05, t_max: 1.0, ..Default::default() };
//! let kernel = KernelSpec::Gaussian { kappa1: 1.8, kappa2: 1.8 };
//! let trajectory = integrate_nz(&ops, &kernel, &rho0, &cfg)?;
//! assert_eq!(trajectory.samples.len(), 21);
//! # Ok::<(), qbattery::Error>(())
//! ```

// Link the OpenBLAS-backed BLAS/LAPACK implementation.
use blas_src as _;

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod observables;
pub mod operators;
pub mod output;
pub mod scenarios;

pub use error::{Error, Result};
