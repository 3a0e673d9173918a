//! Hilbert-space layout and operator construction for the cavity / spin-chain /
//! catalyst model.
//!
//! The composite register is ordered as
//!
//! ```text
//!   photon (truncated Fock space)  ⊗  N spins (qubits)  ⊗  catalyst
//! ```
//!
//! with row-major (big-endian) index packing: the photon level is the most
//! significant digit, the catalyst the least significant. Conventions:
//!
//! * `|0⟩` is the ground state of every two-level factor,
//! * the spin lowering operator is `σ⁻ = |0⟩⟨1|`,
//! * `σ_z = diag(-1, +1)`, so the ground state carries eigenvalue −1 and the
//!   bare catalyst term `(ω_cat/2) σ_z` gives the global vacuum energy
//!   `−ω_cat/2`,
//! * the truncated bosonic ladder satisfies `a[n-1, n] = √n`.
//!
//! The full Hamiltonian is
//!
//! ```text
//!   H = ω_c a†a + ω_a Σᵢ σᵢ⁺σᵢ⁻ + J Σᵢ (σᵢ⁺σᵢ₊₁⁻ + h.c.)   (open chain)
//!     + (ω_cat/2) σ_z + g Σᵢ (a† σᵢ⁻ + h.c.) + λ Σᵢ (c† σᵢ⁻ + h.c.)
//! ```
//!
//! All couplings are excitation-conserving, so `[H, N_exc] = 0` holds exactly
//! even at finite Fock cutoff.

use ndarray::linalg::kron;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix used for all operators and states.
pub type Operator = Array2<Complex64>;

/// Lift a real scalar into the complex field.
pub(crate) fn creal(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Conjugate transpose.
pub fn adjoint(m: &Operator) -> Operator {
    m.t().mapv(|z| z.conj())
}

/// Frobenius norm `‖M‖_F = sqrt(Σ |m_ij|²)`.
pub fn frobenius_norm(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and a
/// matrix whose columns `v_k` satisfy `M v_k = λ_k v_k`.
///
/// On row-major storage the backing LAPACK routine effectively diagonalizes
/// the transposed (= conjugated) matrix, so its eigenvector columns come back
/// conjugated; the `conj()` below restores the standard `M = V Λ V†`
/// convention. A real symmetric input is unaffected, which is why only
/// genuinely complex matrices expose the difference.
pub(crate) fn eig_hermitian(m: &Operator) -> Result<(Vec<f64>, Operator)> {
    use ndarray_linalg::{Eigh, UPLO};
    let (vals, vecs) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("hermitian eigendecomposition failed: {e}")))?;
    Ok((vals.to_vec(), vecs.mapv(|z| z.conj())))
}

/// Shape of the composite Hilbert space.
///
/// `d_cat` may be 2 (two-level catalyst present) or 1 (catalyst factor
/// reduced to a trivial one-dimensional slot, i.e. the catalyst-free model).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLayout {
    /// Fock-space truncation of the cavity mode (levels `0..d_photon`).
    pub d_photon: usize,
    /// Number of spins in the battery chain.
    pub n_spins: usize,
    /// Catalyst dimension: 2 for a qubit catalyst, 1 for no catalyst.
    pub d_cat: usize,
}

impl HilbertLayout {
    /// Validated constructor.
    pub fn new(d_photon: usize, n_spins: usize, d_cat: usize) -> Result<Self> {
        if d_photon < 2 {
            return Err(Error::InvalidParameter(format!(
                "photon cutoff must be at least 2, got {d_photon}"
            )));
        }
        if n_spins == 0 {
            return Err(Error::InvalidParameter(
                "the battery chain needs at least one spin".into(),
            ));
        }
        if d_cat != 1 && d_cat != 2 {
            return Err(Error::InvalidParameter(format!(
                "catalyst dimension must be 1 (absent) or 2 (qubit), got {d_cat}"
            )));
        }
        Ok(Self {
            d_photon,
            n_spins,
            d_cat,
        })
    }

    /// Number of tensor slots: photon, each spin, catalyst.
    pub fn n_slots(&self) -> usize {
        self.n_spins + 2
    }

    /// Dimension of one tensor slot.
    pub fn slot_dim(&self, slot: usize) -> usize {
        if slot == 0 {
            self.d_photon
        } else if slot <= self.n_spins {
            2
        } else {
            self.d_cat
        }
    }

    /// Slot index of the cavity mode.
    pub fn photon_slot(&self) -> usize {
        0
    }

    /// Slot index of spin `i` (0-based along the chain).
    pub fn spin_slot(&self, i: usize) -> usize {
        1 + i
    }

    /// Slot index of the catalyst.
    pub fn catalyst_slot(&self) -> usize {
        1 + self.n_spins
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        (0..self.n_slots()).map(|s| self.slot_dim(s)).product()
    }

    /// Dimension of the spin factor alone.
    pub fn spin_dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Row-major basis index of a product state given one level per slot.
    pub fn basis_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.n_slots() {
            return Err(Error::DimensionMismatch {
                context: "basis_index levels",
                expected: self.n_slots(),
                actual: levels.len(),
            });
        }
        let mut idx = 0;
        for (slot, &level) in levels.iter().enumerate() {
            let d = self.slot_dim(slot);
            if level >= d {
                return Err(Error::InvalidParameter(format!(
                    "level {level} out of range for slot {slot} (dimension {d})"
                )));
            }
            idx = idx * d + level;
        }
        Ok(idx)
    }
}

impl Default for HilbertLayout {
    /// The register used throughout this study: 6 Fock levels, 3 spins, qubit catalyst.
    fn default() -> Self {
        Self {
            d_photon: 6,
            n_spins: 3,
            d_cat: 2,
        }
    }
}

/// Truncated bosonic annihilation operator, `a[n-1, n] = √n`.
pub fn annihilation_op(dim: usize) -> Operator {
    let mut a = Operator::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = creal((n as f64).sqrt());
    }
    a
}

/// Two-level lowering operator `σ⁻ = |0⟩⟨1|`.
pub fn lowering_op() -> Operator {
    let mut s = Operator::zeros((2, 2));
    s[(0, 1)] = creal(1.0);
    s
}

/// Pauli-z with the ground state at eigenvalue −1: `σ_z = diag(-1, +1)`.
pub fn pauli_z() -> Operator {
    let mut s = Operator::zeros((2, 2));
    s[(0, 0)] = creal(-1.0);
    s[(1, 1)] = creal(1.0);
    s
}

/// Embed a single-slot operator into the full composite space:
/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `slot`.
pub fn embed_local(layout: &HilbertLayout, slot: usize, op: &Operator) -> Result<Operator> {
    if slot >= layout.n_slots() {
        return Err(Error::InvalidParameter(format!(
            "slot {slot} out of range for a {}-slot register",
            layout.n_slots()
        )));
    }
    let d = layout.slot_dim(slot);
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "embed_local operator",
            expected: d,
            actual: op.nrows(),
        });
    }
    let mut out = Operator::eye(1);
    for s in 0..layout.n_slots() {
        if s == slot {
            out = kron(&out, op);
        } else {
            out = kron(&out, &Operator::eye(layout.slot_dim(s)));
        }
    }
    Ok(out)
}

/// Embed a single-site operator into a bare chain of `n_spins` qubits
/// (no photon or catalyst factor). Used for the battery-local Hamiltonian.
fn embed_in_chain(n_spins: usize, site: usize, op: &Operator) -> Operator {
    let mut out = Operator::eye(1 << site);
    out = kron(&out, op);
    kron(&out, &Operator::eye(1 << (n_spins - 1 - site)))
}

/// Model parameters (all frequencies and couplings in the same energy unit;
/// ħ = 1 throughout).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Cavity mode frequency ω_c.
    pub omega_c: f64,
    /// Spin level splitting ω_a.
    pub omega_a: f64,
    /// Nearest-neighbour exchange J along the open chain.
    pub j_exchange: f64,
    /// Cavity–spin coupling g.
    pub g: f64,
    /// Catalyst level splitting ω_cat.
    pub omega_cat: f64,
    /// Catalyst–spin coupling λ.
    pub lambda: f64,
}

impl Default for PhysicalParams {
    /// Baseline operating point used by the bundled scenarios.
    fn default() -> Self {
        Self {
            omega_c: 2.5,
            omega_a: 2.5,
            j_exchange: 1.5,
            g: 0.2,
            omega_cat: 0.25,
            lambda: 0.0,
        }
    }
}

impl PhysicalParams {
    /// Range and finiteness checks.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_c", self.omega_c),
            ("omega_a", self.omega_a),
            ("j_exchange", self.j_exchange),
            ("g", self.g),
            ("omega_cat", self.omega_cat),
            ("lambda", self.lambda),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_a", self.omega_a),
            ("omega_cat", self.omega_cat),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [("g", self.g), ("lambda", self.lambda)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// All operators needed by the integrators and diagnostics, built once per run.
#[derive(Clone, Debug)]
pub struct SystemOperators {
    pub layout: HilbertLayout,
    pub params: PhysicalParams,
    /// Full Hamiltonian on the composite space.
    pub h_total: Operator,
    /// Battery Hamiltonian (spin splittings + exchange) embedded in the full space.
    pub h_battery: Operator,
    /// Battery Hamiltonian on the bare spin factor (dimension 2^N); this is the
    /// reference Hamiltonian for extractable-work diagnostics.
    pub h_battery_local: Operator,
    /// Catalyst Hamiltonian embedded in the full space (zero when `d_cat == 1`).
    pub h_catalyst: Operator,
    /// Total excitation number `a†a + Σᵢ σᵢ⁺σᵢ⁻ + c†c`.
    pub n_excitation: Operator,
    /// Collapse operator of the photon-loss channel (embedded annihilation).
    pub jump: Operator,
}

/// Assemble the model operators for a given register shape and parameter set.
pub fn build_system(layout: HilbertLayout, params: PhysicalParams) -> Result<SystemOperators> {
    params.validate()?;
    let dim = layout.dim();
    let n = layout.n_spins;

    let a = embed_local(&layout, layout.photon_slot(), &annihilation_op(layout.d_photon))?;
    let a_dag = adjoint(&a);

    let sm_local = lowering_op();
    let excited_local = adjoint(&sm_local).dot(&sm_local); // σ⁺σ⁻ = diag(0, 1)
    let sm: Vec<Operator> = (0..n)
        .map(|i| embed_local(&layout, layout.spin_slot(i), &sm_local))
        .collect::<Result<_>>()?;

    // Bare terms.
    let mut h_total = a_dag.dot(&a) * creal(params.omega_c);
    let mut h_battery = Operator::zeros((dim, dim));
    for i in 0..n {
        h_battery = h_battery + embed_local(&layout, layout.spin_slot(i), &excited_local)? * creal(params.omega_a);
    }
    // Open-chain exchange.
    for i in 0..n.saturating_sub(1) {
        let hop = adjoint(&sm[i]).dot(&sm[i + 1]);
        h_battery = h_battery + (&hop + &adjoint(&hop)) * creal(params.j_exchange);
    }
    h_total = h_total + &h_battery;

    // Catalyst splitting and couplings (absent for d_cat == 1).
    let mut h_catalyst = Operator::zeros((dim, dim));
    let mut n_excitation = a_dag.dot(&a);
    for s in &sm {
        n_excitation = n_excitation + adjoint(s).dot(s);
    }
    if layout.d_cat == 2 {
        let cat_slot = layout.catalyst_slot();
        h_catalyst = embed_local(&layout, cat_slot, &pauli_z())? * creal(params.omega_cat / 2.0);
        let c = embed_local(&layout, cat_slot, &sm_local)?;
        let c_dag = adjoint(&c);
        n_excitation = n_excitation + c_dag.dot(&c);
        for s in &sm {
            let term = c_dag.dot(s);
            h_total = h_total + (&term + &adjoint(&term)) * creal(params.lambda);
        }
    }
    h_total = h_total + &h_catalyst;

    // Cavity–spin exchange coupling.
    for s in &sm {
        let term = a_dag.dot(s);
        h_total = h_total + (&term + &adjoint(&term)) * creal(params.g);
    }

    // Battery Hamiltonian on the bare spin factor.
    let sd = layout.spin_dim();
    let mut h_battery_local = Operator::zeros((sd, sd));
    for i in 0..n {
        h_battery_local =
            h_battery_local + embed_in_chain(n, i, &excited_local) * creal(params.omega_a);
    }
    for i in 0..n.saturating_sub(1) {
        let hop = adjoint(&embed_in_chain(n, i, &sm_local)).dot(&embed_in_chain(n, i + 1, &sm_local));
        h_battery_local = h_battery_local + (&hop + &adjoint(&hop)) * creal(params.j_exchange);
    }

    Ok(SystemOperators {
        layout,
        params,
        h_total,
        h_battery,
        h_battery_local,
        h_catalyst,
        n_excitation,
        jump: a,
    })
}
