//! State diagnostics: expectation values, reduced states, and extractable work.
//!
//! The central quantity is the *ergotropy* of the battery: the largest energy
//! that can be drawn from a state by any cyclic unitary process. For a state
//! with eigenvalues `r₀ ≥ r₁ ≥ …` and a reference Hamiltonian with levels
//! `ε₀ ≤ ε₁ ≤ …`, the optimal protocol reorders populations so that the
//! largest occupation sits on the lowest level (Allahverdyan, Balian &
//! Nieuwenhuizen, Europhys. Lett. 67 (2004) 565). The resulting *passive
//! state* `Σ_k r_k |ε_k⟩⟨ε_k|` admits no further unitary extraction, and
//!
//! ```text
//!   W(ρ, H) = Tr[ρH] - Σ_k r_k↓ ε_k↑  ≥ 0.
//! ```
//!
//! Battery diagnostics reduce the full register to the spin factor first and
//! measure work against the battery-local Hamiltonian (splittings plus
//! exchange), so the photon and catalyst act only through the correlations
//! they imprint on the spins.

use ndarray::Zip;
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{adjoint, creal, eig_hermitian, frobenius_norm, HilbertLayout, Operator};

/// Eigenvalues below this are treated as a hard physicality failure rather
/// than numerical noise.
const EIGENVALUE_FLOOR: f64 = -1e-4;

/// Negative ergotropy within this band is numerical noise and clamps to zero.
const ERGOTROPY_CLAMP: f64 = -1e-10;

/// Largest imaginary residue tolerated in a nominally real expectation value.
const IMAG_RESIDUE_LIMIT: f64 = 1e-10;

/// Real expectation value `Tr[ρ·op]`, asserting the imaginary residue is noise.
pub fn expectation(rho: &Operator, op: &Operator) -> Result<f64> {
    if rho.nrows() != op.nrows() || rho.ncols() != op.ncols() || rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch {
            context: "expectation",
            expected: rho.nrows(),
            actual: op.nrows(),
        });
    }
    // Tr[ρ·op] = Σ_ij ρ_ij op_ji, evaluated without forming the product.
    let acc = Zip::from(rho)
        .and(op.t())
        .fold(Complex64::new(0.0, 0.0), |acc, &a, &b| acc + a * b);
    if !(acc.im.abs() <= IMAG_RESIDUE_LIMIT) {
        return Err(Error::ImaginaryResidue {
            residue: acc.im,
            limit: IMAG_RESIDUE_LIMIT,
        });
    }
    Ok(acc.re)
}

/// Partial trace over all slots *not* listed in `keep`.
///
/// The reduced matrix inherits row-major ordering over the kept slots in
/// ascending slot order, so keeping the spin slots of the default layout
/// yields the natural 2^N spin-register basis.
pub fn partial_trace(rho: &Operator, layout: &HilbertLayout, keep: &[usize]) -> Result<Operator> {
    let n_slots = layout.n_slots();
    let dim = layout.dim();
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            context: "partial_trace state",
            expected: dim,
            actual: rho.nrows(),
        });
    }
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidParameter(
            "partial_trace keep list contains duplicates".into(),
        ));
    }
    if *kept.last().unwrap() >= n_slots {
        return Err(Error::InvalidParameter(format!(
            "partial_trace slot {} out of range for a {n_slots}-slot register",
            kept.last().unwrap()
        )));
    }

    let dims: Vec<usize> = (0..n_slots).map(|s| layout.slot_dim(s)).collect();
    // Row-major strides of the full index: stride[s] = Π_{s' > s} dims[s'].
    let mut stride = vec![1usize; n_slots];
    for s in (0..n_slots - 1).rev() {
        stride[s] = stride[s + 1] * dims[s + 1];
    }
    let traced: Vec<usize> = (0..n_slots).filter(|s| !kept.contains(s)).collect();

    // Full-space offsets of every kept and traced multi-index.
    let offsets = |slots: &[usize]| -> Vec<usize> {
        let total: usize = slots.iter().map(|&s| dims[s]).product();
        (0..total)
            .map(|mut x| {
                let mut off = 0;
                for &s in slots.iter().rev() {
                    off += (x % dims[s]) * stride[s];
                    x /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept_offsets = offsets(&kept);
    let traced_offsets = offsets(&traced);

    let dk = kept_offsets.len();
    let mut out = Operator::zeros((dk, dk));
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &to in &traced_offsets {
                acc += rho[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Spectral data of the optimal work extraction from a state.
#[derive(Clone, Debug)]
pub struct PassiveDecomposition {
    /// State eigenvalues in descending order.
    pub rho_eigenvalues: Vec<f64>,
    /// Hamiltonian levels in ascending order.
    pub energy_levels: Vec<f64>,
    /// Energy of the passive state `Σ_k r_k↓ ε_k↑`.
    pub passive_energy: f64,
    /// Extractable work `Tr[ρH] - passive_energy`, clamped of numerical noise.
    pub ergotropy: f64,
    /// The passive state `Σ_k r_k↓ |ε_k↑⟩⟨ε_k↑|`.
    pub passive_state: Operator,
}

fn check_hermitian(m: &Operator, what: &str) -> Result<()> {
    let defect = frobenius_norm(&(m - &adjoint(m)));
    if !(defect <= 1e-10) {
        return Err(Error::InvalidState(format!(
            "{what} has hermiticity defect {defect:.3e}"
        )));
    }
    Ok(())
}

/// Descending state spectrum with physicality checks (eigenvalue floor,
/// unit trace).
fn state_spectrum_descending(rho: &Operator) -> Result<Vec<f64>> {
    check_hermitian(rho, "state")?;
    let vals = rho
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("state eigenvalues failed: {e}")))?;
    let mut r: Vec<f64> = vals.to_vec();
    for &v in &r {
        if !(v >= EIGENVALUE_FLOOR) {
            return Err(Error::UnphysicalEigenvalue { value: v });
        }
    }
    let sum: f64 = r.iter().sum();
    if !((sum - 1.0).abs() <= 1e-8) {
        return Err(Error::InvalidState(format!(
            "state eigenvalues sum to {sum}, expected 1"
        )));
    }
    r.sort_by(|a, b| b.total_cmp(a));
    Ok(r)
}

fn clamp_ergotropy(w: f64) -> f64 {
    if w >= ERGOTROPY_CLAMP && w < 0.0 {
        0.0
    } else {
        w
    }
}

/// Full passive decomposition of `(ρ, H)`, including the passive state itself.
pub fn passive_state(rho: &Operator, h: &Operator) -> Result<PassiveDecomposition> {
    if rho.nrows() != h.nrows() || rho.nrows() != rho.ncols() || h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "passive_state",
            expected: rho.nrows(),
            actual: h.nrows(),
        });
    }
    check_hermitian(h, "reference Hamiltonian")?;
    let r_desc = state_spectrum_descending(rho)?;
    // Levels come back ascending; pair r_k↓ with ε_k↑.
    let (energy_levels, vectors) = eig_hermitian(h)?;
    let passive_energy: f64 = r_desc
        .iter()
        .zip(&energy_levels)
        .map(|(r, e)| r * e)
        .sum();
    let dim = rho.nrows();
    let mut passive = Operator::zeros((dim, dim));
    for (k, &r) in r_desc.iter().enumerate() {
        let v = vectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                passive[(i, j)] += creal(r) * v[i] * v[j].conj();
            }
        }
    }
    let energy = expectation(rho, h)?;
    Ok(PassiveDecomposition {
        ergotropy: clamp_ergotropy(energy - passive_energy),
        rho_eigenvalues: r_desc,
        energy_levels,
        passive_energy,
        passive_state: passive,
    })
}

/// Extractable work `W(ρ, H)` (eigenvalues only; no passive state built).
pub fn ergotropy(rho: &Operator, h: &Operator) -> Result<f64> {
    if rho.nrows() != h.nrows() || rho.nrows() != rho.ncols() || h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "ergotropy",
            expected: rho.nrows(),
            actual: h.nrows(),
        });
    }
    check_hermitian(h, "reference Hamiltonian")?;
    let r_desc = state_spectrum_descending(rho)?;
    let levels = h
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("Hamiltonian eigenvalues failed: {e}")))?;
    let passive_energy: f64 = r_desc.iter().zip(levels.iter()).map(|(r, e)| r * e).sum();
    let energy = expectation(rho, h)?;
    Ok(clamp_ergotropy(energy - passive_energy))
}

/// Ergotropy of the battery: reduce the full state to the spin factor and
/// measure extractable work against the battery-local Hamiltonian.
pub fn battery_ergotropy(
    rho_full: &Operator,
    layout: &HilbertLayout,
    h_battery_local: &Operator,
) -> Result<f64> {
    if h_battery_local.nrows() != layout.spin_dim() {
        return Err(Error::DimensionMismatch {
            context: "battery_ergotropy Hamiltonian",
            expected: layout.spin_dim(),
            actual: h_battery_local.nrows(),
        });
    }
    let spin_slots: Vec<usize> = (0..layout.n_spins).map(|i| layout.spin_slot(i)).collect();
    let reduced = partial_trace(rho_full, layout, &spin_slots)?;
    ergotropy(&reduced, h_battery_local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_system, PhysicalParams};
    use approx::assert_abs_diff_eq;
    use ndarray::linalg::kron;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::from_shape_fn((n, n), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Operator {
        let a = random_complex(n, rng);
        (&a + &adjoint(&a)) * creal(0.5)
    }

    /// Random full-rank density matrix (normalized Wishart form A·A†/Tr).
    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> Operator {
        let a = random_complex(n, rng);
        let w = a.dot(&adjoint(&a));
        let tr: f64 = (0..n).map(|i| w[(i, i)].re).sum();
        w * creal(1.0 / tr)
    }

    fn diag_real(values: &[f64]) -> Operator {
        let n = values.len();
        Operator::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                creal(values[i])
            } else {
                creal(0.0)
            }
        })
    }

    #[test]
    fn expectation_of_projector_reads_population() {
        let rho = diag_real(&[0.25, 0.75]);
        let proj = diag_real(&[0.0, 1.0]);
        assert_abs_diff_eq!(expectation(&rho, &proj).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn expectation_flags_large_imaginary_residue() {
        // Tr[ρ·op] for a non-Hermitian op picks up an imaginary part.
        let rho = diag_real(&[0.5, 0.5]);
        let mut op = Operator::zeros((2, 2));
        op[(0, 0)] = Complex64::new(0.0, 1.0);
        assert!(matches!(
            expectation(&rho, &op),
            Err(Error::ImaginaryResidue { .. })
        ));
        let wrong = Operator::eye(3);
        assert!(expectation(&rho, &wrong).is_err());
    }

    #[test]
    fn partial_trace_of_product_state_factorizes() {
        let layout = HilbertLayout::new(3, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let parts: Vec<Operator> = (0..layout.n_slots())
            .map(|s| random_density(layout.slot_dim(s), &mut rng))
            .collect();
        let mut full = Operator::eye(1);
        for p in &parts {
            full = kron(&full, p);
        }
        // Reduce to the two spin slots: should give ρ₁ ⊗ ρ₂.
        let reduced = partial_trace(&full, &layout, &[1, 2]).unwrap();
        let expected = kron(&parts[1], &parts[2]);
        assert!(frobenius_norm(&(&reduced - &expected)) < 1e-12);
        // Reduce to the photon slot alone.
        let reduced = partial_trace(&full, &layout, &[0]).unwrap();
        assert!(frobenius_norm(&(&reduced - &parts[0])) < 1e-12);
    }

    #[test]
    fn partial_trace_of_entangled_pair_is_maximally_mixed() {
        // (|0,0⟩ + |1,1⟩)/√2 on photon ⊗ spin reduces to I/2 on each side.
        let layout = HilbertLayout::new(2, 1, 1).unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); 4];
        psi[layout.basis_index(&[0, 0, 0]).unwrap()] = creal(1.0 / 2f64.sqrt());
        psi[layout.basis_index(&[1, 1, 0]).unwrap()] = creal(1.0 / 2f64.sqrt());
        let rho = Operator::from_shape_fn((4, 4), |(i, j)| psi[i] * psi[j].conj());
        for keep in [0usize, 1] {
            let reduced = partial_trace(&rho, &layout, &[keep]).unwrap();
            let half = diag_real(&[0.5, 0.5]);
            assert!(frobenius_norm(&(&reduced - &half)) < 1e-14);
        }
    }

    /// Independent reference: enumerate every matrix element by its slot
    /// labels and accumulate those whose traced labels agree.
    fn partial_trace_by_labels(rho: &Operator, dims: &[usize], keep: &[usize]) -> Operator {
        let n = dims.len();
        let digits = |mut x: usize| {
            let mut v = vec![0usize; n];
            for s in (0..n).rev() {
                v[s] = x % dims[s];
                x /= dims[s];
            }
            v
        };
        let kept_index = |lab: &[usize]| keep.iter().fold(0, |acc, &s| acc * dims[s] + lab[s]);
        let dk: usize = keep.iter().map(|&s| dims[s]).product();
        let mut out = Operator::zeros((dk, dk));
        let dim: usize = dims.iter().product();
        for i in 0..dim {
            let li = digits(i);
            for j in 0..dim {
                let lj = digits(j);
                let traced_match = (0..n)
                    .filter(|s| !keep.contains(s))
                    .all(|s| li[s] == lj[s]);
                if traced_match {
                    out[(kept_index(&li), kept_index(&lj))] += rho[(i, j)];
                }
            }
        }
        out
    }

    #[test]
    fn partial_trace_matches_label_enumeration_oracle() {
        let layout = HilbertLayout::default();
        let dims = [6, 2, 2, 2, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let rho = random_density(layout.dim(), &mut rng);
        for keep in [vec![0], vec![1, 2, 3], vec![4], vec![0, 4], vec![2]] {
            let fast = partial_trace(&rho, &layout, &keep).unwrap();
            let slow = partial_trace_by_labels(&rho, &dims, &keep);
            assert!(
                frobenius_norm(&(&fast - &slow)) < 1e-12,
                "mismatch for keep = {keep:?}"
            );
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_keep_all_is_identity() {
        let layout = HilbertLayout::new(3, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let rho = random_density(layout.dim(), &mut rng);
        let reduced = partial_trace(&rho, &layout, &[1, 2]).unwrap();
        let tr: Complex64 = (0..4).map(|i| reduced[(i, i)]).sum();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-13);

        let all: Vec<usize> = (0..layout.n_slots()).collect();
        let same = partial_trace(&rho, &layout, &all).unwrap();
        assert!(frobenius_norm(&(&same - &rho)) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_slot_lists() {
        let layout = HilbertLayout::new(2, 1, 2).unwrap();
        let rho = Operator::eye(8) * creal(1.0 / 8.0);
        assert!(matches!(
            partial_trace(&rho, &layout, &[]),
            Err(Error::EmptyKeep)
        ));
        assert!(partial_trace(&rho, &layout, &[0, 0]).is_err());
        assert!(partial_trace(&rho, &layout, &[3]).is_err());
        let wrong = Operator::eye(4);
        assert!(partial_trace(&wrong, &layout, &[0]).is_err());
    }

    #[test]
    fn qubit_population_inversion_yields_exact_work() {
        // ρ = diag(0.3, 0.7) against H = diag(0, 1): swap populations,
        // W = 0.7 - 0.3 = 0.4, passive state diag(0.7, 0.3).
        let rho = diag_real(&[0.3, 0.7]);
        let h = diag_real(&[0.0, 1.0]);
        let dec = passive_state(&rho, &h).unwrap();
        assert_abs_diff_eq!(dec.ergotropy, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(dec.passive_energy, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(dec.passive_state[(0, 0)].re, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(dec.passive_state[(1, 1)].re, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(ergotropy(&rho, &h).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn fully_inverted_qubit_releases_its_splitting() {
        let rho = diag_real(&[0.0, 1.0]);
        let h = diag_real(&[0.0, 2.5]);
        assert_abs_diff_eq!(ergotropy(&rho, &h).unwrap(), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn maximally_mixed_and_ground_states_are_passive() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let h = random_hermitian(5, &mut rng);
        let mixed = Operator::eye(5) * creal(0.2);
        assert!(ergotropy(&mixed, &h).unwrap().abs() < 1e-12);

        let (levels, vectors) = eig_hermitian(&h).unwrap();
        let g = vectors.column(0);
        let ground = Operator::from_shape_fn((5, 5), |(i, j)| g[i] * g[j].conj());
        let dec = passive_state(&ground, &h).unwrap();
        assert!(dec.ergotropy.abs() < 1e-11);
        assert_abs_diff_eq!(dec.passive_energy, levels[0], epsilon = 1e-11);
    }

    #[test]
    fn passive_states_admit_no_further_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 3, 4, 5] {
            let rho = random_density(n, &mut rng);
            let h = random_hermitian(n, &mut rng);
            let dec = passive_state(&rho, &h).unwrap();
            let again = ergotropy(&dec.passive_state, &h).unwrap();
            assert!(again.abs() < 1e-10, "dim {n}: residual work {again:.3e}");
        }
    }

    /// All permutations of 0..n (recursive; n ≤ 5 here).
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Oracle: minimize Σ r_{π(k)} ε_k over every permutation π explicitly.
    fn brute_force_ergotropy(rho: &Operator, h: &Operator) -> f64 {
        let r: Vec<f64> = rho.eigvalsh(UPLO::Lower).unwrap().to_vec();
        let eps: Vec<f64> = h.eigvalsh(UPLO::Lower).unwrap().to_vec();
        let energy = expectation(rho, h).unwrap();
        let passive = permutations(r.len())
            .into_iter()
            .map(|p| p.iter().zip(&eps).map(|(&i, e)| r[i] * e).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        energy - passive
    }

    #[test]
    fn ergotropy_matches_permutation_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for n in [2usize, 3, 4, 5] {
            for _ in 0..6 {
                let rho = random_density(n, &mut rng);
                let h = random_hermitian(n, &mut rng);
                let fast = ergotropy(&rho, &h).unwrap();
                let slow = brute_force_ergotropy(&rho, &h);
                assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ergotropy_handles_degenerate_levels() {
        let h = diag_real(&[0.0, 1.0, 1.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..10 {
            let rho = random_density(4, &mut rng);
            let fast = ergotropy(&rho, &h).unwrap();
            let slow = brute_force_ergotropy(&rho, &h);
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
        }
    }

    #[test]
    fn passive_energy_depends_only_on_spectra() {
        // A unitary rotation of the state leaves the passive energy fixed;
        // the work difference is exactly the energy difference.
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let rho = random_density(4, &mut rng);
        let h = random_hermitian(4, &mut rng);
        // Unitary from the eigenbasis of an unrelated Hermitian matrix.
        let (_, u) = eig_hermitian(&random_hermitian(4, &mut rng)).unwrap();
        let rotated = u.dot(&rho).dot(&adjoint(&u));
        let a = passive_state(&rho, &h).unwrap();
        let b = passive_state(&rotated, &h).unwrap();
        assert_abs_diff_eq!(a.passive_energy, b.passive_energy, epsilon = 1e-11);
        let de = expectation(&rotated, &h).unwrap() - expectation(&rho, &h).unwrap();
        assert_abs_diff_eq!(b.ergotropy - a.ergotropy, de, epsilon = 1e-10);
    }

    #[test]
    fn ergotropy_scales_linearly_with_the_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let rho = random_density(4, &mut rng);
        let h = random_hermitian(4, &mut rng);
        let w = ergotropy(&rho, &h).unwrap();
        let w_scaled = ergotropy(&rho, &(&h * creal(2.7))).unwrap();
        assert_abs_diff_eq!(w_scaled, 2.7 * w, epsilon = 1e-11);
    }

    #[test]
    fn ergotropy_is_bounded_by_energy_above_ground() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let rho = random_density(5, &mut rng);
            let h = random_hermitian(5, &mut rng);
            let w = ergotropy(&rho, &h).unwrap();
            let energy = expectation(&rho, &h).unwrap();
            let ground = h.eigvalsh(UPLO::Lower).unwrap()[0];
            assert!(w >= 0.0);
            assert!(w <= energy - ground + 1e-12);
        }
    }

    #[test]
    fn unphysical_states_are_rejected() {
        let h = diag_real(&[0.0, 1.0]);
        let rho = diag_real(&[1.001, -0.001]);
        assert!(matches!(
            ergotropy(&rho, &h),
            Err(Error::UnphysicalEigenvalue { .. })
        ));
        let not_normalized = diag_real(&[0.6, 0.3]);
        assert!(matches!(
            ergotropy(&not_normalized, &h),
            Err(Error::InvalidState(_))
        ));
        let mut non_hermitian = diag_real(&[0.5, 0.5]);
        non_hermitian[(0, 1)] = creal(0.3);
        assert!(matches!(
            ergotropy(&non_hermitian, &h),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn battery_work_of_the_vacuum_is_zero() {
        let ops = build_system(HilbertLayout::default(), PhysicalParams::default()).unwrap();
        let dim = ops.layout.dim();
        let mut rho = Operator::zeros((dim, dim));
        rho[(0, 0)] = creal(1.0);
        let w = battery_ergotropy(&rho, &ops.layout, &ops.h_battery_local).unwrap();
        assert_abs_diff_eq!(w, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fully_charged_chain_releases_all_splittings() {
        // All three spins excited, no exchange: W = 3·ω_a.
        let params = PhysicalParams {
            j_exchange: 0.0,
            ..PhysicalParams::default()
        };
        let ops = build_system(HilbertLayout::default(), params).unwrap();
        let layout = ops.layout;
        let idx = layout.basis_index(&[0, 1, 1, 1, 0]).unwrap();
        let dim = layout.dim();
        let mut rho = Operator::zeros((dim, dim));
        rho[(idx, idx)] = creal(1.0);
        let w = battery_ergotropy(&rho, &layout, &ops.h_battery_local).unwrap();
        assert_abs_diff_eq!(w, 3.0 * params.omega_a, epsilon = 1e-12);
    }

    #[test]
    fn battery_work_rejects_mismatched_reference() {
        let ops = build_system(HilbertLayout::default(), PhysicalParams::default()).unwrap();
        let dim = ops.layout.dim();
        let mut rho = Operator::zeros((dim, dim));
        rho[(0, 0)] = creal(1.0);
        let wrong = Operator::eye(4);
        assert!(matches!(
            battery_ergotropy(&rho, &ops.layout, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
