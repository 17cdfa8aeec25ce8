//! Conditional min-entropy in primal and dual SDP form, the separable
//! Ω construction, and the monotone families built on it.
//!
//! Subsystem order is fixed as A⊗B with A the d′ (witness-side) factor.
//! All values circulate internally as 2^{−H_min}; logarithms appear only at
//! the reporting boundary.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermitian::{standard_hermitian_basis, DensityMatrix, HermitianMatrix};
use crate::sdp::{self, HermConstraint, HermSdp, IpmStatus, SdpProblem, SdpStatus};
use crate::theory::{self, AffineTheory};
use crate::tol;

/// A density matrix on a fixed A⊗B tensor split.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    pub dims: (usize, usize),
    pub state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(dims: (usize, usize), state: DensityMatrix) -> Result<Self> {
        if state.dim() != dims.0 * dims.1 {
            return Err(Error::Dimension { expected: dims.0 * dims.1, got: state.dim() });
        }
        Ok(Self { dims, state })
    }
}

/// The ω-collection {η, ω₁…ω_n} together with the free states σ₁…σ_n that
/// assemble a separable Ω.
#[derive(Debug, Clone)]
pub struct OmegaParams {
    pub eta: DensityMatrix,
    pub omegas: Vec<DensityMatrix>,
    pub sigmas: Vec<DensityMatrix>,
}

impl OmegaParams {
    /// Checks the membership invariants against the two theories: every ω_ℓ
    /// is dual for the output theory and every σ_ℓ is free in the input one.
    pub fn validated(
        eta: DensityMatrix,
        omegas: Vec<DensityMatrix>,
        sigmas: Vec<DensityMatrix>,
        theory_in: &AffineTheory,
        theory_out: &AffineTheory,
    ) -> Result<Self> {
        if omegas.len() != sigmas.len() {
            return Err(Error::InvalidInput("|omegas| must equal |sigmas|".into()));
        }
        for w in &omegas {
            if !theory::dual_membership(w, theory_out, tol::EPS_FEAS) {
                return Err(Error::NotInDualSet(f64::NAN));
            }
        }
        for s in &sigmas {
            if !theory::is_free(s, theory_in, 1e-7) {
                return Err(Error::InvalidInput("σ_ℓ is not free".into()));
            }
        }
        Ok(Self { eta, omegas, sigmas })
    }
}

/// Ω = (1/(n+1)) (ηᵀ⊗ρ + Σ_ℓ ω_ℓᵀ⊗σ_ℓ), a separable state on A⊗B.
pub fn build_omega(params: &OmegaParams, rho: &DensityMatrix) -> Result<BipartiteState> {
    let n = params.omegas.len();
    let da = params.eta.dim();
    let db = rho.dim();
    let mut total = params.eta.matrix().transpose().kron(rho.matrix());
    for (w, s) in params.omegas.iter().zip(&params.sigmas) {
        if w.dim() != da {
            return Err(Error::Dimension { expected: da, got: w.dim() });
        }
        if s.dim() != db {
            return Err(Error::Dimension { expected: db, got: s.dim() });
        }
        total = total.add(&w.matrix().transpose().kron(s.matrix()));
    }
    total = total.scale(1.0 / (n as f64 + 1.0));
    BipartiteState::new((da, db), DensityMatrix::new(total)?)
}

/// 2^{−H_min(A|B)} via the primal form max ⟨Ω, X⟩ over X ⪰ 0 with
/// Tr_A X = I_B; the dual multipliers reproduce the optimal τ.
pub fn two_pow_neg_hmin(omega: &BipartiteState) -> Result<f64> {
    let (da, db) = omega.dims;
    let basis_b = standard_hermitian_basis(db);
    let constraints: Vec<(HermitianMatrix, f64)> = basis_b
        .iter()
        .map(|bk| (HermitianMatrix::identity(da).kron(bk), bk.trace()))
        .collect();
    let sol = sdp::solve(&SdpProblem {
        variable_dim: da * db,
        objective: omega.state.matrix().scale(-1.0),
        constraints,
    })?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::NumericalFailure("min-entropy SDP did not converge".into()));
    }
    Ok(-sol.objective_value)
}

/// H_min(A|B) = −log₂ min { Tr τ : I_A ⊗ τ ⪰ Ω }.
pub fn hmin(omega: &BipartiteState) -> Result<f64> {
    Ok(-two_pow_neg_hmin(omega)?.log2())
}

/// The duality relation: 2^{−H_min} = d′ · max_E ⟨φ⁺| (id ⊗ E)(Ω) |φ⁺⟩ over
/// channels E from B to a copy of A, optimized through the Choi matrix J of
/// E. The φ⁺ sandwich contracts to the entrywise pairing Σ Ω ∘ J, i.e. the
/// objective ⟨Ωᵀ, J⟩; trace preservation pins Tr_{A′} J = I_B.
pub fn hmin_dual(omega: &BipartiteState) -> Result<f64> {
    let (da, db) = omega.dims;
    let omega_t = omega.state.matrix().transpose();
    let basis_b = standard_hermitian_basis(db);
    let constraints: Vec<(HermitianMatrix, f64)> = basis_b
        .iter()
        .map(|bk| (HermitianMatrix::identity(da).kron(bk), bk.trace()))
        .collect();
    let sol = sdp::solve(&SdpProblem {
        variable_dim: da * db,
        objective: omega_t.scale(-1.0),
        constraints,
    })?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::NumericalFailure("dual min-entropy SDP did not converge".into()));
    }
    Ok(-(-sol.objective_value).log2())
}

/// Coefficient matrix C with ⟨C, ω⟩ = Tr[B (ωᵀ⊗σ)] for fixed B and σ.
pub(crate) fn omega_coefficient(
    b: &HermitianMatrix,
    sigma: &HermitianMatrix,
    dims: (usize, usize),
) -> HermitianMatrix {
    let (da, db) = dims;
    let k = DMatrix::from_fn(da, da, |a, ap| {
        let mut acc = Complex64::new(0.0, 0.0);
        for bb in 0..db {
            for bp in 0..db {
                acc += b.get(a * db + bb, ap * db + bp) * sigma.get(bp, bb);
            }
        }
        acc
    });
    HermitianMatrix::hermitian_part(&k.transpose())
}

/// Coefficient matrix L with ⟨L, σ⟩ = Tr[B (ωᵀ⊗σ)] for fixed B and ω.
fn sigma_coefficient(
    b: &HermitianMatrix,
    w: &HermitianMatrix,
    dims: (usize, usize),
) -> HermitianMatrix {
    let (da, db) = dims;
    let l = DMatrix::from_fn(db, db, |bb, bp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..da {
            for ap in 0..da {
                acc += b.get(a * db + bb, ap * db + bp) * w.get(a, ap);
            }
        }
        acc
    });
    HermitianMatrix::hermitian_part(&l)
}

/// min Tr τ subject to (n+1)·I⊗τ ⪰ ηᵀ⊗ρ + Σ ω_ℓᵀ⊗σ_ℓ over τ and free
/// states σ_ℓ of the input theory, with the ω's held fixed. Returns the
/// optimal value in 2^{−H_min} form.
pub fn f_omega(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    omegas: &[DensityMatrix],
    theory_in: &AffineTheory,
) -> Result<f64> {
    sigma_step(rho, eta, omegas, theory_in).map(|(v, _)| v)
}

fn sigma_step(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    omegas: &[DensityMatrix],
    theory_in: &AffineTheory,
) -> Result<(f64, Vec<DensityMatrix>)> {
    let n = omegas.len();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one ω".into()));
    }
    let da = eta.dim();
    let db = rho.dim();
    if theory_in.dim != db {
        return Err(Error::Dimension { expected: db, got: theory_in.dim });
    }
    let np1 = n as f64 + 1.0;
    let basis_ab = standard_hermitian_basis(da * db);
    let basis_tau = standard_hermitian_basis(db);
    let eta_rho = eta.matrix().transpose().kron(rho.matrix());

    // blocks: slack Z, then σ_1…σ_n; free: the τ components
    let mut block_dims = vec![da * db];
    block_dims.extend(std::iter::repeat(db).take(n));
    let zero_blocks = |dims: &[usize]| -> Vec<HermitianMatrix> {
        dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect()
    };

    let mut constraints: Vec<HermConstraint> = Vec::new();
    // Z + Σ ω_ℓᵀ⊗σ_ℓ − (n+1) I⊗τ = −ηᵀ⊗ρ, expanded in a basis of H_{AB}
    for bk in &basis_ab {
        let mut mats = zero_blocks(&block_dims);
        mats[0] = bk.clone();
        for (l, w) in omegas.iter().enumerate() {
            mats[1 + l] = sigma_coefficient(bk, w.matrix(), (da, db));
        }
        let free: Vec<f64> = basis_tau
            .iter()
            .map(|tq| -np1 * bk.inner(&HermitianMatrix::identity(da).kron(tq)))
            .collect();
        constraints.push(HermConstraint { matrices: mats, free, rhs: -bk.inner(&eta_rho) });
    }
    // each σ_ℓ: unit trace and confinement to V_in
    for l in 0..n {
        let mut mats = zero_blocks(&block_dims);
        mats[1 + l] = HermitianMatrix::identity(db);
        constraints.push(HermConstraint { matrices: mats, free: vec![0.0; basis_tau.len()], rhs: 1.0 });
        for y in theory_in.v_perp_basis.elements() {
            let mut mats = zero_blocks(&block_dims);
            mats[1 + l] = y.clone();
            constraints.push(HermConstraint { matrices: mats, free: vec![0.0; basis_tau.len()], rhs: 0.0 });
        }
    }
    let objective_free: Vec<f64> = basis_tau.iter().map(|tq| tq.trace()).collect();
    let prob = HermSdp {
        block_dims: block_dims.clone(),
        n_free: basis_tau.len(),
        objective: zero_blocks(&block_dims),
        objective_free,
        constraints,
    };
    let sol = sdp::solve_herm(&prob)?;
    let gap = (sol.primal_objective - sol.dual_objective).abs();
    // a stalled iterate whose duality gap has already closed is optimal for
    // every use the crate makes of the value
    if sol.status != IpmStatus::Optimal && gap > 1e-7 * (1.0 + sol.primal_objective.abs()) {
        return Err(Error::NumericalFailure("f_ω SDP did not converge".into()));
    }
    let sigmas = sol.x[1..]
        .iter()
        .map(|s| {
            let clipped = s.spectral_map(|l| l.max(0.0));
            DensityMatrix::new(clipped.scale(1.0 / clipped.trace()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sol.primal_objective, sigmas))
}

/// Which theory the state under evaluation belongs to. The monotone scans
/// in this crate compare equal-dimension theories, so the flag is carried
/// for reporting and validation rather than to swap constraint sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    In,
    Out,
}

fn omega_step(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    t: f64,
    sigmas: &[DensityMatrix],
    theory: &AffineTheory,
) -> Result<(f64, Vec<DensityMatrix>)> {
    let n = sigmas.len();
    let da = eta.dim();
    let db = rho.dim();
    let np1 = n as f64 + 1.0;
    let basis_ab = standard_hermitian_basis(da * db);
    let basis_tau = standard_hermitian_basis(db);
    let eta_rho = eta.matrix().transpose().kron(rho.matrix());
    let sigma1 = theory.state_basis[0].matrix();

    let mut block_dims = vec![da * db];
    block_dims.extend(std::iter::repeat(da).take(n));
    let zero_blocks = |dims: &[usize]| -> Vec<HermitianMatrix> {
        dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect()
    };

    let mut constraints: Vec<HermConstraint> = Vec::new();
    for bk in &basis_ab {
        let mut mats = zero_blocks(&block_dims);
        mats[0] = bk.clone();
        for (l, s) in sigmas.iter().enumerate() {
            mats[1 + l] = omega_coefficient(bk, s.matrix(), (da, db));
        }
        let free: Vec<f64> = basis_tau
            .iter()
            .map(|tq| -np1 * bk.inner(&HermitianMatrix::identity(da).kron(tq)))
            .collect();
        constraints.push(HermConstraint { matrices: mats, free, rhs: -bk.inner(&eta_rho) });
    }
    for l in 0..n {
        let mut mats = zero_blocks(&block_dims);
        mats[1 + l] = HermitianMatrix::identity(da);
        constraints.push(HermConstraint { matrices: mats, free: vec![0.0; basis_tau.len()], rhs: 1.0 });
        for s in &theory.state_basis[1..] {
            let mut mats = zero_blocks(&block_dims);
            mats[1 + l] = s.matrix().sub(sigma1);
            constraints.push(HermConstraint { matrices: mats, free: vec![0.0; basis_tau.len()], rhs: 0.0 });
        }
    }
    // mean-g pin: (1/n) Σ_ℓ Tr[σ₁ ω_ℓ] = t
    let mut mats = zero_blocks(&block_dims);
    for l in 0..n {
        mats[1 + l] = sigma1.scale(1.0 / n as f64);
    }
    constraints.push(HermConstraint { matrices: mats, free: vec![0.0; basis_tau.len()], rhs: t });

    let objective_free: Vec<f64> = basis_tau.iter().map(|tq| tq.trace()).collect();
    let prob = HermSdp {
        block_dims: block_dims.clone(),
        n_free: basis_tau.len(),
        objective: zero_blocks(&block_dims),
        objective_free,
        constraints,
    };
    let sol = sdp::solve_herm(&prob)?;
    if sol.status != IpmStatus::Optimal {
        return Err(Error::NumericalFailure("R SDP did not converge".into()));
    }
    let omegas = sol.x[1..]
        .iter()
        .map(|w| {
            let clipped = w.spectral_map(|l| l.max(0.0));
            DensityMatrix::new(clipped.scale(1.0 / clipped.trace()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sol.primal_objective, omegas))
}

fn check_t_range(t: f64, theory: &AffineTheory) -> Result<()> {
    let (lo, hi) = theory::g_range(theory)?;
    if t < lo - tol::EPS_DECISION || t > hi + tol::EPS_DECISION {
        return Err(Error::TOutOfRange { t, lo, hi });
    }
    Ok(())
}

/// R_{η,t} with the σ's pinned to the theory's density-matrix basis: one
/// SDP over τ and the dual states ω₁…ω_n under the mean-g pin g(ω̄) = t.
/// Returns the optimum in 2^{−H_min} form.
pub fn r_fixed(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    t: f64,
    theory: &AffineTheory,
    _side: Side,
) -> Result<f64> {
    check_t_range(t, theory)?;
    let (value, _) = omega_step(rho, eta, t, &theory.state_basis, theory)?;
    Ok(value)
}

/// R_{η,t} with the Θ minimization attempted in full: alternate between the
/// ω-step (σ's fixed) and the σ-step (ω's fixed), multistarted from random
/// convex mixtures of the basis states. A heuristic upper bound on the true
/// minimum; the certified convertibility pathway is the Choi feasibility
/// SDP, not this.
pub fn r_full(
    rho: &DensityMatrix,
    eta: &DensityMatrix,
    t: f64,
    theory: &AffineTheory,
    side: Side,
    restarts: usize,
) -> Result<f64> {
    check_t_range(t, theory)?;
    let n = theory.state_basis.len();
    let mut best = f64::INFINITY;
    for restart in 0..restarts.max(1) {
        let sigmas = if restart == 0 {
            theory.state_basis.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x52_46_55_4c * restart as u64 + 7);
            (0..n)
                .map(|_| {
                    let mut acc = HermitianMatrix::zeros(theory.dim);
                    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let total: f64 = weights.iter().sum();
                    for (w, s) in weights.iter().zip(&theory.state_basis) {
                        acc = acc.add(&s.matrix().scale(w / total));
                    }
                    DensityMatrix::new(acc)
                })
                .collect::<Result<Vec<_>>>()?
        };
        let mut sigmas = sigmas;
        let mut value = f64::INFINITY;
        for _ in 0..50 {
            // the ω-step enforces the mean-g pin; the σ-step keeps those
            // ω's fixed, so the pin survives and both values are attained
            // by points of S_t
            let (_v_omega, omegas) = omega_step(rho, eta, t, &sigmas, theory)?;
            let (v_sigma, new_sigmas) = sigma_step(rho, eta, &omegas, theory)?;
            if value - v_sigma <= 1e-7 * (1.0 + value.abs()) {
                value = value.min(v_sigma);
                break;
            }
            value = v_sigma;
            sigmas = new_sigmas;
        }
        best = best.min(value);
        let _ = side;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{build_theory, TheorySpec};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn bell_omega() -> BipartiteState {
        let mut v = DVector::zeros(4);
        v[0] = Complex64::new(1.0, 0.0);
        v[3] = Complex64::new(1.0, 0.0);
        BipartiteState::new((2, 2), DensityMatrix::pure(&v)).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let mut v = DVector::zeros(2);
        v[0] = Complex64::new(1.0, 0.0);
        v[1] = Complex64::new(1.0, 0.0);
        DensityMatrix::pure(&v)
    }

    #[test]
    fn hmin_product_with_uniform_a() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let u3 = DensityMatrix::maximally_mixed(3);
        let omega = BipartiteState::new(
            (3, 2),
            DensityMatrix::new(u3.matrix().kron(rho.matrix())).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(hmin(&omega).unwrap(), 3.0f64.log2(), epsilon = 1e-6);
    }

    #[test]
    fn hmin_maximally_entangled() {
        assert_abs_diff_eq!(hmin(&bell_omega()).unwrap(), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn hmin_perfectly_distinguishable_cq() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        let omega = BipartiteState::new(
            (2, 2),
            DensityMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(two_pow_neg_hmin(&omega).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn hmin_dual_matches_primal() {
        assert_abs_diff_eq!(hmin_dual(&bell_omega()).unwrap(), -1.0, epsilon = 1e-5);
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let u2 = DensityMatrix::maximally_mixed(2);
        let omega = BipartiteState::new(
            (2, 2),
            DensityMatrix::new(u2.matrix().kron(rho.matrix())).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(hmin_dual(&omega).unwrap(), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn hmin_dual_helstrom_value() {
        // cq state with p = (1/2, 1/2), ρ₀ = |0⟩⟨0|, ρ₁ = |+⟩⟨+|
        let p0 = DensityMatrix::basis_state(2, 0);
        let mix = HermitianMatrix::basis_projector(2, 0)
            .kron(p0.matrix())
            .scale(0.5)
            .add(
                &HermitianMatrix::basis_projector(2, 1)
                    .kron(plus_state().matrix())
                    .scale(0.5),
            );
        let omega = BipartiteState::new((2, 2), DensityMatrix::new(mix).unwrap()).unwrap();
        let guess = two_pow_neg_hmin(&omega).unwrap();
        let expected = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        assert_abs_diff_eq!(guess, expected, epsilon = 1e-6);
        assert_abs_diff_eq!(hmin_dual(&omega).unwrap(), -expected.log2(), epsilon = 1e-5);
    }

    #[test]
    fn build_omega_uniform_inputs() {
        let u = DensityMatrix::maximally_mixed(2);
        let params = OmegaParams {
            eta: u.clone(),
            omegas: vec![u.clone()],
            sigmas: vec![u.clone()],
        };
        let omega = build_omega(&params, &u).unwrap();
        let uu = u.matrix().kron(u.matrix());
        assert!(omega.state.matrix().sub(&uu).norm_hs() < 1e-12);
    }

    #[test]
    fn build_omega_gibbs_form() {
        let gamma = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let rho = DensityMatrix::from_diagonal(&[0.4, 0.6]).unwrap();
        let w0 = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let w1 = DensityMatrix::from_diagonal(&[0.2, 0.8]).unwrap();
        let params = OmegaParams {
            eta: w0.clone(),
            omegas: vec![w1.clone()],
            sigmas: vec![gamma.clone()],
        };
        let omega = build_omega(&params, &rho).unwrap();
        let expected = w0
            .matrix()
            .kron(rho.matrix())
            .add(&w1.matrix().kron(gamma.matrix()))
            .scale(0.5);
        assert!(omega.state.matrix().sub(&expected).norm_hs() < 1e-12);
    }

    #[test]
    fn f_omega_gibbs_matches_hmin() {
        let th = build_theory(&TheorySpec::Gibbs {
            gamma: DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap(),
        })
        .unwrap();
        let rho = DensityMatrix::from_diagonal(&[0.1, 0.9]).unwrap();
        let eta = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let w = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let params = OmegaParams {
            eta: eta.clone(),
            omegas: vec![w.clone()],
            sigmas: vec![th.state_basis[0].clone()],
        };
        let direct = two_pow_neg_hmin(&build_omega(&params, &rho).unwrap()).unwrap();
        let via_f = f_omega(&rho, &eta, &[w], &th).unwrap();
        assert_abs_diff_eq!(via_f, direct, epsilon = 1e-5);
    }

    #[test]
    fn f_omega_all_uniform_is_inverse_dim() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let u = DensityMatrix::maximally_mixed(2);
        let rho = DensityMatrix::from_diagonal(&[0.8, 0.2]).unwrap();
        let v = f_omega(&rho, &u, &[u.clone(), u.clone()], &th).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-5);
    }

    #[test]
    fn f_omega_lower_bounds_pinned_sigmas() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let rho = plus_state();
        let eta = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let omegas = vec![
            DensityMatrix::maximally_mixed(2),
            plus_state(),
        ];
        let params = OmegaParams {
            eta: eta.clone(),
            omegas: omegas.clone(),
            sigmas: th.state_basis.clone(),
        };
        let pinned = two_pow_neg_hmin(&build_omega(&params, &rho).unwrap()).unwrap();
        let free = f_omega(&rho, &eta, &omegas, &th).unwrap();
        assert!(free <= pinned + 1e-6, "free {free} pinned {pinned}");
    }

    #[test]
    fn r_fixed_coherence_vacuous_t() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let rho = plus_state();
        let eta = DensityMatrix::maximally_mixed(2);
        let v = r_fixed(&rho, &eta, 0.5, &th, Side::In).unwrap();
        assert!(v.is_finite() && v > 0.0);
        // out-of-range t rejected
        assert!(matches!(
            r_fixed(&rho, &eta, 0.9, &th, Side::In),
            Err(Error::TOutOfRange { .. })
        ));
    }

    #[test]
    fn r_fixed_gibbs_endpoint_projects_omega() {
        let gamma = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let th = build_theory(&TheorySpec::Gibbs { gamma }).unwrap();
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let eta = DensityMatrix::maximally_mixed(2);
        // at t = λ_max(γ) the single ω is forced toward |0⟩⟨0|
        let (_, omegas) = omega_step(&rho, &eta, 0.75, &th.state_basis, &th).unwrap();
        let p0 = DensityMatrix::basis_state(2, 0);
        assert!(omegas[0].matrix().sub(p0.matrix()).norm_hs() < 1e-4);
    }

    #[test]
    fn r_full_equals_r_fixed_for_singleton() {
        let gamma = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let th = build_theory(&TheorySpec::Gibbs { gamma }).unwrap();
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.8]).unwrap();
        let eta = DensityMatrix::from_diagonal(&[0.55, 0.45]).unwrap();
        let fixed = r_fixed(&rho, &eta, 0.5, &th, Side::In).unwrap();
        let full = r_full(&rho, &eta, 0.5, &th, Side::In, 3).unwrap();
        assert_abs_diff_eq!(full, fixed, epsilon = 1e-6);
        assert!(full <= fixed + 1e-6);
    }

    #[test]
    fn r_full_stable_across_restarts() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let rho = plus_state();
        let eta = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let a = r_full(&rho, &eta, 0.5, &th, Side::In, 1).unwrap();
        let b = r_full(&rho, &eta, 0.5, &th, Side::In, 5).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-5);
    }
}
