//! Existence and construction of resource-destroying maps: channels Δ that
//! fix every free state and send every state into the free set.
//!
//! When the maximally mixed state is free, Δ is forced to be the
//! Hilbert–Schmidt projection onto V and existence reduces to positivity of
//! one explicit Choi matrix. Otherwise existence is a genuine feasibility
//! question, decided here by the Farkas machinery of the `sdp` module, with
//! an independent subspace-based cross-check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::convert::ChoiMatrix;
use crate::error::{Error, Result};
use crate::hermitian::{orthonormalize, HermitianMatrix};
use crate::sdp::{self, FarkasCertificate, FeasibilityOutcome};
use crate::theory::AffineTheory;
use crate::tol;

#[derive(Debug, Clone)]
pub struct RdmVerdict {
    pub exists: bool,
    pub delta_choi: Option<ChoiMatrix>,
    /// Offending eigenvector and eigenvalue of the unital candidate Choi.
    pub negativity_witness: Option<(DVector<Complex64>, f64)>,
    /// Infeasibility certificate for the non-unital constraint family.
    pub farkas: Option<FarkasCertificate>,
    pub unital: bool,
}

/// Δ as the Hilbert–Schmidt projection onto V, extended complex-linearly:
/// Choi[(a,b),(c,e)] = Δ(E_be)[a,c] = Σ_l X_l[a,c]·X_l[e,b].
fn projection_choi(theory: &AffineTheory) -> HermitianMatrix {
    let d = theory.dim;
    let mut m = DMatrix::zeros(d * d, d * d);
    for x in theory.v_basis.elements() {
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        m[(a * d + b, c * d + e)] += x.raw()[(a, c)] * x.raw()[(e, b)];
                    }
                }
            }
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

/// Unital case: with the maximally mixed state free, the only candidate is
/// Δ(X_j) = X_j on V, Δ(Y_k) = 0 on V⊥, and a resource-destroying map
/// exists exactly when its Choi matrix is positive semidefinite.
pub fn rdm_unital(theory: &AffineTheory) -> Result<RdmVerdict> {
    if !theory.contains_maximally_mixed {
        return Err(Error::PreconditionViolated(
            "maximally mixed state is not free; use the general routine".into(),
        ));
    }
    let d = theory.dim;
    let choi = projection_choi(theory);
    let (vals, vecs) = choi.eigh();
    let min_eig = vals[0];
    if min_eig >= -tol::EPS_PSD {
        let clipped = choi.spectral_map(|l| l.max(0.0));
        Ok(RdmVerdict {
            exists: true,
            delta_choi: Some(ChoiMatrix::new((d, d), clipped)?),
            negativity_witness: None,
            farkas: None,
            unital: true,
        })
    } else {
        Ok(RdmVerdict {
            exists: false,
            delta_choi: None,
            negativity_witness: Some((vecs[0].clone(), min_eig)),
            farkas: None,
            unital: true,
        })
    }
}

/// Orthonormal bases of V and V⊥ with the projections of the identity as
/// the leading elements, plus the weights p = Tr P², q = Tr Q².
struct SplitBases {
    xs: Vec<HermitianMatrix>,
    ys: Vec<HermitianMatrix>,
    p: f64,
    q: f64,
}

fn split_identity(theory: &AffineTheory) -> Result<SplitBases> {
    let d = theory.dim;
    let identity = HermitianMatrix::identity(d);
    let mut p_mat = HermitianMatrix::zeros(d);
    for x in theory.v_basis.elements() {
        p_mat = p_mat.add(&x.scale(x.inner(&identity)));
    }
    let q_mat = identity.sub(&p_mat);
    let p = p_mat.inner(&p_mat);
    let q = q_mat.inner(&q_mat);
    if p <= 1e-10 {
        return Err(Error::EmptyFreeSet);
    }
    let mut x_list = vec![p_mat];
    x_list.extend(theory.v_basis.elements().iter().cloned());
    let xs = orthonormalize(&x_list)?.elements().to_vec();
    let ys = if q > 1e-10 {
        let mut y_list = vec![q_mat];
        y_list.extend(theory.v_perp_basis.elements().iter().cloned());
        orthonormalize(&y_list)?.elements().to_vec()
    } else {
        theory.v_perp_basis.elements().to_vec()
    };
    Ok(SplitBases { xs, ys, p, q })
}

/// Homogeneous constraint family cutting out the Choi matrices of
/// resource-destroying maps (trace normalized to d):
/// (a) Tr[σ(X_i⊗X_jᵀ)] = δ_ij, (b) Tr[σ(Y_k⊗X_iᵀ)] = 0,
/// (c) Tr[σ(Y_k⊗Y_ℓᵀ)] = 0, and the trace-preservation remainder
/// (zw) Tr[σ(X₁⊗Y_kᵀ)] = (δ_{1k}/d)·√(q/p)·Tr σ.
fn rdm_families(theory: &AffineTheory, split: &SplitBases) -> Vec<HermitianMatrix> {
    let d = theory.dim;
    let identity = HermitianMatrix::identity(d * d);
    let mut h = Vec::new();
    for (i, xi) in split.xs.iter().enumerate() {
        for (j, xj) in split.xs.iter().enumerate() {
            let mut c = xi.kron(&xj.transpose());
            if i == j {
                c = c.sub(&identity.scale(1.0 / d as f64));
            }
            h.push(c);
        }
    }
    for y in &split.ys {
        for x in &split.xs {
            h.push(y.kron(&x.transpose()));
        }
    }
    for yk in &split.ys {
        for yl in &split.ys {
            h.push(yk.kron(&yl.transpose()));
        }
    }
    let r = if split.q > 1e-10 { (split.q / split.p).sqrt() } else { 0.0 };
    for (k, y) in split.ys.iter().enumerate() {
        let mut c = split.xs[0].kron(&y.transpose());
        if k == 0 && split.q > 1e-10 {
            c = c.sub(&identity.scale(r / d as f64));
        }
        h.push(c);
    }
    h
}

/// General case: no assumption on the maximally mixed state. Decides
/// existence as SDP feasibility of the Choi constraint family and returns a
/// deterministic feasible Choi when one exists.
pub fn rdm_general(theory: &AffineTheory) -> Result<RdmVerdict> {
    let d = theory.dim;
    let split = split_identity(theory)?;
    let h = rdm_families(theory, &split);
    match sdp::feasibility_homogeneous(&h, d as f64)? {
        FeasibilityOutcome::Feasible(x) => Ok(RdmVerdict {
            exists: true,
            delta_choi: Some(ChoiMatrix::new((d, d), x)?),
            negativity_witness: None,
            farkas: None,
            unital: theory.contains_maximally_mixed,
        }),
        FeasibilityOutcome::Infeasible(cert) => Ok(RdmVerdict {
            exists: false,
            delta_choi: None,
            negativity_witness: None,
            farkas: Some(cert),
            unital: theory.contains_maximally_mixed,
        }),
    }
}

/// Routes to the unital or general decision procedure.
pub fn rdm(theory: &AffineTheory) -> Result<RdmVerdict> {
    if theory.contains_maximally_mixed {
        rdm_unital(theory)
    } else {
        rdm_general(theory)
    }
}

/// Independent cross-check of the existence verdict through the subspace
/// form: with W = span{X_j⊗Y_kᵀ}_{j≥2} and G the canonical element of W⊥,
/// a resource-destroying map exists iff K = {A ∈ W⊥ : Tr[AG] = 0} contains
/// no positive definite matrix. Returns the existence verdict.
pub fn k_subspace_check(theory: &AffineTheory) -> Result<bool> {
    let d = theory.dim;
    let split = split_identity(theory)?;
    // K is cut out by: orthogonality to every X_j⊗Y_kᵀ (j ≥ 2) and to G
    let mut h = Vec::new();
    for x in &split.xs[1..] {
        for y in &split.ys {
            h.push(x.kron(&y.transpose()));
        }
    }
    let mut g = HermitianMatrix::zeros(d * d);
    if split.q > 1e-10 {
        g = g.add(&split.xs[0].kron(&split.ys[0].transpose()).scale((split.q / split.p).sqrt()));
    }
    for x in &split.xs {
        g = g.add(&x.kron(&x.transpose()));
    }
    g = g.scale(1.0 / d as f64);
    h.push(g);
    match sdp::feasibility_homogeneous(&h, d as f64) {
        // a strictly positive definite point in K certifies non-existence;
        // the feasibility routine maximizes the smallest eigenvalue, so the
        // returned point settles strictness
        Ok(FeasibilityOutcome::Feasible(a)) => Ok(a.min_eigenvalue() <= tol::EPS_DECISION),
        Ok(FeasibilityOutcome::Infeasible(_)) => Ok(true),
        Err(Error::BoundaryAmbiguous { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Superoperator matrix S with S[(a,c),(b,e)] = σ[(a,b),(c,e)], so that
/// vec(E(ρ)) = S vec(ρ) in row-major vectorization.
fn choi_to_superop(choi: &ChoiMatrix) -> DMatrix<Complex64> {
    let (d_out, d_in) = choi.dims;
    let m = choi.matrix.raw();
    DMatrix::from_fn(d_out * d_out, d_in * d_in, |row, col| {
        let (a, c) = (row / d_out, row % d_out);
        let (b, e) = (col / d_in, col % d_in);
        m[(a * d_in + b, c * d_in + e)]
    })
}

/// Checks Δ∘E = E∘Δ for a square channel E against the theory's
/// resource-destroying map, by comparing superoperator compositions.
pub fn delta_commuting_check(choi: &ChoiMatrix, theory: &AffineTheory) -> Result<bool> {
    let verdict = rdm(theory)?;
    let delta = verdict.delta_choi.ok_or(Error::NoRdm)?;
    if choi.dims.0 != choi.dims.1 || choi.dims.0 != theory.dim {
        return Err(Error::Dimension { expected: theory.dim, got: choi.dims.0 });
    }
    let s_e = choi_to_superop(choi);
    let s_d = choi_to_superop(&delta);
    let diff = &s_d * &s_e - &s_e * &s_d;
    Ok(diff.norm() <= 1e-7)
}

/// Applies the theory's resource-destroying map to an arbitrary Hermitian
/// input through its Choi matrix.
pub fn apply_delta(delta: &ChoiMatrix, m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (d_out, d_in) = delta.dims;
    if m.dim() != d_in {
        return Err(Error::Dimension { expected: d_in, got: m.dim() });
    }
    let s = choi_to_superop(delta);
    let v = DVector::from_fn(d_in * d_in, |i, _| m.raw()[(i / d_in, i % d_in)]);
    let out = &s * v;
    let out_mat = DMatrix::from_fn(d_out, d_out, |a, c| out[a * d_out + c]);
    Ok(HermitianMatrix::hermitian_part(&out_mat))
}

/// Basis-resolved trace-preservation helper for tests: Δ candidate Choi of
/// the completely dephasing map on dimension d.
pub fn dephasing_choi(d: usize) -> ChoiMatrix {
    let mut m = DMatrix::zeros(d * d, d * d);
    for j in 0..d {
        m[(j * d + j, j * d + j)] = Complex64::new(1.0, 0.0);
    }
    ChoiMatrix { dims: (d, d), matrix: HermitianMatrix::new(m).expect("hermitian") }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::{apply_channel, random_state};
    use crate::hermitian::DensityMatrix;
    use crate::theory::{self, build_theory, TheorySpec};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coherence_rdm_is_dephasing() {
        let th = build_theory(&TheorySpec::Coherence { dim: 3 }).unwrap();
        let verdict = rdm_unital(&th).unwrap();
        assert!(verdict.exists && verdict.unital);
        let choi = verdict.delta_choi.unwrap();
        let expected = dephasing_choi(3);
        assert!(choi.matrix.sub(&expected.matrix).norm_hs() < 1e-9);
    }

    #[test]
    fn real_qm_has_no_rdm() {
        let th = build_theory(&TheorySpec::RealQm { dim: 2 }).unwrap();
        let verdict = rdm_unital(&th).unwrap();
        assert!(!verdict.exists);
        let (_, eig) = verdict.negativity_witness.unwrap();
        assert_abs_diff_eq!(eig, -0.5, epsilon = 1e-9);
    }

    #[test]
    fn full_state_space_rdm_is_identity() {
        // V = H_d: every state free, Δ = identity channel
        let half = Complex64::new(0.5, 0.0);
        let xs = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0])
            .map(|x| Complex64::new(x, 0.0));
        let ys = DMatrix::from_fn(2, 2, |j, k| match (j, k) {
            (0, 1) => Complex64::new(0.0, -0.5),
            (1, 0) => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        });
        let id2 = DMatrix::from_diagonal_element(2, 2, half);
        let gens = vec![
            DensityMatrix::basis_state(2, 0),
            DensityMatrix::basis_state(2, 1),
            DensityMatrix::new(HermitianMatrix::new(&id2 + xs).unwrap()).unwrap(),
            DensityMatrix::new(HermitianMatrix::new(&id2 + ys).unwrap()).unwrap(),
        ];
        let th = build_theory(&TheorySpec::Custom { generators: gens }).unwrap();
        let verdict = rdm_unital(&th).unwrap();
        assert!(verdict.exists);
        let choi = verdict.delta_choi.unwrap();
        let identity = ChoiMatrix::identity(2);
        assert!(choi.matrix.sub(&identity.matrix).norm_hs() < 1e-9);
    }

    #[test]
    fn gibbs_rdm_exists_and_fixes_free_states() {
        let th = build_theory(&TheorySpec::Gibbs {
            gamma: DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap(),
        })
        .unwrap();
        let verdict = rdm_general(&th).unwrap();
        assert!(verdict.exists && !verdict.unital);
        let choi = verdict.delta_choi.unwrap();
        for s in &th.state_basis {
            let out = apply_channel(&choi, s).unwrap();
            assert!(out.matrix().sub(s.matrix()).norm_hs() < 1e-6);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let rho = random_state(2, &mut rng);
            let out = apply_channel(&choi, &rho).unwrap();
            assert!(theory::is_free(&out, &th, 1e-6));
        }
    }

    #[test]
    fn general_route_agrees_with_unital() {
        for spec in [
            TheorySpec::Coherence { dim: 2 },
            TheorySpec::Coherence { dim: 3 },
            TheorySpec::RealQm { dim: 2 },
        ] {
            let th = build_theory(&spec).unwrap();
            let unital = rdm_unital(&th).unwrap();
            let general = rdm_general(&th).unwrap();
            assert_eq!(unital.exists, general.exists, "{spec:?}");
            if let (Some(a), Some(b)) = (&unital.delta_choi, &general.delta_choi) {
                // unital RDMs are unique, so both routes must coincide
                assert!(a.matrix.sub(&b.matrix).norm_hs() < 1e-5);
            }
        }
    }

    #[test]
    fn k_subspace_cross_check() {
        for (spec, expected) in [
            (TheorySpec::Coherence { dim: 2 }, true),
            (TheorySpec::RealQm { dim: 2 }, false),
            (
                TheorySpec::Gibbs { gamma: DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap() },
                true,
            ),
        ] {
            assert_eq!(k_subspace_check(&build_theory(&spec).unwrap()).unwrap(), expected, "{spec:?}");
        }
    }

    #[test]
    fn unital_precondition_enforced() {
        let th = build_theory(&TheorySpec::Gibbs {
            gamma: DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap(),
        })
        .unwrap();
        assert!(matches!(rdm_unital(&th), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn delta_commutes_with_itself_and_identity() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let delta = rdm(&th).unwrap().delta_choi.unwrap();
        assert!(delta_commuting_check(&delta, &th).unwrap());
        assert!(delta_commuting_check(&ChoiMatrix::identity(2), &th).unwrap());
    }

    #[test]
    fn hadamard_does_not_commute_with_dephasing() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(2, 2, &[s, s, s, -s]).map(|x| Complex64::new(x, 0.0));
        // Choi of unitary conjugation: (U⊗I)|φ⁺⟩⟨φ⁺|(U⊗I)† unnormalized
        let id = ChoiMatrix::identity(2);
        let u_kron = h.kronecker(&DMatrix::identity(2, 2));
        let m = &u_kron * id.matrix.raw() * u_kron.adjoint();
        let choi = ChoiMatrix::new((2, 2), HermitianMatrix::new(m).unwrap()).unwrap();
        assert!(!delta_commuting_check(&choi, &th).unwrap());
    }

    #[test]
    fn no_rdm_error_for_real_qm() {
        let th = build_theory(&TheorySpec::RealQm { dim: 2 }).unwrap();
        let choi = ChoiMatrix::identity(2);
        assert!(matches!(delta_commuting_check(&choi, &th), Err(Error::NoRdm)));
    }

    #[test]
    fn apply_delta_projects_onto_v() {
        let th = build_theory(&TheorySpec::Coherence { dim: 2 }).unwrap();
        let delta = rdm(&th).unwrap().delta_choi.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(2, &mut rng);
        let out = apply_delta(&delta, rho.matrix()).unwrap();
        // dephasing keeps the diagonal
        for j in 0..2 {
            assert_abs_diff_eq!(out.raw()[(j, j)].re, rho.matrix().raw()[(j, j)].re, epsilon = 1e-10);
        }
        assert!(out.raw()[(0, 1)].norm() < 1e-10);
    }
}
