//! Small dense semidefinite programming over Hermitian variables.
//!
//! Complex Hermitian blocks are realified into 2D×2D real symmetric blocks
//! and handed to the interior-point core in [`ipm`]; solutions are projected
//! back. The projection `(X + JXJᵀ)/2` with `J = [[0,−I],[I,0]]` commutes
//! with every realified constraint and preserves positive semidefiniteness,
//! so feasibility and objective values survive the round trip.

pub mod ipm;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitian::{standard_hermitian_basis, HermitianMatrix};
use crate::tol;

pub use ipm::IpmStatus;

/// One linear constraint over several Hermitian blocks plus free variables:
/// `Σ_b ⟨matrices[b], X_b⟩ + free·f = rhs`.
#[derive(Debug, Clone)]
pub struct HermConstraint {
    pub matrices: Vec<HermitianMatrix>,
    pub free: Vec<f64>,
    pub rhs: f64,
}

/// Multi-block Hermitian SDP in primal standard form (minimization),
/// the internal workhorse behind every solver entry point in the crate.
#[derive(Debug, Clone)]
pub struct HermSdp {
    pub block_dims: Vec<usize>,
    pub n_free: usize,
    pub objective: Vec<HermitianMatrix>,
    pub objective_free: Vec<f64>,
    pub constraints: Vec<HermConstraint>,
}

#[derive(Debug, Clone)]
pub struct HermSolution {
    pub status: IpmStatus,
    pub x: Vec<HermitianMatrix>,
    pub free: Vec<f64>,
    pub y: Vec<f64>,
    pub dual_slack: Vec<HermitianMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

impl HermSdp {
    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.block_dims.len() || self.objective_free.len() != self.n_free
        {
            return Err(Error::InvalidInput("objective shape mismatch".into()));
        }
        for (o, &d) in self.objective.iter().zip(&self.block_dims) {
            if o.dim() != d {
                return Err(Error::Dimension { expected: d, got: o.dim() });
            }
        }
        for c in &self.constraints {
            if c.matrices.len() != self.block_dims.len() || c.free.len() != self.n_free {
                return Err(Error::InvalidInput("constraint shape mismatch".into()));
            }
            for (m, &d) in c.matrices.iter().zip(&self.block_dims) {
                if m.dim() != d {
                    return Err(Error::Dimension { expected: d, got: m.dim() });
                }
            }
        }
        Ok(())
    }
}

/// Solves a multi-block Hermitian SDP. Realified inner products double, so
/// right-hand sides and the free objective are doubled on the way in and
/// every reported objective is halved on the way out; multipliers map
/// through unchanged.
pub fn solve_herm(prob: &HermSdp) -> Result<HermSolution> {
    prob.validate()?;
    let real_dims: Vec<usize> = prob.block_dims.iter().map(|&d| 2 * d).collect();
    let real = ipm::RealSdp {
        block_dims: real_dims,
        c: ipm::BlockVec {
            blocks: prob.objective.iter().map(|m| m.realify()).collect(),
        },
        c_free: DVector::from_fn(prob.n_free, |i, _| 2.0 * prob.objective_free[i]),
        a: prob
            .constraints
            .iter()
            .map(|c| ipm::BlockVec {
                blocks: c.matrices.iter().map(|m| m.realify()).collect(),
            })
            .collect(),
        f: DMatrix::from_fn(prob.constraints.len(), prob.n_free, |i, j| {
            2.0 * prob.constraints[i].free[j]
        }),
        b: DVector::from_fn(prob.constraints.len(), |i, _| 2.0 * prob.constraints[i].rhs),
    };
    let sol = ipm::solve_real(&real)?;
    Ok(HermSolution {
        status: sol.status,
        x: sol
            .x
            .blocks
            .iter()
            .map(HermitianMatrix::from_realified)
            .collect(),
        free: sol.free.iter().cloned().collect(),
        y: sol.y.iter().cloned().collect(),
        dual_slack: sol
            .s
            .blocks
            .iter()
            .map(HermitianMatrix::from_realified)
            .collect(),
        primal_objective: sol.primal_objective / 2.0,
        dual_objective: sol.dual_objective / 2.0,
        iterations: sol.iterations,
    })
}

/// Single-variable SDP: minimize ⟨C, X⟩ subject to ⟨A_i, X⟩ = b_i, X ⪰ 0.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub variable_dim: usize,
    pub objective: HermitianMatrix,
    pub constraints: Vec<(HermitianMatrix, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_x: HermitianMatrix,
    pub dual_y: Vec<f64>,
    pub objective_value: f64,
    pub gap: f64,
}

/// Solves a single-variable minimization SDP.
pub fn solve(problem: &SdpProblem) -> Result<SdpSolution> {
    let d = problem.variable_dim;
    if problem.objective.dim() != d {
        return Err(Error::Dimension { expected: d, got: problem.objective.dim() });
    }
    if problem.constraints.is_empty() && problem.objective.norm_hs() < 1e-14 {
        return Err(Error::InvalidInput("degenerate empty SDP".into()));
    }
    for (a, _) in &problem.constraints {
        if a.dim() != d {
            return Err(Error::Dimension { expected: d, got: a.dim() });
        }
    }
    let herm = HermSdp {
        block_dims: vec![d],
        n_free: 0,
        objective: vec![problem.objective.clone()],
        objective_free: vec![],
        constraints: problem
            .constraints
            .iter()
            .map(|(a, b)| HermConstraint {
                matrices: vec![a.clone()],
                free: vec![],
                rhs: *b,
            })
            .collect(),
    };
    let sol = solve_herm(&herm)?;
    let status = match sol.status {
        IpmStatus::Optimal => SdpStatus::Optimal,
        IpmStatus::PrimalInfeasible => SdpStatus::PrimalInfeasible,
        IpmStatus::DualInfeasible => SdpStatus::DualInfeasible,
        IpmStatus::NumericalFailure => SdpStatus::NumericalFailure,
    };
    Ok(SdpSolution {
        status,
        primal_x: sol.x.into_iter().next().unwrap(),
        dual_y: sol.y,
        objective_value: sol.primal_objective,
        gap: (sol.primal_objective - sol.dual_objective).abs(),
    })
}

/// Positive combination of constraint matrices proving that no nonzero PSD
/// matrix annihilates the whole family.
#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    pub coefficients: Vec<f64>,
    pub witness_matrix: HermitianMatrix,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub enum FeasibilityOutcome {
    Feasible(HermitianMatrix),
    Infeasible(FarkasCertificate),
}

/// True iff `Σ r_j H_j` recomputed from scratch is strictly positive
/// definite, with minimum eigenvalue above the certificate tolerance.
pub fn verify_certificate(cert: &FarkasCertificate, h: &[HermitianMatrix]) -> bool {
    if cert.coefficients.len() != h.len() || h.is_empty() {
        return false;
    }
    let mut g = HermitianMatrix::zeros(h[0].dim());
    for (r, hj) in cert.coefficients.iter().zip(h) {
        g = g.add(&hj.scale(*r));
    }
    g.min_eigenvalue() > tol::EPS_CERT
}

fn certificate_from(r: Vec<f64>, h: &[HermitianMatrix]) -> Option<FarkasCertificate> {
    let sup = r.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if sup < 1e-14 {
        return None;
    }
    let coefficients: Vec<f64> = r.iter().map(|v| v / sup).collect();
    let mut witness = HermitianMatrix::zeros(h[0].dim());
    for (c, hj) in coefficients.iter().zip(h) {
        witness = witness.add(&hj.scale(*c));
    }
    let margin = witness.min_eigenvalue();
    if margin > tol::EPS_CERT {
        Some(FarkasCertificate {
            coefficients,
            witness_matrix: witness,
            margin,
        })
    } else {
        None
    }
}

/// Least-squares coefficients expressing the identity in span{H_j}, if the
/// residual allows it. Catches families whose affine section Tr X = c is
/// outright empty.
fn identity_in_span(h: &[HermitianMatrix]) -> Option<Vec<f64>> {
    let n = h.len();
    let d = h[0].dim();
    let gram = DMatrix::from_fn(n, n, |j, k| h[j].inner(&h[k]));
    let rhs = DVector::from_fn(n, |j, _| h[j].trace());
    let svd = nalgebra::SVD::new(gram.clone(), true, true);
    let a = svd.solve(&rhs, 1e-12).ok()?;
    let mut rec = HermitianMatrix::zeros(d);
    for (aj, hj) in a.iter().zip(h) {
        rec = rec.add(&hj.scale(*aj));
    }
    let res = rec.sub(&HermitianMatrix::identity(d)).norm_hs();
    if res < 1e-9 * (d as f64).sqrt() {
        Some(a.iter().cloned().collect())
    } else {
        None
    }
}

/// Explicit fallback witness search: maximize s subject to
/// `Σ r_j H_j ⪰ s·I` and `Σ r_j Tr[H_j] = 1`, over free r and s.
fn witness_program(h: &[HermitianMatrix]) -> Result<Option<FarkasCertificate>> {
    let n = h.len();
    let d = h[0].dim();
    if h.iter().all(|m| m.trace().abs() < 1e-12) {
        // a trace-normalized positive combination needs a traceful element
        return Ok(None);
    }
    // free variables: r_1..r_n, s; one PSD block Z = Σ r_j H_j − s·I
    let basis = standard_hermitian_basis(d);
    let mut constraints: Vec<HermConstraint> = Vec::with_capacity(basis.len() + 1);
    for bk in &basis {
        let mut free = Vec::with_capacity(n + 1);
        for hj in h {
            free.push(-bk.inner(hj));
        }
        free.push(bk.trace());
        constraints.push(HermConstraint {
            matrices: vec![bk.clone()],
            free,
            rhs: 0.0,
        });
    }
    let mut trace_row = vec![0.0; n + 1];
    for (j, hj) in h.iter().enumerate() {
        trace_row[j] = hj.trace();
    }
    constraints.push(HermConstraint {
        matrices: vec![HermitianMatrix::zeros(d)],
        free: trace_row,
        rhs: 1.0,
    });
    let mut objective_free = vec![0.0; n + 1];
    objective_free[n] = -1.0;
    let prob = HermSdp {
        block_dims: vec![d],
        n_free: n + 1,
        objective: vec![HermitianMatrix::zeros(d)],
        objective_free,
        constraints,
    };
    let sol = solve_herm(&prob)?;
    if sol.status != IpmStatus::Optimal || sol.free[n] <= 0.0 {
        return Ok(None);
    }
    Ok(certificate_from(sol.free[..n].to_vec(), h))
}

/// Decides whether some nonzero PSD matrix annihilates every H_j, via the
/// auxiliary program `max t s.t. ⟨H_j, X⟩ = 0, Tr X = c, X ⪰ t·I`.
/// Infeasibility certificates come from the dual multipliers: at a
/// negative optimum `t*`, complementarity forces `−Σ y_j H_j ⪰ (−t*/c)·I`.
pub fn feasibility_homogeneous(h: &[HermitianMatrix], c: f64) -> Result<FeasibilityOutcome> {
    if h.is_empty() {
        return Err(Error::InvalidInput("empty constraint family".into()));
    }
    if c <= 0.0 {
        return Err(Error::InvalidInput("normalization must be positive".into()));
    }
    let d = h[0].dim();
    for m in h {
        if m.dim() != d {
            return Err(Error::Dimension { expected: d, got: m.dim() });
        }
    }

    // If I ∈ span{H_j}, the section Tr X = c of the solution set is empty
    // and the expansion coefficients are already a Farkas witness.
    if let Some(a) = identity_in_span(h) {
        if let Some(cert) = certificate_from(a, h) {
            return Ok(FeasibilityOutcome::Infeasible(cert));
        }
    }

    // max t: variable X' = X − t·I ⪰ 0 with t free
    let mut constraints: Vec<HermConstraint> = h
        .iter()
        .map(|hj| HermConstraint {
            matrices: vec![hj.clone()],
            free: vec![hj.trace()],
            rhs: 0.0,
        })
        .collect();
    constraints.push(HermConstraint {
        matrices: vec![HermitianMatrix::identity(d)],
        free: vec![d as f64],
        rhs: c,
    });
    let prob = HermSdp {
        block_dims: vec![d],
        n_free: 1,
        objective: vec![HermitianMatrix::zeros(d)],
        objective_free: vec![-1.0],
        constraints,
    };
    let sol = solve_herm(&prob)?;
    if sol.status == IpmStatus::PrimalInfeasible {
        // only reachable when I ∈ span{H_j} escaped the least-squares check
        if let Some(a) = identity_in_span(h) {
            if let Some(cert) = certificate_from(a, h) {
                return Ok(FeasibilityOutcome::Infeasible(cert));
            }
        }
        return Err(Error::NumericalFailure(
            "feasibility program inconsistent without an identity witness".into(),
        ));
    }
    if sol.status != IpmStatus::Optimal {
        // the max-t program can stall near its optimum; both outcomes are
        // verifiable from scratch, so check the stalled iterate directly
        // before giving up
        let t_stall = sol.free[0];
        if t_stall > 0.0 {
            let x0 = sol.x[0].add(&HermitianMatrix::identity(d).scale(t_stall));
            if let Some(x) = project_to_section(&x0, h, c) {
                return Ok(FeasibilityOutcome::Feasible(x));
            }
        }
        let r: Vec<f64> = sol.y[..h.len()].iter().map(|v| -v).collect();
        if let Some(cert) = certificate_from(r, h) {
            return Ok(FeasibilityOutcome::Infeasible(cert));
        }
        if let Some(cert) = witness_program(h)? {
            return Ok(FeasibilityOutcome::Infeasible(cert));
        }
        // neither side is certifiable: the instance sits on the boundary of
        // the feasible region, beyond the solver's resolving power
        return Err(Error::BoundaryAmbiguous { t_star: t_stall, margin: 0.0 });
    }
    let t_star = sol.free[0];
    if t_star >= -tol::EPS_FEAS {
        let mut x = sol.x[0].add(&HermitianMatrix::identity(d).scale(t_star));
        if t_star < 0.0 || x.min_eigenvalue() < 0.0 {
            // boundary solution: clip the spectrum, then restore the trace
            x = x.spectral_map(|l| l.max(0.0));
        }
        let tr = x.trace();
        if tr > 1e-12 {
            x = x.scale(c / tr);
        }
        return Ok(FeasibilityOutcome::Feasible(x));
    }

    // infeasible: dual multipliers of the H_j rows give the witness
    let r: Vec<f64> = sol.y[..h.len()].iter().map(|v| -v).collect();
    if let Some(cert) = certificate_from(r, h) {
        return Ok(FeasibilityOutcome::Infeasible(cert));
    }
    if let Some(cert) = witness_program(h)? {
        return Ok(FeasibilityOutcome::Infeasible(cert));
    }
    if t_star > -10.0 * tol::EPS_FEAS {
        return Err(Error::BoundaryAmbiguous {
            t_star,
            margin: 0.0,
        });
    }
    Err(Error::NumericalFailure(format!(
        "no certificate found despite t* = {t_star:.3e}"
    )))
}

/// Least-squares correction pulling `x0` back onto the affine section
/// `⟨H_j, X⟩ = 0, Tr X = c`; accepted only when the corrected point passes
/// the feasibility checks from scratch.
fn project_to_section(
    x0: &HermitianMatrix,
    h: &[HermitianMatrix],
    c: f64,
) -> Option<HermitianMatrix> {
    let d = x0.dim();
    let mut family: Vec<HermitianMatrix> = h.to_vec();
    family.push(HermitianMatrix::identity(d));
    let n = family.len();
    let gram = nalgebra::SVD::new(
        DMatrix::from_fn(n, n, |j, k| family[j].inner(&family[k])),
        true,
        true,
    );
    let project = |y: &HermitianMatrix| -> Option<HermitianMatrix> {
        let mut rhs = DVector::from_fn(n, |j, _| -family[j].inner(y));
        rhs[n - 1] += c;
        let alpha = gram.solve(&rhs, 1e-12).ok()?;
        let mut x = y.clone();
        for (a, v) in alpha.iter().zip(&family) {
            x = x.add(&v.scale(*a));
        }
        Some(x)
    };
    // alternating projections onto the PSD cone and the affine section
    // polish boundary solutions the interior-point iterate only approaches
    let mut x = project(x0)?;
    for _ in 0..200 {
        if x.min_eigenvalue() >= -tol::EPS_PSD {
            break;
        }
        x = project(&x.spectral_map(|l| l.max(0.0)))?;
    }
    let residual = h.iter().map(|hj| hj.inner(&x).abs()).fold(0.0f64, f64::max);
    if residual <= tol::EPS_FEAS && x.min_eigenvalue() >= -tol::EPS_PSD {
        Some(x)
    } else {
        None
    }
}

/// Phase-1 feasibility for `A x = b, x ≥ 0`, run as a pure LP on the
/// interior-point core with 1×1 blocks: minimize the total slack
/// `Σ (u_i + v_i)` in `A x + u − v = b`. Returns a feasible `x` when the
/// optimal slack vanishes, `None` when it stays positive.
pub fn lp_feasibility(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Option<DVector<f64>>> {
    let m = a.nrows();
    let n = a.ncols();
    if b.len() != m {
        return Err(Error::Dimension { expected: m, got: b.len() });
    }
    let dims = vec![1usize; n + 2 * m];
    let mut c = ipm::BlockVec::zeros(&dims);
    for i in 0..2 * m {
        c.blocks[n + i][(0, 0)] = 1.0;
    }
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = ipm::BlockVec::zeros(&dims);
        for j in 0..n {
            row.blocks[j][(0, 0)] = a[(i, j)];
        }
        row.blocks[n + i][(0, 0)] = 1.0;
        row.blocks[n + m + i][(0, 0)] = -1.0;
        rows.push(row);
    }
    let prob = ipm::RealSdp {
        block_dims: dims,
        c,
        c_free: DVector::zeros(0),
        a: rows,
        f: DMatrix::zeros(m, 0),
        b: b.clone(),
    };
    let sol = ipm::solve_real(&prob)?;
    let scale = b.amax().max(1.0);
    let x = DVector::from_fn(n, |j, _| sol.x.blocks[j][(0, 0)].max(0.0));
    if sol.status != IpmStatus::Optimal {
        // the LP stalls at near-ties; polish by alternating projections
        // between {A x = b} and the nonnegative orthant, then classify the
        // instance from the verified outcome
        let svd = nalgebra::SVD::new(a.clone(), true, true);
        let mut x = x;
        for _ in 0..200 {
            let residual = b - a * &x;
            if residual.amax() <= 1e-9 * scale && x.min() >= 0.0 {
                return Ok(Some(x));
            }
            if let Ok(step) = svd.solve(&residual, 1e-12) {
                x += step;
            } else {
                break;
            }
            x.apply(|v| *v = v.max(0.0));
        }
        let residual = (b - a * &x).amax();
        if residual <= 1e-9 * scale {
            return Ok(Some(x));
        }
        if sol.primal_objective > 1e-6 * scale || residual > 1e-6 * scale {
            return Ok(None);
        }
        return Err(Error::NumericalFailure("phase-1 LP did not converge".into()));
    }
    if sol.primal_objective <= 1e-7 * scale {
        Ok(Some(x))
    } else {
        Ok(None)
    }
}
