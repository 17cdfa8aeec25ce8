//! Primal-dual path-following interior-point method over a block-diagonal
//! real symmetric cone with additional free primal variables.
//!
//! Standard form:
//!
//! ```text
//! minimize    Σ_b ⟨C_b, X_b⟩ + c_fᵀ f
//! subject to  Σ_b ⟨A_{i,b}, X_b⟩ + F_{i,·} f = b_i     (i = 1..m)
//!             X_b ⪰ 0,  f free
//! ```
//!
//! The search direction is the HKM direction with Mehrotra
//! predictor-corrector; the Schur complement is assembled densely and the
//! augmented system (Schur block plus free-variable coupling) is solved by
//! LU. Problems in this repo stay below a few hundred constraint rows and
//! block orders of a few dozen, where dense assembly is the robust choice.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Block-diagonal symmetric matrix, stored as dense blocks.
#[derive(Debug, Clone)]
pub struct BlockVec {
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockVec {
    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&d| DMatrix::zeros(d, d)).collect(),
        }
    }

    pub fn scaled_identity(dims: &[usize], s: f64) -> Self {
        Self {
            blocks: dims
                .iter()
                .map(|&d| DMatrix::identity(d, d) * s)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * alpha;
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    fn symmetrize(&mut self) {
        for b in &mut self.blocks {
            let t = b.transpose();
            *b += t;
            *b *= 0.5;
        }
    }

    /// Smallest eigenvalue across blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                if b.nrows() == 0 {
                    f64::INFINITY
                } else {
                    nalgebra::SymmetricEigen::new(b.clone())
                        .eigenvalues
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min)
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// One problem instance in real standard form.
#[derive(Debug, Clone)]
pub struct RealSdp {
    pub block_dims: Vec<usize>,
    /// Objective coefficients on the cone part.
    pub c: BlockVec,
    /// Objective coefficients on the free part (may be empty).
    pub c_free: DVector<f64>,
    /// One `BlockVec` per constraint row.
    pub a: Vec<BlockVec>,
    /// m×p free-variable coefficients.
    pub f: DMatrix<f64>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct RealSolution {
    pub status: IpmStatus,
    pub x: BlockVec,
    pub free: DVector<f64>,
    pub y: DVector<f64>,
    pub s: BlockVec,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 200;
const CONV_TOL: f64 = 1e-9;
const STEP_FRACTION: f64 = 0.98;

struct Workspace {
    n_cone: f64,
}

/// Row-reduces the constraint system, dropping dependent rows. A dependent
/// row whose right-hand side is inconsistent proves primal infeasibility.
/// Returns indices of the kept rows, or None on inconsistency.
fn independent_rows(prob: &RealSdp) -> Option<Vec<usize>> {
    let m = prob.b.len();
    // vectorize each row: upper triangles of all blocks plus free coefficients
    let row_len: usize = prob.block_dims.iter().map(|&d| d * (d + 1) / 2).sum::<usize>() + prob.f.ncols();
    let mut kept: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut kept_idx = Vec::new();
    for i in 0..m {
        let mut v = DVector::zeros(row_len);
        let mut off = 0;
        for blk in &prob.a[i].blocks {
            let d = blk.nrows();
            for r in 0..d {
                for c in r..d {
                    // off-diagonal entries weighted by √2 to preserve norms
                    let w = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
                    v[off] = blk[(r, c)] * w;
                    off += 1;
                }
            }
        }
        for j in 0..prob.f.ncols() {
            v[off] = prob.f[(i, j)];
            off += 1;
        }
        let mut rhs = prob.b[i];
        let scale = v.norm().max(rhs.abs()).max(1.0);
        for (u, urhs) in &kept {
            let coef = v.dot(u);
            v.axpy(-coef, u, 1.0);
            rhs -= coef * urhs;
        }
        let res = v.norm();
        if res > 1e-9 * scale {
            v /= res;
            rhs /= res;
            kept.push((v, rhs));
            kept_idx.push(i);
        } else if rhs.abs() > 1e-7 * scale {
            return None;
        }
    }
    Some(kept_idx)
}

/// Largest α with X + α·dX ⪰ 0, given a Cholesky factor L of X.
fn max_step(chols: &[nalgebra::Cholesky<f64, nalgebra::Dyn>], dx: &BlockVec) -> f64 {
    let mut alpha = f64::INFINITY;
    for (chol, d) in chols.iter().zip(&dx.blocks) {
        if d.nrows() == 0 {
            continue;
        }
        let l = chol.l();
        // Z = L⁻¹ dX L⁻ᵀ, same inertia condition as X + α dX ⪰ 0
        let w = l.solve_lower_triangular(d).expect("triangular solve");
        let z = l
            .solve_lower_triangular(&w.transpose())
            .expect("triangular solve");
        let zs = (&z + z.transpose()) * 0.5;
        let lam = nalgebra::SymmetricEigen::new(zs)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

fn cholesky_blocks(x: &BlockVec) -> Option<Vec<nalgebra::Cholesky<f64, nalgebra::Dyn>>> {
    x.blocks
        .iter()
        .map(|b| nalgebra::Cholesky::new(b.clone()))
        .collect()
}

fn block_inverse(chols: &[nalgebra::Cholesky<f64, nalgebra::Dyn>]) -> BlockVec {
    BlockVec {
        blocks: chols.iter().map(|c| c.inverse()).collect(),
    }
}

/// Solves the instance. Rows of the constraint system may be linearly
/// dependent; consistent duplicates are dropped (their multipliers return
/// as zero) and inconsistent ones yield `PrimalInfeasible`.
pub fn solve_real(prob: &RealSdp) -> Result<RealSolution> {
    let p = prob.f.ncols();
    debug_assert_eq!(prob.c_free.len(), p);
    debug_assert_eq!(prob.a.len(), prob.b.len());

    let kept = match independent_rows(prob) {
        Some(k) => k,
        None => {
            return Ok(RealSolution {
                status: IpmStatus::PrimalInfeasible,
                x: BlockVec::zeros(&prob.block_dims),
                free: DVector::zeros(p),
                y: DVector::zeros(prob.b.len()),
                s: BlockVec::zeros(&prob.block_dims),
                primal_objective: f64::INFINITY,
                dual_objective: f64::NEG_INFINITY,
                iterations: 0,
            })
        }
    };
    if kept.is_empty() {
        return Err(Error::InvalidInput(
            "SDP with no independent constraints".into(),
        ));
    }

    let reduced = RealSdp {
        block_dims: prob.block_dims.clone(),
        c: prob.c.clone(),
        c_free: prob.c_free.clone(),
        a: kept.iter().map(|&i| prob.a[i].clone()).collect(),
        f: DMatrix::from_fn(kept.len(), p, |r, c| prob.f[(kept[r], c)]),
        b: DVector::from_fn(kept.len(), |r, _| prob.b[kept[r]]),
    };
    let mut sol = solve_reduced(&reduced)?;
    // scatter multipliers back to the original row order
    let mut y = DVector::zeros(prob.b.len());
    for (r, &i) in kept.iter().enumerate() {
        y[i] = sol.y[r];
    }
    sol.y = y;
    Ok(sol)
}

fn solve_reduced(prob: &RealSdp) -> Result<RealSolution> {
    let dims = &prob.block_dims;
    let m = prob.b.len();
    let p = prob.f.ncols();
    let ws = Workspace { n_cone: dims.iter().sum::<usize>() as f64 };

    // initial point: scaled identities sized to the data
    let data_scale = prob
        .a
        .iter()
        .map(|a| a.norm())
        .fold(prob.c.norm(), f64::max)
        .max(prob.b.norm())
        .max(1.0);
    let mut x = BlockVec::scaled_identity(dims, data_scale.sqrt().max(1.0) * 10.0);
    let mut s = BlockVec::scaled_identity(dims, data_scale.sqrt().max(1.0) * 10.0);
    let mut y: DVector<f64> = DVector::zeros(m);
    let mut fr: DVector<f64> = DVector::zeros(p);

    let b_norm = prob.b.norm().max(1.0);
    let c_norm = prob.c.norm().max(prob.c_free.norm()).max(1.0);

    let mut best: Option<RealSolution> = None;

    for iter in 0..MAX_ITER {
        // residuals
        let mut rp = prob.b.clone();
        for i in 0..m {
            rp[i] -= prob.a[i].dot(&x);
        }
        if p > 0 {
            rp -= &prob.f * &fr;
        }
        let mut rd = prob.c.clone();
        rd.axpy(-1.0, &s);
        for i in 0..m {
            rd.axpy(-y[i], &prob.a[i]);
        }
        let rf = &prob.c_free - prob.f.transpose() * &y;

        let pobj = prob.c.dot(&x) + prob.c_free.dot(&fr);
        let dobj = prob.b.dot(&y);
        let mu = x.dot(&s) / ws.n_cone;

        let pinf = rp.norm() / b_norm;
        let dinf = (rd.norm() + rf.norm()) / c_norm;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        let current = RealSolution {
            status: IpmStatus::Optimal,
            x: x.clone(),
            free: fr.clone(),
            y: y.clone(),
            s: s.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            iterations: iter,
        };
        if pinf < CONV_TOL && dinf < CONV_TOL && gap < CONV_TOL {
            return Ok(current);
        }
        // infeasibility heuristics: diverging multipliers with an improving
        // dual objective signal primal infeasibility, and vice versa
        let y_scale = y.norm().max(fr.norm());
        if y_scale > 1e9 * b_norm && dobj > 1e6 * c_norm && (rd.norm() + rf.norm()) / y_scale < 1e-8 {
            return Ok(RealSolution {
                status: IpmStatus::PrimalInfeasible,
                ..current
            });
        }
        if x.norm() > 1e9 * data_scale && pobj < -1e6 * b_norm && rp.norm() / x.norm() < 1e-8 {
            return Ok(RealSolution {
                status: IpmStatus::DualInfeasible,
                ..current
            });
        }
        best = Some(current);

        let s_chol = match cholesky_blocks(&s) {
            Some(c) => c,
            None => break,
        };
        let x_chol = match cholesky_blocks(&x) {
            Some(c) => c,
            None => break,
        };
        let s_inv = block_inverse(&s_chol);

        // Schur complement M_ij = Σ_b Tr[A_i X A_j S⁻¹]
        let w: Vec<BlockVec> = (0..m)
            .map(|j| BlockVec {
                blocks: (0..dims.len())
                    .map(|bi| &x.blocks[bi] * &prob.a[j].blocks[bi] * &s_inv.blocks[bi])
                    .collect(),
            })
            .collect();
        let mut k = DMatrix::zeros(m + p, m + p);
        for j in 0..m {
            for i in 0..=j {
                let v = prob.a[i].dot(&w[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        for i in 0..m {
            for q in 0..p {
                k[(i, m + q)] = prob.f[(i, q)];
                k[(m + q, i)] = prob.f[(i, q)];
            }
        }
        // tiny regularization keeps the LU factor well defined near the
        // optimum without moving the solution at the 1e-9 scale
        for i in 0..m {
            k[(i, i)] += 1e-13 * (1.0 + k[(i, i)].abs());
        }
        for q in 0..p {
            k[(m + q, m + q)] -= 1e-13;
        }
        let lu = nalgebra::LU::new(k);

        let solve_direction = |rc: &BlockVec| -> Option<(BlockVec, DVector<f64>, DVector<f64>, BlockVec)> {
            // h_i = Σ_b ⟨A_i, (Rc − X·Rd) S⁻¹⟩
            let g = BlockVec {
                blocks: (0..dims.len())
                    .map(|bi| {
                        (&rc.blocks[bi] - &x.blocks[bi] * &rd.blocks[bi]) * &s_inv.blocks[bi]
                    })
                    .collect(),
            };
            let mut rhs = DVector::zeros(m + p);
            for i in 0..m {
                rhs[i] = rp[i] - prob.a[i].dot(&g);
            }
            for q in 0..p {
                rhs[m + q] = rf[q];
            }
            let sol = lu.solve(&rhs)?;
            let dy = DVector::from_fn(m, |i, _| sol[i]);
            let df = DVector::from_fn(p, |q, _| sol[m + q]);
            let mut ds = rd.clone();
            for i in 0..m {
                ds.axpy(-dy[i], &prob.a[i]);
            }
            ds.symmetrize();
            let mut dx = BlockVec {
                blocks: (0..dims.len())
                    .map(|bi| {
                        (&rc.blocks[bi] - &x.blocks[bi] * &ds.blocks[bi]) * &s_inv.blocks[bi]
                    })
                    .collect(),
            };
            dx.symmetrize();
            Some((dx, dy, df, ds))
        };

        // predictor (affine scaling)
        let rc_aff = BlockVec {
            blocks: (0..dims.len())
                .map(|bi| -(&x.blocks[bi] * &s.blocks[bi]))
                .collect(),
        };
        let (dxa, _dya, _dfa, dsa) = match solve_direction(&rc_aff) {
            Some(d) => d,
            None => break,
        };
        let ap_aff = max_step(&x_chol, &dxa).min(1.0);
        let ad_aff = max_step(&s_chol, &dsa).min(1.0);
        let mut xa = x.clone();
        xa.axpy(ap_aff, &dxa);
        let mut sa = s.clone();
        sa.axpy(ad_aff, &dsa);
        let mu_aff = xa.dot(&sa) / ws.n_cone;
        let sigma = ((mu_aff / mu).max(0.0).powi(3)).clamp(1e-10, 1.0);

        // corrector
        let rc = BlockVec {
            blocks: (0..dims.len())
                .map(|bi| {
                    let mut blk = -(&x.blocks[bi] * &s.blocks[bi]);
                    blk -= &dxa.blocks[bi] * &dsa.blocks[bi];
                    for r in 0..blk.nrows() {
                        blk[(r, r)] += sigma * mu;
                    }
                    blk
                })
                .collect(),
        };
        let (dx, dy, df, ds) = match solve_direction(&rc) {
            Some(d) => d,
            None => break,
        };
        let ap = (STEP_FRACTION * max_step(&x_chol, &dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&s_chol, &ds)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        x.axpy(ap, &dx);
        fr += df * ap;
        y += dy * ad;
        s.axpy(ad, &ds);
    }

    // no convergence: surface the best iterate with relaxed acceptance, so
    // decision layers (which work at 1e-6/1e-7) can still use good iterates
    if let Some(bst) = best {
        let mut rp = prob.b.clone();
        for i in 0..m {
            rp[i] -= prob.a[i].dot(&bst.x);
        }
        if p > 0 {
            rp -= &prob.f * &bst.free;
        }
        let gap = (bst.primal_objective - bst.dual_objective).abs()
            / (1.0 + bst.primal_objective.abs() + bst.dual_objective.abs());
        if rp.norm() / b_norm < 1e-7 && gap < 1e-7 {
            return Ok(RealSolution {
                status: IpmStatus::Optimal,
                ..bst
            });
        }
        return Ok(RealSolution {
            status: IpmStatus::NumericalFailure,
            ..bst
        });
    }
    Err(Error::NumericalFailure("interior-point method made no progress".into()))
}
