//! Independent brute-force ground truth used by the acceptance suite:
//! majorization, thermo-majorization Lorenz curves, the classical
//! stochastic-map LP, and Helstrom discrimination. Everything here is
//! deliberately elementary so the heavyweight SDP machinery can be checked
//! against closed-form or combinatorial answers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitian::DensityMatrix;
use crate::sdp;

/// Piecewise-linear Lorenz curve of a probability vector against a Gibbs
/// weight vector: cumulative probability over cumulative weight, sorted by
/// decreasing slope p_i/γ_i.
#[derive(Debug, Clone)]
pub struct LorenzCurve {
    /// Breakpoints (x, y), starting at (0,0) and ending at (1,1).
    pub points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn new(p: &[f64], gamma: &[f64]) -> Result<Self> {
        check_distribution(p)?;
        check_distribution(gamma)?;
        if p.len() != gamma.len() {
            return Err(Error::Dimension { expected: p.len(), got: gamma.len() });
        }
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| {
            (p[j] / gamma[j]).partial_cmp(&(p[i] / gamma[i])).unwrap()
        });
        let mut points = vec![(0.0, 0.0)];
        let (mut x, mut y) = (0.0, 0.0);
        for &i in &order {
            x += gamma[i];
            y += p[i];
            points.push((x, y));
        }
        // close the curve exactly despite rounding
        let last = points.last_mut().unwrap();
        *last = (1.0, 1.0);
        Ok(Self { points })
    }

    /// Height of the (concave, piecewise-linear) curve at x ∈ [0,1].
    pub fn at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x <= x1 {
                if x1 - x0 <= f64::EPSILON {
                    return y1.max(y0);
                }
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        1.0
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| x < -1e-12) {
        return Err(Error::InvalidInput("negative probability entry".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// True iff p majorizes q: every partial sum of the descending-sorted p
/// dominates the corresponding partial sum of q, within 1e-10.
pub fn majorizes(p: &[f64], q: &[f64]) -> Result<bool> {
    check_distribution(p)?;
    check_distribution(q)?;
    if p.len() != q.len() {
        return Err(Error::Dimension { expected: p.len(), got: q.len() });
    }
    let mut ps = p.to_vec();
    let mut qs = q.to_vec();
    ps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    qs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (mut cp, mut cq) = (0.0, 0.0);
    for (a, b) in ps.iter().zip(&qs) {
        cp += a;
        cq += b;
        if cp < cq - 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff (p, γ_in) thermo-majorizes (q, γ_out): the Lorenz curve of the
/// input lies on or above that of the output at every breakpoint of either
/// curve (exact for piecewise-linear concave curves).
pub fn thermo_majorizes(p: &[f64], gamma_in: &[f64], q: &[f64], gamma_out: &[f64]) -> Result<bool> {
    let lp = LorenzCurve::new(p, gamma_in)?;
    let lq = LorenzCurve::new(q, gamma_out)?;
    let mut xs: Vec<f64> = lp.points.iter().chain(&lq.points).map(|&(x, _)| x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(xs.iter().all(|&x| lp.at(x) >= lq.at(x) - 1e-9))
}

/// LP feasibility of a column-stochastic S ≥ 0 with Sp = q and
/// Sγ_in = γ_out; the classical counterpart of the channel conversion SDP.
pub fn classical_conversion_lp(
    p: &[f64],
    gamma_in: &[f64],
    q: &[f64],
    gamma_out: &[f64],
) -> Result<bool> {
    check_distribution(p)?;
    check_distribution(gamma_in)?;
    check_distribution(q)?;
    check_distribution(gamma_out)?;
    let n_in = p.len();
    let n_out = q.len();
    if gamma_in.len() != n_in || gamma_out.len() != n_out {
        return Err(Error::Dimension { expected: n_in, got: gamma_in.len() });
    }
    // variables: S[i][j] ≥ 0, row-major; equalities: Sp = q, Sγ_in = γ_out,
    // column sums 1
    let nv = n_out * n_in;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n_out {
        let mut row = vec![0.0; nv];
        for j in 0..n_in {
            row[i * n_in + j] = p[j];
        }
        rows.push(row);
        rhs.push(q[i]);
    }
    for i in 0..n_out {
        let mut row = vec![0.0; nv];
        for j in 0..n_in {
            row[i * n_in + j] = gamma_in[j];
        }
        rows.push(row);
        rhs.push(gamma_out[i]);
    }
    for j in 0..n_in {
        let mut row = vec![0.0; nv];
        for i in 0..n_out {
            row[i * n_in + j] = 1.0;
        }
        rows.push(row);
        rhs.push(1.0);
    }
    let a = DMatrix::from_fn(rows.len(), nv, |r, c| rows[r][c]);
    let b = DVector::from_vec(rhs);
    Ok(sdp::lp_feasibility(&a, &b)?.is_some())
}

/// Optimal success probability for discriminating ρ₀ (prior weight) from
/// ρ₁: ½(1 + ‖prior·ρ₀ − (1−prior)·ρ₁‖₁).
pub fn helstrom(prior: f64, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidInput(format!("prior {prior} outside [0,1]")));
    }
    if rho0.dim() != rho1.dim() {
        return Err(Error::Dimension { expected: rho0.dim(), got: rho1.dim() });
    }
    let diff = rho0.matrix().scale(prior).sub(&rho1.matrix().scale(1.0 - prior));
    Ok(0.5 * (1.0 + diff.trace_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector as DV;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn majorization_basics() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]).unwrap());
        assert!(!majorizes(&[0.5, 0.5], &[1.0, 0.0]).unwrap());
        assert!(majorizes(&[0.9, 0.1], &[0.7, 0.3]).unwrap());
        assert!(majorizes(&[0.5, 0.5], &[0.5, 0.5]).unwrap());
    }

    #[test]
    fn lorenz_curve_shape() {
        let c = LorenzCurve::new(&[0.7, 0.3], &[0.25, 0.75]).unwrap();
        // slopes 0.7/0.25 = 2.8 then 0.3/0.75 = 0.4
        assert_eq!(c.points, vec![(0.0, 0.0), (0.25, 0.7), (1.0, 1.0)]);
        assert_abs_diff_eq!(c.at(0.125), 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(c.at(0.25), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn thermo_majorization_free_to_free() {
        let g = [0.75, 0.25];
        assert!(thermo_majorizes(&g, &g, &g, &g).unwrap());
    }

    #[test]
    fn thermo_majorization_uniform_reduces_to_majorization() {
        let u = [0.5, 0.5];
        assert!(thermo_majorizes(&[0.9, 0.1], &u, &[0.7, 0.3], &u).unwrap());
        assert!(!thermo_majorizes(&[0.7, 0.3], &u, &[0.9, 0.1], &u).unwrap());
    }

    #[test]
    fn thermo_majorization_hand_computed_counterexample() {
        // ground state vs excited state against γ = (¾, ¼): the excited
        // state's Lorenz curve rises faster, so |0⟩ does not reach |1⟩
        let g = [0.75, 0.25];
        assert!(!thermo_majorizes(&[1.0, 0.0], &g, &[0.0, 1.0], &g).unwrap());
        // the reverse direction holds: excited thermo-majorizes ground
        assert!(thermo_majorizes(&[0.0, 1.0], &g, &[1.0, 0.0], &g).unwrap());
    }

    #[test]
    fn classical_lp_rank_one_target() {
        let g_in = [0.75, 0.25];
        let g_out = [0.6, 0.4];
        // mapping everything to γ_out is the replacement channel
        assert!(classical_conversion_lp(&[0.1, 0.9], &g_in, &g_out, &g_out).unwrap());
    }

    #[test]
    fn classical_lp_matches_majorization_at_uniform() {
        let u = [0.5, 0.5];
        assert!(classical_conversion_lp(&[0.9, 0.1], &u, &[0.7, 0.3], &u).unwrap());
        assert!(!classical_conversion_lp(&[0.7, 0.3], &u, &[0.9, 0.1], &u).unwrap());
    }

    fn random_distribution(rng: &mut impl Rng, d: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }

    #[test]
    fn lp_agrees_with_lorenz_curves_on_random_qutrits() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = random_distribution(&mut rng, 3);
            let q = random_distribution(&mut rng, 3);
            let g = random_distribution(&mut rng, 3);
            let a = thermo_majorizes(&p, &g, &q, &g).unwrap();
            let b = classical_conversion_lp(&p, &g, &q, &g).unwrap();
            assert_eq!(a, b, "p={p:?} q={q:?} g={g:?}");
        }
    }

    #[test]
    fn helstrom_no_information() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(helstrom(0.3, &rho, &rho).unwrap(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn helstrom_orthogonal_states() {
        let r0 = DensityMatrix::basis_state(2, 0);
        let r1 = DensityMatrix::basis_state(2, 1);
        assert_abs_diff_eq!(helstrom(0.5, &r0, &r1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn helstrom_zero_plus() {
        let r0 = DensityMatrix::basis_state(2, 0);
        let mut v = DV::zeros(2);
        v[0] = Complex64::new(1.0, 0.0);
        v[1] = Complex64::new(1.0, 0.0);
        let r1 = DensityMatrix::pure(&v);
        let expected = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        assert_abs_diff_eq!(helstrom(0.5, &r0, &r1).unwrap(), expected, epsilon = 1e-10);
    }
}
