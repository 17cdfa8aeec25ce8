//! Dense complex linear algebra over the real vector space of d×d
//! Hermitian matrices, with the Hilbert–Schmidt inner product
//! `⟨A,B⟩ = Tr[AB]` (real for Hermitian A, B).
//!
//! Everything downstream — states, observables, Choi matrices — is carried
//! by [`HermitianMatrix`]. Eigenvalue work is routed through the realified
//! 2d×2d symmetric embedding so a single backward-stable real symmetric
//! eigensolver serves the whole crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// A d×d complex matrix with the Hermiticity invariant enforced at
/// construction. Values are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Builds from a raw complex matrix, verifying `M = M†` within 1e-12.
    /// The stored matrix is exactly symmetrized so later arithmetic cannot
    /// re-introduce asymmetry drift.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let mut residual = 0.0f64;
        for j in 0..mat.nrows() {
            for k in 0..=j {
                let delta = (mat[(j, k)] - mat[(k, j)].conj()).norm();
                residual = residual.max(delta);
            }
        }
        let scale = mat.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1.0);
        if residual > tol::EPS_HERM * scale {
            return Err(Error::NotHermitian { residual });
        }
        let sym = Self::symmetrize(mat);
        Ok(Self { mat: sym })
    }

    fn symmetrize(mat: DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = mat.nrows();
        DMatrix::from_fn(d, d, |j, k| {
            let a = mat[(j, k)];
            let b = mat[(k, j)].conj();
            (a + b) * Complex64::new(0.5, 0.0)
        })
    }

    /// Hermitian part of an arbitrary complex matrix, `(M + M†)/2`.
    pub fn hermitian_part(mat: &DMatrix<Complex64>) -> Self {
        Self {
            mat: Self::symmetrize(mat.clone()),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self {
            mat: DMatrix::from_fn(d, d, |j, k| {
                if j == k {
                    Complex64::new(diag[j], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Real symmetric input (imaginary part zero). Symmetry is checked.
    pub fn from_real(mat: DMatrix<f64>) -> Result<Self> {
        Self::new(mat.map(|x| Complex64::new(x, 0.0)))
    }

    /// Rank-one projector |v⟩⟨v| / ⟨v|v⟩.
    pub fn projector(v: &DVector<Complex64>) -> Self {
        let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let d = v.len();
        Self {
            mat: DMatrix::from_fn(d, d, |j, k| v[j] * v[k].conj() / norm2),
        }
    }

    /// Computational basis projector |j⟩⟨j|.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.mat[(j, k)]
    }

    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Tr[M], real by Hermiticity.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.mat[(j, j)].re).sum()
    }

    /// Hilbert–Schmidt inner product Tr[AB], real for Hermitian A, B.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                // Tr[AB] = sum_{jk} A_{jk} B_{kj} = sum_{jk} A_{jk} conj(B_{jk})
                acc += (self.mat[(j, k)] * other.mat[(j, k)].conj()).re;
            }
        }
        acc
    }

    pub fn norm_hs(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.map(|c| c * s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    /// Entrywise transpose; equals the entrywise conjugate by Hermiticity.
    pub fn transpose(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
        }
    }

    /// Kronecker product; `(A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Hermitian conjugation sandwich `S M S†` for Hermitian `S` (so `S† = S`).
    pub fn sandwich(&self, s: &Self) -> Self {
        let prod = &s.mat * &self.mat * &s.mat;
        Self::hermitian_part(&prod)
    }

    /// Realified embedding `[[Re, -Im], [Im, Re]]`: a 2d×2d real symmetric
    /// matrix whose spectrum is that of `self` with every eigenvalue doubled
    /// in multiplicity.
    pub fn realify(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        for j in 0..d {
            for k in 0..d {
                let c = self.mat[(j, k)];
                out[(j, k)] = c.re;
                out[(j + d, k + d)] = c.re;
                out[(j, k + d)] = -c.im;
                out[(j + d, k)] = c.im;
            }
        }
        out
    }

    /// Inverse of [`Self::realify`] composed with the orthogonal projection
    /// onto the realified subspace. For `R = realify(H)` this returns `H`
    /// exactly; for arbitrary symmetric input it returns the Hermitian matrix
    /// whose realification is closest in Frobenius norm.
    pub fn from_realified(m: &DMatrix<f64>) -> Self {
        let d2 = m.nrows();
        debug_assert_eq!(d2 % 2, 0);
        let d = d2 / 2;
        let mat = DMatrix::from_fn(d, d, |j, k| {
            let re = 0.5 * (m[(j, k)] + m[(j + d, k + d)]);
            let im = 0.5 * (m[(j + d, k)] - m[(j, k + d)]);
            Complex64::new(re, im)
        });
        Self::hermitian_part(&mat)
    }

    /// Eigendecomposition: ascending real eigenvalues with a complex
    /// orthonormal eigenbasis. Cyclic Jacobi on the complex matrix; unlike
    /// routing through the realified doubled problem, this keeps degenerate
    /// eigenspaces well-behaved (no eigenvalue-pair bookkeeping).
    pub fn eigh(&self) -> (Vec<f64>, Vec<DVector<Complex64>>) {
        let d = self.dim();
        if d == 0 {
            return (vec![], vec![]);
        }
        let mut a = self.mat.clone();
        let mut v: DMatrix<Complex64> = DMatrix::identity(d, d);
        let scale = self.norm_hs().max(1.0);
        for _sweep in 0..100 {
            let off: f64 = (0..d)
                .flat_map(|p| (0..d).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-14 * scale {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a[(p, q)];
                    let b = apq.norm();
                    if b <= 1e-300 {
                        continue;
                    }
                    let u = apq / b;
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G touches columns p, q: G[p,p]=c, G[p,q]=s·u,
                    // G[q,p]=−s·ū, G[q,q]=c; a ← Gᴴ a G, v ← v G
                    for i in 0..d {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c - aiq * s * u.conj();
                        a[(i, q)] = aip * s * u + aiq * c;
                    }
                    for i in 0..d {
                        let api = a[(p, i)];
                        let aqi = a[(q, i)];
                        a[(p, i)] = api * c - aqi * s * u;
                        a[(q, i)] = api * s * u.conj() + aqi * c;
                    }
                    for i in 0..d {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * c - viq * s * u.conj();
                        v[(i, q)] = vip * s * u + viq * c;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let vals = order.iter().map(|&i| a[(i, i)].re).collect();
        let vecs = order.iter().map(|&i| v.column(i).clone_owned()).collect();
        (vals, vecs)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.realify());
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.realify());
        eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trace norm ‖M‖₁ = Σ|λᵢ|.
    pub fn trace_norm(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.realify());
        eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0
    }

    /// Spectral function f applied on the eigenvalues, `V f(Λ) V†`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.eigh();
        let d = self.dim();
        let mut mat = DMatrix::zeros(d, d);
        for (lam, v) in vals.iter().zip(vecs.iter()) {
            let fl = f(*lam);
            if fl != 0.0 {
                for j in 0..d {
                    for k in 0..d {
                        mat[(j, k)] += v[j] * v[k].conj() * fl;
                    }
                }
            }
        }
        Self::hermitian_part(&mat)
    }

    /// PSD square root on the support (eigenvalues below `cut` are dropped).
    pub fn sqrt_psd(&self, cut: f64) -> Self {
        self.spectral_map(|l| if l > cut { l.sqrt() } else { 0.0 })
    }

    /// Pseudo-inverse square root on the support.
    pub fn inv_sqrt_psd(&self, cut: f64) -> Self {
        self.spectral_map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 })
    }

    /// Orthogonal projector onto the support (eigenvalues above `cut`).
    pub fn support_projector(&self, cut: f64) -> Self {
        self.spectral_map(|l| if l.abs() > cut { 1.0 } else { 0.0 })
    }

    /// Partial trace over the subsystem *not* kept, for `M` on a
    /// `dims.0 ⊗ dims.1` space with the first factor indexed slowest.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (da, db) = dims;
        if self.dim() != da * db {
            return Err(Error::Dimension {
                expected: da * db,
                got: self.dim(),
            });
        }
        let mat = match keep {
            Subsystem::A => DMatrix::from_fn(da, da, |j, k| {
                (0..db).map(|b| self.mat[(j * db + b, k * db + b)]).sum()
            }),
            Subsystem::B => DMatrix::from_fn(db, db, |j, k| {
                (0..da).map(|a| self.mat[(a * db + j, a * db + k)]).sum()
            }),
        };
        Ok(Self { mat })
    }

    /// Complex-linear action of `self ↦ (M ⊗ I) self (M ⊗ I)` style products
    /// is not needed; plain complex matrix product for internal use.
    pub fn matmul(&self, other: &Self) -> DMatrix<Complex64> {
        &self.mat * &other.mat
    }
}

/// Partial trace of an arbitrary (not necessarily Hermitian) complex
/// matrix on a `dims.0 ⊗ dims.1` space, first factor slowest.
pub fn partial_trace_raw(
    m: &DMatrix<Complex64>,
    dims: (usize, usize),
    keep: Subsystem,
) -> DMatrix<Complex64> {
    let (da, db) = dims;
    debug_assert_eq!(m.nrows(), da * db);
    match keep {
        Subsystem::A => DMatrix::from_fn(da, da, |j, k| {
            (0..db).map(|b| m[(j * db + b, k * db + b)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(db, db, |j, k| {
            (0..da).map(|a| m[(a * db + j, a * db + k)]).sum()
        }),
    }
}

/// Tags which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A Hermitian matrix that is PSD within 1e-9 and unit-trace within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    base: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let min_eig = base.min_eigenvalue();
        if min_eig < -tol::EPS_PSD {
            return Err(Error::NotDensity(format!(
                "min eigenvalue {min_eig:.3e} below -{:.0e}",
                tol::EPS_PSD
            )));
        }
        let tr = base.trace();
        if (tr - 1.0).abs() > tol::EPS_TR {
            return Err(Error::NotDensity(format!("trace {tr} != 1")));
        }
        Ok(Self { base })
    }

    /// Normalizes the trace to one first; PSD is still enforced.
    pub fn normalized(base: HermitianMatrix) -> Result<Self> {
        let tr = base.trace();
        if tr.abs() < 1e-14 {
            return Err(Error::NotDensity("zero trace".into()));
        }
        Self::new(base.scale(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            base: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(probs))
    }

    pub fn pure(v: &DVector<Complex64>) -> Self {
        Self {
            base: HermitianMatrix::projector(v),
        }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        Self {
            base: HermitianMatrix::basis_projector(dim, index),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.base
    }
}

/// A Hilbert–Schmidt-orthonormal family of Hermitian matrices.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Component vector of `m` in this basis.
    pub fn components(&self, m: &HermitianMatrix) -> Vec<f64> {
        self.elements.iter().map(|b| b.inner(m)).collect()
    }

    /// Orthogonal projection of `m` onto the span of this basis.
    pub fn project(&self, m: &HermitianMatrix) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(self.dim);
        for b in &self.elements {
            out = out.add(&b.scale(b.inner(m)));
        }
        out
    }

    /// Distance of `m` to the span.
    pub fn residual(&self, m: &HermitianMatrix) -> f64 {
        m.sub(&self.project(m)).norm_hs()
    }
}

/// Gram–Schmidt over the real Hilbert–Schmidt space. Inputs are
/// unit-normalized before the rank test; elements with residual norm below
/// 1e-9 are dropped, so rank-deficient spans compress.
pub fn orthonormalize(span: &[HermitianMatrix]) -> Result<HermitianBasis> {
    let dim = span
        .first()
        .map(|m| m.dim())
        .ok_or_else(|| Error::InvalidInput("orthonormalize: empty span".into()))?;
    let mut elements: Vec<HermitianMatrix> = Vec::new();
    for m in span {
        if m.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: m.dim(),
            });
        }
        let nrm = m.norm_hs();
        if nrm < tol::EPS_RANK {
            continue;
        }
        let mut v = m.scale(1.0 / nrm);
        // two Gram-Schmidt passes for orthogonality to working precision
        for _ in 0..2 {
            for b in &elements {
                v = v.sub(&b.scale(b.inner(&v)));
            }
        }
        let res = v.norm_hs();
        if res >= tol::EPS_RANK {
            elements.push(v.scale(1.0 / res));
        }
    }
    Ok(HermitianBasis { dim, elements })
}

/// Orthonormal basis of the orthogonal complement of `basis` in H_d,
/// real dimension d² − |basis|.
pub fn complement_basis(basis: &HermitianBasis) -> HermitianBasis {
    let d = basis.dim();
    let mut elements = Vec::new();
    for cand in standard_hermitian_basis(d) {
        let mut v = cand;
        for _ in 0..2 {
            for b in basis.elements().iter().chain(elements.iter()) {
                v = v.sub(&b.scale(b.inner(&v)));
            }
        }
        let res = v.norm_hs();
        if res >= tol::EPS_RANK {
            elements.push(v.scale(1.0 / res));
        }
    }
    debug_assert_eq!(basis.len() + elements.len(), d * d);
    HermitianBasis { dim: d, elements }
}

/// The d² standard orthonormal Hermitian basis elements of H_d:
/// E_jj, (E_jk + E_kj)/√2, i(E_kj − E_jk)/√2.
pub fn standard_hermitian_basis(d: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        out.push(HermitianMatrix::basis_projector(d, j));
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut re = DMatrix::zeros(d, d);
            re[(j, k)] = Complex64::new(s, 0.0);
            re[(k, j)] = Complex64::new(s, 0.0);
            out.push(HermitianMatrix { mat: re });
            let mut im = DMatrix::zeros(d, d);
            im[(j, k)] = Complex64::new(0.0, -s);
            im[(k, j)] = Complex64::new(0.0, s);
            out.push(HermitianMatrix { mat: im });
        }
    }
    out
}

/// Orthonormal basis of the traceless subspace H_{d,0} (d² − 1 elements).
pub fn traceless_hermitian_basis(d: usize) -> Vec<HermitianMatrix> {
    let id = HermitianMatrix::identity(d).scale(1.0 / (d as f64).sqrt());
    let mut elems = vec![id];
    for cand in standard_hermitian_basis(d) {
        let mut v = cand;
        for _ in 0..2 {
            for b in &elems {
                v = v.sub(&b.scale(b.inner(&v)));
            }
        }
        let res = v.norm_hs();
        if res >= tol::EPS_RANK {
            elems.push(v.scale(1.0 / res));
        }
    }
    elems.remove(0);
    debug_assert_eq!(elems.len(), d * d - 1);
    elems
}
