//! Conditional min-entropy H_min(A|B) from the primal SDP and its
//! channel-based dual, with a Helstrom cross-check on a classical-quantum
//! state.
//!
//! Run with: cargo run --example min_entropy

use artforge::hermitian::{DensityMatrix, HermitianMatrix, Subsystem};
use artforge::minentropy::{hmin, hmin_dual, two_pow_neg_hmin, BipartiteState};
use artforge::oracles::helstrom;
use artforge::Result;
use nalgebra::DVector;
use num_complex::Complex64;

fn main() -> Result<()> {
    // product state: H_min(A|B) = log d_A
    let product = BipartiteState::new(
        (2, 2),
        DensityMatrix::new(
            DensityMatrix::maximally_mixed(2)
                .matrix()
                .kron(DensityMatrix::from_diagonal(&[0.9, 0.1])?.matrix()),
        )?,
    )?;
    report("maximally mixed ⊗ diag(0.9, 0.1)", &product)?;

    // maximally entangled state: H_min(A|B) = −log d
    let mut bell = DVector::zeros(4);
    bell[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    bell[3] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let entangled = BipartiteState::new((2, 2), DensityMatrix::pure(&bell))?;
    report("Bell state", &entangled)?;

    // cq-state: 2^{−H_min} is the optimal guessing probability, here the
    // Helstrom value for |0⟩ vs |+⟩ at prior ½
    let r0 = DensityMatrix::basis_state(2, 0);
    let mut plus = DVector::zeros(2);
    plus[0] = Complex64::new(1.0, 0.0);
    plus[1] = Complex64::new(1.0, 0.0);
    let r1 = DensityMatrix::pure(&plus);
    let cq = HermitianMatrix::basis_projector(2, 0)
        .kron(r0.matrix())
        .scale(0.5)
        .add(&HermitianMatrix::basis_projector(2, 1).kron(r1.matrix()).scale(0.5));
    let cq_state = BipartiteState::new((2, 2), DensityMatrix::new(cq)?)?;
    let guess = two_pow_neg_hmin(&cq_state)?;
    let oracle = helstrom(0.5, &r0, &r1)?;
    println!("cq-state guessing probability: sdp = {guess:.6}, Helstrom = {oracle:.6}");
    assert!((guess - oracle).abs() < 1e-6);

    // sanity: the B marginal of the cq-state is the prior mixture
    let marginal = cq_state.state.matrix().partial_trace((2, 2), Subsystem::B)?;
    println!("B-marginal trace = {:.6}", marginal.trace());
    Ok(())
}

fn report(label: &str, state: &BipartiteState) -> Result<()> {
    let h = hmin(state)?;
    let hd = hmin_dual(state)?;
    println!("{label}: hmin = {h:.6}, dual = {hd:.6}, gap = {:.2e}", (h - hd).abs());
    Ok(())
}
