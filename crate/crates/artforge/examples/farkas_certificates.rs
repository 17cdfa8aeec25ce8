//! Infeasibility certificates end to end: a blocked conversion produces a
//! witness triple (N, Y, τ) whose block operator is verified positive
//! definite from scratch, and whose margin scales linearly with the
//! witness normalization.
//!
//! Run with: cargo run --example farkas_certificates

use artforge::convert::{check_rng, evaluate_witness, OperationClass, Verdict};
use artforge::hermitian::DensityMatrix;
use artforge::theory::{build_theory, TheorySpec};
use artforge::Result;

fn main() -> Result<()> {
    let theory = build_theory(&TheorySpec::Gibbs {
        gamma: DensityMatrix::from_diagonal(&[0.5, 0.5])?,
    })?;
    // diag(0.7, 0.3) is strictly majorized by diag(0.9, 0.1), so this
    // direction is blocked under unital channels
    let rho = DensityMatrix::from_diagonal(&[0.7, 0.3])?;
    let rho_prime = DensityMatrix::from_diagonal(&[0.9, 0.1])?;

    let cert = check_rng(&rho, &theory, &rho_prime, &theory)?;
    assert_eq!(cert.verdict, Verdict::Infeasible);
    println!("verdict: {:?}, w-value {:.6}", cert.verdict, cert.w_value);

    // the raw Farkas combination is positive definite with the reported margin
    let farkas = cert.farkas.as_ref().expect("infeasible verdicts carry a certificate");
    let recomputed = farkas.witness_matrix.min_eigenvalue();
    println!(
        "farkas combination: {} coefficients, margin {:.3e} (recomputed {:.3e})",
        farkas.coefficients.len(),
        farkas.margin,
        recomputed,
    );
    assert!(recomputed > 0.0);

    // the witness triple re-verifies through the audited path, including
    // its preconditions
    let w = cert.witness.as_ref().expect("witness triple");
    let (_, margin) = evaluate_witness(
        &w.n,
        &w.y,
        &w.tau,
        &rho,
        &rho_prime,
        &theory.max_rank_state,
        &theory,
        &theory,
        OperationClass::Rng,
    )?;
    println!("witness margin (recomputed) {margin:.3e}");

    // positive homogeneity: scaling (N, Y) scales the margin
    let (_, doubled) = evaluate_witness(
        &w.n.scale(2.0),
        &w.y.scale(2.0),
        &w.tau,
        &rho,
        &rho_prime,
        &theory.max_rank_state,
        &theory,
        &theory,
        OperationClass::Rng,
    )?;
    println!("doubled witness margin {doubled:.3e} (expected {:.3e})", 2.0 * margin);
    assert!((doubled - 2.0 * margin).abs() < 1e-8);
    Ok(())
}
