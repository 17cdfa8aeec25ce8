//! Min-entropy monotones: the f_ω family, the R_fixed/R_full envelopes,
//! and the sampling scan that turns them into conversion no-go proofs.
//!
//! Run with: cargo run --example monotones

use artforge::convert::scan_monotones;
use artforge::hermitian::DensityMatrix;
use artforge::minentropy::{f_omega, r_fixed, r_full, Side};
use artforge::theory::{build_theory, g_range, TheorySpec};
use artforge::Result;

fn main() -> Result<()> {
    let theory = build_theory(&TheorySpec::Gibbs {
        gamma: DensityMatrix::from_diagonal(&[0.5, 0.5])?,
    })?;
    let rho = DensityMatrix::from_diagonal(&[0.9, 0.1])?;
    let eta = DensityMatrix::basis_state(2, 0);

    // f_ω at a dual point, then the t-resolved envelopes
    let omega = DensityMatrix::from_diagonal(&[0.6, 0.4])?;
    let f = f_omega(&rho, &eta, std::slice::from_ref(&omega), &theory)?;
    println!("f_ω(ρ) = {f:.6}");

    let (lo, hi) = g_range(&theory)?;
    println!("g-range of the dual set: [{lo:.4}, {hi:.4}]");
    for t in [lo + 1e-9, 0.5 * (lo + hi), hi - 1e-9] {
        let fixed = r_fixed(&rho, &eta, t, &theory, Side::In)?;
        let full = r_full(&rho, &eta, t, &theory, Side::In, 3)?;
        println!("t = {t:.4}:  R_fixed = {fixed:.6}, R_full ≤ {full:.6}");
        assert!(full <= fixed + 1e-7);
    }

    // the scan samples (η, ω) tuples; any violation certifies that the
    // conversion is impossible
    let rho_prime = DensityMatrix::from_diagonal(&[0.8, 0.2])?;
    let easy = scan_monotones(&rho, &theory, &rho_prime, &theory, 40, 0)?;
    println!(
        "ρ = diag(0.9,0.1) -> diag(0.8,0.2): {} violations in {} samples (convertible)",
        easy.violations.len(),
        easy.samples,
    );

    let hard = scan_monotones(&rho_prime, &theory, &rho, &theory, 40, 0)?;
    println!(
        "ρ = diag(0.8,0.2) -> diag(0.9,0.1): {} violations in {} samples (blocked)",
        hard.violations.len(),
        hard.samples,
    );
    if let Some(v) = hard.violations.first() {
        println!("  first violation: 2^(-hmin) = {:.6} < bound {:.6}", v.lhs, v.rhs);
    }
    Ok(())
}
