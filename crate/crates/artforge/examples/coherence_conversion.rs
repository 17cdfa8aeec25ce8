//! Coherence theory conversions under the maximal (RNG) and self-dual
//! operation classes, including the dephasing of a pure superposition.
//!
//! Run with: cargo run --example coherence_conversion

use artforge::convert::{check_rng, check_selfdual, Verdict};
use artforge::hermitian::DensityMatrix;
use artforge::theory::{build_theory, TheorySpec};
use artforge::Result;
use nalgebra::DVector;
use num_complex::Complex64;

fn main() -> Result<()> {
    let theory = build_theory(&TheorySpec::Coherence { dim: 2 })?;

    // a coherent superposition with diagonal (0.8, 0.2)
    let mut v = DVector::zeros(2);
    v[0] = Complex64::new(0.8f64.sqrt(), 0.0);
    v[1] = Complex64::new(0.2f64.sqrt(), 0.0);
    let psi = DensityMatrix::pure(&v);
    let dephased = DensityMatrix::from_diagonal(&[0.8, 0.2])?;

    // dephasing is a resource-non-generating channel and also self-dual
    let rng = check_rng(&psi, &theory, &dephased, &theory)?;
    let sd = check_selfdual(&psi, &theory, &dephased, &theory)?;
    println!("|ψ⟩⟨ψ| -> diag(ψ):  rng = {:?}, self-dual = {:?}", rng.verdict, sd.verdict);
    assert_eq!(rng.verdict, Verdict::Feasible);
    assert_eq!(sd.verdict, Verdict::Feasible);

    // the reverse direction would create coherence from a free state
    let rev = check_rng(&dephased, &theory, &psi, &theory)?;
    println!("diag(ψ) -> |ψ⟩⟨ψ|:  rng = {:?} (w = {:.4})", rev.verdict, rev.w_value);
    assert_eq!(rev.verdict, Verdict::Infeasible);

    // self-dual feasibility always implies RNG feasibility; spot-check on a
    // mixed pair
    let a = DensityMatrix::from_diagonal(&[0.7, 0.3])?;
    let b = DensityMatrix::from_diagonal(&[0.6, 0.4])?;
    let sd_mixed = check_selfdual(&a, &theory, &b, &theory)?;
    if sd_mixed.verdict == Verdict::Feasible {
        let rng_mixed = check_rng(&a, &theory, &b, &theory)?;
        assert_eq!(rng_mixed.verdict, Verdict::Feasible);
        println!("mixed diagonal pair feasible in both classes");
    }
    Ok(())
}
