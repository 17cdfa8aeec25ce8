//! Structure of affine theories: spanning state bases, the V/V⊥ split,
//! the dual set's g-interval, and the double-dual identity.
//!
//! Run with: cargo run --example theory_structure

use artforge::hermitian::{standard_hermitian_basis, DensityMatrix};
use artforge::theory::{
    build_theory, double_dual_check, g_range, g_value, sample_dual_state, TheorySpec,
};
use artforge::Result;

fn main() -> Result<()> {
    let specs = [
        ("coherence(2)", TheorySpec::Coherence { dim: 2 }),
        ("real_qm(2)", TheorySpec::RealQm { dim: 2 }),
        (
            "gibbs(diag(0.75, 0.25))",
            TheorySpec::Gibbs { gamma: DensityMatrix::from_diagonal(&[0.75, 0.25])? },
        ),
    ];

    for (label, spec) in specs {
        let theory = build_theory(&spec)?;
        let (lo, hi) = g_range(&theory)?;
        println!(
            "{label}: dim = {}, n = {}, dim V = {}, dim V⊥ = {}, g-range = [{lo:.4}, {hi:.4}]",
            theory.dim,
            theory.state_basis.len(),
            theory.v_basis.len(),
            theory.v_perp_basis.len(),
        );

        if theory.contains_maximally_mixed {
            println!("  double dual recovers the free span: {}", double_dual_check(&theory)?);
        }

        // extreme dual points along the standard directions all report a
        // g-value inside the interval
        for dir in standard_hermitian_basis(theory.dim).iter().take(2) {
            let omega = sample_dual_state(&theory, dir)?;
            let g = g_value(&omega, &theory)?;
            assert!(g >= lo - 1e-7 && g <= hi + 1e-7);
            println!("  dual extreme point with g = {g:.4}");
        }
    }
    Ok(())
}
