//! Resource-destroying-map existence across the preset theories, with the
//! Δ-commutation test for channels.
//!
//! Run with: cargo run --example rdm_existence

use artforge::convert::ChoiMatrix;
use artforge::hermitian::DensityMatrix;
use artforge::rdm::{delta_commuting_check, k_subspace_check, rdm};
use artforge::theory::{build_theory, TheorySpec};
use artforge::Result;

fn main() -> Result<()> {
    let specs = [
        ("coherence(3)", TheorySpec::Coherence { dim: 3 }),
        ("real_qm(2)", TheorySpec::RealQm { dim: 2 }),
        (
            "gibbs(diag(0.75, 0.25))",
            TheorySpec::Gibbs { gamma: DensityMatrix::from_diagonal(&[0.75, 0.25])? },
        ),
    ];

    for (label, spec) in specs {
        let theory = build_theory(&spec)?;
        let verdict = rdm(&theory)?;
        let cross = k_subspace_check(&theory)?;
        println!(
            "{label}: exists = {}, unital = {}, subspace cross-check = {}",
            verdict.exists, verdict.unital, cross,
        );
        assert_eq!(verdict.exists, cross);

        if let Some((_, eig)) = &verdict.negativity_witness {
            println!("  Choi candidate fails positivity at eigenvalue {eig:.4}");
        }
        if verdict.exists {
            let choi = verdict.delta_choi.as_ref().expect("existence carries a Choi");
            // Δ commutes with itself and with the identity channel
            assert!(delta_commuting_check(choi, &theory)?);
            assert!(delta_commuting_check(&ChoiMatrix::identity(theory.dim), &theory)?);
            println!("  Δ-commutation holds for Δ itself and the identity channel");
        }
    }
    Ok(())
}
