//! Single-shot state conversion under Gibbs-preserving operations, checked
//! against the classical thermo-majorization oracle.
//!
//! Run with: cargo run --example thermo_conversion

use artforge::convert::{apply_channel, check_rng, Verdict};
use artforge::hermitian::DensityMatrix;
use artforge::oracles::thermo_majorizes;
use artforge::theory::{build_theory, TheorySpec};
use artforge::Result;

fn main() -> Result<()> {
    let gamma = [0.75, 0.25];
    let theory = build_theory(&TheorySpec::Gibbs {
        gamma: DensityMatrix::from_diagonal(&gamma)?,
    })?;

    let pairs = [
        ([0.95, 0.05], [0.85, 0.15]),
        ([0.85, 0.15], [0.95, 0.05]),
        ([0.10, 0.90], [0.30, 0.70]),
        ([0.75, 0.25], [0.60, 0.40]),
    ];

    println!("Gibbs weights γ = {gamma:?}\n");
    for (p, q) in pairs {
        let rho = DensityMatrix::from_diagonal(&p)?;
        let rho_prime = DensityMatrix::from_diagonal(&q)?;
        let cert = check_rng(&rho, &theory, &rho_prime, &theory)?;
        let classical = thermo_majorizes(&p, &gamma, &q, &gamma)?;
        println!(
            "{p:?} -> {q:?}:  sdp = {:<10} oracle = {}",
            format!("{:?}", cert.verdict),
            if classical { "convertible" } else { "blocked" },
        );
        assert_eq!(cert.verdict == Verdict::Feasible, classical);

        if let Some(choi) = &cert.choi {
            let image = apply_channel(choi, &rho)?;
            let err = image.matrix().sub(rho_prime.matrix()).norm_hs();
            println!("    recovered channel maps ρ to ρ' within {err:.2e}");
        }
        if let Some(w) = &cert.witness {
            println!("    infeasibility witness margin {:.3e}", w.margin);
        }
    }
    Ok(())
}
