//! Certificate round-trips through the JSON encoding: decide an instance,
//! serialize the certificate, parse it back, and re-validate the artifacts
//! against the original states.
//!
//! Run with: cargo run --example certificate_io

use artforge::convert::{apply_channel, check_rng, evaluate_witness, OperationClass, Verdict};
use artforge::encode::{certificate_from_json, certificate_to_json};
use artforge::hermitian::DensityMatrix;
use artforge::theory::{build_theory, TheorySpec};
use artforge::Result;

fn main() -> Result<()> {
    let theory = build_theory(&TheorySpec::Gibbs {
        gamma: DensityMatrix::from_diagonal(&[0.5, 0.5])?,
    })?;
    let rho = DensityMatrix::from_diagonal(&[0.9, 0.1])?;
    let rho_prime = DensityMatrix::from_diagonal(&[0.7, 0.3])?;

    for (a, b, label) in [
        (&rho, &rho_prime, "feasible direction"),
        (&rho_prime, &rho, "blocked direction"),
    ] {
        let cert = check_rng(a, &theory, b, &theory)?;
        let json = certificate_to_json(&cert);
        let text = serde_json::to_string(&json)?;
        println!("{label}: {} bytes of certificate JSON", text.len());

        let parsed = certificate_from_json(&serde_json::from_str(&text)?)?;
        assert_eq!(parsed.verdict, cert.verdict);
        match parsed.verdict {
            Verdict::Feasible => {
                let choi = parsed.choi.expect("feasible certificates carry a Choi");
                let image = apply_channel(&choi, a)?;
                let err = image.matrix().sub(b.matrix()).norm_hs();
                println!("  replayed channel reproduces the target within {err:.2e}");
            }
            Verdict::Infeasible => {
                let w = parsed.witness.expect("infeasible certificates carry a witness");
                let (_, margin) = evaluate_witness(
                    &w.n,
                    &w.y,
                    &w.tau,
                    a,
                    b,
                    &theory.max_rank_state,
                    &theory,
                    &theory,
                    OperationClass::Rng,
                )?;
                println!("  replayed witness margin {margin:.3e}");
                assert!(margin > 0.0);
            }
            Verdict::Boundary => println!("  boundary verdicts carry no artifacts"),
        }
    }
    Ok(())
}
