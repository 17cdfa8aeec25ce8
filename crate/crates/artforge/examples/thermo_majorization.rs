//! Classical oracles: Lorenz curves, thermo-majorization, and the
//! stochastic-map LP, cross-validated on random instances.
//!
//! Run with: cargo run --example thermo_majorization

use artforge::oracles::{classical_conversion_lp, majorizes, thermo_majorizes, LorenzCurve};
use artforge::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    // Lorenz curve of p against the Gibbs weights γ
    let p = [0.7, 0.3];
    let gamma = [0.25, 0.75];
    let curve = LorenzCurve::new(&p, &gamma)?;
    println!("Lorenz curve of p = {p:?} against γ = {gamma:?}:");
    for (x, y) in &curve.points {
        println!("  ({x:.3}, {y:.3})");
    }

    // at infinite temperature thermo-majorization is plain majorization
    let u = [0.5, 0.5];
    assert!(majorizes(&[0.9, 0.1], &[0.7, 0.3])?);
    assert!(thermo_majorizes(&[0.9, 0.1], &u, &[0.7, 0.3], &u)?);
    assert!(!thermo_majorizes(&[0.7, 0.3], &u, &[0.9, 0.1], &u)?);
    println!("\nuniform-γ instances reduce to majorization: ok");

    // Lorenz-curve dominance ⟺ existence of a Gibbs-preserving stochastic
    // map, checked on random qutrit instances
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dist = |d: usize| -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    };
    let mut convertible = 0;
    for _ in 0..40 {
        let p = dist(3);
        let q = dist(3);
        let g = dist(3);
        let curves = thermo_majorizes(&p, &g, &q, &g)?;
        let lp = classical_conversion_lp(&p, &g, &q, &g)?;
        assert_eq!(curves, lp, "oracles disagree on p={p:?} q={q:?} g={g:?}");
        convertible += usize::from(curves);
    }
    println!("40 random qutrit instances: oracles agree, {convertible} convertible");
    Ok(())
}
