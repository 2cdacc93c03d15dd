//! Fourier-side fingerprints of refinement limits.
//!
//! The transform of a refinement limit is the infinite product of the level
//! symbols evaluated at shrinking arguments, so its zero set is the union of
//! periodic sets Γ_r — one per level, with period mʳ — read off from the
//! roots of each level's symbol.  Two consequences are demonstrated here:
//!
//! * For the constant mask (1, 1) the union is exactly the nonzero integers:
//!   the fingerprint of the indicator function of [0, 1].
//! * Any function generated by *some* refinement process must have, for each
//!   zero ω, partner zeros ω ± mʳ at a matching level.  This necessary
//!   condition can reject a candidate zero set outright — no scheme needs to
//!   be known — which is how one shows certain functions are not refinement
//!   limits of any reasonable scheme.
//!
//! A level-dependent twist: masks (1, e^(λ/2ʳ)) shift every zero by the same
//! imaginary offset −λ/(2π) while keeping the real pattern — a zero set that
//! no stationary scheme produces.
//!
//! Run with `cargo run --example gamma_zero_sets`.

use num_complex::Complex64;
use subdiv::error::Result;
use subdiv::exact::{from_f64, qi};
use subdiv::laurent::LaurentPoly;
use subdiv::presets::haar_symbol;
use subdiv::spectral::{
    gamma_set, generability_necessary_test, phi_hat_zero_union, GenerabilityVerdict,
};

fn main() -> Result<()> {
    let m = 2;
    let window = 10.0;

    // Per-level zero sets of the constant mask: Γ_r = 2^(r-1)·(odd integers).
    for r in 1..=3 {
        let zeros = gamma_set(&haar_symbol(), r, m)?;
        println!(
            "Γ_{r}: base points {:?}, period {}",
            zeros.base_points(),
            zeros.period()
        );
    }

    // Six levels of the same mask: the union inside |ω| <= 10 is exactly the
    // nonzero integers.
    let symbols = vec![haar_symbol(); 6];
    let union = phi_hat_zero_union(&symbols, m, 1, window)?;
    let reals: Vec<i64> = union.points.iter().map(|z| z.re.round() as i64).collect();
    let expected: Vec<i64> = (-10..=10).filter(|&k| k != 0).collect();
    assert_eq!(reals, expected, "indicator fingerprint");
    println!("union over 6 levels = nonzero integers in [-10, 10]");

    // The partner test accepts the honest pattern...
    match generability_necessary_test(&union.points, m, window, 6)? {
        GenerabilityVerdict::Consistent { tested } => {
            println!("necessary condition holds ({tested} zeros tested)")
        }
        other => panic!("unexpected verdict {other:?}"),
    }

    // ...and rejects a tampered one.  Remove the single zero at +2: the zero
    // at +4 is stranded, because its partner pairs are {2, 6} (gone), {0, 8}
    // (0 is never a zero) and {−4, 12} (12 lies outside the window).
    let tampered: Vec<Complex64> = union
        .points
        .iter()
        .copied()
        .filter(|z| z.re.round() as i64 != 2)
        .collect();
    match generability_necessary_test(&tampered, m, window, 6)? {
        GenerabilityVerdict::Violation { witnesses } => {
            let res: Vec<f64> = witnesses.iter().map(|w| w.re).collect();
            println!("tampered set rejected; stranded zeros: {res:?}");
            assert_eq!(res.len(), 1);
            assert!((res[0] - 4.0).abs() < 1e-9);
        }
        other => panic!("tampering must be detected, got {other:?}"),
    }

    // Level-dependent masks (1, e^(λ/2ʳ)): same real pattern, constant
    // imaginary offset −λ/(2π) — the transform vanishes on a line parallel
    // to the real axis, which no stationary mask family produces.
    let lambda = 1.3f64;
    let mut shifted = Vec::new();
    for r in 1..=6 {
        let weight = from_f64((lambda / f64::from(1 << r)).exp())?;
        let symbol = LaurentPoly::from_terms(1, [(vec![0], qi(1)), (vec![1], weight)])?;
        shifted.push(symbol);
    }
    let union = phi_hat_zero_union(&shifted, m, 1, window)?;
    let offset = -lambda / std::f64::consts::TAU;
    for z in &union.points {
        assert!((z.im - offset).abs() < 1e-9, "constant imaginary part");
    }
    println!(
        "exponential-weight masks: {} zeros, all with imaginary part {:.6}",
        union.points.len(),
        offset
    );
    Ok(())
}
