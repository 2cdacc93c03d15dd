//! Bracket the joint spectral radius of a raw matrix family.
//!
//! The pair A₀ = [[1,1],[0,1]], A₁ = [[1,0],[1,1]] shows why the joint
//! spectral radius is not a per-member quantity: each member alone has
//! spectral radius 1 (all its powers grow linearly), yet mixed products grow
//! like powers of the golden ratio φ = (1+√5)/2 ≈ 1.618, attained by
//! repeating the word A₀A₁.  The branch-and-bound stage has to discover
//! that two-letter witness; the upper bound then closes onto it (for this
//! pair the spectral norm is already exactly φ — the singular values of a
//! unit shear are φ and 1/φ — so the bracket collapses at depth one).
//!
//! The second half checks a structural identity that makes brackets easy to
//! sanity-test anywhere: scaling every member by c scales the radius by |c|.
//!
//! Run with `cargo run --example jsr_bracket`.

use nalgebra::DMatrix;
use subdiv::error::Result;
use subdiv::jsr::{jsr_bounds, spectral_radius, JsrOptions, MatrixFamily};

fn main() -> Result<()> {
    let a0 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    let a1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;

    println!(
        "single members: ρ(A₀) = {}, ρ(A₁) = {}",
        spectral_radius(&a0),
        spectral_radius(&a1)
    );
    println!(
        "two-letter product: ρ(A₀A₁)^(1/2) = {:.10} (φ = {:.10})",
        spectral_radius(&(&a0 * &a1)).sqrt(),
        phi
    );

    let opts = JsrOptions {
        tol: 1e-8,
        ..JsrOptions::default()
    };
    let family = MatrixFamily::new(vec![a0.clone(), a1.clone()])?;
    let bounds = jsr_bounds(&family, &opts)?;

    println!(
        "joint spectral radius in [{:.10}, {:.10}]",
        bounds.lower, bounds.upper
    );
    println!(
        "witness word: {:?} ({} nodes explored, depth {})",
        bounds.witness, bounds.nodes_explored, bounds.depth_reached
    );
    println!("certificate: {}", bounds.certificate);

    assert!(bounds.converged, "the bracket must close to tol");
    assert!((bounds.lower - phi).abs() < 1e-9, "lower bound hits φ");
    assert!(bounds.upper >= phi && bounds.upper < phi * (1.0 + 1e-7));

    // Scale invariance: JSR(cF) = |c|·JSR(F).
    let c = 0.25f64;
    let scaled = MatrixFamily::new(vec![a0 * c, a1 * c])?;
    let scaled_bounds = jsr_bounds(&scaled, &opts)?;
    println!(
        "scaled by {c}: radius in [{:.10}, {:.10}] (expect {:.10})",
        scaled_bounds.lower,
        scaled_bounds.upper,
        c * phi
    );
    assert!((scaled_bounds.lower - c * phi).abs() < 1e-9);
    Ok(())
}
