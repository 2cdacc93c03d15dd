//! Bivariate analysis: the butterfly interpolatory surface family.
//!
//! The butterfly rule refines values on the quincunx-free grid Z² with
//! dilation 2I: the base mask is the two-scale symbol of the Courant hat
//! element, and an eight-point correction weighted by ω makes the rule
//! interpolatory with tunable shape.  Everything from sum rules through
//! transition matrices works verbatim in two variables; only the window
//! bookkeeping grows (four cosets instead of two, and the difference
//! subspace is computed as a nullspace instead of an exact quotient).
//!
//! Run with `cargo run --example butterfly_surface`.

use subdiv::error::Result;
use subdiv::jsr::{jsr_bounds, JsrOptions, MatrixFamily};
use subdiv::presets::butterfly_family;
use subdiv::sumrules::family_sum_rule_order;
use subdiv::transition::restrict;

fn main() -> Result<()> {
    let family = butterfly_family();
    let m = 2;

    let rules = family_sum_rule_order(&family, m)?;
    println!(
        "butterfly family over ω ∈ [0, 1/16]: {} variables, sum rules of order {}",
        family.dim(),
        rules.order
    );

    // Restrict the transition matrices to the complement of the constants
    // (difference order 0): contractivity there certifies uniform
    // convergence for every parameter schedule in the domain.
    let tf = restrict(&family, m, 0)?;
    println!(
        "restricted transition family: {} matrices of size {}x{} ({} vertices x {} cosets)",
        tf.members().len(),
        tf.dim_v(),
        tf.dim_v(),
        tf.vertex_count(),
        tf.cosets().len()
    );

    // At this size the radius search leans on the norm stages (the search
    // budgets shrink automatically for large members); a loose tolerance
    // keeps the run short, and upper < 1 is all convergence needs.
    let opts = JsrOptions {
        max_depth: 3,
        tol: 5e-2,
        ..JsrOptions::default()
    };
    let fam = MatrixFamily::new(tf.members().to_vec())?;
    let bounds = jsr_bounds(&fam, &opts)?;
    println!(
        "joint spectral radius on the difference subspace: [{:.4}, {:.4}]",
        bounds.lower, bounds.upper
    );
    println!("certificate: {}", bounds.certificate);
    if bounds.upper < 1.0 {
        println!(
            "contractive: every butterfly schedule with weights in [0, 1/16] converges \
             uniformly (Hölder exponent >= {:.3})",
            -bounds.upper.log2()
        );
    }
    assert!(bounds.upper < 1.0, "the butterfly segment is convergent");
    Ok(())
}
