//! Regularity of a blend between the six-point and four-point rules.
//!
//! The six-point interpolatory mask reproduces quintic polynomials and its
//! limits are markedly smoother than the four-point ones.  Blending the two
//! masks, `a_ω = (1−ω)·a₆ + ω·a₄`, trades smoothness against support and
//! locality.  This example certifies smoothness twice:
//!
//! * for the six-point rule alone (a stationary scheme), and
//! * for the whole blend segment ω ∈ [0, 1/2] at once, which also covers
//!   every level-dependent rule whose weights stay in that segment.
//!
//! Run with `cargo run --example dd6_blend`.

use subdiv::error::Result;
use subdiv::exact::{q, qi};
use subdiv::presets::{dd6_blend_family, dd6_symbol};
use subdiv::regularity::{analyze, stationary_analyze, RegularityOptions};
use subdiv::sumrules::{family_sum_rule_order, sum_rule_order};

fn main() -> Result<()> {
    let m = 2;
    let opts = RegularityOptions::default();

    // Stationary six-point rule: sum rules of order 6, limits close to C³.
    let dd6 = dd6_symbol();
    println!(
        "six-point rule: sum rules of order {}",
        sum_rule_order(&dd6, m)?.order
    );
    let report = stationary_analyze(&dd6, m, &opts)?;
    let alpha_hi = -report.jsr.lower.log2();
    println!(
        "  difference order {}: radius in [{:.6}, {:.6}]",
        report.ell_used, report.jsr.lower, report.jsr.upper
    );
    println!(
        "  Hölder exponent in [{:.4}, {:.4}]",
        report.holder_lower, alpha_hi
    );
    assert_eq!(report.convergent_in, Some(report.ell_used));
    assert!(report.holder_lower > 2.5, "six-point limits are C²");

    // The blend segment ω ∈ [0, 1/2]: one certificate for uncountably many
    // schemes.  Mixing in the four-point mask lowers the sum-rule order to 4
    // and costs some smoothness, but everything in the segment stays C².
    let blend = dd6_blend_family().with_domain(vec![vec![qi(0)], vec![q(1, 2)]])?;
    println!(
        "blend segment ω ∈ [0, 1/2]: sum rules of order {}",
        family_sum_rule_order(&blend, m)?.order
    );
    let report = analyze(&blend, m, &opts)?;
    println!(
        "  difference order {}: radius in [{:.6}, {:.6}]",
        report.ell_used, report.jsr.lower, report.jsr.upper
    );
    println!(
        "  every schedule in the segment gives limits with Hölder exponent >= {:.4}",
        report.holder_lower
    );
    assert!(report.convergent_in.is_some());
    assert!(report.holder_lower > 2.0, "the whole segment stays C²");
    Ok(())
}
