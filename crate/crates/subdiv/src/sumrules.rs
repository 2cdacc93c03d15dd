//! Exact verification of sum rules (polynomial reproduction conditions).
//!
//! A mask `a` with dilation `m·I` satisfies sum rules of order `k` when
//! `a(1, …, 1) = m^s` and every derivative `D^η a` with `|η| ≤ k − 1`
//! vanishes at each nonzero coset root `ξ_ε = (e^{2πi ε₁/m}, …, e^{2πi ε_s/m})`,
//! `ε ∈ {0, …, m−1}^s ∖ {0}`. The order controls which difference subspaces
//! the transition matrices can be restricted to.
//!
//! Vanishing at the roots of unity is decided *exactly*: grouping the
//! coefficients of `D^η a` by the residue `⟨α, ε⟩ mod m` yields a polynomial
//! of degree `< m` in `ζ = e^{2πi/m}`, which vanishes iff the m-th cyclotomic
//! polynomial divides it over the rationals. No floating-point tolerance
//! enters the decision; a numeric residual is reported alongside for
//! diagnostics only.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{qi, to_f64, Q};
use crate::laurent::{LaurentPoly, MultiIndex, ParamSymbol};

/// Outcome of a sum-rule scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRuleCheck {
    /// Largest `k` such that sum rules of order `k` hold (0 when even the
    /// zeroth-level conditions fail).
    pub order: usize,
    /// Whether `a(1, …, 1) = m^s` holds exactly.
    pub normalized: bool,
    /// Numeric magnitude of the largest violated condition at the first
    /// failing derivative level; 0 when the scan stopped at the support cap.
    pub residual: f64,
}

/// Exponent tuples `ε ∈ {0, …, m−1}^s ∖ {0}` indexing the nonzero coset
/// roots of unity, in lexicographic order.
pub fn coset_unit_roots(m: i64, dim: usize) -> Result<Vec<MultiIndex>> {
    check_dilation(m)?;
    let mut out = Vec::new();
    let mut eps = vec![0i64; dim];
    loop {
        if eps.iter().any(|&e| e != 0) {
            out.push(eps.clone());
        }
        // Odometer increment.
        let mut j = dim;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            eps[j] += 1;
            if eps[j] < m {
                break;
            }
            eps[j] = 0;
        }
    }
}

fn check_dilation(m: i64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDilation {
            m,
            reason: "isotropic dilation factor must be at least 2",
        });
    }
    Ok(())
}

/// Coefficients of the m-th cyclotomic polynomial, exact, as a univariate
/// polynomial with ascending exponents `0..=φ(m)`.
pub fn cyclotomic(m: i64) -> LaurentPoly {
    assert!(m >= 1);
    // Φ_m = (x^m − 1) / Π_{d | m, d < m} Φ_d, by exact polynomial division.
    let mut num =
        LaurentPoly::from_terms(1, vec![(vec![m], Q::one()), (vec![0], -Q::one())]).unwrap();
    for d in 1..m {
        if m % d == 0 {
            num = num
                .div_exact(&cyclotomic(d))
                .expect("cyclotomic factors divide x^m - 1 exactly");
        }
    }
    num
}

/// Decide `p(ξ_ε) = 0` exactly; also return the numeric magnitude `|p(ξ_ε)|`.
fn vanishes_at_coset_root(p: &LaurentPoly, m: i64, eps: &[i64]) -> (bool, f64) {
    // Group coefficients by ⟨α, ε⟩ mod m.
    let mut residue = vec![Q::zero(); m as usize];
    for (alpha, c) in p.terms() {
        let t = alpha
            .iter()
            .zip(eps)
            .map(|(&a, &e)| a * e)
            .sum::<i64>()
            .rem_euclid(m) as usize;
        residue[t] += c;
    }
    let residue_poly = LaurentPoly::from_terms(
        1,
        residue
            .iter()
            .enumerate()
            .map(|(t, c)| (vec![t as i64], c.clone())),
    )
    .unwrap();
    let magnitude = if m == 2 {
        // ζ = −1 is rational: the alternating coefficient sum is exact.
        to_f64(&(residue[0].clone() - residue[1].clone())).abs()
    } else {
        let theta = 2.0 * std::f64::consts::PI / m as f64;
        let zeta = Complex64::new(theta.cos(), theta.sin());
        residue_poly
            .evaluate(&[zeta])
            .map(|v| v.norm())
            .unwrap_or(f64::NAN)
    };
    if residue_poly.is_zero() {
        return (true, magnitude);
    }
    let exact_zero = residue_poly.div_exact(&cyclotomic(m)).is_some();
    (exact_zero, magnitude)
}

/// All multi-indices `η ≥ 0` in `parts` coordinates with `Σ η_j = total`.
fn compositions(total: i64, parts: usize) -> Vec<MultiIndex> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Exact sum-rule order of a single mask with dilation `m·I`.
pub fn sum_rule_order(a: &LaurentPoly, m: i64) -> Result<SumRuleCheck> {
    check_dilation(m)?;
    let dim = a.dim();
    let target = num_traits::pow::pow(qi(m), dim);
    let sum = a.coefficient_sum();
    if sum != target {
        let residual = (to_f64(&sum) - to_f64(&target)).abs();
        return Ok(SumRuleCheck {
            order: 0,
            normalized: false,
            residual,
        });
    }
    let roots = coset_unit_roots(m, dim)?;
    // A nonzero mask passing level k has (1 + z + … + z^{m−1})^k as a factor
    // in each coordinate direction, so the support span caps the order.
    let cap = (a.degree_span() + 1) as usize;
    let mut order = 0usize;
    let mut residual = 0.0f64;
    for k in 1..=cap {
        let mut failed = false;
        for eta in compositions(k as i64 - 1, dim) {
            let d = a.derivative(&eta)?;
            for eps in &roots {
                let (ok, mag) = vanishes_at_coset_root(&d, m, eps);
                if !ok {
                    failed = true;
                    if mag.is_finite() {
                        residual = residual.max(mag);
                    }
                }
            }
        }
        if failed {
            break;
        }
        order = k;
    }
    Ok(SumRuleCheck {
        order,
        normalized: true,
        residual,
    })
}

/// Sum-rule order of an affine family: the largest order holding for *every*
/// parameter in the domain polytope. Because each condition is affine in the
/// parameter, checking the vertices is exact, and the family order is the
/// minimum of the vertex orders.
pub fn family_sum_rule_order(fam: &ParamSymbol, m: i64) -> Result<SumRuleCheck> {
    check_dilation(m)?;
    let mut worst: Option<SumRuleCheck> = None;
    for i in 0..fam.domain().len() {
        let check = sum_rule_order(&fam.vertex_symbol(i)?, m)?;
        worst = Some(match worst {
            None => check,
            Some(w) if check.order < w.order => check,
            Some(w) => w,
        });
    }
    Ok(worst.expect("domain has at least one vertex"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::presets;

    fn poly1(coeffs: &[(i64, Q)]) -> LaurentPoly {
        LaurentPoly::from_terms(1, coeffs.iter().cloned().map(|(e, c)| (vec![e], c))).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials_match_tables() {
        let as_vec =
            |p: &LaurentPoly, deg: i64| -> Vec<Q> { (0..=deg).map(|k| p.coeff(&[k])).collect() };
        assert_eq!(as_vec(&cyclotomic(1), 1), vec![qi(-1), qi(1)]);
        assert_eq!(as_vec(&cyclotomic(2), 1), vec![qi(1), qi(1)]);
        assert_eq!(as_vec(&cyclotomic(3), 2), vec![qi(1), qi(1), qi(1)]);
        assert_eq!(as_vec(&cyclotomic(4), 2), vec![qi(1), qi(0), qi(1)]);
        assert_eq!(as_vec(&cyclotomic(6), 2), vec![qi(1), qi(-1), qi(1)]);
        assert_eq!(
            as_vec(&cyclotomic(12), 4),
            vec![qi(1), qi(0), qi(-1), qi(0), qi(1)]
        );
    }

    #[test]
    fn coset_root_exponents_enumerate_the_grid() {
        assert_eq!(coset_unit_roots(2, 1).unwrap(), vec![vec![1]]);
        assert_eq!(
            coset_unit_roots(2, 2).unwrap(),
            vec![vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(coset_unit_roots(3, 1).unwrap(), vec![vec![1], vec![2]]);
        assert!(coset_unit_roots(1, 1).is_err());
    }

    #[test]
    fn classical_univariate_orders() {
        assert_eq!(sum_rule_order(&presets::haar_symbol(), 2).unwrap().order, 1);
        assert_eq!(
            sum_rule_order(&presets::bspline_symbol(), 2).unwrap().order,
            2
        );
        assert_eq!(sum_rule_order(&presets::dd4_symbol(), 2).unwrap().order, 4);
        assert_eq!(sum_rule_order(&presets::dd6_symbol(), 2).unwrap().order, 6);
        // Generic tension only keeps the two lowest-level conditions.
        assert_eq!(
            sum_rule_order(&presets::four_point_symbol(&q(3, 64)), 2)
                .unwrap()
                .order,
            2
        );
    }

    #[test]
    fn family_order_is_the_worst_vertex() {
        assert_eq!(
            family_sum_rule_order(&presets::four_point_family(), 2)
                .unwrap()
                .order,
            2
        );
        assert_eq!(
            family_sum_rule_order(&presets::dd6_blend_family(), 2)
                .unwrap()
                .order,
            4
        );
        assert_eq!(
            family_sum_rule_order(&presets::butterfly_family(), 2)
                .unwrap()
                .order,
            2
        );
    }

    #[test]
    fn ternary_masks() {
        // (1 + z + z²)²/3 has order 2 for dilation 3; 1 + z + z² has order 1.
        let sigma3 = poly1(&[(0, qi(1)), (1, qi(1)), (2, qi(1))]);
        let quadratic = sigma3.pow(2).scale(&q(1, 3));
        assert_eq!(sum_rule_order(&quadratic, 3).unwrap().order, 2);
        let linear = sigma3;
        let check = sum_rule_order(&linear, 3).unwrap();
        assert_eq!(check.order, 1);
        assert!(check.normalized);
        assert!(check.residual > 1.0); // |1 + 2ζ₃| = √3 at the first failure
    }

    #[test]
    fn exact_check_catches_sub_epsilon_violations() {
        // Perturb the hat mask by δ(1 − z) with δ = 2⁻¹⁰⁰: the coefficient
        // sum is unchanged, but the value at z = −1 becomes 2δ ≈ 1.6·10⁻³⁰,
        // far below anything a floating-point test could see.
        let delta = q(1, 1) / num_traits::pow::pow(qi(2), 100);
        let bump = poly1(&[(0, delta.clone()), (1, -delta)]);
        let perturbed = presets::bspline_symbol().try_add(&bump).unwrap();
        let check = sum_rule_order(&perturbed, 2).unwrap();
        assert!(check.normalized);
        assert_eq!(check.order, 0);
        assert!(check.residual > 0.0 && check.residual < 1e-29);
    }

    #[test]
    fn butterfly_vertex_orders() {
        // Box-spline base and classical butterfly both stop at order 2
        // (the next level fails for the base).
        let fam = presets::butterfly_family();
        let base = fam.vertex_symbol(0).unwrap();
        assert_eq!(sum_rule_order(&base, 2).unwrap().order, 2);
        let tip = fam.vertex_symbol(1).unwrap();
        assert!(sum_rule_order(&tip, 2).unwrap().order >= 2);
    }
}
