//! Ready-made masks and parameter families used across examples and tests.
//!
//! Everything here is exact: coefficients are built as rationals, never
//! parsed from floats. Each constructor documents the refinement rule it
//! encodes so the numbers can be re-derived independently.

use crate::engine::ParameterSchedule;
use crate::exact::{q, qi, Q};
use crate::laurent::{LaurentPoly, ParamSymbol};

/// Haar mask `1 + z`: piecewise-constant refinement, dilation 2.
pub fn haar_symbol() -> LaurentPoly {
    LaurentPoly::from_terms(1, vec![(vec![0], qi(1)), (vec![1], qi(1))]).unwrap()
}

/// Linear B-spline (hat function) mask `½ z⁻¹ + 1 + ½ z`, dilation 2.
pub fn bspline_symbol() -> LaurentPoly {
    LaurentPoly::from_terms(
        1,
        vec![(vec![-1], q(1, 2)), (vec![0], qi(1)), (vec![1], q(1, 2))],
    )
    .unwrap()
}

/// Interpolatory four-point symbol with tension `ω`, dilation 2.
///
/// Insertion rule: the new mid-edge value is
/// `(½ + ω)(c_i + c_{i+1}) − ω(c_{i−1} + c_{i+2})`; old points are kept.
/// `ω = 1/16` reproduces the cubic Dubuc–Deslauriers scheme.
pub fn four_point_symbol(omega: &Q) -> LaurentPoly {
    four_point_base()
        .try_add(&four_point_direction().scale(omega))
        .unwrap()
}

fn four_point_base() -> LaurentPoly {
    bspline_symbol()
}

fn four_point_direction() -> LaurentPoly {
    LaurentPoly::from_terms(
        1,
        vec![
            (vec![-3], qi(-1)),
            (vec![-1], qi(1)),
            (vec![1], qi(1)),
            (vec![3], qi(-1)),
        ],
    )
    .unwrap()
}

/// Four-point family with tension ranging over `[0, 1/16]`.
pub fn four_point_family() -> ParamSymbol {
    ParamSymbol::new(
        four_point_base(),
        vec![four_point_direction()],
        vec![vec![qi(0)], vec![q(1, 16)]],
    )
    .unwrap()
}

/// Level schedule for the running non-stationary example: two hat steps (the
/// ω = 0 corner of [`four_point_family`]) followed by uniform draws from
/// `[3/64, 1/16]`.  Fully reproducible from the seed.
pub fn four_point_random_schedule(seed: u64) -> ParameterSchedule {
    ParameterSchedule::RandomUniform {
        seed,
        lo: vec![q(3, 64)],
        hi: vec![q(1, 16)],
        prefix: vec![vec![qi(0)], vec![qi(0)]],
    }
}

/// Cubic Dubuc–Deslauriers symbol: the four-point scheme at `ω = 1/16`.
pub fn dd4_symbol() -> LaurentPoly {
    four_point_symbol(&q(1, 16))
}

/// Quintic Dubuc–Deslauriers (six-point interpolatory) symbol:
/// `(3, 0, −25, 0, 150, 256, 150, 0, −25, 0, 3)/256` on `{−5, …, 5}`.
pub fn dd6_symbol() -> LaurentPoly {
    let coeffs: [i64; 11] = [3, 0, -25, 0, 150, 256, 150, 0, -25, 0, 3];
    LaurentPoly::from_terms(
        1,
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (vec![k as i64 - 5], q(c, 256))),
    )
    .unwrap()
}

/// Blend family `(1 − ω)·DD6 + ω·DD4` for `ω ∈ [0, 1]`, written affinely as
/// `DD6 + ω·(DD4 − DD6)`. At `ω = 0` this is the six-point scheme, at
/// `ω = 1` the four-point scheme with tension 1/16.
pub fn dd6_blend_family() -> ParamSymbol {
    let base = dd6_symbol();
    let direction = dd4_symbol().try_sub(&base).unwrap();
    ParamSymbol::new(base, vec![direction], vec![vec![qi(0)], vec![qi(1)]]).unwrap()
}

/// Base of the butterfly family: the shifted three-direction linear box
/// spline symbol `(1 + z₁)(1 + z₂)(1 + z₁z₂)/2` on `{0, 1, 2}²`, dilation 2I.
pub fn butterfly_base() -> LaurentPoly {
    let z1 = LaurentPoly::monomial(vec![1, 0], qi(1));
    let z2 = LaurentPoly::monomial(vec![0, 1], qi(1));
    let z12 = LaurentPoly::monomial(vec![1, 1], qi(1));
    let one = LaurentPoly::one(2);
    let prod = (&(&one + &z1) * &(&one + &z2))
        .try_mul(&(&one + &z12))
        .unwrap();
    prod.scale(&q(1, 2))
}

/// Tension direction of the butterfly scheme (the classical mask equals
/// `butterfly_base + w · butterfly_correction` after the `{0,1,2}²` shift).
///
/// Eighteen integer-weight terms: for each of the three edge classes of the
/// triangulated grid the insertion stencil adds `+2` on the two opposite
/// triangle tips and `−1` on the four wing vertices.
pub fn butterfly_correction() -> LaurentPoly {
    let terms: [(i64, i64, i64); 18] = [
        // horizontal edges
        (0, -1, 2),
        (2, 3, 2),
        (2, -1, -1),
        (-2, -1, -1),
        (4, 3, -1),
        (0, 3, -1),
        // vertical edges (mirror under coordinate swap)
        (-1, 0, 2),
        (3, 2, 2),
        (-1, 2, -1),
        (-1, -2, -1),
        (3, 4, -1),
        (3, 0, -1),
        // diagonal edges
        (0, 2, 2),
        (2, 0, 2),
        (2, 4, -1),
        (-2, 0, -1),
        (4, 2, -1),
        (0, -2, -1),
    ];
    LaurentPoly::from_terms(2, terms.iter().map(|&(i, j, c)| (vec![i, j], qi(c)))).unwrap()
}

/// Butterfly family with tension ranging over `[0, 1/16]`; `ω = 1/16` is the
/// classical smooth butterfly scheme, `ω = 0` the linear box spline.
pub fn butterfly_family() -> ParamSymbol {
    ParamSymbol::new(
        butterfly_base(),
        vec![butterfly_correction()],
        vec![vec![qi(0)], vec![q(1, 16)]],
    )
    .unwrap()
}
