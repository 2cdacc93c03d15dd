//! Invariant-polytope certificates for joint-spectral-radius upper bounds.
//!
//! Scale the family by a trial value `γ̂`. If a finite symmetric polytope
//! `absco(V)` satisfies `BᵢV ⊆ (1+η)·absco(V)` for every scaled member, the
//! polytope norm it induces certifies `JSR ≤ γ̂·(1+η)`. Starting from seed
//! vertices (typically the leading eigenvector of a witness product and its
//! images along the word), the closure is grown by testing each new image
//! with an exact-arithmetic-free gauge evaluation: a small linear program
//! `min Σ(p+q)  s.t.  V(p−q) = u, p,q ≥ 0`, whose optimum is the gauge of
//! `u` in `absco(V)`. Growth stops with success when no image escapes, or
//! with failure when the vertex budget is exceeded.

use nalgebra::{DMatrix, DVector};

use crate::simplex::{solve_lp, LpOutcome};

use super::map_deterministic;

/// Multiplicative slack admitted by the gauge test; it is folded into the
/// certified bound by the caller.
pub(crate) const GAUGE_SLACK: f64 = 1e-10;

pub(crate) enum PolytopeOutcome {
    /// Closure reached: `JSR(scaled) ≤ 1 + GAUGE_SLACK`.
    Certified { vertices: usize },
    /// Vertex budget exceeded before closure; inconclusive.
    CapExceeded,
    /// No usable seed direction (e.g. a numerically nilpotent witness).
    Inconclusive,
}

/// Gauge of `u` in `absco(V)`: `min Σ(pⱼ+qⱼ)` subject to `Σⱼ vⱼ(pⱼ−qⱼ) = u`.
/// Returns `f64::INFINITY` when `u` is outside the span.
pub(crate) fn gauge(vertices: &[DVector<f64>], u: &DVector<f64>) -> f64 {
    let n = u.len();
    let k = vertices.len();
    let mut rows = vec![vec![0.0f64; 2 * k]; n];
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..n {
            rows[i][j] = v[i];
            rows[i][k + j] = -v[i];
        }
    }
    let b: Vec<f64> = u.iter().copied().collect();
    let c = vec![1.0f64; 2 * k];
    match solve_lp(&rows, &b, &c, 1e-11) {
        LpOutcome::Optimal { objective, .. } => objective,
        LpOutcome::Infeasible | LpOutcome::Stalled => f64::INFINITY,
    }
}

/// Grow the closure of `seeds` under the scaled family. Deterministic for
/// every thread count: images are computed batch-wise per vertex and merged
/// in member order.
pub(crate) fn certify_gauge(
    scaled: &[DMatrix<f64>],
    seeds: &[DVector<f64>],
    cap: usize,
    threads: usize,
) -> PolytopeOutcome {
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for s in seeds {
        let norm = s.norm();
        if norm > 1e-14 {
            let v = s / norm;
            if !duplicate(&vertices, &v) {
                vertices.push(v);
            }
        }
    }
    if vertices.is_empty() {
        return PolytopeOutcome::Inconclusive;
    }
    let mut next_to_test = 0usize;
    while next_to_test < vertices.len() {
        if vertices.len() > cap {
            return PolytopeOutcome::CapExceeded;
        }
        let v = vertices[next_to_test].clone();
        next_to_test += 1;
        let images = map_deterministic(scaled, threads, |b| b * &v);
        for u in images {
            if u.norm() <= 1e-14 {
                continue;
            }
            if gauge(&vertices, &u) > 1.0 + GAUGE_SLACK {
                vertices.push(u);
            }
        }
    }
    PolytopeOutcome::Certified {
        vertices: vertices.len(),
    }
}

fn duplicate(vertices: &[DVector<f64>], v: &DVector<f64>) -> bool {
    vertices
        .iter()
        .any(|w| (w - v).norm() < 1e-12 || (w + v).norm() < 1e-12)
}

/// Leading invariant directions of `product` by power iteration, falling back
/// to a two-dimensional orthogonal iteration when the dominant eigenvalue is
/// a complex pair. Deterministic start vectors; empty when the product is
/// numerically nilpotent.
pub(crate) fn leading_directions(product: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = product.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.01 * i as f64);
    v /= v.norm();
    for _ in 0..400 {
        let w = product * &v;
        let norm = w.norm();
        if norm <= 1e-300 {
            return Vec::new();
        }
        let w = w / norm;
        let lambda = v.dot(&(product * &v));
        let resid = (product * &v - &v * lambda).norm();
        if resid <= 1e-13 * lambda.abs().max(norm) {
            return vec![v];
        }
        v = w;
    }
    // Complex dominant pair: iterate a 2-plane and return both spanning vectors.
    let mut q = DMatrix::from_fn(n, 2.min(n), |i, j| {
        1.0 + 0.01 * i as f64 + if j == 1 { 0.03 * (i * i) as f64 } else { 0.0 }
    });
    for _ in 0..400 {
        let z = product * &q;
        let qr = z.qr();
        q = qr.q();
    }
    (0..q.ncols()).map(|j| q.column(j).into_owned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_matches_hand_values() {
        let v1 = DVector::from_vec(vec![1.0, 0.0]);
        let v2 = DVector::from_vec(vec![0.0, 1.0]);
        let verts = vec![v1, v2];
        let g = gauge(&verts, &DVector::from_vec(vec![0.5, -0.5]));
        assert!((g - 1.0).abs() < 1e-9);
        let g = gauge(&verts, &DVector::from_vec(vec![2.0, 0.0]));
        assert!((g - 2.0).abs() < 1e-9);
    }

    #[test]
    fn contraction_certifies_with_its_own_eigenvector() {
        // Radius 0.9 < 1: closure from the eigenvector terminates.
        let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.5, 0.0, 0.3]);
        let seeds = leading_directions(&a);
        assert_eq!(seeds.len(), 1);
        match certify_gauge(&[a], &seeds, 100, 1) {
            PolytopeOutcome::Certified { .. } => {}
            _ => panic!("expected certification"),
        }
    }

    #[test]
    fn expansion_exceeds_the_cap() {
        let a = DMatrix::from_row_slice(2, 2, &[1.05, 1.0, 0.0, 1.02]);
        let seeds = vec![DVector::from_vec(vec![0.0, 1.0])];
        match certify_gauge(&[a], &seeds, 30, 1) {
            PolytopeOutcome::CapExceeded => {}
            _ => panic!("expected cap overflow"),
        }
    }

    #[test]
    fn rotation_needs_polygonal_closure() {
        // 45° rotation scaled to 0.999: closure is a regular polygon.
        let c = (0.999f64 / 2.0f64.sqrt()) * 1.0;
        let a = DMatrix::from_row_slice(2, 2, &[c, -c, c, c]);
        let seeds = vec![DVector::from_vec(vec![1.0, 0.0])];
        match certify_gauge(&[a], &seeds, 64, 1) {
            PolytopeOutcome::Certified { vertices } => assert!(vertices >= 4),
            _ => panic!("expected certification"),
        }
    }
}
