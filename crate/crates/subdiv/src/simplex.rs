//! Minimal dense two-phase simplex solver.
//!
//! Solves `min cᵀx  s.t.  Ax = b, x ≥ 0` for the small, dense programs that
//! appear in this crate: gauge evaluations of symmetric polytopes (a handful
//! of equality rows, up to ~2000 columns) and convex-hull membership tests.
//! Bland's rule is used throughout, so the iteration is deterministic and
//! cannot cycle.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal {
        objective: f64,
        x: Vec<f64>,
    },
    Infeasible,
    /// The iteration cap was hit; callers must treat this conservatively.
    Stalled,
}

/// Solve `min cᵀx  s.t.  Ax = b, x ≥ 0`.
///
/// `a` is row-major with `b.len()` rows and `c.len()` columns. `tol` separates
/// "zero" from "nonzero" in pivoting and feasibility decisions.
pub(crate) fn solve_lp(a: &[Vec<f64>], b: &[f64], c: &[f64], tol: f64) -> LpOutcome {
    let m = b.len();
    let n = c.len();
    debug_assert!(a.len() == m && a.iter().all(|row| row.len() == n));

    // Tableau: m constraint rows over n real + m artificial columns, then rhs.
    let width = n + m + 1;
    let mut t = vec![vec![0.0f64; width]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimise the sum of artificials. Expressed in reduced form the
    // cost row is minus the sum of the constraint rows.
    for j in 0..width {
        let mut s = 0.0;
        for i in 0..m {
            s += t[i][j];
        }
        t[m][j] = -s;
    }
    for j in n..n + m {
        t[m][j] = 0.0;
    }
    let cap = 200 * (n + m + 1);
    if !pivot_until_optimal(&mut t, &mut basis, n + m, tol, cap) {
        return LpOutcome::Stalled;
    }
    if t[m][width - 1] < -tol {
        return LpOutcome::Infeasible;
    }

    // Drive any artificial still in the basis out, or drop its (redundant) row.
    for i in 0..m {
        if basis[i] >= n {
            let col = (0..n).find(|&j| t[i][j].abs() > tol);
            match col {
                Some(j) => {
                    pivot(&mut t, &mut basis, i, j);
                }
                None => {
                    for j in 0..width {
                        t[i][j] = 0.0;
                    }
                }
            }
        }
    }

    // Phase 2: install the true reduced costs (artificials barred by +inf
    // surrogate: simply never let them enter — see pivot_until_optimal's bar).
    for j in 0..width {
        t[m][j] = 0.0;
    }
    for (j, &cj) in c.iter().enumerate() {
        t[m][j] = cj;
    }
    for i in 0..m {
        let bi = basis[i];
        if bi < n && c[bi] != 0.0 {
            let factor = c[bi];
            for j in 0..width {
                t[m][j] -= factor * t[i][j];
            }
        }
    }
    if !pivot_until_optimal(&mut t, &mut basis, n, tol, cap) {
        return LpOutcome::Stalled;
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][width - 1];
        }
    }
    let objective: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { objective, x }
}

/// Bland-rule simplex loop over the first `allowed` columns.
/// Returns false when the iteration cap is exceeded.
fn pivot_until_optimal(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    allowed: usize,
    tol: f64,
    cap: usize,
) -> bool {
    let m = basis.len();
    let width = t[0].len();
    for _ in 0..cap {
        // Bland: first column with a negative reduced cost.
        let Some(enter) = (0..allowed).find(|&j| t[m][j] < -tol) else {
            return true;
        };
        // Ratio test; ties broken by the smallest basis index (Bland again).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > tol {
                let ratio = t[i][width - 1] / t[i][enter];
                let better = ratio < best - tol * best.abs().max(1.0)
                    || ((ratio - best).abs() <= tol * best.abs().max(1.0)
                        && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            // Unbounded direction: cannot happen for our gauge programs, but
            // report as optimal-at-infinity via stall to stay conservative.
            return false;
        };
        pivot(t, basis, row, enter);
    }
    false
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = t[0].len();
    let p = t[row][col];
    for j in 0..width {
        t[row][j] /= p;
    }
    t[row][col] = 1.0;
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for j in 0..width {
                    t[i][j] -= f * t[row][j];
                }
                t[i][col] = 0.0;
            }
        }
    }
    if row < basis.len() {
        basis[row] = col;
    }
}
