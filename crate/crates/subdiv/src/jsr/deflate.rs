//! Exact polynomial deflation of difference-matrix families.
//!
//! When a mask carries more sum rules than the difference order in use, the
//! difference family keeps sampled polynomials as common left "eigen-rows":
//! for `u_e = (αᵉ)_α` the row `u_eᵀA` is again a polynomial sample of degree
//! ≤ e. The flag `U_d = span{u_0,…,u_d}` is then left-invariant for every
//! member, so the family is simultaneously block-triangular: the quotient
//! action on the flag is triangular with *exact rational* diagonal entries,
//! and the complementary block is the restriction to
//! `W = {x : u_eᵀx = 0, e ≤ d}`, which has an exact rational basis. The
//! joint spectral radius of the family is exactly
//! `max(radius of the restriction, max |quotient diagonal|)`.
//!
//! Everything here is verified in rational arithmetic: a flag level is
//! accepted only when the membership identity holds exactly for all members,
//! and the block decomposition is re-checked entry by entry. The only
//! rounding is the final conversion of the restricted blocks to `f64`.

use num_traits::{One, Zero};

use crate::exact::{to_f64, Q};
use crate::transition::RatMatrix;
use nalgebra::DMatrix;

pub(crate) struct Deflation {
    /// Highest polynomial degree in the invariant flag.
    pub flag_degree: usize,
    /// Exact spectral radius of the (triangular) quotient action.
    pub quotient_radius: Q,
    /// Restricted family on the complement, converted to floating point.
    pub restricted: Vec<DMatrix<f64>>,
}

/// Attempt the deflation. Returns `None` when not even constants are a
/// common left eigen-row (no extra sum rules to exploit).
pub(crate) fn polynomial_deflation(exact: &[RatMatrix]) -> Option<Deflation> {
    let n = exact[0].nrows();
    if n < 2 || exact.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return None;
    }
    // Powers α^e for α = 0..n−1, built incrementally.
    let mut powers: Vec<Vec<Q>> = vec![vec![Q::one(); n]];
    let mut flag_degree: Option<usize> = None;
    let mut quotient_radius = Q::zero();
    'levels: for e in 0..n - 1 {
        if e > 0 {
            let prev = &powers[e - 1];
            powers.push(
                (0..n)
                    .map(|alpha| prev[alpha].clone() * Q::from_integer((alpha as i64).into()))
                    .collect(),
            );
        }
        let mut diag_entries = Vec::with_capacity(exact.len());
        for a in exact {
            // Row u_eᵀA.
            let row: Vec<Q> = (0..n)
                .map(|beta| {
                    (0..n).fold(Q::zero(), |acc, alpha| {
                        acc + powers[e][alpha].clone() * a.get(alpha, beta)
                    })
                })
                .collect();
            // Solve for combination coefficients on the first e+1 columns
            // (a Vandermonde system, always nonsingular), then verify the rest.
            let vand: Vec<Vec<Q>> = (0..=e)
                .map(|beta| (0..=e).map(|f| powers[f][beta].clone()).collect())
                .collect();
            let rhs: Vec<Q> = row[..=e].to_vec();
            let coeffs = q_solve(vand, rhs)?;
            for beta in e + 1..n {
                let predicted = (0..=e).fold(Q::zero(), |acc, f| {
                    acc + coeffs[f].clone() * powers[f][beta].clone()
                });
                if predicted != row[beta] {
                    break 'levels;
                }
            }
            diag_entries.push(coeffs[e].clone());
        }
        flag_degree = Some(e);
        for c in diag_entries {
            let mag = if c < Q::zero() { -c } else { c };
            if mag > quotient_radius {
                quotient_radius = mag;
            }
        }
    }
    let d = flag_degree?;
    let r = d + 1;

    // Rational basis of W from the Vandermonde null space: with S the leading
    // r×r block and T the trailing r×(n−r) block of the sample matrix, the
    // columns are [−S⁻¹T; I].
    let mut top = vec![vec![Q::zero(); n - r]; r];
    for j in 0..n - r {
        let rhs: Vec<Q> = (0..r).map(|f| powers[f][r + j].clone()).collect();
        let s: Vec<Vec<Q>> = (0..r)
            .map(|f| (0..r).map(|beta| powers[f][beta].clone()).collect())
            .collect();
        let sol = q_solve(s, rhs)?;
        for (f, value) in sol.into_iter().enumerate() {
            top[f][j] = -value;
        }
    }
    let basis_entry = |i: usize, j: usize| -> Q {
        if i < r {
            top[i][j].clone()
        } else if i - r == j {
            Q::one()
        } else {
            Q::zero()
        }
    };

    // Restriction: A·B = B·R with B's lower block the identity, so R is the
    // lower block of A·B; the upper block is then verified exactly.
    let mut restricted = Vec::with_capacity(exact.len());
    for a in exact {
        let mut ab = vec![vec![Q::zero(); n - r]; n];
        for i in 0..n {
            for j in 0..n - r {
                let mut acc = Q::zero();
                for k in 0..n {
                    let b = basis_entry(k, j);
                    if !b.is_zero() {
                        acc += a.get(i, k).clone() * b;
                    }
                }
                ab[i][j] = acc;
            }
        }
        let rmat: Vec<Vec<Q>> = (0..n - r).map(|i| ab[r + i].clone()).collect();
        // Verify the top block: (A·B)[0..r] must equal top·R exactly.
        for i in 0..r {
            for j in 0..n - r {
                let mut acc = Q::zero();
                for k in 0..n - r {
                    acc += top[i][k].clone() * rmat[k][j].clone();
                }
                if acc != ab[i][j] {
                    return None;
                }
            }
        }
        restricted.push(DMatrix::from_fn(n - r, n - r, |i, j| to_f64(&rmat[i][j])));
    }
    Some(Deflation {
        flag_degree: d,
        quotient_radius,
        restricted,
    })
}

/// Exact Gaussian elimination with partial (first nonzero) pivoting.
fn q_solve(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !m[row][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for j in col..n {
            m[col][j] = m[col][j].clone() / p.clone();
        }
        rhs[col] = rhs[col].clone() / p;
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let f = m[row][col].clone();
                for j in col..n {
                    m[row][j] = m[row][j].clone() - f.clone() * m[col][j].clone();
                }
                rhs[row] = rhs[row].clone() - f * rhs[col].clone();
            }
        }
    }
    Some(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::laurent::ParamSymbol;
    use crate::presets;
    use crate::transition::restrict_univariate;

    #[test]
    fn rational_solver_inverts_a_vandermonde_system() {
        // Coefficients of p with p(0)=1, p(1)=2, p(2)=5 → 1 + x².
        let m = vec![
            vec![qi(1), qi(0), qi(0)],
            vec![qi(1), qi(1), qi(1)],
            vec![qi(1), qi(2), qi(4)],
        ];
        let sol = q_solve(m, vec![qi(1), qi(2), qi(5)]).unwrap();
        assert_eq!(sol, vec![qi(1), qi(0), qi(1)]);
    }

    #[test]
    fn interpolatory_vertex_deflates_with_flag_degree_one() {
        // The interpolatory four-point mask has four sum rules but the
        // difference family only consumes two, leaving constants and linear
        // samples as common left eigen-rows with values 1/4 and 1/8.
        let ps = ParamSymbol::stationary(presets::dd4_symbol());
        let fam = restrict_univariate(&ps, 2, 1).unwrap();
        let defl = polynomial_deflation(fam.exact_members().unwrap()).unwrap();
        assert_eq!(defl.flag_degree, 1);
        assert_eq!(defl.quotient_radius, q(1, 4));
        assert_eq!(defl.restricted.len(), 2);
        assert_eq!(defl.restricted[0].nrows(), 2);
        // The defective 1/4 splits: one copy goes to the quotient, the
        // restriction keeps a simple 1/4.
        let eigs = defl.restricted[0].complex_eigenvalues();
        let mut mags: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        mags.sort_by(f64::total_cmp);
        assert!((mags[1] - 0.25).abs() < 1e-12);
        assert!((mags[0] - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn generic_vertex_family_does_not_deflate() {
        // At ω = 3/64 the mask has exactly two sum rules, so the difference
        // family has no residual polynomial structure.
        let ps = presets::four_point_family()
            .with_domain(vec![vec![q(3, 64)], vec![q(1, 16)]])
            .unwrap();
        let fam = restrict_univariate(&ps, 2, 1).unwrap();
        assert!(polynomial_deflation(fam.exact_members().unwrap()).is_none());
    }
}
