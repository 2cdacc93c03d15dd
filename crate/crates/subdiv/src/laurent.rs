//! Sparse multivariate Laurent polynomials with exact rational coefficients.
//!
//! A subdivision mask `(a_α)` is identified with its symbol
//! `a(z) = Σ_α a_α z^α`, a Laurent polynomial on `(C∖{0})^s`. This module
//! provides the symbol algebra (evaluation, derivatives, ring operations,
//! exact univariate division), the dense shift-normalised [`Mask`] view, and
//! [`ParamSymbol`]: a family `a(z, ω) = a₀(z) + Σ_j ω_j a_j(z)` that depends
//! affinely on a parameter `ω` ranging over a convex polytope given by its
//! vertices.
//!
//! Canonical form invariant: the term map never stores a zero coefficient, so
//! structural equality coincides with mathematical equality.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_rational, qi, to_f64, Q};
use crate::simplex::{solve_lp, LpOutcome};

/// Exponent vector of a single Laurent term, one entry per variable.
pub type MultiIndex = Vec<i64>;

/// Sparse Laurent polynomial in `dim` variables over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Q>,
}

impl LaurentPoly {
    /// The zero polynomial in `dim` variables.
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The constant one.
    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Q::one())
    }

    /// A constant polynomial.
    pub fn constant(dim: usize, c: Q) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The single term `c·z^exps`.
    pub fn monomial(exps: MultiIndex, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Q)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when no terms remain.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Q)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `z^exps` (zero when absent).
    pub fn coeff(&self, exps: &[i64]) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    /// Sum of all coefficients, i.e. the value at `(1, …, 1)`.
    pub fn coefficient_sum(&self) -> Q {
        self.terms.values().fold(Q::zero(), |acc, c| acc + c)
    }

    /// Smallest and largest exponent per coordinate, `None` for the zero poly.
    pub fn support(&self) -> Option<(MultiIndex, MultiIndex)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for e in it {
            for j in 0..self.dim {
                lo[j] = lo[j].min(e[j]);
                hi[j] = hi[j].max(e[j]);
            }
        }
        Some((lo, hi))
    }

    /// Sum over all coordinates of the support box widths; 0 for monomials
    /// and the zero polynomial. Bounds the total degree span.
    pub fn degree_span(&self) -> i64 {
        match self.support() {
            None => 0,
            Some((lo, hi)) => (0..self.dim).map(|j| hi[j] - lo[j]).sum(),
        }
    }

    fn add_term(&mut self, exps: MultiIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Exact sum; errors when the variable counts differ.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    /// Exact difference; errors when the variable counts differ.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Exact product; errors when the variable counts differ.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: MultiIndex = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), v.clone() * c.clone()))
            .collect();
        LaurentPoly {
            dim: self.dim,
            terms,
        }
    }

    /// Multiply by the monomial `z^shift` (translates the mask support).
    pub fn shift(&self, shift: &[i64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| {
                let moved: MultiIndex = e.iter().zip(shift).map(|(x, s)| x + s).collect();
                (moved, v.clone())
            })
            .collect();
        Ok(LaurentPoly {
            dim: self.dim,
            terms,
        })
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..n {
            acc = acc.try_mul(self).expect("same dimension by construction");
        }
        acc
    }

    /// Evaluate at a point of `(C∖{0})^s`; a zero coordinate is rejected
    /// because negative exponents are undefined there.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        if let Some(coord) = z.iter().position(|zi| zi.norm_sqr() == 0.0) {
            // Positive-exponent-only polynomials would be fine at 0, but the
            // uniform rule keeps evaluation total on the Laurent domain.
            if self.terms.keys().any(|e| {
                e.iter()
                    .zip(z)
                    .any(|(&ej, zj)| ej < 0 && zj.norm_sqr() == 0.0)
            }) {
                return Err(Error::ZeroCoordinate { coord });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = Complex64::new(to_f64(c), 0.0);
            for (zi, &ei) in z.iter().zip(e) {
                term *= zi.powi(ei as i32);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Exact partial derivative `D^η`, where `η` lists one non-negative order
    /// per coordinate.
    pub fn derivative(&self, eta: &[i64]) -> Result<Self> {
        if eta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: eta.len(),
            });
        }
        if let Some(coord) = eta.iter().position(|&n| n < 0) {
            return Err(Error::NegativeDerivativeOrder {
                coord,
                got: eta[coord],
            });
        }
        let mut out = Self::zero(self.dim);
        'term: for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = e.clone();
            for (j, &nj) in eta.iter().enumerate() {
                // Falling factorial α_j (α_j − 1) ⋯ (α_j − n_j + 1).
                for k in 0..nj {
                    let factor = exps[j] - k;
                    if factor == 0 {
                        continue 'term;
                    }
                    coeff *= qi(factor);
                }
                exps[j] -= nj;
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }

    /// Dense shift-normalised view; errors on the zero polynomial.
    pub fn to_mask(&self) -> Result<Mask> {
        let (lo, hi) = self.support().ok_or(Error::EmptyMask)?;
        let shape: Vec<usize> = (0..self.dim)
            .map(|j| (hi[j] - lo[j] + 1) as usize)
            .collect();
        let len = shape.iter().product();
        let mut coeffs = vec![Q::zero(); len];
        for (e, c) in &self.terms {
            let idx: Vec<usize> = (0..self.dim).map(|j| (e[j] - lo[j]) as usize).collect();
            coeffs[row_major(&idx, &shape)] = c.clone();
        }
        Ok(Mask {
            dim: self.dim,
            offset: lo,
            shape,
            coeffs,
        })
    }

    /// Exact quotient for univariate operands; `None` when the division
    /// leaves a remainder. Divisor must be nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert_eq!(
            self.dim, 1,
            "exact division is implemented for one variable"
        );
        assert_eq!(divisor.dim, 1);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(1));
        }
        // Strip monomial factors so both operands become ordinary polynomials.
        let (p_lo, p_hi) = self.support().unwrap();
        let (d_lo, d_hi) = divisor.support().unwrap();
        let pn = (p_hi[0] - p_lo[0]) as usize;
        let dn = (d_hi[0] - d_lo[0]) as usize;
        if pn < dn {
            return None;
        }
        let mut num: Vec<Q> = (0..=pn)
            .map(|k| self.coeff(&[p_lo[0] + k as i64]))
            .collect();
        let den: Vec<Q> = (0..=dn)
            .map(|k| divisor.coeff(&[d_lo[0] + k as i64]))
            .collect();
        let lead = den[dn].clone();
        let mut quot = vec![Q::zero(); pn - dn + 1];
        for k in (0..=pn - dn).rev() {
            let factor = num[k + dn].clone() / lead.clone();
            if !factor.is_zero() {
                for j in 0..=dn {
                    let delta = factor.clone() * den[j].clone();
                    num[k + j] -= delta;
                }
            }
            quot[k] = factor;
        }
        if num.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let shift = p_lo[0] - d_lo[0];
        Some(
            Self::from_terms(
                1,
                quot.into_iter()
                    .enumerate()
                    .map(|(k, c)| (vec![shift + k as i64], c)),
            )
            .expect("dimension 1"),
        )
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("dimension mismatch in +")
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("dimension mismatch in -")
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("dimension mismatch in *")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if !mag.is_one() || is_const {
                write!(f, "{}", format_rational(&mag))?;
                if !is_const {
                    write!(f, "·")?;
                }
            }
            for (j, &ej) in e.iter().enumerate() {
                if ej == 0 {
                    continue;
                }
                if self.dim == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z{}", j + 1)?;
                }
                if ej != 1 {
                    write!(f, "^{ej}")?;
                }
            }
        }
        Ok(())
    }
}

/// The univariate smoothing factor `1 + z + … + z^(m−1)`.
///
/// Dividing a symbol by powers of this factor produces the difference-scheme
/// coefficients used by the transition-matrix restriction.
pub fn smoothing_factor(m: i64) -> Result<LaurentPoly> {
    if m < 2 {
        return Err(Error::InvalidDilation {
            m,
            reason: "smoothing factor needs m >= 2",
        });
    }
    LaurentPoly::from_terms(1, (0..m).map(|k| (vec![k], Q::one())))
}

fn row_major(idx: &[usize], shape: &[usize]) -> usize {
    let mut flat = 0;
    for (i, s) in idx.iter().zip(shape) {
        flat = flat * s + i;
    }
    flat
}

/// Dense, shift-normalised mask: coefficients on the box
/// `offset + {0, …, shape_j − 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    dim: usize,
    offset: MultiIndex,
    shape: Vec<usize>,
    coeffs: Vec<Q>,
}

impl Mask {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True exponent of the first dense entry.
    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    /// Dense box widths per coordinate.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Coefficient at the *true* (unshifted) index `alpha`, zero outside.
    pub fn coeff_at(&self, alpha: &[i64]) -> Q {
        debug_assert_eq!(alpha.len(), self.dim);
        let mut idx = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let rel = alpha[j] - self.offset[j];
            if rel < 0 || rel as usize >= self.shape[j] {
                return Q::zero();
            }
            idx.push(rel as usize);
        }
        self.coeffs[row_major(&idx, &self.shape)].clone()
    }

    /// Iterate `(true index, coefficient)` over nonzero entries.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (MultiIndex, &Q)> {
        self.coeffs.iter().enumerate().filter_map(move |(flat, c)| {
            if c.is_zero() {
                return None;
            }
            let mut rem = flat;
            let mut idx = vec![0i64; self.dim];
            for j in (0..self.dim).rev() {
                idx[j] = (rem % self.shape[j]) as i64 + self.offset[j];
                rem /= self.shape[j];
            }
            Some((idx, c))
        })
    }

    /// Back to the sparse symbol (exact round-trip).
    pub fn to_symbol(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.dim, self.iter_nonzero().map(|(e, c)| (e, c.clone())))
            .expect("indices carry the mask dimension")
    }
}

/// Affinely parameter-dependent symbol family
/// `a(z, ω) = base(z) + Σ_j ω_j · direction_j(z)` with `ω` constrained to the
/// convex hull of `domain` (a vertex list; no facet representation needed).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSymbol {
    base: LaurentPoly,
    directions: Vec<LaurentPoly>,
    domain: Vec<Vec<Q>>,
}

impl ParamSymbol {
    /// Build a family, validating dimensions: every direction matches the
    /// base's variable count, every vertex has one coordinate per direction,
    /// and at least one vertex is present.
    pub fn new(
        base: LaurentPoly,
        directions: Vec<LaurentPoly>,
        domain: Vec<Vec<Q>>,
    ) -> Result<Self> {
        for d in &directions {
            if d.dim() != base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: base.dim(),
                    got: d.dim(),
                });
            }
        }
        if domain.is_empty() {
            return Err(Error::Argument(
                "parameter domain needs at least one vertex".into(),
            ));
        }
        for v in &domain {
            if v.len() != directions.len() {
                return Err(Error::DimensionMismatch {
                    expected: directions.len(),
                    got: v.len(),
                });
            }
        }
        Ok(ParamSymbol {
            base,
            directions,
            domain,
        })
    }

    /// A parameter-free family wrapping one fixed symbol.
    pub fn stationary(symbol: LaurentPoly) -> Self {
        ParamSymbol {
            base: symbol,
            directions: Vec::new(),
            domain: vec![Vec::new()],
        }
    }

    pub fn base(&self) -> &LaurentPoly {
        &self.base
    }

    pub fn directions(&self) -> &[LaurentPoly] {
        &self.directions
    }

    /// Number of scalar parameters.
    pub fn param_dim(&self) -> usize {
        self.directions.len()
    }

    /// Number of variables of the underlying symbols.
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Vertices of the parameter polytope.
    pub fn domain(&self) -> &[Vec<Q>] {
        &self.domain
    }

    /// Replace the domain by new vertices (e.g. a sub-interval of interest).
    pub fn with_domain(&self, domain: Vec<Vec<Q>>) -> Result<Self> {
        Self::new(self.base.clone(), self.directions.clone(), domain)
    }

    /// The exact symbol at vertex `i` of the domain.
    pub fn vertex_symbol(&self, i: usize) -> Result<LaurentPoly> {
        let v = self
            .domain
            .get(i)
            .ok_or_else(|| Error::arg(format!("vertex index {i} out of range")))?;
        Ok(self.combine(v))
    }

    fn combine(&self, omega: &[Q]) -> LaurentPoly {
        let mut out = self.base.clone();
        for (d, w) in self.directions.iter().zip(omega) {
            out = out
                .try_add(&d.scale(w))
                .expect("directions validated at construction");
        }
        out
    }

    /// Exact instantiation at `ω`; the point must lie in the convex hull of
    /// the domain vertices (checked exactly for up to one parameter, by
    /// linear feasibility within 1e-12 otherwise).
    pub fn instantiate(&self, omega: &[Q]) -> Result<LaurentPoly> {
        if omega.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                got: omega.len(),
            });
        }
        self.check_in_domain(omega)?;
        Ok(self.combine(omega))
    }

    fn check_in_domain(&self, omega: &[Q]) -> Result<()> {
        match self.param_dim() {
            0 => Ok(()),
            1 => {
                let mut lo = self.domain[0][0].clone();
                let mut hi = lo.clone();
                for v in &self.domain[1..] {
                    if v[0] < lo {
                        lo = v[0].clone();
                    }
                    if v[0] > hi {
                        hi = v[0].clone();
                    }
                }
                let w = &omega[0];
                if *w < lo {
                    return Err(Error::OutsideDomain {
                        detail: format!(
                            "ω = {} violates ω ≥ {}",
                            format_rational(w),
                            format_rational(&lo)
                        ),
                    });
                }
                if *w > hi {
                    return Err(Error::OutsideDomain {
                        detail: format!(
                            "ω = {} violates ω ≤ {}",
                            format_rational(w),
                            format_rational(&hi)
                        ),
                    });
                }
                Ok(())
            }
            p => {
                // Feasibility of Σ t_i v_i = ω, Σ t_i = 1, t ≥ 0.
                let k = self.domain.len();
                let mut a = vec![vec![0.0; k]; p + 1];
                let mut b = vec![0.0; p + 1];
                for (i, v) in self.domain.iter().enumerate() {
                    for (j, coord) in v.iter().enumerate() {
                        a[j][i] = to_f64(coord);
                    }
                    a[p][i] = 1.0;
                }
                for (j, w) in omega.iter().enumerate() {
                    b[j] = to_f64(w);
                }
                b[p] = 1.0;
                match solve_lp(&a, &b, &vec![0.0; k], 1e-12) {
                    LpOutcome::Optimal { .. } => Ok(()),
                    _ => Err(Error::OutsideDomain {
                        detail: format!(
                            "ω = ({}) is not a convex combination of the {} domain vertices",
                            omega
                                .iter()
                                .map(format_rational)
                                .collect::<Vec<_>>()
                                .join(", "),
                            k
                        ),
                    }),
                }
            }
        }
    }

    /// Union of the support boxes of all vertex symbols (`None` if every
    /// vertex symbol vanishes identically).
    pub fn union_support(&self) -> Option<(MultiIndex, MultiIndex)> {
        let mut acc: Option<(MultiIndex, MultiIndex)> = None;
        for i in 0..self.domain.len() {
            let sym = self.vertex_symbol(i).expect("index in range");
            if let Some((lo, hi)) = sym.support() {
                acc = Some(match acc {
                    None => (lo, hi),
                    Some((mut alo, mut ahi)) => {
                        for j in 0..self.dim() {
                            alo[j] = alo[j].min(lo[j]);
                            ahi[j] = ahi[j].max(hi[j]);
                        }
                        (alo, ahi)
                    }
                });
            }
        }
        acc
    }
}
