//! Joint spectral radius computation with certified two-sided bounds.
//!
//! The pipeline combines five bound producers, cheapest first:
//! 1. spectral radii of single members (lower bounds, with a witness);
//! 2. depth-one operator norms in the ∞-, 1- and 2-norms (upper);
//! 3. a Perron-style diagonally scaled infinity norm (upper);
//! 4. an ellipsoid norm from the Gramian fixed point, bisected geometrically
//!    (upper, and the search norm for the next stage);
//! 5. best-first branch and bound over products (tightens the lower bound
//!    and yields a witness word), followed by an invariant-polytope gauge
//!    certificate seeded with the witness's leading eigenvector (tightens
//!    the upper bound toward the lower one).
//!
//! For exact difference families, an exact rational polynomial deflation is
//! applied first when the mask carries surplus sum rules; this removes
//! defective leading eigenvalues caused by residual polynomial directions
//! (where no tight polytope certificate could exist) and contributes the
//! quotient radius exactly.
//!
//! Every returned interval `[lower, upper]` is sound up to floating-point
//! rounding in the documented places: eigenvalue and singular-value
//! computations, the linear-programming gauge (slack `1e-10`, folded into
//! the reported upper bound), and the final `f64` rounding of exact data.
//! Stages 4 and 5 and the Gramian iteration scale their default budgets
//! with member size, so large families fall back to the cheap norm bounds
//! instead of stalling; every early exit keeps the bounds already proved.
//! Determinism: results are bit-identical for any `SUBDIV_JSR_THREADS`
//! setting, because all parallel maps are chunked and merged in index order.

mod deflate;
mod gripenberg;
mod norms;
mod polytope;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::transition::TransitionFamily;

/// A finite set of equally sized square matrices.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    size: usize,
    members: Vec<DMatrix<f64>>,
}

impl MatrixFamily {
    pub fn new(members: Vec<DMatrix<f64>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidFamily {
                reason: "family must contain at least one matrix".into(),
            });
        }
        let size = members[0].nrows();
        for m in &members {
            if m.nrows() != m.ncols() || m.nrows() != size {
                return Err(Error::InvalidFamily {
                    reason: format!(
                        "members must be square of equal size; found {}x{} next to {}x{}",
                        m.nrows(),
                        m.ncols(),
                        size,
                        size
                    ),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteEntries);
            }
        }
        Ok(MatrixFamily { size, members })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[DMatrix<f64>] {
        &self.members
    }

    /// The family with every member multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        MatrixFamily {
            size: self.size,
            members: self.members.iter().map(|m| m * factor).collect(),
        }
    }
}

/// Options for [`jsr_bounds`].
#[derive(Debug, Clone)]
pub struct JsrOptions {
    /// Longest product length explored by branch and bound.
    pub max_depth: usize,
    /// Relative convergence target for `upper/lower − 1`.
    pub tol: f64,
    /// Node budget for branch and bound (`None`: scaled to matrix size).
    pub node_budget: Option<usize>,
    /// Vertex budget per polytope certificate attempt.
    pub polytope_cap: usize,
    /// Return early (without tightening) once the lower bound reaches this
    /// threshold; used by callers that only need to rule a value out.
    pub bail_above: Option<f64>,
    /// Worker threads (`None`: read `SUBDIV_JSR_THREADS`, default 1).
    pub threads: Option<usize>,
}

impl Default for JsrOptions {
    fn default() -> Self {
        JsrOptions {
            max_depth: 20,
            tol: 1e-6,
            node_budget: None,
            polytope_cap: 700,
            bail_above: None,
            threads: None,
        }
    }
}

/// Certified two-sided joint-spectral-radius bounds.
#[derive(Debug, Clone)]
pub struct JsrBounds {
    pub lower: f64,
    pub upper: f64,
    /// Member indices of the product attaining the lower bound, in
    /// multiplication order (left to right).
    pub witness: Vec<usize>,
    /// Human-readable description of how the upper bound is certified.
    pub certificate: String,
    pub depth_reached: usize,
    pub nodes_explored: usize,
    /// Whether `upper ≤ lower·(1+tol)` was reached.
    pub converged: bool,
}

/// Spectral radius via complex eigenvalues (0 for the empty matrix).
///
/// The unsymmetric QR iteration can stagnate on structured matrices, so the
/// Schur decomposition runs with an iteration cap; when it gives up, the
/// returned value falls back to the largest trace-power bound
/// `(|tr Aᵏ|/n)^{1/k}`, `k ≤ 256`, which never exceeds the radius.  Callers
/// treating the result as a lower bound stay sound either way.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let cap = 100 * m.nrows().max(10);
    match nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, cap) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm())),
        None => trace_power_radius_lower(m),
    }
}

/// Sound lower bound on the spectral radius from `|tr Aᵏ| ≤ n·ρ(A)ᵏ`,
/// maximized over `k = 1, 2, 4, …, 256` with rescaling between squarings.
fn trace_power_radius_lower(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows() as f64;
    let mut p = a.clone();
    let mut log_scale = 0.0f64; // A^k = e^{log_scale} · p
    let mut k = 1.0f64;
    let mut best = 0.0f64;
    for _ in 0..9 {
        let tr = p.trace().abs();
        if tr > 0.0 {
            best = best.max(((tr.ln() + log_scale - n.ln()) / k).exp());
        }
        let scale = p.abs().max();
        if !scale.is_finite() || scale == 0.0 {
            break;
        }
        p /= scale;
        log_scale = 2.0 * (log_scale + scale.ln());
        p = &p * p.clone();
        k *= 2.0;
    }
    best
}

/// Number of worker threads: explicit option, else `SUBDIV_JSR_THREADS`,
/// else 1. Thread count never changes results, only wall time.
pub(crate) fn resolve_threads(opt: Option<usize>) -> usize {
    opt.or_else(|| {
        std::env::var("SUBDIV_JSR_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .map(|t: usize| t.clamp(1, 64))
    .unwrap_or(1)
}

/// Order-preserving parallel map: the input is split into contiguous chunks,
/// one scoped thread per chunk, and outputs are concatenated in chunk order,
/// so the result is identical for every thread count.
pub(crate) fn map_deterministic<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let threads = threads.clamp(1, 64);
    if threads == 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|slice| scope.spawn(|| slice.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().expect("jsr worker thread panicked"));
        }
        out
    })
}

/// Two-sided bounds for the joint spectral radius of `fam`.
pub fn jsr_bounds(fam: &MatrixFamily, opts: &JsrOptions) -> Result<JsrBounds> {
    let threads = resolve_threads(opts.threads);
    let n = fam.size();
    if n == 0 {
        return Ok(JsrBounds {
            lower: 0.0,
            upper: 0.0,
            witness: Vec::new(),
            certificate: "zero-dimensional family".into(),
            depth_reached: 0,
            nodes_explored: 0,
            converged: true,
        });
    }
    let members = fam.members();

    // Stage 1: depth-one radii and norms.
    let mut lower = 0.0f64;
    let mut witness = vec![0usize];
    for (i, a) in members.iter().enumerate() {
        let rho = spectral_radius(a);
        if rho > lower {
            lower = rho;
            witness = vec![i];
        }
    }
    let (mut upper, mut certificate) = {
        let (u, name) = norms::depth_one_upper(members);
        (u, name.to_string())
    };
    if let Some(threshold) = opts.bail_above {
        if lower >= threshold {
            return Ok(JsrBounds {
                lower,
                upper: upper.max(lower),
                witness,
                certificate: format!("{certificate} (stopped early: lower bound ≥ {threshold})"),
                depth_reached: 1,
                nodes_explored: members.len(),
                converged: upper <= lower * (1.0 + opts.tol),
            });
        }
    }

    // Stage 2: Perron-scaled infinity norm.
    let perron = norms::perron_scaled_upper(members, 80);
    if perron < upper {
        upper = perron;
        certificate = "diagonally scaled infinity norm".into();
    }

    // Stage 3: ellipsoid norm by Gramian bisection.  The spectral norm guides
    // the product search well but costs an SVD per node; past moderate sizes
    // the row-sum norm prunes nearly as well for a fraction of the work.
    let mut search_norm: Box<dyn Fn(&DMatrix<f64>) -> f64 + Sync> = if n <= 64 {
        Box::new(norms::norm_two)
    } else {
        Box::new(norms::norm_inf)
    };
    if upper > lower * (1.0 + opts.tol) {
        let (improved, ellipsoid) = norms::gramian_bisect(members, lower, upper, opts.tol, 8);
        if improved < upper {
            upper = improved;
            certificate = "ellipsoid (Gramian fixed-point) norm".into();
        }
        if let Some(e) = ellipsoid {
            search_norm = Box::new(move |a| e.apply(a));
        }
    }

    // Stage 4: branch and bound over products.  The default budget counts
    // nodes for small members but switches to a flop budget once products
    // themselves become expensive (a node costs ~16·k·n³ flops).
    let budget = opts.node_budget.unwrap_or_else(|| {
        let by_nodes = (4_000_000 / (n * n).max(1)).clamp(2_000, 60_000);
        let per_node = 16usize
            .saturating_mul(members.len().max(1))
            .saturating_mul(n.saturating_pow(3))
            .max(1);
        by_nodes.min((4_000_000_000 / per_node).max(50))
    });
    let cfg = gripenberg::BranchConfig {
        max_depth: opts.max_depth,
        node_budget: budget,
        slack: opts.tol,
        threads,
    };
    let branch = gripenberg::branch_and_bound(members, search_norm.as_ref(), lower, witness, &cfg);
    lower = branch.lower;
    witness = branch.witness;
    if branch.upper < upper {
        upper = branch.upper;
        certificate = format!(
            "product norms along a pruned branch-and-bound tree ({} nodes{})",
            branch.nodes,
            if branch.exhausted { ", exhausted" } else { "" }
        );
    }

    // Stage 5: polytope gauge certificate, seeded by the witness product.
    // Vertex counts needed for a tight gauge grow with the dimension; past
    // 64 the membership programs dominate everything else, so leave the norm
    // bounds in place instead.
    if n <= 64 && upper > lower * (1.0 + opts.tol) && lower > 1e-300 {
        let mut floor = lower * (1.0 + 0.5 * opts.tol);
        let mut ceil = upper;
        for attempt in 0..7 {
            let gamma = if attempt == 0 {
                floor
            } else {
                (floor * ceil).sqrt()
            };
            if gamma >= ceil {
                break;
            }
            let scaled: Vec<DMatrix<f64>> = members.iter().map(|a| a / gamma).collect();
            let seeds = witness_seeds(&scaled, &witness);
            match polytope::certify_gauge(&scaled, &seeds, opts.polytope_cap, threads) {
                polytope::PolytopeOutcome::Certified { vertices } => {
                    let certified = gamma * (1.0 + polytope::GAUGE_SLACK);
                    if certified < upper {
                        upper = certified;
                        certificate = format!("invariant polytope gauge with {vertices} vertices");
                    }
                    ceil = gamma;
                }
                _ => floor = gamma,
            }
            if upper <= lower * (1.0 + opts.tol) {
                break;
            }
        }
    }

    upper = upper.max(lower);
    Ok(JsrBounds {
        lower,
        upper,
        witness,
        certificate,
        depth_reached: branch.depth_reached,
        nodes_explored: branch.nodes,
        converged: upper <= lower * (1.0 + opts.tol) + 1e-300,
    })
}

/// Seed vertices for the polytope stage: the leading directions of the
/// witness product plus their images along the witness word (the analogue of
/// including all cyclic permutations of the word).
fn witness_seeds(scaled: &[DMatrix<f64>], witness: &[usize]) -> Vec<DVector<f64>> {
    if scaled.is_empty() || witness.is_empty() {
        return Vec::new();
    }
    let mut product = scaled[witness[0]].clone();
    for &i in &witness[1..] {
        product = &product * &scaled[i];
    }
    let mut seeds = polytope::leading_directions(&product);
    let mut images = Vec::new();
    for v in &seeds {
        let mut x = v.clone();
        for &i in witness.iter().rev().skip(1) {
            x = &scaled[i] * x;
            images.push(x.clone());
        }
    }
    seeds.extend(images);
    seeds
}

/// Bounds for the joint spectral radius of all members of a transition
/// family (vertices × cosets), applying exact polynomial deflation first
/// whenever exact matrices are available and the mask has surplus sum rules.
pub fn interval_family_jsr(tf: &TransitionFamily, opts: &JsrOptions) -> Result<JsrBounds> {
    if let Some(exact) = tf.exact_members() {
        if let Some(defl) = deflate::polynomial_deflation(exact) {
            let quotient = to_f64(&defl.quotient_radius);
            let inner_fam = MatrixFamily::new(if defl.restricted[0].nrows() == 0 {
                vec![DMatrix::zeros(0, 0); defl.restricted.len()]
            } else {
                defl.restricted.clone()
            })?;
            let mut bounds = jsr_bounds(&inner_fam, opts)?;
            bounds.lower = bounds.lower.max(quotient);
            bounds.upper = bounds.upper.max(quotient);
            bounds.converged = bounds.upper <= bounds.lower * (1.0 + opts.tol) + 1e-300;
            bounds.certificate = format!(
                "exact polynomial deflation (flag degree {}, quotient radius {}) + {}",
                defl.flag_degree,
                crate::exact::format_rational(&defl.quotient_radius),
                bounds.certificate
            );
            return Ok(bounds);
        }
    }
    jsr_bounds(&MatrixFamily::new(tf.members().to_vec())?, opts)
}

/// Search for a common invariant subspace of the family (a diagnostic for
/// near-reducible behavior). Candidate spans are eigenvector directions of
/// individual members for their real eigenvalues, closed under the action of
/// the whole family with the given residual tolerance. Returns the first
/// proper subspace found, as `(dimension, orthonormal basis columns)`.
pub fn common_invariant_subspace_probe(
    fam: &MatrixFamily,
    tol: f64,
) -> Option<(usize, DMatrix<f64>)> {
    let n = fam.size();
    if n == 0 {
        return None;
    }
    let scale = fam
        .members()
        .iter()
        .map(|m| m.abs().max())
        .fold(1.0f64, f64::max);
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for a in fam.members() {
        let mut reals: Vec<f64> = a
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= 1e-9 * scale)
            .map(|z| z.re)
            .collect();
        reals.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
        reals.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * scale);
        for lambda in reals {
            let shifted = a - DMatrix::<f64>::identity(n, n) * lambda;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.as_ref()?;
            let smallest = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .map(|(i, _)| i)?;
            candidates.push(vt.row(smallest).transpose());
        }
    }
    for cand in candidates {
        let norm = cand.norm();
        if norm <= 1e-12 {
            continue;
        }
        let mut basis: Vec<DVector<f64>> = vec![cand / norm];
        let mut grew = true;
        while grew && basis.len() < n {
            grew = false;
            for a in fam.members() {
                let mut k = 0;
                while k < basis.len() && basis.len() < n {
                    let mut w = a * &basis[k];
                    for b in &basis {
                        let c = b.dot(&w);
                        w -= b * c;
                    }
                    if w.norm() > tol * scale {
                        basis.push(w.normalize());
                        grew = true;
                    }
                    k += 1;
                }
            }
        }
        if basis.len() < n {
            let mut mat = DMatrix::zeros(n, basis.len());
            for (j, b) in basis.iter().enumerate() {
                mat.set_column(j, b);
            }
            return Some((basis.len(), mat));
        }
    }
    None
}
