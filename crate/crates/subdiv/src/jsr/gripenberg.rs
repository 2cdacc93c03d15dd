//! Best-first branch-and-bound over products (Gripenberg's algorithm).
//!
//! Every node is a word `w` over the family alphabet with its product
//! `P_w = A_{w₀}A_{w₁}⋯` and the branch value
//! `q(w) = min over nonempty prefixes u of ‖P_u‖^{1/|u|}` under one fixed
//! submultiplicative norm. Since `q` only shrinks along a branch, the
//! supremum of averaged spectral radii inside a subtree is ≤ `q(w)`, so a
//! branch may be pruned as soon as `q(w) ≤ γ_lo·(1+slack)`. On termination
//! the joint spectral radius lies in
//! `[γ_lo, max(γ_lo·(1+slack), max q over still-open nodes)]`.
//!
//! The search is batch-synchronous: each round pops a fixed-size batch of
//! highest-`q` nodes and expands their children (optionally on several
//! threads), merging results in index order, so the outcome is identical for
//! every thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;

use super::{map_deterministic, spectral_radius};

pub(crate) struct BranchConfig {
    pub max_depth: usize,
    pub node_budget: usize,
    /// Relative pruning slack; the final upper candidate is at least
    /// `γ_lo·(1+slack)`.
    pub slack: f64,
    pub threads: usize,
}

pub(crate) struct BranchResult {
    pub lower: f64,
    pub witness: Vec<usize>,
    /// Sound upper bound produced by the search.
    pub upper: f64,
    pub nodes: usize,
    pub depth_reached: usize,
    /// True when the tree was fully resolved (no budget interruption).
    pub exhausted: bool,
}

struct Node {
    q: f64,
    word: Vec<u16>,
    product: DMatrix<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.word == other.word
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on q; ties resolved shortest-word-first, then lexicographic
        // (reversed so the lexicographically smaller word pops first).
        self.q
            .total_cmp(&other.q)
            .then_with(|| other.word.len().cmp(&self.word.len()))
            .then_with(|| other.word.cmp(&self.word))
    }
}

const BATCH: usize = 64;

pub(crate) fn branch_and_bound(
    members: &[DMatrix<f64>],
    norm: &(dyn Fn(&DMatrix<f64>) -> f64 + Sync),
    lower_init: f64,
    witness_init: Vec<usize>,
    cfg: &BranchConfig,
) -> BranchResult {
    let mut lower = lower_init;
    let mut witness = witness_init;
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut nodes = 0usize;
    let mut depth_reached = 1usize;
    let mut capped_q = 0.0f64; // max q among depth-capped leaves
    let mut exhausted = true;

    // Depth-one roots.
    for (i, a) in members.iter().enumerate() {
        let rho = spectral_radius(a);
        if rho > lower {
            lower = rho;
            witness = vec![i];
        }
        heap.push(Node {
            q: norm(a),
            word: vec![i as u16],
            product: a.clone(),
        });
        nodes += 1;
    }

    while let Some(top) = heap.peek() {
        if top.q <= lower * (1.0 + cfg.slack) {
            // Everything still open is below the pruning line.
            heap.clear();
            break;
        }
        if nodes >= cfg.node_budget {
            exhausted = false;
            break;
        }
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match heap.pop() {
                Some(node) if node.q > lower * (1.0 + cfg.slack) => batch.push(node),
                Some(_) => {} // fell below the line while queued: prune
                None => break,
            }
        }
        let tasks: Vec<(usize, usize)> = (0..batch.len())
            .flat_map(|b| (0..members.len()).map(move |j| (b, j)))
            .collect();
        let children = map_deterministic(&tasks, cfg.threads, |&(b, j)| {
            let parent = &batch[b];
            let product = &parent.product * &members[j];
            let len = parent.word.len() + 1;
            let q = parent.q.min(norm(&product).powf(1.0 / len as f64));
            let rho = spectral_radius(&product).powf(1.0 / len as f64);
            (q, rho, product)
        });
        for ((b, j), (q, rho, product)) in tasks.into_iter().zip(children) {
            nodes += 1;
            let mut word = batch[b].word.clone();
            word.push(j as u16);
            depth_reached = depth_reached.max(word.len());
            if rho > lower {
                lower = rho;
                witness = word.iter().map(|&x| x as usize).collect();
            }
            if q <= lower * (1.0 + cfg.slack) {
                continue; // pruned: its subtree is bounded by the slack line
            }
            if word.len() >= cfg.max_depth {
                capped_q = capped_q.max(q);
                continue;
            }
            heap.push(Node { q, word, product });
        }
    }

    let open_q = heap
        .iter()
        .map(|n| n.q)
        .fold(0.0f64, f64::max)
        .max(capped_q);
    let upper = (lower * (1.0 + cfg.slack)).max(open_q);
    BranchResult {
        lower,
        witness,
        upper,
        nodes,
        depth_reached,
        exhausted: exhausted && capped_q == 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::super::norms::norm_two;
    use super::*;

    fn cfg(depth: usize) -> BranchConfig {
        BranchConfig {
            max_depth: depth,
            node_budget: 50_000,
            slack: 1e-6,
            threads: 1,
        }
    }

    #[test]
    fn single_diagonal_matrix_resolves_immediately() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let r = branch_and_bound(&[a], &norm_two, 0.0, vec![], &cfg(10));
        assert!((r.lower - 2.0).abs() < 1e-12);
        assert!(r.upper <= 2.0 * (1.0 + 1e-6) + 1e-12);
        assert_eq!(r.witness, vec![0]);
        assert!(r.exhausted);
    }

    #[test]
    fn pair_with_dominant_mixed_product_finds_the_witness() {
        // Classic pair: the radius is the golden ratio, attained by A₀A₁.
        let a0 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let a1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let r = branch_and_bound(&[a0, a1], &norm_two, 0.0, vec![], &cfg(12));
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((r.lower - phi).abs() < 1e-9, "lower {}", r.lower);
        assert!(r.witness == vec![0, 1] || r.witness == vec![1, 0]);
        assert!(r.upper >= phi - 1e-9);
    }

    #[test]
    fn nilpotent_family_collapses_to_zero() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = branch_and_bound(&[a], &norm_two, 0.0, vec![], &cfg(10));
        assert_eq!(r.lower, 0.0);
        assert_eq!(r.upper, 0.0);
        assert!(r.exhausted);
    }

    #[test]
    fn thread_count_does_not_change_the_outcome() {
        let a0 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let a1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let fam = [a0, a1];
        let mut configs = (cfg(9), cfg(9));
        configs.1.threads = 3;
        let r1 = branch_and_bound(&fam, &norm_two, 0.0, vec![], &configs.0);
        let r3 = branch_and_bound(&fam, &norm_two, 0.0, vec![], &configs.1);
        assert_eq!(r1.lower.to_bits(), r3.lower.to_bits());
        assert_eq!(r1.upper.to_bits(), r3.upper.to_bits());
        assert_eq!(r1.witness, r3.witness);
        assert_eq!(r1.nodes, r3.nodes);
    }
}
