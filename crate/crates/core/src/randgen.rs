//! Seeded random trees.
//!
//! The generator is pinned down by algorithm so that a `(model, n, seed)`
//! triple names the same tree everywhere: a SplitMix64 stream seeded with
//! `seed`; node `i` (for `i = 1..n`) attaches to parent
//! `(next_u64() * i) >> 64`, i.e. a multiply-shift draw from `0..i`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::tree::{NodeId, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TreeModel {
    /// Each new node picks its parent uniformly among the existing nodes.
    #[default]
    UniformAttachment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenSpec {
    pub n_nodes: usize,
    pub seed: u64,
    pub model: TreeModel,
}

impl GenSpec {
    pub fn uniform(n_nodes: usize, seed: u64) -> Self {
        GenSpec { n_nodes, seed, model: TreeModel::UniformAttachment }
    }
}

/// Uniform draw from `0..bound` by multiply-shift.
fn below(rng: &mut SplitMix64, bound: u64) -> u64 {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as u64
}

/// Draws a tree with exactly `spec.n_nodes` nodes (at least one).
pub fn random_tree(spec: &GenSpec) -> Tree {
    let n = spec.n_nodes.max(1);
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    match spec.model {
        TreeModel::UniformAttachment => {
            let mut t = Tree::leaf();
            // node i of the draw lives at slot i: ids are allocated in order
            for i in 1..n {
                let parent = NodeId::from_index(below(&mut rng, i as u64) as usize);
                let child = t.graft(parent, &Tree::leaf());
                debug_assert_eq!(child.index(), i);
                t.refresh_heights_from(parent);
            }
            t
        }
    }
}

/// Derives the seed of one benchmark trial from the master seed, independent
/// of the order in which trials run: the first output of a SplitMix64 stream
/// seeded with `master ^ (size << 32) ^ trial`.
pub fn trial_seed(master: u64, size: usize, trial: usize) -> u64 {
    let key = master ^ ((size as u64) << 32) ^ trial as u64;
    SplitMix64::seed_from_u64(key).next_u64()
}
