#![allow(dead_code)]

use selfnest::edit::EditOp;
use selfnest::tree::{NodeId, Tree};

pub fn t(s: &str) -> Tree {
    s.parse().unwrap()
}

/// Every edit op on `tree` built from its node pairs and the given payloads,
/// legal or not.
pub fn candidate_ops(tree: &Tree, payloads: &[Tree]) -> Vec<EditOp> {
    let mut ops = Vec::new();
    for (id, node) in tree.nodes() {
        for &c in node.children() {
            ops.push(EditOp::AddInternal { anchor: id, child: c });
            ops.push(EditOp::DeleteSubtree { anchor: id, child: c });
        }
        for p in payloads {
            ops.push(EditOp::AddSubtree { anchor: id, payload: p.clone() });
        }
        if node.children().len() == 1 {
            ops.push(EditOp::DeleteInternal { node: id });
        }
    }
    ops
}

/// Every node of `before` still present in `after` kept its height.
pub fn heights_preserved(before: &Tree, after: &Tree) -> bool {
    before
        .nodes()
        .filter(|(id, _)| after.contains(*id))
        .all(|(id, n)| after.node_height(id) == n.height())
}

/// Rotates every sibling list by one and reverses every other one.
pub fn scramble(tree: &Tree) -> Tree {
    let mut out = tree.clone();
    out.reorder_children(|id: NodeId, kids: &mut [NodeId]| {
        if id.index().is_multiple_of(2) {
            kids.reverse();
        } else if !kids.is_empty() {
            kids.rotate_left(1);
        }
    });
    out
}

/// Sizes for `count` random trees spread over `1..=max`, with seeds.
pub fn sample_specs(count: usize, max: usize, master: u64) -> Vec<(usize, u64)> {
    (0..count)
        .map(|i| {
            let seed = selfnest::randgen::trial_seed(master, 0, i);
            (1 + (seed % max as u64) as usize, seed)
        })
        .collect()
}
