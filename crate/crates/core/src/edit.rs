//! The four edit operations that keep the edit mapping constrained and leave
//! the height of every pre-existing node unchanged.
//!
//! * `AddInternal`: new node between `anchor` and its child `child`; needs
//!   `H(child) + 1 < H(anchor)`.
//! * `AddSubtree`: graft `payload` under `anchor`; needs `H(payload) + 1 <= H(anchor)`.
//! * `DeleteInternal`: remove the unary node `node`, its child moving up; needs
//!   a sibling of `node` at least as tall as `node`.
//! * `DeleteSubtree`: remove `child` and its descendants; needs another child
//!   of `anchor` of height `H(anchor) - 1`.
//!
//! Inserting a node that adopts all children of `v` gives the same shape as
//! inserting it above one child, so only the single-child form exists here.

use crate::error::EditError;
use crate::tree::{NodeId, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditKind {
    AddInternal,
    AddSubtree,
    DeleteInternal,
    DeleteSubtree,
}

#[derive(Debug, Clone)]
pub enum EditOp {
    AddInternal { anchor: NodeId, child: NodeId },
    AddSubtree { anchor: NodeId, payload: Tree },
    DeleteInternal { node: NodeId },
    DeleteSubtree { anchor: NodeId, child: NodeId },
}

impl EditOp {
    pub fn kind(&self) -> EditKind {
        match self {
            EditOp::AddInternal { .. } => EditKind::AddInternal,
            EditOp::AddSubtree { .. } => EditKind::AddSubtree,
            EditOp::DeleteInternal { .. } => EditKind::DeleteInternal,
            EditOp::DeleteSubtree { .. } => EditKind::DeleteSubtree,
        }
    }

    /// Change in node count when applied to `t`, which is also the cost of
    /// the operation.
    pub fn node_delta(&self, t: &Tree) -> i64 {
        match self {
            EditOp::AddInternal { .. } => 1,
            EditOp::AddSubtree { payload, .. } => payload.len() as i64,
            EditOp::DeleteInternal { .. } => -1,
            EditOp::DeleteSubtree { child, .. } => -(t.subtree_len(*child) as i64),
        }
    }
}

impl EditError {
    /// True for malformed operations (bad identifiers, wrong arity), false
    /// for a violated height condition.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            EditError::UnknownNode(_)
                | EditError::NotAChild { .. }
                | EditError::IsRoot(_)
                | EditError::NotUnary(_)
        )
    }
}

fn known(t: &Tree, id: NodeId) -> Result<(), EditError> {
    if t.contains(id) {
        Ok(())
    } else {
        Err(EditError::UnknownNode(id))
    }
}

fn child_of(t: &Tree, parent: NodeId, child: NodeId) -> Result<(), EditError> {
    known(t, parent)?;
    known(t, child)?;
    if t.parent(child) == Some(parent) {
        Ok(())
    } else {
        Err(EditError::NotAChild { parent, child })
    }
}

/// Checks identifiers and arity only.
fn check_structure(t: &Tree, op: &EditOp) -> Result<(), EditError> {
    match op {
        EditOp::AddInternal { anchor, child } | EditOp::DeleteSubtree { anchor, child } => {
            child_of(t, *anchor, *child)
        }
        EditOp::AddSubtree { anchor, .. } => known(t, *anchor),
        EditOp::DeleteInternal { node } => {
            known(t, *node)?;
            if t.parent(*node).is_none() {
                return Err(EditError::IsRoot(*node));
            }
            if t.children(*node).len() != 1 {
                return Err(EditError::NotUnary(*node));
            }
            Ok(())
        }
    }
}

/// `Ok(())` iff `op` is legal on `t`. Malformed operations give a structural
/// error; legal-looking ones that break a height condition name the condition.
pub fn can_apply(t: &Tree, op: &EditOp) -> Result<(), EditError> {
    check_structure(t, op)?;
    match op {
        EditOp::AddInternal { anchor, child } => {
            let (hc, hv) = (t.node_height(*child), t.node_height(*anchor));
            if hc + 1 < hv {
                Ok(())
            } else {
                Err(EditError::InternalTooTall { child_height: hc, anchor_height: hv })
            }
        }
        EditOp::AddSubtree { anchor, payload } => {
            let (hp, hv) = (payload.height(), t.node_height(*anchor));
            if hp < hv {
                Ok(())
            } else {
                Err(EditError::SubtreeTooTall { payload_height: hp, anchor_height: hv })
            }
        }
        EditOp::DeleteInternal { node } => {
            let parent = t.parent(*node).expect("checked above");
            let h = t.node_height(*node);
            let tall_sibling =
                t.children(parent).iter().any(|&s| s != *node && t.node_height(s) >= h);
            if tall_sibling {
                Ok(())
            } else {
                Err(EditError::NoTallSibling { height: h })
            }
        }
        EditOp::DeleteSubtree { anchor, child } => {
            let needed = t.node_height(*anchor) - 1;
            let witness =
                t.children(*anchor).iter().any(|&s| s != *child && t.node_height(s) == needed);
            if witness {
                Ok(())
            } else {
                Err(EditError::NoHeightWitness { needed })
            }
        }
    }
}

pub fn is_legal(t: &Tree, op: &EditOp) -> bool {
    can_apply(t, op).is_ok()
}

/// Applies a legal operation to a copy of `t`. Node identifiers of `t` stay
/// valid in the result.
pub fn apply(t: &Tree, op: &EditOp) -> Result<Tree, EditError> {
    can_apply(t, op)?;
    Ok(apply_unchecked(t, op))
}

/// Applies `op` without checking the height conditions.
pub(crate) fn apply_unchecked(t: &Tree, op: &EditOp) -> Tree {
    let mut out = t.clone();
    match op {
        EditOp::AddInternal { anchor, child } => {
            out.insert_above(*anchor, *child);
            out.refresh_heights_from(*anchor);
        }
        EditOp::AddSubtree { anchor, payload } => {
            out.graft(*anchor, payload);
            out.refresh_heights_from(*anchor);
        }
        EditOp::DeleteInternal { node } => {
            let parent = out.parent(*node).expect("not the root");
            out.splice_out(*node);
            out.refresh_heights_from(parent);
        }
        EditOp::DeleteSubtree { anchor, child } => {
            out.remove_subtree(*child);
            out.refresh_heights_from(*anchor);
        }
    }
    out
}

/// Every legal deletion on `t`.
pub fn legal_deletions(t: &Tree) -> Vec<EditOp> {
    let mut ops = Vec::new();
    for (id, node) in t.nodes() {
        let Some(parent) = node.parent() else { continue };
        let ds = EditOp::DeleteSubtree { anchor: parent, child: id };
        if is_legal(t, &ds) {
            ops.push(ds);
        }
        let di = EditOp::DeleteInternal { node: id };
        if is_legal(t, &di) {
            ops.push(di);
        }
    }
    ops
}

/// Whether inserting a node that adopts `child_subset_size` of the
/// `total_children` children of its parent keeps the edit mapping
/// constrained: only none, one, or all of them.
pub fn is_zhang_valid_insertion(child_subset_size: usize, total_children: usize) -> bool {
    debug_assert!(child_subset_size <= total_children);
    child_subset_size <= 1 || child_subset_size == total_children
}
