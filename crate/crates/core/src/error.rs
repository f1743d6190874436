use thiserror::Error;

use crate::dag::ClassId;
use crate::tree::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input: expected a tree such as \"()\"")]
    Empty,
    #[error("unexpected character {found:?} at byte {offset}")]
    UnexpectedChar { offset: usize, found: char },
    #[error("unbalanced ')' at byte {offset}")]
    UnbalancedClose { offset: usize },
    #[error("unclosed '(' at end of input (byte {offset})")]
    Unclosed { offset: usize },
    #[error("trailing input after a complete tree at byte {offset}")]
    TrailingInput { offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("profile is not self-nested: entry ({h1},{h2}) is not constant")]
    NotSelfNested { h1: u32, h2: u32 },
    #[error("unrealizable scalar profile: entry ({h1},{}) must be at least 1", h1 - 1)]
    Unrealizable { h1: u32 },
    #[error("malformed scalar profile: row {h1} has {found} entries, expected {h1}")]
    RowShape { h1: u32, found: usize },
    #[error("node count overflows u64")]
    Overflow,
}

/// Reason an edit operation is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{child} is not a child of {parent}")]
    NotAChild { parent: NodeId, child: NodeId },
    #[error("{0} is the root")]
    IsRoot(NodeId),
    #[error("{0} is not unary")]
    NotUnary(NodeId),
    #[error("AddInternal needs H(child)+1 < H(anchor): {child_height}+1 >= {anchor_height}")]
    InternalTooTall { child_height: u32, anchor_height: u32 },
    #[error("AddSubtree needs H(payload)+1 <= H(anchor): {payload_height}+1 > {anchor_height}")]
    SubtreeTooTall { payload_height: u32, anchor_height: u32 },
    #[error("DeleteInternal needs a sibling at least as tall as the deleted node (height {height})")]
    NoTallSibling { height: u32 },
    #[error("DeleteSubtree needs another child of height {needed}")]
    NoHeightWitness { needed: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tree has height {tree} but profile has dimension {profile}")]
    HeightMismatch { tree: u32, profile: u32 },
    #[error("no embedding self-nested tree within {budget} nodes")]
    BudgetExhausted { budget: u64 },
    #[error("{count} non-isomorphic optima with {size} nodes: {}", optima.join(" "))]
    Ambiguous { size: u64, count: usize, optima: Vec<String> },
    #[error("input has {len} nodes, oracle limit is {limit}")]
    TooLarge { len: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("unknown class {0}")]
    UnknownClass(ClassId),
    #[error("edge {from} -> {to} has multiplicity 0")]
    ZeroMultiplicity { from: ClassId, to: ClassId },
    #[error("edge {from} -> {to} does not go to a lower class")]
    EdgeNotDescending { from: ClassId, to: ClassId },
    #[error("class {class} stores height {stored}, its edges give {expected}")]
    HeightMismatch { class: ClassId, stored: u32, expected: u32 },
    #[error("node count overflows u64")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("column ({h1},{h2}) has a negative maximum after deficit propagation")]
    NegativeRow { h1: u32, h2: u32 },
}
