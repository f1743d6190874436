//! Unordered rooted trees, their DAG compression, and self-nested
//! approximations by node insertion (NEST) and node deletion (NeST).
//!
//! A tree is self-nested when all its subtrees of equal height are
//! isomorphic, which is the same as its DAG reduction being a single chain.

pub mod approx;
pub mod bench;
pub mod dag;
pub mod edit;
pub mod error;
pub mod oracle;
pub mod profile;
pub mod randgen;
pub mod tree;

pub use approx::{
    delta_nest, delta_nest_embedded, format_delta, nest, nest_embedded, nest_embedded_profile,
    nest_profile, ApproxResult, CarryRule, DeficitUpdate, Delta, LoopGuard, NestRule,
};
pub use dag::{expand, is_linear, node_count, reduce, ClassId, DagClass, DagReduction};
pub use edit::{apply, can_apply, is_legal, EditKind, EditOp};
pub use error::{ApproxError, DagError, EditError, OracleError, ParseError, ProfileError};
pub use profile::{
    compute_profile, is_self_nested_profile, profiles_equivalent, sn_node_count,
    sn_tree_from_profile, HeightProfile, ScalarProfile,
};
pub use randgen::{random_tree, GenSpec, TreeModel};
pub use tree::{canonical_cmp, is_isomorphic, parse_tree, serialize_canonical, CanonicalForm, NodeId, Tree};
