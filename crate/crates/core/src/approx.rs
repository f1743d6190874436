//! Self-nested approximations computed on height profiles.
//!
//! Both algorithms walk the profile row by row (`h1` ascending) and, inside a
//! row, column by column (`h2` descending), turning every vector into one
//! scalar. The order is load-bearing.
//!
//! * NEST: scalarize each column to its maximum. The vertices below the
//!   maximum have a deficit, which they cover by promoting their own shorter
//!   children, tallest first, so those are consumed from the lower columns.
//! * NeST: scalarize each column to its minimum. The excess of a vertex is
//!   deleted, except when the self-nested subtree of that height is a unary
//!   chain at its root; then deleting that root turns the excess into
//!   subtrees one level shorter, carried into the next column.

use std::sync::atomic::{AtomicU8, Ordering};

use num_rational::Ratio;

use crate::error::ApproxError;
use crate::profile::{compute_profile, HeightProfile, ScalarProfile};
use crate::tree::Tree;

/// Exact self-nestedness index.
pub type Delta = Ratio<i128>;

/// How a vertex's remaining deficit is charged against a lower column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DeficitUpdate {
    /// `column <- max(column - deficit, 0)`: a count never drops below zero.
    #[default]
    Clamped,
    /// `column <- column - deficit`, entries may go negative; only the final
    /// column maximum is clamped.
    KeepNegative,
}

/// When the deficit propagation loop keeps running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LoopGuard {
    /// While some vertex still has a deficit.
    #[default]
    AnyNonzero,
    /// While every vertex still has a deficit.
    AllNonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NestRule {
    pub deficit: DeficitUpdate,
    pub guard: LoopGuard,
}

/// Which finalized row decides whether NeST excess at column `h2` of row
/// `h1` can be shortened instead of deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CarryRule {
    /// Row `h2`: the subtree being shortened is itself unary at its root.
    #[default]
    SubtreeRow,
    /// Row `h1 - 1`, for every column.
    ParentRow,
}

/// Profile-level output of either algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileApprox {
    pub profile: ScalarProfile,
    /// Inner steps executed: one per column scalarization plus one per
    /// propagation or carry step.
    pub op_count: u64,
}

#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub tree: Tree,
    pub profile: ScalarProfile,
    pub input_len: u64,
    pub output_len: u64,
    /// Edit distance to the input, `|#V(output) - #V(input)|`.
    pub distance: u64,
    pub delta: Delta,
    pub op_count: u64,
}

/// Signed copy of a height profile; `rows[h1 - 1][h2][k]`.
#[derive(Debug, Clone)]
struct WorkingProfile {
    rows: Vec<Vec<Vec<i64>>>,
}

impl WorkingProfile {
    fn new(p: &HeightProfile) -> Self {
        WorkingProfile {
            rows: p
                .rows()
                .iter()
                .map(|r| r.columns().iter().map(|c| c.iter().map(|&x| x as i64).collect()).collect())
                .collect(),
        }
    }
}

static NEGATIVE_ROW_PROBE: AtomicU8 = AtomicU8::new(0);

/// Whether a column maximum below zero is reported as an error instead of
/// being clamped silently. On in debug builds and whenever the environment
/// variable `SELFNEST_DEBUG_ASSERT=1` is set.
pub fn negative_row_probe_enabled() -> bool {
    match NEGATIVE_ROW_PROBE.load(Ordering::Relaxed) {
        1 => false,
        2 => true,
        _ => {
            let on = cfg!(debug_assertions)
                || std::env::var("SELFNEST_DEBUG_ASSERT").is_ok_and(|v| v == "1");
            NEGATIVE_ROW_PROBE.store(if on { 2 } else { 1 }, Ordering::Relaxed);
            on
        }
    }
}

/// NEST on a height profile.
pub fn nest_profile(p: &HeightProfile) -> ProfileApprox {
    nest_profile_with(p, NestRule::default())
        .expect("clamped deficits never produce a negative column")
}

pub fn nest_profile_with(p: &HeightProfile, rule: NestRule) -> Result<ProfileApprox, ApproxError> {
    let mut w = WorkingProfile::new(p);
    let mut ops: u64 = 0;
    let mut out = Vec::with_capacity(w.rows.len());
    for (i, row) in w.rows.iter_mut().enumerate() {
        let h1 = i as u32 + 1;
        let roots = row[0].len();
        let mut scalars = vec![0u64; h1 as usize];
        let mut deficit = vec![0i64; roots];
        for h2 in (0..h1 as usize).rev() {
            let max = *row[h2].iter().max().expect("rows are never empty");
            for (d, &x) in deficit.iter_mut().zip(&row[h2]) {
                *d = max - x;
            }
            row[h2].iter_mut().for_each(|x| *x = max);
            ops += 1;
            if max < 0 {
                if negative_row_probe_enabled() {
                    return Err(ApproxError::NegativeRow { h1, h2: h2 as u32 });
                }
                scalars[h2] = 0;
            } else {
                scalars[h2] = max as u64;
            }
            let mut step = 1;
            while step <= h2 && guard_holds(rule.guard, &deficit) {
                let lower = &mut row[h2 - step];
                for (d, x) in deficit.iter_mut().zip(lower.iter_mut()) {
                    let old = *d;
                    *d = (old - *x).max(0);
                    *x = match rule.deficit {
                        DeficitUpdate::Clamped => (*x - old).max(0),
                        DeficitUpdate::KeepNegative => *x - old,
                    };
                }
                ops += 1;
                step += 1;
            }
        }
        out.push(scalars);
    }
    let profile = ScalarProfile::from_rows(out).expect("one scalar per column");
    Ok(ProfileApprox { profile, op_count: ops })
}

fn guard_holds(guard: LoopGuard, deficit: &[i64]) -> bool {
    match guard {
        LoopGuard::AnyNonzero => deficit.iter().any(|&d| d != 0),
        LoopGuard::AllNonzero => deficit.iter().all(|&d| d != 0),
    }
}

/// NeST on a height profile.
pub fn nest_embedded_profile(p: &HeightProfile) -> ProfileApprox {
    nest_embedded_profile_with(p, CarryRule::default())
}

pub fn nest_embedded_profile_with(p: &HeightProfile, rule: CarryRule) -> ProfileApprox {
    let mut w = WorkingProfile::new(p);
    let mut ops: u64 = 0;
    let mut finalized: Vec<Vec<u64>> = Vec::with_capacity(w.rows.len());
    for (i, row) in w.rows.iter_mut().enumerate() {
        let h1 = i + 1;
        let roots = row[0].len();
        let mut scalars = vec![0u64; h1];
        let mut excess = vec![0i64; roots];
        for h2 in (0..h1).rev() {
            let min = *row[h2].iter().min().expect("rows are never empty");
            for (e, &x) in excess.iter_mut().zip(&row[h2]) {
                *e = x - min;
            }
            row[h2].iter_mut().for_each(|x| *x = min);
            scalars[h2] = min as u64;
            ops += 1;
            if h2 == 0 {
                continue;
            }
            let probe_row = match rule {
                CarryRule::SubtreeRow => h2,
                CarryRule::ParentRow => h1 - 1,
            };
            if probe_row >= 1 && is_unary_row(&finalized[probe_row - 1]) {
                for (x, &e) in row[h2 - 1].iter_mut().zip(&excess) {
                    *x += e;
                }
                ops += 1;
            }
        }
        finalized.push(scalars);
    }
    let profile = ScalarProfile::from_rows(finalized).expect("one scalar per column");
    ProfileApprox { profile, op_count: ops }
}

/// Row `h` with a single child of height `h - 1` and nothing else.
fn is_unary_row(row: &[u64]) -> bool {
    let (last, rest) = row.split_last().expect("rows are never empty");
    *last == 1 && rest.iter().all(|&x| x == 0)
}

fn finish(input: &Tree, approx: ProfileApprox, embedding: bool) -> ApproxResult {
    let tree = crate::profile::sn_tree_from_profile(&approx.profile)
        .expect("approximation profiles are realizable");
    let input_len = input.len() as u64;
    let output_len = tree.len() as u64;
    let delta = if embedding {
        delta_nest_from_counts(input_len, output_len)
    } else {
        delta_nest_embedded_from_counts(input_len, output_len)
    };
    ApproxResult {
        tree,
        profile: approx.profile,
        input_len,
        output_len,
        distance: input_len.abs_diff(output_len),
        delta,
        op_count: approx.op_count,
    }
}

/// Nearest embedding self-nested tree: the smallest self-nested tree that
/// `t` turns into by height-preserving constrained insertions.
pub fn nest(t: &Tree) -> ApproxResult {
    nest_from_profile(t, &compute_profile(t))
}

/// As [`nest`], with the profile of `t` already computed.
pub fn nest_from_profile(t: &Tree, p: &HeightProfile) -> ApproxResult {
    finish(t, nest_profile(p), true)
}

pub fn nest_with(t: &Tree, rule: NestRule) -> Result<ApproxResult, ApproxError> {
    Ok(finish(t, nest_profile_with(&compute_profile(t), rule)?, true))
}

/// Nearest embedded self-nested tree, computed by the deletion algorithm on
/// the height profile.
pub fn nest_embedded(t: &Tree) -> ApproxResult {
    nest_embedded_from_profile(t, &compute_profile(t))
}

pub fn nest_embedded_from_profile(t: &Tree, p: &HeightProfile) -> ApproxResult {
    finish(t, nest_embedded_profile(p), false)
}

pub fn nest_embedded_with(t: &Tree, rule: CarryRule) -> ApproxResult {
    finish(t, nest_embedded_profile_with(&compute_profile(t), rule), false)
}

/// `1 - (#V(NEST) - #V(t)) / #V(t)`.
pub fn delta_nest_from_counts(n_tree: u64, n_nest: u64) -> Delta {
    assert!(n_tree >= 1, "a tree has at least one node");
    Ratio::new(2 * n_tree as i128 - n_nest as i128, n_tree as i128)
}

/// `#V(NeST) / #V(t)`.
pub fn delta_nest_embedded_from_counts(n_tree: u64, n_nest_embedded: u64) -> Delta {
    assert!(n_tree >= 1, "a tree has at least one node");
    Ratio::new(n_nest_embedded as i128, n_tree as i128)
}

pub fn delta_nest(t: &Tree) -> Delta {
    nest(t).delta
}

pub fn delta_nest_embedded(t: &Tree) -> Delta {
    nest_embedded(t).delta
}

/// `p/q` with the fraction in lowest terms, `1/1` for one.
pub fn format_delta(d: &Delta) -> String {
    format!("{}/{}", d.numer(), d.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{compute_profile, sn_tree_from_profile};
    use crate::tree::{is_isomorphic, parse_tree};

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    fn scalar(rows: &[&[u64]]) -> ScalarProfile {
        ScalarProfile::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn self_nested_input_is_a_fixed_point() {
        let sn = t("((()())(()()))");
        for r in [nest(&sn), nest_embedded(&sn)] {
            assert!(is_isomorphic(&r.tree, &sn));
            assert_eq!(r.distance, 0);
            assert_eq!(r.delta, Ratio::from_integer(1));
        }
    }

    #[test]
    fn six_node_example() {
        let tree = t("((())(()()))");
        let n = nest(&tree);
        assert_eq!(n.profile, scalar(&[&[2], &[0, 2]]));
        assert_eq!(n.tree.canonical().as_str(), "((()())(()()))");
        assert_eq!((n.output_len, n.distance), (7, 1));
        assert_eq!(n.delta, Ratio::new(5, 6));

        let e = nest_embedded(&tree);
        assert_eq!(e.profile, scalar(&[&[1], &[0, 2]]));
        assert_eq!(e.tree.canonical().as_str(), "((())(()))");
        assert_eq!((e.output_len, e.distance), (5, 1));
        assert_eq!(e.delta, Ratio::new(5, 6));
    }

    #[test]
    fn nine_node_example() {
        let tree = t("(((()))((())(())))");
        let n = nest(&tree);
        assert_eq!(n.profile, scalar(&[&[1], &[0, 2], &[0, 0, 2]]));
        assert_eq!((n.output_len, n.distance), (11, 2));

        let e = nest_embedded(&tree);
        assert_eq!(e.profile, scalar(&[&[1], &[0, 1], &[0, 0, 2]]));
        assert_eq!(e.tree.canonical().as_str(), "(((()))((())))");
        assert_eq!((e.output_len, e.distance), (7, 2));
    }

    #[test]
    fn nine_node_example_keep_negative_trace() {
        // the deficit (1,0) of column (2,1) drives column (2,0) to (-1,0)
        let p = compute_profile(&t("(((()))((())(())))"));
        let r = nest_profile_with(&p, NestRule { deficit: DeficitUpdate::KeepNegative, ..NestRule::default() })
            .unwrap();
        assert_eq!(r.profile, scalar(&[&[1], &[0, 2], &[0, 0, 2]]));
    }

    #[test]
    fn negative_entries_double_count_deficits() {
        // two height-3 vertices: v with children heights {2, 0 x5},
        // u with {2, 2, 2}; the embedding needs three height-2 slots and six
        // slots in total, so s(3,.) = (3, 0, 3).
        let v = "(((()))()()()()())";
        let u = "(((()))((()))((())))";
        let tree = t(&format!("({v}{u})"));
        let p = compute_profile(&tree);
        let clamped = nest_profile(&p);
        assert_eq!(clamped.profile.rows()[2], vec![3, 0, 3]);
        let loose = nest_profile_with(&p, NestRule { deficit: DeficitUpdate::KeepNegative, ..NestRule::default() })
            .unwrap();
        assert_eq!(loose.profile.rows()[2], vec![1, 0, 3]);
    }

    #[test]
    fn all_nonzero_guard_never_propagates() {
        let p = compute_profile(&t("(((()))((())(())))"));
        let literal = nest_profile_with(&p, NestRule { guard: LoopGuard::AllNonzero, ..NestRule::default() })
            .unwrap();
        // the column max is always reached by some vertex, whose deficit is 0
        assert_eq!(literal.op_count, 6);
    }

    #[test]
    fn delta_formulas() {
        assert_eq!(delta_nest_from_counts(30, 37), Ratio::new(23, 30));
        assert_eq!(delta_nest_embedded_from_counts(30, 24), Ratio::new(24, 30));
        assert_eq!(delta_nest_from_counts(4, 20), Ratio::new(-12, 4));
        assert_eq!(format_delta(&Ratio::new(24, 30)), "4/5");
        assert_eq!(format_delta(&Ratio::from_integer(1)), "1/1");
    }

    #[test]
    fn leaf_input() {
        let leaf = Tree::leaf();
        let n = nest(&leaf);
        assert_eq!((n.output_len, n.op_count), (1, 0));
        assert_eq!(nest_embedded(&leaf).tree.to_string(), "()");
    }

    #[test]
    fn outputs_rebuild_from_their_profiles() {
        let tree = t("((()(()))(()()())((())))");
        for r in [nest(&tree), nest_embedded(&tree)] {
            let again = sn_tree_from_profile(&r.profile).unwrap();
            assert!(is_isomorphic(&again, &r.tree));
            assert!(compute_profile(&r.tree).is_self_nested());
            assert_eq!(r.tree.height(), tree.height());
        }
    }
}
