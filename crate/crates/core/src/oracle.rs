//! Brute-force ground truth for the approximation algorithms.
//!
//! Nothing here looks at how `approx` computes its answers:
//!
//! * the NEST oracle searches the space of realizable scalar profiles and
//!   keeps the smallest one into which the tree embeds by allowed insertions;
//! * the NeST oracle explores every tree reachable by allowed deletions.
//!
//! Both are exponential and meant for trees of a dozen nodes or so.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::edit::{apply, legal_deletions};
use crate::error::OracleError;
use crate::profile::{sn_node_count, sn_tree_from_profile, ScalarProfile};
use crate::tree::{parse_tree, CanonicalForm, NodeId, SubtreeClasses, Tree};

/// Largest input the command-line oracles accept.
pub const ORACLE_MAX_NODES: usize = 12;

/// How children are assigned to the slots of a self-nested node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SlotAssignment {
    /// Maximum bipartite matching (augmenting paths).
    #[default]
    Matching,
    /// Children by descending height, each into the lowest free slot that
    /// is tall enough.
    Greedy,
}

/// Memo for "subtree can be grown into the self-nested tree of height `g`
/// of a fixed profile by allowed insertions", keyed by canonical form.
#[derive(Debug)]
pub struct EmbedMemo<'s> {
    profile: &'s ScalarProfile,
    assignment: SlotAssignment,
    cache: HashMap<(String, u32), bool>,
}

impl<'s> EmbedMemo<'s> {
    pub fn new(profile: &'s ScalarProfile, assignment: SlotAssignment) -> Self {
        EmbedMemo { profile, assignment, cache: HashMap::new() }
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    /// Whether the subtree of `t` at `v` embeds into the self-nested subtree
    /// of height `target`.
    pub fn embeds(&mut self, t: &Tree, v: NodeId, target: u32) -> bool {
        let classes = SubtreeClasses::of(t);
        self.embeds_node(t, &classes, v, target)
    }

    fn embeds_node(&mut self, t: &Tree, sc: &SubtreeClasses, v: NodeId, target: u32) -> bool {
        let g = t.node_height(v);
        if g > target {
            return false;
        }
        let key = (sc.canonical_of(sc.class_of(v)).to_owned(), target);
        if let Some(&hit) = self.cache.get(&key) {
            return hit;
        }
        let result = if target > g {
            // a chain of unary insertions lifts v into the slot of height target-1
            self.profile.get(target, target - 1) >= 1 && self.embeds_node(t, sc, v, target - 1)
        } else if g == 0 {
            true
        } else {
            let children = t.children(v).to_vec();
            let mut ok = Vec::with_capacity(children.len());
            for &c in &children {
                let hc = t.node_height(c);
                ok.push((hc, self.embeds_node(t, sc, c, hc)));
            }
            // promotion keeps embeddability, so a child fits any slot >= its height
            let slots: Vec<u32> = (0..g)
                .flat_map(|h| std::iter::repeat_n(h, self.profile.get(g, h) as usize))
                .collect();
            ok.iter().all(|&(_, e)| e) && assign(&ok, &slots, self.assignment)
        };
        self.cache.insert(key, result);
        result
    }
}

/// Can every child (by height) get its own slot of at least its height?
fn assign(children: &[(u32, bool)], slots: &[u32], how: SlotAssignment) -> bool {
    if children.len() > slots.len() {
        return false;
    }
    match how {
        SlotAssignment::Matching => {
            let mut slot_owner: Vec<Option<usize>> = vec![None; slots.len()];
            for child in 0..children.len() {
                let mut seen = vec![false; slots.len()];
                if !augment(child, children, slots, &mut slot_owner, &mut seen) {
                    return false;
                }
            }
            true
        }
        SlotAssignment::Greedy => {
            let mut free: BTreeMap<u32, usize> = BTreeMap::new();
            for &s in slots {
                *free.entry(s).or_insert(0) += 1;
            }
            let mut heights: Vec<u32> = children.iter().map(|&(h, _)| h).collect();
            heights.sort_unstable_by(|a, b| b.cmp(a));
            for h in heights {
                let Some((&s, _)) = free.range(h..).next() else { return false };
                let left = free.get_mut(&s).unwrap();
                *left -= 1;
                if *left == 0 {
                    free.remove(&s);
                }
            }
            true
        }
    }
}

fn augment(
    child: usize,
    children: &[(u32, bool)],
    slots: &[u32],
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for s in 0..slots.len() {
        if seen[s] || slots[s] < children[child].0 {
            continue;
        }
        seen[s] = true;
        let free = match owner[s] {
            None => true,
            Some(other) => augment(other, children, slots, owner, seen),
        };
        if free {
            owner[s] = Some(child);
            return true;
        }
    }
    false
}

/// Whether `t` can be turned into the self-nested tree of `s` with allowed
/// insertions only.
pub fn embeds_into_sn(t: &Tree, s: &ScalarProfile) -> Result<bool, OracleError> {
    embeds_into_sn_with(t, s, SlotAssignment::Matching)
}

pub fn embeds_into_sn_with(
    t: &Tree,
    s: &ScalarProfile,
    how: SlotAssignment,
) -> Result<bool, OracleError> {
    if t.height() != s.dim() {
        return Err(OracleError::HeightMismatch { tree: t.height(), profile: s.dim() });
    }
    if s.check_realizable().is_err() {
        return Ok(false);
    }
    Ok(EmbedMemo::new(s, how).embeds(t, t.root(), s.dim()))
}

/// Whether the self-nested tree of `s` can be reached from `t` by allowed
/// deletions.
///
/// Deletions undo insertions, so this asks whether the self-nested tree grows
/// into `t`. Kept nodes keep their heights, and a kept node of height `h` may
/// hang below a chain of inserted nodes whose heights drop by one per step.
/// Everything else in `t` is an inserted subtree.
pub fn reachable_by_deletions(t: &Tree, s: &ScalarProfile) -> Result<bool, OracleError> {
    if t.height() != s.dim() {
        return Err(OracleError::HeightMismatch { tree: t.height(), profile: s.dim() });
    }
    if s.check_realizable().is_err() {
        return Ok(false);
    }
    let mut memo = GrowMemo { profile: s, kept: HashMap::new(), hung: HashMap::new() };
    Ok(memo.kept_at(t, t.root()))
}

struct GrowMemo<'s> {
    profile: &'s ScalarProfile,
    /// node of `t` is the image of a kept node of its own height
    kept: HashMap<NodeId, bool>,
    /// the self-nested subtree of height `h` sits at or below this node
    hung: HashMap<(NodeId, u32), bool>,
}

impl GrowMemo<'_> {
    fn kept_at(&mut self, t: &Tree, x: NodeId) -> bool {
        if let Some(&hit) = self.kept.get(&x) {
            return hit;
        }
        let g = t.node_height(x);
        let slots: Vec<u32> = (0..g)
            .flat_map(|h| std::iter::repeat_n(h, self.profile.get(g, h) as usize))
            .collect();
        let children = t.children(x).to_vec();
        let result = slots.len() <= children.len() && {
            let fits: Vec<Vec<bool>> = slots
                .iter()
                .map(|&h| children.iter().map(|&y| self.hung_at(t, y, h)).collect())
                .collect();
            saturates_rows(&fits)
        };
        self.kept.insert(x, result);
        result
    }

    fn hung_at(&mut self, t: &Tree, y: NodeId, h: u32) -> bool {
        let hy = t.node_height(y);
        if hy < h {
            return false;
        }
        if hy == h {
            return self.kept_at(t, y);
        }
        if let Some(&hit) = self.hung.get(&(y, h)) {
            return hit;
        }
        let chain: Vec<NodeId> =
            t.children(y).iter().copied().filter(|&c| t.node_height(c) + 1 == hy).collect();
        let result = chain.into_iter().any(|c| self.hung_at(t, c, h));
        self.hung.insert((y, h), result);
        result
    }
}

/// Whether every row can be matched to a distinct column it fits.
fn saturates_rows(fits: &[Vec<bool>]) -> bool {
    let cols = fits.first().map_or(0, Vec::len);
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    fn try_row(r: usize, fits: &[Vec<bool>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for c in 0..owner.len() {
            if !fits[r][c] || seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c].is_none_or(|o| try_row(o, fits, owner, seen)) {
                owner[c] = Some(r);
                return true;
            }
        }
        false
    }
    (0..fits.len()).all(|r| try_row(r, fits, &mut owner, &mut vec![false; cols]))
}

/// Every realizable scalar profile of dimension `dim` whose tree has at most
/// `budget` nodes and whose entries are at most `entry_bound`.
pub fn realizable_profiles(dim: u32, entry_bound: u64, budget: u64) -> Vec<ScalarProfile> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut sizes: Vec<u64> = vec![1];
    profiles_rec(dim, entry_bound, budget, &mut rows, &mut sizes, &mut out);
    out
}

fn profiles_rec(
    dim: u32,
    bound: u64,
    budget: u64,
    rows: &mut Vec<Vec<u64>>,
    sizes: &mut Vec<u64>,
    out: &mut Vec<ScalarProfile>,
) {
    let h = rows.len() as u32;
    if h == dim {
        out.push(ScalarProfile::from_rows(rows.clone()).expect("rows built with the right shape"));
        return;
    }
    let h1 = h + 1;
    // every level above h1 adds at least one node
    let cap = budget.saturating_sub(u64::from(dim - h1));
    let mut row = vec![0u64; h1 as usize];
    row_rec(0, &mut row, 1, cap, bound, &sizes.clone(), &mut |row, size| {
        rows.push(row.to_vec());
        sizes.push(size);
        profiles_rec(dim, bound, budget, rows, sizes, out);
        rows.pop();
        sizes.pop();
    });
}

fn row_rec(
    g: usize,
    row: &mut [u64],
    acc: u64,
    cap: u64,
    bound: u64,
    sizes: &[u64],
    emit: &mut dyn FnMut(&[u64], u64),
) {
    if g == row.len() {
        emit(row, acc);
        return;
    }
    let lo = if g + 1 == row.len() { 1 } else { 0 };
    for count in lo..=bound {
        let Some(size) = sizes[g].checked_mul(count).and_then(|x| x.checked_add(acc)) else { break };
        if size > cap {
            break;
        }
        row[g] = count;
        row_rec(g + 1, row, size, cap, bound, sizes, emit);
    }
    row[g] = 0;
}

/// Smallest self-nested trees (as profiles) into which `t` embeds, among
/// those with at most `node_budget` nodes.
pub fn nest_optima(t: &Tree, node_budget: u64) -> Result<(u64, Vec<ScalarProfile>), OracleError> {
    // an optimal profile never needs an entry above the outdegree: extra
    // slots beyond the number of children only add nodes
    let bound = t.outdegree().max(1) as u64;
    let mut best: Option<(u64, Vec<ScalarProfile>)> = None;
    for s in realizable_profiles(t.height(), bound, node_budget) {
        let n = sn_node_count(&s).expect("enumerated profiles are realizable");
        if best.as_ref().is_some_and(|(b, _)| n > *b) {
            continue;
        }
        if !embeds_into_sn(t, &s)? {
            continue;
        }
        match &mut best {
            Some((b, list)) if *b == n => list.push(s),
            _ => best = Some((n, vec![s])),
        }
    }
    best.ok_or(OracleError::BudgetExhausted { budget: node_budget })
}

fn check_size(t: &Tree) -> Result<(), OracleError> {
    if t.len() > ORACLE_MAX_NODES {
        return Err(OracleError::TooLarge { len: t.len(), limit: ORACLE_MAX_NODES });
    }
    Ok(())
}

/// The NEST of `t` found by exhaustive profile search.
pub fn brute_nest(t: &Tree, node_budget: u64) -> Result<Tree, OracleError> {
    check_size(t)?;
    let (size, optima) = nest_optima(t, node_budget)?;
    if optima.len() > 1 {
        return Err(OracleError::Ambiguous {
            size,
            count: optima.len(),
            optima: optima
                .iter()
                .map(|s| sn_tree_from_profile(s).expect("realizable").canonical().into_string())
                .collect(),
        });
    }
    Ok(sn_tree_from_profile(&optima[0]).expect("realizable"))
}

/// True iff all subtrees of equal height are isomorphic.
pub fn is_self_nested_direct(t: &Tree) -> bool {
    let sc = SubtreeClasses::of(t);
    let mut by_height: BTreeMap<u32, BTreeSet<&str>> = BTreeMap::new();
    for (id, _) in t.nodes() {
        by_height.entry(t.node_height(id)).or_default().insert(sc.canonical_of(sc.class_of(id)));
    }
    by_height.values().all(|set| set.len() == 1)
}

/// All trees reachable from `t` by allowed deletions, `t` included, one per
/// isomorphism class.
pub fn deletion_closure(t: &Tree) -> Vec<Tree> {
    let mut seen: HashMap<CanonicalForm, Tree> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(t.canonical(), t.clone());
    queue.push_back(t.clone());
    while let Some(cur) = queue.pop_front() {
        for op in legal_deletions(&cur) {
            let next = apply(&cur, &op).expect("listed deletions are legal");
            let key = next.canonical();
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<(CanonicalForm, Tree)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, t)| t).collect()
}

/// Largest self-nested trees reachable by allowed deletions.
pub fn nest_embedded_optima(t: &Tree) -> (u64, Vec<Tree>) {
    let mut best = 0u64;
    let mut optima: Vec<Tree> = Vec::new();
    for cand in deletion_closure(t) {
        if !is_self_nested_direct(&cand) {
            continue;
        }
        let n = cand.len() as u64;
        if n > best {
            best = n;
            optima.clear();
        }
        if n == best {
            optima.push(cand);
        }
    }
    (best, optima)
}

/// The NeST of `t` found by breadth-first search over deletions.
pub fn brute_nest_embedded(t: &Tree) -> Result<Tree, OracleError> {
    check_size(t)?;
    let (size, mut optima) = nest_embedded_optima(t);
    if optima.len() > 1 {
        return Err(OracleError::Ambiguous {
            size,
            count: optima.len(),
            optima: optima.iter().map(|o| o.canonical().into_string()).collect(),
        });
    }
    Ok(optima.pop().expect("a path of the same height is always reachable"))
}

/// Every unordered rooted tree with `n` nodes exactly once, in canonical
/// bracket form, sorted by that form.
pub fn enumerate_trees(n: usize) -> Vec<Tree> {
    assert!(n >= 1, "trees have at least one node");
    let mut level: BTreeSet<CanonicalForm> = BTreeSet::from([Tree::leaf().canonical()]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for s in &level {
            let t = parse_tree(s.as_str()).expect("canonical strings parse");
            for (id, _) in t.nodes() {
                let mut grown = t.clone();
                grown.graft(id, &Tree::leaf());
                grown.refresh_heights_from(id);
                next.insert(grown.canonical());
            }
        }
        level = next;
    }
    level.iter().map(|s| parse_tree(s.as_str()).expect("canonical strings parse")).collect()
}
