//! Unordered rooted trees stored in an index arena.
//!
//! Children are kept in a `Vec`, but their order carries no meaning: equality
//! of trees is isomorphism, decided by comparing [`CanonicalForm`]s.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Stable identifier of a node inside one [`Tree`] value.
///
/// Identifiers of deleted nodes are never handed out again by the same tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("tree exceeds u32::MAX node slots"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    height: u32,
}

impl Node {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    /// Height of the subtree rooted here (0 for a leaf).
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Bracket string of a tree with every sibling list sorted ascending under
/// [`canonical_cmp`].
///
/// Two trees are isomorphic iff their canonical forms are byte-equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm(String);

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on bracket strings with `)` ranked before `(`, so a
/// leaf `()` sorts before every larger tree.
pub fn canonical_cmp(a: &str, b: &str) -> Ordering {
    let rank = |c: u8| if c == b')' { 0u8 } else { 1 };
    a.bytes().map(rank).cmp(b.bytes().map(rank))
}

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An unordered rooted tree.
#[derive(Debug, Clone)]
pub struct Tree {
    slots: Vec<Option<Node>>,
    root: NodeId,
    live: usize,
}

impl Tree {
    /// The single-node tree.
    pub fn leaf() -> Self {
        Tree {
            slots: vec![Some(Node { parent: None, children: Vec::new(), height: 0 })],
            root: NodeId(0),
            live: 1,
        }
    }

    /// A new root with copies of `subtrees` as its children, in the given order.
    pub fn from_children<'a, I>(subtrees: I) -> Self
    where
        I: IntoIterator<Item = &'a Tree>,
    {
        let mut t = Tree::leaf();
        let root = t.root;
        for sub in subtrees {
            t.graft(root, sub);
        }
        t.refresh_heights_from(root);
        t
    }

    /// A path of `height + 1` nodes.
    pub fn chain(height: u32) -> Self {
        let mut t = Tree::leaf();
        let mut cur = t.root;
        for _ in 0..height {
            cur = t.push_node(Some(cur));
        }
        t.refresh_heights_from(cur);
        t
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.live
    }

    /// Always false: a tree has at least its root.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.slots.get(id.index()).and_then(Option::as_ref)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub(crate) fn get(&self, id: NodeId) -> &Node {
        self.node(id).unwrap_or_else(|| panic!("node {id} is not in this tree"))
    }

    fn get_mut(&mut self, id: NodeId) -> &mut Node {
        self.slots[id.index()]
            .as_mut()
            .unwrap_or_else(|| panic!("node {id} is not in this tree"))
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.get(id).children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.get(id).parent
    }

    /// Height of the subtree rooted at `id`.
    pub fn node_height(&self, id: NodeId) -> u32 {
        self.get(id).height
    }

    /// Height of the tree, i.e. of its root.
    pub fn height(&self) -> u32 {
        self.get(self.root).height
    }

    /// Largest number of children found at any node.
    pub fn outdegree(&self) -> usize {
        self.nodes().map(|(_, n)| n.children.len()).max().unwrap_or(0)
    }

    /// Live nodes in identifier order.
    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|n| (NodeId::from_index(i), n)))
    }

    /// Depth-first pre-order, children visited in stored order.
    pub fn preorder(&self) -> Vec<NodeId> {
        self.preorder_from(self.root)
    }

    pub fn preorder_from(&self, start: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.children(id).iter().rev().copied());
        }
        out
    }

    /// Number of nodes of the subtree rooted at `id`.
    pub fn subtree_len(&self, id: NodeId) -> usize {
        self.preorder_from(id).len()
    }

    /// Copy of the subtree rooted at `id` as a standalone tree.
    pub fn subtree(&self, id: NodeId) -> Tree {
        let mut t = Tree::leaf();
        let root = t.root;
        for &c in self.children(id) {
            t.graft_from(root, self, c);
        }
        t.slots[0].as_mut().unwrap().height = self.node_height(id);
        t
    }

    /// Canonical bracket string (children sorted ascending, recursively).
    pub fn canonical(&self) -> CanonicalForm {
        let classes = SubtreeClasses::of(self);
        CanonicalForm(classes.canonical_of(classes.class_of(self.root)).to_owned())
    }

    /// Lets the caller reorder the children of every node. Only permutations
    /// are accepted; anything else panics.
    pub fn reorder_children(&mut self, mut f: impl FnMut(NodeId, &mut [NodeId])) {
        for i in 0..self.slots.len() {
            if let Some(node) = self.slots[i].as_mut() {
                let mut before = node.children.clone();
                f(NodeId::from_index(i), &mut node.children);
                let mut after = node.children.clone();
                before.sort_unstable();
                after.sort_unstable();
                assert_eq!(before, after, "reorder_children must permute");
            }
        }
    }

    /// Recomputes every height from scratch and compares with the cache.
    pub fn heights_consistent(&self) -> bool {
        let fresh = self.recomputed_heights();
        self.nodes().all(|(id, n)| fresh[id.index()] == n.height)
    }

    fn recomputed_heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.slots.len()];
        for &id in self.preorder().iter().rev() {
            h[id.index()] = self
                .children(id)
                .iter()
                .map(|c| h[c.index()] + 1)
                .max()
                .unwrap_or(0);
        }
        h
    }

    // --- mutation primitives; callers restore heights via refresh_heights_from ---

    fn push_node(&mut self, parent: Option<NodeId>) -> NodeId {
        let id = NodeId::from_index(self.slots.len());
        self.slots.push(Some(Node { parent, children: Vec::new(), height: 0 }));
        if let Some(p) = parent {
            self.get_mut(p).children.push(id);
        }
        self.live += 1;
        id
    }

    /// Copies `sub` under `parent`, returning the new node for its root.
    /// Heights inside the copy are exact; ancestors of `parent` are not updated.
    pub(crate) fn graft(&mut self, parent: NodeId, sub: &Tree) -> NodeId {
        self.graft_from(parent, sub, sub.root)
    }

    fn graft_from(&mut self, parent: NodeId, src: &Tree, src_id: NodeId) -> NodeId {
        let new_root = self.push_node(Some(parent));
        let mut stack = vec![(src_id, new_root)];
        while let Some((s, d)) = stack.pop() {
            self.get_mut(d).height = src.node_height(s);
            for &c in src.children(s) {
                let nc = self.push_node(Some(d));
                stack.push((c, nc));
            }
        }
        new_root
    }

    /// Inserts a fresh node between `parent` and its child `child`.
    pub(crate) fn insert_above(&mut self, parent: NodeId, child: NodeId) -> NodeId {
        let w = NodeId::from_index(self.slots.len());
        self.slots.push(Some(Node {
            parent: Some(parent),
            children: vec![child],
            height: self.node_height(child) + 1,
        }));
        self.live += 1;
        let pos = self.position_in_parent(parent, child);
        self.get_mut(parent).children[pos] = w;
        self.get_mut(child).parent = Some(w);
        w
    }

    /// Removes the unary node `id`, attaching its only child to its parent.
    pub(crate) fn splice_out(&mut self, id: NodeId) {
        let parent = self.parent(id).expect("cannot splice out the root");
        let child = match self.children(id) {
            [c] => *c,
            _ => panic!("splice_out needs a unary node"),
        };
        let pos = self.position_in_parent(parent, id);
        self.get_mut(parent).children[pos] = child;
        self.get_mut(child).parent = Some(parent);
        self.slots[id.index()] = None;
        self.live -= 1;
    }

    /// Deletes the subtree rooted at `id` (not the root).
    pub(crate) fn remove_subtree(&mut self, id: NodeId) {
        let parent = self.parent(id).expect("cannot remove the root");
        let pos = self.position_in_parent(parent, id);
        self.get_mut(parent).children.remove(pos);
        for n in self.preorder_from(id) {
            self.slots[n.index()] = None;
            self.live -= 1;
        }
    }

    fn position_in_parent(&self, parent: NodeId, child: NodeId) -> usize {
        self.children(parent)
            .iter()
            .position(|&c| c == child)
            .unwrap_or_else(|| panic!("{child} is not a child of {parent}"))
    }

    /// Recomputes cached heights from `id` up to the root, stopping early once
    /// a height is unchanged.
    pub(crate) fn refresh_heights_from(&mut self, id: NodeId) {
        let mut cur = Some(id);
        while let Some(v) = cur {
            let h = self
                .children(v)
                .iter()
                .map(|&c| self.node_height(c) + 1)
                .max()
                .unwrap_or(0);
            let node = self.get_mut(v);
            if node.height == h && v != id {
                break;
            }
            node.height = h;
            cur = node.parent;
        }
    }
}

impl PartialEq for Tree {
    /// Isomorphism, not structural identity.
    fn eq(&self, other: &Self) -> bool {
        is_isomorphic(self, other)
    }
}

impl Eq for Tree {}

/// True iff the two trees are isomorphic as unordered rooted trees.
pub fn is_isomorphic(a: &Tree, b: &Tree) -> bool {
    a.len() == b.len() && a.height() == b.height() && a.canonical() == b.canonical()
}

/// Parses one tree in bracket notation, e.g. `(()(()()))`. Whitespace is ignored.
pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let mut tree: Option<Tree> = None;
    let mut stack: Vec<NodeId> = Vec::new();
    for (offset, ch) in text.char_indices() {
        match ch {
            '(' => {
                match (&mut tree, stack.last().copied()) {
                    (None, _) => {
                        let t = Tree::leaf();
                        stack.push(t.root);
                        tree = Some(t);
                    }
                    (Some(t), Some(parent)) => stack.push(t.push_node(Some(parent))),
                    (Some(_), None) => return Err(ParseError::TrailingInput { offset }),
                }
            }
            ')' => {
                let t = tree.as_mut().ok_or(ParseError::UnbalancedClose { offset })?;
                let id = stack.pop().ok_or(ParseError::UnbalancedClose { offset })?;
                let h = t.children(id).iter().map(|&c| t.node_height(c) + 1).max();
                t.get_mut(id).height = h.unwrap_or(0);
            }
            c if c.is_whitespace() => {}
            c => return Err(ParseError::UnexpectedChar { offset, found: c }),
        }
    }
    match tree {
        None => Err(ParseError::Empty),
        Some(_) if !stack.is_empty() => Err(ParseError::Unclosed { offset: text.len() }),
        Some(t) => Ok(t),
    }
}

impl FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

impl fmt::Display for Tree {
    /// Bracket string in stored child order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step {
            Open(NodeId),
            Close,
        }
        let mut stack = vec![Step::Open(self.root)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Close => f.write_str(")")?,
                Step::Open(id) => {
                    f.write_str("(")?;
                    stack.push(Step::Close);
                    stack.extend(self.children(id).iter().rev().map(|&c| Step::Open(c)));
                }
            }
        }
        Ok(())
    }
}

/// Canonical string of a tree.
pub fn serialize_canonical(t: &Tree) -> String {
    t.canonical().into_string()
}

/// Isomorphism classes of all subtrees of one tree (AHU-style interning).
///
/// Class keys are the sorted multisets of child classes; each class also gets
/// its canonical bracket string, built once.
#[derive(Debug, Clone)]
pub(crate) struct SubtreeClasses {
    node_class: Vec<u32>,
    classes: Vec<ClassInfo>,
}

#[derive(Debug, Clone)]
pub(crate) struct ClassInfo {
    pub height: u32,
    /// Child classes with multiplicity, sorted by class index.
    pub children: Vec<u32>,
    pub canonical: String,
}

impl SubtreeClasses {
    pub fn of(t: &Tree) -> Self {
        let mut node_class = vec![u32::MAX; t.slots.len()];
        let mut classes: Vec<ClassInfo> = Vec::new();
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        for &id in t.preorder().iter().rev() {
            let mut key: Vec<u32> =
                t.children(id).iter().map(|c| node_class[c.index()]).collect();
            key.sort_unstable();
            let next = classes.len() as u32;
            let class = *index.entry(key.clone()).or_insert(next);
            if class == next {
                let mut parts: Vec<&str> =
                    key.iter().map(|&k| classes[k as usize].canonical.as_str()).collect();
                parts.sort_unstable_by(|a, b| canonical_cmp(a, b));
                let mut canonical = String::with_capacity(2 + parts.iter().map(|p| p.len()).sum::<usize>());
                canonical.push('(');
                parts.iter().for_each(|p| canonical.push_str(p));
                canonical.push(')');
                classes.push(ClassInfo { height: t.node_height(id), children: key, canonical });
            }
            node_class[id.index()] = class;
        }
        SubtreeClasses { node_class, classes }
    }

    pub fn class_of(&self, id: NodeId) -> u32 {
        self.node_class[id.index()]
    }

    pub fn info(&self, class: u32) -> &ClassInfo {
        &self.classes[class as usize]
    }

    pub fn canonical_of(&self, class: u32) -> &str {
        &self.classes[class as usize].canonical
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }
}
