//! DAG reduction: the quotient of a tree by subtree isomorphism, with edge
//! multiplicities.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::DagError;
use crate::tree::{canonical_cmp, SubtreeClasses, Tree};

/// Index of a class in a [`DagReduction`]. Classes are sorted by height, then
/// by canonical string, so identifiers are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagClass {
    height: u32,
    /// Child class -> number of occurrences directly below the class root.
    out_edges: BTreeMap<ClassId, u64>,
    /// Nodes of the subtree this class stands for.
    size: u64,
}

impl DagClass {
    pub fn new(height: u32, out_edges: BTreeMap<ClassId, u64>) -> Self {
        DagClass { height, out_edges, size: 0 }
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn out_edges(&self) -> &BTreeMap<ClassId, u64> {
        &self.out_edges
    }

    /// Number of nodes of any subtree in this class.
    pub fn size(&self) -> u64 {
        self.size
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagReduction {
    classes: Vec<DagClass>,
    root: ClassId,
}

impl DagReduction {
    /// Builds a reduction from explicit classes, checking that heights are
    /// consistent with the edges, that edges go strictly downwards, and that
    /// the expanded node count fits in a `u64`.
    pub fn new(mut classes: Vec<DagClass>, root: ClassId) -> Result<Self, DagError> {
        if root.index() >= classes.len() {
            return Err(DagError::UnknownClass(root));
        }
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&i| classes[i].height);
        for &i in &order {
            let class = &classes[i];
            let mut size: u64 = 1;
            let mut max_child: Option<u32> = None;
            for (&child, &mult) in &class.out_edges {
                let target = classes.get(child.index()).ok_or(DagError::UnknownClass(child))?;
                if mult == 0 {
                    return Err(DagError::ZeroMultiplicity { from: ClassId(i as u32), to: child });
                }
                if target.height >= class.height {
                    return Err(DagError::EdgeNotDescending { from: ClassId(i as u32), to: child });
                }
                max_child = max_child.max(Some(target.height));
                size = mult
                    .checked_mul(target.size)
                    .and_then(|m| size.checked_add(m))
                    .ok_or(DagError::Overflow)?;
            }
            let expected = max_child.map_or(0, |h| h + 1);
            if expected != class.height {
                return Err(DagError::HeightMismatch {
                    class: ClassId(i as u32),
                    stored: class.height,
                    expected,
                });
            }
            classes[i].size = size;
        }
        Ok(DagReduction { classes, root })
    }

    pub fn classes(&self) -> &[DagClass] {
        &self.classes
    }

    pub fn class(&self, id: ClassId) -> &DagClass {
        &self.classes[id.index()]
    }

    pub fn root_class(&self) -> ClassId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn height(&self) -> u32 {
        self.class(self.root).height
    }

    /// Graphviz rendering: one node per class labeled with its height and
    /// subtree size, edges labeled with multiplicities.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dag {\n");
        for (i, c) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "  c{i} [label=\"h={},n={}\"];", c.height, c.size);
        }
        for (i, c) in self.classes.iter().enumerate() {
            for (to, mult) in &c.out_edges {
                let _ = writeln!(out, "  c{i} -> {to} [label=\"{mult}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// One line per class, `c2 h=2 n=5: c0 x1, c1 x1`, classes in identifier order.
impl fmt::Display for DagReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.classes.iter().enumerate() {
            write!(f, "c{i} h={} n={}", c.height, c.size)?;
            for (k, (to, mult)) in c.out_edges.iter().enumerate() {
                write!(f, "{}{to} x{mult}", if k == 0 { ": " } else { ", " })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Computes the DAG reduction of `t`.
pub fn reduce(t: &Tree) -> DagReduction {
    let sc = SubtreeClasses::of(t);
    let mut order: Vec<u32> = (0..sc.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (sc.info(a), sc.info(b));
        ia.height.cmp(&ib.height).then_with(|| canonical_cmp(&ia.canonical, &ib.canonical))
    });
    let mut rank = vec![0u32; sc.len()];
    for (pos, &c) in order.iter().enumerate() {
        rank[c as usize] = pos as u32;
    }
    let classes = order
        .iter()
        .map(|&c| {
            let info = sc.info(c);
            let mut out_edges = BTreeMap::new();
            for &child in &info.children {
                *out_edges.entry(ClassId(rank[child as usize])).or_insert(0u64) += 1;
            }
            DagClass::new(info.height, out_edges)
        })
        .collect();
    let root = ClassId(rank[sc.class_of(t.root()) as usize]);
    DagReduction::new(classes, root).expect("reduction of a valid tree is a valid DAG")
}

/// True iff some path visits every class, i.e. exactly one class per height.
pub fn is_linear(d: &DagReduction) -> bool {
    let h = d.height() as usize;
    if d.len() != h + 1 {
        return false;
    }
    let mut seen = vec![false; h + 1];
    for c in &d.classes {
        let slot = &mut seen[c.height as usize];
        if *slot {
            return false;
        }
        *slot = true;
    }
    true
}

/// Unfolds the DAG back into a tree, repeating child subtrees by multiplicity.
pub fn expand(d: &DagReduction) -> Tree {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by_key(|&i| d.classes[i].height);
    let mut built: Vec<Option<Tree>> = vec![None; d.len()];
    for i in order {
        let class = &d.classes[i];
        let subtrees: Vec<&Tree> = class
            .out_edges
            .iter()
            .flat_map(|(c, &m)| {
                let sub = built[c.index()].as_ref().expect("children expanded first");
                std::iter::repeat_n(sub, m as usize)
            })
            .collect();
        built[i] = Some(Tree::from_children(subtrees));
    }
    built.swap_remove(d.root.index()).expect("root class expanded")
}

/// Number of nodes of the expanded tree, via m(C) = 1 + sum N(C,C') m(C').
pub fn node_count(d: &DagReduction) -> u64 {
    d.class(d.root).size
}
