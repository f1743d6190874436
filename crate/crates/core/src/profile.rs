//! Height profiles.
//!
//! For a node `v` and a height `h`, `gamma_h(v)` counts the children of `v`
//! whose subtree has height `h`. The profile entry `(h1, h2)` is the vector of
//! `gamma_h2(v)` over all nodes `v` of height `h1`, listed in depth-first
//! pre-order. Only the triangle `0 <= h2 < h1 <= H` is stored.
//!
//! The vertex order inside a row is arbitrary; compare profiles with
//! [`profiles_equivalent`], never with `==`.

use std::fmt::{self, Write as _};

use crate::error::ProfileError;
use crate::tree::Tree;

/// One row `h1` of a height profile: `columns[h2][k]` is `gamma_h2` of the
/// `k`-th node of height `h1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    columns: Vec<Vec<u64>>,
    roots: usize,
}

impl ProfileRow {
    /// Number of nodes of this height.
    pub fn roots(&self) -> usize {
        self.roots
    }

    pub fn column(&self, h2: u32) -> &[u64] {
        &self.columns[h2 as usize]
    }

    pub fn columns(&self) -> &[Vec<u64>] {
        &self.columns
    }

    /// Child-height counts of the `k`-th node, highest height first.
    pub fn vertex_tuple(&self, k: usize) -> Vec<u64> {
        self.columns.iter().rev().map(|col| col[k]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeightProfile {
    /// `rows[h1 - 1]`
    rows: Vec<ProfileRow>,
}

impl HeightProfile {
    /// Builds a profile from explicit rows, `rows[h1 - 1][h2]` being the
    /// vector `(h1, h2)`. All vectors of a row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Vec<u64>>>) -> Result<Self, ProfileError> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, columns) in rows.into_iter().enumerate() {
            let h1 = i as u32 + 1;
            if columns.len() != h1 as usize {
                return Err(ProfileError::RowShape { h1, found: columns.len() });
            }
            let roots = columns[0].len();
            if roots == 0 || columns.iter().any(|c| c.len() != roots) {
                return Err(ProfileError::RowShape { h1, found: columns.len() });
            }
            out.push(ProfileRow { columns, roots });
        }
        Ok(HeightProfile { rows: out })
    }

    pub fn row(&self, h1: u32) -> Option<&ProfileRow> {
        h1.checked_sub(1).and_then(|i| self.rows.get(i as usize))
    }

    pub fn rows(&self) -> &[ProfileRow] {
        &self.rows
    }

    /// The vector `(h1, h2)`; empty outside the triangle.
    pub fn entry(&self, h1: u32, h2: u32) -> &[u64] {
        match self.row(h1) {
            Some(row) if h2 < h1 => row.column(h2),
            _ => &[],
        }
    }

    /// Largest `h1` with a non-empty row; equals the height of the source tree.
    pub fn dim(&self) -> u32 {
        self.rows.len() as u32
    }

    /// Keeps rows `h1 <= h`.
    pub fn restrict(&self, h: u32) -> HeightProfile {
        HeightProfile { rows: self.rows.iter().take(h as usize).cloned().collect() }
    }

    /// True iff every vector is constant.
    pub fn is_self_nested(&self) -> bool {
        self.first_non_constant().is_none()
    }

    fn first_non_constant(&self) -> Option<(u32, u32)> {
        for (i, row) in self.rows.iter().enumerate() {
            for (h2, col) in row.columns.iter().enumerate() {
                if col.windows(2).any(|w| w[0] != w[1]) {
                    return Some((i as u32 + 1, h2 as u32));
                }
            }
        }
        None
    }

    /// Compresses a self-nested profile to one integer per entry.
    pub fn to_scalar(&self) -> Result<ScalarProfile, ProfileError> {
        if let Some((h1, h2)) = self.first_non_constant() {
            return Err(ProfileError::NotSelfNested { h1, h2 });
        }
        ScalarProfile::from_rows(
            self.rows.iter().map(|r| r.columns.iter().map(|c| c[0]).collect()).collect(),
        )
    }
}

impl fmt::Display for HeightProfile {
    /// One line per `h1`, entries `h2 = 0..h1` as parenthesized vectors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim())?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .columns
                .iter()
                .map(|c| {
                    let parts: Vec<String> = c.iter().map(u64::to_string).collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Computes the height profile of `t` and the number of elementary steps
/// spent (one per node visit, one per child inspected, one per appended entry).
pub fn compute_profile_counted(t: &Tree) -> (HeightProfile, u64) {
    let h = t.height() as usize;
    let mut rows: Vec<ProfileRow> = (1..=h)
        .map(|h1| ProfileRow { columns: vec![Vec::new(); h1], roots: 0 })
        .collect();
    let mut ops: u64 = 0;
    let mut gamma: Vec<u64> = Vec::new();
    for v in t.preorder() {
        ops += 1;
        let hv = t.node_height(v) as usize;
        if hv == 0 {
            continue;
        }
        gamma.clear();
        gamma.resize(hv, 0);
        for &c in t.children(v) {
            gamma[t.node_height(c) as usize] += 1;
            ops += 1;
        }
        let row = &mut rows[hv - 1];
        for (col, &g) in row.columns.iter_mut().zip(&gamma) {
            col.push(g);
            ops += 1;
        }
        row.roots += 1;
    }
    (HeightProfile { rows }, ops)
}

pub fn compute_profile(t: &Tree) -> HeightProfile {
    compute_profile_counted(t).0
}

/// True iff for every row the multisets of per-vertex tuples coincide, i.e.
/// one permutation per row maps `a` onto `b` in every column at once.
pub fn profiles_equivalent(a: &HeightProfile, b: &HeightProfile) -> bool {
    a.dim() == b.dim()
        && a.rows.iter().zip(&b.rows).all(|(ra, rb)| {
            if ra.roots != rb.roots {
                return false;
            }
            let mut ta: Vec<Vec<u64>> = (0..ra.roots).map(|k| ra.vertex_tuple(k)).collect();
            let mut tb: Vec<Vec<u64>> = (0..rb.roots).map(|k| rb.vertex_tuple(k)).collect();
            ta.sort_unstable();
            tb.sort_unstable();
            ta == tb
        })
}

pub fn is_self_nested_profile(p: &HeightProfile) -> bool {
    p.is_self_nested()
}

/// Height profile of a self-nested tree, one integer `s(h1, h2)` per entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ScalarProfile {
    /// `rows[h1 - 1][h2]`
    rows: Vec<Vec<u64>>,
}

impl ScalarProfile {
    /// Row `h1` must have exactly `h1` entries.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self, ProfileError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != i + 1 {
                return Err(ProfileError::RowShape { h1: i as u32 + 1, found: r.len() });
            }
        }
        Ok(ScalarProfile { rows })
    }

    pub fn dim(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `s(h1, h2)`; zero outside the triangle.
    pub fn get(&self, h1: u32, h2: u32) -> u64 {
        if h1 == 0 || h2 >= h1 {
            return 0;
        }
        self.rows.get(h1 as usize - 1).map_or(0, |r| r[h2 as usize])
    }

    pub fn restrict(&self, h: u32) -> ScalarProfile {
        ScalarProfile { rows: self.rows.iter().take(h as usize).cloned().collect() }
    }

    /// Every row needs at least one child one level below, otherwise no tree
    /// has this profile.
    pub fn check_realizable(&self) -> Result<(), ProfileError> {
        match self.rows.iter().position(|r| r[r.len() - 1] == 0) {
            Some(i) => Err(ProfileError::Unrealizable { h1: i as u32 + 1 }),
            None => Ok(()),
        }
    }

    /// Node counts `N(0..=dim)` of the self-nested subtrees of each height.
    pub fn level_sizes(&self) -> Result<Vec<u64>, ProfileError> {
        self.check_realizable()?;
        let mut sizes: Vec<u64> = Vec::with_capacity(self.rows.len() + 1);
        sizes.push(1);
        for row in &self.rows {
            let mut n: u64 = 1;
            for (&s, &m) in row.iter().zip(&sizes) {
                n = s.checked_mul(m).and_then(|x| n.checked_add(x)).ok_or(ProfileError::Overflow)?;
            }
            sizes.push(n);
        }
        Ok(sizes)
    }
}

impl fmt::Display for ScalarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim())?;
        for row in &self.rows {
            let mut line = String::new();
            for (i, s) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                let _ = write!(line, "{s}");
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Rebuilds the self-nested tree of a scalar profile: the root of height `d`
/// receives `s(d, i)` copies of the tree built from the restriction to `i`.
pub fn sn_tree_from_profile(s: &ScalarProfile) -> Result<Tree, ProfileError> {
    s.check_realizable()?;
    let mut levels: Vec<Tree> = vec![Tree::leaf()];
    for row in &s.rows {
        let children = row
            .iter()
            .zip(&levels)
            .flat_map(|(&count, sub)| std::iter::repeat_n(sub, count as usize));
        let next = Tree::from_children(children);
        levels.push(next);
    }
    Ok(levels.pop().expect("level 0 always present"))
}

/// Node count of the self-nested tree of `s`, via `N(0) = 1` and
/// `N(H) = 1 + sum_h s(H, h) N(h)`.
pub fn sn_node_count(s: &ScalarProfile) -> Result<u64, ProfileError> {
    Ok(*s.level_sizes()?.last().expect("level 0 always present"))
}
