//! Discrete scaffolding for the construction: the hypercube blow-up with its
//! paired discard rule, the complete bipartite graphs read off each binary
//! coordinate, and the exact independence check over their union.

use std::collections::BTreeMap;

use crate::calculus::{q, Q};
use crate::error::{Error, Result};

/// Smallest ell >= 1 with 2^ell * (s-1) >= r, together with the edge-density
/// bound 2^(-ell-2) it yields.
pub fn compute_ell(r: usize, s: usize) -> Result<(u32, Q)> {
    if s < 2 || s > r {
        return Err(Error::Domain(format!("require 2 <= s <= r, got r={r}, s={s}")));
    }
    let mut ell = 1u32;
    while (1usize << ell) * (s - 1) < r {
        ell += 1;
    }
    Ok((ell, q(1, 1i64 << (ell + 2))))
}

/// The blown-up hypercube: each binary word of length `ell` labels a class
/// of up to s-1 vertices; discards removed vertices until exactly r remain.
///
/// Labels are packed into integers with the first coordinate as the most
/// significant bit, so numeric order is lexicographic word order.
#[derive(Clone, Debug)]
pub struct BlownHypercube {
    pub ell: u32,
    pub r: usize,
    pub s: usize,
    /// label -> final vertex ids (ids are 0..r, assigned in label order)
    classes: BTreeMap<u32, Vec<usize>>,
    /// 1-based (step, label) records, pairs first, odd leftover last
    pub discard_trace: Vec<(usize, u32)>,
}

/// Value of coordinate `a` (0-based) in `label` for words of length `ell`.
pub fn label_coord(label: u32, a: u32, ell: u32) -> u8 {
    ((label >> (ell - 1 - a)) & 1) as u8
}

impl BlownHypercube {
    pub fn classes(&self) -> &BTreeMap<u32, Vec<usize>> {
        &self.classes
    }

    /// Label of the class containing vertex `v`.
    pub fn label_of(&self, v: usize) -> u32 {
        for (label, ids) in &self.classes {
            if ids.contains(&v) {
                return *label;
            }
        }
        unreachable!("vertex {v} not in any class")
    }

    /// Class sizes indexed by label.
    pub fn class_sizes(&self) -> BTreeMap<u32, usize> {
        self.classes.iter().map(|(l, ids)| (*l, ids.len())).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.r
    }
}

/// Blows up the ell-cube into classes of size s-1 and discards down to r
/// vertices.
///
/// Discards happen in complementary label pairs, sweeping pairs in
/// lexicographic order of the smaller label and wrapping around while
/// skipping emptied classes; a final odd discard comes from a
/// currently-largest class, smallest label first. Paired discards keep the
/// two sides of every coordinate balanced, which is what bounds the
/// bipartite part sizes by ceil(r/2) downstream.
pub fn build_blown_hypercube(r: usize, s: usize, ell: u32) -> Result<BlownHypercube> {
    let (expect_ell, _) = compute_ell(r, s)?;
    if ell != expect_ell {
        return Err(Error::Domain(format!(
            "inconsistent ell: got {ell}, the pair (r={r}, s={s}) requires {expect_ell}"
        )));
    }
    let num_classes = 1u32 << ell;
    let total = (num_classes as usize) * (s - 1);
    debug_assert!(total >= r);
    let mut sizes: Vec<usize> = vec![s - 1; num_classes as usize];
    let mut trace = Vec::new();
    let mut remaining = total - r;
    let mut step = 1usize;

    let full = num_classes - 1;
    let pair_count = (num_classes / 2) as usize;
    let mut cursor = 0usize;
    while remaining >= 2 {
        let mut scanned = 0;
        loop {
            if scanned == pair_count {
                return Err(Error::Domain(format!(
                    "discard rule stuck with {remaining} discards left (r={r}, s={s})"
                )));
            }
            let lo = (cursor % pair_count) as u32;
            cursor += 1;
            scanned += 1;
            let hi = lo ^ full;
            if sizes[lo as usize] > 0 && sizes[hi as usize] > 0 {
                sizes[lo as usize] -= 1;
                sizes[hi as usize] -= 1;
                trace.push((step, lo));
                trace.push((step + 1, hi));
                step += 2;
                remaining -= 2;
                break;
            }
        }
    }
    if remaining == 1 {
        let max = *sizes.iter().max().unwrap();
        let label = sizes.iter().position(|&sz| sz == max).unwrap();
        sizes[label] -= 1;
        trace.push((step, label as u32));
    }

    let mut classes = BTreeMap::new();
    let mut next_id = 0usize;
    for (label, &sz) in sizes.iter().enumerate() {
        let ids: Vec<usize> = (0..sz).map(|j| next_id + j).collect();
        next_id += sz;
        classes.insert(label as u32, ids);
    }
    debug_assert_eq!(next_id, r);
    Ok(BlownHypercube { ell, r, s, classes, discard_trace: trace })
}

/// One coordinate's complete bipartite graph: `index` runs from 1 to ell,
/// and vertex v sits in part b iff the index-th coordinate of its class
/// label is b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteAux {
    pub index: usize,
    pub part0: Vec<usize>,
    pub part1: Vec<usize>,
}

impl BipartiteAux {
    pub fn vertex_count(&self) -> usize {
        self.part0.len() + self.part1.len()
    }

    /// True when i and j lie in opposite parts, i.e. ij is an edge.
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        (self.part0.contains(&i) && self.part1.contains(&j))
            || (self.part0.contains(&j) && self.part1.contains(&i))
    }
}

/// Reads the ell complete bipartite graphs off the blown hypercube.
pub fn build_bipartite_family(cube: &BlownHypercube) -> Vec<BipartiteAux> {
    let mut out = Vec::with_capacity(cube.ell as usize);
    for a in 0..cube.ell {
        let mut part0 = Vec::new();
        let mut part1 = Vec::new();
        for (label, ids) in cube.classes() {
            let side = label_coord(*label, a, cube.ell);
            for &v in ids {
                if side == 0 {
                    part0.push(v);
                } else {
                    part1.push(v);
                }
            }
        }
        part0.sort_unstable();
        part1.sort_unstable();
        out.push(BipartiteAux { index: (a + 1) as usize, part0, part1 });
    }
    out
}

/// For each ordered pair of vertices, the bitmask of coordinates whose
/// bipartite graph joins them (bit a-1 set iff B_a has the edge). Vertices
/// in the same class share no edge and get mask 0.
pub fn constraint_masks(bs: &[BipartiteAux], r: usize) -> Vec<Vec<u32>> {
    let mut mask = vec![vec![0u32; r]; r];
    for b in bs {
        let bit = 1u32 << (b.index - 1);
        for &i in &b.part0 {
            for &j in &b.part1 {
                mask[i][j] |= bit;
                mask[j][i] |= bit;
            }
        }
    }
    mask
}

/// Adjacency bitmasks of the union graph over the common vertex set [r].
pub fn union_adjacency(bs: &[BipartiteAux]) -> Result<Vec<u32>> {
    if bs.is_empty() {
        return Err(Error::Domain("empty bipartite family".into()));
    }
    let r = bs[0].vertex_count();
    for b in bs {
        if b.vertex_count() != r {
            return Err(Error::Domain("bipartite family on inconsistent vertex sets".into()));
        }
    }
    if r > 32 {
        return Err(Error::ResourceLimit(format!("union adjacency capped at 32 vertices, got {r}")));
    }
    let mut adj = vec![0u32; r];
    for b in bs {
        for &i in &b.part0 {
            for &j in &b.part1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    Ok(adj)
}

/// Exact maximum independent set size in the union of the bipartite
/// graphs, by exhaustive subset enumeration. Capped at 20 vertices.
pub fn alpha_union(bs: &[BipartiteAux]) -> Result<usize> {
    let adj = union_adjacency(bs)?;
    let r = adj.len();
    if r > 20 {
        return Err(Error::ResourceLimit(format!(
            "exhaustive independence search capped at 20 vertices, got {r}"
        )));
    }
    let mut best = 0usize;
    for mask in 0u32..(1u32 << r) {
        if mask.count_ones() as usize <= best {
            continue;
        }
        let mut ok = true;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if adj[v] & mask != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = mask.count_ones() as usize;
        }
    }
    Ok(best)
}
