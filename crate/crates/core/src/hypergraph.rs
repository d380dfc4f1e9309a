//! The r-uniform hypergraph layer: hyperedges are r-sets of coordinate
//! tuples admitting a role ordering whose constrained coordinate pairs are
//! nearly antipodal; the blow-up replicates vertices into fibers, keeps a
//! random subset of transversal edge copies, and deletes edges until no
//! forbidden sub-configuration (overlapping pair or short Berge cycle)
//! remains.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::hypercube::{constraint_masks, BipartiteAux};
use crate::rng::derive_seed;
use crate::sphere::{SpherePoint, DIST_SLACK};

/// An ordered tuple of cell indices; one vertex of the base hypergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleVertex {
    pub coords: Vec<usize>,
}

/// All z^ell ordered tuples, indexed row-major (first coordinate most
/// significant).
pub fn tuple_vertices(z: usize, ell: u32) -> Vec<TupleVertex> {
    let count = z.pow(ell);
    let mut out = Vec::with_capacity(count);
    for id in 0..count {
        out.push(TupleVertex { coords: tuple_coords(id, z, ell) });
    }
    out
}

pub fn tuple_coords(id: usize, z: usize, ell: u32) -> Vec<usize> {
    let mut coords = vec![0usize; ell as usize];
    let mut rest = id;
    for a in (0..ell as usize).rev() {
        coords[a] = rest % z;
        rest /= z;
    }
    coords
}

pub fn tuple_id(coords: &[usize], z: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * z + c)
}

/// One hyperedge: sorted vertex ids plus the stored role ordering
/// (`witness[role]` is the vertex filling that role; empty when unknown).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperEdge {
    pub vertices: Vec<usize>,
    pub witness: Vec<usize>,
}

impl HyperEdge {
    fn new(mut vertices: Vec<usize>, witness: Vec<usize>) -> Self {
        vertices.sort_unstable();
        HyperEdge { vertices, witness }
    }
}

/// An r-uniform hypergraph on either tuple vertices or blown vertices.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    pub rank: usize,
    pub vertex_count: usize,
    pub edges: Vec<HyperEdge>,
}

impl Hypergraph {
    pub fn edge_sets(&self) -> Vec<&[usize]> {
        self.edges.iter().map(|e| e.vertices.as_slice()).collect()
    }
}

/// Distance-threshold context shared by the hyperedge predicates: which
/// cell pairs count as nearly antipodal (d > 2 - theta) and which as close
/// (d < sqrt(2) - theta).
pub struct GeometryContext {
    pub theta: f64,
    z: usize,
    near_antipodal: Vec<bool>,
    close: Vec<bool>,
}

impl GeometryContext {
    pub fn new(points: &[SpherePoint], theta: f64) -> Self {
        let z = points.len();
        let mut near_antipodal = vec![false; z * z];
        let mut close = vec![false; z * z];
        for i in 0..z {
            for j in 0..z {
                let d = points[i].dist(&points[j]);
                near_antipodal[i * z + j] = d > 2.0 - theta - DIST_SLACK;
                close[i * z + j] = d < 2.0f64.sqrt() - theta + DIST_SLACK;
            }
        }
        GeometryContext { theta, z, near_antipodal, close }
    }

    #[inline]
    pub fn near_antipodal(&self, ci: usize, cj: usize) -> bool {
        self.near_antipodal[ci * self.z + cj]
    }

    #[inline]
    pub fn close(&self, ci: usize, cj: usize) -> bool {
        self.close[ci * self.z + cj]
    }
}

/// Searches for a role ordering of `tuple_set` satisfying every constrained
/// coordinate pair; returns the lexicographically least assignment
/// (`ordering[role]` = position within `tuple_set`), or `None`.
pub fn witness_ordering(
    tuple_set: &[&TupleVertex],
    bs: &[BipartiteAux],
    geom: &GeometryContext,
) -> Option<Vec<usize>> {
    let r = tuple_set.len();
    if bs.is_empty() || bs[0].vertex_count() != r {
        return None;
    }
    let masks = constraint_masks(bs, r);
    let mut assignment: Vec<usize> = Vec::with_capacity(r);
    let mut used = vec![false; r];
    if place_role(tuple_set, &masks, geom, &mut assignment, &mut used) {
        Some(assignment)
    } else {
        None
    }
}

fn place_role(
    tuple_set: &[&TupleVertex],
    masks: &[Vec<u32>],
    geom: &GeometryContext,
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let r = tuple_set.len();
    let role = assignment.len();
    if role == r {
        return true;
    }
    'candidate: for pos in 0..r {
        if used[pos] {
            continue;
        }
        for (earlier_role, &earlier_pos) in assignment.iter().enumerate() {
            let mut m = masks[earlier_role][role];
            while m != 0 {
                let a = m.trailing_zeros() as usize;
                m &= m - 1;
                let ci = tuple_set[earlier_pos].coords[a];
                let cj = tuple_set[pos].coords[a];
                if !geom.near_antipodal(ci, cj) {
                    continue 'candidate;
                }
            }
        }
        assignment.push(pos);
        used[pos] = true;
        if place_role(tuple_set, masks, geom, assignment, used) {
            return true;
        }
        assignment.pop();
        used[pos] = false;
    }
    false
}

/// Re-validates a stored witness ordering against the constraints.
pub fn witness_valid(
    edge: &HyperEdge,
    tuples: &[TupleVertex],
    bs: &[BipartiteAux],
    geom: &GeometryContext,
) -> bool {
    let r = edge.vertices.len();
    if edge.witness.len() != r {
        return false;
    }
    let sorted: BTreeSet<usize> = edge.witness.iter().copied().collect();
    if !sorted.iter().eq(edge.vertices.iter()) {
        return false;
    }
    let masks = constraint_masks(bs, r);
    for i in 0..r {
        for j in (i + 1)..r {
            let mut m = masks[i][j];
            while m != 0 {
                let a = m.trailing_zeros() as usize;
                m &= m - 1;
                let ci = tuples[edge.witness[i]].coords[a];
                let cj = tuples[edge.witness[j]].coords[a];
                if !geom.near_antipodal(ci, cj) {
                    return false;
                }
            }
        }
    }
    true
}

/// Enumeration caps for the exhaustive hyperedge search.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_vertices: usize,
    pub max_candidates: u64,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_vertices: 400, max_candidates: 100_000_000 }
    }
}

/// Builds the base hypergraph on all z^ell tuples: an r-set is a hyperedge
/// iff it admits a witness ordering. Exhaustive over r-subsets with a
/// cheap per-pair near-antipodality filter before the backtracking search.
pub fn build_base_hypergraph(
    points: &[SpherePoint],
    ell: u32,
    bs: &[BipartiteAux],
    theta: f64,
    limits: &EnumLimits,
) -> Result<Hypergraph> {
    if bs.is_empty() {
        return Err(Error::Domain("empty bipartite family".into()));
    }
    let r = bs[0].vertex_count();
    let z = points.len();
    let nv = z.checked_pow(ell).ok_or_else(|| {
        Error::ResourceLimit(format!("z^ell overflows with z={z}, ell={ell}"))
    })?;
    if nv > limits.max_vertices {
        return Err(Error::ResourceLimit(format!(
            "z^ell = {nv} tuple vertices exceeds the cap {}; reduce z or ell",
            limits.max_vertices
        )));
    }
    let candidates = binomial(nv as u64, r as u64);
    if candidates > limits.max_candidates {
        return Err(Error::ResourceLimit(format!(
            "C({nv}, {r}) = {candidates} candidate sets exceeds the cap {}; reduce z, ell or r",
            limits.max_candidates
        )));
    }
    let tuples = tuple_vertices(z, ell);
    let geom = GeometryContext::new(points, theta);
    let masks = constraint_masks(bs, r);

    // constrained role pairs are exactly the cross-class pairs; a candidate
    // set must offer at least that many constrainable tuple pairs
    let constrained_pairs = {
        let mut c = 0usize;
        for i in 0..r {
            for j in (i + 1)..r {
                if masks[i][j] != 0 {
                    c += 1;
                }
            }
        }
        c
    };
    // per tuple pair: is any coordinate pair nearly antipodal?
    let pair_usable = |u: usize, v: usize| -> bool {
        let ell = ell as usize;
        (0..ell).any(|a| geom.near_antipodal(tuples[u].coords[a], tuples[v].coords[a]))
    };

    let mut edges = Vec::new();
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let usable = {
            let mut c = 0usize;
            for i in 0..r {
                for j in (i + 1)..r {
                    if pair_usable(subset[i], subset[j]) {
                        c += 1;
                    }
                }
            }
            c
        };
        if usable >= constrained_pairs {
            let refs: Vec<&TupleVertex> = subset.iter().map(|&id| &tuples[id]).collect();
            if let Some(assignment) = witness_ordering(&refs, bs, &geom) {
                let witness: Vec<usize> = assignment.iter().map(|&pos| subset[pos]).collect();
                edges.push(HyperEdge::new(subset.clone(), witness));
            }
        }
        if !next_combination(&mut subset, nv) {
            break;
        }
    }
    Ok(Hypergraph { rank: r, vertex_count: nv, edges })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (r - i) {
            subset[i] += 1;
            for j in (i + 1)..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Vertex blow-up bookkeeping: blown vertex b covers base vertex b / t.
#[derive(Clone, Copy, Debug)]
pub struct BlowupMap {
    pub fiber_size: usize,
    pub base_count: usize,
}

impl BlowupMap {
    pub fn base_of(&self, blown: usize) -> usize {
        blown / self.fiber_size
    }

    pub fn fiber(&self, base: usize) -> std::ops::Range<usize> {
        base * self.fiber_size..(base + 1) * self.fiber_size
    }

    pub fn blown_count(&self) -> usize {
        self.fiber_size * self.base_count
    }
}

/// A forbidden sub-configuration found by the scan.
#[derive(Clone, Debug)]
pub struct ForbiddenConfig {
    pub edge_indices: Vec<usize>,
    /// number of distinct vertices v in the sub-configuration
    pub vertex_count: usize,
    /// v + (1 + gamma - r)(m - 1), which is below r for reported configs
    pub lhs: f64,
    pub kind: ForbiddenKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForbiddenKind {
    /// two edges sharing at least two vertices
    SharedPair,
    /// Berge cycle of the given length
    BergeCycle(usize),
}

/// Maximum Berge cycle length the scan covers: the configured order capped
/// by ceil(1/gamma), beyond which cycles stop violating the inequality.
pub fn berge_scan_limit(scan_order: usize, gamma: f64) -> usize {
    scan_order.min((1.0 / gamma).ceil() as usize)
}

/// Scans for edge pairs sharing two or more vertices and Berge cycles of
/// length 3 up to `berge_scan_limit`. An empty result certifies the scanned
/// scope only; the inequality values are reported per configuration.
pub fn forbidden_scan(
    h: &Hypergraph,
    scan_order: usize,
    gamma: f64,
    r: usize,
) -> Vec<ForbiddenConfig> {
    scan_edges(&h.edges, h.vertex_count, scan_order, gamma, r)
}

fn scan_edges(
    edges: &[HyperEdge],
    vertex_count: usize,
    scan_order: usize,
    gamma: f64,
    r: usize,
) -> Vec<ForbiddenConfig> {
    let mut out = Vec::new();
    let m = edges.len();

    // vertex -> incident edges
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (ei, e) in edges.iter().enumerate() {
        for &v in &e.vertices {
            incidence[v].push(ei);
        }
    }

    // shared pairs, found through common incidences
    let mut seen_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for inc in &incidence {
        for (a, &ei) in inc.iter().enumerate() {
            for &ej in &inc[a + 1..] {
                let key = (ei.min(ej), ei.max(ej));
                if seen_pairs.contains(&key) {
                    continue;
                }
                let shared = intersection_size(&edges[ei].vertices, &edges[ej].vertices);
                if shared >= 2 {
                    seen_pairs.insert(key);
                    let v = 2 * r - shared;
                    out.push(ForbiddenConfig {
                        edge_indices: vec![key.0, key.1],
                        vertex_count: v,
                        lhs: v as f64 + (1.0 + gamma - r as f64),
                        kind: ForbiddenKind::SharedPair,
                    });
                }
            }
        }
    }

    // Berge cycles of length 3..=limit: DFS over edge paths with distinct
    // link vertices; canonical form starts at the smallest edge index and
    // fixes a direction
    let limit = berge_scan_limit(scan_order, gamma);
    if limit >= 3 && m >= 3 {
        let mut path: Vec<usize> = Vec::new();
        let mut links: Vec<usize> = Vec::new();
        for start in 0..m {
            path.push(start);
            berge_dfs(edges, &incidence, start, limit, &mut path, &mut links, gamma, r, &mut out);
            path.pop();
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn berge_dfs(
    edges: &[HyperEdge],
    incidence: &[Vec<usize>],
    start: usize,
    limit: usize,
    path: &mut Vec<usize>,
    links: &mut Vec<usize>,
    gamma: f64,
    r: usize,
    out: &mut Vec<ForbiddenConfig>,
) {
    let current = *path.last().unwrap();

    // try to close a cycle of length >= 3
    if path.len() >= 3 {
        // closing link: a vertex shared by the last and first edges,
        // distinct from all used links
        for &v in &edges[current].vertices {
            if links.contains(&v) {
                continue;
            }
            if edges[start].vertices.binary_search(&v).is_ok() {
                // canonical direction: second edge smaller than last edge
                if path[1] < *path.last().unwrap() {
                    let m = path.len();
                    let mut verts: BTreeSet<usize> = BTreeSet::new();
                    for &e in path.iter() {
                        verts.extend(edges[e].vertices.iter().copied());
                    }
                    let vcount = verts.len();
                    out.push(ForbiddenConfig {
                        edge_indices: path.clone(),
                        vertex_count: vcount,
                        lhs: vcount as f64 + (1.0 + gamma - r as f64) * (m as f64 - 1.0),
                        kind: ForbiddenKind::BergeCycle(m),
                    });
                }
                break;
            }
        }
    }
    if path.len() == limit {
        return;
    }

    // extend: pick an unused link vertex of the current edge and a larger-
    // indexed unvisited edge through it
    for &v in &edges[current].vertices {
        if links.contains(&v) {
            continue;
        }
        for &next in &incidence[v] {
            if next <= start || path.contains(&next) {
                continue;
            }
            path.push(next);
            links.push(v);
            berge_dfs(edges, incidence, start, limit, path, links, gamma, r, out);
            links.pop();
            path.pop();
        }
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Greedy deletion: repeatedly drop the edge participating in the most
/// forbidden configurations until none remain. Deleting edges never
/// creates configurations, so one scan suffices.
pub fn prune_forbidden(
    edges: &mut Vec<HyperEdge>,
    vertex_count: usize,
    scan_order: usize,
    gamma: f64,
    r: usize,
) -> usize {
    let configs = scan_edges(edges, vertex_count, scan_order, gamma, r);
    if configs.is_empty() {
        return 0;
    }
    let mut alive = vec![true; edges.len()];
    let mut config_alive = vec![true; configs.len()];
    let mut count = vec![0usize; edges.len()];
    for c in &configs {
        for &e in &c.edge_indices {
            count[e] += 1;
        }
    }
    let mut removed = 0usize;
    let mut remaining = configs.len();
    while remaining > 0 {
        // most-violating edge, smallest index on ties
        let victim = count
            .iter()
            .enumerate()
            .filter(|(e, _)| alive[*e])
            .max_by(|(e1, c1), (e2, c2)| c1.cmp(c2).then(e2.cmp(e1)))
            .map(|(e, _)| e)
            .expect("violations remain, so some edge participates");
        alive[victim] = false;
        removed += 1;
        for (ci, c) in configs.iter().enumerate() {
            if config_alive[ci] && c.edge_indices.contains(&victim) {
                config_alive[ci] = false;
                remaining -= 1;
                for &e in &c.edge_indices {
                    count[e] -= 1;
                }
            }
        }
    }
    let mut kept = Vec::with_capacity(edges.len() - removed);
    for (ei, e) in edges.drain(..).enumerate() {
        if alive[ei] {
            kept.push(e);
        }
    }
    *edges = kept;
    removed
}

/// Blow-up options; the keep probability defaults to t^(-(r-1)/2).
#[derive(Clone, Copy, Debug)]
pub struct BlowupOptions {
    pub keep_probability: Option<f64>,
    pub scan_order: usize,
    pub max_retries: usize,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        BlowupOptions { keep_probability: None, scan_order: 4, max_retries: 16 }
    }
}

/// Blows up each vertex into a fiber of size t, samples transversal copies
/// of each base edge with the keep probability, and prunes forbidden
/// configurations. Retries with derived seeds until every base edge
/// retains at least one copy, then errors out.
pub fn random_blowup(
    base: &Hypergraph,
    t: usize,
    gamma: f64,
    opts: &BlowupOptions,
    seed: u64,
) -> Result<(Hypergraph, BlowupMap)> {
    if t < 1 {
        return Err(Error::Domain("fiber size t must be >= 1".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} outside (0, 1)")));
    }
    let r = base.rank;
    let map = BlowupMap { fiber_size: t, base_count: base.vertex_count };
    let p = opts
        .keep_probability
        .unwrap_or_else(|| (t as f64).powf(-((r as f64) - 1.0) / 2.0))
        .clamp(0.0, 1.0);

    let base_seed = derive_seed(seed, "blowup");
    for attempt in 0..opts.max_retries {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed.wrapping_add(attempt as u64));
        let mut edges: Vec<HyperEdge> = Vec::new();
        for e in &base.edges {
            let copies = t.pow(r as u32);
            for copy in 0..copies {
                if p < 1.0 && !rng.random_bool(p) {
                    continue;
                }
                let mut rest = copy;
                // assign fibers role by role so the witness carries over
                let witness: Vec<usize> = e
                    .witness
                    .iter()
                    .map(|&v| {
                        let fiber = rest % t;
                        rest /= t;
                        v * t + fiber
                    })
                    .collect();
                let vertices = if witness.len() == r {
                    witness.clone()
                } else {
                    let mut vs = Vec::with_capacity(r);
                    let mut rest2 = copy;
                    for &v in &e.vertices {
                        vs.push(v * t + rest2 % t);
                        rest2 /= t;
                    }
                    vs
                };
                edges.push(HyperEdge::new(vertices, witness));
            }
        }
        prune_forbidden(&mut edges, map.blown_count(), opts.scan_order, gamma, r);

        // coverage: every base edge keeps at least one transversal copy
        let mut covered = vec![false; base.edges.len()];
        let base_index: std::collections::BTreeMap<&[usize], usize> = base
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.vertices.as_slice(), i))
            .collect();
        for e in &edges {
            let mut bases: Vec<usize> = e.vertices.iter().map(|&v| map.base_of(v)).collect();
            bases.sort_unstable();
            if let Some(&bi) = base_index.get(bases.as_slice()) {
                covered[bi] = true;
            }
        }
        if covered.iter().all(|&c| c) {
            let blown =
                Hypergraph { rank: r, vertex_count: map.blown_count(), edges };
            return Ok((blown, map));
        }
    }
    Err(Error::ResourceLimit(format!(
        "blow-up deleted every copy of some base edge in each of {} attempts",
        opts.max_retries
    )))
}

/// Supersaturation report: for each base edge, the full-fiber check plus
/// seeded random fiber-subset checks of size ceil(gamma * t).
#[derive(Clone, Debug)]
pub struct SupersaturationReport {
    pub base_edges: usize,
    pub checks: usize,
    pub passed: usize,
    pub failing_edges: Vec<usize>,
    pub fraction: f64,
}

pub fn supersaturation_check(
    base: &Hypergraph,
    blown: &Hypergraph,
    map: &BlowupMap,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<SupersaturationReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} outside (0, 1]")));
    }
    let t = map.fiber_size;
    let subset_size = ((gamma * t as f64).ceil() as usize).clamp(1, t);

    // copies per base edge
    let base_index: std::collections::BTreeMap<&[usize], usize> = base
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.vertices.as_slice(), i))
        .collect();
    let mut copies: Vec<Vec<&HyperEdge>> = vec![Vec::new(); base.edges.len()];
    for e in &blown.edges {
        let mut bases: Vec<usize> = e.vertices.iter().map(|&v| map.base_of(v)).collect();
        bases.sort_unstable();
        if let Some(&bi) = base_index.get(bases.as_slice()) {
            copies[bi].push(e);
        }
    }

    let mut rng = crate::rng::substream(seed, "supersaturation");
    let mut checks = 0usize;
    let mut passed = 0usize;
    let mut failing: BTreeSet<usize> = BTreeSet::new();
    for (bi, base_edge) in base.edges.iter().enumerate() {
        // full-fiber check
        checks += 1;
        if copies[bi].is_empty() {
            failing.insert(bi);
        } else {
            passed += 1;
        }
        // sampled fiber subsets
        for _ in 0..samples {
            checks += 1;
            let subsets: Vec<BTreeSet<usize>> = base_edge
                .vertices
                .iter()
                .map(|&v| {
                    let mut fiber: Vec<usize> = map.fiber(v).collect();
                    // partial shuffle
                    for i in 0..subset_size {
                        let j = i + rng.random_range(0..fiber.len() - i);
                        fiber.swap(i, j);
                    }
                    fiber.into_iter().take(subset_size).collect()
                })
                .collect();
            let hit = copies[bi].iter().any(|copy| {
                copy.vertices.iter().all(|&bv| {
                    let base_v = map.base_of(bv);
                    let slot = base_edge.vertices.iter().position(|&x| x == base_v).unwrap();
                    subsets[slot].contains(&bv)
                })
            });
            if hit {
                passed += 1;
            } else {
                failing.insert(bi);
            }
        }
    }
    Ok(SupersaturationReport {
        base_edges: base.edges.len(),
        checks,
        passed,
        failing_edges: failing.into_iter().collect(),
        fraction: if checks == 0 { 1.0 } else { passed as f64 / checks as f64 },
    })
}

/// Writes the line-oriented text format: a `h rank vertices edges` header,
/// one edge per line, then optional `x blown base` map lines.
pub fn write_hypergraph<W: Write>(
    w: &mut W,
    h: &Hypergraph,
    map: Option<&BlowupMap>,
) -> Result<()> {
    writeln!(w, "h {} {} {}", h.rank, h.vertex_count, h.edges.len())?;
    for e in &h.edges {
        let parts: Vec<String> = e.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", parts.join(" "))?;
    }
    if let Some(m) = map {
        for blown in 0..m.blown_count() {
            writeln!(w, "x {} {}", blown, m.base_of(blown))?;
        }
    }
    Ok(())
}

pub fn read_hypergraph<R: BufRead>(r: &mut R) -> Result<(Hypergraph, Option<BlowupMap>)> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "h" {
        return Err(Error::Parse(format!("bad hypergraph header: {header:?}")));
    }
    let rank: usize = fields[1].parse().map_err(|_| Error::Parse("bad rank".into()))?;
    let vertex_count: usize =
        fields[2].parse().map_err(|_| Error::Parse("bad vertex count".into()))?;
    let edge_count: usize =
        fields[3].parse().map_err(|_| Error::Parse("bad edge count".into()))?;
    let mut edges = Vec::with_capacity(edge_count);
    let mut xi: Vec<(usize, usize)> = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("x ") {
            let mut it = rest.split_whitespace();
            let blown: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("bad map line".into()))?;
            let base: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("bad map line".into()))?;
            xi.push((blown, base));
            continue;
        }
        let vertices: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad vertex id: {s}"))))
            .collect::<Result<_>>()?;
        if vertices.len() != rank {
            return Err(Error::Parse(format!(
                "edge with {} vertices in a rank-{rank} hypergraph",
                vertices.len()
            )));
        }
        if vertices.iter().any(|&v| v >= vertex_count) {
            return Err(Error::Parse("vertex id out of range".into()));
        }
        edges.push(HyperEdge::new(vertices, Vec::new()));
    }
    if edges.len() != edge_count {
        return Err(Error::Parse(format!(
            "header promised {edge_count} edges, found {}",
            edges.len()
        )));
    }
    let map = if xi.is_empty() {
        None
    } else {
        // infer fiber size from the map lines
        let fiber = xi.iter().filter(|(_, b)| *b == 0).count();
        let base_count = xi.iter().map(|(_, b)| *b).max().unwrap_or(0) + 1;
        if fiber == 0 || fiber * base_count != xi.len() {
            return Err(Error::Parse("inconsistent blow-up map".into()));
        }
        for &(blown, base) in &xi {
            if blown / fiber != base {
                return Err(Error::Parse("non-contiguous blow-up map".into()));
            }
        }
        Some(BlowupMap { fiber_size: fiber, base_count })
    };
    Ok((Hypergraph { rank, vertex_count, edges }, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{build_bipartite_family, build_blown_hypercube, compute_ell};
    use crate::rng::substream;
    use crate::sphere::uniform_point;

    fn pair_family() -> Vec<BipartiteAux> {
        let cube = build_blown_hypercube(2, 2, 1).unwrap();
        build_bipartite_family(&cube)
    }

    fn antipodal_pair_points() -> Vec<SpherePoint> {
        let p = SpherePoint::pole(3);
        vec![p.clone(), p.antipode()]
    }

    #[test]
    fn witness_for_exact_antipodes_is_identity() {
        let points = antipodal_pair_points();
        let geom = GeometryContext::new(&points, 0.5);
        let tuples = tuple_vertices(2, 1);
        let refs: Vec<&TupleVertex> = vec![&tuples[0], &tuples[1]];
        let bs = pair_family();
        assert_eq!(witness_ordering(&refs, &bs, &geom), Some(vec![0, 1]));
    }

    #[test]
    fn witness_fails_for_coincident_points() {
        let p = SpherePoint::pole(3);
        let points = vec![p.clone(), p];
        let geom = GeometryContext::new(&points, 0.5);
        let tuples = tuple_vertices(2, 1);
        let refs: Vec<&TupleVertex> = vec![&tuples[0], &tuples[1]];
        assert_eq!(witness_ordering(&refs, &pair_family(), &geom), None);
    }

    /// Brute-force oracle: try all r! role assignments directly.
    fn witness_oracle(
        tuple_set: &[&TupleVertex],
        bs: &[BipartiteAux],
        geom: &GeometryContext,
    ) -> bool {
        let r = tuple_set.len();
        let masks = constraint_masks(bs, r);
        let mut perm: Vec<usize> = (0..r).collect();
        permute_check(&mut perm, 0, tuple_set, &masks, geom)
    }

    fn permute_check(
        perm: &mut Vec<usize>,
        at: usize,
        tuple_set: &[&TupleVertex],
        masks: &[Vec<u32>],
        geom: &GeometryContext,
    ) -> bool {
        let r = perm.len();
        if at == r {
            for i in 0..r {
                for j in (i + 1)..r {
                    let mut m = masks[i][j];
                    while m != 0 {
                        let a = m.trailing_zeros() as usize;
                        m &= m - 1;
                        if !geom.near_antipodal(
                            tuple_set[perm[i]].coords[a],
                            tuple_set[perm[j]].coords[a],
                        ) {
                            return false;
                        }
                    }
                }
            }
            return true;
        }
        for i in at..r {
            perm.swap(at, i);
            if permute_check(perm, at + 1, tuple_set, masks, geom) {
                perm.swap(at, i);
                return true;
            }
            perm.swap(at, i);
        }
        false
    }

    #[test]
    fn backtracking_matches_permutation_oracle() {
        let mut rng = substream(17, "witness-oracle");
        let cube = build_blown_hypercube(4, 3, 1).unwrap();
        let bs = build_bipartite_family(&cube);
        for trial in 0..300 {
            // mix of random and adversarially antipodal point sets
            let mut points: Vec<SpherePoint> = (0..6).map(|_| uniform_point(4, &mut rng)).collect();
            if trial % 2 == 0 {
                points[1] = points[0].antipode();
                points[3] = points[2].antipode();
                points[5] = points[4].antipode();
            }
            let geom = GeometryContext::new(&points, 0.3);
            let tuples = tuple_vertices(6, 1);
            let ids = [
                rng.random_range(0..6usize),
                rng.random_range(0..6usize),
                rng.random_range(0..6usize),
                rng.random_range(0..6usize),
            ];
            let mut distinct: Vec<usize> = ids.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 4 {
                continue;
            }
            let refs: Vec<&TupleVertex> = distinct.iter().map(|&i| &tuples[i]).collect();
            let got = witness_ordering(&refs, &bs, &geom);
            let want = witness_oracle(&refs, &bs, &geom);
            assert_eq!(got.is_some(), want, "trial {trial}");
            if let Some(assignment) = got {
                let witness: Vec<usize> = assignment.iter().map(|&p| distinct[p]).collect();
                let edge = HyperEdge::new(distinct.clone(), witness);
                assert!(witness_valid(&edge, &tuples, &bs, &geom));
            }
        }
    }

    #[test]
    fn two_antipodal_hemisphere_representatives_give_one_edge() {
        let points = antipodal_pair_points();
        let h = build_base_hypergraph(&points, 1, &pair_family(), 0.5, &EnumLimits::default())
            .unwrap();
        assert_eq!(h.edges.len(), 1);
        assert_eq!(h.edges[0].vertices, vec![0, 1]);
    }

    #[test]
    fn vacuous_distance_constraint_keeps_distinct_coordinate_sets() {
        // theta = 2 makes the constraint d > 0, i.e. distinct points
        let mut rng = substream(19, "vacuous");
        let points: Vec<SpherePoint> = (0..4).map(|_| uniform_point(3, &mut rng)).collect();
        let h = build_base_hypergraph(&points, 1, &pair_family(), 2.0, &EnumLimits::default())
            .unwrap();
        // every pair of distinct tuples qualifies
        assert_eq!(h.edges.len(), 6);
    }

    #[test]
    fn enumeration_caps_are_enforced() {
        let mut rng = substream(23, "caps");
        let points: Vec<SpherePoint> = (0..21).map(|_| uniform_point(3, &mut rng)).collect();
        let limits = EnumLimits { max_vertices: 20, max_candidates: 100 };
        let err = build_base_hypergraph(&points, 1, &pair_family(), 0.5, &limits).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn forbidden_pair_algebra() {
        // edges {1,2,3} and {1,2,4} share two vertices: v=4, m=2,
        // 4 + (1 + 0.1 - 3) = 2.1 < 3 -> reported
        let edges = vec![
            HyperEdge::new(vec![1, 2, 3], vec![]),
            HyperEdge::new(vec![1, 2, 4], vec![]),
        ];
        let h = Hypergraph { rank: 3, vertex_count: 5, edges };
        let configs = forbidden_scan(&h, 4, 0.1, 3);
        assert_eq!(configs.len(), 1);
        assert_eq!(configs[0].vertex_count, 4);
        assert!((configs[0].lhs - 2.1).abs() < 1e-12);
        assert!(configs[0].lhs < 3.0);

        // disjoint edges: not reported
        let edges = vec![
            HyperEdge::new(vec![1, 2, 3], vec![]),
            HyperEdge::new(vec![4, 5, 6], vec![]),
        ];
        let h = Hypergraph { rank: 3, vertex_count: 7, edges };
        assert!(forbidden_scan(&h, 4, 0.1, 3).is_empty());

        // a single edge is never reported
        let h = Hypergraph {
            rank: 3,
            vertex_count: 3,
            edges: vec![HyperEdge::new(vec![0, 1, 2], vec![])],
        };
        assert!(forbidden_scan(&h, 4, 0.1, 3).is_empty());
    }

    #[test]
    fn berge_triangle_is_found_once() {
        // three edges pairwise sharing single distinct vertices
        let edges = vec![
            HyperEdge::new(vec![0, 1, 2], vec![]),
            HyperEdge::new(vec![2, 3, 4], vec![]),
            HyperEdge::new(vec![4, 5, 0], vec![]),
        ];
        let h = Hypergraph { rank: 3, vertex_count: 6, edges };
        let configs = forbidden_scan(&h, 4, 0.25, 3);
        let cycles: Vec<_> =
            configs.iter().filter(|c| matches!(c.kind, ForbiddenKind::BergeCycle(3))).collect();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].vertex_count, 6);
        // v + (1 + gamma - r)(m - 1) = 6 + (1.25 - 3) * 2 = 2.5 < 3
        assert!((cycles[0].lhs - 2.5).abs() < 1e-12);
    }

    #[test]
    fn conflicting_pair_leaves_exactly_one_survivor() {
        let mut edges = vec![
            HyperEdge::new(vec![1, 2, 3], vec![]),
            HyperEdge::new(vec![1, 2, 4], vec![]),
        ];
        let removed = prune_forbidden(&mut edges, 5, 4, 0.25, 3);
        assert_eq!(removed, 1);
        assert_eq!(edges.len(), 1);
    }

    #[test]
    fn blowup_keeps_all_copies_when_nothing_is_forbidden() {
        // base: two disjoint edges, t = 1, p = 1
        let base = Hypergraph {
            rank: 3,
            vertex_count: 6,
            edges: vec![
                HyperEdge::new(vec![0, 1, 2], vec![0, 1, 2]),
                HyperEdge::new(vec![3, 4, 5], vec![3, 4, 5]),
            ],
        };
        let opts = BlowupOptions { keep_probability: Some(1.0), ..Default::default() };
        let (blown, map) = random_blowup(&base, 1, 0.25, &opts, 7).unwrap();
        assert_eq!(blown.vertex_count, 6);
        assert_eq!(map.fiber_size, 1);
        assert_eq!(blown.edges.len(), 2);
    }

    #[test]
    fn blowup_scales_vertices_and_stays_clean() {
        let base = Hypergraph {
            rank: 2,
            vertex_count: 6,
            edges: vec![
                HyperEdge::new(vec![0, 1], vec![0, 1]),
                HyperEdge::new(vec![2, 3], vec![2, 3]),
                HyperEdge::new(vec![4, 5], vec![4, 5]),
                HyperEdge::new(vec![1, 2], vec![1, 2]),
            ],
        };
        let (blown, map) = random_blowup(&base, 3, 0.25, &BlowupOptions::default(), 11).unwrap();
        assert_eq!(blown.vertex_count, 3 * base.vertex_count);
        assert!(forbidden_scan(&blown, 4, 0.25, 2).is_empty());
        // coverage held, so the supersaturation full-fiber check passes
        let report = supersaturation_check(&base, &blown, &map, 1.0, 0, 13).unwrap();
        assert_eq!(report.fraction, 1.0);
    }

    #[test]
    fn conflicting_base_pair_with_unit_fibers_errors_out() {
        let base = Hypergraph {
            rank: 3,
            vertex_count: 5,
            edges: vec![
                HyperEdge::new(vec![0, 1, 2], vec![0, 1, 2]),
                HyperEdge::new(vec![0, 1, 3], vec![0, 1, 3]),
            ],
        };
        let opts = BlowupOptions { keep_probability: Some(1.0), ..Default::default() };
        let err = random_blowup(&base, 1, 0.25, &opts, 3).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn supersaturation_names_missing_edges() {
        let base = Hypergraph {
            rank: 2,
            vertex_count: 4,
            edges: vec![
                HyperEdge::new(vec![0, 1], vec![0, 1]),
                HyperEdge::new(vec![2, 3], vec![2, 3]),
            ],
        };
        // adversarial blown hypergraph: all copies of edge {2,3} missing
        let blown = Hypergraph {
            rank: 2,
            vertex_count: 8,
            edges: vec![HyperEdge::new(vec![0, 2], vec![0, 2])],
        };
        let map = BlowupMap { fiber_size: 2, base_count: 4 };
        let report = supersaturation_check(&base, &blown, &map, 0.5, 4, 5).unwrap();
        assert!(report.fraction < 1.0);
        assert_eq!(report.failing_edges, vec![1]);
    }

    #[test]
    fn serialization_round_trips() {
        let base = Hypergraph {
            rank: 3,
            vertex_count: 6,
            edges: vec![
                HyperEdge::new(vec![0, 1, 2], vec![]),
                HyperEdge::new(vec![2, 4, 5], vec![]),
            ],
        };
        let map = BlowupMap { fiber_size: 2, base_count: 3 };
        let mut buf = Vec::new();
        write_hypergraph(&mut buf, &base, Some(&map)).unwrap();
        let (h2, m2) = read_hypergraph(&mut buf.as_slice()).unwrap();
        assert_eq!(h2.rank, base.rank);
        assert_eq!(h2.vertex_count, base.vertex_count);
        assert_eq!(h2.edge_sets(), base.edge_sets());
        let m2 = m2.unwrap();
        assert_eq!(m2.fiber_size, 2);
        assert_eq!(m2.base_count, 3);
    }
}
