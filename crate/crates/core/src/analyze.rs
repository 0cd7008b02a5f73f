//! Analyses of single graphs and of stores of graphs: cliques, clique
//! packings, partial geometries, `K_a - e` freeness and automorphism
//! histograms.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::aut_group_order;
use crate::graph::Graph;
use crate::graph6::parse_graph6;
use crate::srg::{verify_srg, SrgParams};

pub const DEFAULT_PACKING_CAP: usize = 20_000;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("{path}:{line}: {msg}")]
    Store { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

// ---------------------------------------------------------------------------
// Dynamic bitsets.

type Set = Vec<u64>;

fn set_with(words: usize) -> Set {
    vec![0; words]
}

#[inline]
fn has(s: &[u64], v: usize) -> bool {
    s[v / 64] >> (v % 64) & 1 == 1
}

#[inline]
fn put(s: &mut [u64], v: usize) {
    s[v / 64] |= 1 << (v % 64);
}

#[inline]
fn take(s: &mut [u64], v: usize) {
    s[v / 64] &= !(1 << (v % 64));
}

fn count(s: &[u64]) -> usize {
    s.iter().map(|w| w.count_ones() as usize).sum()
}

fn first(s: &[u64]) -> Option<usize> {
    s.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn and(a: &[u64], b: &[u64]) -> Set {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn members(s: &[u64]) -> Vec<usize> {
    crate::graph::iter_bits(s).collect()
}

/// Adjacency as bitset rows, of the graph or of its complement.
fn adjacency(g: &Graph, complement: bool) -> Vec<Set> {
    let h;
    let g = if complement {
        h = g.complement();
        &h
    } else {
        g
    };
    (0..g.n()).map(|u| g.row(u).to_vec()).collect()
}

fn full(n: usize) -> Set {
    let mut s = set_with(n.div_ceil(64));
    for v in 0..n {
        put(&mut s, v);
    }
    s
}

/// Number of colours a greedy sequential colouring uses on `p`, an upper
/// bound on the clique number of the subgraph it induces.
fn colour_bound(adj: &[Set], p: &[u64], stop_at: usize) -> usize {
    let mut rest = p.to_vec();
    let mut colours = 0;
    while first(&rest).is_some() {
        colours += 1;
        if colours >= stop_at {
            return colours;
        }
        let mut q = rest.clone();
        while let Some(v) = first(&q) {
            take(&mut q, v);
            take(&mut rest, v);
            for (x, a) in q.iter_mut().zip(&adj[v]) {
                *x &= !a;
            }
        }
    }
    colours
}

fn count_rec(adj: &[Set], mut cand: Set, need: usize) -> u64 {
    if need == 0 {
        return 1;
    }
    let c = count(&cand);
    if c < need {
        return 0;
    }
    if need == 1 {
        return c as u64;
    }
    if need == 2 {
        return members(&cand).iter().map(|&v| count(&and(&adj[v], &cand)) as u64).sum::<u64>() / 2;
    }
    if colour_bound(adj, &cand, need) < need {
        return 0;
    }
    let mut total = 0;
    while let Some(v) = first(&cand) {
        take(&mut cand, v);
        if count(&cand) < need - 1 {
            break;
        }
        total += count_rec(adj, and(&cand, &adj[v]), need - 1);
    }
    total
}

/// Number of `s`-cliques of `g`, or of `s`-cocliques when `complement` is set.
pub fn clique_count(g: &Graph, s: usize, complement: bool) -> u64 {
    let adj = adjacency(g, complement);
    count_rec(&adj, full(g.n()), s)
}

fn list_rec(adj: &[Set], cur: &mut Vec<usize>, mut cand: Set, need: usize, out: &mut Vec<Vec<usize>>, cap: usize) -> bool {
    if need == 0 {
        out.push(cur.clone());
        return out.len() <= cap;
    }
    if count(&cand) < need || (need >= 3 && colour_bound(adj, &cand, need) < need) {
        return true;
    }
    while let Some(v) = first(&cand) {
        take(&mut cand, v);
        cur.push(v);
        let ok = list_rec(adj, cur, and(&cand, &adj[v]), need - 1, out, cap);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// All `s`-cliques (or cocliques) in lexicographic order; `Err` carries the
/// first `cap` of them when there are more.
pub fn enumerate_cliques(g: &Graph, s: usize, complement: bool, cap: usize) -> Result<Vec<Vec<usize>>, Vec<Vec<usize>>> {
    let adj = adjacency(g, complement);
    let mut out = Vec::new();
    if list_rec(&adj, &mut Vec::new(), full(g.n()), s, &mut out, cap) {
        Ok(out)
    } else {
        out.truncate(cap);
        Err(out)
    }
}

fn is_clique(adj: &[Set], vs: &[usize]) -> bool {
    vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| has(&adj[u], v)))
}

/// A maximum clique of the graph given by bitset rows, by branch and bound
/// with greedy colouring bounds.
fn max_clique_rows(adj: &[Set], n: usize) -> Vec<usize> {
    struct S<'a> {
        adj: &'a [Set],
        best: Vec<usize>,
    }
    impl S<'_> {
        fn expand(&mut self, cur: &mut Vec<usize>, p: Set) {
            // colour classes in order; vertices later in `order` carry larger colours
            let mut order = Vec::new();
            let mut colour = Vec::new();
            let mut rest = p.clone();
            let mut k = 0;
            while first(&rest).is_some() {
                k += 1;
                let mut q = rest.clone();
                while let Some(v) = first(&q) {
                    take(&mut q, v);
                    take(&mut rest, v);
                    for (x, a) in q.iter_mut().zip(&self.adj[v]) {
                        *x &= !a;
                    }
                    order.push(v);
                    colour.push(k);
                }
            }
            let mut p = p;
            for i in (0..order.len()).rev() {
                if cur.len() + colour[i] <= self.best.len() {
                    return;
                }
                let v = order[i];
                cur.push(v);
                let np = and(&p, &self.adj[v]);
                if first(&np).is_none() {
                    if cur.len() > self.best.len() {
                        self.best = cur.clone();
                    }
                } else {
                    self.expand(cur, np);
                }
                cur.pop();
                take(&mut p, v);
            }
        }
    }
    let mut s = S { adj, best: Vec::new() };
    s.expand(&mut Vec::new(), full(n));
    let mut best = s.best;
    best.sort_unstable();
    assert!(is_clique(adj, &best));
    best
}

/// A maximum clique (or coclique), sorted.
pub fn max_clique(g: &Graph, complement: bool) -> Vec<usize> {
    max_clique_rows(&adjacency(g, complement), g.n())
}

pub fn clique_number(g: &Graph) -> usize {
    max_clique(g, false).len()
}

pub fn coclique_number(g: &Graph) -> usize {
    max_clique(g, true).len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingResult {
    /// Largest family found of `s`-cliques pairwise sharing at most one vertex.
    pub size: usize,
    pub witness: Vec<Vec<usize>>,
    /// Number of `s`-cliques considered.
    pub cliques: usize,
    /// Set when the cliques exceeded the cap; `size` is then a lower bound
    /// computed on the first `cap` cliques.
    pub capped: bool,
}

/// Largest family of `s`-cliques (or cocliques) pairwise meeting in at most
/// one vertex: a maximum clique of the compatibility graph on the cliques.
pub fn clique_packing(g: &Graph, s: usize, complement: bool, cap: usize) -> PackingResult {
    let (cliques, capped) = match enumerate_cliques(g, s, complement, cap) {
        Ok(c) => (c, false),
        Err(c) => (c, true),
    };
    let m = cliques.len();
    let words = m.div_ceil(64);
    let sets: Vec<Set> = cliques
        .iter()
        .map(|c| {
            let mut b = set_with(g.words().max(1));
            for &v in c {
                put(&mut b, v);
            }
            b
        })
        .collect();
    let meta: Vec<Set> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = set_with(words);
            for j in 0..m {
                if i != j && count(&and(&sets[i], &sets[j])) <= 1 {
                    put(&mut row, j);
                }
            }
            row
        })
        .collect();
    let best = if m == 0 { Vec::new() } else { max_clique_rows(&meta, m) };
    let witness: Vec<Vec<usize>> = best.iter().map(|&i| cliques[i].clone()).collect();
    let adj = adjacency(g, complement);
    for (i, a) in witness.iter().enumerate() {
        assert!(is_clique(&adj, a));
        for b in &witness[i + 1..] {
            assert!(a.iter().filter(|v| b.contains(v)).count() <= 1);
        }
    }
    PackingResult { size: witness.len(), witness, cliques: m, capped }
}

// ---------------------------------------------------------------------------
// Partial geometries.

/// Orders of a partial geometry: lines have `s + 1` points, points lie on
/// `t + 1` lines, and a point off a line is collinear with `alpha` of its
/// points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PgOrders {
    pub s: usize,
    pub t: usize,
    pub alpha: usize,
}

impl PgOrders {
    pub fn point_graph_params(&self) -> Option<SrgParams> {
        let PgOrders { s, t, alpha } = *self;
        if alpha == 0 || (s + 1) * (s * t + alpha) % alpha != 0 {
            return None;
        }
        Some(SrgParams::new((s + 1) * (s * t + alpha) / alpha, s * (t + 1), s - 1 + t * (alpha - 1), alpha * (t + 1)))
    }

    pub fn line_count(&self, n: usize) -> usize {
        n * (self.t + 1) / (self.s + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PgVerdict {
    /// Lines of a geometry, each sorted, in lexicographic order.
    Found(Vec<Vec<usize>>),
    /// The exhaustive search found no line set.
    NotFound,
    /// More `(s+1)`-cliques than the cap; nothing was decided.
    Capped { cliques: usize },
}

/// Searches for a set of `(s+1)`-cliques covering every edge exactly once,
/// which makes `g` (or its complement) the point graph of a `pg(s,t,α)`.
pub fn detect_partial_geometry(
    g: &Graph,
    orders: PgOrders,
    use_complement: bool,
    cap: usize,
) -> Result<PgVerdict, AnalyzeError> {
    let h = if use_complement { g.complement() } else { g.clone() };
    let expected = orders
        .point_graph_params()
        .ok_or_else(|| AnalyzeError::NotApplicable(format!("{orders:?} has no integral point count")))?;
    match verify_srg(&h) {
        Ok(p) if p == expected => {}
        Ok(p) => return Err(AnalyzeError::NotApplicable(format!("graph is {p}, pg point graph would be {expected}"))),
        Err(e) => return Err(AnalyzeError::NotApplicable(format!("not strongly regular: {e}"))),
    }
    let lines = match enumerate_cliques(&h, orders.s + 1, false, cap) {
        Ok(l) => l,
        Err(l) => return Ok(PgVerdict::Capped { cliques: l.len() }),
    };
    let n = h.n();
    let mut edge_id = vec![usize::MAX; n * n];
    let mut edges = 0;
    for (u, v) in h.edges() {
        edge_id[u * n + v] = edges;
        edge_id[v * n + u] = edges;
        edges += 1;
    }
    let line_edges: Vec<Vec<usize>> = lines
        .iter()
        .map(|l| {
            let mut es = Vec::new();
            for (i, &u) in l.iter().enumerate() {
                for &v in &l[i + 1..] {
                    es.push(edge_id[u * n + v]);
                }
            }
            es
        })
        .collect();
    let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); edges];
    for (i, es) in line_edges.iter().enumerate() {
        for &e in es {
            on_edge[e].push(i);
        }
    }
    let mut cover = ExactCover { line_edges: &line_edges, on_edge: &on_edge, covered: vec![false; edges], chosen: Vec::new() };
    if !cover.solve() {
        return Ok(PgVerdict::NotFound);
    }
    let mut found: Vec<Vec<usize>> = cover.chosen.iter().map(|&i| lines[i].clone()).collect();
    found.sort();
    verify_geometry(&h, orders, &found).map_err(AnalyzeError::NotApplicable)?;
    Ok(PgVerdict::Found(found))
}

struct ExactCover<'a> {
    line_edges: &'a [Vec<usize>],
    on_edge: &'a [Vec<usize>],
    covered: Vec<bool>,
    chosen: Vec<usize>,
}

impl ExactCover<'_> {
    fn usable(&self, line: usize) -> bool {
        self.line_edges[line].iter().all(|&e| !self.covered[e])
    }

    fn solve(&mut self) -> bool {
        // the uncovered edge with the fewest usable lines
        let mut best: Option<(usize, usize)> = None;
        for e in 0..self.covered.len() {
            if self.covered[e] {
                continue;
            }
            let k = self.on_edge[e].iter().filter(|&&l| self.usable(l)).count();
            if k == 0 {
                return false;
            }
            if best.is_none_or(|(_, bk)| k < bk) {
                best = Some((e, k));
                if k == 1 {
                    break;
                }
            }
        }
        let Some((e, _)) = best else { return true };
        for &l in &self.on_edge[e] {
            if !self.usable(l) {
                continue;
            }
            for &x in &self.line_edges[l] {
                self.covered[x] = true;
            }
            self.chosen.push(l);
            if self.solve() {
                return true;
            }
            self.chosen.pop();
            for &x in &self.line_edges[l] {
                self.covered[x] = false;
            }
        }
        false
    }
}

/// Checks the partial-geometry axioms for `lines` directly.
pub fn verify_geometry(g: &Graph, orders: PgOrders, lines: &[Vec<usize>]) -> Result<(), String> {
    let n = g.n();
    if lines.len() != orders.line_count(n) {
        return Err(format!("{} lines, expected {}", lines.len(), orders.line_count(n)));
    }
    let mut on_point = vec![0usize; n];
    let mut common = vec![0usize; n * n];
    for l in lines {
        if l.len() != orders.s + 1 {
            return Err(format!("line {l:?} has {} points", l.len()));
        }
        for &p in l {
            on_point[p] += 1;
            for &q in l {
                if p != q {
                    if !g.has_edge(p, q) {
                        return Err(format!("line {l:?} joins non-adjacent {p}, {q}"));
                    }
                    common[p * n + q] += 1;
                }
            }
        }
    }
    if let Some(p) = (0..n).find(|&p| on_point[p] != orders.t + 1) {
        return Err(format!("point {p} lies on {} lines", on_point[p]));
    }
    for (u, v) in g.edges() {
        if common[u * n + v] != 1 {
            return Err(format!("adjacent {u}, {v} share {} lines", common[u * n + v]));
        }
    }
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if a.iter().filter(|p| b.contains(p)).count() > 1 {
                return Err(format!("lines {a:?} and {b:?} meet twice"));
            }
        }
    }
    for l in lines {
        for p in (0..n).filter(|p| !l.contains(p)) {
            let seen = l.iter().filter(|&&q| g.has_edge(p, q)).count();
            if seen != orders.alpha {
                return Err(format!("point {p} is collinear with {seen} points of {l:?}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// K_a - e.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyVerdict {
    /// `K_a - e` in the graph: the non-adjacent pair and the clique on their
    /// common neighbours, if any.
    pub graph_hit: Option<Vec<usize>>,
    /// `K_b - e` in the complement.
    pub complement_hit: Option<Vec<usize>>,
}

impl RamseyVerdict {
    /// Neither pattern occurs, so the graph witnesses `R(K_a - e, K_b - e) > n`.
    pub fn is_witness(&self) -> bool {
        self.graph_hit.is_none() && self.complement_hit.is_none()
    }
}

/// Vertices `[u, v, c...]` of a `K_a - e` with missing edge `uv`, if present.
fn find_k_minus_e(adj: &[Set], n: usize, a: usize) -> Option<Vec<usize>> {
    for u in 0..n {
        for v in u + 1..n {
            if has(&adj[u], v) {
                continue;
            }
            let common = and(&adj[u], &adj[v]);
            let mut found = Vec::new();
            list_rec(adj, &mut Vec::new(), common, a - 2, &mut found, 0);
            if let Some(c) = found.into_iter().next() {
                let mut w = vec![u, v];
                w.extend(c);
                return Some(w);
            }
        }
    }
    None
}

pub fn ramsey_witness_check(g: &Graph, a: usize, b: usize) -> Result<RamseyVerdict, AnalyzeError> {
    if a < 3 || b < 3 {
        return Err(AnalyzeError::InvalidArgument(format!("K_a - e needs a, b ≥ 3, got a = {a}, b = {b}")));
    }
    let n = g.n();
    let (adj, co) = (adjacency(g, false), adjacency(g, true));
    let check = |adj: &[Set], w: Option<Vec<usize>>| {
        if let Some(w) = &w {
            assert!(!has(&adj[w[0]], w[1]) && is_clique(adj, &w[2..]));
            assert!(w[2..].iter().all(|&c| has(&adj[w[0]], c) && has(&adj[w[1]], c)));
        }
        w
    };
    Ok(RamseyVerdict {
        graph_hit: check(&adj, find_k_minus_e(&adj, n, a)),
        complement_hit: check(&co, find_k_minus_e(&co, n, b)),
    })
}

// ---------------------------------------------------------------------------
// Stores.

/// The graph6 files making up a store: a single file, or every
/// `level-<j>.g6` of a checkpoint directory in depth order.
pub fn store_files(path: &Path) -> Result<Vec<PathBuf>, AnalyzeError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let rd = fs::read_dir(path).map_err(|source| AnalyzeError::Io { path: path.to_path_buf(), source })?;
    let mut levels: Vec<(usize, PathBuf)> = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|source| AnalyzeError::Io { path: path.to_path_buf(), source })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(j) = name.strip_prefix("level-").and_then(|r| r.strip_suffix(".g6")).and_then(|j| j.parse().ok()) {
            levels.push((j, entry.path()));
        }
    }
    levels.sort();
    Ok(levels.into_iter().map(|(_, p)| p).collect())
}

pub fn read_store(path: &Path) -> Result<Vec<Graph>, AnalyzeError> {
    let mut graphs = Vec::new();
    for file in store_files(path)? {
        let f = fs::File::open(&file).map_err(|source| AnalyzeError::Io { path: file.clone(), source })?;
        for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|source| AnalyzeError::Io { path: file.clone(), source })?;
            let text = line.strip_prefix(">>graph6<<").unwrap_or(&line).trim_end();
            if text.is_empty() {
                continue;
            }
            let g = parse_graph6(text.as_bytes())
                .map_err(|e| AnalyzeError::Store { path: file.clone(), line: i + 1, msg: e.to_string() })?;
            graphs.push(g);
        }
    }
    Ok(graphs)
}

/// Automorphism group orders of a collection, ascending by order.
pub fn aut_histogram(graphs: &[Graph]) -> BTreeMap<BigUint, u64> {
    let orders: Vec<BigUint> = graphs.par_iter().map(|g| aut_group_order(g).order).collect();
    let mut h = BTreeMap::new();
    for o in orders {
        *h.entry(o).or_insert(0) += 1;
    }
    h
}

/// Histogram of the number of `s`-cliques (or cocliques) per graph.
pub fn clique_census(graphs: &[Graph], s: usize, complement: bool) -> BTreeMap<u64, u64> {
    let counts: Vec<u64> = graphs.par_iter().map(|g| clique_count(g, s, complement)).collect();
    let mut h = BTreeMap::new();
    for c in counts {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

/// Two-column CSV with a `value,count` header.
pub fn histogram_csv<K: std::fmt::Display>(h: &BTreeMap<K, u64>) -> String {
    let mut s = String::from("value,count\n");
    for (k, v) in h {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}
