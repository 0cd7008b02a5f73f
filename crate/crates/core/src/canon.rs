//! Canonical labelling and automorphism groups by individualisation-refinement.
//!
//! Strongly regular graphs defeat plain colour refinement (every vertex looks
//! alike, and stays so after individualising one vertex). Refinement here
//! therefore works on the complete graph whose pair `(x, y)` is coloured by
//! adjacency together with the number of edges inside the common neighbourhood
//! of `x` and `y`. The colouring is an isomorphism invariant, so refining with
//! respect to it only ever separates vertices that no automorphism can
//! exchange.
//!
//! The search tree is the usual one: refine to an equitable partition, pick
//! the first smallest non-singleton cell, individualise each of its vertices
//! in turn. Every node carries a trace hash of its refinement; the canonical
//! leaf is the maximum over leaves of `(traces, relabelled adjacency)`.
//! Automorphisms are discovered when a leaf reproduces the first or the best
//! leaf, and are used both for orbit pruning and to obtain the group order from
//! the orbits along the first path.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;

use crate::graph::{words_for, Graph};
use crate::graph6::emit_graph6;

/// The canonical graph6 record of a graph. Equal keys iff isomorphic graphs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    /// Wraps bytes already known to be a canonical graph6 record (for example
    /// a line read back from a store).
    pub fn from_bytes_unchecked(bytes: Vec<u8>) -> Self {
        CanonicalKey(bytes)
    }

    pub fn graph(&self) -> Result<Graph, crate::graph6::Graph6Error> {
        crate::graph6::parse_graph6(&self.0)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutInfo {
    pub order: BigUint,
    /// Generators as image arrays, `gen[v]` is the image of `v`.
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: CanonicalKey,
    /// `labeling[v]` is the canonical position of input vertex `v`.
    pub labeling: Vec<usize>,
    pub graph: Graph,
    pub aut: AutInfo,
}

pub fn canonical_form(g: &Graph) -> Canonical {
    Searcher::new(g).run()
}

pub fn canonical_key(g: &Graph) -> CanonicalKey {
    canonical_form(g).key
}

pub fn aut_group_order(g: &Graph) -> AutInfo {
    canonical_form(g).aut
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.n() == b.n() && a.edge_count() == b.edge_count() && canonical_key(a) == canonical_key(b)
}

#[inline]
fn mix(h: u64, v: u64) -> u64 {
    let mut x = h ^ v.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Pair colours: adjacency plus the edge count of the common neighbourhood.
fn pair_weights(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let words = g.words();
    let mut w = vec![mix(0, 0xD1A6); n * n];
    let mut common = vec![0u64; words];
    for x in 0..n {
        for y in x + 1..n {
            for (c, (a, b)) in common.iter_mut().zip(g.row(x).iter().zip(g.row(y))) {
                *c = a & b;
            }
            let mut twice_edges = 0u64;
            for z in crate::graph::iter_bits(&common) {
                twice_edges += g.row(z).iter().zip(&common).map(|(r, c)| (r & c).count_ones() as u64).sum::<u64>();
            }
            let colour = ((g.has_edge(x, y) as u64) << 32) | (twice_edges / 2);
            let h = mix(0x5EED, colour + 1);
            w[x * n + y] = h;
            w[y * n + x] = h;
        }
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Trace {
    cells: u32,
    hash: u64,
}

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// start position of the cell containing each vertex
    cell: Vec<u32>,
    /// for a cell start `s`, one past its last position
    end: Vec<u32>,
    cells: u32,
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut end = vec![0; n];
        if n > 0 {
            end[0] = n as u32;
        }
        Partition {
            lab: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            cell: vec![0; n],
            end,
            cells: (n > 0) as u32,
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells as usize == self.lab.len()
    }

    fn target_cell(&self) -> Option<(usize, usize)> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < n {
            let e = self.end[s] as usize;
            let size = e - s;
            if size > 1 && best.is_none_or(|(bs, be)| size < be - bs) {
                best = Some((s, e));
                if size == 2 {
                    break;
                }
            }
            s = e;
        }
        best
    }

    /// Moves `v` to the front of its cell and splits it off. Returns the start
    /// of the new singleton cell.
    fn individualize(&mut self, v: u32) -> usize {
        let s = self.cell[v as usize] as usize;
        let e = self.end[s] as usize;
        let pv = self.pos[v as usize] as usize;
        let other = self.lab[s];
        self.lab.swap(s, pv);
        self.pos[other as usize] = pv as u32;
        self.pos[v as usize] = s as u32;
        self.end[s] = s as u32 + 1;
        self.end[s + 1] = e as u32;
        for i in s + 1..e {
            let x = self.lab[i] as usize;
            self.cell[x] = s as u32 + 1;
        }
        self.cells += 1;
        s
    }
}

struct Leaf {
    path: Vec<u32>,
    traces: Vec<Trace>,
    lab: Vec<u32>,
    rows: Vec<u64>,
}

enum Flow {
    Continue,
    /// unwind to the node at this level and carry on with its next child
    Jump(usize),
}

struct Searcher<'a> {
    g: &'a Graph,
    n: usize,
    weights: Vec<u64>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    orbit_sizes: Vec<usize>,
    // scratch
    sig: Vec<u64>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    splitter: Vec<u32>,
}

impl<'a> Searcher<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.n();
        Searcher {
            g,
            n,
            weights: pair_weights(g),
            first: None,
            best: None,
            gens: Vec::new(),
            orbit_sizes: Vec::new(),
            sig: vec![0; n],
            queue: VecDeque::new(),
            in_queue: vec![false; n],
            splitter: Vec::with_capacity(n),
        }
    }

    fn run(mut self) -> Canonical {
        let n = self.n;
        let mut p = Partition::unit(n);
        let mut traces = Vec::new();
        let mut path = Vec::new();
        if n > 0 {
            let t = self.refine(&mut p, &[0]);
            traces.push(t);
        } else {
            traces.push(Trace { cells: 0, hash: 0 });
        }
        let _ = self.search(&p, &mut path, &mut traces);

        let best = self.best.take().expect("search visits at least one leaf");
        let mut labeling = vec![0usize; n];
        for (i, &v) in best.lab.iter().enumerate() {
            labeling[v as usize] = i;
        }
        let graph = Graph::from_fn(n, |i, j| best.rows[i * words_for(n) + j / 64] >> (j % 64) & 1 == 1);
        let key = CanonicalKey(emit_graph6(&graph));
        let order = self.orbit_sizes.iter().fold(BigUint::from(1u32), |acc, &s| acc * BigUint::from(s));
        let generators = self.gens.iter().map(|g| g.iter().map(|&x| x as usize).collect()).collect();
        Canonical { key, labeling, graph, aut: AutInfo { order, generators } }
    }

    /// Refines `p` to the coarsest equitable partition below it with respect
    /// to the pair weights, starting from the given splitter cells.
    fn refine(&mut self, p: &mut Partition, initial: &[usize]) -> Trace {
        let n = self.n;
        let mut hash = 0u64;
        for &s in initial {
            self.queue.push_back(s as u32);
            self.in_queue[s] = true;
        }
        while let Some(ws) = self.queue.pop_front() {
            let ws = ws as usize;
            self.in_queue[ws] = false;
            if p.is_discrete() {
                continue;
            }
            let we = p.end[ws] as usize;
            self.splitter.clear();
            self.splitter.extend_from_slice(&p.lab[ws..we]);
            hash = mix(hash, ws as u64);

            let mut s = 0;
            while s < n {
                let e = p.end[s] as usize;
                if e - s > 1 {
                    let mut all_same = true;
                    let first_sig;
                    {
                        let lab = &p.lab[s..e];
                        for &x in lab {
                            let row = &self.weights[x as usize * n..(x as usize + 1) * n];
                            let mut acc = 0u64;
                            for &w in &self.splitter {
                                acc = acc.wrapping_add(row[w as usize]);
                            }
                            self.sig[x as usize] = acc;
                        }
                        first_sig = self.sig[lab[0] as usize];
                        for &x in &lab[1..] {
                            if self.sig[x as usize] != first_sig {
                                all_same = false;
                                break;
                            }
                        }
                    }
                    if all_same {
                        hash = mix(hash, first_sig ^ (s as u64) << 1);
                    } else {
                        hash = self.split_cell(p, s, e, hash);
                    }
                }
                s = e;
            }
        }
        Trace { cells: p.cells, hash: mix(hash, p.cells as u64) }
    }

    fn split_cell(&mut self, p: &mut Partition, s: usize, e: usize, mut hash: u64) -> u64 {
        let sig = &self.sig;
        p.lab[s..e].sort_unstable_by_key(|&x| sig[x as usize]);
        let was_queued = self.in_queue[s];
        let mut frags: Vec<(usize, usize)> = Vec::new();
        let mut a = s;
        while a < e {
            let v = sig[p.lab[a] as usize];
            let mut b = a + 1;
            while b < e && sig[p.lab[b] as usize] == v {
                b += 1;
            }
            frags.push((a, b));
            hash = mix(hash, v);
            hash = mix(hash, (a as u64) << 32 | (b - a) as u64);
            a = b;
        }
        for &(a, b) in &frags {
            p.end[a] = b as u32;
            for i in a..b {
                let x = p.lab[i] as usize;
                p.pos[x] = i as u32;
                p.cell[x] = a as u32;
            }
        }
        p.cells += frags.len() as u32 - 1;
        if was_queued {
            for &(a, _) in &frags[1..] {
                self.queue.push_back(a as u32);
                self.in_queue[a] = true;
            }
        } else {
            let largest = frags.iter().enumerate().max_by_key(|(i, (a, b))| (b - a, usize::MAX - i)).map(|(i, _)| i).unwrap();
            for (i, &(a, _)) in frags.iter().enumerate() {
                if i != largest {
                    self.queue.push_back(a as u32);
                    self.in_queue[a] = true;
                }
            }
        }
        hash
    }

    fn leaf_rows(&self, p: &Partition) -> Vec<u64> {
        let words = words_for(self.n);
        let mut rows = vec![0u64; self.n * words];
        for (i, &v) in p.lab.iter().enumerate() {
            for y in self.g.neighbors(v as usize) {
                let j = p.pos[y] as usize;
                rows[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        rows
    }

    fn search(&mut self, p: &Partition, path: &mut Vec<u32>, traces: &mut Vec<Trace>) -> Flow {
        let level = path.len();
        let eq_first = match &self.first {
            None => true,
            Some(f) => f.traces.len() > level && f.traces[..=level] == traces[..=level],
        };
        let cmp_best = match &self.best {
            None => std::cmp::Ordering::Greater,
            Some(b) => {
                let m = b.traces.len().min(level + 1);
                traces[..m].cmp(&b.traces[..m])
            }
        };
        if !eq_first && cmp_best == std::cmp::Ordering::Less {
            return Flow::Continue;
        }

        if p.is_discrete() {
            return self.leaf(p, path, traces, eq_first, cmp_best);
        }

        let (s, e) = p.target_cell().expect("non-discrete partition has a non-singleton cell");
        let mut children: Vec<u32> = p.lab[s..e].to_vec();
        children.sort_unstable();

        let mut uf: Vec<u32> = (0..self.n as u32).collect();
        let mut gens_seen = 0;
        let mut explored: Vec<u32> = Vec::new();

        for &v in &children {
            gens_seen = self.absorb_generators(&mut uf, gens_seen, path);
            let rv = find(&mut uf, v);
            if explored.iter().any(|&u| find(&mut uf, u) == rv) {
                continue;
            }
            let mut child = p.clone();
            let cs = child.individualize(v);
            let t = self.refine(&mut child, &[cs]);
            path.push(v);
            traces.push(t);
            let flow = self.search(&child, path, traces);
            path.pop();
            traces.truncate(level + 1);
            explored.push(v);
            if let Flow::Jump(l) = flow {
                if l < level {
                    return Flow::Jump(l);
                }
            }
        }

        let on_first_path = self.first.as_ref().is_some_and(|f| f.path.len() > level && f.path[..level] == path[..]);
        if on_first_path {
            self.absorb_generators(&mut uf, gens_seen, path);
            let fv = self.first.as_ref().unwrap().path[level];
            let root = find(&mut uf, fv);
            let size = children.iter().filter(|&&u| find(&mut uf, u) == root).count();
            if self.orbit_sizes.len() <= level {
                self.orbit_sizes.resize(level + 1, 1);
            }
            self.orbit_sizes[level] = size;
        }
        Flow::Continue
    }

    /// Unions the orbits of generators found since `seen` that fix `path`
    /// pointwise.
    fn absorb_generators(&self, uf: &mut [u32], seen: usize, path: &[u32]) -> usize {
        for gen in &self.gens[seen..] {
            if path.iter().all(|&x| gen[x as usize] == x) {
                for (x, &y) in gen.iter().enumerate() {
                    union(uf, x as u32, y);
                }
            }
        }
        self.gens.len()
    }

    fn leaf(
        &mut self,
        p: &Partition,
        path: &[u32],
        traces: &[Trace],
        eq_first: bool,
        cmp_best: std::cmp::Ordering,
    ) -> Flow {
        use std::cmp::Ordering::*;
        let rows = self.leaf_rows(p);
        let make = || Leaf { path: path.to_vec(), traces: traces.to_vec(), lab: p.lab.clone(), rows: rows.clone() };
        let Some(first) = &self.first else {
            self.first = Some(make());
            self.best = Some(make());
            return Flow::Continue;
        };
        if eq_first && rows == first.rows {
            let gen = compose_map(&first.lab, &p.lab);
            let d = divergence(&first.path, path);
            self.push_generator(gen);
            return Flow::Jump(d);
        }
        let best = self.best.as_ref().unwrap();
        let ord = match cmp_best {
            Equal => rows.cmp(&best.rows),
            o => o,
        };
        match ord {
            Greater => {
                self.best = Some(make());
                Flow::Continue
            }
            Equal => {
                let gen = compose_map(&best.lab, &p.lab);
                let d = divergence(&best.path, path);
                self.push_generator(gen);
                Flow::Jump(d)
            }
            Less => Flow::Continue,
        }
    }

    fn push_generator(&mut self, gen: Vec<u32>) {
        if gen.iter().enumerate().any(|(i, &x)| i as u32 != x) {
            debug_assert!(self.g.is_automorphism(&gen.iter().map(|&x| x as usize).collect::<Vec<_>>()));
            self.gens.push(gen);
        }
    }
}

/// The permutation sending `from[i]` to `to[i]`.
fn compose_map(from: &[u32], to: &[u32]) -> Vec<u32> {
    let mut gen = vec![0u32; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        gen[a as usize] = b;
    }
    gen
}

fn divergence(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn find(uf: &mut [u32], mut x: u32) -> u32 {
    while uf[x as usize] != x {
        let parent = uf[x as usize];
        uf[x as usize] = uf[parent as usize];
        x = parent;
    }
    x
}

fn union(uf: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra != rb {
        // smaller root wins so representatives are deterministic
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        uf[hi as usize] = lo;
    }
}

/// Orbits of the group generated by `gens` on `0..n`, as the minimum element
/// of each vertex's orbit.
pub fn orbits(n: usize, gens: &[Vec<usize>]) -> Vec<usize> {
    let mut uf: Vec<u32> = (0..n as u32).collect();
    for g in gens {
        for (x, &y) in g.iter().enumerate() {
            union(&mut uf, x as u32, y as u32);
        }
    }
    (0..n as u32).map(|x| find(&mut uf, x) as usize).collect()
}
