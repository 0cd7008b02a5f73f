//! Godsil-McKay switching with a `(4, n-4)` partition and Wang-Qiu-Hu switching
//! with an `(ℓ, ℓ, n-2ℓ)` partition.
//!
//! Both enumerators are chunked by the smallest vertex of the partition (the
//! "lead"); chunks are independent, so callers may farm them out to workers
//! and concatenate the results in lead order.

use std::collections::VecDeque;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{words_for, Graph};

/// Largest graph the enumerators accept.
pub const MAX_SWITCH_VERTICES: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rejection {
    #[error("induced subgraph on {block} is not regular")]
    NotRegular { block: &'static str },
    #[error("C1 and C2 induce different degrees {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("bipartite graph between C1 and C2 is not regular")]
    CrossNotRegular,
    #[error("vertex {vertex} has {count} neighbours in C")]
    OutsideGm { vertex: usize, count: usize },
    #[error("vertex {vertex} has {in_c1} neighbours in C1 and {in_c2} in C2")]
    OutsideWqh { vertex: usize, in_c1: usize, in_c2: usize },
    #[error("no outside vertex is switched")]
    Trivial,
    #[error("partition does not match the graph")]
    Stale,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SwitchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(Rejection),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("rejected: {0}")]
    Rejected(Rejection),
    #[error("cannot parse partition {0:?}")]
    Parse(String),
}

/// Which switching an exploration applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SwitchKind {
    Gm4,
    Wqh(usize),
}

impl fmt::Display for SwitchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwitchKind::Gm4 => f.write_str("gm4"),
            SwitchKind::Wqh(l) => write!(f, "wqh{l}"),
        }
    }
}

impl FromStr for SwitchKind {
    type Err = SwitchError;

    fn from_str(s: &str) -> Result<Self, SwitchError> {
        match s {
            "gm4" => Ok(SwitchKind::Gm4),
            "wqh2" => Ok(SwitchKind::Wqh(2)),
            "wqh3" => Ok(SwitchKind::Wqh(3)),
            "wqh4" => Ok(SwitchKind::Wqh(4)),
            _ => Err(SwitchError::InvalidArgument(format!("unknown switch {s:?}; expected gm4, wqh2, wqh3 or wqh4"))),
        }
    }
}

impl TryFrom<String> for SwitchKind {
    type Error = SwitchError;
    fn try_from(s: String) -> Result<Self, SwitchError> {
        s.parse()
    }
}

impl From<SwitchKind> for String {
    fn from(k: SwitchKind) -> String {
        k.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GmPartition {
    pub c: [usize; 4],
    /// Outside vertices with exactly two neighbours in `c`.
    pub half_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WqhPartition {
    pub ell: usize,
    pub c1: Vec<usize>,
    pub c2: Vec<usize>,
    /// Outside vertices whose neighbourhood in `c1 ∪ c2` is exactly `c1` or `c2`.
    pub switch_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Partition {
    Gm(GmPartition),
    Wqh(WqhPartition),
}

fn check_vertices(g: &Graph, vs: &[usize]) -> Result<(), SwitchError> {
    for (i, &v) in vs.iter().enumerate() {
        if v >= g.n() {
            return Err(SwitchError::InvalidArgument(format!("vertex {v} out of range for n = {}", g.n())));
        }
        if vs[..i].contains(&v) {
            return Err(SwitchError::InvalidArgument(format!("vertex {v} repeated")));
        }
    }
    Ok(())
}

fn induced_degrees(g: &Graph, set: &[usize]) -> Vec<usize> {
    set.iter().map(|&u| set.iter().filter(|&&v| g.has_edge(u, v)).count()).collect()
}

fn uniform(ds: &[usize]) -> Option<usize> {
    match ds.split_first() {
        Some((&d, rest)) if rest.iter().all(|&x| x == d) => Some(d),
        None => Some(0),
        _ => None,
    }
}

/// Checks conditions (A) induced regularity, (B) outside counts in
/// `{0, 2, 4}` and (C) some outside count equal to 2, in that order.
pub fn classify_gm(g: &Graph, c: &[usize]) -> Result<GmPartition, SwitchError> {
    if c.len() != 4 {
        return Err(SwitchError::InvalidArgument(format!("GM switching needs |C| = 4, got {}", c.len())));
    }
    check_vertices(g, c)?;
    let mut c: [usize; 4] = c.try_into().unwrap();
    c.sort_unstable();
    if uniform(&induced_degrees(g, &c)).is_none() {
        return Err(SwitchError::Rejected(Rejection::NotRegular { block: "C" }));
    }
    let mut half_set = Vec::new();
    for x in (0..g.n()).filter(|x| !c.contains(x)) {
        let count = c.iter().filter(|&&v| g.has_edge(x, v)).count();
        match count {
            0 | 4 => {}
            2 => half_set.push(x),
            _ => return Err(SwitchError::Rejected(Rejection::OutsideGm { vertex: x, count })),
        }
    }
    if half_set.is_empty() {
        return Err(SwitchError::Rejected(Rejection::Trivial));
    }
    Ok(GmPartition { c, half_set })
}

/// Checks conditions (A)–(E) for the blocks `c1`, `c2`. The result is
/// normalised: both blocks sorted, the overall minimum in `c1`.
pub fn classify_wqh(g: &Graph, c1: &[usize], c2: &[usize]) -> Result<WqhPartition, SwitchError> {
    if c1.len() != c2.len() {
        return Err(SwitchError::InvalidArgument(format!("blocks have sizes {} and {}", c1.len(), c2.len())));
    }
    let ell = c1.len();
    if !(2..=4).contains(&ell) {
        return Err(SwitchError::InvalidArgument(format!("block size {ell} outside 2..=4")));
    }
    let all: Vec<usize> = c1.iter().chain(c2).copied().collect();
    check_vertices(g, &all)?;
    let (mut c1, mut c2) = (c1.to_vec(), c2.to_vec());
    c1.sort_unstable();
    c2.sort_unstable();
    if c2[0] < c1[0] {
        std::mem::swap(&mut c1, &mut c2);
    }
    let k1 = uniform(&induced_degrees(g, &c1)).ok_or(SwitchError::Rejected(Rejection::NotRegular { block: "C1" }))?;
    let k2 = uniform(&induced_degrees(g, &c2)).ok_or(SwitchError::Rejected(Rejection::NotRegular { block: "C2" }))?;
    if k1 != k2 {
        return Err(SwitchError::Rejected(Rejection::DegreeMismatch(k1, k2)));
    }
    let cross = |from: &[usize], to: &[usize]| -> Vec<usize> {
        from.iter().map(|&u| to.iter().filter(|&&v| g.has_edge(u, v)).count()).collect()
    };
    let left = uniform(&cross(&c1, &c2));
    if left.is_none() || left != uniform(&cross(&c2, &c1)) {
        return Err(SwitchError::Rejected(Rejection::CrossNotRegular));
    }
    let mut switch_set = Vec::new();
    for x in (0..g.n()).filter(|x| !all.contains(x)) {
        let in_c1 = c1.iter().filter(|&&v| g.has_edge(x, v)).count();
        let in_c2 = c2.iter().filter(|&&v| g.has_edge(x, v)).count();
        if (in_c1, in_c2) == (ell, 0) || (in_c1, in_c2) == (0, ell) {
            switch_set.push(x);
        } else if in_c1 != in_c2 {
            return Err(SwitchError::Rejected(Rejection::OutsideWqh { vertex: x, in_c1, in_c2 }));
        }
    }
    if switch_set.is_empty() {
        return Err(SwitchError::Rejected(Rejection::Trivial));
    }
    Ok(WqhPartition { ell, c1, c2, switch_set })
}

fn revalidate<P: PartialEq>(fresh: Result<P, SwitchError>, given: &P) -> Result<(), SwitchError> {
    match fresh {
        Ok(p) if p == *given => Ok(()),
        Ok(_) => Err(SwitchError::InvalidPartition(Rejection::Stale)),
        Err(SwitchError::Rejected(r)) => Err(SwitchError::InvalidPartition(r)),
        Err(SwitchError::InvalidArgument(_)) => Err(SwitchError::InvalidPartition(Rejection::Stale)),
        Err(e) => Err(e),
    }
}

/// Complements the adjacency between each vertex of `half_set` and `C`.
pub fn apply_gm(g: &Graph, p: &GmPartition) -> Result<Graph, SwitchError> {
    revalidate(classify_gm(g, &p.c), p)?;
    let mut h = g.clone();
    for &x in &p.half_set {
        for &c in &p.c {
            h.toggle_edge(x, c);
        }
    }
    Ok(h)
}

/// Complements the adjacency between each vertex of `switch_set` and
/// `C1 ∪ C2`.
pub fn apply_wqh(g: &Graph, p: &WqhPartition) -> Result<Graph, SwitchError> {
    revalidate(classify_wqh(g, &p.c1, &p.c2), p)?;
    let mut h = g.clone();
    for &x in &p.switch_set {
        for &c in p.c1.iter().chain(&p.c2) {
            h.toggle_edge(x, c);
        }
    }
    Ok(h)
}

/// Applies GM switching on `c` and WQH switching on the split of `c` into
/// `c1`, `c2`, and reports whether the results are isomorphic.
pub fn gm_wqh_agreement(g: &Graph, c: &[usize], c1: &[usize], c2: &[usize]) -> Result<bool, SwitchError> {
    let not_applicable = |e: SwitchError| SwitchError::NotApplicable(e.to_string());
    let mut joined: Vec<usize> = c1.iter().chain(c2).copied().collect();
    joined.sort_unstable();
    let mut cs = c.to_vec();
    cs.sort_unstable();
    if joined != cs {
        return Err(SwitchError::NotApplicable("C1 ∪ C2 differs from C".into()));
    }
    let gm = classify_gm(g, c).map_err(not_applicable)?;
    let wqh = classify_wqh(g, c1, c2).map_err(not_applicable)?;
    let a = apply_gm(g, &gm)?;
    let b = apply_wqh(g, &wqh)?;
    Ok(crate::canon::are_isomorphic(&a, &b))
}

impl Partition {
    pub fn apply(&self, g: &Graph) -> Result<Graph, SwitchError> {
        match self {
            Partition::Gm(p) => apply_gm(g, p),
            Partition::Wqh(p) => apply_wqh(g, p),
        }
    }

    pub fn kind(&self) -> SwitchKind {
        match self {
            Partition::Gm(_) => SwitchKind::Gm4,
            Partition::Wqh(p) => SwitchKind::Wqh(p.ell),
        }
    }

    /// The blocks; the second is empty for GM.
    pub fn blocks(&self) -> (&[usize], &[usize]) {
        match self {
            Partition::Gm(p) => (&p.c, &[]),
            Partition::Wqh(p) => (&p.c1, &p.c2),
        }
    }

    /// Normalised blocks of the image of this partition under `perm`.
    pub fn blocks_under(&self, perm: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let (a, b) = self.blocks();
        let mut a: Vec<usize> = a.iter().map(|&v| perm[v]).collect();
        let mut b: Vec<usize> = b.iter().map(|&v| perm[v]).collect();
        a.sort_unstable();
        b.sort_unstable();
        if !b.is_empty() && b[0] < a[0] {
            std::mem::swap(&mut a, &mut b);
        }
        (a, b)
    }

    /// Text form `gm:a,b,c,d` or `wqh:a,b,c|d,e,f`.
    pub fn to_text(&self) -> String {
        let join = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match self {
            Partition::Gm(p) => format!("gm:{}", join(&p.c)),
            Partition::Wqh(p) => format!("wqh:{}|{}", join(&p.c1), join(&p.c2)),
        }
    }

    /// Parses the text form and classifies it against `g`.
    pub fn from_text(g: &Graph, text: &str) -> Result<Partition, SwitchError> {
        let bad = || SwitchError::Parse(text.to_string());
        let list = |s: &str| -> Result<Vec<usize>, SwitchError> { s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect() };
        if let Some(rest) = text.strip_prefix("gm:") {
            Ok(Partition::Gm(classify_gm(g, &list(rest)?)?))
        } else if let Some(rest) = text.strip_prefix("wqh:") {
            let (a, b) = rest.split_once('|').ok_or_else(bad)?;
            Ok(Partition::Wqh(classify_wqh(g, &list(a)?, &list(b)?)?))
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Degree-gap bounds of a partial choice `c_1, ..., c_m`:
/// `c1` holds the first `min(m, ℓ)` vertices, `c2` the rest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruningBounds {
    pub k11: usize,
    pub big_k11: usize,
    pub k22: usize,
    pub big_k22: usize,
    pub k12: usize,
    pub big_k12: usize,
    pub k21: usize,
    pub big_k21: usize,
}

impl PruningBounds {
    pub fn of(c1: &[usize], c2: &[usize], adj: impl Fn(usize, usize) -> bool) -> Self {
        let range = |from: &[usize], to: &[usize]| -> (usize, usize) {
            from.iter()
                .map(|&u| to.iter().filter(|&&v| adj(u, v)).count())
                .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)))
        };
        let fix = |(lo, hi): (usize, usize)| if lo == usize::MAX { (0, 0) } else { (lo, hi) };
        let (k11, big_k11) = fix(range(c1, c1));
        let (k22, big_k22) = fix(range(c2, c2));
        let (k12, big_k12) = if c2.is_empty() { (0, 0) } else { fix(range(c1, c2)) };
        let (k21, big_k21) = fix(range(c2, c1));
        PruningBounds { k11, big_k11, k22, big_k22, k12, big_k12, k21, big_k21 }
    }

    /// Whether a prefix of length `m` can be discarded for block size `ell`.
    pub fn discards(&self, ell: usize, m: usize) -> bool {
        if m <= ell {
            return self.big_k11 - self.k11 > ell - m;
        }
        self.big_k22 - self.k22 > 2 * ell - m || self.big_k21 > self.k21 || self.big_k12 - self.k12 > 2 * ell - m
    }
}

// ---------------------------------------------------------------------------
// Fixed-width bitsets for the enumeration loops.

#[derive(Clone, Copy, PartialEq, Eq)]
struct Bits<const W: usize>([u64; W]);

impl<const W: usize> Bits<W> {
    const EMPTY: Self = Bits([0; W]);

    fn first_n(n: usize) -> Self {
        let mut b = Self::EMPTY;
        for v in 0..n {
            b.insert(v);
        }
        b
    }

    /// Vertices strictly greater than `v`.
    fn above(v: usize) -> Self {
        let mut b = Bits([u64::MAX; W]);
        for w in 0..W {
            let lo = w * 64;
            if v + 1 >= lo + 64 {
                b.0[w] = 0;
            } else if v + 1 > lo {
                b.0[w] = u64::MAX << (v + 1 - lo);
            }
        }
        b
    }

    fn of(vs: &[usize]) -> Self {
        let mut b = Self::EMPTY;
        for &v in vs {
            b.insert(v);
        }
        b
    }

    #[inline]
    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    #[inline]
    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(self) -> impl Iterator<Item = usize> {
        (0..W).flat_map(move |w| {
            let mut word = self.0[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }
}

macro_rules! bits_op {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<const W: usize> $tr for Bits<W> {
            type Output = Self;
            #[inline]
            fn $f(self, o: Self) -> Self {
                let mut r = self;
                for i in 0..W {
                    r.0[i] = self.0[i] $op o.0[i];
                }
                r
            }
        }
    };
}
bits_op!(BitAnd, bitand, &);
bits_op!(BitOr, bitor, |);
bits_op!(BitXor, bitxor, ^);

impl<const W: usize> Not for Bits<W> {
    type Output = Self;
    #[inline]
    fn not(self) -> Self {
        Bits(self.0.map(|w| !w))
    }
}

fn load_rows<const W: usize>(g: &Graph) -> Vec<Bits<W>> {
    (0..g.n())
        .map(|u| {
            let mut r = [0u64; W];
            r[..g.words()].copy_from_slice(g.row(u));
            Bits(r)
        })
        .collect()
}

fn check_size(g: &Graph) -> Result<(), SwitchError> {
    if g.n() > MAX_SWITCH_VERTICES {
        return Err(SwitchError::InvalidArgument(format!(
            "graph has {} vertices; switching enumeration supports at most {MAX_SWITCH_VERTICES}",
            g.n()
        )));
    }
    Ok(())
}

macro_rules! by_width {
    ($n:expr, $f:ident :: <W> ($($arg:expr),*)) => {
        match words_for($n) {
            0 | 1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            3 | 4 => $f::<4>($($arg),*),
            5..=8 => $f::<8>($($arg),*),
            _ => $f::<16>($($arg),*),
        }
    };
}

// ---------------------------------------------------------------------------
// GM enumeration.

/// All GM partitions whose smallest vertex is `lead`, in lexicographic order.
pub fn gm_partitions_with_lead(g: &Graph, lead: usize) -> Result<Vec<GmPartition>, SwitchError> {
    check_size(g)?;
    let mut out = Vec::new();
    if lead < g.n() {
        by_width!(g.n(), gm_lead::<W>(g, lead, &mut out));
    }
    Ok(out)
}

fn gm_lead<const W: usize>(g: &Graph, a: usize, out: &mut Vec<GmPartition>) {
    let n = g.n();
    let rows = load_rows::<W>(g);
    let ra = rows[a];
    for b in a + 1..n {
        let rb = rows[b];
        let ab = ra.contains(b) as u8;
        for c in b + 1..n {
            let rc = rows[c];
            let (ac, bc) = (ra.contains(c) as u8, rb.contains(c) as u8);
            let (da, db, dc) = (ab + ac, ab + bc, ac + bc);
            // one more vertex raises each degree by at most one
            if da.max(db).max(dc) - da.min(db).min(dc) > 1 {
                continue;
            }
            let x3 = ra ^ rb ^ rc;
            let or3 = ra | rb | rc;
            let and3 = ra & rb & rc;
            for (d, &rd) in rows.iter().enumerate().skip(c + 1) {
                let (ad, bd, cd) = (ra.contains(d) as u8, rb.contains(d) as u8, rc.contains(d) as u8);
                let deg_d = ad + bd + cd;
                if da + ad != deg_d || db + bd != deg_d || dc + cd != deg_d {
                    continue;
                }
                let cset = Bits::of(&[a, b, c, d]);
                // (B): every outside vertex sees an even number of C
                if !((x3 ^ rd) & !cset).is_empty() {
                    continue;
                }
                // even and neither 0 nor 4 means exactly 2
                let half = (or3 | rd) & !(and3 & rd) & !cset;
                if half.is_empty() {
                    continue;
                }
                out.push(GmPartition { c: [a, b, c, d], half_set: half.iter().collect() });
            }
        }
    }
}

/// Lazily yields GM partitions in lexicographic order of `C`.
pub struct GmPartitions<'g> {
    g: &'g Graph,
    next_lead: usize,
    buf: VecDeque<GmPartition>,
}

impl Iterator for GmPartitions<'_> {
    type Item = GmPartition;

    fn next(&mut self) -> Option<GmPartition> {
        loop {
            if let Some(p) = self.buf.pop_front() {
                return Some(p);
            }
            if self.next_lead >= self.g.n() {
                return None;
            }
            self.buf = gm_partitions_with_lead(self.g, self.next_lead).expect("size checked").into();
            self.next_lead += 1;
        }
    }
}

pub fn enumerate_gm_partitions(g: &Graph) -> Result<GmPartitions<'_>, SwitchError> {
    check_size(g)?;
    Ok(GmPartitions { g, next_lead: 0, buf: VecDeque::new() })
}

// ---------------------------------------------------------------------------
// WQH enumeration.

fn check_ell(g: &Graph, ell: usize) -> Result<(), SwitchError> {
    check_size(g)?;
    if !(2..=4).contains(&ell) {
        return Err(SwitchError::InvalidArgument(format!("block size {ell} outside 2..=4")));
    }
    if 2 * ell >= g.n() {
        return Err(SwitchError::InvalidArgument(format!("2ℓ = {} must be below n = {}", 2 * ell, g.n())));
    }
    Ok(())
}

/// All WQH partitions whose smallest vertex is `lead`, ordered by `(C1, C2)`.
pub fn wqh_partitions_with_lead(g: &Graph, ell: usize, lead: usize) -> Result<Vec<WqhPartition>, SwitchError> {
    check_ell(g, ell)?;
    let mut out = Vec::new();
    if lead < g.n() {
        by_width!(g.n(), wqh_lead::<W>(g, ell, lead, &mut out));
    }
    Ok(out)
}

fn wqh_lead<const W: usize>(g: &Graph, ell: usize, lead: usize, out: &mut Vec<WqhPartition>) {
    let rows = load_rows::<W>(g);
    let mut s = WqhSearch {
        rows: &rows,
        ell,
        valid: Bits::first_n(g.n()),
        c1: Vec::with_capacity(ell),
        c1set: Bits::EMPTY,
        k1: 0,
        d: 0,
        planes: [Bits::EMPTY; 3],
        classes: [Bits::EMPTY; 5],
        out,
    };
    s.c1.push(lead);
    s.choose_c1();
}

struct WqhSearch<'a, const W: usize> {
    rows: &'a [Bits<W>],
    ell: usize,
    valid: Bits<W>,
    c1: Vec<usize>,
    c1set: Bits<W>,
    k1: usize,
    d: usize,
    /// bit-sliced counts `|Γ(v) ∩ C1|`
    planes: [Bits<W>; 3],
    /// `classes[j]` = vertices outside `C1` with `j` neighbours in `C1`
    classes: [Bits<W>; 5],
    out: &'a mut Vec<WqhPartition>,
}

/// Bit-sliced counters of how many of `rows[vs]` contain each vertex.
fn count_planes<const W: usize>(rows: &[Bits<W>], vs: &[usize]) -> [Bits<W>; 3] {
    let (mut s0, mut s1, mut s2) = (Bits::EMPTY, Bits::EMPTY, Bits::EMPTY);
    for &v in vs {
        let r = rows[v];
        let c0 = s0 & r;
        s0 = s0 ^ r;
        let c1 = s1 & c0;
        s1 = s1 ^ c0;
        s2 = s2 ^ c1;
    }
    [s0, s1, s2]
}

fn count_classes<const W: usize>(planes: &[Bits<W>; 3], within: Bits<W>) -> [Bits<W>; 5] {
    let [s0, s1, s2] = *planes;
    [
        !s0 & !s1 & !s2 & within,
        s0 & !s1 & !s2 & within,
        !s0 & s1 & !s2 & within,
        s0 & s1 & !s2 & within,
        !s0 & !s1 & s2 & within,
    ]
}

impl<const W: usize> WqhSearch<'_, W> {
    fn adj(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    fn choose_c1(&mut self) {
        let m = self.c1.len();
        if PruningBounds::of(&self.c1, &[], |u, v| self.adj(u, v)).discards(self.ell, m) {
            return;
        }
        if m == self.ell {
            self.k1 = self.c1.iter().filter(|&&v| self.adj(self.c1[0], v)).count();
            self.c1set = Bits::of(&self.c1);
            self.planes = count_planes(self.rows, &self.c1);
            self.classes = count_classes(&self.planes, self.valid & !self.c1set);
            self.choose_c2();
            return;
        }
        let last = *self.c1.last().unwrap();
        let n = self.rows.len();
        for v in last + 1..n {
            if n - v < self.ell - m {
                break;
            }
            self.c1.push(v);
            self.choose_c1();
            self.c1.pop();
        }
    }

    fn a_of(&self, y: usize) -> usize {
        self.planes[0].contains(y) as usize + 2 * self.planes[1].contains(y) as usize + 4 * self.planes[2].contains(y) as usize
    }

    fn choose_c2(&mut self) {
        let above = Bits::above(self.c1[0]);
        let first = self.out.len();
        for d in 0..=self.ell {
            let cand = self.classes[d] & above;
            if cand.count() < self.ell {
                continue;
            }
            self.d = d;
            self.search(&mut Vec::with_capacity(self.ell), Bits::EMPTY, cand);
        }
        self.out[first..].sort_by(|x, y| x.c2.cmp(&y.c2));
    }

    /// Completes `p` to `C2` from `cand`. Branches on the most constrained
    /// requirement; every tried vertex is dropped from later siblings, so each
    /// set is reached once.
    fn search(&mut self, p: &mut Vec<usize>, pset: Bits<W>, cand: Bits<W>) {
        let r = self.ell - p.len();
        if r == 0 {
            self.leaf(p, pset);
            return;
        }
        let Some((mut cand, domain)) = self.propagate(p, pset, cand, r) else { return };
        let mut try_vertex = |s: &mut Self, v: usize, cand: Bits<W>| {
            p.push(v);
            if !PruningBounds::of(&s.c1, p, |x, y| s.adj(x, y)).discards(s.ell, s.ell + p.len()) {
                let mut ps = pset;
                ps.insert(v);
                s.search(p, ps, cand);
            }
            p.pop();
        };
        match domain {
            Some(domain) => {
                for v in domain.iter() {
                    cand.remove(v);
                    try_vertex(self, v, cand);
                }
            }
            None => {
                let v = cand.iter().next().expect("propagate keeps at least r candidates");
                cand.remove(v);
                try_vertex(self, v, cand);
                self.search(p, pset, cand);
            }
        }
    }

    /// Narrows the candidates for the remaining `r` vertices of `C2` and picks
    /// the requirement with the fewest candidates that still needs one of
    /// them, or reports that no completion satisfies (A)–(D).
    fn propagate(&self, p: &[usize], pset: Bits<W>, mut cand: Bits<W>, r: usize) -> Option<(Bits<W>, Option<Bits<W>>)> {
        let ell = self.ell;
        loop {
            if cand.count() < r {
                return None;
            }
            let before = cand;
            let mut best: Option<Bits<W>> = None;
            let mut best_size = usize::MAX;
            // `targets` lists the admissible final counts of |Γ(y) ∩ C2|
            let mut require = |cand: &mut Bits<W>, row: Bits<W>, targets: &[usize]| -> Option<()> {
                let lo = (row & pset).count();
                let dom = row & *cand;
                let hi = lo + dom.count().min(r);
                let mut fit = targets.iter().copied().filter(|t| (lo..=hi).contains(t));
                let t = fit.next()?;
                if fit.next().is_some() {
                    return Some(());
                }
                if t == lo {
                    *cand = *cand & !row;
                } else {
                    if t == lo + r {
                        *cand = *cand & row;
                    }
                    let size = dom.count();
                    if size < best_size {
                        best_size = size;
                        best = Some(dom);
                    }
                }
                Some(())
            };
            for &c in &self.c1 {
                require(&mut cand, self.rows[c], &[self.d])?;
            }
            for &x in p {
                require(&mut cand, self.rows[x], &[self.k1])?;
            }
            let outside = self.valid & !(self.c1set | pset | cand);
            for y in outside.iter() {
                let a = self.a_of(y);
                let (pair, own) = ([0, ell], [a]);
                let targets: &[usize] = if a == 0 || a == ell { &pair } else { &own };
                require(&mut cand, self.rows[y], targets)?;
            }
            if cand == before {
                // the chosen domain may have been computed before the last
                // narrowing; intersect to stay inside the candidates
                return Some((cand, best.map(|d| d & cand)));
            }
        }
    }

    fn leaf(&mut self, p: &[usize], pset: Bits<W>) {
        if p.iter().any(|&x| (self.rows[x] & pset).count() != self.k1) {
            return;
        }
        if self.c1.iter().any(|&c| (self.rows[c] & pset).count() != self.d) {
            return;
        }
        let outside = self.valid & !(self.c1set | pset);
        let b = count_classes(&count_planes(self.rows, p), outside);
        let a = &self.classes;
        let ell = self.ell;
        let mut equal = Bits::EMPTY;
        for j in 0..=ell {
            equal = equal | (a[j] & b[j]);
        }
        let switch = ((a[ell] & b[0]) | (a[0] & b[ell])) & outside;
        if !(outside & !(equal | switch)).is_empty() || switch.is_empty() {
            return;
        }
        let mut c2 = p.to_vec();
        c2.sort_unstable();
        self.out.push(WqhPartition { ell, c1: self.c1.clone(), c2, switch_set: switch.iter().collect() });
    }
}

/// Lazily yields WQH partitions, lead by lead.
pub struct WqhPartitions<'g> {
    g: &'g Graph,
    ell: usize,
    next_lead: usize,
    buf: VecDeque<WqhPartition>,
}

impl Iterator for WqhPartitions<'_> {
    type Item = WqhPartition;

    fn next(&mut self) -> Option<WqhPartition> {
        loop {
            if let Some(p) = self.buf.pop_front() {
                return Some(p);
            }
            if self.next_lead >= self.g.n() {
                return None;
            }
            self.buf = wqh_partitions_with_lead(self.g, self.ell, self.next_lead).expect("arguments checked").into();
            self.next_lead += 1;
        }
    }
}

pub fn enumerate_wqh_partitions(g: &Graph, ell: usize) -> Result<WqhPartitions<'_>, SwitchError> {
    check_ell(g, ell)?;
    Ok(WqhPartitions { g, ell, next_lead: 0, buf: VecDeque::new() })
}

/// Partitions of the given kind with smallest vertex `lead`.
pub fn partitions_with_lead(g: &Graph, kind: SwitchKind, lead: usize) -> Result<Vec<Partition>, SwitchError> {
    Ok(match kind {
        SwitchKind::Gm4 => gm_partitions_with_lead(g, lead)?.into_iter().map(Partition::Gm).collect(),
        SwitchKind::Wqh(ell) => wqh_partitions_with_lead(g, ell, lead)?.into_iter().map(Partition::Wqh).collect(),
    })
}

/// Checks that `kind` can be enumerated on `g`.
pub fn check_applicable(g: &Graph, kind: SwitchKind) -> Result<(), SwitchError> {
    match kind {
        SwitchKind::Gm4 => check_size(g),
        SwitchKind::Wqh(ell) => check_ell(g, ell),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{sp_graph, vno_minus_4_3};
    use crate::srg::verify_srg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in start..n {
                cur.push(v);
                rec(v + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    fn nbrs(g: &Graph, x: usize, s: &[usize]) -> usize {
        s.iter().filter(|&&v| g.has_edge(x, v)).count()
    }

    fn regular(g: &Graph, s: &[usize]) -> Option<usize> {
        let d = nbrs(g, s[0], s);
        s.iter().all(|&u| nbrs(g, u, s) == d).then_some(d)
    }

    /// Direct reading of conditions (A)(B)(C).
    fn naive_gm(g: &Graph) -> Vec<[usize; 4]> {
        subsets(g.n(), 4)
            .into_iter()
            .filter(|c| {
                let outside: Vec<usize> = (0..g.n()).filter(|x| !c.contains(x)).collect();
                regular(g, c).is_some()
                    && outside.iter().all(|&x| [0, 2, 4].contains(&nbrs(g, x, c)))
                    && outside.iter().any(|&x| nbrs(g, x, c) == 2)
            })
            .map(|c| c.try_into().unwrap())
            .collect()
    }

    /// Direct reading of conditions (A)–(E) over normalised block pairs.
    fn naive_wqh(g: &Graph, ell: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let sets = subsets(g.n(), ell);
        let mut out = Vec::new();
        for c1 in &sets {
            for c2 in &sets {
                if c2[0] <= c1[0] || c2.iter().any(|v| c1.contains(v)) {
                    continue;
                }
                let (Some(k1), Some(k2)) = (regular(g, c1), regular(g, c2)) else { continue };
                if k1 != k2 {
                    continue;
                }
                let d = nbrs(g, c1[0], c2);
                if !c1.iter().all(|&u| nbrs(g, u, c2) == d) || !c2.iter().all(|&u| nbrs(g, u, c1) == d) {
                    continue;
                }
                let mut ok = true;
                let mut switched = false;
                for x in (0..g.n()).filter(|x| !c1.contains(x) && !c2.contains(x)) {
                    let nb: Vec<usize> = c1.iter().chain(c2).copied().filter(|&v| g.has_edge(x, v)).collect();
                    if nb == *c1 || nb == *c2 {
                        switched = true;
                    } else if nbrs(g, x, c1) != nbrs(g, x, c2) {
                        ok = false;
                        break;
                    }
                }
                if ok && switched {
                    out.push((c1.clone(), c2.clone()));
                }
            }
        }
        out
    }

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
        Graph::from_fn(n, |_, _| rng.gen_bool(p))
    }

    #[test]
    fn gm_basic_rejections() {
        let c5 = Graph::cycle(5);
        for c in subsets(5, 4) {
            assert_eq!(classify_gm(&c5, &c), Err(SwitchError::Rejected(Rejection::NotRegular { block: "C" })));
        }
        assert_eq!(enumerate_gm_partitions(&c5).unwrap().count(), 0);
        assert_eq!(enumerate_gm_partitions(&Graph::empty(9)).unwrap().count(), 0);
        assert_eq!(classify_gm(&Graph::complete(5), &[0, 1, 2, 3]), Err(SwitchError::Rejected(Rejection::Trivial)));
        assert!(matches!(classify_gm(&c5, &[0, 1, 2]), Err(SwitchError::InvalidArgument(_))));
    }

    #[test]
    fn gm_matches_oracle_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nonempty = 0;
        for i in 0..60 {
            let n = 6 + i % 15;
            let g = random_graph(n, [0.3, 0.5, 0.7][i % 3], &mut rng);
            let fast: Vec<[usize; 4]> = enumerate_gm_partitions(&g).unwrap().map(|p| p.c).collect();
            let slow = naive_gm(&g);
            assert_eq!(fast, slow, "graph {g:?}");
            nonempty += !fast.is_empty() as usize;
        }
        assert!(nonempty > 10);
    }

    #[test]
    fn gm_first_partition_of_sp62() {
        let g = sp_graph(3, 2).unwrap();
        let first = enumerate_gm_partitions(&g).unwrap().next().unwrap();
        // oracle: scan 4-sets in lexicographic order until one passes
        let expected = subsets(63, 4)
            .into_iter()
            .find(|c| {
                regular(&g, c).is_some()
                    && (0..63).filter(|x| !c.contains(x)).all(|x| [0, 2, 4].contains(&nbrs(&g, x, c)))
                    && (0..63).filter(|x| !c.contains(x)).any(|x| nbrs(&g, x, c) == 2)
            })
            .unwrap();
        assert_eq!(first.c.to_vec(), expected);
        assert!(!first.half_set.is_empty());
        let h = apply_gm(&g, &first).unwrap();
        assert_ne!(h, g);
        assert_eq!(verify_srg(&h), verify_srg(&g));
        assert_eq!(apply_gm(&h, &first).unwrap(), g);
    }

    #[test]
    fn wqh_matches_oracle_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = [0usize; 5];
        for i in 0..90 {
            let ell = 2 + i % 2;
            let n = 2 * ell + 1 + (i / 2) % (20 - 2 * ell);
            let g = random_graph(n, [0.25, 0.5, 0.75][i % 3], &mut rng);
            let fast: Vec<(Vec<usize>, Vec<usize>)> =
                enumerate_wqh_partitions(&g, ell).unwrap().map(|p| (p.c1, p.c2)).collect();
            assert_eq!(fast, naive_wqh(&g, ell), "ell {ell} graph {g:?}");
            hits[ell] += fast.len();
        }
        assert!(hits[2] > 0, "{hits:?}");
    }

    #[test]
    fn wqh_matches_oracle_with_structure() {
        // vertex-transitive and structured graphs carry far more partitions
        // than random ones
        let graphs = [
            Graph::cycle(12),
            Graph::from_fn(12, |a, b| (a % 4 == b % 4) || (a / 4 == b / 4)),
            Graph::from_fn(16, |a, b| (a ^ b).count_ones() == 1),
            Graph::from_fn(16, |a, b| (a % 4 == b % 4) != (a / 4 == b / 4)),
            crate::seeds::sts_block_graph(&crate::seeds::TripleSystem::affine_plane_3()),
        ];
        let mut hits = [0usize; 5];
        for g in &graphs {
            for ell in [2, 3, 4] {
                if 2 * ell >= g.n() {
                    continue;
                }
                let fast: Vec<(Vec<usize>, Vec<usize>)> =
                    enumerate_wqh_partitions(g, ell).unwrap().map(|p| (p.c1, p.c2)).collect();
                assert_eq!(fast, naive_wqh(g, ell), "ell {ell} graph {g:?}");
                hits[ell] += fast.len();
            }
        }
        assert!(hits[2..].iter().all(|&h| h > 0), "{hits:?}");
    }

    #[test]
    fn wqh_classify_cases() {
        let k8 = Graph::complete(8);
        assert_eq!(classify_wqh(&k8, &[0, 1, 2], &[3, 4, 5]), Err(SwitchError::Rejected(Rejection::Trivial)));
        assert!(matches!(classify_wqh(&k8, &[0, 1], &[3, 4, 5]), Err(SwitchError::InvalidArgument(_))));
        assert!(matches!(enumerate_wqh_partitions(&k8, 4), Err(SwitchError::InvalidArgument(_))));
    }

    #[test]
    fn wqh_first_partition_of_vno_minus() {
        let g = vno_minus_4_3();
        let p = enumerate_wqh_partitions(&g, 3).unwrap().next().unwrap();
        assert_eq!(classify_wqh(&g, &p.c1, &p.c2).unwrap(), p);
        let h = apply_wqh(&g, &p).unwrap();
        assert_eq!(verify_srg(&h), verify_srg(&g));
        assert_eq!(apply_wqh(&h, &p).unwrap(), g);
        // the first accepted pair by direct scan, restricted to the lead vertex 0
        let sets = subsets(81, 3);
        let direct = sets
            .iter()
            .filter(|c1| c1[0] == 0)
            .flat_map(|c1| sets.iter().map(move |c2| (c1, c2)))
            .find(|(c1, c2)| c2[0] > 0 && c2.iter().all(|v| !c1.contains(v)) && classify_wqh(&g, c1, c2).is_ok())
            .unwrap();
        assert_eq!((&p.c1, &p.c2), (direct.0, direct.1));
    }

    #[test]
    fn stale_partitions_rejected() {
        let g = sp_graph(3, 2).unwrap();
        let p = enumerate_gm_partitions(&g).unwrap().next().unwrap();
        let other = Graph::cycle(63);
        assert!(matches!(apply_gm(&other, &p), Err(SwitchError::InvalidPartition(_))));
        let mut bent = p.clone();
        bent.half_set.pop();
        assert_eq!(apply_gm(&g, &bent), Err(SwitchError::InvalidPartition(Rejection::Stale)));
    }

    #[test]
    fn text_roundtrip() {
        let g = sp_graph(3, 2).unwrap();
        let p = Partition::Gm(enumerate_gm_partitions(&g).unwrap().next().unwrap());
        assert_eq!(Partition::from_text(&g, &p.to_text()).unwrap(), p);
        let v = vno_minus_4_3();
        let q = Partition::Wqh(enumerate_wqh_partitions(&v, 3).unwrap().next().unwrap());
        assert!(q.to_text().starts_with("wqh:"));
        assert_eq!(Partition::from_text(&v, &q.to_text()).unwrap(), q);
        assert!(matches!(Partition::from_text(&v, "xx:1"), Err(SwitchError::Parse(_))));
    }

    #[test]
    fn pruning_bounds() {
        let g = Graph::path(4);
        let b = PruningBounds::of(&[0, 1], &[2], |u, v| g.has_edge(u, v));
        assert_eq!((b.k11, b.big_k11), (1, 1));
        assert_eq!((b.k12, b.big_k12), (0, 1));
        assert_eq!((b.k21, b.big_k21), (1, 1));
        assert!(!b.discards(2, 3));
        let b = PruningBounds::of(&[0, 1, 2], &[], |u, v| g.has_edge(u, v));
        // degrees 1,2,1 with nothing left to add
        assert!(b.discards(3, 3));
    }

    #[test]
    fn switch_kind_text() {
        for k in ["gm4", "wqh2", "wqh3", "wqh4"] {
            assert_eq!(k.parse::<SwitchKind>().unwrap().to_string(), k);
        }
        assert!("wqh5".parse::<SwitchKind>().is_err());
    }
}
