//! Dense simple graphs stored as symmetric bit matrices.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("expected two distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error("permutation has length {got}, expected {expected}")]
    BadPermutation { got: usize, expected: usize },
}

/// Number of 64-bit words needed to hold `n` bits.
#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A simple undirected graph on vertices `0..n`.
///
/// Row `u` is a bit vector of `words()` machine words whose bit `v` is set iff
/// `u ~ v`. The matrix is kept symmetric with an empty diagonal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Graph { n, words, bits: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_fn(n, |_, _| true)
    }

    /// Builds a graph from a symmetric predicate evaluated on pairs `u < v`.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.set_edge(u, v, true);
                }
            }
        }
        g
    }

    /// Builds a graph from an edge list. Loops are rejected, repeated edges are
    /// ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.check(u)?;
            g.check(v)?;
            if u == v {
                return Err(GraphError::SameVertex(u));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Self {
        Graph::from_fn(n, |u, v| v == u + 1 || (u == 0 && v + 1 == n && n > 2))
    }

    pub fn path(n: usize) -> Self {
        Graph::from_fn(n, |u, v| v == u + 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds or removes the edge `uv`.
    ///
    /// # Panics
    /// If `u == v` or either vertex is out of range.
    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        assert!(u != v && u < self.n && v < self.n, "no edge slot ({u},{v}) on {} vertices", self.n);
        let (wu, bu) = (u * self.words + v / 64, 1u64 << (v % 64));
        let (wv, bv) = (v * self.words + u / 64, 1u64 << (u % 64));
        if on {
            self.bits[wu] |= bu;
            self.bits[wv] |= bv;
        } else {
            self.bits[wu] &= !bu;
            self.bits[wv] &= !bv;
        }
    }

    #[inline]
    pub(crate) fn toggle_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.bits[u * self.words + v / 64] ^= 1u64 << (v % 64);
        self.bits[v * self.words + u / 64] ^= 1u64 << (u % 64);
    }

    fn check(&self, u: usize) -> Result<(), GraphError> {
        if u < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: u, n: self.n })
        }
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(u))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// `|Γ(u) ∩ Γ(v)|` for distinct `u`, `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SameVertex(u));
        }
        Ok(self.common_count(u, v))
    }

    #[inline]
    pub(crate) fn common_count(&self, u: usize, v: usize) -> usize {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Graph {
        Graph::from_fn(self.n, |u, v| !self.has_edge(u, v))
    }

    /// The graph in which vertex `v` of `self` is renamed `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation { got: perm.len(), expected: self.n });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(GraphError::BadPermutation { got: perm.len(), expected: self.n });
            }
            seen[p] = true;
        }
        let mut h = Graph::empty(self.n);
        for (u, v) in self.edges() {
            h.set_edge(perm[u], perm[v], true);
        }
        Ok(h)
    }

    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph::from_fn(vertices.len(), |i, j| self.has_edge(vertices[i], vertices[j]))
    }

    /// Disjoint union, vertices of `other` shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        Graph::from_fn(n, |u, v| {
            if v < self.n {
                self.has_edge(u, v)
            } else if u >= self.n {
                other.has_edge(u - self.n, v - self.n)
            } else {
                false
            }
        })
    }

    /// Checks the symmetric / loopless representation invariants.
    pub fn is_well_formed(&self) -> bool {
        if self.bits.len() != self.n * self.words {
            return false;
        }
        let tail = self.n % 64;
        for u in 0..self.n {
            if self.has_edge(u, u) {
                return false;
            }
            if tail != 0 && self.row(u)[self.words - 1] >> tail != 0 {
                return false;
            }
            for v in self.neighbors(u) {
                if !self.has_edge(v, u) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.n
            && self.edges().all(|(u, v)| self.has_edge(perm[u], perm[v]))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, g6={})", self.n, crate::graph6::emit_graph6_string(self))
    }
}

/// Iterates the indices of set bits in a word slice, in increasing order.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_neighbors_on_pentagon() {
        let c5 = Graph::cycle(5);
        assert_eq!(c5.common_neighbors(0, 1).unwrap(), 0);
        assert_eq!(c5.common_neighbors(0, 2).unwrap(), 1);
        assert_eq!(c5.common_neighbors(2, 2), Err(GraphError::SameVertex(2)));
        assert!(c5.common_neighbors(0, 7).is_err());
    }

    #[test]
    fn rows_past_64_vertices() {
        let g = Graph::cycle(130);
        assert_eq!(g.words(), 3);
        assert!(g.has_edge(129, 0));
        assert!(g.has_edge(63, 64));
        assert!(g.is_well_formed());
        assert_eq!(g.edge_count(), 130);
        assert!((0..130).all(|u| g.degree(u) == 2));
    }

    #[test]
    fn permutation_and_automorphism() {
        let c5 = Graph::cycle(5);
        let rot = [1, 2, 3, 4, 0];
        assert!(c5.is_automorphism(&rot));
        assert_eq!(c5.permuted(&rot).unwrap(), c5);
        assert!(!c5.is_automorphism(&[1, 0, 2, 3, 4]));
        assert!(c5.permuted(&[0, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn loops_rejected() {
        assert_eq!(Graph::from_edges(3, &[(1, 1)]), Err(GraphError::SameVertex(1)));
    }

    #[test]
    fn complement_and_union() {
        let k3 = Graph::complete(3);
        assert_eq!(k3.complement(), Graph::empty(3));
        let two = k3.disjoint_union(&k3);
        assert_eq!(two.edge_count(), 6);
        assert!(!two.has_edge(0, 3));
    }
}
