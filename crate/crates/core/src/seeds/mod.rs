//! Seed graphs: finite-geometry constructions, triple-system block graphs and
//! a few embedded graph6 records.

mod field;
mod named;
mod triple;

use std::collections::HashMap;

use thiserror::Error;

pub use field::{FiniteField, UnsupportedField};
pub use named::{NamedSeed, SeedParseError};
pub use triple::{TripleSystem, TripleSystemError};

use crate::graph::Graph;
use crate::graph6::parse_graph6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error(transparent)]
    Field(#[from] UnsupportedField),
    #[error("quadratic form term ({i},{j}) out of range for dimension {dim}")]
    DimensionMismatch { i: usize, j: usize, dim: usize },
    #[error("adjacency value {value} is not an element of GF({q})")]
    BadValue { value: u8, q: usize },
    #[error("bilinear forms graph needs m >= 4, got {0}")]
    BilinTooSmall(usize),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("{0}")]
    Unsupported(String),
}

/// A quadratic form as a list of monomials `coeff · x_i · x_j` (`i == j` gives
/// a square). Coefficients are integers reduced into the field on use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFormSpec {
    pub dim: usize,
    pub terms: Vec<(usize, usize, i64)>,
}

impl QuadraticFormSpec {
    pub fn new(dim: usize, terms: Vec<(usize, usize, i64)>) -> Self {
        QuadraticFormSpec { dim, terms }
    }

    /// `x1x2 + x3x4 + ...` on an even dimension.
    pub fn hyperbolic(dim: usize) -> Self {
        QuadraticFormSpec::new(dim, (0..dim / 2).map(|i| (2 * i, 2 * i + 1, 1)).collect())
    }

    /// `x1² + x1x2 + x2² + x3x4 + ...`; nondegenerate and elliptic over GF(2).
    pub fn elliptic_f2(dim: usize) -> Self {
        let mut terms = vec![(0, 0, 1), (0, 1, 1), (1, 1, 1)];
        terms.extend((1..dim / 2).map(|i| (2 * i, 2 * i + 1, 1)));
        QuadraticFormSpec::new(dim, terms)
    }

    /// `x1² + x2² + x3² + x4²`, hyperbolic over `GF(3)`.
    pub fn vno_plus_4_3() -> Self {
        QuadraticFormSpec::new(4, (0..4).map(|i| (i, i, 1)).collect())
    }

    /// `x1² − x2² + x3² + x4²`, elliptic over `GF(3)`.
    pub fn vno_minus_4_3() -> Self {
        QuadraticFormSpec::new(4, vec![(0, 0, 1), (1, 1, -1), (2, 2, 1), (3, 3, 1)])
    }

    fn validate(&self) -> Result<(), SeedError> {
        if self.dim == 0 {
            return Err(SeedError::ZeroDimension);
        }
        for &(i, j, _) in &self.terms {
            if i >= self.dim || j >= self.dim {
                return Err(SeedError::DimensionMismatch { i, j, dim: self.dim });
            }
        }
        Ok(())
    }

    pub fn eval(&self, f: &FiniteField, x: &[u8]) -> u8 {
        self.terms.iter().fold(0, |acc, &(i, j, c)| f.add(acc, f.mul(f.from_int(c), f.mul(x[i], x[j]))))
    }
}

/// Vectors of `GF(q)^dim`, `x ~ y` iff `x != y` and `Q(x - y) = value`.
pub fn affine_orthogonal_graph(spec: &QuadraticFormSpec, q: usize, value: u8) -> Result<Graph, SeedError> {
    let f = FiniteField::new(q)?;
    spec.validate()?;
    if value as usize >= q {
        return Err(SeedError::BadValue { value, q });
    }
    let vs = f.vectors(spec.dim);
    // Q(x - y) only depends on the difference, so tabulate it once
    let qvals: Vec<u8> = vs.iter().map(|v| spec.eval(&f, v)).collect();
    let index = |v: &[u8]| v.iter().fold(0usize, |acc, &c| acc * q + c as usize);
    Ok(Graph::from_fn(vs.len(), |a, b| qvals[index(&f.vec_sub(&vs[a], &vs[b]))] == value))
}

/// `VO⁻(2d, 2)`: elliptic form, adjacency on `Q(x - y) = 0`.
pub fn vo_minus_f2(dim: usize) -> Result<Graph, SeedError> {
    affine_orthogonal_graph(&QuadraticFormSpec::elliptic_f2(dim), 2, 0)
}

/// The SRG(64,28,12,12) seed: hyperbolic form on `GF(2)^6` with adjacency on
/// `Q(x - y) = 1`. The `Q = 0` level set gives the complementary (64,35,18,20).
pub fn vo_plus_64_seed() -> Graph {
    affine_orthogonal_graph(&QuadraticFormSpec::hyperbolic(6), 2, 1).expect("fixed parameters")
}

/// `VNO⁺₄(3)`, SRG(81,24,9,6).
pub fn vno_plus_4_3() -> Graph {
    affine_orthogonal_graph(&QuadraticFormSpec::vno_plus_4_3(), 3, 1).expect("fixed parameters")
}

/// `VNO⁻₄(3)`, the point graph of the van Lint–Schrijver geometry,
/// SRG(81,30,9,12).
pub fn vno_minus_4_3() -> Graph {
    affine_orthogonal_graph(&QuadraticFormSpec::vno_minus_4_3(), 3, 1).expect("fixed parameters")
}

/// Projective points of `GF(q)^dim`, each normalised so its first nonzero
/// coordinate is 1, in lexicographic order.
pub fn projective_points(f: &FiniteField, dim: usize) -> Vec<Vec<u8>> {
    f.vectors(dim).into_iter().filter(|v| v.iter().find(|&&c| c != 0) == Some(&1)).collect()
}

/// Collinearity graph of the symplectic polar space `W(2d-1, q)`: 1-spaces of
/// `GF(q)^{2d}`, adjacent when perpendicular under
/// `x1y2 - x2y1 + ... + x_{2d-1}y_{2d} - x_{2d}y_{2d-1}`.
pub fn sp_graph(d: usize, q: usize) -> Result<Graph, SeedError> {
    let f = FiniteField::new(q)?;
    if d == 0 {
        return Err(SeedError::ZeroDimension);
    }
    let pts = projective_points(&f, 2 * d);
    let form = |x: &[u8], y: &[u8]| {
        (0..d).fold(0u8, |acc, i| {
            let a = f.mul(x[2 * i], y[2 * i + 1]);
            let b = f.mul(x[2 * i + 1], y[2 * i]);
            f.add(acc, f.sub(a, b))
        })
    };
    Ok(Graph::from_fn(pts.len(), |a, b| form(&pts[a], &pts[b]) == 0))
}

/// `Bilin(2, m-2, q)`. A 2-space of `GF(q)^m` meeting the fixed
/// `(m-2)`-space `⟨e_3, ..., e_m⟩` trivially is the row space of `[I₂ | A]` for
/// a unique `2 × (m-2)` matrix `A`; two such spaces meet in a 1-space exactly
/// when `rank(A - B) = 1`. Vertices are the matrices in lexicographic order.
pub fn bilin_graph(q: usize, m: usize) -> Result<Graph, SeedError> {
    let f = FiniteField::new(q)?;
    if m < 4 {
        return Err(SeedError::BilinTooSmall(m));
    }
    let e = m - 2;
    let mats = f.vectors(2 * e);
    let rank_of = |v: &[u8]| f.rank(&[v[..e].to_vec(), v[e..].to_vec()]);
    let index = |v: &[u8]| v.iter().fold(0usize, |acc, &c| acc * q + c as usize);
    let ranks: Vec<usize> = mats.iter().map(|v| rank_of(v)).collect();
    Ok(Graph::from_fn(mats.len(), |a, b| ranks[index(&f.vec_sub(&mats[a], &mats[b]))] == 1))
}

/// Concurrence graph of the block set of a Steiner triple system.
pub fn sts_block_graph(ts: &TripleSystem) -> Graph {
    let blocks = ts.blocks();
    Graph::from_fn(blocks.len(), |a, b| blocks[a].iter().any(|p| blocks[b].contains(p)))
}

/// The generalized quadrangle `GQ(5,3)` realised as the dual of `T₂*(O)` for
/// the hyperoval `O` of `PG(2,4)`: points are the 96 affine lines of `AG(3,4)`
/// whose direction lies in `O`, and lines are the 64 affine points.
///
/// Returns the collinearity graph together with the 64 lines as sorted vertex
/// lists (each a 6-clique).
pub fn gq53_geometry() -> (Graph, Vec<Vec<usize>>) {
    let f = FiniteField::new(4).expect("GF(4)");
    // conic x z = y², i.e. (1, t, t²) and (0, 0, 1), plus its nucleus (0, 1, 0)
    let mut hyperoval: Vec<[u8; 3]> = f.elements().map(|t| [1, t, f.mul(t, t)]).collect();
    hyperoval.push([0, 0, 1]);
    hyperoval.push([0, 1, 0]);

    let points = f.vectors(3);
    let index = |v: &[u8]| v.iter().fold(0usize, |acc, &c| acc * 4 + c as usize);
    let mut line_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for d in &hyperoval {
        for p in &points {
            let mut pts: Vec<usize> = f
                .elements()
                .map(|s| index(&[0, 1, 2].map(|c| f.add(p[c], f.mul(s, d[c])))))
                .collect();
            pts.sort_unstable();
            if !line_ids.contains_key(&pts) {
                line_ids.insert(pts.clone(), lines.len());
                lines.push(pts);
            }
        }
    }
    lines.sort();
    let g = Graph::from_fn(lines.len(), |a, b| lines[a].iter().any(|p| lines[b].contains(p)));
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (li, l) in lines.iter().enumerate() {
        for &p in l {
            through[p].push(li);
        }
    }
    (g, through)
}

pub fn gq53_point_graph() -> Graph {
    gq53_geometry().0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppendixSeed {
    /// A block graph of an `S(2,3,19)`, SRG(57,24,11,9).
    Sts19Srg57,
    /// A block graph of an `S(2,3,21)`, SRG(70,27,12,9).
    Sts21Srg70,
    /// A Haemers(4) graph, SRG(96,19,2,4).
    Haemers4Srg96,
}

impl AppendixSeed {
    pub const ALL: [AppendixSeed; 3] = [AppendixSeed::Sts19Srg57, AppendixSeed::Sts21Srg70, AppendixSeed::Haemers4Srg96];

    pub fn name(&self) -> &'static str {
        match self {
            AppendixSeed::Sts19Srg57 => "sts19-srg57",
            AppendixSeed::Sts21Srg70 => "sts21-srg70",
            AppendixSeed::Haemers4Srg96 => "haemers4-srg96",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn graph6(&self) -> &'static str {
        match self {
            AppendixSeed::Sts19Srg57 => include_str!("data/sts19-srg57.g6"),
            AppendixSeed::Sts21Srg70 => include_str!("data/sts21-srg70.g6"),
            AppendixSeed::Haemers4Srg96 => include_str!("data/haemers4-srg96.g6"),
        }
    }
}

pub fn load_appendix_seed(seed: AppendixSeed) -> Graph {
    parse_graph6(seed.graph6().trim_end().as_bytes()).expect("embedded graph6 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srg::{verify_srg, SrgParams};

    fn params(g: &Graph) -> SrgParams {
        verify_srg(g).unwrap()
    }

    #[test]
    fn symplectic() {
        assert_eq!(params(&sp_graph(3, 2).unwrap()), SrgParams::new(63, 30, 13, 15));
        assert_eq!(params(&sp_graph(2, 4).unwrap()), SrgParams::new(85, 20, 3, 5));
        assert_eq!(params(&sp_graph(2, 2).unwrap()), SrgParams::new(15, 6, 1, 3));
        assert_eq!(sp_graph(2, 7), Err(SeedError::Field(UnsupportedField(7))));
    }

    #[test]
    fn affine_polar() {
        assert_eq!(params(&vo_minus_f2(6).unwrap()), SrgParams::new(64, 27, 10, 12));
        let plus = vo_plus_64_seed();
        assert_eq!(params(&plus), SrgParams::new(64, 28, 12, 12));
        assert_eq!(params(&plus.complement()), SrgParams::new(64, 35, 18, 20));
        let level0 = affine_orthogonal_graph(&QuadraticFormSpec::hyperbolic(6), 2, 0).unwrap();
        assert_eq!(level0, plus.complement());
        assert_eq!(params(&vno_plus_4_3()), SrgParams::new(81, 24, 9, 6));
        assert_eq!(params(&vno_minus_4_3()), SrgParams::new(81, 30, 9, 12));
    }

    #[test]
    fn affine_errors() {
        let bad = QuadraticFormSpec::new(2, vec![(0, 2, 1)]);
        assert_eq!(affine_orthogonal_graph(&bad, 3, 1), Err(SeedError::DimensionMismatch { i: 0, j: 2, dim: 2 }));
        assert_eq!(
            affine_orthogonal_graph(&QuadraticFormSpec::hyperbolic(2), 2, 2),
            Err(SeedError::BadValue { value: 2, q: 2 })
        );
    }

    #[test]
    fn translations_are_automorphisms() {
        let f = FiniteField::new(3).unwrap();
        let g = vno_minus_4_3();
        let vs = f.vectors(4);
        let index = |v: &[u8]| v.iter().fold(0usize, |acc, &c| acc * 3 + c as usize);
        for t in &vs {
            let perm: Vec<usize> = vs.iter().map(|x| index(&x.iter().zip(t).map(|(&a, &b)| f.add(a, b)).collect::<Vec<_>>())).collect();
            assert!(g.is_automorphism(&perm));
        }
    }

    #[test]
    fn bilinear_forms() {
        assert_eq!(params(&bilin_graph(3, 4).unwrap()), SrgParams::new(81, 32, 13, 12));
        assert_eq!(params(&bilin_graph(2, 5).unwrap()), SrgParams::new(64, 21, 8, 6));
        assert_eq!(params(&bilin_graph(2, 4).unwrap()), SrgParams::new(16, 9, 4, 6));
        assert_eq!(bilin_graph(2, 3), Err(SeedError::BilinTooSmall(3)));
    }

    #[test]
    fn generalized_quadrangle() {
        let (g, lines) = gq53_geometry();
        assert_eq!(params(&g), SrgParams::new(96, 20, 4, 4));
        assert_eq!(lines.len(), 64);
        for l in &lines {
            assert_eq!(l.len(), 6);
            for (i, &a) in l.iter().enumerate() {
                for &b in &l[i + 1..] {
                    assert!(g.has_edge(a, b));
                }
            }
        }
        // every edge on exactly one line, every point on 4 lines
        let mut cover = vec![0usize; 96 * 96];
        let mut per_point = vec![0usize; 96];
        for l in &lines {
            for &a in l {
                per_point[a] += 1;
                for &b in l {
                    if a != b {
                        cover[a * 96 + b] += 1;
                    }
                }
            }
        }
        assert!(per_point.iter().all(|&c| c == 4));
        for (a, b) in g.edges() {
            assert_eq!(cover[a * 96 + b], 1);
        }
    }

    #[test]
    fn appendix() {
        assert_eq!(params(&load_appendix_seed(AppendixSeed::Sts19Srg57)), SrgParams::new(57, 24, 11, 9));
        assert_eq!(params(&load_appendix_seed(AppendixSeed::Sts21Srg70)), SrgParams::new(70, 27, 12, 9));
        assert_eq!(params(&load_appendix_seed(AppendixSeed::Haemers4Srg96)), SrgParams::new(96, 19, 2, 4));
        for s in AppendixSeed::ALL {
            assert_eq!(AppendixSeed::from_name(s.name()), Some(s));
            let g = load_appendix_seed(s);
            assert_eq!(crate::graph6::emit_graph6_string(&g), s.graph6().trim_end());
        }
    }
}
