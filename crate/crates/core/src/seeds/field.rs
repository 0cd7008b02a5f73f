//! Small finite fields as lookup tables.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unsupported field order {0}; supported orders are 2, 3, 4, 5")]
pub struct UnsupportedField(pub usize);

/// `GF(q)` for `q ∈ {2, 3, 4, 5}`, elements `0..q`.
///
/// Prime fields use residues. For `GF(4)` the elements `0, 1, 2, 3` stand for
/// `0, 1, ω, ω + 1` with `ω² = ω + 1`, so addition is XOR.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
}

const GF4_MUL: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

impl FiniteField {
    pub fn new(q: usize) -> Result<Self, UnsupportedField> {
        let (add, mul): (Vec<u8>, Vec<u8>) = match q {
            2 | 3 | 5 => (0..q * q).map(|i| (((i / q + i % q) % q) as u8, ((i / q * (i % q)) % q) as u8)).unzip(),
            4 => (0..16).map(|i| (((i / 4) ^ (i % 4)) as u8, GF4_MUL[i / 4][i % 4])).unzip(),
            _ => return Err(UnsupportedField(q)),
        };
        Ok(FiniteField { q, add, mul })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        (0..self.q as u8).find(|&b| self.add(a, b) == 0).expect("additive inverse")
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        (1..self.q as u8).find(|&b| self.mul(a, b) == 1)
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    /// Maps an integer (possibly negative) into a prime field; for `GF(4)` only
    /// `0..4` is accepted.
    pub fn from_int(&self, v: i64) -> u8 {
        if self.q == 4 {
            assert!((0..4).contains(&v), "GF(4) literal out of range");
            v as u8
        } else {
            v.rem_euclid(self.q as i64) as u8
        }
    }

    /// All vectors of `GF(q)^dim` in lexicographic order (first coordinate
    /// most significant).
    pub fn vectors(&self, dim: usize) -> Vec<Vec<u8>> {
        let total = self.q.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u8; dim];
                for c in (0..dim).rev() {
                    v[c] = (idx % self.q) as u8;
                    idx /= self.q;
                }
                v
            })
            .collect()
    }

    pub fn vec_sub(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        x.iter().zip(y).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    /// Rank of a matrix given as rows.
    pub fn rank(&self, rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(rank, p);
            let inv = self.inv(m[rank][c]).unwrap();
            let pivot: Vec<u8> = m[rank].iter().map(|&x| self.mul(x, inv)).collect();
            for (i, row) in m.iter_mut().enumerate() {
                if i != rank && row[c] != 0 {
                    let f = row[c];
                    for (x, &pv) in row.iter_mut().zip(&pivot) {
                        *x = self.sub(*x, self.mul(f, pv));
                    }
                }
            }
            m[rank] = pivot;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axioms_hold_exhaustively() {
        for q in [2, 3, 4, 5] {
            let f = FiniteField::new(q).unwrap();
            let el: Vec<u8> = f.elements().collect();
            for &a in &el {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.mul(a, 0), 0);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for &b in &el {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &el {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn unsupported() {
        assert_eq!(FiniteField::new(7), Err(UnsupportedField(7)));
        assert_eq!(FiniteField::new(6), Err(UnsupportedField(6)));
    }

    #[test]
    fn rank_over_f3() {
        let f = FiniteField::new(3).unwrap();
        assert_eq!(f.rank(&[vec![1, 2], vec![2, 1]]), 1);
        assert_eq!(f.rank(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(f.rank(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(f.vectors(2).len(), 9);
        assert_eq!(f.from_int(-1), 2);
    }
}
