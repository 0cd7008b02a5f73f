//! Strongly regular graph parameters, verification and spectra.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SrgParams {
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl SrgParams {
    pub const fn new(n: usize, k: usize, lambda: usize, mu: usize) -> Self {
        SrgParams { n, k, lambda, mu }
    }

    /// `k(k - λ - 1) = (n - k - 1)μ` together with the range conditions.
    pub fn is_feasible(&self) -> bool {
        let SrgParams { n, k, lambda, mu } = *self;
        lambda < k && k < n && mu <= k && k * (k - lambda - 1) == (n - k - 1) * mu
    }

    pub fn complement(&self) -> SrgParams {
        let SrgParams { n, k, lambda, mu } = *self;
        SrgParams { n, k: n - k - 1, lambda: n - 2 * k + mu - 2, mu: n - 2 * k + lambda }
    }
}

impl fmt::Display for SrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.n, self.k, self.lambda, self.mu)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotSrg {
    #[error("graph on {0} vertices is too small")]
    TooSmall(usize),
    #[error("degenerate: the graph is {0}")]
    Degenerate(&'static str),
    #[error("irregular: vertex {vertex} has degree {degree}, vertex 0 has {expected}")]
    Irregular { vertex: usize, degree: usize, expected: usize },
    #[error("adjacent pair ({u},{v}) has {got} common neighbours, expected {expected}")]
    Lambda { u: usize, v: usize, got: usize, expected: usize },
    #[error("non-adjacent pair ({u},{v}) has {got} common neighbours, expected {expected}")]
    Mu { u: usize, v: usize, got: usize, expected: usize },
}

/// Returns the parameters of `g` if it is a (non-degenerate) strongly regular
/// graph, otherwise the first violation found scanning pairs `u < v` in
/// lexicographic order.
pub fn verify_srg(g: &Graph) -> Result<SrgParams, NotSrg> {
    let n = g.n();
    if n < 3 {
        return Err(NotSrg::TooSmall(n));
    }
    let k = g.degree(0);
    for v in 1..n {
        let d = g.degree(v);
        if d != k {
            return Err(NotSrg::Irregular { vertex: v, degree: d, expected: k });
        }
    }
    if k == 0 {
        return Err(NotSrg::Degenerate("empty"));
    }
    if k == n - 1 {
        return Err(NotSrg::Degenerate("complete"));
    }
    let mut lambda = None;
    let mut mu = None;
    for u in 0..n {
        for v in u + 1..n {
            let c = g.common_count(u, v);
            if g.has_edge(u, v) {
                match lambda {
                    None => lambda = Some(c),
                    Some(l) if l != c => return Err(NotSrg::Lambda { u, v, got: c, expected: l }),
                    _ => {}
                }
            } else {
                match mu {
                    None => mu = Some(c),
                    Some(m) if m != c => return Err(NotSrg::Mu { u, v, got: c, expected: m }),
                    _ => {}
                }
            }
        }
    }
    // both are set since 0 < k < n-1
    Ok(SrgParams { n, k, lambda: lambda.unwrap(), mu: mu.unwrap() })
}

/// A number `(a + b·√d) / 2` with `d` square-free-or-not but never a perfect
/// square when `b != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticValue {
    pub a: i64,
    pub b: i64,
    pub d: u64,
}

impl QuadraticValue {
    pub fn integer(v: i64) -> Self {
        QuadraticValue { a: 2 * v, b: 0, d: 0 }
    }

    pub fn as_integer(&self) -> Option<i64> {
        (self.b == 0 && self.a % 2 == 0).then_some(self.a / 2)
    }

    pub fn approx(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / 2.0
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None if self.b == 0 => write!(f, "{}/2", self.a),
            None => {
                let sign = if self.b < 0 { '-' } else { '+' };
                let b = self.b.unsigned_abs();
                if b == 1 {
                    write!(f, "({}{}√{})/2", self.a, sign, self.d)
                } else {
                    write!(f, "({}{}{}√{})/2", self.a, sign, b, self.d)
                }
            }
        }
    }
}

/// Eigenvalues `k`, `r`, `s` with multiplicities `1`, `f`, `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub k: i64,
    pub r: QuadraticValue,
    pub f: u64,
    pub s: QuadraticValue,
    pub g: u64,
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^1, {}^{}, {}^{}", self.k, self.r, self.f, self.s, self.g)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("parameters {0} violate k(k-λ-1) = (n-k-1)μ or the range conditions")]
    Infeasible(SrgParams),
    #[error("parameters {0} give non-integral eigenvalue multiplicities")]
    NonIntegral(SrgParams),
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Exact eigenvalues and multiplicities from the parameters alone.
pub fn srg_spectrum(p: SrgParams) -> Result<Spectrum, SpectrumError> {
    if !p.is_feasible() {
        return Err(SpectrumError::Infeasible(p));
    }
    let (n, k, l, m) = (p.n as i64, p.k as i64, p.lambda as i64, p.mu as i64);
    let disc = ((l - m) * (l - m) + 4 * (k - m)) as u64;
    let root = isqrt(disc);
    if root * root == disc {
        let root = root as i64;
        let r = (l - m + root) / 2;
        let s = (l - m - root) / 2;
        let num_f = -k - (n - 1) * s;
        let num_g = k + (n - 1) * r;
        let den = r - s;
        if num_f < 0 || num_g < 0 || num_f % den != 0 || num_g % den != 0 {
            return Err(SpectrumError::NonIntegral(p));
        }
        Ok(Spectrum {
            k,
            r: QuadraticValue::integer(r),
            f: (num_f / den) as u64,
            s: QuadraticValue::integer(s),
            g: (num_g / den) as u64,
        })
    } else {
        // irrational eigenvalues force the conference case f = g
        if 2 * k + (n - 1) * (l - m) != 0 || (n - 1) % 2 != 0 {
            return Err(SpectrumError::NonIntegral(p));
        }
        let half = ((n - 1) / 2) as u64;
        Ok(Spectrum {
            k,
            r: QuadraticValue { a: l - m, b: 1, d: disc },
            f: half,
            s: QuadraticValue { a: l - m, b: -1, d: disc },
            g: half,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon() {
        let p = verify_srg(&Graph::cycle(5)).unwrap();
        assert_eq!(p, SrgParams::new(5, 2, 0, 1));
        let s = srg_spectrum(p).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!((s.f, s.g), (2, 2));
        assert_eq!(s.r, QuadraticValue { a: -1, b: 1, d: 5 });
        assert_eq!(s.s, QuadraticValue { a: -1, b: -1, d: 5 });
        assert_eq!(s.to_string(), "2^1, (-1+√5)/2^2, (-1-√5)/2^2");
        assert!((s.r.approx() - 0.618034).abs() < 1e-5);
    }

    #[test]
    fn degenerate_and_irregular() {
        assert_eq!(verify_srg(&Graph::path(3)), Err(NotSrg::Irregular { vertex: 1, degree: 2, expected: 1 }));
        assert_eq!(verify_srg(&Graph::complete(5)), Err(NotSrg::Degenerate("complete")));
        assert_eq!(verify_srg(&Graph::empty(5)), Err(NotSrg::Degenerate("empty")));
        assert_eq!(verify_srg(&Graph::complete(2)), Err(NotSrg::TooSmall(2)));
    }

    #[test]
    fn first_violating_pair() {
        // C6 is regular; (0,2) has one common neighbour, (0,3) has none
        assert_eq!(verify_srg(&Graph::cycle(6)), Err(NotSrg::Mu { u: 0, v: 3, got: 0, expected: 1 }));
    }

    #[test]
    fn spectrum_sp62() {
        let s = srg_spectrum(SrgParams::new(63, 30, 13, 15)).unwrap();
        assert_eq!(s.to_string(), "30^1, 3^35, -5^27");
    }

    // f, g from 1 + f + g = n and k + f r + g s = 0, cross-checked with
    // trace(A^2) = k^2 + f r^2 + g s^2 = n k.
    #[test]
    fn spectrum_81_30_9_12_by_linear_conditions() {
        let (n, k) = (81i64, 30i64);
        let (r, s) = (3i64, -6i64); // roots of x^2 + 3x - 18
        let mut found = None;
        for f in 0..n {
            let g = n - 1 - f;
            if k + f * r + g * s == 0 {
                found = Some((f, g));
            }
        }
        let (f, g) = found.unwrap();
        assert_eq!((f, g), (50, 30));
        assert_eq!(k * k + f * r * r + g * s * s, n * k);
        let sp = srg_spectrum(SrgParams::new(81, 30, 9, 12)).unwrap();
        assert_eq!((sp.r.as_integer(), sp.f, sp.s.as_integer(), sp.g), (Some(3), 50, Some(-6), 30));
    }

    #[test]
    fn infeasible() {
        assert!(matches!(srg_spectrum(SrgParams::new(85, 30, 3, 5)), Err(SpectrumError::Infeasible(_))));
        assert!(srg_spectrum(SrgParams::new(85, 20, 3, 5)).is_ok());
        // feasible identity but no integral multiplicities: the k = 4 Moore graph
        assert_eq!(
            srg_spectrum(SrgParams::new(17, 4, 0, 1)),
            Err(SpectrumError::NonIntegral(SrgParams::new(17, 4, 0, 1)))
        );
    }

    #[test]
    fn complement_params() {
        assert_eq!(SrgParams::new(64, 28, 12, 12).complement(), SrgParams::new(64, 35, 18, 20));
        assert_eq!(SrgParams::new(70, 27, 12, 9).complement(), SrgParams::new(70, 42, 23, 28));
    }
}
