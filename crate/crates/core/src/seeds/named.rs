use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use super::{
    bilin_graph, gq53_point_graph, load_appendix_seed, sp_graph, sts_block_graph, vno_minus_4_3, vno_plus_4_3,
    vo_minus_f2, vo_plus_64_seed, AppendixSeed, QuadraticFormSpec, SeedError, TripleSystem,
};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum SeedParseError {
    #[error("unknown seed {0:?}; known: sp, vo-, vo+, vno-, vno+, bilin, gq53, appendix, sts")]
    Unknown(String),
    #[error("seed {name} expects {expected}")]
    Arity { name: String, expected: &'static str },
    #[error("bad number {0:?}")]
    Number(String),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Triple(#[from] super::TripleSystemError),
}

/// A constructor name plus parameters, the reproducible identity of a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedSeed {
    Sp { d: usize, q: usize },
    VoMinus { dim: usize, q: usize },
    VoPlus { dim: usize, q: usize },
    VnoMinus { dim: usize, q: usize },
    VnoPlus { dim: usize, q: usize },
    Bilin { q: usize, m: usize },
    Gq53,
    Appendix(AppendixSeed),
    Sts(PathBuf),
}

impl NamedSeed {
    /// Parses tokens such as `["sp", "3", "2"]` or `["appendix", "sts19-srg57"]`.
    pub fn parse<S: AsRef<str>>(tokens: &[S]) -> Result<Self, SeedParseError> {
        let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let (&name, args) = toks.split_first().ok_or_else(|| SeedParseError::Unknown(String::new()))?;
        let nums = || -> Result<Vec<usize>, SeedParseError> {
            args.iter().map(|a| a.parse().map_err(|_| SeedParseError::Number(a.to_string()))).collect()
        };
        let two = |expected| -> Result<(usize, usize), SeedParseError> {
            match nums()?.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(SeedParseError::Arity { name: name.to_string(), expected }),
            }
        };
        Ok(match name {
            "sp" => {
                let (d, q) = two("<d> <q>")?;
                NamedSeed::Sp { d, q }
            }
            "vo-" => {
                let (dim, q) = two("<2d> <q>")?;
                NamedSeed::VoMinus { dim, q }
            }
            "vo+" => {
                let (dim, q) = two("<2d> <q>")?;
                NamedSeed::VoPlus { dim, q }
            }
            "vno-" => {
                let (dim, q) = two("<dim> <q>")?;
                NamedSeed::VnoMinus { dim, q }
            }
            "vno+" => {
                let (dim, q) = two("<dim> <q>")?;
                NamedSeed::VnoPlus { dim, q }
            }
            "bilin" => {
                let (q, m) = two("<q> <m>")?;
                NamedSeed::Bilin { q, m }
            }
            "gq53" if args.is_empty() => NamedSeed::Gq53,
            "gq53" => return Err(SeedParseError::Arity { name: name.into(), expected: "no arguments" }),
            "appendix" => match args {
                [s] => NamedSeed::Appendix(AppendixSeed::from_name(s).ok_or_else(|| SeedParseError::Unknown(s.to_string()))?),
                _ => return Err(SeedParseError::Arity { name: name.into(), expected: "<sts19-srg57|sts21-srg70|haemers4-srg96>" }),
            },
            "sts" => match args {
                [p] => NamedSeed::Sts(PathBuf::from(p)),
                _ => return Err(SeedParseError::Arity { name: name.into(), expected: "<triple-system file>" }),
            },
            other => return Err(SeedParseError::Unknown(other.to_string())),
        })
    }

    pub fn build(&self) -> Result<Graph, SeedParseError> {
        let unsupported = |what: &str| SeedParseError::Seed(SeedError::Unsupported(what.to_string()));
        Ok(match *self {
            NamedSeed::Sp { d, q } => sp_graph(d, q)?,
            NamedSeed::VoMinus { dim, q } if q == 2 && dim % 2 == 0 && dim >= 2 => vo_minus_f2(dim)?,
            NamedSeed::VoMinus { .. } => return Err(unsupported("vo- is built over GF(2) in even dimension")),
            NamedSeed::VoPlus { dim: 6, q: 2 } => vo_plus_64_seed(),
            NamedSeed::VoPlus { dim, q } if q == 2 && dim % 2 == 0 && dim >= 2 => {
                super::affine_orthogonal_graph(&QuadraticFormSpec::hyperbolic(dim), 2, 1)?
            }
            NamedSeed::VoPlus { .. } => return Err(unsupported("vo+ is built over GF(2) in even dimension")),
            NamedSeed::VnoMinus { dim: 4, q: 3 } => vno_minus_4_3(),
            NamedSeed::VnoPlus { dim: 4, q: 3 } => vno_plus_4_3(),
            NamedSeed::VnoMinus { .. } | NamedSeed::VnoPlus { .. } => return Err(unsupported("vno± is available for dim 4, q 3")),
            NamedSeed::Bilin { q, m } => bilin_graph(q, m)?,
            NamedSeed::Gq53 => gq53_point_graph(),
            NamedSeed::Appendix(s) => load_appendix_seed(s),
            NamedSeed::Sts(ref path) => {
                let text = std::fs::read_to_string(path).map_err(|source| SeedParseError::Io { path: path.clone(), source })?;
                sts_block_graph(&TripleSystem::parse(&text)?)
            }
        })
    }
}

impl fmt::Display for NamedSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedSeed::Sp { d, q } => write!(f, "sp {d} {q}"),
            NamedSeed::VoMinus { dim, q } => write!(f, "vo- {dim} {q}"),
            NamedSeed::VoPlus { dim, q } => write!(f, "vo+ {dim} {q}"),
            NamedSeed::VnoMinus { dim, q } => write!(f, "vno- {dim} {q}"),
            NamedSeed::VnoPlus { dim, q } => write!(f, "vno+ {dim} {q}"),
            NamedSeed::Bilin { q, m } => write!(f, "bilin {q} {m}"),
            NamedSeed::Gq53 => write!(f, "gq53"),
            NamedSeed::Appendix(s) => write!(f, "appendix {}", s.name()),
            NamedSeed::Sts(p) => write!(f, "sts {}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for text in ["sp 3 2", "vo- 6 2", "vo+ 6 2", "vno- 4 3", "vno+ 4 3", "bilin 3 4", "gq53", "appendix sts21-srg70"] {
            let toks: Vec<&str> = text.split(' ').collect();
            let s = NamedSeed::parse(&toks).unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!(matches!(NamedSeed::parse(&["sp", "3"]), Err(SeedParseError::Arity { .. })));
        assert!(matches!(NamedSeed::parse(&["petersen"]), Err(SeedParseError::Unknown(_))));
        assert!(matches!(NamedSeed::parse(&["sp", "x", "2"]), Err(SeedParseError::Number(_))));
        assert!(NamedSeed::parse(&["vno-", "6", "3"]).unwrap().build().is_err());
    }
}
