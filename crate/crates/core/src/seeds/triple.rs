use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TripleSystemError {
    #[error("block {index} {block:?} is not a 3-set of points below {v}")]
    BadBlock { index: usize, block: [usize; 3], v: usize },
    #[error("pair ({0},{1}) lies in no block")]
    Uncovered(usize, usize),
    #[error("pair ({0},{1}) lies in more than one block")]
    Repeated(usize, usize),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// An `S(2,3,v)`: every pair of points lies in exactly one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSystem {
    v: usize,
    blocks: Vec<[usize; 3]>,
}

impl TripleSystem {
    pub fn new(v: usize, blocks: Vec<[usize; 3]>) -> Result<Self, TripleSystemError> {
        let mut seen = vec![false; v * v];
        for (index, b) in blocks.iter().enumerate() {
            let ok = b.iter().all(|&p| p < v) && b[0] != b[1] && b[0] != b[2] && b[1] != b[2];
            if !ok {
                return Err(TripleSystemError::BadBlock { index, block: *b, v });
            }
            for (x, y) in [(b[0], b[1]), (b[0], b[2]), (b[1], b[2])] {
                let (x, y) = (x.min(y), x.max(y));
                if seen[x * v + y] {
                    return Err(TripleSystemError::Repeated(x, y));
                }
                seen[x * v + y] = true;
            }
        }
        for x in 0..v {
            for y in x + 1..v {
                if !seen[x * v + y] {
                    return Err(TripleSystemError::Uncovered(x, y));
                }
            }
        }
        Ok(TripleSystem { v, blocks })
    }

    /// Text form: the point count on the first line, then one block per line
    /// as three 0-based point indices. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TripleSystemError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first, head) = lines.next().ok_or(TripleSystemError::Syntax { line: 1, msg: "empty input".into() })?;
        let v: usize = head
            .parse()
            .map_err(|_| TripleSystemError::Syntax { line: first, msg: format!("bad point count {head:?}") })?;
        let mut blocks = Vec::new();
        for (line, l) in lines {
            let nums: Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
            match nums {
                Ok(n) if n.len() == 3 => blocks.push([n[0], n[1], n[2]]),
                _ => return Err(TripleSystemError::Syntax { line, msg: format!("expected three indices, got {l:?}") }),
            }
        }
        TripleSystem::new(v, blocks)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.v);
        for b in &self.blocks {
            s.push_str(&format!("{} {} {}\n", b[0], b[1], b[2]));
        }
        s
    }

    pub fn points(&self) -> usize {
        self.v
    }

    pub fn blocks(&self) -> &[[usize; 3]] {
        &self.blocks
    }

    pub fn fano() -> Self {
        let b = vec![[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        TripleSystem::new(7, b).expect("Fano plane")
    }

    /// Lines of the affine plane `AG(2,3)`, point `(x,y)` numbered `3x + y`.
    pub fn affine_plane_3() -> Self {
        let mut blocks = Vec::new();
        let pt = |x: usize, y: usize| 3 * (x % 3) + y % 3;
        // slopes 0, 1, 2 through (0, c), and the vertical lines
        for m in 0..3 {
            for c in 0..3 {
                blocks.push([pt(0, c), pt(1, c + m), pt(2, c + 2 * m)]);
            }
        }
        for x in 0..3 {
            blocks.push([pt(x, 0), pt(x, 1), pt(x, 2)]);
        }
        TripleSystem::new(9, blocks).expect("AG(2,3)")
    }

    /// Develops base blocks cyclically modulo `v`.
    pub fn cyclic(v: usize, base: &[[usize; 3]]) -> Result<Self, TripleSystemError> {
        let blocks = base
            .iter()
            .flat_map(|b| (0..v).map(move |s| b.map(|p| (p + s) % v)))
            .collect();
        TripleSystem::new(v, blocks)
    }
}
