//! graph6 reading and writing.
//!
//! A record is a size header `N(n)` followed by the upper triangle of the
//! adjacency matrix in column order (`(0,1),(0,2),(1,2),(0,3),...`), packed six
//! bits per byte, most significant first, each byte offset by 63.

use std::io::BufRead;

use thiserror::Error;

use crate::graph::Graph;

pub const HEADER: &[u8] = b">>graph6<<";

const MAX_SMALL: usize = 62;
const MAX_MEDIUM: usize = 258_047;
const MAX_LARGE: usize = 68_719_476_735;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("empty record")]
    Empty,
    #[error("malformed size header at byte {offset}")]
    MalformedHeader { offset: usize },
    #[error("non-printable byte {byte:#04x} at byte {offset}")]
    NonPrintable { offset: usize, byte: u8 },
    #[error("truncated bit stream: expected {expected} data bytes, found {found} (ends at byte {offset})")]
    Truncated { offset: usize, expected: usize, found: usize },
    #[error("trailing garbage at byte {offset}")]
    TrailingGarbage { offset: usize },
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: Graph6Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn data_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

/// Parses one graph6 record. A leading `>>graph6<<` header and a single
/// trailing `\n` or `\r\n` are accepted.
pub fn parse_graph6(text: &[u8]) -> Result<Graph, Graph6Error> {
    let mut start = 0;
    if text.starts_with(HEADER) {
        start = HEADER.len();
    }
    let mut end = text.len();
    if end > start && text[end - 1] == b'\n' {
        end -= 1;
        if end > start && text[end - 1] == b'\r' {
            end -= 1;
        }
    }
    let rec = &text[start..end];
    if rec.is_empty() {
        return Err(Graph6Error::Empty);
    }
    for (i, &b) in rec.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(Graph6Error::NonPrintable { offset: start + i, byte: b });
        }
    }

    let (n, hlen) = parse_size(rec).map_err(|o| Graph6Error::MalformedHeader { offset: start + o })?;
    let data = &rec[hlen..];
    let need = data_len(n);
    if data.len() < need {
        return Err(Graph6Error::Truncated { offset: start + rec.len(), expected: need, found: data.len() });
    }
    if data.len() > need {
        return Err(Graph6Error::TrailingGarbage { offset: start + hlen + need });
    }

    let mut g = Graph::empty(n);
    let mut k = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = data[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.set_edge(i, j, true);
            }
            k += 1;
        }
    }
    // padding bits must be zero
    if !k.is_multiple_of(6) {
        let last = data[need - 1] - 63;
        if last & ((1u8 << (6 - k % 6)) - 1) != 0 {
            return Err(Graph6Error::TrailingGarbage { offset: start + hlen + need - 1 });
        }
    }
    Ok(g)
}

// Returns (n, header length) or the offending offset.
fn parse_size(rec: &[u8]) -> Result<(usize, usize), usize> {
    let six = |bytes: &[u8]| bytes.iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
    if rec[0] != 126 {
        return Ok(((rec[0] - 63) as usize, 1));
    }
    if rec.len() < 4 {
        return Err(rec.len());
    }
    if rec[1] != 126 {
        let n = six(&rec[1..4]);
        if n <= MAX_SMALL {
            return Err(1);
        }
        return Ok((n, 4));
    }
    if rec.len() < 8 {
        return Err(rec.len());
    }
    let n = six(&rec[2..8]);
    if n <= MAX_MEDIUM {
        return Err(2);
    }
    Ok((n, 8))
}

fn push_size(out: &mut Vec<u8>, n: usize) {
    assert!(n <= MAX_LARGE, "graph too large for graph6");
    if n <= MAX_SMALL {
        out.push(n as u8 + 63);
    } else if n <= MAX_MEDIUM {
        out.push(126);
        for s in [12, 6, 0] {
            out.push(((n >> s) & 63) as u8 + 63);
        }
    } else {
        out.extend_from_slice(&[126, 126]);
        for s in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> s) & 63) as u8 + 63);
        }
    }
}

/// Encodes `g` as a graph6 record without header or line terminator.
pub fn emit_graph6(g: &Graph) -> Vec<u8> {
    let n = g.n();
    let mut out = Vec::with_capacity(8 + data_len(n));
    push_size(&mut out, n);
    let mut acc = 0u8;
    let mut k = 0usize;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push(acc + 63);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push((acc << (6 - k)) + 63);
    }
    out
}

pub fn emit_graph6_string(g: &Graph) -> String {
    // every byte is in 63..=126
    String::from_utf8(emit_graph6(g)).expect("graph6 is ASCII")
}

/// Reads a multi-graph file: one record per line, optional header on the first
/// line, blank lines skipped. Errors carry the 1-based line number.
pub fn read_graph6_lines(reader: impl BufRead) -> Result<Vec<Graph>, ReadError> {
    let mut out = Vec::new();
    for (idx, line) in reader.split(b'\n').enumerate() {
        let mut line = line?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        if line.is_empty() {
            continue;
        }
        let rec: &[u8] = if idx == 0 && line.starts_with(HEADER) { &line[HEADER.len()..] } else { &line };
        if rec.is_empty() {
            continue;
        }
        let g = parse_graph6(rec).map_err(|source| ReadError::Parse { line: idx + 1, source })?;
        out.push(g);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let k2 = parse_graph6(b"A_").unwrap();
        assert_eq!(k2.n(), 2);
        assert!(k2.has_edge(0, 1));
        assert_eq!(emit_graph6(&k2), b"A_");

        let e5 = parse_graph6(b"D??").unwrap();
        assert_eq!(e5, Graph::empty(5));
        assert_eq!(emit_graph6(&Graph::empty(5)), b"D??");

        assert_eq!(emit_graph6(&Graph::empty(0)), b"?");
        assert_eq!(parse_graph6(b"?").unwrap().n(), 0);
        // the standard example from the format description
        let g = Graph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(emit_graph6(&g), b"DQc");
    }

    #[test]
    fn header_and_newline_tolerated() {
        assert_eq!(parse_graph6(b">>graph6<<A_\n").unwrap(), Graph::complete(2));
        assert_eq!(parse_graph6(b"A_\r\n").unwrap(), Graph::complete(2));
    }

    #[test]
    fn medium_header() {
        let g = Graph::cycle(63);
        let s = emit_graph6(&g);
        assert_eq!(&s[..4], b"~??~");
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    #[test]
    fn errors_name_offsets() {
        assert_eq!(parse_graph6(b""), Err(Graph6Error::Empty));
        assert_eq!(parse_graph6(b"D? ?"), Err(Graph6Error::NonPrintable { offset: 2, byte: b' ' }));
        assert_eq!(
            parse_graph6(b"D?"),
            Err(Graph6Error::Truncated { offset: 2, expected: 2, found: 1 })
        );
        assert_eq!(parse_graph6(b"D???"), Err(Graph6Error::TrailingGarbage { offset: 3 }));
        // K2 with a stray padding bit
        assert_eq!(parse_graph6(b"A`"), Err(Graph6Error::TrailingGarbage { offset: 1 }));
        assert_eq!(parse_graph6(b"~?"), Err(Graph6Error::MalformedHeader { offset: 2 }));
        // a long header for n = 5 is not canonical
        assert_eq!(parse_graph6(b"~??D??"), Err(Graph6Error::MalformedHeader { offset: 1 }));
    }

    #[test]
    fn multi_line_reader() {
        let text = b">>graph6<<A_\nD??\n\nBw\n";
        let gs = read_graph6_lines(&text[..]).unwrap();
        assert_eq!(gs.len(), 3);
        assert_eq!(gs[2], Graph::complete(3));
        let bad = b"A_\nD?\n";
        match read_graph6_lines(&bad[..]) {
            Err(ReadError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..140).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
                let mut it = bits.into_iter();
                Graph::from_fn(n, |_, _| it.next().unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn roundtrip(g in arb_graph()) {
            let s = emit_graph6(&g);
            prop_assert!(s.iter().all(|b| (63..=126).contains(b)));
            prop_assert_eq!(parse_graph6(&s).unwrap(), g);
        }
    }
}
