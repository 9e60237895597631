//! Graph input and output.
//!
//! Two formats are supported:
//!
//! * an edge-list text format, one edge per line as two whitespace-separated
//!   labels, with `v LABEL` declaring an isolated vertex and `#` starting a
//!   comment; labels are arbitrary tokens and are numbered in order of first
//!   appearance,
//! * graph6, the compact ASCII encoding used by most graph corpora (only the
//!   short form, up to 62 vertices).

use crate::error::{Error, Result};
use crate::graph::Graph;
use std::fmt::Write as _;

/// Mapping between external string labels and internal vertex indices.
#[derive(Clone, Debug, Default)]
pub struct LabelTable {
    labels: Vec<String>,
}

impl LabelTable {
    pub fn numeric(n: usize) -> LabelTable {
        LabelTable { labels: (0..n).map(|i| i.to_string()).collect() }
    }

    fn intern(&mut self, tok: &str) -> usize {
        if let Some(i) = self.labels.iter().position(|l| l == tok) {
            i
        } else {
            self.labels.push(tok.to_string());
            self.labels.len() - 1
        }
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Parse the edge-list text format.
pub fn parse_edge_list(text: &str) -> Result<(Graph, LabelTable)> {
    let mut table = LabelTable::default();
    let mut edges = Vec::new();
    let mut max_needed = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["v", lab] => {
                let i = table.intern(lab);
                max_needed = max_needed.max(i + 1);
            }
            [a, b] => {
                let u = table.intern(a);
                let v = table.intern(b);
                if u == v {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("self-loop on {a:?}"),
                    });
                }
                max_needed = max_needed.max(u + 1).max(v + 1);
                edges.push((u, v));
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `a b` or `v label`, got {line:?}"),
                })
            }
        }
    }
    let g = Graph::from_edges(max_needed, &edges)?;
    Ok((g, table))
}

/// Render a graph in the edge-list format, using the table's labels.
/// Every vertex is declared with a `v LABEL` line, in index order, before the
/// edges; re-parsing therefore interns labels in the original order and the
/// round trip is exact for densely labelled graphs.
pub fn write_edge_list(g: &Graph, table: &LabelTable) -> String {
    let mut out = String::new();
    for v in g.vertices().iter() {
        writeln!(out, "v {}", table.label(v)).unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", table.label(u), table.label(v)).unwrap();
    }
    out
}

/// Decode one graph6 line (short form, n <= 62).
pub fn parse_graph6(line: &str) -> Result<Graph> {
    let line = line.trim();
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(Error::Parse { line: 1, msg: "empty graph6 string".into() });
    }
    let n = (bytes[0] as usize).wrapping_sub(63);
    if bytes[0] < 63 || n > 62 {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported graph6 header byte {}", bytes[0]),
        });
    }
    let nbits = n.saturating_sub(1) * n / 2;
    let nbytes = nbits.div_ceil(6);
    if bytes.len() != 1 + nbytes {
        return Err(Error::Parse {
            line: 1,
            msg: format!("graph6 body length {} does not match order {n}", bytes.len() - 1),
        });
    }
    let mut g = Graph::empty(n)?;
    let mut bit = 0usize;
    for v in 1..n {
        for u in 0..v {
            let byte = bytes[1 + bit / 6];
            if !(63..127).contains(&byte) {
                return Err(Error::Parse { line: 1, msg: format!("bad graph6 byte {byte}") });
            }
            let chunk = byte - 63;
            if chunk >> (5 - bit % 6) & 1 == 1 {
                g.add_edge(u, v)?;
            }
            bit += 1;
        }
    }
    Ok(g)
}

/// Encode in graph6 (short form). The graph is packed first, so vertex labels
/// in the output are positions in the support.
pub fn write_graph6(g: &Graph) -> Result<String> {
    let (g, _) = g.to_dense();
    let n = g.vertex_count();
    if n > 62 {
        return Err(Error::TooManyVertices { n, max: 62 });
    }
    let mut out = String::new();
    out.push((n as u8 + 63) as char);
    let mut chunk = 0u8;
    let mut fill = 0;
    for v in 1..n {
        for u in 0..v {
            chunk = chunk << 1 | u8::from(g.has_edge(u, v));
            fill += 1;
            if fill == 6 {
                out.push((chunk + 63) as char);
                chunk = 0;
                fill = 0;
            }
        }
    }
    if fill > 0 {
        out.push(((chunk << (6 - fill)) + 63) as char);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn edge_list_round_trip_with_isolated() {
        let text = "# a triangle plus a floater\na b\nb c # closing\nc a\nv d\n";
        let (g, table) = parse_edge_list(text).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(table.label(3), "d");
        assert_eq!(g.isolated_vertex(), Some(3));
        let (g2, _) = parse_edge_list(&write_edge_list(&g, &table)).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(parse_edge_list("a b c\n").is_err());
        assert!(parse_edge_list("x x\n").is_err());
    }

    #[test]
    fn graph6_known_strings() {
        // oracle strings produced by the reference encoder:
        // K4 = "C~", P3 = "Bg", C5 = "Dhc" under the standard bit order
        let k4 = parse_graph6("C~").unwrap();
        assert_eq!(k4, family::complete(4).unwrap());
        let p3 = parse_graph6("Bg").unwrap();
        assert_eq!(p3.edges(), vec![(0, 1), (1, 2)]);
        let c5 = parse_graph6("Dhc").unwrap();
        assert_eq!(c5.edge_count(), 5);
        assert!(c5.vertices().iter().all(|v| c5.degree(v) == 2));
    }

    #[test]
    fn graph6_round_trip() {
        for g in [
            family::petersen(),
            family::complete(7).unwrap(),
            family::path(1).unwrap(),
            family::gnp(12, 0.3, 5).unwrap(),
            Graph::empty(0).unwrap(),
        ] {
            let s = write_graph6(&g).unwrap();
            assert_eq!(parse_graph6(&s).unwrap(), g);
        }
    }

    #[test]
    fn graph6_rejects_malformed() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("C~~").is_err());
        assert!(parse_graph6("C").is_err());
    }

    use crate::graph::Graph;
}
