use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Edge, Hypergraph};
use crate::error::{Error, Result};

/// Options for hyperedge ingestion.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Reject a hyperedge that repeats a node instead of collapsing it.
    pub strict: bool,
}

/// Maps arbitrary string labels to dense indices in order of first use.
#[derive(Default)]
struct LabelInterner {
    index: HashMap<String, usize>,
    labels: Vec<String>,
}

impl LabelInterner {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.to_owned(), i);
        self.labels.push(label.to_owned());
        i
    }

    fn finish(self, edges: Vec<Edge>) -> Result<Hypergraph> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = self.labels.len();
        Hypergraph::new(n, edges, self.labels)
    }
}

/// Collapses repeated labels inside one hyperedge, or rejects them in strict mode.
fn unique_tokens(tokens: Vec<&str>, line: usize, strict: bool) -> Result<Vec<&str>> {
    let mut seen: Vec<&str> = Vec::with_capacity(tokens.len());
    for t in tokens {
        if seen.contains(&t) {
            if strict {
                return Err(Error::parse(line, format!("node '{t}' repeated in hyperedge")));
            }
            continue;
        }
        seen.push(t);
    }
    Ok(seen)
}

/// Reads one hyperedge per line, labels separated by spaces or tabs.
///
/// Lines starting with `#` and blank lines are ignored. Singleton edges are
/// dropped before labels are interned, so nodes that only occur in
/// singletons do not enter the node universe.
pub fn read_edge_list<R: BufRead>(reader: R, opts: LoadOptions) -> Result<Hypergraph> {
    let mut interner = LabelInterner::default();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split([' ', '\t']).filter(|t| !t.is_empty()).collect();
        let tokens = unique_tokens(tokens, lineno + 1, opts.strict)?;
        if tokens.len() < 2 {
            continue;
        }
        edges.push(tokens.iter().map(|t| interner.intern(t)).collect());
    }
    interner.finish(edges)
}

/// Reads the two-file simplicial format: `nverts` holds one edge order per
/// line and `simplices` the flattened node labels of all edges.
pub fn read_simplicial<R1: BufRead, R2: BufRead>(
    nverts: R1,
    simplices: R2,
    opts: LoadOptions,
) -> Result<Hypergraph> {
    let mut sizes = Vec::new();
    for (lineno, line) in nverts.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let k: usize = t
            .parse()
            .map_err(|_| Error::parse(lineno + 1, format!("expected an edge order, found '{t}'")))?;
        sizes.push(k);
    }
    let mut nodes: Vec<(usize, String)> = Vec::new();
    for (lineno, line) in simplices.lines().enumerate() {
        let line = line?;
        for tok in line.split_whitespace() {
            nodes.push((lineno + 1, tok.to_owned()));
        }
    }
    let total: usize = sizes.iter().sum();
    if total != nodes.len() {
        return Err(Error::parse(
            nodes.len().min(total) + 1,
            format!("orders sum to {total} but {} node labels were supplied", nodes.len()),
        ));
    }
    let mut interner = LabelInterner::default();
    let mut edges = Vec::with_capacity(sizes.len());
    let mut cursor = 0;
    for &k in &sizes {
        let chunk = &nodes[cursor..cursor + k];
        cursor += k;
        let line = chunk.first().map_or(0, |c| c.0);
        let tokens = unique_tokens(chunk.iter().map(|c| c.1.as_str()).collect(), line, opts.strict)?;
        if tokens.len() < 2 {
            continue;
        }
        edges.push(tokens.iter().map(|t| interner.intern(t)).collect());
    }
    interner.finish(edges)
}

/// Writes edges using the original labels, one hyperedge per line.
pub fn write_edge_list<W: Write>(h: &Hypergraph, mut w: W) -> Result<()> {
    for e in h.edges() {
        let line: Vec<&str> = e.iter().map(|&v| h.label(v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Writes the `index,label` table for a hypergraph.
pub fn write_label_map<W: Write>(h: &Hypergraph, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "label"])?;
    for (i, l) in h.labels().iter().enumerate() {
        out.write_record([i.to_string().as_str(), l.as_str()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<Hypergraph> {
        read_edge_list(s.as_bytes(), LoadOptions::default())
    }

    #[test]
    fn dedups_and_sorts_edges() {
        let h = load("a b\nb c a\na b\n").unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges(), &[vec![0, 1], vec![0, 1, 2]]);
        let r = h.order_range().unwrap();
        assert_eq!((r.min(), r.max()), (2, 3));
    }

    #[test]
    fn simplicial_triple() {
        let h = read_simplicial("2\n3\n".as_bytes(), "0\n1\n1\n2\n3\n".as_bytes(), LoadOptions::default())
            .unwrap();
        assert_eq!(h.edges(), &[vec![0, 1], vec![1, 2, 3]]);
        assert_eq!(h.labels(), &["0", "1", "2", "3"]);
    }

    #[test]
    fn simplicial_length_mismatch() {
        let err = read_simplicial("2\n3\n".as_bytes(), "0\n1\n2\n".as_bytes(), LoadOptions::default());
        assert!(matches!(err, Err(Error::Parse { .. })));
    }

    #[test]
    fn repeated_node_collapses_or_errors() {
        let h = load("a a b\n").unwrap();
        assert_eq!(h.edges(), &[vec![0, 1]]);
        let strict = read_edge_list("x y\na a b\n".as_bytes(), LoadOptions { strict: true });
        match strict {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_singletons_and_tabs() {
        let h = load("# header\nsolo\na\tb\n\nb  c\n").unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.m(), 2);
        assert_eq!(h.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn empty_input_is_error() {
        assert!(matches!(load("# nothing\nx\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn malformed_order_reports_line() {
        let err = read_simplicial("2\nx\n".as_bytes(), "0\n1\n".as_bytes(), LoadOptions::default());
        match err {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn write_then_read_is_identity() {
        let h = load("p q r\nq s\nr p\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&h, &mut buf).unwrap();
        let again = read_edge_list(buf.as_slice(), LoadOptions::default()).unwrap();
        let relabel = |g: &Hypergraph| {
            let mut v: Vec<Vec<String>> = g
                .edges()
                .iter()
                .map(|e| {
                    let mut l: Vec<String> = e.iter().map(|&x| g.label(x).to_owned()).collect();
                    l.sort();
                    l
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(relabel(&h), relabel(&again));
    }
}
