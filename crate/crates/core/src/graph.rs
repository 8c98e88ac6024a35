//! Immutable weighted undirected graph in compressed adjacency form, plus
//! edge-list ingestion and emission.
//!
//! Input lines are `src dst [weight]` with arbitrary non-negative integer
//! labels. Internal ids are dense (`0..node_count`) and assigned in
//! ascending label order, so writing a graph back out and re-parsing it
//! reproduces the same ids.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    labels: Vec<u64>,
    index: FxHashMap<u64, NodeId>,
    edge_count: usize,
}

/// Counters collected while reading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Iterator over `(neighbor, weight)` pairs in ascending neighbor order.
#[derive(Debug, Clone)]
pub struct Neighbors<'a> {
    targets: std::slice::Iter<'a, NodeId>,
    weights: std::slice::Iter<'a, f64>,
}

impl Iterator for Neighbors<'_> {
    type Item = (NodeId, f64);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        Some((*self.targets.next()?, *self.weights.next()?))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.targets.size_hint()
    }
}

impl ExactSizeIterator for Neighbors<'_> {}

impl Graph {
    /// Builds a graph over nodes labelled `0..node_count` from undirected
    /// edges given as internal ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut builder = GraphBuilder::default();
        for v in 0..node_count {
            builder.add_node(v as u64);
        }
        for (u, v, w) in edges {
            if u >= node_count {
                return Err(Error::InvalidNode(u));
            }
            if v >= node_count {
                return Err(Error::InvalidNode(v));
            }
            builder.add_edge(u as u64, v as u64, w)?;
        }
        builder.build()
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct undirected edges (m).
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn total_weight(&self) -> f64 {
        self.degrees.iter().sum::<f64>() / 2.0
    }

    pub fn neighbors(&self, node: NodeId) -> Result<Neighbors<'_>> {
        if node >= self.node_count() {
            return Err(Error::InvalidNode(node));
        }
        Ok(self.adj(node))
    }

    /// Unchecked variant of [`Graph::neighbors`]; panics on an invalid id.
    #[inline]
    pub fn adj(&self, node: NodeId) -> Neighbors<'_> {
        let range = self.offsets[node]..self.offsets[node + 1];
        Neighbors {
            targets: self.targets[range.clone()].iter(),
            weights: self.weights[range].iter(),
        }
    }

    #[inline]
    pub fn neighbor_ids(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Number of distinct neighbours, ignoring weights.
    #[inline]
    pub fn neighbor_count(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    #[inline]
    pub fn weighted_degree(&self, node: NodeId) -> f64 {
        self.degrees[node]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn label(&self, node: NodeId) -> u64 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn node_of_label(&self, label: u64) -> Option<NodeId> {
        self.index.get(&label).copied()
    }

    /// Weight of edge `(u, v)`, if present.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let ids = self.neighbor_ids(u);
        ids.binary_search(&v)
            .ok()
            .map(|i| self.weights[self.offsets[u] + i])
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in ascending
    /// order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.adj(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }
}

/// Accumulates labelled edges, symmetrising and summing duplicates.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<u64>,
    edges: FxHashMap<(u64, u64), f64>,
    stats: ParseStats,
}

impl GraphBuilder {
    pub fn add_node(&mut self, label: u64) {
        self.nodes.insert(label);
    }

    pub fn add_edge(&mut self, a: u64, b: u64, weight: f64) -> Result<()> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "edge weight must be a finite non-negative number, got {weight}"
            )));
        }
        self.nodes.insert(a);
        self.nodes.insert(b);
        if a == b {
            self.stats.self_loops_dropped += 1;
            return Ok(());
        }
        let key = (a.min(b), a.max(b));
        match self.edges.get_mut(&key) {
            Some(w) => {
                *w += weight;
                self.stats.duplicates_merged += 1;
            }
            None => {
                self.edges.insert(key, weight);
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    pub fn build(self) -> Result<Graph> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let labels: Vec<u64> = self.nodes.into_iter().collect();
        let index: FxHashMap<u64, NodeId> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let n = labels.len();

        let mut arcs: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(self.edges.len() * 2);
        for (&(a, b), &w) in &self.edges {
            let (u, v) = (index[&a], index[&b]);
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        arcs.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets: Vec<NodeId> = arcs.iter().map(|a| a.1).collect();
        let weights: Vec<f64> = arcs.iter().map(|a| a.2).collect();
        let degrees: Vec<f64> = (0..n)
            .map(|u| weights[offsets[u]..offsets[u + 1]].iter().sum())
            .collect();

        Ok(Graph {
            offsets,
            targets,
            weights,
            degrees,
            labels,
            index,
            edge_count: self.edges.len(),
        })
    }
}

/// Reads a whitespace-separated edge list. `#` lines and blank lines are
/// skipped; the weight column is optional and defaults to 1.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    parse_edge_list_with_stats(reader).map(|(g, _)| g)
}

pub fn parse_edge_list_with_stats<R: BufRead>(reader: R) -> Result<(Graph, ParseStats)> {
    let mut builder = GraphBuilder::default();
    let mut lines = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines += 1;
        let mut tokens = trimmed.split_whitespace();
        let parse_label = |tok: Option<&str>, what: &str| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing {what} node"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid {what} node label {tok:?}"),
            })
        };
        let src = parse_label(tokens.next(), "source")?;
        let dst = parse_label(tokens.next(), "target")?;
        let weight = match tokens.next() {
            None => 1.0,
            Some(tok) => {
                let w = tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight {tok:?}"),
                })?;
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("weight must be finite and non-negative, got {tok}"),
                    });
                }
                w
            }
        };
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("unexpected token {extra:?}"),
            });
        }
        builder.add_edge(src, dst, weight)?;
    }
    let mut stats = builder.stats();
    stats.lines = lines;
    if stats.self_loops_dropped > 0 {
        log::warn!("dropped {} self-loop(s)", stats.self_loops_dropped);
    }
    Ok((builder.build()?, stats))
}

/// Writes each undirected edge once as `src dst weight` using the original
/// labels. Isolated nodes are not representable and are skipped.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for (u, v, w) in graph.edges() {
        writeln!(out, "{} {} {}", graph.label(u), graph.label(v), w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Graph {
        parse_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn two_edge_path() {
        let g = parse("1 2\n2 3");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let b = g.node_of_label(2).unwrap();
        assert_eq!(g.weighted_degree(b), 2.0);
        assert!(g.edges().all(|(_, _, w)| w == 1.0));
    }

    #[test]
    fn duplicate_lines_sum_weights() {
        let g = parse("1 2 0.5\n1 2 0.5");
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(1.0));
    }

    #[test]
    fn reversed_duplicate_is_the_same_edge() {
        let (g, stats) = parse_edge_list_with_stats("1 2 2\n2 1 3".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(1, 0), Some(5.0));
        assert_eq!(stats.duplicates_merged, 1);
    }

    #[test]
    fn self_loop_dropped_but_node_kept() {
        let (g, stats) = parse_edge_list_with_stats("1 1".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(stats.self_loops_dropped, 1);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse("# header\n\n10 20\n  # indented comment\n20 30 2.5\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.labels(), &[10, 20, 30]);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        for (text, line) in [("1 2\nx 3", 2), ("1 2 -1", 1), ("1", 1), ("1 2 3 4", 1), ("1 2 nan", 1)] {
            match parse_edge_list(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_edge_list("".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(parse_edge_list("# only\n".as_bytes()), Err(Error::EmptyInput)));
    }

    #[test]
    fn neighbors_are_sorted_with_weights() {
        let g = parse("1 2\n2 3");
        let n: Vec<_> = g.neighbors(1).unwrap().collect();
        assert_eq!(n, vec![(0, 1.0), (2, 1.0)]);

        let tri = parse("1 2 2\n1 3 3\n2 3 1");
        assert_eq!(tri.neighbors(0).unwrap().collect::<Vec<_>>(), vec![(1, 2.0), (2, 3.0)]);
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let g = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(g.neighbors(2).unwrap().count(), 0);
        assert!(matches!(g.neighbors(3), Err(Error::InvalidNode(3))));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let g = parse("5 9 1.5\n9 2\n2 5 0.25\n7 9 3");
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(parse_edge_list(buf.as_slice()).unwrap(), g);
    }
}
