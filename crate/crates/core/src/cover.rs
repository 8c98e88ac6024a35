//! Covers (sets of possibly overlapping communities) and the flat cover
//! file format: one community per line, original node labels separated by
//! spaces, labels ascending within a line and lines in ascending order.

use std::io::{BufRead, Write};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::community::{Community, CommunityId};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// A live cover: communities with their degree caches. Ids are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cover {
    communities: Vec<Community>,
}

impl Cover {
    pub fn new(communities: Vec<Community>) -> Result<Self> {
        let mut seen = FxHashSet::default();
        for c in &communities {
            if c.is_empty() {
                return Err(Error::EmptyCommunity);
            }
            if !seen.insert(c.id()) {
                return Err(Error::DuplicateCommunity(c.id()));
            }
        }
        Ok(Self { communities })
    }

    /// Communities built from node sets, with ids `0..sets.len()`.
    pub fn from_node_sets<S: AsRef<[NodeId]>>(graph: &Graph, sets: &[S]) -> Result<Self> {
        let communities = sets
            .iter()
            .enumerate()
            .map(|(i, s)| Community::from_nodes(CommunityId(i as u32), graph, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(communities)
    }

    pub(crate) fn from_parts(communities: Vec<Community>) -> Self {
        Self { communities }
    }

    pub(crate) fn into_parts(self) -> Vec<Community> {
        self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn communities(&self) -> &[Community] {
        &self.communities
    }

    pub(crate) fn communities_mut(&mut self) -> &mut [Community] {
        &mut self.communities
    }

    pub fn get(&self, id: CommunityId) -> Option<&Community> {
        self.communities.iter().find(|c| c.id() == id)
    }

    pub fn positions(&self) -> FxHashMap<CommunityId, usize> {
        self.communities.iter().enumerate().map(|(i, c)| (c.id(), i)).collect()
    }

    /// Drops every community whose node set equals an earlier one.
    /// Returns how many were removed.
    pub fn remove_duplicates(&mut self) -> usize {
        let before = self.communities.len();
        let mut seen: FxHashSet<Vec<NodeId>> = FxHashSet::default();
        self.communities.retain(|c| seen.insert(c.nodes()));
        before - self.communities.len()
    }

    /// Nodes that belong to no community.
    pub fn unassigned_count(&self, node_count: usize) -> usize {
        let mut covered = vec![false; node_count];
        for c in &self.communities {
            for v in c.members() {
                covered[v] = true;
            }
        }
        covered.iter().filter(|&&b| !b).count()
    }

    /// Deep, immutable copy tagged with the scale it was produced at.
    pub fn snapshot(&self, alpha: f64) -> CoverSnapshot {
        CoverSnapshot {
            alpha,
            communities: self
                .communities
                .iter()
                .map(|c| CommunitySnapshot {
                    id: c.id(),
                    nodes: c.nodes(),
                    k_in: c.k_in(),
                    k_out: c.k_out(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunitySnapshot {
    pub id: CommunityId,
    /// Ascending.
    pub nodes: Vec<NodeId>,
    pub k_in: f64,
    pub k_out: f64,
}

impl AsRef<[NodeId]> for CommunitySnapshot {
    fn as_ref(&self) -> &[NodeId] {
        &self.nodes
    }
}

/// Frozen cover stored with each per-scale result.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSnapshot {
    pub alpha: f64,
    pub communities: Vec<CommunitySnapshot>,
}

impl CoverSnapshot {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn node_sets(&self) -> Vec<Vec<NodeId>> {
        self.communities.iter().map(|c| c.nodes.clone()).collect()
    }

    pub fn to_cover(&self, graph: &Graph) -> Result<Cover> {
        let communities = self
            .communities
            .iter()
            .map(|c| Community::from_nodes(c.id, graph, &c.nodes))
            .collect::<Result<Vec<_>>>()?;
        Cover::new(communities)
    }
}

impl AsRef<[CommunitySnapshot]> for CoverSnapshot {
    fn as_ref(&self) -> &[CommunitySnapshot] {
        &self.communities
    }
}

/// Label-sorted lines for `sets`, in the canonical file order.
pub fn cover_lines<S: AsRef<[NodeId]>>(graph: &Graph, sets: &[S]) -> Vec<Vec<u64>> {
    let mut lines: Vec<Vec<u64>> = sets
        .iter()
        .map(|s| {
            let mut l: Vec<u64> = s.as_ref().iter().map(|&v| graph.label(v)).collect();
            l.sort_unstable();
            l.dedup();
            l
        })
        .collect();
    lines.sort();
    lines
}

pub fn write_cover<W: Write, S: AsRef<[NodeId]>>(graph: &Graph, sets: &[S], mut out: W) -> Result<()> {
    for line in cover_lines(graph, sets) {
        let mut first = true;
        for label in line {
            if !first {
                out.write_all(b" ")?;
            }
            write!(out, "{label}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a cover file into internal node ids. Blank and `#` lines are
/// skipped; labels must exist in `graph`.
pub fn read_cover<R: BufRead>(graph: &Graph, reader: R) -> Result<Vec<Vec<NodeId>>> {
    let mut sets = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut set = Vec::new();
        for tok in trimmed.split_whitespace() {
            let label: u64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid node label {tok:?}"),
            })?;
            set.push(graph.node_of_label(label).ok_or(Error::UnknownLabel(label))?);
        }
        set.sort_unstable();
        set.dedup();
        sets.push(set);
    }
    Ok(sets)
}
