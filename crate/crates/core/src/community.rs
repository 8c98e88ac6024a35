use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::fitness::community_fitness;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommunityId(pub u32);

impl fmt::Display for CommunityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Summed edge weight and edge count between one node and a community.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Link {
    weight: f64,
    edges: u32,
}

/// A community together with the degree caches the LFK fitness needs.
///
/// `k_in` counts every internal edge from both endpoints, so
/// `k_in + k_out` is the total weighted degree of the members. Each member
/// remembers its weight towards the other members, and each boundary node
/// (a non-member with at least one edge into the community) its weight into
/// the community, which makes adding, removing and evaluating a node cost
/// O(1) lookups plus one pass over its adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    id: CommunityId,
    members: FxHashMap<NodeId, Link>,
    boundary: FxHashMap<NodeId, Link>,
    k_in: f64,
    k_out: f64,
}

impl Community {
    pub fn new(id: CommunityId) -> Self {
        Self {
            id,
            members: FxHashMap::default(),
            boundary: FxHashMap::default(),
            k_in: 0.0,
            k_out: 0.0,
        }
    }

    pub fn singleton(id: CommunityId, graph: &Graph, node: NodeId) -> Result<Self> {
        let mut c = Self::new(id);
        c.add_node(graph, node)?;
        Ok(c)
    }

    /// Builds a community from an arbitrary node set; repeated ids are
    /// ignored.
    pub fn from_nodes(id: CommunityId, graph: &Graph, nodes: &[NodeId]) -> Result<Self> {
        let mut c = Self::new(id);
        for &v in nodes {
            if !c.contains(v) {
                c.add_node(graph, v)?;
            }
        }
        Ok(c)
    }

    #[inline]
    pub fn id(&self) -> CommunityId {
        self.id
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, node: NodeId) -> bool {
        self.members.contains_key(&node)
    }

    #[inline]
    pub fn k_in(&self) -> f64 {
        self.k_in
    }

    #[inline]
    pub fn k_out(&self) -> f64 {
        self.k_out
    }

    pub fn fitness(&self, alpha: f64) -> f64 {
        community_fitness(self.k_in, self.k_out, alpha)
    }

    /// Member ids in ascending order.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.members.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Members in unspecified order.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.keys().copied()
    }

    /// Boundary nodes and their weight into the community, unordered.
    pub fn boundary(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.boundary.iter().map(|(&v, l)| (v, l.weight))
    }

    /// Boundary node ids in ascending order.
    pub fn boundary_neighbors(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.boundary.keys().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    /// Weight from a boundary node into the community (`d_in`); `None` for
    /// members and for nodes with no edge into the community.
    #[inline]
    pub fn weight_into(&self, node: NodeId) -> Option<f64> {
        self.boundary.get(&node).map(|l| l.weight)
    }

    /// Weight from a member to the other members.
    #[inline]
    pub fn internal_weight(&self, node: NodeId) -> Option<f64> {
        self.members.get(&node).map(|l| l.weight)
    }

    /// `(k_in, k_out)` the community would have after adding `node`.
    #[inline]
    pub(crate) fn degrees_with(&self, node: NodeId, degree: f64) -> (f64, f64) {
        let d = self.weight_into(node).unwrap_or(0.0);
        (self.k_in + 2.0 * d, self.k_out + degree - 2.0 * d)
    }

    /// `(k_in, k_out)` the community would have after removing member
    /// `node`.
    #[inline]
    pub(crate) fn degrees_without(&self, node: NodeId, degree: f64) -> (f64, f64) {
        let d = self.internal_weight(node).unwrap_or(0.0);
        (self.k_in - 2.0 * d, self.k_out - degree + 2.0 * d)
    }

    pub fn add_node(&mut self, graph: &Graph, node: NodeId) -> Result<()> {
        if node >= graph.node_count() {
            return Err(Error::InvalidNode(node));
        }
        if self.contains(node) {
            return Err(Error::AlreadyMember { node, community: self.id });
        }
        let link = self.boundary.remove(&node).unwrap_or_default();
        self.k_in += 2.0 * link.weight;
        self.k_out += graph.weighted_degree(node) - 2.0 * link.weight;
        self.members.insert(node, link);
        for (u, w) in graph.adj(node) {
            let entry = match self.members.get_mut(&u) {
                Some(member) => member,
                None => self.boundary.entry(u).or_default(),
            };
            entry.weight += w;
            entry.edges += 1;
        }
        Ok(())
    }

    pub fn remove_node(&mut self, graph: &Graph, node: NodeId) -> Result<()> {
        let Some(&link) = self.members.get(&node) else {
            return Err(Error::NotMember { node, community: self.id });
        };
        if self.members.len() == 1 {
            return Err(Error::WouldEmpty { node, community: self.id });
        }
        self.members.remove(&node);
        self.k_in -= 2.0 * link.weight;
        self.k_out -= graph.weighted_degree(node) - 2.0 * link.weight;
        if link.edges > 0 {
            self.boundary.insert(node, link);
        }
        for (u, w) in graph.adj(node) {
            if let Some(member) = self.members.get_mut(&u) {
                member.edges -= 1;
                member.weight = if member.edges == 0 { 0.0 } else { member.weight - w };
            } else if let Some(b) = self.boundary.get_mut(&u) {
                b.edges -= 1;
                if b.edges == 0 {
                    self.boundary.remove(&u);
                } else {
                    b.weight -= w;
                }
            }
        }
        if self.members.len() == 1 {
            self.k_in = 0.0;
        }
        Ok(())
    }

    /// Unions `other` into `self`, keeping `self`'s id.
    pub fn absorb(&mut self, graph: &Graph, other: &Community) -> Result<()> {
        let mut incoming = other.nodes();
        incoming.retain(|&v| !self.contains(v));
        for v in incoming {
            self.add_node(graph, v)?;
        }
        Ok(())
    }
}

/// From-scratch `(k_in, k_out)` of a node set. Repeated ids count once.
pub fn community_degrees(graph: &Graph, nodes: &[NodeId]) -> Result<(f64, f64)> {
    let mut set = FxHashSet::default();
    for &v in nodes {
        if v >= graph.node_count() {
            return Err(Error::InvalidNode(v));
        }
        set.insert(v);
    }
    let (mut k_in, mut k_out) = (0.0, 0.0);
    for &v in &set {
        for (u, w) in graph.adj(v) {
            if set.contains(&u) {
                k_in += w;
            } else {
                k_out += w;
            }
        }
    }
    Ok((k_in, k_out))
}
