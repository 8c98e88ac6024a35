//! Greedy community growth under the LFK fitness.
//!
//! A call to [`grow_community`] first checks whether the community already
//! overlaps another one past the merge threshold; if so it is left alone and
//! flagged for the merge check. Otherwise boundary nodes are pulled from a
//! max-priority queue keyed by the ranking factor and added whenever they
//! strictly improve the fitness, after which members whose removal strictly
//! improves the fitness are pruned in up to `removal_cap` passes.
//!
//! Candidates rejected by the queue are only revisited when their weight into
//! the community changes, or by the sweep that runs once the queue drains:
//! the sweep re-queues any boundary node that has become profitable because
//! the community itself changed. Growth and pruning alternate (at most
//! `removal_cap` times) until neither changes anything, which leaves the
//! community locally maximal with respect to single-node moves.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::community::{Community, CommunityId};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::fitness::{community_fitness, improves, rank, ScaleParameter};
use crate::graph::Graph;
use crate::membership::MembershipTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    pub alpha: ScaleParameter,
    /// Merge threshold, in `(0, 1]`.
    pub eta: f64,
    /// Maximum number of pruning passes (and of grow/prune alternations).
    pub removal_cap: usize,
}

impl GrowthConfig {
    pub const DEFAULT_REMOVAL_CAP: usize = 5;

    pub fn new(alpha: f64, eta: f64, removal_cap: usize) -> Result<Self> {
        validate_eta(eta)?;
        if removal_cap == 0 {
            return Err(Error::InvalidParameter("removal cap must be at least 1".into()));
        }
        Ok(Self {
            alpha: ScaleParameter::new(alpha)?,
            eta,
            removal_cap,
        })
    }
}

pub(crate) fn validate_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("merge threshold must lie in (0, 1], got {eta}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GrowthOutcome {
    /// At least one node was added or removed.
    pub changed: bool,
    /// The community must be examined by the merge check.
    pub needs_merge_check: bool,
    /// The overlap pre-check fired and growth was skipped.
    pub overlap_detected: bool,
    pub added: usize,
    pub removed: usize,
}

/// Community sizes captured at the start of a phase, indexed by id.
#[derive(Debug, Clone, Default)]
pub struct SizeRegistry {
    sizes: Vec<usize>,
}

impl SizeRegistry {
    pub fn from_cover(cover: &Cover) -> Self {
        let len = cover
            .communities()
            .iter()
            .map(|c| c.id().0 as usize + 1)
            .max()
            .unwrap_or(0);
        let mut sizes = vec![0; len];
        for c in cover.communities() {
            sizes[c.id().0 as usize] = c.len();
        }
        Self { sizes }
    }

    pub fn get(&self, id: CommunityId) -> Option<usize> {
        self.sizes.get(id.0 as usize).copied().filter(|&s| s > 0)
    }
}

/// Smallest shared-node count that reaches the merge threshold for two
/// communities whose smaller one has `smaller_size` nodes, i.e.
/// `ceil(eta * smaller_size)`, never below one.
pub fn overlap_threshold(eta: f64, smaller_size: usize) -> usize {
    // the slack keeps products such as 0.3 * 10 = 3.0000000000000004 at 3
    ((eta * smaller_size as f64 - 1e-9).ceil() as usize).max(1)
}

/// True as soon as another community shares at least
/// `overlap_threshold(eta, min(|c|, |other|))` nodes with `community`.
pub fn overlap_precheck(community: &Community, table: &MembershipTable, sizes: &SizeRegistry, eta: f64) -> bool {
    let own_id = community.id();
    let own_size = community.len();
    let mut shared: FxHashMap<CommunityId, usize> = FxHashMap::default();
    community.members().any(|v| {
        table.with_set(v, |set| {
            set.iter().filter(|&&other| other != own_id).any(|&other| {
                let count = shared.entry(other).or_insert(0);
                *count += 1;
                let other_size = sizes.get(other).unwrap_or(own_size);
                *count >= overlap_threshold(eta, own_size.min(other_size))
            })
        })
    })
}

/// Queue entry. Higher key first, then lower node id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub key: f64,
    pub node: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Max-queue with lazy updates: a node whose key changes is simply pushed
/// again, and entries whose key no longer matches the node's current key
/// are skipped on pop.
#[derive(Debug, Default)]
pub(crate) struct CandidateQueue {
    heap: BinaryHeap<Candidate>,
}

impl CandidateQueue {
    pub fn push(&mut self, node: usize, key: f64) {
        self.heap.push(Candidate { key, node });
    }

    /// Pops the best entry whose key equals `current(node)`; entries for
    /// which `current` returns `None` or a different key are discarded.
    pub fn pop_live(&mut self, mut current: impl FnMut(usize) -> Option<f64>) -> Option<Candidate> {
        while let Some(c) = self.heap.pop() {
            if current(c.node) == Some(c.key) {
                return Some(c);
            }
        }
        None
    }
}

fn expand(graph: &Graph, community: &mut Community, table: &MembershipTable, alpha: f64) -> usize {
    let key_of = |c: &Community, v: usize| {
        c.weight_into(v).map(|d| rank(d, graph.weighted_degree(v), alpha))
    };
    let gain_positive = |c: &Community, v: usize| {
        let (k_in, k_out) = c.degrees_with(v, graph.weighted_degree(v));
        improves(community_fitness(k_in, k_out, alpha), c.fitness(alpha))
    };

    let mut queue = CandidateQueue::default();
    for (v, d) in community.boundary() {
        queue.push(v, rank(d, graph.weighted_degree(v), alpha));
    }
    let mut added = 0;
    loop {
        while let Some(Candidate { node, .. }) = queue.pop_live(|v| key_of(community, v)) {
            if !gain_positive(community, node) {
                continue;
            }
            community.add_node(graph, node).expect("queued node is not a member");
            table.add(node, community.id());
            added += 1;
            for &u in graph.neighbor_ids(node) {
                if let Some(key) = key_of(community, u) {
                    queue.push(u, key);
                }
            }
        }
        let mut revived = 0;
        for (v, d) in community.boundary() {
            if gain_positive(community, v) {
                queue.push(v, rank(d, graph.weighted_degree(v), alpha));
                revived += 1;
            }
        }
        if revived == 0 {
            return added;
        }
    }
}

fn prune(graph: &Graph, community: &mut Community, table: &MembershipTable, alpha: f64, passes: usize) -> usize {
    let mut removed = 0;
    for _ in 0..passes {
        let mut removed_this_pass = 0;
        for v in community.nodes() {
            if community.len() <= 1 {
                break;
            }
            let (k_in, k_out) = community.degrees_without(v, graph.weighted_degree(v));
            if improves(community_fitness(k_in, k_out, alpha), community.fitness(alpha)) {
                community.remove_node(graph, v).expect("member removal");
                table.remove(v, community.id());
                removed_this_pass += 1;
            }
        }
        removed += removed_this_pass;
        if removed_this_pass == 0 {
            break;
        }
    }
    removed
}

/// Grows `community` in place and keeps `table` in step with every node it
/// gains or loses.
pub fn grow_community(
    graph: &Graph,
    community: &mut Community,
    table: &MembershipTable,
    sizes: &SizeRegistry,
    config: &GrowthConfig,
) -> GrowthOutcome {
    if community.is_empty() {
        return GrowthOutcome::default();
    }
    if overlap_precheck(community, table, sizes, config.eta) {
        return GrowthOutcome {
            needs_merge_check: true,
            overlap_detected: true,
            ..GrowthOutcome::default()
        };
    }
    let alpha = config.alpha.value();
    let (mut added, mut removed) = (0, 0);
    for round in 1..=config.removal_cap {
        let gained = expand(graph, community, table, alpha);
        added += gained;
        if gained == 0 {
            break;
        }
        let lost = prune(graph, community, table, alpha, config.removal_cap);
        removed += lost;
        if lost == 0 || round == config.removal_cap {
            break;
        }
    }
    let changed = added + removed > 0;
    GrowthOutcome {
        changed,
        needs_merge_check: changed,
        overlap_detected: false,
        added,
        removed,
    }
}
