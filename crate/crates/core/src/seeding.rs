//! Initial singleton communities drawn from random seed nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::community::{Community, CommunityId};
use crate::cover::Cover;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedRule {
    /// A drawn seed excludes its neighbours.
    #[default]
    ExcludeNeighbors,
    /// A drawn seed also excludes its neighbours' neighbours, so any two
    /// seeds are at least three hops apart.
    ExcludeSecondNeighbors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeedConfig {
    pub rule: SeedRule,
    pub rng_seed: u64,
}

/// Candidate pool with O(1) random draw and removal.
struct Pool {
    items: Vec<NodeId>,
    slot: Vec<usize>,
}

impl Pool {
    const ABSENT: usize = usize::MAX;

    fn new(node_count: usize, items: Vec<NodeId>) -> Self {
        let mut slot = vec![Self::ABSENT; node_count];
        for (i, &v) in items.iter().enumerate() {
            slot[v] = i;
        }
        Self { items, slot }
    }

    fn remove(&mut self, v: NodeId) {
        let i = self.slot[v];
        if i == Self::ABSENT {
            return;
        }
        let last = *self.items.last().unwrap();
        self.items.swap_remove(i);
        if last != v {
            self.slot[last] = i;
        }
        self.slot[v] = Self::ABSENT;
    }
}

/// Seed nodes in draw order. `pick` chooses an index into the current
/// candidate list.
pub fn seed_nodes_by<F>(graph: &Graph, rule: SeedRule, mut pick: F) -> Vec<NodeId>
where
    F: FnMut(&[NodeId]) -> usize,
{
    let candidates: Vec<NodeId> = (0..graph.node_count())
        .filter(|&v| graph.neighbor_count(v) >= 2)
        .collect();
    let mut pool = Pool::new(graph.node_count(), candidates);
    let mut seeds = Vec::new();
    while !pool.items.is_empty() {
        let seed = pool.items[pick(&pool.items)];
        seeds.push(seed);
        pool.remove(seed);
        for &u in graph.neighbor_ids(seed) {
            pool.remove(u);
            if rule == SeedRule::ExcludeSecondNeighbors {
                for &w in graph.neighbor_ids(u) {
                    pool.remove(w);
                }
            }
        }
    }
    seeds
}

/// Seed nodes drawn uniformly at random with a ChaCha8 stream seeded from
/// `config.rng_seed`.
pub fn seed_nodes(graph: &Graph, config: SeedConfig) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    seed_nodes_by(graph, config.rule, |items| rng.random_range(0..items.len()))
}

/// Cover of singleton communities, ids in draw order. Empty (with a warning)
/// when no node has two or more neighbours.
pub fn select_seeds(graph: &Graph, config: SeedConfig) -> Cover {
    let seeds = seed_nodes(graph, config);
    if seeds.is_empty() {
        log::warn!("no node has at least two neighbours; seeding produced no community");
    }
    let communities = seeds
        .into_iter()
        .enumerate()
        .map(|(i, v)| Community::singleton(CommunityId(i as u32), graph, v).expect("seed is a valid node"))
        .collect();
    Cover::from_parts(communities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path5() -> Graph {
        Graph::from_edges(5, (0..4).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    /// Picker that prefers `first` when it is still a candidate.
    fn prefer(first: NodeId) -> impl FnMut(&[NodeId]) -> usize {
        move |items| items.iter().position(|&v| v == first).unwrap_or(0)
    }

    #[test]
    fn path_centre_drawn_first() {
        // labels 1..5 map to ids 0..4; label 3 is id 2
        let g = path5();
        assert_eq!(seed_nodes_by(&g, SeedRule::ExcludeNeighbors, prefer(2)), vec![2]);
        assert_eq!(seed_nodes_by(&g, SeedRule::ExcludeSecondNeighbors, prefer(2)), vec![2]);
    }

    #[test]
    fn path_end_candidate_drawn_first() {
        // drawing id 1 removes 0 and 2; id 3 is still a candidate under rule 1
        let g = path5();
        assert_eq!(seed_nodes_by(&g, SeedRule::ExcludeNeighbors, prefer(1)), vec![1, 3]);
        assert_eq!(seed_nodes_by(&g, SeedRule::ExcludeSecondNeighbors, prefer(1)), vec![1]);
    }

    #[test]
    fn one_seed_per_triangle() {
        let g = Graph::from_edges(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])
            .unwrap();
        for seed in 0..20 {
            let seeds = seed_nodes(&g, SeedConfig { rule: SeedRule::ExcludeNeighbors, rng_seed: seed });
            assert_eq!(seeds.len(), 2);
            assert_ne!(seeds[0] / 3, seeds[1] / 3);
        }
    }

    #[test]
    fn star_has_only_its_centre() {
        let g = Graph::from_edges(5, (1..5).map(|i| (0, i, 1.0))).unwrap();
        let cover = select_seeds(&g, SeedConfig::default());
        assert_eq!(cover.len(), 1);
        assert_eq!(cover.communities()[0].nodes(), vec![0]);
    }

    #[test]
    fn no_candidates_gives_empty_cover() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(select_seeds(&g, SeedConfig::default()).is_empty());
    }

    fn random_graph(seed: u64, n: usize, p: f64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = mscd_testkit::random_graph(&mut rng, n, p, 1);
        Graph::from_edges(n, edges).unwrap()
    }

    proptest! {
        #[test]
        fn seeds_respect_distance_rules(seed in any::<u64>(), n in 2usize..40, p in 0.02f64..0.5) {
            let g = random_graph(seed, n, p);
            let adjacent = |a: NodeId, b: NodeId| g.edge_weight(a, b).is_some();
            let r1 = seed_nodes(&g, SeedConfig { rule: SeedRule::ExcludeNeighbors, rng_seed: seed });
            for (i, &a) in r1.iter().enumerate() {
                prop_assert!(g.neighbor_count(a) >= 2);
                for &b in &r1[i + 1..] {
                    prop_assert!(!adjacent(a, b));
                }
            }
            let r2 = seed_nodes(&g, SeedConfig { rule: SeedRule::ExcludeSecondNeighbors, rng_seed: seed });
            for (i, &a) in r2.iter().enumerate() {
                prop_assert!(g.neighbor_count(a) >= 2);
                for &b in &r2[i + 1..] {
                    prop_assert!(!adjacent(a, b));
                    let common = g.neighbor_ids(a).iter().any(|&x| adjacent(x, b));
                    prop_assert!(!common, "seeds {} and {} share a neighbour", a, b);
                }
            }
            // fixed seed, fixed result
            prop_assert_eq!(&r1, &seed_nodes(&g, SeedConfig { rule: SeedRule::ExcludeNeighbors, rng_seed: seed }));
        }
    }
}
