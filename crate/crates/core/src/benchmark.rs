//! Two-level planted-community benchmark.
//!
//! Nodes `0..n` are split into equal micro communities, consecutive micro
//! communities are grouped into macro communities. Each node gets a degree
//! drawn uniformly from `[0.8 d, 1.2 d]` and splits it into three stub
//! tiers: inside its micro community, inside its macro community but outside
//! its micro community, and outside its macro community. Stubs are paired at
//! random inside each tier; pairs that would form a self-loop or a repeated
//! edge are repaired afterwards by pairing leftovers or rewiring an existing
//! edge of the same tier.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub micro_size: usize,
    pub micros_per_macro: usize,
    pub avg_degree: f64,
    /// Fraction of a node's edges leaving its macro community.
    pub mu1: f64,
    /// Fraction of a node's edges leaving its micro community.
    pub mu2: f64,
    pub rng_seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            micro_size: 25,
            micros_per_macro: 4,
            avg_degree: 20.0,
            mu1: 0.05,
            mu2: 0.2,
            rng_seed: 0,
        }
    }
}

/// Share of stubs that may stay unmatched before generation fails.
const MAX_SHORTFALL: f64 = 0.02;

impl BenchmarkConfig {
    pub fn macro_size(&self) -> usize {
        self.micro_size * self.micros_per_macro
    }

    fn degree_range(&self) -> (usize, usize) {
        let lo = ((0.8 * self.avg_degree).round() as usize).max(1);
        let hi = ((1.2 * self.avg_degree).round() as usize).max(lo);
        (lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.micro_size < 2 || self.micros_per_macro == 0 {
            return bad("micro communities need at least 2 nodes and macro communities at least 1 micro".into());
        }
        if self.n == 0 || self.n % self.macro_size() != 0 {
            return bad(format!(
                "n = {} must be a positive multiple of micro_size x micros_per_macro = {}",
                self.n,
                self.macro_size()
            ));
        }
        if !(self.avg_degree.is_finite() && self.avg_degree > 0.0) {
            return bad(format!("average degree must be positive, got {}", self.avg_degree));
        }
        if !(0.0 <= self.mu1 && self.mu1 <= self.mu2 && self.mu2 < 1.0) {
            return bad(format!("need 0 <= mu1 <= mu2 < 1, got mu1 = {}, mu2 = {}", self.mu1, self.mu2));
        }
        let (_, hi) = self.degree_range();
        let (intra, _, _) = split_degree(hi, self.mu1, self.mu2);
        if intra >= self.micro_size {
            return bad(format!(
                "up to {intra} intra-micro edges per node do not fit in micro communities of {} nodes; \
                 use larger communities or a lower degree",
                self.micro_size
            ));
        }
        if self.mu2 > self.mu1 && self.micros_per_macro < 2 {
            return bad("mu2 > mu1 needs at least 2 micro communities per macro community".into());
        }
        if self.mu1 > 0.0 && self.n == self.macro_size() {
            return bad("mu1 > 0 needs at least 2 macro communities".into());
        }
        Ok(())
    }
}

/// `(intra-micro, intra-macro, inter-macro)` stub counts for a degree.
fn split_degree(degree: usize, mu1: f64, mu2: f64) -> (usize, usize, usize) {
    let d = degree as f64;
    let micro = (((1.0 - mu2) * d + 0.5).floor() as usize).min(degree);
    let macro_ = (((mu2 - mu1) * d).round() as usize).min(degree - micro);
    (micro, macro_, degree - micro - macro_)
}

#[derive(Debug, Clone)]
pub struct BenchmarkNetwork {
    pub graph: Graph,
    pub micro_cover: Vec<Vec<NodeId>>,
    pub macro_cover: Vec<Vec<NodeId>>,
    /// Measured share of edge weight leaving macro communities.
    pub realized_mu1: f64,
    /// Measured share of edge weight leaving micro communities.
    pub realized_mu2: f64,
}

struct Wiring<'a> {
    config: &'a BenchmarkConfig,
    edges: FxHashSet<(u32, u32)>,
    rng: ChaCha8Rng,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tier {
    Micro,
    Macro,
    Outside,
}

impl Wiring<'_> {
    fn micro_of(&self, v: usize) -> usize {
        v / self.config.micro_size
    }

    fn macro_of(&self, v: usize) -> usize {
        v / self.config.macro_size()
    }

    fn fits(&self, tier: Tier, u: usize, v: usize) -> bool {
        if u == v || self.edges.contains(&key(u, v)) {
            return false;
        }
        match tier {
            Tier::Micro => self.micro_of(u) == self.micro_of(v),
            Tier::Macro => self.macro_of(u) == self.macro_of(v) && self.micro_of(u) != self.micro_of(v),
            Tier::Outside => self.macro_of(u) != self.macro_of(v),
        }
    }

    /// Pairs the stubs of one group; returns the number left unmatched.
    fn wire(&mut self, tier: Tier, mut stubs: Vec<usize>) -> usize {
        stubs.shuffle(&mut self.rng);
        let mut group_edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
        let mut leftover = Vec::new();
        for pair in stubs.chunks(2) {
            match *pair {
                [u, v] if self.fits(tier, u, v) => {
                    self.edges.insert(key(u, v));
                    group_edges.push((u, v));
                }
                _ => leftover.extend_from_slice(pair),
            }
        }

        let mut budget = 200 * leftover.len() + 1000;
        while leftover.len() >= 2 && budget > 0 {
            budget -= 1;
            let i = self.rng.random_range(0..leftover.len());
            let mut j = self.rng.random_range(0..leftover.len() - 1);
            if j >= i {
                j += 1;
            }
            let (u, v) = (leftover[i], leftover[j]);
            if self.fits(tier, u, v) {
                self.edges.insert(key(u, v));
                group_edges.push((u, v));
            } else if !group_edges.is_empty() {
                // rewire: (x, y) becomes (u, x) and (v, y)
                let e = self.rng.random_range(0..group_edges.len());
                let (x, y) = group_edges[e];
                if !self.fits(tier, u, x) || !self.fits(tier, v, y) || key(u, x) == key(v, y) {
                    continue;
                }
                self.edges.remove(&key(x, y));
                group_edges.swap_remove(e);
                for (a, b) in [(u, x), (v, y)] {
                    self.edges.insert(key(a, b));
                    group_edges.push((a, b));
                }
            } else {
                continue;
            }
            let (hi, lo) = (i.max(j), i.min(j));
            leftover.swap_remove(hi);
            leftover.swap_remove(lo);
        }
        leftover.len()
    }
}

fn key(u: usize, v: usize) -> (u32, u32) {
    (u.min(v) as u32, u.max(v) as u32)
}

pub fn generate_hierarchical(config: &BenchmarkConfig) -> Result<BenchmarkNetwork> {
    config.validate()?;
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let (lo, hi) = config.degree_range();
    let tiers: Vec<(usize, usize, usize)> = (0..n)
        .map(|_| split_degree(rng.random_range(lo..=hi), config.mu1, config.mu2))
        .collect();
    let total_stubs: usize = tiers.iter().map(|&(a, b, c)| a + b + c).sum();

    let mut wiring = Wiring {
        config,
        edges: FxHashSet::default(),
        rng,
    };
    let stubs_of = |nodes: std::ops::Range<usize>, pick: fn(&(usize, usize, usize)) -> usize| -> Vec<usize> {
        nodes.flat_map(|v| std::iter::repeat_n(v, pick(&tiers[v]))).collect()
    };
    let mut unmatched = 0;
    for start in (0..n).step_by(config.micro_size) {
        unmatched += wiring.wire(Tier::Micro, stubs_of(start..start + config.micro_size, |t| t.0));
    }
    for start in (0..n).step_by(config.macro_size()) {
        unmatched += wiring.wire(Tier::Macro, stubs_of(start..start + config.macro_size(), |t| t.1));
    }
    unmatched += wiring.wire(Tier::Outside, stubs_of(0..n, |t| t.2));

    if unmatched as f64 > MAX_SHORTFALL * total_stubs as f64 {
        return Err(Error::Infeasible(format!(
            "{unmatched} of {total_stubs} edge stubs could not be matched; \
             use larger communities or a lower degree"
        )));
    }
    if unmatched > 0 {
        log::debug!("{unmatched} of {total_stubs} stubs left unmatched");
    }

    let mut edges: Vec<(u32, u32)> = wiring.edges.into_iter().collect();
    edges.sort_unstable();
    let graph = Graph::from_edges(n, edges.into_iter().map(|(u, v)| (u as usize, v as usize, 1.0)))?;
    let groups = |size: usize| -> Vec<Vec<NodeId>> { (0..n).step_by(size).map(|s| (s..s + size).collect()).collect() };
    let micro_cover = groups(config.micro_size);
    let macro_cover = groups(config.macro_size());
    let realized_mu1 = measure_mixing(&graph, &macro_cover)?;
    let realized_mu2 = measure_mixing(&graph, &micro_cover)?;
    Ok(BenchmarkNetwork {
        graph,
        micro_cover,
        macro_cover,
        realized_mu1,
        realized_mu2,
    })
}

/// Share of total weighted degree that crosses community boundaries, for a
/// cover that partitions the nodes. Zero for a graph without edges.
pub fn measure_mixing<S: AsRef<[NodeId]>>(graph: &Graph, cover: &[S]) -> Result<f64> {
    let n = graph.node_count();
    let mut owner = vec![usize::MAX; n];
    for (i, c) in cover.iter().enumerate() {
        for &v in c.as_ref() {
            if v >= n {
                return Err(Error::InvalidNode(v));
            }
            if owner[v] != usize::MAX {
                return Err(Error::NotPartition(format!("node {} is in more than one community", graph.label(v))));
            }
            owner[v] = i;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::NotPartition(format!("node {} is in no community", graph.label(v))));
    }
    let (mut external, mut total) = (0.0, 0.0);
    for v in 0..n {
        for (u, w) in graph.adj(v) {
            total += w;
            if owner[u] != owner[v] {
                external += w;
            }
        }
    }
    Ok(if total > 0.0 { external / total } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_split_preserves_total() {
        assert_eq!(split_degree(20, 0.05, 0.2), (16, 3, 1));
        assert_eq!(split_degree(10, 0.0, 0.25), (8, 2, 0));
        assert_eq!(split_degree(17, 0.2, 0.4), (10, 3, 4));
        for d in 1..40 {
            let (a, b, c) = split_degree(d, 0.1, 0.3);
            assert_eq!(a + b + c, d);
        }
    }

    #[test]
    fn zero_mixing_gives_disjoint_micro_communities() {
        let cfg = BenchmarkConfig { mu1: 0.0, mu2: 0.0, n: 400, ..BenchmarkConfig::default() };
        let net = generate_hierarchical(&cfg).unwrap();
        assert_eq!(net.realized_mu2, 0.0);
        assert_eq!(measure_mixing(&net.graph, &net.micro_cover).unwrap(), 0.0);
        assert_eq!(net.micro_cover.len(), 16);
        assert_eq!(net.macro_cover.len(), 4);
    }

    #[test]
    fn default_config_hits_targets() {
        for seed in 0..20 {
            let net = generate_hierarchical(&BenchmarkConfig { rng_seed: seed, ..BenchmarkConfig::default() }).unwrap();
            assert!((net.realized_mu1 - 0.05).abs() <= 0.03, "mu1 {}", net.realized_mu1);
            assert!((net.realized_mu2 - 0.2).abs() <= 0.03, "mu2 {}", net.realized_mu2);
            assert!(net.realized_mu1 <= net.realized_mu2);
            assert_eq!(net.micro_cover.len(), 40);
            assert_eq!(net.macro_cover.len(), 10);
            let avg = 2.0 * net.graph.edge_count() as f64 / 1000.0;
            assert!((avg - 20.0).abs() < 1.0, "average degree {avg}");
        }
    }

    #[test]
    fn covers_are_nested_partitions() {
        let net = generate_hierarchical(&BenchmarkConfig::default()).unwrap();
        for micro in &net.micro_cover {
            let m = micro[0] / 100;
            assert!(micro.iter().all(|&v| v / 100 == m));
        }
        let mut all: Vec<usize> = net.macro_cover.concat();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn fixed_seed_fixed_graph() {
        let cfg = BenchmarkConfig { rng_seed: 9, ..BenchmarkConfig::default() };
        let a: Vec<_> = generate_hierarchical(&cfg).unwrap().graph.edges().collect();
        let b: Vec<_> = generate_hierarchical(&cfg).unwrap().graph.edges().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let base = BenchmarkConfig::default();
        for cfg in [
            BenchmarkConfig { mu1: 0.3, mu2: 0.2, ..base.clone() },
            BenchmarkConfig { n: 1010, ..base.clone() },
            BenchmarkConfig { avg_degree: 40.0, ..base.clone() },
            BenchmarkConfig { mu2: 1.0, ..base.clone() },
        ] {
            assert!(matches!(generate_hierarchical(&cfg), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn mixing_of_simple_graphs() {
        let cliques = Graph::from_edges(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])
            .unwrap();
        assert_eq!(measure_mixing(&cliques, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap(), 0.0);
        let bipartite = Graph::from_edges(4, [(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]).unwrap();
        assert_eq!(measure_mixing(&bipartite, &[vec![0, 1], vec![2, 3]]).unwrap(), 1.0);
        assert!(matches!(measure_mixing(&bipartite, &[vec![0, 1], vec![1, 2, 3]]), Err(Error::NotPartition(_))));
        assert!(matches!(measure_mixing(&bipartite, &[vec![0, 1], vec![2]]), Err(Error::NotPartition(_))));
    }
}
