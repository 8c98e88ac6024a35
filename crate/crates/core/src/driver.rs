//! The multi-scale loop: for each scale, alternate grow, check and merge
//! phases until a round changes nothing, then snapshot the cover and carry
//! it on to the next (coarser) scale.

use std::ops::Range;
use std::time::{Duration, Instant};

use crate::community::{Community, CommunityId};
use crate::cover::{Cover, CoverSnapshot};
use crate::error::{Error, Result};
use crate::fitness::{cover_quality, ScaleParameter};
use crate::graph::{Graph, NodeId};
use crate::growth::{grow_community, validate_eta, GrowthConfig, SizeRegistry};
use crate::membership::rebuild_membership;
use crate::merge::{execute_merges, find_merge_candidates, KeeperPolicy};
use crate::parallel;
use crate::seeding::{select_seeds, SeedConfig};

/// `x` scale values from `a` down to `v_min`, packed densely near `v_min`:
/// `v_i = v_min + (a - v_min) (1 - ln i / ln x)` for `i = 1..=x`.
pub fn sample_scales(v_min: f64, a: f64, x: usize) -> Result<Vec<f64>> {
    if x < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 scales, got {x}")));
    }
    if !(v_min > 0.0 && v_min < a && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < v_min < a, got v_min = {v_min}, a = {a}")));
    }
    let log_x = (x as f64).ln();
    let mut scales: Vec<f64> = (1..=x)
        .map(|i| v_min + (a - v_min) * (1.0 - (i as f64).ln() / log_x))
        .collect();
    scales[0] = a;
    scales[x - 1] = v_min;
    Ok(scales)
}

#[derive(Debug, Clone)]
pub struct DriverConfig {
    /// Strictly decreasing.
    pub scales: Vec<ScaleParameter>,
    pub eta: f64,
    pub removal_cap: usize,
    pub threads: usize,
    pub max_phase_rounds: usize,
    pub seed: SeedConfig,
    /// Starting communities as node sets; seeding is skipped when present.
    pub initial_cover: Option<Vec<Vec<NodeId>>>,
    pub keeper: KeeperPolicy,
}

impl DriverConfig {
    pub const DEFAULT_ETA: f64 = 0.5;
    pub const DEFAULT_MAX_PHASE_ROUNDS: usize = 100;

    /// Defaults for everything but the scales; threads default to the
    /// available hardware parallelism.
    pub fn new(scales: &[f64]) -> Result<Self> {
        let config = Self {
            scales: scales.iter().map(|&a| ScaleParameter::new(a)).collect::<Result<_>>()?,
            eta: Self::DEFAULT_ETA,
            removal_cap: GrowthConfig::DEFAULT_REMOVAL_CAP,
            threads: default_threads(),
            max_phase_rounds: Self::DEFAULT_MAX_PHASE_ROUNDS,
            seed: SeedConfig::default(),
            initial_cover: None,
            keeper: KeeperPolicy::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::InvalidParameter("no scale values".into()));
        }
        if self.scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("scale values must be strictly decreasing".into()));
        }
        validate_eta(self.eta)?;
        if self.removal_cap == 0 || self.threads == 0 || self.max_phase_rounds == 0 {
            return Err(Error::InvalidParameter(
                "removal cap, thread count and phase-round cap must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleResult {
    pub alpha: f64,
    pub cover: CoverSnapshot,
    /// Mean community fitness at `alpha`.
    pub quality: f64,
    pub community_count: usize,
    pub phase_rounds: usize,
    pub wall_time: Duration,
    /// Nodes in no community.
    pub unassigned_nodes: usize,
    /// The phase loop stopped at `max_phase_rounds` rather than converging.
    pub round_cap_hit: bool,
}

/// Runs scales one at a time, keeping the live cover between them.
#[derive(Debug)]
pub struct Detector<'g> {
    graph: &'g Graph,
    config: DriverConfig,
    cover: Cover,
}

impl<'g> Detector<'g> {
    /// Validates `config` and builds the starting cover, from
    /// `config.initial_cover` or from seeds.
    pub fn new(graph: &'g Graph, config: DriverConfig) -> Result<Self> {
        config.validate()?;
        if graph.node_count() == 0 {
            return Err(Error::EmptyInput);
        }
        let mut cover = match &config.initial_cover {
            Some(sets) => Cover::from_node_sets(graph, sets)?,
            None => select_seeds(graph, config.seed),
        };
        if cover.is_empty() {
            return Err(Error::NoSeeds);
        }
        let dropped = cover.remove_duplicates();
        if dropped > 0 {
            log::info!("dropped {dropped} duplicate initial communities");
        }
        Ok(Self { graph, config, cover })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn config(&self) -> &DriverConfig {
        &self.config
    }

    /// Runs the phase loop at `alpha` on the current cover.
    pub fn run_scale(&mut self, alpha: ScaleParameter) -> Result<ScaleResult> {
        let start = Instant::now();
        let graph = self.graph;
        let cfg = &self.config;
        let growth = GrowthConfig {
            alpha,
            eta: cfg.eta,
            removal_cap: cfg.removal_cap,
        };
        let mut rounds = 0;
        let mut round_cap_hit = false;
        loop {
            if rounds == cfg.max_phase_rounds {
                log::warn!("scale {}: stopped after {rounds} phase rounds without converging", alpha.value());
                round_cap_hit = true;
                break;
            }
            rounds += 1;
            let table = rebuild_membership(&self.cover, graph.node_count());
            let sizes = SizeRegistry::from_cover(&self.cover);
            let outcomes = parallel::map_mut(cfg.threads, self.cover.communities_mut(), |c| {
                grow_community(graph, c, &table, &sizes, &growth)
            });
            let grew = outcomes.iter().any(|o| o.changed);
            let check: Vec<CommunityId> = self
                .cover
                .communities()
                .iter()
                .zip(&outcomes)
                .filter(|(_, o)| o.needs_merge_check)
                .map(|(c, _)| c.id())
                .collect();
            let pairs = find_merge_candidates(&check, &table, &self.cover, cfg.eta, cfg.threads);
            let merged = if pairs.is_empty() {
                0
            } else {
                execute_merges(graph, &mut self.cover, &pairs, &table, cfg.keeper, cfg.threads)?
            };
            log::debug!(
                "scale {}: round {rounds}, {} communities, {merged} merged",
                alpha.value(),
                self.cover.len()
            );
            if !grew && merged == 0 {
                break;
            }
        }
        Ok(ScaleResult {
            alpha: alpha.value(),
            cover: self.cover.snapshot(alpha.value()),
            quality: cover_quality(&self.cover, alpha.value())?,
            community_count: self.cover.len(),
            phase_rounds: rounds,
            wall_time: start.elapsed(),
            unassigned_nodes: self.cover.unassigned_count(graph.node_count()),
            round_cap_hit,
        })
    }

    /// Runs every configured scale in order.
    pub fn run(&mut self) -> Result<Vec<ScaleResult>> {
        self.run_with(|_| {})
    }

    /// Like [`Detector::run`], calling `on_scale` after each scale.
    pub fn run_with(&mut self, mut on_scale: impl FnMut(&ScaleResult)) -> Result<Vec<ScaleResult>> {
        let scales = self.config.scales.clone();
        scales
            .into_iter()
            .map(|alpha| {
                let result = self.run_scale(alpha)?;
                on_scale(&result);
                Ok(result)
            })
            .collect()
    }
}

pub fn detect_multiscale(graph: &Graph, config: DriverConfig) -> Result<Vec<ScaleResult>> {
    Detector::new(graph, config)?.run()
}

/// Per-scale annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScaleFlags {
    /// A single community spans at least 95% of the nodes.
    pub mega_community: bool,
    /// The scale belongs to a run of two or more consecutive scales with the
    /// same community count.
    pub stable_run_member: bool,
    /// Length of the constant-count run containing this scale.
    pub run_length: usize,
}

pub const MEGA_COMMUNITY_SHARE: f64 = 0.95;

/// Maximal runs of equal consecutive values.
pub fn stable_runs<T: PartialEq>(values: &[T]) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] != values[start] {
            runs.push(start..i);
            start = i;
        }
    }
    runs
}

pub fn stability_flags(results: &[ScaleResult], node_count: usize) -> Vec<ScaleFlags> {
    let counts: Vec<usize> = results.iter().map(|r| r.community_count).collect();
    let mut flags: Vec<ScaleFlags> = results
        .iter()
        .map(|r| ScaleFlags {
            mega_community: r
                .cover
                .communities
                .iter()
                .any(|c| c.nodes.len() as f64 >= MEGA_COMMUNITY_SHARE * node_count as f64),
            ..ScaleFlags::default()
        })
        .collect();
    for run in stable_runs(&counts) {
        for f in &mut flags[run.clone()] {
            f.run_length = run.len();
            f.stable_run_member = run.len() >= 2;
        }
    }
    flags
}

/// Communities as output node sets, optionally with a singleton for every
/// node that belongs to no community.
pub fn output_sets(snapshot: &CoverSnapshot, node_count: usize, emit_singletons: bool) -> Vec<Vec<NodeId>> {
    let mut sets = snapshot.node_sets();
    if emit_singletons {
        let mut covered = vec![false; node_count];
        for v in sets.iter().flatten() {
            covered[*v] = true;
        }
        sets.extend((0..node_count).filter(|&v| !covered[v]).map(|v| vec![v]));
    }
    sets
}

impl Detector<'_> {
    /// Community whose id is `id`, if still alive.
    pub fn community(&self, id: CommunityId) -> Option<&Community> {
        self.cover.get(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::SeedRule;

    #[test]
    fn scale_sampling() {
        assert_eq!(sample_scales(0.5, 1.0, 2).unwrap(), vec![1.0, 0.5]);
        let four = sample_scales(0.5, 1.0, 4).unwrap();
        let want = [1.0, 0.75, 0.603759374819711, 0.5];
        for (g, w) in four.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        for x in [2, 3, 10, 100, 1000] {
            let s = sample_scales(0.5, 1.0, x).unwrap();
            assert_eq!((s[0], s[x - 1]), (1.0, 0.5));
            assert!(s.windows(2).all(|w| w[1] < w[0]));
        }
        assert!(sample_scales(0.5, 1.0, 1).is_err());
        assert!(sample_scales(1.0, 0.5, 4).is_err());
        assert!(sample_scales(0.0, 0.5, 4).is_err());
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]).unwrap()
    }

    #[test]
    fn two_triangles_at_two_scales() {
        let g = two_triangles();
        for rng_seed in 0..10 {
            let mut cfg = DriverConfig::new(&[1.0, 0.5]).unwrap();
            cfg.threads = 1 + rng_seed as usize % 3;
            cfg.seed = SeedConfig { rule: SeedRule::ExcludeNeighbors, rng_seed };
            let results = detect_multiscale(&g, cfg).unwrap();
            assert_eq!(results.len(), 2);
            for r in &results {
                let mut sets = r.cover.node_sets();
                sets.sort();
                assert_eq!(sets, vec![vec![0, 1, 2], vec![3, 4, 5]]);
                // a closed triangle has k_in = 6, k_out = 0
                assert!((r.quality - 6f64.powf(1.0 - r.alpha)).abs() < 1e-12);
                assert_eq!(r.unassigned_nodes, 0);
                assert!(!r.round_cap_hit);
            }
        }
    }

    #[test]
    fn clique_is_one_community() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v, 1.0));
            }
        }
        let g = Graph::from_edges(5, edges).unwrap();
        let results = detect_multiscale(&g, DriverConfig::new(&[1.0]).unwrap()).unwrap();
        assert_eq!(results[0].cover.node_sets(), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn duplicate_initial_communities_terminate() {
        let g = two_triangles();
        let mut cfg = DriverConfig::new(&[1.0, 0.8]).unwrap();
        cfg.initial_cover = Some(vec![vec![0], vec![0], vec![0, 1], vec![1, 0], vec![3], vec![4], vec![5]]);
        cfg.max_phase_rounds = 10;
        let results = detect_multiscale(&g, cfg).unwrap();
        for r in &results {
            assert!(!r.round_cap_hit);
            let mut sets = r.cover.node_sets();
            sets.sort();
            assert_eq!(sets, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        }
    }

    #[test]
    fn carry_over_matches_snapshot() {
        let g = two_triangles();
        let mut det = Detector::new(&g, DriverConfig::new(&[1.0, 0.6]).unwrap()).unwrap();
        let r = det.run_scale(ScaleParameter::new(1.0).unwrap()).unwrap();
        assert_eq!(det.cover().snapshot(r.alpha), r.cover);
    }

    #[test]
    fn no_seeds_is_an_error() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(detect_multiscale(&g, DriverConfig::new(&[1.0]).unwrap()), Err(Error::NoSeeds)));
        let mut cfg = DriverConfig::new(&[1.0]).unwrap();
        cfg.initial_cover = Some(vec![vec![0], vec![2]]);
        let r = detect_multiscale(&g, cfg).unwrap();
        assert_eq!(r[0].cover.node_sets(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn config_validation() {
        assert!(DriverConfig::new(&[0.5, 1.0]).is_err());
        assert!(DriverConfig::new(&[1.0, 1.0]).is_err());
        assert!(DriverConfig::new(&[]).is_err());
        let mut cfg = DriverConfig::new(&[1.0]).unwrap();
        cfg.threads = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn runs_and_flags() {
        let runs = stable_runs(&[40, 40, 40, 10, 10]);
        assert_eq!(runs, vec![0..3, 3..5]);
        assert_eq!(stable_runs::<u8>(&[]), Vec::<Range<usize>>::new());

        let g = two_triangles();
        let mut cfg = DriverConfig::new(&[1.0]).unwrap();
        cfg.initial_cover = Some(vec![vec![0, 1, 2, 3, 4, 5]]);
        let results = detect_multiscale(&g, cfg).unwrap();
        let flags = stability_flags(&results, 6);
        assert!(flags[0].mega_community);
        assert_eq!(flags[0].run_length, 1);
    }
}
