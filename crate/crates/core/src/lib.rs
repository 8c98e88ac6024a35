//! Multi-scale detection of overlapping communities driven by the LFK local
//! fitness, with a multi-threaded grow / check / merge loop.
//!
//! The typical pipeline is:
//!
//! 1. load a [`Graph`] with [`graph::parse_edge_list`] (or generate one with
//!    [`benchmark::generate_hierarchical`]),
//! 2. build scales with [`driver::sample_scales`],
//! 3. run [`driver::detect_multiscale`], which returns one [`ScaleResult`] per
//!    scale value,
//! 4. evaluate covers with the overlapping NMI in [`metrics`].

pub mod benchmark;
pub mod community;
pub mod cover;
pub mod driver;
pub mod error;
pub mod fitness;
pub mod graph;
pub mod growth;
pub mod membership;
pub mod merge;
pub mod metrics;
mod parallel;
pub mod seeding;

pub use benchmark::{generate_hierarchical, measure_mixing, BenchmarkConfig, BenchmarkNetwork};
pub use community::{community_degrees, Community, CommunityId};
pub use cover::{Cover, CoverSnapshot, CommunitySnapshot};
pub use driver::{detect_multiscale, sample_scales, stability_flags, Detector, DriverConfig, ScaleFlags, ScaleResult};
pub use error::{Error, Result};
pub use fitness::{community_fitness, cover_quality, node_fitness, ranking_factor, ScaleParameter};
pub use graph::{Graph, NodeId};
pub use growth::{grow_community, overlap_precheck, GrowthConfig, GrowthOutcome, SizeRegistry};
pub use membership::{rebuild_membership, MembershipOp, MembershipTable};
pub use merge::{execute_merges, find_merge_candidates, partition_disjoint_pairs, KeeperPolicy, MergePair};
pub use metrics::{overlapping_nmi, reference_nmi, windowed_nmi, NmiReport, WindowDirection};
pub use seeding::{select_seeds, SeedConfig, SeedRule};
