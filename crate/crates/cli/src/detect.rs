use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use mscd_core::cover::{read_cover, write_cover};
use mscd_core::driver::{default_threads, output_sets};
use mscd_core::{detect_multiscale, sample_scales, stability_flags, DriverConfig, KeeperPolicy, SeedConfig, SeedRule};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::files::{self, InputDigest};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DetectArgs {
    /// Edge list, one `u v [weight]` per line.
    pub input: PathBuf,

    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0.5)]
    pub scales_min: f64,

    #[arg(long, default_value_t = 1.0)]
    pub scales_max: f64,

    #[arg(long, default_value_t = 100)]
    pub scales_count: usize,

    /// Merge threshold: minimum shared fraction of the smaller community.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,

    /// Maximum number of removal passes per growth.
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Worker threads [default: hardware threads].
    #[arg(long, env = "MSCD_THREADS")]
    pub threads: Option<usize>,

    /// 1: seeds exclude their neighbours; 2: also their neighbours' neighbours.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub seed_rule: u8,

    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,

    #[arg(long, default_value_t = 100)]
    pub max_phase_rounds: usize,

    /// Start from this cover instead of random seeds.
    #[arg(long)]
    pub initial_cover: Option<PathBuf>,

    /// Write a singleton community for every node left in no community.
    #[arg(long)]
    pub emit_singletons: bool,

    /// The checked community keeps its id when merging, whatever its size.
    #[arg(long)]
    pub checked_keeper: bool,
}

/// One row of `scales.csv`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleRow {
    pub scale_index: usize,
    pub alpha: f64,
    pub community_count: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub phase_rounds: usize,
    pub unassigned_nodes: usize,
    pub round_cap_hit: bool,
    pub mega_community: bool,
    pub stable_run_length: usize,
    pub cover_file: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScaleTiming {
    pub scale_index: usize,
    pub alpha: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DetectManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: DetectArgs,
    pub threads: usize,
    pub inputs: Vec<InputDigest>,
    pub node_count: usize,
    pub edge_count: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges_merged: usize,
    pub scales: Vec<ScaleTiming>,
    pub total_wall_time_ms: f64,
    /// Best effort; absent where the platform does not report it.
    pub peak_memory_kib: Option<u64>,
}

pub const MANIFEST: &str = "manifest.json";
pub const SCALES: &str = "scales.csv";

pub fn cover_file_name(index: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(3);
    format!("cover_{index:0width$}.txt")
}

pub fn run(args: &DetectArgs) -> Result<()> {
    let start = Instant::now();
    let (graph, stats, digest) = files::load_graph(&args.input)?;
    let mut inputs = vec![digest];

    let scales = sample_scales(args.scales_min, args.scales_max, args.scales_count)?;
    let mut config = DriverConfig::new(&scales)?;
    config.eta = args.eta;
    config.removal_cap = args.k;
    config.threads = args.threads.unwrap_or_else(default_threads);
    config.max_phase_rounds = args.max_phase_rounds;
    config.seed = SeedConfig {
        rule: if args.seed_rule == 2 { SeedRule::ExcludeSecondNeighbors } else { SeedRule::ExcludeNeighbors },
        rng_seed: args.rng_seed,
    };
    config.keeper = if args.checked_keeper { KeeperPolicy::Checked } else { KeeperPolicy::LargerCommunity };
    if let Some(path) = &args.initial_cover {
        let (bytes, digest) = files::read_input(path)?;
        config.initial_cover = Some(read_cover(&graph, bytes.as_slice()).map_err(CliError::input(path))?);
        inputs.push(digest);
    }
    config.validate()?;
    let threads = config.threads;

    let results = detect_multiscale(&graph, config)?;
    let flags = stability_flags(&results, graph.node_count());

    files::create_dir(&args.out)?;
    let mut rows = Vec::with_capacity(results.len());
    for (i, (r, f)) in results.iter().zip(&flags).enumerate() {
        let name = cover_file_name(i, results.len());
        let sets = output_sets(&r.cover, graph.node_count(), args.emit_singletons);
        files::write_file(&args.out.join(&name), |out| Ok(write_cover(&graph, &sets, out)?))?;
        rows.push(ScaleRow {
            scale_index: i,
            alpha: r.alpha,
            community_count: r.community_count,
            q: r.quality,
            phase_rounds: r.phase_rounds,
            unassigned_nodes: r.unassigned_nodes,
            round_cap_hit: r.round_cap_hit,
            mega_community: f.mega_community,
            stable_run_length: f.run_length,
            cover_file: name,
        });
    }
    files::write_file(&args.out.join(SCALES), |out| {
        let mut csv = csv::Writer::from_writer(out);
        for row in &rows {
            csv.serialize(row)?;
        }
        csv.flush().map_err(CliError::io(args.out.join(SCALES)))
    })?;

    let manifest = DetectManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "detect".into(),
        config: args.clone(),
        threads,
        inputs,
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        self_loops_dropped: stats.self_loops_dropped,
        duplicate_edges_merged: stats.duplicates_merged,
        scales: results
            .iter()
            .enumerate()
            .map(|(i, r)| ScaleTiming {
                scale_index: i,
                alpha: r.alpha,
                wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
            })
            .collect(),
        total_wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        peak_memory_kib: files::peak_memory_kib(),
    };
    files::write_file(&args.out.join(MANIFEST), |out| {
        serde_json::to_writer_pretty(&mut *out, &manifest)?;
        out.write_all(b"\n").map_err(CliError::io(args.out.join(MANIFEST)))
    })?;
    log::info!(
        "{} scales in {:.1} ms, output in {}",
        results.len(),
        manifest.total_wall_time_ms,
        args.out.display()
    );
    Ok(())
}
