use std::path::PathBuf;

use clap::Args;
use mscd_core::cover::write_cover;
use mscd_core::graph::write_edge_list;
use mscd_core::{generate_hierarchical, BenchmarkConfig};

use crate::error::{CliError, Result};
use crate::files;

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 1000)]
    pub n: usize,

    #[arg(long, default_value_t = 25)]
    pub micro_size: usize,

    #[arg(long, default_value_t = 4)]
    pub micros_per_macro: usize,

    #[arg(long, default_value_t = 20.0)]
    pub avg_degree: f64,

    /// Fraction of a node's edges leaving its macro community.
    #[arg(long, default_value_t = 0.05)]
    pub mu1: f64,

    /// Fraction of a node's edges leaving its micro community.
    #[arg(long, default_value_t = 0.2)]
    pub mu2: f64,

    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

pub const NETWORK: &str = "network.txt";
pub const MICRO: &str = "micro.txt";
pub const MACRO: &str = "macro.txt";
pub const MANIFEST: &str = "generation.txt";

pub fn run(args: &GenerateArgs) -> Result<()> {
    let config = BenchmarkConfig {
        n: args.n,
        micro_size: args.micro_size,
        micros_per_macro: args.micros_per_macro,
        avg_degree: args.avg_degree,
        mu1: args.mu1,
        mu2: args.mu2,
        rng_seed: args.rng_seed,
    };
    config.validate()?;
    let net = generate_hierarchical(&config)?;

    files::create_dir(&args.out)?;
    files::write_file(&args.out.join(NETWORK), |out| Ok(write_edge_list(&net.graph, out)?))?;
    files::write_file(&args.out.join(MICRO), |out| Ok(write_cover(&net.graph, &net.micro_cover, out)?))?;
    files::write_file(&args.out.join(MACRO), |out| Ok(write_cover(&net.graph, &net.macro_cover, out)?))?;
    let path = args.out.join(MANIFEST);
    files::write_file(&path, |out| {
        let lines = [
            ("tool", env!("CARGO_PKG_NAME").to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("n", config.n.to_string()),
            ("micro_size", config.micro_size.to_string()),
            ("micros_per_macro", config.micros_per_macro.to_string()),
            ("avg_degree", config.avg_degree.to_string()),
            ("mu1", config.mu1.to_string()),
            ("mu2", config.mu2.to_string()),
            ("rng_seed", config.rng_seed.to_string()),
            ("edges", net.graph.edge_count().to_string()),
            ("realized_mu1", net.realized_mu1.to_string()),
            ("realized_mu2", net.realized_mu2.to_string()),
        ];
        for (key, value) in lines {
            writeln!(out, "{key} = {value}").map_err(CliError::io(&path))?;
        }
        Ok(())
    })?;
    log::info!(
        "{} nodes, {} edges, realized mu1 {:.4}, mu2 {:.4}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.realized_mu1,
        net.realized_mu2
    );
    Ok(())
}
