use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mscd_core::cover::read_cover;
use mscd_core::driver::stable_runs;
use mscd_core::{NmiReport, WindowDirection};
use serde::Serialize;

use crate::detect::{DetectManifest, ScaleRow, MANIFEST, SCALES};
use crate::error::{CliError, Result};
use crate::files;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Window {
    Forward,
    Backward,
    Centered,
}

impl From<Window> for WindowDirection {
    fn from(w: Window) -> Self {
        match w {
            Window::Forward => Self::Forward,
            Window::Backward => Self::Backward,
            Window::Centered => Self::Centered,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Output directory of a detect run.
    pub dir: PathBuf,

    /// Edge list the run was made on [default: the input named in the manifest].
    #[arg(long)]
    pub graph: Option<PathBuf>,

    /// Reference cover, as NAME=PATH or PATH (named after the file stem).
    #[arg(long = "reference", value_parser = parse_reference)]
    pub references: Vec<(String, PathBuf)>,

    /// Minimum peak NMI for a run to count as a detection range.
    #[arg(long, default_value_t = 0.9)]
    pub threshold: f64,

    #[arg(long, value_enum, default_value_t = Window::Forward)]
    pub window: Window,
}

fn parse_reference(arg: &str) -> std::result::Result<(String, PathBuf), String> {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        Some(_) => Err(format!("expected NAME=PATH, got {arg:?}")),
        None => {
            let path = PathBuf::from(arg);
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| format!("cannot derive a name from {arg:?}"))?
                .to_string();
            Ok((name, path))
        }
    }
}

/// A run of consecutive scales with a constant community count whose best
/// score reaches the threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRange {
    pub measure: String,
    pub first_scale: usize,
    pub last_scale: usize,
    pub alpha_high: f64,
    pub alpha_low: f64,
    pub community_count: usize,
    pub peak_nmi: f64,
}

/// Maximal runs (two or more scales) of equal `counts` whose peak `score`
/// is at least `threshold`. Scales without a score are ignored for the peak.
pub fn detection_ranges(
    measure: &str,
    alphas: &[f64],
    counts: &[usize],
    scores: &[Option<f64>],
    threshold: f64,
) -> Vec<DetectionRange> {
    stable_runs(counts)
        .into_iter()
        .filter(|run| run.len() >= 2)
        .filter_map(|run| {
            let peak = scores[run.clone()].iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            (peak >= threshold).then(|| DetectionRange {
                measure: measure.to_string(),
                first_scale: run.start,
                last_scale: run.end - 1,
                alpha_high: alphas[run.start],
                alpha_low: alphas[run.end - 1],
                community_count: counts[run.start],
                peak_nmi: peak,
            })
        })
        .collect()
}

pub const EVALUATION: &str = "evaluation.csv";
pub const RANGES: &str = "ranges.csv";

fn read_manifest(dir: &Path) -> Result<DetectManifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn fmt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run(args: &EvaluateArgs) -> Result<()> {
    let graph_path = match &args.graph {
        Some(p) => p.clone(),
        None => read_manifest(&args.dir)?.config.input,
    };
    let (graph, _, _) = files::load_graph(&graph_path)?;
    let n = graph.node_count();

    let scales_path = args.dir.join(SCALES);
    let (bytes, _) = files::read_input(&scales_path)?;
    let rows: Vec<ScaleRow> = csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    let mut covers = Vec::with_capacity(rows.len());
    for row in &rows {
        let path = args.dir.join(&row.cover_file);
        let (bytes, _) = files::read_input(&path)?;
        covers.push(read_cover(&graph, bytes.as_slice()).map_err(CliError::input(&path))?);
    }
    let mut references = Vec::with_capacity(args.references.len());
    for (name, path) in &args.references {
        let (bytes, _) = files::read_input(path)?;
        references.push((name.clone(), read_cover(&graph, bytes.as_slice()).map_err(CliError::input(path))?));
    }

    let report = NmiReport::compute(&covers, n, &references, args.window.into())?;

    let path = args.dir.join(EVALUATION);
    files::write_file(&path, |out| {
        let mut csv = csv::Writer::from_writer(out);
        let mut header = vec!["scale_index".to_string(), "alpha".into(), "community_count".into(), "nmi_w3".into(), "nmi_w5".into()];
        header.extend(report.references.iter().map(|(name, _)| format!("nmi_ref_{name}")));
        csv.write_record(&header)?;
        for (i, row) in rows.iter().enumerate() {
            let mut record = vec![
                row.scale_index.to_string(),
                row.alpha.to_string(),
                row.community_count.to_string(),
                fmt(report.nmi_w3[i]),
                fmt(report.nmi_w5[i]),
            ];
            record.extend(report.references.iter().map(|(_, series)| series[i].to_string()));
            csv.write_record(&record)?;
        }
        csv.flush().map_err(CliError::io(&path))
    })?;

    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let counts: Vec<usize> = rows.iter().map(|r| r.community_count).collect();
    let ranges: Vec<DetectionRange> = if report.references.is_empty() {
        detection_ranges("nmi_w3", &alphas, &counts, &report.nmi_w3, args.threshold)
    } else {
        report
            .references
            .iter()
            .flat_map(|(name, series)| {
                let scores: Vec<Option<f64>> = series.iter().copied().map(Some).collect();
                detection_ranges(&format!("nmi_ref_{name}"), &alphas, &counts, &scores, args.threshold)
            })
            .collect()
    };
    let path = args.dir.join(RANGES);
    files::write_file(&path, |out| {
        let mut csv = csv::Writer::from_writer(out);
        for r in &ranges {
            csv.serialize(r)?;
        }
        csv.flush().map_err(CliError::io(&path))
    })?;
    let mut stdout = std::io::stdout().lock();
    for r in &ranges {
        let _ = writeln!(
            stdout,
            "{}: [{}, {}] {} communities, peak NMI {:.3}",
            r.measure, r.alpha_low, r.alpha_high, r.community_count, r.peak_nmi
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_need_a_constant_run_and_a_peak() {
        let alphas = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5];
        let counts = [40, 40, 40, 10, 10, 7];
        let scores = [Some(0.95), Some(0.99), Some(0.9), Some(0.5), Some(0.8), Some(1.0)];
        let r = detection_ranges("x", &alphas, &counts, &scores, 0.9);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].first_scale, r[0].last_scale, r[0].community_count), (0, 2, 40));
        assert_eq!((r[0].alpha_high, r[0].alpha_low, r[0].peak_nmi), (1.0, 0.8, 0.99));
        assert_eq!(detection_ranges("x", &alphas, &counts, &scores, 0.75).len(), 2);
        let none = [None; 6];
        assert!(detection_ranges("x", &alphas, &counts, &none, 0.0).is_empty());
    }

    #[test]
    fn reference_arguments() {
        assert_eq!(parse_reference("macro=a/b.txt").unwrap(), ("macro".into(), PathBuf::from("a/b.txt")));
        assert_eq!(parse_reference("dir/micro.txt").unwrap(), ("micro".into(), PathBuf::from("dir/micro.txt")));
        assert!(parse_reference("=x").is_err());
    }
}
