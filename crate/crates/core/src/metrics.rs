//! Normalized mutual information between overlapping covers, and the
//! per-scale stability and accuracy series built on it.
//!
//! Each community is a binary indicator variable over the nodes. For a
//! community `X_k` the conditional entropy `H(X_k | Y_l)` is minimised over
//! the communities `Y_l` of the other cover whose joint distribution is
//! "matched" (`h(p11) + h(p00) >= h(p01) + h(p10)`); with no matched partner
//! the normalized term is 1. Logs are base 2 and `0 log 0 = 0`. A node in no
//! community simply has an all-zero row.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::NodeId;

fn h(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of a binary variable that is 1 on `ones` of `n` nodes.
fn entropy(ones: usize, n: usize) -> f64 {
    h(ones as f64 / n as f64) + h((n - ones) as f64 / n as f64)
}

/// Communities as sorted, deduplicated node lists, checked against `n`.
fn normalize<AS, S>(cover: &AS, n: usize) -> Result<Vec<Vec<NodeId>>>
where
    AS: AsRef<[S]> + ?Sized,
    S: AsRef<[NodeId]>,
{
    cover
        .as_ref()
        .iter()
        .map(|c| {
            let mut c = c.as_ref().to_vec();
            if c.is_empty() {
                return Err(Error::EmptyCommunity);
            }
            c.sort_unstable();
            c.dedup();
            match c.last() {
                Some(&v) if v >= n => Err(Error::InvalidNode(v)),
                _ => Ok(c),
            }
        })
        .collect()
}

/// Mean normalized conditional entropy of the communities of `x` given `y`.
fn side(x: &[Vec<NodeId>], y: &[Vec<NodeId>], n: usize) -> f64 {
    let nf = n as f64;
    let mut memberships: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (l, c) in y.iter().enumerate() {
        for &v in c {
            memberships[v].push(l as u32);
        }
    }
    let mut y_sizes: FxHashMap<usize, usize> = FxHashMap::default();
    for c in y {
        *y_sizes.entry(c.len()).or_default() += 1;
    }
    let mut y_sizes: Vec<(usize, usize)> = y_sizes.into_iter().collect();
    y_sizes.sort_unstable();

    // H(X_k | Y_l) when matched, else None
    let conditional = |a: usize, b: usize, c: usize| -> Option<f64> {
        let p11 = c as f64 / nf;
        let p10 = (a - c) as f64 / nf;
        let p01 = (b - c) as f64 / nf;
        let p00 = (n + c - a - b) as f64 / nf;
        if h(p11) + h(p00) < h(p01) + h(p10) {
            return None;
        }
        let joint = h(p11) + h(p10) + h(p01) + h(p00);
        Some((joint - entropy(b, n)).max(0.0))
    };

    let mut shared: FxHashMap<u32, usize> = FxHashMap::default();
    let mut touched_sizes: FxHashMap<usize, usize> = FxHashMap::default();
    let mut terms: Vec<f64> = x
        .iter()
        .map(|xk| {
            let a = xk.len();
            let h_a = entropy(a, n);
            if h_a <= 0.0 {
                return 0.0;
            }
            shared.clear();
            for &v in xk {
                for &l in &memberships[v] {
                    *shared.entry(l).or_default() += 1;
                }
            }
            touched_sizes.clear();
            let mut best = f64::INFINITY;
            for (&l, &c) in &shared {
                let b = y[l as usize].len();
                *touched_sizes.entry(b).or_default() += 1;
                if let Some(v) = conditional(a, b, c) {
                    best = best.min(v);
                }
            }
            // communities disjoint from X_k depend only on their size
            for &(b, count) in &y_sizes {
                if touched_sizes.get(&b).copied().unwrap_or(0) < count {
                    if let Some(v) = conditional(a, b, 0) {
                        best = best.min(v);
                    }
                }
            }
            (best / h_a).min(1.0)
        })
        .collect();
    // summing in sorted order keeps the result independent of community order
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum::<f64>() / x.len() as f64
}

/// Overlapping NMI of two covers over nodes `0..node_count`. Two empty
/// covers score 1, one empty cover scores 0.
pub fn overlapping_nmi<AX, SX, AY, SY>(x: &AX, y: &AY, node_count: usize) -> Result<f64>
where
    AX: AsRef<[SX]> + ?Sized,
    SX: AsRef<[NodeId]>,
    AY: AsRef<[SY]> + ?Sized,
    SY: AsRef<[NodeId]>,
{
    if node_count == 0 {
        return Err(Error::InvalidParameter("NMI needs at least one node".into()));
    }
    let x = normalize(x, node_count)?;
    let y = normalize(y, node_count)?;
    if x.is_empty() && y.is_empty() {
        return Ok(1.0);
    }
    if x.is_empty() || y.is_empty() {
        return Ok(0.0);
    }
    let value = 1.0 - 0.5 * (side(&x, &y, node_count) + side(&y, &x, node_count));
    Ok(value.clamp(0.0, 1.0))
}

/// Which neighbouring scales a window averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowDirection {
    /// `s + 1 ..= s + p - 1`
    #[default]
    Forward,
    /// `s - p + 1 ..= s - 1`
    Backward,
    /// `p - 1` neighbours split around `s`, the extra one forward when odd.
    Centered,
}

impl WindowDirection {
    fn offsets(self, p: usize) -> Vec<isize> {
        let span = p as isize - 1;
        match self {
            Self::Forward => (1..=span).collect(),
            Self::Backward => (1..=span).map(|j| -j).collect(),
            Self::Centered => {
                let back = span / 2;
                (-back..=span - back).filter(|&j| j != 0).collect()
            }
        }
    }
}

/// For each scale, the mean NMI between its cover and the covers inside its
/// window; `None` where the window holds no other scale.
pub fn windowed_nmi<S, C>(covers: &[C], node_count: usize, p: usize, direction: WindowDirection) -> Result<Vec<Option<f64>>>
where
    C: AsRef<[S]>,
    S: AsRef<[NodeId]>,
{
    if p < 2 {
        return Err(Error::InvalidParameter(format!("window size must be at least 2, got {p}")));
    }
    let normalized = covers
        .iter()
        .map(|c| normalize(c.as_ref(), node_count))
        .collect::<Result<Vec<_>>>()?;
    let mut cache: FxHashMap<(usize, usize), f64> = FxHashMap::default();
    let offsets = direction.offsets(p);
    (0..covers.len())
        .map(|s| {
            let partners: Vec<usize> = offsets
                .iter()
                .filter_map(|&j| s.checked_add_signed(j))
                .filter(|&t| t < covers.len())
                .collect();
            if partners.is_empty() {
                return Ok(None);
            }
            let mut sum = 0.0;
            for t in &partners {
                let key = (s.min(*t), s.max(*t));
                let v = match cache.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = overlapping_nmi(&normalized[key.0], &normalized[key.1], node_count)?;
                        cache.insert(key, v);
                        v
                    }
                };
                sum += v;
            }
            Ok(Some(sum / partners.len() as f64))
        })
        .collect()
}

/// NMI of every scale's cover against one reference cover.
pub fn reference_nmi<S, C, R, RS>(covers: &[C], reference: &R, node_count: usize) -> Result<Vec<f64>>
where
    C: AsRef<[S]>,
    S: AsRef<[NodeId]>,
    R: AsRef<[RS]> + ?Sized,
    RS: AsRef<[NodeId]>,
{
    let reference = normalize(reference, node_count)?;
    covers
        .iter()
        .map(|c| overlapping_nmi(c.as_ref(), &reference, node_count))
        .collect()
}

/// Per-scale stability (windows of 3 and 5) and accuracy against named
/// reference covers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NmiReport {
    pub nmi_w3: Vec<Option<f64>>,
    pub nmi_w5: Vec<Option<f64>>,
    pub references: Vec<(String, Vec<f64>)>,
}

impl NmiReport {
    pub fn compute<S, C>(
        covers: &[C],
        node_count: usize,
        references: &[(String, Vec<Vec<NodeId>>)],
        direction: WindowDirection,
    ) -> Result<Self>
    where
        C: AsRef<[S]>,
        S: AsRef<[NodeId]>,
    {
        Ok(Self {
            nmi_w3: windowed_nmi(covers, node_count, 3, direction)?,
            nmi_w5: windowed_nmi(covers, node_count, 5, direction)?,
            references: references
                .iter()
                .map(|(name, r)| Ok((name.clone(), reference_nmi(covers, r, node_count)?)))
                .collect::<Result<_>>()?,
        })
    }
}
