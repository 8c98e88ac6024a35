//! The LFK local fitness.

use crate::community::Community;
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Relative slack below which a fitness change counts as no change, so that
/// rounding noise cannot pass for a strict improvement.
const IMPROVEMENT_TOLERANCE: f64 = 1e-12;

/// Resolution exponent. Large values favour small communities.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaleParameter(f64);

impl ScaleParameter {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!("scale must be a positive number, got {alpha}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `k_in / (k_in + k_out)^alpha`; zero for a community without any edge
/// weight.
#[inline]
pub fn community_fitness(k_in: f64, k_out: f64, alpha: f64) -> f64 {
    let total = k_in + k_out;
    if total <= 0.0 {
        0.0
    } else {
        k_in / total.powf(alpha)
    }
}

/// True when `candidate` beats `current` by more than rounding noise.
#[inline]
pub(crate) fn improves(candidate: f64, current: f64) -> bool {
    candidate - current > IMPROVEMENT_TOLERANCE * current.abs().max(1.0)
}

/// Fitness of `node` with respect to `community`: `f(c + node) - f(c - node)`.
///
/// For a boundary node this is the gain from adding it; for a member it is
/// the loss from removing it. Both are evaluated from the cached degrees
/// without touching the community.
pub fn node_fitness(graph: &Graph, community: &Community, node: NodeId, alpha: f64) -> Result<f64> {
    if node >= graph.node_count() {
        return Err(Error::InvalidNode(node));
    }
    let degree = graph.weighted_degree(node);
    if community.contains(node) {
        let (k_in, k_out) = community.degrees_without(node, degree);
        Ok(community.fitness(alpha) - community_fitness(k_in, k_out, alpha))
    } else if community.weight_into(node).is_some() {
        let (k_in, k_out) = community.degrees_with(node, degree);
        Ok(community_fitness(k_in, k_out, alpha) - community.fitness(alpha))
    } else {
        Err(Error::Unrelated { node, community: community.id() })
    }
}

/// Priority of a candidate: `2 d_in / (d_in + d_out)^alpha`.
pub fn ranking_factor(d_in: f64, d_out: f64, alpha: f64) -> Result<f64> {
    if !(d_in > 0.0) {
        return Err(Error::NotANeighbor(d_in));
    }
    Ok(rank(d_in, d_in + d_out, alpha))
}

#[inline]
pub(crate) fn rank(d_in: f64, degree: f64, alpha: f64) -> f64 {
    2.0 * d_in / degree.powf(alpha)
}

/// Mean community fitness over a cover.
pub fn cover_quality(cover: &Cover, alpha: f64) -> Result<f64> {
    if cover.is_empty() {
        return Err(Error::EmptyCover);
    }
    let sum: f64 = cover.communities().iter().map(|c| c.fitness(alpha)).sum();
    Ok(sum / cover.len() as f64)
}
