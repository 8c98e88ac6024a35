use thiserror::Error;

use crate::community::CommunityId;
use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no nodes")]
    EmptyInput,

    #[error("node id {0} is out of range")]
    InvalidNode(NodeId),

    #[error("unknown node label {0}")]
    UnknownLabel(u64),

    #[error("node {node} is already a member of community {community}")]
    AlreadyMember { node: NodeId, community: CommunityId },

    #[error("node {node} is not a member of community {community}")]
    NotMember { node: NodeId, community: CommunityId },

    #[error("removing node {node} would empty community {community}; dissolve it instead")]
    WouldEmpty { node: NodeId, community: CommunityId },

    #[error("node {node} is neither a member of nor adjacent to community {community}")]
    Unrelated { node: NodeId, community: CommunityId },

    #[error("ranking factor needs a positive weight into the community, got {0}")]
    NotANeighbor(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cover has no communities")]
    EmptyCover,

    #[error("cover contains an empty community")]
    EmptyCommunity,

    #[error("duplicate community id {0}")]
    DuplicateCommunity(CommunityId),

    #[error("unknown community {0}")]
    UnknownCommunity(CommunityId),

    #[error("no node has two or more neighbours, so no seed could be selected; supply an initial cover")]
    NoSeeds,

    #[error("cover is not a partition of the nodes: {0}")]
    NotPartition(String),

    #[error("benchmark generation is infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
