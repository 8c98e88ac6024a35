//! Check phase (finding significantly overlapping pairs) and merge phase.
//!
//! Two communities qualify for merging when they share at least
//! `ceil(eta * min(|a|, |b|))` nodes. Pairs are merged in batches in which
//! no community appears twice; after each batch every remaining pair that
//! mentions an absorbed community is redirected to its keeper.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::community::{Community, CommunityId};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::growth::overlap_threshold;
use crate::membership::MembershipTable;
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergePair {
    pub keep: CommunityId,
    pub absorb: CommunityId,
}

impl MergePair {
    pub fn new(keep: CommunityId, absorb: CommunityId) -> Result<Self> {
        if keep == absorb {
            return Err(Error::InvalidParameter(format!("cannot merge {keep} into itself")));
        }
        Ok(Self { keep, absorb })
    }

    fn key(self) -> (CommunityId, CommunityId) {
        (self.keep.min(self.absorb), self.keep.max(self.absorb))
    }
}

/// Which side of a pair keeps its id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeeperPolicy {
    /// The larger community keeps its id; equal sizes go to the lower id.
    #[default]
    LargerCommunity,
    /// The community that was checked keeps its id.
    Checked,
}

/// Pairs `(c, partner)` for every `c` in `check_set` that shares enough
/// nodes with some other community; each `c` stops at its first partner.
/// Unordered duplicates are dropped, keeping the first emitted orientation.
pub fn find_merge_candidates(
    check_set: &[CommunityId],
    table: &MembershipTable,
    cover: &Cover,
    eta: f64,
    threads: usize,
) -> Vec<MergePair> {
    let positions = cover.positions();
    let size_of = |id: CommunityId| positions.get(&id).map(|&i| cover.communities()[i].len());
    let found = parallel::flat_map_chunks(threads, check_set, |chunk| {
        let mut shared: FxHashMap<CommunityId, usize> = FxHashMap::default();
        chunk
            .iter()
            .filter_map(|&id| {
                let c = &cover.communities()[*positions.get(&id)?];
                shared.clear();
                c.nodes().into_iter().find_map(|v| {
                    table.with_set(v, |set| {
                        set.iter().filter(|&&o| o != id).find_map(|&o| {
                            let other = size_of(o)?;
                            let count = shared.entry(o).or_insert(0);
                            *count += 1;
                            (*count >= overlap_threshold(eta, c.len().min(other))).then_some(MergePair { keep: id, absorb: o })
                        })
                    })
                })
            })
            .collect()
    });
    dedup_pairs(found)
}

fn dedup_pairs(pairs: impl IntoIterator<Item = MergePair>) -> Vec<MergePair> {
    let mut seen = FxHashSet::default();
    pairs
        .into_iter()
        .filter(|p| p.keep != p.absorb && seen.insert(p.key()))
        .collect()
}

/// Splits `pairs` into the first maximal batch (scanned in order, no id
/// repeated) and the rest.
fn first_batch(pairs: Vec<MergePair>) -> (Vec<MergePair>, Vec<MergePair>) {
    let mut used = FxHashSet::default();
    pairs
        .into_iter()
        .partition(|p| !used.contains(&p.keep) && !used.contains(&p.absorb) && {
            used.insert(p.keep);
            used.insert(p.absorb);
            true
        })
}

/// First-fit partition of `pairs` into batches in which no community id
/// appears twice.
pub fn partition_disjoint_pairs(pairs: &[MergePair]) -> Vec<Vec<MergePair>> {
    let mut batches: Vec<(FxHashSet<CommunityId>, Vec<MergePair>)> = Vec::new();
    for &p in pairs {
        match batches.iter_mut().find(|(used, _)| !used.contains(&p.keep) && !used.contains(&p.absorb)) {
            Some((used, batch)) => {
                used.extend([p.keep, p.absorb]);
                batch.push(p);
            }
            None => batches.push(([p.keep, p.absorb].into_iter().collect(), vec![p])),
        }
    }
    batches.into_iter().map(|(_, b)| b).collect()
}

fn resolve(alias: &FxHashMap<CommunityId, CommunityId>, mut id: CommunityId) -> CommunityId {
    while let Some(&next) = alias.get(&id) {
        id = next;
    }
    id
}

/// Merges every pair, redirecting pairs whose community was absorbed in an
/// earlier batch to the keeper. Returns the number of communities absorbed.
pub fn execute_merges(
    graph: &Graph,
    cover: &mut Cover,
    pairs: &[MergePair],
    table: &MembershipTable,
    policy: KeeperPolicy,
    threads: usize,
) -> Result<usize> {
    let positions = cover.positions();
    for p in pairs {
        for id in [p.keep, p.absorb] {
            if !positions.contains_key(&id) {
                return Err(Error::UnknownCommunity(id));
            }
        }
    }
    let mut slots: Vec<Option<Community>> = std::mem::take(cover).into_parts().into_iter().map(Some).collect();
    let mut alias: FxHashMap<CommunityId, CommunityId> = FxHashMap::default();
    let mut pending = dedup_pairs(pairs.iter().copied());
    let mut absorbed = 0;

    while !pending.is_empty() {
        let (batch, rest) = first_batch(pending);
        let mut jobs = Vec::with_capacity(batch.len());
        for p in batch {
            let (mut keep, mut gone) = (positions[&p.keep], positions[&p.absorb]);
            if policy == KeeperPolicy::LargerCommunity {
                let size = |i: usize| slots[i].as_ref().map_or(0, Community::len);
                let (kept, lost) = (size(keep), size(gone));
                if lost > kept || (lost == kept && p.absorb < p.keep) {
                    std::mem::swap(&mut keep, &mut gone);
                }
            }
            let k = slots[keep].take().ok_or(Error::UnknownCommunity(p.keep))?;
            let g = slots[gone].take().ok_or(Error::UnknownCommunity(p.absorb))?;
            jobs.push((keep, k, g));
        }
        let results = parallel::map_mut(threads, &mut jobs, |(_, keeper, gone)| {
            keeper.absorb(graph, gone)?;
            for v in gone.members() {
                table.rename(v, gone.id(), keeper.id());
            }
            Ok::<_, Error>(())
        });
        results.into_iter().collect::<Result<()>>()?;
        for (slot, keeper, gone) in jobs {
            alias.insert(gone.id(), keeper.id());
            slots[slot] = Some(keeper);
            absorbed += 1;
        }
        pending = dedup_pairs(rest.into_iter().map(|p| MergePair {
            keep: resolve(&alias, p.keep),
            absorb: resolve(&alias, p.absorb),
        }));
    }
    *cover = Cover::from_parts(slots.into_iter().flatten().collect());
    Ok(absorbed)
}
