//! Per-node community membership shared by the growth workers.
//!
//! Every node owns its own lock, so workers growing communities in different
//! regions of the graph never contend. The lock is `parking_lot::RwLock`,
//! which parks new readers as soon as a writer is queued; a pending writer
//! therefore cannot be starved by a stream of readers.

use parking_lot::RwLock;
use smallvec::SmallVec;

use crate::community::CommunityId;
use crate::cover::Cover;
use crate::graph::NodeId;

pub type MembershipSet = SmallVec<[CommunityId; 4]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipOp {
    Add,
    Remove,
}

#[derive(Debug, Default)]
pub struct MembershipTable {
    sets: Vec<RwLock<MembershipSet>>,
}

impl MembershipTable {
    pub fn new(node_count: usize) -> Self {
        Self {
            sets: (0..node_count).map(|_| RwLock::new(MembershipSet::new())).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.sets.len()
    }

    /// Idempotent add or remove of `community` in `node`'s set.
    pub fn update(&self, node: NodeId, community: CommunityId, op: MembershipOp) {
        match op {
            MembershipOp::Add => self.add(node, community),
            MembershipOp::Remove => self.remove(node, community),
        }
    }

    pub fn add(&self, node: NodeId, community: CommunityId) {
        let mut set = self.sets[node].write();
        if let Err(pos) = set.binary_search(&community) {
            set.insert(pos, community);
        }
    }

    pub fn remove(&self, node: NodeId, community: CommunityId) {
        let mut set = self.sets[node].write();
        if let Ok(pos) = set.binary_search(&community) {
            set.remove(pos);
        }
    }

    /// Replaces `from` by `to` in a single write.
    pub fn rename(&self, node: NodeId, from: CommunityId, to: CommunityId) {
        let mut set = self.sets[node].write();
        if let Ok(pos) = set.binary_search(&from) {
            set.remove(pos);
        }
        if let Err(pos) = set.binary_search(&to) {
            set.insert(pos, to);
        }
    }

    pub fn contains(&self, node: NodeId, community: CommunityId) -> bool {
        self.sets[node].read().binary_search(&community).is_ok()
    }

    /// Copy of `node`'s set, ascending by id.
    pub fn snapshot(&self, node: NodeId) -> MembershipSet {
        self.sets[node].read().clone()
    }

    /// Runs `f` on `node`'s set while holding its read lock.
    #[inline]
    pub fn with_set<R>(&self, node: NodeId, f: impl FnOnce(&[CommunityId]) -> R) -> R {
        f(&self.sets[node].read())
    }

    /// Number of nodes that belong to no community.
    pub fn unassigned_count(&self) -> usize {
        self.sets.iter().filter(|s| s.read().is_empty()).count()
    }

    #[cfg(test)]
    pub(crate) fn raw(&self, node: NodeId) -> &RwLock<MembershipSet> {
        &self.sets[node]
    }
}

/// Table mapping each node to exactly the communities of `cover` that
/// contain it.
pub fn rebuild_membership(cover: &Cover, node_count: usize) -> MembershipTable {
    let mut sets: Vec<MembershipSet> = vec![MembershipSet::new(); node_count];
    for c in cover.communities() {
        for v in c.members() {
            sets[v].push(c.id());
        }
    }
    MembershipTable {
        sets: sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                RwLock::new(s)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use std::sync::atomic::{AtomicBool, Ordering};
    use std::sync::Arc;
    use std::thread;
    use std::time::Duration;

    const C1: CommunityId = CommunityId(1);
    const C2: CommunityId = CommunityId(2);

    #[test]
    fn add_is_idempotent_and_remove_undoes_it() {
        let t = MembershipTable::new(2);
        t.update(0, C1, MembershipOp::Add);
        assert_eq!(t.snapshot(0).as_slice(), &[C1]);
        t.update(0, C1, MembershipOp::Add);
        assert_eq!(t.snapshot(0).as_slice(), &[C1]);
        t.update(0, C1, MembershipOp::Remove);
        assert!(t.snapshot(0).is_empty());
        t.update(0, C1, MembershipOp::Remove);
        assert!(t.snapshot(0).is_empty());
    }

    #[test]
    fn rebuild_from_cover() {
        let g = Graph::from_edges(4, [(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let cover = Cover::from_node_sets(&g, &[vec![1, 2], vec![2, 3]]).unwrap();
        let (a, b) = (cover.communities()[0].id(), cover.communities()[1].id());
        let t = rebuild_membership(&cover, 4);
        assert_eq!(t.snapshot(2).as_slice(), &[a, b]);
        assert_eq!(t.snapshot(1).as_slice(), &[a]);
        assert_eq!(t.snapshot(3).as_slice(), &[b]);
        assert!(t.snapshot(0).is_empty());
        assert_eq!(t.unassigned_count(), 1);

        let empty = rebuild_membership(&Cover::default(), 4);
        assert!((0..4).all(|v| empty.snapshot(v).is_empty()));

        let all = Cover::from_node_sets(&g, &[vec![0, 1, 2, 3]]).unwrap();
        let t = rebuild_membership(&all, 4);
        let id = all.communities()[0].id();
        assert!((0..4).all(|v| t.snapshot(v).as_slice() == [id]));
    }

    #[test]
    fn rename_moves_membership() {
        let t = MembershipTable::new(1);
        t.add(0, C2);
        t.rename(0, C2, C1);
        assert_eq!(t.snapshot(0).as_slice(), &[C1]);
    }

    #[test]
    fn pending_writer_blocks_new_readers() {
        let table = Arc::new(MembershipTable::new(1));
        let reader_guard = table.raw(0).read();
        let writer_done = Arc::new(AtomicBool::new(false));
        let writer = {
            let table = Arc::clone(&table);
            let done = Arc::clone(&writer_done);
            thread::spawn(move || {
                table.add(0, C1);
                done.store(true, Ordering::SeqCst);
            })
        };
        // give the writer time to queue behind the held read lock
        thread::sleep(Duration::from_millis(100));
        assert!(!writer_done.load(Ordering::SeqCst));
        assert!(
            table.raw(0).try_read_for(Duration::from_millis(50)).is_none(),
            "a new reader got in ahead of the queued writer"
        );
        drop(reader_guard);
        writer.join().unwrap();
        assert_eq!(table.snapshot(0).as_slice(), &[C1]);
    }

    #[test]
    fn concurrent_readers_never_see_torn_sets() {
        // writers toggle between two valid states, {1} and {1, 2, 3, 4, 5};
        // readers must only ever observe one of those.
        let table = Arc::new(MembershipTable::new(4));
        for v in 0..4 {
            table.add(v, C1);
        }
        let stop = Arc::new(AtomicBool::new(false));
        let big: Vec<CommunityId> = (1..=5).map(CommunityId).collect();
        let writers: Vec<_> = (0..2)
            .map(|w| {
                let table = Arc::clone(&table);
                let stop = Arc::clone(&stop);
                thread::spawn(move || {
                    let node = w * 2;
                    while !stop.load(Ordering::Relaxed) {
                        table.with_set(node, |_| ());
                        {
                            let mut set = table.sets[node].write();
                            set.clear();
                            set.extend((1..=5).map(CommunityId));
                        }
                        let mut set = table.sets[node].write();
                        set.clear();
                        set.push(C1);
                    }
                })
            })
            .collect();
        for _ in 0..20_000 {
            for v in 0..4 {
                let s = table.snapshot(v);
                assert!(s.as_slice() == [C1] || s.as_slice() == big.as_slice(), "torn read {s:?}");
            }
        }
        stop.store(true, Ordering::Relaxed);
        for w in writers {
            w.join().unwrap();
        }
    }
}
