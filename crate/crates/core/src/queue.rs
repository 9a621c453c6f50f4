use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};

use crate::graph::VertexId;

/// Fixed-capacity, append-only vertex queue.
///
/// Appends reserve a slot with a `fetch_add`, so several helper threads can
/// push at once. The backing storage is allocated once in [`FrontierQueue::with_capacity`]
/// and never grows; pushing past capacity is a broken memory bound and panics.
///
/// Readers must be ordered after the writers by some external
/// synchronization (a barrier or a join), after which `len()` and the slots
/// below it are stable.
pub struct FrontierQueue {
    slots: Box<[AtomicU32]>,
    len: AtomicUsize,
}

impl FrontierQueue {
    pub fn with_capacity(capacity: usize) -> Self {
        FrontierQueue {
            slots: (0..capacity).map(|_| AtomicU32::new(0)).collect(),
            len: AtomicUsize::new(0),
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len.load(Ordering::Acquire).min(self.slots.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn push(&self, v: VertexId) {
        let idx = self.len.fetch_add(1, Ordering::AcqRel);
        assert!(
            idx < self.slots.len(),
            "frontier queue overflow: capacity {} exhausted",
            self.slots.len()
        );
        self.slots[idx].store(v, Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self, idx: usize) -> VertexId {
        self.slots[idx].load(Ordering::Relaxed)
    }

    /// Iterates over the first `len` entries.
    pub fn iter_prefix(&self, len: usize) -> impl Iterator<Item = VertexId> + '_ {
        self.slots[..len].iter().map(|s| s.load(Ordering::Relaxed))
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.iter_prefix(self.len())
    }

    pub fn clear(&self) {
        self.len.store(0, Ordering::Release);
    }

    /// Address of the backing storage; stays fixed for the queue's lifetime.
    pub fn storage_ptr(&self) -> *const AtomicU32 {
        self.slots.as_ptr()
    }
}

impl std::fmt::Debug for FrontierQueue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}
