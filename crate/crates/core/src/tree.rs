//! Fixed-capacity, append-only tree shared by concurrent workers.
//!
//! Appends use a two-phase publish. A writer reserves a slot with
//! `fetch_add` on the reservation counter, stores the configuration and
//! parent, marks the slot ready, then advances the published length over
//! every contiguous ready slot. Readers only look at indices below the
//! published length, and published nodes are never modified.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use crate::nn::ConfigSet;
use crate::sampling::DynamicDomain;

const ROOT: usize = usize::MAX;

#[derive(Debug)]
pub struct Tree {
    dof: usize,
    capacity: usize,
    values: Vec<AtomicU64>,
    parents: Vec<AtomicUsize>,
    ready: Vec<AtomicBool>,
    reserved: AtomicUsize,
    published: AtomicUsize,
    domain: DynamicDomain,
}

impl Tree {
    pub fn new(dof: usize, capacity: usize, dd_radius: Option<f64>) -> Self {
        Tree {
            dof,
            capacity,
            values: (0..dof * capacity).map(|_| AtomicU64::new(0)).collect(),
            parents: (0..capacity).map(|_| AtomicUsize::new(ROOT)).collect(),
            ready: (0..capacity).map(|_| AtomicBool::new(false)).collect(),
            reserved: AtomicUsize::new(0),
            published: AtomicUsize::new(0),
            domain: DynamicDomain::new(capacity, dd_radius),
        }
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of published nodes. Never decreases between resets.
    pub fn len(&self) -> usize {
        self.published.load(Ordering::Acquire)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> &DynamicDomain {
        &self.domain
    }

    /// Empties the tree and sets a new dynamic-domain radius. Requires
    /// exclusive access, so no worker can be mid-append.
    pub fn reset(&mut self, dd_radius: Option<f64>) {
        let used = (*self.reserved.get_mut()).min(self.capacity);
        for r in &self.ready[..used] {
            r.store(false, Ordering::Relaxed);
        }
        self.domain.reset(used);
        self.domain.set_shrink_radius(dd_radius);
        *self.reserved.get_mut() = 0;
        *self.published.get_mut() = 0;
    }

    /// Appends a node; `None` once the tree is full.
    pub fn push(&self, config: &[f64], parent: Option<usize>) -> Option<usize> {
        debug_assert_eq!(config.len(), self.dof);
        let slot = self.reserved.fetch_add(1, Ordering::Relaxed);
        if slot >= self.capacity {
            return None;
        }
        let base = slot * self.dof;
        for (cell, v) in self.values[base..base + self.dof].iter().zip(config) {
            cell.store(v.to_bits(), Ordering::Relaxed);
        }
        self.parents[slot].store(parent.unwrap_or(ROOT), Ordering::Relaxed);
        self.ready[slot].store(true, Ordering::SeqCst);
        self.advance();
        Some(slot)
    }

    /// Moves `published` past every ready slot. Whoever marks the slot the
    /// counter is waiting on finishes the job, so no slot stays hidden.
    fn advance(&self) {
        let mut p = self.published.load(Ordering::SeqCst);
        while p < self.capacity && self.ready[p].load(Ordering::SeqCst) {
            match self.published.compare_exchange(p, p + 1, Ordering::SeqCst, Ordering::SeqCst) {
                Ok(_) => p += 1,
                Err(actual) => p = actual,
            }
        }
    }

    /// Copies node `i` into `out`. `i` must be below a published length the
    /// caller observed.
    pub fn config_into(&self, i: usize, out: &mut [f64]) {
        let base = i * self.dof;
        for (o, cell) in out.iter_mut().zip(&self.values[base..base + self.dof]) {
            *o = f64::from_bits(cell.load(Ordering::Relaxed));
        }
    }

    pub fn config(&self, i: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dof];
        self.config_into(i, &mut out);
        out
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        match self.parents[i].load(Ordering::Relaxed) {
            ROOT => None,
            p => Some(p),
        }
    }
}

impl ConfigSet for Tree {
    fn len(&self) -> usize {
        Tree::len(self)
    }

    #[inline]
    fn distance_sq(&self, i: usize, q: &[f64]) -> f64 {
        let base = i * self.dof;
        self.values[base..base + self.dof]
            .iter()
            .zip(q)
            .map(|(cell, b)| {
                let d = f64::from_bits(cell.load(Ordering::Relaxed)) - b;
                d * d
            })
            .sum()
    }
}
