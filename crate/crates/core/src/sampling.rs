//! Configuration sampling and the dynamic-domain rejection heuristic.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Radical inverse of `index` in `base`, in `[0, 1)`.
pub fn halton_value(base: u32, mut index: u64) -> f64 {
    debug_assert!(base >= 2);
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    r
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u32> {
    let mut primes: Vec<u32> = Vec::with_capacity(n);
    let mut c = 2u32;
    while primes.len() < n {
        if primes.iter().take_while(|p| **p * **p <= c).all(|p| !c.is_multiple_of(*p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// A strided walk through the multi-dimensional Halton sequence.
///
/// Workers that share a stride and use distinct offsets draw disjoint
/// indices which, merged, give back the stride-1 sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltonState {
    bases: Vec<u32>,
    index: u64,
    stride: u64,
}

impl HaltonState {
    pub fn new(dof: usize, offset: u64, stride: u64) -> Self {
        HaltonState { bases: first_primes(dof), index: offset, stride: stride.max(1) }
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Writes the next sample scaled into `limits` and advances by `stride`.
    pub fn sample_into(&mut self, limits: &[(f64, f64)], out: &mut [f64]) {
        for ((o, b), (lo, hi)) in out.iter_mut().zip(&self.bases).zip(limits) {
            *o = lo + halton_value(*b, self.index) * (hi - lo);
        }
        self.index += self.stride;
    }

    pub fn sample_config(&mut self, limits: &[(f64, f64)]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.bases.len()];
        self.sample_into(limits, &mut out);
        out
    }
}

/// Per-worker configuration source.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Sampler {
    Halton(HaltonState),
    /// Seeded uniform sampling; used by property tests and seeded trials.
    Uniform(ChaCha8Rng),
}

impl Sampler {
    pub fn uniform(seed: u64) -> Self {
        Sampler::Uniform(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_into(&mut self, limits: &[(f64, f64)], out: &mut [f64]) {
        match self {
            Sampler::Halton(h) => h.sample_into(limits, out),
            Sampler::Uniform(rng) => {
                for (o, (lo, hi)) in out.iter_mut().zip(limits) {
                    *o = lo + rng.random::<f64>() * (hi - lo);
                }
            }
        }
    }
}

const UNBOUNDED: u64 = f64::INFINITY.to_bits();

/// Per-node dynamic-domain radii with a fixed shrink radius.
///
/// A node receives the radius the first time an extension from it fails;
/// afterwards samples farther than that radius from it (as their nearest
/// neighbor) are rejected. Radii are set-once atomics so concurrent workers
/// may record failures without coordination.
#[derive(Debug)]
pub struct DynamicDomain {
    radii: Vec<AtomicU64>,
    radius: Option<f64>,
}

impl DynamicDomain {
    /// `radius = None` disables the heuristic.
    pub fn new(capacity: usize, radius: Option<f64>) -> Self {
        DynamicDomain { radii: (0..capacity).map(|_| AtomicU64::new(UNBOUNDED)).collect(), radius }
    }

    pub fn shrink_radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn set_shrink_radius(&mut self, radius: Option<f64>) {
        self.radius = radius;
    }

    /// Recorded radius of `node`, `None` if unbounded.
    pub fn radius_of(&self, node: usize) -> Option<f64> {
        let r = f64::from_bits(self.radii[node].load(Ordering::Relaxed));
        r.is_finite().then_some(r)
    }

    /// Inclusive: a sample exactly on the radius is accepted.
    pub fn accept(&self, node: usize, nn_distance: f64) -> bool {
        nn_distance <= f64::from_bits(self.radii[node].load(Ordering::Relaxed))
    }

    /// Gives `node` the shrink radius unless it already has one. Returns
    /// whether this call set it.
    pub fn record_failure(&self, node: usize) -> bool {
        let Some(r) = self.radius else { return false };
        self.radii[node]
            .compare_exchange(UNBOUNDED, r.to_bits(), Ordering::Relaxed, Ordering::Relaxed)
            .is_ok()
    }

    /// Clears the first `upto` radii.
    pub fn reset(&self, upto: usize) {
        for r in &self.radii[..upto.min(self.radii.len())] {
            r.store(UNBOUNDED, Ordering::Relaxed);
        }
    }
}
