//! Exact nearest-neighbor search by linear scan.
//!
//! The partitioned variant splits `[0, T)` into `n` contiguous lanes, takes a
//! per-lane argmin and folds the lanes with a pairwise tree reduction. Ties
//! always resolve to the lowest node index, so both variants agree exactly.

use alloc::vec::Vec;
use libm::sqrt;

use crate::config::Config;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnResult {
    pub index: usize,
    pub distance: f64,
}

/// Indexed configurations that can be scanned.
pub trait ConfigSet {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Squared distance between node `i` and `q`.
    fn distance_sq(&self, i: usize, q: &[f64]) -> f64;
}

impl ConfigSet for [Config] {
    fn len(&self) -> usize {
        <[Config]>::len(self)
    }

    fn distance_sq(&self, i: usize, q: &[f64]) -> f64 {
        distance_sq(&self[i], q)
    }
}

impl ConfigSet for [Vec<f64>] {
    fn len(&self) -> usize {
        <[Vec<f64>]>::len(self)
    }

    fn distance_sq(&self, i: usize, q: &[f64]) -> f64 {
        distance_sq(&self[i], q)
    }
}

#[inline]
pub fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Unweighted Euclidean joint-space distance.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64, Error> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(sqrt(distance_sq(a, b)))
}

#[derive(Debug, Clone, Copy)]
struct Best {
    index: usize,
    dist_sq: f64,
}

#[inline]
fn scan<S: ConfigSet + ?Sized>(set: &S, range: core::ops::Range<usize>, q: &[f64]) -> Option<Best> {
    let mut best: Option<Best> = None;
    for i in range {
        let d = set.distance_sq(i, q);
        match best {
            Some(b) if d >= b.dist_sq => {}
            _ => best = Some(Best { index: i, dist_sq: d }),
        }
    }
    best
}

/// Lower-index operand wins ties.
#[inline]
fn combine(lo: Option<Best>, hi: Option<Best>) -> Option<Best> {
    match (lo, hi) {
        (Some(a), Some(b)) => Some(if b.dist_sq < a.dist_sq { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn check_snapshot<S: ConfigSet + ?Sized>(set: &S, len: usize) -> Result<(), Error> {
    if len == 0 || set.is_empty() {
        return Err(Error::EmptyTree);
    }
    if len > set.len() {
        return Err(Error::InvalidArgument("snapshot length exceeds the set"));
    }
    Ok(())
}

/// Argmin over the first `len` nodes of `set`.
pub fn nearest_serial<S: ConfigSet + ?Sized>(set: &S, len: usize, q: &[f64]) -> Result<NnResult, Error> {
    check_snapshot(set, len)?;
    let b = scan(set, 0..len, q).expect("non-empty range");
    Ok(NnResult { index: b.index, distance: sqrt(b.dist_sq) })
}

/// Work done by the busiest lane of a partitioned query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LaneAccounting {
    pub scan_comparisons: usize,
    pub reduction_steps: usize,
}

impl LaneAccounting {
    pub fn total(&self) -> usize {
        self.scan_comparisons + self.reduction_steps
    }
}

/// Partitioned scan over `partitions` lanes plus a tree reduction. Lanes run
/// sequentially here; the result is what any parallel schedule would produce.
pub fn nearest_parallel<S: ConfigSet + ?Sized>(
    set: &S,
    len: usize,
    q: &[f64],
    partitions: usize,
) -> Result<NnResult, Error> {
    nearest_parallel_counted(set, len, q, partitions).map(|(r, _)| r)
}

/// [`nearest_parallel`] that also reports per-lane comparison counts, the
/// maximum over lanes of scanned nodes plus reduction combines.
pub fn nearest_parallel_counted<S: ConfigSet + ?Sized>(
    set: &S,
    len: usize,
    q: &[f64],
    partitions: usize,
) -> Result<(NnResult, LaneAccounting), Error> {
    check_snapshot(set, len)?;
    if partitions == 0 {
        return Err(Error::InvalidArgument("partitions must be at least 1"));
    }
    let chunk = len.div_ceil(partitions);
    let mut lanes: Vec<Option<Best>> = Vec::with_capacity(partitions);
    let mut scan_max = 0;
    for lane in 0..partitions {
        let lo = (lane * chunk).min(len);
        let hi = (lo + chunk).min(len);
        scan_max = scan_max.max(hi - lo);
        lanes.push(scan(set, lo..hi, q));
    }

    // Lane j absorbs lane j + stride at each level; lane 0 is on every level.
    let mut steps = 0;
    let mut stride = 1;
    while stride < partitions {
        let mut j = 0;
        while j + stride < partitions {
            lanes[j] = combine(lanes[j], lanes[j + stride]);
            j += 2 * stride;
        }
        steps += 1;
        stride *= 2;
    }
    let b = lanes[0].expect("non-empty snapshot");
    Ok((
        NnResult { index: b.index, distance: sqrt(b.dist_sq) },
        LaneAccounting { scan_comparisons: scan_max, reduction_steps: steps },
    ))
}
