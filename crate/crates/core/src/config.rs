use alloc::vec::Vec;
use core::ops::Deref;

/// A point in joint space, one value per actuated joint (radians or meters).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config(Vec<f64>);

impl Config {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(dof: usize) -> Self {
        Self(alloc::vec![0.0; dof])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self + t * (to - self)`.
    pub fn lerp(&self, to: &[f64], t: f64) -> Config {
        Config(lerp(&self.0, to, t))
    }
}

impl Deref for Config {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Config {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Config {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for Config {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

pub(crate) fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

pub(crate) fn lerp_into(from: &[f64], to: &[f64], t: f64, out: &mut [f64]) {
    for ((o, a), b) in out.iter_mut().zip(from).zip(to) {
        *o = a + t * (b - a);
    }
}
