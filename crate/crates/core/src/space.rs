//! Finite-horizon signal spaces and the truncation nest.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A time-indexed signal space: `dims[k]` is the number of channels at step `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignalSpace {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl SignalSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyHorizon);
        }
        if let Some(step) = dims.iter().position(|&d| d == 0) {
            return Err(Error::ZeroBlockDim { step });
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(SignalSpace { dims, offsets })
    }

    /// `horizon` steps with `dim` channels each.
    pub fn uniform(horizon: usize, dim: usize) -> Result<Self> {
        Self::new(alloc::vec![dim; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, step: usize) -> usize {
        self.dims[step]
    }

    pub fn total_dim(&self) -> usize {
        self.offsets[self.dims.len()]
    }

    /// First scalar index of step `k`.
    pub fn offset(&self, step: usize) -> usize {
        self.offsets[step]
    }

    /// Scalar index range of step `k`.
    pub fn range(&self, step: usize) -> core::ops::Range<usize> {
        self.offsets[step]..self.offsets[step + 1]
    }

    /// Time step holding scalar coordinate `index`.
    pub fn time_of(&self, index: usize) -> usize {
        debug_assert!(index < self.total_dim());
        // offsets is sorted; partition_point gives the first offset > index.
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    /// Number of leading scalar coordinates kept by `P_n`.
    pub fn kept_by(&self, n: NestIndex) -> usize {
        self.offsets[n.steps_kept(self.horizon())]
    }

    /// The same space with time running backwards.
    pub fn reversed(&self) -> SignalSpace {
        let mut dims = self.dims.clone();
        dims.reverse();
        SignalSpace::new(dims).expect("reversal preserves validity")
    }
}

/// Index `n` of the truncation projection `P_n`, which keeps times `0..=n`.
///
/// `P_{-1} = 0` and `P_∞ = I`. At a finite horizon `T`, every `n >= T - 1`
/// acts as the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NestIndex {
    /// `n = -1`: the zero projection.
    Empty,
    /// Keep steps `0..=k`.
    Through(usize),
    /// `n = ∞`: the identity.
    All,
}

impl NestIndex {
    /// Maps `-1` to [`NestIndex::Empty`] and `k >= 0` to `Through(k)`.
    pub fn from_signed(n: i64) -> Result<Self> {
        match n {
            -1 => Ok(NestIndex::Empty),
            k if k >= 0 => Ok(NestIndex::Through(k as usize)),
            k => Err(Error::InvalidArgument(alloc::format!("nest index {k} < -1"))),
        }
    }

    /// Number of time steps kept at horizon `horizon`.
    pub fn steps_kept(self, horizon: usize) -> usize {
        match self {
            NestIndex::Empty => 0,
            NestIndex::Through(k) => (k + 1).min(horizon),
            NestIndex::All => horizon,
        }
    }

    /// Signed index, with `All` reported as `None`.
    pub fn as_signed(self) -> Option<i64> {
        match self {
            NestIndex::Empty => Some(-1),
            NestIndex::Through(k) => Some(k as i64),
            NestIndex::All => None,
        }
    }

    /// `-1, 0, …, T-1`: every distinct truncation at horizon `T`.
    pub fn finite_nest(horizon: usize) -> impl Iterator<Item = NestIndex> {
        core::iter::once(NestIndex::Empty).chain((0..horizon).map(NestIndex::Through))
    }
}
