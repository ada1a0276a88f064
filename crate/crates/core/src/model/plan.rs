use crate::error::{Error, Result};
use crate::model::grid::FrequencyGrid;
use crate::scalar::Real;

/// Ground-truth layout of K contiguous subchannels.
///
/// `boundaries` has K+1 strictly increasing entries; subchannel `k` spans
/// `[boundaries[k], boundaries[k + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubchannelPlan<T> {
    boundaries: Vec<T>,
    occupancy: Vec<bool>,
    power: Vec<T>,
}

impl<T: Real> SubchannelPlan<T> {
    pub fn new(boundaries: Vec<T>, occupancy: Vec<bool>, power: Vec<T>) -> Result<Self> {
        let k = occupancy.len();
        if k == 0 {
            return Err(Error::InvalidPlan("at least one subchannel is required".into()));
        }
        if boundaries.len() != k + 1 {
            return Err(Error::InvalidPlan(format!(
                "{} boundaries given for {} subchannels",
                boundaries.len(),
                k
            )));
        }
        if power.len() != k {
            return Err(Error::InvalidPlan(format!(
                "{} power levels given for {} subchannels",
                power.len(),
                k
            )));
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPlan("non-finite boundary".into()));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPlan("boundaries must be strictly increasing".into()));
        }
        for (i, (&p, &occ)) in power.iter().zip(&occupancy).enumerate() {
            if !(p.is_finite() && p >= T::zero()) {
                return Err(Error::InvalidPlan(format!("power[{i}] must be finite and >= 0")));
            }
            if !occ && p != T::zero() {
                return Err(Error::InvalidPlan(format!(
                    "subchannel {i} is idle but has non-zero power"
                )));
            }
        }
        Ok(Self { boundaries, occupancy, power })
    }

    /// K equal-width subchannels spanning `[f_start, f_stop]`.
    pub fn uniform(
        f_start: T,
        f_stop: T,
        k: usize,
        occupancy: Vec<bool>,
        power: Vec<T>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPlan("K must be at least 1".into()));
        }
        if f_stop <= f_start {
            return Err(Error::InvalidPlan("f_stop must exceed f_start".into()));
        }
        if occupancy.len() != k || power.len() != k {
            return Err(Error::InvalidPlan(format!(
                "K = {k} but occupancy has {} entries and power has {}",
                occupancy.len(),
                power.len()
            )));
        }
        let span = f_stop - f_start;
        let kk = T::from_usize_lossy(k);
        let boundaries = (0..=k)
            .map(|i| {
                if i == k {
                    f_stop
                } else {
                    f_start + span * T::from_usize_lossy(i) / kk
                }
            })
            .collect();
        Self::new(boundaries, occupancy, power)
    }

    pub fn channel_count(&self) -> usize {
        self.occupancy.len()
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    /// The K−1 boundaries between adjacent subchannels.
    pub fn interior_boundaries(&self) -> &[T] {
        &self.boundaries[1..self.boundaries.len() - 1]
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn width(&self, k: usize) -> T {
        self.boundaries[k + 1] - self.boundaries[k]
    }

    /// Interior boundaries where the PSD level actually changes.
    pub fn edges(&self) -> Vec<T> {
        (1..self.channel_count())
            .filter(|&k| self.power[k] != self.power[k - 1])
            .map(|k| self.boundaries[k])
            .collect()
    }

    /// Subchannel containing `f`, with the last subchannel closed on the right.
    pub fn channel_of(&self, f: T) -> Option<usize> {
        let k = self.channel_count();
        if f < self.boundaries[0] || f > self.boundaries[k] {
            return None;
        }
        if f == self.boundaries[k] {
            return Some(k - 1);
        }
        // partition_point gives the count of boundaries <= f.
        let idx = self.boundaries.partition_point(|&b| b <= f);
        Some(idx - 1)
    }

    pub fn check_grid(&self, grid: &FrequencyGrid<T>) -> Result<()> {
        let first = self.boundaries[0];
        let last = self.boundaries[self.channel_count()];
        if first < grid.f_start() || last > grid.f_stop() {
            return Err(Error::InvalidPlan(format!(
                "plan spans [{first}, {last}] outside grid [{}, {}]",
                grid.f_start(),
                grid.f_stop()
            )));
        }
        Ok(())
    }
}
