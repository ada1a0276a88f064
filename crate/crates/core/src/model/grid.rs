use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of bins a grid may carry.
pub const MIN_GRID_POINTS: usize = 16;

/// Uniformly spaced frequency axis in MHz, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid<T> {
    f_start: T,
    f_stop: T,
    n_points: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(f_start: T, f_stop: T, n_points: usize) -> Result<Self> {
        if !f_start.is_finite() || !f_stop.is_finite() {
            return Err(Error::InvalidGrid("non-finite endpoint".into()));
        }
        if f_stop <= f_start {
            return Err(Error::InvalidGrid(format!(
                "f_stop ({f_stop}) must exceed f_start ({f_start})"
            )));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum of {MIN_GRID_POINTS}"
            )));
        }
        let grid = Self { f_start, f_stop, n_points };
        if grid.spacing() <= T::zero() {
            return Err(Error::InvalidGrid("bin spacing underflows to zero".into()));
        }
        Ok(grid)
    }

    pub fn f_start(&self) -> T {
        self.f_start
    }

    pub fn f_stop(&self) -> T {
        self.f_stop
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> T {
        self.f_stop - self.f_start
    }

    /// Bin spacing Δf in MHz.
    pub fn spacing(&self) -> T {
        self.span() / T::from_usize_lossy(self.n_points - 1)
    }

    /// Frequency of bin `i`. The last bin is pinned to `f_stop` exactly.
    pub fn freq(&self, i: usize) -> T {
        if i + 1 == self.n_points {
            self.f_stop
        } else {
            self.f_start
                + self.span() * (T::from_usize_lossy(i) / T::from_usize_lossy(self.n_points - 1))
        }
    }

    pub fn frequencies(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |i| self.freq(i))
    }

    pub fn contains(&self, f: T) -> bool {
        f >= self.f_start && f <= self.f_stop
    }

    /// Index of the bin nearest to `f`, or `None` outside the grid.
    pub fn nearest_bin(&self, f: T) -> Option<usize> {
        if !self.contains(f) {
            return None;
        }
        let pos = ((f - self.f_start) / self.spacing()).round();
        Some(pos.to_usize().unwrap_or(0).min(self.n_points - 1))
    }

    /// Same axis and spacing.
    pub fn matches(&self, other: &Self) -> bool {
        self.n_points == other.n_points
            && self.f_start == other.f_start
            && self.f_stop == other.f_stop
    }
}

impl Default for FrequencyGrid<f64> {
    /// 1000–2000 MHz, 4096 bins.
    fn default() -> Self {
        Self { f_start: 1000.0, f_stop: 2000.0, n_points: 4096 }
    }
}
