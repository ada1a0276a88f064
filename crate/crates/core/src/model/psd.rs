use crate::error::{Error, Result};
use crate::model::grid::FrequencyGrid;
use crate::model::plan::SubchannelPlan;
use crate::scalar::Real;

/// Sampled power spectral density R̂(f) on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WidebandPsd<T> {
    grid: FrequencyGrid<T>,
    values: Vec<T>,
}

impl<T: Real> WidebandPsd<T> {
    pub fn new(grid: FrequencyGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidArgument(format!(
                "PSD value at bin {i} is negative or non-finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid<T>) -> Self {
        Self { values: vec![T::zero(); grid.n_points()], grid }
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Multiply every bin by `c >= 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| v * c).collect())
    }

    /// Trapezoidal integral over the grid, in PSD units × MHz.
    pub fn total_power(&self) -> T {
        let df = self.grid.spacing();
        let n = self.values.len();
        let inner: T = self.values[1..n - 1].iter().copied().sum();
        (inner + (self.values[0] + self.values[n - 1]) / T::lit(2.0)) * df
    }

    /// Bin indices belonging to `[lo, hi)`, or `[lo, hi]` when `closed_right`.
    pub fn bin_range(&self, lo: T, hi: T, closed_right: bool) -> std::ops::Range<usize> {
        let start = (0..self.values.len())
            .find(|&i| self.grid.freq(i) >= lo)
            .unwrap_or(self.values.len());
        let end = (start..self.values.len())
            .find(|&i| {
                let f = self.grid.freq(i);
                if closed_right {
                    f > hi
                } else {
                    f >= hi
                }
            })
            .unwrap_or(self.values.len());
        start..end
    }
}

/// Piecewise-constant PSD of `plan` on `grid`.
///
/// Bin `i` takes `power[k]` when `f_i ∈ [b_k, b_{k+1})`; the final subchannel
/// is closed on the right so a plan ending at `f_stop` covers the last bin.
pub fn build_ideal_psd<T: Real>(
    plan: &SubchannelPlan<T>,
    grid: &FrequencyGrid<T>,
) -> Result<WidebandPsd<T>> {
    plan.check_grid(grid)?;
    let values = grid
        .frequencies()
        .map(|f| plan.channel_of(f).map_or(T::zero(), |k| plan.power()[k]))
        .collect();
    WidebandPsd::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> FrequencyGrid<f64> {
        FrequencyGrid::new(1000.0, 2000.0, 4096).unwrap()
    }

    fn five() -> SubchannelPlan<f64> {
        SubchannelPlan::uniform(
            1000.0,
            2000.0,
            5,
            vec![true, false, true, false, true],
            vec![1.0, 0.0, 1.0, 0.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn idle_plan_is_zero() {
        let plan =
            SubchannelPlan::uniform(1000.0, 2000.0, 3, vec![false; 3], vec![0.0; 3]).unwrap();
        let psd = build_ideal_psd(&plan, &grid()).unwrap();
        assert!(psd.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_band_constant() {
        let plan = SubchannelPlan::uniform(1000.0, 2000.0, 1, vec![true], vec![3.0]).unwrap();
        let psd = build_ideal_psd(&plan, &grid()).unwrap();
        assert!(psd.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn five_channel_matches_membership_loop() {
        let g = grid();
        let plan = five();
        let psd = build_ideal_psd(&plan, &g).unwrap();
        let b = plan.boundaries();
        for i in 0..g.n_points() {
            let f = g.freq(i);
            let mut expect = 0.0;
            for k in 0..5 {
                let inside = f >= b[k] && (f < b[k + 1] || (k == 4 && f <= b[5]));
                if inside {
                    expect = plan.power()[k];
                }
            }
            assert_eq!(psd.values()[i], expect, "bin {i}");
        }
        let jumps = psd.values().windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(jumps, 4);
    }

    #[test]
    fn in_band_mean_equals_power() {
        let g = grid();
        let plan = SubchannelPlan::uniform(
            1000.0,
            2000.0,
            4,
            vec![true, true, false, true],
            vec![2.0, 7.5, 0.0, 0.25],
        )
        .unwrap();
        let psd = build_ideal_psd(&plan, &g).unwrap();
        for k in 0..4 {
            let r = psd.bin_range(plan.boundaries()[k], plan.boundaries()[k + 1], k == 3);
            let mean = psd.values()[r.clone()].iter().sum::<f64>() / r.len() as f64;
            assert_eq!(mean, plan.power()[k]);
        }
    }

    #[test]
    fn plan_outside_grid_rejected() {
        let plan = SubchannelPlan::uniform(900.0, 2000.0, 1, vec![true], vec![1.0]).unwrap();
        assert!(build_ideal_psd(&plan, &grid()).is_err());
    }
}
