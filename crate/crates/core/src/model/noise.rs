use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::grid::FrequencyGrid;
use crate::model::psd::WidebandPsd;
use crate::rng;
use crate::scalar::Real;

/// PSD-domain noise: additive floor, multiplicative per-bin fluctuation and
/// impulsive spikes.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec<T> {
    pub awgn_floor: T,
    pub fluctuation_sigma: T,
    pub impulse_count: usize,
    pub impulse_amplitude: T,
    /// Explicit impulse frequencies in MHz; drawn uniformly when `None`.
    pub impulse_positions: Option<Vec<T>>,
}

impl<T: Real> NoiseSpec<T> {
    /// Floor only, no fluctuation or impulses.
    pub fn floor(awgn_floor: T) -> Self {
        Self {
            awgn_floor,
            fluctuation_sigma: T::zero(),
            impulse_count: 0,
            impulse_amplitude: T::zero(),
            impulse_positions: None,
        }
    }

    pub fn validate(&self, grid: &FrequencyGrid<T>) -> Result<()> {
        let non_neg = |v: T| v.is_finite() && v >= T::zero();
        if !non_neg(self.awgn_floor) {
            return Err(Error::InvalidArgument("awgn_floor must be finite and >= 0".into()));
        }
        if !non_neg(self.fluctuation_sigma) {
            return Err(Error::InvalidArgument("fluctuation_sigma must be finite and >= 0".into()));
        }
        if !non_neg(self.impulse_amplitude) {
            return Err(Error::InvalidArgument("impulse_amplitude must be finite and >= 0".into()));
        }
        match &self.impulse_positions {
            Some(pos) => {
                if pos.len() != self.impulse_count {
                    return Err(Error::InvalidArgument(format!(
                        "impulse_count = {} but {} positions given",
                        self.impulse_count,
                        pos.len()
                    )));
                }
                if let Some(f) = pos.iter().find(|&&f| !grid.contains(f)) {
                    return Err(Error::InvalidArgument(format!(
                        "impulse position {f} MHz lies outside the grid"
                    )));
                }
            }
            None => {
                if self.impulse_count > grid.n_points() {
                    return Err(Error::InvalidArgument(
                        "more impulses than grid bins".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Apply `spec` to `psd`. Deterministic in `seed`.
///
/// Each bin becomes `max(0, (v + floor)·(1 + σ·g))` with `g ~ N(0, 1)`, then
/// the impulse amplitude is added at the impulse bins (nearest grid bin for
/// explicit positions).
pub fn add_noise<T: Real>(
    psd: &WidebandPsd<T>,
    spec: &NoiseSpec<T>,
    seed: u64,
) -> Result<WidebandPsd<T>> {
    let grid = *psd.grid();
    spec.validate(&grid)?;

    let mut values: Vec<T> = psd.values().iter().map(|&v| v + spec.awgn_floor).collect();
    if spec.fluctuation_sigma > T::zero() {
        let mut r = rng::stream(seed, &["psd-fluctuation".into()]);
        for v in values.iter_mut() {
            let g: f64 = r.sample(StandardNormal);
            *v = (*v * (T::one() + spec.fluctuation_sigma * T::lit(g))).max(T::zero());
        }
    }

    if spec.impulse_count > 0 {
        let bins: Vec<usize> = match &spec.impulse_positions {
            Some(pos) => pos.iter().map(|&f| grid.nearest_bin(f).expect("validated")).collect(),
            None => {
                let mut r = rng::stream(seed, &["psd-impulses".into()]);
                index::sample(&mut r, grid.n_points(), spec.impulse_count).into_vec()
            }
        };
        for i in bins {
            values[i] = values[i] + spec.impulse_amplitude;
        }
    }
    WidebandPsd::new(grid, values)
}
