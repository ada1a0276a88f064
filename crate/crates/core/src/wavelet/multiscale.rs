use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{SubchannelPlan, WidebandPsd};
use crate::scalar::Real;
use crate::wavelet::convolve::{Convolver, MultiscaleResponse};
use crate::wavelet::kernel::{kernel_samples, KernelFamily};

pub const MAX_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combiner {
    /// Smoothed PSD `W_s` at the coarsest scale `s = 2^J`.
    Cwt,
    /// Single-scale derivative `W′_s` at `s = 2^J` (modulus-maxima input).
    Wmm,
    /// Product of the J derivative responses.
    Wmp,
    /// Product divided by the J-th power of the mean channel energy.
    WmpNormalized,
    /// Sum of the J derivative responses.
    Wms,
}

impl Combiner {
    pub fn name(self) -> &'static str {
        match self {
            Combiner::Cwt => "cwt",
            Combiner::Wmm => "wmm",
            Combiner::Wmp => "wmp",
            Combiner::WmpNormalized => "wmp-norm",
            Combiner::Wms => "wms",
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cwt" => Ok(Combiner::Cwt),
            "wmm" => Ok(Combiner::Wmm),
            "wmp" => Ok(Combiner::Wmp),
            "wmp-norm" | "wmp_norm" | "wmp-normalized" | "nwmp" => Ok(Combiner::WmpNormalized),
            "wms" => Ok(Combiner::Wms),
            other => Err(Error::Config(format!("unknown combiner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiscaleConfig {
    pub family: KernelFamily,
    levels: usize,
    pub combiner: Combiner,
}

impl MultiscaleConfig {
    pub fn new(family: KernelFamily, levels: usize, combiner: Combiner) -> Result<Self> {
        check_levels(levels)?;
        Ok(Self { family, levels, combiner })
    }

    /// J.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Dyadic scales `2¹ … 2^J`.
    pub fn scales(&self) -> Vec<usize> {
        scales(self.levels)
    }

    /// Response of the configured combiner. `partition` is only consulted for
    /// [`Combiner::WmpNormalized`].
    pub fn respond<T: Real>(
        &self,
        engine: &mut Convolver<T>,
        psd: &WidebandPsd<T>,
        partition: Option<&ChannelPartition<'_, T>>,
    ) -> Result<MultiscaleResponse<T>> {
        let coarsest = 1usize << self.levels;
        match self.combiner {
            Combiner::Cwt => engine.smooth(psd, &kernel_samples(self.family, coarsest, psd.grid())?),
            Combiner::Wmm => {
                engine.derivative(psd, &kernel_samples(self.family, coarsest, psd.grid())?)
            }
            Combiner::Wmp => product(engine, psd, self.family, self.levels),
            Combiner::Wms => sum(engine, psd, self.family, self.levels),
            Combiner::WmpNormalized => {
                let partition = partition.ok_or_else(|| {
                    Error::InvalidArgument("normalized WMP needs a channel partition".into())
                })?;
                normalize(product(engine, psd, self.family, self.levels)?, psd, partition, self.levels)
            }
        }
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Error::InvalidArgument(format!("J = {levels} outside 1..={MAX_LEVELS}")));
    }
    Ok(())
}

pub fn scales(levels: usize) -> Vec<usize> {
    (1..=levels).map(|j| 1usize << j).collect()
}

/// How the PSD is split into K channels for the mean-energy normalization.
#[derive(Debug, Clone, Copy)]
pub enum ChannelPartition<'a, T> {
    Plan(&'a SubchannelPlan<T>),
    /// K equal-width channels across the whole grid.
    Uniform(usize),
}

/// Per-channel energies `E_k = Σ_{bins in k} R̂·Δf`.
pub fn channel_energies<T: Real>(psd: &WidebandPsd<T>, partition: &ChannelPartition<'_, T>) -> Result<Vec<T>> {
    let grid = psd.grid();
    let boundaries: Vec<T> = match partition {
        ChannelPartition::Plan(plan) => {
            plan.check_grid(grid)?;
            plan.boundaries().to_vec()
        }
        ChannelPartition::Uniform(k) => {
            if *k == 0 {
                return Err(Error::InvalidArgument("K must be at least 1".into()));
            }
            let kk = T::from_usize_lossy(*k);
            (0..=*k)
                .map(|i| if i == *k { grid.f_stop() } else { grid.f_start() + grid.span() * T::from_usize_lossy(i) / kk })
                .collect()
        }
    };
    let k = boundaries.len() - 1;
    let df = grid.spacing();
    Ok((0..k)
        .map(|i| {
            let r = psd.bin_range(boundaries[i], boundaries[i + 1], i + 1 == k);
            psd.values()[r].iter().copied().sum::<T>() * df
        })
        .collect())
}

fn derivatives<T: Real>(
    engine: &mut Convolver<T>,
    psd: &WidebandPsd<T>,
    family: KernelFamily,
    levels: usize,
) -> Result<Vec<MultiscaleResponse<T>>> {
    check_levels(levels)?;
    scales(levels)
        .into_iter()
        .map(|s| engine.derivative(psd, &kernel_samples(family, s, psd.grid())?))
        .collect()
}

fn product<T: Real>(
    engine: &mut Convolver<T>,
    psd: &WidebandPsd<T>,
    family: KernelFamily,
    levels: usize,
) -> Result<MultiscaleResponse<T>> {
    let mut ds = derivatives(engine, psd, family, levels)?.into_iter();
    let mut acc = ds.next().expect("J >= 1");
    for d in ds {
        for (a, v) in acc.values.iter_mut().zip(&d.values) {
            *a = *a * *v;
        }
        acc.max_scale = d.max_scale;
    }
    Ok(acc)
}

fn sum<T: Real>(
    engine: &mut Convolver<T>,
    psd: &WidebandPsd<T>,
    family: KernelFamily,
    levels: usize,
) -> Result<MultiscaleResponse<T>> {
    let mut ds = derivatives(engine, psd, family, levels)?.into_iter();
    let mut acc = ds.next().expect("J >= 1");
    for d in ds {
        for (a, v) in acc.values.iter_mut().zip(&d.values) {
            *a = *a + *v;
        }
        acc.max_scale = d.max_scale;
    }
    Ok(acc)
}

fn normalize<T: Real>(
    mut p: MultiscaleResponse<T>,
    psd: &WidebandPsd<T>,
    partition: &ChannelPartition<'_, T>,
    levels: usize,
) -> Result<MultiscaleResponse<T>> {
    let energies = channel_energies(psd, partition)?;
    let mean = energies.iter().copied().sum::<T>() / T::from_usize_lossy(energies.len());
    if !(mean > T::zero()) {
        return Err(Error::DegenerateNormalization("mean channel energy is zero".into()));
    }
    let denom = mean.powi(levels as i32);
    for v in p.values.iter_mut() {
        *v = *v / denom;
    }
    Ok(p)
}

/// Wavelet multiscale product `P_J = Π_j W′_{2^j}`.
pub fn wmp<T: Real>(psd: &WidebandPsd<T>, family: KernelFamily, levels: usize) -> Result<MultiscaleResponse<T>> {
    product(&mut Convolver::new(), psd, family, levels)
}

/// Normalized product `P̂_J = P_J / Ē^J` with `Ē` the mean channel energy.
pub fn wmp_normalized<T: Real>(
    psd: &WidebandPsd<T>,
    family: KernelFamily,
    levels: usize,
    partition: &ChannelPartition<'_, T>,
) -> Result<MultiscaleResponse<T>> {
    normalize(wmp(psd, family, levels)?, psd, partition, levels)
}

/// Wavelet multiscale sum `S_J = Σ_j W′_{2^j}`.
pub fn wms<T: Real>(psd: &WidebandPsd<T>, family: KernelFamily, levels: usize) -> Result<MultiscaleResponse<T>> {
    sum(&mut Convolver::new(), psd, family, levels)
}
