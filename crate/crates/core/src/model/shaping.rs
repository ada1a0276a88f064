use crate::error::{Error, Result};
use crate::model::plan::SubchannelPlan;
use crate::model::psd::WidebandPsd;
use crate::scalar::Real;

/// Raised-cosine roll-off of the subchannel transitions; `beta = 0` is a
/// sharp step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeShape<T> {
    beta: T,
}

impl<T: Real> EdgeShape<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta >= T::zero() && beta <= T::one()) {
            return Err(Error::InvalidArgument(format!("roll-off {beta} outside [0, 1]")));
        }
        Ok(Self { beta })
    }

    pub fn sharp() -> Self {
        Self { beta: T::zero() }
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

/// One level change of the ideal spectrum.
struct Transition<T> {
    at: T,
    left: T,
    right: T,
    width: T,
}

fn transitions<T: Real>(plan: &SubchannelPlan<T>, f_start: T, f_stop: T) -> Vec<Transition<T>> {
    let k = plan.channel_count();
    let b = plan.boundaries();
    let p = plan.power();
    let mut out = Vec::with_capacity(k + 1);
    if b[0] > f_start {
        out.push(Transition { at: b[0], left: T::zero(), right: p[0], width: plan.width(0) });
    }
    for i in 1..k {
        out.push(Transition {
            at: b[i],
            left: p[i - 1],
            right: p[i],
            width: plan.width(i - 1).min(plan.width(i)),
        });
    }
    if b[k] < f_stop {
        out.push(Transition { at: b[k], left: p[k - 1], right: T::zero(), width: plan.width(k - 1) });
    }
    out
}

/// Replace every step of `plan` in `psd` by a raised-cosine transition.
///
/// Around a boundary `b` with left level `l` and right level `r` the step is
/// swapped for `r + (l − r)·½(1 + cos(π(f − b + T/2)/T))` on
/// `|f − b| <= T/2`, where `T = β·W` and `W` is the narrower adjacent
/// subchannel. Bins outside every window are returned untouched, so `β = 0`
/// is the identity.
pub fn apply_raised_cosine<T: Real>(
    psd: &WidebandPsd<T>,
    shape: EdgeShape<T>,
    plan: &SubchannelPlan<T>,
) -> WidebandPsd<T> {
    let beta = shape.beta();
    if beta == T::zero() {
        return psd.clone();
    }
    let grid = *psd.grid();
    let mut values = psd.values().to_vec();
    let half = T::lit(0.5);
    let pi = T::PI();
    for tr in transitions(plan, grid.f_start(), grid.f_stop()) {
        let window = beta * tr.width;
        if window <= T::zero() {
            continue;
        }
        let lo = tr.at - window * half;
        let hi = tr.at + window * half;
        for (i, v) in values.iter_mut().enumerate() {
            let f = grid.freq(i);
            if f < lo || f > hi {
                continue;
            }
            let step = if f < tr.at { tr.left } else { tr.right };
            let profile = half * (T::one() + (pi * (f - lo) / window).cos());
            let smooth = tr.right + (tr.left - tr.right) * profile;
            *v = (*v - step + smooth).max(T::zero());
        }
    }
    WidebandPsd::new(grid, values).expect("raised-cosine output stays non-negative and finite")
}
