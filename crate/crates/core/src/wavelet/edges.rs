use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{FrequencyGrid, SubchannelPlan, WidebandPsd};
use crate::scalar::Real;
use crate::wavelet::convolve::MultiscaleResponse;

/// Default η as a fraction of the global response maximum.
pub const DEFAULT_ETA_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeThreshold<T> {
    eta_fraction: T,
}

impl<T: Real> EdgeThreshold<T> {
    pub fn new(eta_fraction: T) -> Result<Self> {
        if !(eta_fraction > T::zero() && eta_fraction < T::one()) {
            return Err(Error::InvalidArgument(format!("η fraction {eta_fraction} outside (0, 1)")));
        }
        Ok(Self { eta_fraction })
    }

    pub fn eta_fraction(&self) -> T {
        self.eta_fraction
    }
}

impl<T: Real> Default for EdgeThreshold<T> {
    fn default() -> Self {
        Self { eta_fraction: T::lit(DEFAULT_ETA_FRACTION) }
    }
}

/// Detected edges in increasing frequency order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeEstimate<T> {
    pub bins: Vec<usize>,
    pub frequencies: Vec<T>,
    pub scores: Vec<T>,
}

impl<T: Real> EdgeEstimate<T> {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Half-width of the local-maximum neighbourhood for a response whose
/// coarsest scale is `max_scale`.
pub fn neighborhood(max_scale: usize) -> usize {
    (max_scale / 2).max(2)
}

/// Modulus maxima of `response` that survive the η test.
///
/// A bin qualifies when `|r_i|` exceeds every neighbour to its left and is
/// not exceeded by any neighbour to its right within ±w bins, so a plateau
/// reports its lowest-frequency bin. Maxima below `η·max|r|` are rejected.
pub fn extract_edges<T: Real>(response: &MultiscaleResponse<T>, threshold: &EdgeThreshold<T>) -> EdgeEstimate<T> {
    let mag: Vec<T> = response.values.iter().map(|v| v.abs()).collect();
    let peak = mag.iter().fold(T::zero(), |m, &v| m.max(v));
    let mut out = EdgeEstimate::default();
    if !(peak > T::zero()) {
        return out;
    }
    let floor = threshold.eta_fraction * peak;
    let w = neighborhood(response.max_scale);
    let n = mag.len();
    for i in 0..n {
        let v = mag[i];
        if v < floor || v == T::zero() {
            continue;
        }
        let lo = i.saturating_sub(w);
        let hi = (i + w).min(n - 1);
        let left_ok = mag[lo..i].iter().all(|&u| u < v);
        let right_ok = mag[i + 1..=hi].iter().all(|&u| u <= v);
        if left_ok && right_ok {
            out.bins.push(i);
            out.frequencies.push(response.grid.freq(i));
            out.scores.push(v);
        }
    }
    out
}

/// Modulus-maxima edge detection on a single-scale derivative response.
pub fn wmm_edges<T: Real>(response: &MultiscaleResponse<T>, threshold: &EdgeThreshold<T>) -> EdgeEstimate<T> {
    extract_edges(response, threshold)
}

/// Segment the grid at the detected edges and classify each segment by its
/// mean PSD level.
pub fn edges_to_plan<T: Real>(
    estimate: &EdgeEstimate<T>,
    grid: &FrequencyGrid<T>,
    psd: &WidebandPsd<T>,
    occupancy_threshold: T,
) -> Result<SubchannelPlan<T>> {
    if !psd.grid().matches(grid) {
        return Err(Error::InvalidArgument("PSD grid differs from the requested grid".into()));
    }
    if let Some(f) = estimate.frequencies.iter().find(|&&f| !grid.contains(f)) {
        return Err(Error::InvalidArgument(format!("edge {f} MHz outside the grid")));
    }
    let mut boundaries = vec![grid.f_start()];
    for &f in &estimate.frequencies {
        if f > *boundaries.last().expect("non-empty") && f < grid.f_stop() {
            boundaries.push(f);
        }
    }
    boundaries.push(grid.f_stop());

    let k = boundaries.len() - 1;
    let mut occupancy = Vec::with_capacity(k);
    let mut power = Vec::with_capacity(k);
    for i in 0..k {
        let r = psd.bin_range(boundaries[i], boundaries[i + 1], i + 1 == k);
        let n = r.len();
        let mean = if n == 0 {
            T::zero()
        } else {
            psd.values()[r].iter().copied().sum::<T>() / T::from_usize_lossy(n)
        };
        let busy = mean > occupancy_threshold;
        occupancy.push(busy);
        power.push(if busy { mean } else { T::zero() });
    }
    SubchannelPlan::new(boundaries, occupancy, power)
}

/// RMS distance from each true boundary to its nearest estimate.
///
/// Estimates may be reused. With no estimates at all every true boundary
/// contributes `penalty_width²`.
pub fn edge_rmse<T: Real>(true_boundaries: &[T], estimated: &[T], penalty_width: T) -> Result<T> {
    if true_boundaries.is_empty() {
        return Err(Error::InvalidArgument("no true boundaries to score".into()));
    }
    let sq: T = true_boundaries
        .iter()
        .map(|&b| {
            let d = estimated
                .iter()
                .map(|&e| (e - b).abs())
                .fold(None, |m: Option<T>, d| Some(m.map_or(d, |m| m.min(d))))
                .unwrap_or(penalty_width);
            d * d
        })
        .sum();
    Ok((sq / T::from_usize_lossy(true_boundaries.len())).sqrt())
}

pub const EDGE_HEADER: [&str; 2] = ["frequency_mhz", "score"];

pub fn write_edges_csv<T: Real, W: Write>(w: W, estimate: &EdgeEstimate<T>) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(EDGE_HEADER)?;
    for (f, s) in estimate.frequencies.iter().zip(&estimate.scores) {
        out.write_record([f.as_f64().to_string(), s.as_f64().to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `(frequency_mhz, score)` rows.
pub fn read_edges_csv<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(EDGE_HEADER) {
        return Err(Error::Parse { line: 1, message: "unexpected edge CSV header".into() });
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let p = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })
            };
            Ok((p(&rec[0])?, p(&rec[1])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_ideal_psd, FrequencyGrid};

    fn grid() -> FrequencyGrid<f64> {
        FrequencyGrid::new(1000.0, 2000.0, 4096).unwrap()
    }

    fn response(values: Vec<f64>, max_scale: usize) -> MultiscaleResponse<f64> {
        let g = FrequencyGrid::new(0.0, (values.len() - 1) as f64, values.len()).unwrap();
        MultiscaleResponse { grid: g, values, max_scale }
    }

    #[test]
    fn zero_response_has_no_edges() {
        let r = response(vec![0.0; 32], 4);
        assert!(extract_edges(&r, &EdgeThreshold::default()).is_empty());
    }

    #[test]
    fn plateau_resolves_low() {
        let mut v = vec![0.0; 32];
        v[10] = 1.0;
        v[11] = 1.0;
        v[20] = -0.5;
        let e = extract_edges(&response(v, 4), &EdgeThreshold::new(0.1).unwrap());
        assert_eq!(e.bins, vec![10, 20]);
        assert_eq!(e.scores, vec![1.0, 0.5]);
    }

    #[test]
    fn eta_rejects_small_maxima() {
        let mut v = vec![0.0; 32];
        v[5] = 1.0;
        v[25] = 0.15;
        let r = response(v, 4);
        assert_eq!(extract_edges(&r, &EdgeThreshold::new(0.2).unwrap()).bins, vec![5]);
        assert_eq!(extract_edges(&r, &EdgeThreshold::new(0.1).unwrap()).bins, vec![5, 25]);
        assert_eq!(extract_edges(&r, &EdgeThreshold::new(0.999).unwrap()).bins, vec![5]);
    }

    #[test]
    fn neighborhood_width() {
        assert_eq!(neighborhood(2), 2);
        assert_eq!(neighborhood(4), 2);
        assert_eq!(neighborhood(16), 8);
        // Two peaks three bins apart merge at w = 4 but not at w = 2.
        let mut v = vec![0.0; 32];
        v[10] = 1.0;
        v[13] = 0.9;
        assert_eq!(extract_edges(&response(v.clone(), 4), &EdgeThreshold::new(0.1).unwrap()).bins, vec![10, 13]);
        assert_eq!(extract_edges(&response(v, 8), &EdgeThreshold::new(0.1).unwrap()).bins, vec![10]);
    }

    #[test]
    fn threshold_validation() {
        assert!(EdgeThreshold::new(0.0).is_err());
        assert!(EdgeThreshold::new(1.0).is_err());
        assert!(EdgeThreshold::new(0.5).is_ok());
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(edge_rmse(&[1200.0, 1400.0], &[1200.0, 1400.0], 200.0).unwrap(), 0.0);
        assert_eq!(edge_rmse(&[1200.0], &[1210.0], 200.0).unwrap(), 10.0);
        let r = edge_rmse(&[1200.0, 1400.0], &[1195.0, 1390.0, 1600.0], 200.0).unwrap();
        assert!((r - 62.5f64.sqrt()).abs() < 1e-12);
        assert!((r - 7.906).abs() < 1e-3);
        assert_eq!(edge_rmse(&[1200.0, 1400.0], &[], 200.0).unwrap(), 200.0);
        assert!(edge_rmse::<f64>(&[], &[1.0], 1.0).is_err());
    }

    #[test]
    fn rmse_symmetric_in_sign() {
        let a = edge_rmse(&[1200.0, 1600.0], &[1203.0, 1597.0], 200.0).unwrap();
        let b = edge_rmse(&[1200.0, 1600.0], &[1197.0, 1603.0], 200.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plan_from_perfect_edges() {
        let g = grid();
        let truth = SubchannelPlan::uniform(
            1000.0,
            2000.0,
            5,
            vec![true, false, true, false, true],
            vec![10.0, 0.0, 10.0, 0.0, 10.0],
        )
        .unwrap();
        let psd = build_ideal_psd(&truth, &g).unwrap();
        let bins: Vec<usize> = truth.interior_boundaries().iter().map(|&b| g.nearest_bin(b).unwrap()).collect();
        let est = EdgeEstimate {
            frequencies: bins.iter().map(|&i| g.freq(i)).collect(),
            scores: vec![1.0; bins.len()],
            bins,
        };
        let plan = edges_to_plan(&est, &g, &psd, 1.0).unwrap();
        assert_eq!(plan.occupancy(), truth.occupancy());
        assert_eq!(plan.power(), truth.power());

        let idle = edges_to_plan(&est, &g, &psd, 100.0).unwrap();
        assert!(idle.occupancy().iter().all(|&o| !o));
    }

    #[test]
    fn no_edges_single_segment() {
        let g = grid();
        let psd = WidebandPsd::new(g, vec![0.5; 4096]).unwrap();
        let plan = edges_to_plan(&EdgeEstimate::default(), &g, &psd, 1.0).unwrap();
        assert_eq!(plan.channel_count(), 1);
        assert!(!plan.occupancy()[0]);
    }

    #[test]
    fn edge_csv_round_trip() {
        let est = EdgeEstimate { bins: vec![1, 2], frequencies: vec![1200.25, 1400.0], scores: vec![0.1 + 0.2, 7.0] };
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, &est).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("frequency_mhz,score\n1200.25,"));
        let rows = read_edges_csv(&buf[..]).unwrap();
        assert_eq!(rows, vec![(1200.25, 0.1 + 0.2), (1400.0, 7.0)]);
    }
}
