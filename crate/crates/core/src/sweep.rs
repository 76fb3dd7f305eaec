//! Transmission-spectrum experiments: momentum sweeps, nested zoom sweeps
//! exposing multi-scale fluctuation, and the sparse-vs-random comparison.

use rayon::prelude::*;

use crate::barriers::{generate_positions, BarrierArray, SparsenessSpec};
use crate::error::{Error, Result};
use crate::transfer::scattering;

/// Momenta at or below zero are clamped to this value; scattering is
/// undefined at `k = 0`.
pub const K_EPSILON: f64 = 1e-6;

/// One sweep over a uniform momentum grid through one barrier array.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub spec: SparsenessSpec,
    /// Barriers per side; symmetric arrays have `2 n_per_side + 1` total.
    pub n_per_side: usize,
    pub v: f64,
    pub symmetric: bool,
    pub k_min: f64,
    pub k_max: f64,
    pub n_points: usize,
    /// Window shrink factors for [`run_zoom`], each > 1.
    pub zoom_factors: Option<Vec<f64>>,
    /// Center of the zoomed windows; defaults to the midpoint of the
    /// previous window.
    pub zoom_anchor: Option<f64>,
    /// Base seed for the random realizations of [`compare_random`].
    pub seed: Option<u64>,
}

impl SweepRequest {
    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if !(self.k_min < self.k_max) {
            return Err(Error::invalid(format!(
                "need k_min < k_max, got [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::invalid(format!("need at least 2 grid points, got {}", self.n_points)));
        }
        Ok(())
    }

    fn array(&self) -> Result<BarrierArray> {
        generate_positions(&self.spec, self.n_per_side, self.v, self.symmetric)
    }
}

/// Scattering amplitudes at one grid momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub k: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub abs_t2: f64,
    pub opaque: bool,
}

/// One window of a nested zoom sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoomLevel {
    pub k_lo: f64,
    pub k_hi: f64,
    /// Cumulative magnification relative to the base window.
    pub magnification: f64,
    pub records: Vec<SweepRecord>,
}

/// Sparse-array median transmission against random-baseline medians.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomComparison {
    pub sparse_median_t2: f64,
    pub random_median_t2: Vec<f64>,
}

fn k_grid(k_lo: f64, k_hi: f64, n_points: usize) -> Vec<f64> {
    let step = (k_hi - k_lo) / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            let k = if i == n_points - 1 { k_hi } else { k_lo + i as f64 * step };
            k.max(K_EPSILON)
        })
        .collect()
}

fn sweep_array(arr: &BarrierArray, k_lo: f64, k_hi: f64, n_points: usize) -> Result<Vec<SweepRecord>> {
    k_grid(k_lo, k_hi, n_points)
        .par_iter()
        .map(|&k| {
            let s = scattering(arr, k)?;
            Ok(SweepRecord {
                k,
                t_re: s.t.re,
                t_im: s.t.im,
                abs_t2: s.abs_t2(),
                opaque: s.opaque,
            })
        })
        .collect()
}

/// Uniform momentum sweep, endpoints included, one record per grid point.
/// Deterministic for a fixed request (seeded families included).
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<SweepRecord>> {
    req.validate()?;
    let arr = req.array()?;
    sweep_array(&arr, req.k_min, req.k_max, req.n_points)
}

/// Nested zoom sweep: level 0 covers `[k_min, k_max]`, each further level
/// shrinks the window by the corresponding factor around the anchor
/// (midpoint of the previous window when unset), re-sampled with the same
/// number of points. Windows are shifted inward if the anchor would push
/// them past the parent window, so levels always nest.
pub fn run_zoom(req: &SweepRequest) -> Result<Vec<ZoomLevel>> {
    req.validate()?;
    let factors = req
        .zoom_factors
        .as_deref()
        .filter(|f| !f.is_empty())
        .ok_or_else(|| Error::invalid("zoom needs at least one zoom factor".to_string()))?;
    if let Some(&bad) = factors.iter().find(|&&f| !(f > 1.0)) {
        return Err(Error::invalid(format!("zoom factors must exceed 1, got {bad}")));
    }
    let arr = req.array()?;

    let mut levels = Vec::with_capacity(factors.len() + 1);
    let (mut lo, mut hi) = (req.k_min, req.k_max);
    let mut magnification = 1.0;
    levels.push(ZoomLevel {
        k_lo: lo,
        k_hi: hi,
        magnification,
        records: sweep_array(&arr, lo, hi, req.n_points)?,
    });
    for &factor in factors {
        let width = (hi - lo) / factor;
        let center = req.zoom_anchor.unwrap_or((lo + hi) / 2.0).clamp(lo + width / 2.0, hi - width / 2.0);
        lo = center - width / 2.0;
        hi = center + width / 2.0;
        magnification *= factor;
        let spacing = width / (req.n_points - 1) as f64;
        if spacing <= hi.abs().max(lo.abs()) * f64::EPSILON {
            return Err(Error::range(format!(
                "zoom window [{lo}, {hi}] is below floating-point grid resolution"
            )));
        }
        levels.push(ZoomLevel {
            k_lo: lo,
            k_hi: hi,
            magnification,
            records: sweep_array(&arr, lo, hi, req.n_points)?,
        });
    }
    Ok(levels)
}

/// Runs the sparse sweep once, then `n_realizations` sweeps with the same
/// barrier count placed uniformly at random over the same span
/// `[-x_max, x_max]`, same `v` and momentum grid. Realization `i` uses seed
/// `base_seed + i`, so the whole comparison is reproducible.
pub fn compare_random(req: &SweepRequest, n_realizations: usize) -> Result<RandomComparison> {
    req.validate()?;
    if matches!(req.spec, SparsenessSpec::Random { .. }) {
        return Err(Error::invalid("comparison baseline needs a non-random family".to_string()));
    }
    if n_realizations == 0 {
        return Err(Error::invalid("need at least one random realization".to_string()));
    }
    let sparse = req.array()?;
    let span = sparse
        .max_position()
        .ok_or_else(|| Error::invalid("empty sparse array".to_string()))?;
    let sparse_records = sweep_array(&sparse, req.k_min, req.k_max, req.n_points)?;
    let base_seed = req.seed.unwrap_or(0);

    let mut random_median_t2 = Vec::with_capacity(n_realizations);
    for i in 0..n_realizations {
        let spec = SparsenessSpec::Random { span, seed: base_seed + i as u64 };
        let arr = generate_positions(&spec, req.n_per_side, req.v, req.symmetric)?;
        let records = sweep_array(&arr, req.k_min, req.k_max, req.n_points)?;
        random_median_t2.push(median(records.iter().map(|r| r.abs_t2)));
    }
    Ok(RandomComparison {
        sparse_median_t2: median(sparse_records.iter().map(|r| r.abs_t2)),
        random_median_t2,
    })
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// std/mean of the transmission over a record set; the multi-scale
/// fluctuation measure used by the zoom experiment.
pub fn normalized_fluctuation(records: &[SweepRecord]) -> f64 {
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.abs_t2).sum::<f64>() / n;
    let var = records.iter().map(|r| (r.abs_t2 - mean) * (r.abs_t2 - mean)).sum::<f64>() / n;
    var.sqrt() / mean
}
