//! Phase-map iteration along the half-line barrier array.
//!
//! Writing the wave function as `phi = R sin(theta)`, `phi' = k R cos(theta)`
//! turns the piecewise-free Schrödinger equation into a phase recursion
//! across the barriers,
//!
//! ```text
//! cot(theta_{n+1}) = cot(theta_n + k gap_n) + v/k ,
//! ```
//!
//! plus amplitude bookkeeping: the squared amplitude ratio at step n is
//! `r_n^2 = mu + sqrt(mu^2 - 1) sin(beta_n)` with `mu = 1 + v^2/(2k^2)` and
//! the auxiliary phase `beta_n = 2 theta_n + 2 k gap_n - alpha`,
//! `alpha = arccos (1 + v^2/(4k^2))^{-1/2}`. When the `beta_n` equidistribute
//! on the circle, the running mean of `ln r_n^2` converges to
//! `ln((mu+1)/2) > 0` and the amplitudes grow exponentially; the module also
//! carries the equidistribution statistics and the transfer-norm divergence
//! diagnostics used to probe the spectral character of the infinite array.

use std::f64::consts::PI;

use crate::barriers::BarrierArray;
use crate::error::{Error, Result};
use crate::transfer::{barrier_norm, half_line_chain};

/// Minimum fitted log-log slope of the partial sums over the last decade
/// for a sequence to be called diverging. Diagnostic heuristic: converged
/// sums flatten to slopes many orders below this, genuinely divergent ones
/// sit at or above O(1).
pub const DIVERGENCE_SLOPE_MIN: f64 = 0.01;

/// Fold a phase into `(0, pi]`.
pub fn fold_theta(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r == 0.0 {
        PI
    } else {
        r
    }
}

/// Fold a phase into `[-pi, pi)`.
pub fn fold_beta(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r >= PI {
        -PI
    } else {
        r
    }
}

/// Momentum, coupling and the derived constants of the amplitude identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrueferParams {
    pub v: f64,
    pub k: f64,
    /// `1 + v^2 / (2 k^2)`.
    pub mu: f64,
    /// `arccos (1 + v^2/(4k^2))^{-1/2}`, in `[0, pi/2)`.
    pub alpha: f64,
    /// `|v|/2 + sqrt(v^2/4 + 1)`.
    pub nu: f64,
    /// Initial phase on `(0, pi]`.
    pub theta0: f64,
    /// `sqrt(mu^2 - 1)` computed cancellation-free.
    pub sqrt_mu2_minus_1: f64,
}

impl PrueferParams {
    /// Builds the parameter set. Without an explicit `boundary_phase` the
    /// initial phase encodes the barrier of strength `v` sitting at the
    /// origin, via `vartheta = -arcsin (1 + v^2/4)^{-1/2}` and the relation
    /// `tan(vartheta) = -tan(theta_0)/k`. Note the mapping from `v` to
    /// `vartheta` carries no `k`; pass `boundary_phase` to pin any other
    /// boundary condition directly.
    pub fn new(v: f64, k: f64, boundary_phase: Option<f64>) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("phase map needs k > 0, got {k}")));
        }
        let m1 = v * v / (2.0 * k * k);
        Ok(PrueferParams {
            v,
            k,
            mu: 1.0 + m1,
            alpha: (1.0 + v * v / (4.0 * k * k)).sqrt().recip().acos(),
            nu: barrier_norm(v),
            theta0: initial_theta(v, k, boundary_phase),
            sqrt_mu2_minus_1: (m1 * (m1 + 2.0)).sqrt(),
        })
    }

    /// Offset turning `2(theta + k gap)` into the amplitude phase `beta`;
    /// the sign flip for `v < 0` keeps `r^2 = mu + sqrt(mu^2-1) sin(beta)`
    /// valid for attractive barriers.
    fn beta_shift(&self) -> f64 {
        if self.v >= 0.0 {
            -self.alpha
        } else {
            self.alpha + PI
        }
    }

    /// `ln r^2` recomputed from a stored `beta`.
    pub fn log_r2_from_beta(&self, beta: f64) -> f64 {
        (self.mu + self.sqrt_mu2_minus_1 * beta.sin()).ln()
    }

    /// Mean of `ln r^2` under exactly uniform `beta`: `ln((mu+1)/2)`.
    pub fn equidistributed_growth(&self) -> f64 {
        ((self.mu + 1.0) / 2.0).ln()
    }
}

/// Initial phase induced by the boundary condition
/// `phi(0) cos(vartheta) + phi'(0) sin(vartheta) = 0`, folded into `(0, pi]`.
/// `boundary_phase = 0` is Dirichlet (`theta_0 = pi`), `pi/2` is Neumann
/// (`theta_0 = pi/2`); absent, the default encodes the origin barrier of
/// strength `v` (see [`PrueferParams::new`]).
pub fn initial_theta(v: f64, k: f64, boundary_phase: Option<f64>) -> f64 {
    let vartheta =
        boundary_phase.unwrap_or_else(|| -(1.0 + v * v / 4.0).sqrt().recip().asin());
    // tan(theta_0) = -k tan(vartheta)
    fold_theta((-k * vartheta.sin()).atan2(vartheta.cos()))
}

/// One step of the phase recursion: `cot(theta') = cot(theta + k_delta) + v/k`,
/// with the result on `(0, pi]`. At an exact node of the wave function
/// (`sin(theta + k_delta) = 0`) the barrier acts trivially and the free
/// phase advance is returned.
pub fn eggarter_step(theta: f64, k_delta: f64, v_over_k: f64) -> f64 {
    let psi = theta + k_delta;
    let (s, c) = psi.sin_cos();
    if s == 0.0 {
        return fold_theta(psi);
    }
    let cot_next = c / s + v_over_k;
    let next = 1.0f64.atan2(cot_next);
    if next <= 0.0 {
        PI
    } else {
        next
    }
}

/// Phase and amplitude history along the array.
///
/// Entry `j` (0-based) describes barrier `j+1`: `thetas[j]` is the phase
/// entering the gap before it, `betas[j]` the amplitude phase, `log_r2[j]`
/// the squared amplitude ratio across it, and `cum_log_r2[j]` the running
/// sum (i.e. `ln R^2` of the interval just past barrier `j+1`, relative to
/// `R_1 = 1`). `thetas` carries one extra trailing entry: the final phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PrueferOrbit {
    pub thetas: Vec<f64>,
    pub betas: Vec<f64>,
    pub log_r2: Vec<f64>,
    pub cum_log_r2: Vec<f64>,
}

impl PrueferOrbit {
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// `(1/N) sum ln r_n^2`, the empirical growth exponent of `R^2`.
    pub fn growth_exponent(&self) -> f64 {
        match self.cum_log_r2.last() {
            Some(&total) => total / self.len() as f64,
            None => 0.0,
        }
    }
}

/// Iterates the phase map along `gaps[..n_steps]`.
pub fn iterate(params: &PrueferParams, gaps: &[f64], n_steps: usize) -> Result<PrueferOrbit> {
    if n_steps > gaps.len() {
        return Err(Error::insufficient(format!(
            "requested {n_steps} steps but only {} gaps",
            gaps.len()
        )));
    }
    let shift = params.beta_shift();
    let v_over_k = params.v / params.k;
    let mut thetas = Vec::with_capacity(n_steps + 1);
    let mut betas = Vec::with_capacity(n_steps);
    let mut log_r2 = Vec::with_capacity(n_steps);
    let mut cum_log_r2 = Vec::with_capacity(n_steps);
    let mut theta = params.theta0;
    let mut cum = 0.0;
    thetas.push(theta);
    for &gap in &gaps[..n_steps] {
        let k_delta = params.k * gap;
        let beta = fold_beta(2.0 * (theta + k_delta) + shift);
        let step_log_r2 = params.log_r2_from_beta(beta);
        theta = eggarter_step(theta, k_delta, v_over_k);
        cum += step_log_r2;
        betas.push(beta);
        log_r2.push(step_log_r2);
        cum_log_r2.push(cum);
        thetas.push(theta);
    }
    Ok(PrueferOrbit { thetas, betas, log_r2, cum_log_r2 })
}

/// `ln r^2` from the defining amplitude ratio
/// `sin^2(theta + k_delta) / sin^2(theta_next)`; used to cross-check the
/// closed-form value recorded by [`iterate`].
pub fn log_r2_direct(theta: f64, k_delta: f64, theta_next: f64) -> f64 {
    let num = (theta + k_delta).sin();
    let den = theta_next.sin();
    (num * num / (den * den)).ln()
}

/// The amplitude-phase map iterated directly on `beta`: recovers
/// `theta + k gap` from `beta`, applies the barrier recursion, and advances
/// by the next gap. Equivalent to running [`iterate`] and converting.
pub fn beta_step(params: &PrueferParams, beta: f64, k_delta_next: f64) -> f64 {
    let shift = params.beta_shift();
    let psi = fold_theta((beta - shift) / 2.0);
    let theta_next = eggarter_step(psi, 0.0, params.v / params.k);
    fold_beta(2.0 * (theta_next + k_delta_next) + shift)
}

/// Histogram, Kolmogorov-Smirnov statistic against the uniform law on
/// `[-pi, pi)`, and Weyl sum magnitudes of a circle sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistStats {
    pub histogram: Vec<u64>,
    pub ks_statistic: f64,
    /// `|(1/N) sum exp(i m beta_n)|` for `m = 1..=n_weyl`.
    pub weyl_magnitudes: Vec<f64>,
}

/// Bin counts of `samples` over `n_bins` equal bins spanning `[lo, hi)`.
pub fn histogram_counts(samples: &[f64], lo: f64, hi: f64, n_bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_bins];
    let width = hi - lo;
    for &x in samples {
        let idx = (((x - lo) / width) * n_bins as f64).floor();
        let idx = (idx.max(0.0) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    counts
}

pub fn equidistribution_stats(
    samples: &[f64],
    n_bins: usize,
    n_weyl: usize,
) -> Result<EquidistStats> {
    if samples.is_empty() {
        return Err(Error::insufficient("no samples".to_string()));
    }
    if n_bins < 2 {
        return Err(Error::invalid(format!("need at least 2 bins, got {n_bins}")));
    }
    for &x in samples {
        if !(-PI..PI).contains(&x) {
            return Err(Error::invalid(format!("sample {x} outside [-pi, pi)")));
        }
    }

    let histogram = histogram_counts(samples, -PI, PI, n_bins);

    // Kolmogorov-Smirnov against the uniform CDF.
    let n = samples.len() as f64;
    let mut unit: Vec<f64> = samples.iter().map(|&x| (x + PI) / (2.0 * PI)).collect();
    unit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ks = 0.0f64;
    for (i, &u) in unit.iter().enumerate() {
        ks = ks.max(u - i as f64 / n).max((i + 1) as f64 / n - u);
    }

    let weyl_magnitudes = (1..=n_weyl)
        .map(|m| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in samples {
                let (s, c) = (m as f64 * x).sin_cos();
                re += c;
                im += s;
            }
            (re * re + im * im).sqrt() / n
        })
        .collect();

    Ok(EquidistStats { histogram, ks_statistic: ks, weyl_magnitudes })
}

/// Partial sums probing divergence of `integral dx / ||M(x,0)||^2`, which
/// rules out point spectrum when infinite.
///
/// `bound_partial_sums` uses the a-priori growth bound
/// `(nu^2 max(k,1/k))^{2n}` for the squared norm (a lower bound on the
/// integral, conservative and often inconclusive); `sharp_partial_sums`
/// uses the actual reconstructed `||M(x_n, 0)||^2`. Terms whose log-space
/// value underflows are set to zero, which only weakens the lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpectrumDiagnostic {
    pub bound_partial_sums: Vec<f64>,
    pub sharp_partial_sums: Vec<f64>,
    pub bound_diverging: bool,
    pub sharp_diverging: bool,
}

impl PointSpectrumDiagnostic {
    /// True when either partial-sum sequence still grows at a nontrivial
    /// log-log slope over its last decade. A diagnostic, not a proof.
    pub fn diverging_trend(&self) -> bool {
        self.bound_diverging || self.sharp_diverging
    }
}

pub fn point_spectrum_diagnostic(
    arr: &BarrierArray,
    v: f64,
    k: f64,
    n: usize,
) -> Result<PointSpectrumDiagnostic> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("diagnostic needs k > 0, got {k}")));
    }
    if n == 0 {
        return Err(Error::invalid("diagnostic needs n >= 1".to_string()));
    }
    let gaps = arr.gaps()?;
    if gaps.len() < n {
        return Err(Error::insufficient(format!(
            "need {n} positive-side gaps, array has {}",
            gaps.len()
        )));
    }
    let log_per_barrier = 2.0 * barrier_norm(v).ln() + k.max(1.0 / k).ln();
    let chain = half_line_chain(&gaps[..n], v, k)?;

    let mut bound_partial_sums = Vec::with_capacity(n);
    let mut sharp_partial_sums = Vec::with_capacity(n);
    let (mut bound_sum, mut sharp_sum) = (0.0, 0.0);
    for (i, &gap) in gaps[..n].iter().enumerate() {
        let log_gap = gap.ln();
        bound_sum += exp_or_zero(log_gap - 2.0 * (i + 1) as f64 * log_per_barrier);
        sharp_sum += exp_or_zero(log_gap - 2.0 * chain[i].log_spectral_norm());
        bound_partial_sums.push(bound_sum);
        sharp_partial_sums.push(sharp_sum);
    }

    Ok(PointSpectrumDiagnostic {
        bound_diverging: last_decade_slope(&bound_partial_sums) >= DIVERGENCE_SLOPE_MIN,
        sharp_diverging: last_decade_slope(&sharp_partial_sums) >= DIVERGENCE_SLOPE_MIN,
        bound_partial_sums,
        sharp_partial_sums,
    })
}

fn exp_or_zero(log_term: f64) -> f64 {
    let t = log_term.exp();
    if t.is_finite() {
        t
    } else {
        0.0
    }
}

/// Least-squares slope of `ln S_i` vs `ln i` over the last decade of
/// indices (`i` 1-based, from `n/10` to `n`). Zero entries are skipped;
/// fewer than two usable points yields `-inf`.
fn last_decade_slope(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    let lo = (n / 10).max(1);
    let pts: Vec<(f64, f64)> = (lo..=n)
        .filter(|&i| partial_sums[i - 1] > 0.0)
        .map(|i| ((i as f64).ln(), partial_sums[i - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let m = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx == 0.0 {
        return f64::NEG_INFINITY;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    sxy / sxx
}
