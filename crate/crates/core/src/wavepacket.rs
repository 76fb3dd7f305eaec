//! Wave-packet shredding: filter a packet's momentum content by the
//! transmission amplitude `t(k)` and quantify how much of the position-space
//! shape survives.
//!
//! The filter acts spectrally — multiply by `t(k)`, transform back — which
//! is the convolution with the Fourier kernel of `t` evaluated without ever
//! forming the slowly decaying kernel. Transform conventions, pinned for
//! reproducibility:
//!
//! * forward (x to k) kernel `exp(-ikx)`, inverse `exp(+ikx)`;
//! * grids are conjugate, `delta_x * delta_k = 2 pi / n`, with
//!   `k_j = k_lo + j delta_k` and `x_m = (m - n/2) delta_x`;
//! * amplitudes sample the unitary-convention continuum functions, so the
//!   grid-measure norms `sum |phi|^2 delta_k` and `sum |phi|^2 delta_x`
//!   agree.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::barriers::BarrierArray;
use crate::error::{Error, Result};
use crate::transfer::scattering;

/// Default sample count for packet grids.
pub const DEFAULT_SAMPLES: usize = 1 << 14;
/// Default half-width of the momentum window, in units of sigma.
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 8.0;
/// A packet must keep the weight at `k <= 0` below this fraction of its
/// norm to be scattered left-to-right.
pub const NEGATIVE_K_TOLERANCE: f64 = 1e-8;

/// Uniform momentum grid `k_j = k_lo + j (k_hi - k_lo)/n`, `j = 0..n`
/// (exclusive upper endpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub k_lo: f64,
    pub k_hi: f64,
}

impl GridSpec {
    /// Default grid for a packet centered at `k0` with momentum spread
    /// `sigma`: 2^14 samples over `k0 +- 8 sigma`.
    pub fn for_packet(k0: f64, sigma: f64) -> GridSpec {
        GridSpec {
            n: DEFAULT_SAMPLES,
            k_lo: k0 - DEFAULT_HALF_WIDTH_SIGMAS * sigma,
            k_hi: k0 + DEFAULT_HALF_WIDTH_SIGMAS * sigma,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 samples, got {}", self.n)));
        }
        if !(self.k_hi > self.k_lo) {
            return Err(Error::invalid(format!(
                "grid needs k_lo < k_hi, got [{}, {}]",
                self.k_lo, self.k_hi
            )));
        }
        Ok(())
    }

    pub fn delta_k(&self) -> f64 {
        (self.k_hi - self.k_lo) / self.n as f64
    }
}

/// Complex amplitudes on conjugate momentum and position grids.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketGrid {
    pub n: usize,
    pub k_lo: f64,
    pub delta_k: f64,
    pub delta_x: f64,
    pub amps_k: Vec<Complex64>,
    pub amps_x: Vec<Complex64>,
}

impl PacketGrid {
    /// Builds a packet from momentum amplitudes, computing the position
    /// representation.
    pub fn from_k_amplitudes(grid: &GridSpec, amps_k: Vec<Complex64>) -> Result<PacketGrid> {
        grid.validate()?;
        if amps_k.len() != grid.n {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                grid.n,
                amps_k.len()
            )));
        }
        let delta_k = grid.delta_k();
        let delta_x = 2.0 * std::f64::consts::PI / (grid.n as f64 * delta_k);
        let mut packet = PacketGrid {
            n: grid.n,
            k_lo: grid.k_lo,
            delta_k,
            delta_x,
            amps_k,
            amps_x: Vec::new(),
        };
        packet.amps_x = packet.k_to_x();
        Ok(packet)
    }

    pub fn k_at(&self, j: usize) -> f64 {
        self.k_lo + j as f64 * self.delta_k
    }

    pub fn x_at(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.delta_x
    }

    /// `sum |phi(k)|^2 delta_k`.
    pub fn norm_k(&self) -> f64 {
        self.amps_k.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.delta_k
    }

    /// `sum |phi(x)|^2 delta_x`.
    pub fn norm_x(&self) -> f64 {
        self.amps_x.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.delta_x
    }

    pub fn same_grid(&self, other: &PacketGrid) -> bool {
        self.n == other.n && self.k_lo == other.k_lo && self.delta_k == other.delta_k
    }

    /// Fraction of the position-space norm in the outermost 5% of the
    /// window (2.5% per side); large values mean the grid is too small for
    /// the spread packet and aliasing is biting.
    pub fn edge_power_fraction(&self) -> f64 {
        let edge = (self.n / 40).max(1);
        let total: f64 = self.amps_x.iter().map(|a| a.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outer: f64 = self.amps_x[..edge]
            .iter()
            .chain(&self.amps_x[self.n - edge..])
            .map(|a| a.norm_sqr())
            .sum();
        outer / total
    }

    /// Inverse transform (k to x):
    /// `phi(x_m) = sqrt(dk/dx) (1/sqrt n) sum_j phi(k_j) e^{+i k_j x_m}`.
    pub fn k_to_x(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut work: Vec<Complex64> = self
            .amps_k
            .iter()
            .enumerate()
            .map(|(j, &a)| if j % 2 == 0 { a } else { -a })
            .collect();
        fft_in_place(&mut work, FftDirection::Inverse);
        let scale = (self.delta_k / self.delta_x).sqrt() / (n as f64).sqrt();
        work.iter()
            .enumerate()
            .map(|(m, &w)| w * Complex64::from_polar(scale, self.k_lo * self.x_at(m)))
            .collect()
    }

    /// Forward transform (x to k), the exact inverse of [`Self::k_to_x`].
    pub fn x_to_k(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut work: Vec<Complex64> = self
            .amps_x
            .iter()
            .enumerate()
            .map(|(m, &a)| a * Complex64::from_polar(1.0, -self.k_lo * self.x_at(m)))
            .collect();
        fft_in_place(&mut work, FftDirection::Forward);
        let scale = (self.delta_x / self.delta_k).sqrt() / (n as f64).sqrt();
        work.iter()
            .enumerate()
            .map(|(j, &w)| if j % 2 == 0 { w * scale } else { -w * scale })
            .collect()
    }
}

fn fft_in_place(data: &mut [Complex64], direction: FftDirection) {
    let fft = FftPlanner::new().plan_fft(data.len(), direction);
    fft.process(data);
}

/// Normalized Gaussian packet: `|phi(k)|^2` is Gaussian with mean `k0`,
/// standard deviation `sigma`, and unit grid-measure norm.
pub fn gaussian_packet(k0: f64, sigma: f64, grid: &GridSpec) -> Result<PacketGrid> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("packet needs sigma > 0, got {sigma}")));
    }
    grid.validate()?;
    if grid.k_lo > k0 - 6.0 * sigma || grid.k_hi < k0 + 6.0 * sigma {
        return Err(Error::invalid(format!(
            "grid [{}, {}] too narrow: must cover k0 +- 6 sigma = [{}, {}]",
            grid.k_lo,
            grid.k_hi,
            k0 - 6.0 * sigma,
            k0 + 6.0 * sigma
        )));
    }
    let delta_k = grid.delta_k();
    let mut amps: Vec<Complex64> = (0..grid.n)
        .map(|j| {
            let dk = grid.k_lo + j as f64 * delta_k - k0;
            Complex64::new((-dk * dk / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * delta_k;
    let scale = norm.sqrt().recip();
    for a in &mut amps {
        *a *= scale;
    }
    PacketGrid::from_k_amplitudes(grid, amps)
}

/// Multiplies the momentum amplitudes pointwise by `t(k)` and recomputes
/// the position representation. Requires the packet's weight at `k <= 0`
/// to be negligible (left-to-right scattering geometry); those samples are
/// zeroed.
pub fn transmit_packet(packet: &PacketGrid, arr: &BarrierArray) -> Result<PacketGrid> {
    let negative_weight: f64 = (0..packet.n)
        .filter(|&j| packet.k_at(j) <= 0.0)
        .map(|j| packet.amps_k[j].norm_sqr())
        .sum::<f64>()
        * packet.delta_k;
    let norm = packet.norm_k();
    if negative_weight > NEGATIVE_K_TOLERANCE * norm {
        return Err(Error::invalid(format!(
            "packet carries {negative_weight:e} of its norm at k <= 0; \
             left-to-right scattering needs < {NEGATIVE_K_TOLERANCE:e} relative"
        )));
    }
    let filtered: Vec<Complex64> = (0..packet.n)
        .into_par_iter()
        .map(|j| {
            let k = packet.k_at(j);
            if k <= 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Ok(packet.amps_k[j] * scattering(arr, k)?.t)
            }
        })
        .collect::<Result<_>>()?;
    let grid = GridSpec {
        n: packet.n,
        k_lo: packet.k_lo,
        k_hi: packet.k_lo + packet.n as f64 * packet.delta_k,
    };
    PacketGrid::from_k_amplitudes(&grid, filtered)
}

/// Shape-survival measures between an input and an output packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShredMetrics {
    /// Peak over all circular lags of the normalized cross-correlation of
    /// `|phi_in(x)|` and `|phi_out(x)|`; 1 means the shape survived up to
    /// translation, values near 0 mean it was destroyed.
    pub xcorr_peak: f64,
    /// RMS width of `|phi_out(x)|^2` over that of `|phi_in(x)|^2`.
    pub spread_ratio: f64,
    /// Shannon entropy of the normalized `|phi_out(x)|^2` distribution
    /// over that of the input.
    pub spectral_entropy_ratio: f64,
    /// Output norm over input norm, both in position space.
    pub transmitted_fraction: f64,
}

pub fn shredding_metrics(input: &PacketGrid, output: &PacketGrid) -> Result<ShredMetrics> {
    if !input.same_grid(output) {
        return Err(Error::invalid("packets live on different grids".to_string()));
    }
    let norm_in = input.norm_x();
    let norm_out = output.norm_x();
    if norm_out == 0.0 {
        return Err(Error::invalid("output packet has zero norm".to_string()));
    }

    let a: Vec<f64> = input.amps_x.iter().map(|z| z.norm()).collect();
    let b: Vec<f64> = output.amps_x.iter().map(|z| z.norm()).collect();
    let xcorr_peak = circular_xcorr_peak(&a, &b);

    let entropy_in = shannon_entropy(&a);
    let entropy_out = shannon_entropy(&b);
    if entropy_in == 0.0 {
        return Err(Error::invalid("input packet entropy is zero".to_string()));
    }

    Ok(ShredMetrics {
        xcorr_peak,
        spread_ratio: rms_width(output) / rms_width(input),
        spectral_entropy_ratio: entropy_out / entropy_in,
        transmitted_fraction: norm_out / norm_in,
    })
}

/// `max_l |sum_m a[m] b[m+l]| / (||a|| ||b||)`, lags circular.
fn circular_xcorr_peak(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut fa, FftDirection::Forward);
    fft_in_place(&mut fb, FftDirection::Forward);
    let mut cross: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    fft_in_place(&mut cross, FftDirection::Inverse);
    let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_b = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let peak = cross.iter().map(|c| c.norm()).fold(0.0, f64::max) / (n as f64 * norm_a * norm_b);
    peak.min(1.0)
}

fn rms_width(packet: &PacketGrid) -> f64 {
    let weights: Vec<f64> = packet.amps_x.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let mean: f64 =
        weights.iter().enumerate().map(|(m, w)| packet.x_at(m) * w).sum::<f64>() / total;
    let var: f64 = weights
        .iter()
        .enumerate()
        .map(|(m, w)| {
            let d = packet.x_at(m) - mean;
            d * d * w
        })
        .sum::<f64>()
        / total;
    var.sqrt()
}

fn shannon_entropy(amplitudes: &[f64]) -> f64 {
    let total: f64 = amplitudes.iter().map(|a| a * a).sum();
    amplitudes
        .iter()
        .map(|a| a * a / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::BarrierArray;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn small_gaussian() -> PacketGrid {
        let grid = GridSpec { n: 4096, k_lo: 0.2, k_hi: 1.8 };
        gaussian_packet(1.0, 0.05, &grid).unwrap()
    }

    #[test]
    fn gaussian_norm_and_moments() {
        let packet = small_gaussian();
        assert_close(packet.norm_k(), 1.0, 1e-12);
        assert_close(packet.norm_x(), 1.0, 1e-10);

        let mean: f64 = (0..packet.n)
            .map(|j| packet.k_at(j) * packet.amps_k[j].norm_sqr())
            .sum::<f64>()
            * packet.delta_k;
        assert_close(mean, 1.0, packet.delta_k);

        let second: f64 = (0..packet.n)
            .map(|j| {
                let d = packet.k_at(j) - mean;
                d * d * packet.amps_k[j].norm_sqr()
            })
            .sum::<f64>()
            * packet.delta_k;
        assert_close(second, 0.05 * 0.05, 0.01 * 0.05 * 0.05);
    }

    #[test]
    fn too_narrow_grid_rejected() {
        let grid = GridSpec { n: 256, k_lo: 0.9, k_hi: 1.1 };
        assert!(gaussian_packet(1.0, 0.05, &grid).is_err());
        assert!(gaussian_packet(1.0, -0.1, &GridSpec { n: 256, k_lo: 0.0, k_hi: 2.0 }).is_err());
    }

    #[test]
    fn transform_round_trip() {
        let packet = small_gaussian();
        let back = packet.x_to_k();
        for (orig, rt) in packet.amps_k.iter().zip(&back) {
            assert!((orig - rt).norm() <= 1e-10 * (1.0 + orig.norm()));
        }
    }

    #[test]
    fn free_transmission_is_identity() {
        let packet = small_gaussian();
        let arr = BarrierArray::new(vec![-3.0, 0.0, 3.0], 0.0, true).unwrap();
        let out = transmit_packet(&packet, &arr).unwrap();
        for (a, b) in packet.amps_k.iter().zip(&out.amps_k) {
            assert!((a - b).norm() < 1e-10);
        }
        for (a, b) in packet.amps_x.iter().zip(&out.amps_x) {
            assert!((a - b).norm() < 1e-10);
        }
        let metrics = shredding_metrics(&packet, &out).unwrap();
        assert_close(metrics.xcorr_peak, 1.0, 1e-10);
        assert_close(metrics.spread_ratio, 1.0, 1e-10);
        assert_close(metrics.spectral_entropy_ratio, 1.0, 1e-10);
        assert_close(metrics.transmitted_fraction, 1.0, 1e-10);
    }

    #[test]
    fn narrow_packet_sees_single_barrier_transmission() {
        let packet = small_gaussian();
        let arr = BarrierArray::new(vec![0.0], 1.0, false).unwrap();
        let out = transmit_packet(&packet, &arr).unwrap();
        // |t(1)|^2 = 0.8 for v = 1; a sigma = 0.05 packet samples it almost
        // pointwise.
        assert_close(out.norm_k() / packet.norm_k(), 0.8, 0.008);
        // Parseval: the transmitted fraction measured in x matches the
        // k-space filter sum.
        let k_side: f64 = (0..packet.n)
            .map(|j| out.amps_k[j].norm_sqr())
            .sum::<f64>()
            * packet.delta_k;
        assert_close(out.norm_x(), k_side, 1e-10);
    }

    #[test]
    fn negative_momentum_weight_rejected() {
        let grid = GridSpec { n: 512, k_lo: -1.0, k_hi: 1.0 };
        let packet = gaussian_packet(0.0, 0.05, &grid).unwrap();
        let arr = BarrierArray::new(vec![0.0], 1.0, false).unwrap();
        assert!(transmit_packet(&packet, &arr).is_err());
    }

    #[test]
    fn metrics_shift_invariance() {
        let packet = small_gaussian();
        let mut shifted = packet.clone();
        shifted.amps_x.rotate_right(300);
        let metrics = shredding_metrics(&packet, &shifted).unwrap();
        assert_close(metrics.xcorr_peak, 1.0, 1e-10);
    }

    #[test]
    fn metrics_reject_grid_mismatch_and_zero_norm() {
        let packet = small_gaussian();
        let other = gaussian_packet(1.0, 0.05, &GridSpec { n: 2048, k_lo: 0.2, k_hi: 1.8 }).unwrap();
        assert!(shredding_metrics(&packet, &other).is_err());
        let mut dead = packet.clone();
        for a in &mut dead.amps_x {
            *a = Complex64::new(0.0, 0.0);
        }
        assert!(shredding_metrics(&packet, &dead).is_err());
    }

    #[test]
    fn edge_power_is_negligible_for_centered_packet() {
        let packet = small_gaussian();
        assert!(packet.edge_power_fraction() < 1e-6);
    }
}
