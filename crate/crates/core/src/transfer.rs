//! Exact transfer-matrix algebra across a barrier array and the scattering
//! amplitudes derived from it.
//!
//! The state vector is `(phi, phi')`; propagating it across a free interval
//! of length `L` at momentum `k` applies
//!
//! ```text
//! ( cos kL      sin(kL)/k )
//! ( -k sin kL   cos kL    )
//! ```
//!
//! and crossing a barrier of strength `v` applies the unit-determinant shear
//! `(1 0; v 1)`. Long chains grow exponentially in norm, so every matrix
//! carries a factored-out log magnitude: the true matrix is
//! `exp(log_scale) * entries`, with entries kept near unity by
//! renormalization after each composition.

use num_complex::Complex64;

use crate::barriers::BarrierArray;
use crate::error::{Error, Result};

/// Real 2x2 transfer matrix with a separated log-magnitude scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    /// Natural log of the factored-out positive magnitude.
    pub log_scale: f64,
}

/// Renormalize whenever the largest entry magnitude leaves this window.
const RENORM_LO: f64 = 0.5;
const RENORM_HI: f64 = 2.0;

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix =
        TransferMatrix { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0, log_scale: 0.0 };

    /// Free propagation over a signed interval `length` at momentum `k > 0`.
    pub fn free(k: f64, length: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("free propagation needs k > 0, got {k}")));
        }
        let (s, c) = (k * length).sin_cos();
        Ok(TransferMatrix { m11: c, m12: s / k, m21: -k * s, m22: c, log_scale: 0.0 })
    }

    /// Point-interaction shear for a barrier of strength `v`.
    pub fn barrier(v: f64) -> Self {
        TransferMatrix { m11: 1.0, m12: 0.0, m21: v, m22: 1.0, log_scale: 0.0 }
    }

    /// Matrix product `self * right` (rightmost factor acts first, i.e.
    /// corresponds to the leftmost spatial interval), renormalized so the
    /// largest entry magnitude lands in `[0.5, 2]`.
    pub fn compose(&self, right: &TransferMatrix) -> TransferMatrix {
        let mut out = TransferMatrix {
            m11: self.m11 * right.m11 + self.m12 * right.m21,
            m12: self.m11 * right.m12 + self.m12 * right.m22,
            m21: self.m21 * right.m11 + self.m22 * right.m21,
            m22: self.m21 * right.m12 + self.m22 * right.m22,
            log_scale: self.log_scale + right.log_scale,
        };
        let max = out.max_abs_entry();
        if max > 0.0 && !(RENORM_LO..=RENORM_HI).contains(&max) {
            let inv = 1.0 / max;
            out.m11 *= inv;
            out.m12 *= inv;
            out.m21 *= inv;
            out.m22 *= inv;
            out.log_scale += max.ln();
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.m11.abs().max(self.m12.abs()).max(self.m21.abs()).max(self.m22.abs())
    }

    /// Determinant of the stored (scaled) entries. For a true
    /// unit-determinant matrix this equals `exp(-2 * log_scale)` — up to
    /// floating-point noise of the entries, so it is only meaningful while
    /// `exp(-2 * log_scale)` stays well above machine epsilon.
    pub fn scaled_det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `scaled_det * exp(2 * log_scale) - 1`: the relative determinant
    /// defect against the exact value 1. See `scaled_det` for the range in
    /// which this is resolvable.
    pub fn det_defect(&self) -> f64 {
        let d = self.scaled_det();
        if d <= 0.0 {
            return f64::INFINITY;
        }
        let log_det = d.ln() + 2.0 * self.log_scale;
        log_det.exp() - 1.0
    }

    /// Natural log of the spectral norm (largest singular value) of the
    /// true matrix, from the 2x2 closed form.
    pub fn log_spectral_norm(&self) -> f64 {
        let q = self.m11 * self.m11
            + self.m12 * self.m12
            + self.m21 * self.m21
            + self.m22 * self.m22;
        let d = self.scaled_det();
        // sigma_max^2 = (q + sqrt(q^2 - 4 d^2)) / 2
        let disc = (q * q - 4.0 * d * d).max(0.0);
        let sigma2 = 0.5 * (q + disc.sqrt());
        self.log_scale + 0.5 * sigma2.ln()
    }

    /// Applies the scaled entries to a vector; the caller accounts for
    /// `log_scale` separately.
    pub fn apply_scaled(&self, phi: [f64; 2]) -> [f64; 2] {
        [self.m11 * phi[0] + self.m12 * phi[1], self.m21 * phi[0] + self.m22 * phi[1]]
    }
}

/// Total transfer matrix across the whole array, from just left of the
/// first barrier to just right of the last: barrier and free factors
/// interlaced, multiplied in the order reversed to that of the intervals.
pub fn total_transfer(arr: &BarrierArray, k: f64) -> Result<TransferMatrix> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("scattering needs k > 0, got {k}")));
    }
    let positions = arr.positions();
    let v = arr.strength();
    let Some((&first, rest)) = positions.split_first() else {
        return Ok(TransferMatrix::IDENTITY);
    };
    let mut acc = TransferMatrix::barrier(v);
    let mut prev = first;
    for &x in rest {
        acc = TransferMatrix::free(k, x - prev)?.compose(&acc);
        acc = TransferMatrix::barrier(v).compose(&acc);
        prev = x;
    }
    Ok(acc)
}

/// Running products `M(x_1, 0), M(x_2, 0), ..., M(x_n, 0)` along the
/// half-line: free propagation from the origin boundary through each gap
/// followed by the barrier there. `gaps[0]` is the distance from the
/// origin to the first barrier.
pub fn half_line_chain(gaps: &[f64], v: f64, k: f64) -> Result<Vec<TransferMatrix>> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("half-line chain needs k > 0, got {k}")));
    }
    let mut acc = TransferMatrix::IDENTITY;
    let mut out = Vec::with_capacity(gaps.len());
    for &gap in gaps {
        acc = TransferMatrix::free(k, gap)?.compose(&acc);
        acc = TransferMatrix::barrier(v).compose(&acc);
        out.push(acc);
    }
    Ok(out)
}

/// Complex transmission and reflection amplitudes at momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterResult {
    pub k: f64,
    pub t: Complex64,
    pub r: Complex64,
    /// Set when the array is effectively opaque: the reconstructed
    /// transmission underflowed, `t` was zeroed, and `r` normalized to
    /// unit magnitude.
    pub opaque: bool,
}

impl ScatterResult {
    /// Transmission probability, clamped to `[0, 1]` (rounding can push
    /// the raw value a few ulp past 1).
    pub fn abs_t2(&self) -> f64 {
        self.t.norm_sqr().min(1.0)
    }

    /// `|t|^2 + |r|^2 - 1`; zero for exact flux conservation.
    pub fn flux_defect(&self) -> f64 {
        self.t.norm_sqr() + self.r.norm_sqr() - 1.0
    }
}

/// Left-to-right scattering amplitudes for a plane wave `e^{ikx}` incident
/// on the array.
///
/// With `M` the total transfer matrix and `D = M21 - ik(M11 + M22) - k^2 M12`,
/// matching the plane-wave boundary values at the array edges gives
///
/// ```text
/// t(k) = -2ik e^{ik(x_first - x_last)} / D
/// r(k) =  e^{2ik x_first} (ik(M11 - M22) - k^2 M12 - M21) / D
/// ```
///
/// in the global phase convention where no potential means `t = 1, r = 0`
/// identically. Flux conservation `|t|^2 + |r|^2 = 1` follows from
/// `det M = 1`.
pub fn scattering(arr: &BarrierArray, k: f64) -> Result<ScatterResult> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("scattering needs k > 0, got {k}")));
    }
    if arr.is_empty() {
        return Ok(ScatterResult {
            k,
            t: Complex64::new(1.0, 0.0),
            r: Complex64::new(0.0, 0.0),
            opaque: false,
        });
    }
    let m = total_transfer(arr, k)?;
    let x_first = arr.positions()[0];
    let x_last = *arr.positions().last().unwrap();

    // Scaled numerator/denominator; exp(log_scale) cancels in r.
    let denom = Complex64::new(m.m21 - k * k * m.m12, -k * (m.m11 + m.m22));
    let refl_num = Complex64::new(-(m.m21 + k * k * m.m12), k * (m.m11 - m.m22));

    let mut r = refl_num / denom * Complex64::from_polar(1.0, 2.0 * k * x_first);
    let attenuation = (-m.log_scale).exp();
    let mut t = Complex64::new(0.0, -2.0 * k) / denom
        * Complex64::from_polar(attenuation, k * (x_first - x_last));

    let opaque = attenuation == 0.0 || t.norm_sqr() == 0.0;
    if opaque {
        t = Complex64::new(0.0, 0.0);
        let r_norm = r.norm();
        if r_norm > 0.0 {
            r /= r_norm;
        } else {
            r = Complex64::new(1.0, 0.0);
        }
    }
    Ok(ScatterResult { k, t, r, opaque })
}

/// Largest singular value of a single barrier factor:
/// `nu = |v|/2 + sqrt(v^2/4 + 1)`.
pub fn barrier_norm(v: f64) -> f64 {
    v.abs() / 2.0 + (v * v / 4.0 + 1.0).sqrt()
}

/// Log of the a-priori growth bound `(nu^2 max(k, 1/k))^n` on the norm of
/// the n-barrier half-line transfer matrix.
pub fn log_norm_bound(v: f64, k: f64, n: usize) -> f64 {
    n as f64 * (2.0 * barrier_norm(v).ln() + k.max(1.0 / k).ln())
}

/// Minimal exponential gap-growth rate `2 (ln max(k, 1/k) + ln nu)` that
/// guarantees divergence of the localization integral at this `(v, k)`.
pub fn rate_threshold(v: f64, k: f64) -> f64 {
    2.0 * (k.max(1.0 / k).ln() + barrier_norm(v).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::{generate_positions, SparsenessSpec};
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn free_matrix_values() {
        let m = TransferMatrix::free(1.0, PI).unwrap();
        assert_close(m.m11, -1.0, 1e-15);
        assert_close(m.m12, 0.0, 1e-15);
        assert_close(m.m21, 0.0, 1e-15);
        assert_close(m.m22, -1.0, 1e-15);

        let m = TransferMatrix::free(3.7, 0.0).unwrap();
        assert_eq!(m, TransferMatrix::IDENTITY);

        let m = TransferMatrix::free(2.0, PI / 4.0).unwrap();
        assert_close(m.m11, 0.0, 1e-15);
        assert_close(m.m12, 0.5, 1e-15);
        assert_close(m.m21, -2.0, 1e-15);
        assert_close(m.m22, 0.0, 1e-15);

        assert!(TransferMatrix::free(0.0, 1.0).is_err());
        assert!(TransferMatrix::free(-1.0, 1.0).is_err());
    }

    #[test]
    fn barrier_matrix_values() {
        assert_eq!(TransferMatrix::barrier(0.0), TransferMatrix::IDENTITY);
        let m = TransferMatrix::barrier(1.0);
        assert_eq!((m.m11, m.m12, m.m21, m.m22), (1.0, 0.0, 1.0, 1.0));
        for v in [-3.0, 0.5, 7.0] {
            assert_eq!(TransferMatrix::barrier(v).scaled_det(), 1.0);
        }
    }

    #[test]
    fn compose_identity_and_inverse_shears() {
        let a = TransferMatrix::free(1.3, 0.7).unwrap();
        assert_eq!(a.compose(&TransferMatrix::IDENTITY), a);
        let prod = TransferMatrix::barrier(2.5).compose(&TransferMatrix::barrier(-2.5));
        assert_eq!(prod, TransferMatrix::IDENTITY);
    }

    #[test]
    fn compose_keeps_entries_in_window() {
        let mut acc = TransferMatrix::IDENTITY;
        for _ in 0..2000 {
            // Single-cell trace 2 cos(0.77) + (3/0.7) sin(0.77) > 2, so the
            // chain grows exponentially.
            acc = TransferMatrix::barrier(3.0).compose(&acc);
            acc = TransferMatrix::free(0.7, 1.1).unwrap().compose(&acc);
        }
        let max = acc.max_abs_entry();
        assert!((RENORM_LO..=RENORM_HI).contains(&max), "max entry {max}");
        assert!(acc.log_scale > 10.0, "chain should have grown, log_scale = {}", acc.log_scale);
    }

    #[test]
    fn total_transfer_matches_hand_chain() {
        let arr = crate::barriers::BarrierArray::new(vec![-1.0, 0.0, 1.0], 1.0, true).unwrap();
        let m = total_transfer(&arr, 1.0).unwrap();

        let mv = TransferMatrix::barrier(1.0);
        let f = TransferMatrix::free(1.0, 1.0).unwrap();
        let hand = mv.compose(&f.compose(&mv.compose(&f.compose(&mv))));

        let scale = (m.log_scale - hand.log_scale).exp();
        assert_close(m.m11 * (m.log_scale).exp(), hand.m11 * (hand.log_scale).exp(), 1e-12);
        assert_close(m.m12 * scale, hand.m12, 1e-12);
        assert_close(m.m21 * scale, hand.m21, 1e-12);
        assert_close(m.m22 * scale, hand.m22, 1e-12);
    }

    #[test]
    fn total_transfer_degenerate_cases() {
        let empty = crate::barriers::BarrierArray::new(vec![], 1.0, false).unwrap();
        assert_eq!(total_transfer(&empty, 2.0).unwrap(), TransferMatrix::IDENTITY);
        let single = crate::barriers::BarrierArray::new(vec![0.0], 4.0, false).unwrap();
        assert_eq!(total_transfer(&single, 2.0).unwrap(), TransferMatrix::barrier(4.0));
    }

    #[test]
    fn free_particle_is_transparent() {
        let arr = crate::barriers::BarrierArray::new(vec![-2.0, 0.5, 3.0], 0.0, false).unwrap();
        for k in [0.3, 1.0, 4.7] {
            let s = scattering(&arr, k).unwrap();
            assert!((s.t - Complex64::new(1.0, 0.0)).norm() < 1e-13);
            assert!(s.r.norm() < 1e-13);
            assert!(!s.opaque);
        }
    }

    #[test]
    fn single_barrier_closed_form() {
        // Matching e^{ikx} + r e^{-ikx} | t e^{ikx} across one barrier gives
        // t = 2ik / (2ik - v), r = v / (2ik - v).
        for v in [-2.0, 0.5, 1.0, 3.0] {
            for k in [0.1, 0.5, 1.0, 2.0, 10.0] {
                let arr = crate::barriers::BarrierArray::new(vec![0.0], v, false).unwrap();
                let s = scattering(&arr, k).unwrap();
                let denom = Complex64::new(-v, 2.0 * k);
                let t_exact = Complex64::new(0.0, 2.0 * k) / denom;
                let r_exact = Complex64::new(v, 0.0) / denom;
                assert!((s.t - t_exact).norm() < 1e-14, "t mismatch at v={v}, k={k}");
                assert!((s.r - r_exact).norm() < 1e-14, "r mismatch at v={v}, k={k}");
                let abs_t2_exact = 4.0 * k * k / (v * v + 4.0 * k * k);
                assert_close(s.abs_t2(), abs_t2_exact, 1e-12);
                assert_close(s.flux_defect(), 0.0, 1e-12);
            }
        }
        let arr = crate::barriers::BarrierArray::new(vec![0.0], 1.0, false).unwrap();
        let s = scattering(&arr, 1.0).unwrap();
        assert_close(s.abs_t2(), 0.8, 1e-12);
    }

    #[test]
    fn reflection_picks_up_translation_phase() {
        // Shifting the potential leaves t alone and rotates r by e^{2ika}.
        let k = 0.9;
        let a = 5.3;
        let at_origin =
            scattering(&crate::barriers::BarrierArray::new(vec![0.0], 2.0, false).unwrap(), k)
                .unwrap();
        let shifted =
            scattering(&crate::barriers::BarrierArray::new(vec![a], 2.0, false).unwrap(), k)
                .unwrap();
        assert!((shifted.t - at_origin.t).norm() < 1e-13);
        let expected_r = at_origin.r * Complex64::from_polar(1.0, 2.0 * k * a);
        assert!((shifted.r - expected_r).norm() < 1e-13);
    }

    #[test]
    fn opaque_array_flags_and_normalizes() {
        let arr = generate_positions(&SparsenessSpec::Power { beta: 1.0 }, 100, 1000.0, true).unwrap();
        let s = scattering(&arr, 1.0).unwrap();
        assert!(s.opaque);
        assert_eq!(s.t, Complex64::new(0.0, 0.0));
        assert_close(s.r.norm(), 1.0, 1e-10);
    }

    #[test]
    fn norm_bound_and_rate_threshold_values() {
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert_close(barrier_norm(1.0), golden, 1e-12);
        assert_close(log_norm_bound(1.0, 1.0, 2), 4.0 * golden.ln(), 1e-12);
        assert_close(log_norm_bound(1.0, 1.0, 2), 1.9248473002384139, 1e-12);
        for n in [1, 5, 50] {
            assert_eq!(log_norm_bound(0.0, 1.0, n), 0.0);
        }
        assert_close(rate_threshold(1.0, 1.0), 2.0 * golden.ln(), 1e-12);
        assert_close(rate_threshold(1.0, 1.0), 0.9624236501192069, 1e-12);
        assert_eq!(rate_threshold(0.0, 1.0), 0.0);
        assert_close(rate_threshold(1.0, 2.0), 2.0 * (2.0f64.ln() + golden.ln()), 1e-12);
        assert_close(rate_threshold(1.0, 2.0), 2.3487180112390975, 1e-12);
    }

    #[test]
    fn spectral_norm_closed_form() {
        // Shear (1 0; v 1): sigma_max = nu.
        for v in [0.0, 1.0, -2.5, 10.0] {
            let m = TransferMatrix::barrier(v);
            assert_close(m.log_spectral_norm(), barrier_norm(v).ln(), 1e-12);
        }
        // Free matrix: sigma_max = max(k, 1/k).
        for k in [0.25, 1.0, 3.0] {
            let m = TransferMatrix::free(k, 0.83).unwrap();
            let bound = k.max(1.0 / k).ln();
            assert!(m.log_spectral_norm() <= bound + 1e-12);
        }
    }
}
