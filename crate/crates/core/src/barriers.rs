//! Barrier position arrays for every sparseness family, plus a random
//! baseline.
//!
//! Positions on the positive half-axis follow one of
//!
//! * power law            `x_n = n^beta`
//! * exponential          `x_n = e^n`
//! * combined             `x_n = b*n^beta + c*exp(a*n^gamma)`
//! * uniform random draws on `[-span, span]`
//!
//! Symmetric arrays mirror the positive side through the origin and include
//! a barrier at `x = 0`; asymmetric (half-line) arrays start at `x_1`.

use crate::error::{Error, Result};

/// Hard cap for `x_n = e^n`: `e^710` is not representable in f64.
const MAX_EXPONENTIAL_INDEX: usize = 700;

/// Spacing family plus its parameters. All lengths share one unit; the
/// dimensionless exponents control how fast successive gaps grow.
#[derive(Debug, Clone, PartialEq)]
pub enum SparsenessSpec {
    /// `x_n = n^beta`. `beta = 1` is the equidistant baseline; `beta > 1`
    /// gives strictly growing gaps.
    Power { beta: f64 },
    /// `x_n = e^n`.
    Exponential,
    /// `x_n = b*n^beta + c*exp(a*n^gamma)`; `c = 0` degenerates to a pure
    /// power law.
    PolyExp { b: f64, beta: f64, c: f64, a: f64, gamma: f64 },
    /// Uniform positions on `[-span, span]` from the seeded generator
    /// documented at [`SplitMix64`].
    Random { span: f64, seed: u64 },
}

impl SparsenessSpec {
    /// Combined family with the default parameters `b = c = a = gamma = 1`.
    pub fn poly_exp_default(beta: f64) -> Self {
        SparsenessSpec::PolyExp { b: 1.0, beta, c: 1.0, a: 1.0, gamma: 1.0 }
    }

    /// Checks the parameter domain of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SparsenessSpec::Power { beta } => {
                if !(beta >= 1.0) {
                    return Err(Error::invalid(format!("power spacing needs beta >= 1, got {beta}")));
                }
            }
            SparsenessSpec::Exponential => {}
            SparsenessSpec::PolyExp { b, beta, c, a, gamma } => {
                if !(b > 0.0) {
                    return Err(Error::invalid(format!("combined spacing needs b > 0, got {b}")));
                }
                if !(beta > 1.0) {
                    return Err(Error::invalid(format!("combined spacing needs beta > 1, got {beta}")));
                }
                if !(c >= 0.0) {
                    return Err(Error::invalid(format!("combined spacing needs c >= 0, got {c}")));
                }
                if !(a > 0.0) {
                    return Err(Error::invalid(format!("combined spacing needs a > 0, got {a}")));
                }
                if !(gamma >= 1.0) {
                    return Err(Error::invalid(format!("combined spacing needs gamma >= 1, got {gamma}")));
                }
            }
            SparsenessSpec::Random { span, .. } => {
                if !(span > 0.0 && span.is_finite()) {
                    return Err(Error::invalid(format!("random spacing needs span > 0, got {span}")));
                }
            }
        }
        Ok(())
    }

    /// Position of the n-th barrier (n >= 1) for the deterministic families.
    fn position(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let x = match *self {
            SparsenessSpec::Power { beta } => nf.powf(beta),
            SparsenessSpec::Exponential => {
                if n > MAX_EXPONENTIAL_INDEX {
                    return Err(Error::range(format!(
                        "exponential spacing overflows f64 beyond n = {MAX_EXPONENTIAL_INDEX} (requested {n})"
                    )));
                }
                nf.exp()
            }
            SparsenessSpec::PolyExp { b, beta, c, a, gamma } => {
                b * nf.powf(beta) + c * (a * nf.powf(gamma)).exp()
            }
            SparsenessSpec::Random { .. } => {
                return Err(Error::invalid("random spacing has no closed-form positions".to_string()))
            }
        };
        if !x.is_finite() {
            return Err(Error::range(format!("barrier position x_{n} is not finite")));
        }
        Ok(x)
    }
}

/// SplitMix64 (Steele, Lea & Flood 2014). Pinned here so random barrier
/// arrays reproduce bit-for-bit from a seed in any implementation:
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// Uniform doubles use the top 53 bits: `(output >> 11) * 2^-53`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform on `[lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }
}

/// Sorted barrier positions with their common coupling strength.
///
/// `symmetric` is only set for mirror-symmetric arrays, where
/// `x_{-n} = -x_n` holds bitwise and `x = 0` is present. Random arrays are
/// never mirror-symmetric even when a barrier was planted at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierArray {
    positions: Vec<f64>,
    strength: f64,
    symmetric: bool,
}

impl BarrierArray {
    /// Builds an array from raw positions, validating sortedness and the
    /// symmetry claim.
    pub fn new(positions: Vec<f64>, strength: f64, symmetric: bool) -> Result<Self> {
        for w in positions.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!(
                    "positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::range("non-finite barrier position".to_string()));
        }
        if symmetric {
            let n = positions.len();
            if n % 2 == 0 {
                return Err(Error::invalid("symmetric array needs an odd barrier count".to_string()));
            }
            for i in 0..n / 2 {
                if positions[i] != -positions[n - 1 - i] {
                    return Err(Error::invalid(format!(
                        "symmetric array violates x_-n = -x_n at {}",
                        positions[i]
                    )));
                }
            }
            if n > 0 && positions[n / 2] != 0.0 {
                return Err(Error::invalid("symmetric array must contain x = 0".to_string()));
            }
        }
        Ok(BarrierArray { positions, strength, symmetric })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Rightmost barrier position, if any.
    pub fn max_position(&self) -> Option<f64> {
        self.positions.last().copied()
    }

    /// Signed index of each barrier: `-n..=n` for symmetric arrays,
    /// `1..=n` for half-line arrays, ascending order either way.
    pub fn indices(&self) -> Vec<i64> {
        let n = self.positions.len() as i64;
        if self.symmetric {
            let half = n / 2;
            (-half..=half).collect()
        } else {
            (1..=n).collect()
        }
    }

    /// Successive gaps on the positive half-axis, measured from the origin:
    /// `gap_1 = x_1 - 0`, `gap_2 = x_2 - x_1`, ...
    pub fn gaps(&self) -> Result<Vec<f64>> {
        if self.positions.len() < 2 {
            return Err(Error::insufficient(format!(
                "need at least 2 positions for gaps, got {}",
                self.positions.len()
            )));
        }
        let gaps = positive_side_gaps(&self.positions);
        if gaps.is_empty() {
            return Err(Error::insufficient("no positive-side gaps".to_string()));
        }
        Ok(gaps)
    }

    /// True iff gaps strictly increase outward on each half-axis (the
    /// origin acting as the innermost reference point). Never errors:
    /// degenerate sides with fewer than two gaps pass vacuously.
    pub fn is_sparse(&self) -> bool {
        let pos_gaps = positive_side_gaps(&self.positions);
        let neg: Vec<f64> = self
            .positions
            .iter()
            .rev()
            .filter(|&&x| x < 0.0)
            .map(|&x| -x)
            .collect();
        let neg_gaps = positive_side_gaps(&neg);
        strictly_increasing(&pos_gaps) && strictly_increasing(&neg_gaps)
    }

    /// The mirror image (positions negated); transmission magnitudes must
    /// be direction-independent, so this is mostly a testing aid.
    pub fn mirrored(&self) -> BarrierArray {
        let mut positions: Vec<f64> = self.positions.iter().rev().map(|&x| -x).collect();
        // -0.0 compares equal to 0.0 but is a distinct bit pattern.
        for x in &mut positions {
            if *x == 0.0 {
                *x = 0.0;
            }
        }
        BarrierArray { positions, strength: self.strength, symmetric: self.symmetric }
    }
}

fn positive_side_gaps(sorted_positions: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    let mut gaps = Vec::new();
    for &x in sorted_positions.iter().filter(|&&x| x > 0.0) {
        gaps.push(x - prev);
        prev = x;
    }
    gaps
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Generates the barrier array for a sparseness family.
///
/// Deterministic families place `x_n` for `n = 1..=n_per_side` and, when
/// `symmetric`, mirror them through the origin with a barrier at `x = 0`.
/// Random arrays draw `2*n_per_side + 1` positions uniformly on
/// `[-span, span]` (one of them pinned to `0` when `symmetric` is
/// requested); exact duplicates are redrawn.
pub fn generate_positions(
    spec: &SparsenessSpec,
    n_per_side: usize,
    strength: f64,
    symmetric: bool,
) -> Result<BarrierArray> {
    spec.validate()?;
    if let SparsenessSpec::Random { span, seed } = *spec {
        return generate_random(span, seed, n_per_side, strength, symmetric);
    }

    let mut right = Vec::with_capacity(n_per_side);
    for n in 1..=n_per_side {
        right.push(spec.position(n)?);
    }
    for w in right.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "spacing family produced non-increasing positions near x = {}",
                w[0]
            )));
        }
    }

    let positions = if symmetric {
        let mut all: Vec<f64> = right.iter().rev().map(|&x| -x).collect();
        all.push(0.0);
        all.extend_from_slice(&right);
        all
    } else {
        right
    };
    BarrierArray::new(positions, strength, symmetric)
}

fn generate_random(
    span: f64,
    seed: u64,
    n_per_side: usize,
    strength: f64,
    include_origin: bool,
) -> Result<BarrierArray> {
    let total = 2 * n_per_side + 1;
    let n_draws = if include_origin { total - 1 } else { total };
    let mut rng = SplitMix64::new(seed);
    let mut positions: Vec<f64> = Vec::with_capacity(total);
    if include_origin {
        positions.push(0.0);
    }
    while positions.len() < total {
        let x = rng.next_in(-span, span);
        if positions.iter().any(|&p| p == x) {
            continue; // collision: redraw
        }
        positions.push(x);
    }
    debug_assert_eq!(positions.len(), n_draws + usize::from(include_origin));
    positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Random arrays are never mirror-symmetric; `include_origin` only pins
    // one barrier to x = 0.
    BarrierArray::new(positions, strength, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_beta2_symmetric() {
        let arr = generate_positions(&SparsenessSpec::Power { beta: 2.0 }, 3, 1.0, true).unwrap();
        assert_eq!(arr.positions(), &[-9.0, -4.0, -1.0, 0.0, 1.0, 4.0, 9.0]);
        assert!(arr.symmetric());
    }

    #[test]
    fn exponential_symmetric() {
        let arr = generate_positions(&SparsenessSpec::Exponential, 2, 1.0, true).unwrap();
        let e1 = 1.0f64.exp();
        let e2 = 2.0f64.exp();
        assert_eq!(arr.positions(), &[-e2, -e1, 0.0, e1, e2]);
        assert!((e1 - 2.718282f64).abs() < 1e-6);
        assert!((e2 - 7.389056f64).abs() < 1e-6);
    }

    #[test]
    fn polyexp_degenerate_c_reduces_to_power() {
        let combined = SparsenessSpec::PolyExp { b: 1.0, beta: 2.0, c: 0.0, a: 1.0, gamma: 1.0 };
        let a = generate_positions(&combined, 5, 1.0, true).unwrap();
        let b = generate_positions(&SparsenessSpec::Power { beta: 2.0 }, 5, 1.0, true).unwrap();
        assert_eq!(a.positions(), b.positions());
    }

    #[test]
    fn random_arrays_reproduce_bitwise() {
        let spec = SparsenessSpec::Random { span: 100.0, seed: 7 };
        let a = generate_positions(&spec, 10, 1.0, false).unwrap();
        let b = generate_positions(&spec, 10, 1.0, false).unwrap();
        assert_eq!(a.positions().len(), 21);
        assert_eq!(a.positions(), b.positions());
        assert!(a.positions().iter().all(|x| x.abs() <= 100.0));
        assert!(!a.symmetric());
    }

    #[test]
    fn random_with_origin_has_zero() {
        let spec = SparsenessSpec::Random { span: 50.0, seed: 3 };
        let arr = generate_positions(&spec, 4, 1.0, true).unwrap();
        assert_eq!(arr.positions().len(), 9);
        assert!(arr.positions().contains(&0.0));
        assert!(!arr.symmetric());
    }

    #[test]
    fn exponential_overflow_fails_fast() {
        let err = generate_positions(&SparsenessSpec::Exponential, 701, 1.0, false).unwrap_err();
        assert!(matches!(err, Error::NumericalRange(_)));
    }

    #[test]
    fn gaps_match_hand_values() {
        let arr = BarrierArray::new(vec![0.0, 1.0, 4.0, 9.0], 1.0, false).unwrap();
        assert_eq!(arr.gaps().unwrap(), vec![1.0, 3.0, 5.0]);

        let e1 = std::f64::consts::E;
        let arr = BarrierArray::new(vec![0.0, e1, e1 * e1], 1.0, false).unwrap();
        let gaps = arr.gaps().unwrap();
        assert!((gaps[0] - 2.718282).abs() < 1e-6);
        assert!((gaps[1] - 4.670774).abs() < 1e-6);
    }

    #[test]
    fn gaps_single_position_errors() {
        let arr = BarrierArray::new(vec![1.0], 1.0, false).unwrap();
        assert!(matches!(arr.gaps(), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn sparseness_validation() {
        let sparse = BarrierArray::new(vec![0.0, 1.0, 4.0, 9.0], 1.0, false).unwrap();
        assert!(sparse.is_sparse());
        let equidistant = BarrierArray::new(vec![0.0, 1.0, 2.0, 3.0], 1.0, false).unwrap();
        assert!(!equidistant.is_sparse());
        // Random arrays are typically not sparse but must not panic.
        let spec = SparsenessSpec::Random { span: 100.0, seed: 11 };
        let random = generate_positions(&spec, 10, 1.0, false).unwrap();
        let _ = random.is_sparse();
    }

    #[test]
    fn all_families_generate_sparse_arrays() {
        let families = [
            SparsenessSpec::Power { beta: 1.5 },
            SparsenessSpec::Power { beta: 2.0 },
            SparsenessSpec::Exponential,
            SparsenessSpec::poly_exp_default(2.0),
            SparsenessSpec::PolyExp { b: 2.0, beta: 1.2, c: 0.5, a: 0.3, gamma: 1.5 },
        ];
        for spec in &families {
            for n in [1usize, 5, 50] {
                let n = if matches!(spec, SparsenessSpec::Exponential) { n.min(50) } else { n };
                for symmetric in [false, true] {
                    let arr = generate_positions(spec, n, 1.0, symmetric).unwrap();
                    assert!(arr.is_sparse(), "{spec:?} n={n} symmetric={symmetric}");
                    if symmetric {
                        let p = arr.positions();
                        for i in 0..p.len() {
                            assert_eq!(p[i] + p[p.len() - 1 - i], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn beta_one_power_is_equidistant_not_sparse() {
        let arr = generate_positions(&SparsenessSpec::Power { beta: 1.0 }, 5, 1.0, true).unwrap();
        assert!(!arr.is_sparse());
        assert_eq!(arr.positions()[5..], [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SparsenessSpec::Power { beta: 0.5 }.validate().is_err());
        assert!(SparsenessSpec::PolyExp { b: 0.0, beta: 2.0, c: 1.0, a: 1.0, gamma: 1.0 }
            .validate()
            .is_err());
        assert!(SparsenessSpec::PolyExp { b: 1.0, beta: 1.0, c: 1.0, a: 1.0, gamma: 1.0 }
            .validate()
            .is_err());
        assert!(SparsenessSpec::Random { span: 0.0, seed: 1 }.validate().is_err());
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0; cross-checked against the published
        // reference implementation.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(rng.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(rng.next_u64(), 0x06C45D188009454F);
    }
}
