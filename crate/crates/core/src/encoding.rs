//! Fixed-point binary encoding `x = c·χ − d` with `χ = Σ_r 2^{-r} Q_r ∈ [0, 2)`.

use crate::error::{Error, Result};
use crate::qubo::BinaryState;

/// Resolution and offset parameters of the binary encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryEncoding {
    resolution: usize,
    c: f64,
    d: f64,
}

impl Default for BinaryEncoding {
    /// Four bits with the plain binary offset `x = 2χ − 1`.
    fn default() -> Self {
        BinaryEncoding { resolution: 4, c: 2.0, d: 1.0 }
    }
}

impl BinaryEncoding {
    pub fn new(resolution: usize, c: f64, d: f64) -> Result<Self> {
        if resolution == 0 || resolution > 52 {
            return Err(Error::InvalidParameter(format!("resolution {resolution} must be in 1..=52")));
        }
        if !(c > 0.0 && c.is_finite()) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!("scale c = {c} must be positive and finite")));
        }
        Ok(BinaryEncoding { resolution, c, d })
    }

    /// `x = 2χ − 1` at the given resolution.
    pub fn offset_binary(resolution: usize) -> Result<Self> {
        Self::new(resolution, 2.0, 1.0)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Whether the range `[−d, 2c − d)` straddles zero (`d > 0`, `c > d/2`).
    pub fn admits_negative_and_positive(&self) -> bool {
        self.d > 0.0 && self.c > self.d / 2.0
    }

    /// Smallest decodable value, `−d`.
    pub fn min_value(&self) -> f64 {
        -self.d
    }

    /// Exclusive upper bound of the encoding range, `2c − d`.
    pub fn upper_bound(&self) -> f64 {
        2.0 * self.c - self.d
    }

    /// Largest decodable value, reached by the all-ones codeword.
    pub fn max_value(&self) -> f64 {
        self.c * self.chi_step() * self.max_code() as f64 - self.d
    }

    /// Spacing between consecutive decoded values, `c·2^{1−R}`.
    pub fn step(&self) -> f64 {
        self.c * self.chi_step()
    }

    fn chi_step(&self) -> f64 {
        (2.0f64).powi(1 - self.resolution as i32)
    }

    fn max_code(&self) -> u64 {
        (1u64 << self.resolution) - 1
    }

    /// Place value `2^{-r}` of bit `r`.
    pub fn place_value(r: usize) -> f64 {
        (2.0f64).powi(-(r as i32))
    }

    /// `χ = Σ_r 2^{-r} Q_r`.
    pub fn chi(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.resolution {
            return Err(Error::DimensionMismatch { expected: self.resolution, found: bits.len() });
        }
        Ok(bits.iter().enumerate().map(|(r, &q)| f64::from(q) * Self::place_value(r)).sum())
    }

    pub fn decode(&self, bits: &[u8]) -> Result<f64> {
        Ok(self.c * self.chi(bits)? - self.d)
    }

    pub fn decode_state(&self, state: &BinaryState) -> Result<f64> {
        self.decode(state.bits())
    }

    /// Codeword whose decoded value is nearest `x`; ties go to the smaller value.
    pub fn encode_nearest(&self, x: f64) -> Result<BinaryState> {
        if !(x >= self.min_value() && x < self.upper_bound()) {
            return Err(Error::OutOfRange { value: x, lo: self.min_value(), hi: self.upper_bound() });
        }
        // Codeword k decodes to -d + k·step.
        let units = (x + self.d) / self.step();
        let k = (units - 0.5).ceil().clamp(0.0, self.max_code() as f64) as u64;
        Ok(BinaryState::from_index(k, self.resolution))
    }
}

/// Power-of-two shift that brings a ratio into `(−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentOffset {
    pub offset: i32,
    /// Set when the numerator was exactly zero.
    pub exact_zero: bool,
}

impl ExponentOffset {
    /// Multiplies `value` by `2^{-offset}`. Exact for normal floats.
    pub fn shift_down(&self, value: f64) -> f64 {
        value * pow2(-self.offset)
    }

    /// Multiplies `value` by `2^{offset}`.
    pub fn shift_up(&self, value: f64) -> f64 {
        value * pow2(self.offset)
    }
}

pub(crate) fn pow2(e: i32) -> f64 {
    (2.0f64).powi(e)
}

/// Exponent `e` with `2^e <= |v| < 2^{e+1}`, found by repeated doubling or
/// halving and comparison only. Terminates for every finite nonzero value,
/// subnormals included.
pub fn floor_exponent(v: f64) -> Result<i32> {
    let mut v = v.abs();
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("floor exponent of {v} is undefined")));
    }
    let mut e = 0;
    while v >= 2.0 {
        v *= 0.5;
        e += 1;
    }
    while v < 1.0 {
        v *= 2.0;
        e -= 1;
    }
    Ok(e)
}

/// Offset for the ratio `numerator / denominator`, computed without dividing.
///
/// `offset = floorexp(|numerator|) − floorexp(|denominator|) + 1`, so the
/// shifted ratio `(numerator·2^{-offset}) / denominator` has magnitude in `(1/4, 1)`.
pub fn exponent_offset(numerator: f64, denominator: f64) -> Result<ExponentOffset> {
    if denominator == 0.0 {
        return Err(Error::ZeroDivisor);
    }
    if numerator == 0.0 {
        return Ok(ExponentOffset { offset: 0, exact_zero: true });
    }
    let offset = floor_exponent(numerator)? - floor_exponent(denominator)? + 1;
    Ok(ExponentOffset { offset, exact_zero: false })
}
