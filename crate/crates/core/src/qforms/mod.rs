//! Integral binary quadratic forms `[a, b, c]`, the quantities `Q(τ,1)` and `Q_τ`,
//! and enumeration of forms of a fixed discriminant with tail bounds.

mod enumerate;
mod sqrtmod;
mod tail;

pub use enumerate::{
    enumerate_forms, enumerate_region, enumerate_with_tail, mismatch_radius_sq,
    Truncation,
};
pub use tail::{rho_bound, tail_bound, Majorant, MajorantTerm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Complex;

/// Largest supported `|D|`.
pub const MAX_DISCRIMINANT: i64 = 1_000_000;

/// Integral binary quadratic form `aX² + bXY + cY²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    /// Rejects the zero form.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 && b == 0 && c == 0 {
            return Err(Error::Invalid("the zero form is excluded".into()));
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// `[a, b, c] ↦ [a, b + 2a, a + b + c]`.
    pub fn translate(&self) -> Self {
        QuadForm { a: self.a, b: self.b + 2 * self.a, c: self.a + self.b + self.c }
    }

    /// `[a, b, c] ↦ [c, −b, a]`.
    pub fn invert(&self) -> Self {
        QuadForm { a: self.c, b: -self.b, c: self.a }
    }

    pub fn neg(&self) -> Self {
        QuadForm { a: -self.a, b: -self.b, c: -self.c }
    }

    fn sort_key(&self) -> (i64, i64, i64, i64) {
        (self.a.abs(), self.a, self.b, self.c)
    }
}

/// `b² − 4ac`.
pub fn discriminant(q: &QuadForm) -> i64 {
    q.discriminant()
}

/// Point `re + i·im` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint<T = f64> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> HPoint<T> {
    /// Rejects `im ≤ 0`.
    pub fn new(re: T, im: T) -> Result<Self> {
        if im > T::zero() {
            Ok(HPoint { re, im })
        } else {
            Err(Error::InvalidPoint(im.to_f64().unwrap_or(f64::NAN)))
        }
    }

    /// `|τ|²`.
    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
}

impl HPoint<f64> {
    pub fn to_complex(&self) -> Complex {
        Complex::new(self.re, self.im)
    }

    pub fn from_complex(w: Complex) -> Result<Self> {
        HPoint::new(w.re, w.im)
    }

    /// `−1/τ`.
    pub fn inverted(&self) -> Self {
        let n = self.norm_sqr();
        HPoint { re: -self.re / n, im: self.im / n }
    }

    pub fn shifted(&self, dx: f64) -> Self {
        HPoint { re: self.re + dx, im: self.im }
    }

    /// `−τ̄`.
    pub fn reflected(&self) -> Self {
        HPoint { re: -self.re, im: self.im }
    }

    /// `cosh` of the hyperbolic distance to `other`.
    pub fn cosh_distance(&self, other: &Self) -> f64 {
        let dx = self.re - other.re;
        let dy = self.im - other.im;
        1.0 + (dx * dx + dy * dy) / (2.0 * self.im * other.im)
    }
}

/// `Q(τ,1) = aτ² + bτ + c` as a pair (real part, imaginary part).
pub fn q_value_parts<T: Scalar>(q: &QuadForm, tau: &HPoint<T>) -> (T, T) {
    let a = T::from_int(q.a);
    let b = T::from_int(q.b);
    let c = T::from_int(q.c);
    let x = tau.re.clone();
    let y = tau.im.clone();
    let re = a.clone() * (x.clone() * x.clone() - y.clone() * y.clone()) + b.clone() * x.clone() + c;
    let two = T::from_int(2);
    let im = (two * a * x + b) * y;
    (re, im)
}

/// `Q(τ,1)` as a complex number.
pub fn q_value(q: &QuadForm, tau: &HPoint) -> Complex {
    let (re, im) = q_value_parts(q, tau);
    Complex::new(re, im)
}

/// `Q_τ = (a|τ|² + bx + c)/y`.
pub fn q_tau<T: Scalar>(q: &QuadForm, tau: &HPoint<T>) -> T {
    let a = T::from_int(q.a);
    let b = T::from_int(q.b);
    let c = T::from_int(q.c);
    (a * tau.norm_sqr() + b * tau.re.clone() + c) / tau.im.clone()
}

/// `|Q(τ,1)|²` computed from the real and imaginary parts.
pub fn q_value_norm_sqr<T: Scalar>(q: &QuadForm, tau: &HPoint<T>) -> T {
    let (re, im) = q_value_parts(q, tau);
    re.clone() * re + im.clone() * im
}

/// Bounds of an explicit enumeration window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBox {
    /// `|a| ≤ a_max`.
    pub a_max: u32,
    /// `b = b₀ + 2|a|n` with `0 ≤ b₀ < 2|a|` and `|n| ≤ n_max`.
    pub n_max: u32,
    /// `|c| ≤ c_max` for the forms with `a = 0`.
    pub c_max: u32,
}

impl EnumerationBox {
    pub fn new(a_max: u32, n_max: u32, c_max: u32) -> Result<Self> {
        if a_max == 0 || n_max == 0 || c_max == 0 {
            return Err(Error::Invalid("enumeration box bounds must be at least 1".into()));
        }
        Ok(Self { a_max, n_max, c_max })
    }
}

impl Default for EnumerationBox {
    fn default() -> Self {
        Self { a_max: 3, n_max: 3, c_max: 3 }
    }
}

/// Truncation parameters for every lattice sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Minimal window: the adaptive region always contains the forms with `a ≤ box.a_max`
    /// nearest to `τ`.
    #[serde(rename = "box")]
    pub bx: EnumerationBox,
    /// Minimal Fourier cutoff; extended automatically when the `D`-tail demands it.
    pub d_max: u32,
    /// Absolute bound on the omitted mass of each evaluated series.
    pub tail_target: f64,
    /// Resource ceiling on the truncation radius `R` (forms with `Q_τ² ≤ R` are kept).
    pub max_radius_sq: f64,
    /// Resource ceiling on `|D|`.
    pub max_abs_d: u32,
    /// Resource ceiling on the number of forms kept by one series evaluation.
    #[serde(default = "default_max_forms")]
    pub max_forms: usize,
}

fn default_max_forms() -> usize {
    20_000_000
}

impl TruncationPolicy {
    pub fn new(bx: EnumerationBox, d_max: u32, tail_target: f64) -> Result<Self> {
        if d_max == 0 || !(tail_target > 0.0) {
            return Err(Error::Invalid("d_max must be positive and tail_target > 0".into()));
        }
        Ok(Self { bx, d_max, tail_target, ..Self::default() })
    }

    pub fn with_tail_target(mut self, tail_target: f64) -> Self {
        self.tail_target = tail_target;
        self
    }

    pub fn with_d_max(mut self, d_max: u32) -> Self {
        self.d_max = d_max;
        self
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            bx: EnumerationBox::default(),
            d_max: 20,
            tail_target: 1e-8,
            max_radius_sq: 1e12,
            max_abs_d: 4000,
            max_forms: default_max_forms(),
        }
    }
}

/// Converts a point over any scalar to floating point.
pub fn point_to_f64<T: Scalar>(p: &HPoint<T>) -> Option<HPoint<f64>> {
    Some(HPoint { re: p.re.to_f64()?, im: p.im.to_f64()? })
}
