//! Quadrature: adaptive Gauss–Kronrod on finite intervals and trapezoidal rules for
//! semi-infinite and periodic integrands.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// Tolerances and refinement cap for every quadrature routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_refinements: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::Invalid("quadrature tolerances must be positive".into()));
        }
        Ok(Self { abs_tol, rel_tol, max_refinements })
    }

    fn accept(&self, change: f64, value: f64) -> bool {
        change <= self.abs_tol.max(self.rel_tol * value)
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, max_refinements: 14 }
    }
}

/// Values a quadrature rule can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    ((k * h), ((k - g) * h).magnitude())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
pub fn gauss_kronrod<V, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let max_intervals = 1usize << cfg.max_refinements.min(20);
    let (v0, e0) = kronrod15(&f, a, b);
    let mut pieces = vec![(a, b, v0, e0)];
    loop {
        let total = pieces.iter().fold(V::zero(), |acc, p| acc + p.2);
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if cfg.accept(err, total.magnitude()) {
            return Ok(total);
        }
        if pieces.len() >= max_intervals {
            return Err(Error::QuadratureDivergence { refinements: cfg.max_refinements, change: err });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = kronrod15(&f, lo, mid);
        let (vr, er) = kronrod15(&f, mid, hi);
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
}

/// Nodes and result of a trapezoidal rule in `s = ln t` over `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct ExpTrapezoid<V> {
    pub value: V,
    pub step: f64,
    pub s_min: f64,
    pub s_max: f64,
}

/// `∫₀^∞ f(t) dt` through `t = e^s` and the trapezoidal rule in `s`.
///
/// The window in `s` grows until the transformed integrand `f(e^s) e^s` falls below
/// `cut` relative to its largest sampled size on both ends; afterwards the step is halved
/// until two consecutive sums agree within the configured tolerance.
pub fn exp_trapezoid<V, F>(f: F, cfg: &QuadratureConfig) -> Result<ExpTrapezoid<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V + Sync,
{
    let g = |s: f64| f(s.exp()) * s.exp();
    let h0 = 0.25;
    let cut = 1e-18;
    let mut peak = g(0.0).magnitude();
    let mut s_max = 0.0;
    let mut quiet = 0;
    while quiet < 4 && s_max < 12.0 {
        s_max += h0;
        let m = g(s_max).magnitude();
        peak = peak.max(m);
        quiet = if m <= cut * peak { quiet + 1 } else { 0 };
    }
    let mut s_min = 0.0;
    quiet = 0;
    while quiet < 4 && s_min > -400.0 {
        s_min -= h0;
        let m = g(s_min).magnitude();
        peak = peak.max(m);
        quiet = if m <= cut * peak { quiet + 1 } else { 0 };
    }
    if quiet < 4 {
        return Err(Error::QuadratureDivergence { refinements: 0, change: f64::INFINITY });
    }
    let n0 = ((s_max - s_min) / h0).round() as usize;
    let mut h = (s_max - s_min) / n0 as f64;
    let mut sum = V::zero();
    for j in 0..=n0 {
        let w = if j == 0 || j == n0 { 0.5 } else { 1.0 };
        sum = sum + g(s_min + j as f64 * h) * w;
    }
    let mut value = sum * h;
    let mut n = n0;
    for r in 1..=cfg.max_refinements {
        let mids: Vec<V> = {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(|j| g(s_min + (j as f64 + 0.5) * h)).collect()
        };
        sum = mids.into_iter().fold(sum, |acc, x| acc + x);
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let change = (next - value).magnitude();
        value = next;
        if r >= 2 && cfg.accept(change, value.magnitude()) {
            return Ok(ExpTrapezoid { value, step: h, s_min, s_max });
        }
        if r == cfg.max_refinements {
            return Err(Error::QuadratureDivergence { refinements: r, change });
        }
    }
    Err(Error::QuadratureDivergence { refinements: 0, change: f64::INFINITY })
}

/// Trapezoidal rule for a 1-periodic integrand over `[0, 1)`, doubling the number of
/// samples until consecutive estimates agree. Exact for trigonometric polynomials of
/// degree below the sample count.
pub fn periodic_trapezoid<V, F>(f: F, start: usize, cfg: &QuadratureConfig) -> Result<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let mut n = start.max(2);
    let mut sum = (0..n).fold(V::zero(), |acc, j| acc + f(j as f64 / n as f64));
    let mut value = sum * (1.0 / n as f64);
    for r in 1..=cfg.max_refinements {
        sum = (0..n).fold(sum, |acc, j| acc + f((j as f64 + 0.5) / n as f64));
        n *= 2;
        let next = sum * (1.0 / n as f64);
        let change = (next - value).magnitude();
        value = next;
        if cfg.accept(change, value.magnitude()) {
            return Ok(value);
        }
        if r == cfg.max_refinements {
            return Err(Error::QuadratureDivergence { refinements: r, change });
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_polynomial_exact() {
        let cfg = QuadratureConfig::default();
        let v: f64 = gauss_kronrod(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &cfg).unwrap();
        assert!((v - (63.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn kronrod_endpoint_singularity() {
        let cfg = QuadratureConfig { abs_tol: 1e-11, rel_tol: 1e-11, max_refinements: 16 };
        let v: f64 = gauss_kronrod(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exp_trapezoid_gamma_integral() {
        let cfg = QuadratureConfig::default();
        let r = exp_trapezoid(|t: f64| t.powf(2.5) * (-t).exp(), &cfg).unwrap();
        let exact = libm::tgamma(3.5);
        assert!((r.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn periodic_trapezoid_exact_on_trig() {
        let cfg = QuadratureConfig::default();
        let two_pi = 2.0 * std::f64::consts::PI;
        let v: Complex = periodic_trapezoid(
            |x| Complex::from_polar(1.0, two_pi * 3.0 * x) + Complex::new(0.5, 0.0),
            8,
            &cfg,
        )
        .unwrap();
        assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-15);
    }
}
