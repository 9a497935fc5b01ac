//! Special functions: the error function, `Γ(1/2; w)`, the incomplete beta values
//! `ψ_k`, the complete beta function, `g_k`, and the Lipschitz summation pair.
//!
//! Every nontrivial function has a fast route and an independent quadrature route.
//! Half-integral powers use the principal branch `arg ∈ (−π, π]` throughout.

mod quad;

pub use quad::{
    exp_trapezoid, gauss_kronrod, periodic_trapezoid, ExpTrapezoid, QuadValue, QuadratureConfig,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// `√π`.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Even integer weight `k ≥ 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Weight(u32);

impl Weight {
    pub fn new(k: i64) -> Result<Self> {
        if k >= 4 && k % 2 == 0 && k <= 64 {
            Ok(Weight(k as u32))
        } else {
            Err(Error::InvalidWeight(k))
        }
    }

    pub fn k(self) -> i32 {
        self.0 as i32
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `β(k − 1/2, 1/2)`.
    pub fn beta(self) -> f64 {
        beta_half_family(self.k())
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight(4)
    }
}

impl TryFrom<i64> for Weight {
    type Error = Error;
    fn try_from(k: i64) -> Result<Self> {
        Weight::new(k)
    }
}

impl From<Weight> for i64 {
    fn from(w: Weight) -> i64 {
        w.0 as i64
    }
}

/// Sign with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Gauss error function.
pub fn erf(r: f64) -> f64 {
    libm::erf(r)
}

/// Complementary error function `1 − erf(r)`.
pub fn erfc(r: f64) -> f64 {
    libm::erfc(r)
}

/// `s − erf(x)` for `s ∈ {−1, 0, 1}` without cancellation when `s` and `x` share a sign.
pub fn sign_minus_erf(s: f64, x: f64) -> f64 {
    if s == 0.0 {
        -erf(x)
    } else if s * x >= 0.0 {
        s * erfc(x.abs())
    } else {
        s * (1.0 + erf(x.abs()))
    }
}

/// Upper incomplete gamma function `Γ(1/2; w) = ∫_w^∞ t^{−1/2} e^{−t} dt` for `w ≥ 0`.
///
/// Power series of the lower function for `w < 1.5`, Lentz continued fraction above.
/// Independent of [`erf`]. Returns NaN for negative `w`.
pub fn inc_gamma_half(w: f64) -> f64 {
    if w.is_nan() || w < 0.0 {
        return f64::NAN;
    }
    if w == 0.0 {
        return SQRT_PI;
    }
    if w < 1.5 {
        // γ(1/2, w) = w^{1/2} e^{−w} Σ w^n / ((1/2)(3/2)…(n + 1/2))
        let mut term = 2.0;
        let mut sum = term;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= w / (n + 0.5);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        SQRT_PI - sum * w.sqrt() * (-w).exp()
    } else {
        // Γ(s, w) = e^{−w} w^s / (w + 1 − s − 1(1 − s)/(w + 3 − s − …)), s = 1/2
        let tiny = 1e-300;
        let mut b = w + 0.5;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut i = 1.0;
        loop {
            let an = -i * (i - 0.5);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 || i > 500.0 {
                break;
            }
            i += 1.0;
        }
        (-w).exp() * w.sqrt() * h
    }
}

/// Complete beta function `Γ(s)Γ(w)/Γ(s + w)` for `s, w > 0`.
pub fn beta_complete(s: f64, w: f64) -> f64 {
    if s + w < 140.0 {
        libm::tgamma(s) * libm::tgamma(w) / libm::tgamma(s + w)
    } else {
        (libm::lgamma(s) + libm::lgamma(w) - libm::lgamma(s + w)).exp()
    }
}

/// `β(k − 1/2, 1/2) = π · Π_{j=1}^{k−1} (j − 1/2)/j` by gamma recursion.
pub fn beta_half_family(k: i32) -> f64 {
    (1..k).fold(PI, |acc, j| acc * (j as f64 - 0.5) / j as f64)
}

/// `I(n, v) = ∫₀^v t^{n−1/2}(1 − t)^{−1/2} dt` by integration by parts down to
/// `I(0, v) = 2 arcsin √v` (stable once `v` is not small).
fn beta_integral_recursion(n: i32, v: f64) -> f64 {
    let root = (1.0 - v).max(0.0).sqrt();
    let mut acc = 2.0 * v.sqrt().min(1.0).asin();
    let mut pw = v.sqrt();
    for m in 1..=n {
        let m = m as f64;
        acc = ((m - 0.5) * acc - pw * root) / m;
        pw *= v;
    }
    acc
}

/// Same integral by the binomial series of `(1 − t)^{−1/2}` (fast for small `v`).
fn beta_integral_series(n: i32, v: f64) -> f64 {
    let base = n as f64 + 0.5;
    let mut coef = 1.0;
    let mut pw = v.powf(base);
    let mut sum = pw / base;
    let mut j = 0.0;
    loop {
        j += 1.0;
        coef *= (j - 0.5) / j;
        pw *= v;
        let term = coef * pw / (base + j);
        sum += term;
        if term < 1e-17 * sum || j > 4000.0 {
            break;
        }
    }
    sum
}

/// `∫_{1−w}^1 t^{n−1/2}(1 − t)^{−1/2} dt` by the binomial series of `(1 − s)^{n−1/2}`.
fn beta_integral_top_series(n: i32, w: f64) -> f64 {
    let e = n as f64 - 0.5;
    let mut coef = 1.0;
    let mut pw = w.sqrt();
    let mut sum = 2.0 * pw;
    let mut j = 0.0;
    loop {
        j += 1.0;
        coef *= -(e - j + 1.0) / j;
        pw *= w;
        let term = coef * pw / (j + 0.5);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || j > 4000.0 {
            break;
        }
    }
    sum
}

fn check_weight(k: i32) -> Result<()> {
    if k >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(k as i64))
    }
}

fn small_v_threshold(k: i32) -> f64 {
    0.25f64.max(1000f64.powf(-1.0 / (k - 1) as f64))
}

/// `ψ_k(v) = ½ ∫₀^v t^{k−3/2}(1 − t)^{−1/2} dt` on `[0, 1]`.
pub fn psi_k(v: f64, k: Weight) -> Result<f64> {
    psi_k_raw(v, k.k())
}

/// [`psi_k`] for any integer `k ≥ 2`.
pub fn psi_k_raw(v: f64, k: i32) -> Result<f64> {
    check_weight(k)?;
    let v = unit_interval(v)?;
    if v == 0.0 {
        return Ok(0.0);
    }
    let n = k - 1;
    if v < small_v_threshold(k) {
        Ok(0.5 * beta_integral_series(n, v))
    } else if v > 0.5 {
        Ok(0.5 * (beta_half_family(k) - beta_integral_top_series(n, 1.0 - v)))
    } else {
        Ok(0.5 * beta_integral_recursion(n, v))
    }
}

/// `ψ_k(1) − ψ_k(1 − w)`, accurate when `w` is small.
pub fn psi_k_complement(w: f64, k: i32) -> Result<f64> {
    check_weight(k)?;
    let w = unit_interval(w)?;
    if w <= 0.5 {
        Ok(0.5 * beta_integral_top_series(k - 1, w))
    } else {
        Ok(0.5 * beta_half_family(k) - psi_k_raw(1.0 - w, k)?)
    }
}

/// Quadrature route for `ψ_k` via `t = 1 − s²`, which removes the endpoint singularity.
pub fn psi_k_quadrature(v: f64, k: i32, cfg: &QuadratureConfig) -> Result<f64> {
    check_weight(k)?;
    let v = unit_interval(v)?;
    let e = k as f64 - 1.5;
    let lo = (1.0 - v).sqrt();
    let val: f64 = gauss_kronrod(|s: f64| (1.0 - s * s).max(0.0).powf(e), lo, 1.0, cfg)?;
    Ok(val)
}

fn unit_interval(v: f64) -> Result<f64> {
    if (-1e-14..=1.0 + 1e-14).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain { name: "v", value: v, domain: "[0, 1]" })
    }
}

/// Evaluation route for [`g_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GkRoute {
    Integral,
    Closed,
}

/// `g_k(r) = Γ(k − 1/2)^{−1} ∫₀^∞ erf(r√t) e^{−t} t^{k−3/2} dt`.
///
/// The closed route evaluates `sgn(r)(1 − (2/β)ψ_k(1/(1 + r²)))` through the complement
/// series so that small `|r|` keeps full relative accuracy.
pub fn g_k(r: f64, k: Weight, route: GkRoute) -> Result<f64> {
    g_k_raw(r, k.k(), route)
}

pub fn g_k_raw(r: f64, k: i32, route: GkRoute) -> Result<f64> {
    check_weight(k)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    match route {
        GkRoute::Closed => {
            let w = r * r / (1.0 + r * r);
            Ok(sgn(r) * 2.0 / beta_half_family(k) * psi_k_complement(w, k)?)
        }
        GkRoute::Integral => {
            let e = k as f64 - 1.5;
            let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-14, max_refinements: 12 };
            let out = exp_trapezoid(|t: f64| erf(r * t.sqrt()) * (-t).exp() * t.powf(e), &cfg)?;
            Ok(out.value / libm::tgamma(k as f64 - 0.5))
        }
    }
}

/// `g_k'(r) = 2 / (β(k − 1/2, 1/2)(1 + r²)^k)`.
pub fn g_k_derivative(r: f64, k: Weight) -> f64 {
    2.0 / (k.beta() * (1.0 + r * r).powi(k.k()))
}

/// Principal branch `w^p = exp(p Log w)`.
pub fn cpow(w: Complex, p: f64) -> Complex {
    (w.ln() * p).exp()
}

/// `(−2πi)^κ` on the principal branch.
pub fn minus_two_pi_i_pow(kappa: f64) -> Complex {
    Complex::from_polar((2.0 * PI).powf(kappa), -PI * kappa / 2.0)
}

/// `e(w) = exp(2πi w)`.
pub fn e2pi(w: Complex) -> Complex {
    (Complex::new(0.0, 2.0 * PI) * w).exp()
}

/// Both sides of `Σ_n (w + n)^{−κ} = ((−2πi)^κ/Γ(κ)) Σ_{n≥1} n^{κ−1} e(nw)`.
///
/// The left side sums `|n| ≤ N` and adds a midpoint Euler–Maclaurin estimate of the two
/// tails `|n| > N`; the right side sums `1 ≤ n ≤ N`.
pub fn lipschitz_lhs_rhs(w: Complex, kappa: f64, n: u32) -> Result<(Complex, Complex)> {
    if kappa <= 1.0 || w.im <= 0.0 || n == 0 {
        return Err(Error::Invalid("Lipschitz pair needs κ > 1, Im w > 0, N ≥ 1".into()));
    }
    let raw = lipschitz_lhs_raw(w, kappa, n);
    let a = n as f64 + 0.5;
    let tail = em_tail(w + a, kappa, 1.0) + em_tail(w - a, kappa, -1.0);
    Ok((raw + tail, lipschitz_rhs(w, kappa, n)))
}

/// `Σ_{|n|≤N} (w + n)^{−κ}` without tail correction.
pub fn lipschitz_lhs_raw(w: Complex, kappa: f64, n: u32) -> Complex {
    let n = n as i64;
    let mut acc = Complex::new(0.0, 0.0);
    for m in (1..=n).rev() {
        acc += cpow(w + m as f64, -kappa) + cpow(w - m as f64, -kappa);
    }
    acc + cpow(w, -kappa)
}

/// `((−2πi)^κ/Γ(κ)) Σ_{1≤n≤N} n^{κ−1} e(nw)`.
pub fn lipschitz_rhs(w: Complex, kappa: f64, n: u32) -> Complex {
    let q = e2pi(w);
    let mut acc = Complex::new(0.0, 0.0);
    let mut qn = Complex::new(1.0, 0.0);
    for m in 1..=n {
        qn *= q;
        acc += qn * (m as f64).powf(kappa - 1.0);
    }
    acc * minus_two_pi_i_pow(kappa) / libm::tgamma(kappa)
}

/// Tail `Σ_{m>N} (w ± m)^{−κ}` from the midpoint Euler–Maclaurin formula at
/// `u = w ± (N + 1/2)`; `dir = ±1`.
fn em_tail(u: Complex, kappa: f64, dir: f64) -> Complex {
    // ∫ term, then B_{2j}(1/2)/(2j)! corrections with d/dx = dir · d/du
    let integral = cpow(u, 1.0 - kappa) / (kappa - 1.0) * dir;
    let coeffs = [(1, -1.0 / 24.0), (3, 7.0 / 5760.0), (5, -31.0 / 967_680.0)];
    let mut acc = integral;
    for (order, c) in coeffs {
        let mut fall = 1.0;
        for j in 0..order {
            fall *= -kappa - j as f64;
        }
        let deriv = cpow(u, -kappa - order as f64) * fall * dir.powi(order);
        acc += deriv * c;
    }
    acc
}
