//! Slash operators, finite-difference differential operators and Vignéras' criterion.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qforms::{enumerate_region, q_tau, HPoint};
use crate::scalar::Scalar;
use crate::Complex;

/// Returns `value` if it is finite and positive.
pub fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, domain: "(0, ∞)" })
    }
}

/// `M = (α β; γ δ) ∈ SL₂(ℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct MoebiusMatrix {
    alpha: i64,
    beta: i64,
    gamma: i64,
    delta: i64,
}

impl TryFrom<[i64; 4]> for MoebiusMatrix {
    type Error = Error;

    fn try_from(m: [i64; 4]) -> Result<Self> {
        MoebiusMatrix::new(m[0], m[1], m[2], m[3])
    }
}

impl From<MoebiusMatrix> for [i64; 4] {
    fn from(m: MoebiusMatrix) -> Self {
        [m.alpha, m.beta, m.gamma, m.delta]
    }
}

impl MoebiusMatrix {
    pub fn new(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Result<Self> {
        if alpha * delta - beta * gamma != 1 {
            return Err(Error::NotUnimodular(alpha, beta, gamma, delta));
        }
        Ok(Self { alpha, beta, gamma, delta })
    }

    pub const IDENTITY: MoebiusMatrix = MoebiusMatrix { alpha: 1, beta: 0, gamma: 0, delta: 1 };
    /// `τ ↦ τ + 1`.
    pub const T: MoebiusMatrix = MoebiusMatrix { alpha: 1, beta: 1, gamma: 0, delta: 1 };
    /// `τ ↦ −1/τ`.
    pub const S: MoebiusMatrix = MoebiusMatrix { alpha: 0, beta: -1, gamma: 1, delta: 0 };

    pub fn entries(&self) -> [i64; 4] {
        (*self).into()
    }

    pub fn is_gamma0_4(&self) -> bool {
        self.gamma % 4 == 0
    }

    pub fn compose(&self, other: &MoebiusMatrix) -> MoebiusMatrix {
        MoebiusMatrix {
            alpha: self.alpha * other.alpha + self.beta * other.gamma,
            beta: self.alpha * other.beta + self.beta * other.delta,
            gamma: self.gamma * other.alpha + self.delta * other.gamma,
            delta: self.gamma * other.beta + self.delta * other.delta,
        }
    }

    /// `γτ + δ`.
    pub fn cocycle(&self, tau: &HPoint) -> Complex {
        Complex::new(self.gamma as f64 * tau.re + self.delta as f64, self.gamma as f64 * tau.im)
    }

    /// `Mτ = (ατ + β)/(γτ + δ)`.
    pub fn apply(&self, tau: &HPoint) -> HPoint {
        let t = tau.to_complex();
        let num = t * self.alpha as f64 + self.beta as f64;
        let w = num / self.cocycle(tau);
        // Im(Mτ) = y/|γτ+δ|² is exactly positive; recompute it to avoid cancellation
        HPoint { re: w.re, im: tau.im / self.cocycle(tau).norm_sqr() }
    }
}

/// `θ(z) = Σ_{n∈ℤ} e(n²z)`, truncated where `e^{−2πn²v} < 10^{−18}`.
pub fn theta_function(z: &HPoint) -> Complex {
    let n_max = ((18.0 * std::f64::consts::LN_10) / (2.0 * PI * z.im)).sqrt().ceil() as i64;
    let mut sum = Complex::new(1.0, 0.0);
    for n in 1..=n_max {
        let n2 = (n * n) as f64;
        let term = Complex::from_polar((-2.0 * PI * n2 * z.im).exp(), 2.0 * PI * (n2 * z.re).rem_euclid(1.0));
        sum += 2.0 * term;
    }
    sum
}

/// `j(M, z) = θ(Mz)/θ(z)` for `M ∈ Γ₀(4)`.
pub fn theta_multiplier(m: &MoebiusMatrix, z: &HPoint) -> Result<Complex> {
    if !m.is_gamma0_4() {
        return Err(Error::NotInGamma04(m.gamma));
    }
    Ok(theta_function(&m.apply(z)) / theta_function(z))
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
fn jacobi(a: i64, n: i64) -> i64 {
    let (mut a, mut n) = (a.rem_euclid(n), n);
    let mut r = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                r = -r;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            r = -r;
        }
        a %= n;
    }
    if n == 1 {
        r
    } else {
        0
    }
}

/// `j(M, z) = ε_δ^{−1} (γ/δ) (γz + δ)^{1/2}` for `M ∈ Γ₀(4)`, with `ε_δ ∈ {1, i}` and
/// `(γ/δ)` the Jacobi symbol extended to negative `δ` by a sign when `γ, δ < 0`.
pub fn theta_multiplier_closed(m: &MoebiusMatrix, z: &HPoint) -> Result<Complex> {
    if !m.is_gamma0_4() {
        return Err(Error::NotInGamma04(m.gamma));
    }
    let (c, d) = (m.gamma, m.delta);
    let mut sym = jacobi(c, d.abs());
    if c < 0 && d < 0 {
        sym = -sym;
    }
    let eps_inv = if d.rem_euclid(4) == 1 { Complex::new(1.0, 0.0) } else { Complex::new(0.0, -1.0) };
    Ok(eps_inv * sym as f64 * m.cocycle(z).sqrt())
}

/// `(f|_κ M)(τ) = (γτ + δ)^{−κ} f(Mτ)`.
pub fn slash_integral<F>(f: F, m: &MoebiusMatrix, kappa: i32, tau: &HPoint) -> Complex
where
    F: Fn(&HPoint) -> Complex,
{
    m.cocycle(tau).powi(-kappa) * f(&m.apply(tau))
}

/// `(f|_κ M)(z) = j(M, z)^{−2κ} f(Mz)` for half-integral `κ` and `M ∈ Γ₀(4)`.
pub fn slash_half_integral<F>(f: F, m: &MoebiusMatrix, kappa: f64, z: &HPoint) -> Result<Complex>
where
    F: Fn(&HPoint) -> Complex,
{
    let two_kappa = 2.0 * kappa;
    if two_kappa.fract() != 0.0 || (two_kappa as i64).rem_euclid(2) != 1 {
        return Err(Error::Domain { name: "kappa", value: kappa, domain: "½ + ℤ" });
    }
    let j = theta_multiplier(m, z)?;
    Ok(j.powi(-(two_kappa as i32)) * f(&m.apply(z)))
}

/// Central-difference scheme; the estimate of the other order serves as a cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FDScheme {
    pub h: f64,
    /// 2 or 4.
    pub order: u8,
    /// Relative tolerance of the derivative estimates; the order-2 and order-4 estimates
    /// may differ by at most ten times this.
    pub tolerance: f64,
}

impl Default for FDScheme {
    fn default() -> Self {
        Self { h: 1e-4, order: 4, tolerance: 1e-6 }
    }
}

impl FDScheme {
    pub fn new(h: f64, order: u8, tolerance: f64) -> Result<Self> {
        check_positive("h", h)?;
        check_positive("tolerance", tolerance)?;
        if order != 2 && order != 4 {
            return Err(Error::Invalid(format!("finite-difference order {order} not in {{2, 4}}")));
        }
        Ok(Self { h, order, tolerance })
    }

    /// Order-2 and order-4 estimates from an order-2 rule `est(h)` by Richardson extrapolation.
    fn combine<F>(&self, est: F, scale: f64) -> Result<Complex>
    where
        F: Fn(f64) -> Complex,
    {
        let d1 = est(self.h);
        let d2 = est(2.0 * self.h);
        let o4 = (d1 * 4.0 - d2) / 3.0;
        let gap = (d1 - o4).norm() / scale.max(o4.norm()).max(1e-300);
        let allowed = 10.0 * self.tolerance;
        if gap > allowed {
            return Err(Error::StepTooLarge { gap, allowed });
        }
        Ok(if self.order == 2 { d1 } else { o4 })
    }
}

/// First and second partial derivatives of `f` at a point of ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub fx: Complex,
    pub fy: Complex,
    /// `f_xx + f_yy`, when requested.
    pub laplace: Option<Complex>,
}

/// Partial derivatives by central differences with `scheme`; `scale` is the magnitude
/// below which the consistency check is absolute rather than relative.
pub fn derivatives<F>(f: &F, w0: &HPoint, scheme: &FDScheme, second: bool, scale: f64) -> Result<Derivatives>
where
    F: Fn(&HPoint) -> Complex + ?Sized,
{
    if w0.im <= 4.0 * scheme.h {
        return Err(Error::StepTooLarge { gap: scheme.h, allowed: w0.im / 4.0 });
    }
    let at = |dx: f64, dy: f64| f(&HPoint { re: w0.re + dx, im: w0.im + dy });
    let f0 = f(w0);
    let fx = scheme.combine(|h| (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h), scale)?;
    let fy = scheme.combine(|h| (at(0.0, h) - at(0.0, -h)) / (2.0 * h), scale)?;
    let laplace = if second {
        let l = scheme.combine(
            |h| (at(h, 0.0) + at(-h, 0.0) + at(0.0, h) + at(0.0, -h) - f0 * 4.0) / (h * h),
            scale,
        )?;
        Some(l)
    } else {
        None
    };
    Ok(Derivatives { fx, fy, laplace })
}

fn d_bar(d: &Derivatives) -> Complex {
    (d.fx + Complex::i() * d.fy) * 0.5
}

/// `L_w f = Im(w)² ∂f/∂w̄`.
pub fn lowering<F>(f: F, w0: &HPoint, scheme: &FDScheme) -> Result<Complex>
where
    F: Fn(&HPoint) -> Complex,
{
    let scale = f(w0).norm().max(1e-10);
    let d = derivatives(&f, w0, scheme, false, scale / w0.im)?;
    Ok(d_bar(&d) * (w0.im * w0.im))
}

/// `ξ_κ f = 2i y^κ conj(∂f/∂τ̄)`.
pub fn xi<F>(f: F, tau0: &HPoint, kappa: i32, scheme: &FDScheme) -> Result<Complex>
where
    F: Fn(&HPoint) -> Complex,
{
    let scale = f(tau0).norm().max(1e-10);
    let d = derivatives(&f, tau0, scheme, false, scale / tau0.im)?;
    Ok(Complex::new(0.0, 2.0) * tau0.im.powi(kappa) * d_bar(&d).conj())
}

/// `Δ_κ f = −y²(f_xx + f_yy) + iκy(f_x + i f_y)`.
pub fn hyperbolic_laplacian<F>(f: F, tau0: &HPoint, kappa: i32, scheme: &FDScheme) -> Result<Complex>
where
    F: Fn(&HPoint) -> Complex,
{
    let y = tau0.im;
    let scale = f(tau0).norm().max(1e-10);
    let d = derivatives(&f, tau0, scheme, true, scale / (y * y))?;
    let lap = d.laplace.expect("requested");
    Ok(-lap * (y * y) + Complex::new(0.0, kappa as f64 * y) * (d.fx + Complex::i() * d.fy))
}

/// Refuses `τ` within `|Q_τ| < 10h` of the geodesic of any `Q ∈ 𝒬_D`; returns the
/// smallest `|Q_τ|` otherwise.
pub fn geodesic_guard(d: i64, tau: &HPoint, h: f64) -> Result<f64> {
    let guard = 10.0 * h;
    if d <= 0 {
        return Ok(f64::INFINITY);
    }
    let forms = enumerate_region(d, tau, guard * guard * 1.0001)?;
    let min = forms.iter().map(|q| q_tau(q, tau).abs()).fold(f64::INFINITY, f64::min);
    if min < guard {
        Err(Error::NearGeodesic { distance: min, guard })
    } else {
        Ok(min)
    }
}

/// Gram matrix of `q(a, b, c) = b² − 4ac`: `q(w) = ½⟨w, Aw⟩`.
pub const GRAM_DISCRIMINANT: [[i64; 3]; 3] = [[0, 0, -4], [0, 2, 0], [-4, 0, 0]];

/// `q(w) = b² − 4ac`.
pub fn quadratic_form<T: Scalar>(w: &[T; 3]) -> T {
    w[1].clone() * w[1].clone() - T::from_int(4) * w[0].clone() * w[2].clone()
}

/// `B(u₁, u₂) = q(u₁ + u₂) − q(u₁) − q(u₂)`.
pub fn bilinear_form<T: Scalar>(u1: &[T; 3], u2: &[T; 3]) -> T {
    let s = [u1[0].clone() + u2[0].clone(), u1[1].clone() + u2[1].clone(), u1[2].clone() + u2[2].clone()];
    quadratic_form(&s) - quadratic_form(u1) - quadratic_form(u2)
}

type PFn = Arc<dyn Fn(&[f64; 3]) -> Complex + Send + Sync>;

/// A function `p` on ℝ³ with the Gram matrix of its quadratic form and the expected `λ`.
#[derive(Clone)]
pub struct PFunction {
    pub p: PFn,
    pub gram: [[i64; 3]; 3],
    pub lambda: i64,
}

impl std::fmt::Debug for PFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PFunction").field("gram", &self.gram).field("lambda", &self.lambda).finish()
    }
}

fn q_parts(w: &[f64; 3], tau: &HPoint) -> (f64, Complex) {
    let (x, y) = (tau.re, tau.im);
    let qt = (w[0] * (x * x + y * y) + w[1] * x + w[2]) / y;
    let t = tau.to_complex();
    (qt, t * t * w[0] + t * w[1] + w[2])
}

impl PFunction {
    /// `p(w) = Q_τ Q(τ,1)^{k−1} e^{−4πQ_τ²}`, the kernel of `Θ`; `λ = k − 3`.
    pub fn theta(k: i32, tau: HPoint) -> Self {
        let p: PFn = Arc::new(move |w| {
            let (qt, qv) = q_parts(w, &tau);
            qv.powi(k - 1) * (qt * (-4.0 * PI * qt * qt).exp())
        });
        Self { p, gram: GRAM_DISCRIMINANT, lambda: (k - 3) as i64 }
    }

    /// `p(w) = Q(τ,1)^k e^{−4πQ_τ²}`, the kernel of `Θ*`; `λ = k − 1`.
    pub fn theta_star(k: i32, tau: HPoint) -> Self {
        let p: PFn = Arc::new(move |w| {
            let (qt, qv) = q_parts(w, &tau);
            qv.powi(k) * (-4.0 * PI * qt * qt).exp()
        });
        Self { p, gram: GRAM_DISCRIMINANT, lambda: (k - 1) as i64 }
    }

    pub fn constant(c: Complex) -> Self {
        Self { p: Arc::new(move |_| c), gram: GRAM_DISCRIMINANT, lambda: 0 }
    }
}

/// Residuals of `(E − Δ/4π)p = λp` at sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VignerasReport {
    pub lambda: i64,
    /// `|(E − Δ/4π)p − λp| / |p|` per sample (absolute where `p = 0`).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

fn inverse3(a: &[[i64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let m = |i: usize, j: usize| a[i][j] as f64;
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if det == 0.0 {
        return Err(Error::Invalid("singular Gram matrix".into()));
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *entry = (m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0)) / det;
        }
    }
    Ok(inv)
}

/// Evaluates `E p = Σ wᵢ ∂ᵢp` and `Δp = ⟨∂, A⁻¹∂⟩p` by central differences at each sample.
pub fn vigneras_check(pf: &PFunction, samples: &[[f64; 3]], scheme: &FDScheme) -> Result<VignerasReport> {
    let ainv = inverse3(&pf.gram)?;
    let p = &pf.p;
    let mut residuals = Vec::with_capacity(samples.len());
    for w in samples {
        let shifted = |i: usize, di: f64, j: usize, dj: f64| {
            let mut u = *w;
            u[i] += di;
            u[j] += dj;
            p(&u)
        };
        let p0 = p(w);
        let scale = p0.norm().max(1e-300);
        let mut euler = Complex::new(0.0, 0.0);
        let mut lap = Complex::new(0.0, 0.0);
        for i in 0..3 {
            let di = scheme.combine(|h| (shifted(i, h, i, 0.0) - shifted(i, -h, i, 0.0)) / (2.0 * h), scale)?;
            euler += di * w[i];
            for j in 0..3 {
                if ainv[i][j] == 0.0 {
                    continue;
                }
                let dij = if i == j {
                    scheme.combine(|h| (shifted(i, h, i, 0.0) + shifted(i, -h, i, 0.0) - p0 * 2.0) / (h * h), scale)?
                } else {
                    scheme.combine(
                        |h| {
                            (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h))
                                / (4.0 * h * h)
                        },
                        scale,
                    )?
                };
                lap += dij * ainv[i][j];
            }
        }
        let resid = euler - lap / (4.0 * PI) - p0 * pf.lambda as f64;
        residuals.push(if p0.norm() > 0.0 { resid.norm() / p0.norm() } else { resid.norm() });
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(VignerasReport { lambda: pf.lambda, residuals, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::QuadForm;
    use crate::Rational;

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint { re: x, im: y }
    }

    #[test]
    fn moebius_basics() {
        assert!(MoebiusMatrix::new(1, 1, 1, 1).is_err());
        let m = MoebiusMatrix::new(1, 1, 4, 5).unwrap();
        assert!(m.is_gamma0_4());
        assert!(!MoebiusMatrix::S.is_gamma0_4());
        let z = pt(0.1, 0.7);
        let a = m.compose(&MoebiusMatrix::T).apply(&z);
        let b = m.apply(&MoebiusMatrix::T.apply(&z));
        assert!((a.to_complex() - b.to_complex()).norm() < 1e-14);
    }

    #[test]
    fn theta_slash_is_identity_and_cocycle_holds() {
        let z = pt(0.13, 0.6);
        let m1 = MoebiusMatrix::new(1, 0, 4, 1).unwrap();
        let m2 = MoebiusMatrix::new(1, 1, 4, 5).unwrap();
        for m in [m1, m2, MoebiusMatrix::T] {
            let v = slash_half_integral(theta_function, &m, 0.5, &z).unwrap();
            assert!((v - theta_function(&z)).norm() < 1e-12);
        }
        let f = |w: &HPoint| Complex::new(w.re, w.im).powi(3) + 1.0;
        let direct = slash_half_integral(f, &m1.compose(&m2), 4.5, &z).unwrap();
        let inner = |w: &HPoint| slash_half_integral(f, &m1, 4.5, w).unwrap();
        let nested = slash_half_integral(inner, &m2, 4.5, &z).unwrap();
        assert!((direct - nested).norm() < 1e-10 * direct.norm());
        assert!(matches!(slash_half_integral(f, &MoebiusMatrix::S, 4.5, &z), Err(Error::NotInGamma04(1))));
    }

    #[test]
    fn closed_multiplier_matches_theta_ratio() {
        let mats = [
            (1, 0, 4, 1),
            (1, 1, 4, 5),
            (-1, 0, 4, -1),
            (3, 1, 8, 3),
            (5, -2, -12, 5),
            (-3, 1, -4, 1),
            (1, 0, -4, 1),
            (-1, 3, 0, -1),
            (7, 2, 24, 7),
        ];
        for (a, b, c, d) in mats {
            let m = MoebiusMatrix::new(a, b, c, d).unwrap();
            for z in [pt(0.13, 0.6), pt(-0.4, 1.3)] {
                let ratio = theta_multiplier(&m, &z).unwrap();
                let closed = theta_multiplier_closed(&m, &z).unwrap();
                assert!((ratio - closed).norm() < 1e-9 * ratio.norm(), "{:?}: {ratio} {closed}", (a, b, c, d));
            }
        }
    }

    #[test]
    fn differential_operators_on_simple_functions() {
        let s = FDScheme::default();
        let w0 = pt(0.3, 1.2);
        let hol = |w: &HPoint| w.to_complex().powi(2);
        assert!(lowering(hol, &w0, &s).unwrap().norm() < 1e-8);
        let conj = |w: &HPoint| w.to_complex().conj();
        assert!((lowering(conj, &w0, &s).unwrap() - 1.44).norm() < 1e-8);
        let k = 4;
        let harmonic = |w: &HPoint| Complex::new(w.im.powi(2 * k - 1), 0.0);
        let lap = hyperbolic_laplacian(harmonic, &w0, 2 - 2 * k, &s).unwrap();
        assert!(lap.norm() < 1e-6, "{lap}");
        let f = |w: &HPoint| Complex::new(w.re * w.im, w.re.sin());
        let x = xi(f, &w0, 3, &s).unwrap();
        let l = lowering(f, &w0, &s).unwrap();
        let rhs = Complex::new(0.0, 2.0) * w0.im.powi(1) * l.conj();
        assert!((x - rhs).norm() < 1e-10);
    }

    #[test]
    fn lowering_of_gaussian_matches_hand_derivative() {
        // f(z) = e^{−4πq²v}: ∂f/∂z̄ = (i/2)∂f/∂v
        let q: f64 = 0.7;
        let f = |z: &HPoint| Complex::new((-4.0 * PI * q * q * z.im).exp(), 0.0);
        let z0 = pt(0.2, 0.9);
        let exact = Complex::new(0.0, 0.5) * (-4.0 * PI * q * q) * (-4.0 * PI * q * q * z0.im).exp() * (z0.im * z0.im);
        let got = lowering(f, &z0, &FDScheme::default()).unwrap();
        assert!((got - exact).norm() < 1e-6 * exact.norm());
    }

    #[test]
    fn large_step_is_rejected() {
        let f = |w: &HPoint| Complex::new((40.0 * w.re).sin(), 0.0);
        let s = FDScheme::new(0.05, 4, 1e-6).unwrap();
        assert!(matches!(lowering(f, &pt(0.3, 1.0), &s), Err(Error::StepTooLarge { .. })));
        assert!(lowering(f, &pt(0.3, 1.0), &FDScheme::default()).is_ok());
    }

    #[test]
    fn geodesic_guard_detects_nearby_geodesic() {
        // [1,0,−1] has the unit circle as geodesic
        assert!(matches!(geodesic_guard(4, &pt(0.0, 1.0 + 1e-5), 1e-4), Err(Error::NearGeodesic { .. })));
        assert!(geodesic_guard(4, &pt(0.3, 1.7), 1e-4).is_ok());
        let _ = QuadForm { a: 1, b: 0, c: -1 };
    }

    #[test]
    fn vigneras_eigenvalues() {
        let tau = pt(0.3, 1.1);
        let samples: Vec<[f64; 3]> = vec![[1.0, 0.0, -1.0], [1.0, 1.0, -1.0], [2.0, -1.0, -1.0], [-1.0, 2.0, 1.0]];
        for k in [4, 6] {
            for pf in [PFunction::theta(k, tau), PFunction::theta_star(k, tau)] {
                let r = vigneras_check(&pf, &samples, &FDScheme::default()).unwrap();
                assert!(r.max_residual < 1e-5, "k={k} λ={} {:?}", pf.lambda, r.residuals);
            }
        }
        let c = vigneras_check(&PFunction::constant(Complex::new(2.0, 1.0)), &samples, &FDScheme::default()).unwrap();
        assert_eq!(c.max_residual, 0.0);
    }

    #[test]
    fn bilinear_form_exact_values() {
        let r = |n: i64| Rational::from_integer(n);
        // τ = i: c₁ = (−1, 2x, −|τ|²)
        let c1 = [r(-1), r(0), r(-1)];
        assert_eq!(quadratic_form(&c1), r(-4));
        // Q = [1,1,1] at τ = i: Q_τ = 2
        assert_eq!(bilinear_form(&c1, &[r(1), r(1), r(1)]), r(8));
        let u = [r(1), r(2), r(3)];
        assert_eq!(bilinear_form(&u, &u), r(-16));
        // τ = 1/2 + 3i/2
        let (x, y) = (Rational::new(1, 2), Rational::new(3, 2));
        let c1 = [r(-1), r(2) * x, -(x * x + y * y)];
        assert_eq!(quadratic_form(&c1), r(-4) * y * y);
        let w = [r(2), r(-3), r(5)];
        let q_t = (w[0] * (x * x + y * y) + w[1] * x + w[2]) / y;
        assert_eq!(bilinear_form(&c1, &w), r(4) * y * q_t);
    }
}
