//! Holomorphic projection of weight `κ` onto series in `e(Dz)`, `D ≥ 1`.
//!
//! The coefficient route maps `c_D(v)` to
//! `(4πD)^{κ−1}/Γ(κ−1) ∫₀^∞ c_D(t) e^{−4πDt} t^{κ−2} dt`. The kernel route integrates
//! `((κ−1)(2i)^κ/4π) f(w) Im(w)^κ (z − w̄)^{−κ}` over `ℍ`, either folded onto
//! `[0, 1) × (0, ∞)` with the Lipschitz sum for 1-periodic `f`, or over all of `ℍ`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{FourierCoeffSeries, ZSeries};
use crate::qforms::HPoint;
use crate::operators::{theta_multiplier_closed, MoebiusMatrix};
use crate::specfun::{
    cpow, e2pi, exp_trapezoid, gauss_kronrod, lipschitz_rhs, periodic_trapezoid, QuadratureConfig,
};
use crate::Complex;

/// What to project and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRequest {
    pub kappa: f64,
    pub d_list: Vec<i64>,
    pub quad: QuadratureConfig,
    /// When present, `c_D` is sampled on this grid and interpolated monotonically.
    pub v_grid: Option<Vec<f64>>,
}

impl ProjectionRequest {
    pub fn new(kappa: f64, d_list: Vec<i64>) -> Self {
        Self { kappa, d_list, quad: QuadratureConfig::default(), v_grid: None }
    }
}

/// Coefficient function of one frequency.
pub type CoefficientFn = Arc<dyn Fn(f64) -> Complex + Send + Sync>;

/// `Σ_D c_D(v) e(Dz)` with finitely many prescribed coefficient functions.
#[derive(Clone, Default)]
pub struct CoefficientFunctions {
    terms: Vec<(i64, CoefficientFn)>,
}

impl CoefficientFunctions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, d: i64, c: impl Fn(f64) -> Complex + Send + Sync + 'static) -> Self {
        self.terms.push((d, Arc::new(c)));
        self
    }

    pub fn frequencies(&self) -> Vec<i64> {
        self.terms.iter().map(|(d, _)| *d).collect()
    }
}

impl ZSeries for CoefficientFunctions {
    fn eval_z(&self, z: &HPoint) -> Complex {
        self.terms.iter().map(|(d, c)| c(z.im) * e2pi(z.to_complex() * *d as f64)).sum()
    }

    fn frequency_bound(&self) -> i64 {
        self.terms.iter().map(|(d, _)| d.abs()).max().unwrap_or(0)
    }

    fn coefficient_at(&self, d: i64, v: f64) -> Result<Complex> {
        Ok(self.terms.iter().filter(|(e, _)| *e == d).map(|(_, c)| c(v)).sum())
    }

    fn coefficients_at(&self, v: f64) -> Result<Vec<(i64, Complex)>> {
        Ok(self.terms.iter().map(|(d, c)| (*d, c(v))).collect())
    }
}

/// First error raised inside a quadrature integrand.
#[derive(Default)]
struct ErrorSlot(Mutex<Option<Error>>);

impl ErrorSlot {
    fn keep<T: Default>(&self, r: Result<T>) -> T {
        r.unwrap_or_else(|e| {
            self.0.lock().unwrap().get_or_insert(e);
            T::default()
        })
    }

    fn check(self) -> Result<()> {
        match self.0.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 1.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { name: "kappa", value: kappa, domain: "κ > 1" })
    }
}

/// `(4πD)^{κ−1}/Γ(κ−1) ∫₀^∞ c(t) e^{−4πDt} t^{κ−2} dt` for `D ≥ 1`.
pub fn project_coeff<F>(c: F, d: i64, kappa: f64, quad: &QuadratureConfig) -> Result<Complex>
where
    F: Fn(f64) -> Complex + Sync,
{
    check_kappa(kappa)?;
    if d < 1 {
        return Err(Error::Invalid(format!("projection needs D ≥ 1, got {d}")));
    }
    let a = 4.0 * PI * d as f64;
    // normalise in s = at so the weight is s^{κ−2} e^{−s}/Γ(κ−1)
    let log_norm = -libm::lgamma(kappa - 1.0);
    let r = exp_trapezoid(
        |s: f64| {
            let w = ((kappa - 2.0) * s.ln() - s + log_norm).exp();
            if w == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                c(s / a) * w
            }
        },
        quad,
    )?;
    Ok(r.value)
}

/// Monotone piecewise cubic (Fritsch–Carlson) interpolant, constant outside the nodes.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("interpolation needs ≥ 2 increasing nodes".into()));
        }
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { (delta[i - 1] + delta[i]) / 2.0 };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let (a, b) = (m[i] / delta[i], m[i + 1] / delta[i]);
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                m[i] = t * a * delta[i];
                m[i + 1] = t * b * delta[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[i]
            + (s3 - 2.0 * s2 + s) * h * self.m[i]
            + (-2.0 * s3 + 3.0 * s2) * self.y[i + 1]
            + (s3 - s2) * h * self.m[i + 1]
    }
}

/// Complex samples of `c_D(v)` interpolated in `ln v`, real and imaginary parts separately.
#[derive(Debug, Clone)]
pub struct SampledCoefficient {
    re: MonotoneCubic,
    im: MonotoneCubic,
}

impl SampledCoefficient {
    pub fn new(v: &[f64], c: &[Complex]) -> Result<Self> {
        if v.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Invalid("sample grid must lie in v > 0".into()));
        }
        let s: Vec<f64> = v.iter().map(|x| x.ln()).collect();
        Ok(Self {
            re: MonotoneCubic::new(s.clone(), c.iter().map(|z| z.re).collect())?,
            im: MonotoneCubic::new(s, c.iter().map(|z| z.im).collect())?,
        })
    }

    pub fn eval(&self, v: f64) -> Complex {
        let s = v.ln();
        Complex::new(self.re.eval(s), self.im.eval(s))
    }
}

/// Projection of externally sampled `c_D(v)`.
pub fn project_sampled(v: &[f64], c: &[Complex], d: i64, kappa: f64, quad: &QuadratureConfig) -> Result<Complex> {
    let interp = SampledCoefficient::new(v, c)?;
    project_coeff(|t| interp.eval(t), d, kappa, quad)
}

/// Projected coefficients of `f` for every `D` in the request.
pub fn project_series<S: ZSeries + ?Sized>(f: &S, req: &ProjectionRequest) -> Result<FourierCoeffSeries> {
    check_kappa(req.kappa)?;
    let results: Vec<(i64, Complex)> = req
        .d_list
        .par_iter()
        .map(|&d| {
            let c = match &req.v_grid {
                Some(grid) => {
                    let samples: Vec<Complex> =
                        grid.iter().map(|&t| f.coefficient_at(d, t)).collect::<Result<_>>()?;
                    project_sampled(grid, &samples, d, req.kappa, &req.quad)?
                }
                None => {
                    let slot = ErrorSlot::default();
                    let c = project_coeff(|t| slot.keep(f.coefficient_at(d, t)), d, req.kappa, &req.quad);
                    slot.check()?;
                    c?
                }
            };
            Ok((d, c))
        })
        .collect::<Result<_>>()?;
    let mut out = FourierCoeffSeries::new(f.meta(), None);
    for (d, c) in results {
        out.insert(d, c)?;
    }
    Ok(out)
}

/// Kernel-route value with the integration window actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelProjection {
    pub value: Complex,
    pub eta_min: f64,
    pub eta_max: f64,
    /// Half-width of the `Re w` window around `Re z`; `None` for the folded route.
    pub xi_half_width: Option<f64>,
}

fn kernel_constant(kappa: f64) -> Complex {
    (kappa - 1.0) * cpow(Complex::new(0.0, 2.0), kappa) / (4.0 * PI)
}

/// Terms of `Σ_{m≥1} m^{κ−1} e(mW)` needed for relative size `1e−18` when `Im W ≥ v`.
fn lipschitz_terms(kappa: f64, v: f64) -> u32 {
    let mut n = 1u32;
    while ((kappa - 1.0) * (n as f64).ln() - 2.0 * PI * n as f64 * v) > -41.5 && n < 100_000 {
        n += 1;
    }
    n
}

/// Kernel route for a 1-periodic series: the `Re w` integral runs over `[0, 1)` against
/// `Σ_n (z − w̄ + n)^{−κ}` in its Lipschitz form.
pub fn project_kernel<S: ZSeries + ?Sized>(f: &S, kappa: f64, z: &HPoint, quad: &QuadratureConfig) -> Result<KernelProjection> {
    check_kappa(kappa)?;
    crate::operators::check_positive("Im z", z.im)?;
    let nk = lipschitz_terms(kappa, z.im);
    let start = 2 * (f.frequency_bound() as usize + nk as usize) + 2;
    let zc = z.to_complex();
    let slot = ErrorSlot::default();
    let inner = |eta: f64| -> Result<Complex> {
        let coeffs: Vec<(i64, Complex)> =
            f.coefficients_at(eta)?.into_iter().filter(|(_, c)| *c != Complex::new(0.0, 0.0)).collect();
        let g = |x: f64| {
            let mut fx = Complex::new(0.0, 0.0);
            for &(d, c) in &coeffs {
                let df = d as f64;
                fx += c * Complex::from_polar((-2.0 * PI * df * eta).exp(), 2.0 * PI * df * x);
            }
            let w = zc - x + Complex::new(0.0, eta);
            fx * lipschitz_rhs(w, kappa, nk)
        };
        periodic_trapezoid(g, start, quad)
    };
    let r = exp_trapezoid(|eta: f64| slot.keep(inner(eta)) * eta.powf(kappa - 2.0), quad);
    slot.check()?;
    let r = r?;
    Ok(KernelProjection {
        value: r.value * kernel_constant(kappa),
        eta_min: r.s_min.exp(),
        eta_max: r.s_max.exp(),
        xi_half_width: None,
    })
}

/// Half-width `X` of the `Re w` window: the kernel decays like `|Re w|^{−κ}`, so the
/// omitted strip is of relative size about `X^{1−κ} ≤ 10^{−9}`.
fn window_half_width(kappa: f64) -> f64 {
    1e9f64.powf(1.0 / (kappa - 1.0)).ceil().max(8.0)
}

/// `π_κ(f|_κ M)(z)` for a 1-periodic series `f` and `M ∈ Γ₀(4)`, integrating over `ℍ`
/// without folding.
///
/// The substitution `w' = Mw` keeps `f` at `w'`, so its coefficients are needed only at
/// `Im w'`; the rest of the integrand is
/// `j(M, w)^{−2κ} Im(w)^κ (z − w̄)^{−κ}` with `w = M^{−1}w'`. The `Re w'` integral runs
/// over unit cells of `[Re Mz − X, Re Mz + X]` by adaptive Gauss–Kronrod.
pub fn project_kernel_slashed<S: ZSeries + ?Sized>(
    f: &S,
    m: &MoebiusMatrix,
    kappa: f64,
    z: &HPoint,
    quad: &QuadratureConfig,
) -> Result<KernelProjection> {
    check_kappa(kappa)?;
    crate::operators::check_positive("Im z", z.im)?;
    if !m.is_gamma0_4() {
        return Err(Error::NotInGamma04(m.entries()[2]));
    }
    let two_kappa = 2.0 * kappa;
    if two_kappa.fract() != 0.0 {
        return Err(Error::Domain { name: "kappa", value: kappa, domain: "½ℤ" });
    }
    let [a, b, c, d] = m.entries();
    let inv = MoebiusMatrix::new(d, -b, -c, a)?;
    let zc = z.to_complex();
    let centre = m.apply(z).re;
    let x_half = window_half_width(kappa);
    let cells = (2.0 * x_half) as i64;
    let slot = ErrorSlot::default();
    let inner = |eta: f64| -> Result<Complex> {
        let coeffs: Vec<(i64, Complex)> = f
            .coefficients_at(eta)?
            .into_iter()
            .filter(|(_, c)| *c != Complex::new(0.0, 0.0))
            .map(|(d, c)| (d, c * (-2.0 * PI * d as f64 * eta).exp()))
            .collect();
        let g = |x: f64| -> Complex {
            let mut fx = Complex::new(0.0, 0.0);
            for &(d, c) in &coeffs {
                fx += c * Complex::from_polar(1.0, 2.0 * PI * (d as f64 * x).rem_euclid(1.0));
            }
            let wp = HPoint { re: x, im: eta };
            let w = inv.apply(&wp);
            let j = theta_multiplier_closed(m, &w).unwrap_or_default();
            let kern = cpow(zc - w.to_complex().conj(), -kappa) * w.im.powf(kappa);
            fx * kern * j.powi(-(two_kappa as i32)) / (eta * eta)
        };
        let lo = centre - x_half;
        (0..cells)
            .into_par_iter()
            .map(|i| gauss_kronrod(&g, lo + i as f64, lo + i as f64 + 1.0, quad))
            .try_reduce(|| Complex::new(0.0, 0.0), |p, q| Ok(p + q))
    };
    let r = exp_trapezoid(|eta: f64| slot.keep(inner(eta)), quad);
    slot.check()?;
    let r = r?;
    Ok(KernelProjection {
        value: r.value * kernel_constant(kappa),
        eta_min: r.s_min.exp(),
        eta_max: r.s_max.exp(),
        xi_half_width: Some(x_half),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{SeriesEvaluator, SeriesKind, SeriesParams};
    use crate::operators::{slash_half_integral, MoebiusMatrix};
    use crate::qforms::TruncationPolicy;
    use crate::specfun::Weight;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::new(1e-13, 1e-11, 14).unwrap()
    }

    #[test]
    fn constant_coefficient_projects_to_one() {
        for kappa in [2.5, 4.0, 4.5] {
            let c = project_coeff(|_| Complex::new(1.0, 0.0), 3, kappa, &cfg()).unwrap();
            assert!((c - 1.0).norm() < 1e-10, "κ={kappa}: {c}");
        }
    }

    #[test]
    fn exponential_coefficient() {
        let c = project_coeff(|t| Complex::new((-4.0 * PI * t).exp(), 0.0), 1, 4.5, &cfg()).unwrap();
        assert!((c.re - 2f64.powf(-3.5)).abs() < 1e-10, "{c}");
    }

    #[test]
    fn sampled_route_matches_direct() {
        let grid: Vec<f64> = (0..400).map(|j| (-12.0 + j as f64 * 0.04).exp()).collect();
        let vals: Vec<Complex> = grid.iter().map(|&t| Complex::new((-4.0 * PI * t).exp(), 0.0)).collect();
        let c = project_sampled(&grid, &vals, 1, 4.5, &cfg()).unwrap();
        assert!((c.re - 2f64.powf(-3.5)).abs() < 1e-6, "{c}");
    }

    #[test]
    fn monotone_interpolant_preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.1, 0.1, 3.0, 3.1];
        let p = MonotoneCubic::new(x, y).unwrap();
        let mut prev = p.eval(0.0);
        for j in 1..=400 {
            let v = p.eval(j as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert_eq!(p.eval(1.5), 0.1);
    }

    #[test]
    fn kernel_fixes_holomorphic_exponential() {
        let mut f = FourierCoeffSeries::new(SeriesParams::default(), None);
        f.insert(1, Complex::new(1.0, 0.0)).unwrap();
        let z = HPoint { re: 0.0, im: 1.0 };
        let r = project_kernel(&f, 4.0, &z, &cfg()).unwrap();
        let want = (-2.0 * PI).exp();
        assert!((r.value - want).norm() < 1e-6 * want, "{:?}", r);
    }

    /// `e(w) e^{−Im w}`, whose projection is `(4π/(4π+1))^{κ−1} e(z)`.
    struct Damped;

    impl ZSeries for Damped {
        fn eval_z(&self, z: &HPoint) -> Complex {
            e2pi(z.to_complex()) * (-z.im).exp()
        }
        fn frequency_bound(&self) -> i64 {
            1
        }
        fn coefficients_at(&self, v: f64) -> Result<Vec<(i64, Complex)>> {
            Ok(vec![(1, Complex::new((-v).exp(), 0.0))])
        }
    }

    fn damped_projection(kappa: f64, z: &HPoint) -> Complex {
        e2pi(z.to_complex()) * (4.0 * PI / (4.0 * PI + 1.0)).powf(kappa - 1.0)
    }

    #[test]
    fn unfolded_kernel_matches_closed_form() {
        let z = HPoint { re: 0.1, im: 0.9 };
        let r = project_kernel_slashed(&Damped, &MoebiusMatrix::IDENTITY, 4.5, &z, &cfg()).unwrap();
        let want = damped_projection(4.5, &z);
        assert!((r.value - want).norm() < 1e-6 * want.norm(), "{:?} {want}", r);
        let folded = project_kernel(&Damped, 4.5, &z, &cfg()).unwrap();
        assert!((folded.value - want).norm() < 1e-8 * want.norm(), "{:?} {want}", folded);
    }

    #[test]
    fn projection_commutes_with_gamma0_4_slash() {
        let m = MoebiusMatrix::new(1, 0, 4, 1).unwrap();
        let kappa = 4.5;
        for z in [HPoint { re: -0.2, im: 0.15 }, HPoint { re: -0.3, im: 0.1 }] {
            let lhs = slash_half_integral(|w: &HPoint| damped_projection(kappa, w), &m, kappa, &z).unwrap();
            let rhs = project_kernel_slashed(&Damped, &m, kappa, &z, &cfg()).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-6 * lhs.norm(), "{lhs} {rhs}");
        }
    }

    #[test]
    fn psi1_projects_to_minus_psi2() {
        let params = SeriesParams {
            k: Weight::new(4).unwrap(),
            policy: TruncationPolicy::default().with_tail_target(1e-8),
            ..SeriesParams::default()
        };
        let tau = HPoint { re: 0.15, im: 1.2 };
        let ds = vec![1, 4, 5, 8];
        let ev = SeriesEvaluator::for_coefficients(&[SeriesKind::Psi1, SeriesKind::Psi2], params, tau, 1.0, &ds)
            .unwrap();
        let req = ProjectionRequest::new(4.5, ds.clone());
        let p1 = project_series(&ev, &req).unwrap();
        let p2 = ev.with_kind(SeriesKind::Psi2);
        for d in ds {
            let a = p1.get(d);
            let b = p2.coefficient(d, &tau, 1.0);
            assert!((a + b).norm() < 1e-6, "D={d}: {a} vs {b}");
        }
    }
}
