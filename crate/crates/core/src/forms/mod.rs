//! Evaluators for `f_D`, `F_D`, `G_D`, `Ω`, `Ψ`, `Ψ*`, `Ψ̂`, `Ψ₁`, `Ψ₂`, `Ψ₃`, `Θ`, `Θ*`.
//!
//! Every object is `Σ_D c_D(τ, v) e(Dz)` with `c_D` a sum over `Q ∈ 𝒬_D` of one or more
//! per-form summands. An evaluator fixes, at a centre point, the range of `D` and the set
//! of forms for each `D` so that the certified omitted mass stays below the policy's
//! tail target; it can then be evaluated at nearby points with the same forms, which is
//! what finite-difference stencils need.

mod series;
mod summand;

pub use series::{
    extract_coeff, Block, FourierCoeffSeries, SeriesEvaluator, SeriesValue, ZSeries,
};
pub use summand::{FormData, SeriesKind, Summand};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qforms::{HPoint, TruncationPolicy};
use crate::specfun::Weight;

/// Weight, truncation policy and the base point `τ₀` of `Ψ₁`, `Ψ₂`, `Ψ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub k: Weight,
    pub policy: TruncationPolicy,
    pub tau0: HPoint,
}

impl SeriesParams {
    pub fn new(k: Weight, policy: TruncationPolicy, tau0: HPoint) -> Self {
        Self { k, policy, tau0 }
    }
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self {
            k: Weight::default(),
            policy: TruncationPolicy::default(),
            tau0: HPoint { re: 0.0, im: 2.0 },
        }
    }
}

fn single_d(kind: SeriesKind, tau: &HPoint, d: i64, v: f64, p: &SeriesParams) -> Result<SeriesValue> {
    let block = Block::build(d, tau, v, &[kind], p, p.policy.tail_target)?;
    let tail = block.tail_bound;
    let ev = SeriesEvaluator::from_blocks(kind, *p, *tau, v, vec![block], 0.0);
    Ok(SeriesValue { value: ev.coefficient(d, tau, v), tail_bound: tail })
}

fn series(kind: SeriesKind, tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    let ev = SeriesEvaluator::new(kind, *p, *tau, *z)?;
    Ok(SeriesValue { value: ev.eval(tau, z), tail_bound: ev.tail_bound() })
}

/// `f_D(τ) = D^{k−1/2} Σ_{Q∈𝒬_D} Q(τ,1)^{−k}`, `D > 0`.
pub fn f_d(tau: &HPoint, d: i64, p: &SeriesParams) -> Result<SeriesValue> {
    single_d(SeriesKind::Omega, tau, d, 1.0, p)
}

/// `F_D(τ) = (2/β) Σ sgn(Q_τ) Q(τ,1)^{k−1} ψ_k(Dy²/|Q(τ,1)|²)`, `D > 0`.
pub fn big_f_d(tau: &HPoint, d: i64, p: &SeriesParams) -> Result<SeriesValue> {
    single_d(SeriesKind::Psi, tau, d, 1.0, p)
}

/// `G_D(v; τ) = −π^{−1/2} Σ sgn(Q_τ) Q(τ,1)^{k−1} Γ(1/2; 4πQ_τ²v)`.
pub fn g_d(v: f64, tau: &HPoint, d: i64, p: &SeriesParams) -> Result<SeriesValue> {
    crate::operators::check_positive("v", v)?;
    single_d(SeriesKind::PsiStar, tau, d, v, p)
}

/// `Ω(τ, z) = Σ_{D>0} f_D(τ) e(Dz)`.
pub fn omega(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Omega, tau, z, p)
}

/// `Ψ(τ, z) = Σ_{D>0} F_D(τ) e(Dz)`.
pub fn psi(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Psi, tau, z, p)
}

/// `Ψ*(τ, z) = Σ_D G_D(v; τ) e(Dz)`.
pub fn psi_star(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::PsiStar, tau, z, p)
}

/// `Ψ̂ = Ψ + Ψ*` summed by definition.
pub fn psi_hat_def(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::PsiHatDef, tau, z, p)
}

/// `Ψ̂ = Ψ₁ + Ψ₂`.
pub fn psi_hat_split(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::PsiHatSplit, tau, z, p)
}

/// `Ψ₁ = −Σ_D Σ Q(τ,1)^{k−1}(sgn(Q_{τ₀}) − erf(2Q_τ√(πv))) e(Dz)`.
pub fn psi1(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Psi1, tau, z, p)
}

/// `Ψ₂ = Σ_{D>0} Σ Q(τ,1)^{k−1}(sgn(Q_{τ₀}) − g_k(Q_τ/√D)) e(Dz)`.
pub fn psi2(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Psi2, tau, z, p)
}

/// `Ψ₃ = Σ_D Σ (sgn(Q_{τ₀}) − sgn(Q_τ)) Q(τ,1)^{k−1} e(Dz)`.
pub fn psi3(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Psi3, tau, z, p)
}

/// `Θ(τ, z) = i v^{3/2} Σ_D Σ Q(τ,1)^{k−1} Q_τ e^{−4πQ_τ²v} e(Dz)`.
pub fn theta(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::Theta, tau, z, p)
}

/// `Θ*(τ, z) = 2i v^{1/2} y^{−2k} Σ_D Σ Q(τ,1)^k e^{−4πQ_τ²v} e(Dz)`.
pub fn theta_star(tau: &HPoint, z: &HPoint, p: &SeriesParams) -> Result<SeriesValue> {
    series(SeriesKind::ThetaStar, tau, z, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::{q_value, QuadForm};
    use crate::Complex;

    fn params(k: i64, target: f64) -> SeriesParams {
        SeriesParams {
            k: Weight::new(k).unwrap(),
            policy: TruncationPolicy::default().with_tail_target(target),
            ..SeriesParams::default()
        }
    }

    fn brute_f_d(tau: &HPoint, d: i64, k: i32, n: i64) -> Complex {
        let mut s = Complex::new(0.0, 0.0);
        for a in -n..=n {
            for b in -n..=n {
                if a == 0 {
                    continue;
                }
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let q = QuadForm { a, b, c: num / (4 * a) };
                s += q_value(&q, tau).powi(-k);
            }
        }
        for b in [-1i64, 1] {
            let r = (d as f64).sqrt().round() as i64;
            if r * r == d && r > 0 {
                for c in -n * n..=n * n {
                    s += q_value(&QuadForm { a: 0, b: b * r, c }, tau).powi(-k);
                }
            }
        }
        s * (d as f64).powf(k as f64 - 0.5)
    }

    #[test]
    fn f_d_matches_brute_force() {
        let tau = HPoint { re: 0.13, im: 1.1 };
        for d in [5, 8, 9] {
            let got = f_d(&tau, d, &params(8, 1e-10)).unwrap();
            let oracle = brute_f_d(&tau, d, 8, 300);
            let err = (got.value - oracle).norm();
            assert!(err < 1e-9 * oracle.norm(), "D={d}: {} vs {oracle}", got.value);
            assert!(got.tail_bound <= 1e-10);
        }
    }

    #[test]
    fn f_d_vanishes_without_cusp_forms() {
        // S_8 = 0
        let tau = HPoint { re: 0.13, im: 1.1 };
        for d in [1, 5, 8] {
            let got = f_d(&tau, d, &params(4, 1e-8)).unwrap();
            assert!(got.value.norm() < 2e-8, "D={d}: {}", got.value);
        }
    }

    #[test]
    fn f_d_modular() {
        let p = params(6, 1e-12);
        let tau = HPoint { re: 0.3, im: 0.9 };
        let a = f_d(&tau, 5, &p).unwrap().value;
        let b = f_d(&tau.shifted(1.0), 5, &p).unwrap().value;
        let c = f_d(&tau.inverted(), 5, &p).unwrap().value;
        assert!((a - b).norm() < 1e-9 * a.norm());
        let t = tau.to_complex().powi(12);
        assert!((c - t * a).norm() < 1e-9 * c.norm());
    }

    #[test]
    fn psi_hat_routes_agree() {
        let p = params(4, 1e-8);
        let tau = HPoint { re: 0.2, im: 1.3 };
        let z = HPoint { re: 0.1, im: 0.8 };
        let a = psi_hat_def(&tau, &z, &p).unwrap();
        let b = psi_hat_split(&tau, &z, &p).unwrap();
        assert!((a.value - b.value).norm() < 1e-6, "{:?} {:?}", a, b);
    }

    #[test]
    fn psi3_vanishes_for_negative_discriminants() {
        let p = params(4, 1e-8);
        let tau = HPoint { re: 0.4, im: 0.7 };
        let z = HPoint { re: 0.0, im: 0.6 };
        let ev = SeriesEvaluator::new(SeriesKind::Psi3, p, tau, z).unwrap();
        let coeffs = ev.coefficients(&tau, z.im);
        assert!(coeffs.iter().any(|(d, c)| *d > 0 && c.norm() > 0.0));
        for (d, c) in coeffs {
            if d <= 0 {
                assert_eq!(c, Complex::new(0.0, 0.0));
            }
        }
    }
}
