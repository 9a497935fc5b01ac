//! Per-form summands and their majorants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::qforms::{q_tau, q_value, HPoint, Majorant, MajorantTerm, QuadForm};
use crate::specfun::{erfc, inc_gamma_half, psi_k_complement, psi_k_raw, sgn, sign_minus_erf, Weight, SQRT_PI};
use crate::Complex;

/// One per-form term of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Summand {
    /// `D^{k−1/2} Q^{−k}` (`D > 0`).
    CuspForm,
    /// `(2/β) sgn(Q_τ) Q^{k−1} ψ_k(Dy²/|Q|²)` (`D > 0`).
    LocallyHarmonic,
    /// `−π^{−1/2} sgn(Q_τ) Q^{k−1} Γ(1/2; 4πQ_τ²v)`.
    Nonholomorphic,
    /// `−Q^{k−1}(sgn(Q_{τ₀}) − erf(2Q_τ√(πv)))`.
    Psi1,
    /// `Q^{k−1}(sgn(Q_{τ₀}) − g_k(Q_τ/√D))` (`D > 0`).
    Psi2,
    /// `(sgn(Q_{τ₀}) − sgn(Q_τ)) Q^{k−1}`.
    Psi3,
    /// `i v^{3/2} Q^{k−1} Q_τ e^{−4πQ_τ²v}`.
    Theta,
    /// `2i v^{1/2} y^{−2k} Q^k e^{−4πQ_τ²v}`.
    ThetaStar,
}

impl Summand {
    pub fn positive_only(self) -> bool {
        matches!(self, Summand::CuspForm | Summand::LocallyHarmonic | Summand::Psi2)
    }

    pub fn uses_base_point(self) -> bool {
        matches!(self, Summand::Psi1 | Summand::Psi2 | Summand::Psi3)
    }

    /// Bound on `|summand|` as a function of `|Q_τ|`; for summands depending on `τ₀` it
    /// holds for forms with `sgn(Q_τ) = sgn(Q_{τ₀})`.
    pub fn majorant(self, d: i64, y: f64, v: f64, k: Weight) -> Option<MajorantTerm> {
        let df = d as f64;
        let kk = k.k();
        let m = (kk - 1) as f64;
        let alpha = 4.0 * PI * v;
        if self.positive_only() && d <= 0 {
            return None;
        }
        Some(match self {
            Summand::CuspForm => MajorantTerm::CuspForm { d: df, y, k: kk },
            Summand::LocallyHarmonic | Summand::Psi2 => MajorantTerm::LocallyHarmonic { d: df, y, k: kk },
            // Γ(1/2; w) ≤ √π e^{−w} and erfc(x) ≤ e^{−x²}
            Summand::Nonholomorphic | Summand::Psi1 => {
                MajorantTerm::Gaussian { c: 1.0, d: df, y, m, j: 0.0, alpha }
            }
            Summand::Psi3 => return None,
            Summand::Theta => MajorantTerm::Gaussian { c: v.powf(1.5), d: df, y, m, j: 1.0, alpha },
            Summand::ThetaStar => MajorantTerm::Gaussian {
                c: 2.0 * v.sqrt() * y.powi(-2 * kk),
                d: df,
                y,
                m: kk as f64,
                j: 0.0,
                alpha,
            },
        })
    }

    /// Bound on `|summand|` for a form whose sign differs from its sign at `τ₀`.
    pub fn mismatch_bound(self, data: &FormData, k: Weight) -> f64 {
        match self {
            Summand::Psi1 | Summand::Psi2 | Summand::Psi3 => 2.0 * data.qv_norm.powi(k.k() - 1),
            _ => 0.0,
        }
    }
}

/// Named series and the summands they add up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    Omega,
    Psi,
    PsiStar,
    PsiHatDef,
    PsiHatSplit,
    Psi1,
    Psi2,
    Psi3,
    Theta,
    ThetaStar,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 10] = [
        SeriesKind::Omega,
        SeriesKind::Psi,
        SeriesKind::PsiStar,
        SeriesKind::PsiHatDef,
        SeriesKind::PsiHatSplit,
        SeriesKind::Psi1,
        SeriesKind::Psi2,
        SeriesKind::Psi3,
        SeriesKind::Theta,
        SeriesKind::ThetaStar,
    ];

    pub fn summands(self) -> &'static [Summand] {
        match self {
            SeriesKind::Omega => &[Summand::CuspForm],
            SeriesKind::Psi => &[Summand::LocallyHarmonic],
            SeriesKind::PsiStar => &[Summand::Nonholomorphic],
            SeriesKind::PsiHatDef => &[Summand::LocallyHarmonic, Summand::Nonholomorphic],
            SeriesKind::PsiHatSplit => &[Summand::Psi1, Summand::Psi2],
            SeriesKind::Psi1 => &[Summand::Psi1],
            SeriesKind::Psi2 => &[Summand::Psi2],
            SeriesKind::Psi3 => &[Summand::Psi3],
            SeriesKind::Theta => &[Summand::Theta],
            SeriesKind::ThetaStar => &[Summand::ThetaStar],
        }
    }

    /// Whether negative `D` occur.
    pub fn has_negative(self) -> bool {
        !self.summands().iter().all(|s| s.positive_only())
    }

    pub fn uses_base_point(self) -> bool {
        self.summands().iter().any(|s| s.uses_base_point())
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Omega => "omega",
            SeriesKind::Psi => "psi",
            SeriesKind::PsiStar => "psistar",
            SeriesKind::PsiHatDef => "psihat",
            SeriesKind::PsiHatSplit => "psihat_split",
            SeriesKind::Psi1 => "psi1",
            SeriesKind::Psi2 => "psi2",
            SeriesKind::Psi3 => "psi3",
            SeriesKind::Theta => "theta",
            SeriesKind::ThetaStar => "thetastar",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        SeriesKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// Sum of the majorants of all summands present for this `D`.
    pub fn majorant(self, d: i64, y: f64, v: f64, k: Weight) -> Majorant {
        let terms = self.summands().iter().filter_map(|s| s.majorant(d, y, v, k)).collect();
        Majorant::new(terms, k.as_f64())
    }
}

/// Quantities of one form at one `τ`, shared by all summands.
#[derive(Debug, Clone, Copy)]
pub struct FormData {
    pub d: i64,
    /// `Q(τ,1)`.
    pub qv: Complex,
    pub qv_norm: f64,
    /// `Q_τ`.
    pub q: f64,
    /// `sgn(Q_{τ₀})`.
    pub s0: f64,
    pub y: f64,
}

impl FormData {
    pub fn new(form: &QuadForm, tau: &HPoint, tau0: &HPoint) -> Self {
        let qv = q_value(form, tau);
        FormData {
            d: form.discriminant(),
            qv,
            qv_norm: qv.norm(),
            q: q_tau(form, tau),
            s0: sgn(q_tau(form, tau0)),
            y: tau.im,
        }
    }

    pub fn mismatched(&self) -> bool {
        self.s0 != sgn(self.q)
    }
}

/// Context shared by a batch of summand evaluations at fixed `(τ, v)`.
pub(crate) struct Ctx {
    pub k: i32,
    pub two_over_beta: f64,
    pub v: f64,
    pub sqrt_pi_v: f64,
}

impl Ctx {
    pub fn new(k: Weight, v: f64) -> Self {
        Ctx { k: k.k(), two_over_beta: 2.0 / k.beta(), v, sqrt_pi_v: (PI * v).sqrt() }
    }
}

/// `1 − |g_k(r)| = (2/β) ψ_k(1/(1 + r²))` with `r² = Q_τ²/D`.
fn g_complement(ctx: &Ctx, q: f64, d: f64) -> f64 {
    let u = d / (d + q * q);
    ctx.two_over_beta * psi_k_raw(u, ctx.k).unwrap_or(0.0)
}

pub(crate) fn summand_value(s: Summand, f: &FormData, ctx: &Ctx) -> Complex {
    let k = ctx.k;
    let d = f.d as f64;
    match s {
        Summand::CuspForm => {
            if f.d <= 0 {
                return Complex::new(0.0, 0.0);
            }
            f.qv.powi(-k) * d.powf(k as f64 - 0.5)
        }
        Summand::LocallyHarmonic => {
            if f.d <= 0 || f.q == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            let u = (d * f.y * f.y / (f.qv_norm * f.qv_norm)).min(1.0);
            let psi = psi_k_raw(u, k).unwrap_or(0.0);
            f.qv.powi(k - 1) * (ctx.two_over_beta * sgn(f.q) * psi)
        }
        Summand::Nonholomorphic => {
            if f.q == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            let w = 4.0 * PI * f.q * f.q * ctx.v;
            f.qv.powi(k - 1) * (-sgn(f.q) * inc_gamma_half(w) / SQRT_PI)
        }
        Summand::Psi1 => {
            let x = 2.0 * f.q * ctx.sqrt_pi_v;
            if f.d <= 0 {
                // Σ (s₀ − sgn Q_τ) Q^{k−1} = 0 for D ≤ 0, leaving −sgn(Q_τ) erfc(|x|)
                return f.qv.powi(k - 1) * (-sgn(f.q) * erfc(x.abs()));
            }
            f.qv.powi(k - 1) * (-sign_minus_erf(f.s0, x))
        }
        Summand::Psi2 => {
            if f.d <= 0 {
                return Complex::new(0.0, 0.0);
            }
            let sq = sgn(f.q);
            let w = if sq == 0.0 {
                f.s0
            } else if f.s0 == sq {
                sq * g_complement(ctx, f.q, d)
            } else if f.s0 == -sq {
                f.s0 * (2.0 - g_complement(ctx, f.q, d))
            } else {
                // τ₀ on the geodesic: −g_k(r) = −sgn(r)(2/β) ψ_k^c(r²/(1 + r²))
                let r2 = f.q * f.q / d;
                -sq * ctx.two_over_beta * psi_k_complement(r2 / (1.0 + r2), k).unwrap_or(0.0)
            };
            f.qv.powi(k - 1) * w
        }
        Summand::Psi3 => f.qv.powi(k - 1) * (f.s0 - sgn(f.q)),
        Summand::Theta => {
            let g = (-4.0 * PI * f.q * f.q * ctx.v).exp();
            f.qv.powi(k - 1) * Complex::new(0.0, ctx.v.powf(1.5) * f.q * g)
        }
        Summand::ThetaStar => {
            let g = (-4.0 * PI * f.q * f.q * ctx.v).exp();
            f.qv.powi(k) * Complex::new(0.0, 2.0 * ctx.v.sqrt() * f.y.powi(-2 * k) * g)
        }
    }
}
