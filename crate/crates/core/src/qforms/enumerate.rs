//! Enumeration of `𝒬_D`: fixed boxes, `Q_τ`-regions, and regions sized by a tail bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::Weight;

use super::sqrtmod::SqrtMod;
use super::tail::{tail_bound, Majorant, MajorantTerm};
use super::{q_tau, EnumerationBox, HPoint, QuadForm, TruncationPolicy, MAX_DISCRIMINANT};

fn check_range(d: i64) -> Result<()> {
    if d.abs() > MAX_DISCRIMINANT {
        Err(Error::DiscriminantRange(d))
    } else {
        Ok(())
    }
}

fn is_discriminant(d: i64) -> bool {
    d.rem_euclid(4) <= 1
}

fn exact_sqrt(d: i64) -> Option<i64> {
    if d < 0 {
        return None;
    }
    let r = (d as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|&s| s >= 0 && s * s == d)
}

fn sort_forms(forms: &mut Vec<QuadForm>) {
    forms.sort_by_key(|q| q.sort_key());
    forms.dedup();
}

/// Forms of discriminant `D` inside `bx`, sorted by `(|a|, a, b, c)`.
///
/// For `a ≠ 0`: `|a| ≤ a_max` and `b = b₀ + 2|a|n` with `0 ≤ b₀ < 2|a|`, `|n| ≤ n_max`.
/// For `a = 0` (only when `D` is a square): `b = ±√D` and `|c| ≤ c_max`.
pub fn enumerate_forms(d: i64, bx: &EnumerationBox) -> Vec<QuadForm> {
    if !is_discriminant(d) || d.abs() > MAX_DISCRIMINANT {
        return Vec::new();
    }
    let mut out = Vec::new();
    let n_max = bx.n_max as i64;
    for a_abs in 1..=bx.a_max as i64 {
        let m = 4 * a_abs;
        for b0 in 0..2 * a_abs {
            if (b0 * b0 - d).rem_euclid(m) != 0 {
                continue;
            }
            for n in -n_max..=n_max {
                let b = b0 + 2 * a_abs * n;
                let num = b * b - d;
                out.push(QuadForm { a: a_abs, b, c: num / m });
                out.push(QuadForm { a: -a_abs, b, c: -num / m });
            }
        }
    }
    if let Some(s) = exact_sqrt(d) {
        let c_max = bx.c_max as i64;
        for b in [s, -s] {
            for c in -c_max..=c_max {
                if b != 0 || c != 0 {
                    out.push(QuadForm { a: 0, b, c });
                }
            }
        }
    }
    sort_forms(&mut out);
    out
}

/// All nonzero forms of discriminant `D` with `Q_τ² ≤ r_sq`, sorted by `(|a|, a, b, c)`.
///
/// Forms with `a > 0` satisfy `Q_τ = (a/y)(s² + y²) − D/(4ay)` with `s = x + b/(2a)`, which
/// confines `a` and `s`; forms with `a < 0` are the negatives of those with `a > 0`.
pub fn enumerate_region(d: i64, tau: &HPoint, r_sq: f64) -> Result<Vec<QuadForm>> {
    enumerate_region_limited(d, tau, r_sq, usize::MAX)
        .map(|f| f.expect("unlimited enumeration"))
}

/// As [`enumerate_region`], returning `None` once more than `limit` forms are found.
pub(crate) fn enumerate_region_limited(
    d: i64,
    tau: &HPoint,
    r_sq: f64,
    limit: usize,
) -> Result<Option<Vec<QuadForm>>> {
    check_range(d)?;
    if !is_discriminant(d) || r_sq < 0.0 {
        return Ok(Some(Vec::new()));
    }
    let (x, y) = (tau.re, tau.im);
    let sr = r_sq.sqrt();
    let df = d as f64;
    let mut out = Vec::new();
    let inside = |q: &QuadForm| {
        let t = q_tau(q, tau);
        t * t <= r_sq
    };
    if r_sq + df >= 0.0 {
        let a_hi = ((sr + (r_sq + df).sqrt()) / (2.0 * y)).floor() as i64 + 1;
        let mut roots = SqrtMod::new(d, a_hi as u64);
        for a in 1..=a_hi {
            let af = a as f64;
            let s2 = y * sr / af + df / (4.0 * af * af) - y * y;
            if s2 < 0.0 {
                continue;
            }
            let sig = s2.sqrt() * (1.0 + 1e-12) + 1e-12;
            let lo = (2.0 * af * (-sig - x)).ceil() as i64;
            let hi = (2.0 * af * (sig - x)).floor() as i64;
            let m = 4 * a;
            let period = 2 * a;
            for r in roots.roots_for(a as u64) {
                let r = r as i64;
                let mut b = r + period * (lo - r).div_euclid(period);
                if b < lo {
                    b += period;
                }
                while b <= hi {
                    let q = QuadForm { a, b, c: (b * b - d) / m };
                    if inside(&q) {
                        out.push(q);
                        out.push(q.neg());
                        if out.len() > limit {
                            return Ok(None);
                        }
                    }
                    b += period;
                }
            }
        }
    }
    if let Some(s) = exact_sqrt(d) {
        let bs: &[i64] = if s == 0 { &[0] } else { &[s, -s] };
        for &b in bs {
            let centre = -(b as f64) * x;
            let lo = (centre - y * sr).ceil() as i64 - 1;
            let hi = (centre + y * sr).floor() as i64 + 1;
            for c in lo..=hi {
                if b == 0 && c == 0 {
                    continue;
                }
                let q = QuadForm { a: 0, b, c };
                if inside(&q) {
                    out.push(q);
                    if out.len() > limit {
                        return Ok(None);
                    }
                }
            }
        }
    }
    sort_forms(&mut out);
    Ok(Some(out))
}

/// `D·sinh²(d(τ, τ₀))`: every form whose geodesic separates `τ` and `τ₀` has `Q_τ²`
/// below this value (`|Q_τ|/√D` is the hyperbolic sine of the distance from `τ` to the
/// geodesic). Zero for `D ≤ 0`, where no geodesics exist.
pub fn mismatch_radius_sq(d: i64, tau: &HPoint, tau0: &HPoint) -> f64 {
    if d <= 0 {
        return 0.0;
    }
    let ch = tau.cosh_distance(tau0);
    (d as f64) * (ch * ch - 1.0) * (1.0 + 1e-9) + 1e-9
}

/// Forms kept by an adaptive truncation together with the certified omitted mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub d: i64,
    pub forms: Vec<QuadForm>,
    /// Forms with `Q_τ² ≤ radius_sq` are kept.
    pub radius_sq: f64,
    pub tail_bound: f64,
}

impl Truncation {
    /// Smallest box containing the kept forms.
    pub fn bounding_box(&self) -> EnumerationBox {
        let mut bx = EnumerationBox { a_max: 1, n_max: 1, c_max: 1 };
        for q in &self.forms {
            if q.a == 0 {
                bx.c_max = bx.c_max.max(q.c.unsigned_abs() as u32);
            } else {
                let n = q.b.div_euclid(2 * q.a.abs());
                bx.a_max = bx.a_max.max(q.a.unsigned_abs() as u32);
                bx.n_max = bx.n_max.max(n.unsigned_abs() as u32);
            }
        }
        bx
    }

    /// Auto-sizes `R` by doubling until the tail of `maj` beyond `|Q_τ| = √R` is below
    /// `target`; `R` starts at `max(r_min_sq, (a_max·y)², 1)`.
    pub fn build(
        d: i64,
        tau: &HPoint,
        maj: &Majorant,
        target: f64,
        r_min_sq: f64,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        check_range(d)?;
        if !is_discriminant(d) {
            return Ok(Truncation { d, forms: Vec::new(), radius_sq: 0.0, tail_bound: 0.0 });
        }
        let a_min = policy.bx.a_max as f64 * tau.im;
        let mut r_sq = r_min_sq.max(a_min * a_min).max(1.0);
        let mut prev: Option<(f64, f64)> = None;
        loop {
            let tail = tail_bound(d, tau, r_sq.sqrt(), maj);
            if tail <= target {
                return match enumerate_region_limited(d, tau, r_sq, policy.max_forms)? {
                    Some(forms) => Ok(Truncation { d, forms, radius_sq: r_sq, tail_bound: tail }),
                    None => Err(Error::TailNotAchievable { target, achieved: tail }),
                };
            }
            if r_sq >= policy.max_radius_sq {
                return Err(Error::TailNotAchievable { target, achieved: tail });
            }
            // secant step in log–log coordinates, between doubling and ×10⁴
            let mut factor = 2.0;
            if let Some((r_prev, t_prev)) = prev {
                let slope = (tail / t_prev).ln() / (r_sq / r_prev).ln();
                if slope < 0.0 && slope.is_finite() {
                    factor = ((target / tail).ln() / slope).exp().clamp(2.0, 1e4) * 1.05;
                }
            }
            prev = Some((r_sq, tail));
            r_sq = (r_sq * factor).min(policy.max_radius_sq);
        }
    }
}

/// Forms of discriminant `D` for the `G_D`-type sum at `(τ, v)` in weight `k`, in a
/// region sized so that the omitted terms, each bounded by `|Q(τ,1)|^{k−1} e^{−4πQ_τ²v}`
/// (which carries `e^{−4π|D|v}` for `D < 0` because `Q_τ² ≥ |D|`), sum to at most
/// `policy.tail_target`.
pub fn enumerate_with_tail(
    d: i64,
    tau: &HPoint,
    v: f64,
    k: Weight,
    policy: &TruncationPolicy,
) -> Result<(Vec<QuadForm>, f64)> {
    if !(v > 0.0) {
        return Err(Error::Domain { name: "v", value: v, domain: "(0, ∞)" });
    }
    let maj = gaussian_majorant(d, tau, v, k);
    let t = Truncation::build(d, tau, &maj, policy.tail_target, 0.0, policy)?;
    Ok((t.forms, t.tail_bound))
}

pub(crate) fn gaussian_majorant(d: i64, tau: &HPoint, v: f64, k: Weight) -> Majorant {
    let term = MajorantTerm::Gaussian {
        c: 1.0,
        d: d as f64,
        y: tau.im,
        m: (k.k() - 1) as f64,
        j: 0.0,
        alpha: 4.0 * std::f64::consts::PI * v,
    };
    Majorant::new(vec![term], k.as_f64())
}
