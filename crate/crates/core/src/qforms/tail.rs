//! Explicit bounds for the omitted part of a lattice sum over `𝒬_D`.
//!
//! Every series summand is bounded by a function `H(|Q_τ|)` of `|Q_τ|` alone. For `a > 0`
//! write `s = x + b/(2a)`; then `Q_τ = (a/y)(s² + y²) − D/(4ay)` and the admissible `b`
//! split into classes `b ≡ b₀ (mod 2a)` with `b₀² ≡ D (mod 4a)`, each class being a
//! unit-spaced progression in `s`. The bound sums, per class, a nonincreasing envelope of
//! `H` over the progression (first point plus integral), and closes the sum over `a` with
//! a power-law envelope and an explicit count of classes.
//!
//! Class count `ρ(a) = N(4a)/2` where `N(m) = #{x mod m : x² ≡ D}` is multiplicative:
//! for odd `p ∤ D`, `N(p^e) = 1 + (D/p)`; for odd `p | D`, `N(p^e) ≤ 2p^{⌊min(e,v_p(D))/2⌋}`;
//! for `p = 2` and odd `D`, `N(2^e)` is exact; for even `D`, `N(2^e) ≤ 4·2^{⌊min(e,v₂(D))/2⌋}`.
//! Hence `ρ(a) ≤ 2 s_D d(a)` for `D ≠ 0`, with `s_D²` the largest square dividing `D` and
//! `d(a)` the divisor count, and `ρ(a) ≤ √a` for `D = 0`.

use super::sqrtmod::Sieve;
use crate::specfun::{beta_half_family, psi_k_raw};

use super::HPoint;

/// One nonnegative bound `H(q)` for `|summand|` as a function of `q = |Q_τ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MajorantTerm {
    /// `(2/β)(y²(q² + D))^{(k−1)/2} ψ_k(D/(D + q²))`, exact for `F_D`, `D > 0`.
    LocallyHarmonic { d: f64, y: f64, k: i32 },
    /// `D^{k−1/2}(y²(q² + D))^{−k/2}`, exact for `f_D`, `D > 0`.
    CuspForm { d: f64, y: f64, k: i32 },
    /// `c (y²(q² + D))^{m/2} q^j e^{−αq²}`; covers `G_D`, `Ψ₁`, `Θ`, `Θ*`.
    Gaussian { c: f64, d: f64, y: f64, m: f64, j: f64, alpha: f64 },
}

impl MajorantTerm {
    /// `H(q)`.
    pub fn value(&self, q: f64) -> f64 {
        match *self {
            MajorantTerm::LocallyHarmonic { d, y, k } => {
                let u = d / (d + q * q);
                let psi = psi_k_raw(u, k).unwrap_or(0.0);
                2.0 / beta_half_family(k) * (y * y * (q * q + d)).powf(0.5 * (k - 1) as f64) * psi
            }
            MajorantTerm::CuspForm { d, y, k } => {
                d.powf(k as f64 - 0.5) * (y * y * (q * q + d)).powf(-0.5 * k as f64)
            }
            MajorantTerm::Gaussian { c, d, y, m, j, alpha } => {
                let base = (y * y * (q * q + d)).max(0.0);
                let qj = if j == 0.0 { 1.0 } else { q.powf(j) };
                c * base.powf(0.5 * m) * qj * (-alpha * q * q).exp()
            }
        }
    }

    /// Smallest `q` a form of discriminant `D` can have.
    fn q_floor(&self) -> f64 {
        match *self {
            MajorantTerm::Gaussian { d, .. } if d < 0.0 => (-d).sqrt(),
            _ => 0.0,
        }
    }

    /// Location of the maximum of `q^p H(q)` over `q ≥ q_floor` (Gaussian terms only;
    /// the logarithmic derivative changes sign once, see the module notes).
    fn gaussian_peak(&self, p: f64) -> f64 {
        let MajorantTerm::Gaussian { d, m, j, alpha, .. } = *self else {
            return 0.0;
        };
        // g(s) = m s/(s + D) + j + p − 2αs with s = q², decreasing past its root
        let g = |s: f64| {
            let ratio = if s + d > 0.0 { s / (s + d) } else { f64::INFINITY };
            m * ratio + j + p - 2.0 * alpha * s
        };
        let mut lo = (-d).max(0.0);
        if g(lo + 1e-300) <= 0.0 && d >= 0.0 {
            return lo.sqrt();
        }
        let mut hi = lo.max(1.0);
        while g(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi.sqrt()
    }

    /// Nonincreasing envelope `H̄(q) = sup_{t ≥ max(q, q_floor)} H(t)`.
    pub fn envelope(&self, q: f64) -> f64 {
        match self {
            MajorantTerm::Gaussian { .. } => {
                let peak = self.gaussian_peak(0.0).max(self.q_floor());
                self.value(q.max(peak))
            }
            _ => self.value(q),
        }
    }

    /// `K` with `H̄(q) ≤ K q^{−p}` for all `q ≥ q_env`.
    pub fn power_constant(&self, q_env: f64, p: f64) -> f64 {
        match *self {
            MajorantTerm::LocallyHarmonic { d, y, k } => {
                // ψ_k(u) ≤ u^{k−1/2}(1 − u)^{−1/2}/(2k − 1) gives H ≤ K (q² + D)^{−(k−1)/2}/q
                let kf = k as f64;
                let big = 2.0 / beta_half_family(k) * y.powf(kf - 1.0) * d.powf(kf - 0.5)
                    / (2.0 * kf - 1.0);
                if p <= kf {
                    big * q_env.powf(p - kf)
                } else {
                    f64::INFINITY
                }
            }
            MajorantTerm::CuspForm { d, y, k } => {
                let kf = k as f64;
                if p == kf {
                    d.powf(kf - 0.5) * y.powf(-kf)
                } else {
                    f64::INFINITY
                }
            }
            MajorantTerm::Gaussian { .. } => {
                let q = q_env.max(self.gaussian_peak(p)).max(self.q_floor());
                q.powf(p) * self.value(q)
            }
        }
    }
}

/// Sum of majorant terms together with the decay exponent used for the far range.
#[derive(Debug, Clone, PartialEq)]
pub struct Majorant {
    terms: Vec<MajorantTerm>,
    peaks: Vec<f64>,
    exponent: f64,
}

impl Majorant {
    /// `exponent` is the `p` of the power-law envelope `K q^{−p}` and must exceed `3/2`.
    pub fn new(terms: Vec<MajorantTerm>, exponent: f64) -> Self {
        let peaks = terms
            .iter()
            .map(|t| match t {
                MajorantTerm::Gaussian { .. } => t.gaussian_peak(0.0).max(t.q_floor()),
                _ => 0.0,
            })
            .collect();
        Self { terms, peaks, exponent }
    }

    pub fn terms(&self) -> &[MajorantTerm] {
        &self.terms
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `Σ H̄_i(q)`, nonincreasing in `q`.
    pub fn envelope(&self, q: f64) -> f64 {
        self.terms.iter().zip(&self.peaks).map(|(t, &pk)| t.value(q.max(pk))).sum()
    }

    pub fn power_constant(&self, q_env: f64) -> f64 {
        self.terms.iter().map(|t| t.power_constant(q_env, self.exponent)).sum()
    }
}

/// `∫_q^∞ H̄` tabulated on a geometric grid; lookups round `q` down to a node, which
/// overestimates because the integral is nonincreasing in `q`.
struct TailTable {
    q0: f64,
    ratio_ln: f64,
    values: Vec<f64>,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

impl TailTable {
    fn build(maj: &Majorant, q0: f64) -> Self {
        let ratio: f64 = 1.03;
        let p = maj.exponent;
        let mut nodes = vec![q0];
        let mut q_hi = q0;
        loop {
            q_hi *= ratio;
            nodes.push(q_hi);
            if q_hi > 1e3 * q0.max(1.0) {
                let far = maj.power_constant(q_hi) * q_hi.powf(1.0 - p) / (p - 1.0);
                if far <= 1e-30 || q_hi > 1e12 * q0.max(1.0) {
                    break;
                }
            }
        }
        let mut values = vec![0.0; nodes.len()];
        let last = *nodes.last().expect("nonempty");
        values[nodes.len() - 1] = maj.power_constant(last) * last.powf(1.0 - p) / (p - 1.0);
        for i in (0..nodes.len() - 1).rev() {
            let (lo, hi) = (nodes[i], nodes[i + 1]);
            let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let panel: f64 = GL5.iter().map(|(x, w)| w * maj.envelope(c + h * x)).sum::<f64>() * h;
            // Gauss–Legendre on a smooth decreasing integrand; the factor covers its error
            values[i] = values[i + 1] + panel * (1.0 + 1e-6);
        }
        Self { q0, ratio_ln: ratio.ln(), values }
    }

    fn lookup(&self, q: f64, maj: &Majorant) -> f64 {
        if q < self.q0 {
            return self.values[0] + (self.q0 - q) * maj.envelope(q);
        }
        let idx = ((q / self.q0).ln() / self.ratio_ln).floor() as usize;
        self.values[idx.min(self.values.len() - 1)]
    }
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn valuation(mut n: i64, p: i64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Largest `s` with `s² | D` (`D ≠ 0`).
fn square_part_root(d: i64) -> u64 {
    let mut m = d.unsigned_abs();
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        while m % (p * p) == 0 {
            m /= p * p;
            s *= p;
        }
        while m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    s
}

/// Upper bound on `ρ(a) = #{b₀ mod 2a : b₀² ≡ D (mod 4a)}`, exact when `gcd(a, D) = 1`.
pub fn rho_bound(a: u64, d: i64) -> f64 {
    let mut factors = Vec::new();
    let mut m = a;
    let mut p = 2u64;
    while m > 1 {
        if p * p > m {
            p = m;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    rho_from_factors(a, &factors, d)
}

/// `rho_bound` from the factorisation of `a`.
fn rho_from_factors(a: u64, factors: &[(u64, u32)], d: i64) -> f64 {
    if d.rem_euclid(4) > 1 {
        return 0.0;
    }
    let twos = match factors.first() {
        Some(&(2, e)) => e,
        _ => 0,
    };
    let mut count = 1.0;
    let odd = factors.iter().filter(|f| f.0 != 2);
    for (p, e) in std::iter::once((2u64, twos + 2)).chain(odd.copied()) {
        let v = valuation(d, p as i64);
        let n = if p == 2 {
            if v == 0 {
                // D ≡ 1 (mod 4)
                match e {
                    1 => 1.0,
                    2 => 2.0,
                    _ => {
                        if d.rem_euclid(8) == 1 {
                            4.0
                        } else {
                            0.0
                        }
                    }
                }
            } else {
                4.0 * 2f64.powi((e.min(v) / 2) as i32)
            }
        } else if v == 0 {
            let r = d.rem_euclid(p as i64) as u64;
            if mod_pow(r, (p - 1) / 2, p) == 1 {
                2.0
            } else {
                0.0
            }
        } else {
            2.0 * (p as f64).powi((e.min(v) / 2) as i32)
        };
        count *= n;
        if count == 0.0 {
            return 0.0;
        }
    }
    (count / 2.0).min(2.0 * a as f64)
}

/// Upper bound for `Σ |summand|` over all nonzero `Q ∈ 𝒬_D` with `|Q_τ| ≥ r0`, where the
/// summand is bounded by `maj` as a function of `|Q_τ|`.
pub fn tail_bound(d: i64, tau: &HPoint, r0: f64, maj: &Majorant) -> f64 {
    if d.rem_euclid(4) > 1 || maj.terms.is_empty() {
        return 0.0;
    }
    let y = tau.im;
    let df = d as f64;
    let p = maj.exponent;
    let table = TailTable::build(maj, r0.max(1e-3));
    let big_t = |q: f64| table.lookup(q, maj);
    let hbar = |q: f64| maj.envelope(q);

    let mut total = 0.0;

    // a = 0: D = b², forms [0, ±b, c]
    if d >= 0 {
        let b = (d as f64).sqrt().round() as i64;
        if b * b == d {
            if b == 0 {
                let r1 = r0.max(1.0 / y);
                total += 2.0 * (hbar(r1) + y * big_t(r1));
            } else {
                total += 2.0 * 2.0 * (hbar(r0) + y * big_t(r0));
            }
        }
    }

    // a ≥ 1, counted twice for ±a
    let j_p = crate::specfun::SQRT_PI * libm::tgamma(p - 0.5) / (2.0 * libm::tgamma(p));
    let a_cond = {
        let c1 = (r0 / y).ceil() + 1.0;
        let c2 = (df.max(0.0) / (2.0 * y * y)).sqrt().ceil() + 1.0;
        let c3 = ((r0 + (r0 * r0 + df.max(0.0)).sqrt()) / (2.0 * y)).ceil() + 1.0;
        c1.max(c2).max(c3) as u64
    };
    let s_d = square_part_root(d) as f64;
    // Σ_{a>A} ρ(a) G a^{−p} with ρ(a) ≤ 2 s_D d(a) (D ≠ 0), Σ_{a≤t} d(a) ≤ t(ln t + 1),
    // and partial summation; ρ(a) ≤ √a for D = 0
    // for a ≥ a_exp, Q_τ ≥ θ(a/y)(s² + y²) with θ = 1 − D⁺/(4a_exp²y²) ≥ 1/2
    let remainder = |a_exp: u64| -> f64 {
        let af = a_exp as f64;
        let theta = 1.0 - df.max(0.0) / (4.0 * af * af * y * y);
        let k = maj.power_constant(theta * af * y);
        let g = 4.0 * k * (y / theta).powf(p) * (y.powf(-2.0 * p) + j_p * y.powf(1.0 - 2.0 * p));
        if d == 0 {
            g * af.powf(1.5 - p) / (p - 1.5)
        } else {
            let s = p - 1.0;
            g * 2.0 * s_d * p * af.powf(1.0 - p) * ((af.ln() + 1.0) / s + 1.0 / (s * s))
        }
    };
    let mut sieve = Sieve::new(a_cond.saturating_mul(4).min(1 << 22));
    let mut a: u64 = 0;
    loop {
        a += 1;
        let af = a as f64;
        let rho = rho_from_factors(a, &sieve.factor(a), d);
        if rho > 0.0 {
            let q_at = |s: f64| (af / y) * (s * s + y * y) - df / (4.0 * af * y);
            let sp2 = y * r0 / af + df / (4.0 * af * af) - y * y;
            let sp = sp2.max(0.0).sqrt();
            let plus = 4.0 * hbar(q_at(sp)) + 2.0 * y / (2.0 * af * (sp + 1.0)) * big_t(q_at(sp + 1.0));
            let sm2 = -y * r0 / af + df / (4.0 * af * af) - y * y;
            let minus = if sm2 >= 0.0 { (2.0 * sm2.sqrt() + 1.0) * hbar(r0) } else { 0.0 };
            total += 2.0 * rho * (plus + minus);
        }
        if a >= a_cond {
            let rem = remainder(a);
            if rem <= 1e-2 * total || rem < 1e-300 || a >= 50_000_000 {
                return total + rem;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho_exact(a: u64, d: i64) -> f64 {
        let m = 4 * a as i64;
        (0..2 * a as i64).filter(|b| (b * b - d).rem_euclid(m) == 0).count() as f64
    }

    #[test]
    fn rho_bound_dominates_exact_count() {
        for d in -60..=60 {
            for a in 1..=120u64 {
                let exact = rho_exact(a, d);
                let bound = rho_bound(a, d);
                assert!(bound >= exact, "a={a} D={d}: {bound} < {exact}");
                if num_gcd(4 * a as i64, d) == 1 {
                    assert_eq!(bound, exact, "a={a} D={d}");
                }
                let global = if d == 0 {
                    (a as f64).sqrt()
                } else {
                    let divisors = (1..=a).filter(|m| a % m == 0).count() as f64;
                    2.0 * square_part_root(d) as f64 * divisors
                };
                assert!(exact <= global, "a={a} D={d}");
            }
        }
    }

    fn num_gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }

    #[test]
    fn gaussian_envelope_is_nonincreasing_and_dominates() {
        let t = MajorantTerm::Gaussian { c: 1.0, d: 5.0, y: 1.3, m: 3.0, j: 1.0, alpha: 4.0 };
        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let q = i as f64 * 0.01;
            let e = t.envelope(q);
            assert!(e <= prev * (1.0 + 1e-14));
            assert!(e >= t.value(q) * (1.0 - 1e-14));
            prev = e;
        }
        let k = t.power_constant(0.5, 4.0);
        for i in 50..1000 {
            let q = i as f64 * 0.01;
            assert!(t.envelope(q) <= k * q.powi(-4) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn locally_harmonic_power_law() {
        let t = MajorantTerm::LocallyHarmonic { d: 5.0, y: 1.2, k: 4 };
        let k = t.power_constant(1.0, 4.0);
        let mut prev = f64::INFINITY;
        for i in 1..2000 {
            let q = i as f64 * 0.05;
            let v = t.value(q);
            assert!(v <= prev);
            assert!(v <= k * q.powi(-4) * (1.0 + 1e-12));
            prev = v;
        }
    }
}
