//! Truncated double sums `Σ_D Σ_{Q∈𝒬_D}` with frozen form sets.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qforms::{
    enumerate_region, mismatch_radius_sq, tail_bound, HPoint, Majorant, QuadForm, Truncation,
};
use crate::Complex;

use super::summand::{summand_value, Ctx, FormData, SeriesKind, Summand};
use super::SeriesParams;

/// A value with the certified bound on its omitted mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex,
    pub tail_bound: f64,
}

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex,
    comp: Complex,
}

fn two_sum(acc: f64, x: f64, comp: &mut f64) -> f64 {
    let t = acc + x;
    if acc.abs() >= x.abs() {
        *comp += (acc - t) + x;
    } else {
        *comp += (x - t) + acc;
    }
    t
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn total(&self) -> Complex {
        self.sum + self.comp
    }
}

/// `e(Dz) = e^{2πiDz}`.
pub(crate) fn e_dz(d: i64, z: &HPoint) -> Complex {
    let df = d as f64;
    Complex::from_polar((-2.0 * PI * df * z.im).exp(), 2.0 * PI * (df * z.re).rem_euclid(1.0))
}

/// The forms kept for one discriminant and the bound on what was left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub d: i64,
    pub forms: Vec<QuadForm>,
    /// Bound on `|c_D − Σ_{kept}|` at the centre point.
    pub tail_bound: f64,
}

fn union_majorant(kinds: &[SeriesKind], d: i64, y: f64, v: f64, p: &SeriesParams) -> (Majorant, Vec<Summand>) {
    let mut summands: Vec<Summand> = Vec::new();
    for k in kinds {
        for s in k.summands() {
            if !summands.contains(s) {
                summands.push(*s);
            }
        }
    }
    let terms = summands.iter().filter_map(|s| s.majorant(d, y, v, p.k)).collect();
    (Majorant::new(terms, p.k.as_f64()), summands)
}

impl Block {
    /// Forms for discriminant `D` at `(τ, v)` such that the omitted part of every summand
    /// of `kinds` is at most `target`. Forms whose sign changes between `τ` and `τ₀` are
    /// always kept when a summand depends on `τ₀`.
    pub fn build(
        d: i64,
        tau: &HPoint,
        v: f64,
        kinds: &[SeriesKind],
        p: &SeriesParams,
        target: f64,
    ) -> Result<Block> {
        let (maj, summands) = union_majorant(kinds, d, tau.im, v, p);
        let r_min = if summands.iter().any(|s| s.uses_base_point()) {
            mismatch_radius_sq(d, tau, &p.tau0)
        } else {
            0.0
        };
        if !(target > 0.0) {
            return Err(Error::TailNotAchievable { target, achieved: f64::NAN });
        }
        let t = Truncation::build(d, tau, &maj, target, r_min, &p.policy)?;
        Ok(Block { d, forms: t.forms, tail_bound: t.tail_bound })
    }

    /// Bound on `|c_D(τ, v)|` for the sum of the summands of `kinds`.
    pub fn total_bound(d: i64, tau: &HPoint, v: f64, kinds: &[SeriesKind], p: &SeriesParams) -> Result<f64> {
        if d.rem_euclid(4) > 1 {
            return Ok(0.0);
        }
        let (maj, summands) = union_majorant(kinds, d, tau.im, v, p);
        let mut bound = if maj.terms().is_empty() { 0.0 } else { tail_bound(d, tau, 0.0, &maj) };
        if summands.iter().any(|s| s.uses_base_point()) && d > 0 {
            let r = mismatch_radius_sq(d, tau, &p.tau0);
            for q in enumerate_region(d, tau, r)? {
                let f = FormData::new(&q, tau, &p.tau0);
                if f.mismatched() {
                    bound += summands.iter().map(|s| s.mismatch_bound(&f, p.k)).sum::<f64>();
                }
            }
        }
        Ok(bound)
    }
}

/// A series frozen at a centre point: `D`-range, forms per `D`, and tail certificate.
#[derive(Debug, Clone)]
pub struct SeriesEvaluator {
    kind: SeriesKind,
    params: SeriesParams,
    centre: HPoint,
    v: f64,
    blocks: Vec<Block>,
    index: BTreeMap<i64, usize>,
    d_tail: f64,
    tail: f64,
}

fn log_abs_e(d: i64, v: f64) -> f64 {
    -2.0 * PI * d as f64 * v
}

impl SeriesEvaluator {
    /// Freezes `kind` at `(τ, z)` with total omitted mass at most `policy.tail_target`:
    /// half for the `D`-range cutoff, half shared equally by the kept `D`.
    pub fn new(kind: SeriesKind, params: SeriesParams, tau: HPoint, z: HPoint) -> Result<Self> {
        let v = z.im;
        let target = params.policy.tail_target;
        let kinds = [kind];
        let bound = |d: i64| Block::total_bound(d, &tau, v, &kinds, &params);

        let d_max = params.policy.d_max as i64;
        let cap = params.policy.max_abs_d as i64;
        let (d_hi, tail_hi) = cutoff(1, d_max, cap, v, target / 4.0, &bound)?;
        let (d_lo, tail_lo) = if kind.has_negative() {
            let (d, t) = cutoff(-1, d_max, cap, v, target / 4.0, &bound)?;
            (-d, t)
        } else {
            (1, 0.0)
        };
        let ds: Vec<i64> = (d_lo..=d_hi).filter(|d| d.rem_euclid(4) <= 1).collect();
        let share_ln = (0.5 * target / ds.len().max(1) as f64).ln();
        let kept = AtomicUsize::new(0);

        let blocks: Vec<Block> = ds
            .par_iter()
            .map(|&d| -> Result<Block> {
                let m = bound(d)?;
                let le = log_abs_e(d, v);
                if m == 0.0 || m.ln() + le <= share_ln {
                    return Ok(Block { d, forms: Vec::new(), tail_bound: m });
                }
                let block = Block::build(d, &tau, v, &kinds, &params, (share_ln - le).exp())?;
                let total = kept.fetch_add(block.forms.len(), Ordering::Relaxed) + block.forms.len();
                if total > params.policy.max_forms {
                    return Err(Error::TailNotAchievable { target, achieved: f64::INFINITY });
                }
                Ok(block)
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_blocks(kind, params, tau, v, blocks, tail_hi + tail_lo))
    }

    /// Blocks for the listed `D` only, shared by all `kinds`, each with coefficient tail at
    /// most `policy.tail_target` at `(τ, v_ref)`. Used where coefficients rather than values
    /// are needed; the `D`-tail is not certified (`d_tail = ∞` unless the list is all of it).
    pub fn for_coefficients(
        kinds: &[SeriesKind],
        params: SeriesParams,
        tau: HPoint,
        v_ref: f64,
        d_list: &[i64],
    ) -> Result<Self> {
        let kind = *kinds.first().ok_or_else(|| Error::Invalid("no series kind given".into()))?;
        let mut ds: Vec<i64> = d_list.iter().copied().filter(|d| d.rem_euclid(4) <= 1).collect();
        ds.sort_unstable();
        ds.dedup();
        let target = params.policy.tail_target;
        let blocks: Vec<Block> = ds
            .par_iter()
            .map(|&d| Block::build(d, &tau, v_ref, kinds, &params, target))
            .collect::<Result<_>>()?;
        let mut ev = Self::from_blocks(kind, params, tau, v_ref, blocks, f64::INFINITY);
        ev.tail = ev.blocks.iter().map(|b| b.tail_bound).fold(0.0, f64::max);
        Ok(ev)
    }

    /// Assembles an evaluator from prepared blocks; `d_tail` bounds the omitted `D`.
    pub fn from_blocks(
        kind: SeriesKind,
        params: SeriesParams,
        centre: HPoint,
        v: f64,
        blocks: Vec<Block>,
        d_tail: f64,
    ) -> Self {
        let index = blocks.iter().enumerate().map(|(i, b)| (b.d, i)).collect();
        let tail = d_tail
            + blocks
                .iter()
                .map(|b| if b.tail_bound == 0.0 { 0.0 } else { (b.tail_bound.ln() + log_abs_e(b.d, v)).exp() })
                .sum::<f64>();
        Self { kind, params, centre, v, blocks, index, d_tail, tail }
    }

    /// Same forms, different series (the summands must be covered by the blocks' bounds
    /// for the certificate to carry over).
    pub fn with_kind(&self, kind: SeriesKind) -> Self {
        let mut out = self.clone();
        out.kind = kind;
        out
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn params(&self) -> &SeriesParams {
        &self.params
    }

    pub fn centre(&self) -> HPoint {
        self.centre
    }

    pub fn centre_v(&self) -> f64 {
        self.v
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Smallest and largest `D` carried.
    pub fn d_range(&self) -> (i64, i64) {
        let lo = self.blocks.first().map_or(0, |b| b.d);
        let hi = self.blocks.last().map_or(0, |b| b.d);
        (lo, hi)
    }

    /// Certified bound on the omitted mass at the centre point (for evaluators from
    /// [`SeriesEvaluator::for_coefficients`], the largest per-coefficient bound).
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    pub fn d_tail(&self) -> f64 {
        self.d_tail
    }

    fn block_sum(&self, b: &Block, tau: &HPoint, ctx: &Ctx) -> Complex {
        let summands = self.kind.summands();
        let mut acc = CompensatedSum::default();
        for q in &b.forms {
            let f = FormData::new(q, tau, &self.params.tau0);
            for s in summands {
                acc.add(summand_value(*s, &f, ctx));
            }
        }
        acc.total()
    }

    /// `c_D(τ, v)` over the frozen forms.
    pub fn coefficient(&self, d: i64, tau: &HPoint, v: f64) -> Complex {
        let ctx = Ctx::new(self.params.k, v);
        match self.index.get(&d) {
            Some(&i) => self.block_sum(&self.blocks[i], tau, &ctx),
            None => Complex::new(0.0, 0.0),
        }
    }

    /// All coefficients `c_D(τ, v)` in increasing `D`.
    pub fn coefficients(&self, tau: &HPoint, v: f64) -> Vec<(i64, Complex)> {
        let ctx = Ctx::new(self.params.k, v);
        self.blocks.par_iter().map(|b| (b.d, self.block_sum(b, tau, &ctx))).collect()
    }

    /// `Σ_D c_D(τ, v) e(Dz)` over the frozen forms.
    pub fn eval(&self, tau: &HPoint, z: &HPoint) -> Complex {
        let coeffs = self.coefficients(tau, z.im);
        let mut acc = CompensatedSum::default();
        for (d, c) in coeffs {
            if c != Complex::new(0.0, 0.0) {
                acc.add(c * e_dz(d, z));
            }
        }
        acc.total()
    }
}

/// Smallest cutoff `n ≥ n_min` in direction `sign` such that the bounds for `|D| > n`
/// sum to at most `target`. Terms are summed until they are negligible and a geometric
/// remainder is added from the last observed ratio.
fn cutoff<F>(sign: i64, n_min: i64, cap: i64, v: f64, target: f64, bound: &F) -> Result<(i64, f64)>
where
    F: Fn(i64) -> Result<f64> + Sync,
{
    let mut terms: Vec<f64> = Vec::new();
    let mut n = n_min;
    let chunk = 8;
    loop {
        let batch: Vec<f64> = (n + 1..=n + chunk)
            .into_par_iter()
            .map(|m| -> Result<f64> {
                let d = sign * m;
                let b = bound(d)?;
                Ok(if b == 0.0 { 0.0 } else { (b.ln() + log_abs_e(d, v)).exp() })
            })
            .collect::<Result<_>>()?;
        terms.extend(batch);
        n += chunk;
        let tail: Vec<f64> = terms.iter().rev().copied().filter(|t| *t > 0.0).take(8).collect();
        if tail.is_empty() && terms.len() >= 16 {
            return Ok((n_min, 0.0));
        }
        let last = tail.first().copied().unwrap_or(0.0);
        let negligible = last <= 1e-6 * target;
        // four consecutive zeros after nonzero terms: the bounds underflowed
        let underflowed = terms.len() >= 4 && terms[terms.len() - 4..].iter().all(|t| *t == 0.0);
        let ratio = if underflowed {
            0.0
        } else if tail.len() >= 5 {
            (tail[0] / tail[4]).powf(0.25)
        } else {
            1.0
        };
        if negligible && ratio < 0.999 {
            let remainder = last * ratio / (1.0 - ratio);
            let mut suffix = remainder;
            let mut cut = n;
            for (i, t) in terms.iter().enumerate().rev() {
                if suffix + t > target {
                    break;
                }
                suffix += t;
                cut = n_min + i as i64;
            }
            let total: f64 = terms[(cut - n_min) as usize..].iter().sum::<f64>() + remainder;
            return Ok((cut, total));
        }
        if n > cap {
            return Err(Error::TailNotAchievable { target, achieved: terms.iter().sum() });
        }
    }
}

/// Series in `z` with integer frequencies, as far as coefficient extraction is concerned.
pub trait ZSeries: Sync {
    fn eval_z(&self, z: &HPoint) -> Complex;

    /// Largest `|D|` present.
    fn frequency_bound(&self) -> i64;

    /// `c_D(v)`; defaults to discrete Fourier extraction.
    fn coefficient_at(&self, d: i64, v: f64) -> Result<Complex> {
        let m = (4 * self.frequency_bound()).max(8) as usize + 1;
        extract_coeff(|z| self.eval_z(z), d, v, m, self.frequency_bound())
    }

    /// All nonzero `c_D(v)`; defaults to one discrete Fourier transform of `M > 2F` samples.
    fn coefficients_at(&self, v: f64) -> Result<Vec<(i64, Complex)>> {
        let f = self.frequency_bound();
        let m = (2 * f + 1) as usize;
        let vals: Vec<Complex> = (0..m)
            .into_par_iter()
            .map(|j| self.eval_z(&HPoint { re: j as f64 / m as f64, im: v }))
            .collect();
        let out = (-f..=f)
            .filter(|d| d.rem_euclid(4) <= 1)
            .map(|d| {
                let mut acc = CompensatedSum::default();
                for (j, x) in vals.iter().enumerate() {
                    let phase = -2.0 * PI * ((d * j as i64).rem_euclid(m as i64)) as f64 / m as f64;
                    acc.add(*x * Complex::from_polar(1.0, phase));
                }
                (d, acc.total() / m as f64 * (2.0 * PI * d as f64 * v).exp())
            })
            .collect();
        Ok(out)
    }

    /// Weight, policy and base point the series was built with, where meaningful.
    fn meta(&self) -> SeriesParams {
        SeriesParams::default()
    }
}

impl ZSeries for SeriesEvaluator {
    fn eval_z(&self, z: &HPoint) -> Complex {
        self.eval(&self.centre, z)
    }

    fn frequency_bound(&self) -> i64 {
        let (lo, hi) = self.d_range();
        lo.abs().max(hi.abs())
    }

    fn coefficient_at(&self, d: i64, v: f64) -> Result<Complex> {
        Ok(self.coefficient(d, &self.centre, v))
    }

    fn coefficients_at(&self, v: f64) -> Result<Vec<(i64, Complex)>> {
        Ok(self.coefficients(&self.centre, v))
    }

    fn meta(&self) -> SeriesParams {
        self.params
    }
}

/// `c_D(v) = e^{2πDv} (1/M) Σ_j f(j/M + iv) e(−Dj/M)`, the trapezoidal rule on `u ∈ [0, 1)`,
/// exact for trigonometric polynomials whose frequencies differ by less than `M`.
pub fn extract_coeff<F>(f: F, d: i64, v: f64, samples: usize, max_frequency: i64) -> Result<Complex>
where
    F: Fn(&HPoint) -> Complex + Sync,
{
    if samples as i64 <= 2 * max_frequency.max(d.abs()) {
        return Err(Error::Aliasing { max_frequency, samples });
    }
    let m = samples as f64;
    let vals: Vec<Complex> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let u = j as f64 / m;
            let phase = -2.0 * PI * ((d * j as i64).rem_euclid(samples as i64)) as f64 / m;
            f(&HPoint { re: u, im: v }) * Complex::from_polar(1.0, phase)
        })
        .collect();
    let mut acc = CompensatedSum::default();
    for x in vals {
        acc.add(x);
    }
    Ok(acc.total() / m * (2.0 * PI * d as f64 * v).exp())
}

/// Fourier coefficients indexed by `D`, restricted to `D ≡ 0, 1 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffSeries {
    pub entries: BTreeMap<i64, Complex>,
    /// `v` at which `v`-dependent coefficients were sampled, if any.
    pub v: Option<f64>,
    pub meta: SeriesParams,
}

impl FourierCoeffSeries {
    pub fn new(meta: SeriesParams, v: Option<f64>) -> Self {
        Self { entries: BTreeMap::new(), v, meta }
    }

    pub fn insert(&mut self, d: i64, c: Complex) -> Result<()> {
        if d.rem_euclid(4) > 1 {
            return Err(Error::Invalid(format!("D = {d} violates D ≡ 0, 1 (mod 4)")));
        }
        if d < -(self.meta.policy.max_abs_d as i64) {
            return Err(Error::DiscriminantRange(d));
        }
        self.entries.insert(d, c);
        Ok(())
    }

    pub fn get(&self, d: i64) -> Complex {
        self.entries.get(&d).copied().unwrap_or_default()
    }

    /// `Σ_D c_D e(Dz)` with constant coefficients.
    pub fn eval(&self, z: &HPoint) -> Complex {
        let mut acc = CompensatedSum::default();
        for (&d, &c) in &self.entries {
            acc.add(c * e_dz(d, z));
        }
        acc.total()
    }
}

impl ZSeries for FourierCoeffSeries {
    fn eval_z(&self, z: &HPoint) -> Complex {
        self.eval(z)
    }

    fn frequency_bound(&self) -> i64 {
        self.entries.keys().map(|d| d.abs()).max().unwrap_or(0)
    }

    fn coefficient_at(&self, d: i64, _v: f64) -> Result<Complex> {
        Ok(self.get(d))
    }

    fn coefficients_at(&self, _v: f64) -> Result<Vec<(i64, Complex)>> {
        Ok(self.entries.iter().map(|(&d, &c)| (d, c)).collect())
    }

    fn meta(&self) -> SeriesParams {
        self.meta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extraction_of_single_exponential() {
        let v = 0.37;
        let f = |z: &HPoint| e_dz(5, z);
        let c5 = extract_coeff(f, 5, v, 64, 5).unwrap();
        assert!((c5 - Complex::new(1.0, 0.0)).norm() < 1e-12);
        // c_5(v) e^{−10πv} is the coefficient of e^{2πi5u}
        let raw = c5 * (-10.0 * PI * v).exp();
        assert!((raw.re - (-10.0 * PI * v).exp()).abs() < 1e-12);
        for d in [-3, 0, 1, 4, 6] {
            assert!(extract_coeff(f, d, v, 64, 5).unwrap().norm() < 1e-12);
        }
        assert!(matches!(extract_coeff(f, 5, v, 10, 5), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::default();
        acc.add(Complex::new(1e16, 0.0));
        for _ in 0..10 {
            acc.add(Complex::new(1.0, 0.0));
        }
        acc.add(Complex::new(-1e16, 0.0));
        assert_eq!(acc.total().re, 10.0);
    }
}
