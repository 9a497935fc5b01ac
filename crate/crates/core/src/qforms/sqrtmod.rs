//! Square roots of `D` modulo `4a`, for enumerating `b` with `b² ≡ D (mod 4a)`.

use std::collections::HashMap;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, (a % m) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(m as i128) as u64
}

/// Roots of `x² ≡ n (mod p)` for an odd prime `p ∤ n` (Tonelli–Shanks).
fn sqrt_mod_prime(n: u64, p: u64) -> Vec<u64> {
    let n = n % p;
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return Vec::new();
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    let mut out = vec![r, p - r];
    out.sort_unstable();
    out.dedup();
    out
}

/// Smallest-prime-factor sieve that grows on demand.
pub(crate) struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(n: u64) -> Self {
        let mut s = Self { spf: Vec::new() };
        s.rebuild(n.max(16) as usize);
        s
    }

    fn rebuild(&mut self, n: usize) {
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        self.spf = spf;
    }

    /// Prime factorisation of `n ≥ 1` as `(p, e)` in increasing `p`.
    pub fn factor(&mut self, mut n: u64) -> Vec<(u64, u32)> {
        if n as usize >= self.spf.len() {
            self.rebuild((n as usize).max(2 * self.spf.len()));
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

/// Square roots of a fixed `D` modulo `4a`.
pub(crate) struct SqrtMod {
    d: i64,
    sieve: Sieve,
    cache: HashMap<(u64, u32), Vec<u64>>,
}

impl SqrtMod {
    pub fn new(d: i64, a_max: u64) -> Self {
        Self { d, sieve: Sieve::new(a_max), cache: HashMap::new() }
    }

    fn residue(&self, m: u64) -> u64 {
        self.d.rem_euclid(m as i64) as u64
    }

    fn prime_power_roots(&mut self, p: u64, e: u32) -> Vec<u64> {
        if let Some(r) = self.cache.get(&(p, e)) {
            return r.clone();
        }
        let n = self.residue(p);
        let mut roots: Vec<u64> = if p == 2 {
            (0..2).filter(|&r| r * r % 2 == n).collect()
        } else if n == 0 {
            vec![0]
        } else {
            sqrt_mod_prime(n, p)
        };
        let mut pj = p;
        for _ in 1..e {
            let next = pj * p;
            let target = self.residue(next);
            if p != 2 && n != 0 {
                roots = roots
                    .iter()
                    .map(|&r| {
                        let f = (mul_mod(r, r, next) + next - target) % next;
                        let step = mul_mod(f / pj, inv_mod(2 * r % p, p), p);
                        (r + next - mul_mod(step, pj, next)) % next
                    })
                    .collect();
            } else {
                let mut lifted = Vec::new();
                for &r in &roots {
                    for t in 0..p {
                        let c = r + t * pj;
                        if mul_mod(c, c, next) == target {
                            lifted.push(c);
                        }
                    }
                }
                roots = lifted;
            }
            pj = next;
        }
        roots.sort_unstable();
        self.cache.insert((p, e), roots.clone());
        roots
    }

    /// Residues `b mod 2a` with `b² ≡ D (mod 4a)`, sorted.
    pub fn roots_for(&mut self, a: u64) -> Vec<u64> {
        let mut factors = self.sieve.factor(a);
        match factors.first_mut() {
            Some((2, e)) => *e += 2,
            _ => factors.insert(0, (2, 2)),
        }
        let mut acc: Vec<u64> = vec![0];
        let mut modulus = 1u64;
        for (p, e) in factors {
            let pe = p.pow(e);
            let rs = self.prime_power_roots(p, e);
            if rs.is_empty() {
                return Vec::new();
            }
            let inv = inv_mod(modulus % pe, pe);
            let next = modulus * pe;
            let mut combined = Vec::with_capacity(acc.len() * rs.len());
            for &x in &acc {
                for &r in &rs {
                    let diff = (r + pe - x % pe) % pe;
                    combined.push((x + modulus * mul_mod(diff, inv, pe)) % next);
                }
            }
            acc = combined;
            modulus = next;
        }
        let half = 2 * a;
        let mut out: Vec<u64> = acc.into_iter().map(|r| r % half).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
