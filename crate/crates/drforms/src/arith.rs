//! Characters, divisor sums, Bernoulli numbers, L-values at non-positive
//! integers, Hurwitz/Cohen class numbers and sums-of-squares counts.
//!
//! Class numbers and L-values are memoized in process-wide caches guarded by
//! `RwLock`s, so every function here may be called from several threads.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{q, qf, qi, qpow, Q};

/// Kronecker symbol `(a/n)` for arbitrary integers.
pub fn kronecker_symbol(a: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= v;
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    result * jacobi_symbol(a.rem_euclid(n), n)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi_symbol(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let (mut a, mut n) = (a.rem_euclid(n), n);
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// `(D/n)` for a discriminant `D ≡ 0, 1 mod 4`.
pub fn kronecker(d: i64, n: i64) -> Result<i32> {
    if !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant(d));
    }
    Ok(kronecker_symbol(d, n))
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: i64) -> bool {
    n >= 2 && factorize(n as u64) == vec![(n as u64, 1)]
}

/// Positive divisors in ascending order (empty for `n ≤ 0`).
pub fn divisors(n: i64) -> Vec<i64> {
    if n <= 0 {
        return Vec::new();
    }
    let mut ds = vec![1i64];
    for (p, e) in factorize(n as u64) {
        let len = ds.len();
        let mut pk = 1i64;
        for _ in 0..e {
            pk *= p as i64;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn moebius(n: i64) -> i32 {
    assert!(n >= 1, "moebius needs n >= 1");
    let f = factorize(n as u64);
    if f.iter().any(|(_, e)| *e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `σ_m(n) = Σ_{d|n} d^m` for an integer `n`; zero when `n ≤ 0`.
pub fn sigma_int(m: u32, n: i64) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| num_traits::pow(BigInt::from(d), m as usize))
        .sum()
}

/// `σ_m(x)` for rational `x`, zero unless `x` is a positive integer.
pub fn sigma(m: u32, x: &Q) -> Q {
    if !x.denom().is_one() {
        return Q::zero();
    }
    match x.numer().to_i64() {
        Some(n) if n > 0 => qi(sigma_int(m, n)),
        _ => Q::zero(),
    }
}

/// `σ_1(n)` as a machine integer, zero for `n ≤ 0`.
pub fn sigma1(n: i64) -> i64 {
    divisors(n).into_iter().sum()
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|(_, e)| *e == 1)
}

/// True for fundamental discriminants. `1` (the trivial character) counts.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// `Δ = D·f²` with `D` fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FundDecomp {
    pub disc: i64,
    pub fund: i64,
    pub cond: i64,
}

pub fn fund_decomp(disc: i64) -> Result<FundDecomp> {
    if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant(disc));
    }
    let mut f = 1i64;
    let mut core = disc.signum();
    for (p, e) in factorize(disc.unsigned_abs()) {
        let p = p as i64;
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    // core is squarefree; fix the 2-part
    let (fund, cond) = if core.rem_euclid(4) == 1 {
        (core, f)
    } else {
        (4 * core, f / 2)
    };
    debug_assert_eq!(fund * cond * cond, disc);
    Ok(FundDecomp {
        disc,
        fund,
        cond,
    })
}

/// `-N = D·f²` with `f ∈ ½ℕ`, `f = 2^e·f1`, `f1` odd, `e ≥ -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfDecomp {
    pub fund: i64,
    /// `2f` (an integer).
    pub f_twice: i64,
    pub f1: i64,
    pub e: i32,
}

impl HalfDecomp {
    pub fn f(&self) -> Q {
        qf(self.f_twice, 2)
    }
}

pub fn half_decomp(n: i64) -> Result<HalfDecomp> {
    if n <= 0 {
        return Err(Error::Domain(format!("half_decomp needs N > 0, got {n}")));
    }
    let (fund, f_twice) = if matches!((-n).rem_euclid(4), 0 | 1) {
        let fd = fund_decomp(-n)?;
        (fd.fund, 2 * fd.cond)
    } else {
        let fd = fund_decomp(-4 * n)?;
        (fd.fund, fd.cond)
    };
    let v = f_twice.trailing_zeros() as i32;
    Ok(HalfDecomp {
        fund,
        f_twice,
        f1: f_twice >> v,
        e: v - 1,
    })
}

fn bernoulli_cache() -> &'static RwLock<Vec<Q>> {
    static CACHE: OnceLock<RwLock<Vec<Q>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Q::one()]))
}

/// `B_k` with `B_1 = -1/2`.
pub fn bernoulli_number(k: usize) -> Q {
    if let Some(b) = bernoulli_cache().read().unwrap().get(k) {
        return b.clone();
    }
    let mut bs = bernoulli_cache().write().unwrap();
    while bs.len() <= k {
        let n = bs.len();
        // Σ_{j<n+1} C(n+1, j) B_j = 0
        let s: Q = (0..n)
            .map(|j| qi(binomial(BigInt::from(n + 1), BigInt::from(j))) * &bs[j])
            .sum();
        bs.push(-s / q(n as i64 + 1));
    }
    bs[k].clone()
}

/// `B_k(x) = Σ_j C(k,j) B_j x^{k-j}`.
pub fn bernoulli_poly(k: usize, x: &Q) -> Q {
    (0..=k)
        .map(|j| {
            qi(binomial(BigInt::from(k), BigInt::from(j)))
                * bernoulli_number(j)
                * num_traits::pow(x.clone(), k - j)
        })
        .sum()
}

/// `ζ(1 - 2k) = -B_{2k}/(2k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaValue {
    pub k: i64,
    pub value: Q,
}

pub fn zeta_value(k: i64) -> ZetaValue {
    assert!(k >= 1, "zeta_value needs k >= 1");
    ZetaValue {
        k,
        value: zeta_one_minus_2k(k),
    }
}

pub fn zeta_one_minus_2k(k: i64) -> Q {
    assert!(k >= 1);
    -bernoulli_number(2 * k as usize) / q(2 * k)
}

fn l_cache() -> &'static RwLock<HashMap<(i64, i64), Q>> {
    static CACHE: OnceLock<RwLock<HashMap<(i64, i64), Q>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `L(1-k, χ_D) = -B_{k,χ}/k` for a fundamental discriminant `D` (1 allowed).
pub fn l_value(k: i64, d: i64) -> Result<Q> {
    if k < 1 {
        return Err(Error::Domain(format!("l_value needs k >= 1, got {k}")));
    }
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    if let Some(v) = l_cache().read().unwrap().get(&(k, d)) {
        return Ok(v.clone());
    }
    let v = -generalized_bernoulli(k as usize, d) / q(k);
    l_cache().write().unwrap().insert((k, d), v.clone());
    Ok(v)
}

/// `B_{k,χ} = m^{k-1} Σ_{a=1}^{m} χ(a) B_k(a/m)` with `m = |D|`, expanded as
/// `Σ_j C(k,j) B_j m^{j-1} Σ_a χ(a) a^{k-j}` so the inner sums stay integral.
fn generalized_bernoulli(k: usize, d: i64) -> Q {
    let m = d.abs();
    let chi: Vec<i32> = (1..=m).map(|a| kronecker_symbol(d, a)).collect();
    // power sums S_i = Σ χ(a) a^i, i = 0..=k
    let mut sums = vec![BigInt::zero(); k + 1];
    let small = (k as u32) * (64 - (m as u64).leading_zeros()) + 64 < 126;
    if small {
        let mut acc = vec![0i128; k + 1];
        for (idx, c) in chi.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let a = idx as i128 + 1;
            let mut p = *c as i128;
            for s in acc.iter_mut() {
                *s += p;
                p *= a;
            }
        }
        for (s, a) in sums.iter_mut().zip(acc) {
            *s = BigInt::from(a);
        }
    } else {
        for (idx, c) in chi.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let a = BigInt::from(idx as i64 + 1);
            let mut p = BigInt::from(*c);
            for s in sums.iter_mut() {
                *s += &p;
                p *= &a;
            }
        }
    }
    (0..=k)
        .map(|j| {
            qi(binomial(BigInt::from(k), BigInt::from(j)))
                * bernoulli_number(j)
                * qpow(m, j as i64 - 1)
                * qi(sums[k - j].clone())
        })
        .sum()
}

/// Hurwitz class numbers, stored in units of 1/6, tabulated up to a bound.
fn hurwitz_cache() -> &'static RwLock<Vec<i64>> {
    static CACHE: OnceLock<RwLock<Vec<i64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// `6·H(N)` for `1 ≤ N ≤ bound` by walking reduced forms `(a, b, c)`,
/// `|b| ≤ a ≤ c`, `b ≥ 0` on the boundary, discriminant `b² - 4ac = -N`.
fn hurwitz_sixths_table(bound: usize) -> Vec<i64> {
    let mut t = vec![0i64; bound + 1];
    let nmax = bound as i64;
    let mut a = 1i64;
    while 3 * a * a <= nmax {
        for b in -a..=a {
            let mut c = a;
            loop {
                let n = 4 * a * c - b * b;
                if n > nmax {
                    break;
                }
                if !(b < 0 && (-b == a || a == c)) {
                    t[n as usize] += if a == b && b == c {
                        2
                    } else if b == 0 && a == c {
                        3
                    } else {
                        6
                    };
                }
                c += 1;
            }
        }
        a += 1;
    }
    t
}

/// `H(N)` for `0 ≤ N ≤ bound`, with `H(0) = -1/12`.
pub fn hurwitz_table(bound: usize) -> Vec<Q> {
    ensure_hurwitz(bound);
    let t = hurwitz_cache().read().unwrap();
    (0..=bound)
        .map(|n| if n == 0 { qf(-1, 12) } else { qf(t[n], 6) })
        .collect()
}

fn ensure_hurwitz(n: usize) {
    if hurwitz_cache().read().unwrap().len() > n {
        return;
    }
    let mut t = hurwitz_cache().write().unwrap();
    if t.len() <= n {
        let bound = (2 * t.len()).max(n).max(1024);
        *t = hurwitz_sixths_table(bound);
    }
}

/// Hurwitz class number `H(N)`; `H(0) = -1/12`, zero for `-N ≡ 2, 3 mod 4`.
pub fn hurwitz_h(n: i64) -> Result<Q> {
    if n < 0 {
        return Err(Error::Domain(format!("H(N) needs N >= 0, got {n}")));
    }
    if n == 0 {
        return Ok(qf(-1, 12));
    }
    ensure_hurwitz(n as usize);
    Ok(qf(hurwitz_cache().read().unwrap()[n as usize], 6))
}

fn cohen_cache() -> &'static RwLock<HashMap<(i64, i64), Q>> {
    static CACHE: OnceLock<RwLock<HashMap<(i64, i64), Q>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cohen's `H(k, N)`. For `k = 1` this is [`hurwitz_h`].
pub fn cohen_h(k: i64, n: i64) -> Result<Q> {
    if k < 1 {
        return Err(Error::Domain(format!("H(k,N) needs k >= 1, got {k}")));
    }
    if n < 0 {
        return Err(Error::Domain(format!("H(k,N) needs N >= 0, got {n}")));
    }
    if k == 1 {
        return hurwitz_h(n);
    }
    if n == 0 {
        return Ok(zeta_one_minus_2k(k));
    }
    let disc = if k % 2 == 0 { n } else { -n };
    if !matches!(disc.rem_euclid(4), 0 | 1) {
        return Ok(Q::zero());
    }
    if let Some(v) = cohen_cache().read().unwrap().get(&(k, n)) {
        return Ok(v.clone());
    }
    let v = cohen_h_formula(k, disc)?;
    cohen_cache().write().unwrap().insert((k, n), v.clone());
    Ok(v)
}

/// `L(1-k, χ_D) Σ_{d|f} μ(d) (D/d) d^{k-1} σ_{2k-1}(f/d)` for `disc = D f²`.
pub fn cohen_h_formula(k: i64, disc: i64) -> Result<Q> {
    let fd = fund_decomp(disc)?;
    let base = l_value(k, fd.fund)?;
    let s: BigInt = divisors(fd.cond)
        .into_iter()
        .map(|d| {
            let c = moebius(d) * kronecker_symbol(fd.fund, d);
            if c == 0 {
                return BigInt::zero();
            }
            BigInt::from(c)
                * num_traits::pow(BigInt::from(d), (k - 1) as usize)
                * sigma_int((2 * k - 1) as u32, fd.cond / d)
        })
        .sum();
    Ok(base * qi(s))
}

fn rm_cache() -> &'static RwLock<HashMap<(u32, i64), u64>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, i64), u64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `r_m(N) = #{x ∈ ℤ^m : Σ x_i² = N}` by enumeration over the last coordinate.
pub fn r_m(m: u32, n: i64) -> u64 {
    assert!(m >= 1, "r_m needs m >= 1");
    if n < 0 {
        return 0;
    }
    if m == 1 {
        let s = isqrt(n);
        return if s * s == n { if n == 0 { 1 } else { 2 } } else { 0 };
    }
    if let Some(v) = rm_cache().read().unwrap().get(&(m, n)) {
        return *v;
    }
    let s = isqrt(n);
    let v = (-s..=s).map(|x| r_m(m - 1, n - x * x)).sum();
    rm_cache().write().unwrap().insert((m, n), v);
    v
}

/// `r_3(N)` for `0 ≤ N ≤ bound`, by enumerating lattice points.
pub fn r3_table(bound: usize) -> Vec<u64> {
    let nmax = bound as i64;
    let mut r2 = vec![0u64; bound + 1];
    let s = isqrt(nmax);
    for x in -s..=s {
        for y in -s..=s {
            let v = x * x + y * y;
            if v <= nmax {
                r2[v as usize] += 1;
            }
        }
    }
    let mut r3 = vec![0u64; bound + 1];
    for z in -s..=s {
        let z2 = (z * z) as usize;
        for n in z2..=bound {
            r3[n] += r2[n - z2];
        }
    }
    r3
}

pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// `12·H(|D|·f1²)·(1 - (8/D))` with `-N = D f²`, `f = 2^e f1`.
pub fn cohen_rep_r3(n: i64) -> Result<Q> {
    let h = half_decomp(n)?;
    let cls = hurwitz_h(-h.fund * h.f1 * h.f1)?;
    Ok(q(12) * cls * q(1 - i64::from(kronecker_symbol(8, h.fund))))
}

/// CSV table `N,H(N),r3(N)` for `0 ≤ N ≤ bound`.
pub fn write_class_table<W: std::io::Write>(bound: usize, out: W) -> Result<()> {
    let h = hurwitz_table(bound);
    let r3 = r3_table(bound);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["N", "H(N)", "r3(N)"]).map_err(io)?;
    for n in 0..=bound {
        w.write_record([n.to_string(), crate::rat::fmt_rat(&h[n]), r3[n].to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-4, 3).unwrap(), -1);
        assert_eq!(kronecker(8, 3).unwrap(), -1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert!(kronecker(2, 3).is_err());
        assert!(kronecker(-5, 3).is_err());
        for r in [1i64, 3, 5, 7] {
            assert_eq!(kronecker(-4, r).unwrap(), if (r - 1) / 2 % 2 == 0 { 1 } else { -1 });
            assert_eq!(kronecker(8, r).unwrap(), if (r * r - 1) / 8 % 2 == 0 { 1 } else { -1 });
        }
        // negative lower argument
        assert_eq!(kronecker_symbol(8, -3), -1);
        assert_eq!(kronecker_symbol(-8, -3), -kronecker_symbol(-8, 3));
    }

    #[test]
    fn kronecker_character_properties() {
        for d in -200i64..=200 {
            if !is_fundamental(d) || d == 1 {
                continue;
            }
            let m = d.abs();
            for a in 1..60 {
                assert_eq!(kronecker_symbol(d, a), kronecker_symbol(d, a + m), "period D={d}");
                for b in 1..30 {
                    assert_eq!(
                        kronecker_symbol(d, a * b),
                        kronecker_symbol(d, a) * kronecker_symbol(d, b),
                        "mult D={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn divisor_functions() {
        assert_eq!(sigma(1, &q(1)), q(1));
        assert_eq!(sigma(1, &q(6)), q(12));
        assert_eq!(sigma(1, &qf(3, 2)), q(0));
        assert_eq!(sigma(1, &q(-4)), q(0));
        assert_eq!(sigma(3, &q(2)), q(9));
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(30), -1);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn decompositions() {
        let fd = |d| {
            let f = fund_decomp(d).unwrap();
            (f.fund, f.cond)
        };
        assert_eq!(fd(-4), (-4, 1));
        assert_eq!(fd(-12), (-3, 2));
        assert_eq!(fd(-48), (-3, 4));
        assert_eq!(fd(32), (8, 2));
        assert_eq!(fd(1), (1, 1));
        assert_eq!(fd(-16), (-4, 2));
        assert!(fund_decomp(0).is_err());
        assert!(fund_decomp(-5 * 4 + 2).is_err());
        let h3 = half_decomp(3).unwrap();
        assert_eq!((h3.fund, h3.f(), h3.f1, h3.e), (-3, q(1), 1, 0));
        let h1 = half_decomp(1).unwrap();
        assert_eq!((h1.fund, h1.f(), h1.f1, h1.e), (-4, qf(1, 2), 1, -1));
        let h12 = half_decomp(12).unwrap();
        assert_eq!((h12.fund, h12.f(), h12.f1, h12.e), (-3, q(2), 1, 1));
    }

    #[test]
    fn bernoulli() {
        assert_eq!(bernoulli_number(1), qf(-1, 2));
        assert_eq!(bernoulli_number(2), qf(1, 6));
        assert_eq!(bernoulli_number(4), qf(-1, 30));
        assert_eq!(bernoulli_number(6), qf(1, 42));
        assert_eq!(bernoulli_number(12), qf(-691, 2730));
        assert_eq!(bernoulli_number(5), q(0));
        assert_eq!(bernoulli_poly(1, &qf(1, 2)), q(0));
        assert_eq!(bernoulli_poly(2, &q(0)), qf(1, 6));
        assert_eq!(zeta_one_minus_2k(1), qf(-1, 12));
        assert_eq!(zeta_one_minus_2k(2), qf(1, 120));
        assert_eq!(zeta_value(3).value, qf(-1, 252));
    }

    /// Literal generalized Bernoulli sum, kept as an independent oracle.
    fn b_k_chi_naive(k: usize, d: i64) -> Q {
        let m = d.abs();
        qpow(m, k as i64 - 1)
            * (1..=m)
                .map(|a| q(kronecker_symbol(d, a) as i64) * bernoulli_poly(k, &qf(a, m)))
                .sum::<Q>()
    }

    #[test]
    fn l_values() {
        assert_eq!(l_value(1, -4).unwrap(), qf(1, 2));
        assert_eq!(l_value(2, 1).unwrap(), qf(-1, 12));
        assert_eq!(l_value(1, -3).unwrap(), qf(1, 3));
        assert!(l_value(2, 4).is_err());
        assert!(l_value(2, -12).is_err());
        for d in [-3i64, -4, -7, -8, 5, 8, 12, 13, -20, 1, 21, -23] {
            for k in 1..6 {
                assert_eq!(l_value(k, d).unwrap(), -b_k_chi_naive(k as usize, d) / q(k), "k={k} D={d}");
            }
        }
    }

    #[test]
    fn hurwitz_small() {
        assert_eq!(hurwitz_h(0).unwrap(), qf(-1, 12));
        assert_eq!(hurwitz_h(3).unwrap(), qf(1, 3));
        assert_eq!(hurwitz_h(4).unwrap(), qf(1, 2));
        assert_eq!(hurwitz_h(12).unwrap(), qf(4, 3));
        assert_eq!(hurwitz_h(36).unwrap(), qf(5, 2));
        assert_eq!(hurwitz_h(1).unwrap(), q(0));
        assert_eq!(hurwitz_h(2).unwrap(), q(0));
        assert_eq!(hurwitz_h(23).unwrap(), q(3));
        assert!(hurwitz_h(-1).is_err());
    }

    #[test]
    fn hurwitz_matches_class_number_formula() {
        // H(N) = L(0, χ_D) Σ_{d|f} μ(d)(D/d) σ_1(f/d), with -N = D f²
        for n in 1..3000i64 {
            let want = if matches!((-n).rem_euclid(4), 0 | 1) {
                cohen_h_formula(1, -n).unwrap()
            } else {
                q(0)
            };
            assert_eq!(hurwitz_h(n).unwrap(), want, "N={n}");
        }
    }

    #[test]
    fn cohen_values() {
        assert_eq!(cohen_h(2, 0).unwrap(), qf(1, 120));
        assert_eq!(cohen_h(1, 3).unwrap(), qf(1, 3));
        assert_eq!(cohen_h(1, 2).unwrap(), q(0));
        assert_eq!(cohen_h(2, 2).unwrap(), q(0));
        assert_eq!(cohen_h(3, 1).unwrap(), q(0));
        // H(2,1) = ζ(-1), H(2,4) = -7/12, H(2,16) = -55/12 (hand computation)
        assert_eq!(cohen_h(2, 1).unwrap(), qf(-1, 12));
        assert_eq!(cohen_h(2, 4).unwrap(), qf(-7, 12));
        assert_eq!(cohen_h(2, 16).unwrap(), qf(-55, 12));
        // H(2,5) = L(-1, χ_5) = -2/5
        assert_eq!(cohen_h(2, 5).unwrap(), qf(-2, 5));
        assert!(cohen_h(0, 3).is_err());
    }

    #[test]
    fn cohen_four_n_relation() {
        for k in 2..=4i64 {
            let sgn = if k % 2 == 0 { 1 } else { -1 };
            for d in -100i64..=100 {
                if !is_fundamental(d) || d.signum() != sgn {
                    continue;
                }
                for f in [1i64, 3, 5] {
                    let n = d.abs() * f * f;
                    let lhs = cohen_h(k, 4 * n).unwrap();
                    let chi = kronecker_symbol(8, sgn * n) as i64;
                    let factor = q(1) + qpow(2, 2 * k - 1) - q(chi) * qpow(2, k - 1);
                    assert_eq!(lhs, factor * cohen_h(k, n).unwrap(), "k={k} D={d} f={f}");
                }
            }
        }
    }

    #[test]
    fn sums_of_squares() {
        assert_eq!(r_m(3, 0), 1);
        assert_eq!(r_m(3, 3), 8);
        assert_eq!(r_m(4, 1), 8);
        assert_eq!(r_m(3, 9), 30);
        let t = r3_table(800);
        for n in 0..=200usize {
            assert_eq!(t[4 * n], t[n]);
            assert_eq!(t[n], r_m(3, n as i64));
        }
    }

    #[test]
    fn cohen_rep_small() {
        assert_eq!(cohen_rep_r3(3).unwrap(), q(8));
        assert_eq!(cohen_rep_r3(7).unwrap(), q(0));
        assert_eq!(cohen_rep_r3(4).unwrap(), q(6));
        assert_eq!(cohen_rep_r3(9).unwrap(), q(30));
        assert_eq!(cohen_rep_r3(27).unwrap(), q(32));
        let t = r3_table(2000);
        for (n, &r) in t.iter().enumerate().skip(1) {
            assert_eq!(cohen_rep_r3(n as i64).unwrap(), q(r as i64), "N={n}");
        }
    }

    #[test]
    fn csv_table() {
        let mut buf = Vec::new();
        write_class_table(4, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "N,H(N),r3(N)\n0,-1/12,1\n1,0/1,6\n2,0/1,12\n3,1/3,8\n4,1/2,6\n");
    }

    proptest! {
        #[test]
        fn r3_class_identity(n in 1i64..3000) {
            let h = q(12) * (hurwitz_h(4 * n).unwrap() - q(2) * hurwitz_h(n).unwrap());
            prop_assert_eq!(h, q(r_m(3, n) as i64));
        }

        #[test]
        fn fund_decomp_reconstructs(d in -5000i64..5000) {
            prop_assume!(d != 0 && matches!(d.rem_euclid(4), 0 | 1));
            let f = fund_decomp(d).unwrap();
            prop_assert!(is_fundamental(f.fund));
            prop_assert_eq!(f.fund * f.cond * f.cond, d);
        }

        #[test]
        fn half_decomp_reconstructs(n in 1i64..5000) {
            let h = half_decomp(n).unwrap();
            prop_assert_eq!(h.fund * h.f_twice * h.f_twice, -4 * n);
            prop_assert!(h.f1 % 2 == 1 && h.e >= -1);
            prop_assert_eq!(h.f_twice, h.f1 << (h.e + 1));
        }
    }
}
