//! Truncated q-expansions with exact rational coefficients on the grids
//! `q^{e/den}`, `den ∈ {1, 2, 8, 24}`.
//!
//! A series is certified for every numerator `e < prec`; keys absent below
//! `prec` are zero. Nothing at or above `prec` is ever stored.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, parse_rat, Q};

pub const DENS: [u32; 4] = [1, 2, 8, 24];

/// Output length above which the convolution is split across threads.
const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    den: u32,
    prec: i64,
    coeffs: BTreeMap<i64, Q>,
}

fn check_den(den: u32) -> Result<()> {
    if DENS.contains(&den) {
        Ok(())
    } else {
        Err(Error::InvalidDen(den))
    }
}

impl QSeries {
    /// The zero series. Panics on a denominator outside {1, 2, 8, 24}.
    pub fn zero(den: u32, prec: i64) -> Self {
        Self::try_zero(den, prec).expect("valid exponent denominator")
    }

    pub fn try_zero(den: u32, prec: i64) -> Result<Self> {
        check_den(den)?;
        Ok(QSeries {
            den,
            prec,
            coeffs: BTreeMap::new(),
        })
    }

    /// `1 + O(q^prec)` on the integral grid.
    pub fn one(prec: i64) -> Self {
        Self::from_terms(1, prec, [(0, Q::one())])
    }

    /// Builds a series from `(numerator, coefficient)` pairs. Repeated
    /// numerators are summed, zeros and terms at or above `prec` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (i64, Q)>>(den: u32, prec: i64, terms: I) -> Self {
        let mut s = Self::zero(den, prec);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Dense constructor: `coeffs[i]` is the coefficient at numerator `start + i`.
    pub fn from_dense(den: u32, prec: i64, start: i64, coeffs: Vec<Q>) -> Self {
        Self::from_terms(
            den,
            prec,
            coeffs
                .into_iter()
                .enumerate()
                .map(|(i, c)| (start + i as i64, c)),
        )
    }

    /// Integral-grid series from a coefficient function on `0..prec`.
    pub fn from_fn(prec: i64, f: impl Fn(i64) -> Q) -> Self {
        Self::from_terms(1, prec, (0..prec.max(0)).map(|n| (n, f(n))))
    }

    /// Adds `c·q^{e/den}` in place (ignored when `e ≥ prec`).
    pub fn add_term(&mut self, e: i64, c: Q) {
        if e >= self.prec || c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of stored (nonzero) coefficients.
    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient at numerator `e`. Panics if `e ≥ prec`.
    pub fn coeff(&self, e: i64) -> Q {
        self.try_coeff(e).expect("coefficient inside precision")
    }

    pub fn try_coeff(&self, e: i64) -> Result<Q> {
        if e >= self.prec {
            return Err(Error::OutOfPrecision {
                index: e,
                prec: self.prec,
            });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(Q::zero))
    }

    /// Borrowing lookup; `None` means zero. No precision check.
    pub fn get(&self, e: i64) -> Option<&Q> {
        self.coeffs.get(&e)
    }

    /// Lowest exponent numerator with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Re-expresses the series on the finer grid `den`, which must be a
    /// multiple of the current one.
    pub fn with_den(&self, den: u32) -> Result<Self> {
        check_den(den)?;
        if !den.is_multiple_of(self.den) {
            return Err(Error::Domain(format!(
                "cannot move a den-{} series onto the den-{den} grid",
                self.den
            )));
        }
        let f = (den / self.den) as i64;
        Ok(QSeries {
            den,
            prec: self.prec * f,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * f, c.clone())).collect(),
        })
    }

    /// Moves to the coarser grid `den` when every stored exponent and the
    /// precision allow it; otherwise returns `None`.
    pub fn coarsen(&self, den: u32) -> Option<Self> {
        if check_den(den).is_err() || !self.den.is_multiple_of(den) {
            return None;
        }
        let f = (self.den / den) as i64;
        if self.coeffs.keys().any(|e| e % f != 0) {
            return None;
        }
        Some(QSeries {
            den,
            prec: self.prec.div_euclid(f) + i64::from(self.prec.rem_euclid(f) != 0),
            coeffs: self.coeffs.iter().map(|(e, c)| (e / f, c.clone())).collect(),
        })
    }

    fn unified(a: &Self, b: &Self) -> (Self, Self) {
        let l = a.den.lcm(&b.den);
        (a.with_den(l).unwrap(), b.with_den(l).unwrap())
    }

    /// Lowers the certified bound to `prec` (never raises it).
    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        QSeries {
            den: self.den,
            prec,
            coeffs: self.coeffs.range(..prec).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.den, self.prec);
        }
        QSeries {
            den: self.den,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `q^{e/den}`.
    pub fn shift(&self, e: i64) -> Self {
        QSeries {
            den: self.den,
            prec: self.prec + e,
            coeffs: self.coeffs.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    /// Keeps the terms whose numerator satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        QSeries {
            den: self.den,
            prec: self.prec,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| keep(**e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::unified(self, other);
        let prec = a.prec.min(b.prec);
        let mut out = a.truncate(prec);
        for (e, c) in b.coeffs.range(..prec) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QSeries {
            den: self.den,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    /// Cauchy product. The result is certified below
    /// `min(prec_a + v_b, prec_b + v_a)` where `v` is the lowest exponent.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unified(self, other);
        let va = a.valuation().unwrap_or(a.prec);
        let vb = b.valuation().unwrap_or(b.prec);
        let prec = (a.prec + vb).min(b.prec + va);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.den, prec);
        }
        let lo = va + vb;
        let out_len = (prec - lo).max(0) as usize;
        if out_len == 0 {
            return Self::zero(a.den, prec);
        }
        // the sparser factor drives the outer loop
        let (s, d) = if a.nnz() <= b.nnz() { (&a, &b) } else { (&b, &a) };
        let (vs, vd) = (s.valuation().unwrap(), d.valuation().unwrap());
        let (s_num, s_den) = integerize(s, vs);
        let (d_num, d_den) = integerize(d, vd);
        let d_span = (d.prec - vd).max(1) as usize;
        let dense = 4 * d.nnz() > d_span;
        let max_s = s_num.iter().map(|(_, x)| x.bits()).max().unwrap_or(0);
        let max_d = d_num.iter().map(|(_, x)| x.bits()).max().unwrap_or(0);
        let terms = (s.nnz().min(d.nnz()) as u64).max(1);
        let fits = max_s + max_d + (64 - terms.leading_zeros() as u64) <= 124;
        let acc: Vec<BigInt> = if fits {
            let s_small: Vec<(usize, i128)> = s_num
                .iter()
                .map(|(i, x)| (*i, x.to_i128().unwrap()))
                .collect();
            let d_small: Vec<(usize, i128)> = d_num
                .iter()
                .map(|(i, x)| (*i, x.to_i128().unwrap()))
                .collect();
            convolve(&s_small, &d_small, dense, out_len)
                .into_iter()
                .map(BigInt::from)
                .collect()
        } else {
            convolve(&s_num, &d_num, dense, out_len)
        };
        let scale = s_den * d_den;
        let coeffs = acc
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (lo + i as i64, Q::new(x, scale.clone())))
            .collect();
        QSeries {
            den: a.den,
            prec,
            coeffs,
        }
    }

    /// `self^n` by repeated squaring (`n = 0` gives 1 on the same grid).
    pub fn pow(&self, n: u32) -> Self {
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result.unwrap_or_else(|| Self::from_terms(self.den, self.prec.max(1), [(0, Q::one())]))
    }

    /// `Σ a(n) q^n ↦ Σ a(dn) q^n`; certified below `floor(prec/d)`.
    pub fn u_operator(&self, d: i64) -> Result<Self> {
        if self.den != 1 {
            return Err(Error::FractionalGrid(self.den));
        }
        if d < 1 {
            return Err(Error::Domain(format!("U({d}) needs d >= 1")));
        }
        let prec = self.prec.div_euclid(d);
        Ok(QSeries {
            den: 1,
            prec,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.rem_euclid(d) == 0 && e.div_euclid(d) < prec)
                .map(|(e, c)| (e.div_euclid(d), c.clone()))
                .collect(),
        })
    }

    /// Keeps exactly the exponents `n` with `(-1)^k n ≡ 0, 1 mod 4`.
    pub fn pk_projection(&self, k: i64) -> Result<Self> {
        if self.den != 1 {
            return Err(Error::FractionalGrid(self.den));
        }
        let sgn = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        Ok(self.filter(|n| matches!((sgn * n).rem_euclid(4), 0 | 1)))
    }

    /// `U_k(4)`: first `U(4)`, then the projection `℘_k`.
    pub fn uk4(&self, k: i64) -> Result<Self> {
        self.u_operator(4)?.pk_projection(k)
    }

    /// `f(q) ↦ f(q^m)`; certified below `m·prec`.
    pub fn rescale(&self, m: i64) -> Self {
        assert!(m >= 1, "rescale factor must be positive");
        QSeries {
            den: self.den,
            prec: self.prec * m,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * m, c.clone())).collect(),
        }
    }

    /// Coefficientwise equality below `bound` (after grid unification).
    /// Both series must be certified there.
    pub fn agrees_below(&self, other: &Self, bound: i64) -> bool {
        let (a, b) = Self::unified(self, other);
        let scale = (a.den / self.den) as i64;
        let bound = bound * scale;
        assert!(
            bound <= a.prec && bound <= b.prec,
            "comparison bound exceeds precision"
        );
        a.coeffs.range(..bound).eq(b.coeffs.range(..bound))
    }

    /// If `self = λ·other` on the common certified range, returns `λ`.
    /// Zero `other` yields `None`.
    pub fn ratio_to(&self, other: &Self) -> Option<Q> {
        let (a, b) = Self::unified(self, other);
        let bound = a.prec.min(b.prec);
        let (e0, c0) = b.coeffs.range(..bound).next()?;
        let lambda = a.coeffs.get(e0).cloned().unwrap_or_else(Q::zero) / c0;
        let scaled = b.truncate(bound).scale(&lambda);
        if a.truncate(bound) == scaled {
            Some(lambda)
        } else {
            None
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Scales a series to integers: returns offsets from `v` with integer
/// numerators, plus the common denominator.
fn integerize(s: &QSeries, v: i64) -> (Vec<(usize, BigInt)>, BigInt) {
    let l = s
        .coeffs
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = s
        .coeffs
        .iter()
        .map(|(e, c)| ((e - v) as usize, c.numer() * (&l / c.denom())))
        .collect();
    (terms, l)
}

/// `acc[i + j] += x·y` over `s × d`, output truncated to `out_len`.
fn convolve<T>(s: &[(usize, T)], d: &[(usize, T)], dense: bool, out_len: usize) -> Vec<T>
where
    T: Zero + Clone + Send + Sync + AddAssign,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let dvec: Option<Vec<T>> = dense.then(|| {
        let len = d.last().map_or(0, |(i, _)| i + 1).min(out_len);
        let mut v = vec![T::zero(); len];
        for (i, x) in d.iter().filter(|(i, _)| *i < len) {
            v[*i] = x.clone();
        }
        v
    });
    let fill = |start: usize, chunk: &mut [T]| {
        let end = start + chunk.len();
        for (i, x) in s {
            if *i >= end {
                break;
            }
            let jlo = start.saturating_sub(*i);
            let jhi = end - i;
            match &dvec {
                Some(v) => {
                    let jhi = jhi.min(v.len());
                    for j in jlo..jhi {
                        if !v[j].is_zero() {
                            chunk[i + j - start] += x * &v[j];
                        }
                    }
                }
                None => {
                    let from = d.partition_point(|(j, _)| *j < jlo);
                    for (j, y) in d[from..].iter().take_while(|(j, _)| *j < jhi) {
                        chunk[i + j - start] += x * y;
                    }
                }
            }
        }
    };
    let mut acc = vec![T::zero(); out_len];
    let work = out_len.saturating_mul(s.len());
    if work > PAR_THRESHOLD && out_len > 64 {
        let chunk = (out_len / (4 * rayon::current_num_threads()).max(1)).max(64);
        acc.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(c, slice)| fill(c * chunk, slice));
    } else {
        fill(0, &mut acc);
    }
    acc
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    den: u32,
    prec: i64,
    coeffs: Vec<(i64, String)>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesRepr {
            den: self.den,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, fmt_rat(c))).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QSeriesRepr::deserialize(de)?;
        check_den(r.den).map_err(D::Error::custom)?;
        let mut out = QSeries::zero(r.den, r.prec);
        let mut last = None;
        for (e, c) in r.coeffs {
            if last.is_some_and(|l| l >= e) {
                return Err(D::Error::custom("exponents must be strictly ascending"));
            }
            if e >= r.prec {
                return Err(D::Error::custom(format!(
                    "exponent {e} at or above prec {}",
                    r.prec
                )));
            }
            last = Some(e);
            out.add_term(e, parse_rat(&c).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

impl std::fmt::Display for QSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            let exp = if self.den == 1 {
                format!("{e}")
            } else {
                format!("{e}/{}", self.den)
            };
            match (*e, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "q^{exp}")?,
                _ => write!(f, "{a}*q^{exp}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.den == 1 {
            write!(f, " + O(q^{})", self.prec)
        } else {
            write!(f, " + O(q^{}/{})", self.prec, self.den)
        }
    }
}
