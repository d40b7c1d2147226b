//! Dedekind eta, the level-1 ring `ℂ[E₄, E₆]`, eta-type forms `η^s·M_m(1)`
//! and the twisted operator `T̃(p²)`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli_number, is_prime, kronecker_symbol, sigma_int};
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rat::{q, qi, qpow, Q};

pub const ETA_POWERS: [i64; 4] = [3, 9, 15, 21];

/// An element of `η^s·M_m(1)` on the `q^{n/8}` grid, of weight `m + s/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EtaRepr", into = "EtaRepr")]
pub struct EtaTypeForm {
    s: i64,
    m: i64,
    series: QSeries,
}

#[derive(Serialize, Deserialize)]
struct EtaRepr {
    #[serde(flatten)]
    series: QSeries,
    s: i64,
    m: i64,
}

impl TryFrom<EtaRepr> for EtaTypeForm {
    type Error = Error;
    fn try_from(r: EtaRepr) -> Result<Self> {
        EtaTypeForm::new(r.s, r.m, r.series)
    }
}

impl From<EtaTypeForm> for EtaRepr {
    fn from(f: EtaTypeForm) -> Self {
        EtaRepr {
            series: f.series,
            s: f.s,
            m: f.m,
        }
    }
}

fn check_s(s: i64) -> Result<()> {
    if ETA_POWERS.contains(&s) {
        Ok(())
    } else {
        Err(Error::Domain(format!("eta power must be 3, 9, 15 or 21, got {s}")))
    }
}

impl EtaTypeForm {
    /// Needs den 8 and support on `n ≡ s/3 mod 8`.
    pub fn new(s: i64, m: i64, series: QSeries) -> Result<Self> {
        check_s(s)?;
        if series.den() != 8 {
            return Err(Error::Domain(format!(
                "eta-type forms live on the den-8 grid, got den {}",
                series.den()
            )));
        }
        if let Some((n, _)) = series.terms().find(|(n, _)| (n - s / 3).rem_euclid(8) != 0) {
            return Err(Error::Support(format!(
                "η^{s} form has a term at {n}/8, needs n = {} mod 8",
                s / 3
            )));
        }
        Ok(EtaTypeForm { s, m, series })
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// `k` with weight `k + 1/2 = m + s/2`.
    pub fn k(&self) -> i64 {
        self.m + (self.s - 1) / 2
    }

    pub fn series(&self) -> &QSeries {
        &self.series
    }

    pub fn prec(&self) -> i64 {
        self.series.prec()
    }

    /// Coefficient of `q^{n/8}`.
    pub fn coeff(&self, n: i64) -> Q {
        self.series.coeff(n)
    }

    pub fn scale(&self, c: &Q) -> Self {
        EtaTypeForm {
            series: self.series.scale(c),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `η = Σ χ₁₂(n) q^{n²/24}` on the den-24 grid.
pub fn eta(prec: i64) -> QSeries {
    let mut out = QSeries::zero(24, prec);
    let mut n = 1i64;
    while n * n < prec {
        match n % 12 {
            1 | 11 => out.add_term(n * n, q(1)),
            5 | 7 => out.add_term(n * n, q(-1)),
            _ => {}
        }
        n += 1;
    }
    out
}

/// `∏_{n≥1}(1 - q^n)` below `q^prec`, by the pentagonal number theorem.
pub fn euler_product(prec: i64) -> QSeries {
    let mut out = QSeries::zero(1, prec);
    let mut k = 0i64;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = k * (3 * k - 1) / 2;
        let b = k * (3 * k + 1) / 2;
        if a >= prec {
            break;
        }
        out.add_term(a, q(sign));
        if k > 0 && b < prec {
            out.add_term(b, q(sign));
        }
        k += 1;
    }
    out
}

/// `η^s` on the den-8 grid, certified for numerators below `prec`.
pub fn eta_pow(s: i64, prec: i64) -> Result<EtaTypeForm> {
    check_s(s)?;
    let off = s / 3;
    let terms = ((prec - off).max(0) + 7) / 8;
    let p = euler_product(terms).pow(s as u32);
    let series = p.with_den(8)?.shift(off).truncate(prec);
    EtaTypeForm::new(s, 0, series)
}

/// `E_w = 1 - (2w/B_w) Σ σ_{w-1}(n) q^n` for even `w ≥ 4`.
pub fn level1_eisenstein(w: i64, prec: i64) -> Result<QSeries> {
    if w < 4 || w % 2 != 0 {
        return Err(Error::Domain(format!(
            "level-1 Eisenstein series need even weight >= 4, got {w}"
        )));
    }
    let c = -q(2 * w) / bernoulli_number(w as usize);
    let coeffs: Vec<Q> = (0..prec.max(0))
        .into_par_iter()
        .map(|n| {
            if n == 0 {
                q(1)
            } else {
                &c * qi(sigma_int((w - 1) as u32, n))
            }
        })
        .collect();
    Ok(QSeries::from_dense(1, prec, 0, coeffs))
}

/// `(a, b)` with `4a + 6b = m`, ordered by `a` descending.
pub fn level1_exponents(m: i64) -> Vec<(u32, u32)> {
    if m < 0 || m % 2 != 0 {
        return Vec::new();
    }
    (0..=m / 6)
        .filter(|b| (m - 6 * b) % 4 == 0)
        .map(|b| (((m - 6 * b) / 4) as u32, b as u32))
        .collect()
}

/// Monomials `E₄^a E₆^b` spanning `M_m(1)`.
pub fn level1_basis(m: i64, prec: i64) -> Vec<QSeries> {
    let exps = level1_exponents(m);
    if exps.is_empty() {
        return Vec::new();
    }
    let e4 = level1_eisenstein(4, prec).unwrap();
    let e6 = level1_eisenstein(6, prec).unwrap();
    exps.par_iter()
        .map(|&(a, b)| e4.pow(a).mul(&e6.pow(b)).truncate(prec))
        .collect()
}

/// `dim M_m(1)`.
pub fn level1_dim(m: i64) -> usize {
    level1_exponents(m).len()
}

/// `η^s·f` for `f` in the monomial basis of `M_m(1)`.
pub fn eta_type_basis(s: i64, m: i64, prec: i64) -> Result<Vec<EtaTypeForm>> {
    let eta_s = eta_pow(s, prec)?;
    let terms = (prec + 7) / 8;
    level1_basis(m, terms)
        .into_iter()
        .map(|f| {
            let g = f.with_den(8)?.mul(eta_s.series()).truncate(prec);
            EtaTypeForm::new(s, m, g)
        })
        .collect()
}

/// `(-4/p) Σ {c(p²n) + ((-1)^k n/p) p^{k-1} c(n) + p^{2k-1} c(n/p²)} q^{n/8}`.
pub fn twisted_hecke(f: &EtaTypeForm, p: i64) -> Result<EtaTypeForm> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let k = f.k();
    let p2 = p * p;
    let prec = f.prec().div_euclid(p2);
    let sgn = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    let twist = q(kronecker_symbol(-4, p) as i64);
    let mid = qpow(p, k - 1);
    let last = qpow(p, 2 * k - 1);
    let mut out = QSeries::zero(8, prec);
    let mut n = f.s / 3;
    while n < prec {
        let mut c = f.coeff(p2 * n);
        let chi = kronecker_symbol(sgn * n, p);
        if chi != 0 {
            c += q(chi as i64) * &mid * f.coeff(n);
        }
        if n % p2 == 0 {
            c += &last * f.coeff(n / p2);
        }
        if !c.is_zero() {
            out.add_term(n, &twist * c);
        }
        n += 8;
    }
    EtaTypeForm::new(f.s, f.m, out)
}
