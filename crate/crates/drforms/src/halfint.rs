//! Forms of weight `k + 1/2` on `Γ₀(4)` and `Γ₀(8)`: theta powers, Cohen's
//! Eisenstein series `ℋ_k`, the level-8 series `ℋ*_{r,k}`, the holomorphic
//! part of Zagier's series, `E^{(8)}_{3/2}`, and `T(p²)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{cohen_h, is_prime, kronecker_symbol};
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rat::{q, qpow, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HalfIntRepr", into = "HalfIntRepr")]
pub struct HalfIntForm {
    k: i64,
    level: u32,
    series: QSeries,
    plus_class: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct HalfIntRepr {
    #[serde(flatten)]
    series: QSeries,
    k: i64,
    level: u32,
    plus_class: Option<i64>,
}

impl TryFrom<HalfIntRepr> for HalfIntForm {
    type Error = Error;
    fn try_from(r: HalfIntRepr) -> Result<Self> {
        HalfIntForm::new(r.k, r.level, r.series, r.plus_class)
    }
}

impl From<HalfIntForm> for HalfIntRepr {
    fn from(f: HalfIntForm) -> Self {
        HalfIntRepr {
            series: f.series,
            k: f.k,
            level: f.level,
            plus_class: f.plus_class,
        }
    }
}

/// `(-1)^k ≡ -r mod 4`, the parity that pairs weight `k + 1/2` with class `r`.
pub fn plus_parity_ok(r: i64, k: i64) -> bool {
    let sgn = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    (sgn + r).rem_euclid(4) == 0
}

impl HalfIntForm {
    pub fn new(k: i64, level: u32, series: QSeries, plus_class: Option<i64>) -> Result<Self> {
        if series.den() != 1 {
            return Err(Error::FractionalGrid(series.den()));
        }
        if level != 4 && level != 8 {
            return Err(Error::Domain(format!("level must be 4 or 8, got {level}")));
        }
        if let Some(r) = plus_class {
            if ![1, 3, 5, 7].contains(&r) {
                return Err(Error::Domain(format!("plus class must be 1, 3, 5 or 7, got {r}")));
            }
            if !plus_parity_ok(r, k) {
                return Err(Error::Parity(format!("(-1)^{k} is not -{r} mod 4")));
            }
        }
        Ok(HalfIntForm {
            k,
            level,
            series,
            plus_class,
        })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn series(&self) -> &QSeries {
        &self.series
    }

    pub fn plus_class(&self) -> Option<i64> {
        self.plus_class
    }

    pub fn prec(&self) -> i64 {
        self.series.prec()
    }

    pub fn coeff(&self, n: i64) -> Q {
        self.series.coeff(n)
    }

    pub fn with_series(&self, series: QSeries) -> Self {
        HalfIntForm {
            series,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.with_series(self.series.scale(c))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `θ = Σ_{n∈ℤ} q^{n²}`.
pub fn theta(prec: i64) -> HalfIntForm {
    let mut s = QSeries::zero(1, prec);
    let mut n = 0i64;
    while n * n < prec {
        s.add_term(n * n, q(if n == 0 { 1 } else { 2 }));
        n += 1;
    }
    HalfIntForm::new(0, 4, s, None).unwrap()
}

/// `θ^m` as a plain series (any `m ≥ 1`, including integral weights).
pub fn theta_power_series(m: u32, prec: i64) -> QSeries {
    assert!(m >= 1, "theta power needs m >= 1");
    theta(prec).series.pow(m)
}

/// `θ^m` for odd `m`, as a weight `m/2` form on `Γ₀(4)`.
pub fn theta_pow(m: u32, prec: i64) -> Result<HalfIntForm> {
    if m.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "θ^{m} has integral weight; use theta_power_series"
        )));
    }
    HalfIntForm::new((m as i64 - 1) / 2, 4, theta_power_series(m, prec), None)
}

/// `ℋ_k = ζ(1-2k) + Σ H(k,N) q^N`.
pub fn cohen_eisenstein(k: i64, prec: i64) -> Result<HalfIntForm> {
    if k < 1 {
        return Err(Error::Domain(format!("ℋ_k needs k >= 1, got {k}")));
    }
    let s = QSeries::from_fn(prec, |n| cohen_h(k, n).unwrap());
    HalfIntForm::new(k, 4, s, None)
}

/// `H*_r(k, N) = H(k,N) + (H(k,N) - H(k,4N)) / (2^{k-1}((8/r) + 2^k))`,
/// taken as zero off the plus space (`(-1)^k N ≡ 2, 3 mod 4`).
pub fn h_star(r: i64, k: i64, n: i64) -> Result<Q> {
    if !plus_parity_ok(r, k) || k < 1 {
        return Err(Error::Parity(format!("(-1)^{k} is not -{r} mod 4")));
    }
    let sgn = if k % 2 == 0 { 1 } else { -1 };
    if !matches!((sgn * n).rem_euclid(4), 0 | 1) {
        return Ok(Q::zero());
    }
    let h = cohen_h(k, n)?;
    let h4 = cohen_h(k, 4 * n)?;
    let denom = qpow(2, k - 1) * (q(kronecker_symbol(8, r) as i64) + qpow(2, k));
    Ok(&h + (&h - h4) / denom)
}

/// `ℋ*_{r,k}` on `Γ₀(8)`, in the plus space of class `r`.
pub fn cohen_star(r: i64, k: i64, prec: i64) -> Result<HalfIntForm> {
    h_star(r, k, 0)?;
    let mut s = QSeries::zero(1, prec);
    for n in 0..prec {
        s.add_term(n, h_star(r, k, n)?);
    }
    HalfIntForm::new(k, 8, s, Some(r))
}

/// `ℋ_1 = -1/12 + Σ H(N) q^N`.
pub fn zagier_hol(prec: i64) -> HalfIntForm {
    cohen_eisenstein(1, prec).unwrap()
}

/// `E^{(8)}_{3/2} = θ³|U_1(4)`.
pub fn e_3_2_8(prec: i64) -> HalfIntForm {
    let s = theta_power_series(3, 4 * prec).uk4(1).unwrap();
    HalfIntForm::new(1, 8, s, Some(5)).unwrap()
}

/// `c(p²n) + ((-1)^k n / p) p^{k-1} c(n) + p^{2k-1} c(n/p²)`.
pub fn hecke_t_p2(f: &HalfIntForm, p: i64) -> Result<HalfIntForm> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let k = f.k;
    let s = &f.series;
    let prec = s.prec().div_euclid(p * p);
    let sgn = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    let mid = qpow(p, k - 1);
    let last = qpow(p, 2 * k - 1);
    let mut out = QSeries::zero(1, prec);
    for n in 0..prec {
        let mut c = s.coeff(p * p * n);
        let chi = kronecker_symbol(sgn * n, p);
        if chi != 0 {
            c += q(chi as i64) * &mid * s.coeff(n);
        }
        if n % (p * p) == 0 {
            c += &last * s.coeff(n / (p * p));
        }
        out.add_term(n, c);
    }
    Ok(f.with_series(out))
}

/// Support test: class `r` needs `n ≡ 0, 4, -r mod 8`; without a class the
/// level-4 plus condition `(-1)^k n ≡ 0, 1 mod 4` is checked.
pub fn plus_support_check(f: &HalfIntForm) -> bool {
    match f.plus_class {
        Some(r) => {
            plus_parity_ok(r, f.k)
                && f
                    .series
                    .terms()
                    .all(|(n, _)| matches!(n.rem_euclid(8), 0 | 4) || (n + r).rem_euclid(8) == 0)
        }
        None => {
            let sgn = if f.k.rem_euclid(2) == 0 { 1 } else { -1 };
            f.series
                .terms()
                .all(|(n, _)| matches!((sgn * n).rem_euclid(4), 0 | 1))
        }
    }
}

/// `λ` with `f|U_k(4) = λ f` on the certified range, if any.
pub fn uk4_eigen_sign(f: &HalfIntForm, k: i64) -> Option<Q> {
    if f.series.is_zero() {
        return None;
    }
    let g = f.series.uk4(k).ok()?;
    let bound = g.prec().min(f.prec());
    if bound <= f.series.valuation()? {
        return None;
    }
    g.truncate(bound).ratio_to(&f.series.truncate(bound))
}

/// Left side of `2^{k-1}((8/r)+2^k) ℋ* = (1 + (8/r)2^{k-1} + 2^{2k-1}) ℋ_k - ℋ_k|U_k(4)`
/// minus its right side, certified below `prec`. Zero means the relation holds.
pub fn star_relation_defect(r: i64, k: i64, prec: i64) -> Result<QSeries> {
    let chi = q(kronecker_symbol(8, r) as i64);
    let hk = cohen_eisenstein(k, 4 * prec)?;
    let lhs = cohen_star(r, k, prec)?
        .series
        .scale(&(qpow(2, k - 1) * (&chi + qpow(2, k))));
    let c = q(1) + &chi * qpow(2, k - 1) + qpow(2, 2 * k - 1);
    let rhs = hk.series.scale(&c).sub(&hk.series.uk4(k)?);
    Ok(lhs.sub(&rhs).truncate(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{r_m, sigma1};
    use crate::rat::qf;

    #[test]
    fn theta_basics() {
        let t = theta(30);
        assert_eq!(t.coeff(0), q(1));
        assert_eq!(t.coeff(4), q(2));
        assert_eq!(t.coeff(3), q(0));
        let t3 = theta_pow(3, 30).unwrap();
        assert_eq!(t3.coeff(3), q(8));
        assert_eq!(theta_power_series(4, 10).coeff(1), q(8));
        assert_eq!(theta_pow(1, 30).unwrap().series(), t.series());
        assert!(theta_pow(4, 10).is_err());
        for n in 0..30 {
            assert_eq!(t3.coeff(n), q(r_m(3, n) as i64));
        }
    }

    #[test]
    fn cohen_series() {
        assert_eq!(cohen_eisenstein(1, 10).unwrap().coeff(0), qf(-1, 12));
        assert_eq!(cohen_eisenstein(2, 10).unwrap().coeff(0), qf(1, 120));
        assert_eq!(cohen_eisenstein(1, 10).unwrap().coeff(3), qf(1, 3));
        assert!(cohen_eisenstein(0, 10).is_err());
        let z = zagier_hol(10);
        assert_eq!(z.coeff(0), qf(-1, 12));
        assert_eq!(z.coeff(4), qf(1, 2));
        assert_eq!(z.coeff(2), q(0));
        assert!(plus_support_check(&cohen_eisenstein(2, 200).unwrap()));
        assert!(plus_support_check(&cohen_eisenstein(3, 200).unwrap()));
    }

    #[test]
    fn star_series() {
        assert_eq!(cohen_star(1, 3, 5).unwrap().coeff(0), qf(-1, 252));
        assert!(cohen_star(3, 1, 5).is_err());
        let s = cohen_star(3, 2, 501).unwrap();
        for n in (1..=500).filter(|n| n % 8 == 1) {
            assert_eq!(s.coeff(n), q(0));
        }
        assert!(plus_support_check(&s));
        let e = cohen_star(5, 1, 300).unwrap();
        let t3 = theta_power_series(3, 300);
        for n in (0..300).filter(|n| n % 4 == 0 || n % 4 == 3) {
            assert_eq!(q(-12) * e.coeff(n), t3.coeff(n), "N={n}");
        }
    }

    #[test]
    fn star_closed_forms() {
        // odd conductor and even conductor closed forms for H*
        for (r, k) in [(3i64, 2i64), (7, 2), (1, 3), (5, 3)] {
            let chi = q(kronecker_symbol(8, r) as i64);
            let one_plus = q(1) + &chi * qpow(2, k);
            let sgn = if k % 2 == 0 { 1 } else { -1 };
            for n in 1..300i64 {
                if !matches!((sgn * n).rem_euclid(4), 0 | 1) {
                    continue;
                }
                let fd = crate::arith::fund_decomp(sgn * n).unwrap();
                let want = if fd.cond % 2 == 1 {
                    (q(1) + &chi * q(kronecker_symbol(8, fd.fund) as i64)) * cohen_h(k, n).unwrap()
                        / &one_plus
                } else {
                    (cohen_h(k, n).unwrap() + &chi * qpow(2, k) * cohen_h(k, n / 4).unwrap())
                        / &one_plus
                };
                assert_eq!(h_star(r, k, n).unwrap(), want, "r={r} k={k} N={n}");
            }
        }
    }

    #[test]
    fn e_3_2_8_basics() {
        let e = e_3_2_8(60);
        assert_eq!(e.coeff(0), q(1));
        assert_eq!(e.coeff(3), q(8));
        assert_eq!(e.coeff(7), q(0));
        assert!(plus_support_check(&e));
        let z = zagier_hol(240);
        let alt = z.series().uk4(1).unwrap().sub(&z.series().truncate(60).scale(&q(2))).scale(&q(12));
        assert_eq!(&alt, e.series());
        assert_eq!(uk4_eigen_sign(&e_3_2_8(200), 1), Some(q(1)));
        let t3 = theta_pow(3, 60).unwrap();
        let claimed = HalfIntForm { plus_class: Some(5), level: 8, ..t3 };
        assert!(!plus_support_check(&claimed));
        let zero = HalfIntForm::new(1, 8, QSeries::zero(1, 20), Some(5)).unwrap();
        assert!(plus_support_check(&zero));
        assert_eq!(uk4_eigen_sign(&HalfIntForm::new(1, 4, QSeries::one(40), None).unwrap(), 1), Some(q(1)));
        assert_eq!(uk4_eigen_sign(&cohen_eisenstein(2, 400).unwrap(), 2), None);
    }

    #[test]
    fn hecke_eigen() {
        for k in [2i64, 3] {
            let h = cohen_eisenstein(k, 25 * 40).unwrap();
            for p in [3i64, 5] {
                let t = hecke_t_p2(&h, p).unwrap();
                let lam = q(1) + qpow(p, 2 * k - 1);
                assert_eq!(t.series(), &h.series().truncate(t.prec()).scale(&lam));
            }
        }
        let e = e_3_2_8(9 * 50);
        assert_eq!(hecke_t_p2(&e, 3).unwrap().series(), &e.series().truncate(50).scale(&q(4)));
        assert!(hecke_t_p2(&e, 2).is_err());
        assert!(hecke_t_p2(&e, 9).is_err());
        let z = HalfIntForm::new(1, 8, QSeries::zero(1, 90), Some(5)).unwrap();
        assert!(hecke_t_p2(&z, 3).unwrap().series().is_zero());
    }

    #[test]
    fn star_relation_small() {
        for (r, k) in [(3, 2), (7, 2), (1, 3), (5, 3)] {
            assert!(star_relation_defect(r, k, 60).unwrap().is_zero());
        }
    }

    #[test]
    fn theta_identities_small() {
        let e2 = |prec: i64| {
            QSeries::from_fn(prec, |n| {
                if n == 0 {
                    q(1)
                } else {
                    q(24 * (sigma1(n) - if n % 2 == 0 { 2 * sigma1(n / 2) } else { 0 }))
                }
            })
        };
        let prec = 120;
        let lhs = theta(prec).series().mul(e_3_2_8(prec).series());
        let rhs = e2(prec)
            .scale(&qf(1, 12))
            .sub(&e2(prec).rescale(2).scale(&qf(1, 12)))
            .add(&e2(prec).rescale(4));
        assert!(lhs.agrees_below(&rhs, prec));
    }
}
