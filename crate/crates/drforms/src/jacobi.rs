//! Jacobi forms of index `D_r`, `r ∈ {1,3,5,7}`, kept as their four theta
//! components.
//!
//! Component `j` stores `c(n′, v_j)` at the discriminant `N = 8(n′ − β(v_j))`
//! on the `q^{N/8}` grid. Only `N ≡ -j²r mod 8` can carry a coefficient.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, kronecker_symbol, r3_table, zeta_one_minus_2k};
use crate::error::{Error, Result};
use crate::halfint::h_star;
use crate::qseries::QSeries;
use crate::rat::{q, qf, qpow, Q};

/// The lattice `D_r`; its discriminant group is cyclic of order 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrIndex {
    r: i64,
}

impl DrIndex {
    pub fn new(r: i64) -> Result<Self> {
        if [1, 3, 5, 7].contains(&r) {
            Ok(DrIndex { r })
        } else {
            Err(Error::Domain(format!("rank must be 1, 3, 5 or 7, got {r}")))
        }
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// `β(v_j) = j²r/8 mod 1`.
    pub fn beta(&self, j: usize) -> Q {
        let n = (j as i64 * j as i64 * self.r).rem_euclid(8);
        qf(n, 8)
    }

    /// The residue mod 8 that discriminants of class `j` must have.
    pub fn residue(&self, j: usize) -> i64 {
        (-(j as i64 * j as i64) * self.r).rem_euclid(8)
    }

    /// Class of `x ∈ D_r^♯` in `D_r^♯/D_r ≅ ℤ/4`.
    pub fn coset_class(&self, x: &[Q]) -> Result<usize> {
        let twice = self.doubled(x)?;
        let all_even = twice.iter().all(|t| t % 2 == 0);
        let all_odd = twice.iter().all(|t| t % 2 != 0);
        if all_even {
            let s: i64 = twice.iter().map(|t| t / 2).sum();
            Ok(if s % 2 == 0 { 0 } else { 2 })
        } else if all_odd {
            // Σ(x − v₁) = (Σ 2x_i − r)/2
            let s: i64 = (twice.iter().sum::<i64>() - self.r) / 2;
            Ok(if s % 2 == 0 { 1 } else { 3 })
        } else {
            Err(Error::Domain("vector is not in the dual lattice".into()))
        }
    }

    fn doubled(&self, x: &[Q]) -> Result<Vec<i64>> {
        if x.len() as i64 != self.r {
            return Err(Error::Domain(format!(
                "vector has {} coordinates, rank is {}",
                x.len(),
                self.r
            )));
        }
        x.iter()
            .map(|c| {
                let t = c * q(2);
                crate::rat::to_i64(&t)
                    .ok_or_else(|| Error::Domain("vector is not in the dual lattice".into()))
            })
            .collect()
    }

    /// `8(n′ − β(x))` for `x ∈ D_r^♯`.
    pub fn discriminant(&self, n_prime: i64, x: &[Q]) -> Result<i64> {
        let t = self.doubled(x)?;
        Ok(8 * n_prime - t.iter().map(|v| v * v).sum::<i64>())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiFormDr {
    index: DrIndex,
    weight: i64,
    components: [QSeries; 4],
}

impl JacobiFormDr {
    /// Components must sit on the den-8 grid; they are cut to a common precision.
    pub fn new(r: i64, weight: i64, components: [QSeries; 4]) -> Result<Self> {
        let index = DrIndex::new(r)?;
        if let Some(c) = components.iter().find(|c| c.den() != 8) {
            return Err(Error::Domain(format!(
                "theta components live on the den-8 grid, got den {}",
                c.den()
            )));
        }
        let prec = components.iter().map(|c| c.prec()).min().unwrap();
        let components = components.map(|c| c.truncate(prec));
        Ok(JacobiFormDr {
            index,
            weight,
            components,
        })
    }

    pub fn zero(r: i64, weight: i64, prec: i64) -> Result<Self> {
        let z = QSeries::zero(8, prec);
        Self::new(r, weight, [z.clone(), z.clone(), z.clone(), z])
    }

    pub fn index(&self) -> DrIndex {
        self.index
    }

    pub fn r(&self) -> i64 {
        self.index.r
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// `k` with weight `k + (r+1)/2`.
    pub fn k(&self) -> i64 {
        self.weight - (self.index.r + 1) / 2
    }

    pub fn prec(&self) -> i64 {
        self.components[0].prec()
    }

    pub fn component(&self, j: usize) -> &QSeries {
        &self.components[j]
    }

    pub fn components(&self) -> &[QSeries; 4] {
        &self.components
    }

    /// `A_j(N)`; zero for `N < 0`.
    pub fn a(&self, j: usize, n: i64) -> Result<Q> {
        if n < 0 {
            return Ok(Q::zero());
        }
        self.components[j].try_coeff(n)
    }

    /// `c(n′, x)`.
    pub fn fourier_coeff(&self, n_prime: i64, x: &[Q]) -> Result<Q> {
        let j = self.index.coset_class(x)?;
        let n = self.index.discriminant(n_prime, x)?;
        self.a(j, n)
    }

    pub fn scale(&self, c: &Q) -> Self {
        JacobiFormDr {
            components: self.components.clone().map(|s| s.scale(c)),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.index != other.index || self.weight != other.weight {
            return Err(Error::Domain("adding Jacobi forms of different type".into()));
        }
        let c = std::array::from_fn(|j| self.components[j].add(&other.components[j]));
        Self::new(self.r(), self.weight, c)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        JacobiFormDr {
            components: self.components.clone().map(|s| s.truncate(prec)),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// `λ` with `self = λ·other` on the common range, if it exists.
    pub fn ratio_to(&self, other: &Self) -> Option<Q> {
        let prec = self.prec().min(other.prec());
        let a = self.truncate(prec);
        let b = other.truncate(prec);
        let (j, (e, c)) = b
            .components
            .iter()
            .enumerate()
            .find_map(|(j, s)| s.terms().next().map(|t| (j, t)))?;
        let lambda = a.components[j].get(e).cloned().unwrap_or_else(Q::zero) / c;
        (a == b.scale(&lambda)).then_some(lambda)
    }

    /// `A₀(0) = 0`.
    pub fn is_cusp(&self) -> bool {
        self.prec() < 1 || self.components[0].get(0).is_none()
    }

    /// Structural violations, empty when the form is well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for j in 0..4 {
            let res = self.index.residue(j);
            for (n, _) in self.components[j].terms() {
                if n < 0 || n.rem_euclid(8) != res {
                    out.push(format!("A_{j}({n}) is nonzero but N must be >= 0 and = {res} mod 8"));
                }
            }
        }
        if self.weight.rem_euclid(2) == 0 {
            if self.components[1] != self.components[3] {
                out.push("even weight needs A_1 = A_3".into());
            }
        } else {
            if !self.components[0].is_zero() || !self.components[2].is_zero() {
                out.push("odd weight needs A_0 = A_2 = 0".into());
            }
            if self.components[1] != self.components[3].neg() {
                out.push("odd weight needs A_1 = -A_3".into());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct JacobiRepr {
    r: i64,
    weight: i64,
    prec: i64,
    components: Vec<QSeries>,
}

impl Serialize for JacobiFormDr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JacobiRepr {
            r: self.r(),
            weight: self.weight,
            prec: self.prec(),
            components: self.components.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JacobiFormDr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = JacobiRepr::deserialize(d)?;
        let comps: [QSeries; 4] = r
            .components
            .try_into()
            .map_err(|_| D::Error::custom("expected exactly four components"))?;
        if comps.iter().any(|c| c.prec() != r.prec) {
            return Err(D::Error::custom("component precision differs from prec"));
        }
        JacobiFormDr::new(r.r, r.weight, comps).map_err(D::Error::custom)
    }
}

/// `(r, k)` pairs with an Eisenstein series: weight `k + (r+1)/2` even and
/// `k ≥ 2`, plus `(5, 1)`.
pub fn eisenstein_supported(r: i64, k: i64) -> Result<()> {
    DrIndex::new(r)?;
    let w = k + (r + 1) / 2;
    if w % 2 != 0 {
        return Err(Error::Unsupported {
            r,
            k,
            reason: "weight k + (r+1)/2 is odd, so every form is a cusp form".into(),
        });
    }
    if (r, k) == (7, 0) {
        return Err(Error::Unsupported {
            r,
            k,
            reason: "weight 4 index D_7 Eisenstein series (a theta series) is not implemented"
                .into(),
        });
    }
    if k < 2 && (r, k) != (5, 1) {
        return Err(Error::Unsupported {
            r,
            k,
            reason: "needs k >= 2 or (r, k) = (5, 1)".into(),
        });
    }
    Ok(())
}

/// Discriminant coefficient `A(N)` of `E_{k+(r+1)/2, D_r}` (class fixed by `N mod 8`).
pub fn eisenstein_coeff(r: i64, k: i64, n: i64) -> Result<Q> {
    eisenstein_supported(r, k)?;
    if n < 0 {
        return Ok(Q::zero());
    }
    if n == 0 {
        return Ok(q(1));
    }
    let res = n.rem_euclid(8);
    let half = if res == 0 || res == 4 {
        false
    } else if (res + r) % 8 == 0 {
        true
    } else {
        return Ok(Q::zero());
    };
    let base = if (r, k) == (5, 1) {
        q(crate::arith::r_m(3, n) as i64)
    } else {
        h_star(r, k, n)? / zeta_one_minus_2k(k)
    };
    Ok(if half { base / q(2) } else { base })
}

/// `E_{k+(r+1)/2, D_r}` with discriminants below `prec`.
pub fn eisenstein(r: i64, k: i64, prec: i64) -> Result<JacobiFormDr> {
    eisenstein_supported(r, k)?;
    let index = DrIndex::new(r)?;
    let w = k + (r + 1) / 2;
    let r3 = ((r, k) == (5, 1)).then(|| r3_table(prec.max(1) as usize));
    let mut comps: [QSeries; 4] = std::array::from_fn(|_| QSeries::zero(8, prec));
    for n in 0..prec {
        let j = match n.rem_euclid(8) {
            0 => 0,
            4 => 2,
            x if x == index.residue(1) => 1,
            _ => continue,
        };
        let c = match &r3 {
            Some(t) if n > 0 => {
                let v = q(t[n as usize] as i64);
                if j == 1 {
                    v / q(2)
                } else {
                    v
                }
            }
            _ => eisenstein_coeff(r, k, n)?,
        };
        if j == 1 {
            comps[3].add_term(n, c.clone());
        }
        comps[j].add_term(n, c);
    }
    JacobiFormDr::new(r, w, comps)
}

/// `T^J(p)` (also written `T^J(p²)`): on component `j`,
/// `A_{pj}(p²N) + s·p^{k-1}(N/p)A_j(N) + p^{2k-1}A_{pj}(N/p²)`.
pub fn hecke_tj(phi: &JacobiFormDr, p: i64) -> Result<JacobiFormDr> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let k = phi.k();
    let p2 = p * p;
    let prec = phi.prec().div_euclid(p2);
    let sgn_k = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    let s = if phi.weight.rem_euclid(2) == 0 {
        kronecker_symbol(sgn_k, p)
    } else {
        kronecker_symbol(-sgn_k, p)
    } as i64;
    let mid = q(s) * qpow(p, k - 1);
    let last = qpow(p, 2 * k - 1);
    let mut comps: [QSeries; 4] = std::array::from_fn(|_| QSeries::zero(8, prec));
    for (j, out) in comps.iter_mut().enumerate() {
        let pj = (p as usize * j) % 4;
        let res = phi.index.residue(j);
        let mut n = res;
        while n < prec {
            let mut c = phi.a(pj, p2 * n)?;
            let chi = kronecker_symbol(n, p);
            if chi != 0 {
                c += q(chi as i64) * &mid * phi.a(j, n)?;
            }
            if n % p2 == 0 {
                c += &last * phi.a(pj, n / p2)?;
            }
            out.add_term(n, c);
            n += 8;
        }
    }
    JacobiFormDr::new(phi.r(), phi.weight, comps)
}
