//! Integral-weight forms on `SL₂(ℤ)` and `Γ₀(2)`: Eisenstein series, the
//! monomial basis in `E₂^{(2)}` and `E₄`, Hecke operators, newform
//! extraction and Fricke signs.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, sigma1, sigma_int, zeta_one_minus_2k};
use crate::error::{Error, Result};
use crate::etaforms::{level1_dim, level1_eisenstein};
use crate::linalg::{self, Mat};
use crate::qseries::QSeries;
use crate::rat::{fmt_rat, q, qi, qpow, Q};

/// Primes recorded in the eigenvalue tables of extracted newforms.
pub const RECORD_PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModForm {
    pub weight: i64,
    pub level: u32,
    #[serde(flatten)]
    pub series: QSeries,
}

impl ModForm {
    pub fn new(weight: i64, level: u32, series: QSeries) -> Result<Self> {
        if weight < 0 || weight % 2 != 0 {
            return Err(Error::Domain(format!("weight must be even and >= 0, got {weight}")));
        }
        if level != 1 && level != 2 {
            return Err(Error::Domain(format!("level must be 1 or 2, got {level}")));
        }
        if series.den() != 1 {
            return Err(Error::FractionalGrid(series.den()));
        }
        Ok(ModForm {
            weight,
            level,
            series,
        })
    }

    pub fn prec(&self) -> i64 {
        self.series.prec()
    }

    pub fn coeff(&self, n: i64) -> Q {
        self.series.coeff(n)
    }

    /// Whether the precision reaches the Sturm bound.
    pub fn certified(&self) -> bool {
        self.prec() > sturm_bound(self.weight, self.level)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `weight·[SL₂(ℤ):Γ₀(N)]/12`.
pub fn sturm_bound(weight: i64, level: u32) -> i64 {
    let index = if level == 1 { 1 } else { 3 };
    weight * index / 12
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub label: String,
    /// At level 2 the entry for `p = 2` is the `U(2)` eigenvalue.
    #[serde(with = "crate::rat::serde_rat_map")]
    pub eigenvalues: BTreeMap<i64, Q>,
    pub fricke: Option<i32>,
}

/// `E_{2k}` with constant term 1.
pub fn eisenstein_2k(w: i64, prec: i64) -> Result<ModForm> {
    ModForm::new(w, 1, level1_eisenstein(w, prec)?)
}

/// `𝔾_{2k} = ζ(1-2k)/2 + Σ σ_{2k-1}(n) q^n`.
pub fn g_series(w: i64, prec: i64) -> Result<ModForm> {
    if w < 4 || w % 2 != 0 {
        return Err(Error::Domain(format!("𝔾 needs even weight >= 4, got {w}")));
    }
    let c0 = zeta_one_minus_2k(w / 2) / q(2);
    let s = QSeries::from_fn(prec, |n| {
        if n == 0 {
            c0.clone()
        } else {
            qi(sigma_int((w - 1) as u32, n))
        }
    });
    ModForm::new(w, 1, s)
}

/// `E₂^{(2)} = 2E₂(2τ) - E₂(τ) = 1 + 24 Σ (σ(n) - 2σ(n/2)) q^n`.
pub fn e2_level2(prec: i64) -> ModForm {
    let s = QSeries::from_fn(prec, |n| {
        if n == 0 {
            return q(1);
        }
        let half = if n % 2 == 0 { sigma1(n / 2) } else { 0 };
        q(24 * (sigma1(n) - 2 * half))
    });
    ModForm::new(2, 2, s).unwrap()
}

/// `dim M_{2k}(Γ₀(2)) = 1 + ⌊k/2⌋`.
pub fn level2_dim(w: i64) -> usize {
    if w < 0 || w % 2 != 0 {
        0
    } else {
        1 + (w / 4) as usize
    }
}

/// `dim S_{2k}(1)`.
pub fn level1_cusp_dim(w: i64) -> usize {
    if w < 12 {
        0
    } else {
        level1_dim(w) - 1
    }
}

/// `dim S_{2k}(Γ₀(2))`.
pub fn level2_cusp_dim(w: i64) -> usize {
    match w {
        2 => 0,
        _ if w >= 4 => level2_dim(w) - 2,
        _ => 0,
    }
}

fn monomial_exponents(w: i64) -> Vec<(u32, u32)> {
    (0..=w / 4).map(|b| (((w - 4 * b) / 2) as u32, b as u32)).collect()
}

/// Monomials `(E₂^{(2)})^a E₄^b`, `2a + 4b = 2k`, checked to be a basis of
/// `M_{2k}(Γ₀(2))` by rank.
pub fn m2k_level2_basis(w: i64, prec: i64) -> Result<Vec<ModForm>> {
    if w < 2 || w % 2 != 0 {
        return Err(Error::Domain(format!("weight must be even and >= 2, got {w}")));
    }
    let work = prec.max(sturm_bound(w, 2) + 1);
    let e2 = e2_level2(work).series;
    let e4 = level1_eisenstein(4, work)?;
    let forms: Vec<QSeries> = monomial_exponents(w)
        .into_iter()
        .map(|(a, b)| e2.pow(a).mul(&e4.pow(b)).truncate(work))
        .collect();
    let rows = coeff_rows(&forms, sturm_bound(w, 2) + 1);
    let rk = linalg::rank(&rows);
    if rk != level2_dim(w) {
        return Err(Error::LinearAlgebra(format!(
            "monomials of weight {w} have rank {rk}, expected {}",
            level2_dim(w)
        )));
    }
    forms
        .into_iter()
        .map(|f| ModForm::new(w, 2, f.truncate(prec)))
        .collect()
}

fn coeff_rows(forms: &[QSeries], len: i64) -> Mat {
    forms
        .iter()
        .map(|f| (0..len).map(|n| f.coeff(n)).collect())
        .collect()
}

/// `T(p)`: `a(pn) + p^{2k-1} a(n/p)`; at level 2 and `p = 2` this is `U(2)`.
pub fn hecke_tp(f: &ModForm, p: i64) -> Result<ModForm> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let prec = f.prec().div_euclid(p);
    let old = f.level == 1 || p != 2;
    let last = qpow(p, f.weight - 1);
    let s = QSeries::from_fn(prec, |n| {
        let mut c = f.coeff(p * n);
        if old && n % p == 0 {
            c += &last * f.coeff(n / p);
        }
        c
    });
    ModForm::new(f.weight, f.level, s)
}

/// `λ_p` for each `p` in `primes`, requiring `f|T(p) = λ_p f` on the
/// certified range.
pub fn eigen_record(label: &str, f: &ModForm, primes: &[i64]) -> Result<EigenRecord> {
    let mut eigenvalues = BTreeMap::new();
    for &p in primes {
        let t = hecke_tp(f, p)?;
        let lambda = t.series.ratio_to(&f.series).ok_or_else(|| {
            Error::LinearAlgebra(format!("{label} is not a T({p}) eigenform to precision"))
        })?;
        eigenvalues.insert(p, lambda);
    }
    Ok(EigenRecord {
        label: label.to_string(),
        eigenvalues,
        fricke: None,
    })
}

/// `ε` from `c = -2^{1-k} a_2` and `ε = c·(-1)^k`, with `a_2` the `U(2)`
/// eigenvalue.
pub fn fricke_sign(rec: &EigenRecord, w: i64) -> Result<i32> {
    let k = w / 2;
    let a2 = rec
        .eigenvalues
        .get(&2)
        .ok_or_else(|| Error::Domain(format!("{} has no a(2)", rec.label)))?;
    if a2.abs() != qpow(2, k - 1) {
        return Err(Error::Domain(format!(
            "{}: |a(2)| = {} but a newform of weight {w} needs 2^{}",
            rec.label,
            fmt_rat(&a2.abs()),
            k - 1
        )));
    }
    let c = -qpow(2, 1 - k) * a2;
    let eps = if k % 2 == 0 { c } else { -c };
    Ok(if eps.is_positive() { 1 } else { -1 })
}

/// A `T(3)`-stable piece of the new space with no rational eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrationalBlock {
    pub dim: usize,
    /// Monic, lowest degree first.
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub charpoly: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewformDecomposition {
    pub weight: i64,
    pub newforms: Vec<(ModForm, EigenRecord)>,
    pub irrational: Vec<IrrationalBlock>,
}

/// Working space: monomial basis at a precision where `T(p)` for the recorded
/// primes still reaches past the Sturm bound.
struct Space {
    w: i64,
    basis: Vec<QSeries>,
    sturm_rows: Mat,
}

impl Space {
    fn new(w: i64) -> Result<Self> {
        let sturm = sturm_bound(w, 2) + 1;
        let work = 13 * (sturm + 1);
        let basis: Vec<QSeries> = m2k_level2_basis(w, work)?
            .into_iter()
            .map(|f| f.series)
            .collect();
        let sturm_rows = coeff_rows(&basis, sturm);
        Ok(Space {
            w,
            basis,
            sturm_rows,
        })
    }

    fn coords(&self, f: &QSeries) -> Result<Vec<Q>> {
        let len = self.sturm_rows[0].len() as i64;
        let t: Vec<Q> = (0..len).map(|n| f.coeff(n)).collect();
        linalg::solve_left(&self.sturm_rows, &t)
            .ok_or_else(|| Error::LinearAlgebra("series is not in the space".into()))
    }

    fn combine(&self, v: &[Q]) -> QSeries {
        let prec = self.basis[0].prec();
        v.iter()
            .zip(&self.basis)
            .filter(|(c, _)| !c.is_zero())
            .fold(QSeries::zero(1, prec), |acc, (c, b)| acc.add(&b.scale(c)))
    }

    fn operator(&self, p: i64) -> Result<Mat> {
        self.basis
            .iter()
            .map(|b| {
                let f = ModForm::new(self.w, 2, b.clone())?;
                self.coords(&hecke_tp(&f, p)?.series)
            })
            .collect()
    }
}

/// Matrix of `A` restricted to the invariant subspace with basis rows `v`.
fn restrict(v: &Mat, a: &Mat) -> Result<Mat> {
    linalg::mul(v, a)
        .iter()
        .map(|row| {
            linalg::solve_left(v, row)
                .ok_or_else(|| Error::LinearAlgebra("subspace is not invariant".into()))
        })
        .collect()
}

/// Basis rows of `{x ∈ span(v) : x(A - λ) = 0}`.
fn eigen_subspace(v: &Mat, a: &Mat, lambda: &Q) -> Mat {
    let m = linalg::mul(v, &linalg::sub_scalar(a, lambda));
    let ker = linalg::left_kernel(&m);
    if ker.is_empty() {
        return Vec::new();
    }
    linalg::mul(&ker, v)
}

fn integer_roots(poly: &[Q], bound: i64) -> Vec<Q> {
    let mut p = poly.to_vec();
    let mut roots = Vec::new();
    for x in -bound..=bound {
        let xq = q(x);
        while p.len() > 1 && linalg::eval_poly(&p, &xq).is_zero() {
            p = linalg::deflate(&p, &xq);
            roots.push(xq.clone());
        }
    }
    roots
}

/// Newforms in `S_{2k}(Γ₀(2))` with rational Hecke eigenvalues, normalized
/// to `a(1) = 1` and returned at precision `prec`.
///
/// The cusp space is the image of `T(3) - (1 + 3^{2k-1})`, and the new space
/// is the kernel of `U(2)² - 2^{2k-2}` on it.
pub fn newform_extract(w: i64, prec: i64) -> Result<NewformDecomposition> {
    if w < 4 || w % 2 != 0 {
        return Err(Error::Domain(format!("newform extraction needs even weight >= 4, got {w}")));
    }
    let space = Space::new(w)?;
    let t3 = space.operator(3)?;
    let u2 = space.operator(2)?;

    let eis = q(1) + qpow(3, w - 1);
    let cusp = linalg::row_space(&linalg::sub_scalar(&t3, &eis));
    let u2sq = linalg::mul(&u2, &u2);
    let new = eigen_subspace(&cusp, &u2sq, &qpow(2, w - 2));
    let new = linalg::row_space(&new);
    let expected = level2_cusp_dim(w) - 2 * level1_cusp_dim(w);
    if cusp.len() != level2_cusp_dim(w) || new.len() != expected {
        return Err(Error::LinearAlgebra(format!(
            "weight {w}: cusp dim {} (expected {}), new dim {} (expected {expected})",
            cusp.len(),
            level2_cusp_dim(w),
            new.len()
        )));
    }

    let mut out = NewformDecomposition {
        weight: w,
        newforms: Vec::new(),
        irrational: Vec::new(),
    };
    if new.is_empty() {
        return Ok(out);
    }
    let t3_new = restrict(&new, &t3)?;
    let poly = linalg::charpoly(&t3_new);
    // Deligne: |λ_3| ≤ 2·3^{(2k-1)/2}
    let bound = 2 * (3f64.powf((w - 1) as f64 / 2.0)).ceil() as i64;
    let mut roots = integer_roots(&poly, bound);
    roots.dedup();
    let mut rational_dim = 0;
    let mut vectors = Vec::new();
    for lambda in &roots {
        let sub = eigen_subspace(&new, &t3, lambda);
        rational_dim += sub.len();
        if sub.len() == 1 {
            vectors.push(sub[0].clone());
        } else {
            vectors.extend(split(&space, &sub)?);
        }
    }
    if rational_dim < new.len() {
        let mut rest = poly.clone();
        for lambda in &roots {
            while linalg::eval_poly(&rest, lambda).is_zero() && rest.len() > 1 {
                rest = linalg::deflate(&rest, lambda);
            }
        }
        out.irrational.push(IrrationalBlock {
            dim: rest.len() - 1,
            charpoly: rest,
        });
    }
    let mut forms: Vec<(ModForm, EigenRecord)> = Vec::new();
    for v in vectors {
        let mut series = space.combine(&v);
        let a1 = series.coeff(1);
        if a1.is_zero() {
            return Err(Error::LinearAlgebra("eigenvector has a(1) = 0".into()));
        }
        series = series.scale(&(Q::one() / a1));
        let norm = ModForm::new(w, 2, series)?;
        let mut rec = eigen_record("", &norm, &RECORD_PRIMES)?;
        rec.fricke = Some(fricke_sign(&rec, w)?);
        let coords = space.coords(&norm.series)?;
        let at_prec = recompute(w, &coords, prec)?;
        forms.push((ModForm::new(w, 2, at_prec)?, rec));
    }
    forms.sort_by(|a, b| a.1.eigenvalues[&3].cmp(&b.1.eigenvalues[&3]));
    for (i, (_, rec)) in forms.iter_mut().enumerate() {
        rec.label = format!("{w}.2.{}", (b'a' + i as u8) as char);
    }
    out.newforms = forms;
    Ok(out)
}

/// Splits a multi-dimensional `T(3)` eigenspace with `T(5)`.
fn split(space: &Space, sub: &Mat) -> Result<Vec<Vec<Q>>> {
    let t5 = space.operator(5)?;
    let r = restrict(sub, &t5)?;
    let poly = linalg::charpoly(&r);
    let bound = 2 * (5f64.powf((space.w - 1) as f64 / 2.0)).ceil() as i64;
    let mut roots = integer_roots(&poly, bound);
    roots.dedup();
    let mut out = Vec::new();
    for lambda in roots {
        let e = eigen_subspace(sub, &t5, &lambda);
        if e.len() != 1 {
            return Err(Error::LinearAlgebra(format!(
                "weight {}: T(3), T(5) leave a {}-dimensional eigenspace",
                space.w,
                e.len()
            )));
        }
        out.push(e[0].clone());
    }
    if out.len() != sub.len() {
        return Err(Error::LinearAlgebra(format!(
            "weight {}: T(5) has irrational eigenvalues on a T(3) eigenspace",
            space.w
        )));
    }
    Ok(out)
}

fn recompute(w: i64, coords: &[Q], prec: i64) -> Result<QSeries> {
    let basis = m2k_level2_basis(w, prec)?;
    Ok(coords
        .iter()
        .zip(&basis)
        .filter(|(c, _)| !c.is_zero())
        .fold(QSeries::zero(1, prec), |acc, (c, b)| acc.add(&b.series.scale(c))))
}

/// CSV rows `label,p,lambda,fricke`.
pub fn write_eigen_csv<W: std::io::Write>(records: &[EigenRecord], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["label", "p", "lambda", "fricke"])
        .map_err(|e| Error::Parse(e.to_string()))?;
    for rec in records {
        let fricke = rec.fricke.map(|f| f.to_string()).unwrap_or_default();
        for (p, l) in &rec.eigenvalues {
            wtr.write_record([rec.label.as_str(), &p.to_string(), &fmt_rat(l), &fricke])
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etaforms::eta;

    #[test]
    fn eisenstein_values() {
        let g4 = g_series(4, 10).unwrap();
        assert_eq!(g4.coeff(0), crate::rat::qf(1, 240));
        assert_eq!(g4.coeff(1), q(1));
        assert_eq!(eisenstein_2k(4, 5).unwrap().coeff(2), q(2160));
        assert!(g_series(5, 10).is_err());
        assert!(g_series(2, 10).is_err());
        let e2 = e2_level2(10);
        assert_eq!((e2.coeff(0), e2.coeff(1), e2.coeff(2)), (q(1), q(24), q(24)));
        assert_eq!(e2.coeff(3), q(96));
    }

    #[test]
    fn basis_dims() {
        for w in (2..=16).step_by(2) {
            let b = m2k_level2_basis(w, 40).unwrap();
            assert_eq!(b.len(), 1 + (w / 4) as usize, "w={w}");
        }
        assert_eq!(m2k_level2_basis(2, 10).unwrap().len(), 1);
        assert_eq!(m2k_level2_basis(8, 10).unwrap().len(), 3);
        assert_eq!(m2k_level2_basis(4, 10).unwrap().len(), 2);
    }

    #[test]
    fn eisenstein_splitting() {
        for w in [4i64, 8, 12, 16] {
            let prec = 60;
            let e = level1_eisenstein(w, prec).unwrap();
            let e_2 = e.rescale(2).truncate(prec);
            let space = Space::new(w).unwrap();
            let t3 = space.operator(3).unwrap();
            let cusp = linalg::row_space(&linalg::sub_scalar(&t3, &(q(1) + qpow(3, w - 1))));
            let mut rows = vec![space.coords(&e).unwrap(), space.coords(&e_2).unwrap()];
            rows.extend(cusp);
            assert_eq!(linalg::rank(&rows), level2_dim(w), "w={w}");
        }
    }

    #[test]
    fn hecke_eigen() {
        let e2 = e2_level2(200);
        for p in [3, 5, 7, 11, 13] {
            assert_eq!(hecke_tp(&e2, p).unwrap().series.ratio_to(&e2.series), Some(q(1 + p)));
        }
        assert_eq!(hecke_tp(&e2, 2).unwrap().series.ratio_to(&e2.series), Some(q(1)));
        let g4 = g_series(4, 100).unwrap();
        assert_eq!(hecke_tp(&g4, 3).unwrap().series.ratio_to(&g4.series), Some(q(28)));
        let z = ModForm::new(8, 2, QSeries::zero(1, 30)).unwrap();
        assert!(hecke_tp(&z, 3).unwrap().series.is_zero());
        let rec = eigen_record("E2", &e2, &[2, 3]).unwrap();
        assert_eq!(fricke_sign(&rec, 2).unwrap(), 1);
    }

    #[test]
    fn weight8_newform() {
        let dec = newform_extract(8, 50).unwrap();
        assert_eq!(dec.newforms.len(), 1);
        assert!(dec.irrational.is_empty());
        let (f, rec) = &dec.newforms[0];
        assert_eq!(rec.eigenvalues[&2], q(-8));
        assert_eq!(rec.fricke, Some(1));
        // η(τ)⁸η(2τ)⁸ oracle
        let e = eta(24 * 50);
        let e8 = e.pow(8);
        let e8_2 = e8.rescale(2).truncate(24 * 50);
        let oracle = e8.mul(&e8_2).coarsen(1).unwrap().truncate(50);
        assert_eq!(f.series, oracle);
        assert!(f.certified());
    }

    #[test]
    fn newform_counts() {
        assert!(newform_extract(4, 20).unwrap().newforms.is_empty());
        for w in [10i64, 12, 14, 16] {
            let dec = newform_extract(w, 30).unwrap();
            let n: usize = dec.newforms.len() + dec.irrational.iter().map(|b| b.dim).sum::<usize>();
            assert_eq!(n, level2_cusp_dim(w) - 2 * level1_cusp_dim(w), "w={w}");
            for (_, rec) in &dec.newforms {
                assert_eq!(rec.eigenvalues[&2].abs(), qpow(2, w / 2 - 1));
            }
        }
        assert_eq!(newform_extract(16, 20).unwrap().newforms.len(), 1);
    }

    #[test]
    fn fricke_rules() {
        let mut rec = EigenRecord {
            label: "x".into(),
            eigenvalues: BTreeMap::from([(2, q(-8))]),
            fricke: None,
        };
        assert_eq!(fricke_sign(&rec, 8).unwrap(), 1);
        rec.eigenvalues.insert(2, q(8));
        assert_eq!(fricke_sign(&rec, 8).unwrap(), -1);
        rec.eigenvalues.insert(2, q(4));
        assert!(fricke_sign(&rec, 8).is_err());
    }

    #[test]
    fn csv_export() {
        let rec = EigenRecord {
            label: "8.2.a".into(),
            eigenvalues: BTreeMap::from([(2, q(-8)), (3, q(12))]),
            fricke: Some(1),
        };
        let mut buf = Vec::new();
        write_eigen_csv(&[rec], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "label,p,lambda,fricke\n8.2.a,2,-8/1,1\n8.2.a,3,12/1,1\n"
        );
    }
}
