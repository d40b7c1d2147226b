//! The maps between Jacobi forms of index `D_r` and the half-integral,
//! eta-type and level-2 sides: `𝒥^even`, `𝒥^odd`, their inverses, the
//! `S_{d₀}` maps, and an eigenvalue-chain verifier.

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::{divisors, is_fundamental, isqrt, kronecker_symbol, l_value};
use crate::error::{Error, Result};
use crate::etaforms::{eta_pow, eta_type_basis, level1_dim, twisted_hecke, EtaTypeForm};
use crate::halfint::{
    e_3_2_8, hecke_t_p2, plus_support_check, theta_power_series, HalfIntForm,
};
use crate::jacobi::{eisenstein, eisenstein_coeff, eisenstein_supported, hecke_tj, JacobiFormDr};
use crate::level2::{
    e2_level2, eigen_record, fricke_sign, g_series, hecke_tp, m2k_level2_basis, newform_extract,
    ModForm,
};
use crate::linalg;
use crate::qseries::QSeries;
use crate::rat::{fmt_rat, q, qpow, Q};

/// `ε₁ = -(-4/r)` and `ε₂ = -(-8/r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceSigns {
    pub r: i64,
    pub eps1: i32,
    pub eps2: i32,
}

impl CorrespondenceSigns {
    pub fn new(r: i64) -> Result<Self> {
        crate::jacobi::DrIndex::new(r)?;
        Ok(CorrespondenceSigns {
            r,
            eps1: -kronecker_symbol(-4, r),
            eps2: -kronecker_symbol(-8, r),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Even,
    Odd,
}

/// Parameters of `S_{d₀}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SD0Config {
    pub r: i64,
    pub k: i64,
    pub d0: i64,
    pub branch: Branch,
}

impl SD0Config {
    /// Even branch: `(-1)^k d₀` fundamental and `d₀ ≡ 0 mod 4`.
    /// Odd branch: `(-1)^{k-1} d₀` fundamental and `d₀ ≡ -r mod 8`.
    pub fn new(r: i64, k: i64, d0: i64, branch: Branch) -> Result<Self> {
        crate::jacobi::DrIndex::new(r)?;
        if d0 < 1 {
            return Err(Error::Domain(format!("d0 must be positive, got {d0}")));
        }
        let sgn = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        match branch {
            Branch::Even => {
                if !is_fundamental(sgn * d0) {
                    return Err(Error::NotFundamental(sgn * d0));
                }
                if d0 % 4 != 0 {
                    return Err(Error::Domain(format!("even branch needs d0 = 0 mod 4, got {d0}")));
                }
            }
            Branch::Odd => {
                if !is_fundamental(-sgn * d0) {
                    return Err(Error::NotFundamental(-sgn * d0));
                }
                if (d0 + r) % 8 != 0 {
                    return Err(Error::Domain(format!("odd branch needs d0 = -{r} mod 8, got {d0}")));
                }
            }
        }
        Ok(SD0Config { r, k, d0, branch })
    }

    /// `(-1)^k d₀`, the top of the character `((-1)^k d₀ / d)`.
    pub fn chi_top(&self) -> i64 {
        if self.k.rem_euclid(2) == 0 {
            self.d0
        } else {
            -self.d0
        }
    }
}

/// Discriminant-indexed coefficients `A(N)` feeding the `S_{d₀}` maps: the
/// `𝒥^even` coefficients for even weight, `A₁(N)` for odd weight.
pub trait CoefficientSource {
    fn r(&self) -> i64;
    fn k(&self) -> i64;
    fn branch(&self) -> Branch;
    fn coeff(&self, n: i64) -> Result<Q>;
    /// Exclusive bound on `N`; `None` when every `N` is available.
    fn bound(&self) -> Option<i64>;
}

impl CoefficientSource for JacobiFormDr {
    fn r(&self) -> i64 {
        JacobiFormDr::r(self)
    }
    fn k(&self) -> i64 {
        JacobiFormDr::k(self)
    }
    fn branch(&self) -> Branch {
        if self.weight() % 2 == 0 {
            Branch::Even
        } else {
            Branch::Odd
        }
    }
    fn coeff(&self, n: i64) -> Result<Q> {
        match self.branch() {
            Branch::Even => even_coeff(self, n),
            Branch::Odd => self.a(1, n),
        }
    }
    fn bound(&self) -> Option<i64> {
        Some(self.prec())
    }
}

impl CoefficientSource for HalfIntForm {
    fn r(&self) -> i64 {
        self.plus_class().unwrap_or(0)
    }
    fn k(&self) -> i64 {
        HalfIntForm::k(self)
    }
    fn branch(&self) -> Branch {
        Branch::Even
    }
    fn coeff(&self, n: i64) -> Result<Q> {
        if n < 0 {
            return Ok(Q::zero());
        }
        self.series().try_coeff(n)
    }
    fn bound(&self) -> Option<i64> {
        Some(self.prec())
    }
}

impl CoefficientSource for EtaTypeForm {
    fn r(&self) -> i64 {
        8 - self.s() / 3
    }
    fn k(&self) -> i64 {
        EtaTypeForm::k(self)
    }
    fn branch(&self) -> Branch {
        Branch::Odd
    }
    fn coeff(&self, n: i64) -> Result<Q> {
        if n < 0 {
            return Ok(Q::zero());
        }
        self.series().try_coeff(n)
    }
    fn bound(&self) -> Option<i64> {
        Some(self.prec())
    }
}

/// `𝒥^even(E_{k+(r+1)/2, D_r})`, with each coefficient computed on demand.
#[derive(Clone, Copy, Debug)]
pub struct EisensteinSource {
    r: i64,
    k: i64,
}

impl EisensteinSource {
    pub fn new(r: i64, k: i64) -> Result<Self> {
        eisenstein_supported(r, k)?;
        Ok(EisensteinSource { r, k })
    }
}

impl CoefficientSource for EisensteinSource {
    fn r(&self) -> i64 {
        self.r
    }
    fn k(&self) -> i64 {
        self.k
    }
    fn branch(&self) -> Branch {
        Branch::Even
    }
    fn coeff(&self, n: i64) -> Result<Q> {
        let a = eisenstein_coeff(self.r, self.k, n)?;
        Ok(if n > 0 && (n + self.r) % 8 == 0 { a * q(2) } else { a })
    }
    fn bound(&self) -> Option<i64> {
        None
    }
}

fn even_coeff(phi: &JacobiFormDr, n: i64) -> Result<Q> {
    let r = phi.r();
    match n.rem_euclid(8) {
        0 => phi.a(0, n),
        4 => phi.a(2, n),
        x if (x + r) % 8 == 0 => Ok(phi.a(1, n)? * q(2)),
        _ => Ok(Q::zero()),
    }
}

/// `Σ_j h_j(8τ)`: a level-8 form in the plus space of class `r`.
pub fn j_even(phi: &JacobiFormDr) -> Result<HalfIntForm> {
    if phi.weight() % 2 != 0 {
        return Err(Error::Parity(format!("j_even needs even weight, got {}", phi.weight())));
    }
    let prec = phi.prec();
    let mut s = QSeries::zero(1, prec);
    for j in [0usize, 1, 2] {
        for (n, _) in phi.component(j).terms() {
            s.add_term(n, even_coeff(phi, n)?);
        }
    }
    HalfIntForm::new(phi.k(), 8, s, Some(phi.r()))
}

/// Splits a class-`r` plus-space form back into theta components.
pub fn j_even_inverse(g: &HalfIntForm) -> Result<JacobiFormDr> {
    let r = g
        .plus_class()
        .ok_or_else(|| Error::Support("j_even_inverse needs a plus class".into()))?;
    if !plus_support_check(g) {
        return Err(Error::Support(format!("form is not in the class-{r} plus space")));
    }
    let prec = g.prec();
    let mut comps: [QSeries; 4] = std::array::from_fn(|_| QSeries::zero(8, prec));
    for (n, c) in g.series().terms() {
        match n.rem_euclid(8) {
            0 => comps[0].add_term(n, c.clone()),
            4 => comps[2].add_term(n, c.clone()),
            _ => {
                let h = c / q(2);
                comps[1].add_term(n, h.clone());
                comps[3].add_term(n, h);
            }
        }
    }
    JacobiFormDr::new(r, g.k() + (r + 1) / 2, comps)
}

/// `φ ↦ h₁`, an element of `η^{3(8-r)}·M_{k-12+(3r+1)/2}(1)`.
pub fn j_odd(phi: &JacobiFormDr) -> Result<EtaTypeForm> {
    if phi.weight() % 2 == 0 {
        return Err(Error::Parity(format!("j_odd needs odd weight, got {}", phi.weight())));
    }
    let r = phi.r();
    EtaTypeForm::new(3 * (8 - r), phi.k() - 12 + (3 * r + 1) / 2, phi.component(1).clone())
}

/// `h ↦ h·(θ_{r,1}(τ,z) - θ_{r,1}(τ,-z))`: `A₁ = h`, `A₃ = -h`.
pub fn j_odd_inverse(h: &EtaTypeForm, r: i64, k: i64) -> Result<JacobiFormDr> {
    crate::jacobi::DrIndex::new(r)?;
    if h.s() != 3 * (8 - r) {
        return Err(Error::Support(format!(
            "index D_{r} needs η^{}, got η^{}",
            3 * (8 - r),
            h.s()
        )));
    }
    if h.k() != k {
        return Err(Error::Domain(format!("form has k = {}, expected {k}", h.k())));
    }
    let w = k + (r + 1) / 2;
    if w % 2 == 0 {
        return Err(Error::Parity(format!("weight {w} is even")));
    }
    let prec = h.prec();
    let z = QSeries::zero(8, prec);
    JacobiFormDr::new(r, w, [z.clone(), h.series().clone(), z, h.series().neg()])
}

fn check_source<S: CoefficientSource + ?Sized>(src: &S, cfg: &SD0Config, branch: Branch) -> Result<()> {
    if src.branch() != branch || cfg.branch != branch {
        return Err(Error::Parity(format!("S_d0 {branch:?} branch got mismatched input")));
    }
    if src.r() != cfg.r || src.k() != cfg.k {
        return Err(Error::Domain(format!(
            "config is for (r,k) = ({}, {}), input is ({}, {})",
            cfg.r,
            cfg.k,
            src.r(),
            src.k()
        )));
    }
    Ok(())
}

/// Largest output precision a bounded source supports.
pub fn s_d0_terms<S: CoefficientSource + ?Sized>(src: &S, cfg: &SD0Config) -> Option<i64> {
    src.bound().map(|b| if b < 1 { 0 } else { isqrt((b - 1) / cfg.d0) + 1 })
}

fn twisted_sum<S: CoefficientSource + ?Sized>(src: &S, cfg: &SD0Config, n: i64) -> Result<Q> {
    let mut c = Q::zero();
    for d in divisors(n) {
        let chi = kronecker_symbol(cfg.chi_top(), d);
        if chi != 0 {
            let m = n / d;
            c += q(chi as i64) * qpow(d, cfg.k - 1) * src.coeff(m * m * cfg.d0)?;
        }
    }
    Ok(c)
}

/// `S_{d₀}` on the even branch, to all available coefficients.
pub fn s_d0_even<S: CoefficientSource + ?Sized>(src: &S, cfg: &SD0Config) -> Result<ModForm> {
    let terms = s_d0_terms(src, cfg)
        .ok_or_else(|| Error::Domain("unbounded source needs s_d0_even_to".into()))?;
    s_d0_even_to(src, cfg, terms)
}

/// `A(0) L(1-k, χ) / (2(1 + (8/r)2^k)) + Σ_n Σ_{d|n} χ(d) d^{k-1} A(n²d₀/d²) q^n`
/// with `χ = ((-1)^k d₀ / ·)`, below `q^terms`.
pub fn s_d0_even_to<S: CoefficientSource + ?Sized>(
    src: &S,
    cfg: &SD0Config,
    terms: i64,
) -> Result<ModForm> {
    check_source(src, cfg, Branch::Even)?;
    if let Some(t) = s_d0_terms(src, cfg) {
        if terms > t {
            return Err(Error::OutOfPrecision { index: terms, prec: t });
        }
    }
    let k = cfg.k;
    let chi8 = q(kronecker_symbol(8, cfg.r) as i64);
    let c0 = src.coeff(0)? * l_value(k, cfg.chi_top())? / (q(2) * (q(1) + chi8 * qpow(2, k)));
    let mut s = QSeries::zero(1, terms);
    if terms > 0 {
        s.add_term(0, c0);
    }
    for n in 1..terms {
        s.add_term(n, twisted_sum(src, cfg, n)?);
    }
    ModForm::new(2 * k, 2, s)
}

/// `S_{d₀}` on the odd branch, to all available coefficients.
pub fn s_d0_odd<S: CoefficientSource + ?Sized>(src: &S, cfg: &SD0Config) -> Result<ModForm> {
    let terms = s_d0_terms(src, cfg)
        .ok_or_else(|| Error::Domain("unbounded source needs s_d0_odd_to".into()))?;
    s_d0_odd_to(src, cfg, terms)
}

/// `((8/r)2^{k-1})^{e₂} (-4/n₁) Σ_{d|n₁} ((-1)^k d₀/d) d^{k-1} A(n₁²d₀/d²)` at
/// `n = 2^{e₂} n₁`.
pub fn s_d0_odd_to<S: CoefficientSource + ?Sized>(
    src: &S,
    cfg: &SD0Config,
    terms: i64,
) -> Result<ModForm> {
    check_source(src, cfg, Branch::Odd)?;
    if let Some(t) = s_d0_terms(src, cfg) {
        if terms > t {
            return Err(Error::OutOfPrecision { index: terms, prec: t });
        }
    }
    let k = cfg.k;
    let two = q(kronecker_symbol(8, cfg.r) as i64) * qpow(2, k - 1);
    let mut s = QSeries::zero(1, terms);
    for n in 1..terms {
        let e2 = n.trailing_zeros() as i64;
        let n1 = n >> e2;
        let sign = kronecker_symbol(-4, n1);
        let c = num_traits::pow(two.clone(), e2 as usize)
            * q(sign as i64)
            * twisted_sum(src, cfg, n1)?;
        s.add_term(n, c);
    }
    ModForm::new(2 * k, 2, s)
}

fn ser_lambda<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_rat(v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceLambda {
    pub name: String,
    /// `None` when the form is not an eigenform to the computed precision.
    #[serde(serialize_with = "ser_lambda")]
    pub lambda: Option<Q>,
}

/// One prime of a chain: the eigenvalue seen on every side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainRow {
    pub r: i64,
    pub k: i64,
    pub prime: i64,
    pub spaces: Vec<SpaceLambda>,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimEntry {
    pub name: String,
    pub dim: usize,
    /// How the dimension was obtained.
    pub route: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub r: i64,
    pub k: i64,
    pub rows: Vec<ChainRow>,
    pub dims: Vec<DimEntry>,
    pub dims_match: bool,
    /// Nonfatal findings, such as sides whose dimensions disagree.
    pub notes: Vec<String>,
}

impl ChainReport {
    pub fn pass(&self) -> bool {
        self.dims_match && self.rows.iter().all(|r| r.matches)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Dimension of the class-`r` plus-support subspace of
/// `span{θ³, θ·θ(2τ)²}`, the trivial-character monomials of weight 3/2 on
/// `Γ₀(8)`.
pub fn plus_dim_weight_3_2(r: i64, prec: i64) -> usize {
    let t3 = theta_power_series(3, prec);
    let t1 = theta_power_series(1, prec);
    let t2sq = theta_power_series(2, (prec + 1) / 2).rescale(2).truncate(prec);
    let basis = [t3, t1.mul(&t2sq).truncate(prec)];
    let bad: Vec<i64> = (0..prec)
        .filter(|n| !matches!(n.rem_euclid(8), 0 | 4) && (n + r) % 8 != 0)
        .collect();
    let m: linalg::Mat = basis
        .iter()
        .map(|b| bad.iter().map(|&n| b.coeff(n)).collect())
        .collect();
    linalg::left_kernel(&m).len()
}

fn lambda_jacobi(phi: &JacobiFormDr, p: i64) -> Result<Option<Q>> {
    Ok(hecke_tj(phi, p)?.ratio_to(phi))
}

fn lambda_half(f: &HalfIntForm, p: i64) -> Result<Option<Q>> {
    Ok(hecke_t_p2(f, p)?.series().ratio_to(f.series()))
}

fn lambda_eta(f: &EtaTypeForm, p: i64) -> Result<Option<Q>> {
    Ok(twisted_hecke(f, p)?.series().ratio_to(f.series()))
}

fn lambda_mod(f: &ModForm, p: i64) -> Result<Option<Q>> {
    Ok(hecke_tp(f, p)?.series.ratio_to(&f.series))
}

fn row(r: i64, k: i64, p: i64, spaces: Vec<(String, Option<Q>)>) -> ChainRow {
    let matches = spaces.iter().all(|(_, l)| l.is_some())
        && spaces.windows(2).all(|w| w[0].1 == w[1].1);
    ChainRow {
        r,
        k,
        prime: p,
        spaces: spaces
            .into_iter()
            .map(|(name, lambda)| SpaceLambda { name, lambda })
            .collect(),
        matches,
    }
}

fn check_primes(primes: &[i64]) -> Result<i64> {
    for &p in primes {
        if p == 2 || !crate::arith::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
    }
    Ok(primes.iter().copied().max().unwrap_or(3))
}

/// Computes `λ_p` on each side of the correspondence for `(r, k)` and
/// compares them. `prec` is the number of coefficients compared after each
/// operator.
///
/// * `k = 1`: the two rows of equal `ε₂` (`r ∈ {1,3}` and `r ∈ {5,7}`), with
///   dimensions of all five spaces.
/// * even weight, `k ≥ 2`: the Eisenstein chain `E_{K,D_r}`, `ℋ*_{r,k}`, `𝔾_{2k}`.
/// * odd weight, `k ≥ 2`: `η^s M_m(1)` against the level-2 newforms with
///   Fricke sign `ε₂`.
pub fn eigen_chain_verify(r: i64, k: i64, primes: &[i64], prec: i64) -> Result<ChainReport> {
    let signs = CorrespondenceSigns::new(r)?;
    let pmax = check_primes(primes)?;
    let prec = prec.max(1);
    let work = prec * pmax * pmax;
    if k == 1 {
        return k1_chain(signs, primes, prec, work);
    }
    if k < 1 {
        return Err(Error::Unsupported {
            r,
            k,
            reason: "chains need k >= 1".into(),
        });
    }
    let w = k + (r + 1) / 2;
    if w % 2 == 0 {
        eisenstein_chain(r, k, primes, prec, work)
    } else {
        odd_chain(signs, k, primes, prec, work)
    }
}

fn k1_chain(signs: CorrespondenceSigns, primes: &[i64], prec: i64, work: i64) -> Result<ChainReport> {
    let r = signs.r;
    let (r_even, r_odd) = if signs.eps2 < 0 { (1, 3) } else { (5, 7) };
    let s = 3 * (8 - r_odd);
    let m = 1 - 12 + (3 * r_odd + 1) / 2;
    let mut notes = Vec::new();

    let eta_dim = level1_dim(m);
    let half_dim = plus_dim_weight_3_2(r_even, 200);
    let m2 = m2k_level2_basis(2, prec * primes.iter().max().unwrap_or(&3))?;
    let mut m2_dim = 0;
    for f in &m2 {
        let rec = eigen_record("M2(2)", f, &[2])?;
        if fricke_sign(&rec, 2)? == signs.eps2 {
            m2_dim += 1;
        }
    }
    let sign = if signs.eps2 > 0 { "+" } else { "-" };
    let mut dims = vec![
        DimEntry {
            name: format!("J_{{{},D{r_even}}}", 1 + (r_even + 1) / 2),
            dim: half_dim,
            route: format!("transported from M^{{+,-{r_even}}}_{{3/2}}(8) by j_even"),
        },
        DimEntry {
            name: format!("J_{{{},D{r_odd}}}", 1 + (r_odd + 1) / 2),
            dim: eta_dim,
            route: format!("transported from eta^{s} M_{m}(1) by j_odd"),
        },
        DimEntry {
            name: format!("M^{{+,-{r_even}}}_{{3/2}}(8)"),
            dim: half_dim,
            route: "class plus-support subspace of span{theta^3, theta*theta(2tau)^2}".into(),
        },
        DimEntry {
            name: format!("eta^{s} M_{m}(1)"),
            dim: eta_dim,
            route: format!("dim M_{m}(1)"),
        },
        DimEntry {
            name: format!("M_2^{sign}(2)"),
            dim: m2_dim,
            route: "basis of M_2(Gamma0(2)) split by Fricke sign".into(),
        },
    ];
    let mut rows = Vec::new();
    if eta_dim == 1 && half_dim == 1 && m2_dim == 1 {
        let e_jac = eisenstein(r_even, 1, work)?;
        let eta3 = eta_pow(s, work)?;
        let psi = j_odd_inverse(&eta3, r_odd, 1)?;
        let e_half = e_3_2_8(work);
        let e2 = e2_level2(prec * primes.iter().max().unwrap());
        dims[0].route.push_str("; E_{4,D5} constructed");
        dims[1].route.push_str("; psi_{5,D7} = j_odd_inverse(eta^3) constructed");
        for &p in primes {
            rows.push(row(
                r,
                1,
                p,
                vec![
                    ("E_{4,D5} | T^J(p)".into(), lambda_jacobi(&e_jac, p)?),
                    ("psi_{5,D7} | T^J(p)".into(), lambda_jacobi(&psi, p)?),
                    ("E^(8)_{3/2} | T(p^2)".into(), lambda_half(&e_half, p)?),
                    ("eta^3 | T~(p^2)".into(), lambda_eta(&eta3, p)?),
                    ("E_2^(2) | T(p)".into(), lambda_mod(&e2, p)?),
                ],
            ));
        }
    } else if eta_dim + half_dim + m2_dim > 0 {
        notes.push("a side has dimension other than 1; eigenvalues not compared".into());
    }
    let dims_match = dims.windows(2).all(|w| w[0].dim == w[1].dim);
    if !dims_match {
        notes.push("dimensions differ between sides".into());
    }
    Ok(ChainReport {
        r,
        k: 1,
        rows,
        dims,
        dims_match,
        notes,
    })
}

fn eisenstein_chain(r: i64, k: i64, primes: &[i64], prec: i64, work: i64) -> Result<ChainReport> {
    let e_jac = eisenstein(r, k, work)?;
    let e_half = j_even(&e_jac)?;
    let pmax = primes.iter().copied().max().unwrap_or(3);
    let g = g_series(2 * k, prec * pmax)?;
    let kk = k + (r + 1) / 2;
    let mut rows = Vec::new();
    for &p in primes {
        rows.push(row(
            r,
            k,
            p,
            vec![
                (format!("E_{{{kk},D{r}}} | T^J(p)"), lambda_jacobi(&e_jac, p)?),
                (format!("H*_{{{r},{k}}} | T(p^2)"), lambda_half(&e_half, p)?),
                (format!("G_{} | T(p)", 2 * k), lambda_mod(&g, p)?),
            ],
        ));
    }
    Ok(ChainReport {
        r,
        k,
        rows,
        dims: Vec::new(),
        dims_match: true,
        notes: Vec::new(),
    })
}

fn odd_chain(
    signs: CorrespondenceSigns,
    k: i64,
    primes: &[i64],
    prec: i64,
    work: i64,
) -> Result<ChainReport> {
    let r = signs.r;
    let s = 3 * (8 - r);
    let m = k - 12 + (3 * r + 1) / 2;
    let eta_dim = level1_dim(m);
    let pmax = primes.iter().copied().max().unwrap_or(3);
    let dec = newform_extract(2 * k, prec * pmax)?;
    let news: Vec<&ModForm> = dec
        .newforms
        .iter()
        .filter(|(_, rec)| rec.fricke == Some(signs.eps2))
        .map(|(f, _)| f)
        .collect();
    let sign = if signs.eps2 > 0 { "+" } else { "-" };
    let mut notes = Vec::new();
    if !dec.irrational.is_empty() {
        notes.push(format!(
            "new space of weight {} has irrational blocks of total dimension {}",
            2 * k,
            dec.irrational.iter().map(|b| b.dim).sum::<usize>()
        ));
    }
    let w = k + (r + 1) / 2;
    let dims = vec![
        DimEntry {
            name: format!("J_{{{w},D{r}}}"),
            dim: eta_dim,
            route: format!("transported from eta^{s} M_{m}(1) by j_odd"),
        },
        DimEntry {
            name: format!("eta^{s} M_{m}(1)"),
            dim: eta_dim,
            route: format!("dim M_{m}(1)"),
        },
        DimEntry {
            name: format!("S_{}^{{new,{sign}}}(2)", 2 * k),
            dim: news.len(),
            route: "rational newforms from newform_extract with matching Fricke sign".into(),
        },
    ];
    let mut rows = Vec::new();
    if eta_dim == 1 && news.len() == 1 {
        let h = eta_type_basis(s, m, work)?.remove(0);
        let phi = j_odd_inverse(&h, r, k)?;
        for &p in primes {
            rows.push(row(
                r,
                k,
                p,
                vec![
                    (format!("phi in J_{{{w},D{r}}} | T^J(p)"), lambda_jacobi(&phi, p)?),
                    (format!("eta^{s} M_{m}(1) | T~(p^2)"), lambda_eta(&h, p)?),
                    (format!("newform S_{}^{{new,{sign}}}(2) | T(p)", 2 * k), lambda_mod(news[0], p)?),
                ],
            ));
        }
    } else {
        notes.push("dimension is not 1; eigenvalues not compared".into());
    }
    let dims_match = dims.windows(2).all(|w| w[0].dim == w[1].dim);
    if !dims_match {
        notes.push("dimensions differ between sides".into());
    }
    Ok(ChainReport {
        r,
        k,
        rows,
        dims,
        dims_match,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::cohen_star;
    use crate::jacobi::JacobiFormDr;
    use crate::level2::newform_extract;
    use proptest::prelude::*;

    #[test]
    fn signs() {
        let s: Vec<(i32, i32)> = [1, 3, 5, 7]
            .iter()
            .map(|&r| {
                let c = CorrespondenceSigns::new(r).unwrap();
                (c.eps1, c.eps2)
            })
            .collect();
        assert_eq!(s, vec![(-1, -1), (1, -1), (-1, 1), (1, 1)]);
    }

    #[test]
    fn config_validation() {
        assert!(SD0Config::new(3, 2, 8, Branch::Even).is_ok());
        assert!(matches!(
            SD0Config::new(3, 2, 4, Branch::Even),
            Err(Error::NotFundamental(4))
        ));
        assert!(SD0Config::new(3, 2, 5, Branch::Even).is_err());
        assert!(SD0Config::new(5, 4, 3, Branch::Odd).is_ok());
        assert!(SD0Config::new(5, 4, 11, Branch::Odd).is_ok());
        assert!(SD0Config::new(5, 4, 7, Branch::Odd).is_err());
        assert!(SD0Config::new(5, 4, 0, Branch::Odd).is_err());
    }

    #[test]
    fn j_even_examples() {
        let e = eisenstein(5, 1, 400).unwrap();
        assert_eq!(j_even(&e).unwrap(), e_3_2_8(400));
        let e = eisenstein(3, 2, 200).unwrap();
        let star = cohen_star(3, 2, 200).unwrap();
        let zeta = crate::arith::zeta_one_minus_2k(2);
        assert_eq!(j_even(&e).unwrap().series(), &star.series().scale(&(q(1) / zeta)));
        let z = JacobiFormDr::zero(3, 4, 50).unwrap();
        assert!(j_even(&z).unwrap().series().is_zero());
        assert!(j_even(&JacobiFormDr::zero(3, 3, 50).unwrap()).is_err());
    }

    #[test]
    fn j_even_roundtrips() {
        for (r, k) in [(5, 1), (3, 2), (7, 2), (1, 3), (5, 3)] {
            let e = eisenstein(r, k, 300).unwrap();
            let g = j_even(&e).unwrap();
            assert_eq!(j_even_inverse(&g).unwrap(), e, "({r},{k})");
            assert_eq!(j_even(&j_even_inverse(&g).unwrap()).unwrap(), g);
        }
        assert_eq!(j_even_inverse(&e_3_2_8(300)).unwrap(), eisenstein(5, 1, 300).unwrap());
        let bad = cohen_star(3, 2, 50)
            .unwrap()
            .with_series(QSeries::from_terms(1, 50, [(1, q(1))]));
        assert!(j_even_inverse(&bad).is_err());
    }

    #[test]
    fn j_odd_examples() {
        let e9 = eta_pow(9, 400).unwrap();
        let phi = j_odd_inverse(&e9, 5, 4).unwrap();
        assert_eq!(phi.weight(), 7);
        assert!(phi.validate().is_empty());
        assert!(phi.is_cusp());
        assert_eq!(j_odd(&phi).unwrap(), e9);
        assert!(j_odd(&phi).unwrap().series().terms().all(|(n, _)| (n + 5) % 8 == 0));
        let z = JacobiFormDr::zero(5, 7, 40).unwrap();
        assert!(j_odd(&z).unwrap().series().is_zero());
        assert!(j_odd(&eisenstein(5, 1, 40).unwrap()).is_err());
        assert!(j_odd_inverse(&e9, 7, 4).is_err());
        assert!(j_odd_inverse(&e9, 5, 3).is_err());
    }

    #[test]
    fn hecke_equivariance() {
        for (r, k) in [(5, 1), (3, 2)] {
            let e = eisenstein(r, k, 25 * 40).unwrap();
            for p in [3, 5] {
                let lhs = j_even(&hecke_tj(&e, p).unwrap()).unwrap();
                let rhs = hecke_t_p2(&j_even(&e).unwrap(), p).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        for (s, r, k) in [(3, 7, 1), (9, 5, 4)] {
            let h = eta_pow(s, 25 * 40).unwrap();
            let phi = j_odd_inverse(&h, r, k).unwrap();
            for p in [3, 5] {
                let lhs = j_odd(&hecke_tj(&phi, p).unwrap()).unwrap();
                assert_eq!(lhs, twisted_hecke(&h, p).unwrap());
            }
        }
    }

    #[test]
    fn s_d0_even_eisenstein() {
        let cfg = SD0Config::new(3, 2, 8, Branch::Even).unwrap();
        let e = eisenstein(3, 2, 8 * 20 * 20).unwrap();
        let s = s_d0_even(&e, &cfg).unwrap();
        assert_eq!(s.prec(), 20);
        let a_d0 = CoefficientSource::coeff(&e, 8).unwrap();
        assert_eq!(a_d0, q(40));
        let lazy = s_d0_even_to(&EisensteinSource::new(3, 2).unwrap(), &cfg, 20).unwrap();
        assert_eq!(lazy, s);
        // A(d₀)/A(0) = L(1-k,χ) / ((1 + (8/r)2^k) ζ(1-2k))
        let l = l_value(2, 8).unwrap();
        let z = crate::arith::zeta_one_minus_2k(2);
        assert_eq!(a_d0, l / (q(1 - 4) * &z));
        // constant term A(d₀)ζ(1-2k)/2, but q^n = A(d₀)(σ₃(n) - 4σ₃(n/2))
        let g = g_series(4, 20).unwrap().series;
        assert_eq!(s.coeff(0), &a_d0 * g.coeff(0));
        let body = g.sub(&g.rescale(2).truncate(20).scale(&q(4))).scale(&a_d0);
        for n in 1..20 {
            assert_eq!(s.coeff(n), body.coeff(n), "n={n}");
        }
        assert_eq!(s.coeff(2), q(200));
        assert!(s.series.ratio_to(&g).is_none());
        let zero = JacobiFormDr::zero(3, 4, 200).unwrap();
        assert!(s_d0_even(&zero, &cfg).unwrap().series.is_zero());
        assert!(s_d0_even_to(&e, &cfg, 21).is_err());
    }

    #[test]
    fn s_d0_even_independent_of_d0() {
        // (r,k) = (1,3): (-1)^3 d₀ fundamental with d₀ = 0 mod 4
        let src = EisensteinSource::new(1, 3).unwrap();
        let mut norm = Vec::new();
        for d0 in [4, 8] {
            let cfg = SD0Config::new(1, 3, d0, Branch::Even).unwrap();
            let s = s_d0_even_to(&src, &cfg, 15).unwrap();
            let a = src.coeff(d0).unwrap();
            norm.push(s.series.scale(&(q(1) / a)));
        }
        assert_eq!(norm[0], norm[1]);
        let g = g_series(6, 15).unwrap().series;
        for n in (1..15).step_by(2) {
            assert_eq!(norm[0].coeff(n), g.coeff(n));
        }
    }

    #[test]
    fn s_d0_odd_newform() {
        let e9 = eta_pow(9, 3 * 21 * 21).unwrap();
        let phi = j_odd_inverse(&e9, 5, 4).unwrap();
        let cfg = SD0Config::new(5, 4, 3, Branch::Odd).unwrap();
        let s = s_d0_odd(&phi, &cfg).unwrap();
        assert_eq!(s.prec(), 21);
        assert_eq!(s.coeff(2), q(-8) * s.coeff(1));
        let nf = &newform_extract(8, 21).unwrap().newforms[0].0;
        assert!(s.series.ratio_to(&nf.series).is_some());
        assert_eq!(s_d0_odd(&e9, &cfg).unwrap(), s);
        let z = JacobiFormDr::zero(5, 7, 200).unwrap();
        assert!(s_d0_odd(&z, &cfg).unwrap().series.is_zero());
        let wrong = SD0Config::new(3, 2, 8, Branch::Even).unwrap();
        assert!(s_d0_odd(&phi, &wrong).is_err());
    }

    #[test]
    fn chains() {
        let rep = eigen_chain_verify(5, 1, &[3, 5, 7], 20).unwrap();
        assert!(rep.pass(), "{rep:?}");
        for row in &rep.rows {
            assert_eq!(row.spaces.len(), 5);
            assert!(row.spaces.iter().all(|s| s.lambda == Some(q(1 + row.prime))));
        }
        assert!(rep.dims.iter().all(|d| d.dim == 1));
        let rep = eigen_chain_verify(1, 1, &[3], 20).unwrap();
        assert!(rep.pass() && rep.rows.is_empty());
        assert!(rep.dims.iter().all(|d| d.dim == 0));
        let rep = eigen_chain_verify(3, 2, &[3, 5], 20).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.rows[0].spaces[0].lambda, Some(q(28)));
        let rep = eigen_chain_verify(5, 4, &[3, 5, 7], 10).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.rows.len(), 3);
        let j = rep.to_json();
        assert!(j.contains(r#""prime":3"#) && j.contains(r#""match":true"#));
        assert!(eigen_chain_verify(5, 1, &[2], 10).is_err());
    }

    #[test]
    fn plus_dims() {
        assert_eq!(plus_dim_weight_3_2(5, 100), 1);
        assert_eq!(plus_dim_weight_3_2(1, 100), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn s_d0_linear(a in -5i64..6, b in -5i64..6) {
            let cfg = SD0Config::new(3, 2, 8, Branch::Even).unwrap();
            let e = eisenstein(3, 2, 8 * 64).unwrap();
            let f = j_even_inverse(&cohen_star(3, 2, 8 * 64).unwrap()).unwrap();
            let combo = e.scale(&q(a)).add(&f.scale(&q(b))).unwrap();
            let lhs = s_d0_even(&combo, &cfg).unwrap().series;
            let rhs = s_d0_even(&e, &cfg).unwrap().series.scale(&q(a))
                .add(&s_d0_even(&f, &cfg).unwrap().series.scale(&q(b)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
