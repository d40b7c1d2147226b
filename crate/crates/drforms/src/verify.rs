//! Exact verification suites: each checks one family of identities over a
//! range and reports every failing item.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{cohen_rep_r3, hurwitz_table, r3_table, sigma1};
use crate::corresp::{
    eigen_chain_verify, j_even, j_even_inverse, j_odd, j_odd_inverse, s_d0_even_to, Branch,
    ChainReport, CoefficientSource, EisensteinSource, SD0Config,
};
use crate::error::Result;
use crate::etaforms::{eta_pow, eta_type_basis, twisted_hecke};
use crate::halfint::{
    e_3_2_8, h_star, hecke_t_p2, star_relation_defect, theta, theta_power_series,
};
use crate::jacobi::{eisenstein, hecke_tj};
use crate::level2::{e2_level2, g_series};
use crate::qseries::QSeries;
use crate::rat::{fmt_rat, q, qf, qpow, Q};

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 11] = [
    "r3-class",
    "cohen-rep",
    "sigma3",
    "sigma4",
    "theta-identity",
    "ustar-relation",
    "hecke-equivariance",
    "eigen-chain",
    "roundtrip",
    "s-d0",
    "k1-dims",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub item: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            checks: 0,
            passed: true,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, item: impl FnOnce() -> String, expected: &Q, got: &Q) {
        self.checks += 1;
        if expected != got {
            self.fail(item(), fmt_rat(expected), fmt_rat(got));
        }
    }

    fn check_bool(&mut self, item: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.fail(item.to_string(), "true".into(), "false".into());
        }
    }

    fn fail(&mut self, item: String, expected: String, got: String) {
        self.passed = false;
        self.failures.push(Failure {
            item,
            expected,
            got,
        });
    }

    fn merge(&mut self, other: SuiteReport) {
        self.checks += other.checks;
        self.passed &= other.passed;
        self.failures.extend(other.failures);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Parameters shared by the suites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub bound: i64,
    pub r: i64,
    pub k: i64,
    pub primes: Vec<i64>,
    pub prec: i64,
    pub d0: i64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            bound: 1000,
            r: 5,
            k: 1,
            primes: vec![3, 5, 7],
            prec: 200,
            d0: 8,
        }
    }
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<SuiteReport> {
    match name {
        "r3-class" => Ok(r3_class(p.bound)),
        "cohen-rep" => cohen_rep(p.bound),
        "sigma3" => Ok(sigma3(p.bound)),
        "sigma4" => Ok(sigma4(p.bound)),
        "theta-identity" => Ok(theta_identity(p.bound)),
        "ustar-relation" => {
            let mut r = u_eigen(p.bound);
            r.merge(star_relation(p.bound)?);
            r.suite = name.into();
            Ok(r)
        }
        "hecke-equivariance" => {
            let mut r = eisenstein_eigen(p.bound, &p.primes)?;
            r.merge(hecke_equivariance(p.bound, &p.primes)?);
            r.suite = name.into();
            Ok(r)
        }
        "eigen-chain" => Ok(chain_suite(&eigen_chain_verify(p.r, p.k, &p.primes, p.prec)?)),
        "roundtrip" => roundtrip(p.prec),
        "s-d0" => s_d0_eisenstein(p.r, p.k, p.d0, p.bound),
        "k1-dims" => k1_dims(),
        _ => Err(crate::Error::Domain(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// `r₃(N) = 12(H(4N) - 2H(N))` for `1 ≤ N ≤ bound`.
pub fn r3_class(bound: i64) -> SuiteReport {
    let mut rep = SuiteReport::new("r3-class");
    let b = bound.max(1) as usize;
    let r3 = r3_table(b);
    let h = hurwitz_table(4 * b);
    for n in 1..=b {
        let rhs = q(12) * (&h[4 * n] - q(2) * &h[n]);
        rep.check(|| format!("N={n}"), &q(r3[n] as i64), &rhs);
    }
    rep
}

/// Cohen's representation formula against enumerated `r₃(N)`.
pub fn cohen_rep(bound: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cohen-rep");
    let r3 = r3_table(bound.max(1) as usize);
    for n in 1..=bound.max(1) {
        rep.check(|| format!("N={n}"), &q(r3[n as usize] as i64), &cohen_rep_r3(n)?);
    }
    Ok(rep)
}

fn sig(n: i64, d: i64) -> i64 {
    if n % d == 0 {
        sigma1(n / d)
    } else {
        0
    }
}

/// `Σ δ̃_s r₃(N - s²)` over `0 ≤ s ≤ √N`, optionally restricted to
/// `N - s² ≡ 0, 3 mod 4`.
pub fn delta_sum(r3: &[u64], n: i64, restrict: bool) -> Q {
    let mut total = Q::from_integer(0.into());
    let mut s = 0i64;
    while s * s <= n {
        let m = n - s * s;
        if !restrict || matches!(m % 4, 0 | 3) {
            let w = if s == 0 { qf(1, 2) } else { q(1) };
            total += w * q(r3[m as usize] as i64);
        }
        s += 1;
    }
    total
}

/// The restricted divisor-sum identity, its odd-`N` case, and the worked
/// examples `σ(1) … σ(15)`.
pub fn sigma3(bound: i64) -> SuiteReport {
    let mut rep = SuiteReport::new("sigma3");
    let r3 = r3_table(bound.max(15) as usize);
    for n in 1..=bound {
        let lhs = delta_sum(&r3, n, true);
        let rhs = sigma1(n) - 3 * sig(n, 2) + 14 * sig(n, 4) - 24 * sig(n, 8);
        rep.check(|| format!("N={n}"), &q(rhs), &lhs);
        if n % 2 == 1 {
            rep.check(|| format!("odd N={n}"), &q(sigma1(n)), &lhs);
        }
    }
    let r = |m: usize| q(r3[m] as i64);
    let examples: [(i64, Q); 8] = [
        (1, r(0)),
        (3, r(3) / q(2)),
        (5, r(4)),
        (7, r(3)),
        (9, r(8) + r(0)),
        (11, r(11) / q(2)),
        (13, r(12) + r(4)),
        (15, r(11)),
    ];
    for (n, v) in examples {
        rep.check(|| format!("example sigma({n})"), &q(sigma1(n)), &v);
    }
    rep
}

/// `Σ δ̃_s r₃(N - s²) = r₄(N)/2 = 4σ(N) - 16σ(N/4)`, and `σ(N)` as a quarter
/// of that sum for `N ≢ 0 mod 4`.
pub fn sigma4(bound: i64) -> SuiteReport {
    let mut rep = SuiteReport::new("sigma4");
    let r3 = r3_table(bound.max(1) as usize);
    let t4 = theta_power_series(4, bound + 1);
    for n in 1..=bound {
        let lhs = delta_sum(&r3, n, false);
        rep.check(|| format!("N={n} vs r4/2"), &(t4.coeff(n) / q(2)), &lhs);
        rep.check(|| format!("N={n}"), &q(4 * sigma1(n) - 16 * sig(n, 4)), &lhs);
        if n % 4 != 0 {
            rep.check(|| format!("N={n} quarter"), &q(sigma1(n)), &(&lhs / q(4)));
        }
    }
    rep
}

/// `θ·E^{(8)}_{3/2} = (1/12)E₂^{(2)}(τ) - (1/12)E₂^{(2)}(2τ) + E₂^{(2)}(4τ)` and
/// `θ⁴ = (1/3)E₂^{(2)}(τ) + (2/3)E₂^{(2)}(2τ)` below `q^bound`.
pub fn theta_identity(bound: i64) -> SuiteReport {
    let mut rep = SuiteReport::new("theta-identity");
    let prec = bound + 1;
    let lhs = theta(prec).series().mul(e_3_2_8(prec).series());
    let e2 = e2_level2(prec).series;
    let r = |m: i64| e2.rescale(m).truncate(prec);
    let rhs = r(1)
        .scale(&qf(1, 12))
        .sub(&r(2).scale(&qf(1, 12)))
        .add(&r(4));
    compare(&mut rep, "theta*E", &rhs, &lhs, prec);
    let t4 = theta_power_series(4, prec);
    let rhs4 = r(1).scale(&qf(1, 3)).add(&r(2).scale(&qf(2, 3)));
    compare(&mut rep, "theta^4", &rhs4, &t4, prec);
    rep
}

fn compare(rep: &mut SuiteReport, label: &str, expected: &QSeries, got: &QSeries, bound: i64) {
    for n in 0..bound {
        rep.check(|| format!("{label} q^{n}"), &expected.coeff(n), &got.coeff(n));
    }
}

/// `E^{(8)}_{3/2}|U₁(4) = E^{(8)}_{3/2}` below `q^bound`.
pub fn u_eigen(bound: i64) -> SuiteReport {
    let mut rep = SuiteReport::new("u-eigen");
    let e = e_3_2_8(4 * bound);
    let u = e.series().uk4(1).unwrap();
    compare(&mut rep, "E|U1(4)", e.series(), &u, bound);
    rep
}

pub const STAR_PAIRS: [(i64, i64); 4] = [(3, 2), (7, 2), (1, 3), (5, 3)];

/// The `ℋ*` relation for each pair in [`STAR_PAIRS`], and `H*_r(k,N) = 0` for
/// `N ≡ 4 - r mod 8`.
pub fn star_relation(bound: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("star-relation");
    for (r, k) in STAR_PAIRS {
        let d = star_relation_defect(r, k, bound)?;
        compare(&mut rep, &format!("defect ({r},{k})"), &QSeries::zero(1, bound), &d, bound);
        let mut n = (4 - r).rem_euclid(8);
        while n <= bound {
            rep.check(|| format!("H*_{r}({k},{n})"), &q(0), &h_star(r, k, n)?);
            n += 8;
        }
    }
    Ok(rep)
}

/// `E_{K,D_r}|T^J(p) = (1 + p^{2k-1}) E` below `bound` for the pairs in
/// [`STAR_PAIRS`].
pub fn eisenstein_eigen(bound: i64, primes: &[i64]) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("eisenstein-eigen");
    let pmax = primes.iter().copied().max().unwrap_or(3);
    let results: Vec<Result<Vec<(String, bool)>>> = STAR_PAIRS
        .par_iter()
        .map(|&(r, k)| {
            let e = eisenstein(r, k, bound * pmax * pmax)?;
            let mut out = Vec::new();
            for &p in primes {
                let t = hecke_tj(&e, p)?;
                let want = e.truncate(t.prec()).scale(&(q(1) + qpow(p, 2 * k - 1)));
                out.push((format!("E ({r},{k}) T^J({p})"), t.prec() >= bound && t == want));
            }
            Ok(out)
        })
        .collect();
    for r in results {
        for (item, ok) in r? {
            rep.check_bool(&item, ok);
        }
    }
    Ok(rep)
}

/// `𝒥^even(φ|T^J(p)) = 𝒥^even(φ)|T(p²)` on Eisenstein inputs and
/// `𝒥^odd(φ|T^J(p)) = 𝒥^odd(φ)|T̃(p²)` on `j_odd_inverse(η^s f)`, compared
/// below `bound`.
pub fn hecke_equivariance(bound: i64, primes: &[i64]) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("hecke-equivariance");
    let pmax = primes.iter().copied().max().unwrap_or(3);
    let work = bound * pmax * pmax;
    for (r, k) in [(5, 1), (3, 2), (7, 2), (1, 3), (5, 3)] {
        let e = eisenstein(r, k, work)?;
        for &p in primes {
            let lhs = j_even(&hecke_tj(&e, p)?)?;
            let rhs = hecke_t_p2(&j_even(&e)?, p)?;
            let ok = lhs.prec() >= bound && lhs == rhs;
            rep.check_bool(&format!("j_even ({r},{k}) p={p}"), ok);
        }
    }
    // (s, m, r): η³, η⁹, η¹⁵E₄, η²¹
    for (s, m, r) in [(3, 0, 7), (9, 0, 5), (15, 4, 3), (21, 0, 1)] {
        let h = eta_type_basis(s, m, work)?.remove(0);
        let phi = j_odd_inverse(&h, r, h.k())?;
        for &p in primes {
            let lhs = j_odd(&hecke_tj(&phi, p)?)?;
            let rhs = twisted_hecke(&h, p)?;
            let ok = lhs.prec() >= bound && lhs == rhs;
            rep.check_bool(&format!("j_odd eta^{s} M_{m} p={p}"), ok);
        }
    }
    Ok(rep)
}

pub fn chain_suite(chain: &ChainReport) -> SuiteReport {
    let mut rep = SuiteReport::new("eigen-chain");
    rep.check_bool(&format!("dims ({},{})", chain.r, chain.k), chain.dims_match);
    for row in &chain.rows {
        rep.checks += 1;
        if !row.matches {
            let got = row
                .spaces
                .iter()
                .map(|s| s.lambda.as_ref().map_or("none".into(), fmt_rat))
                .collect::<Vec<_>>()
                .join(",");
            rep.fail(format!("p={}", row.prime), "all equal".into(), got);
        }
    }
    rep
}

/// Inverse maps composed with the forward maps on Eisenstein and eta inputs.
pub fn roundtrip(prec: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("roundtrip");
    for (r, k) in [(5, 1), (3, 2), (7, 2), (1, 3), (5, 3)] {
        let e = eisenstein(r, k, prec)?;
        let g = j_even(&e)?;
        rep.check_bool(&format!("j_even_inverse.j_even ({r},{k})"), j_even_inverse(&g)? == e);
    }
    rep.check_bool(
        "j_even_inverse(E^(8)_{3/2}) = E_{4,D5}",
        j_even_inverse(&e_3_2_8(prec))? == eisenstein(5, 1, prec)?,
    );
    for (s, r, k) in [(3, 7, 1), (9, 5, 4)] {
        let h = eta_pow(s, prec)?;
        let phi = j_odd_inverse(&h, r, k)?;
        rep.check_bool(&format!("j_odd.j_odd_inverse eta^{s}"), j_odd(&phi)? == h);
        rep.check_bool(&format!("validate j_odd_inverse eta^{s}"), phi.validate().is_empty());
    }
    Ok(rep)
}

/// `S_{d₀}(E_{K,D_r}) = A(d₀)𝔾_{2k}` on the first `terms` coefficients, plus
/// the constant-term ratio `A(d₀)/A(0) = L(1-k,χ)/((1 + (8/r)2^k)ζ(1-2k))`.
pub fn s_d0_eisenstein(r: i64, k: i64, d0: i64, terms: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("s-d0");
    let cfg = match SD0Config::new(r, k, d0, Branch::Even) {
        Ok(c) => c,
        Err(e) => {
            rep.checks += 1;
            rep.fail(format!("config d0={d0}"), "valid even-branch d0".into(), e.to_string());
            return Ok(rep);
        }
    };
    let src = EisensteinSource::new(r, k)?;
    let s = s_d0_even_to(&src, &cfg, terms)?;
    let a_d0 = src.coeff(d0)?;
    let g = g_series(2 * k, terms)?;
    compare(&mut rep, &format!("S_{d0}(E) vs A(d0)G"), &g.series.scale(&a_d0), &s.series, terms);
    let chi8 = q(crate::arith::kronecker_symbol(8, r) as i64);
    let ratio = crate::arith::l_value(k, cfg.chi_top())?
        / ((q(1) + chi8 * qpow(2, k)) * crate::arith::zeta_one_minus_2k(k));
    rep.check(|| "A(d0)/A(0)".into(), &ratio, &(a_d0 / src.coeff(0)?));
    Ok(rep)
}

/// Dimensions of the `k = 1` rows: all 0 for `r ∈ {1,3}`, all 1 for `r ∈ {5,7}`.
pub fn k1_dims() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("k1-dims");
    for (r, want) in [(1, 0usize), (3, 0), (5, 1), (7, 1)] {
        let chain = eigen_chain_verify(r, 1, &[3], 8)?;
        for d in &chain.dims {
            rep.check(
                || format!("r={r} {}", d.name),
                &q(want as i64),
                &q(d.dim as i64),
            );
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in ["r3-class", "cohen-rep", "sigma3", "sigma4", "theta-identity", "ustar-relation"] {
            let p = SuiteParams {
                bound: 60,
                ..Default::default()
            };
            let rep = run_suite(s, &p).unwrap();
            assert!(rep.passed, "{s}: {:?}", rep.failures);
            assert!(rep.checks > 0);
        }
        let p = SuiteParams {
            bound: 8,
            prec: 40,
            ..Default::default()
        };
        for s in ["hecke-equivariance", "eigen-chain", "roundtrip", "k1-dims"] {
            let rep = run_suite(s, &p).unwrap();
            assert!(rep.passed, "{s}: {:?}", rep.failures);
        }
        assert!(run_suite("nope", &p).is_err());
    }

    #[test]
    fn failures_are_recorded() {
        let rep = s_d0_eisenstein(3, 2, 4, 10).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures[0].item, "config d0=4");
        let rep = s_d0_eisenstein(3, 2, 8, 10).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures[0].item, "S_8(E) vs A(d0)G q^2");
        assert_eq!(rep.failures[0].expected, "360/1");
        assert_eq!(rep.failures[0].got, "200/1");
    }

    #[test]
    fn deterministic_json() {
        let p = SuiteParams {
            bound: 30,
            ..Default::default()
        };
        let a = run_suite("sigma3", &p).unwrap().to_json();
        let b = run_suite("sigma3", &p).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.starts_with(r#"{"suite":"sigma3","checks":"#));
    }
}
