//! `drforms`: coefficients, identity checks, correspondence maps and table
//! export from the command line.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use drforms::corresp::{
    j_even, j_even_inverse, j_odd, j_odd_inverse, s_d0_even, s_d0_odd, Branch, SD0Config,
};
use drforms::etaforms::{eta_pow, twisted_hecke, EtaTypeForm};
use drforms::halfint::{cohen_eisenstein, cohen_star, e_3_2_8, hecke_t_p2, theta_pow, HalfIntForm};
use drforms::jacobi::{eisenstein, hecke_tj, JacobiFormDr};
use drforms::level2::{e2_level2, eigen_record, g_series, newform_extract, write_eigen_csv, ModForm};
use drforms::rat::{fmt_rat, qf};
use drforms::verify::{run_suite, SuiteParams};
use drforms::{Error, QSeries};

#[derive(Parser, Debug)]
#[command(name = "drforms", version, about = "Exact computations with Jacobi forms of index D_r")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Precision: exclusive bound on the exponent numerator of each series.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(i64).range(8..))]
    prec: i64,
    /// Range bound for verification suites and tables.
    #[arg(long, global = true)]
    bound: Option<i64>,
    /// Comma-separated primes.
    #[arg(long, global = true, value_delimiter = ',', default_value = "3,5,7")]
    primes: Vec<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the coefficients of a named series:
    /// theta3, e_3_2_8, cohen:k, cohen_star:r:k, eta:s, e2_level2, jacobi_eis:r:k, g2k:2k.
    Coeffs { target: String },
    /// Run a verification suite: r3-class, cohen-rep, sigma3, sigma4,
    /// theta-identity, ustar-relation, hecke-equivariance, eigen-chain,
    /// roundtrip, s-d0, k1-dims.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 5)]
        r: i64,
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = 8)]
        d0: i64,
    },
    /// Apply a map to a named series or a JSON file (`@path`):
    /// j-even, j-even-inv, j-odd, j-odd-inv, s-d0-even, s-d0-odd, hecke-tj,
    /// hecke-tp2, twisted.
    Map {
        map: String,
        /// Input: a series name as for `coeffs`, or `@file.json`.
        #[arg(long)]
        input: String,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        d0: Option<i64>,
        /// Target `r` for j-odd-inv (default inferred from the eta power).
        #[arg(long)]
        r: Option<i64>,
    },
    /// CSV table `N,H(N),r3(N)` for `0 ≤ N ≤ bound`.
    ClassTable,
    /// Rational newforms of level 2 and their Hecke eigenvalues.
    Newforms {
        #[arg(long)]
        weight: i64,
    },
}

/// Any of the forms the maps act on.
enum Form {
    Jacobi(JacobiFormDr),
    Half(HalfIntForm),
    Eta(EtaTypeForm),
    Mod(ModForm),
}

impl Form {
    fn to_json(&self) -> String {
        match self {
            Form::Jacobi(f) => f.to_json(),
            Form::Half(f) => f.to_json(),
            Form::Eta(f) => f.to_json(),
            Form::Mod(f) => f.to_json(),
        }
    }

    /// CSV with columns `exponent,coeff`, or `component,exponent,coeff` for
    /// Jacobi forms; exponents are reduced fractions `n/d`.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        let rows = |out: &mut String, prefix: &str, s: &QSeries| {
            for (n, c) in s.terms() {
                let e = qf(n, s.den() as i64);
                out.push_str(&format!("{prefix}{},{}\n", fmt_rat(&e), fmt_rat(c)));
            }
        };
        match self {
            Form::Jacobi(f) => {
                out.push_str("component,exponent,coeff\n");
                for (j, s) in f.components().iter().enumerate() {
                    rows(&mut out, &format!("{j},"), s);
                }
            }
            Form::Half(f) => {
                out.push_str("exponent,coeff\n");
                rows(&mut out, "", f.series());
            }
            Form::Eta(f) => {
                out.push_str("exponent,coeff\n");
                rows(&mut out, "", f.series());
            }
            Form::Mod(f) => {
                out.push_str("exponent,coeff\n");
                rows(&mut out, "", &f.series);
            }
        }
        out
    }

    fn kind(&self) -> &'static str {
        match self {
            Form::Jacobi(_) => "Jacobi form",
            Form::Half(_) => "half-integral weight form",
            Form::Eta(_) => "eta-type form",
            Form::Mod(_) => "level-2 modular form",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn int_arg(s: &str, what: &str) -> CliResult<i64> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("{what} must be an integer, got {s:?}")))
}

fn target(name: &str, prec: i64) -> CliResult<Form> {
    let parts: Vec<&str> = name.split(':').collect();
    let ints = |n: usize| -> CliResult<Vec<i64>> {
        if parts.len() != n + 1 {
            return usage(format!("target {name:?} takes {n} integer argument(s)"));
        }
        parts[1..].iter().map(|s| int_arg(s, "target argument")).collect()
    };
    Ok(match parts[0] {
        "theta3" if parts.len() == 1 => Form::Half(theta_pow(3, prec)?),
        "e_3_2_8" if parts.len() == 1 => Form::Half(e_3_2_8(prec)),
        "e2_level2" if parts.len() == 1 => Form::Mod(e2_level2(prec)),
        "cohen" => Form::Half(cohen_eisenstein(ints(1)?[0], prec)?),
        "cohen_star" => {
            let a = ints(2)?;
            Form::Half(cohen_star(a[0], a[1], prec)?)
        }
        "eta" => Form::Eta(eta_pow(ints(1)?[0], prec)?),
        "jacobi_eis" => {
            let a = ints(2)?;
            Form::Jacobi(eisenstein(a[0], a[1], prec)?)
        }
        "g2k" => Form::Mod(g_series(ints(1)?[0], prec)?),
        _ => return usage(format!("unknown target {name:?}")),
    })
}

fn load(input: &str, prec: i64) -> CliResult<Form> {
    let Some(path) = input.strip_prefix('@') else {
        return target(input, prec);
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("components") {
        Form::Jacobi(JacobiFormDr::from_json(&text)?)
    } else if has("s") && has("m") {
        Form::Eta(EtaTypeForm::from_json(&text)?)
    } else if has("level") && has("weight") {
        Form::Mod(ModForm::from_json(&text)?)
    } else if has("k") {
        Form::Half(HalfIntForm::from_json(&text)?)
    } else {
        return usage(format!("{path}: not a recognized form"));
    })
}

fn need(v: Option<i64>, flag: &str, map: &str) -> CliResult<i64> {
    v.ok_or_else(|| CliError::Usage(format!("map {map} needs --{flag}")))
}

fn wrong(map: &str, f: &Form) -> CliError {
    CliError::Usage(format!("map {map} does not accept a {}", f.kind()))
}

fn apply_map(map: &str, f: Form, p: Option<i64>, d0: Option<i64>, r: Option<i64>) -> CliResult<Form> {
    Ok(match (map, &f) {
        ("j-even", Form::Jacobi(phi)) => Form::Half(j_even(phi)?),
        ("j-even-inv", Form::Half(h)) => Form::Jacobi(j_even_inverse(h)?),
        ("j-odd", Form::Jacobi(phi)) => Form::Eta(j_odd(phi)?),
        ("j-odd-inv", Form::Eta(h)) => {
            let r = r.unwrap_or(8 - h.s() / 3);
            Form::Jacobi(j_odd_inverse(h, r, h.k())?)
        }
        ("s-d0-even", _) => {
            let d0 = need(d0, "d0", map)?;
            let out = match &f {
                Form::Jacobi(phi) => s_d0_even(phi, &SD0Config::new(phi.r(), phi.k(), d0, Branch::Even)?)?,
                Form::Half(h) => {
                    let r = h.plus_class().ok_or_else(|| wrong(map, &f))?;
                    s_d0_even(h, &SD0Config::new(r, h.k(), d0, Branch::Even)?)?
                }
                _ => return Err(wrong(map, &f)),
            };
            Form::Mod(out)
        }
        ("s-d0-odd", _) => {
            let d0 = need(d0, "d0", map)?;
            let out = match &f {
                Form::Jacobi(phi) => s_d0_odd(phi, &SD0Config::new(phi.r(), phi.k(), d0, Branch::Odd)?)?,
                Form::Eta(h) => s_d0_odd(h, &SD0Config::new(8 - h.s() / 3, h.k(), d0, Branch::Odd)?)?,
                _ => return Err(wrong(map, &f)),
            };
            Form::Mod(out)
        }
        ("hecke-tj", Form::Jacobi(phi)) => Form::Jacobi(hecke_tj(phi, need(p, "p", map)?)?),
        ("hecke-tp2", Form::Half(h)) => Form::Half(hecke_t_p2(h, need(p, "p", map)?)?),
        ("twisted", Form::Eta(h)) => Form::Eta(twisted_hecke(h, need(p, "p", map)?)?),
        (
            "j-even" | "j-even-inv" | "j-odd" | "j-odd-inv" | "hecke-tj" | "hecke-tp2" | "twisted",
            _,
        ) => return Err(wrong(map, &f)),
        _ => return usage(format!("unknown map {map:?}")),
    })
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
    .map_err(|e| CliError::Usage(format!("write failed: {e}")))
}

fn render(cli: &Cli, f: &Form) -> String {
    match cli.format {
        Format::Json => f.to_json() + "\n",
        Format::Csv => f.to_csv(),
    }
}

/// Returns whether all checks passed.
fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Coeffs { target: t } => {
            let f = target(t, cli.prec)?;
            emit(cli, &render(cli, &f))?;
        }
        Command::Verify { suite, r, k, d0 } => {
            let params = SuiteParams {
                bound: cli.bound.unwrap_or(100),
                r: *r,
                k: *k,
                primes: cli.primes.clone(),
                prec: cli.prec,
                d0: *d0,
            };
            let rep = run_suite(suite, &params)?;
            let text = match cli.format {
                Format::Json => rep.to_json() + "\n",
                Format::Csv => {
                    let mut s = String::from("suite,item,expected,got\n");
                    for f in &rep.failures {
                        s.push_str(&format!("{},{},{},{}\n", rep.suite, f.item, f.expected, f.got));
                    }
                    s
                }
            };
            emit(cli, &text)?;
            eprintln!(
                "{}: {} ({} checks, {} failed)",
                rep.suite,
                if rep.passed { "PASS" } else { "FAIL" },
                rep.checks,
                rep.failures.len()
            );
            return Ok(rep.passed);
        }
        Command::Map { map, input, p, d0, r } => {
            let f = load(input, cli.prec)?;
            let out = apply_map(map, f, *p, *d0, *r)?;
            emit(cli, &render(cli, &out))?;
        }
        Command::ClassTable => {
            let bound = cli.bound.unwrap_or(100);
            if bound < 0 {
                return usage("--bound must be non-negative");
            }
            let mut buf = Vec::new();
            drforms::arith::write_class_table(bound as usize, &mut buf)?;
            emit(cli, &String::from_utf8_lossy(&buf))?;
        }
        Command::Newforms { weight } => {
            let dec = newform_extract(*weight, cli.prec)?;
            let recs = dec
                .newforms
                .iter()
                .map(|(f, r)| {
                    let mut rec = eigen_record(&r.label, f, &cli.primes)?;
                    rec.fricke = r.fricke;
                    Ok(rec)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let text = match cli.format {
                Format::Json => serde_json::to_string(&recs).expect("serializable") + "\n",
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_eigen_csv(&recs, &mut buf)?;
                    String::from_utf8_lossy(&buf).into_owned()
                }
            };
            emit(cli, &text)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
