//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// `p^e` as a rational; negative `e` allowed.
pub fn qpow(p: i64, e: i64) -> Q {
    let b = q(p);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

/// Always `num/den`, lowest terms, positive denominator.
pub fn fmt_rat(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `a`, `a/b`, with optional sign.
pub fn parse_rat(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Serde adapter writing a rational as `"num/den"`.
pub mod serde_rat {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{fmt_rat, parse_rat, Q};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `BTreeMap<i64, Q>` with `"num/den"` values.
pub mod serde_rat_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{fmt_rat, parse_rat, Q};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<i64, Q>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (*k, fmt_rat(v)))
            .collect::<BTreeMap<i64, String>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<i64, Q>, D::Error> {
        BTreeMap::<i64, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| Ok((k, parse_rat(&v).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

/// Serde adapter for `Vec<Q>` with `"num/den"` entries.
pub mod serde_rat_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{fmt_rat, parse_rat, Q};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|v| parse_rat(v).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if !is_integer(x) {
        return None;
    }
    i64::try_from(x.numer()).ok()
}

pub fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
