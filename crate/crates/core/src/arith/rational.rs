//! Rational scalars and helpers around `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `p`, `p/q`, `-p/q` or a plain decimal like `0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (ip, fp) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

/// `p` for integers, `p/q` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion, only used for display.
pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale both down to keep the quotient representable.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift_n = (nb - 900).max(0) as u64;
            let shift_d = (db - 900).max(0) as u64;
            let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
            n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
        }
    }
}

pub fn lcm_of_denominators<'a>(items: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    items
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn gcd_of_numerators<'a>(items: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    items
        .into_iter()
        .fold(BigInt::zero(), |acc, r| acc.gcd(r.numer()))
}

/// Scales the vector by the positive factor making it a primitive integer vector.
/// Returns the zero vector unchanged.
pub fn primitive_positive_scale(v: &[Rational]) -> Vec<Rational> {
    let l = lcm_of_denominators(v.iter());
    let scaled: Vec<Rational> = v.iter().map(|x| x * from_bigint(l.clone())).collect();
    let g = gcd_of_numerators(scaled.iter());
    if g.is_zero() {
        return scaled;
    }
    let g = from_bigint(g.abs());
    scaled.into_iter().map(|x| x / &g).collect()
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Serde adapters encoding rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Str(String),
        Int(i64),
        Float(f64),
    }

    fn decode<E: serde::de::Error>(n: Num) -> Result<Rational, E> {
        match n {
            Num::Str(s) => parse_rational(&s).ok_or_else(|| E::custom(format!("bad rational {s:?}"))),
            Num::Int(i) => Ok(int(i)),
            Num::Float(f) => parse_rational(&f.to_string()).ok_or_else(|| E::custom("bad number")),
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        decode(Num::deserialize(d)?)
    }

    pub mod vec {
        use super::*;
        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(fmt_rational))
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<Num>::deserialize(d)?.into_iter().map(decode).collect()
        }
    }

    pub mod mat {
        use super::*;
        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|row| row.iter().map(fmt_rational).collect::<Vec<_>>()))
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<Num>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(decode).collect())
                .collect()
        }
    }

    pub mod opt_one {
        use super::*;
        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(r) => s.serialize_str(&fmt_rational(r)),
                None => s.serialize_none(),
            }
        }
    }

    pub mod opt_vec {
        use super::*;
        pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.collect_seq(v.iter().map(fmt_rational)),
                None => s.serialize_none(),
            }
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
            let raw = Option::<Vec<Num>>::deserialize(d)?;
            raw.map(|v| v.into_iter().map(decode::<D::Error>).collect::<Result<Vec<_>, _>>())
                .transpose()
        }
    }
}
