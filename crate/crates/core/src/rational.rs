//! Exact rationals as used in certificates, and their JSON form
//! `{"num": int, "den": int}`.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i64>;

#[derive(Serialize, Deserialize)]
struct Repr {
    num: i64,
    den: i64,
}

fn to_repr(r: &Rational) -> Repr {
    Repr {
        num: *r.numer(),
        den: *r.denom(),
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<Rational, E> {
    if r.den == 0 {
        return Err(E::custom("rational with zero denominator"));
    }
    Ok(Rational::new(r.num, r.den))
}

/// `#[serde(with = "crate::rational::json")]` for a single [`Rational`].
pub mod json {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_repr(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

/// Same as [`json`] for `Vec<Rational>`.
pub mod json_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }
}

/// Same as [`json`] for `Option<Rational>`.
pub mod json_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(to_repr).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Smallest integer `>= r`.
pub fn ceil(r: &Rational) -> i64 {
    r.numer().div_ceil(r.denom())
}

pub fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Nudges `x` up by a few ulps so that a float standing in for a real
/// upper bound stays an upper bound.
pub fn round_up(x: f64) -> f64 {
    x + x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE
}

pub fn round_down(x: f64) -> f64 {
    x - x.abs() * 4.0 * f64::EPSILON - f64::MIN_POSITIVE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_of_rationals() {
        assert_eq!(ceil(&Rational::new(7, 2)), 4);
        assert_eq!(ceil(&Rational::new(4, 1)), 4);
        assert_eq!(ceil(&Rational::new(-7, 2)), -3);
        assert_eq!(ceil(&(Rational::new(2, 1) / Rational::new(1, 3))), 6);
    }

    #[test]
    fn json_shape() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "json")]
            x: Rational,
        }
        let w = W { x: Rational::new(6, 4) };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"x":{"num":3,"den":2}}"#);
        assert_eq!(serde_json::from_str::<W>(&s).unwrap(), w);
        assert!(serde_json::from_str::<W>(r#"{"x":{"num":1,"den":0}}"#).is_err());
    }

    #[test]
    fn rounding_is_outward() {
        for x in [0.0, 1e-300, 0.3, 4.3, 1e12] {
            assert!(round_up(x) > x);
            assert!(round_down(x) < x);
        }
    }
}
