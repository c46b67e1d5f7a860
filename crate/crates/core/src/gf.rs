//! Exact arithmetic in prime-power fields `F_q`, `q = p^m <= 2^16`.
//!
//! An element is a single integer code in `[0, q)`: its base-`p` digits are
//! the coefficients of a polynomial over `F_p`, least significant digit
//! first (the constant term). The modulus is the lexicographically least
//! monic irreducible polynomial of degree `m`, coefficients compared from
//! the constant term upward, so any tool can re-derive the same field.
//!
//! Multiplication goes through log/antilog tables built from the least
//! primitive element.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::poly;

/// Integer code of a field element.
pub type Elem = u16;

/// Shared handle to an immutable field.
pub type FieldRef = Arc<Field>;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field order {p}^{m} exceeds the supported cap of 2^16")]
    TooLarge { p: u32, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {found:?} does not match the canonical modulus {expected:?} for F_{p}^{m}")]
    ModulusMismatch {
        p: u32,
        m: u32,
        expected: Vec<u32>,
        found: Vec<u32>,
    },
}

pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<Elem>,
    generator: Elem,
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled so products skip a reduction.
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (modulus {:?})", self.p, self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Builds `F_{p^m}` with the canonical modulus.
pub fn field_create(p: u32, m: u32) -> Result<Field, GfError> {
    if m < 1 {
        return Err(GfError::DegreeZero);
    }
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let q = (p as u64)
        .checked_pow(m)
        .filter(|&q| q <= MAX_ORDER as u64)
        .ok_or(GfError::TooLarge { p, m })? as u32;

    if m == 1 {
        let mul = |a: u32, b: u32| ((a as u64 * b as u64) % p as u64) as u32;
        return Ok(Field::with_tables(p, 1, q, vec![0, 1], mul));
    }

    let base = field_create(p, 1)?;
    let modulus = poly::least_irreducible(&base, m as usize);
    let digits = |mut a: u32| -> Vec<Elem> {
        (0..m)
            .map(|_| {
                let d = (a % p) as Elem;
                a /= p;
                d
            })
            .collect()
    };
    let undigits = |v: &[Elem]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d as u32) };
    let mul = |a: u32, b: u32| undigits(&poly::mul_mod(&base, &digits(a), &digits(b), &modulus));
    Ok(Field::with_tables(p, m, q, modulus.clone(), mul))
}

impl Field {
    fn with_tables(p: u32, m: u32, q: u32, modulus: Vec<Elem>, mul: impl Fn(u32, u32) -> u32) -> Self {
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let slow_pow = |a: u32, mut e: u64| {
            let (mut base, mut acc) = (a, 1u32);
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul(acc, base);
                }
                base = mul(base, base);
                e >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0 as Elem; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..order as usize {
            exp[i] = cur as Elem;
            exp[i + order as usize] = cur as Elem;
            log[cur as usize] = i as u32;
            cur = mul(cur, generator);
        }
        debug_assert_eq!(cur, 1);
        Field {
            p,
            m,
            q,
            modulus,
            generator: generator as Elem,
            exp,
            log,
        }
    }

    pub fn shared(self) -> FieldRef {
        Arc::new(self)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }

    /// Least code whose multiplicative order is `q - 1`.
    pub fn primitive_element(&self) -> Elem {
        self.generator
    }

    pub fn contains(&self, a: Elem) -> bool {
        (a as u32) < self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else if self.m == 1 {
            ((a as u32 + b as u32) % self.p) as Elem
        } else {
            self.digitwise(a, b, |x, y| (x + y) % self.p)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a == 0 {
            a
        } else if self.m == 1 {
            (self.p - a as u32) as Elem
        } else {
            self.digitwise(a, 0, |x, _| (self.p - x) % self.p)
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else if self.m == 1 {
            ((a as u32 + self.p - b as u32) % self.p) as Elem
        } else {
            self.digitwise(a, b, |x, y| (x + self.p - y) % self.p)
        }
    }

    fn digitwise(&self, a: Elem, b: Elem, op: impl Fn(u32, u32) -> u32) -> Elem {
        let (mut a, mut b) = (a as u32, b as u32);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.m {
            out += op(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let idx = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[idx as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let order = (self.q - 1) as u64;
        let mut ord = order;
        for r in prime_factors(order) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == 1 {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// Iterator over all elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }
}

/// On-disk descriptor: `{"p": int, "m": int, "modulus": [int, ...]}`.
#[derive(Serialize, Deserialize)]
struct FieldDescriptor {
    p: u32,
    m: u32,
    modulus: Vec<u32>,
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldDescriptor {
            p: self.p,
            m: self.m,
            modulus: self.modulus.iter().map(|&c| c as u32).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let desc = FieldDescriptor::deserialize(d)?;
        let field = field_create(desc.p, desc.m).map_err(serde::de::Error::custom)?;
        let expected: Vec<u32> = field.modulus.iter().map(|&c| c as u32).collect();
        if expected != desc.modulus {
            return Err(serde::de::Error::custom(GfError::ModulusMismatch {
                p: desc.p,
                m: desc.m,
                expected,
                found: desc.modulus,
            }));
        }
        Ok(field)
    }
}
