//! Dense univariate polynomials over a [`Field`], stored low degree first.
//!
//! Only what field construction needs: multiplication, remainder, and an
//! irreducibility test by trial division.

use crate::gf::{Elem, Field};

/// Drops high zero coefficients. The zero polynomial becomes empty.
pub(crate) fn trim(mut a: Vec<Elem>) -> Vec<Elem> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn mul(f: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(f: &Field, a: &[Elem], m: &[Elem]) -> Vec<Elem> {
    let m = trim(m.to_vec());
    assert!(!m.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = f.inv(m[dm]).expect("nonzero leading coefficient");
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate() {
            r[shift + j] = f.sub(r[shift + j], f.mul(c, mj));
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(f: &Field, a: &[Elem], b: &[Elem], m: &[Elem]) -> Vec<Elem> {
    rem(f, &mul(f, a, b), m)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-q
/// digits of `index`, with the constant term as the most significant digit.
///
/// Iterating `index` upward walks monic polynomials in lexicographic order of
/// `(c_0, c_1, ..., c_{deg-1})`.
pub(crate) fn monic_from_index(q: u32, deg: usize, mut index: u64) -> Vec<Elem> {
    let mut coeffs = vec![0 as Elem; deg + 1];
    coeffs[deg] = 1;
    for c in (0..deg).rev() {
        coeffs[c] = (index % q as u64) as Elem;
        index /= q as u64;
    }
    coeffs
}

/// Trial division against every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(f: &Field, poly: &[Elem]) -> bool {
    let poly = trim(poly.to_vec());
    let deg = poly.len().saturating_sub(1);
    if deg == 0 {
        return false;
    }
    let q = f.q();
    for d in 1..=deg / 2 {
        let count = (q as u64).pow(d as u32);
        for idx in 0..count {
            let divisor = monic_from_index(q, d, idx);
            if rem(f, &poly, &divisor).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `deg`
/// over `f` (coefficients compared from the constant term upward).
pub(crate) fn least_irreducible(f: &Field, deg: usize) -> Vec<Elem> {
    let count = (f.q() as u64).pow(deg as u32);
    (0..count)
        .map(|idx| monic_from_index(f.q(), deg, idx))
        .find(|cand| is_irreducible(f, cand))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_create;

    #[test]
    fn monic_order_starts_at_constant_term() {
        // (c0, c1) = (0,0), (0,1), (1,0), (1,1) over F_2
        assert_eq!(monic_from_index(2, 2, 0), vec![0, 0, 1]);
        assert_eq!(monic_from_index(2, 2, 1), vec![0, 1, 1]);
        assert_eq!(monic_from_index(2, 2, 2), vec![1, 0, 1]);
        assert_eq!(monic_from_index(2, 2, 3), vec![1, 1, 1]);
    }

    #[test]
    fn irreducibility_over_f2() {
        let f2 = field_create(2, 1).unwrap();
        assert!(is_irreducible(&f2, &[1, 1, 1]));
        assert!(!is_irreducible(&f2, &[1, 0, 1]));
        assert!(is_irreducible(&f2, &[1, 1, 0, 0, 1]));
        assert!(!is_irreducible(&f2, &[1, 0, 0, 0, 1]));
        // (c0,c1,c2) = (1,0,0) is x^3+1 = (x+1)(x^2+x+1); (1,0,1) is next
        assert_eq!(least_irreducible(&f2, 3), vec![1, 0, 1, 1]);
    }

    #[test]
    fn remainder_matches_hand_division() {
        let f3 = field_create(3, 1).unwrap();
        // x^3 + 2 mod (x^2 + 1) over F_3: x^3 = -x, so remainder 2 - x = 2 + 2x
        assert_eq!(rem(&f3, &[2, 0, 0, 1], &[1, 0, 1]), vec![2, 2]);
    }
}
