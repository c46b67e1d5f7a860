use std::fmt;
use std::hash::{Hash, Hasher};

use super::{LinalgError, Matrix};
use crate::gf::{Elem, FieldRef};

/// Linear subspace of `F_q^k`, stored as its reduced row-echelon basis.
///
/// Because the basis is canonical, two subspaces are equal exactly when
/// their basis matrices are identical. Subspaces of the coordinate dual are
/// the same type: a functional is a row vector under the dot pairing.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.cols().hash(state);
        self.basis.data().hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Elem]> = (0..self.dim()).map(|r| self.basis.row(r)).collect();
        write!(f, "Subspace(dim {} in F_{}^{}, {:?})", self.dim(), self.field().q(), self.ambient(), rows)
    }
}

impl Subspace {
    pub fn zero(field: &FieldRef, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FieldRef, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row span of `m`.
    pub fn span(m: &Matrix) -> Self {
        let red = m.rref();
        Subspace {
            basis: red.canonical.row_band(0, red.rank),
            pivots: red.pivots,
        }
    }

    pub fn from_vectors(field: &FieldRef, ambient: usize, vectors: &[Vec<Elem>]) -> Result<Self, LinalgError> {
        Ok(Self::span(&Matrix::from_rows(field, ambient, vectors)?))
    }

    /// Wraps a matrix that must already be in canonical form.
    pub fn from_canonical(basis: Matrix) -> Result<Self, LinalgError> {
        let s = Self::span(&basis);
        if s.basis != basis {
            return Err(LinalgError::NotCanonical);
        }
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(basis: Matrix, pivots: Vec<usize>) -> Self {
        Subspace { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn field(&self) -> &FieldRef {
        self.basis.field()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }

    fn check_same(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.field() != other.field() {
            return Err(LinalgError::FieldMismatch);
        }
        if self.ambient() != other.ambient() {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient(),
                right: other.ambient(),
            });
        }
        Ok(())
    }

    /// Coefficients of `v` in the canonical basis, `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        if v.len() != self.ambient() {
            return None;
        }
        let coords: Vec<Elem> = self.pivots.iter().map(|&p| v[p]).collect();
        (self.combine(&coords) == v).then_some(coords)
    }

    /// `sum_t coords[t] * basis_row[t]`.
    pub fn combine(&self, coords: &[Elem]) -> Vec<Elem> {
        assert_eq!(coords.len(), self.dim(), "one coefficient per basis vector");
        let f = self.field();
        let mut out = vec![0; self.ambient()];
        for (t, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.basis.row(t)) {
                *o = f.add(*o, f.mul(c, b));
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_same(other)?;
        Ok((0..other.dim()).all(|r| self.contains_vector(other.basis.row(r))))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same(other)?;
        Ok(Self::span(&self.basis.vstack(&other.basis)?))
    }

    /// `A ∩ B = (A^⊥ + B^⊥)^∘`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.joint_kernel())
    }

    /// Functionals vanishing on `self`, as row vectors.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    /// Vectors killed by every functional in `self`.
    pub fn joint_kernel(&self) -> Subspace {
        self.basis.kernel()
    }

    /// `M(self)` for a matrix `M` acting on column vectors.
    pub fn image(&self, m: &Matrix) -> Result<Subspace, LinalgError> {
        if m.cols() != self.ambient() {
            return Err(LinalgError::AmbientMismatch {
                left: m.cols(),
                right: self.ambient(),
            });
        }
        let vectors: Vec<Vec<Elem>> = (0..self.dim()).map(|r| m.apply(self.basis.row(r))).collect();
        Subspace::from_vectors(self.field(), m.rows(), &vectors)
    }
}

/// Surjection `F^k -> F^{k - dim W}` with kernel exactly `W`.
///
/// A vector is reduced against `W`'s canonical basis, which clears `W`'s
/// pivot coordinates, and the remaining coordinates are kept in order.
pub fn quotient_map(w: &Subspace) -> Matrix {
    let k = w.ambient();
    let f = w.field();
    let free = non_pivots(w);
    let mut m = Matrix::zeros(f, free.len(), k);
    let mut target = vec![usize::MAX; k];
    for (t, &c) in free.iter().enumerate() {
        target[c] = t;
        m.set(t, c, 1);
    }
    for (row, &p) in w.pivots().iter().enumerate() {
        // e_p reduces to e_p - w_row, whose free coordinates are -w_row
        for &c in &free {
            let v = w.basis().get(row, c);
            if v != 0 {
                m.set(target[c], p, f.neg(v));
            }
        }
    }
    m
}

/// Right inverse of [`quotient_map`]: embeds the kept coordinates back.
pub fn quotient_section(w: &Subspace) -> Matrix {
    let free = non_pivots(w);
    let mut s = Matrix::zeros(w.field(), w.ambient(), free.len());
    for (t, &c) in free.iter().enumerate() {
        s.set(c, t, 1);
    }
    s
}

fn non_pivots(w: &Subspace) -> Vec<usize> {
    let mut is_pivot = vec![false; w.ambient()];
    for &p in w.pivots() {
        is_pivot[p] = true;
    }
    (0..w.ambient()).filter(|&c| !is_pivot[c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_create;
    use crate::linalg::SubspaceEnumerator;

    fn f2() -> FieldRef {
        field_create(2, 1).unwrap().shared()
    }

    /// Every subspace of F^k including {0}.
    fn all_subspaces(f: &FieldRef, k: usize) -> Vec<Subspace> {
        let mut out = vec![Subspace::zero(f, k)];
        out.extend(SubspaceEnumerator::new(f, k, k, u128::MAX).unwrap().iter());
        out
    }

    /// Membership oracle: enumerate every vector of F^k.
    fn members(s: &Subspace) -> Vec<Vec<Elem>> {
        let q = s.field().q() as usize;
        let k = s.ambient();
        (0..q.pow(k as u32))
            .map(|mut idx| {
                (0..k)
                    .map(|_| {
                        let d = (idx % q) as Elem;
                        idx /= q;
                        d
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|v| s.contains_vector(v))
            .collect()
    }

    #[test]
    fn basic_ops() {
        let f = f2();
        let a = Subspace::from_vectors(&f, 2, &[vec![1, 0]]).unwrap();
        let b = Subspace::from_vectors(&f, 2, &[vec![1, 1]]).unwrap();
        assert!(a.intersect(&b).unwrap().is_zero());
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert_eq!(a.sum(&Subspace::zero(&f, 2)).unwrap(), a);
        assert!(a.sum(&b).unwrap().is_full());
        let c = Subspace::zero(&f, 3);
        assert!(matches!(a.sum(&c), Err(LinalgError::AmbientMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn annihilator_extremes() {
        let f = f2();
        assert!(Subspace::zero(&f, 3).annihilator().is_full());
        assert!(Subspace::full(&f, 3).annihilator().is_zero());
        assert!(Subspace::zero(&f, 3).joint_kernel().is_full());
        assert!(Subspace::full(&f, 3).joint_kernel().is_zero());
    }

    #[test]
    fn intersection_matches_membership_oracle_f2_4() {
        let f = f2();
        let subs = all_subspaces(&f, 4);
        for a in subs.iter().step_by(7) {
            for b in subs.iter().step_by(5) {
                let i = a.intersect(b).unwrap();
                let expect = members(a).into_iter().filter(|v| b.contains_vector(v)).count();
                assert_eq!(members(&i).len(), expect);
                assert_eq!(i.dim() + a.sum(b).unwrap().dim(), a.dim() + b.dim());
            }
        }
    }

    #[test]
    fn modularity_exhaustive_f2_3() {
        let f = f2();
        let subs = all_subspaces(&f, 3);
        assert_eq!(subs.len(), 16);
        for a in &subs {
            for b in &subs {
                let meet = a.intersect(b).unwrap();
                let join = a.sum(b).unwrap();
                assert_eq!(meet.dim() + join.dim(), a.dim() + b.dim());
                assert!(a.contains(&meet).unwrap() && b.contains(&meet).unwrap());
                assert!(join.contains(a).unwrap() && join.contains(b).unwrap());
            }
        }
    }

    #[test]
    fn duality_exhaustive_f2_4() {
        let f = f2();
        for a in all_subspaces(&f, 4) {
            assert_eq!(a.annihilator().joint_kernel(), a);
            assert_eq!(a.joint_kernel().annihilator(), a);
            assert_eq!(a.annihilator().dim(), 4 - a.dim());
        }
    }

    #[test]
    fn quotient_map_extremes() {
        let f = field_create(3, 1).unwrap().shared();
        let m = quotient_map(&Subspace::zero(&f, 3));
        assert_eq!(m, Matrix::identity(&f, 3));
        let m = quotient_map(&Subspace::full(&f, 3));
        assert_eq!((m.rows(), m.cols()), (0, 3));
    }

    #[test]
    fn pushforward_exhaustive_f2_4() {
        let f = f2();
        let subs = all_subspaces(&f, 4);
        for w in &subs {
            let m = quotient_map(w);
            let s = quotient_section(w);
            assert_eq!(m.mul(&s).unwrap(), Matrix::identity(&f, 4 - w.dim()));
            assert_eq!(m.kernel(), *w);
            for u in &subs {
                let mu = u.image(&m).unwrap();
                assert_eq!(mu.dim(), u.sum(w).unwrap().dim() - w.dim());
            }
        }
    }

    #[test]
    fn pushforward_random_f5() {
        let f = field_create(5, 1).unwrap().shared();
        let w = Subspace::from_vectors(&f, 4, &[vec![1, 2, 3, 4], vec![0, 1, 1, 0]]).unwrap();
        let u = Subspace::from_vectors(&f, 4, &[vec![1, 0, 0, 1], vec![2, 1, 1, 1]]).unwrap();
        let m = quotient_map(&w);
        // kernel/rank oracle: dim M(U) = rank(M * U^T)
        let rank = m.mul(&u.basis().transpose()).unwrap().rank();
        assert_eq!(u.image(&m).unwrap().dim(), rank);
        assert_eq!(rank, u.sum(&w).unwrap().dim() - w.dim());
    }

    #[test]
    fn coordinates_roundtrip() {
        let f = field_create(3, 1).unwrap().shared();
        let s = Subspace::from_vectors(&f, 3, &[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let v = s.combine(&[2, 1]);
        assert_eq!(s.coordinates(&v), Some(vec![2, 1]));
        assert_eq!(s.coordinates(&[0, 0, 1]), None);
    }

    #[test]
    fn from_canonical_rejects_unreduced() {
        let f = f2();
        let m = Matrix::new(&f, 2, 2, vec![1, 1, 0, 1]).unwrap();
        assert_eq!(Subspace::from_canonical(m).unwrap_err(), LinalgError::NotCanonical);
    }
}
