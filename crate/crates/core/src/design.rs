//! Subspace-design certification and the local-profile machinery.
//!
//! A code is a `tau`-subspace design when every message subspace `A'` of
//! dimension at most `r` meets the coordinate kernels in at most
//! `tau(r) * dim A'` dimensions on average. [`tau_profile`] computes the
//! smallest such `tau` exactly by scanning every subspace.
//!
//! The rest of the module works with local profiles: tuples of subspaces
//! `V_1..V_n` of an abstract space `V = F^m`, their potential
//! `alpha dim U - (1/n) sum (dim U - dim(U ∩ V_i))`, and containment
//! witnesses `(A, phi)` tying a profile to a code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::codes::{random_linear_code, AdditiveCode, CodeError};
use crate::gf::{Elem, FieldRef};
use crate::linalg::{quotient_map, quotient_section, LinalgError, Matrix, Subspace, SubspaceEnumerator};
use crate::rational::{factorial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("profile is not violating: potential of the whole space is {value}")]
    NotViolating { value: Rational },
    #[error("quotient identity failed: {lhs} != {rhs}")]
    IdentityViolated { lhs: Rational, rhs: Rational },
    #[error("strictified profile is not strict: {0}")]
    StrictnessFailed(String),
    #[error("containment in the composed kernels fails at coordinate {index}")]
    PreconditionFailed { index: usize },
    #[error("certificate covers r <= {have}, need r = {need}")]
    CertificateTooShort { have: usize, need: usize },
    #[error("pushforward produced a subspace with negative potential {value}")]
    DichotomyViolated { value: Rational },
    #[error("no code met the target after {attempts} attempts; best tau = {best:?}")]
    AttemptsExhausted { attempts: u32, best: Vec<Rational> },
}

/// Exact values of the smallest valid `tau(r)` for `r = 1..=r_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignCertificate {
    pub r_max: usize,
    /// `tau_hat[r - 1]`.
    pub tau_hat: Vec<Rational>,
    /// `witness[r - 1]` attains `tau_hat[r - 1]`; first in enumeration order.
    pub witness: Vec<Subspace>,
    pub subspaces_scanned: u64,
}

impl DesignCertificate {
    pub fn tau(&self, r: usize) -> Option<Rational> {
        (r >= 1).then(|| self.tau_hat.get(r - 1).copied()).flatten()
    }

    /// Re-evaluates every witness against `code` and checks the shape
    /// invariants (range, monotonicity).
    pub fn verify(&self, code: &AdditiveCode) -> bool {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        self.tau_hat.len() == self.r_max
            && self.witness.len() == self.r_max
            && self.tau_hat.windows(2).all(|w| w[0] <= w[1])
            && self.tau_hat.iter().all(|t| *t >= zero && *t <= one)
            && self.witness.iter().zip(&self.tau_hat).enumerate().all(|(idx, (w, t))| {
                w.ambient() == code.k() && w.dim() >= 1 && w.dim() <= idx + 1 && kernel_ratio(code, w) == *t
            })
    }
}

/// `dim(A ∩ ker Enc_i)` for every coordinate, as `dim A - rank(Enc_i B^T)`.
pub fn kernel_intersection_dims(code: &AdditiveCode, a: &Subspace) -> Vec<usize> {
    let bt = a.basis().transpose();
    code.encoders()
        .iter()
        .map(|e| a.dim() - e.mul(&bt).expect("ambient matches k").rank())
        .collect()
}

/// `(1/n) sum_i dim(A ∩ ker Enc_i) / dim A`.
pub fn kernel_ratio(code: &AdditiveCode, a: &Subspace) -> Rational {
    let total: usize = kernel_intersection_dims(code, a).iter().sum();
    Rational::new(total as i64, (code.n() * a.dim()) as i64)
}

/// Exhaustive certification over all subspaces of `F_q^k` of dimension `1..=r_max`.
pub fn tau_profile(code: &AdditiveCode, r_max: usize, budget: u128) -> Result<DesignCertificate, DesignError> {
    if r_max == 0 {
        return Err(DesignError::Shape("r_max must be at least 1".into()));
    }
    let e = SubspaceEnumerator::new(code.field(), code.k(), r_max, budget)?;
    let dims = r_max.min(code.k());
    // best (kernel sum, index) per dimension; larger sum wins, then smaller index
    type Best = Vec<Option<(usize, u64)>>;
    let merge = |mut a: Best, b: Best| -> Best {
        for (x, y) in a.iter_mut().zip(b) {
            *x = match (*x, y) {
                (None, y) => y,
                (x, None) => x,
                (Some(p), Some(q)) => Some(if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p }),
            };
        }
        a
    };
    let best = (0..e.len())
        .into_par_iter()
        .fold(
            || vec![None; dims + 1],
            |mut acc: Best, idx| {
                let a = e.get(idx);
                let sum: usize = kernel_intersection_dims(code, &a).iter().sum();
                let slot = &mut acc[a.dim()];
                if slot.is_none_or(|(s, i)| sum > s || (sum == s && idx < i)) {
                    *slot = Some((sum, idx));
                }
                acc
            },
        )
        .reduce(|| vec![None; dims + 1], merge);

    let n = code.n() as i64;
    let mut tau_hat = Vec::with_capacity(r_max);
    let mut witness = Vec::with_capacity(r_max);
    let mut running: Option<(Rational, u64)> = None;
    for r in 1..=r_max {
        if r <= dims {
            let (sum, idx) = best[r].expect("every dimension up to k is nonempty");
            let ratio = Rational::new(sum as i64, n * r as i64);
            // ties keep the earlier (lower-dimensional) witness
            if running.is_none_or(|(t, _)| ratio > t) {
                running = Some((ratio, idx));
            }
        }
        let (t, idx) = running.expect("r = 1 always sets a value");
        tau_hat.push(t);
        witness.push(e.get(idx));
    }
    Ok(DesignCertificate {
        r_max,
        tau_hat,
        witness,
        subspaces_scanned: e.len(),
    })
}

/// Tuple of subspaces `V_1..V_n` of `F^dim_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalProfile {
    field: FieldRef,
    dim_v: usize,
    parts: Vec<Subspace>,
}

impl LocalProfile {
    pub fn new(field: &FieldRef, dim_v: usize, parts: Vec<Subspace>) -> Result<Self, DesignError> {
        for (i, p) in parts.iter().enumerate() {
            if p.ambient() != dim_v {
                return Err(DesignError::Shape(format!("part {i} lives in dimension {}, expected {dim_v}", p.ambient())));
            }
            if p.field() != field {
                return Err(LinalgError::FieldMismatch.into());
            }
        }
        Ok(LocalProfile {
            field: field.clone(),
            dim_v,
            parts,
        })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn full_space(&self) -> Subspace {
        Subspace::full(&self.field, self.dim_v)
    }

    /// `(M(V_1), ..., M(V_n))` for the quotient map with kernel `w`.
    pub fn quotient(&self, w: &Subspace) -> Result<LocalProfile, DesignError> {
        let m = quotient_map(w);
        let parts = self.parts.iter().map(|p| p.image(&m)).collect::<Result<Vec<_>, _>>()?;
        LocalProfile::new(&self.field, m.rows(), parts)
    }
}

/// Message subspace `A` of `F^k` and an isomorphism from `V` to the dual
/// of `A`. Column `j` of `phi` holds the values of the functional assigned
/// to the `j`th unit vector of `V` on the canonical basis of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentWitness {
    pub a: Subspace,
    pub phi: Matrix,
}

/// Exact value of the potential at `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileEvaluation {
    pub alpha: Rational,
    pub phi_value: Rational,
}

pub fn potential(u: &Subspace, profile: &LocalProfile, alpha: Rational) -> Result<ProfileEvaluation, DesignError> {
    if u.ambient() != profile.dim_v {
        return Err(LinalgError::AmbientMismatch {
            left: u.ambient(),
            right: profile.dim_v,
        }
        .into());
    }
    let du = u.dim() as i64;
    let mut codim = 0i64;
    for p in &profile.parts {
        codim += du - u.intersect(p)?.dim() as i64;
    }
    Ok(ProfileEvaluation {
        alpha,
        phi_value: alpha * du - Rational::new(codim, profile.n().max(1) as i64),
    })
}

/// Outcome of [`check_witness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub valid: bool,
    pub first_failure: Option<usize>,
}

/// Joint kernel of `phi(V_i)`, in coordinates of `A`'s canonical basis.
fn part_joint_kernel(part: &Subspace, phi: &Matrix) -> Subspace {
    part.basis().mul(&phi.transpose()).expect("shapes checked").kernel()
}

/// Rows of `coords * basis(A)`: vectors of `F^k` from `A`-coordinates.
fn embed(coords: &Subspace, a: &Subspace) -> Matrix {
    coords.basis().mul(a.basis()).expect("coordinates match dim A")
}

fn validate_witness(k: usize, profile: &LocalProfile, w: &ContainmentWitness) -> Result<(), DesignError> {
    if w.a.ambient() != k {
        return Err(DesignError::Shape(format!("A lives in F^{}, code has k = {k}", w.a.ambient())));
    }
    if w.a.dim() != profile.dim_v {
        return Err(DesignError::InvalidWitness(format!("dim A = {} but dim V = {}", w.a.dim(), profile.dim_v)));
    }
    if w.phi.rows() != w.a.dim() || w.phi.cols() != profile.dim_v {
        return Err(DesignError::InvalidWitness(format!(
            "phi is {}x{}, expected {}x{}",
            w.phi.rows(),
            w.phi.cols(),
            w.a.dim(),
            profile.dim_v
        )));
    }
    if w.phi.inverse().is_none() {
        return Err(DesignError::InvalidWitness("phi is not invertible".into()));
    }
    Ok(())
}

/// Checks `phi(V_i)° ⊆ ker Enc_i` for each coordinate.
pub fn check_witness(code: &AdditiveCode, profile: &LocalProfile, w: &ContainmentWitness) -> Result<WitnessCheck, DesignError> {
    if profile.n() != code.n() {
        return Err(DesignError::Shape(format!("profile has {} parts, code has n = {}", profile.n(), code.n())));
    }
    validate_witness(code.k(), profile, w)?;
    let first_failure = profile.parts.iter().enumerate().position(|(i, part)| {
        let jk = part_joint_kernel(part, &w.phi);
        !code.encoder(i).mul(&embed(&jk, &w.a).transpose()).expect("shape").is_zero()
    });
    Ok(WitnessCheck {
        valid: first_failure.is_none(),
        first_failure,
    })
}

/// `V_i = (A ∩ ker Enc_i)^⊥` in `A`-coordinates, with `phi` the identity.
pub fn profile_from_witness(code: &AdditiveCode, a: &Subspace) -> Result<(LocalProfile, ContainmentWitness), DesignError> {
    if a.ambient() != code.k() {
        return Err(DesignError::Shape(format!("A lives in F^{}, code has k = {}", a.ambient(), code.k())));
    }
    let bt = a.basis().transpose();
    let parts = code
        .encoders()
        .iter()
        .map(|e| Ok(e.mul(&bt)?.kernel().annihilator()))
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let profile = LocalProfile::new(code.field(), a.dim(), parts)?;
    let witness = ContainmentWitness {
        a: a.clone(),
        phi: Matrix::identity(code.field(), a.dim()),
    };
    Ok((profile, witness))
}

/// Quotients a contained profile by `W`, carrying the witness along.
///
/// The new message space is `A' = phi(W)°` inside `A`; a vector of the
/// quotient is lifted through the quotient section, sent by `phi` to a
/// functional on `A`, and restricted to `A'`.
pub fn quotient_profile(
    code: &AdditiveCode,
    profile: &LocalProfile,
    w: &Subspace,
    witness: &ContainmentWitness,
) -> Result<(LocalProfile, ContainmentWitness), DesignError> {
    if w.ambient() != profile.dim_v {
        return Err(LinalgError::AmbientMismatch {
            left: w.ambient(),
            right: profile.dim_v,
        }
        .into());
    }
    let check = check_witness(code, profile, witness)?;
    if let Some(i) = check.first_failure {
        return Err(DesignError::InvalidWitness(format!("input witness fails at coordinate {i}")));
    }
    let new_profile = profile.quotient(w)?;
    let kw = part_joint_kernel(w, &witness.phi);
    let a_new = Subspace::span(&embed(&kw, &witness.a));
    let gamma_rows: Vec<Vec<Elem>> = (0..a_new.dim())
        .map(|t| witness.a.coordinates(a_new.basis().row(t)).expect("A' lies in A"))
        .collect();
    let gamma = Matrix::from_rows(code.field(), witness.a.dim(), &gamma_rows)?;
    let phi_new = gamma.mul(&witness.phi)?.mul(&quotient_section(w))?;
    let new_witness = ContainmentWitness { a: a_new, phi: phi_new };
    let check = check_witness(code, &new_profile, &new_witness)?;
    if let Some(i) = check.first_failure {
        return Err(DesignError::InvalidWitness(format!("quotient witness fails at coordinate {i}")));
    }
    Ok((new_profile, new_witness))
}

/// Both sides of `Phi(U+W) - Phi(W) = Phi'(M(U))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub lhs: Rational,
    pub rhs: Rational,
}

pub fn quotient_potential_identity(
    u: &Subspace,
    w: &Subspace,
    profile: &LocalProfile,
    alpha: Rational,
) -> Result<IdentityReport, DesignError> {
    let uw = u.sum(w)?;
    let lhs = potential(&uw, profile, alpha)?.phi_value - potential(w, profile, alpha)?.phi_value;
    let m = quotient_map(w);
    let rhs = potential(&u.image(&m)?, &profile.quotient(w)?, alpha)?.phi_value;
    if lhs != rhs {
        return Err(DesignError::IdentityViolated { lhs, rhs });
    }
    Ok(IdentityReport { lhs, rhs })
}

/// Result of [`strictify_profile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strictified {
    /// Maximal-dimension maximizer of the potential.
    pub w: Subspace,
    pub max_value: Rational,
    pub profile: LocalProfile,
}

/// `(value, dim, index)` of the potential maximizer over every subspace,
/// `{0}` included; prefers higher value, then higher dimension, then the
/// earlier enumeration index (`{0}` counts as earliest).
fn potential_maximizer(
    profile: &LocalProfile,
    alpha: Rational,
    budget: u128,
) -> Result<(Rational, Subspace), DesignError> {
    let e = SubspaceEnumerator::new(&profile.field, profile.dim_v, profile.dim_v, budget)?;
    let better = |a: &(Rational, usize, Option<u64>), b: &(Rational, usize, Option<u64>)| {
        (b.0, b.1) > (a.0, a.1) || ((b.0, b.1) == (a.0, a.1) && b.2 < a.2)
    };
    let zero = (Rational::from_integer(0), 0usize, None);
    let best = (0..e.len())
        .into_par_iter()
        .map(|idx| {
            let u = e.get(idx);
            let v = potential(&u, profile, alpha).expect("ambient matches").phi_value;
            (v, u.dim(), Some(idx))
        })
        .reduce(|| zero, |a, b| if better(&a, &b) { b } else { a });
    let w = match best.2 {
        None => Subspace::zero(&profile.field, profile.dim_v),
        Some(idx) => e.get(idx),
    };
    Ok((best.0, w))
}

/// Exhaustive check that `Phi(U) < 0` for every nonzero `U`; returns the
/// first offender.
pub fn strictness_violation(profile: &LocalProfile, alpha: Rational, budget: u128) -> Result<Option<Subspace>, DesignError> {
    let e = SubspaceEnumerator::new(&profile.field, profile.dim_v, profile.dim_v, budget)?;
    let zero = Rational::from_integer(0);
    let hit = (0..e.len()).into_par_iter().find_first(|&idx| {
        potential(&e.get(idx), profile, alpha).expect("ambient matches").phi_value >= zero
    });
    Ok(hit.map(|idx| e.get(idx)))
}

/// Quotients a violating profile by the maximal-dimension maximizer of its
/// potential, producing a profile whose potential is negative on every
/// nonzero subspace.
pub fn strictify_profile(profile: &LocalProfile, alpha: Rational, budget: u128) -> Result<Strictified, DesignError> {
    let full_value = potential(&profile.full_space(), profile, alpha)?.phi_value;
    if full_value >= Rational::from_integer(0) {
        return Err(DesignError::NotViolating { value: full_value });
    }
    let (max_value, w) = potential_maximizer(profile, alpha, budget)?;
    let out = profile.quotient(&w)?;
    if let Some(u) = strictness_violation(&out, alpha, budget)? {
        return Err(DesignError::StrictnessFailed(format!("{u:?} has nonnegative potential")));
    }
    Ok(Strictified {
        w,
        max_value,
        profile: out,
    })
}

/// Either `M(A) = {0}` or a nonzero `U ⊆ V` with nonnegative potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    MaZero,
    Found {
        u: Subspace,
        evaluation: ProfileEvaluation,
        /// `(V_i ∩ U)` in coordinates of `U`'s basis.
        inner_profile: LocalProfile,
        /// Containment of `inner_profile` in the inner code, via `M(A)`.
        inner_witness: ContainmentWitness,
    },
}

/// Pushes a profile contained in `Enc_i ∘ M` forward to the inner code.
///
/// `witness.a` lives in the domain of `M`; the profile is assumed to satisfy
/// `phi(V_i)° ⊆ ker(Enc_i ∘ M)`, which is checked. When `M(A) ≠ {0}` the
/// subspace `U = phi^{-1}((ker M|_A)^⊥)` is returned together with a
/// containment witness of `(V_i ∩ U)` in the inner code, and its potential
/// at `tau_hat_inner(r)` is asserted nonnegative.
pub fn pushforward_dichotomy(
    inner: &AdditiveCode,
    inner_cert: &DesignCertificate,
    m: &Matrix,
    profile: &LocalProfile,
    witness: &ContainmentWitness,
    r: usize,
) -> Result<Dichotomy, DesignError> {
    if m.rows() != inner.k() || m.cols() != witness.a.ambient() {
        return Err(DesignError::Shape(format!(
            "M is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            inner.k(),
            witness.a.ambient()
        )));
    }
    if profile.n() != inner.n() {
        return Err(DesignError::Shape(format!("profile has {} parts, inner code has n = {}", profile.n(), inner.n())));
    }
    validate_witness(witness.a.ambient(), profile, witness)?;
    for (i, part) in profile.parts.iter().enumerate() {
        let jk = part_joint_kernel(part, &witness.phi);
        let composed = inner.encoder(i).mul(m)?;
        if !composed.mul(&embed(&jk, &witness.a).transpose())?.is_zero() {
            return Err(DesignError::PreconditionFailed { index: i });
        }
    }
    let mb = m.mul(&witness.a.basis().transpose())?;
    if mb.is_zero() {
        return Ok(Dichotomy::MaZero);
    }
    if r < profile.dim_v {
        return Err(DesignError::Shape(format!("r = {r} is below dim V = {}", profile.dim_v)));
    }
    let tau = inner_cert.tau(r).ok_or(DesignError::CertificateTooShort {
        have: inner_cert.r_max,
        need: r,
    })?;

    let k_perp = mb.kernel().annihilator();
    let phi_inv = witness.phi.inverse().expect("validated invertible");
    let u_vectors: Vec<Vec<Elem>> = (0..k_perp.dim()).map(|t| phi_inv.apply(k_perp.basis().row(t))).collect();
    let u = Subspace::from_vectors(profile.field(), profile.dim_v, &u_vectors)?;
    let evaluation = potential(&u, profile, tau)?;

    // M(A) and the functionals phi(u) descended to it
    let b = Subspace::span(&mb.transpose());
    let preimages: Vec<Vec<Elem>> = (0..b.dim())
        .map(|t| mb.solve(b.basis().row(t)).expect("basis of M(A) has preimages"))
        .collect();
    let c = Matrix::from_rows(profile.field(), witness.a.dim(), &preimages)?;
    let phi_inner = c.mul(&witness.phi)?.mul(&u.basis().transpose())?;
    let inner_parts = profile
        .parts
        .iter()
        .map(|p| {
            let meet = p.intersect(&u)?;
            let coords: Vec<Vec<Elem>> = (0..meet.dim())
                .map(|t| u.coordinates(meet.basis().row(t)).expect("V_i ∩ U lies in U"))
                .collect();
            Ok(Subspace::from_vectors(profile.field(), u.dim(), &coords)?)
        })
        .collect::<Result<Vec<_>, DesignError>>()?;
    let inner_profile = LocalProfile::new(profile.field(), u.dim(), inner_parts)?;
    let inner_witness = ContainmentWitness { a: b, phi: phi_inner };
    let check = check_witness(inner, &inner_profile, &inner_witness)?;
    if let Some(i) = check.first_failure {
        return Err(DesignError::InvalidWitness(format!("pushed-forward witness fails at coordinate {i}")));
    }
    let local = potential(&inner_profile.full_space(), &inner_profile, tau)?;
    debug_assert_eq!(local.phi_value, evaluation.phi_value);
    if evaluation.phi_value < Rational::from_integer(0) {
        return Err(DesignError::DichotomyViolated {
            value: evaluation.phi_value,
        });
    }
    Ok(Dichotomy::Found {
        u,
        evaluation,
        inner_profile,
        inner_witness,
    })
}

/// Per-threshold result of [`equivalence_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdReport {
    pub tau: Rational,
    /// Subspaces whose ratio exceeds `tau`.
    pub exceeding: u64,
    /// Subspaces whose induced profile has negative potential.
    pub violating: u64,
    /// Enumeration indices where the two tests disagree.
    pub mismatches: Vec<u64>,
    /// Violating profiles strictified and quotiented successfully.
    pub strictified: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub r: usize,
    pub tau_hat: Rational,
    pub subspaces_scanned: u64,
    pub thresholds: Vec<ThresholdReport>,
}

impl EquivalenceReport {
    /// No mismatches, nothing violates at `tau_hat`, and the certificate
    /// witness violates just below it.
    pub fn passed(&self) -> bool {
        self.thresholds.iter().all(|t| t.mismatches.is_empty() && t.strictified == t.violating)
            && self.thresholds[0].violating == 0
            && self.thresholds[1].violating >= 1
    }
}

/// Compares the ratio test against the potential test on every subspace
/// of dimension at most `r`, at `tau_hat(r)` and just below it.
///
/// Ratios have denominators dividing `n * r!`, so subtracting
/// `1/(2 n r!)` lands strictly between `tau_hat(r)` and the next lower value.
pub fn equivalence_check(code: &AdditiveCode, r: usize, budget: u128) -> Result<EquivalenceReport, DesignError> {
    let cert = tau_profile(code, r, budget)?;
    let tau_hat = cert.tau(r).expect("certificate covers r");
    let gap = Rational::new(1, 2 * code.n() as i64 * factorial(r as u32));
    let e = SubspaceEnumerator::new(code.field(), code.k(), r, budget)?;
    let zero = Rational::from_integer(0);
    let mut thresholds = Vec::new();
    for tau in [tau_hat, tau_hat - gap] {
        let rows = (0..e.len())
            .into_par_iter()
            .map(|idx| -> Result<(u64, bool, bool, bool), DesignError> {
                let a = e.get(idx);
                let exceeds = kernel_ratio(code, &a) > tau;
                let (profile, witness) = profile_from_witness(code, &a)?;
                let violates = potential(&profile.full_space(), &profile, tau)?.phi_value < zero;
                let mut strict_ok = false;
                if violates {
                    let s = strictify_profile(&profile, tau, budget)?;
                    let (q_profile, _) = quotient_profile(code, &profile, &s.w, &witness)?;
                    strict_ok = q_profile == s.profile && s.profile.dim_v() > 0;
                }
                Ok((idx, exceeds, violates, strict_ok))
            })
            .collect::<Result<Vec<_>, _>>()?;
        thresholds.push(ThresholdReport {
            tau,
            exceeding: rows.iter().filter(|r| r.1).count() as u64,
            violating: rows.iter().filter(|r| r.2).count() as u64,
            mismatches: rows.iter().filter(|r| r.1 != r.2).map(|r| r.0).collect(),
            strictified: rows.iter().filter(|r| r.3).count() as u64,
        });
    }
    Ok(EquivalenceReport {
        r,
        tau_hat,
        subspaces_scanned: e.len(),
        thresholds,
    })
}

/// Result of [`search_inner_code`].
#[derive(Clone, Debug)]
pub struct InnerSearch {
    pub code: AdditiveCode,
    pub certificate: DesignCertificate,
    /// Attempts used, counting the successful one.
    pub attempts: u32,
    pub warnings: Vec<String>,
}

/// Draws random codes `F_q^k_in -> (F_q^s)^d` until one certifies
/// `tau_hat(r') <= k_in/(s d) + epsilon` for every `r' <= r`.
#[allow(clippy::too_many_arguments)]
pub fn search_inner_code(
    field: &FieldRef,
    k_in: usize,
    s: usize,
    d: usize,
    r: usize,
    epsilon: Rational,
    max_attempts: u32,
    seed: u64,
    budget: u128,
) -> Result<InnerSearch, DesignError> {
    let mut warnings = Vec::new();
    if Rational::from_integer(r as i64) > epsilon * s as i64 / 4 {
        warnings.push(format!(
            "r = {r} exceeds epsilon*s/4 = {}; the random-code guarantee does not cover it",
            epsilon * s as i64 / 4
        ));
    }
    let target = Rational::new(k_in as i64, (s * d) as i64) + epsilon;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Vec<Rational>> = None;
    for attempt in 1..=max_attempts {
        let code_seed: u64 = master.gen();
        let code = match random_linear_code(field, k_in, s, d, code_seed) {
            Ok(c) => c,
            Err(CodeError::RetriesExhausted(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let cert = tau_profile(&code, r, budget)?;
        if cert.tau_hat.iter().all(|t| *t <= target) {
            return Ok(InnerSearch {
                code,
                certificate: cert,
                attempts: attempt,
                warnings,
            });
        }
        if best.as_ref().is_none_or(|b| cert.tau_hat < *b) {
            best = Some(cert.tau_hat);
        }
    }
    Err(DesignError::AttemptsExhausted {
        attempts: max_attempts,
        best: best.unwrap_or_default(),
    })
}
