//! Additive codes `F_q^k -> (F_q^s)^n` given by their coordinate encoders.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, FieldRef};
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::poly;
use crate::rational::Rational;

/// Resampling limit for [`random_linear_code`].
pub const RLC_RETRIES: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("stacked encoder has rank {rank} < k = {k}")]
    NotInjective { rank: usize, k: usize },
    #[error("field of order {q} is too small: {need}")]
    FieldTooSmall { q: u32, need: String },
    #[error("bad evaluation points: {0}")]
    BadEvaluationPoints(String),
    #[error("no injective code after {0} draws")]
    RetriesExhausted(u32),
    #[error("scan of {count} messages exceeds the budget of {budget}")]
    BudgetExceeded { count: BigUint, budget: u128 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Frs,
    Rlc,
    RsOuter,
    Ael,
    /// Hand-built encoders.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub kind: CodeKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// An additive code: `n` coordinate encoders, each an `s x k` matrix.
#[derive(Clone, Debug)]
pub struct AdditiveCode {
    field: FieldRef,
    k: usize,
    s: usize,
    n: usize,
    encoders: Vec<Matrix>,
    kernels: Vec<Subspace>,
    meta: CodeMeta,
}

impl PartialEq for AdditiveCode {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.k == other.k
            && self.s == other.s
            && self.encoders == other.encoders
            && self.meta == other.meta
    }
}

/// Validating constructor.
pub fn code_new(
    field: &FieldRef,
    k: usize,
    s: usize,
    n: usize,
    encoders: Vec<Matrix>,
) -> Result<AdditiveCode, CodeError> {
    if k == 0 || s == 0 || n == 0 {
        return Err(CodeError::Shape(format!("k, s, n must be positive (got {k}, {s}, {n})")));
    }
    if encoders.len() != n {
        return Err(CodeError::Shape(format!("{} encoders for n = {n}", encoders.len())));
    }
    for (i, e) in encoders.iter().enumerate() {
        if e.rows() != s || e.cols() != k {
            return Err(CodeError::Shape(format!(
                "encoder {i} is {}x{}, expected {s}x{k}",
                e.rows(),
                e.cols()
            )));
        }
        if e.field() != field {
            return Err(LinalgError::FieldMismatch.into());
        }
    }
    let mut stacked = Matrix::zeros(field, 0, k);
    for e in &encoders {
        stacked = stacked.vstack(e)?;
    }
    let rank = stacked.rank();
    if rank < k {
        return Err(CodeError::NotInjective { rank, k });
    }
    let kernels = encoders.iter().map(Matrix::kernel).collect();
    Ok(AdditiveCode {
        field: field.clone(),
        k,
        s,
        n,
        encoders,
        kernels,
        meta: CodeMeta {
            kind: CodeKind::Custom,
            seed: None,
        },
    })
}

impl AdditiveCode {
    pub fn with_meta(mut self, kind: CodeKind, seed: Option<u64>) -> Self {
        self.meta = CodeMeta { kind, seed };
        self
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoders(&self) -> &[Matrix] {
        &self.encoders
    }

    pub fn encoder(&self, i: usize) -> &Matrix {
        &self.encoders[i]
    }

    /// `ker Enc_i` for every coordinate, computed once at construction.
    pub fn kernels(&self) -> &[Subspace] {
        &self.kernels
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.k as i64, (self.s * self.n) as i64)
    }

    pub fn encode(&self, x: &[Elem]) -> Codeword {
        assert_eq!(x.len(), self.k, "message length");
        Codeword {
            blocks: self.encoders.iter().map(|e| e.apply(x)).collect(),
        }
    }

    /// Number of messages, `q^k`.
    pub fn message_count(&self) -> BigUint {
        BigUint::from(self.field.q()).pow(self.k as u32)
    }

    /// Every codeword, in message-index order. Only for tiny codes.
    pub fn codewords(&self) -> Vec<Codeword> {
        let total = (self.field.q() as u64).pow(self.k as u32);
        (0..total)
            .map(|i| self.encode(&vector_from_index(self.field.q(), self.k, i)))
            .collect()
    }
}

/// The vector whose base-`q` digits (coordinate 0 least significant) spell `index`.
pub fn vector_from_index(q: u32, len: usize, mut index: u64) -> Vec<Elem> {
    (0..len)
        .map(|_| {
            let d = (index % q as u64) as Elem;
            index /= q as u64;
            d
        })
        .collect()
}

/// `n` blocks of `s` field elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Codeword {
    pub blocks: Vec<Vec<Elem>>,
}

impl Codeword {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    /// Number of nonzero blocks.
    pub fn weight(&self) -> usize {
        self.blocks.iter().filter(|b| b.iter().any(|&x| x != 0)).count()
    }

    /// Number of blocks where the two words differ.
    pub fn distance(&self, other: &Codeword) -> usize {
        self.blocks.iter().zip(&other.blocks).filter(|(a, b)| a != b).count()
    }
}

/// Exact minimum distance with a minimum-weight message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceCertificate {
    #[serde(with = "crate::rational::json")]
    pub delta: Rational,
    pub weight: usize,
    /// Message of the first minimum-weight codeword in index order.
    pub witness: Vec<Elem>,
}

/// Exhaustive scan over all nonzero messages.
pub fn min_distance(code: &AdditiveCode, budget: u128) -> Result<DistanceCertificate, CodeError> {
    let count = code.message_count();
    let total = match u64::try_from(&count) {
        Ok(t) if (t as u128) <= budget => t,
        _ => return Err(CodeError::BudgetExceeded { count, budget }),
    };
    let q = code.field.q();
    let (weight, index) = (1..total)
        .into_par_iter()
        .map(|i| (code.encode(&vector_from_index(q, code.k, i)).weight(), i))
        .min()
        .expect("k >= 1 gives a nonzero message");
    Ok(DistanceCertificate {
        delta: Rational::new(weight as i64, code.n as i64),
        weight,
        witness: vector_from_index(q, code.k, index),
    })
}

/// Evaluation data for a folded Reed-Solomon code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrsParams {
    pub gamma: Elem,
    pub evals: Vec<Elem>,
}

impl FrsParams {
    /// `gamma` primitive and `alpha_i = gamma^(s*i)`.
    pub fn standard(field: &FieldRef, s: usize, n: usize) -> Self {
        let gamma = field.primitive_element();
        FrsParams {
            gamma,
            evals: (0..n).map(|i| field.pow(gamma, (s * i) as u64)).collect(),
        }
    }
}

/// Folded Reed-Solomon code on polynomials of degree `< k`: block `i`
/// evaluates at `alpha_i, alpha_i*gamma, ..., alpha_i*gamma^(s-1)`.
pub fn folded_rs(
    field: &FieldRef,
    s: usize,
    n: usize,
    k: usize,
    params: &FrsParams,
) -> Result<AdditiveCode, CodeError> {
    let q = field.q();
    if (q as usize) <= s * n {
        return Err(CodeError::FieldTooSmall {
            q,
            need: format!("q > s*n = {}", s * n),
        });
    }
    if k == 0 || k > s * n {
        return Err(CodeError::Shape(format!("need 1 <= k <= s*n, got k = {k}")));
    }
    if params.evals.len() != n {
        return Err(CodeError::BadEvaluationPoints(format!("{} points for n = {n}", params.evals.len())));
    }
    let mut points = Vec::with_capacity(s * n);
    for &a in &params.evals {
        for t in 0..s {
            points.push(field.mul(a, field.pow(params.gamma, t as u64)));
        }
    }
    let mut seen = vec![false; q as usize];
    for &p in &points {
        if p == 0 || !field.contains(p) || std::mem::replace(&mut seen[p as usize], true) {
            return Err(CodeError::BadEvaluationPoints(format!("point {p} is zero, invalid, or repeated")));
        }
    }
    let encoders = points
        .chunks(s)
        .map(|block| {
            let rows: Vec<Vec<Elem>> = block
                .iter()
                .map(|&x| (0..k).map(|j| field.pow(x, j as u64)).collect())
                .collect();
            Matrix::from_rows(field, k, &rows)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(code_new(field, k, s, n, encoders)?.with_meta(CodeKind::Frs, None))
}

/// Code with uniformly random encoder entries, redrawn until injective.
pub fn random_linear_code(
    field: &FieldRef,
    k: usize,
    s: usize,
    n: usize,
    seed: u64,
) -> Result<AdditiveCode, CodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.q();
    for _ in 0..RLC_RETRIES {
        let encoders = (0..n)
            .map(|_| {
                let data = (0..s * k).map(|_| rng.gen_range(0..q) as Elem).collect();
                Matrix::new(field, s, k, data)
            })
            .collect::<Result<Vec<_>, _>>()?;
        match code_new(field, k, s, n, encoders) {
            Ok(code) => return Ok(code.with_meta(CodeKind::Rlc, Some(seed))),
            Err(CodeError::NotInjective { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CodeError::RetriesExhausted(RLC_RETRIES))
}

/// Reed-Solomon code of dimension `big_k` over `F_{q^k_in}`, read as an
/// additive code over `F_q` with blocks of `k_in` symbols.
///
/// The extension is `F_q[x]` modulo the least monic irreducible of degree
/// `k_in`; the evaluation points are the extension elements with codes
/// `0..n`. The message is `(f_0, ..., f_{K-1})`, each coefficient spelled in
/// `k_in` base-field coordinates, and block `i` is `f(a_i)`.
pub fn rs_outer_additive(
    field: &FieldRef,
    k_in: usize,
    n: usize,
    big_k: usize,
) -> Result<AdditiveCode, CodeError> {
    if k_in == 0 || n == 0 || big_k == 0 || big_k > n {
        return Err(CodeError::Shape(format!(
            "need k_in >= 1 and 1 <= K <= n (got k_in = {k_in}, n = {n}, K = {big_k})"
        )));
    }
    let q = field.q() as u64;
    let order = q.checked_pow(k_in as u32);
    if order.is_none_or(|o| o < n as u64) {
        return Err(CodeError::FieldTooSmall {
            q: field.q(),
            need: format!("q^k_in >= n = {n}"),
        });
    }
    let modulus = poly::least_irreducible(field, k_in);
    let elem = |code: u64| vector_from_index(field.q(), k_in, code);
    let times = |a: &[Elem], b: &[Elem]| -> Vec<Elem> {
        let mut v = poly::mul_mod(field, a, b, &modulus);
        v.resize(k_in, 0);
        v
    };
    let one = elem(1);
    let basis: Vec<Vec<Elem>> = (0..k_in)
        .map(|c| {
            let mut e = vec![0; k_in];
            e[c] = 1;
            e
        })
        .collect();
    let mut encoders = Vec::with_capacity(n);
    for i in 0..n {
        let alpha = elem(i as u64);
        let mut enc = Matrix::zeros(field, k_in, big_k * k_in);
        let mut power = one.clone();
        for j in 0..big_k {
            // multiplication by alpha^j, column c = alpha^j * x^c
            for (c, e) in basis.iter().enumerate() {
                let col = times(&power, e);
                for (row, &v) in col.iter().enumerate() {
                    enc.set(row, j * k_in + c, v);
                }
            }
            power = times(&power, &alpha);
        }
        encoders.push(enc);
    }
    Ok(code_new(field, big_k * k_in, k_in, n, encoders)?.with_meta(CodeKind::RsOuter, None))
}

/// Fixed binary code with `s = 2`, `n = 4`, `k = 3` used as a small example
/// throughout the decoding checks. Its coordinate kernels are the lines
/// through `e2`, `e0`, `e1` and `(1,1,1)`.
pub fn tiny_code() -> AdditiveCode {
    let f2 = crate::gf::field_create(2, 1).expect("F_2").shared();
    let rows = [
        [[1, 0, 0], [0, 1, 0]],
        [[0, 1, 0], [0, 0, 1]],
        [[0, 0, 1], [1, 0, 0]],
        [[1, 1, 0], [0, 1, 1]],
    ];
    let encoders = rows
        .iter()
        .map(|m| Matrix::from_rows(&f2, 3, &m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("shape"))
        .collect();
    code_new(&f2, 3, 2, 4, encoders).expect("injective")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_create;

    fn f(p: u32, m: u32) -> FieldRef {
        field_create(p, m).unwrap().shared()
    }

    /// Independent distance: collect the distinct codewords, then compare all pairs.
    fn pairwise_distance(code: &AdditiveCode) -> Rational {
        let words = code.codewords();
        let mut best = code.n();
        for (a, x) in words.iter().enumerate() {
            for y in &words[a + 1..] {
                best = best.min(x.distance(y));
            }
        }
        Rational::new(best as i64, code.n() as i64)
    }

    #[test]
    fn repetition_and_identity_split() {
        let f2 = f(2, 1);
        let one = Matrix::identity(&f2, 1);
        let rep = code_new(&f2, 1, 1, 5, vec![one; 5]).unwrap();
        assert_eq!(rep.rate(), Rational::new(1, 5));
        assert_eq!(min_distance(&rep, u128::MAX).unwrap().delta, Rational::from_integer(1));
        assert_eq!(rep.encode(&[1]).blocks, vec![vec![1]; 5]);

        let id = Matrix::identity(&f2, 6);
        let split = code_new(&f2, 6, 2, 3, (0..3).map(|i| id.row_band(2 * i, 2 * i + 2)).collect()).unwrap();
        assert_eq!(split.rate(), Rational::from_integer(1));
        assert_eq!(min_distance(&split, u128::MAX).unwrap().delta, Rational::new(1, 3));
    }

    #[test]
    fn zero_column_is_not_injective() {
        let f2 = f(2, 1);
        let e = Matrix::from_rows(&f2, 2, &[vec![1, 0]]).unwrap();
        assert_eq!(
            code_new(&f2, 2, 1, 2, vec![e.clone(), e]).unwrap_err(),
            CodeError::NotInjective { rank: 1, k: 2 }
        );
    }

    #[test]
    fn rs_over_f8_is_mds() {
        let f8 = f(2, 3);
        let code = folded_rs(&f8, 1, 7, 3, &FrsParams::standard(&f8, 1, 7)).unwrap();
        let cert = min_distance(&code, u128::MAX).unwrap();
        assert_eq!(cert.delta, Rational::new(5, 7));
        assert_eq!(pairwise_distance(&code), cert.delta);
        assert_eq!(code.encode(&cert.witness).weight(), cert.weight);
    }

    #[test]
    fn frs_with_k_below_s_has_full_distance() {
        let f16 = f(2, 4);
        let code = folded_rs(&f16, 4, 3, 3, &FrsParams::standard(&f16, 4, 3)).unwrap();
        assert_eq!(code.rate(), Rational::new(1, 4));
        assert_eq!(min_distance(&code, u128::MAX).unwrap().delta, Rational::from_integer(1));
    }

    #[test]
    fn frs_rejects_bad_inputs() {
        let f8 = f(2, 3);
        assert!(matches!(
            folded_rs(&f8, 2, 4, 2, &FrsParams::standard(&f8, 2, 4)),
            Err(CodeError::FieldTooSmall { .. })
        ));
        let g = f8.primitive_element();
        let clash = FrsParams {
            gamma: g,
            evals: vec![1, g],
        };
        assert!(matches!(folded_rs(&f8, 2, 2, 2, &clash), Err(CodeError::BadEvaluationPoints(_))));
    }

    #[test]
    fn encoding_is_linear() {
        let f3 = f(3, 1);
        let code = random_linear_code(&f3, 3, 2, 4, 11).unwrap();
        for i in 0..27u64 {
            for j in [0u64, 5, 13, 26] {
                let x = vector_from_index(3, 3, i);
                let y = vector_from_index(3, 3, j);
                let sum: Vec<Elem> = x.iter().zip(&y).map(|(&a, &b)| f3.add(a, b)).collect();
                let (cx, cy, cs) = (code.encode(&x), code.encode(&y), code.encode(&sum));
                for b in 0..4 {
                    for t in 0..2 {
                        assert_eq!(cs.blocks[b][t], f3.add(cx.blocks[b][t], cy.blocks[b][t]));
                    }
                }
            }
        }
        assert_eq!(code.encode(&[0, 0, 0]).weight(), 0);
    }

    #[test]
    fn random_codes_are_seeded() {
        let f2 = f(2, 1);
        let a = random_linear_code(&f2, 2, 16, 4, 5).unwrap();
        assert_eq!(a, random_linear_code(&f2, 2, 16, 4, 5).unwrap());
        assert_ne!(a, random_linear_code(&f2, 2, 16, 4, 6).unwrap());
        assert_eq!(a.rate(), Rational::new(1, 32));
        assert_eq!(a.meta().seed, Some(5));
    }

    #[test]
    fn random_small_codes_distance_matches_pairwise_oracle() {
        let f2 = f(2, 1);
        for seed in 0..10 {
            let code = random_linear_code(&f2, 3, 2, 4, seed).unwrap();
            let cert = min_distance(&code, u128::MAX).unwrap();
            assert_eq!(cert.delta, pairwise_distance(&code));
            assert_eq!(code.encode(&cert.witness).weight(), cert.weight);
        }
    }

    #[test]
    fn outer_code_parameters() {
        let f2 = f(2, 1);
        let outer = rs_outer_additive(&f2, 2, 4, 2).unwrap();
        assert_eq!((outer.k(), outer.s(), outer.n()), (4, 2, 4));
        assert_eq!(outer.rate(), Rational::new(1, 2));
        let delta = min_distance(&outer, u128::MAX).unwrap().delta;
        assert_eq!(delta, Rational::new(3, 4));
        assert_eq!(delta, pairwise_distance(&outer));

        let rep = rs_outer_additive(&f2, 3, 5, 1).unwrap();
        assert_eq!(min_distance(&rep, u128::MAX).unwrap().delta, Rational::from_integer(1));
        assert_eq!(rep.rate(), Rational::new(1, 5));

        let f3 = f(3, 1);
        let big = rs_outer_additive(&f3, 2, 9, 4).unwrap();
        assert_eq!(min_distance(&big, u128::MAX).unwrap().delta, Rational::new(6, 9));
        assert!(matches!(rs_outer_additive(&f2, 2, 5, 2), Err(CodeError::FieldTooSmall { .. })));
    }

    #[test]
    fn distance_budget_is_enforced() {
        let f2 = f(2, 1);
        let code = random_linear_code(&f2, 4, 2, 4, 1).unwrap();
        assert_eq!(
            min_distance(&code, 15).unwrap_err(),
            CodeError::BudgetExceeded {
                count: BigUint::from(16u32),
                budget: 15
            }
        );
    }

    #[test]
    fn tiny_code_distance() {
        let code = tiny_code();
        assert_eq!(min_distance(&code, u128::MAX).unwrap().delta, Rational::new(3, 4));
        assert_eq!(pairwise_distance(&code), Rational::new(3, 4));
    }
}
