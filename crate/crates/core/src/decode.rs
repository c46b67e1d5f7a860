//! Brute-force and sampled checks of the decoding guarantees implied by a
//! design certificate: average-radius list decoding, list recovery, and
//! curve decoding, plus the parameter arithmetic for list recovery.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{vector_from_index, AdditiveCode, Codeword};
use crate::design::DesignCertificate;
use crate::gf::Elem;
use crate::rational::{ceil, round_up, to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("scan of {count} cases exceeds the budget of {budget}")]
    BudgetExceeded { count: BigUint, budget: u128 },
    #[error("certificate covers r <= {have}, need r = {need}")]
    CertificateTooShort { have: usize, need: usize },
    #[error("out of range: {0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Mode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    Violation,
    /// The certificate does not reach the needed dimension.
    Inconclusive,
}

fn alphabet_size(code: &AdditiveCode) -> Option<u64> {
    (code.field().q() as u64).checked_pow(code.s() as u32)
}

fn within(count: BigUint, budget: u128) -> Result<u64, DecodeError> {
    match count.to_u64() {
        Some(c) if (c as u128) <= budget => Ok(c),
        _ => Err(DecodeError::BudgetExceeded { count, budget }),
    }
}

/// Received word number `idx` of `Σ^n`.
fn word_from_index(code: &AdditiveCode, idx: u64) -> Codeword {
    let flat = vector_from_index(code.field().q(), code.s() * code.n(), idx);
    Codeword {
        blocks: flat.chunks(code.s()).map(<[Elem]>::to_vec).collect(),
    }
}

fn random_word(code: &AdditiveCode, rng: &mut ChaCha8Rng) -> Codeword {
    let q = code.field().q();
    Codeword {
        blocks: (0..code.n())
            .map(|_| (0..code.s()).map(|_| rng.gen_range(0..q) as Elem).collect())
            .collect(),
    }
}

/// Index of a symbol of `Σ = F_q^s` (first entry least significant).
fn symbol_index(q: u32, block: &[Elem]) -> u64 {
    block.iter().rev().fold(0u64, |acc, &x| acc * q as u64 + x as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListDecodingReport {
    pub r: usize,
    /// `(r-1)(1 - tau_hat(r-1))`.
    #[serde(with = "crate::rational::json")]
    pub bound: Rational,
    /// Smallest `sum_i Δ(y, c_i)` seen.
    #[serde(with = "crate::rational::json")]
    pub minimum: Rational,
    pub witness_word: Codeword,
    /// Message indices of the extremal codewords.
    pub witness_messages: Vec<u64>,
    pub words_scanned: u64,
    pub verdict: CheckVerdict,
}

/// Minimum over received words `y` and `r` distinct codewords of
/// `sum Δ(y, c_i)`, compared against `(r-1)(1 - tau_hat(r-1))`.
///
/// For a fixed `y` the best tuple is the `r` nearest codewords, so the scan
/// costs `|Σ|^n · |C|` distance evaluations.
pub fn list_decoding_check(
    code: &AdditiveCode,
    cert: &DesignCertificate,
    r: usize,
    mode: Mode,
    budget: u128,
) -> Result<ListDecodingReport, DecodeError> {
    if r == 0 {
        return Err(DecodeError::Domain("r must be at least 1".into()));
    }
    let bound = if r == 1 {
        Rational::from_integer(0)
    } else {
        let tau = cert.tau(r - 1).ok_or(DecodeError::CertificateTooShort {
            have: cert.r_max,
            need: r - 1,
        })?;
        (Rational::from_integer(1) - tau) * (r as i64 - 1)
    };
    let sigma = alphabet_size(code).ok_or_else(|| DecodeError::Domain("alphabet too large".into()))?;
    let words = BigUint::from(sigma).pow(code.n() as u32);
    let n_codewords = code.message_count();
    if BigUint::from(r) > n_codewords {
        return Err(DecodeError::Domain(format!("r = {r} exceeds the number of codewords")));
    }
    let (ys, count): (Vec<Codeword>, u64) = match mode {
        Mode::Exhaustive => {
            let total = within(words.clone(), budget)?;
            within(words * &n_codewords, budget)?;
            (Vec::new(), total)
        }
        Mode::Sampled { trials, seed } => {
            within(BigUint::from(trials) * &n_codewords, budget)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ((0..trials).map(|_| random_word(code, &mut rng)).collect(), trials)
        }
    };
    let codewords = code.codewords();
    let eval = |y: &Codeword| -> (usize, Vec<u64>) {
        let mut d: Vec<(usize, u64)> = codewords.iter().enumerate().map(|(i, c)| (y.distance(c), i as u64)).collect();
        d.sort_unstable();
        let sum = d[..r].iter().map(|p| p.0).sum();
        (sum, d[..r].iter().map(|p| p.1).collect())
    };
    let (sum, idx, msgs) = (0..count)
        .into_par_iter()
        .map(|i| {
            let y = if ys.is_empty() { word_from_index(code, i) } else { ys[i as usize].clone() };
            let (s, m) = eval(&y);
            (s, i, m)
        })
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
        .expect("at least one received word");
    let witness_word = if ys.is_empty() { word_from_index(code, idx) } else { ys[idx as usize].clone() };
    let minimum = Rational::new(sum as i64, code.n() as i64);
    Ok(ListDecodingReport {
        r,
        bound,
        minimum,
        witness_word,
        witness_messages: msgs,
        words_scanned: count,
        verdict: if minimum >= bound { CheckVerdict::Pass } else { CheckVerdict::Violation },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListRecoveryReport {
    pub ell: usize,
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    /// `⌈ell/epsilon⌉`.
    pub r: usize,
    /// Codewords strictly closer than this to the list product are counted.
    #[serde(with = "crate::rational::json_opt")]
    pub radius: Option<Rational>,
    /// Theorem bound rounded up.
    pub bound: Option<f64>,
    pub max_count: u64,
    /// Symbol indices of each list in the worst collection.
    pub worst_lists: Vec<Vec<u64>>,
    pub collections_scanned: u64,
    pub verdict: CheckVerdict,
}

/// Lexicographic `ell`-subsets of `0..n` as sorted index lists.
fn subsets(n: u64, ell: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = (0..ell as u64).collect();
    if ell as u64 > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = ell;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (ell - i) as u64 {
                cur[i] += 1;
                for j in i + 1..ell {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Counts codewords within radius `1 - tau_hat(⌈ell/ε⌉) - ε` of every list
/// product `L_1 × ... × L_n` with `|L_i| = ell`, and compares the largest
/// count with `(ell/(tau+ε))^((tau+ε)/ε)`.
pub fn list_recovery_check(
    code: &AdditiveCode,
    cert: &DesignCertificate,
    ell: usize,
    epsilon: Rational,
    mode: Mode,
    budget: u128,
) -> Result<ListRecoveryReport, DecodeError> {
    if ell == 0 || epsilon <= Rational::from_integer(0) {
        return Err(DecodeError::Domain("need ell >= 1 and epsilon > 0".into()));
    }
    let sigma = alphabet_size(code).ok_or_else(|| DecodeError::Domain("alphabet too large".into()))?;
    if ell as u64 > sigma {
        return Err(DecodeError::Domain(format!("ell = {ell} exceeds the alphabet size {sigma}")));
    }
    let r = ceil(&(Rational::from_integer(ell as i64) / epsilon)) as usize;
    let mut report = ListRecoveryReport {
        ell,
        epsilon,
        r,
        radius: None,
        bound: None,
        max_count: 0,
        worst_lists: Vec::new(),
        collections_scanned: 0,
        verdict: CheckVerdict::Inconclusive,
    };
    let Some(tau) = cert.tau(r) else {
        return Ok(report);
    };
    let radius = Rational::from_integer(1) - tau - epsilon;
    let base = to_f64(&(Rational::from_integer(ell as i64) / (tau + epsilon)));
    let bound = round_up(round_up(base).powf(to_f64(&((tau + epsilon) / epsilon))));
    report.radius = Some(radius);
    report.bound = Some(bound);

    let q = code.field().q();
    let n = code.n();
    let symbols: Vec<Vec<u64>> = code
        .codewords()
        .iter()
        .map(|c| c.blocks.iter().map(|b| symbol_index(q, b)).collect())
        .collect();
    // strict: misses < radius * n
    let count_for = |lists: &[Vec<u64>]| -> u64 {
        symbols
            .iter()
            .filter(|c| {
                let misses = c.iter().zip(lists).filter(|(s, l)| l.binary_search(s).is_err()).count();
                Rational::from_integer(misses as i64) < radius * n as i64
            })
            .count() as u64
    };

    let (count, worst, scanned) = match mode {
        Mode::Exhaustive => {
            let per = subsets(sigma, ell);
            let total = within(BigUint::from(per.len()).pow(n as u32), budget)?;
            let choose = |mut idx: u64| -> Vec<Vec<u64>> {
                (0..n)
                    .map(|_| {
                        let l = per[(idx % per.len() as u64) as usize].clone();
                        idx /= per.len() as u64;
                        l
                    })
                    .collect()
            };
            let (c, i) = (0..total)
                .into_par_iter()
                .map(|i| (count_for(&choose(i)), i))
                .reduce(|| (0, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
            (c, choose(i.min(total - 1)), total)
        }
        Mode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = (0u64, Vec::new());
            for t in 0..trials {
                let lists: Vec<Vec<u64>> = (0..n)
                    .map(|_| {
                        let mut l: Vec<u64> = sample(&mut rng, sigma as usize, ell).into_iter().map(|x| x as u64).collect();
                        l.sort_unstable();
                        l
                    })
                    .collect();
                let c = count_for(&lists);
                if c > best.0 || t == 0 {
                    best = (c, lists);
                }
            }
            (best.0, best.1, trials)
        }
    };
    report.max_count = count;
    report.worst_lists = worst;
    report.collections_scanned = scanned;
    report.verdict = if (count as f64) <= bound { CheckVerdict::Pass } else { CheckVerdict::Violation };
    Ok(report)
}

/// Parameters of one curve-decoding run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveQuery {
    /// Curve degree.
    pub ell: usize,
    /// Only trials with at least this many agreeing points are checked.
    pub a: usize,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveTrial {
    pub trial: u64,
    pub agreement_set: usize,
    pub best_agreement: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveReport {
    pub ell: usize,
    pub r: usize,
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    /// `1 - tau_hat(r) - epsilon`.
    #[serde(with = "crate::rational::json")]
    pub delta: Rational,
    pub seed: u64,
    pub trials: u64,
    /// Trials whose agreement set reached `a`.
    pub checked: u64,
    /// Smallest `best_agreement / |A|` among checked trials.
    #[serde(with = "crate::rational::json_opt")]
    pub tightest: Option<Rational>,
    pub violations: Vec<CurveTrial>,
    pub verdict: CheckVerdict,
}

/// `sum_j w_j alpha^j`, blockwise.
fn curve_point(code: &AdditiveCode, words: &[Codeword], alpha: Elem) -> Codeword {
    let f = code.field();
    let mut out = Codeword {
        blocks: vec![vec![0; code.s()]; code.n()],
    };
    let mut power = 1;
    for w in words {
        for (ob, wb) in out.blocks.iter_mut().zip(&w.blocks) {
            for (o, &x) in ob.iter_mut().zip(wb) {
                *o = f.add(*o, f.mul(power, x));
            }
        }
        power = f.mul(power, alpha);
    }
    out
}

/// Sampled check of curve decodability at radius `1 - tau_hat(r) - ε`.
///
/// Each trial plants a codeword curve: `f(α)` equals the curve on a random
/// set of points and a random codeword elsewhere, and each `u_j` is the
/// curve coefficient with some blocks replaced by noise. Whenever the
/// agreement set `A` has at least `a` points, every `(ell+1)`-tuple of
/// codewords is tried and the best one must agree with `f` on at least
/// `ε/(r+ε) · |A|` points of `A`.
pub fn curve_decoding_check(
    code: &AdditiveCode,
    cert: &DesignCertificate,
    query: &CurveQuery,
    r: usize,
    epsilon: Rational,
    seed: u64,
    budget: u128,
) -> Result<CurveReport, DecodeError> {
    if r == 0 || epsilon < Rational::new(query.ell as i64 + 1, r as i64) {
        return Err(DecodeError::Domain(format!(
            "need epsilon >= (ell+1)/r, got epsilon = {epsilon}, ell = {}, r = {r}",
            query.ell
        )));
    }
    let tau = cert.tau(r).ok_or(DecodeError::CertificateTooShort { have: cert.r_max, need: r })?;
    let delta = Rational::from_integer(1) - tau - epsilon;
    let tuples = code.message_count().pow(query.ell as u32 + 1);
    let per_trial = within(tuples, budget)?;
    within(BigUint::from(per_trial) * query.trials, budget)?;

    let codewords = code.codewords();
    let q = code.field().q();
    let n = code.n() as i64;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..query.trials).map(|_| master.gen()).collect();
    let frac = epsilon / (epsilon + r as i64);

    let outcomes: Vec<Option<(CurveTrial, Rational)>> = seeds
        .par_iter()
        .enumerate()
        .map(|(t, &s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let pick = |rng: &mut ChaCha8Rng| codewords[rng.gen_range(0..codewords.len())].clone();
            let curve: Vec<Codeword> = (0..=query.ell).map(|_| pick(&mut rng)).collect();
            let u: Vec<Codeword> = curve
                .iter()
                .map(|c| {
                    let mut w = c.clone();
                    for b in w.blocks.iter_mut() {
                        if rng.gen_bool(0.25) {
                            for x in b.iter_mut() {
                                *x = rng.gen_range(0..q) as Elem;
                            }
                        }
                    }
                    w
                })
                .collect();
            let f: Vec<Codeword> = (0..q as Elem)
                .map(|alpha| {
                    if rng.gen_bool(0.5) {
                        curve_point(code, &curve, alpha)
                    } else {
                        pick(&mut rng)
                    }
                })
                .collect();
            let agree: Vec<Elem> = (0..q as Elem)
                .filter(|&alpha| {
                    let dist = curve_point(code, &u, alpha).distance(&f[alpha as usize]);
                    Rational::new(dist as i64, n) <= delta
                })
                .collect();
            if agree.len() < query.a.max(1) {
                return None;
            }
            let mut best = 0;
            let mut tuple = vec![0usize; query.ell + 1];
            'outer: loop {
                let words: Vec<Codeword> = tuple.iter().map(|&i| codewords[i].clone()).collect();
                let hits = agree
                    .iter()
                    .filter(|&&alpha| curve_point(code, &words, alpha) == f[alpha as usize])
                    .count();
                best = best.max(hits);
                if best == agree.len() {
                    break;
                }
                for slot in tuple.iter_mut() {
                    *slot += 1;
                    if *slot < codewords.len() {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            let trial = CurveTrial {
                trial: t as u64,
                agreement_set: agree.len(),
                best_agreement: best,
            };
            Some((trial, Rational::new(best as i64, agree.len() as i64)))
        })
        .collect();

    let checked: Vec<(CurveTrial, Rational)> = outcomes.into_iter().flatten().collect();
    let violations: Vec<CurveTrial> = checked
        .iter()
        .filter(|(t, _)| Rational::from_integer(t.best_agreement as i64) < frac * t.agreement_set as i64)
        .map(|(t, _)| t.clone())
        .collect();
    Ok(CurveReport {
        ell: query.ell,
        r,
        epsilon,
        delta,
        seed,
        trials: query.trials,
        checked: checked.len() as u64,
        tightest: checked.iter().map(|c| c.1).min(),
        verdict: if violations.is_empty() { CheckVerdict::Pass } else { CheckVerdict::Violation },
        violations,
    })
}

/// Parameter split for list recovery at rate `R` and slack `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryPlan {
    pub ell: u64,
    #[serde(with = "crate::rational::json")]
    pub rate: Rational,
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    /// `⌈(ell/(R+ε))^((R+ε)/ε)⌉`.
    pub list_size: u64,
    /// Whether `list_size` was computed in exact arithmetic.
    pub list_size_exact: bool,
    pub log_base: u32,
    /// `ε^2 / (4 L log(ell/ε))`.
    pub eps0: f64,
    #[serde(with = "crate::rational::json_opt")]
    pub eps0_exact: Option<Rational>,
    /// `ε - ε0`.
    pub eps1: f64,
    #[serde(with = "crate::rational::json_opt")]
    pub eps1_exact: Option<Rational>,
    /// Design dimension `⌈ell/ε1⌉` the code must certify.
    pub design_dim: u64,
    /// Alphabet is `F_q^(poly(r, 1/ε) · q^e)` with this `e = r^2`.
    pub q_exponent: u64,
    pub eps1_at_least_half: bool,
    /// `(ell/(R+ε))^((R+ε)/ε1) <= (ell/(R+ε))^((R+ε)/ε) + 1/2`.
    pub list_bound_slack_ok: bool,
    pub summary: String,
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn small(r: &BigRational) -> Option<Rational> {
    Some(Rational::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

fn big_ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Exact `log2(x)` when `x` is a power of two.
fn exact_log2(x: &BigRational) -> Option<u64> {
    if !x.denom().is_one() || !x.numer().is_positive() {
        return None;
    }
    let m = x.numer().magnitude();
    (m.count_ones() == 1).then(|| m.trailing_zeros().expect("nonzero"))
}

pub fn recovery_parameter_plan(ell: u64, rate: Rational, epsilon: Rational) -> Result<RecoveryPlan, DecodeError> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if ell < 2 {
        return Err(DecodeError::Domain(format!("ell = {ell}; the split needs ell >= 2")));
    }
    if epsilon <= zero || epsilon >= one || rate <= zero || rate >= one {
        return Err(DecodeError::Domain(format!("need 0 < R, epsilon < 1; got R = {rate}, epsilon = {epsilon}")));
    }
    let ell_q = BigRational::from_integer(BigInt::from(ell));
    let (r_b, e_b) = (big(&rate), big(&epsilon));
    let base = &ell_q / (&r_b + &e_b);
    let exponent = (&r_b + &e_b) / &e_b;
    let (list_size, list_size_exact) = if exponent.is_integer() {
        let e = exponent.to_integer().to_u32().ok_or_else(|| DecodeError::Domain("exponent too large".into()))?;
        let l = big_ceil(&num_traits::pow(base.clone(), e as usize))
            .to_u64()
            .ok_or_else(|| DecodeError::Domain("list size overflows".into()))?;
        (l, true)
    } else {
        let v = base.to_f64().unwrap().powf(exponent.to_f64().unwrap());
        if !v.is_finite() || v > u64::MAX as f64 {
            return Err(DecodeError::Domain("list size overflows".into()));
        }
        (v.ceil() as u64, false)
    };
    let ratio = &ell_q / &e_b;
    let log = ratio.to_f64().unwrap().log2();
    let eps_f = to_f64(&epsilon);
    let eps0 = eps_f * eps_f / (4.0 * list_size as f64 * log);
    let eps0_big = exact_log2(&ratio)
        .map(|m| &e_b * &e_b / BigRational::from_integer(BigInt::from(4u64) * BigInt::from(list_size) * BigInt::from(m)));
    let eps1_big = eps0_big.as_ref().map(|e0| &e_b - e0);
    let eps1 = eps_f - eps0;
    let design_dim = match &eps1_big {
        Some(e1) => big_ceil(&(&ell_q / e1)).to_u64(),
        None => Some((ell as f64 / eps1).ceil() as u64),
    }
    .ok_or_else(|| DecodeError::Domain("design dimension overflows".into()))?;
    let eps1_at_least_half = match &eps1_big {
        Some(e1) => e1 * BigRational::from_integer(2.into()) >= e_b,
        None => 2.0 * eps1 >= eps_f,
    };
    let b = base.to_f64().unwrap();
    let rpe = (&r_b + &e_b).to_f64().unwrap();
    let list_bound_slack_ok = b.powf(rpe / eps1) <= b.powf(rpe / eps_f) + 0.5;
    let summary = format!(
        "ell = {ell}, R = {rate}, epsilon = {epsilon}: L = {list_size}, eps0 = {eps0:.6e}, eps1 = {eps1:.6}, \
         design dimension r = {design_dim}, alphabet exponent poly(r, 1/epsilon) * q^{}",
        design_dim * design_dim
    );
    Ok(RecoveryPlan {
        ell,
        rate,
        epsilon,
        list_size,
        list_size_exact,
        log_base: 2,
        eps0,
        eps0_exact: eps0_big.as_ref().and_then(small),
        eps1,
        eps1_exact: eps1_big.as_ref().and_then(small),
        design_dim,
        q_exponent: design_dim * design_dim,
        eps1_at_least_half,
        list_bound_slack_ok,
        summary,
    })
}
