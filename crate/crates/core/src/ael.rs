//! Expander-based composition of an outer and an inner code, and an
//! end-to-end check of the design bound it is supposed to inherit.
//!
//! Each outer symbol `y_i` is re-encoded by the inner code; the `d` inner
//! symbols of left vertex `i` travel along its `d` edges, and right vertex
//! `j` collects what arrives on its own `d` slots.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{code_new, min_distance, rs_outer_additive, AdditiveCode, CodeError, CodeKind, Codeword, DistanceCertificate};
use crate::design::{search_inner_code, tau_profile, DesignCertificate, DesignError};
use crate::gf::{Elem, FieldRef};
use crate::graphs::{complete_bipartite, random_regular_bipartite, sigma2, BipartiteGraph, GraphError, SpectralCertificate, DEFAULT_TOLERANCE};
use crate::linalg::{LinalgError, Matrix};
use crate::rational::{round_down, to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("claimed outer distance {claimed} but the code has distance {actual}")]
    DistanceMismatch { claimed: Rational, actual: Rational },
    #[error("{stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_shapes(outer: &AdditiveCode, inner: &AdditiveCode, graph: &BipartiteGraph) -> Result<(), AelError> {
    if inner.k() != outer.s() {
        return Err(AelError::Shape(format!("inner k = {} must equal outer s = {}", inner.k(), outer.s())));
    }
    if inner.n() != graph.d() {
        return Err(AelError::Shape(format!("inner n = {} must equal graph degree d = {}", inner.n(), graph.d())));
    }
    if outer.n() != graph.n() {
        return Err(AelError::Shape(format!("outer n = {} must equal graph size n = {}", outer.n(), graph.n())));
    }
    if inner.field() != outer.field() {
        return Err(LinalgError::FieldMismatch.into());
    }
    Ok(())
}

/// The composed code as a matrix product: slot `l` of right vertex `j`,
/// fed by `(i, l2) = right_adj[j][l]`, carries `Enc_in_{l2} * Enc_out_i`.
pub fn ael_compose(outer: &AdditiveCode, inner: &AdditiveCode, graph: &BipartiteGraph) -> Result<AdditiveCode, AelError> {
    check_shapes(outer, inner, graph)?;
    let field = outer.field();
    let mut encoders = Vec::with_capacity(graph.n());
    for slots in graph.right_adj() {
        let mut block = Matrix::zeros(field, 0, outer.k());
        for &(i, l2) in slots {
            block = block.vstack(&inner.encoder(l2).mul(outer.encoder(i))?)?;
        }
        encoders.push(block);
    }
    Ok(code_new(field, outer.k(), inner.s() * graph.d(), graph.n(), encoders)?.with_meta(CodeKind::Ael, None))
}

/// Encode, re-encode, and route symbol by symbol, without composing matrices.
pub fn route_encode(outer: &AdditiveCode, inner: &AdditiveCode, graph: &BipartiteGraph, x: &[Elem]) -> Codeword {
    let y = outer.encode(x);
    let z: Vec<Codeword> = y.blocks.iter().map(|yi| inner.encode(yi)).collect();
    Codeword {
        blocks: graph
            .right_adj()
            .iter()
            .map(|slots| slots.iter().flat_map(|&(i, l2)| z[i].blocks[l2].iter().copied()).collect())
            .collect(),
    }
}

/// Inputs to [`ael_certify`].
#[derive(Clone, Debug)]
pub struct AelParams<'a> {
    pub outer: &'a AdditiveCode,
    pub inner: &'a AdditiveCode,
    pub graph: &'a BipartiteGraph,
    pub r: usize,
    pub epsilon: Rational,
    pub delta_out: Rational,
}

/// `lambda < epsilon q^{-r^2/2} sqrt(delta_out)`, with the right side rounded down.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub lambda_bound: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConclusionCheck {
    #[serde(with = "crate::rational::json_vec")]
    pub tau_composed: Vec<Rational>,
    #[serde(with = "crate::rational::json_vec")]
    pub tau_inner: Vec<Rational>,
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    pub holds: bool,
    /// Subspaces scanned in the composed code's message space.
    pub subspaces_scanned: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    #[serde(with = "crate::rational::json")]
    pub delta_composed: Rational,
    #[serde(with = "crate::rational::json")]
    pub one_minus_tau1: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateCheck {
    #[serde(with = "crate::rational::json")]
    pub composed: Rational,
    #[serde(with = "crate::rational::json")]
    pub outer: Rational,
    #[serde(with = "crate::rational::json")]
    pub inner: Rational,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The spectral hypothesis does not hold, so nothing is claimed.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub hypothesis: HypothesisCheck,
    /// `None` when the composed code is too large to scan.
    pub conclusion: Option<ConclusionCheck>,
    /// Exact count refused by the budget, when the scan was skipped.
    pub skipped_count: Option<String>,
    pub corollary: Option<CorollaryCheck>,
    pub rate: RateCheck,
    pub verdict: Verdict,
}

/// Checks the spectral hypothesis and, when the composed code is small
/// enough, the inherited design bound `tau_composed(r') <= tau_inner(r') + epsilon`.
pub fn ael_certify(
    params: &AelParams,
    inner_cert: &DesignCertificate,
    spectral: &SpectralCertificate,
    budget: u128,
    message_budget: u128,
) -> Result<(AdditiveCode, TheoremReport, Option<DesignCertificate>), AelError> {
    let code = ael_compose(params.outer, params.inner, params.graph)?;
    if inner_cert.r_max < params.r {
        return Err(DesignError::CertificateTooShort {
            have: inner_cert.r_max,
            need: params.r,
        }
        .into());
    }
    let actual = min_distance(params.outer, message_budget)?.delta;
    if actual != params.delta_out {
        return Err(AelError::DistanceMismatch {
            claimed: params.delta_out,
            actual,
        });
    }

    let q = params.outer.field().q() as f64;
    let r = params.r as f64;
    let rhs = round_down(round_down(to_f64(&params.epsilon) * q.powf(-r * r / 2.0)) * to_f64(&params.delta_out).sqrt());
    let hypothesis = HypothesisCheck {
        lambda_bound: spectral.lambda_bound,
        rhs: round_down(rhs),
        holds: spectral.lambda_bound < round_down(rhs),
    };

    let (conclusion, skipped_count, composed_cert) = match tau_profile(&code, params.r, budget) {
        Ok(cert) => {
            let tau_inner = inner_cert.tau_hat[..params.r].to_vec();
            let holds = cert
                .tau_hat
                .iter()
                .zip(&tau_inner)
                .all(|(a, b)| *a <= *b + params.epsilon);
            let check = ConclusionCheck {
                tau_composed: cert.tau_hat.clone(),
                tau_inner,
                epsilon: params.epsilon,
                holds,
                subspaces_scanned: cert.subspaces_scanned,
            };
            (Some(check), None, Some(cert))
        }
        Err(DesignError::Linalg(LinalgError::BudgetExceeded { count, .. })) => (None, Some(count.to_string()), None),
        Err(e) => return Err(e.into()),
    };

    let corollary = match (&composed_cert, min_distance(&code, message_budget)) {
        (Some(cert), Ok(dist)) => {
            let one_minus_tau1 = Rational::from_integer(1) - cert.tau_hat[0];
            Some(CorollaryCheck {
                delta_composed: dist.delta,
                one_minus_tau1,
                holds: dist.delta >= one_minus_tau1,
            })
        }
        _ => None,
    };

    let rate = RateCheck {
        composed: code.rate(),
        outer: params.outer.rate(),
        inner: params.inner.rate(),
        holds: code.rate() == params.outer.rate() * params.inner.rate(),
    };

    let checks_hold = conclusion.as_ref().is_none_or(|c| c.holds)
        && corollary.as_ref().is_none_or(|c| c.holds)
        && rate.holds;
    let verdict = if !hypothesis.holds {
        Verdict::NotApplicable
    } else if checks_hold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let report = TheoremReport {
        hypothesis,
        conclusion,
        skipped_count,
        corollary,
        rate,
        verdict,
    };
    Ok((code, report, composed_cert))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GraphKind {
    Complete,
    RandomRegular { seed: u64 },
}

/// Desk-scale stand-ins for the asymptotic parameter choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overrides {
    /// Inner message dimension, equal to the outer folding.
    pub k_in: usize,
    /// Outer message dimension over the extension field.
    pub big_k: usize,
    pub s: usize,
    pub d: usize,
    pub graph: GraphKind,
    pub inner_epsilon: Rational,
    pub ael_epsilon: Rational,
    pub attempts: u32,
    pub seed: u64,
}

impl Default for Overrides {
    fn default() -> Self {
        Overrides {
            k_in: 2,
            big_k: 2,
            s: 16,
            d: 4,
            graph: GraphKind::Complete,
            inner_epsilon: Rational::new(1, 2),
            ael_epsilon: Rational::new(1, 100),
            attempts: 200,
            seed: 1,
        }
    }
}

/// Everything produced by [`instantiate`].
#[derive(Clone, Debug)]
pub struct Bundle {
    pub outer: AdditiveCode,
    pub outer_distance: DistanceCertificate,
    pub inner: AdditiveCode,
    pub inner_certificate: DesignCertificate,
    pub inner_attempts: u32,
    pub graph: BipartiteGraph,
    pub spectral: SpectralCertificate,
    pub code: AdditiveCode,
    pub code_certificate: Option<DesignCertificate>,
    pub report: TheoremReport,
    pub target_rate: Rational,
    pub rate_meets_target: bool,
    /// Where the chosen parameters depart from the asymptotic recipe, and warnings.
    pub notes: Vec<String>,
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> AelError {
    move |e| AelError::Stage {
        stage,
        message: e.to_string(),
    }
}

/// Runs the full pipeline: outer code, inner search, graph, composition,
/// certification. `rate` and `epsilon` are the targets the recipe would
/// derive its parameters from; the overrides pick the actual ones.
#[allow(clippy::too_many_arguments)]
pub fn instantiate(
    field: &FieldRef,
    rate: Rational,
    r: usize,
    epsilon: Rational,
    n: usize,
    ov: &Overrides,
    budget: u128,
    message_budget: u128,
) -> Result<Bundle, AelError> {
    let mut notes = Vec::new();
    let outer = rs_outer_additive(field, ov.k_in, n, ov.big_k).map_err(stage("outer"))?;
    let outer_distance = min_distance(&outer, message_budget).map_err(stage("outer"))?;
    let r_out = outer.rate();
    let recipe_r_out = Rational::from_integer(1) - epsilon / 4;
    let recipe_delta = epsilon / 8;
    if r_out != recipe_r_out {
        notes.push(format!("outer rate {r_out} instead of 1 - epsilon/4 = {recipe_r_out}"));
    }
    if outer_distance.delta != recipe_delta {
        notes.push(format!("outer distance {} instead of epsilon/8 = {recipe_delta}", outer_distance.delta));
    }

    let search = search_inner_code(field, ov.k_in, ov.s, ov.d, r, ov.inner_epsilon, ov.attempts, ov.seed, budget)
        .map_err(stage("inner"))?;
    notes.extend(search.warnings.iter().cloned());
    let r_in = search.code.rate();
    let recipe_r_in = rate + epsilon / 2;
    if r_in != recipe_r_in {
        notes.push(format!("inner rate {r_in} instead of R + epsilon/2 = {recipe_r_in}"));
    }
    if ov.inner_epsilon != epsilon / 4 {
        notes.push(format!(
            "inner search slack {} instead of epsilon/4 = {}",
            ov.inner_epsilon,
            epsilon / 4
        ));
    }

    let graph = match ov.graph {
        GraphKind::Complete => {
            if ov.d != n {
                return Err(AelError::Stage {
                    stage: "graph",
                    message: format!("complete bipartite graph needs d = n, got d = {} and n = {n}", ov.d),
                });
            }
            complete_bipartite(n)
        }
        GraphKind::RandomRegular { seed } => random_regular_bipartite(n, ov.d, seed).map_err(stage("graph"))?,
    };
    notes.push(format!(
        "degree d = {} instead of poly(1/epsilon) * q^(r^2) = poly(1/epsilon) * {}",
        ov.d,
        BigUint::from(field.q()).pow((r * r) as u32)
    ));
    let spectral = sigma2(&graph, DEFAULT_TOLERANCE).map_err(stage("graph"))?;

    let params = AelParams {
        outer: &outer,
        inner: &search.code,
        graph: &graph,
        r,
        epsilon: ov.ael_epsilon,
        delta_out: outer_distance.delta,
    };
    let (code, report, code_certificate) =
        ael_certify(&params, &search.certificate, &spectral, budget, message_budget).map_err(stage("certify"))?;
    let rate_meets_target = code.rate() >= rate;
    Ok(Bundle {
        outer,
        outer_distance,
        inner: search.code,
        inner_certificate: search.certificate,
        inner_attempts: search.attempts,
        graph,
        spectral,
        code,
        code_certificate,
        report,
        target_rate: rate,
        rate_meets_target,
        notes,
    })
}
