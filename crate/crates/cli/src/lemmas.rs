//! Seeded randomized suites behind `verify-lemmas`.

use code_forge::codes::random_linear_code;
use code_forge::design::{equivalence_check, profile_from_witness, quotient_potential_identity, strictify_profile, tau_profile, LocalProfile};
use code_forge::gf::{field_create, Elem, FieldRef};
use code_forge::graphs::{complete_bipartite, mixing_check, random_regular_bipartite, sigma2, BipartiteGraph, DEFAULT_TOLERANCE};
use code_forge::linalg::{Matrix, Subspace};
use code_forge::rational::{factorial, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: u64,
    pub failures: u64,
    /// First failure, if any.
    pub witness: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            trials: 0,
            failures: 0,
            witness: None,
        }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.trials += 1;
        if let Err(msg) = outcome {
            self.failures += 1;
            self.witness.get_or_insert(msg);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_subspace(field: &FieldRef, ambient: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let gens = rng.gen_range(0..=ambient);
    let rows: Vec<Vec<Elem>> = (0..gens)
        .map(|_| (0..ambient).map(|_| rng.gen_range(0..field.q()) as Elem).collect())
        .collect();
    Subspace::span(&Matrix::from_rows(field, ambient, &rows).expect("rows have the ambient length"))
}

fn quotient_identity(trials: u64, rng: &mut ChaCha8Rng) -> SuiteResult {
    let fields = [field_create(2, 1).unwrap().shared(), field_create(3, 1).unwrap().shared()];
    let mut out = SuiteResult::new("quotient-potential identity");
    for _ in 0..trials {
        let field = &fields[rng.gen_range(0..2)];
        let dim_v = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=4);
        let parts = (0..n).map(|_| random_subspace(field, dim_v, rng)).collect();
        let profile = LocalProfile::new(field, dim_v, parts).expect("parts share the ambient");
        let u = random_subspace(field, dim_v, rng);
        let w = random_subspace(field, dim_v, rng);
        let alpha = Rational::new(rng.gen_range(-4..=8), rng.gen_range(1..=6));
        out.record(
            quotient_potential_identity(&u, &w, &profile, alpha)
                .map(|_| ())
                .map_err(|e| format!("q = {}, dim V = {dim_v}: {e}", field.q())),
        );
    }
    out
}

fn tiny_code_seeds(count: u64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, usize, u64)> {
    (0..count)
        .map(|_| {
            let k: usize = rng.gen_range(2..=3);
            let s: usize = rng.gen_range(1..=2);
            // injectivity needs s * n >= k
            let n = rng.gen_range(k.div_ceil(s).max(2)..=4);
            (k, s, n, rng.gen())
        })
        .collect()
}

fn strictification(count: u64, budget: u128, rng: &mut ChaCha8Rng) -> SuiteResult {
    let f2 = field_create(2, 1).unwrap().shared();
    let mut out = SuiteResult::new("strictification");
    for (k, s, n, seed) in tiny_code_seeds(count, rng) {
        let outcome = (|| -> Result<(), String> {
            let code = random_linear_code(&f2, k, s, n, seed).map_err(|e| e.to_string())?;
            let cert = tau_profile(&code, 2, budget).map_err(|e| e.to_string())?;
            let a = &cert.witness[1];
            let (profile, _) = profile_from_witness(&code, a).map_err(|e| e.to_string())?;
            let gap = Rational::new(1, 2 * n as i64 * factorial(2));
            let st = strictify_profile(&profile, cert.tau_hat[1] - gap, budget).map_err(|e| e.to_string())?;
            if st.profile.dim_v() == 0 {
                return Err("strictified profile is zero-dimensional".into());
            }
            Ok(())
        })();
        out.record(outcome.map_err(|e| format!("code (k = {k}, s = {s}, n = {n}, seed = {seed}): {e}")));
    }
    out
}

fn mixing(trials: u64, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut out = SuiteResult::new("expander mixing");
    for t in 0..trials {
        let n = rng.gen_range(2..=64);
        let graph: BipartiteGraph = match t % 3 {
            0 => complete_bipartite(rng.gen_range(1..=8)),
            1 => random_regular_bipartite(n, 1, rng.gen()).expect("d = 1 is valid"),
            _ => random_regular_bipartite(n, rng.gen_range(2..=8), rng.gen()).expect("d >= 1 is valid"),
        };
        let outcome = sigma2(&graph, DEFAULT_TOLERANCE).and_then(|cert| {
            let x: Vec<f64> = (0..graph.n()).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
            mixing_check(&graph, &cert, &x)
        });
        out.record(outcome.map(|_| ()).map_err(|e| format!("n = {}, d = {}: {e}", graph.n(), graph.d())));
    }
    out
}

fn equivalence(count: u64, budget: u128, rng: &mut ChaCha8Rng) -> SuiteResult {
    let f2 = field_create(2, 1).unwrap().shared();
    let mut out = SuiteResult::new("equivalence");
    for (k, s, n, seed) in tiny_code_seeds(count, rng) {
        for r in 1..=2 {
            let outcome = random_linear_code(&f2, k, s, n, seed)
                .map_err(|e| e.to_string())
                .and_then(|code| equivalence_check(&code, r, budget).map_err(|e| e.to_string()))
                .and_then(|rep| if rep.passed() { Ok(()) } else { Err(format!("{rep:?}")) });
            out.record(outcome.map_err(|e| format!("code (k = {k}, s = {s}, n = {n}, seed = {seed}), r = {r}: {e}")));
        }
    }
    out
}

/// Runs all four suites from one master seed.
pub fn run(seed: u64, trials: u64, budget: u128) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = (trials / 20).max(1);
    vec![
        quotient_identity(trials, &mut rng),
        strictification(small, budget, &mut rng),
        mixing(trials, &mut rng),
        equivalence(small, budget, &mut rng),
    ]
}
