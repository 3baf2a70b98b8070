//! Bound sweeps.
//!
//! Every row pairs an analytic bound with an independently computed oracle
//! value at one grid point; `pass` is `oracle <= bound + tolerance`. Rows
//! come out in grid order, so a fixed config and seed always produce the
//! same report.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::adversary::{self, CheatStrategy};
use crate::codebook::{capacity, generate_certified_codebook, Codebook};
use crate::error::{Error, Result};
use crate::linalg;
use crate::protocol1::{self, BRUTE_FORCE_MAX_N};
use crate::protocol2;
use crate::rng;
use crate::transcript::TOOL_VERSION;

pub const REPORT_VERSION: u32 = 1;
pub const TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Per-bit binding value vs `λ_max(P_0 + P_1)`.
    Eq1,
    /// Best of random single-qubit states and the top eigenvector vs `1 + sin θ`.
    Binding1,
    /// Additive entropy vs full eigendecomposition of the ensemble state.
    Holevo1,
    /// `2^r h2^n` vs the exact guess-all probability.
    Delta1,
    /// `1 + (r-1)ε` vs `λ_max(Q)` over random cheat sets.
    Binding2,
    /// `1 + (r-1)ε` vs `λ_max(Q)` of the equality configuration.
    Equality2,
    /// `log2(dim)` vs the exact code-ensemble entropy.
    Hiding2,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Eq1,
        Check::Binding1,
        Check::Holevo1,
        Check::Delta1,
        Check::Binding2,
        Check::Equality2,
        Check::Hiding2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Eq1 => "eq1",
            Check::Binding1 => "binding1",
            Check::Holevo1 => "holevo1",
            Check::Delta1 => "delta1",
            Check::Binding2 => "binding2",
            Check::Equality2 => "equality2",
            Check::Hiding2 => "hiding2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub thetas: Vec<f64>,
    pub ns: Vec<usize>,
    pub rs: Vec<usize>,
    /// Codebook dimensions for the codebook checks.
    pub dims: Vec<usize>,
    pub k: usize,
    pub epsilons: Vec<f64>,
    /// Random states / cheat sets per point.
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            thetas: vec![0.05, 0.1, 0.2, 0.3, 0.5],
            ns: vec![1, 2, 4, 8],
            rs: vec![1, 2, 3],
            dims: vec![32],
            k: 6,
            epsilons: vec![0.1, 0.5],
            samples: 1000,
            seed: 0,
            checks: Check::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub check: Check,
    pub theta: Option<f64>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub dim: Option<usize>,
    pub epsilon: Option<f64>,
    pub bound: Option<f64>,
    pub oracle: Option<f64>,
    /// `bound - oracle`.
    pub margin: Option<f64>,
    pub pass: bool,
    pub infeasible: bool,
    pub note: String,
}

impl BoundRow {
    fn new(check: Check) -> Self {
        Self {
            check,
            theta: None,
            n: None,
            r: None,
            dim: None,
            epsilon: None,
            bound: None,
            oracle: None,
            margin: None,
            pass: false,
            infeasible: false,
            note: String::new(),
        }
    }

    fn judged(mut self, bound: f64, oracle: f64) -> Self {
        self.bound = Some(bound);
        self.oracle = Some(oracle);
        self.margin = Some(bound - oracle);
        self.pass = oracle <= bound + TOLERANCE;
        self
    }

    fn infeasible(mut self, note: String) -> Self {
        self.infeasible = true;
        self.note = note;
        self
    }

    fn failed(mut self, err: &Error) -> Self {
        self.note = err.to_string();
        self
    }

    fn note(mut self, note: String) -> Self {
        self.note = note;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub failures: usize,
    pub infeasible: usize,
    /// Largest `oracle - bound` over judged rows, floored at 0.
    pub max_violation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub version: u32,
    pub tool_version: String,
    pub prng_id: String,
    pub config: SweepConfig,
    pub rows: Vec<BoundRow>,
    pub summary: Summary,
}

impl BoundReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "rows={} failures={} infeasible={} max_violation={:e} tolerance={:e}",
            s.rows, s.failures, s.infeasible, s.max_violation, s.tolerance
        )
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failures == 0
    }
}

/// Runs every check in `config.checks`, in the order given.
pub fn run_sweep(config: &SweepConfig) -> Result<BoundReport> {
    if config.checks.is_empty() {
        return Err(Error::InvalidInput("no checks selected".into()));
    }
    let needs = |grid_empty: bool, what: &str, c: Check| -> Result<()> {
        if grid_empty && config.checks.contains(&c) {
            return Err(Error::InvalidInput(format!("{} needs a nonempty {what} grid", c.name())));
        }
        Ok(())
    };
    for c in [Check::Eq1, Check::Binding1, Check::Holevo1, Check::Delta1] {
        needs(config.thetas.is_empty(), "theta", c)?;
    }
    for c in [Check::Holevo1, Check::Delta1] {
        needs(config.ns.is_empty(), "n", c)?;
    }
    for c in [Check::Delta1, Check::Binding2, Check::Equality2] {
        needs(config.rs.is_empty(), "r", c)?;
    }
    for c in [Check::Binding2, Check::Hiding2] {
        needs(config.dims.is_empty(), "dim", c)?;
    }
    for c in [Check::Binding2, Check::Equality2, Check::Hiding2] {
        needs(config.epsilons.is_empty(), "epsilon", c)?;
    }

    let mut rows = Vec::new();
    for (family, &check) in config.checks.iter().enumerate() {
        let seed = rng::derive_seed(config.seed, family as u64);
        match check {
            Check::Eq1 => rows.extend(config.thetas.iter().map(|&t| eq1_row(t))),
            Check::Binding1 => rows.extend(
                config
                    .thetas
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| binding1_row(t, config.samples, rng::derive_seed(seed, i as u64))),
            ),
            Check::Holevo1 => {
                for &t in &config.thetas {
                    for &n in config.ns.iter().filter(|&&n| n <= BRUTE_FORCE_MAX_N) {
                        rows.push(holevo1_row(t, n));
                    }
                }
            }
            Check::Delta1 => {
                for &t in &config.thetas {
                    for &n in &config.ns {
                        for &r in &config.rs {
                            rows.push(delta1_row(t, n, r));
                        }
                    }
                }
            }
            Check::Binding2 | Check::Hiding2 => {
                let mut point = 0u64;
                for &dim in &config.dims {
                    for &eps in &config.epsilons {
                        let cb = generate_certified_codebook(dim, eps, config.k, config.seed);
                        if check == Check::Hiding2 {
                            rows.push(hiding2_row(dim, eps, &cb));
                            continue;
                        }
                        for &r in &config.rs {
                            rows.push(binding2_row(dim, eps, r, &cb, config.samples, rng::derive_seed(seed, point)));
                            point += 1;
                        }
                    }
                }
            }
            Check::Equality2 => {
                for &r in &config.rs {
                    for &eps in &config.epsilons {
                        rows.push(equality2_row(r, eps));
                    }
                }
            }
        }
    }

    let judged = rows.iter().filter(|r| !r.infeasible);
    let summary = Summary {
        rows: rows.len(),
        failures: judged.clone().filter(|r| !r.pass).count(),
        infeasible: rows.iter().filter(|r| r.infeasible).count(),
        max_violation: judged.filter_map(|r| r.margin).map(|m| -m).fold(0.0, f64::max),
        tolerance: TOLERANCE,
    };
    Ok(BoundReport {
        version: REPORT_VERSION,
        tool_version: TOOL_VERSION.into(),
        prng_id: rng::PRNG_ID.into(),
        config: config.clone(),
        rows,
        summary,
    })
}

fn eq1_row(theta: f64) -> BoundRow {
    let mut row = BoundRow::new(Check::Eq1);
    row.theta = Some(theta);
    let computed = protocol1::alice_bound_eq1(theta)
        .and_then(|b| Ok((b, linalg::lambda_max(&protocol1::pair_operator(theta))?)));
    match computed {
        Ok((bound, lambda)) => row
            .judged(bound, lambda)
            .note(format!("|difference|={:e}", (bound - lambda).abs())),
        Err(e) => row.failed(&e),
    }
}

fn binding1_row(theta: f64, samples: usize, seed: u64) -> BoundRow {
    let mut row = BoundRow::new(Check::Binding1);
    row.theta = Some(theta);
    let computed = (|| -> Result<(f64, f64, f64)> {
        let bound = protocol1::alice_bound_eq1(theta)?;
        let op = protocol1::pair_operator(theta);
        let mut stream = rng::stream(seed);
        let (psi0, psi1) = (protocol1::encode_bit(false, theta), protocol1::encode_bit(true, theta));
        let mut random_max = f64::NEG_INFINITY;
        for _ in 0..samples {
            let rho = linalg::random_density_matrix(2, &mut stream)?;
            random_max = random_max.max(rho.overlap_probability(&psi0)? + rho.overlap_probability(&psi1)?);
        }
        let top = CheatStrategy::top_eigenvector(&op, bound)?.achieved();
        Ok((bound, random_max, top))
    })();
    match computed {
        Ok((bound, random_max, top)) => row
            .judged(bound, random_max.max(top))
            .note(format!("random_max={random_max} top_eigenvector={top} samples={samples}")),
        Err(e) => row.failed(&e),
    }
}

fn holevo1_row(theta: f64, n: usize) -> BoundRow {
    let mut row = BoundRow::new(Check::Holevo1);
    row.theta = Some(theta);
    row.n = Some(n);
    match protocol1::holevo_brute_force(n, theta) {
        Ok(entropy) => {
            let bound = protocol1::holevo_bound_p1(n, theta);
            row.judged(bound, entropy).note(format!(
                "|difference|={:e} power_form={}",
                (bound - entropy).abs(),
                protocol1::holevo_printed_power_form(n, theta)
            ))
        }
        Err(e) => row.failed(&e),
    }
}

fn delta1_row(theta: f64, n: usize, r: usize) -> BoundRow {
    let mut row = BoundRow::new(Check::Delta1);
    row.theta = Some(theta);
    row.n = Some(n);
    row.r = Some(r);
    match adversary::guess_all_oracle(n, theta) {
        Ok(oracle) => {
            let delta = protocol1::identify_all_bound(n, theta, r);
            let mut note = format!("raw={}", delta.raw);
            if delta.vacuous {
                note.push_str(" vacuous");
            }
            row.judged(delta.value, oracle).note(note)
        }
        Err(e) => row.failed(&e),
    }
}

fn binding2_row(dim: usize, eps: f64, r: usize, cb: &Result<Codebook>, samples: usize, seed: u64) -> BoundRow {
    let mut row = BoundRow::new(Check::Binding2);
    row.dim = Some(dim);
    row.epsilon = Some(eps);
    row.r = Some(r);
    let cb = match cb {
        Ok(cb) => cb,
        Err(e) => return row.infeasible(e.to_string()),
    };
    let eps_cert = cb.epsilon_certified();
    let bound = match protocol2::binding_bound2(r, eps_cert) {
        Ok(b) => b,
        Err(e) => return row.infeasible(e.to_string()),
    };
    if r > cb.size() {
        return row.infeasible(format!("r = {r} exceeds codebook size {}", cb.size()));
    }
    let computed = (|| -> Result<f64> {
        let mut stream = rng::stream(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let set = protocol2::CheatSet::new(index::sample(&mut stream, cb.size(), r).into_vec(), cb)?;
            worst = worst.max(linalg::lambda_max(&protocol2::cheat_gram(cb, &set)?)?);
        }
        Ok(worst)
    })();
    match computed {
        Ok(worst) => row
            .judged(bound, worst)
            .note(format!("epsilon_certified={eps_cert} samples={samples} codebook={}", cb.id())),
        Err(e) => row.failed(&e),
    }
}

fn equality2_row(r: usize, eps: f64) -> BoundRow {
    let mut row = BoundRow::new(Check::Equality2);
    row.r = Some(r);
    row.epsilon = Some(eps);
    let bound = match protocol2::binding_bound2(r, eps) {
        Ok(b) => b,
        Err(e) => return row.infeasible(e.to_string()),
    };
    let computed = protocol2::equality_configuration(r, eps)
        .and_then(|s| protocol2::q_operator_from_states(&s))
        .and_then(|q| linalg::lambda_max(&q));
    match computed {
        Ok(lambda) => row.judged(bound, lambda).note(format!("|difference|={:e}", (bound - lambda).abs())),
        Err(e) => row.failed(&e),
    }
}

fn hiding2_row(dim: usize, eps: f64, cb: &Result<Codebook>) -> BoundRow {
    let mut row = BoundRow::new(Check::Hiding2);
    row.dim = Some(dim);
    row.epsilon = Some(eps);
    let cb = match cb {
        Ok(cb) => cb,
        Err(e) => return row.infeasible(e.to_string()),
    };
    match protocol2::code_ensemble_entropy(cb) {
        Ok(s) => {
            let cap = (cb.dim() as f64).log2();
            row.judged(cap, s).note(format!(
                "committed_bits={} withheld={}",
                capacity(cb),
                capacity(cb) as f64 - cap
            ))
        }
        Err(e) => row.failed(&e),
    }
}
