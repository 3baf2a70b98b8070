//! Cheating strategies and exact oracles.
//!
//! The sender's best move against either binding bound is the top
//! eigenvector of the relevant operator (`P_0 + P_1` per qubit, or `Q`
//! over a cheat set). The receiver's best guess at a whole
//! qubit-committed string is the per-qubit Helstrom measurement.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::linalg::{self, projector, HermitianOp, Ket};
use crate::protocol1::{self, encode_bit, QubitState};
use crate::protocol2::{self, CheatSet, CommittedState};
use crate::session::{self, CheatCommit, Instance};
use crate::transcript::{ModeName, StrategyKind, Transcript};

const ACHIEVED_TOL: f64 = 1e-9;
/// Exhaustive cross-check of [`guess_all_oracle`] runs up to this `n`.
pub const GUESS_ALL_BRUTE_MAX_N: usize = 4;

/// Top eigenvector of `op` and its eigenvalue.
pub fn optimal_cheat_state(op: &HermitianOp) -> Result<(Ket, f64)> {
    let eig = linalg::eig_hermitian(op)?;
    let (value, vector) = eig.max();
    let check = linalg::lambda_max(op)?;
    if (value - check).abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "top eigenvalue {value} disagrees with eigenvalue-only solve {check}"
        )));
    }
    Ok((vector.clone(), value))
}

/// A sender strategy: which state goes on the channel, how much total
/// acceptance it buys against the target operator, and the analytic cap.
#[derive(Clone, Debug)]
pub struct CheatStrategy {
    kind: StrategyKind,
    state: Option<Ket>,
    achieved: f64,
    bound: f64,
}

impl CheatStrategy {
    /// Commit honestly to whatever string is later revealed.
    pub fn honest() -> Self {
        Self {
            kind: StrategyKind::Honest,
            state: None,
            achieved: 1.0,
            bound: 1.0,
        }
    }

    pub fn top_eigenvector(op: &HermitianOp, bound: f64) -> Result<Self> {
        let (state, achieved) = optimal_cheat_state(op)?;
        Self::checked(StrategyKind::TopEigenvector, state, achieved, bound)
    }

    pub fn custom(state: Ket, op: &HermitianOp, bound: f64) -> Result<Self> {
        let achieved = op.expectation(&state)?;
        Self::checked(StrategyKind::CustomState, state, achieved, bound)
    }

    fn checked(kind: StrategyKind, state: Ket, achieved: f64, bound: f64) -> Result<Self> {
        if achieved > bound + ACHIEVED_TOL {
            return Err(Error::Numerical(format!(
                "strategy achieves {achieved}, above the bound {bound}"
            )));
        }
        Ok(Self {
            kind,
            state: Some(state),
            achieved,
            bound,
        })
    }

    /// Per-qubit optimum against `P_0 + P_1`.
    pub fn protocol1_top(theta: f64) -> Result<Self> {
        Self::top_eigenvector(&protocol1::pair_operator(theta), protocol1::alice_bound_eq1(theta)?)
    }

    /// Optimum against `Q` over `set`.
    pub fn protocol2_top(cb: &Codebook, set: &CheatSet) -> Result<Self> {
        let q = protocol2::q_operator(cb, set)?;
        let bound = protocol2::binding_bound2(set.r(), cb.epsilon_certified())?;
        Self::top_eigenvector(&q, bound)
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn state(&self) -> Option<&Ket> {
        self.state.as_ref()
    }

    /// `<w|op|w>`: total acceptance summed over the strings kept open.
    pub fn achieved(&self) -> f64 {
        self.achieved
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// Optimal success probability for telling `psi0` (prior `prior`) from
/// `psi1`: `½(1 + ‖prior ρ_0 − (1−prior) ρ_1‖_tr)`.
pub fn helstrom_two_state(psi0: &Ket, psi1: &Ket, prior: f64) -> Result<f64> {
    linalg::check_dims(psi0.dim(), psi1.dim())?;
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidInput(format!("prior {prior} outside [0, 1]")));
    }
    let gamma = projector(psi0).scale(prior).sub(&projector(psi1).scale(1.0 - prior))?;
    let trace_norm: f64 = linalg::eigenvalues_hermitian(&gamma)?.iter().map(|l| l.abs()).sum();
    Ok(0.5 * (1.0 + trace_norm))
}

/// Best chance of reading every bit of a uniformly random qubit-committed
/// string, `((1 + cos θ)/2)^n`. For `n <= 4` the closed form is checked
/// against the per-qubit Helstrom measurement applied to all `2^n`
/// strings.
pub fn guess_all_oracle(n: usize, theta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let closed = ((1.0 + theta.cos()) / 2.0).powi(n as i32);
    if n <= GUESS_ALL_BRUTE_MAX_N {
        let brute = guess_all_exhaustive(n, theta)?;
        if (brute - closed).abs() > 1e-12 {
            return Err(Error::Numerical(format!(
                "exhaustive guess-all probability {brute} differs from closed form {closed}"
            )));
        }
    }
    Ok(closed)
}

/// Average over all strings of the probability that the per-qubit
/// Helstrom measurement returns every bit.
pub fn guess_all_exhaustive(n: usize, theta: f64) -> Result<f64> {
    let psi = [encode_bit(false, theta), encode_bit(true, theta)];
    let gamma = projector(&psi[0]).scale(0.5).sub(&projector(&psi[1]).scale(0.5))?;
    let eig = linalg::eig_hermitian(&gamma)?;
    // guess 0 on the positive eigenspace, 1 otherwise
    let mut guess0 = HermitianOp::diag(&[0.0, 0.0])?;
    let mut guess1 = HermitianOp::diag(&[0.0, 0.0])?;
    for (l, v) in eig.values.iter().zip(&eig.vectors) {
        if *l > 0.0 {
            guess0 = guess0.add(&projector(v))?;
        } else {
            guess1 = guess1.add(&projector(v))?;
        }
    }
    let right = [guess0.expectation(&psi[0])?, guess1.expectation(&psi[1])?];
    let total: f64 = (0..1usize << n)
        .map(|a| (0..n).map(|i| right[(a >> i) & 1]).product::<f64>())
        .sum();
    Ok(total / (1usize << n) as f64)
}

/// Runs commit → unveil(`reveal`) → sampled verify for `strategy`.
pub fn run_cheat_session(instance: &Instance, strategy: &CheatStrategy, reveal: &[bool], seed: u64) -> Result<Transcript> {
    let mut t = match strategy.state() {
        None => session::commit_honest(instance, reveal, seed)?,
        Some(state) => {
            let commit = match instance {
                Instance::One(params) => {
                    linalg::check_dims(state.dim(), 2)?;
                    CheatCommit::Qubits(vec![QubitState::Pure(state.clone()); params.n])
                }
                Instance::Two { codebook, .. } => {
                    linalg::check_dims(state.dim(), codebook.dim())?;
                    CheatCommit::State(CommittedState::Pure(state.clone()))
                }
            };
            session::commit_state(instance, commit, strategy.kind(), seed)?
        }
    };
    session::unveil(&mut t, reveal)?;
    let codebook = match instance {
        Instance::Two { codebook, .. } => Some(*codebook),
        Instance::One(_) => None,
    };
    session::verify(&mut t, codebook, ModeName::Sampled)?;
    Ok(t)
}
