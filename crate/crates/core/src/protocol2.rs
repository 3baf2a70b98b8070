//! Codebook commitment.
//!
//! An `N`-bit string selects one state of a certified codebook (big-endian
//! index); the receiver tests a claim by projecting onto the claimed state.
//!
//! Binding is relative to a cheat set of `r` strings the sender keeps open:
//! the sum of their acceptance probabilities is `Tr(ρ Q)` with
//! `Q = P_{i_1} + … + P_{i_r}`, at most `λ_max(Q) <= 1 + (r-1)ε` whenever
//! `(r-1)ε < 1`. Hiding is capped by `S(ρ_code) <= log2(dim)`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::codebook::{capacity, Codebook};
use crate::error::{Error, Result};
use crate::linalg::{self, projector, DensityMatrix, HermitianOp, Ket, C64};
use crate::protocol1::{Verification, VerifyMode};
use crate::rng;
use crate::{bits_to_index, parse_bits};

/// Exact ensemble entropy is computed only up to this many states and
/// dimensions.
pub const EXACT_HIDING_MAX: usize = 1 << 12;
const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum CommittedState {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl CommittedState {
    pub fn dim(&self) -> usize {
        match self {
            CommittedState::Pure(k) => k.dim(),
            CommittedState::Mixed(rho) => rho.dim(),
        }
    }

    /// `Tr(ρ P_v)` for the projector onto `v`.
    pub fn acceptance(&self, v: &Ket) -> Result<f64> {
        match self {
            // unit kets can overshoot 1 by an ulp or two
            CommittedState::Pure(k) => Ok(linalg::inner(v, k)?.norm_sqr().min(1.0)),
            CommittedState::Mixed(rho) => rho.overlap_probability(v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Commitment2 {
    pub state: CommittedState,
    pub codebook_id: String,
    pub message_bits: usize,
}

impl Commitment2 {
    /// Commitment from an arbitrary state (dishonest senders).
    pub fn from_state(state: CommittedState, cb: &Codebook) -> Result<Self> {
        if state.dim() != cb.dim() {
            return Err(Error::DimensionMismatch {
                left: state.dim(),
                right: cb.dim(),
            });
        }
        Ok(Self {
            state,
            codebook_id: cb.id(),
            message_bits: capacity(cb),
        })
    }
}

pub fn commit2(bits: &[bool], cb: &Codebook) -> Result<Commitment2> {
    if bits.len() != capacity(cb) {
        return Err(Error::InvalidInput(format!(
            "string of length {} for a codebook of capacity {}",
            bits.len(),
            capacity(cb)
        )));
    }
    let state = cb.state(bits_to_index(bits))?;
    Commitment2::from_state(CommittedState::Pure(state), cb)
}

pub fn verify_unveil2(c: &Commitment2, cb: &Codebook, claimed: &[bool], mode: VerifyMode) -> Result<Verification> {
    if c.codebook_id != cb.id() {
        return Err(Error::CertificationMismatch(
            "commitment was made against a different codebook".into(),
        ));
    }
    if claimed.len() != c.message_bits {
        return Err(Error::InvalidInput(format!(
            "claimed {} bits, commitment holds {}",
            claimed.len(),
            c.message_bits
        )));
    }
    let probability = c.state.acceptance(&cb.state(bits_to_index(claimed))?)?;
    let accepted = match mode {
        VerifyMode::Exact => None,
        VerifyMode::Sampled(seed) => {
            let mut stream = rng::stream(seed);
            Some(crate::protocol1::sample_all_outcomes(&[probability], &mut stream))
        }
    };
    Ok(Verification { probability, accepted })
}

/// Convenience wrapper taking the claim as a `0`/`1` string.
pub fn verify_unveil2_str(c: &Commitment2, cb: &Codebook, claimed: &str, mode: VerifyMode) -> Result<Verification> {
    verify_unveil2(c, cb, &parse_bits(claimed)?, mode)
}

/// The strings a dishonest sender keeps open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheatSet {
    indices: Vec<usize>,
}

impl CheatSet {
    /// Validates the indices against `cb`: in range, distinct, and
    /// `(r-1) ε_certified < 1`.
    pub fn new(indices: Vec<usize>, cb: &Codebook) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("cheat set must be nonempty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= cb.size()) {
            return Err(Error::InvalidInput(format!(
                "cheat index {bad} out of range (size {})",
                cb.size()
            )));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("cheat set has duplicated indices".into()));
        }
        let r = indices.len();
        if (r - 1) as f64 * cb.epsilon_certified() >= 1.0 {
            return Err(Error::Precondition(format!(
                "(r-1) * epsilon = {} is not below 1",
                (r - 1) as f64 * cb.epsilon_certified()
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn r(&self) -> usize {
        self.indices.len()
    }

    /// Largest `r` admissible for `epsilon`, capped at `limit`.
    pub fn max_size(epsilon: f64, limit: usize) -> usize {
        (1..=limit)
            .take_while(|&r| ((r - 1) as f64) * epsilon < 1.0)
            .last()
            .unwrap_or(1)
    }
}

/// `Q = Σ_j P_{i_j}`.
pub fn q_operator(cb: &Codebook, s: &CheatSet) -> Result<HermitianOp> {
    let states = s
        .indices()
        .iter()
        .map(|&i| cb.state(i))
        .collect::<Result<Vec<_>>>()?;
    q_operator_from_states(&states)
}

pub fn q_operator_from_states(states: &[Ket]) -> Result<HermitianOp> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidInput("need at least one state".into()))?;
    rest.iter().try_fold(projector(first), |acc, v| acc.add(&projector(v)))
}

/// Gram matrix `G_jk = <v_{i_j}|v_{i_k}>` of the cheat set. Its spectrum
/// coincides with the nonzero spectrum of `Q`.
pub fn cheat_gram(cb: &Codebook, s: &CheatSet) -> Result<HermitianOp> {
    let idx = s.indices();
    let mut m = Mat::<f64>::zeros(idx.len(), idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[(a, b)] = cb.overlap(i, j)?;
        }
    }
    HermitianOp::from_real_mat(m)
}

pub fn gram_of(states: &[Ket]) -> Result<HermitianOp> {
    let r = states.len();
    let mut entries = vec![C64::new(0.0, 0.0); r * r];
    for i in 0..r {
        for j in 0..r {
            entries[i * r + j] = linalg::inner(&states[i], &states[j])?;
        }
    }
    HermitianOp::from_fn(r, |i, j| entries[i * r + j])
}

/// `1 + (r-1) ε`, claimed only while `(r-1) ε < 1`.
pub fn binding_bound2(r: usize, epsilon: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be >= 1".into()));
    }
    let spread = (r - 1) as f64 * epsilon;
    if spread >= 1.0 {
        return Err(Error::Precondition(format!(
            "(r-1) * epsilon = {spread} is not below 1"
        )));
    }
    Ok(1.0 + spread)
}

/// Pieces of the expansion `<Q>_w = (1 + 2 S_2 + S_3) / (1 + S_2)` for
/// `|w> = Σ_j w_j |v_{i_j}>` with `Σ |w_j|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayleighTerms {
    pub s2: f64,
    pub s3: f64,
    /// `(1 + 2 S_2 + S_3) / (1 + S_2)`.
    pub rayleigh: f64,
    /// `w† G² w / w† G w`, the direct evaluation of `<w|Q|w>/<w|w>`.
    pub direct: f64,
    /// Largest off-diagonal `|G_jk|`.
    pub epsilon: f64,
}

/// Computes `S_2`, `S_3` and the Rayleigh quotient, asserting the
/// Cauchy–Schwarz bounds `S_2 <= ε(r-1)`, `S_3 <= ε²(r-1)²` and agreement
/// with the direct quotient to 1e-9.
pub fn s2_s3_terms(w: &[C64], gram: &HermitianOp) -> Result<RayleighTerms> {
    let r = gram.dim();
    if w.len() != r {
        return Err(Error::DimensionMismatch { left: w.len(), right: r });
    }
    let norm_sqr: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > linalg::CONSTRUCTION_TOL {
        return Err(Error::InvalidInput(format!("coefficients have norm^2 {norm_sqr}, expected 1")));
    }

    let offdiag = |i: usize, j: usize| if i == j { C64::new(0.0, 0.0) } else { gram.entry(i, j) };
    let mut s2 = C64::new(0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            s2 += w[i].conj() * w[j] * offdiag(i, j);
        }
    }
    // (G - I) w, then S_3 = |(G - I) w|²
    let gw_off: Vec<C64> = (0..r).map(|i| (0..r).map(|j| offdiag(i, j) * w[j]).sum()).collect();
    let s3: f64 = gw_off.iter().map(|z| z.norm_sqr()).sum();
    let s2 = s2.re;

    let denom = 1.0 + s2;
    if denom <= f64::EPSILON {
        return Err(Error::Numerical("coefficient vector spans the null space of the Gram matrix".into()));
    }
    let rayleigh = (1.0 + 2.0 * s2 + s3) / denom;

    let gw: Vec<C64> = (0..r).map(|i| (0..r).map(|j| gram.entry(i, j) * w[j]).sum()).collect();
    let wgw: f64 = w.iter().zip(&gw).map(|(a, b)| (a.conj() * b).re).sum();
    let wg2w: f64 = gw.iter().map(|z| z.norm_sqr()).sum();
    let direct = wg2w / wgw;

    let epsilon = (0..r)
        .flat_map(|i| (0..r).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| gram.entry(i, j).norm())
        .fold(0.0, f64::max);
    let spread = (r - 1) as f64 * epsilon;
    if s2 > spread + BOUND_TOL {
        return Err(Error::Numerical(format!("S2 = {s2} exceeds eps(r-1) = {spread}")));
    }
    if s3 > spread * spread + BOUND_TOL {
        return Err(Error::Numerical(format!("S3 = {s3} exceeds eps^2(r-1)^2 = {}", spread * spread)));
    }
    if (rayleigh - direct).abs() > BOUND_TOL {
        return Err(Error::Numerical(format!(
            "expansion quotient {rayleigh} disagrees with direct quotient {direct}"
        )));
    }
    Ok(RayleighTerms {
        s2,
        s3,
        rayleigh,
        direct,
        epsilon,
    })
}

/// `r` unit vectors in dimension `r` with every pairwise overlap exactly
/// `ε`: the rows of the Cholesky factor of `(1-ε)I + εJ`.
pub fn equality_configuration(r: usize, epsilon: f64) -> Result<Vec<Ket>> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&epsilon) || (r - 1) as f64 * epsilon >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} infeasible for r = {r}: need 0 <= eps < 1 and (r-1) eps < 1"
        )));
    }
    let gram = |i: usize, j: usize| if i == j { 1.0 } else { epsilon };
    let mut l = vec![vec![0.0f64; r]; r];
    for i in 0..r {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = gram(i, i) - dot;
                if d <= 0.0 {
                    return Err(Error::Numerical(format!("Gram matrix not positive definite at {i}")));
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (gram(i, j) - dot) / l[j][j];
            }
        }
    }
    l.into_iter()
        .map(|row| Ket::normalize(row.into_iter().map(|x| C64::new(x, 0.0)).collect()))
        .collect()
}

/// Uniform mixture of all codebook states, `dim x dim`.
pub fn code_ensemble_state(cb: &Codebook) -> Result<DensityMatrix> {
    check_exact_caps(cb)?;
    let v = state_matrix(cb)?;
    let f = cb.size() as f64;
    let rho = &v * v.transpose();
    let rho = Mat::<f64>::from_fn(cb.dim(), cb.dim(), |i, j| rho[(i, j)] / f);
    DensityMatrix::new(HermitianOp::from_real_mat(symmetrize(rho))?)
}

/// Entropy of the uniform code ensemble. Uses the `size x size` Gram
/// matrix when that is the smaller side; both share the nonzero spectrum.
pub fn code_ensemble_entropy(cb: &Codebook) -> Result<f64> {
    check_exact_caps(cb)?;
    if cb.size() < cb.dim() {
        let v = state_matrix(cb)?;
        let f = cb.size() as f64;
        let g = v.transpose() * &v;
        let g = Mat::<f64>::from_fn(cb.size(), cb.size(), |i, j| g[(i, j)] / f);
        let rho = DensityMatrix::new(HermitianOp::from_real_mat(symmetrize(g))?)?;
        linalg::von_neumann_entropy(&rho)
    } else {
        linalg::von_neumann_entropy(&code_ensemble_state(cb)?)
    }
}

fn check_exact_caps(cb: &Codebook) -> Result<()> {
    if cb.size() > EXACT_HIDING_MAX || cb.dim() > EXACT_HIDING_MAX {
        return Err(Error::Refused(format!(
            "exact ensemble entropy limited to {EXACT_HIDING_MAX} states and dimensions (size {}, dim {})",
            cb.size(),
            cb.dim()
        )));
    }
    Ok(())
}

/// Columns are the codebook states.
fn state_matrix(cb: &Codebook) -> Result<Mat<f64>> {
    let mut v = Mat::<f64>::zeros(cb.dim(), cb.size());
    for x in 0..cb.size() {
        let s = cb.state(x)?;
        for (i, a) in s.amps().iter().enumerate() {
            v[(i, x)] = a.re;
        }
    }
    Ok(v)
}

fn symmetrize(m: Mat<f64>) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HidingReport {
    /// `log2(dim)` bits.
    pub cap_bits: f64,
    /// `S(ρ_code)`, when within the exact caps.
    pub exact_entropy: Option<f64>,
    pub committed_bits: usize,
}

impl HidingReport {
    /// Committed bits minus the accessible-information cap.
    pub fn withheld_bits(&self) -> f64 {
        self.committed_bits as f64 - self.cap_bits
    }
}

/// Hiding cap `log2(dim)`; within the exact caps also the ensemble entropy,
/// which must not exceed the cap.
pub fn hiding_bound2(cb: &Codebook) -> Result<HidingReport> {
    let cap_bits = (cb.dim() as f64).log2();
    let exact_entropy = if cb.size() <= EXACT_HIDING_MAX && cb.dim() <= EXACT_HIDING_MAX {
        let s = code_ensemble_entropy(cb)?;
        if s > cap_bits + BOUND_TOL {
            return Err(Error::Numerical(format!("ensemble entropy {s} exceeds log2(dim) = {cap_bits}")));
        }
        Some(s)
    } else {
        None
    };
    Ok(HidingReport {
        cap_bits,
        exact_entropy,
        committed_bits: capacity(cb),
    })
}
