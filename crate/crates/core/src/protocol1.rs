//! Qubit-per-bit commitment.
//!
//! Bit `b` is sent as `ψ_b` with `ψ_0 = |0>` and `ψ_1 = sin θ|0> + cos θ|1>`.
//! The receiver tests a claimed string by projecting qubit `i` onto
//! `ψ_{claimed_i}` and accepts iff every projection succeeds.
//!
//! Binding: for any single-qubit state the two acceptance probabilities sum
//! to at most `cos²((π-2θ)/4) + sin²((π+2θ)/4) = 1 + sin θ = λ_max(P_0+P_1)`.
//!
//! Hiding: under a uniform prior the receiver holds the product ensemble
//! `ρ = 2^{-n} Σ_a |ψ_a><ψ_a|`, whose entropy is additive,
//! `S(ρ) = n · h2((1 + sin θ)/2)`. The power form `h2(·)^n` is reported next
//! to it for comparison only.

use std::f64::consts::{FRAC_PI_2, PI};

use faer::Mat;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, projector, DensityMatrix, HermitianOp, Ket};
use crate::rng;

/// Largest string length for which the full `2^n`-dimensional ensemble
/// state is built.
pub const BRUTE_FORCE_MAX_N: usize = 12;
/// Largest string length for the literal sum over all `2^n` strings.
pub const SUMMATION_MAX_N: usize = 8;
const HOLEVO_TOL: f64 = 1e-8;
const MIN_N_SEARCH_CAP: usize = 100_000_000;

/// Protocol knobs: angle `θ`, string length `n`, withheld-bits target `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityParams {
    pub theta: f64,
    pub n: usize,
    pub r: usize,
}

impl SecurityParams {
    pub fn new(theta: f64, n: usize, r: usize) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("theta {theta} outside (0, pi/2)")));
        }
        if r < 1 || r > n {
            return Err(Error::InvalidInput(format!("need 1 <= r <= n, got r={r}, n={n}")));
        }
        Ok(Self { theta, n, r })
    }

    pub fn epsilon(&self) -> f64 {
        self.theta.sin()
    }
}

/// What the sender put on the channel for one bit.
#[derive(Clone, Debug)]
pub enum QubitState {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl QubitState {
    fn acceptance(&self, target: &Ket) -> Result<f64> {
        match self {
            QubitState::Pure(k) => Ok(linalg::inner(target, k)?.norm_sqr().min(1.0)),
            QubitState::Mixed(rho) => rho.overlap_probability(target),
        }
    }

    fn dim(&self) -> usize {
        match self {
            QubitState::Pure(k) => k.dim(),
            QubitState::Mixed(rho) => rho.dim(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Commitment1 {
    pub qubits: Vec<QubitState>,
    pub params: SecurityParams,
}

impl Commitment1 {
    /// Commitment from arbitrary per-qubit states (dishonest senders).
    pub fn from_states(qubits: Vec<QubitState>, params: SecurityParams) -> Result<Self> {
        if qubits.len() != params.n {
            return Err(Error::InvalidInput(format!(
                "{} qubits for string length {}",
                qubits.len(),
                params.n
            )));
        }
        if let Some(q) = qubits.iter().find(|q| q.dim() != 2) {
            return Err(Error::DimensionMismatch { left: q.dim(), right: 2 });
        }
        Ok(Self { qubits, params })
    }
}

/// How the receiver runs the unveiling test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "seed")]
pub enum VerifyMode {
    /// Report the acceptance probability only.
    Exact,
    /// Also draw the projective outcomes from the stream keyed by the seed.
    Sampled(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub probability: f64,
    /// Present in sampled mode.
    pub accepted: Option<bool>,
}

/// `ψ_0 = |0>`, `ψ_1 = sin θ|0> + cos θ|1>`.
pub fn encode_bit(bit: bool, theta: f64) -> Ket {
    let amps = if bit { [theta.sin(), theta.cos()] } else { [1.0, 0.0] };
    Ket::normalize(amps.iter().map(|&a| linalg::C64::new(a, 0.0)).collect())
        .expect("qubit encoding is nonzero")
}

pub fn commit(bits: &[bool], params: SecurityParams) -> Result<Commitment1> {
    if bits.len() != params.n {
        return Err(Error::InvalidInput(format!(
            "string of length {} for n = {}",
            bits.len(),
            params.n
        )));
    }
    let qubits = bits
        .iter()
        .map(|&b| QubitState::Pure(encode_bit(b, params.theta)))
        .collect();
    Ok(Commitment1 { qubits, params })
}

/// Per-qubit acceptance probabilities `<ψ_{c_i}|ρ_i|ψ_{c_i}>`.
pub fn acceptance_per_qubit(c: &Commitment1, claimed: &[bool]) -> Result<Vec<f64>> {
    if claimed.len() != c.qubits.len() {
        return Err(Error::InvalidInput(format!(
            "claimed {} bits, commitment holds {}",
            claimed.len(),
            c.qubits.len()
        )));
    }
    c.qubits
        .iter()
        .zip(claimed)
        .map(|(q, &b)| q.acceptance(&encode_bit(b, c.params.theta)))
        .collect()
}

pub fn verify_unveil(c: &Commitment1, claimed: &[bool], mode: VerifyMode) -> Result<Verification> {
    let per_qubit = acceptance_per_qubit(c, claimed)?;
    let probability = per_qubit.iter().product();
    let accepted = match mode {
        VerifyMode::Exact => None,
        VerifyMode::Sampled(seed) => Some(sample_all_outcomes(&per_qubit, &mut rng::stream(seed))),
    };
    Ok(Verification { probability, accepted })
}

/// Draws one projective outcome per qubit; accepts iff all are 1. Every
/// draw is consumed even after a rejection so the stream position depends
/// only on `n`.
pub(crate) fn sample_all_outcomes<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> bool {
    let mut all = true;
    for &p in probabilities {
        let u: f64 = rng.random();
        all &= u < p;
    }
    all
}

/// Right-hand side of the per-bit binding inequality,
/// `cos²((π-2θ)/4) + sin²((π+2θ)/4)`, checked against `1 + sin θ` and
/// against `λ_max(P_0 + P_1)`.
pub fn alice_bound_eq1(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::InvalidInput(format!("theta {theta} outside (0, pi/2)")));
    }
    let rhs = ((PI - 2.0 * theta) / 4.0).cos().powi(2) + ((PI + 2.0 * theta) / 4.0).sin().powi(2);
    let identity = 1.0 + theta.sin();
    if (rhs - identity).abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "binding bound {rhs} differs from 1 + sin(theta) = {identity}"
        )));
    }
    let spectral = linalg::lambda_max(&pair_operator(theta))?;
    if (rhs - spectral).abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "binding bound {rhs} differs from lambda_max(P0 + P1) = {spectral}"
        )));
    }
    Ok(rhs)
}

/// `P_0 + P_1`, the operator whose top eigenvalue bounds `p^0 + p^1`.
pub fn pair_operator(theta: f64) -> HermitianOp {
    projector(&encode_bit(false, theta))
        .add(&projector(&encode_bit(true, theta)))
        .expect("both projectors are 2x2")
}

/// Per-qubit ensemble entropy `h2((1 + sin θ)/2)`.
pub fn single_qubit_entropy(theta: f64) -> f64 {
    binary_entropy((1.0 + theta.sin()) / 2.0).expect("(1 + sin θ)/2 lies in [0, 1] for θ in [0, π/2]")
}

/// Entropy of the uniform `n`-bit ensemble, `n · h2((1 + sin θ)/2)` bits.
pub fn holevo_bound_p1(n: usize, theta: f64) -> f64 {
    n as f64 * single_qubit_entropy(theta)
}

/// The printed power form `h2((1 + sin θ)/2)^n`, kept only for side-by-side
/// reporting.
pub fn holevo_printed_power_form(n: usize, theta: f64) -> f64 {
    single_qubit_entropy(theta).powi(n as i32)
}

/// Single-qubit ensemble `½(|ψ_0><ψ_0| + |ψ_1><ψ_1|)` as a real 2x2 array.
fn single_qubit_ensemble(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta.sin(), theta.cos());
    [[(1.0 + s * s) / 2.0, s * c / 2.0], [s * c / 2.0, c * c / 2.0]]
}

/// The `2^n`-dimensional ensemble state. The average over strings factorizes
/// entrywise: `ρ_xy = Π_i ρ1[x_i][y_i]`, bit 0 being the slow index.
pub fn eq2_state(n: usize, theta: f64) -> Result<DensityMatrix> {
    if n == 0 || n > BRUTE_FORCE_MAX_N {
        return Err(Error::Refused(format!(
            "explicit ensemble state limited to 1 <= n <= {BRUTE_FORCE_MAX_N}"
        )));
    }
    let rho1 = single_qubit_ensemble(theta);
    let dim = 1usize << n;
    let m = Mat::<f64>::from_fn(dim, dim, |x, y| {
        (0..n)
            .map(|i| {
                let shift = n - 1 - i;
                rho1[(x >> shift) & 1][(y >> shift) & 1]
            })
            .product()
    });
    DensityMatrix::new(HermitianOp::from_real_mat(m)?)
}

/// The same state by literal summation of `2^n` product-state projectors.
pub fn eq2_state_by_summation(n: usize, theta: f64) -> Result<HermitianOp> {
    if n == 0 || n > SUMMATION_MAX_N {
        return Err(Error::Refused(format!(
            "literal ensemble summation limited to 1 <= n <= {SUMMATION_MAX_N}"
        )));
    }
    let dim = 1usize << n;
    let mut acc = Mat::<f64>::zeros(dim, dim);
    let weight = 1.0 / dim as f64;
    for a in 0..dim {
        let mut ket = encode_bit((a >> (n - 1)) & 1 == 1, theta);
        for i in 1..n {
            ket = linalg::tensor(&ket, &encode_bit((a >> (n - 1 - i)) & 1 == 1, theta))?;
        }
        let amps: Vec<f64> = ket.amps().iter().map(|z| z.re).collect();
        for y in 0..dim {
            for x in 0..dim {
                acc[(x, y)] += weight * amps[x] * amps[y];
            }
        }
    }
    HermitianOp::from_real_mat(acc)
}

/// Spectral entropy of the explicit ensemble state.
pub fn holevo_brute_force(n: usize, theta: f64) -> Result<f64> {
    linalg::von_neumann_entropy(&eq2_state(n, theta)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolevoCheck {
    pub n: usize,
    pub theta: f64,
    pub additive: f64,
    pub printed_power_form: f64,
    /// Present for `n <= 12`.
    pub brute_force: Option<f64>,
}

/// Additive Holevo bound, cross-checked by full eigendecomposition for
/// `n <= 12`; disagreement beyond 1e-8 is a numerical error.
pub fn holevo_bound_p1_checked(n: usize, theta: f64) -> Result<HolevoCheck> {
    let additive = holevo_bound_p1(n, theta);
    let brute_force = if (1..=BRUTE_FORCE_MAX_N).contains(&n) {
        let s = holevo_brute_force(n, theta)?;
        if (s - additive).abs() > HOLEVO_TOL {
            return Err(Error::Numerical(format!(
                "brute-force entropy {s} differs from n*h2 = {additive} at n={n}, theta={theta}"
            )));
        }
        Some(s)
    } else {
        None
    };
    Ok(HolevoCheck {
        n,
        theta,
        additive,
        printed_power_form: holevo_printed_power_form(n, theta),
        brute_force,
    })
}

/// Bits that stay inaccessible on average, `n - S(ρ)`.
pub fn hiding_gap(n: usize, theta: f64) -> f64 {
    n as f64 - holevo_bound_p1(n, theta)
}

/// Whether `n - S(ρ) > r`.
pub fn hides_at_least(n: usize, theta: f64, r: usize) -> bool {
    hiding_gap(n, theta) > r as f64
}

/// Smallest `n` with `n - S(ρ) > r`, found by scanning `n = 1, 2, …`.
pub fn min_n_for_hiding(theta: f64, r: usize) -> Option<usize> {
    (1..=MIN_N_SEARCH_CAP).find(|&n| hides_at_least(n, theta, r))
}

/// Closed form of [`min_n_for_hiding`]: the least integer strictly above
/// `r / (1 - h2)`.
pub fn min_n_for_hiding_closed_form(theta: f64, r: usize) -> Option<usize> {
    let per_bit = 1.0 - single_qubit_entropy(theta);
    if per_bit <= 0.0 {
        return None;
    }
    Some((r as f64 / per_bit).floor() as usize + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBound {
    /// `2^r · h2((1 + sin θ)/2)^n` before clamping.
    pub raw: f64,
    /// Clamped to `[0, 1]`.
    pub value: f64,
    /// `raw >= 1`: the inequality says nothing.
    pub vacuous: bool,
}

/// Bound on the chance that the receiver extracts more than `n - r` bits.
pub fn identify_all_bound(n: usize, theta: f64, r: usize) -> DeltaBound {
    let raw = 2f64.powi(r as i32) * single_qubit_entropy(theta).powi(n as i32);
    DeltaBound {
        raw,
        value: raw.clamp(0.0, 1.0),
        vacuous: raw >= 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::von_neumann_entropy;

    #[test]
    fn encode_bit_examples() {
        let z = encode_bit(false, 0.8);
        assert_eq!(z.amps()[0].re, 1.0);
        assert_eq!(z.amps()[1].re, 0.0);
        let one = encode_bit(true, FRAC_PI_2);
        assert!((one.amps()[0].re - 1.0).abs() < 1e-15 && one.amps()[1].re.abs() < 1e-15);
        let one = encode_bit(true, 0.3);
        assert!((one.amps()[0].re - 0.29552020666133955).abs() < 1e-15);
        assert!((one.amps()[1].re - 0.955336489125606).abs() < 1e-15);
    }

    #[test]
    fn params_are_validated() {
        assert!(SecurityParams::new(0.0, 4, 1).is_err());
        assert!(SecurityParams::new(FRAC_PI_2, 4, 1).is_err());
        assert!(SecurityParams::new(0.2, 4, 0).is_err());
        assert!(SecurityParams::new(0.2, 4, 5).is_err());
        assert!((SecurityParams::new(0.2, 4, 2).unwrap().epsilon() - 0.2f64.sin()).abs() == 0.0);
    }

    #[test]
    fn commit_examples() {
        let p = SecurityParams::new(0.3, 2, 1).unwrap();
        let c = commit(&[false, true], p).unwrap();
        match &c.qubits[1] {
            QubitState::Pure(k) => assert!((k.amps()[1].re - 0.955336489125606).abs() < 1e-15),
            _ => unreachable!(),
        }
        assert!(commit(&[true], p).is_err());
    }

    #[test]
    fn honest_unveil_accepts_and_flips_are_detected() {
        let p = SecurityParams::new(0.1, 4, 1).unwrap();
        let bits = [true, false, true, false];
        let c = commit(&bits, p).unwrap();
        let v = verify_unveil(&c, &bits, VerifyMode::Exact).unwrap();
        assert!((v.probability - 1.0).abs() < 1e-15);
        assert_eq!(v.accepted, None);

        let flipped = [true, false, true, true];
        let v = verify_unveil(&c, &flipped, VerifyMode::Exact).unwrap();
        assert!((v.probability - 0.009966711079379185).abs() < 1e-15);

        let two = [false, false, true, true];
        let v = verify_unveil(&c, &two, VerifyMode::Exact).unwrap();
        assert!((v.probability - 0.1f64.sin().powi(4)).abs() < 1e-16);

        assert!(verify_unveil(&c, &bits[..3], VerifyMode::Exact).is_err());
    }

    #[test]
    fn sampled_mode_is_replayable() {
        let p = SecurityParams::new(0.5, 3, 1).unwrap();
        let c = commit(&[true, true, false], p).unwrap();
        let a = verify_unveil(&c, &[false, true, false], VerifyMode::Sampled(42)).unwrap();
        let b = verify_unveil(&c, &[false, true, false], VerifyMode::Sampled(42)).unwrap();
        assert_eq!(a, b);
        let honest = verify_unveil(&c, &[true, true, false], VerifyMode::Sampled(42)).unwrap();
        assert_eq!(honest.accepted, Some(true));
    }

    #[test]
    fn eq1_examples() {
        assert!((alice_bound_eq1(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!((alice_bound_eq1(0.1).unwrap() - 1.0998334166468282).abs() < 1e-12);
        assert!(alice_bound_eq1(0.0).is_err());
        assert!(alice_bound_eq1(2.0).is_err());
    }

    #[test]
    fn holevo_examples() {
        // near-orthogonal encodings approach n bits; identical encodings give 0
        assert!((holevo_bound_p1(5, 1e-9) - 5.0).abs() < 1e-6);
        assert_eq!(holevo_bound_p1(5, FRAC_PI_2), 0.0);
        assert!((holevo_bound_p1(8, 0.2) - 7.770707679976948).abs() < 1e-12);
        let check = holevo_bound_p1_checked(8, 0.2).unwrap();
        assert!((check.brute_force.unwrap() - check.additive).abs() < 1e-8);
        assert!(holevo_bound_p1_checked(40, 0.2).unwrap().brute_force.is_none());
    }

    #[test]
    fn factorized_and_summed_ensembles_agree() {
        for n in 1..=6 {
            let fast = eq2_state(n, 0.37).unwrap();
            let slow = eq2_state_by_summation(n, 0.37).unwrap();
            assert!(fast.op().max_abs_diff(&slow).unwrap() < 1e-14, "n = {n}");
        }
        let single = eq2_state(1, 0.2).unwrap();
        assert!((von_neumann_entropy(&single).unwrap() - single_qubit_entropy(0.2)).abs() < 1e-12);
    }

    #[test]
    fn hiding_gap_examples() {
        assert_eq!(hiding_gap(7, FRAC_PI_2), 7.0);
        assert!((hiding_gap(8, 0.2) - 0.22929232002305167).abs() < 1e-12);
        assert_eq!(min_n_for_hiding(0.2, 2), Some(70));
        assert_eq!(min_n_for_hiding_closed_form(0.2, 2), Some(70));
        assert_eq!(min_n_for_hiding(FRAC_PI_2, 3), Some(4));
    }

    #[test]
    fn delta_bound_examples() {
        let b = identify_all_bound(4, FRAC_PI_2, 2);
        assert_eq!(b.value, 0.0);
        assert!(!b.vacuous);
        let b = identify_all_bound(500, 0.2, 10);
        let independent = (10.0 * 2f64.ln() + 500.0 * 0.9713384599971185f64.ln()).exp();
        assert!((b.value - independent).abs() / independent < 1e-9);
        let b = identify_all_bound(100, 0.2, 10);
        assert!(b.vacuous && b.value == 1.0 && (b.raw - 55.89313204942554).abs() < 1e-9);
    }
}
