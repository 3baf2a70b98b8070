//! Commit → unveil → verify state machine over [`Transcript`]s.

use rand::RngCore;

use crate::codebook::{capacity, Codebook};
use crate::error::{Error, Result};
use crate::protocol1::{self, Commitment1, QubitState, SecurityParams, VerifyMode};
use crate::protocol2::{self, Commitment2, CommittedState};
use crate::rng;
use crate::transcript::{
    decode_density, decode_ket, encode_density, encode_ket, string_hash, CommitMessage, CommitRecord, ModeName, Phase,
    ProtocolParams, Seeds, StrategyKind, Transcript, UnveilRecord, Verdict, SALT_BYTES, TOOL_VERSION,
    TRANSCRIPT_VERSION,
};
use crate::{format_bits, parse_bits};

const SALT_STREAM: u64 = 0;
const VERIFY_STREAM: u64 = 1;

/// A protocol instance a session runs against.
#[derive(Clone, Copy, Debug)]
pub enum Instance<'a> {
    One(SecurityParams),
    Two { codebook: &'a Codebook, r: usize },
}

impl Instance<'_> {
    fn params(&self) -> ProtocolParams {
        match *self {
            Instance::One(p) => ProtocolParams::Protocol1 {
                theta: p.theta,
                n: p.n,
                r: p.r,
            },
            Instance::Two { codebook, r } => ProtocolParams::Protocol2 {
                codebook_id: codebook.id(),
                dim: codebook.dim(),
                message_bits: capacity(codebook),
                epsilon: codebook.epsilon_certified(),
                r,
            },
        }
    }
}

/// What a dishonest sender transmits instead of an honest encoding.
#[derive(Clone, Debug)]
pub enum CheatCommit {
    Qubits(Vec<QubitState>),
    State(CommittedState),
}

fn seeds(seed: u64) -> Seeds {
    Seeds {
        session: seed,
        salt: rng::derive_seed(seed, SALT_STREAM),
        verify: rng::derive_seed(seed, VERIFY_STREAM),
    }
}

fn salt(seeds: &Seeds) -> [u8; SALT_BYTES] {
    let mut s = [0u8; SALT_BYTES];
    rng::stream(seeds.salt).fill_bytes(&mut s);
    s
}

fn open(instance: &Instance, strategy: StrategyKind, message: CommitMessage, bits: Option<&[bool]>, seed: u64) -> Transcript {
    let seeds = seeds(seed);
    let salt = salt(&seeds);
    Transcript {
        version: TRANSCRIPT_VERSION,
        tool_version: TOOL_VERSION.into(),
        params: instance.params(),
        strategy,
        phase: Phase::Committed,
        commit: CommitRecord {
            salt: hex::encode(salt),
            string_hash: bits.map(|b| string_hash(&salt, &format_bits(b))),
            message,
        },
        unveil: None,
        verdict: None,
        seeds,
        prng_id: rng::PRNG_ID.into(),
    }
}

/// Honest commitment to `bits`.
pub fn commit_honest(instance: &Instance, bits: &[bool], seed: u64) -> Result<Transcript> {
    let message = match *instance {
        Instance::One(params) => {
            let c = protocol1::commit(bits, params)?;
            CommitMessage::ProductKets {
                qubits: c.qubits.iter().map(encode_qubit_ket).collect::<Result<_>>()?,
            }
        }
        Instance::Two { codebook, .. } => {
            protocol2::commit2(bits, codebook)?;
            CommitMessage::CodebookIndex {
                index: crate::bits_to_index(bits),
            }
        }
    };
    Ok(open(instance, StrategyKind::Honest, message, Some(bits), seed))
}

fn encode_qubit_ket(q: &QubitState) -> Result<Vec<[f64; 2]>> {
    match q {
        QubitState::Pure(k) => Ok(encode_ket(k)),
        QubitState::Mixed(_) => Err(Error::InvalidInput("expected pure qubits".into())),
    }
}

/// Commitment with an arbitrary state; no string is hashed.
pub fn commit_state(instance: &Instance, commit: CheatCommit, strategy: StrategyKind, seed: u64) -> Result<Transcript> {
    let message = match (instance, commit) {
        (Instance::One(params), CheatCommit::Qubits(qubits)) => {
            let c = Commitment1::from_states(qubits, *params)?;
            if c.qubits.iter().all(|q| matches!(q, QubitState::Pure(_))) {
                CommitMessage::ProductKets {
                    qubits: c.qubits.iter().map(encode_qubit_ket).collect::<Result<_>>()?,
                }
            } else {
                CommitMessage::ProductDensity {
                    qubits: c
                        .qubits
                        .iter()
                        .map(|q| match q {
                            QubitState::Pure(k) => encode_density(&crate::linalg::DensityMatrix::pure(k)),
                            QubitState::Mixed(rho) => encode_density(rho),
                        })
                        .collect(),
                }
            }
        }
        (Instance::Two { codebook, .. }, CheatCommit::State(state)) => {
            Commitment2::from_state(state.clone(), codebook)?;
            match state {
                CommittedState::Pure(k) => CommitMessage::Ket { amplitudes: encode_ket(&k) },
                CommittedState::Mixed(_) => {
                    return Err(Error::InvalidInput("mixed codebook-space commitments are not serialized".into()))
                }
            }
        }
        _ => return Err(Error::InvalidInput("commitment does not fit the protocol".into())),
    };
    Ok(open(instance, strategy, message, None, seed))
}

/// Records the claimed string. Only valid right after commit.
pub fn unveil(t: &mut Transcript, bits: &[bool]) -> Result<()> {
    match t.phase {
        Phase::Committed => {}
        Phase::Unveiled => return Err(Error::PhaseOrder("string already unveiled".into())),
        Phase::Verified => return Err(Error::PhaseOrder("session already verified".into())),
    }
    if bits.len() != t.params.message_bits() {
        return Err(Error::InvalidInput(format!(
            "unveiled {} bits, commitment holds {}",
            bits.len(),
            t.params.message_bits()
        )));
    }
    let text = format_bits(bits);
    let matches_commitment = match &t.commit.string_hash {
        Some(h) => {
            let salt = hex::decode(&t.commit.salt).map_err(|e| Error::Malformed(format!("salt: {e}")))?;
            Some(&string_hash(&salt, &text) == h)
        }
        None => None,
    };
    t.unveil = Some(UnveilRecord {
        bits: text,
        matches_commitment,
    });
    t.phase = Phase::Unveiled;
    Ok(())
}

/// Runs the receiver's test. Sampled mode draws from the transcript's
/// recorded verify seed, so re-verifying reproduces the verdict.
pub fn verify<'t>(t: &'t mut Transcript, codebook: Option<&Codebook>, mode: ModeName) -> Result<&'t Verdict> {
    let claimed = match (t.phase, &t.unveil) {
        (Phase::Committed, _) => return Err(Error::PhaseOrder("verify before unveil".into())),
        (Phase::Verified, _) => return Err(Error::PhaseOrder("session already verified".into())),
        (Phase::Unveiled, Some(u)) => parse_bits(&u.bits)?,
        (Phase::Unveiled, None) => return Err(Error::Malformed("unveiled phase without an unveil record".into())),
    };
    let verify_mode = match mode {
        ModeName::Exact => VerifyMode::Exact,
        ModeName::Sampled => VerifyMode::Sampled(t.seeds.verify),
    };
    let v = match &t.params {
        ProtocolParams::Protocol1 { theta, n, r } => {
            let params = SecurityParams::new(*theta, *n, *r)?;
            let c = decode_protocol1(&t.commit.message, params)?;
            protocol1::verify_unveil(&c, &claimed, verify_mode)?
        }
        ProtocolParams::Protocol2 { codebook_id, .. } => {
            let cb = codebook.ok_or_else(|| Error::InvalidInput("protocol 2 verification needs the codebook".into()))?;
            if &cb.id() != codebook_id {
                return Err(Error::CertificationMismatch(format!(
                    "transcript was committed against codebook {codebook_id}, got {}",
                    cb.id()
                )));
            }
            let c = decode_protocol2(&t.commit.message, cb)?;
            protocol2::verify_unveil2(&c, cb, &claimed, verify_mode)?
        }
    };
    t.verdict = Some(Verdict {
        mode,
        probability: v.probability,
        accepted: v.accepted,
    });
    t.phase = Phase::Verified;
    Ok(t.verdict.as_ref().expect("just set"))
}

pub fn decode_protocol1(message: &CommitMessage, params: SecurityParams) -> Result<Commitment1> {
    let qubits = match message {
        CommitMessage::ProductKets { qubits } => qubits
            .iter()
            .map(|q| decode_ket(q).map(QubitState::Pure))
            .collect::<Result<Vec<_>>>()?,
        CommitMessage::ProductDensity { qubits } => qubits
            .iter()
            .map(|q| decode_density(q).map(QubitState::Mixed))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Malformed("protocol 1 transcript carries a codebook message".into())),
    };
    Commitment1::from_states(qubits, params)
}

pub fn decode_protocol2(message: &CommitMessage, cb: &Codebook) -> Result<Commitment2> {
    let state = match message {
        CommitMessage::Ket { amplitudes } => decode_ket(amplitudes)?,
        CommitMessage::CodebookIndex { index } => cb.state(*index)?,
        _ => return Err(Error::Malformed("protocol 2 transcript carries a qubit message".into())),
    };
    Commitment2::from_state(CommittedState::Pure(state), cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(theta: f64, n: usize) -> SecurityParams {
        SecurityParams::new(theta, n, 1).unwrap()
    }

    #[test]
    fn honest_round_is_accepted() {
        let inst = Instance::One(p1(0.2, 4));
        let bits = parse_bits("1010").unwrap();
        let mut t = commit_honest(&inst, &bits, 11).unwrap();
        unveil(&mut t, &bits).unwrap();
        assert_eq!(t.unveil.as_ref().unwrap().matches_commitment, Some(true));
        let v = verify(&mut t, None, ModeName::Exact).unwrap();
        assert!((v.probability - 1.0).abs() < 1e-14);
        assert_eq!(v.accepted, None);
    }

    #[test]
    fn flipped_bit_acceptance() {
        let inst = Instance::One(p1(0.1, 4));
        let mut t = commit_honest(&inst, &parse_bits("1010").unwrap(), 3).unwrap();
        unveil(&mut t, &parse_bits("1011").unwrap()).unwrap();
        assert_eq!(t.unveil.as_ref().unwrap().matches_commitment, Some(false));
        let p = verify(&mut t, None, ModeName::Exact).unwrap().probability;
        assert!((p - 0.1f64.sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn phase_order_is_enforced() {
        let inst = Instance::One(p1(0.2, 2));
        let bits = [true, false];
        let mut t = commit_honest(&inst, &bits, 0).unwrap();
        assert!(matches!(verify(&mut t, None, ModeName::Exact), Err(Error::PhaseOrder(_))));
        unveil(&mut t, &bits).unwrap();
        assert!(matches!(unveil(&mut t, &bits), Err(Error::PhaseOrder(_))));
        verify(&mut t, None, ModeName::Sampled).unwrap();
        assert!(matches!(verify(&mut t, None, ModeName::Exact), Err(Error::PhaseOrder(_))));
    }

    #[test]
    fn same_seed_same_transcript() {
        let inst = Instance::One(p1(0.3, 3));
        let run = |seed| {
            let mut t = commit_honest(&inst, &[true, true, false], seed).unwrap();
            unveil(&mut t, &[true, false, false]).unwrap();
            verify(&mut t, None, ModeName::Sampled).unwrap();
            t.to_json().unwrap()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn protocol2_needs_matching_codebook() {
        let cb = crate::codebook::generate_certified_codebook(32, 0.5, 6, 1).unwrap();
        let other = crate::codebook::generate_certified_codebook(32, 0.5, 6, 2).unwrap();
        let inst = Instance::Two { codebook: &cb, r: 1 };
        let bits = crate::index_to_bits(9, 6);
        let mut t = commit_honest(&inst, &bits, 4).unwrap();
        unveil(&mut t, &bits).unwrap();
        let mut copy = t.clone();
        assert!(matches!(verify(&mut copy, Some(&other), ModeName::Exact), Err(Error::CertificationMismatch(_))));
        assert!(verify(&mut t.clone(), None, ModeName::Exact).is_err());
        let v = verify(&mut t, Some(&cb), ModeName::Exact).unwrap();
        assert!((v.probability - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wrong_dimension_cheat_is_rejected() {
        let cb = crate::codebook::generate_certified_codebook(32, 0.5, 6, 1).unwrap();
        let inst = Instance::Two { codebook: &cb, r: 2 };
        let state = CommittedState::Pure(crate::linalg::Ket::basis(16, 0).unwrap());
        assert!(matches!(
            commit_state(&inst, CheatCommit::State(state), StrategyKind::CustomState, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
