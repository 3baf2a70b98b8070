//! Session transcripts.
//!
//! A transcript is the JSON record of one commit/unveil/verify run. The
//! commit phase stores the sender's message and, for honest sessions, a
//! salted SHA-256 of the committed string; the string itself only appears
//! once unveiled. Floats are written in shortest round-trip form, so
//! serialize → parse → serialize is byte-identical.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Ket, C64};

pub const TRANSCRIPT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = concat!("qbsc ", env!("CARGO_PKG_VERSION"));
pub const SALT_BYTES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Committed,
    Unveiled,
    Verified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolParams {
    /// Qubit-per-bit scheme.
    Protocol1 { theta: f64, n: usize, r: usize },
    /// Codebook scheme; `r` is the cheat-set size (1 for honest runs).
    Protocol2 {
        codebook_id: String,
        dim: usize,
        message_bits: usize,
        epsilon: f64,
        r: usize,
    },
}

impl ProtocolParams {
    pub fn message_bits(&self) -> usize {
        match self {
            ProtocolParams::Protocol1 { n, .. } => *n,
            ProtocolParams::Protocol2 { message_bits, .. } => *message_bits,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Honest,
    TopEigenvector,
    CustomState,
}

/// An amplitude as `[re, im]`.
pub type Amplitude = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommitMessage {
    /// One pure qubit per bit.
    ProductKets { qubits: Vec<Vec<Amplitude>> },
    /// One mixed qubit per bit, row-major 2x2.
    ProductDensity { qubits: Vec<Vec<Vec<Amplitude>>> },
    /// One state in the codebook space.
    Ket { amplitudes: Vec<Amplitude> },
    /// Honest codebook commitment.
    CodebookIndex { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitRecord {
    pub salt: String,
    /// `sha256(salt || bits)` in hex; absent when the sender committed to
    /// no particular string.
    pub string_hash: Option<String>,
    pub message: CommitMessage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnveilRecord {
    pub bits: String,
    /// Whether the claim hashes to `string_hash`.
    pub matches_commitment: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub mode: ModeName,
    pub probability: f64,
    /// Present in sampled mode.
    pub accepted: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub session: u64,
    pub salt: u64,
    pub verify: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transcript {
    pub version: u32,
    pub tool_version: String,
    pub params: ProtocolParams,
    pub strategy: StrategyKind,
    pub phase: Phase,
    pub commit: CommitRecord,
    pub unveil: Option<UnveilRecord>,
    pub verdict: Option<Verdict>,
    pub seeds: Seeds,
    pub prng_id: String,
}

impl Transcript {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Transcript =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("transcript: {e}")))?;
        t.validate()?;
        Ok(t)
    }

    /// Structural checks beyond the schema.
    pub fn validate(&self) -> Result<()> {
        if self.version != TRANSCRIPT_VERSION {
            return Err(Error::Malformed(format!(
                "transcript version {} (expected {TRANSCRIPT_VERSION})",
                self.version
            )));
        }
        let consistent = match self.phase {
            Phase::Committed => self.unveil.is_none() && self.verdict.is_none(),
            Phase::Unveiled => self.unveil.is_some() && self.verdict.is_none(),
            Phase::Verified => self.unveil.is_some() && self.verdict.is_some(),
        };
        if !consistent {
            return Err(Error::Malformed(format!(
                "phase {:?} does not match the recorded messages",
                self.phase
            )));
        }
        if hex::decode(&self.commit.salt).map(|b| b.len()) != Ok(SALT_BYTES) {
            return Err(Error::Malformed("salt must be 16 bytes of hex".into()));
        }
        if let Some(h) = &self.commit.string_hash {
            if hex::decode(h).map(|b| b.len()) != Ok(32) {
                return Err(Error::Malformed("string hash must be 32 bytes of hex".into()));
            }
        }
        if let Some(u) = &self.unveil {
            if u.bits.len() != self.params.message_bits() || u.bits.chars().any(|c| c != '0' && c != '1') {
                return Err(Error::Malformed(format!(
                    "unveiled string {:?} is not {} bits",
                    u.bits,
                    self.params.message_bits()
                )));
            }
        }
        Ok(())
    }
}

pub fn string_hash(salt: &[u8], bits: &str) -> String {
    let mut h = Sha256::new();
    h.update(salt);
    h.update(bits.as_bytes());
    hex::encode(h.finalize())
}

pub fn encode_ket(k: &Ket) -> Vec<Amplitude> {
    k.amps().iter().map(|a| [a.re, a.im]).collect()
}

pub fn decode_ket(amps: &[Amplitude]) -> Result<Ket> {
    Ket::new(amps.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

pub fn encode_density(rho: &DensityMatrix) -> Vec<Vec<Amplitude>> {
    let op = rho.op();
    (0..op.dim())
        .map(|i| {
            (0..op.dim())
                .map(|j| {
                    let z = op.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn decode_density(rows: &[Vec<Amplitude>]) -> Result<DensityMatrix> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Malformed("density matrix is not square".into()));
    }
    let op = crate::linalg::HermitianOp::from_fn(dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))?;
    DensityMatrix::new(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        Transcript {
            version: TRANSCRIPT_VERSION,
            tool_version: TOOL_VERSION.into(),
            params: ProtocolParams::Protocol1 { theta: 0.2, n: 2, r: 1 },
            strategy: StrategyKind::Honest,
            phase: Phase::Committed,
            commit: CommitRecord {
                salt: "00".repeat(SALT_BYTES),
                string_hash: Some(string_hash(&[0; SALT_BYTES], "10")),
                message: CommitMessage::ProductKets {
                    qubits: vec![vec![[0.19866933079506122, 0.0], [0.9800665778412416, 0.0]], vec![[1.0, 0.0], [0.0, 0.0]]],
                },
            },
            unveil: None,
            verdict: None,
            seeds: Seeds { session: 7, salt: 1, verify: 2 },
            prng_id: crate::rng::PRNG_ID.into(),
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = sample().to_json().unwrap();
        let back = Transcript::from_json(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn hash_hides_plain_string() {
        let text = sample().to_json().unwrap();
        assert!(!text.contains("\"10\""));
        assert_ne!(string_hash(&[0; SALT_BYTES], "10"), string_hash(&[1; SALT_BYTES], "10"));
    }

    #[test]
    fn inconsistent_phase_is_malformed() {
        let mut t = sample();
        t.phase = Phase::Verified;
        let text = serde_json::to_string(&t).unwrap();
        assert!(matches!(Transcript::from_json(&text), Err(Error::Malformed(_))));
        assert!(matches!(Transcript::from_json("{\"version\": 1}"), Err(Error::Malformed(_))));
    }

    #[test]
    fn density_encoding_round_trips() {
        let rho = DensityMatrix::mixture(
            &[0.25, 0.75],
            &[Ket::basis(2, 0).unwrap(), crate::protocol1::encode_bit(true, 0.4)],
        )
        .unwrap();
        let back = decode_density(&encode_density(&rho)).unwrap();
        assert_eq!(back.op().max_abs_diff(rho.op()).unwrap(), 0.0);
    }
}
