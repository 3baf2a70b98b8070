//! Near-orthogonal state families built from random binary linear codes.
//!
//! A `k x m` generator over GF(2) maps each `k`-bit message `x` to a codeword
//! `E(x)`, and the fingerprint map sends that codeword to the real state with
//! amplitudes `(-1)^{E(x)_i} / sqrt(m)`. Overlaps are then a function of
//! Hamming distance alone, `<v_x|v_y> = 1 - 2 d(E(x), E(y)) / m`, and for a
//! linear code the largest off-diagonal overlap is `max |1 - 2 wt(c) / m|`
//! over the nonzero codewords `c`. Certification enumerates all of them.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{inner, Ket, C64};
use crate::rng::{self, PRNG_ID};

pub const MAX_MESSAGE_BITS: usize = 20;
pub const MAX_LENGTH: usize = 4096;
/// Exhaustive certification is refused beyond `2^16` states.
pub const MAX_CERTIFIED_BITS: usize = 16;
pub const DEFAULT_ATTEMPT_CAP: usize = 500;
const RANK_REDRAWS: usize = 1000;
/// Number of random pairs checked by direct inner product during
/// certification.
const CROSS_CHECK_PAIRS: usize = 128;
pub const CODEBOOK_DOC_VERSION: u32 = 1;

/// One generator row or codeword, packed 64 bits per word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut row = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                row.words[i / 64] |= 1 << (i % 64);
            }
        }
        row
    }

    fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut row = Self::zeros(len);
        for w in row.words.iter_mut() {
            *w = rng.random();
        }
        row.mask_tail();
        row
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn distance(&self, other: &BitRow) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Hex digits of the row read as an unsigned integer whose most
    /// significant bit is position 0; `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let pad = digits * 4 - self.len;
        let mut out = String::with_capacity(digits);
        for d in 0..digits {
            let mut nibble = 0u32;
            for b in 0..4 {
                let pos = (d * 4 + b) as isize - pad as isize;
                let bit = pos >= 0 && self.get(pos as usize);
                nibble = (nibble << 1) | bit as u32;
            }
            write!(out, "{nibble:x}").unwrap();
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Malformed(format!(
                "generator row has {} hex digits, expected {digits} for length {len}",
                hex.len()
            )));
        }
        let pad = digits * 4 - len;
        let mut row = Self::zeros(len);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Malformed(format!("invalid hex digit {ch:?} in generator row")))?;
            for b in 0..4 {
                let bit = (nibble >> (3 - b)) & 1 == 1;
                let pos = (d * 4 + b) as isize - pad as isize;
                if pos < 0 {
                    if bit {
                        return Err(Error::Malformed("generator row sets padding bits".into()));
                    }
                } else if bit {
                    row.words[pos as usize / 64] |= 1 << (pos as usize % 64);
                }
            }
        }
        Ok(row)
    }
}

/// Binary linear code given by a full-row-rank generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCode {
    length: usize,
    rows: Vec<BitRow>,
    seed: u64,
}

impl BinaryCode {
    /// Wraps explicit generator rows; rejects rank-deficient generators.
    pub fn from_rows(length: usize, rows: Vec<BitRow>, seed: u64) -> Result<Self> {
        if length == 0 || length > MAX_LENGTH {
            return Err(Error::InvalidInput(format!("code length {length} outside [1, {MAX_LENGTH}]")));
        }
        if rows.len() > length || rows.len() > MAX_MESSAGE_BITS {
            return Err(Error::InvalidInput(format!(
                "{} message bits for length {length}",
                rows.len()
            )));
        }
        if rows.iter().any(|r| r.len() != length) {
            return Err(Error::InvalidInput("generator rows of inconsistent length".into()));
        }
        if gf2_rank(&rows) != rows.len() {
            return Err(Error::InvalidInput("generator is not full row rank over GF(2)".into()));
        }
        Ok(Self { length, rows, seed })
    }

    pub fn message_bits(&self) -> usize {
        self.rows.len()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn codeword_count(&self) -> usize {
        1usize << self.rows.len()
    }

    /// Codeword of message `index`; the first generator row is selected by
    /// the most significant message bit.
    pub fn codeword(&self, index: usize) -> BitRow {
        let k = self.rows.len();
        let mut c = BitRow::zeros(self.length);
        for (j, row) in self.rows.iter().enumerate() {
            if (index >> (k - 1 - j)) & 1 == 1 {
                c.xor_assign(row);
            }
        }
        c
    }

    /// Weights of all nonzero codewords, visited in Gray-code order.
    pub fn nonzero_weights(&self) -> Vec<usize> {
        let k = self.rows.len();
        let mut c = BitRow::zeros(self.length);
        let mut out = Vec::with_capacity((1usize << k).saturating_sub(1));
        for g in 1..(1usize << k) {
            let flipped = g.trailing_zeros() as usize;
            c.xor_assign(&self.rows[k - 1 - flipped]);
            out.push(c.weight());
        }
        out
    }
}

fn gf2_rank(rows: &[BitRow]) -> usize {
    let mut work: Vec<BitRow> = rows.to_vec();
    let mut rank = 0;
    let len = rows.first().map_or(0, |r| r.len());
    for col in 0..len {
        let Some(p) = (rank..work.len()).find(|&r| work[r].get(col)) else {
            continue;
        };
        work.swap(rank, p);
        let pivot = work[rank].clone();
        for (r, row) in work.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

/// Draws a uniformly random full-rank `k x m` generator from the stream
/// keyed by `seed`. Identical arguments give identical codes.
pub fn generate_code(k: usize, m: usize, seed: u64) -> Result<BinaryCode> {
    if !(1..=MAX_MESSAGE_BITS).contains(&k) || m < k || m > MAX_LENGTH {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k <= {MAX_MESSAGE_BITS} and k <= m <= {MAX_LENGTH}, got k={k}, m={m}"
        )));
    }
    let mut stream = rng::stream(seed);
    for _ in 0..RANK_REDRAWS {
        let rows: Vec<BitRow> = (0..k).map(|_| BitRow::random(m, &mut stream)).collect();
        if gf2_rank(&rows) == k {
            return Ok(BinaryCode { length: m, rows, seed });
        }
    }
    Err(Error::CodeGeneration {
        k,
        m,
        seed,
        redraws: RANK_REDRAWS,
    })
}

/// How a codebook's code was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub prng_id: String,
    pub base_seed: u64,
    /// Seed of the accepted code; `derive_seed(base_seed, attempts - 1)` for
    /// sampled codebooks, `base_seed` for codebooks wrapped directly.
    pub code_seed: u64,
    pub attempts: usize,
}

/// Certified fingerprint-state family. States are derived on demand from
/// the code and never stored.
#[derive(Clone, Debug)]
pub struct Codebook {
    code: BinaryCode,
    epsilon_certified: f64,
    provenance: Provenance,
}

impl Codebook {
    pub fn dim(&self) -> usize {
        self.code.length()
    }

    pub fn size(&self) -> usize {
        self.code.codeword_count()
    }

    pub fn epsilon_certified(&self) -> f64 {
        self.epsilon_certified
    }

    pub fn code(&self) -> &BinaryCode {
        &self.code
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Fingerprint state of message `index`.
    pub fn state(&self, index: usize) -> Result<Ket> {
        if index >= self.size() {
            return Err(Error::InvalidInput(format!(
                "codebook index {index} out of range (size {})",
                self.size()
            )));
        }
        Ok(fingerprint(&self.code.codeword(index)))
    }

    /// Overlap computed from Hamming distance; equals the inner product.
    pub fn overlap(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.size() || j >= self.size() {
            return Err(Error::InvalidInput("codebook index out of range".into()));
        }
        let d = self.code.codeword(i).distance(&self.code.codeword(j));
        Ok(overlap_from_distance(d, self.dim()))
    }

    /// Stable identifier of the generator (SHA-256 over length and rows).
    pub fn id(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.dim().to_string().as_bytes());
        for row in self.code.rows() {
            h.update(b":");
            h.update(row.to_hex().as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_document(&self) -> CodebookDocument {
        CodebookDocument {
            version: CODEBOOK_DOC_VERSION,
            dim: self.dim(),
            k: self.code.message_bits(),
            m: self.dim(),
            seed: self.provenance.base_seed,
            code_seed: self.provenance.code_seed,
            prng_id: self.provenance.prng_id.clone(),
            generator: self.code.rows().iter().map(BitRow::to_hex).collect(),
            epsilon_certified: self.epsilon_certified,
            attempts: self.provenance.attempts,
        }
    }

    /// Rebuilds a codebook from its document and re-certifies it: the
    /// generator must be the one its seed produces and the recomputed
    /// epsilon must match the recorded one.
    pub fn from_document(doc: &CodebookDocument) -> Result<Self> {
        if doc.version != CODEBOOK_DOC_VERSION {
            return Err(Error::Malformed(format!("unsupported codebook version {}", doc.version)));
        }
        if doc.dim != doc.m {
            return Err(Error::Malformed(format!("dim {} differs from code length {}", doc.dim, doc.m)));
        }
        if doc.generator.len() != doc.k {
            return Err(Error::Malformed(format!(
                "{} generator rows for k = {}",
                doc.generator.len(),
                doc.k
            )));
        }
        if doc.prng_id != PRNG_ID {
            return Err(Error::Malformed(format!("unknown prng {:?}", doc.prng_id)));
        }
        let rows = doc
            .generator
            .iter()
            .map(|h| BitRow::from_hex(h, doc.m))
            .collect::<Result<Vec<_>>>()?;
        let code = BinaryCode::from_rows(doc.m, rows, doc.code_seed)
            .map_err(|e| Error::CertificationMismatch(format!("generator rejected: {e}")))?;

        if doc.attempts == 0 {
            return Err(Error::Malformed("attempts must be >= 1".into()));
        }
        if doc.code_seed != doc.seed && doc.code_seed != rng::derive_seed(doc.seed, doc.attempts as u64 - 1) {
            return Err(Error::CertificationMismatch(format!(
                "code seed {} is not derived from base seed {} at attempt {}",
                doc.code_seed, doc.seed, doc.attempts
            )));
        }
        if doc.k >= 1 {
            let regenerated = generate_code(doc.k, doc.m, doc.code_seed)?;
            if regenerated.rows() != code.rows() {
                return Err(Error::CertificationMismatch(
                    "generator does not match the one derived from its seed".into(),
                ));
            }
        }
        let epsilon = certify(&code)?;
        if epsilon != doc.epsilon_certified {
            return Err(Error::CertificationMismatch(format!(
                "recorded epsilon {} but recomputed {epsilon}",
                doc.epsilon_certified
            )));
        }
        Ok(Self {
            code,
            epsilon_certified: epsilon,
            provenance: Provenance {
                prng_id: doc.prng_id.clone(),
                base_seed: doc.seed,
                code_seed: doc.code_seed,
                attempts: doc.attempts,
            },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodebookDocument =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("codebook json: {e}")))?;
        Self::from_document(&doc)
    }
}

/// On-disk codebook. States are not serialized; they are re-derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodebookDocument {
    pub version: u32,
    pub dim: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub code_seed: u64,
    pub prng_id: String,
    pub generator: Vec<String>,
    pub epsilon_certified: f64,
    pub attempts: usize,
}

fn fingerprint(codeword: &BitRow) -> Ket {
    let m = codeword.len();
    let a = 1.0 / (m as f64).sqrt();
    let amps = (0..m)
        .map(|i| C64::new(if codeword.get(i) { -a } else { a }, 0.0))
        .collect();
    Ket::normalize(amps).expect("fingerprint amplitudes are nonzero")
}

/// `1 - 2 d / m`, evaluated as `(m - 2d) / m`.
pub fn overlap_from_distance(distance: usize, m: usize) -> f64 {
    (m as f64 - 2.0 * distance as f64) / m as f64
}

/// Fingerprint codebook of `code`, certified exhaustively.
pub fn fingerprint_states(code: BinaryCode) -> Result<Codebook> {
    let epsilon = certify(&code)?;
    let seed = code.seed();
    Ok(Codebook {
        code,
        epsilon_certified: epsilon,
        provenance: Provenance {
            prng_id: PRNG_ID.into(),
            base_seed: seed,
            code_seed: seed,
            attempts: 1,
        },
    })
}

/// Largest off-diagonal overlap magnitude of the codebook, recomputed
/// exhaustively from scratch.
pub fn verify_epsilon(cb: &Codebook) -> Result<f64> {
    certify(&cb.code)
}

fn certify(code: &BinaryCode) -> Result<f64> {
    let k = code.message_bits();
    if k > MAX_CERTIFIED_BITS {
        return Err(Error::Refused(format!(
            "exhaustive certification limited to 2^{MAX_CERTIFIED_BITS} states, code has 2^{k}"
        )));
    }
    let m = code.length();
    let epsilon = code
        .nonzero_weights()
        .into_iter()
        .map(|w| overlap_from_distance(w, m).abs())
        .fold(0.0, f64::max);

    let size = code.codeword_count();
    if size >= 2 {
        let mut stream = rng::stream(rng::derive_seed(code.seed(), 0xCE27));
        for _ in 0..CROSS_CHECK_PAIRS {
            let i = stream.random_range(0..size);
            let mut j = stream.random_range(0..size - 1);
            if j >= i {
                j += 1;
            }
            let (ci, cj) = (code.codeword(i), code.codeword(j));
            let direct = inner(&fingerprint(&ci), &fingerprint(&cj))?;
            let from_distance = overlap_from_distance(ci.distance(&cj), m);
            if (direct.re - from_distance).abs() > 1e-12 || direct.im != 0.0 {
                return Err(Error::Numerical(format!(
                    "pair ({i}, {j}): direct overlap {} disagrees with distance formula {from_distance}",
                    direct.re
                )));
            }
            if from_distance.abs() > epsilon + 1e-12 {
                return Err(Error::Numerical(format!(
                    "pair ({i}, {j}) overlap {from_distance} exceeds exhaustive maximum {epsilon}"
                )));
            }
        }
    }
    Ok(epsilon)
}

/// Rejection-samples codes of dimension `k` and length `n` until one is
/// certified at `epsilon_target` or [`DEFAULT_ATTEMPT_CAP`] attempts pass.
pub fn generate_certified_codebook(n: usize, epsilon_target: f64, k: usize, seed: u64) -> Result<Codebook> {
    generate_certified_codebook_with_cap(n, epsilon_target, k, seed, DEFAULT_ATTEMPT_CAP)
}

pub fn generate_certified_codebook_with_cap(
    n: usize,
    epsilon_target: f64,
    k: usize,
    seed: u64,
    cap: usize,
) -> Result<Codebook> {
    if !(epsilon_target >= 0.0 && epsilon_target <= 1.0) {
        return Err(Error::InvalidInput(format!("epsilon target {epsilon_target} outside [0, 1]")));
    }
    if k > MAX_CERTIFIED_BITS {
        return Err(Error::Refused(format!(
            "certified codebooks limited to k <= {MAX_CERTIFIED_BITS}"
        )));
    }
    let mut best = f64::INFINITY;
    for attempt in 0..cap {
        let code_seed = rng::derive_seed(seed, attempt as u64);
        let code = generate_code(k, n, code_seed)?;
        let epsilon = certify(&code)?;
        if epsilon <= epsilon_target {
            return Ok(Codebook {
                code,
                epsilon_certified: epsilon,
                provenance: Provenance {
                    prng_id: PRNG_ID.into(),
                    base_seed: seed,
                    code_seed,
                    attempts: attempt + 1,
                },
            });
        }
        best = best.min(epsilon);
    }
    Err(Error::Infeasible {
        target: epsilon_target,
        best_epsilon: best,
        attempts: cap,
        seed,
    })
}

/// Number of committed bits `N = log2(size)`.
pub fn capacity(cb: &Codebook) -> usize {
    cb.code.message_bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitRow {
        BitRow::from_bits(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn one_by_two_codes_have_a_nonzero_codeword() {
        for seed in 0..20 {
            let code = generate_code(1, 2, seed).unwrap();
            let c = code.codeword(1);
            assert!(!c.is_zero());
            assert!(["01", "10", "11"].contains(&format!("{}{}", c.get(0) as u8, c.get(1) as u8).as_str()));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_code(5, 40, 99).unwrap(), generate_code(5, 40, 99).unwrap());
        assert_ne!(generate_code(5, 40, 99).unwrap(), generate_code(5, 40, 100).unwrap());
    }

    #[test]
    fn weights_lie_in_range() {
        let code = generate_code(4, 16, 3).unwrap();
        let w = code.nonzero_weights();
        assert_eq!(w.len(), 15);
        assert!(w.iter().all(|&w| (1..=16).contains(&w)));
        // Gray-code enumeration agrees with direct codeword evaluation
        let mut direct: Vec<usize> = (1..16).map(|x| code.codeword(x).weight()).collect();
        let mut gray = w.clone();
        direct.sort();
        gray.sort();
        assert_eq!(direct, gray);
    }

    #[test]
    fn generate_code_checks_arguments() {
        assert!(generate_code(0, 4, 1).is_err());
        assert!(generate_code(5, 4, 1).is_err());
        assert!(generate_code(21, 64, 1).is_err());
        assert!(generate_code(2, 4097, 1).is_err());
    }

    #[test]
    fn rank_deficient_rows_are_rejected() {
        let rows = vec![bits("1100"), bits("1100")];
        assert!(BinaryCode::from_rows(4, rows, 0).is_err());
        assert_eq!(gf2_rank(&[bits("1100"), bits("0110"), bits("1010")]), 2);
    }

    #[test]
    fn fingerprint_overlap_examples() {
        // two codewords at distance m/2, then distance 6 at m = 16
        let code = BinaryCode::from_rows(16, vec![bits("1111111100000000"), bits("1111110000000000")], 0).unwrap();
        let cb = fingerprint_states(code).unwrap();
        assert_eq!(cb.overlap(0, 2).unwrap(), 0.0);
        assert_eq!(cb.overlap(1, 1).unwrap(), 1.0);
        let direct = inner(&cb.state(0).unwrap(), &cb.state(1).unwrap()).unwrap();
        assert!((direct.re - 0.25).abs() < 1e-15);
        assert_eq!(cb.overlap(0, 1).unwrap(), 0.25);
    }

    #[test]
    fn orthogonal_family_certifies_to_zero() {
        // Hadamard-like rows: every nonzero codeword has weight m/2
        let code = BinaryCode::from_rows(4, vec![bits("1100"), bits("1010")], 0).unwrap();
        assert_eq!(verify_epsilon(&fingerprint_states(code).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn single_state_codebook_has_zero_epsilon() {
        let code = BinaryCode::from_rows(8, vec![], 0).unwrap();
        let cb = fingerprint_states(code).unwrap();
        assert_eq!(cb.size(), 1);
        assert_eq!(verify_epsilon(&cb).unwrap(), 0.0);
        assert_eq!(capacity(&cb), 0);
    }

    #[test]
    fn weight_span_six_to_ten_gives_quarter() {
        // max |1 - 2w/16| over w in 6..=10
        let oracle = (6..=10).map(|w| (1.0 - 2.0 * w as f64 / 16.0f64).abs()).fold(0.0, f64::max);
        assert_eq!(oracle, 0.25);
        let code = (0..10_000u64)
            .map(|seed| generate_code(4, 16, seed).unwrap())
            .find(|c| {
                let w = c.nonzero_weights();
                w.iter().all(|w| (6..=10).contains(w)) && w.iter().any(|&w| w == 6 || w == 10)
            })
            .expect("some seed yields weights spanning [6, 10]");
        assert_eq!(verify_epsilon(&fingerprint_states(code).unwrap()).unwrap(), oracle);
    }

    #[test]
    fn certified_search_examples() {
        let cb = generate_certified_codebook(2, 0.0, 1, 5).unwrap();
        assert_eq!(cb.epsilon_certified(), 0.0);
        assert_eq!(cb.code().codeword(1).weight(), 1);

        let first = generate_certified_codebook(24, 1.0, 3, 17).unwrap();
        assert_eq!(first.provenance().attempts, 1);

        let cb = generate_certified_codebook(32, 0.5, 6, 1).unwrap();
        assert!(cb.epsilon_certified() <= 0.5);
        assert_eq!(capacity(&cb), 6);
        assert!(verify_epsilon(&cb).unwrap() <= 0.5);
    }

    #[test]
    fn infeasible_targets_report_best_epsilon() {
        match generate_certified_codebook_with_cap(8, 0.01, 5, 0, 20) {
            Err(Error::Infeasible { best_epsilon, attempts, .. }) => {
                assert_eq!(attempts, 20);
                assert!(best_epsilon > 0.01 && best_epsilon <= 1.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn certification_refuses_large_codes() {
        let code = generate_code(17, 64, 1).unwrap();
        assert!(matches!(fingerprint_states(code), Err(Error::Refused(_))));
    }

    #[test]
    fn hex_rows() {
        assert_eq!(bits("01").to_hex(), "1");
        assert_eq!(bits("10").to_hex(), "2");
        assert_eq!(bits("100000001").to_hex(), "101");
        assert_eq!(BitRow::from_hex("101", 9).unwrap(), bits("100000001"));
        assert!(BitRow::from_hex("301", 9).is_err());
        assert!(BitRow::from_hex("1g", 8).is_err());
        assert!(BitRow::from_hex("1", 8).is_err());
    }

    #[test]
    fn documents_reload_and_detect_tampering() {
        let cb = generate_certified_codebook(32, 0.5, 6, 1).unwrap();
        let json = cb.to_json().unwrap();
        let back = Codebook::from_json(&json).unwrap();
        assert_eq!(back.id(), cb.id());
        assert_eq!(back.to_json().unwrap(), json);

        let mut doc = cb.to_document();
        let row = &mut doc.generator[2];
        let flipped = if row.starts_with('0') { "1" } else { "0" };
        row.replace_range(0..1, flipped);
        assert!(matches!(Codebook::from_document(&doc), Err(Error::CertificationMismatch(_))));

        let mut doc = cb.to_document();
        doc.epsilon_certified = 0.1;
        assert!(matches!(Codebook::from_document(&doc), Err(Error::CertificationMismatch(_))));
    }
}
