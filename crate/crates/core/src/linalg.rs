//! Dense complex linear algebra at desk scale.
//!
//! Kets, Hermitian operators and density matrices, plus the spectral and
//! entropy functionals every bound check in the crate reduces to. All
//! values are immutable once built and all operations are pure.
//!
//! Numerical contracts are fixed globally: states and Hermitian operators
//! are validated to [`CONSTRUCTION_TOL`] when they are built, and spectral
//! post-conditions hold to [`SPECTRAL_TOL`] relative to the operator norm.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for normalization, hermiticity and trace checks.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for eigen-residuals and eigenvector orthonormality.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Largest Hilbert-space dimension any product is allowed to reach.
pub const MAX_DIM: usize = 1 << 22;

/// Residual checks on full eigendecompositions are skipped above this size
/// (they cost a dense matrix product).
const RESIDUAL_CHECK_MAX_DIM: usize = 512;

/// A unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Builds a ket from amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("ket must have dimension >= 1".into()));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidState(format!(
                "ket norm^2 = {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales a raw vector to unit norm.
    pub fn normalize(raw: Vec<C64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidState("ket must have dimension >= 1".into()));
        }
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < f64::MIN_POSITIVE || !norm.is_finite() {
            return Err(Error::InvalidState(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Ok(Self {
            amps: raw.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 || k >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.amps.iter().all(|a| a.im == 0.0)
    }

    /// Multiplies by a global phase so the first non-negligible amplitude is
    /// real and positive.
    pub fn with_canonical_phase(mut self) -> Self {
        canonicalize_phase(&mut self.amps);
        self
    }
}

fn canonicalize_phase(amps: &mut [C64]) {
    if let Some(lead) = amps.iter().copied().find(|a| a.norm() > 1e-12) {
        let phase = lead.conj() / lead.norm();
        for a in amps.iter_mut() {
            *a *= phase;
        }
        // strip the rounding residue on the leading component
        if let Some(first) = amps.iter_mut().find(|a| a.norm() > 1e-12) {
            first.im = 0.0;
        }
    }
}

/// Sesquilinear inner product, conjugate-linear in `u`.
pub fn inner(u: &Ket, v: &Ket) -> Result<C64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum())
}

/// Rank-one projector `|v><v|`.
pub fn projector(v: &Ket) -> HermitianOp {
    let n = v.dim();
    if v.is_real() {
        let m = Mat::<f64>::from_fn(n, n, |i, j| v.amps[i].re * v.amps[j].re);
        HermitianOp::from_storage(Storage::Real(m))
    } else {
        let m = Mat::<C64>::from_fn(n, n, |i, j| v.amps[i] * v.amps[j].conj());
        HermitianOp::from_storage(Storage::Complex(m))
    }
}

/// Tensor product `a ⊗ b`; the index of `a` is the slow index.
pub fn tensor(a: &Ket, b: &Ket) -> Result<Ket> {
    let dim = product_dim(a.dim(), b.dim())?;
    let mut amps = Vec::with_capacity(dim);
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    Ok(Ket { amps })
}

/// Operator tensor product `a ⊗ b`, same index convention as [`tensor`].
pub fn tensor_op(a: &HermitianOp, b: &HermitianOp) -> Result<HermitianOp> {
    let (na, nb) = (a.dim(), b.dim());
    let n = product_dim(na, nb)?;
    let storage = match (&a.storage, &b.storage) {
        (Storage::Real(x), Storage::Real(y)) => Storage::Real(Mat::from_fn(n, n, |i, j| {
            x[(i / nb, j / nb)] * y[(i % nb, j % nb)]
        })),
        _ => Storage::Complex(Mat::from_fn(n, n, |i, j| {
            a.entry(i / nb, j / nb) * b.entry(i % nb, j % nb)
        })),
    };
    Ok(HermitianOp::from_storage(storage))
}

pub fn product_dim(a: usize, b: usize) -> Result<usize> {
    match a.checked_mul(b) {
        Some(d) if d <= MAX_DIM => Ok(d),
        _ => Err(Error::Refused(format!(
            "tensor product dimension {a}x{b} exceeds the limit {MAX_DIM}"
        ))),
    }
}

pub fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Storage {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

/// A Hermitian matrix. Kept in real storage when every entry is real so that
/// large real-symmetric spectra take the cheaper solver path.
#[derive(Clone, Debug)]
pub struct HermitianOp {
    storage: Storage,
}

impl HermitianOp {
    fn from_storage(storage: Storage) -> Self {
        Self { storage }
    }

    /// Builds an operator entry by entry, validating hermiticity.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        let m = Mat::<C64>::from_fn(dim, dim, f);
        Self::from_complex_mat(m)
    }

    /// Builds a real symmetric operator entry by entry.
    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        Self::from_real_mat(Mat::<f64>::from_fn(dim, dim, f))
    }

    pub fn from_real_mat(m: Mat<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..i {
                let d = (m[(i, j)] - m[(j, i)]).abs();
                if d > CONSTRUCTION_TOL {
                    return Err(Error::InvalidState(format!(
                        "not symmetric at ({i}, {j}): deviation {d}"
                    )));
                }
            }
        }
        Ok(Self::from_storage(Storage::Real(m)))
    }

    pub fn from_complex_mat(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut real = true;
        for i in 0..n {
            for j in 0..=i {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > CONSTRUCTION_TOL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({i}, {j}): deviation {d}"
                    )));
                }
                real &= m[(i, j)].im == 0.0 && m[(j, i)].im == 0.0;
            }
        }
        if real {
            let r = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
            return Ok(Self::from_storage(Storage::Real(r)));
        }
        Ok(Self::from_storage(Storage::Complex(m)))
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::from_real_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_real_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Real(m) => m.nrows(),
            Storage::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.storage, Storage::Real(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Real(m) => C64::new(m[(i, j)], 0.0),
            Storage::Complex(m) => m[(i, j)],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i).re).sum()
    }

    /// Frobenius norm, used as the scale for spectral tolerances.
    pub fn norm(&self) -> f64 {
        match &self.storage {
            Storage::Real(m) => m.norm_l2(),
            Storage::Complex(m) => m.norm_l2(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                best = best.max(self.entry(i, j).norm());
            }
        }
        best
    }

    pub fn add(&self, other: &HermitianOp) -> Result<HermitianOp> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &HermitianOp) -> Result<HermitianOp> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &HermitianOp, sign: f64) -> Result<HermitianOp> {
        check_dims(self.dim(), other.dim())?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Real(a), Storage::Real(b)) => {
                Storage::Real(Mat::from_fn(a.nrows(), a.nrows(), |i, j| {
                    a[(i, j)] + sign * b[(i, j)]
                }))
            }
            _ => {
                let n = self.dim();
                Storage::Complex(Mat::from_fn(n, n, |i, j| {
                    self.entry(i, j) + other.entry(i, j) * sign
                }))
            }
        };
        Ok(HermitianOp::from_storage(storage))
    }

    /// Multiplies by a real scalar (keeps hermiticity).
    pub fn scale(&self, s: f64) -> HermitianOp {
        let storage = match &self.storage {
            Storage::Real(a) => Storage::Real(Mat::from_fn(a.nrows(), a.nrows(), |i, j| {
                a[(i, j)] * s
            })),
            Storage::Complex(a) => Storage::Complex(Mat::from_fn(a.nrows(), a.nrows(), |i, j| {
                a[(i, j)] * s
            })),
        };
        HermitianOp::from_storage(storage)
    }

    /// `H |v>` as raw amplitudes.
    pub fn apply(&self, v: &Ket) -> Result<Vec<C64>> {
        check_dims(self.dim(), v.dim())?;
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, vj) in v.amps.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.entry(i, j) * vj;
            }
        }
        Ok(out)
    }

    /// Expectation value `<v|H|v>` (real for Hermitian `H`).
    pub fn expectation(&self, v: &Ket) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(v.amps.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// `max |(H·H − H)_ij|`; zero for an exact projector.
    pub fn idempotence_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        match &self.storage {
            Storage::Real(a) => {
                let sq = a * a;
                for j in 0..n {
                    for i in 0..n {
                        worst = worst.max((sq[(i, j)] - a[(i, j)]).abs());
                    }
                }
            }
            Storage::Complex(a) => {
                let sq = a * a;
                for j in 0..n {
                    for i in 0..n {
                        worst = worst.max((sq[(i, j)] - a[(i, j)]).norm());
                    }
                }
            }
        }
        worst
    }

    /// Largest entrywise distance to another operator.
    pub fn max_abs_diff(&self, other: &HermitianOp) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.entry(i, j) - other.entry(i, j)).norm());
            }
        }
        Ok(worst)
    }
}

/// Spectrum and orthonormal eigenvectors of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl EigenDecomposition {
    pub fn max(&self) -> (f64, &Ket) {
        let last = self.values.len() - 1;
        (self.values[last], &self.vectors[last])
    }
}

/// Full eigendecomposition with ascending eigenvalues. Each eigenvector is
/// rotated so its first non-negligible component is real and positive.
pub fn eig_hermitian(h: &HermitianOp) -> Result<EigenDecomposition> {
    let n = h.dim();
    let (values, vectors) = match &h.storage {
        Storage::Real(m) => {
            let evd = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Numerical(format!("eigensolver did not converge ({e:?}) at dim {n}")))?;
            let s = evd.S().column_vector();
            let u = evd.U();
            let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
            let vectors: Vec<Vec<C64>> = (0..n)
                .map(|k| (0..n).map(|i| C64::new(u[(i, k)], 0.0)).collect())
                .collect();
            (values, vectors)
        }
        Storage::Complex(m) => {
            let evd = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Numerical(format!("eigensolver did not converge ({e:?}) at dim {n}")))?;
            let s = evd.S().column_vector();
            let u = evd.U();
            let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
            let vectors: Vec<Vec<C64>> = (0..n)
                .map(|k| (0..n).map(|i| u[(i, k)]).collect())
                .collect();
            (values, vectors)
        }
    };

    let vectors: Vec<Ket> = vectors
        .into_iter()
        .map(|mut amps| {
            canonicalize_phase(&mut amps);
            Ket { amps }
        })
        .collect();

    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite eigenvalue at dim {n}")));
    }
    if n <= RESIDUAL_CHECK_MAX_DIM {
        let scale = h.norm().max(1.0);
        for (k, (lambda, v)) in values.iter().zip(&vectors).enumerate() {
            let hv = h.apply(v)?;
            let residual = hv
                .iter()
                .zip(v.amps())
                .map(|(a, b)| (a - b * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if residual > SPECTRAL_TOL * scale {
                return Err(Error::Numerical(format!(
                    "eigenpair {k} residual {residual:e} exceeds tolerance at dim {n}"
                )));
            }
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_hermitian(h: &HermitianOp) -> Result<Vec<f64>> {
    let n = h.dim();
    let values = match &h.storage {
        Storage::Real(m) => m.self_adjoint_eigenvalues(Side::Lower),
        Storage::Complex(m) => m
            .self_adjoint_eigenvalues(Side::Lower)
            .map(|v| v.into_iter().collect()),
    }
    .map_err(|e| Error::Numerical(format!("eigensolver did not converge ({e:?}) at dim {n}")))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite eigenvalue at dim {n}")));
    }
    Ok(values)
}

/// Largest eigenvalue.
pub fn lambda_max(h: &HermitianOp) -> Result<f64> {
    let values = eigenvalues_hermitian(h)?;
    Ok(values[values.len() - 1])
}

/// A Hermitian operator with unit trace and non-negative spectrum. The
/// spectrum is computed once at construction and reused by entropy queries.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: HermitianOp,
    spectrum: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(op: HermitianOp) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {trace}, expected 1")));
        }
        let spectrum = eigenvalues_hermitian(&op)?;
        if spectrum[0] < -CONSTRUCTION_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {}",
                spectrum[0]
            )));
        }
        Ok(Self { op, spectrum })
    }

    /// `|v><v|`; the spectrum is known exactly.
    pub fn pure(v: &Ket) -> Self {
        let n = v.dim();
        let mut spectrum = vec![0.0; n];
        spectrum[n - 1] = 1.0;
        Self {
            op: projector(v),
            spectrum,
        }
    }

    /// Convex mixture `Σ p_k |v_k><v_k|`.
    pub fn mixture(weights: &[f64], states: &[Ket]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput("mixture weights must be non-negative".into()));
        }
        let mut acc = projector(&states[0]).scale(weights[0]);
        for (w, s) in weights.iter().zip(states).skip(1) {
            acc = acc.add(&projector(s).scale(*w))?;
        }
        Self::new(acc)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let op = HermitianOp::identity(dim)?.scale(1.0 / dim as f64);
        Ok(Self {
            op,
            spectrum: vec![1.0 / dim as f64; dim],
        })
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Acceptance probability `<v|ρ|v>` of a projective test onto `v`.
    pub fn overlap_probability(&self, v: &Ket) -> Result<f64> {
        Ok(self.op.expectation(v)?.clamp(0.0, 1.0))
    }
}

/// Ginibre-distributed random density matrix `A A† / Tr(A A†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let a: Vec<C64> = (0..dim * dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut m = Mat::<C64>::from_fn(dim, dim, |i, j| {
        (0..dim).map(|k| a[i * dim + k] * a[j * dim + k].conj()).sum()
    });
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] /= tr;
        }
    }
    // enforce exact hermiticity after rounding
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in 0..i {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::new(HermitianOp::from_complex_mat(m)?)
}

/// Haar-random pure state.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Ket> {
    Ket::normalize(
        (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    )
}

/// Shannon entropy in bits of a spectrum. Eigenvalues in `[-1e-10, 0]` are
/// clamped to zero; anything below `-1e-8` is rejected.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lambda in spectrum {
        if lambda < -SPECTRAL_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {lambda} is negative beyond tolerance"
            )));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy `-Tr ρ log2 ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(rho.spectrum())
}

/// Binary entropy `h2(p)` in bits; `h2(0) = h2(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || p.is_nan() {
        return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
    }
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn psi1(theta: f64) -> Ket {
        Ket::from_real(&[theta.sin(), theta.cos()]).unwrap()
    }

    #[test]
    fn inner_basis_and_qubit_states() {
        let e0 = Ket::basis(2, 0).unwrap();
        let e1 = Ket::basis(2, 1).unwrap();
        assert_eq!(inner(&e0, &e0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(inner(&e0, &e1).unwrap(), C64::new(0.0, 0.0));
        let ov = inner(&e0, &psi1(0.3)).unwrap();
        assert!((ov.re - 0.29552020666133955).abs() < 1e-14);
        assert_eq!(ov.im, 0.0);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let a = Ket::basis(2, 0).unwrap();
        let b = Ket::basis(3, 0).unwrap();
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let u = Ket::normalize(vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)]).unwrap();
        let v = Ket::normalize(vec![C64::new(0.5, -1.0), C64::new(3.0, 0.0)]).unwrap();
        let uv = inner(&u, &v).unwrap();
        let vu = inner(&v, &u).unwrap();
        assert_eq!(uv, vu.conj());
    }

    #[test]
    fn ket_construction_checks_norm() {
        assert!(Ket::from_real(&[1.0, 1.0]).is_err());
        assert!(Ket::new(vec![]).is_err());
        assert!(Ket::normalize(vec![C64::new(0.0, 0.0)]).is_err());
        let k = Ket::normalize(vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((k.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_examples() {
        let p = projector(&Ket::basis(2, 0).unwrap());
        assert_eq!(p.entry(0, 0).re, 1.0);
        assert_eq!(p.entry(1, 1).re, 0.0);
        assert_eq!(p.entry(0, 1).norm(), 0.0);
        let p1 = projector(&psi1(0.3));
        assert!((p1.entry(0, 0).re - 0.08733219254516084).abs() < 1e-14);
        assert!(p1.idempotence_defect() < 1e-12);
        assert!((p1.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_examples() {
        let e0 = Ket::basis(2, 0).unwrap();
        let t = tensor(&e0, &e0).unwrap();
        assert_eq!(t, Ket::basis(4, 0).unwrap());
        let t = tensor(&e0, &psi1(0.3)).unwrap();
        assert!((t.amps()[1].re - 0.955336489125606).abs() < 1e-14);
        assert!((t.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_refuses_oversized_products() {
        assert!(matches!(product_dim(1 << 12, 1 << 10), Ok(_)));
        assert!(matches!(product_dim(1 << 12, 1 << 11), Err(Error::Refused(_))));
        assert!(matches!(product_dim(usize::MAX, 2), Err(Error::Refused(_))));
    }

    #[test]
    fn hermiticity_is_validated() {
        let bad = HermitianOp::from_fn(2, |i, j| if i < j { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) });
        assert!(matches!(bad, Err(Error::InvalidState(_))));
        let good = HermitianOp::from_fn(2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, 1.0),
            (1, 0) => C64::new(0.0, -1.0),
            _ => C64::new(1.0, 0.0),
        })
        .unwrap();
        assert!(!good.is_real());
    }

    #[test]
    fn eig_examples() {
        let e = eig_hermitian(&HermitianOp::diag(&[1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0]);
        let id = eigenvalues_hermitian(&HermitianOp::identity(5).unwrap()).unwrap();
        assert!(id.iter().all(|v| (v - 1.0).abs() < 1e-14));

        let theta: f64 = 0.2;
        let q = projector(&Ket::basis(2, 0).unwrap()).add(&projector(&psi1(theta))).unwrap();
        let lmax = lambda_max(&q).unwrap();
        assert!((lmax - 1.1986693307950613).abs() < 1e-12);
        // closed-form 2x2 Hermitian eigenvalue as an independent check
        let (a, b, d) = (q.entry(0, 0).re, q.entry(0, 1), q.entry(1, 1).re);
        let brute = 0.5 * (a + d) + (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        assert!((lmax - brute).abs() < 1e-12);
    }

    #[test]
    fn eig_phase_convention_makes_leading_component_positive() {
        let h = HermitianOp::from_fn(2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, 1.0),
            (1, 0) => C64::new(0.0, -1.0),
            _ => C64::new(0.0, 0.0),
        })
        .unwrap();
        let e = eig_hermitian(&h).unwrap();
        for v in &e.vectors {
            let lead = v.amps()[0];
            assert!(lead.re > 0.0);
            assert_eq!(lead.im, 0.0);
        }
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::pure(&psi1(0.7));
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);

        let theta: f64 = 0.2;
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[Ket::basis(2, 0).unwrap(), psi1(theta)]).unwrap();
        let expected = binary_entropy((1.0 + theta.sin()) / 2.0).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.9713384599971185).abs() < 1e-13);
    }

    #[test]
    fn entropy_clamps_tiny_negatives_and_rejects_large_ones() {
        assert_eq!(entropy_of_spectrum(&[-5e-11, 1.0]).unwrap(), 0.0);
        assert!(matches!(entropy_of_spectrum(&[-1e-7, 1.0]), Err(Error::InvalidState(_))));
    }

    #[test]
    fn density_matrix_rejects_bad_trace_and_negative_spectrum() {
        assert!(DensityMatrix::new(HermitianOp::diag(&[0.5, 0.6]).unwrap()).is_err());
        assert!(DensityMatrix::new(HermitianOp::diag(&[1.5, -0.5]).unwrap()).is_err());
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.0 + 1e-13).is_ok());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn random_density_matrices_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..6 {
            let rho = random_density_matrix(dim, &mut rng).unwrap();
            assert!((rho.op().trace() - 1.0).abs() < 1e-12);
            assert!(rho.spectrum()[0] >= -1e-12);
        }
    }
}
