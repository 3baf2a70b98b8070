use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

use qbsc::codebook::{fingerprint_states, generate_certified_codebook, generate_code, overlap_from_distance, verify_epsilon};
use qbsc::linalg::{
    self, eig_hermitian, inner, projector, random_density_matrix, random_ket, tensor_op, von_neumann_entropy,
    DensityMatrix, HermitianOp, C64,
};
use qbsc::protocol1::{self, commit, encode_bit, verify_unveil, SecurityParams, VerifyMode};
use qbsc::protocol2::{self, CheatSet};
use qbsc::rng;

fn random_hermitian(dim: usize, seed: u64) -> HermitianOp {
    let mut s = rng::stream(seed);
    let raw: Vec<C64> = (0..dim * dim)
        .map(|_| C64::new(s.random_range(-1.0..1.0), s.random_range(-1.0..1.0)))
        .collect();
    HermitianOp::from_fn(dim, |i, j| {
        let (a, b) = (raw[i * dim + j], raw[j * dim + i]);
        if i == j {
            C64::new(a.re, 0.0)
        } else {
            (a + b.conj()) * 0.5
        }
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projectors_are_idempotent(dim in 1usize..16, rank in 1usize..16, seed in any::<u64>()) {
        let rank = rank.min(dim);
        let eig = eig_hermitian(&random_hermitian(dim, seed)).unwrap();
        let p = eig.vectors[..rank]
            .iter()
            .map(projector)
            .reduce(|a, b| a.add(&b).unwrap())
            .unwrap();
        prop_assert!(p.idempotence_defect() <= 1e-9);
        prop_assert!((p.trace() - rank as f64).abs() <= 1e-9);
    }

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..14, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let eig = eig_hermitian(&h).unwrap();
        let rebuilt = HermitianOp::from_fn(dim, |i, j| {
            eig.values
                .iter()
                .zip(&eig.vectors)
                .map(|(l, v)| v.amps()[i] * v.amps()[j].conj() * *l)
                .sum()
        })
        .unwrap();
        prop_assert!(rebuilt.max_abs_diff(&h).unwrap() <= 1e-8 * h.norm().max(1.0));
        for a in 0..dim {
            for b in 0..dim {
                let d = inner(&eig.vectors[a], &eig.vectors[b]).unwrap();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((d - C64::new(want, 0.0)).norm() <= 1e-8);
            }
        }
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_is_additive(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let mut s = rng::stream(seed);
        let rho = random_density_matrix(da, &mut s).unwrap();
        let sigma = random_density_matrix(db, &mut s).unwrap();
        let joint = DensityMatrix::new(tensor_op(rho.op(), sigma.op()).unwrap()).unwrap();
        let lhs = von_neumann_entropy(&joint).unwrap();
        let rhs = von_neumann_entropy(&rho).unwrap() + von_neumann_entropy(&sigma).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    #[test]
    fn inner_is_conjugate_symmetric(dim in 1usize..32, seed in any::<u64>()) {
        let mut s = rng::stream(seed);
        let u = random_ket(dim, &mut s).unwrap();
        let v = random_ket(dim, &mut s).unwrap();
        let (uv, vu) = (inner(&u, &v).unwrap(), inner(&v, &u).unwrap());
        prop_assert!((uv - vu.conj()).norm() <= 4.0 * f64::EPSILON * dim as f64);
    }

    #[test]
    fn fingerprint_overlap_matches_distance(k in 1usize..7, extra in 0usize..40, seed in any::<u64>()) {
        let m = k + extra;
        let cb = fingerprint_states(generate_code(k, m, seed).unwrap()).unwrap();
        let mut s = rng::stream(seed ^ 1);
        for _ in 0..16 {
            let (i, j) = (s.random_range(0..cb.size()), s.random_range(0..cb.size()));
            let direct = inner(&cb.state(i).unwrap(), &cb.state(j).unwrap()).unwrap();
            let d = cb.code().codeword(i).distance(&cb.code().codeword(j));
            prop_assert!((direct.re - overlap_from_distance(d, m)).abs() <= 1e-12);
            prop_assert!(direct.im.abs() <= 1e-12);
        }
    }

    #[test]
    fn certification_is_sound_and_reproducible(k in 1usize..6, seed in any::<u64>()) {
        let target = 0.6;
        if let Ok(cb) = generate_certified_codebook(32, target, k, seed) {
            prop_assert!(verify_epsilon(&cb).unwrap() <= target);
            let again = generate_certified_codebook(32, target, k, seed).unwrap();
            prop_assert_eq!(cb.id(), again.id());
            prop_assert_eq!(cb.to_json().unwrap(), again.to_json().unwrap());
        }
    }

    #[test]
    fn honest_unveil_is_accepted(bits in prop::collection::vec(any::<bool>(), 1..16), theta in 0.01f64..1.56) {
        let params = SecurityParams::new(theta, bits.len(), 1).unwrap();
        let p = verify_unveil(&commit(&bits, params).unwrap(), &bits, VerifyMode::Exact).unwrap().probability;
        prop_assert!((p - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn single_qubit_binding(theta in 0.01f64..1.56, seed in any::<u64>()) {
        let rho = random_density_matrix(2, &mut rng::stream(seed)).unwrap();
        let total = rho.overlap_probability(&encode_bit(false, theta)).unwrap()
            + rho.overlap_probability(&encode_bit(true, theta)).unwrap();
        prop_assert!(total <= 1.0 + theta.sin() + 1e-9);
    }

    #[test]
    fn cheat_sets_respect_codebook_bound(seed in any::<u64>(), k in 3usize..7) {
        let cb = generate_certified_codebook(32, 0.5, k, seed % 64);
        prop_assume!(cb.is_ok());
        let cb = cb.unwrap();
        let mut s = rng::stream(seed);
        let r_max = CheatSet::max_size(cb.epsilon_certified(), cb.size());
        let r = s.random_range(1..=r_max);
        let set = CheatSet::new(index::sample(&mut s, cb.size(), r).into_vec(), &cb).unwrap();
        let q = protocol2::q_operator(&cb, &set).unwrap();
        let lambda = linalg::lambda_max(&q).unwrap();
        prop_assert!(lambda <= protocol2::binding_bound2(r, cb.epsilon_certified()).unwrap() + 1e-9);

        // any state, pure or mixed, collects at most λ_max(Q) over the set
        let rho = random_density_matrix(cb.dim(), &mut s).unwrap();
        let collected: f64 = set.indices().iter().map(|&i| rho.overlap_probability(&cb.state(i).unwrap()).unwrap()).sum();
        prop_assert!(collected <= lambda + 1e-9);

        // the expansion quotient never exceeds the top eigenvalue
        let gram = protocol2::cheat_gram(&cb, &set).unwrap();
        let w = random_ket(r, &mut s).unwrap();
        let terms = protocol2::s2_s3_terms(w.amps(), &gram).unwrap();
        prop_assert!(terms.rayleigh <= lambda + 1e-9);
    }

    #[test]
    fn equality_configuration_saturates(r in 1usize..=64, frac in 0.0f64..=1.0) {
        let eps = if r == 1 { frac * 0.9 } else { frac * 0.9 / (r - 1) as f64 };
        let states = protocol2::equality_configuration(r, eps).unwrap();
        let lambda = linalg::lambda_max(&protocol2::gram_of(&states).unwrap()).unwrap();
        prop_assert!((lambda - (1.0 + (r - 1) as f64 * eps)).abs() <= 1e-9);
    }

    #[test]
    fn code_ensemble_entropy_is_capped(k in 1usize..9, extra in 0usize..60, seed in any::<u64>()) {
        let m = (k + extra).max(1);
        let cb = fingerprint_states(generate_code(k, m, seed).unwrap()).unwrap();
        let s = protocol2::code_ensemble_entropy(&cb).unwrap();
        let cap = (m as f64).log2();
        prop_assert!(s <= cap + 1e-9);
        if cb.size() < cb.dim() {
            prop_assert!(s < cap - 1e-9);
        }
    }
}

#[test]
fn holevo_bound_decreases_in_theta() {
    for n in [1usize, 5, 40] {
        let values: Vec<f64> = (1..200)
            .map(|j| protocol1::holevo_bound_p1(n, std::f64::consts::FRAC_PI_2 * j as f64 / 200.0))
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn holevo_consistency_small_n() {
    for theta in [0.05, 0.7, 1.3] {
        for n in 1..=9 {
            let brute = protocol1::holevo_brute_force(n, theta).unwrap();
            assert!((brute - protocol1::holevo_bound_p1(n, theta)).abs() <= 1e-8);
        }
    }
}
