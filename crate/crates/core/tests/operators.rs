//! Tensor-operator shape audit and the coherent-state bound audit.

use num_complex::Complex64;
use polmulti::multipole::{coherent_cumulative_max, state_multipoles, tensor_operator};
use polmulti::states::random_pure;
use polmulti::stokes::stokes_matrices;
use polmulti::{CMatrix, HalfInt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hs(a: &CMatrix, b: &CMatrix) -> Complex64 {
    (a.adjoint() * b).trace()
}

/// |⟨a, b⟩| = ‖a‖ ‖b‖ (Cauchy-Schwarz equality) means parallel.
fn assert_parallel(a: &CMatrix, b: &CMatrix, label: &str) {
    let na = hs(a, a).re.sqrt();
    let nb = hs(b, b).re.sqrt();
    assert!(na > 1e-12 && nb > 1e-12, "{label}: zero operator");
    let overlap = hs(a, b).norm();
    assert!((overlap - na * nb).abs() < 1e-10 * na * nb, "{label}: not proportional");
}

fn t(spin: HalfInt, k: usize, q: i32) -> CMatrix {
    let op = tensor_operator(spin, k, q).unwrap();
    let norm = op.matrix().iter().map(|x| x * x).sum::<f64>();
    assert!((norm - 1.0).abs() < 1e-12, "T_{k}{q} not unit norm");
    op.to_complex()
}

#[test]
fn low_rank_operators_are_spin_polynomials() {
    for two_s in 1..=12 {
        let spin = HalfInt::from_twice(two_s);
        let st = stokes_matrices(spin);
        let d = spin.dim();
        let i = Complex64::i();
        let sp = &st.sx + &st.sy * i;
        let sm = &st.sx - &st.sy * i;
        let sz = st.sz.clone();
        let s = spin.value();

        // q > 0 raises m, as S_+ does.
        assert_parallel(&t(spin, 1, 0), &sz, "T10 ~ Sz");
        assert_parallel(&t(spin, 1, 1), &sp, "T11 ~ S+");
        assert_parallel(&t(spin, 1, -1), &sm, "T1-1 ~ S-");
        if two_s >= 2 {
            let quad = &sz * &sz * Complex64::from(3.0) - CMatrix::identity(d, d) * Complex64::from(s * (s + 1.0));
            assert_parallel(&t(spin, 2, 0), &quad, "T20 ~ 3Sz^2 - S(S+1)");
            assert_parallel(&t(spin, 2, 1), &(&sz * &sp + &sp * &sz), "T21 ~ {Sz, S+}");
            assert_parallel(&t(spin, 2, -1), &(&sz * &sm + &sm * &sz), "T2-1 ~ {Sz, S-}");
            assert_parallel(&t(spin, 2, 2), &(&sp * &sp), "T22 ~ S+^2");
            assert_parallel(&t(spin, 2, -2), &(&sm * &sm), "T2-2 ~ S-^2");
        }
    }
}

/// Falsification attempt: no random pure state should exceed the
/// coherent-state value of `A_K`.
#[test]
fn coherent_states_bound_random_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for two_s in 1..=25 {
        let spin = HalfInt::from_twice(two_s);
        let bounds: Vec<f64> = (1..=two_s as usize).map(|k| coherent_cumulative_max(spin, k).unwrap()).collect();
        let mut worst = vec![f64::NEG_INFINITY; two_s as usize];
        for _ in 0..10_000 {
            let sp = state_multipoles(&random_pure(spin, &mut rng));
            for (k, w) in worst.iter_mut().enumerate() {
                *w = w.max(sp.cumulative(k + 1).unwrap() - bounds[k]);
            }
        }
        for (k, w) in worst.iter().enumerate() {
            assert!(*w <= 1e-8, "2S={two_s} K={}: random pure state exceeds bound by {w}", k + 1);
        }
    }
}
