use proptest::prelude::*;
use specrank::descriptors::{circular_difference, correspondence_difference};
use specrank::*;

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

fn even_signal() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=128).prop_flat_map(|half| prop::collection::vec(-10.0f64..10.0, 2 * half))
}

fn permutation(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (2usize..=max_n).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else { return false };
    let j = a.iter().rposition(|&x| x > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn naive_dft_is_conjugate_symmetric(xs in even_signal()) {
        let s = Signal::new(xs).unwrap();
        let out = dft_naive(&s).unwrap();
        let len = out.len();
        for k in 1..len / 2 {
            let a = out[len - k];
            let b = out[k].conj();
            prop_assert!((a.re - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
        }
    }

    #[test]
    fn fast_spectrum_matches_naive(xs in even_signal()) {
        let s = Signal::new(xs).unwrap();
        let fast = power_spectrum(&s).unwrap();
        let naive: Vec<f64> = dft_naive(&s).unwrap()[..s.len() / 2].iter().map(|c| c.norm_sqr()).collect();
        let scale = naive.iter().cloned().fold(0.0, f64::max);
        for (a, b) in fast.values().iter().zip(&naive) {
            prop_assert!(rel_close(*a, *b, scale, 1e-9), "{a} vs {b}");
        }
    }

    #[test]
    fn parseval_over_full_transform(xs in even_signal()) {
        let s = Signal::new(xs.clone()).unwrap();
        let lhs: f64 = dft(&s).unwrap().iter().map(|c| c.norm_sqr()).sum();
        let rhs = xs.len() as f64 * xs.iter().map(|x| x * x).sum::<f64>();
        prop_assert!(rel_close(lhs, rhs, rhs, 1e-9));
    }

    #[test]
    fn entropy_ignores_order_and_scale(
        (values, shuffled) in prop::collection::vec(0.0f64..5.0, 2..200)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        alpha in 1e-3f64..1e3,
    ) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let h = spectral_entropy(&PowerSpectrum::new(values.clone()).unwrap()).unwrap();
        let h_perm = spectral_entropy(&PowerSpectrum::new(shuffled).unwrap()).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * alpha).collect();
        let h_scaled = spectral_entropy(&PowerSpectrum::new(scaled).unwrap()).unwrap();
        prop_assert!((h - h_perm).abs() < 1e-12);
        prop_assert!((h - h_scaled).abs() < 1e-12);
        prop_assert!(h >= 0.0 && h <= (values.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn rank_permutations_are_mutually_inverse(values in prop::collection::vec(0.0f64..1.0, 2..1024)) {
        let spec = PowerSpectrum::new(values.clone()).unwrap();
        let p = rank_spectrum(&spec).unwrap();
        for k in 0..p.n() {
            prop_assert_eq!(p.grid_of_rank()[p.rank_of_grid()[k]], k);
            prop_assert_eq!(p.rank_of_grid()[p.grid_of_rank()[k]], k);
        }
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert_eq!(values[p.grid_of_rank()[0]], max);
        for w in p.grid_of_rank().windows(2) {
            prop_assert!(values[w[0]] > values[w[1]] || (values[w[0]] == values[w[1]] && w[0] < w[1]));
        }
    }

    #[test]
    fn truncation_length_grows_with_q(values in prop::collection::vec(0.0f64..1.0, 2..300)) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let spec = PowerSpectrum::new(values).unwrap();
        let p = rank_spectrum(&spec).unwrap();
        let mut last = 0;
        for i in 1..=100 {
            let l = truncate_by_energy(&spec, &p, i as f64 / 100.0).unwrap().length;
            prop_assert!(l >= last && (1..=spec.len()).contains(&l));
            last = l;
        }
    }

    #[test]
    fn circular_difference_survives_reversal(g in permutation(300)) {
        let p = RankPermutation::from_grid_of_rank(g).unwrap();
        let n = p.n();
        prop_assert_eq!(
            circular_difference::<f64>(&p, n).unwrap(),
            circular_difference::<f64>(&p.reversed(), n).unwrap()
        );
    }

    #[test]
    fn distance_matrix_is_consistent(g in permutation(96)) {
        let p = RankPermutation::from_grid_of_rank(g).unwrap();
        let m = distance_matrix(&p);
        let n = p.n();
        prop_assert_eq!(m.trace(), 0);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                prop_assert!(m.get(i, j) < n);
            }
        }
        let direct = circular_difference::<f64>(&p, n).unwrap();
        prop_assert!((m.circular_difference::<f64>() - direct).abs() <= 1e-12);
        let e = distance_matrix_eigenvalues::<f64>(&m).unwrap();
        prop_assert!(e.partial_sums[n - 1].abs() <= 1e-8 * n as f64);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn identity_minimizes_both_descriptors_exhaustively() {
    for n in 2..=8usize {
        let floor = 2.0 * (n as f64 - 1.0) / n as f64;
        let mut g: Vec<usize> = (0..n).collect();
        loop {
            let p = RankPermutation::from_grid_of_rank(g.clone()).unwrap();
            let cid = circular_difference::<f64>(&p, n).unwrap();
            let cod = correspondence_difference::<f64>(&p, n).unwrap();
            assert!(cid >= floor, "n={n} {g:?}");
            let identity = g.iter().enumerate().all(|(i, &k)| i == k);
            assert_eq!(cod == 0.0, identity, "n={n} {g:?}");
            if !next_permutation(&mut g) {
                break;
            }
        }
        let id = RankPermutation::identity(n);
        assert_eq!(circular_difference::<f64>(&id, n).unwrap(), floor);
        assert_eq!(circular_difference::<f64>(&id.reversed(), n).unwrap(), floor);
    }
}

#[test]
fn shuffled_spectra_share_entropy_but_not_descriptors() {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for n in 3..40usize {
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let base = PowerSpectrum::new(values.clone()).unwrap();
        let h = spectral_entropy(&base).unwrap();
        let d = analyze_spectrum(&base, &AnalysisOptions::untruncated()).unwrap();
        let mut changed = false;
        for _ in 0..20 {
            let mut v = values.clone();
            v.shuffle(&mut rng);
            let s = PowerSpectrum::new(v).unwrap();
            assert!((spectral_entropy(&s).unwrap() - h).abs() < 1e-12);
            let e = analyze_spectrum(&s, &AnalysisOptions::untruncated()).unwrap();
            changed |= e.cid != d.cid || e.cod != d.cod;
        }
        assert!(changed, "n={n}");
    }
}

#[test]
fn null_formulas_hold_under_enumeration() {
    // E[cod] = (n^2 - 1) / (3n); E[cid] = (n + 1) / 3 for n >= 3
    for n in 3..=8usize {
        let nf = n as f64;
        let cod = enumerate_null_exact::<f64>(n, OrdinalDescriptor::Cod).unwrap();
        let cid = enumerate_null_exact::<f64>(n, OrdinalDescriptor::Cid).unwrap();
        assert!((cod.mean - (nf * nf - 1.0) / (3.0 * nf)).abs() < 1e-12, "n={n}");
        assert!((cid.mean - (nf + 1.0) / 3.0).abs() < 1e-12, "n={n}");
        assert_eq!(cod.trials, (1..=n as u64).product::<u64>());
        assert_eq!(cod.histogram.counts.iter().sum::<u64>(), cod.trials);
    }
}

#[test]
fn single_precision_pipeline() {
    let xs: Vec<f32> = (0..64).map(|i| ((i as f32) * 0.3).sin() + 0.05 * (i as f32 * 2.1).cos()).collect();
    let s32 = Signal32::new(xs.clone()).unwrap();
    let s64 = Signal64::new(xs.iter().map(|&x| x as f64).collect()).unwrap();
    let a = analyze(&s32, 1.0f32).unwrap();
    let b = analyze(&s64, 1.0f64).unwrap();
    assert_eq!(a.n, b.n);
    assert!((a.spectral_entropy as f64 - b.spectral_entropy).abs() < 1e-4);
}
