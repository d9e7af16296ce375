//! Derived expected values checked against independent oracles: quadrature
//! for the Q function, exhaustive enumeration for constellation expansion,
//! index formulas for tensor layout, a full Jacobi eigensolver for the power
//! method, and exhaustive maximum likelihood for the Viterbi decoder.

mod common;

use common::*;
use kronrod::baselines::{conv_encode, psk_hard_demod, psk_soft_demod, viterbi_decode_hard, viterbi_decode_soft, ConvCode};
use kronrod::channel::{draw_channel, transmit, ChannelModel, ChannelRealization};
use kronrod::codec::{modulate_branches, payload_bits_per_block, KronConfig};
use kronrod::constellation::{kron_expand, make_psk, q_function, scheme1_sets, set_error_prob};
use kronrod::detector::{detect, tpmd_branch, TpmdSettings};
use kronrod::rng::SimRng;
use kronrod::tensor::{kron_vec, mode_gramian, outer_rank_one, tensorize, unfold, vectorize, ComplexMatrix};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn q_function_matches_quadrature() {
    // Frozen spot value first: Q(1) from the quadrature oracle.
    let q1 = q_numeric(1.0);
    assert!((q1 - 0.158655).abs() < 1e-6);
    assert!((q_function(1.0) - q1).abs() < 1e-12);
    for x in [-4.0, -2.5, -1.0, -0.3, 0.0, 0.2, 0.7, 1.5, 2.8, 4.5] {
        assert!(
            (q_function(x) - q_numeric(x)).abs() < 1e-10,
            "Q({x}) mismatch"
        );
    }
}

#[test]
fn set_error_prob_matches_formula_route() {
    // Q(1) again via the noise form: antipodal binary set at n0 = 2.
    let bpsk = make_psk(2, 0.0).unwrap();
    let p = set_error_prob(&bpsk, 2.0).unwrap();
    assert!((p - q_numeric(1.0)).abs() < 1e-10);
}

#[test]
fn kron_expansion_equals_exhaustive_product_enumeration() {
    for m in [2usize, 4, 8, 16] {
        let sets = scheme1_sets(m).unwrap();
        // Oracle: enumerate every product sum of phases directly.
        let mut phases = vec![0.0f64];
        for set in &sets {
            let mut next = Vec::new();
            for &p in &phases {
                for point in set.points() {
                    next.push(p + point.arg());
                }
            }
            phases = next;
        }
        let tau = 2.0 * std::f64::consts::PI;
        let mut wrapped: Vec<f64> = phases.iter().map(|p| p.rem_euclid(tau)).collect();
        wrapped.sort_by(|a, b| a.partial_cmp(b).unwrap());
        wrapped.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let expanded = kron_expand(&sets).unwrap();
        assert_eq!(expanded.cardinality(), wrapped.len());
        assert_eq!(expanded.cardinality(), m);
        for (point, phase) in expanded.points().iter().zip(wrapped.iter()) {
            assert!((point - Complex64::from_polar(1.0, *phase)).norm() < 1e-9);
        }
    }
}

#[test]
fn tensor_layout_matches_index_formulas() {
    let mut rng = SimRng::from_seed(11);
    for shape in [vec![2usize, 3, 2], vec![3, 3, 3, 3], vec![2, 2]] {
        let factors: Vec<Vec<Complex64>> = shape
            .iter()
            .map(|&l| (0..l).map(|_| rng.complex_gaussian(1.0)).collect())
            .collect();
        let t = outer_rank_one(&factors).unwrap();
        // Brute force every element against the product formula.
        let len: usize = shape.iter().product();
        for flat in 0..len {
            let mut rem = flat;
            let mut idx = Vec::new();
            for &l in &shape {
                idx.push(rem % l);
                rem /= l;
            }
            let expect: Complex64 = idx
                .iter()
                .zip(factors.iter())
                .map(|(&i, f)| f[i])
                .product();
            assert!((t.data()[flat] - expect).norm() < 1e-12);
        }
        // vec/Kron duality: vec(s_1 o ... o s_N) = s_N (x) ... (x) s_1.
        let reversed: Vec<&[Complex64]> = factors.iter().rev().map(|f| f.as_slice()).collect();
        let kron = kron_vec(&reversed).unwrap();
        assert_eq!(vectorize(&t).len(), kron.len());
        for (a, b) in vectorize(&t).iter().zip(kron.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // Unfolding row/column placement against the direct formula.
        for mode in 1..=shape.len() {
            let u = unfold(&t, mode).unwrap();
            for flat in 0..len {
                let mut rem = flat;
                let mut idx = Vec::new();
                for &l in &shape {
                    idx.push(rem % l);
                    rem /= l;
                }
                let row = idx[mode - 1];
                let mut col = 0;
                let mut stride = 1;
                for (i, &l) in shape.iter().enumerate() {
                    if i != mode - 1 {
                        col += idx[i] * stride;
                        stride *= l;
                    }
                }
                assert_eq!(u.get(row, col), t.data()[flat]);
            }
        }
    }
}

#[test]
fn gramian_matches_unfolding_product_and_is_psd() {
    let mut rng = SimRng::from_seed(23);
    for shape in [vec![2usize, 3, 4], vec![4, 4, 4], vec![2, 2, 2, 2]] {
        let len: usize = shape.iter().product();
        let data: Vec<Complex64> = (0..len).map(|_| rng.complex_gaussian(1.0)).collect();
        let t = tensorize(&data, &shape).unwrap();
        let mut traces = Vec::new();
        for mode in 1..=shape.len() {
            let a = mode_gramian(&t, mode).unwrap();
            let u = unfold(&t, mode).unwrap();
            // Direct product U U^H.
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    let mut want = c(0.0, 0.0);
                    for k in 0..u.cols() {
                        want += u.get(i, k) * u.get(j, k).conj();
                    }
                    let got = a.get(i, j);
                    assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
                    // Hermitian symmetry.
                    assert!((a.get(j, i) - got.conj()).norm() < 1e-12);
                }
            }
            let (eigs, _) = hermitian_eig(&a);
            assert!(eigs.iter().all(|&l| l >= -1e-10));
            traces.push(a.trace().re);
        }
        // Trace is the squared Frobenius norm in every mode.
        for tr in &traces {
            assert!((tr - t.frobenius_norm_sqr()).abs() < 1e-9);
        }
    }
}

#[test]
fn rank_one_unfoldings_have_numerical_rank_one() {
    let mut rng = SimRng::from_seed(37);
    for _ in 0..20 {
        let factors: Vec<Vec<Complex64>> = [2usize, 3, 2]
            .iter()
            .map(|&l| (0..l).map(|_| rng.complex_gaussian(1.0)).collect())
            .collect();
        let t = outer_rank_one(&factors).unwrap();
        for mode in 1..=3 {
            let u = unfold(&t, mode).unwrap();
            let svals = singular_values_onesided(&u);
            assert!(svals[1] < 1e-10 * svals[0].max(1e-300));
            let (_, lvecs) = left_singular(&u);
            // Column space spanned by the mode factor.
            let mut f = factors[mode - 1].clone();
            let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut f {
                *z /= norm;
            }
            assert!(phase_aligned_distance(&lvecs[0], &f) < 1e-8);
        }
    }
}

#[test]
fn power_branch_matches_jacobi_eigenvector() {
    let mut rng = SimRng::from_seed(41);
    let settings = TpmdSettings {
        max_iters: 2000,
        tol: 1e-20,
        ..TpmdSettings::default()
    };
    let mut checked = 0;
    for _ in 0..200 {
        // Random Hermitian PSD 4x4 from a random square factor.
        let n = 4;
        let b: Vec<Complex64> = (0..n * n).map(|_| rng.complex_gaussian(1.0)).collect();
        let bm = ComplexMatrix::new(n, n, b).unwrap();
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += bm.get(i, k) * bm.get(j, k).conj();
                }
                a.set(i, j, acc);
            }
        }
        let (eigs, vecs) = hermitian_eig(&a);
        if eigs[0] - eigs[1] < 0.1 * eigs[0] {
            continue; // eigengap too small for a tight comparison
        }
        checked += 1;
        let init = random_unit(n, &mut rng);
        let (u, _iters, converged) = tpmd_branch(&a, &settings, &init, &mut rng).unwrap();
        assert!(converged);
        assert!(
            phase_aligned_distance(&u, &vecs[0]) < 1e-6,
            "power iterate does not match the dominant eigenvector"
        );
    }
    assert!(checked > 100, "eigengap filter rejected too many instances");
}

#[test]
fn detect_branches_match_dominant_left_singular_vectors() {
    let cfg = KronConfig::scheme2(&[4, 4, 4], vec![4, 4, 4], true).unwrap();
    let tight = TpmdSettings {
        max_iters: 5000,
        tol: 1e-20,
        ..TpmdSettings::default()
    };
    let mut rng = SimRng::from_seed(53);
    for _ in 0..50 {
        let bits = rng.bits(payload_bits_per_block(&cfg));
        let block = modulate_branches(&bits, &cfg).unwrap();
        let noisy: Vec<Complex64> = block
            .coded
            .iter()
            .map(|&v| v + rng.complex_gaussian(0.5))
            .collect();
        let t = tensorize(&noisy, cfg.lengths()).unwrap();
        let results = detect(&noisy, &cfg, &tight, &mut rng).unwrap();
        for (n, r) in results.iter().enumerate() {
            let r = r.as_ref().unwrap();
            let u = unfold(&t, n + 1).unwrap();
            let (svals, lvecs) = left_singular(&u);
            if (svals[0] - svals[1]) / svals[0] < 0.01 {
                continue;
            }
            assert!(phase_aligned_distance(&r.u, &lvecs[0]) < 1e-6);
        }
    }
}

#[test]
fn viterbi_agrees_with_exhaustive_ml_on_noisy_samples() {
    let code = ConvCode::new();
    let qpsk = make_psk(4, 0.0).unwrap();
    let mut rng = SimRng::from_seed(61);
    let msg_len = 8;
    for trial in 0..300 {
        let sigma2 = [0.4, 1.0, 2.5][trial % 3];
        let msg = rng.bits(msg_len);
        let coded = conv_encode(&msg).unwrap();
        let symbols: Vec<Complex64> = coded
            .chunks_exact(2)
            .map(|pair| qpsk.point(qpsk.index_of_label(qpsk.label_from_bits(pair))))
            .collect();
        let real = ChannelRealization {
            h: c(1.0, 0.0),
            sigma2,
            model: ChannelModel::Awgn,
        };
        let y = transmit(&symbols, &real, &mut rng);

        let hard = psk_hard_demod(&y, real.h, &qpsk);
        let decoded = viterbi_decode_hard(&hard, &code).unwrap();
        let obs = MlObservations::Hard(&hard);
        let (ml_msg, ml_metric_value, unique) = exhaustive_ml(&obs, msg_len);
        let vit_metric = ml_metric(&conv_encode(&decoded).unwrap(), &obs);
        assert!(vit_metric <= ml_metric_value + 1e-9);
        if unique {
            assert_eq!(decoded, ml_msg);
        }

        let llrs = psk_soft_demod(&y, real.h, sigma2, &qpsk);
        let decoded = viterbi_decode_soft(&llrs, &code).unwrap();
        let obs = MlObservations::Soft(&llrs);
        let (ml_msg, ml_metric_value, unique) = exhaustive_ml(&obs, msg_len);
        let vit_metric = ml_metric(&conv_encode(&decoded).unwrap(), &obs);
        assert!(vit_metric <= ml_metric_value + 1e-9);
        if unique {
            assert_eq!(decoded, ml_msg);
        }
    }
}

#[test]
fn viterbi_matches_ml_on_sampled_longer_messages() {
    // Exhaustive search is still feasible at length 12; sample instances
    // across noise levels rather than enumerating all messages.
    let code = ConvCode::new();
    let qpsk = make_psk(4, 0.0).unwrap();
    let mut rng = SimRng::from_seed(67);
    let msg_len = 12;
    for trial in 0..30 {
        let sigma2 = [0.5, 1.2, 3.0][trial % 3];
        let msg = rng.bits(msg_len);
        let coded = conv_encode(&msg).unwrap();
        let symbols: Vec<Complex64> = coded
            .chunks_exact(2)
            .map(|pair| qpsk.point(qpsk.index_of_label(qpsk.label_from_bits(pair))))
            .collect();
        let real = ChannelRealization {
            h: c(1.0, 0.0),
            sigma2,
            model: ChannelModel::Awgn,
        };
        let y = transmit(&symbols, &real, &mut rng);

        let hard = psk_hard_demod(&y, real.h, &qpsk);
        let decoded = viterbi_decode_hard(&hard, &code).unwrap();
        let obs = MlObservations::Hard(&hard);
        let (ml_msg, ml_best, unique) = exhaustive_ml(&obs, msg_len);
        let vit_metric = ml_metric(&conv_encode(&decoded).unwrap(), &obs);
        assert!(vit_metric <= ml_best + 1e-9);
        if unique {
            assert_eq!(decoded, ml_msg);
        }

        let llrs = psk_soft_demod(&y, real.h, sigma2, &qpsk);
        let decoded = viterbi_decode_soft(&llrs, &code).unwrap();
        let obs = MlObservations::Soft(&llrs);
        let (ml_msg, ml_best, unique) = exhaustive_ml(&obs, msg_len);
        let vit_metric = ml_metric(&conv_encode(&decoded).unwrap(), &obs);
        assert!(vit_metric <= ml_best + 1e-9);
        if unique {
            assert_eq!(decoded, ml_msg);
        }
    }
}

#[test]
fn channel_noise_moments_and_whiteness() {
    let mut rng = SimRng::from_seed(71);
    let sigma2 = 0.83;
    let n = 1_000_000usize;
    let x = vec![c(1.0, 0.0); n];
    let real = ChannelRealization {
        h: c(1.0, 0.0),
        sigma2,
        model: ChannelModel::Awgn,
    };
    let y = transmit(&x, &real, &mut rng);
    let noise: Vec<Complex64> = y.iter().map(|v| v - c(1.0, 0.0)).collect();
    let mean = noise.iter().sum::<Complex64>() / n as f64;
    assert!(mean.norm() < 0.005);
    let var = noise.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    assert!((var / sigma2 - 1.0).abs() < 0.01);
    // Whiteness: normalized autocorrelation at a few nonzero lags.
    for lag in [1usize, 2, 7, 100] {
        let corr: Complex64 = noise[..n - lag]
            .iter()
            .zip(noise[lag..].iter())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / (n - lag) as f64;
        assert!(corr.norm() / sigma2 < 0.01, "lag {lag} correlated");
    }
}

#[test]
fn rayleigh_magnitude_distribution() {
    let mut rng = SimRng::from_seed(73);
    // Unit mean power over a million draws.
    let n_power = 1_000_000usize;
    let power = (0..n_power)
        .map(|_| draw_channel(ChannelModel::RayleighFlat, &mut rng).norm_sqr())
        .sum::<f64>()
        / n_power as f64;
    assert!((power - 1.0).abs() < 0.01);
    // KS test against the unit-power Rayleigh CDF at the 1% level.
    let n = 100_000usize;
    let mut mags: Vec<f64> = (0..n)
        .map(|_| draw_channel(ChannelModel::RayleighFlat, &mut rng).norm())
        .collect();
    let d = ks_statistic(&mut mags, |r| 1.0 - (-r * r).exp());
    let critical = 1.628 / (n as f64).sqrt();
    assert!(d < critical, "KS statistic {d} exceeds {critical}");
}

#[test]
fn matched_filter_preserves_rank_one_structure() {
    // Noiseless chain: tensorized matched-filter output equals |h|^2 times
    // the branch outer product.
    let cfg = KronConfig::scheme2(&[2, 4, 8], vec![2, 3, 2], true).unwrap();
    let mut rng = SimRng::from_seed(79);
    for _ in 0..20 {
        let bits = rng.bits(payload_bits_per_block(&cfg));
        let block = modulate_branches(&bits, &cfg).unwrap();
        let h = draw_channel(ChannelModel::RayleighFlat, &mut rng);
        let real = ChannelRealization {
            h,
            sigma2: 0.0,
            model: ChannelModel::RayleighFlat,
        };
        let y = transmit(&block.coded, &real, &mut rng);
        let yhat = kronrod::channel::matched_filter(&y, h);
        let t = tensorize(&yhat, cfg.lengths()).unwrap();
        let x = outer_rank_one(&block.branch_symbols).unwrap();
        let gain = h.norm_sqr();
        for (a, b) in t.data().iter().zip(x.data().iter()) {
            assert!((a - b * gain).norm() < 1e-9 * (1.0 + gain));
        }
    }
}
