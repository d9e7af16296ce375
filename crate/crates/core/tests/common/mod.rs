//! Shared test oracles. Everything here is an independent route to a result
//! the library computes some other way: a full Jacobi eigensolver instead of
//! power iteration, numeric quadrature instead of erfc, exhaustive message
//! search instead of trellis recursion.

#![allow(dead_code)]

use kronrod::baselines::conv_encode;
use kronrod::rng::SimRng;
use kronrod::tensor::ComplexMatrix;
use num_complex::Complex64;

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in descending order with matching unit
/// eigenvectors (columns). Self-validates the residual before returning.
pub fn hermitian_eig(a: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix must be square");
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    // Hermitian sanity on the input.
    for i in 0..n {
        for j in 0..n {
            assert!(
                (m[i][j] - m[j][i].conj()).norm() < 1e-9 * (1.0 + m[i][j].norm()),
                "input is not Hermitian"
            );
        }
    }
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();

    let norm: f64 = m
        .iter()
        .flatten()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q].norm_sqr();
            }
        }
        if off.sqrt() < 1e-13 * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = m[p][p].re;
                let aqq = m[q][q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary update columns/rows p and q: dephase then rotate.
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -s * phase.conj();
                let uqq = c * phase.conj();
                // B = M U (column update)
                for row in m.iter_mut() {
                    let (mp, mq) = (row[p], row[q]);
                    row[p] = mp * upp + mq * uqp;
                    row[q] = mp * upq + mq * uqq;
                }
                // M' = U^H B (row update)
                for j in 0..n {
                    let (mp, mq) = (m[p][j], m[q][j]);
                    m[p][j] = upp.conj() * mp + uqp.conj() * mq;
                    m[q][j] = upq.conj() * mp + uqq.conj() * mq;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = vp * upp + vq * uqp;
                    row[q] = vp * upq + vq * uqq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| (m[k][k].re, (0..n).map(|i| v[i][k]).collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
    let eigenvectors: Vec<Vec<Complex64>> = pairs.into_iter().map(|(_, v)| v).collect();

    // Residual check: A v = lambda v for every pair.
    for (lambda, vec) in eigenvalues.iter().zip(eigenvectors.iter()) {
        let av = a.matvec(vec);
        let res: f64 = av
            .iter()
            .zip(vec.iter())
            .map(|(x, y)| (x - y * *lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(
            res < 1e-8 * norm.max(1.0),
            "jacobi residual {res} too large (lambda = {lambda})"
        );
    }
    (eigenvalues, eigenvectors)
}

/// Singular values and left singular vectors of a complex matrix via the
/// eigendecomposition of its Gramian `M M^H`.
pub fn left_singular(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let rows = m.rows();
    let mut gram = ComplexMatrix::zeros(rows, rows);
    for c in 0..m.cols() {
        let col = m.column(c);
        for j in 0..rows {
            let cj = col[j].conj();
            for i in 0..rows {
                let v = gram.get(i, j) + col[i] * cj;
                gram.set(i, j, v);
            }
        }
    }
    let (eigs, vecs) = hermitian_eig(&gram);
    (eigs.iter().map(|&l| l.max(0.0).sqrt()).collect(), vecs)
}

/// Singular values by one-sided Jacobi orthogonalization, accurate for tiny
/// singular values where the Gramian route floors at sqrt(machine epsilon).
type EntryFn<'a> = Box<dyn Fn(usize, usize) -> Complex64 + 'a>;

pub fn singular_values_onesided(m: &ComplexMatrix) -> Vec<f64> {
    // Work on whichever orientation has fewer columns.
    let (rows, cols, get): (usize, usize, EntryFn) =
        if m.rows() <= m.cols() {
            (m.cols(), m.rows(), Box::new(|i, j| m.get(j, i).conj()))
        } else {
            (m.rows(), m.cols(), Box::new(|i, j| m.get(i, j)))
        };
    let mut a: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| (0..rows).map(|i| get(i, j)).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let app: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let apq: Complex64 = a[p]
                    .iter()
                    .zip(a[q].iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let r = apq.norm();
                if r <= 1e-30 || r * r <= 1e-32 * app * aqq {
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                let upp = Complex64::new(cth, 0.0);
                let upq = Complex64::new(sth, 0.0);
                let uqp = -sth * phase.conj();
                let uqq = cth * phase.conj();
                for i in 0..rows {
                    let (xp, xq) = (a[p][i], a[q][i]);
                    a[p][i] = xp * upp + xq * uqp;
                    a[q][i] = xp * upq + xq * uqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut svals: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    svals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    svals
}

/// Distance between unit vectors up to a global phase.
pub fn phase_aligned_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    let inner: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b * phase).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Gaussian tail probability by Simpson quadrature; independent of erfc.
pub fn q_numeric(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_numeric(-x);
    }
    // Integrate the standard normal density from x to x + 12 (the remainder
    // beyond is below 1e-32 relative).
    let steps = 24_000usize;
    let h = 12.0 / steps as f64;
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = density(x) + density(x + 12.0);
    for k in 1..steps {
        let t = x + k as f64 * h;
        acc += density(t) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Branch metrics shared with the exhaustive oracle.
pub enum MlObservations<'a> {
    Hard(&'a [u8]),
    Soft(&'a [f64]),
}

pub fn ml_metric(coded: &[u8], obs: &MlObservations) -> f64 {
    match obs {
        MlObservations::Hard(bits) => coded
            .iter()
            .zip(bits.iter())
            .map(|(a, b)| f64::from(a != b))
            .sum(),
        MlObservations::Soft(llrs) => coded
            .iter()
            .zip(llrs.iter())
            .map(|(&b, &l)| if b == 0 { -l } else { l })
            .sum(),
    }
}

/// Exhaustive maximum-likelihood decoding over all `2^msg_len` messages.
/// Returns the best message, its metric, and whether the minimizer is unique.
pub fn exhaustive_ml(obs: &MlObservations, msg_len: usize) -> (Vec<u8>, f64, bool) {
    assert!(msg_len <= 16, "exhaustive search limited to short messages");
    let mut best_msg = Vec::new();
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    for pattern in 0..(1u32 << msg_len) {
        let msg: Vec<u8> = (0..msg_len)
            .map(|k| ((pattern >> (msg_len - 1 - k)) & 1) as u8)
            .collect();
        let coded = conv_encode(&msg).unwrap();
        let metric = ml_metric(&coded, obs);
        if metric < best {
            second = best;
            best = metric;
            best_msg = msg;
        } else if metric < second {
            second = metric;
        }
    }
    (best_msg, best, second > best + 1e-9)
}

/// Kolmogorov-Smirnov statistic of samples against a CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Random unit complex vector.
pub fn random_unit(len: usize, rng: &mut SimRng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len).map(|_| rng.complex_gaussian(1.0)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
