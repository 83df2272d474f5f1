//! Monte Carlo ground truth: complex Gaussian rectangular matrices, Wishart
//! and GUE ensembles, and trace-statistic estimators with standard errors.
//!
//! Sampling is deterministic: every matrix draw comes from its own stream
//! keyed by `(master seed, trial index, matrix index)`, so runs reproduce
//! bit for bit and trials are independent of evaluation order.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::moments::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("matrix must be square for this ensemble")]
    NonSquare,
    #[error("need at least two trials for a standard error")]
    TooFewTrials,
    #[error("GUE uses square matrices: M must equal N")]
    DimensionMismatch,
    #[error("matrix dimensions must be at least 1")]
    BadDimension,
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Naive product with the `i, k, j` loop order.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Normalized trace: the diagonal sum divided by the dimension.
    pub fn normalized_trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace of a square matrix");
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            sum += self.get(i, i);
        }
        sum / self.rows as f64
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for one matrix draw within one trial.
pub fn stream_seed(master: u64, trial: u64, matrix: u64) -> u64 {
    mix(master ^ mix(trial.wrapping_mul(GOLDEN).wrapping_add(1))
        ^ mix(matrix.wrapping_mul(0xC2B2_AE3D_27D4_EB4F).wrapping_add(2)))
}

/// Counter-style generator: each output is a mix of an advancing state.
struct Stream {
    state: u64,
}

impl Stream {
    fn new(seed: u64) -> Self {
        Stream { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals by the polar method.
    fn normal_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.unit() - 1.0;
            let v = 2.0 * self.unit() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                return (u * factor, v * factor);
            }
        }
    }
}

/// An `rows × cols` matrix of i.i.d. complex Gaussians whose real and
/// imaginary parts each have variance 1/2 (so entries have unit second
/// absolute moment). The same seed always yields the same matrix.
pub fn sample_gaussian(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut stream = Stream::new(seed);
    let mut out = ComplexMatrix::zeros(rows, cols);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..rows {
        for j in 0..cols {
            let (re, im) = stream.normal_pair();
            out.set(i, j, Complex64::new(re * scale, im * scale));
        }
    }
    out
}

/// Normalized sample covariance matrix `G† G / N` (with `N` the column
/// count): Hermitian positive semidefinite of size `N × N`.
pub fn wishart(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.cols();
    g.conj_transpose().mul(g).scale(1.0 / n as f64)
}

/// Hermitized square Gaussian `(G + G†) / sqrt(2N)`.
pub fn gue(g: &ComplexMatrix) -> Result<ComplexMatrix, SimError> {
    if g.rows() != g.cols() {
        return Err(SimError::NonSquare);
    }
    let n = g.rows();
    Ok(g.add(&g.conj_transpose()).scale(1.0 / (2.0 * n as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Wishart,
    Gue,
}

impl FromStr for Ensemble {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "wishart" => Ok(Ensemble::Wishart),
            "gue" => Ok(Ensemble::Gue),
            other => Err(format!("unknown ensemble '{other}'")),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Wishart => "wishart",
            Ensemble::Gue => "gue",
        })
    }
}

/// Monte Carlo estimate of a product of normalized traces.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEstimate {
    pub mean: Complex64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Monte Carlo covariance of two normalized traces with a jackknife
/// standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

fn ensemble_matrices(
    ensemble: Ensemble,
    s: u32,
    m: usize,
    n: usize,
    seed: u64,
    trial: u64,
) -> Result<Vec<ComplexMatrix>, SimError> {
    let mut mats = Vec::with_capacity(s as usize);
    for r in 1..=s {
        let key = stream_seed(seed, trial, u64::from(r));
        let mat = match ensemble {
            Ensemble::Wishart => wishart(&sample_gaussian(m, n, key)),
            Ensemble::Gue => gue(&sample_gaussian(n, n, key))?,
        };
        mats.push(mat);
    }
    Ok(mats)
}

fn word_monomial_trace(mats: &[ComplexMatrix], word: &Word) -> Complex64 {
    let mut product = mats[(word.letters()[0] - 1) as usize].clone();
    for &letter in &word.letters()[1..] {
        product = product.mul(&mats[(letter - 1) as usize]);
    }
    product.normalized_trace()
}

fn check_dims(ensemble: Ensemble, m: usize, n: usize, trials: u64) -> Result<(), SimError> {
    if m == 0 || n == 0 {
        return Err(SimError::BadDimension);
    }
    if trials < 2 {
        return Err(SimError::TooFewTrials);
    }
    if ensemble == Ensemble::Gue && m != n {
        return Err(SimError::DimensionMismatch);
    }
    Ok(())
}

/// Estimate `E[ tr(X_{w1}) ⋯ tr(X_{wl}) ]` by drawing fresh ensemble
/// matrices each trial. All words share the same draws within a trial.
pub fn estimate_trace_product(
    words: &[Word],
    ensemble: Ensemble,
    m: usize,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<TraceEstimate, SimError> {
    check_dims(ensemble, m, n, trials)?;
    let s = words.iter().map(|w| w.alphabet()).max().unwrap_or(1);
    let mut samples = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mats = ensemble_matrices(ensemble, s, m, n, seed, trial)?;
        let mut value = Complex64::new(1.0, 0.0);
        for word in words {
            value *= word_monomial_trace(&mats, word);
        }
        samples.push(value);
    }
    let t = trials as f64;
    let mean = samples.iter().sum::<Complex64>() / t;
    let var = samples
        .iter()
        .map(|v| (v - mean).norm_sqr())
        .sum::<f64>()
        / (t - 1.0);
    Ok(TraceEstimate {
        mean,
        std_error: (var / t).sqrt(),
        trials,
        seed,
    })
}

/// Estimate `Cov(tr X_v, tr X_w)` as mean-of-products minus
/// product-of-means, with a leave-one-out jackknife standard error.
pub fn estimate_trace_covariance(
    v: &Word,
    w: &Word,
    ensemble: Ensemble,
    m: usize,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<CovarianceEstimate, SimError> {
    check_dims(ensemble, m, n, trials)?;
    let s = v.alphabet().max(w.alphabet());
    let mut a = Vec::with_capacity(trials as usize);
    let mut b = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mats = ensemble_matrices(ensemble, s, m, n, seed, trial)?;
        a.push(word_monomial_trace(&mats, v));
        b.push(word_monomial_trace(&mats, w));
    }
    let t = trials as f64;
    let sum_a: Complex64 = a.iter().sum();
    let sum_b: Complex64 = b.iter().sum();
    let sum_ab: Complex64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let value = sum_ab / t - (sum_a / t) * (sum_b / t);

    let mut leave_outs = Vec::with_capacity(trials as usize);
    for i in 0..trials as usize {
        let tm = t - 1.0;
        let la = (sum_a - a[i]) / tm;
        let lb = (sum_b - b[i]) / tm;
        let lab = (sum_ab - a[i] * b[i]) / tm;
        leave_outs.push(lab - la * lb);
    }
    let jack_mean = leave_outs.iter().sum::<Complex64>() / t;
    let jack_var = leave_outs
        .iter()
        .map(|v| (v - jack_mean).norm_sqr())
        .sum::<f64>()
        * (t - 1.0)
        / t;
    Ok(CovarianceEstimate {
        value,
        std_error: jack_var.sqrt(),
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{
        finite_n_covariance_identity, gue_trace_product_exact, wishart_trace_product_exact,
    };
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn word(letters: &[u32]) -> Word {
        Word::from_letters(letters.to_vec()).unwrap()
    }

    fn to_f64(r: &BigRational) -> f64 {
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }

    #[test]
    fn gaussian_moments_match() {
        // 10^5 entries: E f ≈ 0 and E |f|² ≈ 1 within five standard errors.
        let g = sample_gaussian(200, 500, 0xFEED);
        let count = 200 * 500;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        for i in 0..200 {
            for j in 0..500 {
                let f = g.get(i, j);
                sum += f;
                sum_sq += f.norm_sqr();
            }
        }
        let mean = sum / count as f64;
        let mean_sq = sum_sq / count as f64;
        // |f|² is exponential with unit mean and variance.
        let se_sq = (1.0 / count as f64).sqrt();
        assert!((mean_sq - 1.0).abs() <= 5.0 * se_sq, "E|f|² = {mean_sq}");
        let se_mean = (1.0 / count as f64).sqrt();
        assert!(mean.norm() <= 5.0 * se_mean, "E f = {mean}");
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = sample_gaussian(16, 8, 42);
        let b = sample_gaussian(16, 8, 42);
        assert_eq!(a, b);
        let c = sample_gaussian(16, 8, 43);
        assert_ne!(a, c);
        assert_ne!(stream_seed(1, 2, 3), stream_seed(1, 3, 2));
    }

    #[test]
    fn wishart_matrix_shape_and_hermitian() {
        let g = sample_gaussian(6, 4, 7);
        let x = wishart(&g);
        assert_eq!((x.rows(), x.cols()), (4, 4));
        assert!(x.max_hermitian_defect() < 1e-12);
        assert!(x.normalized_trace().re >= 0.0);
        // E[X_jj] = M/N: average over many draws.
        let trials = 4000;
        let mut acc = 0.0;
        for t in 0..trials {
            let x = wishart(&sample_gaussian(6, 4, stream_seed(99, t, 1)));
            acc += x.get(0, 0).re;
        }
        let mean = acc / trials as f64;
        assert!((mean - 1.5).abs() < 0.1, "E[X_00] = {mean}");
    }

    #[test]
    fn gue_matrix_is_hermitian_and_centered() {
        let g = sample_gaussian(8, 8, 11);
        let y = gue(&g).unwrap();
        assert_eq!(y.max_hermitian_defect(), 0.0);
        assert!(gue(&sample_gaussian(3, 5, 1)).is_err());
        let est = estimate_trace_product(
            &[word(&[1, 1])],
            Ensemble::Gue,
            8,
            8,
            10_000,
            0xD1CE,
        )
        .unwrap();
        // E tr Y² is exactly 1.
        assert!((est.mean.re - 1.0).abs() <= 5.0 * est.std_error);
        let est1 = estimate_trace_product(&[word(&[1])], Ensemble::Gue, 8, 8, 10_000, 3).unwrap();
        assert!(est1.mean.norm() <= 5.0 * est1.std_error);
    }

    #[test]
    fn estimates_are_deterministic() {
        let a = estimate_trace_product(&[word(&[1, 1])], Ensemble::Wishart, 4, 4, 500, 9).unwrap();
        let b = estimate_trace_product(&[word(&[1, 1])], Ensemble::Wishart, 4, 4, 500, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wishart_estimates_match_exact_values() {
        let cases: Vec<(Vec<Word>, u64, u64)> = vec![
            (vec![word(&[1])], 8, 8),
            (vec![word(&[1, 1])], 4, 4),
            (vec![word(&[1, 2])], 4, 4),
            (vec![word(&[1]), word(&[1])], 4, 4),
            // rectangular factors
            (vec![word(&[1, 1])], 6, 3),
            (vec![word(&[1, 2, 1])], 2, 5),
            (vec![word(&[1]), word(&[1, 1])], 7, 3),
        ];
        for (words, m, n) in cases {
            let exact = to_f64(&wishart_trace_product_exact(&words, m, n).unwrap());
            let est = estimate_trace_product(
                &words,
                Ensemble::Wishart,
                m as usize,
                n as usize,
                10_000,
                0xABCD,
            )
            .unwrap();
            assert!(
                (est.mean.re - exact).abs() <= 5.0 * est.std_error,
                "words {words:?}: {} vs {exact} (SE {})",
                est.mean.re,
                est.std_error
            );
            assert!(est.mean.im.abs() <= 5.0 * est.std_error);
        }
    }

    #[test]
    fn gue_estimates_match_exact_values() {
        let exact = to_f64(&gue_trace_product_exact(&[word(&[1, 1, 1, 1])], 8).unwrap());
        let est = estimate_trace_product(
            &[word(&[1, 1, 1, 1])],
            Ensemble::Gue,
            8,
            8,
            10_000,
            0x600D,
        )
        .unwrap();
        assert!((est.mean.re - exact).abs() <= 5.0 * est.std_error);
    }

    #[test]
    fn covariance_estimate_matches_identity() {
        let v = word(&[1]);
        let w = word(&[1]);
        let (lhs, rhs) = finite_n_covariance_identity(&v, &w, 4, 4).unwrap();
        assert_eq!(lhs, rhs);
        let exact_cov = to_f64(&rhs) / 16.0; // divide the scaled identity by N²
        let est = estimate_trace_covariance(&v, &w, Ensemble::Wishart, 4, 4, 10_000, 0xC0FFEE)
            .unwrap();
        assert!(
            (est.value.re - exact_cov).abs() <= 5.0 * est.std_error,
            "{} vs {exact_cov} (SE {})",
            est.value.re,
            est.std_error
        );
    }

    #[test]
    fn estimator_guards() {
        assert_eq!(
            estimate_trace_product(&[word(&[1])], Ensemble::Wishart, 4, 4, 1, 0),
            Err(SimError::TooFewTrials)
        );
        assert_eq!(
            estimate_trace_product(&[word(&[1])], Ensemble::Gue, 4, 8, 10, 0),
            Err(SimError::DimensionMismatch)
        );
    }
}
