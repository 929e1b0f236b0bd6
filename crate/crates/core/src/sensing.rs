//! Uniform i.i.d. sampling on the torus, the normalized subsampled Fourier
//! system, and the certificates that tie the restricted isometry constant to
//! square-root LASSO error bounds.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::indexsets::IndexSet;
use crate::operator::{check_len, DenseMatrix, LinearOperator};
use crate::rng::{rng, Stream};
use crate::scalar::Real;
use crate::sobolev::{basis_normalization, PeriodicFunction};

/// Operators with at most this many entries are materialized densely.
pub const DENSE_ENTRY_LIMIT: usize = 1 << 24;

/// Enumeration caps for [`rip_constant_bruteforce`].
pub const RIP_MAX_COLUMNS: usize = 16;
pub const RIP_MAX_ORDER: usize = 4;

/// `m` points drawn i.i.d. uniformly from `[-pi, pi)^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet<T> {
    dim: usize,
    seed: u64,
    points: Vec<Vec<T>>,
}

impl<T: Real> SampleSet<T> {
    /// Wraps explicit points (e.g. a deterministic grid). `seed` is informational.
    pub fn from_points(dim: usize, seed: u64, points: Vec<Vec<T>>) -> Result<Self> {
        if dim == 0 || points.is_empty() {
            return Err(domain("sample set needs d >= 1 and m >= 1"));
        }
        let pi = T::PI();
        for p in &points {
            check_len(dim, p.len())?;
            if p.iter().any(|&x| !(x >= -pi && x < pi)) {
                return Err(domain("sample coordinates must lie in [-pi, pi)"));
            }
        }
        Ok(SampleSet { dim, seed, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }
}

pub fn draw_uniform_samples<T: Real>(m: usize, d: usize, seed: u64) -> Result<SampleSet<T>> {
    if m == 0 || d == 0 {
        return Err(domain("sample set needs d >= 1 and m >= 1"));
    }
    let mut g = rng(seed, Stream::SamplePoints);
    let pi = T::PI();
    let points = (0..m)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let x = T::lit(g.gen::<f64>() * std::f64::consts::TAU - std::f64::consts::PI);
                    // rounding can land exactly on +pi, which is -pi on the torus
                    if x >= pi {
                        -pi
                    } else {
                        x.max(-pi)
                    }
                })
                .collect()
        })
        .collect();
    Ok(SampleSet { dim: d, seed, points })
}

/// `b_i = f(x_i) / sqrt(m)`.
pub fn sample_vector<T: Real>(f: &PeriodicFunction<T>, x: &SampleSet<T>) -> Result<Vec<Complex<T>>> {
    check_len(x.dim(), f.dim())?;
    let inv = T::from_count(x.len()).sqrt().recip();
    Ok(x.points().iter().map(|p| f.evaluate(p) * inv).collect())
}

/// `v_i = (f(x_i) - sum_{n in L} f_n phi_n(x_i)) / sqrt(m)`.
pub fn truncation_error_vector<T: Real>(
    f: &PeriodicFunction<T>,
    x: &SampleSet<T>,
    set: &IndexSet,
) -> Result<Vec<Complex<T>>> {
    check_len(f.dim(), set.dim())?;
    sample_vector(&f.outside(set), x)
}

/// The `m x N` matrix `(phi_n(x_i)) / sqrt(m)` on `set`, optionally scaled by
/// `(2 pi)^{d/2}` so that every entry has modulus exactly `1/sqrt(m)`.
#[derive(Clone, Debug)]
pub struct MeasurementOperator<T> {
    samples: SampleSet<T>,
    indexset: IndexSet,
    scaled: bool,
    dense: Option<SplitMatrix<T>>,
}

/// Row-major entries with real and imaginary parts stored apart, which lets
/// the inner loops vectorize.
#[derive(Clone, Debug)]
struct SplitMatrix<T> {
    re: Vec<T>,
    im: Vec<T>,
}

const LANES: usize = 8;

/// `sum_k a_k x_k` over split complex slices, with independent partial sums.
fn split_dot<T: Real>(ar: &[T], ai: &[T], xr: &[T], xi: &[T]) -> Complex<T> {
    let mut sr = [T::zero(); LANES];
    let mut si = [T::zero(); LANES];
    let n = ar.len() / LANES * LANES;
    for (((a, b), c), d) in ar[..n]
        .chunks_exact(LANES)
        .zip(ai[..n].chunks_exact(LANES))
        .zip(xr[..n].chunks_exact(LANES))
        .zip(xi[..n].chunks_exact(LANES))
    {
        for l in 0..LANES {
            sr[l] = sr[l] + a[l] * c[l] - b[l] * d[l];
            si[l] = si[l] + a[l] * d[l] + b[l] * c[l];
        }
    }
    let mut re = sr.iter().copied().fold(T::zero(), |p, q| p + q);
    let mut im = si.iter().copied().fold(T::zero(), |p, q| p + q);
    for k in n..ar.len() {
        re = re + ar[k] * xr[k] - ai[k] * xi[k];
        im = im + ar[k] * xi[k] + ai[k] * xr[k];
    }
    Complex::new(re, im)
}

/// `out += conj(a) w` over split complex slices.
fn split_conj_axpy<T: Real>(ar: &[T], ai: &[T], w: Complex<T>, or: &mut [T], oi: &mut [T]) {
    for (((a, b), o), p) in ar.iter().zip(ai).zip(or.iter_mut()).zip(oi.iter_mut()) {
        *o = *o + *a * w.re + *b * w.im;
        *p = *p + *a * w.im - *b * w.re;
    }
}

impl<T: Real> MeasurementOperator<T> {
    pub fn new(samples: SampleSet<T>, indexset: IndexSet, scaled: bool) -> Result<Self> {
        Self::with_dense_limit(samples, indexset, scaled, DENSE_ENTRY_LIMIT)
    }

    pub fn with_dense_limit(
        samples: SampleSet<T>,
        indexset: IndexSet,
        scaled: bool,
        dense_limit: usize,
    ) -> Result<Self> {
        check_len(samples.dim(), indexset.dim())?;
        let mut op = MeasurementOperator {
            samples,
            indexset,
            scaled,
            dense: None,
        };
        if op.rows() * op.cols() <= dense_limit {
            let len = op.rows() * op.cols();
            let mut re = Vec::with_capacity(len);
            let mut im = Vec::with_capacity(len);
            for i in 0..op.rows() {
                for a in op.row(i) {
                    re.push(a.re);
                    im.push(a.im);
                }
            }
            op.dense = Some(SplitMatrix { re, im });
        }
        Ok(op)
    }

    pub fn samples(&self) -> &SampleSet<T> {
        &self.samples
    }

    pub fn indexset(&self) -> &IndexSet {
        &self.indexset
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    fn entry_scale(&self) -> T {
        let inv_sqrt_m = T::from_count(self.rows()).sqrt().recip();
        if self.scaled {
            inv_sqrt_m
        } else {
            inv_sqrt_m * basis_normalization::<T>(self.samples.dim())
        }
    }

    /// Row `i` computed from per-coordinate power tables `e^{i k x_ij}`.
    fn row(&self, i: usize) -> Vec<Complex<T>> {
        let x = &self.samples.points()[i];
        let kmax = self.indexset.max_abs_entry();
        let width = (2 * kmax + 1) as usize;
        let mut table = vec![Complex::default(); x.len() * width];
        for (j, &xj) in x.iter().enumerate() {
            for k in -kmax..=kmax {
                table[j * width + (k + kmax) as usize] = Complex::from_polar(T::one(), T::lit(k as f64) * xj);
            }
        }
        let scale = self.entry_scale();
        self.indexset
            .iter()
            .map(|n| {
                n.entries()
                    .iter()
                    .enumerate()
                    .fold(Complex::new(scale, T::zero()), |acc, (j, &nj)| {
                        acc * table[j * width + (nj + kmax) as usize]
                    })
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let data = match &self.dense {
            Some(d) => d.re.iter().zip(&d.im).map(|(&r, &i)| Complex::new(r, i)).collect(),
            None => (0..self.rows()).flat_map(|i| self.row(i)).collect(),
        };
        DenseMatrix::new(self.rows(), self.cols(), data).expect("shape")
    }

    /// Column `j` of the scaled operator.
    fn scaled_column(&self, j: usize) -> Vec<Complex<T>> {
        let n = &self.indexset.indices()[j];
        let inv = T::from_count(self.rows()).sqrt().recip();
        self.samples
            .points()
            .iter()
            .map(|x| {
                let phase = n
                    .entries()
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |p, (&nj, &xj)| p + T::lit(nj as f64) * xj);
                Complex::from_polar(inv, phase)
            })
            .collect()
    }
}

impl<T: Real> LinearOperator<T> for MeasurementOperator<T> {
    fn rows(&self) -> usize {
        self.samples.len()
    }

    fn cols(&self) -> usize {
        self.indexset.len()
    }

    fn apply_into(&self, z: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.cols();
        match &self.dense {
            Some(d) => {
                let zr: Vec<T> = z.iter().map(|v| v.re).collect();
                let zi: Vec<T> = z.iter().map(|v| v.im).collect();
                let rows = d.re.chunks_exact(n.max(1)).zip(d.im.chunks_exact(n.max(1)));
                for (o, (ar, ai)) in out.iter_mut().zip(rows) {
                    *o = split_dot(ar, ai, &zr, &zi);
                }
            }
            None => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = self
                        .row(i)
                        .iter()
                        .zip(z)
                        .fold(Complex::default(), |acc, (a, x)| acc + *a * *x);
                }
            }
        }
    }

    fn adjoint_into(&self, w: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|o| *o = Complex::default());
        let n = self.cols();
        if let Some(d) = &self.dense {
            let mut or = vec![T::zero(); n];
            let mut oi = vec![T::zero(); n];
            let rows = d.re.chunks_exact(n.max(1)).zip(d.im.chunks_exact(n.max(1)));
            for (wi, (ar, ai)) in w.iter().zip(rows) {
                split_conj_axpy(ar, ai, *wi, &mut or, &mut oi);
            }
            for ((o, r), i) in out.iter_mut().zip(or).zip(oi) {
                *o = Complex::new(r, i);
            }
            return;
        }
        let mut accumulate = |wi: Complex<T>, row: &[Complex<T>]| {
            for (o, a) in out.iter_mut().zip(row) {
                *o = *o + a.conj() * wi;
            }
        };
        for (i, wi) in w.iter().enumerate() {
            accumulate(*wi, &self.row(i));
        }
    }
}

/// Restricted isometry constant of order `s` of the scaled operator, by
/// enumerating every `s`-column subset `S` and taking the largest deviation of
/// the spectrum of `A_S^* A_S` from 1.
pub fn rip_constant_bruteforce<T: Real>(op: &MeasurementOperator<T>, s: usize) -> Result<T> {
    let n = op.cols();
    if n > RIP_MAX_COLUMNS || s > RIP_MAX_ORDER {
        return Err(domain(format!(
            "brute-force RIP limited to N <= {RIP_MAX_COLUMNS}, s <= {RIP_MAX_ORDER} (got N = {n}, s = {s})"
        )));
    }
    if s == 0 || s > n {
        return Err(domain(format!("RIP order {s} must lie in 1..={n}")));
    }
    let columns: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|j| {
            op.scaled_column(j)
                .into_iter()
                .map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
                .collect()
        })
        .collect();
    Ok(T::lit(rip_of_columns(&columns, s)))
}

/// Brute-force `delta_s` of the matrix whose columns are given.
pub fn rip_of_columns(columns: &[Vec<Complex<f64>>], s: usize) -> f64 {
    let mut worst = 0.0f64;
    for subset in combinations(columns.len(), s) {
        let gram = nalgebra::DMatrix::from_fn(s, s, |a, b| {
            columns[subset[a]]
                .iter()
                .zip(&columns[subset[b]])
                .fold(Complex::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
        });
        let eig = gram.symmetric_eigenvalues();
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(hi - 1.0).max(1.0 - lo);
    }
    worst
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Constants of the `l^2` robust null space property.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RnspConstants<T> {
    pub rho: T,
    pub tau: T,
}

impl<T: Real> RnspConstants<T> {
    pub fn new(rho: T, tau: T) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) || !(tau > T::zero()) {
            return Err(domain("rNSP constants need 0 < rho < 1 and tau > 0"));
        }
        Ok(RnspConstants { rho, tau })
    }

    /// Constants inherited from `delta_{2s} <= 1/4`: `rho = sqrt(2)/3`, `tau = 2 sqrt(5)/3`.
    pub fn from_rip_quarter() -> Self {
        RnspConstants {
            rho: T::SQRT_2() / T::lit(3.0),
            tau: T::lit(2.0) * T::lit(5.0).sqrt() / T::lit(3.0),
        }
    }

    pub fn c1(&self) -> T {
        T::lit(2.0) * (T::one() + self.rho) / (T::one() - self.rho)
    }

    pub fn c2(&self) -> T {
        T::lit(4.0) * self.tau / (T::one() - self.rho)
    }

    pub fn c3(&self) -> T {
        let p = T::one() + self.rho;
        T::lit(2.0) * p * p / (T::one() - self.rho)
    }

    pub fn c4(&self) -> T {
        T::lit(2.0) * self.tau * (T::lit(3.0) + self.rho) / (T::one() - self.rho)
    }

    /// `D / sqrt(s)` with `D = (1 + rho) / ((3 + rho) tau)`: the largest admissible weight.
    pub fn lambda_max(&self, s: usize) -> T {
        (T::one() + self.rho) / ((T::lit(3.0) + self.rho) * self.tau) / T::from_count(s).sqrt()
    }
}

/// Right-hand sides of the `l^1` and `l^2` error bounds for any SR-LASSO
/// minimizer when the rNSP of order `s` holds:
///
/// * `C1 sigma + (C1/lambda + C2 sqrt(s)) ||h|| / 2`
/// * `C3 sigma / sqrt(s) + (C3/(sqrt(s) lambda) + C4) ||h|| / 2`
///
/// where `sigma = sigma_s(z*)_1` and `h` is the noise.
pub fn srlasso_error_certificate<T: Real>(
    constants: RnspConstants<T>,
    lambda: T,
    s: usize,
    sigma_s1: T,
    h_norm: T,
) -> Result<(T, T)> {
    RnspConstants::new(constants.rho, constants.tau)?;
    if s == 0 {
        return Err(domain("sparsity must be at least 1"));
    }
    let max = constants.lambda_max(s);
    // admit the endpoint up to rounding of the closed forms
    if !(lambda > T::zero()) || lambda > max * (T::one() + T::lit(1e-12)) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} outside the admissible interval (0, {max}]"
        )));
    }
    let half = T::lit(0.5);
    let rs = T::from_count(s).sqrt();
    let (c1, c2, c3, c4) = (constants.c1(), constants.c2(), constants.c3(), constants.c4());
    let l1 = c1 * sigma_s1 + half * (c1 / lambda + c2 * rs) * h_norm;
    let l2 = c3 * sigma_s1 / rs + half * (c3 / (rs * lambda) + c4) * h_norm;
    Ok((l1, l2))
}
