//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls the routine it checks: counts come from box scans,
//! best s-term errors from subset enumeration and SR-LASSO minima from exact
//! block coordinate descent.

#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f7e57)
}

pub fn random_complex(g: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)))
        .collect()
}

/// Calls `visit` on every point of the box `prod_j [-b_j, b_j]`.
pub fn for_each_in_box(bounds: &[i64], mut visit: impl FnMut(&[i64])) {
    let d = bounds.len();
    let mut n: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        visit(&n);
        let mut j = 0;
        loop {
            if j == d {
                return;
            }
            if n[j] < bounds[j] {
                n[j] += 1;
                break;
            }
            n[j] = -bounds[j];
            j += 1;
        }
    }
}

pub fn brute_hc(d: usize, r: f64) -> usize {
    let b = r.max(0.0).ceil() as i64;
    let mut count = 0;
    for_each_in_box(&vec![b; d], |n| {
        let w: f64 = n.iter().map(|&k| 1.0 + k.abs() as f64).product();
        if w <= r {
            count += 1;
        }
    });
    count
}

pub fn brute_mixed(r: f64, alpha: &[f64], positive_only: bool) -> usize {
    let bounds: Vec<i64> = alpha.iter().map(|a| r.max(1.0).powf(1.0 / a).ceil() as i64).collect();
    let mut count = 0;
    for_each_in_box(&bounds, |n| {
        if positive_only && n.iter().any(|&k| k < 0) {
            return;
        }
        let w: f64 = n.iter().zip(alpha).map(|(&k, a)| (1.0 + k.abs() as f64).powf(*a)).product();
        if w < r {
            count += 1;
        }
    });
    count
}

pub fn brute_sum(r: f64, beta: &[f64]) -> usize {
    let bounds: Vec<i64> = beta.iter().map(|b| r.max(1.0).powf(1.0 / b).ceil() as i64).collect();
    let mut count = 0;
    for_each_in_box(&bounds, |n| {
        let w: f64 = n.iter().zip(beta).map(|(&k, b)| (k.abs() as f64).powf(*b)).sum();
        if w < r {
            count += 1;
        }
    });
    count
}

/// `min ||c - w||_q` over `w` supported on at most `s` positions, by trying
/// every support of size `min(s, len)`.
pub fn brute_sigma(c: &[C64], s: usize, q: f64) -> f64 {
    let n = c.len();
    let k = s.min(n);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let tail: f64 = (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| c[i].norm().powf(q))
            .sum();
        best = best.min(tail.powf(1.0 / q));
    }
    best
}

/// Row-major dense complex matrix, kept apart from the library types.
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl Mat {
    pub fn random(g: &mut ChaCha8Rng, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: random_complex(g, rows * cols),
        }
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn mul(&self, z: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.data[i * self.cols + j] * z[j]).sum())
            .collect()
    }
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn srlasso_objective(a: &Mat, b: &[C64], lambda: f64, z: &[C64]) -> f64 {
    let az = a.mul(z);
    let res: Vec<C64> = az.iter().zip(b).map(|(x, y)| x - y).collect();
    lambda * z.iter().map(|x| x.norm()).sum::<f64>() + norm2(&res)
}

/// Minimizes `lambda t + sqrt(c0 - 2 g t + alpha t^2)` over `t >= 0` by
/// golden-section search (the function is convex in `t`).
fn block_minimizer(lambda: f64, c0: f64, g: f64, alpha: f64) -> f64 {
    let f = |t: f64| lambda * t + (c0 - 2.0 * g * t + alpha * t * t).max(0.0).sqrt();
    let (mut lo, mut hi) = (0.0f64, 2.0 * g / alpha.max(1e-300) + 1.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = (lo + hi) / 2.0;
    if f(0.0) <= f(t) {
        0.0
    } else {
        t
    }
}

/// Block coordinate descent on `lambda ||z||_1 + ||A z - b||_2`, one complex
/// coordinate at a time. For a fixed modulus `t` the best phase aligns
/// `a_j z_j` against the residual, leaving a convex problem in `t`.
pub fn srlasso_oracle(a: &Mat, b: &[C64], lambda: f64) -> (Vec<C64>, f64) {
    let n = a.cols;
    let cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut z = vec![C64::new(0.0, 0.0); n];
    let mut res: Vec<C64> = b.iter().map(|x| -x).collect();
    let mut prev = f64::INFINITY;
    for _sweep in 0..20_000 {
        for j in 0..n {
            // residual without coordinate j
            for (r, x) in res.iter_mut().zip(&cols[j]) {
                *r -= x * z[j];
            }
            let g: C64 = cols[j].iter().zip(&res).map(|(x, r)| x.conj() * r).sum();
            let alpha: f64 = cols[j].iter().map(|x| x.norm_sqr()).sum();
            let c0: f64 = res.iter().map(|x| x.norm_sqr()).sum();
            let t = block_minimizer(lambda, c0, g.norm(), alpha);
            z[j] = if g.norm() > 0.0 { -g / g.norm() * t } else { C64::new(0.0, 0.0) };
            for (r, x) in res.iter_mut().zip(&cols[j]) {
                *r += x * z[j];
            }
        }
        let obj = srlasso_objective(a, b, lambda, &z);
        if prev - obj < 1e-15 {
            return (z, obj);
        }
        prev = obj;
    }
    let obj = srlasso_objective(a, b, lambda, &z);
    (z, obj)
}
