//! Square-root LASSO, `min_z lambda ||z||_1 + ||A z - b||_2`, over complex `z`.
//!
//! The solver is a primal-dual hybrid gradient (Chambolle-Pock) iteration on
//! the saddle-point form
//!
//! ```text
//! min_z max_{||y||_2 <= 1}  lambda ||z||_1 + Re<y, A z - b>
//! ```
//!
//! The dual step is a shift by `b` followed by projection onto the unit ball,
//! the primal step is complex soft-thresholding. Step sizes are rebalanced
//! adaptively (keeping their product fixed) whenever one residual dominates.
//! The returned point is the best iterate seen, so the recorded objective is
//! non-increasing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operator::{check_len, LinearOperator};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative tolerance on the duality gap, or jointly on iterate and objective change.
    pub tol: f64,
    /// `tau * sigma * L^2 = step_scale^2`.
    pub step_scale: f64,
    /// Per-iteration CSV trace (`iter,objective,residual_norm,gap`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            tol: 1e-9,
            step_scale: 0.99,
            trace_path: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Validation("tol must be positive".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale < 1.0) {
            return Err(Error::Validation("step_scale must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult<T> {
    pub z_sharp: Vec<Complex<T>>,
    pub objective: T,
    pub iters_used: usize,
    pub converged: bool,
    /// Objective of the accepted iterates (non-increasing).
    pub history: Vec<T>,
    /// Relative duality gap at the returned point.
    pub relative_gap: T,
}

fn l1<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().map(|x| x.norm()).sum()
}

fn l2<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

fn diff_norm<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<T>().sqrt()
}

/// `lambda ||z||_1 + ||A z - b||_2`.
pub fn objective<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    lambda: T,
    z: &[Complex<T>],
) -> Result<T> {
    check_len(op.rows(), b.len())?;
    let az = op.apply(z)?;
    Ok(lambda * l1(z) + diff_norm(&az, b))
}

/// Shrinks the modulus by `t`, keeping the phase; exactly zero at or below `t`.
pub fn soft_threshold<T: Real>(x: Complex<T>, t: T) -> Complex<T> {
    let r = x.norm();
    if r <= t {
        Complex::default()
    } else {
        x * ((r - t) / r)
    }
}

/// Estimate of `||A||_2` by power iteration on `A^* A`.
pub fn operator_norm_estimate<T: Real, A: LinearOperator<T> + ?Sized>(op: &A, iters: usize) -> T {
    let n = op.cols();
    if n == 0 || op.rows() == 0 {
        return T::zero();
    }
    // deterministic, non-symmetric start so it is unlikely to be orthogonal
    // to the top singular vector
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|k| Complex::new(T::one(), T::lit(((k * 7 + 3) % 11) as f64 / 11.0)))
        .collect();
    let mut av = vec![Complex::default(); op.rows()];
    let mut est = T::zero();
    for _ in 0..iters {
        let nv = l2(&v);
        if nv == T::zero() {
            break;
        }
        v.iter_mut().for_each(|x| *x = *x / nv);
        op.apply_into(&v, &mut av);
        est = l2(&av);
        op.adjoint_into(&av, &mut v);
    }
    est
}

fn all_finite<T: Real>(v: &[Complex<T>]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Solves the square-root LASSO from `z = 0`.
///
/// `norm_bound`, when known, caps the power-iteration estimate of `||A||_2`.
pub fn solve<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    lambda: T,
    config: &SolverConfig,
) -> Result<SolverResult<T>> {
    solve_with_norm_bound(op, b, lambda, config, None)
}

pub fn solve_with_norm_bound<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    lambda: T,
    config: &SolverConfig,
    norm_bound: Option<T>,
) -> Result<SolverResult<T>> {
    config.validate()?;
    check_len(op.rows(), b.len())?;
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    if !(lambda > T::zero()) {
        return Err(domain("lambda must be positive"));
    }
    if !all_finite(b) {
        return Err(Error::NonFinite("right-hand side"));
    }
    let (m, n) = (op.rows(), op.cols());
    let tol = T::lit(config.tol);
    let zero = vec![Complex::<T>::default(); n];
    let b_norm = l2(b);
    let start_obj = b_norm;

    let mut trace = match &config.trace_path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "iter,objective,residual_norm,gap")?;
            Some(w)
        }
        None => None,
    };

    if b_norm == T::zero() || n == 0 {
        if let Some(w) = trace.as_mut() {
            writeln!(w, "0,{:e},{:e},0", start_obj.to_f64_lossy(), b_norm.to_f64_lossy())?;
        }
        return Ok(SolverResult {
            z_sharp: zero,
            objective: start_obj,
            iters_used: 0,
            converged: true,
            history: vec![start_obj],
            relative_gap: T::zero(),
        });
    }

    let mut est = operator_norm_estimate(op, 30) * T::lit(1.01);
    if let Some(bound) = norm_bound {
        est = est.min(bound);
    }
    if !(est > T::zero()) || !est.is_finite() {
        return Err(Error::NonFinite("operator norm estimate"));
    }
    let scale = T::lit(config.step_scale);
    let mut tau = scale / est;
    let mut sigma = scale / est;

    let mut z = zero.clone();
    let mut z_new = zero.clone();
    let mut y = vec![Complex::<T>::default(); m];
    let mut y_new = y.clone();
    let mut az = vec![Complex::<T>::default(); m];
    let mut az_new = az.clone();
    let mut aty = zero.clone();
    let mut aty_new = zero.clone();
    let mut ext = vec![Complex::<T>::default(); m];

    let mut best_z = zero.clone();
    let mut best_obj = start_obj;
    let mut best_gap = T::infinity();
    let mut history = vec![start_obj];
    let mut prev_obj = start_obj;
    let mut converged = false;
    let mut iters_used = 0;

    let mut adapt = T::lit(0.5);
    let eta = T::lit(0.95);
    let two = T::lit(2.0);

    for it in 1..=config.max_iters {
        iters_used = it;
        // dual: y+ = P_ball(y + sigma (A zbar - b)),  A zbar = 2 A z_k - A z_{k-1}
        for i in 0..m {
            let v = y[i] + (ext[i] - b[i]) * sigma;
            y_new[i] = v;
        }
        let ny = l2(&y_new);
        if ny > T::one() {
            y_new.iter_mut().for_each(|v| *v = *v / ny);
        }
        // primal: z+ = soft(z - tau A^* y+, tau lambda)
        op.adjoint_into(&y_new, &mut aty_new);
        let thr = tau * lambda;
        for j in 0..n {
            z_new[j] = soft_threshold(z[j] - aty_new[j] * tau, thr);
        }
        op.apply_into(&z_new, &mut az_new);

        let res = diff_norm(&az_new, b);
        let obj = lambda * l1(&z_new) + res;
        if !obj.is_finite() {
            return Err(Error::NonFinite("solver iterate"));
        }

        // duality gap with y+ rescaled into the dual feasible set
        let inf = aty_new.iter().map(|x| x.norm()).fold(T::zero(), T::max);
        let shrink = if inf > lambda { lambda / inf } else { T::one() };
        let dual_val = -(y_new
            .iter()
            .zip(b)
            .map(|(yi, bi)| (yi.conj() * *bi).re)
            .sum::<T>())
            * shrink;
        let gap = (obj - dual_val).max(T::zero()) / obj.max(T::min_positive_value());

        if obj <= best_obj {
            best_obj = obj;
            best_z.copy_from_slice(&z_new);
            best_gap = gap;
            history.push(obj);
        }

        if let Some(w) = trace.as_mut() {
            writeln!(
                w,
                "{it},{:e},{:e},{:e}",
                obj.to_f64_lossy(),
                res.to_f64_lossy(),
                gap.to_f64_lossy()
            )?;
        }

        // a fixed point needs both iterates to stall, not just z (which sits
        // at 0 while the dual variable is still growing)
        let tiny = T::min_positive_value();
        let dz = diff_norm(&z_new, &z) / l2(&z_new).max(tiny);
        let dy = diff_norm(&y_new, &y) / l2(&y_new).max(tiny);
        let rel_obj = (prev_obj - obj).abs() / obj.max(tiny);
        if best_gap <= tol || (dz <= tol && dy <= tol && rel_obj <= tol) {
            converged = true;
        }

        // residual balancing
        let mut p_res = T::zero();
        let mut d_res = T::zero();
        for j in 0..n {
            let pj = (z[j] - z_new[j]) / tau - (aty[j] - aty_new[j]);
            p_res = p_res + pj.norm_sqr();
        }
        for i in 0..m {
            let di = (y[i] - y_new[i]) / sigma - (az[i] - az_new[i]);
            d_res = d_res + di.norm_sqr();
        }
        let (p_res, d_res) = (p_res.sqrt(), d_res.sqrt());

        for i in 0..m {
            ext[i] = az_new[i] * two - az[i];
        }
        std::mem::swap(&mut z, &mut z_new);
        std::mem::swap(&mut y, &mut y_new);
        std::mem::swap(&mut az, &mut az_new);
        std::mem::swap(&mut aty, &mut aty_new);
        prev_obj = obj;

        if converged {
            break;
        }
        if p_res > two * d_res {
            tau = tau / (T::one() - adapt);
            sigma = sigma * (T::one() - adapt);
            adapt = adapt * eta;
        } else if d_res > two * p_res {
            tau = tau * (T::one() - adapt);
            sigma = sigma / (T::one() - adapt);
            adapt = adapt * eta;
        }
    }

    if let Some(mut w) = trace {
        w.flush()?;
    }

    let objective = objective(op, b, lambda, &best_z)?;
    Ok(SolverResult {
        z_sharp: best_z,
        objective,
        iters_used,
        converged,
        history,
        relative_gap: best_gap,
    })
}
