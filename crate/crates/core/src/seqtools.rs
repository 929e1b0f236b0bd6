//! Rearrangements, `l^q` and weak-Lorentz norms, best s-term errors and the
//! Stechkin right-hand side.
//!
//! Sequences are finite slices of complex values, listed in canonical index
//! order; that order is what breaks ties in the rearrangement. Logarithms are
//! natural.

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Exponent of an `l^q` quantity: a finite `q > 0` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    pub fn finite(q: T) -> Result<Self> {
        if !(q > T::zero()) || !q.is_finite() {
            return Err(domain("exponent must be positive and finite"));
        }
        Ok(Exponent::Finite(q))
    }

    /// `1/q`, zero for `q = inf`.
    pub fn reciprocal(self) -> T {
        match self {
            Exponent::Finite(q) => q.recip(),
            Exponent::Infinity => T::zero(),
        }
    }
}

/// Non-increasing magnitudes `|c*_1| >= |c*_2| >= ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rearrangement<T> {
    magnitudes: Vec<T>,
}

impl<T: Real> Rearrangement<T> {
    /// Wraps magnitudes that are already sorted non-increasingly.
    pub fn from_sorted(magnitudes: Vec<T>) -> Result<Self> {
        if magnitudes.windows(2).any(|w| w[0] < w[1]) {
            return Err(domain("magnitudes are not non-increasing"));
        }
        if magnitudes.iter().any(|m| !m.is_finite() || *m < T::zero()) {
            return Err(domain("magnitudes must be finite and non-negative"));
        }
        Ok(Rearrangement { magnitudes })
    }

    /// Sorts arbitrary non-negative magnitudes.
    pub fn from_magnitudes(mut magnitudes: Vec<T>) -> Self {
        magnitudes.sort_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
        Rearrangement { magnitudes }
    }

    pub fn magnitudes(&self) -> &[T] {
        &self.magnitudes
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }
}

/// Positions of `c` sorted by non-increasing magnitude; ties keep input order.
pub fn rearrangement_order<T: Real>(c: &[Complex<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&i, &j| {
        c[j].norm()
            .partial_cmp(&c[i].norm())
            .expect("finite coefficients")
    });
    order
}

pub fn rearrange<T: Real>(c: &[Complex<T>]) -> Rearrangement<T> {
    let magnitudes = rearrangement_order(c).into_iter().map(|i| c[i].norm()).collect();
    Rearrangement { magnitudes }
}

fn lq_of_magnitudes<T: Real>(mags: impl Iterator<Item = T>, q: Exponent<T>) -> T {
    match q {
        Exponent::Infinity => mags.fold(T::zero(), T::max),
        Exponent::Finite(q) => {
            let mags: Vec<T> = mags.collect();
            let scale = mags.iter().copied().fold(T::zero(), T::max);
            if scale == T::zero() {
                return T::zero();
            }
            // scaled to avoid overflow/underflow for large or small q
            let s: T = mags.iter().map(|&m| (m / scale).powf(q)).sum();
            scale * s.powf(q.recip())
        }
    }
}

pub fn lq_norm<T: Real>(c: &[Complex<T>], q: Exponent<T>) -> T {
    lq_of_magnitudes(c.iter().map(|z| z.norm()), q)
}

/// `sup_i |c*_i| i^{1/p} (max{1, log i})^{-a/p}`; `a = 0` gives the weak `l^p` norm.
pub fn weak_lorentz_norm<T: Real>(c: &Rearrangement<T>, p: T, a: T) -> Result<T> {
    if !(p > T::zero()) || !(a >= T::zero()) {
        return Err(domain("weak Lorentz norm needs p > 0 and a >= 0"));
    }
    let inv_p = p.recip();
    Ok(c.magnitudes()
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let i = T::from_count(k + 1);
            m * i.powf(inv_p) * i.ln().max(T::one()).powf(-a * inv_p)
        })
        .fold(T::zero(), T::max))
}

/// `sigma_s(c)_q`: the `l^q` norm of everything but the `s` largest magnitudes.
pub fn best_s_term_error<T: Real>(c: &[Complex<T>], s: usize, q: Exponent<T>) -> T {
    best_s_term_error_sorted(&rearrange(c), s, q)
}

pub fn best_s_term_error_sorted<T: Real>(c: &Rearrangement<T>, s: usize, q: Exponent<T>) -> T {
    lq_of_magnitudes(c.magnitudes().iter().skip(s).copied(), q)
}

/// All `sigma_s(c)_q` for `s = 0..len`, in one pass from the tail.
pub fn best_s_term_profile<T: Real>(c: &Rearrangement<T>, q: Exponent<T>) -> Vec<T> {
    let mags = c.magnitudes();
    let mut out = vec![T::zero(); mags.len() + 1];
    match q {
        Exponent::Infinity => {
            out[..mags.len()].copy_from_slice(mags);
        }
        Exponent::Finite(q) => {
            let mut acc = T::zero();
            for s in (0..mags.len()).rev() {
                acc = acc + mags[s].powf(q);
                out[s] = acc.powf(q.recip());
            }
        }
    }
    out
}

/// Rate factor `(max{1,s})^{1/q - 1/p} (max{1, log max{1,s}})^{a/p}`.
pub fn stechkin_factor<T: Real>(s: usize, p: T, q: Exponent<T>, a: T) -> Result<T> {
    if !(p > T::zero()) || !(a >= T::zero()) {
        return Err(domain("Stechkin bound needs p > 0 and a >= 0"));
    }
    if let Exponent::Finite(qv) = q {
        if p >= qv {
            return Err(domain("Stechkin bound needs p < q"));
        }
    }
    let s1 = T::from_count(s.max(1));
    Ok(s1.powf(q.reciprocal() - p.recip()) * s1.ln().max(T::one()).powf(a / p))
}

/// `norm_value` times [`stechkin_factor`].
pub fn stechkin_rhs<T: Real>(s: usize, p: T, q: Exponent<T>, a: T, norm_value: T) -> Result<T> {
    Ok(norm_value * stechkin_factor(s, p, q, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn re(v: &[f64]) -> Vec<Complex<f64>> {
        v.iter().map(|&x| Complex::new(x, 0.0)).collect()
    }

    #[test]
    fn rearrange_examples() {
        let c = vec![Complex::new(3.0, 0.0), Complex::new(-1.0, 0.0), Complex::new(0.0, 2.0)];
        assert_eq!(rearrange(&c).magnitudes(), &[3.0, 2.0, 1.0]);
        assert!(rearrange::<f64>(&[]).is_empty());
        assert_eq!(rearrange(&re(&[1.0, 1.0])).magnitudes(), &[1.0, 1.0]);
        assert_eq!(rearrangement_order(&re(&[1.0, 2.0, 1.0])), vec![1, 0, 2]);
    }

    #[test]
    fn lq_examples() {
        assert_relative_eq!(lq_norm(&re(&[3.0, 4.0]), Exponent::Finite(2.0)), 5.0);
        assert_eq!(lq_norm(&re(&[3.0, 4.0]), Exponent::Infinity), 4.0);
        assert_eq!(lq_norm::<f64>(&[], Exponent::Finite(0.5)), 0.0);
        assert_eq!(lq_norm::<f64>(&[], Exponent::Infinity), 0.0);
        assert!(Exponent::finite(0.0).is_err());
    }

    #[test]
    fn weak_lorentz_examples() {
        let r = Rearrangement::from_sorted((1..=100).map(|i| (i as f64).powf(-0.5)).collect()).unwrap();
        assert_relative_eq!(weak_lorentz_norm(&r, 2.0, 0.0).unwrap(), 1.0, epsilon = 1e-12);
        let r = Rearrangement::from_sorted(vec![5.0]).unwrap();
        assert_eq!(weak_lorentz_norm(&r, 1.0, 3.0).unwrap(), 5.0);
        let r = Rearrangement::from_sorted(vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(weak_lorentz_norm(&r, 2.0, 0.0).unwrap(), 2f64.sqrt());
        assert!(weak_lorentz_norm(&r, 0.0, 0.0).is_err());
        assert!(Rearrangement::from_sorted(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn best_s_term_examples() {
        let c = re(&[3.0, 1.0, 2.0]);
        assert_relative_eq!(best_s_term_error(&c, 1, Exponent::Finite(2.0)), 5f64.sqrt());
        assert_relative_eq!(best_s_term_error(&c, 2, Exponent::Finite(1.0)), 1.0);
        assert_eq!(best_s_term_error(&c, 0, Exponent::Infinity), 3.0);
        assert_eq!(best_s_term_error(&c, 3, Exponent::Finite(1.0)), 0.0);
        assert_eq!(best_s_term_error(&c, 7, Exponent::Infinity), 0.0);

        let prof = best_s_term_profile(&rearrange(&c), Exponent::Finite(2.0));
        assert_relative_eq!(prof[1], 5f64.sqrt());
        assert_eq!(prof[3], 0.0);
    }

    #[test]
    fn stechkin_examples() {
        assert_eq!(stechkin_rhs(0, 1.0, Exponent::Finite(2.0), 0.0, 1.0).unwrap(), 1.0);
        // s = 7: 7^{-1/2} * ln 7
        let expected = 7f64.powf(-0.5) * 7f64.ln();
        assert_relative_eq!(
            stechkin_rhs(7, 1.0, Exponent::Finite(2.0), 1.0, 1.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_relative_eq!(stechkin_rhs(4, 1.0, Exponent::Infinity, 0.0, 3.0).unwrap(), 0.75);
        assert!(stechkin_rhs(4, 2.0, Exponent::Finite(1.0), 0.0, 1.0).is_err());
        assert!(stechkin_rhs(4, 2.0, Exponent::Finite(2.0), 0.0, 1.0).is_err());
    }
}
