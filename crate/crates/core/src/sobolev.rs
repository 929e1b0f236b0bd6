//! Finitely supported periodic functions on the torus `[-pi, pi)^d`.
//!
//! A function is its coefficient map `n -> f_n` against the orthonormal basis
//! `phi_n(x) = (2 pi)^{-d/2} e^{i n.x}`. Norms and `L^2` errors are therefore
//! exact finite sums.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex;
use rand::seq::index;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::indexsets::{
    mixed_sublevel_set, mixed_weight, sum_sublevel_set, sum_weight, AnisotropyMixed, AnisotropySum, IndexSet,
    MultiIndex,
};
use crate::rng::{rng, Stream};
use crate::scalar::Real;

/// Which Sobolev scale a function is measured in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SmoothnessClass<T> {
    Mixed(AnisotropyMixed<T>),
    Sum(AnisotropySum<T>),
}

impl<T: Real> SmoothnessClass<T> {
    pub fn dim(&self) -> usize {
        match self {
            SmoothnessClass::Mixed(a) => a.dim(),
            SmoothnessClass::Sum(b) => b.dim(),
        }
    }

    /// The un-squared weight of `n`: mixed product or `1 + sum`.
    pub fn weight(&self, n: &MultiIndex) -> T {
        match self {
            SmoothnessClass::Mixed(a) => mixed_weight(n, a),
            SmoothnessClass::Sum(b) => sum_weight(n, b),
        }
    }

    /// Algebraic rate exponent: `h(alpha)` or `g(beta)`.
    pub fn rate_exponent(&self) -> T {
        match self {
            SmoothnessClass::Mixed(a) => a.h(),
            SmoothnessClass::Sum(b) => b.g(),
        }
    }

    /// Short label such as `mixed:1,2` or `sum:2,2`; parses back with `FromStr`.
    pub fn label(&self) -> String {
        let (name, v) = match self {
            SmoothnessClass::Mixed(a) => ("mixed", a.alpha()),
            SmoothnessClass::Sum(b) => ("sum", b.beta()),
        };
        let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        format!("{name}:{}", parts.join(","))
    }
}

impl<T: Real> FromStr for SmoothnessClass<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("class `{s}` is not of the form kind:v1,v2,...")))?;
        let values = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::Validation(format!("bad number `{t}` in class `{s}`")))
            })
            .collect::<Result<Vec<T>>>()?;
        match kind.trim() {
            "mixed" => Ok(SmoothnessClass::Mixed(AnisotropyMixed::new(values)?)),
            "sum" => Ok(SmoothnessClass::Sum(AnisotropySum::new(values)?)),
            other => Err(Error::Validation(format!("unknown class kind `{other}`"))),
        }
    }
}

/// `f = sum_n f_n phi_n` with finitely many nonzero `f_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction<T> {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Complex<T>>,
}

impl<T: Real> PeriodicFunction<T> {
    pub fn zero(dim: usize) -> Self {
        PeriodicFunction {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(dim: usize, coeffs: impl IntoIterator<Item = (MultiIndex, Complex<T>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, c) in coeffs {
            if n.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: n.dim(),
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite("function coefficients"));
            }
            map.insert(n, c);
        }
        Ok(PeriodicFunction { dim, coeffs: map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients in canonical index order.
    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex<T>> {
        &self.coeffs
    }

    pub fn coeff(&self, n: &MultiIndex) -> Complex<T> {
        self.coeffs.get(n).copied().unwrap_or_else(Complex::default)
    }

    /// Number of stored coefficients.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff_values(&self) -> Vec<Complex<T>> {
        self.coeffs.values().copied().collect()
    }

    /// Coefficients on `set`, in column order (zero off the support).
    pub fn restrict(&self, set: &IndexSet) -> Vec<Complex<T>> {
        set.iter().map(|n| self.coeff(n)).collect()
    }

    /// The part of `f` outside `set`.
    pub fn outside(&self, set: &IndexSet) -> PeriodicFunction<T> {
        PeriodicFunction {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(n, _)| !set.contains(n))
                .map(|(n, c)| (n.clone(), *c))
                .collect(),
        }
    }

    /// Direct summation of `sum_n f_n (2 pi)^{-d/2} e^{i n.x}`.
    pub fn evaluate(&self, x: &[T]) -> Complex<T> {
        assert_eq!(x.len(), self.dim, "point dimension");
        let mut acc = Complex::new(T::zero(), T::zero());
        for (n, c) in &self.coeffs {
            let phase = n
                .entries()
                .iter()
                .zip(x)
                .fold(T::zero(), |p, (&nj, &xj)| p + T::lit(nj as f64) * xj);
            acc = acc + *c * Complex::from_polar(T::one(), phase);
        }
        acc * basis_normalization::<T>(self.dim)
    }

    /// `L^2` norm, equal to the `l^2` norm of the coefficients.
    pub fn l2_norm(&self) -> T {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn sobolev_norm(&self, cls: &SmoothnessClass<T>) -> T {
        self.coeffs
            .iter()
            .map(|(n, c)| {
                let w = cls.weight(n);
                w * w * c.norm_sqr()
            })
            .sum::<T>()
            .sqrt()
    }

    pub fn scale(&self, factor: T) -> PeriodicFunction<T> {
        PeriodicFunction {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(n, c)| (n.clone(), *c * factor)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function serializes")
    }
}

/// `(2 pi)^{-d/2}`.
pub fn basis_normalization<T: Real>(d: usize) -> T {
    (T::lit(2.0) * T::PI()).powf(-T::from_count(d) / T::lit(2.0))
}

/// Exact `||f - g||_{L^2}` over the union of supports.
pub fn l2_error<T: Real>(f: &PeriodicFunction<T>, g: &PeriodicFunction<T>) -> Result<T> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch {
            expected: f.dim,
            got: g.dim,
        });
    }
    let mut acc = T::zero();
    for (n, c) in &f.coeffs {
        acc = acc + (*c - g.coeff(n)).norm_sqr();
    }
    for (n, c) in &g.coeffs {
        if !f.coeffs.contains_key(n) {
            acc = acc + c.norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// The `k` frequencies of smallest `cls.weight`, together with every index
/// tied with the last of them.
pub fn lowest_weight_support<T: Real>(cls: &SmoothnessClass<T>, k: usize, cap: usize) -> Result<IndexSet> {
    if k == 0 {
        return Err(domain("support size must be at least 1"));
    }
    let mut bound = T::lit(2.0);
    let set = loop {
        let set = match cls {
            SmoothnessClass::Mixed(a) => mixed_sublevel_set(a, bound, cap)?,
            SmoothnessClass::Sum(b) => sum_sublevel_set(b, bound, cap)?,
        };
        if set.len() >= k {
            break set;
        }
        bound = bound * T::lit(2.0);
    };
    let mut w: Vec<T> = set.iter().map(|n| cls.weight(n)).collect();
    w.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    let cut = w[k - 1];
    let kept = set.iter().filter(|n| cls.weight(n) <= cut).cloned().collect();
    IndexSet::from_indices(cls.dim(), kept)
}

/// Test function near the unit sphere of `cls`: coefficients
/// `e^{i theta_n} weight(n)^{-(1 + decay_margin)}` on `support`, rescaled to
/// unit Sobolev norm.
pub fn generate_extremal<T: Real>(
    cls: &SmoothnessClass<T>,
    support: &IndexSet,
    decay_margin: T,
    seed: u64,
) -> Result<PeriodicFunction<T>> {
    if support.is_empty() {
        return Err(domain("extremal generator needs a non-empty support"));
    }
    if support.dim() != cls.dim() {
        return Err(Error::DimensionMismatch {
            expected: cls.dim(),
            got: support.dim(),
        });
    }
    if !(decay_margin > T::zero()) {
        return Err(domain("decay margin must be positive"));
    }
    let mut g = rng(seed, Stream::FunctionPhases);
    let expo = -(T::one() + decay_margin);
    let coeffs: Vec<(MultiIndex, Complex<T>)> = support
        .iter()
        .map(|n| {
            let theta = T::lit(g.gen::<f64>() * std::f64::consts::TAU);
            (n.clone(), Complex::from_polar(cls.weight(n).powf(expo), theta))
        })
        .collect();
    let f = PeriodicFunction::from_coeffs(support.dim(), coeffs)?;
    let norm = f.sobolev_norm(cls);
    Ok(f.scale(norm.recip()))
}

/// `s` unit-modulus, random-phase coefficients at distinct positions of `support`.
pub fn generate_sparse<T: Real>(support: &IndexSet, s: usize, seed: u64) -> Result<PeriodicFunction<T>> {
    if s == 0 || s > support.len() {
        return Err(domain(format!(
            "sparsity {s} must lie in 1..={}",
            support.len()
        )));
    }
    let mut pick = rng(seed, Stream::SparseSupport);
    let mut phases = rng(seed, Stream::FunctionPhases);
    let mut chosen = index::sample(&mut pick, support.len(), s).into_vec();
    chosen.sort_unstable();
    let coeffs: Vec<(MultiIndex, Complex<T>)> = chosen
        .into_iter()
        .map(|i| {
            let theta = T::lit(phases.gen::<f64>() * std::f64::consts::TAU);
            (support.indices()[i].clone(), Complex::from_polar(T::one(), theta))
        })
        .collect();
    PeriodicFunction::from_coeffs(support.dim(), coeffs)
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    dim: usize,
    entries: Vec<(Vec<i64>, f64, f64)>,
}

impl<T: Real> Serialize for PeriodicFunction<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionJson {
            dim: self.dim,
            entries: self
                .coeffs
                .iter()
                .map(|(n, c)| (n.entries().to_vec(), c.re.to_f64_lossy(), c.im.to_f64_lossy()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for PeriodicFunction<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FunctionJson::deserialize(d)?;
        PeriodicFunction::from_coeffs(
            raw.dim,
            raw.entries
                .into_iter()
                .map(|(n, re, im)| (MultiIndex::new(n), Complex::new(T::lit(re), T::lit(im)))),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexsets::hyperbolic_cross;
    use approx::assert_relative_eq;

    fn f1(entries: &[(i64, f64)]) -> PeriodicFunction<f64> {
        PeriodicFunction::from_coeffs(
            1,
            entries.iter().map(|&(n, c)| (MultiIndex::new(vec![n]), Complex::new(c, 0.0))),
        )
        .unwrap()
    }

    fn mixed(a: &[f64]) -> SmoothnessClass<f64> {
        SmoothnessClass::Mixed(AnisotropyMixed::new(a.to_vec()).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let inv = (2.0 * std::f64::consts::PI).powf(-0.5);
        assert_relative_eq!(f1(&[(0, 1.0)]).evaluate(&[1.234]).re, inv, epsilon = 1e-15);
        assert_relative_eq!(f1(&[(1, 1.0), (-1, 1.0)]).evaluate(&[0.0]).re, 2.0 * inv, epsilon = 1e-15);
        assert!(f1(&[(1, 1.0), (-1, -1.0)]).evaluate(&[0.0]).norm() < 1e-15);
        assert_relative_eq!(inv, 0.39894, epsilon = 1e-5);
    }

    #[test]
    fn sobolev_norm_examples() {
        let f = PeriodicFunction::from_coeffs(2, [(MultiIndex::zero(2), Complex::new(1.0, 0.0))]).unwrap();
        assert_eq!(f.sobolev_norm(&mixed(&[1.0, 1.0])), 1.0);
        let f = PeriodicFunction::from_coeffs(2, [(MultiIndex::new(vec![1, 0]), Complex::new(2.0, 0.0))]).unwrap();
        assert_relative_eq!(f.sobolev_norm(&mixed(&[1.0, 2.0])), 4.0);
        let f = PeriodicFunction::from_coeffs(2, [(MultiIndex::new(vec![1, 1]), Complex::new(1.0, 0.0))]).unwrap();
        let sum: SmoothnessClass<f64> = "sum:1,1".parse().unwrap();
        assert_relative_eq!(f.sobolev_norm(&sum), 3.0);
    }

    #[test]
    fn l2_error_examples() {
        let f = f1(&[(0, 3.0), (1, 0.0)]);
        assert_eq!(l2_error(&f, &f).unwrap(), 0.0);
        assert_eq!(l2_error(&f1(&[(0, 1.0)]), &f1(&[(0, 0.0)])).unwrap(), 1.0);
        assert_relative_eq!(l2_error(&f, &f1(&[(0, 0.0), (1, 4.0)])).unwrap(), 5.0);
        assert!(l2_error(&f, &PeriodicFunction::zero(2)).is_err());
    }

    #[test]
    fn extremal_generator() {
        let support = IndexSet::from_indices(1, vec![MultiIndex::zero(1)]).unwrap();
        let f = generate_extremal(&mixed(&[1.0]), &support, 0.5, 3).unwrap();
        assert_eq!(f.support_len(), 1);
        assert_relative_eq!(f.coeff(&MultiIndex::zero(1)).norm(), 1.0, epsilon = 1e-15);

        let hc = hyperbolic_cross(2, 20.0).unwrap();
        let cls = mixed(&[1.0, 1.0]);
        let f = generate_extremal(&cls, &hc, 0.5, 7).unwrap();
        assert!((f.sobolev_norm(&cls) - 1.0).abs() < 1e-12);
        let g = generate_extremal(&cls, &hc, 0.5, 7).unwrap();
        assert_eq!(f, g);
        let h = generate_extremal(&cls, &hc, 0.5, 8).unwrap();
        assert_ne!(f, h);
        assert!(generate_extremal(&cls, &hc, 0.0, 7).is_err());
    }

    #[test]
    fn sparse_generator() {
        let support = hyperbolic_cross(1, 3.0).unwrap();
        let f = generate_sparse::<f64>(&support, 5, 1).unwrap();
        assert_eq!(f.support_len(), 5);
        let f = generate_sparse::<f64>(&support, 1, 1).unwrap();
        assert_eq!(f.support_len(), 1);
        assert_relative_eq!(f.coeff_values()[0].norm(), 1.0, epsilon = 1e-15);
        assert_eq!(generate_sparse::<f64>(&support, 3, 9).unwrap(), generate_sparse::<f64>(&support, 3, 9).unwrap());
        assert!(generate_sparse::<f64>(&support, 6, 1).is_err());
    }

    #[test]
    fn json_layout() {
        let f = PeriodicFunction::from_coeffs(2, [(MultiIndex::new(vec![1, -2]), Complex::new(0.5, -1.0))]).unwrap();
        assert_eq!(f.to_json(), r#"{"dim":2,"entries":[[[1,-2],0.5,-1.0]]}"#);
        let back: PeriodicFunction<f64> = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn class_labels_round_trip() {
        let c: SmoothnessClass<f64> = "mixed:1,2.5".parse().unwrap();
        assert_eq!(c.label(), "mixed:1,2.5");
        assert!("foo:1".parse::<SmoothnessClass<f64>>().is_err());
        assert!("mixed:1,-1".parse::<SmoothnessClass<f64>>().is_err());
    }
}
