//! Multi-indices, hyperbolic crosses, anisotropic weights and the sublevel-set
//! counting functions for both weight families.
//!
//! Two inequality conventions coexist on purpose:
//!
//! * the hyperbolic cross of order `r` is `{ n : prod_j (1 + |n_j|) <= r }`;
//! * the counting functions use the strict inequality `weight(n) < r`.
//!
//! All enumeration is done by recursive coordinate slicing: fix one coordinate,
//! shrink the remaining budget, recurse. The innermost coordinate is counted in
//! closed form, so counting never scans a box.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Default upper bound on the number of indices any enumeration may produce.
pub const DEFAULT_INDEX_CAP: usize = 2_000_000;

/// A frequency `n` in `Z^d`.
///
/// The ordering is the canonical one used for matrix columns and coefficient
/// maps: first by the hyperbolic weight `prod_j (1 + |n_j|)`, then
/// lexicographically by entries.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// `prod_j (1 + |n_j|)`, saturating.
    pub fn hyperbolic_weight(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, &n| acc.saturating_mul(1 + n.unsigned_abs() as u128))
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hyperbolic_weight()
            .cmp(&other.hyperbolic_weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Smoothness vector of the dominating mixed smoothness space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyMixed<T> {
    alpha: Vec<T>,
}

impl<T: Real> AnisotropyMixed<T> {
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        validate_positive("alpha", &alpha)?;
        Ok(AnisotropyMixed { alpha })
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Smallest smoothness exponent, `h(alpha)`.
    pub fn h(&self) -> T {
        self.alpha.iter().copied().fold(T::infinity(), T::min)
    }

    /// Multiplicity of the smallest exponent, `p(alpha)`.
    pub fn p(&self) -> usize {
        let h = self.h();
        self.alpha.iter().filter(|&&a| a == h).count()
    }
}

/// Smoothness vector of the anisotropic (sum-type) Sobolev space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnisotropySum<T> {
    beta: Vec<T>,
}

impl<T: Real> AnisotropySum<T> {
    pub fn new(beta: Vec<T>) -> Result<Self> {
        validate_positive("beta", &beta)?;
        Ok(AnisotropySum { beta })
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// `g(beta) = (sum_j 1/beta_j)^{-1}`.
    pub fn g(&self) -> T {
        let s: T = self.beta.iter().map(|&b| b.recip()).sum();
        s.recip()
    }
}

fn validate_positive<T: Real>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(domain(format!("{name} must have at least one entry")));
    }
    if v.iter().any(|x| !x.is_finite() || *x <= T::zero()) {
        return Err(domain(format!("{name} entries must be finite and positive")));
    }
    Ok(())
}

/// Weight of the mixed space: `prod_j (1 + |n_j|)^{alpha_j}`.
pub fn mixed_weight<T: Real>(n: &MultiIndex, a: &AnisotropyMixed<T>) -> T {
    debug_assert_eq!(n.dim(), a.dim());
    n.entries()
        .iter()
        .zip(a.alpha())
        .map(|(&nj, &aj)| (T::one() + T::lit(nj.unsigned_abs() as f64)).powf(aj))
        .fold(T::one(), |acc, x| acc * x)
}

/// Weight of the sum-type space: `1 + sum_j |n_j|^{beta_j}`.
pub fn sum_weight<T: Real>(n: &MultiIndex, b: &AnisotropySum<T>) -> T {
    debug_assert_eq!(n.dim(), b.dim());
    T::one()
        + n.entries()
            .iter()
            .zip(b.beta())
            .map(|(&nj, &bj)| T::lit(nj.unsigned_abs() as f64).powf(bj))
            .sum::<T>()
}

/// Finite, duplicate-free, canonically ordered set of multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
}

impl IndexSet {
    /// Builds a set from arbitrary indices; sorts canonically and drops duplicates.
    pub fn from_indices(dim: usize, mut indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        if let Some(bad) = indices.iter().find(|n| n.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(IndexSet { dim, indices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    /// Column position of `n`, if present.
    pub fn position(&self, n: &MultiIndex) -> Option<usize> {
        self.indices.binary_search(n).ok()
    }

    pub fn contains(&self, n: &MultiIndex) -> bool {
        self.position(n).is_some()
    }

    /// Largest `|n_j|` over all indices and coordinates.
    pub fn max_abs_entry(&self) -> i64 {
        self.indices
            .iter()
            .flat_map(|n| n.entries().iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index set serializes")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.indices.iter())
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;
    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

fn hc_budget(r: f64) -> Result<u64> {
    if !r.is_finite() || r < 0.0 {
        return Err(domain("hyperbolic cross order must be finite and non-negative"));
    }
    Ok(r.floor().min(u64::MAX as f64 / 4.0) as u64)
}

// Number of n in Z^d with prod_j (1 + |n_j|) <= budget, or any value above
// `limit` once the count is known to exceed it.
fn hc_count(d: usize, budget: u64, limit: u64) -> u64 {
    if budget == 0 {
        return 0;
    }
    if d == 1 {
        return 2 * budget - 1;
    }
    let mut total = hc_count(d - 1, budget, limit);
    for t in 2..=budget {
        if total > limit {
            break;
        }
        total = total.saturating_add(2u64.saturating_mul(hc_count(d - 1, budget / t, limit)));
    }
    total
}

fn hc_enumerate(d: usize, budget: u64, prefix: &mut Vec<i64>, out: &mut Vec<MultiIndex>) {
    if prefix.len() == d {
        out.push(MultiIndex(prefix.clone()));
        return;
    }
    for t in 1..=budget {
        let k = (t - 1) as i64;
        prefix.push(k);
        hc_enumerate(d, budget / t, prefix, out);
        prefix.pop();
        if k != 0 {
            prefix.push(-k);
            hc_enumerate(d, budget / t, prefix, out);
            prefix.pop();
        }
    }
}

/// Exact cardinality of the hyperbolic cross of order `r`, without enumerating it.
/// Costs time proportional to the cardinality divided by the innermost slice.
pub fn hyperbolic_cross_size(d: usize, r: f64) -> Result<u64> {
    hyperbolic_cross_size_bounded(d, r, u64::MAX)
}

/// Like [`hyperbolic_cross_size`] but stops early: any returned value above
/// `limit` only certifies that the true size exceeds `limit`.
pub fn hyperbolic_cross_size_bounded(d: usize, r: f64, limit: u64) -> Result<u64> {
    if d == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    Ok(hc_count(d, hc_budget(r)?, limit))
}

/// `{ n in Z^d : prod_j (1 + |n_j|) <= r }` under the default cap.
pub fn hyperbolic_cross(d: usize, r: f64) -> Result<IndexSet> {
    hyperbolic_cross_capped(d, r, DEFAULT_INDEX_CAP)
}

/// Hyperbolic cross of order `r`; fails with [`Error::CapExceeded`] when its
/// cardinality would exceed `cap`.
pub fn hyperbolic_cross_capped(d: usize, r: f64, cap: usize) -> Result<IndexSet> {
    let predicted = hyperbolic_cross_size_bounded(d, r, cap as u64)?;
    if predicted > cap as u64 {
        return Err(Error::CapExceeded { predicted, cap });
    }
    let budget = hc_budget(r)?;
    let mut out = Vec::with_capacity(predicted as usize);
    if budget >= 1 {
        hc_enumerate(d, budget, &mut Vec::with_capacity(d), &mut out);
    }
    IndexSet::from_indices(d, out)
}

/// Largest integer order whose hyperbolic cross fits within `cap` indices,
/// searched in `[1, r]`.
pub fn largest_order_within_cap(d: usize, r: u64, cap: usize) -> Result<u64> {
    let fits = |order: u64| -> Result<bool> {
        Ok(hyperbolic_cross_size_bounded(d, order as f64, cap as u64)? <= cap as u64)
    };
    if fits(r)? {
        return Ok(r);
    }
    let (mut lo, mut hi) = (1u64, r);
    // invariant: size(lo) <= cap < size(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

// Largest t >= 0 with acc + t^e < bound.
fn last_level_sum<T: Real>(acc: T, e: T, bound: T) -> Option<u64> {
    let ok = |t: u64| acc + T::lit(t as f64).powf(e) < bound;
    if !ok(0) {
        return None;
    }
    let guess = (bound - acc).powf(e.recip()).to_f64_lossy();
    let mut t = if guess.is_finite() { guess.clamp(0.0, 1e15) as u64 } else { 0 };
    while t > 0 && !ok(t) {
        t -= 1;
    }
    while ok(t + 1) {
        t += 1;
    }
    Some(t)
}

/// `|{ n : prod_j (1 + |n_j|)^{alpha_j} < r }|`, over `Z^d` or, with
/// `positive_only`, over `Z_+^d`.
pub fn count_mixed<T: Real>(d: usize, r: T, a: &AnisotropyMixed<T>, positive_only: bool) -> u64 {
    assert_eq!(d, a.dim(), "anisotropy length must equal d");
    fn rec<T: Real>(k: usize, prod: T, r: T, alpha: &[T], sym: u64) -> u64 {
        let d = alpha.len();
        if k + 1 == d {
            // (1 + t)^a * prod < r, counted in closed form over t >= 0
            return match last_level_mixed(prod, alpha[k], r) {
                None => 0,
                Some(t) => 1 + sym * t,
            };
        }
        let mut total = 0u64;
        let mut t = 0u64;
        loop {
            let p = prod * (T::one() + T::lit(t as f64)).powf(alpha[k]);
            if !(p < r) {
                break;
            }
            let mult = if t == 0 { 1 } else { sym };
            total += mult * rec(k + 1, p, r, alpha, sym);
            t += 1;
        }
        total
    }
    if d == 0 {
        return 0;
    }
    rec(0, T::one(), r, a.alpha(), if positive_only { 1 } else { 2 })
}

// Largest t >= 0 with prod * (1 + t)^e < bound.
fn last_level_mixed<T: Real>(prod: T, e: T, bound: T) -> Option<u64> {
    let ok = |t: u64| prod * (T::one() + T::lit(t as f64)).powf(e) < bound;
    if !ok(0) {
        return None;
    }
    let guess = ((bound / prod).powf(e.recip()) - T::one()).to_f64_lossy();
    let mut t = if guess.is_finite() { guess.clamp(0.0, 1e15) as u64 } else { 0 };
    while t > 0 && !ok(t) {
        t -= 1;
    }
    while ok(t + 1) {
        t += 1;
    }
    Some(t)
}

/// `|{ n in Z^d : sum_j |n_j|^{beta_j} < r }|`.
pub fn count_sum<T: Real>(d: usize, r: T, b: &AnisotropySum<T>) -> u64 {
    assert_eq!(d, b.dim(), "anisotropy length must equal d");
    fn rec<T: Real>(k: usize, acc: T, r: T, beta: &[T]) -> u64 {
        let d = beta.len();
        if k + 1 == d {
            return match last_level_sum(acc, beta[k], r) {
                None => 0,
                Some(t) => 1 + 2 * t,
            };
        }
        let mut total = 0u64;
        let mut t = 0u64;
        loop {
            let s = acc + T::lit(t as f64).powf(beta[k]);
            if !(s < r) {
                break;
            }
            let mult = if t == 0 { 1 } else { 2 };
            total += mult * rec(k + 1, s, r, beta);
            t += 1;
        }
        total
    }
    if d == 0 {
        return 0;
    }
    rec(0, T::zero(), r, b.beta())
}

/// All `n` with `mixed_weight(n, a) <= bound`, capped.
pub fn mixed_sublevel_set<T: Real>(a: &AnisotropyMixed<T>, bound: T, cap: usize) -> Result<IndexSet> {
    let d = a.dim();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(d);
    fn rec<T: Real>(
        prod: T,
        bound: T,
        alpha: &[T],
        prefix: &mut Vec<i64>,
        out: &mut Vec<MultiIndex>,
        cap: usize,
    ) -> Result<()> {
        if prefix.len() == alpha.len() {
            if out.len() >= cap {
                return Err(Error::CapExceeded {
                    predicted: cap as u64 + 1,
                    cap,
                });
            }
            out.push(MultiIndex(prefix.clone()));
            return Ok(());
        }
        let e = alpha[prefix.len()];
        let mut t = 0i64;
        loop {
            let p = prod * (T::one() + T::lit(t as f64)).powf(e);
            if p > bound {
                break;
            }
            for v in if t == 0 { vec![0] } else { vec![t, -t] } {
                prefix.push(v);
                rec(p, bound, alpha, prefix, out, cap)?;
                prefix.pop();
            }
            t += 1;
        }
        Ok(())
    }
    rec(T::one(), bound, a.alpha(), &mut prefix, &mut out, cap)?;
    IndexSet::from_indices(d, out)
}

/// All `n` with `sum_weight(n, b) <= bound`, capped.
pub fn sum_sublevel_set<T: Real>(b: &AnisotropySum<T>, bound: T, cap: usize) -> Result<IndexSet> {
    let d = b.dim();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(d);
    fn rec<T: Real>(
        acc: T,
        bound: T,
        beta: &[T],
        prefix: &mut Vec<i64>,
        out: &mut Vec<MultiIndex>,
        cap: usize,
    ) -> Result<()> {
        if prefix.len() == beta.len() {
            if out.len() >= cap {
                return Err(Error::CapExceeded {
                    predicted: cap as u64 + 1,
                    cap,
                });
            }
            out.push(MultiIndex(prefix.clone()));
            return Ok(());
        }
        let e = beta[prefix.len()];
        let mut t = 0i64;
        loop {
            let s = acc + T::lit(t as f64).powf(e);
            if s > bound {
                break;
            }
            for v in if t == 0 { vec![0] } else { vec![t, -t] } {
                prefix.push(v);
                rec(s, bound, beta, prefix, out, cap)?;
                prefix.pop();
            }
            t += 1;
        }
        Ok(())
    }
    rec(T::one(), bound, b.beta(), &mut prefix, &mut out, cap)?;
    IndexSet::from_indices(d, out)
}
