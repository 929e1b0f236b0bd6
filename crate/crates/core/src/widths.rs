//! Width sandwich bounds for weighted `l^2` ellipsoids.
//!
//! The ellipsoid has semi-axes `w_n = 1 / weight(n)`. Its adaptive `m`-width
//! lies between `w*_{2m+1}` and `w*_{m+1}`, the entries of the non-increasing
//! rearrangement of `w`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::indexsets::{mixed_sublevel_set, sum_sublevel_set, IndexSet, DEFAULT_INDEX_CAP};
use crate::scalar::Real;
use crate::sobolev::SmoothnessClass;

/// The `K` largest semi-axes of an ellipsoid, together with how they were made.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSpectrum<T> {
    sorted: Vec<T>,
    pub class: String,
    /// Final enumeration bound on `weight(n)`.
    pub radius: f64,
    /// Number of indices in the final sublevel set.
    pub enumerated: usize,
}

impl<T: Real> WeightSpectrum<T> {
    pub fn from_sorted(sorted: Vec<T>, class: impl Into<String>) -> Result<Self> {
        if sorted.windows(2).any(|w| w[0] < w[1]) || sorted.iter().any(|v| !(*v > T::zero())) {
            return Err(domain("spectrum must be positive and non-increasing"));
        }
        Ok(WeightSpectrum {
            enumerated: sorted.len(),
            sorted,
            class: class.into(),
            radius: f64::INFINITY,
        })
    }

    pub fn sorted(&self) -> &[T] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

fn sublevel<T: Real>(cls: &SmoothnessClass<T>, bound: T, cap: usize) -> Result<IndexSet> {
    match cls {
        SmoothnessClass::Mixed(a) => mixed_sublevel_set(a, bound, cap),
        SmoothnessClass::Sum(b) => sum_sublevel_set(b, bound, cap),
    }
}

/// The `k` largest reciprocal weights, with the default enumeration cap.
pub fn weight_spectrum<T: Real>(cls: &SmoothnessClass<T>, k: usize) -> Result<WeightSpectrum<T>> {
    weight_spectrum_capped(cls, k, DEFAULT_INDEX_CAP)
}

/// Doubles the bound `T` on `weight(n)` until the sublevel set holds more than
/// `2k` indices. Every omitted index then has `w_n < 1/T <= w*_k`.
pub fn weight_spectrum_capped<T: Real>(cls: &SmoothnessClass<T>, k: usize, cap: usize) -> Result<WeightSpectrum<T>> {
    if k == 0 {
        return Err(domain("spectrum length must be at least 1"));
    }
    let two = T::lit(2.0);
    let mut bound = two;
    let set = loop {
        let set = sublevel(cls, bound, cap)?;
        if set.len() > 2 * k {
            break set;
        }
        bound = bound * two;
        if !bound.is_finite() {
            return Err(Error::CapExceeded {
                predicted: u64::MAX,
                cap,
            });
        }
    };
    let mut w: Vec<T> = set.iter().map(|n| cls.weight(n).recip()).collect();
    w.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    w.truncate(k);
    Ok(WeightSpectrum {
        sorted: w,
        class: cls.label(),
        radius: bound.to_f64_lossy(),
        enumerated: set.len(),
    })
}

/// `(w*_{2m+1}, w*_{m+1})`.
pub fn width_sandwich<T: Real>(spec: &WeightSpectrum<T>, m: usize) -> Result<(T, T)> {
    let needed = 2 * m + 1;
    if spec.len() < needed {
        return Err(Error::InsufficientSpectrum {
            needed,
            have: spec.len(),
        });
    }
    Ok((spec.sorted[2 * m], spec.sorted[m]))
}

/// Constant-free width rate: `((ln m)^{p-1}/m)^h` or `m^{-g}`.
pub fn width_rate<T: Real>(cls: &SmoothnessClass<T>, m: T) -> Result<T> {
    if !(m >= T::lit(2.0)) {
        return Err(domain("width rate needs m >= 2"));
    }
    Ok(match cls {
        SmoothnessClass::Mixed(a) => {
            let p = T::from_count(a.p());
            (m.ln().powf(p - T::one()) / m).powf(a.h())
        }
        SmoothnessClass::Sum(b) => m.powf(-b.g()),
    })
}

/// One row of a sandwich table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthRow {
    pub m: usize,
    pub lower: f64,
    pub upper: f64,
    pub rate: Option<f64>,
}

/// Sandwich rows for each `m`; the rate column is empty for `m < 2`.
pub fn width_table<T: Real>(cls: &SmoothnessClass<T>, spec: &WeightSpectrum<T>, ms: &[usize]) -> Result<Vec<WidthRow>> {
    ms.iter()
        .map(|&m| {
            let (lo, up) = width_sandwich(spec, m)?;
            let rate = if m >= 2 {
                Some(width_rate(cls, T::from_count(m))?.to_f64_lossy())
            } else {
                None
            };
            Ok(WidthRow {
                m,
                lower: lo.to_f64_lossy(),
                upper: up.to_f64_lossy(),
                rate,
            })
        })
        .collect()
}

pub fn width_table_csv(rows: &[WidthRow]) -> String {
    let mut out = String::from("m,lower,upper,rate\n");
    for r in rows {
        let rate = r.rate.map(|v| format!("{v:e}")).unwrap_or_default();
        out.push_str(&format!("{},{:e},{:e},{}\n", r.m, r.lower, r.upper, rate));
    }
    out
}
