//! The universal reconstruction map.
//!
//! From the sample budget `m` alone (never from the smoothness of the target)
//! the plan derives a sparsity level `s`, a hyperbolic-cross order
//! `r = ceil(s^{u(m)})` and the SR-LASSO weight `lambda`. Reconstruction then
//! solves the square-root LASSO against the scaled Fourier system on that cross
//! and rescales the minimizer into Fourier coefficients.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::indexsets::{hyperbolic_cross_capped, hyperbolic_cross_size_bounded, largest_order_within_cap, IndexSet};
use crate::operator::check_len;
use crate::rng::PRNG_IDENTITY;
use crate::scalar::Real;
use crate::sensing::{MeasurementOperator, SampleSet};
use crate::sobolev::{PeriodicFunction, SmoothnessClass};
use crate::srlasso::{solve_with_norm_bound, SolverConfig, SolverResult};

/// Slowly growing function `u(m)` controlling `r = ceil(s^{u(m)})`.
#[derive(Clone, Debug, PartialEq)]
pub enum UKind {
    /// `max(1, ln ln m)`.
    LogLog,
    /// `ln(m + 1)`.
    Log,
    Constant(f64),
    /// Step function: the value of the last entry whose threshold is `<= m`
    /// (the first value below the first threshold). Thresholds ascending,
    /// values non-decreasing.
    Custom(Vec<(u64, f64)>),
}

impl UKind {
    /// Parses `loglog`, `log`, `const:V`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "loglog" => Ok(UKind::LogLog),
            "log" => Ok(UKind::Log),
            other => match other.strip_prefix("const:") {
                Some(v) => v
                    .parse::<f64>()
                    .map(UKind::Constant)
                    .map_err(|_| Error::Validation(format!("bad constant in `{other}`"))),
                None => Err(Error::Validation(format!(
                    "unknown u `{other}` (expected loglog, log or const:V)"
                ))),
            },
        }
    }

    /// Inverse of [`UKind::parse`]; `None` for a custom table.
    pub fn label(&self) -> Option<String> {
        match self {
            UKind::LogLog => Some("loglog".into()),
            UKind::Log => Some("log".into()),
            UKind::Constant(v) => Some(format!("const:{v}")),
            UKind::Custom(_) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            UKind::Constant(v) if !(*v > 0.0 && v.is_finite()) => {
                Err(Error::Validation("constant u must be positive".into()))
            }
            UKind::Custom(t) => {
                if t.is_empty() {
                    return Err(Error::Validation("custom u table is empty".into()));
                }
                let ok = t.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
                    && t.iter().all(|&(_, v)| v > 0.0 && v.is_finite());
                if ok {
                    Ok(())
                } else {
                    Err(Error::Validation(
                        "custom u table must have ascending thresholds and positive non-decreasing values".into(),
                    ))
                }
            }
            _ => Ok(()),
        }
    }
}

/// Serialized as its text label, or as a `[[threshold, value], ...]` table.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum UKindRepr {
    Text(String),
    Table(Vec<(u64, f64)>),
}

impl Serialize for UKind {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            UKind::Custom(t) => UKindRepr::Table(t.clone()).serialize(ser),
            other => UKindRepr::Text(other.label().expect("text form")).serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for UKind {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match UKindRepr::deserialize(de)? {
            UKindRepr::Text(s) => UKind::parse(&s).map_err(serde::de::Error::custom),
            UKindRepr::Table(t) => Ok(UKind::Custom(t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoveryConfig {
    /// Failure probability, in `(0, 1)`.
    pub epsilon: f64,
    #[serde(rename = "u")]
    pub u_kind: UKind,
    /// Stand-in for the unquantified universal constant in the sparsity formula.
    pub c_prime: f64,
    pub max_index_set_size: usize,
    pub solver: SolverConfig,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            epsilon: 0.5,
            u_kind: UKind::LogLog,
            c_prime: 1.0,
            max_index_set_size: 4096,
            solver: SolverConfig::default(),
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Validation("epsilon must lie in (0, 1)".into()));
        }
        if !(self.c_prime > 0.0 && self.c_prime.is_finite()) {
            return Err(Error::Validation("c_prime must be positive".into()));
        }
        if self.max_index_set_size == 0 {
            return Err(Error::Validation("index set cap must be at least 1".into()));
        }
        self.u_kind.validate()?;
        self.solver.validate()
    }
}

pub fn u_value(cfg: &RecoveryConfig, m: u64) -> f64 {
    let mf = m as f64;
    match &cfg.u_kind {
        UKind::LogLog => mf.ln().ln().max(1.0),
        UKind::Log => (mf + 1.0).ln(),
        UKind::Constant(v) => *v,
        UKind::Custom(table) => table
            .iter()
            .take_while(|(t, _)| *t <= m)
            .last()
            .unwrap_or(&table[0])
            .1,
    }
}

/// Effective budget `m / (ln^3(m) u(m) + ln(1/eps))`.
pub fn m_tilde(m: u64, cfg: &RecoveryConfig) -> f64 {
    let mf = m as f64;
    mf / (mf.ln().powi(3) * u_value(cfg, m) + (1.0 / cfg.epsilon).ln())
}

/// `3(sqrt2 + 3) / (2 sqrt5 (sqrt2 + 9) sqrt(s))`: upper end of the admissible weights.
pub fn lambda_upper(s: u64) -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    3.0 * (r2 + 3.0) / (2.0 * 5f64.sqrt() * (r2 + 9.0) * (s as f64).sqrt())
}

/// Parameters the reconstruction map derives from `(m, d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryPlan {
    pub m: u64,
    pub d: usize,
    pub s: u64,
    /// Order actually used.
    pub r: u64,
    /// `ceil(s^{u(m)})` before capping.
    pub r_uncapped: u64,
    pub lambda: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub m_tilde: f64,
    pub u: f64,
    pub capped: bool,
    pub epsilon: f64,
    pub c_prime: f64,
    pub max_index_set_size: usize,
    pub prng: &'static str,
    #[serde(skip)]
    pub index_set: IndexSet,
}

impl RecoveryPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }
}

/// Sparsity from the budget: `max(floor(m / (c' (ln^2(2m) (ln 2 + u ln m +
/// (d-1) ln(1 + u ln m)) + ln(1/eps)))), 1)`, also clamped to `m`.
pub fn sparsity(m: u64, d: usize, cfg: &RecoveryConfig) -> u64 {
    let mf = m as f64;
    let u = u_value(cfg, m);
    let ul = u * mf.ln();
    let inner = 2f64.ln() + ul + (d as f64 - 1.0) * (1.0 + ul).ln();
    let denom = cfg.c_prime * ((2.0 * mf).ln().powi(2) * inner + (1.0 / cfg.epsilon).ln());
    ((mf / denom).floor() as u64).clamp(1, m.max(1))
}

pub fn plan(m: u64, d: usize, cfg: &RecoveryConfig) -> Result<RecoveryPlan> {
    cfg.validate()?;
    if m < 2 {
        return Err(domain("the sample budget must be at least 2"));
    }
    if d == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    let s = sparsity(m, d, cfg);
    let u = u_value(cfg, m);
    let r_uncapped = (s as f64).powf(u).ceil().clamp(1.0, 1e15) as u64;
    let cap = cfg.max_index_set_size;
    let (r, capped) = if hyperbolic_cross_size_bounded(d, r_uncapped as f64, cap as u64)? <= cap as u64 {
        (r_uncapped, false)
    } else {
        (largest_order_within_cap(d, r_uncapped, cap)?, true)
    };
    let index_set = hyperbolic_cross_capped(d, r as f64, cap)?;
    Ok(RecoveryPlan {
        m,
        d,
        s,
        r,
        r_uncapped,
        lambda: lambda_upper(s),
        n: index_set.len(),
        m_tilde: m_tilde(m, cfg),
        u,
        capped,
        epsilon: cfg.epsilon,
        c_prime: cfg.c_prime,
        max_index_set_size: cap,
        prng: PRNG_IDENTITY,
        index_set,
    })
}

/// Output of [`reconstruct_detailed`].
#[derive(Clone, Debug)]
pub struct Reconstruction<T> {
    pub f_sharp: PeriodicFunction<T>,
    pub solver: SolverResult<T>,
}

/// `f# = sum_{n in Lambda} (2 pi)^{d/2} z#_n phi_n` from the samples `f(x_i)`.
pub fn reconstruct<T: Real>(
    samples: &SampleSet<T>,
    values: &[Complex<T>],
    plan: &RecoveryPlan,
    cfg: &RecoveryConfig,
) -> Result<PeriodicFunction<T>> {
    reconstruct_detailed(samples, values, plan, cfg).map(|r| r.f_sharp)
}

pub fn reconstruct_detailed<T: Real>(
    samples: &SampleSet<T>,
    values: &[Complex<T>],
    plan: &RecoveryPlan,
    cfg: &RecoveryConfig,
) -> Result<Reconstruction<T>> {
    check_len(plan.m as usize, values.len())?;
    check_len(plan.m as usize, samples.len())?;
    check_len(plan.d, samples.dim())?;
    let inv = T::from_count(values.len()).sqrt().recip();
    let b: Vec<Complex<T>> = values.iter().map(|v| *v * inv).collect();
    let op = MeasurementOperator::new(samples.clone(), plan.index_set.clone(), true)?;
    // entries of modulus 1/sqrt(m): the Frobenius norm sqrt(N) bounds ||A||_2
    let bound = T::from_count(plan.n).sqrt();
    let result = solve_with_norm_bound(&op, &b, T::lit(plan.lambda), &cfg.solver, Some(bound))?;
    let lift = (T::lit(2.0) * T::PI()).powf(T::from_count(plan.d) / T::lit(2.0));
    let coeffs = plan
        .index_set
        .iter()
        .zip(&result.z_sharp)
        .filter(|(_, z)| **z != Complex::default())
        .map(|(n, z)| (n.clone(), *z * lift));
    Ok(Reconstruction {
        f_sharp: PeriodicFunction::from_coeffs(plan.d, coeffs)?,
        solver: result,
    })
}

/// Constant-free rate: `(ln^{p-1}(m~) / m~)^h` for the mixed class and
/// `m~^{-g}` for the sum class.
pub fn theoretical_rate<T: Real>(m_tilde: T, cls: &SmoothnessClass<T>) -> Result<T> {
    if !(m_tilde >= T::lit(2.0)) {
        return Err(domain(format!("effective budget {m_tilde} is below 2")));
    }
    Ok(match cls {
        SmoothnessClass::Mixed(a) => {
            let p = a.p() as i32;
            (m_tilde.ln().powi(p - 1) / m_tilde).powf(a.h())
        }
        SmoothnessClass::Sum(b) => m_tilde.powf(-b.g()),
    })
}
