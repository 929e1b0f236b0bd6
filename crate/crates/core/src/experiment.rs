//! Seeded experiment drivers behind the command-line tool.
//!
//! Every driver takes a validated [`ExperimentConfig`] and returns the full
//! output text. CSV outputs open with a single `#`-prefixed JSON metadata line
//! (tool version, command, resolved config, PRNG identity); identical configs
//! give identical bytes.

use std::path::PathBuf;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexsets::{count_mixed, count_sum, hyperbolic_cross_size_bounded, DEFAULT_INDEX_CAP};
use crate::recovery::{plan, reconstruct_detailed, theoretical_rate, RecoveryConfig, RecoveryPlan};
use crate::rng::PRNG_IDENTITY;
use crate::sensing::draw_uniform_samples;
use crate::sobolev::{
    generate_extremal, generate_sparse, l2_error, lowest_weight_support, PeriodicFunction, SmoothnessClass,
};
use crate::widths::{weight_spectrum, width_table, width_table_csv};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which counting function `count` evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    /// Size of the hyperbolic cross `prod (1 + |n_j|) <= r`.
    Hc,
    /// `#{n : prod (1 + |n_j|)^{alpha_j} < r}`.
    Mixed,
    /// `#{n : sum |n_j|^{beta_j} < r}`.
    Sum,
}

/// Parameters for every command; each command reads the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    /// Class labels such as `mixed:1,1` or `sum:2,2`.
    pub classes: Vec<String>,
    pub m_grid: Vec<u64>,
    pub seeds: Vec<u64>,
    pub recovery: RecoveryConfig,
    /// Exponent margin of the extremal test functions.
    pub decay_margin: f64,
    /// Test functions live on this many lowest-weight frequencies of their class.
    pub support_size: usize,
    /// Sweep worker threads; 0 uses the default pool.
    pub workers: usize,
    /// Order for `count`.
    pub r: f64,
    pub count_kind: CountKind,
    /// Count only strictly positive multi-indices (`count` with a mixed class).
    pub positive_only: bool,
    /// Target for `recover`: `zero`, `sparse:S` (inside the cross) or `extremal`.
    pub function: String,
    /// Spectrum length for `widths`; 0 picks `2 max(m) + 1`.
    pub spectrum_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 2,
            classes: vec!["mixed:1,1".into()],
            m_grid: vec![64, 128, 256, 512, 1024, 2048],
            seeds: (0..10).collect(),
            recovery: RecoveryConfig::default(),
            decay_margin: 0.5,
            support_size: 4096,
            workers: 0,
            r: 16.0,
            count_kind: CountKind::Hc,
            positive_only: false,
            function: "extremal".into(),
            spectrum_len: 0,
            out: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn parsed_classes(&self) -> Result<Vec<SmoothnessClass<f64>>> {
        if self.classes.is_empty() {
            return Err(invalid("no smoothness class given"));
        }
        self.classes
            .iter()
            .map(|c| {
                let cls: SmoothnessClass<f64> = c.parse().map_err(|e: Error| invalid(e.to_string()))?;
                if cls.dim() != self.d {
                    return Err(invalid(format!("class `{c}` has dimension {}, expected {}", cls.dim(), self.d)));
                }
                Ok(cls)
            })
            .collect()
    }

    /// Checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d must be at least 1"));
        }
        if !(self.decay_margin > 0.0 && self.decay_margin.is_finite()) {
            return Err(invalid("decay_margin must be positive"));
        }
        if self.support_size == 0 {
            return Err(invalid("support_size must be at least 1"));
        }
        if !self.r.is_finite() {
            return Err(invalid("r must be finite"));
        }
        self.recovery.validate()
    }

    fn validate_grid(&self, min_m: u64) -> Result<()> {
        if self.m_grid.is_empty() {
            return Err(invalid("m grid is empty"));
        }
        if let Some(m) = self.m_grid.iter().find(|&&m| m < min_m) {
            return Err(invalid(format!("m = {m} is below {min_m}")));
        }
        Ok(())
    }

    fn validate_seeds(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(invalid("seed list is empty"));
        }
        Ok(())
    }
}

/// Parses `1,2,3`, `a..b` (half-open) or a mix such as `0..3,10`.
pub fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || invalid(format!("bad list entry `{part}`"));
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                out.extend(a..b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    prng: &'static str,
    config: &'a ExperimentConfig,
}

/// The `#`-prefixed metadata line that opens every CSV output.
pub fn metadata_line(command: &str, cfg: &ExperimentConfig) -> String {
    let meta = Metadata {
        tool: "hcrecover",
        version: VERSION,
        command,
        prng: PRNG_IDENTITY,
        config: cfg,
    };
    format!("# {}\n", serde_json::to_string(&meta).expect("metadata serializes"))
}

/// Quotes a CSV field that contains a comma or quote.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row of the `count` table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub d: usize,
    pub r: f64,
    pub kind: CountKind,
    pub class: Option<String>,
    pub count: u64,
    /// Growth term of the count: `r (ln r)^{d-1}`, `r^{1/h} (ln r)^{p-1}` or `r^{1/g}`.
    pub rate: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn count_rows(cfg: &ExperimentConfig) -> Result<Vec<CountRow>> {
    cfg.validate()?;
    let (d, r) = (cfg.d, cfg.r);
    let positive = |v: f64| (v > 0.0 && v.is_finite()).then_some(v);
    let rows = match cfg.count_kind {
        CountKind::Hc => {
            let limit = DEFAULT_INDEX_CAP as u64 * 64;
            let count = hyperbolic_cross_size_bounded(d, r, limit)?;
            if count > limit {
                return Err(Error::CapExceeded {
                    predicted: count,
                    cap: limit as usize,
                });
            }
            let rate = positive(r * r.ln().powi(d as i32 - 1));
            vec![(None, count, rate)]
        }
        _ => {
            let mut rows = Vec::new();
            for cls in cfg.parsed_classes()? {
                let (count, rate) = match (&cfg.count_kind, &cls) {
                    (CountKind::Mixed, SmoothnessClass::Mixed(a)) => (
                        count_mixed(d, r, a, cfg.positive_only),
                        positive(r.powf(a.h().recip()) * r.ln().powi(a.p() as i32 - 1)),
                    ),
                    (CountKind::Sum, SmoothnessClass::Sum(b)) => (count_sum(d, r, b), positive(r.powf(b.g().recip()))),
                    _ => return Err(invalid(format!("class `{}` does not match the count kind", cls.label()))),
                };
                rows.push((Some(cls.label()), count, rate));
            }
            rows
        }
    };
    Ok(rows
        .into_iter()
        .map(|(class, count, rate)| CountRow {
            d,
            r,
            kind: cfg.count_kind.clone(),
            class,
            count,
            rate,
            ratio: rate.map(|v| count as f64 / v),
        })
        .collect())
}

pub fn cmd_count(cfg: &ExperimentConfig) -> Result<String> {
    let rows = count_rows(cfg)?;
    let mut out = metadata_line("count", cfg);
    out.push_str("d,r,kind,class,count,rate,ratio\n");
    for row in rows {
        let kind = serde_json::to_value(&row.kind)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.d,
            row.r,
            kind.as_str().unwrap_or_default(),
            csv_field(&row.class.unwrap_or_default()),
            row.count,
            opt(row.rate),
            opt(row.ratio)
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverSummary {
    pub iters: usize,
    pub converged: bool,
    pub objective: f64,
    pub relative_gap: f64,
}

/// Result of one seeded recovery.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverReport {
    pub plan: RecoveryPlan,
    pub function: String,
    pub class: Option<String>,
    pub seed: u64,
    pub l2_error: f64,
    /// `None` when the target is zero.
    pub relative_error: Option<f64>,
    pub theoretical_rate: Option<f64>,
    pub ratio: Option<f64>,
    pub solver: SolverSummary,
}

struct Trial {
    error: f64,
    norm: f64,
    solver: SolverSummary,
}

fn run_trial(target: &PeriodicFunction<f64>, p: &RecoveryPlan, cfg: &RecoveryConfig, seed: u64) -> Result<Trial> {
    let x = draw_uniform_samples::<f64>(p.m as usize, p.d, seed)?;
    let values: Vec<Complex<f64>> = x.points().iter().map(|pt| target.evaluate(pt)).collect();
    let rec = reconstruct_detailed(&x, &values, p, cfg)?;
    Ok(Trial {
        error: l2_error(target, &rec.f_sharp)?,
        norm: target.l2_norm(),
        solver: SolverSummary {
            iters: rec.solver.iters_used,
            converged: rec.solver.converged,
            objective: rec.solver.objective,
            relative_gap: rec.solver.relative_gap,
        },
    })
}

fn rate_of(p: &RecoveryPlan, cls: Option<&SmoothnessClass<f64>>) -> Option<f64> {
    cls.and_then(|c| theoretical_rate(p.m_tilde, c).ok())
}

/// One recovery at the first `m` and first seed of the config.
pub fn recover(cfg: &ExperimentConfig) -> Result<RecoverReport> {
    cfg.validate()?;
    cfg.validate_grid(2)?;
    cfg.validate_seeds()?;
    let (m, seed) = (cfg.m_grid[0], cfg.seeds[0]);
    let p = plan(m, cfg.d, &cfg.recovery)?;
    let cls = match cfg.parsed_classes() {
        Ok(c) => c.into_iter().next(),
        Err(_) if cfg.function != "extremal" => None,
        Err(e) => return Err(e),
    };
    let target = match cfg.function.as_str() {
        "zero" => PeriodicFunction::zero(cfg.d),
        "extremal" => {
            let cls = cls.as_ref().expect("class parsed above");
            let support = lowest_weight_support(cls, cfg.support_size, DEFAULT_INDEX_CAP)?;
            generate_extremal(cls, &support, cfg.decay_margin, seed)?
        }
        other => match other.strip_prefix("sparse:").map(str::parse::<usize>) {
            Some(Ok(s)) => generate_sparse(&p.index_set, s, seed)?,
            _ => return Err(invalid(format!("unknown function `{other}`"))),
        },
    };
    let trial = run_trial(&target, &p, &cfg.recovery, seed)?;
    let rate = rate_of(&p, cls.as_ref());
    Ok(RecoverReport {
        function: cfg.function.clone(),
        class: cls.map(|c| c.label()),
        seed,
        l2_error: trial.error,
        relative_error: (trial.norm > 0.0).then(|| trial.error / trial.norm),
        theoretical_rate: rate,
        ratio: rate.map(|r| trial.error / r),
        solver: trial.solver,
        plan: p,
    })
}

/// JSON report: `{"meta": ..., "report": ...}` on one line.
pub fn cmd_recover(cfg: &ExperimentConfig) -> Result<(String, RecoverReport)> {
    let report = recover(cfg)?;
    let meta = Metadata {
        tool: "hcrecover",
        version: VERSION,
        command: "recover",
        prng: PRNG_IDENTITY,
        config: cfg,
    };
    let text = serde_json::to_string(&serde_json::json!({ "meta": meta, "report": report }))?;
    Ok((text + "\n", report))
}

/// One `(class, m, seed)` cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: u64,
    pub m_tilde: f64,
    pub s: u64,
    pub r: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub capped: bool,
    pub class: String,
    pub seed: u64,
    pub l2_error: f64,
    /// Empty when `m_tilde < 2`, where the rate expression is not meaningful.
    pub theoretical_rate: Option<f64>,
    pub ratio: Option<f64>,
    pub converged: bool,
}

/// Least-squares slope of `ln(median error)` against `ln(m_tilde)` for one class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub class: String,
    pub expected_slope: f64,
    pub slope: Option<f64>,
    pub points: usize,
    pub medians: Vec<(f64, f64)>,
    pub nonconverged: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<SweepSummary>,
}

impl SweepOutput {
    pub fn nonconverged(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged).count()
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    Some((values[k / 2] + values[(k - 1) / 2]) / 2.0)
}

/// Ordinary least-squares slope of `y` on `x`; `None` below two distinct `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn rate_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    cfg.validate_grid(2)?;
    cfg.validate_seeds()?;
    let classes = cfg.parsed_classes()?;
    let plans: Vec<RecoveryPlan> = cfg
        .m_grid
        .iter()
        .map(|&m| plan(m, cfg.d, &cfg.recovery))
        .collect::<Result<_>>()?;
    let supports = classes
        .iter()
        .map(|c| lowest_weight_support(c, cfg.support_size, DEFAULT_INDEX_CAP))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize, u64)> = (0..classes.len())
        .flat_map(|c| (0..plans.len()).flat_map(move |k| cfg.seeds.iter().map(move |&s| (c, k, s))))
        .collect();
    let run = |&(c, k, seed): &(usize, usize, u64)| -> Result<SweepRow> {
        let (cls, p) = (&classes[c], &plans[k]);
        let target = generate_extremal(cls, &supports[c], cfg.decay_margin, seed)?;
        let trial = run_trial(&target, p, &cfg.recovery, seed)?;
        let rate = rate_of(p, Some(cls));
        Ok(SweepRow {
            m: p.m,
            m_tilde: p.m_tilde,
            s: p.s,
            r: p.r,
            n: p.n,
            capped: p.capped,
            class: cls.label(),
            seed,
            l2_error: trial.error,
            theoretical_rate: rate,
            ratio: rate.map(|r| trial.error / r),
            converged: trial.solver.converged,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| invalid(format!("worker pool: {e}")))?;
    // collect keeps grid order whatever the completion order
    let rows: Vec<SweepRow> = pool.install(|| cells.par_iter().map(run).collect::<Result<_>>())?;

    let summaries = classes
        .iter()
        .map(|cls| {
            let label = cls.label();
            let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.class == label).collect();
            let medians: Vec<(f64, f64)> = plans
                .iter()
                .filter_map(|p| {
                    let mut errs: Vec<f64> = mine.iter().filter(|r| r.m == p.m).map(|r| r.l2_error).collect();
                    median(&mut errs).map(|e| (p.m_tilde, e))
                })
                .collect();
            let logs: Vec<(f64, f64)> = medians
                .iter()
                .filter(|(_, e)| *e > 0.0)
                .map(|(mt, e)| (mt.ln(), e.ln()))
                .collect();
            SweepSummary {
                class: label,
                expected_slope: -cls.rate_exponent(),
                slope: ls_slope(&logs),
                points: logs.len(),
                medians,
                nonconverged: mine.iter().filter(|r| !r.converged).count(),
            }
        })
        .collect();
    Ok(SweepOutput { rows, summaries })
}

/// CSV rows in grid order (class, then m, then seed), then one
/// `# summary {...}` line per class.
pub fn sweep_csv(cfg: &ExperimentConfig, out: &SweepOutput) -> String {
    let mut text = metadata_line("sweep", cfg);
    text.push_str("m,m_tilde,s,r,N,capped,class,seed,l2_error,theoretical_rate,ratio\n");
    for r in &out.rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.m_tilde,
            r.s,
            r.r,
            r.n,
            r.capped,
            csv_field(&r.class),
            r.seed,
            r.l2_error,
            opt(r.theoretical_rate),
            opt(r.ratio)
        ));
    }
    for s in &out.summaries {
        text.push_str(&format!("# summary {}\n", serde_json::to_string(s).expect("summary serializes")));
    }
    text
}

pub fn cmd_rate_sweep(cfg: &ExperimentConfig) -> Result<(String, SweepOutput)> {
    let out = rate_sweep(cfg)?;
    Ok((sweep_csv(cfg, &out), out))
}

/// Sandwich table `m,lower,upper,rate` for the first class over the m grid.
pub fn cmd_widths(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    cfg.validate_grid(0)?;
    let cls = cfg.parsed_classes()?.remove(0);
    let ms: Vec<usize> = cfg.m_grid.iter().map(|&m| m as usize).collect();
    let needed = 2 * ms.iter().copied().max().unwrap_or(0) + 1;
    let k = if cfg.spectrum_len == 0 { needed } else { cfg.spectrum_len };
    let spec = weight_spectrum(&cls, k)?;
    let rows = width_table(&cls, &spec, &ms)?;
    Ok(metadata_line("widths", cfg) + &width_table_csv(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_u64_list("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_u64_list("0..3,10").unwrap(), vec![0, 1, 2, 10]);
        assert!(parse_u64_list("x").is_err());
        assert!(parse_u64_list("").unwrap().is_empty());
    }

    #[test]
    fn slope_and_median() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((ls_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(ls_slope(&pts[..1]), None);
    }

    #[test]
    fn count_examples() {
        let mut cfg = ExperimentConfig { r: 3.0, ..Default::default() };
        assert_eq!(count_rows(&cfg).unwrap()[0].count, 9);
        cfg = ExperimentConfig {
            d: 1,
            r: 4.0,
            count_kind: CountKind::Mixed,
            classes: vec!["mixed:1".into()],
            ..Default::default()
        };
        assert_eq!(count_rows(&cfg).unwrap()[0].count, 5);
        cfg = ExperimentConfig {
            r: 1.0,
            count_kind: CountKind::Sum,
            classes: vec!["sum:2,2".into()],
            ..Default::default()
        };
        assert_eq!(count_rows(&cfg).unwrap()[0].count, 1);
        cfg.classes = vec!["mixed:1,1".into()];
        assert!(matches!(count_rows(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let cfg = ExperimentConfig { m_grid: vec![], ..Default::default() };
        assert!(matches!(rate_sweep(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let partial = ExperimentConfig::from_json(r#"{"d": 3, "recovery": {"u": "const:2"}}"#).unwrap();
        assert_eq!(partial.d, 3);
        assert_eq!(partial.recovery.u_kind, crate::recovery::UKind::Constant(2.0));
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn zero_function_recovers_exactly() {
        let cfg = ExperimentConfig {
            m_grid: vec![32],
            seeds: vec![1],
            function: "zero".into(),
            ..Default::default()
        };
        let (text, report) = cmd_recover(&cfg).unwrap();
        assert_eq!(report.l2_error, 0.0);
        assert_eq!(report.relative_error, None);
        assert_eq!(cmd_recover(&cfg).unwrap().0, text);
    }
}
