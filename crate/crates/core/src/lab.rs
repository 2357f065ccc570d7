//! Scripted experiments: forward-iteration figures, large-n limits of the
//! recurrence coefficients, and how the breakdown index moves with precision.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::Serialize;

use crate::dpainleve::{derived_at, iterate, map_for, Flag, Trace};
use crate::error::{Error, Result};
use crate::mpnum::{format_sci, parse_rational, Precision};
use crate::oracle::{first_divergence, oracle_coefficients};
use crate::weights::{freud_constant, Coefficients, WeightFamily};

/// Relative distance from the oracle beyond which an iterate counts as lost.
pub const ORACLE_DEVIATION: f64 = 0.1;

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub experiment: String,
    pub family: String,
    pub params: Vec<(String, String)>,
    pub map: Option<String>,
    pub digits: u32,
    pub n_max: i64,
    /// Starting values as `(index, value)`.
    pub seeds: Vec<(i64, String)>,
}

impl Metadata {
    pub fn new(experiment: &str, family: &WeightFamily, digits: u32, n_max: i64) -> Self {
        Metadata {
            experiment: experiment.to_string(),
            family: family.tag().to_string(),
            params: family.params().into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            map: map_for(family).ok().map(|m| m.tag()),
            digits,
            n_max,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigureRow {
    pub n: i64,
    pub value: Float,
    pub derived_a2: Option<Float>,
    pub derived_b: Option<Float>,
    pub flag: Flag,
    pub extra: Option<Float>,
}

/// A forward-iteration table plus the index where it stopped tracking the
/// true solution.
#[derive(Debug, Clone)]
pub struct Figure {
    pub metadata: Metadata,
    /// Column name of [`FigureRow::extra`], if present.
    pub extra_label: Option<&'static str>,
    pub rows: Vec<FigureRow>,
    pub divergence_index: Option<i64>,
    pub trace: Option<Trace>,
}

impl Figure {
    pub fn row(&self, n: i64) -> Option<&FigureRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn build_figure(
    experiment: &str,
    family: &WeightFamily,
    trace: Trace,
    divergence_index: Option<i64>,
    extra_label: Option<&'static str>,
    extra: impl Fn(i64, &Float) -> Option<Float>,
) -> Figure {
    let digits = trace.precision.digits();
    let mut metadata = Metadata::new(experiment, family, digits, trace.last_index());
    let init_len = family.initial_data(trace.precision).map(|d| d.values.len()).unwrap_or(1);
    metadata.seeds = trace
        .indices()
        .take(init_len)
        .map(|n| (n, trace.format_value(n).expect("in range")))
        .collect();
    let rows = trace
        .indices()
        .map(|n| {
            let value = trace.get(n).expect("in range").clone();
            let (derived_a2, derived_b) = derived_at(family, &trace, n);
            let flag = if trace.singular_index == Some(n) {
                Flag::Singular
            } else if divergence_index.is_some_and(|d| n >= d) {
                Flag::Diverged
            } else {
                Flag::Ok
            };
            FigureRow {
                n,
                extra: extra(n, &value),
                value,
                derived_a2,
                derived_b,
                flag,
            }
        })
        .collect();
    Figure {
        metadata,
        extra_label,
        rows,
        divergence_index,
        trace: Some(trace),
    }
}

fn coefficient_table(experiment: &str, family: &WeightFamily, coeffs: &Coefficients, n_max: i64) -> Figure {
    let p = match coeffs {
        Coefficients::Line(l) => l.precision(),
        Coefficients::Circle(v) => v.precision,
    };
    let rows = (0..=n_max)
        .filter_map(|n| {
            let k = n as usize;
            let (value, a2, b) = match coeffs {
                Coefficients::Line(l) => {
                    let a2 = l.a_sq(k).cloned();
                    let b = l.b(k).cloned();
                    (a2.clone().or_else(|| b.clone())?, a2, b)
                }
                Coefficients::Circle(v) => (v.alpha.get(k)?.clone(), v.kappa_ratio.get(k).cloned(), None),
            };
            Some(FigureRow {
                n,
                value,
                derived_a2: a2,
                derived_b: b,
                flag: Flag::Ok,
                extra: None,
            })
        })
        .collect();
    Figure {
        metadata: Metadata::new(experiment, family, p.digits(), n_max),
        extra_label: None,
        rows,
        divergence_index: None,
        trace: None,
    }
}

/// Forward iteration of the family's recurrence through `n_max`, or its
/// closed form when it has no nonlinear recurrence.
pub fn compute(family: &WeightFamily, n_max: i64, p: Precision) -> Result<Figure> {
    if n_max < 1 {
        return Err(Error::domain("n must be at least 1"));
    }
    if family.has_closed_form() {
        let n = u32::try_from(n_max).map_err(|_| Error::domain("n out of range"))?;
        let coeffs = family.closed_form_coeffs(n, p)?;
        return Ok(coefficient_table("compute", family, &Coefficients::Line(coeffs), n_max));
    }
    let trace = iterate(&map_for(family)?, &family.initial_data(p)?, n_max, p)?;
    let divergence = trace.divergence_index;
    Ok(build_figure("compute", family, trace, divergence, None, |_, _| None))
}

/// Moment-based coefficients through `n_max`, good to `digits`. On the
/// circle `value` is `alpha_n` and `derived_a2` is `1 - |alpha_n|^2`.
pub fn oracle_table(family: &WeightFamily, n_max: i64, digits: u32) -> Result<Figure> {
    if n_max < 1 {
        return Err(Error::domain("n must be at least 1"));
    }
    let coeffs = reference(family, n_max, digits)?;
    let mut table = coefficient_table("oracle", family, &coeffs, n_max);
    table.metadata.digits = digits;
    Ok(table)
}

fn earliest(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// First index where the trace leaves the admissible set or drifts more
/// than [`ORACLE_DEVIATION`] from `reference`.
pub fn divergence_against(family: &WeightFamily, trace: &Trace, reference: &Coefficients) -> Result<Option<i64>> {
    let drift = first_divergence(family, trace, reference, ORACLE_DEVIATION)?;
    Ok(earliest(trace.divergence_index, drift))
}

/// Reference coefficients through `n_max`, good to `digits`.
pub fn reference(family: &WeightFamily, n_max: i64, digits: u32) -> Result<Coefficients> {
    let n = usize::try_from(n_max.max(1)).map_err(|_| Error::domain("n_max out of range"))?;
    oracle_coefficients(family, n + 1, digits)
}

/// Quartic Freud iterates `x_n = 2 a_n^2` (ρ = 0) against `sqrt(n/3)`.
pub fn figure1(p: Precision, n_max: i64) -> Result<Figure> {
    let family = WeightFamily::freud_quartic(Rational::new(), Rational::new())?;
    let trace = iterate(&map_for(&family)?, &family.initial_data(p)?, n_max, p)?;
    let oracle = reference(&family, n_max, p.digits())?;
    let divergence = divergence_against(&family, &trace, &oracle)?;
    let bits = p.bits();
    Ok(build_figure("figure1", &family, trace, divergence, Some("sqrt_n_over_3"), |n, _| {
        Some(Float::with_val(bits, Float::with_val(bits, n) / 3u32).sqrt())
    }))
}

/// Generalized Charlier iterates `c_n`; breakdown is the first exit from (-1, 1).
pub fn figure2(a: &Rational, p: Precision, n_max: i64) -> Result<Figure> {
    let family = WeightFamily::generalized_charlier(a.clone())?;
    let trace = iterate(&map_for(&family)?, &family.initial_data(p)?, n_max, p)?;
    let divergence = trace.divergence_index;
    Ok(build_figure("figure2", &family, trace, divergence, None, |_, _| None))
}

/// q-Freud iterates `y_n` with `log|y_n|`; breakdown is the first nonpositive iterate.
pub fn figure3(q: &Rational, p: Precision, n_max: i64) -> Result<Figure> {
    let family = WeightFamily::q_freud(q.clone())?;
    let trace = iterate(&map_for(&family)?, &family.initial_data(p)?, n_max, p)?;
    let divergence = trace.divergence_index;
    let bits = p.bits();
    Ok(build_figure("figure3", &family, trace, divergence, Some("log_abs_y"), |_, v| {
        (!v.is_zero() && v.is_finite()).then(|| Float::with_val(bits, v.abs_ref()).ln())
    }))
}

pub fn figure1_default() -> Result<Figure> {
    figure1(Precision::new(30)?, 100)
}

pub fn figure2_default() -> Result<Figure> {
    figure2(&Rational::from(1), Precision::new(30)?, 80)
}

pub fn figure3_default() -> Result<Figure> {
    figure3(&parse_rational("0.9")?, Precision::new(50)?, 200)
}

#[derive(Debug, Clone)]
pub struct AsymptoticRow {
    pub n: i64,
    pub scaled: Float,
    pub deviation: Float,
}

#[derive(Debug, Clone)]
pub struct Asymptotics {
    pub metadata: Metadata,
    /// What [`AsymptoticRow::scaled`] holds, e.g. `a_n/n^(1/4)`.
    pub quantity: String,
    pub limit: Float,
    pub rows: Vec<AsymptoticRow>,
}

impl Asymptotics {
    pub fn row(&self, n: i64) -> Option<&AsymptoticRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Scaled oracle coefficients `a_n / n^(1/m)` (or `a_n^2 / q^(n-1)`) for
/// `1 <= n <= n_max` and their distance from the limiting constant.
pub fn asymptotics(family: &WeightFamily, n_max: i64, p: Precision) -> Result<Asymptotics> {
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let (quantity, m) = match family {
        WeightFamily::GeneralizedHermite { .. } => ("a_n/n^(1/2)", Some(2)),
        WeightFamily::FreudQuartic { .. } => ("a_n/n^(1/4)", Some(4)),
        WeightFamily::FreudSextic { .. } => ("a_n/n^(1/6)", Some(6)),
        WeightFamily::QFreud { .. } => ("a_n^2/q^(n-1)", None),
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "no large-n limit is tabulated for {}",
                other.tag()
            )))
        }
    };
    let bits = p.bits();
    let oracle = reference(family, n_max, p.digits())?;
    let limit = match m {
        Some(m) => freud_constant(&Rational::from(m), p)?.into_float(),
        None => p.float(1),
    };
    let rows = (1..=n_max)
        .map(|n| {
            let a2 = oracle.a2_analog(n as usize).expect("oracle covers n_max");
            let scaled = match (m, family.q()) {
                (Some(m), _) => {
                    let a = Float::with_val(bits, a2.sqrt_ref());
                    let root = Float::with_val(bits, n).root(m as u32);
                    a / root
                }
                (None, Some(q)) => {
                    let qn = Float::with_val(bits, p.float(q).pow((n - 1) as i32));
                    Float::with_val(bits, a2 / qn)
                }
                (None, None) => unreachable!("q-family has q"),
            };
            let deviation = Float::with_val(bits, &scaled - &limit).abs();
            AsymptoticRow { n, scaled, deviation }
        })
        .collect();
    Ok(Asymptotics {
        metadata: Metadata::new("asymptotics", family, p.digits(), n_max),
        quantity: quantity.to_string(),
        limit,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierPoint {
    pub digits: u32,
    pub divergence_index: Option<i64>,
}

/// Breakdown index of forward iteration at each working precision, judged
/// against one shared oracle. Cells run in parallel; output order follows
/// `digits`.
pub fn precision_frontier(family: &WeightFamily, digits: &[u32], n_max: i64) -> Result<Vec<FrontierPoint>> {
    let map = map_for(family)?;
    let top = digits.iter().copied().max().ok_or_else(|| Error::domain("no precisions given"))?;
    let oracle = reference(family, n_max, top)?;
    digits
        .par_iter()
        .map(|&d| {
            let p = Precision::new(d)?;
            let trace = iterate(&map, &family.initial_data(p)?, n_max, p)?;
            Ok(FrontierPoint {
                digits: d,
                divergence_index: divergence_against(family, &trace, &oracle)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub index: i64,
    pub delta: String,
    pub unperturbed: Option<i64>,
    pub perturbed: Option<i64>,
}

/// Adds `delta` to the starting value at `index` and compares breakdown
/// indices with the unperturbed run.
pub fn perturbation(family: &WeightFamily, index: i64, delta: &Rational, p: Precision, n_max: i64) -> Result<Perturbation> {
    let map = map_for(family)?;
    let init = family.initial_data(p)?;
    let slot = usize::try_from(index - init.base_index)
        .ok()
        .filter(|&i| i < init.values.len())
        .ok_or_else(|| Error::domain(format!("index {index} is not a starting value")))?;
    let oracle = reference(family, n_max, p.digits())?;
    let base = iterate(&map, &init, n_max, p)?;
    let mut shifted = init.clone();
    shifted.values[slot] += p.float(delta);
    let moved = iterate(&map, &shifted, n_max, p)?;
    Ok(Perturbation {
        index,
        delta: format_sci(&p.float(delta), 6),
        unperturbed: divergence_against(family, &base, &oracle)?,
        perturbed: divergence_against(family, &moved, &oracle)?,
    })
}
