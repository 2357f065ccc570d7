use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};

use super::laurent::{SymbolicLaurent, DEFAULT_TERMS};
use super::ratfunc::RationalFunctionR;
use crate::dpainleve::PainleveMap;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::mpnum::Precision;

/// Which critical value the seed `x_{n0}` sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `x_{n0} = ε`
    Zero,
    /// `x_{n0} = 1 + ε`
    PlusOne,
    /// `x_{n0} = -1 + ε`
    MinusOne,
}

impl Scenario {
    pub fn critical_value(self) -> i64 {
        match self {
            Scenario::Zero => 0,
            Scenario::PlusOne => 1,
            Scenario::MinusOne => -1,
        }
    }

    /// Seeds that trigger a singularity of `map`.
    pub fn for_map(map: &PainleveMap) -> &'static [Scenario] {
        match map {
            PainleveMap::DP2 { .. } => &[Scenario::PlusOne, Scenario::MinusOne],
            _ => &[Scenario::Zero],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Zero => "zero",
            Scenario::PlusOne => "plus-one",
            Scenario::MinusOne => "minus-one",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(Scenario::Zero),
            "plus-one" | "+1" | "1" => Ok(Scenario::PlusOne),
            "minus-one" | "-1" => Ok(Scenario::MinusOne),
            _ => Err(Error::Parse(format!("unknown seed `{s}` (expected zero, plus-one or minus-one)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfinementConfig {
    /// Stored ε-orders for the first attempt.
    pub terms: usize,
    /// Largest order count tried before giving up.
    pub max_terms: usize,
    /// Longest singular stretch searched before declaring the singularity unconfined.
    pub span_cap: usize,
}

impl Default for ConfinementConfig {
    fn default() -> Self {
        ConfinementConfig {
            terms: DEFAULT_TERMS,
            max_terms: 15,
            span_cap: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfinementReport {
    pub map: String,
    pub trigger_index: i64,
    pub scenario: Scenario,
    /// Series for `x_{n0}, x_{n0+1}, ...` up to the first regular value (or the cap).
    pub series: Vec<SymbolicLaurent>,
    /// Indices after the trigger that have a pole or sit at a critical value.
    pub singular_span: Vec<i64>,
    /// First index past the span, if reached within the cap.
    pub regular_index: Option<i64>,
    pub confined: bool,
    pub memory_check: bool,
    /// For `±1` seeds: whether `x_{n0+2}` tends to the opposite critical value.
    pub alternation: Option<bool>,
    /// Known coefficients up to ε^1, keyed by `(index, power)`.
    pub coefficients: BTreeMap<(i64, i64), RationalFunctionR>,
    pub terms_used: usize,
}

impl ConfinementReport {
    pub fn value(&self, index: i64) -> Option<&SymbolicLaurent> {
        let k = usize::try_from(index - self.trigger_index).ok()?;
        self.series.get(k)
    }

    /// Coefficient of ε^power in `x_index`; zero below the leading order.
    pub fn coefficient(&self, index: i64, power: i64) -> Option<RationalFunctionR> {
        self.value(index)?.coeff(power)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.series.len() as i64).map(move |k| self.trigger_index + k)
    }
}

/// `x_{n+1}` from `x_{n-1}` and `x_n` over truncated series.
pub fn laurent_step(map: &PainleveMap, n: i64, prev: &SymbolicLaurent, cur: &SymbolicLaurent) -> Result<SymbolicLaurent> {
    check_supported(map)?;
    map.step_with(n, &[prev.clone(), cur.clone()])
}

fn check_supported(map: &PainleveMap) -> Result<()> {
    match map {
        PainleveMap::DP1 { .. } | PainleveMap::DP2 { .. } | PainleveMap::QP1 { .. } | PainleveMap::QP1General { .. } => {
            Ok(())
        }
        other => Err(Error::UnsupportedFamily(format!(
            "symbolic confinement is available for dp1, dp2, qp1 and qp1-gen, not {}",
            other.tag()
        ))),
    }
}

fn check_scenario(map: &PainleveMap, scenario: Scenario) -> Result<()> {
    if Scenario::for_map(map).contains(&scenario) {
        Ok(())
    } else {
        Err(Error::domain(format!("seed {scenario} is not a singular value of {}", map.tag())))
    }
}

fn is_critical(map: &PainleveMap, v: &SymbolicLaurent) -> bool {
    if v.pole_order() > 0 {
        return false;
    }
    match map {
        PainleveMap::DP2 { .. } => v
            .coeff(0)
            .and_then(|c| c.as_constant())
            .is_some_and(|c| c == 1 || c == -1),
        _ => v.lowest_order().map_or(true, |l| l >= 1),
    }
}

fn is_singular(map: &PainleveMap, v: &SymbolicLaurent) -> bool {
    v.pole_order() > 0 || is_critical(map, v)
}

fn insufficient(index: i64, terms: usize) -> Error {
    Error::TruncationInsufficient(format!("x_{index} not resolved to order ε^1 with {terms} stored orders"))
}

fn attempt(map: &PainleveMap, n0: i64, scenario: Scenario, terms: usize, cap: usize) -> Result<ConfinementReport> {
    let seed = SymbolicLaurent::seed(Rational::from(scenario.critical_value()), terms);
    let mut prev = SymbolicLaurent::symbol(terms);
    let mut cur = seed.clone();
    let mut series = vec![seed];
    let mut span = Vec::new();
    let mut regular = None;
    for k in 0..=cap as i64 {
        let n = n0 + k;
        let next = map.step_with(n, &[prev, cur.clone()]).map_err(|e| match e {
            Error::ZeroPivot => Error::Singularity { index: n },
            e => e,
        })?;
        if next.truncation_order().is_some_and(|t| t < 2) {
            return Err(insufficient(n + 1, terms));
        }
        series.push(next.clone());
        if is_singular(map, &next) {
            span.push(n + 1);
        } else {
            regular = Some(n + 1);
            break;
        }
        prev = cur;
        cur = next;
    }
    if span.len() > cap {
        regular = None;
    }
    let memory_check = regular.is_some_and(|m| {
        series[(m - n0) as usize]
            .coeff(0)
            .is_some_and(|c| c.depends_on_r())
    });
    let alternation = (scenario != Scenario::Zero).then(|| {
        series.get(2).and_then(|v| v.coeff(0)).and_then(|c| c.as_constant())
            == Some(Rational::from(-scenario.critical_value()))
    });
    let mut coefficients = BTreeMap::new();
    for (k, v) in series.iter().enumerate() {
        for (power, c) in v.known_terms() {
            if power <= 1 {
                coefficients.insert((n0 + k as i64, power), c);
            }
        }
    }
    Ok(ConfinementReport {
        map: map.tag(),
        trigger_index: n0,
        scenario,
        series,
        singular_span: span,
        regular_index: regular,
        confined: regular.is_some() && memory_check,
        memory_check,
        alternation,
        coefficients,
        terms_used: terms,
    })
}

pub fn run_confinement(map: &PainleveMap, n0: i64, scenario: Scenario) -> Result<ConfinementReport> {
    run_confinement_with(map, n0, scenario, ConfinementConfig::default())
}

/// Seeds `x_{n0-1} = r`, `x_{n0}` at the critical value plus ε, and iterates
/// until a regular value appears, widening the series on truncation loss.
pub fn run_confinement_with(
    map: &PainleveMap,
    n0: i64,
    scenario: Scenario,
    config: ConfinementConfig,
) -> Result<ConfinementReport> {
    check_supported(map)?;
    check_scenario(map, scenario)?;
    if n0 < 2 {
        return Err(Error::domain("trigger index must be at least 2"));
    }
    let mut terms = config.terms.max(1);
    loop {
        match attempt(map, n0, scenario, terms, config.span_cap) {
            Err(Error::TruncationInsufficient(_)) if terms + 2 <= config.max_terms => terms += 2,
            other => return other,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShadowEntry {
    pub index: i64,
    pub order: i64,
    pub symbolic: Rational,
    pub numeric: Float,
    pub rel_err: Float,
}

#[derive(Debug, Clone)]
pub struct ShadowReport {
    pub epsilon: Float,
    pub r: Rational,
    pub entries: Vec<ShadowEntry>,
    pub max_rel_err: Float,
}

impl ShadowReport {
    pub fn agrees_to(&self, digits: u32) -> bool {
        self.max_rel_err < Float::with_val(64, 10).pow_neg(digits)
    }
}

trait PowNeg {
    fn pow_neg(self, digits: u32) -> Float;
}

impl PowNeg for Float {
    fn pow_neg(self, digits: u32) -> Float {
        let d = i32::try_from(digits).unwrap_or(i32::MAX);
        Float::with_val(self.prec(), rug::ops::Pow::pow(&self, -d))
    }
}

/// Replays a report numerically with concrete `r` and small ε, estimating
/// each leading coefficient as `x_k / ε^order`.
pub fn numeric_shadow(
    map: &PainleveMap,
    report: &ConfinementReport,
    r: &Rational,
    epsilon: &Float,
    p: Precision,
) -> Result<ShadowReport> {
    let bits = p.bits();
    let eps = Float::with_val(bits, epsilon);
    let mut prev = Float::with_val(bits, r);
    let mut cur = Float::with_val(bits, report.scenario.critical_value()) + &eps;
    let mut entries = Vec::new();
    let mut max = Float::new(bits);
    for (k, sym) in report.series.iter().enumerate().skip(1) {
        let n = report.trigger_index + k as i64 - 1;
        let next = map.step(n, &[prev, cur.clone()])?;
        if let (Some(order), Some(lead)) = (sym.lowest_order(), sym.leading()) {
            let symbolic = lead.eval(r)?;
            let scale = eps.clone().powi(order)?;
            let numeric = Float::with_val(bits, &next / &scale);
            let rel_err = if symbolic == 0 {
                Float::with_val(bits, numeric.abs_ref())
            } else {
                let s = Float::with_val(bits, &symbolic);
                Float::with_val(bits, &numeric - &s).abs() / s.abs()
            };
            if rel_err > max {
                max = rel_err.clone();
            }
            entries.push(ShadowEntry {
                index: n + 1,
                order,
                symbolic,
                numeric,
                rel_err,
            });
        }
        prev = cur;
        cur = next;
    }
    Ok(ShadowReport {
        epsilon: eps,
        r: r.clone(),
        entries,
        max_rel_err: max,
    })
}

impl fmt::Display for ConfinementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map {} seed {} at n0 = {}", self.map, self.scenario, self.trigger_index)?;
        for (i, v) in self.indices().zip(&self.series) {
            writeln!(f, "x_{i} = {v}")?;
        }
        let span: Vec<String> = self.singular_span.iter().map(i64::to_string).collect();
        writeln!(f, "singular span: {{{}}}", span.join(", "))?;
        write!(f, "confined: {}, memory: {}", self.confined, self.memory_check)?;
        if let Some(a) = self.alternation {
            write!(f, ", alternation: {a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpnum::ExactReal;

    fn dp1() -> PainleveMap {
        PainleveMap::dp1(ExactReal::int(1), ExactReal::int(0), ExactReal::int(0), ExactReal::int(0))
    }

    fn q(v: i64, d: i64) -> Rational {
        Rational::from((v, d))
    }

    fn lin(c: Rational, d: Rational) -> RationalFunctionR {
        RationalFunctionR::linear(c).add(&RationalFunctionR::constant(d))
    }

    #[test]
    fn first_step_has_simple_pole() {
        let m = dp1();
        let next = laurent_step(&m, 5, &SymbolicLaurent::symbol(3), &SymbolicLaurent::seed(Rational::new(), 3)).unwrap();
        assert_eq!(next.lowest_order(), Some(-1));
        assert_eq!(next.coeff(-1).unwrap(), RationalFunctionR::constant(q(5, 1)));
        assert_eq!(next.coeff(0).unwrap(), RationalFunctionR::symbol().neg());
        assert_eq!(next.coeff(1).unwrap(), RationalFunctionR::constant(q(-1, 1)));
    }

    #[test]
    fn dp1_retries_to_reach_regular_value() {
        let report = run_confinement(&dp1(), 5, Scenario::Zero).unwrap();
        assert!(report.confined);
        assert_eq!(report.singular_span, vec![6, 7, 8]);
        assert_eq!(report.regular_index, Some(9));
        assert!(report.terms_used > DEFAULT_TERMS);
        assert_eq!(report.coefficient(8, 1).unwrap(), RationalFunctionR::constant(q(-8, 5)));
        assert_eq!(report.coefficient(9, 0).unwrap(), RationalFunctionR::linear(q(5, 8)));
    }

    #[test]
    fn dp2_near_plus_one() {
        let m = PainleveMap::dp2(ExactReal::int(1), ExactReal::int(0), ExactReal::int(0));
        let report = run_confinement(&m, 4, Scenario::PlusOne).unwrap();
        assert!(report.confined);
        assert_eq!(report.singular_span, vec![5, 6]);
        assert_eq!(report.alternation, Some(true));
        assert_eq!(report.coefficient(7, 0).unwrap(), lin(q(-2, 3), q(5, 6)));
    }

    #[test]
    fn qp1_memory_coefficient() {
        let m = PainleveMap::qp1(q(1, 2)).unwrap();
        let report = run_confinement(&m, 5, Scenario::Zero).unwrap();
        assert!(report.confined);
        assert_eq!(report.coefficient(9, 0).unwrap(), RationalFunctionR::linear(q(62, 255)));
    }

    #[test]
    fn wrong_seed_and_sextic_are_refused() {
        assert!(matches!(run_confinement(&dp1(), 5, Scenario::PlusOne), Err(Error::Domain(_))));
        let sextic = PainleveMap::DP1SexticFreud { rho: Rational::new() };
        assert!(matches!(run_confinement(&sextic, 5, Scenario::Zero), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn shadow_matches_leading_terms() {
        let m = dp1();
        let report = run_confinement(&m, 5, Scenario::Zero).unwrap();
        let eps = Float::with_val(256, 1e-8_f64);
        let shadow = numeric_shadow(&m, &report, &q(7, 10), &eps, Precision::new(60).unwrap()).unwrap();
        assert_eq!(shadow.entries.len(), 4);
        assert!(shadow.agrees_to(6), "{}", shadow.max_rel_err);
    }
}
