use std::fmt;

use rug::Rational;

use super::ratfunc::RationalFunctionR;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::mpnum::ExactReal;

/// Default number of stored ε-orders.
pub const DEFAULT_TERMS: usize = 3;

const EXACT_ZERO_ORDER: i64 = i64::MAX / 4;

/// Truncated Laurent series in ε over `Q(r)`.
///
/// Coefficients of ε^k are known for `low <= k < low + coeffs.len()`; the
/// first stored coefficient is nonzero. An empty series is zero up to its
/// truncation order `low` (or exactly zero, for embedded constants).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicLaurent {
    low: i64,
    coeffs: Vec<RationalFunctionR>,
    terms: usize,
}

impl SymbolicLaurent {
    pub fn exact_zero(terms: usize) -> Self {
        SymbolicLaurent {
            low: EXACT_ZERO_ORDER,
            coeffs: Vec::new(),
            terms,
        }
    }

    pub fn constant(c: RationalFunctionR, terms: usize) -> Self {
        Self::from_terms(0, vec![c], terms)
    }

    /// The formal symbol `r` (the free predecessor).
    pub fn symbol(terms: usize) -> Self {
        Self::constant(RationalFunctionR::symbol(), terms)
    }

    /// `c + ε`.
    pub fn seed(c: Rational, terms: usize) -> Self {
        Self::from_terms(0, vec![RationalFunctionR::constant(c), RationalFunctionR::constant(Rational::from(1))], terms)
    }

    /// Series `sum coeffs[i] ε^(low+i)`, exact up to the stored length
    /// (padded with zeros to `terms` orders).
    pub fn from_terms(low: i64, coeffs: Vec<RationalFunctionR>, terms: usize) -> Self {
        if coeffs.iter().all(RationalFunctionR::is_zero) {
            return Self::exact_zero(terms);
        }
        let mut coeffs = coeffs;
        let lead = coeffs.iter().position(|c| !c.is_zero()).expect("some nonzero");
        coeffs.drain(..lead);
        coeffs.resize(terms.max(coeffs.len()), RationalFunctionR::zero());
        coeffs.truncate(terms);
        SymbolicLaurent {
            low: low + lead as i64,
            coeffs,
            terms,
        }
    }

    fn normalized(mut low: i64, mut coeffs: Vec<RationalFunctionR>, terms: usize) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        low += lead as i64;
        coeffs.truncate(terms);
        SymbolicLaurent { low, coeffs, terms }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.low >= EXACT_ZERO_ORDER
    }

    /// Whether no coefficient is known to be nonzero.
    pub fn is_unresolved(&self) -> bool {
        self.coeffs.is_empty() && !self.is_exact_zero()
    }

    /// Order of the leading known term (`None` if unresolved or zero).
    pub fn lowest_order(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    /// First unknown order (`None` for exact zero).
    pub fn truncation_order(&self) -> Option<i64> {
        (!self.is_exact_zero()).then(|| self.low + self.coeffs.len() as i64)
    }

    /// Coefficient of ε^k, or `None` when it lies beyond the truncation.
    pub fn coeff(&self, k: i64) -> Option<RationalFunctionR> {
        if self.is_exact_zero() {
            return Some(RationalFunctionR::zero());
        }
        if k < self.low {
            return Some(RationalFunctionR::zero());
        }
        self.coeffs.get((k - self.low) as usize).cloned()
    }

    pub fn leading(&self) -> Option<&RationalFunctionR> {
        self.coeffs.first()
    }

    pub fn pole_order(&self) -> i64 {
        match self.lowest_order() {
            Some(l) if l < 0 => -l,
            _ => 0,
        }
    }

    /// `(order, coefficient)` for every known nonzero term.
    pub fn known_terms(&self) -> Vec<(i64, RationalFunctionR)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.low + i as i64, c.clone()))
            .collect()
    }

    fn effective_low(&self) -> i64 {
        self.lowest_order().unwrap_or(self.low)
    }

    fn inverse(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::ZeroPivot);
        }
        if self.coeffs.is_empty() {
            return Err(Error::TruncationInsufficient(format!(
                "divisor vanishes to all {} stored orders",
                self.terms
            )));
        }
        let b0 = &self.coeffs[0];
        let mut out: Vec<RationalFunctionR> = Vec::with_capacity(self.coeffs.len());
        out.push(RationalFunctionR::constant(Rational::from(1)).div(b0)?);
        for k in 1..self.coeffs.len() {
            let mut s = RationalFunctionR::zero();
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(s.neg().div(b0)?);
        }
        Ok(Self::normalized(-self.low, out, self.terms))
    }
}

impl Field for SymbolicLaurent {
    fn embed(&self, v: &ExactReal) -> Result<Self> {
        let r = v.as_rational().ok_or_else(|| {
            Error::domain(format!("parameter {v} is irrational; symbolic arithmetic needs a rational value"))
        })?;
        Ok(Self::from_terms(0, vec![RationalFunctionR::constant(r)], self.terms))
    }

    fn int(&self, n: i64) -> Self {
        Self::from_terms(0, vec![RationalFunctionR::constant(Rational::from(n))], self.terms)
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let terms = self.terms.max(other.terms);
        let trunc = self.truncation_order().expect("not exact").min(other.truncation_order().expect("not exact"));
        let low = self.low.min(other.low);
        if trunc <= low {
            return Self::normalized(trunc, Vec::new(), terms);
        }
        let coeffs = (low..trunc)
            .map(|k| {
                self.coeff(k)
                    .expect("below truncation")
                    .add(&other.coeff(k).expect("below truncation"))
            })
            .collect();
        Self::normalized(low, coeffs, terms)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn neg(&self) -> Self {
        SymbolicLaurent {
            low: self.low,
            coeffs: self.coeffs.iter().map(RationalFunctionR::neg).collect(),
            terms: self.terms,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let terms = self.terms.max(other.terms);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::exact_zero(terms);
        }
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let ta = self.truncation_order().expect("not exact");
            let tb = other.truncation_order().expect("not exact");
            let trunc = (ta + other.effective_low()).min(tb + self.effective_low());
            return Self::normalized(trunc, Vec::new(), terms);
        }
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                (0..=k).fold(RationalFunctionR::zero(), |s, i| s.add(&self.coeffs[i].mul(&other.coeffs[k - i])))
            })
            .collect();
        Self::normalized(self.low + other.low, coeffs, terms)
    }

    fn div(&self, other: &Self) -> Result<Self> {
        let inv = other.inverse()?;
        Ok(self.mul(&inv))
    }
}

fn power(k: i64) -> String {
    match k {
        0 => String::new(),
        1 => "eps".into(),
        _ => format!("eps^{k}"),
    }
}

impl fmt::Display for SymbolicLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.known_terms() {
            let text = c.to_string();
            let coef = if c.depends_on_r() && text.contains(' ') { format!("({text})") } else { text };
            parts.push(match (k, coef.as_str()) {
                (0, _) => coef,
                (_, "1") => power(k),
                (_, "-1") => format!("-{}", power(k)),
                _ => format!("{coef}*{}", power(k)),
            });
        }
        let trunc = self.truncation_order().expect("not exact");
        parts.push(format!("O({})", if trunc == 0 { "1".into() } else { power(trunc) }));
        f.write_str(&parts.join(" + "))
    }
}
