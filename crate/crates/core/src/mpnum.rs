//! Multiprecision real arithmetic: the precision contract, exact parameter
//! values, and the special functions needed for moments and initial data.
//!
//! Every special function evaluates with [`Precision::GUARD_DIGITS`] extra
//! decimal digits and rounds the result back to the requested precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision, counted in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision {
    decimal_digits: u32,
}

impl Precision {
    pub const MIN_DIGITS: u32 = 10;
    pub const GUARD_DIGITS: u32 = 10;

    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < Self::MIN_DIGITS {
            return Err(Error::domain(format!(
                "precision must be at least {} digits, got {decimal_digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Precision { decimal_digits })
    }

    pub fn digits(self) -> u32 {
        self.decimal_digits
    }

    /// Binary precision used for a decimal precision. One extra bit over
    /// `ceil(d log2 10)` makes every d-digit decimal survive a round trip.
    pub fn bits(self) -> u32 {
        digits_to_bits(self.decimal_digits)
    }

    pub fn guarded(self) -> Precision {
        Precision {
            decimal_digits: self.decimal_digits + Self::GUARD_DIGITS,
        }
    }

    pub fn with_extra(self, extra: u32) -> Precision {
        Precision {
            decimal_digits: self.decimal_digits + extra,
        }
    }

    pub fn doubled(self) -> Precision {
        Precision {
            decimal_digits: self.decimal_digits * 2,
        }
    }

    /// Zero at this precision.
    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    pub fn float<T>(self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.decimal_digits)
    }
}

pub fn digits_to_bits(decimal_digits: u32) -> u32 {
    (f64::from(decimal_digits) * LOG2_10).ceil() as u32 + 1
}

/// A multiprecision value tagged with the precision it was computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct BigReal {
    value: Float,
    precision: Precision,
}

impl BigReal {
    /// Rounds `value` to `precision`.
    pub fn new(value: &Float, precision: Precision) -> Self {
        BigReal {
            value: Float::with_val(precision.bits(), value),
            precision,
        }
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci(&self, digits: u32) -> String {
        format_sci(&self.value, digits)
    }
}

impl Deref for BigReal {
    type Target = Float;

    fn deref(&self) -> &Float {
        &self.value
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(self.precision.digits()))
    }
}

/// Formats a float in decimal scientific notation, e.g. `6.7597823e-1`.
pub fn format_sci(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (negative, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits.max(1) as usize), Round::Nearest);
    let exp = exp.expect("finite nonzero value has an exponent") - 1;
    let sign = if negative { "-" } else { "" };
    let (lead, rest) = mantissa.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{exp}")
    } else {
        format!("{sign}{lead}.{rest}e{exp}")
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both vanish.
pub fn rel_diff(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    if diff.is_zero() {
        return diff;
    }
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    diff / scale
}

/// `10^(-digits)` at the given binary precision.
pub fn ten_pow_neg(digits: u32, bits: u32) -> Float {
    Float::with_val(bits, 10).pow(-(digits as i32))
}

/// True when `term` is negligible against `total` at `bits` of precision.
fn negligible(term: &Float, total: &Float, bits: u32) -> bool {
    if term.is_zero() {
        return true;
    }
    if total.is_zero() {
        return false;
    }
    match (term.get_exp(), total.get_exp()) {
        (Some(t), Some(s)) => i64::from(t) < i64::from(s) - i64::from(bits),
        _ => false,
    }
}

/// A real number of the form `coeff * sqrt(radicand)` with rational parts.
///
/// Parameters such as `1/sqrt(a)` stay exact this way; the value is rational
/// whenever the radicand is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactReal {
    coeff: Rational,
    radicand: Rational,
}

impl ExactReal {
    pub fn rational(value: Rational) -> Self {
        ExactReal {
            coeff: value,
            radicand: Rational::from(1),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from(n))
    }

    /// `sqrt(x)` for `x >= 0`, simplified to a rational when `x` is a perfect square.
    pub fn sqrt(x: &Rational) -> Result<Self> {
        if x.cmp0() == Ordering::Less {
            return Err(Error::domain(format!("square root of negative value {x}")));
        }
        Ok(ExactReal {
            coeff: Rational::from(1),
            radicand: x.clone(),
        }
        .simplified())
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        ExactReal {
            coeff: Rational::from(&self.coeff * r),
            radicand: self.radicand.clone(),
        }
        .simplified()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPivot);
        }
        // 1/(c sqrt(r)) = (1/(c r)) sqrt(r)
        let denom = Rational::from(&self.coeff * &self.radicand);
        Ok(ExactReal {
            coeff: denom.recip(),
            radicand: self.radicand.clone(),
        }
        .simplified())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.cmp0() == Ordering::Equal || self.radicand.cmp0() == Ordering::Equal
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::new());
        }
        (self.radicand == 1).then(|| self.coeff.clone())
    }

    pub fn to_float(&self, bits: u32) -> Float {
        if self.radicand == 1 {
            return Float::with_val(bits, &self.coeff);
        }
        let root = Float::with_val(bits, &self.radicand).sqrt();
        root * &self.coeff
    }

    fn simplified(mut self) -> Self {
        if self.is_zero() {
            return ExactReal::rational(Rational::new());
        }
        let (num, den) = (self.radicand.numer(), self.radicand.denom());
        if num.is_perfect_square() && den.is_perfect_square() {
            let root = Rational::from((num.clone().sqrt(), den.clone().sqrt()));
            self.coeff *= root;
            self.radicand = Rational::from(1);
        }
        self
    }
}

impl From<Rational> for ExactReal {
    fn from(value: Rational) -> Self {
        ExactReal::rational(value)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand == 1 {
            write!(f, "{}", self.coeff)
        } else if self.coeff == 1 {
            write!(f, "sqrt({})", self.radicand)
        } else {
            write!(f, "{}*sqrt({})", self.coeff, self.radicand)
        }
    }
}

/// Parses a decimal (`0.9`, `-1.5e-3`) or fraction (`1/2`) string exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: `{s}`"));
    if s.contains('/') {
        return s.parse::<Rational>().map_err(|_| bad());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: Integer = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut value = if scale >= 0 {
        Rational::from(numer * ten.pow(scale as u32))
    } else {
        Rational::from((numer, ten.pow((-scale) as u32)))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Gamma function for `x > 0`. Backed by MPFR's correctly rounded `gamma`.
pub fn gamma(x: &Float, p: Precision) -> Result<BigReal> {
    if x.is_nan() || x.cmp0() != Some(Ordering::Greater) {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    let g = p.guarded();
    let value = Float::with_val(g.bits(), x).gamma();
    Ok(BigReal::new(&value, p))
}

/// Gamma function at an exact rational argument.
pub fn gamma_rational(x: &Rational, p: Precision) -> Result<BigReal> {
    gamma(&p.guarded().float(x), p)
}

/// Modified Bessel function `I_nu(z)` for integer `nu >= 0` and `z >= 0`,
/// summed from its power series.
pub fn bessel_i(nu: u32, z: &Float, p: Precision) -> Result<BigReal> {
    if z.is_nan() || z.cmp0() == Some(Ordering::Less) {
        return Err(Error::domain(format!("bessel_i requires z >= 0, got {z}")));
    }
    let g = p.guarded();
    let bits = g.bits();
    if z.is_zero() {
        let v = if nu == 0 { 1 } else { 0 };
        return Ok(BigReal::new(&g.float(v), p));
    }
    let half_z = Float::with_val(bits, z) / 2u32;
    let quarter_z2 = Float::with_val(bits, half_z.square_ref());
    // k = 0 term: (z/2)^nu / nu!
    let mut term = Float::with_val(bits, half_z.pow(nu));
    term /= Float::with_val(bits, Integer::from(Integer::factorial(nu)));
    let mut sum = term.clone();
    let mut k: u32 = 0;
    loop {
        k += 1;
        term *= &quarter_z2;
        term /= Integer::from(k) * Integer::from(k + nu);
        sum += &term;
        // Terms decrease once k(k + nu) exceeds (z/2)^2.
        let decreasing = Float::with_val(64, u64::from(k) * u64::from(k + nu)) > quarter_z2;
        if decreasing && negligible(&term, &sum, bits) {
            break;
        }
    }
    Ok(BigReal::new(&sum, p))
}

/// `(x; q)_inf = prod_{k>=0} (1 - x q^k)` for `0 < q < 1`.
///
/// The product stops once `|x q^k| / (1 - q)` falls below the guard-digit
/// threshold; that quantity bounds the relative size of the dropped tail.
pub fn q_pochhammer_inf(x: &Float, q: &Float, p: Precision) -> Result<BigReal> {
    if !(q.cmp0() == Some(Ordering::Greater) && *q < 1) {
        return Err(Error::domain(format!("q_pochhammer_inf requires 0 < q < 1, got {q}")));
    }
    let g = p.guarded();
    let bits = g.bits();
    let q = Float::with_val(bits, q);
    let one_minus_q = Float::with_val(bits, 1 - &q);
    let mut factor_term = Float::with_val(bits, x);
    let mut product = g.float(1);
    let unit = g.float(1);
    loop {
        if factor_term.is_zero() {
            break;
        }
        product *= Float::with_val(bits, 1 - &factor_term);
        if product.is_zero() {
            break;
        }
        factor_term *= &q;
        let tail = Float::with_val(bits, factor_term.abs_ref()) / &one_minus_q;
        if negligible(&tail, &unit, bits) {
            break;
        }
    }
    Ok(BigReal::new(&product, p))
}

/// Schedule for [`adaptive_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptiveConfig {
    /// First precision tried; `None` means `target + 20` digits.
    pub start_digits: Option<u32>,
    pub max_doublings: u32,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            start_digits: None,
            max_doublings: 4,
        }
    }
}

/// Reruns `eval` at doubling precisions until two consecutive runs agree to
/// `target_digits` significant digits, and returns the later value rounded
/// to the target.
pub fn adaptive_eval<F>(eval: F, target_digits: u32) -> Result<BigReal>
where
    F: Fn(Precision) -> Result<BigReal>,
{
    let target = Precision::new(target_digits)?;
    let tol = ten_pow_neg(target_digits, target.guarded().bits());
    let value = adaptive_eval_with(
        eval,
        target_digits,
        AdaptiveConfig::default(),
        |a: &BigReal, b: &BigReal| rel_diff(a, b) <= tol,
    )?;
    Ok(BigReal::new(&value, target))
}

/// General form of [`adaptive_eval`] with a caller-supplied agreement test.
///
/// Runs failing with a precision-related error count as "not yet stable" and
/// trigger the next doubling; any other error is returned immediately.
pub fn adaptive_eval_with<T, F, A>(
    eval: F,
    target_digits: u32,
    config: AdaptiveConfig,
    agree: A,
) -> Result<T>
where
    F: Fn(Precision) -> Result<T>,
    A: Fn(&T, &T) -> bool,
{
    let mut p = Precision::new(config.start_digits.unwrap_or(target_digits + 20))?;
    let attempt = |p: Precision| match eval(p) {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_precision_related() => Ok(None),
        Err(e) => Err(e),
    };
    let mut previous = attempt(p)?;
    for _ in 0..config.max_doublings {
        p = p.doubled();
        let current = attempt(p)?;
        if let (Some(a), Some(b)) = (&previous, &current) {
            if agree(a, b) {
                return Ok(current.expect("checked above"));
            }
        }
        previous = current;
    }
    Err(Error::Convergence {
        target_digits,
        doublings: config.max_doublings,
        last_digits: p.digits(),
    })
}
