//! Weight families, their moments, starting values for the nonlinear
//! recurrences, and closed-form recurrence coefficients where they exist.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::mpnum::{bessel_i, format_sci, gamma_rational, q_pochhammer_inf, BigReal, Precision};

/// One of the studied weights. Parameters are exact so that decimal inputs
/// such as `q = 0.9` mean exactly 9/10 at every precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightFamily {
    /// `|x|^rho exp(-x^2)` on the real line.
    GeneralizedHermite { rho: Rational },
    /// `|x|^rho exp(-x^4 + lambda x^2)` on the real line.
    FreudQuartic { rho: Rational, lambda: Rational },
    /// `|x|^rho exp(-x^6)` on the real line.
    FreudSextic { rho: Rational },
    /// `exp(lambda cos theta)` on the unit circle.
    ExpCosCircle { lambda: Rational },
    /// Poisson weights `a^k / k!` on the nonnegative integers.
    Charlier { a: Rational },
    /// `a^k / (k!)^2` on the nonnegative integers.
    GeneralizedCharlier { a: Rational },
    /// `(x^2 q^2; q^2)_inf` on the lattice `{±q^k}`.
    QHermite { q: Rational },
    /// `(q^4 x^4; q^4)_inf` on the lattice `{±q^k}`.
    QFreud { q: Rational },
    /// `(x^2 q^2; q^2)_inf (c x^2 q^2; q^2)_inf` on the lattice `{±q^k}`.
    QFreudGeneral { q: Rational, c: Rational },
}

/// Where the orthogonality measure lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    RealLine,
    UnitCircle,
    Integers,
    QLattice,
}

impl WeightFamily {
    pub fn generalized_hermite(rho: Rational) -> Result<Self> {
        Self::checked(WeightFamily::GeneralizedHermite { rho })
    }

    pub fn freud_quartic(rho: Rational, lambda: Rational) -> Result<Self> {
        Self::checked(WeightFamily::FreudQuartic { rho, lambda })
    }

    pub fn freud_sextic(rho: Rational) -> Result<Self> {
        Self::checked(WeightFamily::FreudSextic { rho })
    }

    pub fn exp_cos_circle(lambda: Rational) -> Result<Self> {
        Self::checked(WeightFamily::ExpCosCircle { lambda })
    }

    pub fn charlier(a: Rational) -> Result<Self> {
        Self::checked(WeightFamily::Charlier { a })
    }

    pub fn generalized_charlier(a: Rational) -> Result<Self> {
        Self::checked(WeightFamily::GeneralizedCharlier { a })
    }

    pub fn q_hermite(q: Rational) -> Result<Self> {
        Self::checked(WeightFamily::QHermite { q })
    }

    pub fn q_freud(q: Rational) -> Result<Self> {
        Self::checked(WeightFamily::QFreud { q })
    }

    pub fn q_freud_general(q: Rational, c: Rational) -> Result<Self> {
        Self::checked(WeightFamily::QFreudGeneral { q, c })
    }

    fn checked(family: Self) -> Result<Self> {
        family.validate()?;
        Ok(family)
    }

    /// Rejects parameters outside the family's domain.
    pub fn validate(&self) -> Result<()> {
        fn rho_ok(rho: &Rational) -> Result<()> {
            if *rho > -1 {
                Ok(())
            } else {
                Err(Error::domain("rho must exceed -1"))
            }
        }
        fn positive(name: &str, v: &Rational) -> Result<()> {
            if v.cmp0() == Ordering::Greater {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive")))
            }
        }
        fn q_ok(q: &Rational) -> Result<()> {
            if q.cmp0() == Ordering::Greater && *q < 1 {
                Ok(())
            } else {
                Err(Error::domain("q must lie in (0, 1)"))
            }
        }
        match self {
            WeightFamily::GeneralizedHermite { rho }
            | WeightFamily::FreudQuartic { rho, .. }
            | WeightFamily::FreudSextic { rho } => rho_ok(rho),
            WeightFamily::ExpCosCircle { lambda } => positive("lambda", lambda),
            WeightFamily::Charlier { a } | WeightFamily::GeneralizedCharlier { a } => positive("a", a),
            WeightFamily::QHermite { q } | WeightFamily::QFreud { q } => q_ok(q),
            WeightFamily::QFreudGeneral { q, c } => {
                q_ok(q)?;
                if *c > 1 || c.cmp0() == Ordering::Equal {
                    return Err(Error::domain("c must satisfy c <= 1 and c != 0"));
                }
                Ok(())
            }
        }
    }

    /// Short tag used on the command line and in output metadata.
    pub fn tag(&self) -> &'static str {
        match self {
            WeightFamily::GeneralizedHermite { .. } => "hermite",
            WeightFamily::FreudQuartic { .. } => "freud4",
            WeightFamily::FreudSextic { .. } => "freud6",
            WeightFamily::ExpCosCircle { .. } => "circle",
            WeightFamily::Charlier { .. } => "charlier",
            WeightFamily::GeneralizedCharlier { .. } => "gcharlier",
            WeightFamily::QHermite { .. } => "qhermite",
            WeightFamily::QFreud { .. } => "qfreud",
            WeightFamily::QFreudGeneral { .. } => "qfreud-gen",
        }
    }

    /// Parameter names and exact values, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, Rational)> {
        match self {
            WeightFamily::GeneralizedHermite { rho } | WeightFamily::FreudSextic { rho } => {
                vec![("rho", rho.clone())]
            }
            WeightFamily::FreudQuartic { rho, lambda } => vec![("rho", rho.clone()), ("lambda", lambda.clone())],
            WeightFamily::ExpCosCircle { lambda } => vec![("lambda", lambda.clone())],
            WeightFamily::Charlier { a } | WeightFamily::GeneralizedCharlier { a } => vec![("a", a.clone())],
            WeightFamily::QHermite { q } | WeightFamily::QFreud { q } => vec![("q", q.clone())],
            WeightFamily::QFreudGeneral { q, c } => vec![("q", q.clone()), ("c", c.clone())],
        }
    }

    pub fn support(&self) -> Support {
        match self {
            WeightFamily::GeneralizedHermite { .. }
            | WeightFamily::FreudQuartic { .. }
            | WeightFamily::FreudSextic { .. } => Support::RealLine,
            WeightFamily::ExpCosCircle { .. } => Support::UnitCircle,
            WeightFamily::Charlier { .. } | WeightFamily::GeneralizedCharlier { .. } => Support::Integers,
            WeightFamily::QHermite { .. } | WeightFamily::QFreud { .. } | WeightFamily::QFreudGeneral { .. } => {
                Support::QLattice
            }
        }
    }

    /// Symmetric weights have vanishing odd moments and `b_n = 0`.
    pub fn is_symmetric(&self) -> bool {
        matches!(self.support(), Support::RealLine | Support::QLattice)
    }

    /// Whether a nonlinear (Painlevé-type) recurrence is available.
    pub fn has_recurrence(&self) -> bool {
        matches!(
            self,
            WeightFamily::FreudQuartic { .. }
                | WeightFamily::FreudSextic { .. }
                | WeightFamily::ExpCosCircle { .. }
                | WeightFamily::GeneralizedCharlier { .. }
                | WeightFamily::QFreud { .. }
                | WeightFamily::QFreudGeneral { .. }
        )
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(
            self,
            WeightFamily::GeneralizedHermite { .. } | WeightFamily::Charlier { .. } | WeightFamily::QHermite { .. }
        )
    }

    /// The lattice parameter of q-families.
    pub fn q(&self) -> Option<&Rational> {
        match self {
            WeightFamily::QHermite { q } | WeightFamily::QFreud { q } | WeightFamily::QFreudGeneral { q, .. } => Some(q),
            _ => None,
        }
    }

    /// The `k`-th moment. For the circle, `k` is a Fourier index and
    /// `c_{-k} = c_k`; elsewhere `k` must be nonnegative.
    pub fn moment(&self, k: i64, p: Precision) -> Result<BigReal> {
        let index = match self.support() {
            Support::UnitCircle => k.unsigned_abs() as usize,
            _ if k < 0 => return Err(Error::domain("moment index must be nonnegative")),
            _ => k as usize,
        };
        let mut all = self.moments(index + 1, p)?;
        Ok(BigReal::new(&all.swap_remove(index), p))
    }

    /// Moments `0..count`, rounded to `p`.
    pub fn moments(&self, count: usize, p: Precision) -> Result<Vec<Float>> {
        self.validate()?;
        let raw = match self {
            WeightFamily::GeneralizedHermite { rho } => freud_moments(rho, 2, count, p)?,
            WeightFamily::FreudSextic { rho } => freud_moments(rho, 6, count, p)?,
            WeightFamily::FreudQuartic { rho, lambda } if lambda.cmp0() == Ordering::Equal => {
                freud_moments(rho, 4, count, p)?
            }
            WeightFamily::FreudQuartic { rho, lambda } => quartic_lambda_moments(rho, lambda, count, p)?,
            WeightFamily::ExpCosCircle { lambda } => {
                let z = p.guarded().float(lambda);
                (0..count)
                    .map(|k| bessel_i(k as u32, &z, p).map(BigReal::into_float))
                    .collect::<Result<_>>()?
            }
            WeightFamily::Charlier { a } => integer_lattice_moments(a, 1, count, p),
            WeightFamily::GeneralizedCharlier { a } => integer_lattice_moments(a, 2, count, p),
            WeightFamily::QHermite { .. } | WeightFamily::QFreud { .. } | WeightFamily::QFreudGeneral { .. } => {
                q_lattice_moments(self, count, p)?
            }
        };
        Ok(raw.iter().map(|m| Float::with_val(p.bits(), m)).collect())
    }

    /// Starting values for the family's nonlinear recurrence.
    pub fn initial_data(&self, p: Precision) -> Result<InitialData> {
        self.validate()?;
        let g = p.guarded();
        let round = |v: Float| Float::with_val(p.bits(), v);
        let zero = p.zero();
        let data = match self {
            WeightFamily::FreudQuartic { rho, lambda } => {
                let x1 = if lambda.cmp0() == Ordering::Equal {
                    // x_1 = 2 a_1^2 = 2 Gamma((3+rho)/4) / Gamma((1+rho)/4)
                    let num = gamma_rational(&Rational::from((rho + Rational::from(3)) / 4), g)?;
                    let den = gamma_rational(&Rational::from((rho + Rational::from(1)) / 4), g)?;
                    Float::with_val(g.bits(), num.value() / den.value()) * 2u32
                } else {
                    let m = self.moments(3, g)?;
                    Float::with_val(g.bits(), &m[2] / &m[0]) * 2u32
                };
                InitialData::new(0, vec![zero, round(x1)])
            }
            WeightFamily::FreudSextic { .. } => {
                let m = self.moments(5, g)?;
                let a1 = Float::with_val(g.bits(), &m[2] / &m[0]);
                // a_2^2 = (mu_4 mu_0 - mu_2^2) / (mu_0 mu_2)
                let num = Float::with_val(g.bits(), &m[4] * &m[0]) - Float::with_val(g.bits(), m[2].square_ref());
                let a2 = num / Float::with_val(g.bits(), &m[0] * &m[2]);
                InitialData::new(0, vec![zero, round(a1), round(a2)])
            }
            WeightFamily::ExpCosCircle { lambda } => {
                let z = g.float(lambda);
                let ratio = bessel_ratio(&z, g)?;
                InitialData::new(-1, vec![p.float(-1), round(ratio)])
            }
            WeightFamily::GeneralizedCharlier { a } => {
                let z = Float::with_val(g.bits(), g.float(a).sqrt()) * 2u32;
                let ratio = bessel_ratio(&z, g)?;
                InitialData::new(0, vec![p.float(1), round(ratio)])
            }
            WeightFamily::QFreud { q } => {
                let qf = g.float(q);
                let q4 = Float::with_val(g.bits(), qf.clone().pow(4u32));
                let q3 = Float::with_val(g.bits(), qf.clone().pow(3u32));
                let num = q_pochhammer_inf(&qf, &q4, g)?;
                let den = q_pochhammer_inf(&q3, &q4, g)?;
                InitialData::new(0, vec![zero, round(Float::with_val(g.bits(), num.value() / den.value()))])
            }
            WeightFamily::QFreudGeneral { .. } => {
                let m = self.moments(3, g)?;
                InitialData::new(0, vec![zero, round(Float::with_val(g.bits(), &m[2] / &m[0]))])
            }
            _ => {
                return Err(Error::UnsupportedFamily(format!(
                    "{} has no nonlinear recurrence; use its closed form",
                    self.tag()
                )))
            }
        };
        Ok(data)
    }

    /// Closed-form `(a_n, b_n)` for `n >= 1`.
    pub fn closed_form(&self, n: u32, p: Precision) -> Result<(BigReal, BigReal)> {
        if n == 0 {
            return Err(Error::domain("closed_form index must be positive"));
        }
        let (a2, b) = self.closed_form_exact(n, p)?;
        Ok((BigReal::new(&a2.sqrt(), p), BigReal::new(&b, p)))
    }

    /// `(a_n^2, b_n)` in closed form; `n = 0` gives `(0, b_0)`.
    fn closed_form_exact(&self, n: u32, p: Precision) -> Result<(Float, Float)> {
        self.validate()?;
        let g = p.guarded();
        let nn = Rational::from(n);
        match self {
            WeightFamily::GeneralizedHermite { rho } => {
                // a_n^2 = (n + rho Delta_n) / 2 with Delta_n = (1 - (-1)^n) / 2
                let delta = if n % 2 == 1 { rho.clone() } else { Rational::new() };
                Ok((g.float(&Rational::from((nn + delta) / 2)), g.zero()))
            }
            WeightFamily::Charlier { a } => Ok((g.float(&Rational::from(a * &nn)), g.float(&Rational::from(nn + a)))),
            WeightFamily::QHermite { q } => {
                if n == 0 {
                    return Ok((g.zero(), g.zero()));
                }
                let qf = g.float(q);
                let qn1 = Float::with_val(g.bits(), qf.clone().pow(n - 1));
                let qn = Float::with_val(g.bits(), qf.pow(n));
                Ok((qn1 * (1 - qn), g.zero()))
            }
            _ => Err(Error::UnsupportedFamily(format!("{} has no closed-form coefficients", self.tag()))),
        }
    }

    /// Closed-form coefficients `a_1..a_n_max`, `b_0..b_n_max`.
    pub fn closed_form_coeffs(&self, n_max: u32, p: Precision) -> Result<RecurrenceCoeffs> {
        let mut a_sq = Vec::with_capacity(n_max as usize + 1);
        let mut b = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            let (a2, bn) = self.closed_form_exact(n, p)?;
            a_sq.push(Float::with_val(p.bits(), a2));
            b.push(Float::with_val(p.bits(), bn));
        }
        RecurrenceCoeffs::new(a_sq, b, p)
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())?;
        let params = self.params();
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", body.join(", "))?;
        }
        Ok(())
    }
}

/// `I_1(z) / I_0(z)`.
fn bessel_ratio(z: &Float, p: Precision) -> Result<Float> {
    let i1 = bessel_i(1, z, p)?;
    let i0 = bessel_i(0, z, p)?;
    Ok(Float::with_val(p.bits(), i1.value() / i0.value()))
}

/// `int |x|^(rho + k) exp(-|x|^m) dx = (2/m) Gamma((rho + k + 1)/m)` for even `k`.
fn freud_moments(rho: &Rational, m: u32, count: usize, p: Precision) -> Result<Vec<Float>> {
    let g = p.guarded();
    (0..count)
        .map(|k| {
            if k % 2 == 1 {
                return Ok(g.zero());
            }
            let arg = Rational::from((rho + Rational::from(k as u64 + 1)) / m);
            let gm = gamma_rational(&arg, g)?;
            Ok(Float::with_val(g.bits(), gm.value() * 2u32) / m)
        })
        .collect()
}

/// Moments of `|x|^rho exp(-x^4 + lambda x^2)` from the expansion of
/// `exp(lambda x^2)`, each term a quartic Freud moment.
fn quartic_lambda_moments(rho: &Rational, lambda: &Rational, count: usize, p: Precision) -> Result<Vec<Float>> {
    (0..count)
        .map(|k| {
            if k % 2 == 1 {
                Ok(p.guarded().zero())
            } else {
                quartic_lambda_moment(&Rational::from(rho + k as u64), lambda, p)
            }
        })
        .collect()
}

fn quartic_lambda_moment(s: &Rational, lambda: &Rational, p: Precision) -> Result<Float> {
    // Alternating terms (lambda < 0) cancel; rerun with the lost digits added.
    let mut extra = 0u32;
    loop {
        let g = p.guarded().with_extra(extra);
        let bits = g.bits();
        let lam = g.float(lambda);
        let mut sum = g.zero();
        let mut abs_sum = g.zero();
        let mut power = g.float(1); // lambda^j / j!
        let mut prev_abs = g.zero();
        let mut j: u64 = 0;
        loop {
            let arg = Rational::from((s + Rational::from(2 * j + 1)) / 4);
            let gm = gamma_rational(&arg, g)?;
            let term = Float::with_val(bits, gm.value() * &power) / 2u32;
            let term_abs = Float::with_val(bits, term.abs_ref());
            sum += &term;
            abs_sum += &term_abs;
            let shrinking = j > 0 && Float::with_val(bits, &term_abs * 2u32) < prev_abs;
            if lam.is_zero() || (shrinking && term_abs.is_zero()) {
                break;
            }
            if shrinking {
                if let (Some(t), Some(a)) = (term_abs.get_exp(), abs_sum.get_exp()) {
                    if i64::from(t) < i64::from(a) - i64::from(bits) {
                        break;
                    }
                }
            }
            prev_abs = term_abs;
            j += 1;
            power *= &lam;
            power /= j;
        }
        if sum.is_zero() {
            return Err(Error::PrecisionExhausted("quartic moment cancelled completely".into()));
        }
        let ratio = Float::with_val(64, &abs_sum / Float::with_val(bits, sum.abs_ref()));
        let lost = ratio.to_f64().log10().ceil().max(0.0) as u32;
        if lost <= extra {
            return Ok(sum);
        }
        extra = lost + 5;
    }
}

/// `sum_k k^j a^k / (k!)^power` for `j = 0..count`.
fn integer_lattice_moments(a: &Rational, power: u32, count: usize, p: Precision) -> Vec<Float> {
    let g = p.guarded();
    let bits = g.bits();
    let af = g.float(a);
    let mut sums: Vec<Float> = (0..count).map(|_| g.zero()).collect();
    if let Some(first) = sums.first_mut() {
        *first += 1u32; // k = 0 contributes 0^0 = 1 to the zeroth moment only
    }
    let mut weight = g.float(1);
    let mut k: u64 = 0;
    loop {
        k += 1;
        weight *= &af;
        for _ in 0..power {
            weight /= k;
        }
        let mut term = weight.clone();
        let mut all_negligible = true;
        for s in sums.iter_mut() {
            *s += &term;
            if !term_negligible(&term, s, bits) {
                all_negligible = false;
            }
            term *= k;
        }
        // Ratio of consecutive top-order terms: a ((k+1)/k)^(count-1) / (k+1)^power.
        let growth = (k as f64 + 1.0) / k as f64;
        let ratio = a.to_f64() * growth.powi(count.saturating_sub(1) as i32) / (k as f64 + 1.0).powi(power as i32);
        if all_negligible && ratio < 0.5 {
            break;
        }
    }
    sums
}

fn term_negligible(term: &Float, total: &Float, bits: u32) -> bool {
    match (term.get_exp(), total.get_exp()) {
        _ if term.is_zero() => true,
        (Some(t), Some(s)) => i64::from(t) < i64::from(s) - i64::from(bits),
        _ => false,
    }
}

/// q-integral moments `int_{-1}^{1} x^j w(x) d_q x`.
///
/// Lattice weights are generated from `w(1)` through the Pearson relation
/// `w(q^(k+1)) = w(q^k) / f(q^(k+1))`, where `f(x) w(x) = w(x/q)`.
fn q_lattice_moments(family: &WeightFamily, count: usize, p: Precision) -> Result<Vec<Float>> {
    let g = p.guarded();
    let bits = g.bits();
    let q = g.float(family.q().expect("q-family"));
    let q2 = Float::with_val(bits, q.square_ref());
    let q4 = Float::with_val(bits, q2.square_ref());
    let c = match family {
        WeightFamily::QFreudGeneral { c, .. } => Some(g.float(c)),
        _ => None,
    };
    let mut weight = match family {
        WeightFamily::QHermite { .. } => q_pochhammer_inf(&q2, &q2, g)?.into_float(),
        WeightFamily::QFreud { .. } => q_pochhammer_inf(&q4, &q4, g)?.into_float(),
        _ => {
            let cq2 = Float::with_val(bits, c.as_ref().expect("c") * &q2);
            q_pochhammer_inf(&q2, &q2, g)?.into_float() * q_pochhammer_inf(&cq2, &q2, g)?.into_float()
        }
    };
    let first_weight = weight.clone();
    let one_minus_q = Float::with_val(bits, 1 - &q);
    let mut sums: Vec<Float> = (0..count).map(|_| g.zero()).collect();
    let mut node = g.float(1); // q^k
    loop {
        // term for moment j: q^k * (q^k)^j * w(q^k)
        let mut term = Float::with_val(bits, &node * &weight);
        let lead = term.clone();
        for (j, s) in sums.iter_mut().enumerate() {
            if j % 2 == 0 {
                *s += &term;
            }
            term *= &node;
        }
        let tail = lead / &one_minus_q;
        if term_negligible(&tail, &first_weight, bits) {
            break;
        }
        node *= &q;
        let x2 = Float::with_val(bits, node.square_ref());
        let pearson = match family {
            WeightFamily::QHermite { .. } => Float::with_val(bits, 1 - &x2),
            WeightFamily::QFreud { .. } => Float::with_val(bits, 1 - Float::with_val(bits, x2.square_ref())),
            _ => {
                let cx2 = Float::with_val(bits, c.as_ref().expect("c") * &x2);
                Float::with_val(bits, 1 - &x2) * Float::with_val(bits, 1 - cx2)
            }
        };
        weight /= pearson;
    }
    let scale = one_minus_q * 2u32;
    Ok(sums.into_iter().map(|s| s * &scale).collect())
}

/// Freud's constant `(Gamma(m+1) / (Gamma(m/2) Gamma(m/2+1)))^(-1/m)`.
pub fn freud_constant(m: &Rational, p: Precision) -> Result<BigReal> {
    if m.cmp0() != Ordering::Greater {
        return Err(Error::domain("m must be positive"));
    }
    let g = p.guarded();
    let half = Rational::from(m / Rational::from(2));
    let num = gamma_rational(&Rational::from(m + Rational::from(1)), g)?;
    let d1 = gamma_rational(&half, g)?;
    let d2 = gamma_rational(&Rational::from(&half + Rational::from(1)), g)?;
    let base = Float::with_val(g.bits(), num.value() / d1.value()) / d2.value();
    let exponent = -Float::with_val(g.bits(), 1) / g.float(m);
    Ok(BigReal::new(&base.pow(exponent), p))
}

/// Starting values of a nonlinear recurrence: `values[i]` sits at index
/// `base_index + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub base_index: i64,
    pub values: Vec<Float>,
}

impl InitialData {
    pub fn new(base_index: i64, values: Vec<Float>) -> Self {
        InitialData { base_index, values }
    }

    pub fn last_index(&self) -> i64 {
        self.base_index + self.values.len() as i64 - 1
    }

    pub fn describe(&self, digits: u32) -> Vec<(i64, String)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.base_index + i as i64, format_sci(v, digits)))
            .collect()
    }
}

/// Three-term recurrence coefficients. `a_sq[0]` holds `a_0^2 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs {
    a_sq: Vec<Float>,
    b: Vec<Float>,
    precision: Precision,
}

impl RecurrenceCoeffs {
    /// Checks `a_n^2 > 0` for every stored `n >= 1`.
    pub fn new(mut a_sq: Vec<Float>, b: Vec<Float>, precision: Precision) -> Result<Self> {
        if a_sq.is_empty() {
            a_sq.push(precision.zero());
        }
        for (n, v) in a_sq.iter().enumerate().skip(1) {
            if v.cmp0() != Some(Ordering::Greater) {
                return Err(Error::Reconstruction {
                    index: n as i64,
                    reason: format!("a_n^2 = {} is not positive", format_sci(v, 10)),
                });
            }
        }
        Ok(RecurrenceCoeffs { a_sq, b, precision })
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Largest `n` with `a_n` available.
    pub fn max_a_index(&self) -> usize {
        self.a_sq.len() - 1
    }

    /// Number of stored `b_n` (indices `0..len`).
    pub fn b_len(&self) -> usize {
        self.b.len()
    }

    pub fn a_sq(&self, n: usize) -> Option<&Float> {
        self.a_sq.get(n)
    }

    pub fn a(&self, n: usize) -> Option<Float> {
        self.a_sq.get(n).map(|v| Float::with_val(v.prec(), v.sqrt_ref()))
    }

    pub fn b(&self, n: usize) -> Option<&Float> {
        self.b.get(n)
    }

    pub fn a_sq_all(&self) -> &[Float] {
        &self.a_sq
    }

    pub fn b_all(&self) -> &[Float] {
        &self.b
    }

    /// Copy with `a_n` multiplied by `factor` (used for negative controls).
    pub fn with_scaled_a(&self, n: usize, factor: &Float) -> Self {
        let mut out = self.clone();
        if let Some(v) = out.a_sq.get_mut(n) {
            let f2 = Float::with_val(v.prec(), factor.square_ref());
            *v *= f2;
        }
        out
    }
}

/// Verblunsky coefficients `alpha_0..` with the ratios
/// `kappa_n^2 / kappa_{n+1}^2 = 1 - alpha_n^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyCoeffs {
    pub alpha: Vec<Float>,
    pub kappa_ratio: Vec<Float>,
    pub precision: Precision,
}

/// Output of a recurrence reconstruction or an oracle run.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Line(RecurrenceCoeffs),
    Circle(VerblunskyCoeffs),
}

impl Coefficients {
    /// The quantity compared across pipelines: `a_n^2` on the line and
    /// lattices, `kappa_n^2 / kappa_{n+1}^2` on the circle.
    pub fn a2_analog(&self, n: usize) -> Option<&Float> {
        match self {
            Coefficients::Line(c) => c.a_sq(n),
            Coefficients::Circle(v) => v.kappa_ratio.get(n),
        }
    }

    pub fn line(&self) -> Option<&RecurrenceCoeffs> {
        match self {
            Coefficients::Line(c) => Some(c),
            Coefficients::Circle(_) => None,
        }
    }

    pub fn circle(&self) -> Option<&VerblunskyCoeffs> {
        match self {
            Coefficients::Circle(v) => Some(v),
            Coefficients::Line(_) => None,
        }
    }
}
