//! Discrete Painlevé maps: forward steps, residuals, iteration, and the
//! reconstruction of recurrence coefficients from iterates.
//!
//! Every map is written once against [`Field`], so the same code runs on
//! multiprecision floats, exact rationals and truncated Laurent series.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mpnum::{format_sci, BigReal, ExactReal, Precision};
use crate::weights::{InitialData, RecurrenceCoeffs, VerblunskyCoeffs, WeightFamily, Coefficients};

/// One discrete Painlevé equation with concrete constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PainleveMap {
    /// `x_{n+1} + x_n + x_{n-1} = (z_n + gamma (-1)^n) / x_n + delta`, `z_n = alpha n + beta`.
    DP1 {
        alpha: ExactReal,
        beta: ExactReal,
        gamma: ExactReal,
        delta: ExactReal,
    },
    /// Fourth-order equation for `u_n = a_n^2` of the sextic Freud weight.
    DP1SexticFreud { rho: Rational },
    /// `x_{n+1} + x_{n-1} = (x_n z_n + gamma) / (1 - x_n^2)`.
    DP2 {
        alpha: ExactReal,
        beta: ExactReal,
        gamma: ExactReal,
    },
    /// `q^n (y_{n+1} y_n + 1)(y_{n-1} y_n + 1) = 1 - y_n^2`.
    QP1 { q: Rational },
    /// `(1 - y_n)(1 - c y_n) = q^n (c y_{n+1} y_n - 1)(c y_{n-1} y_n - 1)`.
    QP1General { q: Rational, c: Rational },
    /// An equation from [`catalog`].
    Catalog { id: String, params: CatalogParams },
}

/// The set a true solution's iterates must stay in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissible {
    Positive,
    OpenUnitInterval,
    Unrestricted,
}

impl Admissible {
    pub fn contains(&self, v: &Float) -> bool {
        if !v.is_finite() {
            return false;
        }
        match self {
            Admissible::Positive => v.cmp0() == Some(Ordering::Greater),
            Admissible::OpenUnitInterval => *v > -1 && *v < 1,
            Admissible::Unrestricted => true,
        }
    }
}

impl PainleveMap {
    pub fn dp1(alpha: ExactReal, beta: ExactReal, gamma: ExactReal, delta: ExactReal) -> Self {
        PainleveMap::DP1 { alpha, beta, gamma, delta }
    }

    pub fn dp2(alpha: ExactReal, beta: ExactReal, gamma: ExactReal) -> Self {
        PainleveMap::DP2 { alpha, beta, gamma }
    }

    pub fn qp1(q: Rational) -> Result<Self> {
        check_q(&q)?;
        Ok(PainleveMap::QP1 { q })
    }

    pub fn qp1_general(q: Rational, c: Rational) -> Result<Self> {
        check_q(&q)?;
        if c > 1 || c.cmp0() == Ordering::Equal {
            return Err(Error::domain("c must satisfy c <= 1 and c != 0"));
        }
        Ok(PainleveMap::QP1General { q, c })
    }

    /// A catalog equation by id. Data-only entries construct fine but
    /// refuse to step.
    pub fn catalog(id: &str, params: CatalogParams) -> Result<Self> {
        let entry = catalog_entry(id).ok_or_else(|| Error::Parse(format!("unknown catalog entry `{id}`")))?;
        if entry.group.is_q() {
            check_q(&params.q)?;
        }
        Ok(PainleveMap::Catalog { id: entry.id.to_string(), params })
    }

    /// Short name for output metadata.
    pub fn tag(&self) -> String {
        match self {
            PainleveMap::DP1 { .. } => "dp1".into(),
            PainleveMap::DP1SexticFreud { .. } => "dp1-sextic".into(),
            PainleveMap::DP2 { .. } => "dp2".into(),
            PainleveMap::QP1 { .. } => "qp1".into(),
            PainleveMap::QP1General { .. } => "qp1-gen".into(),
            PainleveMap::Catalog { id, .. } => id.clone(),
        }
    }

    /// Number of predecessors a step consumes.
    pub fn order(&self) -> usize {
        match self {
            PainleveMap::DP1SexticFreud { .. } => 4,
            _ => 2,
        }
    }

    pub fn admissible(&self) -> Admissible {
        match self {
            PainleveMap::DP1 { .. }
            | PainleveMap::DP1SexticFreud { .. }
            | PainleveMap::QP1 { .. }
            | PainleveMap::QP1General { .. } => Admissible::Positive,
            PainleveMap::DP2 { .. } => Admissible::OpenUnitInterval,
            PainleveMap::Catalog { .. } => Admissible::Unrestricted,
        }
    }

    /// Next iterate from `history` (oldest first, length [`Self::order`]).
    ///
    /// `n` is the equation index: for second-order maps the history is
    /// `(x_{n-1}, x_n)` and the result is `x_{n+1}`; for the sextic map the
    /// history is `u_{n-2}..u_{n+1}` and the result is `u_{n+2}`.
    pub fn step_with<F: Field>(&self, n: i64, history: &[F]) -> Result<F> {
        if history.len() != self.order() {
            return Err(Error::domain(format!(
                "{} needs {} predecessors, got {}",
                self.tag(),
                self.order(),
                history.len()
            )));
        }
        let h = history;
        match self {
            PainleveMap::DP1 { alpha, beta, gamma, delta } => {
                let (prev, x) = (&h[0], &h[1]);
                let forcing = dp1_forcing(x, n, alpha, beta, gamma)?;
                Ok(forcing.div(x)?.add(&x.embed(delta)?).sub(x).sub(prev))
            }
            PainleveMap::DP1SexticFreud { rho } => {
                let (u2, u1, u, up) = (&h[0], &h[1], &h[2], &h[3]);
                let rhs = sextic_forcing(u, n, rho)?;
                let inner = sextic_partial_sum(u2, u1, u, up);
                rhs.div(&u.int(6).mul(u))?.sub(&inner).div(up)
            }
            PainleveMap::DP2 { alpha, beta, gamma } => {
                let (prev, x) = (&h[0], &h[1]);
                let z = linear_z(x, n, alpha, beta)?;
                let num = x.mul(&z).add(&x.embed(gamma)?);
                Ok(num.div(&x.int(1).sub(&x.square()))?.sub(prev))
            }
            PainleveMap::QP1 { q } => {
                let (prev, y) = (&h[0], &h[1]);
                let qn = y.rational(&q_pow(q, n))?;
                let one = y.int(1);
                let lhs = one.sub(&y.square());
                let denom = qn.mul(&prev.mul(y).add(&one));
                lhs.div(&denom)?.sub(&one).div(y)
            }
            PainleveMap::QP1General { q, c } => {
                let (prev, y) = (&h[0], &h[1]);
                let qn = y.rational(&q_pow(q, n))?;
                let cc = y.rational(c)?;
                let one = y.int(1);
                let lhs = one.sub(y).mul(&one.sub(&cc.mul(y)));
                let denom = qn.mul(&cc.mul(prev).mul(y).sub(&one));
                lhs.div(&denom)?.add(&one).div(&cc.mul(y))
            }
            PainleveMap::Catalog { id, params } => catalog_step(id, params, n, &h[0], &h[1]),
        }
    }

    /// Left minus right side of the equation at index `n`, in
    /// denominator-free form. `window` has length `order + 1`, oldest first.
    pub fn residual_with<F: Field>(&self, n: i64, window: &[F]) -> Result<F> {
        if window.len() != self.order() + 1 {
            return Err(Error::domain(format!(
                "{} residual needs {} consecutive values, got {}",
                self.tag(),
                self.order() + 1,
                window.len()
            )));
        }
        let w = window;
        match self {
            PainleveMap::DP1 { alpha, beta, gamma, delta } => {
                let (prev, x, next) = (&w[0], &w[1], &w[2]);
                let forcing = dp1_forcing(x, n, alpha, beta, gamma)?;
                Ok(x.mul(&next.add(x).add(prev).sub(&x.embed(delta)?)).sub(&forcing))
            }
            PainleveMap::DP1SexticFreud { rho } => {
                let (u2, u1, u, up, upp) = (&w[0], &w[1], &w[2], &w[3], &w[4]);
                let sum = sextic_partial_sum(u2, u1, u, up).add(&up.mul(upp));
                Ok(u.int(6).mul(u).mul(&sum).sub(&sextic_forcing(u, n, rho)?))
            }
            PainleveMap::DP2 { alpha, beta, gamma } => {
                let (prev, x, next) = (&w[0], &w[1], &w[2]);
                let z = linear_z(x, n, alpha, beta)?;
                let lhs = x.int(1).sub(&x.square()).mul(&next.add(prev));
                Ok(lhs.sub(&x.mul(&z).add(&x.embed(gamma)?)))
            }
            PainleveMap::QP1 { q } => {
                let (prev, y, next) = (&w[0], &w[1], &w[2]);
                let qn = y.rational(&q_pow(q, n))?;
                let one = y.int(1);
                let lhs = qn.mul(&next.mul(y).add(&one)).mul(&prev.mul(y).add(&one));
                Ok(lhs.sub(&one.sub(&y.square())))
            }
            PainleveMap::QP1General { q, c } => {
                let (prev, y, next) = (&w[0], &w[1], &w[2]);
                let qn = y.rational(&q_pow(q, n))?;
                let cc = y.rational(c)?;
                let one = y.int(1);
                let rhs = qn.mul(&cc.mul(next).mul(y).sub(&one)).mul(&cc.mul(prev).mul(y).sub(&one));
                Ok(rhs.sub(&one.sub(y).mul(&one.sub(&cc.mul(y)))))
            }
            PainleveMap::Catalog { id, params } => catalog_residual(id, params, n, &w[0], &w[1], &w[2]),
        }
    }

    /// Float step; a vanishing pivot becomes [`Error::Singularity`] at `n`.
    pub fn step(&self, n: i64, history: &[Float]) -> Result<Float> {
        self.step_with(n, history).map_err(|e| singular_at(e, n))
    }

    pub fn residual(&self, n: i64, window: &[Float]) -> Result<Float> {
        self.residual_with(n, window)
    }

    /// Equation index used to produce the value at index `next`.
    pub fn equation_index(&self, next: i64) -> i64 {
        next - (self.order() / 2) as i64
    }
}

impl fmt::Display for PainleveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PainleveMap::DP1 { alpha, beta, gamma, delta } => {
                write!(f, "dp1(alpha={alpha}, beta={beta}, gamma={gamma}, delta={delta})")
            }
            PainleveMap::DP1SexticFreud { rho } => write!(f, "dp1-sextic(rho={rho})"),
            PainleveMap::DP2 { alpha, beta, gamma } => write!(f, "dp2(alpha={alpha}, beta={beta}, gamma={gamma})"),
            PainleveMap::QP1 { q } => write!(f, "qp1(q={q})"),
            PainleveMap::QP1General { q, c } => write!(f, "qp1-gen(q={q}, c={c})"),
            PainleveMap::Catalog { id, params } => write!(f, "{id}({params})"),
        }
    }
}

fn check_q(q: &Rational) -> Result<()> {
    if q.cmp0() == Ordering::Greater && *q < 1 {
        Ok(())
    } else {
        Err(Error::domain("q must lie in (0, 1)"))
    }
}

fn singular_at(e: Error, n: i64) -> Error {
    match e {
        Error::ZeroPivot => Error::Singularity { index: n },
        other => other,
    }
}

fn q_pow(q: &Rational, n: i64) -> Rational {
    let e = i32::try_from(n).expect("index fits in i32");
    Rational::from(q.pow(e))
}

fn alternating(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `z_n = alpha n + beta`.
fn linear_z<F: Field>(ctx: &F, n: i64, alpha: &ExactReal, beta: &ExactReal) -> Result<F> {
    Ok(ctx.embed(alpha)?.mul(&ctx.int(n)).add(&ctx.embed(beta)?))
}

/// `z_n + gamma (-1)^n`.
fn dp1_forcing<F: Field>(ctx: &F, n: i64, alpha: &ExactReal, beta: &ExactReal, gamma: &ExactReal) -> Result<F> {
    Ok(linear_z(ctx, n, alpha, beta)?.add(&ctx.embed(gamma)?.mul(&ctx.int(alternating(n)))))
}

/// `n + rho Delta_n` with `Delta_n = 1` for odd `n`.
fn sextic_forcing<F: Field>(ctx: &F, n: i64, rho: &Rational) -> Result<F> {
    let base = ctx.int(n);
    if n.rem_euclid(2) == 1 {
        Ok(base.add(&ctx.rational(rho)?))
    } else {
        Ok(base)
    }
}

/// The sextic bracket without its last term `u_{n+1} u_{n+2}`.
fn sextic_partial_sum<F: Field>(u2: &F, u1: &F, u: &F, up: &F) -> F {
    let two = u.int(2);
    u2.mul(u1)
        .add(&u1.square())
        .add(&two.mul(u1).mul(u))
        .add(&u1.mul(up))
        .add(&u.square())
        .add(&two.mul(u).mul(up))
        .add(&up.square())
}

/// The map governing a family's recurrence coefficients.
pub fn map_for(family: &WeightFamily) -> Result<PainleveMap> {
    family.validate()?;
    let r = |v: &Rational| ExactReal::rational(v.clone());
    match family {
        WeightFamily::FreudQuartic { rho, lambda } => {
            let half = Rational::from(rho / Rational::from(2));
            Ok(PainleveMap::dp1(ExactReal::int(1), r(&half), r(&Rational::from(-&half)), r(lambda)))
        }
        WeightFamily::FreudSextic { rho } => Ok(PainleveMap::DP1SexticFreud { rho: rho.clone() }),
        WeightFamily::ExpCosCircle { lambda } => {
            let coef = Rational::from(Rational::from(-2) / lambda);
            Ok(PainleveMap::dp2(r(&coef), r(&coef), ExactReal::int(0)))
        }
        WeightFamily::GeneralizedCharlier { a } => {
            let alpha = ExactReal::sqrt(a)?.recip()?;
            Ok(PainleveMap::dp2(alpha, ExactReal::int(0), ExactReal::int(0)))
        }
        WeightFamily::QFreud { q } => PainleveMap::qp1(q.clone()),
        WeightFamily::QFreudGeneral { q, c } => PainleveMap::qp1_general(q.clone(), c.clone()),
        _ => Err(Error::UnsupportedFamily(format!(
            "{} has no nonlinear recurrence; use its closed form",
            family.tag()
        ))),
    }
}

/// Status of one iterate in a [`Trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Ok,
    Diverged,
    Singular,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Ok => "ok",
            Flag::Diverged => "diverged",
            Flag::Singular => "singular",
        })
    }
}

/// Forward iterates of a map at fixed precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub map: PainleveMap,
    pub base_index: i64,
    pub values: Vec<Float>,
    pub precision: Precision,
    /// First index (after the base) outside the admissible set.
    pub divergence_index: Option<i64>,
    /// Index whose value made the next step divide by zero.
    pub singular_index: Option<i64>,
}

impl Trace {
    pub fn last_index(&self) -> i64 {
        self.base_index + self.values.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<&Float> {
        let i = n.checked_sub(self.base_index)?;
        usize::try_from(i).ok().and_then(|i| self.values.get(i))
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len()).map(move |i| self.base_index + i as i64)
    }

    pub fn flag(&self, n: i64) -> Flag {
        if self.singular_index == Some(n) {
            Flag::Singular
        } else if self.divergence_index.is_some_and(|d| n >= d) {
            Flag::Diverged
        } else {
            Flag::Ok
        }
    }

    /// Last index before divergence (or the last index if none).
    pub fn last_valid_index(&self) -> i64 {
        match self.divergence_index {
            Some(d) => (d - 1).min(self.last_index()),
            None => self.last_index(),
        }
    }

    pub fn value(&self, n: i64) -> Option<BigReal> {
        self.get(n).map(|v| BigReal::new(v, self.precision))
    }

    pub fn format_value(&self, n: i64) -> Option<String> {
        self.get(n).map(|v| format_sci(v, self.precision.digits()))
    }
}

/// Iterates `map` from `init` until the value at index `last_index`.
///
/// Iteration continues past divergence and stops at a singularity.
pub fn iterate(map: &PainleveMap, init: &InitialData, last_index: i64, p: Precision) -> Result<Trace> {
    if init.values.is_empty() {
        return Err(Error::domain("initial data is empty"));
    }
    if let PainleveMap::Catalog { id, .. } = map {
        let entry = catalog_entry(id).expect("validated at construction");
        if !entry.iterable {
            return Err(Error::UnsupportedEntry(id.clone()));
        }
    }
    if last_index < init.last_index() {
        return Err(Error::domain("requested length is shorter than the initial data"));
    }
    let bits = p.bits();
    let order = map.order();
    let mut values: Vec<Float> = init.values.iter().map(|v| Float::with_val(bits, v)).collect();
    // a_{-1} = 0 style padding for maps needing more history than given.
    let pad = order.saturating_sub(values.len());
    let mut history: Vec<Float> = std::iter::repeat_with(|| Float::new(bits)).take(pad).collect();
    history.extend(values.iter().cloned());

    let admissible = map.admissible();
    let mut divergence_index = None;
    for (i, v) in values.iter().enumerate().skip(1) {
        if !admissible.contains(v) {
            divergence_index = Some(init.base_index + i as i64);
            break;
        }
    }
    let mut singular_index = None;
    let mut next = init.last_index() + 1;
    while next <= last_index {
        let n = map.equation_index(next);
        let window = &history[history.len() - order..];
        match map.step(n, window) {
            Ok(v) if v.is_finite() => {
                if divergence_index.is_none() && !admissible.contains(&v) {
                    divergence_index = Some(next);
                }
                history.push(v.clone());
                values.push(v);
            }
            Ok(_) | Err(Error::Singularity { .. }) => {
                singular_index = Some(next - 1);
                break;
            }
            Err(e) => return Err(e),
        }
        next += 1;
    }
    Ok(Trace {
        map: map.clone(),
        base_index: init.base_index,
        values,
        precision: p,
        divergence_index,
        singular_index,
    })
}

/// Initial data from the family, then [`iterate`].
pub fn iterate_family(family: &WeightFamily, last_index: i64, p: Precision) -> Result<Trace> {
    let map = map_for(family)?;
    let init = family.initial_data(p)?;
    iterate(&map, &init, last_index, p)
}

/// Recurrence coefficients implied by the iterate at index `n`:
/// `(a_n^2, b_n)` where defined. On the circle the first slot is
/// `1 - alpha_n^2`.
pub fn derived_at(family: &WeightFamily, trace: &Trace, n: i64) -> (Option<Float>, Option<Float>) {
    let bits = trace.precision.bits();
    let Some(v) = trace.get(n) else {
        return (None, None);
    };
    match family {
        WeightFamily::FreudQuartic { .. } if n >= 1 => (Some(Float::with_val(bits, v / 2u32)), Some(Float::new(bits))),
        WeightFamily::FreudSextic { .. } if n >= 1 => (Some(Float::with_val(bits, v)), Some(Float::new(bits))),
        WeightFamily::ExpCosCircle { .. } if n >= 0 => (Some(Float::with_val(bits, 1 - Float::with_val(bits, v.square_ref()))), None),
        WeightFamily::GeneralizedCharlier { a } => {
            let af = trace.precision.float(a);
            let a2 = (n >= 1).then(|| Float::with_val(bits, 1 - Float::with_val(bits, v.square_ref())) * &af);
            let b = trace.get(n + 1).map(|next| {
                let root = Float::with_val(bits, af.sqrt_ref());
                Float::with_val(bits, v * next) * root + n
            });
            (a2, b)
        }
        WeightFamily::QFreud { q } | WeightFamily::QFreudGeneral { q, .. } if n >= 1 => {
            let scale = trace.precision.float(&q_pow(q, n - 1));
            (Some(Float::with_val(bits, v * scale)), Some(Float::new(bits)))
        }
        _ => (None, None),
    }
}

/// Recurrence (or Verblunsky) coefficients from a whole trace.
///
/// Fails with [`Error::Reconstruction`] at the first index where the
/// implied `a_n^2` is not positive.
pub fn reconstruct_coeffs(family: &WeightFamily, trace: &Trace) -> Result<Coefficients> {
    reconstruct_upto(family, trace, trace.last_index())
}

/// As [`reconstruct_coeffs`], but only through the last index before
/// divergence.
pub fn reconstruct_valid(family: &WeightFamily, trace: &Trace) -> Result<Coefficients> {
    reconstruct_upto(family, trace, trace.last_valid_index())
}

fn reconstruct_upto(family: &WeightFamily, trace: &Trace, last: i64) -> Result<Coefficients> {
    let p = trace.precision;
    if let WeightFamily::ExpCosCircle { .. } = family {
        let mut alpha = Vec::new();
        let mut kappa_ratio = Vec::new();
        for n in 0..=last {
            let v = trace.get(n).ok_or_else(|| Error::domain("trace does not start at alpha_{-1}"))?;
            if !Admissible::OpenUnitInterval.contains(v) {
                return Err(Error::Reconstruction {
                    index: n,
                    reason: format!("|alpha_n| = {} is not below 1", format_sci(v, 10)),
                });
            }
            alpha.push(v.clone());
            kappa_ratio.push(derived_at(family, trace, n).0.expect("in range"));
        }
        return Ok(Coefficients::Circle(VerblunskyCoeffs {
            alpha,
            kappa_ratio,
            precision: p,
        }));
    }
    map_for(family)?;
    let mut a_sq = vec![p.zero()];
    let mut b = Vec::new();
    for n in 0..=last {
        let (a2, bn) = derived_at(family, trace, n);
        if n >= 1 {
            let a2 = a2.ok_or_else(|| Error::domain("trace is missing an index"))?;
            if a2.cmp0() != Some(Ordering::Greater) {
                return Err(Error::Reconstruction {
                    index: n,
                    reason: format!("a_n^2 = {} is not positive", format_sci(&a2, 10)),
                });
            }
            a_sq.push(a2);
        }
        match (n, bn) {
            (_, Some(v)) if n < last || !matches!(family, WeightFamily::GeneralizedCharlier { .. }) => b.push(v),
            (0, None) => b.push(p.zero()),
            _ => {}
        }
    }
    if family.is_symmetric() && b.len() < a_sq.len() {
        b.resize(a_sq.len(), p.zero());
    }
    Ok(Coefficients::Line(RecurrenceCoeffs::new(a_sq, b, p)?))
}

/// `q^(n-1) (1 - q^n) / (1 - q^4)`, the forcing of the rescaled q-P_I
/// equation; tends to `n / 4` as `q -> 1`.
pub fn scaled_qp1_forcing(q: &Rational, n: u32, p: Precision) -> Result<BigReal> {
    check_q(q)?;
    let g = p.guarded();
    let qf = g.float(q);
    let qn = Float::with_val(g.bits(), (&qf).pow(n));
    let qn1 = Float::with_val(g.bits(), (&qf).pow(n as i32 - 1));
    let q4 = Float::with_val(g.bits(), (&qf).pow(4u32));
    let v = qn1 * (1 - qn) / (1 - q4);
    Ok(BigReal::new(&v, p))
}

/// Constants shared by the catalog equations. `lambda_n = lambda0 q^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub delta: Rational,
    pub kappa: Rational,
    pub mu: Rational,
    pub lambda0: Rational,
    pub q: Rational,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            alpha: Rational::new(),
            beta: Rational::new(),
            gamma: Rational::new(),
            delta: Rational::new(),
            kappa: Rational::new(),
            mu: Rational::new(),
            lambda0: Rational::from(1),
            q: Rational::from((1, 2)),
        }
    }
}

impl CatalogParams {
    pub const NAMES: [&'static str; 8] = ["alpha", "beta", "gamma", "delta", "kappa", "mu", "lambda0", "q"];

    pub fn set(&mut self, name: &str, value: Rational) -> Result<()> {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "delta" => &mut self.delta,
            "kappa" => &mut self.kappa,
            "mu" => &mut self.mu,
            "lambda0" => &mut self.lambda0,
            "q" => &mut self.q,
            _ => return Err(Error::Parse(format!("unknown catalog parameter `{name}`"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        Some(match name {
            "alpha" => &self.alpha,
            "beta" => &self.beta,
            "gamma" => &self.gamma,
            "delta" => &self.delta,
            "kappa" => &self.kappa,
            "mu" => &self.mu,
            "lambda0" => &self.lambda0,
            "q" => &self.q,
            _ => return None,
        })
    }

    fn lambda(&self, n: i64) -> Rational {
        Rational::from(&self.lambda0 * q_pow(&self.q, n))
    }

    fn z(&self, n: i64) -> Rational {
        Rational::from(&self.alpha * Rational::from(n)) + &self.beta
    }
}

impl fmt::Display for CatalogParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Self::NAMES
            .iter()
            .map(|k| format!("{k}={}", self.get(k).expect("known name")))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogGroup {
    Discrete,
    QDiscrete,
    Asymmetric,
    Alternative,
    Coupled,
}

impl CatalogGroup {
    fn is_q(self) -> bool {
        self == CatalogGroup::QDiscrete
    }

    pub fn label(self) -> &'static str {
        match self {
            CatalogGroup::Discrete => "discrete",
            CatalogGroup::QDiscrete => "q-discrete",
            CatalogGroup::Asymmetric => "asymmetric",
            CatalogGroup::Alternative => "alternative",
            CatalogGroup::Coupled => "coupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub name: &'static str,
    pub group: CatalogGroup,
    pub equation: &'static str,
    pub params: &'static [&'static str],
    pub iterable: bool,
}

const fn entry(
    id: &'static str,
    name: &'static str,
    group: CatalogGroup,
    equation: &'static str,
    params: &'static [&'static str],
    iterable: bool,
) -> CatalogEntry {
    CatalogEntry { id, name, group, equation, params, iterable }
}

use CatalogGroup::{Alternative, Asymmetric, Coupled, Discrete, QDiscrete};

const Z_PARAMS: &[&str] = &["alpha", "beta", "gamma"];
const Q_PARAMS: &[&str] = &["alpha", "beta", "gamma", "delta", "lambda0", "q"];

static CATALOG: &[CatalogEntry] = &[
    entry("dp1", "d-P_I", Discrete, "x[n+1] + x[n] + x[n-1] = (z[n] + gamma (-1)^n) / x[n] + delta", &["alpha", "beta", "gamma", "delta"], true),
    entry("dp2", "d-P_II", Discrete, "x[n+1] + x[n-1] = (x[n] z[n] + gamma) / (1 - x[n]^2)", Z_PARAMS, true),
    entry("dp4", "d-P_IV", Discrete, "(x[n+1] + x[n])(x[n] + x[n-1]) = (x[n]^2 - kappa^2)(x[n]^2 - mu^2) / ((x[n] + z[n])^2 - gamma^2)", &["alpha", "beta", "gamma", "kappa", "mu"], true),
    entry("dp5", "d-P_V", Discrete, "(x[n+1] + x[n] - z[n+1] - z[n])(x[n] + x[n-1] - z[n] - z[n-1]) / ((x[n+1] + x[n])(x[n] + x[n-1])) = ((x[n] - z[n])^2 - alpha^2)((x[n] - z[n])^2 - beta^2) / ((x[n] - gamma^2)(x[n] - delta^2))", &["alpha", "beta", "gamma", "delta"], true),
    entry("qp2", "q-P_II", QDiscrete, "(x[n+1] x[n] - 1)(x[n] x[n-1] - 1) = lambda[n] lambda[n-1] x[n] / (alpha^2 (x[n] - alpha lambda[n]))", &["alpha", "lambda0", "q"], true),
    entry("qp2-alt", "q-P_II'", QDiscrete, "x[n+1] x[n-1] = alpha lambda[n] (lambda[n] + x[n]) / (x[n] (x[n] - 1))", &["alpha", "lambda0", "q"], true),
    entry("qp3", "q-P_III", QDiscrete, "x[n+1] x[n-1] = (x[n] + alpha)(x[n] + beta) / ((gamma lambda[n] x[n] + 1)(delta lambda[n] x[n] + 1))", Q_PARAMS, true),
    entry("qp4", "q-P_IV", QDiscrete, "(x[n+1] x[n] - 1)(x[n] x[n-1] - 1) = gamma delta (x[n] + alpha)(x[n] + 1/alpha)(x[n] + beta)(x[n] + 1/beta) / ((gamma lambda[n] x[n] + 1)(delta lambda[n] x[n] + 1))", Q_PARAMS, true),
    entry("qp5", "q-P_V", QDiscrete, "(x[n+1] x[n] - 1)(x[n] x[n-1] - 1) = gamma delta lambda[n]^2 (x[n] - alpha)(x[n] - 1/alpha)(x[n] - beta)(x[n] - 1/beta) / ((x[n] - gamma lambda[n])(x[n] - delta lambda[n]))", Q_PARAMS, true),
    entry("qp6", "q-P_VI", QDiscrete, "(x[n] x[n+1] - lambda[n] lambda[n+1])(x[n] x[n-1] - lambda[n] lambda[n-1]) / ((x[n] x[n+1] - 1)(x[n] x[n-1] - 1)) = (x[n] - alpha lambda[n])(x[n] - lambda[n]/alpha)(x[n] - beta lambda[n])(x[n] - lambda[n]/beta) / ((x[n] - gamma)(x[n] - 1/gamma)(x[n] - delta)(x[n] - 1/delta))", Q_PARAMS, true),
    entry("asym-dp1", "alpha-d-P_I", Asymmetric, "x[n+1] + x[n] + y[n] = delta + (z[n] - gamma)/y[n]; y[n] + y[n-1] + x[n] = delta + (z[n+1/2] + gamma)/x[n]", &["alpha", "beta", "gamma", "delta"], false),
    entry("asym-dp2", "alpha-d-P_II", Asymmetric, "x[n+1] + x[n] = 2 (y[n] z[n] + gamma)/(1 - y[n]^2); y[n] + y[n-1] = 2 (x[n] z[n+1/2] - delta)/(1 - x[n]^2)", &["alpha", "beta", "gamma", "delta"], false),
    entry("asym-dp3", "alpha-d-P_III", Asymmetric, "x[n+1] x[n] = (y[n] - q^n a)(y[n] - q^n b)/((y[n] - c)(y[n] - d)); y[n] y[n-1] = (x[n] - q^n alpha)(x[n] - q^n beta)/((x[n] - gamma)(x[n] - delta)), alpha beta/(gamma delta) = q ab/(cd)", &["a", "b", "c", "d", "alpha", "beta", "gamma", "delta", "q"], false),
    entry("asym-dp4", "alpha-d-P_IV", Asymmetric, "(y[n] + x[n])(x[n+1] + y[n]) = (y[n] - a)(y[n] - b)(y[n] - c)(y[n] - d)/((y[n] + gamma - z[n])(y[n] - gamma - z[n])); (y[n] + x[n])(x[n] + y[n-1]) = (x[n] + a)(x[n] + b)(x[n] + c)(x[n] + d)/((x[n] + delta - z[n+1/2])(x[n] - delta - z[n+1/2])), a + b + c + d = 0", &["a", "b", "c", "d", "alpha", "beta", "gamma", "delta"], false),
    entry("asym-dp5", "alpha-d-P_V", Asymmetric, "coupled d-P_V in (x[n], y[n]) with constants a, b, c, d, p, q, r, s", &["a", "b", "c", "d", "p", "q", "r", "s", "alpha", "beta"], false),
    entry("asym-qp5", "alpha-q-P_V", Asymmetric, "(x[n] y[n] - 1)(x[n-1] y[n] - 1) = q^(2n) (y[n] - a)(y[n] - b)(y[n] - c)(y[n] - d)/((q^n - kappa y[n])(q^n - y[n]/kappa)); (x[n] y[n] - 1)(x[n] y[n+1] - 1) = q^(2n+1) (x[n] - 1/a)(x[n] - 1/b)(x[n] - 1/c)(x[n] - 1/d)/((q^(n+1/2) - mu y[n])(q^(n+1/2) - y[n]/mu))", &["a", "b", "c", "d", "kappa", "mu", "q"], false),
    entry("asym-dp6", "alpha-d-P_VI", Asymmetric, "x[n] x[n+1] = beta3 beta4 (y[n] - q^n alpha1)(y[n] - q^n alpha2)/((y[n] - alpha3)(y[n] - alpha4)); y[n] y[n-1] = alpha3 alpha4 (x[n] - q^n beta1)(x[n] - q^n beta2)/((x[n] - beta3)(x[n] - beta4))", &["alpha1", "alpha2", "alpha3", "alpha4", "beta1", "beta2", "beta3", "beta4", "q"], false),
    entry("alt-dp1", "a-d-P_I", Alternative, "x[n+1] + x[n] + x[n-1] = (z[n] + gamma (-1)^n)/x[n] + mu", &["alpha", "beta", "gamma", "mu"], false),
    entry("alt-dp1b", "a-d-P_I", Alternative, "z[n]/(x[n+1] + x[n]) + z[n-1]/(x[n] + x[n-1]) = -x[n]^2 + gamma", Z_PARAMS, false),
    entry("alt-dp1c", "a-d-P_I", Alternative, "x[n+1] + x[n-1] = z[n]/x[n] + gamma/x[n]^2", Z_PARAMS, false),
    entry("alt-dp1d", "a-d-P_I", Alternative, "x[n+1] + x[n-1] = z[n]/x[n] + gamma", Z_PARAMS, false),
    entry("alt-dp1e", "a-d-P_I", Alternative, "x[n+1] x[n-1] = exp(z[n])/x[n] + gamma/x[n]^2", Z_PARAMS, false),
    entry("alt-dp2", "a-d-P_II", Alternative, "x[n+1] + x[n-1] = (x[n] z[n] + gamma)/(1 - x[n]^2)", Z_PARAMS, false),
    entry("alt-dp2b", "a-d-P_II", Alternative, "z[n]/(x[n+1] x[n] + 1) + z[n-1]/(x[n] x[n-1] + 1) = -x[n] + 1/x[n] + z[n] + gamma", Z_PARAMS, false),
    entry("alt-dp5", "a-d-P_V", Alternative, "(x[n+1] + x[n] - 2 z[n+1])(x[n] + x[n-1] - 2 z[n]) / ((x[n+1] + x[n])(x[n] + x[n-1])) = ((x[n] - z[n+1/2])^2 - kappa^2)/(x[n] - gamma)^2", &["alpha", "beta", "gamma", "kappa"], false),
    entry("alt-dp5b", "a-d-P_V", Alternative, "z[n+1/2]/(1 - x[n] x[n+1]) + z[n-1/2]/(1 - x[n] x[n-1]) = mu + z[n] + kappa x[n]/(1 + x[n])^2 + (1 - x[n])/(1 + x[n]) (z[n]/2 + (-1)^n gamma)", &["alpha", "beta", "gamma", "kappa", "mu"], false),
    entry("sys-dp1", "d-P_I (system)", Coupled, "x[n+1] + x[n] = (y[n] z[n] + gamma)/y[n]^2; y[n] + y[n-1] = (x[n] z[n+1/2] + delta)/x[n]^2", &["alpha", "beta", "gamma", "delta"], false),
    entry("sys-dp2", "d-P_II (system)", Coupled, "x[n+1] + x[n] = (y[n] z[n] + gamma)/(y[n]^2 - mu^2); y[n] + y[n-1] = (x[n] z[n+1/2] + delta)/(x[n]^2 - mu^2)", &["alpha", "beta", "gamma", "delta", "mu"], false),
    entry("sys-dp4", "d-P_IV (system)", Coupled, "x[n] x[n-1] = (y[n] + z[n] - a)(y[n] + z[n] - b)/(y[n]^2 - gamma^2); y[n] + y[n+1] = -(z[n+1/2] + c)/(x[n] gamma + 1) - (z[n+1/2] + d)/(x[n]/gamma + 1), a + b + c + d = 0", &["a", "b", "c", "d", "alpha", "beta", "gamma"], false),
    entry("sys-dp4b", "d-P_IV (system)", Coupled, "x[n] x[n-1] = a (y[n] + z[n] - b)/(y[n]^2 - gamma^2); y[n] + y[n+1] = c/x[n] + (z[n+1/2] + d)/(x[n] - 1)", &["a", "b", "c", "d", "alpha", "beta", "gamma"], false),
    entry("sys-dp5", "d-P_V (system)", Coupled, "x[n] + x[n-1] = (z[n] + mu)/(1 + y[n]/t) + (z[n] - mu)/(1 + t y[n]); y[n] y[n+1] = ((x[n] - z[n+1/2])^2 - kappa^2)/(x[n]^2 - gamma^2)", &["alpha", "beta", "gamma", "kappa", "mu", "t"], false),
    entry("sys-dp5b", "d-P_V (system)", Coupled, "x[n] + x[n-1] = gamma/(1 + y[n]) + (z[n] + delta)/(1 - y[n]); y[n] y[n+1] = gamma (x[n] - z[n])/(x[n]^2 - mu^2)", &["alpha", "beta", "gamma", "delta", "mu"], false),
];

/// All catalog equations, iterable ones first.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn catalog_entry(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

/// Right-hand side `(num, den)` of the q-P_IV/q-P_V/q-P_II-type equations,
/// whose left side is `(x[n+1] x[n] - 1)(x[n] x[n-1] - 1)`.
fn q_product_rhs<F: Field>(id: &str, p: &CatalogParams, n: i64, x: &F) -> Result<(F, F)> {
    let r = |v: &Rational| x.rational(v);
    let lam = r(&p.lambda(n))?;
    let one = x.int(1);
    match id {
        "qp2" => {
            let a = r(&p.alpha)?;
            let num = lam.mul(&r(&p.lambda(n - 1))?).mul(x);
            let den = a.square().mul(&x.sub(&a.mul(&lam)));
            Ok((num, den))
        }
        "qp4" => {
            let (a, b, g, d) = (r(&p.alpha)?, r(&p.beta)?, r(&p.gamma)?, r(&p.delta)?);
            let num = g
                .mul(&d)
                .mul(&x.add(&a))
                .mul(&x.add(&a.recip()?))
                .mul(&x.add(&b))
                .mul(&x.add(&b.recip()?));
            let den = g.mul(&lam).mul(x).add(&one).mul(&d.mul(&lam).mul(x).add(&one));
            Ok((num, den))
        }
        "qp5" => {
            let (a, b, g, d) = (r(&p.alpha)?, r(&p.beta)?, r(&p.gamma)?, r(&p.delta)?);
            let num = g
                .mul(&d)
                .mul(&lam.square())
                .mul(&x.sub(&a))
                .mul(&x.sub(&a.recip()?))
                .mul(&x.sub(&b))
                .mul(&x.sub(&b.recip()?));
            let den = x.sub(&g.mul(&lam)).mul(&x.sub(&d.mul(&lam)));
            Ok((num, den))
        }
        _ => unreachable!("not a product-form q equation"),
    }
}

/// `(num, den)` of the d-P_IV right side.
fn dp4_rhs<F: Field>(p: &CatalogParams, n: i64, x: &F) -> Result<(F, F)> {
    let r = |v: &Rational| x.rational(v);
    let (k, m, g) = (r(&p.kappa)?, r(&p.mu)?, r(&p.gamma)?);
    let num = x.square().sub(&k.square()).mul(&x.square().sub(&m.square()));
    let den = x.add(&r(&p.z(n))?).square().sub(&g.square());
    Ok((num, den))
}

/// `(num, den)` of the d-P_V right side.
fn dp5_rhs<F: Field>(p: &CatalogParams, n: i64, x: &F) -> Result<(F, F)> {
    let r = |v: &Rational| x.rational(v);
    let (a, b, g, d) = (r(&p.alpha)?, r(&p.beta)?, r(&p.gamma)?, r(&p.delta)?);
    let shifted = x.sub(&r(&p.z(n))?).square();
    let num = shifted.sub(&a.square()).mul(&shifted.sub(&b.square()));
    let den = x.sub(&g.square()).mul(&x.sub(&d.square()));
    Ok((num, den))
}

/// `(num, den)` of the q-P_VI right side.
fn qp6_rhs<F: Field>(p: &CatalogParams, n: i64, x: &F) -> Result<(F, F)> {
    let r = |v: &Rational| x.rational(v);
    let (a, b, g, d) = (r(&p.alpha)?, r(&p.beta)?, r(&p.gamma)?, r(&p.delta)?);
    let lam = r(&p.lambda(n))?;
    let num = x
        .sub(&a.mul(&lam))
        .mul(&x.sub(&lam.div(&a)?))
        .mul(&x.sub(&b.mul(&lam)))
        .mul(&x.sub(&lam.div(&b)?));
    let den = x
        .sub(&g)
        .mul(&x.sub(&g.recip()?))
        .mul(&x.sub(&d))
        .mul(&x.sub(&d.recip()?));
    Ok((num, den))
}

fn as_exact(p: &CatalogParams) -> [ExactReal; 4] {
    [&p.alpha, &p.beta, &p.gamma, &p.delta].map(|v| ExactReal::rational(v.clone()))
}

fn catalog_step<F: Field>(id: &str, p: &CatalogParams, n: i64, prev: &F, x: &F) -> Result<F> {
    let r = |v: &Rational| x.rational(v);
    let one = x.int(1);
    match id {
        "dp1" => {
            let [a, b, g, d] = as_exact(p);
            PainleveMap::dp1(a, b, g, d).step_with(n, &[prev.clone(), x.clone()])
        }
        "dp2" => {
            let [a, b, g, _] = as_exact(p);
            PainleveMap::dp2(a, b, g).step_with(n, &[prev.clone(), x.clone()])
        }
        "dp4" => {
            let (num, den) = dp4_rhs(p, n, x)?;
            Ok(num.div(&den)?.div(&x.add(prev))?.sub(x))
        }
        "dp5" => {
            let s = r(&Rational::from(p.z(n + 1) + p.z(n)))?;
            let t = r(&Rational::from(p.z(n) + p.z(n - 1)))?;
            let (num, den) = dp5_rhs(p, n, x)?;
            let rhs = num.div(&den)?;
            let bsum = x.add(prev);
            let bt = bsum.sub(&t);
            let sum = s.mul(&bt).div(&bt.sub(&rhs.mul(&bsum)))?;
            Ok(sum.sub(x))
        }
        "qp2" | "qp4" | "qp5" => {
            let (num, den) = q_product_rhs(id, p, n, x)?;
            let rhs = num.div(&den)?;
            rhs.div(&x.mul(prev).sub(&one))?.add(&one).div(x)
        }
        "qp2-alt" => {
            let lam = r(&p.lambda(n))?;
            let num = r(&p.alpha)?.mul(&lam).mul(&lam.add(x));
            num.div(&x.mul(&x.sub(&one)).mul(prev))
        }
        "qp3" => {
            let lam = r(&p.lambda(n))?;
            let num = x.add(&r(&p.alpha)?).mul(&x.add(&r(&p.beta)?));
            let den = r(&p.gamma)?
                .mul(&lam)
                .mul(x)
                .add(&one)
                .mul(&r(&p.delta)?.mul(&lam).mul(x).add(&one));
            num.div(&den.mul(prev))
        }
        "qp6" => {
            let lam = p.lambda(n);
            let l_next = r(&Rational::from(&lam * p.lambda(n + 1)))?;
            let l_prev = r(&Rational::from(&lam * p.lambda(n - 1)))?;
            let (num, den) = qp6_rhs(p, n, x)?;
            let rhs = num.div(&den)?;
            let pp = x.mul(prev).sub(&l_prev);
            let qq = x.mul(prev).sub(&one);
            let u = l_next.mul(&pp).sub(&rhs.mul(&qq)).div(&pp.sub(&rhs.mul(&qq)))?;
            u.div(x)
        }
        _ => Err(Error::UnsupportedEntry(id.to_string())),
    }
}

fn catalog_residual<F: Field>(id: &str, p: &CatalogParams, n: i64, prev: &F, x: &F, next: &F) -> Result<F> {
    let r = |v: &Rational| x.rational(v);
    let one = x.int(1);
    match id {
        "dp1" => {
            let [a, b, g, d] = as_exact(p);
            PainleveMap::dp1(a, b, g, d).residual_with(n, &[prev.clone(), x.clone(), next.clone()])
        }
        "dp2" => {
            let [a, b, g, _] = as_exact(p);
            PainleveMap::dp2(a, b, g).residual_with(n, &[prev.clone(), x.clone(), next.clone()])
        }
        "dp4" => {
            let (num, den) = dp4_rhs(p, n, x)?;
            Ok(next.add(x).mul(&x.add(prev)).mul(&den).sub(&num))
        }
        "dp5" => {
            let zs = |k: i64, m: i64| r(&Rational::from(p.z(k) + p.z(m)));
            let (num, den) = dp5_rhs(p, n, x)?;
            let a = next.add(x);
            let b = x.add(prev);
            let lhs = a.sub(&zs(n + 1, n)?).mul(&b.sub(&zs(n, n - 1)?)).mul(&den);
            Ok(lhs.sub(&a.mul(&b).mul(&num)))
        }
        "qp2" | "qp4" | "qp5" => {
            let (num, den) = q_product_rhs(id, p, n, x)?;
            Ok(next.mul(x).sub(&one).mul(&x.mul(prev).sub(&one)).mul(&den).sub(&num))
        }
        "qp2-alt" => {
            let lam = r(&p.lambda(n))?;
            let lhs = next.mul(prev).mul(x).mul(&x.sub(&one));
            Ok(lhs.sub(&r(&p.alpha)?.mul(&lam).mul(&lam.add(x))))
        }
        "qp3" => {
            let lam = r(&p.lambda(n))?;
            let den = r(&p.gamma)?
                .mul(&lam)
                .mul(x)
                .add(&one)
                .mul(&r(&p.delta)?.mul(&lam).mul(x).add(&one));
            let num = x.add(&r(&p.alpha)?).mul(&x.add(&r(&p.beta)?));
            Ok(next.mul(prev).mul(&den).sub(&num))
        }
        "qp6" => {
            let lam = p.lambda(n);
            let l_next = r(&Rational::from(&lam * p.lambda(n + 1)))?;
            let l_prev = r(&Rational::from(&lam * p.lambda(n - 1)))?;
            let (num, den) = qp6_rhs(p, n, x)?;
            let lhs = x.mul(next).sub(&l_next).mul(&x.mul(prev).sub(&l_prev)).mul(&den);
            let rhs = x.mul(next).sub(&one).mul(&x.mul(prev).sub(&one)).mul(&num);
            Ok(lhs.sub(&rhs))
        }
        _ => Err(Error::UnsupportedEntry(id.to_string())),
    }
}
