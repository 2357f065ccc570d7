//! Recurrence coefficients straight from moments, with no use of the
//! nonlinear recurrences, plus the checks that compare the two.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::dpainleve::{derived_at, Trace};
use crate::error::{Error, Result};
use crate::mpnum::{adaptive_eval_with, format_sci, AdaptiveConfig, Precision};
use crate::weights::{Coefficients, RecurrenceCoeffs, Support, VerblunskyCoeffs, WeightFamily};

/// Bits of the magnitude bounds carried alongside the recursion.
const BOUND_BITS: u32 = 64;

fn exhausted(what: &str, k: usize) -> Error {
    Error::PrecisionExhausted(format!("{what} at k = {k} lost all significant digits"))
}

/// Whether a quantity with magnitude bound `bound` has kept at least 10 of
/// the `p` working digits.
fn well_conditioned(value: &Float, bound: &Float, p: Precision) -> bool {
    if value.is_zero() {
        return bound.is_zero();
    }
    let lost = Float::with_val(BOUND_BITS, bound / Float::with_val(BOUND_BITS, value.abs_ref()));
    let lost_digits = lost.log10().to_f64();
    lost_digits < f64::from(p.digits()) - 10.0
}

/// Three-term recurrence coefficients from ordinary moments `mu_0..mu_{M-1}`
/// by the Chebyshev algorithm (an O(M^2) recursion on the inner products
/// `sigma_{k,l} = <pi_k, x^l>`).
///
/// Returns `a_n^2` for `n <= (M-1)/2` and `b_n` for `n <= (M-2)/2`.
pub fn coeffs_from_moments(moments: &[Float], p: Precision) -> Result<RecurrenceCoeffs> {
    let m = moments.len();
    if m < 2 {
        return Err(Error::domain("need at least two moments"));
    }
    let bits = p.bits();
    if moments[0].cmp0() != Some(Ordering::Greater) {
        return Err(Error::domain("mu_0 must be positive"));
    }
    // a_n^2 and b_n are invariant under scaling all moments.
    let mu0 = Float::with_val(bits, &moments[0]);
    let mu: Vec<Float> = moments.iter().map(|v| Float::with_val(bits, v / &mu0)).collect();
    let bound0: Vec<Float> = mu.iter().map(|v| Float::with_val(BOUND_BITS, v.abs_ref())).collect();

    let n_a = (m - 1) / 2;
    let n_b = (m - 2) / 2;
    let mut a_sq = vec![p.zero()];
    let mut b = Vec::with_capacity(n_b + 1);

    // rows k-2 and k-1 of sigma, indexed by l; row -1 is all zeros.
    let mut older: Vec<Float> = vec![Float::new(bits); m];
    let mut older_bound: Vec<Float> = vec![Float::new(BOUND_BITS); m];
    let mut row = mu;
    let mut row_bound = bound0;
    let mut alpha_prev = Float::with_val(bits, &row[1] / &row[0]);
    let mut beta_prev = Float::with_val(bits, &row[0]);
    b.push(alpha_prev.clone());

    for k in 1..=n_a {
        let mut next = vec![Float::new(bits); m];
        let mut next_bound = vec![Float::new(BOUND_BITS); m];
        let ab = Float::with_val(BOUND_BITS, alpha_prev.abs_ref());
        let bb = Float::with_val(BOUND_BITS, beta_prev.abs_ref());
        for l in k..(m - k) {
            let mut v = Float::with_val(bits, &row[l + 1]);
            v -= Float::with_val(bits, &alpha_prev * &row[l]);
            v -= Float::with_val(bits, &beta_prev * &older[l]);
            next[l] = v;
            let mut bound = Float::with_val(BOUND_BITS, &row_bound[l + 1]);
            bound += Float::with_val(BOUND_BITS, &ab * &row_bound[l]);
            bound += Float::with_val(BOUND_BITS, &bb * &older_bound[l]);
            next_bound[l] = bound;
        }
        let pivot = &next[k];
        if pivot.cmp0() != Some(Ordering::Greater) || !well_conditioned(pivot, &next_bound[k], p) {
            return Err(exhausted("Hankel pivot", k));
        }
        let beta = Float::with_val(bits, pivot / &row[k - 1]);
        a_sq.push(beta.clone());
        if k <= n_b {
            let alpha = Float::with_val(bits, &next[k + 1] / pivot) - Float::with_val(bits, &row[k] / &row[k - 1]);
            b.push(alpha.clone());
            alpha_prev = alpha;
        }
        beta_prev = beta;
        older = std::mem::replace(&mut row, next);
        older_bound = std::mem::replace(&mut row_bound, next_bound);
    }
    RecurrenceCoeffs::new(a_sq, b, p)
}

/// Determinant of the `order x order` Hankel matrix `[mu_{i+j+shift}]`.
pub fn hankel_determinant(moments: &[Float], order: usize, p: Precision) -> Result<Float> {
    hankel_like_determinant(moments, order, p, |i, j| i + j)
}

fn hankel_like_determinant(moments: &[Float], order: usize, p: Precision, index: impl Fn(usize, usize) -> usize) -> Result<Float> {
    let bits = p.guarded().bits();
    if order == 0 {
        return Ok(Float::with_val(bits, 1));
    }
    let mut mat: Vec<Vec<Float>> = Vec::with_capacity(order);
    for i in 0..order {
        let mut r = Vec::with_capacity(order);
        for j in 0..order {
            let v = moments
                .get(index(i, j))
                .ok_or_else(|| Error::domain("not enough moments for the Hankel determinant"))?;
            r.push(Float::with_val(bits, v));
        }
        mat.push(r);
    }
    let mut det = Float::with_val(bits, 1);
    for col in 0..order {
        let pivot_row = (col..order)
            .max_by(|&x, &y| {
                let ax = Float::with_val(bits, mat[x][col].abs_ref());
                let ay = Float::with_val(bits, mat[y][col].abs_ref());
                ax.partial_cmp(&ay).unwrap_or(Ordering::Equal)
            })
            .expect("nonempty range");
        if mat[pivot_row][col].is_zero() {
            return Ok(Float::new(bits));
        }
        if pivot_row != col {
            mat.swap(pivot_row, col);
            det = -det;
        }
        let pivot = mat[col][col].clone();
        det *= &pivot;
        for r in (col + 1)..order {
            let factor = Float::with_val(bits, &mat[r][col] / &pivot);
            if factor.is_zero() {
                continue;
            }
            for c in col..order {
                let delta = Float::with_val(bits, &factor * &mat[col][c]);
                mat[r][c] -= delta;
            }
        }
    }
    Ok(Float::with_val(p.bits(), det))
}

/// Slow path: `a_n^2 = D_{n+1} D_{n-1} / D_n^2` and
/// `b_n = E_{n+1}/D_{n+1} - E_n/D_n`, where `E_n` replaces the last column
/// of the Hankel matrix by the next moments. Only for small `n_max`.
pub fn coeffs_from_hankel(moments: &[Float], n_max: usize, p: Precision) -> Result<RecurrenceCoeffs> {
    if n_max > 12 {
        return Err(Error::domain("the determinant path is limited to n <= 12"));
    }
    let g = p.guarded();
    let d: Vec<Float> = (0..=n_max + 1)
        .map(|k| hankel_determinant(moments, k, g))
        .collect::<Result<_>>()?;
    let e: Vec<Float> = (0..=n_max + 1)
        .map(|k| {
            if k == 0 {
                Ok(g.zero())
            } else {
                hankel_like_determinant(moments, k, g, |i, j| if j + 1 == k { i + j + 1 } else { i + j })
            }
        })
        .collect::<Result<_>>()?;
    let bits = g.bits();
    let mut a_sq = vec![p.zero()];
    let mut b = Vec::new();
    for n in 0..=n_max {
        if d[n + 1].cmp0() != Some(Ordering::Greater) {
            return Err(exhausted("Hankel determinant", n + 1));
        }
        if n >= 1 {
            let v = Float::with_val(bits, &d[n + 1] * &d[n - 1]) / Float::with_val(bits, d[n].square_ref());
            a_sq.push(Float::with_val(p.bits(), v));
        }
        let term = Float::with_val(bits, &e[n + 1] / &d[n + 1]);
        let prev = if n == 0 { g.zero() } else { Float::with_val(bits, &e[n] / &d[n]) };
        b.push(Float::with_val(p.bits(), term - prev));
    }
    RecurrenceCoeffs::new(a_sq, b, p)
}

/// Verblunsky coefficients `alpha_0..alpha_{N-1}` of a real symmetric
/// Toeplitz moment sequence `c_0..c_N` by the Szegő (Levinson) recursion.
pub fn verblunsky_from_toeplitz(c: &[Float], p: Precision) -> Result<VerblunskyCoeffs> {
    if c.is_empty() || c[0].cmp0() != Some(Ordering::Greater) {
        return Err(Error::domain("c_0 must be positive"));
    }
    let bits = p.bits();
    let n_total = c.len() - 1;
    let mut phi: Vec<Float> = vec![Float::with_val(bits, 1)]; // monic Phi_n, ascending powers
    let mut h = Float::with_val(bits, &c[0]);
    let mut alpha = Vec::with_capacity(n_total);
    let mut kappa_ratio = Vec::with_capacity(n_total);
    for n in 0..n_total {
        let mut num = Float::new(bits);
        let mut bound = Float::new(BOUND_BITS);
        for (j, coef) in phi.iter().enumerate() {
            let t = Float::with_val(bits, coef * &c[j + 1]);
            bound += Float::with_val(BOUND_BITS, t.abs_ref());
            num += t;
        }
        if !well_conditioned(&num, &bound, p) && !bound.is_zero() {
            return Err(exhausted("Toeplitz reflection coefficient", n));
        }
        let a = Float::with_val(bits, &num / &h);
        let one_minus = Float::with_val(bits, 1 - Float::with_val(bits, a.square_ref()));
        if one_minus.cmp0() != Some(Ordering::Greater) {
            return Err(exhausted("|alpha_n| < 1", n));
        }
        // Phi_{n+1}(z) = z Phi_n(z) - alpha_n Phi_n^*(z)
        let deg = phi.len() - 1;
        let mut next = vec![Float::new(bits); deg + 2];
        for (j, coef) in phi.iter().enumerate() {
            next[j + 1] += coef;
            next[deg - j] -= Float::with_val(bits, &a * coef);
        }
        phi = next;
        h *= &one_minus;
        alpha.push(a);
        kappa_ratio.push(one_minus);
    }
    Ok(VerblunskyCoeffs {
        alpha,
        kappa_ratio,
        precision: p,
    })
}

/// One oracle run at fixed working precision: `a_n^2` and `b_n` for
/// `n <= n_max` (or `alpha_0..alpha_{n_max}` on the circle).
pub fn oracle_at(family: &WeightFamily, n_max: usize, p: Precision) -> Result<Coefficients> {
    match family.support() {
        Support::UnitCircle => {
            let c = family.moments(n_max + 2, p)?;
            Ok(Coefficients::Circle(verblunsky_from_toeplitz(&c, p)?))
        }
        _ => {
            let moments = family.moments(2 * n_max + 2, p)?;
            let mut coeffs = coeffs_from_moments(&moments, p)?;
            if family.is_symmetric() {
                // Odd moments are exact zeros; keep b_n exactly zero too.
                coeffs = RecurrenceCoeffs::new(
                    coeffs.a_sq_all().to_vec(),
                    vec![p.zero(); coeffs.b_len()],
                    p,
                )?;
            }
            Ok(Coefficients::Line(coeffs))
        }
    }
}

fn agree_to(a: &Float, b: &Float, tol: &Float) -> bool {
    let diff = Float::with_val(a.prec(), a - b).abs();
    let scale = Float::with_val(a.prec(), a.abs_ref()).max(&Float::with_val(b.prec(), b.abs_ref()));
    diff <= Float::with_val(a.prec(), tol * &scale)
}

fn coefficients_agree(x: &Coefficients, y: &Coefficients, tol: &Float) -> bool {
    let pairs = |u: &[Float], v: &[Float]| u.len() == v.len() && u.iter().zip(v).all(|(s, t)| agree_to(s, t, tol));
    match (x, y) {
        (Coefficients::Line(u), Coefficients::Line(v)) => {
            pairs(u.a_sq_all(), v.a_sq_all()) && pairs(u.b_all(), v.b_all())
        }
        (Coefficients::Circle(u), Coefficients::Circle(v)) => pairs(&u.alpha, &v.alpha),
        _ => false,
    }
}

fn round_coefficients(c: Coefficients, p: Precision) -> Result<Coefficients> {
    let r = |v: &[Float]| v.iter().map(|x| Float::with_val(p.bits(), x)).collect::<Vec<_>>();
    Ok(match c {
        Coefficients::Line(l) => Coefficients::Line(RecurrenceCoeffs::new(r(l.a_sq_all()), r(l.b_all()), p)?),
        Coefficients::Circle(v) => Coefficients::Circle(VerblunskyCoeffs {
            alpha: r(&v.alpha),
            kappa_ratio: r(&v.kappa_ratio),
            precision: p,
        }),
    })
}

/// Oracle coefficients correct to `target_digits`, found by rerunning at
/// doubling working precision until consecutive runs agree entrywise.
pub fn oracle_coefficients(family: &WeightFamily, n_max: usize, target_digits: u32) -> Result<Coefficients> {
    oracle_coefficients_with(family, n_max, target_digits, AdaptiveConfig::default())
}

pub fn oracle_coefficients_with(
    family: &WeightFamily,
    n_max: usize,
    target_digits: u32,
    config: AdaptiveConfig,
) -> Result<Coefficients> {
    family.validate()?;
    let target = Precision::new(target_digits)?;
    let tol = crate::mpnum::ten_pow_neg(target_digits, target.guarded().bits());
    let value = adaptive_eval_with(
        |p| oracle_at(family, n_max, p),
        target_digits,
        config,
        |a, b| coefficients_agree(a, b, &tol),
    )?;
    round_coefficients(value, target)
}

/// Orthonormal-up-to-scale values `p_0..p_n` at `x` with `p_0 = 1`.
fn eval_all(coeffs: &RecurrenceCoeffs, n: usize, x: &Float, bits: u32) -> Result<Vec<Float>> {
    if n > coeffs.max_a_index() || (n > 0 && n > coeffs.b_len()) {
        return Err(Error::domain(format!("coefficients do not reach degree {n}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(Float::with_val(bits, 1));
    let mut a_prev = Float::new(bits);
    for k in 0..n {
        let a_next = coeffs.a(k + 1).expect("checked");
        let mut v = Float::with_val(bits, x - coeffs.b(k).expect("checked")) * &out[k];
        if k > 0 {
            v -= Float::with_val(bits, &a_prev * &out[k - 1]);
        }
        v /= &a_next;
        out.push(v);
        a_prev = a_next;
    }
    Ok(out)
}

/// Derivatives `p_0'..p_n'` at `x` under the same normalization.
fn eval_all_derivative(coeffs: &RecurrenceCoeffs, n: usize, x: &Float, bits: u32) -> Result<Vec<Float>> {
    let vals = eval_all(coeffs, n, x, bits)?;
    let mut out = vec![Float::new(bits)];
    let mut a_prev = Float::new(bits);
    for k in 0..n {
        let a_next = coeffs.a(k + 1).expect("checked");
        let mut v = Float::with_val(bits, x - coeffs.b(k).expect("checked")) * &out[k];
        v += &vals[k];
        if k > 0 {
            v -= Float::with_val(bits, &a_prev * &out[k - 1]);
        }
        v /= &a_next;
        out.push(v);
        a_prev = a_next;
    }
    Ok(out)
}

/// Orthonormal `p_n(x)` by upward recurrence with `p_0 = mu_0^(-1/2)`.
pub fn eval_poly(coeffs: &RecurrenceCoeffs, n: usize, x: &Float, mu0: &Float, p: Precision) -> Result<Float> {
    let bits = p.guarded().bits();
    let vals = eval_all(coeffs, n, x, bits)?;
    let p0 = Float::with_val(bits, mu0.sqrt_ref()).recip();
    Ok(Float::with_val(p.bits(), &vals[n] * p0))
}

/// `(f(qx) - f(x)) / (x (q - 1))` for each `p_k`; the derivative at `x = 0`.
fn q_derivatives(coeffs: &RecurrenceCoeffs, n: usize, x: &Float, q: &Float, bits: u32) -> Result<Vec<Float>> {
    if x.is_zero() {
        return eval_all_derivative(coeffs, n, x, bits);
    }
    let qx = Float::with_val(bits, x * q);
    let at_x = eval_all(coeffs, n, x, bits)?;
    let at_qx = eval_all(coeffs, n, &qx, bits)?;
    let denom = Float::with_val(bits, x * Float::with_val(bits, q - 1u32));
    Ok(at_qx.into_iter().zip(at_x).map(|(a, b)| (a - b) / &denom).collect())
}

/// Largest `|lhs - rhs|` of the family's structure relation for `p_n`
/// over `points`. Relations are linear in the polynomials, so the common
/// normalization `p_0` drops out and `p_0 = 1` is used.
pub fn check_structure(
    family: &WeightFamily,
    coeffs: &RecurrenceCoeffs,
    n: usize,
    points: &[Float],
    p: Precision,
) -> Result<Float> {
    let bits = p.guarded().bits();
    if n == 0 {
        return Err(Error::domain("structure relations need n >= 1"));
    }
    let a = |k: usize| -> Float { coeffs.a(k).unwrap_or_else(|| Float::new(bits)) };
    let mut worst = Float::new(bits);
    for x in points {
        let x = Float::with_val(bits, x);
        let residual = match family {
            WeightFamily::Charlier { a: w } | WeightFamily::GeneralizedCharlier { a: w } => {
                let wf = Float::with_val(bits, w);
                let here = eval_all(coeffs, n, &x, bits)?;
                let shifted = eval_all(coeffs, n, &Float::with_val(bits, &x + 1u32), bits)?;
                let mut r = Float::with_val(bits, &shifted[n] - &here[n]);
                let an = a(n);
                if matches!(family, WeightFamily::Charlier { .. }) {
                    r -= Float::with_val(bits, &an / &wf) * &here[n - 1];
                } else {
                    r -= Float::with_val(bits, Float::with_val(bits, n as u64) / &an) * &here[n - 1];
                    if n >= 2 {
                        r -= Float::with_val(bits, &an * a(n - 1)) / &wf * &here[n - 2];
                    }
                }
                r
            }
            WeightFamily::QHermite { q } => {
                let qf = Float::with_val(bits, q);
                let dq = q_derivatives(coeffs, n, &x, &qf, bits)?;
                let here = eval_all(coeffs, n, &x, bits)?;
                let scale = Float::with_val(bits, (&qf).pow(n as i32 - 1)) * Float::with_val(bits, 1 - &qf);
                Float::with_val(bits, &dq[n] - a(n) / scale * &here[n - 1])
            }
            WeightFamily::QFreud { q } | WeightFamily::QFreudGeneral { q, .. } => {
                if n + 1 > coeffs.max_a_index() {
                    return Err(Error::domain(format!("structure relation at n = {n} needs a_{}", n + 1)));
                }
                let qf = Float::with_val(bits, q);
                let (a_hat, b_hat) = q_freud_structure_constants(family, coeffs, n, &qf, bits);
                let dq = q_derivatives(coeffs, n, &x, &qf, bits)?;
                let here = eval_all(coeffs, n, &x, bits)?;
                let one_minus_q = Float::with_val(bits, 1 - &qf);
                let mut r = Float::with_val(bits, &dq[n] - Float::with_val(bits, &b_hat / &one_minus_q) * &here[n - 1]);
                if n >= 3 {
                    r -= Float::with_val(bits, &a_hat / &one_minus_q) * &here[n - 3];
                }
                r
            }
            _ => {
                return Err(Error::UnsupportedFamily(format!(
                    "no structure relation implemented for {}",
                    family.tag()
                )))
            }
        };
        let abs = residual.abs();
        if abs > worst {
            worst = abs;
        }
    }
    Ok(Float::with_val(p.bits(), worst))
}

/// `(A_n, B_n)` of the q-Freud structure relation; for the two-parameter
/// weight the hatted constants `-c A_n` and `-c B_n + (1 + c) a_n / q^(n-1)`.
fn q_freud_structure_constants(family: &WeightFamily, coeffs: &RecurrenceCoeffs, n: usize, q: &Float, bits: u32) -> (Float, Float) {
    let a = |k: usize| -> Float { coeffs.a(k).map(|v| Float::with_val(bits, v)).unwrap_or_else(|| Float::new(bits)) };
    let a2 = |k: usize| -> Float { coeffs.a_sq(k).map(|v| Float::with_val(bits, v)).unwrap_or_else(|| Float::new(bits)) };
    let ni = n as i32;
    let a_const = if n >= 3 {
        Float::with_val(bits, a(n) * a(n - 1)) * a(n - 2) / Float::with_val(bits, q.pow(ni - 3))
    } else {
        Float::new(bits)
    };
    let upper: Float = (1..=n + 1).fold(Float::new(bits), |s, j| s + a2(j));
    let lower: Float = (1..=n.saturating_sub(2)).fold(Float::new(bits), |s, j| s + a2(j));
    let q2 = Float::with_val(bits, q.square_ref());
    let scale = Float::with_val(bits, a(n) / Float::with_val(bits, q.pow(ni - 1)));
    let b_const = Float::with_val(bits, upper - q2 * lower) * &scale;
    match family {
        WeightFamily::QFreudGeneral { c, .. } => {
            let cf = Float::with_val(bits, c);
            let a_hat = -Float::with_val(bits, &cf * &a_const);
            let b_hat = -Float::with_val(bits, &cf * &b_const) + Float::with_val(bits, 1 + &cf) * scale;
            (a_hat, b_hat)
        }
        _ => (a_const, b_const),
    }
}

/// Residuals at index `n` of the nonlinear equations the family's
/// coefficients satisfy, in denominator-free form. Generalized Charlier
/// has two equations; the others one.
pub fn equation_residuals(family: &WeightFamily, coeffs: &Coefficients, n: usize) -> Result<Vec<Float>> {
    if n == 0 {
        return Err(Error::domain("equations start at n = 1"));
    }
    let missing = || Error::domain(format!("coefficients too short for the equation at n = {n}"));
    if let (WeightFamily::ExpCosCircle { lambda }, Coefficients::Circle(v)) = (family, coeffs) {
        let bits = v.precision.guarded().bits();
        let get = |k: i64| -> Result<Float> {
            if k < 0 {
                Ok(Float::with_val(bits, -1))
            } else {
                v.alpha.get(k as usize).map(|x| Float::with_val(bits, x)).ok_or_else(missing)
            }
        };
        let ni = n as i64;
        let (prev, cur, next) = (get(ni - 1)?, get(ni)?, get(ni + 1)?);
        let half_lambda = Float::with_val(bits, lambda) / 2u32;
        let one_minus = Float::with_val(bits, 1 - Float::with_val(bits, cur.square_ref()));
        let lhs = -(half_lambda * one_minus * Float::with_val(bits, &next + &prev));
        return Ok(vec![lhs - cur * (ni + 1)]);
    }
    let line = coeffs.line().ok_or_else(|| Error::domain("expected line coefficients"))?;
    let bits = line.precision().guarded().bits();
    let a2 = |k: usize| -> Result<Float> {
        line.a_sq(k).map(|v| Float::with_val(bits, v)).ok_or_else(missing)
    };
    let nf = Float::with_val(bits, n as u64);
    let parity = |rho: &Rational| -> Float {
        if n % 2 == 1 {
            Float::with_val(bits, &nf + Float::with_val(bits, rho))
        } else {
            nf.clone()
        }
    };
    match family {
        WeightFamily::FreudQuartic { rho, lambda } => {
            let s = a2(n + 1)? + a2(n)? + a2(n - 1)?;
            let un = a2(n)?;
            let lhs = Float::with_val(bits, &un * 4u32) * s - Float::with_val(bits, lambda) * Float::with_val(bits, &un * 2u32);
            Ok(vec![lhs - parity(rho)])
        }
        WeightFamily::FreudSextic { rho } => {
            let u2 = if n >= 2 { a2(n - 2)? } else { Float::new(bits) };
            let (u1, u, up, upp) = (a2(n - 1)?, a2(n)?, a2(n + 1)?, a2(n + 2)?);
            let sum = Float::with_val(bits, &u2 * &u1)
                + Float::with_val(bits, u1.square_ref())
                + Float::with_val(bits, &u1 * &u) * 2u32
                + Float::with_val(bits, &u1 * &up)
                + Float::with_val(bits, u.square_ref())
                + Float::with_val(bits, &u * &up) * 2u32
                + Float::with_val(bits, up.square_ref())
                + Float::with_val(bits, &up * &upp);
            Ok(vec![Float::with_val(bits, &u * 6u32) * sum - parity(rho)])
        }
        WeightFamily::GeneralizedCharlier { a } => {
            let af = Float::with_val(bits, a);
            let bhat = |k: usize| -> Result<Float> {
                line.b(k).map(|v| Float::with_val(bits, v) - k as u64).ok_or_else(missing)
            };
            let (bn, bp) = (bhat(n)?, bhat(n - 1)?);
            let na = Float::with_val(bits, &nf * &af);
            let first = -Float::with_val(bits, &na * Float::with_val(bits, &bn - &bp))
                - a2(n)? * Float::with_val(bits, a2(n + 1)? - a2(n - 1)?);
            let second = a2(n)? * (bn + bp + &nf) - na;
            Ok(vec![first, second])
        }
        WeightFamily::QFreud { q } | WeightFamily::QFreudGeneral { q, .. } => {
            let qf = Float::with_val(bits, q);
            let ni = n as i32;
            let qpow = |e: i32| Float::with_val(bits, (&qf).pow(e));
            let lhs = qpow(ni - 1) * Float::with_val(bits, 1 - qpow(ni));
            let (up, u, um) = (a2(n + 1)?, a2(n)?, a2(n - 1)?);
            let triple = Float::with_val(bits, &up * &u) * &um;
            let base = Float::with_val(bits, &up + Float::with_val(bits, &u * qpow(1 - ni)))
                + Float::with_val(bits, &um * qpow(2));
            let rhs = match family {
                WeightFamily::QFreudGeneral { c, .. } => {
                    let cf = Float::with_val(bits, c);
                    let shift = Float::with_val(bits, 1 + &cf) / &cf;
                    let inner = base - shift - Float::with_val(bits, &cf * qpow(3 - 2 * ni)) * triple;
                    -(cf * &u) * inner
                }
                _ => Float::with_val(bits, &u * (base + qpow(3 - 2 * ni) * triple)),
            };
            Ok(vec![lhs - rhs])
        }
        _ => Err(Error::UnsupportedFamily(format!(
            "{} has no nonlinear equation for its coefficients",
            family.tag()
        ))),
    }
}

/// First `n` where the trace's implied `a_n^2` (the kappa ratio on the
/// circle) differs from `reference` by more than `rel_threshold`
/// relatively. Non-finite iterates count as divergent.
pub fn first_divergence(
    family: &WeightFamily,
    trace: &Trace,
    reference: &Coefficients,
    rel_threshold: f64,
) -> Result<Option<i64>> {
    if !(rel_threshold > 0.0 && rel_threshold <= 1.0) {
        return Err(Error::domain("rel_threshold must lie in (0, 1]"));
    }
    let start = if matches!(family, WeightFamily::ExpCosCircle { .. }) { 0 } else { 1 };
    for n in start..=trace.last_index() {
        let reference_value = reference
            .a2_analog(n as usize)
            .ok_or_else(|| Error::domain(format!("reference stops before n = {n}")))?;
        let Some(derived) = derived_at(family, trace, n).0 else {
            return Ok(Some(n));
        };
        if !derived.is_finite() {
            return Ok(Some(n));
        }
        let bits = derived.prec().max(reference_value.prec());
        let diff = Float::with_val(bits, &derived - reference_value).abs();
        let scale = Float::with_val(bits, reference_value.abs_ref());
        if diff > scale * rel_threshold {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Human-readable summary of a coefficient set.
pub fn describe(coeffs: &Coefficients, digits: u32) -> Vec<String> {
    match coeffs {
        Coefficients::Line(l) => (0..l.a_sq_all().len().max(l.b_len()))
            .map(|n| {
                let a = l.a_sq(n).map(|v| format_sci(v, digits)).unwrap_or_default();
                let b = l.b(n).map(|v| format_sci(v, digits)).unwrap_or_default();
                format!("{n} {a} {b}")
            })
            .collect(),
        Coefficients::Circle(v) => v
            .alpha
            .iter()
            .enumerate()
            .map(|(n, a)| format!("{n} {}", format_sci(a, digits)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpnum::{bessel_i, parse_rational, rel_diff, ten_pow_neg};

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn poisson_moments_give_charlier_coefficients() {
        let pr = p(60);
        let fam = WeightFamily::charlier(r("1")).unwrap();
        let c = coeffs_from_moments(&fam.moments(22, pr).unwrap(), pr).unwrap();
        let tol = ten_pow_neg(30, 200);
        for n in 1..=10usize {
            assert!(rel_diff(c.a_sq(n).unwrap(), &pr.float(n as u32)) < tol, "a_{n}");
            assert!(rel_diff(c.b(n).unwrap(), &pr.float(n as u32 + 1)) < tol, "b_{n}");
        }
    }

    #[test]
    fn hankel_path_matches_recursion() {
        let pr = p(60);
        let fam = WeightFamily::charlier(r("5")).unwrap();
        let m = fam.moments(26, pr).unwrap();
        let fast = coeffs_from_moments(&m, pr).unwrap();
        let slow = coeffs_from_hankel(&m, 12, pr).unwrap();
        let tol = ten_pow_neg(40, 200);
        for n in 1..=12 {
            assert!(rel_diff(fast.a_sq(n).unwrap(), slow.a_sq(n).unwrap()) < tol);
            assert!(rel_diff(fast.b(n).unwrap(), slow.b(n).unwrap()) < tol);
        }
    }

    #[test]
    fn lebesgue_measure_has_zero_verblunsky() {
        let pr = p(30);
        let mut c = vec![pr.float(1)];
        c.extend((0..8).map(|_| pr.zero()));
        let v = verblunsky_from_toeplitz(&c, pr).unwrap();
        assert!(v.alpha.iter().all(|a| a.is_zero()));
    }

    #[test]
    fn exp_cos_first_verblunsky() {
        let pr = p(50);
        let fam = WeightFamily::exp_cos_circle(r("2")).unwrap();
        let v = verblunsky_from_toeplitz(&fam.moments(4, pr).unwrap(), pr).unwrap();
        let ratio = Float::with_val(pr.bits(), bessel_i(1, &pr.float(2), pr).unwrap().value() / bessel_i(0, &pr.float(2), pr).unwrap().value());
        assert!(rel_diff(&v.alpha[0], &ratio) < ten_pow_neg(45, 200));
        assert!((v.alpha[1].to_f64() + 0.359_90).abs() < 1e-5);
    }

    #[test]
    fn precision_starved_run_reports_exhaustion() {
        let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
        assert!(matches!(oracle_at(&fam, 120, p(20)), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn polynomial_values() {
        let pr = p(40);
        let fam = WeightFamily::charlier(r("1")).unwrap();
        let c = fam.closed_form_coeffs(5, pr).unwrap();
        let mu0 = fam.moment(0, pr).unwrap().into_float();
        let p0 = eval_poly(&c, 0, &pr.float(3), &mu0, pr).unwrap();
        assert!(rel_diff(&p0, &pr.float(-0.5).exp()) < ten_pow_neg(35, 200));
        let root = eval_poly(&c, 1, c.b(0).unwrap(), &mu0, pr).unwrap();
        assert!(root.is_zero());

        let herm = WeightFamily::generalized_hermite(r("0")).unwrap();
        let hc = herm.closed_form_coeffs(5, pr).unwrap();
        let x = pr.float(0.7);
        let plus = eval_poly(&hc, 3, &x, &pr.float(1), pr).unwrap();
        let minus = eval_poly(&hc, 3, &(-x), &pr.float(1), pr).unwrap();
        assert_eq!(plus, -minus);
    }

    #[test]
    fn structure_relation_negative_control() {
        let pr = p(40);
        let fam = WeightFamily::charlier(r("1")).unwrap();
        let c = fam.closed_form_coeffs(6, pr).unwrap();
        let pts: Vec<Float> = (0..5).map(|k| pr.float(k)).collect();
        let good = check_structure(&fam, &c, 3, &pts, pr).unwrap();
        assert!(good < ten_pow_neg(32, 200));
        let bad = c.with_scaled_a(2, &pr.float(1.01));
        assert!(check_structure(&fam, &bad, 3, &pts, pr).unwrap() > 1e-4);
        assert!(matches!(
            check_structure(&WeightFamily::freud_sextic(r("0")).unwrap(), &c, 3, &pts, pr),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn threshold_must_be_in_range() {
        let pr = p(30);
        let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
        let trace = crate::dpainleve::iterate_family(&fam, 5, pr).unwrap();
        let reference = oracle_coefficients(&fam, 6, 30).unwrap();
        assert!(first_divergence(&fam, &trace, &reference, 0.0).is_err());
        assert_eq!(first_divergence(&fam, &trace, &reference, 1.0).unwrap(), None);
    }
}
