use freudlab::mpnum::{
    adaptive_eval, bessel_i, gamma, gamma_rational, parse_rational, q_pochhammer_inf, rel_diff, BigReal, Precision,
};
use freudlab::Error;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn tol(digits: i32) -> Float {
    Float::with_val(64, 10).pow(-digits)
}

/// Arithmetic-geometric mean.
fn agm(a: &Float, b: &Float) -> Float {
    let bits = a.prec();
    let (mut x, mut y) = (a.clone(), b.clone());
    for _ in 0..200 {
        let nx = Float::with_val(bits, &x + &y) / 2u32;
        let ny = Float::with_val(bits, &x * &y).sqrt();
        if nx == x {
            break;
        }
        x = nx;
        y = ny;
    }
    x
}

/// Gamma(1/4) from Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(sqrt 2, 1).
fn gamma_quarter_agm(bits: u32) -> Float {
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let num = two_pi.pow(Float::with_val(bits, 1.5));
    let m = agm(&Float::with_val(bits, 2u32).sqrt(), &Float::with_val(bits, 1u32));
    (num / m).sqrt()
}

/// I_nu(z) = (1/pi) int_0^pi exp(z cos t) cos(nu t) dt by the trapezoid rule,
/// which converges geometrically for this periodic integrand.
fn bessel_trapezoid(nu: u32, z: f64, bits: u32, panels: u32) -> Float {
    let pi = Float::with_val(bits, Constant::Pi);
    let zf = Float::with_val(bits, z);
    let mut sum = Float::new(bits);
    for k in 0..=panels {
        let t = Float::with_val(bits, &pi * k) / panels;
        let ct = Float::with_val(bits, t.cos_ref());
        let cn = Float::with_val(bits, &t * nu).cos();
        let term = Float::with_val(bits, &zf * &ct).exp() * cn;
        sum += if k == 0 || k == panels { term / 2u32 } else { term };
    }
    sum / panels
}

#[test]
fn gamma_trivial_values() {
    let p = prec(40);
    assert_eq!(*gamma_rational(&Rational::from(1), p).unwrap().value(), 1);
    let r = Float::with_val(
        200,
        gamma_rational(&Rational::from(5), p).unwrap().value()
            / Float::with_val(200, gamma_rational(&Rational::from(2), p).unwrap().value() * gamma_rational(&Rational::from(3), p).unwrap().value()),
    );
    assert!(rel_diff(&r, &Float::with_val(200, 12)) < tol(38));
}

#[test]
fn gamma_quarter_matches_agm_formula() {
    for digits in [30u32, 60, 120] {
        let p = prec(digits);
        let g = gamma_rational(&parse_rational("1/4").unwrap(), p).unwrap();
        let oracle = gamma_quarter_agm(p.bits() + 64);
        assert!(rel_diff(g.value(), &oracle) < tol(digits as i32 - 1), "digits {digits}");
    }
    let g = gamma_rational(&parse_rational("1/4").unwrap(), prec(20)).unwrap();
    assert!(g.to_sci(11).starts_with("3.6256099082"));
}

#[test]
fn gamma_half_integers_match_factorial_formula() {
    // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    let p = prec(50);
    let bits = p.bits() + 32;
    for n in 0u32..8 {
        let x = Rational::from((2 * n as i64 + 1, 2));
        let g = gamma_rational(&x, p).unwrap();
        let fact = |k: u32| (1..=k).fold(Float::with_val(bits, 1), |acc, j| acc * j);
        let sqrt_pi = Float::with_val(bits, Constant::Pi).sqrt();
        let expected = fact(2 * n) * sqrt_pi / (Float::with_val(bits, 4u32).pow(n) * fact(n));
        assert!(rel_diff(g.value(), &expected) < tol(48), "n = {n}");
    }
}

#[test]
fn gamma_functional_equation_on_grid() {
    let p = prec(50);
    for s in ["0.25", "0.5", "0.75", "1.5"] {
        let x = parse_rational(s).unwrap();
        let g = gamma_rational(&x, p).unwrap();
        let g1 = gamma_rational(&Rational::from(&x + 1u32), p).unwrap();
        let rhs = Float::with_val(p.bits(), g.value() * p.float(&x));
        assert!(rel_diff(g1.value(), &rhs) < tol(48), "x = {s}");
    }
}

#[test]
fn gamma_rejects_nonpositive_arguments() {
    let p = prec(20);
    assert!(matches!(gamma(&p.float(0), p), Err(Error::Domain(_))));
    assert!(matches!(gamma(&p.float(-2), p), Err(Error::Domain(_))));
}

#[test]
fn bessel_series_matches_quadrature() {
    let p = prec(40);
    for (nu, z) in [(0u32, 1.0), (1, 2.0), (2, 4.0), (3, 2.0)] {
        let series = bessel_i(nu, &p.float(z), p).unwrap();
        let quad = bessel_trapezoid(nu, z, p.bits() + 64, 128);
        assert!(rel_diff(series.value(), &quad) < tol(38), "nu = {nu}, z = {z}");
    }
}

#[test]
fn bessel_trivial_and_ratio_values() {
    let p = prec(50);
    assert_eq!(*bessel_i(0, &p.float(0), p).unwrap().value(), 1);
    assert!(bessel_i(1, &p.float(0), p).unwrap().value().is_zero());
    let two = p.float(2);
    let ratio = Float::with_val(p.bits(), bessel_i(1, &two, p).unwrap().value() / bessel_i(0, &two, p).unwrap().value());
    assert!(BigReal::new(&ratio, p).to_sci(5).starts_with("6.9777"));
    assert!(matches!(bessel_i(0, &p.float(-1), p), Err(Error::Domain(_))));
}

#[test]
fn bessel_contiguous_relation_on_grid() {
    let p = prec(40);
    for z in [1.0, 2.0, 4.0] {
        let zf = p.float(z);
        for nu in 1u32..6 {
            let lo = bessel_i(nu - 1, &zf, p).unwrap().into_float();
            let mid = bessel_i(nu, &zf, p).unwrap().into_float();
            let hi = bessel_i(nu + 1, &zf, p).unwrap().into_float();
            let lhs = Float::with_val(p.bits(), &lo - &hi);
            let rhs = Float::with_val(p.bits(), &mid * (2 * nu)) / &zf;
            assert!(rel_diff(&lhs, &rhs) < tol(37), "nu = {nu}, z = {z}");
        }
    }
}

#[test]
fn euler_pentagonal_theorem() {
    // (q; q)_inf = sum_k (-1)^k q^(k(3k-1)/2) over all integers k
    let p = prec(40);
    for qs in ["0.3", "0.5", "0.9"] {
        let q = p.float(parse_rational(qs).unwrap());
        let product = q_pochhammer_inf(&q, &q, p).unwrap();
        let bits = p.bits() + 32;
        let mut sum = Float::with_val(bits, 1);
        for k in 1i32..400 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for e in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                sum += Float::with_val(bits, (&q).pow(e)) * sign;
            }
        }
        assert!(rel_diff(product.value(), &sum) < tol(37), "q = {qs}");
    }
}

#[test]
fn pochhammer_examples_and_shift() {
    let p = prec(50);
    assert_eq!(*q_pochhammer_inf(&p.float(0), &p.float(0.5), p).unwrap().value(), 1);
    assert!(q_pochhammer_inf(&p.float(1), &p.float(0.3), p).unwrap().value().is_zero());
    let q4 = p.float(parse_rational("0.6561").unwrap());
    let ratio = Float::with_val(
        p.bits(),
        q_pochhammer_inf(&p.float(parse_rational("0.9").unwrap()), &q4, p).unwrap().value()
            / q_pochhammer_inf(&p.float(parse_rational("0.729").unwrap()), &q4, p).unwrap().value(),
    );
    assert!((ratio.to_f64() - 0.22).abs() < 0.01);
    for (x, q) in [("0.5", "0.5"), ("-0.7", "0.9"), ("0.25", "0.75")] {
        let xf = p.float(parse_rational(x).unwrap());
        let qf = p.float(parse_rational(q).unwrap());
        let lhs = q_pochhammer_inf(&xf, &qf, p).unwrap().into_float();
        let shifted = q_pochhammer_inf(&Float::with_val(p.bits(), &xf * &qf), &qf, p).unwrap().into_float();
        let rhs = Float::with_val(p.bits(), 1 - &xf) * shifted;
        assert!(rel_diff(&lhs, &rhs) < tol(48), "x = {x}, q = {q}");
    }
    assert!(matches!(q_pochhammer_inf(&p.float(0.5), &p.float(1), p), Err(Error::Domain(_))));
}

#[test]
fn adaptive_examples() {
    let one = adaptive_eval(|p| Ok(BigReal::new(&p.float(1), p)), 30).unwrap();
    assert_eq!(*one.value(), 1);
    let quarter = parse_rational("1/4").unwrap();
    let g = adaptive_eval(|p| gamma_rational(&quarter, p), 30).unwrap();
    let g60 = gamma_rational(&quarter, prec(60)).unwrap();
    assert!(rel_diff(g.value(), g60.value()) < tol(29));
    let x = parse_rational("0.9").unwrap();
    let q = parse_rational("0.6561").unwrap();
    let v = adaptive_eval(|p| q_pochhammer_inf(&p.float(&x), &p.float(&q), p), 40).unwrap();
    let v80 = q_pochhammer_inf(&prec(80).float(&x), &prec(80).float(&q), prec(80)).unwrap();
    assert!(rel_diff(v.value(), v80.value()) < tol(39));
}

#[test]
fn doubling_precision_barely_moves_results() {
    for digits in [20u32, 40] {
        let lo = prec(digits);
        let hi = prec(2 * digits);
        let t = tol(digits as i32 - 2);
        let x = parse_rational("0.75").unwrap();
        assert!(rel_diff(gamma_rational(&x, lo).unwrap().value(), gamma_rational(&x, hi).unwrap().value()) < t);
        let z = lo.float(3);
        assert!(rel_diff(bessel_i(2, &z, lo).unwrap().value(), bessel_i(2, &hi.float(3), hi).unwrap().value()) < t);
        let q = parse_rational("0.9").unwrap();
        assert!(
            rel_diff(
                q_pochhammer_inf(&lo.float(&q), &lo.float(&q), lo).unwrap().value(),
                q_pochhammer_inf(&hi.float(&q), &hi.float(&q), hi).unwrap().value()
            ) < t
        );
    }
}

#[test]
fn precision_floor_is_ten_digits() {
    assert!(Precision::new(9).is_err());
    assert_eq!(prec(30).bits(), 101);
}
