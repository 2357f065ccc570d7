use freudlab::dpainleve::iterate_family;
use freudlab::mpnum::{gamma_rational, parse_rational, rel_diff, Precision};
use freudlab::oracle::{
    check_structure, coeffs_from_hankel, coeffs_from_moments, eval_poly, first_divergence, hankel_determinant,
    oracle_coefficients, verblunsky_from_toeplitz,
};
use freudlab::weights::{Coefficients, WeightFamily};
use rug::ops::Pow;
use rug::{Float, Rational};

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn tol(digits: i32) -> Float {
    Float::with_val(64, 10).pow(-digits)
}

fn line_families() -> Vec<WeightFamily> {
    vec![
        WeightFamily::generalized_hermite(r("1/2")).unwrap(),
        WeightFamily::freud_quartic(r("0"), r("0")).unwrap(),
        WeightFamily::freud_quartic(r("1/2"), r("1")).unwrap(),
        WeightFamily::freud_sextic(r("0")).unwrap(),
        WeightFamily::charlier(r("5")).unwrap(),
        WeightFamily::generalized_charlier(r("4")).unwrap(),
        WeightFamily::q_hermite(r("0.5")).unwrap(),
        WeightFamily::q_freud(r("0.9")).unwrap(),
        WeightFamily::q_freud_general(r("0.9"), r("-0.5")).unwrap(),
    ]
}

#[test]
fn even_moments_are_positive() {
    let p = prec(50);
    for fam in line_families() {
        let m = fam.moments(41, p).unwrap();
        for k in (0..=40).step_by(2) {
            assert!(m[k] > 0, "{fam}: moment {k}");
        }
    }
    let circle = WeightFamily::exp_cos_circle(r("2")).unwrap();
    for k in 0..=20 {
        assert!(*circle.moment(k, p).unwrap().value() > 0);
    }
}

#[test]
fn hankel_determinants_are_positive() {
    let p = prec(50);
    for fam in line_families() {
        let m = fam.moments(17, p).unwrap();
        for order in 1..=8 {
            assert!(hankel_determinant(&m, order, p).unwrap() > 0, "{fam}: order {order}");
        }
    }
}

#[test]
fn quartic_start_is_twice_moment_ratio() {
    let p = prec(50);
    for rho in ["0", "1/2", "3"] {
        let fam = WeightFamily::freud_quartic(r(rho), r("0")).unwrap();
        let m = fam.moments(3, p).unwrap();
        let ratio = Float::with_val(p.bits(), &m[2] / &m[0]) * 2u32;
        let init = fam.initial_data(p).unwrap();
        assert_eq!(init.base_index, 0);
        assert!(init.values[0].is_zero());
        assert!(rel_diff(&init.values[1], &ratio) < tol(48), "rho = {rho}");
    }
}

#[test]
fn quartic_first_coefficient_is_gamma_ratio() {
    let p = prec(50);
    let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
    let coeffs = oracle_coefficients(&fam, 4, 40).unwrap();
    let ratio = Float::with_val(
        p.bits(),
        gamma_rational(&r("3/4"), p).unwrap().value() / gamma_rational(&r("1/4"), p).unwrap().value(),
    );
    assert!(rel_diff(coeffs.line().unwrap().a_sq(1).unwrap(), &ratio) < tol(39));
    let init = fam.initial_data(p).unwrap();
    assert!((init.values[1].to_f64() - 0.67598).abs() < 1e-5);
}

#[test]
fn hermite_moments_give_half_integers() {
    let p = prec(40);
    let fam = WeightFamily::generalized_hermite(r("0")).unwrap();
    let c = coeffs_from_moments(&fam.moments(42, p).unwrap(), p).unwrap();
    for n in 1..=20 {
        let expected = Float::with_val(p.bits(), n) / 2u32;
        assert!(rel_diff(c.a_sq(n).unwrap(), &expected) < tol(30), "n = {n}");
        assert!(c.b(n).unwrap().clone().abs() < tol(30));
    }
}

#[test]
fn determinant_path_agrees_with_recursion() {
    let p = prec(60);
    for fam in [WeightFamily::charlier(r("1/2")).unwrap(), WeightFamily::q_freud(r("0.9")).unwrap()] {
        let m = fam.moments(30, p).unwrap();
        let fast = coeffs_from_moments(&m, p).unwrap();
        let slow = coeffs_from_hankel(&m, 10, p).unwrap();
        for n in 1..=10 {
            assert!(rel_diff(fast.a_sq(n).unwrap(), slow.a_sq(n).unwrap()) < tol(40), "{fam}: n = {n}");
        }
    }
}

#[test]
fn verblunsky_examples_and_szego_relation() {
    let p = prec(50);
    let fam = WeightFamily::exp_cos_circle(r("2")).unwrap();
    let c = fam.moments(30, p).unwrap();
    let v = verblunsky_from_toeplitz(&c, p).unwrap();
    assert!((v.alpha[0].to_f64() - 0.69777).abs() < 1e-5);
    assert!((v.alpha[1].to_f64() + 0.35990).abs() < 1e-5);
    for (a, k) in v.alpha.iter().zip(&v.kappa_ratio) {
        assert!(a.clone().abs() < 1);
        let expected = Float::with_val(p.bits(), 1 - Float::with_val(p.bits(), a.square_ref()));
        assert!(rel_diff(k, &expected) < tol(45));
    }
}

#[test]
fn oracle_respects_known_bounds() {
    let a = r("4");
    let gc = WeightFamily::generalized_charlier(a.clone()).unwrap();
    let c = oracle_coefficients(&gc, 30, 30).unwrap();
    for n in 1..=30 {
        let a2 = c.line().unwrap().a_sq(n).unwrap();
        // c_n^2 = 1 - a_n^2/a falls below 30 digits after n = 20
        if n <= 20 {
            assert!(*a2 < a, "n = {n}");
        } else {
            assert!(*a2 <= a, "n = {n}");
        }
    }
    let q = r("0.9");
    let qf = WeightFamily::q_freud(q.clone()).unwrap();
    let c = oracle_coefficients(&qf, 30, 30).unwrap();
    let qf64 = Float::with_val(128, &q);
    for n in 1..=30i32 {
        let a2 = c.line().unwrap().a_sq(n as usize).unwrap().clone();
        let lhs = Float::with_val(128, a2.square_ref());
        let rhs = Float::with_val(128, (&qf64).pow(2 * n - 2)) * (1 - Float::with_val(128, (&qf64).pow(n)));
        assert!(lhs <= rhs, "n = {n}");
    }
}

#[test]
fn orthonormal_polynomial_values() {
    let p = prec(40);
    let fam = WeightFamily::charlier(r("1")).unwrap();
    let c = fam.closed_form_coeffs(6, p).unwrap();
    let mu0 = fam.moment(0, p).unwrap().into_float();
    let p0 = eval_poly(&c, 0, &p.float(3), &mu0, p).unwrap();
    let expected = p.float(-0.5).exp();
    assert!(rel_diff(&p0, &Float::with_val(p.bits(), expected)) < tol(38));
    let root = c.b(0).unwrap().clone();
    assert!(eval_poly(&c, 1, &root, &mu0, p).unwrap().abs() < tol(35));

    let herm = WeightFamily::generalized_hermite(r("1/2")).unwrap();
    let hc = herm.closed_form_coeffs(6, p).unwrap();
    let hmu = herm.moment(0, p).unwrap().into_float();
    for x in [0.3, 1.1, 2.5] {
        let plus = eval_poly(&hc, 3, &p.float(x), &hmu, p).unwrap();
        let minus = eval_poly(&hc, 3, &p.float(-x), &hmu, p).unwrap();
        assert!(Float::with_val(p.bits(), &plus + &minus).abs() < tol(35));
    }
}

#[test]
fn structure_relation_examples() {
    let p = prec(40);
    let threshold = tol(32);
    let ch = WeightFamily::charlier(r("1")).unwrap();
    let c = match oracle_coefficients(&ch, 8, 40).unwrap() {
        Coefficients::Line(l) => l,
        Coefficients::Circle(_) => unreachable!(),
    };
    let pts: Vec<Float> = (0..5).map(|k| p.float(k)).collect();
    assert!(check_structure(&ch, &c, 3, &pts, p).unwrap() < threshold);

    let qh = WeightFamily::q_hermite(r("0.5")).unwrap();
    let qc = qh.closed_form_coeffs(8, p).unwrap();
    let q = p.float(0.5);
    let pts: Vec<Float> = (0..=3)
        .flat_map(|k| {
            let v = Float::with_val(p.bits(), (&q).pow(k));
            [v.clone(), -v]
        })
        .collect();
    assert!(check_structure(&qh, &qc, 4, &pts, p).unwrap() < threshold);
}

#[test]
fn first_divergence_examples() {
    let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
    let oracle = oracle_coefficients(&fam, 51, 30).unwrap();
    let stable = iterate_family(&fam, 50, prec(200)).unwrap();
    assert_eq!(first_divergence(&fam, &stable, &oracle, 0.1).unwrap(), None);
    assert_eq!(first_divergence(&fam, &stable, &oracle, 1.0).unwrap(), None);

    let oracle = oracle_coefficients(&fam, 101, 30).unwrap();
    let fig1 = iterate_family(&fam, 100, prec(30)).unwrap();
    let idx = first_divergence(&fam, &fig1, &oracle, 0.1).unwrap().unwrap();
    assert!((35..=70).contains(&idx), "{idx}");
}
