use freudlab::dpainleve::Flag;
use freudlab::lab::{
    asymptotics, figure1, figure2, figure3, oracle_table, perturbation, precision_frontier, reference,
};
use freudlab::mpnum::{bessel_i, parse_rational, q_pochhammer_inf, rel_diff, Precision};
use freudlab::weights::WeightFamily;
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

#[test]
fn quartic_figure_tracks_oracle_then_breaks() {
    let fig = figure1(prec(30), 100).unwrap();
    let idx = fig.divergence_index.unwrap();
    assert!((35..=70).contains(&idx), "{idx}");
    assert_eq!(fig.row(idx).unwrap().flag, Flag::Diverged);
    assert_eq!(fig.row(idx - 1).unwrap().flag, Flag::Ok);
    assert_eq!(fig.extra_label, Some("sqrt_n_over_3"));

    let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
    let oracle = reference(&fam, 31, 40).unwrap();
    for n in 1..=30 {
        let got = fig.row(n).unwrap().derived_a2.as_ref().unwrap();
        let want = oracle.a2_analog(n as usize).unwrap();
        assert!(rel_diff(got, want) < tol(10), "n = {n}");
    }
}

#[test]
fn quartic_figure_is_clean_at_high_precision() {
    let fig = figure1(prec(200), 100).unwrap();
    assert_eq!(fig.divergence_index, None);
    assert!(fig.rows.iter().all(|row| row.flag == Flag::Ok));
}

#[test]
fn charlier_figure_starts_at_bessel_ratio_and_decays() {
    let fig = figure2(&r("1"), prec(30), 80).unwrap();
    let idx = fig.divergence_index.unwrap();
    assert!((30..=55).contains(&idx), "{idx}");

    let p = prec(60);
    let two = p.float(2);
    let ratio = Float::with_val(p.bits(), bessel_i(1, &two, p).unwrap().value() / bessel_i(0, &two, p).unwrap().value());
    let clean = figure2(&r("1"), p, 30).unwrap();
    assert!(rel_diff(&clean.row(1).unwrap().value, &ratio) < tol(55));
    for n in 1..25 {
        let here = clean.row(n).unwrap().value.clone().abs();
        let next = clean.row(n + 1).unwrap().value.clone().abs();
        assert!(next < here, "n = {n}");
    }
}

#[test]
fn q_freud_figure_properties() {
    let q = r("0.9");
    let fig = figure3(&q, prec(50), 200).unwrap();
    let lo = fig.divergence_index.unwrap();
    let hi = figure3(&q, prec(70), 200).unwrap().divergence_index.unwrap();
    assert!(hi > lo, "{lo} then {hi}");
    assert_eq!(fig.extra_label, Some("log_abs_y"));

    let p = prec(50);
    let qf = p.float(&q);
    let q3 = Float::with_val(p.bits(), (&qf).pow(3u32));
    let q4 = Float::with_val(p.bits(), (&qf).pow(4u32));
    let expected = Float::with_val(
        p.bits(),
        q_pochhammer_inf(&qf, &q4, p).unwrap().value() / q_pochhammer_inf(&q3, &q4, p).unwrap().value(),
    );
    assert!(rel_diff(&fig.row(1).unwrap().value, &expected) < tol(30));

    let table = asymptotics(&WeightFamily::q_freud(q).unwrap(), 50, prec(40)).unwrap();
    for row in &table.rows {
        assert!(row.scaled > 0 && row.scaled < 1.2, "n = {}", row.n);
    }
}

#[test]
fn oracle_table_on_the_circle() {
    let fam = WeightFamily::exp_cos_circle(r("2")).unwrap();
    let table = oracle_table(&fam, 5, 30).unwrap();
    assert!((table.row(0).unwrap().value.to_f64() - 0.69777).abs() < 1e-5);
    assert_eq!(table.metadata.digits, 30);
}

#[test]
fn hermite_scaled_coefficients_are_exact() {
    let fam = WeightFamily::generalized_hermite(r("0")).unwrap();
    let table = asymptotics(&fam, 30, prec(30)).unwrap();
    for row in &table.rows {
        assert!(row.deviation < tol(28), "n = {}", row.n);
    }
}

#[test]
fn quartic_deviation_shrinks() {
    let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
    let table = asymptotics(&fam, 200, prec(30)).unwrap();
    let dev: Vec<f64> = table.rows.iter().map(|row| row.deviation.to_f64()).collect();
    // envelope over even/odd pairs
    let pair = |n: usize| dev[n - 1].max(dev[n]);
    for n in (21..198).step_by(2) {
        assert!(pair(n + 2) < pair(n), "n = {n}");
    }
    let last = table.row(200).unwrap().deviation.to_f64();
    assert!(last < 0.01);
    assert!((last - 2.798e-7).abs() < 0.01 * 2.798e-7, "{last:e}");
}

#[test]
fn frontier_and_perturbation() {
    let fam = WeightFamily::freud_quartic(r("0"), r("0")).unwrap();
    let points = precision_frontier(&fam, &[20, 30, 40, 60], 100).unwrap();
    let found: Vec<_> = points.iter().map(|pt| (pt.digits, pt.divergence_index)).collect();
    assert_eq!(found, vec![(20, Some(38)), (30, Some(55)), (40, Some(73)), (60, None)]);

    let shift = perturbation(&fam, 1, &r("1/10000000000"), prec(60), 100).unwrap();
    let before = shift.unperturbed.unwrap_or(i64::MAX);
    let after = shift.perturbed.unwrap();
    assert!(after < before, "{after} vs {before}");
}

#[test]
fn figures_carry_reproducible_metadata() {
    let a = figure2(&r("1"), prec(30), 80).unwrap();
    let b = figure2(&r("1"), prec(30), 80).unwrap();
    assert_eq!(a.metadata.experiment, "figure2");
    assert_eq!(a.metadata.digits, 30);
    assert_eq!(a.metadata.n_max, 80);
    assert!(!a.metadata.params.is_empty());
    assert_eq!(a.metadata.seeds.len(), 2);
    let values = |f: &freudlab::lab::Figure| f.rows.iter().map(|row| row.value.clone()).collect::<Vec<_>>();
    assert_eq!(values(&a), values(&b));
    assert_eq!(a.divergence_index, b.divergence_index);
}
