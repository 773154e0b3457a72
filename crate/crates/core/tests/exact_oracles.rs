//! Exact and high-precision routines against values computed independently
//! (rational arithmetic and 200-digit floating point) and frozen here.

use bscoal::coalescent::forward_prob;
use bscoal::exact::{
    exact_j_distribution, exact_j_distribution_rational, exact_j_mean, hat_p, integral_oracle,
    p_y_ue, product_partial, stable_alt_sum, x_table, x_table_exact, x_table_f64, AltSumTable,
};
use num_rational::BigRational;
use num_traits::Zero;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn alternating_sums_match_frozen_values() {
    let frozen = [
        (1, "0.69314718055994530941723212145817"),
        (10, "0.035370161206904168732216285195074"),
        (50, "0.0046615865925682969759304686846289"),
        (200, "0.00088234567977471551117323121571867"),
        (1000, "0.00013701199052823047824033795502717"),
    ];
    let table = AltSumTable::new(1000, 30).unwrap();
    for (n, want) in frozen {
        let direct = stable_alt_sum(n, 30).unwrap();
        let d = direct.to_decimal_certified();
        let t = table.s(n).to_decimal_certified();
        let k = 28.min(d.len()).min(t.len());
        assert_eq!(&d[..k], &want[..k], "direct route, n = {n}");
        assert_eq!(&t[..k], &want[..k], "triangle route, n = {n}");
        assert!(direct.certified_digits() >= 30 && table.s(n).certified_digits() >= 30);
    }
}

#[test]
fn hat_p_matches_frozen_values() {
    let frozen = [
        (1, 2, std::f64::consts::LN_2),
        (1, 3, 0.143841036225890463719609502997),
        (2, 3, 0.622556248918265727819391584078),
        (2, 5, 0.0701237086607085680863528778432),
        (3, 8, 0.0260320973983919146608698203581),
        (5, 40, 0.000430615367638616528392486642681),
    ];
    let table = AltSumTable::new(40, 25).unwrap();
    for (l, m, want) in frozen {
        let a = hat_p(l, m, 25).unwrap().to_f64();
        let b = table.hat_p(l, m).unwrap().to_f64();
        assert!(((a - want) / want).abs() < 1e-15, "hat_p({l}, {m}) = {a}");
        assert!(((b - want) / want).abs() < 1e-15, "table hat_p({l}, {m}) = {b}");
    }
    assert!((p_y_ue(2, 20).unwrap().to_f64() - 0.143841036225890463719609502997).abs() < 1e-17);
}

#[test]
fn integral_oracle_matches_frozen_values() {
    for (m, want) in [
        (2, std::f64::consts::LN_2),
        (5, 0.0291636305691462975086386756842),
        (37, 0.000194125882728256433419995049983),
    ] {
        let v = integral_oracle(m).unwrap();
        assert!(((v.to_f64() - want) / want).abs() < 1e-13, "m = {m}: {}", v.to_f64());
        assert!(v.certified_digits() >= 12);
    }
}

#[test]
fn quadrature_and_closed_form_agree_on_the_grid() {
    let table = AltSumTable::new(200, 20).unwrap();
    for m in (2..=200).step_by(7) {
        let gap = table.hat_p(1, m).unwrap().to_f64() - integral_oracle(m).unwrap().to_f64();
        assert!(gap.abs() < 1e-10, "m = {m}: {gap}");
    }
}

#[test]
fn x_tables_match_rational_recursion() {
    let x2 = x_table_exact(2, 8).unwrap();
    assert_eq!(x2.get(8).unwrap(), &q(185_581, 264_600));
    let x3 = x_table_exact(3, 9).unwrap();
    assert_eq!(x3.get(9).unwrap(), &q(47_627, 322_560));
    let hp = x_table(2, 8, 30).unwrap();
    let f = x_table_f64(2, 8).unwrap();
    let want = 185_581.0 / 264_600.0;
    assert!((hp.get(8).unwrap().to_f64() - want).abs() < 1e-16);
    assert!((f.get(8).unwrap() - want).abs() < 1e-15);
}

#[test]
fn increments_respect_the_hitting_bound() {
    for m in 2..=10 {
        let t = x_table_f64(m, 100_000).unwrap();
        assert!(t.within_unit_interval());
        assert!(t.increment_bound_ratio() <= 1.0 + 1e-12, "m = {m}");
    }
}

#[test]
fn collision_law_matches_rational_dynamic_programme() {
    let want = [
        q(1, 36),
        q(12_929, 129_600),
        q(54_397, 259_200),
        q(763, 2_592),
        q(497, 1_920),
        q(7, 64),
    ];
    let r = exact_j_distribution_rational(7).unwrap();
    assert_eq!(&r[1..], &want);
    let f = exact_j_distribution(7).unwrap();
    for (j, p) in want.iter().enumerate() {
        let p = num_traits::ToPrimitive::to_f64(p).unwrap();
        assert!((f.prob(j + 1) - p).abs() < 1e-16);
    }
    assert!((exact_j_mean(7).unwrap() - 172_147.0 / 43_200.0).abs() < 1e-14);
}

#[test]
fn rational_collision_law_is_normalised_at_100() {
    let r = exact_j_distribution_rational(100).unwrap();
    let total = r.iter().fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(total, q(1, 1));
    assert_eq!(forward_prob(100, 100).unwrap(), q(100, 99 * 100 * 99));
}

#[test]
fn partial_product_matches_frozen_value() {
    let p = product_partial(2, 5, 25).unwrap();
    assert!((p.exponent.to_f64() - 0.433298065202113631222707528371).abs() < 1e-16);
    assert!((p.product.to_f64() - 1.54233586884714557127994138891).abs() < 1e-15);
    let first = product_partial(1, 1, 25).unwrap();
    assert!(first.product.to_decimal_certified().starts_with("2.00000000000000000000000"));
}
