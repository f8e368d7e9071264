mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use wlab::bounds::shared_values;
use wlab::curvature::gauss_curvature;
use wlab::expr::{format_expression, parse_ast, parse_expression, Expr};
use wlab::poly::Polynomial;
use wlab::ramification::{preimages, ramification_report};
use wlab::rational::RationalFunction;
use wlab::roots::roots_with_multiplicity;
use wlab::sphere::{contains_point, SpherePoint};
use wlab::weierstrass::{
    check_conformality, compute_periods, data_from_phi, metric_factor, phi_from_data,
    sample_regular_points,
};

fn arb_expr() -> impl Strategy<Value = Expr> {
    let coeff = (-10i32..=10, -10i32..=10)
        .prop_map(|(a, b)| Complex64::new(a as f64 / 2.0, b as f64 / 2.0));
    let leaf = prop_oneof![coeff.prop_map(Expr::Const), Just(Expr::Z)];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(
                Box::new(a),
                Box::new(b),
                0
            )),
            (inner, -2i32..=2).prop_map(|(a, k)| Expr::Pow(Box::new(a), k, 0)),
        ]
    })
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * 1.0f64.max(a.norm()).max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn parse_format_parse_round_trip(e in arb_expr(), seed in any::<u64>()) {
        let text = e.to_string();
        let first = parse_expression(&text);
        prop_assume!(first.is_ok());
        let f = first.unwrap();
        let again = parse_expression(&format_expression(&f)).unwrap();
        let mut rng = rng(seed);
        let mut poles: Vec<Complex64> = f.poles().unwrap().iter().map(|r| r.value).collect();
        poles.extend(again.poles().unwrap().iter().map(|r| r.value));
        let mut checked = 0;
        while checked < 20 {
            let z = complex(&mut rng, 2.0);
            if poles.iter().any(|p| (p - z).norm() < 1e-2) {
                continue;
            }
            checked += 1;
            let (a, b) = (f.eval(z).unwrap(), again.eval(z).unwrap());
            prop_assert!(close(a, b, 1e-9), "{text}: {a} vs {b} at {z}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn parsing_is_total(bytes in proptest::collection::vec(any::<u8>(), 0..40)) {
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = parse_ast(&text) {
            prop_assert!(e.position() <= text.len());
        }
    }

    #[test]
    fn parsing_is_total_on_grammar_alphabet(s in "[z0-9i+*/^() .-]{0,30}") {
        if let Err(e) = parse_expression(&s) {
            prop_assert!(e.position() <= s.len());
        }
    }
}

#[test]
fn degree_balance_and_residue_sums() {
    let mut rng = rng(11);
    let t = tol();
    for _ in 0..500 {
        let d = rng.gen_range(1..=8);
        let f = random_map(&mut rng, d);
        let divisor = f.zeros_and_poles(&t).unwrap();
        let pos: i64 = divisor.iter().map(|e| e.order).filter(|&o| o > 0).sum();
        let neg: i64 = divisor.iter().map(|e| e.order).filter(|&o| o < 0).sum();
        assert_eq!(pos as usize, d);
        assert_eq!(-neg as usize, d);

        let mut sum = f.residue_at(SpherePoint::Infinity, &t).unwrap();
        let mut scale = f.coefficient_scale();
        for r in f.poles().unwrap() {
            let res = f.residue_at(SpherePoint::Finite(r.value), &t).unwrap();
            scale = scale.max(res.norm());
            sum += res;
        }
        assert!(
            sum.norm() <= 1e-10 * scale,
            "residue sum {sum} for {}",
            format_expression(&f)
        );
    }
}

#[test]
fn roots_of_products_are_unions() {
    let mut rng = rng(12);
    let t = tol();
    for _ in 0..100 {
        let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = spread_points(&mut rng, na, &[]);
        let b = spread_points(&mut rng, nb, &a);
        let p = poly_from_roots(&mut rng, &a);
        let q = poly_from_roots(&mut rng, &b);
        let found = roots_with_multiplicity(&p.mul_clean(&q, 0.0), &t).unwrap();
        assert_eq!(found.len(), a.len() + b.len());
        for r in a.iter().chain(&b) {
            assert!(found
                .iter()
                .any(|f| f.multiplicity == 1 && close(f.value, *r, t.eps_pt)));
        }
    }
}

#[test]
fn orders_survive_common_factors() {
    let mut rng = rng(13);
    let t = tol();
    for _ in 0..100 {
        let d = rng.gen_range(1..=4);
        let f = random_map(&mut rng, d);
        let roots = spread_points(&mut rng, 2, &[]);
        let extra = poly_from_roots(&mut rng, &roots);
        let padded = RationalFunction::new(
            f.num().mul_clean(&extra, 0.0),
            f.den().mul_clean(&extra, 0.0),
        )
        .unwrap();
        for e in f.zeros_and_poles(&t).unwrap() {
            assert_eq!(padded.order_at(e.point, &t).unwrap(), e.order);
        }
    }
}

#[test]
fn preimage_multiplicities_sum_to_degree() {
    let mut rng = rng(14);
    let t = tol();
    for _ in 0..100 {
        let d = rng.gen_range(1..=6);
        let f = random_map(&mut rng, d);
        for a in [
            SpherePoint::Infinity,
            SpherePoint::Finite(complex(&mut rng, 2.0)),
            SpherePoint::finite(0.0, 0.0),
        ] {
            let total: u32 = preimages(&f, a, &t).unwrap().iter().map(|p| p.1).sum();
            assert_eq!(total as usize, d);
        }
    }
}

#[test]
fn nu_f_is_moebius_invariant() {
    let mut rng = rng(15);
    let t = tol();
    for _ in 0..60 {
        let d = rng.gen_range(1..=5);
        let f = random_map(&mut rng, d);
        // punctures at some preimages of 0 and infinity make nu_f nontrivial
        let mut punctures = vec![SpherePoint::Infinity];
        for r in f.zeros().unwrap().iter().chain(f.poles().unwrap()).take(2) {
            punctures.push(SpherePoint::Finite(r.value));
        }
        let base = ramification_report(&f, &punctures, 0, &t).unwrap();
        let moved = f.compose_moebius(&random_moebius(&mut rng)).unwrap();
        let other = ramification_report(&moved, &punctures, 0, &t).unwrap();
        assert_eq!(base.nu_f, other.nu_f);
        assert_eq!(base.exceptional_count, other.exceptional_count);
        if let Some(b) = base.fundamental_bound {
            assert!(b.holds);
        }
    }
}

#[test]
fn fixtures_satisfy_phi_identities() {
    let t = tol();
    for name in DATA_FIXTURES {
        let d = fixture_data(name);
        let phi = phi_from_data(&d);
        let c = check_conformality(&phi, &t);
        assert!(c.symbolic_zero && c.passed, "{name}");

        let back = data_from_phi(&phi).unwrap();
        assert!(
            back.h.approx_eq(&d.h, 1e-12)
                && back.g1.approx_eq(&d.g1, 1e-12)
                && back.g2.approx_eq(&d.g2, 1e-12),
            "{name}"
        );

        let periods = compute_periods(&d, &t).unwrap();
        assert!(
            periods.residue_sums.iter().all(|s| *s < 1e-10),
            "{name}: {:?}",
            periods.residue_sums
        );
    }
}

#[test]
fn curvature_is_nonpositive() {
    let t = tol();
    let mut count = 0;
    for name in DATA_FIXTURES {
        let d = fixture_data(name);
        for z in sample_regular_points(&d, 125, 7, &t).unwrap() {
            if metric_factor(&d, z, &t).is_err() {
                continue;
            }
            let k = gauss_curvature(&d, z, &t).unwrap();
            assert!(k <= 0.0, "{name}: K = {k} at {z}");
            count += 1;
        }
    }
    assert!(count >= 1000);
}

/// `gB = 1 / gA` with `gA = (S z)^d`: the values 1 and -1 are shared with
/// `d` common preimages each, so the counting bound is attained.
fn inverse_power_pair(
    rng: &mut rand_chacha::ChaCha8Rng,
    d: usize,
) -> (RationalFunction, RationalFunction, Vec<SpherePoint>) {
    let s = random_moebius(rng);
    let ga = RationalFunction::new(
        Polynomial::monomial(Complex64::new(1.0, 0.0), d),
        Polynomial::one(),
    )
    .unwrap()
    .substitute_moebius(&s)
    .unwrap();
    let gb = ga.recip().unwrap();
    let inv = s.inverse();
    let punctures = vec![
        inv.apply(SpherePoint::finite(0.0, 0.0)),
        inv.apply(SpherePoint::Infinity),
    ];
    (ga, gb, punctures)
}

#[test]
fn shared_value_deltas_are_bounded_and_symmetric() {
    let mut rng = rng(16);
    let t = tol();
    let mut attained = 0;
    for i in 0..200 {
        let d = rng.gen_range(1..=5);
        let (ga, gb, punctures) = if i % 2 == 0 {
            inverse_power_pair(&mut rng, d)
        } else {
            let ga = random_map(&mut rng, d);
            let gb = random_map(&mut rng, d);
            let mut punctures = vec![SpherePoint::Infinity];
            punctures.extend(
                spread_points(&mut rng, 2, &[])
                    .into_iter()
                    .map(SpherePoint::Finite),
            );
            (ga, gb, punctures)
        };
        let ab = shared_values(&ga, &gb, &punctures, &t).unwrap();
        let ba = shared_values(&gb, &ga, &punctures, &t).unwrap();
        assert!(
            ab.delta_sum() <= 2 * d,
            "delta sum {} > 2d = {}",
            ab.delta_sum(),
            2 * d
        );
        assert_eq!(ab.count(), ba.count());
        for v in &ab.values {
            let others: Vec<SpherePoint> = ba.values.iter().map(|w| w.value).collect();
            assert!(contains_point(&others, &v.value, 1e-6));
        }
        if ab.delta_sum() == 2 * d {
            attained += 1;
        }
    }
    assert!(attained >= 100);
}
