use ftau::circle::{c_commutator, c_compose, c_conjugate, c_from_rotation, c_inverse, CircleMap};
use ftau::construct::{
    commutator_trick, connect_tuple, connect_tuple_derived, defect_search, defect_witness,
    factor_local, match_intervals, proximal_shrink, random_element, subdivision_points, Ambient,
    Certificate, RandomFlavor,
};
use ftau::lift::{l_compose, l_defect_delta, l_rot, DefectValue};
use ftau::plmap::{pl_compose, pl_is_ftau, pl_validate, Flavor, PLMap, RawTable};
use ftau::ring::{tau_pow, QTau, Rational, ZTau};
use ftau::{Budgets, Error};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn t(k: i64) -> ZTau {
    tau_pow(k)
}

/// Interior points of depth at most 8, sorted.
fn points() -> Vec<ZTau> {
    let mut v = subdivision_points(8);
    v.sort();
    v.dedup();
    v
}

fn tuple(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<ZTau>> {
    let pts = points();
    len.prop_flat_map(move |n| subsequence(pts.clone(), n))
}

fn tuple_pair() -> impl Strategy<Value = (Vec<ZTau>, Vec<ZTau>)> {
    (1usize..=4).prop_flat_map(|n| (tuple(n..=n), tuple(n..=n)))
}

fn revalidates(g: &PLMap) -> bool {
    let raw = RawTable::new(g.xs().to_vec(), g.ys().to_vec(), None);
    pl_validate(&raw).as_ref() == Ok(g)
}

fn fixes_around(g: &CircleMap, p: &ZTau) -> bool {
    g.fixed_arc_around(p).is_some_and(|(a, b)| a < *p && *p < b)
}

fn budgets() -> Budgets {
    Budgets::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matchings_compose(v in tuple(6..=6)) {
        let (a, b, c, d, e, f) = (&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
        let g1 = match_intervals(a, b, c, d).unwrap();
        let g2 = match_intervals(c, d, e, f).unwrap();
        prop_assert_eq!(g1.domain(), (a, b));
        prop_assert_eq!(g1.range(), (c, d));
        prop_assert!(revalidates(&g1));
        let g = pl_compose(&g1, &g2).unwrap();
        prop_assert!(revalidates(&g));
        prop_assert_eq!(g.domain(), (a, b));
        prop_assert_eq!(g.range(), (e, f));
    }

    #[test]
    fn connect_sends_tuples((xs, ys) in tuple_pair()) {
        let cert = connect_tuple(&xs, &ys).unwrap();
        prop_assert!(pl_is_ftau(&cert.element, &Flavor::Ftau));
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(&cert.element.eval_ztau(x).unwrap(), y);
        }
        if xs == ys {
            prop_assert!(cert.element.is_identity());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn derived_is_a_compact_commutator((xs, ys) in tuple_pair()) {
        let cert = connect_tuple_derived(&xs, &ys).unwrap();
        let g = &cert.element;
        prop_assert!(pl_is_ftau(g, &Flavor::FtauC));
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert_eq!(&g.eval_ztau(x).unwrap(), y);
        }
        let (l, f) = cert.commutator.clone().unwrap();
        prop_assert!(pl_is_ftau(&l, &Flavor::Ftau) && pl_is_ftau(&f, &Flavor::Ftau));
        let li = ftau::plmap::pl_inverse(&l);
        let fi = ftau::plmap::pl_inverse(&f);
        let c = pl_compose(&pl_compose(&pl_compose(&li, &fi).unwrap(), &l).unwrap(), &f).unwrap();
        prop_assert_eq!(&c, g);
        prop_assert!(Certificate::from(cert).check(&budgets()).is_ok());
    }

    #[test]
    fn shrink_lands_inside(v in tuple(4..=4)) {
        // J = [v0, v1], I = (v2, v3) or the other way round
        for (j, i) in [((&v[0], &v[1]), (&v[2], &v[3])), ((&v[2], &v[3]), (&v[0], &v[1]))] {
            let f = proximal_shrink(j, i, Ambient::Interval).unwrap();
            let f = f.as_interval().unwrap();
            let y0 = f.eval_ztau(j.0).unwrap();
            let y1 = f.eval_ztau(j.1).unwrap();
            prop_assert!(i.0 < &y0 && &y1 < i.1);
        }
    }

    #[test]
    fn factorization_on_random_elements(seed in any::<u64>(), size in 1usize..6) {
        let g = random_element(seed, size, RandomFlavor::Ttau).to_circle().unwrap();
        prop_assume!(!g.is_identity());
        let c = factor_local(&g, &budgets()).unwrap();
        prop_assert_eq!(&c_compose(&c.u, &c.v), &g);
        let (a, b) = &c.arc;
        prop_assert!(a < &c.x && &c.x < b);
        prop_assert!(c.u.fixes_arc(a, b));
        let f = c_commutator(&c.l, &c.m);
        let h3 = c_commutator(&c.h2, &c.h1);
        prop_assert_eq!(&c.v, &c_compose(&h3, &f));
        for piece in [&c.l, &c.m, &c.h1, &c.h2] {
            prop_assert!(fixes_around(piece, &c.y));
        }
        prop_assert!(Certificate::from(c).check(&budgets()).is_ok());
    }

    #[test]
    fn trick_decomposition(seed in any::<u64>(), size in 1usize..6, xi in 0usize..20) {
        let g = random_element(seed, size, RandomFlavor::Ttau).to_circle().unwrap();
        prop_assume!(!g.is_identity());
        let x = points()[xi].clone();
        let c = commutator_trick(&g, &x, seed, &budgets()).unwrap();
        prop_assert!(!c.h.is_identity());
        prop_assert!(!c.k.is_identity());
        prop_assert_eq!(&c.k, &c_commutator(&g, &c.h));
        prop_assert_eq!(&c.k, &c_compose(&c_inverse(&g), &c_conjugate(&g, &c.h)));
        prop_assert!(fixes_around(&c.k, &x));
        prop_assert!(Certificate::from(c).check(&budgets()).is_ok());
    }

    #[test]
    fn random_pairs_have_defect_at_most_one(a in any::<u64>(), b in any::<u64>(), n in 1usize..6) {
        let f = random_element(a, n, RandomFlavor::Lift).to_lift().unwrap();
        let g = random_element(b, n, RandomFlavor::Lift).to_lift().unwrap();
        let d = l_defect_delta(&f, &g, &budgets()).unwrap();
        prop_assert!(d.lower_bound() <= Rational::one());
        if let DefectValue::Exact(v) = d {
            prop_assert!(v.sign() >= 0);
        }
        let fg = l_compose(&f, &g);
        prop_assert!(l_rot(&fg, &budgets()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_elements_are_deterministic_and_valid(seed in any::<u64>(), size in 1usize..10) {
        for flavor in [RandomFlavor::Ftau, RandomFlavor::Ttau, RandomFlavor::Lift] {
            let e = random_element(seed, size, flavor);
            prop_assert_eq!(&e, &random_element(seed, size, flavor));
            let back = ftau::element::Element::from_json(&e.to_json()).unwrap();
            prop_assert_eq!(&back, &e);
            if flavor == RandomFlavor::Ftau {
                let g = e.as_interval().unwrap();
                prop_assert!(pl_is_ftau(g, &Flavor::Ftau));
                prop_assert!(g.eval_ztau(&ZTau::zero()).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn matching_examples() {
    let z = ZTau::zero();
    let one = ZTau::one();
    let g = match_intervals(&z, &t(1), &z, &t(2)).unwrap();
    assert_eq!(g.ks(), &[1]);
    let g = match_intervals(&t(1), &one, &t(2), &one).unwrap();
    assert_eq!(g.ks(), &[-1]);
    let target = &t(2) * &ZTau::int(2);
    let g = match_intervals(&z, &one, &z, &target).unwrap();
    assert_eq!(g.pieces(), 2);
    assert_eq!(g.eval_ztau(&one).unwrap(), target);
    assert!(revalidates(&g));
    assert_eq!(match_intervals(&one, &z, &z, &one), Err(Error::NonPositive));
}

#[test]
fn connect_examples() {
    let c = connect_tuple(&[t(1)], &[t(2)]).unwrap();
    assert_eq!(c.element.pieces(), 2);
    assert_eq!(c.element.eval_ztau(&t(1)).unwrap(), t(2));
    assert!(connect_tuple(&[t(1)], &[t(1)]).unwrap().element.is_identity());
    let c = connect_tuple(&[t(2), t(1)], &[t(3), t(2)]).unwrap();
    assert_eq!(c.element.eval_ztau(&t(2)).unwrap(), t(3));
    assert_eq!(c.element.eval_ztau(&t(1)).unwrap(), t(2));
    assert!(matches!(
        connect_tuple(&[t(1), t(2)], &[t(2), t(3)]),
        Err(Error::BadTuple(_))
    ));
    let d = connect_tuple_derived(&[t(2)], &[t(3)]).unwrap();
    assert!(pl_is_ftau(&d.element, &Flavor::FtauC));
    assert_eq!(d.element.eval_ztau(&t(2)).unwrap(), t(3));
    assert!(connect_tuple_derived(&[t(2)], &[t(2)]).unwrap().element.is_identity());
}

#[test]
fn shrink_examples() {
    let f = proximal_shrink((&t(2), &t(1)), (&ZTau::zero(), &t(3)), Ambient::Interval).unwrap();
    let f = f.as_interval().unwrap();
    assert!(f.eval_ztau(&t(1)).unwrap() < t(3));
    assert!(f.eval_ztau(&t(2)).unwrap().is_positive());
    let id = proximal_shrink((&t(3), &t(2)), (&t(4), &t(1)), Ambient::Interval).unwrap();
    assert!(id.is_identity());
    // an arc avoiding 0 pushed into a short arc around tau
    let arc = (&t(3), &t(2));
    let target = (&(&t(1) - &t(6)), &(&t(1) + &t(6)));
    let f = proximal_shrink(arc, target, Ambient::Circle).unwrap();
    let f = f.as_circle().unwrap();
    for p in [arc.0, arc.1] {
        let y = f.eval_ztau(p);
        assert!(target.0 < &y && &y < target.1);
    }
}

#[test]
fn factor_examples() {
    let b = budgets();
    assert_eq!(factor_local(&CircleMap::identity(), &b), Err(Error::IdentityInput));
    let r = c_from_rotation(&t(1));
    let c = factor_local(&r, &b).unwrap();
    assert_eq!(c_compose(&c.u, &c.v), r);
    let torsion = torsion();
    let c = factor_local(&torsion, &b).unwrap();
    assert_eq!(c_compose(&c.u, &c.v), torsion);
    assert!(c.u.fixes_arc(&c.arc.0, &c.arc.1));
}

fn torsion() -> CircleMap {
    let e = ftau::expr::evaluate_str(
        r#"treepair {"p": ["s+", ["s+", "leaf", "leaf"], "leaf"], "q": ["s+", ["s+", "leaf", "leaf"], "leaf"], "shift": 1}"#,
        &Default::default(),
        &budgets(),
    )
    .unwrap();
    e.to_circle().unwrap()
}

#[test]
fn trick_examples() {
    let b = budgets();
    let r = c_from_rotation(&t(1));
    let c = commutator_trick(&r, &ZTau::zero(), 0, &b).unwrap();
    assert!(!c.k.is_identity());
    assert!(fixes_around(&c.k, &ZTau::zero()));
    assert_eq!(
        commutator_trick(&CircleMap::identity(), &ZTau::zero(), 0, &b),
        Err(Error::IdentityInput)
    );
}

#[test]
fn witness_family() {
    let b = budgets();
    let exact = |n| match defect_witness(n, &b).unwrap().delta {
        DefectValue::Exact(v) => v,
        other => panic!("n = {n}: {other:?}"),
    };
    assert_eq!(exact(1), QTau::from(&(&ZTau::int(2) * &t(1)) - &ZTau::one()));
    assert_eq!(exact(2), QTau::from_rational(&Rational::new(1.into(), 2.into())));
    let mut prev = QTau::zero();
    for n in 1..=6 {
        let w = defect_witness(n, &b).unwrap();
        let zero = Rational::zero();
        assert_eq!(l_rot(&w.g, &b).unwrap().as_rational(), Some(&zero));
        assert_eq!(l_rot(&w.h, &b).unwrap().as_rational(), Some(&zero));
        let d = exact(n);
        assert!(d >= prev && d <= QTau::one(), "n = {n}");
        prev = d;
        assert!(Certificate::from(w).check(&b).is_ok());
    }
    assert!(defect_witness(0, &b).is_err());
}

#[test]
fn witness_search_is_reproducible() {
    let b = budgets();
    let w1 = defect_search(40, 7, 4, &b).unwrap();
    let w2 = defect_search(40, 7, 4, &b).unwrap();
    assert_eq!(w1, w2);
    assert!(w1.delta.lower_bound() <= Rational::one());
    assert_eq!(w1.seed, Some(7));
}
