use ftau::circle::{c_from_subdivision_pair, SubdivisionTree};
use ftau::construct::{
    connect_tuple_derived, defect_witness, factor_local, random_element, random_tree, Certificate,
    RandomFlavor,
};
use ftau::element::Element;
use ftau::expr::json::{
    canonical, deserialize_element, element_document, element_from_document, serialize_element,
};
use ftau::expr::{evaluate, evaluate_str, parse, parse_expr, print_element, Env, Expr};
use ftau::lift::{l_rot, l_scl, LiftMap, RotResult};
use ftau::ring::{tau_pow, ZTau};
use ftau::{Budgets, Error};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn ztau_lit() -> impl Strategy<Value = ZTau> {
    (-20i64..20, -20i64..20).prop_map(|(a, b)| ZTau::new(a, b))
}

fn tree(seed: u64, size: usize) -> SubdivisionTree {
    random_tree(&mut ChaCha8Rng::seed_from_u64(seed), size)
}

fn flavor() -> impl Strategy<Value = RandomFlavor> {
    prop_oneof![
        Just(RandomFlavor::Ftau),
        Just(RandomFlavor::Ttau),
        Just(RandomFlavor::Lift)
    ]
}

/// Arbitrary syntax trees, not necessarily well typed.
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        ztau_lit().prop_map(Expr::Rot),
        ztau_lit().prop_map(Expr::Trans),
        prop_oneof![Just("a"), Just("g1"), Just("h_2"), Just("letter")]
            .prop_map(|s| Expr::Ident(s.to_string())),
        (any::<u64>(), 1usize..6, flavor()).prop_map(|(s, n, f)| Expr::Map(random_element(s, n, f))),
        (any::<u64>(), any::<u64>(), 1usize..5, -3i64..6)
            .prop_map(|(s1, s2, n, k)| Expr::TreePair(tree(s1, n), tree(s2, n), k)),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::compose(a, b)),
            inner.clone().prop_map(|a| Expr::Inverse(Box::new(a))),
            (inner.clone(), -4i64..5).prop_map(|(a, k)| Expr::Power(Box::new(a), k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Comm(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Conj(Box::new(a), Box::new(b))),
            (inner, -3i64..4).prop_map(|(a, n)| Expr::Lift(Box::new(a), BigInt::from(n))),
        ]
    })
}

/// Well-typed circle expressions over the name `a`.
fn circle_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1i64..6).prop_map(|k| Expr::Rot(tau_pow(k))),
        (any::<u64>(), 1usize..4, 0i64..4).prop_map(|(s, n, k)| {
            let p = tree(s, n);
            Expr::TreePair(p.clone(), p, k % n as i64)
        }),
        (any::<u64>(), 1usize..4).prop_map(|(s, n)| Expr::Map(random_element(s, n, RandomFlavor::Ttau))),
        (any::<u64>(), 1usize..3).prop_map(|(s, n)| Expr::Map(random_element(s, n, RandomFlavor::Ftau))),
        Just(Expr::Ident("a".into())),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::compose(a, b)),
            inner.clone().prop_map(|a| Expr::Inverse(Box::new(a))),
            (inner.clone(), -2i64..3).prop_map(|(a, k)| Expr::Power(Box::new(a), k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Comm(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Conj(Box::new(a), Box::new(b))),
        ]
    })
}

fn env() -> Env {
    let mut env = Env::new();
    env.insert("a".into(), random_element(11, 3, RandomFlavor::Ttau));
    env
}

fn torsion() -> Element {
    let p = SubdivisionTree::from_json(&json!(["s+", ["s+", "leaf", "leaf"], "leaf"])).unwrap();
    Element::Circle(c_from_subdivision_pair(&p, &p, 1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_inverts_print(e in any_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap(), e);
    }

    #[test]
    fn element_json_round_trip(seed in any::<u64>(), n in 1usize..8, f in flavor()) {
        let e = random_element(seed, n, f);
        let text = serialize_element(&e);
        prop_assert_eq!(deserialize_element(&text).unwrap(), e.clone());
        let reparsed: Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(canonical(&reparsed), text);
        prop_assert_eq!(parse_expr(&print_element(&e)).unwrap(), Expr::Map(e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn evaluate_print_evaluate(e in circle_expr(), lift in prop::option::of(-2i64..3)) {
        let b = Budgets::default();
        let e = match lift {
            Some(n) => Expr::Lift(Box::new(e), n.into()),
            None => e,
        };
        let env = env();
        let v = evaluate_str(&e.to_string(), &env, &b).unwrap();
        let again = evaluate_str(&print_element(&v), &Env::new(), &b).unwrap();
        prop_assert_eq!(again, v);
    }

    #[test]
    fn rot_json_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let f = random_element(seed, n, RandomFlavor::Lift).to_lift().unwrap();
        let b = Budgets::default();
        let r = l_rot(&f, &b).unwrap();
        prop_assert_eq!(RotResult::from_json(&r.to_json()).unwrap(), r);
        let s = l_scl(&f, &b).unwrap();
        prop_assert_eq!(s.rot(), &l_rot(&f, &b).unwrap());
    }
}

#[test]
fn grammar_examples() {
    assert_eq!(parse_expr("trans(t)").unwrap(), Expr::Trans(ZTau::tau()));
    assert_eq!(
        parse_expr("lift(rot(t), 0)^2").unwrap(),
        Expr::Power(
            Box::new(Expr::Lift(Box::new(Expr::Rot(ZTau::tau())), BigInt::from(0))),
            2
        )
    );
    assert_eq!(
        parse_expr("comm(a, b)").unwrap(),
        Expr::Comm(Box::new(Expr::Ident("a".into())), Box::new(Expr::Ident("b".into())))
    );
    let prog = parse("let g = rot(t);\nlet h = inv(g);\ncomm(g, h)").unwrap();
    assert_eq!(prog.lets.len(), 2);
    let b = Budgets::default();
    assert!(evaluate(&prog, &b).unwrap().is_identity());
    let t = evaluate_str("trans(t)", &Env::new(), &b).unwrap();
    assert_eq!(t, Element::Lift(LiftMap::translation(&ZTau::tau())));
    let c = evaluate_str("comm(g, g)", &env_with("g"), &b).unwrap();
    assert!(c.is_identity());
}

fn env_with(name: &str) -> Env {
    let mut env = Env::new();
    env.insert(name.into(), torsion());
    env
}

#[test]
fn composition_reads_left_to_right() {
    let b = Budgets::default();
    let mut env = Env::new();
    let f = random_element(3, 3, RandomFlavor::Ttau);
    let g = random_element(4, 3, RandomFlavor::Ttau);
    env.insert("f".into(), f.clone());
    env.insert("g".into(), g.clone());
    let fg = evaluate_str("f * g", &env, &b).unwrap().to_circle().unwrap();
    let (f, g) = (f.to_circle().unwrap(), g.to_circle().unwrap());
    let x = ftau::ring::QTau::from(tau_pow(3));
    assert_eq!(fg.eval(&x), g.eval(&f.eval(&x)));
}

#[test]
fn syntax_errors_carry_positions() {
    match parse("let g = rot(t);\ncomm(g,, g)") {
        Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 8)),
        other => panic!("{other:?}"),
    }
    match parse("rot(t") {
        Err(Error::Syntax { line: 1, col, .. }) => assert_eq!(col, 6),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse(""), Err(Error::Syntax { .. })));
    assert!(matches!(parse("rot(t) rot(t)"), Err(Error::Syntax { .. })));
    assert!(matches!(parse("let rot = t; rot"), Err(Error::Syntax { .. })));
}

#[test]
fn type_errors() {
    let b = Budgets::default();
    let e = Env::new();
    for text in ["rot(t) * trans(t)", "lift(rot(t), 0) * rot(t)", "comm(trans(t), rot(t))"] {
        assert!(
            matches!(evaluate_str(text, &e, &b), Err(Error::Type(_))),
            "{text}"
        );
    }
    assert!(evaluate_str("nope", &e, &b).is_err());
}

#[test]
fn torsion_document_round_trip() {
    let c = torsion();
    let doc = element_document(&c);
    assert_eq!(doc["kind"], "circle");
    assert_eq!(element_from_document(&doc).unwrap(), c);
    let text = serialize_element(&c);
    assert_eq!(deserialize_element(&text).unwrap(), c);
}

fn z(a: i64) -> Value {
    json!({"a": a.to_string(), "b": "0"})
}

fn half(a: i64) -> Value {
    json!({"a": a.to_string(), "b": "0", "d": "2"})
}

#[test]
fn tampered_slope_is_rejected() {
    let doc = json!({
        "v": 1,
        "kind": "plmap",
        "element": {"xs": [z(0), z(1)], "ys": [z(0), z(2)]}
    });
    match element_from_document(&doc) {
        Err(Error::Validation(inner)) => assert!(matches!(*inner, Error::NotTauPower(0))),
        other => panic!("{other:?}"),
    }
    let c = torsion();
    let mut doc = element_document(&c);
    doc["element"]["ks"][0] = json!("2");
    assert!(matches!(element_from_document(&doc), Err(Error::Validation(_))));
}

#[test]
fn schema_errors() {
    assert!(matches!(deserialize_element(""), Err(Error::Schema(_))));
    assert!(matches!(deserialize_element("   \n"), Err(Error::Schema(_))));
    assert!(matches!(deserialize_element("{"), Err(Error::Schema(_))));
    assert!(matches!(deserialize_element("[]"), Err(Error::Schema(_))));
    let mut doc = element_document(&torsion());
    doc["v"] = json!(2);
    assert!(matches!(element_from_document(&doc), Err(Error::Schema(_))));
    // a circle document whose base value is 1/2 is not an element of the group
    let doc = json!({
        "v": 1,
        "kind": "circle",
        "element": {"xs": [z(0), half(1), z(1)], "ys": [half(1), z(1), half(3)], "v": half(1)}
    });
    assert!(element_from_document(&doc).is_err());
}

#[test]
fn certificate_round_trip() {
    let b = Budgets::default();
    let t = |k| tau_pow(k);
    let certs: Vec<Certificate> = vec![
        connect_tuple_derived(&[t(2)], &[t(3)]).unwrap().into(),
        factor_local(&torsion().to_circle().unwrap(), &b).unwrap().into(),
        defect_witness(2, &b).unwrap().into(),
    ];
    for c in certs {
        let doc = c.to_json();
        let text = canonical(&doc);
        let back = Certificate::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, c);
        back.check(&b).unwrap();
    }
}
