use ftau::ring::{is_tau_power, qt_div, tau_exponent_floor, tau_pow, zt_arith, QTau, RingOp, ZTau};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed};
use proptest::prelude::*;

mod common;
use common::{fib_tau_pow, oracle_floor, oracle_sign, tau_scaled};

fn big(bits: u64) -> impl Strategy<Value = BigInt> {
    let words = bits.div_ceil(32) as usize;
    (any::<bool>(), prop::collection::vec(any::<u32>(), 0..=words)).prop_map(|(neg, w)| {
        let m = BigInt::from_slice(Sign::Plus, &w);
        if neg {
            -m
        } else {
            m
        }
    })
}

fn ztau(bits: u64) -> impl Strategy<Value = ZTau> {
    (big(bits), big(bits)).prop_map(|(a, b)| ZTau::new(a, b))
}

fn small() -> impl Strategy<Value = ZTau> {
    (-1_000_000_000i64..=1_000_000_000, -1_000_000_000i64..=1_000_000_000)
        .prop_map(|(a, b)| ZTau::new(a, b))
}

fn qtau() -> impl Strategy<Value = QTau> {
    (ztau(96), 1i64..10_000).prop_map(|(z, d)| QTau::new(z, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_laws(x in ztau(256), y in ztau(256), z in ztau(256)) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        prop_assert_eq!(zt_arith(RingOp::Neg, &x, &y), zt_arith(RingOp::Sub, &ZTau::zero(), &x));
        prop_assert_eq!(zt_arith(RingOp::Mul, &x, &ZTau::one()), x.clone());
    }

    #[test]
    fn sign_matches_decimal_oracle(x in small()) {
        prop_assert_eq!(x.sign(), oracle_sign(&x));
    }

    #[test]
    fn floor_brackets(x in small()) {
        let f = x.floor();
        prop_assert!((&x - &ZTau::int(f.clone())).sign() >= 0);
        prop_assert!((&x - &ZTau::int(&f + 1)).sign() < 0);
        prop_assert_eq!(f, oracle_floor(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn sign_and_floor_large(x in ztau(100)) {
        prop_assert_eq!(x.sign(), oracle_sign(&x));
        prop_assert_eq!(x.floor(), oracle_floor(&x));
    }

    #[test]
    fn order_is_compatible(x in ztau(128), y in ztau(128), z in ztau(128)) {
        prop_assert_eq!(x < y, (&y - &x).sign() > 0);
        prop_assert_eq!(x < y, &x + &z < &y + &z);
        if z.sign() > 0 {
            prop_assert_eq!(x < y, &x * &z < &y * &z);
        }
    }

    #[test]
    fn norm_and_conjugate(x in ztau(128), y in ztau(128)) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x * &y).conjugate(), &x.conjugate() * &y.conjugate());
        prop_assert_eq!((&x + &y).conjugate(), &x.conjugate() + &y.conjugate());
        prop_assert_eq!(&x * &x.conjugate(), ZTau::int(x.norm()));
    }

    #[test]
    fn field_operations(x in qtau(), y in qtau()) {
        if !y.is_zero() {
            let q = qt_div(&x, &y).unwrap();
            prop_assert_eq!(&q * &y, x.clone());
        }
        prop_assert!(qt_div(&x, &QTau::zero()).is_err());
        prop_assert!(x.den().is_positive());
        let g = x.num().a().gcd(x.num().b()).gcd(x.den());
        prop_assert!(g.is_one());
        prop_assert!(x.floor() <= x.ceil());
        prop_assert_eq!(x.cmp_ztau(&ZTau::int(x.floor())), if x.fract().is_zero() { std::cmp::Ordering::Equal } else { std::cmp::Ordering::Greater });
    }

    #[test]
    fn text_and_json_round_trip(x in ztau(200), q in qtau()) {
        prop_assert_eq!(x.to_string().parse::<ZTau>().unwrap(), x.clone());
        prop_assert_eq!(x.full_form().parse::<ZTau>().unwrap(), x.clone());
        prop_assert_eq!(q.to_string().parse::<QTau>().unwrap(), q.clone());
        let j = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<ZTau>(&j).unwrap(), x);
        let j = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<QTau>(&j).unwrap(), q);
    }

    #[test]
    fn tau_exponent_floor_brackets(x in ztau(64)) {
        let x = x.abs();
        prop_assume!(!x.is_zero());
        let k = tau_exponent_floor(&x);
        prop_assert!(tau_pow(k) <= x);
        prop_assert!(x < tau_pow(k - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn non_units_are_not_tau_powers(x in ztau(64), d in 1i64..5) {
        let x = x.abs();
        prop_assume!(!x.is_zero() && !x.is_unit());
        prop_assert_eq!(is_tau_power(&QTau::new(x.clone(), d).unwrap()).unwrap(), None);
        prop_assert_eq!(is_tau_power(&QTau::new(x, 1).unwrap()).unwrap(), None);
    }

    #[test]
    fn pow_adds_exponents(m in -300i64..300, n in -300i64..300) {
        prop_assert_eq!(tau_pow(m + n), &tau_pow(m) * &tau_pow(n));
    }
}

#[test]
fn tau_power_table_matches_fibonacci() {
    for k in -40..=40 {
        let t = tau_pow(k);
        assert_eq!(t, fib_tau_pow(k), "tau^{k}");
        assert_eq!(is_tau_power(&QTau::from(t.clone())).unwrap(), Some(k), "tau^{k}");
        assert!(t.sign() > 0);
        assert!(t.is_unit());
    }
}

#[test]
fn inverse_powers() {
    for n in -200..=200 {
        assert!((&tau_pow(n) * &tau_pow(-n)).is_one(), "n = {n}");
    }
    assert_eq!(tau_pow(1), ZTau::tau());
    assert_eq!(tau_pow(-1), ZTau::new(1, 1));
    assert_eq!(tau_pow(2), ZTau::new(1, -1));
}

#[test]
fn negative_units_and_nonpositive_inputs() {
    assert_eq!(is_tau_power(&QTau::from(-ZTau::tau())).ok(), None);
    assert!(is_tau_power(&QTau::zero()).is_err());
    assert_eq!(is_tau_power(&QTau::new(ZTau::one(), 2).unwrap()).unwrap(), None);
    // N(2 + t) = 4 - 2 - 1 = 1
    assert_eq!(is_tau_power(&QTau::from(ZTau::new(2, 1))).unwrap(), Some(-2));
}

#[test]
fn decimal_value_of_tau() {
    let t = tau_scaled().to_string();
    assert!(t.starts_with("6180339887498948482045868343656381177203091798057628621354486227"));
}
