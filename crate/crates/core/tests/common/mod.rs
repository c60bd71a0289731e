//! Oracles shared by the integration tests, independent of the crate's own
//! arithmetic.
#![allow(dead_code)]

use ftau::ring::ZTau;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

/// sqrt(5) to 127 decimals, typed in independently of the crate.
const SQRT5: &str = "2.2360679774997896964091736687312762354406183596115257242708972454105209256378048994144144083787822749695081761507737835042532677";

const DIGITS: u32 = 120;

/// floor(tau * 10^DIGITS), off by at most one.
pub fn tau_scaled() -> BigInt {
    let (int, frac) = SQRT5.split_once('.').unwrap();
    let s: BigInt = format!("{int}{}", &frac[..DIGITS as usize]).parse().unwrap();
    (s - BigInt::from(10).pow(DIGITS)) / 2
}

/// a + b tau scaled by 10^DIGITS. The error is at most |b| + 1, far below
/// the distance from any nonzero element with small coefficients to zero.
pub fn decimal(x: &ZTau) -> BigInt {
    x.a() * BigInt::from(10).pow(DIGITS) + x.b() * tau_scaled()
}

pub fn oracle_sign(x: &ZTau) -> i8 {
    match decimal(x).sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn oracle_floor(x: &ZTau) -> BigInt {
    decimal(x).div_floor(&BigInt::from(10).pow(DIGITS))
}

pub fn fib(n: u32) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// tau^k from Fibonacci numbers: tau^k = (-1)^k (F(k-1) - F(k) tau) for k >= 1,
/// and tau^{-k} = F(k+1) + F(k) tau.
pub fn fib_tau_pow(k: i64) -> ZTau {
    let m = k.unsigned_abs() as u32;
    if k >= 1 {
        let s = if m % 2 == 0 { 1 } else { -1 };
        ZTau::new(fib(m - 1) * s, -fib(m) * s)
    } else {
        ZTau::new(fib(m + 1), fib(m))
    }
}

