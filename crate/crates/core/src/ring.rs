//! Exact arithmetic in `Z[tau]` and its fraction field `Q(tau)`.
//!
//! `tau = (sqrt(5) - 1) / 2` is the positive root of `x^2 + x - 1`. Every
//! element is stored as integer coordinates in the basis `{1, tau}`, so
//! equality is structural and no reduction step is ever needed. Floating
//! point is only used to produce hints, and every hint is checked exactly.
//!
//! The multiplication, norm, conjugate, sign and floor formulas are written
//! for the general minimal polynomial `x^2 + n x - 1`; only `n = 1` is used.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Rational numbers (rotation numbers, enclosure endpoints).
pub type Rational = BigRational;

/// `n` in the minimal polynomial `x^2 + n x - 1`.
const METALLIC: i64 = 1;
/// Discriminant `n^2 + 4`.
const DISC: i64 = METALLIC * METALLIC + 4;

const TAU_F64: f64 = 0.618_033_988_749_894_8;

/// An element `a + b tau` of `Z[tau]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ZTau {
    a: BigInt,
    b: BigInt,
}

impl ZTau {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        ZTau {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn zero() -> Self {
        ZTau::default()
    }

    pub fn one() -> Self {
        ZTau::new(1, 0)
    }

    pub fn tau() -> Self {
        ZTau::new(0, 1)
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        ZTau::new(n, 0)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// `Some(n)` when the element is the integer `n`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.b.is_zero().then_some(&self.a)
    }

    /// Sign of the real number `a + b tau`, decided in integer arithmetic.
    ///
    /// `a + b tau = (u + v sqrt(D)) / 2` with `u = 2a - n b`, `v = b`; when `u`
    /// and `v` disagree in sign the answer comes from comparing `u^2` with `D v^2`.
    pub fn sign(&self) -> i8 {
        let u: BigInt = BigInt::from(2) * &self.a - BigInt::from(METALLIC) * &self.b;
        let v = &self.b;
        let su = sign_of(&u);
        let sv = sign_of(v);
        if sv == 0 {
            return su;
        }
        if su == 0 || su == sv {
            return sv;
        }
        let lhs = &u * &u;
        let rhs = BigInt::from(DISC) * v * v;
        // u and v have opposite signs; the sign of u wins iff u^2 > D v^2
        match lhs.cmp(&rhs) {
            Ordering::Greater => su,
            Ordering::Less => sv,
            Ordering::Equal => unreachable!("sqrt(D) is irrational"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> ZTau {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Field norm `N(a + b tau) = a^2 - n a b - b^2`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(METALLIC) * &self.a * &self.b - &self.b * &self.b
    }

    /// Galois conjugate, sending `tau` to the other root `-n - tau`.
    pub fn conjugate(&self) -> ZTau {
        ZTau {
            a: &self.a - BigInt::from(METALLIC) * &self.b,
            b: -&self.b,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// Greatest integer `n <= a + b tau`.
    pub fn floor(&self) -> BigInt {
        // floor(b tau) = floor_div(floor(b sqrt(D)) - n b, 2) because b sqrt(D)
        // is irrational for b != 0.
        let fl = if self.b.is_zero() {
            self.a.clone()
        } else {
            let sq = (BigInt::from(DISC) * &self.b * &self.b).sqrt();
            let root_floor = if self.b.is_positive() {
                sq
            } else {
                -sq - 1
            };
            let t = root_floor - BigInt::from(METALLIC) * &self.b;
            &self.a + t.div_floor(&BigInt::from(2))
        };
        debug_assert!((self - &ZTau::int(fl.clone())).sign() >= 0);
        debug_assert!((self - &ZTau::int(&fl + 1)).sign() < 0);
        fl
    }

    /// Fractional part, in `[0, 1)`.
    pub fn fract(&self) -> ZTau {
        self - &ZTau::int(self.floor())
    }

    pub fn pow(&self, mut e: u64) -> ZTau {
        let mut base = self.clone();
        let mut acc = ZTau::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rough `log2 |x|`, for hints only. `None` for zero.
    pub fn approx_log2(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa * sb >= 0 {
            return Some(log2_sum(&self.a, &self.b, TAU_F64));
        }
        // Cancellation in a + b tau: use |x| = |N| / |conj|, where the
        // conjugate a - b / tau has no cancellation.
        let n = self.norm();
        let conj = log2_sum(&self.a, &(-&self.b), 1.0 / TAU_F64);
        Some(log2_big(&n) - conj)
    }

    /// Approximate value; loses precision for huge coefficients.
    pub fn to_f64(&self) -> f64 {
        match self.approx_log2() {
            None => 0.0,
            Some(l) => self.sign() as f64 * l.exp2(),
        }
    }

    /// Always-explicit text form `a+b*t`, e.g. `0+1*t`, `2-3*t`.
    pub fn full_form(&self) -> String {
        if self.b.is_negative() {
            format!("{}-{}*t", self.a, -&self.b)
        } else {
            format!("{}+{}*t", self.a, self.b)
        }
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn log2_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap_or(f64::MAX).abs().log2()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap_or(f64::MAX).abs().log2() + shift as f64
    }
}

/// `log2 |x + y * c|` for `x`, `y` of equal sign (or zero) and `c > 0`.
fn log2_sum(x: &BigInt, y: &BigInt, c: f64) -> f64 {
    let bits = x.bits().max(y.bits());
    let shift = bits.saturating_sub(900);
    let xf = (x >> shift).to_f64().unwrap_or(0.0).abs();
    let yf = (y >> shift).to_f64().unwrap_or(0.0).abs();
    (xf + yf * c).log2() + shift as f64
}

impl PartialOrd for ZTau {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ZTau {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl<'a> Add<&'a ZTau> for &'a ZTau {
    type Output = ZTau;
    fn add(self, rhs: &ZTau) -> ZTau {
        ZTau {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl<'a> Sub<&'a ZTau> for &'a ZTau {
    type Output = ZTau;
    fn sub(self, rhs: &ZTau) -> ZTau {
        ZTau {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl<'a> Mul<&'a ZTau> for &'a ZTau {
    type Output = ZTau;
    fn mul(self, rhs: &ZTau) -> ZTau {
        // tau^2 = 1 - n tau
        let bb = &self.b * &rhs.b;
        ZTau {
            a: &self.a * &rhs.a + &bb,
            b: &self.a * &rhs.b + &rhs.a * &self.b - BigInt::from(METALLIC) * bb,
        }
    }
}

impl Neg for &ZTau {
    type Output = ZTau;
    fn neg(self) -> ZTau {
        ZTau {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for ZTau {
    type Output = ZTau;
    fn neg(self) -> ZTau {
        ZTau {
            a: -self.a,
            b: -self.b,
        }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<$ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(ZTau, Add, add);
forward_owned!(ZTau, Sub, sub);
forward_owned!(ZTau, Mul, mul);

impl From<i64> for ZTau {
    fn from(n: i64) -> Self {
        ZTau::int(n)
    }
}

impl From<BigInt> for ZTau {
    fn from(n: BigInt) -> Self {
        ZTau::int(n)
    }
}

/// Which arithmetic operation [`zt_arith`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    /// Negates `x`; `y` is ignored.
    Neg,
}

pub fn zt_arith(op: RingOp, x: &ZTau, y: &ZTau) -> ZTau {
    match op {
        RingOp::Add => x + y,
        RingOp::Sub => x - y,
        RingOp::Mul => x * y,
        RingOp::Neg => -x,
    }
}

const POW_TABLE_RADIUS: i64 = 256;

static POW_TABLE: LazyLock<Vec<ZTau>> = LazyLock::new(|| {
    let r = POW_TABLE_RADIUS as usize;
    let mut table = vec![ZTau::zero(); 2 * r + 1];
    table[r] = ZTau::one();
    // tau^{n+1} = b_n + (a_n - n b_n) tau
    for i in 1..=r {
        let prev = &table[r + i - 1];
        table[r + i] = ZTau::new(
            prev.b.clone(),
            &prev.a - BigInt::from(METALLIC) * &prev.b,
        );
    }
    let inv = tau_inverse();
    for i in 1..=r {
        table[r - i] = &table[r - i + 1] * &inv;
    }
    table
});

/// `tau^{-1} = n + tau`.
fn tau_inverse() -> ZTau {
    ZTau::new(METALLIC, 1)
}

/// Exact `tau^k` for any integer `k`.
pub fn tau_pow(k: i64) -> ZTau {
    if k.abs() <= POW_TABLE_RADIUS {
        return POW_TABLE[(k + POW_TABLE_RADIUS) as usize].clone();
    }
    if k > 0 {
        ZTau::tau().pow(k as u64)
    } else {
        tau_inverse().pow(k.unsigned_abs())
    }
}

/// Largest `k` with `tau^k <= x`, i.e. `tau^k <= x < tau^{k-1}`. `x` must be positive.
pub fn tau_exponent_floor(x: &ZTau) -> i64 {
    debug_assert!(x.is_positive());
    let l = x.approx_log2().expect("positive");
    let mut k = (l / TAU_F64.log2()).ceil() as i64;
    // exact correction of the float hint
    while &tau_pow(k) > x {
        k += 1;
    }
    while &tau_pow(k - 1) <= x {
        k -= 1;
    }
    k
}

/// `Some(k)` when `x = tau^k`.
pub fn is_tau_power(x: &QTau) -> Result<Option<i64>> {
    if x.sign() <= 0 {
        return Err(Error::NonPositive);
    }
    if !x.den.is_one() || !x.num.is_unit() {
        return Ok(None);
    }
    let u = &x.num;
    let hint = u.approx_log2().expect("nonzero") / TAU_F64.log2();
    let mut k = hint.round() as i64;
    let tau = ZTau::tau();
    let inv = tau_inverse();
    let mut w = u * &tau_pow(-k);
    // walk w into (tau, 1]; the hint is within a few steps of the answer
    let slack = 16 + (hint.abs() as u64) / 8;
    for _ in 0..slack {
        if w > ZTau::one() {
            w = &w * &tau;
            k += 1;
        } else if w <= tau {
            w = &w * &inv;
            k -= 1;
        } else {
            break;
        }
    }
    Ok(w.is_one().then_some(k))
}

impl fmt::Display for ZTau {
    /// Short form: `t`, `1-t`, `-1+2*t`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !self.a.is_zero() || self.b.is_zero() {
            out.push_str(&self.a.to_string());
        }
        if !self.b.is_zero() {
            let mag = self.b.abs();
            if self.b.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push('t');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for ZTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZTau({})", self)
    }
}

/// Parses `a+b*t` style literals; both terms optional, any order.
impl FromStr for ZTau {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty ring literal".into());
        }
        let bytes = s.as_bytes();
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        let (mut seen_a, mut seen_b) = (false, false);
        let mut i = 0;
        while i < bytes.len() {
            let mut neg = false;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                neg = bytes[i] == b'-';
                i += 1;
            } else if i > 0 {
                return Err(format!("expected sign at offset {i} in {s:?}"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &s[start..i];
            let is_t = if i < bytes.len() && bytes[i] == b'*' {
                if digits.is_empty() || i + 1 >= bytes.len() || bytes[i + 1] != b't' {
                    return Err(format!("malformed term in {s:?}"));
                }
                i += 2;
                true
            } else if i < bytes.len() && bytes[i] == b't' {
                if !digits.is_empty() {
                    return Err(format!("missing '*' before t in {s:?}"));
                }
                i += 1;
                true
            } else {
                if digits.is_empty() {
                    return Err(format!("malformed term in {s:?}"));
                }
                false
            };
            let mut coeff: BigInt = if digits.is_empty() {
                BigInt::one()
            } else {
                digits.parse().map_err(|_| format!("bad integer in {s:?}"))?
            };
            if neg {
                coeff = -coeff;
            }
            if is_t {
                if seen_b {
                    return Err(format!("repeated t term in {s:?}"));
                }
                seen_b = true;
                b = coeff;
            } else {
                if seen_a {
                    return Err(format!("repeated constant term in {s:?}"));
                }
                seen_a = true;
                a = coeff;
            }
        }
        Ok(ZTau { a, b })
    }
}

#[derive(Serialize, Deserialize)]
struct ZTauRepr {
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<String>,
}

impl Serialize for ZTau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZTauRepr {
            a: self.a.to_string(),
            b: self.b.to_string(),
            d: None,
        }
        .serialize(s)
    }
}

fn parse_big<E: serde::de::Error>(s: &str) -> std::result::Result<BigInt, E> {
    s.parse()
        .map_err(|_| E::custom(format!("invalid decimal integer {s:?}")))
}

impl<'de> Deserialize<'de> for ZTau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ZTauRepr::deserialize(d)?;
        if r.d.is_some() {
            return Err(serde::de::Error::custom("denominator not allowed here"));
        }
        Ok(ZTau::new(parse_big::<D::Error>(&r.a)?, parse_big::<D::Error>(&r.b)?))
    }
}

/// An element `(a + b tau) / d` of `Q(tau)` in lowest terms with `d > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QTau {
    num: ZTau,
    den: BigInt,
}

impl QTau {
    pub fn new(num: ZTau, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QTau::canonical(num, den))
    }

    fn canonical(mut num: ZTau, mut den: BigInt) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.a.gcd(&num.b).gcd(&den);
        if !g.is_one() && !g.is_zero() {
            num.a /= &g;
            num.b /= &g;
            den /= &g;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        QTau { num, den }
    }

    pub fn from_rational(r: &Rational) -> Self {
        QTau::canonical(ZTau::int(r.numer().clone()), r.denom().clone())
    }

    pub fn zero() -> Self {
        QTau::from(ZTau::zero())
    }

    pub fn one() -> Self {
        QTau::from(ZTau::one())
    }

    pub fn num(&self) -> &ZTau {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// The element as a ring element, if the denominator is one.
    pub fn as_ztau(&self) -> Option<&ZTau> {
        self.den.is_one().then_some(&self.num)
    }

    /// The element as a rational, if it has no `tau` part.
    pub fn as_rational(&self) -> Option<Rational> {
        self.num
            .b
            .is_zero()
            .then(|| Rational::new(self.num.a.clone(), self.den.clone()))
    }

    pub fn sign(&self) -> i8 {
        self.num.sign()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn abs(&self) -> QTau {
        QTau {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn floor(&self) -> BigInt {
        self.num.floor().div_floor(&self.den)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Reduction into `[0, 1)`.
    pub fn fract(&self) -> QTau {
        self - &QTau::from(ZTau::int(self.floor()))
    }

    pub fn scale_int(&self, k: &BigInt) -> QTau {
        QTau::canonical(
            ZTau::new(&self.num.a * k, &self.num.b * k),
            self.den.clone(),
        )
    }

    /// Product with a ring element, staying canonical.
    pub fn mul_ztau(&self, z: &ZTau) -> QTau {
        QTau::canonical(&self.num * z, self.den.clone())
    }

    pub fn add_ztau(&self, z: &ZTau) -> QTau {
        let scaled = ZTau::new(&z.a * &self.den, &z.b * &self.den);
        QTau::canonical(&self.num + &scaled, self.den.clone())
    }

    /// Compare against a ring element without building a fraction.
    pub fn cmp_ztau(&self, z: &ZTau) -> Ordering {
        let scaled = ZTau::new(&z.a * &self.den, &z.b * &self.den);
        (&self.num - &scaled).sign().cmp(&0)
    }

    pub fn checked_div(&self, rhs: &QTau) -> Result<QTau> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x / y = x conj(y) / N(y)
        let n = rhs.num.norm();
        let num = &(&self.num * &rhs.num.conjugate()) * &ZTau::int(rhs.den.clone());
        Ok(QTau::canonical(num, &self.den * n))
    }

    pub fn to_f64(&self) -> f64 {
        match self.num.approx_log2() {
            None => 0.0,
            Some(l) => self.num.sign() as f64 * (l - log2_big(&self.den)).exp2(),
        }
    }
}

pub fn qt_div(x: &QTau, y: &QTau) -> Result<QTau> {
    x.checked_div(y)
}

pub fn zt_sign(x: &ZTau) -> i8 {
    x.sign()
}

pub fn zt_norm(x: &ZTau) -> BigInt {
    x.norm()
}

pub fn zt_floor(x: &ZTau) -> BigInt {
    x.floor()
}

impl From<ZTau> for QTau {
    fn from(z: ZTau) -> Self {
        QTau {
            num: z,
            den: BigInt::one(),
        }
    }
}

impl From<&ZTau> for QTau {
    fn from(z: &ZTau) -> Self {
        QTau::from(z.clone())
    }
}

impl PartialOrd for QTau {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QTau {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num.clone() * ZTau::int(other.den.clone());
        let r = other.num.clone() * ZTau::int(self.den.clone());
        (l - r).sign().cmp(&0)
    }
}

impl<'a> Add<&'a QTau> for &'a QTau {
    type Output = QTau;
    fn add(self, rhs: &QTau) -> QTau {
        let l = &self.num * &ZTau::int(rhs.den.clone());
        let r = &rhs.num * &ZTau::int(self.den.clone());
        QTau::canonical(l + r, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a QTau> for &'a QTau {
    type Output = QTau;
    fn sub(self, rhs: &QTau) -> QTau {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a QTau> for &'a QTau {
    type Output = QTau;
    fn mul(self, rhs: &QTau) -> QTau {
        QTau::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &QTau {
    type Output = QTau;
    fn neg(self) -> QTau {
        QTau {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for QTau {
    type Output = QTau;
    fn neg(self) -> QTau {
        -&self
    }
}

forward_owned!(QTau, Add, add);
forward_owned!(QTau, Sub, sub);
forward_owned!(QTau, Mul, mul);

impl fmt::Display for QTau {
    /// `(a+b*t)/d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/{}", self.num.full_form(), self.den)
    }
}

impl fmt::Debug for QTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QTau{}", self)
    }
}

/// Accepts `(a+b*t)/d` or a bare ring literal.
impl FromStr for QTau {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let close = rest.find(')').ok_or("missing ')'")?;
            let num: ZTau = rest[..close].parse()?;
            let tail = rest[close + 1..].trim();
            let den: BigInt = match tail.strip_prefix('/') {
                Some(d) => d.trim().parse().map_err(|_| format!("bad denominator {d:?}"))?,
                None if tail.is_empty() => BigInt::one(),
                None => return Err(format!("unexpected {tail:?}")),
            };
            QTau::new(num, den).map_err(|e| e.to_string())
        } else {
            Ok(QTau::from(s.parse::<ZTau>()?))
        }
    }
}

impl Serialize for QTau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZTauRepr {
            a: self.num.a.to_string(),
            b: self.num.b.to_string(),
            d: (!self.den.is_one()).then(|| self.den.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QTau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ZTauRepr::deserialize(d)?;
        let num = ZTau::new(parse_big::<D::Error>(&r.a)?, parse_big::<D::Error>(&r.b)?);
        let den = match r.d {
            Some(d) => parse_big::<D::Error>(&d)?,
            None => BigInt::one(),
        };
        QTau::new(num, den).map_err(serde::de::Error::custom)
    }
}

/// `[floor(den x)/den, ceil(den x)/den]`, a rational bracket around `x`.
pub fn rational_bracket(x: &QTau, den: u64) -> (Rational, Rational) {
    let d = BigInt::from(den);
    let scaled = x.scale_int(&d);
    let lo = scaled.floor();
    let hi = scaled.ceil();
    (Rational::new(lo, d.clone()), Rational::new(hi, d))
}
