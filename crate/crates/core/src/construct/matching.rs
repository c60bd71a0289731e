//! Interval matching, tuple transitivity and proximal shrinking.

use crate::circle::{c_from_interval_map, lift_eval_ztau, CircleMap};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::plmap::{pl_compose, pl_inverse, PLMap};
use crate::ring::{is_tau_power, tau_exponent_floor, tau_pow, QTau, ZTau};

use super::cert::TransitivityCertificate;
use super::{arc_contains, chart_point, from_chart};

/// Hard stop for the expansions below; the greedy expansion is finite for
/// every positive element of `Z[tau]` but its length is not bounded a priori.
const MAX_TERMS: usize = 1 << 14;

/// Greedy expansion `len = sum tau^k`, exponents nondecreasing.
fn tau_expansion(len: &ZTau) -> Result<Vec<i64>> {
    let mut rem = len.clone();
    let mut out = Vec::new();
    while !rem.is_zero() {
        if out.len() == MAX_TERMS {
            return Err(Error::SearchBudgetExceeded(format!(
                "tau-expansion of {len} has more than {MAX_TERMS} terms"
            )));
        }
        let k = tau_exponent_floor(&rem);
        rem = &rem - &tau_pow(k);
        out.push(k);
    }
    Ok(out)
}

/// Splits the longest piece `tau^k = tau^(k+1) + tau^(k+2)` until `v` has `n` terms.
fn refine(v: &mut Vec<i64>, n: usize) {
    while v.len() < n {
        let k = v.remove(0);
        v.push(k + 1);
        v.push(k + 2);
        v.sort_unstable();
    }
}

/// An element of the matching groupoid sending `[a, b]` onto `[c, d]`.
///
/// Linear when the length ratio is a power of `tau`. Otherwise both lengths
/// are written as sums of powers of `tau`, the longest pieces are subdivided
/// until the counts agree, and pieces are matched in order.
pub fn match_intervals(a: &ZTau, b: &ZTau, c: &ZTau, d: &ZTau) -> Result<PLMap> {
    if a >= b || c >= d {
        return Err(Error::NonPositive);
    }
    let l1 = b - a;
    let l2 = d - c;
    let ratio = QTau::from(&l2).checked_div(&QTau::from(&l1))?;
    if let Some(k) = is_tau_power(&ratio)? {
        return Ok(PLMap::linear(a.clone(), &l1, c.clone(), k));
    }
    let mut p = tau_expansion(&l1)?;
    let mut q = tau_expansion(&l2)?;
    let n = p.len().max(q.len());
    refine(&mut p, n);
    refine(&mut q, n);
    let mut xs = vec![a.clone()];
    let mut ys = vec![c.clone()];
    let mut ks = Vec::with_capacity(n);
    for (ep, eq) in p.iter().zip(&q) {
        xs.push(xs.last().unwrap() + &tau_pow(*ep));
        ys.push(ys.last().unwrap() + &tau_pow(*eq));
        ks.push(eq - ep);
    }
    PLMap::new(xs, ys, ks)
}

pub(crate) fn check_tuple(xs: &[ZTau], lo: &ZTau, hi: &ZTau) -> Result<()> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadTuple("entries must be strictly increasing".into()));
    }
    if let (Some(first), Some(last)) = (xs.first(), xs.last()) {
        if first <= lo || last >= hi {
            return Err(Error::BadTuple(format!("entries must lie in ({lo}, {hi})")));
        }
    }
    Ok(())
}

/// A map of `[lo, hi]` onto itself with `xs[i] -> ys[i]`, one matching per gap.
pub(crate) fn connect_on(lo: &ZTau, hi: &ZTau, xs: &[ZTau], ys: &[ZTau]) -> Result<PLMap> {
    if xs.len() != ys.len() {
        return Err(Error::BadTuple(format!(
            "tuples have lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    check_tuple(xs, lo, hi)?;
    check_tuple(ys, lo, hi)?;
    let px: Vec<&ZTau> = std::iter::once(lo).chain(xs).chain([hi]).collect();
    let py: Vec<&ZTau> = std::iter::once(lo).chain(ys).chain([hi]).collect();
    let mut out: Option<PLMap> = None;
    for i in 0..px.len() - 1 {
        let piece = match_intervals(px[i], px[i + 1], py[i], py[i + 1])?;
        out = Some(match out {
            None => piece,
            Some(acc) => acc.concat(&piece)?,
        });
    }
    Ok(out.expect("at least one gap"))
}

pub fn connect_tuple(xs: &[ZTau], ys: &[ZTau]) -> Result<TransitivityCertificate> {
    let g = connect_on(&ZTau::zero(), &ZTau::one(), xs, ys)?;
    let cert = TransitivityCertificate {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        element: g,
        commutator: None,
    };
    cert.check()?;
    Ok(cert)
}

/// Smallest `k >= 1` with `tau^k < min` and `1 - tau^k > max`.
fn padding_exponent(min: &ZTau, max: &ZTau) -> i64 {
    let one = ZTau::one();
    let k1 = tau_exponent_floor(min) + 1;
    let k2 = tau_exponent_floor(&(&one - max)) + 1;
    k1.max(k2).max(1)
}

/// [`connect_on`] after adding `tau^k` and `1 - tau^k` to both tuples, so the
/// result is the identity near `0` and `1`.
pub(crate) fn connect_padded(xs: &[ZTau], ys: &[ZTau]) -> Result<PLMap> {
    let one = ZTau::one();
    let (min, max) = match (xs.first(), ys.first(), xs.last(), ys.last()) {
        (Some(a), Some(b), Some(c), Some(d)) => (a.min(b), c.max(d)),
        _ => return Ok(PLMap::identity()),
    };
    let k = padding_exponent(min, max);
    let (a, b) = (tau_pow(k), &one - &tau_pow(k));
    let pad = |v: &[ZTau]| -> Vec<ZTau> {
        std::iter::once(a.clone())
            .chain(v.iter().cloned())
            .chain([b.clone()])
            .collect()
    };
    connect_on(&ZTau::zero(), &one, &pad(xs), &pad(ys))
}

/// Points at fractions `tau^2` and `tau` of the way across `(lo, hi)`.
fn inner_points(lo: &ZTau, hi: &ZTau) -> (ZTau, ZTau) {
    let len = hi - lo;
    (lo + &(&tau_pow(2) * &len), lo + &(&tau_pow(1) * &len))
}

/// `xs -> ys` by a single commutator `[l, f]` of elements supported away
/// from `0` and `1`.
///
/// With `a = tau^k < min` and `b = 1 - tau^k > max`, `f` fixes `[0, a]` and
/// `[b, 1]` and sends `xs` to `ys`; `l` pushes `[a, b]` into `(b, 1)`. A point
/// of `[a, b]` is first pulled by `l^-1` below `a`, where `f` is trivial, so
/// `[l, f]` agrees with `f` on `[a, b]`.
pub fn connect_tuple_derived(xs: &[ZTau], ys: &[ZTau]) -> Result<TransitivityCertificate> {
    let one = ZTau::one();
    if xs.len() != ys.len() {
        return Err(Error::BadTuple(format!(
            "tuples have lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    check_tuple(xs, &ZTau::zero(), &one)?;
    check_tuple(ys, &ZTau::zero(), &one)?;
    let f = connect_padded(xs, ys)?;
    let (a, b) = match (xs.first(), ys.first(), xs.last(), ys.last()) {
        (Some(x0), Some(y0), Some(x1), Some(y1)) => {
            let k = padding_exponent(x0.min(y0), x1.max(y1));
            (tau_pow(k), &one - &tau_pow(k))
        }
        _ => (tau_pow(2), tau_pow(1)),
    };
    let b2 = &one - &tau_pow(tau_exponent_floor(&(&one - &b)) + 1);
    let (t1, t2) = inner_points(&b, &b2);
    let l = connect_padded(&[a, b], &[t1, t2])?;
    let li = pl_inverse(&l);
    let fi = pl_inverse(&f);
    let g = pl_compose(&pl_compose(&pl_compose(&li, &fi)?, &l)?, &f)?;
    let cert = TransitivityCertificate {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        element: g,
        commutator: Some((l, f)),
    };
    cert.check()?;
    Ok(cert)
}

/// Where [`proximal_shrink`] works.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// `F_tau` acting on `(0, 1)`.
    Interval,
    /// `T_tau` acting on the circle; arcs are given in lift coordinates.
    Circle,
}

/// An element sending the closed interval `j` into the open interval `i`.
pub fn proximal_shrink(j: (&ZTau, &ZTau), i: (&ZTau, &ZTau), ambient: Ambient) -> Result<Element> {
    match ambient {
        Ambient::Interval => shrink_interval(j, i).map(Element::Interval),
        Ambient::Circle => shrink_circle(j, i).map(Element::Circle),
    }
}

fn shrink_interval(j: (&ZTau, &ZTau), i: (&ZTau, &ZTau)) -> Result<PLMap> {
    let zero = ZTau::zero();
    let one = ZTau::one();
    if j.0 >= j.1 || j.0 <= &zero || j.1 >= &one {
        return Err(Error::BadTuple("J must be a closed interval inside (0, 1)".into()));
    }
    if i.0 >= i.1 || i.0 < &zero || i.1 > &one {
        return Err(Error::NoRoomInTarget(format!("({}, {})", i.0, i.1)));
    }
    let f = if i.0 < j.0 && j.1 < i.1 {
        PLMap::identity()
    } else {
        let (t1, t2) = inner_points(i.0, i.1);
        connect_on(&zero, &one, &[j.0.clone(), j.1.clone()], &[t1, t2])?
    };
    let (y0, y1) = (f.eval_ztau(j.0)?, f.eval_ztau(j.1)?);
    if !(i.0 < &y0 && &y1 < i.1) {
        return Err(Error::Certificate("image of J leaves I".into()));
    }
    Ok(f)
}

fn shrink_circle(j: (&ZTau, &ZTau), i: (&ZTau, &ZTau)) -> Result<CircleMap> {
    let one = ZTau::one();
    let jl = j.1 - j.0;
    let il = i.1 - i.0;
    if jl.is_negative() || jl >= one {
        return Err(Error::BadTuple("J must be a proper closed arc".into()));
    }
    if !il.is_positive() || il > one {
        return Err(Error::NoRoomInTarget(format!("({}, {})", i.0, i.1)));
    }
    // chart at a point z off J
    let gap = &one - &jl;
    let z = j.1 + &(&tau_pow(1) * &gap);
    let jc0 = chart_point(j.0, &z);
    let jc1 = &jc0 + &jl;
    let ic0 = chart_point(i.0, &z);
    let ic1 = &ic0 + &il;
    let (lo, hi) = if ic1 <= one {
        (ic0, ic1)
    } else if &one - &ic0 >= &ic1 - &one {
        (ic0, one.clone())
    } else {
        (ZTau::zero(), &ic1 - &one)
    };
    let f0 = shrink_interval((&jc0, &jc1), (&lo, &hi))?;
    let f = from_chart(&c_from_interval_map(&f0)?, &z);
    if !maps_arc_into(&f, j, i) {
        return Err(Error::Certificate("image of J leaves I".into()));
    }
    Ok(f)
}

/// Whether `f` sends the closed arc `j` into the open arc `i`.
pub(crate) fn maps_arc_into(f: &CircleMap, j: (&ZTau, &ZTau), i: (&ZTau, &ZTau)) -> bool {
    let y0 = lift_eval_ztau(f.table(), j.0);
    let y1 = lift_eval_ztau(f.table(), j.1);
    let il = i.1 - i.0;
    let s = (&y0 - i.0).fract();
    let e = &s + &(&y1 - &y0);
    s.is_positive() && e < il && arc_contains(i.0, i.1, &y0)
}
