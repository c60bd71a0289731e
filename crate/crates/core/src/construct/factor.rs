//! Local factorization `g = u v` with `u` fixing an arc around `x` and `v` a
//! product of commutators of elements fixing a neighbourhood of `y`, and the
//! commutator trick `k = [g, h]` fixing a neighbourhood of a given point.

use crate::circle::{
    c_commutator, c_compose, c_from_interval_map, c_inverse, lift_eval_ztau, lift_window,
    CircleMap,
};
use crate::error::{Error, Result};
use crate::plmap::{pl_compose, pl_inverse, PLMap};
use crate::ring::{tau_pow, ZTau};
use crate::Budgets;

use super::matching::{connect_padded, connect_tuple_derived, match_intervals};
use super::random::{random_element, RandomFlavor};
use super::{arc_contains, arcs_disjoint, candidate_points, chart_point, from_chart, to_chart};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCertificate {
    pub g: CircleMap,
    pub x: ZTau,
    pub y: ZTau,
    /// The arc `[a, b]` around `x`, in lift coordinates.
    pub arc: (ZTau, ZTau),
    /// `f = [l, m]` sends the arc onto its image under `g`.
    pub l: CircleMap,
    pub m: CircleMap,
    /// `g f^-1` on the arc, the identity elsewhere.
    pub h1: CircleMap,
    /// Pulls the arc off itself.
    pub h2: CircleMap,
    pub u: CircleMap,
    pub v: CircleMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrickCertificate {
    pub g: CircleMap,
    pub x: ZTau,
    /// `h` is supported inside this arc, which `g` moves off itself.
    pub arc: (ZTau, ZTau),
    pub h: CircleMap,
    pub k: CircleMap,
}

/// First candidate lying on none of the arcs.
fn first_point_outside(cands: &[ZTau], arcs: &[(&ZTau, &ZTau)]) -> Option<ZTau> {
    cands
        .iter()
        .find(|p| arcs.iter().all(|(lo, hi)| !arc_contains(lo, hi, p)))
        .cloned()
}

/// Restriction of a chart map to `[lo, hi]`, padded by the identity to `[0, 1]`.
/// The map must send `[lo, hi]` onto itself modulo one.
fn patch(gc: &CircleMap, lo: &ZTau, hi: &ZTau) -> Result<PLMap> {
    let win = lift_window(gc.table(), lo);
    let mid = win.restrict(lo, hi)?;
    let n = ZTau::int((mid.range().0 - lo).floor());
    let mid = mid.translate(&ZTau::zero(), &-n);
    if mid.range() != (lo, hi) {
        return Err(Error::Certificate("patched map does not preserve its arc".into()));
    }
    let zero = ZTau::zero();
    let one = ZTau::one();
    let mut out = mid;
    if lo > &zero {
        out = PLMap::identity_on(zero, lo.clone()).concat(&out)?;
    }
    if hi < &one {
        out = out.concat(&PLMap::identity_on(hi.clone(), one))?;
    }
    Ok(out)
}

pub fn factor_local(g: &CircleMap, budgets: &Budgets) -> Result<FactorCertificate> {
    if g.is_identity() {
        return Err(Error::IdentityInput);
    }
    let cands = candidate_points(budgets.search_depth);
    let exhausted = || {
        Error::SearchBudgetExceeded(format!(
            "no admissible points at subdivision depth {}",
            budgets.search_depth
        ))
    };
    let x = cands
        .iter()
        .find(|p| &g.eval_ztau(p) != *p)
        .cloned()
        .ok_or_else(exhausted)?;
    let mut choice = None;
    for e in 2..(budgets.search_depth as i64 + 4) {
        let eps = tau_pow(e);
        let a = &x - &eps;
        let b = &x + &eps;
        let ga = lift_eval_ztau(g.table(), &a);
        let gb = lift_eval_ztau(g.table(), &b);
        if arc_contains(&ga, &gb, &x) {
            continue;
        }
        if let Some(y) = first_point_outside(&cands, &[(&a, &b), (&ga, &gb)]) {
            choice = Some((a, b, ga, gb, y));
            break;
        }
    }
    let (a, b, ga, gb, y) = choice.ok_or_else(exhausted)?;

    // everything below happens in the chart at y, where I and I g avoid 0
    let len = &b - &a;
    let ac = chart_point(&a, &y);
    let bc = &ac + &len;
    let gac = chart_point(&ga, &y);
    let gbc = &gac + &(&gb - &ga);
    let fcert = connect_tuple_derived(&[ac.clone(), bc.clone()], &[gac, gbc])?;
    let (l0, m0) = fcert.commutator.expect("derived form");
    let l = from_chart(&c_from_interval_map(&l0)?, &y);
    let m = from_chart(&c_from_interval_map(&m0)?, &y);
    let f = c_commutator(&l, &m);
    let fi = c_inverse(&f);

    let gfi = c_compose(g, &fi);
    let h1c = patch(&to_chart(&gfi, &y), &ac, &bc)?;
    let h1 = from_chart(&c_from_interval_map(&h1c)?, &y);

    let one = ZTau::one();
    let (lo, hi) = if ac >= &one - &bc {
        (ZTau::zero(), ac.clone())
    } else {
        (bc.clone(), one)
    };
    let gap = &hi - &lo;
    let t1 = &lo + &(&tau_pow(2) * &gap);
    let t2 = &lo + &(&tau_pow(1) * &gap);
    let push = connect_padded(&[ac, bc], &[t1, t2])?;
    let h2 = c_inverse(&from_chart(&c_from_interval_map(&push)?, &y));

    let h3 = c_commutator(&h2, &h1);
    let u = c_compose(&gfi, &c_inverse(&h3));
    let v = c_compose(&h3, &f);
    let cert = FactorCertificate {
        g: g.clone(),
        x,
        y,
        arc: (a, b),
        l,
        m,
        h1,
        h2,
        u,
        v,
    };
    cert.check_direct()?;
    Ok(cert)
}

impl FactorCertificate {
    /// Side conditions that do not involve re-evaluating expressions.
    pub(crate) fn check_direct(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Certificate(m.into()));
        let (a, b) = &self.arc;
        if !(a < &self.x && &self.x < b) || b - a >= ZTau::one() {
            return fail("x is not interior to the arc");
        }
        if arc_contains(a, b, &self.y) {
            return fail("y lies on the arc");
        }
        if c_compose(&self.u, &self.v) != self.g {
            return fail("u v != g");
        }
        if !self.u.fixes_arc(a, b) {
            return fail("u does not fix the arc around x");
        }
        for (name, e) in [("l", &self.l), ("m", &self.m), ("h1", &self.h1), ("h2", &self.h2)] {
            if e.fixed_arc_around(&self.y).is_none() {
                return Err(Error::Certificate(format!(
                    "{name} does not fix a neighbourhood of y"
                )));
            }
        }
        Ok(())
    }
}

/// Squeezes an `F_tau` element into `[lo, hi]` inside `[0, 1]`.
fn squeeze(h0: &PLMap, lo: &ZTau, hi: &ZTau) -> Result<PLMap> {
    let phi = match_intervals(lo, hi, &ZTau::zero(), &ZTau::one())?;
    let inner = pl_compose(&pl_compose(&phi, h0)?, &pl_inverse(&phi))?;
    PLMap::identity_on(ZTau::zero(), lo.clone())
        .concat(&inner)?
        .concat(&PLMap::identity_on(hi.clone(), ZTau::one()))
}

/// Finds an arc `I` with `I g` disjoint from `I` and `x` outside both, a
/// nontrivial `h` supported in `I`, and returns `k = [g, h]`, which is
/// `g^-1 (h^-1 g h)` and fixes a neighbourhood of `x`.
pub fn commutator_trick(
    g: &CircleMap,
    x: &ZTau,
    seed: u64,
    budgets: &Budgets,
) -> Result<TrickCertificate> {
    if g.is_identity() {
        return Err(Error::IdentityInput);
    }
    let x = x.fract();
    let cands = candidate_points(budgets.search_depth);
    let max_e = budgets.search_depth as i64 + 4;
    let arc_at = |c: &ZTau| -> Option<(ZTau, ZTau)> {
        if c == &x || &g.eval_ztau(c) == c {
            return None;
        }
        (2..max_e).find_map(|e| {
            let eps = tau_pow(e);
            let a = c - &eps;
            let b = c + &eps;
            let ga = lift_eval_ztau(g.table(), &a);
            let gb = lift_eval_ztau(g.table(), &b);
            let ok = arcs_disjoint((&a, &b), (&ga, &gb))
                && !arc_contains(&a, &b, &x)
                && !arc_contains(&ga, &gb, &x);
            ok.then_some((a, b))
        })
    };
    // scanned in parallel, merged by candidate order
    let found = crate::par::map(&cands, arc_at);
    let (a, b) = found.into_iter().flatten().next().ok_or_else(|| {
        Error::SearchBudgetExceeded(format!(
            "no arc moved off itself at subdivision depth {}",
            budgets.search_depth
        ))
    })?;
    let len = &b - &a;
    let (lo, hi) = (&tau_pow(2) * &len, &tau_pow(1) * &len);
    let mut s = seed;
    let h0 = loop {
        let cand = random_element(s, 4, RandomFlavor::Ftau);
        let cand = cand.as_interval().expect("F_tau flavor").clone();
        if !cand.is_identity() {
            break cand;
        }
        s = s.wrapping_add(1);
    };
    let h = from_chart(&c_from_interval_map(&squeeze(&h0, &lo, &hi)?)?, &a);
    let k = c_commutator(g, &h);
    let cert = TrickCertificate {
        g: g.clone(),
        x,
        arc: (a, b),
        h,
        k,
    };
    cert.check_direct()?;
    Ok(cert)
}

impl TrickCertificate {
    pub(crate) fn check_direct(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Certificate(m.into()));
        let (a, b) = &self.arc;
        if !(a < b && b - a < ZTau::one()) {
            return fail("malformed arc");
        }
        let ga = lift_eval_ztau(self.g.table(), a);
        let gb = lift_eval_ztau(self.g.table(), b);
        if !arcs_disjoint((a, b), (&ga, &gb)) {
            return fail("g does not move the arc off itself");
        }
        if arc_contains(a, b, &self.x) || arc_contains(&ga, &gb, &self.x) {
            return fail("x meets the arc or its image");
        }
        if self.h.is_identity() || !self.h.fixes_arc(b, &(a + &ZTau::one())) {
            return fail("h is not a nontrivial element supported in the arc");
        }
        if self.k.is_identity() {
            return fail("k is the identity");
        }
        if c_commutator(&self.g, &self.h) != self.k {
            return fail("k != [g, h]");
        }
        if self.k.fixed_arc_around(&self.x).is_none() {
            return fail("k does not fix a neighbourhood of x");
        }
        Ok(())
    }
}
