//! Constructive transitivity, proximality and factorization in `F_tau` and
//! `T_tau`, each result coming with a certificate that is re-checked by
//! evaluation.
//!
//! Whenever a construction has to choose points it scans
//! [`candidate_points`]: `0` first, then the breakpoints of the complete
//! all-`+` subdivision of `[0, 1]`, shallowest first and increasing within a
//! level.

mod cert;
mod factor;
mod matching;
mod random;
mod witness;

pub use cert::{Certificate, TransitivityCertificate};
pub use factor::{commutator_trick, factor_local, FactorCertificate, TrickCertificate};
pub use matching::{
    connect_tuple, connect_tuple_derived, match_intervals, proximal_shrink, Ambient,
};
pub use random::{random_element, random_element_with, random_tree, RandomFlavor};
pub use witness::{defect_search, defect_witness, DefectWitness};

use crate::circle::{c_compose, c_from_rotation, CircleMap};
use crate::ring::{tau_pow, ZTau};

/// Split points of the all-`+` subdivision introduced at depths `1..=depth`,
/// ordered by depth and then by value. Depth one is `[tau]`.
pub fn subdivision_points(depth: u32) -> Vec<ZTau> {
    let mut out = Vec::new();
    let mut level = vec![(ZTau::zero(), 0i64)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * level.len());
        let mut mids = Vec::with_capacity(level.len());
        for (start, e) in level {
            let mid = &start + &tau_pow(e + 1);
            mids.push(mid.clone());
            next.push((start, e + 1));
            next.push((mid, e + 2));
        }
        mids.sort();
        out.extend(mids);
        level = next;
    }
    out
}

/// `0` followed by [`subdivision_points`].
pub fn candidate_points(depth: u32) -> Vec<ZTau> {
    let mut pts = vec![ZTau::zero()];
    pts.extend(subdivision_points(depth));
    pts
}

/// Whether `p` lies on the closed arc from `lo` to `hi` (`lo <= hi < lo + 1`).
pub(crate) fn arc_contains(lo: &ZTau, hi: &ZTau, p: &ZTau) -> bool {
    (p - lo).fract() <= hi - lo
}

/// Whether two closed arcs are disjoint.
pub(crate) fn arcs_disjoint(a: (&ZTau, &ZTau), b: (&ZTau, &ZTau)) -> bool {
    let s = (b.0 - a.0).fract();
    s > a.1 - a.0 && &s + &(b.1 - b.0) < ZTau::one()
}

/// `u -> g(u + z) - z`: the map seen from a chart that puts `z` at `0`.
pub(crate) fn to_chart(g: &CircleMap, z: &ZTau) -> CircleMap {
    c_compose(&c_compose(&c_from_rotation(z), g), &c_from_rotation(&-z))
}

/// Inverse of [`to_chart`].
pub(crate) fn from_chart(g: &CircleMap, z: &ZTau) -> CircleMap {
    c_compose(&c_compose(&c_from_rotation(&-z), g), &c_from_rotation(z))
}

/// Chart coordinate of `p` in `[0, 1)`.
pub(crate) fn chart_point(p: &ZTau, z: &ZTau) -> ZTau {
    (p - z).fract()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivision_order() {
        let pts = subdivision_points(3);
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], tau_pow(1));
        assert_eq!(&pts[1..3], &[tau_pow(2), &tau_pow(1) + &tau_pow(3)]);
        assert!(pts[3..].windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn arcs() {
        let (a, b) = (ZTau::new(0, 1), ZTau::new(1, 0));
        assert!(arc_contains(&a, &b, &ZTau::new(1, 0)));
        assert!(arc_contains(&a, &b, &ZTau::new(2, 0)));
        assert!(!arc_contains(&a, &b, &tau_pow(2)));
        let c = (tau_pow(4), tau_pow(3));
        assert!(arcs_disjoint((&a, &b), (&c.0, &c.1)));
        assert!(!arcs_disjoint((&a, &b), (&ZTau::new(1, 0), &ZTau::new(2, -1))));
    }

    #[test]
    fn charts_invert() {
        let g = c_from_rotation(&ZTau::tau());
        let z = tau_pow(3);
        assert_eq!(from_chart(&to_chart(&g, &z), &z), g);
    }
}
