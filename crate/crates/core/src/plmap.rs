//! Piecewise-linear increasing bijections between intervals with endpoints,
//! breakpoints and offsets in `Z[tau]` and slopes that are powers of `tau`.
//!
//! Maps act on the right: `compose(g, h)` is `x -> (x g) h`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{is_tau_power, tau_pow, QTau, ZTau};

/// Normalized piecewise-linear map. Piece `i` sends `[xs[i], xs[i+1]]` onto
/// `[ys[i], ys[i+1]]` with slope `tau^ks[i]`, and adjacent pieces always have
/// distinct exponents, so equality of maps is equality of tables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct PLMap {
    xs: Vec<ZTau>,
    ys: Vec<ZTau>,
    #[serde(serialize_with = "exps::serialize")]
    ks: Vec<i64>,
}

/// Unvalidated table as supplied by a caller. Coordinates may carry a
/// denominator so that input outside `Z[tau]` can be represented and rejected.
/// When `ks` is omitted the exponents are recovered from the slope ratios.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTable {
    pub xs: Vec<QTau>,
    pub ys: Vec<QTau>,
    #[serde(default, deserialize_with = "exps::deserialize_opt")]
    pub ks: Option<Vec<i64>>,
}

/// Exponent lists are written as decimal strings; plain JSON numbers are
/// accepted on input.
pub(crate) mod exps {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ks: &[i64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ks.iter().map(|k| k.to_string()))
    }

    pub fn serialize_opt<S: Serializer>(ks: &Option<Vec<i64>>, s: S) -> Result<S::Ok, S::Error> {
        match ks {
            Some(ks) => serialize(ks, s),
            None => s.serialize_none(),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(i64),
        Str(String),
    }

    pub fn deserialize_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<i64>>, D::Error> {
        let raw: Option<Vec<Exp>> = Option::deserialize(d)?;
        raw.map(|v| {
            v.into_iter()
                .map(|e| match e {
                    Exp::Num(k) => Ok(k),
                    Exp::Str(s) => s.trim().parse().map_err(|_| {
                        serde::de::Error::custom(format!("bad exponent {s:?}"))
                    }),
                })
                .collect()
        })
        .transpose()
    }
}

impl RawTable {
    pub fn new(xs: Vec<ZTau>, ys: Vec<ZTau>, ks: Option<Vec<i64>>) -> Self {
        RawTable {
            xs: xs.into_iter().map(QTau::from).collect(),
            ys: ys.into_iter().map(QTau::from).collect(),
            ks,
        }
    }
}

impl TryFrom<RawTable> for PLMap {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        pl_validate(&raw)
    }
}

/// Sorted, pairwise disjoint closed intervals.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntervalSet(pub Vec<(ZTau, ZTau)>);

impl IntervalSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn intervals(&self) -> &[(ZTau, ZTau)] {
        &self.0
    }

    pub fn contains(&self, x: &ZTau) -> bool {
        self.0.iter().any(|(lo, hi)| lo <= x && x <= hi)
    }

    /// Smallest interval containing every component.
    pub fn hull(&self) -> Option<(ZTau, ZTau)> {
        Some((self.0.first()?.0.clone(), self.0.last()?.1.clone()))
    }
}

/// Subgroup membership tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Domain and range `[0, 1]`.
    Ftau,
    /// `F_tau` with support closure inside the open interval `(0, 1)`.
    FtauC,
    /// `F_tau` with support inside `[a, b]`.
    FtauInterval(ZTau, ZTau),
}

/// Where `g(x) - x - s` vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftRoots {
    AllAbove,
    AllBelow,
    Root(QTau),
    IdenticallyZeroOn(ZTau, ZTau),
}

impl ShiftRoots {
    /// Any point where the difference vanishes.
    pub fn root(&self) -> Option<QTau> {
        match self {
            ShiftRoots::Root(x) => Some(x.clone()),
            ShiftRoots::IdenticallyZeroOn(lo, _) => Some(QTau::from(lo)),
            _ => None,
        }
    }
}

fn normalize(xs: Vec<ZTau>, ys: Vec<ZTau>, ks: Vec<i64>) -> PLMap {
    let m = ks.len();
    let mut nxs = Vec::with_capacity(xs.len());
    let mut nys = Vec::with_capacity(ys.len());
    let mut nks: Vec<i64> = Vec::with_capacity(m);
    let mut xs = xs.into_iter();
    let mut ys = ys.into_iter();
    nxs.push(xs.next().expect("nonempty"));
    nys.push(ys.next().expect("nonempty"));
    for (k, (x, y)) in ks.into_iter().zip(xs.zip(ys)) {
        if nks.last() == Some(&k) {
            // continuity makes equal-slope neighbours colinear
            *nxs.last_mut().unwrap() = x;
            *nys.last_mut().unwrap() = y;
        } else {
            nks.push(k);
            nxs.push(x);
            nys.push(y);
        }
    }
    PLMap {
        xs: nxs,
        ys: nys,
        ks: nks,
    }
}

pub fn pl_validate(raw: &RawTable) -> Result<PLMap> {
    let n = raw.xs.len();
    if n < 2 || raw.ys.len() != n {
        return Err(Error::BadTable(format!(
            "need matching xs/ys of length >= 2, got {} and {}",
            n,
            raw.ys.len()
        )));
    }
    if let Some(ks) = &raw.ks {
        if ks.len() != n - 1 {
            return Err(Error::BadTable(format!(
                "expected {} exponents, got {}",
                n - 1,
                ks.len()
            )));
        }
    }
    let to_ring = |v: &[QTau], name: &str| -> Result<Vec<ZTau>> {
        v.iter()
            .enumerate()
            .map(|(i, q)| {
                q.as_ztau()
                    .cloned()
                    .ok_or_else(|| Error::NotInRing(format!("{name}[{i}] = {q}")))
            })
            .collect()
    };
    let xs = to_ring(&raw.xs, "xs")?;
    let ys = to_ring(&raw.ys, "ys")?;
    let mut ks = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let dx = &xs[i + 1] - &xs[i];
        let dy = &ys[i + 1] - &ys[i];
        if !dx.is_positive() || !dy.is_positive() {
            return Err(Error::NotIncreasing(i));
        }
        let k = match &raw.ks {
            Some(ks) => {
                if dy != &tau_pow(ks[i]) * &dx {
                    return Err(Error::SlopeMismatch(i));
                }
                ks[i]
            }
            None => {
                let ratio = QTau::from(dy).checked_div(&QTau::from(dx))?;
                is_tau_power(&ratio)?.ok_or(Error::NotTauPower(i))?
            }
        };
        ks.push(k);
    }
    Ok(normalize(xs, ys, ks))
}

impl PLMap {
    /// Validating constructor from exact ring coordinates.
    pub fn new(xs: Vec<ZTau>, ys: Vec<ZTau>, ks: Vec<i64>) -> Result<Self> {
        pl_validate(&RawTable::new(xs, ys, Some(ks)))
    }

    /// Skips validation; callers guarantee the slope identities.
    pub(crate) fn from_parts_unchecked(xs: Vec<ZTau>, ys: Vec<ZTau>, ks: Vec<i64>) -> Self {
        let g = normalize(xs, ys, ks);
        debug_assert!(g.check_invariants().is_ok(), "{g:?}");
        g
    }

    pub fn identity_on(lo: ZTau, hi: ZTau) -> Self {
        PLMap {
            xs: vec![lo.clone(), hi.clone()],
            ys: vec![lo, hi],
            ks: vec![0],
        }
    }

    pub fn identity() -> Self {
        PLMap::identity_on(ZTau::zero(), ZTau::one())
    }

    /// The single-piece map `[x0, x0 + len] -> [y0, y0 + tau^k len]`.
    pub fn linear(x0: ZTau, len: &ZTau, y0: ZTau, k: i64) -> Self {
        let x1 = &x0 + len;
        let y1 = &y0 + &(&tau_pow(k) * len);
        PLMap {
            xs: vec![x0, x1],
            ys: vec![y0, y1],
            ks: vec![k],
        }
    }

    pub fn xs(&self) -> &[ZTau] {
        &self.xs
    }

    pub fn ys(&self) -> &[ZTau] {
        &self.ys
    }

    pub fn ks(&self) -> &[i64] {
        &self.ks
    }

    pub fn pieces(&self) -> usize {
        self.ks.len()
    }

    pub fn domain(&self) -> (&ZTau, &ZTau) {
        (&self.xs[0], self.xs.last().unwrap())
    }

    pub fn range(&self) -> (&ZTau, &ZTau) {
        (&self.ys[0], self.ys.last().unwrap())
    }

    pub fn is_identity(&self) -> bool {
        self.ks == [0] && self.xs == self.ys
    }

    pub fn check_invariants(&self) -> Result<()> {
        let again = pl_validate(&RawTable::new(
            self.xs.clone(),
            self.ys.clone(),
            Some(self.ks.clone()),
        ))?;
        if &again != self {
            return Err(Error::BadTable("table is not normalized".into()));
        }
        Ok(())
    }

    /// Index of the piece containing `x`; right endpoints belong to the left piece
    /// except at the end of the domain.
    fn piece_of(&self, x: &QTau) -> Result<usize> {
        let (lo, hi) = self.domain();
        if x.cmp_ztau(lo) == Ordering::Less || x.cmp_ztau(hi) == Ordering::Greater {
            return Err(Error::OutOfDomain);
        }
        // first breakpoint strictly greater than x
        let idx = self
            .xs
            .partition_point(|b| x.cmp_ztau(b) != Ordering::Less);
        Ok(idx.saturating_sub(1).min(self.ks.len() - 1))
    }

    fn piece_of_ztau(&self, x: &ZTau) -> Result<usize> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::OutOfDomain);
        }
        let idx = self.xs.partition_point(|b| b <= x);
        Ok(idx.saturating_sub(1).min(self.ks.len() - 1))
    }

    pub fn eval(&self, x: &QTau) -> Result<QTau> {
        let i = self.piece_of(x)?;
        let off = x - &QTau::from(&self.xs[i]);
        Ok(off.mul_ztau(&tau_pow(self.ks[i])).add_ztau(&self.ys[i]))
    }

    pub fn eval_ztau(&self, x: &ZTau) -> Result<ZTau> {
        let i = self.piece_of_ztau(x)?;
        Ok(&self.ys[i] + &(&tau_pow(self.ks[i]) * &(x - &self.xs[i])))
    }

    /// Image under the inverse map.
    pub fn preimage_ztau(&self, y: &ZTau) -> Result<ZTau> {
        let (lo, hi) = self.range();
        if y < lo || y > hi {
            return Err(Error::OutOfDomain);
        }
        let idx = self.ys.partition_point(|b| b <= y);
        let i = idx.saturating_sub(1).min(self.ks.len() - 1);
        Ok(&self.xs[i] + &(&tau_pow(-self.ks[i]) * &(y - &self.ys[i])))
    }

    /// The restriction to `[lo, hi]`, which must lie in the domain.
    pub fn restrict(&self, lo: &ZTau, hi: &ZTau) -> Result<PLMap> {
        let (dlo, dhi) = self.domain();
        if lo < dlo || hi > dhi || lo >= hi {
            return Err(Error::OutOfDomain);
        }
        let mut xs = vec![lo.clone()];
        let mut ys = vec![self.eval_ztau(lo)?];
        let mut ks = Vec::new();
        let start = self.piece_of_ztau(lo)?;
        for i in start..self.ks.len() {
            ks.push(self.ks[i]);
            if &self.xs[i + 1] >= hi {
                xs.push(hi.clone());
                ys.push(self.eval_ztau(hi)?);
                break;
            }
            xs.push(self.xs[i + 1].clone());
            ys.push(self.ys[i + 1].clone());
        }
        Ok(PLMap::from_parts_unchecked(xs, ys, ks))
    }

    /// Joins two maps whose domains and ranges abut.
    pub fn concat(&self, next: &PLMap) -> Result<PLMap> {
        if self.domain().1 != next.domain().0 || self.range().1 != next.range().0 {
            return Err(Error::DomainMismatch);
        }
        let mut xs = self.xs.clone();
        let mut ys = self.ys.clone();
        let mut ks = self.ks.clone();
        xs.extend(next.xs[1..].iter().cloned());
        ys.extend(next.ys[1..].iter().cloned());
        ks.extend_from_slice(&next.ks);
        Ok(PLMap::from_parts_unchecked(xs, ys, ks))
    }

    /// The map `x -> g(x - dx) + dy` on the translated domain.
    pub fn translate(&self, dx: &ZTau, dy: &ZTau) -> PLMap {
        PLMap {
            xs: self.xs.iter().map(|x| x + dx).collect(),
            ys: self.ys.iter().map(|y| y + dy).collect(),
            ks: self.ks.clone(),
        }
    }

    /// Sum of absolute exponents, a crude size measure.
    pub fn complexity(&self) -> u64 {
        self.ks.iter().map(|k| k.unsigned_abs()).sum::<u64>() + self.ks.len() as u64
    }
}

pub fn pl_eval(g: &PLMap, x: &QTau) -> Result<QTau> {
    g.eval(x)
}

/// `x -> (x g) h`.
pub fn pl_compose(g: &PLMap, h: &PLMap) -> Result<PLMap> {
    if g.range() != h.domain() {
        return Err(Error::DomainMismatch);
    }
    let (mg, mh) = (g.ks.len(), h.ks.len());
    let cap = mg + mh + 1;
    let mut xs = Vec::with_capacity(cap);
    let mut zs = Vec::with_capacity(cap);
    let mut ks = Vec::with_capacity(cap);
    xs.push(g.xs[0].clone());
    zs.push(h.ys[0].clone());
    let (mut i, mut j) = (0, 0);
    // walk the merged breakpoints in the intermediate interval
    while i < mg && j < mh {
        ks.push(g.ks[i] + h.ks[j]);
        let end_g = &g.ys[i + 1];
        let end_h = &h.xs[j + 1];
        match end_g.cmp(end_h) {
            Ordering::Less => {
                xs.push(g.xs[i + 1].clone());
                zs.push(&h.ys[j] + &(&tau_pow(h.ks[j]) * &(end_g - &h.xs[j])));
                i += 1;
            }
            Ordering::Greater => {
                xs.push(&g.xs[i] + &(&tau_pow(-g.ks[i]) * &(end_h - &g.ys[i])));
                zs.push(h.ys[j + 1].clone());
                j += 1;
            }
            Ordering::Equal => {
                xs.push(g.xs[i + 1].clone());
                zs.push(h.ys[j + 1].clone());
                i += 1;
                j += 1;
            }
        }
    }
    debug_assert!(i == mg && j == mh);
    Ok(PLMap::from_parts_unchecked(xs, zs, ks))
}

pub fn pl_inverse(g: &PLMap) -> PLMap {
    PLMap {
        xs: g.ys.clone(),
        ys: g.xs.clone(),
        ks: g.ks.iter().map(|k| -k).collect(),
    }
}

/// Closure of the set of moved points.
pub fn pl_support(g: &PLMap) -> IntervalSet {
    let mut out: Vec<(ZTau, ZTau)> = Vec::new();
    let mut open: Option<ZTau> = None;
    for i in 0..g.ks.len() {
        let fixed = g.ks[i] == 0 && g.xs[i] == g.ys[i];
        match (fixed, &open) {
            (false, None) => open = Some(g.xs[i].clone()),
            (true, Some(_)) => out.push((open.take().unwrap(), g.xs[i].clone())),
            _ => {}
        }
    }
    if let Some(lo) = open {
        out.push((lo, g.xs.last().unwrap().clone()));
    }
    IntervalSet(out)
}

pub fn pl_is_ftau(g: &PLMap, flavor: &Flavor) -> bool {
    let zero = ZTau::zero();
    let one = ZTau::one();
    let unit = (&zero, &one);
    if g.domain() != unit || g.range() != unit {
        return false;
    }
    match flavor {
        Flavor::Ftau => true,
        Flavor::FtauC => pl_support(g)
            .intervals()
            .iter()
            .all(|(lo, hi)| lo.is_positive() && hi < &one),
        Flavor::FtauInterval(a, b) => pl_support(g)
            .intervals()
            .iter()
            .all(|(lo, hi)| lo >= a && hi <= b),
    }
}

/// Classifies `d(x) = g(x) - x - s` over the domain of `g`.
pub fn pl_shift_roots(g: &PLMap, s: &ZTau) -> ShiftRoots {
    let d: Vec<ZTau> = g
        .xs
        .iter()
        .zip(&g.ys)
        .map(|(x, y)| &(y - x) - s)
        .collect();
    let signs: Vec<i8> = d.iter().map(ZTau::sign).collect();
    let m = g.ks.len();
    for i in 0..=m {
        if signs[i] == 0 {
            let mut j = i;
            while j < m && signs[j + 1] == 0 {
                j += 1;
            }
            if j > i {
                return ShiftRoots::IdenticallyZeroOn(g.xs[i].clone(), g.xs[j].clone());
            }
            return ShiftRoots::Root(QTau::from(&g.xs[i]));
        }
        if i < m && signs[i] * signs[i + 1] < 0 {
            // d_i + (tau^k - 1)(x - x_i) = 0; the sign change forces k != 0
            let slope = QTau::from(&tau_pow(g.ks[i]) - &ZTau::one());
            let step = QTau::from(&d[i])
                .checked_div(&slope)
                .expect("nonzero slope");
            return ShiftRoots::Root(QTau::from(&g.xs[i]) - step);
        }
    }
    if signs[0] > 0 {
        ShiftRoots::AllAbove
    } else {
        ShiftRoots::AllBelow
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(k: i64) -> ZTau {
        tau_pow(k)
    }

    fn connect() -> PLMap {
        PLMap::new(
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![ZTau::zero(), t(2), ZTau::one()],
            vec![1, -1],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let g = connect();
        assert_eq!(g.pieces(), 2);
        assert!(PLMap::new(vec![0.into(), 1.into()], vec![0.into(), 1.into()], vec![0])
            .unwrap()
            .is_identity());
        let bad = PLMap::new(
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![1, -1],
        );
        assert_eq!(bad, Err(Error::SlopeMismatch(0)));
        let raw = RawTable::new(vec![0.into(), 1.into()], vec![0.into(), 2.into()], None);
        assert_eq!(pl_validate(&raw), Err(Error::NotTauPower(0)));
        let raw = RawTable::new(vec![0.into(), 1.into()], vec![1.into(), 0.into()], None);
        assert_eq!(pl_validate(&raw), Err(Error::NotIncreasing(0)));
        // slope ratios recovered when exponents are omitted
        let raw = RawTable::new(
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![ZTau::zero(), t(2), ZTau::one()],
            None,
        );
        assert_eq!(pl_validate(&raw).unwrap(), g);
    }

    #[test]
    fn normalization_merges_colinear_pieces() {
        let g = PLMap::new(
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![ZTau::zero(), t(1), ZTau::one()],
            vec![0, 0],
        )
        .unwrap();
        assert!(g.is_identity());
        assert_eq!(g.pieces(), 1);
    }

    #[test]
    fn evaluation() {
        let g = connect();
        let q = |z: ZTau| QTau::from(z);
        assert_eq!(pl_eval(&g, &q(t(1))).unwrap(), q(t(2)));
        assert_eq!(pl_eval(&g, &q(t(2))).unwrap(), q(t(3)));
        assert_eq!(pl_eval(&g, &q(2.into())), Err(Error::OutOfDomain));
        let half = QTau::new(ZTau::one(), 2).unwrap();
        assert_eq!(pl_eval(&PLMap::identity(), &half).unwrap(), half);
    }

    #[test]
    fn composition_and_inverse() {
        let g = connect();
        let gg = pl_compose(&g, &g).unwrap();
        assert_eq!(gg.pieces(), 3);
        assert_eq!(gg.eval_ztau(&t(1)).unwrap(), t(3));
        for x in [t(1), t(2), t(3), t(4), &t(1) + &t(3)] {
            assert_eq!(
                gg.eval_ztau(&x).unwrap(),
                g.eval_ztau(&g.eval_ztau(&x).unwrap()).unwrap()
            );
        }
        let inv = pl_inverse(&g);
        assert_eq!(inv.xs(), &[ZTau::zero(), t(2), ZTau::one()]);
        assert_eq!(inv.ks(), &[-1, 1]);
        assert!(pl_compose(&g, &inv).unwrap().is_identity());
        assert_eq!(pl_compose(&PLMap::identity(), &g).unwrap(), g);
        let short = PLMap::identity_on(ZTau::zero(), t(1));
        assert_eq!(pl_compose(&g, &short), Err(Error::DomainMismatch));
    }

    #[test]
    fn supports() {
        assert!(pl_support(&PLMap::identity()).is_empty());
        let g = connect();
        assert_eq!(
            pl_support(&g).intervals(),
            &[(ZTau::zero(), ZTau::one())]
        );
        // identity on [0, tau^2], the connect map squeezed into [tau^2, 1] after
        let right = PLMap::new(
            vec![t(2), &t(2) + &t(2), ZTau::one()],
            vec![t(2), &t(2) + &t(3), ZTau::one()],
            vec![1, -1],
        )
        .unwrap();
        let h = PLMap::identity_on(ZTau::zero(), t(2)).concat(&right).unwrap();
        let s = pl_support(&h);
        assert_eq!(s.intervals(), &[(t(2), ZTau::one())]);
        assert!(pl_is_ftau(&h, &Flavor::FtauInterval(t(2), ZTau::one())));
        assert!(!pl_is_ftau(&h, &Flavor::FtauC));
    }

    #[test]
    fn membership() {
        let g = connect();
        assert!(pl_is_ftau(&g, &Flavor::Ftau));
        assert!(!pl_is_ftau(&g, &Flavor::FtauC));
        let id = PLMap::identity();
        for f in [
            Flavor::Ftau,
            Flavor::FtauC,
            Flavor::FtauInterval(t(2), t(1)),
        ] {
            assert!(pl_is_ftau(&id, &f));
        }
    }

    #[test]
    fn shift_roots() {
        let id = PLMap::identity();
        assert_eq!(
            pl_shift_roots(&id, &ZTau::zero()),
            ShiftRoots::IdenticallyZeroOn(ZTau::zero(), ZTau::one())
        );
        let g = connect();
        assert_eq!(
            pl_shift_roots(&g, &ZTau::zero()),
            ShiftRoots::Root(QTau::zero())
        );
        assert_eq!(pl_shift_roots(&g, &ZTau::one()), ShiftRoots::AllBelow);
        assert_eq!(pl_shift_roots(&g, &(-ZTau::one())), ShiftRoots::AllAbove);
        // interior root: g(x) - x = -t^3 crosses inside a piece
        let s = -t(4);
        match pl_shift_roots(&g, &s) {
            ShiftRoots::Root(x) => {
                let gx = g.eval(&x).unwrap();
                assert_eq!(gx - x, QTau::from(s));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn restrict_and_concat_round_trip() {
        let g = connect();
        let left = g.restrict(&ZTau::zero(), &t(3)).unwrap();
        let right = g.restrict(&t(3), &ZTau::one()).unwrap();
        assert_eq!(left.concat(&right).unwrap(), g);
    }
}
