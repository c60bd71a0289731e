//! Elements of `T_tau`, stored as the canonical lift restricted to `[0, 1]`.
//!
//! A lift table is a [`PLMap`] on an interval `[c, c + 1]` with range of
//! length one; it extends to the whole line by `g(x + 1) = g(x) + 1`. The
//! canonical representative of a circle map has domain `[0, 1]` and base
//! value `g(0)` in `[0, 1)`.
//!
//! Condition three of the definition of `T_tau` (preserving `Z[tau]/Z`) is
//! equivalent, once breakpoints lie in `Z[tau]` and slopes are powers of
//! `tau`, to the base value lying in `Z[tau]`: every other breakpoint image
//! is reached from it by adding `tau^k` times a difference of ring elements.
//! Storing the base value as a [`ZTau`] therefore enforces it, and raw input
//! with a base value outside the ring is rejected during validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plmap::{pl_compose, pl_inverse, pl_is_ftau, pl_validate, Flavor, PLMap, RawTable};
use crate::ring::{tau_pow, QTau, ZTau};

/// Extends a lift table with domain `[x0, x0 + 1]` periodically and returns
/// its restriction to `[c, c + 1]`.
pub fn lift_window(table: &PLMap, c: &ZTau) -> PLMap {
    let x0 = table.domain().0.clone();
    let t = c - &x0;
    let n = ZTau::int(t.floor());
    let f = &t - &n;
    if f.is_zero() {
        return table.translate(&n, &n);
    }
    let one = ZTau::one();
    let p = &x0 + &f;
    let right = table
        .restrict(&p, &(&x0 + &one))
        .expect("split point inside the period");
    let left = table
        .restrict(&x0, &p)
        .expect("split point inside the period")
        .translate(&one, &one);
    right
        .concat(&left)
        .expect("periodic pieces abut")
        .translate(&n, &n)
}

/// `x -> h(g(x))` for lift tables.
pub fn lift_compose(g: &PLMap, h: &PLMap) -> PLMap {
    let win = lift_window(h, g.range().0);
    pl_compose(g, &win).expect("window matches range")
}

/// Inverse lift table, re-windowed onto the domain of `g`.
pub fn lift_inverse(g: &PLMap) -> PLMap {
    lift_window(&pl_inverse(g), g.domain().0)
}

/// Value of the periodic extension at any point of the line.
pub fn lift_eval(table: &PLMap, x: &QTau) -> QTau {
    let x0 = table.domain().0;
    let shifted = x - &QTau::from(x0);
    let n = shifted.floor();
    let f = &shifted - &QTau::from(ZTau::int(n.clone()));
    let y = table
        .eval(&f.add_ztau(x0))
        .expect("reduced point inside the period");
    y.add_ztau(&ZTau::int(n))
}

pub fn lift_eval_ztau(table: &PLMap, x: &ZTau) -> ZTau {
    let x0 = table.domain().0;
    let shifted = x - x0;
    let n = ZTau::int(shifted.floor());
    let f = &shifted - &n;
    let y = table
        .eval_ztau(&(&f + x0))
        .expect("reduced point inside the period");
    &y + &n
}

fn check_degree_one(table: &PLMap) -> Result<()> {
    let (lo, hi) = table.domain();
    if hi - lo != ZTau::one() {
        return Err(Error::BadTable("lift domain must have length one".into()));
    }
    let (ylo, yhi) = table.range();
    let deg = yhi - ylo;
    if !deg.is_one() {
        return Err(Error::DegreeNotOne(deg.to_string()));
    }
    Ok(())
}

/// An element of `T_tau`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CircleMap {
    table: PLMap,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CircleRepr {
    xs: Vec<QTau>,
    ys: Vec<QTau>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::plmap::exps::serialize_opt",
        deserialize_with = "crate::plmap::exps::deserialize_opt"
    )]
    ks: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<QTau>,
}

impl CircleRepr {
    /// Validates the table and the optional base value.
    pub(crate) fn into_circle(self) -> Result<CircleMap> {
        let g = c_validate(&RawTable {
            xs: self.xs,
            ys: self.ys,
            ks: self.ks,
        })?;
        if let Some(v) = self.v {
            if v != QTau::from(g.base_value()) {
                return Err(Error::BadTable(
                    "base value v disagrees with the reduced table".into(),
                ));
            }
        }
        Ok(g)
    }
}

impl Serialize for CircleMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircleRepr {
            xs: self.table.xs().iter().map(QTau::from).collect(),
            ys: self.table.ys().iter().map(QTau::from).collect(),
            ks: Some(self.table.ks().to_vec()),
            v: Some(QTau::from(self.base_value())),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CircleRepr::deserialize(d)?
            .into_circle()
            .map_err(serde::de::Error::custom)
    }
}

/// Exact validation of a raw lift table on `[0, 1]`, reduced to the canonical
/// representative.
pub fn c_validate(raw: &RawTable) -> Result<CircleMap> {
    let zero = QTau::zero();
    let one = QTau::one();
    if raw.xs.first() != Some(&zero) || raw.xs.last() != Some(&one) {
        return Err(Error::BadTable("circle tables span [0, 1]".into()));
    }
    let table = pl_validate(raw)?;
    CircleMap::from_lift_table(table)
}

impl CircleMap {
    /// Accepts any degree-one lift table on `[0, 1]` and reduces it.
    pub fn from_lift_table(table: PLMap) -> Result<Self> {
        check_degree_one(&table)?;
        if !table.domain().0.is_zero() {
            return Err(Error::BadTable("circle tables span [0, 1]".into()));
        }
        let n = ZTau::int(table.range().0.floor());
        let table = if n.is_zero() {
            table
        } else {
            table.translate(&ZTau::zero(), &(-n))
        };
        Ok(CircleMap { table })
    }

    /// Reduces any lift table with arbitrary domain `[c, c + 1]`.
    pub(crate) fn from_any_lift(table: &PLMap) -> Self {
        let win = lift_window(table, &ZTau::zero());
        CircleMap::from_lift_table(win).expect("degree-one window")
    }

    pub fn identity() -> Self {
        CircleMap {
            table: PLMap::identity(),
        }
    }

    pub fn table(&self) -> &PLMap {
        &self.table
    }

    /// `g(0)` of the canonical lift, in `[0, 1)`.
    pub fn base_value(&self) -> &ZTau {
        self.table.range().0
    }

    pub fn is_identity(&self) -> bool {
        self.table.is_identity()
    }

    /// Single piece of slope one: a rotation.
    pub fn is_rotation(&self) -> bool {
        self.table.ks() == [0]
    }

    pub fn pieces(&self) -> usize {
        self.table.pieces()
    }

    pub fn eval(&self, x: &QTau) -> QTau {
        lift_eval(&self.table, &x.fract()).fract()
    }

    pub fn eval_ztau(&self, x: &ZTau) -> ZTau {
        lift_eval_ztau(&self.table, &x.fract()).fract()
    }

    /// Largest arc `[lo, hi]` (as lift coordinates with `lo <= y <= hi`) that
    /// the map fixes pointwise around the point `y`, if any.
    pub fn fixed_arc_around(&self, y: &ZTau) -> Option<(ZTau, ZTau)> {
        let y = y.fract();
        let win = lift_window(&self.table, &y);
        let off = &win.ys()[0] - &y;
        off.as_integer()?;
        let ks = win.ks();
        let last = ks.len() - 1;
        if ks[0] != 0 || ks[last] != 0 {
            return None;
        }
        if ks.len() == 1 {
            // a pure translation by an integer fixes everything
            return Some((&y - &ZTau::one(), &y + &ZTau::one()));
        }
        let hi = win.xs()[1].clone();
        let lo = &win.xs()[last] - &ZTau::one();
        Some((lo, hi))
    }

    /// Whether every point of the arc from `lo` to `hi` (lift coordinates,
    /// `lo < hi < lo + 1`) is fixed.
    pub fn fixes_arc(&self, lo: &ZTau, hi: &ZTau) -> bool {
        let win = lift_window(&self.table, lo);
        if (&win.ys()[0] - lo).as_integer().is_none() {
            return false;
        }
        win.ks()[0] == 0 && &win.xs()[1] >= hi
    }
}

pub fn c_from_rotation(alpha: &ZTau) -> CircleMap {
    let v = alpha.fract();
    CircleMap {
        table: PLMap::linear(ZTau::zero(), &ZTau::one(), v, 0),
    }
}

pub fn c_from_interval_map(g: &PLMap) -> Result<CircleMap> {
    if !pl_is_ftau(g, &Flavor::Ftau) {
        return Err(Error::NotFtau);
    }
    Ok(CircleMap { table: g.clone() })
}

/// Which way a node splits an interval of length `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Caret {
    /// `(tau l, tau^2 l)`
    Plus,
    /// `(tau^2 l, tau l)`
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SubdivisionTree {
    Leaf,
    Split(Caret, Box<SubdivisionTree>, Box<SubdivisionTree>),
}

impl SubdivisionTree {
    pub fn split(caret: Caret, left: SubdivisionTree, right: SubdivisionTree) -> Self {
        SubdivisionTree::Split(caret, Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            SubdivisionTree::Leaf => 1,
            SubdivisionTree::Split(_, l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Leaves of the subdivision of `[start, start + tau^exp]`, each as
    /// `(left endpoint, length exponent)`.
    pub fn leaves_from(&self, start: &ZTau, exp: i64) -> Vec<(ZTau, i64)> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.collect_leaves(start.clone(), exp, &mut out);
        out
    }

    pub fn leaves(&self) -> Vec<(ZTau, i64)> {
        self.leaves_from(&ZTau::zero(), 0)
    }

    fn collect_leaves(&self, start: ZTau, exp: i64, out: &mut Vec<(ZTau, i64)>) {
        match self {
            SubdivisionTree::Leaf => out.push((start, exp)),
            SubdivisionTree::Split(caret, l, r) => {
                let (el, er) = match caret {
                    Caret::Plus => (exp + 1, exp + 2),
                    Caret::Minus => (exp + 2, exp + 1),
                };
                let mid = &start + &tau_pow(el);
                l.collect_leaves(start, el, out);
                r.collect_leaves(mid, er, out);
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SubdivisionTree::Leaf => serde_json::Value::String("leaf".into()),
            SubdivisionTree::Split(c, l, r) => serde_json::json!([
                match c {
                    Caret::Plus => "s+",
                    Caret::Minus => "s-",
                },
                l.to_json(),
                r.to_json()
            ]),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        use serde_json::Value;
        match v {
            Value::String(s) if s == "leaf" => Ok(SubdivisionTree::Leaf),
            Value::Array(items) if items.len() == 3 => {
                let caret = match items[0].as_str() {
                    Some("s+") => Caret::Plus,
                    Some("s-") => Caret::Minus,
                    _ => return Err(Error::Schema(format!("bad caret {}", items[0]))),
                };
                Ok(SubdivisionTree::split(
                    caret,
                    SubdivisionTree::from_json(&items[1])?,
                    SubdivisionTree::from_json(&items[2])?,
                ))
            }
            other => Err(Error::Schema(format!("bad subdivision tree {other}"))),
        }
    }
}

impl Serialize for SubdivisionTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubdivisionTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        SubdivisionTree::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// The `F_tau` element sending the leaves of `p` onto the leaves of `q` in order.
pub fn interval_map_from_trees(p: &SubdivisionTree, q: &SubdivisionTree) -> Result<PLMap> {
    let lp = p.leaves();
    let lq = q.leaves();
    if lp.len() != lq.len() {
        return Err(Error::LeafCountMismatch(lp.len(), lq.len()));
    }
    let mut xs: Vec<ZTau> = lp.iter().map(|(s, _)| s.clone()).collect();
    let mut ys: Vec<ZTau> = lq.iter().map(|(s, _)| s.clone()).collect();
    xs.push(ZTau::one());
    ys.push(ZTau::one());
    let ks = lp.iter().zip(&lq).map(|((_, ep), (_, eq))| eq - ep).collect();
    PLMap::new(xs, ys, ks)
}

/// Sends leaf `i` of `p` onto leaf `i + shift (mod L)` of `q`.
pub fn c_from_subdivision_pair(
    p: &SubdivisionTree,
    q: &SubdivisionTree,
    shift: i64,
) -> Result<CircleMap> {
    let lp = p.leaves();
    let lq = q.leaves();
    let l = lp.len();
    if l != lq.len() {
        return Err(Error::LeafCountMismatch(l, lq.len()));
    }
    if shift < 0 || shift as usize >= l {
        return Err(Error::BadShift(shift, l));
    }
    let s = shift as usize;
    let one = ZTau::one();
    let mut xs: Vec<ZTau> = lp.iter().map(|(x, _)| x.clone()).collect();
    xs.push(one.clone());
    let mut ys = Vec::with_capacity(l + 1);
    let mut ks = Vec::with_capacity(l);
    for i in 0..l {
        let j = i + s;
        let (start, e) = if j < l {
            lq[j].clone()
        } else {
            (&lq[j - l].0 + &one, lq[j - l].1)
        };
        ys.push(start);
        ks.push(e - lp[i].1);
    }
    ys.push(&ys[0] + &one);
    // leaf lengths are tau powers, so a mismatch here means a malformed tree
    let table = PLMap::new(xs, ys, ks)?;
    CircleMap::from_lift_table(table)
}

/// Group operations on circle maps.
#[derive(Clone, Debug)]
pub enum CircleOp<'a> {
    Compose(&'a CircleMap, &'a CircleMap),
    Inverse(&'a CircleMap),
    Power(&'a CircleMap, i64),
    Commutator(&'a CircleMap, &'a CircleMap),
    Conjugate(&'a CircleMap, &'a CircleMap),
}

pub fn c_group(op: CircleOp<'_>, piece_cap: usize) -> Result<CircleMap> {
    let out = match op {
        CircleOp::Compose(g, h) => c_compose(g, h),
        CircleOp::Inverse(g) => c_inverse(g),
        CircleOp::Power(g, n) => return c_power(g, n, piece_cap),
        CircleOp::Commutator(g, h) => c_commutator(g, h),
        CircleOp::Conjugate(g, h) => c_conjugate(g, h),
    };
    cap_check(out, piece_cap)
}

fn cap_check(g: CircleMap, cap: usize) -> Result<CircleMap> {
    if g.pieces() > cap {
        return Err(Error::PowerBudgetExceeded(g.pieces(), cap));
    }
    Ok(g)
}

/// `x -> (x g) h`.
pub fn c_compose(g: &CircleMap, h: &CircleMap) -> CircleMap {
    CircleMap::from_any_lift(&lift_compose(&g.table, &h.table))
}

pub fn c_inverse(g: &CircleMap) -> CircleMap {
    CircleMap::from_any_lift(&lift_inverse(&g.table))
}

/// `[g, h] = g^-1 h^-1 g h`.
pub fn c_commutator(g: &CircleMap, h: &CircleMap) -> CircleMap {
    let gi = c_inverse(g);
    let hi = c_inverse(h);
    c_compose(&c_compose(&c_compose(&gi, &hi), g), h)
}

/// `g^h = h^-1 g h`.
pub fn c_conjugate(g: &CircleMap, h: &CircleMap) -> CircleMap {
    c_compose(&c_compose(&c_inverse(h), g), h)
}

pub fn c_power(g: &CircleMap, n: i64, piece_cap: usize) -> Result<CircleMap> {
    let table = lift_power(&g.table, n, piece_cap)?;
    Ok(CircleMap::from_any_lift(&table))
}

/// `g^n` of a lift table by repeated squaring, failing once any intermediate
/// table exceeds `piece_cap` pieces.
pub fn lift_power(g: &PLMap, n: i64, piece_cap: usize) -> Result<PLMap> {
    let mut base = if n < 0 { lift_inverse(g) } else { g.clone() };
    let mut e = n.unsigned_abs();
    let mut acc: Option<PLMap> = None;
    while e > 0 {
        if e & 1 == 1 {
            let next = match &acc {
                None => base.clone(),
                Some(a) => lift_compose(a, &base),
            };
            if next.pieces() > piece_cap {
                return Err(Error::PowerBudgetExceeded(next.pieces(), piece_cap));
            }
            acc = Some(next);
        }
        e >>= 1;
        if e > 0 {
            base = lift_compose(&base, &base);
            if base.pieces() > piece_cap {
                return Err(Error::PowerBudgetExceeded(base.pieces(), piece_cap));
            }
        }
    }
    Ok(acc.unwrap_or_else(|| lift_window(&PLMap::identity(), g.domain().0)))
}

pub fn c_eval(g: &CircleMap, x: &QTau) -> QTau {
    g.eval(x)
}
