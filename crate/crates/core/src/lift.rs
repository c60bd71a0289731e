//! The total lift of `T_tau` to the real line, rotation numbers and stable
//! commutator length.
//!
//! Rotation numbers are never guessed. A rational answer `p/q` comes with a
//! point `x` satisfying `g^q(x) = x + p`; otherwise the answer is an
//! enclosure `[m/N, (m+1)/N]` with `m = floor(g^N(0))`, which always contains
//! the rotation number because `g^N(x) - x - m` cannot be negative everywhere
//! (it is not at `x = 0`) and `g^N(x) - x - m - 1` cannot be positive
//! everywhere.
//!
//! Stable commutator length is read off as `|rot| / 2`: `scl` vanishes on
//! `T_tau` (its commutator subgroup is uniformly simple and of index two),
//! `rot` restricted to the lift has defect one, so `scl = |rot| / 2` on the
//! commutator subgroup of the lift, and since that subgroup has index two the
//! identity `scl(f) = scl(f^2) / 2` extends the formula to every element.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::circle::{
    c_from_rotation, lift_compose, lift_eval, lift_eval_ztau, lift_inverse, lift_power,
    lift_window, CircleMap,
};
use crate::error::{Error, Result};
use crate::plmap::{pl_shift_roots, PLMap, ShiftRoots};
use crate::ring::{rational_bracket, QTau, Rational, ZTau};
use crate::Budgets;

/// An element `g + n` of the lift, where `g` is the canonical lift of `base`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LiftMap {
    base: CircleMap,
    n: BigInt,
}

pub fn l_lift(g: &CircleMap, n: impl Into<BigInt>) -> LiftMap {
    LiftMap {
        base: g.clone(),
        n: n.into(),
    }
}

pub fn l_project(f: &LiftMap) -> CircleMap {
    f.base.clone()
}

impl LiftMap {
    pub fn identity() -> Self {
        l_lift(&CircleMap::identity(), 0)
    }

    /// `x -> x + alpha`.
    pub fn translation(alpha: &ZTau) -> Self {
        l_lift(&c_from_rotation(alpha), alpha.floor())
    }

    /// Splits a lift table on `[0, 1]` into base and integer part.
    pub fn from_table(table: &PLMap) -> Self {
        let win = lift_window(table, &ZTau::zero());
        let n = win.range().0.floor();
        let base = CircleMap::from_lift_table(win).expect("degree-one lift table");
        LiftMap { base, n }
    }

    pub fn base(&self) -> &CircleMap {
        &self.base
    }

    pub fn shift(&self) -> &BigInt {
        &self.n
    }

    /// The lift restricted to `[0, 1]`.
    pub fn table(&self) -> PLMap {
        if self.n.is_zero() {
            self.base.table().clone()
        } else {
            self.base
                .table()
                .translate(&ZTau::zero(), &ZTau::int(self.n.clone()))
        }
    }

    pub fn is_identity(&self) -> bool {
        self.n.is_zero() && self.base.is_identity()
    }

    /// `Some(alpha)` when the element is the translation by `alpha`.
    pub fn translation_amount(&self) -> Option<ZTau> {
        self.base
            .is_rotation()
            .then(|| self.base.base_value() + &ZTau::int(self.n.clone()))
    }

    pub fn eval(&self, x: &QTau) -> QTau {
        lift_eval(self.base.table(), x).add_ztau(&ZTau::int(self.n.clone()))
    }

    pub fn eval_ztau(&self, x: &ZTau) -> ZTau {
        &lift_eval_ztau(self.base.table(), x) + &ZTau::int(self.n.clone())
    }

    pub fn pieces(&self) -> usize {
        self.base.pieces()
    }
}

#[derive(Clone, Debug)]
pub enum LiftOp<'a> {
    Compose(&'a LiftMap, &'a LiftMap),
    Inverse(&'a LiftMap),
    Power(&'a LiftMap, i64),
}

pub fn l_group(op: LiftOp<'_>, piece_cap: usize) -> Result<LiftMap> {
    let out = match op {
        LiftOp::Compose(f, g) => l_compose(f, g),
        LiftOp::Inverse(f) => l_inverse(f),
        LiftOp::Power(f, k) => l_power(f, k, piece_cap)?,
    };
    if out.pieces() > piece_cap {
        return Err(Error::PowerBudgetExceeded(out.pieces(), piece_cap));
    }
    Ok(out)
}

/// `x -> g(f(x))`; the integer part is recomputed from the value at zero.
pub fn l_compose(f: &LiftMap, g: &LiftMap) -> LiftMap {
    LiftMap::from_table(&lift_compose(&f.table(), &g.table()))
}

pub fn l_inverse(f: &LiftMap) -> LiftMap {
    LiftMap::from_table(&lift_inverse(&f.table()))
}

pub fn l_power(f: &LiftMap, k: i64, piece_cap: usize) -> Result<LiftMap> {
    Ok(LiftMap::from_table(&lift_power(&f.table(), k, piece_cap)?))
}

/// `g^-1 f g`.
pub fn l_conjugate(f: &LiftMap, g: &LiftMap) -> LiftMap {
    l_compose(&l_compose(&l_inverse(g), f), g)
}

/// `[f, g] = f^-1 g^-1 f g`.
pub fn l_commutator(f: &LiftMap, g: &LiftMap) -> LiftMap {
    l_compose(&l_compose(&l_compose(&l_inverse(f), &l_inverse(g)), f), g)
}

/// Rotation number, exact or enclosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotResult {
    /// `g^q(root) = root + p` and `value = p / q`.
    ExactRational {
        value: Rational,
        q: u64,
        p: BigInt,
        root: QTau,
    },
    /// The element is the translation by `value`.
    ExactZTau { value: ZTau },
    /// `lo <= rot <= hi` with `lo = floor(g^N(0)) / N`, `hi = lo + 1/N`.
    Enclosure {
        lo: Rational,
        hi: Rational,
        iterations: u64,
        orbit_point: ZTau,
    },
}

impl RotResult {
    pub fn is_exact(&self) -> bool {
        !matches!(self, RotResult::Enclosure { .. })
    }

    /// Exact value in `Q(tau)`.
    pub fn exact_value(&self) -> Option<QTau> {
        match self {
            RotResult::ExactRational { value, .. } => Some(QTau::from_rational(value)),
            RotResult::ExactZTau { value } => Some(QTau::from(value)),
            RotResult::Enclosure { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RotResult::ExactRational { value, .. } => Some(value),
            _ => None,
        }
    }

    /// A rational interval containing the value (degenerate when exact rational).
    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            RotResult::ExactRational { value, .. } => (value.clone(), value.clone()),
            RotResult::ExactZTau { value } => {
                if let Some(n) = value.as_integer() {
                    let r = Rational::from_integer(n.clone());
                    return (r.clone(), r);
                }
                rational_bracket(&QTau::from(value), 1 << 40)
            }
            RotResult::Enclosure { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    /// Adds an integer, matching composition with a central translation.
    pub fn shifted(&self, n: &BigInt) -> RotResult {
        let nr = Rational::from_integer(n.clone());
        match self {
            RotResult::ExactRational { value, q, p, root } => RotResult::ExactRational {
                value: value + &nr,
                q: *q,
                p: p + n * BigInt::from(*q),
                root: root.clone(),
            },
            RotResult::ExactZTau { value } => RotResult::ExactZTau {
                value: value + &ZTau::int(n.clone()),
            },
            RotResult::Enclosure {
                lo,
                hi,
                iterations,
                orbit_point,
            } => RotResult::Enclosure {
                lo: lo + &nr,
                hi: hi + &nr,
                iterations: *iterations,
                orbit_point: orbit_point + &ZTau::int(n * BigInt::from(*iterations)),
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RotResult::ExactRational { value, q, p, root } => json!({
                "kind": "rational",
                "value": value.to_string(),
                "certificate": {"q": q.to_string(), "p": p.to_string(), "root": root.to_string()},
            }),
            RotResult::ExactZTau { value } => json!({
                "kind": "ztau",
                "value": value.to_string(),
                "certificate": {"translation": value.to_string()},
            }),
            RotResult::Enclosure {
                lo,
                hi,
                iterations,
                orbit_point,
            } => json!({
                "kind": "enclosure",
                "lo": lo.to_string(),
                "hi": hi.to_string(),
                "certificate": {"iterations": iterations.to_string(), "orbit_point": orbit_point.to_string()},
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<RotResult> {
        let field = |obj: &Value, k: &str| -> Result<String> {
            obj.get(k)
                .and_then(Value::as_str)
                .map(str::to_owned)
                .ok_or_else(|| Error::Schema(format!("missing string field {k:?}")))
        };
        let cert = v
            .get("certificate")
            .ok_or_else(|| Error::Schema("missing certificate".into()))?;
        let kind = field(v, "kind")?;
        let bad = |what: &str| Error::Schema(format!("malformed {what}"));
        match kind.as_str() {
            "rational" => Ok(RotResult::ExactRational {
                value: field(v, "value")?.parse().map_err(|_| bad("value"))?,
                q: field(cert, "q")?.parse().map_err(|_| bad("q"))?,
                p: field(cert, "p")?.parse().map_err(|_| bad("p"))?,
                root: field(cert, "root")?.parse().map_err(|_| bad("root"))?,
            }),
            "ztau" => Ok(RotResult::ExactZTau {
                value: field(v, "value")?.parse().map_err(|_| bad("value"))?,
            }),
            "enclosure" => Ok(RotResult::Enclosure {
                lo: field(v, "lo")?.parse().map_err(|_| bad("lo"))?,
                hi: field(v, "hi")?.parse().map_err(|_| bad("hi"))?,
                iterations: field(cert, "iterations")?.parse().map_err(|_| bad("iterations"))?,
                orbit_point: field(cert, "orbit_point")?
                    .parse()
                    .map_err(|_| bad("orbit_point"))?,
            }),
            other => Err(Error::Schema(format!("unknown rot kind {other:?}"))),
        }
    }
}

/// Outcome of testing a candidate `p/q` against the rotation number.
enum Verdict {
    Above,
    Below,
    Equal(QTau),
}

struct RotSearch<'a> {
    table: &'a PLMap,
    piece_cap: usize,
    powers: HashMap<u64, PLMap>,
}

impl<'a> RotSearch<'a> {
    fn classify(&mut self, p: &BigInt, q: u64) -> Result<Verdict> {
        if !self.powers.contains_key(&q) {
            let pw = lift_power(self.table, q as i64, self.piece_cap)?;
            self.powers.insert(q, pw);
        }
        let pw = &self.powers[&q];
        Ok(match pl_shift_roots(pw, &ZTau::int(p.clone())) {
            ShiftRoots::AllAbove => Verdict::Above,
            ShiftRoots::AllBelow => Verdict::Below,
            // an interval of periodic points still pins the rotation number
            other => Verdict::Equal(other.root().expect("root variant")),
        })
    }
}

/// `g^n(0)` for a lift table on `[0, 1]`, continuing from `start` after `done` steps.
fn orbit(table: &PLMap, start: ZTau, steps: u64) -> ZTau {
    let mut x = start;
    for _ in 0..steps {
        x = lift_eval_ztau(table, &x);
    }
    x
}

fn enclosure_from_orbit(point: ZTau, n: u64) -> RotResult {
    let m = point.floor();
    let nn = BigInt::from(n);
    RotResult::Enclosure {
        lo: Rational::new(m.clone(), nn.clone()),
        hi: Rational::new(m + 1, nn),
        iterations: n,
        orbit_point: point,
    }
}

/// The `N`-iteration enclosure alone.
pub fn l_rot_enclosure(f: &LiftMap, n: u64) -> RotResult {
    assert!(n > 0, "at least one iteration");
    let point = orbit(f.base.table(), ZTau::zero(), n);
    enclosure_from_orbit(point, n).shifted(&f.n)
}

pub fn l_rot(f: &LiftMap, budgets: &Budgets) -> Result<RotResult> {
    Ok(rot_of_base(f.base.table(), budgets)?.shifted(&f.n))
}

/// Orbit length used to bracket the rotation number before the exact search.
/// Orbits of contracting maps have exponentially growing conjugates, so this
/// stays short; the full `max_iter` orbit is only computed as a fallback.
const PROBE: u64 = 64;

fn rot_of_base(table: &PLMap, budgets: &Budgets) -> Result<RotResult> {
    let max_iter = budgets.max_iter.max(1);
    let max_den = budgets.max_den.max(1);
    if table.ks() == [0] {
        return Ok(RotResult::ExactZTau {
            value: table.range().0.clone(),
        });
    }
    // A short orbit either lands on an integer (0 is periodic) or yields the
    // enclosure used to prune the exact search.
    let probe = max_iter.min(PROBE);
    let mut x = ZTau::zero();
    for k in 1..=probe {
        x = lift_eval_ztau(table, &x);
        if k <= max_den {
            if let Some(p) = x.as_integer() {
                let value = Rational::new(p.clone(), BigInt::from(k));
                return Ok(RotResult::ExactRational {
                    value,
                    q: k,
                    p: p.clone(),
                    root: QTau::zero(),
                });
            }
        }
    }
    let m = x.floor();
    let lo = Rational::new(m.clone(), BigInt::from(probe));
    let hi = Rational::new(&m + 1, BigInt::from(probe));

    let mut search = RotSearch {
        table,
        piece_cap: budgets.piece_cap,
        powers: HashMap::new(),
    };
    match stern_brocot(&mut search, &lo, &hi, max_den) {
        Ok(Some((p, q, root))) => {
            return Ok(RotResult::ExactRational {
                value: Rational::new(p.clone(), BigInt::from(q)),
                q,
                p,
                root,
            })
        }
        Ok(None) | Err(Error::PowerBudgetExceeded(..)) => {}
        Err(e) => return Err(e),
    }
    let point = if probe >= max_iter {
        x
    } else {
        orbit(table, x, max_iter - probe)
    };
    Ok(enclosure_from_orbit(point, max_iter.max(probe)))
}

/// Descends the Stern-Brocot tree towards the rotation number. Candidates
/// outside the certified enclosure `[lo, hi]` are decided without computing
/// powers.
fn stern_brocot(
    search: &mut RotSearch<'_>,
    lo: &Rational,
    hi: &Rational,
    max_den: u64,
) -> Result<Option<(BigInt, u64, QTau)>> {
    let mut classify = |p: &BigInt, q: u64| -> Result<Verdict> {
        let c = Rational::new(p.clone(), BigInt::from(q));
        if &c < lo {
            Ok(Verdict::Above)
        } else if &c > hi {
            Ok(Verdict::Below)
        } else {
            search.classify(p, q)
        }
    };
    let base = lo.floor().to_integer();
    let (mut lp, mut lq) = (base.clone(), 1u64);
    let (mut rp, mut rq) = (&base + 1, 1u64);
    for (p, q) in [(&lp, lq), (&rp, rq)] {
        if let Verdict::Equal(root) = classify(p, q)? {
            return Ok(Some((p.clone(), q, root)));
        }
    }
    loop {
        let mq = lq + rq;
        if mq > max_den {
            return Ok(None);
        }
        let mp = &lp + &rp;
        match classify(&mp, mq)? {
            Verdict::Equal(root) => return Ok(Some((mp, mq, root))),
            Verdict::Above => {
                lp = mp;
                lq = mq;
            }
            Verdict::Below => {
                rp = mp;
                rq = mq;
            }
        }
    }
}

/// Re-checks a rotation-number answer against the element.
pub fn verify_rot(f: &LiftMap, r: &RotResult) -> Result<()> {
    let fail = |m: String| Err(Error::Certificate(m));
    match r {
        RotResult::ExactZTau { value } => match f.translation_amount() {
            Some(a) if &a == value => Ok(()),
            _ => fail(format!("element is not the translation by {value}")),
        },
        RotResult::ExactRational { value, q, p, root } => {
            if *q == 0 || Rational::new(p.clone(), BigInt::from(*q)) != *value {
                return fail("value is not p/q".into());
            }
            let mut x = root.clone();
            for _ in 0..*q {
                x = f.eval(&x);
            }
            if x != root.add_ztau(&ZTau::int(p.clone())) {
                return fail(format!("g^{q}(root) != root + {p}"));
            }
            Ok(())
        }
        RotResult::Enclosure {
            lo,
            hi,
            iterations,
            orbit_point,
        } => {
            if *iterations == 0 {
                return fail("zero iterations".into());
            }
            let pt = orbit(&f.table(), ZTau::zero(), *iterations);
            if &pt != orbit_point {
                return fail("orbit point does not match".into());
            }
            let expect = enclosure_from_orbit(pt, *iterations);
            match expect {
                RotResult::Enclosure { lo: l, hi: h, .. } if &l == lo && &h == hi => Ok(()),
                _ => fail("enclosure does not match the orbit".into()),
            }
        }
    }
}

/// Stable commutator length, `|rot| / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SclResult {
    Rational { value: Rational, rot: RotResult },
    /// `value = alpha / 2` with `alpha = |rot|` in `Z[tau]`.
    ZTauHalf { alpha: ZTau, rot: RotResult },
    Enclosure { lo: Rational, hi: Rational, rot: RotResult },
}

impl SclResult {
    pub fn rot(&self) -> &RotResult {
        match self {
            SclResult::Rational { rot, .. }
            | SclResult::ZTauHalf { rot, .. }
            | SclResult::Enclosure { rot, .. } => rot,
        }
    }

    pub fn exact_value(&self) -> Option<QTau> {
        match self {
            SclResult::Rational { value, .. } => Some(QTau::from_rational(value)),
            SclResult::ZTauHalf { alpha, .. } => {
                Some(QTau::new(alpha.clone(), 2).expect("nonzero"))
            }
            SclResult::Enclosure { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SclResult::Rational { value, rot } => json!({
                "kind": "rational",
                "value": value.to_string(),
                "certificate": rot.to_json(),
            }),
            SclResult::ZTauHalf { alpha, rot } => json!({
                "kind": "ztau-half",
                "value": format!("({})/2", alpha.full_form()),
                "certificate": rot.to_json(),
            }),
            SclResult::Enclosure { lo, hi, rot } => json!({
                "kind": "enclosure",
                "lo": lo.to_string(),
                "hi": hi.to_string(),
                "certificate": rot.to_json(),
            }),
        }
    }
}

pub fn scl_from_rot(rot: RotResult) -> SclResult {
    let two = Rational::from_integer(BigInt::from(2));
    match &rot {
        RotResult::ExactRational { value, .. } => SclResult::Rational {
            value: value.abs() / &two,
            rot,
        },
        RotResult::ExactZTau { value } => SclResult::ZTauHalf {
            alpha: value.abs(),
            rot,
        },
        RotResult::Enclosure { lo, hi, .. } => {
            let zero = Rational::zero();
            let (l, h) = if lo >= &zero {
                (lo.clone(), hi.clone())
            } else if hi <= &zero {
                (-hi.clone(), -lo.clone())
            } else {
                (zero, std::cmp::max(-lo.clone(), hi.clone()))
            };
            SclResult::Enclosure {
                lo: l / &two,
                hi: h / &two,
                rot,
            }
        }
    }
}

pub fn l_scl(f: &LiftMap, budgets: &Budgets) -> Result<SclResult> {
    Ok(scl_from_rot(l_rot(f, budgets)?))
}

/// `|rot(f) + rot(g) - rot(fg)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefectValue {
    Exact(QTau),
    Enclosure(Rational, Rational),
}

impl DefectValue {
    /// A certified lower bound.
    pub fn lower_bound(&self) -> Rational {
        match self {
            DefectValue::Exact(q) => match q.as_rational() {
                Some(r) => r,
                None => rational_bracket(q, 1 << 40).0,
            },
            DefectValue::Enclosure(lo, _) => lo.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DefectValue::Exact(q) => match q.as_rational() {
                Some(r) => json!({"kind": "rational", "value": r.to_string()}),
                None => match q.as_ztau() {
                    Some(z) => json!({"kind": "qtau", "value": z.to_string()}),
                    None => json!({"kind": "qtau", "value": q.to_string()}),
                },
            },
            DefectValue::Enclosure(lo, hi) => {
                json!({"kind": "enclosure", "lo": lo.to_string(), "hi": hi.to_string()})
            }
        }
    }
}

pub fn defect_from_rots(rf: &RotResult, rg: &RotResult, rfg: &RotResult) -> DefectValue {
    if let (Some(a), Some(b), Some(c)) = (rf.exact_value(), rg.exact_value(), rfg.exact_value()) {
        return DefectValue::Exact((&(&a + &b) - &c).abs());
    }
    let (al, ah) = rf.bounds();
    let (bl, bh) = rg.bounds();
    let (cl, ch) = rfg.bounds();
    let lo = &(&al + &bl) - &ch;
    let hi = &(&ah + &bh) - &cl;
    let zero = Rational::zero();
    if lo >= zero {
        DefectValue::Enclosure(lo, hi)
    } else if hi <= zero {
        DefectValue::Enclosure(-hi, -lo)
    } else {
        DefectValue::Enclosure(zero, std::cmp::max(-lo, hi))
    }
}

pub fn l_defect_delta(f: &LiftMap, g: &LiftMap, budgets: &Budgets) -> Result<DefectValue> {
    let fg = l_group(LiftOp::Compose(f, g), budgets.piece_cap)?;
    Ok(defect_from_rots(
        &l_rot(f, budgets)?,
        &l_rot(g, budgets)?,
        &l_rot(&fg, budgets)?,
    ))
}

/// One evaluated pair.
#[derive(Clone, Debug)]
pub struct DefectEntry {
    pub rot_f: RotResult,
    pub rot_g: RotResult,
    pub rot_fg: RotResult,
    pub delta: DefectValue,
}

/// Defect values over a batch of pairs with the index of the largest exact one.
#[derive(Clone, Debug, Default)]
pub struct DefectReport {
    pub entries: Vec<DefectEntry>,
    pub best: Option<usize>,
}

pub fn defect_report(pairs: &[(LiftMap, LiftMap)], budgets: &Budgets) -> Result<DefectReport> {
    let entries = crate::par::try_map(pairs, |(f, g)| {
        let fg = l_group(LiftOp::Compose(f, g), budgets.piece_cap)?;
        let rot_f = l_rot(f, budgets)?;
        let rot_g = l_rot(g, budgets)?;
        let rot_fg = l_rot(&fg, budgets)?;
        let delta = defect_from_rots(&rot_f, &rot_g, &rot_fg);
        Ok(DefectEntry {
            rot_f,
            rot_g,
            rot_fg,
            delta,
        })
    })?;
    let mut best: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        if let DefectValue::Exact(d) = &e.delta {
            let better = match best.map(|b| &entries[b].delta) {
                Some(DefectValue::Exact(cur)) => d > cur,
                _ => true,
            };
            if better {
                best = Some(i);
            }
        }
    }
    Ok(DefectReport { entries, best })
}

/// `k p / q` helper used by homogeneity checks.
pub fn scale_rational(r: &Rational, k: i64) -> Rational {
    r * Rational::from_integer(BigInt::from(k))
}

/// Whether `r` has denominator dividing `q`.
pub fn denominator_divides(r: &Rational, q: u64) -> bool {
    BigInt::from(q).is_multiple_of(r.denom())
}
