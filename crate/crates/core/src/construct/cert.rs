//! Certificates and their re-checking.
//!
//! A certificate names the elements it involves, carried inline as tables,
//! and lists definitions `name = expression` over them. Checking evaluates the
//! definitions in order; a definition whose name is already bound asserts
//! that the two values are equal. The type-specific side conditions are then
//! checked directly on the tables.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::expr::{evaluate_str, json::envelope, Env};
use crate::lift::DefectValue;
use crate::plmap::{pl_compose, pl_inverse, pl_is_ftau, Flavor, PLMap};
use crate::ring::{Rational, ZTau};
use crate::Budgets;

use super::factor::{FactorCertificate, TrickCertificate};
use super::matching::check_tuple;
use super::witness::DefectWitness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityCertificate {
    pub xs: Vec<ZTau>,
    pub ys: Vec<ZTau>,
    pub element: PLMap,
    /// `(l, f)` with `element = [l, f]` for the commutator construction.
    pub commutator: Option<(PLMap, PLMap)>,
}

impl TransitivityCertificate {
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Certificate(m));
        if self.xs.len() != self.ys.len() {
            return fail("tuples differ in length".into());
        }
        let (zero, one) = (ZTau::zero(), ZTau::one());
        check_tuple(&self.xs, &zero, &one)?;
        check_tuple(&self.ys, &zero, &one)?;
        if !pl_is_ftau(&self.element, &Flavor::Ftau) {
            return fail("element is not in F_tau".into());
        }
        for (i, (x, y)) in self.xs.iter().zip(&self.ys).enumerate() {
            if &self.element.eval_ztau(x)? != y {
                return fail(format!("x_{i} is not sent to y_{i}"));
            }
        }
        if let Some((l, f)) = &self.commutator {
            if !pl_is_ftau(l, &Flavor::Ftau) || !pl_is_ftau(f, &Flavor::Ftau) {
                return fail("commutator factors are not in F_tau".into());
            }
            let c = pl_compose(
                &pl_compose(&pl_compose(&pl_inverse(l), &pl_inverse(f))?, l)?,
                f,
            )?;
            if c != self.element {
                return fail("element != [l, f]".into());
            }
            if !pl_is_ftau(&self.element, &Flavor::FtauC) {
                return fail("element is not supported away from 0 and 1".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Transitivity(TransitivityCertificate),
    Factor(FactorCertificate),
    Trick(TrickCertificate),
    Defect(DefectWitness),
}

const TRANSITIVITY_DERIVED: &[(&str, &str)] = &[("g", "comm(l, f)")];
const FACTOR: &[(&str, &str)] = &[
    ("f", "comm(l, m)"),
    ("h3", "comm(h2, h1)"),
    ("u", "g * inv(f) * inv(h3)"),
    ("v", "h3 * f"),
    ("g", "u * v"),
];
const TRICK: &[(&str, &str)] = &[("k", "comm(g, h)"), ("k", "inv(g) * conj(g, h)")];

fn zt(z: &ZTau) -> Value {
    serde_json::to_value(z).expect("serializable")
}

fn zts(v: &[ZTau]) -> Value {
    Value::Array(v.iter().map(zt).collect())
}

impl Certificate {
    pub fn type_name(&self) -> &'static str {
        match self {
            Certificate::Transitivity(_) => "transitivity",
            Certificate::Factor(_) => "factor",
            Certificate::Trick(_) => "commutator-trick",
            Certificate::Defect(_) => "defect",
        }
    }

    fn defs(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Certificate::Transitivity(c) if c.commutator.is_some() => TRANSITIVITY_DERIVED,
            Certificate::Factor(_) => FACTOR,
            Certificate::Trick(_) => TRICK,
            _ => &[],
        }
    }

    fn elements(&self) -> Vec<(&'static str, Element)> {
        match self {
            Certificate::Transitivity(c) => {
                let mut v = vec![("g", Element::Interval(c.element.clone()))];
                if let Some((l, f)) = &c.commutator {
                    v.push(("l", Element::Interval(l.clone())));
                    v.push(("f", Element::Interval(f.clone())));
                }
                v
            }
            Certificate::Factor(c) => vec![
                ("g", c.g.clone().into()),
                ("l", c.l.clone().into()),
                ("m", c.m.clone().into()),
                ("h1", c.h1.clone().into()),
                ("h2", c.h2.clone().into()),
                ("u", c.u.clone().into()),
                ("v", c.v.clone().into()),
            ],
            Certificate::Trick(c) => vec![
                ("g", c.g.clone().into()),
                ("h", c.h.clone().into()),
                ("k", c.k.clone().into()),
            ],
            Certificate::Defect(w) => vec![("g", w.g.clone().into()), ("h", w.h.clone().into())],
        }
    }

    fn data(&self) -> Value {
        match self {
            Certificate::Transitivity(c) => json!({
                "xs": zts(&c.xs),
                "ys": zts(&c.ys),
                "derived": c.commutator.is_some(),
            }),
            Certificate::Factor(c) => json!({
                "x": zt(&c.x), "y": zt(&c.y), "a": zt(&c.arc.0), "b": zt(&c.arc.1),
            }),
            Certificate::Trick(c) => json!({
                "x": zt(&c.x), "a": zt(&c.arc.0), "b": zt(&c.arc.1),
            }),
            Certificate::Defect(w) => {
                let mut m = Map::new();
                m.insert("delta".into(), w.delta.to_json());
                if let Some(n) = w.n {
                    m.insert("n".into(), json!(n.to_string()));
                }
                if let Some(s) = w.seed {
                    m.insert("seed".into(), json!(s.to_string()));
                }
                Value::Object(m)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let elements: Map<String, Value> = self
            .elements()
            .into_iter()
            .map(|(k, e)| (k.to_owned(), e.to_json()))
            .collect();
        let defs: Vec<Value> = self.defs().iter().map(|(n, e)| json!([n, e])).collect();
        envelope(
            "certificate",
            "certificate",
            json!({
                "type": self.type_name(),
                "elements": elements,
                "defs": defs,
                "data": self.data(),
            }),
        )
    }

    pub fn from_json(doc: &Value) -> Result<Certificate> {
        let (kind, obj) = crate::expr::json::open_envelope(doc)?;
        if kind != "certificate" {
            return Err(Error::Schema(format!("expected a certificate, found {kind:?}")));
        }
        let body = obj
            .get("certificate")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Schema("missing \"certificate\" object".into()))?;
        let ty = body
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Schema("missing certificate type".into()))?;
        let raw_elements = body
            .get("elements")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Schema("missing \"elements\"".into()))?;
        let mut elements = BTreeMap::new();
        for (k, v) in raw_elements {
            elements.insert(k.clone(), Element::from_json(v)?);
        }
        let data = body
            .get("data")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Schema("missing \"data\"".into()))?;
        let el = |name: &str| -> Result<&Element> {
            elements
                .get(name)
                .ok_or_else(|| Error::Schema(format!("missing element {name:?}")))
        };
        let circle = |name: &str| -> Result<crate::circle::CircleMap> {
            el(name)?
                .as_circle()
                .cloned()
                .ok_or_else(|| Error::Schema(format!("{name} must be a circle map")))
        };
        let interval = |name: &str| -> Result<PLMap> {
            el(name)?
                .as_interval()
                .cloned()
                .ok_or_else(|| Error::Schema(format!("{name} must be an interval map")))
        };
        let lift = |name: &str| -> Result<crate::lift::LiftMap> {
            el(name)?
                .as_lift()
                .cloned()
                .ok_or_else(|| Error::Schema(format!("{name} must be a lift")))
        };
        let point = |k: &str| -> Result<ZTau> {
            let v = data
                .get(k)
                .ok_or_else(|| Error::Schema(format!("missing data field {k:?}")))?;
            serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))
        };
        let points = |k: &str| -> Result<Vec<ZTau>> {
            let v = data
                .get(k)
                .ok_or_else(|| Error::Schema(format!("missing data field {k:?}")))?;
            serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))
        };
        let cert = match ty {
            "transitivity" => {
                let derived = data.get("derived").and_then(Value::as_bool).unwrap_or(false);
                Certificate::Transitivity(TransitivityCertificate {
                    xs: points("xs")?,
                    ys: points("ys")?,
                    element: interval("g")?,
                    commutator: if derived {
                        Some((interval("l")?, interval("f")?))
                    } else {
                        None
                    },
                })
            }
            "factor" => Certificate::Factor(FactorCertificate {
                g: circle("g")?,
                x: point("x")?,
                y: point("y")?,
                arc: (point("a")?, point("b")?),
                l: circle("l")?,
                m: circle("m")?,
                h1: circle("h1")?,
                h2: circle("h2")?,
                u: circle("u")?,
                v: circle("v")?,
            }),
            "commutator-trick" => Certificate::Trick(TrickCertificate {
                g: circle("g")?,
                x: point("x")?,
                arc: (point("a")?, point("b")?),
                h: circle("h")?,
                k: circle("k")?,
            }),
            "defect" => {
                let int = |k: &str| -> Result<Option<u64>> {
                    data.get(k)
                        .map(|v| {
                            v.as_str()
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| Error::Schema(format!("bad {k}")))
                        })
                        .transpose()
                };
                Certificate::Defect(DefectWitness {
                    g: lift("g")?,
                    h: lift("h")?,
                    delta: defect_value_from_json(
                        data.get("delta")
                            .ok_or_else(|| Error::Schema("missing delta".into()))?,
                    )?,
                    n: int("n")?,
                    seed: int("seed")?,
                })
            }
            other => return Err(Error::Schema(format!("unknown certificate type {other:?}"))),
        };
        let names: Vec<&str> = cert.elements().iter().map(|(k, _)| *k).collect();
        if let Some(extra) = elements.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(Error::Schema(format!("unexpected element {extra:?}")));
        }
        let defs = body.get("defs").cloned().unwrap_or(Value::Array(vec![]));
        let expected: Vec<Value> = cert.defs().iter().map(|(n, e)| json!([n, e])).collect();
        if defs != Value::Array(expected) {
            return Err(Error::Schema(format!(
                "definitions do not match the {ty} certificate form"
            )));
        }
        Ok(cert)
    }

    /// Re-evaluates every definition and re-checks every side condition.
    pub fn check(&self, budgets: &Budgets) -> Result<()> {
        let mut env: Env = self
            .elements()
            .into_iter()
            .map(|(k, e)| (k.to_owned(), e))
            .collect();
        for (name, text) in self.defs() {
            let val = evaluate_str(text, &env, budgets)?;
            match env.get(*name) {
                Some(prev) if prev != &val => {
                    return Err(Error::Certificate(format!("{name} != {text}")));
                }
                Some(_) => {}
                None => {
                    env.insert((*name).to_owned(), val);
                }
            }
        }
        match self {
            Certificate::Transitivity(c) => c.check(),
            Certificate::Factor(c) => c.check_direct(),
            Certificate::Trick(c) => c.check_direct(),
            Certificate::Defect(w) => w.check_direct(budgets),
        }
    }
}

pub(crate) fn defect_value_from_json(v: &Value) -> Result<DefectValue> {
    let s = |k: &str| -> Result<&str> {
        v.get(k)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Schema(format!("defect needs {k:?}")))
    };
    let bad = |k: &str| Error::Schema(format!("malformed defect {k}"));
    match s("kind")? {
        "rational" => {
            let r: Rational = s("value")?.parse().map_err(|_| bad("value"))?;
            Ok(DefectValue::Exact(crate::ring::QTau::from_rational(&r)))
        }
        "qtau" => Ok(DefectValue::Exact(s("value")?.parse().map_err(|_| bad("value"))?)),
        "enclosure" => Ok(DefectValue::Enclosure(
            s("lo")?.parse().map_err(|_| bad("lo"))?,
            s("hi")?.parse().map_err(|_| bad("hi"))?,
        )),
        other => Err(Error::Schema(format!("unknown defect kind {other:?}"))),
    }
}

impl From<TransitivityCertificate> for Certificate {
    fn from(c: TransitivityCertificate) -> Self {
        Certificate::Transitivity(c)
    }
}

impl From<FactorCertificate> for Certificate {
    fn from(c: FactorCertificate) -> Self {
        Certificate::Factor(c)
    }
}

impl From<TrickCertificate> for Certificate {
    fn from(c: TrickCertificate) -> Self {
        Certificate::Trick(c)
    }
}

impl From<DefectWitness> for Certificate {
    fn from(w: DefectWitness) -> Self {
        Certificate::Defect(w)
    }
}
