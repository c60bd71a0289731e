//! A value of any of the three group types, as produced by expressions and
//! stored in certificates.

use serde_json::{json, Value};

use crate::circle::{c_from_interval_map, CircleMap};
use crate::error::{Error, Result};
use crate::lift::{l_lift, LiftMap};
use crate::plmap::PLMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    /// An element of `F_tau`, or any interval map when produced by a construction.
    Interval(PLMap),
    Circle(CircleMap),
    Lift(LiftMap),
}

impl Element {
    pub fn type_name(&self) -> &'static str {
        match self {
            Element::Interval(_) => "interval map",
            Element::Circle(_) => "circle map",
            Element::Lift(_) => "lift",
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Element::Interval(g) => g.is_identity(),
            Element::Circle(g) => g.is_identity(),
            Element::Lift(g) => g.is_identity(),
        }
    }

    pub fn pieces(&self) -> usize {
        match self {
            Element::Interval(g) => g.pieces(),
            Element::Circle(g) => g.pieces(),
            Element::Lift(g) => g.pieces(),
        }
    }

    /// Views an `F_tau` element as a circle map.
    pub fn to_circle(&self) -> Result<CircleMap> {
        match self {
            Element::Interval(g) => c_from_interval_map(g),
            Element::Circle(g) => Ok(g.clone()),
            Element::Lift(_) => Err(Error::Type(
                "a lift does not project implicitly; use a circle map".into(),
            )),
        }
    }

    pub fn to_lift(&self) -> Result<LiftMap> {
        match self {
            Element::Lift(g) => Ok(g.clone()),
            other => Err(Error::Type(format!(
                "expected a lift, found a {}; wrap it in lift(_, n)",
                other.type_name()
            ))),
        }
    }

    pub fn as_interval(&self) -> Option<&PLMap> {
        match self {
            Element::Interval(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_circle(&self) -> Option<&CircleMap> {
        match self {
            Element::Circle(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_lift(&self) -> Option<&LiftMap> {
        match self {
            Element::Lift(g) => Some(g),
            _ => None,
        }
    }

    /// Interval maps as `{xs, ys, ks}`, circle maps additionally carry `v`,
    /// lifts are `{base, n}`.
    pub fn to_json(&self) -> Value {
        match self {
            Element::Interval(g) => serde_json::to_value(g).expect("serializable"),
            Element::Circle(g) => serde_json::to_value(g).expect("serializable"),
            Element::Lift(g) => json!({
                "base": serde_json::to_value(g.base()).expect("serializable"),
                "n": g.shift().to_string(),
            }),
        }
    }

    /// Re-validates everything it reads.
    pub fn from_json(v: &Value) -> Result<Element> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema("element must be a JSON object".into()))?;
        if obj.contains_key("base") {
            if obj.len() != 2 || !obj.contains_key("n") {
                return Err(Error::Schema("lift needs exactly base and n".into()));
            }
            let base = circle_from_json(&obj["base"])?;
            let n = obj["n"]
                .as_str()
                .and_then(|s| s.parse::<num_bigint::BigInt>().ok())
                .ok_or_else(|| Error::Schema("n must be a decimal string".into()))?;
            return Ok(Element::Lift(l_lift(&base, n)));
        }
        if obj.contains_key("v") {
            return Ok(Element::Circle(circle_from_json(v)?));
        }
        let raw: crate::plmap::RawTable =
            serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
        let g = crate::plmap::pl_validate(&raw).map_err(|e| Error::Validation(Box::new(e)))?;
        Ok(Element::Interval(g))
    }
}

fn circle_from_json(v: &Value) -> Result<CircleMap> {
    let repr: crate::circle::CircleRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
    repr.into_circle().map_err(|e| Error::Validation(Box::new(e)))
}

impl From<PLMap> for Element {
    fn from(g: PLMap) -> Self {
        Element::Interval(g)
    }
}

impl From<CircleMap> for Element {
    fn from(g: CircleMap) -> Self {
        Element::Circle(g)
    }
}

impl From<LiftMap> for Element {
    fn from(g: LiftMap) -> Self {
        Element::Lift(g)
    }
}
