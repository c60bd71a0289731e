use std::collections::BTreeMap;

use crate::circle::{
    c_compose, c_from_rotation, c_from_subdivision_pair, c_inverse, c_power, CircleMap,
};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::lift::{l_compose, l_inverse, l_lift, l_power, LiftMap};
use crate::plmap::{pl_compose, pl_inverse, PLMap};
use crate::Budgets;

use super::{parse, Expr, Program};

/// Named values visible to an expression.
pub type Env = BTreeMap<String, Element>;

pub fn evaluate(p: &Program, budgets: &Budgets) -> Result<Element> {
    evaluate_in(p, &Env::new(), budgets)
}

pub fn evaluate_in(p: &Program, env: &Env, budgets: &Budgets) -> Result<Element> {
    let mut env = env.clone();
    for (name, e) in &p.lets {
        let v = eval_expr(e, &env, budgets)?;
        env.insert(name.clone(), v);
    }
    eval_expr(&p.body, &env, budgets)
}

pub fn evaluate_str(text: &str, env: &Env, budgets: &Budgets) -> Result<Element> {
    evaluate_in(&parse(text)?, env, budgets)
}

fn cap(e: Element, budgets: &Budgets) -> Result<Element> {
    if e.pieces() > budgets.piece_cap {
        return Err(Error::PowerBudgetExceeded(e.pieces(), budgets.piece_cap));
    }
    Ok(e)
}

pub fn eval_expr(e: &Expr, env: &Env, budgets: &Budgets) -> Result<Element> {
    let out = match e {
        Expr::Rot(z) => Element::Circle(c_from_rotation(z)),
        Expr::Trans(z) => Element::Lift(LiftMap::translation(z)),
        Expr::Map(el) => el.clone(),
        Expr::TreePair(p, q, s) => Element::Circle(c_from_subdivision_pair(p, q, *s)?),
        Expr::Ident(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Type(format!("unbound identifier {name:?}")))?,
        Expr::Compose(a, b) => {
            let a = eval_expr(a, env, budgets)?;
            let b = eval_expr(b, env, budgets)?;
            compose(&a, &b)?
        }
        Expr::Inverse(a) => inverse(&eval_expr(a, env, budgets)?),
        Expr::Power(a, k) => power(&eval_expr(a, env, budgets)?, *k, budgets)?,
        Expr::Comm(a, b) => {
            let a = eval_expr(a, env, budgets)?;
            let b = eval_expr(b, env, budgets)?;
            let ab = compose(&inverse(&a), &inverse(&b))?;
            compose(&compose(&ab, &a)?, &b)?
        }
        Expr::Conj(a, b) => {
            let a = eval_expr(a, env, budgets)?;
            let b = eval_expr(b, env, budgets)?;
            compose(&compose(&inverse(&b), &a)?, &b)?
        }
        Expr::Lift(a, n) => match eval_expr(a, env, budgets)? {
            // already on the line: compose with the central translation by n
            Element::Lift(g) => Element::Lift(l_lift(g.base(), g.shift() + n)),
            other => Element::Lift(l_lift(&promote(&other)?, n.clone())),
        },
    };
    cap(out, budgets)
}

fn promote(e: &Element) -> Result<CircleMap> {
    e.to_circle().map_err(|err| match err {
        Error::NotFtau => Error::Type("interval map is not an element of F_tau".into()),
        other => other,
    })
}

fn compose(a: &Element, b: &Element) -> Result<Element> {
    use Element::*;
    Ok(match (a, b) {
        (Interval(g), Interval(h)) => Interval(pl_compose(g, h)?),
        (Lift(g), Lift(h)) => Lift(l_compose(g, h)),
        (Lift(_), _) | (_, Lift(_)) => {
            return Err(Error::Type(format!(
                "cannot compose a {} with a {}; lift the circle map explicitly",
                a.type_name(),
                b.type_name()
            )))
        }
        _ => Circle(c_compose(&promote(a)?, &promote(b)?)),
    })
}

fn inverse(a: &Element) -> Element {
    match a {
        Element::Interval(g) => Element::Interval(pl_inverse(g)),
        Element::Circle(g) => Element::Circle(c_inverse(g)),
        Element::Lift(g) => Element::Lift(l_inverse(g)),
    }
}

fn power(a: &Element, k: i64, budgets: &Budgets) -> Result<Element> {
    Ok(match a {
        Element::Interval(g) => Element::Interval(pl_power(g, k, budgets.piece_cap)?),
        Element::Circle(g) => Element::Circle(c_power(g, k, budgets.piece_cap)?),
        Element::Lift(g) => Element::Lift(l_power(g, k, budgets.piece_cap)?),
    })
}

fn pl_power(g: &PLMap, k: i64, piece_cap: usize) -> Result<PLMap> {
    match k {
        1 => return Ok(g.clone()),
        -1 => return Ok(pl_inverse(g)),
        _ => {}
    }
    let (lo, hi) = g.domain();
    if g.range() != (lo, hi) {
        return Err(Error::DomainMismatch);
    }
    let mut base = if k < 0 { pl_inverse(g) } else { g.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = PLMap::identity_on(lo.clone(), hi.clone());
    while e > 0 {
        if e & 1 == 1 {
            acc = pl_compose(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = pl_compose(&base, &base)?;
        }
        if acc.pieces().max(base.pieces()) > piece_cap {
            return Err(Error::PowerBudgetExceeded(acc.pieces().max(base.pieces()), piece_cap));
        }
    }
    Ok(acc)
}
