//! A small language for writing group elements, and the canonical JSON forms
//! of elements and results.
//!
//! ```text
//! program := ('let' ident '=' expr ';')* expr [';']
//! expr    := term (('*' | '∘') term)*
//! term    := atom ['^' int]
//! atom    := 'rot(' ztau ')' | 'trans(' ztau ')' | 'inv(' expr ')'
//!          | 'comm(' expr ',' expr ')' | 'conj(' expr ',' expr ')'
//!          | 'lift(' expr ',' int ')' | 'map' json | 'treepair' json
//!          | ident | '(' expr ')'
//! ```
//!
//! `a * b` applies `a` first. `comm(a, b) = a^-1 b^-1 a b` and
//! `conj(a, b) = b^-1 a b`. Interval maps on `[0, 1]` are promoted to circle
//! maps when combined with one; circle maps only reach the lift through
//! `lift(g, n)`, the canonical lift of `g` followed by `x -> x + n`. Applied
//! to something already on the line, `lift(g, n)` just adds `n`.

mod eval;
pub mod json;
mod parse;

use std::fmt;

use num_bigint::BigInt;

use crate::circle::SubdivisionTree;
use crate::element::Element;
use crate::ring::ZTau;

pub use eval::{eval_expr, evaluate, evaluate_in, evaluate_str, Env};
pub use parse::{parse, parse_expr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Rotation of the circle by a ring element.
    Rot(ZTau),
    /// Translation of the line by a ring element.
    Trans(ZTau),
    Map(Element),
    TreePair(SubdivisionTree, SubdivisionTree, i64),
    Compose(Box<Expr>, Box<Expr>),
    Inverse(Box<Expr>),
    Power(Box<Expr>, i64),
    Comm(Box<Expr>, Box<Expr>),
    Conj(Box<Expr>, Box<Expr>),
    Lift(Box<Expr>, BigInt),
    Ident(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub lets: Vec<(String, Expr)>,
    pub body: Expr,
}

impl Expr {
    pub fn compose(a: Expr, b: Expr) -> Expr {
        Expr::Compose(Box::new(a), Box::new(b))
    }

    /// An element written back as a literal.
    pub fn literal(e: &Element) -> Expr {
        Expr::Map(e.clone())
    }
}

impl From<Expr> for Program {
    fn from(body: Expr) -> Self {
        Program {
            lets: Vec::new(),
            body,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Rot(z) => write!(f, "rot({z})"),
            Expr::Trans(z) => write!(f, "trans({z})"),
            Expr::Map(e) => write!(f, "map {}", json::canonical(&e.to_json())),
            Expr::TreePair(p, q, s) => {
                let v = serde_json::json!({"p": p.to_json(), "q": q.to_json(), "shift": s.to_string()});
                write!(f, "treepair {}", json::canonical(&v))
            }
            Expr::Compose(a, b) => {
                write!(f, "{a} * ")?;
                match **b {
                    Expr::Compose(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Expr::Power(e, k) => match **e {
                Expr::Compose(..) | Expr::Power(..) => write!(f, "({e})^{k}"),
                _ => write!(f, "{e}^{k}"),
            },
            Expr::Inverse(e) => write!(f, "inv({e})"),
            Expr::Comm(a, b) => write!(f, "comm({a}, {b})"),
            Expr::Conj(a, b) => write!(f, "conj({a}, {b})"),
            Expr::Lift(e, n) => write!(f, "lift({e}, {n})"),
            Expr::Ident(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in &self.lets {
            writeln!(f, "let {name} = {e};")?;
        }
        write!(f, "{}", self.body)
    }
}

/// Source text for an element; evaluating it gives the element back.
pub fn print_element(e: &Element) -> String {
    Expr::literal(e).to_string()
}
