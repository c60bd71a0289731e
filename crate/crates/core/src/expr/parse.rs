use num_bigint::BigInt;
use serde_json::Value;

use crate::circle::SubdivisionTree;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::ring::ZTau;

use super::{Expr, Program};

const KEYWORDS: &[&str] = &[
    "let", "rot", "trans", "inv", "comm", "conj", "lift", "map", "treepair",
];

/// Parses a whole program; trailing input is an error.
pub fn parse(text: &str) -> Result<Program> {
    let mut p = Parser { src: text, pos: 0 };
    let prog = p.program()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(prog)
}

/// Parses a single expression without `let` bindings.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let prog = parse(text)?;
    if !prog.lets.is_empty() {
        return Err(Error::Syntax {
            line: 1,
            col: 1,
            msg: "let bindings are not allowed here".into(),
        });
    }
    Ok(prog.body)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        self.error_at(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let t = r.trim_start();
            self.pos += r.len() - t.len();
            if t.starts_with('#') {
                self.pos += t.find('\n').unwrap_or(t.len());
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let r = self.rest();
        let mut chars = r.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(r.len(), |(i, _)| i);
        self.pos += end;
        Some(&r[..end])
    }

    fn peek_ident(&mut self) -> Option<&'a str> {
        let save = self.pos;
        let id = self.ident();
        self.pos = save;
        id
    }

    fn program(&mut self) -> Result<Program> {
        let mut lets = Vec::new();
        while self.peek_ident() == Some("let") {
            self.ident();
            let start = {
                self.skip_ws();
                self.pos
            };
            let name = self
                .ident()
                .ok_or_else(|| self.error("expected a name after 'let'"))?;
            if KEYWORDS.contains(&name) {
                return Err(self.error_at(start, format!("'{name}' is a reserved word")));
            }
            self.expect('=')?;
            let e = self.expr()?;
            self.expect(';')?;
            lets.push((name.to_owned(), e));
        }
        if self.peek().is_none() {
            return Err(self.error("expected an expression"));
        }
        let body = self.expr()?;
        self.eat(';');
        Ok(Program { lets, body })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.eat('*') || self.eat('∘') {
            let rhs = self.term()?;
            lhs = Expr::compose(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let a = self.atom()?;
        if self.eat('^') {
            let k = if self.eat('(') {
                let k = self.int()?;
                self.expect(')')?;
                k
            } else {
                self.int()?
            };
            let k = i64::try_from(&k).map_err(|_| self.error("exponent out of range"))?;
            return Ok(Expr::Power(Box::new(a), k));
        }
        Ok(a)
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        let r = self.rest();
        let mut end = 0;
        if r.starts_with('-') || r.starts_with('+') {
            end = 1;
        }
        let digits = r[end..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected an integer"));
        }
        end += digits;
        self.pos += end;
        r[..end]
            .trim_start_matches('+')
            .parse()
            .map_err(|_| self.error_at(start, "bad integer"))
    }

    fn ztau(&mut self) -> Result<ZTau> {
        self.skip_ws();
        let start = self.pos;
        let r = self.rest();
        let end = r
            .find(|c: char| !(c.is_ascii_digit() || "+-*t ".contains(c)))
            .unwrap_or(r.len());
        let lit: String = r[..end].chars().filter(|c| !c.is_whitespace()).collect();
        self.pos += end;
        lit.parse::<ZTau>()
            .map_err(|_| self.error_at(start, format!("bad Z[tau] literal {lit:?}")))
    }

    fn json(&mut self) -> Result<Value> {
        self.skip_ws();
        let start = self.pos;
        let mut stream = serde_json::Deserializer::from_str(self.rest()).into_iter::<Value>();
        match stream.next() {
            Some(Ok(v)) => {
                self.pos += stream.byte_offset();
                Ok(v)
            }
            Some(Err(e)) => Err(self.error_at(start, format!("bad JSON: {e}"))),
            None => Err(self.error_at(start, "expected a JSON object")),
        }
    }

    fn call1(&mut self) -> Result<Expr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn call2(&mut self) -> Result<(Expr, Expr)> {
        self.expect('(')?;
        let a = self.expr()?;
        self.expect(',')?;
        let b = self.expr()?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn atom(&mut self) -> Result<Expr> {
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        self.skip_ws();
        let start = self.pos;
        let Some(word) = self.ident() else {
            return Err(self.error("expected an expression"));
        };
        Ok(match word {
            "rot" | "trans" => {
                self.expect('(')?;
                let z = self.ztau()?;
                self.expect(')')?;
                if word == "rot" {
                    Expr::Rot(z)
                } else {
                    Expr::Trans(z)
                }
            }
            "inv" => Expr::Inverse(Box::new(self.call1()?)),
            "comm" => {
                let (a, b) = self.call2()?;
                Expr::Comm(Box::new(a), Box::new(b))
            }
            "conj" => {
                let (a, b) = self.call2()?;
                Expr::Conj(Box::new(a), Box::new(b))
            }
            "lift" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(',')?;
                let n = self.int()?;
                self.expect(')')?;
                Expr::Lift(Box::new(e), n)
            }
            "map" => Expr::Map(Element::from_json(&self.json()?)?),
            "treepair" => {
                let v = self.json()?;
                tree_pair(&v).map_err(|m| self.error_at(start, m))?
            }
            "let" => return Err(self.error_at(start, "let is only allowed before the expression")),
            name => Expr::Ident(name.to_owned()),
        })
    }
}

fn tree_pair(v: &Value) -> std::result::Result<Expr, String> {
    let obj = v.as_object().ok_or("treepair expects a JSON object")?;
    if let Some(k) = obj.keys().find(|k| !["p", "q", "shift"].contains(&k.as_str())) {
        return Err(format!("unknown treepair field {k:?}"));
    }
    let tree = |k: &str| -> std::result::Result<SubdivisionTree, String> {
        let t = obj.get(k).ok_or(format!("treepair needs {k:?}"))?;
        SubdivisionTree::from_json(t).map_err(|e| e.to_string())
    };
    let shift = match obj.get("shift") {
        None => 0,
        Some(Value::Number(n)) => n.as_i64().ok_or("shift must be an integer")?,
        Some(Value::String(s)) => s.trim().parse().map_err(|_| "shift must be an integer")?,
        Some(_) => return Err("shift must be an integer".into()),
    };
    Ok(Expr::TreePair(tree("p")?, tree("q")?, shift))
}
