//! Pipeline expressions over model names.
//!
//! ```text
//! expr   := term (op)*
//! op     := '*' term | '>' term | '@' domain | '|' domain
//! term   := name | '(' expr ')' | 'unit' '(' domain ')' | 'null' '(' domain ')'
//! domain := '{' name (',' name)* '}' | '{' '}' | '[' '[' atoms ']' (',' '[' atoms ']')* ']'
//! ```
//!
//! All operators share one precedence level and associate to the left, so
//! `p > q > r @ {A}` is `((p ⊳ q) ⊳ r)` projected to `{A}`.

use crate::composition::{compose, DensityElement};
use crate::conditional::conditional;
use crate::error::{Error, Result};
use crate::lattice::Domain;
use crate::model::{DomainLit, Payload, TypedModel};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Name(String),
    Unit(DomainLit),
    Null(DomainLit),
    Combine(Box<Expr>, Box<Expr>),
    Compose(Box<Expr>, Box<Expr>),
    Project(Box<Expr>, DomainLit),
    Condition(Box<Expr>, DomainLit),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: 1, column: self.src[..self.pos].chars().count() + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.error("expected an atom index")
        })
    }

    /// Comma-separated items up to `close`.
    fn list<T>(&mut self, close: char, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.error(format!("expected `,` or `{close}`"))),
            }
        }
    }

    fn domain(&mut self) -> Result<DomainLit> {
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                Ok(DomainLit::Vars(self.list('}', Self::ident)?))
            }
            Some('[') => {
                self.pos += 1;
                let blocks = self.list(']', |p| {
                    p.expect('[')?;
                    p.list(']', Self::number)
                })?;
                Ok(DomainLit::Blocks(blocks))
            }
            _ => Err(self.error("expected a domain like {A,B} or [[0,1],[2]]")),
        }
    }

    fn term(&mut self) -> Result<Expr> {
        if self.peek() == Some('(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        let name = self.ident()?;
        if (name == "unit" || name == "null") && self.peek() == Some('(') {
            self.pos += 1;
            let d = self.domain()?;
            self.expect(')')?;
            return Ok(if name == "unit" { Expr::Unit(d) } else { Expr::Null(d) });
        }
        Ok(Expr::Name(name))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            lhs = match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    Expr::Combine(Box::new(lhs), Box::new(self.term()?))
                }
                Some('>') => {
                    self.pos += 1;
                    Expr::Compose(Box::new(lhs), Box::new(self.term()?))
                }
                Some('@') => {
                    self.pos += 1;
                    Expr::Project(Box::new(lhs), self.domain()?)
                }
                Some('|') => {
                    self.pos += 1;
                    Expr::Condition(Box::new(lhs), self.domain()?)
                }
                _ => return Ok(lhs),
            };
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected input"));
    }
    Ok(e)
}

/// Parses a standalone domain literal such as `{A,B}`.
pub fn parse_domain(src: &str) -> Result<DomainLit> {
    let mut p = Parser { src, pos: 0 };
    let d = p.domain()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected input"));
    }
    Ok(d)
}

/// Evaluates `expr`; operation errors carry the 1-based index of the
/// failing operation in evaluation order.
pub fn eval<V: Payload>(model: &TypedModel<V>, expr: &Expr) -> Result<DensityElement<V>> {
    let mut step = 0;
    eval_at(model, expr, &mut step)
}

/// Domain check with errors in model names rather than variable ids.
fn below<V: Payload>(m: &TypedModel<V>, d: &V::Domain, label: &V::Domain) -> Result<()> {
    if d.compatible(label) && d.leq(label) {
        return Ok(());
    }
    Err(Error::ProjectionDomain { target: V::render_domain(d, &m.schema), label: V::render_domain(label, &m.schema) })
}

fn run<T>(step: &mut usize, f: impl FnOnce() -> Result<T>) -> Result<T> {
    *step += 1;
    let index = *step;
    f().map_err(|e| e.at_step(index))
}

fn eval_at<V: Payload>(m: &TypedModel<V>, expr: &Expr, step: &mut usize) -> Result<DensityElement<V>> {
    match expr {
        Expr::Name(n) => m.lookup(n),
        Expr::Unit(d) => run(step, || Ok(V::unit(&m.context, &m.domain(d)?)?.into())),
        Expr::Null(d) => run(step, || Ok(V::null(&m.context, &m.domain(d)?)?.into())),
        Expr::Combine(a, b) => {
            let (a, b) = (eval_at(m, a, step)?, eval_at(m, b, step)?);
            run(step, || match (a.as_member(), b.as_member()) {
                (Some(x), Some(y)) => Ok(x.combine(y)?.into()),
                _ => Ok(DensityElement::from_quotient(a.as_quotient().multiply(&b.as_quotient())?)),
            })
        }
        Expr::Compose(a, b) => {
            let (a, b) = (eval_at(m, a, step)?, eval_at(m, b, step)?);
            run(step, || compose(&a, &b))
        }
        Expr::Project(a, d) => {
            let a = eval_at(m, a, step)?;
            run(step, || {
                let d = m.domain(d)?;
                below(m, &d, &a.label())?;
                a.project(&d)
            })
        }
        Expr::Condition(a, d) => {
            let a = eval_at(m, a, step)?;
            run(step, || {
                let phi = a
                    .as_member()
                    .ok_or_else(|| Error::Model("conditioning needs a valuation, not a stored quotient".into()))?;
                let d = m.domain(d)?;
                below(m, &d, &phi.label())?;
                let c = conditional(phi, &phi.label(), &d)?;
                Ok(DensityElement::from_quotient(c.body))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;

    const MODEL: &str = r#"
instance = "potential"
[[variable]]
name = "A"
states = 2
[[variable]]
name = "B"
states = 2
[valuation.p]
scope = ["A"]
values = [0.2, 0.8]
[valuation.q]
scope = ["A", "B"]
values = [1.0, 3.0, 2.0, 4.0]
"#;

    fn model() -> TypedModel<crate::potential::Potential> {
        match Model::parse(MODEL).unwrap() {
            Model::Potential(m) => m,
            _ => unreachable!(),
        }
    }

    fn values(src: &str) -> Vec<f64> {
        eval(&model(), &parse(src).unwrap()).unwrap().as_member().unwrap().values().to_vec()
    }

    #[test]
    fn left_associative() {
        let e = parse("p > q @ {A,B}").unwrap();
        let Expr::Project(inner, DomainLit::Vars(v)) = e else { panic!("{e:?}") };
        assert!(matches!(*inner, Expr::Compose(..)));
        assert_eq!(v, ["A", "B"]);
        assert_eq!(parse("p * (q @ {A})").unwrap(), parse("p*(q@{A})").unwrap());
        assert!(matches!(parse("q @ [[0,1],[2]]").unwrap(), Expr::Project(_, DomainLit::Blocks(_))));
        assert!(
            matches!(parse("p * unit({})").unwrap(), Expr::Combine(_, b) if *b == Expr::Unit(DomainLit::Vars(vec![])))
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("p >"), Err(Error::Parse { column: 4, .. })));
        assert!(matches!(parse("p @ A"), Err(Error::Parse { column: 5, .. })));
        assert!(matches!(parse("(p * q"), Err(Error::Parse { .. })));
        assert!(matches!(parse("p q"), Err(Error::Parse { column: 3, .. })));
    }

    #[test]
    fn evaluates_the_running_example() {
        let v = values("p > q @ {A,B}");
        let expect = [0.05, 0.15, 0.8 / 3.0, 1.6 / 3.0];
        assert!(v.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12), "{v:?}");
        let c = values("q | {A}");
        assert!(c.iter().zip([0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0]).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(values("p * unit({A})"), [0.2, 0.8]);
        assert_eq!(values("q * null({})"), [0.0; 4]);
    }

    #[test]
    fn errors_name_the_step() {
        let e = eval(&model(), &parse("q @ {A} @ {A,B}").unwrap()).unwrap_err();
        assert!(matches!(e, Error::AtStep { index: 2, .. }), "{e}");
        assert!(matches!(eval(&model(), &parse("r").unwrap()), Err(Error::Model(_))));
    }
}
