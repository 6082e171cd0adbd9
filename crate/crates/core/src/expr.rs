//! A small expression language shared by the command line and model files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'h' | 'zeta' '(' integer ')' | ident
//!         | 'star' '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Plain `*` is the commutative product; the Moyal product is only reachable
//! through an explicit `star(...)`. Division is by nonzero constants only.

use crate::error::{Error, Result};
use crate::scalar::{CycloScalar, HbarSeries, Rational};
use crate::weyl::{PairKind, WeylElement};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u64 = 256;

/// Parsed expression tree; `pos` fields are character offsets into the input.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(Rational),
    Zeta(u32),
    Hbar { pos: usize },
    Var { name: String, pos: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
    Star(Vec<Expr>, usize),
}

impl Expr {
    /// Parses a complete expression.
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0 };
        p.skip_ws();
        if p.peek().is_none() {
            return Err(p.error("empty expression"));
        }
        let e = p.expr()?;
        p.skip_ws();
        if let Some(c) = p.peek() {
            return Err(p.error(&format!("unexpected '{c}'")));
        }
        Ok(e)
    }

    /// Variable names in order of first appearance, with positions.
    pub fn variables(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Expr::Var { name, pos } => {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), *pos));
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Star(args, _) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Int(_) | Expr::Zeta(_) | Expr::Hbar { .. } => {}
        }
    }

    /// Evaluates in `alg`.
    pub fn eval<A: Algebra>(&self, alg: &A) -> Result<A::Elem> {
        Ok(match self {
            Expr::Int(r) => alg.constant(&CycloScalar::from_rational(r.clone())),
            Expr::Zeta(n) => alg.constant(&CycloScalar::root(*n, 1)),
            Expr::Hbar { pos } => alg.hbar(*pos)?,
            Expr::Var { name, pos } => alg.var(name, *pos)?,
            Expr::Neg(a) => alg.neg(&a.eval(alg)?),
            Expr::Add(a, b) => alg.add(&a.eval(alg)?, &b.eval(alg)?),
            Expr::Sub(a, b) => alg.add(&a.eval(alg)?, &alg.neg(&b.eval(alg)?)),
            Expr::Mul(a, b) => alg.mul(&a.eval(alg)?, &b.eval(alg)?),
            Expr::Div(a, b, pos) => {
                let d = alg.as_constant(&b.eval(alg)?).ok_or_else(|| Error::Parse {
                    pos: *pos,
                    msg: "division is only by constants".into(),
                })?;
                let inv = d.inverse().map_err(|_| Error::Parse { pos: *pos, msg: "division by zero".into() })?;
                alg.mul(&a.eval(alg)?, &alg.constant(&inv))
            }
            Expr::Pow(a, e) => {
                let base = a.eval(alg)?;
                let mut acc = alg.constant(&CycloScalar::one());
                for _ in 0..*e {
                    acc = alg.mul(&acc, &base);
                }
                acc
            }
            Expr::Star(args, pos) => {
                let mut acc = args[0].eval(alg)?;
                for a in &args[1..] {
                    acc = alg.star(&acc, &a.eval(alg)?, *pos)?;
                }
                acc
            }
        })
    }
}

/// The operations an expression needs from its target.
pub trait Algebra {
    type Elem;
    fn constant(&self, c: &CycloScalar) -> Self::Elem;
    fn hbar(&self, pos: usize) -> Result<Self::Elem>;
    fn var(&self, name: &str, pos: usize) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn star(&self, a: &Self::Elem, b: &Self::Elem, pos: usize) -> Result<Self::Elem>;
    fn as_constant(&self, a: &Self::Elem) -> Option<CycloScalar>;
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let pos = self.pos;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let e = self.integer()?;
            if e > MAX_EXPONENT {
                return Err(self.error(&format!("exponent above {MAX_EXPONENT}")));
            }
            let e = e as u32;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse { pos: start, msg: "integer too large".into() })
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(c) if c.is_ascii_digit() => {
                let s: String = {
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    self.chars[start..self.pos].iter().collect()
                };
                let n: num_bigint::BigInt = s.parse().map_err(|_| Error::Parse { pos: start, msg: "bad integer".into() })?;
                Ok(Expr::Int(Rational::from_integer(n)))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "h" => Ok(Expr::Hbar { pos: start }),
                    "zeta" => {
                        self.expect('(')?;
                        self.skip_ws();
                        let n = self.integer()?;
                        if n == 0 || n > 10_000 {
                            return Err(Error::Parse { pos: start, msg: format!("zeta({n}) is out of range") });
                        }
                        self.expect(')')?;
                        Ok(Expr::Zeta(n as u32))
                    }
                    "star" => {
                        self.expect('(')?;
                        let mut args = vec![self.expr()?];
                        while self.eat(',') {
                            args.push(self.expr()?);
                        }
                        self.expect(')')?;
                        Ok(Expr::Star(args, start))
                    }
                    _ => Ok(Expr::Var { name, pos: start }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected '{c}'"))),
        }
    }
}

/// A generator name of the Weyl algebra: `p3` ↦ (Real, x-side, pair 3).
fn weyl_generator(name: &str) -> Option<(PairKind, bool, usize)> {
    let (kind, is_x, digits) = if let Some(d) = name.strip_prefix("zb") {
        (PairKind::Complex, false, d)
    } else if let Some(d) = name.strip_prefix('z') {
        (PairKind::Complex, true, d)
    } else if let Some(d) = name.strip_prefix('p') {
        (PairKind::Real, true, d)
    } else if let Some(d) = name.strip_prefix('q') {
        (PairKind::Real, false, d)
    } else {
        return None;
    };
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let i: usize = digits.parse().ok()?;
    Some((kind, is_x, i))
}

/// The Weyl algebra on the given pair kinds as an expression target.
pub struct WeylAlgebra {
    kinds: Vec<PairKind>,
}

impl WeylAlgebra {
    pub fn new(kinds: Vec<PairKind>) -> Self {
        WeylAlgebra { kinds }
    }

    /// The smallest shape accommodating every generator in `exprs`; pairs
    /// not mentioned are real. Mixing `p_i`/`q_i` with `z_i`/`zb_i` on the
    /// same pair is a basis mismatch.
    pub fn infer(exprs: &[Expr], min_pairs: usize) -> Result<Self> {
        let mut kinds: Vec<Option<PairKind>> = vec![None; min_pairs];
        for e in exprs {
            for (name, pos) in e.variables() {
                let (kind, _, i) = weyl_generator(&name)
                    .ok_or_else(|| Error::Parse { pos, msg: format!("unknown generator '{name}'") })?;
                if kinds.len() < i {
                    kinds.resize(i, None);
                }
                match kinds[i - 1] {
                    Some(k) if k != kind => {
                        return Err(Error::BasisMismatch(format!("pair {i} used with both real and complex coordinates")))
                    }
                    _ => kinds[i - 1] = Some(kind),
                }
            }
        }
        Ok(WeylAlgebra { kinds: kinds.into_iter().map(|k| k.unwrap_or(PairKind::Real)).collect() })
    }

    pub fn kinds(&self) -> &[PairKind] {
        &self.kinds
    }
}

impl Algebra for WeylAlgebra {
    type Elem = WeylElement;

    fn constant(&self, c: &CycloScalar) -> WeylElement {
        WeylElement::constant(&self.kinds, HbarSeries::scalar(c.clone()))
    }

    fn hbar(&self, _pos: usize) -> Result<WeylElement> {
        Ok(WeylElement::constant(&self.kinds, HbarSeries::hbar()))
    }

    fn var(&self, name: &str, pos: usize) -> Result<WeylElement> {
        let (kind, is_x, i) =
            weyl_generator(name).ok_or_else(|| Error::Parse { pos, msg: format!("unknown generator '{name}'") })?;
        if i > self.kinds.len() || self.kinds[i - 1] != kind {
            return Err(Error::BasisMismatch(format!("'{name}' does not match the pair shape {:?}", self.kinds)));
        }
        Ok(if is_x { WeylElement::x(&self.kinds, i) } else { WeylElement::y(&self.kinds, i) })
    }

    fn add(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a + b
    }

    fn neg(&self, a: &WeylElement) -> WeylElement {
        -a
    }

    fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a.mul_commutative(b)
    }

    fn star(&self, a: &WeylElement, b: &WeylElement, _pos: usize) -> Result<WeylElement> {
        a.star(b)
    }

    fn as_constant(&self, a: &WeylElement) -> Option<CycloScalar> {
        if a.terms().any(|(m, _)| m.iter().any(|&e| e > 0)) {
            return None;
        }
        a.constant_term().as_scalar()
    }
}

/// Scalars only: no generators, no ħ.
pub struct ScalarAlgebra;

impl Algebra for ScalarAlgebra {
    type Elem = CycloScalar;

    fn constant(&self, c: &CycloScalar) -> CycloScalar {
        c.clone()
    }

    fn hbar(&self, pos: usize) -> Result<CycloScalar> {
        Err(Error::Parse { pos, msg: "'h' is not allowed in a scalar".into() })
    }

    fn var(&self, name: &str, pos: usize) -> Result<CycloScalar> {
        Err(Error::Parse { pos, msg: format!("'{name}' is not allowed in a scalar") })
    }

    fn add(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        a + b
    }

    fn neg(&self, a: &CycloScalar) -> CycloScalar {
        -a
    }

    fn mul(&self, a: &CycloScalar, b: &CycloScalar) -> CycloScalar {
        a * b
    }

    fn star(&self, a: &CycloScalar, b: &CycloScalar, _pos: usize) -> Result<CycloScalar> {
        Ok(a * b)
    }

    fn as_constant(&self, a: &CycloScalar) -> Option<CycloScalar> {
        Some(a.clone())
    }
}

/// Parses a cyclotomic scalar such as `-3/4` or `1 + zeta(3)^2`.
pub fn parse_scalar(src: &str) -> Result<CycloScalar> {
    Expr::parse(src)?.eval(&ScalarAlgebra)
}

/// Parses a rational number.
pub fn parse_rational(src: &str) -> Result<Rational> {
    parse_scalar(src)?
        .to_rational()
        .ok_or_else(|| Error::Parse { pos: 0, msg: format!("'{src}' is not rational") })
}

/// Parses Weyl elements, inferring a common shape with at least
/// `min_pairs` pairs.
pub fn parse_weyl(srcs: &[&str], min_pairs: usize) -> Result<Vec<WeylElement>> {
    let exprs = srcs.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>()?;
    let alg = WeylAlgebra::infer(&exprs, min_pairs)?;
    exprs.iter().map(|e| e.eval(&alg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn star_versus_commutative_product() {
        let v = parse_weyl(&["star(p1, q1)", "p1*q1", "star(q1, p1)"], 0).unwrap();
        assert_eq!(v[0].to_string(), "p1*q1 + h");
        assert_eq!(v[1].to_string(), "p1*q1");
        assert_eq!(v[2].to_string(), "p1*q1 - h");
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("-3/4").unwrap(), CycloScalar::from_rational(rat(-3, 4)));
        assert_eq!(parse_scalar("zeta(3)^3").unwrap(), CycloScalar::one());
        assert_eq!(parse_scalar("zeta(4)^2 + 1").unwrap(), CycloScalar::zero());
        assert_eq!(parse_scalar("(2)/(4)").unwrap(), CycloScalar::from_rational(rat(1, 2)));
        let z = CycloScalar::root(12, 5) + CycloScalar::root(3, 1);
        assert_eq!(parse_scalar(&z.to_string()).unwrap(), z);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(Expr::parse("p1 + * q1"), Err(Error::Parse { pos: 5, msg: "unexpected '*'".into() }));
        assert!(matches!(Expr::parse("star(p1"), Err(Error::Parse { pos: 7, .. })));
        assert!(matches!(parse_weyl(&["x1"], 0), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_weyl(&["p1 + z1"], 0), Err(Error::BasisMismatch(_))));
        assert!(matches!(parse_scalar("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_weyl(&["p1/q1"], 0), Err(Error::Parse { .. })));
        assert!(matches!(Expr::parse(""), Err(Error::Parse { pos: 0, .. })));
    }

    #[test]
    fn complex_generators_and_hbar() {
        let v = parse_weyl(&["star(z1, zb1) - star(zb1, z1)"], 0).unwrap();
        // [z, z̄] = 4iħ
        assert_eq!(v[0], WeylElement::constant(&[PairKind::Complex], HbarSeries::monomial(&CycloScalar::i() * &CycloScalar::from_int(4), 1)));
        let w = parse_weyl(&["q2^2*h"], 3).unwrap();
        assert_eq!(w[0].n(), 3);
    }
}
