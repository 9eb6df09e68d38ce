//! Expression syntax for symbols:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | 'i' | X | Xk | func '(' linear ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'e'          e(m*p) = exp(i m p)
//! linear := integer combination of p | pk, e.g. "2*p1 - p2"
//! ```
//!
//! `X`, `p` without an index are accepted only in dimension one.

use num_complex::Complex64;

use super::SymbolRn;
use crate::error::{Error, Result};
use crate::nctorus::TrigPoly;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    dim: usize,
    period: f64,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{op}` at token {}", self.pos)))
        }
    }

    fn index(&self, name: &str, prefix: &str) -> Result<Option<usize>> {
        let Some(rest) = name.strip_prefix(prefix) else {
            return Ok(None);
        };
        if rest.is_empty() {
            return if self.dim == 1 {
                Ok(Some(0))
            } else {
                Err(Error::Parse(format!("`{prefix}` needs an index in dimension {}", self.dim)))
            };
        }
        match rest.parse::<usize>() {
            Ok(k) if (1..=self.dim).contains(&k) => Ok(Some(k - 1)),
            Ok(k) => Err(Error::Parse(format!("index {k} of `{name}` outside 1..={}", self.dim))),
            Err(_) => Ok(None),
        }
    }

    fn constant(&self, c: Complex64) -> SymbolRn {
        SymbolRn::constant(self.dim, self.period, c)
    }

    fn expr(&mut self) -> Result<SymbolRn> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.try_add(&self.term()?.scale_complex(Complex64::new(-1.0, 0.0)))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SymbolRn> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.try_mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SymbolRn> {
        if self.eat('-') {
            return Ok(self.factor()?.scale_complex(Complex64::new(-1.0, 0.0)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 && *v <= 64.0 => *v as u32,
                _ => return Err(Error::Parse("exponent must be a small non-negative integer".into())),
            };
            self.pos += 1;
            let mut out = self.constant(Complex64::new(1.0, 0.0));
            for _ in 0..e {
                out = out.try_mul(&base)?;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SymbolRn> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(self.constant(Complex64::new(v, 0.0))),
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(self.constant(Complex64::new(0.0, 1.0)));
                }
                if let Some(k) = self.index(&name, "X")? {
                    return Ok(SymbolRn::fiber_coordinate(self.dim, self.period, k));
                }
                if matches!(name.as_str(), "sin" | "cos" | "e") {
                    self.expect('(')?;
                    let m = self.linear()?;
                    self.expect(')')?;
                    let neg: Vec<i64> = m.iter().map(|x| -x).collect();
                    let half = Complex64::new(0.5, 0.0);
                    let poly = match name.as_str() {
                        "e" => TrigPoly::character(m),
                        "cos" => TrigPoly::from_terms(self.dim, [(m, half), (neg, half)])?,
                        _ => TrigPoly::from_terms(
                            self.dim,
                            [(m, Complex64::new(0.0, -0.5)), (neg, Complex64::new(0.0, 0.5))],
                        )?,
                    };
                    return Ok(SymbolRn::base(self.period, poly));
                }
                if self.index(&name, "p")?.is_some() {
                    return Err(Error::UnsupportedSymbol(format!(
                        "`{name}` is not periodic; use sin, cos or e of it"
                    )));
                }
                Err(Error::Parse(format!("unknown name `{name}`")))
            }
        }
    }

    /// Integer combination of base coordinates.
    fn linear(&mut self) -> Result<Vec<i64>> {
        let mut m = vec![0i64; self.dim];
        let mut first = true;
        loop {
            let sign = if self.eat('-') {
                -1
            } else if self.eat('+') || first {
                1
            } else {
                return Ok(m);
            };
            first = false;
            let mut coef = 1i64;
            if let Some(Tok::Num(v)) = self.peek() {
                if v.fract() != 0.0 {
                    return Err(Error::Parse(format!("frequency {v} is not an integer")));
                }
                coef = *v as i64;
                self.pos += 1;
                self.expect('*')?;
            }
            match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    let k = self
                        .index(&name, "p")?
                        .ok_or_else(|| Error::Parse(format!("expected a base coordinate, got `{name}`")))?;
                    self.pos += 1;
                    m[k] += sign * coef;
                }
                _ => return Err(Error::Parse("expected a base coordinate".into())),
            }
        }
    }
}

/// Parses a symbol on the box `[0, period)^dim`.
pub fn parse_symbol(text: &str, dim: usize, period: f64) -> Result<SymbolRn> {
    if dim == 0 {
        return Err(Error::InvalidParameter { name: "dim", reason: "must be at least 1".into() });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, dim, period };
    let out = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!("trailing input after token {}", p.pos)));
    }
    Ok(out)
}
