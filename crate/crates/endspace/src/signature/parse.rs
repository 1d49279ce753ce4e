//! Recursive-descent parser for the signature DSL.
//!
//! ```text
//! sig    := wedge
//! wedge  := conv (("v"|"∨") conv)*
//! conv   := atom (("->"|"→") atom)? | "{" family "}" ("->"|"→") atom
//! atom   := "R" nat | "C" | "1" | "w" ("^" oexp)? "+1" | "o(" sig ")"
//!         | "(" sig ")" | "Vee_{" var "=" nat ".." nexp "}(" sig ")"
//! family := fterm (("v"|"∨") fterm)*
//! fterm  := "accum(" family ")" | "stride(" nat "," nat "," family ")"
//!         | "[" sig ("," sig)* ";" family "]" | conv
//! ```
//! Ordinal expressions: `oexpr := oterm ("+" oterm)*`,
//! `oterm := ofactor ("*" (nat | var))*`, `ofactor := nat | var | "w" ("^" oexp)?`,
//! `oexp := nat | var | "w" | "(" oexpr ")"`.

use std::fmt;

use super::{FamilyExpr, Signature};
use crate::ordinal::{NatExpr, OExpr, Ordinal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser { src: text, pos: 0, scopes: Vec::new() };
    let s = p.sig()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.err("trailing input", &["end of input", "v", "->"]));
    }
    Ok(s)
}

/// Parses a closed ordinal such as `w^2*3+w*7+4`.
pub fn parse_ordinal(text: &str) -> Result<Ordinal, ParseError> {
    let mut p = Parser { src: text, pos: 0, scopes: Vec::new() };
    let e = p.oexpr()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.err("trailing input", &["end of input", "+", "*"]));
    }
    Ok(e.subst(0))
}

enum Scope {
    /// A family or range binder; `None` until the first use names it.
    Binder(Option<char>),
    /// Prefix heads: no index in scope.
    Closed,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    scopes: Vec<Scope>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: msg.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{tok}`"), &[tok]))
        }
    }

    fn eat_wedge(&mut self) -> bool {
        self.ws();
        let r = self.rest();
        let is_v = r.starts_with('v') && !r[1..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_');
        if is_v {
            self.pos += 1;
            true
        } else {
            self.eat("∨")
        }
    }

    fn eat_arrow(&mut self) -> bool {
        self.eat("->") || self.eat("→")
    }

    fn eat_omega(&mut self) -> bool {
        self.ws();
        let r = self.rest();
        if r.starts_with('w') && !r[1..].starts_with(|c: char| c.is_ascii_alphanumeric()) {
            self.pos += 1;
            true
        } else {
            self.eat("ω")
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.err("expected a natural number", &["natural number"]));
        }
        let v = digits.parse::<u64>().map_err(|_| self.err("number too large", &[]))?;
        self.pos += digits.len();
        Ok(v)
    }

    /// A single-letter index name at the cursor, if any.
    fn peek_var(&mut self) -> Option<char> {
        self.ws();
        let mut it = self.rest().chars();
        let c = it.next()?;
        let next = it.next();
        let ok = c.is_ascii_lowercase()
            && !matches!(c, 'v' | 'w' | 'o')
            && !next.is_some_and(|d| d.is_ascii_alphanumeric() || d == '_' || d == '(');
        ok.then_some(c)
    }

    /// Resolves a use of index `c` in the innermost scope.
    fn use_var(&mut self, c: char) -> Result<(), ParseError> {
        let pos = self.pos;
        match self.scopes.last_mut() {
            Some(Scope::Binder(slot @ None)) => {
                *slot = Some(c);
                Ok(())
            }
            Some(Scope::Binder(Some(b))) if *b == c => Ok(()),
            Some(Scope::Binder(Some(b))) => {
                let b = *b;
                Err(ParseError {
                    offset: pos,
                    expected: vec![b.to_string()],
                    message: format!("index `{c}` is not the innermost binder `{b}`"),
                })
            }
            _ => Err(ParseError {
                offset: pos,
                expected: vec![],
                message: format!("index `{c}` used outside any family or range"),
            }),
        }
    }

    fn sig(&mut self) -> Result<Signature, ParseError> {
        let mut parts = vec![self.conv()?];
        while self.eat_wedge() {
            parts.push(self.conv()?);
        }
        Ok(Signature::wedge(parts))
    }

    fn conv(&mut self) -> Result<Signature, ParseError> {
        if self.eat("{") {
            self.scopes.push(Scope::Binder(None));
            let fam = self.family();
            self.scopes.pop();
            let fam = fam?;
            self.expect("}")?;
            if !self.eat_arrow() {
                return Err(self.err("a braced family must be followed by an arrow", &["->"]));
            }
            let base = self.atom()?;
            return Ok(Signature::conv(fam, base));
        }
        let lhs = self.atom()?;
        if self.eat_arrow() {
            let base = self.atom()?;
            return Ok(Signature::conv(FamilyExpr::Const(lhs), base));
        }
        Ok(lhs)
    }

    fn family(&mut self) -> Result<FamilyExpr, ParseError> {
        let mut terms: Vec<FamilyExpr> = Vec::new();
        let mut plain: Vec<Signature> = Vec::new();
        loop {
            match self.fterm()? {
                Ok(f) => {
                    if !plain.is_empty() {
                        terms.push(FamilyExpr::plain_of(Signature::wedge(std::mem::take(&mut plain))));
                    }
                    terms.push(f);
                }
                Err(s) => plain.push(s),
            }
            if !self.eat_wedge() {
                break;
            }
        }
        if !plain.is_empty() {
            terms.push(FamilyExpr::plain_of(Signature::wedge(plain)));
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { FamilyExpr::Wedge(terms) })
    }

    /// `Ok(combinator)` or `Err(plain signature)` for template parts.
    fn fterm(&mut self) -> Result<Result<FamilyExpr, Signature>, ParseError> {
        if self.eat("accum(") {
            let g = self.family()?;
            self.expect(")")?;
            return Ok(Ok(FamilyExpr::Accum(Box::new(g))));
        }
        if self.eat("stride(") {
            let k = self.nat()?;
            if k == 0 {
                return Err(self.err("stride step must be positive", &["positive integer"]));
            }
            self.expect(",")?;
            let r = self.nat()?;
            self.expect(",")?;
            let inner = self.family()?;
            self.expect(")")?;
            return Ok(Ok(FamilyExpr::Stride { k, r, inner: Box::new(inner) }));
        }
        if self.eat("[") {
            self.scopes.push(Scope::Closed);
            let mut heads = Vec::new();
            let res = (|| {
                heads.push(self.sig()?);
                while self.eat(",") {
                    heads.push(self.sig()?);
                }
                Ok::<(), ParseError>(())
            })();
            self.scopes.pop();
            res?;
            self.expect(";")?;
            let tail = self.family()?;
            self.expect("]")?;
            return Ok(Ok(FamilyExpr::Prefix(heads, Box::new(tail))));
        }
        Ok(Err(self.conv()?))
    }

    fn atom(&mut self) -> Result<Signature, ParseError> {
        const ATOMS: &[&str] = &["R<k>", "C", "1", "w^..+1", "o(", "(", "{", "Vee_{"];
        match self.peek() {
            Some('R') => {
                self.pos += 1;
                if !self.rest().starts_with(|c: char| c.is_ascii_digit()) {
                    return Err(self.err("rose needs a count, as in `R2`", &["natural number"]));
                }
                Ok(Signature::Rose(self.nat()?))
            }
            Some('C') => {
                self.pos += 1;
                Ok(Signature::Cantor)
            }
            Some('1') => {
                let start = self.pos;
                let k = self.nat()?;
                if k != 1 {
                    self.pos = start;
                    return Err(self.err("only `1` denotes a tree; use `w^k+1`", ATOMS));
                }
                Ok(Signature::ray())
            }
            Some('(') => {
                self.pos += 1;
                let s = self.sig()?;
                self.expect(")")?;
                Ok(s)
            }
            _ if self.eat("o(") => {
                if self.peek() == Some(')') {
                    return Err(self.err("`o()` needs an argument", &["signature"]));
                }
                let s = self.sig()?;
                self.expect(")")?;
                Ok(Signature::genus(s))
            }
            _ if self.eat("Vee_{") => self.vee(),
            _ if self.eat_omega() => {
                let exp = if self.eat("^") { self.oexp()? } else { OExpr::lit(1) };
                if !(self.eat("+") && self.eat("1")) {
                    return Err(self.err("tree ordinal must end in `+1`", &["+1"]));
                }
                Ok(Signature::Ord(exp))
            }
            _ => Err(self.err("expected a signature", ATOMS)),
        }
    }

    fn vee(&mut self) -> Result<Signature, ParseError> {
        let Some(i) = self.peek_var() else {
            return Err(self.err("expected a range variable", &["variable"]));
        };
        self.pos += 1;
        self.expect("=")?;
        let lo = self.nat()?;
        self.expect("..")?;
        let hi = self.nexpr()?;
        self.expect("}")?;
        self.expect("(")?;
        self.scopes.push(Scope::Binder(Some(i)));
        let body = self.sig();
        self.scopes.pop();
        let body = body?;
        self.expect(")")?;
        Ok(Signature::Vee { lo, hi, body: Box::new(body) })
    }

    /// `nat | var ("*" nat)? ("+" nat)?`
    fn nexpr(&mut self) -> Result<NatExpr, ParseError> {
        if let Some(c) = self.peek_var() {
            self.use_var(c)?;
            self.pos += 1;
            let a = if self.eat("*") { self.nat()? } else { 1 };
            let b = if self.eat("+") { self.nat()? } else { 0 };
            Ok(NatExpr { a, b })
        } else {
            Ok(NatExpr::lit(self.nat()?))
        }
    }

    fn oexp(&mut self) -> Result<OExpr, ParseError> {
        if self.eat("(") {
            let e = self.oexpr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if let Some(c) = self.peek_var() {
            self.use_var(c)?;
            self.pos += 1;
            return Ok(OExpr::var());
        }
        if self.eat_omega() {
            return Ok(OExpr::lit(0).concat(&OExpr::omega_pow(OExpr::lit(1))));
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(OExpr::lit(self.nat()?)),
            _ => Err(self.err("expected an exponent", &["natural number", "variable", "w", "("])),
        }
    }

    fn oexpr(&mut self) -> Result<OExpr, ParseError> {
        let mut e = self.oterm()?;
        while self.eat("+") {
            e = e.concat(&self.oterm()?);
        }
        Ok(e)
    }

    fn oterm(&mut self) -> Result<OExpr, ParseError> {
        let mut coef = NatExpr::lit(1);
        let exp = if self.eat_omega() {
            if self.eat("^") { self.oexp()? } else { OExpr::lit(1) }
        } else {
            coef = self.ofactor()?;
            OExpr::zero()
        };
        while self.eat("*") {
            let f = self.ofactor()?;
            coef = match (coef.a, f.a) {
                (0, 0) => NatExpr::lit(coef.b * f.b),
                (0, a) => NatExpr { a: a * coef.b, b: 0 },
                (a, 0) => NatExpr { a: a * f.b, b: coef.b * f.b },
                _ => return Err(self.err("index may appear at most once in a product", &["natural number"])),
            };
        }
        Ok(OExpr::term(exp, coef))
    }

    fn ofactor(&mut self) -> Result<NatExpr, ParseError> {
        if let Some(c) = self.peek_var() {
            self.use_var(c)?;
            self.pos += 1;
            return Ok(NatExpr::var());
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(NatExpr::lit(self.nat()?)),
            _ => Err(self.err("expected an ordinal term", &["natural number", "variable", "w"])),
        }
    }
}
