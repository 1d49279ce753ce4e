//! Ordinals below epsilon-zero in Cantor normal form, and ordinal
//! expressions in one index variable.
//!
//! The derived `Ord` on [`Ordinal`] is the ordinal order: CNF term lists
//! compare lexicographically on `(exponent, coefficient)` and a proper
//! prefix is smaller.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Ordinal {
        Ordinal::nat(1)
    }

    pub fn nat(k: u64) -> Ordinal {
        if k == 0 {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(Ordinal::zero(), k)] }
        }
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// omega^e
    pub fn omega_pow(e: Ordinal) -> Ordinal {
        Ordinal { terms: vec![(e, 1)] }
    }

    /// omega^e * c
    pub fn term(e: Ordinal, c: u64) -> Ordinal {
        if c == 0 {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Builds an ordinal from arbitrary `(exponent, coefficient)` pairs
    /// read as a left-to-right sum.
    pub fn from_terms<I: IntoIterator<Item = (Ordinal, u64)>>(it: I) -> Ordinal {
        it.into_iter()
            .fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal::term(e, c)))
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.is_zero())
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            Some((e, _)) => !e.is_zero(),
            None => false,
        }
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if e.is_zero())
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut t = self.terms.clone();
        let last = t.last_mut().unwrap();
        last.1 -= 1;
        if last.1 == 0 {
            t.pop();
        }
        Some(Ordinal { terms: t })
    }

    pub fn leading(&self) -> Option<(&Ordinal, u64)> {
        self.terms.first().map(|(e, c)| (e, *c))
    }

    /// Splits a nonzero ordinal as `zeta + omega^delta` with `delta` the
    /// last exponent.
    pub fn split_last(&self) -> Option<(Ordinal, Ordinal)> {
        let (delta, _) = self.terms.last()?;
        let mut t = self.terms.clone();
        let last = t.last_mut().unwrap();
        last.1 -= 1;
        if last.1 == 0 {
            t.pop();
        }
        Some((Ordinal { terms: t }, delta.clone()))
    }

    pub fn add(&self, b: &Ordinal) -> Ordinal {
        let Some((be, bc)) = b.terms.first() else {
            return self.clone();
        };
        let mut out: Vec<(Ordinal, u64)> = Vec::with_capacity(self.terms.len() + b.terms.len());
        let mut merged = None;
        for (e, c) in &self.terms {
            match e.cmp(be) {
                Ordering::Greater => out.push((e.clone(), *c)),
                Ordering::Equal => merged = Some(*c),
                Ordering::Less => break,
            }
        }
        let lead_c = match merged {
            Some(c) => c.checked_add(*bc).expect("ordinal coefficient overflow"),
            None => *bc,
        };
        out.push((be.clone(), lead_c));
        out.extend(b.terms[1..].iter().cloned());
        Ordinal { terms: out }
    }

    /// The leading CNF term: the space `self + 1` is homeomorphic to
    /// `omega^alpha * n + 1`.
    pub fn ms_normal(&self) -> Result<(Ordinal, u64), OrdinalError> {
        self.leading()
            .map(|(e, c)| (e.clone(), c))
            .ok_or(OrdinalError::ZeroHasNoNormalForm)
    }

    /// Largest natural number mentioned anywhere in the CNF tree.
    pub fn max_const(&self) -> u64 {
        self.terms
            .iter()
            .map(|(e, c)| (*c).max(e.max_const()))
            .max()
            .unwrap_or(0)
    }

    pub fn depth(&self) -> usize {
        self.terms.iter().map(|(e, _)| 1 + e.depth()).max().unwrap_or(0)
    }

    /// Fundamental sequence of a limit ordinal, as an expression in `n`
    /// whose supremum is `self` and which never reaches it.
    pub fn fundamental(&self) -> Option<OExpr> {
        if !self.is_limit() {
            return None;
        }
        let (zeta, delta) = self.split_last()?;
        let tail = match delta.pred() {
            Some(d) => OExpr::term(OExpr::from_ordinal(&d), NatExpr::var()),
            None => OExpr::omega_pow(delta.fundamental()?),
        };
        Some(OExpr::from_ordinal(&zeta).concat(&tail))
    }

    fn fmt_exp(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.as_nat() {
            write!(f, "{k}")
        } else if *self == Ordinal::omega() {
            write!(f, "w")
        } else {
            write!(f, "({self})")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("zero has no Mazurkiewicz-Sierpinski normal form")]
    ZeroHasNoNormalForm,
    #[error("expression is not monotone in the index")]
    NotMonotone,
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            if *e == Ordinal::one() {
                write!(f, "w")?;
            } else {
                write!(f, "w^")?;
                e.fmt_exp(f)?;
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `a*n + b` over the naturals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NatExpr {
    pub a: u64,
    pub b: u64,
}

impl NatExpr {
    pub fn lit(b: u64) -> NatExpr {
        NatExpr { a: 0, b }
    }

    pub fn var() -> NatExpr {
        NatExpr { a: 1, b: 0 }
    }

    pub fn has_var(&self) -> bool {
        self.a != 0
    }

    pub fn eval(&self, n: u64) -> u64 {
        self.a
            .checked_mul(n)
            .and_then(|x| x.checked_add(self.b))
            .expect("index arithmetic overflow")
    }

    /// Substitutes `n := a*n + b`.
    pub fn affine(&self, a: u64, b: u64) -> NatExpr {
        NatExpr { a: self.a * a, b: self.a * b + self.b }
    }

    pub fn plus(&self, o: &NatExpr) -> NatExpr {
        NatExpr { a: self.a + o.a, b: self.b + o.b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn fmt_var(&self, var: char) -> String {
        match (self.a, self.b) {
            (0, b) => b.to_string(),
            (1, 0) => var.to_string(),
            (1, b) => format!("{var}+{b}"),
            (a, 0) => format!("{var}*{a}"),
            (a, b) => format!("{var}*{a}+{b}"),
        }
    }
}

/// One term `omega^exp * coef` of an [`OExpr`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OTerm {
    pub exp: OExpr,
    pub coef: NatExpr,
}

/// Ordinal-shaped expression whose exponents and coefficients may mention
/// the index `n`. Terms are summed left to right with ordinal addition,
/// so the value is recomputed (not assumed in CNF) after substitution.
///
/// Every constructor here is weakly order-preserving in `n`, which is why
/// [`OExpr::monotone_check`] accepts every expression.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct OExpr {
    pub terms: Vec<OTerm>,
}

impl OExpr {
    pub fn zero() -> OExpr {
        OExpr { terms: Vec::new() }
    }

    pub fn var() -> OExpr {
        OExpr::term(OExpr::zero(), NatExpr::var())
    }

    pub fn lit(k: u64) -> OExpr {
        OExpr::from_ordinal(&Ordinal::nat(k))
    }

    pub fn term(exp: OExpr, coef: NatExpr) -> OExpr {
        OExpr { terms: vec![OTerm { exp, coef }] }.normalized()
    }

    pub fn omega_pow(exp: OExpr) -> OExpr {
        OExpr::term(exp, NatExpr::lit(1))
    }

    pub fn from_ordinal(o: &Ordinal) -> OExpr {
        OExpr {
            terms: o
                .terms
                .iter()
                .map(|(e, c)| OTerm { exp: OExpr::from_ordinal(e), coef: NatExpr::lit(*c) })
                .collect(),
        }
    }

    pub fn has_var(&self) -> bool {
        self.terms.iter().any(|t| t.coef.has_var() || t.exp.has_var())
    }

    pub fn closed(&self) -> Option<Ordinal> {
        if self.has_var() {
            None
        } else {
            Some(self.subst(0))
        }
    }

    pub fn subst(&self, k: u64) -> Ordinal {
        self.terms.iter().fold(Ordinal::zero(), |acc, t| {
            acc.add(&Ordinal::term(t.exp.subst(k), t.coef.eval(k)))
        })
    }

    /// Substitutes `n := a*n + b`.
    pub fn affine(&self, a: u64, b: u64) -> OExpr {
        OExpr {
            terms: self
                .terms
                .iter()
                .map(|t| OTerm { exp: t.exp.affine(a, b), coef: t.coef.affine(a, b) })
                .collect(),
        }
        .normalized()
    }

    /// Symbolic ordinal sum `self + other`.
    pub fn concat(&self, other: &OExpr) -> OExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        OExpr { terms }.normalized()
    }

    /// Closed expressions become the CNF of their value; open ones drop
    /// zero terms and merge neighbours with identical exponents.
    pub fn normalized(self) -> OExpr {
        if !self.has_var() {
            return OExpr::from_ordinal(&self.subst(0));
        }
        let mut out: Vec<OTerm> = Vec::new();
        for t in self.terms {
            if t.coef.is_zero() {
                continue;
            }
            let t = OTerm { exp: t.exp.normalized(), coef: t.coef };
            if let Some(last) = out.last_mut() {
                if last.exp == t.exp {
                    last.coef = last.coef.plus(&t.coef);
                    continue;
                }
            }
            out.push(t);
        }
        OExpr { terms: out }
    }

    pub fn monotone_check(&self) -> bool {
        true
    }

    pub fn max_const(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.coef.a.max(t.coef.b).max(t.exp.max_const()))
            .max()
            .unwrap_or(0)
    }

    /// A sample index past which comparisons between expressions with
    /// constants up to `c` no longer change.
    pub fn generic_index(c: u64) -> u64 {
        2 * c + 12
    }

    /// Compares `self(n)` and `other(n)` for all large `n`.
    pub fn eventual_cmp(&self, other: &OExpr) -> Ordering {
        let base = OExpr::generic_index(self.max_const().max(other.max_const()));
        let mut last = Ordering::Equal;
        for n in [base, base + 1, base + 7] {
            last = self.subst(n).cmp(&other.subst(n));
        }
        last
    }

    /// Supremum over `n` and whether it is attained (the sequence is then
    /// eventually constant and equal to it).
    pub fn sup_over_index(&self) -> Result<(Ordinal, bool), OrdinalError> {
        if !self.monotone_check() {
            return Err(OrdinalError::NotMonotone);
        }
        Ok(self.sup_rec())
    }

    fn sup_rec(&self) -> (Ordinal, bool) {
        let mut acc = (Ordinal::zero(), true);
        for t in &self.terms {
            acc = sup_sum(acc, sup_term(t));
        }
        acc
    }

    pub fn fmt_var(&self, var: char) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for t in &self.terms {
            let exp_zero = t.exp.terms.is_empty();
            if exp_zero {
                parts.push(t.coef.fmt_var(var));
                continue;
            }
            let base = if t.exp == OExpr::lit(1) {
                "w".to_string()
            } else {
                format!("w^{}", t.exp.fmt_exp(var))
            };
            let c = t.coef;
            match (c.a, c.b) {
                (0, 1) => parts.push(base),
                (0, b) => parts.push(format!("{base}*{b}")),
                (a, b) => {
                    parts.push(if a == 1 { format!("{base}*{var}") } else { format!("{base}*{var}*{a}") });
                    if b > 0 {
                        parts.push(if b == 1 { base } else { format!("{base}*{b}") });
                    }
                }
            }
        }
        parts.join("+")
    }

    /// Exponent rendering: bare for naturals, the variable, or `w`.
    pub fn fmt_exp(&self, var: char) -> String {
        if let Some(o) = self.closed() {
            if o.as_nat().is_some() || o == Ordinal::omega() {
                return self.fmt_var(var);
            }
        } else if *self == OExpr::var() {
            return var.to_string();
        }
        format!("({})", self.fmt_var(var))
    }
}

fn sup_term(t: &OTerm) -> (Ordinal, bool) {
    if t.coef.is_zero() {
        return (Ordinal::zero(), true);
    }
    let (le, att_e) = t.exp.sup_rec();
    let att_c = !t.coef.has_var();
    match (att_e, att_c) {
        (true, true) => (Ordinal::term(le, t.coef.b), true),
        (true, false) => (Ordinal::omega_pow(le.succ()), false),
        (false, _) => (Ordinal::omega_pow(le), false),
    }
}

/// Supremum of `a_n + b_n` from the suprema of the two monotone parts.
fn sup_sum(a: (Ordinal, bool), b: (Ordinal, bool)) -> (Ordinal, bool) {
    let ((la, att_a), (lb, att_b)) = (a, b);
    if att_a {
        return (la.add(&lb), att_b);
    }
    let (zeta, delta) = la.split_last().expect("unattained sup is a limit");
    let wd = Ordinal::omega_pow(delta);
    if lb >= wd {
        (zeta.add(&lb), att_b)
    } else {
        (la, false)
    }
}

impl fmt::Display for OExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_var('n'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn printing_matches_cnf_text() {
        let x = Ordinal::from_terms([(Ordinal::nat(2), 3), (Ordinal::one(), 7), (Ordinal::zero(), 4)]);
        assert_eq!(x.to_string(), "w^2*3+w*7+4");
        assert_eq!(Ordinal::omega_pow(w()).to_string(), "w^w");
        let e = Ordinal::omega_pow(Ordinal::nat(2)).succ();
        assert_eq!(Ordinal::omega_pow(e).to_string(), "w^(w^2+1)");
    }

    #[test]
    fn addition_examples() {
        assert_eq!(Ordinal::one().add(&w()), w());
        assert_eq!(w().add(&Ordinal::one()).to_string(), "w+1");
        let w2 = Ordinal::omega_pow(Ordinal::nat(2));
        assert_eq!(w2.add(&w2), Ordinal::term(Ordinal::nat(2), 2));
    }

    #[test]
    fn comparison_examples() {
        assert!(Ordinal::one() < w());
        let ww = Ordinal::omega_pow(w());
        let x = Ordinal::from_terms([(Ordinal::nat(2), 5), (Ordinal::one(), 3)]);
        assert!(ww > x);
    }

    #[test]
    fn ms_normal_examples() {
        let x = Ordinal::from_terms([(Ordinal::nat(2), 3), (Ordinal::one(), 7), (Ordinal::zero(), 4)]);
        assert_eq!(x.ms_normal().unwrap(), (Ordinal::nat(2), 3));
        assert_eq!(Ordinal::nat(5).ms_normal().unwrap(), (Ordinal::zero(), 5));
        assert_eq!(Ordinal::omega_pow(w()).ms_normal().unwrap(), (w(), 1));
        assert!(Ordinal::zero().ms_normal().is_err());
    }

    #[test]
    fn limits_and_successors() {
        assert!(Ordinal::term(Ordinal::one(), 2).is_limit());
        assert!(!w().succ().is_limit());
        assert_eq!(w().succ().to_string(), "w+1");
    }

    #[test]
    fn sup_examples() {
        assert_eq!(OExpr::var().sup_over_index().unwrap(), (w(), false));
        assert_eq!(OExpr::lit(3).sup_over_index().unwrap(), (Ordinal::nat(3), true));
        let wn = OExpr::omega_pow(OExpr::var());
        assert_eq!(wn.sup_over_index().unwrap(), (Ordinal::omega_pow(w()), false));
        // w + n: sup w*2
        let e = OExpr::lit(0).concat(&OExpr::from_ordinal(&w())).concat(&OExpr::var());
        assert_eq!(e.sup_over_index().unwrap(), (Ordinal::term(Ordinal::one(), 2), false));
        // n + w = w for every n
        let e = OExpr::var().concat(&OExpr::from_ordinal(&w()));
        assert_eq!(e.sup_over_index().unwrap(), (w(), true));
        // w^n + w^2: eventually w^n + w^2 < w^w, sup w^w unattained
        let e = wn.concat(&OExpr::from_ordinal(&Ordinal::omega_pow(Ordinal::nat(2))));
        assert_eq!(e.sup_over_index().unwrap(), (Ordinal::omega_pow(w()), false));
    }

    #[test]
    fn fundamental_sequences_converge_from_below() {
        let targets = [w(), Ordinal::omega_pow(w()), Ordinal::term(Ordinal::nat(3), 2), w().add(&Ordinal::omega_pow(Ordinal::nat(2)))];
        for t in targets {
            let f = t.fundamental().unwrap();
            assert_eq!(f.sup_over_index().unwrap(), (t.clone(), false), "{t}");
            for k in 0..20 {
                assert!(f.subst(k) < t);
            }
        }
    }

    #[test]
    fn printing_expressions() {
        let e = OExpr::omega_pow(OExpr::var()).concat(&OExpr::lit(1));
        assert_eq!(e.to_string(), "w^n+1");
        let e = OExpr::term(OExpr::lit(2), NatExpr { a: 2, b: 3 });
        assert_eq!(e.to_string(), "w^2*n*2+w^2*3");
        assert_eq!(OExpr::var().affine(2, 1).to_string(), "n*2+1");
    }
}
