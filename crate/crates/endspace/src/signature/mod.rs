//! Signature expressions: AST, family combinators, substitution.
//!
//! A signature may mention one index variable, the binder of the
//! innermost enclosing `{...}` family or `Vee_{i=..}` range. Families are
//! closed under their own binder, except that a constant family written
//! `Y -> X` outside braces may mention the enclosing index.

mod parse;
mod print;

pub use parse::{parse, parse_ordinal, ParseError};
pub use print::print;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::ordinal::{NatExpr, OExpr};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Signature {
    Rose(u64),
    Cantor,
    Ord(OExpr),
    Genus(Box<Signature>),
    Wedge(Vec<Signature>),
    Conv(Box<FamilyExpr>, Box<Signature>),
    /// Finite wedge `Vee_{i=lo..hi}(body)`; `body` is indexed by `i`,
    /// `hi` may mention the enclosing index.
    Vee { lo: u64, hi: NatExpr, body: Box<Signature> },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FamilyExpr {
    Const(Signature),
    Param(Signature),
    Accum(Box<FamilyExpr>),
    Stride { k: u64, r: u64, inner: Box<FamilyExpr> },
    Wedge(Vec<FamilyExpr>),
    Prefix(Vec<Signature>, Box<FamilyExpr>),
}

use Signature as S;

impl Signature {
    pub fn ray() -> Signature {
        S::Ord(OExpr::zero())
    }

    pub fn ord(e: OExpr) -> Signature {
        S::Ord(e)
    }

    pub fn ord_lit(o: &crate::ordinal::Ordinal) -> Signature {
        S::Ord(OExpr::from_ordinal(o))
    }

    pub fn genus(x: Signature) -> Signature {
        S::Genus(Box::new(x))
    }

    pub fn conv(f: FamilyExpr, base: Signature) -> Signature {
        S::Conv(Box::new(f), Box::new(base))
    }

    /// `y -> base`, constant family.
    pub fn conv_const(y: Signature, base: Signature) -> Signature {
        S::conv(FamilyExpr::Const(y), base)
    }

    /// Wedge of the given parts; a single part is returned unwrapped and
    /// an empty list is the one-vertex graph.
    pub fn wedge(mut parts: Vec<Signature>) -> Signature {
        match parts.len() {
            0 => S::Rose(0),
            1 => parts.pop().unwrap(),
            _ => S::Wedge(parts),
        }
    }

    /// Like [`Signature::wedge`] but splices nested wedges.
    pub fn wedge_flat(parts: Vec<Signature>) -> Signature {
        let mut out = Vec::new();
        for p in parts {
            match p {
                S::Wedge(ps) => out.extend(ps),
                p => out.push(p),
            }
        }
        S::wedge(out)
    }

    pub fn has_var(&self) -> bool {
        match self {
            S::Rose(_) | S::Cantor => false,
            S::Ord(e) => e.has_var(),
            S::Genus(x) => x.has_var(),
            S::Wedge(ps) => ps.iter().any(|p| p.has_var()),
            S::Conv(f, b) => f.has_free_var() || b.has_var(),
            S::Vee { hi, .. } => hi.has_var(),
        }
    }

    /// Substitutes the free index `n := a*n + b`.
    pub fn affine(&self, a: u64, b: u64) -> Signature {
        if !self.has_var() {
            return self.clone();
        }
        match self {
            S::Rose(_) | S::Cantor => self.clone(),
            S::Ord(e) => S::Ord(e.affine(a, b)),
            S::Genus(x) => S::genus(x.affine(a, b)),
            S::Wedge(ps) => S::Wedge(ps.iter().map(|p| p.affine(a, b)).collect()),
            S::Conv(f, base) => S::conv(f.affine(a, b), base.affine(a, b)),
            S::Vee { lo, hi, body } => S::Vee { lo: *lo, hi: hi.affine(a, b), body: body.clone() },
        }
    }

    pub fn subst(&self, k: u64) -> Signature {
        self.affine(0, k)
    }

    /// Replaces every closed `Vee` node by the explicit wedge it denotes.
    pub fn expand_vee(&self) -> Signature {
        match self {
            S::Rose(_) | S::Cantor | S::Ord(_) => self.clone(),
            S::Genus(x) => S::genus(x.expand_vee()),
            S::Wedge(ps) => S::Wedge(ps.iter().map(|p| p.expand_vee()).collect()),
            S::Conv(f, b) => S::conv((**f).clone(), b.expand_vee()),
            S::Vee { lo, hi, body } => {
                if hi.has_var() {
                    return self.clone();
                }
                let hi = hi.b;
                if hi < *lo {
                    return S::Rose(0);
                }
                S::wedge((*lo..=hi).map(|i| body.subst(i).expand_vee()).collect())
            }
        }
    }

    /// Immediate children, families expanded to their first member.
    pub fn children(&self) -> Vec<&Signature> {
        match self {
            S::Rose(_) | S::Cantor | S::Ord(_) => vec![],
            S::Genus(x) => vec![x],
            S::Wedge(ps) => ps.iter().collect(),
            S::Conv(_, b) => vec![b],
            S::Vee { body, .. } => vec![body],
        }
    }

    /// All subterms in preorder, including signatures mentioned inside
    /// family expressions (templates left symbolic).
    pub fn subterms(&self) -> Vec<&Signature> {
        let mut out = Vec::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms<'a>(&'a self, out: &mut Vec<&'a Signature>) {
        out.push(self);
        match self {
            S::Conv(f, b) => {
                f.collect_subterms(out);
                b.collect_subterms(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_subterms(out);
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            S::Rose(_) | S::Cantor | S::Ord(_) => 1,
            S::Genus(x) => 1 + x.depth(),
            S::Wedge(ps) => 1 + ps.iter().map(|p| p.depth()).max().unwrap_or(0),
            S::Conv(f, b) => 1 + f.depth().max(b.depth()),
            S::Vee { body, .. } => 1 + body.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            S::Rose(_) | S::Cantor | S::Ord(_) => 1,
            S::Genus(x) => 1 + x.size(),
            S::Wedge(ps) => 1 + ps.iter().map(|p| p.size()).sum::<usize>(),
            S::Conv(f, b) => 1 + f.size() + b.size(),
            S::Vee { body, .. } => 1 + body.size(),
        }
    }

    /// Largest constant anywhere, used to pick generic sample indices.
    pub fn max_const(&self) -> u64 {
        match self {
            S::Rose(k) => *k,
            S::Cantor => 0,
            S::Ord(e) => e.max_const(),
            S::Genus(x) => x.max_const(),
            S::Wedge(ps) => ps.iter().map(|p| p.max_const()).max().unwrap_or(0),
            S::Conv(f, b) => f.max_const().max(b.max_const()),
            S::Vee { lo, hi, body } => (*lo).max(hi.a).max(hi.b).max(body.max_const()),
        }
    }

    /// Splices nested wedges, drops `R0` wedge units and sorts parts.
    /// Families are left untouched.
    pub fn flattened(&self) -> Signature {
        match self {
            S::Genus(x) => S::genus(x.flattened()),
            S::Conv(f, b) => S::conv((**f).clone(), b.flattened()),
            S::Vee { lo, hi, body } => S::Vee { lo: *lo, hi: *hi, body: Box::new(body.flattened()) },
            S::Wedge(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    match p.flattened() {
                        S::Wedge(qs) => out.extend(qs),
                        q => out.push(q),
                    }
                }
                out.retain(|q| *q != S::Rose(0));
                out.sort();
                S::wedge(out)
            }
            _ => self.clone(),
        }
    }

    pub fn contains_cantor(&self) -> bool {
        self.subterms().iter().any(|s| matches!(s, S::Cantor))
    }
}

impl FamilyExpr {
    /// Wedge of families, flattened, with adjacent plain members merged
    /// into a single template.
    pub fn wedge(parts: Vec<FamilyExpr>) -> FamilyExpr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                FamilyExpr::Wedge(ps) => flat.extend(ps),
                p => flat.push(p),
            }
        }
        let mut out: Vec<FamilyExpr> = Vec::new();
        for p in flat {
            let merged = match (out.last(), &p) {
                (Some(prev), cur) if prev.plain().is_some() && cur.plain().is_some() => {
                    let mut parts = wedge_parts(prev.plain().unwrap());
                    parts.extend(wedge_parts(cur.plain().unwrap()));
                    Some(FamilyExpr::plain_of(S::Wedge(parts)))
                }
                _ => None,
            };
            match merged {
                Some(m) => {
                    out.pop();
                    out.push(m);
                }
                None => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            FamilyExpr::Wedge(out)
        }
    }

    /// `Const` for closed signatures, `Param` otherwise.
    pub fn plain_of(s: Signature) -> FamilyExpr {
        if s.has_var() {
            FamilyExpr::Param(s)
        } else {
            FamilyExpr::Const(s)
        }
    }

    fn plain(&self) -> Option<&Signature> {
        match self {
            FamilyExpr::Const(s) | FamilyExpr::Param(s) => Some(s),
            _ => None,
        }
    }

    pub fn has_free_var(&self) -> bool {
        match self {
            FamilyExpr::Const(y) => y.has_var(),
            _ => false,
        }
    }

    pub fn affine(&self, a: u64, b: u64) -> FamilyExpr {
        match self {
            FamilyExpr::Const(y) => FamilyExpr::Const(y.affine(a, b)),
            _ => self.clone(),
        }
    }

    /// The `n`-th member.
    pub fn member(&self, n: u64) -> Signature {
        match self {
            FamilyExpr::Const(y) => y.clone(),
            FamilyExpr::Param(t) => t.subst(n),
            FamilyExpr::Accum(g) => S::wedge_flat((0..=n).map(|i| g.member(i)).collect()),
            FamilyExpr::Stride { k, r, inner } => inner.member(k * n + r),
            FamilyExpr::Wedge(fs) => S::wedge_flat(fs.iter().map(|f| f.member(n)).collect()),
            FamilyExpr::Prefix(h, t) => {
                if (n as usize) < h.len() {
                    h[n as usize].clone()
                } else {
                    t.member(n - h.len() as u64)
                }
            }
        }
    }

    /// Splits the family into explicit head members and a uniform tail
    /// template `T` with member `head.len() + m` equal to `T(m)`.
    /// Not meaningful for a `Const` mentioning an outer index; callers
    /// handle that case first.
    pub fn head_tail(&self) -> (Vec<Signature>, Signature) {
        match self {
            FamilyExpr::Const(y) | FamilyExpr::Param(y) => (vec![], y.clone()),
            FamilyExpr::Accum(g) => {
                let (hg, tg) = g.head_tail();
                let heads = (0..hg.len()).map(|i| S::wedge_flat(hg[..=i].to_vec())).collect();
                let mut parts = hg.clone();
                parts.push(S::Vee { lo: 0, hi: NatExpr::var(), body: Box::new(tg) });
                (heads, S::wedge_flat(parts))
            }
            FamilyExpr::Stride { k, r, inner } => {
                let (hi, ti) = inner.head_tail();
                let h = hi.len() as u64;
                let n0 = if *r >= h { 0 } else { (h - r).div_ceil(*k) };
                let heads = (0..n0).map(|n| hi[(k * n + r) as usize].clone()).collect();
                (heads, ti.affine(*k, k * n0 + r - h))
            }
            FamilyExpr::Wedge(fs) => {
                let nfs: Vec<_> = fs.iter().map(|f| f.head_tail()).collect();
                let big = nfs.iter().map(|(h, _)| h.len()).max().unwrap_or(0);
                let heads = (0..big)
                    .map(|n| {
                        S::wedge_flat(
                            nfs.iter()
                                .map(|(h, t)| if n < h.len() { h[n].clone() } else { t.subst((n - h.len()) as u64) })
                                .collect(),
                        )
                    })
                    .collect();
                let tail = S::wedge_flat(
                    nfs.iter().map(|(h, t)| t.affine(1, (big - h.len()) as u64)).collect(),
                );
                (heads, tail)
            }
            FamilyExpr::Prefix(h, t) => {
                let (ht, tt) = t.head_tail();
                let mut heads = h.clone();
                heads.extend(ht);
                (heads, tt)
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            FamilyExpr::Const(y) | FamilyExpr::Param(y) => y.depth(),
            FamilyExpr::Accum(g) => g.depth(),
            FamilyExpr::Stride { inner, .. } => inner.depth(),
            FamilyExpr::Wedge(fs) => fs.iter().map(|f| f.depth()).max().unwrap_or(0),
            FamilyExpr::Prefix(h, t) => h.iter().map(|s| s.depth()).max().unwrap_or(0).max(t.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FamilyExpr::Const(y) | FamilyExpr::Param(y) => y.size(),
            FamilyExpr::Accum(g) => 1 + g.size(),
            FamilyExpr::Stride { inner, .. } => 1 + inner.size(),
            FamilyExpr::Wedge(fs) => 1 + fs.iter().map(|f| f.size()).sum::<usize>(),
            FamilyExpr::Prefix(h, t) => 1 + h.iter().map(|s| s.size()).sum::<usize>() + t.size(),
        }
    }

    pub fn max_const(&self) -> u64 {
        match self {
            FamilyExpr::Const(y) | FamilyExpr::Param(y) => y.max_const(),
            FamilyExpr::Accum(g) => g.max_const(),
            FamilyExpr::Stride { k, r, inner } => (*k).max(*r).max(inner.max_const()),
            FamilyExpr::Wedge(fs) => fs.iter().map(|f| f.max_const()).max().unwrap_or(0),
            FamilyExpr::Prefix(h, t) => {
                h.iter().map(|s| s.max_const()).max().unwrap_or(0).max(t.max_const()).max(h.len() as u64)
            }
        }
    }

    fn collect_subterms<'a>(&'a self, out: &mut Vec<&'a Signature>) {
        match self {
            FamilyExpr::Const(y) | FamilyExpr::Param(y) => y.collect_subterms(out),
            FamilyExpr::Accum(g) => g.collect_subterms(out),
            FamilyExpr::Stride { inner, .. } => inner.collect_subterms(out),
            FamilyExpr::Wedge(fs) => fs.iter().for_each(|f| f.collect_subterms(out)),
            FamilyExpr::Prefix(h, t) => {
                h.iter().for_each(|s| s.collect_subterms(out));
                t.collect_subterms(out);
            }
        }
    }
}

fn wedge_parts(s: &Signature) -> Vec<Signature> {
    match s {
        S::Wedge(ps) => ps.clone(),
        s => vec![s.clone()],
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl std::str::FromStr for Signature {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Signature {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.serialize_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    fn p(s: &str) -> Signature {
        parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("1 v o(1)"), S::Wedge(vec![S::ray(), S::genus(S::ray())]));
        assert_eq!(
            p("{w^n+1} -> (1 v C)"),
            S::conv(FamilyExpr::Param(S::Ord(OExpr::var())), S::Wedge(vec![S::ray(), S::Cantor]))
        );
        assert_eq!(p("R0"), S::Rose(0));
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&S::Rose(3)), "R3");
        let e = Ordinal::omega_pow(Ordinal::nat(2)).succ();
        assert_eq!(print(&S::ord_lit(&e)), "w^(w^2+1)+1");
        assert_eq!(print(&S::conv_const(S::ray(), S::Cantor)), "1 -> C");
    }

    #[test]
    fn member_examples() {
        let f = FamilyExpr::Param(S::Ord(OExpr::var()));
        assert_eq!(f.member(3), S::ord_lit(&Ordinal::nat(3)));
        let a = FamilyExpr::Accum(Box::new(f));
        assert_eq!(
            a.member(2),
            S::Wedge((0..3).map(|k| S::ord_lit(&Ordinal::nat(k))).collect())
        );
        let pr = FamilyExpr::Prefix(vec![S::Cantor], Box::new(FamilyExpr::Const(S::ray())));
        assert_eq!(pr.member(0), S::Cantor);
        assert_eq!(pr.member(4), S::ray());
    }

    #[test]
    fn head_tail_agrees_with_members() {
        let fams = [
            "{accum(w^n+1)} -> 1",
            "{stride(2,1,[C, 1, o(1); w^n+1])} -> 1",
            "{[C; w^n+1] v accum(stride(3,2,w^n+1))} -> 1",
            "{stride(2,2,(w^n+1)->o(1)) v accum(stride(2,1,(w^n+1)->o(1)))} -> 1",
        ];
        for text in fams {
            let S::Conv(f, _) = p(text) else { unreachable!() };
            let (h, t) = f.head_tail();
            for n in 0..12u64 {
                let direct = f.member(n);
                let via = if (n as usize) < h.len() { h[n as usize].clone() } else { t.subst(n - h.len() as u64) };
                assert_eq!(
                    direct.expand_vee().flattened(),
                    via.expand_vee().flattened(),
                    "{text} member {n}"
                );
            }
        }
    }

    #[test]
    fn stress_signature_parses() {
        let s = p("{{o(w^n+1)} -> Vee_{i=1..m}((1->C)->(w^(w^i)+1))} -> (1 v C)");
        assert!(!s.has_var());
        assert_eq!(p(&print(&s)), s);
    }
}
