//! End-space and genus invariants of signatures.
//!
//! Vertex models: `Rk` has one vertex; the tree for `w^a+1` is a ray
//! carrying the members of its unfolding family (`w^(b+1)+1` is
//! `(w^b+1) -> 1`, limits use fundamental sequences), so `w^1+1` has
//! `d+1` vertices at depth `d`; `C` has `2^d`. A convergence attaches
//! member `k` at every base vertex of depth `k`, identifying roots.

pub mod space;
pub mod types;

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::ordinal::{OExpr, Ordinal};
use crate::signature::{FamilyExpr, Signature};

pub use space::{space_of, Mult, Piece, Space, SpaceError, UnstableEvidence};
pub use types::{Fiber, Gen, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GenusClass {
    Zero,
    Finite(u64),
    Infinite,
}

impl GenusClass {
    fn plus(self, o: GenusClass) -> GenusClass {
        use GenusClass::*;
        match (self, o) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Zero, x) | (x, Zero) => x,
            (Finite(a), Finite(b)) => Finite(a.saturating_add(b)),
        }
    }

    fn times(self, k: u128) -> GenusClass {
        match self {
            GenusClass::Finite(a) if k > 0 => GenusClass::Finite(a.saturating_mul(k.min(u64::MAX as u128) as u64)),
            GenusClass::Finite(_) => GenusClass::Zero,
            x => x,
        }
    }

    pub fn is_zero(self) -> bool {
        self == GenusClass::Zero
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GenusSupport {
    None,
    All,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharPairSummary {
    pub genus: GenusClass,
    pub countable: bool,
    pub ms_form: Option<(Ordinal, u64)>,
    pub has_isolated_plain_end: bool,
    pub has_isolated_genus_end: bool,
    pub perfect: bool,
    pub genus_support: GenusSupport,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("end space is uncountable")]
    Uncountable,
    #[error("end space is empty")]
    Empty,
    #[error("signature mentions an unbound index")]
    Open,
}

/// Index at which a template is sampled as "large n".
pub fn generic_index(s: &Signature) -> u64 {
    OExpr::generic_index(s.max_const())
}

/// Closed sample of a template.
fn generic(s: &Signature) -> Signature {
    if s.has_var() { s.subst(generic_index(s)) } else { s.clone() }
}

/// Member families seen from the base: explicit heads and a uniform tail.
/// `Const` families mentioning an outer index have no heads.
pub(crate) fn members(f: &FamilyExpr) -> (Vec<Signature>, Signature) {
    match f {
        FamilyExpr::Const(y) => (vec![], y.clone()),
        f => f.head_tail(),
    }
}

thread_local! {
    static VERTEX_MEMO: RefCell<HashMap<(Signature, u64), u128>> = RefCell::new(HashMap::new());
}

/// Vertices at distance `d` from the root in the canonical model.
pub fn vertices_at_depth(sig: &Signature, d: u64) -> Option<u128> {
    if sig.has_var() {
        return None;
    }
    Some(vertices(sig, d))
}

fn vertices(sig: &Signature, d: u64) -> u128 {
    match sig {
        Signature::Rose(_) => u128::from(d == 0),
        Signature::Cantor => 1u128.checked_shl(d as u32).unwrap_or(u128::MAX),
        Signature::Genus(x) => vertices(x, d),
        Signature::Wedge(ps) => {
            if d == 0 { 1 } else { ps.iter().fold(0u128, |a, p| a.saturating_add(vertices(p, d))) }
        }
        Signature::Vee { .. } => vertices(&sig.expand_vee(), d),
        Signature::Ord(e) => {
            let a = e.closed().expect("closed");
            if a.is_zero() || d == 0 {
                return 1;
            }
            let f = ord_unfolding(&a);
            conv_vertices(&f, &Signature::ray(), d)
        }
        Signature::Conv(f, base) => conv_vertices(f, base, d),
    }
}

fn conv_vertices(f: &FamilyExpr, base: &Signature, d: u64) -> u128 {
    let key = (Signature::conv(f.clone(), base.clone()), d);
    if let Some(v) = VERTEX_MEMO.with(|m| m.borrow().get(&key).copied()) {
        return v;
    }
    let mut total = vertices(base, d);
    for k in 0..d {
        let b = vertices(base, k);
        if b > 0 {
            total = total.saturating_add(b.saturating_mul(vertices(&f.member(k), d - k)));
        }
    }
    VERTEX_MEMO.with(|m| m.borrow_mut().insert(key, total));
    total
}

/// `w^a+1` as a convergence onto the ray.
pub fn ord_unfolding(a: &Ordinal) -> FamilyExpr {
    match a.pred() {
        Some(b) => FamilyExpr::Const(Signature::ord_lit(&b)),
        None => FamilyExpr::Param(Signature::Ord(a.fundamental().expect("limit"))),
    }
}

/// Does the graph have at least one end? Ranges with a symbolic bound are
/// read for large index values.
pub fn has_ends(sig: &Signature) -> bool {
    match sig {
        Signature::Rose(_) => false,
        Signature::Cantor | Signature::Ord(_) => true,
        Signature::Genus(x) => has_ends(x),
        Signature::Wedge(ps) => ps.iter().any(has_ends),
        Signature::Vee { lo, hi, body } => (hi.has_var() || hi.b >= *lo) && has_ends(body),
        Signature::Conv(f, base) => has_ends(base) || has_ends(&members_at(f, 0)),
    }
}

fn members_at(f: &FamilyExpr, k: u64) -> Signature {
    match f {
        FamilyExpr::Const(y) => y.clone(),
        f => f.member(k),
    }
}

pub fn genus_class(sig: &Signature) -> GenusClass {
    let sig = &generic(sig);
    match sig {
        Signature::Rose(0) | Signature::Cantor | Signature::Ord(_) => GenusClass::Zero,
        Signature::Rose(k) => GenusClass::Finite(*k),
        Signature::Genus(x) => {
            if has_ends(x) {
                GenusClass::Infinite
            } else {
                genus_class(x).plus(GenusClass::Finite(1))
            }
        }
        Signature::Wedge(ps) => ps.iter().fold(GenusClass::Zero, |a, p| a.plus(genus_class(p))),
        Signature::Vee { .. } => genus_class(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            let gb = genus_class(base);
            if !has_ends(base) {
                return gb.plus(genus_class(&members_at(f, 0)));
            }
            let (heads, tail) = members(f);
            if !genus_class(&generic(&tail)).is_zero() {
                return GenusClass::Infinite;
            }
            heads.iter().enumerate().fold(gb, |acc, (k, y)| {
                acc.plus(genus_class(y).times(vertices(base, k as u64)))
            })
        }
    }
}

/// Every end accumulated by genus (vacuously true without ends).
fn ends_all_genus(sig: &Signature) -> bool {
    let sig = &generic(sig);
    match sig {
        Signature::Rose(_) | Signature::Genus(_) => true,
        Signature::Cantor | Signature::Ord(_) => false,
        Signature::Wedge(ps) => ps.iter().all(ends_all_genus),
        Signature::Vee { .. } => ends_all_genus(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            if !has_ends(base) {
                return ends_all_genus(&members_at(f, 0));
            }
            let (heads, tail) = members(f);
            let tail = generic(&tail);
            heads.iter().all(ends_all_genus)
                && ends_all_genus(&tail)
                && (ends_all_genus(base) || !genus_class(&tail).is_zero())
        }
    }
}

/// (isolated plain end, isolated genus end)
fn isolated(sig: &Signature) -> (bool, bool) {
    let sig = &generic(sig);
    match sig {
        Signature::Rose(_) | Signature::Cantor => (false, false),
        Signature::Ord(_) => (true, false),
        Signature::Genus(x) => {
            let (p, g) = isolated(x);
            (false, p || g)
        }
        Signature::Wedge(ps) => ps.iter().map(isolated).fold((false, false), |a, b| (a.0 || b.0, a.1 || b.1)),
        Signature::Vee { .. } => isolated(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            if !has_ends(base) {
                return isolated(&members_at(f, 0));
            }
            let (heads, tail) = members(f);
            let tail = generic(&tail);
            let mut acc = isolated(&tail);
            for h in &heads {
                let (p, g) = isolated(h);
                acc = (acc.0 || p, acc.1 || g);
            }
            if !has_ends(&tail) {
                let (bp, bg) = isolated(base);
                if genus_class(&tail).is_zero() {
                    acc = (acc.0 || bp, acc.1 || bg);
                } else {
                    acc.1 = acc.1 || bp || bg;
                }
            }
            acc
        }
    }
}

pub fn is_countable(sig: &Signature) -> bool {
    let sig = &generic(sig);
    match sig {
        Signature::Rose(_) | Signature::Ord(_) => true,
        Signature::Cantor => false,
        Signature::Genus(x) => is_countable(x),
        Signature::Wedge(ps) => ps.iter().all(is_countable),
        Signature::Vee { .. } => is_countable(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            if !has_ends(base) {
                return is_countable(&members_at(f, 0));
            }
            let (heads, tail) = members(f);
            is_countable(base) && heads.iter().all(is_countable) && is_countable(&tail)
        }
    }
}

/// Mazurkiewicz-Sierpinski form `(a, n)`: the end space is `w^a*n+1`.
pub fn ms_form(sig: &Signature) -> Result<(Ordinal, u64), SemanticsError> {
    if sig.has_var() {
        return Err(SemanticsError::Open);
    }
    if !is_countable(sig) {
        return Err(SemanticsError::Uncountable);
    }
    let (a, n) = ms(sig).ok_or(SemanticsError::Empty)?;
    Ok((a, n.min(u64::MAX as u128) as u64))
}

fn merge_ms(a: Option<(Ordinal, u128)>, b: Option<(Ordinal, u128)>) -> Option<(Ordinal, u128)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((ra, na)), Some((rb, nb))) => Some(match ra.cmp(&rb) {
            std::cmp::Ordering::Greater => (ra, na),
            std::cmp::Ordering::Less => (rb, nb),
            std::cmp::Ordering::Equal => (ra, na.saturating_add(nb)),
        }),
    }
}

/// Rank that the tail adds in front of each base end: the sup of member
/// ranks, plus one when attained.
fn tail_lift(tail: &Signature) -> Option<Ordinal> {
    let r = rank_sym(tail)?;
    let (l, attained) = r.sup_over_index().expect("monotone");
    Some(if attained { l.succ() } else { l })
}

fn ms(sig: &Signature) -> Option<(Ordinal, u128)> {
    match sig {
        Signature::Rose(_) => None,
        Signature::Cantor => unreachable!("countability checked"),
        Signature::Ord(e) => Some((e.closed().expect("closed"), 1)),
        Signature::Genus(x) => ms(x),
        Signature::Wedge(ps) => ps.iter().fold(None, |acc, p| merge_ms(acc, ms(p))),
        Signature::Vee { .. } => ms(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            let Some((r, m)) = ms(base) else {
                return ms(&f.member(0));
            };
            let (heads, tail) = members(f);
            let top = match tail_lift(&tail) {
                Some(l) => l.add(&r),
                None => r,
            };
            let mut acc = Some((top, m));
            for (k, h) in heads.iter().enumerate() {
                if let Some((a, n)) = ms(h) {
                    acc = merge_ms(acc, Some((a, n.saturating_mul(vertices(base, k as u64)))));
                }
            }
            acc
        }
    }
}

/// Top rank of a countable template as an expression in its index.
pub fn rank_sym(sig: &Signature) -> Option<OExpr> {
    fn emax(a: Option<OExpr>, b: Option<OExpr>) -> Option<OExpr> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(if a.eventual_cmp(&b) == std::cmp::Ordering::Less { b } else { a }),
        }
    }
    match sig {
        Signature::Rose(_) => None,
        Signature::Cantor => None,
        Signature::Ord(e) => Some(e.clone()),
        Signature::Genus(x) => rank_sym(x),
        Signature::Wedge(ps) => ps.iter().fold(None, |acc, p| emax(acc, rank_sym(p))),
        Signature::Vee { lo, hi, body } => {
            let r = rank_sym(body)?;
            if hi.has_var() {
                Some(r.affine(hi.a, hi.b))
            } else if hi.b >= *lo {
                Some(r.affine(0, hi.b))
            } else {
                None
            }
        }
        Signature::Conv(f, base) => {
            let Some(rb) = rank_sym(base) else {
                return rank_sym(&members_at(f, 0));
            };
            let (heads, tail) = members(f);
            let lift = match f.as_ref() {
                FamilyExpr::Const(y) if y.has_var() => rank_sym(y).map(|r| r.concat(&OExpr::lit(1))),
                _ => tail_lift(&tail).map(|l| OExpr::from_ordinal(&l)),
            };
            let top = match lift {
                Some(l) => l.concat(&rb),
                None => rb,
            };
            heads.iter().fold(Some(top), |acc, h| emax(acc, rank_sym(h)))
        }
    }
}

pub fn char_pair(sig: &Signature) -> CharPairSummary {
    let genus = genus_class(sig);
    let countable = is_countable(sig);
    let ends = has_ends(sig);
    let ms_form = if countable && ends { ms_form(sig).ok() } else { None };
    let (iso_p, iso_g) = isolated(sig);
    let genus_support = if !ends || genus != GenusClass::Infinite {
        GenusSupport::None
    } else if ends_all_genus(sig) {
        GenusSupport::All
    } else {
        GenusSupport::Mixed
    };
    CharPairSummary {
        genus,
        countable,
        ms_form,
        has_isolated_plain_end: iso_p,
        has_isolated_genus_end: iso_g,
        perfect: ends && !iso_p && !iso_g,
        genus_support,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse;

    fn p(s: &str) -> Signature {
        parse(s).unwrap()
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_class(&p("R3 v 1 v 1 v 1")), GenusClass::Finite(3));
        assert_eq!(genus_class(&p("o(1)")), GenusClass::Infinite);
        assert_eq!(genus_class(&p("R0")), GenusClass::Zero);
        assert_eq!(genus_class(&p("o(R2)")), GenusClass::Finite(3));
        // one R1 at the root of w+1
        assert_eq!(genus_class(&p("{[R1; R0]} -> 1")), GenusClass::Finite(1));
        // R1 at depth 1 of the Cantor tree: two vertices
        assert_eq!(genus_class(&p("{[R0, R1; R0]} -> C")), GenusClass::Finite(2));
    }

    #[test]
    fn vertex_models() {
        assert_eq!(vertices_at_depth(&p("w+1"), 3), Some(4));
        assert_eq!(vertices_at_depth(&p("C"), 3), Some(8));
        assert_eq!(vertices_at_depth(&p("1"), 7), Some(1));
        assert_eq!(vertices_at_depth(&p("R4"), 1), Some(0));
    }

    #[test]
    fn ms_examples() {
        assert_eq!(ms_form(&p("{w^n+1} -> 1")).unwrap(), (Ordinal::omega(), 1));
        assert_eq!(ms_form(&p("(w^w+1) -> 1")).unwrap(), (Ordinal::omega().succ(), 1));
        assert_eq!(ms_form(&p("(w^2+1) v (w^2+1)")).unwrap(), (Ordinal::nat(2), 2));
        assert_eq!(ms_form(&p("R2")), Err(SemanticsError::Empty));
        assert_eq!(ms_form(&p("1 v C")), Err(SemanticsError::Uncountable));
    }

    #[test]
    fn char_pair_examples() {
        let c = char_pair(&p("C"));
        assert!(c.perfect && !c.countable && c.genus_support == GenusSupport::None && c.genus.is_zero());
        let c = char_pair(&p("o(1 v C)"));
        assert_eq!(c.genus, GenusClass::Infinite);
        assert!(!c.countable && !c.perfect && c.has_isolated_genus_end);
        assert_eq!(c.genus_support, GenusSupport::All);
        let c = char_pair(&p("1 -> C"));
        assert!(c.genus.is_zero() && !c.countable && !c.perfect && c.genus_support == GenusSupport::None);
        let c = char_pair(&p("1 v o(1)"));
        assert_eq!(c.genus_support, GenusSupport::Mixed);
    }
}
