//! Maximal end types of a signature, with multiplicities.
//!
//! `space_of` returns the maximal types of the end space. Every end lies
//! below one of them. Templates (signatures with a free index) are
//! answered for large index values; their multiplicities are
//! placeholders.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use super::types::{Fiber, Gen, Ty};
use super::{genus_class, generic_index, members, vertices_at_depth, GenusClass};
use crate::ordinal::OExpr;
use crate::signature::{FamilyExpr, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Mult {
    Count(u64),
    Cantor,
}

impl Mult {
    fn plus(self, o: Mult) -> Mult {
        match (self, o) {
            (Mult::Count(a), Mult::Count(b)) => Mult::Count(a.saturating_add(b)),
            _ => Mult::Cantor,
        }
    }

    fn times(self, k: u128) -> Mult {
        match self {
            Mult::Count(a) => Mult::Count((a as u128).saturating_mul(k).min(u64::MAX as u128) as u64),
            Mult::Cantor => Mult::Cantor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Piece {
    pub ty: Ty,
    pub mult: Mult,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Space {
    pub pieces: Vec<Piece>,
}

/// Members of one convergence whose maximal types are pairwise
/// incomparable and never absorbed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnstableEvidence {
    pub at: Signature,
    pub members: Vec<(u64, Signature)>,
    /// The recurring maximal type of each member.
    pub types: Vec<Ty>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, thiserror::Error)]
pub enum SpaceError {
    #[error("infinitely many incomparable maximal types in {}", .0.at)]
    Unstable(UnstableEvidence),
    #[error("unresolved: {0}")]
    Unknown(String),
}

type Res = Result<Space, SpaceError>;

thread_local! {
    static MEMO: RefCell<HashMap<Signature, Res>> = RefCell::new(HashMap::new());
}

impl Space {
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn has_var(&self) -> bool {
        self.pieces.iter().any(|p| p.ty.has_var())
    }

    pub fn single(ty: Ty, mult: Mult) -> Space {
        merge(vec![Piece { ty, mult }])
    }

    /// Does some end of this space have type `t`?
    pub fn has_type(&self, t: &Ty) -> bool {
        self.pieces.iter().any(|p| t.occ_le(&p.ty))
    }

    fn map(&self, f: impl Fn(&Ty) -> Ty) -> Space {
        merge(self.pieces.iter().map(|p| Piece { ty: f(&p.ty), mult: p.mult }).collect())
    }
}

/// Canonicalizes, sums equal types and drops types lying below others.
pub fn merge(pieces: Vec<Piece>) -> Space {
    let mut acc: Vec<Piece> = Vec::new();
    for p in pieces {
        let ty = p.ty.canonical();
        let mult = if ty.is_cantor() { Mult::Cantor } else { p.mult };
        match acc.iter_mut().find(|q| q.ty == ty) {
            Some(q) => q.mult = q.mult.plus(mult),
            None => acc.push(Piece { ty, mult }),
        }
    }
    let keep: Vec<bool> = acc
        .iter()
        .map(|p| {
            p.ty.has_var()
                || !acc.iter().any(|q| !q.ty.has_var() && q.ty != p.ty && p.ty.in_down(&q.ty))
        })
        .collect();
    let mut pieces: Vec<Piece> = acc.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
    pieces.sort_by(|a, b| a.ty.cmp(&b.ty));
    Space { pieces }
}

pub fn space_of(sig: &Signature) -> Res {
    if let Some(r) = MEMO.with(|m| m.borrow().get(sig).cloned()) {
        return r;
    }
    let r = compute(sig);
    MEMO.with(|m| m.borrow_mut().insert(sig.clone(), r.clone()));
    r
}

fn compute(sig: &Signature) -> Res {
    match sig {
        Signature::Rose(_) => Ok(Space::default()),
        Signature::Cantor => Ok(Space::single(Ty::cantor(false), Mult::Cantor)),
        Signature::Ord(e) => Ok(Space::single(
            Ty::Tower { fiber: Fiber::default(), genus: false, height: e.clone() },
            Mult::Count(1),
        )),
        Signature::Genus(x) => Ok(space_of(x)?.map(Ty::genus_all)),
        Signature::Wedge(ps) => {
            let mut all = Vec::new();
            for p in ps {
                all.extend(space_of(p)?.pieces);
            }
            Ok(merge(all))
        }
        Signature::Vee { lo, hi, body } => {
            if !hi.has_var() {
                return space_of(&sig.expand_vee());
            }
            vee_space(*lo, hi.a, hi.b, body)
        }
        Signature::Conv(f, base) => conv_space(sig, f, base),
    }
}

/// `Vee_{i=lo..a*n+b}(body)` for large `n`.
fn vee_space(lo: u64, a: u64, b: u64, body: &Signature) -> Res {
    let bs = space_of(body)?;
    let mut out = Vec::new();
    for p in bs.pieces {
        if !p.ty.has_var() {
            out.push(p);
            continue;
        }
        let probe = generic_index(body).max(lo + p.ty.max_const());
        let (t0, t1) = (p.ty.subst(probe), p.ty.subst(probe + 1));
        if !t0.occ_le(&t1) {
            return Err(SpaceError::Unknown(format!("range body type {} does not increase", p.ty)));
        }
        out.push(Piece { ty: p.ty.affine(a, b), mult: Mult::Count(1) });
    }
    Ok(merge(out))
}

fn conv_space(whole: &Signature, f: &FamilyExpr, base: &Signature) -> Res {
    let bs = space_of(base)?;
    if bs.is_empty() {
        let m0 = match f {
            FamilyExpr::Const(y) => y.clone(),
            f => f.member(0),
        };
        return space_of(&m0);
    }
    if let FamilyExpr::Const(y) = f {
        let ys = space_of(y)?;
        let m = Fiber(ys.pieces.iter().map(|p| Gen::One(p.ty.clone())).collect());
        let gm = genus_class(y) != GenusClass::Zero;
        return Ok(bs.map(|t| t.transform(&m, gm)));
    }
    let (heads, tail) = members(f);
    let (m, gm) = tail_analysis(whole, &tail, &bs)?;
    let mut out: Vec<Piece> = bs.pieces.iter().map(|p| Piece { ty: p.ty.transform(&m, gm), mult: p.mult }).collect();
    for (k, h) in heads.iter().enumerate() {
        let count = vertices_at_depth(base, k as u64).unwrap_or(1);
        if count == 0 {
            continue;
        }
        for p in space_of(h)?.pieces {
            out.push(Piece { ty: p.ty, mult: p.mult.times(count) });
        }
    }
    Ok(merge(out))
}

fn tail_parts(tail: &Signature) -> Vec<Signature> {
    match tail {
        Signature::Wedge(ps) => ps.clone(),
        s => vec![s.clone()],
    }
}

/// All of `tmpl(k)` for `k >= from`, as one generator.
fn gen_from_template(ty: &Ty, from: u64) -> Gen {
    if let Ty::Tower { fiber, genus, height } = ty {
        if !fiber.has_var() && height.has_var() {
            let (sup, attained) = height.affine(1, from).sup_over_index().expect("monotone");
            return if attained {
                Gen::One(Ty::Tower { fiber: fiber.clone(), genus: *genus, height: OExpr::from_ordinal(&sup) })
            } else {
                Gen::Below { fiber: fiber.clone(), genus: *genus, sup }
            };
        }
    }
    if ty.has_var() {
        Gen::Fam { tmpl: Box::new(ty.clone()), from }
    } else {
        Gen::One(ty.clone())
    }
}

/// Types recurring in infinitely many tail members, and whether genus
/// recurs.
fn tail_analysis(whole: &Signature, tail: &Signature, base: &Space) -> Result<(Fiber, bool), SpaceError> {
    let n = generic_index(tail);
    let mut gens = Vec::new();
    let mut gm = false;
    let mut pending: Vec<(Signature, Ty)> = Vec::new();
    for part in tail_parts(tail) {
        if let Signature::Vee { lo, hi, body } = &part {
            if hi.has_var() {
                for p in space_of(body)?.pieces {
                    gens.push(gen_from_template(&p.ty, *lo));
                }
                let gi = generic_index(body);
                gm |= (*lo..*lo + 4).chain([gi, gi + 1]).any(|i| genus_class(&body.subst(i)) != GenusClass::Zero);
                continue;
            }
        }
        if !part.has_var() {
            for p in space_of(&part)?.pieces {
                gens.push(Gen::One(p.ty));
            }
            gm |= genus_class(&part) != GenusClass::Zero;
            continue;
        }
        gm |= genus_class(&part.subst(n)) != GenusClass::Zero;
        let next = space_of(&tail.subst(n + 1))?;
        for p in space_of(&part)?.pieces {
            if !p.ty.has_var() {
                gens.push(Gen::One(p.ty));
                continue;
            }
            let here = p.ty.subst(n);
            if next.pieces.iter().any(|q| here.occ_le(&q.ty)) {
                gens.push(gen_from_template(&p.ty, 0));
            } else {
                pending.push((part.clone(), p.ty));
            }
        }
    }
    let m = Fiber(gens).canonical();
    let tops: Vec<Ty> = base.pieces.iter().map(|p| p.ty.transform(&m, gm)).collect();
    for (part, ty) in pending {
        let samples: Vec<Ty> = (n..n + 3).map(|k| ty.subst(k)).collect();
        let absorbed = |t: &Ty| tops.iter().any(|top| t.occ_le(top));
        if samples.iter().all(absorbed) {
            continue;
        }
        let incomparable = (0..3).all(|i| (0..3).all(|j| i == j || !samples[i].occ_le(&samples[j])));
        if incomparable && !samples.iter().any(absorbed) {
            let members = (n..n + 3).map(|k| (k, part.subst(k))).collect();
            return Err(SpaceError::Unstable(UnstableEvidence { at: whole.clone(), members, types: samples }));
        }
        return Err(SpaceError::Unknown(format!("member type {ty} neither recurs nor stays incomparable")));
    }
    Ok((m, gm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use crate::signature::parse;

    fn sp(s: &str) -> Res {
        space_of(&parse(s).unwrap())
    }

    #[test]
    fn simple_spaces() {
        let s = sp("(w^2+1) v (w^2+1)").unwrap();
        assert_eq!(s.pieces, vec![Piece { ty: Ty::ord(Ordinal::nat(2), false), mult: Mult::Count(2) }]);
        let s = sp("(w+1) v (w^2+1)").unwrap();
        assert_eq!(s.pieces.len(), 1);
        assert_eq!(sp("C -> 1").unwrap(), sp("C").unwrap());
        assert_eq!(sp("C -> C").unwrap(), sp("C").unwrap());
        assert_eq!(sp("(1 -> C) -> 1").unwrap(), sp("1 -> C").unwrap());
        assert_eq!(sp("{w^n+1} -> 1").unwrap(), sp("w^w+1").unwrap());
        assert_eq!(sp("(w^2+1) -> 1").unwrap(), sp("w^3+1").unwrap());
        assert_eq!(sp("R1 -> (w+1)").unwrap(), sp("o(w+1)").unwrap());
    }

    #[test]
    fn cantor_multiplicity() {
        let s = sp("1 -> C").unwrap();
        assert_eq!(s.pieces.len(), 1);
        assert_eq!(s.pieces[0].mult, Mult::Cantor);
        assert_eq!(sp("1 v C").unwrap().pieces.len(), 2);
    }

    #[test]
    fn unstable_families() {
        assert!(matches!(sp("{(w^n+1) -> o(1)} -> o(1)"), Err(SpaceError::Unstable(_))));
        let k1 = "{stride(2,2,(w^n+1)->o(1)) v accum(stride(2,1,(w^n+1)->o(1)))} -> 1";
        let k2 = "{stride(2,1,(w^n+1)->o(1)) v accum(stride(2,2,(w^n+1)->o(1)))} -> 1";
        assert!(matches!(sp(k1), Err(SpaceError::Unstable(_))));
        assert!(matches!(sp(k2), Err(SpaceError::Unstable(_))));
    }

    #[test]
    fn stress_signature_resolves() {
        let s = sp("{{o(w^n+1)} -> Vee_{i=1..m}((1->C)->(w^(w^i)+1))} -> (1 v C)").unwrap();
        assert!(!s.is_empty());
        assert!(s.pieces.iter().all(|p| p.ty.genus()));
    }

    #[test]
    fn accumulating_family_is_stable() {
        let s = sp("{accum((w^n+1) -> o(1))} -> 1").unwrap();
        assert_eq!(s.pieces.len(), 1);
    }
}
