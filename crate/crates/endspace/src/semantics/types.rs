//! End types as canonical terms.
//!
//! A [`Ty`] names the local structure at an end. `Tower { fiber, genus,
//! height }` is an end of relative rank `height` above the ends generated
//! by `fiber`; `Cantor { fiber, genus }` is an end lying in a Cantor set
//! of ends of its own type, accumulated by `fiber`. The fiber is an
//! antichain of generators whose downward closure is every type met in
//! small neighbourhoods besides the tower below the end itself.

use std::cmp::Ordering;

use serde::Serialize;

use crate::ordinal::{OExpr, Ordinal};
use crate::signature::{FamilyExpr, Signature};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Ty {
    Tower { fiber: Fiber, genus: bool, height: OExpr },
    Cantor { fiber: Fiber, genus: bool },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fiber(pub Vec<Gen>);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Gen {
    One(Ty),
    /// Every `Tower { fiber, genus, b }` with `b < sup`; `sup` is a limit.
    Below { fiber: Fiber, genus: bool, sup: Ordinal },
    /// `tmpl(k)` for every `k >= from`; `tmpl` is indexed by its own `n`.
    Fam { tmpl: Box<Ty>, from: u64 },
}

/// How far a finite search over a `Fam` generator looks past the largest
/// constant in play.
const FAM_SEARCH_MARGIN: u64 = 8;

impl Ty {
    pub fn point() -> Ty {
        Ty::ord(Ordinal::zero(), false)
    }

    pub fn ord(a: Ordinal, genus: bool) -> Ty {
        Ty::Tower { fiber: Fiber::default(), genus, height: OExpr::from_ordinal(&a) }
    }

    pub fn cantor(genus: bool) -> Ty {
        Ty::Cantor { fiber: Fiber::default(), genus }
    }

    pub fn genus(&self) -> bool {
        match self {
            Ty::Tower { genus, .. } | Ty::Cantor { genus, .. } => *genus,
        }
    }

    pub fn fiber(&self) -> &Fiber {
        match self {
            Ty::Tower { fiber, .. } | Ty::Cantor { fiber, .. } => fiber,
        }
    }

    pub fn is_cantor(&self) -> bool {
        matches!(self, Ty::Cantor { .. })
    }

    /// `Some(a)` when this is the type of the top end of `w^a+1`
    /// (possibly genus-marked).
    pub fn pure_height(&self) -> Option<Ordinal> {
        match self {
            Ty::Tower { fiber, height, .. } if fiber.0.is_empty() => height.closed(),
            _ => None,
        }
    }

    pub fn has_var(&self) -> bool {
        match self {
            Ty::Tower { fiber, height, .. } => height.has_var() || fiber.has_var(),
            Ty::Cantor { fiber, .. } => fiber.has_var(),
        }
    }

    /// Substitutes the free index `n := a*n + b` (bound `Fam` indices are
    /// left alone).
    pub fn affine(&self, a: u64, b: u64) -> Ty {
        match self {
            Ty::Tower { fiber, genus, height } => {
                Ty::Tower { fiber: fiber.affine(a, b), genus: *genus, height: height.affine(a, b) }
            }
            Ty::Cantor { fiber, genus } => Ty::Cantor { fiber: fiber.affine(a, b), genus: *genus },
        }
        .canonical()
    }

    pub fn subst(&self, k: u64) -> Ty {
        self.affine(0, k)
    }

    pub fn max_const(&self) -> u64 {
        match self {
            Ty::Tower { fiber, height, .. } => height.max_const().max(fiber.max_const()),
            Ty::Cantor { fiber, .. } => fiber.max_const(),
        }
    }

    pub fn canonical(&self) -> Ty {
        match self {
            Ty::Tower { fiber, genus, height } => {
                let fiber = fiber.canonical();
                let g = *genus || fiber.any_genus();
                let height = height.clone().normalized();
                if let [only] = fiber.0.as_slice() {
                    match only {
                        Gen::One(Ty::Tower { fiber: f2, genus: g2, height: h2 }) if *g2 == g => {
                            let h = h2.concat(&OExpr::lit(1)).concat(&height);
                            return Ty::Tower { fiber: f2.clone(), genus: g, height: h }.canonical();
                        }
                        Gen::One(Ty::Cantor { fiber: f2, genus: g2 }) if *g2 == g => {
                            return Ty::Cantor { fiber: f2.clone(), genus: g };
                        }
                        Gen::Below { fiber: f2, genus: g2, sup } if *g2 == g => {
                            let h = OExpr::from_ordinal(sup).concat(&height);
                            return Ty::Tower { fiber: f2.clone(), genus: g, height: h }.canonical();
                        }
                        _ => {}
                    }
                }
                Ty::Tower { fiber, genus: g, height }
            }
            Ty::Cantor { fiber, genus } => {
                let fiber = fiber.canonical();
                let g = *genus || fiber.any_genus();
                if let [Gen::One(Ty::Cantor { fiber: f2, genus: g2 })] = fiber.0.as_slice() {
                    if *g2 == g {
                        return Ty::Cantor { fiber: f2.clone(), genus: g };
                    }
                }
                Ty::Cantor { fiber, genus: g }
            }
        }
    }

    /// The same structure with every end accumulated by genus.
    pub fn genus_all(&self) -> Ty {
        match self {
            Ty::Tower { fiber, height, .. } => {
                Ty::Tower { fiber: fiber.genus_all(), genus: true, height: height.clone() }
            }
            Ty::Cantor { fiber, .. } => Ty::Cantor { fiber: fiber.genus_all(), genus: true },
        }
        .canonical()
    }

    /// Type of this base end after attaching members whose recurring
    /// types generate `m` (and carry genus if `gm`).
    pub fn transform(&self, m: &Fiber, gm: bool) -> Ty {
        if m.0.is_empty() && !gm {
            return self.clone();
        }
        match self {
            Ty::Tower { fiber, genus, height } => Ty::Tower {
                fiber: fiber.transform(m, gm).union(m),
                genus: *genus || gm,
                height: height.clone(),
            },
            Ty::Cantor { fiber, genus } => {
                Ty::Cantor { fiber: fiber.transform(m, gm).union(m), genus: *genus || gm }
            }
        }
        .canonical()
    }

    /// `self` is `other` or occurs in every neighbourhood of an `other` end.
    pub fn occ_le(&self, other: &Ty) -> bool {
        self == other || self.in_down(other)
    }

    /// `self` occurs strictly below `other`.
    pub fn in_down(&self, other: &Ty) -> bool {
        match other {
            Ty::Tower { fiber, genus, height } => {
                if let Ty::Tower { fiber: f1, genus: g1, height: h1 } = self {
                    if f1 == fiber && g1 == genus && h1.eventual_cmp(height) == Ordering::Less {
                        return true;
                    }
                }
                fiber.contains(self)
            }
            Ty::Cantor { fiber, .. } => fiber.contains(self),
        }
    }

    /// Exclusive bound on the heights `b` with `Tower { f, g, b }` at or
    /// below `self`; `None` when a family generator hides the answer.
    pub fn class_bound(&self, f: &Fiber, g: bool) -> Option<Ordinal> {
        let (own, fib) = match self {
            Ty::Tower { fiber, genus, height } => {
                let own = if fiber == f && *genus == g { height.closed()?.succ() } else { Ordinal::zero() };
                (own, fiber)
            }
            Ty::Cantor { fiber, .. } => (Ordinal::zero(), fiber),
        };
        Some(own.max(fib.class_bound(f, g)?))
    }

    /// Every type in the downward closure that can be listed: the type
    /// itself, its fiber generators, and their closures. Below-generators
    /// and tower prefixes are not enumerated.
    pub fn listed_closure(&self) -> Vec<Ty> {
        let mut out = vec![self.clone()];
        for g in &self.fiber().0 {
            match g {
                Gen::One(t) => out.extend(t.listed_closure()),
                Gen::Below { fiber, .. } => {
                    for g2 in &fiber.0 {
                        if let Gen::One(t) = g2 {
                            out.extend(t.listed_closure());
                        }
                    }
                }
                Gen::Fam { .. } => {}
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn has_fam(&self) -> bool {
        self.fiber().0.iter().any(|g| match g {
            Gen::One(t) => t.has_fam(),
            Gen::Below { fiber, .. } => fiber.0.iter().any(|g2| matches!(g2, Gen::Fam { .. }) || matches!(g2, Gen::One(t) if t.has_fam())),
            Gen::Fam { .. } => true,
        })
    }

    /// Some signature whose end space has exactly one maximal end of this
    /// type, or a Cantor set of them.
    pub fn to_signature(&self) -> Signature {
        match self {
            Ty::Tower { fiber, genus, height } => {
                let base = Signature::Ord(height.clone());
                if fiber.0.is_empty() {
                    return if *genus { Signature::genus(base) } else { base };
                }
                let base = if *genus && !fiber.any_genus() { Signature::genus(base) } else { base };
                Signature::conv(fiber.to_family(), base)
            }
            Ty::Cantor { fiber, genus } => {
                let base = if *genus && !fiber.any_genus() { Signature::genus(Signature::Cantor) } else { Signature::Cantor };
                if fiber.0.is_empty() {
                    return base;
                }
                Signature::conv(fiber.to_family(), base)
            }
        }
    }
}

impl Fiber {
    pub fn any_genus(&self) -> bool {
        self.0.iter().any(|g| match g {
            Gen::One(t) => t.genus(),
            Gen::Below { genus, .. } => *genus,
            Gen::Fam { tmpl, .. } => tmpl.genus(),
        })
    }

    pub fn has_var(&self) -> bool {
        self.0.iter().any(|g| match g {
            Gen::One(t) => t.has_var(),
            Gen::Below { fiber, .. } => fiber.has_var(),
            Gen::Fam { .. } => false,
        })
    }

    fn max_const(&self) -> u64 {
        self.0
            .iter()
            .map(|g| match g {
                Gen::One(t) => t.max_const(),
                Gen::Below { fiber, sup, .. } => fiber.max_const().max(sup.max_const()),
                Gen::Fam { tmpl, from } => tmpl.max_const().max(*from),
            })
            .max()
            .unwrap_or(0)
    }

    fn affine(&self, a: u64, b: u64) -> Fiber {
        Fiber(
            self.0
                .iter()
                .map(|g| match g {
                    Gen::One(t) => Gen::One(t.affine(a, b)),
                    g => g.clone(),
                })
                .collect(),
        )
    }

    pub fn union(&self, other: &Fiber) -> Fiber {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Fiber(v)
    }

    fn genus_all(&self) -> Fiber {
        Fiber(
            self.0
                .iter()
                .map(|g| match g {
                    Gen::One(t) => Gen::One(t.genus_all()),
                    Gen::Below { fiber, sup, .. } => Gen::Below { fiber: fiber.genus_all(), genus: true, sup: sup.clone() },
                    Gen::Fam { tmpl, from } => Gen::Fam { tmpl: Box::new(tmpl.genus_all()), from: *from },
                })
                .collect(),
        )
    }

    fn transform(&self, m: &Fiber, gm: bool) -> Fiber {
        Fiber(
            self.0
                .iter()
                .map(|g| match g {
                    Gen::One(t) => Gen::One(t.transform(m, gm)),
                    Gen::Below { fiber, genus, sup } => Gen::Below {
                        fiber: fiber.transform(m, gm).union(m),
                        genus: *genus || gm,
                        sup: sup.clone(),
                    },
                    Gen::Fam { tmpl, from } => Gen::Fam { tmpl: Box::new(tmpl.transform(m, gm)), from: *from },
                })
                .collect(),
        )
    }

    pub fn canonical(&self) -> Fiber {
        let mut gens: Vec<Gen> = self.0.iter().map(Gen::canonical).collect();
        gens.sort();
        gens.dedup();
        if !gens.iter().any(|g| g.has_var()) {
            let keep: Vec<bool> = (0..gens.len())
                .map(|i| !(0..gens.len()).any(|j| j != i && gens[i].covered_by(&gens[j])))
                .collect();
            gens = gens.into_iter().zip(keep).filter_map(|(g, k)| k.then_some(g)).collect();
        }
        Fiber(gens)
    }

    pub fn contains(&self, t: &Ty) -> bool {
        self.0.iter().any(|g| g.contains(t))
    }

    fn class_bound(&self, f: &Fiber, g: bool) -> Option<Ordinal> {
        let mut best = Ordinal::zero();
        for gen in &self.0 {
            let b = match gen {
                Gen::One(t) => t.class_bound(f, g)?,
                Gen::Below { fiber, genus, sup } => {
                    let own = if fiber == f && *genus == g { sup.clone() } else { Ordinal::zero() };
                    own.max(fiber.class_bound(f, g)?)
                }
                Gen::Fam { .. } => return None,
            };
            best = best.max(b);
        }
        Some(best)
    }

    /// Member family whose recurring types generate this fiber.
    pub fn to_family(&self) -> FamilyExpr {
        let mut parts = Vec::new();
        let mut open = false;
        for g in &self.0 {
            match g {
                Gen::One(t) => parts.push(t.to_signature()),
                Gen::Below { fiber, genus, sup } => {
                    open = true;
                    let h = sup.fundamental().expect("Below sup is a limit");
                    let t = Ty::Tower { fiber: fiber.clone(), genus: *genus, height: h };
                    parts.push(t.to_signature());
                }
                Gen::Fam { tmpl, from } => {
                    open = true;
                    parts.push(tmpl.affine(1, *from).to_signature());
                }
            }
        }
        let s = Signature::wedge(parts);
        if open { FamilyExpr::Param(s) } else { FamilyExpr::Const(s) }
    }
}

impl Gen {
    fn canonical(&self) -> Gen {
        match self {
            Gen::One(t) => Gen::One(t.canonical()),
            Gen::Fam { tmpl, from } => {
                let t = tmpl.canonical();
                if t.has_var() { Gen::Fam { tmpl: Box::new(t), from: *from } } else { Gen::One(t) }
            }
            Gen::Below { fiber, genus, sup } => {
                let fiber = fiber.canonical();
                let g = *genus || fiber.any_genus();
                if let [only] = fiber.0.as_slice() {
                    match only {
                        Gen::One(Ty::Tower { fiber: f2, genus: g2, height: h2 }) if *g2 == g && !h2.has_var() => {
                            let s = h2.closed().unwrap().succ().add(sup);
                            return Gen::Below { fiber: f2.clone(), genus: g, sup: s }.canonical();
                        }
                        Gen::Below { fiber: f2, genus: g2, sup: s2 } if *g2 == g => {
                            return Gen::Below { fiber: f2.clone(), genus: g, sup: s2.add(sup) }.canonical();
                        }
                        Gen::One(Ty::Cantor { fiber: f2, genus: g2 }) if *g2 == g => {
                            return Gen::One(Ty::Cantor { fiber: f2.clone(), genus: g });
                        }
                        _ => {}
                    }
                }
                Gen::Below { fiber, genus: g, sup: sup.clone() }
            }
        }
    }

    fn has_var(&self) -> bool {
        match self {
            Gen::One(t) => t.has_var(),
            Gen::Below { fiber, .. } => fiber.has_var(),
            Gen::Fam { .. } => false,
        }
    }

    /// Does this generator's closure contain `t`?
    pub fn contains(&self, t: &Ty) -> bool {
        match self {
            Gen::One(u) => t.occ_le(u),
            Gen::Below { fiber, genus, sup } => {
                if let Ty::Tower { fiber: f1, genus: g1, height: h1 } = t {
                    if f1 == fiber && g1 == genus {
                        if let Some(h) = h1.closed() {
                            if h < *sup {
                                return true;
                            }
                        }
                    }
                }
                fiber.contains(t)
            }
            Gen::Fam { tmpl, from } => {
                let hi = from + t.max_const().max(tmpl.max_const()) + FAM_SEARCH_MARGIN;
                (*from..=hi).any(|k| t.occ_le(&tmpl.subst(k)))
            }
        }
    }

    /// Is everything this generator produces also produced by `other`?
    fn covered_by(&self, other: &Gen) -> bool {
        match self {
            Gen::One(t) => other.contains(t),
            Gen::Below { fiber, genus, sup } => {
                let bound = match other {
                    Gen::One(u) => u.class_bound(fiber, *genus),
                    Gen::Below { fiber: f2, genus: g2, sup: s2 } => {
                        let own = if f2 == fiber && g2 == genus { s2.clone() } else { Ordinal::zero() };
                        f2.class_bound(fiber, *genus).map(|b| b.max(own))
                    }
                    Gen::Fam { .. } => None,
                };
                bound.is_some_and(|b| b >= *sup)
            }
            Gen::Fam { .. } => false,
        }
    }
}

/// Short human rendering, via the signature of the type.
impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_signature())
    }
}

impl Serialize for Ty {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_over_tower_collapses() {
        // a ray accumulating on a limit of points is w^1
        let t = Ty::Tower { fiber: Fiber(vec![Gen::One(Ty::point())]), genus: false, height: OExpr::zero() };
        assert_eq!(t.canonical(), Ty::ord(Ordinal::one(), false));
        let below = Gen::Below { fiber: Fiber::default(), genus: false, sup: Ordinal::omega() };
        let t = Ty::Tower { fiber: Fiber(vec![below]), genus: false, height: OExpr::zero() };
        assert_eq!(t.canonical(), Ty::ord(Ordinal::omega(), false));
    }

    #[test]
    fn cantor_absorbs_rank() {
        let c1 = Ty::Cantor { fiber: Fiber(vec![Gen::One(Ty::point())]), genus: false };
        let t = Ty::Tower { fiber: Fiber(vec![Gen::One(c1.clone())]), genus: false, height: OExpr::lit(3) };
        assert_eq!(t.canonical(), c1);
    }

    #[test]
    fn occurrence_of_towers() {
        let w2 = Ty::ord(Ordinal::nat(2), false);
        assert!(Ty::ord(Ordinal::one(), false).in_down(&w2));
        assert!(Ty::point().in_down(&w2));
        assert!(!w2.in_down(&w2));
        assert!(!Ty::point().in_down(&Ty::cantor(false)));
    }

    #[test]
    fn antichain_pruning() {
        let f = Fiber(vec![Gen::One(Ty::point()), Gen::One(Ty::ord(Ordinal::nat(2), false))]);
        assert_eq!(f.canonical().0.len(), 1);
        let f = Fiber(vec![
            Gen::Below { fiber: Fiber::default(), genus: true, sup: Ordinal::omega() },
            Gen::One(Ty::ord(Ordinal::omega(), true)),
        ]);
        assert_eq!(f.canonical(), Fiber(vec![Gen::One(Ty::ord(Ordinal::omega(), true))]));
    }
}
