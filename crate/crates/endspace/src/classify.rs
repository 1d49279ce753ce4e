//! Dense conjugacy verdicts for `Maps(X)` and `Homeo(dX, dX_g)`.
//!
//! Rules are tried in a fixed order and the first that decides wins, so
//! the theorem tag of a verdict is reproducible. The gcd and flux
//! searches use the occurrence order on end types; the singleton
//! readings of [`poset::ty_leq`] enter only through the babel check.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::answer::Answer;
use crate::canonical::{rewrite, stability_of, Stability};
use crate::poset::{self, LocalStructure};
use crate::semantics::{genus_class, has_ends, space_of, Fiber, Gen, GenusClass, Mult, Space, Ty};
use crate::ordinal::OExpr;
use crate::signature::{FamilyExpr, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    FiniteTree,
    FiniteGenus,
    FiniteEndType,
    UniqueMaxEnd,
    CantorTree,
    SelfSimilarNo,
    Babel1,
    Babel2,
    GcdFlux,
    GeneralFlux,
    TreeCantorFactor,
    UnknownCategory1,
    UnknownCategory2,
    UnknownCategory3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Lambda {
    End { end: LocalStructure },
    LoopMark,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GcdWitness {
    pub mu1: LocalStructure,
    pub mu2: LocalStructure,
    pub lambda: Lambda,
    /// Each non-maximal type above `lambda`, with the one maximal type
    /// dominating it.
    pub side_check: Vec<(Signature, Signature)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitWitness {
    pub nu1: LocalStructure,
    pub nu2: LocalStructure,
    pub lambda: Lambda,
    pub y1: Vec<Signature>,
    pub y2: Vec<Signature>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Babel {
    Babel1,
    Babel2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Witness {
    Graph { normal_form: Signature },
    Genus { genus: u64 },
    EndType { end_type: Signature, count: u64 },
    MaxEnd { end_type: Signature, shell: Signature },
    Gcd { gcd: GcdWitness },
    Babel { max_types: Vec<Signature> },
    Split { split: SplitWitness },
    Recurse { target: Signature, verdict: Box<Verdict> },
    Open { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub answer: Answer,
    pub theorem: Theorem,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<u8>,
    pub witness: Witness,
    pub trace: Vec<String>,
}

impl Verdict {
    fn new(answer: Answer, theorem: Theorem, witness: Witness, trace: Vec<String>) -> Verdict {
        let category = match theorem {
            Theorem::UnknownCategory1 => Some(1),
            Theorem::UnknownCategory2 => Some(2),
            Theorem::UnknownCategory3 => Some(3),
            _ => None,
        };
        Verdict { answer, theorem, category, witness, trace }
    }
}

// ---------------------------------------------------------------------
// represented types

/// Types met below the maximal ones: listed closures plus, for every
/// tower class, one height per interval on which the set of dominating
/// maximal types is constant. `None` when a family generator hides the
/// set.
fn universe(maxes: &[Ty]) -> Option<Vec<Ty>> {
    if maxes.iter().any(Ty::has_fam) {
        return None;
    }
    let mut u: Vec<Ty> = maxes.iter().flat_map(Ty::listed_closure).collect();
    let mut classes: BTreeSet<(Fiber, bool)> = BTreeSet::new();
    fn below_classes(t: &Ty, out: &mut BTreeSet<(Fiber, bool)>) {
        if let Ty::Tower { fiber, genus, .. } = t {
            out.insert((fiber.clone(), *genus));
        }
        for g in &t.fiber().0 {
            match g {
                Gen::One(s) => below_classes(s, out),
                Gen::Below { fiber, genus, .. } => {
                    out.insert((fiber.clone(), *genus));
                    for g2 in &fiber.0 {
                        if let Gen::One(s) = g2 {
                            below_classes(s, out);
                        }
                    }
                }
                Gen::Fam { .. } => {}
            }
        }
    }
    for t in &u {
        below_classes(t, &mut classes);
    }
    for (f, g) in classes {
        let mut bounds = vec![crate::ordinal::Ordinal::zero()];
        for m in maxes {
            bounds.push(m.class_bound(&f, g)?);
        }
        let mut hs = Vec::new();
        for b in bounds {
            hs.extend(b.pred());
            hs.push(b.succ().succ());
            hs.push(b.succ());
            hs.push(b);
        }
        {
            for h in hs {
                let t = Ty::Tower { fiber: f.clone(), genus: g, height: OExpr::from_ordinal(&h) }.canonical();
                if maxes.iter().any(|m| t.occ_le(m)) {
                    u.push(t);
                }
            }
        }
    }
    u.sort();
    u.dedup();
    Some(u)
}

fn dominators(t: &Ty, maxes: &[Ty]) -> BTreeSet<usize> {
    maxes.iter().enumerate().filter(|(_, m)| t.occ_le(m)).map(|(i, _)| i).collect()
}

fn sig_of(t: &Ty) -> Signature {
    LocalStructure::from_ty(t).sig
}

struct Pool {
    pieces: Vec<(Ty, Mult)>,
    maxes: Vec<Ty>,
    universe: Vec<Ty>,
}

fn pool(space: &Space) -> Option<Pool> {
    let pieces: Vec<(Ty, Mult)> = space.pieces.iter().map(|p| (p.ty.clone(), p.mult)).collect();
    let maxes: Vec<Ty> = pieces.iter().map(|p| p.0.clone()).collect();
    let universe = universe(&maxes)?;
    Some(Pool { pieces, maxes, universe })
}

impl Pool {
    fn is_max(&self, t: &Ty) -> bool {
        self.maxes.contains(t)
    }

    fn lambdas(&self) -> impl Iterator<Item = &Ty> {
        self.universe.iter().filter(|t| !t.is_cantor() && !self.is_max(t))
    }

    /// Non-maximal represented types strictly above `l`, including the
    /// tower one step above it.
    fn above(&self, l: &Ty) -> Vec<Ty> {
        let mut out: Vec<Ty> = self.universe.iter().filter(|t| l.in_down(t) && !self.is_max(t)).cloned().collect();
        if let Ty::Tower { fiber, genus, height } = l {
            let next = Ty::Tower { fiber: fiber.clone(), genus: *genus, height: height.concat(&OExpr::lit(1)) }.canonical();
            if !self.is_max(&next) && self.maxes.iter().any(|m| next.occ_le(m)) && !out.contains(&next) {
                out.push(next);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------
// gcd

fn check_gcd(p: &Pool, lambda: Option<&Ty>, i: usize, j: usize) -> Option<Vec<(Signature, Signature)>> {
    let pair: BTreeSet<usize> = [i, j].into();
    let above: Vec<Ty> = match lambda {
        Some(l) => {
            if l.is_cantor() || !l.in_down(&p.maxes[i]) || !l.in_down(&p.maxes[j]) {
                return None;
            }
            if !dominators(l, &p.maxes).is_subset(&pair) {
                return None;
            }
            p.above(l)
        }
        None => {
            if !p.maxes[i].genus() || !p.maxes[j].genus() {
                return None;
            }
            let genus_maxes: BTreeSet<usize> = (0..p.maxes.len()).filter(|k| p.maxes[*k].genus()).collect();
            if !genus_maxes.is_subset(&pair) {
                return None;
            }
            p.universe.iter().filter(|t| t.genus() && !p.is_max(t)).cloned().collect()
        }
    };
    let mut side = Vec::new();
    for t in above {
        let d = dominators(&t, &p.maxes);
        if i == j || d.len() != 1 || !d.is_subset(&pair) {
            return None;
        }
        let k = *d.iter().next().unwrap();
        side.push((sig_of(&t), sig_of(&p.maxes[k])));
    }
    Some(side)
}

fn pairs(p: &Pool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..p.pieces.len() {
        if !matches!(p.pieces[i].1, Mult::Count(1)) {
            out.push((i, i));
        }
        for j in i + 1..p.pieces.len() {
            out.push((i, j));
        }
    }
    out
}

/// A gcd of two maximal ends, searched over the represented types.
/// `None` does not prove that no gcd exists.
pub fn gcd_witness_search(sig: &Signature) -> Option<GcdWitness> {
    let nf = rewrite(sig);
    let p = pool(&space_of(&nf).ok()?)?;
    for (i, j) in pairs(&p) {
        for l in p.lambdas() {
            if let Some(side_check) = check_gcd(&p, Some(l), i, j) {
                return Some(GcdWitness {
                    mu1: LocalStructure::from_ty(&p.maxes[i]),
                    mu2: LocalStructure::from_ty(&p.maxes[j]),
                    lambda: Lambda::End { end: LocalStructure::from_ty(l) },
                    side_check,
                });
            }
        }
        if let Some(side_check) = check_gcd(&p, None, i, j) {
            return Some(GcdWitness {
                mu1: LocalStructure::from_ty(&p.maxes[i]),
                mu2: LocalStructure::from_ty(&p.maxes[j]),
                lambda: Lambda::LoopMark,
                side_check,
            });
        }
    }
    None
}

// ---------------------------------------------------------------------
// babel

fn babel_on(space: &Space) -> Option<(Babel, Vec<Signature>)> {
    let point = Ty::point();
    let tys: Vec<&Ty> = space.pieces.iter().map(|p| &p.ty).collect();
    let dom1: Vec<&Ty> = tys.iter().copied().filter(|t| poset::ty_leq(&point, t)).collect();
    if !dom1.is_empty() && dom1.iter().all(|t| t.is_cantor()) {
        return Some((Babel::Babel1, dom1.into_iter().map(sig_of).collect()));
    }
    let dom2: Vec<&Ty> = tys.iter().copied().filter(|t| t.genus()).collect();
    if !dom2.is_empty() && dom2.iter().all(|t| t.is_cantor()) {
        return Some((Babel::Babel2, dom2.into_iter().map(sig_of).collect()));
    }
    None
}

pub fn babel_check(sig: &Signature) -> Option<Babel> {
    babel_on(&space_of(&rewrite(sig)).ok()?).map(|b| b.0)
}

// ---------------------------------------------------------------------
// flux splitting

fn check_split(p: &Pool, comps: &[usize], lambda: Option<&Ty>, a: usize, b: usize, sides: &[bool]) -> bool {
    let (ta, tb) = (&p.maxes[comps[a]], &p.maxes[comps[b]]);
    let above: Vec<Ty> = match lambda {
        Some(l) => {
            if l.is_cantor() || !l.in_down(ta) || !l.in_down(tb) {
                return false;
            }
            p.above(l)
        }
        None => {
            if !ta.genus() || !tb.genus() {
                return false;
            }
            p.universe.iter().filter(|t| t.genus() && !p.is_max(t)).cloned().collect()
        }
    };
    above.iter().all(|t| {
        let hit: BTreeSet<bool> =
            comps.iter().enumerate().filter(|(_, c)| t.occ_le(&p.maxes[**c])).map(|(k, _)| sides[k]).collect();
        hit.len() <= 1
    })
}

/// Splits the wedge components into two sides, each holding one of two
/// singleton maximal ends, so that every type above `lambda` lives on
/// one side only.
pub fn flux_splitting_search(sig: &Signature) -> Option<SplitWitness> {
    let nf = rewrite(sig);
    let p = pool(&space_of(&nf).ok()?)?;
    let mut comps = Vec::new();
    for (i, (_, m)) in p.pieces.iter().enumerate() {
        let k = match m {
            Mult::Count(k) => (*k).min(4),
            Mult::Cantor => 1,
        };
        comps.extend((0..k).map(|_| i));
    }
    if comps.len() > 14 {
        return None;
    }
    let single = |c: usize| matches!(p.pieces[comps[c]].1, Mult::Count(_));
    let mut lambdas: Vec<Option<&Ty>> = p.lambdas().map(Some).collect();
    lambdas.push(None);
    for a in 0..comps.len() {
        for b in a + 1..comps.len() {
            if !single(a) || !single(b) {
                continue;
            }
            let rest: Vec<usize> = (0..comps.len()).filter(|c| *c != a && *c != b).collect();
            for l in &lambdas {
                for mask in 0u32..(1 << rest.len()) {
                    let mut sides = vec![false; comps.len()];
                    sides[b] = true;
                    for (bit, c) in rest.iter().enumerate() {
                        sides[*c] = mask >> bit & 1 == 1;
                    }
                    if check_split(&p, &comps, *l, a, b, &sides) {
                        let side_of = |s: bool| {
                            (0..comps.len()).filter(|c| sides[*c] == s).map(|c| sig_of(&p.maxes[comps[c]])).collect()
                        };
                        return Some(SplitWitness {
                            nu1: LocalStructure::from_ty(&p.maxes[comps[a]]),
                            nu2: LocalStructure::from_ty(&p.maxes[comps[b]]),
                            lambda: match l {
                                Some(t) => Lambda::End { end: LocalStructure::from_ty(t) },
                                None => Lambda::LoopMark,
                            },
                            y1: side_of(false),
                            y2: side_of(true),
                        });
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------
// verdicts

fn has_varying_family(s: &Signature) -> bool {
    fn fam(f: &FamilyExpr) -> bool {
        !matches!(f, FamilyExpr::Const(_))
    }
    s.subterms().iter().any(|t| matches!(t, Signature::Conv(f, _) if fam(f)))
}

fn unknown(nf: &Signature, unstable: bool, reason: String, trace: Vec<String>) -> Verdict {
    let th = if unstable {
        Theorem::UnknownCategory3
    } else if has_varying_family(nf) {
        Theorem::UnknownCategory2
    } else {
        Theorem::UnknownCategory1
    };
    Verdict::new(Answer::Unknown, th, Witness::Open { reason }, trace)
}

/// Splits off a top-level `C` part; the rest must have no `C`-type end.
fn cantor_factor(nf: &Signature) -> Option<Signature> {
    let Signature::Wedge(ps) = nf else { return None };
    let c = Ty::cantor(false);
    let at = ps.iter().position(|p| *p == Signature::Cantor)?;
    let mut rest = ps.clone();
    rest.remove(at);
    let y = Signature::wedge(rest);
    let sy = space_of(&y).ok()?;
    (!sy.is_empty() && !sy.has_type(&c)).then_some(y)
}

pub fn classify_maps(sig: &Signature) -> Verdict {
    let nf = rewrite(sig);
    let mut trace = vec![format!("normal form {nf}")];
    let g = genus_class(&nf);
    if !has_ends(&nf) {
        trace.push("1: finite graph".into());
        return match g {
            GenusClass::Zero => Verdict::new(Answer::Yes, Theorem::FiniteTree, Witness::Graph { normal_form: nf }, trace),
            GenusClass::Finite(k) => Verdict::new(Answer::No, Theorem::FiniteGenus, Witness::Genus { genus: k }, trace),
            GenusClass::Infinite => unknown(&nf, false, "endless graph with infinite genus".into(), trace),
        };
    }
    if let GenusClass::Finite(k) = g {
        trace.push("2: finite positive genus".into());
        return Verdict::new(Answer::No, Theorem::FiniteGenus, Witness::Genus { genus: k }, trace);
    }
    let st = stability_of(&nf);
    let space = match (&st, space_of(&nf)) {
        (Stability::Stable { .. }, Ok(s)) => s,
        _ => {
            trace.push(format!("3: stability {}", st.label()));
            return unknown(&nf, true, format!("stability {}", st.label()), trace);
        }
    };
    if let Some(p) = space.pieces.iter().find(|p| matches!(p.mult, Mult::Count(k) if k >= 2)) {
        trace.push("3: finite end type".into());
        let Mult::Count(k) = p.mult else { unreachable!() };
        return Verdict::new(
            Answer::No,
            Theorem::FiniteEndType,
            Witness::EndType { end_type: sig_of(&p.ty), count: k },
            trace,
        );
    }
    if let [p] = space.pieces.as_slice() {
        trace.push("4: self-similar".into());
        let z = LocalStructure::from_ty(&p.ty);
        let shell = crate::canonical::max_shell(&z);
        let w = Witness::MaxEnd { end_type: z.sig.clone(), shell };
        if p.ty == Ty::cantor(false) {
            return Verdict::new(Answer::Yes, Theorem::CantorTree, w, trace);
        }
        if p.mult == Mult::Count(1) {
            return Verdict::new(Answer::Yes, Theorem::UniqueMaxEnd, w, trace);
        }
        let th = match babel_on(&space) {
            Some((Babel::Babel1, _)) => Theorem::Babel1,
            Some((Babel::Babel2, _)) => Theorem::Babel2,
            None => Theorem::SelfSimilarNo,
        };
        return Verdict::new(Answer::No, th, w, trace);
    }
    if g == GenusClass::Zero {
        if let Some(y) = cantor_factor(&nf) {
            let inner = classify_maps(&y);
            if inner.answer != Answer::Unknown {
                trace.push(format!("5: Cantor factor, recurse on {y}"));
                return Verdict::new(
                    inner.answer,
                    Theorem::TreeCantorFactor,
                    Witness::Recurse { target: y, verdict: Box::new(inner) },
                    trace,
                );
            }
        }
    }
    if let Some(gcd) = gcd_witness_search(&nf) {
        trace.push("6: gcd".into());
        return Verdict::new(Answer::No, Theorem::GcdFlux, Witness::Gcd { gcd }, trace);
    }
    if let Some((b, max_types)) = babel_on(&space) {
        trace.push("7: babel".into());
        let th = if b == Babel::Babel1 { Theorem::Babel1 } else { Theorem::Babel2 };
        return Verdict::new(Answer::No, th, Witness::Babel { max_types }, trace);
    }
    if let Some(split) = flux_splitting_search(&nf) {
        trace.push("8: flux splitting".into());
        return Verdict::new(Answer::No, Theorem::GeneralFlux, Witness::Split { split }, trace);
    }
    trace.push("9: no rule applies".into());
    unknown(&nf, false, "no obstruction or construction applies".into(), trace)
}

/// Removes all genus: `Rk` becomes `R0`, `o(X)` becomes `X`.
pub fn strip_genus(sig: &Signature) -> Signature {
    fn go(s: &Signature) -> Signature {
        match s {
            Signature::Rose(_) => Signature::Rose(0),
            Signature::Cantor | Signature::Ord(_) => s.clone(),
            Signature::Genus(x) => go(x),
            Signature::Wedge(ps) => Signature::Wedge(ps.iter().map(go).collect()),
            Signature::Vee { lo, hi, body } => Signature::Vee { lo: *lo, hi: *hi, body: Box::new(go(body)) },
            Signature::Conv(f, b) => Signature::conv(fam(f), go(b)),
        }
    }
    fn fam(f: &FamilyExpr) -> FamilyExpr {
        match f {
            FamilyExpr::Const(y) => FamilyExpr::Const(go(y)),
            FamilyExpr::Param(y) => FamilyExpr::Param(go(y)),
            FamilyExpr::Accum(g) => FamilyExpr::Accum(Box::new(fam(g))),
            FamilyExpr::Stride { k, r, inner } => FamilyExpr::Stride { k: *k, r: *r, inner: Box::new(fam(inner)) },
            FamilyExpr::Wedge(fs) => FamilyExpr::Wedge(fs.iter().map(fam).collect()),
            FamilyExpr::Prefix(h, t) => FamilyExpr::Prefix(h.iter().map(go).collect(), Box::new(fam(t))),
        }
    }
    rewrite(&go(sig))
}

fn survives_sigma(v: &Verdict) -> bool {
    match v.theorem {
        Theorem::FiniteEndType | Theorem::Babel1 => true,
        Theorem::GcdFlux => matches!(&v.witness, Witness::Gcd { gcd } if matches!(gcd.lambda, Lambda::End { .. })),
        _ => false,
    }
}

pub fn classify_homeo(sig: &Signature) -> Verdict {
    let nf = rewrite(sig);
    let g = genus_class(&nf);
    let all_genus = g == GenusClass::Infinite
        && crate::semantics::char_pair(&nf).genus_support == crate::semantics::GenusSupport::All;
    if g != GenusClass::Infinite || all_genus {
        let target = strip_genus(&nf);
        let inner = classify_maps(&target);
        if target == nf {
            return inner;
        }
        let mut trace = vec![format!("genus does not move ends; spanning tree {target}")];
        trace.extend(inner.trace.iter().cloned());
        return Verdict::new(
            inner.answer,
            inner.theorem,
            Witness::Recurse { target, verdict: Box::new(inner.clone()) },
            trace,
        );
    }
    let m = classify_maps(&nf);
    if m.answer == Answer::Yes || (m.answer == Answer::No && survives_sigma(&m)) {
        return m;
    }
    let mut trace = m.trace.clone();
    trace.push("maps verdict does not transfer".into());
    let unstable = m.theorem == Theorem::UnknownCategory3;
    unknown(&nf, unstable, "mixed genus support".into(), trace)
}

/// Re-validates the witness of a `No` verdict from scratch.
pub fn recheck(sig: &Signature, v: &Verdict) -> bool {
    let nf = rewrite(sig);
    match (&v.answer, &v.witness) {
        (Answer::No, Witness::Gcd { gcd }) => {
            let Ok(space) = space_of(&nf) else { return false };
            let Some(p) = pool(&space) else { return false };
            let i = p.maxes.iter().position(|t| *t == gcd.mu1.ty);
            let j = p.maxes.iter().position(|t| *t == gcd.mu2.ty);
            let (Some(i), Some(j)) = (i, j) else { return false };
            let l = match &gcd.lambda {
                Lambda::End { end } => Some(&end.ty),
                Lambda::LoopMark => None,
            };
            check_gcd(&p, l, i, j).is_some()
        }
        (Answer::No, Witness::Babel { .. }) => space_of(&nf).ok().and_then(|s| babel_on(&s)).is_some(),
        (Answer::No, Witness::Split { split }) => {
            let Ok(space) = space_of(&nf) else { return false };
            let Some(p) = pool(&space) else { return false };
            let mut comps = Vec::new();
            let mut sides = Vec::new();
            for (s, side) in split.y1.iter().map(|s| (s, false)).chain(split.y2.iter().map(|s| (s, true))) {
                let Ok(z) = LocalStructure::from_sig(s) else { return false };
                let Some(k) = p.maxes.iter().position(|t| *t == z.ty) else { return false };
                comps.push(k);
                sides.push(side);
            }
            let a = comps.iter().zip(&sides).position(|(c, s)| p.maxes[*c] == split.nu1.ty && !*s);
            let b = comps.iter().zip(&sides).position(|(c, s)| p.maxes[*c] == split.nu2.ty && *s);
            let (Some(a), Some(b)) = (a, b) else { return false };
            let l = match &split.lambda {
                Lambda::End { end } => Some(&end.ty),
                Lambda::LoopMark => None,
            };
            check_split(&p, &comps, l, a, b, &sides)
        }
        (Answer::No, Witness::EndType { count, .. }) => *count >= 2,
        (Answer::No, Witness::Genus { genus }) => *genus >= 1,
        (Answer::No, Witness::MaxEnd { .. }) => {
            space_of(&nf).is_ok_and(|s| matches!(s.pieces.as_slice(), [p] if p.mult == Mult::Cantor && p.ty != Ty::cantor(false)))
        }
        (Answer::No, Witness::Recurse { target, verdict }) => recheck(target, verdict),
        (Answer::No, _) => false,
        _ => true,
    }
}
