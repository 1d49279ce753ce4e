//! Normal forms by rewriting, stability, wedge decomposition.
//!
//! Rules R1-R9 run to a fixpoint; R10 only when building an ordered
//! certificate. Syntactic rules (R1-R3) fire anywhere and keep vertex
//! counts. The others need the redex closed and are guarded: redex and
//! contractum must have the same maximal end types and genus class. They
//! never fire inside a convergence base, or inside the family of a
//! convergence that itself sits in one, because there the members
//! attached by depth see the vertex model and not just the end space.
//!
//! Termination measure, compared lexicographically (see [`measure`]):
//! depth-weighted Convs with a composite base, Convs, genus weight
//! (non-genus nodes under each `o(..)`), size, depth-weighted unsorted wedges.
//! Closed ranges are expanded once before rewriting starts.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::answer::Answer;
use crate::poset::{self, LocalStructure};
use crate::semantics::{
    char_pair, generic_index, genus_class, has_ends, is_countable, members, ms_form, space_of, GenusClass,
    GenusSupport, Mult, SpaceError,
};
use crate::signature::{FamilyExpr, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One rewrite: `before` at `path` became `after`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub before: Signature,
    pub after: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum UnstableReason {
    InfinitelyManyIncomparableMaxTypes { members: Vec<(u64, Signature)>, types: Vec<Signature> },
    FailedClopenChain { index: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnstableWitness {
    pub path: Signature,
    pub reason: UnstableReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum Stability {
    Stable { ordered: Signature },
    Unstable { witness: UnstableWitness },
    Unknown { reason: String },
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Stability::Stable { .. } => "Stable",
            Stability::Unstable { .. } => "Unstable",
            Stability::Unknown { .. } => "Unknown",
        }
    }
}

/// Clause-by-clause record that `ordered` is an ordered signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub ordered: Signature,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalSignature {
    pub sig: Signature,
    pub ordered_certificate: Option<Certificate>,
    pub stability: Stability,
    pub trace: Vec<Step>,
}

// ---------------------------------------------------------------------
// tree access

fn children(s: &Signature) -> Vec<&Signature> {
    match s {
        Signature::Rose(_) | Signature::Cantor | Signature::Ord(_) => vec![],
        Signature::Genus(x) => vec![x],
        Signature::Wedge(ps) => ps.iter().collect(),
        Signature::Vee { body, .. } => vec![body],
        Signature::Conv(f, b) => {
            let mut out = Vec::new();
            fam_children(f, &mut out);
            out.push(b);
            out
        }
    }
}

fn fam_children<'a>(f: &'a FamilyExpr, out: &mut Vec<&'a Signature>) {
    match f {
        FamilyExpr::Const(y) | FamilyExpr::Param(y) => out.push(y),
        FamilyExpr::Accum(g) => fam_children(g, out),
        FamilyExpr::Stride { inner, .. } => fam_children(inner, out),
        FamilyExpr::Wedge(fs) => fs.iter().for_each(|g| fam_children(g, out)),
        FamilyExpr::Prefix(h, t) => {
            out.extend(h.iter());
            fam_children(t, out);
        }
    }
}

fn children_mut(s: &mut Signature) -> Vec<&mut Signature> {
    match s {
        Signature::Rose(_) | Signature::Cantor | Signature::Ord(_) => vec![],
        Signature::Genus(x) => vec![&mut **x],
        Signature::Wedge(ps) => ps.iter_mut().collect(),
        Signature::Vee { body, .. } => vec![&mut **body],
        Signature::Conv(f, b) => {
            let mut out = Vec::new();
            fam_children_mut(f, &mut out);
            out.push(&mut **b);
            out
        }
    }
}

fn fam_children_mut<'a>(f: &'a mut FamilyExpr, out: &mut Vec<&'a mut Signature>) {
    match f {
        FamilyExpr::Const(y) | FamilyExpr::Param(y) => out.push(y),
        FamilyExpr::Accum(g) => fam_children_mut(g, out),
        FamilyExpr::Stride { inner, .. } => fam_children_mut(inner, out),
        FamilyExpr::Wedge(fs) => fs.iter_mut().for_each(|g| fam_children_mut(g, out)),
        FamilyExpr::Prefix(h, t) => {
            out.extend(h.iter_mut());
            fam_children_mut(t, out);
        }
    }
}

fn at_mut<'a>(s: &'a mut Signature, path: &[usize]) -> &'a mut Signature {
    match path.split_first() {
        None => s,
        Some((&i, rest)) => {
            let c = children_mut(s).into_iter().nth(i).expect("valid path");
            at_mut(c, rest)
        }
    }
}

/// `Param(t)` with `t` closed is the constant family `t`.
fn tidy_families(s: &mut Signature) {
    if let Signature::Conv(f, _) = s {
        tidy_family(f);
    }
    for c in children_mut(s) {
        tidy_families(c);
    }
}

fn tidy_family(f: &mut FamilyExpr) {
    match f {
        FamilyExpr::Param(t) if !t.has_var() => *f = FamilyExpr::Const(t.clone()),
        FamilyExpr::Accum(g) => tidy_family(g),
        FamilyExpr::Stride { inner, .. } => tidy_family(inner),
        FamilyExpr::Wedge(fs) => fs.iter_mut().for_each(tidy_family),
        FamilyExpr::Prefix(_, t) => tidy_family(t),
        _ => {}
    }
}

/// Replaces every range with a literal bound by its explicit wedge,
/// inside families too.
fn expand_ranges(s: &mut Signature) -> bool {
    let mut changed = false;
    if let Signature::Vee { lo, hi, body } = s {
        if !hi.has_var() {
            let parts: Vec<Signature> =
                if hi.b < *lo { vec![] } else { (*lo..=hi.b).map(|i| body.subst(i)).collect() };
            *s = Signature::wedge(parts);
            changed = true;
        }
    }
    for c in children_mut(s) {
        changed |= expand_ranges(c);
    }
    changed
}

// ---------------------------------------------------------------------
// measure

fn composite(b: &Signature) -> bool {
    match b {
        Signature::Wedge(_) | Signature::Vee { .. } => true,
        Signature::Genus(x) => composite(x),
        _ => false,
    }
}

fn all_nodes(s: &Signature) -> Vec<&Signature> {
    let mut out = vec![s];
    for c in children(s) {
        out.extend(all_nodes(c));
    }
    out
}

fn genus_nodes(s: &Signature) -> usize {
    usize::from(matches!(s, Signature::Genus(_))) + children(s).into_iter().map(genus_nodes).sum::<usize>()
}

/// Lexicographic termination measure; every rule application strictly
/// decreases it. Entries: convergences with a split base weighted by
/// nesting depth, convergences, genus weight (non-genus nodes under each `o(..)`), size,
/// unsorted wedges.
///
/// A base split at depth d removes weight d+1 and can make at most the
/// enclosing convergence (weight d) split-based. Sorting a wedge can
/// unsort wedges above it, so an unsorted wedge at depth d weighs 2^d.
pub fn measure(s: &Signature) -> [usize; 5] {
    fn walk(s: &Signature, convs: usize, depth: usize, m: &mut [usize; 5]) {
        let mut inner = convs;
        match s {
            Signature::Conv(_, b) => {
                m[1] += 1;
                if composite(b) {
                    m[0] += convs + 1;
                }
                inner += 1;
            }
            Signature::Genus(x) => m[2] += x.size() - genus_nodes(x),
            Signature::Wedge(ps) => {
                if wedge_canon(ps) != *s {
                    m[4] = m[4].saturating_add(1 << depth.min(62));
                }
            }
            _ => {}
        }
        for c in children(s) {
            walk(c, inner, depth + 1, m);
        }
    }
    let mut m = [0, 0, 0, s.size(), 0];
    walk(s, 0, 0, &mut m);
    m
}

// ---------------------------------------------------------------------
// rules

/// Flattened, Rose-merged, sorted wedge of `parts`.
fn wedge_canon(parts: &[Signature]) -> Signature {
    fn splice(p: &Signature, out: &mut Vec<Signature>) {
        match p {
            Signature::Wedge(qs) => qs.iter().for_each(|q| splice(q, out)),
            q => out.push(q.clone()),
        }
    }
    let mut flat = Vec::new();
    parts.iter().for_each(|p| splice(p, &mut flat));
    let roses: u64 = flat.iter().map(|p| if let Signature::Rose(k) = p { *k } else { 0 }).sum();
    let mut out: Vec<Signature> = flat.into_iter().filter(|p| !matches!(p, Signature::Rose(_))).collect();
    if roses > 0 || out.is_empty() {
        out.push(Signature::Rose(roses));
    }
    out.sort();
    Signature::wedge(out)
}

fn same_semantics(a: &Signature, b: &Signature) -> bool {
    match (space_of(a), space_of(b)) {
        (Ok(x), Ok(y)) => x == y && genus_class(a) == genus_class(b),
        _ => false,
    }
}

fn r1(node: &Signature) -> Option<Signature> {
    match node {
        Signature::Wedge(ps) => Some(wedge_canon(ps)).filter(|w| w != node),
        _ => None,
    }
}

fn r2(node: &Signature) -> Option<Signature> {
    let Signature::Genus(x) = node else { return None };
    match &**x {
        // on a finite graph each mark adds a handle at the one vertex
        Signature::Genus(y) if !y.has_var() && has_ends(y) => Some(Signature::genus((**y).clone())),
        Signature::Rose(k) => Some(Signature::Rose(k + 1)),
        Signature::Wedge(ps) if ps.iter().any(|p| !p.has_var() && has_ends(p)) => {
            Some(Signature::Wedge(ps.iter().cloned().map(Signature::genus).collect()))
        }
        _ => None,
    }
}

fn r3(node: &Signature) -> Option<Signature> {
    let Signature::Conv(f, base) = node else { return None };
    let FamilyExpr::Const(Signature::Rose(k)) = &**f else { return None };
    if *k == 0 {
        return Some((**base).clone());
    }
    (!base.has_var() && has_ends(base)).then(|| Signature::genus((**base).clone()))
}

fn r4(node: &Signature) -> Option<Signature> {
    let Signature::Conv(f, base) = node else { return None };
    let Signature::Wedge(parts) = &**base else { return None };
    if parts.iter().any(composite) {
        return None;
    }
    let mut inside = Vec::new();
    fam_children(f, &mut inside);
    if inside.iter().any(|s| all_nodes(s).iter().any(|n| matches!(n, Signature::Conv(_, b) if composite(b)))) {
        return None;
    }
    let split = Signature::Wedge(parts.iter().map(|p| Signature::conv((**f).clone(), p.clone())).collect());
    same_semantics(node, &split).then_some(split)
}

fn r5(node: &Signature) -> Option<Signature> {
    if matches!(node, Signature::Rose(_) | Signature::Ord(_)) {
        return None;
    }
    let g = genus_class(node);
    let roses = match g {
        GenusClass::Zero => 0,
        GenusClass::Finite(k) => k,
        GenusClass::Infinite => return None,
    };
    let out = if !has_ends(node) {
        Signature::Rose(roses)
    } else {
        if !is_countable(node) {
            return None;
        }
        let (a, n) = ms_form(node).ok()?;
        if n > 16 {
            return None;
        }
        let mut parts = vec![Signature::Rose(roses)];
        parts.extend((0..n).map(|_| Signature::ord_lit(&a)));
        wedge_canon(&parts)
    };
    (out != *node).then_some(out)
}

fn r6(node: &Signature) -> Option<Signature> {
    if matches!(node, Signature::Cantor) {
        return None;
    }
    let c = char_pair(node);
    if !c.perfect {
        return None;
    }
    let out = match (c.genus, c.genus_support) {
        (GenusClass::Zero, _) => Signature::Cantor,
        (GenusClass::Infinite, GenusSupport::All) => Signature::genus(Signature::Cantor),
        (GenusClass::Finite(k), _) => wedge_canon(&[Signature::Rose(k), Signature::Cantor]),
        _ => return None,
    };
    (out != *node).then_some(out)
}

fn is_minimal_base(b: &Signature) -> bool {
    match b {
        Signature::Ord(e) => e.closed().is_some_and(|a| a.is_zero()),
        Signature::Genus(x) => is_minimal_base(x),
        _ => false,
    }
}

fn r7(node: &Signature) -> Option<Signature> {
    let Signature::Conv(f, base) = node else { return None };
    let FamilyExpr::Const(z) = &**f else { return None };
    // a split payload would hand the enclosing convergence a split base
    if composite(z) || !is_minimal_base(base) {
        return None;
    }
    let sz = space_of(z).ok()?;
    let [p] = sz.pieces.as_slice() else { return None };
    (p.ty.is_cantor() && same_semantics(node, z)).then(|| z.clone())
}

fn r8(node: &Signature) -> Option<Signature> {
    let Signature::Wedge(ps) = node else { return None };
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            if ps[i] != ps[j] {
                continue;
            }
            let Ok(s) = space_of(&ps[i]) else { continue };
            let cantor = !s.is_empty() && s.pieces.iter().all(|p| p.mult == Mult::Cantor);
            if cantor && matches!(genus_class(&ps[i]), GenusClass::Zero | GenusClass::Infinite) {
                let mut rest = ps.clone();
                rest.remove(j);
                return Some(Signature::wedge(rest));
            }
        }
    }
    None
}

fn r9(node: &Signature) -> Option<Signature> {
    let Signature::Wedge(ps) = node else { return None };
    if r1(node).is_some() {
        return None;
    }
    for i in 0..ps.len() {
        let mut rest = ps.clone();
        rest.remove(i);
        let cand = wedge_canon(&rest);
        if same_semantics(node, &cand) {
            return Some(cand);
        }
    }
    None
}

type RuleFn = fn(&Signature) -> Option<Signature>;

const RULES: [(Rule, RuleFn, bool); 9] = [
    (Rule::R1, r1, false),
    (Rule::R2, r2, false),
    (Rule::R3, r3, false),
    (Rule::R4, r4, true),
    (Rule::R5, r5, true),
    (Rule::R6, r6, true),
    (Rule::R7, r7, true),
    (Rule::R8, r8, true),
    (Rule::R9, r9, true),
];

struct Redex {
    path: Vec<usize>,
    rule: Rule,
    after: Signature,
}

/// Redexes in post-order; stops at the first when `first_only`.
/// `modeled`: the vertex model of `s` is observed by an enclosing
/// convergence (members sit at vertices by depth), so only the rules that
/// keep vertex counts may fire here.
fn redexes(s: &Signature, path: &mut Vec<usize>, modeled: bool, first_only: bool, out: &mut Vec<Redex>) {
    let kids = children(s);
    let last = kids.len().saturating_sub(1);
    let known = out.len();
    for (i, c) in kids.into_iter().enumerate() {
        let base = matches!(s, Signature::Conv(..)) && i == last;
        path.push(i);
        redexes(c, path, modeled || base, first_only, out);
        path.pop();
        if first_only && !out.is_empty() {
            return;
        }
    }
    // semantic rules pick among equivalent contracta, so they wait until
    // everything below is in normal form
    let settled = out.len() == known && !s.has_var() && !modeled;
    for (rule, f, semantic) in RULES {
        if semantic && !settled {
            continue;
        }
        if let Some(after) = f(s) {
            out.push(Redex { path: path.clone(), rule, after });
            if first_only {
                return;
            }
        }
    }
}

/// Rewrites to normal form. `choose(k)` picks one of `k` available
/// redexes; `None` means the deterministic innermost-first strategy.
pub fn rewrite_with(sig: &Signature, choose: Option<&mut dyn FnMut(usize) -> usize>) -> (Signature, Vec<Step>) {
    rewrite_core(sig, choose, &mut |_| {})
}

/// Every whole term met on the way to normal form, starting after range
/// expansion.
pub fn trajectory(sig: &Signature, choose: Option<&mut dyn FnMut(usize) -> usize>) -> Vec<Signature> {
    let mut out = Vec::new();
    rewrite_core(sig, choose, &mut |s| out.push(s.clone()));
    out
}

fn rewrite_core(
    sig: &Signature,
    mut choose: Option<&mut dyn FnMut(usize) -> usize>,
    seen: &mut dyn FnMut(&Signature),
) -> (Signature, Vec<Step>) {
    let mut s = sig.clone();
    let mut trace = Vec::new();
    if expand_ranges(&mut s) {
        trace.push(Step { rule: Rule::R1, path: vec![], before: sig.clone(), after: s.clone() });
    }
    tidy_families(&mut s);
    loop {
        seen(&s);
        let mut found = Vec::new();
        redexes(&s, &mut Vec::new(), false, choose.is_none(), &mut found);
        if found.is_empty() {
            return (s, trace);
        }
        let pick = match choose.as_mut() {
            Some(c) => c(found.len()) % found.len(),
            None => 0,
        };
        let r = found.swap_remove(pick);
        let slot = at_mut(&mut s, &r.path);
        let before = std::mem::replace(slot, r.after.clone());
        trace.push(Step { rule: r.rule, path: r.path, before, after: r.after });
        tidy_families(&mut s);
    }
}

thread_local! {
    static NF: RefCell<HashMap<Signature, Signature>> = RefCell::new(HashMap::new());
}

/// Normal form only, memoized.
pub fn rewrite(sig: &Signature) -> Signature {
    if let Some(r) = NF.with(|m| m.borrow().get(sig).cloned()) {
        return r;
    }
    let (nf, _) = rewrite_with(sig, None);
    NF.with(|m| m.borrow_mut().insert(sig.clone(), nf.clone()));
    nf
}

pub fn normalize(sig: &Signature) -> CanonicalSignature {
    let (nf, trace) = rewrite_with(sig, None);
    let stability = stability_of(&nf);
    let ordered_certificate = if stability.is_stable() { certificate(&nf) } else { None };
    CanonicalSignature { sig: nf, ordered_certificate, stability, trace }
}

// ---------------------------------------------------------------------
// stability

fn sampled(s: &Signature) -> Signature {
    if s.has_var() {
        s.subst(generic_index(s))
    } else {
        s.clone()
    }
}

/// Every maximal type of member `k` reappears in member `k+1` or `k+2`,
/// for a window of large `k`. `Err(k)` names the first failing index.
fn chain_check(f: &FamilyExpr) -> Result<(), Option<u64>> {
    if matches!(f, FamilyExpr::Const(_)) {
        return Ok(());
    }
    let (_, tail) = members(f);
    if !tail.has_var() {
        return Ok(());
    }
    let n = generic_index(&tail);
    for k in n..n + 3 {
        let here = space_of(&tail.subst(k)).map_err(|_| None)?;
        let later: Vec<_> = [k + 1, k + 2].iter().map(|j| space_of(&tail.subst(*j))).collect::<Result<_, _>>().map_err(|_| None)?;
        for p in &here.pieces {
            if !later.iter().any(|s| s.has_type(&p.ty)) {
                return Err(Some(k));
            }
        }
    }
    Ok(())
}

fn convs(s: &Signature) -> Vec<Signature> {
    s.subterms()
        .into_iter()
        .filter(|t| matches!(t, Signature::Conv(..)))
        .map(sampled)
        .collect()
}

pub fn stability_of(nf: &Signature) -> Stability {
    match space_of(nf) {
        Err(SpaceError::Unstable(ev)) => {
            let types: Vec<_> = ev.types.iter().collect();
            let pairwise = types.len() >= 3
                && (0..types.len()).all(|i| {
                    (0..types.len()).all(|j| i == j || !poset::ty_leq(types[i], types[j]))
                });
            if !pairwise {
                return Stability::Unknown { reason: format!("incomparability of members of {} not confirmed", ev.at) };
            }
            Stability::Unstable {
                witness: UnstableWitness {
                    path: ev.at.clone(),
                    reason: UnstableReason::InfinitelyManyIncomparableMaxTypes {
                        members: ev.members.clone(),
                        types: ev.types.iter().map(|t| rewrite(&t.to_signature())).collect(),
                    },
                },
            }
        }
        Err(SpaceError::Unknown(r)) => Stability::Unknown { reason: r },
        Ok(_) => {
            for c in convs(nf) {
                let Signature::Conv(f, _) = &c else { unreachable!() };
                if let Err(at) = chain_check(f) {
                    let reason = match at {
                        Some(k) => format!("member {k} of {c} has no later copy"),
                        None => format!("members of {c} unresolved"),
                    };
                    return Stability::Unknown { reason };
                }
            }
            Stability::Stable { ordered: certificate(nf).map(|c| c.ordered).unwrap_or_else(|| nf.clone()) }
        }
    }
}

pub fn is_stable(sig: &Signature) -> Stability {
    stability_of(&rewrite(sig))
}

// ---------------------------------------------------------------------
// ordered certificate

/// R10: replace a non-nesting family by its cumulative version.
fn cumulativize(s: &Signature) -> Signature {
    match s {
        Signature::Conv(f, base) => {
            let base = cumulativize(base);
            let nested = matches!(&**f, FamilyExpr::Const(_) | FamilyExpr::Accum(_)) || nested_members(f);
            let cand = Signature::conv(FamilyExpr::Accum(f.clone()), base.clone());
            if !nested && same_semantics(s, &cand) {
                cand
            } else {
                Signature::conv((**f).clone(), base)
            }
        }
        Signature::Wedge(ps) => Signature::Wedge(ps.iter().map(cumulativize).collect()),
        Signature::Genus(x) => Signature::genus(cumulativize(x)),
        _ => s.clone(),
    }
}

fn nested_members(f: &FamilyExpr) -> bool {
    let (_, tail) = members(f);
    if !tail.has_var() {
        return true;
    }
    let n = generic_index(&tail);
    (n..n + 3).all(|k| match (space_of(&tail.subst(k)), space_of(&tail.subst(k + 1))) {
        (Ok(a), Ok(b)) => a.pieces.iter().all(|p| b.has_type(&p.ty)),
        _ => false,
    })
}

fn conv_clauses(c: &Signature) -> Option<String> {
    let Signature::Conv(f, base) = c else { return None };
    if !nested_members(f) {
        return None;
    }
    let top = space_of(c).ok()?;
    let (heads, tail) = members(f);
    let mut samples = heads;
    samples.push(sampled(&tail));
    for m in &samples {
        for p in space_of(m).ok()?.pieces {
            if !top.pieces.iter().all(|q| p.ty.in_down(&q.ty)) {
                return None;
            }
        }
    }
    let minimal = matches!(&**base, Signature::Cantor) || is_minimal_base(base)
        || matches!(&**base, Signature::Genus(x) if **x == Signature::Cantor);
    if !minimal {
        return None;
    }
    let base_genus = matches!(&**base, Signature::Genus(_));
    if !base_genus && samples.iter().any(|m| genus_class(m) != GenusClass::Zero) {
        return None;
    }
    Some(format!(
        "{c}: 3(a) members nest; 3(b) member types lie below every maximal type; 3(c) base {base}; 4 genus {}",
        if base_genus { "on the base" } else { "absent from members" }
    ))
}

pub fn certificate(nf: &Signature) -> Option<Certificate> {
    let ordered = cumulativize(nf);
    let mut checks = Vec::new();
    let parts: Vec<&Signature> = match &ordered {
        Signature::Wedge(ps) => ps.iter().collect(),
        s => vec![s],
    };
    let roses: u64 = parts.iter().map(|p| if let Signature::Rose(k) = p { *k } else { 0 }).sum();
    match genus_class(&ordered) {
        GenusClass::Finite(k) if k != roses => return None,
        GenusClass::Finite(k) => checks.push(format!("1: finite genus {k} carried by R{k}")),
        g => checks.push(format!("1: genus {g:?}, no rose part needed")),
    }
    let comps: Vec<&Signature> = parts.into_iter().filter(|p| !matches!(p, Signature::Rose(_))).collect();
    let mut tops = Vec::new();
    for p in &comps {
        let s = space_of(p).ok()?;
        let [piece] = s.pieces.as_slice() else { return None };
        tops.push(piece.ty.clone());
    }
    for i in 0..tops.len() {
        for j in 0..tops.len() {
            if i != j && tops[i].in_down(&tops[j]) {
                return None;
            }
        }
    }
    checks.push(format!("2: {} self-similar wedge components, none absorbed", comps.len()));
    for c in convs(&ordered) {
        checks.push(conv_clauses(&c)?);
    }
    checks.push("5: members and bases are checked as their own Convs above".into());
    Some(Certificate { ordered, checks })
}

// ---------------------------------------------------------------------
// decomposition, self-similarity, isomorphism

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub components: Vec<LocalStructure>,
    /// Finite positive genus, kept as a separate `Rk` component.
    pub rose: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error("input is not stable ({0})")]
    NotStable(&'static str),
}

pub fn wedge_decomposition(sig: &Signature) -> Result<Decomposition, DecompError> {
    let nf = rewrite(sig);
    let st = stability_of(&nf);
    if !st.is_stable() {
        return Err(DecompError::NotStable(st.label()));
    }
    let space = space_of(&nf).expect("stable");
    let mut components = Vec::new();
    for p in &space.pieces {
        let z = LocalStructure::from_ty(&p.ty);
        let k = match p.mult {
            Mult::Count(k) => k,
            Mult::Cantor => 1,
        };
        components.extend((0..k.min(64)).map(|_| z.clone()));
    }
    let rose = match genus_class(&nf) {
        GenusClass::Finite(k) => Some(k),
        _ => None,
    };
    Ok(Decomposition { components, rose })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfSimilarity {
    pub answer: Answer,
    pub reason: String,
    pub decomposition: Option<Decomposition>,
}

pub fn is_self_similar(sig: &Signature) -> SelfSimilarity {
    let nf = rewrite(sig);
    match stability_of(&nf) {
        Stability::Unknown { reason } => {
            return SelfSimilarity { answer: Answer::Unknown, reason: format!("stability unknown: {reason}"), decomposition: None }
        }
        Stability::Unstable { .. } => {
            return SelfSimilarity { answer: Answer::No, reason: "not stable".into(), decomposition: None }
        }
        Stability::Stable { .. } => {}
    }
    let d = wedge_decomposition(&nf).expect("stable");
    if d.components.is_empty() {
        return SelfSimilarity { answer: Answer::No, reason: "no ends".into(), decomposition: Some(d) };
    }
    if d.rose.is_some_and(|k| k > 0) {
        return SelfSimilarity { answer: Answer::No, reason: "finite positive genus".into(), decomposition: Some(d) };
    }
    let one = d.components.len() == 1;
    let reason = if one { "one wedge component".to_string() } else { format!("{} wedge components", d.components.len()) };
    SelfSimilarity { answer: Answer::from_bool(one), reason, decomposition: Some(d) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", content = "invariant")]
pub enum Iso {
    Yes,
    No(String),
    Unknown,
}

pub fn isomorphic(a: &Signature, b: &Signature) -> Iso {
    let (na, nb) = (rewrite(a), rewrite(b));
    if na == nb {
        return Iso::Yes;
    }
    let (ca, cb) = (char_pair(&na), char_pair(&nb));
    let checks: [(&str, bool); 7] = [
        ("genusClass", ca.genus == cb.genus),
        ("countability", ca.countable == cb.countable),
        ("msForm", ca.ms_form == cb.ms_form),
        ("perfect", ca.perfect == cb.perfect),
        ("genusSupport", ca.genus_support == cb.genus_support),
        ("isolated plain end", ca.has_isolated_plain_end == cb.has_isolated_plain_end),
        ("isolated genus end", ca.has_isolated_genus_end == cb.has_isolated_genus_end),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, same)| !same) {
        return Iso::No(name.to_string());
    }
    let (sa, sb) = (space_of(&na), space_of(&nb));
    if let (Ok(sa), Ok(sb)) = (&sa, &sb) {
        let exact = sa.pieces.iter().chain(&sb.pieces).all(|p| !p.ty.has_fam());
        if exact && sa != sb {
            return Iso::No("maximalEndTypes".into());
        }
        if sa == sb && stability_of(&na).is_stable() && stability_of(&nb).is_stable() {
            return Iso::Yes;
        }
    }
    Iso::Unknown
}

/// The minimal structure carrying the maximal ends of `z`.
pub fn max_shell(z: &LocalStructure) -> Signature {
    let base = if z.ty.is_cantor() { Signature::Cantor } else { Signature::ray() };
    if z.ty.genus() {
        Signature::genus(base)
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse;

    fn nf(s: &str) -> Signature {
        rewrite(&parse(s).unwrap())
    }

    #[test]
    fn redundancy_collapses() {
        assert_eq!(nf("C -> 1"), nf("C"));
        assert_eq!(nf("(1 -> C) -> 1"), nf("1 -> C"));
        assert_eq!(nf("(w^2+1) -> 1"), nf("w^3+1"));
        assert_eq!(nf("R1 -> (w+1)"), nf("o(w+1)"));
    }

    #[test]
    fn wedges_sort_and_merge() {
        assert_eq!(nf("R1 v 1 v R2"), nf("R3 v 1"));
        assert_eq!(nf("o(R0)"), Signature::Rose(1));
    }

    #[test]
    fn stability_labels() {
        assert!(is_stable(&parse("1 -> C").unwrap()).is_stable());
        assert_eq!(is_stable(&parse("{(w^n+1) -> o(1)} -> o(1)").unwrap()).label(), "Unstable");
    }
}
