//! Local structures and the order on end types.
//!
//! Two orders live here. [`Ty::occ_le`] is occurrence: every
//! neighbourhood of the larger end contains an end of the smaller type.
//! [`ty_leq`] adds the singleton readings for the two minimal singleton
//! types: `1` lies below any end with non-genus ends nearby, `o(1)`
//! below any end accumulated by genus.

use serde::Serialize;

use crate::answer::Answer;
use crate::canonical::{self, wedge_decomposition};
use crate::ordinal::Ordinal;
use crate::semantics::{genus_class, is_countable, space_of, Gen, GenusClass, Mult, Ty};
use crate::signature::{FamilyExpr, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MaxKind {
    SingleEnd,
    CantorManyEnds,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalStructure {
    pub sig: Signature,
    #[serde(skip)]
    pub ty: Ty,
    pub max_kind: MaxKind,
    pub genus_mark: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("{0} is not self-similar")]
    NotSelfSimilar(Signature),
    #[error("maximal end types unresolved: {0}")]
    Unresolved(String),
    #[error("no local structures given")]
    Empty,
}

impl LocalStructure {
    pub fn from_ty(ty: &Ty) -> LocalStructure {
        let ty = ty.canonical();
        LocalStructure {
            sig: canonical::rewrite(&ty.to_signature()),
            max_kind: if ty.is_cantor() { MaxKind::CantorManyEnds } else { MaxKind::SingleEnd },
            genus_mark: ty.genus(),
            ty,
        }
    }

    /// The local structure named by a self-similar signature.
    pub fn from_sig(sig: &Signature) -> Result<LocalStructure, PosetError> {
        let s = space_of(sig).map_err(|e| PosetError::Unresolved(e.to_string()))?;
        let ok_genus = matches!(genus_class(sig), GenusClass::Zero | GenusClass::Infinite);
        match s.pieces.as_slice() {
            [p] if ok_genus && matches!(p.mult, Mult::Count(1) | Mult::Cantor) => {
                let mut z = LocalStructure::from_ty(&p.ty);
                z.sig = canonical::rewrite(sig);
                Ok(z)
            }
            _ => Err(PosetError::NotSelfSimilar(sig.clone())),
        }
    }
}

/// Are there non-genus ends in every neighbourhood of a `t` end?
fn plain_nearby(t: &Ty) -> bool {
    !t.genus() || t.fiber().0.iter().any(gen_plain)
}

fn gen_plain(g: &Gen) -> bool {
    match g {
        Gen::One(t) => plain_nearby(t),
        Gen::Below { genus, fiber, .. } => !genus || fiber.0.iter().any(gen_plain),
        Gen::Fam { tmpl, .. } => plain_nearby(tmpl),
    }
}

/// The order on end types, with the singleton readings.
pub fn ty_leq(a: &Ty, b: &Ty) -> bool {
    if *a == Ty::point() {
        return plain_nearby(b);
    }
    if *a == Ty::ord(Ordinal::zero(), true) {
        return b.genus();
    }
    a.occ_le(b)
}

pub fn leq(z: &LocalStructure, z2: &LocalStructure) -> Answer {
    Answer::from_bool(ty_leq(&z.ty, &z2.ty))
}

/// Does `sig` have an end of type `z`? Occurrence only.
pub fn has_end_of_type(sig: &Signature, z: &LocalStructure) -> Answer {
    match space_of(sig) {
        Ok(s) => Answer::from_bool(s.has_type(&z.ty)),
        Err(_) => Answer::Unknown,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Multiplicity {
    Count(u64),
    CantorMany,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndTypeReport {
    pub types: Vec<(LocalStructure, Multiplicity)>,
}

pub fn maximal_end_types(sig: &Signature) -> Result<EndTypeReport, PosetError> {
    let s = space_of(sig).map_err(|e| PosetError::Unresolved(e.to_string()))?;
    let types = s
        .pieces
        .iter()
        .map(|p| {
            let m = match p.mult {
                Mult::Count(k) => Multiplicity::Count(k),
                Mult::Cantor => Multiplicity::CantorMany,
            };
            (LocalStructure::from_ty(&p.ty), m)
        })
        .collect();
    Ok(EndTypeReport { types })
}

/// `1`, `o(1)`, `C`, `o(C)`.
pub fn minimal_local_structures() -> Vec<LocalStructure> {
    [Ty::point(), Ty::ord(Ordinal::zero(), true), Ty::cantor(false), Ty::cantor(true)]
        .iter()
        .map(LocalStructure::from_ty)
        .collect()
}

fn height_sup(s: &Signature, acc: &mut Ordinal) {
    for t in s.subterms() {
        if let Signature::Ord(e) = t {
            let h = match e.closed() {
                Some(h) => h,
                None => e.sup_over_index().map(|(h, _)| h).unwrap_or_else(|_| Ordinal::zero()),
            };
            if h > *acc {
                *acc = h;
            }
        }
    }
}

fn ty_height_sup(t: &Ty, acc: &mut Ordinal) {
    if let Ty::Tower { height, .. } = t {
        if let Some(h) = height.closed() {
            if h > *acc {
                *acc = h;
            }
        }
    }
    for g in &t.fiber().0 {
        match g {
            Gen::One(u) => ty_height_sup(u, acc),
            Gen::Below { sup, fiber, .. } => {
                if *sup > *acc {
                    *acc = sup.clone();
                }
                for g2 in &fiber.0 {
                    if let Gen::One(u) = g2 {
                        ty_height_sup(u, acc);
                    }
                }
            }
            Gen::Fam { tmpl, .. } => {
                if let Ty::Tower { height, .. } = &**tmpl {
                    if let Ok((h, _)) = height.sup_over_index() {
                        if h > *acc {
                            *acc = h;
                        }
                    }
                }
            }
        }
    }
}

/// A local structure incomparable with the self-similar `x`: `C` for
/// countable `x`, otherwise the tree `w^a+1` with `a` above every height
/// in `x`. A lone isolated end lies below `C` in the singleton reading,
/// so `x = 1` gets `o(1)` instead.
pub fn incomparable_to(x: &Signature) -> LocalStructure {
    if is_countable(x) {
        let point = matches!(space_of(x), Ok(s) if s.pieces.iter().any(|p| p.ty == Ty::point()));
        let ty = if point { Ty::ord(Ordinal::zero(), true) } else { Ty::cantor(false) };
        return LocalStructure::from_ty(&ty);
    }
    let mut a = Ordinal::zero();
    height_sup(x, &mut a);
    if let Ok(s) = space_of(x) {
        for p in &s.pieces {
            ty_height_sup(&p.ty, &mut a);
        }
    }
    LocalStructure::from_ty(&Ty::ord(a.succ(), false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SuccKind {
    One,
    Cantor,
}

impl SuccKind {
    fn base(self) -> Signature {
        match self {
            SuccKind::One => Signature::ray(),
            SuccKind::Cantor => Signature::Cantor,
        }
    }
}

/// `(x v z) -> 1` or `(x v z) -> C` with `z` incomparable to `x`.
pub fn immediate_successor(x: &Signature, kind: SuccKind) -> Signature {
    let inc = incomparable_to(x);
    Signature::conv_const(Signature::wedge_flat(vec![x.clone(), inc.sig]), kind.base())
}

pub fn minimal_upper_bound(zs: &[LocalStructure], kind: SuccKind) -> Result<Signature, PosetError> {
    if zs.is_empty() {
        return Err(PosetError::Empty);
    }
    if let Some(top) = zs.iter().find(|z| zs.iter().all(|w| ty_leq(&w.ty, &z.ty))) {
        return Ok(immediate_successor(&top.sig, kind));
    }
    let parts = zs.iter().map(|z| z.sig.clone()).collect();
    Ok(Signature::conv(FamilyExpr::Const(Signature::wedge_flat(parts)), kind.base()))
}

/// Does the end space of `a` embed as a clopen subset of that of `b`?
/// Each maximal type of `a` must occur in `b` as often as `a` needs it.
pub fn clopen_embeds(a: &Signature, b: &Signature) -> Answer {
    let Ok(d) = wedge_decomposition(a) else { return Answer::Unknown };
    let Ok(sb) = space_of(b) else { return Answer::Unknown };
    let mut need: Vec<(Ty, u64)> = Vec::new();
    for z in &d.components {
        match need.iter_mut().find(|(t, _)| *t == z.ty) {
            Some(e) => e.1 += 1,
            None => need.push((z.ty.clone(), 1)),
        }
    }
    for (t, k) in need {
        if !sb.has_type(&t) {
            return Answer::No;
        }
        let below = sb.pieces.iter().any(|p| t.in_down(&p.ty));
        let avail = sb.pieces.iter().find(|p| p.ty == t).map(|p| p.mult);
        let enough = t.is_cantor()
            || below
            || match avail {
                Some(Mult::Count(m)) => m >= k,
                Some(Mult::Cantor) => true,
                None => false,
            };
        if !enough {
            return Answer::No;
        }
    }
    Answer::Yes
}
