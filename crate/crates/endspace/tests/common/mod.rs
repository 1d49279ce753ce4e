//! Random signatures for property tests.
#![allow(dead_code)]

use endspace::flux::{EndAction, Kind, Slot, SpineModel, Tail};
use endspace::oracle::Cnf;
use endspace::ordinal::{NatExpr, OExpr, Ordinal};
use endspace::signature::{parse, FamilyExpr, Signature};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn sig(s: &str) -> Signature {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// Ordinals with exponent depth at most `depth`.
pub fn ordinal(r: &mut StdRng, depth: usize) -> Ordinal {
    if depth == 0 || r.gen_bool(0.35) {
        return Ordinal::nat(r.gen_range(0..5));
    }
    let k = r.gen_range(1..=3);
    let mut exps: Vec<Ordinal> = (0..k).map(|_| ordinal(r, depth - 1)).collect();
    exps.sort();
    exps.dedup();
    exps.reverse();
    Ordinal::from_terms(exps.into_iter().map(|e| (e, r.gen_range(1..4))))
}

pub fn to_cnf(o: &Ordinal) -> Cnf {
    Cnf(o.terms().iter().map(|(e, c)| (to_cnf(e), *c)).collect())
}

fn small_ord(r: &mut StdRng) -> Signature {
    let o = ordinal(r, 2);
    Signature::ord_lit(&o)
}

/// Templates in `n` whose members are countable trees or genus towers.
fn template(r: &mut StdRng, genus: bool) -> Signature {
    let c = r.gen_range(0..3);
    let e = match r.gen_range(0..4) {
        0 => OExpr::var(),
        1 => OExpr::var().affine(1, c),
        2 => OExpr::term(OExpr::lit(1), NatExpr::var()).concat(&OExpr::lit(c)),
        _ => OExpr::omega_pow(OExpr::var()),
    };
    let t = Signature::ord(e);
    if genus && r.gen_bool(0.3) { Signature::genus(t) } else { t }
}

fn family(r: &mut StdRng, depth: usize, genus: bool, cantor: bool) -> FamilyExpr {
    match r.gen_range(0..6) {
        0 | 1 => FamilyExpr::Const(gen(r, depth, genus, cantor)),
        2 => FamilyExpr::Param(template(r, genus)),
        3 => FamilyExpr::Accum(Box::new(FamilyExpr::Param(template(r, genus)))),
        4 => FamilyExpr::Stride {
            k: r.gen_range(1..4),
            r: r.gen_range(0..3),
            inner: Box::new(FamilyExpr::Param(template(r, genus))),
        },
        _ => {
            let heads = (0..r.gen_range(1..3)).map(|_| gen(r, depth, genus, cantor)).collect();
            let tail = if r.gen_bool(0.5) {
                FamilyExpr::Const(gen(r, depth, genus, cantor))
            } else {
                FamilyExpr::Param(template(r, genus))
            };
            FamilyExpr::Prefix(heads, Box::new(tail))
        }
    }
}

fn gen(r: &mut StdRng, depth: usize, genus: bool, cantor: bool) -> Signature {
    let leaf = depth <= 1 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..10) {
            0 if genus => Signature::Rose(r.gen_range(0..3)),
            1 | 2 if cantor => Signature::Cantor,
            _ => small_ord(r),
        };
    }
    match r.gen_range(0..8) {
        0 if genus => Signature::genus(gen(r, depth - 1, genus, cantor)),
        1 | 2 => {
            let k = r.gen_range(2..4);
            Signature::wedge((0..k).map(|_| gen(r, depth - 1, genus, cantor)).collect())
        }
        3..=6 => {
            let f = family(r, depth - 1, genus, cantor);
            Signature::conv(f, gen(r, depth - 1, genus, cantor))
        }
        _ => small_ord(r),
    }
}

/// Countable signatures of depth at most `depth`, with genus.
pub fn countable(r: &mut StdRng, depth: usize) -> Signature {
    loop {
        let s = gen(r, depth, true, false);
        if s.depth() <= depth {
            return s;
        }
    }
}

/// Any signature of depth at most `depth`.
pub fn any(r: &mut StdRng, depth: usize) -> Signature {
    loop {
        let s = gen(r, depth, true, true);
        if s.depth() <= depth {
            return s;
        }
    }
}

/// Signatures without Rose or genus.
pub fn tree(r: &mut StdRng, depth: usize) -> Signature {
    loop {
        let s = gen(r, depth, false, true);
        if s.depth() <= depth {
            return s;
        }
    }
}

/// Spine models: either a periodic tail with no decorations, or a
/// decorated model over an empty tail.
pub fn spine(r: &mut StdRng) -> SpineModel {
    let kind = if r.gen_bool(0.5) { Kind::End } else { Kind::Loop };
    if r.gen_bool(0.7) {
        let period = r.gen_range(1..=3u64);
        let mut counts: Vec<u64> = (0..period).map(|_| r.gen_range(0..=3)).collect();
        if counts.iter().all(|c| *c == 0) {
            counts[0] = 1;
        }
        SpineModel::new(kind, vec![], Tail { period, counts }).unwrap()
    } else {
        let decorations = (-4..=4).map(|p| (p, r.gen_range(0..=3))).collect();
        SpineModel::new(kind, decorations, Tail { period: 1, counts: vec![0] }).unwrap()
    }
}

/// A valid action on `m`: a count-preserving shift, then up to four
/// random transpositions of slots near the origin.
pub fn action(r: &mut StdRng, m: &SpineModel) -> EndAction {
    let shift = if m.decorations.is_empty() { m.tail.period as i64 * r.gen_range(-3..=3) } else { 0 };
    let slots: Vec<Slot> = (-8..=8).flat_map(|p| (0..m.d(p)).map(move |j| Slot { pos: p, j })).collect();
    let mut f = EndAction::shift(shift);
    if slots.len() >= 2 {
        for _ in 0..r.gen_range(0..=4) {
            let a = slots[r.gen_range(0..slots.len())];
            let b = slots[r.gen_range(0..slots.len())];
            if a != b {
                f = f.with_swap(a, b);
            }
        }
    }
    f
}

/// `phi_{m,n}(f)` by direct counting over positions `lo..=m`, using only
/// `apply` on the inverse action.
pub fn phi_brute(model: &SpineModel, f: &EndAction, m: i64, n: i64, lo: i64) -> i64 {
    let inv = f.inverse();
    let mut in_xm_not_xn = 0i64;
    let mut in_xm_not_fxn = 0i64;
    for p in lo..=m {
        for j in 0..model.d(p) {
            let y = Slot { pos: p, j };
            if p > n {
                in_xm_not_xn += 1;
            }
            if inv.apply(y).pos > n {
                in_xm_not_fxn += 1;
            }
        }
    }
    in_xm_not_xn - in_xm_not_fxn
}
