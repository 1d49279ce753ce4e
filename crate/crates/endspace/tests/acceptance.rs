//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines always print.

mod common;

use std::time::{Duration, Instant};

use common::*;
use endspace::answer::Answer;
use endspace::canonical::{is_self_similar, is_stable, isomorphic, rewrite, Iso};
use endspace::classify::{classify_homeo, classify_maps, recheck, Lambda, Theorem, Witness};
use endspace::flux::{compose, EndAction, Kind, SpineModel};
use endspace::oracle;
use endspace::ordinal::Ordinal;
use endspace::poset::{
    immediate_successor, leq, maximal_end_types, minimal_local_structures, ty_leq, LocalStructure, SuccKind,
};
use endspace::semantics::{has_ends, ms_form, space_of, Ty};
use endspace::signature::Signature;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ms(d: Duration) -> String {
    format!("{} ms", d.as_millis())
}

// 1. normalization identities
fn normalization() -> Outcome {
    let t = Instant::now();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (a, a1) in [("0", "1"), ("1", "2"), ("2", "3"), ("w", "w+1")] {
        pairs.push((format!("(w^{a}+1) -> 1"), format!("w^({a1})+1")));
    }
    for (l, r) in [("C -> 1", "C"), ("C -> C", "C"), ("(1 -> C) -> 1", "1 -> C")] {
        pairs.push((l.into(), r.into()));
    }
    for x in ["1", "C", "w^2+1", "1 v C", "1 -> C"] {
        pairs.push((format!("R1 -> ({x})"), format!("o({x})")));
    }
    for (l, r) in &pairs {
        let (nl, nr) = (rewrite(&sig(l)), rewrite(&sig(r)));
        ensure(nl == nr, || format!("{l} => {nl}, but {r} => {nr}"))?;
    }
    // the right-hand sides of the first four are already normal
    for (l, r) in &pairs[..4] {
        ensure(rewrite(&sig(l)) == sig(r), || format!("{l} is not structurally {r}"))?;
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(1), || format!("took {}", ms(el)))?;
    Ok(format!("{} identities, {}", pairs.len(), ms(el)))
}

// 2. MS form against the ordinal oracle
fn ms_agreement() -> Outcome {
    let t = Instant::now();
    let mut r = rng(2024);
    let mut checked = 0;
    while checked < 1000 {
        let s = countable(&mut r, 4);
        let Ok((a, n)) = ms_form(&s) else {
            ensure(oracle::end_space_ordinal(&s).is_err(), || format!("{s}: oracle has a value, semantics none"))?;
            continue;
        };
        let (oa, on) = oracle::cb_rank_of_sig(&s).map_err(|e| format!("{s}: oracle {e}"))?;
        ensure(to_cnf(&a) == oa && n == on, || format!("{s}: ({a}, {n}) vs oracle ({oa}, {on})"))?;
        checked += 1;
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(30), || format!("took {}", ms(el)))?;
    Ok(format!("{checked} signatures, 0 mismatches, {}", ms(el)))
}

const KEYSTONE_LEFT: &str = "{stride(2,2,(w^n+1)->o(1)) v accum(stride(2,1,(w^n+1)->o(1)))} -> 1";
const KEYSTONE_RIGHT: &str = "{stride(2,1,(w^n+1)->o(1)) v accum(stride(2,2,(w^n+1)->o(1)))} -> 1";
const STRESS: &str = "{{o(w^n+1)} -> Vee_{i=1..m}((1->C)->(w^(w^i)+1))} -> (1 v C)";

// 3. stability labels
fn stability() -> Outcome {
    let cases = [
        ("w^(w^2)+1", "Stable"),
        ("C", "Stable"),
        ("o(w+1)", "Stable"),
        ("1 -> C", "Stable"),
        (STRESS, "Stable"),
        ("{(w^n+1) -> o(1)} -> o(1)", "Unstable"),
        (KEYSTONE_LEFT, "Unstable"),
        (KEYSTONE_RIGHT, "Unstable"),
    ];
    for (s, want) in cases {
        let got = is_stable(&sig(s)).label();
        ensure(got == want, || format!("{s}: {got}, expected {want}"))?;
    }
    Ok(format!("{} labels", cases.len()))
}

// 4. incomparables
fn incomparables() -> Outcome {
    let mut checks = 0;
    for base in ["o(1)", "C"] {
        for n in 1..=6 {
            for m in n + 1..=6 {
                let a = LocalStructure::from_sig(&sig(&format!("(w^{n}+1) -> {base}"))).map_err(|e| e.to_string())?;
                let b = LocalStructure::from_sig(&sig(&format!("(w^{m}+1) -> {base}"))).map_err(|e| e.to_string())?;
                let (ab, ba) = (leq(&a, &b), leq(&b, &a));
                ensure(ab.is_no() && ba.is_no(), || format!("n={n} m={m} base {base}: {ab} / {ba}"))?;
                checks += 1;
            }
        }
    }
    ensure(checks == 30, || format!("{checks} checks"))?;
    Ok(format!("{checks} checks, all No"))
}

// 5. classifier table
fn classifier() -> Outcome {
    use Answer::*;
    use Theorem::*;
    let maps: [(&str, Answer, Theorem); 15] = [
        ("C", Yes, CantorTree),
        ("w+1", Yes, UniqueMaxEnd),
        ("w^w+1", Yes, UniqueMaxEnd),
        ("o(1)", Yes, UniqueMaxEnd),
        ("(w^5+1) v C", Yes, TreeCantorFactor),
        ("R3 v 1 v 1 v 1", No, FiniteGenus),
        ("(w^2+1) v (w^2+1)", No, FiniteEndType),
        ("1 -> C", No, Babel1),
        ("o(C)", No, Babel2),
        ("(w^3+1) -> (1 v C)", No, GcdFlux),
        ("o(1) v o(1)", No, FiniteEndType),
        ("(w^2+1) v ((1->C) -> o(1))", No, GcdFlux),
        ("(w^2+1) v (1->C) v (1->o(1))", No, GeneralFlux),
        ("1 v o(1)", Unknown, UnknownCategory1),
        ("(w+1) v C v o(1)", Unknown, UnknownCategory1),
    ];
    let mut slowest = Duration::ZERO;
    let mut run = |s: &str, homeo: bool| {
        let t = Instant::now();
        let x = sig(s);
        let v = if homeo { classify_homeo(&x) } else { classify_maps(&x) };
        slowest = slowest.max(t.elapsed());
        (x, v)
    };
    for (s, a, th) in maps {
        let (x, v) = run(s, false);
        ensure(v.answer == a && v.theorem == th, || format!("{s}: {} {:?}, expected {a} {th:?}", v.answer, v.theorem))?;
        ensure(recheck(&x, &v), || format!("{s}: witness does not recheck"))?;
    }
    let (_, v) = run("{w^n+1} -> (1 v C)", false);
    ensure(v.answer == Unknown && v.category == Some(2), || format!("fig2-4: {} {:?}", v.answer, v.category))?;
    let (_, v) = run("(w^5+1) v C", false);
    match &v.witness {
        Witness::Recurse { verdict, .. } => ensure(verdict.theorem == UniqueMaxEnd, || format!("inner {:?}", verdict.theorem))?,
        w => return Err(format!("(w^5+1) v C: witness {w:?}")),
    }
    for (s, lam) in [("(w^3+1) -> (1 v C)", "w^3+1"), ("(w^2+1) v ((1->C) -> o(1))", "1")] {
        let (_, v) = run(s, false);
        let got = match &v.witness {
            Witness::Gcd { gcd } => match &gcd.lambda {
                Lambda::End { end } => end.sig.to_string(),
                Lambda::LoopMark => "R1".into(),
            },
            w => format!("{w:?}"),
        };
        ensure(got == lam, || format!("{s}: lambda {got}, expected {lam}"))?;
    }
    let (_, v) = run("o(1 v C)", true);
    ensure(v.answer == Yes, || format!("homeo o(1 v C): {}", v.answer))?;
    ensure(slowest < Duration::from_secs(1), || format!("slowest query {}", ms(slowest)))?;
    Ok(format!("17 verdicts, slowest {}", ms(slowest)))
}

// 6. flux
fn flux() -> Outcome {
    let fx = SpineModel::fig_xn();
    let corks = [fx.cork(&fx.x(0), &fx.x(-2)), fx.cork(&fx.x(2), &fx.x(0)), fx.cork(&fx.x(2), &fx.x(-2))];
    ensure(corks == [2, 3, 5], || format!("fig-xn corks {corks:?}"))?;
    let unit = SpineModel::unit(Kind::Loop);
    let plus = unit.flux_value(&EndAction::shift(1)).map_err(|e| e.to_string())?;
    let minus = unit.flux_value(&EndAction::shift(-1)).map_err(|e| e.to_string())?;
    ensure((plus, minus) == (1, -1), || format!("unit shifts {plus}, {minus}"))?;
    for m in [&fx, &unit] {
        let id = m.flux_value(&EndAction::identity()).map_err(|e| e.to_string())?;
        ensure(id == 0, || format!("identity flux {id}"))?;
    }
    let mut r = rng(6);
    let mut violations = 0;
    let mut pairs_checked = 0;
    for _ in 0..1000 {
        let m = spine(&mut r);
        let (f, g) = (action(&mut r, &m), action(&mut r, &m));
        let fg = m.flux_value(&compose(&f, &g)).unwrap();
        if fg != m.flux_value(&f).unwrap() + m.flux_value(&g).unwrap() {
            violations += 1;
        }
        let v = m.flux_value(&f).unwrap();
        let span = f.perm.keys().map(|s| s.pos.abs()).max().unwrap_or(0);
        let w = m.window() + f.shift.abs() + span;
        for mm in -(w + 10)..=(w + 10) {
            for n in -(w + 10)..=mm {
                if m.is_admissible(&f, mm, n) {
                    pairs_checked += 1;
                    if m.phi(&f, mm, n) != v {
                        return Err(format!("{m:?} {f:?}: phi({mm},{n}) = {} but flux {v}", m.phi(&f, mm, n)));
                    }
                }
            }
        }
    }
    ensure(violations == 0, || format!("{violations} homomorphism violations"))?;
    Ok(format!("corks 2/3/5, shifts +1/-1, 1000 pairs 0 violations, {pairs_checked} admissible pairs agree"))
}

/// Random stable signatures with at least one end.
fn stable_seeds(seed: u64, count: usize, depth: usize) -> Vec<Signature> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let s = any(&mut r, depth);
        if has_ends(&s) && is_stable(&s).is_stable() {
            out.push(s);
        }
    }
    out
}

// 7. Rokhlin nesting
fn nesting() -> Outcome {
    let mut ok = 0;
    for x in stable_seeds(7, 20, 3) {
        let one = classify_maps(&immediate_successor(&x, SuccKind::One));
        ensure(one.answer == Answer::Yes, || format!("{x}: one-successor {} {:?}", one.answer, one.theorem))?;
        ok += 1;
        let cantor = classify_maps(&immediate_successor(&x, SuccKind::Cantor));
        ensure(cantor.answer == Answer::No, || format!("{x}: cantor-successor {} {:?}", cantor.answer, cantor.theorem))?;
        ok += 1;
    }
    Ok(format!("{ok}/40"))
}

/// Local structures met in random stable signatures: every maximal type
/// and everything listed below it.
fn structure_pool(seed: u64, seeds: usize) -> Vec<LocalStructure> {
    let mut tys: Vec<Ty> = Vec::new();
    for s in stable_seeds(seed, seeds, 3) {
        if let Ok(rep) = maximal_end_types(&s) {
            for (z, _) in rep.types {
                tys.extend(z.ty.listed_closure());
            }
        }
    }
    tys.extend(minimal_local_structures().into_iter().map(|z| z.ty));
    let heights = (0..6).map(Ordinal::nat).chain([Ordinal::omega(), Ordinal::omega().succ()]);
    for h in heights {
        for g in [false, true] {
            tys.push(Ty::ord(h.clone(), g));
            tys.extend(LocalStructure::from_ty(&Ty::ord(h.clone(), g)).ty.listed_closure());
        }
    }
    tys.sort();
    tys.dedup();
    tys.iter().map(LocalStructure::from_ty).collect()
}

// 8. poset properties
fn poset() -> Outcome {
    let pool = structure_pool(8, 60);
    let mut r = rng(88);
    let mut comparable = 0;
    for _ in 0..1000 {
        // half the time draw the next element from those above the last
        let next = |r: &mut rand::rngs::StdRng, from: Option<&LocalStructure>| {
            let above: Vec<&LocalStructure> = match from {
                Some(z) if r.gen_bool(0.5) => pool.iter().filter(|w| ty_leq(&z.ty, &w.ty)).collect(),
                _ => pool.iter().collect(),
            };
            above[r.gen_range(0..above.len())]
        };
        let a = next(&mut r, None);
        let b = next(&mut r, Some(a));
        let c = next(&mut r, Some(b));
        ensure(ty_leq(&a.ty, &a.ty), || format!("not reflexive at {}", a.sig))?;
        if ty_leq(&a.ty, &b.ty) && ty_leq(&b.ty, &c.ty) {
            comparable += 1;
            ensure(ty_leq(&a.ty, &c.ty), || format!("not transitive: {} {} {}", a.sig, b.sig, c.sig))?;
        }
        if ty_leq(&a.ty, &b.ty) && ty_leq(&b.ty, &a.ty) {
            ensure(isomorphic(&a.sig, &b.sig) == Iso::Yes, || format!("not antisymmetric: {} {}", a.sig, b.sig))?;
        }
    }

    let minimal: Vec<Ty> = minimal_local_structures().into_iter().map(|z| z.ty).collect();
    let seeds = structure_pool(9, 100);
    let mut longest = 0;
    for (i, z) in seeds.iter().cycle().take(100).enumerate() {
        let mut cur = z.ty.clone();
        let mut steps = 0;
        loop {
            let mut below: Vec<Ty> = cur
                .listed_closure()
                .into_iter()
                .chain(minimal.iter().cloned())
                .filter(|t| ty_leq(t, &cur) && !ty_leq(&cur, t))
                .collect();
            below.sort();
            below.dedup();
            if below.is_empty() {
                break;
            }
            // step to a candidate with no other candidate above it
            let top: Vec<&Ty> = below.iter().filter(|t| !below.iter().any(|u| u != *t && ty_leq(t, u))).collect();
            let pool = if top.is_empty() { below.iter().collect() } else { top };
            cur = pool[(i + steps) % pool.len()].clone();
            steps += 1;
            ensure(steps < 10_000, || format!("chain from {} does not terminate", z.sig))?;
        }
        ensure(minimal.contains(&cur), || format!("chain from {} stops at non-minimal {cur}", z.sig))?;
        longest = longest.max(steps);
    }

    let mut gaps = 0;
    for x in pool.iter().filter(|z| !z.ty.has_fam()).take(40) {
        for kind in [SuccKind::One, SuccKind::Cantor] {
            let s = immediate_successor(&x.sig, kind);
            ensure(is_self_similar(&s).answer.is_yes(), || format!("successor of {} not self-similar", x.sig))?;
            let space = space_of(&s).map_err(|e| format!("{s}: {e}"))?;
            let top = &space.pieces[0].ty;
            ensure(ty_leq(&x.ty, top) && !ty_leq(top, &x.ty), || format!("{} not strictly below {s}", x.sig))?;
            for y in top.listed_closure() {
                if y != *top && ty_leq(&x.ty, &y) {
                    let same = isomorphic(&y.to_signature(), &x.sig) == Iso::Yes;
                    ensure(same, || format!("{y} strictly between {} and {s}", x.sig))?;
                }
            }
            gaps += 1;
        }
    }
    Ok(format!(
        "1000 triples ({comparable} comparable chains), 100 descents (longest {longest}), {gaps} successor gaps"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("normalization identities", normalization),
        ("MS-form agreement", ms_agreement),
        ("stability verdicts", stability),
        ("incomparability", incomparables),
        ("classifier verdict table", classifier),
        ("flux numbers", flux),
        ("Rokhlin nesting", nesting),
        ("poset properties", poset),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why})", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL (panicked)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
