//! The partial order on local structures: maximal end types, comparisons,
//! incomparable partners and immediate successors.

use endspace::poset::{immediate_successor, incomparable_to, leq, maximal_end_types, LocalStructure, SuccKind};
use endspace::signature::parse;

fn z(text: &str) -> LocalStructure {
    LocalStructure::from_sig(&parse(text).unwrap()).unwrap()
}

fn main() {
    let sig = parse("(w^3+1) -> (1 v C)").unwrap();
    for (t, m) in maximal_end_types(&sig).unwrap().types {
        println!("maximal in {sig}: {} x {m:?}", t.sig);
    }

    let pairs = [("w+1", "w^2+1"), ("1", "C"), ("(w^2+1)->o(1)", "(w^3+1)->o(1)"), ("C", "o(C)")];
    for (a, b) in pairs {
        println!("{a} <= {b}: {}   {b} <= {a}: {}", leq(&z(a), &z(b)), leq(&z(b), &z(a)));
    }

    for x in ["1", "1 -> C", "(w^w+1) -> C"] {
        let s = parse(x).unwrap();
        println!("incomparable to {x}: {}", incomparable_to(&s).sig);
        println!("  successors: {} | {}", immediate_successor(&s, SuccKind::One), immediate_successor(&s, SuccKind::Cantor));
    }
}
