//! Dense conjugacy verdicts for mapping class groups and homeomorphism
//! groups of a batch of graphs.

use endspace::classify::{classify_homeo, classify_maps, gcd_witness_search, Lambda};
use endspace::signature::parse;

fn main() {
    let graphs = [
        "C",
        "1 -> C",
        "(w^3+1) -> (1 v C)",
        "(w^2+1) v (1->C) v (1->o(1))",
        "{w^n+1} -> (1 v C)",
        "1 v o(1)",
        "o((w^2+1) -> (1 v C))",
    ];
    println!("{:<34} {:<22} {}", "graph", "maps", "homeo");
    for g in graphs {
        let s = parse(g).unwrap();
        let (m, h) = (classify_maps(&s), classify_homeo(&s));
        println!("{g:<34} {:<22} {} {:?}", format!("{} {:?}", m.answer, m.theorem), h.answer, h.theorem);
        if let Some(w) = gcd_witness_search(&s) {
            let lambda = match w.lambda {
                Lambda::End { end } => end.sig.to_string(),
                Lambda::LoopMark => "loop mark".into(),
            };
            println!("    gcd of {} and {}: {lambda}", w.mu1.sig, w.mu2.sig);
        }
    }
}
