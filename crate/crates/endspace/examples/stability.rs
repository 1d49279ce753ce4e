//! Stability, wedge decomposition and self-similarity.

use endspace::canonical::{is_self_similar, is_stable, wedge_decomposition, Stability, UnstableReason};
use endspace::signature::parse;

fn main() {
    for text in [
        "w^(w^2)+1",
        "(w^3+1) -> (1 v C)",
        "{(w^n+1) -> o(1)} -> o(1)",
        "(w^2+1) v C v R2",
        "1 -> C",
    ] {
        let sig = parse(text).expect("literal parses");
        match is_stable(&sig) {
            Stability::Stable { ordered } => {
                println!("{text}: stable, ordered form {ordered}");
                if let Ok(d) = wedge_decomposition(&sig) {
                    let parts: Vec<String> = d.components.iter().map(|z| z.sig.to_string()).collect();
                    println!("  pieces [{}] rose {:?}", parts.join(", "), d.rose);
                }
            }
            Stability::Unstable { witness } => {
                println!("{text}: unstable at {}", witness.path);
                match witness.reason {
                    UnstableReason::InfinitelyManyIncomparableMaxTypes { members, .. } => {
                        for (k, m) in members {
                            println!("  member {k}: {m}");
                        }
                    }
                    UnstableReason::FailedClopenChain { index } => println!("  chain breaks at {index}"),
                }
            }
            Stability::Unknown { reason } => println!("{text}: unknown ({reason})"),
        }
        let ss = is_self_similar(&sig);
        println!("  self-similar: {} {}", ss.answer, ss.reason);
    }
}
