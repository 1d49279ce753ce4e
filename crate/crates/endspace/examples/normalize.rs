//! Parse a few signatures and rewrite them to normal form, showing each step.
//!
//! `cargo run --example normalize -- "(w^2+1) -> 1"`

use endspace::canonical::{measure, normalize};
use endspace::signature::parse;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if args.is_empty() {
        vec!["C -> 1".to_string(), "(1 -> C) -> 1".into(), "(w^2+1) -> 1".into(), "R1 -> (w+1 v w+1)".into()]
    } else {
        args
    };
    for text in inputs {
        let sig = match parse(&text) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{text}: {e}");
                continue;
            }
        };
        let c = normalize(&sig);
        println!("{sig}   {:?}", measure(&sig));
        for st in &c.trace {
            println!("  {} at {:?}: {} => {}", st.rule, st.path, st.before, st.after);
        }
        println!("  normal form {}   {:?}  [{}]\n", c.sig, measure(&c.sig), c.stability.label());
    }
}
