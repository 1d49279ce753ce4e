//! Countable end spaces computed two ways: the rank calculus and plain
//! ordinal sums with Cantor-Bendixson derivatives.

use endspace::oracle::{cb_rank_of_sig, end_space_ordinal};
use endspace::semantics::ms_form;
use endspace::signature::parse;

fn main() {
    for text in ["(w+1) -> 1", "w^2+1 v w^2+1", "{w^n+1} -> 1", "((w+1) -> 1) v w^w+1", "R1 -> (w^3+1)"] {
        let s = parse(text).unwrap();
        let xi = end_space_ordinal(&s).unwrap();
        let (a, n) = cb_rank_of_sig(&s).unwrap();
        let (b, k) = ms_form(&s).unwrap();
        println!("{text:<24} [1, {xi}]  rank ({a}, {n})  calculus ({b}, {k})");
    }
}
