mod common;

use common::*;
use endspace::oracle;
use endspace::semantics::{char_pair, genus_class, ms_form, GenusClass, GenusSupport};

#[test]
fn ms_form_matches_oracle_on_random_countable_signatures() {
    let mut r = rng(11);
    let mut checked = 0;
    let mut bad = Vec::new();
    while checked < 1000 {
        let s = countable(&mut r, 4);
        let Ok((a, n)) = ms_form(&s) else {
            assert!(oracle::end_space_ordinal(&s).is_err(), "{s}");
            continue;
        };
        let (oa, on) = oracle::cb_rank_of_sig(&s).unwrap();
        if to_cnf(&a) != oa || n != on {
            bad.push(format!("{s}: ({a}, {n}) vs ({oa}, {on})"));
        }
        checked += 1;
    }
    assert!(bad.is_empty(), "{} mismatches:\n{}", bad.len(), bad[..bad.len().min(20)].join("\n"));
}

#[test]
fn char_pair_invariants_hold() {
    let mut r = rng(12);
    for _ in 0..500 {
        let s = any(&mut r, 4);
        let c = char_pair(&s);
        assert_eq!(c.genus == GenusClass::Infinite, c.genus_support != GenusSupport::None, "{s}");
        if c.perfect {
            assert!(!c.has_isolated_plain_end && !c.has_isolated_genus_end, "{s}");
        }
        if !s.contains_cantor() {
            assert!(c.countable, "{s}");
        }
        assert_eq!(c.ms_form.is_some(), c.countable && endspace::semantics::has_ends(&s), "{s}");
    }
}

#[test]
fn genus_of_convergences_with_positive_members() {
    // R1 at every vertex of a ray
    assert_eq!(genus_class(&sig("R1 -> 1")), GenusClass::Infinite);
    // R2 attached once at the root of w+1
    assert_eq!(genus_class(&sig("{[R2; R0]} -> (w+1)")), GenusClass::Finite(2));
}
