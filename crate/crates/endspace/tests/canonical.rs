mod common;

use common::*;
use endspace::canonical::{measure, rewrite, rewrite_with, trajectory, Rule};
use endspace::classify::{classify_homeo, classify_maps, recheck, strip_genus};
use endspace::oracle;
use endspace::semantics::{char_pair, genus_class, is_countable};
use rand::Rng;

#[test]
fn normal_forms_do_not_depend_on_strategy() {
    let mut r = rng(31);
    for _ in 0..1500 {
        let s = any(&mut r, 5);
        let nf = rewrite(&s);
        for k in 0..3u64 {
            let mut pr = rng(1000 + k);
            let mut pick = |n: usize| pr.gen_range(0..n);
            let (other, _) = rewrite_with(&s, Some(&mut pick));
            assert_eq!(other, nf, "{s}: strategy {k}");
        }
    }
}

#[test]
fn measure_strictly_decreases() {
    let mut r = rng(32);
    let mut steps = 0;
    for i in 0..10_000 {
        let s = any(&mut r, 4);
        let states = if i % 2 == 0 {
            trajectory(&s, None)
        } else {
            let mut pr = rng(i);
            let mut pick = |n: usize| pr.gen_range(0..n);
            trajectory(&s, Some(&mut pick))
        };
        for w in states.windows(2) {
            assert!(measure(&w[1]) < measure(&w[0]), "{s}: {} {:?} -> {} {:?}", w[0], measure(&w[0]), w[1], measure(&w[1]));
            steps += 1;
        }
    }
    assert!(steps > 10_000, "only {steps} steps exercised");
}

#[test]
fn rewriting_is_idempotent_and_keeps_invariants() {
    let mut r = rng(33);
    for _ in 0..2000 {
        let s = any(&mut r, 4);
        let nf = rewrite(&s);
        assert_eq!(rewrite(&nf), nf, "{s}");
        assert_eq!(genus_class(&s), genus_class(&nf), "{s} -> {nf}");
        assert_eq!(char_pair(&s), char_pair(&nf), "{s} -> {nf}");
    }
}

/// The countable collapses agree with the ordinal oracle, which never
/// sees the rewriter.
#[test]
fn countable_collapses_agree_with_oracle() {
    let mut r = rng(34);
    let mut r5 = 0;
    for _ in 0..2000 {
        let s = countable(&mut r, 4);
        let (nf, trace) = rewrite_with(&s, None);
        assert_eq!(oracle::cb_rank_of_sig(&s), oracle::cb_rank_of_sig(&nf), "{s} -> {nf}");
        for st in trace.iter().filter(|st| st.rule == Rule::R5) {
            r5 += 1;
            if !st.before.has_var() {
                assert_eq!(oracle::cb_rank_of_sig(&st.before), oracle::cb_rank_of_sig(&st.after), "{} -> {}", st.before, st.after);
            }
        }
    }
    assert!(r5 > 100, "only {r5} R5 steps");
}

#[test]
fn cantor_collapses_keep_the_characteristic_pair() {
    let mut r = rng(35);
    let mut r6 = 0;
    for _ in 0..3000 {
        let s = any(&mut r, 4);
        let (_, trace) = rewrite_with(&s, None);
        for st in trace.iter().filter(|st| st.rule == Rule::R6 && !st.before.has_var()) {
            r6 += 1;
            assert!(!is_countable(&st.before), "{}", st.before);
            assert_eq!(char_pair(&st.before), char_pair(&st.after), "{} -> {}", st.before, st.after);
        }
    }
    assert!(r6 > 50, "only {r6} R6 steps");
}

#[test]
fn strip_genus_is_idempotent_and_genus_free() {
    let mut r = rng(36);
    for _ in 0..2000 {
        let s = any(&mut r, 4);
        let t = strip_genus(&s);
        assert_eq!(strip_genus(&t), t, "{s}");
        assert!(genus_class(&t).is_zero(), "{s} -> {t}");
    }
}

#[test]
fn negative_verdicts_recheck() {
    let mut r = rng(37);
    let mut no = 0;
    for _ in 0..1500 {
        let s = any(&mut r, 3);
        for v in [classify_maps(&s), classify_homeo(&s)] {
            if v.answer.is_no() {
                no += 1;
                assert!(recheck(&s, &v), "{s}: {:?}", v.theorem);
            }
            assert_eq!(v.category.is_some(), v.answer == endspace::answer::Answer::Unknown, "{s}");
        }
        assert_eq!(classify_maps(&s), classify_maps(&s));
    }
    assert!(no > 100, "only {no} negative verdicts");
}
