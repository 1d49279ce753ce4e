mod common;

use common::*;
use endspace::flux::{compose, EndAction, FluxError, Kind, Slot, SpineModel};

#[test]
fn fixture_cork_values() {
    let m = SpineModel::fig_xn();
    assert_eq!(m.cork(&m.x(0), &m.x(-2)), 2);
    assert_eq!(m.cork(&m.x(2), &m.x(0)), 3);
    assert_eq!(m.cork(&m.x(2), &m.x(-2)), 5);
}

#[test]
fn cork_vanishes_upwards_and_adds() {
    let mut r = rng(61);
    let mut models = vec![SpineModel::fig_xn(), SpineModel::unit(Kind::End)];
    models.extend((0..30).map(|_| spine(&mut r)));
    for m in &models {
        for a in -6..=6 {
            for b in a..=6 {
                if a < b {
                    assert_eq!(m.cork(&m.x(a), &m.x(b)), 0);
                }
                for c in b..=6 {
                    let lhs = m.cork(&m.x(c), &m.x(a));
                    let rhs = m.cork(&m.x(c), &m.x(b)) + m.cork(&m.x(b), &m.x(a));
                    assert_eq!(lhs, rhs, "{m:?} {a} {b} {c}");
                }
            }
        }
    }
}

#[test]
fn admissible_pair_examples() {
    let m = SpineModel::unit(Kind::End);
    let id = EndAction::identity();
    let s1 = EndAction::shift(1);
    for n in -5..=5 {
        assert!(m.is_admissible(&id, n, n));
        assert!(m.is_admissible(&s1, n + 1, n));
        assert!(!m.is_admissible(&s1, n - 1, n));
    }
}

#[test]
fn unit_shift_values_match_direct_count() {
    let m = SpineModel::unit(Kind::Loop);
    assert_eq!(m.flux_value(&EndAction::shift(1)).unwrap(), 1);
    assert_eq!(m.flux_value(&EndAction::shift(-2)).unwrap(), -2);
    // direct count over positions -10..10 at the pair (0, 0)
    assert_eq!(phi_brute(&m, &EndAction::shift(-2), 0, 0, -10), -2);
    assert_eq!(phi_brute(&m, &EndAction::shift(1), 1, 0, -10), 1);
}

#[test]
fn flux_agrees_with_direct_count_and_is_pair_independent() {
    let mut r = rng(62);
    for _ in 0..300 {
        let m = spine(&mut r);
        let f = action(&mut r, &m);
        let v = m.flux_value(&f).unwrap();
        let span = f.perm.keys().map(|s| s.pos.abs()).max().unwrap_or(0);
        let w = m.window() + f.shift.abs() + span;
        let lo = -(w + 40);
        for mm in -(w + 10)..=(w + 10) {
            for n in -(w + 10)..=mm {
                if m.is_admissible(&f, mm, n) {
                    assert_eq!(m.phi(&f, mm, n), v, "{m:?} {f:?} ({mm},{n})");
                    assert_eq!(phi_brute(&m, &f, mm, n, lo), v, "{m:?} {f:?} ({mm},{n})");
                }
            }
        }
    }
}

#[test]
fn homomorphism_inverse_and_associativity() {
    let mut r = rng(63);
    for _ in 0..1000 {
        let m = spine(&mut r);
        let (f, g, h) = (action(&mut r, &m), action(&mut r, &m), action(&mut r, &m));
        let (vf, vg) = (m.flux_value(&f).unwrap(), m.flux_value(&g).unwrap());
        assert_eq!(m.flux_value(&compose(&f, &g)).unwrap(), vf + vg);
        assert_eq!(m.flux_value(&f.inverse()).unwrap(), -vf);
        assert_eq!(compose(&compose(&f, &g), &h), compose(&f, &compose(&g, &h)));
        for p in -10..=10 {
            for j in 0..m.d(p) {
                let x = Slot { pos: p, j };
                assert_eq!(compose(&f, &g).apply(x), f.apply(g.apply(x)));
                assert_eq!(f.inverse().apply(f.apply(x)), x);
            }
        }
    }
}

#[test]
fn shifts_cancel_and_finite_perms_have_no_flux() {
    let m = SpineModel::unit(Kind::End);
    let id = compose(&EndAction::shift(1), &EndAction::shift(-1));
    assert_eq!(id, EndAction::identity());
    assert_eq!(m.flux_value(&id).unwrap(), 0);
    let mut r = rng(64);
    for _ in 0..200 {
        let m = spine(&mut r);
        let mut f = action(&mut r, &m);
        f.shift = 0;
        assert_eq!(m.flux_value(&f).unwrap(), 0);
    }
}

#[test]
fn invalid_actions_are_rejected() {
    let m = SpineModel::fig_xn();
    assert_eq!(m.flux_value(&EndAction::shift(1)), Err(FluxError::ShiftBreaksCounts(1)));
    let f = EndAction::identity().with_swap(Slot { pos: 0, j: 0 }, Slot { pos: 0, j: 1 });
    assert_eq!(m.flux_value(&f), Err(FluxError::NoSuchSlot(Slot { pos: 0, j: 1 })));
    let periodic = SpineModel::new(Kind::End, vec![], endspace::flux::Tail { period: 2, counts: vec![1, 2] }).unwrap();
    assert!(periodic.flux_value(&EndAction::shift(1)).is_err());
    assert!(periodic.flux_value(&EndAction::shift(2)).is_ok());
    assert!("shift:1;swap:0.0".parse::<EndAction>().is_err());
}
