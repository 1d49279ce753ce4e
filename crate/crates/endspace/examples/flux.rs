//! Corks and flux on spine models.

use endspace::flux::{compose, EndAction, Kind, SpineModel};

fn main() {
    let m = SpineModel::fig_xn();
    for (a, b) in [(0, -2), (2, 0), (2, -2)] {
        println!("cork(X_{a}, X_{b}) = {}", m.cork(&m.x(a), &m.x(b)));
    }

    let swap: EndAction = "shift:0;swap:0.0,2.1".parse().unwrap();
    println!("finite swap on the fixture: flux {}", m.flux_value(&swap).unwrap());

    let ring = SpineModel::unit(Kind::Loop);
    let (f, g) = (EndAction::shift(1), EndAction::shift(-2));
    let fg = compose(&f, &g);
    println!(
        "unit loop: flux(shift 1) = {}, flux(shift -2) = {}, flux(composite) = {}",
        ring.flux_value(&f).unwrap(),
        ring.flux_value(&g).unwrap(),
        ring.flux_value(&fg).unwrap()
    );
    for n in -2..=2 {
        println!("  least admissible m for shift 1 at n = {n}: {}", ring.admissible_m(&f, n).unwrap());
    }
}
