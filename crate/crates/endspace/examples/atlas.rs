//! Check every bundled atlas entry and print the failures, if any.

use endspace::atlas::{atlas_entries, check_all, coverage};

fn main() {
    let entries = atlas_entries();
    let lines = check_all(&entries);
    let bad: Vec<_> = lines.iter().filter(|l| !l.ok).collect();
    for l in &bad {
        println!("{} {}: expected {}, got {}", l.entry, l.key, l.expected, l.actual);
    }
    println!("{} entries, {} checks, {} failed", entries.len(), lines.len(), bad.len());
    println!("modules: {:?}", coverage(&entries));
}
