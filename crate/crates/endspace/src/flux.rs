//! Flux on explicit spine models.
//!
//! A spine is indexed by the integers; position `p` carries `d_p` slots,
//! each standing for one λ-object (an end of type λ, or a loop). `X_n`
//! holds every slot at position `<= n`. An [`EndAction`] is a shift
//! composed with a finitely supported permutation of slots, and
//! `phi_{m,n}(f) = cork(X_m, X_n) - cork(X_m, f(X_n))` for an admissible
//! pair `(m, n)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(alias = "end", alias = "EndKind")]
    End,
    #[serde(alias = "loop", alias = "LoopKind")]
    Loop,
}

/// Counts beyond the explicit decorations: `counts[p mod period]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub period: u64,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineModel {
    pub kind: Kind,
    pub decorations: Vec<(i64, u64)>,
    pub tail: Tail,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FluxError {
    #[error("tail period must be positive and match the counts")]
    BadTail,
    #[error("position {0} decorated twice")]
    DuplicatePosition(i64),
    #[error("shift {0} does not preserve slot counts")]
    ShiftBreaksCounts(i64),
    #[error("slot {0} does not exist")]
    NoSuchSlot(Slot),
    #[error("permutation is not a bijection on its support")]
    NotBijective,
    #[error("bad action string: {0}")]
    BadAction(String),
    #[error("no admissible pair found up to {0}")]
    NoAdmissiblePair(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub pos: i64,
    pub j: u64,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.pos, self.j)
    }
}

impl SpineModel {
    pub fn new(kind: Kind, decorations: Vec<(i64, u64)>, tail: Tail) -> Result<SpineModel, FluxError> {
        let m = SpineModel { kind, decorations, tail };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), FluxError> {
        if self.tail.period == 0 || self.tail.counts.len() as u64 != self.tail.period {
            return Err(FluxError::BadTail);
        }
        let mut seen = BTreeSet::new();
        for (p, _) in &self.decorations {
            if !seen.insert(*p) {
                return Err(FluxError::DuplicatePosition(*p));
            }
        }
        Ok(())
    }

    /// The four-position fixture with cork values 2, 3 and 5.
    pub fn fig_xn() -> SpineModel {
        SpineModel {
            kind: Kind::End,
            decorations: vec![(-1, 1), (0, 1), (1, 1), (2, 2)],
            tail: Tail { period: 1, counts: vec![0] },
        }
    }

    /// One slot at every position.
    pub fn unit(kind: Kind) -> SpineModel {
        SpineModel { kind, decorations: vec![], tail: Tail { period: 1, counts: vec![1] } }
    }

    pub fn d(&self, p: i64) -> u64 {
        match self.decorations.iter().find(|(q, _)| *q == p) {
            Some((_, c)) => *c,
            None => self.tail.counts[p.rem_euclid(self.tail.period as i64) as usize],
        }
    }

    /// Bound on the decorated positions.
    pub fn window(&self) -> i64 {
        self.decorations.iter().map(|(p, _)| p.abs()).max().unwrap_or(0)
    }

    pub fn has_slot(&self, s: Slot) -> bool {
        s.j < self.d(s.pos)
    }

    fn slots_at(&self, p: i64) -> impl Iterator<Item = Slot> {
        (0..self.d(p)).map(move |j| Slot { pos: p, j })
    }

    /// `X_n`.
    pub fn x(&self, n: i64) -> SlotSet {
        SlotSet { cut: n, plus: BTreeSet::new(), minus: BTreeSet::new() }
    }

    /// `|a \ b|` counted in slots.
    pub fn cork(&self, a: &SlotSet, b: &SlotSet) -> u64 {
        let (lo, hi) = (a.cut.min(b.cut), a.cut.max(b.cut));
        let mut cand: BTreeSet<Slot> = (lo + 1..=hi).flat_map(|p| self.slots_at(p)).collect();
        for s in a.plus.iter().chain(&a.minus).chain(&b.plus).chain(&b.minus) {
            cand.insert(*s);
        }
        cand.into_iter().filter(|s| self.has_slot(*s) && a.contains(*s) && !b.contains(*s)).count() as u64
    }

    pub fn check(&self, f: &EndAction) -> Result<(), FluxError> {
        let s = f.shift;
        let period = self.tail.period as i64;
        for r in 0..period {
            if self.tail.counts[r as usize] != self.tail.counts[(r + s).rem_euclid(period) as usize] {
                return Err(FluxError::ShiftBreaksCounts(s));
            }
        }
        let reach = self.window() + s.abs() + period;
        for p in -reach..=reach {
            if self.d(p) != self.d(p + s) {
                return Err(FluxError::ShiftBreaksCounts(s));
            }
        }
        for (a, b) in &f.perm {
            for x in [a, b] {
                if !self.has_slot(*x) {
                    return Err(FluxError::NoSuchSlot(*x));
                }
            }
        }
        let keys: BTreeSet<_> = f.perm.keys().collect();
        let vals: BTreeSet<_> = f.perm.values().collect();
        if keys != vals || vals.len() != f.perm.len() {
            return Err(FluxError::NotBijective);
        }
        Ok(())
    }

    /// `f(X_n)`.
    pub fn image(&self, f: &EndAction, n: i64) -> SlotSet {
        let inv = f.inverse_perm();
        let mut plus = BTreeSet::new();
        let mut minus = BTreeSet::new();
        for y in f.perm.keys() {
            let pre_in = inv[y].pos <= n;
            match (y.pos <= n, pre_in) {
                (false, true) => {
                    plus.insert(f.shifted(*y));
                }
                (true, false) => {
                    minus.insert(f.shifted(*y));
                }
                _ => {}
            }
        }
        SlotSet { cut: n + f.shift, plus, minus }
    }

    /// `(X_n ∪ f(X_n)) ⊆ X_m` on slots.
    pub fn is_admissible(&self, f: &EndAction, m: i64, n: i64) -> bool {
        let xm = self.x(m);
        self.cork(&self.x(n), &xm) == 0 && self.cork(&self.image(f, n), &xm) == 0
    }

    pub fn phi(&self, f: &EndAction, m: i64, n: i64) -> i64 {
        let xm = self.x(m);
        self.cork(&xm, &self.x(n)) as i64 - self.cork(&xm, &self.image(f, n)) as i64
    }

    /// Least `m >= n` making `(m, n)` admissible.
    pub fn admissible_m(&self, f: &EndAction, n: i64) -> Result<i64, FluxError> {
        let span = f.perm.keys().map(|s| (s.pos - n).abs()).max().unwrap_or(0);
        let limit = n + f.shift.abs() + span + self.window() + self.tail.period as i64 + 1;
        (n..=limit).find(|m| self.is_admissible(f, *m, n)).ok_or(FluxError::NoAdmissiblePair(limit))
    }

    pub fn flux_value(&self, f: &EndAction) -> Result<i64, FluxError> {
        self.check(f)?;
        let m = self.admissible_m(f, 0)?;
        Ok(self.phi(f, m, 0))
    }
}

/// `{slots at positions <= cut} ∪ plus \ minus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotSet {
    pub cut: i64,
    pub plus: BTreeSet<Slot>,
    pub minus: BTreeSet<Slot>,
}

impl SlotSet {
    pub fn contains(&self, s: Slot) -> bool {
        (s.pos <= self.cut && !self.minus.contains(&s)) || self.plus.contains(&s)
    }
}

/// `x ↦ shift(perm(x))`, with `perm` finitely supported.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct EndAction {
    pub shift: i64,
    #[serde(serialize_with = "perm_pairs")]
    pub perm: BTreeMap<Slot, Slot>,
}

fn perm_pairs<S: serde::Serializer>(perm: &BTreeMap<Slot, Slot>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(perm.iter().map(|(a, b)| [a.to_string(), b.to_string()]))
}

impl EndAction {
    pub fn identity() -> EndAction {
        EndAction::default()
    }

    pub fn shift(s: i64) -> EndAction {
        EndAction { shift: s, perm: BTreeMap::new() }
    }

    /// Appends the transposition of `a` and `b`, applied after the
    /// existing permutation and before the shift.
    pub fn with_swap(mut self, a: Slot, b: Slot) -> EndAction {
        let mut swap = BTreeMap::new();
        swap.insert(a, b);
        swap.insert(b, a);
        self.perm = compose_perm(&swap, &self.perm);
        self
    }

    fn shifted(&self, s: Slot) -> Slot {
        Slot { pos: s.pos + self.shift, j: s.j }
    }

    fn inverse_perm(&self) -> BTreeMap<Slot, Slot> {
        self.perm.iter().map(|(a, b)| (*b, *a)).collect()
    }

    pub fn apply(&self, s: Slot) -> Slot {
        self.shifted(*self.perm.get(&s).unwrap_or(&s))
    }

    pub fn inverse(&self) -> EndAction {
        let perm = self
            .inverse_perm()
            .into_iter()
            .map(|(a, b)| (Slot { pos: a.pos + self.shift, j: a.j }, Slot { pos: b.pos + self.shift, j: b.j }))
            .collect();
        EndAction { shift: -self.shift, perm }
    }
}

fn compose_perm(p: &BTreeMap<Slot, Slot>, q: &BTreeMap<Slot, Slot>) -> BTreeMap<Slot, Slot> {
    let support: BTreeSet<Slot> = p.keys().chain(q.keys()).copied().collect();
    support
        .into_iter()
        .filter_map(|x| {
            let y = *q.get(&x).unwrap_or(&x);
            let z = *p.get(&y).unwrap_or(&y);
            (z != x).then_some((x, z))
        })
        .collect()
}

/// `f ∘ g`.
pub fn compose(f: &EndAction, g: &EndAction) -> EndAction {
    // f(g(x)) = sf(pf(sg(pg(x)))) = s_{f+g}(c(pg(x))) with c = sg⁻¹ pf sg
    let conj: BTreeMap<Slot, Slot> = f
        .perm
        .iter()
        .map(|(a, b)| (Slot { pos: a.pos - g.shift, j: a.j }, Slot { pos: b.pos - g.shift, j: b.j }))
        .collect();
    EndAction { shift: f.shift + g.shift, perm: compose_perm(&conj, &g.perm) }
}

impl FromStr for EndAction {
    type Err = FluxError;

    /// `shift:<k>[;swap:p1.j1,p2.j2;...]`
    fn from_str(s: &str) -> Result<EndAction, FluxError> {
        let bad = |m: &str| FluxError::BadAction(m.to_string());
        let slot = |t: &str| -> Result<Slot, FluxError> {
            let (p, j) = t.trim().split_once('.').ok_or_else(|| bad(t))?;
            Ok(Slot { pos: p.parse().map_err(|_| bad(t))?, j: j.parse().map_err(|_| bad(t))? })
        };
        let mut f = EndAction::identity();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some(k) = part.strip_prefix("shift:") {
                f.shift = k.trim().parse().map_err(|_| bad(part))?;
            } else if let Some(ab) = part.strip_prefix("swap:") {
                let (a, b) = ab.split_once(',').ok_or_else(|| bad(part))?;
                f = f.with_swap(slot(a)?, slot(b)?);
            } else {
                return Err(bad(part));
            }
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_corks() {
        let m = SpineModel::fig_xn();
        assert_eq!(m.cork(&m.x(0), &m.x(-2)), 2);
        assert_eq!(m.cork(&m.x(2), &m.x(0)), 3);
        assert_eq!(m.cork(&m.x(2), &m.x(-2)), 5);
        assert_eq!(m.cork(&m.x(-1), &m.x(1)), 0);
    }

    #[test]
    fn unit_shifts() {
        let m = SpineModel::unit(Kind::Loop);
        assert_eq!(m.flux_value(&EndAction::shift(1)).unwrap(), 1);
        assert_eq!(m.flux_value(&EndAction::shift(-2)).unwrap(), -2);
        assert_eq!(m.flux_value(&EndAction::identity()).unwrap(), 0);
    }

    #[test]
    fn action_strings() {
        let f: EndAction = "shift:1;swap:0.0,3.0".parse().unwrap();
        assert_eq!(f.shift, 1);
        assert_eq!(f.apply(Slot { pos: 0, j: 0 }), Slot { pos: 4, j: 0 });
        assert!("twist:1".parse::<EndAction>().is_err());
    }
}
