//! Independent re-derivations used to cross-check the main engines.
//!
//! Nothing here calls into `ordinal` arithmetic, `semantics` or `poset`;
//! the ordinal type below is a separate implementation with its own
//! comparison and left subtraction. Only the AST is shared.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::signature::{FamilyExpr, Signature};

/// Cantor normal form `sum omega^e * c`, written independently of
/// [`crate::ordinal::Ordinal`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Cnf(pub Vec<(Cnf, u64)>);

impl Cnf {
    pub fn zero() -> Cnf {
        Cnf(vec![])
    }
    pub fn nat(k: u64) -> Cnf {
        if k == 0 { Cnf::zero() } else { Cnf(vec![(Cnf::zero(), k)]) }
    }
    pub fn pow(e: Cnf) -> Cnf {
        Cnf(vec![(e, 1)])
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn finite(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn compare(&self, o: &Cnf) -> Ordering {
        for i in 0..self.0.len().max(o.0.len()) {
            match (self.0.get(i), o.0.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((e1, c1)), Some((e2, c2))) => {
                    let ord = e1.compare(e2).then(c1.cmp(c2));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
        Ordering::Equal
    }

    pub fn plus(&self, o: &Cnf) -> Cnf {
        let Some((lead, lc)) = o.0.first() else { return self.clone() };
        let mut out: Vec<(Cnf, u64)> = self
            .0
            .iter()
            .filter(|(e, _)| e.compare(lead) != Ordering::Less)
            .cloned()
            .collect();
        match out.last_mut() {
            Some((e, c)) if e.compare(lead) == Ordering::Equal => *c += lc,
            _ => out.push((lead.clone(), *lc)),
        }
        out.extend(o.0[1..].iter().cloned());
        Cnf(out)
    }

    /// Commutative (Hessenberg) sum: the order type of a disjoint union of
    /// the two compact spaces read off by CB rank.
    pub fn natural_sum(&self, o: &Cnf) -> Cnf {
        let mut terms: Vec<(Cnf, u64)> = self.0.iter().chain(o.0.iter()).cloned().collect();
        terms.sort_by(|a, b| b.0.compare(&a.0));
        let mut out: Vec<(Cnf, u64)> = Vec::new();
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if le.compare(&e) == Ordering::Equal => *lc += c,
                _ => out.push((e, c)),
            }
        }
        Cnf(out)
    }

    pub fn times_nat(&self, k: u64) -> Cnf {
        (0..k).fold(Cnf::zero(), |acc, _| acc.natural_sum(self))
    }

    /// `omega^s * self`: shifts every exponent left by `s`.
    pub fn shift_left(&self, s: &Cnf) -> Cnf {
        Cnf(self.0.iter().map(|(e, c)| (s.plus(e), *c)).collect())
    }

    /// The unique `g` with `a + g = self`, for `a <= self`.
    pub fn left_sub(&self, a: &Cnf) -> Cnf {
        let mut i = 0;
        while i < a.0.len() && i < self.0.len() && a.0[i] == self.0[i] {
            i += 1;
        }
        if i == a.0.len() {
            return Cnf(self.0[i..].to_vec());
        }
        let (ae, ac) = &a.0[i];
        let (se, sc) = &self.0[i];
        if ae.compare(se) == Ordering::Equal && ac < sc {
            let mut rest = vec![(se.clone(), sc - ac)];
            rest.extend(self.0[i + 1..].iter().cloned());
            return Cnf(rest);
        }
        Cnf(self.0[i..].to_vec())
    }

    pub fn lead_exp(&self) -> Option<&Cnf> {
        self.0.first().map(|(e, _)| e)
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(e, c)| {
                let base = match e.finite() {
                    Some(0) => return c.to_string(),
                    Some(1) => "w".to_string(),
                    Some(k) => format!("w^{k}"),
                    None if *e == Cnf::pow(Cnf::nat(1)) => "w^w".to_string(),
                    None => format!("w^({e})"),
                };
                if *c == 1 { base } else { format!("{base}*{c}") }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

fn from_ordinal_text(e: &crate::ordinal::OExpr) -> Cnf {
    // Reads a closed exponent term by term; closed OExprs are already CNF.
    Cnf(e.terms.iter().map(|t| (from_ordinal_text(&t.exp), t.coef.b)).filter(|(_, c)| *c > 0).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("end space is uncountable")]
    Uncountable,
    #[error("end space is empty")]
    Empty,
    #[error("signature mentions an unbound index")]
    Open,
}

/// `[1, xi]`: the compact space with `xi` points in the finite case.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrdinalSpace {
    pub xi: Cnf,
}

thread_local! {
    static SIG_VERTS: RefCell<HashMap<(Signature, u64), u128>> = RefCell::new(HashMap::new());
    static ORD_VERTS: RefCell<HashMap<(Cnf, u64), u128>> = RefCell::new(HashMap::new());
}

fn vertices(sig: &Signature, d: u64) -> u128 {
    let key = (sig.clone(), d);
    if let Some(v) = SIG_VERTS.with(|m| m.borrow().get(&key).copied()) {
        return v;
    }
    let v = match sig {
        Signature::Rose(_) => u128::from(d == 0),
        Signature::Cantor => 1u128 << d.min(120),
        Signature::Ord(e) => ord_vertices(&from_ordinal_text(e), d),
        Signature::Genus(x) => vertices(x, d),
        Signature::Wedge(ps) => {
            if d == 0 { 1 } else { ps.iter().fold(0u128, |a, p| a.saturating_add(vertices(p, d))) }
        }
        Signature::Vee { .. } => vertices(&sig.expand_vee(), d),
        Signature::Conv(f, base) => {
            let mut total = vertices(base, d);
            for k in 0..d {
                let b = vertices(base, k);
                if b > 0 {
                    total = total.saturating_add(b.saturating_mul(vertices(&f.member(k), d - k)));
                }
            }
            total
        }
    };
    SIG_VERTS.with(|m| m.borrow_mut().insert(key, v));
    v
}

/// Vertex count of the tree for `omega^a + 1` at depth `d`, unfolding
/// `a = b+1` as a constant family on a ray and limits by their standard
/// fundamental sequences.
fn ord_vertices(a: &Cnf, d: u64) -> u128 {
    if a.is_zero() || d == 0 {
        return 1;
    }
    let key = (a.clone(), d);
    if let Some(v) = ORD_VERTS.with(|m| m.borrow().get(&key).copied()) {
        return v;
    }
    let mut total = 1u128;
    for k in 0..d {
        total = total.saturating_add(ord_vertices(&ord_member(a, k), d - k));
    }
    ORD_VERTS.with(|m| m.borrow_mut().insert(key, total));
    total
}

fn ord_member(a: &Cnf, k: u64) -> Cnf {
    let (last_e, _) = a.0.last().unwrap();
    let mut prefix = a.clone();
    let l = prefix.0.last_mut().unwrap();
    l.1 -= 1;
    if l.1 == 0 {
        prefix.0.pop();
    }
    if last_e.is_zero() {
        return prefix;
    }
    // omega^(e): sequence omega^(e-1)*k or omega^(fund(e)(k))
    let successor_exp = last_e.0.last().is_some_and(|(le, _)| le.is_zero());
    let tail = if successor_exp {
        Cnf(vec![(last_e.left_sub_one_top(), k)]).trim()
    } else {
        Cnf::pow(ord_member(last_e, k))
    };
    prefix.plus(&tail)
}

impl Cnf {
    fn left_sub_one_top(&self) -> Cnf {
        let mut x = self.clone();
        let l = x.0.last_mut().unwrap();
        l.1 -= 1;
        if l.1 == 0 {
            x.0.pop();
        }
        x
    }
    fn trim(self) -> Cnf {
        Cnf(self.0.into_iter().filter(|(_, c)| *c > 0).collect())
    }
}

fn family_sample_index(f: &FamilyExpr) -> u64 {
    12 + 2 * f.max_const()
}

/// Limit of a strictly increasing sequence sampled at three consecutive
/// late indices: common prefix, then the first differing term grows.
fn extrapolate(xs: &[Cnf]) -> Cnf {
    let (a, b) = (&xs[xs.len() - 2], &xs[xs.len() - 1]);
    let mut i = 0;
    while i < a.0.len() && i < b.0.len() && a.0[i] == b.0[i] {
        i += 1;
    }
    if i >= b.0.len() {
        return b.clone();
    }
    let prefix = Cnf(b.0[..i].to_vec());
    let (eb, _) = &b.0[i];
    let limit_term = match a.0.get(i) {
        Some((ea, _)) if ea == eb => Cnf::pow(eb.plus(&Cnf::nat(1))),
        Some(_) => {
            let exps: Vec<Cnf> = xs.iter().filter_map(|x| x.0.get(i).map(|t| t.0.clone())).collect();
            Cnf::pow(extrapolate(&exps))
        }
        None => Cnf::pow(eb.plus(&Cnf::nat(1))),
    };
    prefix.plus(&limit_term)
}

/// Order type `xi` with `end space ≅ [1, xi]`, computed with ordinal sums.
pub fn end_space_ordinal(sig: &Signature) -> Result<Cnf, OracleError> {
    if sig.has_var() {
        return Err(OracleError::Open);
    }
    if sig.contains_cantor() {
        return Err(OracleError::Uncountable);
    }
    let xi = xi_of(sig);
    if xi.is_zero() {
        return Err(OracleError::Empty);
    }
    Ok(xi)
}

fn xi_of(sig: &Signature) -> Cnf {
    match sig {
        Signature::Rose(_) => Cnf::zero(),
        Signature::Cantor => unreachable!("countability checked first"),
        Signature::Ord(e) => Cnf::pow(from_ordinal_text(e)),
        Signature::Genus(x) => xi_of(x),
        Signature::Wedge(ps) => ps.iter().fold(Cnf::zero(), |acc, p| acc.natural_sum(&xi_of(p))),
        Signature::Vee { .. } => xi_of(&sig.expand_vee()),
        Signature::Conv(f, base) => {
            let xb = xi_of(base);
            if xb.is_zero() {
                return xi_of(&f.member(0));
            }
            let k0 = family_sample_index(f);
            let samples: Vec<Cnf> = (k0..k0 + 3).map(|k| xi_of(&f.member(k))).collect();
            // sum over an omega-sequence of ends-per-vertex contributions
            let s = if samples.iter().all(|x| x.is_zero()) {
                Cnf::zero()
            } else {
                let leads: Vec<Cnf> = samples.iter().map(|x| x.lead_exp().cloned().unwrap_or_default()).collect();
                if leads.windows(2).all(|w| w[0] == w[1]) {
                    Cnf::pow(leads[0].plus(&Cnf::nat(1)))
                } else {
                    Cnf::pow(extrapolate(&leads))
                }
            };
            // every base end carries the tail sum in front of it
            let tail_part = if s.is_zero() { xb } else { xb.shift_left(s.lead_exp().unwrap()) };
            let mut total = tail_part;
            // early members sit at finitely many vertices; later ones are
            // absorbed by the tail sum
            for k in 0..k0 {
                let x = xi_of(&f.member(k));
                if x.is_zero() {
                    continue;
                }
                let absorbed = s.lead_exp().is_some_and(|l| x.lead_exp().unwrap().compare(l) == Ordering::Less);
                let cnt = if absorbed { 0 } else { vertices(base, k) };
                if cnt > 0 {
                    total = total.natural_sum(&x.times_nat(cnt.min(u64::MAX as u128) as u64));
                }
            }
            total
        }
    }
}

/// One Cantor-Bendixson derivative of `[1, xi]`.
pub fn cb_derivative(s: &OrdinalSpace) -> OrdinalSpace {
    cb_derivative_by(s, &Cnf::nat(1))
}

/// `a`-th derivative, `a` a power of omega or 1.
fn cb_derivative_by(s: &OrdinalSpace, a: &Cnf) -> OrdinalSpace {
    let xi = Cnf(
        s.xi.0
            .iter()
            .filter(|(e, _)| e.compare(a) != Ordering::Less)
            .map(|(e, c)| (e.left_sub(a), *c))
            .collect(),
    );
    OrdinalSpace { xi }
}

/// Iterates derivatives (jumping by powers of omega where single steps
/// would not terminate) until a finite set remains.
pub fn cb_rank_of_space(s: &OrdinalSpace) -> Result<(Cnf, u64), OracleError> {
    if s.xi.is_zero() {
        return Err(OracleError::Empty);
    }
    let mut cur = s.clone();
    let mut rank = Cnf::zero();
    loop {
        if let Some(n) = cur.xi.finite() {
            return Ok((rank, n));
        }
        let e = cur.xi.lead_exp().unwrap().clone();
        let step = if e.finite().is_some() { Cnf::nat(1) } else { Cnf::pow(e.lead_exp().unwrap().clone()) };
        cur = cb_derivative_by(&cur, &step);
        rank = rank.plus(&step);
    }
}

pub fn cb_rank_of_sig(sig: &Signature) -> Result<(Cnf, u64), OracleError> {
    cb_rank_of_space(&OrdinalSpace { xi: end_space_ordinal(sig)? })
}

/// Does `sig` (countable, genus ignored) have an end of type `z = w^b+1`?
pub fn type_rank_check(sig: &Signature, z: &Signature) -> bool {
    let Signature::Ord(b) = z else { return false };
    let Ok((rank, _)) = cb_rank_of_sig(sig) else { return false };
    from_ordinal_text(b).compare(&rank) != Ordering::Greater
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EmbedAnswer {
    Yes,
    No,
    Inconclusive,
}

pub fn depth_cap() -> usize {
    std::env::var("ENDSPACE_DEPTH_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(6)
}

/// Clopen embedding of `end(a)` into `end(b)` on the genus-free countable
/// fragment by rank census; countability settles the mixed case.
pub fn small_embed_check(a: &Signature, b: &Signature, depth: usize) -> EmbedAnswer {
    if a.depth() > depth || b.depth() > depth {
        return EmbedAnswer::Inconclusive;
    }
    let genus_free = |s: &Signature| {
        !s.subterms().iter().any(|t| matches!(t, Signature::Genus(_) | Signature::Rose(1..)))
    };
    let (ca, cb) = (!a.contains_cantor(), !b.contains_cantor());
    if !ca && cb {
        return EmbedAnswer::No;
    }
    if a == b {
        return EmbedAnswer::Yes;
    }
    if !(ca && cb && genus_free(a) && genus_free(b)) {
        return EmbedAnswer::Inconclusive;
    }
    match (cb_rank_of_sig(a), cb_rank_of_sig(b)) {
        (Ok((ra, na)), Ok((rb, nb))) => match ra.compare(&rb) {
            Ordering::Less => EmbedAnswer::Yes,
            Ordering::Equal if na <= nb => EmbedAnswer::Yes,
            _ => EmbedAnswer::No,
        },
        (Err(OracleError::Empty), _) => EmbedAnswer::Yes,
        _ => EmbedAnswer::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse;

    fn xi(s: &str) -> String {
        end_space_ordinal(&parse(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn end_space_examples() {
        assert_eq!(xi("(w^2+1) v (w^2+1)"), "w^2*2");
        assert_eq!(xi("1"), "1");
        assert_eq!(xi("(w+1) -> 1"), "w^2");
        assert_eq!(xi("{w^n+1} -> 1"), "w^w");
        assert_eq!(xi("1 -> (w+1)"), "w^2");
    }

    #[test]
    fn derivative_examples() {
        let w = Cnf::pow(Cnf::nat(1));
        let d = cb_derivative(&OrdinalSpace { xi: w });
        assert_eq!(d.xi, Cnf::nat(1));
        let fin = cb_derivative(&OrdinalSpace { xi: Cnf::nat(4) });
        assert!(fin.xi.is_zero());
        let x = Cnf(vec![(Cnf::nat(2), 3)]);
        assert_eq!(cb_rank_of_space(&OrdinalSpace { xi: x }).unwrap(), (Cnf::nat(2), 3));
        let ww = Cnf::pow(Cnf::pow(Cnf::nat(1)));
        assert_eq!(cb_rank_of_space(&OrdinalSpace { xi: ww }).unwrap(), (Cnf::pow(Cnf::nat(1)), 1));
    }

    #[test]
    fn rank_and_embed_examples() {
        assert!(type_rank_check(&parse("w^w+1").unwrap(), &parse("w^3+1").unwrap()));
        assert_eq!(small_embed_check(&parse("C").unwrap(), &parse("w^w+1").unwrap(), 4), EmbedAnswer::No);
        assert_eq!(small_embed_check(&parse("w^2+1").unwrap(), &parse("w^2+1").unwrap(), 4), EmbedAnswer::Yes);
    }

    #[test]
    fn left_subtraction() {
        let w = Cnf::pow(Cnf::nat(1));
        assert_eq!(w.left_sub(&Cnf::nat(1)), w);
        assert_eq!(Cnf::nat(5).left_sub(&Cnf::nat(2)), Cnf::nat(3));
        let x = Cnf(vec![(Cnf::nat(1), 3)]);
        assert_eq!(x.left_sub(&w), Cnf(vec![(Cnf::nat(1), 2)]));
    }
}
