//! Deterministic printer. Family indices print as `n`, range indices as
//! `i` (then `j`, `k`, ... when nested).

use super::{FamilyExpr, Signature};

const NAMES: [char; 8] = ['n', 'i', 'j', 'k', 'm', 'p', 'q', 'r'];

fn next_name(c: char) -> char {
    let at = NAMES.iter().position(|&x| x == c).unwrap_or(0);
    NAMES[(at + 1) % NAMES.len()]
}

pub fn print(s: &Signature) -> String {
    wedge(s, 'n')
}

fn wedge(s: &Signature, var: char) -> String {
    match s {
        Signature::Wedge(ps) => ps.iter().map(|p| conv(p, var)).collect::<Vec<_>>().join(" v "),
        _ => conv(s, var),
    }
}

fn conv(s: &Signature, var: char) -> String {
    match s {
        Signature::Conv(f, base) => {
            let lhs = match &**f {
                FamilyExpr::Const(y) => atom(y, var),
                f => format!("{{{}}}", family(f)),
            };
            format!("{lhs} -> {}", atom(base, var))
        }
        _ => atom(s, var),
    }
}

fn atom(s: &Signature, var: char) -> String {
    match s {
        Signature::Rose(k) => format!("R{k}"),
        Signature::Cantor => "C".into(),
        Signature::Ord(e) => {
            if e.terms.is_empty() {
                "1".into()
            } else if *e == crate::ordinal::OExpr::lit(1) {
                "w+1".into()
            } else {
                format!("w^{}+1", e.fmt_exp(var))
            }
        }
        Signature::Genus(x) => format!("o({})", wedge(x, var)),
        Signature::Wedge(_) | Signature::Conv(..) => format!("({})", wedge(s, var)),
        Signature::Vee { lo, hi, body } => {
            let i = next_name(var);
            format!("Vee_{{{i}={lo}..{}}}({})", hi.fmt_var(var), wedge(body, i))
        }
    }
}

fn family(f: &FamilyExpr) -> String {
    match f {
        FamilyExpr::Const(y) | FamilyExpr::Param(y) => wedge(y, 'n'),
        FamilyExpr::Accum(g) => format!("accum({})", family(g)),
        FamilyExpr::Stride { k, r, inner } => format!("stride({k},{r},{})", family(inner)),
        FamilyExpr::Wedge(fs) => fs.iter().map(family).collect::<Vec<_>>().join(" v "),
        FamilyExpr::Prefix(h, t) => format!(
            "[{}; {}]",
            h.iter().map(|s| wedge(s, 'n')).collect::<Vec<_>>().join(", "),
            family(t)
        ),
    }
}
