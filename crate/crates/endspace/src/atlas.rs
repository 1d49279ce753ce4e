//! Named graphs with expected invariants.
//!
//! The bundled atlas lives in `data/atlas.json`; any file in the same
//! format can be checked with [`check_entry`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::canonical::{is_self_similar, is_stable, rewrite};
use crate::classify::{classify_homeo, classify_maps, gcd_witness_search, recheck, Lambda, Verdict};
use crate::flux::{EndAction, SpineModel};
use crate::oracle::cb_rank_of_sig;
use crate::poset::maximal_end_types;
use crate::semantics::{genus_class, ms_form};
use crate::signature::{parse, Signature};

pub const BUNDLED: &str = include_str!("../data/atlas.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub value: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<SpineModel>,
    pub expected: BTreeMap<String, Expected>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub entry: String,
    pub key: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum AtlasError {
    #[error("atlas file is not valid: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn load(text: &str) -> Result<Vec<AtlasEntry>, AtlasError> {
    Ok(serde_json::from_str(text)?)
}

pub fn atlas_entries() -> Vec<AtlasEntry> {
    load(BUNDLED).expect("bundled atlas parses")
}

/// The library module a key exercises.
pub fn module_of(key: &str) -> &'static str {
    match key {
        "parses" => "signature",
        "normal-form" | "stable" | "self-similar" => "canonical",
        "genus" | "ms-form" => "semantics",
        "max-ends" => "poset",
        "oracle-ms-form" => "oracle",
        k if k.starts_with("cork(") || k.starts_with("flux(") => "flux",
        k if k.starts_with("maps") || k.starts_with("homeo") || k == "gcd-lambda" => "classify",
        _ => "unknown",
    }
}

/// Modules touched by the expectations of `entries`. Parsing an ordinal
/// literal runs through `ordinal`, so any signature entry counts for it.
pub fn coverage(entries: &[AtlasEntry]) -> BTreeSet<&'static str> {
    let mut out = BTreeSet::new();
    for e in entries {
        if e.expr.is_some() {
            out.insert("ordinal");
            out.insert("signature");
        }
        for k in e.expected.keys() {
            out.insert(module_of(k));
        }
    }
    out.remove("unknown");
    out
}

fn verdict_text(sig: &Signature, v: &Verdict) -> String {
    if v.answer.is_no() && !recheck(sig, v) {
        return format!("{} (witness rejected)", v.answer);
    }
    v.answer.to_string()
}

fn actual(key: &str, sig: Option<&Signature>, model: Option<&SpineModel>) -> String {
    if let Some(args) = key.strip_prefix("cork(").and_then(|k| k.strip_suffix(')')) {
        let Some(m) = model else { return "no model".into() };
        let Some((a, b)) = args.split_once(',') else { return "bad key".into() };
        let (Ok(a), Ok(b)) = (a.trim().parse::<i64>(), b.trim().parse::<i64>()) else { return "bad key".into() };
        return m.cork(&m.x(a), &m.x(b)).to_string();
    }
    if let Some(action) = key.strip_prefix("flux(").and_then(|k| k.strip_suffix(')')) {
        let Some(m) = model else { return "no model".into() };
        return match action.parse::<EndAction>().and_then(|f| m.flux_value(&f)) {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
    }
    let Some(sig) = sig else { return "no expression".into() };
    match key {
        "parses" => "yes".into(),
        "normal-form" => rewrite(sig).to_string(),
        "stable" => is_stable(sig).label().into(),
        "self-similar" => is_self_similar(sig).answer.to_string(),
        "genus" => format!("{:?}", genus_class(sig)),
        "ms-form" => match ms_form(sig) {
            Ok((a, n)) => format!("({a}, {n})"),
            Err(e) => format!("error: {e}"),
        },
        "oracle-ms-form" => match cb_rank_of_sig(sig) {
            Ok((a, n)) => format!("({a}, {n})"),
            Err(e) => format!("error: {e}"),
        },
        "max-ends" => match maximal_end_types(sig) {
            Ok(r) => r.types.len().to_string(),
            Err(e) => format!("error: {e}"),
        },
        "maps" => verdict_text(sig, &classify_maps(sig)),
        "maps-theorem" => format!("{:?}", classify_maps(sig).theorem),
        "maps-category" => classify_maps(sig).category.map_or("none".into(), |c| c.to_string()),
        "homeo" => verdict_text(sig, &classify_homeo(sig)),
        "homeo-theorem" => format!("{:?}", classify_homeo(sig).theorem),
        "gcd-lambda" => match gcd_witness_search(sig) {
            Some(w) => match w.lambda {
                Lambda::End { end } => end.sig.to_string(),
                Lambda::LoopMark => "R1".into(),
            },
            None => "none".into(),
        },
        _ => "unknown key".into(),
    }
}

pub fn check_entry(e: &AtlasEntry) -> Vec<CheckLine> {
    let parsed = e.expr.as_deref().map(parse);
    let line = |key: &str, exp: &str, act: String| CheckLine {
        entry: e.name.clone(),
        key: key.into(),
        expected: exp.into(),
        ok: act == exp,
        actual: act,
    };
    match parsed {
        Some(Err(err)) => e.expected.iter().map(|(k, x)| line(k, &x.value, format!("parse error: {err}"))).collect(),
        Some(Ok(sig)) => e.expected.iter().map(|(k, x)| line(k, &x.value, actual(k, Some(&sig), e.model.as_ref()))).collect(),
        None => e.expected.iter().map(|(k, x)| line(k, &x.value, actual(k, None, e.model.as_ref()))).collect(),
    }
}

pub fn check_all(entries: &[AtlasEntry]) -> Vec<CheckLine> {
    entries.iter().flat_map(check_entry).collect()
}
