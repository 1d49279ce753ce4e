//! Command-line front end. The binary only forwards `argv` to [`run`].

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::answer::Answer;
use crate::atlas;
use crate::canonical::{self, isomorphic, Iso, Stability};
use crate::classify::{self, Lambda, Verdict};
use crate::flux::{EndAction, Kind, SpineModel};
use crate::oracle;
use crate::poset::{self, LocalStructure, SuccKind};
use crate::semantics;
use crate::signature::{parse, Signature};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "endspace", version, about = "Signatures of locally finite graphs: normal forms, end spaces, local structures, dense conjugacy verdicts")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch classification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    One,
    Cantor,
}

impl From<KindArg> for SuccKind {
    fn from(k: KindArg) -> SuccKind {
        match k {
            KindArg::One => SuccKind::One,
            KindArg::Cantor => SuccKind::Cantor,
        }
    }
}

#[derive(Args, Debug)]
struct Batch {
    /// Signatures; `-` reads one per line from standard input.
    #[arg(required = true)]
    exprs: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and print back.
    Parse { expr: String },
    /// Rewrite to normal form.
    Normalize {
        expr: String,
        #[arg(long)]
        trace: bool,
    },
    Stable { expr: String },
    SelfSimilar { expr: String },
    Decompose { expr: String },
    /// Are two signatures proper homotopy equivalent?
    Iso { a: String, b: String },
    /// End space summary.
    Endspace { expr: String },
    Genus { expr: String },
    MaxEnds { expr: String },
    /// Does `expr` have an end of local structure `z`?
    Types { expr: String, z: String },
    /// Order of two local structures.
    Compare { a: String, b: String },
    /// Clopen embedding of end spaces.
    Embeds { a: String, b: String },
    Successor {
        expr: String,
        #[arg(long, value_enum, default_value = "one")]
        kind: KindArg,
    },
    /// Minimal upper bound of local structures.
    Mub {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long, value_enum, default_value = "one")]
        kind: KindArg,
    },
    Gcd { expr: String },
    ClassifyMaps(Batch),
    ClassifyHomeo(Batch),
    /// Flux of an end action on a spine model.
    Flux {
        /// JSON model file, or one of `fig-xn`, `unit-end`, `unit-loop`.
        #[arg(long)]
        model: String,
        /// `shift:<k>[;swap:p1.j1,p2.j2;...]`
        #[arg(long, allow_hyphen_values = true)]
        action: String,
        /// Print cork(X_m, X_n) for the listed `m,n` pairs as well.
        #[arg(long, allow_hyphen_values = true)]
        cork: Vec<String>,
    },
    /// Independent brute-force checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Bundled named graphs.
    Atlas {
        #[arg(long)]
        check: bool,
        /// Use this atlas file instead of the bundled one.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// End space as an ordinal space.
    Ordinal { expr: String },
    /// Cantor-Bendixson rank and degree.
    Rank { expr: String },
    TypeRank { expr: String, z: String },
    Embed {
        a: String,
        b: String,
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// What a command produced.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

#[derive(Debug)]
enum Fail {
    Parse(String),
    Data(String),
}

fn sig(text: &str) -> Result<Signature, Fail> {
    parse(text).map_err(|e| Fail::Parse(format!("{text}: {e}")))
}

fn local(text: &str) -> Result<LocalStructure, Fail> {
    LocalStructure::from_sig(&sig(text)?).map_err(|e| Fail::Data(e.to_string()))
}

fn answer_code(a: Answer) -> i32 {
    match a {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
        Answer::Unknown => EXIT_UNKNOWN,
    }
}

fn out(json: Value, text: String, code: i32) -> Result<Output, Fail> {
    Ok(Output { json, text, code })
}

fn model(arg: &str) -> Result<SpineModel, Fail> {
    let m = match arg {
        "fig-xn" => SpineModel::fig_xn(),
        "unit-end" => SpineModel::unit(Kind::End),
        "unit-loop" => SpineModel::unit(Kind::Loop),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Fail::Data(format!("{path}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| Fail::Parse(format!("{path}: {e}")))?
        }
    };
    m.validate().map_err(|e| Fail::Data(e.to_string()))?;
    Ok(m)
}

fn verdict_text(v: &Verdict) -> String {
    let mut s = format!("{} {:?}", v.answer, v.theorem);
    if let Some(c) = v.category {
        s.push_str(&format!(" category {c}"));
    }
    s
}

fn expand_batch(exprs: &[String]) -> Result<Vec<String>, Fail> {
    let mut lines = Vec::new();
    for e in exprs {
        if e == "-" {
            for l in std::io::stdin().lock().lines() {
                let l = l.map_err(|e| Fail::Data(e.to_string()))?;
                let l = l.trim();
                if !l.is_empty() && !l.starts_with('#') {
                    lines.push(l.to_string());
                }
            }
        } else {
            lines.push(e.clone());
        }
    }
    Ok(lines)
}

fn classify_batch(exprs: &[String], jobs: usize, f: fn(&Signature) -> Verdict) -> Result<Output, Fail> {
    let lines = expand_batch(exprs)?;
    let sigs = lines.iter().map(|l| sig(l)).collect::<Result<Vec<_>, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Fail::Data(e.to_string()))?;
    let verdicts: Vec<Verdict> = pool.install(|| sigs.par_iter().map(f).collect());
    if let [v] = verdicts.as_slice() {
        return out(serde_json::to_value(v).unwrap(), verdict_text(v), answer_code(v.answer));
    }
    let json = Value::Array(
        lines
            .iter()
            .zip(&verdicts)
            .map(|(l, v)| {
                let mut j = serde_json::to_value(v).unwrap();
                j["input"] = json!(l);
                j
            })
            .collect(),
    );
    let text = lines.iter().zip(&verdicts).map(|(l, v)| format!("{l}\t{}", verdict_text(v))).collect::<Vec<_>>().join("\n");
    out(json, text, EXIT_YES)
}

fn execute(cli: Cli) -> Result<Output, Fail> {
    match cli.cmd {
        Cmd::Parse { expr } => {
            let s = sig(&expr)?;
            let j = json!({"signature": s, "depth": s.depth(), "size": s.size()});
            out(j, s.to_string(), EXIT_YES)
        }
        Cmd::Normalize { expr, trace } => {
            let s = sig(&expr)?;
            let c = canonical::normalize(&s);
            let mut j = serde_json::to_value(&c).unwrap();
            let mut text = c.sig.to_string();
            if trace {
                for st in &c.trace {
                    text.push_str(&format!("\n  {} at {:?}: {} => {}", st.rule, st.path, st.before, st.after));
                }
            } else {
                j.as_object_mut().unwrap().remove("trace");
            }
            out(j, text, EXIT_YES)
        }
        Cmd::Stable { expr } => {
            let st = canonical::is_stable(&sig(&expr)?);
            let code = match st {
                Stability::Stable { .. } => EXIT_YES,
                Stability::Unstable { .. } => EXIT_NO,
                Stability::Unknown { .. } => EXIT_UNKNOWN,
            };
            out(serde_json::to_value(&st).unwrap(), st.label().into(), code)
        }
        Cmd::SelfSimilar { expr } => {
            let r = canonical::is_self_similar(&sig(&expr)?);
            let text = format!("{} ({})", r.answer, r.reason);
            out(serde_json::to_value(&r).unwrap(), text, answer_code(r.answer))
        }
        Cmd::Decompose { expr } => {
            let d = canonical::wedge_decomposition(&sig(&expr)?).map_err(|e| Fail::Data(e.to_string()))?;
            let mut parts: Vec<String> = d.components.iter().map(|z| z.sig.to_string()).collect();
            if let Some(k) = d.rose {
                parts.push(format!("R{k}"));
            }
            out(serde_json::to_value(&d).unwrap(), parts.join(" v "), EXIT_YES)
        }
        Cmd::Iso { a, b } => {
            let r = isomorphic(&sig(&a)?, &sig(&b)?);
            let (code, text) = match &r {
                Iso::Yes => (EXIT_YES, "Yes".to_string()),
                Iso::No(why) => (EXIT_NO, format!("No ({why} differs)")),
                Iso::Unknown => (EXIT_UNKNOWN, "Unknown".to_string()),
            };
            out(serde_json::to_value(&r).unwrap(), text, code)
        }
        Cmd::Endspace { expr } => {
            let s = sig(&expr)?;
            let cp = semantics::char_pair(&s);
            let mut j = serde_json::to_value(&cp).unwrap();
            let mut text = format!("genus {:?}, countable {}, perfect {}", cp.genus, cp.countable, cp.perfect);
            if let Some((a, n)) = &cp.ms_form {
                text.push_str(&format!(", w^{a}*{n}+1"));
            }
            if let Ok(r) = poset::maximal_end_types(&s) {
                j["maximal_end_types"] = serde_json::to_value(&r.types).unwrap();
            }
            out(j, text, EXIT_YES)
        }
        Cmd::Genus { expr } => {
            let g = semantics::genus_class(&sig(&expr)?);
            out(json!({"genus": g}), format!("{g:?}"), EXIT_YES)
        }
        Cmd::MaxEnds { expr } => {
            let r = poset::maximal_end_types(&sig(&expr)?).map_err(|e| Fail::Data(e.to_string()))?;
            let text = r.types.iter().map(|(z, m)| format!("{} x {m:?}", z.sig)).collect::<Vec<_>>().join("\n");
            out(serde_json::to_value(&r).unwrap(), text, EXIT_YES)
        }
        Cmd::Types { expr, z } => {
            let a = poset::has_end_of_type(&sig(&expr)?, &local(&z)?);
            out(json!({"answer": a}), a.to_string(), answer_code(a))
        }
        Cmd::Compare { a, b } => {
            let (za, zb) = (local(&a)?, local(&b)?);
            let (ab, ba) = (poset::leq(&za, &zb), poset::leq(&zb, &za));
            let rel = match (ab, ba) {
                (Answer::Yes, Answer::Yes) => "equal",
                (Answer::Yes, _) => "below",
                (_, Answer::Yes) => "above",
                (Answer::No, Answer::No) => "incomparable",
                _ => "unknown",
            };
            out(json!({"leq": ab, "geq": ba, "relation": rel}), rel.into(), EXIT_YES)
        }
        Cmd::Embeds { a, b } => {
            let r = poset::clopen_embeds(&sig(&a)?, &sig(&b)?);
            out(json!({"answer": r}), r.to_string(), answer_code(r))
        }
        Cmd::Successor { expr, kind } => {
            let s = poset::immediate_successor(&sig(&expr)?, kind.into());
            out(json!({"successor": s}), s.to_string(), EXIT_YES)
        }
        Cmd::Mub { exprs, kind } => {
            let zs = exprs.iter().map(|e| local(e)).collect::<Result<Vec<_>, _>>()?;
            let s = poset::minimal_upper_bound(&zs, kind.into()).map_err(|e| Fail::Data(e.to_string()))?;
            out(json!({"bound": s}), s.to_string(), EXIT_YES)
        }
        Cmd::Gcd { expr } => match classify::gcd_witness_search(&sig(&expr)?) {
            Some(w) => {
                let text = match &w.lambda {
                    Lambda::End { end } => format!("gcd {} of {} and {}", end.sig, w.mu1.sig, w.mu2.sig),
                    Lambda::LoopMark => format!("gcd R1 of {} and {}", w.mu1.sig, w.mu2.sig),
                };
                out(json!({"found": true, "witness": w}), text, EXIT_YES)
            }
            None => out(json!({"found": false}), "none".into(), EXIT_UNKNOWN),
        },
        Cmd::ClassifyMaps(b) => classify_batch(&b.exprs, cli.jobs, classify::classify_maps),
        Cmd::ClassifyHomeo(b) => classify_batch(&b.exprs, cli.jobs, classify::classify_homeo),
        Cmd::Flux { model: m, action, cork } => {
            let m = model(&m)?;
            let f: EndAction = action.parse().map_err(|e: crate::flux::FluxError| Fail::Parse(e.to_string()))?;
            let v = m.flux_value(&f).map_err(|e| Fail::Data(e.to_string()))?;
            let mut corks = Vec::new();
            for c in &cork {
                let (a, b) = c
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                    .ok_or_else(|| Fail::Parse(format!("cork pair {c}: expected m,n")))?;
                corks.push(json!({"m": a, "n": b, "cork": m.cork(&m.x(a), &m.x(b))}));
            }
            let mut text = format!("flux {v}");
            for c in &corks {
                text.push_str(&format!("\ncork(X{}, X{}) = {}", c["m"], c["n"], c["cork"]));
            }
            out(json!({"flux": v, "action": f, "corks": corks}), text, EXIT_YES)
        }
        Cmd::Oracle(o) => oracle_cmd(o),
        Cmd::Atlas { check, file } => {
            let entries = match file {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| Fail::Data(format!("{}: {e}", p.display())))?;
                    atlas::load(&text).map_err(|e| Fail::Parse(e.to_string()))?
                }
                None => atlas::atlas_entries(),
            };
            if !check {
                let text = entries
                    .iter()
                    .map(|e| format!("{}\t{}", e.name, e.expr.as_deref().unwrap_or("(spine model)")))
                    .collect::<Vec<_>>()
                    .join("\n");
                return out(serde_json::to_value(&entries).unwrap(), text, EXIT_YES);
            }
            let lines = atlas::check_all(&entries);
            let failed = lines.iter().filter(|l| !l.ok).count();
            let coverage: Vec<_> = atlas::coverage(&entries).into_iter().collect();
            let mut text: Vec<String> = lines
                .iter()
                .map(|l| {
                    let mark = if l.ok { "ok  " } else { "FAIL" };
                    format!("{mark} {} {} = {} (expected {})", l.entry, l.key, l.actual, l.expected)
                })
                .collect();
            text.push(format!("{} checks, {failed} failed; modules: {}", lines.len(), coverage.join(", ")));
            let j = json!({"checks": lines, "failed": failed, "modules": coverage});
            out(j, text.join("\n"), if failed == 0 { EXIT_YES } else { EXIT_NO })
        }
    }
}

fn oracle_cmd(o: OracleCmd) -> Result<Output, Fail> {
    match o {
        OracleCmd::Ordinal { expr } => {
            let x = oracle::end_space_ordinal(&sig(&expr)?).map_err(|e| Fail::Data(e.to_string()))?;
            out(json!({"ordinal": x.to_string()}), format!("{x}+1"), EXIT_YES)
        }
        OracleCmd::Rank { expr } => {
            let (a, n) = oracle::cb_rank_of_sig(&sig(&expr)?).map_err(|e| Fail::Data(e.to_string()))?;
            out(json!({"rank": a.to_string(), "degree": n}), format!("({a}, {n})"), EXIT_YES)
        }
        OracleCmd::TypeRank { expr, z } => {
            let r = oracle::type_rank_check(&sig(&expr)?, &sig(&z)?);
            let a = Answer::from_bool(r);
            out(json!({"answer": a}), a.to_string(), answer_code(a))
        }
        OracleCmd::Embed { a, b, depth } => {
            let r = oracle::small_embed_check(&sig(&a)?, &sig(&b)?, depth.unwrap_or_else(oracle::depth_cap));
            let code = match r {
                oracle::EmbedAnswer::Yes => EXIT_YES,
                oracle::EmbedAnswer::No => EXIT_NO,
                oracle::EmbedAnswer::Inconclusive => EXIT_UNKNOWN,
            };
            out(json!({"answer": r}), format!("{r:?}"), code)
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit
/// code and what would go to standard output and standard error.
pub fn run_captured<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let s = e.render().to_string();
            return if e.use_stderr() { (code, String::new(), s) } else { (code, s, String::new()) };
        }
    };
    let as_json = cli.json;
    match std::panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(o)) => {
            let body = if as_json { serde_json::to_string(&o.json).unwrap() } else { o.text };
            (o.code, body + "\n", String::new())
        }
        Ok(Err(Fail::Parse(m))) => (EXIT_PARSE, String::new(), format!("parse error: {m}\n")),
        Ok(Err(Fail::Data(m))) => (EXIT_PARSE, String::new(), format!("error: {m}\n")),
        Err(_) => (EXIT_INTERNAL, String::new(), "internal error\n".into()),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (code, stdout, stderr) = run_captured(argv);
    let _ = std::io::stdout().write_all(stdout.as_bytes());
    let _ = std::io::stderr().write_all(stderr.as_bytes());
    code
}
