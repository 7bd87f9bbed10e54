use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use suspension_lab::filling::{compute_m, verify_separation, FilledGraph, FillingSpec};
use suspension_lab::gog::{GraphOfGroups, Verdict};
use suspension_lab::hall::Collector;
use suspension_lab::magnus::{embed, embed_normal_form, gamma_weight, Ring};
use suspension_lab::nilpotent::{auto_periodic_quotient, layer_matrix, p_periodic_quotient, SuspensionElement};
use suspension_lab::pts::Pts;
use suspension_lab::word::{parse_aut, Alphabet};
use suspension_lab::Error;

const VERBS: &[&str] = &[
    "collect",
    "gamma-weight",
    "magnus",
    "layer-matrix",
    "p-quotient",
    "gog-reduce",
    "translation-length",
    "pts-short",
    "pts-conjugate",
    "filling-build",
    "filling-verify",
    "compute-M",
];

#[derive(Parser)]
#[command(name = "suslab", version, about = "Exact computations for free-by-cyclic groups")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Seed recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Step or candidate budget for rewriting and searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Syllable bound for the confirming conjugator search.
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args)]
struct WordArgs {
    word: String,
    #[arg(long, default_value_t = 4)]
    trunc: usize,
    /// Comma-separated generator names; defaults to a, b, c, ... as needed.
    #[arg(long)]
    gens: Option<String>,
}

#[derive(Args)]
struct GogWord {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    word: String,
}

#[derive(Args)]
struct FillArgs {
    #[arg(long)]
    pts: PathBuf,
    #[arg(long)]
    fill: PathBuf,
    /// Rescale every edge and central order to this value.
    #[arg(long)]
    order: Option<u64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Hall collection of a word modulo the next lower central term.
    Collect(WordArgs),
    /// Lower central weight of a word.
    GammaWeight(WordArgs),
    /// Truncated Magnus expansion.
    Magnus {
        #[command(flatten)]
        w: WordArgs,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Action of an automorphism on a lower central layer.
    LayerMatrix {
        #[arg(long)]
        aut: PathBuf,
        #[arg(long, default_value_t = 2)]
        trunc: usize,
    },
    /// Periodic quotient of the suspension certified on a finite set.
    PQuotient {
        #[arg(long)]
        aut: PathBuf,
        #[arg(long)]
        elems: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Reduced form of a Bass word.
    GogReduce(GogWord),
    /// Translation length and cyclic reduction.
    TranslationLength(GogWord),
    /// Short positions of a hyperbolic loop.
    PtsShort {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        g: String,
    },
    /// Conjugacy decision in a piecewise trivial suspension.
    PtsConjugate {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Builds and validates a finite filling.
    FillingBuild(FillArgs),
    /// Certifies that a filling separates a non-conjugate pair.
    FillingVerify {
        #[command(flatten)]
        fill: FillArgs,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Modulus at which the persistent congruence has no solution.
    #[command(name = "compute-M", alias = "compute-m")]
    ComputeM {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kappa: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta: Vec<i64>,
        #[arg(long, allow_hyphen_values = true)]
        eps2: i64,
    },
}

/// Output of one verb: exit code, plain-text lines and the JSON payload.
struct Report {
    code: u8,
    text: Vec<String>,
    json: Value,
}

impl Report {
    fn ok(text: Vec<String>, json: Value) -> Self {
        Report { code: 0, text, json }
    }
}

/// Merges `pts conjugate` into `pts-conjugate` and similar two-word verbs.
fn join_verb(mut args: Vec<String>) -> Vec<String> {
    if args.len() >= 3 {
        let joined = format!("{}-{}", args[1], args[2]);
        if VERBS.iter().any(|v| v.eq_ignore_ascii_case(&joined)) {
            args.splice(1..3, [joined]);
        }
    }
    args
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn alphabet_for(text: &str, gens: Option<&str>) -> Result<Alphabet> {
    if let Some(g) = gens {
        let names: Vec<&str> = g.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        return Ok(Alphabet::new(&names)?);
    }
    let w = Alphabet::standard(26).parse_word(text)?;
    Ok(Alphabet::standard(w.max_generator().map_or(1, |g| g + 1)))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Conjugate => 0,
        Verdict::NonConjugate => 1,
        Verdict::Unresolved => 2,
    }
}

fn collect_verb(a: &WordArgs, budget: Option<usize>) -> Result<Report> {
    let al = alphabet_for(&a.word, a.gens.as_deref())?;
    let w = al.parse_word(&a.word)?;
    let mut c = Collector::new(al.rank(), a.trunc)?;
    if let Some(b) = budget {
        c = c.with_budget(b);
    }
    let nf = c.collect_word(&w)?;
    let checked = embed(&w, a.trunc + 1, Ring::Integers) == embed_normal_form(&nf, a.trunc + 1, Ring::Integers);
    let text = nf.format(&al);
    let terms: Vec<Value> = nf
        .terms()
        .iter()
        .map(|&(id, e)| json!({"commutator": nf.basis().format(id, &al), "weight": nf.basis().weight(id), "exponent": e}))
        .collect();
    Ok(Report {
        code: if checked { 0 } else { 2 },
        text: vec![text.clone()],
        json: json!({"word": a.word, "trunc": a.trunc, "normal_form": text, "terms": terms, "magnus_check": checked}),
    })
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.verb {
        Verb::Collect(a) => collect_verb(a, cli.budget),
        Verb::GammaWeight(a) => {
            let al = alphabet_for(&a.word, a.gens.as_deref())?;
            let w = al.parse_word(&a.word)?;
            let g = gamma_weight(&w, a.trunc);
            Ok(Report::ok(vec![g.to_string()], json!({"word": a.word, "trunc": a.trunc, "weight": g})))
        }
        Verb::Magnus { w: a, modulus } => {
            let al = alphabet_for(&a.word, a.gens.as_deref())?;
            let w = al.parse_word(&a.word)?;
            let ring = modulus.map_or(Ring::Integers, Ring::Mod);
            let s = embed(&w, a.trunc, ring).format(&al);
            Ok(Report::ok(vec![s.clone()], json!({"word": a.word, "trunc": a.trunc, "ring": ring, "series": s})))
        }
        Verb::LayerMatrix { aut, trunc } => {
            let phi = parse_aut(&read(aut)?)?;
            let m = layer_matrix(&phi, *trunc)?;
            let mut text = vec![format!("basis: {}", m.basis.join(", "))];
            text.extend(m.matrix.iter().map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")));
            let verdict = match m.lower_unitriangular {
                Some(true) => "lower unitriangular",
                Some(false) => "NOT lower unitriangular",
                None => "not phi-ordered; triangularity not checked",
            };
            text.push(verdict.into());
            Ok(Report {
                code: if m.lower_unitriangular == Some(false) { 1 } else { 0 },
                text,
                json: serde_json::to_value(&m)?,
            })
        }
        Verb::PQuotient { aut, elems, prime, trunc } => {
            let phi = parse_aut(&read(aut)?)?;
            let s = SuspensionElement::parse_list(elems, phi.alphabet())?;
            let (_, cert) = match prime {
                Some(p) => p_periodic_quotient(&phi, &s, *p, trunc.unwrap_or(phi.rank().max(2)))?,
                None => auto_periodic_quotient(&phi, &s, trunc.unwrap_or(suspension_lab::nilpotent::DEFAULT_MAX_TRUNC))?,
            };
            Ok(Report::ok(cert.to_string().lines().map(String::from).collect(), serde_json::to_value(&cert)?))
        }
        Verb::GogReduce(a) => {
            let g = GraphOfGroups::parse(&read(&a.file)?)?;
            let w = g.parse_word(&a.word)?;
            let r = g.reduce(&w);
            let s = g.format_word(&r);
            Ok(Report::ok(
                vec![s.clone()],
                json!({"word": a.word, "reduced": s, "length": r.len(), "trivial": g.is_trivial(&w)}),
            ))
        }
        Verb::TranslationLength(a) => {
            let g = GraphOfGroups::parse(&read(&a.file)?)?;
            let w = g.parse_word(&a.word)?;
            let (core, c) = g.cyclic_reduction(&w)?;
            let l = g.translation_length(&w)?;
            Ok(Report::ok(
                vec![l.to_string(), format!("core: {}", g.format_word(&core)), format!("conjugator: {}", g.format_word(&c))],
                json!({"word": a.word, "translation_length": l, "core": g.format_word(&core), "conjugator": g.format_word(&c)}),
            ))
        }
        Verb::PtsShort { file, g } => {
            let p = Pts::parse(&read(file)?)?;
            let w = p.gog().parse_word(g)?;
            let shorts = p.short_positions(&w)?;
            let mut text = Vec::new();
            let mut rows = Vec::new();
            for s in &shorts {
                let form = p.format_form(&s.form)?;
                let conj = p.gog().format_word(&s.conjugator);
                text.push(format!("{form}  [controlled {} mod {}; conjugator {conj}]", s.controlled, s.modulus));
                rows.push(json!({"form": form, "rotation": s.rotation, "controlled": s.controlled, "modulus": s.modulus, "conjugator": conj}));
            }
            Ok(Report::ok(text, json!({"g": g, "short_positions": rows})))
        }
        Verb::PtsConjugate { file, g, h } => {
            let p = Pts::parse(&read(file)?)?;
            let gog = p.gog();
            let (gw, hw) = (gog.parse_word(g)?, gog.parse_word(h)?);
            let rep = p.conjugacy(&gw, &hw)?;
            let witness = rep.witness.as_ref().map(|w| gog.format_word(w));
            let mut text = vec![format!("{}: {}", rep.verdict, rep.reason)];
            if let Some(w) = &witness {
                text.push(format!("witness: {w}"));
            }
            text.extend(rep.transcript.iter().map(|l| format!("  {l}")));
            let mut search = Value::Null;
            if let (Some(bound), Verdict::NonConjugate) = (cli.bound, rep.verdict) {
                let (found, tried) = gog.search_conjugator(&gw, &hw, bound);
                let found = found.map(|w| gog.format_word(&w));
                text.push(format!("search to {bound} syllables: {tried} candidates, witness {found:?}"));
                search = json!({"bound": bound, "candidates": tried, "witness": found});
                if found.is_some() {
                    anyhow::bail!("conjugator search contradicts the non-conjugate verdict");
                }
            }
            Ok(Report {
                code: verdict_code(rep.verdict),
                text,
                json: json!({"g": g, "h": h, "verdict": rep.verdict, "reason": rep.reason, "witness": witness, "transcript": rep.transcript, "search": search}),
            })
        }
        Verb::FillingBuild(a) => {
            let (p, spec) = load_fill(a)?;
            let f = FilledGraph::new(p.gog(), &spec)?;
            let checked = f.check_relations(p.gog())?;
            let text = f.graph().to_text();
            Ok(Report::ok(
                vec![text.trim_end().to_string(), format!("relations checked: {checked}")],
                json!({"spec": spec.to_text(), "edge_order": f.edge_order(), "filled_graph": text, "relations_checked": checked}),
            ))
        }
        Verb::FillingVerify { fill, g, h } => {
            let (p, spec) = load_fill(fill)?;
            let (gw, hw) = (p.gog().parse_word(g)?, p.gog().parse_word(h)?);
            let cert = verify_separation(&p, &gw, &hw, &spec)?;
            let mut text = vec![format!("separation {} at N = {}", if cert.passed { "passed" } else { "failed" }, cert.n)];
            text.extend(cert.impermeability.iter().map(|r| format!("  coset {} at {}: |double coset| = {} of {}", r.representative, r.vertex, r.cardinality, r.n_squared)));
            text.extend(cert.congruences.iter().map(|c| {
                format!("  congruence delta {:?} eps {:?} nu {:?} mod {}: {:?}", c.delta, c.epsilon, c.nu, c.n, c.solution)
            }));
            text.push(format!("filled graph verdict: {}", cert.finite_verdict));
            Ok(Report {
                code: if cert.passed { 0 } else { 2 },
                text,
                json: serde_json::to_value(&cert)?,
            })
        }
        Verb::ComputeM { eps, kappa, delta, eps2 } => {
            let cert = compute_m(eps, kappa, delta, *eps2, cli.budget.unwrap_or(1 << 16))?;
            Ok(Report::ok(vec![format!("L = {}, M = {}", cert.l, cert.m)], serde_json::to_value(&cert)?))
        }
    }
}

fn load_fill(a: &FillArgs) -> Result<(Pts, FillingSpec)> {
    let p = Pts::parse(&read(&a.pts)?)?;
    let mut spec = FillingSpec::parse(&read(&a.fill)?)?;
    if let Some(n) = a.order {
        spec = spec.with_order(n);
    }
    Ok((p, spec))
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NotInjective(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("SUSPENSION_LAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().ok();
    }
    let cli = match Cli::try_parse_from(join_verb(std::env::args().collect())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let report = run(&cli).unwrap_or_else(|e| Report {
        code: error_code(&e),
        text: vec![format!("error: {e:#}")],
        json: json!({"error": format!("{e:#}")}),
    });
    let full = json!({"verb": VERBS.iter().find(|v| **v == verb_name(&cli.verb)), "seed": cli.seed, "exit": report.code, "report": report.json});
    if let Some(path) = &cli.out {
        let body = serde_json::to_string_pretty(&full).expect("reports serialize");
        if let Err(e) = std::fs::write(path, body + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&full).expect("reports serialize"));
    } else if report.code == 2 {
        report.text.iter().for_each(|l| eprintln!("{l}"));
    } else {
        report.text.iter().for_each(|l| println!("{l}"));
    }
    ExitCode::from(report.code)
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Collect(_) => "collect",
        Verb::GammaWeight(_) => "gamma-weight",
        Verb::Magnus { .. } => "magnus",
        Verb::LayerMatrix { .. } => "layer-matrix",
        Verb::PQuotient { .. } => "p-quotient",
        Verb::GogReduce(_) => "gog-reduce",
        Verb::TranslationLength(_) => "translation-length",
        Verb::PtsShort { .. } => "pts-short",
        Verb::PtsConjugate { .. } => "pts-conjugate",
        Verb::FillingBuild(_) => "filling-build",
        Verb::FillingVerify { .. } => "filling-verify",
        Verb::ComputeM { .. } => "compute-M",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use suspension_lab::word::Word;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn two_word_verbs_are_joined() {
        assert_eq!(join_verb(args(&["suslab", "pts", "conjugate", "--g", "x"]))[1], "pts-conjugate");
        assert_eq!(join_verb(args(&["suslab", "compute", "M"]))[1], "compute-M");
        assert_eq!(join_verb(args(&["suslab", "collect", "b a"]))[1..], args(&["collect", "b a"]));
    }

    #[test]
    fn default_alphabet_covers_the_word() {
        assert_eq!(alphabet_for("c a", None).unwrap().rank(), 3);
        assert_eq!(alphabet_for("", None).unwrap().rank(), 1);
        assert_eq!(alphabet_for("y", Some("x,y")).unwrap().index_of("y").unwrap(), 1);
    }

    #[test]
    fn word_round_trip() {
        let al = Alphabet::standard(2);
        let w: Word = al.parse_word("a^2 b^-1 a").unwrap();
        assert_eq!(al.parse_word(&al.format_word(&w)).unwrap(), w);
    }
}
