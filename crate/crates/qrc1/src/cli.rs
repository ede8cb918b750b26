//! The `qrc1` command line.
//!
//! Exit codes: `0` success (or `Proved`), `1` negative verdict (rejected proof,
//! inadequate model, `Refuted`, soundness violation), `2` `Exhausted`, `64`
//! usage errors, `65` malformed input, `70` internal invariant violations.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use qrc1_core::calculus::check;
use qrc1_core::gen::{derived_instance, DerivationGen, DerivedRule, FormulaGen};
use qrc1_core::language::{parse_formula, parse_problem, Problem};
use qrc1_core::search::{
    decide, enumerate_countermodels, soundness_check, Countermodel, SearchBounds, SearchOutcome,
};
use qrc1_core::semantics::{sat, AdequacyReport, Assignment, GenBounds, Model, ModelGenerator};
use qrc1_core::{RawModel, RuleTag, Sequent, Signature, VarTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::model_file::ModelFile;
use crate::proof_file::ProofFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Parser)]
#[command(
    name = "qrc1",
    version,
    about = "Proof checker, model checker and bounded decision procedure for QRC1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a proof file and print the sequent it proves.
    Check {
        proof: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula at a world of a model.
    Sat {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        world: usize,
        /// Variable values, as `x=2,y=0`.
        #[arg(long, default_value = "")]
        assign: String,
        /// Value of every variable not listed in `--assign`.
        #[arg(long, default_value_t = 0)]
        default: usize,
        #[arg(long)]
        formula: String,
    },
    /// Report the adequacy conditions of a model, with witnesses.
    Adequate {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for a finite countermodel.
    Countermodel {
        /// A sequent, optionally preceded by `const c.` and `pred P/1.` declarations.
        sequent: String,
        #[command(flatten)]
        bounds: SizeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Interleave proof search and countermodel search.
    Decide {
        sequent: String,
        #[command(flatten)]
        bounds: SizeArgs,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        /// Fresh variables tried when instantiating a universal.
        #[arg(long, default_value_t = 1)]
        max_candidate_terms: usize,
        #[command(flatten)]
        output: OutputArgs,
        /// Accepted for scripts; search always runs on one thread.
        #[arg(long)]
        single_thread: bool,
    },
    /// Run generated derivations of every rule against generated models.
    /// The seed is read from `QRC1_SEED`.
    Soundness {
        #[arg(long, default_value_t = 1000)]
        models: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[arg(long, default_value_t = 4)]
    pub max_worlds: usize,
    #[arg(long, default_value_t = 3)]
    pub max_domain: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Print one JSON object instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the proof (`.qpf`) or countermodel (`.qkm`) to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = panic::catch_unwind(AssertUnwindSafe(|| execute(&cli.command, &mut buf)));
    let _ = out.write_all(&buf);
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(f)) => {
            let _ = writeln!(err, "qrc1: {}", f.message);
            f.code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(err, "qrc1: internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn execute(cmd: &Command, out: &mut Vec<u8>) -> Result<i32, Failure> {
    match cmd {
        Command::Check { proof, json } => cmd_check(proof, *json, out),
        Command::Sat {
            model,
            world,
            assign,
            default,
            formula,
        } => cmd_sat(model, *world, assign, *default, formula, out),
        Command::Adequate { model, json } => cmd_adequate(model, *json, out),
        Command::Countermodel {
            sequent,
            bounds,
            output,
        } => cmd_countermodel(sequent, bounds, output, out),
        Command::Decide {
            sequent,
            bounds,
            max_depth,
            max_candidate_terms,
            output,
            single_thread: _,
        } => {
            let b = SearchBounds {
                max_worlds: bounds.max_worlds,
                max_domain: bounds.max_domain,
                max_proof_depth: *max_depth,
                max_candidate_terms: *max_candidate_terms,
                deadline: timeout(bounds.timeout)?,
            };
            cmd_decide(sequent, &b, output, out)
        }
        Command::Soundness { models, samples } => cmd_soundness(*models, *samples, out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<RawModel, Failure> {
    ModelFile::parse(&read(path)?).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_problem(text: &str) -> Result<Problem, Failure> {
    parse_problem(text).map_err(|e| Failure::data(format!("sequent: {e}")))
}

fn timeout(secs: Option<f64>) -> Result<Option<Duration>, Failure> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|_| Failure::usage(format!("invalid timeout {s}")))
    })
    .transpose()
}

/// `x=2,y=0` at the world of `g`.
fn describe_assignment(g: &Assignment, seq: &Sequent, vars: &VarTable) -> String {
    let parts: Vec<String> = seq
        .free_vars()
        .into_iter()
        .map(|x| {
            let name = qrc1_core::Term::Var(x).display(Some(vars)).to_string();
            format!("{name}={}", g.get(x))
        })
        .collect();
    parts.join(",")
}

fn cmd_check(path: &Path, json: bool, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let loaded = ProofFile::parse(&read(path)?)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let vars = &loaded.vars;
    match check(&loaded.derivation, &loaded.signature) {
        Ok(s) => {
            let text = s.display(Some(vars)).to_string();
            if json {
                emit(out, &json!({ "valid": true, "sequent": text }));
            } else {
                emit_line(out, &text);
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            let text = e.display(Some(vars)).to_string();
            if json {
                let path: Vec<usize> = e.path.clone();
                emit(
                    out,
                    &json!({ "valid": false, "rule": e.rule.name(), "path": path, "error": text }),
                );
            } else {
                emit_line(out, &format!("rejected: {text}"));
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_sat(
    path: &Path,
    world: usize,
    assign: &str,
    default: usize,
    formula: &str,
    out: &mut Vec<u8>,
) -> Result<i32, Failure> {
    let m = load_model(path)?;
    if world >= m.world_count() {
        return Err(Failure::usage(format!("world {world} does not exist")));
    }
    let mut vars = VarTable::new();
    let mut g = Assignment::new(&m, world, default).map_err(|e| Failure::usage(e.to_string()))?;
    for item in assign.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item.split_once('=').ok_or_else(|| {
            Failure::usage(format!("--assign: expected `name=value`, got `{item}`"))
        })?;
        let name = name.trim();
        if m.signature().is_constant(name) {
            return Err(Failure::usage(format!("--assign: `{name}` is a constant")));
        }
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--assign: `{value}` is not an element")))?;
        let x = vars
            .intern(name)
            .map_err(|e| Failure::usage(format!("--assign: {e}")))?;
        g.bind(&m, x, value)
            .map_err(|e| Failure::usage(format!("--assign: {e}")))?;
    }
    let phi = parse_formula(formula, m.signature(), &mut vars)
        .map_err(|e| Failure::data(format!("formula: {e}")))?;
    emit_line(out, if sat(&m, &g, &phi) { "true" } else { "false" });
    Ok(EXIT_OK)
}

fn report_json(r: &AdequacyReport) -> Value {
    json!({
        "adequate": r.is_adequate(),
        "transitive": r.transitive(),
        "transitivityWitness": r.transitivity.map(|(w, u, v)| json!({ "w": w, "u": u, "v": v })),
        "etaFunctorial": r.eta_functorial(),
        "functorialityWitness": r.functoriality.as_ref().map(|f| json!({ "w": f.w, "u": f.u, "v": f.v, "element": f.elem })),
        "etaIdentity": r.eta_identity(),
        "identityWitness": r.identity.map(|(w, d)| json!({ "world": w, "element": d })),
        "concordant": r.concordant(),
        "concordanceWitness": r.concordance.as_ref().map(|c| json!({ "w": c.w, "u": c.u, "constant": c.constant })),
    })
}

fn report_text(r: &AdequacyReport) -> String {
    let line = |name: &str, ok: bool, witness: Option<String>| match witness {
        Some(w) if !ok => format!("{name}: false ({w})\n"),
        _ => format!("{name}: {ok}\n"),
    };
    let mut s = String::new();
    s += &line(
        "transitive",
        r.transitive(),
        r.transitivity
            .map(|(w, u, v)| format!("{w} R {u} and {u} R {v} but not {w} R {v}")),
    );
    s += &line(
        "eta functorial",
        r.eta_functorial(),
        r.functoriality.as_ref().map(|f| {
            format!(
                "eta({w},{v}) and eta({u},{v}) . eta({w},{u}) differ at {d}",
                w = f.w,
                u = f.u,
                v = f.v,
                d = f.elem
            )
        }),
    );
    s += &line(
        "eta identity",
        r.eta_identity(),
        r.identity.map(|(w, d)| format!("eta({w},{w}) moves {d}")),
    );
    s += &line(
        "concordant",
        r.concordant(),
        r.concordance.as_ref().map(|c| {
            format!(
                "{w} R {u} but {c} at {u} is not eta({w},{u}) of {c} at {w}",
                w = c.w,
                u = c.u,
                c = c.constant
            )
        }),
    );
    s += &format!("adequate: {}", r.is_adequate());
    s
}

fn cmd_adequate(path: &Path, json: bool, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let m = load_model(path)?;
    let r = m.check_adequacy();
    if json {
        emit(out, &report_json(&r));
    } else {
        emit_line(out, &report_text(&r));
    }
    Ok(if r.is_adequate() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn budget(deadline: Option<Duration>) -> impl Fn() -> bool {
    let start = Instant::now();
    move || deadline.is_some_and(|d| start.elapsed() >= d)
}

fn countermodel_json(cm: &Countermodel, seq: &Sequent, vars: &VarTable) -> Value {
    let model: Value =
        serde_json::to_value(ModelFile::from_model(&cm.model)).expect("serializable");
    json!({
        "outcome": "refuted",
        "sequent": seq.display(Some(vars)).to_string(),
        "world": cm.world,
        "assignment": describe_assignment(&cm.assignment, seq, vars),
        "default": cm.assignment.default_elem(),
        "model": model,
    })
}

fn report_countermodel(
    cm: &Countermodel,
    seq: &Sequent,
    vars: &VarTable,
    output: &OutputArgs,
    out: &mut Vec<u8>,
) -> Result<(), Failure> {
    if !cm.verify(seq) {
        return Err(Failure::internal("countermodel failed re-verification"));
    }
    let file = ModelFile::from_model(&cm.model).to_json();
    if let Some(path) = &output.output {
        write_file(path, &file)?;
    }
    if output.json {
        emit(out, &countermodel_json(cm, seq, vars));
    } else {
        let assignment = describe_assignment(&cm.assignment, seq, vars);
        let mut head = format!("Refuted at world {}", cm.world);
        if !assignment.is_empty() {
            head += &format!(" with {assignment}");
        }
        emit_line(out, &head);
        emit_line(out, &file);
    }
    Ok(())
}

fn cmd_countermodel(
    text: &str,
    size: &SizeArgs,
    output: &OutputArgs,
    out: &mut Vec<u8>,
) -> Result<i32, Failure> {
    let p = load_problem(text)?;
    let bounds = SearchBounds {
        max_worlds: size.max_worlds,
        max_domain: size.max_domain,
        deadline: timeout(size.timeout)?,
        ..SearchBounds::default()
    };
    match enumerate_countermodels(&p.signature, &p.sequent, &bounds, &budget(bounds.deadline)) {
        Ok(Some(cm)) => {
            report_countermodel(&cm, &p.sequent, &p.vars, output, out)?;
            Ok(EXIT_NEGATIVE)
        }
        Ok(None) => {
            let msg = format!(
                "no countermodel up to {} worlds and {} elements",
                size.max_worlds, size.max_domain
            );
            if output.json {
                emit(
                    out,
                    &json!({ "outcome": "exhausted", "timedOut": false, "message": msg }),
                );
            } else {
                emit_line(out, &format!("Exhausted: {msg}"));
            }
            Ok(EXIT_EXHAUSTED)
        }
        Err(_) => {
            if output.json {
                emit(out, &json!({ "outcome": "exhausted", "timedOut": true }));
            } else {
                emit_line(out, "Exhausted: timed out");
            }
            Ok(EXIT_EXHAUSTED)
        }
    }
}

fn cmd_decide(
    text: &str,
    bounds: &SearchBounds,
    output: &OutputArgs,
    out: &mut Vec<u8>,
) -> Result<i32, Failure> {
    let p = load_problem(text)?;
    let seq_text = p.sequent.display(Some(&p.vars)).to_string();
    match decide(&p.signature, &p.sequent, bounds, &budget(bounds.deadline)) {
        SearchOutcome::Proved(proof) => {
            match check(&proof.derivation, &proof.signature) {
                Ok(s) if s == p.sequent => {}
                _ => return Err(Failure::internal("proof failed re-checking")),
            }
            let file = ProofFile::encode(&proof.derivation, &proof.signature, &p.vars);
            if let Some(path) = &output.output {
                write_file(path, &file.to_json())?;
            }
            if output.json {
                let proof: Value = serde_json::to_value(&file).expect("serializable");
                emit(
                    out,
                    &json!({ "outcome": "proved", "sequent": seq_text, "proof": proof }),
                );
            } else {
                emit_line(out, &format!("Proved: {seq_text}"));
                emit_line(out, &file.to_json());
            }
            Ok(EXIT_OK)
        }
        SearchOutcome::Refuted(cm) => {
            report_countermodel(&cm, &p.sequent, &p.vars, output, out)?;
            Ok(EXIT_NEGATIVE)
        }
        SearchOutcome::Exhausted(e) => {
            if output.json {
                emit(
                    out,
                    &json!({
                        "outcome": "exhausted",
                        "sequent": seq_text,
                        "depth": e.depth,
                        "worlds": e.worlds,
                        "domain": e.domain,
                        "timedOut": e.timed_out,
                    }),
                );
            } else {
                let why = if e.timed_out {
                    "timed out"
                } else {
                    "bounds reached"
                };
                emit_line(
                    out,
                    &format!(
                        "Exhausted ({why}): no proof up to depth {}, no countermodel up to {} worlds and {} elements",
                        e.depth, e.worlds, e.domain
                    ),
                );
            }
            Ok(EXIT_EXHAUSTED)
        }
    }
}

/// Two constants and two predicates of arity at most two.
pub fn soundness_signature() -> Signature {
    Signature::new()
        .with_constant("c")
        .and_then(|s| s.with_constant("d"))
        .and_then(|s| s.with_predicate("P", 1))
        .and_then(|s| s.with_predicate("S", 2))
        .expect("fixed signature")
}

fn cmd_soundness(models: usize, samples: usize, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let seed = match std::env::var("QRC1_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::usage(format!("QRC1_SEED: `{s}` is not a number")))?,
        Err(_) => 0,
    };
    let sig = soundness_signature();
    let gen = DerivationGen::new(FormulaGen::new(&sig, 3, 3), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Model> = ModelGenerator::new(&sig, GenBounds::default(), seed)
        .take(models)
        .collect();
    let mut failed = false;
    let mut run = |name: &str, d: qrc1_core::Derivation, i: u64| -> Result<(), Failure> {
        match soundness_check(&d, &sig, &pool, samples, seed ^ i) {
            Ok(None) => {
                emit_line(out, &format!("{name}: ok"));
                Ok(())
            }
            Ok(Some(v)) => {
                failed = true;
                emit_line(
                    out,
                    &format!(
                        "{name}: VIOLATION of {} at model {} world {}",
                        v.sequent, v.model, v.world
                    ),
                );
                Ok(())
            }
            Err(e) => Err(Failure::internal(format!(
                "{name}: generated derivation rejected: {e}"
            ))),
        }
    };
    for (i, tag) in RuleTag::ALL.into_iter().enumerate() {
        let d = gen.rooted_at(&mut rng, tag);
        run(tag.name(), d, i as u64)?;
    }
    for (i, rule) in DerivedRule::ALL.into_iter().enumerate() {
        let (d, _) = derived_instance(&mut rng, &gen, rule);
        run(rule.name(), d, 100 + i as u64)?;
    }
    emit_line(
        out,
        &format!(
            "seed {seed}, {} models, {samples} assignments per world",
            pool.len()
        ),
    );
    Ok(if failed { EXIT_NEGATIVE } else { EXIT_OK })
}

fn emit(out: &mut Vec<u8>, v: &Value) {
    emit_line(out, &serde_json::to_string_pretty(v).expect("serializable"));
}

fn emit_line(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(s.as_bytes());
    out.push(b'\n');
}
