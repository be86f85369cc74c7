//! `mixid`: command-line front end over `mixid-core`.
//!
//! Every subcommand prints one JSON document (or an aligned table with
//! `--pretty`). Exit codes: 0 success, 1 domain error, 2 usage error.

mod pretty;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use mixid_core::identity::{
    enumerate_group, is_mixed_identity, shortest_identity_search, GroupWord, SearchConfig, SearchMode, SmallGroup,
};
use mixid_core::io::{
    matrix_to_json, parse_rational, rational_to_string, ConstantTable, ConstantsFile, FieldSpecJson, MatrixFile, TupleFile, VectorsFile,
};
use mixid_core::linalg::{field_make, Field, Matrix};
use mixid_core::words::{self, dsl, Word};
use mixid_core::{image, selftest, seminorm, tower, witness, Error, LinearGroup};

pub use pretty::render_pretty;

/// Environment variable that overrides `--workers` when the flag is absent.
pub const WORKERS_ENV: &str = "MIXID_WORKERS";

const MAX_SAMPLES: usize = 1 << 20;
const MAX_WORKERS: usize = 256;
const MAX_SEARCH_LENGTH: usize = 16;
const MAX_R: usize = 8;

#[derive(Parser, Debug, Clone)]
#[command(name = "mixid", version, about = "Word maps, mixed identities and rank metrics over finite linear groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Word in the constants DSL, e.g. `c*x1*d*x1^-1`.
    #[arg(long, global = true, value_name = "FILE")]
    pub word: Option<PathBuf>,
    /// Named constants referenced by the word.
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,
    /// Single matrix (`norm`).
    #[arg(long, global = true, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Tuple of matrices substituted for x1..xr (`eval`).
    #[arg(long, global = true, value_name = "FILE")]
    pub tuple: Option<PathBuf>,
    /// Source and target vectors (`witness`).
    #[arg(long, global = true, value_name = "FILE")]
    pub vectors: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub group: Option<GroupArg>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true)]
    pub e: Option<u32>,
    /// Number of variables; defaults to the largest index used.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Evaluation budget for `search-identity`.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub max_length: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Search every word instead of one per symmetry orbit.
    #[arg(long, global = true)]
    pub no_prune: bool,
    /// Perturbation size for `aq-demo`, as `a/b`.
    #[arg(long, global = true, value_name = "RATIONAL")]
    pub epsilon: Option<String>,
    /// Inclusive level range for `aq-demo`, as `A..B`.
    #[arg(long, global = true, value_name = "A..B")]
    pub levels: Option<String>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Resume file for `search-identity`.
    #[arg(long, global = true, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    /// Record wall time in search reports (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    #[arg(long, global = true)]
    pub pretty: bool,
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evaluate a word on a tuple of matrices.
    Eval,
    /// Reduce a word to normal form.
    Reduce,
    /// Split inner indices into J0, J+, J- and report reducedness.
    Classify,
    /// Projective rank norm of a matrix.
    Norm,
    /// Critical length of a reduced word.
    CritLength,
    /// Build group elements realizing prescribed vector images.
    Witness,
    /// Diameter bounds for the image of a word map.
    Diameter,
    /// Decide whether a word is a mixed identity of a small group.
    CheckIdentity,
    /// Exhaustive search for the shortest mixed identity.
    SearchIdentity,
    /// Levelwise image floors along the diagonal tower.
    AqDemo,
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupArg {
    Gl,
    Sl,
    Psl,
}

impl From<GroupArg> for LinearGroup {
    fn from(g: GroupArg) -> LinearGroup {
        match g {
            GroupArg::Gl => LinearGroup::Gl,
            GroupArg::Sl => LinearGroup::Sl,
            GroupArg::Psl => LinearGroup::Psl,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    All,
    NonsingularOnly,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> SearchMode {
        match m {
            ModeArg::All => SearchMode::All,
            ModeArg::NonsingularOnly => SearchMode::NonsingularOnly,
        }
    }
}

/// Fully resolved invocation: flags plus the worker override.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub word: Option<PathBuf>,
    pub constants: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub tuple: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub group: Option<LinearGroup>,
    pub n: Option<usize>,
    pub p: Option<u64>,
    pub e: Option<u32>,
    pub r: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub budget: Option<u64>,
    pub max_length: Option<usize>,
    pub mode: SearchMode,
    pub pruned: bool,
    pub epsilon: Option<String>,
    pub levels: Option<String>,
    /// `None` when neither the flag nor the environment override is set.
    pub workers: Option<String>,
    pub checkpoint: Option<PathBuf>,
    pub timing: bool,
    pub pretty: bool,
    pub out: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> RunConfig {
        let workers = cli.workers.map(|w| w.to_string()).or_else(|| std::env::var(WORKERS_ENV).ok());
        RunConfig {
            command: cli.command,
            word: cli.word,
            constants: cli.constants,
            matrix: cli.matrix,
            tuple: cli.tuple,
            vectors: cli.vectors,
            group: cli.group.map(LinearGroup::from),
            n: cli.n,
            p: cli.p,
            e: cli.e,
            r: cli.r,
            seed: cli.seed,
            samples: cli.samples,
            budget: cli.budget,
            max_length: cli.max_length,
            mode: cli.mode.map(SearchMode::from).unwrap_or(SearchMode::All),
            pruned: !cli.no_prune,
            epsilon: cli.epsilon,
            levels: cli.levels,
            workers,
            checkpoint: cli.checkpoint,
            timing: cli.timing,
            pretty: cli.pretty,
            out: cli.out,
        }
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    /// A domain error that still produced a report worth printing.
    #[error("{error}")]
    Partial { error: Error, report: Value },
    #[error("{message}")]
    Failed { kind: &'static str, message: String, report: Value },
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cfg: RunConfig) -> Outcome {
    match dispatch(&cfg) {
        Ok(report) => match emit(&cfg, &report) {
            Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
            Err(e) => error_outcome(&cfg, e),
        },
        Err(e) => error_outcome(&cfg, e),
    }
}

fn error_outcome(cfg: &RunConfig, err: CliError) -> Outcome {
    let body = match err {
        CliError::Usage(msg) => {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") };
        }
        CliError::Domain(e) => json!({"error": {"kind": e.kind(), "message": e.to_string()}}),
        CliError::Partial { error, report } => {
            json!({"error": {"kind": error.kind(), "message": error.to_string()}, "partial_report": report})
        }
        CliError::Failed { kind, message, report } => {
            json!({"error": {"kind": kind, "message": message}, "report": report})
        }
    };
    let stdout = render(cfg, &body);
    let stderr = format!("error: {}\n", body["error"]["message"].as_str().unwrap_or_default());
    Outcome { code: 1, stdout, stderr }
}

fn render(cfg: &RunConfig, v: &Value) -> String {
    if cfg.pretty {
        render_pretty(v)
    } else {
        let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
        s.push('\n');
        s
    }
}

/// Writes the report to `--out` (leaving stdout empty) or returns it.
fn emit(cfg: &RunConfig, report: &Value) -> CliResult<String> {
    let text = render(cfg, report);
    match &cfg.out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn dispatch(cfg: &RunConfig) -> CliResult<Value> {
    match cfg.command {
        Command::Eval => cmd_eval(cfg),
        Command::Reduce => cmd_reduce(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Norm => cmd_norm(cfg),
        Command::CritLength => cmd_crit_length(cfg),
        Command::Witness => cmd_witness(cfg),
        Command::Diameter => cmd_diameter(cfg),
        Command::CheckIdentity => cmd_check_identity(cfg),
        Command::SearchIdentity => cmd_search_identity(cfg),
        Command::AqDemo => cmd_aq_demo(cfg),
        Command::Selftest => cmd_selftest(cfg),
    }
}

// ---- input helpers

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn required<'a, T>(value: &'a Option<T>, flag: &str, cmd: &str) -> CliResult<&'a T> {
    value.as_ref().ok_or_else(|| usage(format!("{cmd} requires {flag}")))
}

fn seed(cfg: &RunConfig, cmd: &str) -> CliResult<u64> {
    required(&cfg.seed, "--seed (randomized command)", cmd).copied()
}

fn field_from_flags(cfg: &RunConfig, cmd: &str) -> CliResult<Field> {
    let p = *required(&cfg.p, "--p", cmd)?;
    Ok(field_make(p, cfg.e.unwrap_or(1))?)
}

/// Rejects flags that contradict a file's field or dimension.
fn check_flags_agree(cfg: &RunConfig, field: &Field, n: usize, what: &str) -> CliResult<()> {
    let spec = FieldSpecJson::of(field);
    if cfg.p.is_some_and(|p| p != spec.p) || cfg.e.is_some_and(|e| e != spec.e) || cfg.n.is_some_and(|m| m != n) {
        return Err(Error::Validation(format!(
            "{what} is over F_{}^{} with n = {n}, which contradicts the command-line flags",
            spec.p, spec.e
        ))
        .into());
    }
    Ok(())
}

fn load_table(cfg: &RunConfig, cmd: &str) -> CliResult<ConstantTable> {
    match &cfg.constants {
        Some(path) => {
            let table = read_json::<ConstantsFile>(path)?.to_table()?;
            check_flags_agree(cfg, &table.field, table.n, "constants file")?;
            Ok(table)
        }
        None => {
            let field = field_from_flags(cfg, cmd)?;
            let n = *required(&cfg.n, "--n (or --constants)", cmd)?;
            Ok(ConstantTable::empty(&field, n))
        }
    }
}

fn load_word_with(cfg: &RunConfig, table: &ConstantTable, cmd: &str) -> CliResult<Word> {
    let path = required(&cfg.word, "--word", cmd)?;
    if let Some(r) = cfg.r {
        check_r(r)?;
    }
    Ok(dsl::parse_word(&read_text(path)?, table, cfg.r)?)
}

fn load_word(cfg: &RunConfig, cmd: &str) -> CliResult<Word> {
    let table = load_table(cfg, cmd)?;
    load_word_with(cfg, &table, cmd)
}

fn check_r(r: usize) -> CliResult<()> {
    if r == 0 || r > MAX_R {
        return Err(Error::Validation(format!("r = {r} outside 1..={MAX_R}")).into());
    }
    Ok(())
}

fn samples(cfg: &RunConfig, default: usize) -> CliResult<usize> {
    let s = cfg.samples.unwrap_or(default);
    if s == 0 || s > MAX_SAMPLES {
        return Err(Error::Validation(format!("samples = {s} outside 1..={MAX_SAMPLES}")).into());
    }
    Ok(s)
}

fn workers(cfg: &RunConfig) -> CliResult<usize> {
    let Some(raw) = &cfg.workers else { return Ok(1) };
    let w: usize = raw.trim().parse().map_err(|_| usage(format!("invalid worker count {raw:?}")))?;
    if w == 0 || w > MAX_WORKERS {
        return Err(Error::Validation(format!("workers = {w} outside 1..={MAX_WORKERS}")).into());
    }
    Ok(w)
}

fn parse_levels(text: &str) -> CliResult<(u32, u32)> {
    let bad = || usage(format!("--levels expects A..B, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Error::Validation(format!("empty level range {a}..{b}")).into());
    }
    Ok((a, b))
}

fn field_json(field: &Field) -> Value {
    serde_json::to_value(FieldSpecJson::of(field)).expect("field spec serializes")
}

fn matrix_value(m: &Matrix) -> Value {
    serde_json::to_value(matrix_to_json(m)).expect("matrix serializes")
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Word text plus the constants it needs, in the DSL's own schema.
fn word_value(w: &Word) -> Value {
    let (text, table) = dsl::to_text(w);
    json!({"text": text, "constants": to_value(&table.to_file().constants)})
}

// ---- subcommands

fn cmd_eval(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "eval")?;
    let path = required(&cfg.tuple, "--tuple", "eval")?;
    let tuple: TupleFile = read_json(path)?;
    let (field, hs) = tuple.to_matrices()?;
    if field != *w.field() || tuple.n != w.n() {
        let ws = FieldSpecJson::of(w.field());
        return Err(Error::Validation(format!(
            "tuple is over F_{}^{} with n = {}, word is over F_{}^{} with n = {}",
            tuple.field.p,
            tuple.field.e,
            tuple.n,
            ws.p,
            ws.e,
            w.n()
        ))
        .into());
    }
    let value = words::evaluate(&w, &hs)?;
    Ok(json!({
        "field": field_json(&field),
        "n": w.n(),
        "word": w.to_string(),
        "value": matrix_value(&value),
    }))
}

fn cmd_reduce(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "reduce")?;
    let reduced = words::reduce(&w);
    Ok(json!({
        "field": field_json(w.field()),
        "n": w.n(),
        "r": w.r(),
        "input_length": w.len(),
        "length": reduced.len(),
        "changed": reduced != w,
        "reduced": word_value(&reduced),
        "singular": words::is_singular(&reduced),
        "strong": words::is_strong(&reduced),
    }))
}

fn cmd_classify(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "classify")?;
    let cls = words::classify_indices(&w);
    let red = words::is_reduced(&w);
    Ok(json!({
        "length": w.len(),
        "classification": to_value(&cls),
        "reduced": red.reduced,
        "offending": red.offending.iter().map(|(j, why)| json!({"index": j, "reason": why})).collect::<Vec<_>>(),
        "singular": words::is_singular(&w),
        "strong": red.reduced && words::is_strong(&w),
    }))
}

fn cmd_norm(cfg: &RunConfig) -> CliResult<Value> {
    let path = required(&cfg.matrix, "--matrix", "norm")?;
    let m = read_json::<MatrixFile>(path)?.to_matrix()?;
    check_flags_agree(cfg, m.field(), m.rows(), "matrix file")?;
    let norm = seminorm::projective_norm(&m)?;
    Ok(json!({
        "projective_norm": norm,
        "n": m.rows(),
        "normalized": format!("{}/{}", norm, m.rows()),
        "scalar": norm == 0,
    }))
}

fn cmd_crit_length(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "crit-length")?;
    let crit = seminorm::critical_length(&w)?;
    let cls = words::classify_indices(&w);
    let norms = cls
        .jminus
        .iter()
        .map(|&j| Ok(json!({"index": j, "norm": seminorm::projective_norm(w.constant(j))?})))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(json!({
        "critical_length": crit,
        "length": w.len(),
        "n": w.n(),
        "critical_norms": norms,
    }))
}

fn cmd_witness(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "witness")?;
    let seed = seed(cfg, "witness")?;
    let group = cfg.group.unwrap_or(LinearGroup::Gl);
    let path = required(&cfg.vectors, "--vectors", "witness")?;
    let vf: VectorsFile = read_json(path)?;
    let (field, sources, targets) = vf.to_vectors()?;
    if field != *w.field() || vf.n != w.n() {
        return Err(Error::Validation("vectors file and word live over different spaces".into()).into());
    }
    let result = witness::construct_witness(&w, &sources, &targets, group, seed)?;
    Ok(json!({
        "group": result.group.to_string(),
        "field": field_json(&field),
        "n": w.n(),
        "seed": seed,
        "verified": true,
        "h": result.h.iter().map(matrix_value).collect::<Vec<_>>(),
        "trace": result.trace.to_json(),
    }))
}

fn cmd_diameter(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "diameter")?;
    let seed = seed(cfg, "diameter")?;
    let samples = samples(cfg, 32)?;
    Ok(to_value(&image::diameter_report(&w, samples, seed)?))
}

fn small_group(cfg: &RunConfig, cmd: &str) -> CliResult<SmallGroup> {
    let kind = *required(&cfg.group, "--group", cmd)?;
    let n = *required(&cfg.n, "--n", cmd)?;
    let field = field_from_flags(cfg, cmd)?;
    Ok(enumerate_group(kind, n, field.q() as u64)?)
}

fn element_table(g: &SmallGroup, indices: impl IntoIterator<Item = u32>) -> Value {
    let mut seen: Vec<u32> = indices.into_iter().collect();
    seen.sort_unstable();
    seen.dedup();
    let map: serde_json::Map<String, Value> =
        seen.into_iter().map(|i| (format!("g{i}"), matrix_value(g.element(i)))).collect();
    Value::Object(map)
}

fn cmd_check_identity(cfg: &RunConfig) -> CliResult<Value> {
    let g = small_group(cfg, "check-identity")?;
    let table = match &cfg.constants {
        Some(_) => load_table(cfg, "check-identity")?,
        None => ConstantTable::empty(g.field(), g.n()),
    };
    let w = load_word_with(cfg, &table, "check-identity")?;
    let gw = GroupWord::from_word(&w, &g)?;
    let check = is_mixed_identity(&gw, &g)?;
    let counterexample = check.counterexample.as_ref().map(|t| t.iter().map(|&i| matrix_value(g.element(i))).collect::<Vec<_>>());
    Ok(json!({
        "group": g.to_string(),
        "order": g.order(),
        "word": gw.text(&g),
        "elements": element_table(&g, gw.constants.iter().copied()),
        "singular": gw.is_singular(),
        "holds": check.holds,
        "evaluations": check.evaluations,
        "counterexample": counterexample,
    }))
}

fn cmd_search_identity(cfg: &RunConfig) -> CliResult<Value> {
    let g = small_group(cfg, "search-identity")?;
    let max_length = *required(&cfg.max_length, "--max-length", "search-identity")?;
    if max_length == 0 || max_length > MAX_SEARCH_LENGTH {
        return Err(Error::Validation(format!("max length {max_length} outside 1..={MAX_SEARCH_LENGTH}")).into());
    }
    let r = cfg.r.unwrap_or(1);
    check_r(r)?;
    let mut sc = SearchConfig::new(r, max_length, cfg.mode);
    sc.pruned = cfg.pruned;
    sc.budget = cfg.budget;
    sc.workers = workers(cfg)?;
    sc.checkpoint = cfg.checkpoint.clone();
    sc.timing = cfg.timing;
    let report = shortest_identity_search(&g, &sc)?;
    let elements = element_table(&g, report.identities.iter().flat_map(|id| id.constants.iter().copied()));
    let mut value = to_value(&report);
    value["elements"] = elements;
    match report.into_result() {
        Ok(_) => Ok(value),
        Err(error) => Err(CliError::Partial { error, report: value }),
    }
}

fn cmd_aq_demo(cfg: &RunConfig) -> CliResult<Value> {
    let w = load_word(cfg, "aq-demo")?;
    let levels = required(&cfg.levels, "--levels", "aq-demo")?;
    let (a, b) = parse_levels(levels)?;
    let epsilon = cfg.epsilon.as_deref().map(parse_rational).transpose()?;
    let seed = match &epsilon {
        Some(_) => seed(cfg, "aq-demo with --epsilon")?,
        None => cfg.seed.unwrap_or(0),
    };
    let reports = tower::level_sweep(&w, a..=b, epsilon.as_ref(), seed)?;
    Ok(json!({
        "word": w.to_string(),
        "base_dim": w.n(),
        "epsilon": epsilon.as_ref().map(rational_to_string),
        "seed": epsilon.as_ref().map(|_| seed),
        "levels": to_value(&reports),
    }))
}

fn cmd_selftest(cfg: &RunConfig) -> CliResult<Value> {
    let seed = seed(cfg, "selftest")?;
    let report = selftest::run_selftest(seed)?;
    let value = to_value(&report);
    if report.passed {
        Ok(value)
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| c.failures > 0).map(|c| c.name.as_str()).collect();
        Err(CliError::Failed {
            kind: "SelftestFailed",
            message: format!("failing checks: {}", failed.join(", ")),
            report: value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let mut full = vec!["mixid"];
        full.extend_from_slice(args);
        RunConfig::from(Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn levels_parse() {
        assert_eq!(parse_levels("1..5").unwrap(), (1, 5));
        assert!(matches!(parse_levels("3"), Err(CliError::Usage(_))));
        assert!(matches!(parse_levels("4..2"), Err(CliError::Domain(Error::Validation(_)))));
    }

    #[test]
    fn missing_seed_is_usage_error() {
        let out = run(parse(&["selftest"]));
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("--seed"));
    }

    #[test]
    fn domain_error_json() {
        let out = run(parse(&["search-identity", "--group", "gl", "--n", "2", "--p", "4", "--max-length", "2"]));
        assert_eq!(out.code, 1);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["error"]["kind"], "NonPrime");
    }

    #[test]
    fn workers_flag_wins() {
        let cfg = parse(&["selftest", "--workers", "3"]);
        assert_eq!(workers(&cfg).unwrap(), 3);
    }
}
