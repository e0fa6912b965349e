//! The `pgo` command line. Reports are JSON by default; `--table` prints
//! flattened `key: value` lines instead.
//!
//! Exit codes: 0 success, 1 domain error (or a failed check), 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::acceptance;
use crate::catalog::{self, CatalogError, GradedDescriptor};
use crate::diagram::{DiagramError, WeightedSatakeDiagram};
use crate::fixtures::fixture;
use crate::orbits::{self, character_data, OrbitError};
use crate::padic::{PadicContext, PadicError, Q};
use crate::qform::{self, QForm, QFormError};
use crate::realizations::*;
use crate::with_model;

#[derive(Debug, Parser)]
#[command(name = "pgo", version, about = "Orbits and relative invariants of graded Lie algebras over Q_p")]
pub struct Cli {
    /// Odd prime p of the base field Q_p.
    #[arg(long, global = true, env = "PGO_PRIME", default_value_t = 5)]
    pub prime: u64,
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Emit flattened `key: value` lines.
    #[arg(long, global = true)]
    pub table: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a weighted Satake diagram (or re-check an emitted descriptor).
    Classify(ClassifyArgs),
    /// Quadratic forms over Q_p.
    #[command(subcommand)]
    Qform(QformCommand),
    /// Orbits of a matrix model.
    #[command(subcommand)]
    Orbit(OrbitCommand),
    /// Relative invariants of a matrix model.
    #[command(subcommand)]
    Invariants(InvariantsCommand),
    /// Every catalog instance up to a diagram size, with its orbit summary.
    Enumerate {
        /// Largest diagram size (number of simple roots).
        #[arg(long, default_value_t = 8)]
        max_size: i64,
    },
    /// Run the acceptance suite; exits 1 if any criterion fails.
    Selftest {
        #[arg(long, default_value_t = 20240917)]
        seed: u64,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["diagram", "descriptor"])))]
pub struct ClassifyArgs {
    /// Diagram JSON file; a bundled fixture name also works.
    #[arg(long)]
    pub diagram: Option<PathBuf>,
    /// A descriptor, or a report emitted by `classify`.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum QformCommand {
    /// Invariants of the diagonal form with the given coefficients.
    Classify {
        /// Comma-separated coefficients: `1`, `u`, `pi`, `upi`, rationals; `0` adds to the radical.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model tag: gl, sp, unitary, type3, ortho1.
    #[arg(long)]
    pub tag: Tag,
    /// Rank k+1 of the model (matrix size for gl, sp, unitary).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum OrbitCommand {
    /// Orbit invariant and canonical representative of an element.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Distinct orbit classes over the diagonal grid.
    Enumerate(ModelArgs),
}

#[derive(Debug, Subcommand)]
pub enum InvariantsCommand {
    /// Values of Δ_0..Δ_k, square classes and the P-orbit class.
    Eval {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Checks ∇_j(ψ(X))·Δ_0(X) = Δ_{k+1-j}(X) on one element or on random samples.
    PsiCheck {
        #[arg(long, conflicts_with_all = ["tag", "n"])]
        matrix: Option<PathBuf>,
        #[arg(long, required_unless_present = "matrix")]
        tag: Option<Tag>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    QForm(#[from] QFormError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// A successful report, plus whether the command's check passed.
pub struct Output {
    pub report: Value,
    pub ok: bool,
}

impl From<Value> for Output {
    fn from(report: Value) -> Self {
        Output { report, ok: true }
    }
}

/// Parses `argv`, runs the command and prints the report; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(out) => {
            // A closed pipe (`pgo ... | head`) is not an error.
            let _ = writeln!(std::io::stdout(), "{}", render(&out.report, cli.table));
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ctx = PadicContext::new(cli.prime).map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Classify(a) => classify(a).map(Into::into),
        Command::Qform(QformCommand::Classify { coeffs }) => qform_classify(ctx, coeffs).map(Into::into),
        Command::Orbit(OrbitCommand::Classify { matrix }) => {
            let (model, input) = load_matrix(matrix, ctx)?;
            with_model!(&model, m => orbit_classify(m, &input.entries)).map(Into::into)
        }
        Command::Orbit(OrbitCommand::Enumerate(a)) => {
            let model = AnyModel::new(a.tag, a.n, ctx)?;
            with_model!(&model, m => orbit_enumerate(m)).map(Into::into)
        }
        Command::Invariants(InvariantsCommand::Eval { matrix }) => {
            let (model, input) = load_matrix(matrix, ctx)?;
            with_model!(&model, m => invariants_eval(m, &input.entries)).map(Into::into)
        }
        Command::Invariants(InvariantsCommand::PsiCheck { matrix, tag, n, samples, seed }) => match (matrix, tag) {
            (Some(path), _) => {
                let (model, input) = load_matrix(path, ctx)?;
                with_model!(&model, m => psi_check_one(m, &input.entries))
            }
            (None, Some(tag)) => {
                let model = AnyModel::new(*tag, *n, ctx)?;
                with_model!(&model, m => psi_check_random(m, *samples, *seed))
            }
            (None, None) => Err(CliError::Usage("psi-check needs --matrix or --tag".into())),
        },
        Command::Enumerate { max_size } => enumerate_catalog(*max_size).map(Into::into),
        Command::Selftest { seed, only } => Ok(selftest(cli.prime, *seed, only)),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn read_diagram(path: &Path) -> Result<String, CliError> {
    match read(path) {
        Ok(t) => Ok(t),
        Err(e) => path.file_name().and_then(|f| fixture(&f.to_string_lossy())).map(str::to_string).ok_or(e),
    }
}

fn classification_report(desc: &GradedDescriptor) -> Result<Value, CliError> {
    let summary = orbits::summary(desc)?;
    Ok(json!({
        "descriptor": desc,
        "rank": desc.rank(),
        "dim_vplus": catalog::dim_vplus(desc)?,
        "summary": summary,
        "character": character_data(desc),
    }))
}

fn classify(a: &ClassifyArgs) -> Result<Value, CliError> {
    let desc = if let Some(path) = &a.diagram {
        let d = WeightedSatakeDiagram::parse(&read_diagram(path)?)?;
        catalog::lookup(&d)?
    } else {
        let path = a.descriptor.as_ref().expect("clap enforces one input");
        let v: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::Json(e.to_string()))?;
        let inner = v.get("descriptor").cloned().unwrap_or(v);
        let given: GradedDescriptor = serde_json::from_value(inner).map_err(|e| CliError::Json(e.to_string()))?;
        let fresh = catalog::row(&given.case_id)?.descriptor(&given.params)?;
        if fresh != given {
            return Err(CliError::CheckFailed(format!(
                "descriptor disagrees with catalog row {} at {:?}",
                given.case_id, given.params
            )));
        }
        fresh
    };
    classification_report(&desc)
}

fn qform_classify(ctx: PadicContext, coeffs: &[String]) -> Result<Value, CliError> {
    let values = coeffs.iter().map(|t| ctx.parse_scalar(t)).collect::<Result<Vec<Q>, _>>()?;
    let form = QForm::from_diagonal(&values);
    let mut report = json!({
        "prime": ctx.p(),
        "rank": form.rank(),
        "radical_dim": form.radical_dim(),
        "classes": form.classes(&ctx),
    });
    if form.rank() > 0 {
        let witt = qform::witt_decompose(&ctx, &form);
        let rep = qform::represented_classes(&ctx, &form);
        let extra = json!({
            "discriminant": qform::discriminant(&ctx, &form)?,
            "hasse": qform::hasse_invariant(&ctx, &form)?,
            "isotropic": qform::is_isotropic(&ctx, &form),
            "anisotropic": !qform::is_isotropic(&ctx, &form),
            "witt_index": witt.witt_index,
            "anisotropic_kernel": witt.anisotropic_kernel,
            "similarity_class": qform::similarity_class_id(&ctx, &form),
            "represented_classes": rep.classes,
        });
        merge(&mut report, extra);
    }
    Ok(report)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn load_matrix(path: &Path, default_ctx: PadicContext) -> Result<(AnyModel, MatrixInput), CliError> {
    let input: MatrixInput = serde_json::from_str(&read(path)?).map_err(|e| CliError::Json(e.to_string()))?;
    let ctx = match input.prime {
        Some(p) => PadicContext::new(p)?,
        None => default_ctx,
    };
    let rank = infer_rank(&input)?;
    Ok((AnyModel::new(input.tag, rank, ctx)?, input))
}

fn infer_rank(input: &MatrixInput) -> Result<usize, CliError> {
    let rows = input.entries.len();
    Ok(match input.tag {
        Tag::Ortho1 => 1,
        Tag::Type3 if rows.is_multiple_of(2) && rows > 0 => rows / 2,
        Tag::Type3 => return Err(RealizationError::Parse("type3 matrices have even size".into()).into()),
        _ => rows,
    })
}

fn orbit_classify<M: JsonElem>(m: &M, entries: &[Value]) -> Result<Value, CliError> {
    let x = m.parse_elem(entries)?;
    let inv = m.orbit_invariants(&x);
    let rep = representative(m, &inv)?;
    Ok(json!({
        "tag": m.tag(),
        "prime": m.ctx().p(),
        "rank_of_model": m.k() + 1,
        "invariant": inv,
        "open": inv.rank == m.k() + 1,
        "representative": m.elem_to_json(&rep),
    }))
}

fn orbit_enumerate<M: JsonElem>(m: &M) -> Result<Value, CliError> {
    let classes = enumerate_orbit_classes(m);
    let desc = m.descriptor()?;
    let mut list = Vec::new();
    for inv in classes.iter().filter(|c| c.rank > 0) {
        list.push(json!({ "invariant": inv, "representative": m.elem_to_json(&representative(m, inv)?) }));
    }
    let open = classes.iter().filter(|c| c.rank == m.k() + 1).count();
    Ok(json!({
        "tag": m.tag(),
        "prime": m.ctx().p(),
        "rank_of_model": m.k() + 1,
        "descriptor": desc,
        "nonzero_classes": list.len(),
        "open_classes": open,
        "predicted_nonzero": orbits::nonzero_orbit_count(&desc).ok(),
        "predicted_open": orbits::open_orbit_count(&desc).ok(),
        "classes": list,
    }))
}

fn q_str(x: &Q) -> String {
    x.to_string()
}

fn invariants_eval<M: JsonElem>(m: &M, entries: &[Value]) -> Result<Value, CliError> {
    let x = m.parse_elem(entries)?;
    let ctx = *m.ctx();
    let deltas = (0..=m.k()).map(|j| m.delta(j, &x)).collect::<Result<Vec<Q>, _>>()?;
    let classes: Vec<_> = deltas.iter().map(|d| class_of(&ctx, d)).collect();
    let mut report = json!({
        "tag": m.tag(),
        "prime": ctx.p(),
        "delta": deltas.iter().map(q_str).collect::<Vec<_>>(),
        "delta_classes": classes,
        "generic": m.is_generic(&x),
        "in_open_p_orbit_set": m.in_open_p_orbit_set(&x).is_ok(),
        "orbit_invariant": m.orbit_invariants(&x),
    });
    if m.in_open_p_orbit_set(&x).is_ok() {
        merge(&mut report, json!({ "p_orbit_class": m.p_orbit_class(&x)? }));
    }
    if let Ok(y) = m.psi(&x) {
        let nabla = (0..=m.k()).map(|j| m.nabla(j, &y)).collect::<Result<Vec<Q>, _>>()?;
        merge(
            &mut report,
            json!({ "psi": m.elem_to_json(&y), "nabla_of_psi": nabla.iter().map(q_str).collect::<Vec<_>>() }),
        );
    }
    Ok(report)
}

fn psi_check_one<M: JsonElem>(m: &M, entries: &[Value]) -> Result<Output, CliError> {
    let x = m.parse_elem(entries)?;
    let identity = psi_identity_holds(m, &x)?;
    let triple = m.ad_triple_holds(&x)?;
    Ok(Output {
        report: json!({ "tag": m.tag(), "prime": m.ctx().p(), "identity_holds": identity, "ad_triple_holds": triple }),
        ok: identity && triple,
    })
}

fn psi_check_random<M: Model>(m: &M, samples: usize, seed: u64) -> Result<Output, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut identity, mut triple) = (0, 0);
    for _ in 0..samples {
        let x = random_generic_element(m, &mut rng);
        identity += psi_identity_holds(m, &x)? as usize;
        triple += m.ad_triple_holds(&x)? as usize;
    }
    Ok(Output {
        report: json!({
            "tag": m.tag(),
            "prime": m.ctx().p(),
            "rank_of_model": m.k() + 1,
            "samples": samples,
            "seed": seed,
            "identity_holds": identity,
            "ad_triple_holds": triple,
        }),
        ok: identity == samples && triple == samples,
    })
}

fn enumerate_catalog(max_size: i64) -> Result<Value, CliError> {
    if max_size < 1 {
        return Err(CliError::Usage("--max-size must be positive".into()));
    }
    let mut out = Vec::new();
    for r in &catalog::catalog().rows {
        for params in r.instances(max_size)? {
            let desc = r.descriptor(&params)?;
            let mut rep = classification_report(&desc)?;
            merge(&mut rep, json!({ "size": r.size(&params)? }));
            out.push(rep);
        }
    }
    Ok(Value::Array(out))
}

fn selftest(prime: u64, seed: u64, only: &[u8]) -> Output {
    let ids: Vec<u8> = if only.is_empty() { (1..=14).collect() } else { only.to_vec() };
    let results: Vec<acceptance::CriterionResult> =
        ids.iter().map(|&id| acceptance::run_criterion(id, prime, seed)).collect();
    for r in &results {
        eprintln!("{}", r.line());
    }
    let ok = results.iter().all(|r| r.passed);
    Output { report: json!({ "prime": prime, "seed": seed, "passed": ok, "criteria": results }), ok }
}

/// JSON pretty-printing, or `path: value` lines for `--table`.
pub fn render(v: &Value, table: bool) -> String {
    if !table {
        return serde_json::to_string_pretty(v).expect("values serialize");
    }
    let mut lines = Vec::new();
    flatten("", v, &mut lines);
    lines.join("\n")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        other => {
            let shown = match other {
                Value::String(s) => s.clone(),
                _ => other.to_string(),
            };
            out.push(format!("{prefix}: {shown}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<Output, CliError> {
        let mut argv = vec!["pgo"];
        argv.extend(args);
        execute(&Cli::try_parse_from(argv).unwrap())
    }

    #[test]
    fn anisotropic_quaternary() {
        let r = exec(&["qform", "classify", "--prime", "5", "--coeffs", "1,-u,-pi,upi"]).unwrap().report;
        assert_eq!(r["anisotropic"], true);
        assert_eq!(r["witt_index"], 0);
    }

    #[test]
    fn zero_coefficients_go_to_the_radical() {
        let r = exec(&["qform", "classify", "--coeffs", "0,1,-1"]).unwrap().report;
        assert_eq!(r["radical_dim"], 1);
        assert_eq!(r["witt_index"], 1);
    }

    #[test]
    fn sp3_enumeration() {
        let r = exec(&["orbit", "enumerate", "--tag", "sp", "--n", "3", "--prime", "5"]).unwrap().report;
        assert_eq!(r["nonzero_classes"], 7);
        assert_eq!(r["predicted_nonzero"], 7);
    }

    #[test]
    fn classify_bundled_fixture_and_round_trip() {
        let r = exec(&["classify", "--diagram", "fixtures/table1_row8.json"]).unwrap().report;
        assert_eq!(r["rank"], 2);
        assert_eq!(r["descriptor"]["case_id"], "8");
        let dir = std::env::temp_dir().join(format!("pgo-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        std::fs::write(&path, render(&r, false)).unwrap();
        let again = exec(&["classify", "--descriptor", path.to_str().unwrap()]).unwrap().report;
        assert_eq!(again, r);
    }

    #[test]
    fn table_rendering_flattens_keys() {
        let s = render(&json!({"a": {"b": 1, "c": [1, 2]}, "d": "x"}), true);
        assert_eq!(s, "a.b: 1\na.c: [1,2]\nd: x");
    }

    #[test]
    fn bad_prime_is_a_usage_error() {
        let e = exec(&["--prime", "9", "enumerate"]).err().unwrap();
        assert_eq!(e.exit_code(), 2);
    }
}
