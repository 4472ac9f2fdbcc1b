//! CLI orchestration: parse arguments, load documents, run the pipeline,
//! render deterministic text reports.
//!
//! Exit codes: 0 success, 1 domain failure (degenerate input, orbit not
//! connected, ...), 2 I/O or schema failure. All reals print with 17
//! significant digits so repeated runs are byte-identical.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use inertia_bundles::linalg::{format_real, rel_frobenius, sym_eigen_sorted};
use inertia_bundles::splitting::complement_field;
use inertia_bundles::{
    gauge_act, make_form_from_splitting, make_line_bundle_lk, orbit_connect, q_splitting_with_tol,
    theta_homotopy_with_tol, theta_iso_with_tol, verify_q_splitting, ConnectMode, Connection,
    DiscreteBundle, DocError, Document, Error, FormField, Gau0Witness, OrbitOutcome,
    SplittingField, SymForm, DEFAULT_TOL,
};
use std::sync::Arc;

/// Name of the environment variable overriding the degeneracy tolerance.
pub const TOL_ENV_VAR: &str = "INERTIA_BUNDLES_TOL";

#[derive(Parser)]
#[command(
    name = "inertia-bundles",
    version,
    about = "Inertia, splittings, gauge isometries, and orbit invariants of \
             quadratic form fields over a discretized circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a document and report its field data.
    Inspect { file: PathBuf },
    /// Compute the canonical q-splitting of the document's form.
    Split {
        file: PathBuf,
        /// Positive definite reference field document (default: identity).
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write the splitting into an output document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct the identity-component gauge isometry between two forms.
    Isometry {
        file0: PathBuf,
        file1: PathBuf,
        /// Path discretization steps.
        #[arg(long, default_value_t = 16)]
        steps: usize,
        /// Write the witness into an output document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two forms lie on the same gauge orbit.
    Orbit {
        file0: PathBuf,
        file1: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
    /// Report the isomorphism and homotopy invariants of a form.
    Invariants {
        file: PathBuf,
        /// Write the invariants into an output document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the winding-k line-splitting example instance.
    DemoLk {
        #[arg(long)]
        n_vertices: usize,
        #[arg(long)]
        k: i64,
        /// Write the document here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Restricted,
}

/// Everything a run produces; `main` prints and exits with `code`.
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum CliError {
    Domain(Error),
    Doc(DocError),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Domain(e)
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> CliError {
        CliError::Doc(e)
    }
}

impl CliError {
    fn render(self) -> (String, i32) {
        match self {
            CliError::Domain(e) => (format!("error: {e}\n"), 1),
            CliError::Doc(e) => (format!("error: {e}\n"), 2),
            CliError::Usage(msg) => (format!("error: {msg}\n"), 2),
        }
    }
}

struct CommandOutput {
    stdout: String,
    code: i32,
}

fn ok(stdout: String) -> Result<CommandOutput, CliError> {
    Ok(CommandOutput { stdout, code: 0 })
}

/// Parse argv and execute. Never panics on bad input; the error channel
/// and exit code carry the failure.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    stdout: rendered,
                    stderr: String::new(),
                    code: 0,
                },
                _ => RunOutput {
                    stdout: String::new(),
                    stderr: rendered,
                    code: 2,
                },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => RunOutput {
            stdout: out.stdout,
            stderr: String::new(),
            code: out.code,
        },
        Err(e) => {
            let (stderr, code) = e.render();
            RunOutput {
                stdout: String::new(),
                stderr,
                code,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<CommandOutput, CliError> {
    let tol = tolerance()?;
    match command {
        Command::Inspect { file } => inspect(&file, tol),
        Command::Split {
            file,
            reference,
            out,
        } => split(&file, reference.as_deref(), out.as_deref(), tol),
        Command::Isometry {
            file0,
            file1,
            steps,
            out,
        } => isometry(&file0, &file1, steps, out.as_deref(), tol),
        Command::Orbit {
            file0,
            file1,
            mode,
            steps,
        } => orbit(&file0, &file1, mode, steps, tol),
        Command::Invariants { file, out } => invariants(&file, out.as_deref(), tol),
        Command::DemoLk { n_vertices, k, out } => demo_lk(n_vertices, k, out.as_deref()),
    }
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var(TOL_ENV_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_TOL),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Usage(format!(
            "{TOL_ENV_VAR} is not valid unicode"
        ))),
        Ok(text) => {
            let parsed: f64 = text.trim().parse().map_err(|_| {
                CliError::Usage(format!("{TOL_ENV_VAR}={text:?} is not a real number"))
            })?;
            if parsed > 0.0 && parsed.is_finite() {
                Ok(parsed)
            } else {
                Err(CliError::Usage(format!(
                    "{TOL_ENV_VAR} must be positive and finite, got {text}"
                )))
            }
        }
    }
}

fn load(path: &Path) -> Result<(Document, Arc<DiscreteBundle>), CliError> {
    let doc = Document::read(path)?;
    let bundle = doc.bundle()?;
    Ok((doc, bundle))
}

fn require_form(
    doc: &Document,
    bundle: &Arc<DiscreteBundle>,
    path: &Path,
    tol: f64,
) -> Result<FormField, CliError> {
    doc.form_field_with_tol(bundle, tol)?.ok_or_else(|| {
        CliError::Doc(DocError::Schema(format!(
            "{} has no form section",
            path.display()
        )))
    })
}

fn inspect(file: &Path, tol: f64) -> Result<CommandOutput, CliError> {
    let (doc, bundle) = load(file)?;
    let mut out = String::new();
    out.push_str(&format!("schema: {}\n", doc.schema));
    out.push_str(&format!("vertices: {}\n", bundle.n_vertices()));
    out.push_str(&format!("rank: {}\n", bundle.rank()));
    out.push_str(&format!(
        "transitions: {}\n",
        if bundle.is_trivial() {
            "trivial"
        } else {
            "general"
        }
    ));
    match doc.form_field_with_tol(&bundle, tol)? {
        None => out.push_str("form: none\n"),
        Some(q) => {
            out.push_str(&format!("form inertia: {}\n", q.inertia()));
            let gaps: Vec<f64> = q
                .forms()
                .iter()
                .map(|f| {
                    let e = sym_eigen_sorted(f.mat())?;
                    Ok(e.values
                        .iter()
                        .map(|v| v.abs())
                        .fold(f64::INFINITY, f64::min))
                })
                .collect::<Result<_, Error>>()?;
            let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
            out.push_str(&format!("eigen gap min: {}\n", format_real(min_gap)));
            let rendered: Vec<String> = gaps.iter().map(|&g| format_real(g)).collect();
            out.push_str(&format!("eigen gaps: {}\n", rendered.join(" ")));
        }
    }
    let subs = doc.subbundle_fields(&bundle)?;
    if subs.is_empty() {
        out.push_str("subbundles: none\n");
    } else {
        let dims: Vec<String> = subs.iter().map(|s| s.dim().to_string()).collect();
        out.push_str(&format!(
            "subbundles: {} (dims {})\n",
            subs.len(),
            dims.join(" ")
        ));
    }
    match doc.gauge_field(&bundle)? {
        None => out.push_str("gauge: none\n"),
        Some(g) => out.push_str(&format!(
            "gauge: present (min |det| {})\n",
            format_real(g.min_abs_det())
        )),
    }
    if doc.gauge_path.is_some() {
        let w = inertia_bundles::doc::witness_from_doc(&doc, &bundle)?;
        out.push_str(&format!(
            "gauge path: {} steps (min |det| {})\n",
            w.path().len(),
            format_real(w.min_det())
        ));
    }
    if let Some((iso, homotopy)) = doc.invariant_classes()? {
        out.push_str(&format!("iso: {iso}\n"));
        out.push_str(&format!("homotopy: {homotopy}\n"));
    }
    ok(out)
}

fn split(
    file: &Path,
    reference: Option<&Path>,
    out_path: Option<&Path>,
    tol: f64,
) -> Result<CommandOutput, CliError> {
    let (doc, bundle) = load(file)?;
    let q = require_form(&doc, &bundle, file, tol)?;
    let r = match reference {
        None => FormField::identity(bundle.clone()),
        Some(ref_path) => {
            let (ref_doc, ref_bundle) = load(ref_path)?;
            require_form(&ref_doc, &ref_bundle, ref_path, tol)?
        }
    };
    let result = q_splitting_with_tol(&q, &r, tol)?;
    let report = verify_q_splitting(&q, &result.splitting)?;
    let min_gap = result
        .eigen_gaps
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let min_plus = report
        .min_plus
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max_minus = report
        .max_minus
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut text = String::new();
    text.push_str(&format!("inertia: {}\n", q.inertia()));
    text.push_str(&format!("plus dim: {}\n", result.splitting.plus().dim()));
    text.push_str(&format!("minus dim: {}\n", result.splitting.minus().dim()));
    text.push_str(&format!("eigen gap min: {}\n", format_real(min_gap)));
    text.push_str(&format!(
        "verified: {} (restricted eigen min plus {}, max minus {})\n",
        if report.pass { "yes" } else { "no" },
        format_real(min_plus),
        format_real(max_minus)
    ));
    if let Some(path) = out_path {
        let out_doc = Document::new(&bundle)
            .with_form(&q)
            .with_subbundles(&[result.splitting.plus(), result.splitting.minus()]);
        out_doc.write(path)?;
        text.push_str(&format!("wrote: {}\n", path.display()));
    }
    ok(text)
}

fn witness_stats(q0: &FormField, q1: &FormField, w: &Gau0Witness) -> Result<String, CliError> {
    let image = gauge_act(q1, w.endpoint())?;
    let mut residual = 0.0_f64;
    for i in 0..q0.bundle().n_vertices() {
        residual = residual.max(rel_frobenius(image.form(i).mat(), q0.form(i).mat()));
    }
    Ok(format!(
        "path steps: {}\nmin |det|: {}\nmax residual: {}\n",
        w.path().len(),
        format_real(w.min_det()),
        format_real(residual)
    ))
}

fn obstruction_report(obs: &inertia_bundles::Obstruction) -> String {
    let mut text = String::new();
    text.push_str("connected: no\n");
    text.push_str(&format!("reason: {}\n", obs.reason));
    text.push_str(&format!("q0 inertia: {}\n", obs.inertia0));
    text.push_str(&format!("q1 inertia: {}\n", obs.inertia1));
    text.push_str(&format!("q0 iso: {}\n", obs.iso0));
    text.push_str(&format!("q1 iso: {}\n", obs.iso1));
    text.push_str(&format!("q0 homotopy: {}\n", obs.homotopy0));
    text.push_str(&format!("q1 homotopy: {}\n", obs.homotopy1));
    text
}

fn isometry(
    file0: &Path,
    file1: &Path,
    steps: usize,
    out_path: Option<&Path>,
    tol: f64,
) -> Result<CommandOutput, CliError> {
    let (doc0, bundle0) = load(file0)?;
    let (doc1, bundle1) = load(file1)?;
    let q0 = require_form(&doc0, &bundle0, file0, tol)?;
    let q1 = require_form(&doc1, &bundle1, file1, tol)?;
    match orbit_connect(&q0, &q1, ConnectMode::Restricted, steps)? {
        OrbitOutcome::Connected(Connection::Restricted(w)) => {
            let mut text = String::from("connected: yes\n");
            text.push_str(&witness_stats(&q0, &q1, &w)?);
            if let Some(path) = out_path {
                let out_doc = Document::new(&bundle0).with_gauge_path(&w);
                out_doc.write(path)?;
                text.push_str(&format!("wrote: {}\n", path.display()));
            }
            ok(text)
        }
        OrbitOutcome::Connected(Connection::Full(_)) => unreachable!("restricted mode"),
        OrbitOutcome::NotConnected(obs) => Ok(CommandOutput {
            stdout: obstruction_report(&obs),
            code: 1,
        }),
    }
}

fn orbit(
    file0: &Path,
    file1: &Path,
    mode: ModeArg,
    steps: usize,
    tol: f64,
) -> Result<CommandOutput, CliError> {
    let (doc0, bundle0) = load(file0)?;
    let (doc1, bundle1) = load(file1)?;
    let q0 = require_form(&doc0, &bundle0, file0, tol)?;
    let q1 = require_form(&doc1, &bundle1, file1, tol)?;
    let (mode_name, connect_mode) = match mode {
        ModeArg::Full => ("full", ConnectMode::Full),
        ModeArg::Restricted => ("restricted", ConnectMode::Restricted),
    };
    let mut text = format!("mode: {mode_name}\n");
    text.push_str(&format!(
        "q0 iso: {}\nq1 iso: {}\nq0 homotopy: {}\nq1 homotopy: {}\n",
        theta_iso_with_tol(&q0, tol)?,
        theta_iso_with_tol(&q1, tol)?,
        theta_homotopy_with_tol(&q0, tol)?,
        theta_homotopy_with_tol(&q1, tol)?
    ));
    match orbit_connect(&q0, &q1, connect_mode, steps)? {
        OrbitOutcome::Connected(Connection::Full(c)) => {
            let image = gauge_act(&q1, &c)?;
            let mut residual = 0.0_f64;
            for i in 0..bundle0.n_vertices() {
                residual = residual.max(rel_frobenius(image.form(i).mat(), q0.form(i).mat()));
            }
            text.push_str("connected: yes\n");
            text.push_str(&format!(
                "gauge min |det|: {}\nmax residual: {}\n",
                format_real(c.min_abs_det()),
                format_real(residual)
            ));
            ok(text)
        }
        OrbitOutcome::Connected(Connection::Restricted(w)) => {
            text.push_str("connected: yes\n");
            text.push_str(&witness_stats(&q0, &q1, &w)?);
            ok(text)
        }
        OrbitOutcome::NotConnected(obs) => {
            // the invariants of both forms are already printed above
            text.push_str("connected: no\n");
            text.push_str(&format!("reason: {}\n", obs.reason));
            Ok(CommandOutput {
                stdout: text,
                code: 1,
            })
        }
    }
}

fn invariants(file: &Path, out_path: Option<&Path>, tol: f64) -> Result<CommandOutput, CliError> {
    let (doc, bundle) = load(file)?;
    let q = require_form(&doc, &bundle, file, tol)?;
    let iso = theta_iso_with_tol(&q, tol)?;
    let homotopy = theta_homotopy_with_tol(&q, tol)?;
    let mut text = String::new();
    text.push_str(&format!("inertia: {}\n", q.inertia()));
    text.push_str(&format!("iso: {iso}\n"));
    text.push_str(&format!("homotopy: {homotopy}\n"));
    if let Some(path) = out_path {
        let out_doc = Document::new(&bundle)
            .with_form(&q)
            .with_invariants(&iso, &homotopy);
        out_doc.write(path)?;
        text.push_str(&format!("wrote: {}\n", path.display()));
    }
    ok(text)
}

fn demo_lk(n_vertices: usize, k: i64, out_path: Option<&Path>) -> Result<CommandOutput, CliError> {
    let plus = make_line_bundle_lk(n_vertices, k)?;
    let bundle = plus.bundle().clone();
    let r = FormField::identity(bundle.clone());
    let minus = complement_field(&plus, &r)?;
    let s = SplittingField::new(plus, minus)?;
    let q = make_form_from_splitting(
        &s,
        &vec![SymForm::from_diagonal(&[1.0]); n_vertices],
        &vec![SymForm::from_diagonal(&[-1.0]); n_vertices],
    )?;
    let doc = Document::new(&bundle)
        .with_form(&q)
        .with_subbundles(&[s.plus(), s.minus()]);
    match out_path {
        Some(path) => {
            doc.write(path)?;
            ok(format!("wrote: {}\n", path.display()))
        }
        None => ok(doc.to_json()?),
    }
}
