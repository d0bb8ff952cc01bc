//! Command-line front end: model loading, suites, report rendering.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::exterior::Form;
use crate::groth::{run_order_suite, ORDER_SEED};
use crate::harmonic::{analyze, HarmonicError, HodgeDiamond};
use crate::identities::{run_identity_suite, IdentityError};
use crate::linalg::Residual;
use crate::models::{
    build_ce_complex, build_flat_model, verify_nk, CEComplex, ModelError, ModelTag, OperatorModel, StructureFile,
};
use crate::report::Record;
use crate::scalar::{Field, Scalar, DEFAULT_D};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ExitStatus {
    Pass = 0,
    InputError = 2,
    ModelInvalid = 3,
    IdentityFailure = 4,
    TheoremFailure = 5,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// The smaller nonzero status wins.
    fn merge(self, o: ExitStatus) -> ExitStatus {
        match (self, o) {
            (ExitStatus::Pass, x) | (x, ExitStatus::Pass) => x,
            (a, b) => a.min(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Bundled models selectable without an input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    /// Flat fiber model with N from the basis table.
    Flat,
    /// Bundled CE model of S³×S³.
    S3s3,
    /// Bundled abelian CE model (flat ℂ³, d = 0).
    Abelian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the model: Jacobi, SU(3)-structure, structure equations, d² = 0, bidegree split.
    Verify,
    /// Run the operator identity suite.
    Identities,
    /// Harmonic forms, cohomology and Hodge numbers (CE models).
    Harmonic,
    /// Algebraic orders and filtration checks.
    Order,
    /// Everything above.
    ReportAll,
}

#[derive(Debug, Parser)]
#[command(name = "nkhodge", version, about = "Exact operator calculus on nearly Kähler model complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Structure file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Bundled model; defaults to s3s3 when no input file is given.
    #[arg(long, value_enum, global = true)]
    pub model: Option<ModelChoice>,
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub mode: Mode,
    /// Tolerance for float mode.
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// λ of the flat model, as an exact scalar string.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Discriminant D of the field ℚ(i, √D).
    #[arg(long = "field-d", global = true)]
    pub field_d: Option<u32>,
}

/// Where the model comes from.
#[derive(Clone, Debug)]
pub enum ModelSource {
    Flat { lambda: Scalar },
    Structure(Box<StructureFile>),
}

/// Validated configuration of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub source: ModelSource,
    pub mode: Mode,
    pub tol: f64,
    pub format: Format,
}

/// A failure before any check ran.
#[derive(Clone, Debug, PartialEq)]
pub struct RunError {
    pub status: ExitStatus,
    pub message: String,
}

fn input_error(message: impl Into<String>) -> RunError {
    RunError { status: ExitStatus::InputError, message: message.into() }
}

fn model_error(e: ModelError) -> RunError {
    let status = match e {
        ModelError::Parse(_)
        | ModelError::Dim(_)
        | ModelError::Index(_)
        | ModelError::Scalar(_)
        | ModelError::Form(_)
        | ModelError::BadLambda(_) => ExitStatus::InputError,
        _ => ExitStatus::ModelInvalid,
    };
    RunError { status, message: e.to_string() }
}

impl RunConfig {
    /// Resolves flags into a configuration; reads the input file if any.
    pub fn from_cli(cli: &Cli) -> Result<RunConfig, RunError> {
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            return Err(input_error(format!("tolerance must be positive, got {}", cli.tol)));
        }
        if cli.input.is_some() && cli.model.is_some() {
            return Err(input_error("--input and --model are mutually exclusive"));
        }
        let disc = cli.field_d.unwrap_or(DEFAULT_D);
        let source = match (&cli.input, cli.model) {
            (None, Some(ModelChoice::Flat)) => {
                let text = cli.lambda.as_deref().unwrap_or("1");
                let lambda = Scalar::parse_in(text, disc).map_err(|e| input_error(format!("--lambda: {e}")))?;
                ModelSource::Flat { lambda }
            }
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
                ModelSource::Structure(Box::new(StructureFile::from_json(&text).map_err(model_error)?))
            }
            (None, Some(ModelChoice::Abelian)) => ModelSource::Structure(Box::new(StructureFile::bundled_flat_c3())),
            (None, Some(ModelChoice::S3s3) | None) => ModelSource::Structure(Box::new(StructureFile::bundled_s3s3())),
        };
        let source = match source {
            ModelSource::Structure(mut f) => {
                if cli.lambda.is_some() {
                    return Err(input_error("--lambda applies to the flat model only"));
                }
                if let Some(d) = cli.field_d {
                    f.field_d = d;
                }
                ModelSource::Structure(f)
            }
            flat => flat,
        };
        Ok(RunConfig { command: cli.command, source, mode: cli.mode, tol: cli.tol, format: cli.format })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub name: String,
    pub tag: ModelTag,
    pub mode: Mode,
    pub lambda: String,
    pub kappa: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicData {
    pub betti: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub diamond: HodgeDiamond,
}

#[derive(Clone, Debug, Serialize)]
struct Section {
    command: Command,
    #[serde(skip)]
    status: ExitStatus,
    #[serde(skip)]
    error: Option<String>,
    records: Vec<Record>,
}

/// Complete outcome of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Command,
    pub model: ModelInfo,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none", flatten)]
    pub harmonic: Option<HarmonicData>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub pass: bool,
    pub exit_code: u8,
    #[serde(skip)]
    sections: Vec<Section>,
    #[serde(skip)]
    pub status: ExitStatus,
}

fn passes<F: Field>(residual: f64, tol: f64) -> bool {
    if F::EXACT {
        residual == 0.0
    } else {
        residual <= tol
    }
}

fn verify_ce<F: Field>(ce: &CEComplex<F>, m: &OperatorModel<F>, tol: f64) -> Vec<Record> {
    let tag = ModelTag::Ce;
    let nk = verify_nk(ce, tol);
    let reason = nk.reason.clone();
    let d2 = Residual::of(ce.d.compose(&ce.d).entries());
    let mut comps = Vec::new();
    for (label, op) in [("N", &m.n), ("∂", ce_del(m)), ("∂̄", ce_del_bar(m)), ("N̄", &m.n_bar)] {
        if !op.is_zero() {
            comps.push(label);
        }
    }
    let support = ce.d.bidegree_support();
    let forbidden = support.iter().filter(|s| !matches!(s, (2, -1) | (1, 0) | (0, 1) | (-1, 2))).count();
    let mut out = vec![
        Record::new("verify.jacobi", "structure constants satisfy the Jacobi identity", tag, 0.0, true),
        Record::new(
            "verify.su3",
            "SU(3)-structure: ω real of type (1,1), ω³ ≠ 0, Ω of type (3,0), ⟨Ω,Ω⟩ = 1",
            tag,
            0.0,
            true,
        ),
        Record::new("verify.d_squared", "d² = 0", tag, d2.value, d2.passes::<F>(tol)),
        Record::new("verify.nk_domega", "dω = 3λReΩ", tag, nk.residual_domega, nk.pass)
            .with_constant(nk.lambda.clone().unwrap_or_default())
            .with_label("λ"),
        Record::new(
            "verify.nk_dimomega",
            "dImΩ = −2λω²",
            tag,
            nk.residual_dimomega,
            nk.pass && passes::<F>(nk.residual_dimomega, tol),
        ),
        Record::new(
            "verify.bidegree_split",
            "d = N + ∂ + ∂̄ + N̄ with bidegrees (2,−1), (1,0), (0,1), (−1,2)",
            tag,
            forbidden as f64,
            forbidden == 0,
        )
        .with_detail(format!("{} nonzero components: {}", comps.len(), comps.join(", "))),
    ];
    if let Some(r) = reason {
        for rec in out.iter_mut().filter(|r| r.name.starts_with("verify.nk")) {
            rec.detail = Some(r.clone());
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn ce_del<F>(m: &OperatorModel<F>) -> &crate::operator::LinOp<F> {
    &m.diff.as_ref().expect("CE model").del
}

fn ce_del_bar<F>(m: &OperatorModel<F>) -> &crate::operator::LinOp<F> {
    &m.diff.as_ref().expect("CE model").del_bar
}

fn verify_flat<F: Field>(m: &OperatorModel<F>, tol: f64) -> Vec<Record> {
    let tag = ModelTag::Flat;
    let x = |k| Form::<F>::xi(k);
    let table = [
        (Form::xi_bar(1), x(2).wedge(&x(3))),
        (Form::xi_bar(2), x(3).wedge(&x(1))),
        (Form::xi_bar(3), x(1).wedge(&x(2))),
    ];
    let r = table.iter().fold(Residual::zero(), |acc, (a, b)| {
        acc.max(Residual::of(m.n.apply(a).sub(&b.scale(&m.lambda)).coeffs()))
    });
    let holo = (1..=3).fold(Residual::zero(), |acc, k| acc.max(Residual::of(m.n.apply(&x(k)).coeffs())));
    vec![
        Record::new(
            "verify.n_table",
            "N(ξ̄₁) = λξ₂∧ξ₃ cyclically and N(ξ_k) = 0",
            tag,
            r.value.max(holo.value),
            r.passes::<F>(tol) && holo.passes::<F>(tol),
        )
        .with_constant(m.lambda.render())
        .with_label("λ"),
        Record::new(
            "verify.su3",
            "SU(3)-structure: ω real of type (1,1), ω³ ≠ 0, Ω of type (3,0), ⟨Ω,Ω⟩ = 1",
            tag,
            0.0,
            true,
        ),
    ]
}

fn section(command: Command, records: Vec<Record>, fail: ExitStatus) -> Section {
    let status = if records.iter().all(|r| r.pass) { ExitStatus::Pass } else { fail };
    Section { command, status, error: None, records }
}

fn error_section(command: Command, status: ExitStatus, message: String) -> Section {
    Section { command, status, error: Some(message), records: Vec::new() }
}

fn execute<F: Field>(
    cfg: &RunConfig,
    m: &OperatorModel<F>,
    ce: Option<&CEComplex<F>>,
) -> (Vec<Section>, Option<HarmonicData>) {
    let tol = cfg.tol;
    let all = cfg.command == Command::ReportAll;
    let mut sections = Vec::new();
    let mut harmonic = None;
    if all || cfg.command == Command::Verify {
        let records = match ce {
            Some(ce) => verify_ce(ce, m, tol),
            None => verify_flat(m, tol),
        };
        sections.push(section(Command::Verify, records, ExitStatus::ModelInvalid));
    }
    if all || cfg.command == Command::Identities {
        sections.push(match run_identity_suite(m, tol) {
            Ok(v) => section(Command::Identities, v.iter().map(Record::from).collect(), ExitStatus::IdentityFailure),
            Err(e @ IdentityError::Precondition(_)) => error_section(Command::Identities, ExitStatus::ModelInvalid, e.to_string()),
            Err(e) => error_section(Command::Identities, ExitStatus::InputError, e.to_string()),
        });
    }
    if all || cfg.command == Command::Order {
        sections.push(match run_order_suite(m, ORDER_SEED) {
            Ok(v) => section(Command::Order, v, ExitStatus::TheoremFailure),
            Err(e) => error_section(Command::Order, ExitStatus::TheoremFailure, e.to_string()),
        });
    }
    if (all && ce.is_some()) || cfg.command == Command::Harmonic {
        sections.push(match analyze(m, tol) {
            Ok(r) => {
                harmonic = Some(HarmonicData { betti: r.betti, cohomology: r.cohomology, diamond: r.diamond });
                section(Command::Harmonic, r.records, ExitStatus::TheoremFailure)
            }
            Err(e @ HarmonicError::NoDifferential(_)) => error_section(Command::Harmonic, ExitStatus::InputError, e.to_string()),
            Err(e) => error_section(Command::Harmonic, ExitStatus::TheoremFailure, e.to_string()),
        });
    }
    (sections, harmonic)
}

fn run_in<F: Field>(cfg: &RunConfig) -> Result<Report, RunError> {
    let (model, ce) = match &cfg.source {
        ModelSource::Flat { lambda } => {
            let flat = build_flat_model::<F>(lambda).map_err(model_error)?;
            (OperatorModel::from_flat(&flat), None)
        }
        ModelSource::Structure(file) => {
            let ce = build_ce_complex::<F>(file).map_err(model_error)?;
            (OperatorModel::from_ce(&ce).map_err(model_error)?, Some(ce))
        }
    };
    let (sections, harmonic) = execute(cfg, &model, ce.as_ref());
    let status = sections.iter().fold(ExitStatus::Pass, |acc, s| acc.merge(s.status));
    let info = ModelInfo {
        name: model.name.clone(),
        tag: model.tag,
        mode: cfg.mode,
        lambda: model.lambda.render(),
        kappa: model.kappa.render(),
    };
    Ok(Report {
        command: cfg.command,
        model: info,
        records: sections.iter().flat_map(|s| s.records.clone()).collect(),
        harmonic,
        errors: sections.iter().filter_map(|s| s.error.clone()).collect(),
        pass: status == ExitStatus::Pass,
        exit_code: status.code(),
        sections,
        status,
    })
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    match cfg.mode {
        Mode::Exact => run_in::<Scalar>(cfg),
        Mode::Float => run_in::<Complex64>(cfg),
    }
}

fn section_title(c: Command) -> &'static str {
    match c {
        Command::Verify => "verify",
        Command::Identities => "identities",
        Command::Harmonic => "harmonic",
        Command::Order => "order",
        Command::ReportAll => "report-all",
    }
}

impl Report {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let m = &self.model;
        let _ = writeln!(s, "model: {} ({}), mode {}, λ = {}, κ = {}", m.name, m.tag, match m.mode {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }, m.lambda, m.kappa);
        for sec in &self.sections {
            let _ = writeln!(s, "\n== {} ==", section_title(sec.command));
            if let Some(e) = &sec.error {
                let _ = writeln!(s, "error: {e}");
            }
            for r in &sec.records {
                let _ = writeln!(s, "{}", r.text_line());
            }
            if sec.command == Command::Harmonic {
                if let Some(h) = &self.harmonic {
                    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
                    let _ = writeln!(s, "betti (harmonic): [{}]", join(&h.betti));
                    let _ = writeln!(s, "betti (ranks of d): [{}]", join(&h.cohomology));
                    let _ = writeln!(s, "Hodge diamond h^{{p,q}}:");
                    s.push_str(&h.diamond.to_string());
                    let _ = writeln!(s, "h[p][q] table (rows p = 0..3, columns q = 0..3):");
                    for row in &h.diamond.h {
                        let _ = writeln!(s, "  {}", row.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
                    }
                }
            }
        }
        let failed = self.records.iter().filter(|r| !r.pass).count();
        let _ = writeln!(
            s,
            "\nresult: {} ({} checks, {} failed, exit {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.records.len(),
            failed,
            self.exit_code
        );
        s
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
        }
    }
}

/// Renders an error for the chosen format.
pub fn render_error(e: &RunError, format: Format) -> String {
    match format {
        Format::Text => format!("error: {}\n", e.message),
        Format::Json => {
            let v = serde_json::json!({ "error": e.message, "pass": false, "exit_code": e.status.code() });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    }
}

/// Entry point shared by the binary and tests: returns (exit code, stdout, stderr).
pub fn main_with(cli: &Cli) -> (u8, String, String) {
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => (report.status.code(), report.render(cli.format), String::new()),
        Err(e) => {
            let out = if cli.format == Format::Json { render_error(&e, cli.format) } else { String::new() };
            (e.status.code(), out, format!("error: {}\n", e.message))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("nkhodge").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flat_identities_pass() {
        let (code, out, _) = main_with(&cli(&["identities", "--model", "flat", "--lambda", "1"]));
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("result: PASS"));
    }

    #[test]
    fn verify_bundled_prints_lambda() {
        let (code, out, _) = main_with(&cli(&["verify"]));
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("dω = 3λReΩ: PASS, λ = 1/3"), "{out}");
    }

    #[test]
    fn abelian_verify_is_model_invalid() {
        let (code, out, _) = main_with(&cli(&["verify", "--model", "abelian"]));
        assert_eq!(code, 3, "{out}");
        assert!(out.contains("λ = 0"));
    }

    #[test]
    fn input_errors() {
        assert_eq!(main_with(&cli(&["verify", "--input", "/nonexistent.json"])).0, 2);
        assert_eq!(main_with(&cli(&["verify", "--model", "flat", "--lambda", "0"])).0, 2);
        assert_eq!(main_with(&cli(&["verify", "--lambda", "1"])).0, 2);
        assert_eq!(main_with(&cli(&["verify", "--tol", "0"])).0, 2);
        assert_eq!(main_with(&cli(&["harmonic", "--model", "flat"])).0, 2);
        assert_eq!(main_with(&cli(&["verify", "--field-d", "4"])).0, 2);
    }

    #[test]
    fn exit_merge() {
        use ExitStatus::*;
        assert_eq!(Pass.merge(TheoremFailure), TheoremFailure);
        assert_eq!(IdentityFailure.merge(TheoremFailure), IdentityFailure);
        assert_eq!(Pass.merge(Pass), Pass);
    }
}
