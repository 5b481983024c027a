//! `lorcurv` command-line front end.
//!
//! Exit codes: 0 success, 1 domain rejection, 2 input/parse/IO error,
//! 3 metrics not equivalent.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lorcurv::atlas::{self, ParamGrid, TableFormat};
use lorcurv::classify::{self, canonical_form, to_working_basis, working_algebra};
use lorcurv::core::{orthonormal_frame, validate_metric, SignatureDiagnostics};
use lorcurv::curvature::CurvatureReport;
use lorcurv::io::{to_json_string_pretty, InputDocument};
use lorcurv::linalg::max_abs;
use lorcurv::{Error, FamilyTag};

#[derive(Parser)]
#[command(name = "lorcurv", version, about = "Curvature and canonical forms of Lorentzian metrics on non-unimodular 3D Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an input document holds a usable Lorentzian metric.
    Validate { file: PathBuf },
    /// Reduce a metric to its canonical form.
    Classify { file: PathBuf },
    /// Connection, Ricci operator, sectional curvatures and O'Neill type.
    Curvature {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FrameChoice::Auto)]
        frame: FrameChoice,
    },
    /// Cross-check the closed-form curvature tables over a parameter grid.
    Atlas {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family parameter, required with `--family Gc`.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        /// e.g. "mu=1,2;tau=-2,0,1/2".
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two metrics are related by an automorphism.
    Equiv { first: PathBuf, second: PathBuf },
    /// Decide whether a metric has constant sectional curvature.
    Constcurv { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameChoice {
    /// Orthonormal frame built from the metric's eigenvectors.
    Auto,
    /// The reference frame of the canonical form (input must be canonical).
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "GI")]
    Gi,
    #[value(name = "Gc")]
    Gc,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

enum Failure {
    Lib(Error),
    /// Domain rejection whose diagnostics are already printed.
    Rejected,
    NotEquivalent,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Classify { file } => classify_cmd(&file),
        Command::Curvature { file, frame } => curvature(&file, frame),
        Command::Atlas { family, c, grid, format, out } => atlas_cmd(family, c, &grid, format, out.as_deref()),
        Command::Equiv { first, second } => equiv(&first, &second),
        Command::Constcurv { file } => constcurv(&file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::NotEquivalent) => ExitCode::from(3),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn emit<T: Serialize + ?Sized>(value: &T) -> Result<(), Error> {
    let text = to_json_string_pretty(value)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct Validation {
    valid: bool,
    family: FamilyTag,
    basis: lorcurv::BasisLabel,
    signature: String,
    diagnostics: SignatureDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn validate(file: &Path) -> CmdResult {
    let doc = InputDocument::read(file)?;
    let tol = doc.tolerance()?;
    let diagnostics = validate_metric(&lorcurv::linalg::mat(doc.metric), &tol)?;
    let mut error = diagnostics.reason.clone();
    if error.is_none() {
        let checked = doc.family().and_then(|f| to_working_basis(f, &doc.metric_tensor()?));
        if let Err(e) = checked {
            error = Some(e.to_string());
        }
    }
    let report = Validation {
        valid: error.is_none(),
        family: doc.family,
        basis: doc.basis,
        signature: diagnostics.signature_string(),
        diagnostics,
        error: error.clone(),
    };
    emit(&report)?;
    match error {
        None => Ok(()),
        Some(msg) => {
            eprintln!("invalid: {msg}");
            Err(Failure::Rejected)
        }
    }
}

fn classify_cmd(file: &Path) -> CmdResult {
    let doc = InputDocument::read(file)?;
    emit(&canonical_form(doc.family()?, &doc.metric_tensor()?)?)?;
    Ok(())
}

fn curvature(file: &Path, frame: FrameChoice) -> CmdResult {
    let doc = InputDocument::read(file)?;
    let family = doc.family()?;
    let h = doc.metric_tensor()?;
    let hw = to_working_basis(family, &h)?;
    let frame = match frame {
        FrameChoice::Auto => orthonormal_frame(&hw)?,
        FrameChoice::Paper => {
            let cf = canonical_form(family, &h)?;
            let scale = 1.0 + max_abs(&cf.canonical_matrix);
            if max_abs(&(hw.matrix() - cf.canonical_matrix)) > 1e-9 * scale {
                return Err(Error::OutOfDomain(format!(
                    "--frame paper needs a metric already in canonical form ({}); canonicalize first",
                    cf.form_id
                ))
                .into());
            }
            atlas::paper_frame(family, cf.form_id, &cf.params)?
        }
    };
    emit(&CurvatureReport::compute(&working_algebra(family)?, &frame, hw.tolerance)?)?;
    Ok(())
}

fn atlas_cmd(family: FamilyArg, c: Option<f64>, grid: &str, format: FormatArg, out: Option<&Path>) -> CmdResult {
    let family = match (family, c) {
        (FamilyArg::Gi, None) => FamilyTag::GI,
        (FamilyArg::Gc, Some(c)) => FamilyTag::Gc(c),
        (FamilyArg::Gi, Some(_)) => {
            return Err(Error::Parse { path: "c".into(), message: "--c is only meaningful with --family Gc".into() }.into())
        }
        (FamilyArg::Gc, None) => {
            return Err(Error::Parse { path: "c".into(), message: "--family Gc needs --c".into() }.into())
        }
    };
    let family = family.validate()?;
    let grid: ParamGrid = grid.parse()?;
    let format = match format {
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Json => TableFormat::Json,
    };
    let rows = match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            let n = atlas::emit_tables(family, &grid, format, &mut w)?;
            w.flush().map_err(Error::from)?;
            n
        }
        None => atlas::emit_tables(family, &grid, format, io::stdout().lock())?,
    };
    if rows == 0 {
        eprintln!("warning: no grid point lies in the domain of any form");
    }
    Ok(())
}

fn equiv(first: &Path, second: &Path) -> CmdResult {
    let (a, b) = (InputDocument::read(first)?, InputDocument::read(second)?);
    let (fa, fb) = (a.family()?, b.family()?);
    if fa != fb {
        return Err(Error::FamilyMismatch(fa.to_string(), fb.to_string()).into());
    }
    let result = classify::equivalent(fa, &a.metric_tensor()?, &b.metric_tensor()?)?;
    emit(&result)?;
    if result.equivalent {
        Ok(())
    } else {
        eprintln!("not equivalent: {} vs {}", result.first.form_id, result.second.form_id);
        Err(Failure::NotEquivalent)
    }
}

fn constcurv(file: &Path) -> CmdResult {
    let doc = InputDocument::read(file)?;
    emit(&classify::constant_curvature_class(doc.family()?, &doc.metric_tensor()?)?)?;
    Ok(())
}
