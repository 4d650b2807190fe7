use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use bjortho::error::{Error, Result};
use bjortho::norm::{parse_csv, NormSpec};
use bjortho::operator::{LinearOperator, OperatorSpace};
use bjortho::orthogonality::{is_bj_orthogonal, Decision, OrthoVerdict};
use bjortho::seed::MASTER_SEED;
use bjortho::suite::{run_suite, SuiteConfig};
use bjortho::witness::{EigenKernelCase, IdentityKernelCase, SymmetryLab};

#[derive(Parser)]
#[command(name = "bjortho", version, about = "Birkhoff-James orthogonality of vectors and operators on finite-dimensional normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide x ⊥_B y.
    VecOrth {
        #[arg(long)]
        norm: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Decide T ⊥_B A for operators given as "a,b;c,d" rows.
    OpOrth {
        #[arg(long)]
        norm: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_enum, default_value_t = Route::Both)]
        route: Route,
    },
    /// Build and certify a witness operator, or report which case applies.
    Witness {
        /// left, right, eigen or kernel (numeric aliases are also accepted).
        #[arg(long = "theorem", visible_alias = "check", value_parser = parse_check)]
        check: Check,
        /// Norm specification; defaults to the Euclidean norm in T's dimension.
        #[arg(long)]
        norm: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = MASTER_SEED)]
        seed: u64,
    },
    /// Run the check batteries and write a JSON report.
    Suite {
        /// TOML configuration; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time per check. Reports are then not reproducible.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Direct,
    Mt,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    /// Left symmetry refutation restricted to dimension 2.
    LeftPlanar,
    Left,
    Right,
    Eigen,
    Kernel,
}

fn parse_check(s: &str) -> std::result::Result<Check, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "left-planar" | "2.1" => Ok(Check::LeftPlanar),
        "left" | "2.3" => Ok(Check::Left),
        "right" | "2.4" => Ok(Check::Right),
        "eigen" | "2.5" => Ok(Check::Eigen),
        "kernel" | "2.6" => Ok(Check::Kernel),
        other => Err(format!("unknown check '{other}', expected left, left-planar, right, eigen or kernel")),
    }
}

/// Exit status plus whatever goes to standard output.
struct Outcome {
    code: u8,
    json: Option<String>,
}

/// Writes a line to standard output, tolerating a closed pipe.
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn verdict_code(v: &OrthoVerdict) -> u8 {
    if v.decision == Decision::Indeterminate {
        2
    } else {
        0
    }
}

fn vec_orth(norm: &str, x: &str, y: &str) -> Result<Outcome> {
    let spec: NormSpec = norm.parse()?;
    let x = nalgebra::DVector::from_vec(parse_csv(x)?);
    let y = nalgebra::DVector::from_vec(parse_csv(y)?);
    let v = is_bj_orthogonal(&spec, &x, &y)?;
    Ok(Outcome { code: verdict_code(&v), json: Some(to_json(&v)) })
}

fn op_orth(norm: &str, t: &str, a: &str, route: Route) -> Result<Outcome> {
    let spec: NormSpec = norm.parse()?;
    let t: LinearOperator = t.parse()?;
    let a: LinearOperator = a.parse()?;
    spec.check_dim(t.dim())?;
    spec.check_dim(a.dim())?;
    let space = OperatorSpace::new(&spec);
    match route {
        Route::Direct => {
            let v = space.bj_orthogonal(&t, &a)?;
            Ok(Outcome { code: verdict_code(&v), json: Some(to_json(&v)) })
        }
        Route::Mt => {
            let v = space.bj_orthogonal_via_attainment(&t, &a)?;
            Ok(Outcome { code: verdict_code(&v), json: Some(to_json(&v)) })
        }
        Route::Both => {
            let direct = space.bj_orthogonal(&t, &a)?;
            let via = space.bj_orthogonal_via_attainment(&t, &a);
            let undecided = direct.decision == Decision::Indeterminate
                || via.as_ref().map_or(true, |v| v.decision == Decision::Indeterminate);
            let agree = undecided || via.as_ref().is_ok_and(|v| v.decision == direct.decision);
            let code = if !agree {
                3
            } else {
                verdict_code(&direct)
            };
            let json = json!({
                "direct": direct,
                "via_attainment": via.as_ref().ok(),
                "via_attainment_error": via.as_ref().err().map(|e| e.tag()),
                "agree": via.is_ok().then_some(agree),
            });
            Ok(Outcome { code, json: Some(to_json(&json)) })
        }
    }
}

fn witness(check: Check, norm: Option<&str>, t: &str, seed: u64) -> Result<Outcome> {
    let t: LinearOperator = t.parse()?;
    let spec: NormSpec = match norm {
        Some(s) => s.parse()?,
        None => NormSpec::lp(2.0, t.dim())?,
    };
    spec.check_dim(t.dim())?;
    let lab = SymmetryLab::new(&spec);
    match check {
        Check::LeftPlanar if spec.dim() != 2 => Err(Error::HypothesisFailed(format!(
            "the planar check needs dimension 2, got {}",
            spec.dim()
        ))),
        Check::LeftPlanar | Check::Left => {
            let c = lab.refute_left_symmetry(&t, seed)?;
            Ok(Outcome { code: 0, json: Some(to_json(&c)) })
        }
        Check::Right => {
            let c = lab.refute_right_symmetry_smooth(&t, seed)?;
            Ok(Outcome { code: 0, json: Some(to_json(&c)) })
        }
        Check::Eigen => {
            let r = lab.eigen_kernel_check(&t, seed)?;
            let ok = r.case == EigenKernelCase::RankGeNMinus1 || r.certificate.is_some();
            Ok(Outcome { code: if ok { 0 } else { 6 }, json: Some(to_json(&r)) })
        }
        Check::Kernel => {
            let r = lab.identity_kernel_check(&t, seed)?;
            let settled = r.case == IdentityKernelCase::MutualWithIdentity || r.certificate.is_some();
            let code = if !r.i_perp_t.is_orthogonal() {
                9
            } else if settled {
                0
            } else {
                6
            };
            Ok(Outcome { code, json: Some(to_json(&r)) })
        }
    }
}

fn suite(config: Option<&PathBuf>, out: Option<&PathBuf>, timings: bool) -> Result<Outcome> {
    let cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            SuiteConfig::from_toml(&text)?
        }
        None => SuiteConfig::default(),
    };
    let report = run_suite(&cfg, timings)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let s = &report.summary;
    let line = format!(
        "{} records: {} pass, {} fail, {} indeterminate, {} hypothesis failed",
        report.records.len(),
        s.pass,
        s.fail,
        s.indeterminate,
        s.hypothesis_failed
    );
    let code = if s.fail > 0 { 2 } else { 0 };
    match out.cloned().or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
        Some(path) => {
            fs::write(&path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            emit(&line);
            emit(&format!("report written to {}", path.display()));
            Ok(Outcome { code, json: None })
        }
        None => {
            eprintln!("{line}");
            Ok(Outcome { code, json: Some(text.trim_end().to_string()) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.command {
        Command::VecOrth { norm, x, y } => vec_orth(norm, x, y),
        Command::OpOrth { norm, t, a, route } => op_orth(norm, t, a, *route),
        Command::Witness { check, norm, t, seed } => witness(*check, norm.as_deref(), t, *seed),
        Command::Suite { config, out, timings } => suite(config.as_ref(), out.as_ref(), *timings),
    };
    match res {
        Ok(o) => {
            if let Some(j) = o.json {
                emit(&j);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let code = e.exit_code();
            if code != 1 {
                emit(&to_json(&json!({ "error": e.tag(), "message": e.to_string() })));
            }
            eprintln!("error: {e}");
            ExitCode::from(code as u8)
        }
    }
}
