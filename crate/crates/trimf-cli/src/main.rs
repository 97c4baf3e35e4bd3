//! trimf: batch CLI over the graded matrix-factorization library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use trimf::ar::{export_quiver, QuiverFormat};
use trimf::covers::{domestic_cover, orbit_names, DomesticBundleId};
use trimf::field::FieldCtx;
use trimf::frame::{
    build_frame, mf_domestic, mf_rank2_general, mf_rank2_symmetric, search_specialization_pair,
    search_specialization_with, stored_matrix_names,
};
use trimf::gmf::{
    is_indecomposable, is_reduced, is_symmetric, verify_mf, MatrixFactorization, MfJson,
};
use trimf::lgroup::{LElement, WeightTriple};
use trimf::verify;

#[derive(Parser)]
#[command(
    name = "trimf",
    version,
    about = "graded matrix factorizations of x1^a + x2^b + x3^c"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the whole verification suite and emit a report.
    Verify(VerifyArgs),
    /// Emit the explicit matrix factorization for a bundle id.
    Mf(MfArgs),
    /// Emit the factorization frame attached to a bundle's cover.
    Frame(FrameArgs),
    /// Search {0,±1} specializations of a bundle's frame.
    Specialize(SpecializeArgs),
    /// Emit the general rank-two factorization for arbitrary weights.
    Rank2(Rank2Args),
    /// Export a window of the Auslander-Reiten quiver.
    Quiver(QuiverArgs),
    /// Verify a factorization document.
    Check(CheckArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated fields, e.g. q,f2,f3,f5,f7
    #[arg(long, default_value = "q,f2,f3,f5,f7")]
    fields: String,
    /// Worker threads (TRIMF_JOBS overrides)
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    /// Write the JSON report here ("-" for stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MfArgs {
    /// Weight triple a,b,c
    #[arg(long)]
    weights: String,
    /// Bundle id: NAME[@tau=K][+l1,l2,l3,c]
    #[arg(long)]
    bundle: String,
    #[arg(long, default_value = "q")]
    field: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrameArgs {
    #[arg(long)]
    weights: String,
    /// Bundle id: NAME[@tau=K][+l1,l2,l3,c]
    #[arg(long)]
    bundle: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpecializeArgs {
    #[arg(long)]
    weights: String,
    #[arg(long)]
    bundle: String,
    /// Scalar alphabet, a subset of 0,1,-1
    #[arg(long, default_value = "0,1,-1")]
    scalars: String,
    /// Tie the second matrix to the first; pass --symmetric=false to
    /// search general pairs
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    symmetric: bool,
    #[arg(long, default_value_t = 16)]
    limit: usize,
    #[arg(long, default_value = "q")]
    field: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Rank2Args {
    #[arg(long)]
    weights: String,
    /// Extension parameter l1,l2,l3 (0 <= l_i <= p_i − 2)
    #[arg(long)]
    x: String,
    #[arg(long, default_value = "q")]
    field: String,
    /// Use the symmetric constructor (weight type (2,a,b) only)
    #[arg(long, default_value_t = false)]
    symmetric: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuiverArgs {
    #[arg(long)]
    weights: String,
    #[arg(long, default_value_t = 8)]
    window: i64,
    /// dot | json | text
    #[arg(long, default_value = "dot")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Factorization JSON document
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<WeightTriple, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad weight {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    if parts.len() != 3 {
        return Err(format!("expected three weights, got {}", parts.len()));
    }
    WeightTriple::new(parts[0], parts[1], parts[2]).map_err(|e| e.to_string())
}

/// NAME[@tau=K][+l1,l2,l3,c]
fn parse_bundle(w: WeightTriple, s: &str) -> Result<DomesticBundleId, String> {
    let (head, shift) = match s.split_once('+') {
        Some((h, rest)) => {
            let nums: Vec<i64> = rest
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<i64>()
                        .map_err(|e| format!("bad shift {p:?}: {e}"))
                })
                .collect::<Result<_, _>>()?;
            if nums.len() != 4 {
                return Err("shift must be l1,l2,l3,c".into());
            }
            (h, Some(w.element(nums[0], nums[1], nums[2], nums[3])))
        }
        None => (s, None),
    };
    let (name, tau) = match head.split_once("@tau=") {
        Some((n, k)) => (
            n,
            k.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad tau power {k:?}: {e}"))?,
        ),
        None => (head, 0),
    };
    let mut id = DomesticBundleId::new(w, name.trim()).at_tau(tau);
    if let Some(x) = shift {
        id = id.shifted(x);
    }
    Ok(id)
}

fn parse_fields(s: &str) -> Result<Vec<FieldCtx>, String> {
    s.split(',')
        .map(|p| FieldCtx::parse(p.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), String> {
    use std::io::Write;
    match out {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, body).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        _ => {
            // tolerate closed pipes from downstream pagers
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{body}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    fields: Vec<String>,
    jobs: usize,
    data_sha256: Vec<(String, String)>,
    checks: Vec<trimf::verify::CheckReport>,
    pass: bool,
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, String> {
    let fields = parse_fields(&args.fields)?;
    let jobs = std::env::var("TRIMF_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(args.jobs);
    let checks = verify::run_all(&fields, jobs);
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!("{c}");
    }
    eprintln!(
        "{}: {} of {} checks passed",
        if pass { "OK" } else { "FAILED" },
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    let report = VerifyReport {
        fields: fields.iter().map(|f| f.to_string()).collect(),
        jobs,
        data_sha256: verify::data_hashes(),
        checks,
        pass,
    };
    let body = serde_json::to_string_pretty(&report).expect("serializable report");
    if args.out.is_some() {
        emit(&args.out, &body)?;
    }
    Ok(pass)
}

fn load_mf(w: WeightTriple, bundle: &str, field: FieldCtx) -> Result<MatrixFactorization, String> {
    let id = parse_bundle(w, bundle)?;
    mf_domestic(&id, field).map_err(|e| {
        let valid = stored_matrix_names(w)
            .or_else(|_| orbit_names(w))
            .unwrap_or_default();
        format!("{e}; known bundles for {w}: {}", valid.join(", "))
    })
}

fn cmd_mf(args: &MfArgs) -> Result<(), String> {
    let w = parse_weights(&args.weights)?;
    let field = FieldCtx::parse(&args.field).map_err(|e| e.to_string())?;
    let mf = load_mf(w, &args.bundle, field)?;
    let rep = verify_mf(&mf).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err("internal error: stored factorization fails verification".into());
    }
    let body = serde_json::to_string_pretty(&mf.to_json().map_err(|e| e.to_string())?)
        .expect("serializable");
    emit(&args.out, &body)
}

fn cmd_frame(args: &FrameArgs) -> Result<(), String> {
    let w = parse_weights(&args.weights)?;
    let id = parse_bundle(w, &args.bundle)?;
    let cover = domestic_cover(&id).map_err(|e| e.to_string())?;
    let frame = build_frame(&cover).map_err(|e| e.to_string())?;
    let body = serde_json::to_string_pretty(&frame.to_json()).expect("serializable");
    emit(&args.out, &body)
}

#[derive(Serialize)]
struct SearchReport {
    weights: [i64; 3],
    bundle: String,
    present_entries: usize,
    classes_found: usize,
    truncated: bool,
    nodes_visited: u64,
    factorizations: Vec<MfJson>,
}

fn cmd_specialize(args: &SpecializeArgs) -> Result<(), String> {
    let w = parse_weights(&args.weights)?;
    let field = FieldCtx::parse(&args.field).map_err(|e| e.to_string())?;
    let id = parse_bundle(w, &args.bundle)?;
    let cover = domestic_cover(&id).map_err(|e| e.to_string())?;
    let frame = build_frame(&cover).map_err(|e| e.to_string())?;
    let alphabet: Vec<i64> = args
        .scalars
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad scalar {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    let result = if args.symmetric {
        search_specialization_with(&frame, field, args.limit, &alphabet)
    } else {
        search_specialization_pair(&frame, field, args.limit, &alphabet)
    }
    .map_err(|e| e.to_string())?;
    let report = SearchReport {
        weights: w.weights(),
        bundle: args.bundle.clone(),
        present_entries: frame.present_count(),
        classes_found: result.factorizations.len(),
        truncated: result.truncated,
        nodes_visited: result.nodes_visited,
        factorizations: result
            .factorizations
            .iter()
            .map(|mf| mf.to_json().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?,
    };
    let body = serde_json::to_string_pretty(&report).expect("serializable");
    emit(&args.out, &body)
}

fn cmd_rank2(args: &Rank2Args) -> Result<(), String> {
    let w = parse_weights(&args.weights)?;
    let field = FieldCtx::parse(&args.field).map_err(|e| e.to_string())?;
    let nums: Vec<i64> = args
        .x
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad exponent {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    if nums.len() != 3 {
        return Err("x must be l1,l2,l3".into());
    }
    let x: LElement = w.element(nums[0], nums[1], nums[2], 0);
    let mf = if args.symmetric {
        mf_rank2_symmetric(&w.zero(), &x, field)
    } else {
        mf_rank2_general(&w.zero(), &x, field)
    }
    .map_err(|e| e.to_string())?;
    let rep = verify_mf(&mf).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err("internal error: constructed factorization fails verification".into());
    }
    let body = serde_json::to_string_pretty(&mf.to_json().map_err(|e| e.to_string())?)
        .expect("serializable");
    emit(&args.out, &body)
}

fn cmd_quiver(args: &QuiverArgs) -> Result<(), String> {
    let w = parse_weights(&args.weights)?;
    let format = match args.format.as_str() {
        "dot" => QuiverFormat::Dot,
        "json" => QuiverFormat::Json,
        "text" => QuiverFormat::Text,
        other => return Err(format!("unknown format {other:?}; use dot, json or text")),
    };
    let body = export_quiver(w, args.window, format).map_err(|e| e.to_string())?;
    emit(&args.out, &body)
}

#[derive(Serialize)]
struct CheckOutcome {
    pass: bool,
    symmetric: Option<bool>,
    reduced: bool,
    indecomposable: Option<bool>,
    indecomposability_note: Option<String>,
    report: trimf::gmf::VerificationReport,
}

fn cmd_check(args: &CheckArgs) -> Result<bool, String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let doc: MfJson = serde_json::from_str(&text).map_err(|e| {
        format!(
            "{}: parse error at line {}, column {}: {e}",
            args.file.display(),
            e.line(),
            e.column()
        )
    })?;
    let mf = MatrixFactorization::from_json(&doc).map_err(|e| e.to_string())?;
    let report = verify_mf(&mf).map_err(|e| e.to_string())?;
    let symmetric = is_symmetric(&mf).ok();
    let reduced = is_reduced(&mf);
    let (indec, note) = if report.pass {
        match is_indecomposable(&mf) {
            Ok(b) => (Some(b), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("skipped: verification failed".into()))
    };
    let pass = report.pass;
    if !pass {
        for cell in report.residual_uv.iter().chain(report.residual_vu.iter()) {
            eprintln!(
                "residual at ({}, {}): {}",
                cell.row + 1,
                cell.col + 1,
                cell.value
            );
        }
        for g in report.grading_u.iter().chain(report.grading_v.iter()) {
            eprintln!(
                "inhomogeneous entry at ({}, {}): {}",
                g.row + 1,
                g.col + 1,
                g.entry
            );
        }
    }
    let outcome = CheckOutcome {
        pass,
        symmetric,
        reduced,
        indecomposable: indec,
        indecomposability_note: note,
        report,
    };
    let body = serde_json::to_string_pretty(&outcome).expect("serializable");
    emit(&args.out, &body)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, String> = match &cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Mf(a) => cmd_mf(a).map(|_| true),
        Cmd::Frame(a) => cmd_frame(a).map(|_| true),
        Cmd::Specialize(a) => cmd_specialize(a).map(|_| true),
        Cmd::Rank2(a) => cmd_rank2(a).map(|_| true),
        Cmd::Quiver(a) => cmd_quiver(a).map(|_| true),
        Cmd::Check(a) => cmd_check(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
