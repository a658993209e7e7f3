//! Command-line driver: solve, verify, eigs, selfcheck.

use qcurv::config::RunConfig;
use qcurv::error::{QcurvError, Result};
use qcurv::functional::FunctionalState;
use qcurv::optimizer::minimize_with;
use qcurv::problem::Dimension;
use qcurv::report::{
    write_eigs_csv, write_json, write_profiles, ResultFile, RunSummary, SolveScalars,
};
use qcurv::solution::AssembledSolution;
use qcurv::sphere::SpectralField;
use qcurv::verify::verify;
use std::path::{Path, PathBuf};
use std::time::Instant;

const USAGE: &str = "\
qcurv — constant negative Q-curvature solver and verifier

USAGE:
    qcurv solve <config.json> [--trace] [--out-dir <dir>]
    qcurv verify <config.json> <result.json> [--out-dir <dir>]
    qcurv eigs --n <n> --L <L>
    qcurv selfcheck

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 verification failure.
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

struct CommonFlags {
    trace: bool,
    out_dir: Option<PathBuf>,
    positional: Vec<String>,
}

fn parse_flags(args: &[String]) -> Result<CommonFlags> {
    let mut flags = CommonFlags {
        trace: false,
        out_dir: None,
        positional: Vec::new(),
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--trace" => flags.trace = true,
            "--out-dir" => {
                let dir = it.next().ok_or_else(|| {
                    QcurvError::InvalidInput("--out-dir requires a directory argument".into())
                })?;
                flags.out_dir = Some(PathBuf::from(dir));
            }
            other if other.starts_with("--") => {
                return Err(QcurvError::InvalidInput(format!("unknown flag {other}")));
            }
            other => flags.positional.push(other.to_string()),
        }
    }
    Ok(flags)
}

fn run(args: &[String]) -> Result<i32> {
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return Ok(1);
    };
    match command.as_str() {
        "solve" => cmd_solve(&args[1..]),
        "verify" => cmd_verify(&args[1..]),
        "eigs" => cmd_eigs(&args[1..]),
        "selfcheck" => {
            let mut stdout = std::io::stdout();
            Ok(if qcurv::selfcheck::run_selfcheck(&mut stdout) {
                0
            } else {
                3
            })
        }
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            Ok(0)
        }
        other => Err(QcurvError::InvalidInput(format!(
            "unknown subcommand `{other}`; see --help"
        ))),
    }
}

fn resolve_out_dir(flags: &CommonFlags, config: &RunConfig) -> Result<PathBuf> {
    let dir = flags
        .out_dir
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn case_name(tag: qcurv::problem::CaseTag) -> &'static str {
    match tag {
        qcurv::problem::CaseTag::I => "I",
        qcurv::problem::CaseTag::II => "II",
        qcurv::problem::CaseTag::III => "III",
    }
}

fn cmd_solve(args: &[String]) -> Result<i32> {
    let flags = parse_flags(args)?;
    let [config_path] = flags.positional.as_slice() else {
        return Err(QcurvError::InvalidInput(
            "solve expects exactly one argument: <config.json>".into(),
        ));
    };
    let config = RunConfig::load(Path::new(config_path))?;
    let spec = config.problem_spec()?;
    let solve_opts = config.solve_options();
    solve_opts.validate()?;
    let out_dir = resolve_out_dir(&flags, &config)?;
    let mut summary = RunSummary::new(config.clone());

    eprintln!(
        "solve: n = {}, Lambda = {:.6}, beta = {}, case {}",
        spec.dim.get(),
        spec.lambda,
        spec.beta,
        case_name(spec.case_tag)
    );

    let t0 = Instant::now();
    let state = FunctionalState::assemble(spec.clone(), solve_opts.l, solve_opts.m)?;
    summary
        .timings
        .insert("build".into(), t0.elapsed().as_secs_f64());

    let t1 = Instant::now();
    let result = if flags.trace {
        println!("iteration,J,grad_norm,step");
        let mut tracer = |rec: &qcurv::optimizer::IterRecord| {
            println!(
                "{},{:.16e},{:.16e},{:.16e}",
                rec.iter, rec.j, rec.grad_norm, rec.step
            );
        };
        minimize_with(&state, &solve_opts, Some(&mut tracer))?
    } else {
        minimize_with(&state, &solve_opts, None)?
    };
    summary
        .timings
        .insert("minimize".into(), t1.elapsed().as_secs_f64());
    eprintln!(
        "minimize: converged = {}, iterations = {}, J = {:.10}, |g| = {:.3e}, EL residual = {:.3e}",
        result.converged, result.iterations, result.j_value, result.grad_norm, result.el_residual
    );

    let result_file = ResultFile::new(&config, &result, case_name(spec.case_tag));
    result_file.save(&out_dir.join("result.json"))?;
    if !result.converged {
        return Err(QcurvError::Numerical(format!(
            "solver did not converge within {} iterations (|g| = {:.3e}); \
             result.json written for inspection",
            solve_opts.max_iter, result.grad_norm
        )));
    }

    let t2 = Instant::now();
    let sol = AssembledSolution::new(state, &result)?;
    let verify_opts = config.verify_options();
    let (report, profiles) = verify(&sol, &verify_opts)?;
    summary
        .timings
        .insert("verify".into(), t2.elapsed().as_secs_f64());

    write_profiles(&out_dir.join("profiles.csv"), &profiles)?;
    write_json(&out_dir.join("verification.json"), &report)?;

    summary.solve = Some(SolveScalars {
        case_tag: case_name(spec.case_tag).into(),
        j_value: result.j_value,
        grad_norm: result.grad_norm,
        el_residual: result.el_residual,
        c_psi: result.c_psi,
        iterations: result.iterations,
        converged: result.converged,
    });
    summary.verification = Some(report.clone());
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).map_err(|e| QcurvError::Config(e.to_string()))?
    );

    if !report.pass {
        eprintln!("verification failed: {}", report.failures.join("; "));
        return Ok(3);
    }
    Ok(0)
}

fn cmd_verify(args: &[String]) -> Result<i32> {
    let flags = parse_flags(args)?;
    let [config_path, result_path] = flags.positional.as_slice() else {
        return Err(QcurvError::InvalidInput(
            "verify expects two arguments: <config.json> <result.json>".into(),
        ));
    };
    let config = RunConfig::load(Path::new(config_path))?;
    let spec = config.problem_spec()?;
    let stored = ResultFile::load(Path::new(result_path))?;
    let stored_spec = stored.config.problem_spec()?;
    if stored_spec != spec {
        return Err(QcurvError::InvalidInput(
            "result.json was produced for a different problem than this config".into(),
        ));
    }
    let out_dir = resolve_out_dir(&flags, &config)?;

    let sol = AssembledSolution::from_spec(
        spec,
        stored.l,
        stored.m,
        SpectralField::new(stored.psi.clone())?,
        stored.c_psi,
    )?;
    let mut summary = RunSummary::new(config.clone());
    let t0 = Instant::now();
    let (report, profiles) = verify(&sol, &config.verify_options())?;
    summary
        .timings
        .insert("verify".into(), t0.elapsed().as_secs_f64());
    write_profiles(&out_dir.join("profiles.csv"), &profiles)?;
    write_json(&out_dir.join("verification.json"), &report)?;
    summary.verification = Some(report.clone());
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).map_err(|e| QcurvError::Config(e.to_string()))?
    );
    if !report.pass {
        eprintln!("verification failed: {}", report.failures.join("; "));
        return Ok(3);
    }
    Ok(0)
}

fn cmd_eigs(args: &[String]) -> Result<i32> {
    let mut n: Option<u32> = None;
    let mut l: Option<usize> = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--n" => {
                n = Some(
                    it.next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| QcurvError::InvalidInput("--n needs an integer".into()))?,
                )
            }
            "--L" => {
                l = Some(
                    it.next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| QcurvError::InvalidInput("--L needs an integer".into()))?,
                )
            }
            other => {
                return Err(QcurvError::InvalidInput(format!(
                    "eigs: unexpected argument {other}"
                )))
            }
        }
    }
    let n = n.ok_or_else(|| QcurvError::InvalidInput("eigs requires --n <n>".into()))?;
    let l = l.ok_or_else(|| QcurvError::InvalidInput("eigs requires --L <L>".into()))?;
    let dim = Dimension::new(n)?;
    let mut stdout = std::io::stdout();
    write_eigs_csv(&mut stdout, dim, l)?;
    Ok(0)
}
