//! Command-line front end.

pub mod context_file;
pub mod parse;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bundle_calc::{self, Bundle, BundleExpr};
use crate::chow_fibration::{self, DivClassW};
use crate::curve_pic::CurveContext;
use crate::error::{Error, Result};
use crate::isogeny_oracle::{self, DecompositionVerdict, IsogenySpec};
use crate::relcan_ledger;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ellsurf", version, about = "Vector bundle and Chow ring calculator over an elliptic curve")]
pub struct Cli {
    /// Curve context file; the bundled default is used when omitted.
    #[arg(long, global = true)]
    pub context: Option<PathBuf>,
    /// Emit JSON instead of human-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cross-check computed decompositions through the 3-isogeny pullback.
    #[arg(long, global = true)]
    pub oracle: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the claim ledger.
    Verify,
    /// Evaluate a bundle expression and apply an operation.
    Bundle { expr: String, op: BundleOp },
    /// Intersection number of four divisor classes on P(V).
    Chow {
        v: String,
        #[arg(num_args = 4, value_names = ["D1", "D2", "D3", "D4"], allow_hyphen_values = true)]
        classes: Vec<String>,
    },
    /// Invariants of a complete intersection `ci(V; Q=..; X=..)`.
    Surface { ci: String },
    /// Moduli count for a complete intersection.
    ModuliDim { ci: String },
    /// Genus bound for a given K^2.
    GenusBound {
        #[arg(allow_hyphen_values = true)]
        k2: i64,
    },
    /// Isogeny oracle.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Check that the second expression is a plausible decomposition of the first.
    Check { lhs: String, rhs: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BundleOp {
    Show,
    Stats,
    Dual,
    Det,
    Cohomology,
    Sym2,
    Sym3,
    Wedge2,
    Semistable,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }
}

pub fn load_context(path: Option<&PathBuf>) -> Result<CurveContext> {
    match path {
        None => Ok(context_file::default_context()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            context_file::parse_context(&src)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(out) => out,
        Err(e) => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let ctx = load_context(cli.context.as_ref())?;
    match &cli.command {
        Command::Verify => Ok(verify(&ctx, cli.json)),
        Command::Bundle { expr, op } => bundle_cmd(&ctx, expr, *op, cli),
        Command::Chow { v, classes } => {
            let v = eval_bundle(&ctx, v)?;
            let ds = classes.iter().map(|c| divisor(&ctx, c)).collect::<Result<Vec<_>>>()?;
            let n = chow_fibration::intersect4(&v, [&ds[0], &ds[1], &ds[2], &ds[3]])?;
            Ok(Outcome::ok(if cli.json { format!("{}\n", json!({ "intersection": n })) } else { format!("{n}\n") }))
        }
        Command::Surface { ci } => {
            let (v, q, x) = ci_spec(&ctx, ci)?;
            let s = chow_fibration::ci_surface_invariants(&ctx, &v, &q, &x)?;
            let out = if cli.json {
                format!(
                    "{}\n",
                    json!({
                        "K2": s.k2, "pg": s.pg, "q": s.q, "h0_O": s.h0_o, "chi": s.chi,
                        "fibre_canonical_degree": s.fibre_canonical_degree, "fibre_genus": s.fibre_genus,
                    })
                )
            } else {
                format!(
                    "K^2 = {}\np_g = {}\nq = {}\nh0(O_S) = {}\nchi(O_S) = {}\nK.F = {}\nfibre genus = {}\n",
                    s.k2, s.pg, s.q, s.h0_o, s.chi, s.fibre_canonical_degree, s.fibre_genus
                )
            };
            Ok(Outcome::ok(out))
        }
        Command::ModuliDim { ci } => {
            let (v, q, x) = ci_spec(&ctx, ci)?;
            let n = chow_fibration::moduli_dimension(&ctx, &v, &q, &x)?;
            Ok(Outcome::ok(if cli.json { format!("{}\n", json!({ "moduli_dimension": n })) } else { format!("{n}\n") }))
        }
        Command::GenusBound { k2 } => {
            let g = relcan_ledger::genus_bound(*k2)?;
            Ok(Outcome::ok(if cli.json {
                format!("{}\n", json!({ "K2": k2, "genus_bound": g }))
            } else {
                format!("{g}\n")
            }))
        }
        Command::Oracle { command: OracleCommand::Check { lhs, rhs } } => {
            let lhs = parse::parse_bundle(lhs)?.to_expr(&ctx)?;
            let rhs = eval_bundle(&ctx, rhs)?;
            let verdict = isogeny_oracle::check_decomposition(&oracle_spec(&ctx)?, &lhs, &rhs)?;
            let mut out = Outcome::ok(render_verdict(&ctx, &verdict, cli.json));
            if !verdict.pass {
                out.code = EXIT_FAIL;
            }
            Ok(out)
        }
    }
}

fn verify(ctx: &CurveContext, as_json: bool) -> Outcome {
    let report = relcan_ledger::run_ledger(ctx);
    let stdout = if as_json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    } else {
        report.to_table()
    };
    let code = if report.failures() == 0 { EXIT_OK } else { EXIT_FAIL };
    Outcome { code, stdout, stderr: String::new() }
}

fn eval_bundle(ctx: &CurveContext, src: &str) -> Result<Bundle> {
    parse::parse_bundle(src)?.to_expr(ctx)?.eval(ctx)
}

fn divisor(ctx: &CurveContext, src: &str) -> Result<DivClassW> {
    parse::parse_divisor(src)?.to_class(ctx)
}

fn ci_spec(ctx: &CurveContext, src: &str) -> Result<(Bundle, DivClassW, DivClassW)> {
    let ast = parse::parse_ci(src)?;
    let v = ast.v.to_expr(ctx)?.eval(ctx)?;
    Ok((v, ast.q.to_class(ctx)?, ast.x.to_class(ctx)?))
}

/// Kernel is `eta` when the context names it, otherwise the first 3-torsion generator.
fn oracle_spec(ctx: &CurveContext) -> Result<IsogenySpec> {
    let kernel = match ctx.point("eta") {
        Ok(p) => p,
        Err(_) => {
            let (name, _) =
                ctx.torsion_generators().iter().find(|(_, o)| *o == 3).ok_or(Error::InsufficientTorsionDeclared(3))?;
            ctx.point(name)?
        }
    };
    IsogenySpec::with_kernel(ctx, kernel)
}

fn render_verdict(ctx: &CurveContext, v: &DecompositionVerdict, as_json: bool) -> String {
    if as_json {
        return format!(
            "{}\n",
            json!({
                "pass": v.pass,
                "rank": [v.rank.0, v.rank.1],
                "degree": [v.degree.0, v.degree.1],
                "det": [ctx.format_class(&v.det.0), ctx.format_class(&v.det.1)],
                "pullback_match": v.pullback_match,
                "note": v.note,
            })
        );
    }
    format!(
        "oracle: {}\n  rank {} vs {}\n  degree {} vs {}\n  det {} vs {}\n  pullback match: {}\n  note: {}\n",
        if v.pass { "PASS" } else { "FAIL" },
        v.rank.0,
        v.rank.1,
        v.degree.0,
        v.degree.1,
        ctx.format_class(&v.det.0),
        ctx.format_class(&v.det.1),
        v.pullback_match,
        v.note
    )
}

fn bundle_cmd(ctx: &CurveContext, src: &str, op: BundleOp, cli: &Cli) -> Result<Outcome> {
    let expr = parse::parse_bundle(src)?.to_expr(ctx)?;
    let v = expr.eval(ctx)?;
    let decomposed = |e: BundleExpr| -> Result<(BundleExpr, Bundle)> {
        let b = e.eval(ctx)?;
        Ok((e, b))
    };
    let result: Option<(BundleExpr, Bundle)> = match op {
        BundleOp::Show => Some((expr.clone(), v.clone())),
        BundleOp::Dual => Some(decomposed(BundleExpr::dual(expr.clone()))?),
        BundleOp::Sym2 => Some(decomposed(BundleExpr::sym(2, expr.clone()))?),
        BundleOp::Sym3 => Some(decomposed(BundleExpr::sym(3, expr.clone()))?),
        BundleOp::Wedge2 => Some(decomposed(BundleExpr::wedge2(expr.clone()))?),
        _ => None,
    };
    let mut out = String::new();
    let mut code = EXIT_OK;
    if let Some((e, b)) = &result {
        if cli.json {
            let mut obj = json!({ "bundle": b.display(ctx), "rank": b.rank(), "degree": b.degree() });
            if cli.oracle {
                let verdict = isogeny_oracle::check_decomposition(&oracle_spec(ctx)?, e, b)?;
                code = if verdict.pass { EXIT_OK } else { EXIT_FAIL };
                obj["oracle"] = json!({ "pass": verdict.pass, "note": verdict.note });
            }
            writeln!(out, "{obj}").unwrap();
        } else {
            writeln!(out, "{}", b.display(ctx)).unwrap();
            if cli.oracle {
                let verdict = isogeny_oracle::check_decomposition(&oracle_spec(ctx)?, e, b)?;
                code = if verdict.pass { EXIT_OK } else { EXIT_FAIL };
                out.push_str(&render_verdict(ctx, &verdict, false));
            }
        }
        return Ok(Outcome { code, stdout: out, stderr: String::new() });
    }
    match op {
        BundleOp::Stats => {
            let s = v.stats()?;
            if cli.json {
                let obj = json!({
                    "rank": s.rank, "degree": s.degree,
                    "slope": s.slope.to_string(), "maxslope": s.maxslope.to_string(),
                });
                writeln!(out, "{obj}").unwrap();
            } else {
                writeln!(out, "rank {}, degree {}, slope {}, maxslope {}", s.rank, s.degree, s.slope, s.maxslope)
                    .unwrap();
            }
        }
        BundleOp::Det => {
            let d = ctx.format_class(&bundle_calc::det(ctx, &v));
            if cli.json {
                writeln!(out, "{}", json!({ "det": d })).unwrap();
            } else {
                writeln!(out, "{d}").unwrap();
            }
        }
        BundleOp::Cohomology => {
            let (h0, h1) = bundle_calc::cohomology_b(&v);
            if cli.json {
                writeln!(out, "{}", json!({ "h0": h0, "h1": h1 })).unwrap();
            } else {
                writeln!(out, "h0 = {h0}, h1 = {h1}").unwrap();
            }
        }
        BundleOp::Semistable => {
            let (ss, st) = (bundle_calc::is_semistable(&v), bundle_calc::is_stable(&v));
            if cli.json {
                writeln!(out, "{}", json!({ "semistable": ss, "stable": st })).unwrap();
            } else {
                writeln!(out, "semistable: {ss}, stable: {st}").unwrap();
            }
        }
        _ => unreachable!("handled above"),
    }
    Ok(Outcome { code, stdout: out, stderr: String::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let out = run_args(std::iter::once("ellsurf").chain(args.iter().copied()));
        assert_eq!(out.code, EXIT_OK, "{out:?}");
        out.stdout
    }

    #[test]
    fn genus_bound_four_is_six() {
        assert_eq!(run_ok(&["genus-bound", "4"]), "6\n");
    }

    #[test]
    fn chow_example() {
        let out = run_ok(&["chow", "E(3,1;O)(+)L(eta-O)", "T", "T", "3*T-H(tau)", "2*T+H(eta)-H(O)"]);
        assert_eq!(out, "4\n");
    }

    #[test]
    fn parse_errors_exit_two() {
        let out = run_args(["ellsurf", "bundle", "E(3,1;O", "stats"]);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stderr.contains("1:8"), "{}", out.stderr);
        let out = run_args(["ellsurf", "--frobnicate", "verify"]);
        assert_eq!(out.code, EXIT_INPUT);
    }

    #[test]
    fn bundle_ops() {
        assert_eq!(
            run_ok(&["bundle", "E(3,1;O) (+) L(eta-O)", "stats"]),
            "rank 4, degree 1, slope 1/4, maxslope 1/3\n"
        );
        assert_eq!(run_ok(&["bundle", "L(eta-O) (+) L(O)", "cohomology"]), "h0 = 1, h1 = 0\n");
    }

    #[test]
    fn oracle_flag_on_sym2() {
        let out = run_ok(&["--oracle", "bundle", "E(3,1;O)", "sym2"]);
        assert!(out.contains("oracle: PASS"), "{out}");
    }
}
