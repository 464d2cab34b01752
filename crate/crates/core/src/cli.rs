//! Command-line front end.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or parse error,
//! 3 resource cap exceeded. Results go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::endo::{Endo, DEFAULT_ORDER_CAP};
use crate::error::Error;
use crate::expr::parse_expr;
use crate::finite::{
    build_sigma, build_wn, closure_endos, default_shadow_generators, gl2_shadow, mod2_image,
    normal_closure_in_finite, sn_invariant_subgroups, DEFAULT_CLOSURE_CAP,
};
use crate::matrix::det_sign_map;
use crate::nielsen::{Reducer, DEFAULT_STEP_BUDGET};
use crate::suite::{parse_range, parse_suite_file, run_checks, run_suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "autfn", version, about = "Computations in Aut(F_n)")]
#[command(after_help = "Juxtaposition composes left to right: `x y` applies x first, then y.")]
struct Cli {
    /// Emit a JSON object with `command`, `rank`, `result` and `status` keys
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Rank {
    /// Rank of the free group
    #[arg(short = 'n', long = "rank")]
    n: usize,
}

#[derive(Debug, clap::Args)]
struct Target {
    /// Element as a generator expression
    #[arg(required_unless_present = "images", conflicts_with = "images")]
    expr: Option<String>,
    /// Element as basis images, e.g. "a1 a2 ; a2 ; a3"
    #[arg(long)]
    images: Option<String>,
}

#[derive(Debug, clap::Args)]
struct Budget {
    /// Maximum number of Nielsen moves
    #[arg(long, env = "AUTFN_STEP_BUDGET", default_value_t = DEFAULT_STEP_BUDGET)]
    budget: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GroupName {
    Wn,
    Sigma,
    Shadow,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the basis images of an expression
    Eval {
        #[command(flatten)]
        rank: Rank,
        expr: String,
    },
    /// Print the abelianization and its determinant
    Ab {
        #[command(flatten)]
        rank: Rank,
        /// Reduce entries modulo m
        #[arg(long = "mod")]
        modulus: Option<i64>,
        expr: String,
    },
    /// Print the order, or CAP-EXCEEDED
    Order {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, env = "AUTFN_ORDER_CAP", default_value_t = DEFAULT_ORDER_CAP)]
        cap: u64,
        expr: String,
    },
    /// Decide whether an endomorphism is an automorphism
    IsAut {
        #[command(flatten)]
        rank: Rank,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
    },
    /// Print the inverse automorphism
    Invert {
        #[command(flatten)]
        rank: Rank,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
    },
    /// Write an automorphism as a product of elementary generators
    Factor {
        #[command(flatten)]
        rank: Rank,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
    },
    /// Run the relation catalog, or a suite file
    Suite {
        /// Inclusive rank range, e.g. 3..6
        #[arg(long = "n-range", default_value = "3..6")]
        n_range: String,
        /// Run the entries of this file instead of the built-in catalog
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Enumerate the finite group generated by expressions
    Closure {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, env = "AUTFN_CLOSURE_CAP", default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// List the S_n-invariant subgroups of (Z/2)^n
    Subgroups {
        #[command(flatten)]
        rank: Rank,
    },
    /// Enumerate the mod-2 image generated by all l(i,j) and iota, or by the given expressions
    Shadow {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, env = "AUTFN_CLOSURE_CAP", default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
        generators: Vec<String>,
    },
    /// Order of the normal closure of an element in a finite group
    NormalClosure {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, value_enum)]
        group: GroupName,
        #[arg(long, env = "AUTFN_CLOSURE_CAP", default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
        expr: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Ab { .. } => "ab",
            Command::Order { .. } => "order",
            Command::IsAut { .. } => "is-aut",
            Command::Invert { .. } => "invert",
            Command::Factor { .. } => "factor",
            Command::Suite { .. } => "suite",
            Command::Closure { .. } => "closure",
            Command::Subgroups { .. } => "subgroups",
            Command::Shadow { .. } => "shadow",
            Command::NormalClosure { .. } => "normal-closure",
        }
    }
}

/// What a command produced: text for humans, a JSON value, and an exit code.
struct Outcome {
    text: String,
    result: Value,
    status: &'static str,
    code: u8,
}

impl Outcome {
    fn ok(text: String, result: Value) -> Self {
        Outcome {
            text,
            result,
            status: "ok",
            code: EXIT_OK,
        }
    }

    fn failed(text: String, result: Value) -> Self {
        Outcome {
            text,
            result,
            status: "fail",
            code: EXIT_CHECK_FAILED,
        }
    }
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_cap_exceeded() {
        EXIT_CAP
    } else if matches!(e, Error::NotAnAutomorphism) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_USAGE
    }
}

/// Runs the command line `args` (program name first).
pub fn run(
    args: impl IntoIterator<Item = OsString>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let name = cli.command.name();
    let rank = rank_value(&cli.command);
    match execute(&cli.command) {
        Ok(outcome) => {
            if cli.json {
                let doc = json!({
                    "command": name,
                    "rank": rank,
                    "result": outcome.result,
                    "status": outcome.status,
                });
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("json value")
                );
            } else {
                let _ = writeln!(out, "{}", outcome.text);
            }
            outcome.code
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            if cli.json {
                let status = match code {
                    EXIT_CAP => "cap-exceeded",
                    EXIT_CHECK_FAILED => "fail",
                    _ => "error",
                };
                let doc = json!({
                    "command": name,
                    "rank": rank,
                    "result": { "error": e.to_string() },
                    "status": status,
                });
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("json value")
                );
            } else if code == EXIT_CAP {
                let _ = writeln!(out, "CAP-EXCEEDED");
            } else if code == EXIT_CHECK_FAILED {
                let _ = writeln!(out, "{e}");
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn rank_value(cmd: &Command) -> Value {
    match cmd {
        Command::Eval { rank, .. }
        | Command::Ab { rank, .. }
        | Command::Order { rank, .. }
        | Command::IsAut { rank, .. }
        | Command::Invert { rank, .. }
        | Command::Factor { rank, .. }
        | Command::Closure { rank, .. }
        | Command::Subgroups { rank }
        | Command::Shadow { rank, .. }
        | Command::NormalClosure { rank, .. } => json!(rank.n),
        Command::Suite { n_range, .. } => match parse_range(n_range) {
            Ok(r) => json!([r.start(), r.end()]),
            Err(_) => Value::Null,
        },
    }
}

fn target_endo(target: &Target, n: usize) -> Result<Endo, Error> {
    match (&target.expr, &target.images) {
        (_, Some(images)) => {
            let f = Endo::parse_images(images)?;
            if f.rank() != n {
                return Err(Error::RankMismatch {
                    left: n,
                    right: f.rank(),
                });
            }
            Ok(f)
        }
        (Some(expr), None) => parse_expr(expr, n)?.evaluate(n),
        (None, None) => Err(Error::Semantic("no element given".into())),
    }
}

fn endo_json(f: &Endo) -> Value {
    json!(f.images().iter().map(|w| w.to_string()).collect::<Vec<_>>())
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Eval { rank, expr } => {
            let f = parse_expr(expr, rank.n)?.evaluate(rank.n)?;
            Ok(Outcome::ok(
                f.to_string(),
                json!({ "images": endo_json(&f) }),
            ))
        }
        Command::Ab {
            rank,
            modulus,
            expr,
        } => {
            let f = parse_expr(expr, rank.n)?.evaluate(rank.n)?;
            let m = f.abelianize();
            let det = m.det()?;
            match modulus {
                None => Ok(Outcome::ok(
                    format!("{m}\ndet = {det}"),
                    json!({ "matrix": m, "det": det }),
                )),
                Some(q) => {
                    let r = m.mod_reduce(*q)?;
                    let det_mod = det.rem_euclid(*q);
                    Ok(Outcome::ok(
                        format!("{r}\ndet = {det_mod} (mod {q})"),
                        json!({ "matrix": r, "det": det_mod, "modulus": q }),
                    ))
                }
            }
        }
        Command::Order { rank, cap, expr } => {
            let f = parse_expr(expr, rank.n)?.evaluate(rank.n)?;
            let k = f.order_with_cap(*cap)?;
            Ok(Outcome::ok(k.to_string(), json!({ "order": k })))
        }
        Command::IsAut {
            rank,
            target,
            budget,
        } => {
            let f = target_endo(target, rank.n)?;
            let cert = Reducer::with_budget(budget.budget).reduce(f.images())?;
            let result = json!({
                "automorphism": cert.is_automorphism(),
                "moves": cert.moves.len(),
                "final": cert.final_tuple.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            });
            if cert.is_automorphism() {
                Ok(Outcome::ok("automorphism".into(), result))
            } else {
                Ok(Outcome::failed("not an automorphism".into(), result))
            }
        }
        Command::Invert {
            rank,
            target,
            budget,
        } => {
            let f = target_endo(target, rank.n)?;
            let g = Reducer::with_budget(budget.budget).inverse(&f)?;
            Ok(Outcome::ok(
                g.to_string(),
                json!({ "images": endo_json(&g) }),
            ))
        }
        Command::Factor {
            rank,
            target,
            budget,
        } => {
            let f = target_endo(target, rank.n)?;
            let gens = Reducer::with_budget(budget.budget).factor(&f)?;
            let text = if gens.is_empty() {
                "1".to_string()
            } else {
                gens.iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            Ok(Outcome::ok(
                text,
                json!({ "factors": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>() }),
            ))
        }
        Command::Suite { n_range, file } => {
            let range = parse_range(n_range).map_err(|m| Failure::Lib(Error::Semantic(m)))?;
            let report = match file {
                None => run_suite(range)?,
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    let checks = parse_suite_file(&text, range.clone())?;
                    run_checks(&checks, range)?
                }
            };
            let result = serde_json::to_value(&report).expect("report serializes");
            if report.all_passed() {
                Ok(Outcome::ok(report.to_string(), result))
            } else {
                Ok(Outcome::failed(report.to_string(), result))
            }
        }
        Command::Closure {
            rank,
            cap,
            generators,
        } => {
            let gens = generators
                .iter()
                .map(|t| parse_expr(t, rank.n)?.evaluate(rank.n))
                .collect::<Result<Vec<_>, _>>()?;
            let group = closure_endos(&gens, rank.n, *cap)?;
            let mut dets = [0usize; 2];
            for g in group.iter() {
                if det_sign_map(g)? == 1 {
                    dets[0] += 1;
                } else {
                    dets[1] += 1;
                }
            }
            Ok(Outcome::ok(
                format!(
                    "order {} ({} with det +1, {} with det -1)",
                    group.len(),
                    dets[0],
                    dets[1]
                ),
                json!({ "order": group.len(), "det_plus": dets[0], "det_minus": dets[1] }),
            ))
        }
        Command::Subgroups { rank } => {
            let subs = sn_invariant_subgroups(rank.n)?;
            let text = subs
                .iter()
                .map(|s| {
                    let label = serde_json::to_value(s.label).expect("label serializes");
                    format!("{} order {}", label.as_str().unwrap_or("other"), s.order)
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::ok(
                text,
                serde_json::to_value(&subs).expect("serializes"),
            ))
        }
        Command::Shadow {
            rank,
            cap,
            generators,
        } => {
            let gens = if generators.is_empty() {
                default_shadow_generators(rank.n)?
            } else {
                generators
                    .iter()
                    .map(|t| parse_expr(t, rank.n)?.evaluate(rank.n))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let group = gl2_shadow(rank.n, &gens, *cap)?;
            Ok(Outcome::ok(
                format!("order {}", group.len()),
                json!({ "order": group.len() }),
            ))
        }
        Command::NormalClosure {
            rank,
            group,
            cap,
            expr,
        } => {
            let n = rank.n;
            let f = parse_expr(expr, n)?.evaluate(n)?;
            let (group_order, closure_order) = match group {
                GroupName::Wn => {
                    let g = build_wn(n)?;
                    (g.len(), normal_closure_in_finite(&g, &f)?.len())
                }
                GroupName::Sigma => {
                    let g = build_sigma(n)?;
                    (g.len(), normal_closure_in_finite(&g, &f)?.len())
                }
                GroupName::Shadow => {
                    let g = gl2_shadow(n, &default_shadow_generators(n)?, *cap)?;
                    (
                        g.len(),
                        normal_closure_in_finite(&g, &mod2_image(&f)?)?.len(),
                    )
                }
            };
            Ok(Outcome::ok(
                format!("normal closure order {closure_order} in group of order {group_order}"),
                json!({ "order": closure_order, "group_order": group_order }),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("autfn")
            .chain(args.iter().copied())
            .map(OsString::from);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn eval_prints_images() {
        let (code, out, _) = call(&["eval", "-n", "3", "z l(1,2) z"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "a1 -> a1 a2 ; a2 -> a2 ; a3 -> a3");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["eval", "-n", "3", "l(1,1)"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "l(1,2)"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["is-aut", "-n", "2", "--images", "a1 a1 ; a2"]).0,
            EXIT_CHECK_FAILED
        );
        let (code, out, _) = call(&["order", "-n", "2", "--cap", "10", "l(1,2)"]);
        assert_eq!(code, EXIT_CAP);
        assert_eq!(out.trim(), "CAP-EXCEEDED");
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn json_envelope() {
        let (code, out, _) = call(&["--json", "order", "-n", "3", "alpha"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "order");
        assert_eq!(v["rank"], 3);
        assert_eq!(v["result"]["order"], 2);
        assert_eq!(v["status"], "ok");
    }
}
