use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ftau::construct::{
    commutator_trick, connect_tuple, connect_tuple_derived, defect_search, defect_witness,
    factor_local, random_element, Certificate, RandomFlavor,
};
use ftau::element::Element;
use ftau::expr::json::{canonical, element_document, element_from_document, open_envelope};
use ftau::expr::{evaluate, parse, print_element};
use ftau::lift::{l_rot, l_scl, DefectValue, RotResult, SclResult};
use ftau::ring::ZTau;
use ftau::{Budgets, Error};

#[derive(Parser, Debug)]
#[command(name = "ftau", version, about = "Exact computation in F_tau, T_tau and its lift to the line")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Opts {
    /// Print canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Orbit length for rotation-number enclosures.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Largest denominator tried for exact rotation numbers.
    #[arg(long, global = true, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_den: u64,
    /// Subdivision depth searched for points and arcs.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=24))]
    depth: u32,
    /// Largest breakpoint table allowed for intermediate results.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    piece_cap: u64,
    /// Seed for randomised commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate an expression.
    Eval { expr: String },
    /// Rotation number of a lift.
    Rot { expr: String },
    /// Stable commutator length of a lift.
    Scl { expr: String },
    /// Validate an element or re-check a certificate (file path or inline text).
    Check { input: String },
    /// Send X to Y by an element of F_tau.
    Connect {
        #[arg(value_parser = parse_points)]
        x: Points,
        #[arg(value_parser = parse_points)]
        y: Points,
        /// Read X and Y as comma-separated tuples.
        #[arg(long)]
        tuple: bool,
        /// Build the element as a single commutator.
        #[arg(long)]
        derived: bool,
    },
    /// Factor a circle map as u v with u fixing an arc and v a product of commutators.
    Factor { expr: String },
    /// Commutator trick: [g, h] fixing a neighbourhood of a point.
    Trick {
        expr: String,
        #[arg(long, default_value = "0", value_parser = parse_ztau)]
        x: ZTau,
    },
    /// Rotation-number defect witnesses.
    Defect {
        /// Member of the deterministic family.
        #[arg(long, conflicts_with = "search", required_unless_present = "search",
              value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        /// Random search instead of the family.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 100, requires = "search")]
        samples: usize,
        /// Leaf count bound for random samples.
        #[arg(long, default_value_t = 6, requires = "search")]
        size: usize,
    },
    /// A seeded random element.
    Random {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, default_value = "T_tau")]
        flavor: RandomFlavor,
    },
}

#[derive(Clone, Debug)]
struct Points(Vec<ZTau>);

fn parse_ztau(s: &str) -> Result<ZTau, String> {
    s.trim()
        .replace(' ', "")
        .parse()
        .map_err(|_| format!("{s:?} is not of the form a+b*t"))
}

fn parse_points(s: &str) -> Result<Points, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_ztau)
        .collect::<Result<_, _>>()
        .map(Points)
}

/// Text and JSON renderings of a successful command.
struct Output {
    text: String,
    json: Value,
}

fn budgets(o: &Opts) -> Budgets {
    Budgets {
        max_iter: o.max_iter,
        max_den: o.max_den,
        search_depth: o.depth,
        piece_cap: o.piece_cap as usize,
    }
}

fn eval_text(text: &str, b: &Budgets) -> Result<Element, Error> {
    evaluate(&parse(text)?, b)
}

fn rot_text(r: &RotResult) -> String {
    match r {
        RotResult::ExactRational { value, .. } => format!("{value} (exact, certified)"),
        RotResult::ExactZTau { value } => format!("{value} (exact, translation)"),
        RotResult::Enclosure { lo, hi, iterations, .. } => {
            format!("[{lo}, {hi}] (enclosure after {iterations} iterations)")
        }
    }
}

fn scl_text(s: &SclResult) -> String {
    match s {
        SclResult::Rational { value, .. } => format!("{value} (exact)"),
        SclResult::ZTauHalf { alpha, .. } => format!("({})/2 (exact)", alpha.full_form()),
        SclResult::Enclosure { lo, hi, .. } => format!("[{lo}, {hi}] (enclosure)"),
    }
}

fn defect_text(d: &DefectValue) -> String {
    match d {
        DefectValue::Exact(q) => match (q.as_rational(), q.as_ztau()) {
            (Some(r), _) => format!("{r} (exact)"),
            (None, Some(z)) => format!("{z} (exact)"),
            _ => format!("{q} (exact)"),
        },
        DefectValue::Enclosure(lo, hi) => format!("[{lo}, {hi}] (enclosure)"),
    }
}

fn element_output(e: &Element) -> Output {
    Output {
        text: format!("{} with {} pieces\n{}", e.type_name(), e.pieces(), print_element(e)),
        json: element_document(e),
    }
}

fn certificate_output(c: Certificate, summary: String) -> Output {
    Output {
        text: summary,
        json: c.to_json(),
    }
}

fn check_input(input: &str, b: &Budgets) -> Result<Output, Error> {
    let text = if Path::new(input).is_file() {
        std::fs::read_to_string(input).map_err(|e| Error::Schema(format!("{input}: {e}")))?
    } else {
        input.to_owned()
    };
    if !text.trim().is_empty() && !text.trim_start().starts_with('{') {
        let e = eval_text(&text, b)?;
        return Ok(Output {
            text: format!("ok: valid {}", e.type_name()),
            json: json!({"ok": true, "kind": "expression", "type": e.type_name()}),
        });
    }
    let doc = ftau::expr::json::parse_json(&text)?;
    let (kind, _) = open_envelope(&doc)?;
    if kind == "certificate" {
        let cert = Certificate::from_json(&doc)?;
        cert.check(b)?;
        return Ok(Output {
            text: format!("ok: {} certificate verified", cert.type_name()),
            json: json!({"ok": true, "kind": "certificate", "type": cert.type_name()}),
        });
    }
    let e = element_from_document(&doc)?;
    Ok(Output {
        text: format!("ok: valid {}", e.type_name()),
        json: json!({"ok": true, "kind": kind}),
    })
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let b = budgets(&cli.opts);
    match &cli.cmd {
        Cmd::Eval { expr } => Ok(element_output(&eval_text(expr, &b)?)),
        Cmd::Rot { expr } => {
            let g = eval_text(expr, &b)?.to_lift()?;
            let r = l_rot(&g, &b)?;
            Ok(Output {
                text: rot_text(&r),
                json: r.to_json(),
            })
        }
        Cmd::Scl { expr } => {
            let g = eval_text(expr, &b)?.to_lift()?;
            let s = l_scl(&g, &b)?;
            Ok(Output {
                text: scl_text(&s),
                json: s.to_json(),
            })
        }
        Cmd::Check { input } => check_input(input, &b),
        Cmd::Connect { x, y, tuple, derived } => {
            if !tuple && (x.0.len() != 1 || y.0.len() != 1) {
                return Err(Error::BadTuple(
                    "pass single points, or use --tuple for comma-separated tuples".into(),
                ));
            }
            let cert = if *derived {
                connect_tuple_derived(&x.0, &y.0)?
            } else {
                connect_tuple(&x.0, &y.0)?
            };
            let summary = format!(
                "F_tau element with {} pieces{}, verified on {} points\n{}",
                cert.element.pieces(),
                if *derived { " written as [l, f]" } else { "" },
                cert.xs.len(),
                print_element(&Element::Interval(cert.element.clone()))
            );
            Ok(certificate_output(cert.into(), summary))
        }
        Cmd::Factor { expr } => {
            let g = eval_text(expr, &b)?.to_circle()?;
            let cert = factor_local(&g, &b)?;
            let summary = format!(
                "g = u v verified: u fixes [{}, {}] around x = {}, v fixes a neighbourhood of y = {}",
                cert.arc.0, cert.arc.1, cert.x, cert.y
            );
            Ok(certificate_output(cert.into(), summary))
        }
        Cmd::Trick { expr, x } => {
            let g = eval_text(expr, &b)?.to_circle()?;
            let cert = commutator_trick(&g, x, cli.opts.seed, &b)?;
            let summary = format!(
                "k = [g, h] = g^-1 (h^-1 g h) verified, k fixes a neighbourhood of {}",
                cert.x
            );
            Ok(certificate_output(cert.into(), summary))
        }
        Cmd::Defect {
            n,
            search,
            samples,
            size,
        } => {
            let w = if *search {
                defect_search(*samples, cli.opts.seed, *size, &b)?
            } else {
                defect_witness(n.expect("required by clap"), &b)?
            };
            let summary = format!("delta = {}", defect_text(&w.delta));
            Ok(certificate_output(w.into(), summary))
        }
        Cmd::Random { size, flavor } => Ok(element_output(&random_element(
            cli.opts.seed,
            *size as usize,
            *flavor,
        ))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var("FTAU_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        ftau::par::init_threads(n);
    }
    match run(&cli) {
        Ok(out) => {
            if cli.opts.json {
                println!("{}", canonical(&out.json));
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.opts.json {
                let msg = json!({"error": e.kind(), "message": e.to_string()});
                println!("{}", canonical(&msg));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(if e.is_budget() { 2 } else { 1 })
        }
    }
}
