use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use quhyper::entanglement::{alpha_elementary, ElementarySpec};
use quhyper::hypergraph::{Bipartition, MultiHypergraph};
use quhyper::reduction::{
    reduce, reduce_all_outcomes, verify_trace_monotone, OutcomePolicy, ReductionStep,
    ReductionTrace, DEFAULT_BRANCH_CAP,
};
use quhyper::statevec::{build_state, multipartite_entanglement, Caps};
use quhyper::stringsets::{
    cardinality_bruteforce, cardinality_closed, cardinality_recursive, StringSetQuery,
    DEFAULT_BRUTE_CAP,
};
use quhyper::Error;
use quhyper_cli::suites::{self, Suite, SuiteOptions};
use quhyper_cli::table::{self, Multiplicities, TableRequest};
use quhyper_cli::{exit_code, fmt_sig, parse_list, parse_range, EXIT_OK, EXIT_PARSE, EXIT_VERIFY};

#[derive(Parser)]
#[command(
    name = "quhyper",
    version,
    about = "Entanglement of qudit hypergraph states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count n-strings over Z_d whose product is x mod d.
    Card(CardArgs),
    /// Closed-form entanglement of elementary states, singly or as a table.
    Ent(EntArgs),
    /// State-vector entanglement of a hypergraph file.
    Brute(BruteArgs),
    /// Reduce a hypergraph file to an elementary state across a bipartition.
    Reduce(ReduceArgs),
    /// Run a property suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CardMethod {
    Closed,
    Recursive,
    Brute,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["x", "all_x"])))]
struct CardArgs {
    #[arg(long)]
    d: u64,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    x: Option<u64>,
    /// Every residue 0..d.
    #[arg(long)]
    all_x: bool,
    #[arg(long, value_enum, default_value = "closed")]
    method: CardMethod,
    /// Cross-check the closed form, the recursion and (within the cap) brute force.
    #[arg(long)]
    check: bool,
    /// Largest d^n enumerated by brute force.
    #[arg(long, default_value_t = DEFAULT_BRUTE_CAP)]
    cap: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EntArgs {
    /// Dimension, or a range such as 2..10 with --table.
    #[arg(long)]
    d: String,
    /// Number of qudits, or a range with --table.
    #[arg(long)]
    n: String,
    /// Multiplicity; with --table also all, coprime, minimal or a list like 1,2,5.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    table: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct BruteArgs {
    file: PathBuf,
    /// For an elementary input, also print the closed-form value.
    #[arg(long)]
    compare_closed_form: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Fixed,
    Exhaustive,
    Random,
}

#[derive(Args)]
struct ReduceArgs {
    file: PathBuf,
    /// Side A of the bipartition, e.g. 1,2,3.
    #[arg(long)]
    partition: String,
    #[arg(long, value_enum, default_value = "fixed")]
    policy: Policy,
    /// Outcome reported by every measurement under the fixed policy.
    #[arg(long, default_value_t = 1)]
    outcome: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recompute E^AB after each step and check it never increases.
    #[arg(long)]
    verify: bool,
    /// Print the trace as JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BRANCH_CAP)]
    max_branches: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    d_max: Option<u64>,
}

/// Failure that already carries its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message: message.into(),
    }
}

fn verify_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VERIFY,
        message: message.into(),
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Card(a) => card(a),
        Command::Ent(a) => ent(a),
        Command::Brute(a) => brute(a),
        Command::Reduce(a) => reduce_cmd(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn caps() -> Result<Caps, Failure> {
    Caps::from_env().map_err(|e| parse_failure(e.to_string()))
}

fn read_hypergraph(path: &PathBuf) -> Result<MultiHypergraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
    Ok(MultiHypergraph::from_json(&text)?)
}

fn card(a: CardArgs) -> Outcome {
    let xs: Vec<u64> = match a.x {
        Some(x) => vec![x],
        None => (0..a.d).collect(),
    };
    println!("d,n,x,cardinality");
    for x in xs {
        let q = StringSetQuery::new(a.d, a.n, x)?;
        let value = match a.method {
            CardMethod::Closed => cardinality_closed(&q),
            CardMethod::Recursive => cardinality_recursive(&q),
            CardMethod::Brute => cardinality_bruteforce(&q, a.cap)?,
        };
        if a.check {
            let mut others: Vec<(&str, BigUint)> = vec![
                ("closed", cardinality_closed(&q)),
                ("recursive", cardinality_recursive(&q)),
            ];
            match cardinality_bruteforce(&q, a.cap) {
                Ok(b) => others.push(("brute", b)),
                Err(Error::CapExceeded { .. }) => {}
                Err(e) => return Err(e.into()),
            }
            if let Some((name, v)) = others.iter().find(|(_, v)| *v != value) {
                return Err(verify_failure(format!(
                    "d={} n={} x={}: {name} gives {v}, selected method gives {value}",
                    a.d,
                    a.n,
                    q.x()
                )));
            }
        }
        println!("{},{},{},{}", a.d, a.n, q.x(), value);
    }
    Ok(())
}

fn ent(a: EntArgs) -> Outcome {
    if a.table {
        let d = parse_range(&a.d).map_err(parse_failure)?;
        let n = parse_range(&a.n).map_err(parse_failure)?;
        let m: Multiplicities =
            a.m.as_deref()
                .unwrap_or("all")
                .parse()
                .map_err(parse_failure)?;
        let rows = table::rows(&TableRequest::new(d, n, m)?)?;
        match a.format {
            Format::Csv => print!("{}", table::to_csv(&rows)),
            Format::Json => println!("{}", table::to_json(&rows)),
        }
        return Ok(());
    }
    let int = |s: &str, what: &str| {
        s.trim().parse::<u64>().map_err(|_| {
            parse_failure(format!(
                "--{what} expects an integer without --table, got {s:?}"
            ))
        })
    };
    let d = int(&a.d, "d")?;
    let n = int(&a.n, "n")?;
    let m = int(
        a.m.as_deref()
            .ok_or_else(|| parse_failure("--m is required without --table"))?,
        "m",
    )?;
    let spec = ElementarySpec::new(
        d,
        u32::try_from(n).map_err(|_| parse_failure("--n too large"))?,
        m,
    )?;
    let alpha = alpha_elementary(&spec);
    let e = num_rational::BigRational::from_integer(1.into()) - &alpha;
    let float = |r: &num_rational::BigRational| fmt_sig(r.to_f64().unwrap_or(f64::NAN));
    match a.format {
        Format::Csv => {
            println!("alpha = {} = {}", alpha, float(&alpha));
            println!("E = {} = {}", e, float(&e));
        }
        Format::Json => {
            let v = serde_json::json!({
                "d": d, "n": n, "m": spec.m(),
                "alpha_exact": alpha.to_string(), "E_exact": e.to_string(),
                "E_float": e.to_f64(),
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json value"));
        }
    }
    Ok(())
}

fn brute(a: BruteArgs) -> Outcome {
    let caps = caps()?;
    let h = read_hypergraph(&a.file)?;
    let psi = build_state(&h, &caps)?;
    let r = multipartite_entanglement(&psi, &caps)?;
    println!("E = {}", fmt_sig(r.entanglement()));
    println!("alpha = {}", fmt_sig(r.alpha()));
    if let Some(w) = &r.witness {
        println!("witness = {w}");
    }
    if a.compare_closed_form {
        match h.sole_edge().filter(|_| h.is_elementary()) {
            Some((_, m)) => {
                let closed = quhyper::entanglement::entanglement_of(h.d(), h.n() as u32, m)?;
                let cf = closed.to_f64().unwrap_or(f64::NAN);
                let diff = (cf - r.entanglement()).abs();
                println!(
                    "closed form E = {} = {} (difference {:.1e})",
                    closed,
                    fmt_sig(cf),
                    diff
                );
                if diff >= 1e-8 {
                    return Err(verify_failure("closed form and state vector disagree"));
                }
            }
            None => println!("closed form: not an elementary state, nothing to compare"),
        }
    }
    Ok(())
}

fn describe(step: &ReductionStep) -> String {
    let edge = step
        .edge
        .as_ref()
        .map(|e| e.to_string())
        .unwrap_or_default();
    let what = match (step.vertex, step.outcome, step.times) {
        (Some(v), Some(q), _) => format!("qudit {v} -> |{q}>"),
        (Some(k), None, Some(t)) => format!("X_{k}^-{t} cancels {edge}"),
        (None, None, Some(t)) => format!("Z^{t} on {edge}"),
        _ => edge,
    };
    format!(
        "{:<20} {:<24} {}",
        step.kind.as_str(),
        what,
        step.hypergraph
    )
}

fn print_trace(t: &ReductionTrace) {
    println!("input: {}", t.input);
    println!("partition: {}", t.bipartition);
    for (i, s) in t.steps.iter().enumerate() {
        println!("{:>3}. {}", i + 1, describe(s));
    }
    let f = &t.final_state;
    let outcomes: Vec<String> = f
        .outcomes
        .iter()
        .map(|o| format!("{}:{}", o.qudit, o.outcome))
        .collect();
    println!(
        "final: G_{}^{} on {}; outcomes [{}]",
        f.kappa,
        f.mu,
        f.edge,
        outcomes.join(" ")
    );
}

fn reduce_cmd(a: ReduceArgs) -> Outcome {
    let caps = caps()?;
    let h = read_hypergraph(&a.file)?;
    let side: Vec<usize> = parse_list(&a.partition)
        .map_err(parse_failure)?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let b = Bipartition::new(h.n(), side)?;
    let traces: Vec<(Option<String>, ReductionTrace)> = match a.policy {
        Policy::Fixed => vec![(None, reduce(&h, &b, OutcomePolicy::Fixed(a.outcome))?)],
        Policy::Random => vec![(None, reduce(&h, &b, OutcomePolicy::SeededRandom(a.seed))?)],
        Policy::Exhaustive => reduce_all_outcomes(&h, &b, a.max_branches)?
            .into_iter()
            .map(|br| {
                (
                    Some(format!(
                        "outcomes {:?}, probability {}",
                        br.outcomes, br.probability
                    )),
                    br.trace,
                )
            })
            .collect(),
    };

    let mut failures = 0;
    let mut json = Vec::new();
    for (label, t) in &traces {
        let report = if a.verify {
            Some(verify_trace_monotone(t, &caps)?)
        } else {
            None
        };
        if report.as_ref().is_some_and(|r| !r.passed()) {
            failures += 1;
        }
        if a.json {
            let mut v = serde_json::to_value(t).expect("trace serializes");
            if let Some(l) = label {
                v["branch"] = serde_json::Value::String(l.clone());
            }
            if let Some(r) = &report {
                v["verification"] = serde_json::to_value(r).expect("report serializes");
            }
            json.push(v);
            continue;
        }
        if let Some(l) = label {
            println!("== branch: {l}");
        }
        print_trace(t);
        if let Some(r) = report {
            let values: Vec<String> = r.values.iter().map(|v| fmt_sig(*v)).collect();
            println!("E^AB along trace: {}", values.join(" -> "));
            for v in &r.violations {
                println!(
                    "  increase at step {} ({}): {} -> {}",
                    v.step + 1,
                    v.kind.as_str(),
                    fmt_sig(v.before),
                    fmt_sig(v.after)
                );
            }
            if !r.rewrite_mismatches.is_empty() {
                println!(
                    "  rewrite/state-vector mismatch at steps {:?}",
                    r.rewrite_mismatches
                );
            }
            if !r.probability_defects.is_empty() {
                println!(
                    "  outcome probability not 1/d at steps {:?}",
                    r.probability_defects
                );
            }
            println!("verification: {}", if r.passed() { "pass" } else { "FAIL" });
        }
    }
    if a.json {
        let out = if a.policy == Policy::Exhaustive {
            serde_json::Value::Array(json)
        } else {
            json.pop().expect("one trace")
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("json value")
        );
    }
    if failures > 0 {
        return Err(verify_failure(format!(
            "{failures} of {} traces failed verification",
            traces.len()
        )));
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Outcome {
    let caps = caps()?;
    let opts = SuiteOptions {
        seed: a.seed,
        trials: a.trials,
        d_max: a.d_max,
    };
    let report = suites::run(a.suite, &opts, &caps)?;
    print!("{}", report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(verify_failure(format!("suite {} failed", a.suite)))
    }
}
