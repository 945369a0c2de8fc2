//! `qmtree`: quaternion orders, ideals, Bruhat-Tits trees and descent
//! scenarios from the command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage/parse/schema/scenario
//! validation, 3 precondition (including mixed primes), 4 resource guard,
//! 5 a check failed (any report is still written).

use std::collections::BTreeSet;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qmtree::bruhat_tits::{ball, ball_dot, distance, geodesic, TreeVertex};
use qmtree::center::center;
use qmtree::descent::{run_descent, CenterJson, GaloisScenario};
use qmtree::ideal::{enumerate_left_ideals_bruteforce, left_ideals_of_norm_l, LeftIdeal};
use qmtree::io::{parse_rat, rat_to_string, IdealJson, LatticeJson};
use qmtree::isogeny::{build_ideal_tree, tree_isomorphism_check};
use qmtree::order::{check_order, eichler_order, maximal_order, Order};
use qmtree::quaternion::Place;
use qmtree::{Algebra, Error, Int};

const DEFAULT_SEED: u64 = 0;
const SEED_VAR: &str = "QMTREE_SEED";

#[derive(Parser)]
#[command(name = "qmtree", version, about = "Quaternion orders, Bruhat-Tits trees and Galois descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ramification and discriminant of (a, b | Q).
    QaInfo {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Maximal and Eichler orders.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Left ideals of an order.
    #[command(subcommand)]
    Ideals(IdealsCmd),
    /// Bruhat-Tits tree queries.
    #[command(subcommand)]
    Bt(BtCmd),
    /// Galois descent scenarios.
    #[command(subcommand)]
    Descent(DescentCmd),
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// i² = a, a nonzero rational "n" or "n/d".
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// j² = b, a nonzero rational.
    #[arg(long, allow_hyphen_values = true)]
    b: String,
}

#[derive(Args, Clone)]
struct OrderArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Squarefree level N coprime to the discriminant; 1 gives the maximal order.
    #[arg(long, default_value_t = 1)]
    level: u64,
}

#[derive(Subcommand)]
enum OrderCmd {
    /// A maximal order containing Z<1, i, j, k> (denominators cleared).
    Maximal(AlgebraArgs),
    /// An Eichler order of level N inside that maximal order.
    Eichler(OrderArgs),
    /// Reduced discriminant of an order given as JSON.
    Discriminant {
        #[arg(long)]
        order: PathBuf,
    },
    /// Checks that a lattice given as JSON is an order.
    Verify {
        #[arg(long)]
        order: PathBuf,
    },
}

#[derive(Subcommand)]
enum IdealsCmd {
    /// Left ideals of prime norm l.
    NormL {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "l")]
        ell: u64,
    },
    /// Tree of primitive ideals of norm l^k, k <= depth.
    Tree {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "l")]
        ell: u64,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Also write the tree as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Brute-force enumeration of the left ideals of norm n.
    Oracle {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum BtCmd {
    /// The l + 1 neighbors of a vertex.
    Neighbors {
        #[arg(long = "l")]
        ell: Option<u64>,
        #[arg(long)]
        v: String,
    },
    Distance {
        #[arg(long)]
        u: String,
        #[arg(long)]
        w: String,
    },
    Geodesic {
        #[arg(long)]
        u: String,
        #[arg(long)]
        w: String,
    },
    /// Center of the vertices listed in a file (JSON array or one per line).
    Center {
        #[arg(long = "l")]
        ell: Option<u64>,
        #[arg(long)]
        vertices: PathBuf,
    },
    /// All vertices within distance r.
    Ball {
        #[arg(long)]
        v: String,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DescentCmd {
    /// Runs scenarios and writes their reports.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Report path for a single scenario.
        #[arg(long, conflicts_with = "report_dir")]
        report: Option<PathBuf>,
        /// Directory for `<stem>.report.json` files.
        #[arg(long)]
        report_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn check(message: impl Display) -> Self {
        Failure { code: 5, message: message.to_string() }
    }

    fn io(path: &Path, e: std::io::Error, reading: bool) -> Self {
        let verb = if reading { "read" } else { "write" };
        Failure { code: if reading { 2 } else { 1 }, message: format!("cannot {verb} {}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Scenario(_) => 2,
            Error::Precondition(_)
            | Error::MixedPrimes(..)
            | Error::Inconsistent(_)
            | Error::InvalidPlace(_)
            | Error::NotContained
            | Error::AlgebraMismatch
            | Error::Singular
            | Error::RankDeficient { .. }
            | Error::Dimension(_) => 3,
            Error::Resource(_) => 4,
            Error::InvariantViolation(_) | Error::Internal(_) => 1,
        };
        let message = match e {
            Error::Scenario(v) => format!("invalid scenario:\n  {}", v.join("\n  ")),
            e => e.to_string(),
        };
        Failure { code, message }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn seed() -> Outcome<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| Failure::usage(format!("{SEED_VAR}={s:?} is not a u64"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn algebra(args: &AlgebraArgs) -> Outcome<Arc<Algebra>> {
    let a = parse_rat(&args.a)?;
    let b = parse_rat(&args.b)?;
    if a == Default::default() || b == Default::default() {
        return Err(Failure::usage("a and b must be nonzero"));
    }
    Ok(Arc::new(Algebra::new(a, b)?))
}

fn order(args: &OrderArgs, seed: u64) -> Outcome<Arc<Order>> {
    if args.level == 0 {
        return Err(Failure::usage("level must be positive"));
    }
    let o0 = maximal_order(algebra(&args.algebra)?)?;
    if args.level == 1 {
        return Ok(Arc::new(o0));
    }
    Ok(Arc::new(eichler_order(&o0, &Int::from(args.level), seed)?))
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e, true))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::io(path, e, false))
}

/// Writes to stdout; a closed pipe (`| head`) ends the process quietly.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("qmtree: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn print_json(v: &Value) {
    out(&serde_json::to_string_pretty(v).expect("values serialize"));
}

fn vertex(s: &str) -> Outcome<TreeVertex> {
    Ok(s.parse::<TreeVertex>()?)
}

fn order_json(o: &Order) -> Value {
    serde_json::to_value(LatticeJson::of_order(o)).expect("serializes")
}

fn load_order(path: &Path) -> Outcome<(Arc<Algebra>, qmtree::RatLattice)> {
    Ok(LatticeJson::from_json(&read(path)?)?.parse()?)
}

fn ideal_list(ideals: &[LeftIdeal]) -> Outcome<Value> {
    let list = ideals.iter().map(IdealJson::of).collect::<Result<Vec<_>, _>>()?;
    Ok(serde_json::to_value(list).expect("serializes"))
}

fn qa_info(args: &AlgebraArgs, as_json: bool) -> Outcome {
    let alg = algebra(args)?;
    let primes = alg.ramified_primes();
    let places: Vec<String> = alg.ramified_places().iter().map(Place::to_string).collect();
    if as_json {
        print_json(&json!({
            "a": rat_to_string(alg.a()),
            "b": rat_to_string(alg.b()),
            "ramifiedPrimes": primes,
            "ramifiedPlaces": places,
            "discriminant": alg.discriminant().to_string(),
            "indefinite": alg.is_indefinite(),
        }));
    } else {
        let list: Vec<String> = primes.iter().map(u64::to_string).collect();
        out(&format!("algebra: ({}, {} | Q)", alg.a(), alg.b()));
        out(&format!("ramified places: {}", if places.is_empty() { "none".into() } else { places.join(" ") }));
        out(&format!("ramified primes: {}", if list.is_empty() { "none".into() } else { list.join(" ") }));
        out(&format!("D = {}", alg.discriminant()));
        out(&format!("indefinite: {}", if alg.is_indefinite() { "yes" } else { "no" }));
    }
    Ok(())
}

fn order_cmd(cmd: &OrderCmd, seed: u64) -> Outcome {
    match cmd {
        OrderCmd::Maximal(a) => {
            let o = maximal_order(algebra(a)?)?;
            print_json(&order_json(&o));
        }
        OrderCmd::Eichler(args) => {
            if args.level == 0 {
                return Err(Failure::usage("level must be positive"));
            }
            let o0 = maximal_order(algebra(&args.algebra)?)?;
            let o = eichler_order(&o0, &Int::from(args.level), seed)?;
            print_json(&order_json(&o));
        }
        OrderCmd::Discriminant { order } => {
            let (alg, lat) = load_order(order)?;
            let check = check_order(&alg, &lat);
            if !check.is_order() {
                return Err(Failure::check(format!("not an order: {}", check.violations.join(", "))));
            }
            let o = Order::new(alg, lat)?;
            print_json(&json!({ "reducedDiscriminant": o.reduced_discriminant()?.to_string() }));
        }
        OrderCmd::Verify { order } => {
            let (alg, lat) = load_order(order)?;
            let check = check_order(&alg, &lat);
            let mut out = json!({ "isOrder": check.is_order(), "violations": check.violations });
            if check.is_order() {
                let o = Order::new(alg, lat)?;
                out["reducedDiscriminant"] = json!(o.reduced_discriminant()?.to_string());
                out["maximal"] = json!(o.is_maximal()?);
            }
            print_json(&out);
            if !check.is_order() {
                return Err(Failure::check("the lattice is not an order"));
            }
        }
    }
    Ok(())
}

fn ideals_cmd(cmd: &IdealsCmd, seed: u64) -> Outcome {
    match cmd {
        IdealsCmd::NormL { order: args, ell } => {
            let o = order(args, seed)?;
            let ideals = left_ideals_of_norm_l(&o, *ell, seed)?;
            print_json(&json!({ "l": ell, "count": ideals.len(), "ideals": ideal_list(&ideals)? }));
        }
        IdealsCmd::Oracle { order: args, n } => {
            let o = order(args, seed)?;
            let ideals = enumerate_left_ideals_bruteforce(&o, *n)?;
            print_json(&json!({ "n": n, "count": ideals.len(), "ideals": ideal_list(&ideals)? }));
        }
        IdealsCmd::Tree { order: args, ell, depth, dot } => {
            let o = order(args, seed)?;
            let t = build_ideal_tree(&o, *ell, *depth, seed)?;
            let report = tree_isomorphism_check(&t, seed)?;
            let levels: Vec<Vec<Value>> = t
                .levels()
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|i| json!({ "digest": i.digest(), "norm": i.norm().map(|n| n.to_string()).unwrap_or_default() }))
                        .collect()
                })
                .collect();
            if let Some(path) = dot {
                write(path, &t.to_dot())?;
            }
            print_json(&json!({
                "l": ell,
                "depth": depth,
                "nodes": t.node_count(),
                "levels": levels,
                "isomorphism": report,
            }));
            if !report.passed() {
                return Err(Failure::check("the ideal tree is not isomorphic to the tree ball"));
            }
        }
    }
    Ok(())
}

fn check_prime(ell: Option<u64>, v: &TreeVertex) -> Outcome {
    match ell {
        Some(l) if l != v.ell() => Err(Error::MixedPrimes(l, v.ell()).into()),
        _ => Ok(()),
    }
}

fn strings(vs: &[TreeVertex]) -> Value {
    json!(vs.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn bt_cmd(cmd: &BtCmd) -> Outcome {
    match cmd {
        BtCmd::Neighbors { ell, v } => {
            let v = vertex(v)?;
            check_prime(*ell, &v)?;
            print_json(&strings(&v.neighbors()));
        }
        BtCmd::Distance { u, w } => {
            print_json(&json!({ "distance": distance(&vertex(u)?, &vertex(w)?)? }));
        }
        BtCmd::Geodesic { u, w } => {
            print_json(&strings(&geodesic(&vertex(u)?, &vertex(w)?)?));
        }
        BtCmd::Center { ell, vertices } => {
            let text = read(vertices)?;
            let items: Vec<String> = if text.trim_start().starts_with('[') {
                serde_json::from_str(&text).map_err(|e| {
                    Failure::usage(format!("{}: line {} column {}: {e}", vertices.display(), e.line(), e.column()))
                })?
            } else {
                text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
            };
            let vs = items.iter().map(|s| vertex(s)).collect::<Outcome<Vec<_>>>()?;
            if vs.is_empty() {
                return Err(Failure::usage("no vertices given"));
            }
            for v in &vs {
                check_prime(ell.or(Some(vs[0].ell())), v)?;
            }
            print_json(&serde_json::to_value(CenterJson::from(&center(&vs)?)).expect("serializes"));
        }
        BtCmd::Ball { v, r, dot } => {
            let v = vertex(v)?;
            if *r > 8 {
                return Err(Error::Resource(format!("radius {r} exceeds the limit 8")).into());
            }
            if let Some(path) = dot {
                write(path, &ball_dot(&v, *r, &BTreeSet::from([v.clone()])))?;
            }
            print_json(&strings(&ball(&v, *r)));
        }
    }
    Ok(())
}

/// Runs one scenario and writes its report. The report exists whenever the
/// scenario is valid, even if a check fails.
fn run_one(scenario: &Path, report: &Path) -> Outcome<u64> {
    let s = GaloisScenario::from_json(&read(scenario)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", scenario.display(), f.message);
        f
    })?;
    let r = run_descent(&s)?;
    write(report, &r.to_json())?;
    if !r.checks.passed() {
        return Err(Failure::check(format!(
            "{}: checks failed (homomorphism {}, phiTildeInjective {}, minimality {})",
            scenario.display(),
            r.checks.homomorphism,
            r.checks.phi_tilde_injective,
            r.checks.minimality
        )));
    }
    Ok(r.n)
}

fn descent_run(scenarios: &[PathBuf], report: &Option<PathBuf>, report_dir: &Option<PathBuf>, jobs: usize) -> Outcome {
    let targets: Vec<PathBuf> = match (report, report_dir) {
        (Some(r), None) if scenarios.len() == 1 => vec![r.clone()],
        (Some(_), None) => return Err(Failure::usage("--report takes a single scenario; use --report-dir")),
        (None, Some(dir)) => scenarios
            .iter()
            .map(|s| {
                let stem = s.file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
                dir.join(format!("{stem}.report.json"))
            })
            .collect(),
        _ => return Err(Failure::usage("one of --report or --report-dir is required")),
    };
    let jobs = jobs.max(1).min(scenarios.len());
    let mut results: Vec<Option<Outcome<u64>>> = (0..scenarios.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = scenarios.len().div_ceil(jobs);
        let handles: Vec<_> = scenarios
            .chunks(chunk)
            .zip(targets.chunks(chunk))
            .map(|(ss, ts)| scope.spawn(move || ss.iter().zip(ts).map(|(s, t)| run_one(s, t)).collect::<Vec<_>>()))
            .collect();
        let mut k = 0;
        for h in handles {
            for r in h.join().expect("worker thread") {
                results[k] = Some(r);
                k += 1;
            }
        }
    });
    // the first failing scenario, in input order, decides the exit code
    let mut first: Option<Failure> = None;
    for (s, r) in scenarios.iter().zip(results) {
        match r.expect("every scenario ran") {
            Ok(n) => eprintln!("{}: N = {n}", s.display()),
            Err(f) => {
                eprintln!("qmtree: {}", f.message);
                first.get_or_insert(Failure { code: f.code, message: String::new() });
            }
        }
    }
    match first {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Outcome {
    let seed = seed()?;
    match &cli.command {
        Command::QaInfo { algebra, json } => qa_info(algebra, *json),
        Command::Order(cmd) => order_cmd(cmd, seed),
        Command::Ideals(cmd) => ideals_cmd(cmd, seed),
        Command::Bt(cmd) => bt_cmd(cmd),
        Command::Descent(DescentCmd::Run { scenarios, report, report_dir, jobs }) => {
            descent_run(scenarios, report, report_dir, *jobs)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("qmtree: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
