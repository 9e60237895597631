//! Command-line front end: homology reports, certified bounds, matchings,
//! and the verification campaigns over graph corpora.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use indmorse::bounds::{comparison_table, planar_lower_bound, ramanujan_threshold};
use indmorse::canon::canonical_key;
use indmorse::complex::build_complex_capped;
use indmorse::cycles;
use indmorse::enumerate::connected_graphs;
use indmorse::family;
use indmorse::homology::{betti_numbers, total_betti, Field};
use indmorse::io::{parse_edge_list, parse_graph6, write_graph6};
use indmorse::lucas::{count_valid_assignments, lucas, lucas_triangle_row, trace_count};
use indmorse::morse::{
    is_acyclic, is_valid_matching, Engine, EngineConfig, MorseCertificate, Registry,
};
use indmorse::{Error, Graph};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const FAMILY_HELP: &str = "Family specs (name:arg,arg):
  path:N              the path on N vertices
  cycle:N             the cycle on N vertices (N >= 3)
  complete:N          the complete graph K_N
  star:N              one centre joined to N leaves
  biclique:A,B        the complete bipartite graph K_{A,B}
  petersen            the Petersen graph
  k5-copies:K         K disjoint copies of K_5
  random-gnp:N,P,SEED G(n,p) with the given seed
  forest-random:N,SEED a random forest grown one vertex at a time";

#[derive(Parser)]
#[command(
    name = "indmorse",
    about = "Independence-complex homology and certified Morse bounds",
    after_help = FAMILY_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Betti numbers of the independence complex
    Betti {
        #[command(flatten)]
        graph: GraphInput,
        /// Coefficient field
        #[arg(long, default_value = "gf2", value_parser = parse_field)]
        field: Field,
        /// Refuse to materialize complexes beyond this many faces
        #[arg(long, value_name = "N")]
        face_cap: Option<usize>,
        #[command(flatten)]
        out: OutputOpt,
    },
    /// Certified upper bound with its derivation trace and the product cap
    Bound {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        engine: EngineOpts,
        /// Attach the explicit matching to the certificate
        #[arg(long)]
        emit_matching: bool,
        /// Skip the homology cross-check on small inputs
        #[arg(long)]
        skip_check: bool,
        #[command(flatten)]
        out: OutputOpt,
    },
    /// Explicit acyclic matching realizing the bound, verified before emission
    Matching {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        engine: EngineOpts,
        #[command(flatten)]
        out: OutputOpt,
    },
    /// Cycle structure: girth, effective girth, packing, minimum feedback set
    Analyze {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        out: OutputOpt,
    },
    /// Exhaust all constraint sequences of one length against the Lucas cap
    LucasSweep {
        /// Sequence length (2..=13)
        n: usize,
    },
    /// Check the exact product bound against the 4^k reference, k = 2..=kmax
    VerifyCorollary {
        #[arg(long, default_value_t = 20)]
        kmax: usize,
    },
    /// Run the full property battery over a graph corpus
    VerifyCorpus(VerifyCorpus),
    /// Closed-form bound evaluators
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Exact product bound next to the 4^k lower reference
    Table {
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Lower bound 2^((m - 40 sqrt(m)) / 36) for planar graphs with m edges
    Planar {
        #[arg(long)]
        m: u64,
    },
    /// Size threshold in the comparison against chromatic lower bounds
    Threshold {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        chi: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphInput {
    /// Named family spec such as cycle:6 (see the list under --help)
    #[arg(long, value_name = "SPEC", long_help = FAMILY_HELP)]
    family: Option<String>,
    /// Edge-list file: one "u v" pair per line, # comments ignored; labels are
    /// arbitrary strings mapped to 0.. in order of first appearance
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// One graph6-encoded graph
    #[arg(long, value_name = "G6")]
    graph6: Option<String>,
}

impl GraphInput {
    fn load(&self) -> anyhow::Result<Graph> {
        if let Some(spec) = &self.family {
            return Ok(family::from_spec(spec)?);
        }
        if let Some(path) = &self.input {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let (g, _) = parse_edge_list(&text)?;
            return Ok(g);
        }
        Ok(parse_graph6(self.graph6.as_deref().expect("clap group"))?)
    }
}

#[derive(Args, Clone)]
struct EngineOpts {
    /// Comma-separated reduction rules to enable (default: the full catalog:
    /// empty, isolated-vertex, forest, isolated-edge, fold, disjoint-product,
    /// feedback, remove-cycle, link)
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    rules: Option<Vec<String>>,
    /// Refuse to materialize complexes beyond this many faces
    #[arg(long, value_name = "N")]
    face_cap: Option<usize>,
    /// Exhaustive induced-cycle search only up to this many vertices
    #[arg(long, value_name = "N")]
    cycle_cap: Option<usize>,
    /// Exact minimum feedback sets only up to this many vertices
    #[arg(long, value_name = "N")]
    feedback_cap: Option<usize>,
    /// Largest attachment set eligible for cycle removal
    #[arg(long, value_name = "N")]
    attach_cap: Option<usize>,
}

impl EngineOpts {
    fn engine(&self) -> anyhow::Result<Engine> {
        let mut cfg = EngineConfig::default();
        if let Some(v) = self.face_cap {
            cfg.face_cap = v;
        }
        if let Some(v) = self.cycle_cap {
            cfg.cycle_cap = v;
        }
        if let Some(v) = self.feedback_cap {
            cfg.feedback_cap = v;
        }
        if let Some(v) = self.attach_cap {
            cfg.attach_cap = v;
        }
        let registry = match &self.rules {
            Some(names) => {
                let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                Registry::by_names(&refs)?
            }
            None => Registry::standard(),
        };
        Ok(Engine::with_config(cfg, registry))
    }
}

#[derive(Args)]
struct OutputOpt {
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

impl OutputOpt {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(path) => fs::write(path, format!("{text}\n"))
                .with_context(|| format!("writing {}", path.display()))?,
            None => println!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct VerifyCorpus {
    /// Exhaustive corpus: every connected graph on up to this many vertices
    #[arg(long, default_value_t = 6, value_name = "N")]
    vertex_cap: usize,
    /// Verify a seeded random sample of this many graphs instead
    #[arg(long, value_name = "COUNT", conflicts_with = "input")]
    sample: Option<usize>,
    /// Edge probability for sampled graphs
    #[arg(long, default_value_t = 0.35)]
    p: f64,
    /// Seed for sampled corpora; recorded in every report row
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read the corpus from a file of graph6 lines instead
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Materialize and verify matchings only up to this many vertices
    #[arg(long, default_value_t = 7, value_name = "N")]
    matching_cap: usize,
    #[command(flatten)]
    engine: EngineOpts,
    /// Also write the full JSON-lines report here
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn parse_field(s: &str) -> Result<Field, String> {
    match s {
        "gf2" => Ok(Field::Gf2),
        "rational" => Ok(Field::Rational),
        _ => Err(format!("unknown field {s:?} (use gf2 or rational)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<Error>().map(|e| e.exit_code() as u8).unwrap_or(2);
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Betti { graph, field, face_cap, out } => {
            let g = graph.load()?;
            let cap = face_cap.unwrap_or(EngineConfig::default().face_cap);
            let complex = build_complex_capped(&g, cap)?;
            let report = betti_numbers(&complex, field);
            out.emit(&serde_json::to_string(&report)?)?;
            Ok(0)
        }
        Command::Bound { graph, engine, emit_matching, skip_check, out } => {
            let g = graph.load()?;
            let eng = engine.engine()?;
            let report = eng.main_bound(&g)?;
            let bound = report.certificate.bound;
            let mut value = serde_json::to_value(&report)?;
            let mut violated = false;
            if !skip_check && g.vertex_count() <= 13 {
                let b = total_betti(&g)?;
                violated = b as u128 > bound;
                let obj = value.as_object_mut().expect("report is a map");
                obj.insert("betti".into(), json!(b));
                obj.insert("betti_leq_bound".into(), json!(!violated));
            }
            if emit_matching {
                let cert = eng.bound_with_matching(&g)?;
                let failures = matching_failures(&cert)?;
                if !failures.is_empty() {
                    eprintln!("matching failed verification: {}", failures.join("; "));
                    violated = true;
                }
                let mv = serde_json::to_value(&cert)?;
                let cert_obj = value["certificate"].as_object_mut().expect("map");
                for key in ["critical", "matching"] {
                    if let Some(x) = mv.get(key) {
                        cert_obj.insert(key.into(), x.clone());
                    }
                }
            }
            out.emit(&serde_json::to_string(&value)?)?;
            if violated {
                eprintln!("verification failure: homology exceeds the certified bound");
                return Ok(1);
            }
            Ok(0)
        }
        Command::Matching { graph, engine, out } => {
            let g = graph.load()?;
            let cert = engine.engine()?.bound_with_matching(&g)?;
            let failures = matching_failures(&cert)?;
            out.emit(&serde_json::to_string(&cert)?)?;
            if !failures.is_empty() {
                eprintln!("verification failure: {}", failures.join("; "));
                return Ok(1);
            }
            Ok(0)
        }
        Command::Analyze { graph, out } => {
            let g = graph.load()?;
            let report = cycles::analyze(&g)?;
            out.emit(&serde_json::to_string(&report)?)?;
            Ok(0)
        }
        Command::LucasSweep { n } => lucas_sweep(n),
        Command::VerifyCorollary { kmax } => verify_corollary(kmax),
        Command::VerifyCorpus(args) => verify_corpus(args),
        Command::Bounds { which } => bounds_command(which),
    }
}

/// Validity, acyclicity, and the count agreeing with the certified bound.
fn matching_failures(cert: &MorseCertificate) -> anyhow::Result<Vec<String>> {
    let m = cert.matching.as_ref().context("certificate carries no matching")?;
    let mut failures = Vec::new();
    if !is_valid_matching(m)? {
        failures.push("pairs are not disjoint cover relations".to_string());
    } else if !is_acyclic(m)? {
        failures.push("pair digraph has a directed cycle".to_string());
    }
    let critical = m.critical_faces().len();
    if critical as u128 != cert.bound {
        failures.push(format!("critical count {critical} differs from bound {}", cert.bound));
    }
    Ok(failures)
}

fn base3(mut idx: usize, n: usize) -> Vec<u8> {
    let mut s = vec![0u8; n];
    for d in s.iter_mut() {
        *d = (idx % 3) as u8;
        idx /= 3;
    }
    s
}

fn lucas_sweep(n: usize) -> anyhow::Result<u8> {
    if !(2..=13).contains(&n) {
        return Err(Error::Precondition(format!("sweep length must be in 2..=13, got {n}")).into());
    }
    let cap = lucas(n as i64)?;
    let total = 3usize.pow(n as u32);
    for idx in 0..total {
        let s = base3(idx, n);
        let count = count_valid_assignments(&s)?;
        if count > cap {
            println!("counterexample: {}", json!({ "sequence": s, "count": count, "cap": cap }));
            return Ok(1);
        }
        if s.iter().all(|&d| d != 1) && trace_count(&s)? != count {
            println!(
                "counterexample: {}",
                json!({ "sequence": s, "count": count, "trace": trace_count(&s)? })
            );
            return Ok(1);
        }
    }
    println!("verified {total} sequences <= l({n})={cap}");
    Ok(0)
}

fn verify_corollary(kmax: usize) -> anyhow::Result<u8> {
    let rows = comparison_table(kmax)?;
    let width = rows.iter().map(|r| r.exact.to_string().len()).max().unwrap_or(1).max(5);
    println!("{:>3}  {:>width$}  {:>width$}  ok", "k", "exact", "4^k");
    let mut ok = true;
    for row in rows.iter().filter(|r| r.k >= 2) {
        let dominates = row.exact >= row.reference;
        let pinned = match row.k {
            2 => row.exact.to_string() == "126",
            3 => row.exact.to_string() == "5922",
            _ => true,
        };
        ok &= dominates && pinned;
        println!(
            "{:>3}  {:>width$}  {:>width$}  {}",
            row.k,
            row.exact.to_string(),
            row.reference.to_string(),
            if dominates && pinned { "yes" } else { "NO" }
        );
    }
    if ok {
        println!("verified: exact bound >= 4^k for k = 2..={kmax}");
        Ok(0)
    } else {
        println!("verification failure");
        Ok(1)
    }
}

fn bounds_command(which: BoundsCommand) -> anyhow::Result<u8> {
    match which {
        BoundsCommand::Table { kmax } => {
            let rows = comparison_table(kmax)?;
            let width = rows.iter().map(|r| r.exact.to_string().len()).max().unwrap_or(1).max(9);
            println!("{:>3}  {:>width$}  {:>width$}", "k", "exact", "reference");
            for row in rows {
                println!(
                    "{:>3}  {:>width$}  {:>width$}",
                    row.k,
                    row.exact.to_string(),
                    row.reference.to_string()
                );
            }
        }
        BoundsCommand::Planar { m } => {
            let b = planar_lower_bound(m)?;
            println!(
                "{}",
                json!({ "m": b.m, "exponent": b.exponent, "value": b.value, "vacuous": b.vacuous })
            );
        }
        BoundsCommand::Threshold { n, chi } => {
            println!("{}", ramanujan_threshold(n, chi)?);
        }
    }
    Ok(0)
}

struct CorpusRow {
    key: Vec<u64>,
    graph6: String,
    seed: Option<u64>,
    line: String,
    bound_ok: bool,
    /// None when skipped, otherwise whether the matching verified.
    matching: Option<bool>,
    ok: bool,
}

fn corpus_check(engine: &Engine, g: &Graph, matching_cap: usize, seed: Option<u64>) -> CorpusRow {
    let graph6 = write_graph6(g).unwrap_or_default();
    let mut fields = serde_json::Map::new();
    fields.insert("graph6".into(), json!(graph6));
    fields.insert("n".into(), json!(g.vertex_count()));
    if let Some(s) = seed {
        fields.insert("seed".into(), json!(s));
    }
    let mut failures = Vec::new();
    let bound_ok;
    let mut matching = None;
    match (total_betti(g), engine.main_bound(g)) {
        (Ok(b), Ok(report)) => {
            let bound = report.certificate.bound;
            fields.insert("betti".into(), json!(b));
            match u64::try_from(bound) {
                Ok(small) => fields.insert("bound".into(), json!(small)),
                Err(_) => fields.insert("bound".into(), json!(bound.to_string())),
            };
            fields.insert("cap_holds".into(), json!(report.cap_holds));
            if b as u128 > bound {
                failures.push(format!("betti {b} exceeds bound {bound}"));
            }
            if !report.cap_holds {
                failures.push("bound exceeds the product cap".to_string());
            }
            bound_ok = failures.is_empty();
            if g.vertex_count() <= matching_cap {
                let verified = engine
                    .bound_with_matching(g)
                    .map_err(|e| format!("matching construction error: {e}"))
                    .and_then(|cert| {
                        matching_failures(&cert)
                            .map_err(|e| format!("matching verification error: {e}"))
                    })
                    .and_then(
                        |fs| {
                            if fs.is_empty() {
                                Ok(())
                            } else {
                                Err(fs.join("; "))
                            }
                        },
                    );
                match verified {
                    Ok(()) => matching = Some(true),
                    Err(msg) => {
                        matching = Some(false);
                        failures.push(msg);
                    }
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            bound_ok = false;
            failures.push(format!("error: {e}"));
        }
    }
    fields.insert(
        "matching".into(),
        json!(match matching {
            Some(true) => "ok",
            Some(false) => "failed",
            None => "skipped",
        }),
    );
    let ok = failures.is_empty();
    fields.insert("ok".into(), json!(ok));
    if !failures.is_empty() {
        fields.insert("failures".into(), json!(failures));
    }
    CorpusRow {
        key: canonical_key(g),
        graph6,
        seed,
        line: Value::Object(fields).to_string(),
        bound_ok,
        matching,
        ok,
    }
}

fn verify_corpus(args: VerifyCorpus) -> anyhow::Result<u8> {
    let engine = args.engine.engine()?;
    let (graphs, description): (Vec<(Graph, Option<u64>)>, String) =
        if let Some(path) = &args.input {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut graphs = Vec::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                graphs.push((parse_graph6(line)?, None));
            }
            (graphs, format!("file {}", path.display()))
        } else if let Some(count) = args.sample {
            let mut graphs = Vec::new();
            for i in 0..count {
                let n = 1 + i % args.vertex_cap.max(1);
                let seed = args.seed.wrapping_add(i as u64);
                graphs.push((family::gnp(n, args.p, seed)?, Some(seed)));
            }
            (
                graphs,
                format!(
                    "sampled, vertex cap {}, p {}, seed {}",
                    args.vertex_cap, args.p, args.seed
                ),
            )
        } else {
            let mut graphs = Vec::new();
            for n in 1..=args.vertex_cap {
                graphs.extend(connected_graphs(n)?.into_iter().map(|g| (g, None)));
            }
            (graphs, format!("exhaustive, vertex cap {}", args.vertex_cap))
        };

    if graphs.is_empty() {
        eprintln!("warning: empty corpus, the per-graph battery passes vacuously");
    }

    let mut rows: Vec<CorpusRow> = graphs
        .par_iter()
        .map(|(g, seed)| corpus_check(&engine, g, args.matching_cap, *seed))
        .collect();
    rows.sort_by(|a, b| {
        (&a.key, &a.graph6, a.seed).cmp(&(&b.key, &b.graph6, b.seed))
    });

    let mut matrix: Vec<(String, usize, usize)> = Vec::new();
    matrix.push((
        "morse-inequality".to_string(),
        rows.len(),
        rows.iter().filter(|r| !r.bound_ok).count(),
    ));
    matrix.push((
        "matchings".to_string(),
        rows.iter().filter(|r| r.matching.is_some()).count(),
        rows.iter().filter(|r| r.matching == Some(false)).count(),
    ));

    let mut counterexamples: Vec<String> =
        rows.iter().filter(|r| !r.ok).map(|r| r.line.clone()).collect();
    let mut suite_lines: Vec<String> = Vec::new();
    for suite in global_suites(&engine)? {
        matrix.push((suite.name.clone(), suite.cases, suite.failed));
        suite_lines.push(
            json!({ "suite": suite.name, "cases": suite.cases, "failed": suite.failed })
                .to_string(),
        );
        counterexamples.extend(suite.counterexample);
    }

    let all_ok = matrix.iter().all(|(_, _, failed)| *failed == 0);
    let mut table = String::new();
    writeln!(table, "corpus: {} graphs ({description})", rows.len())?;
    writeln!(table, "{:<24} {:>8} {:>8}", "suite", "cases", "failed")?;
    for (name, cases, failed) in &matrix {
        writeln!(table, "{name:<24} {cases:>8} {failed:>8}")?;
    }
    write!(table, "result: {}", if all_ok { "PASS" } else { "FAIL" })?;
    println!("{table}");
    for c in &counterexamples {
        println!("counterexample: {c}");
    }

    if let Some(path) = &args.output {
        let mut report = String::new();
        writeln!(
            report,
            "{}",
            json!({
                "corpus": description,
                "graphs": rows.len(),
                "matching_cap": args.matching_cap,
                "result": if all_ok { "PASS" } else { "FAIL" },
            })
        )?;
        for row in &rows {
            writeln!(report, "{}", row.line)?;
        }
        for line in &suite_lines {
            writeln!(report, "{line}")?;
        }
        fs::write(path, report).with_context(|| format!("writing {}", path.display()))?;
    }

    Ok(if all_ok { 0 } else { 1 })
}

struct SuiteResult {
    name: String,
    cases: usize,
    failed: usize,
    counterexample: Option<String>,
}

/// Corpus-independent checks: the constraint-count sweep, the Lucas triangle
/// rows, and the path and cycle tables.
fn global_suites(engine: &Engine) -> anyhow::Result<Vec<SuiteResult>> {
    let mut suites = Vec::new();

    let mut cases = 0;
    let mut failed = 0;
    let mut example = None;
    for n in 2..=8usize {
        let cap = lucas(n as i64)?;
        for idx in 0..3usize.pow(n as u32) {
            let s = base3(idx, n);
            cases += 1;
            let count = count_valid_assignments(&s)?;
            let mut bad = count > cap;
            if s.iter().all(|&d| d != 1) && trace_count(&s)? != count {
                bad = true;
            }
            if bad {
                failed += 1;
                example.get_or_insert_with(|| json!({ "sequence": s }).to_string());
            }
        }
    }
    suites.push(SuiteResult {
        name: "constraint-sweep".to_string(),
        cases,
        failed,
        counterexample: example,
    });

    let mut cases = 0;
    let mut failed = 0;
    let mut example = None;
    for n in 2..=30usize {
        cases += 1;
        let row = lucas_triangle_row(n)?;
        let cap = lucas(n as i64)?;
        let max = *row.iter().max().expect("nonempty row");
        let mut bad = row[0] != cap || row[n] != cap || max != cap;
        bad |= match n {
            2 => row != vec![3, 2, 3],
            3 => row != vec![4, 3, 3, 4],
            5 => row != vec![11, 8, 9, 9, 8, 11],
            _ => false,
        };
        if bad {
            failed += 1;
            example.get_or_insert_with(|| json!({ "row": n }).to_string());
        }
    }
    suites.push(SuiteResult {
        name: "lucas-triangle".to_string(),
        cases,
        failed,
        counterexample: example,
    });

    let mut cases = 0;
    let mut failed = 0;
    let mut example = None;
    for n in 1..=15usize {
        cases += 1;
        let g = family::path(n)?;
        let expected = if n % 3 == 1 { 0u128 } else { 1 };
        if engine.bound(&g)?.bound != expected || total_betti(&g)? as u128 != expected {
            failed += 1;
            example.get_or_insert_with(|| json!({ "path": n }).to_string());
        }
    }
    suites.push(SuiteResult {
        name: "path-table".to_string(),
        cases,
        failed,
        counterexample: example,
    });

    let mut cases = 0;
    let mut failed = 0;
    let mut example = None;
    for n in 3..=12usize {
        cases += 1;
        let g = family::cycle(n)?;
        let expected = if n % 3 == 0 { 2u128 } else { 1 };
        if engine.bound(&g)?.bound != expected || total_betti(&g)? as u128 != expected {
            failed += 1;
            example.get_or_insert_with(|| json!({ "cycle": n }).to_string());
        }
    }
    suites.push(SuiteResult {
        name: "cycle-table".to_string(),
        cases,
        failed,
        counterexample: example,
    });

    Ok(suites)
}
