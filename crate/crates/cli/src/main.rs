//! `fungll`: recognise, dump and count derivations for grammar files.

use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fungll::dsl::{self, GrammarAst, LexToken, TokenMode};
use fungll::forest::{extract_errors, Forest, PrecedenceFilter};
use fungll::oracle::{NaiveGrammar, OracleError};
use fungll::{parse, Parse, ParseOptions, Symbol, DEFAULT_FUEL};
use serde_json::{json, Value};

const STACK_BYTES: usize = 1 << 30;
const ORACLE_DEPTH: usize = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "fungll",
    version,
    about = "Generalised top-down parsing with parameterised nonterminals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Accept or reject the input; report the furthest failures on reject.
    Recognize(RunArgs),
    /// Dump the BSR set, sorted, followed by `total: N`.
    Bsr(RunArgs),
    /// Print derivation trees of the whole input.
    Parse(RunArgs),
    /// Print the number of derivations of the whole input.
    Count(RunArgs),
    /// Print parse-state sizes and timing.
    Stats(RunArgs),
    /// Time recognition of generated inputs of growing length.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GrammarArgs {
    /// Grammar file.
    #[arg(long, short)]
    grammar: PathBuf,
    /// Start symbol reference, e.g. `Expr` or `CSV(alpha)`. Defaults to the
    /// first definition.
    #[arg(long, short)]
    start: Option<String>,
    /// Token model: `char` (one token per character) or `words`
    /// (whitespace-separated words).
    #[arg(long, default_value = "char")]
    mode: TokenMode,
    /// Descriptor budget; 0 means unlimited.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Suppress timings so output is reproducible byte for byte.
    #[arg(long)]
    deterministic: bool,
    /// Cross-check acceptance against the naive recogniser; a disagreement
    /// is an error.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Input given inline.
    #[arg(long, group = "source")]
    text: Option<String>,
    /// Input file; one trailing newline is dropped.
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Read input from standard input; one trailing newline is dropped.
    #[arg(long, group = "source")]
    stdin: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    #[command(flatten)]
    source: Source,
    /// Number of error reports printed on reject.
    #[arg(long, default_value_t = 3)]
    errors: usize,
    /// Maximum number of trees printed by `parse`.
    #[arg(long, default_value_t = 10)]
    max_trees: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Input lengths to time, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 30, 40])]
    sizes: Vec<usize>,
    /// The token repeated to build each input.
    #[arg(long, default_value = "a")]
    token: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Why a command stopped without a verdict.
struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Forest walks recurse once per nested extent.
    let worker = thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || execute(cli))
        .expect("spawn worker thread");
    let code = worker.join().unwrap_or_else(|_| {
        eprintln!("error: internal failure");
        2
    });
    ExitCode::from(code)
}

fn execute(cli: Cli) -> u8 {
    let mode = match &cli.command {
        Command::Bench(b) => b.grammar.mode,
        Command::Recognize(r)
        | Command::Bsr(r)
        | Command::Parse(r)
        | Command::Count(r)
        | Command::Stats(r) => r.grammar.mode,
    };
    let result = match mode {
        TokenMode::Char => dispatch::<char>(&cli.command),
        TokenMode::Words => dispatch::<String>(&cli.command),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

struct Loaded<T> {
    ast: GrammarAst,
    start: String,
    symbol: Symbol<T, ()>,
}

fn load<T: LexToken>(args: &GrammarArgs) -> Result<Loaded<T>, Failure> {
    let text = std::fs::read_to_string(&args.grammar)
        .map_err(|e| Failure(format!("cannot read {}: {e}", args.grammar.display())))?;
    let ast = dsl::parse_grammar(&text)
        .map_err(|e| Failure(format!("{}: {e}", args.grammar.display())))?;
    let start = match &args.start {
        Some(s) => s.clone(),
        None => ast
            .definitions()
            .next()
            .map(|d| d.name.clone())
            .ok_or_else(|| Failure("grammar has no definitions; pass --start".into()))?,
    };
    let symbol = dsl::elaborate::<T>(&ast, &start)?;
    Ok(Loaded { ast, start, symbol })
}

fn options(args: &GrammarArgs) -> ParseOptions {
    ParseOptions {
        fuel: (args.fuel > 0).then_some(args.fuel),
        ..ParseOptions::default()
    }
}

fn read_input<T: LexToken>(source: &Source) -> Result<Vec<T>, Failure> {
    let text = if let Some(t) = &source.text {
        t.clone()
    } else {
        let mut raw = String::new();
        if let Some(path) = &source.input {
            raw = std::fs::read_to_string(path)
                .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
        } else {
            io::stdin().read_to_string(&mut raw)?;
        }
        if raw.ends_with('\n') {
            raw.pop();
            if raw.ends_with('\r') {
                raw.pop();
            }
        }
        raw
    };
    Ok(T::tokenize(&text))
}

fn dispatch<T: LexToken>(command: &Command) -> Result<bool, Failure> {
    match command {
        Command::Bench(args) => bench::<T>(args),
        Command::Recognize(args) => run::<T>(args, recognize),
        Command::Bsr(args) => run::<T>(args, bsr),
        Command::Parse(args) => run::<T>(args, trees),
        Command::Count(args) => run::<T>(args, count),
        Command::Stats(args) => run::<T>(args, stats),
    }
}

struct Run<'a, T> {
    args: &'a RunArgs,
    loaded: &'a Loaded<T>,
    parse: Parse<T, ()>,
    elapsed: Duration,
}

impl<T> Run<'_, T> {
    fn json(&self) -> bool {
        self.args.grammar.format == Format::Json
    }

    fn forest(&self) -> Forest<'_, T, ()> {
        let table = dsl::precedence_table(&self.loaded.ast);
        let forest = Forest::new(&self.parse);
        if table.is_empty() {
            forest
        } else {
            forest.with_filter(PrecedenceFilter::new(table))
        }
    }
}

type Report<T> = fn(&Run<'_, T>, &mut Vec<u8>) -> Result<(), Failure>;

fn run<T: LexToken>(args: &RunArgs, report: Report<T>) -> Result<bool, Failure> {
    let loaded = load::<T>(&args.grammar)?;
    let input: Vec<T> = read_input(&args.source)?;
    let oracle_input = args.grammar.oracle.then(|| input.clone());
    let started = Instant::now();
    let parse = parse(&loaded.symbol, input, &options(&args.grammar))?;
    let elapsed = started.elapsed();
    let accepted = parse.accepted();
    let run = Run {
        args,
        loaded: &loaded,
        parse,
        elapsed,
    };
    let mut out = Vec::new();
    if let Some(input) = oracle_input {
        let verdict = oracle_verdict(&loaded, &input)?;
        if verdict != accepted {
            return Err(Failure(format!(
                "oracle disagreement: engine {}, naive recogniser {}",
                verdict_word(accepted),
                verdict_word(verdict)
            )));
        }
        if !run.json() {
            writeln!(out, "oracle: agree")?;
        }
    }
    report(&run, &mut out)?;
    io::stdout().write_all(&out)?;
    Ok(accepted)
}

fn verdict_word(accepted: bool) -> &'static str {
    if accepted {
        "accept"
    } else {
        "reject"
    }
}

fn oracle_verdict<T: LexToken>(loaded: &Loaded<T>, input: &[T]) -> Result<bool, Failure> {
    let oracle = NaiveGrammar::<T>::with_depth_limit(&loaded.ast, ORACLE_DEPTH)?;
    match oracle.recognizes(&loaded.start, input) {
        Ok(v) => Ok(v),
        Err(e @ OracleError::DepthExceeded(_)) => Err(Failure(format!("oracle: {e}"))),
        Err(e) => Err(e.into()),
    }
}

fn error_reports<T: LexToken>(run: &Run<'_, T>) -> Vec<fungll::ErrorReport> {
    extract_errors(run.parse.state(), run.args.errors).unwrap_or_default()
}

fn errors_json<T: LexToken>(run: &Run<'_, T>) -> Value {
    Value::Array(
        error_reports(run)
            .iter()
            .map(|e| {
                json!({
                    "position": e.position,
                    "slot": e.slot.render(),
                    "expected": e.expected.to_string(),
                    "got": e.got,
                })
            })
            .collect(),
    )
}

fn write_rejection<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    writeln!(out, "reject")?;
    for e in error_reports(run) {
        writeln!(out, "error: {e}")?;
    }
    Ok(())
}

fn recognize<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    let accepted = run.parse.accepted();
    if run.json() {
        let mut v = json!({ "accepted": accepted });
        if !accepted {
            v["errors"] = errors_json(run);
        }
        writeln!(out, "{v}")?;
    } else if accepted {
        writeln!(out, "accept")?;
    } else {
        write_rejection(run, out)?;
    }
    Ok(())
}

fn bsr<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    let sorted = run.parse.state().bsrs().sorted();
    if run.json() {
        let v = json!({ "bsrs": sorted, "total": sorted.len() });
        writeln!(out, "{v}")?;
    } else {
        for b in &sorted {
            writeln!(out, "{b}")?;
        }
        writeln!(out, "total: {}", sorted.len())?;
    }
    Ok(())
}

fn trees<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    if !run.parse.accepted() {
        return if run.json() {
            writeln!(
                out,
                "{}",
                json!({ "accepted": false, "errors": errors_json(run) })
            )
            .map_err(Failure::from)
        } else {
            write_rejection(run, out)
        };
    }
    let forest = run.forest();
    let total = forest.count();
    let trees = forest.trees(Some(run.args.max_trees));
    let truncated = total.saturated || total.value > trees.len() as u128;
    if run.json() {
        let v = json!({
            "accepted": true,
            "trees": trees,
            "count": total.value,
            "saturated": total.saturated,
            "truncated": truncated,
        });
        writeln!(out, "{v}")?;
    } else {
        for t in &trees {
            writeln!(out, "{t}")?;
        }
        if truncated {
            writeln!(out, "{total} trees (truncated)")?;
        } else {
            let noun = if trees.len() == 1 { "tree" } else { "trees" };
            writeln!(out, "{} {noun}", trees.len())?;
        }
    }
    Ok(())
}

fn count<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    let total = run.forest().count();
    if run.json() {
        writeln!(
            out,
            "{}",
            json!({ "count": total.value, "saturated": total.saturated })
        )?;
    } else {
        writeln!(out, "{total}")?;
    }
    Ok(())
}

fn stats<T: LexToken>(run: &Run<'_, T>, out: &mut Vec<u8>) -> Result<(), Failure> {
    let state = run.parse.state();
    let rows: [(&str, Value); 8] = [
        ("accepted", json!(run.parse.accepted())),
        (
            "descriptors_processed",
            json!(state.stats().descriptors_processed),
        ),
        ("uset", json!(state.uset().len())),
        ("bsrs", json!(state.bsrs().len())),
        ("prel", json!(state.prel().len())),
        ("grel", json!(state.continuations().len())),
        (
            "instances",
            json!(run.loaded.symbol.grammar().instance_count()),
        ),
        ("input_length", json!(state.input().len())),
    ];
    let millis = run.elapsed.as_secs_f64() * 1e3;
    if run.json() {
        let mut v: serde_json::Map<String, Value> =
            rows.into_iter().map(|(k, v)| (k.to_owned(), v)).collect();
        if !run.args.grammar.deterministic {
            v.insert("wall_time_ms".into(), json!(millis));
        }
        writeln!(out, "{}", Value::Object(v))?;
    } else {
        for (k, v) in rows {
            writeln!(out, "{k}: {v}")?;
        }
        if !run.args.grammar.deterministic {
            eprintln!("wall time: {millis:.3} ms");
        }
    }
    Ok(())
}

fn bench<T: LexToken>(args: &BenchArgs) -> Result<bool, Failure> {
    let loaded = load::<T>(&args.grammar)?;
    let unit = T::tokenize(&args.token);
    if unit.len() != 1 {
        return Err(Failure(format!(
            "--token must be exactly one token, got {:?}",
            args.token
        )));
    }
    let json = args.grammar.format == Format::Json;
    let mut all = true;
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let input = vec![unit[0].clone(); n];
        let started = Instant::now();
        let parse = parse(&loaded.symbol, input, &options(&args.grammar))?;
        let seconds = started.elapsed().as_secs_f64();
        let accepted = parse.accepted();
        all &= accepted;
        let descriptors = parse.state().stats().descriptors_processed;
        if json {
            let mut row = json!({ "size": n, "accepted": accepted, "descriptors": descriptors });
            if !args.grammar.deterministic {
                row["seconds"] = json!(seconds);
            }
            rows.push(row);
        } else {
            println!(
                "size {n}: {}, {descriptors} descriptors",
                verdict_word(accepted)
            );
            if !args.grammar.deterministic {
                eprintln!("size {n}: {seconds:.6} s");
            }
        }
    }
    if json {
        println!("{}", Value::Array(rows));
    }
    Ok(all)
}
