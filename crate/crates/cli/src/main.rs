use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nrd_core::instance::{desugar_literals, Instance, LiteralInstance, WitnessReport};
use nrd_core::predicate::tuple_to_string;
use nrd_core::setfam::{
    check_pairwise, check_witness_family, exact_max_family, greedy_family, Family, WitnessTarget,
};
use nrd_core::{
    classify_arity, find_capturing_polynomial, is_t_balanced, preserves_symmetric, render_csv,
    render_json, render_markdown, Error, SymmetricPredicate,
};

const EXIT_INVALID: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(
    name = "nrd",
    about = "Classify non-redundancy exponents of symmetric Boolean predicates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Greedy,
    Exact,
}

#[derive(Args)]
struct PredicateArgs {
    /// Predicate arity r
    #[arg(long)]
    arity: usize,
    /// Accepted Hamming weights, comma-separated (e.g. 1,2)
    #[arg(long, value_delimiter = ',')]
    weights: Vec<usize>,
}

impl PredicateArgs {
    fn build(&self) -> Result<SymmetricPredicate, Error> {
        SymmetricPredicate::new(self.arity, &self.weights)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the classification table for every non-trivial predicate of an arity
    Classify {
        #[arg(long)]
        arity: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fan out per-predicate work across threads (output is identical)
        #[arg(long)]
        parallel: bool,
    },
    /// Test degree-t balancedness of one predicate
    Balance {
        #[command(flatten)]
        predicate: PredicateArgs,
        /// Lift degree t
        #[arg(long)]
        t: usize,
        /// Emit capturing-polynomial certificates (balanced) or the violating point
        #[arg(long)]
        witness: bool,
    },
    /// Test preservation of the universal partial k-cube operation
    Cube {
        #[command(flatten)]
        predicate: PredicateArgs,
        /// Cube dimension k
        #[arg(long)]
        k: usize,
    },
    /// Check an instance file for (conditional) non-redundancy
    CheckInstance {
        /// Instance JSON file
        file: PathBuf,
        /// Relaxed accepted weights for the conditional variant
        #[arg(long, value_delimiter = ',')]
        relaxed_weights: Option<Vec<usize>>,
    },
    /// Search for or check restricted-intersection set families
    Family {
        #[command(subcommand)]
        action: FamilyCommand,
    },
    /// Desugar a literal-model instance into a simple positive instance
    Convert {
        /// Literal-model instance JSON file
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Build a family with all pairwise intersection sizes in the allowed set
    Search {
        /// Ground-set size
        #[arg(long)]
        n: usize,
        /// Block size s
        #[arg(long, default_value = "5")]
        block_size: usize,
        /// Allowed pairwise intersection sizes, comma-separated
        #[arg(long, value_delimiter = ',')]
        allowed: Vec<usize>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: SearchMode,
        /// Scan order seed for greedy mode (0 = ascending bitmask)
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Branch-and-bound node budget for exact mode
        #[arg(long, default_value = "10000000")]
        node_budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check pairwise intersections and per-set witness assignments
    Check {
        /// Family JSON file
        file: PathBuf,
        /// Allowed intersection sizes / witness background set W
        #[arg(long, value_delimiter = ',')]
        allowed: Vec<usize>,
        /// Witness condition: |A ∩ X_A| must land in this set (default: outside W)
        #[arg(long, value_delimiter = ',')]
        target_in: Option<Vec<usize>>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::GuardExceeded(_) | Error::SizeLimit(_) => EXIT_GUARD,
        _ => EXIT_MALFORMED,
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(err))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed {}: {e}", path.display()))
}

fn run_classify(arity: usize, format: Format, out: Option<PathBuf>, parallel: bool) -> ExitCode {
    if !(1..=6).contains(&arity) {
        eprintln!("error: classify supports arity 1..=6, got {arity}");
        return ExitCode::from(EXIT_MALFORMED);
    }
    if arity == 6 {
        eprintln!("note: arity 6 is beyond the published tables; values are computed, not cross-checked");
    }
    let records = match classify_arity(arity, parallel) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let rendered = match format {
        Format::Csv => render_csv(&records),
        Format::Json => render_json(&records),
        Format::Md => render_markdown(&records),
    };
    if let Err(e) = write_output(&out, &rendered) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_MALFORMED);
    }
    ExitCode::SUCCESS
}

fn run_balance(args: &PredicateArgs, t: usize, witness: bool) -> ExitCode {
    let pred = match args.build() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let report = match is_t_balanced(&pred, t) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if report.balanced {
        println!("balanced: degree {t}");
        if witness {
            for f in pred.falsifying_tuples() {
                match find_capturing_polynomial(&pred, f, t) {
                    Ok(poly) => {
                        println!("{}", serde_json::to_string(&poly).expect("certificate serializes"));
                    }
                    Err(e) => {
                        println!(
                            "target {}: no degree-{t} certificate found ({e})",
                            tuple_to_string(f, pred.arity())
                        );
                    }
                }
            }
        }
    } else {
        println!("not balanced: degree {t}");
        if witness {
            if let Some(f) = report.violating_point {
                println!(
                    "violating point: {} (lift lies in the accepted integer span)",
                    tuple_to_string(f, pred.arity())
                );
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_cube(args: &PredicateArgs, k: usize) -> ExitCode {
    let pred = match args.build() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    match preserves_symmetric(&pred, k) {
        Ok(None) => {
            println!("preserved: k = {k}");
            ExitCode::SUCCESS
        }
        Ok(Some(failure)) => {
            println!("{}", serde_json::to_string(&failure).expect("failure serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn print_witness_report(rep: &WitnessReport, n: usize) -> ExitCode {
    for (i, w) in rep.witnesses.iter().enumerate() {
        match w {
            Some(sigma) => println!("constraint {i}: witness {}", tuple_to_string(*sigma, n)),
            None => println!("constraint {i}: no witness"),
        }
    }
    if rep.non_redundant {
        println!("non-redundant");
        ExitCode::SUCCESS
    } else {
        println!(
            "redundant: constraint {} has no witness",
            rep.first_missing().expect("some constraint lacks a witness")
        );
        ExitCode::from(EXIT_INVALID)
    }
}

fn run_check_instance(file: &PathBuf, relaxed: &Option<Vec<usize>>) -> ExitCode {
    let inst: Instance = match read_json(file) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    if let Err(e) = inst.validate() {
        return fail(&e);
    }
    let report = match relaxed {
        Some(weights) => {
            let s = match SymmetricPredicate::new(inst.predicate.arity(), weights) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            inst.conditional_witnesses(&s)
        }
        None => inst.non_redundancy_witnesses(),
    };
    match report {
        Ok(rep) => print_witness_report(&rep, inst.n),
        Err(e) => fail(&e),
    }
}

fn run_family_search(
    n: usize,
    block_size: usize,
    allowed: &[usize],
    mode: SearchMode,
    seed: u64,
    node_budget: u64,
    out: &Option<PathBuf>,
) -> ExitCode {
    let allowed_set = allowed.iter().copied().collect();
    let family = match mode {
        SearchMode::Greedy => greedy_family(n, block_size, &allowed_set, seed),
        SearchMode::Exact => match exact_max_family(n, block_size, &allowed_set, node_budget) {
            Ok(res) => {
                if !res.exact {
                    eprintln!("note: node budget exhausted; family size is a lower bound only");
                }
                Ok(res.family)
            }
            Err(e) => Err(e),
        },
    };
    match family {
        Ok(fam) => {
            eprintln!("family size: {}", fam.len());
            let mut json = serde_json::to_string_pretty(&fam).expect("family serializes");
            json.push('\n');
            if let Err(e) = write_output(out, &json) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_MALFORMED);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn run_family_check(file: &PathBuf, allowed: &[usize], target_in: &Option<Vec<usize>>) -> ExitCode {
    let fam: Family = match read_json(file) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    let allowed_set = allowed.iter().copied().collect();
    if let Some((i, j)) = check_pairwise(&fam, &allowed_set) {
        println!("pairwise violation: sets {i} and {j}");
        return ExitCode::from(EXIT_INVALID);
    }
    println!("pairwise: ok");
    let target = match target_in {
        Some(t) => WitnessTarget::In(t.iter().copied().collect()),
        None => WitnessTarget::OutsideW,
    };
    match check_witness_family(&fam, &allowed_set, &target) {
        Ok(rep) => {
            println!("{}", serde_json::to_string(&rep).expect("report serializes"));
            if rep.valid {
                println!("witness family: valid");
                ExitCode::SUCCESS
            } else {
                println!("witness family: invalid");
                ExitCode::from(EXIT_INVALID)
            }
        }
        Err(e) => fail(&e),
    }
}

fn run_convert(file: &PathBuf, out: &Option<PathBuf>) -> ExitCode {
    let lit: LiteralInstance = match read_json(file) {
        Ok(l) => l,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    if let Err(e) = lit.validate() {
        return fail(&e);
    }
    match desugar_literals(&lit) {
        Ok(simple) => {
            let mut json = serde_json::to_string_pretty(&simple).expect("instance serializes");
            json.push('\n');
            if let Err(e) = write_output(out, &json) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_MALFORMED);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Classify {
            arity,
            format,
            out,
            parallel,
        } => run_classify(*arity, *format, out.clone(), *parallel),
        Command::Balance {
            predicate,
            t,
            witness,
        } => run_balance(predicate, *t, *witness),
        Command::Cube { predicate, k } => run_cube(predicate, *k),
        Command::CheckInstance {
            file,
            relaxed_weights,
        } => run_check_instance(file, relaxed_weights),
        Command::Family { action } => match action {
            FamilyCommand::Search {
                n,
                block_size,
                allowed,
                mode,
                seed,
                node_budget,
                out,
            } => run_family_search(*n, *block_size, allowed, *mode, *seed, *node_budget, out),
            FamilyCommand::Check {
                file,
                allowed,
                target_in,
            } => run_family_check(file, allowed, target_in),
        },
        Command::Convert { file, out } => run_convert(file, out),
    }
}
