use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dforest::optimal::{format_opt_table, search_optimal_with, SearchCaps};
use dforest::oracle::{gen_instance, OpMix, Shape};
use dforest::structures::{self, mix_for};
use dforest::subtree::QTable;
use dforest::trace::{replay, Trace};
use dforest::tree_size::GlobalSizeTable;
use dforest::workloads::{parity_workload, spine_workload};
use dforest::{Error, Result};
use dforest_cli::{bench, fuzz, increasing_forests, parse_seed_range, write_csv, FuzzConfig, Suite};

#[derive(Parser)]
#[command(name = "dforest", version, about = "Decremental dynamic forests: replay, fuzzing, tables and benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a trace file against a structure and report mismatching answers.
    Run {
        trace: PathBuf,
        /// simple, iterated[:t], linear01, subtree, universal or oracle.
        #[arg(long, default_value = "simple")]
        structure: String,
        /// Ignore expected answers in the trace.
        #[arg(long)]
        no_check: bool,
    },
    /// Replay random oracle-annotated traces against structures.
    Fuzz {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        /// Seed range `a..b`.
        #[arg(long, default_value = "0..1000", value_parser = parse_seed_range)]
        seeds: std::ops::Range<u64>,
        /// Comma-separated structure names.
        #[arg(long, value_delimiter = ',', default_value = "simple")]
        structures: Vec<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a benchmark suite and print one CSV row per structure and size.
    Bench {
        #[arg(long, value_parser = clap::value_parser!(Suite))]
        suite: Suite,
        /// Comma-separated sizes; for spine and parity the base size.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Comma-separated structure names; defaults to the suite's structure.
        #[arg(long, value_delimiter = ',')]
        structures: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a lookup table (`size:<l>` or `q:<k>`) and write it to a file.
    BuildTables {
        #[arg(long)]
        which: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimum MID of every forest on `n` vertices whose parents precede their children.
    SearchOpt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Raise the search caps to the requested size.
        #[arg(long)]
        force: bool,
        /// Write the optimal trees in the table format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an oracle-annotated trace.
    Gen {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform", value_parser = clap::value_parser!(Shape))]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Mix::TreeSum)]
        mix: Mix,
        /// Use the operation mix legal for this structure instead of `--mix`.
        #[arg(long)]
        structure: Option<String>,
        /// `spine:<n'>` or `parity:<n'>` instead of a random forest.
        #[arg(long)]
        workload: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mix {
    TreeSum,
    TreeSize,
    SubtreeSize,
    All,
}

impl Mix {
    fn op_mix(self) -> OpMix {
        match self {
            Mix::TreeSum => OpMix::TREE_SUM,
            Mix::TreeSize => OpMix::TREE_SIZE,
            Mix::SubtreeSize => OpMix::SUBTREE_SIZE,
            Mix::All => OpMix::ALL,
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(trace: &PathBuf, structure: &str, no_check: bool) -> Result<ExitCode> {
    let t = Trace::parse(&std::fs::read_to_string(trace)?)?;
    let f = t.forest()?;
    let mut s = structures::build(structure, &f, &t.weights)?;
    let report = replay(&t, s.as_mut(), !no_check)?;
    for m in &report.mismatches {
        println!("mismatch at op {}: expected {}, got {}", m.index, m.expected, m.got);
    }
    println!("{structure}: {} ops, {} answers, {} mismatches", t.ops.len(), report.answers.len(), report.mismatches.len());
    Ok(if report.mismatches.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_fuzz(cfg: FuzzConfig) -> Result<ExitCode> {
    for name in &cfg.structures {
        let f = dforest::oracle::gen_random_tree(1, 0, Shape::Path);
        structures::build(name, &f, &[0])?;
    }
    let findings = fuzz(&cfg);
    let total = cfg.seeds.end - cfg.seeds.start;
    for name in &cfg.structures {
        let mine: Vec<_> = findings.iter().filter(|f| &f.structure == name).collect();
        match mine.first() {
            None => println!("{name}: 0 divergent seeds of {total}"),
            Some(first) => {
                println!("{name}: {} divergent seeds of {total}; first seed {}: {}", mine.len(), first.seed, first.detail);
                println!(
                    "  reproduce: dforest gen --n {} --m {} --seed {} --shape {} --structure {name} --out t.trace && dforest run t.trace --structure {name}",
                    cfg.n,
                    cfg.m,
                    first.seed,
                    first.shape.name()
                );
            }
        }
    }
    Ok(if findings.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn build_tables(which: &str, out: &PathBuf) -> Result<()> {
    let bad = || Error::IllegalSequence(format!("unknown table `{which}`; expected size:<l> or q:<k>"));
    let (kind, arg) = which.split_once(':').ok_or_else(bad)?;
    let arg: usize = arg.parse().map_err(|_| bad())?;
    let mut file = BufWriter::new(File::create(out)?);
    match kind {
        "size" => {
            let t = GlobalSizeTable::shared(arg)?;
            t.write_to(&mut file)?;
            println!("wrote {}: size table for l={arg}, {} slots", out.display(), t.slots());
        }
        "q" => {
            let t = QTable::shared(arg)?;
            file.write_all(&t.to_bytes())?;
            println!("wrote {}: Q table for k={arg}, {} entries", out.display(), t.len());
        }
        _ => return Err(bad()),
    }
    file.flush()?;
    Ok(())
}

fn search_opt(n: usize, m: usize, d: usize, force: bool, out: Option<&PathBuf>) -> Result<()> {
    let mut caps = SearchCaps::default();
    if force {
        caps = SearchCaps { n: caps.n.max(n), m: caps.m.max(m), d: caps.d.max(d) };
    }
    let mut results = Vec::new();
    for f in increasing_forests(n) {
        match search_optimal_with(&f, m, d, caps) {
            Ok(r) => {
                println!("{} mid {}", r.fingerprint, r.mid);
                results.push(r);
            }
            Err(Error::Infeasible(d)) => {
                println!("{} mid >{d}", dforest::optimal::fingerprint(&f));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(p) = out {
        std::fs::write(p, format_opt_table(&results))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen(n: usize, m: usize, seed: u64, shape: Shape, mix: Mix, structure: Option<&str>, workload: Option<&str>, out: Option<&PathBuf>) -> Result<()> {
    let trace = match workload {
        Some(w) => {
            let bad = || Error::IllegalSequence(format!("unknown workload `{w}`; expected spine:<n'> or parity:<n'>"));
            let (kind, size) = w.split_once(':').ok_or_else(bad)?;
            let size: usize = size.parse().map_err(|_| bad())?;
            match kind {
                "spine" => spine_workload(size, seed, true)?.trace,
                "parity" => parity_workload(size, seed)?.trace,
                _ => return Err(bad()),
            }
        }
        None => {
            if n == 0 {
                return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: i64::MAX });
            }
            let mix = structure.map_or(mix.op_mix(), mix_for);
            gen_instance(n, m, shape, &mix, seed).trace
        }
    };
    let mut w = output(out)?;
    w.write_all(trace.format().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Run { trace, structure, no_check } => run(&trace, &structure, no_check),
        Cmd::Fuzz { n, m, seeds, structures, threads } => {
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |x| x.get()));
            if n == 0 {
                return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: i64::MAX });
            }
            run_fuzz(FuzzConfig { n, m, seeds, structures, threads })
        }
        Cmd::Bench { suite, sizes, structures, seed, out } => {
            let structures = if structures.is_empty() { vec![suite.default_structure().to_string()] } else { structures };
            let records = bench(suite, &structures, &sizes, seed)?;
            write_csv(output(out.as_ref())?, &records)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::BuildTables { which, out } => build_tables(&which, &out).map(|_| ExitCode::SUCCESS),
        Cmd::SearchOpt { n, m, d, force, out } => search_opt(n, m, d, force, out.as_ref()).map(|_| ExitCode::SUCCESS),
        Cmd::Gen { n, m, seed, shape, mix, structure, workload, out } => {
            gen(n, m, seed, shape, mix, structure.as_deref(), workload.as_deref(), out.as_ref()).map(|_| ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
