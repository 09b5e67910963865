use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nslat::discriminant::{self, glue_group, l_invariant};
use nslat::dsl;
use nslat::entropy::{self, Verdict};
use nslat::enumerate;
use nslat::matrix::{Int, Rat};
use nslat::pipeline::{self, AppendixOptions, ResultStore, RunConfig, TableSet};
use nslat::reference::ReferenceSet;
use nslat::{roots, Error, Lattice};

#[derive(Parser)]
#[command(name = "nslat", version, about = "Zero-entropy hyperbolic lattices: inspection, tests, classification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Directory with f_tables/, watson.lat, rootless32.lat, appendix193.lat
    #[arg(long, global = true, default_value = "tables")]
    tables: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials for the randomized tests (default: 500 sublattice, 200 genus)
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest glue group (or number of glue lines) scanned for overlattices
    #[arg(long, global = true, default_value_t = discriminant::DEFAULT_GROUP_CAP)]
    cap_group: usize,
    /// Largest number of vectors a short-vector enumeration may produce
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cap_enum: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, signature, determinant, parity and discriminant form
    Info {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Canonical form and Gram matrix
    Parse { expr: String },
    /// Root system of a definite lattice
    Roots { expr: String },
    /// Glue group with its q- and b-values on generators
    Glue { expr: String },
    /// Even overlattices (all, or of one prime index)
    Overlattices {
        expr: String,
        #[arg(long)]
        prime: Option<i64>,
    },
    /// Run one entropy test on a lattice given as U + M
    Test { name: TestName, expr: String },
    /// Critical sublattice of U + M
    Critical {
        expr: String,
        #[arg(long)]
        sublattices: bool,
    },
    /// Steps I and II at one rank, persisted to --out
    Classify {
        #[arg(long)]
        rank: usize,
    },
    /// Structural checks on the appendix list, optionally with all tests
    VerifyAppendix {
        #[arg(long)]
        run_tests: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TestName {
    Overlattice,
    Sublattice,
    Genus,
    Surjectivity,
    CoveringRadius,
    DetCube,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. }
        | Error::BadIndex(_)
        | Error::BadTriangleCount(_)
        | Error::NotSplitForm
        | Error::NotSymmetric
        | Error::NotSquare
        | Error::Degenerate
        | Error::RankTooSmall(..)
        | Error::UnsupportedFamily(_)
        | Error::NotPositiveDefinite
        | Error::NotNegativeDefinite => 2,
        Error::TableMissing(_) | Error::MissingPriorRank(_) | Error::Io(_) => 3,
        Error::GroupTooLarge { .. } | Error::TooLarge(_) | Error::Overflow => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn gram_lines(l: &Lattice) -> String {
    l.gram()
        .iter()
        .map(|r| r.iter().map(|x| format!("{x:>4}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn fmt_elem(e: &[i64]) -> String {
    format!("({})", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn load_tables(g: &Global) -> nslat::Result<TableSet> {
    TableSet::load(&g.tables)
}

fn print_verdict(v: &Verdict) {
    println!("{v}");
    println!("{}", serde_json::to_string(&v.certificate).expect("certificates serialize"));
}

fn run(cli: &Cli) -> nslat::Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Info { expr, json } => {
            let l = dsl::parse_lattice(expr)?;
            let sig = l.signature()?;
            let fqm = glue_group(&l)?;
            let q: Vec<Rat> = (0..fqm.rank()).map(|i| fqm.q(&fqm.generator(i))).collect();
            let l_inv = l_invariant(&l)?;
            if *json {
                let v = serde_json::json!({
                    "rank": l.rank(),
                    "signature": [sig.positives, sig.negatives],
                    "det": l.determinant().to_string(),
                    "even": l.is_even(),
                    "glue": fqm.orders(),
                    "l": l_inv,
                    "q": q.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                });
                println!("{v}");
            } else {
                println!("rank\t{}", l.rank());
                println!("signature\t{sig}");
                println!("det\t{}", l.determinant());
                println!("even\t{}", l.is_even());
                let orders: Vec<String> = fqm.orders().iter().map(|d| format!("Z/{d}")).collect();
                println!("glue\t{}", if orders.is_empty() { "0".into() } else { orders.join(" x ") });
                println!("l\t{l_inv}");
                println!("q\t{}", q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            }
        }
        Command::Parse { expr } => {
            let e = dsl::parse(expr)?;
            println!("{}", dsl::print(&e));
            println!("{}", gram_lines(&e.eval()));
        }
        Command::Roots { expr } => {
            let l = dsl::parse_lattice(expr)?;
            let d = if l.is_negative_definite() { l.negate() } else { l.clone() };
            let count = enumerate::short_vectors_with_norms(&d, &Rat::from(Int::from(2)), false, Some(g.cap_enum))?
                .iter()
                .filter(|(_, n)| *n == Int::from(2))
                .count();
            let rs = roots::roots(&l)?;
            println!("type\t{}", rs.type_label());
            println!("roots\t{count}");
            println!("finite index\t{}", roots::has_finite_index_root_sublattice(&l)?);
        }
        Command::Glue { expr } => {
            let l = dsl::parse_lattice(expr)?;
            let fqm = glue_group(&l)?;
            println!("order\t{}", fqm.order());
            for i in 0..fqm.rank() {
                let x = fqm.generator(i);
                let b: Vec<String> = (0..fqm.rank()).map(|j| fqm.b(&x, &fqm.generator(j)).to_string()).collect();
                println!("g{i}\tZ/{}\tq = {}\tb = [{}]\t{}", fqm.orders()[i], fqm.q(&x), b.join(", "), fmt_elem(&x));
            }
        }
        Command::Overlattices { expr, prime } => {
            let l = dsl::parse_lattice(expr)?;
            let list: Vec<Lattice> = match prime {
                Some(p) => discriminant::prime_index_overlattices_capped(&l, *p, g.cap_group)?,
                None => discriminant::even_overlattices(&l, g.cap_group)?.into_iter().map(|o| o.lattice).collect(),
            };
            println!("{} overlattices", list.len());
            for o in &list {
                println!("det {}\n{}", o.determinant(), gram_lines(o));
            }
        }
        Command::Test { name, expr } => {
            let l = dsl::parse_lattice(expr)?;
            let n = l.rank();
            let v = match name {
                TestName::Overlattice => {
                    let t = load_tables(g)?;
                    entropy::overlattice_test(&l, Some(&t.f_table(n)?))?
                }
                TestName::Sublattice => {
                    let t = load_tables(g)?;
                    let z: ReferenceSet = t.z_table(n - 1, &[])?;
                    println!("seed {}", g.seed);
                    entropy::sublattice_test(&l, Some(&z), g.trials.unwrap_or(entropy::DEFAULT_SUBLATTICE_TRIALS), g.seed)?
                }
                TestName::Genus => {
                    println!("seed {}", g.seed);
                    entropy::genus_test(&l, g.trials.unwrap_or(entropy::DEFAULT_GENUS_TRIALS), g.seed)?
                }
                TestName::Surjectivity => entropy::surjectivity_test(&l)?,
                TestName::CoveringRadius => entropy::covering_radius_test(&l)?,
                TestName::DetCube => entropy::det_cube_test(&l)?,
            };
            print_verdict(&v);
        }
        Command::Critical { expr, sublattices } => {
            let l = dsl::parse_lattice(expr)?;
            let cr = entropy::critical_sublattice(&l)?;
            match &cr {
                entropy::CriticalSublatticeResult::Decided { basis, index, certificate } => {
                    println!("index\t{index}");
                    for v in &basis.vectors {
                        println!("basis\t{}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
                    }
                    println!("{}", serde_json::to_string(certificate).expect("certificates serialize"));
                }
                entropy::CriticalSublatticeResult::Undecided { reason } => println!("undecided\t{reason}"),
            }
            if *sublattices {
                let subs = entropy::zero_entropy_sublattices(&l, &cr)?;
                println!("{} sublattices", subs.len());
                for s in &subs {
                    let sub = s.gram_in(&l);
                    println!("det {}\t[{}]", sub.determinant(), sub.gram().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join("; "));
                }
            }
        }
        Command::Classify { rank } => {
            let t = load_tables(g)?;
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("results.tsv"));
            let store = ResultStore::new(out);
            let prior = store.load()?;
            let trials = g.trials;
            let cfg = RunConfig {
                seed: g.seed,
                sublattice_trials: trials.unwrap_or(entropy::DEFAULT_SUBLATTICE_TRIALS),
                genus_trials: trials.unwrap_or(entropy::DEFAULT_GENUS_TRIALS),
                jobs: g.jobs,
                group_cap: g.cap_group,
            };
            let res = pipeline::run_rank(*rank, &t, &prior, &cfg)?;
            store.replace_rank(*rank, &res.records)?;
            println!("seed {}", g.seed);
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
            for r in &res.records {
                println!("{}", r.store_line());
            }
            let count = |w: &str| res.records.iter().filter(|r| r.status_word() == w).count();
            println!(
                "rank {rank}: {} zero, {} positive, {} undecided",
                count("zero"),
                count("positive"),
                count("undecided")
            );
        }
        Command::VerifyAppendix { run_tests } => {
            let t = load_tables(g)?;
            let opts = AppendixOptions {
                run_tests: *run_tests,
                sublattice_trials: g.trials.unwrap_or(entropy::DEFAULT_SUBLATTICE_TRIALS),
                genus_trials: g.trials.unwrap_or(entropy::DEFAULT_GENUS_TRIALS),
                seed: g.seed,
            };
            if *run_tests {
                println!("seed {}", g.seed);
            }
            let report = pipeline::verify_appendix(&t, &opts)?;
            for f in &report.failures {
                println!("FAIL\t{f}");
            }
            println!("{}/{} structural checks passed", report.structural_passes(), report.entries.len());
            println!("{} covering-radius zero certificates", report.zero_certified());
            if !report.failures.is_empty() {
                return Err(Error::CertificationFailed(format!("{} failures", report.failures.len())));
            }
        }
    }
    Ok(())
}
