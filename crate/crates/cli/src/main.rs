//! Command-line front end.
//!
//! Exit codes: 0 success or decided verdict, 2 usage/parse/IO error,
//! 3 inconclusive classification, 4 resource cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cauchy_dichotomy::dichotomy::{classify, Embedding, DEFAULT_N_MAX};
use cauchy_dichotomy::divergence::DivergencePair;
use cauchy_dichotomy::files::{fmt17, trajectory_csv, FamilyKind, FamilySpec, ReportDocument, SequenceFile};
use cauchy_dichotomy::montecarlo::{simulate_log_ratios, SimulationConfig, DEFAULT_EVALUATION_CAP};
use cauchy_dichotomy::{reduce_to_canonical, Error, UHPoint, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cauchy-dichotomy",
    version,
    about = "Equivalence vs. singularity of infinite products of Cauchy laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PairArgs {
    loc_z: f64,
    scale_z: f64,
    loc_w: f64,
    scale_w: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbeddingArg {
    Location,
    Scale,
}

impl From<EmbeddingArg> for Embedding {
    fn from(e: EmbeddingArg) -> Self {
        match e {
            EmbeddingArg::Location => Embedding::Location,
            EmbeddingArg::Scale => Embedding::Scale,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    PowerLaw,
    Geometric,
    Constant,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal invariant chi(z, w)
    Chi(PairArgs),
    /// Kullback-Leibler divergence ln(1 + chi/4)
    Kl(PairArgs),
    /// Hellinger affinity (Bhattacharyya coefficient)
    Affinity(PairArgs),
    /// SL(2,R) map sending (z, w) to (λi, i)
    Reduce(PairArgs),
    /// Decide equivalence or singularity for a sequence file
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Write the full JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the family embedding
        #[arg(long, value_enum)]
        embedding: Option<EmbeddingArg>,
    },
    /// Simulate log-likelihood-ratio trajectories under the product law of w
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the trajectory table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        embedding: Option<EmbeddingArg>,
    },
    /// Write a family sequence file
    Family {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_enum, default_value = "location")]
        embedding: EmbeddingArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Inconclusive,
    ResourceCap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Inconclusive => 3,
            Failure::ResourceCap(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceCap { .. } => Failure::ResourceCap(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::ResourceCap(m) => eprintln!("error: {m}"),
                Failure::Inconclusive => {}
            }
            ExitCode::from(f.code())
        }
    }
}

fn points(a: &PairArgs) -> Result<DivergencePair, Failure> {
    let z = UHPoint::new(a.loc_z, a.scale_z).map_err(|e| Failure::Usage(format!("z: {e}")))?;
    let w = UHPoint::new(a.loc_w, a.scale_w).map_err(|e| Failure::Usage(format!("w: {e}")))?;
    Ok(DivergencePair::new(z, w))
}

fn print_scalar(name: &str, value: f64, pair: &DivergencePair) {
    let c = pair.chain();
    println!("{name} = {}", fmt17(value));
    println!("kakutani_term = {}", fmt17(c.kakutani));
    println!("half_kl = {}", fmt17(c.half_kl));
    println!("chi_eighth = {}", fmt17(c.chi_eighth));
}

fn read_sequence(path: &Path) -> Result<SequenceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    SequenceFile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Chi(a) => {
            let pair = points(&a)?;
            print_scalar("chi", pair.chi, &pair);
        }
        Command::Kl(a) => {
            let pair = points(&a)?;
            print_scalar("kl", pair.kl(), &pair);
        }
        Command::Affinity(a) => {
            let pair = points(&a)?;
            print_scalar("affinity", pair.affinity(), &pair);
        }
        Command::Reduce(a) => {
            let pair = points(&a)?;
            let cf = reduce_to_canonical(pair.z, pair.w);
            let [ma, mb, mc, md] = cf.map.entries();
            let (zi, wi) = cf.map.act_pair(pair.z, pair.w);
            println!("lambda = {}", fmt17(cf.lambda));
            println!("chi = {}", fmt17(pair.chi));
            println!("matrix = [{}, {}, {}, {}]", fmt17(ma), fmt17(mb), fmt17(mc), fmt17(md));
            println!("act_z = [{}, {}]", fmt17(zi.location()), fmt17(zi.scale()));
            println!("act_w = [{}, {}]", fmt17(wi.location()), fmt17(wi.scale()));
        }
        Command::Classify {
            file,
            n_max,
            report,
            embedding,
        } => {
            let mut seq_file = read_sequence(&file)?;
            if let Some(e) = embedding {
                seq_file = seq_file.with_embedding(e.into());
            }
            let seq = seq_file.to_sequence().map_err(Failure::Usage)?;
            let r = classify(&seq, n_max)?;
            println!("verdict = {}", r.verdict);
            println!("basis = {}", r.basis);
            if let Some(s) = r.suggested {
                println!("suggested = {s}");
            }
            println!("terms_evaluated = {}", r.terms_evaluated);
            println!("chi_sum = {}", fmt17(r.chi_sum));
            println!("kakutani_sum = {}", fmt17(r.kakutani_sum));
            let verdict = r.verdict;
            if let Some(path) = report {
                let doc = ReportDocument::new(seq_file, n_max, r);
                write_out(Some(&path), &doc.to_json())?;
            }
            if verdict == Verdict::Inconclusive {
                return Err(Failure::Inconclusive);
            }
        }
        Command::Simulate {
            file,
            trials,
            horizon,
            seed,
            out,
            embedding,
        } => {
            let cfg = SimulationConfig {
                trials,
                horizon,
                seed,
                ..Default::default()
            };
            let requested = trials as u128 * horizon as u128;
            if requested > DEFAULT_EVALUATION_CAP {
                return Err(Error::ResourceCap {
                    requested,
                    cap: DEFAULT_EVALUATION_CAP,
                }
                .into());
            }
            let seq_file = read_sequence(&file)?;
            let embedding = embedding.map_or(seq_file.embedding(), Embedding::from);
            let seq = seq_file.to_sequence().map_err(Failure::Usage)?;
            let pairs = seq.concrete_pairs(horizon, embedding)?;
            let batch = simulate_log_ratios(&pairs, &cfg)?;
            write_out(out.as_deref(), &trajectory_csv(&batch))?;
            if out.is_some() {
                if let Some(last) = batch.summary.last() {
                    println!("final_checkpoint = {}", last.n);
                    println!("final_median = {}", fmt17(last.median));
                    println!("max_abs_increment = {}", fmt17(batch.max_abs_increment));
                }
            }
        }
        Command::Family {
            kind,
            c,
            p,
            r,
            embedding,
            out,
        } => {
            let spec = FamilySpec {
                kind: match kind {
                    KindArg::PowerLaw => FamilyKind::PowerLaw,
                    KindArg::Geometric => FamilyKind::Geometric,
                    KindArg::Constant => FamilyKind::Constant,
                },
                c,
                p,
                r,
                embedding: embedding.into(),
            };
            spec.to_sequence().map_err(Failure::Usage)?;
            write_out(out.as_deref(), &SequenceFile::Family(spec).to_text())?;
        }
    }
    Ok(())
}
