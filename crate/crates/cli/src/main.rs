use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairmerge::distance::{dist_fast, lmean_within, Ell};
use fairmerge::instances::{gen_3partition_reduction, gen_random};
use fairmerge::io::{
    read_clustering, read_instance, to_json, ClosestFairReport, ClusteringFile, ConsensusReport, InstanceFile,
    OracleCheck, OracleReport, ReductionReport,
};
use fairmerge::oracle::{oracle_closest_balanced, oracle_closest_fair, oracle_consensus, oracle_cap};
use fairmerge::{closest_fair, fair_consensus, Clustering, ColoredInstance, FairError};

#[derive(Parser)]
#[command(name = "fairmerge", version, about = "Closest fair clustering and fair consensus for red/blue points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pairwise-disagreement distance between two clusterings.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Check both clusterings against this instance's point count.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Move a clustering to a nearby fair clustering.
    ClosestFair {
        instance: PathBuf,
        clustering: PathBuf,
        /// Output clustering (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Aggregate several clusterings into one fair clustering.
    Consensus {
        instance: PathBuf,
        #[arg(required = true)]
        clusterings: Vec<PathBuf>,
        /// Exponent: an integer, a decimal at least 1, or "inf".
        #[arg(long = "l", default_value = "1")]
        ell: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also solve exactly and check the approximation factor.
        #[arg(long)]
        verify_oracle: bool,
    },
    /// Solve a small instance exactly by enumerating every partition.
    Oracle {
        instance: PathBuf,
        #[arg(required = true)]
        clusterings: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Fair)]
        mode: Mode,
        #[arg(long = "l", default_value = "1")]
        ell: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate an instance and clustering.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        instance_out: PathBuf,
        #[arg(long)]
        clustering_out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated 3-partition elements.
        #[arg(long, value_delimiter = ',')]
        s: Vec<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fair,
    Balanced,
    Consensus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    Reduction,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<FairError> for Failure {
    fn from(e: FairError) -> Self {
        let code = match e {
            FairError::InvalidFile(_) | FairError::InvalidExponent(_) | FairError::ZeroRatio { .. } => 2,
            FairError::SizeMismatch { .. } | FairError::LengthMismatch { .. } => 3,
            FairError::InfeasibleFairness { .. } => 4,
            FairError::TooLarge { .. } => 5,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_ell(text: &str) -> CliResult<Ell<f64>> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(Ell::Infinity);
    }
    let v: f64 = t.parse().map_err(|_| usage(format!("invalid exponent {text:?}")))?;
    Ok(Ell::finite(v)?)
}

fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: 1,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_all(instance: &ColoredInstance, paths: &[PathBuf]) -> CliResult<Vec<Clustering>> {
    paths
        .iter()
        .map(|p| read_clustering(p, Some(instance.n())).map_err(Failure::from))
        .collect()
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Dist { a, b, instance } => {
            let n = instance.map(|p| read_instance(&p)).transpose()?.map(|i| i.n());
            let a = read_clustering(&a, n)?;
            let b = read_clustering(&b, n)?;
            println!("{}", dist_fast(&a, &b)?);
        }
        Command::ClosestFair {
            instance,
            clustering,
            out,
            report,
        } => {
            let inst = read_instance(&instance)?;
            let input = read_clustering(&clustering, Some(inst.n()))?;
            let (fair, guarantee, transcript) = closest_fair(&inst, &input)?;
            emit(out.as_deref(), &to_json(&ClusteringFile::from_clustering(&fair)))?;
            if let Some(path) = report {
                let doc = ClosestFairReport::new(&inst, &guarantee, &transcript);
                emit(Some(&path), &to_json(&doc))?;
            }
        }
        Command::Consensus {
            instance,
            clusterings,
            ell,
            out,
            report,
            verify_oracle,
        } => {
            let ell = parse_ell(&ell)?;
            let inst = read_instance(&instance)?;
            let inputs = load_all(&inst, &clusterings)?;
            let result = fair_consensus(&inst, &inputs, ell)?;
            let oracle = if verify_oracle {
                let exact = oracle_consensus(&inst, &inputs, ell)?;
                Some(OracleCheck {
                    optimum: exact.objective.value,
                    partitions_enumerated: exact.partitions_enumerated,
                    within_factor: lmean_within(&result.distances, &exact.distances, ell, result.factor),
                })
            } else {
                None
            };
            emit(out.as_deref(), &to_json(&ClusteringFile::from_clustering(&result.clustering)))?;
            let failed = oracle.as_ref().is_some_and(|o| !o.within_factor);
            if let Some(path) = report {
                let doc = ConsensusReport {
                    regime: fairmerge::Guarantee::for_regime(result.regime).label.to_string(),
                    ell: ell.to_string(),
                    chosen: result.chosen,
                    objective: result.objective.value,
                    distances: result.distances.clone(),
                    factor: fairmerge::io::factor_json(result.factor),
                    colors_swapped: inst.swapped(),
                    oracle,
                };
                emit(Some(&path), &to_json(&doc))?;
            }
            if failed {
                return Err(Failure {
                    code: 1,
                    message: "consensus objective exceeds the guaranteed factor".into(),
                });
            }
        }
        Command::Oracle {
            instance,
            clusterings,
            mode,
            ell,
            report,
        } => {
            let inst = read_instance(&instance)?;
            let inputs = load_all(&inst, &clusterings)?;
            let doc = match mode {
                Mode::Fair | Mode::Balanced => {
                    let [input] = inputs.as_slice() else {
                        return Err(usage("fair and balanced modes take exactly one clustering"));
                    };
                    let (name, r) = match mode {
                        Mode::Fair => ("fair", oracle_closest_fair(&inst, input)?),
                        _ => ("balanced", oracle_closest_balanced(&inst, input)?),
                    };
                    OracleReport {
                        mode: name.into(),
                        optimum: r.optimum.into(),
                        distances: None,
                        argmin: r.argmin.labels().to_vec(),
                        partitions_enumerated: r.partitions_enumerated,
                    }
                }
                Mode::Consensus => {
                    let r = oracle_consensus(&inst, &inputs, parse_ell(&ell)?)?;
                    OracleReport {
                        mode: "consensus".into(),
                        optimum: r.objective.value.into(),
                        distances: Some(r.distances),
                        argmin: r.argmin.labels().to_vec(),
                        partitions_enumerated: r.partitions_enumerated,
                    }
                }
            };
            emit(report.as_deref(), &to_json(&doc))?;
        }
        Command::Gen {
            kind,
            instance_out,
            clustering_out,
            report,
            n,
            p,
            q,
            k,
            seed,
            s,
        } => {
            let (inst, clustering) = match kind {
                Kind::Random => {
                    let n = n.ok_or_else(|| usage("--n is required for random instances"))?;
                    let k = k.ok_or_else(|| usage("--k is required for random instances"))?;
                    let seed = seed.ok_or_else(|| usage("--seed is required for random instances"))?;
                    gen_random(n, p, q, k, seed)?
                }
                Kind::Reduction => {
                    let r = gen_3partition_reduction(&s, p, q)?;
                    if !r.oracle_checkable {
                        eprintln!(
                            "warning: {} points exceed the oracle cap of {}; only the algorithms can run on this instance",
                            r.point_count,
                            oracle_cap()
                        );
                    }
                    if let Some(path) = &report {
                        emit(Some(path), &to_json(&ReductionReport::new(&r)))?;
                    }
                    (r.instance, r.clustering)
                }
            };
            emit(Some(&instance_out), &to_json(&InstanceFile::from_instance(&inst)))?;
            emit(Some(&clustering_out), &to_json(&ClusteringFile::from_clustering(&clustering)))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
