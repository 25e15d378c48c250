use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use fasclique::campaign::{emit_report, run_campaign, CampaignSpec, OrderStrategy, ReportFormat};
use fasclique::constants::{practical_constants, theoretical_constants, Constants, ConstantsMode};
use fasclique::oracle::{brute_force_fk_detailed, exhaust};
use fasclique::order::VertexOrder;
use fasclique::packing::{find_clique_packing, PackingOptions};
use fasclique::seed::RngSeed;
use fasclique::tournament::Tournament;
use fasclique::verify::{verify_property, Property, VerifyOptions};
use fasclique::{Error, Result};

/// Disjoint transitive cliques in feedback arc sets of random multipartite tournaments.
#[derive(Parser)]
#[command(name = "fasclique", version)]
struct Cli {
    /// Base RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel commands.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random k-partite tournament.
    Gen {
        #[arg(long)]
        k: usize,
        /// Part size.
        #[arg(long, conflicts_with = "turan")]
        n: Option<usize>,
        /// Total vertex count split as evenly as possible.
        #[arg(long)]
        turan: Option<usize>,
        /// kpt or json.
        #[arg(long, default_value = "kpt")]
        format: String,
    },
    /// Run the packing pipeline on one tournament and order.
    Pack {
        #[arg(long)]
        input: PathBuf,
        /// JSON array with the vertex order; random from the seed if absent.
        #[arg(long)]
        order_file: Option<PathBuf>,
        #[command(flatten)]
        consts: ConstArgs,
        #[arg(long, default_value_t = 3)]
        retries: usize,
        /// Write one clique per CSV row to this file.
        #[arg(long)]
        emit_cliques: Option<PathBuf>,
        /// Skip the common-neighborhood re-check after each stage.
        #[arg(long)]
        no_check: bool,
    },
    /// Print the constants for (k, n).
    Constants {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Practical constants instead of theoretical ones.
        #[arg(long)]
        practical: bool,
        /// Practical override, key=value (mu, d, delta, absorber_fraction,
        /// vertex_scale, clique_scale, edge_scale).
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Monte Carlo check of a structural property.
    Verify {
        /// 1, 2, 3, 4 or friendly.
        #[arg(long)]
        property: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Distinct tournaments for properties 3 and 4.
        #[arg(long, default_value_t = 10)]
        tournaments: usize,
        /// Largest q (property 4) or d (property 3).
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        #[command(flatten)]
        consts: ConstArgs,
    },
    /// Exact computations on tiny instances.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Seeded campaign over random tournaments and order strategies.
    Campaign {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        /// Comma-separated: random, identity, witness, degree_sorted.
        #[arg(long, value_delimiter = ',', default_value = "random")]
        strategies: Vec<String>,
        #[command(flatten)]
        consts: ConstArgs,
        #[arg(long, default_value_t = 3)]
        retries: usize,
        /// json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact f_k of one tournament with a minimizing order.
    Fk {
        #[arg(long)]
        input: PathBuf,
    },
    /// f_k and the s-k+1 bound for every tournament with k parts of size n, as CSV.
    Exhaust {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct ConstArgs {
    /// theoretical or practical.
    #[arg(long, default_value = "practical")]
    mode: String,
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConstArgs {
    fn mode(&self) -> Result<ConstantsMode> {
        self.mode.parse()
    }

    fn build(&self, k: usize, n: usize) -> Result<Constants> {
        let overrides = parse_overrides(&self.overrides)?;
        match self.mode()? {
            ConstantsMode::Practical => practical_constants(k, n, &overrides),
            ConstantsMode::Theoretical if overrides.is_empty() => theoretical_constants(k, n),
            ConstantsMode::Theoretical => Err(Error::Parameter("overrides apply to practical constants only".into())),
        }
    }
}

fn parse_overrides(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("override {s:?} is not KEY=VALUE")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parameter(format!("override {k} has non-numeric value {v:?}")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn read_tournament(path: &Path) -> Result<Tournament> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"KPT1") {
        Tournament::from_kpt_bytes(&bytes)
    } else {
        Tournament::from_json(&serde_json::from_slice(&bytes)?)
    }
}

fn write_out(out: &Option<PathBuf>, data: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, data)?,
        None => std::io::stdout().write_all(data)?,
    }
    Ok(())
}

fn json_line<T: serde::Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Parameter("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Resource(e.to_string()))?;
    }
    let seed = RngSeed(cli.seed);
    match cli.command {
        Command::Gen { k, n, turan, format } => {
            let t = match (n, turan) {
                (Some(n), None) => Tournament::sample_random(n, k, seed)?,
                (None, Some(total)) => Tournament::sample_turan(total, k, seed)?,
                _ => return Err(Error::Parameter("give exactly one of --n and --turan".into())),
            };
            let data = match format.as_str() {
                "kpt" => t.to_kpt_bytes(),
                "json" => json_line(&t.to_json())?,
                _ => return Err(Error::Parameter(format!("unknown format {format:?}"))),
            };
            write_out(&cli.out, &data)?;
        }
        Command::Pack {
            input,
            order_file,
            consts,
            retries,
            emit_cliques,
            no_check,
        } => {
            let t = read_tournament(&input)?;
            if !t.layout().is_equal_parts() {
                return Err(Error::Precondition(
                    "parts must have equal sizes; reduce the tournament first".into(),
                ));
            }
            let pi = match order_file {
                Some(p) => serde_json::from_slice::<VertexOrder>(&fs::read(p)?)?,
                None => VertexOrder::random(t.num_vertices(), &mut seed.derive(0, 1).rng()),
            };
            let c = consts.build(t.k(), t.layout().part_size(0))?;
            let opts = PackingOptions {
                retries,
                check_extendable: !no_check,
                ..Default::default()
            };
            let res = find_clique_packing(&t, &pi, &c, seed, opts)?;
            if let Some(path) = emit_cliques {
                let mut csv = String::new();
                for q in &res.cliques {
                    let row: Vec<String> = q.vertices().iter().map(|v| v.to_string()).collect();
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
                fs::write(path, csv)?;
            }
            write_out(&cli.out, &json_line(&res)?)?;
            if !res.is_success() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Constants {
            k,
            n,
            practical,
            overrides,
        } => {
            let args = ConstArgs {
                mode: if practical { "practical" } else { "theoretical" }.into(),
                overrides,
            };
            write_out(&cli.out, &json_line(&args.build(k, n)?)?)?;
        }
        Command::Verify {
            property,
            k,
            n,
            trials,
            tournaments,
            max_len,
            consts,
        } => {
            let prop: Property = property.parse()?;
            let c = consts.build(k, n)?;
            let report = verify_property(prop, &c, trials, seed, VerifyOptions { tournaments, max_len })?;
            write_out(&cli.out, &json_line(&report)?)?;
        }
        Command::Oracle { command } => match command {
            OracleCommand::Fk { input } => {
                let t = read_tournament(&input)?;
                let r = brute_force_fk_detailed(&t)?;
                write_out(&cli.out, &json_line(&r)?)?;
            }
            OracleCommand::Exhaust { k, n } => {
                let mut csv = String::from("tournament,fk,bound,bound_tight\n");
                for r in exhaust(k, n)? {
                    csv.push_str(&format!("{},{},{},{}\n", r.tournament, r.fk, r.bound, r.bound_tight));
                }
                write_out(&cli.out, csv.as_bytes())?;
            }
        },
        Command::Campaign {
            k,
            n,
            trials,
            strategies,
            consts,
            retries,
            format,
        } => {
            let strategies = strategies
                .iter()
                .map(|s| s.trim().parse::<OrderStrategy>())
                .collect::<Result<Vec<_>>>()?;
            let format: ReportFormat = format.parse()?;
            let mut spec = CampaignSpec::new(k, n, trials, strategies, seed);
            spec.mode = consts.mode()?;
            spec.overrides = parse_overrides(&consts.overrides)?;
            spec.retries = retries;
            let report = run_campaign(&spec)?;
            write_out(&cli.out, emit_report(&report, format)?.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
