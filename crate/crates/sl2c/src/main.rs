use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl2c::config::{Algorithm, ExperimentConfig, Format, GenMode};
use sl2c::emit::{cost_csv, cost_table, emit, mixing_csv};
use sl2c::experiment::{log_csv, oracle_cap, run_experiment};
use sl2c::presets::{generators, preset, random_pair};
use sl2c::record::{CollisionRecord, IdentityRecord};
use sl2c::{Error, Result};
use sl2c_core::analysis::{alpha_pair, subexp_table, table6_ns, walk_distance};
use sl2c_core::attacks::{generic_attack, linear_attack, Phase2, SearchOpts};
use sl2c_core::special::{even_attack, pqtz_attack};
use sl2c_core::{Field, Group};

#[derive(Parser)]
#[command(name = "sl2c", version, about = "Collision search for SL2 homomorphic hashes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a batch of trials and print summary statistics.
    Run(RunArgs),
    /// Find one collision and print it as a JSON record.
    Attack(AttackArgs),
    /// Print a named generator pair.
    Preset {
        /// appendixB, xi_random or random
        name: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a collision record.
    Verify { path: PathBuf },
    /// Cost comparison for q = 2^64 .. 2^16384.
    Table6 {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        out: Format,
        #[arg(long, default_value_t = 80.0)]
        length_budget: f64,
    },
    /// Exact walk distances from uniform on SL2(F_q), q ≤ 5.
    Mixing {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 50)]
        m_max: usize,
        /// appendixB or random
        #[arg(long, default_value = "appendixB")]
        gen: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with the same keys as the flags; flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    p_min: Option<u64>,
    #[arg(long)]
    p_max: Option<u64>,
    #[arg(long = "N", default_value_t = 16)]
    big_n: u32,
    #[arg(long, value_enum, default_value_t = GenMode::XiRandom)]
    gen: GenMode,
    #[arg(long, value_enum, default_value_t = Algorithm::Linear)]
    alg: Algorithm,
    #[arg(long, default_value_t = 1)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    segment_len: Option<usize>,
    #[arg(long, default_value_t = 0)]
    dp_bits: u32,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// ξ0 and ξ1 for --gen xi_explicit.
    #[arg(long, num_args = 2)]
    xi: Option<Vec<String>>,
    /// A0 and A1 as "[a,b;c,d]" for --gen explicit.
    #[arg(long, num_args = 2)]
    matrices: Option<Vec<String>>,
    /// Also write the per-trial log as CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value_t = GenMode::XiRandom)]
    gen: GenMode,
    #[arg(long, value_enum, default_value_t = Algorithm::Linear)]
    alg: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, num_args = 2)]
    xi: Option<Vec<String>>,
    #[arg(long, num_args = 2)]
    matrices: Option<Vec<String>>,
}

fn pair(v: Option<Vec<String>>) -> Option<[String; 2]> {
    v.and_then(|v| v.try_into().ok())
}

impl RunArgs {
    fn config(self) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            return ExperimentConfig::from_json(&std::fs::read_to_string(path)?);
        }
        let c = ExperimentConfig {
            p: self.p,
            p_min: self.p_min,
            p_max: self.p_max,
            big_n: self.big_n,
            gen: self.gen,
            alg: self.alg,
            trials: self.trials,
            seed: self.seed,
            budget: self.budget,
            segment_len: self.segment_len,
            dp_bits: self.dp_bits,
            out: self.out,
            xi: pair(self.xi),
            matrices: pair(self.matrices),
            threads: self.threads,
        };
        c.validate()?;
        Ok(c)
    }
}

fn small_field(q: u64) -> Result<Field> {
    let (p, n) = match q {
        2 => (2, 1),
        3 => (3, 1),
        4 => (2, 2),
        5 => (5, 1),
        _ => return Err(Error::Config("q must be 2, 3, 4 or 5".into())),
    };
    Ok(Field::new(p, n)?)
}

fn table6(out: Format, budget: f64) -> Result<bool> {
    let pts = subexp_table(&table6_ns(), budget)?;
    match out {
        Format::Table => print!("{}", cost_table(&pts)),
        Format::Csv => print!("{}", cost_csv(&pts)?),
        Format::Json => {
            let v: Vec<_> = pts
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "n": c.n, "n0": c.n0, "n0_exact": c.n0_exact,
                        "subexp_work_log2": c.subexp_work_log2, "subexp_length_log2": c.subexp_length_log2,
                        "our_work_log2": c.our_work_log2, "our_length_log2": c.our_length_log2,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    Ok(true)
}

fn mixing(q: u64, m_max: usize, gen: &str, seed: u64) -> Result<bool> {
    let f = small_field(q)?;
    let g = Group::new(f.clone());
    let a = match gen {
        "appendixB" => alpha_pair(&f, f.primitive_element()),
        "random" => random_pair(&g, &mut ChaCha8Rng::seed_from_u64(seed)),
        _ => return Err(Error::Config(format!("unknown generator mode {gen:?}"))),
    };
    let ms: Vec<usize> = (0..=m_max).collect();
    let r = walk_distance(&g, &a, &ms)?;
    print!("{}", mixing_csv(q, &r)?);
    Ok(r.bound_holds(1e-12))
}

fn run(args: RunArgs) -> Result<bool> {
    let log_path = args.log.clone();
    let cfg = args.config()?;
    match cfg.alg {
        Algorithm::Table6 => return table6(cfg.out, 80.0),
        Algorithm::Mixing => return mixing(cfg.p_range()?.0, 50, "appendixB", cfg.seed),
        _ => {}
    }
    let e = run_experiment(&cfg)?;
    print!("{}", emit(&e.rows, cfg.out)?);
    if let Some(path) = log_path {
        std::fs::write(path, log_csv(&e.log)?)?;
    }
    Ok(e.all_verified())
}

fn attack(a: AttackArgs) -> Result<bool> {
    let f = Field::new(a.p, a.n)?;
    let g = Group::new(f.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let gens = generators(&g, a.gen, pair(a.xi).as_ref(), pair(a.matrices).as_ref(), &mut rng)?;
    let opts = &SearchOpts::with_seed(rng.next_u64());
    let gens = &gens;
    let c = match a.alg {
        Algorithm::Linear => linear_attack(&g, gens, opts)?,
        Algorithm::GenericD => generic_attack(&g, gens, Phase2::IntoD, false, opts)?,
        Algorithm::GenericCommute => generic_attack(&g, gens, Phase2::Commute, false, opts)?,
        Algorithm::GenericCompressed => generic_attack(&g, gens, Phase2::Commute, true, opts)?,
        Algorithm::Even => even_attack(&g, gens, opts)?,
        Algorithm::Oracle => sl2c_core::analysis::bfs_shortest_collision(&g, gens, oracle_cap(&f))?,
        Algorithm::Pqtz => {
            let r = pqtz_attack(&g, gens, opts)?;
            let id = IdentityRecord { word: r.identity_word.to_string(), length: r.identity_word.len(), verified: true };
            eprintln!("{}", serde_json::to_string(&id)?);
            r.collision
        }
        Algorithm::Mixing | Algorithm::Table6 => return Err(Error::Config("not a collision algorithm".into())),
    };
    let rec = CollisionRecord::new(&f, gens, &c);
    println!("{}", serde_json::to_string_pretty(&rec)?);
    rec.verify()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run(args) => run(args),
        Cmd::Attack(args) => attack(args),
        Cmd::Preset { name, p, n, seed } => (|| {
            let g = Group::new(Field::new(p, n)?);
            let a = preset(&g, &name, &mut ChaCha8Rng::seed_from_u64(seed))?;
            println!("{}\n{}", g.fmt_matrix(&a.a0), g.fmt_matrix(&a.a1));
            Ok(true)
        })(),
        Cmd::Verify { path } => (|| {
            let rec: CollisionRecord = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            let ok = rec.verify()?;
            println!("{}", if ok { "verified" } else { "NOT a collision" });
            Ok(ok)
        })(),
        Cmd::Table6 { out, length_budget } => table6(out, length_budget),
        Cmd::Mixing { q, m_max, gen, seed } => mixing(q, m_max, &gen, seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
