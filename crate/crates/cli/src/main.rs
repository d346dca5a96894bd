use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stabmpo::harness::{
    read_key_values, run_floquet, run_tdoped, selftest, ExperimentConfig, FloquetConfig, Program, RunResult,
    TDopedConfig,
};
use stabmpo::Error;

#[derive(Parser)]
#[command(name = "stabmpo", version, about = "Stabilizer-MPO simulation of Clifford circuits with sparse rotations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random brick-wall Clifford circuits doped with T gates.
    Tdoped(TDopedArgs),
    /// Kicked Floquet chain with random U(1)-symmetric Cliffords.
    Floquet(FloquetArgs),
    /// T-doped run that also writes the temporal entanglement grid.
    Temporal(TDopedArgs),
    /// Compile a gate program into layers plus a residual tableau.
    Compile {
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in oracle, twirl and invariant checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "run")]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(long)]
    svd_cutoff: Option<f64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TDopedArgs {
    #[command(flatten)]
    common: Common,
    /// Number of Clifford + T blocks.
    #[arg(long)]
    m: Option<usize>,
    /// Brick-wall sublayers per block.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    observable: Option<String>,
    /// Also evolve gate by gate as a plain MPS.
    #[arg(long)]
    baseline: bool,
    /// folded or unfolded
    #[arg(long)]
    aux_mode: Option<String>,
}

#[derive(Args)]
struct FloquetArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    periods: Option<usize>,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse { .. } | Error::NotHermitian(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl Common {
    fn overrides(&self, kv: &mut BTreeMap<String, String>) {
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                kv.insert(k.to_string(), v);
            }
        };
        put("n", self.n.map(|v| v.to_string()));
        put("chi", self.chi.map(|v| v.to_string()));
        put("svd_cutoff", self.svd_cutoff.map(|v| v.to_string()));
        put("realizations", self.realizations.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
    }
}

fn load<C: ExperimentConfig>(mut cfg: C, common: &Common, extra: BTreeMap<String, String>) -> Result<C, Failure> {
    let mut kv = match &common.config {
        Some(p) => read_key_values(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => BTreeMap::new(),
    };
    common.overrides(&mut kv);
    kv.extend(extra);
    cfg.apply(&kv)?;
    cfg.validate()?;
    Ok(cfg)
}

fn tdoped_config(a: &TDopedArgs, temporal: bool) -> Result<TDopedConfig, Failure> {
    let mut extra = BTreeMap::new();
    if let Some(m) = a.m {
        extra.insert("m_layers".into(), m.to_string());
    }
    if let Some(d) = a.d {
        extra.insert("depth_d".into(), d.to_string());
    }
    if let Some(o) = &a.observable {
        extra.insert("observable".into(), o.clone());
    }
    if let Some(x) = &a.aux_mode {
        extra.insert("aux_mode".into(), x.clone());
    }
    if a.baseline {
        extra.insert("run_baseline".into(), "true".into());
    }
    if temporal {
        extra.insert("run_temporal".into(), "true".into());
    }
    load(TDopedConfig::default(), &a.common, extra)
}

fn report(result: &RunResult, out: &std::path::Path) -> Result<(), Failure> {
    result.write(out)?;
    print!("{}", result.aggregate_csv());
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Tdoped(a) => report(&run_tdoped(&tdoped_config(&a, false)?)?, &a.common.out),
        Command::Temporal(a) => report(&run_tdoped(&tdoped_config(&a, true)?)?, &a.common.out),
        Command::Floquet(a) => {
            let mut extra = BTreeMap::new();
            if let Some(e) = a.epsilon {
                extra.insert("epsilon".into(), e.to_string());
            }
            if let Some(p) = a.periods {
                extra.insert("periods".into(), p.to_string());
            }
            let cfg = load(FloquetConfig::default(), &a.common, extra)?;
            report(&run_floquet(&cfg)?, &a.common.out)
        }
        Command::Compile { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            let program: Program = text.parse()?;
            let compiled = program.compile()?.to_string();
            match out {
                Some(p) => std::fs::write(&p, compiled).map_err(|e| Failure::Run(e.to_string())),
                None => {
                    print!("{compiled}");
                    Ok(())
                }
            }
        }
        Command::Selftest => {
            let mut ok = true;
            for c in selftest() {
                println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Run("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
