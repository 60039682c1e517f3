use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relay_experiments::{
    run, write_table, Experiment, ExperimentConfig, RunError, Scale, SweepAxis,
};

#[derive(Parser)]
#[command(
    name = "urelay",
    version,
    about = "Untrusted-relay secrecy experiments as CSV tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Secrecy rates of MF and AF against jamming power.
    Fig2(Opts),
    /// Secure degrees of freedom against rho.
    Fig3(Opts),
    /// Connection and secrecy outage against Rd, with Monte Carlo checks.
    Fig4(Opts),
    /// Secure diversity gain against rho.
    Fig5(Opts),
    /// Rates and outage along any parameter axis.
    Sweep(Opts),
    /// Symbol-level simulation of the MF lattice chain.
    Chain(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON config file; flags given here override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    ps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pd: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps2: Option<f64>,
    /// First-hop channel gain.
    #[arg(long, allow_negative_numbers = true)]
    g1: Option<f64>,
    /// Second-hop channel gain.
    #[arg(long, allow_negative_numbers = true)]
    g2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rd: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rs: Option<f64>,
    /// log INR / log SNR.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Swept parameter; needs --min, --max and --points.
    #[arg(long, requires_all = ["min", "max", "points"])]
    axis: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// linear or log.
    #[arg(long, default_value = "linear")]
    scale: Scale,
    /// Monte Carlo draws (or chain symbols) per row; 0 drops MC columns.
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn into_config(self, experiment: Experiment) -> Result<ExperimentConfig, RunError> {
        let file = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(e) = file.experiment.filter(|&e| e != experiment) {
            return Err(RunError::Config(format!(
                "config file is for `{e}` but `{experiment}` was requested"
            )));
        }
        let sweep = self.axis.map(|name| {
            SweepAxis::new(
                &name,
                self.min.expect("clap enforces --min"),
                self.max.expect("clap enforces --max"),
                self.points.expect("clap enforces --points"),
                self.scale,
            )
        });
        let flags = ExperimentConfig {
            experiment: Some(experiment),
            ps: self.ps,
            pd: self.pd,
            sigma2: self.sigma2,
            eps1: self.eps1,
            eps2: self.eps2,
            g1: self.g1,
            g2: self.g2,
            rd: self.rd,
            rs: self.rs,
            rho: self.rho,
            sweep,
            mc_samples: self.mc_samples,
            seed: self.seed,
            out: self.out,
        };
        Ok(file.merged(flags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, opts) = match cli.command {
        Command::Fig2(o) => (Experiment::Fig2, o),
        Command::Fig3(o) => (Experiment::Fig3, o),
        Command::Fig4(o) => (Experiment::Fig4, o),
        Command::Fig5(o) => (Experiment::Fig5, o),
        Command::Sweep(o) => (Experiment::Sweep, o),
        Command::Chain(o) => (Experiment::Chain, o),
    };
    let result = opts.into_config(experiment).and_then(|cfg| {
        let table = run(&cfg)?;
        write_table(&table, cfg.out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("urelay: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
