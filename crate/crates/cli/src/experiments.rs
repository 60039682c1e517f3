//! The experiment tables. Each runner resolves its defaults, evaluates rows
//! in parallel and returns them in axis order.

use rayon::prelude::*;

use untrusted_relay::asymptotics::{
    default_snr_grid, estimate_gsdg, estimate_gsdof, gsdg_closed_form, gsdof_closed_form,
    DiversitySetup, Scheme,
};
use untrusted_relay::channel::{ChannelRealization, RateConfig, SystemParams};
use untrusted_relay::latticesim::{simulate_chain, LatticeConfig};
use untrusted_relay::outage::{
    mc_outage, p_conn_af, p_conn_cutset_lower, p_conn_mf, p_secrecy, ForwardingScheme,
};
use untrusted_relay::rates::{rate_report, secrecy_upper_bound};
use untrusted_relay::rng::derive_seed;

use crate::config::{Experiment, ExperimentConfig, Scale, SweepAxis};
use crate::table::Table;
use crate::RunError;

/// Monte Carlo draws per row for `fig4` and `sweep` when unset.
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;
/// Symbols per row for `chain` when unset.
pub const DEFAULT_CHAIN_SYMBOLS: u64 = 1_000_000;

/// Runs whatever `cfg.experiment` names.
pub fn run(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let experiment = cfg
        .experiment
        .ok_or_else(|| RunError::Config("no experiment selected".into()))?;
    let mut table = match experiment {
        Experiment::Fig2 => run_fig2(cfg),
        Experiment::Fig3 => run_fig3(cfg),
        Experiment::Fig4 => run_fig4(cfg),
        Experiment::Fig5 => run_fig5(cfg),
        Experiment::Sweep => run_sweep(cfg),
        Experiment::Chain => run_chain(cfg),
    }?;
    if let Some((row, col, v)) = table.first_non_finite() {
        return Err(RunError::Config(format!(
            "row {row}, column {col} evaluated to {v}; parameters are out of range"
        )));
    }
    table.meta = vec![
        ("experiment".into(), experiment.to_string()),
        ("config".into(), cfg.echo()),
        ("seed".into(), cfg.seed_or_default().to_string()),
        ("version".into(), crate::version()),
    ];
    Ok(table)
}

fn axis_values(cfg: &ExperimentConfig, default: SweepAxis) -> Result<Vec<f64>, RunError> {
    match &cfg.sweep {
        Some(axis) if axis.name != default.name => Err(RunError::Config(format!(
            "{} sweeps `{}`, not `{}`",
            cfg.experiment
                .map(|e| e.name())
                .unwrap_or("this experiment"),
            default.name,
            axis.name
        ))),
        Some(axis) => axis.values(),
        None => default.values(),
    }
}

fn realization(cfg: &ExperimentConfig) -> Result<ChannelRealization, RunError> {
    Ok(ChannelRealization::from_gains(
        cfg.g1.unwrap_or(1.0),
        cfg.g2.unwrap_or(1.0),
    )?)
}

fn collect_rows<F>(xs: &[f64], row: F) -> Result<Vec<Vec<f64>>, RunError>
where
    F: Fn(usize, f64) -> Result<Vec<f64>, RunError> + Sync,
{
    xs.par_iter().enumerate().map(|(i, &x)| row(i, x)).collect()
}

/// Secrecy rates against jamming power with `Ps/σ² = (Pd/σ²)^{1/ρ}`
/// (`ρ = 2`, i.e. `Ps = √Pd`, unless overridden).
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let pds = axis_values(cfg, SweepAxis::new("pd", 1.0, 1e8, 81, Scale::Log))?;
    let sigma2 = cfg.sigma2.unwrap_or(1.0);
    let rho = cfg.rho.unwrap_or(2.0);
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(RunError::Config(format!("fig2 needs rho > 0, got {rho}")));
    }
    let real = realization(cfg)?;
    let eps1 = cfg.eps1.unwrap_or(1.0);
    let eps2 = cfg.eps2.unwrap_or(1.0);
    let mut table = Table::new(&["pd", "ps", "rs_mf", "rs_af", "upper_bound", "gap"]);
    table.rows = collect_rows(&pds, |_, pd| {
        if !(pd > 0.0) {
            return Err(RunError::Config(format!("fig2 needs pd > 0, got {pd}")));
        }
        let ps = sigma2 * (pd / sigma2).powf(1.0 / rho);
        let p = SystemParams::new(ps, pd, sigma2, eps1, eps2)?;
        let r = rate_report(&p, &real);
        Ok(vec![pd, ps, r.rs_mf, r.rs_af, r.upper_bound_u, r.gap])
    })?;
    Ok(table)
}

fn rho_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, RunError> {
    let rhos = match cfg.rho {
        Some(rho) => vec![rho],
        None => axis_values(cfg, SweepAxis::new("rho", 0.0, 3.0, 61, Scale::Linear))?,
    };
    if let Some(bad) = rhos.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(RunError::Config(format!("rho must be >= 0, got {bad}")));
    }
    Ok(rhos)
}

/// Secure degrees of freedom against `ρ`: closed forms and slope fits.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rhos = rho_grid(cfg)?;
    let real = realization(cfg)?;
    let grid = default_snr_grid();
    let mut table = Table::new(&[
        "rho",
        "sd_upper",
        "sd_mf",
        "sd_af",
        "sd_mf_numeric",
        "sd_af_numeric",
    ]);
    table.rows = collect_rows(&rhos, |_, rho| {
        Ok(vec![
            rho,
            gsdof_closed_form(Scheme::Upper, rho)?,
            gsdof_closed_form(Scheme::Mf, rho)?,
            gsdof_closed_form(Scheme::Af, rho)?,
            estimate_gsdof(Scheme::Mf, rho, &grid, &real)?,
            estimate_gsdof(Scheme::Af, rho, &grid, &real)?,
        ])
    })?;
    Ok(table)
}

/// Outage against `Rd` at fixed powers, analytic and sampled.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rs = cfg.rs.unwrap_or(0.5);
    let rds = match cfg.rd {
        Some(rd) => vec![rd],
        None => axis_values(cfg, SweepAxis::new("rd", 0.5, 15.0, 59, Scale::Linear))?,
    };
    if let Some(bad) = rds.iter().find(|&&rd| rd < rs) {
        return Err(RunError::Config(format!("rd = {bad} is below rs = {rs}")));
    }
    let p = SystemParams::new(
        cfg.ps.unwrap_or(10.0),
        cfg.pd.unwrap_or(10.0),
        cfg.sigma2.unwrap_or(1.0),
        cfg.eps1.unwrap_or(1.0),
        cfg.eps2.unwrap_or(1.0),
    )?;
    let n = cfg.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
    let seed = cfg.seed_or_default();

    let mut cols = vec!["rd", "p_conn_mf", "p_conn_af", "p_secrecy", "p_conn_cutset"];
    if n > 0 {
        cols.extend([
            "p_conn_mf_mc",
            "p_conn_af_mc",
            "p_secrecy_mc",
            "p_conn_mf_se",
            "p_conn_af_se",
            "p_secrecy_se",
        ]);
    }
    let mut table = Table::new(&cols);
    table.rows = collect_rows(&rds, |i, rd| {
        let rates = RateConfig::new(rd, rs)?;
        let mut row = vec![
            rd,
            p_conn_mf(&p, &rates),
            p_conn_af(&p, &rates),
            p_secrecy(&p, &rates),
            p_conn_cutset_lower(&p, &rates),
        ];
        if n > 0 {
            let i = i as u64;
            let mf = mc_outage(
                &p,
                &rates,
                ForwardingScheme::Mf,
                n,
                derive_seed(seed, 2 * i),
            )?;
            let af = mc_outage(
                &p,
                &rates,
                ForwardingScheme::Af,
                n,
                derive_seed(seed, 2 * i + 1),
            )?;
            row.extend([
                mf.conn.p_hat,
                af.conn.p_hat,
                mf.secrecy.p_hat,
                mf.conn.std_err,
                af.conn.std_err,
                mf.secrecy.std_err,
            ]);
        }
        Ok(row)
    })?;
    Ok(table)
}

/// Secure diversity gain against `ρ`: closed forms and decay-exponent fits.
pub fn run_fig5(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let rhos = rho_grid(cfg)?;
    let setup = DiversitySetup {
        rates: RateConfig::new(cfg.rd.unwrap_or(1.0), cfg.rs.unwrap_or(0.5))?,
        eps1: cfg.eps1.unwrap_or(1.0),
        eps2: cfg.eps2.unwrap_or(1.0),
    };
    let grid = default_snr_grid();
    let mut table = Table::new(&[
        "rho",
        "dg_upper",
        "dg_mf",
        "dg_af",
        "dg_mf_numeric",
        "dg_af_numeric",
    ]);
    table.rows = collect_rows(&rhos, |_, rho| {
        Ok(vec![
            rho,
            gsdg_closed_form(Scheme::Upper, rho)?,
            gsdg_closed_form(Scheme::Mf, rho)?,
            gsdg_closed_form(Scheme::Af, rho)?,
            estimate_gsdg(Scheme::Mf, rho, &grid, &setup)?,
            estimate_gsdg(Scheme::Af, rho, &grid, &setup)?,
        ])
    })?;
    Ok(table)
}

const SWEEP_AXES: [&str; 10] = [
    "ps", "pd", "sigma2", "eps1", "eps2", "g1", "g2", "rd", "rs", "rho",
];

#[derive(Debug, Clone, Copy)]
struct Point {
    ps: f64,
    pd: f64,
    sigma2: f64,
    eps1: f64,
    eps2: f64,
    g1: f64,
    g2: f64,
    rd: f64,
    rs: f64,
    rho: Option<f64>,
}

impl Point {
    fn set(&mut self, name: &str, v: f64) {
        match name {
            "ps" => self.ps = v,
            "pd" => self.pd = v,
            "sigma2" => self.sigma2 = v,
            "eps1" => self.eps1 = v,
            "eps2" => self.eps2 = v,
            "g1" => self.g1 = v,
            "g2" => self.g2 = v,
            "rd" => self.rd = v,
            "rs" => self.rs = v,
            "rho" => self.rho = Some(v),
            _ => unreachable!("axis names are checked up front"),
        }
    }

    /// With `ρ` set, the jamming power follows `INR = SNR^ρ`.
    fn resolve_pd(&mut self) {
        if let Some(rho) = self.rho {
            self.pd = self.sigma2 * (self.ps / self.sigma2).powf(rho);
        }
    }
}

/// Every rate and outage quantity along one parameter axis.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let axis = cfg
        .sweep
        .clone()
        .unwrap_or_else(|| SweepAxis::new("pd", 1.0, 1e6, 25, Scale::Log));
    if !SWEEP_AXES.contains(&axis.name.as_str()) {
        return Err(RunError::Config(format!(
            "cannot sweep `{}`; choose one of {}",
            axis.name,
            SWEEP_AXES.join(", ")
        )));
    }
    if axis.name == "pd" && cfg.rho.is_some() {
        return Err(RunError::Config(
            "rho fixes pd; it cannot be combined with a pd sweep".into(),
        ));
    }
    let xs = axis.values()?;
    let base = Point {
        ps: cfg.ps.unwrap_or(10.0),
        pd: cfg.pd.unwrap_or(10.0),
        sigma2: cfg.sigma2.unwrap_or(1.0),
        eps1: cfg.eps1.unwrap_or(1.0),
        eps2: cfg.eps2.unwrap_or(1.0),
        g1: cfg.g1.unwrap_or(1.0),
        g2: cfg.g2.unwrap_or(1.0),
        rd: cfg.rd.unwrap_or(1.0),
        rs: cfg.rs.unwrap_or(0.5),
        rho: cfg.rho,
    };
    let n = cfg.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
    let seed = cfg.seed_or_default();

    let mut cols = Vec::new();
    if axis.name == "rho" {
        cols.push("rho");
    }
    cols.extend([
        "ps",
        "pd",
        "sigma2",
        "eps1",
        "eps2",
        "g1",
        "g2",
        "rd",
        "rs",
        "snr",
        "inr",
        "rs_mf",
        "rs_af",
        "upper_bound",
        "gap",
        "p_conn_cutset",
        "p_conn_mf",
        "p_conn_af",
        "p_secrecy",
    ]);
    if n > 0 {
        cols.extend([
            "p_conn_mf_mc",
            "p_conn_mf_se",
            "p_conn_af_mc",
            "p_conn_af_se",
            "p_secrecy_mc",
            "p_secrecy_se",
        ]);
    }
    let mut table = Table::new(&cols);
    let with_rho = axis.name == "rho";
    table.rows = collect_rows(&xs, |i, x| {
        let mut pt = base;
        pt.set(&axis.name, x);
        pt.resolve_pd();
        let p = SystemParams::new(pt.ps, pt.pd, pt.sigma2, pt.eps1, pt.eps2)?;
        let rates = RateConfig::new(pt.rd, pt.rs)?;
        let real = ChannelRealization::from_gains(pt.g1, pt.g2)?;
        let r = rate_report(&p, &real);
        let mut row = Vec::with_capacity(cols.len());
        if with_rho {
            row.push(x);
        }
        row.extend([
            pt.ps,
            pt.pd,
            pt.sigma2,
            pt.eps1,
            pt.eps2,
            pt.g1,
            pt.g2,
            pt.rd,
            pt.rs,
            p.snr(),
            p.inr(),
            r.rs_mf,
            r.rs_af,
            secrecy_upper_bound(&p, &real),
            r.gap,
            p_conn_cutset_lower(&p, &rates),
            p_conn_mf(&p, &rates),
            p_conn_af(&p, &rates),
            p_secrecy(&p, &rates),
        ]);
        if n > 0 {
            let i = i as u64;
            let mf = mc_outage(
                &p,
                &rates,
                ForwardingScheme::Mf,
                n,
                derive_seed(seed, 2 * i),
            )?;
            let af = mc_outage(
                &p,
                &rates,
                ForwardingScheme::Af,
                n,
                derive_seed(seed, 2 * i + 1),
            )?;
            row.extend([
                mf.conn.p_hat,
                mf.conn.std_err,
                af.conn.p_hat,
                af.conn.std_err,
                mf.secrecy.p_hat,
                mf.secrecy.std_err,
            ]);
        }
        Ok(row)
    })?;
    Ok(table)
}

/// Symbol-level MF chain statistics over a grid of gains and jamming
/// powers. Rows that share a gain pair replay the same symbol stream.
pub fn run_chain(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    if cfg.sweep.is_some() {
        return Err(RunError::Config(
            "chain runs a fixed grid and takes no sweep axis".into(),
        ));
    }
    let pairs = match (cfg.g1, cfg.g2) {
        (None, None) => vec![(3.0, 3.0), (1.0, 10.0), (10.0, 1.0)],
        (g1, g2) => vec![(g1.unwrap_or(1.0), g2.unwrap_or(1.0))],
    };
    let pds = match cfg.pd {
        Some(pd) => vec![pd],
        None => vec![0.0, 10.0, 1e6],
    };
    let ps = cfg.ps.unwrap_or(1.0);
    let sigma2 = cfg.sigma2.unwrap_or(1.0);
    let n = cfg.mc_samples.unwrap_or(DEFAULT_CHAIN_SYMBOLS);
    if n == 0 {
        return Err(RunError::Config(
            "chain needs mc_samples >= 1 symbols".into(),
        ));
    }
    let n = usize::try_from(n).map_err(|_| RunError::Config(format!("{n} symbols is too many")))?;
    let seed = cfg.seed_or_default();

    let grid: Vec<(usize, f64, f64, f64)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(k, &(g1, g2))| pds.iter().map(move |&pd| (k, g1, g2, pd)))
        .collect();
    let mut table = Table::new(&[
        "g1",
        "g2",
        "ps",
        "pd",
        "alpha",
        "beta",
        "analytic_sigma_e2",
        "residual_var",
        "folded_var",
        "variance_bound",
        "relay_power",
        "uniformity_pvalue",
    ]);
    table.rows = grid
        .par_iter()
        .map(|&(k, g1, g2, pd)| {
            let p = SystemParams::new(ps, pd, sigma2, 1.0, 1.0)?;
            let real = ChannelRealization::from_gains(g1, g2)?;
            let lattice = LatticeConfig::for_params(&p, n, derive_seed(seed, k as u64))?;
            let c = simulate_chain(&p, &real, &lattice)?;
            Ok(vec![
                g1,
                g2,
                ps,
                pd,
                c.alpha,
                c.beta,
                c.analytic_sigma_e2,
                c.measured_residual_var,
                c.measured_folded_var,
                c.variance_bound,
                c.measured_relay_power,
                c.uniformity_pvalue,
            ])
        })
        .collect::<Result<_, RunError>>()?;
    Ok(table)
}
