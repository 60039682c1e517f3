//! Symbol-level simulation of the modulo-and-forward chain over the scalar
//! coarse lattice `Δ·ℤ`, with `Δ = √(12·Ps)` so that a uniform point of the
//! cell `[−Δ/2, Δ/2)` has power `Ps`.
//!
//! Per symbol, with the codeword fixed at zero:
//!
//! ```text
//! source       x_s = (a + u) mod Δ
//! relay in     y_r = h1·x_s + h2·x_d + n_r
//! relay out    x_r = (β·y_r/h1 + u1) mod Δ
//! dest in      y_d = h2·x_r + n_d
//! dest         y   = α·y_d/h2 − β·(h2/h1)·x_d − u − u1
//! ```
//!
//! `y ≡ a + e (mod Δ)` with the effective noise
//! `e = (α−1)·x_r + (β−1)·x_s + β·n_r/h1 + α·n_d/h2`. The simulation tracks
//! the lattice points removed by both modulo steps, so it measures `e`
//! itself (the *lifted* residual) as well as the folded `y mod Δ` a decoder
//! would see. Folding clips the tails of `e`, so the folded variance sits a
//! few percent below the lifted one at moderate SNR.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelRealization, SystemParams};
use crate::numerics::chi_square_uniform_pvalue;
use crate::rates::sigma_e_sq;
use crate::rng::par_chunks;
use crate::{Error, Result};

/// Bins of the relay-output uniformity test.
pub const UNIFORMITY_BINS: usize = 64;

/// `x mod Δ` into the half-open cell `[−Δ/2, Δ/2)`.
pub fn mod_lattice(x: f64, delta: f64) -> f64 {
    mod_lattice_index(x, delta).0
}

/// Like [`mod_lattice`] but also returns the integer `k` with
/// `x = r + k·Δ`.
pub fn mod_lattice_index(x: f64, delta: f64) -> (f64, f64) {
    let mut k = (x / delta + 0.5).floor();
    let mut r = x - k * delta;
    // Rounding in x/Δ can leave r a hair outside the cell.
    if r >= 0.5 * delta {
        r -= delta;
        k += 1.0;
    } else if r < -0.5 * delta {
        r += delta;
        k -= 1.0;
    }
    (r, k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    pub ps: f64,
    /// Cell width, `√(12·Ps)`.
    pub delta: f64,
    pub n_symbols: usize,
    pub seed: u64,
}

impl LatticeConfig {
    pub fn new(ps: f64, n_symbols: usize, seed: u64) -> Result<Self> {
        if !(ps.is_finite() && ps > 0.0) {
            return Err(Error::domain("ps", ps, "finite and > 0"));
        }
        if n_symbols == 0 {
            return Err(Error::InvalidArgument("n_symbols must be >= 1".into()));
        }
        Ok(LatticeConfig {
            ps,
            delta: (12.0 * ps).sqrt(),
            n_symbols,
            seed,
        })
    }

    pub fn for_params(params: &SystemParams, n_symbols: usize, seed: u64) -> Result<Self> {
        Self::new(params.ps, n_symbols, seed)
    }
}

/// Measured chain statistics next to their analytic counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    /// Mean of `x_r²`.
    pub measured_relay_power: f64,
    /// Sample variance of the lifted effective noise `e`.
    pub measured_residual_var: f64,
    /// Sample variance of `y mod Δ`.
    pub measured_folded_var: f64,
    pub analytic_sigma_e2: f64,
    /// `(1−α)²Ps + (1−β)²Ps + α²σ²/g2 + β²σ²/g1` for the `α`, `β` used.
    pub variance_bound: f64,
    /// Chi-square p-value of `x_r` against the uniform law on the cell.
    pub uniformity_pvalue: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// MMSE scaling `(α, β) = (Ps/(Ps + σ²/g2), Ps/(Ps + σ²/g1))`.
pub fn mmse_scaling(params: &SystemParams, real: &ChannelRealization) -> (f64, f64) {
    let (ps, s2) = (params.ps, params.sigma2);
    (ps / (ps + s2 / real.g2), ps / (ps + s2 / real.g1))
}

pub fn residual_variance_bound(
    params: &SystemParams,
    real: &ChannelRealization,
    alpha: f64,
    beta: f64,
) -> f64 {
    let (ps, s2) = (params.ps, params.sigma2);
    (1.0 - alpha).powi(2) * ps
        + (1.0 - beta).powi(2) * ps
        + alpha * alpha * s2 / real.g2
        + beta * beta * s2 / real.g1
}

/// Runs the chain with MMSE scaling.
pub fn simulate_chain(
    params: &SystemParams,
    real: &ChannelRealization,
    cfg: &LatticeConfig,
) -> Result<ChainReport> {
    check_gains(real)?;
    let (alpha, beta) = mmse_scaling(params, real);
    simulate_chain_with_scaling(params, real, cfg, alpha, beta)
}

fn check_gains(real: &ChannelRealization) -> Result<()> {
    for (name, g) in [("g1", real.g1), ("g2", real.g2)] {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::domain(
                name,
                g,
                "> 0 (the chain divides by h1 and h2)",
            ));
        }
    }
    Ok(())
}

#[derive(Clone)]
struct Moments {
    relay_sq: f64,
    res: f64,
    res_sq: f64,
    fold: f64,
    fold_sq: f64,
    bins: [u64; UNIFORMITY_BINS],
}

impl Moments {
    fn zero() -> Self {
        Moments {
            relay_sq: 0.0,
            res: 0.0,
            res_sq: 0.0,
            fold: 0.0,
            fold_sq: 0.0,
            bins: [0; UNIFORMITY_BINS],
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        self.relay_sq += other.relay_sq;
        self.res += other.res;
        self.res_sq += other.res_sq;
        self.fold += other.fold;
        self.fold_sq += other.fold_sq;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self
    }
}

fn variance(sum: f64, sum_sq: f64, n: f64) -> f64 {
    let mean = sum / n;
    (sum_sq / n - mean * mean).max(0.0)
}

/// Runs the chain with caller-chosen scaling factors.
pub fn simulate_chain_with_scaling(
    params: &SystemParams,
    real: &ChannelRealization,
    cfg: &LatticeConfig,
    alpha: f64,
    beta: f64,
) -> Result<ChainReport> {
    check_gains(real)?;
    if (cfg.ps - params.ps).abs() > 1e-12 * params.ps {
        return Err(Error::InvalidArgument(format!(
            "lattice power {} differs from source power {}",
            cfg.ps, params.ps
        )));
    }
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(name, v, "finite and > 0"));
        }
    }

    let delta = cfg.delta;
    let half = 0.5 * delta;
    let (h1, h2) = (real.h1, real.h2);
    let sd_jam = params.pd.sqrt();
    let sd_noise = params.sigma2.sqrt();
    let codeword = 0.0;

    let chunks = par_chunks(cfg.n_symbols, cfg.seed, |len, rng| {
        let mut m = Moments::zero();
        for _ in 0..len {
            let u = rng.random::<f64>() * delta - half;
            let u1 = rng.random::<f64>() * delta - half;
            let x_d = sd_jam * rng.sample::<f64, _>(StandardNormal);
            let n_r = sd_noise * rng.sample::<f64, _>(StandardNormal);
            let n_d = sd_noise * rng.sample::<f64, _>(StandardNormal);

            let (x_s, k_s) = mod_lattice_index(codeword + u, delta);
            let y_r = h1 * x_s + h2 * x_d + n_r;
            let (x_r, k_r) = mod_lattice_index(beta * y_r / h1 + u1, delta);
            let y_d = h2 * x_r + n_d;
            let y = alpha * y_d / h2 - beta * (h2 / h1) * x_d - u - u1;

            let lifted = y - codeword + (k_s + k_r) * delta;
            let folded = mod_lattice(y - codeword, delta);

            m.relay_sq += x_r * x_r;
            m.res += lifted;
            m.res_sq += lifted * lifted;
            m.fold += folded;
            m.fold_sq += folded * folded;
            let bin = ((x_r + half) / delta * UNIFORMITY_BINS as f64) as usize;
            m.bins[bin.min(UNIFORMITY_BINS - 1)] += 1;
        }
        m
    });
    let m = chunks.iter().fold(Moments::zero(), Moments::merge);
    let n = cfg.n_symbols as f64;

    Ok(ChainReport {
        measured_relay_power: m.relay_sq / n,
        measured_residual_var: variance(m.res, m.res_sq, n),
        measured_folded_var: variance(m.fold, m.fold_sq, n),
        analytic_sigma_e2: sigma_e_sq(params, real),
        variance_bound: residual_variance_bound(params, real, alpha, beta),
        uniformity_pvalue: chi_square_uniform_pvalue(&m.bins)?,
        alpha,
        beta,
    })
}

/// Measured residual variance over a grid of scaling factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingScan {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `residual_var[i][j]` is measured at `(alphas[i], betas[j])`.
    pub residual_var: Vec<Vec<f64>>,
}

impl ScalingScan {
    /// Grid point with the smallest measured variance.
    pub fn argmin(&self) -> (f64, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for (i, row) in self.residual_var.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < best.2 {
                    best = (i, j, v);
                }
            }
        }
        (self.alphas[best.0], self.betas[best.1])
    }
}

/// Sweeps `(α, β)` with common random numbers: every grid point replays the
/// same symbol stream, so differences between points are not sampling noise.
pub fn scan_scaling(
    params: &SystemParams,
    real: &ChannelRealization,
    cfg: &LatticeConfig,
    alpha_grid: &[f64],
    beta_grid: &[f64],
) -> Result<ScalingScan> {
    for (name, grid) in [("alpha", alpha_grid), ("beta", beta_grid)] {
        if grid.is_empty() {
            return Err(Error::InvalidArgument(format!("{name} grid is empty")));
        }
        if let Some(&v) = grid.iter().find(|&&v| !(v > 0.0 && v <= 1.5)) {
            return Err(Error::domain(name, v, "in (0, 1.5]"));
        }
    }
    let residual_var = alpha_grid
        .iter()
        .map(|&a| {
            beta_grid
                .iter()
                .map(|&b| {
                    simulate_chain_with_scaling(params, real, cfg, a, b)
                        .map(|r| r.measured_residual_var)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingScan {
        alphas: alpha_grid.to_vec(),
        betas: beta_grid.to_vec(),
        residual_var,
    })
}
