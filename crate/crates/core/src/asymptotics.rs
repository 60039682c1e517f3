//! High-SNR laws: generalized secure degrees of freedom (rate prelog) and
//! generalized secure diversity gain (outage decay exponent), both as
//! functions of `ρ = log INR / log SNR`.
//!
//! The closed forms are piecewise linear in `ρ`. The estimators recover the
//! same numbers from finite-SNR evaluations by fitting slopes on a log-SNR
//! grid with `Ps = SNR·σ²` and `Pd = SNR^ρ·σ²`.

use crate::channel::{ChannelRealization, RateConfig, SystemParams};
use crate::numerics::{log_space, slope_fit};
use crate::outage::{p_conn_af, p_conn_cutset_lower, p_conn_mf, p_secrecy};
use crate::rates::{af_rates, mf_rates, secrecy_upper_bound};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Upper bound valid for any relaying strategy.
    Upper,
    Mf,
    Af,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Upper, Scheme::Mf, Scheme::Af];
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain("rho", rho, "finite and >= 0"))
    }
}

/// Generalized secure degrees of freedom.
pub fn gsdof_closed_form(scheme: Scheme, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(match scheme {
        Scheme::Upper | Scheme::Mf => {
            if rho < 1.0 {
                rho / 2.0
            } else {
                0.5
            }
        }
        Scheme::Af => {
            if rho < 1.0 {
                rho / 2.0
            } else if rho < 2.0 {
                1.0 - rho / 2.0
            } else {
                0.0
            }
        }
    })
}

/// Generalized secure diversity gain.
pub fn gsdg_closed_form(scheme: Scheme, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(match scheme {
        Scheme::Upper | Scheme::Mf => {
            if rho <= 1.0 {
                0.0
            } else if rho <= 2.0 {
                rho - 1.0
            } else {
                1.0
            }
        }
        Scheme::Af => {
            if rho <= 1.0 {
                0.0
            } else if rho <= 1.5 {
                rho - 1.0
            } else if rho <= 2.0 {
                2.0 - rho
            } else {
                0.0
            }
        }
    })
}

/// Ten log-spaced SNRs from `1e6` to `1e12`. The `ρ − 1` and `2 − ρ`
/// slopes emerge slowly; lower grids miss the 0.05 tolerance.
pub fn default_snr_grid() -> Vec<f64> {
    log_space(1e6, 1e12, 10)
}

fn check_grid(snr_grid: &[f64]) -> Result<()> {
    if snr_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "SNR grid needs at least 2 points".into(),
        ));
    }
    if let Some(&bad) = snr_grid.iter().find(|&&s| !(s.is_finite() && s > 1.0)) {
        return Err(Error::domain("snr", bad, "finite and > 1"));
    }
    Ok(())
}

fn grid_params(snr: f64, rho: f64, eps1: f64, eps2: f64) -> Result<SystemParams> {
    SystemParams::new(snr, snr.powf(rho), 1.0, eps1, eps2)
}

/// Slope of the secrecy rate in bits against `log₂ SNR` for one fixed
/// channel realization.
pub fn estimate_gsdof(
    scheme: Scheme,
    rho: f64,
    snr_grid: &[f64],
    real: &ChannelRealization,
) -> Result<f64> {
    check_rho(rho)?;
    check_grid(snr_grid)?;
    let points = snr_grid
        .iter()
        .map(|&snr| {
            let p = grid_params(snr, rho, 1.0, 1.0)?;
            let rate = match scheme {
                Scheme::Upper => secrecy_upper_bound(&p, real),
                Scheme::Mf => mf_rates(&p, real).rs,
                Scheme::Af => af_rates(&p, real).rs_af,
            };
            Ok((snr.log2(), rate))
        })
        .collect::<Result<Vec<_>>>()?;
    slope_fit(&points)
}

/// Rate targets and fading means used for diversity estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversitySetup {
    pub rates: RateConfig,
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for DiversitySetup {
    fn default() -> Self {
        DiversitySetup {
            rates: RateConfig { rd: 1.0, rs: 0.5 },
            eps1: 1.0,
            eps2: 1.0,
        }
    }
}

/// Total outage proxy `max(p_conn, p_secrecy)` at one operating point.
pub fn total_outage_proxy(scheme: Scheme, params: &SystemParams, rates: &RateConfig) -> f64 {
    let conn = match scheme {
        Scheme::Upper => p_conn_cutset_lower(params, rates),
        Scheme::Mf => p_conn_mf(params, rates),
        Scheme::Af => p_conn_af(params, rates),
    };
    conn.max(p_secrecy(params, rates))
}

/// Negative slope of `log max(p_conn, p_secrecy)` against `log SNR`.
pub fn estimate_gsdg(
    scheme: Scheme,
    rho: f64,
    snr_grid: &[f64],
    setup: &DiversitySetup,
) -> Result<f64> {
    check_rho(rho)?;
    check_grid(snr_grid)?;
    let points = snr_grid
        .iter()
        .map(|&snr| {
            let p = grid_params(snr, rho, setup.eps1, setup.eps2)?;
            let pt = total_outage_proxy(scheme, &p, &setup.rates);
            if !(pt > 0.0) {
                return Err(Error::domain("p_total", pt, "> 0 for a log fit"));
            }
            Ok((snr.ln(), pt.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(-slope_fit(&points)?)
}
