//! System parameters, rate targets and Rayleigh block-fading draws.
//!
//! The model is real-valued per dimension: each hop has a signed amplitude
//! `h = ±√g` with gain `g` exponentially distributed around its mean `ε`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::{Error, Result};

/// Transmit powers, noise variance and mean hop gains, all linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Source power; the relay is held to the same average power.
    pub ps: f64,
    /// Destination jamming power during the first hop.
    pub pd: f64,
    /// Noise variance at relay and destination.
    pub sigma2: f64,
    /// Mean gain of the source-relay hop.
    pub eps1: f64,
    /// Mean gain of the relay-destination hop.
    pub eps2: f64,
}

impl SystemParams {
    pub fn new(ps: f64, pd: f64, sigma2: f64, eps1: f64, eps2: f64) -> Result<Self> {
        let params = SystemParams {
            ps,
            pd,
            sigma2,
            eps1,
            eps2,
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit noise and unit mean gains.
    pub fn with_powers(ps: f64, pd: f64) -> Result<Self> {
        Self::new(ps, pd, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ps", self.ps),
            ("sigma2", self.sigma2),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, v, "finite and > 0"));
            }
        }
        if !(self.pd.is_finite() && self.pd >= 0.0) {
            return Err(Error::domain("pd", self.pd, "finite and >= 0"));
        }
        Ok(())
    }

    pub fn snr(&self) -> f64 {
        self.ps / self.sigma2
    }

    pub fn inr(&self) -> f64 {
        self.pd / self.sigma2
    }
}

/// SNR, INR and the power exponent `ρ = log INR / log SNR`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRatios {
    pub snr: f64,
    pub inr: f64,
    /// `-∞` when `Pd = 0`.
    pub rho: f64,
}

/// `ρ` is only defined above 0 dB SNR.
pub fn derived_ratios(params: &SystemParams) -> Result<DerivedRatios> {
    let snr = params.snr();
    let inr = params.inr();
    if !(snr > 1.0) {
        return Err(Error::domain("snr", snr, "> 1 for rho to be defined"));
    }
    Ok(DerivedRatios {
        snr,
        inr,
        rho: inr.ln() / snr.ln(),
    })
}

/// Instantaneous channel state of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub g1: f64,
    pub g2: f64,
    pub h1: f64,
    pub h2: f64,
}

impl ChannelRealization {
    /// Gains with positive amplitudes.
    pub fn from_gains(g1: f64, g2: f64) -> Result<Self> {
        for (name, g) in [("g1", g1), ("g2", g2)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::domain(name, g, "finite and >= 0"));
            }
        }
        Ok(ChannelRealization {
            g1,
            g2,
            h1: g1.sqrt(),
            h2: g2.sqrt(),
        })
    }

    pub fn from_amplitudes(h1: f64, h2: f64) -> Result<Self> {
        for (name, h) in [("h1", h1), ("h2", h2)] {
            if !h.is_finite() {
                return Err(Error::domain(name, h, "finite"));
            }
        }
        Ok(ChannelRealization {
            g1: h1 * h1,
            g2: h2 * h2,
            h1,
            h2,
        })
    }
}

/// Total rate `Rd` and confidential rate `Rs`, in bits per real dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConfig {
    pub rd: f64,
    pub rs: f64,
}

impl RateConfig {
    pub fn new(rd: f64, rs: f64) -> Result<Self> {
        if !(rs.is_finite() && rs >= 0.0) {
            return Err(Error::domain("rs", rs, "finite and >= 0"));
        }
        if !(rd.is_finite() && rd >= rs) {
            return Err(Error::domain("rd", rd, "finite and >= rs"));
        }
        Ok(RateConfig { rd, rs })
    }
}

/// SNR thresholds attached to a rate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// `2^{2Rd} − 1`: connection outage threshold of the cut-set and AF links.
    pub gamma_o: f64,
    /// `2^{2Rd} − 1/2`: connection outage threshold of the MF link.
    pub gamma_1: f64,
    /// `2^{2(Rd−Rs)} − 1`: secrecy outage threshold at the relay.
    pub gamma_s: f64,
}

pub fn thresholds(config: &RateConfig) -> Thresholds {
    let p = (2.0 * config.rd).exp2();
    Thresholds {
        gamma_o: p - 1.0,
        gamma_1: p - 0.5,
        gamma_s: (2.0 * (config.rd - config.rs)).exp2() - 1.0,
    }
}

/// Draws one block: `g_i ~ Exp(mean ε_i)` and independent fair signs.
pub fn sample_realization<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> ChannelRealization {
    let e1: f64 = Exp1.sample(rng);
    let e2: f64 = Exp1.sample(rng);
    let g1 = params.eps1 * e1;
    let g2 = params.eps2 * e2;
    let s1 = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let s2 = if rng.random::<bool>() { 1.0 } else { -1.0 };
    ChannelRealization {
        g1,
        g2,
        h1: s1 * g1.sqrt(),
        h2: s2 * g2.sqrt(),
    }
}
