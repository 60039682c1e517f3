//! Per-realization rates with full channel knowledge at the transmitters.
//!
//! Everything is in bits per real dimension. Where a rate is a positive part
//! `[x]⁺` the clipped value is returned; [`mf_gap`] is the place to look for
//! the distance to the upper bound.

use crate::channel::{ChannelRealization, SystemParams};
use crate::{Error, Result};

fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

fn positive(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// `g1·g2/(g1+g2)`, zero when both gains vanish.
fn parallel_gain(g1: f64, g2: f64) -> f64 {
    let sum = g1 + g2;
    if sum > 0.0 {
        g1 * g2 / sum
    } else {
        0.0
    }
}

/// Equivalent noise variance after the destination's modulo step,
/// `min{Ps, Psσ²/(g1Ps+σ²) + Psσ²/(g2Ps+σ²)}`.
pub fn sigma_e_sq(params: &SystemParams, real: &ChannelRealization) -> f64 {
    let (ps, s2) = (params.ps, params.sigma2);
    let folded = ps * s2 / (real.g1 * ps + s2) + ps * s2 / (real.g2 * ps + s2);
    folded.min(ps)
}

/// What the untrusted relay can learn while jammed,
/// `½log₂(1 + g1Ps/(g2Pd + σ²))`.
pub fn relay_capacity(params: &SystemParams, real: &ChannelRealization) -> f64 {
    half_log2(1.0 + real.g1 * params.ps / (real.g2 * params.pd + params.sigma2))
}

/// Cut-set bound on the end-to-end rate, `½log₂(1 + min{g1,g2}·Ps/σ²)`.
pub fn cutset_capacity(params: &SystemParams, real: &ChannelRealization) -> f64 {
    half_log2(1.0 + real.g1.min(real.g2) * params.snr())
}

/// Secrecy rate upper bound for any relaying strategy:
/// `[cut-set − relay capacity]⁺`.
pub fn secrecy_upper_bound(params: &SystemParams, real: &ChannelRealization) -> f64 {
    positive(cutset_capacity(params, real) - relay_capacity(params, real))
}

/// Rates achieved by modulo-and-forward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfRates {
    /// `½log₂(Ps/σ_e²)`, 0 when the modulo clamp is active.
    pub rd_exact: f64,
    /// `[½log₂(½ + SNR·g1g2/(g1+g2))]⁺`, the bound the secrecy rate uses.
    pub rd_lower: f64,
    /// Relay leakage rate, equal to [`relay_capacity`].
    pub rr: f64,
    /// Achievable secrecy rate `[rd_lower − rr]⁺`.
    pub rs: f64,
}

pub fn mf_rates(params: &SystemParams, real: &ChannelRealization) -> MfRates {
    let se2 = sigma_e_sq(params, real);
    let rd_exact = if se2 < params.ps {
        positive(half_log2(params.ps / se2))
    } else {
        0.0
    };
    let rd_lower = positive(half_log2(
        0.5 + params.snr() * parallel_gain(real.g1, real.g2),
    ));
    let rr = relay_capacity(params, real);
    MfRates {
        rd_exact,
        rd_lower,
        rr,
        rs: positive(rd_lower - rr),
    }
}

/// Amplify-and-forward end-to-end SNR and secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfRates {
    pub snr_af: f64,
    pub rs_af: f64,
}

pub fn af_snr(params: &SystemParams, real: &ChannelRealization) -> f64 {
    let SystemParams { ps, pd, sigma2, .. } = *params;
    let (g1, g2) = (real.g1, real.g2);
    ps * ps * g1 * g2 / (sigma2 * (ps * g1 + ps * g2 + pd * g2 + sigma2))
}

pub fn af_rates(params: &SystemParams, real: &ChannelRealization) -> AfRates {
    let snr_af = af_snr(params, real);
    AfRates {
        snr_af,
        rs_af: positive(half_log2(1.0 + snr_af) - relay_capacity(params, real)),
    }
}

/// MF against lattice decode-and-forward in the symmetric setting
/// `h1 = h2`, `Ps = Pd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfComparison {
    /// `[½log₂(½ + t) − 1]⁺`.
    pub r_df: f64,
    /// MF rate minus DF rate.
    pub gap: f64,
}

/// `t = Ps·g1/σ²` is the receiver-side SNR.
///
/// The MF rate in this comparison is `[½log₂((1+t)/2)]⁺`, so the gap is
/// `0` up to `t = 1`, `½log₂(1+t) − ½` while the DF rate is still clipped
/// (`t ≤ 7/2`) and `½log₂(2 + 2/(1+2t))` beyond, tending to half a bit.
pub fn df_comparison(t: f64) -> Result<DfComparison> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::domain("t", t, "finite and >= 0"));
    }
    let r_df = positive(half_log2(0.5 + t) - 1.0);
    let gap = if t <= 1.0 {
        0.0
    } else if t <= 3.5 {
        half_log2(1.0 + t) - 0.5
    } else {
        half_log2(2.0 + 2.0 / (1.0 + 2.0 * t))
    };
    Ok(DfComparison { r_df, gap })
}

/// Distance from the MF secrecy rate to the upper bound, `U − Rs`.
///
/// At most half a bit: when both are positive this is the half-bit
/// guarantee, and when `Rs` clips to zero the result is `U` itself, which is
/// below half a bit in that case.
pub fn mf_gap(params: &SystemParams, real: &ChannelRealization) -> f64 {
    secrecy_upper_bound(params, real) - mf_rates(params, real).rs
}

/// Every rate quantity for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub cd_upper: f64,
    pub cr: f64,
    pub upper_bound_u: f64,
    pub sigma_e2: f64,
    pub rd_mf_exact: f64,
    pub rd_mf_lower: f64,
    pub rr: f64,
    pub rs_mf: f64,
    pub snr_af: f64,
    pub rs_af: f64,
    pub gap: f64,
}

pub fn rate_report(params: &SystemParams, real: &ChannelRealization) -> RateReport {
    let mf = mf_rates(params, real);
    let af = af_rates(params, real);
    let u = secrecy_upper_bound(params, real);
    RateReport {
        cd_upper: cutset_capacity(params, real),
        cr: mf.rr,
        upper_bound_u: u,
        sigma_e2: sigma_e_sq(params, real),
        rd_mf_exact: mf.rd_exact,
        rd_mf_lower: mf.rd_lower,
        rr: mf.rr,
        rs_mf: mf.rs,
        snr_af: af.snr_af,
        rs_af: af.rs_af,
        gap: u - mf.rs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(ps: f64, pd: f64, sigma2: f64) -> SystemParams {
        SystemParams::new(ps, pd, sigma2, 1.0, 1.0).unwrap()
    }

    fn gains(g1: f64, g2: f64) -> ChannelRealization {
        ChannelRealization::from_gains(g1, g2).unwrap()
    }

    #[test]
    fn sigma_e_sq_cases() {
        let p = params(1.0, 0.0, 1.0);
        assert_relative_eq!(sigma_e_sq(&p, &gains(3.0, 3.0)), 0.5, epsilon = 1e-15);
        assert_eq!(sigma_e_sq(&p, &gains(0.0, 0.0)), 1.0);
        assert!(sigma_e_sq(&p, &gains(1e12, 1e12)) < 1e-11);
    }

    #[test]
    fn relay_capacity_cases() {
        assert_eq!(
            relay_capacity(&params(10.0, 10.0, 1.0), &gains(0.0, 1.0)),
            0.0
        );
        assert!(relay_capacity(&params(10.0, 1e300, 1.0), &gains(1.0, 1.0)) < 1e-290);
        // ½·log₂(21/11)
        assert_relative_eq!(
            relay_capacity(&params(10.0, 10.0, 1.0), &gains(1.0, 1.0)),
            0.466_442_902_070_731_5,
            epsilon = 1e-13
        );
    }

    #[test]
    fn upper_bound_cases() {
        for (g1, g2) in [(0.3, 0.3), (0.5, 2.0), (1.0, 7.0)] {
            assert_eq!(
                secrecy_upper_bound(&params(5.0, 0.0, 1.0), &gains(g1, g2)),
                0.0
            );
        }
        assert_relative_eq!(
            secrecy_upper_bound(&params(1.0, 1e300, 1.0), &gains(1.0, 1.0)),
            0.5,
            epsilon = 1e-12
        );
        // ½log₂(11) − ½log₂(51/41)
        assert_relative_eq!(
            secrecy_upper_bound(&params(10.0, 10.0, 1.0), &gains(1.0, 4.0)),
            1.572_279_140_641_942_7,
            epsilon = 1e-13
        );
    }

    #[test]
    fn mf_approaches_bound_under_heavy_jamming() {
        let r = mf_rates(&params(3.0, 1e300, 1.0), &gains(1.0, 1.0));
        assert_relative_eq!(r.rs, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn mf_broken_first_hop() {
        let r = mf_rates(&params(10.0, 10.0, 1.0), &gains(0.0, 2.0));
        assert_eq!(r.rd_lower, 0.0);
        assert_eq!(r.rs, 0.0);
        let r = mf_rates(&params(10.0, 10.0, 1.0), &gains(0.0, 0.0));
        assert_eq!((r.rd_exact, r.rd_lower, r.rr, r.rs), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn af_cases() {
        let r = af_rates(&params(10.0, 10.0, 1.0), &gains(1.0, 1.0));
        assert_relative_eq!(r.snr_af, 100.0 / 31.0, epsilon = 1e-14);
        assert_relative_eq!(r.rs_af, 0.573_170_443_504_555_9, epsilon = 1e-13);
        let r = af_rates(&params(10.0, 10.0, 1.0), &gains(0.0, 1.0));
        assert_eq!((r.snr_af, r.rs_af), (0.0, 0.0));
    }

    #[test]
    fn af_saturates_where_mf_keeps_growing() {
        // σ² → 0 and Pd → ∞ with Pd·σ² fixed at 1.
        let g = gains(1.0, 2.0);
        let mut last_af = f64::NAN;
        let mut last_mf = 0.0;
        for k in 1..=8 {
            let s2 = 10f64.powi(-k);
            let p = params(1.0, 1.0 / s2, s2);
            let af = af_rates(&p, &g).rs_af;
            let mf = mf_rates(&p, &g).rs;
            assert!(mf > last_mf);
            if k > 4 {
                assert!(
                    (af - last_af).abs() < 1e-3,
                    "AF rate drifts: {af} vs {last_af}"
                );
            }
            last_af = af;
            last_mf = mf;
        }
        assert!(last_mf - last_af > 10.0);
    }

    #[test]
    fn af_has_interior_jamming_optimum() {
        let (p0, g) = (params(100.0, 0.0, 1.0), gains(1.0, 1.0));
        let grid = crate::numerics::log_space(1e-2, 1e8, 101);
        let rates: Vec<f64> = grid
            .iter()
            .map(|&pd| af_rates(&SystemParams { pd, ..p0 }, &g).rs_af)
            .collect();
        let (best, _) =
            rates.iter().enumerate().fold(
                (0, f64::MIN),
                |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc },
            );
        assert!(best > 0 && best < grid.len() - 1);
        assert!(rates[best] > rates[0] && rates[best] > rates[grid.len() - 1]);
    }

    #[test]
    fn af_can_beat_the_mf_lower_bound_at_low_first_hop_snr() {
        // The half in ½ + SNR·g1g2/(g1+g2) costs more than the AF jamming
        // penalty when g1·SNR is small and the second hop is strong.
        let p = params(189.6, 189.6f64.powf(-0.3266), 1.0);
        let g = gains(0.00265, 1809.1);
        let mf = mf_rates(&p, &g).rs;
        let af = af_rates(&p, &g).rs_af;
        assert!(af > mf + 0.25, "mf = {mf}, af = {af}");
        assert!(af <= mf + 0.5);
    }

    #[test]
    fn df_comparison_branches() {
        assert_eq!(df_comparison(1.0).unwrap().gap, 0.0);
        assert_eq!(
            df_comparison(0.0).unwrap(),
            DfComparison {
                r_df: 0.0,
                gap: 0.0
            }
        );
        // ½log₂(2.5) − ½
        assert_relative_eq!(
            df_comparison(1.5).unwrap().gap,
            0.160_964_047_443_681_2,
            epsilon = 1e-14
        );
        let below = df_comparison(3.5).unwrap().gap;
        let above = df_comparison(3.5 + 1e-12).unwrap().gap;
        assert_relative_eq!(below, above, epsilon = 1e-11);
        assert_relative_eq!(df_comparison(1e15).unwrap().gap, 0.5, epsilon = 1e-14);
        assert!(df_comparison(-0.1).is_err());
        assert!(df_comparison(f64::NAN).is_err());
    }

    #[test]
    fn df_gap_is_difference_of_clipped_rates() {
        for &t in &[0.2, 1.0, 1.2, 2.0, 3.5, 3.6, 10.0, 1e3, 1e6] {
            let c = df_comparison(t).unwrap();
            let mf = positive(half_log2(0.5 * (1.0 + t)));
            assert_relative_eq!(c.gap, mf - c.r_df, epsilon = 1e-12);
        }
    }

    #[test]
    fn gap_at_symmetric_gains_is_half_bit() {
        let gap = mf_gap(&params(100.0, 1e4, 1.0), &gains(1.0, 1.0));
        assert!(gap > 0.0 && gap <= 0.5 + 1e-12);
        assert_relative_eq!(gap, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gap_vanishes_with_gain_ratio_at_high_snr() {
        let p = params(1e8, 1e12, 1.0);
        let mut last = f64::INFINITY;
        for ratio in [1e-1, 1e-2, 1e-3, 1e-4] {
            let gap = mf_gap(&p, &gains(ratio, 1.0));
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn report_is_consistent() {
        let p = params(10.0, 30.0, 1.0);
        let g = gains(0.7, 2.2);
        let r = rate_report(&p, &g);
        assert_eq!(r.rs_mf, mf_rates(&p, &g).rs);
        assert_eq!(r.gap, r.upper_bound_u - r.rs_mf);
        assert!(r.rd_mf_exact >= r.rd_mf_lower);
        assert!(r.sigma_e2 > 0.0 && r.sigma_e2 <= p.ps);
    }

    fn draw() -> impl Strategy<Value = (SystemParams, ChannelRealization)> {
        (
            0.0f64..8.0,
            0.0f64..3.0,
            -2.0f64..2.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
        )
            .prop_map(|(snr_db10, rho, log_s2, lg1, lg2)| {
                let snr = 10f64.powf(snr_db10);
                let s2 = 10f64.powf(log_s2);
                (
                    SystemParams::new(snr * s2, snr.powf(rho) * s2, s2, 1.0, 1.0).unwrap(),
                    gains(10f64.powf(lg1), 10f64.powf(lg2)),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn achievable_never_exceeds_bound((p, g) in draw()) {
            prop_assert!(mf_rates(&p, &g).rs <= secrecy_upper_bound(&p, &g) + 1e-12);
            prop_assert!(af_rates(&p, &g).rs_af <= secrecy_upper_bound(&p, &g) + 1e-12);
        }

        #[test]
        fn af_within_half_bit_of_mf((p, g) in draw()) {
            prop_assert!(af_rates(&p, &g).rs_af <= mf_rates(&p, &g).rs + 0.5 + 1e-12);
        }

        #[test]
        fn exact_destination_rate_dominates_bound((p, g) in draw()) {
            let r = mf_rates(&p, &g);
            prop_assert!(r.rd_exact >= r.rd_lower - 1e-12);
        }

        #[test]
        fn gap_at_most_half_bit((p, g) in draw()) {
            let gap = mf_gap(&p, &g);
            prop_assert!(gap >= -1e-12);
            prop_assert!(gap <= 0.5 + 1e-12);
        }

        #[test]
        fn mf_monotone_in_jamming((p, g) in draw(), factor in 1.0f64..1e6) {
            let more = SystemParams { pd: p.pd * factor, ..p };
            prop_assert!(mf_rates(&more, &g).rs >= mf_rates(&p, &g).rs);
        }

        #[test]
        fn sigma_e_sq_in_range((p, g) in draw()) {
            let s = sigma_e_sq(&p, &g);
            prop_assert!(s > 0.0 && s <= p.ps);
        }
    }
}
