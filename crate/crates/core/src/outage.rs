//! Outage probabilities without transmitter channel knowledge.
//!
//! The source fixes `(Rd, Rs)` up front. A *connection outage* happens when
//! the end-to-end link cannot carry `Rd`; a *secrecy outage* when the relay's
//! link carries more than `Rd − Rs`. Gains are exponential with means
//! `ε1`, `ε2`.
//!
//! Closed forms are exact for Rayleigh fading; the `_asymptotic` variants
//! are their first-order high-SNR expansions. [`mc_outage`] samples the
//! underlying events directly and is what the closed forms are checked
//! against.
//!
//! Zero-rate convention: with `Rd = 0` nothing has to be delivered and every
//! connection outage probability is 0, for the closed forms and the sampled
//! events alike.

use crate::channel::{sample_realization, thresholds, RateConfig, SystemParams};
use crate::numerics::{x_k1_minus_one, Interval};
use crate::rates::af_snr;
use crate::rng::par_chunks;
use crate::{Error, Result};

/// `1 − e^{−s}·x·K1(x)`, accurate when both `s` and `x` are tiny.
fn one_minus_bessel_tail(s: f64, x: f64) -> f64 {
    let f = x_k1_minus_one(x).expect("bessel argument is positive");
    -(-s).exp_m1() - (-s).exp() * f
}

/// Cut-set lower bound on the connection outage of any relaying scheme,
/// `1 − exp(−(1/ε1 + 1/ε2)·γo·σ²/Ps)`.
pub fn p_conn_cutset_lower(params: &SystemParams, rates: &RateConfig) -> f64 {
    let t = thresholds(rates);
    let s = (1.0 / params.eps1 + 1.0 / params.eps2) * t.gamma_o / params.snr();
    -(-s).exp_m1()
}

/// Secrecy outage probability,
/// `Psε1/(Psε1 + Pdε2γs) · exp(−γsσ²/(Psε1))`.
///
/// Does not depend on what the relay does with its observation.
pub fn p_secrecy(params: &SystemParams, rates: &RateConfig) -> f64 {
    let gs = thresholds(rates).gamma_s;
    let a = params.ps * params.eps1;
    a / (a + params.pd * params.eps2 * gs) * (-gs * params.sigma2 / a).exp()
}

/// High-SNR form of [`p_secrecy`] with `e^{−x} ≈ 1 − x`.
pub fn p_secrecy_asymptotic(params: &SystemParams, rates: &RateConfig) -> f64 {
    let gs = thresholds(rates).gamma_s;
    let a = params.ps * params.eps1;
    a / (a + params.pd * params.eps2 * gs) * (1.0 - gs * params.sigma2 / a)
}

/// Connection outage of modulo-and-forward:
/// `Pr[SNR·g1g2/(g1+g2) < γ1]` in closed form through `K1`.
pub fn p_conn_mf(params: &SystemParams, rates: &RateConfig) -> f64 {
    if rates.rd == 0.0 {
        return 0.0;
    }
    let a = thresholds(rates).gamma_1 / params.snr();
    let s = (1.0 / params.eps1 + 1.0 / params.eps2) * a;
    let x = 2.0 * a / (params.eps1 * params.eps2).sqrt();
    one_minus_bessel_tail(s, x)
}

/// `(1/ε1 + 1/ε2)·γ1·σ²/Ps`.
pub fn p_conn_mf_asymptotic(params: &SystemParams, rates: &RateConfig) -> f64 {
    if rates.rd == 0.0 {
        return 0.0;
    }
    (1.0 / params.eps1 + 1.0 / params.eps2) * thresholds(rates).gamma_1 / params.snr()
}

/// Connection outage of amplify-and-forward, `Pr[SNR_AF < γo]`.
pub fn p_conn_af(params: &SystemParams, rates: &RateConfig) -> f64 {
    if rates.rd == 0.0 {
        return 0.0;
    }
    let go = thresholds(rates).gamma_o;
    let c = go / params.snr();
    let b = (params.ps + params.pd) / params.ps;
    let s = c * (b / params.eps1 + 1.0 / params.eps2);
    let x = 2.0 * c * ((b + 1.0 / go) / (params.eps1 * params.eps2)).sqrt();
    one_minus_bessel_tail(s, x)
}

/// `(γo·σ²/Ps)·((Ps+Pd)/(Ps·ε1) + 1/ε2)`.
pub fn p_conn_af_asymptotic(params: &SystemParams, rates: &RateConfig) -> f64 {
    if rates.rd == 0.0 {
        return 0.0;
    }
    let go = thresholds(rates).gamma_o;
    go / params.snr() * ((params.ps + params.pd) / (params.ps * params.eps1) + 1.0 / params.eps2)
}

/// How the relay forwards, for outage purposes. `CutSet` is the genie bound
/// no scheme can beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForwardingScheme {
    Mf,
    Af,
    CutSet,
}

impl ForwardingScheme {
    pub fn p_conn(self, params: &SystemParams, rates: &RateConfig) -> f64 {
        match self {
            ForwardingScheme::Mf => p_conn_mf(params, rates),
            ForwardingScheme::Af => p_conn_af(params, rates),
            ForwardingScheme::CutSet => p_conn_cutset_lower(params, rates),
        }
    }
}

/// Connection and secrecy outage with the bracket on total outage
/// `max(pc, ps) ≤ pt ≤ min(1, pc + ps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageProbs {
    pub p_conn: f64,
    pub p_secrecy: f64,
    pub p_total_lower: f64,
    pub p_total_upper: f64,
}

impl OutageProbs {
    pub fn new(p_conn: f64, p_secrecy: f64) -> Self {
        OutageProbs {
            p_conn,
            p_secrecy,
            p_total_lower: p_conn.max(p_secrecy),
            p_total_upper: (p_conn + p_secrecy).min(1.0),
        }
    }
}

pub fn outage_probs(
    params: &SystemParams,
    rates: &RateConfig,
    scheme: ForwardingScheme,
) -> OutageProbs {
    OutageProbs::new(scheme.p_conn(params, rates), p_secrecy(params, rates))
}

/// Which expressions [`tradeoff_residual`] plugs into the linear relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeoffForm {
    /// High-SNR expansions; the relation then holds identically.
    Asymptotic,
    /// Exact closed forms; the residual shrinks with SNR.
    Exact,
}

/// Left side minus one of the high-SNR tradeoff between MF connection
/// outage `po` and secrecy outage `pl`:
///
/// `(Psε1 + Pdε2γs)/(Psε1)·pl + γsε2/(γ1(ε1+ε2))·po − 1`.
pub fn tradeoff_residual(
    params: &SystemParams,
    rates: &RateConfig,
    form: TradeoffForm,
) -> Result<f64> {
    let t = thresholds(rates);
    if !(t.gamma_1 > 0.0) {
        return Err(Error::domain("gamma_1", t.gamma_1, "> 0"));
    }
    let (pl, po) = match form {
        TradeoffForm::Asymptotic => (
            p_secrecy_asymptotic(params, rates),
            p_conn_mf_asymptotic(params, rates),
        ),
        TradeoffForm::Exact => (p_secrecy(params, rates), p_conn_mf(params, rates)),
    };
    let a = params.ps * params.eps1;
    let lhs = (a + params.pd * params.eps2 * t.gamma_s) / a * pl
        + t.gamma_s * params.eps2 / (t.gamma_1 * (params.eps1 + params.eps2)) * po;
    Ok(lhs - 1.0)
}

/// Binomial proportion estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub n: u64,
    /// `√(p̂(1 − p̂)/n)`.
    pub std_err: f64,
    /// Normal-approximation 95% interval clamped to `[0, 1]`.
    pub ci95: Interval,
}

impl McEstimate {
    pub fn from_counts(hits: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("estimate needs n >= 1".into()));
        }
        if hits > n {
            return Err(Error::InvalidArgument(format!(
                "{hits} hits out of {n} trials"
            )));
        }
        let p_hat = hits as f64 / n as f64;
        let std_err = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        let half = 1.96 * std_err;
        Ok(McEstimate {
            p_hat,
            n,
            std_err,
            ci95: Interval {
                lo: (p_hat - half).max(0.0),
                hi: (p_hat + half).min(1.0),
            },
        })
    }

    /// Distance to `p` in standard errors.
    ///
    /// Uses the larger of the standard errors at `p̂` and at `p`, so an
    /// estimate that saturates at 0 or 1 is not judged against a zero
    /// spread.
    pub fn z_score(&self, p: f64) -> f64 {
        let d = (self.p_hat - p).abs();
        if d == 0.0 {
            return 0.0;
        }
        let se_null = (p * (1.0 - p) / self.n as f64).sqrt();
        d / self.std_err.max(se_null)
    }
}

/// Sampled connection, secrecy and total outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOutage {
    pub conn: McEstimate,
    pub secrecy: McEstimate,
    /// `Pr(connection ∪ secrecy)` from the same draws.
    pub joint: McEstimate,
}

/// Estimates outage by drawing `n` fading blocks.
///
/// Connection events by scheme: MF `SNR·g1g2/(g1+g2) < γ1`, AF
/// `SNR_AF < γo`, cut-set `SNR·min(g1,g2) < γo`. The secrecy event is
/// `Ps·g1/(Pd·g2 + σ²) > γs` for every scheme. Results depend only on
/// `(seed, n)`, not on the thread count.
pub fn mc_outage(
    params: &SystemParams,
    rates: &RateConfig,
    scheme: ForwardingScheme,
    n: u64,
    seed: u64,
) -> Result<McOutage> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs n >= 1".into()));
    }
    let t = thresholds(rates);
    let snr = params.snr();
    let deliver = rates.rd > 0.0;
    let counts = par_chunks(n as usize, seed, |len, rng| {
        let mut c = [0u64; 3];
        for _ in 0..len {
            let r = sample_realization(params, rng);
            let conn = deliver
                && match scheme {
                    ForwardingScheme::Mf => {
                        let sum = r.g1 + r.g2;
                        sum == 0.0 || snr * r.g1 * r.g2 / sum < t.gamma_1
                    }
                    ForwardingScheme::Af => af_snr(params, &r) < t.gamma_o,
                    ForwardingScheme::CutSet => snr * r.g1.min(r.g2) < t.gamma_o,
                };
            let leak = params.ps * r.g1 / (params.pd * r.g2 + params.sigma2) > t.gamma_s;
            c[0] += conn as u64;
            c[1] += leak as u64;
            c[2] += (conn || leak) as u64;
        }
        c
    });
    let total = counts.iter().fold([0u64; 3], |mut acc, c| {
        for (a, b) in acc.iter_mut().zip(c) {
            *a += b;
        }
        acc
    });
    Ok(McOutage {
        conn: McEstimate::from_counts(total[0], n)?,
        secrecy: McEstimate::from_counts(total[1], n)?,
        joint: McEstimate::from_counts(total[2], n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_seed, substream};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn unit(ps: f64, pd: f64) -> SystemParams {
        SystemParams::with_powers(ps, pd).unwrap()
    }

    fn rates(rd: f64, rs: f64) -> RateConfig {
        RateConfig::new(rd, rs).unwrap()
    }

    #[test]
    fn cutset_cases() {
        assert!(p_conn_cutset_lower(&unit(1e15, 1.0), &rates(1.0, 0.5)) < 1e-14);
        assert_eq!(p_conn_cutset_lower(&unit(10.0, 1.0), &rates(0.0, 0.0)), 0.0);
        // γo·σ²/Ps = 0.1 with Rd = 1 (γo = 3) and Ps = 30.
        assert_relative_eq!(
            p_conn_cutset_lower(&unit(30.0, 1.0), &rates(1.0, 0.5)),
            0.181_269_246_922_018_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn secrecy_cases() {
        assert_eq!(p_secrecy(&unit(10.0, 10.0), &rates(0.7, 0.7)), 1.0);
        let p = p_secrecy(&unit(10.0, 0.0), &rates(1.0, 0.5));
        assert_relative_eq!(p, (-0.1f64).exp(), epsilon = 1e-15);
        // γs = 1
        assert_relative_eq!(
            p_secrecy(&unit(10.0, 10.0), &rates(1.0, 0.5)),
            0.452_418_709_017_979_8,
            epsilon = 1e-14
        );
    }

    #[test]
    fn conn_vanishes_at_high_power() {
        let r = rates(1.0, 0.5);
        for ps in [1e8, 1e12, 1e16] {
            let p = unit(ps, ps);
            assert!(p_conn_mf(&p, &r) < 10.0 / ps);
            assert!(p_conn_af(&p, &r) < 10.0 / ps);
        }
        // ρ = 1.5 < 2: AF still vanishes, just slower.
        let p = unit(1e12, 1e18);
        assert!(p_conn_af(&p, &r) < 1e-4);
    }

    #[test]
    fn zero_rate_convention() {
        let p = unit(3.0, 3.0);
        let r = rates(0.0, 0.0);
        assert_eq!(p_conn_mf(&p, &r), 0.0);
        assert_eq!(p_conn_af(&p, &r), 0.0);
        assert_eq!(p_conn_mf_asymptotic(&p, &r), 0.0);
        assert_eq!(p_conn_af_asymptotic(&p, &r), 0.0);
        let mc = mc_outage(&p, &r, ForwardingScheme::Mf, 10_000, 1).unwrap();
        assert_eq!(mc.conn.p_hat, 0.0);
    }

    #[test]
    fn mf_asymptote_close_at_high_snr() {
        let r = rates(1.0, 0.5);
        // The first neglected term is of order x·ln(1/x) relative to the
        // leading one, x = γ1σ²/Ps: 3.3% at x = 0.01, under 2% from 0.004.
        let rel = |ps: f64| {
            let p = unit(ps, 1.0);
            let exact = p_conn_mf(&p, &r);
            (p_conn_mf_asymptotic(&p, &r) - exact).abs() / exact
        };
        let at_001 = rel(350.0);
        assert!((at_001 - 0.0333).abs() < 5e-4, "{at_001}");
        let mut last = at_001;
        for ps in [875.0, 3500.0, 35_000.0, 350_000.0] {
            let e = rel(ps);
            assert!(e <= 0.02 && e < last, "{ps}: {e}");
            last = e;
        }
    }

    #[test]
    fn bessel_closed_forms_match_quadrature() {
        // Numerical integration of the defining one-dimensional integral,
        // 1 − (1/ε2)∫_a^∞ exp(−g/ε2 − a·g/(ε1(g − a))) dg, by the
        // substitution g = a + u/(1 − u) and a composite Simpson rule.
        fn tail_integral(f: impl Fn(f64) -> f64) -> f64 {
            let n = 200_000;
            let h = 1.0 / n as f64;
            let g = |u: f64| {
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    f(u / (1.0 - u)) / ((1.0 - u) * (1.0 - u))
                }
            };
            let mut s = g(0.0) + g(1.0);
            for i in 1..n {
                s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        }
        let p = SystemParams::new(4.0, 7.0, 1.3, 0.8, 1.7).unwrap();
        let r = rates(0.9, 0.2);
        let t = thresholds(&r);

        let a = t.gamma_1 * p.sigma2 / p.ps;
        let mf = 1.0
            - tail_integral(|x| {
                let g = a + x;
                (-g / p.eps2 - a * g / (p.eps1 * x)).exp() / p.eps2
            });
        assert_relative_eq!(p_conn_mf(&p, &r), mf, max_relative = 1e-7);

        let c = t.gamma_o * p.sigma2 / p.ps;
        let af = 1.0
            - tail_integral(|x| {
                let g = c + x;
                let bound = c * ((p.ps + p.pd) * g + p.sigma2) / (p.ps * x);
                (-g / p.eps2 - bound / p.eps1).exp() / p.eps2
            });
        assert_relative_eq!(p_conn_af(&p, &r), af, max_relative = 1e-7);
    }

    #[test]
    fn outage_bracket() {
        let o = outage_probs(&unit(10.0, 10.0), &rates(1.0, 0.5), ForwardingScheme::Mf);
        assert_eq!(o.p_total_lower, o.p_conn.max(o.p_secrecy));
        assert!(o.p_total_lower <= o.p_total_upper);
        assert!(o.p_total_upper <= 2.0 * o.p_total_lower);
        let o = OutageProbs::new(0.8, 0.7);
        assert_eq!(o.p_total_upper, 1.0);
    }

    #[test]
    fn tradeoff_asymptotic_identity() {
        for ps in [10.0, 1e3, 1e6] {
            let res = tradeoff_residual(&unit(ps, ps), &rates(1.0, 0.5), TradeoffForm::Asymptotic)
                .unwrap();
            assert!(res.abs() < 1e-14, "{res}");
        }
    }

    #[test]
    fn tradeoff_exact_converges() {
        let r = rates(1.0, 0.5);
        let hi = tradeoff_residual(&unit(1e6, 1e6), &r, TradeoffForm::Exact).unwrap();
        let mid = tradeoff_residual(&unit(1e3, 1e3), &r, TradeoffForm::Exact).unwrap();
        assert!(hi.abs() < 1e-4, "{hi}");
        assert!(mid.abs() < 1e-1, "{mid}");
        assert!(hi.abs() < mid.abs());
        // Second order in γσ²/Ps: a thousandfold SNR step shrinks it by
        // far more than a thousand.
        assert!(hi.abs() < mid.abs() * 1e-4);
    }

    #[test]
    fn conn_ordering_on_grid() {
        for ps in [1.0, 5.0, 10.0, 50.0, 100.0, 1e3] {
            for mult in [1.0, 10.0, 100.0] {
                for rd in [0.5, 1.0, 2.0, 4.0] {
                    let p = unit(ps, ps * mult);
                    let r = rates(rd, 0.5);
                    let cut = p_conn_cutset_lower(&p, &r);
                    let mf = p_conn_mf(&p, &r);
                    let af = p_conn_af(&p, &r);
                    assert!(cut <= mf + 1e-12, "{ps} {mult} {rd}: {cut} > {mf}");
                    assert!(mf <= af + 1e-12, "{ps} {mult} {rd}: {mf} > {af}");
                }
            }
        }
    }

    #[test]
    fn mf_can_exceed_af_at_low_rate() {
        // γ1 = γo + ½ dominates γo when Rd is small.
        let p = unit(1e4, 1e4);
        let r = rates(0.05, 0.0);
        assert!(p_conn_mf(&p, &r) > 2.0 * p_conn_af(&p, &r));
    }

    #[test]
    fn closed_forms_are_probabilities() {
        let mut rng = substream(99, 0);
        for _ in 0..10_000 {
            let p = SystemParams::new(
                10f64.powf(rng.random_range(-2.0..8.0)),
                10f64.powf(rng.random_range(-3.0..10.0)),
                10f64.powf(rng.random_range(-2.0..2.0)),
                10f64.powf(rng.random_range(-1.0..1.0)),
                10f64.powf(rng.random_range(-1.0..1.0)),
            )
            .unwrap();
            let rd = rng.random_range(0.0..8.0);
            let r = rates(rd, rd * rng.random::<f64>());
            for v in [
                p_conn_cutset_lower(&p, &r),
                p_conn_mf(&p, &r),
                p_conn_af(&p, &r),
                p_secrecy(&p, &r),
            ] {
                assert!(
                    v.is_finite() && (0.0..=1.0).contains(&v),
                    "{v} at {p:?} {r:?}"
                );
            }
        }
    }

    #[test]
    fn monotonicity() {
        let r = rates(1.0, 0.5);
        let mut last = (1.0, 0.0);
        for ps in [1.0, 3.0, 10.0, 30.0, 100.0] {
            let p = unit(ps, 10.0);
            let (c, s) = (p_conn_mf(&p, &r), p_secrecy(&p, &r));
            assert!(c < last.0 && s > last.1);
            assert_eq!(c, p_conn_mf(&unit(ps, 1e5), &r));
            last = (c, s);
        }
        let mut last = 1.0;
        for pd in [0.0, 1.0, 10.0, 100.0] {
            let s = p_secrecy(&unit(10.0, pd), &r);
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn rate_tradeoff_is_strict() {
        let p = unit(10.0, 10.0);
        let mut last = (0.0, 1.0 + 1e-9);
        for k in 0..20 {
            let r = rates(0.5 + 0.1 * k as f64, 0.5);
            let (c, s) = (p_conn_mf(&p, &r), p_secrecy(&p, &r));
            assert!(c > last.0 && s < last.1);
            last = (c, s);
        }
    }

    #[test]
    fn mc_rejects_empty() {
        assert!(mc_outage(
            &unit(1.0, 1.0),
            &rates(1.0, 0.5),
            ForwardingScheme::Mf,
            0,
            1
        )
        .is_err());
        assert!(McEstimate::from_counts(0, 0).is_err());
        assert!(McEstimate::from_counts(3, 2).is_err());
    }

    #[test]
    fn estimate_fields() {
        let e = McEstimate::from_counts(250, 1000).unwrap();
        assert_eq!(e.p_hat, 0.25);
        assert_relative_eq!(e.std_err, (0.25 * 0.75 / 1000.0f64).sqrt(), epsilon = 1e-16);
        assert!(e.ci95.contains(0.25) && e.ci95.lo >= 0.0 && e.ci95.hi <= 1.0);
        let e = McEstimate::from_counts(0, 10).unwrap();
        assert_eq!((e.ci95.lo, e.ci95.hi), (0.0, 0.0));
        assert_eq!(e.z_score(0.0), 0.0);
        assert!(e.z_score(1e-6) < 0.01);
        assert!(e.z_score(0.5).is_finite());
    }

    #[test]
    fn mc_cutset_matches_closed_form() {
        let p = unit(10.0, 10.0);
        let r = rates(1.0, 0.5);
        let mc = mc_outage(
            &p,
            &r,
            ForwardingScheme::CutSet,
            1_000_000,
            derive_seed(3, 0),
        )
        .unwrap();
        assert!(mc.conn.z_score(p_conn_cutset_lower(&p, &r)) < 3.0);
    }

    #[test]
    fn mc_closed_forms_at_reference_point() {
        let p = unit(10.0, 10.0);
        let r = rates(0.5, 0.25);
        let n = 1_000_000;
        let mf = mc_outage(&p, &r, ForwardingScheme::Mf, n, 17).unwrap();
        let af = mc_outage(&p, &r, ForwardingScheme::Af, n, 18).unwrap();
        assert!(mf.conn.z_score(p_conn_mf(&p, &r)) < 3.0, "{:?}", mf.conn);
        assert!(af.conn.z_score(p_conn_af(&p, &r)) < 3.0, "{:?}", af.conn);
        assert!(mf.secrecy.z_score(p_secrecy(&p, &r)) < 3.0);
    }

    #[test]
    fn mc_secrecy_ignores_scheme_and_joint_is_bracketed() {
        let p = unit(5.0, 20.0);
        let r = rates(1.0, 0.5);
        let runs: Vec<_> = [
            ForwardingScheme::Mf,
            ForwardingScheme::Af,
            ForwardingScheme::CutSet,
        ]
        .into_iter()
        .map(|s| mc_outage(&p, &r, s, 200_000, 7).unwrap())
        .collect();
        for m in &runs {
            assert_eq!(m.secrecy, runs[0].secrecy);
            assert!(m.conn.p_hat.max(m.secrecy.p_hat) <= m.joint.p_hat);
            assert!(m.joint.p_hat <= m.conn.p_hat + m.secrecy.p_hat);
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let p = unit(5.0, 20.0);
        let r = rates(1.0, 0.5);
        let a = mc_outage(&p, &r, ForwardingScheme::Af, 300_001, 5).unwrap();
        let b = mc_outage(&p, &r, ForwardingScheme::Af, 300_001, 5).unwrap();
        assert_eq!(a, b);
    }
}
