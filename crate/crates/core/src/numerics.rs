//! Special functions and small numeric utilities.
//!
//! Only the pieces the outage closed forms and the high-SNR slope estimators
//! need: the modified Bessel function `K1`, an ordinary least-squares slope,
//! log-spaced grids and a chi-square goodness-of-fit p-value.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "interval bounds out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `K1` is evaluated from its ascending series, above it
/// from Steed's continued fraction.
const SERIES_LIMIT: f64 = 2.0;

/// First-order modified Bessel function of the second kind, `K1(x)`.
///
/// Relative accuracy is better than `1e-13` on `[1e-6, 30]`. For large `x`
/// the result underflows gracefully to `0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_LIMIT {
        let (i1, s) = k1_series_parts(x);
        Ok(1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * s)
    } else {
        Ok(k1_continued_fraction(x))
    }
}

/// `x·K1(x) − 1`, computed without cancellation for small `x`.
///
/// The outage closed forms evaluate `1 − e^{−s}·x·K1(x)` with `x` as small as
/// `1e-12` at high SNR; going through `K1` directly would lose every
/// significant digit of the difference.
pub fn x_k1_minus_one(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_LIMIT {
        let (i1, s) = k1_series_parts(x);
        Ok(x * (0.5 * x).ln() * i1 - 0.25 * x * x * s)
    } else {
        Ok(x * k1_continued_fraction(x) - 1.0)
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("x", x, "finite and > 0"))
    }
}

/// Returns `(I1(x), S(x))` where
/// `S(x) = Σ_k [ψ(k+1) + ψ(k+2)] (x²/4)^k / (k!(k+1)!)`, so that
/// `K1(x) = 1/x + ln(x/2)·I1(x) − (x/4)·S(x)`.
fn k1_series_parts(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    // term_k = (x²/4)^k / (k!(k+1)!)
    let mut term = 1.0;
    let mut psi_a = -EULER_GAMMA; // ψ(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut sum_i = 0.0;
    let mut sum_s = 0.0;
    for k in 0..200 {
        sum_i += term;
        let ds = (psi_a + psi_b) * term;
        sum_s += ds;
        if term < 1e-18 * sum_i && ds.abs() < 1e-18 * sum_s.abs() {
            break;
        }
        let k = k as f64;
        psi_a += 1.0 / (k + 1.0);
        psi_b += 1.0 / (k + 2.0);
        term *= q / ((k + 1.0) * (k + 2.0));
    }
    (0.5 * x * sum_i, sum_s)
}

/// Steed's algorithm for Temme's second continued fraction at order zero,
/// giving `K0` and `K1` together. Converges quickly for `x ≥ 2`.
fn k1_continued_fraction(x: f64) -> f64 {
    const EPS: f64 = 1e-17;
    let a1 = 0.25; // 1/4 − μ², μ = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    k0 * (x + 0.5 - h) / x
}

/// Least-squares slope of `y` against `x`.
///
/// `points` are `(x, y)` pairs, normally `(log SNR, log value)`.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument(
            "slope fit abscissae must be strictly increasing".into(),
        ));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    Ok(sxy / sxx)
}

/// `points` values spaced evenly in `log10` between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    hi
                } else {
                    10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
                }
            })
            .collect(),
    }
}

/// `points` values spaced evenly between `lo` and `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Pearson chi-square p-value for observed bin counts against equiprobable
/// bins.
pub fn chi_square_uniform_pvalue(counts: &[u64]) -> Result<f64> {
    if counts.len() < 2 {
        return Err(Error::InvalidArgument(
            "chi-square test needs at least 2 bins".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument(
            "chi-square test on no samples".into(),
        ));
    }
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sf(stat))
}
