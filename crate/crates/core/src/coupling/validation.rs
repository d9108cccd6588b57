//! Statistical self-checks for [`lazy_sample`](super::lazy_sample).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{lazy_sample, tv_gaussian_1d, DensityDist, GaussianSpec};
use crate::error::Result;

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Outcome of one statistical check.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerCheck {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    /// Largest admissible `|measured - expected|`.
    pub tolerance: f64,
    pub passed: bool,
}

impl SamplerCheck {
    fn new(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        SamplerCheck {
            name: name.into(),
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
        }
    }
}

/// Runs `samples` couplings of `x ~ q` into `p`; returns the resample
/// frequency and the coupled outputs (first coordinate).
pub fn couple_many(
    q: &GaussianSpec,
    p: &GaussianSpec,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    let mut resampled = 0usize;
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = q.sample(rng);
        let s = lazy_sample(&x, q, p, rng)?;
        resampled += s.resampled as usize;
        out.push(s.value[0]);
    }
    Ok((resampled as f64 / samples as f64, out))
}

fn direct_draws(p: &GaussianSpec, samples: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..samples).map(|_| p.sample(rng)[0]).collect()
}

/// Checks the coupling on fixed Gaussian pairs:
///
/// * identical laws never resample;
/// * `N(0,1) -> N(1,1)`: resample frequency within 0.01 of the exact TV, and
///   outputs indistinguishable from direct draws (KS, 1% level);
/// * `N(0,1) -> N(0,4)`: resample frequency within three binomial standard
///   deviations of the quadrature TV, and the KS test as above.
pub fn validate_sampler(samples: usize, seed: u64) -> Result<Vec<SamplerCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = GaussianSpec::new(vec![0.0], 1.0)?;
    let shifted = GaussianSpec::new(vec![1.0], 1.0)?;
    let wide = GaussianSpec::new(vec![0.0], 2.0)?;
    let critical = ks_critical_value(samples, samples, 0.01);
    let mut checks = Vec::new();

    let (freq, _) = couple_many(&std_normal, &std_normal, samples, &mut rng)?;
    checks.push(SamplerCheck::new(
        "identical laws: resample frequency",
        freq,
        0.0,
        0.0,
    ));

    let tv = tv_gaussian_1d(&std_normal, &shifted)?;
    let (freq, out) = couple_many(&std_normal, &shifted, samples, &mut rng)?;
    checks.push(SamplerCheck::new(
        "N(0,1)->N(1,1): resample frequency",
        freq,
        tv,
        0.01,
    ));
    let direct = direct_draws(&shifted, samples, &mut rng);
    checks.push(SamplerCheck::new(
        "N(0,1)->N(1,1): KS distance to direct draws",
        ks_statistic(&out, &direct),
        0.0,
        critical,
    ));

    let tv = tv_gaussian_1d(&std_normal, &wide)?;
    let (freq, out) = couple_many(&std_normal, &wide, samples, &mut rng)?;
    let sd = (tv * (1.0 - tv) / samples as f64).sqrt();
    checks.push(SamplerCheck::new(
        "N(0,1)->N(0,4): resample frequency",
        freq,
        tv,
        3.0 * sd,
    ));
    let direct = direct_draws(&wide, samples, &mut rng);
    checks.push(SamplerCheck::new(
        "N(0,1)->N(0,4): KS distance to direct draws",
        ks_statistic(&out, &direct),
        0.0,
        critical,
    ));
    Ok(checks)
}
