use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::DensityDist;
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::numeric::{adaptive_simpson, normal_cdf};

/// Isotropic Gaussian `N(mean, std^2 I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec {
    mean: Vec<f64>,
    std: f64,
}

impl GaussianSpec {
    pub fn new(mean: Vec<f64>, std: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::InvalidParameter("Gaussian of dimension 0".into()));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter(
                "Gaussian mean must be finite".into(),
            ));
        }
        if !(std > 0.0) || !std.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Gaussian std must be positive and finite (got {std})"
            )));
        }
        Ok(GaussianSpec { mean, std })
    }

    /// `N(0, std^2 I)` in `d` dimensions.
    pub fn centered(d: usize, std: f64) -> Result<Self> {
        Self::new(vec![0.0; d], std)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }
}

impl DensityDist for GaussianSpec {
    fn dimension(&self) -> usize {
        self.mean.len()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let d = self.mean.len() as f64;
        let var = self.std * self.std;
        let r = linalg::dist(x, &self.mean);
        -0.5 * d * (2.0 * std::f64::consts::PI * var).ln() - r * r / (2.0 * var)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.mean
            .iter()
            .map(|m| {
                let z: f64 = StandardNormal.sample(rng);
                m + self.std * z
            })
            .collect()
    }
}

fn check_equal_std(a: &GaussianSpec, b: &GaussianSpec) -> Result<()> {
    check_dim(a.dimension(), b.dimension())?;
    if a.std != b.std {
        return Err(Error::UnequalStd { a: a.std, b: b.std });
    }
    Ok(())
}

/// `KL(N(m1, s^2) || N(m2, s^2)) = |m1 - m2|^2 / (2 s^2)`; equal std only.
pub fn kl_gaussian(a: &GaussianSpec, b: &GaussianSpec) -> Result<f64> {
    check_equal_std(a, b)?;
    let r = linalg::dist(&a.mean, &b.mean);
    Ok(r * r / (2.0 * a.std * a.std))
}

/// Pinsker upper bound on TV: `sqrt(KL / 2) = |m1 - m2| / (2 s)`.
pub fn tv_upper_pinsker(a: &GaussianSpec, b: &GaussianSpec) -> Result<f64> {
    Ok((kl_gaussian(a, b)? / 2.0).sqrt())
}

/// Exact total variation between two one-dimensional Gaussians.
///
/// Equal std uses `2 Phi(|m1 - m2| / 2s) - 1`; otherwise `|p - q| / 2` is
/// integrated by adaptive quadrature over `+-12` std around both means, with
/// breakpoints on a per-std grid so narrow peaks are never stepped over.
pub fn tv_gaussian_1d(a: &GaussianSpec, b: &GaussianSpec) -> Result<f64> {
    if a.dimension() != 1 || b.dimension() != 1 {
        return Err(Error::InvalidParameter(format!(
            "tv_gaussian_1d needs one-dimensional Gaussians (got {} and {})",
            a.dimension(),
            b.dimension()
        )));
    }
    let (ma, mb) = (a.mean[0], b.mean[0]);
    if a.std == b.std {
        return Ok(2.0 * normal_cdf((ma - mb).abs() / (2.0 * a.std)) - 1.0);
    }

    let mut cuts: Vec<f64> = [(ma, a.std), (mb, b.std)]
        .iter()
        .flat_map(|&(m, s)| (-12..=12).map(move |k| m + k as f64 * s))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let density = |m: f64, s: f64, x: f64| {
        let z = (x - m) / s;
        (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
    };
    let gap = |x: f64| (density(ma, a.std, x) - density(mb, b.std, x)).abs();
    let tol = 1e-10 / cuts.len() as f64;
    let integral: f64 = cuts
        .windows(2)
        .map(|w| adaptive_simpson(gap, w[0], w[1], tol))
        .sum();
    Ok((0.5 * integral).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(mean: &[f64], std: f64) -> GaussianSpec {
        GaussianSpec::new(mean.to_vec(), std).unwrap()
    }

    #[test]
    fn density_at_mean() {
        let s = g(&[1.0, -2.0, 0.5], 0.7);
        let expected = (2.0 * std::f64::consts::PI * 0.49f64).powf(-1.5);
        assert!((s.density(s.mean()) - expected).abs() < 1e-14 * expected);
        assert!(GaussianSpec::new(vec![0.0], 0.0).is_err());
        assert!(GaussianSpec::new(vec![], 1.0).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(
            kl_gaussian(&g(&[0.3, 0.1], 2.0), &g(&[0.3, 0.1], 2.0)).unwrap(),
            0.0
        );
        assert_eq!(
            kl_gaussian(&g(&[1.0, 0.0], 1.0), &g(&[0.0, 0.0], 1.0)).unwrap(),
            0.5
        );
        let s3 = 3f64.sqrt();
        assert!((kl_gaussian(&g(&[3.0], s3), &g(&[0.0], s3)).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(
            kl_gaussian(&g(&[0.0], 1.0), &g(&[0.0], 2.0)),
            Err(Error::UnequalStd { a: 1.0, b: 2.0 })
        );
    }

    #[test]
    fn pinsker_examples() {
        assert_eq!(
            tv_upper_pinsker(&g(&[0.0], 1.0), &g(&[0.0], 1.0)).unwrap(),
            0.0
        );
        assert_eq!(
            tv_upper_pinsker(&g(&[1.0], 1.0), &g(&[0.0], 1.0)).unwrap(),
            0.5
        );
        assert!(
            (tv_upper_pinsker(&g(&[0.2], 10.0), &g(&[0.0], 10.0)).unwrap() - 0.01).abs() < 1e-15
        );
        assert!(tv_upper_pinsker(&g(&[0.0], 1.0), &g(&[0.0], 3.0)).is_err());
    }

    #[test]
    fn tv_examples() {
        assert_eq!(
            tv_gaussian_1d(&g(&[0.4], 1.3), &g(&[0.4], 1.3)).unwrap(),
            0.0
        );
        // 2 Phi(1/2) - 1 via an independent erf implementation
        let oracle = statrs::function::erf::erf(0.5 / std::f64::consts::SQRT_2);
        let tv = tv_gaussian_1d(&g(&[0.0], 1.0), &g(&[1.0], 1.0)).unwrap();
        assert!((tv - oracle).abs() < 1e-14);
        assert!((tv - 0.38292).abs() < 1e-4);
        assert!(tv_gaussian_1d(&g(&[0.0, 0.0], 1.0), &g(&[1.0, 0.0], 1.0)).is_err());
    }

    /// Closed form for unequal std through the two density crossings.
    fn tv_by_crossings(m1: f64, s1: f64, m2: f64, s2: f64) -> f64 {
        use statrs::distribution::{ContinuousCDF, Normal};
        let n1 = Normal::new(m1, s1).unwrap();
        let n2 = Normal::new(m2, s2).unwrap();
        // log p1 - log p2 = 0 is a quadratic a x^2 + b x + c = 0
        let a = 1.0 / (2.0 * s2 * s2) - 1.0 / (2.0 * s1 * s1);
        let b = m1 / (s1 * s1) - m2 / (s2 * s2);
        let c = m2 * m2 / (2.0 * s2 * s2) - m1 * m1 / (2.0 * s1 * s1) + (s2 / s1).ln();
        let disc = (b * b - 4.0 * a * c).sqrt();
        let (mut r1, mut r2) = ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a));
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        let inner1 = n1.cdf(r2) - n1.cdf(r1);
        let inner2 = n2.cdf(r2) - n2.cdf(r1);
        (inner1 - inner2).abs()
    }

    #[test]
    fn tv_unequal_std_quadrature_matches_crossings_and_monte_carlo() {
        let tv = tv_gaussian_1d(&g(&[0.0], 1.0), &g(&[0.0], 2.0)).unwrap();
        assert!((tv - tv_by_crossings(0.0, 1.0, 0.0, 2.0)).abs() < 1e-8);

        // Monte-Carlo: TV = E_p[max(0, 1 - q/p)]
        let p = g(&[0.0], 1.0);
        let q = g(&[0.0], 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 400_000;
        let mc: f64 = (0..n)
            .map(|_| {
                let x = p.sample(&mut rng);
                (1.0 - (q.log_density(&x) - p.log_density(&x)).exp()).max(0.0)
            })
            .sum::<f64>()
            / n as f64;
        assert!((tv - mc).abs() < 0.005, "{tv} vs {mc}");

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let (m1, m2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let (s1, s2) = (rng.random_range(0.05..4.0), rng.random_range(0.05..4.0));
            let tv = tv_gaussian_1d(&g(&[m1], s1), &g(&[m2], s2)).unwrap();
            assert!((tv - tv_by_crossings(m1, s1, m2, s2)).abs() < 1e-8);
        }
    }

    #[test]
    fn pinsker_dominates_exact_tv() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let s = rng.random_range(0.01..5.0);
            let a = g(&[rng.random_range(-5.0..5.0)], s);
            let b = g(&[rng.random_range(-5.0..5.0)], s);
            assert!(tv_upper_pinsker(&a, &b).unwrap() >= tv_gaussian_1d(&a, &b).unwrap() - 1e-9);
        }
    }
}
