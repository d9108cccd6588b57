use crate::error::{check_dim, Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "probabilities must be finite and nonnegative".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Total variation `max_B p(B) - q(B) = |p - q|_1 / 2` on a common finite support.
pub fn tv_discrete(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dim(p.len(), q.len())?;
    check_probability_vector(p)?;
    check_probability_vector(q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
