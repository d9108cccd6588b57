use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite (got {v})"
        )));
    }
    Ok(())
}

/// Lazy regret implied by a switching-cost regret of order `(T c)^alpha`:
/// `(T/S)^(alpha/(1 - alpha))`.
pub fn convert_cost_to_lazy(alpha: f64, horizon: f64, switches: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1) (got {alpha})"
        )));
    }
    positive("T", horizon)?;
    positive("S", switches)?;
    Ok((horizon / switches).powf(alpha / (1.0 - alpha)))
}

/// Switching-cost regret implied by a lazy regret of order `T/S^gamma`:
/// `T^(1/(1+gamma)) c^(gamma/(1+gamma))`.
pub fn convert_lazy_to_cost(gamma: f64, horizon: f64, cost: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    positive("T", horizon)?;
    if !(cost >= 1.0) || !cost.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "switching cost must be >= 1 (got {cost})"
        )));
    }
    Ok(horizon.powf(1.0 / (1.0 + gamma)) * cost.powf(gamma / (1.0 + gamma)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cost_to_lazy_examples() {
        assert!(rel(convert_cost_to_lazy(0.5, 1000.0, 10.0).unwrap(), 100.0) < 1e-12);
        assert_eq!(convert_cost_to_lazy(1.0 / 3.0, 50.0, 50.0).unwrap(), 1.0);
        assert!(rel(convert_cost_to_lazy(2.0 / 3.0, 100.0, 10.0).unwrap(), 100.0) < 1e-12);
        assert!(convert_cost_to_lazy(1.0, 100.0, 10.0).is_err());
        assert!(convert_cost_to_lazy(0.0, 100.0, 10.0).is_err());
    }

    #[test]
    fn lazy_to_cost_examples() {
        assert!(rel(convert_lazy_to_cost(1.0, 400.0, 9.0).unwrap(), 60.0) < 1e-12);
        assert!(rel(convert_lazy_to_cost(2.0, 1000.0, 1.0).unwrap(), 10.0) < 1e-12);
        assert!(
            rel(
                convert_lazy_to_cost(0.7, 500.0, 1.0).unwrap(),
                500f64.powf(1.0 / 1.7)
            ) < 1e-12
        );
        assert!(convert_lazy_to_cost(1.0, 100.0, 0.5).is_err());
        assert!(convert_lazy_to_cost(-1.0, 100.0, 2.0).is_err());
    }
}
