use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::losses::{self, Augment, LossFn, LossSum};

/// Perturbation scale `sigma_t` per round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationSchedule {
    /// `sigma_t = sigma`
    Constant(f64),
    /// `sigma_t = sqrt(t) * sigma`
    SqrtScaled(f64),
}

impl PerturbationSchedule {
    pub fn validate(&self) -> Result<()> {
        let s = match self {
            PerturbationSchedule::Constant(s) | PerturbationSchedule::SqrtScaled(s) => *s,
        };
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "perturbation scale must be positive and finite (got {s})"
            )));
        }
        Ok(())
    }

    /// `sigma_t` for a 1-based round `t`.
    pub fn sigma(&self, t: usize) -> f64 {
        match self {
            PerturbationSchedule::Constant(s) => *s,
            PerturbationSchedule::SqrtScaled(s) => (t as f64).sqrt() * s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer {
    /// `R = 0`
    None,
    /// `R(w) = |w - anchor|^2 / (2 eta)`
    Quadratic { eta: f64, anchor: Vec<f64> },
}

impl Regularizer {
    pub fn quadratic(eta: f64, anchor: Vec<f64>) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "regularization rate must be positive and finite (got {eta})"
            )));
        }
        Ok(Regularizer::Quadratic { eta, anchor })
    }

    pub(crate) fn validate(&self, domain: &Domain) -> Result<()> {
        if let Regularizer::Quadratic { anchor, .. } = self {
            check_dim(domain.dimension(), anchor.len())?;
            if !domain.contains(anchor, 1e-9)? {
                return Err(Error::InvalidParameter(
                    "regularizer anchor lies outside the domain".into(),
                ));
            }
        }
        Ok(())
    }

    fn modulus(&self) -> f64 {
        match self {
            Regularizer::None => 0.0,
            Regularizer::Quadratic { eta, .. } => 1.0 / eta,
        }
    }
}

/// Sufficient statistics for `phi(w) = sum_i f_i(w) + p·w + R(w)`.
#[derive(Clone, Debug)]
pub struct CumulativeObjective {
    losses: LossSum,
    perturbation: Vec<f64>,
    sigma: f64,
    regularizer: Regularizer,
}

impl CumulativeObjective {
    pub fn new(perturbation: Vec<f64>, sigma: f64, regularizer: Regularizer) -> Result<Self> {
        if perturbation.is_empty() {
            return Err(Error::InvalidParameter(
                "perturbation of dimension 0".into(),
            ));
        }
        if let Regularizer::Quadratic { anchor, .. } = &regularizer {
            check_dim(perturbation.len(), anchor.len())?;
        }
        Ok(CumulativeObjective {
            losses: LossSum::new(perturbation.len()),
            perturbation,
            sigma,
            regularizer,
        })
    }

    pub fn dimension(&self) -> usize {
        self.perturbation.len()
    }

    pub fn add_loss(&mut self, loss: &LossFn) -> Result<()> {
        self.losses.add(loss)
    }

    pub fn set_perturbation(&mut self, perturbation: Vec<f64>, sigma: f64) -> Result<()> {
        check_dim(self.dimension(), perturbation.len())?;
        self.perturbation = perturbation;
        self.sigma = sigma;
        Ok(())
    }

    pub fn perturbation(&self) -> &[f64] {
        &self.perturbation
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn losses(&self) -> &LossSum {
        &self.losses
    }

    /// Strong-convexity modulus of `phi`.
    pub fn modulus(&self) -> f64 {
        self.losses.modulus() + self.regularizer.modulus()
    }

    pub fn value(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dimension(), w.len())?;
        let mut v = self.losses.value(w) + crate::linalg::dot(&self.perturbation, w);
        if let Regularizer::Quadratic { eta, anchor } = &self.regularizer {
            let r = crate::linalg::dist(w, anchor);
            v += r * r / (2.0 * eta);
        }
        Ok(v)
    }

    pub(crate) fn argmin_from(&self, domain: &Domain, warm_start: &[f64]) -> Result<Vec<f64>> {
        let modulus = self.modulus();
        if !(modulus > 0.0) {
            return Err(Error::NotStronglyConvex { modulus });
        }
        let aug = Augment {
            tilt: Some(&self.perturbation),
            prox: match &self.regularizer {
                Regularizer::None => None,
                Regularizer::Quadratic { eta, anchor } => Some((*eta, anchor.as_slice())),
            },
        };
        losses::minimize(&self.losses, aug, domain, warm_start, warm_start)
    }
}

/// The unique minimizer of a strongly convex objective over `domain`.
///
/// Closed form whenever every term is linear or isotropic quadratic;
/// projected gradient descent otherwise.
pub fn argmin_objective(obj: &CumulativeObjective, domain: &Domain) -> Result<Vec<f64>> {
    check_dim(domain.dimension(), obj.dimension())?;
    obj.argmin_from(domain, &domain.center())
}
