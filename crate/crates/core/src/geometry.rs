//! Convex feasible sets with closed-form Euclidean projections.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Relative slack used when validating a stored diameter.
const DIAMETER_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Axis-aligned box `lower <= x <= upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
}

/// A convex decision set. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    shape: Shape,
    diameter: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DomainRepr {
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter: Option<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter: Option<f64>,
    },
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(repr: DomainRepr) -> Result<Self> {
        let (domain, declared) = match repr {
            DomainRepr::Box {
                lower,
                upper,
                diameter,
            } => (Domain::new_box(lower, upper)?, diameter),
            DomainRepr::Ball {
                center,
                radius,
                diameter,
            } => (Domain::ball(center, radius)?, diameter),
        };
        if let Some(d) = declared {
            if !((d - domain.diameter).abs() <= DIAMETER_RTOL * domain.diameter) {
                return Err(Error::InvalidDomain(format!(
                    "declared diameter {d} does not match computed {}",
                    domain.diameter
                )));
            }
        }
        Ok(domain)
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        match d.shape {
            Shape::Box { lower, upper } => DomainRepr::Box {
                lower,
                upper,
                diameter: Some(d.diameter),
            },
            Shape::Ball { center, radius } => DomainRepr::Ball {
                center,
                radius,
                diameter: Some(d.diameter),
            },
        }
    }
}

impl Domain {
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("box must have dimension >= 1".into()));
        }
        check_dim(lower.len(), upper.len())?;
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("box bounds must be finite".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidDomain("box has lower > upper".into()));
        }
        let diameter = linalg::dist(&lower, &upper);
        if !(diameter > 0.0) {
            return Err(Error::InvalidDomain("box has zero diameter".into()));
        }
        Ok(Domain {
            shape: Shape::Box { lower, upper },
            diameter,
        })
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new_box(vec![lo; d], vec![hi; d])
    }

    /// The interval `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::cube(1, lo, hi)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDomain("ball must have dimension >= 1".into()));
        }
        if center.iter().any(|v| !v.is_finite()) || !radius.is_finite() || !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "ball needs a finite center and positive radius (got {radius})"
            )));
        }
        Ok(Domain {
            shape: Shape::Ball { center, radius },
            diameter: 2.0 * radius,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Box { lower, .. } => lower.len(),
            Shape::Ball { center, .. } => center.len(),
        }
    }

    /// Euclidean diameter `D`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Box midpoint or ball center.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
            Shape::Ball { center, .. } => center.clone(),
        }
    }

    /// Euclidean projection onto the set. Members are returned unchanged.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dimension(), x.len())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&xi, (&l, &u))| xi.clamp(l, u))
                .collect(),
            Shape::Ball { center, radius } => {
                let r = linalg::dist(x, center);
                // rounding band keeps projection idempotent
                if r <= *radius * (1.0 + 4.0 * f64::EPSILON) {
                    x.to_vec()
                } else {
                    let s = radius / r;
                    center
                        .iter()
                        .zip(x)
                        .map(|(c, xi)| c + (xi - c) * s)
                        .collect()
                }
            }
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(linalg::dist(&p, x))
    }

    /// True iff `x` lies within `tol` of the set.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be >= 0 (got {tol})"
            )));
        }
        Ok(self.distance(x)? <= tol)
    }

    /// A minimizer of `g·w` over the set. Coordinates (box) or the whole point
    /// (ball) left undetermined by a zero gradient are taken from `fallback`.
    pub fn linear_minimizer(&self, g: &[f64], fallback: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dimension(), g.len())?;
        check_dim(self.dimension(), fallback.len())?;
        Ok(match &self.shape {
            Shape::Box { lower, upper } => g
                .iter()
                .enumerate()
                .map(|(i, &gi)| {
                    if gi > 0.0 {
                        lower[i]
                    } else if gi < 0.0 {
                        upper[i]
                    } else {
                        fallback[i]
                    }
                })
                .collect(),
            Shape::Ball { center, radius } => {
                let n = linalg::norm(g);
                if n == 0.0 {
                    fallback.to_vec()
                } else {
                    center
                        .iter()
                        .zip(g)
                        .map(|(c, gi)| c - radius * gi / n)
                        .collect()
                }
            }
        })
    }

    /// Uniform draw from the set.
    pub fn sample_uniform(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        match &self.shape {
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| if l == u { l } else { rng.random_range(l..=u) })
                .collect(),
            Shape::Ball { center, radius } => {
                let d = center.len();
                let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let n = linalg::norm(&dir);
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
                center
                    .iter()
                    .zip(&dir)
                    .map(|(c, u)| if n > 0.0 { c + r * u / n } else { *c })
                    .collect()
            }
        }
    }
}
