//! Entanglement boundary `β*` where `q(β)` changes sign.
//!
//! The search runs on the continuous `q = λ₁ − λ₂ − λ₃ − λ₄`; the clamped
//! concurrence is flat at zero on the separable side and cannot bracket a
//! root.

use crate::entanglement::PairReduction;
use crate::error::{Error, Result};

use super::Scanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// Coarse geometric scan in `|β|` followed by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch {
    pub min_abs_beta: f64,
    pub max_abs_beta: f64,
    pub coarse_points: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub bracket_tol: f64,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            min_abs_beta: 0.1,
            max_abs_beta: 50.0,
            coarse_points: 200,
            bracket_tol: 1e-10,
        }
    }
}

impl ThresholdSearch {
    fn validate(&self) -> Result<()> {
        if !(self.min_abs_beta > 0.0 && self.min_abs_beta < self.max_abs_beta && self.max_abs_beta.is_finite()) {
            return Err(Error::param("threshold range", "need 0 < min < max < inf"));
        }
        if self.coarse_points < 2 {
            return Err(Error::param("threshold range", "need at least 2 coarse points"));
        }
        if !(self.bracket_tol > 0.0) {
            return Err(Error::param("bracket_tol", "must be positive"));
        }
        Ok(())
    }

    /// Geometric grid of `|β|` values, ascending.
    pub fn coarse_grid(&self) -> Vec<f64> {
        let ratio = self.max_abs_beta / self.min_abs_beta;
        let last = (self.coarse_points - 1) as f64;
        (0..self.coarse_points)
            .map(|i| {
                if i + 1 == self.coarse_points {
                    self.max_abs_beta
                } else {
                    self.min_abs_beta * ratio.powf(i as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSide {
    Boundary {
        /// Signed inverse temperature of the sign change.
        beta_star: f64,
        bracket_width: f64,
        /// `q` evaluated at `beta_star`.
        q_residual: f64,
    },
    /// `q` keeps one sign over the whole scanned range.
    NoEntanglement,
}

impl ThresholdSide {
    pub fn beta_star(&self) -> Option<f64> {
        match self {
            ThresholdSide::Boundary { beta_star, .. } => Some(*beta_star),
            ThresholdSide::NoEntanglement => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub alpha: f64,
    pub positive: ThresholdSide,
    pub negative: ThresholdSide,
}

impl ThresholdResult {
    pub fn beta_star_positive(&self) -> Option<f64> {
        self.positive.beta_star()
    }

    pub fn beta_star_negative(&self) -> Option<f64> {
        self.negative.beta_star()
    }
}

impl Scanner {
    fn q_at(&self, reduction: &PairReduction, beta: f64) -> Result<f64> {
        Ok(self.concurrence_at(reduction, beta)?.q)
    }

    /// Boundary on one side of β = 0, nearest to β = 0 within the search range.
    pub fn find_threshold(&self, side: Side, pair: (usize, usize), search: &ThresholdSearch) -> Result<ThresholdSide> {
        search.validate()?;
        let reduction = self.pair_reduction(pair)?;
        let betas: Vec<f64> = search.coarse_grid().into_iter().map(|b| side.sign() * b).collect();
        let qs: Vec<f64> = self
            .concurrence_at_points(&betas, pair)?
            .into_iter()
            .map(|p| p.q)
            .collect();

        let Some(i) = (0..betas.len() - 1).find(|&i| (qs[i] > 0.0) != (qs[i + 1] > 0.0)) else {
            return Ok(ThresholdSide::NoEntanglement);
        };

        // Invariant: q(inner) and q(outer) lie on opposite sides of zero.
        let (mut inner, mut outer) = (betas[i], betas[i + 1]);
        let inner_positive = qs[i] > 0.0;
        while (outer - inner).abs() > search.bracket_tol {
            let mid = 0.5 * (inner + outer);
            if mid == inner || mid == outer {
                break;
            }
            if (self.q_at(&reduction, mid)? > 0.0) == inner_positive {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        let beta_star = 0.5 * (inner + outer);
        Ok(ThresholdSide::Boundary {
            beta_star,
            bracket_width: (outer - inner).abs(),
            q_residual: self.q_at(&reduction, beta_star)?,
        })
    }

    pub fn thresholds(&self, pair: (usize, usize), search: &ThresholdSearch) -> Result<ThresholdResult> {
        Ok(ThresholdResult {
            alpha: self.alpha(),
            positive: self.find_threshold(Side::Positive, pair, search)?,
            negative: self.find_threshold(Side::Negative, pair, search)?,
        })
    }
}
