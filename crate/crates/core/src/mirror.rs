//! Dual-averaging geometries with closed-form argmax solvers.
//!
//! Two mirror maps are supported: negative entropy on the probability
//! simplex (strongly convex w.r.t. ℓ1, range `log d`) and `½‖x‖²₂` on the
//! unit ℓ2-ball (strongly convex w.r.t. ℓ2, range `½`). These are the only
//! geometries whose constrained maximizer has a closed form, and they cover
//! every experiment this crate runs.

use crate::geometry::NormIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorKind {
    /// Θ = probability simplex, V(x) = Σ x_j log x_j.
    EntropySimplex,
    /// Θ = unit ℓ2-ball, V(x) = ½‖x‖²₂.
    SquaredL2Ball,
}

/// A geometry bundle: the feasible set, its argmax solver, the
/// strong-convexity norm index `p`, and the range bound `R²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirrorMap {
    kind: MirrorKind,
    d: usize,
}

impl MirrorMap {
    pub fn new(kind: MirrorKind, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("mirror map needs d >= 1".into()));
        }
        Ok(MirrorMap { kind, d })
    }

    pub fn entropy_simplex(d: usize) -> Result<Self> {
        Self::new(MirrorKind::EntropySimplex, d)
    }

    pub fn squared_l2_ball(d: usize) -> Result<Self> {
        Self::new(MirrorKind::SquaredL2Ball, d)
    }

    pub fn kind(&self) -> MirrorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The norm index the potential is 1-strongly convex against.
    pub fn p(&self) -> NormIndex {
        match self.kind {
            MirrorKind::EntropySimplex => NormIndex::ONE,
            MirrorKind::SquaredL2Ball => NormIndex::TWO,
        }
    }

    /// `R²`, an upper bound on `sup V - inf V` over the feasible set:
    /// `log d` for the simplex, `½` for the ball.
    pub fn range_bound(&self) -> f64 {
        match self.kind {
            MirrorKind::EntropySimplex => (self.d as f64).ln(),
            MirrorKind::SquaredL2Ball => 0.5,
        }
    }

    /// Solve `argmax_{x∈Θ} { η⟨z,x⟩ − V(x) }`.
    ///
    /// Simplex: stabilized softmax of `η z` (components that underflow after
    /// max subtraction stay at exact 0 and the sum is renormalized).
    /// Ball: `η z`, radially clipped onto the unit ball when it lands
    /// outside.
    pub fn argmax_step(&self, z: &[f64], eta: f64) -> Result<Vec<f64>> {
        if z.len() != self.d {
            return Err(Error::Dimension(format!(
                "dual state has length {}, mirror map has d = {}",
                z.len(),
                self.d
            )));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!("step size must be positive and finite, got {eta}")));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("dual state contains a non-finite value".into()));
        }
        match self.kind {
            MirrorKind::EntropySimplex => {
                let m = z.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(eta * v));
                let mut x: Vec<f64> = z.iter().map(|&v| (eta * v - m).exp()).collect();
                let sum: f64 = x.iter().sum();
                for v in &mut x {
                    *v /= sum;
                }
                Ok(x)
            }
            MirrorKind::SquaredL2Ball => {
                let mut x: Vec<f64> = z.iter().map(|&v| eta * v).collect();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1.0 {
                    for v in &mut x {
                        *v /= norm;
                    }
                }
                Ok(x)
            }
        }
    }

    /// Whether `x` lies in the feasible set, up to the documented slack
    /// (simplex sum within 1e-9, ball norm within 1e-12).
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        if x.len() != self.d {
            return false;
        }
        match self.kind {
            MirrorKind::EntropySimplex => {
                x.iter().all(|&v| v >= 0.0) && (x.iter().sum::<f64>() - 1.0).abs() <= 1e-9
            }
            MirrorKind::SquaredL2Ball => {
                x.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + 1e-12
            }
        }
    }

    /// The potential V at a feasible point (entropy uses `0 log 0 = 0`).
    pub fn potential(&self, x: &[f64]) -> f64 {
        match self.kind {
            MirrorKind::EntropySimplex => {
                x.iter().map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }).sum()
            }
            MirrorKind::SquaredL2Ball => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }
}
