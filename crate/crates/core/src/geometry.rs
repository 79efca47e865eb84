//! Norm and dimension bookkeeping: ℓp-norms, dual exponents, and the
//! dimension factor `b_q(d)` that controls smoothing bias.

use crate::{Error, Result};

/// An ℓp-norm index in `[1, ∞]`, with `∞` as a distinguished variant rather
/// than a large float, so branch tests like `q >= log d` are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormIndex {
    Finite(f64),
    Infinite,
}

impl NormIndex {
    pub const ONE: NormIndex = NormIndex::Finite(1.0);
    pub const TWO: NormIndex = NormIndex::Finite(2.0);
    pub const INF: NormIndex = NormIndex::Infinite;

    /// A finite index; fails unless `r >= 1`. `f64::INFINITY` maps to [`NormIndex::INF`].
    pub fn new(r: f64) -> Result<Self> {
        if r.is_infinite() && r > 0.0 {
            Ok(NormIndex::Infinite)
        } else if r.is_finite() && r >= 1.0 {
            Ok(NormIndex::Finite(r))
        } else {
            Err(Error::Domain(format!("norm index must be in [1, inf], got {r}")))
        }
    }

    /// The index as a float; `∞` becomes `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            NormIndex::Finite(r) => r,
            NormIndex::Infinite => f64::INFINITY,
        }
    }

    /// `1/r` with the convention `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            NormIndex::Finite(r) => 1.0 / r,
            NormIndex::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, NormIndex::Infinite)
    }

    /// `r ∧ 2`, the index capped at 2.
    pub fn min_two(self) -> NormIndex {
        match self {
            NormIndex::Finite(r) if r < 2.0 => NormIndex::Finite(r),
            _ => NormIndex::TWO,
        }
    }

    /// The Hölder conjugate `r* = r/(r-1)`, with `1 ↦ ∞` and `∞ ↦ 1`.
    ///
    /// Computed as `1/(1 - 1/r)` so the map round-trips exactly on indices
    /// whose reciprocal is dyadic (1, 4/3, 2, 4, ∞).
    pub fn dual(self) -> NormIndex {
        match self {
            NormIndex::Infinite => NormIndex::Finite(1.0),
            NormIndex::Finite(r) if r == 1.0 => NormIndex::Infinite,
            NormIndex::Finite(r) => NormIndex::Finite(1.0 / (1.0 - 1.0 / r)),
        }
    }
}

/// Dimension and the two norm indices a problem instance is stated in:
/// `q` for the Lipschitz norm of the losses, `p` for the strong-convexity
/// norm of the mirror map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemDims {
    d: usize,
    q: NormIndex,
    p: NormIndex,
}

impl ProblemDims {
    /// Requires `d >= 3`, the standing assumption behind every bound here
    /// (it guarantees `log d >= 1`).
    pub fn new(d: usize, q: NormIndex, p: NormIndex) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!("dimension must be >= 3, got {d}")));
        }
        Ok(ProblemDims { d, q, p })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> NormIndex {
        self.q
    }

    pub fn p(&self) -> NormIndex {
        self.p
    }

    /// `d^(1 + 2/(q∧2) - 2/p)`, the dimension factor of the variance bound.
    pub fn variance_dim_factor(&self) -> f64 {
        let e = 1.0 + 2.0 * self.q.min_two().recip() - 2.0 * self.p.recip();
        (self.d as f64).powf(e)
    }

    /// `d^(4 - 2/p)`, the dimension factor of the adversarial noise term.
    pub fn noise_dim_factor(&self) -> f64 {
        (self.d as f64).powf(4.0 - 2.0 * self.p.recip())
    }

    /// `d^(1/2 + 1/(q∧2) - 1/p)`, the dimension factor of the constant-`h`
    /// discretization schedules.
    pub fn h_dim_factor(&self) -> f64 {
        let e = 0.5 + self.q.min_two().recip() - self.p.recip();
        (self.d as f64).powf(e)
    }

    /// `d^(1 - 1/(2p))`, the dimension factor of the noise-robust `h`.
    pub fn h_noise_dim_factor(&self) -> f64 {
        (self.d as f64).powf(1.0 - 0.5 * self.p.recip())
    }
}

/// The dimension factor `b_q(d)` bounding `E‖U‖_q` for `U` uniform on the
/// ℓ1-ball: `q·d^(1/q)/(d+1)` for `q < log d`, else `e·log(d)/(d+1)`.
/// `q = ∞` always takes the log branch.
pub fn b_q(dims: &ProblemDims) -> f64 {
    let d = dims.d as f64;
    let log_d = d.ln();
    match dims.q {
        NormIndex::Finite(q) if q < log_d => q * d.powf(1.0 / q) / (d + 1.0),
        _ => std::f64::consts::E * log_d / (d + 1.0),
    }
}

/// Hölder conjugate of `r`; see [`NormIndex::dual`].
pub fn dual_exponent(r: NormIndex) -> NormIndex {
    r.dual()
}

/// The ℓr-norm of `x`. Finite `r` is computed with rescaling by `max |x_i|`
/// so intermediate powers cannot overflow.
pub fn lp_norm(x: &[f64], r: NormIndex) -> f64 {
    let max_abs = x.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if max_abs == 0.0 {
        return 0.0;
    }
    match r {
        NormIndex::Infinite => max_abs,
        NormIndex::Finite(r) if r == 1.0 => x.iter().map(|v| v.abs()).sum(),
        NormIndex::Finite(r) if r == 2.0 => {
            let s: f64 = x.iter().map(|v| (v / max_abs) * (v / max_abs)).sum();
            max_abs * s.sqrt()
        }
        NormIndex::Finite(r) => {
            let s: f64 = x.iter().map(|v| (v.abs() / max_abs).powf(r)).sum();
            max_abs * s.powf(1.0 / r)
        }
    }
}
