//! The two-point zero-order oracle: query a function at `x ± hζ` under a
//! noise model and form a gradient estimate.
//!
//! With ℓ1-sphere randomization the estimate is `(d/2h)(y' - y'') sign(ζ)`,
//! which we store compactly as one scalar plus the sign bits. Every ℓr-norm
//! of such an estimate is `|scale| · d^(1/r)`, so the dual-norm accumulation
//! the adaptive schedules need costs O(1) per step. The dense ℓ2-sphere
//! estimate `(d/2h)(y' - y'')ζ°` is also provided as the comparison baseline.

use std::sync::Arc;

use crate::geometry::{lp_norm, NormIndex, ProblemDims};
use crate::rng::{RngStream, SignVec, SphereSample};
use crate::{Error, Result};

/// A loss function defined on all of `R^d` (queries may leave the feasible
/// set), together with its declared Lipschitz constant `L` w.r.t. the
/// ℓq-norm.
#[derive(Clone)]
pub struct Objective {
    kind: ObjectiveKind,
    lipschitz_l: f64,
    lipschitz_q: NormIndex,
}

#[derive(Clone)]
enum ObjectiveKind {
    Constant(f64),
    Linear(Vec<f64>),
    /// `‖x‖_r`
    LpNorm(NormIndex),
    /// `‖x - c‖_r`
    LpDistance { r: NormIndex, center: Vec<f64> },
    /// `‖x‖²₂` (Lipschitz only locally; the declared `L` is for the query region)
    SquaredL2,
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl Objective {
    pub fn constant(v: f64) -> Self {
        Objective { kind: ObjectiveKind::Constant(v), lipschitz_l: 0.0, lipschitz_q: NormIndex::TWO }
    }

    /// `f(x) = ⟨a, x⟩`, which is `‖a‖_{q*}`-Lipschitz w.r.t. ℓq.
    pub fn linear(a: Vec<f64>, q: NormIndex) -> Self {
        let l = lp_norm(&a, q.dual());
        Objective { kind: ObjectiveKind::Linear(a), lipschitz_l: l, lipschitz_q: q }
    }

    /// `f(x) = ‖x‖_r`, 1-Lipschitz w.r.t. ℓr.
    pub fn lp_norm(r: NormIndex) -> Self {
        Objective { kind: ObjectiveKind::LpNorm(r), lipschitz_l: 1.0, lipschitz_q: r }
    }

    /// `f(x) = ‖x - center‖_r`, 1-Lipschitz w.r.t. ℓr.
    pub fn lp_distance(r: NormIndex, center: Vec<f64>) -> Self {
        Objective {
            kind: ObjectiveKind::LpDistance { r, center },
            lipschitz_l: 1.0,
            lipschitz_q: r,
        }
    }

    /// `f(x) = ‖x‖²₂` with `L = 2·query_radius` valid on the ℓ2-ball of that
    /// radius around the origin.
    pub fn squared_l2(query_radius: f64) -> Self {
        Objective {
            kind: ObjectiveKind::SquaredL2,
            lipschitz_l: 2.0 * query_radius,
            lipschitz_q: NormIndex::TWO,
        }
    }

    pub fn custom(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        lipschitz_l: f64,
        lipschitz_q: NormIndex,
    ) -> Self {
        Objective { kind: ObjectiveKind::Custom(Arc::new(f)), lipschitz_l, lipschitz_q }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ObjectiveKind::Constant(v) => *v,
            ObjectiveKind::Linear(a) => a.iter().zip(x).map(|(ai, xi)| ai * xi).sum(),
            ObjectiveKind::LpNorm(r) => lp_norm(x, *r),
            ObjectiveKind::LpDistance { r, center } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(xi, ci)| xi - ci).collect();
                lp_norm(&diff, *r)
            }
            ObjectiveKind::SquaredL2 => x.iter().map(|v| v * v).sum(),
            ObjectiveKind::Custom(f) => f(x),
        }
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn lipschitz_q(&self) -> NormIndex {
        self.lipschitz_q
    }

    /// The gradient of the ℓ1-ball smoothed surrogate, where it is known in
    /// closed form: linear functions (the coefficients), `‖·‖²₂` (`2x`, the
    /// smoothing shift cancels by symmetry of the ball), and constants.
    pub fn analytic_smoothed_grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.kind {
            ObjectiveKind::Constant(_) => Some(vec![0.0; x.len()]),
            ObjectiveKind::Linear(a) => Some(a.clone()),
            ObjectiveKind::SquaredL2 => Some(x.iter().map(|v| 2.0 * v).collect()),
            _ => None,
        }
    }
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            ObjectiveKind::Constant(v) => format!("constant({v})"),
            ObjectiveKind::Linear(_) => "linear".into(),
            ObjectiveKind::LpNorm(r) => format!("lp_norm({})", r.value()),
            ObjectiveKind::LpDistance { r, .. } => format!("lp_distance({})", r.value()),
            ObjectiveKind::SquaredL2 => "squared_l2".into(),
            ObjectiveKind::Custom(_) => "custom".into(),
        };
        f.debug_struct("Objective")
            .field("kind", &kind)
            .field("lipschitz_l", &self.lipschitz_l)
            .field("lipschitz_q", &self.lipschitz_q)
            .finish()
    }
}

/// Noise attached to the two function evaluations of one round.
///
/// The noise stream is held inside the model and is distinct from the
/// randomization stream by construction, which enforces the independence
/// the adversarial analysis assumes.
#[derive(Debug, Clone)]
pub enum NoiseModel {
    /// ξ' = ξ'' realization-by-realization; the two-point difference erases
    /// the noise entirely. `sigma = 0` is the classical noiseless setting.
    Canceling { sigma: f64, rng: RngStream },
    /// i.i.d. draws from a bounded distribution on `[-σ, σ]` with mean
    /// offset `μ̂·σ`; second moment is at most σ² by construction.
    AdversarialIid { sigma: f64, mean_offset: f64, rng: RngStream },
    /// Deterministic worst-case bounded adversary: ξ' = +σ, ξ'' = -σ.
    AdversarialSignFlip { sigma: f64 },
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel::Canceling { sigma: 0.0, rng: RngStream::new(0) }
    }

    pub fn canceling(sigma: f64, rng: RngStream) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(NoiseModel::Canceling { sigma, rng })
    }

    pub fn adversarial_iid(sigma: f64, mean_offset: f64, rng: RngStream) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
        }
        if !(-1.0..=1.0).contains(&mean_offset) {
            return Err(Error::Domain(format!("mean offset must be in [-1, 1], got {mean_offset}")));
        }
        Ok(NoiseModel::AdversarialIid { sigma, mean_offset, rng })
    }

    pub fn adversarial_sign_flip(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(NoiseModel::AdversarialSignFlip { sigma })
    }

    pub fn sigma(&self) -> f64 {
        match self {
            NoiseModel::Canceling { sigma, .. }
            | NoiseModel::AdversarialIid { sigma, .. }
            | NoiseModel::AdversarialSignFlip { sigma } => *sigma,
        }
    }

    /// Whether the two noises of a round cancel in the query difference.
    pub fn is_canceling(&self) -> bool {
        matches!(self, NoiseModel::Canceling { .. })
    }

    /// The pair (ξ', ξ'') for one round.
    pub fn draw_pair(&mut self) -> (f64, f64) {
        match self {
            NoiseModel::Canceling { sigma, rng } => {
                if *sigma == 0.0 {
                    (0.0, 0.0)
                } else {
                    let xi = *sigma * (2.0 * rng.next_open01() - 1.0);
                    (xi, xi)
                }
            }
            NoiseModel::AdversarialIid { sigma, mean_offset, rng } => {
                if *sigma == 0.0 {
                    return (0.0, 0.0);
                }
                let lo = (*sigma * (*mean_offset - 1.0)).max(-*sigma);
                let hi = (*sigma * (*mean_offset + 1.0)).min(*sigma);
                let mut draw = || lo + (hi - lo) * rng.next_open01();
                (draw(), draw())
            }
            NoiseModel::AdversarialSignFlip { sigma } => (*sigma, -*sigma),
        }
    }
}

/// The compact ℓ1-randomized gradient estimate: `g_i = scale · signs_i` with
/// `scale = d(y' - y'')/(2h)`. One float plus d bits.
#[derive(Debug, Clone, PartialEq)]
pub struct GradEstimate {
    scale: f64,
    signs: SignVec,
}

impl GradEstimate {
    pub fn new(scale: f64, signs: SignVec) -> Self {
        GradEstimate { scale, signs }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn signs(&self) -> &SignVec {
        &self.signs
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// Materialize the dense vector. Only needed by tests and diagnostics;
    /// the run loop uses [`GradEstimate::subtract_from`] instead.
    pub fn dense(&self) -> Vec<f64> {
        self.signs.iter().map(|s| self.scale * s).collect()
    }

    /// Fused dual-state update `z ← z − g` without materializing `g`.
    pub fn subtract_from(&self, z: &mut [f64]) {
        debug_assert_eq!(z.len(), self.signs.len());
        for (i, zi) in z.iter_mut().enumerate() {
            *zi -= self.scale * self.signs.get(i);
        }
    }

    /// `‖g‖_r = |scale| · d^(1/r)` in O(1).
    pub fn norm(&self, r: NormIndex) -> f64 {
        self.scale.abs() * (self.dim() as f64).powf(r.recip())
    }

    /// `‖g‖²_{p*} = scale² · d^(2/p*)` in O(1), where `p*` is the Hölder
    /// conjugate of `p`.
    pub fn norm_sq_dual(&self, p: NormIndex) -> f64 {
        self.scale * self.scale * (self.dim() as f64).powf(2.0 * p.dual().recip())
    }
}

/// Query `f` at `x ± h·dir` under the noise model.
pub fn two_point_query_dir(
    f: &Objective,
    x: &[f64],
    h: f64,
    dir: &[f64],
    noise: &mut NoiseModel,
) -> Result<(f64, f64)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("query radius h must be positive, got {h}")));
    }
    if x.len() != dir.len() {
        return Err(Error::Dimension(format!(
            "point has length {}, direction has length {}",
            x.len(),
            dir.len()
        )));
    }
    let plus: Vec<f64> = x.iter().zip(dir).map(|(xi, zi)| xi + h * zi).collect();
    let minus: Vec<f64> = x.iter().zip(dir).map(|(xi, zi)| xi - h * zi).collect();
    let (xi1, xi2) = noise.draw_pair();
    let y1 = f.eval(&plus) + xi1;
    let y2 = f.eval(&minus) + xi2;
    if !y1.is_finite() || !y2.is_finite() {
        return Err(Error::Domain("objective evaluation produced a non-finite value".into()));
    }
    Ok((y1, y2))
}

/// Query `f` at `x ± hζ` for an ℓ1-sphere sample ζ.
pub fn two_point_query(
    f: &Objective,
    x: &[f64],
    h: f64,
    zeta: &SphereSample,
    noise: &mut NoiseModel,
) -> Result<(f64, f64)> {
    two_point_query_dir(f, x, h, &zeta.zeta, noise)
}

/// Form the compact ℓ1 gradient estimate from the two query values.
pub fn l1_gradient(y1: f64, y2: f64, h: f64, zeta: &SphereSample) -> Result<GradEstimate> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("query radius h must be positive, got {h}")));
    }
    let d = zeta.dim() as f64;
    Ok(GradEstimate::new(d * (y1 - y2) / (2.0 * h), zeta.signs.clone()))
}

/// The dense ℓ2-randomized baseline estimate `(d/2h)(y' - y'')·ζ°`.
pub fn l2_gradient(y1: f64, y2: f64, h: f64, zeta_circ: &[f64]) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("query radius h must be positive, got {h}")));
    }
    let norm = zeta_circ.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("direction must lie on the unit ℓ2-sphere, ‖ζ°‖₂ = {norm}")));
    }
    let d = zeta_circ.len() as f64;
    let scale = d * (y1 - y2) / (2.0 * h);
    Ok(zeta_circ.iter().map(|v| scale * v).collect())
}

/// `‖g‖²_{p*}` of a compact estimate in O(1); see [`GradEstimate::norm_sq_dual`].
pub fn grad_norm_sq_dual(g: &GradEstimate, p: NormIndex) -> f64 {
    g.norm_sq_dual(p)
}

/// The second-moment bound `12(1+√2)²L²·d^(1+2/(q∧2)-2/p)` on `E‖g‖²_{p*}`,
/// plus `d^(4-2/p)σ²/h²` when `adversarial = Some((σ, h))`.
pub fn grad_norm_sq_bound(dims: &ProblemDims, l: f64, adversarial: Option<(f64, f64)>) -> f64 {
    let c = 12.0 * (1.0 + std::f64::consts::SQRT_2).powi(2);
    let base = c * l * l * dims.variance_dim_factor();
    match adversarial {
        Some((sigma, h)) => base + dims.noise_dim_factor() * sigma * sigma / (h * h),
        None => base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_l1_sphere;
    use approx::assert_relative_eq;

    fn sphere(d: usize, seed: u64) -> SphereSample {
        let mut rng = RngStream::new(seed);
        sample_l1_sphere(d, &mut rng)
    }

    #[test]
    fn constant_objective_cancels() {
        let f = Objective::constant(5.0);
        let zeta = sphere(4, 1);
        let mut noise = NoiseModel::canceling(0.7, RngStream::new(2)).unwrap();
        for _ in 0..20 {
            let (y1, y2) = two_point_query(&f, &[0.0; 4], 0.3, &zeta, &mut noise).unwrap();
            assert_eq!(y1 - y2, 0.0);
        }
    }

    #[test]
    fn linear_objective_difference() {
        let a = vec![1.0, -2.0, 0.5];
        let f = Objective::linear(a.clone(), NormIndex::TWO);
        let zeta = sphere(3, 3);
        let mut noise = NoiseModel::noiseless();
        let h = 0.25;
        let (y1, y2) = two_point_query(&f, &[0.1, 0.2, 0.3], h, &zeta, &mut noise).unwrap();
        let dot: f64 = a.iter().zip(&zeta.zeta).map(|(ai, zi)| ai * zi).sum();
        assert_relative_eq!(y1 - y2, 2.0 * h * dot, epsilon = 1e-12);
    }

    #[test]
    fn sign_flip_noise_by_construction() {
        let f = Objective::constant(0.0);
        let zeta = sphere(2, 4);
        let mut noise = NoiseModel::adversarial_sign_flip(1.0).unwrap();
        let (y1, y2) = two_point_query(&f, &[0.0, 0.0], 1.0, &zeta, &mut noise).unwrap();
        assert_eq!((y1, y2), (1.0, -1.0));
    }

    #[test]
    fn adversarial_iid_stays_bounded_with_offset_mean() {
        let sigma = 0.4;
        let mut noise =
            NoiseModel::adversarial_iid(sigma, 0.3, RngStream::new(5)).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let n = 50_000;
        for _ in 0..n {
            let (a, b) = noise.draw_pair();
            for xi in [a, b] {
                assert!(xi.abs() <= sigma);
                sum += xi;
                sum_sq += xi * xi;
            }
        }
        let mean = sum / (2 * n) as f64;
        // mean of U[-0.7σ, σ] is 0.15σ
        assert!((mean - 0.15 * sigma).abs() < 0.01 * sigma, "mean = {mean}");
        assert!(sum_sq / (2 * n) as f64 <= sigma * sigma);
    }

    #[test]
    fn zero_difference_gives_zero_estimate() {
        let zeta = sphere(6, 7);
        let g = l1_gradient(2.5, 2.5, 0.1, &zeta).unwrap();
        assert_eq!(g.scale(), 0.0);
        assert!(g.dense().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn l1_gradient_norm_identity_example() {
        // d = 4, h = 0.5, y1 - y2 = 1 ⇒ scale = 4, ‖g‖₂ = 4·√4 = 8
        let zeta = sphere(4, 8);
        let g = l1_gradient(1.0, 0.0, 0.5, &zeta).unwrap();
        assert_relative_eq!(g.scale(), 4.0, epsilon = 1e-15);
        assert_relative_eq!(g.norm(NormIndex::TWO), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn norm_sq_dual_examples() {
        let zeta = sphere(4, 9);
        let zero = GradEstimate::new(0.0, zeta.signs.clone());
        assert_eq!(zero.norm_sq_dual(NormIndex::ONE), 0.0);
        let g = GradEstimate::new(2.0, zeta.signs.clone());
        // p = 1 ⇒ p* = ∞ ⇒ scale² · d⁰ = 4
        assert_relative_eq!(g.norm_sq_dual(NormIndex::ONE), 4.0, epsilon = 1e-12);
        // p = 2 ⇒ p* = 2 ⇒ scale² · d = 16
        assert_relative_eq!(g.norm_sq_dual(NormIndex::TWO), 16.0, epsilon = 1e-12);
    }

    #[test]
    fn compact_and_dense_norms_agree() {
        let mut rng = RngStream::new(10);
        for _ in 0..200 {
            let d = 1 + (rng.next_open01() * 100.0) as usize;
            let zeta = {
                let mut r = RngStream::with_stream(11, d as u64);
                sample_l1_sphere(d, &mut r)
            };
            let scale = 10.0 * (rng.next_open01() - 0.5);
            let g = GradEstimate::new(scale, zeta.signs.clone());
            let dense = g.dense();
            for r in [NormIndex::ONE, NormIndex::TWO, NormIndex::Finite(4.0), NormIndex::INF] {
                let direct = lp_norm(&dense, r);
                assert_relative_eq!(g.norm(r), direct, max_relative = 1e-12);
                let p = r.dual(); // so that p* = r
                assert_relative_eq!(g.norm_sq_dual(p), direct * direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn subtract_from_matches_dense_subtraction() {
        let zeta = sphere(130, 12);
        let g = GradEstimate::new(-1.75, zeta.signs.clone());
        let mut z = vec![0.5; 130];
        g.subtract_from(&mut z);
        let dense = g.dense();
        for (i, zi) in z.iter().enumerate() {
            assert_eq!(*zi, 0.5 - dense[i]);
        }
    }

    #[test]
    fn canceling_noise_h_independence_on_linear() {
        let f = Objective::linear(vec![0.3, -1.1, 2.0], NormIndex::TWO);
        let x = [0.4, 0.0, -0.2];
        let zeta = sphere(3, 13);
        for h in [0.5, 0.05] {
            let mut n1 = NoiseModel::canceling(0.9, RngStream::new(14)).unwrap();
            let (y1, y2) = two_point_query(&f, &x, h, &zeta, &mut n1).unwrap();
            let g_h = l1_gradient(y1, y2, h, &zeta).unwrap();
            let mut n2 = NoiseModel::canceling(0.9, RngStream::new(15)).unwrap();
            let (w1, w2) = two_point_query(&f, &x, h / 10.0, &zeta, &mut n2).unwrap();
            let g_small = l1_gradient(w1, w2, h / 10.0, &zeta).unwrap();
            assert!((g_h.scale() - g_small.scale()).abs() <= 1e-9);
        }
    }

    #[test]
    fn l2_gradient_examples() {
        let z = vec![1.0, 0.0];
        assert_eq!(l2_gradient(1.0, 1.0, 0.5, &z).unwrap(), vec![0.0, 0.0]);
        assert_eq!(l2_gradient(2.0, 0.0, 1.0, &z).unwrap(), vec![2.0, 0.0]);
        let g = l2_gradient(0.7, 0.1, 0.3, &z).unwrap();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(norm, 2.0 * 0.6 / 0.6, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let zeta = sphere(2, 16);
        assert!(l1_gradient(1.0, 0.0, 0.0, &zeta).is_err());
        assert!(l1_gradient(1.0, 0.0, -1.0, &zeta).is_err());
        assert!(l2_gradient(1.0, 0.0, 1.0, &[0.5, 0.5]).is_err()); // not unit norm
        let f = Objective::constant(1.0);
        let mut noise = NoiseModel::noiseless();
        assert!(two_point_query(&f, &[0.0, 0.0], 0.0, &zeta, &mut noise).is_err());
        assert!(two_point_query(&f, &[0.0], 1.0, &zeta, &mut noise).is_err());
    }

    #[test]
    fn non_finite_evaluation_is_reported() {
        let f = Objective::custom(|_| f64::NAN, 1.0, NormIndex::TWO);
        let zeta = sphere(2, 17);
        let mut noise = NoiseModel::noiseless();
        assert!(two_point_query(&f, &[0.0, 0.0], 0.5, &zeta, &mut noise).is_err());
    }

    #[test]
    fn lipschitz_spot_check() {
        // |f(x) - f(y)| <= L ‖x - y‖_q on random pairs, for each builtin.
        let mut rng = RngStream::new(18);
        let d = 5;
        let objectives = vec![
            Objective::linear(vec![0.5, -1.0, 2.0, 0.0, 0.25], NormIndex::ONE),
            Objective::lp_norm(NormIndex::TWO),
            Objective::lp_norm(NormIndex::INF),
            Objective::lp_distance(NormIndex::ONE, vec![0.1; 5]),
        ];
        for f in &objectives {
            for _ in 0..200 {
                let x: Vec<f64> = (0..d).map(|_| 4.0 * rng.next_open01() - 2.0).collect();
                let y: Vec<f64> = (0..d).map(|_| 4.0 * rng.next_open01() - 2.0).collect();
                let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                let lhs = (f.eval(&x) - f.eval(&y)).abs();
                let rhs = f.lipschitz_l() * lp_norm(&diff, f.lipschitz_q());
                assert!(lhs <= rhs + 1e-12, "{f:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn variance_bound_arithmetic() {
        let dims = ProblemDims::new(10, NormIndex::ONE, NormIndex::ONE).unwrap();
        let c = 12.0 * (1.0 + std::f64::consts::SQRT_2).powi(2);
        assert_relative_eq!(grad_norm_sq_bound(&dims, 1.0, None), c * 1e3, max_relative = 1e-12);
        // adversarial adds d^{4-2/p} σ²/h² = 100 · 0.01 / 0.25 = 4
        assert_relative_eq!(
            grad_norm_sq_bound(&dims, 1.0, Some((0.1, 0.5))),
            c * 1e3 + 4.0,
            max_relative = 1e-12
        );
    }
}
