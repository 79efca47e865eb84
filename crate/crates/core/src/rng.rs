//! Seedable random streams and the samplers the estimator needs: Laplace
//! scalars by inverse transform, uniform points on the ℓ1-sphere and
//! ℓ1-ball (normalized i.i.d. Laplace vectors), and uniform points on the
//! ℓ2-sphere (normalized Gaussians).
//!
//! Streams are ChaCha8 with an explicit 64-bit stream id, so parallel
//! trials can hold independent, individually reproducible generators
//! derived from one master seed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Name of the underlying generator, recorded in output files so runs are
/// auditable.
pub const GENERATOR_NAME: &str = "chacha8";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a list of ids (trial index, estimator index, purpose tag, ...) into a
/// single stream id. Pure; the same parts always give the same stream.
pub fn derive_stream(parts: &[u64]) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3; // arbitrary odd constant
    for &p in parts {
        let mut s = h ^ p;
        h = splitmix64(&mut s);
    }
    h
}

/// A deterministic stream of uniforms in the open interval (0, 1).
///
/// Identical `(seed, stream)` pairs reproduce the exact same sequence;
/// distinct stream ids under one seed are independent.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// The master seed this stream was built from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream id within the seed.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform real strictly inside (0, 1). The endpoint 0 is rejected so
    /// inverse transforms never take `log(0)`; 1 is unreachable by
    /// construction (53-bit mantissa of a value in [0, 1)).
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }
}

/// Packed ±1 signs, one bit per coordinate (set bit = negative). This is the
/// "d bits" half of the compact gradient representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVec {
    words: Vec<u64>,
    len: usize,
}

impl SignVec {
    /// Component-wise signs of `x` with the convention `sign(0) = +1`
    /// (note `-0.0 >= 0.0` in IEEE, so negative zero also maps to +1).
    pub fn from_values(x: &[f64]) -> Self {
        let mut words = vec![0u64; x.len().div_ceil(64)];
        for (i, &v) in x.iter().enumerate() {
            if v < 0.0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        SignVec { words, len: x.len() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The sign at coordinate `i` as ±1.0.
    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.len);
        if self.words[i / 64] >> (i % 64) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// A point ζ on the ℓ1-sphere together with its precomputed sign bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSample {
    pub zeta: Vec<f64>,
    pub signs: SignVec,
}

impl SphereSample {
    pub fn dim(&self) -> usize {
        self.zeta.len()
    }
}

/// Quantile of the centered, scale-1 Laplace distribution:
/// `log(2u)` for `u < 1/2`, `-log(2(1-u))` otherwise.
pub fn laplace_inverse(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("laplace_inverse needs u in (0,1), got {u}")));
    }
    if u < 0.5 {
        Ok((2.0 * u).ln())
    } else {
        Ok(-(2.0 * (1.0 - u)).ln())
    }
}

/// Uniform sample on the ℓ1-sphere: d i.i.d. Laplace draws normalized by
/// their ℓ1-norm (Schechtman–Zinn construction).
pub fn sample_l1_sphere(d: usize, rng: &mut RngStream) -> SphereSample {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let mut w = Vec::with_capacity(d);
        let mut norm = 0.0;
        for _ in 0..d {
            let v = laplace_inverse(rng.next_open01()).expect("open01 is in (0,1)");
            norm += v.abs();
            w.push(v);
        }
        if norm == 0.0 {
            continue; // degenerate draw; probability zero
        }
        for v in &mut w {
            *v /= norm;
        }
        let signs = SignVec::from_values(&w);
        return SphereSample { zeta: w, signs };
    }
}

/// Uniform sample in the open ℓ1-ball: d+1 i.i.d. Laplace draws, first d
/// coordinates divided by the ℓ1-norm of all d+1.
pub fn sample_l1_ball(d: usize, rng: &mut RngStream) -> Vec<f64> {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let mut w = Vec::with_capacity(d + 1);
        let mut norm = 0.0;
        for _ in 0..=d {
            let v = laplace_inverse(rng.next_open01()).expect("open01 is in (0,1)");
            norm += v.abs();
            w.push(v);
        }
        if norm == 0.0 {
            continue;
        }
        w.truncate(d);
        for v in &mut w {
            *v /= norm;
        }
        return w;
    }
}

/// Uniform sample on the ℓ2-sphere: standard Gaussians (Box–Muller)
/// normalized by their ℓ2-norm.
pub fn sample_l2_sphere(d: usize, rng: &mut RngStream) -> Vec<f64> {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let mut g = Vec::with_capacity(d + 1);
        while g.len() < d {
            let u1 = rng.next_open01();
            let u2 = rng.next_open01();
            let radius = (-2.0 * u1.ln()).sqrt();
            let angle = 2.0 * std::f64::consts::PI * u2;
            g.push(radius * angle.cos());
            g.push(radius * angle.sin());
        }
        g.truncate(d);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            continue;
        }
        for v in &mut g {
            *v /= norm;
        }
        return g;
    }
}
