//! Qubit communication in the Bloch parametrisation.
//!
//! States are Bloch vectors `n⃗` (`ρ = (𝕀 + n⃗·σ⃗)/2`) and effects are pairs
//! `(t, v⃗)` standing for `t𝕀 + v⃗·σ⃗`, so `Tr[ρπ] = t + v⃗·n⃗`. No 2×2 complex
//! matrix is ever formed.

pub mod noise;
pub mod nogo;
pub mod synth;

pub use noise::{
    error_functional, montecarlo_classical_floor, noise_advantage_region, ErrorReport,
    MonteCarloConfig, MonteCarloResult, NoisePoint,
};
pub use nogo::{projective_strategy, simulate_orthogonal_encoding, simulate_projective_decoding};
pub use synth::{
    aligned_trine_strategy, classical_embedding, h3_locus, h3_solution, LocusPoint, synth_h3_general, synth_h4_symmetric, synth_sic_strict, synth_uniform_odd,
    trine_strategy, H3Solution,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::VisitMatrix;

/// Slack on norms, positivity and completeness.
pub const QUBIT_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// A qubit state; pure iff the vector has unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector([f64; 3]);

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> Self {
        b.0
    }
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = [x, y, z];
        let n = norm(&v);
        if !n.is_finite() || n > 1.0 + QUBIT_TOL {
            return Err(invalid(format!("Bloch vector {v:?} has norm {n} > 1")));
        }
        Ok(Self(v))
    }

    pub fn maximally_mixed() -> Self {
        Self([0.0; 3])
    }

    /// Unit vector at polar angle `theta` from `+z` in the x–z plane.
    pub fn xz(theta: f64) -> Self {
        Self([theta.sin(), 0.0, theta.cos()])
    }

    pub fn as_array(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= QUBIT_TOL
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.map(|c| -c))
    }

    /// Depolarised copy, `(1 - ε) n⃗`.
    pub fn shrink(&self, eps: f64) -> Self {
        Self(self.0.map(|c| c * (1.0 - eps)))
    }
}

/// The operator `t𝕀 + v⃗·σ⃗`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEffect")]
pub struct QubitEffect {
    pub t: f64,
    pub v: [f64; 3],
}

#[derive(Deserialize)]
struct RawEffect {
    t: f64,
    v: [f64; 3],
}

impl TryFrom<RawEffect> for QubitEffect {
    type Error = Error;
    fn try_from(r: RawEffect) -> Result<Self> {
        Self::new(r.t, r.v)
    }
}

impl QubitEffect {
    /// Eigenvalues `t ± |v⃗|` must lie in `[0, 1]`.
    pub fn new(t: f64, v: [f64; 3]) -> Result<Self> {
        let n = norm(&v);
        if !t.is_finite() || !n.is_finite() || t < n - QUBIT_TOL || t + n > 1.0 + QUBIT_TOL {
            return Err(invalid(format!("effect (t = {t}, |v| = {n}) is not positive and ≤ 𝕀")));
        }
        Ok(Self { t, v })
    }

    /// `w·(𝕀 − n⃗·σ⃗)/2`: weight `w` on the state orthogonal to `n⃗`.
    pub fn anti(weight: f64, n: &BlochVector) -> Result<Self> {
        Self::new(weight / 2.0, n.as_array().map(|c| -c * weight / 2.0))
    }

    /// `w·(𝕀 + n⃗·σ⃗)/2`.
    pub fn along(weight: f64, n: &BlochVector) -> Result<Self> {
        Self::new(weight / 2.0, n.as_array().map(|c| c * weight / 2.0))
    }

    pub fn shrink(&self, eps: f64) -> Self {
        Self {
            t: self.t,
            v: self.v.map(|c| c * (1.0 - eps)),
        }
    }
}

/// `Tr[ρπ] = t + v⃗·n⃗`.
pub fn born_probability(state: &BlochVector, effect: &QubitEffect) -> f64 {
    effect.t + dot(&effect.v, state.as_array())
}

/// A measurement whose effects sum to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<QubitEffect>", into = "Vec<QubitEffect>")]
pub struct Povm(Vec<QubitEffect>);

impl TryFrom<Vec<QubitEffect>> for Povm {
    type Error = Error;
    fn try_from(v: Vec<QubitEffect>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Povm> for Vec<QubitEffect> {
    fn from(p: Povm) -> Self {
        p.0
    }
}

impl Povm {
    pub fn new(effects: Vec<QubitEffect>) -> Result<Self> {
        if effects.is_empty() {
            return Err(invalid("a POVM needs at least one effect"));
        }
        let t: f64 = effects.iter().map(|e| e.t).sum();
        let mut v = [0.0; 3];
        for e in &effects {
            for c in 0..3 {
                v[c] += e.v[c];
            }
        }
        if (t - 1.0).abs() > QUBIT_TOL || norm(&v) > QUBIT_TOL {
            return Err(invalid(format!(
                "effects sum to t = {t}, v = {v:?} instead of the identity"
            )));
        }
        Ok(Self(effects))
    }

    pub fn effects(&self) -> &[QubitEffect] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shrink(&self, eps: f64) -> Self {
        Self(self.0.iter().map(|e| e.shrink(eps)).collect())
    }
}

/// Depolarising strengths on Alice's preparation and Bob's measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    pub eps_e: f64,
    pub eps_d: f64,
}

impl Noise {
    pub fn new(eps_e: f64, eps_d: f64) -> Result<Self> {
        for (name, e) in [("eps_e", eps_e), ("eps_d", eps_d)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(invalid(format!("{name} = {e} outside [0,1]")));
            }
        }
        Ok(Self { eps_e, eps_d })
    }

    /// Two depolarisations in sequence.
    pub fn then(self, other: Noise) -> Noise {
        Noise {
            eps_e: 1.0 - (1.0 - self.eps_e) * (1.0 - other.eps_e),
            eps_d: 1.0 - (1.0 - self.eps_d) * (1.0 - other.eps_d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQubit")]
pub struct QubitStrategy {
    encodings: Vec<BlochVector>,
    decoding: Povm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<Noise>,
}

#[derive(Deserialize)]
struct RawQubit {
    encodings: Vec<BlochVector>,
    decoding: Povm,
    #[serde(default)]
    noise: Option<Noise>,
}

impl TryFrom<RawQubit> for QubitStrategy {
    type Error = Error;
    fn try_from(r: RawQubit) -> Result<Self> {
        let s = Self::new(r.encodings, r.decoding)?;
        match r.noise {
            Some(n) => s.with_noise(Noise::new(n.eps_e, n.eps_d)?),
            None => Ok(s),
        }
    }
}

impl QubitStrategy {
    pub fn new(encodings: Vec<BlochVector>, decoding: Povm) -> Result<Self> {
        if encodings.len() != decoding.len() {
            return Err(Error::DimensionMismatch {
                what: "POVM effects",
                expected: encodings.len(),
                found: decoding.len(),
            });
        }
        Ok(Self {
            encodings,
            decoding,
            noise: None,
        })
    }

    /// Declares depolarising noise applied when the strategy is played.
    pub fn with_noise(mut self, noise: Noise) -> Result<Self> {
        self.noise = Some(noise);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.encodings.len()
    }

    pub fn encodings(&self) -> &[BlochVector] {
        &self.encodings
    }

    pub fn decoding(&self) -> &Povm {
        &self.decoding
    }

    pub fn noise(&self) -> Option<Noise> {
        self.noise
    }

    /// The strategy actually played: declared noise folded into the vectors.
    pub fn effective(&self) -> QubitStrategy {
        match self.noise {
            None => self.clone(),
            Some(n) => QubitStrategy {
                encodings: self.encodings.iter().map(|e| e.shrink(n.eps_e)).collect(),
                decoding: self.decoding.shrink(n.eps_d),
                noise: None,
            },
        }
    }
}

/// `p(m|k) = Tr[ρ_k π_m]`, after any declared noise.
pub fn visit_matrix_qubit(s: &QubitStrategy) -> VisitMatrix {
    let e = s.effective();
    VisitMatrix::from_fn(e.n(), |m, k| {
        born_probability(&e.encodings[k], &e.decoding.effects()[m])
    })
    .expect("Born probabilities of a POVM form distributions")
}

/// Shrinks encodings by `1 - ε_e` and effect vectors by `1 - ε_d`, keeping
/// each effect's `t`.
pub fn apply_noise(s: &QubitStrategy, eps_e: f64, eps_d: f64) -> Result<QubitStrategy> {
    let n = Noise::new(eps_e, eps_d)?;
    Ok(QubitStrategy {
        encodings: s.encodings.iter().map(|e| e.shrink(n.eps_e)).collect(),
        decoding: s.decoding.shrink(n.eps_d),
        noise: s.noise,
    })
}
