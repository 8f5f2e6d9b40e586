//! Regular-polygon toy theories.
//!
//! Vectors are 3-d with the last coordinate as normalisation: states have
//! `z = 1`, the unit effect is `u = (0, 0, 1)` and outcome probabilities are
//! Euclidean inner products.

pub mod search;
pub mod synth;

pub use search::{best_decoding, polygon_search, strict_polygon_infeasibility, PolygonSearchResult, SearchBudget};
pub use synth::{synth_even_gon, synth_square_h3, SquareFamily, SquareSolution};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::VisitMatrix;
use crate::prob::ProbVector;

pub const POLY_TOL: f64 = 1e-12;
pub const UNIT: [f64; 3] = [0.0, 0.0, 1.0];

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonTheory {
    n: usize,
    radius: f64,
    states: Vec<Vec3>,
    effects: Vec<Vec3>,
}

impl PolygonTheory {
    /// `P_ly(n)`: pure states `ω_i = (r cos 2πi/n, r sin 2πi/n, 1)` with
    /// `r = √sec(π/n)`, `i = 1..n` stored at index `i - 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("a polygon needs n >= 3, got {n}")));
        }
        let nf = n as f64;
        let radius = (1.0 / (PI / nf).cos()).sqrt();
        let states = (1..=n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / nf;
                [radius * a.cos(), radius * a.sin(), 1.0]
            })
            .collect();
        let effects = (1..=n)
            .map(|i| {
                if n % 2 == 1 {
                    let a = 2.0 * PI * i as f64 / nf;
                    let s = 1.0 + radius * radius;
                    [radius * a.cos() / s, radius * a.sin() / s, 1.0 / s]
                } else {
                    let a = (2 * i - 1) as f64 * PI / nf;
                    [radius * a.cos() / 2.0, radius * a.sin() / 2.0, 0.5]
                }
            })
            .collect();
        Ok(Self {
            n,
            radius,
            states,
            effects,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `ω_1..ω_n` (0-based storage).
    pub fn pure_states(&self) -> &[Vec3] {
        &self.states
    }

    /// `e_1..e_n` (0-based storage).
    pub fn effects(&self) -> &[Vec3] {
        &self.effects
    }

    /// `ē_i = u − e_i`.
    pub fn complement(&self, i: usize) -> Vec3 {
        let e = self.effects[i];
        [-e[0], -e[1], 1.0 - e[2]]
    }

    /// All extremal nonzero effects: `e_i`, `ē_i` and `u`.
    pub fn extremal_effects(&self) -> Vec<Vec3> {
        let mut v = self.effects.clone();
        v.extend((0..self.n).map(|i| self.complement(i)));
        v.push(UNIT);
        v
    }

    /// `e_i · ω_j` as rows `i`, columns `j`.
    pub fn probability_table(&self) -> Vec<Vec<f64>> {
        self.effects
            .iter()
            .map(|e| self.states.iter().map(|w| dot(e, w)).collect())
            .collect()
    }

    pub fn is_valid_effect(&self, e: &Vec3) -> bool {
        e.iter().all(|c| c.is_finite())
            && self.states.iter().all(|w| {
                let p = dot(e, w);
                (-POLY_TOL..=1.0 + POLY_TOL).contains(&p)
            })
    }

    /// Whether `(x, y, 1)` lies in the convex hull of the pure states.
    pub fn contains(&self, v: &Vec3) -> bool {
        if (v[2] - 1.0).abs() > POLY_TOL {
            return false;
        }
        (0..self.n).all(|k| {
            let a = self.states[k];
            let b = self.states[(k + 1) % self.n];
            (b[0] - a[0]) * (v[1] - a[1]) - (b[1] - a[1]) * (v[0] - a[0]) >= -POLY_TOL
        })
    }

    /// Boundary point at position `s ∈ [0, n)`: edge `⌊s⌋` from `ω` at index
    /// `⌊s⌋` towards the next vertex, convex parameter `s − ⌊s⌋`.
    pub fn boundary_point(&self, s: f64) -> Vec3 {
        let s = s.rem_euclid(self.n as f64);
        let k = (s.floor() as usize).min(self.n - 1);
        let t = s - k as f64;
        let a = self.states[k];
        let b = self.states[(k + 1) % self.n];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), 1.0]
    }

    /// Smallest probability any nonzero extremal effect assigns to `state`:
    /// zero exactly on the boundary.
    pub fn min_extremal_probability(&self, state: &Vec3) -> f64 {
        self.extremal_effects()
            .iter()
            .map(|e| dot(e, state))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reflection of `v` across the line through the origin at `angle`; the
/// last coordinate is kept.
pub fn mirror(v: &Vec3, angle: f64) -> Vec3 {
    let (c, s) = ((2.0 * angle).cos(), (2.0 * angle).sin());
    [c * v[0] + s * v[1], s * v[0] - c * v[1], v[2]]
}

pub fn build_theory(n: usize) -> Result<PolygonTheory> {
    PolygonTheory::new(n)
}

/// `effect · state`, refusing effects that are not valid in the theory.
pub fn effect_probability(theory: &PolygonTheory, state: &Vec3, effect: &Vec3) -> Result<f64> {
    if !theory.is_valid_effect(effect) {
        return Err(Error::ContractViolation(format!(
            "{effect:?} is not an effect of P_ly({})",
            theory.n
        )));
    }
    Ok(dot(state, effect))
}

/// One measurement outcome: `weight · effect`, then a visit distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingElement {
    pub weight: f64,
    pub effect: Vec3,
    pub visit: ProbVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct PolygonStrategy {
    /// Number of pure states of the theory.
    pub theory: usize,
    encodings: Vec<Vec3>,
    decoding: Vec<DecodingElement>,
}

#[derive(Deserialize)]
struct RawPolygon {
    theory: usize,
    encodings: Vec<Vec3>,
    decoding: Vec<DecodingElement>,
}

impl TryFrom<RawPolygon> for PolygonStrategy {
    type Error = Error;
    fn try_from(r: RawPolygon) -> Result<Self> {
        Self::new(r.theory, r.encodings, r.decoding)
    }
}

impl PolygonStrategy {
    pub fn new(theory: usize, encodings: Vec<Vec3>, decoding: Vec<DecodingElement>) -> Result<Self> {
        let th = PolygonTheory::new(theory)?;
        let n = encodings.len();
        if let Some(k) = encodings.iter().position(|v| !th.contains(v)) {
            return Err(invalid(format!(
                "encoding {} = {:?} is not a state of P_ly({theory})",
                k + 1,
                encodings[k]
            )));
        }
        let mut sum = [0.0; 3];
        for (o, d) in decoding.iter().enumerate() {
            if !(d.weight >= 0.0) || !th.is_valid_effect(&d.effect) {
                return Err(invalid(format!("decoding element {} is not a valid effect", o + 1)));
            }
            if d.visit.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "visit distribution",
                    expected: n,
                    found: d.visit.len(),
                });
            }
            for c in 0..3 {
                sum[c] += d.weight * d.effect[c];
            }
        }
        if (0..3).any(|c| (sum[c] - UNIT[c]).abs() > POLY_TOL) {
            return Err(invalid(format!("weighted effects sum to {sum:?}, not u")));
        }
        Ok(Self {
            theory,
            encodings,
            decoding,
        })
    }

    pub fn n(&self) -> usize {
        self.encodings.len()
    }

    pub fn encodings(&self) -> &[Vec3] {
        &self.encodings
    }

    pub fn decoding(&self) -> &[DecodingElement] {
        &self.decoding
    }
}

/// `p(m|k) = Σ_o w_o (e_o · s_k) visit_o(m)`.
pub fn visit_matrix_polygon(s: &PolygonStrategy) -> VisitMatrix {
    VisitMatrix::from_fn(s.n(), |m, k| {
        s.decoding
            .iter()
            .map(|d| d.weight * dot(&d.effect, &s.encodings[k]) * d.visit[m])
            .sum::<f64>()
            .max(0.0)
    })
    .expect("valid polygon strategies give distributions")
}
