use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{visit_matrix_qubit, BlochVector, Povm, QubitEffect, QubitStrategy};
use crate::classical::feasibility::{mixed_feasibility, mixed_strategy_from_certificate, MixedFeasibility};
use crate::classical::strategy::MixedStrategy;
use crate::error::{invalid, Error, Result};
use crate::game::{check_game, GameSpec};
use crate::optim::{safeguarded_newton, NelderMead};
use crate::tol::WIN_TOL;

fn strategy(encodings: Vec<BlochVector>, weights: &[f64]) -> Result<QubitStrategy> {
    let effects = encodings
        .iter()
        .zip(weights)
        .map(|(e, &w)| QubitEffect::anti(w, e))
        .collect::<Result<Vec<_>>>()?;
    QubitStrategy::new(encodings, Povm::new(effects)?)
}

/// Point `k` of `n` evenly spaced on the x–z great circle. Thirds of a turn
/// use exact coordinates (`cos 2π/3` is not `−½` in floating point), so the
/// trine's diagonal vanishes exactly.
fn circle_point(k: usize, n: usize) -> BlochVector {
    if (3 * k) % n == 0 {
        let h = 3f64.sqrt() / 2.0;
        let [x, z] = [[0.0, 1.0], [h, -0.5], [-h, -0.5]][(3 * k / n) % 3];
        BlochVector::new(x, 0.0, z).expect("unit")
    } else {
        BlochVector::xz(2.0 * PI * k as f64 / n as f64)
    }
}

/// `n` pure states evenly spaced on a great circle of the x–z plane, each
/// decoded by the effect `(𝕀 − n̂_k·σ⃗)/n` that never fires on it.
pub fn synth_uniform_odd(n: usize) -> Result<QubitStrategy> {
    if n < 3 || n % 2 == 0 {
        return Err(invalid(format!(
            "the symmetric qubit construction targets odd n >= 3, got {n}"
        )));
    }
    let enc = (0..n).map(|k| circle_point(k, n)).collect();
    strategy(enc, &vec![2.0 / n as f64; n])
}

/// The trine strategy for `H^3(1/3)`.
pub fn trine_strategy() -> QubitStrategy {
    synth_uniform_odd(3).expect("n = 3 is odd")
}

/// Trine encodings decoded by the effects `(𝕀 + n̂_x·σ⃗)/3` aligned with
/// them, for guessing `x` rather than avoiding it.
pub fn aligned_trine_strategy() -> QubitStrategy {
    let enc: Vec<BlochVector> = (0..3).map(|k| circle_point(k, 3)).collect();
    let effects = enc
        .iter()
        .map(|e| QubitEffect::along(2.0 / 3.0, e))
        .collect::<Result<Vec<_>>>()
        .expect("trine effects are valid");
    QubitStrategy::new(enc, Povm::new(effects).expect("trine sums to zero")).expect("valid")
}

/// Tetrahedron encodings decoded by the inverted tetrahedron; wins the
/// strict game `H^4[1/3]`.
pub fn synth_sic_strict() -> QubitStrategy {
    let s = 2.0 * 2f64.sqrt() / 3.0;
    let mut enc = vec![BlochVector::new(0.0, 0.0, 1.0).expect("unit")];
    for k in 0..3 {
        let phi = 2.0 * PI * k as f64 / 3.0;
        enc.push(BlochVector::new(s * phi.cos(), s * phi.sin(), -1.0 / 3.0).expect("unit"));
    }
    strategy(enc, &[0.5; 4]).expect("tetrahedron sums to zero")
}

/// Symmetric solution for `H^4(γ_1, (1-γ_1)/3, …)`: `ψ_1` on the pole and
/// the others on a cone of half-angle `θ` with `cos θ = −4γ_1/3`.
pub fn synth_h4_symmetric(gamma1: f64) -> Result<QubitStrategy> {
    if !(gamma1 > 0.0 && gamma1 <= 0.75) {
        return Err(invalid(format!(
            "symmetric qubit solution needs γ_1 in (0, 3/4], got {gamma1}"
        )));
    }
    let c = -4.0 * gamma1 / 3.0;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let a1 = -2.0 * c / (1.0 - c);
    let a = 2.0 / (3.0 * (1.0 - c));
    let mut enc = vec![BlochVector::new(0.0, 0.0, 1.0)?];
    for k in 0..3 {
        let phi = 2.0 * PI * k as f64 / 3.0;
        enc.push(BlochVector::new(s * phi.cos(), s * phi.sin(), c)?);
    }
    strategy(enc, &[a1, a, a, a])
}

/// A mixed strategy played with commuting (diagonal) states and effects:
/// encoding `z = 2α_k − 1`, effect `((r_m+q_m)/2, (r_m−q_m)/2 ẑ)`.
pub fn classical_embedding(s: &MixedStrategy) -> Result<QubitStrategy> {
    let enc = s
        .alpha()
        .iter()
        .map(|&a| BlochVector::new(0.0, 0.0, 2.0 * a - 1.0))
        .collect::<Result<Vec<_>>>()?;
    let eff = s
        .r()
        .as_slice()
        .iter()
        .zip(s.q().as_slice())
        .map(|(&r, &q)| QubitEffect::new((r + q) / 2.0, [0.0, 0.0, (r - q) / 2.0]))
        .collect::<Result<Vec<_>>>()?;
    QubitStrategy::new(enc, Povm::new(eff)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H3Solution {
    /// `None` when the game is classically winnable and embedded instead.
    pub theta: Option<(f64, f64)>,
    pub alpha: Option<[f64; 3]>,
    pub strategy: QubitStrategy,
}

/// Effect weights for `ψ_1 = ẑ`, `ψ_2 = (−sin θ_2, 0, cos θ_2)`,
/// `ψ_3 = (sin θ_3, 0, cos θ_3)` making `Σ α_k(𝕀 − ψ_k·σ⃗)/2 = 𝕀`.
pub fn h3_alphas(t2: f64, t3: f64) -> [f64; 3] {
    let (s2, s3) = (t2.sin(), t3.sin());
    let s = (t2 + t3).sin();
    let d = s - s2 - s3;
    [2.0 * s / d, -2.0 * s3 / d, -2.0 * s2 / d]
}

/// Marginals `γ_m = (1/3) Σ_k p(m|k)` of the three-state family.
pub fn h3_marginals(t2: f64, t3: f64) -> [f64; 3] {
    let (s2, s3, c2, c3) = (t2.sin(), t3.sin(), t2.cos(), t3.cos());
    let s = (t2 + t3).sin();
    let c = (t2 + t3).cos();
    let d = s - s2 - s3;
    [
        s * (2.0 - c2 - c3) / (3.0 * d),
        -s3 * (2.0 - c2 - c) / (3.0 * d),
        -s2 * (2.0 - c3 - c) / (3.0 * d),
    ]
}

fn h3_strategy(t2: f64, t3: f64) -> Result<QubitStrategy> {
    let enc = vec![BlochVector::xz(0.0), BlochVector::xz(-t2), BlochVector::xz(t3)];
    strategy(enc, &h3_alphas(t2, t3))
}

const EDGE: f64 = 1e-13;

/// `θ_3 ∈ (π − θ_2, π)` with `γ_1 = g1`; `γ_1` increases from 0 to
/// `(3 − cos θ_2)/6` along that interval.
fn inner_theta3(t2: f64, g1: f64) -> Option<f64> {
    let lo = (PI - t2).max(0.0) + EDGE;
    let hi = PI - EDGE;
    let f = |t3: f64| h3_marginals(t2, t3)[0] - g1;
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite()) || flo > 0.0 || fhi < 0.0 {
        return None;
    }
    Some(safeguarded_newton(f, lo, hi, 1e-16, 200))
}

fn quantum_h3(g1: f64, g2: f64) -> Result<(f64, f64)> {
    // Along the constant-γ_1 locus, γ_2 increases with θ_2.
    let t2min = if g1 > 1.0 / 3.0 { (3.0 - 6.0 * g1).acos() } else { 0.0 };
    let h = |t2: f64| match inner_theta3(t2, g1) {
        Some(t3) => h3_marginals(t2, t3)[1] - g2,
        None => -1.0,
    };
    let (mut lo, mut hi) = (t2min + EDGE, PI - EDGE);
    if h(lo) <= 0.0 && h(hi) >= 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t2 = 0.5 * (lo + hi);
        if let Some(t3) = inner_theta3(t2, g1) {
            return Ok((t2, t3));
        }
    }
    // Fallback: direct 2-d search with θ_2 + θ_3 > π.
    let loss = |x: &[f64]| {
        let (t2, t3) = (x[0], x[1]);
        if t2 <= 0.0 || t3 <= 0.0 || t2 >= PI || t3 >= PI || t2 + t3 <= PI {
            return f64::INFINITY;
        }
        let g = h3_marginals(t2, t3);
        (g[0] - g1).powi(2) + (g[1] - g2).powi(2)
    };
    let nm = NelderMead {
        max_evals: 20_000,
        ..Default::default()
    };
    let (x, v) = nm.minimize(loss, &[2.0 * PI / 3.0, 2.0 * PI / 3.0], 0.2);
    if v.sqrt() < 1e-11 {
        return Ok((x[0], x[1]));
    }
    Err(Error::NumericFailure {
        message: format!("no θ_2, θ_3 found for γ = ({g1}, {g2}, …)"),
        residual: v.sqrt(),
    })
}

/// Winning qubit strategy for any physical `H^3(γ)`.
///
/// Games on the boundary of the physical hexagon are classically winnable
/// and embedded as commuting qubit strategies; interior games are solved on
/// the three-state family by root finding.
pub fn h3_solution(spec: &GameSpec) -> Result<H3Solution> {
    if spec.n() != 3 {
        return Err(invalid(format!("expected a 3-Restaurant game, got n = {}", spec.n())));
    }
    let sol = if spec.is_strict() {
        let t = 2.0 * PI / 3.0;
        H3Solution {
            theta: Some((t, t)),
            alpha: Some([2.0 / 3.0; 3]),
            strategy: trine_strategy(),
        }
    } else if let MixedFeasibility::Feasible(c) = mixed_feasibility(spec)? {
        H3Solution {
            theta: None,
            alpha: None,
            strategy: classical_embedding(&mixed_strategy_from_certificate(&c, spec)?)?,
        }
    } else {
        let g = spec.gamma().as_slice();
        let (t2, t3) = quantum_h3(g[0], g[1])?;
        H3Solution {
            theta: Some((t2, t3)),
            alpha: Some(h3_alphas(t2, t3)),
            strategy: h3_strategy(t2, t3)?,
        }
    };
    let v = check_game(spec, &visit_matrix_qubit(&sol.strategy), WIN_TOL)?;
    if !v.wins {
        return Err(Error::NumericFailure {
            message: format!("qubit strategy misses {:?}", v.witness),
            residual: v.max_violation,
        });
    }
    Ok(sol)
}

pub fn synth_h3_general(spec: &GameSpec) -> Result<QubitStrategy> {
    Ok(h3_solution(spec)?.strategy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub gamma1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Midpoint of `ψ_2` and `ψ_3` in the x–z plane.
    pub mid_x: f64,
    pub mid_z: f64,
    /// The point's strategy re-checked against its own game.
    pub wins: bool,
}

/// Samples the family's constant-`γ_1` curve at `points` values of `θ_2`
/// spread over the open interval where `θ_3` exists.
pub fn h3_locus(gamma1: f64, points: usize) -> Result<Vec<LocusPoint>> {
    if !(gamma1 > 0.0 && gamma1 <= 2.0 / 3.0) {
        return Err(invalid(format!("γ_1 must lie in (0, 2/3], got {gamma1}")));
    }
    if points < 2 {
        return Err(invalid("a locus needs at least 2 points"));
    }
    let t2min = if gamma1 > 1.0 / 3.0 { (3.0 - 6.0 * gamma1).acos() } else { 0.0 };
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        // Interior nodes only: both ends are degenerate.
        let t2 = t2min + (PI - t2min) * (i + 1) as f64 / (points + 1) as f64;
        let Some(t3) = inner_theta3(t2, gamma1) else {
            continue;
        };
        let g = h3_marginals(t2, t3);
        let wins = h3_strategy(t2, t3)
            .and_then(|s| {
                let spec = GameSpec::non_strict(vec![gamma1, g[1], 1.0 - gamma1 - g[1]])?;
                check_game(&spec, &visit_matrix_qubit(&s), WIN_TOL)
            })
            .is_ok_and(|v| v.wins);
        out.push(LocusPoint {
            gamma1,
            theta2: t2,
            theta3: t3,
            gamma2: g[1],
            gamma3: g[2],
            mid_x: (t3.sin() - t2.sin()) / 2.0,
            mid_z: (t2.cos() + t3.cos()) / 2.0,
            wins,
        });
    }
    Ok(out)
}
