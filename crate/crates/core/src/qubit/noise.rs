//! Noise robustness of `H^3(1/3)`: the advantage region and the classical
//! error floor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::strategy::MixedStrategy;
use crate::error::{invalid, Result};
use crate::game::VisitMatrix;
use crate::optim::{stream_rng, uniform_simplex};
use crate::prob::ProbVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub value: f64,
    /// `p(i|i)`.
    pub diagonal: Vec<f64>,
    /// `γ_i = (1/3) Σ_j p(i|j)`.
    pub marginals: Vec<f64>,
    /// `(γ_i − 1/3)²`.
    pub marginal_penalty: Vec<f64>,
}

/// `𝓔 = (1/3) Σ_i [p(i|i) + (γ_i − 1/3)²]`; zero exactly on winning
/// matrices of `H^3(1/3)`.
pub fn error_functional(vm: &VisitMatrix) -> Result<ErrorReport> {
    if vm.n() != 3 {
        return Err(invalid(format!("error functional is defined for n = 3, got {}", vm.n())));
    }
    let diagonal = vm.diagonal();
    let marginals = vm.marginals();
    let marginal_penalty: Vec<f64> = marginals.iter().map(|g| (g - 1.0 / 3.0).powi(2)).collect();
    let value = diagonal
        .iter()
        .zip(&marginal_penalty)
        .map(|(d, m)| d + m)
        .sum::<f64>()
        / 3.0;
    Ok(ErrorReport {
        value,
        diagonal,
        marginals,
        marginal_penalty,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub eps_e: f64,
    pub eps_d: f64,
    /// `ε_e + ε_d − ε_e ε_d = 3 p(k|k)` for the noisy trine.
    pub boundary_value: f64,
    /// Whether every `p(k|k)` stays below 1/6.
    pub advantage: bool,
}

pub fn noise_advantage_region(resolution: usize) -> Result<Vec<NoisePoint>> {
    if resolution < 2 {
        return Err(invalid("noise grid needs resolution >= 2"));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let (e, d) = (i as f64 * step, j as f64 * step);
            let b = e + d - e * d;
            out.push(NoisePoint {
                eps_e: e,
                eps_d: d,
                boundary_value: b,
                advantage: b < 0.5,
            });
        }
    }
    Ok(out)
}

/// Seven free parameters: `α_1..α_3`, `r_1, r_2`, `q_1, q_2`.
type Params = [f64; 7];

fn error_of(x: &Params) -> f64 {
    let r = [x[3], x[4], 1.0 - x[3] - x[4]];
    let q = [x[5], x[6], 1.0 - x[5] - x[6]];
    let mut diag = 0.0;
    let mut pen = 0.0;
    for i in 0..3 {
        let mut g = 0.0;
        for j in 0..3 {
            let p = x[j] * r[i] + (1.0 - x[j]) * q[i];
            g += p;
            if i == j {
                diag += p;
            }
        }
        pen += (g / 3.0 - 1.0 / 3.0).powi(2);
    }
    (diag + pen) / 3.0
}

fn feasible(x: &Params) -> bool {
    x.iter().all(|v| (0.0..=1.0).contains(v)) && x[3] + x[4] <= 1.0 && x[5] + x[6] <= 1.0
}

fn to_mixed(x: &Params) -> MixedStrategy {
    let pv = |a: f64, b: f64| ProbVector::normalized(vec![a, b, (1.0 - a - b).max(0.0)]).expect("simplex point");
    MixedStrategy::new(x[..3].to_vec(), pv(x[3], x[4]), pv(x[5], x[6])).expect("box-feasible parameters")
}

/// Coordinate descent with a halving step; coin coordinates trade mass with
/// the implicit third face.
fn refine(mut x: Params, step0: f64) -> (f64, Params) {
    let mut f = error_of(&x);
    let mut step = step0;
    while step > 1e-13 {
        let mut improved = false;
        for c in 0..7 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[c] += dir * step;
                if !feasible(&y) {
                    continue;
                }
                let fy = error_of(&y);
                if fy < f {
                    x = y;
                    f = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (f, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub seed: u64,
    /// Best raw samples handed to local refinement.
    pub refine_top: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0x5eed_0002,
            refine_top: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub samples: usize,
    pub raw_min_error: f64,
    pub raw_argmin: MixedStrategy,
    pub min_error: f64,
    pub argmin: MixedStrategy,
}

/// Fixed chunking: each chunk is its own random stream, so the outcome does
/// not depend on how chunks are spread over threads.
const CHUNK: usize = 4096;

fn ordered(a: &(f64, usize, Params), b: &(f64, usize, Params)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Uniform sampling of classical mixed strategies for `H^3(1/3)` followed by
/// refinement of the best samples.
pub fn montecarlo_classical_floor(cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    if cfg.samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let top = cfg.refine_top.max(1);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let mut best: Vec<(f64, usize, Params)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(cfg.seed, c as u64);
            let start = c * CHUNK;
            let end = (start + CHUNK).min(cfg.samples);
            let mut local: Vec<(f64, usize, Params)> = Vec::with_capacity(end - start);
            for i in start..end {
                let a: [f64; 3] = std::array::from_fn(|_| rand::Rng::random(&mut rng));
                let r = uniform_simplex(&mut rng, 3);
                let q = uniform_simplex(&mut rng, 3);
                let x = [a[0], a[1], a[2], r[0], r[1], q[0], q[1]];
                local.push((error_of(&x), i, x));
            }
            local.sort_by(ordered);
            local.truncate(top);
            local
        })
        .reduce(Vec::new, |mut a, b| {
            a.extend(b);
            a.sort_by(ordered);
            a.truncate(top);
            a
        });
    best.sort_by(ordered);
    let raw = best[0];
    let refined = best
        .par_iter()
        .map(|&(_, i, x)| {
            let (f, y) = refine(x, 0.05);
            (f, i, y)
        })
        .min_by(ordered)
        .expect("nonempty");
    Ok(MonteCarloResult {
        samples: cfg.samples,
        raw_min_error: raw.0,
        raw_argmin: to_mixed(&raw.2),
        min_error: refined.0,
        argmin: to_mixed(&refined.2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::strategy::visit_matrix_mixed;

    #[test]
    fn error_of_matches_report() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..100 {
            let a: [f64; 3] = std::array::from_fn(|_| rand::Rng::random(&mut rng));
            let r = uniform_simplex(&mut rng, 3);
            let q = uniform_simplex(&mut rng, 3);
            let x = [a[0], a[1], a[2], r[0], r[1], q[0], q[1]];
            let rep = error_functional(&visit_matrix_mixed(&to_mixed(&x))).unwrap();
            assert!((rep.value - error_of(&x)).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_matrix_error_is_one() {
        let id = VisitMatrix::from_fn(3, |i, j| (i == j) as u8 as f64).unwrap();
        assert!((error_functional(&id).unwrap().value - 1.0).abs() < 1e-15);
        assert!(error_functional(&VisitMatrix::strict_target(4)).is_err());
    }

    #[test]
    fn single_sample_is_unrefined_value() {
        let cfg = MonteCarloConfig {
            samples: 1,
            seed: 9,
            refine_top: 1,
        };
        let r = montecarlo_classical_floor(&cfg).unwrap();
        let v = error_functional(&visit_matrix_mixed(&r.raw_argmin)).unwrap().value;
        assert!((r.raw_min_error - v).abs() < 1e-14);
        assert!(r.min_error <= r.raw_min_error);
    }

    #[test]
    fn grid_endpoints() {
        let g = noise_advantage_region(3).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g[0].advantage);
        let half = g.iter().find(|p| p.eps_e == 0.5 && p.eps_d == 0.0).unwrap();
        assert_eq!(half.boundary_value, 0.5);
        assert!(!half.advantage);
        assert!(noise_advantage_region(1).is_err());
    }
}
