//! Worst-case guessing: Alice holds `x ∈ {1,2,3}`, Bob must output `b = x`,
//! scored by `min_x P(b=x|x)`.
//!
//! Correlations reuse the visit-matrix routines, with "visited" read as Bob's
//! guess and "closed" as Alice's input.

use serde::{Deserialize, Serialize};

use crate::classical::strategy::{
    visit_matrix_correlated, visit_matrix_mixed, CorrelatedStrategy, MixedStrategy,
};
use crate::error::{invalid, Result};
use crate::game::VisitMatrix;
use crate::optim::{stream_rng, NelderMead};
use crate::prob::ProbVector;
use crate::qubit::{visit_matrix_qubit, QubitStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "strategy", rename_all = "kebab-case")]
pub enum GuessStrategy {
    ClassicalMixed(MixedStrategy),
    ClassicalCorrelated(CorrelatedStrategy),
    Quantum(QubitStrategy),
}

impl GuessStrategy {
    /// `P(b|x)` as a visit matrix: `get(b, x)`.
    pub fn correlation(&self) -> VisitMatrix {
        match self {
            GuessStrategy::ClassicalMixed(s) => visit_matrix_mixed(s),
            GuessStrategy::ClassicalCorrelated(s) => visit_matrix_correlated(s),
            GuessStrategy::Quantum(s) => visit_matrix_qubit(s),
        }
    }
}

/// `min_x P(b=x|x)`.
pub fn worst_case_success(s: &GuessStrategy) -> f64 {
    min_diagonal(&s.correlation())
}

pub fn min_diagonal(m: &VisitMatrix) -> f64 {
    m.diagonal().into_iter().fold(f64::INFINITY, f64::min)
}

/// `α = (1,0,0)`, `r = e_1`, `q = (0, ½, ½)`.
pub fn classical_guess_strategy() -> MixedStrategy {
    MixedStrategy::new(
        vec![1.0, 0.0, 0.0],
        ProbVector::point(3, 0),
        ProbVector::uniform_on(3, &[1, 2]),
    )
    .expect("valid")
}

/// Uniform mixture over `k`: send 0 iff `x = k`; on 0 guess `k`, on 1 guess
/// uniformly among the other two.
pub fn sr_guess_strategy() -> CorrelatedStrategy {
    let branches = (0..3)
        .map(|k| {
            let alpha = (0..3).map(|x| (x == k) as u8 as f64).collect();
            let others: Vec<usize> = (0..3).filter(|&x| x != k).collect();
            let s = MixedStrategy::new(alpha, ProbVector::point(3, k), ProbVector::uniform_on(3, &others))
                .expect("valid");
            (1.0 / 3.0, s)
        })
        .collect();
    CorrelatedStrategy::new(branches).expect("weights sum to one")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseBound {
    pub n: usize,
    /// Analytic supremum over one-bit mixed strategies.
    pub bound: f64,
    /// Largest value found numerically; must not exceed `bound`.
    pub numeric_max: f64,
    pub argmax: MixedStrategy,
    pub grid_points: usize,
}

/// The `n = 3` bound.
pub fn classical_worstcase_bound() -> WorstCaseBound {
    worstcase_bound(3).expect("n = 3 is supported")
}

/// Supremum of `min_x P(b=x|x)` over one-bit mixed strategies, `n ∈ {2, 3}`.
///
/// `P(b=x|x) = α_x r_x + (1−α_x) q_x <= max(r_x, q_x)`, and since `r`, `q`
/// each exceed ½ on at most one `x`, for `n >= 3` some `x` is stuck at `<= ½`.
/// For `n = 2` one bit names `x`. The numeric side maximises
/// `min_x max(r_x, q_x)` over a simplex grid (bang-bang `α` is optimal for
/// fixed `r, q`) and polishes with Nelder–Mead over all of `(α, r, q)`.
pub fn worstcase_bound(n: usize) -> Result<WorstCaseBound> {
    if !(2..=3).contains(&n) {
        return Err(invalid(format!("guessing bound implemented for n = 2, 3, got {n}")));
    }
    let bound = if n >= 3 { 0.5 } else { 1.0 };
    const STEPS: usize = 60;
    let grid = simplex_grid(n, STEPS);
    let mut best = (-1.0, 0usize, 0usize);
    for (i, r) in grid.iter().enumerate() {
        for (j, q) in grid.iter().enumerate() {
            let v = (0..n).map(|x| r[x].max(q[x])).fold(f64::INFINITY, f64::min);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let (r, q) = (&grid[best.1], &grid[best.2]);
    let alpha: Vec<f64> = (0..n).map(|x| (r[x] >= q[x]) as u8 as f64).collect();
    let mut argmax = MixedStrategy::new(alpha, ProbVector::new(r.clone())?, ProbVector::new(q.clone())?)?;
    let mut numeric_max = min_diagonal(&visit_matrix_mixed(&argmax));

    // Continuous polish from random starts, parametrised through |·| and
    // normalisation so every point is a valid strategy.
    let nm = NelderMead {
        max_evals: 2000,
        ftol: 1e-15,
        xtol: 1e-12,
    };
    for start in 0..64u64 {
        let mut rng = stream_rng(0x5eed_0004, start);
        let x0: Vec<f64> = (0..3 * n).map(|_| rand::Rng::random::<f64>(&mut rng) + 0.01).collect();
        let (x, _) = nm.minimize(|x| -min_diagonal(&visit_matrix_mixed(&decode(n, x))), &x0, 0.1);
        let s = decode(n, &x);
        let v = min_diagonal(&visit_matrix_mixed(&s));
        if v > numeric_max {
            numeric_max = v;
            argmax = s;
        }
    }
    Ok(WorstCaseBound {
        n,
        bound,
        numeric_max,
        argmax,
        grid_points: grid.len() * grid.len(),
    })
}

fn decode(n: usize, x: &[f64]) -> MixedStrategy {
    let alpha = x[..n].iter().map(|a| a.abs().min(1.0)).collect();
    let norm = |v: &[f64]| {
        let v: Vec<f64> = v.iter().map(|c| c.abs() + 1e-300).collect();
        ProbVector::normalized(v).expect("positive weights")
    };
    MixedStrategy::new(alpha, norm(&x[n..2 * n]), norm(&x[2 * n..])).expect("valid by construction")
}

fn simplex_grid(n: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let s = steps as f64;
    match n {
        2 => {
            for i in 0..=steps {
                out.push(vec![i as f64 / s, (steps - i) as f64 / s]);
            }
        }
        _ => {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    out.push(vec![i as f64 / s, j as f64 / s, (steps - i - j) as f64 / s]);
                }
            }
        }
    }
    out
}
