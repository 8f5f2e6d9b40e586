//! Numeric search for polygon strategies.
//!
//! For fixed encodings the best decoding is a linear program: the weighted
//! effects `E_o` only need to be positive on every pure state and sum to
//! `u`, and every visit probability is linear in them. So only the
//! encodings are searched — on the boundary, parametrised by a position
//! `s ∈ [0, n)` (edge `⌊s⌋`, convex parameter `s − ⌊s⌋`) — and each candidate
//! is scored by the exact optimum of its decoding LP. Interior encodings
//! never help: they give every nonzero effect positive probability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dot, PolygonTheory, Vec3, UNIT};
use crate::error::Result;
use crate::game::GameSpec;
use crate::lp::{LinearProgram, LpOutcome};
use crate::optim::{stream_rng, NelderMead};
use crate::tol::INFEASIBLE_RESIDUAL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Uniformly random boundary configurations, on top of every edge
    /// combination at edge midpoints.
    pub random_starts: usize,
    /// Best configurations refined by Nelder–Mead on the positions.
    pub refine_top: usize,
    pub refine_evals: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            random_starts: 200,
            refine_top: 8,
            refine_evals: 400,
            seed: 0x5eed_0003,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSearchResult {
    pub theory: usize,
    pub min_residual: f64,
    pub infeasible_numerically: bool,
    /// Boundary positions of the best encodings.
    pub positions: Vec<f64>,
    pub encodings: Vec<Vec3>,
    /// Weighted effects of the best decoding (outcome `o` ↦ Restaurant `o`).
    pub weighted_effects: Vec<Vec3>,
    pub lp_solves: usize,
}

#[derive(Clone, Copy)]
enum Sense {
    Le,
    Ge,
}

/// Smallest sup-norm violation of `spec` over all decodings, with the
/// optimal weighted effects.
///
/// The effect cone `{E : E·ω_l >= 0}` is generated by the extremal effects
/// `e_l` (each vanishes on one edge), so `E_o = Σ_l c_{o,l} e_l` with
/// `c >= 0` and `Σ_o E_o = u` covers every decoding.
pub fn best_decoding(theory: &PolygonTheory, encodings: &[Vec3], spec: &GameSpec) -> Option<(f64, Vec<Vec3>)> {
    let k = encodings.len();
    let gens = theory.effects();
    let ng = gens.len();
    // Variables: c_{o,l} at o·ng + l, then t.
    let t = k * ng;
    let mut lp = LinearProgram::<f64>::new(0);
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); t + 1];
    let mut rhs = Vec::new();
    let mut senses = Vec::new();
    // Σ_o E_o = u.
    for c in 0..3 {
        for o in 0..k {
            for (l, e) in gens.iter().enumerate() {
                if e[c] != 0.0 {
                    cols[o * ng + l].push((rhs.len(), e[c]));
                }
            }
        }
        rhs.push(UNIT[c]);
        senses.push(None);
    }
    // `Σ_j w_j p(o|j) (−/+) t (<=/>=) target` for a weighting `w` of the
    // encodings.
    let mut band = |o: usize, w: &dyn Fn(usize) -> f64, target: f64, sides: &[Sense]| {
        for &sense in sides {
            let row = rhs.len();
            for (l, e) in gens.iter().enumerate() {
                let v: f64 = encodings.iter().enumerate().map(|(j, s)| w(j) * dot(e, s)).sum();
                if v != 0.0 {
                    cols[o * ng + l].push((row, v));
                }
            }
            cols[t].push((row, if matches!(sense, Sense::Le) { -1.0 } else { 1.0 }));
            rhs.push(target);
            senses.push(Some(sense));
        }
    };
    let g = spec.gamma().as_slice();
    for o in 0..k {
        if spec.is_strict() {
            let off = 1.0 / (k as f64 - 1.0);
            for j in 0..k {
                let target = if o == j { 0.0 } else { off };
                band(o, &|i| (i == j) as u8 as f64, target, &[Sense::Le, Sense::Ge]);
            }
        } else {
            band(o, &|_| 1.0 / k as f64, g[o], &[Sense::Le, Sense::Ge]);
            band(o, &|i| (i == o) as u8 as f64, 0.0, &[Sense::Le]);
        }
    }
    lp.rows = rhs.len();
    lp.rhs = rhs;
    for (v, col) in cols.into_iter().enumerate() {
        lp.add_column(col, Some(if v == t { 1.0 } else { 0.0 }));
    }
    for (r, sense) in senses.iter().enumerate() {
        match sense {
            Some(Sense::Le) => {
                lp.add_column(vec![(r, 1.0)], Some(0.0));
            }
            Some(Sense::Ge) => {
                lp.add_column(vec![(r, -1.0)], Some(0.0));
            }
            None => {}
        }
    }
    let LpOutcome::Optimal { x, .. } = lp.solve().ok()? else {
        return None;
    };
    let effects = (0..k)
        .map(|o| {
            let mut e = [0.0; 3];
            for (l, g) in gens.iter().enumerate() {
                for c in 0..3 {
                    e[c] += x[o * ng + l] * g[c];
                }
            }
            e
        })
        .collect::<Vec<Vec3>>();
    // Score the recovered decoding directly rather than trusting `t`.
    Some((residual(theory, encodings, &effects, spec), effects))
}

fn residual(theory: &PolygonTheory, enc: &[Vec3], eff: &[Vec3], spec: &GameSpec) -> f64 {
    let k = enc.len();
    let mut worst: f64 = 0.0;
    for e in eff {
        for w in theory.pure_states() {
            worst = worst.max(-dot(e, w));
        }
    }
    let g = spec.gamma().as_slice();
    for o in 0..k {
        let mut marg = 0.0;
        for (j, s) in enc.iter().enumerate() {
            let p = dot(&eff[o], s);
            marg += p / k as f64;
            if spec.is_strict() {
                let want = if o == j { 0.0 } else { 1.0 / (k as f64 - 1.0) };
                worst = worst.max((p - want).abs());
            } else if o == j {
                worst = worst.max(p.abs());
            }
        }
        if !spec.is_strict() {
            worst = worst.max((marg - g[o]).abs());
        }
    }
    worst
}

fn score(theory: &PolygonTheory, pos: &[f64], spec: &GameSpec) -> f64 {
    let enc: Vec<Vec3> = pos.iter().map(|&s| theory.boundary_point(s)).collect();
    best_decoding(theory, &enc, spec).map_or(f64::INFINITY, |(r, _)| r)
}

/// Multisets of `k - 1` edges after edge 0 (rotation fixes the first).
fn edge_combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for e in from..n {
            cur.push(e);
            rec(n, left - 1, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k - 1, 0, &mut vec![0], &mut out);
    out
}

/// Searches `P_ly(n)` strategies for `spec`, one encoding and one outcome
/// per Restaurant.
pub fn polygon_search(n: usize, spec: &GameSpec, budget: &SearchBudget) -> Result<PolygonSearchResult> {
    let theory = PolygonTheory::new(n)?;
    let k = spec.n();
    let mut starts: Vec<Vec<f64>> = edge_combos(n, k)
        .into_iter()
        .map(|c| c.into_iter().map(|e| e as f64 + 0.5).collect())
        .collect();
    for i in 0..budget.random_starts {
        let mut rng = stream_rng(budget.seed, i as u64);
        starts.push((0..k).map(|_| rand::Rng::random::<f64>(&mut rng) * n as f64).collect());
    }
    let mut scored: Vec<(f64, usize, Vec<f64>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| (score(&theory, &p, spec), i, p))
        .collect();
    let mut solves = scored.len();
    let order = |a: &(f64, usize, Vec<f64>), b: &(f64, usize, Vec<f64>)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    scored.sort_by(order);
    let nm = NelderMead {
        max_evals: budget.refine_evals,
        ftol: 1e-14,
        xtol: 1e-12,
    };
    let refined: Vec<(f64, usize, Vec<f64>)> = scored
        .iter()
        .take(budget.refine_top)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(v, i, p)| {
            if *v == 0.0 {
                return (*v, *i, p.clone());
            }
            let (x, fx) = nm.minimize(|x| score(&theory, x, spec), p, 0.25);
            if fx < *v {
                (fx, *i, x)
            } else {
                (*v, *i, p.clone())
            }
        })
        .collect();
    solves += budget.refine_top.min(scored.len()) * budget.refine_evals;
    let best = refined
        .into_iter()
        .chain(scored.into_iter().take(1))
        .min_by(order)
        .expect("at least one start");
    let positions: Vec<f64> = best.2.iter().map(|s| s.rem_euclid(n as f64)).collect();
    let encodings: Vec<Vec3> = positions.iter().map(|&s| theory.boundary_point(s)).collect();
    let (min_residual, weighted_effects) =
        best_decoding(&theory, &encodings, spec).unwrap_or((f64::INFINITY, Vec::new()));
    Ok(PolygonSearchResult {
        theory: n,
        min_residual,
        infeasible_numerically: min_residual > INFEASIBLE_RESIDUAL,
        positions,
        encodings,
        weighted_effects,
        lp_solves: solves,
    })
}

/// The strict game `H^4[1/3]` against `P_ly(n)`.
pub fn strict_polygon_infeasibility(n: usize, budget: &SearchBudget) -> Result<PolygonSearchResult> {
    polygon_search(n, &GameSpec::strict(4)?, budget)
}
