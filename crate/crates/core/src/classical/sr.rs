//! Shared-randomness constructions for one classical bit.

use super::feasibility::{mixed_feasibility, mixed_strategy_from_certificate, MixedFeasibility};
use super::strategy::{visit_matrix_correlated, CorrelatedStrategy, MixedStrategy};
use crate::error::{invalid, Error, Result};
use crate::game::{check_game, extreme_gamma, GameSpec};
use crate::lp::{LinearProgram, LpOutcome};
use crate::prob::ProbVector;
use crate::tol::WIN_TOL;

/// Deterministic winner of the extreme game `γ_a = (n-1)/n, γ_b = 1/n`:
/// Alice sends 0 only when `a` is closed, Bob goes to `b` on 0 and `a` on 1.
pub fn extreme_game_strategy(n: usize, a: usize, b: usize) -> Result<MixedStrategy> {
    if a >= n || b >= n || a == b {
        return Err(invalid(format!("need distinct a, b < {n}")));
    }
    let mut alpha = vec![0.0; n];
    alpha[a] = 1.0;
    MixedStrategy::new(alpha, ProbVector::point(n, b), ProbVector::point(n, a))
}

fn certified_mixed(spec: &GameSpec) -> Result<Option<MixedStrategy>> {
    match mixed_feasibility(spec)? {
        MixedFeasibility::Feasible(c) => Ok(Some(mixed_strategy_from_certificate(&c, spec)?)),
        _ => Ok(None),
    }
}

fn finish(spec: &GameSpec, s: CorrelatedStrategy) -> Result<CorrelatedStrategy> {
    let v = check_game(spec, &visit_matrix_correlated(&s), WIN_TOL)?;
    if !v.wins {
        return Err(Error::NumericFailure {
            message: format!("synthesised shared-randomness strategy misses: {:?}", v.witness),
            residual: v.max_violation,
        });
    }
    Ok(s)
}

/// Winning correlated strategy for a non-strict game.
///
/// Mixed-feasible games get a single branch. For `n = 3` the game is split
/// along its `γ_1` line into two points on the boundary of the physical
/// hexagon, each classically winnable, so one shared bit suffices.
/// Otherwise `γ` is decomposed over the extreme games by linear programming.
pub fn synth_sr_strategy(spec: &GameSpec) -> Result<CorrelatedStrategy> {
    if spec.is_strict() {
        return Err(Error::UnsupportedGame(
            "strict games use strict_sr_protocol".into(),
        ));
    }
    if let Some(s) = certified_mixed(spec)? {
        return finish(spec, CorrelatedStrategy::single(s));
    }
    if spec.n() == 3 {
        return finish(spec, two_branch_h3(spec)?);
    }
    finish(spec, extreme_decomposition(spec)?)
}

fn two_branch_h3(spec: &GameSpec) -> Result<CorrelatedStrategy> {
    let g = spec.gamma().as_slice();
    let (g1, g2) = (g[0], g[1]);
    const TWO3: f64 = 2.0 / 3.0;
    let lo = if g1 < 1.0 / 3.0 {
        vec![g1, 1.0 / 3.0 - g1, TWO3]
    } else {
        vec![g1, 0.0, 1.0 - g1]
    };
    let hi = if g1 < 1.0 / 3.0 {
        vec![g1, TWO3, 1.0 / 3.0 - g1]
    } else {
        vec![g1, 1.0 - g1, 0.0]
    };
    let w_lo = (hi[1] - g2) / (hi[1] - lo[1]);
    let mut branches = Vec::with_capacity(2);
    for (w, end) in [(w_lo, lo), (1.0 - w_lo, hi)] {
        let spec_end = GameSpec::non_strict(end)?;
        let s = certified_mixed(&spec_end)?.ok_or_else(|| Error::NumericFailure {
            message: "hexagon boundary point is not classically winnable".into(),
            residual: f64::NAN,
        })?;
        branches.push((w.clamp(0.0, 1.0), s));
    }
    CorrelatedStrategy::new(branches)
}

fn extreme_decomposition(spec: &GameSpec) -> Result<CorrelatedStrategy> {
    let n = spec.n();
    let mut lp = LinearProgram::<f64>::new(n);
    lp.rhs = spec.gamma().as_slice().to_vec();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let g = extreme_gamma(n, a, b);
                lp.add_column(vec![(a, g[a]), (b, g[b])], None);
                pairs.push((a, b));
            }
        }
    }
    let LpOutcome::Optimal { x, .. } = lp.solve()? else {
        return Err(invalid("game lies outside the physical game space"));
    };
    let branches = x
        .iter()
        .zip(&pairs)
        .filter(|(w, _)| **w > 1e-14)
        .map(|(&w, &(a, b))| Ok((w, extreme_game_strategy(n, a, b)?)))
        .collect::<Result<Vec<_>>>()?;
    CorrelatedStrategy::new(branches)
}

/// Winning protocol for the strict game `H^n[1/(n-1)]` from `log2(n-1)`
/// bits of shared randomness.
///
/// For `n = 4` this is the equal mixture of the three balanced bipartitions
/// `{1,2|3,4}`, `{1,3|2,4}`, `{1,4|2,3}`: Alice signals which half is
/// closed and Bob picks uniformly from the other half. For other `n` the
/// shared value `k ∈ 1..n-1` makes Alice send 0 iff `k` is below the closed
/// Restaurant; Bob then visits `k` on 0 and `k+1` on 1.
pub fn strict_sr_protocol(n: usize) -> Result<CorrelatedStrategy> {
    if n < 3 {
        return Err(invalid(format!("strict protocol needs n >= 3, got {n}")));
    }
    let branches = if n == 4 {
        [[0, 1], [0, 2], [0, 3]]
            .iter()
            .map(|half| {
                let other: Vec<usize> = (0..4).filter(|i| !half.contains(i)).collect();
                let alpha = (0..4).map(|i| half.contains(&i) as u8 as f64).collect();
                let s = MixedStrategy::new(
                    alpha,
                    ProbVector::uniform_on(4, &other),
                    ProbVector::uniform_on(4, half),
                )?;
                Ok((1.0, s))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..n - 1)
            .map(|k| {
                let alpha = (0..n).map(|m| (k < m) as u8 as f64).collect();
                let s = MixedStrategy::new(alpha, ProbVector::point(n, k), ProbVector::point(n, k + 1))?;
                Ok((1.0, s))
            })
            .collect::<Result<Vec<_>>>()?
    };
    CorrelatedStrategy::new(branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::strategy::{sr_amount, visit_matrix_mixed};
    use crate::game::VisitMatrix;

    #[test]
    fn uniform_h3_needs_one_shared_bit() {
        let spec = GameSpec::uniform(3).unwrap();
        let s = synth_sr_strategy(&spec).unwrap();
        assert_eq!(s.branches().len(), 2);
        assert!(sr_amount(&s) <= 1.0 + 1e-12);
    }

    #[test]
    fn extreme_games_need_none() {
        for n in [3, 4, 5] {
            let spec = GameSpec::non_strict(extreme_gamma(n, 0, 1)).unwrap();
            let s = synth_sr_strategy(&spec).unwrap();
            assert_eq!(s.branches().len(), 1);
            assert_eq!(sr_amount(&s), 0.0);
        }
    }

    #[test]
    fn extreme_decomposition_h4() {
        let spec = GameSpec::non_strict(vec![0.4, 0.2, 0.2, 0.2]).unwrap();
        let s = synth_sr_strategy(&spec).unwrap();
        assert!(s.branches().len() <= 12);
    }

    #[test]
    fn strict_protocols_hit_target_exactly() {
        for n in 3..=9 {
            let s = strict_sr_protocol(n).unwrap();
            let m = visit_matrix_correlated(&s);
            assert!(m.max_abs_diff(&VisitMatrix::strict_target(n)) < 1e-15, "n = {n}");
            assert!((sr_amount(&s) - ((n - 1) as f64).log2()).abs() < 1e-12);
        }
        assert!(strict_sr_protocol(2).is_err());
    }

    #[test]
    fn h4_partition_branches() {
        // Each branch alone: ½ off the diagonal across halves, 0 within.
        let s = strict_sr_protocol(4).unwrap();
        let v1 = visit_matrix_mixed(&s.branches()[0].strategy);
        assert_eq!(v1.column(0), vec![0.0, 0.0, 0.5, 0.5]);
        assert_eq!(v1.column(3), vec![0.5, 0.5, 0.0, 0.0]);
    }
}
