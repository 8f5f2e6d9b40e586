//! Grid data for the three-Restaurant game space.
//!
//! Rows come out sorted by grid coordinates whatever the evaluation order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{mixed_feasibility, synth_sr_strategy, visit_matrix_correlated};
use crate::error::{invalid, Error, Result};
use crate::game::{check_game, GameSpec};
use crate::tol::{ENTRY_TOL, WIN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameSpaceLabel {
    Unphysical,
    MixedWinnable,
    SrWinnable,
}

impl GameSpaceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GameSpaceLabel::Unphysical => "unphysical",
            GameSpaceLabel::MixedWinnable => "mixed-winnable",
            GameSpaceLabel::SrWinnable => "sr-winnable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameSpacePoint {
    pub i: usize,
    pub j: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub label: GameSpaceLabel,
}

/// Labels one point of the `γ_1 + γ_2 + γ_3 = 1` plane. Points without a
/// mixed strategy are only labelled `sr-winnable` once a correlated
/// strategy has been synthesised and checked.
pub fn label_game(gamma: [f64; 3]) -> Result<GameSpaceLabel> {
    if gamma.iter().any(|&g| g > 2.0 / 3.0 + ENTRY_TOL) {
        return Ok(GameSpaceLabel::Unphysical);
    }
    let spec = GameSpec::non_strict(gamma.to_vec())?;
    if mixed_feasibility(&spec)?.is_feasible() {
        return Ok(GameSpaceLabel::MixedWinnable);
    }
    let s = synth_sr_strategy(&spec)?;
    let v = check_game(&spec, &visit_matrix_correlated(&s), WIN_TOL)?;
    if !v.wins {
        return Err(Error::NumericFailure {
            message: format!("correlated strategy for {gamma:?} loses"),
            residual: v.max_violation,
        });
    }
    Ok(GameSpaceLabel::SrWinnable)
}

/// All `γ = (i, j, resolution − i − j) / resolution`.
pub fn sweep_game_space(resolution: usize) -> Result<Vec<GameSpacePoint>> {
    if resolution < 10 {
        return Err(invalid(format!("resolution must be >= 10, got {resolution}")));
    }
    let r = resolution as f64;
    let cells: Vec<(usize, usize)> = (0..=resolution)
        .flat_map(|i| (0..=resolution - i).map(move |j| (i, j)))
        .collect();
    cells
        .into_par_iter()
        .map(|(i, j)| {
            let k = resolution - i - j;
            let gamma = [i as f64 / r, j as f64 / r, k as f64 / r];
            Ok(GameSpacePoint {
                i,
                j,
                gamma1: gamma[0],
                gamma2: gamma[1],
                gamma3: gamma[2],
                label: label_game(gamma)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        let third = 1.0 / 3.0;
        assert_eq!(label_game([third; 3]).unwrap(), GameSpaceLabel::SrWinnable);
        assert_eq!(label_game([0.7, 0.2, 0.1]).unwrap(), GameSpaceLabel::Unphysical);
        assert_eq!(
            label_game([2.0 / 3.0, 0.2, 2.0 / 15.0]).unwrap(),
            GameSpaceLabel::MixedWinnable
        );
    }

    #[test]
    fn regions_match_characterisation() {
        let pts = sweep_game_space(30).unwrap();
        assert_eq!(pts.len(), 31 * 32 / 2);
        for p in &pts {
            let g = [p.gamma1, p.gamma2, p.gamma3];
            let want = if g.iter().any(|&x| x > 2.0 / 3.0 + 1e-12) {
                GameSpaceLabel::Unphysical
            } else if g.iter().any(|&x| x.abs() < 1e-12 || (x - 2.0 / 3.0).abs() < 1e-12) {
                GameSpaceLabel::MixedWinnable
            } else {
                GameSpaceLabel::SrWinnable
            };
            assert_eq!(p.label, want, "{g:?}");
        }
        assert!(pts.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
    }
}
