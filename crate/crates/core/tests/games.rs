mod common;

use commgames::classical::{visit_matrix_mixed, visit_matrix_correlated, CorrelatedStrategy};
use commgames::game::extreme_gamma;
use commgames::polygon::{synth_even_gon, synth_square_h3, visit_matrix_polygon};
use commgames::qubit::{visit_matrix_qubit, trine_strategy};
use commgames::{check_game, convex_mix, game_space_extreme_points, GameSpec, ProbVector, VisitMatrix};
use proptest::prelude::*;

#[test]
fn extreme_point_count() {
    for n in 3..=8 {
        let pts = game_space_extreme_points(n).unwrap();
        assert_eq!(pts.len(), n * (n - 1));
        for p in &pts {
            let g = p.gamma().as_slice();
            assert_eq!(g.iter().filter(|&&x| x > 0.0).count(), 2);
        }
    }
    assert_eq!(extreme_gamma(3, 0, 1), vec![2.0 / 3.0, 1.0 / 3.0, 0.0]);
}

fn any_matrix(seed: u64, n: usize) -> VisitMatrix {
    let mut rng = common::rng(seed);
    match seed % 3 {
        0 => visit_matrix_mixed(&common::mixed(&mut rng, n)),
        1 => {
            let branches = (0..3).map(|_| (1.0 / 3.0, common::mixed(&mut rng, n))).collect();
            visit_matrix_correlated(&CorrelatedStrategy::new(branches).unwrap())
        }
        _ => visit_matrix_qubit(&common::qubit_strategy(&mut rng, n)),
    }
}

#[test]
fn every_module_produces_distributions() {
    let mut ms = vec![visit_matrix_qubit(&trine_strategy())];
    for n in 3..=6 {
        ms.push(visit_matrix_polygon(&synth_even_gon(n).unwrap()));
    }
    let sq = synth_square_h3(&GameSpec::non_strict(vec![0.4, 0.35, 0.25]).unwrap()).unwrap();
    ms.push(visit_matrix_polygon(&sq.strategy));
    for m in ms {
        for k in 0..m.n() {
            assert!((m.column(k).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn rows_sum_to_one(seed in any::<u64>(), n in 2usize..7) {
        let m = any_matrix(seed, n);
        for k in 0..n {
            prop_assert!((m.column(k).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn check_is_monotone_in_tol(seed in any::<u64>(), t in 1e-12f64..0.5, extra in 0.0f64..1.0) {
        let m = any_matrix(seed, 3);
        let spec = GameSpec::uniform(3).unwrap();
        if check_game(&spec, &m, t).unwrap().wins {
            prop_assert!(check_game(&spec, &m, t + extra).unwrap().wins);
        }
    }

    #[test]
    fn mixing_winners_wins(w in 0.0f64..=1.0, g1 in 0.05f64..0.6) {
        // Two different winners of the same game: a qubit and a polygon strategy.
        let spec = GameSpec::non_strict(vec![g1, (1.0 - g1) * 0.55, (1.0 - g1) * 0.45]);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        prop_assume!(spec.gamma().as_slice().iter().all(|&g| g < 2.0 / 3.0));
        let a = visit_matrix_qubit(&commgames::qubit::synth_h3_general(&spec).unwrap());
        let b = visit_matrix_polygon(&synth_square_h3(&spec).unwrap().strategy);
        let mix = convex_mix(&[a, b], &ProbVector::new(vec![w, 1.0 - w]).unwrap()).unwrap();
        prop_assert!(check_game(&spec, &mix, 1e-9).unwrap().wins);
    }
}
