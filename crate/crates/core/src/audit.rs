//! Resource orderings, each backed by a separation that is recomputed here.

use serde::{Deserialize, Serialize};

use crate::classical::{
    mixed_feasibility, sr_amount, strict_1bitsr_infeasibility, strict_sr_protocol,
    synth_sr_strategy, visit_matrix_correlated, SearchConfig,
};
use crate::error::Result;
use crate::game::{check_game, GameSpec, VisitMatrix};
use crate::polygon::{strict_polygon_infeasibility, synth_even_gon, visit_matrix_polygon, SearchBudget};
use crate::qubit::{synth_sic_strict, trine_strategy, visit_matrix_qubit};
use crate::tol::WIN_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub claim: String,
    pub holds: bool,
    /// Residual or value behind the claim, when there is one.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeritRow {
    pub relation: String,
    pub task: String,
    pub evidence: Vec<Evidence>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub strict_search: SearchConfig,
    pub polygon_budget: SearchBudget,
    pub polygon_sizes: Vec<usize>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            strict_search: SearchConfig::default(),
            polygon_budget: SearchBudget::default(),
            polygon_sizes: (4..=12).collect(),
        }
    }
}

fn wins(spec: &GameSpec, m: &VisitMatrix) -> Result<Evidence> {
    let v = check_game(spec, m, WIN_TOL)?;
    Ok(Evidence {
        claim: String::new(),
        holds: v.wins,
        value: Some(v.max_violation),
    })
}

fn claim(mut e: Evidence, text: impl Into<String>) -> Evidence {
    e.claim = text.into();
    e
}

fn row(relation: &str, task: &str, evidence: Vec<Evidence>) -> MeritRow {
    MeritRow {
        relation: relation.into(),
        task: task.into(),
        holds: evidence.iter().all(|e| e.holds),
        evidence,
    }
}

fn mixed_infeasible(n_games: &[GameSpec], text: &str) -> Result<Evidence> {
    let mut holds = true;
    for g in n_games {
        holds &= !mixed_feasibility(g)?.is_feasible();
    }
    Ok(Evidence {
        claim: text.into(),
        holds,
        value: None,
    })
}

/// Recomputes every in-scope ordering.
pub fn merit_audit(cfg: &AuditConfig) -> Result<Vec<MeritRow>> {
    let h3 = GameSpec::uniform(3)?;
    let strict4 = GameSpec::strict(4)?;
    let c_h3 = mixed_infeasible(std::slice::from_ref(&h3), "1 cbit cannot win H^3(1/3)")?;

    let sr = synth_sr_strategy(&h3)?;
    let sr_wins = claim(wins(&h3, &visit_matrix_correlated(&sr))?, "1 cbit + SR wins H^3(1/3)");
    let q_wins = claim(wins(&h3, &visit_matrix_qubit(&trine_strategy()))?, "qubit trine wins H^3(1/3)");

    let odd: Vec<GameSpec> = [3, 5, 7].iter().map(|&n| GameSpec::uniform(n)).collect::<Result<_>>()?;
    let c_odd = mixed_infeasible(&odd, "1 cbit cannot win H^n(1/n), n = 3, 5, 7")?;
    let mut gon = Evidence {
        claim: "2n-gon wins H^n(1/n), n = 3..8".into(),
        holds: true,
        value: Some(0.0),
    };
    for n in 3..=8 {
        let e = wins(&GameSpec::uniform(n)?, &visit_matrix_polygon(&synth_even_gon(n)?))?;
        gon.holds &= e.holds;
        gon.value = Some(gon.value.unwrap_or(0.0).max(e.value.unwrap_or(0.0)));
    }

    let one_sr = strict_1bitsr_infeasibility(&cfg.strict_search);
    let one_sr_fails = Evidence {
        claim: format!(
            "1 cbit + 1 bit SR cannot win H^4[1/3] ({} starts; both compatible 4-subsets rejected)",
            one_sr.numeric.starts
        ),
        holds: one_sr.infeasible && one_sr.certificate.rejects_all,
        value: Some(one_sr.min_residual),
    };
    let sic = claim(wins(&strict4, &visit_matrix_qubit(&synth_sic_strict()))?, "qubit SIC wins H^4[1/3]");
    let log3 = strict_sr_protocol(4)?;
    let mut log3_wins = claim(
        wins(&strict4, &visit_matrix_correlated(&log3))?,
        "1 cbit + log2(3) bits SR wins H^4[1/3]",
    );
    log3_wins.holds &= (sr_amount(&log3) - 3f64.log2()).abs() < 1e-12;

    let mut poly = Evidence {
        claim: format!("no polygon P_ly(n) wins H^4[1/3], n in {:?}", cfg.polygon_sizes),
        holds: true,
        value: None,
    };
    for &n in &cfg.polygon_sizes {
        let r = strict_polygon_infeasibility(n, &cfg.polygon_budget)?;
        poly.holds &= r.infeasible_numerically;
        poly.value = Some(poly.value.map_or(r.min_residual, |v: f64| v.min(r.min_residual)));
    }

    Ok(vec![
        row("C ≼ C+SR", "H^n(γ)", vec![c_h3.clone(), sr_wins]),
        row("C ≼ Q", "H^3(γ)", vec![c_h3, q_wins]),
        row("C ≼ 2n-gon", "H^n(1/n)", vec![c_odd, gon]),
        row("C+1SR ≺inst Q", "H^4[1/3]", vec![one_sr_fails.clone(), sic.clone()]),
        row("C+1SR ≼ C+log3SR", "H^4[1/3]", vec![one_sr_fails, log3_wins]),
        row("Polygon ≺inst Q", "H^4[1/3]", vec![poly, sic]),
    ])
}
