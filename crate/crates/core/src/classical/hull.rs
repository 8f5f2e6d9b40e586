//! Independent winnability oracle with unlimited shared randomness.
//!
//! Correlated strategies are exactly the convex hull of deterministic
//! visit matrices. A winning mixture can only use deterministic strategies
//! that themselves never visit the closed Restaurant (all entries are
//! nonnegative and the diagonal must vanish), so the columns of the LP are
//! restricted to those:
//!
//! * non-strict games constrain only marginals, and a zero-diagonal
//!   deterministic strategy decoding `(d0, d1)` has marginal
//!   `(k/n) e_{d0} + ((n-k)/n) e_{d1}` where `k` counts the inputs sent as 0;
//! * strict games fix the whole off-diagonal matrix, so every encoding of
//!   the remaining `n - 2` Restaurants is a separate column.
//!
//! Membership is decided by phase-1 simplex, exactly in rational arithmetic
//! for `n <= 5` and in floating point otherwise.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::strategy::{CorrelatedStrategy, DeterministicStrategy};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::lp::{to_rational, LinearProgram, LpOutcome, Scalar};

pub const MAX_HULL_N: usize = 12;
pub const EXACT_HULL_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullWitnessEntry {
    pub encode: Vec<u8>,
    pub decode: [usize; 2],
    pub weight: f64,
    /// Exact weight as `p/q` when solved in rational arithmetic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_weight: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullResult {
    pub feasible_with_unbounded_sr: bool,
    pub weights: Option<Vec<HullWitnessEntry>>,
    pub exact: bool,
}

impl HullResult {
    /// The witness as a correlated strategy (one branch per entry).
    pub fn to_correlated(&self) -> Option<CorrelatedStrategy> {
        let w = self.weights.as_ref()?;
        let branches = w
            .iter()
            .map(|e| {
                let d = DeterministicStrategy::new(e.encode.clone(), e.decode).ok()?;
                Some((e.weight, d.to_mixed()))
            })
            .collect::<Option<Vec<_>>>()?;
        CorrelatedStrategy::new(branches).ok()
    }
}

/// Column generator: deterministic strategies and their LP columns.
struct Columns {
    strategies: Vec<DeterministicStrategy>,
    entries: Vec<Vec<(usize, i64)>>,
    rows: usize,
    /// Right-hand side as (numerator of γ or of 1/(n-1)) — filled by caller.
    strict: bool,
}

fn non_strict_columns(n: usize) -> Columns {
    let mut strategies = Vec::new();
    let mut entries = Vec::new();
    for d0 in 0..n {
        for d1 in d0 + 1..n {
            for k in 1..n {
                // E(d1) = 0, E(d0) = 1, and k - 1 further zeros.
                let mut encode = vec![1u8; n];
                encode[d1] = 0;
                let mut zeros = k - 1;
                for (j, e) in encode.iter_mut().enumerate() {
                    if zeros == 0 {
                        break;
                    }
                    if j != d0 && j != d1 {
                        *e = 0;
                        zeros -= 1;
                    }
                }
                // Marginal is (k/n, (n-k)/n) on (d0, d1); scaled by n.
                entries.push(vec![(d0, k as i64), (d1, (n - k) as i64)]);
                strategies.push(DeterministicStrategy {
                    encode,
                    decode: [d0, d1],
                });
            }
        }
    }
    Columns {
        strategies,
        entries,
        rows: n,
        strict: false,
    }
}

fn offdiag_row(n: usize, visited: usize, closed: usize) -> usize {
    closed * (n - 1) + if visited < closed { visited } else { visited - 1 }
}

fn strict_columns(n: usize) -> Columns {
    let others = |d0: usize, d1: usize| (0..n).filter(move |&j| j != d0 && j != d1);
    let mut strategies = Vec::new();
    let mut entries = Vec::new();
    // (d0, d1, E) and (d1, d0, !E) give the same matrix; keep d0 < d1.
    for d0 in 0..n {
        for d1 in d0 + 1..n {
            for mask in 0u64..1 << (n - 2) {
                let mut encode = vec![0u8; n];
                encode[d0] = 1;
                encode[d1] = 0;
                for (b, j) in others(d0, d1).enumerate() {
                    encode[j] = (mask >> b & 1) as u8;
                }
                let decode = [d0, d1];
                let col = (0..n)
                    .map(|j| (offdiag_row(n, decode[encode[j] as usize], j), 1i64))
                    .collect();
                entries.push(col);
                strategies.push(DeterministicStrategy { encode, decode });
            }
        }
    }
    Columns {
        strategies,
        entries,
        rows: n * (n - 1),
        strict: true,
    }
}

fn solve<S: Scalar>(
    cols: &Columns,
    rhs: Vec<S>,
    scale: S,
) -> Result<Option<Vec<(usize, S)>>> {
    let mut lp = LinearProgram::<S>::new(cols.rows);
    lp.rhs = rhs;
    for e in &cols.entries {
        lp.add_column(
            e.iter()
                .map(|&(r, v)| (r, S::from_i64(v) / scale.clone()))
                .collect(),
            None,
        );
    }
    match lp.solve()? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal { x, .. } => Ok(Some(
            x.into_iter()
                .enumerate()
                .filter(|(_, v)| v.is_pos())
                .collect(),
        )),
        LpOutcome::Unbounded => unreachable!("feasibility problem has zero cost"),
    }
}

/// Decides whether any correlated one-bit strategy wins `spec`.
pub fn hull_membership_oracle(spec: &GameSpec) -> Result<HullResult> {
    let n = spec.n();
    if n > MAX_HULL_N {
        return Err(Error::ResourceLimit(format!(
            "hull enumeration is capped at n = {MAX_HULL_N}, got {n}"
        )));
    }
    let cols = if spec.is_strict() {
        strict_columns(n)
    } else {
        non_strict_columns(n)
    };
    let exact = n <= EXACT_HULL_N;
    let entries: Option<Vec<HullWitnessEntry>> = if exact {
        let rhs: Vec<BigRational> = if cols.strict {
            vec![BigRational::new(1.into(), ((n - 1) as i64).into()); cols.rows]
        } else {
            let g: Vec<BigRational> = spec.gamma().as_slice().iter().map(|&x| to_rational(x)).collect();
            let total = g.iter().fold(BigRational::from_i64(0), |a, b| a + b.clone());
            g.into_iter().map(|x| x / total.clone()).collect()
        };
        let scale = BigRational::from_i64(if cols.strict { 1 } else { n as i64 });
        solve(&cols, rhs, scale)?.map(|sol| {
            sol.into_iter()
                .map(|(j, w)| HullWitnessEntry {
                    encode: cols.strategies[j].encode.clone(),
                    decode: cols.strategies[j].decode,
                    weight: Scalar::to_f64(&w),
                    exact_weight: Some(w.to_string()),
                })
                .collect()
        })
    } else {
        let rhs: Vec<f64> = if cols.strict {
            vec![1.0 / (n as f64 - 1.0); cols.rows]
        } else {
            spec.gamma().as_slice().to_vec()
        };
        let scale = if cols.strict { 1.0 } else { n as f64 };
        solve(&cols, rhs, scale)?.map(|sol| {
            sol.into_iter()
                .map(|(j, w)| HullWitnessEntry {
                    encode: cols.strategies[j].encode.clone(),
                    decode: cols.strategies[j].decode,
                    weight: w,
                    exact_weight: None,
                })
                .collect()
        })
    };
    Ok(HullResult {
        feasible_with_unbounded_sr: entries.is_some(),
        weights: entries,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::strategy::visit_matrix_correlated;
    use crate::game::check_game;

    fn verify(spec: &GameSpec) -> HullResult {
        let h = hull_membership_oracle(spec).unwrap();
        if let Some(c) = h.to_correlated() {
            let v = check_game(spec, &visit_matrix_correlated(&c), 1e-9).unwrap();
            assert!(v.wins, "{v:?}");
        }
        h
    }

    #[test]
    fn column_counts() {
        assert_eq!(non_strict_columns(4).entries.len(), 4 * 3 * 3 / 2);
        assert_eq!(strict_columns(4).entries.len(), 6 * 4);
        for c in [non_strict_columns(5), strict_columns(5)] {
            for s in &c.strategies {
                let m = s.visit_matrix();
                assert!(m.diagonal().iter().all(|&d| d == 0.0));
            }
        }
    }

    #[test]
    fn uniform_h3_is_sr_winnable() {
        let h = verify(&GameSpec::uniform(3).unwrap());
        assert!(h.feasible_with_unbounded_sr && h.exact);
    }

    #[test]
    fn strict_h4_is_sr_winnable() {
        let h = verify(&GameSpec::strict(4).unwrap());
        assert!(h.feasible_with_unbounded_sr);
        assert!(h.weights.unwrap().len() >= 3);
    }

    #[test]
    fn two_restaurants_deterministic() {
        let h = verify(&GameSpec::uniform(2).unwrap());
        let w = h.weights.unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].exact_weight.as_deref(), Some("1"));
    }

    #[test]
    fn float_route_for_larger_n() {
        for n in [6, 7] {
            let h = verify(&GameSpec::uniform(n).unwrap());
            assert!(h.feasible_with_unbounded_sr && !h.exact);
            let h = verify(&GameSpec::strict(n).unwrap());
            assert!(h.feasible_with_unbounded_sr);
        }
    }

    #[test]
    fn resource_limit() {
        assert!(matches!(
            hull_membership_oracle(&GameSpec::uniform(13).unwrap()),
            Err(Error::ResourceLimit(_))
        ));
    }
}
