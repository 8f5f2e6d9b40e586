use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::VisitMatrix;
use crate::prob::ProbVector;
use crate::tol::ENTRY_TOL;

/// A deterministic one-bit strategy: Alice's encoding table and Bob's
/// decoding table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub encode: Vec<u8>,
    pub decode: [usize; 2],
}

impl DeterministicStrategy {
    pub fn new(encode: Vec<u8>, decode: [usize; 2]) -> Result<Self> {
        let n = encode.len();
        if encode.iter().any(|&b| b > 1) {
            return Err(invalid("encoding table entries must be bits"));
        }
        if decode.iter().any(|&d| d >= n) {
            return Err(invalid(format!("decoding table must map into 0..{n}")));
        }
        Ok(Self { encode, decode })
    }

    pub fn n(&self) -> usize {
        self.encode.len()
    }

    pub fn visit_matrix(&self) -> VisitMatrix {
        VisitMatrix::from_fn(self.n(), |i, j| {
            (self.decode[self.encode[j] as usize] == i) as u8 as f64
        })
        .expect("deterministic columns are distributions")
    }

    /// The same strategy as a (degenerate) mixed strategy.
    pub fn to_mixed(&self) -> MixedStrategy {
        let n = self.n();
        MixedStrategy {
            alpha: self.encode.iter().map(|&b| if b == 0 { 1.0 } else { 0.0 }).collect(),
            r: ProbVector::point(n, self.decode[0]),
            q: ProbVector::point(n, self.decode[1]),
        }
    }
}

/// Alice sends 0 with probability `alpha[k]` when Restaurant `k` is closed;
/// Bob samples his visit from `r` on 0 and from `q` on 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixed")]
pub struct MixedStrategy {
    alpha: Vec<f64>,
    r: ProbVector,
    q: ProbVector,
}

#[derive(Deserialize)]
struct RawMixed {
    alpha: Vec<f64>,
    r: ProbVector,
    q: ProbVector,
}

impl TryFrom<RawMixed> for MixedStrategy {
    type Error = Error;
    fn try_from(raw: RawMixed) -> Result<Self> {
        MixedStrategy::new(raw.alpha, raw.r, raw.q)
    }
}

impl MixedStrategy {
    pub fn new(alpha: Vec<f64>, r: ProbVector, q: ProbVector) -> Result<Self> {
        let n = alpha.len();
        for (what, v) in [("r", &r), ("q", &q)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what: if what == "r" { "decoding coin r" } else { "decoding coin q" },
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if let Some((k, a)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || **a < -ENTRY_TOL || **a > 1.0 + ENTRY_TOL)
        {
            return Err(invalid(format!("alpha_{} = {a} outside [0,1]", k + 1)));
        }
        let alpha = alpha.into_iter().map(|a| a.clamp(0.0, 1.0)).collect();
        Ok(Self { alpha, r, q })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn r(&self) -> &ProbVector {
        &self.r
    }

    pub fn q(&self) -> &ProbVector {
        &self.q
    }
}

/// `p(m|k) = α_k r_m + (1 - α_k) q_m`.
pub fn visit_matrix_mixed(s: &MixedStrategy) -> VisitMatrix {
    VisitMatrix::from_fn(s.n(), |m, k| {
        s.alpha[k] * s.r[m] + (1.0 - s.alpha[k]) * s.q[m]
    })
    .expect("mixture of distributions")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub weight: f64,
    pub strategy: MixedStrategy,
}

/// A shared-randomness mixture of mixed strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCorrelated")]
pub struct CorrelatedStrategy {
    branches: Vec<Branch>,
    sr_bits: f64,
}

#[derive(Deserialize)]
struct RawCorrelated {
    branches: Vec<Branch>,
    #[serde(default)]
    sr_bits: Option<f64>,
}

impl TryFrom<RawCorrelated> for CorrelatedStrategy {
    type Error = Error;
    fn try_from(raw: RawCorrelated) -> Result<Self> {
        let s = CorrelatedStrategy::new(
            raw.branches
                .into_iter()
                .map(|b| (b.weight, b.strategy))
                .collect(),
        )?;
        if let Some(bits) = raw.sr_bits {
            if (bits - s.sr_bits).abs() > 1e-9 {
                return Err(invalid(format!(
                    "sr_bits {bits} disagrees with branch weights ({})",
                    s.sr_bits
                )));
            }
        }
        Ok(s)
    }
}

impl CorrelatedStrategy {
    /// Normalises weights and drops zero-weight branches.
    pub fn new(branches: Vec<(f64, MixedStrategy)>) -> Result<Self> {
        let n = branches
            .first()
            .map(|(_, s)| s.n())
            .ok_or_else(|| invalid("a correlated strategy needs at least one branch"))?;
        if let Some((_, s)) = branches.iter().find(|(_, s)| s.n() != n) {
            return Err(Error::DimensionMismatch {
                what: "branch strategy",
                expected: n,
                found: s.n(),
            });
        }
        let weights = ProbVector::normalized(branches.iter().map(|(w, _)| *w).collect())?;
        let branches: Vec<Branch> = branches
            .into_iter()
            .zip(weights.as_slice())
            .filter(|(_, &w)| w > 0.0)
            .map(|((_, strategy), &weight)| Branch { weight, strategy })
            .collect();
        let sr_bits = ProbVector::normalized(branches.iter().map(|b| b.weight).collect())?.entropy_bits();
        Ok(Self { branches, sr_bits })
    }

    pub fn single(s: MixedStrategy) -> Self {
        Self {
            branches: vec![Branch {
                weight: 1.0,
                strategy: s,
            }],
            sr_bits: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.branches[0].strategy.n()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn sr_bits(&self) -> f64 {
        self.sr_bits
    }
}

pub fn visit_matrix_correlated(s: &CorrelatedStrategy) -> VisitMatrix {
    let n = s.n();
    let mut p = vec![0.0; n * n];
    for b in &s.branches {
        let m = visit_matrix_mixed(&b.strategy);
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] += b.weight * m.get(i, j);
            }
        }
    }
    VisitMatrix::from_visited_major(n, p).expect("mixture of distributions")
}

/// Entropy of the shared label in bits.
pub fn sr_amount(s: &CorrelatedStrategy) -> f64 {
    s.sr_bits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn point_mass_coins() {
        let s = MixedStrategy::new(vec![0.0, 1.0, 0.5], ProbVector::point(3, 1), ProbVector::point(3, 0)).unwrap();
        let m = visit_matrix_mixed(&s);
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn uniform_coins() {
        let s = MixedStrategy::new(vec![0.5; 4], ProbVector::uniform(4), ProbVector::uniform(4)).unwrap();
        let m = visit_matrix_mixed(&s);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), 0.25);
            }
        }
    }

    #[test]
    fn half_alpha_column() {
        let s = MixedStrategy::new(vec![0.0, 1.0, 0.5], pv(&[1.0, 0.0, 0.0]), pv(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(visit_matrix_mixed(&s).column(2), vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn correlated_normalises_and_drops() {
        let a = MixedStrategy::new(vec![1.0, 0.0], ProbVector::point(2, 1), ProbVector::point(2, 0)).unwrap();
        let c = CorrelatedStrategy::new(vec![(2.0, a.clone()), (0.0, a.clone()), (2.0, a.clone())]).unwrap();
        assert_eq!(c.branches().len(), 2);
        assert_eq!(c.sr_bits(), 1.0);
        assert_eq!(visit_matrix_correlated(&c), visit_matrix_mixed(&a));
        assert_eq!(sr_amount(&CorrelatedStrategy::single(a.clone())), 0.0);
        let three = CorrelatedStrategy::new(vec![(1.0, a.clone()); 3]).unwrap();
        assert!((sr_amount(&three) - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn deterministic_as_mixed() {
        let d = DeterministicStrategy::new(vec![1, 0, 0], [1, 0]).unwrap();
        assert_eq!(d.visit_matrix(), visit_matrix_mixed(&d.to_mixed()));
        assert!(DeterministicStrategy::new(vec![2, 0], [0, 1]).is_err());
        assert!(DeterministicStrategy::new(vec![1, 0], [0, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = MixedStrategy::new(vec![0.0, 1.0], ProbVector::point(2, 1), ProbVector::point(2, 0)).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"alpha":[0.0,1.0],"r":[0.0,1.0],"q":[1.0,0.0]}"#);
        assert_eq!(serde_json::from_str::<MixedStrategy>(&js).unwrap(), s);
        assert!(serde_json::from_str::<MixedStrategy>(r#"{"alpha":[2.0,1.0],"r":[0.0,1.0],"q":[1.0,0.0]}"#).is_err());
        let c = CorrelatedStrategy::new(vec![(1.0, s.clone()), (1.0, s)]).unwrap();
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<CorrelatedStrategy>(&js).unwrap(), c);
    }
}
