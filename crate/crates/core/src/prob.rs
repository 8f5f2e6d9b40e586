use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::tol::{ENTRY_TOL, PROB_SUM_TOL};

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("probability vector must be nonempty"));
        }
        for (i, &p) in entries.iter().enumerate() {
            if !p.is_finite() || !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&p) {
                return Err(invalid(format!("entry {i} = {p} outside [0,1]")));
            }
        }
        let s: f64 = entries.iter().sum();
        if (s - 1.0).abs() > PROB_SUM_TOL {
            return Err(invalid(format!("entries sum to {s}, not 1")));
        }
        Ok(Self(entries))
    }

    /// Scales nonnegative weights to sum 1.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(invalid("weights sum to zero"));
        }
        Self::new(weights.into_iter().map(|w| w / s).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self(v)
    }

    /// Uniform over the listed indices.
    pub fn uniform_on(n: usize, support: &[usize]) -> Self {
        assert!(!support.is_empty());
        let mut v = vec![0.0; n];
        for &k in support {
            v[k] = 1.0 / support.len() as f64;
        }
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .0
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.log2())
            .sum::<f64>()
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = crate::Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn entropy() {
        assert_eq!(ProbVector::uniform(2).entropy_bits(), 1.0);
        assert_eq!(ProbVector::point(3, 1).entropy_bits(), 0.0);
        assert!((ProbVector::uniform(3).entropy_bits() - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn serde_validates() {
        let p: ProbVector = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<ProbVector>("[0.25,0.25]").is_err());
    }
}
