//! Qubit strategies that a classical bit reproduces exactly.

use super::{born_probability, BlochVector, Povm, QubitEffect, QubitStrategy, QUBIT_TOL};
use crate::classical::strategy::MixedStrategy;
use crate::error::{Error, Result};
use crate::prob::ProbVector;

fn coin(state: &BlochVector, povm: &Povm) -> Result<ProbVector> {
    let p = povm
        .effects()
        .iter()
        .map(|e| born_probability(state, e).max(0.0))
        .collect();
    ProbVector::normalized(p)
}

/// Encodings drawn from one antipodal pair `±m̂` of pure states.
///
/// Alice sends 0 for `+m̂`; Bob's coins are the outcome distributions of the
/// POVM on `+m̂` and on `−m̂`. Noise declared on the strategy is applied
/// first, so encoding noise breaks the precondition.
pub fn simulate_orthogonal_encoding(s: &QubitStrategy) -> Result<MixedStrategy> {
    let e = s.effective();
    let enc = e.encodings();
    if let Some((k, _)) = enc.iter().enumerate().find(|(_, v)| !v.is_pure()) {
        return Err(Error::ContractViolation(format!(
            "encoding {} is not a pure state",
            k + 1
        )));
    }
    let m = enc[0];
    let mut alpha = Vec::with_capacity(enc.len());
    for (k, v) in enc.iter().enumerate() {
        let d = v.dot(&m);
        if (d - 1.0).abs() <= QUBIT_TOL {
            alpha.push(1.0);
        } else if (d + 1.0).abs() <= QUBIT_TOL {
            alpha.push(0.0);
        } else {
            return Err(Error::ContractViolation(format!(
                "encoding {} is neither equal nor orthogonal to encoding 1",
                k + 1
            )));
        }
    }
    MixedStrategy::new(alpha, coin(&m, e.decoding())?, coin(&m.neg(), e.decoding())?)
}

fn basis_pair(axis: &BlochVector) -> Result<[QubitEffect; 2]> {
    if !axis.is_pure() {
        return Err(Error::ContractViolation(
            "projective basis needs a unit Bloch axis".into(),
        ));
    }
    Ok([QubitEffect::along(1.0, axis)?, QubitEffect::along(1.0, &axis.neg())?])
}

/// The qubit strategy that measures along `axis` and relabels outcome `b`
/// through `postprocess[b]`: `E_m = Σ_b postprocess[b]_m P_b`.
pub fn projective_strategy(
    encodings: Vec<BlochVector>,
    axis: &BlochVector,
    postprocess: &[ProbVector; 2],
) -> Result<QubitStrategy> {
    let n = encodings.len();
    for p in postprocess {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                what: "postprocessing distribution",
                expected: n,
                found: p.len(),
            });
        }
    }
    let a = axis.as_array();
    let eff = (0..n)
        .map(|m| {
            let (p0, p1) = (postprocess[0][m], postprocess[1][m]);
            QubitEffect::new((p0 + p1) / 2.0, a.map(|c| c * (p0 - p1) / 2.0))
        })
        .collect::<Result<Vec<_>>>()?;
    QubitStrategy::new(encodings, Povm::new(eff)?)
}

/// A two-outcome projective measurement followed by classical relabelling is
/// a classical source: Restaurant `k` emits 0 with the Born probability of
/// the `+axis` projector, and Bob applies the relabelling.
pub fn simulate_projective_decoding(
    encodings: &[BlochVector],
    axis: &BlochVector,
    postprocess: &[ProbVector; 2],
) -> Result<MixedStrategy> {
    let [p0, _] = basis_pair(axis)?;
    let alpha = encodings
        .iter()
        .map(|e| born_probability(e, &p0).clamp(0.0, 1.0))
        .collect();
    MixedStrategy::new(alpha, postprocess[0].clone(), postprocess[1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::strategy::visit_matrix_mixed;
    use crate::qubit::{synth_sic_strict, trine_strategy, visit_matrix_qubit};

    #[test]
    fn computational_pair_with_sic_decoding() {
        let z = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let enc = vec![z, z.neg(), z, z.neg()];
        let s = QubitStrategy::new(enc, synth_sic_strict().decoding().clone()).unwrap();
        let c = simulate_orthogonal_encoding(&s).unwrap();
        assert!(visit_matrix_mixed(&c).max_abs_diff(&visit_matrix_qubit(&s)) < 1e-15);
    }

    #[test]
    fn computational_measurement_is_deterministic() {
        let z = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let povm = Povm::new(vec![
            QubitEffect::along(1.0, &z).unwrap(),
            QubitEffect::along(1.0, &z.neg()).unwrap(),
        ])
        .unwrap();
        let s = QubitStrategy::new(vec![z, z.neg()], povm).unwrap();
        let c = simulate_orthogonal_encoding(&s).unwrap();
        assert_eq!(c.r().as_slice(), &[1.0, 0.0]);
        assert_eq!(c.q().as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_non_antipodal() {
        assert!(matches!(
            simulate_orthogonal_encoding(&trine_strategy()),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn trine_under_sigma_z() {
        let enc = trine_strategy().encodings().to_vec();
        let z = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let post = [
            ProbVector::new(vec![0.2, 0.5, 0.3]).unwrap(),
            ProbVector::point(3, 0),
        ];
        let q = projective_strategy(enc.clone(), &z, &post).unwrap();
        let c = simulate_projective_decoding(&enc, &z, &post).unwrap();
        assert!(visit_matrix_mixed(&c).max_abs_diff(&visit_matrix_qubit(&q)) < 1e-15);
    }

    #[test]
    fn constant_source() {
        let z = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let post = [ProbVector::point(3, 2), ProbVector::point(3, 1)];
        let c = simulate_projective_decoding(&[z; 3], &z, &post).unwrap();
        let m = visit_matrix_mixed(&c);
        for k in 0..3 {
            assert_eq!(m.column(k), vec![0.0, 0.0, 1.0]);
        }
    }
}
