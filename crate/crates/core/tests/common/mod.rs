#![allow(dead_code)]

use commgames::classical::MixedStrategy;
use commgames::qubit::{BlochVector, Povm, QubitEffect, QubitStrategy};
use commgames::ProbVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat Dirichlet sample.
pub fn prob<R: Rng>(rng: &mut R, n: usize) -> ProbVector {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    ProbVector::normalized(w).unwrap()
}

pub fn mixed<R: Rng>(rng: &mut R, n: usize) -> MixedStrategy {
    let alpha = (0..n).map(|_| rng.random()).collect();
    MixedStrategy::new(alpha, prob(rng, n), prob(rng, n)).unwrap()
}

pub fn unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| 2.0 * rng.random::<f64>() - 1.0);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

pub fn bloch<R: Rng>(rng: &mut R) -> BlochVector {
    let u = unit(rng);
    let len = rng.random::<f64>().cbrt();
    BlochVector::new(u[0] * len, u[1] * len, u[2] * len).unwrap()
}

pub fn pure<R: Rng>(rng: &mut R) -> BlochVector {
    let u = unit(rng);
    BlochVector::new(u[0], u[1], u[2]).unwrap()
}

/// Any valid effect: `t` uniform in `[0, 1]`, then `|v| <= min(t, 1 − t)`.
pub fn effect<R: Rng>(rng: &mut R) -> QubitEffect {
    let t: f64 = rng.random();
    let u = unit(rng);
    let len = rng.random::<f64>() * t.min(1.0 - t);
    QubitEffect::new(t, u.map(|c| c * len)).unwrap()
}

/// `n`-outcome POVM from a random projective measurement coarse-grained by
/// a random stochastic relabelling.
pub fn povm<R: Rng>(rng: &mut R, n: usize) -> Povm {
    let axis = unit(rng);
    let (p0, p1) = (prob(rng, n), prob(rng, n));
    let eff = (0..n)
        .map(|m| QubitEffect::new((p0[m] + p1[m]) / 2.0, axis.map(|c| c * (p0[m] - p1[m]) / 2.0)).unwrap())
        .collect();
    Povm::new(eff).unwrap()
}

pub fn qubit_strategy<R: Rng>(rng: &mut R, n: usize) -> QubitStrategy {
    let enc = (0..n).map(|_| bloch(rng)).collect();
    QubitStrategy::new(enc, povm(rng, n)).unwrap()
}

/// Grid `k / res` over the `n`-simplex (compositions of `res`).
pub fn simplex_grid(n: usize, res: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, res: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / res as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, res, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, res, res, &mut Vec::new(), &mut out);
    out
}
