//! Exact winnability of non-strict games with one classical bit and only
//! local randomness.
//!
//! A winning mixed strategy never visits the closed Restaurant, so every
//! Restaurant with `γ_m > 0` is reached through exactly one of Bob's coins.
//! That splits the positive-γ set into `X` (reached through `r`, Alice sends
//! 1 when it is closed) and `Y` (reached through `q`, Alice sends 0), while
//! the zero-γ set `Z` sends 0 with average probability `ᾱ`. Marginals then
//! force `Σ_X γ = (|Y| + ᾱ|Z|)/n`, which is checked for every split.

use serde::{Deserialize, Serialize};

use super::strategy::MixedStrategy;
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::prob::ProbVector;
use crate::tol::{BOUNDARY_BAND, ENTRY_TOL, WIN_TOL};

/// Hard cap on `n`: splits are enumerated exhaustively.
pub const MAX_PARTITION_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    #[serde(rename = "X")]
    pub x: Vec<usize>,
    #[serde(rename = "Y")]
    pub y: Vec<usize>,
    #[serde(rename = "Z")]
    pub z: Vec<usize>,
    pub r: ProbVector,
    pub q: ProbVector,
    pub alpha_bar_z: f64,
}

/// One split of the positive-γ set and how far it is from working.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    /// `ᾱ` required by the marginal equations before clamping to `[0,1]`.
    pub alpha_bar_required: f64,
    /// Violation of the marginal equations in probability units.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MixedFeasibility {
    Feasible(PartitionCertificate),
    /// The best split misses by more than the win tolerance but less than
    /// the boundary band; floating point cannot settle it.
    BoundaryIndeterminate {
        certificate: PartitionCertificate,
        residual: f64,
    },
    Infeasible {
        partitions_checked: usize,
        min_residual: f64,
    },
}

impl MixedFeasibility {
    pub fn certificate(&self) -> Option<&PartitionCertificate> {
        match self {
            MixedFeasibility::Feasible(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, MixedFeasibility::Feasible(_))
    }
}

fn positive_and_zero(spec: &GameSpec) -> (Vec<usize>, Vec<usize>) {
    let g = spec.gamma().as_slice();
    let pos = (0..spec.n()).filter(|&i| g[i] > ENTRY_TOL).collect();
    let zero = (0..spec.n()).filter(|&i| g[i] <= ENTRY_TOL).collect();
    (pos, zero)
}

fn guard(spec: &GameSpec) -> Result<()> {
    if spec.is_strict() {
        return Err(Error::UnsupportedGame(
            "partition feasibility covers non-strict games only; strict games have dedicated checks"
                .into(),
        ));
    }
    if spec.n() > MAX_PARTITION_N {
        return Err(Error::ResourceLimit(format!(
            "partition enumeration is capped at n = {MAX_PARTITION_N}, got {}",
            spec.n()
        )));
    }
    Ok(())
}

/// Evaluates all `2^a - 2` splits of the `a` positive-γ Restaurants.
pub fn enumerate_partitions(spec: &GameSpec) -> Result<Vec<PartitionCheck>> {
    guard(spec)?;
    let n = spec.n() as f64;
    let g = spec.gamma().as_slice();
    let (pos, z) = positive_and_zero(spec);
    let a = pos.len();
    let mut out = Vec::with_capacity((1usize << a) - 2);
    for mask in 1..(1u64 << a) - 1 {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        let mut sx = 0.0;
        for (b, &i) in pos.iter().enumerate() {
            if mask >> b & 1 == 1 {
                x.push(i);
                sx += g[i];
            } else {
                y.push(i);
            }
        }
        let (alpha_bar_required, residual) = if z.is_empty() {
            (0.0, (n * sx - y.len() as f64).abs() / n)
        } else {
            let need = (n * sx - y.len() as f64) / z.len() as f64;
            let dist = if need < 0.0 {
                -need
            } else if need > 1.0 {
                need - 1.0
            } else {
                0.0
            };
            (need, dist * z.len() as f64 / n)
        };
        out.push(PartitionCheck {
            x,
            y,
            z: z.clone(),
            alpha_bar_required,
            residual,
        });
    }
    Ok(out)
}

fn certificate_for(spec: &GameSpec, c: &PartitionCheck) -> Result<PartitionCertificate> {
    let n = spec.n();
    let g = spec.gamma().as_slice();
    let coin = |set: &[usize]| {
        let mut v = vec![0.0; n];
        for &i in set {
            v[i] = g[i];
        }
        ProbVector::normalized(v)
    };
    Ok(PartitionCertificate {
        x: c.x.clone(),
        y: c.y.clone(),
        z: c.z.clone(),
        r: coin(&c.x)?,
        q: coin(&c.y)?,
        alpha_bar_z: if c.z.is_empty() {
            0.0
        } else {
            c.alpha_bar_required.clamp(0.0, 1.0)
        },
    })
}

/// Decides winnability of a non-strict game by one bit without shared
/// randomness.
pub fn mixed_feasibility(spec: &GameSpec) -> Result<MixedFeasibility> {
    let checks = enumerate_partitions(spec)?;
    let best = checks
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.residual.total_cmp(&b.residual).then(ia.cmp(ib)))
        .map(|(_, c)| c);
    let Some(best) = best else {
        return Ok(MixedFeasibility::Infeasible {
            partitions_checked: 0,
            min_residual: f64::INFINITY,
        });
    };
    // The first split that works in enumeration order is the canonical one.
    if let Some(c) = checks.iter().find(|c| c.residual <= WIN_TOL) {
        return Ok(MixedFeasibility::Feasible(certificate_for(spec, c)?));
    }
    if best.residual < BOUNDARY_BAND {
        return Ok(MixedFeasibility::BoundaryIndeterminate {
            certificate: certificate_for(spec, best)?,
            residual: best.residual,
        });
    }
    Ok(MixedFeasibility::Infeasible {
        partitions_checked: checks.len(),
        min_residual: best.residual,
    })
}

/// The strategy encoded by a certificate: `α = 0` on `X`, `1` on `Y` and
/// `ᾱ` on `Z`.
pub fn mixed_strategy_from_certificate(
    cert: &PartitionCertificate,
    spec: &GameSpec,
) -> Result<MixedStrategy> {
    let n = spec.n();
    let violation = |m: String| Err(Error::ContractViolation(m));
    if cert.r.len() != n || cert.q.len() != n {
        return violation(format!("certificate coins must have length {n}"));
    }
    let mut seen = vec![0u8; n];
    for &i in cert.x.iter().chain(&cert.y).chain(&cert.z) {
        if i >= n {
            return violation(format!("index {i} out of range for n = {n}"));
        }
        seen[i] += 1;
    }
    if seen.iter().any(|&c| c != 1) {
        return violation("X, Y, Z must partition the Restaurants".into());
    }
    if cert.x.is_empty() || cert.y.is_empty() {
        return violation("X and Y must be nonempty".into());
    }
    if !(0.0..=1.0).contains(&cert.alpha_bar_z) {
        return violation(format!("alpha_bar_z = {} outside [0,1]", cert.alpha_bar_z));
    }
    let outside = |coin: &ProbVector, set: &[usize]| {
        (0..n).any(|i| !set.contains(&i) && coin[i] > ENTRY_TOL)
    };
    if outside(&cert.r, &cert.x) || outside(&cert.q, &cert.y) {
        return violation("r must live on X and q on Y".into());
    }
    let mut alpha = vec![0.0; n];
    for &i in &cert.y {
        alpha[i] = 1.0;
    }
    for &i in &cert.z {
        alpha[i] = cert.alpha_bar_z;
    }
    MixedStrategy::new(alpha, cert.r.clone(), cert.q.clone())
}
