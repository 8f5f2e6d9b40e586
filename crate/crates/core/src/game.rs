//! Restaurant games, visit matrices and winning verdicts.
//!
//! Restaurants are indexed `0..n` in code and JSON; human-readable witnesses
//! use 1-based labels.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::prob::ProbVector;
use crate::tol::{ENTRY_TOL, PROB_SUM_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame")]
pub struct GameSpec {
    n: usize,
    gamma: ProbVector,
    strict: bool,
}

#[derive(Deserialize)]
struct RawGame {
    n: usize,
    gamma: Vec<f64>,
    #[serde(default)]
    strict: bool,
}

impl TryFrom<RawGame> for GameSpec {
    type Error = Error;
    fn try_from(raw: RawGame) -> Result<Self> {
        if raw.gamma.len() != raw.n {
            return Err(Error::DimensionMismatch {
                what: "gamma",
                expected: raw.n,
                found: raw.gamma.len(),
            });
        }
        GameSpec::new(raw.gamma, raw.strict)
    }
}

impl GameSpec {
    pub fn new(gamma: Vec<f64>, strict: bool) -> Result<Self> {
        let n = gamma.len();
        if n < 2 {
            return Err(invalid(format!("a game needs at least 2 Restaurants, got {n}")));
        }
        let gamma = ProbVector::new(gamma)?;
        let cap = 1.0 - 1.0 / n as f64;
        if let Some((k, g)) = gamma
            .as_slice()
            .iter()
            .enumerate()
            .find(|(_, &g)| g > cap + ENTRY_TOL)
        {
            return Err(invalid(format!(
                "unphysical game: gamma_{} = {g} exceeds 1 - 1/n = {cap}",
                k + 1
            )));
        }
        if strict {
            let u = 1.0 / n as f64;
            if gamma.as_slice().iter().any(|g| (g - u).abs() > PROB_SUM_TOL) {
                return Err(invalid("a strict game requires uniform gamma"));
            }
        }
        Ok(Self { n, gamma, strict })
    }

    /// `H^n(γ)`.
    pub fn non_strict(gamma: Vec<f64>) -> Result<Self> {
        Self::new(gamma, false)
    }

    /// `H^n(1/n)`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("a game needs at least 2 Restaurants, got {n}")));
        }
        Self::new(vec![1.0 / n as f64; n], false)
    }

    /// `H^n[1/(n-1)]`.
    pub fn strict(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("a game needs at least 2 Restaurants, got {n}")));
        }
        Self::new(vec![1.0 / n as f64; n], true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &ProbVector {
        &self.gamma
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }
}

/// `p(visited | closed)` for a single game round.
///
/// Stored visited-major: `get(i, j)` is the probability of visiting `i` when
/// `j` is closed. JSON mirrors the printed matrices, one row per closed
/// Restaurant (`"orientation": "closed-major"`).
#[derive(Debug, Clone, PartialEq)]
pub struct VisitMatrix {
    n: usize,
    p: Vec<f64>,
}

/// Column sums may drift this far in composed constructions.
const COLUMN_SUM_TOL: f64 = 1e-9;

impl VisitMatrix {
    /// Builds from a function `(visited, closed) -> probability`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] = f(i, j);
            }
        }
        Self::from_visited_major(n, p)
    }

    pub fn from_visited_major(n: usize, p: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("visit matrix must be nonempty"));
        }
        if p.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "visit matrix entries",
                expected: n * n,
                found: p.len(),
            });
        }
        let m = Self { n, p };
        m.validate()?;
        Ok(m)
    }

    /// Rows indexed by the closed Restaurant.
    pub fn from_closed_major(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "visit matrix row",
                expected: n,
                found: r.len(),
            });
        }
        Self::from_fn(n, |i, j| rows[j][i])
    }

    fn validate(&self) -> Result<()> {
        for j in 0..self.n {
            let mut s = 0.0;
            for i in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() || !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&v) {
                    return Err(invalid(format!("p({}|{}) = {v} outside [0,1]", i + 1, j + 1)));
                }
                s += v;
            }
            if (s - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(invalid(format!(
                    "visit distribution for closed Restaurant {} sums to {s}",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, visited: usize, closed: usize) -> f64 {
        self.p[visited * self.n + closed]
    }

    /// The visit distribution when `closed` is closed.
    pub fn column(&self, closed: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, closed)).collect()
    }

    pub fn to_closed_major(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn to_visited_major(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.p[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// `γ_i = (1/n) Σ_j p(i|j)` under the uniform closing prior.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.p[i * self.n..(i + 1) * self.n].iter().sum::<f64>() / self.n as f64)
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &VisitMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The strict target `(1-δ_ij)/(n-1)`.
    pub fn strict_target(n: usize) -> Self {
        let off = 1.0 / (n as f64 - 1.0);
        Self::from_fn(n, |i, j| if i == j { 0.0 } else { off }).expect("valid by construction")
    }
}

#[derive(Serialize, Deserialize)]
struct RawVisitMatrix {
    n: usize,
    p: Vec<Vec<f64>>,
    orientation: String,
}

impl Serialize for VisitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawVisitMatrix {
            n: self.n,
            p: self.to_closed_major(),
            orientation: "closed-major".into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VisitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawVisitMatrix::deserialize(d)?;
        if raw.orientation != "closed-major" {
            return Err(D::Error::custom(format!(
                "unsupported orientation {:?}, expected \"closed-major\"",
                raw.orientation
            )));
        }
        if raw.p.len() != raw.n {
            return Err(D::Error::custom(format!(
                "matrix has {} rows but n = {}",
                raw.p.len(),
                raw.n
            )));
        }
        VisitMatrix::from_closed_major(&raw.p).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub wins: bool,
    pub max_violation: f64,
    pub witness: Option<String>,
}

/// Checks a visit matrix against a game's winning conditions.
pub fn check_game(spec: &GameSpec, vm: &VisitMatrix, tol: f64) -> Result<Verdict> {
    if vm.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            what: "visit matrix vs game",
            expected: spec.n(),
            found: vm.n(),
        });
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = spec.n();
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut note = |dev: f64, text: &dyn Fn() -> String| {
        if dev > worst {
            worst = dev;
            witness = text();
        }
    };
    if spec.is_strict() {
        let off = 1.0 / (n as f64 - 1.0);
        for j in 0..n {
            for i in 0..n {
                let want = if i == j { 0.0 } else { off };
                let got = vm.get(i, j);
                note((got - want).abs(), &|| {
                    format!("p({}|{})={got}≠{want}", i + 1, j + 1)
                });
            }
        }
    } else {
        for i in 0..n {
            let d = vm.get(i, i);
            note(d.abs(), &|| format!("p({0}|{0})={d}≠0", i + 1));
        }
        let marg = vm.marginals();
        for (i, (&m, &g)) in marg.iter().zip(spec.gamma().as_slice()).enumerate() {
            note((m - g).abs(), &|| {
                format!("(1/n)Σ_j p({}|j)={m}≠γ_{}={g}", i + 1, i + 1)
            });
        }
    }
    let wins = worst <= tol;
    Ok(Verdict {
        wins,
        max_violation: worst,
        witness: if wins { None } else { Some(witness) },
    })
}

/// All ordered placements of `((n-1)/n, 1/n, 0, ..., 0)`.
pub fn game_space_extreme_points(n: usize) -> Result<Vec<GameSpec>> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2, got {n}")));
    }
    let mut out = Vec::with_capacity(n * (n - 1));
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push(GameSpec::non_strict(extreme_gamma(n, a, b))?);
            }
        }
    }
    Ok(out)
}

/// `γ_a = (n-1)/n`, `γ_b = 1/n`, zero elsewhere.
pub fn extreme_gamma(n: usize, a: usize, b: usize) -> Vec<f64> {
    let mut g = vec![0.0; n];
    g[a] = (n as f64 - 1.0) / n as f64;
    g[b] = 1.0 / n as f64;
    g
}

pub fn convex_mix(matrices: &[VisitMatrix], weights: &ProbVector) -> Result<VisitMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| invalid("convex_mix needs at least one matrix"))?;
    if weights.len() != matrices.len() {
        return Err(Error::DimensionMismatch {
            what: "mixture weights",
            expected: matrices.len(),
            found: weights.len(),
        });
    }
    let n = first.n();
    let mut p = vec![0.0; n * n];
    for (m, &w) in matrices.iter().zip(weights.as_slice()) {
        if m.n() != n {
            return Err(Error::DimensionMismatch {
                what: "mixed matrix",
                expected: n,
                found: m.n(),
            });
        }
        for (acc, v) in p.iter_mut().zip(&m.p) {
            *acc += w * v;
        }
    }
    VisitMatrix::from_visited_major(n, p)
}
