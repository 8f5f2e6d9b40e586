use serde::{Deserialize, Serialize};

use super::{visit_matrix_polygon, DecodingElement, PolygonStrategy, PolygonTheory};
use crate::error::{invalid, Error, Result};
use crate::game::{check_game, GameSpec};
use crate::prob::ProbVector;
use crate::tol::WIN_TOL;

/// `H^n(1/n)` with `P_ly(2n)`: encode Restaurant `i` as the midpoint of the
/// edge `ω_{2i−1} ω_{2i}`, decode with `(2/n) ē_{2i}`, which vanishes
/// exactly on that edge.
pub fn synth_even_gon(n: usize) -> Result<PolygonStrategy> {
    if n < 3 {
        return Err(invalid(format!("even-gon strategy needs n >= 3, got {n}")));
    }
    let th = PolygonTheory::new(2 * n)?;
    let w = th.pure_states();
    let enc = (0..n)
        .map(|k| {
            let (a, b) = (w[2 * k], w[2 * k + 1]);
            [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, 1.0]
        })
        .collect();
    let dec = (0..n)
        .map(|k| DecodingElement {
            weight: 2.0 / n as f64,
            effect: th.complement(2 * k + 1),
            visit: ProbVector::point(n, k),
        })
        .collect();
    PolygonStrategy::new(2 * n, enc, dec)
}

/// One of the three square-bit encodings for `H^3`: Restaurants `a`, `b`
/// go to opposite-adjacent vertices and `c` to the edge between the other
/// two. Labels are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareFamily {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl SquareFamily {
    pub const ALL: [SquareFamily; 3] = [
        SquareFamily { a: 0, b: 1, c: 2 },
        SquareFamily { a: 0, b: 2, c: 1 },
        SquareFamily { a: 1, b: 2, c: 0 },
    ];

    /// Name by the vertex pair, e.g. `E(12)`.
    pub fn label(&self) -> String {
        format!("E({}{})", self.a + 1, self.b + 1)
    }

    /// How far `γ` is inside this family's region; valid iff `>= 0`.
    pub fn slack(&self, g: &[f64]) -> f64 {
        let floor = 1.0 / 3.0 - g[self.c] / 2.0;
        (g[self.a] - floor).min(g[self.b] - floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareSolution {
    pub family: SquareFamily,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub strategy: PolygonStrategy,
}

/// Any `H^3(γ)` with one square bit.
///
/// Decoding is `{p e_1, (1−p) e_2, p e_3, (1−p) e_4}`: `e_1 → c`,
/// `e_2 → b`, `e_4 → a`, `e_3 → a` with probability `r` else `b`. Encoding
/// `a → ω_1`, `b → ω_4`, `c → q ω_2 + (1−q) ω_3`. Then `γ_c = 2p/3` and
/// `3γ_a = (1−p) + p r + (1−p)(1−q)`, solved by `r = 1 − q = 3γ_a − (1−p)`.
pub fn synth_square_h3(spec: &GameSpec) -> Result<SquareSolution> {
    if spec.n() != 3 || spec.is_strict() {
        return Err(invalid("square-bit construction handles non-strict 3-Restaurant games"));
    }
    let g = spec.gamma().as_slice();
    // Largest slack; ties go to the earlier family.
    let family = SquareFamily::ALL
        .into_iter()
        .fold(SquareFamily::ALL[0], |best, f| if f.slack(g) > best.slack(g) { f } else { best });
    if family.slack(g) < -WIN_TOL {
        return Err(Error::NumericFailure {
            message: "no square-bit family covers the game".into(),
            residual: -family.slack(g),
        });
    }
    let p = (1.5 * g[family.c]).clamp(0.0, 1.0);
    let t = (3.0 * g[family.a] - (1.0 - p)).clamp(0.0, 1.0);
    let (r, q) = (t, 1.0 - t);
    let th = PolygonTheory::new(4)?;
    let w = th.pure_states();
    let e = th.effects();
    let mut enc = vec![[0.0; 3]; 3];
    enc[family.a] = w[0];
    enc[family.b] = w[3];
    enc[family.c] = [
        q * w[1][0] + (1.0 - q) * w[2][0],
        q * w[1][1] + (1.0 - q) * w[2][1],
        1.0,
    ];
    let visit = |dist: Vec<(usize, f64)>| {
        let mut v = vec![0.0; 3];
        for (k, x) in dist {
            v[k] += x;
        }
        ProbVector::normalized(v)
    };
    let dec = vec![
        DecodingElement { weight: p, effect: e[0], visit: ProbVector::point(3, family.c) },
        DecodingElement { weight: 1.0 - p, effect: e[1], visit: ProbVector::point(3, family.b) },
        DecodingElement {
            weight: p,
            effect: e[2],
            visit: visit(vec![(family.a, r), (family.b, 1.0 - r)])?,
        },
        DecodingElement { weight: 1.0 - p, effect: e[3], visit: ProbVector::point(3, family.a) },
    ];
    let strategy = PolygonStrategy::new(4, enc, dec)?;
    let v = check_game(spec, &visit_matrix_polygon(&strategy), WIN_TOL)?;
    if !v.wins {
        return Err(Error::NumericFailure {
            message: format!("square-bit strategy misses {:?}", v.witness),
            residual: v.max_violation,
        });
    }
    Ok(SquareSolution {
        family,
        p,
        q,
        r,
        strategy,
    })
}
