//! Two-input two-output no-signalling boxes and the 4-cup 2-ball game.
//!
//! A box is stored by its marginals `m_x = p(a=0|x)`, `n_y = p(b=0|y)` and
//! joints `c_xy = p(a=0,b=0|x,y)`; every other entry of the table follows, so
//! signalling boxes are unrepresentable. Validity is the Fréchet bound
//! `max{0, m_x + n_y − 1} <= c_xy <= min{m_x, n_y}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const BOX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct NsBox {
    pub m: [f64; 2],
    pub n: [f64; 2],
    pub c: [[f64; 2]; 2],
}

#[derive(Deserialize)]
struct RawBox {
    m: [f64; 2],
    n: [f64; 2],
    c: [[f64; 2]; 2],
}

impl TryFrom<RawBox> for NsBox {
    type Error = Error;
    fn try_from(r: RawBox) -> Result<Self> {
        Self::new(r.m, r.n, r.c)
    }
}

impl NsBox {
    pub fn new(m: [f64; 2], n: [f64; 2], c: [[f64; 2]; 2]) -> Result<Self> {
        for v in m.iter().chain(&n) {
            if !(0.0..=1.0).contains(v) {
                return Err(invalid(format!("marginal {v} outside [0,1]")));
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                let lo = (m[x] + n[y] - 1.0).max(0.0);
                let hi = m[x].min(n[y]);
                let v = c[x][y];
                if !v.is_finite() || v < lo - BOX_TOL || v > hi + BOX_TOL {
                    return Err(invalid(format!(
                        "c{x}{y} = {v} outside its Fréchet interval [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(Self { m, n, c })
    }

    /// Box with `a ⊕ b = f(x, y)` and uniform marginals.
    pub fn from_parity(f: impl Fn(usize, usize) -> bool) -> Self {
        let c = std::array::from_fn(|x| std::array::from_fn(|y| if f(x, y) { 0.0 } else { 0.5 }));
        Self {
            m: [0.5; 2],
            n: [0.5; 2],
            c,
        }
    }

    /// The PR box maximising the CHSH form used here: `a ⊕ b = (1 − x) y`.
    pub fn pr() -> Self {
        Self::from_parity(|x, y| x == 0 && y == 1)
    }

    /// Uniform product box.
    pub fn product() -> Self {
        Self {
            m: [0.5; 2],
            n: [0.5; 2],
            c: [[0.25; 2]; 2],
        }
    }

    /// `v · self + (1 − v) · other`; the parametrisation is affine.
    pub fn mix(&self, other: &NsBox, v: f64) -> Self {
        let l = |a: f64, b: f64| v * a + (1.0 - v) * b;
        Self {
            m: std::array::from_fn(|x| l(self.m[x], other.m[x])),
            n: std::array::from_fn(|y| l(self.n[y], other.n[y])),
            c: std::array::from_fn(|x| std::array::from_fn(|y| l(self.c[x][y], other.c[x][y]))),
        }
    }

    /// Outputs `a = fa(x)`, `b = fb(y)`.
    pub fn deterministic(fa: [u8; 2], fb: [u8; 2]) -> Self {
        let m = fa.map(|a| (a == 0) as u8 as f64);
        let n = fb.map(|b| (b == 0) as u8 as f64);
        let c = std::array::from_fn(|x| std::array::from_fn(|y| m[x] * n[y]));
        Self { m, n, c }
    }

    /// Marginals uniform, then each `c_xy` uniform in its Fréchet interval.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let m: [f64; 2] = [rng.random(), rng.random()];
        let n: [f64; 2] = [rng.random(), rng.random()];
        let c = std::array::from_fn(|x| {
            std::array::from_fn(|y| {
                let lo = (m[x] + n[y] - 1.0).max(0.0);
                let hi = f64::min(m[x], n[y]);
                lo + rng.random::<f64>() * (hi - lo)
            })
        });
        Self { m, n, c }
    }

    /// `p(a, b | x, y)`.
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        let (m, n, c) = (self.m[x], self.n[y], self.c[x][y]);
        match (a, b) {
            (0, 0) => c,
            (0, _) => m - c,
            (_, 0) => n - c,
            _ => 1.0 - m - n + c,
        }
    }

    /// Rows `xy = 00, 01, 10, 11`, columns `ab = 00, 01, 10, 11`.
    pub fn table(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|row| {
            let (x, y) = (row >> 1, row & 1);
            std::array::from_fn(|col| self.p(col >> 1, col & 1, x, y))
        })
    }

    /// `⟨x y⟩ = Σ_{a,b} (−1)^{a+b} p(ab|xy)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let sign = if a == b { 1.0 } else { -1.0 };
                s += sign * self.p(a, b, x, y);
            }
        }
        s
    }
}

/// `⟨x₀y₀⟩ − ⟨x₀y₁⟩ + ⟨x₁y₀⟩ + ⟨x₁y₁⟩ = 2 + 4(c00 − c01 + c10 + c11 − m1 − n0)`.
pub fn chsh(b: &NsBox) -> f64 {
    2.0 + 4.0 * (b.c[0][0] - b.c[0][1] + b.c[1][0] + b.c[1][1] - b.m[1] - b.n[0])
}

/// The same value summed from the correlators of the full table.
pub fn chsh_from_table(b: &NsBox) -> f64 {
    b.correlator(0, 0) - b.correlator(0, 1) + b.correlator(1, 0) + b.correlator(1, 1)
}

/// Cup pairs in reporting order (0-based cups).
pub const CUP_PAIRS: [[usize; 2]; 6] = [[0, 1], [2, 3], [0, 2], [1, 3], [0, 3], [1, 2]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CupGameOutcome {
    /// Success for pairs 12, 34, 13, 24, 14, 23.
    pub per_pair: [f64; 6],
    pub average: f64,
}

/// What Alice does for a pair: send a fixed bit, or feed `x` to the box and
/// send its output (optionally flipped).
#[derive(Debug, Clone, Copy)]
enum Alice {
    Send(usize),
    Box { x: usize, flip: bool },
}

const ALICE: [Alice; 6] = [
    Alice::Send(0),
    Alice::Send(1),
    Alice::Box { x: 0, flip: false },
    Alice::Box { x: 0, flip: true },
    Alice::Box { x: 1, flip: false },
    Alice::Box { x: 1, flip: true },
];

/// On bit `s` Bob inputs `y = s` and picks cup `2s + b`.
fn bob_cup(bit: usize, b: usize) -> usize {
    2 * bit + b
}

/// Plays the box-assisted one-bit strategy for every pair of cups.
pub fn cup_game_success(bx: &NsBox) -> CupGameOutcome {
    let per_pair = std::array::from_fn(|k| {
        let pair = CUP_PAIRS[k];
        let mut win = 0.0;
        for b in 0..2 {
            match ALICE[k] {
                Alice::Send(bit) => {
                    // Alice never touches the box; only Bob's marginal matters.
                    let pb = if b == 0 { bx.n[bit] } else { 1.0 - bx.n[bit] };
                    if pair.contains(&bob_cup(bit, b)) {
                        win += pb;
                    }
                }
                Alice::Box { x, flip } => {
                    for a in 0..2 {
                        let bit = a ^ flip as usize;
                        if pair.contains(&bob_cup(bit, b)) {
                            win += bx.p(a, b, x, bit);
                        }
                    }
                }
            }
        }
        win
    });
    CupGameOutcome {
        per_pair,
        average: per_pair.iter().sum::<f64>() / 6.0,
    }
}

/// `(8 + CHSH)/12`.
pub fn success_law(b: &NsBox) -> f64 {
    (8.0 + chsh(b)) / 12.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CupBound {
    pub value: f64,
    /// Bit Alice sends for each pair, in [`CUP_PAIRS`] order.
    pub encoding: [u8; 6],
    /// Cup Bob picks on bit 0 and on bit 1.
    pub decoding: [usize; 2],
}

/// Exhaustive search over deterministic one-bit strategies without a box;
/// with `constant_only`, Alice's bit ignores the pair.
pub fn classical_cup_bound(constant_only: bool) -> CupBound {
    cup_bound_over(&CUP_PAIRS, constant_only)
}

fn cup_bound_over(pairs: &[[usize; 2]; 6], constant_only: bool) -> CupBound {
    let mut best = CupBound {
        value: -1.0,
        encoding: [0; 6],
        decoding: [0, 0],
    };
    for mask in 0u32..64 {
        if constant_only && mask != 0 && mask != 63 {
            continue;
        }
        let enc: [u8; 6] = std::array::from_fn(|k| (mask >> k & 1) as u8);
        for d0 in 0..4 {
            for d1 in 0..4 {
                let dec = [d0, d1];
                let wins = pairs
                    .iter()
                    .zip(enc)
                    .filter(|(pair, bit)| pair.contains(&dec[*bit as usize]))
                    .count();
                let v = wins as f64 / 6.0;
                if v > best.value {
                    best = CupBound {
                        value: v,
                        encoding: enc,
                        decoding: dec,
                    };
                }
            }
        }
    }
    best
}
