//! `H^4[1/3]` with one classical bit and one bit of shared randomness.
//!
//! Two independent checks:
//!
//! * **symbolic** — a strategy is a pair of mixed strategies mixed with
//!   weight `λ ∈ (0,1)`. `p(j|j) = 0` forces, per Restaurant and branch,
//!   either `α_j = 0` or `r_j = 0`, and either `α_j = 1` or `q_j = 0`. Each
//!   Restaurant therefore carries a 4-bit string (bit 0/1 pick the first
//!   or second option for the `α r` term of branch 0, then the `(1-α) q`
//!   term of branch 0, then the same for branch 1). Pairwise compatibility
//!   of the strings leaves two candidate 4-subsets; each assignment of a
//!   subset to the Restaurants is refuted by an exact rational LP.
//! * **numeric** — multi-start projected-gradient descent over all 25
//!   parameters, reporting the smallest sup-norm residual found.

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::strategy::MixedStrategy;
use crate::lp::{LinearProgram, LpOutcome};
use crate::optim::{multistart, project_simplex, uniform_simplex};
use crate::prob::ProbVector;
use crate::tol::INFEASIBLE_RESIDUAL;

const N: usize = 4;
const TARGET: f64 = 1.0 / 3.0;

pub type Bits = [u8; 4];

fn bits_str(b: &Bits) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

/// The eight strings that do not force a contradiction on their own,
/// labelled `S1..S8` (three 1s first, then two, each in ascending order).
pub fn admissible_strings() -> Vec<Bits> {
    let mut out: Vec<Bits> = (0u8..16)
        .map(|v| [v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1])
        .filter(|b| {
            // α^(0) cannot be both 0 and 1, same for branch 1, and a
            // Restaurant that no coin can reach is never visited.
            !(b[0] == 0 && b[1] == 0) && !(b[2] == 0 && b[3] == 0) && b != &[1, 1, 1, 1]
        })
        .collect();
    out.sort_by_key(|b| {
        let ones: u8 = b.iter().sum();
        let val = b.iter().fold(0u8, |a, x| a << 1 | x);
        (std::cmp::Reverse(ones), val)
    });
    out
}

/// Whether `p(i|j)` can be nonzero when `i` carries `visited` and `j`
/// carries `closed`: some coin must be open at `i` (bit 0) while Alice can
/// still route to it from `j` (bit 1).
pub fn compatible(visited: &Bits, closed: &Bits) -> bool {
    (0..4).any(|t| visited[t] == 0 && closed[t] == 1)
}

/// All 4-subsets of admissible strings that are compatible in both
/// directions for every pair (indices into [`admissible_strings`]).
pub fn compatible_subsets() -> Vec<[usize; 4]> {
    let s = admissible_strings();
    let ok = |a: usize, b: usize| compatible(&s[a], &s[b]) && compatible(&s[b], &s[a]);
    let mut out = Vec::new();
    let k = s.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let set = [a, b, c, d];
                    if set
                        .iter()
                        .enumerate()
                        .all(|(x, &i)| set[x + 1..].iter().all(|&j| ok(i, j)))
                    {
                        out.push(set);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Alpha {
    Zero,
    One,
    Free,
}

/// Forced structure of one Restaurant in one branch.
#[derive(Debug, Clone, Copy)]
struct Slot {
    alpha: Alpha,
    r_open: bool,
    q_open: bool,
}

fn slots(b: &Bits) -> [Slot; 2] {
    let slot = |x: u8, y: u8| Slot {
        alpha: match (x, y) {
            (0, _) => Alpha::Zero,
            (_, 0) => Alpha::One,
            _ => Alpha::Free,
        },
        r_open: x == 0,
        q_open: y == 0,
    };
    [slot(b[0], b[1]), slot(b[2], b[3])]
}

fn weight_name(b: usize) -> &'static str {
    if b == 0 {
        "λ"
    } else {
        "(1−λ)"
    }
}

/// `p(i|j)` as text under the forced structure (1-based labels).
fn equation(assign: &[Bits; 4], i: usize, j: usize) -> String {
    let si = slots(&assign[i]);
    let sj = slots(&assign[j]);
    let mut parts = Vec::new();
    for b in 0..2 {
        let mut terms = Vec::new();
        if si[b].r_open {
            match sj[b].alpha {
                Alpha::One => terms.push(format!("r{}({b})", i + 1)),
                Alpha::Free => terms.push(format!("α{}({b})·r{}({b})", j + 1, i + 1)),
                Alpha::Zero => {}
            }
        }
        if si[b].q_open {
            match sj[b].alpha {
                Alpha::Zero => terms.push(format!("q{}({b})", i + 1)),
                Alpha::Free => terms.push(format!("(1−α{}({b}))·q{}({b})", j + 1, i + 1)),
                Alpha::One => {}
            }
        }
        match terms.len() {
            0 => {}
            1 => parts.push(format!("{}·{}", weight_name(b), terms[0])),
            _ => parts.push(format!("{}·({})", weight_name(b), terms.join(" + "))),
        }
    }
    let rhs = if i == j { "0" } else { "1/3" };
    let lhs = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    };
    format!("p({}|{})={lhs}={rhs}", i + 1, j + 1)
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Every α forced: `p(i|j)` is linear in the products `λ·coin`.
fn product_lp(assign: &[Bits; 4]) -> Option<LinearProgram<BigRational>> {
    let sl: Vec<[Slot; 2]> = assign.iter().map(slots).collect();
    if sl.iter().flatten().any(|s| s.alpha == Alpha::Free) {
        return None;
    }
    // Variables: λ, μ, then X[b][coin][i] for open coins.
    // Rows: λ+μ=1, four coin normalisations, 16 entries of the matrix.
    let rows = 1 + 4 + N * N;
    let mut lp = LinearProgram::<BigRational>::new(rows);
    lp.rhs[0] = q(1, 1);
    for i in 0..N {
        for j in 0..N {
            lp.rhs[5 + i * N + j] = if i == j { q(0, 1) } else { q(1, 3) };
        }
    }
    lp.add_column(vec![(0, q(1, 1)), (1, q(-1, 1)), (2, q(-1, 1))], None);
    lp.add_column(vec![(0, q(1, 1)), (3, q(-1, 1)), (4, q(-1, 1))], None);
    for b in 0..2 {
        for (coin, is_r) in [(0usize, true), (1, false)] {
            let norm_row = 1 + 2 * b + coin;
            for i in 0..N {
                let open = if is_r { sl[i][b].r_open } else { sl[i][b].q_open };
                if !open {
                    continue;
                }
                let mut col = vec![(norm_row, q(1, 1))];
                for j in 0..N {
                    let routed = matches!((sl[j][b].alpha, is_r), (Alpha::One, true) | (Alpha::Zero, false));
                    if routed {
                        col.push((5 + i * N + j, q(1, 1)));
                    }
                }
                lp.add_column(col, None);
            }
        }
    }
    Some(lp)
}

/// Every Restaurant reachable through a single coin `c(i)`: then
/// `p(i|j) = w_{c(i)}(j) · x_i` with `x_i ∈ (0,1]`, so `p(i|j) = 1/3` forces
/// the routing weight `w_{c(i)}(j)` (`α` or `1-α`) to equal a common
/// `y_i = 1/(3 x_i) >= 1/3` for all `j ≠ i` — linear in `(α, y)`.
fn routing_lp(assign: &[Bits; 4]) -> Option<LinearProgram<BigRational>> {
    let sl: Vec<[Slot; 2]> = assign.iter().map(slots).collect();
    let mut channel = Vec::with_capacity(N);
    for s in &sl {
        let open: Vec<(usize, bool)> = (0..2)
            .flat_map(|b| [(b, true, s[b].r_open), (b, false, s[b].q_open)])
            .filter(|x| x.2)
            .map(|(b, r, _)| (b, r))
            .collect();
        if open.len() != 1 {
            return None;
        }
        channel.push(open[0]);
    }
    // Variables: free α[b][j] (with slack to 1), y'_i = y_i - 1/3 >= 0.
    let mut free = Vec::new();
    for (j, s) in sl.iter().enumerate() {
        for b in 0..2 {
            if s[b].alpha == Alpha::Free {
                free.push((b, j));
            }
        }
    }
    let eq_rows = N * (N - 1);
    let rows = eq_rows + free.len();
    let mut lp = LinearProgram::<BigRational>::new(rows);
    let mut row = 0;
    let mut alpha_col: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); free.len()];
    let mut y_col: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); N];
    for i in 0..N {
        let (b, is_r) = channel[i];
        for j in 0..N {
            if i == j {
                continue;
            }
            // w(j) - y'_i = 1/3, with w = α or 1 - α.
            y_col[i].push((row, q(-1, 1)));
            let mut rhs = q(1, 3);
            match sl[j][b].alpha {
                Alpha::Free => {
                    let k = free.iter().position(|&f| f == (b, j)).expect("listed");
                    alpha_col[k].push((row, if is_r { q(1, 1) } else { q(-1, 1) }));
                    if !is_r {
                        rhs -= q(1, 1);
                    }
                }
                Alpha::One => rhs -= if is_r { q(1, 1) } else { q(0, 1) },
                Alpha::Zero => rhs -= if is_r { q(0, 1) } else { q(1, 1) },
            }
            lp.rhs[row] = rhs;
            row += 1;
        }
    }
    for (k, col) in alpha_col.iter_mut().enumerate() {
        col.push((eq_rows + k, q(1, 1)));
        lp.rhs[eq_rows + k] = q(1, 1);
    }
    for col in alpha_col {
        lp.add_column(col, None);
    }
    for col in y_col {
        lp.add_column(col, None);
    }
    for k in 0..free.len() {
        lp.add_column(vec![(eq_rows + k, q(1, 1))], None);
    }
    Some(lp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetAudit {
    /// Labels such as `S1`.
    pub members: Vec<String>,
    /// `"product-lp"` or `"routing-lp"`.
    pub method: String,
    pub assignments_checked: usize,
    pub all_infeasible: bool,
    /// The winning conditions for the identity assignment.
    pub equations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringAudit {
    /// `(label, bits)` for `S1..S8`.
    pub strings: Vec<(String, String)>,
    /// For each string, the strings it can be visited from.
    pub compatibility: Vec<(String, Vec<String>)>,
    pub subsets: Vec<SubsetAudit>,
    pub rejects_all: bool,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

pub fn string_audit() -> StringAudit {
    let s = admissible_strings();
    let label = |k: usize| format!("S{}", k + 1);
    let strings = s.iter().enumerate().map(|(k, b)| (label(k), bits_str(b))).collect();
    let compatibility = (0..s.len())
        .map(|a| {
            let list = (0..s.len())
                .filter(|&b| compatible(&s[a], &s[b]))
                .map(label)
                .collect();
            (label(a), list)
        })
        .collect();
    let subsets: Vec<SubsetAudit> = compatible_subsets()
        .into_iter()
        .map(|set| {
            let mut method = String::new();
            let mut all = true;
            let perms = permutations(4);
            for p in &perms {
                let assign: [Bits; 4] = std::array::from_fn(|i| s[set[p[i]]]);
                let (m, lp) = match product_lp(&assign) {
                    Some(lp) => ("product-lp", Some(lp)),
                    None => ("routing-lp", routing_lp(&assign)),
                };
                method = m.to_string();
                let infeasible = match lp {
                    Some(lp) => matches!(lp.solve(), Ok(LpOutcome::Infeasible)),
                    None => false,
                };
                all &= infeasible;
            }
            let assign: [Bits; 4] = std::array::from_fn(|i| s[set[i]]);
            let equations = (0..N)
                .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| equation(&assign, i, j))
                .collect();
            SubsetAudit {
                members: set.iter().map(|&k| label(k)).collect(),
                method,
                assignments_checked: perms.len(),
                all_infeasible: all,
                equations,
            }
        })
        .collect();
    let rejects_all = !subsets.is_empty() && subsets.iter().all(|x| x.all_infeasible);
    StringAudit {
        strings,
        compatibility,
        subsets,
        rejects_all,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Pin `λ` instead of searching over it.
    pub lambda: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 100_000,
            seed: 0x5eed_0001,
            iterations: 300,
            lambda: None,
        }
    }
}

/// Point in the 25-parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Params {
    lambda: f64,
    alpha: [[f64; N]; 2],
    r: [[f64; N]; 2],
    q: [[f64; N]; 2],
}

impl Params {
    fn matrix(&self) -> [[f64; N]; N] {
        let w = [self.lambda, 1.0 - self.lambda];
        let mut p = [[0.0; N]; N];
        for b in 0..2 {
            for i in 0..N {
                for j in 0..N {
                    let a = self.alpha[b][j];
                    p[i][j] += w[b] * (a * self.r[b][i] + (1.0 - a) * self.q[b][i]);
                }
            }
        }
        p
    }

    fn errors(&self) -> [[f64; N]; N] {
        let mut e = self.matrix();
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= if i == j { 0.0 } else { TARGET };
            }
        }
        e
    }

    fn loss(&self) -> f64 {
        self.errors().iter().flatten().map(|e| e * e).sum()
    }

    fn sup_residual(&self) -> f64 {
        self.errors().iter().flatten().fold(0.0, |m, e| m.max(e.abs()))
    }

    fn gradient(&self) -> Params {
        let e = self.errors();
        let w = [self.lambda, 1.0 - self.lambda];
        let mut g = Params {
            lambda: 0.0,
            alpha: [[0.0; N]; 2],
            r: [[0.0; N]; 2],
            q: [[0.0; N]; 2],
        };
        for b in 0..2 {
            let sign = if b == 0 { 1.0 } else { -1.0 };
            for i in 0..N {
                for j in 0..N {
                    let gij = 2.0 * e[i][j];
                    let a = self.alpha[b][j];
                    let base = a * self.r[b][i] + (1.0 - a) * self.q[b][i];
                    g.lambda += sign * gij * base;
                    g.alpha[b][j] += w[b] * gij * (self.r[b][i] - self.q[b][i]);
                    g.r[b][i] += w[b] * gij * a;
                    g.q[b][i] += w[b] * gij * (1.0 - a);
                }
            }
        }
        g
    }

    fn step(&self, g: &Params, t: f64, pin: bool) -> Params {
        let mut n = *self;
        if !pin {
            n.lambda = (self.lambda - t * g.lambda).clamp(0.0, 1.0);
        }
        for b in 0..2 {
            for k in 0..N {
                n.alpha[b][k] = (self.alpha[b][k] - t * g.alpha[b][k]).clamp(0.0, 1.0);
                n.r[b][k] = self.r[b][k] - t * g.r[b][k];
                n.q[b][k] = self.q[b][k] - t * g.q[b][k];
            }
            project_simplex(&mut n.r[b]);
            project_simplex(&mut n.q[b]);
        }
        n
    }

    fn random<R: Rng>(rng: &mut R, lambda: f64) -> Params {
        let mut p = Params {
            lambda,
            alpha: [[0.0; N]; 2],
            r: [[0.0; N]; 2],
            q: [[0.0; N]; 2],
        };
        for b in 0..2 {
            for k in 0..N {
                p.alpha[b][k] = rng.random();
            }
            p.r[b].copy_from_slice(&uniform_simplex(rng, N));
            p.q[b].copy_from_slice(&uniform_simplex(rng, N));
        }
        p
    }

    fn strategies(&self) -> (MixedStrategy, MixedStrategy) {
        let mk = |b: usize| {
            MixedStrategy::new(
                self.alpha[b].to_vec(),
                ProbVector::normalized(self.r[b].to_vec()).expect("simplex point"),
                ProbVector::normalized(self.q[b].to_vec()).expect("simplex point"),
            )
            .expect("valid by projection")
        };
        (mk(0), mk(1))
    }
}

fn descend(mut x: Params, iterations: usize, pin: bool) -> Params {
    let mut f = x.loss();
    let mut t = 0.5;
    for _ in 0..iterations {
        let g = x.gradient();
        let mut accepted = false;
        for _ in 0..30 {
            let y = x.step(&g, t, pin);
            let fy = y.loss();
            if fy < f {
                let gain = f - fy;
                x = y;
                f = fy;
                t *= 1.5;
                accepted = true;
                if gain < 1e-18 {
                    return x;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSearch {
    pub starts: usize,
    pub min_residual: f64,
    pub best_start: usize,
    pub lambda: f64,
    pub branches: (MixedStrategy, MixedStrategy),
}

/// Grid over `λ` (cycled across starts) plus random restarts of everything
/// else, each refined by projected gradient on the squared residual.
pub fn numeric_search(cfg: &SearchConfig) -> NumericSearch {
    const GRID: usize = 19;
    let pin = cfg.lambda.is_some();
    let best = multistart(cfg.starts.max(1), cfg.seed, |i, rng| {
        let lambda = cfg.lambda.unwrap_or((i % GRID + 1) as f64 / (GRID + 1) as f64);
        let x = descend(Params::random(rng, lambda), cfg.iterations, pin);
        (x.sup_residual(), x)
    })
    .expect("at least one start");
    NumericSearch {
        starts: cfg.starts.max(1),
        min_residual: best.value,
        best_start: best.start,
        lambda: best.payload.lambda,
        branches: best.payload.strategies(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strict1BitSrReport {
    /// `min_residual > 1e-3`.
    pub infeasible: bool,
    pub min_residual: f64,
    pub numeric: NumericSearch,
    pub certificate: StringAudit,
}

pub fn strict_1bitsr_infeasibility(cfg: &SearchConfig) -> Strict1BitSrReport {
    let numeric = numeric_search(cfg);
    Strict1BitSrReport {
        infeasible: numeric.min_residual > INFEASIBLE_RESIDUAL,
        min_residual: numeric.min_residual,
        numeric,
        certificate: string_audit(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_admissible_strings_in_order() {
        let names: Vec<String> = admissible_strings().iter().map(bits_str).collect();
        assert_eq!(
            names,
            ["0111", "1011", "1101", "1110", "0101", "0110", "1001", "1010"]
        );
    }

    #[test]
    fn two_compatible_subsets() {
        assert_eq!(compatible_subsets(), vec![[0, 1, 2, 3], [4, 5, 6, 7]]);
    }

    #[test]
    fn compatibility_rows_match_the_table() {
        let a = string_audit();
        let row = |l: &str| a.compatibility.iter().find(|(k, _)| k == l).unwrap().1.clone();
        assert_eq!(row("S1"), ["S2", "S3", "S4", "S7", "S8"]);
        assert_eq!(row("S5"), ["S1", "S2", "S3", "S4", "S6", "S7", "S8"]);
        assert_eq!(row("S2"), ["S1", "S3", "S4", "S5", "S6"]);
    }

    #[test]
    fn both_subsets_contradict() {
        let a = string_audit();
        assert!(a.rejects_all);
        assert_eq!(a.subsets[0].method, "routing-lp");
        assert_eq!(a.subsets[1].method, "product-lp");
        assert!(a.subsets.iter().all(|s| s.assignments_checked == 24));
        let eq = &a.subsets[0].equations;
        assert!(eq.contains(&"p(1|2)=λ·r1(0)=1/3".to_string()), "{eq:?}");
        assert!(eq.contains(&"p(1|3)=λ·α3(0)·r1(0)=1/3".to_string()));
    }

    #[test]
    fn routing_lp_needs_single_channels() {
        let s = admissible_strings();
        assert!(routing_lp(&[s[0], s[1], s[2], s[4]]).is_none());
        assert!(product_lp(&[s[0], s[1], s[2], s[3]]).is_none());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::optim::stream_rng(3, 0);
        let x = Params::random(&mut rng, 0.4);
        let g = x.gradient();
        let h = 1e-6;
        let mut y = x;
        y.lambda += h;
        let mut z = x;
        z.lambda -= h;
        assert!(((y.loss() - z.loss()) / (2.0 * h) - g.lambda).abs() < 1e-7);
        let mut y = x;
        y.alpha[1][2] += h;
        let mut z = x;
        z.alpha[1][2] -= h;
        assert!(((y.loss() - z.loss()) / (2.0 * h) - g.alpha[1][2]).abs() < 1e-7);
        let mut y = x;
        y.q[0][3] += h;
        let mut z = x;
        z.q[0][3] -= h;
        assert!(((y.loss() - z.loss()) / (2.0 * h) - g.q[0][3]).abs() < 1e-7);
    }

    #[test]
    fn small_numeric_search_stays_away_from_zero() {
        let r = numeric_search(&SearchConfig {
            starts: 500,
            ..Default::default()
        });
        assert!(r.min_residual > 1e-3, "{}", r.min_residual);
        let pinned = numeric_search(&SearchConfig {
            starts: 300,
            lambda: Some(0.0),
            ..Default::default()
        });
        assert!(pinned.min_residual > 1e-3);
        assert_eq!(pinned.lambda, 0.0);
    }
}
