//! Brute-force ground truth for tiny matches: exact zero-sum matrix-game
//! solving via support enumeration, backward-induction game values under
//! each abstraction, and the executable check that asymmetric abstractions
//! dominate uniform ones.
//!
//! The player under test is abstracted; the opponent always ranges over its
//! full legal action set. Matrices stay small because the recursion refuses
//! nodes whose joint action count exceeds a configurable limit.

use crate::abstraction::{enumerate_actions, AbstractionSpec};
use crate::engine::{ltd2, ready_units, EngineError, GameState, Player, PlayerAction};
use crate::real::{from_f64, Real};
use crate::scripts::Portfolio;
use crate::search::apply_for;

use std::collections::BTreeSet;

use crate::engine::UnitId;

/// Default cap on `|A_i| * |A_-i|` per oracle node.
pub const DEFAULT_EXPLOSION_LIMIT: u128 = 512;

/// Tolerance on the game-value inequalities, absorbing linear-solve round-off.
pub const THEOREM_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("node has {rows} x {cols} = {joint} joint actions, over the limit {limit}")]
    ActionExplosion { rows: u128, cols: u128, joint: u128, limit: u128 },
    #[error("support enumeration exhausted without finding an equilibrium")]
    SolverExhausted,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Zero-sum matrix game; entries are the row player's payoffs.
#[derive(Clone, Debug)]
pub struct MatrixGame<F> {
    payoff: Vec<Vec<F>>,
}

impl<F: Real> MatrixGame<F> {
    /// Builds a game from a nonempty rectangular payoff matrix.
    pub fn new(payoff: Vec<Vec<F>>) -> MatrixGame<F> {
        assert!(!payoff.is_empty() && !payoff[0].is_empty(), "matrix must be nonempty");
        let cols = payoff[0].len();
        assert!(payoff.iter().all(|r| r.len() == cols), "matrix must be rectangular");
        MatrixGame { payoff }
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn at(&self, r: usize, c: usize) -> F {
        self.payoff[r][c]
    }

    fn max_abs(&self) -> F {
        let mut m = F::one();
        for row in &self.payoff {
            for &v in row {
                if v.abs() > m {
                    m = v.abs();
                }
            }
        }
        m
    }
}

/// Value and optimal mixed strategies of a zero-sum game.
#[derive(Clone, Debug)]
pub struct GameValueResult<F> {
    pub value: F,
    pub row_strategy: Vec<F>,
    pub col_strategy: Vec<F>,
}

/// Gaussian elimination with partial pivoting; `None` on a singular system.
fn solve_linear<F: Real>(mut a: Vec<Vec<F>>, mut b: Vec<F>, scale: F) -> Option<Vec<F>> {
    let n = b.len();
    let tiny = scale * F::epsilon() * from_f64::<F>(64.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![F::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Lexicographic k-combinations of `0..n`.
struct Combinations {
    n: usize,
    k: usize,
    current: Vec<usize>,
    started: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Combinations {
        Combinations { n, k, current: (0..k).collect(), started: false }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.k > self.n {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        // advance rightmost index that can still move
        let mut i = self.k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.current[i] < self.n - (self.k - i) {
                break;
            }
        }
        self.current[i] += 1;
        for j in i + 1..self.k {
            self.current[j] = self.current[j - 1] + 1;
        }
        Some(self.current.clone())
    }
}

/// Solves `x` supported on `support` so the opponent is indifferent across
/// `indifferent`, plus the game value; unknowns are the weights and value.
fn support_solve<F: Real>(
    game: &MatrixGame<F>,
    support: &[usize],
    indifferent: &[usize],
    row_side: bool,
    scale: F,
) -> Option<(Vec<F>, F)> {
    let k = support.len();
    let mut a = vec![vec![F::zero(); k + 1]; k + 1];
    let mut b = vec![F::zero(); k + 1];
    for (eq, &other) in indifferent.iter().enumerate() {
        for (var, &own) in support.iter().enumerate() {
            a[eq][var] = if row_side { game.at(own, other) } else { game.at(other, own) };
        }
        a[eq][k] = -F::one();
    }
    for var in 0..k {
        a[k][var] = F::one();
    }
    b[k] = F::one();
    let solution = solve_linear(a, b, scale)?;
    let (weights, value) = solution.split_at(k);
    Some((weights.to_vec(), value[0]))
}

/// Exact value of the zero-sum game by Shapley-Snow support enumeration:
/// equal-size supports in ascending size, a linear solve per support pair,
/// feasibility and best-response checks within `1e-9` of the payoff scale.
pub fn solve_matrix_game<F: Real>(game: &MatrixGame<F>) -> Result<GameValueResult<F>, OracleError> {
    let (m, n) = (game.rows(), game.cols());
    let scale = game.max_abs();
    let tol = from_f64::<F>(1e-9) * scale;

    for k in 1..=m.min(n) {
        for rows in Combinations::new(m, k) {
            for cols in Combinations::new(n, k) {
                let Some((x, v)) = support_solve(game, &rows, &cols, true, scale) else {
                    continue;
                };
                let Some((y, w)) = support_solve(game, &cols, &rows, false, scale) else {
                    continue;
                };
                if (v - w).abs() > tol {
                    continue;
                }
                if x.iter().any(|&p| p < -tol) || y.iter().any(|&p| p < -tol) {
                    continue;
                }
                // column deviations must not pay less than v against x
                let col_ok = (0..n).all(|c| {
                    let payoff: F = rows
                        .iter()
                        .zip(&x)
                        .fold(F::zero(), |acc, (&r, &p)| acc + p * game.at(r, c));
                    payoff >= v - tol
                });
                // row deviations must not pay more than v against y
                let row_ok = (0..m).all(|r| {
                    let payoff: F = cols
                        .iter()
                        .zip(&y)
                        .fold(F::zero(), |acc, (&c, &p)| acc + p * game.at(r, c));
                    payoff <= v + tol
                });
                if !(col_ok && row_ok) {
                    continue;
                }
                let expand = |support: &[usize], weights: &[F], len: usize| {
                    let mut s = vec![F::zero(); len];
                    let mut total = F::zero();
                    for (&i, &p) in support.iter().zip(weights) {
                        let p = p.max(F::zero());
                        s[i] = p;
                        total = total + p;
                    }
                    for p in &mut s {
                        *p = *p / total;
                    }
                    s
                };
                return Ok(GameValueResult {
                    value: v,
                    row_strategy: expand(&rows, &x, m),
                    col_strategy: expand(&cols, &y, n),
                });
            }
        }
    }
    Err(OracleError::SolverExhausted)
}

/// Actions of `player` at `state` under `spec`; a player with no ready units
/// contributes exactly the empty action.
fn actions_or_empty(
    state: &GameState,
    player: Player,
    spec: &AbstractionSpec,
) -> Vec<PlayerAction> {
    if ready_units(state, player).is_empty() {
        vec![PlayerAction::empty()]
    } else {
        enumerate_actions(state, player, spec)
            .expect("ready units checked above")
            .collect()
    }
}

/// Optimal value of the game for `player` by backward induction: `player`'s
/// actions come from `spec`, the opponent's from the full legal set, leaves
/// and depth cutoffs score as LTD2, interior nodes solve the payoff matrix.
pub fn game_value<F: Real>(
    state: &GameState,
    player: Player,
    spec: &AbstractionSpec,
    depth: usize,
    explosion_limit: u128,
) -> Result<F, OracleError> {
    if state.is_terminal() || depth == 0 {
        return Ok(ltd2(state, player));
    }
    let own = actions_or_empty(state, player, spec);
    let opp = actions_or_empty(state, player.opponent(), &AbstractionSpec::unabstracted());
    let joint = own.len() as u128 * opp.len() as u128;
    if joint > explosion_limit {
        return Err(OracleError::ActionExplosion {
            rows: own.len() as u128,
            cols: opp.len() as u128,
            joint,
            limit: explosion_limit,
        });
    }
    let mut payoff = Vec::with_capacity(own.len());
    for a in &own {
        let mut row = Vec::with_capacity(opp.len());
        for b in &opp {
            let child = apply_for(state, player, a, b)?;
            row.push(game_value(&child, player, spec, depth - 1, explosion_limit)?);
        }
        payoff.push(row);
    }
    if payoff.len() == 1 && payoff[0].len() == 1 {
        return Ok(payoff[0][0]);
    }
    Ok(solve_matrix_game(&MatrixGame::new(payoff))?.value)
}

/// Game values under the uniform, asymmetric, and un-abstracted spaces, and
/// whether `v_uniform <= v_asymmetric <= v_full` holds within [`THEOREM_TOL`].
#[derive(Clone, Debug)]
pub struct Theorem1Report<F> {
    pub v_uniform: F,
    pub v_asymmetric: F,
    pub v_full: F,
    pub holds: bool,
}

pub fn theorem1_check<F: Real>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    unrestricted: &BTreeSet<UnitId>,
    depth: usize,
    explosion_limit: u128,
) -> Result<Theorem1Report<F>, OracleError> {
    let v_uniform = game_value(
        state,
        player,
        &AbstractionSpec::uniform(portfolio.clone()),
        depth,
        explosion_limit,
    )?;
    let v_asymmetric = game_value(
        state,
        player,
        &AbstractionSpec::asymmetric(portfolio.clone(), unrestricted.clone()),
        depth,
        explosion_limit,
    )?;
    let v_full =
        game_value(state, player, &AbstractionSpec::unabstracted(), depth, explosion_limit)?;
    let tol = from_f64::<F>(THEOREM_TOL);
    let holds = v_asymmetric >= v_uniform - tol && v_full >= v_asymmetric - tol;
    Ok(Theorem1Report { v_uniform, v_asymmetric, v_full, holds })
}
