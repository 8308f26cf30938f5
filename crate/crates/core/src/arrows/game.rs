use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible difference between the two sides' guarantees.
pub const GAP_TOLERANCE: f64 = 1e-6;

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;

/// Optimal strategies of the zero-sum game in which the row player pays
/// `m[i][c]` to the column player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    pub value: f64,
    /// Minimizing row player.
    pub rows: Vec<f64>,
    /// Maximizing column player.
    pub columns: Vec<f64>,
    /// `max_c (rowsᵀ m)_c - min_i (m columns)_i`.
    pub gap: f64,
}

/// Solve the matrix game by the simplex method (Bland's rule) on
/// `max Σx  s.t.  (m + s)ᵀ x ≤ 1, x ≥ 0`, with the shift `s` making every
/// entry at least one. The dual gives the column strategy.
pub fn solve_matrix_game(m: &[Vec<f64>]) -> Result<GameSolution> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("a matrix game needs a non-empty rectangular matrix".into()));
    }
    let lo = m.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - lo;
    // Tableau: one row per game column, variables x_0..x_rows then slacks.
    let width = rows + cols + 1;
    let mut t = vec![vec![0.0; width]; cols + 1];
    for c in 0..cols {
        for i in 0..rows {
            t[c][i] = m[i][c] + shift;
        }
        t[c][rows + c] = 1.0;
        t[c][width - 1] = 1.0;
    }
    for i in 0..rows {
        t[cols][i] = -1.0;
    }
    let mut basis: Vec<usize> = (rows..rows + cols).collect();
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..width - 1).find(|&j| t[cols][j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for r in 0..cols {
            if t[r][enter] > PIVOT_EPS {
                let ratio = t[r][width - 1] / t[r][enter];
                leave = match leave {
                    None => Some(r),
                    Some(l) => {
                        let best = t[l][width - 1] / t[l][enter];
                        if ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[r] < basis[l]) {
                            Some(r)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        let Some(leave) = leave else {
            return Err(Error::Internal("game LP is unbounded".into()));
        };
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Internal("game LP did not terminate".into()));
        }
        let p = t[leave][enter];
        for x in t[leave].iter_mut() {
            *x /= p;
        }
        let pivot_row = t[leave].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != leave {
                let f = row[enter];
                if f != 0.0 {
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        basis[leave] = enter;
    }
    let total = t[cols][width - 1];
    if !(total > 0.0) {
        return Err(Error::Internal("game LP has a non-positive optimum".into()));
    }
    let mut x = vec![0.0; rows];
    for (r, &v) in basis.iter().enumerate() {
        if v < rows {
            x[v] = t[r][width - 1];
        }
    }
    let y: Vec<f64> = (0..cols).map(|c| t[cols][rows + c].max(0.0)).collect();
    let normalize = |v: Vec<f64>| {
        let v: Vec<f64> = v.into_iter().map(|a| a.max(0.0)).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|a| a / s).collect::<Vec<f64>>()
    };
    let rows_strategy = normalize(x);
    let cols_strategy = normalize(y);
    let upper = (0..cols)
        .map(|c| (0..rows).map(|i| rows_strategy[i] * m[i][c]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = (0..rows)
        .map(|i| (0..cols).map(|c| m[i][c] * cols_strategy[c]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let gap = upper - lower;
    if gap > GAP_TOLERANCE {
        return Err(Error::Internal(format!("game LP duality gap {gap} exceeds tolerance")));
    }
    Ok(GameSolution {
        value: 1.0 / total - shift,
        rows: rows_strategy,
        columns: cols_strategy,
        gap: gap.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn matching_pennies() {
        let s = solve_matrix_game(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(close(s.value, 0.0));
        assert!(close(s.rows[0], 0.5) && close(s.columns[0], 0.5));
    }

    #[test]
    fn dominated_rows() {
        // the minimizer always prefers the second row
        let s = solve_matrix_game(&[vec![3.0, 4.0], vec![1.0, 2.0]]).unwrap();
        assert!(close(s.value, 2.0));
        assert!(close(s.rows[1], 1.0));
        assert!(close(s.columns[1], 1.0));
    }

    #[test]
    fn rock_paper_scissors() {
        let m = vec![
            vec![0.0, 1.0, -1.0],
            vec![-1.0, 0.0, 1.0],
            vec![1.0, -1.0, 0.0],
        ];
        let s = solve_matrix_game(&m).unwrap();
        assert!(close(s.value, 0.0));
        assert!(s.rows.iter().all(|&p| close(p, 1.0 / 3.0)));
    }

    #[test]
    fn degenerate_ties_terminate() {
        let m = vec![vec![0.0; 4]; 5];
        let s = solve_matrix_game(&m).unwrap();
        assert!(close(s.value, 0.0));
        assert!(solve_matrix_game(&[]).is_err());
    }
}
