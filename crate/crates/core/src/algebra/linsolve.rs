use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{common_denominator, Rational};
use crate::error::{Error, Result};

/// Outcome of [`solve_linear_exact`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// One particular solution (free variables set to zero) together with the
    /// dimension of the kernel of `A`.
    Solved {
        solution: Vec<Rational>,
        kernel_rank: usize,
    },
    Inconsistent,
}

impl LinearSolution {
    pub fn unique(&self) -> Option<&[Rational]> {
        match self {
            LinearSolution::Solved { solution, kernel_rank: 0 } => Some(solution),
            _ => None,
        }
    }
}

/// Solves `A x = b` exactly.
///
/// Each row is first cleared of denominators, then reduced to row-echelon
/// form by fraction-free (Bareiss) elimination so intermediate entries stay
/// integral minors of the input.
pub fn solve_linear_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<LinearSolution> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix has {} rows but right-hand side has {} entries",
            a.len(),
            b.len()
        )));
    }
    let cols = a.first().map_or(0, Vec::len);
    if let Some(row) = a.iter().position(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch(format!("row {row} has {} entries, expected {cols}", a[row].len())));
    }

    // Integer augmented matrix; scaling a row does not change the solution set.
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let den = common_denominator(row.iter().chain(std::iter::once(rhs)));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect();

    let rows = m.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in (c + 1)..=cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(LinearSolution::Inconsistent);
    }

    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let row = &m[i];
        let mut acc = Rational::from_integer(row[cols].clone());
        for j in (c + 1)..cols {
            if !row[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[c] = acc / Rational::from_integer(row[c].clone());
    }

    Ok(LinearSolution::Solved { solution: x, kernel_rank: cols - pivots.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn identity_system() {
        let s = solve_linear_exact(&m(&[&[1, 0], &[0, 1]]), &[int(3), int(4)]).unwrap();
        assert_eq!(s, LinearSolution::Solved { solution: vec![int(3), int(4)], kernel_rank: 0 });
    }

    #[test]
    fn underdetermined_system() {
        let s = solve_linear_exact(&m(&[&[1, 1]]), &[int(1)]).unwrap();
        match s {
            LinearSolution::Solved { solution, kernel_rank } => {
                assert_eq!(kernel_rank, 1);
                assert_eq!(&solution[0] + &solution[1], int(1));
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn contradictory_rows() {
        let s = solve_linear_exact(&m(&[&[1], &[1]]), &[int(0), int(1)]).unwrap();
        assert_eq!(s, LinearSolution::Inconsistent);
    }

    #[test]
    fn shape_mismatch() {
        let err = solve_linear_exact(&m(&[&[1, 2], &[1]]), &[int(0), int(1)]).unwrap_err();
        assert_eq!(err.code(), "E_DIM");
        assert!(solve_linear_exact(&m(&[&[1]]), &[]).is_err());
    }

    #[test]
    fn rational_entries_and_skipped_columns() {
        // x + 0y + z = 1, 2x + 0y + 3z = 1/2 ; column y is free
        let a = vec![vec![int(1), int(0), int(1)], vec![int(2), int(0), int(3)], vec![rat(1, 2), int(0), rat(1, 2)]];
        let b = vec![int(1), rat(1, 2), rat(1, 2)];
        let s = solve_linear_exact(&a, &b).unwrap();
        let LinearSolution::Solved { solution, kernel_rank } = s else { panic!() };
        assert_eq!(kernel_rank, 1);
        assert_eq!(solution, vec![rat(5, 2), int(0), rat(-3, 2)]);
    }
}
