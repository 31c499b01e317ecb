//! Exact Gaussian elimination over Gaussian rationals.

use num_traits::Zero;

use crate::scalar::GaussRat;

/// Dense row-major matrix of exact entries.
pub type ExactMatrix = Vec<Vec<GaussRat>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut ExactMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] = &m[i][j] - &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &ExactMatrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Columns of `a` and `b` placed side by side.
pub fn hstack(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    assert_eq!(a.len(), b.len(), "row counts differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().chain(y).cloned().collect())
        .collect()
}

/// Rows of `a` followed by rows of `b`.
pub fn vstack(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    a.iter().chain(b).cloned().collect()
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &ExactMatrix, b: &[GaussRat]) -> Option<Vec<GaussRat>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: ExactMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    if rows == 0 {
        return Some(vec![GaussRat::zero(); cols]);
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![GaussRat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn mat_vec(a: &ExactMatrix, x: &[GaussRat]) -> Vec<GaussRat> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(GaussRat::zero(), |acc, (p, q)| acc + p * q)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| GaussRat::from(v)).collect())
            .collect()
    }

    #[test]
    fn rank_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&a), 2);
        let b: Vec<GaussRat> = [6, 12, 2].iter().map(|&v| GaussRat::from(v)).collect();
        let x = solve(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b);
        let bad: Vec<GaussRat> = [1, 0, 0].iter().map(|&v| GaussRat::from(v)).collect();
        assert!(solve(&a, &bad).is_none());
    }

    #[test]
    fn complex_pivots() {
        let i = GaussRat::i();
        let a = vec![
            vec![i.clone(), GaussRat::from(1)],
            vec![GaussRat::from(1), -i.clone()],
        ];
        // second row is -i times the first
        assert_eq!(rank(&a), 1);
    }
}
