//! Dense Gaussian elimination over a [`Field`].

use crate::field::{Fe, Field};

/// Reduces `rows` in place to reduced row echelon form; returns the pivot
/// columns.
pub fn rref(f: &Field, rows: &mut [Vec<Fe>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(factor, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &Field, rows: &[Vec<Fe>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Solves `x A = b` for a row vector `x`, where `A` is given by its rows.
/// Returns one solution if any exists.
pub fn solve_left(f: &Field, a_rows: &[Vec<Fe>], b: &[Fe]) -> Option<Vec<Fe>> {
    // x A = b  <=>  A^T x^T = b^T; eliminate on the augmented transpose.
    let n = a_rows.len();
    let m = b.len();
    let mut aug: Vec<Vec<Fe>> = (0..m)
        .map(|j| {
            let mut row: Vec<Fe> = (0..n).map(|i| a_rows[i][j]).collect();
            row.push(b[j]);
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Fe::ZERO; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n];
    }
    Some(x)
}

/// Basis of `{ u : rows * u^T = 0 }`.
pub fn nullspace(f: &Field, rows: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fe::ZERO; ncols];
            v[fc] = Fe::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[r][fc]);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_solve_over_gf3() {
        let f = Field::prime(3).unwrap();
        let e = |i| f.element(i).unwrap();
        let a = vec![vec![e(1), e(2)], vec![e(2), e(1)]];
        // rows are proportional mod 3: 2*(1,2) = (2,1)
        assert_eq!(rank(&f, &a), 1);
        let b = vec![vec![e(1), e(0)], vec![e(1), e(1)]];
        assert_eq!(rank(&f, &b), 2);
        let x = solve_left(&f, &b, &[e(2), e(1)]).unwrap();
        // x0*(1,0) + x1*(1,1) = (2,1)
        assert_eq!(x, vec![e(1), e(1)]);
        assert!(solve_left(&f, &a, &[e(1), e(1)]).is_none());
    }

    #[test]
    fn nullspace_of_plane() {
        let f = Field::prime(2).unwrap();
        let o = Fe::ONE;
        let z = Fe::ZERO;
        let rows = vec![vec![o, o, z, z]];
        let ns = nullspace(&f, &rows);
        assert_eq!(ns.len(), 3);
        for v in ns {
            let dot = f.add(f.mul(v[0], o), f.mul(v[1], o));
            assert!(dot.is_zero());
        }
    }
}
