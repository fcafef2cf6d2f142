//! Small exact linear algebra over the rationals.

use num::rational::BigRational;
use num::{One, Zero};

/// Reduced row echelon form in place; returns pivot column indices.
fn rref(mat: &mut Vec<Vec<BigRational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = mat[row][col].recip();
        for x in &mut mat[row] {
            *x = &*x * &inv;
        }
        for r in 0..mat.len() {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..ncols {
                    let delta = &factor * &mat[row][c];
                    mat[r][c] = &mat[r][c] - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of the right null space of the matrix with the given rows.
pub fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square matrix by fraction-free-ish Gaussian elimination.
pub fn determinant(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - delta;
            }
        }
    }
    det
}
