//! Dense Gaussian elimination over a scalar field.

use crate::scalar::Scalar;

/// Rank of a dense matrix given as rows; exact for the rational backend.
pub fn rank<S: Scalar>(mut rows: Vec<Vec<S>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_negligible()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = S::one() / rows[rank][c].clone();
        let pivot: Vec<S> = rows[rank].iter().map(|v| v.mul_ref(&inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                *x = x.sub_ref(&f.mul_ref(p));
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Dimension of the solution space of `rows · v = 0` in `cols` unknowns.
pub fn nullity<S: Scalar>(rows: Vec<Vec<S>>, cols: usize) -> usize {
    cols - rank(rows)
}

/// Determinant by elimination; used by tests and small blocks.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = det.mul_ref(&m[c][c]);
        let inv = S::one() / m[c][c].clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].mul_ref(&inv);
            for k in c..n {
                let t = f.mul_ref(&m[c][k]);
                m[r][k] = m[r][k].sub_ref(&t);
            }
        }
    }
    det
}
