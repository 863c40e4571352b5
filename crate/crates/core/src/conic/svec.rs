//! Scaled symmetric vectorization.
//!
//! An `s x s` symmetric matrix is stored as its upper triangle in column-major
//! order, `(0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...`, with off-diagonal
//! entries multiplied by `sqrt 2` so that `svec(X) . svec(Y) = tr(X Y)`.

use nalgebra::DMatrix;
use std::f64::consts::SQRT_2;

pub fn svec_len(s: usize) -> usize {
    s * (s + 1) / 2
}

/// Position of entry `(i, j)` (either order) in the svec layout.
pub fn svec_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

/// Side length `s` with `s (s + 1) / 2 == len`, if any.
pub fn svec_side(len: usize) -> Option<usize> {
    let s = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (svec_len(s) == len).then_some(s)
}

pub fn svec(m: &DMatrix<f64>) -> Vec<f64> {
    let s = m.nrows();
    let mut v = Vec::with_capacity(svec_len(s));
    for j in 0..s {
        for i in 0..=j {
            if i == j {
                v.push(m[(i, i)]);
            } else {
                v.push(SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
    }
    v
}

pub fn smat(v: &[f64], s: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(s, s);
    let mut k = 0;
    for j in 0..s {
        for i in 0..=j {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                let x = v[k] / SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
            k += 1;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_matches_trace() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 5.0, -1.0, 3.0, -1.0, 4.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, 1.0, 0.0, 1.0, -2.0, 1.5, 0.0, 1.5, 1.0]);
        let dot: f64 = svec(&a).iter().zip(svec(&b)).map(|(x, y)| x * y).sum();
        assert!((dot - (&a * &b).trace()).abs() < 1e-12);
        assert_eq!(smat(&svec(&a), 3), a);
    }

    #[test]
    fn index_layout() {
        assert_eq!(svec_index(0, 0), 0);
        assert_eq!(svec_index(0, 1), 1);
        assert_eq!(svec_index(1, 1), 2);
        assert_eq!(svec_index(2, 0), 3);
        assert_eq!(svec_side(6), Some(3));
        assert_eq!(svec_side(7), None);
    }
}
