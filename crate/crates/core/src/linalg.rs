//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::Zero;

/// Rank by fraction-exact Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in rows.iter_mut() {
        r.resize(ncols, BigRational::zero());
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        let head = rows[rank].iter().map(|v| v * &inv).collect::<Vec<_>>();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (c, h) in head.iter().enumerate().take(ncols).skip(col) {
                row[c] -= &factor * h;
            }
        }
        rows[rank] = head;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
