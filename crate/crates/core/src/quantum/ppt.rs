use serde::{Deserialize, Serialize};

use super::{hermitian_eigen, is_hermitian, CMatrix, HERMITIAN_TOL, PSD_TOL, STATE_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    /// Parties whose factors are transposed; always contains party 0.
    pub transposed: Vec<usize>,
    pub psd: bool,
    pub min_eigenvalue: f64,
}

fn mixed_index(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

fn split_index(dims: &[usize], mut k: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = k % d;
        k /= d;
    }
    out
}

/// Transpose of the tensor factors listed in `parties`.
pub fn partial_transpose(rho: &CMatrix, dims: &[usize], parties: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, found: rho.nrows() });
    }
    let mut out = CMatrix::zeros(total, total);
    for r in 0..total {
        let ri = split_index(dims, r);
        for c in 0..total {
            let ci = split_index(dims, c);
            let (mut a, mut b) = (ri.clone(), ci.clone());
            for &p in parties {
                std::mem::swap(&mut a[p], &mut b[p]);
            }
            out[(r, c)] = rho[(mixed_index(dims, &a), mixed_index(dims, &b))];
        }
    }
    Ok(out)
}

/// Partial-transpose spectrum test over every bipartition of the parties.
/// Each bipartition is listed once, by the side containing party 0.
pub fn ppt_check(rho: &CMatrix, local_dims: &[usize]) -> Result<Vec<PptReport>> {
    let total: usize = local_dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, found: rho.nrows() });
    }
    if !is_hermitian(rho, HERMITIAN_TOL) || (rho.trace().re - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidInput("density matrix must be Hermitian with unit trace".into()));
    }
    let n = local_dims.len();
    let mut reports = Vec::new();
    for mask in 1..(1usize << n) - 1 {
        let parties: Vec<usize> = (0..n).filter(|&i| mask >> (n - 1 - i) & 1 == 1).collect();
        if parties.first() != Some(&0) {
            continue;
        }
        let pt = partial_transpose(rho, local_dims, &parties)?;
        let min_eigenvalue = hermitian_eigen(&pt).0[0];
        reports.push(PptReport { transposed: parties, psd: min_eigenvalue >= -PSD_TOL, min_eigenvalue });
    }
    Ok(reports)
}
