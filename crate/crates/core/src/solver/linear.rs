use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Solves `K_ff Δu_f = rhs_f − K_fp Δu_p` for the free dofs. `free[d]` is the
/// reduced index of dof `d`, `None` for prescribed dofs. Returns the full
/// increment, with `du_prescribed` copied into the prescribed entries, and
/// the norm of the reduced right-hand side.
pub fn solve_reduced(
    triplets: &[(usize, usize, f64)],
    rhs: &[f64],
    free: &[Option<usize>],
    du_prescribed: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let n_free = free.iter().filter(|f| f.is_some()).count();
    let mut b = vec![0.0; n_free];
    for (d, f) in free.iter().enumerate() {
        if let Some(i) = f {
            b[*i] = rhs[d];
        }
    }
    let mut reduced = Vec::with_capacity(triplets.len());
    for &(r, c, v) in triplets {
        match (free[r], free[c]) {
            (Some(i), Some(j)) => reduced.push(Triplet::new(i, j, v)),
            (Some(i), None) => b[i] -= v * du_prescribed[c],
            _ => {}
        }
    }
    let rhs_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut du = du_prescribed.to_vec();
    if n_free == 0 {
        return Ok((du, rhs_norm));
    }
    let k = SparseColMat::<usize, f64>::try_new_from_triplets(n_free, n_free, &reduced).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let lu = k.sp_lu().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let mut x = Mat::<f64>::from_fn(n_free, 1, |i, _| b[i]);
    lu.solve_in_place(x.as_mut());
    for (d, f) in free.iter().enumerate() {
        if let Some(i) = f {
            let v = x[(*i, 0)];
            if !v.is_finite() {
                return Err(Error::LinearSolve("non-finite solution".into()));
            }
            du[d] = v;
        }
    }
    Ok((du, rhs_norm))
}
