//! Symmetric eigensolves with gap-certified kernel extraction.
//!
//! Generalized problems A v = lambda M v with diagonal positive M are
//! symmetrized by the M^{1/2} change of basis. Below the dense threshold we
//! call LAPACK directly; above it a shift-inverted Lanczos iteration (dense
//! LU of A - sigma I, full reorthogonalization) retrieves the low end of the
//! spectrum. Kernel dimension is accepted only when the spectrum shows a
//! clear gap: the candidate split must have eigenvalue ratio >= 10^3, and
//! the threshold reported is the geometric mean of the flanking eigenvalues.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Factorize, Solve, UPLO};
use serde::Serialize;

pub const DENSE_EIG_THRESHOLD: usize = 2000;
pub const GAP_RATIO_REQUIRED: f64 = 1e3;

/// Outcome of a gap-certified kernel computation.
#[derive(Debug, Clone, Serialize)]
pub struct GapCertificate {
    pub kernel_dim: usize,
    /// Largest eigenvalue classified as kernel (absolute value).
    pub kernel_ceiling: f64,
    /// Smallest eigenvalue classified as non-kernel.
    pub first_nonzero: f64,
    /// first_nonzero / max(kernel_ceiling, floor)
    pub gap_ratio: f64,
    /// Geometric mean of the flanking eigenvalues.
    pub threshold: f64,
    pub method: String,
}

/// Heavy LAPACK calls run on a dedicated thread with a large stack;
/// OpenBLAS keeps sizable per-call workspaces there.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(256 * 1024 * 1024)
        .spawn(f)
        .expect("spawn worker")
        .join()
        .expect("worker panicked")
}

pub fn dense_eigh(a: Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    with_big_stack(move || a.eigh(UPLO::Lower).expect("symmetric eigensolve"))
}

/// Smallest `k` eigenpairs of a symmetric PSD matrix via Lanczos on
/// (A - sigma I)^{-1} with a negative shift, dense LU factorization.
fn lanczos_smallest(a: Array2<f64>, k: usize) -> (Array1<f64>, Array2<f64>) {
    with_big_stack(move || {
        let n = a.nrows();
        let scale = a
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let sigma = -1e-4 * scale;
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[[i, i]] -= sigma;
        }
        let lu = shifted.factorize().expect("LU of shifted operator");

        let m = (2 * k + 20).min(n);
        let mut vs: Vec<Array1<f64>> = Vec::with_capacity(m);
        let mut alphas = Vec::with_capacity(m);
        let mut betas = Vec::with_capacity(m);
        // deterministic start vector
        let mut v = Array1::from_shape_fn(n, |i| ((i * 2654435761 + 1) % 1000003) as f64 - 500000.0);
        let nrm = v.dot(&v).sqrt();
        v.mapv_inplace(|x| x / nrm);
        vs.push(v);
        for j in 0..m {
            let mut w = lu.solve(&vs[j]).expect("shift-invert solve");
            let alpha = w.dot(&vs[j]);
            alphas.push(alpha);
            // full reorthogonalization, twice for robustness
            for _ in 0..2 {
                for q in &vs {
                    let c = w.dot(q);
                    w.scaled_add(-c, q);
                }
            }
            let beta = w.dot(&w).sqrt();
            if beta < 1e-13 || j + 1 == m {
                break;
            }
            betas.push(beta);
            w.mapv_inplace(|x| x / beta);
            vs.push(w);
        }
        let steps = alphas.len();
        let mut tri = Array2::zeros((steps, steps));
        for i in 0..steps {
            tri[[i, i]] = alphas[i];
            if i + 1 < steps {
                tri[[i, i + 1]] = betas[i];
                tri[[i + 1, i]] = betas[i];
            }
        }
        let (tvals, tvecs) = tri.eigh(UPLO::Lower).expect("tridiagonal eigensolve");
        // largest eigenvalues of (A - sigma)^{-1} <-> smallest of A
        let mut order: Vec<usize> = (0..steps).collect();
        order.sort_by(|&i, &j| tvals[j].partial_cmp(&tvals[i]).unwrap());
        let take = k.min(steps);
        let mut vals = Array1::zeros(take);
        let mut vecs = Array2::zeros((n, take));
        for (out_i, &ti) in order.iter().take(take).enumerate() {
            vals[out_i] = 1.0 / tvals[ti] + sigma;
            let mut x = Array1::<f64>::zeros(n);
            for (j, q) in vs.iter().enumerate() {
                x.scaled_add(tvecs[[j, ti]], q);
            }
            let nrm = x.dot(&x).sqrt();
            x.mapv_inplace(|y| y / nrm);
            vecs.column_mut(out_i).assign(&x);
        }
        // ascending
        let mut idx: Vec<usize> = (0..take).collect();
        idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
        let svals = Array1::from_iter(idx.iter().map(|&i| vals[i]));
        let mut svecs = Array2::zeros((n, take));
        for (out_i, &i) in idx.iter().enumerate() {
            svecs.column_mut(out_i).assign(&vecs.column(i));
        }
        (svals, svecs)
    })
}

/// Locate the kernel split in an ascending spectrum of a PSD operator.
pub fn certify_gap(eigenvalues: &[f64], method: &str) -> Result<GapCertificate> {
    assert!(!eigenvalues.is_empty());
    let scale = eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let floor = 1e-14 * scale;
    // candidate split k: eigenvalues[..k] kernel, eigenvalues[k..] not;
    // choose the largest ratio jump
    let mut best = (0usize, 0.0f64);
    for k in 0..eigenvalues.len() {
        let below = if k == 0 {
            floor
        } else {
            eigenvalues[k - 1].abs().max(floor)
        };
        let above = eigenvalues[k].abs().max(floor);
        let ratio = above / below;
        if ratio > best.1 {
            best = (k, ratio);
        }
    }
    let (split, ratio) = best;
    if ratio < GAP_RATIO_REQUIRED {
        return Err(Error::SpectralGap {
            candidate: split,
            ratio,
            required: GAP_RATIO_REQUIRED,
        });
    }
    let below = if split == 0 {
        floor
    } else {
        eigenvalues[split - 1].abs().max(floor)
    };
    let above = eigenvalues[split].abs().max(floor);
    Ok(GapCertificate {
        kernel_dim: split,
        kernel_ceiling: if split == 0 { 0.0 } else { eigenvalues[split - 1].abs() },
        first_nonzero: eigenvalues[split],
        gap_ratio: ratio,
        threshold: (below * above).sqrt(),
        method: method.to_string(),
    })
}

/// Gap-certified kernel of the generalized PSD problem A v = lambda M v,
/// M diagonal positive. Returns M-orthonormal kernel vectors.
pub fn kernel_basis(
    a: &SparseMatrix,
    m_diag: &[f64],
    max_kernel_hint: usize,
) -> Result<(Vec<Vec<f64>>, GapCertificate)> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert!(m_diag.iter().all(|&w| w > 0.0), "mass weights must be positive");
    let sqrt_m: Vec<f64> = m_diag.iter().map(|w| w.sqrt()).collect();
    let inv_sqrt_m: Vec<f64> = sqrt_m.iter().map(|w| 1.0 / w).collect();
    let sym = a.scale_rows(&inv_sqrt_m).scale_cols(&inv_sqrt_m);
    let mut dense = sym.to_dense();
    // enforce exact symmetry against round-off in the scaling
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (dense[[i, j]] + dense[[j, i]]);
            dense[[i, j]] = v;
            dense[[j, i]] = v;
        }
    }
    let (vals, vecs, method) = if n <= DENSE_EIG_THRESHOLD {
        let (vals, vecs) = dense_eigh(dense);
        (vals, vecs, "dense")
    } else {
        let k = (2 * max_kernel_hint + 12).min(n);
        let (vals, vecs) = lanczos_smallest(dense, k);
        (vals, vecs, "lanczos-shift-invert")
    };
    let eigs: Vec<f64> = vals.iter().copied().collect();
    let cert = certify_gap(&eigs, method)?;
    let mut basis = Vec::with_capacity(cert.kernel_dim);
    for i in 0..cert.kernel_dim {
        let col = vecs.column(i);
        // undo the similarity transform: v = M^{-1/2} u, then M-normalize
        let mut v: Vec<f64> = (0..n).map(|r| col[r] * inv_sqrt_m[r]).collect();
        let nrm: f64 = v
            .iter()
            .zip(m_diag)
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        basis.push(v);
    }
    Ok((basis, cert))
}

/// Smallest eigenpairs (ascending) of the generalized PSD problem, without
/// the gap requirement; used where the low spectrum itself is the object.
pub fn smallest_eigenpairs(
    a: &SparseMatrix,
    m_diag: &[f64],
    count: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.nrows();
    let sqrt_m: Vec<f64> = m_diag.iter().map(|w| w.sqrt()).collect();
    let inv_sqrt_m: Vec<f64> = sqrt_m.iter().map(|w| 1.0 / w).collect();
    let sym = a.scale_rows(&inv_sqrt_m).scale_cols(&inv_sqrt_m);
    let mut dense = sym.to_dense();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (dense[[i, j]] + dense[[j, i]]);
            dense[[i, j]] = v;
            dense[[j, i]] = v;
        }
    }
    let (vals, vecs) = if n <= DENSE_EIG_THRESHOLD {
        dense_eigh(dense)
    } else {
        lanczos_smallest(dense, count.min(n))
    };
    let take = count.min(vals.len());
    let mut out_vals = Vec::with_capacity(take);
    let mut out_vecs = Vec::with_capacity(take);
    for i in 0..take {
        out_vals.push(vals[i]);
        let col = vecs.column(i);
        let mut v: Vec<f64> = (0..n).map(|r| col[r] * inv_sqrt_m[r]).collect();
        let nrm: f64 = v
            .iter()
            .zip(m_diag)
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        out_vecs.push(v);
    }
    (out_vals, out_vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_laplacian_path_circle(n: usize) -> SparseMatrix {
        // circulant second-difference matrix: kernel = constants
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 2.0));
            trip.push((i, (i + 1) % n, -1.0));
            trip.push((i, (i + n - 1) % n, -1.0));
        }
        SparseMatrix::from_triplets(n, n, trip)
    }

    #[test]
    fn kernel_of_circulant_laplacian_is_constants() {
        let a = graph_laplacian_path_circle(40);
        let m = vec![1.0; 40];
        let (basis, cert) = kernel_basis(&a, &m, 4).unwrap();
        assert_eq!(cert.kernel_dim, 1);
        assert!(cert.gap_ratio >= GAP_RATIO_REQUIRED);
        let v = &basis[0];
        let mean = v.iter().sum::<f64>() / 40.0;
        for x in v {
            assert!((x - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_certification_rejects_smeared_spectrum() {
        let eigs: Vec<f64> = (1..20).map(|i| i as f64).collect();
        assert!(certify_gap(&eigs, "dense").is_err());
    }

    #[test]
    fn gap_certification_accepts_empty_kernel() {
        let eigs = vec![1.0, 1.5, 2.0];
        let cert = certify_gap(&eigs, "dense").unwrap();
        assert_eq!(cert.kernel_dim, 0);
    }

    #[test]
    fn lanczos_agrees_with_dense_on_low_spectrum() {
        let n = 60;
        let a = graph_laplacian_path_circle(n);
        let m = vec![1.0; n];
        let (vals_dense, _) = smallest_eigenpairs(&a, &m, 5);
        let dense = a.to_dense();
        let (vals_l, vecs_l) = super::lanczos_smallest(dense, 5);
        for i in 0..5 {
            assert!(
                (vals_dense[i] - vals_l[i]).abs() < 1e-9,
                "eigenvalue {i}: {} vs {}",
                vals_dense[i],
                vals_l[i]
            );
        }
        // residual check on the Lanczos vectors
        for i in 0..5 {
            let v: Vec<f64> = vecs_l.column(i).to_vec();
            let av = a.matvec(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - vals_l[i] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-8, "residual {res} at pair {i}");
        }
    }
}
