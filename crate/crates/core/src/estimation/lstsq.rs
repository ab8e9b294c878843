//! Dense least squares for tall n×3 systems.
//!
//! Householder QR reduces `A` to a 3×3 triangle `R` and `Qᵀb`; an SVD of `R`
//! then gives the numerical rank and the minimum-norm solution. The normal
//! equations are never formed.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    WellConditioned,
    RankDeficient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsSolution {
    pub x: Vector3<f64>,
    /// `‖Ax − b‖₂ / √n`.
    pub residual_rms: f64,
    pub conditioning: Conditioning,
}

/// Minimizes `‖Ax − b‖₂` for rows `a` of `A`. Rank-deficient systems get the
/// minimum-norm solution and are flagged.
///
/// Panics if `a` and `b` differ in length or are empty.
pub fn solve_linear_ls(a: &[[f64; 3]], b: &[f64]) -> LsSolution {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    assert!(!a.is_empty(), "need at least one row");
    let n = a.len();

    // Column-major working copy.
    let mut cols: [Vec<f64>; 3] = [0, 1, 2].map(|j| a.iter().map(|r| r[j]).collect());
    let mut qtb = b.to_vec();
    let mut r = Matrix3::zeros();

    for k in 0..3.min(n) {
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            for j in k + 1..3 {
                r[(k, j)] = cols[j][k];
            }
            continue;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        // v = x − αe₁, stored in place of column k.
        cols[k][k] -= alpha;
        let vtv: f64 = cols[k][k..].iter().map(|v| v * v).sum();
        let (head, tail) = cols.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            reflect(v, vtv, &mut col[k..]);
        }
        reflect(v, vtv, &mut qtb[k..]);
        r[(k, k)] = alpha;
        for j in k + 1..3 {
            r[(k, j)] = cols[j][k];
        }
    }
    let c = Vector3::from_fn(|i, _| if i < n { qtb[i] } else { 0.0 });

    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s_max = svd.singular_values.max();
    let mut rank = 0;
    let mut y = u.transpose() * c;
    for i in 0..3 {
        let s = svd.singular_values[i];
        if s_max > 0.0 && s > RANK_TOLERANCE * s_max {
            y[i] /= s;
            rank += 1;
        } else {
            y[i] = 0.0;
        }
    }
    let x = v_t.transpose() * y;

    let ss: f64 = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let e = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] - bi;
            e * e
        })
        .sum();
    LsSolution {
        x,
        residual_rms: (ss / n as f64).sqrt(),
        conditioning: if rank == 3 {
            Conditioning::WellConditioned
        } else {
            Conditioning::RankDeficient
        },
    }
}

/// Applies `I − 2vvᵀ/vᵀv` to `target`.
fn reflect(v: &[f64], vtv: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let scale = 2.0 * dot / vtv;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= scale * vi;
    }
}
