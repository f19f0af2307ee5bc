//! Dense complex linear algebra not covered by `nalgebra` in `no_std` builds.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);
    let id = CMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |x: f64| Complex64::new(x, 0.0);
    let u_inner = &a6 * (&a6 * c(B[13]) + &a4 * c(B[11]) + &a2 * c(B[9]))
        + &a6 * c(B[7])
        + &a4 * c(B[5])
        + &a2 * c(B[3])
        + &id * c(B[1]);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * c(B[12]) + &a4 * c(B[10]) + &a2 * c(B[8]))
        + &a6 * c(B[6])
        + &a4 * c(B[4])
        + &a2 * c(B[2])
        + &id * c(B[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut e: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    e
}

pub fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = m.clone().try_schur(1e-14, 100_000).ok_or_else(|| {
        Error::NoConvergence(alloc::format!(
            "Schur iteration on a {}x{} matrix",
            m.nrows(),
            m.ncols()
        ))
    })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
