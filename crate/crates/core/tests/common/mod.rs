#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// RMS distance from `pts` to the best-fitting circle, or to the best line
/// when the points are collinear. Plane from the covariance eigenvectors, circle
/// by an algebraic least-squares fit inside that plane.
pub fn circle_fit_rms(pts: &[[f64; 3]]) -> f64 {
    let n = pts.len() as f64;
    let p: Vec<Vector3<f64>> = pts.iter().map(|q| Vector3::new(q[0], q[1], q[2])).collect();
    let c = p.iter().fold(Vector3::zeros(), |a, b| a + b) / n;
    let mut cov = Matrix3::zeros();
    for q in &p {
        let d = q - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let e1: Vector3<f64> = eig.eigenvectors.column(idx[0]).into();
    let e2: Vector3<f64> = eig.eigenvectors.column(idx[1]).into();
    let normal: Vector3<f64> = eig.eigenvectors.column(idx[2]).into();
    let spread = eig.eigenvalues[idx[0]].max(1e-300);
    if eig.eigenvalues[idx[1]] / spread < 1e-24 {
        let r2: f64 = p
            .iter()
            .map(|q| {
                let d = q - c;
                (d - e1 * d.dot(&e1)).norm_squared()
            })
            .sum();
        return (r2 / n).sqrt();
    }
    let mut a = DMatrix::zeros(pts.len(), 3);
    let mut b = DVector::zeros(pts.len());
    let mut off = 0.0;
    let uv: Vec<(f64, f64)> = p
        .iter()
        .map(|q| {
            let d = q - c;
            off += d.dot(&normal).powi(2);
            (d.dot(&e1), d.dot(&e2))
        })
        .collect();
    for (i, &(u, v)) in uv.iter().enumerate() {
        a[(i, 0)] = u;
        a[(i, 1)] = v;
        a[(i, 2)] = 1.0;
        b[i] = -(u * u + v * v);
    }
    let at = a.transpose();
    let sol = (&at * &a).lu().solve(&(&at * &b)).expect("least squares");
    let (cu, cv) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r = (cu * cu + cv * cv - sol[2]).max(0.0).sqrt();
    let mut s = off;
    for &(u, v) in &uv {
        s += (((u - cu).powi(2) + (v - cv).powi(2)).sqrt() - r).powi(2);
    }
    (s / n).sqrt()
}
