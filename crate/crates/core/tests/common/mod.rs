//! Oracles built independently of the library's matrix assembly.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Annihilator on a single mode truncated at `cap` quanta.
fn annihilator(cap: usize) -> DMatrix<f64> {
    let d = cap + 1;
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Two-mode Hamiltonian assembled from ladder operators on the full
/// product space `0..=N` x `0..=N`, then restricted to `n_A + n_B = N`.
/// Basis order: `n_A = 0..=N`.
pub fn dense_hamiltonian(n: usize, u0: f64, u1: f64, lambda: f64) -> DMatrix<f64> {
    let a1 = annihilator(n);
    let id = DMatrix::<f64>::identity(n + 1, n + 1);
    let a = kron(&a1, &id);
    let b = kron(&id, &a1);
    let (ad, bd) = (a.transpose(), b.transpose());
    let na = &ad * &a;
    let nb = &bd * &b;
    let h = (&ad * &ad * &a * &a) * (0.5 * u0) + (&bd * &bd * &b * &b) * (0.5 * u0) + (&na * &nb) * u1
        - (&ad * &b + &bd * &a) * lambda;
    // product index = n_A * (N + 1) + n_B
    let idx: Vec<usize> = (0..=n).map(|m| m * (n + 1) + (n - m)).collect();
    DMatrix::from_fn(n + 1, n + 1, |i, j| h[(idx[i], idx[j])])
}

pub fn sorted_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Fock coefficients of `(a a_A^+ + b a_B^+)^N |0>`, unit normalized; the
/// amplitudes need not be normalized.
pub fn binomial_state(n: usize, a: f64, b: f64) -> Vec<f64> {
    let lf = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let r = (a * a + b * b).sqrt();
    let (a, b) = (a / r, b / r);
    (0..=n)
        .map(|m| {
            let mag = 0.5 * (lf(n) - lf(m) - lf(n - m)) + m as f64 * a.abs().ln() + (n - m) as f64 * b.abs().ln();
            let sign = if (a < 0.0 && m % 2 == 1) != (b < 0.0 && (n - m) % 2 == 1) { -1.0 } else { 1.0 };
            sign * mag.exp()
        })
        .collect()
}

pub fn expectation(h: &DMatrix<f64>, v: &[f64]) -> f64 {
    let x = nalgebra::DVector::from_column_slice(v);
    (x.transpose() * h * &x)[(0, 0)] / x.norm_squared()
}
