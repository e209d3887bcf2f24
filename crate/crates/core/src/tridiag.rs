//! Symmetric tridiagonal matrices: Sturm-sequence bisection for selected
//! eigenvalues, inverse iteration for eigenvectors, an implicit QL sweep for
//! the full spectrum, and a pivoted LU solver shared with the time stepper.

use num_complex::ComplexFloat;
use num_traits::NumCast;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_BISECTION_STEPS: usize = 400;
const MAX_QL_SWEEPS: usize = 60;
const INVERSE_ITERATION_STEPS: usize = 6;

/// Real symmetric tridiagonal matrix stored by its diagonal and one
/// off-diagonal (`offdiag[m]` couples rows `m` and `m + 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `H v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for i in 0..n - 1 {
            out[i] += self.offdiag[i] * v[i + 1];
            out[i + 1] += self.offdiag[i] * v[i];
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// True if the matrix commutes with the reversal `m -> n - 1 - m`.
    pub fn is_reversal_symmetric(&self, tol: f64) -> bool {
        let n = self.dim();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        (0..n).all(|i| (self.diag[i] - self.diag[n - 1 - i]).abs() <= tol * scale)
            && (0..n - 1).all(|i| (self.offdiag[i] - self.offdiag[n - 2 - i]).abs() <= tol * scale)
    }

    fn pivmin(&self) -> f64 {
        let emax = self.offdiag.iter().map(|e| e * e).fold(0.0, f64::max);
        f64::MIN_POSITIVE.max(emax * f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.offdiag[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn bisect_eigenvalue(&self, k: usize) -> Result<f64> {
        let n = self.dim();
        if k >= n {
            return Err(Error::Domain(format!("eigenvalue index {k} out of range for dimension {n}")));
        }
        if n == 1 {
            return Ok(self.diag[0]);
        }
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs());
        let pad = 2.0 * f64::EPSILON * scale + self.pivmin();
        let mut lo = glo - pad;
        let mut hi = ghi + pad;
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let tol = (2.0 * f64::EPSILON * lo.abs().max(hi.abs())).max(f64::EPSILON * scale) + self.pivmin();
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Convergence {
            iterations: MAX_BISECTION_STEPS,
            what: format!("bisection for eigenvalue {k}"),
        })
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        (0..k).map(|j| self.bisect_eigenvalue(j)).collect()
    }

    /// Eigenvector for an (already converged) eigenvalue by inverse
    /// iteration. `previous` holds unit vectors of nearby eigenvalues that the
    /// result is kept orthogonal to.
    pub fn inverse_iteration(&self, eigenvalue: f64, previous: &[&[f64]]) -> Result<Vec<f64>> {
        let n = self.dim();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let norm = self.norm_inf();
        let norm = if norm > 0.0 { norm } else { 1.0 };
        let sub: Vec<f64> = self.offdiag.clone();
        let diag: Vec<f64> = self.diag.iter().map(|d| d - eigenvalue).collect();
        let lu = TridiagLu::factor(&sub, &diag, &sub, f64::EPSILON * norm);

        let mut x = start_vector(n);
        orthogonalize(&mut x, previous);
        normalize(&mut x);
        for _ in 0..INVERSE_ITERATION_STEPS {
            lu.solve_in_place(&mut x);
            orthogonalize(&mut x, previous);
            let nrm = euclid(&x);
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::Convergence {
                    iterations: INVERSE_ITERATION_STEPS,
                    what: format!("inverse iteration at {eigenvalue}"),
                });
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        fix_sign(&mut x);
        Ok(x)
    }

    /// Eigenvectors for ascending eigenvalues; vectors of eigenvalues closer
    /// than `1e-3 * norm` are kept mutually orthogonal.
    pub fn eigenvectors_for(&self, values: &[f64]) -> Result<Vec<Vec<f64>>> {
        let cluster = 1e-3 * self.norm_inf();
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &e) in values.iter().enumerate() {
            let near: Vec<&[f64]> = (0..j)
                .filter(|&i| (values[i] - e).abs() <= cluster)
                .map(|i| vecs[i].as_slice())
                .collect();
            let v = self.inverse_iteration(e, &near)?;
            vecs.push(v);
        }
        Ok(vecs)
    }

    /// Whole spectrum in ascending order by implicit QL with Wilkinson
    /// shifts. Used to cross-check the bisection path.
    pub fn all_eigenvalues_ql(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.offdiag.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::Convergence {
                        iterations: MAX_QL_SWEEPS,
                        what: format!("QL sweep at row {l}"),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut i = m;
                let mut deflated = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(|a, b| a.total_cmp(b));
        Ok(d)
    }
}

/// Deterministic start vector with no special symmetry.
fn start_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
            0.5 + t
        })
        .collect()
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = euclid(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn orthogonalize(x: &mut [f64], against: &[&[f64]]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let dot: f64 = x.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(q.iter()).for_each(|(a, b)| *a -= dot * b);
        }
    }
}

/// Flip `v` so its first non-negligible coefficient is positive.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// LU factorization with partial pivoting of a general tridiagonal matrix
/// (sub-, main and super-diagonal), in the layout of LAPACK's `gttrf`.
#[derive(Debug, Clone)]
pub struct TridiagLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T> TridiagLu<T>
where
    T: ComplexFloat<Real = f64>,
{
    /// Factor; pivots smaller than `tiny` in magnitude are replaced by `tiny`.
    pub fn factor(sub: &[T], diag: &[T], sup: &[T], tiny: f64) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    d[i] = <T as NumCast>::from(tiny).unwrap();
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = <T as NumCast>::from(tiny).unwrap();
        }
        TridiagLu { dl, d, du, du2, swapped }
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn laplacian(n: usize) -> TridiagonalHamiltonian {
        TridiagonalHamiltonian::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn sturm_count_on_laplacian() {
        // eigenvalues 2 - 2 cos(k pi / (n + 1))
        let h = laplacian(10);
        let exact: Vec<f64> = (1..=10)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 11.0).cos())
            .collect();
        for (k, e) in exact.iter().enumerate() {
            assert_eq!(h.sturm_count(e - 1e-9), k);
            assert_eq!(h.sturm_count(e + 1e-9), k + 1);
        }
        let bis = h.lowest_eigenvalues(10).unwrap();
        let ql = h.all_eigenvalues_ql().unwrap();
        for k in 0..10 {
            assert!((bis[k] - exact[k]).abs() < 1e-14);
            assert!((ql[k] - exact[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_iteration_residual_and_sign() {
        let h = TridiagonalHamiltonian::new(
            vec![1.0, -2.0, 0.5, 3.0, 0.0],
            vec![0.3, -1.1, 0.7, 0.2],
        )
        .unwrap();
        let mut prev: Vec<Vec<f64>> = vec![];
        for k in 0..5 {
            let e = h.bisect_eigenvalue(k).unwrap();
            let refs: Vec<&[f64]> = prev.iter().map(|v| v.as_slice()).collect();
            let v = h.inverse_iteration(e, &refs).unwrap();
            let hv = h.apply(&v);
            let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-12, "residual {res}");
            assert!(v.iter().find(|x| x.abs() > 1e-10).unwrap() > &0.0);
            prev.push(v);
        }
        for i in 0..5 {
            for j in 0..i {
                let dot: f64 = prev[i].iter().zip(&prev[j]).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_pair_gets_orthogonal_vectors() {
        // direct sum of two identical blocks: every eigenvalue is doubled
        let h = TridiagonalHamiltonian::new(vec![1.0, 2.0, 1.0, 2.0], vec![0.5, 0.0, 0.5]).unwrap();
        let e0 = h.bisect_eigenvalue(0).unwrap();
        let e1 = h.bisect_eigenvalue(1).unwrap();
        assert!((e0 - e1).abs() < 1e-14);
        let v0 = h.inverse_iteration(e0, &[]).unwrap();
        let v1 = h.inverse_iteration(e1, &[&v0]).unwrap();
        let dot: f64 = v0.iter().zip(&v1).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn pivoted_lu_solves_complex_system() {
        let sub = vec![Complex64::new(3.0, 1.0), Complex64::new(0.0, -2.0), Complex64::new(1.0, 0.0)];
        let diag = vec![
            Complex64::new(1e-3, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.5),
            Complex64::new(4.0, 0.0),
        ];
        let sup = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)];
        let x = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, -0.5),
            Complex64::new(2.0, 1.0),
        ];
        let mut b = vec![Complex64::new(0.0, 0.0); 4];
        for i in 0..4 {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += sub[i - 1] * x[i - 1];
            }
            if i < 3 {
                b[i] += sup[i] * x[i + 1];
            }
        }
        let lu = TridiagLu::factor(&sub, &diag, &sup, 0.0);
        lu.solve_in_place(&mut b);
        for i in 0..4 {
            assert!((b[i] - x[i]).norm() < 1e-12);
        }
    }
}
