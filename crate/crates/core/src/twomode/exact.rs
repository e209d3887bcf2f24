//! Exact diagonalization of the two-mode Hamiltonian in the Fock basis
//! `|m>_A |N - m>_B`, `m = 0..=N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LambdaConvention, ModelParams};
use crate::tridiag::{euclid, fix_sign, TridiagonalHamiltonian};

/// Behaviour under the exchange `q_m -> q_{N-m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Lowest part of a spectrum with optional eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Exchange parity of each level when the matrix is exchange symmetric.
    pub parities: Option<Vec<Parity>>,
    pub k_computed: usize,
    /// Parity-partner splittings resolved beyond the precision of the
    /// absolute eigenvalues.
    pub pair_splittings: Vec<PairSplitting>,
}

/// `E[odd] - E[even]` for a quasi-degenerate parity pair, indexed by level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSplitting {
    pub even: usize,
    pub odd: usize,
    pub splitting: f64,
}

impl Spectrum {
    /// `E_j - E_i`, using a resolved pair splitting when `(i, j)` is one.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        for ps in &self.pair_splittings {
            if (ps.even, ps.odd) == (i, j) {
                return ps.splitting;
            }
            if (ps.even, ps.odd) == (j, i) {
                return -ps.splitting;
            }
        }
        match (self.eigenvalues.get(i), self.eigenvalues.get(j)) {
            (Some(a), Some(b)) => b - a,
            _ => f64::NAN,
        }
    }
}

/// Ground-state occupation probabilities `p_m = (q_m^0)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberDistribution {
    pub probs: Vec<f64>,
}

impl NumberDistribution {
    /// Indices of strict local maxima (plateaus count once, at their left edge)
    /// whose height exceeds `min_rel` times the global maximum.
    pub fn local_maxima(&self, min_rel: f64) -> Vec<usize> {
        let p = &self.probs;
        let n = p.len();
        let top = p.iter().cloned().fold(0.0, f64::max);
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && p[j + 1] == p[i] {
                j += 1;
            }
            let left_ok = i == 0 || p[i - 1] < p[i];
            let right_ok = j + 1 == n || p[j + 1] < p[i];
            if left_ok && right_ok && p[i] > min_rel * top {
                out.push(i);
            }
            i = j + 1;
        }
        out
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }
}

/// Two-mode Hamiltonian matrix with the (constant) trap term dropped.
///
/// `d_m = U0/2 [m(m-1) + (N-m)(N-m-1)] + U1 m (N-m)`,
/// `e_m = -lambda sqrt((m+1)(N-m))`.
pub fn build_hamiltonian(params: &ModelParams) -> Result<TridiagonalHamiltonian> {
    params.validate()?;
    let n = params.n_atoms;
    let nf = n as f64;
    let (u0, u1, lam) = (params.u0, params.u1, params.lambda);
    let diag: Vec<f64> = (0..=n)
        .map(|m| {
            let m = m as f64;
            0.5 * u0 * (m * (m - 1.0) + (nf - m) * (nf - m - 1.0)) + u1 * m * (nf - m)
        })
        .collect();
    let offdiag: Vec<f64> = (0..n)
        .map(|m| {
            let m = m as f64;
            -lam * ((m + 1.0) * (nf - m)).sqrt()
        })
        .collect();
    if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
        return Err(Error::Overflow { n });
    }
    TridiagonalHamiltonian::new(diag, offdiag)
}

/// Dense matrix of a tridiagonal Hamiltonian (row major), for small checks.
pub fn to_dense(h: &TridiagonalHamiltonian) -> Vec<Vec<f64>> {
    let n = h.dim();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = h.diag[i];
        if i + 1 < n {
            a[i][i + 1] = h.offdiag[i];
            a[i + 1][i] = h.offdiag[i];
        }
    }
    a
}

/// The `k_lowest` smallest eigenpairs.
///
/// Exchange-symmetric matrices are split into even and odd blocks, which
/// keeps quasi-degenerate parity partners apart and makes every returned
/// vector an exact parity eigenvector. Splittings below what bisection can
/// resolve are recovered from the exact identity
/// `(E_o - E_e) <e|o> = <e|(T_odd - T_even)|o>`, whose right side only
/// involves the exponentially small amplitudes at the centre of the chain.
pub fn diagonalize(h: &TridiagonalHamiltonian, k_lowest: usize, want_vectors: bool) -> Result<Spectrum> {
    let n = h.dim();
    if k_lowest == 0 || k_lowest > n {
        return Err(Error::Domain(format!("k_lowest = {k_lowest} outside 1..={n}")));
    }
    if n >= 2 && h.is_reversal_symmetric(1e-12) {
        diagonalize_by_parity(h, k_lowest, want_vectors)
    } else {
        diagonalize_general(h, k_lowest, want_vectors)
    }
}

fn diagonalize_general(h: &TridiagonalHamiltonian, k: usize, want_vectors: bool) -> Result<Spectrum> {
    let values = h.lowest_eigenvalues(k)?;
    let vectors = if want_vectors {
        Some(h.eigenvectors_for(&values)?)
    } else {
        None
    };
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        parities: None,
        k_computed: k,
        pair_splittings: Vec::new(),
    })
}

struct ParityBlocks {
    even: TridiagonalHamiltonian,
    odd: TridiagonalHamiltonian,
    pairs: usize,
    has_middle: bool,
}

fn parity_blocks(h: &TridiagonalHamiltonian) -> Result<ParityBlocks> {
    let n = h.dim();
    let pairs = n / 2;
    let has_middle = n % 2 == 1;
    let d = &h.diag;
    let e = &h.offdiag;
    let mut even_d = d[..pairs].to_vec();
    let mut even_e = e[..pairs - 1].to_vec();
    let mut odd_d = d[..pairs].to_vec();
    let odd_e = e[..pairs - 1].to_vec();
    if has_middle {
        even_d.push(d[pairs]);
        even_e.push(std::f64::consts::SQRT_2 * e[pairs - 1]);
    } else {
        even_d[pairs - 1] += e[pairs - 1];
        odd_d[pairs - 1] -= e[pairs - 1];
    }
    Ok(ParityBlocks {
        even: TridiagonalHamiltonian::new(even_d, even_e)?,
        odd: TridiagonalHamiltonian::new(odd_d, odd_e)?,
        pairs,
        has_middle,
    })
}

fn unfold(sector: &[f64], parity: Parity, n: usize, pairs: usize, has_middle: bool) -> Vec<f64> {
    let mut q = vec![0.0; n];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    for i in 0..pairs {
        q[i] = s * sector[i];
        q[n - 1 - i] = sign * s * sector[i];
    }
    if has_middle && parity == Parity::Even {
        q[pairs] = sector[pairs];
    }
    fix_sign(&mut q);
    q
}

fn diagonalize_by_parity(h: &TridiagonalHamiltonian, k: usize, want_vectors: bool) -> Result<Spectrum> {
    let n = h.dim();
    let blocks = parity_blocks(h)?;
    let ke = k.min(blocks.even.dim());
    let ko = k.min(blocks.odd.dim());
    let even_vals = blocks.even.lowest_eigenvalues(ke)?;
    let mut odd_vals = blocks.odd.lowest_eigenvalues(ko)?;

    // Both sectors' vectors are needed for the splitting refinement even
    // when the caller does not ask for vectors.
    let even_vecs = blocks.even.eigenvectors_for(&even_vals)?;
    let odd_vecs = blocks.odd.eigenvectors_for(&odd_vals)?;

    let norm = h.norm_inf().max(f64::MIN_POSITIVE);
    let p = blocks.pairs - 1;
    let e_mid = h.offdiag[p];
    let mut refined = vec![None; ke.min(ko)];
    for j in 0..ke.min(ko) {
        let direct = odd_vals[j] - even_vals[j];
        if direct.abs() > 1e-6 * norm {
            continue;
        }
        let (ev, ov) = (&even_vecs[j], &odd_vecs[j]);
        let overlap: f64 = ev.iter().zip(ov).map(|(a, b)| a * b).sum();
        if overlap.abs() < 0.5 {
            continue;
        }
        // (E_o - E_e) <e|o> = <e|(T_odd - T_even)|o>, where the blocks differ
        // only at the centre of the chain
        let (centre, coef) = if blocks.has_middle {
            (blocks.pairs, -std::f64::consts::SQRT_2 * e_mid)
        } else {
            (p, -2.0 * e_mid)
        };
        let (le, se) = signed_log_tail(&blocks.even, even_vals[j], ev, centre);
        let (lo, so) = signed_log_tail(&blocks.odd, odd_vals[j], ov, p);
        let split = coef * se * so * (le + lo - overlap.abs().ln()).exp() * overlap.signum();
        if split.is_finite() {
            odd_vals[j] = even_vals[j] + split;
            refined[j] = Some(split);
        }
    }

    let mut levels: Vec<(f64, Parity, usize)> = even_vals
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, Parity::Even, i))
        .chain(odd_vals.iter().enumerate().map(|(i, &x)| (x, Parity::Odd, i)))
        .collect();
    levels.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1 == Parity::Odd).cmp(&(b.1 == Parity::Odd)))
            .then(a.2.cmp(&b.2))
    });
    levels.truncate(k);

    let eigenvectors = if want_vectors {
        let mut out = Vec::with_capacity(k);
        for &(_, parity, i) in &levels {
            let sector = match parity {
                Parity::Even => &even_vecs[i],
                Parity::Odd => &odd_vecs[i],
            };
            let q = unfold(sector, parity, n, blocks.pairs, blocks.has_middle);
            debug_assert!((euclid(&q) - 1.0).abs() < 1e-10);
            out.push(q);
        }
        Some(out)
    } else {
        None
    };

    let position = |parity: Parity, idx: usize| levels.iter().position(|l| l.1 == parity && l.2 == idx);
    let pair_splittings = refined
        .iter()
        .enumerate()
        .filter_map(|(j, split)| {
            let split = (*split)?;
            Some(PairSplitting {
                even: position(Parity::Even, j)?,
                odd: position(Parity::Odd, j)?,
                splitting: split,
            })
        })
        .collect();

    Ok(Spectrum {
        pair_splittings,
        eigenvalues: levels.iter().map(|l| l.0).collect(),
        parities: Some(levels.iter().map(|l| l.1).collect()),
        eigenvectors,
        k_computed: k,
    })
}

/// `(ln |v_target|, sign v_target)` for an eigenvector of `h`. Components
/// beyond the largest one are rebuilt from the backward ratio recurrence
/// `v_i / v_{i-1} = -e_{i-1} / (d_i - E + e_i v_{i+1} / v_i)`, which stays
/// accurate where the vector decays far below the working precision of
/// inverse iteration.
fn signed_log_tail(h: &TridiagonalHamiltonian, value: f64, v: &[f64], target: usize) -> (f64, f64) {
    let n = h.dim();
    let peak = v
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc })
        .0;
    if target <= peak || n < 2 {
        return (v[target].abs().ln(), v[target].signum());
    }
    let mut ratios = vec![0.0; n];
    let mut next = 0.0;
    for i in (peak + 1..n).rev() {
        let tail = if i + 1 < n { h.offdiag[i] * next } else { 0.0 };
        let r = -h.offdiag[i - 1] / (h.diag[i] - value + tail);
        ratios[i] = r;
        next = r;
    }
    let mut log_amp = v[peak].abs().ln();
    let mut sign = v[peak].signum();
    for r in &ratios[peak + 1..=target] {
        log_amp += r.abs().ln();
        sign *= r.signum();
    }
    (log_amp, sign)
}

/// Number distribution of the lowest level in `spec`.
pub fn ground_distribution(spec: &Spectrum) -> Result<NumberDistribution> {
    let q = spec
        .eigenvectors
        .as_ref()
        .and_then(|v| v.first())
        .ok_or(Error::MissingEigenvectors)?;
    let mut probs: Vec<f64> = q.iter().map(|x| x * x).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(NumberDistribution { probs })
}

/// How the values of a sweep grid are turned into a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Grid values are Lambda in the given convention.
    Control(LambdaConvention),
    /// Grid values are the coupling lambda itself.
    Coupling,
}

/// One row of a low-spectrum sweep. Missing levels are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub control: f64,
    pub lambda: f64,
    pub e0: f64,
    pub gap01: f64,
    pub gap12: f64,
    pub ratio: f64,
    pub gap02: f64,
    pub gap03: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_spectrum(control: f64, lambda: f64, spec: &Spectrum) -> Self {
        let gap01 = spec.gap(0, 1);
        let gap12 = spec.gap(1, 2);
        SweepRow {
            control,
            lambda,
            e0: spec.eigenvalues[0],
            gap01,
            gap12,
            ratio: gap01 / gap12,
            gap02: spec.gap(0, 2),
            gap03: spec.gap(0, 3),
            error: None,
        }
    }

    pub fn failed(control: f64, lambda: f64, err: &Error) -> Self {
        SweepRow {
            control,
            lambda,
            e0: f64::NAN,
            gap01: f64::NAN,
            gap12: f64::NAN,
            ratio: f64::NAN,
            gap02: f64::NAN,
            gap03: f64::NAN,
            error: Some(err.to_string()),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }
}

fn sweep_point(params: &ModelParams, value: f64, axis: SweepAxis) -> SweepRow {
    let lambda = match axis {
        SweepAxis::Control(conv) => match params.lambda_from_control(value, conv) {
            Ok(l) => l,
            Err(e) => return SweepRow::failed(value, f64::NAN, &e),
        },
        SweepAxis::Coupling => value,
    };
    let p = params.with_lambda(lambda);
    let run = || -> Result<Spectrum> {
        let h = build_hamiltonian(&p)?;
        let k = 4.min(h.dim());
        diagonalize(&h, k, false)
    };
    match run() {
        Ok(spec) => SweepRow::from_spectrum(value, lambda, &spec),
        Err(e) => SweepRow::failed(value, lambda, &e),
    }
}

/// Independent diagonalization per grid value (in parallel), rows returned
/// in input order. Failures mark the row instead of aborting the sweep.
pub fn gap_ratio_sweep(params: &ModelParams, grid: &[f64], axis: SweepAxis) -> Vec<SweepRow> {
    grid.par_iter().map(|&x| sweep_point(params, x, axis)).collect()
}
