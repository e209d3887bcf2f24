mod common;

use catspec::adiabatic::{cayley_step, RampSchedule, RampShape};
use catspec::field::gaussian::GaussianPair;
use catspec::field::grid::{energy_functional, RadialGrid};
use catspec::tridiag::TridiagLu;
use catspec::twomode::exact::{build_hamiltonian, diagonalize};
use catspec::twomode::meanfield::{mean_field_branches, stationarity_residual};
use catspec::{LambdaConvention, ModelParams, TridiagonalHamiltonian};
use num_complex::Complex64;
use proptest::prelude::*;

fn coupling() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lowest_levels_match_dense_ladder_construction(n in 1usize..=7, u0 in coupling(), u1 in coupling(), lam in 0.0..2.0f64) {
        let h = build_hamiltonian(&ModelParams::new(n, u0, u1, lam).unwrap()).unwrap();
        let spec = diagonalize(&h, n + 1, false).unwrap();
        let dense = common::sorted_eigenvalues(&common::dense_hamiltonian(n, u0, u1, lam));
        for (a, b) in spec.eigenvalues.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_parity_states(n in 2usize..40, u0 in coupling(), u1 in coupling(), lam in 0.01..2.0f64) {
        let h = build_hamiltonian(&ModelParams::new(n, u0, u1, lam).unwrap()).unwrap();
        let k = (n + 1).min(6);
        let spec = diagonalize(&h, k, true).unwrap();
        let vecs = spec.eigenvectors.as_ref().unwrap();
        let parities = spec.parities.as_ref().unwrap();
        let scale = h.norm_inf();
        for (i, v) in vecs.iter().enumerate() {
            let sign = if parities[i] == catspec::twomode::exact::Parity::Even { 1.0 } else { -1.0 };
            for m in 0..=n {
                prop_assert!((v[m] - sign * v[n - m]).abs() < 1e-12);
            }
            let hv = h.apply(v);
            let res = hv.iter().zip(v).map(|(a, b)| (a - spec.eigenvalues[i] * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res < 1e-9 * scale.max(1.0), "residual {res}");
            for w in &vecs[..i] {
                let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() < 1e-9);
            }
            let norm: f64 = v.iter().map(|x| x * x).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_spectrum_sums_to_trace(n in 1usize..60, u0 in coupling(), u1 in coupling(), lam in 0.0..2.0f64) {
        let h = build_hamiltonian(&ModelParams::new(n, u0, u1, lam).unwrap()).unwrap();
        let spec = diagonalize(&h, n + 1, false).unwrap();
        let trace: f64 = h.diag.iter().sum();
        let sum: f64 = spec.eigenvalues.iter().sum();
        prop_assert!((trace - sum).abs() < 1e-10 * h.norm_inf().max(1.0) * (n + 1) as f64);
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    /// Where both are meaningful, the splitting recovered across the chain
    /// centre agrees with the difference of independently computed levels.
    #[test]
    fn resolved_splitting_agrees_with_direct_difference(n in 16usize..40, control in 0.55..0.95f64) {
        let p = ModelParams::new(n, 1.0, 3.0, 0.0).unwrap().at_control(control, LambdaConvention::TwoMode).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let spec = diagonalize(&h, 2, false).unwrap();
        let mut ql = h.all_eigenvalues_ql().unwrap();
        ql.sort_by(f64::total_cmp);
        let direct = ql[1] - ql[0];
        let scale = h.norm_inf();
        prop_assume!(direct > 1e-9 * scale);
        if direct < 1e-7 * scale {
            prop_assert!(!spec.pair_splittings.is_empty());
        }
        let split = spec.gap(0, 1);
        prop_assert!(((split - direct) / direct).abs() < 1e-4, "{split} vs {direct}");
    }

    #[test]
    fn tridiagonal_lu_solves(n in 1usize..50, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let sub: Vec<Complex64> = (1..n).map(|_| c()).collect();
        let sup: Vec<Complex64> = (1..n).map(|_| c()).collect();
        let diag: Vec<Complex64> = (0..n).map(|_| c() * 3.0).collect();
        let x: Vec<Complex64> = (0..n).map(|_| c()).collect();
        let mut b: Vec<Complex64> = (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 { v += sub[i - 1] * x[i - 1]; }
                if i + 1 < n { v += sup[i] * x[i + 1]; }
                v
            })
            .collect();
        TridiagLu::factor(&sub, &diag, &sup, 1e-300).solve_in_place(&mut b);
        let err = b.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        // random systems can be badly conditioned, so the residual is the
        // quantity a backward-stable solver controls
        let resid = {
            let mut worst = 0.0_f64;
            for i in 0..n {
                let mut v = diag[i] * b[i];
                if i > 0 { v += sub[i - 1] * b[i - 1]; }
                if i + 1 < n { v += sup[i] * b[i + 1]; }
                let mut rhs = diag[i] * x[i];
                if i > 0 { rhs += sub[i - 1] * x[i - 1]; }
                if i + 1 < n { rhs += sup[i] * x[i + 1]; }
                worst = worst.max((v - rhs).norm());
            }
            worst
        };
        let bnorm = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(resid < 1e-12 * 10.0 * bnorm, "residual {resid}, error {err}");
    }

    #[test]
    fn cayley_steps_are_unitary(n in 1usize..30, lam in 0.0..2.0f64, dt in 1e-3..0.5f64) {
        let h = build_hamiltonian(&ModelParams::new(n, 0.3, 0.9, lam).unwrap()).unwrap();
        let mut psi: Vec<Complex64> = (0..=n).map(|m| Complex64::new((m as f64).sin() + 0.5, (m as f64).cos())).collect();
        let norm0: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let energy = |psi: &[Complex64]| -> f64 {
            let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
            let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
            let (hr, hi) = (h.apply(&re), h.apply(&im));
            re.iter().zip(&hr).chain(im.iter().zip(&hi)).map(|(a, b)| a * b).sum()
        };
        let e0 = energy(&psi);
        for _ in 0..20 {
            cayley_step(&h, &mut psi, dt);
        }
        let norm1: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm1 / norm0 - 1.0).abs() < 1e-12);
        prop_assert!((energy(&psi) - e0).abs() < 1e-10 * h.norm_inf() * norm0);
    }

    #[test]
    fn mean_field_branches_are_stationary(n in 2usize..5000, u0 in 0.01..2.0f64, ratio in 1.1..5.0f64, control in 0.05..1.5f64) {
        let p = ModelParams::new(n, u0, ratio * u0, 0.0).unwrap().at_control(control, LambdaConvention::TwoMode).unwrap();
        let branches = mean_field_branches(&p).unwrap();
        prop_assert_eq!(branches.len(), if control < 1.0 { 3 } else { 1 });
        for b in &branches {
            let scale = u0 * ratio * (n as f64).powf(1.5);
            let (res, dmu) = stationarity_residual(&p, b);
            prop_assert!(res < 1e-10 * scale && dmu < 1e-10 * scale / (n as f64).sqrt());
            prop_assert!((b.alpha * b.alpha + b.beta * b.beta - n as f64).abs() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn functional_is_symmetric_under_species_exchange(na in 10.0..500.0f64, wa in 0.6..2.0f64, wb in 0.6..2.0f64, lam in 0.0..3.0f64) {
        let nb = 1000.0 - na;
        let p = ModelParams::new(1000, 0.2, 0.6, lam).unwrap();
        let pair = GaussianPair::from_populations(na, wa, nb, wb);
        let grid = RadialGrid::new(400, 12.0).unwrap();
        let e = energy_functional(&pair.sample(&grid), &p).unwrap();
        let m = energy_functional(&pair.mirrored().sample(&grid), &p).unwrap();
        prop_assert!((e - m).abs() < 1e-10 * e.abs());
        prop_assert!((pair.energy(&p) - pair.mirrored().energy(&p)).abs() < 1e-10 * e.abs());
    }

    #[test]
    fn ramp_control_stays_between_endpoints(start in 0.5..3.0f64, frac in 0.05..1.0f64, duration in 0.0..50.0f64, t in 0.0..1.2f64) {
        let end = start * frac;
        for shape in [RampShape::Linear, RampShape::Smoothstep] {
            let ramp = RampSchedule::new(start, end, duration, shape).unwrap();
            let c = ramp.control_at(t * duration);
            prop_assert!(c <= start + 1e-12 && c >= end - 1e-12);
            let later = ramp.control_at((t + 0.1) * duration);
            prop_assert!(later <= c + 1e-12);
        }
    }
}

#[test]
fn exchange_symmetric_hamiltonian_is_detected() {
    let h = build_hamiltonian(&ModelParams::new(9, 0.4, 1.1, 0.3).unwrap()).unwrap();
    assert!(h.is_reversal_symmetric(1e-12));
    let skewed = TridiagonalHamiltonian::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0]).unwrap();
    assert!(!skewed.is_reversal_symmetric(1e-12));
}
