use nhjc_core::ep::{classify, encircle, Regime};
use nhjc_core::gmm::{eigenvalues_2x2, GmmParams};
use nhjc_core::linalg::{inner, mat_mul, nullspace_2x2, CMatrix, CScalar, CVector};
use nhjc_core::spectrum::{detuning, sector_center, ModelParams};
use nhjc_core::{
    build_gmm, energy_nk, omega_for_ep, pf_representation, sector_eigen, verify_representation,
    Branch,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn cplx(range: f64) -> impl Strategy<Value = CScalar> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(cplx(2.0), n * n)
        .prop_map(move |v| CMatrix::from_row_major(n, n, v).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(cplx(2.0), n).prop_map(CVector::from)
}

/// GMM inputs away from the degeneracy `(-Δε + iΔΓ)² + 4ν₀² = 0`.
fn nondegenerate_gmm() -> impl Strategy<Value = GmmParams> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.0..3.0f64, 0.0..3.0f64, cplx(2.0))
        .prop_filter_map("degenerate or tiny coupling", |(e1, e2, g1, g2, nu0)| {
            let p = GmmParams::new(e1, e2, g1, g2, nu0).ok()?;
            (nu0.norm() > 0.1 && p.discriminant().norm() > 1e-3 * 4.0 * nu0.norm_sqr()).then_some(p)
        })
}

fn gauge() -> impl Strategy<Value = CScalar> {
    cplx(3.0).prop_filter("nonzero gauge", |z| z.norm() > 0.05)
}

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

fn model() -> impl Strategy<Value = ModelParams> {
    (cplx(4.0), cplx(4.0), cplx(4.0), cplx(2.0).prop_filter("coupling", |z| z.norm() > 0.1))
        .prop_map(|(w, w0, rho, eps)| ModelParams::new(w, w0, rho, eps))
}

fn rel_close(a: CScalar, b: CScalar, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mat_mul_is_associative(a in matrix(4), b in matrix(4), c in matrix(4)) {
        let left = mat_mul(&mat_mul(&a, &b).unwrap(), &c).unwrap();
        let right = mat_mul(&a, &mat_mul(&b, &c).unwrap()).unwrap();
        let scale = 1.0 + left.max_abs();
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn inner_is_linear_in_second_slot(u in vector(5), v in vector(5), w in vector(5), a in cplx(2.0), b in cplx(2.0)) {
        let combo = v.scale(a).axpy(b, &w).unwrap();
        let lhs = inner(&u, &combo).unwrap();
        let rhs = a * inner(&u, &v).unwrap() + b * inner(&u, &w).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()) * 10.0);
    }

    #[test]
    fn inner_is_conjugate_symmetric(u in vector(6), v in vector(6)) {
        let uv = inner(&u, &v).unwrap();
        let vu = inner(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-14 * (1.0 + uv.norm()));
    }

    #[test]
    fn nullspace_residual_is_small(x in cplx(3.0), y in cplx(3.0), s in cplx(3.0)) {
        prop_assume!(x.norm() + y.norm() > 1e-3 && s.norm() > 1e-3);
        // Rank one: second row is a multiple of the first.
        let m = CMatrix::from_2x2([[x, y], [s * x, s * y]]);
        let v = nullspace_2x2(&m).unwrap();
        let mv = nhjc_core::linalg::mat_vec(&m, &v).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-14);
        prop_assert!(mv.norm() <= 1e-12 * m.frobenius());
    }

    #[test]
    fn representation_holds_for_any_gauge(p in nondegenerate_gmm(), b in branch(), g in gauge()) {
        let rep = pf_representation(&p, b, g).unwrap();
        prop_assert!(verify_representation(&p, &rep) <= 1e-12 * (1.0 + build_gmm(&p).max_abs()));
        prop_assert!(rel_close(-rep.gamma_pm * rep.gamma_pm, rep.alpha12 * rep.beta12, 1e-12));
        prop_assert!(rel_close(rep.omega0 * rep.gamma_pm, p.nu0, 1e-12));
        let nf = rep.number_op();
        prop_assert!(mat_mul(&nf, &nf).unwrap().sub(&nf).unwrap().max_abs() <= 1e-12 * (1.0 + nf.max_abs()));
    }

    #[test]
    fn gmm_spectrum_is_rho_pair(p in nondegenerate_gmm(), g in gauge()) {
        let (e1, e2) = eigenvalues_2x2(&build_gmm(&p)).unwrap();
        let plus = pf_representation(&p, Branch::Plus, g).unwrap();
        let minus = pf_representation(&p, Branch::Minus, g).unwrap();
        let (r1, r2) = (plus.rho, minus.rho);
        let direct = (e1 - r1).norm().max((e2 - r2).norm());
        let swapped = (e1 - r2).norm().max((e2 - r1).norm());
        prop_assert!(direct.min(swapped) <= 1e-12 * (1.0 + e1.norm().max(e2.norm())));
        // The other GMM level is ρ + ħω₀ in either representation.
        prop_assert!(rel_close(plus.rho + plus.omega0, minus.rho, 1e-12));
    }

    #[test]
    fn gauge_does_not_change_observables(p in nondegenerate_gmm(), b in branch(), g1 in gauge(), g2 in gauge()) {
        let a = pf_representation(&p, b, g1).unwrap();
        let c = pf_representation(&p, b, g2).unwrap();
        prop_assert_eq!(a.rho, c.rho);
        prop_assert_eq!(a.omega0, c.omega0);
        let (a1, a2) = eigenvalues_2x2(&a.number_op()).unwrap();
        let (c1, c2) = eigenvalues_2x2(&c.number_op()).unwrap();
        prop_assert!((a1 - c1).norm() < 1e-12 && (a2 - c2).norm() < 1e-12);
    }

    #[test]
    fn branch_labels_agree_with_diagonal_labels(p in model(), n in 1u64..200) {
        let plus = sector_eigen(&p, n, Branch::Plus).unwrap();
        let minus = sector_eigen(&p, n, Branch::Minus).unwrap();
        prop_assert!(rel_close(energy_nk(&p, n, 0).unwrap(), plus.energy, 1e-12));
        prop_assert!(rel_close(energy_nk(&p, n - 1, 1).unwrap(), minus.energy, 1e-12));
    }

    #[test]
    fn sector_sum_and_difference(p in model(), n in 1u64..200) {
        let plus = sector_eigen(&p, n, Branch::Plus).unwrap();
        let minus = sector_eigen(&p, n, Branch::Minus).unwrap();
        let sum = 2.0 * (p.omega * (n as f64 - 0.5) + 0.5 * p.omega0 + p.rho);
        prop_assert!(rel_close(plus.energy + minus.energy, sum, 1e-12));
        let d = detuning(&p);
        let root = nhjc_core::linalg::principal_sqrt(d * d + 4.0 * p.coupling_sq() * n as f64);
        prop_assert!(rel_close(plus.energy - minus.energy, root, 1e-12));
        // ε√n (λ⁺ + λ⁻) = -δ.
        let lhs = p.coupling * (n as f64).sqrt() * (plus.lambda + minus.lambda);
        prop_assert!(rel_close(lhs, -d, 1e-12));
    }

    #[test]
    fn lambda_product_for_real_coupling(w in cplx(4.0), w0 in cplx(4.0), eps in 0.1..3.0f64, n in 1u64..200) {
        let p = ModelParams::new(w, w0, Complex64::new(0.0, 0.0), Complex64::new(eps, 0.0));
        let plus = sector_eigen(&p, n, Branch::Plus).unwrap();
        let minus = sector_eigen(&p, n, Branch::Minus).unwrap();
        prop_assert!(rel_close(plus.lambda * minus.lambda, Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn coalescence_at_tau_pm(w in -5.0..5.0f64, rho in cplx(3.0), eps in cplx(2.0), n in 1u64..150) {
        prop_assume!(eps.norm() > 0.1);
        let base = ModelParams::new(Complex64::new(w, 0.0), Complex64::new(w, 0.0), rho, eps);
        let (lo, hi) = nhjc_core::ep_tau(eps, n);
        for tau in [lo, hi] {
            let p = base.with_tau(Complex64::new(tau, 0.0));
            let plus = sector_eigen(&p, n, Branch::Plus).unwrap();
            let minus = sector_eigen(&p, n, Branch::Minus).unwrap();
            let center = sector_center(&p, n);
            // The gap is the root of a radicand that is zero up to rounding.
            let gap_tol = (1e-12 * (1.0 + tau * tau)).sqrt();
            prop_assert!((plus.energy - center).norm() <= gap_tol);
            prop_assert!((minus.energy - center).norm() <= gap_tol);
            let lam = -detuning(&p) / (2.0 * eps * (n as f64).sqrt());
            prop_assert!((plus.lambda - lam).norm() <= gap_tol);
            prop_assert!((minus.lambda - lam).norm() <= gap_tol);
        }
    }

    #[test]
    fn regimes_on_the_real_line(w in -5.0..5.0f64, rho in -3.0..3.0f64, eps in 0.1..2.0f64, n in 1u64..150, frac in 0.0..3.0f64) {
        let tau_ep = 2.0 * eps * (n as f64).sqrt();
        let tau = frac * tau_ep;
        prop_assume!((frac - 1.0).abs() > 1e-3);
        let base = ModelParams::new(Complex64::new(w, 0.0), Complex64::new(w, 0.0), Complex64::new(rho, 0.0), Complex64::new(eps, 0.0));
        let p = base.with_tau(Complex64::new(tau, 0.0));
        let plus = sector_eigen(&p, n, Branch::Plus).unwrap();
        let minus = sector_eigen(&p, n, Branch::Minus).unwrap();
        if frac > 1.0 {
            prop_assert!((plus.energy.re - minus.energy.re).abs() <= 1e-10);
            prop_assert_eq!(classify(&p, n, plus.energy, minus.energy), Regime::EqualReal);
        } else {
            prop_assert!((plus.energy.im - minus.energy.im).abs() <= 1e-10);
            prop_assert_eq!(classify(&p, n, plus.energy, minus.energy), Regime::EqualImag);
        }
    }

    #[test]
    fn self_overlap_vanishes_only_at_eps(eps in 0.2..2.0f64, n in 1u64..150, b in branch()) {
        let base = ModelParams::new(Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(eps, 0.0));
        let (lo, hi) = nhjc_core::ep_tau(base.coupling, n);
        // δ² + 4|ε|²n is zero only up to rounding unless τ± is exact; the
        // overlap then scales like its square root over |ε|√n.
        let noise = (4.0 * f64::EPSILON * hi * hi).sqrt() / (eps * (n as f64).sqrt());
        for tau in [lo, hi] {
            let at = nhjc_core::self_overlap(&base.with_tau(Complex64::new(tau, 0.0)), n, b).unwrap();
            prop_assert!(at.norm() <= 1e-12 + 4.0 * noise);
            for factor in [0.9, 1.1] {
                let off = nhjc_core::self_overlap(&base.with_tau(Complex64::new(tau * factor, 0.0)), n, b).unwrap();
                prop_assert!(off.norm() > 1e-3);
            }
        }
    }

    #[test]
    fn self_overlap_exact_on_square_sectors(k in 1u64..15, b in branch()) {
        // n = k², ε = 1: τ± = ±2k is exact, so the radicand is exactly zero.
        let n = k * k;
        let base = ModelParams::new(Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for tau in [-2.0 * k as f64, 2.0 * k as f64] {
            let at = nhjc_core::self_overlap(&base.with_tau(Complex64::new(tau, 0.0)), n, b).unwrap();
            prop_assert!(at.norm() <= 1e-12);
        }
    }

    #[test]
    fn omega_for_ep_round_trip(p in nondegenerate_gmm(), tau in -50.0..50.0f64, b in branch()) {
        let omega = omega_for_ep(&p, tau, b);
        let rep = pf_representation(&p, b, Complex64::new(1.0, 0.0)).unwrap();
        let model = ModelParams::from_rep(omega, Complex64::new(1.0, 0.0), &rep);
        prop_assert!((detuning(&model) - Complex64::new(0.0, tau)).norm() <= 1e-12 * (1.0 + tau.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn swap_is_robust_to_radius_and_resolution(ri in 0usize..3, si in 0usize..3, sign in prop_oneof![Just(1.0), Just(-1.0)]) {
        let radius = [0.5, 1.0, 2.0][ri];
        let steps = [360, 720, 1440][si];
        let base = ModelParams::new(Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let around = encircle(&base, 100, sign * 20.0, radius, steps).unwrap();
        prop_assert!(around.swapped);
        let away = encircle(&base, 100, sign * 25.0, radius, steps).unwrap();
        prop_assert!(!away.swapped);
    }
}
