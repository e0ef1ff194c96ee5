//! Acceptance suite: every closed-form quantity is cross-validated against
//! an independent numerical oracle, plus the invariant, combinatorics and
//! determinism gates. Each test prints one PASS line with its headline
//! numbers.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minkmix::combinatorics::{
    binomial, composition_count, multinomial_coeff_exact, multinomial_coeff_log, PascalSimplex,
    WeakCompositions,
};
use minkmix::expfam::{FamilyDescriptor, SourceParameter};
use minkmix::minkdist::{
    closed_form_distance, log_geometric_integral, log_mixture_power_integral, mixture_lp_norm,
};
use minkmix::oracle::{integrate_abs_power, integrate_power, oracle_distances, quad, OracleConfig};
use minkmix::{DistanceKind, EngineOptions, MixtureModel};

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn bernoulli_mixture(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| (w, SourceParameter::Bernoulli { lambda: rng.random_range(lo..hi) }))
        .collect();
    MixtureModel::from_source(FamilyDescriptor::bernoulli(), comps).unwrap()
}

fn multinoulli_mixture(rng: &mut ChaCha8Rng, k: usize, d: usize) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| {
            let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            (w, SourceParameter::Multinoulli {
                lambda: raw.into_iter().map(|x| x / total).collect(),
            })
        })
        .collect();
    MixtureModel::from_source(FamilyDescriptor::multinoulli(d).unwrap(), comps).unwrap()
}

fn laplacian_mixture(rng: &mut ChaCha8Rng, k: usize) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| (w, SourceParameter::Laplacian { sigma: rng.random_range(0.3..3.0) }))
        .collect();
    MixtureModel::from_source(FamilyDescriptor::laplacian(), comps).unwrap()
}

fn gaussian1_mixture(rng: &mut ChaCha8Rng, k: usize, mu_shift: f64) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| {
            (w, SourceParameter::Gaussian {
                mean: DVector::from_element(1, mu_shift + rng.random_range(-2.0..2.0)),
                covariance: DMatrix::from_element(1, 1, rng.random_range(0.3..2.5)),
            })
        })
        .collect();
    MixtureModel::from_source(FamilyDescriptor::gaussian(1).unwrap(), comps).unwrap()
}

fn random_pd(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.8..0.8));
    let shift: f64 = rng.random_range(0.6..1.8);
    let m = &a * a.transpose() + DMatrix::identity(d, d) * shift;
    (&m + m.transpose()) * 0.5
}

fn gaussian2_mixture(rng: &mut ChaCha8Rng, k: usize, mu_shift: f64) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| {
            (w, SourceParameter::Gaussian {
                mean: DVector::from_fn(2, |i, _| {
                    if i == 0 {
                        mu_shift + rng.random_range(-1.5..1.5)
                    } else {
                        rng.random_range(-1.5..1.5)
                    }
                }),
                covariance: random_pd(rng, 2),
            })
        })
        .collect();
    MixtureModel::from_source(FamilyDescriptor::gaussian(2).unwrap(), comps).unwrap()
}

fn wishart2_mixture(rng: &mut ChaCha8Rng, k: usize, dof_shift: f64) -> MixtureModel {
    let comps = weights(rng, k)
        .into_iter()
        .map(|w| {
            (w, SourceParameter::Wishart {
                dof: 3.5 + dof_shift + rng.random_range(0.0..2.5),
                scale: random_pd(rng, 2),
            })
        })
        .collect();
    MixtureModel::from_source(FamilyDescriptor::wishart(2).unwrap(), comps).unwrap()
}

/// Total variation, used only to redraw degenerate pairs: relative
/// agreement checks are ill-posed when the two mixtures nearly coincide.
fn tv_estimate(m: &MixtureModel, m2: &MixtureModel, cfg: &OracleConfig) -> f64 {
    0.5 * integrate_abs_power(m, m2, 1.0, cfg).unwrap().value
}

const DISCRETE_KINDS: [DistanceKind; 9] = [
    DistanceKind::Difference(2),
    DistanceKind::Difference(3),
    DistanceKind::Difference(4),
    DistanceKind::Difference(5),
    DistanceKind::LogRatio(2),
    DistanceKind::LogRatio(3),
    DistanceKind::LogRatio(4),
    DistanceKind::LogRatio(5),
    DistanceKind::CauchySchwarz,
];

#[test]
fn criterion_1_exact_oracle_equivalence_discrete() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = EngineOptions::default();
    let cfg = OracleConfig::exact();
    let mut worst: f64 = 0.0;
    let mut checks = 0u32;

    for pair in 0..200 {
        let (m, m2) = loop {
            let (a, b) = if pair % 2 == 0 {
                let k = rng.random_range(1..=4);
                let k2 = rng.random_range(1..=4);
                (
                    bernoulli_mixture(&mut rng, k, 0.05, 0.45),
                    bernoulli_mixture(&mut rng, k2, 0.55, 0.95),
                )
            } else {
                let d = 2 + (pair / 2) % 4;
                let k = rng.random_range(1..=4);
                let k2 = rng.random_range(1..=4);
                (multinoulli_mixture(&mut rng, k, d), multinoulli_mixture(&mut rng, k2, d))
            };
            if tv_estimate(&a, &b, &cfg) >= 0.1 {
                break (a, b);
            }
        };

        for alpha in 2..=5u32 {
            for operand in [&m, &m2] {
                let cf = mixture_lp_norm(operand, alpha, &opts).unwrap();
                let exact =
                    integrate_power(operand, f64::from(alpha), &cfg).unwrap().value.powf(
                        1.0 / f64::from(alpha),
                    );
                worst = worst.max(rel(cf.value, exact));
                checks += 1;
            }
        }
        let oracle = oracle_distances(&DISCRETE_KINDS, &m, &m2, &cfg).unwrap();
        for (kind, est) in DISCRETE_KINDS.iter().zip(&oracle) {
            let cf = closed_form_distance(*kind, &m, &m2, &opts).unwrap();
            worst = worst.max(rel(cf.value, est.value));
            checks += 1;
        }
        for alpha in [2u32, 4] {
            let kind = DistanceKind::Minkowski(alpha);
            let cf = closed_form_distance(kind, &m, &m2, &opts).unwrap();
            let est = integrate_abs_power(&m, &m2, f64::from(alpha), &cfg)
                .unwrap()
                .value
                .powf(1.0 / f64::from(alpha));
            worst = worst.max(rel(cf.value, est));
            checks += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-10, "worst relative deviation {worst:e}");
    assert!(elapsed < 10.0, "criterion 1 took {elapsed:.1}s");
    println!(
        "criterion 1: PASS — 200 discrete pairs, {checks} checks, worst rel {worst:.2e}, {elapsed:.2}s"
    );
}

#[test]
fn criterion_2_quadrature_equivalence_univariate() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let opts = EngineOptions::default();
    let mut cfg = OracleConfig::quadrature();
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-15;
    cfg.max_subdivisions = 20_000;
    let mut coarse_cfg = cfg.clone();
    coarse_cfg.rel_tol = 1e-6;
    let mut worst: f64 = 0.0;
    let mut checks = 0u32;

    for pair in 0..100 {
        let (m, m2) = loop {
            let k = rng.random_range(1..=3);
            let k2 = rng.random_range(1..=3);
            let (a, b) = if pair % 2 == 0 {
                (gaussian1_mixture(&mut rng, k, 0.0), gaussian1_mixture(&mut rng, k2, 2.5))
            } else {
                (laplacian_mixture(&mut rng, k), laplacian_mixture(&mut rng, k2))
            };
            if tv_estimate(&a, &b, &coarse_cfg) >= 0.1 {
                break (a, b);
            }
        };

        for alpha in 2..=5u32 {
            let cf = mixture_lp_norm(&m, alpha, &opts).unwrap();
            let est = integrate_power(&m, f64::from(alpha), &cfg)
                .unwrap()
                .value
                .powf(1.0 / f64::from(alpha));
            worst = worst.max(rel(cf.value, est));
            checks += 1;
        }
        let oracle = oracle_distances(&DISCRETE_KINDS, &m, &m2, &cfg).unwrap();
        for (kind, est) in DISCRETE_KINDS.iter().zip(&oracle) {
            let cf = closed_form_distance(*kind, &m, &m2, &opts).unwrap();
            worst = worst.max(rel(cf.value, est.value));
            checks += 1;
        }
        for alpha in [2u32, 4] {
            let kind = DistanceKind::Minkowski(alpha);
            let cf = closed_form_distance(kind, &m, &m2, &opts).unwrap();
            let est = integrate_abs_power(&m, &m2, f64::from(alpha), &cfg)
                .unwrap()
                .value
                .powf(1.0 / f64::from(alpha));
            worst = worst.max(rel(cf.value, est));
            checks += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-8, "worst relative deviation {worst:e}");
    assert!(elapsed < 60.0, "criterion 2 took {elapsed:.1}s");
    println!(
        "criterion 2: PASS — 100 univariate pairs, {checks} checks, worst rel {worst:.2e}, {elapsed:.2}s"
    );
}

#[test]
fn criterion_3_monte_carlo_equivalence_multivariate() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let opts = EngineOptions::default();
    let kinds: Vec<DistanceKind> = DISCRETE_KINDS
        .iter()
        .copied()
        .chain([DistanceKind::Minkowski(2), DistanceKind::Minkowski(4)])
        .collect();
    let mut worst_sigmas: f64 = 0.0;
    let mut checks = 0u32;

    for pair in 0..30 {
        let (m, m2) = if pair < 20 {
            let k = rng.random_range(1..=2);
            let k2 = rng.random_range(1..=2);
            (gaussian2_mixture(&mut rng, k, 0.0), gaussian2_mixture(&mut rng, k2, 1.5))
        } else {
            let k = rng.random_range(1..=2);
            let k2 = rng.random_range(1..=2);
            (wishart2_mixture(&mut rng, k, 0.0), wishart2_mixture(&mut rng, k2, 1.5))
        };
        let cfg = OracleConfig::monte_carlo(1_000_000, 1042 + pair as u64);
        let oracle = oracle_distances(&kinds, &m, &m2, &cfg).unwrap();
        for (kind, est) in kinds.iter().zip(&oracle) {
            let cf = closed_form_distance(*kind, &m, &m2, &opts).unwrap();
            let sigmas = (cf.value - est.value).abs() / est.stderr.max(1e-13);
            worst_sigmas = worst_sigmas.max(sigmas);
            assert!(
                (cf.value - est.value).abs() <= 3.0 * est.stderr + 1e-12,
                "pair {pair} {}: closed form {} vs oracle {} ± {} ({sigmas:.2}σ)",
                kind.label(),
                cf.value,
                est.value,
                est.stderr
            );
            checks += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "criterion 3 took {elapsed:.1}s");
    println!(
        "criterion 3: PASS — 30 multivariate pairs at 10^6 samples, {checks} checks, worst {worst_sigmas:.2}σ, {elapsed:.1}s"
    );
}

#[test]
fn criterion_4_known_value_spot_checks() {
    let opts = EngineOptions::default();

    // Geometric integral of N(0,1), N(1,1) at weights (1/2, 1/2): the
    // Bhattacharyya integral e^{-1/8}, re-derived here by quadrature.
    let g1 = FamilyDescriptor::gaussian(1).unwrap();
    let m = MixtureModel::from_source(
        g1,
        vec![(
            1.0,
            SourceParameter::Gaussian {
                mean: DVector::zeros(1),
                covariance: DMatrix::from_element(1, 1, 1.0),
            },
        )],
    )
    .unwrap();
    let m2 = MixtureModel::from_source(
        g1,
        vec![(
            1.0,
            SourceParameter::Gaussian {
                mean: DVector::from_element(1, 1.0),
                covariance: DMatrix::from_element(1, 1, 1.0),
            },
        )],
    )
    .unwrap();
    let log_i =
        log_geometric_integral(g1, &[&m.thetas()[0], &m2.thetas()[0]], &[0.5, 0.5]).unwrap();
    let quadrature = quad::integrate_real_line(
        |x: f64| {
            let p = (-(0.5) * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let q = (-(0.5) * (x - 1.0) * (x - 1.0)).exp() / (2.0 * std::f64::consts::PI).sqrt();
            (p * q).sqrt()
        },
        8.0,
        1e-12,
        1e-15,
        4000,
    )
    .unwrap()
    .value;
    assert!(rel(log_i.exp(), (-0.125_f64).exp()) <= 1e-8, "I = {}", log_i.exp());
    assert!(rel(log_i.exp(), quadrature) <= 1e-8, "quadrature {quadrature}");

    // Bernoulli 0.25 vs 0.75: M₂ = √(Σ_x (p−q)²) = √0.5.
    let b = FamilyDescriptor::bernoulli();
    let p = MixtureModel::from_source(b, vec![(1.0, SourceParameter::Bernoulli { lambda: 0.25 })])
        .unwrap();
    let q = MixtureModel::from_source(b, vec![(1.0, SourceParameter::Bernoulli { lambda: 0.75 })])
        .unwrap();
    let m2dist = closed_form_distance(DistanceKind::Minkowski(2), &p, &q, &opts).unwrap();
    assert!(
        rel(m2dist.value, 0.5_f64.sqrt()) <= 1e-13,
        "M2 = {} vs {}",
        m2dist.value,
        0.5_f64.sqrt()
    );

    // Single standard Gaussian: ‖p‖₂ = (2√π)^{-1/2}, quadrature-checked.
    let norm = mixture_lp_norm(&m, 2, &opts).unwrap();
    let expected = (2.0 * std::f64::consts::PI.sqrt()).recip().sqrt();
    assert!(rel(norm.value, expected) <= 1e-8);
    let cfg = OracleConfig::quadrature();
    let quad_norm = integrate_power(&m, 2.0, &cfg).unwrap().value.sqrt();
    assert!(rel(norm.value, quad_norm) <= 1e-8);

    println!(
        "criterion 4: PASS — I(1/2,1/2) = e^(-1/8), M2(B(.25),B(.75)) = sqrt(0.5), ||N(0,1)||_2 = (2*sqrt(pi))^(-1/2)"
    );
}

#[test]
fn criterion_5_invariant_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let opts = EngineOptions::default();
    let symmetric_kinds = [
        DistanceKind::Minkowski(2),
        DistanceKind::Minkowski(4),
        DistanceKind::Difference(2),
        DistanceKind::Difference(3),
        DistanceKind::Difference(4),
        DistanceKind::LogRatio(2),
        DistanceKind::LogRatio(3),
        DistanceKind::LogRatio(4),
        DistanceKind::CauchySchwarz,
    ];

    let pair_factories: Vec<Box<dyn Fn(&mut ChaCha8Rng) -> (MixtureModel, MixtureModel)>> = vec![
        Box::new(|rng| {
            (bernoulli_mixture(rng, 2, 0.05, 0.45), bernoulli_mixture(rng, 3, 0.55, 0.95))
        }),
        Box::new(|rng| (multinoulli_mixture(rng, 2, 4), multinoulli_mixture(rng, 3, 4))),
        Box::new(|rng| (laplacian_mixture(rng, 2), laplacian_mixture(rng, 3))),
        Box::new(|rng| (gaussian1_mixture(rng, 3, 0.0), gaussian1_mixture(rng, 2, 2.5))),
        Box::new(|rng| (gaussian2_mixture(rng, 2, 0.0), gaussian2_mixture(rng, 2, 1.5))),
        Box::new(|rng| (wishart2_mixture(rng, 2, 0.0), wishart2_mixture(rng, 2, 1.5))),
    ];

    let mut worst_symmetry: f64 = 0.0;
    let mut worst_scale_inv: f64 = 0.0;
    let mut worst_homogeneity: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    let mut worst_route_gap: f64 = 0.0;

    for factory in &pair_factories {
        for _ in 0..3 {
            let (m, m2) = factory(&mut rng);

            for kind in symmetric_kinds {
                let ab = closed_form_distance(kind, &m, &m2, &opts).unwrap().value;
                let ba = closed_form_distance(kind, &m2, &m, &opts).unwrap().value;
                worst_symmetry = worst_symmetry.max(rel(ab, ba));
                assert!(ab >= 0.0, "{} came out negative", kind.label());
            }

            for alpha in [2u32, 3] {
                let base =
                    closed_form_distance(DistanceKind::LogRatio(alpha), &m, &m2, &opts).unwrap();
                for lambda in [1e-3, 1.0, 1e3] {
                    let scaled = closed_form_distance(
                        DistanceKind::LogRatio(alpha),
                        &m.scaled(lambda).unwrap(),
                        &m2.scaled(lambda).unwrap(),
                        &opts,
                    )
                    .unwrap();
                    worst_scale_inv = worst_scale_inv.max(rel(base.value, scaled.value));
                }
            }

            for kind in [DistanceKind::Difference(3), DistanceKind::Minkowski(2)] {
                let base = closed_form_distance(kind, &m, &m2, &opts).unwrap().value;
                for lambda in [0.125, 9.0] {
                    let scaled = closed_form_distance(
                        kind,
                        &m.scaled(lambda).unwrap(),
                        &m2.scaled(lambda).unwrap(),
                        &opts,
                    )
                    .unwrap()
                    .value;
                    worst_homogeneity = worst_homogeneity.max(rel(lambda * base, scaled));
                }
            }

            for kind in symmetric_kinds {
                let same = closed_form_distance(kind, &m, &m, &opts).unwrap().value;
                worst_identity = worst_identity.max(same.abs());
            }

            // α = 2: the squared-difference expansion route must agree with
            // the direct inner-product route.
            let m2sq = closed_form_distance(DistanceKind::Minkowski(2), &m, &m2, &opts)
                .unwrap()
                .value
                .powi(2);
            let (log_a, _) = log_mixture_power_integral(&m, 2, &opts).unwrap();
            let (log_b, _) = log_mixture_power_integral(&m2, 2, &opts).unwrap();
            let direct = log_a.exp() + log_b.exp()
                - 2.0 * minkmix::minkdist::log_inner_product(&m, &m2).unwrap().exp();
            worst_route_gap = worst_route_gap.max(rel(m2sq, direct));
        }
    }

    // Triangle inequality for the norm-induced M_α on 100 random triples.
    let mut worst_triangle: f64 = 0.0;
    for i in 0..100 {
        let (a, b, c) = if i % 2 == 0 {
            (
                gaussian1_mixture(&mut rng, 2, 0.0),
                gaussian1_mixture(&mut rng, 2, 1.0),
                gaussian1_mixture(&mut rng, 2, 2.0),
            )
        } else {
            (
                bernoulli_mixture(&mut rng, 2, 0.05, 0.95),
                bernoulli_mixture(&mut rng, 2, 0.05, 0.95),
                bernoulli_mixture(&mut rng, 2, 0.05, 0.95),
            )
        };
        for alpha in [2u32, 4] {
            let kind = DistanceKind::Minkowski(alpha);
            let ac = closed_form_distance(kind, &a, &c, &opts).unwrap().value;
            let ab = closed_form_distance(kind, &a, &b, &opts).unwrap().value;
            let bc = closed_form_distance(kind, &b, &c, &opts).unwrap().value;
            worst_triangle = worst_triangle.max(ac - (ab + bc));
        }
    }

    assert!(worst_symmetry <= 1e-12, "symmetry {worst_symmetry:e}");
    assert!(worst_scale_inv <= 1e-12, "scale invariance {worst_scale_inv:e}");
    assert!(worst_homogeneity <= 1e-12, "homogeneity {worst_homogeneity:e}");
    assert!(worst_identity <= 1e-10, "identity of indiscernibles {worst_identity:e}");
    assert!(worst_route_gap <= 1e-12, "alpha=2 route agreement {worst_route_gap:e}");
    assert!(worst_triangle <= 1e-10, "triangle inequality slack {worst_triangle:e}");
    println!(
        "criterion 5: PASS — symmetry {worst_symmetry:.1e}, scale-inv {worst_scale_inv:.1e}, homogeneity {worst_homogeneity:.1e}, identity {worst_identity:.1e}, route gap {worst_route_gap:.1e}, triangle slack {worst_triangle:.1e}"
    );
}

#[test]
fn criterion_6_combinatorics_suite() {
    // Stream counts match C(k+α−1, α) exactly.
    for alpha in 0..=8u32 {
        for k in 1..=6usize {
            let streamed = WeakCompositions::new(alpha, k).count() as u64;
            assert_eq!(BigUint::from(streamed), composition_count(alpha, k));
        }
    }
    // Multinomial theorem at x_i = 1: coefficients sum to k^α.
    for alpha in 0..=8u32 {
        for k in 1..=5usize {
            let mut ps = PascalSimplex::new();
            let mut total = BigUint::zero();
            for parts in WeakCompositions::new(alpha, k) {
                total += ps.coeff(&parts);
            }
            assert_eq!(total, BigUint::from(k as u64).pow(alpha));
        }
    }
    // Pascal recurrence on random compositions.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut ps = PascalSimplex::new();
    for _ in 0..200 {
        let k = rng.random_range(1..=5usize);
        let parts: Vec<u32> = (0..k).map(|_| rng.random_range(0..6u32)).collect();
        if parts.iter().all(|&p| p == 0) {
            assert_eq!(ps.coeff(&parts), BigUint::one());
            continue;
        }
        let mut sum = BigUint::zero();
        for i in 0..k {
            if parts[i] == 0 {
                continue;
            }
            let mut sub = parts.clone();
            sub[i] -= 1;
            sum += ps.coeff(&sub);
        }
        assert_eq!(ps.coeff(&parts), sum, "{parts:?}");
    }
    // Log-domain coefficients track the exact ones.
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(1..=5usize);
        let parts: Vec<u32> = (0..k).map(|_| rng.random_range(0..30u32)).collect();
        let exact_log = multinomial_coeff_exact(&parts).to_f64().unwrap().ln();
        let log = multinomial_coeff_log(&parts);
        worst = worst.max((log - exact_log).abs() / exact_log.abs().max(1.0));
    }
    assert!(worst <= 1e-12, "log vs exact coefficient gap {worst:e}");
    assert_eq!(binomial(9, 8), BigUint::from(9u32));
    println!("criterion 6: PASS — counts, k^α sums, Pascal recurrence exact; log gap {worst:.1e}");
}

#[test]
fn criterion_7_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);

    // Closed form: contiguous-range workers agree to 1e-13 relative.
    let m = gaussian1_mixture(&mut rng, 4, 0.0);
    let m2 = gaussian1_mixture(&mut rng, 4, 2.0);
    let sum = m.concat(&m2).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [4u32, 5] {
        let one = EngineOptions { workers: 1, ..Default::default() };
        let four = EngineOptions { workers: 4, ..Default::default() };
        let (l1, t1) = log_mixture_power_integral(&sum, alpha, &one).unwrap();
        let (l4, t4) = log_mixture_power_integral(&sum, alpha, &four).unwrap();
        assert_eq!(t1, t4);
        worst = worst.max(rel(l1.exp(), l4.exp()));
        let d1 = closed_form_distance(DistanceKind::Minkowski(4), &m, &m2, &one).unwrap();
        let d4 = closed_form_distance(DistanceKind::Minkowski(4), &m, &m2, &four).unwrap();
        worst = worst.max(rel(d1.value, d4.value));
    }
    assert!(worst <= 1e-13, "worker disagreement {worst:e}");

    // Repeated runs are bit-identical too.
    let opts = EngineOptions::default();
    let a = closed_form_distance(DistanceKind::Difference(3), &m, &m2, &opts).unwrap();
    let b = closed_form_distance(DistanceKind::Difference(3), &m, &m2, &opts).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());

    // Monte Carlo: same seed and chunking give bit-identical estimates no
    // matter how the chunks are scheduled (merged in chunk order).
    let g = gaussian2_mixture(&mut rng, 2, 0.0);
    let g2 = gaussian2_mixture(&mut rng, 2, 1.0);
    let cfg = OracleConfig::monte_carlo(200_000, 99);
    let kinds = [DistanceKind::Minkowski(2), DistanceKind::Difference(2)];
    let run1 = oracle_distances(&kinds, &g, &g2, &cfg).unwrap();
    let run2 = oracle_distances(&kinds, &g, &g2, &cfg).unwrap();
    for (x, y) in run1.iter().zip(&run2) {
        assert_eq!(x.value.to_bits(), y.value.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
    println!(
        "criterion 7: PASS — workers 1 vs 4 within {worst:.1e} relative, MC estimates bit-identical under a fixed seed and chunking"
    );
}
