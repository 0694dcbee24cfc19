use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use screen_sampler::analysis::log_log_slope;
use screen_sampler::integrands::make_bank;
use screen_sampler::{HeavisideIntegrand, Integrand, Point2};

/// Fraction of a `side²` midpoint grid on the positive side of `f`.
fn grid_area(f: &HeavisideIntegrand<f64>, side: usize) -> f64 {
    let h = 1.0 / side as f64;
    let hits: usize = (0..side)
        .into_par_iter()
        .map(|y| {
            let v = (y as f64 + 0.5) * h;
            (0..side)
                .filter(|&x| {
                    let u = (x as f64 + 0.5) * h;
                    f.eval_point(Point2 { u, v }) > 0.5
                })
                .count()
        })
        .sum();
    hits as f64 / (side * side) as f64
}

#[test]
fn clipping_agrees_with_grid_brute_force() {
    let bank = make_bank::<f64>(100, 2024).unwrap();
    for (f, &reference) in bank.integrands().iter().zip(bank.references()) {
        let brute = grid_area(f, 4096);
        assert!(
            (brute - reference).abs() <= 1e-3,
            "{f:?}: clipped {reference}, grid {brute}"
        );
    }
}

#[test]
fn iid_estimates_converge_at_half_rate() {
    let bank = make_bank::<f64>(64, 5).unwrap();
    let trials = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points: Vec<(f64, f64)> = [16usize, 64, 256, 1024]
        .iter()
        .map(|&n| {
            let mut sq = 0.0;
            for _ in 0..trials {
                let samples: Vec<Point2<f64>> = (0..n)
                    .map(|_| Point2 {
                        u: rng.gen(),
                        v: rng.gen(),
                    })
                    .collect();
                let est = bank.estimate_vector(&samples).unwrap();
                sq += est
                    .iter()
                    .zip(bank.references())
                    .map(|(e, r)| (e - r) * (e - r))
                    .sum::<f64>();
            }
            (n as f64, (sq / (trials * bank.len()) as f64).sqrt())
        })
        .collect();
    let slope = log_log_slope(&points);
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn estimates_lie_in_unit_interval() {
    let bank = make_bank::<f64>(32, 8).unwrap();
    let samples: Vec<Point2<f64>> = (0..37u32)
        .map(|k| screen_sampler::sampler::rank1_point(k, Default::default()))
        .collect();
    for e in bank.estimate_vector(&samples).unwrap() {
        assert!((0.0..=1.0).contains(&e));
    }
    assert!(bank.estimate_vector(&[]).is_err());
}

proptest! {
    #[test]
    fn flipped_references_sum_to_one(ax in 0.0f64..=1.0, ay in 0.0f64..=1.0, angle in 0.0f64..std::f64::consts::TAU) {
        let f = HeavisideIntegrand::new((ax, ay), angle);
        let total = f.exact_reference() + f.flipped().exact_reference();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&f.reference()));
    }

    #[test]
    fn banks_are_deterministic(m in 1usize..40, seed in any::<u64>()) {
        let a = make_bank::<f64>(m, seed).unwrap();
        let b = make_bank::<f64>(m, seed).unwrap();
        prop_assert_eq!(a.references(), b.references());
        for f in a.integrands() {
            let (nx, ny) = f.normal;
            prop_assert!(((nx * nx + ny * ny).sqrt() - 1.0).abs() < 1e-9);
        }
    }
}
