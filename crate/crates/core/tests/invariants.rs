#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::Rng;

use weibcv_core::bayes::hpdi;
use weibcv_core::censoring::{f_hat_km, f_hat_moments, generate_sample_with};
use weibcv_core::least_squares::{percentile_ranks, BootstrapDistribution};
use weibcv_core::mle::{log_likelihood_at, observed_information, score};
use weibcv_core::rng::stream_rng;
use weibcv_core::{cv_k, cv_p, CensoredSample, CensoringScheme, WeibullParams, WithdrawalRounding};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 1000, ..ProptestConfig::default() }
}

fn boundaries(gaps: &[f64]) -> Vec<f64> {
    gaps.iter()
        .scan(0.0, |t, g| {
            *t += g;
            Some(*t)
        })
        .collect()
}

/// Arbitrary count data with at least one failure.
fn sample() -> impl Strategy<Value = CensoredSample> {
    (1usize..=7)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(0.1f64..3.0, m),
                prop::collection::vec(0u64..40, m),
                prop::collection::vec(0u64..12, m),
            )
        })
        .prop_filter("needs a failure", |(_, x, _)| x.iter().any(|&v| v > 0))
        .prop_map(|(g, x, w)| CensoredSample::from_counts(boundaries(&g), x, w).unwrap())
}

/// A point where `tau t_m^kappa` is of order one.
fn params_for(sample: &CensoredSample, kappa: f64, c: f64) -> WeibullParams {
    let t_m = *sample.boundaries().last().unwrap();
    WeibullParams::new(kappa, c / t_m.powf(kappa)).unwrap()
}

fn scheme() -> impl Strategy<Value = CensoringScheme> {
    (1usize..=8)
        .prop_flat_map(|m| (prop::collection::vec(0.05f64..2.0, m), prop::collection::vec(0.0f64..=1.0, m)))
        .prop_map(|(g, mut p)| {
            *p.last_mut().unwrap() = 1.0;
            CensoringScheme::new(boundaries(&g), p).unwrap()
        })
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn score_matches_finite_differences(s in sample(), kappa in 0.3f64..4.0, c in 0.05f64..4.0) {
        let p = params_for(&s, kappa, c);
        let (k, t) = (p.kappa(), p.tau());
        let g = score(&p, &s).unwrap();
        let ll = log_likelihood_at(k, t, &s).abs();
        for (i, x) in [k, t].into_iter().enumerate() {
            let h = 1e-6 * x;
            let at = |d: f64| if i == 0 { log_likelihood_at(k + d, t, &s) } else { log_likelihood_at(k, t + d, &s) };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let tol = 1e-5 * (g[i].abs() + ll / x + 1.0);
            prop_assert!((fd - g[i]).abs() <= tol, "component {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn information_matches_finite_differences(s in sample(), kappa in 0.3f64..4.0, c in 0.05f64..4.0) {
        let p = params_for(&s, kappa, c);
        let (k, t) = (p.kappa(), p.tau());
        let info = observed_information(&p, &s).unwrap().0;
        let grad = |k: f64, t: f64| score(&WeibullParams::new(k, t).unwrap(), &s).unwrap();
        let scale = [k, t];
        for j in 0..2 {
            let h = 1e-6 * scale[j];
            let (up, down) = if j == 0 { (grad(k + h, t), grad(k - h, t)) } else { (grad(k, t + h), grad(k, t - h)) };
            for i in 0..2 {
                let fd = -(up[i] - down[i]) / (2.0 * h);
                let g_scale = grad(k, t)[i].abs() / scale[j];
                let tol = 1e-5 * (info[i][j].abs() + g_scale + 1.0);
                prop_assert!((fd - info[i][j]).abs() <= tol, "[{i}][{j}]: fd {fd} vs {}", info[i][j]);
            }
        }
        prop_assert!((info[0][1] - info[1][0]).abs() <= 1e-9 * (info[0][1].abs() + 1.0));
    }

    #[test]
    fn moments_cdf_is_increasing_inside_unit_interval(s in sample()) {
        let f = f_hat_moments(&s);
        prop_assert_eq!(f.len(), s.len());
        prop_assert!(f.iter().all(|&v| v > 0.0 && v < 1.0));
        prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn product_limit_cdf_is_nondecreasing(s in sample()) {
        if let Ok(f) = f_hat_km(&s) {
            prop_assert!(f.iter().all(|&v| (0.0..1.0).contains(&v)));
            prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn cv_identity(kappa in 0.05f64..50.0) {
        let p = cv_p(kappa).unwrap();
        let k = cv_k(kappa).unwrap();
        prop_assert!(k > 0.0 && k < 1.0);
        let rhs = p * p / (1.0 + p * p);
        prop_assert!((k * k - rhs).abs() <= 1e-12 * (1.0 + rhs), "{} vs {rhs}", k * k);
    }

    #[test]
    fn hpdi_is_narrowest_window(seed in any::<u64>(), level in 0.5f64..0.99, shape in 0u8..3) {
        let mut rng = stream_rng(seed, 0);
        let mut xs: Vec<f64> = (0..1000)
            .map(|_| {
                let u: f64 = rng.random();
                match shape {
                    0 => u,
                    1 => -(1.0 - u).ln(),
                    _ => (u * 20.0).round() / 4.0,
                }
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        let got = hpdi(&xs, level).unwrap();
        let w = (1000.0 * level).floor() as usize;
        let mut best = f64::INFINITY;
        let mut best_at = 0;
        for lo in 0..xs.len() - w {
            let width = xs[lo + w] - xs[lo];
            if width < best {
                best = width;
                best_at = lo;
            }
        }
        prop_assert_eq!(got.width(), best);
        prop_assert_eq!((got.lower, got.upper), (xs[best_at], xs[best_at + w]));
        let inside = xs.iter().filter(|&&v| got.contains(v)).count();
        prop_assert!(inside as f64 >= 1000.0 * level);
    }

    #[test]
    fn percentile_ranks_are_in_range(b in 1usize..5000, level in 0.5f64..0.999) {
        let (lo, hi) = percentile_ranks(b, level).unwrap();
        prop_assert!(1 <= lo && lo <= hi && hi <= b);
        let beta = 1.0 - level;
        let bf = b as f64;
        if (beta * bf / 2.0).round() >= 1.0 {
            prop_assert_eq!(lo, (beta * bf / 2.0).round() as usize);
        }
        prop_assert_eq!(hi, (((1.0 - beta / 2.0) * bf).round() as usize).max(lo));
    }

    #[test]
    fn percentile_interval_picks_ranked_values(values in prop::collection::vec(-1e3f64..1e3, 1..400), level in 0.5f64..0.99) {
        let d = BootstrapDistribution::new(values.clone()).unwrap();
        let mut sorted = values;
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(d.values(), &sorted[..]);
        let (lo, hi) = percentile_ranks(sorted.len(), level).unwrap();
        let iv = d.percentile_interval(level).unwrap();
        prop_assert_eq!((iv.lower, iv.upper), (sorted[lo - 1], sorted[hi - 1]));
    }

    #[test]
    fn generator_conserves_units(
        sch in scheme(),
        kappa in 0.2f64..5.0,
        tau in 0.01f64..3.0,
        n in 0u64..500,
        rounding in prop_oneof![
            Just(WithdrawalRounding::Floor),
            Just(WithdrawalRounding::Round),
            Just(WithdrawalRounding::Stochastic),
        ],
        seed in any::<u64>(),
    ) {
        let p = WeibullParams::new(kappa, tau).unwrap();
        let s = generate_sample_with(&p, &sch, n, rounding, &mut stream_rng(seed, 1));
        let total: u64 = s.failures().iter().chain(s.withdrawals()).sum();
        prop_assert_eq!(total, n);
        prop_assert_eq!(s.n(), n);
        prop_assert_eq!(s.boundaries(), sch.boundaries());
        let at_risk = s.at_risk();
        for i in 0..s.len() {
            prop_assert!(s.failures()[i] + s.withdrawals()[i] <= at_risk[i]);
        }
        let m = s.len() - 1;
        prop_assert_eq!(s.failures()[m] + s.withdrawals()[m], at_risk[m]);
        if rounding == WithdrawalRounding::Floor {
            for i in 0..m {
                let survivors = (at_risk[i] - s.failures()[i]) as f64;
                prop_assert_eq!(s.withdrawals()[i], (sch.proportions()[i] * survivors + 1e-9).floor() as u64);
            }
        }
    }
}
