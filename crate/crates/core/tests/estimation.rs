use proptest::prelude::*;

use weibcv_core::bayes::{random_walk_metropolis, McmcConfig, Proposal};
use weibcv_core::censoring::{f_hat_moments, generate_sample, midpoint_initial_estimates};
use weibcv_core::least_squares::{llse, nllse, nllse_objective, NllseVariant};
use weibcv_core::mle::{fit_alternative_mle, fit_mle, newton_raphson, AlternativeMleOptions, FitResult, NewtonOptions};
use weibcv_core::rng::stream_rng;
use weibcv_core::{CensoredSample, CensoringScheme, WeibullParams};

fn boundaries(gaps: &[f64]) -> Vec<f64> {
    gaps.iter()
        .scan(0.0, |t, g| {
            *t += g;
            Some(*t)
        })
        .collect()
}

/// Simulated samples with several inspections and a fair number of units.
fn simulated() -> impl Strategy<Value = CensoredSample> {
    (
        (3usize..=8).prop_flat_map(|m| (prop::collection::vec(0.2f64..1.5, m), prop::collection::vec(0.0f64..0.4, m))),
        0.5f64..3.0,
        0.2f64..2.0,
        60u64..400,
        any::<u64>(),
    )
        .prop_map(|((g, mut p), kappa, c, n, seed)| {
            *p.last_mut().unwrap() = 1.0;
            let b = boundaries(&g);
            let t_m = *b.last().unwrap();
            let scheme = CensoringScheme::new(b, p).unwrap();
            let truth = WeibullParams::new(kappa, c / t_m.powf(kappa)).unwrap();
            generate_sample(&truth, &scheme, n, &mut stream_rng(seed, 0))
        })
        .prop_filter("degenerate", |s| !s.terminates_early() && s.failures().iter().filter(|&&x| x > 0).count() >= 2)
}

fn rescaled(s: &CensoredSample, c: f64) -> CensoredSample {
    let b = s.boundaries().iter().map(|t| t * c).collect();
    CensoredSample::new(b, s.failures().to_vec(), s.withdrawals().to_vec(), s.n()).unwrap()
}

fn newton(s: &CensoredSample) -> weibcv_core::Result<FitResult> {
    let fit = newton_raphson(s, &midpoint_initial_estimates(s)?, &NewtonOptions::default());
    if fit.converged {
        Ok(fit)
    } else {
        Err(weibcv_core::Error::Domain("no convergence".into()))
    }
}

fn alternative(s: &CensoredSample) -> weibcv_core::Result<FitResult> {
    fit_alternative_mle(s, &AlternativeMleOptions::default())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn estimators_are_scale_equivariant(s in simulated(), c in 0.05f64..20.0) {
        let r = rescaled(&s, c);
        for (name, (a, b, rel)) in ["newton", "mle", "alternative", "llse", "nllse"].into_iter().zip([
            (newton(&s), newton(&r), 1e-7),
            (fit_mle(&s), fit_mle(&r), 1e-6),
            (alternative(&s), alternative(&r), 1e-5),
            (llse(&s), llse(&r), 1e-9),
            (nllse(&s, NllseVariant::Weighted2_17), nllse(&r, NllseVariant::Weighted2_17), 1e-4),
        ]) {
            let (Ok(a), Ok(b)) = (a, b) else { continue };
            if !(a.converged && b.converged) {
                continue;
            }
            prop_assert!(close(a.params.kappa(), b.params.kappa(), rel), "{name}: {:?} vs {:?}", a.params, b.params);
            let expected = a.params.tau() * c.powf(-a.params.kappa());
            prop_assert!(close(b.params.tau(), expected, 10.0 * rel), "{name}: {} vs {expected}", b.params.tau());
            prop_assert!(close(a.cv_p, b.cv_p, 3.0 * rel), "{} vs {} from {:?} vs {:?}", a.cv_p, b.cv_p, a.params, b.params);
        }
    }

    #[test]
    fn newton_agrees_with_alternative_mle(s in simulated()) {
        let Ok(newton) = newton(&s) else { return Ok(()) };
        prop_assume!(newton.params.kappa() < 20.0);
        let alt = fit_alternative_mle(&s, &AlternativeMleOptions::default()).unwrap();
        prop_assume!(alt.converged);
        prop_assert!(close(newton.params.kappa(), alt.params.kappa(), 1e-4), "{:?} vs {:?}", newton.params, alt.params);
        prop_assert!(close(newton.params.tau(), alt.params.tau(), 1e-3), "{:?} vs {:?}", newton.params, alt.params);
        prop_assert!(newton.loglik >= alt.loglik - 1e-7 * alt.loglik.abs());
    }

    #[test]
    fn llse_solves_normal_equations(s in simulated()) {
        let fit = llse(&s).unwrap();
        let f = f_hat_moments(&s);
        let (mut sum_r, mut sum_rx, mut scale) = (0.0, 0.0, 0.0);
        for (t, fi) in s.boundaries().iter().zip(&f) {
            let x = t.ln();
            let y = (-(-fi).ln_1p()).ln();
            let r = y - fit.params.tau().ln() - fit.params.kappa() * x;
            sum_r += r;
            sum_rx += r * x;
            scale += y.abs() * (1.0 + x.abs());
        }
        prop_assert!(sum_r.abs() <= 1e-10 * (1.0 + scale));
        prop_assert!(sum_rx.abs() <= 1e-10 * (1.0 + scale));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn nllse_beats_nearby_points(s in simulated(), seed in any::<u64>()) {
        use rand::Rng;
        let f = f_hat_moments(&s);
        let fit = nllse(&s, NllseVariant::Weighted2_17).unwrap();
        let best = nllse_objective(&fit.params, &s, &f, NllseVariant::Weighted2_17);
        let mut rng = stream_rng(seed, 9);
        for _ in 0..100 {
            let k = fit.params.kappa() * rng.random_range(-0.5f64..0.5).exp();
            let t = fit.params.tau() * rng.random_range(-0.5f64..0.5).exp();
            let Ok(p) = WeibullParams::new(k, t) else { continue };
            let other = nllse_objective(&p, &s, &f, NllseVariant::Weighted2_17);
            prop_assert!(best <= other + 1e-9 * (1.0 + other), "{best} > {other} at {p:?}");
        }
    }

    // The unweighted form is not a sum of squares and can be unbounded
    // below, so only local optimality is checked.
    #[test]
    fn unweighted_variant_is_a_local_minimum(s in simulated(), seed in any::<u64>()) {
        use rand::Rng;
        let f = f_hat_moments(&s);
        let Ok(fit) = nllse(&s, NllseVariant::Paper2_18) else { return Ok(()) };
        let best = nllse_objective(&fit.params, &s, &f, NllseVariant::Paper2_18);
        let mut rng = stream_rng(seed, 10);
        for _ in 0..100 {
            let k = fit.params.kappa() * rng.random_range(-1e-3f64..1e-3).exp();
            let t = fit.params.tau() * rng.random_range(-1e-3f64..1e-3).exp();
            let other = nllse_objective(&WeibullParams::new(k, t).unwrap(), &s, &f, NllseVariant::Paper2_18);
            prop_assert!(best <= other + 1e-9 * (1.0 + other.abs()), "{best} > {other}");
        }
    }
}

#[test]
fn metropolis_occupies_two_regions_in_proportion() {
    // Uniform density on [0,1)x[0,1) with weight 1 and on [1,2)x[0,1) with weight 3.
    let target = |x: [f64; 2]| {
        if !(0.0..1.0).contains(&x[1]) {
            f64::NEG_INFINITY
        } else if (0.0..1.0).contains(&x[0]) {
            0.0
        } else if (1.0..2.0).contains(&x[0]) {
            3f64.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let proposal = Proposal::diagonal(0.25, 0.25).unwrap();
    let config = McmcConfig::new(1_000_000, 0, 1).unwrap();
    let walk = random_walk_metropolis(target, [0.5, 0.5], &proposal, &config, &mut stream_rng(11, 0)).unwrap();
    assert_eq!(walk.states.len(), 1_000_000);
    let right = walk.states.iter().filter(|s| s[0] >= 1.0).count() as f64 / 1e6;
    assert!((right - 0.75).abs() < 0.02, "share in heavier region {right}");
    let mean_y = walk.states.iter().map(|s| s[1]).sum::<f64>() / 1e6;
    assert!((mean_y - 0.5).abs() < 0.02, "mean y {mean_y}");
}

#[test]
fn metropolis_matches_gaussian_moments() {
    let target = |x: [f64; 2]| -0.5 * (x[0] * x[0] + (x[1] - 1.0).powi(2) / 4.0);
    let proposal = Proposal::diagonal(2.0, 6.0).unwrap();
    let config = McmcConfig::new(400_000, 1000, 2).unwrap();
    let walk = random_walk_metropolis(target, [0.0, 0.0], &proposal, &config, &mut stream_rng(12, 0)).unwrap();
    let n = walk.states.len() as f64;
    let mean = [0, 1].map(|i| walk.states.iter().map(|s| s[i]).sum::<f64>() / n);
    let var = [0, 1].map(|i| walk.states.iter().map(|s| (s[i] - mean[i]).powi(2)).sum::<f64>() / n);
    assert!(mean[0].abs() < 0.03 && (mean[1] - 1.0).abs() < 0.06, "{mean:?}");
    assert!((var[0] - 1.0).abs() < 0.05 && (var[1] - 4.0).abs() < 0.2, "{var:?}");
}
