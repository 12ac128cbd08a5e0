//! Derivative-free optimisers shared by the estimators.

#[allow(unused_imports)] // unused when std is in the build graph
use num_traits::Float;

/// Outcome of a 1-D bounded maximisation.
#[derive(Debug, Clone, Copy)]
pub struct Maximum1d {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximise `f` on `[lo, hi]`.
///
/// A log-spaced scan brackets the best grid point, then Brent's
/// golden-section/parabolic search refines it to `tol` (relative to `x`).
/// Non-finite values are treated as `-inf`.
pub fn maximize_bounded<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum1d
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo > 0.0 && hi > lo);
    const GRID: usize = 48;
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let ratio = (hi / lo).ln() / (GRID - 1) as f64;
    let grid_x = |i: usize| {
        if i + 1 == GRID {
            hi
        } else {
            lo * (ratio * i as f64).exp()
        }
    };

    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..GRID {
        let v = eval(grid_x(i));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = grid_x(best_i.saturating_sub(1));
    let b = grid_x((best_i + 1).min(GRID - 1));
    let mut res = brent_max(&mut eval, a, b, grid_x(best_i), best_v, tol);
    res.evaluations += GRID;
    if res.value < best_v {
        res.x = grid_x(best_i);
        res.value = best_v;
    }
    res
}

/// Brent's method for a maximum inside `[a, b]`, started from `x0`.
fn brent_max<F>(f: &mut F, mut a: f64, mut b: f64, x0: f64, f0: f64, tol: f64) -> Maximum1d
where
    F: FnMut(f64) -> f64,
{
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    const MAX_ITER: usize = 200;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    // Work with -f so the textbook minimisation form applies.
    let (mut fx, mut fw, mut fv) = (-f0, -f0, -f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut evaluations = 0;

    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = -f(u);
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Maximum1d { x, value: -fx, evaluations }
}

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Stop once the simplex objective spread falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Initial simplex edge length.
    pub step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { f_tol: 1e-12, x_tol: 1e-8, max_iter: 5_000, step: 0.1 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum2d {
    pub x: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead simplex minimisation in two dimensions, with one restart
/// from the best vertex to guard against a collapsed simplex.
pub fn nelder_mead<F>(mut f: F, start: [f64; 2], opts: &NelderMeadOptions) -> Minimum2d
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut eval = |x: [f64; 2]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let first = nelder_mead_pass(&mut eval, start, opts);
    let second = nelder_mead_pass(&mut eval, first.x, opts);
    Minimum2d {
        iterations: first.iterations + second.iterations,
        converged: first.converged && second.converged,
        ..if second.value <= first.value { second } else { first }
    }
}

fn nelder_mead_pass<F>(f: &mut F, start: [f64; 2], opts: &NelderMeadOptions) -> Minimum2d
where
    F: FnMut([f64; 2]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let mut simplex = [start, [start[0] + opts.step, start[1]], [start[0], start[1] + opts.step]];
    let mut values = [f(simplex[0]), f(simplex[1]), f(simplex[2])];
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // order: best, middle, worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(core::cmp::Ordering::Equal));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        values = [values[idx[0]], values[idx[1]], values[idx[2]]];

        let spread = values[2] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -REFLECT);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -EXPAND);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (target, ft) = if fr < values[2] {
                (lerp(centroid, reflected, CONTRACT), fr)
            } else {
                (lerp(centroid, simplex[2], CONTRACT), values[2])
            };
            let fc = f(target);
            if fc < ft {
                simplex[2] = target;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], SHRINK);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best =
        (0..3).min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(core::cmp::Ordering::Equal)).unwrap_or(0);
    Minimum2d { x: simplex[best], value: values[best], iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_interior_maximum() {
        let m = maximize_bounded(|x| -(x - 3.7).powi(2), 0.05, 50.0, 1e-10);
        assert!((m.x - 3.7).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn brent_handles_boundary_maximum() {
        let m = maximize_bounded(|x| x, 0.05, 50.0, 1e-10);
        assert!((m.x - 50.0).abs() < 1e-6, "{m:?}");
        let m = maximize_bounded(|x| -x, 0.05, 50.0, 1e-10);
        assert!((m.x - 0.05).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn brent_skips_nan_regions() {
        let m = maximize_bounded(|x| if x < 1.0 { f64::NAN } else { -(x - 2.0).powi(2) }, 0.05, 50.0, 1e-10);
        assert!((m.x - 2.0).abs() < 1e-7);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let r = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            [-1.2, 1.0],
            &NelderMeadOptions { f_tol: 1e-20, x_tol: 1e-10, max_iter: 20_000, step: 0.5 },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{r:?}");
    }
}
