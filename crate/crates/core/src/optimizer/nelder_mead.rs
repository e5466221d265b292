//! Derivative-free simplex search (reflect, expand, contract, shrink).
//!
//! Minimizes `f`; `+∞` is an ordinary "worst" value, and NaN must be mapped
//! to `+∞` by the caller.

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn affine(c: &[f64], x: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(x).map(|(ci, xi)| ci + t * (xi - ci)).collect()
}

/// Runs until the simplex diameter drops below `tol * (1 + |x_best|_∞)` or
/// `max_iters` iterations elapse.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iters: usize,
) -> Outcome {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let scale = 1.0 + simplex[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if diameter(&simplex) <= tol * scale {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let f_best = values[0];
        let f_second = values[n - 1];
        let f_worst = values[n];

        let xr = affine(&centroid, &worst, -REFLECT);
        let fr = f(&xr);
        evaluations += 1;
        if fr < f_best {
            let xe = affine(&centroid, &worst, -EXPAND);
            let fe = f(&xe);
            evaluations += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < f_second {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = affine(&centroid, &xr, CONTRACT);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = affine(&centroid, &worst, CONTRACT);
            let fc = f(&xc);
            (xc, fc)
        };
        evaluations += 1;
        if fc < fr.min(f_worst) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = affine(&best, &simplex[i], SHRINK);
            values[i] = f(&simplex[i]);
        }
        evaluations += n;
    }

    let i = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Outcome {
        x: simplex[i].clone(),
        fx: values[i],
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let mut f =
            |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5 * x[0] * x[1];
        let out = minimize(&mut f, &[0.0, 0.0], 0.5, 1e-10, 5000);
        assert!(out.converged);
        // gradient zero: 2(x-1) + 0.5y = 0, 6(y+2) + 0.5x = 0
        let det = 2.0 * 6.0 - 0.25;
        let x = (2.0 * 6.0 + 0.5 * 12.0) / det;
        let y = (-12.0 * 2.0 - 0.5 * 2.0) / det;
        assert!(
            (out.x[0] - x).abs() < 1e-7 && (out.x[1] - y).abs() < 1e-7,
            "{:?}",
            out.x
        );
    }

    #[test]
    fn handles_infinite_regions() {
        let mut f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.3).abs()
            }
        };
        let out = minimize(&mut f, &[2.0], 0.5, 1e-12, 2000);
        assert!((out.x[0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional_kink() {
        let mut f = |x: &[f64]| -0.5 * x[0] + 1e6 * (x[0] - 0.5).max(0.0).powi(2);
        let out = minimize(&mut f, &[0.0], 0.1, 1e-12, 2000);
        assert!((out.x[0] - 0.5).abs() < 1e-6);
    }
}
