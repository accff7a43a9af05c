//! Derivative-free local minimization (Nelder–Mead with restarts).
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which keep the
//! simplex from degenerating in the 8–15 dimensional searches over SU(3) and
//! SU(4). After the simplex collapses the search is restarted around the best
//! vertex with a smaller step until a restart stops paying off.

use crate::scalar::{abs, real, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions<T> {
    pub initial_step: T,
    pub max_iterations: usize,
    /// Convergence once `f_worst - f_best` falls below this.
    pub f_tolerance: T,
    /// Number of simplex re-initializations after the first collapse.
    pub max_restarts: usize,
}

struct Coefficients<T> {
    reflect: T,
    expand: T,
    contract: T,
    shrink: T,
}

impl<T: Real> Coefficients<T> {
    fn adaptive(n: usize) -> Self {
        let n = n.max(1) as f64;
        Self {
            reflect: T::one(),
            expand: real(1.0 + 2.0 / n),
            contract: real(0.75 - 1.0 / (2.0 * n)),
            shrink: real(1.0 - 1.0 / n),
        }
    }
}

fn combine<T: Real>(a: &[T], b: &[T], wa: T, wb: T) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| wa * x + wb * y).collect()
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], opts: &NelderMeadOptions<T>) -> LocalMinimum<T>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    let coef = Coefficients::<T>::adaptive(n);
    let mut evaluations = 0usize;
    let mut iterations = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x, &mut evaluations);
    let mut step = opts.initial_step;

    for _round in 0..=opts.max_restarts {
        // Axis-aligned initial simplex around the incumbent.
        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut v = best_x.clone();
            v[i] += step;
            let fv = eval(&v, &mut evaluations);
            simplex.push((v, fv));
        }
        let round_start = best_f;

        while iterations < opts.max_iterations {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let f_best = simplex[0].1;
            let f_worst = simplex[n].1;
            if f_worst - f_best <= opts.f_tolerance {
                break;
            }
            iterations += 1;

            let inv_n = T::one() / real::<T>(n as f64);
            let mut centroid = vec![T::zero(); n];
            for (v, _) in &simplex[..n] {
                for (c, &x) in centroid.iter_mut().zip(v) {
                    *c += x * inv_n;
                }
            }
            let worst = simplex[n].0.clone();

            let xr = combine(&centroid, &worst, T::one() + coef.reflect, -coef.reflect);
            let fr = eval(&xr, &mut evaluations);
            if fr < f_best {
                let xe = combine(&centroid, &xr, T::one() - coef.expand, coef.expand);
                let fe = eval(&xe, &mut evaluations);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < f_worst {
                let xc = combine(&centroid, &xr, T::one() - coef.contract, coef.contract);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            } else {
                let xc = combine(&centroid, &worst, T::one() - coef.contract, coef.contract);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let v = combine(&anchor, &entry.0, T::one() - coef.shrink, coef.shrink);
                let fv = eval(&v, &mut evaluations);
                *entry = (v, fv);
            }
        }

        let (x, fx) = simplex
            .into_iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty simplex");
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
        if iterations >= opts.max_iterations || abs(round_start - best_f) <= opts.f_tolerance {
            break;
        }
        step *= real(0.5);
    }

    LocalMinimum {
        x: best_x,
        value: best_f,
        evaluations,
        iterations,
    }
}
