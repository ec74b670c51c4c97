//! Derivative-free Nelder–Mead simplex minimizer.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions<T> {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: T,
    /// Stop once every vertex lies within this (max-norm) distance of the best.
    pub xtol: T,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions<f64> {
    fn default() -> Self {
        Self { initial_step: 0.25, xtol: 1e-12, max_evals: 40_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub fx: T,
    pub evals: usize,
    /// Simplex diameter reached `xtol` before the evaluation budget ran out.
    pub converged: bool,
}

struct Vertex<T> {
    x: Vec<T>,
    fx: T,
}

/// Minimize `f` starting from `x0` with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
pub fn minimize<T: Real>(mut f: impl FnMut(&[T]) -> T, x0: &[T], opts: &NelderMeadOptions<T>) -> Minimum<T> {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    if n == 0 {
        let fx = eval(x0, &mut evals);
        return Minimum { x: Vec::new(), fx, evals, converged: true };
    }

    let mut simplex: Vec<Vertex<T>> = Vec::with_capacity(n + 1);
    simplex.push(Vertex { x: x0.to_vec(), fx: eval(x0, &mut evals) });
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] = x[i] + opts.initial_step;
        let fx = eval(&x, &mut evals);
        simplex.push(Vertex { x, fx });
    }

    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let affine = |c: &[T], w: &[T], t: T| -> Vec<T> { c.iter().zip(w).map(|(&ci, &wi)| ci + t * (wi - ci)).collect() };
    let mut converged = false;

    loop {
        simplex.sort_by(|a, b| a.fx.partial_cmp(&b.fx).unwrap_or(std::cmp::Ordering::Equal));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.x.iter().zip(&simplex[0].x).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), T::max);
        if diameter <= opts.xtol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let nf = T::lit(n as f64);
        let centroid: Vec<T> = (0..n).map(|k| simplex[..n].iter().map(|v| v.x[k]).sum::<T>() / nf).collect();
        let worst = &simplex[n];

        // x_r = c + (c − x_w)
        let xr = affine(&centroid, &worst.x, -T::one());
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].fx {
            let xe = affine(&centroid, &worst.x, -two);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { Vertex { x: xe, fx: fe } } else { Vertex { x: xr, fx: fr } };
            continue;
        }
        if fr < simplex[n - 1].fx {
            simplex[n] = Vertex { x: xr, fx: fr };
            continue;
        }
        let (xc, fc) = if fr < worst.fx {
            let xc = affine(&centroid, &worst.x, -half);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = affine(&centroid, &worst.x, half);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(worst.fx) {
            simplex[n] = Vertex { x: xc, fx: fc };
            continue;
        }
        let best = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            v.x = affine(&best, &v.x, half);
            v.fx = eval(&v.x, &mut evals);
        }
    }

    let best = simplex.swap_remove(0);
    Minimum { x: best.x, fx: best.fx, evals, converged }
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<T: Real>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, xtol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}
