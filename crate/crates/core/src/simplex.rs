//! Derivative-free Nelder–Mead minimization.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which reduce to
//! the classical (1, 2, ½, ½) in two dimensions.

#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    /// Stop once `max f - min f` over the simplex is at most this.
    pub ftol: f64,
    /// ... and the simplex diameter (max-norm from the best vertex) is at most this.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions { ftol: 1e-12, xtol: 1e-9, max_iter: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with initial axis steps `step`.
///
/// Non-finite objective values are treated as `+∞`, so infeasible regions
/// can be expressed by returning `f64::INFINITY`.
pub fn minimize<F>(mut f: F, x0: &[f64], step: &[f64], opts: &NmOptions) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(step.len(), n, "step length must match dimension");
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let fx = eval(x0);
        return NmResult { x: Vec::new(), fx, iterations: 0, converged: true };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n <= 2 {
        (1.0, 2.0, 0.5, 0.5)
    } else {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread <= opts.ftol || (values[best].is_infinite() && values[worst] == values[best]))
            && diameter <= opts.xtol
        {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < values[best] {
            let xe = along(alpha * beta);
            let fe = eval(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        // shrink towards the best vertex
        let xb = simplex[best].clone();
        for &i in &order[1..] {
            for (x, b) in simplex[i].iter_mut().zip(&xb) {
                *x = b + delta * (*x - b);
            }
            values[i] = eval(&simplex[i]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    NmResult { x: simplex[best].clone(), fx: values[best], iterations, converged }
}
