//! Shared simplex-optimization machinery: projection, projected gradient
//! ascent with backtracking, and a softmin smoothing for max-min objectives.

/// Euclidean projection onto the standard simplex (sort-and-threshold).
pub(crate) fn project_to_simplex(x: &mut [f64]) {
    let n = x.len();
    if n == 0 {
        return;
    }
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cssv = 0.0;
    let mut rho = 0usize;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cssv += ui;
        let t = (cssv - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            rho = i + 1;
            theta = t;
        }
    }
    if rho == 0 {
        // All mass on the largest coordinate.
        let (idx, _) = x
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .unwrap();
        for v in x.iter_mut() {
            *v = 0.0;
        }
        x[idx] = 1.0;
        return;
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Projection onto a face of the simplex: coordinates outside `mask` are
/// pinned to zero, the rest are projected onto the simplex.
pub(crate) fn project_to_face(x: &mut [f64], mask: &[bool]) {
    let mut active: Vec<f64> = Vec::with_capacity(x.len());
    for (i, v) in x.iter().enumerate() {
        if mask[i] {
            active.push(*v);
        }
    }
    project_to_simplex(&mut active);
    let mut it = active.into_iter();
    for (i, v) in x.iter_mut().enumerate() {
        *v = if mask[i] { it.next().unwrap() } else { 0.0 };
    }
}

pub(crate) struct AscentOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-10, max_iters: 1000 }
    }
}

pub(crate) struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Projected gradient ascent on a simplex face with backtracking line
/// search. Converges when the norm of the simplex-projected gradient step
/// drops below `grad_tol`.
pub(crate) fn ascend<F, G>(obj: F, grad: G, start: &[f64], mask: &[bool], opts: &AscentOptions) -> AscentResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut x = start.to_vec();
    project_to_face(&mut x, mask);
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    for _ in 0..opts.max_iters {
        iterations += 1;
        grad(&x, &mut g);
        // Projected-gradient residual at unit step.
        let mut probe = x.clone();
        for i in 0..n {
            probe[i] += g[i];
        }
        project_to_face(&mut probe, mask);
        let pg_norm: f64 = probe
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if pg_norm < opts.grad_tol {
            break;
        }
        let fx = obj(&x);
        let mut step = 1.0;
        let mut advanced = false;
        while step > 1e-18 {
            let mut y = x.clone();
            for i in 0..n {
                y[i] += step * g[i];
            }
            project_to_face(&mut y, mask);
            let fy = obj(&y);
            let dir: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
            if fy >= fx + 1e-4 * dir && fy > fx {
                x = y;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    let value = obj(&x);
    AscentResult { x, value, iterations }
}

/// Stable softmin of a component vector: `-tau * ln sum exp(-v_i / tau)`.
/// A smooth lower bound on the true minimum that converges to it as
/// `tau -> 0`.
pub(crate) fn softmin(values: &[f64], tau: f64) -> f64 {
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let z: f64 = values.iter().map(|v| (-(v - vmin) / tau).exp()).sum();
    vmin - tau * z.ln()
}

/// Softmax weights of the softmin (gradient coefficients per component).
pub(crate) fn softmin_weights(values: &[f64], tau: f64, out: &mut [f64]) {
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut z = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = (-(v - vmin) / tau).exp();
        out[i] = w;
        z += w;
    }
    for w in out.iter_mut() {
        *w /= z;
    }
}
