//! Derivative-free maximization: coordinate-cycling golden-section line
//! searches with Powell direction updates, restricted to a box.

/// Per-parameter search interval.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }
}

/// Result of a tuning run: best point, its objective value, and the
/// best-seen value after each sweep.
#[derive(Debug, Clone)]
pub struct TuneResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub sweep_values: Vec<f64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const LINE_ITERS: usize = 64;

// largest step range keeping point + t*dir inside the box
fn step_range(point: &[f64], dir: &[f64], bounds: &[Bounds]) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for ((&x, &d), b) in point.iter().zip(dir).zip(bounds) {
        if d.abs() < 1e-300 {
            continue;
        }
        let (a, z) = ((b.lo - x) / d, (b.hi - x) / d);
        let (a, z) = if a <= z { (a, z) } else { (z, a) };
        lo = lo.max(a);
        hi = hi.min(z);
    }
    if lo > hi || !lo.is_finite() || !hi.is_finite() {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

// golden-section maximization of f(point + t*dir) over t in [lo, hi];
// returns (best t, best value)
fn line_search<F>(f: &mut F, point: &[f64], dir: &[f64], lo: f64, hi: f64) -> (f64, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let eval = |f: &mut F, t: f64| {
        let x: Vec<f64> = point.iter().zip(dir).map(|(&p, &d)| p + t * d).collect();
        f(&x)
    };
    let mut best_t = 0.0;
    let mut best_v = eval(f, 0.0);
    // coarse sampling fences off multimodal objectives before refinement
    let samples = 16;
    for i in 0..=samples {
        let t = lo + (hi - lo) * i as f64 / samples as f64;
        let v = eval(f, t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    let radius = (hi - lo) / samples as f64;
    let mut a = (best_t - radius).max(lo);
    let mut b = (best_t + radius).min(hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = eval(f, c);
    let mut fd = eval(f, d);
    for _ in 0..LINE_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(f, d);
        }
        let (t, v) = if fc >= fd { (c, fc) } else { (d, fd) };
        if v > best_v {
            best_v = v;
            best_t = t;
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    (best_t, best_v)
}

/// Maximizes `objective` from `init` inside `bounds`. Runs at most
/// `max_sweeps` cycles of line searches with Powell's direction-replacement
/// rule. The returned point never scores worse than `init`.
pub fn powell_tune<F>(
    mut objective: F,
    init: &[f64],
    bounds: &[Bounds],
    max_sweeps: usize,
) -> TuneResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = init.len();
    assert_eq!(bounds.len(), dim, "one bound per parameter");
    let clamp = |x: &mut Vec<f64>| {
        for (v, b) in x.iter_mut().zip(bounds) {
            *v = v.clamp(b.lo, b.hi);
        }
    };
    let mut point: Vec<f64> = init.to_vec();
    clamp(&mut point);
    let mut best = point.clone();
    let mut best_value = objective(&point);
    let mut sweep_values = Vec::new();

    let mut dirs: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..max_sweeps {
        let sweep_start = point.clone();
        let mut largest_gain = 0.0;
        let mut largest_idx = 0usize;
        let mut current = best_value;
        for (i, dir) in dirs.iter().enumerate() {
            let (lo, hi) = step_range(&point, dir, bounds);
            if lo == 0.0 && hi == 0.0 {
                continue;
            }
            let (t, v) = line_search(&mut objective, &point, dir, lo, hi);
            if v > current {
                let gain = v - current;
                if gain > largest_gain {
                    largest_gain = gain;
                    largest_idx = i;
                }
                for (p, &d) in point.iter_mut().zip(dir) {
                    *p += t * d;
                }
                clamp(&mut point);
                current = v;
            }
        }
        if current > best_value {
            best_value = current;
            best = point.clone();
        }
        // Powell update: search along the net sweep displacement and let it
        // replace the direction of largest single gain
        let net: Vec<f64> = point
            .iter()
            .zip(&sweep_start)
            .map(|(&a, &b)| a - b)
            .collect();
        if net.iter().any(|&d| d.abs() > 1e-12) {
            let (lo, hi) = step_range(&point, &net, bounds);
            if lo != 0.0 || hi != 0.0 {
                let (t, v) = line_search(&mut objective, &point, &net, lo, hi);
                if v > best_value {
                    for (p, &d) in point.iter_mut().zip(&net) {
                        *p += t * d;
                    }
                    clamp(&mut point);
                    best_value = v;
                    best = point.clone();
                }
            }
            dirs[largest_idx] = net;
        }
        sweep_values.push(best_value);
        if largest_gain < 1e-12 {
            break; // converged
        }
    }
    TuneResult {
        best,
        best_value,
        sweep_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_separable_quadratic_optimum() {
        let target = [2.0, 7.5, 0.25];
        let bounds = vec![Bounds::new(0.0, 10.0); 3];
        let res = powell_tune(
            |x| -x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
            &[5.0, 5.0, 5.0],
            &bounds,
            5,
        );
        for (got, want) in res.best.iter().zip(&target) {
            assert!((got - want).abs() < 1e-3, "got {:?}", res.best);
        }
    }

    #[test]
    fn one_dimensional_bracketing() {
        let bounds = vec![Bounds::new(0.0, 10.0)];
        let res = powell_tune(|x| -(x[0] - 2.5) * (x[0] - 2.5), &[9.0], &bounds, 3);
        assert!((res.best[0] - 2.5).abs() < 1e-3);
    }

    #[test]
    fn constant_objective_returns_init() {
        let bounds = vec![Bounds::new(0.0, 10.0); 2];
        let res = powell_tune(|_| 42.0, &[3.0, 4.0], &bounds, 4);
        assert_eq!(res.best, vec![3.0, 4.0]);
        assert_eq!(res.best_value, 42.0);
    }

    #[test]
    fn zero_sweeps_returns_init() {
        let bounds = vec![Bounds::new(0.0, 10.0)];
        let res = powell_tune(|x| x[0], &[1.0], &bounds, 0);
        assert_eq!(res.best, vec![1.0]);
    }

    #[test]
    fn never_worse_than_init_and_monotone_across_sweeps() {
        // nasty multimodal objective
        let bounds = vec![Bounds::new(0.0, 10.0); 2];
        let init = [1.0, 9.0];
        let f = |x: &[f64]| (3.0 * x[0]).sin() + (2.0 * x[1]).cos() - 0.05 * x[0];
        let init_val = f(&init);
        let res = powell_tune(f, &init, &bounds, 6);
        assert!(res.best_value >= init_val - 1e-12);
        for pair in res.sweep_values.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
    }

    #[test]
    fn respects_bounds() {
        let bounds = vec![Bounds::new(0.0, 1.0)];
        let res = powell_tune(|x| x[0], &[0.5], &bounds, 4);
        assert!(res.best[0] <= 1.0 + 1e-12);
        assert!((res.best[0] - 1.0).abs() < 1e-6);
    }
}
