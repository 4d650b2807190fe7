//! One-dimensional convex minimization.
//!
//! Golden-section search on a bracket grown by doubling, plus a bisection on
//! one-sided derivatives for when those are known in closed form.

/// `(√5 − 1)/2`, the fraction of the interval kept at each golden step.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Doubling rounds before bracket growth gives up. 2⁶⁰ times the initial
/// half-width is far beyond anything a finite convex function needs.
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Grows `[center − h, center + h]`, doubling `h`, until both endpoint values
/// are at least the center value. For a convex function the global minimum
/// then lies inside the returned interval.
pub fn grow_bracket<F: FnMut(f64) -> f64>(f: &mut F, center: f64, half_width: f64) -> (f64, f64, usize) {
    let f0 = f(center);
    let mut h = half_width.abs().max(f64::EPSILON);
    let mut evals = 1;
    for _ in 0..MAX_DOUBLINGS {
        let lo = f(center - h);
        let hi = f(center + h);
        evals += 2;
        if lo >= f0 && hi >= f0 {
            break;
        }
        h *= 2.0;
    }
    (center - h, center + h, evals)
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`,
/// stopping once the interval is narrower than `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> Minimum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while (b - a).abs() > tol && evals < 400 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
        evals += 1;
    }
    Minimum { arg: best.0, value: best.1, evaluations: evals }
}

/// Minimizes a convex `f` over ℝ: grows a bracket around `center`, then runs
/// golden-section search to width `tol`. The center itself is a candidate, so
/// the returned value never exceeds `f(center)`.
pub fn minimize_convex<F: FnMut(f64) -> f64>(mut f: F, center: f64, half_width: f64, tol: f64) -> Minimum {
    let (lo, hi, grow_evals) = grow_bracket(&mut f, center, half_width);
    let mut m = golden_section(&mut f, lo, hi, tol);
    let f0 = f(center);
    m.evaluations += grow_evals + 1;
    if f0 <= m.value {
        m.arg = center;
        m.value = f0;
    }
    m
}

/// Maximizes a unimodal `f` on `[a, b]` by golden-section search.
pub fn maximize_on<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Minimum {
    let m = golden_section(&mut |t| -f(t), a, b, tol);
    Minimum { value: -m.value, ..m }
}

/// Finds a minimizer of a convex function from its one-sided derivatives.
///
/// `derivs(t)` returns `(f′₋(t), f′₊(t))`. The minimizers are the points with
/// `f′₋ ≤ 0 ≤ f′₊`; since `f′₊` is nondecreasing, bisection on its sign
/// converges to one of them. `[lo, hi]` must contain a minimizer.
pub fn bisect_subgradient<D: FnMut(f64) -> (f64, f64)>(mut derivs: D, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let (dm, dp) = derivs(mid);
        if dp < 0.0 {
            lo = mid;
        } else if dm > 0.0 {
            hi = mid;
        } else {
            return mid;
        }
    }
    0.5 * (lo + hi)
}
