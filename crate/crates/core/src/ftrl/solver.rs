use super::{RegularizerSpec, RegularizerTerm, SimplexPoint};
use crate::error::{Error, Result};

/// Coordinates are kept inside `[COORD_EPS, 1 - COORD_EPS]`.
pub const COORD_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Accepted `|sum(x) - 1|` at termination.
    pub sum_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            sum_tol: 1e-10,
        }
    }
}

fn check_finite(losses: &[f64]) -> Result<()> {
    match losses.iter().position(|l| !l.is_finite()) {
        Some(i) => Err(Error::NonFinite(i + 1)),
        None => Ok(()),
    }
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Exponential weights: the minimizer of `<L, p> - beta H(p)`.
pub fn solve_shannon(losses: &[f64], beta: f64) -> Result<SimplexPoint> {
    check_finite(losses)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::BadParameter(format!("beta must be positive, got {beta}")));
    }
    let shift = min_of(losses);
    let weights: Vec<f64> = losses.iter().map(|l| (-(l - shift) / beta).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(SimplexPoint(weights.into_iter().map(|w| w / total).collect()))
}

pub fn solve_separable(losses: &[f64], spec: &RegularizerSpec) -> Result<SimplexPoint> {
    solve_separable_with(losses, spec, SolverOptions::default())
}

/// Minimizes `sum_i L_i p_i + f_i(p_i)` over the simplex.
///
/// Stationarity reads `f_i'(x_i) + L_i + lambda = 0`. Each `x_i(lambda)` is
/// strictly decreasing, so the multiplier solving `sum x_i(lambda) = 1` is
/// found by a bracketed Newton iteration that falls back to bisection.
pub fn solve_separable_with(
    losses: &[f64],
    spec: &RegularizerSpec,
    opts: SolverOptions,
) -> Result<SimplexPoint> {
    if losses.len() != spec.len() {
        return Err(Error::BadParameter(format!(
            "{} losses for {} regularizer terms",
            losses.len(),
            spec.len()
        )));
    }
    check_finite(losses)?;
    let k = losses.len();
    let shift = min_of(losses);
    let shifted: Vec<f64> = losses.iter().map(|l| l - shift).collect();
    let terms = spec.terms();

    // At lambda_i = -f_i'(1/K) - L_i coordinate i sits at 1/K, so the sum is
    // >= 1 at the smallest such lambda and <= 1 at the largest.
    let uniform = 1.0 / k as f64;
    let anchors = terms
        .iter()
        .zip(&shifted)
        .map(|(t, l)| -t.grad(uniform) - l);
    let (mut lo, mut hi) = anchors.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
        (lo.min(a), hi.max(a))
    });

    let mut x = vec![0.0; k];
    let eval = |lambda: f64, x: &mut [f64]| -> (f64, f64) {
        let mut sum = 0.0;
        let mut slope = 0.0;
        for ((xi, t), l) in x.iter_mut().zip(terms).zip(&shifted) {
            *xi = invert(t, l + lambda);
            sum += *xi;
            slope -= 1.0 / t.hess(*xi);
        }
        (sum - 1.0, slope)
    };

    if hi - lo <= 0.0 {
        eval(lo, &mut x);
        return Ok(SimplexPoint(x));
    }

    let tight = 4.0 * f64::EPSILON * k as f64;
    let mut lambda = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let (g, slope) = eval(lambda, &mut x);
        residual = g.abs();
        if residual <= tight {
            return Ok(SimplexPoint(x));
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= f64::EPSILON * lambda.abs().max(1.0) {
            break;
        }
        let newton = lambda - g / slope;
        lambda = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if residual <= opts.sum_tol {
        Ok(SimplexPoint(x))
    } else {
        Err(Error::NoConvergence {
            iterations: opts.max_iter,
            lo,
            hi,
            residual,
        })
    }
}

/// Solves `f'(x) = -s` for `x` in `[COORD_EPS, 1 - COORD_EPS]`.
fn invert(term: &RegularizerTerm, s: f64) -> f64 {
    let x = match *term {
        RegularizerTerm::ShannonFull(b) => (-s / b - 1.0).exp(),
        RegularizerTerm::ShannonPair(b) => logistic(-s / b),
        RegularizerTerm::RootPair(w) => invert_root_pair(-s / w),
    };
    x.clamp(COORD_EPS, 1.0 - COORD_EPS)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Solves `(1 - x)^{-1/2} - x^{-1/2} = u`.
///
/// For `u > 0` the root lies in `(1/2, 1)`; with `r = (1 - x)^{-1/2}` the
/// equation becomes `F(r) = r - r / sqrt(r^2 - 1) = u`, increasing and
/// concave on `r >= sqrt(2)` with the root inside `[max(sqrt 2, u), u + sqrt 2]`.
/// Negative `u` follows from the symmetry `x -> 1 - x`.
fn invert_root_pair(u: f64) -> f64 {
    if u == 0.0 {
        return 0.5;
    }
    let target = u.abs();
    let mut lo = std::f64::consts::SQRT_2.max(target);
    let mut hi = target + std::f64::consts::SQRT_2;
    let f = |r: f64| r - r / (r * r - 1.0).sqrt() - target;
    let mut r = hi;
    for _ in 0..100 {
        let fr = f(r);
        if fr == 0.0 {
            break;
        }
        if fr > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let slope = 1.0 + (r * r - 1.0).powf(-1.5);
        let mut next = r - fr / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 2.0 * f64::EPSILON * r {
            r = next;
            break;
        }
        r = next;
    }
    let tail = 1.0 / (r * r);
    if u > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Stationarity residual of the clamped problem solved by
/// [`solve_separable`]. With `r_i = f_i'(q_i) + L_i` and `lambda` the mean of
/// `-r_i` over coordinates strictly inside the clamp box, free coordinates
/// contribute `|r_i + lambda|`, coordinates at the lower clamp
/// `max(0, -(r_i + lambda))` and coordinates at the upper clamp
/// `max(0, r_i + lambda)`. Zero exactly at the constrained optimum.
pub fn kkt_residual(q: &SimplexPoint, losses: &[f64], spec: &RegularizerSpec) -> Result<f64> {
    if q.len() != losses.len() || q.len() != spec.len() {
        return Err(Error::BadParameter("dimension mismatch".into()));
    }
    if let Some(i) = q.as_slice().iter().position(|&x| x <= 0.0 || x >= 1.0) {
        return Err(Error::BoundaryPoint(i + 1));
    }
    let shift = min_of(losses);
    let r: Vec<f64> = spec
        .terms()
        .iter()
        .zip(q.as_slice())
        .zip(losses)
        .map(|((t, &x), l)| t.grad(x) + (l - shift))
        .collect();
    let at_lower = |x: f64| x <= COORD_EPS;
    let at_upper = |x: f64| x >= 1.0 - COORD_EPS;
    let free: Vec<f64> = r
        .iter()
        .zip(q.as_slice())
        .filter(|(_, &x)| !at_lower(x) && !at_upper(x))
        .map(|(ri, _)| *ri)
        .collect();
    if free.is_empty() {
        return Err(Error::BoundaryPoint(1));
    }
    let lambda = -free.iter().sum::<f64>() / free.len() as f64;
    Ok(r
        .iter()
        .zip(q.as_slice())
        .map(|(ri, &x)| {
            let s = ri + lambda;
            if at_lower(x) {
                (-s).max(0.0)
            } else if at_upper(x) {
                s.max(0.0)
            } else {
                s.abs()
            }
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shannon_full(k: usize, beta: f64) -> RegularizerSpec {
        RegularizerSpec::new(vec![RegularizerTerm::ShannonFull(beta); k]).unwrap()
    }

    #[test]
    fn shannon_uniform_on_zero_losses() {
        let q = solve_shannon(&[0.0, 0.0, 0.0], 5.0).unwrap();
        for i in 0..3 {
            assert!((q[i] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn shannon_two_to_one() {
        let beta = 3.7;
        let q = solve_shannon(&[0.0, beta * 2f64.ln()], beta).unwrap();
        assert!((q[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((q[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn shannon_rejects_bad_inputs() {
        assert_eq!(solve_shannon(&[0.0, f64::NAN], 1.0), Err(Error::NonFinite(2)));
        assert!(matches!(solve_shannon(&[0.0, 1.0], 0.0), Err(Error::BadParameter(_))));
    }

    #[test]
    fn shannon_survives_huge_losses() {
        let q = solve_shannon(&[1e6, 1e6 + 1.0, 2e6], 1.0).unwrap();
        assert!(q[0] > q[1] && q[2] == 0.0);
        assert!((q.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separable_full_shannon_matches_closed_form() {
        let losses = [3.1, 0.4, 7.9];
        let closed = solve_shannon(&losses, 1.7).unwrap();
        let dual = solve_separable(&losses, &shannon_full(3, 1.7)).unwrap();
        for i in 0..3 {
            assert!((closed[i] - dual[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_pair_uniform_on_zero_losses() {
        let spec = RegularizerSpec::new(vec![RegularizerTerm::ShannonPair(2.0); 4]).unwrap();
        let q = solve_separable(&[0.0; 4], &spec).unwrap();
        assert!(q.as_slice().iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn root_pair_inversion_round_trips() {
        let term = RegularizerTerm::RootPair(1.0);
        for u in [-1e4, -50.0, -1.0, -1e-6, 1e-9, 0.3, 2.0, 80.0, 1e5] {
            let x = invert_root_pair(u);
            let back = term.grad(x);
            // Near x = 1 the spacing of doubles limits how well 1 - x, and
            // hence f'(x), can be represented.
            let tol = 1e-9 * u.abs().max(1.0) + 0.5 * f64::EPSILON * (1.0 - x).powf(-1.5);
            assert!((back - u).abs() <= tol, "u = {u}: x = {x}, f'(x) = {back}");
        }
    }

    #[test]
    fn kkt_detects_non_optimal_points() {
        let losses = [0.0, 1.0, 2.0];
        let spec = shannon_full(3, 1.0);
        let uniform = SimplexPoint::uniform(3);
        assert!(kkt_residual(&uniform, &losses, &spec).unwrap() > 0.1);
        let q = solve_shannon(&losses, 1.0).unwrap();
        assert!(kkt_residual(&q, &losses, &spec).unwrap() < 1e-8);
    }

    #[test]
    fn kkt_rejects_boundary() {
        let p = SimplexPoint::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            kkt_residual(&p, &[0.0, 0.0], &shannon_full(2, 1.0)),
            Err(Error::BoundaryPoint(1))
        );
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let spec = RegularizerSpec::new(vec![
            RegularizerTerm::RootPair(1.0),
            RegularizerTerm::ShannonPair(1.0),
            RegularizerTerm::RootPair(3.0),
        ])
        .unwrap();
        let opts = SolverOptions {
            max_iter: 1,
            sum_tol: 1e-10,
        };
        assert!(matches!(
            solve_separable_with(&[0.0, 5.0, 1.0], &spec, opts),
            Err(Error::NoConvergence { iterations: 1, .. })
        ));
    }
}
