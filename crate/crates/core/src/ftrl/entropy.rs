use super::SimplexPoint;
use crate::numeric::xlogx;

/// `H(p) = sum p ln(1/p)` with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &SimplexPoint) -> f64 {
    -p.as_slice().iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// `h(x) = x ln x + (1 - x) ln(1 - x)`.
pub fn pair_entropy_term(x: f64) -> f64 {
    xlogx(x) + xlogx(1.0 - x)
}

/// `-sum_{i in coords} h(p_i)`.
pub fn pair_entropy_sum(p: &SimplexPoint, coords: &[usize]) -> f64 {
    -coords.iter().map(|&i| pair_entropy_term(p[i])).sum::<f64>()
}

/// `sum_{i in coords} p_i (1 - p_i)`.
pub fn pair_variance_sum(p: &SimplexPoint, coords: &[usize]) -> f64 {
    coords.iter().map(|&i| p[i] * (1.0 - p[i])).sum()
}

/// Upper bound `(1 - p_*) (ln((K - 1) / (1 - p_*)) + 1)` on `H(p)` in terms
/// of the mass outside a single arm; 0 when that mass is 0.
pub fn entropy_upper_bound(p: &SimplexPoint, i_star: usize) -> f64 {
    let rest = 1.0 - p[i_star];
    if rest <= 0.0 {
        return 0.0;
    }
    let k = p.len() as f64;
    rest * (((k - 1.0) / rest).ln() + 1.0)
}
