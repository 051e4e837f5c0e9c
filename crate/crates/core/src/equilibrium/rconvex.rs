use crate::cost::CostFunction;
use crate::error::{Error, Result};

/// 121 log-spaced points on `[1e-3, 1e3]` plus a few round values.
pub fn default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=120).map(|k| 10f64.powf(-3.0 + k as f64 * 0.05)).collect();
    g.extend([0.5, 1.0, 2.0, 5.0, 10.0]);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Whether `z'(t/r)/r <= r z'(r t)` at every grid point `t > 0`, with a
/// `1e-12` relative slack.
pub fn is_r_convex(cost: &CostFunction, r: f64, grid: &[f64]) -> Result<bool> {
    if !cost.is_differentiable() {
        return Err(Error::NonDifferentiableCost { edge: usize::MAX });
    }
    Ok(is_r_convex_by(|t| cost.derivative(t).unwrap_or(0.0), r, grid))
}

/// Same test for an arbitrary derivative.
pub fn is_r_convex_by(derivative: impl Fn(f64) -> f64, r: f64, grid: &[f64]) -> bool {
    grid.iter().filter(|&&t| t > 0.0).all(|&t| {
        let lhs = derivative(t / r) / r;
        let rhs = r * derivative(r * t);
        lhs <= rhs + 1e-12 * rhs.abs().max(1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_and_polynomial_costs_pass() {
        let grid = default_grid();
        let square = CostFunction::polynomial(vec![(1.0, 2.0)]).unwrap();
        assert!(is_r_convex(&square, 3.0, &grid).unwrap());
        let root = CostFunction::polynomial(vec![(1.0, 0.5)]).unwrap();
        assert!(is_r_convex(&root, 2.0, &grid).unwrap());
    }

    #[test]
    fn saturating_exponential_fails() {
        // z'(t) = e^{-t}: the test reads e^{-t/2}/2 <= 2 e^{-2t}, i.e. e^{1.5t} <= 4.
        let grid = default_grid();
        assert!(grid.contains(&5.0));
        assert!(!is_r_convex_by(|t| (-t).exp(), 2.0, &grid));
        assert!(is_r_convex_by(|t| (-t).exp(), 2.0, &[0.1, 0.5, 0.9]));
    }

    #[test]
    fn tabulated_is_rejected() {
        let c = CostFunction::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(is_r_convex(&c, 2.0, &default_grid()).is_err());
    }
}
