//! Edge cost functions.
//!
//! Every variant is nonnegative and nondecreasing on `t >= 0`. The affine and
//! polynomial variants have exact derivatives and antiderivatives; the
//! tabulated variant is piecewise linear between its breakpoints, flat outside
//! them, and only exposes one-sided slopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostFunction {
    /// `a * t + b`
    Affine { a: f64, b: f64 },
    /// `sum_j coef_j * t^exp_j`
    Polynomial { terms: Vec<(f64, f64)> },
    /// Piecewise-linear interpolation through sorted `(t, value)` breakpoints.
    #[serde(rename = "tabulated")]
    TabulatedMonotone { breakpoints: Vec<(f64, f64)> },
}

impl CostFunction {
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        let c = CostFunction::Affine { a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn constant(b: f64) -> Result<Self> {
        Self::affine(0.0, b)
    }

    pub fn polynomial(terms: Vec<(f64, f64)>) -> Result<Self> {
        let c = CostFunction::Polynomial { terms };
        c.validate()?;
        Ok(c)
    }

    pub fn tabulated(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let c = CostFunction::TabulatedMonotone { breakpoints };
        c.validate()?;
        Ok(c)
    }

    /// Checks the structural invariants. Deserialized values must pass this
    /// before use; the constructors call it already.
    pub fn validate(&self) -> Result<()> {
        match self {
            CostFunction::Affine { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a >= 0.0 && *b >= 0.0) {
                    return Err(Error::InvalidCost(format!(
                        "affine needs finite a >= 0 and b >= 0, got a = {a}, b = {b}"
                    )));
                }
            }
            CostFunction::Polynomial { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidCost("polynomial without terms".into()));
                }
                for &(coef, exp) in terms {
                    if !(coef.is_finite() && exp.is_finite() && coef >= 0.0 && exp >= 0.0) {
                        return Err(Error::InvalidCost(format!(
                            "polynomial term ({coef}, {exp}) needs finite coef >= 0 and exponent >= 0"
                        )));
                    }
                }
            }
            CostFunction::TabulatedMonotone { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::InvalidCost("tabulated cost without breakpoints".into()));
                }
                for &(t, v) in breakpoints {
                    if !(t.is_finite() && v.is_finite() && t >= 0.0 && v >= 0.0) {
                        return Err(Error::InvalidCost(format!(
                            "breakpoint ({t}, {v}) must be finite and nonnegative"
                        )));
                    }
                }
                for w in breakpoints.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidCost(
                            "breakpoints must have strictly increasing t".into(),
                        ));
                    }
                    if w[1].1 < w[0].1 {
                        return Err(Error::InvalidCost(
                            "breakpoint values must be nondecreasing".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CostFunction::Affine { a, b } => a * t + b,
            CostFunction::Polynomial { terms } => {
                terms.iter().map(|&(c, k)| c * t.powf(k)).sum()
            }
            CostFunction::TabulatedMonotone { breakpoints } => interpolate(breakpoints, t),
        }
    }

    /// Exact derivative, or `None` for the tabulated variant.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        match self {
            CostFunction::Affine { a, .. } => Some(*a),
            CostFunction::Polynomial { terms } => Some(
                terms
                    .iter()
                    .filter(|&&(c, k)| c != 0.0 && k != 0.0)
                    .map(|&(c, k)| c * k * t.powf(k - 1.0))
                    .sum(),
            ),
            CostFunction::TabulatedMonotone { .. } => None,
        }
    }

    /// Left and right slopes at `t`. Equal to the derivative for the smooth
    /// variants (the left slope at `t = 0` is reported as the right one).
    pub fn one_sided_slopes(&self, t: f64) -> (f64, f64) {
        match self {
            CostFunction::TabulatedMonotone { breakpoints } => tabulated_slopes(breakpoints, t),
            _ => {
                let d = self.derivative(t).unwrap_or(0.0);
                (d, d)
            }
        }
    }

    pub fn is_differentiable(&self) -> bool {
        !matches!(self, CostFunction::TabulatedMonotone { .. })
    }

    /// `(a, b)` when the cost is affine in `t`, including polynomials whose
    /// exponents are all 0 or 1.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        match self {
            CostFunction::Affine { a, b } => Some((*a, *b)),
            CostFunction::Polynomial { terms } => {
                let mut a = 0.0;
                let mut b = 0.0;
                for &(c, k) in terms {
                    if k == 0.0 {
                        b += c;
                    } else if k == 1.0 {
                        a += c;
                    } else if c != 0.0 {
                        return None;
                    }
                }
                Some((a, b))
            }
            CostFunction::TabulatedMonotone { .. } => None,
        }
    }

    /// `int_0^t c(u) du`.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            CostFunction::Affine { a, b } => 0.5 * a * t * t + b * t,
            CostFunction::Polynomial { terms } => terms
                .iter()
                .map(|&(c, k)| c * t.powf(k + 1.0) / (k + 1.0))
                .sum(),
            CostFunction::TabulatedMonotone { breakpoints } => tabulated_integral(breakpoints, t),
        }
    }

    /// The cost `t -> c(t) + t c'(t)` whose integral is `t c(t)`.
    pub fn marginal(&self) -> Option<CostFunction> {
        match self {
            CostFunction::Affine { a, b } => Some(CostFunction::Affine { a: 2.0 * a, b: *b }),
            CostFunction::Polynomial { terms } => Some(CostFunction::Polynomial {
                terms: terms.iter().map(|&(c, k)| (c * (1.0 + k), k)).collect(),
            }),
            CostFunction::TabulatedMonotone { .. } => None,
        }
    }

    /// `t -> c(factor * t)`. Exact for every variant.
    pub fn scaled(&self, factor: f64) -> CostFunction {
        match self {
            CostFunction::Affine { a, b } => CostFunction::Affine { a: a * factor, b: *b },
            CostFunction::Polynomial { terms } => CostFunction::Polynomial {
                terms: terms.iter().map(|&(c, k)| (c * factor.powf(k), k)).collect(),
            },
            CostFunction::TabulatedMonotone { breakpoints } => CostFunction::TabulatedMonotone {
                breakpoints: breakpoints.iter().map(|&(t, v)| (t / factor, v)).collect(),
            },
        }
    }
}

fn interpolate(bp: &[(f64, f64)], t: f64) -> f64 {
    let first = bp[0];
    let last = bp[bp.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let i = bp.partition_point(|&(x, _)| x <= t);
    let (t0, v0) = bp[i - 1];
    let (t1, v1) = bp[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn tabulated_slopes(bp: &[(f64, f64)], t: f64) -> (f64, f64) {
    let seg = |i: usize| (bp[i + 1].1 - bp[i].1) / (bp[i + 1].0 - bp[i].0);
    let n = bp.len();
    // Segment index s covers [bp[s], bp[s+1]]; slope 0 outside the table.
    let slope_at = |s: isize| -> f64 {
        if s < 0 || s as usize + 1 >= n {
            0.0
        } else {
            seg(s as usize)
        }
    };
    let right_seg = bp.partition_point(|&(x, _)| x <= t) as isize - 1;
    let left_seg = bp.partition_point(|&(x, _)| x < t) as isize - 1;
    (slope_at(left_seg), slope_at(right_seg))
}

fn tabulated_integral(bp: &[(f64, f64)], t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // Linear between consecutive knots, so the trapezoid rule is exact.
    let mut knots = vec![0.0];
    knots.extend(bp.iter().map(|&(x, _)| x).filter(|&x| x > 0.0 && x < t));
    knots.push(t);
    knots
        .windows(2)
        .map(|w| 0.5 * (interpolate(bp, w[0]) + interpolate(bp, w[1])) * (w[1] - w[0]))
        .sum()
}
