//! Functional-data containers and the shared numerical substrate: composite
//! Simpson quadrature, the L2 semi-metric between curves, and the asymmetric
//! normal kernel.
//!
//! All operations here are pure functions over immutable inputs.

use crate::error::{Error, Result};

/// Relative tolerance (against the domain length) below which grid spacing
/// is considered constant.
const UNIFORM_TOL: f64 = 1e-12;

/// An ordered grid of abscissae shared by a set of curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    uniform_step: Option<f64>,
}

impl Grid {
    /// Builds a grid from strictly increasing points. At least three points
    /// are required. Constant spacing is detected and recorded.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig("grid points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "grid points must be strictly increasing".into(),
            ));
        }
        let span = points[points.len() - 1] - points[0];
        let step = (points[points.len() - 1] - points[0]) / (points.len() - 1) as f64;
        let uniform = points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= UNIFORM_TOL * span);
        Ok(Grid {
            points,
            uniform_step: uniform.then_some(step),
        })
    }

    /// Equally spaced grid of `m` points over `[start, end]`.
    pub fn uniform(start: f64, end: f64, m: usize) -> Result<Self> {
        if m < 3 || end <= start {
            return Err(Error::InvalidConfig(
                "uniform grid needs m >= 3 and end > start".into(),
            ));
        }
        let step = (end - start) / (m - 1) as f64;
        let mut points: Vec<f64> = (0..m).map(|j| start + j as f64 * step).collect();
        // Pin the right endpoint so round-trips through `new` stay uniform.
        points[m - 1] = end;
        Grid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Constant spacing, when the grid is uniform.
    pub fn uniform_step(&self) -> Option<f64> {
        self.uniform_step
    }

    /// Quadrature weights `w` such that `integrate(f) = sum_j w_j f(t_j)`.
    ///
    /// For an even number of intervals these are the composite Simpson
    /// weights. For an odd number, Simpson covers all but the last interval
    /// and the trapezoid rule closes the gap, which keeps fourth-order
    /// accuracy on the bulk of the domain.
    pub fn simpson_weights(&self) -> Result<Vec<f64>> {
        let h = self.uniform_step.ok_or(Error::NonUniformGrid)?;
        let m = self.points.len();
        let intervals = m - 1;
        let mut w = vec![0.0; m];
        let simpson_end = if intervals % 2 == 0 { m - 1 } else { m - 2 };
        w[0] = h / 3.0;
        w[simpson_end] += h / 3.0;
        for j in 1..simpson_end {
            w[j] += if j % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
        }
        if intervals % 2 == 1 {
            w[m - 2] += h / 2.0;
            w[m - 1] += h / 2.0;
        }
        Ok(w)
    }

    /// Trapezoid weights; valid on any strictly increasing grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let m = self.points.len();
        let mut w = vec![0.0; m];
        for j in 0..m - 1 {
            let half = 0.5 * (self.points[j + 1] - self.points[j]);
            w[j] += half;
            w[j + 1] += half;
        }
        w
    }
}

/// `N` curves sampled on a shared grid. Row `i` holds curve `i` evaluated at
/// the grid points, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    grid: Grid,
    values: Vec<f64>,
    n: usize,
}

impl CurveSet {
    /// Builds a curve set from row-major values (`n` rows of `grid.len()`).
    pub fn new(grid: Grid, values: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("curve set needs n >= 1".into()));
        }
        if values.len() != n * grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for {} curves on {} grid points, got {}",
                n * grid.len(),
                n,
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("curve values must be finite".into()));
        }
        Ok(CurveSet { grid, values, n })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of curves.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points per curve.
    pub fn m(&self) -> usize {
        self.grid.len()
    }

    pub fn curve(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn curves(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.m())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Copies the rows at `indices` into a new curve set on the same grid.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let m = self.m();
        let mut values = Vec::with_capacity(indices.len() * m);
        for &i in indices {
            if i >= self.n {
                return Err(Error::DimensionMismatch(format!(
                    "curve index {i} out of range for n = {}",
                    self.n
                )));
            }
            values.extend_from_slice(self.curve(i));
        }
        CurveSet::new(self.grid.clone(), values, indices.len())
    }

    /// Pointwise mean curve.
    pub fn mean_curve(&self) -> Vec<f64> {
        let m = self.m();
        let mut mean = vec![0.0; m];
        for row in self.curves() {
            for (acc, v) in mean.iter_mut().zip(row) {
                *acc += v;
            }
        }
        for acc in &mut mean {
            *acc /= self.n as f64;
        }
        mean
    }
}

/// Scalar responses paired with a curve set, plus the optional non-functional
/// covariate used by the partial linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSample {
    pub y: Vec<f64>,
    pub z: Option<Vec<f64>>,
}

impl ScalarSample {
    pub fn new(y: Vec<f64>, z: Option<Vec<f64>>) -> Result<Self> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("responses must be finite".into()));
        }
        if let Some(z) = &z {
            if z.len() != y.len() {
                return Err(Error::DimensionMismatch(format!(
                    "z has length {} but y has length {}",
                    z.len(),
                    y.len()
                )));
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("covariate must be finite".into()));
            }
        }
        Ok(ScalarSample { y, z })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Composite Simpson estimate of the integral of `values` over the grid.
///
/// Errors on a non-uniform grid; see [`integrate_any`] for the opt-in
/// trapezoid fallback.
pub fn integrate(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values on a {}-point grid",
            values.len(),
            grid.len()
        )));
    }
    let w = grid.simpson_weights()?;
    Ok(dot(&w, values))
}

/// Integrates on any grid: Simpson when the spacing is constant, trapezoid
/// otherwise. Lower-order accuracy on non-uniform grids is the caller's
/// explicit choice.
pub fn integrate_any(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values on a {}-point grid",
            values.len(),
            grid.len()
        )));
    }
    match grid.simpson_weights() {
        Ok(w) => Ok(dot(&w, values)),
        Err(Error::NonUniformGrid) => Ok(dot(&grid.trapezoid_weights(), values)),
        Err(e) => Err(e),
    }
}

/// L2 semi-metric between two curves on a shared grid:
/// `( integral |x(t) - y(t)|^2 dt )^(1/2)`.
pub fn semimetric_l2(x: &[f64], y: &[f64], grid: &Grid) -> Result<f64> {
    if x.len() != y.len() || x.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "semi-metric over {} and {} values on a {}-point grid",
            x.len(),
            y.len(),
            grid.len()
        )));
    }
    let w = grid.simpson_weights()?;
    Ok(weighted_sq_distance(x, y, &w).sqrt())
}

/// Squared L2 distance given precomputed quadrature weights. Shared by the
/// pairwise distance matrices in the kernel models.
pub(crate) fn weighted_sq_distance(x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..x.len() {
        let d = x[j] - y[j];
        acc += w[j] * d * d;
    }
    acc.max(0.0)
}

/// Asymmetric normal kernel: `(2 / sqrt(2 pi)) * exp(-x^2 / 2)` for
/// non-negative arguments, zero otherwise.
pub fn asym_normal_kernel(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        const SCALE: f64 = 0.797_884_560_802_865_4; // 2 / sqrt(2 pi)
        SCALE * (-0.5 * x * x).exp()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_grid(m: usize) -> Grid {
        Grid::uniform(0.0, 1.0, m).unwrap()
    }

    #[test]
    fn grid_rejects_short_unsorted_and_nonfinite_inputs() {
        assert!(Grid::new(vec![0.0, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(Grid::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn grid_detects_uniform_spacing() {
        let g = unit_grid(101);
        assert_abs_diff_eq!(g.uniform_step().unwrap(), 0.01, epsilon = 1e-15);
        let g = Grid::new(vec![0.0, 0.1, 0.3, 0.7]).unwrap();
        assert!(g.uniform_step().is_none());
    }

    #[test]
    fn integrates_constant_to_domain_length() {
        let g = unit_grid(101);
        let f = vec![1.0; 101];
        assert_abs_diff_eq!(integrate(&f, &g).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn integrates_quadratic_exactly() {
        let g = unit_grid(101);
        let f: Vec<f64> = g.points().iter().map(|t| t * t).collect();
        assert_abs_diff_eq!(integrate(&f, &g).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn integrates_sine_to_closed_form() {
        let g = unit_grid(101);
        let f: Vec<f64> = g.points().iter().map(|t| (PI * t).sin()).collect();
        assert_abs_diff_eq!(integrate(&f, &g).unwrap(), 2.0 / PI, epsilon = 1e-8);
    }

    #[test]
    fn odd_interval_count_uses_trapezoid_tail() {
        // 99 intervals: Simpson on the first 98, trapezoid on the last.
        let g = unit_grid(100);
        let f: Vec<f64> = g.points().iter().map(|t| t * t).collect();
        let h: f64 = g.uniform_step().unwrap();
        // Trapezoid on one interval of a quadratic errs by h^3 f''/12.
        let bound = h.powi(3) * 2.0 / 12.0 + 1e-12;
        assert!((integrate(&f, &g).unwrap() - 1.0 / 3.0).abs() < bound);
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let err_at = |m: usize| {
            let g = unit_grid(m);
            let f: Vec<f64> = g.points().iter().map(|t| (PI * t).sin()).collect();
            (integrate(&f, &g).unwrap() - 2.0 / PI).abs()
        };
        // Halving the step must shrink the error by at least 12x.
        assert!(err_at(51) / err_at(101) >= 12.0);
    }

    #[test]
    fn nonuniform_grid_is_rejected_with_fallback_available() {
        let g = Grid::new(vec![0.0, 0.1, 0.3, 0.7, 1.0]).unwrap();
        let f = vec![1.0; 5];
        assert!(matches!(integrate(&f, &g), Err(Error::NonUniformGrid)));
        assert_abs_diff_eq!(integrate_any(&f, &g).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn semimetric_vanishes_on_equal_curves() {
        let g = unit_grid(101);
        let x: Vec<f64> = g.points().iter().map(|t| t.cos()).collect();
        assert_eq!(semimetric_l2(&x, &x, &g).unwrap(), 0.0);
    }

    #[test]
    fn semimetric_matches_closed_form() {
        // integral of (t - t^2)^2 over [0,1] is 1/30.
        let g = unit_grid(101);
        let x: Vec<f64> = g.points().to_vec();
        let y: Vec<f64> = g.points().iter().map(|t| t * t).collect();
        assert_abs_diff_eq!(
            semimetric_l2(&x, &y, &g).unwrap(),
            (1.0f64 / 30.0).sqrt(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn semimetric_rejects_length_mismatch() {
        let g = unit_grid(5);
        assert!(semimetric_l2(&[0.0; 5], &[0.0; 4], &g).is_err());
    }

    #[test]
    fn kernel_matches_piecewise_definition() {
        assert_eq!(asym_normal_kernel(-0.5), 0.0);
        assert_abs_diff_eq!(asym_normal_kernel(0.0), 0.7978845608028654, epsilon = 1e-15);
        assert_abs_diff_eq!(asym_normal_kernel(1.0), 0.48394144903828673, epsilon = 1e-12);
    }

    #[test]
    fn kernel_is_nonincreasing_on_nonnegative_axis() {
        let mut prev = asym_normal_kernel(0.0);
        for k in 1..=400 {
            let v = asym_normal_kernel(k as f64 * 0.01);
            assert!(v >= 0.0 && v <= prev);
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn quadrature_is_linear(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = unit_grid(41);
            let f: Vec<f64> = (0..41).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h: Vec<f64> = (0..41).map(|_| rng.random_range(-1.0..1.0)).collect();
            let combined: Vec<f64> =
                f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
            let lhs = integrate(&combined, &g).unwrap();
            let rhs = a * integrate(&f, &g).unwrap() + b * integrate(&h, &g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        #[test]
        fn semimetric_is_symmetric_and_nonnegative(seed in 0u64..20) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = unit_grid(21);
            let x: Vec<f64> = (0..21).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..21).map(|_| rng.random_range(-3.0..3.0)).collect();
            let dxy = semimetric_l2(&x, &y, &g).unwrap();
            let dyx = semimetric_l2(&y, &x, &g).unwrap();
            prop_assert!(dxy >= 0.0);
            prop_assert_eq!(dxy, dyx);
        }
    }
}
