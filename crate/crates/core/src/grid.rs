//! Uniform 1D mesh, nodal fields, finite-difference derivatives, quadrature,
//! discrete Sobolev norms and compactly supported initial data.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ConsState, SymState};
use crate::error::{Error, Result};
use crate::transform::{map_cons_to_sym, TransformParams};

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;
/// Width of the five-point stencil.
const STENCIL_WIDTH: usize = 5;
/// Highest derivative order served by [`derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;
/// Highest Sobolev order served by [`sobolev_norm_sq`].
pub const MAX_SOBOLEV_ORDER: usize = 3;
/// The background density all perturbations are measured against.
pub const BACKGROUND_DENSITY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooSmall { n, need: MIN_NODES });
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::invalid(format!("bad grid interval [{x_min}, {x_max}]")));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        Ok(Self { x_min, x_max, n, dx })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }
}

/// Real-valued nodal data on a [`Grid1D`]. Values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index: Some(i) });
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan. Callers that produce values by arithmetic on
    /// finite fields use this and check once per time step instead.
    pub(crate) fn from_raw(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.len()])
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First node holding a NaN or infinity.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise `f(self_i, other_i)`.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.same_grid(other)?;
        Ok(Field::from_raw(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub(crate) fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `exp(1 - 1/(1 - (x/R)^2))` inside `|x| < R`, zero outside.
pub fn bump_profile(x: f64, radius: f64) -> f64 {
    let s = x / radius;
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `R * d/dx bump_profile(x, R)`: odd, compactly supported, dimensionless.
pub fn bump_derivative_profile(x: f64, radius: f64) -> f64 {
    let s = x / radius;
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        -2.0 * s / (q * q) * (1.0 - 1.0 / q).exp()
    }
}

/// `k`-fold application of the fourth-order first-derivative stencil.
///
/// Interior nodes use `(f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) / (12 dx)`; the
/// two nodes at each end use one-sided fourth-order stencils. `k = 0` returns
/// the field unchanged.
pub fn derivative(f: &Field, k: usize) -> Result<Field> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(Error::invalid(format!("derivative order {k} exceeds {MAX_DERIVATIVE_ORDER}")));
    }
    let n = f.len();
    if n < STENCIL_WIDTH {
        return Err(Error::GridTooSmall { n, need: STENCIL_WIDTH });
    }
    let mut values = f.values.clone();
    for _ in 0..k {
        values = first_derivative(&values, f.grid.dx());
    }
    Ok(Field::from_raw(f.grid, values))
}

/// All derivatives `f, f', ..., f^(k)`.
pub fn derivatives_up_to(f: &Field, k: usize) -> Result<Vec<Field>> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(f.clone());
    for _ in 0..k {
        let next = derivative(out.last().expect("non-empty"), 1)?;
        out.push(next);
    }
    Ok(out)
}

// Stencils are written in difference form so that constants map to exact zeros.
fn first_derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let c = 1.0 / (12.0 * dx);
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (8.0 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2])) * c;
    }
    let left = |j: usize, i: usize| f[j] - f[i];
    d[0] = (48.0 * left(1, 0) - 36.0 * left(2, 0) + 16.0 * left(3, 0) - 3.0 * left(4, 0)) * c;
    d[1] = (-3.0 * left(0, 1) + 18.0 * left(2, 1) - 6.0 * left(3, 1) + left(4, 1)) * c;
    let (a, b) = (n - 1, n - 2);
    d[a] =
        -(48.0 * left(a - 1, a) - 36.0 * left(a - 2, a) + 16.0 * left(a - 3, a) - 3.0 * left(a - 4, a)) * c;
    d[b] = -(-3.0 * left(b + 1, b) + 18.0 * left(b - 1, b) - 6.0 * left(b - 2, b) + left(b - 3, b)) * c;
    d
}

/// Composite trapezoid approximation of `∫ f² dx`.
pub fn l2_norm_sq(f: &Field) -> f64 {
    let v = &f.values;
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = v[1..n - 1].iter().map(|x| x * x).sum();
    f.grid.dx() * (interior + 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1]))
}

/// `Σ_{k=0}^{m} ||∂_x^k f||²`, the squared order-`m` Sobolev norm.
///
/// This is a sum of squared L² seminorms rather than the square of a sum of
/// norms; the two are equivalent and the former is additive.
pub fn sobolev_norm_sq(f: &Field, m: usize) -> Result<f64> {
    if m > MAX_SOBOLEV_ORDER {
        return Err(Error::invalid(format!("Sobolev order {m} exceeds {MAX_SOBOLEV_ORDER}")));
    }
    Ok(derivatives_up_to(f, m)?.iter().map(l2_norm_sq).sum())
}

/// Tabulated profile `(x, value)`, linearly interpolated and zero outside its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl ProfileTable {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::invalid("profile table needs at least two (x, value) rows"));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile table contains non-finite entries"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("profile table x column must be strictly increasing"));
        }
        Ok(Self { xs, values })
    }

    /// Parse a whitespace- or comma-separated two-column table. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::invalid(format!("profile table line {}: cannot parse {s:?}", lineno + 1))
                })
            };
            match cols.as_slice() {
                [x, v] => {
                    xs.push(parse(x)?);
                    values.push(parse(v)?);
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "profile table line {}: expected two columns",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(xs, values)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let j = self.xs.partition_point(|&xi| xi <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let w = (x - x0) / (x1 - x0);
        (1.0 - w) * self.values[j - 1] + w * self.values[j]
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Zero,
    #[default]
    Bump,
    BumpDerivative,
    Custom(ProfileTable),
}

impl Profile {
    pub fn eval(&self, x: f64, radius: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Bump => bump_profile(x, radius),
            Profile::BumpDerivative => bump_derivative_profile(x, radius),
            Profile::Custom(t) => t.eval(x),
        }
    }
}

/// Perturbation `(rho, u) = (1 + ε rho0(x), ε u0(x))` supported in `|x| <= R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub epsilon: f64,
    pub radius: f64,
    pub rho_profile: Profile,
    pub u_profile: Profile,
}

impl Default for InitialData {
    fn default() -> Self {
        Self { epsilon: 0.05, radius: 1.0, rho_profile: Profile::Bump, u_profile: Profile::Zero }
    }
}

impl InitialData {
    pub fn rho_bar(&self) -> f64 {
        BACKGROUND_DENSITY
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("support radius must be > 0, got {}", self.radius)));
        }
        Ok(())
    }
}

/// Sample the initial data on `grid` in both formulations at `t = 0`.
pub fn make_initial(id: &InitialData, grid: &Grid1D, tp: &TransformParams) -> Result<(ConsState, SymState)> {
    id.validate()?;
    let r = id.radius;
    if !(grid.x_min() < -r && grid.x_max() > r) {
        return Err(Error::SupportExceedsDomain { radius: r, x_min: grid.x_min(), x_max: grid.x_max() });
    }
    let n = grid.len();
    let mut rho = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    for (i, x) in grid.nodes().enumerate() {
        let r0 = id.rho_profile.eval(x, r);
        let u0 = id.u_profile.eval(x, r);
        if x.abs() > r && (r0 != 0.0 || u0 != 0.0) {
            return Err(Error::invalid(format!("initial profile is nonzero at x = {x}, outside |x| <= {r}")));
        }
        let density = BACKGROUND_DENSITY + id.epsilon * r0;
        if !(density > 0.0) {
            return Err(Error::NonPositiveDensity { rho: density, index: Some(i) });
        }
        rho.push(density);
        m.push(density * id.epsilon * u0);
    }
    let cons = ConsState::new(Field::new(*grid, rho)?, Field::new(*grid, m)?, 0.0)?;
    let sym = map_cons_to_sym(&cons, tp)?;
    Ok((cons, sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::PressureLaw;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(a: f64, b: f64, n: usize) -> Grid1D {
        Grid1D::new(a, b, n).unwrap()
    }

    /// Composite Simpson on `n` (odd) nodes of `[a, b]`; independent of the
    /// trapezoid rule under test.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        assert!(n % 2 == 1);
        let h = (b - a) / (n - 1) as f64;
        let mut s = f(a) + f(b);
        for i in 1..n - 1 {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid1D::new(0.0, 1.0, 15), Err(Error::GridTooSmall { .. })));
        assert!(Grid1D::new(1.0, 1.0, 32).is_err());
        let g = grid(-1.0, 1.0, 21);
        assert_relative_eq!(g.dx(), 0.1);
        assert_eq!(g.x(20), 1.0);
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = grid(0.0, 1.0, 16);
        let mut v = vec![0.0; 16];
        v[7] = f64::NAN;
        assert_eq!(Field::new(g, v).unwrap_err(), Error::NonFiniteValue { index: Some(7) });
        assert!(Field::new(g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn bump_examples() {
        assert_eq!(bump_profile(0.0, 1.0), 1.0);
        assert_eq!(bump_profile(1.0, 1.0), 0.0);
        assert_eq!(bump_profile(-1.0, 1.0), 0.0);
        assert_eq!(bump_profile(3.0, 1.0), 0.0);
        assert_relative_eq!(bump_profile(0.5, 1.0), 0.716_531_310_573_789_2, max_relative = 1e-12);
        assert_relative_eq!(bump_profile(0.5, 1.0), (-1.0f64 / 3.0).exp(), max_relative = 1e-15);
    }

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        for x in [-0.9, -0.5, -0.1, 0.0, 0.3, 0.77] {
            let h = 1e-6;
            let fd = (bump_profile(x + h, 2.0) - bump_profile(x - h, 2.0)) / (2.0 * h);
            assert_relative_eq!(bump_derivative_profile(x, 2.0), 2.0 * fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(-3.0, 5.0, 40);
        let f = Field::constant(g, 0.123_456_789);
        for k in 1..=4 {
            assert!(derivative(&f, k).unwrap().values().iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn derivative_exact_on_cubics() {
        let g = grid(-2.0, 3.0, 51);
        let f = Field::from_fn(g, |x| x * x * x - 2.0 * x * x + 0.5).unwrap();
        let d = derivative(&f, 1).unwrap();
        for (i, x) in g.nodes().enumerate() {
            let exact = 3.0 * x * x - 4.0 * x;
            assert!((d.values()[i] - exact).abs() <= 1e-11, "node {i}: {} vs {exact}", d.values()[i]);
        }
    }

    #[test]
    fn derivative_fourth_order_on_sine() {
        let err = |n: usize| {
            let g = grid(0.0, 2.0 * std::f64::consts::PI, n);
            let f = Field::from_fn(g, f64::sin).unwrap();
            let d = derivative(&f, 1).unwrap();
            (2..n - 2).map(|i| (d.values()[i] - g.x(i).cos()).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(101), err(201));
        let order = (e1 / e2).log2();
        assert!(order >= 3.5, "observed order {order}");
    }

    #[test]
    fn derivative_order_limits() {
        let g = grid(0.0, 1.0, 16);
        let f = Field::zeros(g);
        assert!(derivative(&f, 5).is_err());
        assert_eq!(derivative(&f, 0).unwrap(), f);
    }

    #[test]
    fn l2_examples() {
        let g = grid(-2.0, 2.0, 4001);
        assert_eq!(l2_norm_sq(&Field::zeros(g)), 0.0);

        let f = Field::from_fn(g, |x| bump_profile(x, 1.0)).unwrap();
        let oracle = simpson(|x| bump_profile(x, 1.0).powi(2), -2.0, 2.0, 64001);
        assert_relative_eq!(l2_norm_sq(&f), oracle, max_relative = 1e-8);

        let a = -3.7;
        assert_relative_eq!(l2_norm_sq(&f.scaled(a)), a * a * l2_norm_sq(&f), max_relative = 1e-15);
    }

    #[test]
    fn l2_of_hat_function() {
        // ∫ hat² = 2/3 for the unit hat on [-1, 1]
        for n in [41, 81, 161] {
            let g = grid(-2.0, 2.0, n);
            let f = Field::from_fn(g, |x| (1.0 - x.abs()).max(0.0)).unwrap();
            assert!((l2_norm_sq(&f) - 2.0 / 3.0).abs() <= g.dx() * g.dx());
        }
    }

    #[test]
    fn trapezoid_exact_on_linear() {
        let g = grid(0.0, 1.0, 101);
        // f² is quadratic, so check ∫ f dx via f = sqrt(x) -> f² = x
        let f = Field::from_fn(g, f64::sqrt).unwrap();
        assert_relative_eq!(l2_norm_sq(&f), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(-2.0, 2.0, 4001);
        assert_eq!(sobolev_norm_sq(&Field::zeros(g), 3).unwrap(), 0.0);

        let f = Field::from_fn(g, |x| bump_profile(x, 1.0)).unwrap();
        assert_eq!(sobolev_norm_sq(&f, 0).unwrap(), l2_norm_sq(&f));

        let oracle = simpson(
            |x| bump_profile(x, 1.0).powi(2) + bump_derivative_profile(x, 1.0).powi(2),
            -2.0,
            2.0,
            64001,
        );
        assert_relative_eq!(sobolev_norm_sq(&f, 1).unwrap(), oracle, max_relative = 1e-6);
        assert!(sobolev_norm_sq(&f, 4).is_err());
    }

    #[test]
    fn profile_table_interpolates() {
        let t = ProfileTable::parse("# x value\n-1 0\n0, 2\n1 0\n").unwrap();
        assert_eq!(t.eval(-0.5), 1.0);
        assert_eq!(t.eval(0.0), 2.0);
        assert_eq!(t.eval(0.25), 1.5);
        assert_eq!(t.eval(1.0), 0.0);
        assert_eq!(t.eval(1.5), 0.0);
        assert!(ProfileTable::parse("0 1\n").is_err());
        assert!(ProfileTable::parse("0 1\n1 x\n").is_err());
        assert!(ProfileTable::parse("1 1\n0 1\n").is_err());
    }

    fn log_tp() -> TransformParams {
        TransformParams::new(PressureLaw::logarithmic(1.0, 0.0).unwrap())
    }

    #[test]
    fn make_initial_background() {
        let g = grid(-5.0, 5.0, 101);
        let id = InitialData { epsilon: 0.0, ..Default::default() };
        let (cons, sym) = make_initial(&id, &g, &log_tp()).unwrap();
        assert!(cons.rho.values().iter().all(|&r| r == 1.0));
        assert!(cons.m.values().iter().all(|&m| m == 0.0));
        assert!(sym.v.values().iter().all(|&v| v == 0.0));
        assert!(sym.u.values().iter().all(|&u| u == 0.0));
        assert_eq!(sym.t, 0.0);
    }

    #[test]
    fn make_initial_peak_value() {
        let g = grid(-60.0, 60.0, 2001); // node 1000 is x = 0
        let id = InitialData { epsilon: 0.05, ..Default::default() };
        let (_, sym) = make_initial(&id, &g, &log_tp()).unwrap();
        assert_relative_eq!(sym.v.max_abs(), 0.048_199_854_102_933_59, max_relative = 1e-12);
        assert_relative_eq!(sym.v.max_abs(), 2.0 * (1.0 - 1.05f64.powf(-0.5)), max_relative = 1e-13);
    }

    #[test]
    fn make_initial_errors() {
        let tp = log_tp();
        let small = grid(-1.0, 1.0, 21);
        assert!(matches!(
            make_initial(&InitialData::default(), &small, &tp),
            Err(Error::SupportExceedsDomain { .. })
        ));
        let g = grid(-3.0, 3.0, 61);
        let id = InitialData { epsilon: 1.0, rho_profile: Profile::BumpDerivative, ..Default::default() };
        assert!(matches!(make_initial(&id, &g, &tp), Err(Error::NonPositiveDensity { .. })));
        let wide = ProfileTable::new(vec![-2.0, 0.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        let id = InitialData { rho_profile: Profile::Custom(wide), ..Default::default() };
        assert!(make_initial(&id, &g, &tp).is_err());
    }

    proptest! {
        #[test]
        fn initial_support_within_radius(eps in 0.0f64..0.5, r in 0.3f64..2.0, vel in any::<bool>()) {
            let g = grid(-3.0, 3.0, 241);
            let id = InitialData {
                epsilon: eps,
                radius: r,
                rho_profile: Profile::Bump,
                u_profile: if vel { Profile::BumpDerivative } else { Profile::Zero },
            };
            let (cons, sym) = make_initial(&id, &g, &log_tp()).unwrap();
            for (i, x) in g.nodes().enumerate() {
                if x.abs() >= r {
                    prop_assert_eq!(cons.rho.values()[i], 1.0);
                    prop_assert_eq!(cons.m.values()[i], 0.0);
                    prop_assert_eq!(sym.v.values()[i], 0.0);
                }
            }
        }

        #[test]
        fn derivative_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 1usize..=3) {
            let g = grid(-1.0, 2.0, 64);
            let f = Field::from_fn(g, |x| (3.0 * x).sin() + x * x).unwrap();
            let h = Field::from_fn(g, |x| (-x * x).exp()).unwrap();
            let combo = f.zip_map(&h, |p, q| a * p + b * q).unwrap();
            let lhs = derivative(&combo, k).unwrap();
            let df = derivative(&f, k).unwrap();
            let dh = derivative(&h, k).unwrap();
            // rounding in the stencil grows like |f| / dx^k
            let scale = (f.max_abs() * a.abs() + h.max_abs() * b.abs() + 1.0) / g.dx().powi(k as i32);
            for i in 0..g.len() {
                let rhs = a * df.values()[i] + b * dh.values()[i];
                prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn sobolev_monotone_in_order(c in -2.0f64..2.0, w in 0.5f64..3.0) {
            let g = grid(-4.0, 4.0, 200);
            let f = Field::from_fn(g, |x| c * (-(w * x).powi(2)).exp()).unwrap();
            let mut prev = 0.0;
            for m in 0..=3 {
                let s = sobolev_norm_sq(&f, m).unwrap();
                prop_assert!(s >= prev);
                prev = s;
            }
        }
    }
}
