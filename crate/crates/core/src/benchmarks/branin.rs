//! Branin function minimization over a uniform grid of constants.

use std::f64::consts::PI;

use super::BenchmarkError;
use crate::registry::ComponentModule;
use crate::semantics::Problem;

pub const X1_RANGE: (f64, f64) = (-5.0, 10.0);
pub const X2_RANGE: (f64, f64) = (0.0, 15.0);
pub const DEFAULT_GRID_STEP: f64 = 0.05;

/// Standard Dixon–Szegő form. The display formula in circulation groups
/// `(x2 - 5.1/4π²) x1²`, which does not reach the well-known minimum 0.3979;
/// the standard grouping `x2 - (5.1/4π²) x1²` does.
pub fn branin_value(x1: f64, x2: f64) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    let inner = x2 - b * x1 * x1 + c * x1 - 6.0;
    inner * inner + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraninGrid {
    step: f64,
}

impl BraninGrid {
    pub fn new(step: f64) -> Result<Self, BenchmarkError> {
        let grid = BraninGrid { step };
        if !(step.is_finite() && step > 0.0)
            || grid.x1_points().len() < 2
            || grid.x2_points().len() < 2
        {
            return Err(BenchmarkError::DegenerateGrid(step));
        }
        Ok(grid)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x1_points(&self) -> Vec<f64> {
        axis(X1_RANGE, self.step)
    }

    pub fn x2_points(&self) -> Vec<f64> {
        axis(X2_RANGE, self.step)
    }

    pub fn len(&self) -> usize {
        self.x1_points().len() * self.x2_points().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Best grid point by exhaustive evaluation: `(x1, x2, 1 / branin)`.
    pub fn optimum(&self) -> (f64, f64, f64) {
        let mut best = (f64::NAN, f64::NAN, f64::NEG_INFINITY);
        for &x1 in &self.x1_points() {
            for &x2 in &self.x2_points() {
                let f = branin_fitness(x1, x2);
                if f > best.2 {
                    best = (x1, x2, f);
                }
            }
        }
        best
    }
}

impl Default for BraninGrid {
    fn default() -> Self {
        BraninGrid {
            step: DEFAULT_GRID_STEP,
        }
    }
}

fn axis((lo, hi): (f64, f64), step: f64) -> Vec<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|i| {
            let x = ((lo + i as f64 * step) * 1e9).round() / 1e9;
            if x == 0.0 {
                0.0
            } else {
                x.min(hi)
            }
        })
        .collect()
}

pub fn branin_fitness(x1: f64, x2: f64) -> f64 {
    1.0 / branin_value(x1, x2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BraninValue {
    Coordinate(f64),
    Point(f64, f64),
}

pub fn coordinate_label(axis: &str, x: f64) -> String {
    format!("{axis}={x}")
}

pub fn branin_module(grid: &BraninGrid) -> ComponentModule<BraninValue> {
    let mut m =
        ComponentModule::new("Point").constructor(
            "point",
            "Point",
            ["X1", "X2"],
            |args| match args.as_slice() {
                [BraninValue::Coordinate(x1), BraninValue::Coordinate(x2)] => {
                    Ok(BraninValue::Point(*x1, *x2))
                }
                _ => Err("point expects two coordinates".into()),
            },
        );
    for x in grid.x1_points() {
        m = m.constant(coordinate_label("x1", x), "X1", BraninValue::Coordinate(x));
    }
    for x in grid.x2_points() {
        m = m.constant(coordinate_label("x2", x), "X2", BraninValue::Coordinate(x));
    }
    m
}

/// Maximizes `1 / branin` over the grid.
pub fn branin_case(grid: &BraninGrid) -> Result<Problem<BraninValue>, BenchmarkError> {
    let (grammar, semantics) = branin_module(grid).compile()?;
    Ok(Problem::new(grammar, semantics, |v| match v {
        BraninValue::Point(x1, x2) => branin_fitness(*x1, *x2),
        BraninValue::Coordinate(_) => f64::NEG_INFINITY,
    }))
}
