use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, Grid, Point, TimePartition};
use crate::math;

/// Anything that can be sampled as a scalar density.
pub trait Density {
    fn value(&self, p: Point) -> f64;
}

impl<F: Fn(Point) -> f64> Density for F {
    fn value(&self, p: Point) -> f64 {
        self(p)
    }
}

/// Isotropic Gaussian blob.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gaussian {
    pub center: Point,
    pub sigma: f64,
    pub amplitude: f64,
}

impl Gaussian {
    pub fn new(center: Point, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("sigma", alloc::format!("must be positive, got {sigma}")));
        }
        Ok(Gaussian { center, sigma, amplitude })
    }
}

impl Density for Gaussian {
    fn value(&self, p: Point) -> f64 {
        let r2 = (p - self.center).norm_squared();
        self.amplitude * math::exp(-r2 / (2.0 * self.sigma * self.sigma))
    }
}

/// One time slice of a density: nodal values on a grid, evaluated
/// between nodes by bilinear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    grid: Grid,
    values: Vec<f64>,
}

impl Layer {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "layer needs {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid("values", alloc::format!("non-finite value at node {k}")));
        }
        Ok(Layer { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Layer { grid, values }
    }

    pub fn sample(grid: Grid, density: &impl Density) -> Self {
        let values = grid.nodes().map(|p| density.value(p)).collect();
        Layer { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Layer {
            grid,
            values: alloc::vec![c; grid.node_count()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Bilinear interpolation; points outside the closed domain are an error.
    pub fn eval(&self, p: Point) -> Result<f64> {
        if !self.grid.domain().contains_closed(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(self.interpolate(p))
    }

    #[inline]
    pub(crate) fn interpolate(&self, p: Point) -> f64 {
        let (i, j, fx, fy) = self.grid.locate_cell(p);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        let bottom = v00 + fx * (v10 - v00);
        let top = v01 + fx * (v11 - v01);
        bottom + fy * (top - bottom)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Layer {
        Layer {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.trapezoid_weights().integrate(&self.values)
    }

    pub fn integrate_over(&self, region: &Domain) -> Result<f64> {
        self.grid.integrate(&self.values, region)
    }
}

impl Density for Layer {
    fn value(&self, p: Point) -> f64 {
        self.interpolate(p)
    }
}

/// A density through time: one [`Layer`] per node of a [`TimePartition`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    times: TimePartition,
    layers: Vec<Layer>,
}

impl ScalarField {
    pub fn new(times: TimePartition, layers: Vec<Layer>) -> Result<Self> {
        if layers.len() != times.steps() + 1 {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected {} layers, got {}",
                times.steps() + 1,
                layers.len()
            )));
        }
        let grid = *layers[0].grid();
        if layers.iter().any(|l| *l.grid() != grid) {
            return Err(Error::ShapeMismatch("layers live on different grids".into()));
        }
        Ok(ScalarField { times, layers })
    }

    /// Every layer equal to `layer`.
    pub fn frozen(times: TimePartition, layer: Layer) -> Self {
        ScalarField {
            times,
            layers: alloc::vec![layer; times.steps() + 1],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.layers[0].grid()
    }

    pub fn times(&self) -> &TimePartition {
        &self.times
    }

    pub fn layer(&self, j: usize) -> &Layer {
        &self.layers[j]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn initial(&self) -> &Layer {
        &self.layers[0]
    }

    pub fn last(&self) -> &Layer {
        self.layers.last().expect("at least one layer")
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> ScalarField {
        ScalarField {
            times: self.times,
            layers: self.layers.iter().map(|l| l.map(f)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.layers.iter().map(Layer::min).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.layers.iter().map(Layer::max).fold(f64::NEG_INFINITY, f64::max)
    }
}
