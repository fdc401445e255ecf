//! Periodic tangential grids and the nodal/spectral/slab field types.
//!
//! The tangential space ℝ^{n-1} is modeled as a torus of side `L` with
//! `N` nodes per axis at `x_i = -L/2 + i·L/N`, so that compactly
//! supported data sit in a central window. All fields are immutable
//! value data after construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tangential discretization: dimension `d = n−1 ∈ {1,2}`, torus side
/// `L`, `N` (even) nodes per axis, and the height levels `t ≥ 0` at
/// which slabs are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    boundary_dim: usize,
    period: f64,
    points_per_dim: usize,
    heights: Vec<f64>,
}

impl GridSpec {
    pub fn new(
        boundary_dim: usize,
        period: f64,
        points_per_dim: usize,
        heights: Vec<f64>,
    ) -> Result<Self> {
        if !(boundary_dim == 1 || boundary_dim == 2) {
            return Err(Error::InvalidGrid(format!(
                "boundary_dim must be 1 or 2, got {boundary_dim}"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        if points_per_dim < 8 || points_per_dim % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points_per_dim must be even and >= 8, got {points_per_dim}"
            )));
        }
        for w in heights.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidGrid(
                    "heights must be strictly increasing".into(),
                ));
            }
        }
        if let Some(first) = heights.first() {
            if *first < 0.0 {
                return Err(Error::InvalidGrid("heights must be >= 0".into()));
            }
        }
        Ok(Self {
            boundary_dim,
            period,
            points_per_dim,
            heights,
        })
    }

    pub fn dim(&self) -> usize {
        self.boundary_dim
    }

    /// Full spatial dimension `n = d + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.boundary_dim + 1
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn with_heights(&self, heights: Vec<f64>) -> Result<Self> {
        Self::new(self.boundary_dim, self.period, self.points_per_dim, heights)
    }

    /// Grid spacing `h = L/N`.
    pub fn spacing(&self) -> f64 {
        self.period / self.points_per_dim as f64
    }

    /// Total number of nodes `N^d`.
    pub fn node_count(&self) -> usize {
        self.points_per_dim.pow(self.boundary_dim as u32)
    }

    /// Multi-index of a flat node index (row-major, axis 0 slowest).
    pub fn unravel(&self, node: usize) -> [usize; 2] {
        match self.boundary_dim {
            1 => [node, 0],
            _ => [node / self.points_per_dim, node % self.points_per_dim],
        }
    }

    pub fn ravel(&self, ix: [usize; 2]) -> usize {
        match self.boundary_dim {
            1 => ix[0],
            _ => ix[0] * self.points_per_dim + ix[1],
        }
    }

    /// Coordinates of a node; entries beyond `dim()` are zero.
    pub fn coord(&self, node: usize) -> [f64; 2] {
        let ix = self.unravel(node);
        let h = self.spacing();
        let origin = -0.5 * self.period;
        let mut x = [0.0; 2];
        for (axis, xi) in x.iter_mut().enumerate().take(self.boundary_dim) {
            *xi = origin + ix[axis] as f64 * h;
        }
        x
    }

    /// Euclidean distance on the torus between two points.
    pub fn torus_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let mut sq = 0.0;
        for axis in 0..self.boundary_dim {
            let mut d = (a[axis] - b[axis]).abs() % self.period;
            if d > 0.5 * self.period {
                d = self.period - d;
            }
            sq += d * d;
        }
        sq.sqrt()
    }
}

/// Nodal samples of a (possibly vector-valued) field on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    components: usize,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: &GridSpec, components: usize) -> Self {
        assert!(components >= 1);
        Self {
            grid: grid.clone(),
            components,
            data: vec![0.0; components * grid.node_count()],
        }
    }

    /// Scalar field sampled from a coordinate function.
    pub fn from_scalar_fn(grid: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        let mut field = Self::zeros(grid, 1);
        for node in 0..grid.node_count() {
            field.data[node] = f(grid.coord(node));
        }
        field
    }

    /// Vector field sampled componentwise.
    pub fn from_fn(
        grid: &GridSpec,
        components: usize,
        f: impl Fn(usize, [f64; 2]) -> f64,
    ) -> Self {
        let mut field = Self::zeros(grid, components);
        let nodes = grid.node_count();
        for c in 0..components {
            for node in 0..nodes {
                field.data[c * nodes + node] = f(c, grid.coord(node));
            }
        }
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.node_count();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.node_count();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Extracts one component as a scalar field.
    pub fn extract(&self, c: usize) -> RealField {
        let mut out = RealField::zeros(&self.grid, 1);
        out.component_mut(0).copy_from_slice(self.component(c));
        out
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn mean(&self, c: usize) -> f64 {
        let comp = self.component(c);
        comp.iter().sum::<f64>() / comp.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn check_same_shape(&self, other: &RealField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch(format!(
                "{} comps on N={} vs {} comps on N={}",
                self.components,
                self.grid.points_per_dim(),
                other.components,
                other.grid.points_per_dim()
            )));
        }
        Ok(())
    }
}

/// Discrete Fourier coefficients of a field, indexed by the frequency
/// lattice of its grid. The forward transform carries the `1/N^d`
/// factor, so `f(x) = Σ_k  coef(k)·e^{i k·x}` with the actual node
/// coordinates `x`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &GridSpec, components: usize) -> Self {
        assert!(components >= 1);
        Self {
            grid: grid.clone(),
            components,
            data: vec![Complex64::new(0.0, 0.0); components * grid.node_count()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.node_count();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.node_count();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Root-mean-square of the represented field (Parseval form).
    pub fn rms(&self, c: usize) -> f64 {
        self.component(c)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Vector-valued displacement samples on tangential grid × height levels.
/// Heights come from the grid's `heights` sequence; component `dim()`
/// (the last one) is the normal component `u^n`.
#[derive(Debug, Clone)]
pub struct DisplacementSlab {
    grid: GridSpec,
    components: usize,
    /// Layout: `data[comp][level][node]`, flattened.
    data: Vec<f64>,
}

impl DisplacementSlab {
    pub fn zeros(grid: &GridSpec, components: usize) -> Self {
        let len = components * grid.heights().len() * grid.node_count();
        Self {
            grid: grid.clone(),
            components,
            data: vec![0.0; len],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn levels(&self) -> usize {
        self.grid.heights().len()
    }

    pub fn level_slice(&self, comp: usize, level: usize) -> &[f64] {
        let n = self.grid.node_count();
        let start = (comp * self.levels() + level) * n;
        &self.data[start..start + n]
    }

    pub fn level_slice_mut(&mut self, comp: usize, level: usize) -> &mut [f64] {
        let n = self.grid.node_count();
        let levels = self.levels();
        let start = (comp * levels + level) * n;
        &mut self.data[start..start + n]
    }

    pub fn value(&self, comp: usize, level: usize, node: usize) -> f64 {
        self.level_slice(comp, level)[node]
    }

    /// Boundary trace of one component; requires `heights[0] == 0`.
    pub fn trace(&self, comp: usize) -> Result<RealField> {
        match self.grid.heights().first() {
            Some(&t0) if t0 == 0.0 => {
                let mut out = RealField::zeros(&self.grid, 1);
                out.component_mut(0).copy_from_slice(self.level_slice(comp, 0));
                Ok(out)
            }
            _ => Err(Error::ShapeMismatch(
                "slab has no t = 0 level; cannot take a boundary trace".into(),
            )),
        }
    }

    pub fn add(&self, other: &DisplacementSlab) -> Result<DisplacementSlab> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch("slab shapes differ".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::new(1, 2.0 * std::f64::consts::PI, 32, vec![]).is_ok());
        assert!(GridSpec::new(3, 1.0, 32, vec![]).is_err());
        assert!(GridSpec::new(1, 1.0, 6, vec![]).is_err());
        assert!(GridSpec::new(1, 1.0, 31, vec![]).is_err());
        assert!(GridSpec::new(1, 1.0, 32, vec![0.0, 0.0]).is_err());
        assert!(GridSpec::new(1, 1.0, 32, vec![-0.1, 0.2]).is_err());
    }

    #[test]
    fn coords_are_centered() {
        let g = GridSpec::new(1, 4.0, 8, vec![]).unwrap();
        assert_eq!(g.coord(0)[0], -2.0);
        assert_eq!(g.coord(4)[0], 0.0);
        assert_eq!(g.spacing(), 0.5);
        let g2 = GridSpec::new(2, 4.0, 8, vec![]).unwrap();
        assert_eq!(g2.node_count(), 64);
        let c = g2.coord(g2.ravel([4, 4]));
        assert_eq!(c, [0.0, 0.0]);
    }

    #[test]
    fn torus_distance_wraps() {
        let g = GridSpec::new(1, 4.0, 8, vec![]).unwrap();
        let d = g.torus_distance([-1.9, 0.0], [1.9, 0.0]);
        assert!((d - 0.2).abs() < 1e-12);
    }
}
