//! Uniform time grid and per-node trajectories.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::model::{ControlVec, State};
use crate::scalar::Scalar;

/// Uniform grid on `[0, t_final]` with `n_nodes = t_final/dt + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<F> {
    t_final: F,
    dt: F,
    n_nodes: usize,
}

impl<F: Scalar> Grid<F> {
    /// Builds a grid; `t_final/dt` must be integral to within `1e-9`.
    pub fn new(t_final: F, dt: F) -> Result<Self> {
        if !t_final.is_finite() || !dt.is_finite() || t_final <= F::zero() || dt <= F::zero() {
            return Err(Error::InvalidGrid(
                "t_final and dt must be finite and positive".into(),
            ));
        }
        let ratio = t_final / dt;
        let rounded = ratio.round();
        if (ratio - rounded).abs() > F::lit(1e-9) {
            return Err(Error::InvalidGrid(format!(
                "t_final/dt = {ratio} is not an integer number of steps"
            )));
        }
        let n_steps = rounded
            .to_usize()
            .ok_or_else(|| Error::InvalidGrid(format!("step count {rounded} not representable")))?;
        if n_steps == 0 {
            return Err(Error::InvalidGrid("grid needs at least one step".into()));
        }
        Ok(Self { t_final, dt, n_nodes: n_steps + 1 })
    }

    pub fn t_final(&self) -> F {
        self.t_final
    }

    pub fn dt(&self) -> F {
        self.dt
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_steps(&self) -> usize {
        self.n_nodes - 1
    }

    /// Time of node `k`.
    pub fn time(&self, k: usize) -> F {
        self.dt * F::from_usize(k).expect("node index must convert")
    }

    /// Times of all nodes in order.
    pub fn times(&self) -> impl Iterator<Item = F> + '_ {
        (0..self.n_nodes).map(|k| self.time(k))
    }
}

/// A value per grid node. `V` is one of [`State`], [`ControlVec`], or
/// [`super::CostateVec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F, V> {
    grid: Grid<F>,
    values: Vec<V>,
}

impl<F: Scalar, V: Copy> Trajectory<F, V> {
    /// A trajectory holding the same value at every node.
    pub fn constant(grid: Grid<F>, value: V) -> Self {
        Self { grid, values: vec![value; grid.n_nodes()] }
    }

    /// Wraps one value per node; the length must match the grid.
    pub fn from_values(grid: Grid<F>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: grid.n_nodes(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> Grid<F> {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, V> {
        self.values.iter()
    }

    /// Last node's value.
    pub fn terminal(&self) -> V {
        *self.values.last().expect("grid always has at least two nodes")
    }

    /// Applies `f` to every node value in place.
    pub fn map_in_place(&mut self, mut f: impl FnMut(&mut V)) {
        self.values.iter_mut().for_each(&mut f);
    }
}

impl<F: Scalar, V: Copy> Index<usize> for Trajectory<F, V> {
    type Output = V;

    fn index(&self, k: usize) -> &V {
        &self.values[k]
    }
}

pub type StateTrajectory<F> = Trajectory<F, State<F>>;
pub type ControlTrajectory<F> = Trajectory<F, ControlVec<F>>;
pub type CostateTrajectory<F> = Trajectory<F, super::CostateVec<F>>;
