//! Regular Cartesian grids over R^r.

use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// A regular grid: per-axis node counts, origin and spacing. Nodes are
/// addressed row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, origin: Vec<f64>, spacing: Vec<f64>) -> Result<Self, FieldError> {
        if shape.is_empty() || shape.len() != origin.len() || shape.len() != spacing.len() {
            return Err(FieldError::ShapeMismatch(format!(
                "shape/origin/spacing lengths {}/{}/{}",
                shape.len(),
                origin.len(),
                spacing.len()
            )));
        }
        for (axis, (&len, &dx)) in shape.iter().zip(&spacing).enumerate() {
            if len == 0 {
                return Err(FieldError::ShapeTooSmall { axis, len });
            }
            if !(dx > 0.0) || !dx.is_finite() {
                return Err(FieldError::ShapeMismatch(format!(
                    "spacing along axis {axis} must be positive, got {dx}"
                )));
            }
        }
        Ok(Grid {
            shape,
            origin,
            spacing,
        })
    }

    /// A 1-D line grid.
    pub fn line(len: usize, origin: f64, spacing: f64) -> Result<Self, FieldError> {
        Grid::new(vec![len], vec![origin], vec![spacing])
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.shape.len()
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    /// Row-major stride of an axis (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Linear index of a multi-index.
    pub fn index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.r());
        let mut idx = 0;
        for (axis, &i) in multi.iter().enumerate() {
            debug_assert!(i < self.shape[axis]);
            idx = idx * self.shape[axis] + i;
        }
        idx
    }

    /// Multi-index of a linear index.
    pub fn multi(&self, mut index: usize) -> Vec<usize> {
        let mut multi = vec![0; self.r()];
        for axis in (0..self.r()).rev() {
            multi[axis] = index % self.shape[axis];
            index /= self.shape[axis];
        }
        multi
    }

    /// Physical coordinates of a node.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        self.multi(index)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.origin[axis] + self.spacing[axis] * i as f64)
            .collect()
    }

    /// Start indices of all 1-D lines along `axis`: every node whose
    /// component along `axis` is zero. Walking `start + k*stride(axis)` for
    /// k in 0..shape[axis] traverses one line.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.node_count() / self.shape[axis]);
        for node in 0..self.node_count() {
            if self.multi(node)[axis] == 0 {
                starts.push(node);
            }
        }
        starts
    }

    /// Whether a node is at least `depth` nodes away from every boundary.
    pub fn is_interior(&self, index: usize, depth: usize) -> bool {
        self.multi(index)
            .iter()
            .zip(&self.shape)
            .all(|(&i, &len)| i >= depth && i + depth < len)
    }

    pub fn check_axis(&self, axis: usize) -> Result<(), FieldError> {
        if axis >= self.r() {
            return Err(FieldError::AxisOutOfRange { axis, r: self.r() });
        }
        if self.shape[axis] < 5 {
            return Err(FieldError::ShapeTooSmall {
                axis,
                len: self.shape[axis],
            });
        }
        Ok(())
    }
}
