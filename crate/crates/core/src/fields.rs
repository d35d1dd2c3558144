//! Fields of algebra elements on regular grids: frames h^a(x), connection
//! components C_mu(x), single-element fields S(x), and scalar frame matrices.
//!
//! Derivatives are 4th-order central differences in the interior and
//! 2nd-order stencils near the boundary, applied coefficientwise. The
//! stencils are evaluated in difference form so a constant field maps to an
//! exact zero.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::generators::GeneratorSet;
use crate::grid::Grid;
use crate::multivector::Multivector;
use crate::scalar::ClScalar;
use crate::signature::Signature;

/// How many nodes from the boundary the full 4th-order stencil applies.
pub const STENCIL_DEPTH: usize = 2;

fn derivative_line<S: ClScalar>(
    values: &dyn Fn(usize) -> Multivector<S>,
    k: usize,
    len: usize,
    inv_h: f64,
) -> Multivector<S> {
    if k == 0 {
        // (4(f1 - f0) + (f0 - f2)) / (2h)
        let d1 = &values(1) - &values(0);
        let d2 = &values(0) - &values(2);
        (&d1.scale(4.0) + &d2).scale(0.5 * inv_h)
    } else if k == len - 1 {
        // (4(f_k - f_{k-1}) + (f_{k-2} - f_k)) / (2h)
        let d1 = &values(k) - &values(k - 1);
        let d2 = &values(k - 2) - &values(k);
        (&d1.scale(4.0) + &d2).scale(0.5 * inv_h)
    } else if k == 1 || k == len - 2 {
        // (f_{k+1} - f_{k-1}) / (2h)
        (&values(k + 1) - &values(k - 1)).scale(0.5 * inv_h)
    } else {
        // (8(f_{k+1} - f_{k-1}) - (f_{k+2} - f_{k-2})) / (12h)
        let d1 = &values(k + 1) - &values(k - 1);
        let d2 = &values(k + 2) - &values(k - 2);
        (&d1.scale(8.0) - &d2).scale(inv_h / 12.0)
    }
}

/// Differentiate a node-major block of multivectors (comps per node) along
/// one grid axis.
fn derivative_block<S: ClScalar>(
    grid: &Grid,
    data: &[Multivector<S>],
    comps: usize,
    axis: usize,
) -> Result<Vec<Multivector<S>>, FieldError> {
    grid.check_axis(axis)?;
    let stride = grid.stride(axis);
    let len = grid.shape[axis];
    let inv_h = 1.0 / grid.spacing[axis];
    let out: Vec<Multivector<S>> = (0..data.len())
        .into_par_iter()
        .map(|flat| {
            let node = flat / comps;
            let comp = flat % comps;
            let k = grid.multi(node)[axis];
            let base = node - k * stride;
            let values = |j: usize| data[(base + j * stride) * comps + comp].clone();
            derivative_line(&values, k, len, inv_h)
        })
        .collect();
    Ok(out)
}

/// A frame field: one generator set per node.
#[derive(Clone, Debug)]
pub struct FrameField<S: ClScalar> {
    grid: Grid,
    sig: Signature,
    /// data[node * n + (a-1)] = h^a at the node
    data: Vec<Multivector<S>>,
}

impl<S: ClScalar> FrameField<S> {
    pub fn new(grid: Grid, sig: Signature, data: Vec<Multivector<S>>) -> Result<Self, FieldError> {
        if data.len() != grid.node_count() * sig.n() {
            return Err(FieldError::ShapeMismatch(format!(
                "frame data length {} != nodes {} * n {}",
                data.len(),
                grid.node_count(),
                sig.n()
            )));
        }
        Ok(FrameField { grid, sig, data })
    }

    /// Sample a frame from per-node closures (node index -> generator).
    pub fn from_fn(
        grid: Grid,
        sig: Signature,
        f: impl Fn(usize, usize) -> Multivector<S> + Sync + Send,
    ) -> Self {
        let n = sig.n();
        let data: Vec<Multivector<S>> = (0..grid.node_count() * n)
            .into_par_iter()
            .map(|flat| f(flat / n, flat % n + 1))
            .collect();
        FrameField { grid, sig, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn signature(&self) -> Signature {
        self.sig
    }

    #[inline]
    pub fn gen_at(&self, node: usize, a: usize) -> &Multivector<S> {
        &self.data[node * self.sig.n() + (a - 1)]
    }

    pub fn data(&self) -> &[Multivector<S>] {
        &self.data
    }

    /// The generator set at one node (clones the elements).
    pub fn set_at(&self, node: usize) -> GeneratorSet<S> {
        let n = self.sig.n();
        GeneratorSet::new(
            self.sig,
            self.data[node * n..(node + 1) * n].to_vec(),
        )
    }

    /// Coefficientwise partial derivative along an axis.
    pub fn derivative(&self, axis: usize) -> Result<FrameField<S>, FieldError> {
        let data = derivative_block(&self.grid, &self.data, self.sig.n(), axis)?;
        Ok(FrameField {
            grid: self.grid.clone(),
            sig: self.sig,
            data,
        })
    }

    /// Max anticommutation-relation residual over all nodes.
    pub fn max_relation_residual(&self, tol: f64) -> f64 {
        (0..self.grid.node_count())
            .into_par_iter()
            .map(|node| self.set_at(node).check(tol).max_relation_residual)
            .reduce(|| 0.0, f64::max)
    }
}

/// A connection field: r components C_1..C_r per node.
#[derive(Clone, Debug)]
pub struct ConnectionField<S: ClScalar> {
    grid: Grid,
    sig: Signature,
    /// data[node * r + (mu-1)] = C_mu at the node
    data: Vec<Multivector<S>>,
}

impl<S: ClScalar> ConnectionField<S> {
    pub fn new(grid: Grid, sig: Signature, data: Vec<Multivector<S>>) -> Result<Self, FieldError> {
        if data.len() != grid.node_count() * grid.r() {
            return Err(FieldError::ShapeMismatch(format!(
                "connection data length {} != nodes {} * r {}",
                data.len(),
                grid.node_count(),
                grid.r()
            )));
        }
        Ok(ConnectionField { grid, sig, data })
    }

    pub fn from_fn(
        grid: Grid,
        sig: Signature,
        f: impl Fn(usize, usize) -> Multivector<S> + Sync + Send,
    ) -> Self {
        let r = grid.r();
        let data: Vec<Multivector<S>> = (0..grid.node_count() * r)
            .into_par_iter()
            .map(|flat| f(flat / r, flat % r + 1))
            .collect();
        ConnectionField { grid, sig, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// C_mu at a node, 1-based axis index.
    #[inline]
    pub fn comp_at(&self, node: usize, mu: usize) -> &Multivector<S> {
        &self.data[node * self.grid.r() + (mu - 1)]
    }

    pub fn comp_at_mut(&mut self, node: usize, mu: usize) -> &mut Multivector<S> {
        let r = self.grid.r();
        &mut self.data[node * r + (mu - 1)]
    }

    pub fn data(&self) -> &[Multivector<S>] {
        &self.data
    }

    pub fn derivative(&self, axis: usize) -> Result<ConnectionField<S>, FieldError> {
        let data = derivative_block(&self.grid, &self.data, self.grid.r(), axis)?;
        Ok(ConnectionField {
            grid: self.grid.clone(),
            sig: self.sig,
            data,
        })
    }

    /// Largest component norm over all nodes and axes.
    pub fn max_norm(&self) -> f64 {
        self.data
            .par_iter()
            .map(|m| m.norm())
            .reduce(|| 0.0, f64::max)
    }
}

/// A single multivector per node (transport solutions S, T and potentials).
#[derive(Clone, Debug)]
pub struct MultivectorField<S: ClScalar> {
    grid: Grid,
    sig: Signature,
    data: Vec<Multivector<S>>,
}

impl<S: ClScalar> MultivectorField<S> {
    pub fn new(grid: Grid, sig: Signature, data: Vec<Multivector<S>>) -> Result<Self, FieldError> {
        if data.len() != grid.node_count() {
            return Err(FieldError::ShapeMismatch(format!(
                "field data length {} != nodes {}",
                data.len(),
                grid.node_count()
            )));
        }
        Ok(MultivectorField { grid, sig, data })
    }

    pub fn constant(grid: Grid, value: Multivector<S>) -> Self {
        let sig = value.signature();
        let data = vec![value; grid.node_count()];
        MultivectorField { grid, sig, data }
    }

    pub fn from_fn(
        grid: Grid,
        sig: Signature,
        f: impl Fn(usize) -> Multivector<S> + Sync + Send,
    ) -> Self {
        let data: Vec<Multivector<S>> = (0..grid.node_count()).into_par_iter().map(f).collect();
        MultivectorField { grid, sig, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn signature(&self) -> Signature {
        self.sig
    }

    #[inline]
    pub fn at(&self, node: usize) -> &Multivector<S> {
        &self.data[node]
    }

    pub fn at_mut(&mut self, node: usize) -> &mut Multivector<S> {
        &mut self.data[node]
    }

    pub fn data(&self) -> &[Multivector<S>] {
        &self.data
    }

    pub fn derivative(&self, axis: usize) -> Result<MultivectorField<S>, FieldError> {
        let data = derivative_block(&self.grid, &self.data, 1, axis)?;
        Ok(MultivectorField {
            grid: self.grid.clone(),
            sig: self.sig,
            data,
        })
    }
}

/// A field of n x n scalar matrices Y = ||y^a_b|| defining grade-1 frames
/// h^a = y^a_b e^b.
#[derive(Clone, Debug)]
pub struct FrameMatrixField<S: ClScalar> {
    grid: Grid,
    sig: Signature,
    /// data[node * n * n + (a-1) * n + (b-1)] = y^a_b
    data: Vec<S>,
}

/// Result of the per-node eta-orthogonality check Y^T eta Y = eta.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub max_residual: f64,
    pub worst_node: usize,
}

impl<S: ClScalar> FrameMatrixField<S> {
    pub fn new(grid: Grid, sig: Signature, data: Vec<S>) -> Result<Self, FieldError> {
        let n = sig.n();
        if data.len() != grid.node_count() * n * n {
            return Err(FieldError::ShapeMismatch(format!(
                "matrix data length {} != nodes {} * n^2 {}",
                data.len(),
                grid.node_count(),
                n * n
            )));
        }
        Ok(FrameMatrixField { grid, sig, data })
    }

    /// Sample from a closure (node, a, b) -> y^a_b with 1-based a, b.
    pub fn from_fn(
        grid: Grid,
        sig: Signature,
        f: impl Fn(usize, usize, usize) -> S + Sync + Send,
    ) -> Self {
        let n = sig.n();
        let data: Vec<S> = (0..grid.node_count() * n * n)
            .into_par_iter()
            .map(|flat| {
                let node = flat / (n * n);
                let rest = flat % (n * n);
                f(node, rest / n + 1, rest % n + 1)
            })
            .collect();
        FrameMatrixField { grid, sig, data }
    }

    #[inline]
    pub fn entry(&self, node: usize, a: usize, b: usize) -> S {
        let n = self.sig.n();
        self.data[node * n * n + (a - 1) * n + (b - 1)]
    }

    /// Check y^a_b y^c_d eta^{bd} = eta^{ac} at every node.
    pub fn orthogonality_report(&self) -> OrthogonalityReport {
        let n = self.sig.n();
        let per_node: Vec<f64> = (0..self.grid.node_count())
            .into_par_iter()
            .map(|node| {
                let mut worst = 0.0f64;
                for a in 1..=n {
                    for c in 1..=n {
                        let mut acc = S::zero();
                        for b in 1..=n {
                            let eta = self.sig.eta(b) as f64;
                            acc += self.entry(node, a, b).scale(eta) * self.entry(node, c, b);
                        }
                        let target = if a == c { self.sig.eta(a) as f64 } else { 0.0 };
                        worst = worst.max((acc - S::from_f64(target)).abs());
                    }
                }
                worst
            })
            .collect();
        let (worst_node, max_residual) = per_node
            .iter()
            .enumerate()
            .fold((0, 0.0), |(wi, wv), (i, &v)| {
                if v > wv {
                    (i, v)
                } else {
                    (wi, wv)
                }
            });
        OrthogonalityReport {
            max_residual,
            worst_node,
        }
    }

    /// Build the grade-1 frame h^a = y^a_b e^b after checking orthogonality.
    pub fn to_frame(&self, tol: f64) -> Result<FrameField<S>, FieldError> {
        let report = self.orthogonality_report();
        if report.max_residual > tol {
            return Err(FieldError::OrthogonalityViolated {
                node: report.worst_node,
                residual: report.max_residual,
            });
        }
        let sig = self.sig;
        let n = sig.n();
        Ok(FrameField::from_fn(
            self.grid.clone(),
            sig,
            |node, a| {
                let mut h = Multivector::zero(sig);
                for b in 1..=n {
                    h.set_coeff(1 << (b - 1), self.entry(node, a, b));
                }
                h
            },
        ))
    }
}
