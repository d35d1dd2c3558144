//! Solvers for the transport system d_mu S = C_mu S and the global pipeline
//! assembling T(x) = S(x) K.
//!
//! Three interchangeable methods implement [`TransportMethod`] and are
//! registered by name in a [`TransportRegistry`]:
//!
//! * `ode-r1` — classical 4th-order one-step integration along a 1-D grid;
//! * `potential` — for closed, commuting connections: staircase line
//!   integral of the 1-form into a potential C(x), then S = exp(C(x));
//! * `path-ordered` — ordered products of midpoint exponentials along
//!   axis-ordered staircase paths (2nd-order Magnus).
//!
//! `solve_global` runs the full pipeline: connection, curvature check,
//! transport (auto-selected unless forced), constancy extraction of
//! f^a = S^{-1} h^a S, the algebraic intertwiner K, and the final relation
//! residual of T = S K.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{curvature, ConnectionScheme, GeneralScheme};
use crate::error::TransportError;
use crate::fields::{ConnectionField, FrameField, MultivectorField};
use crate::generators::GeneratorSet;
use crate::multivector::Multivector;
use crate::pauli::{intertwiner_to_standard, IntertwinerCase};
use crate::scalar::ClScalar;

/// Tunables of the transport stage. All tolerances are relative.
#[derive(Clone, Debug)]
pub struct TransportOptions {
    /// Base node: S(base) = s0. Defaults to the grid origin node.
    pub base: usize,
    /// Seed for the path-independence sampling.
    pub seed: u64,
    /// How many nodes are re-transported along a permuted-axis staircase.
    pub path_samples: usize,
    /// Closedness threshold on max |d_mu C_nu - d_nu C_mu| / scale.
    pub tol_closed: f64,
    /// Path-independence threshold (signals a curved input connection).
    pub tol_path: f64,
    /// Tolerance for the algebraic intertwiner stage.
    pub tol_algebraic: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions {
            base: 0,
            seed: 0x0C11F_F1E1,
            path_samples: 8,
            tol_closed: 1e-2,
            tol_path: 0.1,
            tol_algebraic: 1e-9,
        }
    }
}

/// Output of a single transport method.
#[derive(Clone, Debug)]
pub struct TransportSolution<S: ClScalar> {
    pub s: MultivectorField<S>,
    pub method: &'static str,
    /// Max relative deviation when re-transporting sampled nodes along a
    /// permuted-axis staircase (0 when only one path exists).
    pub path_independence_residual: f64,
}

/// A strategy solving d_mu S = C_mu S on the grid.
pub trait TransportMethod<S: ClScalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(
        &self,
        conn: &ConnectionField<S>,
        s0: &Multivector<S>,
        opts: &TransportOptions,
    ) -> Result<TransportSolution<S>, TransportError>;
}

/// Named registry of transport methods.
pub struct TransportRegistry<S: ClScalar> {
    methods: BTreeMap<&'static str, Arc<dyn TransportMethod<S>>>,
}

impl<S: ClScalar> Default for TransportRegistry<S> {
    fn default() -> Self {
        let mut reg = TransportRegistry {
            methods: BTreeMap::new(),
        };
        reg.register(Arc::new(OdeLineMethod));
        reg.register(Arc::new(PotentialMethod));
        reg.register(Arc::new(PathOrderedMethod));
        reg
    }
}

impl<S: ClScalar> TransportRegistry<S> {
    pub fn register(&mut self, method: Arc<dyn TransportMethod<S>>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn TransportMethod<S>>, TransportError> {
        self.methods
            .get(name)
            .cloned()
            .ok_or_else(|| TransportError::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

/// Cubic interpolation of the value at the middle of the interval [i, i+1]
/// on a line of `len` samples; falls back to the plain average on very short
/// lines.
fn interval_midpoint<S: ClScalar>(
    value: &dyn Fn(usize) -> Multivector<S>,
    i: usize,
    len: usize,
) -> Multivector<S> {
    if len < 4 {
        return (&value(i) + &value(i + 1)).scale(0.5);
    }
    let (start, w) = if i == 0 {
        (0usize, [5.0, 15.0, -5.0, 1.0])
    } else if i + 2 >= len {
        (len - 4, [1.0, -5.0, 15.0, 5.0])
    } else {
        (i - 1, [-1.0, 9.0, 9.0, -1.0])
    };
    let mut acc = value(start).scale(w[0] / 16.0);
    for j in 1..4 {
        acc += &value(start + j).scale(w[j] / 16.0);
    }
    acc
}

/// Classical 4th-order integration of dS/dx = C_1(x) S on a 1-D grid.
/// Midpoint samples come from cubic interpolation of the node values.
pub fn solve_ode_line<S: ClScalar>(
    conn: &ConnectionField<S>,
    s0: &Multivector<S>,
) -> Result<MultivectorField<S>, TransportError> {
    let grid = conn.grid();
    if grid.r() != 1 {
        return Err(TransportError::Unsupported {
            method: "ode-r1".into(),
            reason: format!("needs r = 1, got r = {}", grid.r()),
        });
    }
    let len = grid.shape[0];
    let h = grid.spacing[0];
    let c = |i: usize| conn.comp_at(i, 1).clone();
    let mut data: Vec<Multivector<S>> = Vec::with_capacity(len);
    data.push(s0.clone());
    for i in 0..len - 1 {
        let s = &data[i];
        let c_i = c(i);
        let c_mid = interval_midpoint(&c, i, len);
        let c_next = c(i + 1);
        let k1 = c_i.geometric_product(s);
        let k2 = c_mid.geometric_product(&(s + &k1.scale(0.5 * h)));
        let k3 = c_mid.geometric_product(&(s + &k2.scale(0.5 * h)));
        let k4 = c_next.geometric_product(&(s + &k3.scale(h)));
        let mut step = k1;
        step += &k2.scale(2.0);
        step += &k3.scale(2.0);
        step += &k4;
        data.push(s + &step.scale(h / 6.0));
    }
    for (node, s) in data.iter().enumerate() {
        if s.inverse().is_err() {
            return Err(TransportError::SingularityDetected { node });
        }
    }
    Ok(MultivectorField::new(grid.clone(), conn.signature(), data)
        .expect("line data length matches grid"))
}

/// Walk a staircase through the grid from `base`, visiting axes in
/// `axis_order`, applying `step(cur, next, axis, forward)` to propagate a
/// value from a filled node to its neighbor.
fn staircase_sweep<S: ClScalar>(
    conn: &ConnectionField<S>,
    base: usize,
    seed_value: Multivector<S>,
    axis_order: &[usize],
    step: impl Fn(&Multivector<S>, usize, usize, usize, bool) -> Multivector<S>,
) -> Vec<Multivector<S>> {
    let grid = conn.grid();
    let count = grid.node_count();
    let mut out: Vec<Option<Multivector<S>>> = vec![None; count];
    out[base] = Some(seed_value);
    let mut filled: Vec<usize> = vec![base];
    for &axis in axis_order {
        let stride = grid.stride(axis);
        let len = grid.shape[axis];
        let mut new_nodes = Vec::new();
        for &start in &filled {
            let k0 = grid.multi(start)[axis];
            let mut cur = start;
            for _ in k0 + 1..len {
                let next = cur + stride;
                let value = step(out[cur].as_ref().unwrap(), cur, next, axis, true);
                out[next] = Some(value);
                new_nodes.push(next);
                cur = next;
            }
            cur = start;
            for _ in 0..k0 {
                let next = cur - stride;
                let value = step(out[cur].as_ref().unwrap(), cur, next, axis, false);
                out[next] = Some(value);
                new_nodes.push(next);
                cur = next;
            }
        }
        filled.extend(new_nodes);
    }
    out.into_iter()
        .map(|v| v.expect("staircase sweep covers every node"))
        .collect()
}

/// C_mu interpolated at the midpoint between two adjacent nodes along `axis`.
fn midpoint_component<S: ClScalar>(
    conn: &ConnectionField<S>,
    lo: usize,
    axis: usize,
) -> Multivector<S> {
    let grid = conn.grid();
    let stride = grid.stride(axis);
    let len = grid.shape[axis];
    let k = grid.multi(lo)[axis];
    let line_base = lo - k * stride;
    let value = |j: usize| conn.comp_at(line_base + j * stride, axis + 1).clone();
    interval_midpoint(&value, k, len)
}

/// Max asymmetry |d_mu C_nu - d_nu C_mu| over nodes and pairs, plus the
/// derivative scale it should be compared against.
pub fn closedness_asymmetry<S: ClScalar>(
    conn: &ConnectionField<S>,
) -> Result<(f64, f64), TransportError> {
    let grid = conn.grid();
    let r = grid.r();
    if r < 2 {
        return Ok((0.0, 1.0));
    }
    let derivs: Vec<ConnectionField<S>> = (0..r)
        .map(|axis| conn.derivative(axis))
        .collect::<Result<_, _>>()?;
    let mut max_asym = 0.0f64;
    let mut scale = 0.0f64;
    for node in 0..grid.node_count() {
        for mu in 1..=r {
            for nu in (mu + 1)..=r {
                let a = derivs[mu - 1].comp_at(node, nu);
                let b = derivs[nu - 1].comp_at(node, mu);
                max_asym = max_asym.max((a - b).norm());
                scale = scale.max(a.norm()).max(b.norm());
            }
        }
    }
    Ok((max_asym, scale.max(1.0)))
}

/// Integrate the 1-form C_mu dx^mu into a potential field along axis-ordered
/// staircases from the grid origin. Requires closedness; verifies path
/// independence on sampled nodes along the reversed axis order.
pub fn find_potential<S: ClScalar>(
    conn: &ConnectionField<S>,
    opts: &TransportOptions,
) -> Result<(MultivectorField<S>, f64), TransportError> {
    let grid = conn.grid();
    let (asym, scale) = closedness_asymmetry(conn)?;
    if asym > opts.tol_closed * scale {
        return Err(TransportError::NotClosed {
            max_asymmetry: asym,
            tol: opts.tol_closed * scale,
        });
    }
    let segment = |pot: &Multivector<S>, cur: usize, next: usize, axis: usize, forward: bool| {
        let h = grid.spacing[axis];
        let (lo, hi) = if forward { (cur, next) } else { (next, cur) };
        let mid = midpoint_component(conn, lo, axis);
        let mut integral = conn.comp_at(lo, axis + 1).clone();
        integral += &mid.scale(4.0);
        integral += conn.comp_at(hi, axis + 1);
        let integral = integral.scale(h / 6.0);
        if forward {
            pot + &integral
        } else {
            pot - &integral
        }
    };
    let sig = conn.signature();
    let order: Vec<usize> = (0..grid.r()).collect();
    let data = staircase_sweep(conn, 0, Multivector::zero(sig), &order, segment);

    // verify path independence of the integral on sampled nodes
    let mut residual = 0.0f64;
    if grid.r() > 1 {
        let rev: Vec<usize> = (0..grid.r()).rev().collect();
        let alt = staircase_sweep(conn, 0, Multivector::zero(sig), &rev, segment);
        for node in sample_nodes(grid.node_count(), opts) {
            let d = (&data[node] - &alt[node]).norm();
            residual = residual.max(d / data[node].norm().max(1.0));
        }
    }
    let field = MultivectorField::new(grid.clone(), sig, data).expect("sweep covers grid");
    Ok((field, residual))
}

/// S(x) = exp(C(x) - C(base)) * s0 from a potential field.
pub fn transport_potential<S: ClScalar>(
    potential: &MultivectorField<S>,
    s0: &Multivector<S>,
    base: usize,
) -> MultivectorField<S> {
    let offset = potential.at(base).clone();
    MultivectorField::from_fn(potential.grid().clone(), potential.signature(), |node| {
        (potential.at(node) - &offset).exp().geometric_product(s0)
    })
}

fn sample_nodes(count: usize, opts: &TransportOptions) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut all: Vec<usize> = (0..count).collect();
    all.shuffle(&mut rng);
    let mut picked: Vec<usize> = all.into_iter().take(opts.path_samples).collect();
    if !picked.contains(&(count - 1)) {
        picked.push(count - 1);
    }
    picked.sort_unstable();
    picked
}

/// Ordered product of midpoint exponentials along axis-ordered staircase
/// paths from `base`. Path independence is measured by re-transporting a
/// sample of nodes along the reversed axis order.
pub fn transport_path_ordered<S: ClScalar>(
    conn: &ConnectionField<S>,
    base: usize,
    s0: &Multivector<S>,
    opts: &TransportOptions,
) -> Result<(MultivectorField<S>, f64), TransportError> {
    let grid = conn.grid();
    let step = |s: &Multivector<S>, cur: usize, next: usize, axis: usize, forward: bool| {
        let h = grid.spacing[axis];
        let lo = if forward { cur } else { next };
        let avg = (conn.comp_at(lo, axis + 1) + conn.comp_at(lo + grid.stride(axis), axis + 1))
            .scale(0.5);
        let sign = if forward { 1.0 } else { -1.0 };
        avg.scale(sign * h).exp().geometric_product(s)
    };
    let order: Vec<usize> = (0..grid.r()).collect();
    let data = staircase_sweep(conn, base, s0.clone(), &order, step);

    let mut residual = 0.0f64;
    if grid.r() > 1 {
        let rev: Vec<usize> = (0..grid.r()).rev().collect();
        let alt = staircase_sweep(conn, base, s0.clone(), &rev, step);
        for node in sample_nodes(grid.node_count(), opts) {
            let d = (&data[node] - &alt[node]).norm();
            residual = residual.max(d / data[node].norm().max(1.0));
        }
        if residual > opts.tol_path {
            return Err(TransportError::PathDependent {
                residual,
                tol: opts.tol_path,
            });
        }
    }
    for (node, s) in data.iter().enumerate() {
        if !s.is_finite() {
            return Err(TransportError::SingularityDetected { node });
        }
    }
    let field = MultivectorField::new(grid.clone(), conn.signature(), data).expect("sweep");
    Ok((field, residual))
}

/// Max over nodes and axes of |D_mu S - C_mu S| with the grid stencils.
pub fn transport_equation_residual<S: ClScalar>(
    s_field: &MultivectorField<S>,
    conn: &ConnectionField<S>,
) -> Result<f64, TransportError> {
    let grid = s_field.grid();
    let mut worst = 0.0f64;
    for axis in 0..grid.r() {
        let ds = s_field.derivative(axis)?;
        let per_axis = (0..grid.node_count())
            .into_par_iter()
            .map(|node| {
                (ds.at(node) - &conn.comp_at(node, axis + 1).geometric_product(s_field.at(node)))
                    .norm()
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(per_axis);
    }
    Ok(worst)
}

/// One-dimensional ODE strategy.
#[derive(Clone, Copy, Debug, Default)]
pub struct OdeLineMethod;

impl<S: ClScalar> TransportMethod<S> for OdeLineMethod {
    fn name(&self) -> &'static str {
        "ode-r1"
    }

    fn solve(
        &self,
        conn: &ConnectionField<S>,
        s0: &Multivector<S>,
        opts: &TransportOptions,
    ) -> Result<TransportSolution<S>, TransportError> {
        if opts.base != 0 {
            return Err(TransportError::Unsupported {
                method: "ode-r1".into(),
                reason: "integration starts at the first grid node".into(),
            });
        }
        let s = solve_ode_line(conn, s0)?;
        Ok(TransportSolution {
            s,
            method: "ode-r1",
            path_independence_residual: 0.0,
        })
    }
}

/// Potential + exponential strategy for closed, commuting connections.
#[derive(Clone, Copy, Debug, Default)]
pub struct PotentialMethod;

impl<S: ClScalar> TransportMethod<S> for PotentialMethod {
    fn name(&self) -> &'static str {
        "potential"
    }

    fn solve(
        &self,
        conn: &ConnectionField<S>,
        s0: &Multivector<S>,
        opts: &TransportOptions,
    ) -> Result<TransportSolution<S>, TransportError> {
        let (potential, residual) = find_potential(conn, opts)?;
        // exp(C(x)) solves the system only when the potential commutes with
        // the connection components; verified here so the auto route can
        // fall back to path ordering.
        let grid = conn.grid();
        let mut worst = 0.0f64;
        for node in sample_nodes(grid.node_count(), opts) {
            for mu in 1..=grid.r() {
                let c = conn.comp_at(node, mu);
                let bracket = potential.at(node).commutator(c).norm();
                worst = worst.max(bracket / (potential.at(node).norm() * c.norm()).max(1e-30));
            }
        }
        if worst > 1e-6 {
            return Err(TransportError::Unsupported {
                method: "potential".into(),
                reason: format!(
                    "potential does not commute with the connection (rel. bracket {worst:.3e})"
                ),
            });
        }
        Ok(TransportSolution {
            s: transport_potential(&potential, s0, opts.base),
            method: "potential",
            path_independence_residual: residual,
        })
    }
}

/// Path-ordered product strategy.
#[derive(Clone, Copy, Debug, Default)]
pub struct PathOrderedMethod;

impl<S: ClScalar> TransportMethod<S> for PathOrderedMethod {
    fn name(&self) -> &'static str {
        "path-ordered"
    }

    fn solve(
        &self,
        conn: &ConnectionField<S>,
        s0: &Multivector<S>,
        opts: &TransportOptions,
    ) -> Result<TransportSolution<S>, TransportError> {
        let (s, residual) = transport_path_ordered(conn, opts.base, s0, opts)?;
        Ok(TransportSolution {
            s,
            method: "path-ordered",
            path_independence_residual: residual,
        })
    }
}

/// Diagnostics accumulated by `solve_global`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportDiagnostics {
    pub method: String,
    /// Why the auto selection fell back from the potential route, if it did.
    pub fallback: Option<String>,
    pub max_curvature: f64,
    pub closedness_asymmetry: f64,
    pub path_independence_residual: f64,
    /// Max deviation of S^{-1} h^a S from its node average.
    pub constancy_residual: f64,
    /// Max over generators of the stddev of S^{-1} h^a S across nodes.
    pub constancy_stddev: f64,
    /// Max node-to-node variation of h^{1..n} (odd n only, else 0).
    pub pseudoscalar_constancy: f64,
    /// Max over nodes and generators of the final relation defect.
    pub final_residual: f64,
}

/// Full output of the global pipeline.
#[derive(Clone, Debug)]
pub struct TransportResult<S: ClScalar> {
    pub s: MultivectorField<S>,
    pub k: Multivector<S>,
    pub t: MultivectorField<S>,
    pub case: IntertwinerCase<S>,
    pub connection: ConnectionField<S>,
    pub diagnostics: TransportDiagnostics,
}

/// The global pipeline: connection, curvature, transport, constancy,
/// algebraic intertwiner, final residual.
pub fn solve_global<S: ClScalar>(
    frame: &FrameField<S>,
    method: Option<&str>,
    opts: &TransportOptions,
) -> Result<TransportResult<S>, TransportError> {
    let grid = frame.grid().clone();
    let sig = frame.signature();
    let n = sig.n();

    // (i) connection of general form
    let conn = GeneralScheme
        .compute(frame)
        .map_err(|e| TransportError::stage("connection", e))?;

    // (ii) curvature and closedness diagnostics
    let max_curvature = if grid.r() >= 2 {
        curvature(&conn)
            .map_err(|e| TransportError::stage("curvature", e))?
            .max_norm(0)
    } else {
        0.0
    };
    let (asym, asym_scale) = closedness_asymmetry(&conn)?;

    // (iii) transport with auto fallback potential -> path-ordered
    let registry = TransportRegistry::<S>::default();
    let s0 = Multivector::identity(sig);
    let mut fallback = None;
    let solution = match method {
        Some(name) => registry.get(name)?.solve(&conn, &s0, opts)?,
        None if grid.r() == 1 => registry.get("ode-r1")?.solve(&conn, &s0, opts)?,
        None => match registry.get("potential")?.solve(&conn, &s0, opts) {
            Ok(sol) => sol,
            Err(TransportError::NotClosed { .. }) | Err(TransportError::Unsupported { .. }) => {
                let reason = format!(
                    "connection not closed/commuting (asymmetry {asym:.3e} vs scale {asym_scale:.3e}); using path ordering"
                );
                fallback = Some(reason);
                registry.get("path-ordered")?.solve(&conn, &s0, opts)?
            }
            Err(e) => return Err(e),
        },
    };
    let s_field = &solution.s;

    // (iv) f^a = S^{-1} h^a S, node average and spread
    let count = grid.node_count();
    let per_node: Vec<Result<Vec<Multivector<S>>, TransportError>> = (0..count)
        .into_par_iter()
        .map(|node| {
            let s = s_field.at(node);
            let s_inv = s
                .inverse()
                .map_err(|_| TransportError::SingularityDetected { node })?;
            Ok((1..=n)
                .map(|a| {
                    s_inv
                        .geometric_product(frame.gen_at(node, a))
                        .geometric_product(s)
                })
                .collect())
        })
        .collect();
    let mut f_nodes: Vec<Vec<Multivector<S>>> = Vec::with_capacity(count);
    for f in per_node {
        f_nodes.push(f?);
    }
    let mut f_mean: Vec<Multivector<S>> = (0..n).map(|_| Multivector::zero(sig)).collect();
    for f in &f_nodes {
        for (mean, value) in f_mean.iter_mut().zip(f) {
            *mean += value;
        }
    }
    for mean in &mut f_mean {
        *mean = mean.scale(1.0 / count as f64);
    }
    let mut constancy_residual = 0.0f64;
    let mut constancy_stddev = 0.0f64;
    for a in 0..n {
        let mut sq_sum = 0.0f64;
        for f in &f_nodes {
            let d = (&f[a] - &f_mean[a]).norm();
            constancy_residual = constancy_residual.max(d);
            sq_sum += d * d;
        }
        constancy_stddev = constancy_stddev.max((sq_sum / count as f64).sqrt());
    }

    let pseudoscalar_constancy = if n % 2 == 1 {
        let base_ps = frame.set_at(opts.base.min(count - 1)).pseudo_product();
        (0..count)
            .into_par_iter()
            .map(|node| (&frame.set_at(node).pseudo_product() - &base_ps).norm())
            .reduce(|| 0.0, f64::max)
    } else {
        0.0
    };

    // (v) algebraic intertwiner of the averaged constant set
    let f_set = GeneratorSet::new(sig, f_mean);
    let tol_k = opts.tol_algebraic.max(10.0 * constancy_residual);
    let k_result =
        intertwiner_to_standard(&f_set, tol_k).map_err(|e| TransportError::stage("intertwiner", e))?;
    let k = k_result.t.clone();
    let case = k_result.case.clone();

    // (vi) T = S K and the final relation residual
    let t_field = MultivectorField::from_fn(grid.clone(), sig, |node| {
        s_field.at(node).geometric_product(&k)
    });
    let standard = GeneratorSet::standard(sig);
    let final_residual = (0..count)
        .into_par_iter()
        .map(|node| {
            let t = t_field.at(node);
            let t_inv = match t.inverse() {
                Ok(inv) => inv,
                Err(_) => return f64::INFINITY,
            };
            let mut worst = 0.0f64;
            for a in 1..=n {
                let mut conj = t_inv
                    .geometric_product(frame.gen_at(node, a))
                    .geometric_product(t);
                if let IntertwinerCase::Odd { factor, .. } = &case {
                    conj = factor.geometric_product(&conj);
                }
                worst = worst.max((&conj - standard.gen(a)).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    Ok(TransportResult {
        s: solution.s.clone(),
        k,
        t: t_field,
        case,
        connection: conn,
        diagnostics: TransportDiagnostics {
            method: solution.method.to_string(),
            fallback,
            max_curvature,
            closedness_asymmetry: asym,
            path_independence_residual: solution.path_independence_residual,
            constancy_residual,
            constancy_stddev,
            pseudoscalar_constancy,
            final_residual,
        },
    })
}
