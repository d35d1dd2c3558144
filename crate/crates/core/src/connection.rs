//! Spin connections of frame fields, curvature, field-equation residuals and
//! gauge transforms.
//!
//! Two interchangeable schemes compute the connection, both behind the
//! [`ConnectionScheme`] trait and selectable by name from a
//! [`ConnectionRegistry`]:
//!
//! * `general` — C_mu = sum_k mu_k pi[h]_k((d_mu h^a) h_a), valid for any
//!   frame whose blade products span the algebra;
//! * `grade1` — C_mu = (1/4)(d_mu h^a) h_a, the classical spin connection,
//!   valid for grade-1 frames.
//!
//! Connection components are defined modulo the center, so both schemes
//! return center-quotiented values.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::blade;
use crate::error::{AlgebraError, FieldError};
use crate::fields::{ConnectionField, FrameField, MultivectorField};
use crate::generators::{lowered, GeneratorSet};
use crate::grid::Grid;
use crate::linalg::LuFactors;
use crate::multivector::Multivector;
use crate::scalar::ClScalar;
use crate::signature::Signature;

/// mu_k = 1 / (n - (-1)^k (n - 2k)), evaluated from the exact integer
/// denominator: 2k for even k, 2(n-k) for odd k.
pub fn mu_coefficient(n: usize, k: usize) -> Result<f64, AlgebraError> {
    let (num, den) = mu_coefficient_rational(n, k)?;
    Ok(num as f64 / den as f64)
}

/// The exact rational (numerator, denominator) of mu_k.
pub fn mu_coefficient_rational(n: usize, k: usize) -> Result<(i64, i64), AlgebraError> {
    if n < 1 || k < 1 || k > 2 * (n / 2) {
        return Err(AlgebraError::MuIndexOutOfRange { n, k });
    }
    let den = if k % 2 == 0 {
        2 * k as i64
    } else {
        2 * (n as i64 - k as i64)
    };
    Ok((1, den))
}

/// Change of basis between blade coefficients and the h-blade basis at one
/// point, factored once and reused for every projection at that point.
pub struct HBasis<S: ClScalar> {
    sig: Signature,
    /// column A of the matrix holds the coefficients of h^A
    matrix: Vec<S>,
    lu: LuFactors<S>,
}

impl<S: ClScalar> HBasis<S> {
    /// Build from a generator set. Fails when the 2^n blade products are
    /// numerically dependent (possible for odd n when the trace condition
    /// fails and the set only spans a lower-dimensional algebra).
    pub fn build(set: &GeneratorSet<S>) -> Result<Self, AlgebraError> {
        let sig = set.signature();
        let dim = sig.dim();
        let products = set.blade_products();
        let mut matrix = vec![S::zero(); dim * dim];
        for (col, h) in products.iter().enumerate() {
            for row in 0..dim {
                matrix[row * dim + col] = h.coeff(row);
            }
        }
        let lu = LuFactors::factor(matrix.clone(), dim)
            .map_err(|cond| AlgebraError::SingularElement { cond })?;
        let cond = lu.condition_estimate();
        if !cond.is_finite() || cond > 1e12 {
            return Err(AlgebraError::SingularElement { cond });
        }
        Ok(HBasis { sig, matrix, lu })
    }

    /// Coordinates of x in the h-blade basis.
    fn coordinates(&self, x: &Multivector<S>) -> Vec<S> {
        let mut c = x.coeffs().to_vec();
        self.lu.solve_in_place(&mut c);
        c
    }

    fn from_coordinates(&self, c: &[S]) -> Multivector<S> {
        let dim = self.sig.dim();
        let mut out = vec![S::zero(); dim];
        for (col, &coord) in c.iter().enumerate() {
            if coord == S::zero() {
                continue;
            }
            for row in 0..dim {
                let t = self.matrix[row * dim + col] * coord;
                out[row] += t;
            }
        }
        Multivector::from_coeffs(self.sig, out)
    }

    /// pi[h]_k: zero every h-blade coordinate whose multi-index length is
    /// not k, then map back.
    pub fn project(&self, x: &Multivector<S>, k: usize) -> Multivector<S> {
        let mut c = self.coordinates(x);
        for (a, coord) in c.iter_mut().enumerate() {
            if blade::grade(a) != k {
                *coord = S::zero();
            }
        }
        self.from_coordinates(&c)
    }

    /// sum_k w_k pi[h]_k(x) with one solve: scale each coordinate by the
    /// weight of its grade.
    pub fn weighted_project(&self, x: &Multivector<S>, weights: &[f64]) -> Multivector<S> {
        let mut c = self.coordinates(x);
        for (a, coord) in c.iter_mut().enumerate() {
            *coord = coord.scale(weights[blade::grade(a)]);
        }
        self.from_coordinates(&c)
    }
}

/// A strategy computing the connection of a frame field.
pub trait ConnectionScheme<S: ClScalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn compute(&self, frame: &FrameField<S>) -> Result<ConnectionField<S>, FieldError>;
}

/// The general-form connection, valid for any frame with independent blade
/// products.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneralScheme;

/// The grade-1 specialization C_mu = (1/4)(d_mu h^a) h_a.
#[derive(Clone, Copy, Debug)]
pub struct Grade1Scheme {
    /// Largest tolerated off-grade-1 component in the input frame.
    pub grade_tol: f64,
}

impl Default for Grade1Scheme {
    fn default() -> Self {
        Grade1Scheme { grade_tol: 1e-9 }
    }
}

fn frame_derivatives<S: ClScalar>(
    frame: &FrameField<S>,
) -> Result<Vec<FrameField<S>>, FieldError> {
    (0..frame.grid().r()).map(|axis| frame.derivative(axis)).collect()
}

/// D_mu = sum_a (d_mu h^a) h_a at one node (index lowered by eta).
fn lowered_contraction<S: ClScalar>(
    frame: &FrameField<S>,
    derivs: &[FrameField<S>],
    node: usize,
    mu: usize,
) -> Multivector<S> {
    let sig = frame.signature();
    let set = frame.set_at(node);
    let mut d = Multivector::zero(sig);
    for a in 1..=sig.n() {
        let dh = derivs[mu - 1].gen_at(node, a);
        d += &dh.geometric_product(&lowered(&set, a));
    }
    d
}

impl<S: ClScalar> ConnectionScheme<S> for GeneralScheme {
    fn name(&self) -> &'static str {
        "general"
    }

    fn compute(&self, frame: &FrameField<S>) -> Result<ConnectionField<S>, FieldError> {
        let grid = frame.grid().clone();
        let sig = frame.signature();
        let n = sig.n();
        let r = grid.r();
        let derivs = frame_derivatives(frame)?;
        let mut weights = vec![0.0; n + 1];
        for k in 1..=2 * (n / 2) {
            weights[k] = mu_coefficient(n, k)?;
        }
        let per_node: Vec<Result<Vec<Multivector<S>>, FieldError>> = (0..grid.node_count())
            .into_par_iter()
            .map(|node| {
                let basis = HBasis::build(&frame.set_at(node))
                    .map_err(|_| FieldError::DegenerateHBasis { node })?;
                let comps = (1..=r)
                    .map(|mu| {
                        let d = lowered_contraction(frame, &derivs, node, mu);
                        basis.weighted_project(&d, &weights).center_quotient()
                    })
                    .collect();
                Ok(comps)
            })
            .collect();
        let mut data = Vec::with_capacity(grid.node_count() * r);
        for comps in per_node {
            data.extend(comps?);
        }
        ConnectionField::new(grid, sig, data)
    }
}

impl<S: ClScalar> ConnectionScheme<S> for Grade1Scheme {
    fn name(&self) -> &'static str {
        "grade1"
    }

    fn compute(&self, frame: &FrameField<S>) -> Result<ConnectionField<S>, FieldError> {
        let grid = frame.grid().clone();
        let sig = frame.signature();
        let r = grid.r();
        // every generator must be grade-1 valued
        for node in 0..grid.node_count() {
            for a in 1..=sig.n() {
                let h = frame.gen_at(node, a);
                let off = (h - &h.grade_project(1)).norm();
                if off > self.grade_tol {
                    return Err(FieldError::NotGrade1 {
                        node,
                        residual: off,
                    });
                }
            }
        }
        let derivs = frame_derivatives(frame)?;
        let data: Vec<Multivector<S>> = (0..grid.node_count() * r)
            .into_par_iter()
            .map(|flat| {
                let node = flat / r;
                let mu = flat % r + 1;
                lowered_contraction(frame, &derivs, node, mu)
                    .scale(0.25)
                    .center_quotient()
            })
            .collect();
        ConnectionField::new(grid, sig, data)
    }
}

/// Named registry of connection schemes.
pub struct ConnectionRegistry<S: ClScalar> {
    schemes: BTreeMap<&'static str, Arc<dyn ConnectionScheme<S>>>,
}

impl<S: ClScalar> Default for ConnectionRegistry<S> {
    fn default() -> Self {
        let mut reg = ConnectionRegistry {
            schemes: BTreeMap::new(),
        };
        reg.register(Arc::new(GeneralScheme));
        reg.register(Arc::new(Grade1Scheme::default()));
        reg
    }
}

impl<S: ClScalar> ConnectionRegistry<S> {
    pub fn register(&mut self, scheme: Arc<dyn ConnectionScheme<S>>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ConnectionScheme<S>>> {
        self.schemes.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.keys().copied().collect()
    }
}

/// Per-node residual of the field equation d_mu h^a - [C_mu, h^a] = 0:
/// max over a and mu of the defect norm.
pub fn field_equation_residual<S: ClScalar>(
    frame: &FrameField<S>,
    conn: &ConnectionField<S>,
) -> Result<Vec<f64>, FieldError> {
    if frame.grid() != conn.grid() || frame.signature() != conn.signature() {
        return Err(FieldError::ShapeMismatch(
            "frame and connection must share grid and signature".into(),
        ));
    }
    let grid = frame.grid();
    let sig = frame.signature();
    let derivs = frame_derivatives(frame)?;
    Ok((0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let mut worst = 0.0f64;
            for mu in 1..=grid.r() {
                let c = conn.comp_at(node, mu);
                for a in 1..=sig.n() {
                    let defect = (derivs[mu - 1].gen_at(node, a)
                        - &c.commutator(frame.gen_at(node, a)))
                        .norm();
                    worst = worst.max(defect);
                }
            }
            worst
        })
        .collect())
}

/// The curvature two-form R_{mu nu} = d_mu C_nu - d_nu C_mu - [C_mu, C_nu]
/// for all axis pairs mu < nu.
#[derive(Clone, Debug)]
pub struct CurvatureField<S: ClScalar> {
    grid: Grid,
    pairs: Vec<(usize, usize)>,
    data: Vec<Multivector<S>>,
}

impl<S: ClScalar> CurvatureField<S> {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn at(&self, node: usize, pair: usize) -> &Multivector<S> {
        &self.data[node * self.pairs.len() + pair]
    }

    /// Largest curvature norm over nodes at least `depth` from the boundary
    /// (0 = all nodes).
    pub fn max_norm(&self, depth: usize) -> f64 {
        let npairs = self.pairs.len();
        (0..self.grid.node_count())
            .filter(|&n| self.grid.is_interior(n, depth))
            .flat_map(|n| (0..npairs).map(move |p| (n, p)))
            .map(|(n, p)| self.at(n, p).norm())
            .fold(0.0, f64::max)
    }
}

pub fn curvature<S: ClScalar>(
    conn: &ConnectionField<S>,
) -> Result<CurvatureField<S>, FieldError> {
    let grid = conn.grid().clone();
    let r = grid.r();
    let derivs: Vec<ConnectionField<S>> = (0..r)
        .map(|axis| conn.derivative(axis))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, usize)> = (1..=r)
        .flat_map(|mu| ((mu + 1)..=r).map(move |nu| (mu, nu)))
        .collect();
    let npairs = pairs.len();
    let data: Vec<Multivector<S>> = (0..grid.node_count() * npairs)
        .into_par_iter()
        .map(|flat| {
            let node = flat / npairs;
            let (mu, nu) = pairs[flat % npairs];
            let d_mu_c_nu = derivs[mu - 1].comp_at(node, nu);
            let d_nu_c_mu = derivs[nu - 1].comp_at(node, mu);
            let bracket = conn.comp_at(node, mu).commutator(conn.comp_at(node, nu));
            &(d_mu_c_nu - d_nu_c_mu) - &bracket
        })
        .collect();
    Ok(CurvatureField { grid, pairs, data })
}

/// Gauge-transformed pair h' = S^{-1} h S, C' = S^{-1} C S - S^{-1} dS,
/// plus the largest central component of S^{-1} d_mu S (reported, not
/// enforced).
pub fn gauge_transform<S: ClScalar>(
    frame: &FrameField<S>,
    conn: &ConnectionField<S>,
    s_field: &MultivectorField<S>,
) -> Result<(FrameField<S>, ConnectionField<S>, f64), FieldError> {
    let grid = frame.grid().clone();
    let sig = frame.signature();
    if conn.grid() != &grid || s_field.grid() != &grid {
        return Err(FieldError::ShapeMismatch(
            "gauge transform needs matching grids".into(),
        ));
    }
    let r = grid.r();
    let n = sig.n();
    let s_derivs: Vec<MultivectorField<S>> = (0..r)
        .map(|axis| s_field.derivative(axis))
        .collect::<Result<_, _>>()?;

    struct NodeOut<S: ClScalar> {
        gens: Vec<Multivector<S>>,
        comps: Vec<Multivector<S>>,
        center_norm: f64,
    }

    let per_node: Vec<Result<NodeOut<S>, FieldError>> = (0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let s = s_field.at(node);
            let s_inv = s
                .inverse()
                .map_err(|_| FieldError::SingularAtNode { node })?;
            let gens = (1..=n)
                .map(|a| {
                    s_inv
                        .geometric_product(frame.gen_at(node, a))
                        .geometric_product(s)
                })
                .collect();
            let mut center_norm = 0.0f64;
            let comps = (1..=r)
                .map(|mu| {
                    let homogeneous = s_inv
                        .geometric_product(conn.comp_at(node, mu))
                        .geometric_product(s);
                    let inhomogeneous = s_inv.geometric_product(s_derivs[mu - 1].at(node));
                    center_norm = center_norm.max(inhomogeneous.center_project().norm());
                    &homogeneous - &inhomogeneous
                })
                .collect();
            Ok(NodeOut {
                gens,
                comps,
                center_norm,
            })
        })
        .collect();

    let mut gens = Vec::with_capacity(grid.node_count() * n);
    let mut comps = Vec::with_capacity(grid.node_count() * r);
    let mut max_center = 0.0f64;
    for out in per_node {
        let out = out?;
        gens.extend(out.gens);
        comps.extend(out.comps);
        max_center = max_center.max(out.center_norm);
    }
    Ok((
        FrameField::new(grid.clone(), sig, gens)?,
        ConnectionField::new(grid, sig, comps)?,
        max_center,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cl(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    /// Cl(2,0) or Cl(0,2) rotation frame h^1 = cos(phi)e^1 + sin(phi)e^2,
    /// h^2 = -sin(phi)e^1 + cos(phi)e^2.
    fn rotation_frame(
        sig: Signature,
        grid: &Grid,
        phi: impl Fn(&[f64]) -> f64 + Sync + Send,
    ) -> FrameField<f64> {
        FrameField::from_fn(grid.clone(), sig, move |node, a| {
            let p = phi(&grid.coords(node));
            let mut h = Multivector::zero(sig);
            match a {
                1 => {
                    h.set_coeff(0b01, p.cos());
                    h.set_coeff(0b10, p.sin());
                }
                _ => {
                    h.set_coeff(0b01, -p.sin());
                    h.set_coeff(0b10, p.cos());
                }
            }
            h
        })
    }

    fn boost_frame(grid: &Grid, phi: impl Fn(&[f64]) -> f64 + Sync + Send) -> FrameField<f64> {
        let sig = cl(1, 1);
        FrameField::from_fn(grid.clone(), sig, move |node, a| {
            let p = phi(&grid.coords(node));
            let mut h = Multivector::zero(sig);
            match a {
                1 => {
                    h.set_coeff(0b01, p.cosh());
                    h.set_coeff(0b10, p.sinh());
                }
                _ => {
                    h.set_coeff(0b01, p.sinh());
                    h.set_coeff(0b10, p.cosh());
                }
            }
            h
        })
    }

    fn test_grid() -> Grid {
        let len = 21usize;
        let h = 2.0 * std::f64::consts::PI / (len - 1) as f64;
        Grid::new(vec![len, len], vec![0.0, 0.0], vec![h, h]).unwrap()
    }

    fn phi_field(x: &[f64]) -> f64 {
        f64::sin(x[0]) * f64::cos(x[1])
    }

    fn dphi(x: &[f64], mu: usize) -> f64 {
        match mu {
            1 => f64::cos(x[0]) * f64::cos(x[1]),
            _ => -f64::sin(x[0]) * f64::sin(x[1]),
        }
    }

    #[test]
    fn mu_coefficients_pinned_and_formula() {
        assert_eq!(mu_coefficient(2, 1).unwrap(), 0.5);
        assert_eq!(mu_coefficient(2, 2).unwrap(), 0.25);
        assert_eq!(mu_coefficient(4, 1).unwrap(), 1.0 / 6.0);
        assert_eq!(mu_coefficient(4, 2).unwrap(), 0.25);
        for n in 2..=8usize {
            for k in 1..=2 * (n / 2) {
                let direct =
                    1.0 / (n as f64 - f64::powi(-1.0, k as i32) * (n as f64 - 2.0 * k as f64));
                assert_eq!(mu_coefficient(n, k).unwrap(), direct, "n={n} k={k}");
            }
            assert!(mu_coefficient(n, 0).is_err());
            assert!(mu_coefficient(n, 2 * (n / 2) + 1).is_err());
        }
    }

    #[test]
    fn hbasis_standard_reduces_to_grade_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sig = cl(2, 1);
        let set = GeneratorSet::<f64>::standard(sig);
        let basis = HBasis::build(&set).unwrap();
        let x = Multivector::from_coeffs(
            sig,
            (0..sig.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        );
        for k in 0..=sig.n() {
            assert!((&basis.project(&x, k) - &x.grade_project(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn hbasis_projects_own_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let sig = cl(3, 0);
        let p = loop {
            let cand = Multivector::from_coeffs(
                sig,
                (0..sig.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>(),
            );
            if let Ok(inv) = cand.inverse() {
                if cand.norm() * inv.norm() < 50.0 {
                    break cand;
                }
            }
        };
        let set = GeneratorSet::conjugated(&p).unwrap();
        let basis = HBasis::build(&set).unwrap();
        for a in 1..=sig.n() {
            let h = set.gen(a);
            assert!((&basis.project(h, 1) - h).norm() < 1e-10);
            assert!(basis.project(h, 0).norm() < 1e-10);
            assert!(basis.project(h, 2).norm() < 1e-10);
        }
        // conjugation maps blade bases: pi[h]_k(x) = P^{-1} <P x P^{-1}>_k P
        let x = Multivector::from_coeffs(
            sig,
            (0..sig.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>(),
        );
        let p_inv = p.inverse().unwrap();
        for k in 0..=sig.n() {
            let direct = basis.project(&x, k);
            let conj = p
                .geometric_product(&x)
                .geometric_product(&p_inv)
                .grade_project(k);
            let expected = p_inv.geometric_product(&conj).geometric_product(&p);
            assert!((&direct - &expected).norm() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn degenerate_set_is_detected() {
        // h^1 = e in Cl(1,0) satisfies the relations but spans only scalars.
        let sig = cl(1, 0);
        let set = GeneratorSet::new(sig, vec![Multivector::<f64>::identity(sig)]);
        assert!(HBasis::build(&set).is_err());
    }

    #[test]
    fn constant_frame_has_zero_connection() {
        let grid = Grid::new(vec![6, 7], vec![0.0; 2], vec![0.2, 0.3]).unwrap();
        let sig = cl(2, 0);
        let frame = rotation_frame(sig, &grid, |_| 0.9);
        for scheme in ConnectionRegistry::<f64>::default().names() {
            let conn = ConnectionRegistry::default()
                .get(scheme)
                .unwrap()
                .compute(&frame)
                .unwrap();
            assert_eq!(conn.max_norm(), 0.0, "scheme {scheme}");
        }
    }

    #[test]
    fn rotation_connection_matches_closed_form() {
        let grid = test_grid();
        let sig = cl(2, 0);
        let frame = rotation_frame(sig, &grid, phi_field);
        let conn = GeneralScheme.compute(&frame).unwrap();
        let mut worst_interior = 0.0f64;
        for node in 0..grid.node_count() {
            if !grid.is_interior(node, crate::fields::STENCIL_DEPTH) {
                continue;
            }
            let x = grid.coords(node);
            for mu in 1..=2 {
                let mut expected = Multivector::<f64>::zero(sig);
                expected.set_coeff(0b11, -dphi(&x, mu) / 2.0);
                let d = (conn.comp_at(node, mu) - &expected).norm();
                worst_interior = worst_interior.max(d);
            }
        }
        // interior stencil error for this grid is ~1e-3 scale
        assert!(
            worst_interior < 5e-3,
            "interior deviation {worst_interior}"
        );
    }

    #[test]
    fn negative_definite_flips_connection_sign() {
        let grid = test_grid();
        let sig = cl(0, 2);
        let frame = rotation_frame(sig, &grid, phi_field);
        let conn = Grade1Scheme::default().compute(&frame).unwrap();
        for node in 0..grid.node_count() {
            if !grid.is_interior(node, crate::fields::STENCIL_DEPTH) {
                continue;
            }
            let x = grid.coords(node);
            for mu in 1..=2 {
                let mut expected = Multivector::<f64>::zero(sig);
                expected.set_coeff(0b11, dphi(&x, mu) / 2.0);
                assert!((conn.comp_at(node, mu) - &expected).norm() < 5e-3);
            }
        }
    }

    #[test]
    fn boost_connection_matches_closed_form() {
        let grid = Grid::new(vec![17, 17], vec![0.0; 2], vec![0.08, 0.08]).unwrap();
        let frame = boost_frame(&grid, |x| 0.6 * f64::sin(x[0]) + 0.4 * x[1]);
        let conn = Grade1Scheme::default().compute(&frame).unwrap();
        let dphi = |x: &[f64], mu: usize| -> f64 {
            match mu {
                1 => 0.6 * f64::cos(x[0]),
                _ => 0.4,
            }
        };
        for node in 0..grid.node_count() {
            if !grid.is_interior(node, crate::fields::STENCIL_DEPTH) {
                continue;
            }
            let x = grid.coords(node);
            for mu in 1..=2 {
                let mut expected = Multivector::<f64>::zero(cl(1, 1));
                expected.set_coeff(0b11, -dphi(&x, mu) / 2.0);
                assert!((conn.comp_at(node, mu) - &expected).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn schemes_agree_on_grade1_frames() {
        let grid = test_grid();
        let sig = cl(2, 0);
        let frame = rotation_frame(sig, &grid, phi_field);
        let general = GeneralScheme.compute(&frame).unwrap();
        let grade1 = Grade1Scheme::default().compute(&frame).unwrap();
        let mut worst = 0.0f64;
        for node in 0..grid.node_count() {
            for mu in 1..=2 {
                worst =
                    worst.max((general.comp_at(node, mu) - grade1.comp_at(node, mu)).norm());
            }
        }
        assert!(worst < 1e-9, "schemes differ by {worst}");
    }

    #[test]
    fn grade1_scheme_rejects_mixed_frames() {
        let grid = Grid::new(vec![5, 5], vec![0.0; 2], vec![0.1; 2]).unwrap();
        let sig = cl(2, 0);
        let frame = FrameField::from_fn(grid.clone(), sig, |_, a| {
            // rotor-conjugate of the standard frame by a constant mixed-grade
            // element would do, but an outright grade-0 pollution is simpler
            let mut h = Multivector::<f64>::generator(sig, a);
            h.set_coeff(0, 0.5);
            h
        });
        assert!(matches!(
            Grade1Scheme::default().compute(&frame),
            Err(FieldError::NotGrade1 { .. })
        ));
    }

    #[test]
    fn connection_is_center_free() {
        let grid = test_grid();
        let frame = rotation_frame(cl(2, 0), &grid, phi_field);
        let conn = GeneralScheme.compute(&frame).unwrap();
        for node in 0..grid.node_count() {
            for mu in 1..=2 {
                assert_eq!(conn.comp_at(node, mu).center_project().norm(), 0.0);
            }
        }
    }

    #[test]
    fn field_equation_residual_detects_wrong_connection() {
        let grid = test_grid();
        let sig = cl(2, 0);
        let frame = rotation_frame(sig, &grid, phi_field);
        let conn = GeneralScheme.compute(&frame).unwrap();
        let good = field_equation_residual(&frame, &conn).unwrap();
        let good_interior = good
            .iter()
            .enumerate()
            .filter(|(n, _)| grid.is_interior(*n, crate::fields::STENCIL_DEPTH))
            .fold(0.0f64, |m, (_, &v)| m.max(v));
        let good_max = good.iter().fold(0.0f64, |m, &v| m.max(v));
        assert!(good_interior < 5e-3, "interior residual {good_interior}");
        assert!(good_max < 0.1, "boundary residual {good_max}");

        // zero connection with a nonconstant phi: residual ~ |dphi|
        let zero = ConnectionField::from_fn(grid.clone(), sig, |_, _| Multivector::<f64>::zero(sig));
        let bad = field_equation_residual(&frame, &zero).unwrap();
        let bad_max = bad.iter().fold(0.0f64, |m, &v| m.max(v));
        assert!(bad_max > 0.5, "residual {bad_max}");
    }

    #[test]
    fn curvature_of_zero_connection_is_zero() {
        let grid = test_grid();
        let sig = cl(2, 0);
        let zero = ConnectionField::from_fn(grid.clone(), sig, |_, _| Multivector::<f64>::zero(sig));
        let r = curvature(&zero).unwrap();
        assert_eq!(r.max_norm(0), 0.0);
    }

    #[test]
    fn rotation_connection_is_flat_to_stencil_error() {
        let grid = test_grid();
        let frame = rotation_frame(cl(2, 0), &grid, phi_field);
        let conn = GeneralScheme.compute(&frame).unwrap();
        let r = curvature(&conn).unwrap();
        assert!(r.max_norm(crate::fields::STENCIL_DEPTH + 2) < 5e-3);
    }

    #[test]
    fn gauge_transform_identity_and_constant() {
        let grid = test_grid();
        let sig = cl(2, 0);
        let frame = rotation_frame(sig, &grid, phi_field);
        let conn = GeneralScheme.compute(&frame).unwrap();

        let identity = MultivectorField::constant(grid.clone(), Multivector::<f64>::identity(sig));
        let (h2, c2, center) = gauge_transform(&frame, &conn, &identity).unwrap();
        assert_eq!(center, 0.0);
        for node in 0..grid.node_count() {
            for a in 1..=2 {
                assert_eq!((h2.gen_at(node, a) - frame.gen_at(node, a)).norm(), 0.0);
            }
            for mu in 1..=2 {
                assert_eq!((c2.comp_at(node, mu) - conn.comp_at(node, mu)).norm(), 0.0);
            }
        }

        // constant S: inhomogeneous term vanishes exactly
        let s_const = &Multivector::<f64>::identity(sig).scale(0.8)
            + &Multivector::basis_blade(sig, 0b11).scale(0.3);
        let s_inv = s_const.inverse().unwrap();
        let s_field = MultivectorField::constant(grid.clone(), s_const.clone());
        let (_, c3, center) = gauge_transform(&frame, &conn, &s_field).unwrap();
        assert_eq!(center, 0.0);
        for node in 0..grid.node_count() {
            for mu in 1..=2 {
                let expected = s_inv
                    .geometric_product(conn.comp_at(node, mu))
                    .geometric_product(&s_const);
                assert!((c3.comp_at(node, mu) - &expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gauge_transform_generates_rotation_frame() {
        // S = exp((phi/2) e^{12}) applied to the constant standard frame
        // its connection -S^{-1} d_mu S = -(d_mu phi/2) e^{12}.
        let grid = test_grid();
        let sig = cl(2, 0);
        let standard = FrameField::from_fn(grid.clone(), sig, |_, a| {
            Multivector::<f64>::generator(sig, a)
        });
        let zero_conn = ConnectionField::from_fn(grid.clone(), sig, |_, _| Multivector::<f64>::zero(sig));
        let s_field = MultivectorField::from_fn(grid.clone(), sig, |node| {
            let p = phi_field(&grid.coords(node));
            Multivector::<f64>::basis_blade(sig, 0b11)
                .scale(p / 2.0)
                .exp()
        });
        let (h2, c2, _center) = gauge_transform(&standard, &zero_conn, &s_field).unwrap();

        let expected_frame = rotation_frame(sig, &grid, phi_field);
        let expected_conn = GeneralScheme.compute(&expected_frame).unwrap();
        let mut worst_h = 0.0f64;
        let mut worst_c = 0.0f64;
        for node in 0..grid.node_count() {
            if !grid.is_interior(node, crate::fields::STENCIL_DEPTH) {
                continue;
            }
            for a in 1..=2 {
                worst_h =
                    worst_h.max((h2.gen_at(node, a) - expected_frame.gen_at(node, a)).norm());
            }
            for mu in 1..=2 {
                worst_c =
                    worst_c.max((c2.comp_at(node, mu) - expected_conn.comp_at(node, mu)).norm());
            }
        }
        // frame matches exactly (pointwise algebra), connection to stencil error
        assert!(worst_h < 1e-12, "frame deviation {worst_h}");
        assert!(worst_c < 5e-3, "connection deviation {worst_c}");

        // residual of the transformed pair stays at discretization level
        let res = field_equation_residual(&h2, &c2).unwrap();
        let interior = res
            .iter()
            .enumerate()
            .filter(|(n, _)| grid.is_interior(*n, crate::fields::STENCIL_DEPTH))
            .fold(0.0f64, |m, (_, &v)| m.max(v));
        let max_res = res.iter().fold(0.0f64, |m, &v| m.max(v));
        assert!(interior < 5e-3, "gauge interior residual {interior}");
        assert!(max_res < 0.1, "gauge boundary residual {max_res}");
    }
}
