//! Shared builders for the integration and acceptance suites: analytic
//! trigonometric fields with exact derivative oracles, and frame families
//! built from them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use cliffield_core::fields::FrameField;
use cliffield_core::grid::Grid;
use cliffield_core::multivector::Multivector;
use cliffield_core::signature::Signature;

pub fn cl(p: usize, q: usize) -> Signature {
    Signature::new(p, q).unwrap()
}

/// Square grid of `len` nodes per axis spanning [0, span]^2.
pub fn square_grid(len: usize, span: f64) -> Grid {
    let h = span / (len - 1) as f64;
    Grid::new(vec![len, len], vec![0.0, 0.0], vec![h, h]).unwrap()
}

/// A smooth 2-D trigonometric polynomial with an exact gradient:
/// sum of amp * sin(k1 x1 + p1) * cos(k2 x2 + p2) terms.
#[derive(Clone, Debug)]
pub struct TrigPoly2 {
    terms: Vec<(f64, f64, f64, f64, f64)>,
}

impl TrigPoly2 {
    pub fn random(rng: &mut ChaCha8Rng, terms: usize, amp: f64) -> Self {
        let terms = (0..terms)
            .map(|_| {
                (
                    rng.gen_range(-amp..amp),
                    rng.gen_range(1..=2) as f64,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(1..=2) as f64,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        TrigPoly2 { terms }
    }

    pub fn constant(value: f64) -> Self {
        TrigPoly2 {
            terms: vec![(value, 0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0)],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, k1, p1, k2, p2)| a * f64::sin(k1 * x[0] + p1) * f64::cos(k2 * x[1] + p2))
            .sum()
    }

    /// Exact gradient [d/dx1, d/dx2].
    pub fn grad(&self, x: &[f64]) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for (a, k1, p1, k2, p2) in &self.terms {
            g[0] += a * k1 * f64::cos(k1 * x[0] + p1) * f64::cos(k2 * x[1] + p2);
            g[1] -= a * k2 * f64::sin(k1 * x[0] + p1) * f64::sin(k2 * x[1] + p2);
        }
        g
    }
}

/// Rotation frame over Cl(2,0) or Cl(0,2): h^1 = cos(phi)e^1 + sin(phi)e^2,
/// h^2 = -sin(phi)e^1 + cos(phi)e^2.
pub fn rotation_frame(sig: Signature, grid: &Grid, phi: &TrigPoly2) -> FrameField<f64> {
    let phi = phi.clone();
    FrameField::from_fn(grid.clone(), sig, move |node, a| {
        let p = phi.eval(&grid.coords(node));
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

/// Boost frame over Cl(1,1).
pub fn boost_frame(grid: &Grid, phi: &TrigPoly2) -> FrameField<f64> {
    let sig = cl(1, 1);
    let phi = phi.clone();
    FrameField::from_fn(grid.clone(), sig, move |node, a| {
        let p = phi.eval(&grid.coords(node));
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

/// z-y-z Euler-angle frame over Cl(3,0): rows of
/// R_z(phi) R_y(theta) R_z(psi) as grade-1 generators.
pub fn euler_frame(
    grid: &Grid,
    phi: &TrigPoly2,
    psi: &TrigPoly2,
    theta: &TrigPoly2,
) -> FrameField<f64> {
    let sig = cl(3, 0);
    let (phi, psi, theta) = (phi.clone(), psi.clone(), theta.clone());
    FrameField::from_fn(grid.clone(), sig, move |node, a| {
        let x = grid.coords(node);
        let row = euler_matrix_row(phi.eval(&x), psi.eval(&x), theta.eval(&x), a);
        let mut h = Multivector::zero(sig);
        for (b, &value) in row.iter().enumerate() {
            h.set_coeff(1 << b, value);
        }
        h
    })
}

pub fn euler_matrix_row(phi: f64, psi: f64, theta: f64, a: usize) -> [f64; 3] {
    let (sf, cf) = phi.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = theta.sin_cos();
    match a {
        1 => [cf * ct * cp - sf * sp, -cf * ct * sp - sf * cp, cf * st],
        2 => [sf * ct * cp + cf * sp, -sf * ct * sp + cf * cp, sf * st],
        _ => [-st * cp, st * sp, ct],
    }
}

/// The closed-form connection coefficients (c12, c13, c23) of the Euler
/// frame, from exact angle gradients.
pub fn euler_connection_components(
    psi: f64,
    theta: f64,
    dphi: f64,
    dpsi: f64,
    dtheta: f64,
) -> [f64; 3] {
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = theta.sin_cos();
    [
        0.5 * (ct * dphi + dpsi),
        0.5 * (-sp * st * dphi - cp * dtheta),
        0.5 * (-cp * st * dphi + sp * dtheta),
    ]
}

/// A random grade-2 field B(x) and the frame h^a = S^{-1} e^a S with
/// S = exp(B(x)); returns (frame, S field evaluator).
pub fn rotor_frame(
    sig: Signature,
    grid: &Grid,
    rng: &mut ChaCha8Rng,
    amp: f64,
) -> (FrameField<f64>, impl Fn(&[f64]) -> Multivector<f64> + Clone) {
    let dim = sig.dim();
    let bivector_masks: Vec<usize> = (0..dim)
        .filter(|m| m.count_ones() == 2)
        .collect();
    let fields: Vec<(usize, TrigPoly2)> = bivector_masks
        .iter()
        .map(|&m| (m, TrigPoly2::random(rng, 2, amp)))
        .collect();
    let rotor = {
        let fields = fields.clone();
        move |x: &[f64]| -> Multivector<f64> {
            let mut b = Multivector::zero(sig);
            for (mask, poly) in &fields {
                b.set_coeff(*mask, poly.eval(x));
            }
            b.exp()
        }
    };
    let frame = {
        let rotor = rotor.clone();
        FrameField::from_fn(grid.clone(), sig, move |node, a| {
            let s = rotor(&grid.coords(node));
            let s_inv = s.inverse().expect("rotor exponentials are invertible");
            s_inv
                .geometric_product(&Multivector::generator(sig, a))
                .geometric_product(&s)
        })
    };
    (frame, rotor)
}

/// log2(coarse/fine): the measured order under one refinement by 2.
pub fn refinement_order(coarse: f64, fine: f64) -> f64 {
    f64::log2(coarse / fine)
}

/// Max of a per-node quantity over nodes whose coordinates lie in the
/// central part of the domain (same physical box at every resolution).
pub fn central_max(grid: &Grid, values: impl Fn(usize) -> f64) -> f64 {
    let r = grid.r();
    let lo: Vec<f64> = (0..r)
        .map(|axis| grid.origin[axis] + 0.3 * grid.spacing[axis] * (grid.shape[axis] - 1) as f64)
        .collect();
    let hi: Vec<f64> = (0..r)
        .map(|axis| grid.origin[axis] + 0.7 * grid.spacing[axis] * (grid.shape[axis] - 1) as f64)
        .collect();
    (0..grid.node_count())
        .filter(|&node| {
            grid.coords(node)
                .iter()
                .enumerate()
                .all(|(axis, &x)| x >= lo[axis] && x <= hi[axis])
        })
        .map(values)
        .fold(0.0, f64::max)
}
