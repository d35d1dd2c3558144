//! Dense multivectors over Cl(p,q) and their arithmetic.
//!
//! A multivector stores all 2^n blade coefficients. Products run the full
//! dense double loop with exact integer signs from [`crate::blade`]; grade
//! structure, involutions, the Hermitian conjugate, norm, inverse and the
//! exponential live here as well.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::blade::{self, BladeIndex};
use crate::error::AlgebraError;
use crate::linalg::LuFactors;
use crate::scalar::ClScalar;
use crate::signature::Signature;

/// Condition-number ceiling above which `inverse` reports a singular element.
pub const SINGULAR_COND_LIMIT: f64 = 1e12;

/// A dense element of Cl(p,q) over the scalar field `S`.
///
/// Values are immutable in spirit: every operation returns a fresh element,
/// so sharing across threads is safe.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<S: ClScalar> {
    sig: Signature,
    coeffs: Vec<S>,
}

impl<S: ClScalar> Multivector<S> {
    /// The zero element.
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![S::zero(); sig.dim()],
        }
    }

    /// The identity element e.
    pub fn identity(sig: Signature) -> Self {
        Multivector::scalar(sig, S::one())
    }

    /// A scalar multiple of the identity.
    pub fn scalar(sig: Signature, value: S) -> Self {
        let mut mv = Multivector::zero(sig);
        mv.coeffs[0] = value;
        mv
    }

    /// The generator e^a, 1-based.
    pub fn generator(sig: Signature, a: usize) -> Self {
        assert!(a >= 1 && a <= sig.n(), "generator index {a} out of range");
        Multivector::basis_blade(sig, 1 << (a - 1))
    }

    /// The basis blade e^A for a bitmask A.
    pub fn basis_blade(sig: Signature, a: BladeIndex) -> Self {
        assert!(a < sig.dim(), "blade mask {a:#b} out of range");
        let mut mv = Multivector::zero(sig);
        mv.coeffs[a] = S::one();
        mv
    }

    /// Build from a full coefficient vector (length 2^n, blade-mask order).
    pub fn from_coeffs(sig: Signature, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), sig.dim(), "coefficient vector length");
        Multivector { sig, coeffs }
    }

    #[inline]
    pub fn signature(&self) -> Signature {
        self.sig
    }

    #[inline]
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, a: BladeIndex) -> S {
        self.coeffs[a]
    }

    pub fn set_coeff(&mut self, a: BladeIndex, value: S) {
        self.coeffs[a] = value;
    }

    fn assert_same_sig(&self, other: &Self) {
        assert_eq!(
            self.sig, other.sig,
            "operands live in different algebras: {} vs {}",
            self.sig, other.sig
        );
    }

    /// Geometric product self * other.
    pub fn geometric_product(&self, other: &Self) -> Self {
        self.assert_same_sig(other);
        let dim = self.sig.dim();
        let mut out = vec![S::zero(); dim];
        for a in 0..dim {
            let ca = self.coeffs[a];
            if ca == S::zero() {
                continue;
            }
            for b in 0..dim {
                let cb = other.coeffs[b];
                if cb == S::zero() {
                    continue;
                }
                let (sign, c) = blade::blade_product(a, b, &self.sig);
                let term = ca * cb;
                if sign > 0 {
                    out[c] += term;
                } else {
                    out[c] -= term;
                }
            }
        }
        Multivector {
            sig: self.sig,
            coeffs: out,
        }
    }

    /// Right-multiply by a signed basis blade: self * (sign e^M). O(2^n).
    pub fn mul_blade_right(&self, m: BladeIndex, sign: i8) -> Self {
        let dim = self.sig.dim();
        let mut out = vec![S::zero(); dim];
        for a in 0..dim {
            let ca = self.coeffs[a];
            if ca == S::zero() {
                continue;
            }
            let (s, c) = blade::blade_product(a, m, &self.sig);
            let total = s * sign;
            out[c] = if total > 0 { ca } else { -ca };
        }
        Multivector {
            sig: self.sig,
            coeffs: out,
        }
    }

    /// Commutator [self, other] = self*other - other*self.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.geometric_product(other) - &other.geometric_product(self)
    }

    /// Projection onto the grade-k subspace. Panics if k > n.
    pub fn grade_project(&self, k: usize) -> Self {
        assert!(k <= self.sig.n(), "grade {k} out of range");
        let mut out = Multivector::zero(self.sig);
        for a in 0..self.sig.dim() {
            if blade::grade(a) == k {
                out.coeffs[a] = self.coeffs[a];
            }
        }
        out
    }

    /// Scalar part (the paper's Tr up to the identity factor).
    #[inline]
    pub fn trace(&self) -> S {
        self.coeffs[0]
    }

    /// Reversion anti-automorphism.
    pub fn reverse(&self) -> Self {
        self.signed_map(blade::reverse_sign, false)
    }

    /// Grade involution.
    pub fn grade_involute(&self) -> Self {
        self.signed_map(blade::involute_sign, false)
    }

    /// Hermitian conjugate: antilinear, (e^A)^dagger = (e^A)^{-1}.
    pub fn hermitian_conjugate(&self) -> Self {
        let sig = self.sig;
        let mut out = Multivector::zero(sig);
        for a in 0..sig.dim() {
            let s = blade::inverse_sign(a, &sig);
            let c = self.coeffs[a].conj();
            out.coeffs[a] = if s > 0 { c } else { -c };
        }
        out
    }

    fn signed_map(&self, sign_of: impl Fn(BladeIndex) -> i8, conj: bool) -> Self {
        let mut out = Multivector::zero(self.sig);
        for a in 0..self.sig.dim() {
            let c = if conj {
                self.coeffs[a].conj()
            } else {
                self.coeffs[a]
            };
            out.coeffs[a] = if sign_of(a) > 0 { c } else { -c };
        }
        out
    }

    /// The inverse of a basis blade, e_A = (e^A)^{-1}, as an element.
    pub fn blade_inverse(sig: Signature, a: BladeIndex) -> Self {
        let s = blade::inverse_sign(a, &sig);
        let mut mv = Multivector::zero(sig);
        mv.coeffs[a] = if s > 0 { S::one() } else { -S::one() };
        mv
    }

    /// Norm |U| = sqrt(Tr(U^dagger U)). Under the blade normalization this is
    /// the Euclidean norm of the coefficient vector, which is how it is
    /// evaluated; the trace route is asserted equal in the property tests.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs_sq()).sum::<f64>().sqrt()
    }

    /// Componentwise scaling by a real factor.
    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.scale(k);
        }
        out
    }

    /// Componentwise scaling by a scalar of the field.
    pub fn scalar_mul(&self, k: S) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= k;
        }
        out
    }

    /// True if every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// The matrix of left multiplication by self on coefficient vectors,
    /// column-major in the blade-mask basis.
    pub fn left_mul_matrix(&self) -> Vec<S> {
        let dim = self.sig.dim();
        let mut m = vec![S::zero(); dim * dim];
        for b in 0..dim {
            // column b = coefficients of self * e^b
            for a in 0..dim {
                let ca = self.coeffs[a];
                if ca == S::zero() {
                    continue;
                }
                let (sign, c) = blade::blade_product(a, b, &self.sig);
                if sign > 0 {
                    m[c * dim + b] += ca;
                } else {
                    m[c * dim + b] -= ca;
                }
            }
        }
        m
    }

    /// Multiplicative inverse via a dense linear solve with partial pivoting.
    ///
    /// Fails with `SingularElement` when the left-multiplication matrix is
    /// rank deficient or its estimated condition number exceeds
    /// [`SINGULAR_COND_LIMIT`].
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let dim = self.sig.dim();
        let m = self.left_mul_matrix();
        let lu = LuFactors::factor(m, dim).map_err(|cond| AlgebraError::SingularElement { cond })?;
        let cond = lu.condition_estimate();
        if !cond.is_finite() || cond > SINGULAR_COND_LIMIT {
            return Err(AlgebraError::SingularElement { cond });
        }
        let mut rhs = vec![S::zero(); dim];
        rhs[0] = S::one();
        lu.solve_in_place(&mut rhs);
        let inv = Multivector {
            sig: self.sig,
            coeffs: rhs,
        };
        // the solve enforces self * inv = e; confirm inv * self = e as well
        let check = inv.geometric_product(self);
        let defect = (&check - &Multivector::identity(self.sig)).norm();
        if !defect.is_finite() || defect > 1e-6 * (1.0 + self.norm() * inv.norm()) {
            return Err(AlgebraError::SingularElement { cond });
        }
        Ok(inv)
    }

    /// Exponential by scaling and squaring: scale by 2^m until the norm is
    /// at most 0.5, run a 20-term series, square m times.
    pub fn exp(&self) -> Self {
        let norm = self.norm();
        let mut m = 0u32;
        while norm / f64::powi(2.0, m as i32) > 0.5 {
            m += 1;
        }
        let scaled = self.scale(f64::powi(2.0, -(m as i32)));
        let mut sum = Multivector::identity(self.sig);
        let mut term = Multivector::identity(self.sig);
        for k in 1..=20 {
            term = term.geometric_product(&scaled).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..m {
            sum = sum.geometric_product(&sum);
        }
        sum
    }

    /// Projection onto the center: grade 0 for even n, grades 0 and n for
    /// odd n.
    pub fn center_project(&self) -> Self {
        let n = self.sig.n();
        let mut out = self.grade_project(0);
        if n % 2 == 1 {
            out.coeffs[self.sig.dim() - 1] = self.coeffs[self.sig.dim() - 1];
        }
        out
    }

    /// Drop the central part (used to fix connection components, which are
    /// defined modulo the center).
    pub fn center_quotient(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = S::zero();
        if self.sig.n() % 2 == 1 {
            let top = self.sig.dim() - 1;
            out.coeffs[top] = S::zero();
        }
        out
    }
}

impl<S: ClScalar> Add for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, rhs: Self) -> Multivector<S> {
        self.assert_same_sig(rhs);
        let mut out = self.clone();
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += *r;
        }
        out
    }
}

impl<S: ClScalar> Sub for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: Self) -> Multivector<S> {
        self.assert_same_sig(rhs);
        let mut out = self.clone();
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= *r;
        }
        out
    }
}

impl<S: ClScalar> Neg for &Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -*c;
        }
        out
    }
}

impl<S: ClScalar> AddAssign<&Multivector<S>> for Multivector<S> {
    fn add_assign(&mut self, rhs: &Multivector<S>) {
        self.assert_same_sig(rhs);
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += *r;
        }
    }
}

impl<S: ClScalar> SubAssign<&Multivector<S>> for Multivector<S> {
    fn sub_assign(&mut self, rhs: &Multivector<S>) {
        self.assert_same_sig(rhs);
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= *r;
        }
    }
}

impl<S: ClScalar> Mul for &Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, rhs: Self) -> Multivector<S> {
        self.geometric_product(rhs)
    }
}

impl<S: ClScalar> std::fmt::Display for Multivector<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for a in 0..self.sig.dim() {
            let c = self.coeffs[a];
            if c == S::zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if a == 0 {
                write!(f, "({c})e")?;
            } else {
                write!(f, "({c})e{}", blade::blade_label(a))?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cl(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn random_mv(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<f64> {
        Multivector::from_coeffs(sig, (0..sig.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn random_mv_c(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<Complex64> {
        Multivector::from_coeffs(
            sig,
            (0..sig.dim())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn identity_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = cl(2, 1);
        let e = Multivector::<f64>::identity(sig);
        let x = random_mv(sig, &mut rng);
        assert_eq!((&e.geometric_product(&x) - &x).norm(), 0.0);
        assert_eq!((&x.geometric_product(&e) - &x).norm(), 0.0);
    }

    #[test]
    fn pinned_products() {
        let sig = cl(2, 0);
        let e1 = Multivector::<f64>::generator(sig, 1);
        let e2 = Multivector::<f64>::generator(sig, 2);
        // (e^1 + e^2)^2 = 2e
        let v = &e1 + &e2;
        let sq = v.geometric_product(&v);
        assert!((&sq - &Multivector::identity(sig).scale(2.0)).norm() < 1e-15);
        // e^{12} e^{12} = -e
        let e12 = Multivector::<f64>::basis_blade(sig, 0b11);
        let sq = e12.geometric_product(&e12);
        assert!((&sq + &Multivector::identity(sig)).norm() < 1e-15);
        assert_eq!(sq.trace(), -1.0);
    }

    #[test]
    fn grade_projection_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sig = cl(3, 1);
        let x = random_mv(sig, &mut rng);
        let mut sum = Multivector::zero(sig);
        for k in 0..=sig.n() {
            let pk = x.grade_project(k);
            // idempotent
            assert_eq!((&pk.grade_project(k) - &pk).norm(), 0.0);
            sum += &pk;
        }
        assert_eq!((&sum - &x).norm(), 0.0);

        // pinned: grade_project(e + 3e^{12}, 2) = 3e^{12}; grade_project(e^1, 0) = 0
        let sig2 = cl(2, 0);
        let mixed = &Multivector::<f64>::identity(sig2)
            + &Multivector::basis_blade(sig2, 0b11).scale(3.0);
        let p2 = mixed.grade_project(2);
        assert_eq!(p2.coeff(0b11), 3.0);
        assert_eq!(p2.coeff(0), 0.0);
        assert_eq!(
            Multivector::<f64>::generator(sig2, 1).grade_project(0).norm(),
            0.0
        );
    }

    #[test]
    fn trace_examples() {
        let sig = cl(2, 0);
        assert_eq!(Multivector::<f64>::identity(sig).trace(), 1.0);
        let x = &Multivector::<f64>::generator(sig, 1) + &Multivector::identity(sig).scale(5.0);
        assert_eq!(x.trace(), 5.0);
    }

    #[test]
    fn reverse_is_anti_automorphism() {
        let sig = cl(2, 0);
        // pinned: reverse(e^{12}) = -e^{12}, reverse(e^a) = e^a
        let e12 = Multivector::<f64>::basis_blade(sig, 0b11);
        assert_eq!((&e12.reverse() + &e12).norm(), 0.0);
        let e1 = Multivector::<f64>::generator(sig, 1);
        assert_eq!((&e1.reverse() - &e1).norm(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, q) in [(2, 0), (1, 2), (3, 1)] {
            let sig = cl(p, q);
            let x = random_mv(sig, &mut rng);
            let y = random_mv(sig, &mut rng);
            let lhs = x.geometric_product(&y).reverse();
            let rhs = y.reverse().geometric_product(&x.reverse());
            assert!((&lhs - &rhs).norm() < 1e-12);
            // involution
            assert_eq!((&x.reverse().reverse() - &x).norm(), 0.0);
        }
    }

    #[test]
    fn blade_inverse_examples() {
        let cl20 = cl(2, 0);
        let cl11 = cl(1, 1);
        assert_eq!(
            (&Multivector::<f64>::blade_inverse(cl20, 0) - &Multivector::identity(cl20)).norm(),
            0.0
        );
        // Cl(2,0): e_{12} = -e^{12}
        let inv = Multivector::<f64>::blade_inverse(cl20, 0b11);
        assert_eq!(inv.coeff(0b11), -1.0);
        // Cl(1,1): e_2 = -e^2
        let inv = Multivector::<f64>::blade_inverse(cl11, 0b10);
        assert_eq!(inv.coeff(0b10), -1.0);
        // definition: e^A e_A = e
        for a in 0..cl11.dim() {
            let blade = Multivector::<f64>::basis_blade(cl11, a);
            let product = blade.geometric_product(&Multivector::blade_inverse(cl11, a));
            assert_eq!((&product - &Multivector::identity(cl11)).norm(), 0.0);
        }
    }

    #[test]
    fn hermitian_conjugate_properties() {
        // (e^a)^dagger = eta^{aa} e^a
        for (p, q) in [(2, 0), (0, 2), (1, 1)] {
            let sig = cl(p, q);
            for a in 1..=sig.n() {
                let ea = Multivector::<f64>::generator(sig, a);
                let expected = ea.scale(sig.eta(a) as f64);
                assert_eq!((&ea.hermitian_conjugate() - &expected).norm(), 0.0);
            }
        }
        // antilinearity over C: (i e^1)^dagger = i e^1 in Cl(0,1)
        let sig = cl(0, 1);
        let i = Complex64::new(0.0, 1.0);
        let x = Multivector::<Complex64>::generator(sig, 1).scalar_mul(i);
        assert_eq!((&x.hermitian_conjugate() - &x).norm(), 0.0);

        // anti-automorphism and involution on random elements
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sig = cl(1, 2);
        let x = random_mv_c(sig, &mut rng);
        let y = random_mv_c(sig, &mut rng);
        let lhs = x.geometric_product(&y).hermitian_conjugate();
        let rhs = y.hermitian_conjugate().geometric_product(&x.hermitian_conjugate());
        assert!((&lhs - &rhs).norm() < 1e-12);
        assert_eq!((&x.hermitian_conjugate().hermitian_conjugate() - &x).norm(), 0.0);
    }

    #[test]
    fn norm_examples_and_trace_route() {
        let cl20 = cl(2, 0);
        assert_eq!(Multivector::<f64>::zero(cl20).norm(), 0.0);
        assert_eq!(Multivector::<f64>::basis_blade(cl20, 0b11).norm(), 1.0);
        let cl10 = cl(1, 0);
        let x = &Multivector::<f64>::identity(cl10).scale(3.0)
            + &Multivector::generator(cl10, 1).scale(4.0);
        assert_eq!(x.norm(), 5.0);

        // norm^2 = Tr(x^dagger x) on random elements, both fields
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, q) in [(2, 0), (1, 1), (2, 3)] {
            let sig = cl(p, q);
            let x = random_mv(sig, &mut rng);
            let tr = x.hermitian_conjugate().geometric_product(&x).trace();
            assert!((x.norm().powi(2) - tr).abs() < 1e-12);
            let z = random_mv_c(sig, &mut rng);
            let tr = z.hermitian_conjugate().geometric_product(&z).trace();
            assert!(tr.im.abs() < 1e-12);
            assert!((z.norm().powi(2) - tr.re).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_examples() {
        let cl10 = cl(1, 0);
        let e = Multivector::<f64>::identity(cl10);
        assert_eq!((&e.inverse().unwrap() - &e).norm(), 0.0);
        // (e + e^1)(e - e^1) = 0: singular
        let x = &e + &Multivector::generator(cl10, 1);
        assert!(matches!(
            x.inverse(),
            Err(AlgebraError::SingularElement { .. })
        ));
        // rotor inverse: (cos t e + sin t e^{12})^{-1} = cos t e - sin t e^{12}
        let cl20 = cl(2, 0);
        let t = 0.7f64;
        let rotor = &Multivector::<f64>::identity(cl20).scale(t.cos())
            + &Multivector::basis_blade(cl20, 0b11).scale(t.sin());
        let expected = &Multivector::<f64>::identity(cl20).scale(t.cos())
            - &Multivector::basis_blade(cl20, 0b11).scale(t.sin());
        assert!((&rotor.inverse().unwrap() - &expected).norm() < 1e-14);
    }

    #[test]
    fn inverse_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut done = 0;
        while done < 20 {
            let sig = cl(2, 2);
            let x = random_mv(sig, &mut rng);
            if let Ok(inv) = x.inverse() {
                let e = Multivector::identity(sig);
                assert!((&x.geometric_product(&inv) - &e).norm() < 1e-10);
                assert!((&inv.geometric_product(&x) - &e).norm() < 1e-10);
                done += 1;
            }
        }
    }

    #[test]
    fn exp_closed_forms() {
        let cl20 = cl(2, 0);
        // exp(0) = e
        let zero = Multivector::<f64>::zero(cl20);
        assert!((&zero.exp() - &Multivector::identity(cl20)).norm() < 1e-15);
        // exp(-(phi/2) e^{12}) = cos(phi/2) e - sin(phi/2) e^{12}
        let phi = 1.3f64;
        let arg = Multivector::<f64>::basis_blade(cl20, 0b11).scale(-phi / 2.0);
        let expected = &Multivector::<f64>::identity(cl20).scale(f64::cos(phi / 2.0))
            - &Multivector::basis_blade(cl20, 0b11).scale(f64::sin(phi / 2.0));
        assert!((&arg.exp() - &expected).norm() < 1e-14);
        // Cl(1,1): exp(-(phi/2) e^{12}) = cosh(phi/2) e - sinh(phi/2) e^{12}
        let cl11 = cl(1, 1);
        let arg = Multivector::<f64>::basis_blade(cl11, 0b11).scale(-phi / 2.0);
        let expected = &Multivector::<f64>::identity(cl11).scale(f64::cosh(phi / 2.0))
            - &Multivector::basis_blade(cl11, 0b11).scale(f64::sinh(phi / 2.0));
        assert!((&arg.exp() - &expected).norm() < 1e-14);
    }

    #[test]
    fn exp_inverse_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, q) in [(2, 0), (1, 1), (3, 0), (2, 2)] {
            let sig = cl(p, q);
            for _ in 0..5 {
                let x = random_mv(sig, &mut rng).scale(2.0);
                let prod = x.exp().geometric_product(&(-&x).exp());
                assert!((&prod - &Multivector::identity(sig)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let sig = cl(2, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_mv(sig, &mut rng);
        assert_eq!(a.commutator(&a).norm(), 0.0);
        assert_eq!(Multivector::identity(sig).commutator(&a).norm(), 0.0);
        // [e^{12}, e^1] = -2 e^2
        let e12 = Multivector::<f64>::basis_blade(sig, 0b11);
        let e1 = Multivector::<f64>::generator(sig, 1);
        let expected = Multivector::<f64>::generator(sig, 2).scale(-2.0);
        assert_eq!((&e12.commutator(&e1) - &expected).norm(), 0.0);
    }

    #[test]
    fn associativity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, q) in [(2, 0), (1, 1), (3, 2), (0, 4)] {
            let sig = cl(p, q);
            for _ in 0..10 {
                let a = random_mv(sig, &mut rng);
                let b = random_mv(sig, &mut rng);
                let c = random_mv(sig, &mut rng);
                let lhs = a.geometric_product(&b).geometric_product(&c);
                let rhs = a.geometric_product(&b.geometric_product(&c));
                let scale = (a.norm() * b.norm() * c.norm()).max(1e-30);
                assert!((&lhs - &rhs).norm() / scale < 1e-12);
            }
        }
    }

    #[test]
    fn anticommutation_is_exact() {
        for (p, q) in [(3, 0), (1, 3), (2, 2)] {
            let sig = cl(p, q);
            let e = Multivector::<f64>::identity(sig);
            for a in 1..=sig.n() {
                for b in 1..=sig.n() {
                    let ea = Multivector::<f64>::generator(sig, a);
                    let eb = Multivector::<f64>::generator(sig, b);
                    let mut lhs = ea.geometric_product(&eb);
                    lhs += &eb.geometric_product(&ea);
                    let eta = if a == b { sig.eta(a) as f64 } else { 0.0 };
                    assert_eq!((&lhs - &e.scale(2.0 * eta)).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn center_characterization() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let commutes_with_generators = |x: &Multivector<f64>| -> bool {
            let sig = x.signature();
            (1..=sig.n()).all(|a| {
                x.commutator(&Multivector::generator(sig, a)).norm() < 1e-12
            })
        };
        // even n: center = grade 0; odd n: grade 0 + grade n
        for (p, q) in [(2, 0), (1, 1), (2, 2)] {
            let sig = cl(p, q);
            let x = random_mv(sig, &mut rng);
            let central = x.center_project();
            assert!(commutes_with_generators(&central));
            let rest = &x - &central;
            if rest.norm() > 1e-6 {
                assert!(!commutes_with_generators(&rest));
            }
        }
        for (p, q) in [(3, 0), (1, 2), (0, 5)] {
            let sig = cl(p, q);
            let x = random_mv(sig, &mut rng);
            let central = x.center_project();
            assert!(commutes_with_generators(&central));
            assert_eq!(central.coeff(0), x.coeff(0));
            assert_eq!(central.coeff(sig.dim() - 1), x.coeff(sig.dim() - 1));
            let rest = &x - &central;
            if rest.norm() > 1e-6 {
                assert!(!commutes_with_generators(&rest));
            }
        }
    }
}
