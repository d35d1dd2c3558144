//! Generator sets: n elements claimed to satisfy the anticommutation
//! relations, their indexed blade products, and pseudoscalar classification.

use serde::{Deserialize, Serialize};

use crate::blade::BladeIndex;
use crate::error::PauliError;
use crate::multivector::Multivector;
use crate::scalar::{ClScalar, ScalarField};
use crate::signature::Signature;

/// A set h^1..h^n of candidate generators.
#[derive(Clone, Debug)]
pub struct GeneratorSet<S: ClScalar> {
    sig: Signature,
    gens: Vec<Multivector<S>>,
}

/// Report of the defining-relation check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorReport {
    /// max_{a,b} |h^a h^b + h^b h^a - 2 eta^{ab} e|
    pub max_relation_residual: f64,
    /// |Tr(h^{1..n})| for odd n, 0 for even n.
    pub trace_magnitude: f64,
    /// Whether the odd-n trace condition holds (always true for even n).
    pub trace_condition_ok: bool,
}

/// Admissible constant values of h^{1..n} for odd n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PseudoscalarClass {
    /// +e^{1..n}
    PseudoPlus,
    /// -e^{1..n}
    PseudoMinus,
    /// +e (only p-q = 1 mod 4)
    ScalarPlus,
    /// -e (only p-q = 1 mod 4)
    ScalarMinus,
    /// +ie (complex only, p-q = 3 mod 4)
    ImaginaryPlus,
    /// -ie (complex only, p-q = 3 mod 4)
    ImaginaryMinus,
}

impl<S: ClScalar> GeneratorSet<S> {
    pub fn new(sig: Signature, gens: Vec<Multivector<S>>) -> Self {
        assert_eq!(gens.len(), sig.n(), "need exactly n generators");
        for g in &gens {
            assert_eq!(g.signature(), sig, "generator signature mismatch");
        }
        GeneratorSet { sig, gens }
    }

    /// The standard generator set {e^a}.
    pub fn standard(sig: Signature) -> Self {
        let gens = (1..=sig.n())
            .map(|a| Multivector::generator(sig, a))
            .collect();
        GeneratorSet { sig, gens }
    }

    /// Conjugated standard set h^a = p^{-1} e^a p.
    pub fn conjugated(p: &Multivector<S>) -> Result<Self, PauliError> {
        let sig = p.signature();
        let p_inv = p.inverse()?;
        let gens = (1..=sig.n())
            .map(|a| {
                let ea = Multivector::generator(sig, a);
                p_inv.geometric_product(&ea).geometric_product(p)
            })
            .collect();
        Ok(GeneratorSet { sig, gens })
    }

    #[inline]
    pub fn signature(&self) -> Signature {
        self.sig
    }

    #[inline]
    pub fn gen(&self, a: usize) -> &Multivector<S> {
        &self.gens[a - 1]
    }

    #[inline]
    pub fn gens(&self) -> &[Multivector<S>] {
        &self.gens
    }

    /// Check the anticommutation relations and, for odd n, the trace
    /// condition. Pure report; callers decide what to do with it.
    pub fn check(&self, tol: f64) -> GeneratorReport {
        let sig = self.sig;
        let n = sig.n();
        let e = Multivector::identity(sig);
        let mut max_residual = 0.0f64;
        for a in 1..=n {
            for b in a..=n {
                let ha = self.gen(a);
                let hb = self.gen(b);
                let mut lhs = ha.geometric_product(hb);
                lhs += &hb.geometric_product(ha);
                if a == b {
                    let eta = sig.eta(a) as f64;
                    lhs -= &e.scale(2.0 * eta);
                }
                max_residual = max_residual.max(lhs.norm());
            }
        }
        let (trace_magnitude, trace_condition_ok) = if n % 2 == 1 {
            let tr = self.pseudo_product().trace().abs();
            (tr, tr <= tol)
        } else {
            (0.0, true)
        };
        GeneratorReport {
            max_relation_residual: max_residual,
            trace_magnitude,
            trace_condition_ok,
        }
    }

    /// All 2^n ordered blade products h^A, indexed by bitmask; h^0 = e.
    pub fn blade_products(&self) -> Vec<Multivector<S>> {
        let sig = self.sig;
        let dim = sig.dim();
        let mut out = Vec::with_capacity(dim);
        out.push(Multivector::identity(sig));
        for a in 1..dim {
            let top = usize::BITS as usize - 1 - a.leading_zeros() as usize;
            let rest: BladeIndex = a & !(1 << top);
            let prod = out[rest].geometric_product(&self.gens[top]);
            out.push(prod);
        }
        out
    }

    /// The ordered product h^{1..n}.
    pub fn pseudo_product(&self) -> Multivector<S> {
        let mut prod = Multivector::identity(self.sig);
        for g in &self.gens {
            prod = prod.geometric_product(g);
        }
        prod
    }

    /// Classify h^{1..n} against the admissible constant values for odd n.
    ///
    /// Admissible: +-e^{1..n} always; +-e only when p-q = 1 mod 4; +-ie only
    /// over the complex field when p-q = 3 mod 4.
    pub fn classify_pseudoscalar(
        &self,
        tol: f64,
    ) -> Result<(Multivector<S>, PseudoscalarClass), PauliError> {
        let sig = self.sig;
        assert!(sig.n() % 2 == 1, "pseudoscalar classification needs odd n");
        let prod = self.pseudo_product();
        let top = sig.dim() - 1;
        let e = Multivector::identity(sig);
        let etop = Multivector::basis_blade(sig, top);
        let mod4 = sig.p_minus_q_mod4();

        let mut candidates: Vec<(Multivector<S>, PseudoscalarClass)> = vec![
            (etop.clone(), PseudoscalarClass::PseudoPlus),
            (-&etop, PseudoscalarClass::PseudoMinus),
        ];
        if mod4 == 1 {
            candidates.push((e.clone(), PseudoscalarClass::ScalarPlus));
            candidates.push((-&e, PseudoscalarClass::ScalarMinus));
        }
        if S::FIELD == ScalarField::Complex && mod4 == 3 {
            if let Some(i) = S::try_from_parts(0.0, 1.0) {
                candidates.push((e.scalar_mul(i), PseudoscalarClass::ImaginaryPlus));
                candidates.push((e.scalar_mul(-i), PseudoscalarClass::ImaginaryMinus));
            }
        }
        for (value, class) in candidates {
            if (&prod - &value).norm() <= tol {
                return Ok((prod, class));
            }
        }
        Err(PauliError::NotAdmissible {
            found: prod.to_string(),
        })
    }
}

/// h^a with the index lowered by the metric: h_a = eta_{aa} h^a.
pub(crate) fn lowered<S: ClScalar>(set: &GeneratorSet<S>, a: usize) -> Multivector<S> {
    let eta = set.signature().eta(a) as f64;
    set.gen(a).scale(eta)
}
