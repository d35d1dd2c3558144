//! Constructive intertwiner search for constant generator sets.
//!
//! Given a set h^1..h^n satisfying the anticommutation relations, an
//! invertible element T with e^a = T^{-1} h^a T (even n) is found by scanning
//! candidate elements F and forming the sums sum_A h^A F e_A. For odd n the
//! sum runs over even-length multi-indices, F additionally ranges over pairs
//! e^B + e^C, and the relation picks up a central factor classified into one
//! of six cases.

use serde::{Deserialize, Serialize};

use crate::blade::{self, BladeIndex};
use crate::error::PauliError;
use crate::generators::GeneratorSet;
use crate::multivector::Multivector;
use crate::scalar::ClScalar;

/// Relative floor below which the whole candidate scan is considered to have
/// cancelled to zero.
const CANDIDATE_FLOOR: f64 = 1e-9;

/// The six odd-n connection cases: g^a = factor * T^{-1} h^a T with the
/// central factor determined by h^{1..n} g_{1..n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddCaseKind {
    /// factor = +e
    Plus,
    /// factor = -e
    Minus,
    /// factor = +e^{1..n}
    PseudoPlus,
    /// factor = -e^{1..n}
    PseudoMinus,
    /// factor = +i e^{1..n} (complex algebras only)
    IPseudoPlus,
    /// factor = -i e^{1..n} (complex algebras only)
    IPseudoMinus,
}

/// Which case the returned intertwiner realizes.
#[derive(Clone, Debug)]
pub enum IntertwinerCase<S: ClScalar> {
    /// Even n: plain similarity transformation.
    Even,
    /// Odd n: twisted by an invertible central factor.
    Odd {
        kind: OddCaseKind,
        factor: Multivector<S>,
    },
}

impl OddCaseKind {
    pub fn label(&self) -> &'static str {
        match self {
            OddCaseKind::Plus => "plus",
            OddCaseKind::Minus => "minus",
            OddCaseKind::PseudoPlus => "pseudo_plus",
            OddCaseKind::PseudoMinus => "pseudo_minus",
            OddCaseKind::IPseudoPlus => "i_pseudo_plus",
            OddCaseKind::IPseudoMinus => "i_pseudo_minus",
        }
    }
}

impl<S: ClScalar> IntertwinerCase<S> {
    pub fn label(&self) -> &'static str {
        match self {
            IntertwinerCase::Even => "even",
            IntertwinerCase::Odd { kind, .. } => kind.label(),
        }
    }
}

/// Output of the intertwiner construction.
#[derive(Clone, Debug)]
pub struct IntertwinerResult<S: ClScalar> {
    /// The intertwining element, rescaled to norm 1.
    pub t: Multivector<S>,
    pub t_inv: Multivector<S>,
    pub case: IntertwinerCase<S>,
    /// max over generators of the defect of the claimed relation.
    pub residual: f64,
    /// Which candidate F produced T, e.g. "e" / "e13" / "e12+e23".
    pub chosen_f: String,
}

fn candidate_label(b: BladeIndex, c: Option<BladeIndex>) -> String {
    let one = |m: BladeIndex| {
        if m == 0 {
            "e".to_string()
        } else {
            format!("e{}", blade::blade_label(m))
        }
    };
    match c {
        None => one(b),
        Some(c) => format!("{}+{}", one(b), one(c)),
    }
}

/// The sums T_B = sum_A h^A e^B e_A over the allowed multi-indices, one per
/// basis blade B. Every pair candidate is T_B + T_C by linearity.
fn candidate_sums<S: ClScalar>(
    set: &GeneratorSet<S>,
    even_indices_only: bool,
) -> (Vec<Multivector<S>>, f64) {
    let sig = set.signature();
    let dim = sig.dim();
    let products = set.blade_products();
    let mut scale = 0.0f64;
    let mut sums: Vec<Multivector<S>> = (0..dim).map(|_| Multivector::zero(sig)).collect();
    for a in 0..dim {
        if even_indices_only && blade::grade(a) % 2 != 0 {
            continue;
        }
        scale += products[a].norm();
        let inv_sign = blade::inverse_sign(a, &sig);
        for b in 0..dim {
            // F e_A = inv_sign * e^B e^A = sign * e^(B xor A)
            let (s, m) = blade::blade_product(b, a, &sig);
            sums[b] += &products[a].mul_blade_right(m, s * inv_sign);
        }
    }
    (sums, scale)
}

/// Scan all candidates (singles, then pairs of distinct even-grade blades for
/// odd n), returning the maximal-norm sum. Ties break to the earliest
/// candidate in the fixed scan order.
fn best_candidate<S: ClScalar>(
    set: &GeneratorSet<S>,
) -> Result<(Multivector<S>, String), PauliError> {
    let sig = set.signature();
    let dim = sig.dim();
    let odd = sig.n() % 2 == 1;
    let (sums, scale) = candidate_sums(set, odd);

    let mut best_norm = -1.0f64;
    let mut best: Option<(BladeIndex, Option<BladeIndex>)> = None;
    for b in 0..dim {
        let norm = sums[b].norm();
        if norm > best_norm {
            best_norm = norm;
            best = Some((b, None));
        }
    }
    if odd {
        let even_blades: Vec<BladeIndex> =
            (0..dim).filter(|&m| blade::grade(m) % 2 == 0).collect();
        for (i, &b) in even_blades.iter().enumerate() {
            for &c in &even_blades[i + 1..] {
                let norm = (&sums[b] + &sums[c]).norm();
                if norm > best_norm {
                    best_norm = norm;
                    best = Some((b, Some(c)));
                }
            }
        }
    }
    let (b, c) = best.expect("candidate scan is never empty");
    if best_norm <= CANDIDATE_FLOOR * scale.max(1.0) {
        return Err(PauliError::NoCandidateFound {
            max_norm: best_norm,
        });
    }
    let t = match c {
        None => sums[b].clone(),
        Some(c) => &sums[b] + &sums[c],
    };
    Ok((t.scale(1.0 / best_norm), candidate_label(b, c)))
}

/// Central factor h^{1..n} g_{1..n} of the odd-n relation, classified.
fn odd_factor<S: ClScalar>(
    h: &GeneratorSet<S>,
    g: &GeneratorSet<S>,
    tol: f64,
) -> Result<(OddCaseKind, Multivector<S>), PauliError> {
    let sig = h.signature();
    let g_pseudo_inv = g.pseudo_product().inverse()?;
    let factor = h.pseudo_product().geometric_product(&g_pseudo_inv);
    classify_factor(&factor, sig.dim() - 1, tol).map(|kind| (kind, factor))
}

fn classify_factor<S: ClScalar>(
    factor: &Multivector<S>,
    top: BladeIndex,
    tol: f64,
) -> Result<OddCaseKind, PauliError> {
    let sig = factor.signature();
    let e = Multivector::<S>::identity(sig);
    let etop = Multivector::<S>::basis_blade(sig, top);
    let mut candidates = vec![
        (e.clone(), OddCaseKind::Plus),
        (-&e, OddCaseKind::Minus),
        (etop.clone(), OddCaseKind::PseudoPlus),
        (-&etop, OddCaseKind::PseudoMinus),
    ];
    if let Some(i) = S::try_from_parts(0.0, 1.0) {
        candidates.push((etop.scalar_mul(i), OddCaseKind::IPseudoPlus));
        candidates.push((etop.scalar_mul(-i), OddCaseKind::IPseudoMinus));
    }
    for (value, kind) in candidates {
        if (factor - &value).norm() <= tol {
            return Ok(kind);
        }
    }
    Err(PauliError::CaseMismatch {
        found: factor.to_string(),
    })
}

/// Defect of the claimed relation: max_a |factor T^{-1} h^a T - g^a|.
pub fn relation_residual<S: ClScalar>(
    h: &GeneratorSet<S>,
    g: &GeneratorSet<S>,
    t: &Multivector<S>,
    t_inv: &Multivector<S>,
    case: &IntertwinerCase<S>,
) -> f64 {
    let n = h.signature().n();
    let mut worst = 0.0f64;
    for a in 1..=n {
        let mut conj = t_inv
            .geometric_product(h.gen(a))
            .geometric_product(t);
        if let IntertwinerCase::Odd { factor, .. } = case {
            conj = factor.geometric_product(&conj);
        }
        worst = worst.max((&conj - g.gen(a)).norm());
    }
    worst
}

/// Construct T with e^a = T^{-1} h^a T (even n) or
/// e^a = factor T^{-1} h^a T (odd n, factor = h^{1..n} e_{1..n}).
pub fn intertwiner_to_standard<S: ClScalar>(
    set: &GeneratorSet<S>,
    tol: f64,
) -> Result<IntertwinerResult<S>, PauliError> {
    let report = set.check(tol);
    if report.max_relation_residual > tol {
        return Err(PauliError::InvalidGenerators {
            residual: report.max_relation_residual,
            tol,
        });
    }
    let standard = GeneratorSet::standard(set.signature());
    build_result(set, &standard, tol, |set, _| best_candidate(set))
}

/// Construct T with g^a = T^{-1} h^a T (even n) or the factor-twisted odd
/// relation, by composing the to-standard intertwiners: T = T_h T_g^{-1}.
pub fn intertwiner<S: ClScalar>(
    h: &GeneratorSet<S>,
    g: &GeneratorSet<S>,
    tol: f64,
) -> Result<IntertwinerResult<S>, PauliError> {
    if h.signature() != g.signature() {
        return Err(PauliError::Algebra(
            crate::error::AlgebraError::SignatureMismatch(
                h.signature().to_string(),
                g.signature().to_string(),
            ),
        ));
    }
    for set in [h, g] {
        let report = set.check(tol);
        if report.max_relation_residual > tol {
            return Err(PauliError::InvalidGenerators {
                residual: report.max_relation_residual,
                tol,
            });
        }
    }
    let (t_h, label_h) = best_candidate(h)?;
    let (t_g, label_g) = best_candidate(g)?;
    let tg_inv = t_g.inverse()?;
    let label = format!("h:{label_h} g:{label_g}");
    build_result(h, g, tol, move |_, _| {
        Ok((t_h.geometric_product(&tg_inv), label))
    })
}

fn build_result<S: ClScalar>(
    h: &GeneratorSet<S>,
    g: &GeneratorSet<S>,
    tol: f64,
    make_t: impl FnOnce(&GeneratorSet<S>, f64) -> Result<(Multivector<S>, String), PauliError>,
) -> Result<IntertwinerResult<S>, PauliError> {
    let sig = h.signature();
    let (t_raw, chosen_f) = make_t(h, tol)?;
    let t = t_raw.scale(1.0 / t_raw.norm());
    let t_inv = t.inverse()?;
    let case = if sig.n() % 2 == 0 {
        IntertwinerCase::Even
    } else {
        // the factor of nearly-exact sets sits within O(relation residual)
        // of an admissible value, so the match tolerance scales with tol
        let (kind, factor) = odd_factor(h, g, tol.max(1e-6))?;
        IntertwinerCase::Odd { kind, factor }
    };
    let residual = relation_residual(h, g, &t, &t_inv, &case);
    if residual > tol {
        return Err(PauliError::VerificationFailed { residual, tol });
    }
    Ok(IntertwinerResult {
        t,
        t_inv,
        case,
        residual,
        chosen_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn cl(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn random_mv(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<f64> {
        let coeffs = (0..sig.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Multivector::from_coeffs(sig, coeffs)
    }

    fn random_mv_c(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<Complex64> {
        let coeffs = (0..sig.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Multivector::from_coeffs(sig, coeffs)
    }

    /// Rejection-sample a well-conditioned invertible element.
    fn random_conjugator(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<f64> {
        loop {
            let p = random_mv(sig, rng);
            if let Ok(p_inv) = p.inverse() {
                if p.norm() * p_inv.norm() < 50.0 {
                    return p;
                }
            }
        }
    }

    fn random_conjugator_c(sig: Signature, rng: &mut ChaCha8Rng) -> Multivector<Complex64> {
        loop {
            let p = random_mv_c(sig, rng);
            if let Ok(p_inv) = p.inverse() {
                if p.norm() * p_inv.norm() < 50.0 {
                    return p;
                }
            }
        }
    }

    #[test]
    fn standard_set_yields_central_t() {
        for (p, q) in [(2, 0), (1, 1), (3, 0), (1, 2)] {
            let set = GeneratorSet::<f64>::standard(cl(p, q));
            let result = intertwiner_to_standard(&set, TOL).unwrap();
            assert!(result.residual < 1e-12);
            assert_eq!(result.chosen_f, "e");
            // T proportional to e
            let t_scalar = result.t.grade_project(0);
            assert!((&result.t - &t_scalar).norm() < 1e-12, "Cl({p},{q})");
        }
    }

    #[test]
    fn swapped_generators_give_known_t() {
        // h^1 = e^2, h^2 = e^1: a valid T is (e^1+e^2)/sqrt(2) up to scale.
        let sig = cl(2, 0);
        let set = GeneratorSet::new(
            sig,
            vec![
                Multivector::<f64>::generator(sig, 2),
                Multivector::<f64>::generator(sig, 1),
            ],
        );
        let result = intertwiner_to_standard(&set, TOL).unwrap();
        assert!(result.residual < 1e-12);
        let expected = {
            let e1 = Multivector::<f64>::generator(sig, 1);
            let e2 = Multivector::<f64>::generator(sig, 2);
            (&e1 + &e2).scale(1.0 / f64::sqrt(2.0))
        };
        let diff = f64::min(
            (&result.t - &expected).norm(),
            (&result.t + &expected).norm(),
        );
        assert!(diff < 1e-12, "t = {}", result.t);
    }

    #[test]
    fn negated_standard_odd_case_is_minus() {
        // Cl(3,0), h^a = -e^a: h^{123} = -e^{123}, so the factor
        // h^{123} e_{123} is -e and T stays central.
        let sig = cl(3, 0);
        let gens = (1..=3)
            .map(|a| -&Multivector::<f64>::generator(sig, a))
            .collect();
        let set = GeneratorSet::new(sig, gens);
        let result = intertwiner_to_standard(&set, TOL).unwrap();
        assert!(result.residual < 1e-12);
        match &result.case {
            IntertwinerCase::Odd { kind, .. } => assert_eq!(*kind, OddCaseKind::Minus),
            _ => panic!("expected odd case"),
        }
        let t_central = result.t.center_project();
        assert!((&result.t - &t_central).norm() < 1e-12);
    }

    #[test]
    fn conjugated_sets_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (p, q) in [(2, 0), (1, 1), (3, 0), (0, 3), (2, 2), (4, 1)] {
            let sig = cl(p, q);
            for _ in 0..3 {
                let p_el = random_conjugator(sig, &mut rng);
                let set = GeneratorSet::conjugated(&p_el).unwrap();
                let result = intertwiner_to_standard(&set, TOL).unwrap();
                assert!(
                    result.residual < 1e-9,
                    "Cl({p},{q}) residual {}",
                    result.residual
                );
            }
        }
    }

    #[test]
    fn conjugated_complex_sets_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, q) in [(2, 0), (1, 2), (0, 3)] {
            let sig = cl(p, q);
            let p_el = random_conjugator_c(sig, &mut rng);
            let set = GeneratorSet::conjugated(&p_el).unwrap();
            let result = intertwiner_to_standard(&set, TOL).unwrap();
            assert!(result.residual < 1e-9, "Cl({p},{q})");
        }
    }

    #[test]
    fn pair_intertwiner_same_set_is_plus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sig = cl(1, 2);
        let p_el = random_conjugator(sig, &mut rng);
        let h = GeneratorSet::conjugated(&p_el).unwrap();
        let result = intertwiner(&h, &h, TOL).unwrap();
        assert!(result.residual < 1e-9);
        match &result.case {
            IntertwinerCase::Odd { kind, .. } => assert_eq!(*kind, OddCaseKind::Plus),
            _ => panic!("expected odd case"),
        }
    }

    #[test]
    fn pair_intertwiner_negated_odd_is_minus() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sig = cl(1, 2);
        let p_el = random_conjugator(sig, &mut rng);
        let h = GeneratorSet::conjugated(&p_el).unwrap();
        let g = GeneratorSet::new(sig, h.gens().iter().map(|x| -x).collect());
        let result = intertwiner(&h, &g, TOL).unwrap();
        assert!(result.residual < 1e-9);
        match &result.case {
            IntertwinerCase::Odd { kind, .. } => assert_eq!(*kind, OddCaseKind::Minus),
            _ => panic!("expected odd case"),
        }
    }

    #[test]
    fn rotation_frame_matches_closed_form() {
        // phi = pi/2 frame against the standard set: T should conjugate like
        // cos(pi/4) e - sin(pi/4) e^{12} up to a central factor. Verified by
        // conjugation, not by comparing T directly.
        let sig = cl(2, 0);
        let phi = std::f64::consts::FRAC_PI_2;
        let e1 = Multivector::<f64>::generator(sig, 1);
        let e2 = Multivector::<f64>::generator(sig, 2);
        let h = GeneratorSet::new(
            sig,
            vec![
                &e1.scale(phi.cos()) + &e2.scale(phi.sin()),
                &e1.scale(-phi.sin()) + &e2.scale(phi.cos()),
            ],
        );
        let g = GeneratorSet::standard(sig);
        let result = intertwiner(&h, &g, TOL).unwrap();
        assert!(result.residual < 1e-12);
        // the closed-form rotor also intertwines
        let rotor = &Multivector::<f64>::identity(sig).scale(f64::cos(phi / 2.0))
            - &Multivector::basis_blade(sig, 0b11).scale(f64::sin(phi / 2.0));
        let rotor_inv = rotor.inverse().unwrap();
        let res = relation_residual(&h, &g, &rotor, &rotor_inv, &IntertwinerCase::Even);
        assert!(res < 1e-12);
    }

    #[test]
    fn center_freedom_preserves_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // even n: any nonzero scalar multiple stays valid
        let sig = cl(2, 2);
        let p_el = random_conjugator(sig, &mut rng);
        let h = GeneratorSet::conjugated(&p_el).unwrap();
        let g = GeneratorSet::standard(sig);
        let result = intertwiner(&h, &g, TOL).unwrap();
        let t2 = result.t.scale(-3.7);
        let t2_inv = t2.inverse().unwrap();
        assert!(relation_residual(&h, &g, &t2, &t2_inv, &result.case) < 1e-9);

        // odd n: lambda e + nu e^{1..n}, invertible
        let sig = cl(3, 0);
        let p_el = random_conjugator(sig, &mut rng);
        let h = GeneratorSet::conjugated(&p_el).unwrap();
        let g = GeneratorSet::standard(sig);
        let result = intertwiner(&h, &g, TOL).unwrap();
        let central = &Multivector::<f64>::identity(sig).scale(1.3)
            + &Multivector::basis_blade(sig, 0b111).scale(-0.4);
        let t2 = result.t.geometric_product(&central);
        let t2_inv = t2.inverse().unwrap();
        assert!(relation_residual(&h, &g, &t2, &t2_inv, &result.case) < 1e-9);
    }

    #[test]
    fn determinism_of_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let sig = cl(3, 0);
        let p_el = random_conjugator(sig, &mut rng);
        let set = GeneratorSet::conjugated(&p_el).unwrap();
        let a = intertwiner_to_standard(&set, TOL).unwrap();
        let b = intertwiner_to_standard(&set, TOL).unwrap();
        assert_eq!(a.chosen_f, b.chosen_f);
        assert_eq!(a.t.coeffs(), b.t.coeffs());
    }

    #[test]
    fn invalid_set_is_rejected() {
        let sig = cl(2, 0);
        let e1 = Multivector::<f64>::generator(sig, 1);
        let set = GeneratorSet::new(sig, vec![e1.clone(), e1]);
        assert!(matches!(
            intertwiner_to_standard(&set, TOL),
            Err(PauliError::InvalidGenerators { .. })
        ));
    }
}
