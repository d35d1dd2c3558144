//! Algebra signatures (p, q) and the diagonal metric.

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Hard upper bound on the number of generators: dense storage is 2^n
/// coefficients per element, so 8 keeps everything cache-sized.
pub const N_MAX: usize = 8;

/// The signature of Cl(p,q): `p` generators squaring to +e, `q` squaring
/// to -e. The diagonal metric eta is +1 for the first `p` indices and -1
/// for the remaining `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: u8,
    pub q: u8,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self, AlgebraError> {
        let n = p + q;
        if n < 1 || n > N_MAX {
            return Err(AlgebraError::BadSignature { p, q });
        }
        Ok(Signature {
            p: p as u8,
            q: q as u8,
        })
    }

    /// Total generator count n = p + q.
    #[inline]
    pub fn n(&self) -> usize {
        self.p as usize + self.q as usize
    }

    /// Number of basis blades, 2^n.
    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    /// Diagonal metric entry eta^{aa} for a 1-based generator index.
    #[inline]
    pub fn eta(&self, a: usize) -> i8 {
        debug_assert!(a >= 1 && a <= self.n());
        if a <= self.p as usize {
            1
        } else {
            -1
        }
    }

    /// (p - q) mod 4, in 0..4. Selects the admissible pseudoscalar values
    /// for odd n.
    pub fn p_minus_q_mod4(&self) -> usize {
        (self.p as isize - self.q as isize).rem_euclid(4) as usize
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cl({},{})", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_diagonal() {
        let sig = Signature::new(2, 1).unwrap();
        assert_eq!(sig.eta(1), 1);
        assert_eq!(sig.eta(2), 1);
        assert_eq!(sig.eta(3), -1);
        assert_eq!(sig.n(), 3);
        assert_eq!(sig.dim(), 8);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Signature::new(0, 0).is_err());
        assert!(Signature::new(9, 0).is_err());
        assert!(Signature::new(5, 4).is_err());
        assert!(Signature::new(8, 0).is_ok());
    }

    #[test]
    fn mod4_classes() {
        assert_eq!(Signature::new(1, 0).unwrap().p_minus_q_mod4(), 1);
        assert_eq!(Signature::new(3, 0).unwrap().p_minus_q_mod4(), 3);
        assert_eq!(Signature::new(1, 2).unwrap().p_minus_q_mod4(), 3);
        assert_eq!(Signature::new(2, 1).unwrap().p_minus_q_mod4(), 1);
    }
}
