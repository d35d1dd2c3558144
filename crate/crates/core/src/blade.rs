//! Basis blades as bitmasks and their exact sign arithmetic.
//!
//! A blade e^A is encoded by an n-bit mask: bit k (0-based) set means the
//! generator e^{k+1} occurs in the ordered product. The empty mask is the
//! identity element e. All signs are computed in integer arithmetic; floating
//! point enters only through coefficients.

use crate::signature::Signature;

/// Bitmask encoding of an ordered multi-index A (subset of {1,...,n}).
pub type BladeIndex = usize;

/// Grade |A| of a blade.
#[inline]
pub fn grade(a: BladeIndex) -> usize {
    a.count_ones() as usize
}

/// Number of generator transpositions needed to merge the ordered products
/// e^A e^B into a single ascending sequence: pairs (i in A, j in B) with i > j.
#[inline]
fn merge_swaps(a: BladeIndex, b: BladeIndex) -> u32 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    swaps
}

/// Product of two basis blades: e^A e^B = sign * e^(A xor B).
///
/// The sign collects one factor -1 per transposition and one eta^{aa} per
/// repeated generator.
pub fn blade_product(a: BladeIndex, b: BladeIndex, sig: &Signature) -> (i8, BladeIndex) {
    let mut sign: i8 = if merge_swaps(a, b) % 2 == 0 { 1 } else { -1 };
    let mut common = a & b;
    while common != 0 {
        let bit = common.trailing_zeros() as usize;
        sign *= sig.eta(bit + 1);
        common &= common - 1;
    }
    (sign, a ^ b)
}

/// Sign of the reversion anti-automorphism on e^A: (-1)^{|A|(|A|-1)/2}.
#[inline]
pub fn reverse_sign(a: BladeIndex) -> i8 {
    let k = grade(a);
    if (k * k.wrapping_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the grade involution on e^A: (-1)^{|A|}.
#[inline]
pub fn involute_sign(a: BladeIndex) -> i8 {
    if grade(a) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign s with (e^A)^{-1} = s * e^A; also the sign of (e^A)^dagger.
///
/// s = (-1)^{|A|(|A|-1)/2} * prod_{a in A} eta^{aa}, so that e^A * (s e^A) = e.
pub fn inverse_sign(a: BladeIndex, sig: &Signature) -> i8 {
    let mut s = reverse_sign(a);
    let mut rest = a;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        s *= sig.eta(bit + 1);
        rest &= rest - 1;
    }
    s
}

/// Human-readable blade label: "" for the identity, "13" for e^{13}, ...
pub fn blade_label(a: BladeIndex) -> String {
    let mut s = String::new();
    let mut rest = a;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        s.push(char::from_digit(bit as u32 + 1, 10).unwrap());
        rest &= rest - 1;
    }
    s
}

/// Parse a blade label back to a mask. Digits must be ascending, unique and
/// within 1..=n.
pub fn parse_blade_label(label: &str, n: usize) -> Option<BladeIndex> {
    let mut mask: BladeIndex = 0;
    let mut prev = 0u32;
    for c in label.chars() {
        let d = c.to_digit(10)?;
        if d < 1 || d as usize > n || d <= prev {
            return None;
        }
        mask |= 1 << (d - 1);
        prev = d;
    }
    Some(mask)
}
