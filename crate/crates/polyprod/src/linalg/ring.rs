//! Coefficient rings as runtime descriptors: the integers and prime fields.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::int::Int;
use crate::error::InputError;

/// Runtime choice of coefficients, used at module boundaries.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CoeffSpec {
    Int,
    ModP(u64),
}

impl CoeffSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let t = text.trim();
        if t == "Z" || t == "z" {
            return Ok(CoeffSpec::Int);
        }
        if let Some(p) = t.strip_prefix("Zp:").or_else(|| t.strip_prefix("zp:")) {
            let p: u64 = p
                .parse()
                .map_err(|_| InputError::Parse(format!("invalid prime {p:?}")))?;
            if !is_prime(p) {
                return Err(InputError::NotPrime(p));
            }
            return Ok(CoeffSpec::ModP(p));
        }
        Err(InputError::Parse(format!(
            "coefficient ring {t:?} not recognized (use Z or Zp:<prime>)"
        )))
    }

    pub fn label(&self) -> String {
        match self {
            CoeffSpec::Int => "Z".into(),
            CoeffSpec::ModP(p) => format!("Z/{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == d {
            return true;
        }
        if n % d == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact coefficient ring (ℤ or F_p) presented as a descriptor object.
pub trait CoeffRing: Clone + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync + 'static;

    fn from_i64(&self, v: i64) -> Self::Elem;
    fn zero(&self) -> Self::Elem {
        self.from_i64(0)
    }
    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn inv_unit(&self, a: &Self::Elem) -> Self::Elem;
    /// Exact division: `Some(q)` with `q * d == a`.
    fn exact_div(&self, a: &Self::Elem, d: &Self::Elem) -> Option<Self::Elem>;
    /// `(g, x, y)` with `g = x*a + y*b` and `g` canonical (for fields, any
    /// nonzero argument yields a unit g).
    fn bezout(&self, a: &Self::Elem, b: &Self::Elem) -> (Self::Elem, Self::Elem, Self::Elem);
    /// Pivot preference: 1 for units, larger for worse pivots.
    fn pivot_weight(&self, a: &Self::Elem) -> u64;
    fn is_field(&self) -> bool;
    /// `(u, c)` with `c = u * a` the canonical associate (nonnegative for ℤ,
    /// monic 1 for fields); `u` is a unit.
    fn canonicalize(&self, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// Canonical representative of `a` modulo `d` (for reporting torsion
    /// coordinates); fields have no torsion so `a` is returned unchanged.
    fn rem_mod(&self, a: &Self::Elem, d: &Self::Elem) -> Self::Elem;
    fn spec(&self) -> CoeffSpec;
    fn elem_string(&self, a: &Self::Elem) -> String;
}

/// The ring of integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntRing;

impl CoeffRing for IntRing {
    type Elem = Int;

    fn from_i64(&self, v: i64) -> Int {
        Int::from_i64(v)
    }
    fn is_zero(&self, a: &Int) -> bool {
        a.is_zero()
    }
    fn neg(&self, a: &Int) -> Int {
        a.neg()
    }
    fn add(&self, a: &Int, b: &Int) -> Int {
        a.add(b)
    }
    fn sub(&self, a: &Int, b: &Int) -> Int {
        a.sub(b)
    }
    fn mul(&self, a: &Int, b: &Int) -> Int {
        a.mul(b)
    }
    fn is_unit(&self, a: &Int) -> bool {
        a.is_unit()
    }
    fn inv_unit(&self, a: &Int) -> Int {
        debug_assert!(a.is_unit());
        a.clone()
    }
    fn exact_div(&self, a: &Int, d: &Int) -> Option<Int> {
        a.exact_div(d)
    }
    fn bezout(&self, a: &Int, b: &Int) -> (Int, Int, Int) {
        a.bezout(b)
    }
    fn pivot_weight(&self, a: &Int) -> u64 {
        a.pivot_weight()
    }
    fn is_field(&self) -> bool {
        false
    }
    fn canonicalize(&self, a: &Int) -> (Int, Int) {
        if a.is_negative() {
            (Int::from_i64(-1), a.neg())
        } else {
            (Int::ONE, a.clone())
        }
    }
    fn rem_mod(&self, a: &Int, d: &Int) -> Int {
        a.rem_euclid(d)
    }
    fn spec(&self) -> CoeffSpec {
        CoeffSpec::Int
    }
    fn elem_string(&self, a: &Int) -> String {
        format!("{a}")
    }
}

/// The field with `p` elements, `p` prime.
#[derive(Clone, Copy, Debug)]
pub struct FpRing {
    pub p: u64,
}

impl FpRing {
    pub fn new(p: u64) -> Result<Self, InputError> {
        if !is_prime(p) {
            return Err(InputError::NotPrime(p));
        }
        Ok(FpRing { p })
    }

    fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }
}

impl CoeffRing for FpRing {
    type Elem = u64;

    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i128(v as i128)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn inv_unit(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        // Fermat
        let mut base = *a as u128;
        let mut exp = self.p - 2;
        let mut acc: u128 = 1;
        let p = self.p as u128;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u64
    }
    fn exact_div(&self, a: &u64, d: &u64) -> Option<u64> {
        if *d == 0 {
            return if *a == 0 { Some(0) } else { None };
        }
        Some(self.mul(a, &self.inv_unit(d)))
    }
    fn bezout(&self, a: &u64, b: &u64) -> (u64, u64, u64) {
        if *a != 0 {
            (1, self.inv_unit(a), 0)
        } else if *b != 0 {
            (1, 0, self.inv_unit(b))
        } else {
            (0, 0, 0)
        }
    }
    fn pivot_weight(&self, a: &u64) -> u64 {
        if *a == 0 {
            u64::MAX
        } else {
            1
        }
    }
    fn is_field(&self) -> bool {
        true
    }
    fn canonicalize(&self, a: &u64) -> (u64, u64) {
        if *a == 0 {
            (1, 0)
        } else {
            (self.inv_unit(a), 1)
        }
    }
    fn rem_mod(&self, a: &u64, _d: &u64) -> u64 {
        *a
    }
    fn spec(&self) -> CoeffSpec {
        CoeffSpec::ModP(self.p)
    }
    fn elem_string(&self, a: &u64) -> String {
        format!("{a}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(97));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }

    #[test]
    fn fp_inverse() {
        let f = FpRing::new(7).unwrap();
        for a in 1..7u64 {
            assert_eq!(f.mul(&a, &f.inv_unit(&a)), 1);
        }
    }

    #[test]
    fn coeff_spec_parse() {
        assert_eq!(CoeffSpec::parse("Z").unwrap(), CoeffSpec::Int);
        assert_eq!(CoeffSpec::parse("Zp:5").unwrap(), CoeffSpec::ModP(5));
        assert!(CoeffSpec::parse("Zp:6").is_err());
    }
}
