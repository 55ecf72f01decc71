//! Exact integers: `i128` fast path with automatic promotion to `BigInt`.
//!
//! Every arithmetic operation is exact; overflow promotes, and results that
//! fit shrink back, so the fast representation dominates in practice.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i128),
    Big(Box<BigInt>),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    pub fn from_i64(v: i64) -> Self {
        Int::Small(v as i128)
    }

    pub fn from_i128(v: i128) -> Self {
        Int::Small(v)
    }

    fn from_big(b: BigInt) -> Self {
        match b.to_i128() {
            Some(v) => Int::Small(v),
            None => Int::Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => (**b).clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Int::Small(v) => i64::try_from(*v).ok(),
            Int::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Int::Small(1) | Int::Small(-1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    pub fn neg(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-(**b).clone()),
        }
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_add(*b) {
                Some(c) => Int::Small(c),
                None => Int::from_big(BigInt::from(*a) + BigInt::from(*b)),
            },
            _ => Int::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_sub(*b) {
                Some(c) => Int::Small(c),
                None => Int::from_big(BigInt::from(*a) - BigInt::from(*b)),
            },
            _ => Int::from_big(self.to_big() - other.to_big()),
        }
    }

    pub fn mul(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_mul(*b) {
                Some(c) => Int::Small(c),
                None => Int::from_big(BigInt::from(*a) * BigInt::from(*b)),
            },
            _ => Int::from_big(self.to_big() * other.to_big()),
        }
    }

    /// Exact division: `Some(q)` with `q * d == self`, if it exists.
    pub fn exact_div(&self, d: &Int) -> Option<Int> {
        if d.is_zero() {
            return if self.is_zero() { Some(Int::ZERO) } else { None };
        }
        match (self, d) {
            (Int::Small(a), Int::Small(b)) => {
                if a % b == 0 {
                    Some(Int::Small(a / b))
                } else {
                    None
                }
            }
            _ => {
                let (q, r) = self.to_big().div_rem(&d.to_big());
                if r.is_zero() {
                    Some(Int::from_big(q))
                } else {
                    None
                }
            }
        }
    }

    pub fn divides(&self, other: &Int) -> bool {
        other.exact_div(self).is_some()
    }

    /// Extended gcd: `(g, x, y)` with `g = x*self + y*other`, `g >= 0`.
    pub fn bezout(&self, other: &Int) -> (Int, Int, Int) {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => {
                if let Some(r) = bezout_i128(*a, *b) {
                    return r;
                }
                big_bezout(&self.to_big(), &other.to_big())
            }
            _ => big_bezout(&self.to_big(), &other.to_big()),
        }
    }

    pub fn gcd(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => {
                // i128 gcd of magnitudes fits except for i128::MIN edge cases
                if *a != i128::MIN && *b != i128::MIN {
                    return Int::Small(a.abs().gcd(&b.abs()));
                }
                Int::from_big(self.to_big().gcd(&other.to_big()))
            }
            _ => Int::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// Pivot preference weight: 1 for units, growing with magnitude (saturating).
    pub fn pivot_weight(&self) -> u64 {
        match self {
            Int::Small(v) => {
                let a = v.unsigned_abs();
                if a > u64::MAX as u128 {
                    u64::MAX
                } else {
                    a as u64
                }
            }
            Int::Big(_) => u64::MAX,
        }
    }

    pub fn rem_euclid(&self, modulus: &Int) -> Int {
        match (self, modulus) {
            (Int::Small(a), Int::Small(m)) if *m != 0 => Int::Small(a.rem_euclid(*m)),
            _ => {
                let m = modulus.to_big();
                if m.is_zero() {
                    return self.clone();
                }
                let r = self.to_big().mod_floor(&m.abs());
                Int::from_big(r)
            }
        }
    }
}

fn bezout_i128(a: i128, b: i128) -> Option<(Int, Int, Int)> {
    // Guard against overflow in the extended Euclid loop by bounding inputs.
    const LIM: i128 = i64::MAX as i128;
    if a.abs() > LIM || b.abs() > LIM {
        return None;
    }
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        let r = r0 - q * r1;
        r0 = r1;
        r1 = r;
        let s = s0 - q * s1;
        s0 = s1;
        s1 = s;
        let t = t0 - q * t1;
        t0 = t1;
        t1 = t;
    }
    if r0 < 0 {
        r0 = -r0;
        s0 = -s0;
        t0 = -t0;
    }
    Some((Int::Small(r0), Int::Small(s0), Int::Small(t0)))
}

fn big_bezout(a: &BigInt, b: &BigInt) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        x = -x;
        y = -y;
    }
    (Int::from_big(g), Int::from_big(x), Int::from_big(y))
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::from_i64(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotion_round_trip() {
        let big = Int::Small(i128::MAX).mul(&Int::Small(3));
        assert!(matches!(big, Int::Big(_)));
        let back = big.exact_div(&Int::Small(3)).unwrap();
        assert_eq!(back, Int::Small(i128::MAX));
        assert!(matches!(back, Int::Small(_)));
    }

    #[test]
    fn bezout_small() {
        let (g, x, y) = Int::from_i64(12).bezout(&Int::from_i64(18));
        assert_eq!(g, Int::from_i64(6));
        assert_eq!(
            Int::from_i64(12).mul(&x).add(&Int::from_i64(18).mul(&y)),
            Int::from_i64(6)
        );
    }

    #[test]
    fn bezout_with_zero() {
        let (g, x, _) = Int::from_i64(-7).bezout(&Int::ZERO);
        assert_eq!(g, Int::from_i64(7));
        assert_eq!(x, Int::from_i64(-1));
    }

    #[test]
    fn exact_div() {
        assert_eq!(
            Int::from_i64(6).exact_div(&Int::from_i64(-3)),
            Some(Int::from_i64(-2))
        );
        assert_eq!(Int::from_i64(7).exact_div(&Int::from_i64(2)), None);
    }
}
