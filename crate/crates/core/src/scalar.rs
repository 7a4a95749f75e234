//! Exact scalars of `Q` and `Q(i)` and the field data `(base, σ, ε)`.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Rationals,
    GaussianRationals,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Involution {
    Identity,
    Conjugation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }
}

/// The ground field together with its involution and the reflexivity sign.
///
/// Only the three normalized types are constructible: alternating
/// `(Identity, Minus)`, symmetric `(Identity, Plus)` and Hermitian
/// `(Conjugation, Plus)`, the last one over `Q(i)` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    base: Base,
    sigma: Involution,
    epsilon: Epsilon,
}

impl FieldSpec {
    pub fn new(base: Base, sigma: Involution, epsilon: Epsilon) -> Result<Self> {
        match (base, sigma, epsilon) {
            (Base::Rationals, Involution::Conjugation, _) => Err(Error::InvalidFieldSpec),
            (_, Involution::Conjugation, Epsilon::Minus) => Err(Error::InvalidFieldSpec),
            _ => Ok(FieldSpec { base, sigma, epsilon }),
        }
    }

    pub fn alternating(base: Base) -> Self {
        FieldSpec {
            base,
            sigma: Involution::Identity,
            epsilon: Epsilon::Minus,
        }
    }

    pub fn symmetric(base: Base) -> Self {
        FieldSpec {
            base,
            sigma: Involution::Identity,
            epsilon: Epsilon::Plus,
        }
    }

    pub fn hermitian() -> Self {
        FieldSpec {
            base: Base::GaussianRationals,
            sigma: Involution::Conjugation,
            epsilon: Epsilon::Plus,
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn sigma(&self) -> Involution {
        self.sigma
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn epsilon_scalar(&self) -> Scalar {
        Scalar::from_int(self.epsilon.sign())
    }

    pub fn apply(&self, x: &Scalar) -> Scalar {
        apply_sigma(*self, x)
    }

    /// Whether `x` lives in the base field.
    pub fn contains(&self, x: &Scalar) -> bool {
        self.base == Base::GaussianRationals || x.im.is_zero()
    }
}

pub fn apply_sigma(spec: FieldSpec, x: &Scalar) -> Scalar {
    match spec.sigma {
        Involution::Identity => x.clone(),
        Involution::Conjugation => x.conj(),
    }
}

/// An element `re + im·i` of `Q(i)`; elements of `Q` have `im = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn gauss(re: i64, im: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `x·conj(x)`, a non-negative rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Scalar::real(self.re.recip()));
        }
        let n = self.norm();
        Ok(Scalar {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// A square root inside `Q(i)` (or inside `Q` when `base` is `Rationals`).
    pub fn sqrt_in(&self, base: Base) -> Option<Scalar> {
        if self.im.is_zero() {
            if !self.re.is_negative() {
                return rational_sqrt(&self.re).map(Scalar::real);
            }
            if base == Base::Rationals {
                return None;
            }
            return rational_sqrt(&-self.re.clone()).map(|s| Scalar {
                re: BigRational::zero(),
                im: s,
            });
        }
        if base == Base::Rationals {
            return None;
        }
        let m = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let x = rational_sqrt(&((&self.re + &m) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (&two * &x);
        Some(Scalar { re: x, im: y })
    }

    /// Some `z` with `z·conj(z) = self`, for a non-negative rational `self`.
    ///
    /// Writes `self = n/d` and decomposes `n·d = u² + v²` from its
    /// factorization; gives up when `n·d` has a composite cofactor beyond the
    /// trial-division range, or does not fit in 128 bits.
    pub fn norm_preimage(&self) -> Option<Scalar> {
        if !self.im.is_zero() || self.re.is_negative() {
            return None;
        }
        if let Some(s) = rational_sqrt(&self.re) {
            return Some(Scalar::real(s));
        }
        let n = (self.re.numer() * self.re.denom()).to_u128()?;
        let (u, v) = crate::arith::two_squares(n)?;
        let d = self.re.denom().clone();
        Some(Scalar {
            re: BigRational::new(BigInt::from(u), d.clone()),
            im: BigRational::new(BigInt::from(v), d),
        })
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::real(q)
    }
}

fn add_ref(a: &Scalar, b: &Scalar) -> Scalar {
    Scalar {
        re: &a.re + &b.re,
        im: &a.im + &b.im,
    }
}

fn sub_ref(a: &Scalar, b: &Scalar) -> Scalar {
    Scalar {
        re: &a.re - &b.re,
        im: &a.im - &b.im,
    }
}

fn mul_ref(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() || b.is_zero() {
        return Scalar::zero();
    }
    if a.im.is_zero() && b.im.is_zero() {
        return Scalar::real(&a.re * &b.re);
    }
    Scalar {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                $f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                $f(&self, rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                $f(self, &rhs)
            }
        }
    };
}

fn div_ref(a: &Scalar, b: &Scalar) -> Scalar {
    a.checked_div(b).expect("division by zero")
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_ref);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = mul_ref(self, rhs);
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `p/q` for rationals, `p/q+r/s*i` (or `p/q-r/s*i`) otherwise.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.re))?;
        if !self.im.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{}*i", fmt_rational(&-self.im.clone()))?;
            } else {
                write!(f, "+{}*i", fmt_rational(&self.im))?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseScalar(s.to_string());
        let t = s.trim();
        let Some(body) = t.strip_suffix("*i") else {
            return parse_rational(t).map(Scalar::real).ok_or_else(bad);
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1].is_ascii_digit())
            .ok_or_else(bad)?;
        let re = parse_rational(&body[..split]).ok_or_else(bad)?;
        let im_str = body[split..].strip_prefix('+').unwrap_or(&body[split..]);
        let im = parse_rational(im_str).ok_or_else(bad)?;
        Ok(Scalar { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn conjugation_and_identity() {
        let h = FieldSpec::hermitian();
        assert_eq!(h.apply(&Scalar::gauss(3, 2)), Scalar::gauss(3, -2));
        let s = FieldSpec::symmetric(Base::Rationals);
        assert_eq!(s.apply(&Scalar::ratio(5, 7)), Scalar::ratio(5, 7));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(Scalar::ratio(1, 2) + Scalar::ratio(1, 3), Scalar::ratio(5, 6));
        assert_eq!(Scalar::gauss(1, 1) * Scalar::gauss(1, -1), Scalar::from_int(2));
        let x = Scalar::gauss(2, 1);
        let inv = x.inv().unwrap();
        assert_eq!(inv, Scalar::new(q(2, 5), q(-1, 5)));
        assert!((&x * &inv).is_one());
        assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_spec_guards() {
        assert_eq!(
            FieldSpec::new(Base::Rationals, Involution::Conjugation, Epsilon::Plus),
            Err(Error::InvalidFieldSpec)
        );
        assert_eq!(
            FieldSpec::new(Base::GaussianRationals, Involution::Conjugation, Epsilon::Minus),
            Err(Error::InvalidFieldSpec)
        );
        for eps in [Epsilon::Plus, Epsilon::Minus] {
            let spec = FieldSpec::new(Base::Rationals, Involution::Identity, eps).unwrap();
            let e = spec.epsilon_scalar();
            assert!((&e * &spec.apply(&e)).is_one());
        }
    }

    #[test]
    fn square_roots() {
        assert_eq!(Scalar::ratio(9, 4).sqrt_in(Base::Rationals), Some(Scalar::ratio(3, 2)));
        assert_eq!(Scalar::from_int(2).sqrt_in(Base::GaussianRationals), None);
        assert_eq!(Scalar::from_int(-4).sqrt_in(Base::Rationals), None);
        assert_eq!(Scalar::from_int(-4).sqrt_in(Base::GaussianRationals), Some(Scalar::gauss(0, 2)));
        let z = Scalar::gauss(3, 4).sqrt_in(Base::GaussianRationals).unwrap();
        assert_eq!(&z * &z, Scalar::gauss(3, 4));
        let w = Scalar::ratio(5, 2).norm_preimage().unwrap();
        assert_eq!(Scalar::real(w.norm()), Scalar::ratio(5, 2));
        assert_eq!(Scalar::from_int(3).norm_preimage(), None);
        assert_eq!(Scalar::ratio(5, 3).norm_preimage(), None);
    }

    #[test]
    fn string_round_trip() {
        for (x, s) in [
            (Scalar::ratio(-3, 4), "-3/4"),
            (Scalar::gauss(3, 2), "3/1+2/1*i"),
            (Scalar::new(q(1, 2), q(-5, 3)), "1/2-5/3*i"),
        ] {
            assert_eq!(x.to_string(), s);
            assert_eq!(s.parse::<Scalar>().unwrap(), x);
        }
        assert_eq!("-1/2+-1/3*i".parse::<Scalar>().unwrap(), Scalar::new(q(-1, 2), q(-1, 3)));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    fn gaussian() -> impl Strategy<Value = Scalar> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| Scalar::new(q(a, b), q(c, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn sigma_is_a_ring_involution(x in gaussian(), y in gaussian()) {
            let h = FieldSpec::hermitian();
            prop_assert_eq!(h.apply(&h.apply(&x)), x.clone());
            prop_assert_eq!(h.apply(&(&x * &y)), h.apply(&x) * h.apply(&y));
            prop_assert_eq!(h.apply(&(&x + &y)), h.apply(&x) + h.apply(&y));
        }

        #[test]
        fn inverse_is_two_sided(x in gaussian()) {
            prop_assume!(!x.is_zero());
            let inv = x.inv().unwrap();
            prop_assert!((&x * &inv).is_one());
            prop_assert!((&inv * &x).is_one());
        }

        #[test]
        fn display_parses_back(x in gaussian()) {
            prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
        }
    }
}
