//! Reference arithmetic for tests: binary fixed point with 384 fractional
//! bits (about 115 decimal digits), real and complex.
//!
//! Inputs given as `f64` are converted exactly, so an oracle value and a
//! library value are computed from bit-identical parameters.

use std::ops::Neg;

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

const FRAC_BITS: usize = 384;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn one() -> Self {
        Fixed(BigInt::one() << FRAC_BITS)
    }

    pub fn int(n: i64) -> Self {
        Fixed(BigInt::from(n) << FRAC_BITS)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Fixed((BigInt::from(num) << FRAC_BITS) / BigInt::from(den))
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite input {x}");
        let (mant, exp, sign) = x.integer_decode();
        let mut m = BigInt::from(mant);
        let shift = exp as i64 + FRAC_BITS as i64;
        m = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        };
        Fixed(if sign < 0 { -m } else { m })
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 significant bits before the float conversion
        let bits = self.0.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.0 >> drop as usize).to_f64().unwrap();
        top * 2f64.powi((drop - FRAC_BITS as i64) as i32)
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> FRAC_BITS)
    }

    pub fn div(&self, o: &Fixed) -> Fixed {
        assert!(!o.0.is_zero(), "division by zero");
        Fixed((&self.0 << FRAC_BITS) / &o.0)
    }

    pub fn abs(&self) -> Fixed {
        Fixed(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn sqrt(&self) -> Fixed {
        assert!(!self.0.is_negative(), "square root of a negative number");
        Fixed((&self.0 << FRAC_BITS).sqrt())
    }

    pub fn powi(&self, n: i64) -> Fixed {
        let mut r = Fixed::one();
        for _ in 0..n.unsigned_abs() {
            r = r.mul(self);
        }
        if n < 0 {
            Fixed::one().div(&r)
        } else {
            r
        }
    }

    /// `prod_{k<n} (1 - a q^k)`.
    pub fn qpoch(a: &Fixed, q: &Fixed, n: usize) -> Fixed {
        let one = Fixed::one();
        let mut p = one.clone();
        let mut x = a.clone();
        for _ in 0..n {
            p = p.mul(&one.sub(&x));
            x = x.mul(q);
        }
        p
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

/// Complex number over [`Fixed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedC {
    pub re: Fixed,
    pub im: Fixed,
}

impl FixedC {
    pub fn new(re: Fixed, im: Fixed) -> Self {
        FixedC { re, im }
    }

    pub fn real(re: Fixed) -> Self {
        FixedC {
            re,
            im: Fixed::zero(),
        }
    }

    pub fn one() -> Self {
        FixedC::real(Fixed::one())
    }

    pub fn i() -> Self {
        FixedC::new(Fixed::zero(), Fixed::one())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        FixedC::new(Fixed::from_f64(re), Fixed::from_f64(im))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &FixedC) -> FixedC {
        FixedC::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &FixedC) -> FixedC {
        FixedC::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> FixedC {
        FixedC::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &FixedC) -> FixedC {
        FixedC::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, s: &Fixed) -> FixedC {
        FixedC::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn norm_sqr(&self) -> Fixed {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &FixedC) -> FixedC {
        let d = o.norm_sqr();
        let conj = FixedC::new(o.re.clone(), -o.im.clone());
        let n = self.mul(&conj);
        FixedC::new(n.re.div(&d), n.im.div(&d))
    }

    pub fn powi(&self, n: i64) -> FixedC {
        let mut r = FixedC::one();
        for _ in 0..n.unsigned_abs() {
            r = r.mul(self);
        }
        if n < 0 {
            FixedC::one().div(&r)
        } else {
            r
        }
    }

    /// `prod_{k<n} (1 - a q^k)` for real `q`.
    pub fn qpoch(a: &FixedC, q: &Fixed, n: usize) -> FixedC {
        let one = FixedC::one();
        let mut p = one.clone();
        let mut x = a.clone();
        for _ in 0..n {
            p = p.mul(&one.sub(&x));
            x = x.scale(q);
        }
        p
    }

    /// `(a;q)_m` for any integer `m`, negative indices by `1/prod_{k=1}^{-m}(1 - a q^{-k})`.
    pub fn qpoch_int(a: &FixedC, q: &Fixed, m: i64) -> FixedC {
        if m >= 0 {
            return FixedC::qpoch(a, q, m as usize);
        }
        let one = FixedC::one();
        let inv = Fixed::one().div(q);
        let mut p = one.clone();
        let mut x = a.clone();
        for _ in 0..(-m) {
            x = x.scale(&inv);
            p = p.mul(&one.sub(&x));
        }
        one.div(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_doubles() {
        for x in [0.1, -3.75, 1e-30, 12345.678, 0.0] {
            assert_eq!(Fixed::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn sqrt_two_squared() {
        let two = Fixed::int(2);
        let r = two.sqrt();
        let err = r.mul(&r).sub(&two).abs();
        assert!(err < Fixed::ratio(1, 1).div(&Fixed::int(10).powi(100)));
    }

    #[test]
    fn complex_division() {
        let a = FixedC::from_f64(1.0, 2.0);
        let b = FixedC::from_f64(-0.5, 0.25);
        let back = a.div(&b).mul(&b);
        let (re, im) = back.to_f64();
        assert!((re - 1.0).abs() < 1e-30 && (im - 2.0).abs() < 1e-30);
    }

    #[test]
    fn negative_index_pochhammer() {
        let q = Fixed::ratio(1, 2);
        let a = FixedC::from_f64(0.25, 0.0);
        let (re, _) = FixedC::qpoch_int(&a, &q, -1).to_f64();
        assert_eq!(re, 2.0);
    }
}
