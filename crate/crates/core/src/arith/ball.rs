//! Midpoint-radius ball arithmetic over dyadic rationals.
//!
//! A [`Real`] is the set `[m - r, m + r]` where the midpoint `m = man * 2^exp`
//! is an exact dyadic number truncated to a working precision, and `r` is an
//! `f64` upper bound that is only ever rounded upwards. Every operation
//! returns a ball containing the exact result for all inputs in the operand
//! balls. [`Scalar`] is the rectangular complex analogue.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Smallest precision accepted by constructors.
pub const MIN_PRECISION: u32 = 32;

fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

fn down(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.next_down().max(0.0)
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return a + b;
    }
    up(a + b)
}

fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    up(a * b)
}

/// `2^e` rounded upward into `f64`.
fn pow2_up(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        f64::from_bits(1)
    } else {
        2f64.powi(e as i32)
    }
}

/// `2^e` rounded downward into `f64` (zero on underflow).
fn pow2_down(e: i64) -> f64 {
    if e > 1023 {
        f64::MAX
    } else if e < -1074 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

/// Upper and lower `f64` bounds on `|man| * 2^exp`.
fn magnitude_bounds(man: &BigInt, exp: i64) -> (f64, f64) {
    if man.is_zero() {
        return (0.0, 0.0);
    }
    let bits = man.bits() as i64;
    let shift = (bits - 53).max(0);
    let top = (man.abs() >> shift as usize).to_u64().unwrap_or(u64::MAX) as f64;
    let e = exp + shift;
    let top_hi = if shift > 0 { top + 1.0 } else { top };
    let hi = mul_up(top_hi, pow2_up(e)).max(f64::from_bits(1));
    let lo = down(top * pow2_down(e));
    (hi, lo)
}

/// Real ball `[mid - rad, mid + rad]` with `mid = man * 2^exp`.
#[derive(Clone, Debug)]
pub struct Real {
    man: BigInt,
    exp: i64,
    rad: f64,
    prec: u32,
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real { man: BigInt::zero(), exp: 0, rad: 0.0, prec: prec.max(MIN_PRECISION) }
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Real { man: n.into(), exp: 0, rad: 0.0, prec: prec.max(MIN_PRECISION) }.normalized()
    }

    /// Exact dyadic `man * 2^exp` (rounded to `prec`, error absorbed in the radius).
    pub fn from_dyadic(man: BigInt, exp: i64, prec: u32) -> Self {
        Real { man, exp, rad: 0.0, prec: prec.max(MIN_PRECISION) }.normalized()
    }

    /// Ball around the rational `num/den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let a = Real::from_int(num.clone(), prec);
        let b = Real::from_int(den.clone(), prec);
        a.div(&b)
    }

    /// Ball around an `f64` value, treated as exact.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Real::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, exp) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Real::from_dyadic(BigInt::from(m) * sign, exp, prec)
    }

    pub fn with_radius(mut self, extra: f64) -> Self {
        self.rad = add_up(self.rad, extra.abs());
        self
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn radius(&self) -> f64 {
        self.rad
    }

    pub fn set_precision(mut self, prec: u32) -> Self {
        self.prec = prec.max(MIN_PRECISION);
        self.normalized()
    }

    /// Midpoint as `f64` (nearest-ish; for display and numerics only).
    pub fn mid_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.man >> shift as usize).to_i64().unwrap_or(0) as f64;
        let e = self.exp + shift;
        if e < -1000 {
            top * 2f64.powi(-500) * 2f64.powi((e + 500).max(-1074) as i32)
        } else {
            top * 2f64.powi(e.min(1023) as i32)
        }
    }

    fn normalized(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz as usize;
            self.exp += tz as i64;
        }
        let bits = self.man.bits() as i64;
        let excess = bits - self.prec as i64;
        if excess > 0 {
            // truncation toward zero; error < 2^(exp+excess)
            let neg = self.man.is_negative();
            let mut m = self.man.abs() >> excess as usize;
            if neg {
                m = -m;
            }
            self.man = m;
            self.exp += excess;
            self.rad = add_up(self.rad, pow2_up(self.exp));
        }
        self
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> f64 {
        let (hi, _) = magnitude_bounds(&self.man, self.exp);
        add_up(hi, self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero if the ball touches zero).
    pub fn abs_lower(&self) -> f64 {
        let (_, lo) = magnitude_bounds(&self.man, self.exp);
        down(lo - self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() <= 0.0
    }

    /// Certifiably strictly positive.
    pub fn is_positive(&self) -> bool {
        self.man.is_positive() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative() && !self.contains_zero()
    }

    pub fn neg(&self) -> Real {
        Real { man: -&self.man, exp: self.exp, rad: self.rad, prec: self.prec }
    }

    pub fn add(&self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        let (man, exp) = match self.exp.cmp(&other.exp) {
            Ordering::Equal => (&self.man + &other.man, self.exp),
            Ordering::Less => {
                let s = (other.exp - self.exp) as usize;
                (&self.man + (&other.man << s), self.exp)
            }
            Ordering::Greater => {
                let s = (self.exp - other.exp) as usize;
                ((&self.man << s) + &other.man, other.exp)
            }
        };
        Real { man, exp, rad: add_up(self.rad, other.rad), prec }.normalized()
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        let (a_hi, _) = magnitude_bounds(&self.man, self.exp);
        let (b_hi, _) = magnitude_bounds(&other.man, other.exp);
        let rad = add_up(
            add_up(mul_up(a_hi, other.rad), mul_up(b_hi, self.rad)),
            mul_up(self.rad, other.rad),
        );
        Real { man: &self.man * &other.man, exp: self.exp + other.exp, rad, prec }.normalized()
    }

    pub fn mul_int(&self, k: i64) -> Real {
        self.mul(&Real::from_int(k, self.prec))
    }

    /// Multiply by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Real {
        let scale = pow2_up(k);
        Real { man: self.man.clone(), exp: self.exp + k, rad: mul_up(self.rad, scale), prec: self.prec }
    }

    pub fn sqr(&self) -> Real {
        self.mul(self)
    }

    pub fn inv(&self) -> Result<Real, ArithError> {
        let lo = self.abs_lower();
        if lo <= 0.0 {
            return Err(ArithError::DivisionByZero);
        }
        let prec = self.prec;
        let bits = self.man.bits() as i64;
        let shift = prec as i64 + bits + 2;
        let num = BigInt::one() << shift as usize;
        let q = num.div_floor(&self.man);
        let exp = -shift - self.exp;
        // truncation error of the quotient is below one unit
        let trunc = pow2_up(exp);
        let (_, mlo) = magnitude_bounds(&self.man, self.exp);
        let denom = down(mlo * down(mlo - self.rad));
        let prop = if self.rad == 0.0 { 0.0 } else if denom <= 0.0 { f64::INFINITY } else { up(self.rad / denom) };
        Ok(Real { man: q, exp, rad: add_up(prop, trunc), prec }.normalized())
    }

    pub fn div(&self, other: &Real) -> Result<Real, ArithError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Square root of a certifiably nonnegative ball.
    pub fn sqrt(&self) -> Result<Real, ArithError> {
        if self.man.is_zero() && self.rad == 0.0 {
            return Ok(Real::zero(self.prec));
        }
        let prec = self.prec;
        if self.man.is_negative() || self.abs_lower() <= 0.0 {
            if self.man.is_negative() && self.abs_lower() > 0.0 {
                return Err(ArithError::NegativeSqrt);
            }
            // ball touches zero: enclose [0, sqrt(upper)]
            let hi = up(up(self.abs_upper()).sqrt());
            let half = Real::from_f64(hi / 2.0, prec);
            return Ok(half.with_radius(up(hi / 2.0)));
        }
        // scale so the integer square root has about prec bits
        let bits = self.man.bits() as i64;
        let mut shift = 2 * prec as i64 + 4 - bits;
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = if shift >= 0 { &self.man << shift as usize } else { &self.man >> (-shift) as usize };
        // right-shift truncation of the radicand is bounded by one unit at exponent (exp - shift)
        let radicand_err = if shift < 0 { pow2_up(self.exp - shift) } else { 0.0 };
        let root = scaled.sqrt();
        let exp = (self.exp - shift) / 2;
        let trunc = pow2_up(exp);
        let lo = down(self.abs_lower() - radicand_err);
        let total_rad = add_up(self.rad, radicand_err);
        let prop = if total_rad == 0.0 {
            0.0
        } else if lo <= 0.0 {
            f64::INFINITY
        } else {
            up(total_rad / down(lo.sqrt()))
        };
        Ok(Real { man: root, exp, rad: add_up(prop, add_up(trunc, trunc)), prec }.normalized())
    }

    pub fn pi(prec: u32) -> Real {
        super::consts::pi(prec)
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10).pow(digits as u32);
        let scaled = if self.exp >= 0 {
            (&self.man << self.exp as usize) * &ten
        } else {
            let num = &self.man * &ten;
            let den = BigInt::one() << (-self.exp) as usize;
            let (q, r) = num.div_mod_floor(&den);
            if (r << 1usize) >= den { q + 1 } else { q }
        };
        let neg = scaled.sign() == Sign::Minus;
        let s = scaled.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// The exact midpoint `(mantissa, exponent)`.
    pub fn midpoint_parts(&self) -> (&BigInt, i64) {
        (&self.man, self.exp)
    }

    /// The midpoint as an exact ball.
    pub fn midpoint(&self) -> Real {
        Real { rad: 0.0, ..self.clone() }
    }

    /// True iff the two balls intersect.
    pub fn overlaps(&self, other: &Real) -> bool {
        self.sub(other).contains_zero()
    }

    /// `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Real) -> bool {
        let d = self.sub(other);
        // |mid difference| + other.rad <= self.rad
        let (dist, _) = magnitude_bounds(&d.man, d.exp);
        add_up(dist, other.rad) <= self.rad
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {:.3e}", self.to_decimal(f.precision().unwrap_or(12)), self.rad)
    }
}

/// Rectangular complex ball.
#[derive(Clone, Debug)]
pub struct Scalar {
    pub re: Real,
    pub im: Real,
}

impl Scalar {
    pub fn new(re: Real, im: Real) -> Self {
        Scalar { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Scalar { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Scalar::from_real(Real::from_int(1, prec))
    }

    pub fn i(prec: u32) -> Self {
        Scalar { re: Real::zero(prec), im: Real::from_int(1, prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.precision();
        Scalar { re, im: Real::zero(prec) }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Scalar::from_real(Real::from_int(n, prec))
    }

    pub fn from_c64(re: f64, im: f64, prec: u32) -> Self {
        Scalar { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn precision(&self) -> u32 {
        self.re.precision().max(self.im.precision())
    }

    /// Largest of the two component radii.
    pub fn radius(&self) -> f64 {
        self.re.radius().max(self.im.radius())
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.man.is_zero() && self.im.man.is_zero() && self.re.rad == 0.0 && self.im.rad == 0.0
    }

    /// Upper bound on `|z|` over the ball: `|mid| + radius`.
    pub fn abs_upper(&self) -> f64 {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        up(up(add_up(mul_up(a, a), mul_up(b, b))).sqrt())
    }

    /// Lower bound on `|z|` over the ball.
    pub fn abs_lower(&self) -> f64 {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        down(down(a * a + b * b).sqrt())
    }

    /// `|z| < tol` for every point of the ball.
    pub fn certifies_zero(&self, tol: f64) -> bool {
        self.abs_upper() < tol
    }

    /// Every point of the ball is nonzero.
    pub fn excludes_zero(&self) -> bool {
        !self.re.contains_zero() || !self.im.contains_zero()
    }

    pub fn neg(&self) -> Scalar {
        Scalar { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Scalar {
        Scalar { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        Scalar { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        Scalar { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.im.man.is_zero() && self.im.rad == 0.0 {
            return Scalar { re: self.re.mul(&o.re), im: self.re.mul(&o.im) };
        }
        if o.im.man.is_zero() && o.im.rad == 0.0 {
            return Scalar { re: self.re.mul(&o.re), im: self.im.mul(&o.re) };
        }
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Scalar { re, im }
    }

    pub fn mul_real(&self, r: &Real) -> Scalar {
        Scalar { re: self.re.mul(r), im: self.im.mul(r) }
    }

    /// `|z|^2` as a real ball.
    pub fn norm_sqr(&self) -> Real {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn inv(&self) -> Result<Scalar, ArithError> {
        if !self.excludes_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let d = self.norm_sqr().inv()?;
        Ok(Scalar { re: self.re.mul(&d), im: self.im.neg().mul(&d) })
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ArithError> {
        Ok(self.mul(&o.inv()?))
    }

    /// Principal square root. Fails if the ball meets the branch cut `(-inf, 0)`.
    pub fn sqrt(&self) -> Result<Scalar, ArithError> {
        let prec = self.precision();
        if self.im.man.is_zero() && self.im.rad == 0.0 && !self.re.is_negative() {
            if self.re.man.is_negative() || self.re.contains_zero() {
                if self.re.contains_zero() && !self.re.man.is_negative() {
                    return Ok(Scalar::from_real(self.re.sqrt()?));
                }
                return Err(ArithError::BranchAmbiguity);
            }
            return Ok(Scalar::from_real(self.re.sqrt()?));
        }
        let modulus = self.norm_sqr().sqrt()?;
        if self.re.is_positive() {
            let re = modulus.add(&self.re).mul_pow2(-1).sqrt()?;
            let im = self.im.div(&re.mul_pow2(1))?;
            Ok(Scalar { re, im })
        } else if !self.im.contains_zero() {
            let mut im = modulus.sub(&self.re).mul_pow2(-1).sqrt()?;
            if self.im.is_negative() {
                im = im.neg();
            }
            let re = self.im.div(&im.mul_pow2(1))?;
            Ok(Scalar { re, im })
        } else {
            let _ = prec;
            Err(ArithError::BranchAmbiguity)
        }
    }

    pub fn powi(&self, k: i64) -> Result<Scalar, ArithError> {
        let prec = self.precision();
        if k < 0 {
            return self.inv()?.powi(-k);
        }
        let mut result = Scalar::one(prec);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn set_precision(self, prec: u32) -> Scalar {
        Scalar { re: self.re.set_precision(prec), im: self.im.set_precision(prec) }
    }

    pub fn midpoint(&self) -> Scalar {
        Scalar { re: self.re.midpoint(), im: self.im.midpoint() }
    }

    /// `other` lies inside `self` componentwise.
    pub fn contains(&self, other: &Scalar) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }

    pub fn overlaps(&self, other: &Scalar) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(12);
        let (re, im) = (self.re.to_decimal(d), self.im.to_decimal(d));
        let im = match im.strip_prefix('-') {
            Some(rest) => format!("- {rest}"),
            None => format!("+ {im}"),
        };
        write!(f, "({re} {im}i) +/- {:.2e}", self.radius())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_enclosed() {
        let t = Real::from_ratio(&1.into(), &3.into(), 128).unwrap();
        let back = t.mul_int(3).sub(&Real::from_int(1, 128));
        assert!(back.abs_upper() < 1e-35);
        assert!((t.mid_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = Real::from_int(2, 256).sqrt().unwrap();
        let r = s.sqr().sub(&Real::from_int(2, 256));
        assert!(r.abs_upper() < 1e-70, "{}", r.abs_upper());
        assert_eq!(&s.to_decimal(10), "1.4142135624");
    }

    #[test]
    fn division_by_ball_containing_zero() {
        let z = Real::from_int(0, 64).with_radius(1e-3);
        assert!(matches!(z.inv(), Err(ArithError::DivisionByZero)));
    }

    #[test]
    fn complex_sqrt_branches() {
        let prec = 128;
        let minus_four = Scalar::from_int(-4, prec);
        assert!(matches!(minus_four.sqrt(), Err(ArithError::BranchAmbiguity)));
        let w = Scalar::from_c64(-3.0, 4.0, prec).sqrt().unwrap();
        let (re, im) = w.to_c64();
        assert!((re - 1.0).abs() < 1e-15 && (im - 2.0).abs() < 1e-15);
        let w = Scalar::from_c64(-3.0, -4.0, prec).sqrt().unwrap();
        let (re, im) = w.to_c64();
        assert!((re - 1.0).abs() < 1e-15 && (im + 2.0).abs() < 1e-15);
    }

    #[test]
    fn from_f64_roundtrip() {
        for x in [1.5, -0.1, 3.0e-200, 7.25e100] {
            assert_eq!(Real::from_f64(x, 64).mid_f64(), x);
        }
    }

    #[test]
    fn powers_and_inverse() {
        let z = Scalar::from_c64(0.6, 0.8, 200);
        let p = z.powi(-7).unwrap().mul(&z.powi(7).unwrap()).sub(&Scalar::one(200));
        assert!(p.certifies_zero(1e-50));
    }
}
