//! Rational-endpoint interval arithmetic with certified enclosures for the
//! handful of transcendental values the bound formulas need (ln, exp, sqrt,
//! cbrt, pi, Euler's gamma). Endpoints are exact rationals; every operation
//! rounds outward, so a true value contained on entry stays contained.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::fmt;

/// Working precision in bits for series evaluation and dyadic compression.
const PREC: u64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(big(n))
}

pub fn dyadic_floor(x: &BigRational, bits: u64) -> BigRational {
    let scale: BigInt = BigInt::one() << bits;
    let v = (x.numer() * &scale).div_floor(x.denom());
    BigRational::new(v, scale)
}

pub fn dyadic_ceil(x: &BigRational, bits: u64) -> BigRational {
    let scale: BigInt = BigInt::one() << bits;
    let v = (x.numer() * &scale).div_ceil(x.denom());
    BigRational::new(v, scale)
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(rat_int(n))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        if c.is_negative() {
            Interval::new(&self.hi * c, &self.lo * c)
        } else {
            Interval::new(&self.lo * c, &self.hi * c)
        }
    }

    /// Division; the divisor interval must not contain zero.
    pub fn div(&self, rhs: &Interval) -> Interval {
        assert!(
            rhs.lo.is_positive() || rhs.hi.is_negative(),
            "division by interval containing zero"
        );
        let cands = [
            &self.lo / &rhs.lo,
            &self.lo / &rhs.hi,
            &self.hi / &rhs.lo,
            &self.hi / &rhs.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn recip(&self) -> Interval {
        Interval::point(BigRational::one()).div(self)
    }

    /// Clamp from below: enclosure of max(c, x).
    pub fn max_with(&self, c: &BigRational) -> Interval {
        Interval::new(self.lo.clone().max(c.clone()), self.hi.clone().max(c.clone()))
    }

    /// Pointwise-sound enclosure of min over several intervals.
    pub fn min_of(items: &[Interval]) -> Interval {
        assert!(!items.is_empty());
        let lo = items.iter().map(|i| i.lo.clone()).min().unwrap();
        let hi = items.iter().map(|i| i.hi.clone()).min().unwrap();
        Interval::new(lo, hi)
    }

    /// Outward dyadic rounding; keeps endpoint sizes bounded along long chains.
    pub fn compressed(&self) -> Interval {
        Interval::new(dyadic_floor(&self.lo, PREC), dyadic_ceil(&self.hi, PREC))
    }

    pub fn sqrt(&self) -> Interval {
        assert!(!self.lo.is_negative(), "sqrt of negative interval");
        Interval::new(sqrt_lower(&self.lo), sqrt_upper(&self.hi))
    }

    pub fn ln(&self) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(Error::DomainError(
                "ln of interval touching zero or below".into(),
            ));
        }
        let lo = ln_point(&self.lo);
        let hi = ln_point(&self.hi);
        Ok(Interval::new(lo.lo, hi.hi))
    }

    pub fn exp(&self) -> Interval {
        Interval::new(exp_point(&self.lo).lo, exp_point(&self.hi).hi)
    }

    /// Integer power, n >= 0.
    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::point(BigRational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.lo.to_f64().unwrap_or(f64::NAN),
            self.hi.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64();
        write!(f, "[{a:.12e}, {b:.12e}]")
    }
}

/// Rational lower bound of sqrt(x), x >= 0.
pub fn sqrt_lower(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    let scale: BigInt = BigInt::one() << 128;
    let inner = x.numer() * x.denom() * &scale * &scale;
    let root = inner.sqrt();
    BigRational::new(root, x.denom() * scale)
}

/// Rational upper bound of sqrt(x), x >= 0.
pub fn sqrt_upper(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    let scale: BigInt = BigInt::one() << 128;
    let inner = x.numer() * x.denom() * &scale * &scale;
    let root = inner.sqrt() + 1;
    BigRational::new(root, x.denom() * scale)
}

/// Round up to `bits` fractional bits. Search boxes only need an upper
/// bound on their endpoints; a denominator of 2^bits keeps the downstream
/// rational arithmetic small where a 2^128-scale bound would bloat it.
pub fn coarse_upper(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled_num = x.numer() * &scale;
    let ceil = -(-scaled_num).div_floor(x.denom());
    BigRational::new(ceil, scale)
}

/// Enclosure of cbrt(x) for x >= 0.
pub fn cbrt_interval(x: &BigRational) -> Interval {
    assert!(!x.is_negative());
    let scale: BigInt = BigInt::one() << 96;
    let s3 = &scale * &scale * &scale;
    let inner = x.numer() * x.denom() * x.denom() * s3;
    let root = inner.nth_root(3);
    Interval::new(
        BigRational::new(root.clone(), x.denom() * &scale),
        BigRational::new(root + 1, x.denom() * scale),
    )
}

/// atanh-series enclosure of ln(m) for m in [1, 2), fixed-point with directed
/// rounding. Returns a tight interval.
fn ln_mantissa(m: &BigRational) -> Interval {
    debug_assert!(*m >= BigRational::one() && *m < rat_int(2));
    let scale: BigInt = BigInt::one() << PREC;
    let t = (m - BigRational::one()) / (m + BigRational::one()); // in [0, 1/3)
    let t_lo = (t.numer() * &scale).div_floor(t.denom());
    let t_hi = (t.numer() * &scale).div_ceil(t.denom());
    let sq = &scale * &scale;
    let mut pow_lo = t_lo.clone();
    let mut pow_hi = t_hi.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let terms = 64u32; // t < 1/3 so tail < 3^-129
    for j in 0..terms {
        let k = big(2 * j as i64 + 1);
        sum_lo += pow_lo.div_floor(&k);
        sum_hi += pow_hi.div_ceil(&k);
        pow_lo = (&pow_lo * &t_lo * &t_lo).div_floor(&sq);
        pow_hi = (&pow_hi * &t_hi * &t_hi).div_ceil(&sq);
    }
    // tail <= t^(2K+1)/(2K+1) * 1/(1-t^2) <= pow_hi * 9/8 (t <= 1/3)
    let tail = (pow_hi * big(9)).div_ceil(&big(8)) + 1;
    Interval::new(
        BigRational::new(sum_lo * 2, scale.clone()),
        BigRational::new((sum_hi + tail) * 2, scale),
    )
}

static LN2: Lazy<Interval> = Lazy::new(|| ln_mantissa(&BigRational::new(big(3), big(2))).add(&{
    // ln 2 = ln(3/2) + ln(4/3); both mantissas are in [1, 2)
    ln_mantissa(&BigRational::new(big(4), big(3)))
}));

/// Certified enclosure of ln(x) for a positive rational x.
pub fn ln_point(x: &BigRational) -> Interval {
    assert!(x.is_positive(), "ln of nonpositive rational");
    // normalize x = m * 2^e with m in [1, 2)
    let bits_num = x.numer().bits() as i64;
    let bits_den = x.denom().bits() as i64;
    let mut e = bits_num - bits_den;
    let two = rat_int(2);
    let mut m = if e >= 0 {
        x / BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        x * BigRational::from_integer(BigInt::one() << (-e) as u64)
    };
    while m >= two {
        m = m / &two;
        e += 1;
    }
    while m < BigRational::one() {
        m = m * &two;
        e -= 1;
    }
    // compress m so series arithmetic stays small
    let m_lo = dyadic_floor(&m, PREC).max(BigRational::one());
    let m_hi = {
        let c = dyadic_ceil(&m, PREC);
        if c >= two {
            m.clone()
        } else {
            c
        }
    };
    let body = Interval::new(ln_mantissa(&m_lo).lo, ln_mantissa(&m_hi).hi);
    body.add(&LN2.scale(&rat_int(e)))
}

/// Certified enclosure of exp(x) for rational |x| <= 2.
fn exp_point(x: &BigRational) -> Interval {
    assert!(x.abs() <= rat_int(2), "exp_point limited to |x| <= 2");
    let scale: BigInt = BigInt::one() << PREC;
    let neg = x.is_negative();
    let xa = x.abs();
    let x_lo = (xa.numer() * &scale).div_floor(xa.denom());
    let x_hi = (xa.numer() * &scale).div_ceil(xa.denom());
    let mut term_lo = scale.clone();
    let mut term_hi = scale.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let terms = 80u32; // 2^81/81! is far below 2^-PREC
    for k in 1..=terms {
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        term_lo = (&term_lo * &x_lo).div_floor(&scale).div_floor(&big(k as i64));
        term_hi = (&term_hi * &x_hi).div_ceil(&scale).div_ceil(&big(k as i64));
    }
    // tail for exp(|x|), |x| <= 2: next term * 1/(1 - x/(K+1)) <= next * 2
    let tail = term_hi * 2 + 1;
    let enc = Interval::new(
        BigRational::new(sum_lo, scale.clone()),
        BigRational::new(sum_hi + tail, scale),
    );
    if neg {
        enc.recip()
    } else {
        enc
    }
}

fn pow10(k: u32) -> BigInt {
    big(10).pow(k)
}

/// Enclosure of pi, 49 decimal digits wide at the endpoints.
pub static PI: Lazy<Interval> = Lazy::new(|| {
    let digits: BigInt = "31415926535897932384626433832795028841971693993751"
        .parse()
        .unwrap();
    let den = pow10(49);
    Interval::new(
        BigRational::new(digits.clone(), den.clone()),
        BigRational::new(digits + 1, den),
    )
});

/// Enclosure of the Euler-Mascheroni constant.
pub static EULER_GAMMA: Lazy<Interval> = Lazy::new(|| {
    let digits: BigInt = "5772156649015328606065120900824024310421"
        .parse()
        .unwrap();
    let den = pow10(40);
    Interval::new(
        BigRational::new(digits.clone(), den.clone()),
        BigRational::new(digits + 1, den),
    )
});

/// Enclosure of e^gamma, computed from EULER_GAMMA by certified series.
pub static E_GAMMA: Lazy<Interval> = Lazy::new(|| {
    Interval::new(
        exp_point(EULER_GAMMA.lo()).lo().clone(),
        exp_point(EULER_GAMMA.hi()).hi().clone(),
    )
});

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(big(n), big(d))
    }

    fn assert_encloses(iv: &Interval, truth: f64, max_width: f64) {
        let (lo, hi) = iv.to_f64();
        assert!(lo <= truth && truth <= hi, "{truth} not in [{lo}, {hi}]");
        assert!(hi - lo <= max_width, "width {} too wide", hi - lo);
    }

    #[test]
    fn ln_enclosures() {
        assert_encloses(&ln_point(&rat(2, 1)), std::f64::consts::LN_2, 1e-40);
        assert_encloses(&ln_point(&rat(1, 2)), -std::f64::consts::LN_2, 1e-40);
        assert_encloses(&ln_point(&rat(10, 1)), std::f64::consts::LN_10, 1e-40);
        assert_encloses(&ln_point(&rat(1, 1)), 0.0, 1e-40);
        assert_encloses(&ln_point(&rat(1000000007, 3)), (1000000007f64 / 3.0).ln(), 1e-40);
        // huge argument (disc_threshold scale)
        let big_arg = rat(20_000_000_000_000, 1);
        assert_encloses(&ln_point(&big_arg), 2e13f64.ln(), 1e-38);
    }

    #[test]
    fn exp_and_constants() {
        assert_encloses(&exp_point(&rat(1, 1)), std::f64::consts::E, 1e-40);
        assert_encloses(&exp_point(&rat(-1, 1)), 1.0 / std::f64::consts::E, 1e-40);
        assert_encloses(&PI, std::f64::consts::PI, 1e-40);
        assert_encloses(&EULER_GAMMA, 0.5772156649015329, 1e-35);
        assert_encloses(&E_GAMMA, 1.7810724179901980, 1e-35);
    }

    #[test]
    fn sqrt_cbrt() {
        assert_encloses(&Interval::from_int(2).sqrt(), std::f64::consts::SQRT_2, 1e-30);
        assert_encloses(&cbrt_interval(&rat(27, 8)), 1.5, 1e-20);
        assert_encloses(&cbrt_interval(&rat(2, 1)), 2f64.cbrt(), 1e-20);
    }

    #[test]
    fn arithmetic_soundness() {
        let a = Interval::new(rat(1, 3), rat(1, 2));
        let b = Interval::new(rat(-2, 1), rat(3, 1));
        let p = a.mul(&b);
        assert!(p.contains(&rat(-1, 2)));
        assert!(p.contains(&rat(1, 1)));
        let q = b.div(&a);
        assert!(q.contains(&rat(-6, 1)));
        assert!(q.contains(&rat(9, 1)));
        let m = Interval::min_of(&[a.clone(), Interval::new(rat(0, 1), rat(2, 5))]);
        assert!(m.contains(&rat(1, 3)));
        assert!(*m.lo() == rat(0, 1));
    }

    #[test]
    fn interval_ln_spans_argument_range() {
        let iv = Interval::new(rat(3, 1), rat(4, 1));
        let l = iv.ln().unwrap();
        let (lo, hi) = l.to_f64();
        assert!(lo <= 3f64.ln() && 4f64.ln() <= hi);
        assert!(Interval::new(rat(0, 1), rat(1, 2)).ln().is_err());
    }

    #[test]
    fn compressed_keeps_containment() {
        let x = Interval::new(rat(1, 3), rat(1, 3));
        let c = x.compressed();
        assert!(c.lo() <= &rat(1, 3) && &rat(1, 3) <= c.hi());
        assert!(c.width() < rat(1, 1_000_000_000));
    }
}
