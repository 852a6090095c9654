//! Real quadratic fields Q(sqrt(d)) with exact element arithmetic.
//!
//! Elements are stored as x + y*sqrt(d) with rational x, y, so every norm,
//! trace, comparison, and floor below is exact. Comparisons against the two
//! real embeddings never touch floating point; they reduce to integer sign
//! tests via [`crate::intmath::surd_sign`].

use crate::error::{Error, Result};
use crate::intmath::{floor_surd, is_squarefree, surd_sign};
use crate::interval::Interval;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
}

impl QuadraticField {
    /// d must be squarefree and > 1.
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 {
            return Err(Error::NotGreaterThanOne(d));
        }
        if !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        let disc = if d % 4 == 1 { d } else { 4 * d };
        Ok(QuadraticField { d, disc })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn element(&self, x: BigRational, y: BigRational) -> FieldElement {
        FieldElement { d: self.d, x, y }
    }

    pub fn from_integers(&self, x: i64, y: i64) -> FieldElement {
        self.element(
            BigRational::from_integer(BigInt::from(x)),
            BigRational::from_integer(BigInt::from(y)),
        )
    }

    pub fn zero(&self) -> FieldElement {
        self.from_integers(0, 0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_integers(1, 0)
    }

    pub fn sqrt_d(&self) -> FieldElement {
        self.from_integers(0, 1)
    }

    /// Generator of the ring of integers: sqrt(d), or (1+sqrt(d))/2 when
    /// d = 1 mod 4.
    pub fn omega(&self) -> FieldElement {
        if self.d % 4 == 1 {
            self.element(half(), half())
        } else {
            self.sqrt_d()
        }
    }

    /// The conjugate-negated generator -omega'; equals omega unless
    /// d = 1 mod 4, where it is (-1+sqrt(d))/2.
    pub fn xi(&self) -> FieldElement {
        -self.omega().conj()
    }

    /// sqrt of the field discriminant as an element: sqrt(d) or 2*sqrt(d).
    pub fn sqrt_disc(&self) -> FieldElement {
        if self.d % 4 == 1 {
            self.sqrt_d()
        } else {
            self.from_integers(0, 2)
        }
    }

    /// Rebuild an element from coordinates over the integral basis (1, omega).
    pub fn from_omega_coords(&self, u: BigRational, v: BigRational) -> FieldElement {
        self.one().scale(&u) + self.omega().scale(&v)
    }

    /// Certified enclosure of sqrt(d).
    pub fn sqrt_d_interval(&self) -> Interval {
        Interval::from_int(self.d).sqrt()
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

pub fn ensure_same_field(a: &FieldElement, b: &FieldElement) -> Result<()> {
    if a.d == b.d {
        Ok(())
    } else {
        Err(Error::MixedFields(a.d, b.d))
    }
}

/// x + y*sqrt(d) with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    d: i64,
    x: BigRational,
    y: BigRational,
}

impl FieldElement {
    pub fn field(&self) -> QuadraticField {
        QuadraticField::new(self.d).expect("element carries a valid field")
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn y(&self) -> &BigRational {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> FieldElement {
        FieldElement {
            d: self.d,
            x: self.x.clone(),
            y: -self.y.clone(),
        }
    }

    pub fn trace(&self) -> BigRational {
        &self.x + &self.x
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - BigRational::from_integer(BigInt::from(self.d)) * &self.y * &self.y
    }

    pub fn scale(&self, c: &BigRational) -> FieldElement {
        FieldElement {
            d: self.d,
            x: &self.x * c,
            y: &self.y * c,
        }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = FieldElement {
            d: self.d,
            x: BigRational::one(),
            y: BigRational::zero(),
        };
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact sign of the first embedding x + y*sqrt(d).
    pub fn signum(&self) -> Ordering {
        let den = self.x.denom().lcm(self.y.denom());
        let u = self.x.numer() * (&den / self.x.denom());
        let q = self.y.numer() * (&den / self.y.denom());
        surd_sign(&u, &q, &BigInt::from(self.d))
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_totally_positive(&self) -> bool {
        self.is_positive() && self.conj().is_positive()
    }

    /// Coordinates over the integral basis (1, omega).
    pub fn omega_coords(&self) -> (BigRational, BigRational) {
        if self.d % 4 == 1 {
            let v = &self.y + &self.y;
            let u = &self.x - &self.y;
            (u, v)
        } else {
            (self.x.clone(), self.y.clone())
        }
    }

    pub fn is_integral(&self) -> bool {
        let (u, v) = self.omega_coords();
        u.is_integer() && v.is_integer()
    }

    /// floor of the first embedding, exactly.
    pub fn floor_embed1(&self) -> BigInt {
        let den = self.x.denom().lcm(self.y.denom());
        let u = self.x.numer() * (&den / self.x.denom());
        let q = self.y.numer() * (&den / self.y.denom());
        floor_surd(&u, &q, &BigInt::from(self.d), &den)
    }

    /// floor of the second embedding x - y*sqrt(d), exactly.
    pub fn floor_embed2(&self) -> BigInt {
        self.conj().floor_embed1()
    }

    /// Certified enclosures of both real embeddings.
    pub fn embed_intervals(&self) -> (Interval, Interval) {
        let s = self.field().sqrt_d_interval();
        let x = Interval::point(self.x.clone());
        let ys = s.scale(&self.y);
        (x.add(&ys), x.sub(&ys))
    }

    pub fn approx_f64(&self) -> f64 {
        self.x.to_f64().unwrap_or(f64::NAN)
            + self.y.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.d, rhs.d, "elements of different fields");
        FieldElement {
            d: self.d,
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.d, rhs.d, "elements of different fields");
        FieldElement {
            d: self.d,
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.d, rhs.d, "elements of different fields");
        let dd = BigRational::from_integer(BigInt::from(self.d));
        FieldElement {
            d: self.d,
            x: &self.x * &rhs.x + &dd * &self.y * &rhs.y,
            y: &self.x * &rhs.y + &self.y * &rhs.x,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Div for &FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self * &rhs.inverse().expect("division by zero element")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            d: self.d,
            x: -self.x,
            y: -self.y,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -self.clone()
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    /// Total order by the first embedding.
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.d, other.d, "elements of different fields");
        (self - other).signum()
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElement {
    /// Prints `x+y*sqrt(d)`, dropping zero parts and unit coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", fmt_rat(&self.x));
        }
        let surd = if self.y.abs().is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rat(&self.y.abs()), self.d)
        };
        if self.x.is_zero() {
            if self.y.is_negative() {
                write!(f, "-{surd}")
            } else {
                write!(f, "{surd}")
            }
        } else if self.y.is_negative() {
            write!(f, "{}-{surd}", fmt_rat(&self.x))
        } else {
            write!(f, "{}+{surd}", fmt_rat(&self.x))
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::ParseError("empty rational".into()));
    }
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::ParseError(format!("bad integer `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::ParseError("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

/// Splits `s` at top-level `+`/`-` (not the leading sign) into signed terms.
fn split_terms(s: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, c) in s.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(std::mem::take(&mut cur));
            if c == '-' {
                cur.push('-');
            }
        } else {
            cur.push(c);
        }
    }
    terms.push(cur);
    terms.into_iter().filter(|t| !t.is_empty()).collect()
}

impl FromStr for FieldElement {
    type Err = Error;

    /// Accepts `x`, `y*sqrt(d)`, `sqrt(d)`, and signed sums of those, with
    /// rational coefficients written as `p` or `p/q`.
    fn from_str(input: &str) -> Result<FieldElement> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::ParseError("empty element".into()));
        }
        let mut d: Option<i64> = None;
        let mut x = BigRational::zero();
        let mut y = BigRational::zero();
        for term in split_terms(&compact) {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1i64, rest.to_string()),
                None => (1i64, term),
            };
            if let Some(pos) = body.find("sqrt(") {
                if !body.ends_with(')') {
                    return Err(Error::ParseError(format!("unclosed sqrt in `{body}`")));
                }
                let inner = &body[pos + 5..body.len() - 1];
                let dv: i64 = inner
                    .parse()
                    .map_err(|_| Error::ParseError(format!("bad radicand `{inner}`")))?;
                match d {
                    None => d = Some(dv),
                    Some(prev) if prev == dv => {}
                    Some(prev) => return Err(Error::MixedFields(prev, dv)),
                }
                let coeff_str = &body[..pos];
                let coeff = if coeff_str.is_empty() {
                    BigRational::one()
                } else if let Some(stripped) = coeff_str.strip_suffix('*') {
                    parse_rational(stripped)?
                } else {
                    return Err(Error::ParseError(format!(
                        "expected `*` before sqrt in `{body}`"
                    )));
                };
                y += coeff * BigRational::from_integer(BigInt::from(sign));
            } else {
                x += parse_rational(&body)? * BigRational::from_integer(BigInt::from(sign));
            }
        }
        let d = d.ok_or_else(|| Error::RationalInput)?;
        let field = QuadraticField::new(d)?;
        Ok(field.element(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> QuadraticField {
        QuadraticField::new(5).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn constructor_validation() {
        assert_eq!(QuadraticField::new(12).unwrap_err(), Error::NotSquarefree(12));
        assert_eq!(QuadraticField::new(1).unwrap_err(), Error::NotGreaterThanOne(1));
        assert_eq!(QuadraticField::new(-3).unwrap_err(), Error::NotGreaterThanOne(-3));
        assert_eq!(QuadraticField::new(5).unwrap().discriminant(), 5);
        assert_eq!(QuadraticField::new(2).unwrap().discriminant(), 8);
        assert_eq!(QuadraticField::new(3).unwrap().discriminant(), 12);
        assert_eq!(QuadraticField::new(13).unwrap().discriminant(), 13);
    }

    #[test]
    fn generators() {
        let k5 = f5();
        assert_eq!(k5.omega(), k5.element(rat(1, 2), rat(1, 2)));
        assert_eq!(k5.xi(), k5.element(rat(-1, 2), rat(1, 2)));
        assert_eq!(k5.sqrt_disc(), k5.sqrt_d());
        let k2 = QuadraticField::new(2).unwrap();
        assert_eq!(k2.omega(), k2.sqrt_d());
        assert_eq!(k2.xi(), k2.sqrt_d());
        assert_eq!(k2.sqrt_disc(), k2.from_integers(0, 2));
        // omega * omega' = -(d-1)/4 for d = 1 mod 4
        let w = k5.omega();
        assert_eq!(w.norm(), rat(-1, 1));
        assert_eq!(w.trace(), rat(1, 1));
    }

    #[test]
    fn signs_and_floors() {
        let k = QuadraticField::new(2).unwrap();
        // 1 - sqrt(2) < 0 < 3 - 2*sqrt(2)
        assert_eq!(k.from_integers(1, -1).signum(), Ordering::Less);
        assert_eq!(k.from_integers(3, -2).signum(), Ordering::Greater);
        assert!(k.from_integers(3, -2).is_totally_positive());
        assert!(!k.from_integers(1, 1).is_totally_positive());
        assert_eq!(k.sqrt_d().floor_embed1(), BigInt::from(1));
        assert_eq!(k.sqrt_d().floor_embed2(), BigInt::from(-2));
        assert_eq!(k.from_integers(0, 7).floor_embed1(), BigInt::from(9));
        let k13 = QuadraticField::new(13).unwrap();
        assert_eq!(k13.omega().floor_embed1(), BigInt::from(2));
        assert_eq!(k13.xi().floor_embed1(), BigInt::from(1));
    }

    #[test]
    fn integrality() {
        let k5 = f5();
        assert!(k5.omega().is_integral());
        assert!(k5.element(rat(3, 2), rat(1, 2)).is_integral());
        assert!(!k5.element(rat(1, 2), rat(1, 3)).is_integral());
        assert!(!k5.element(rat(1, 2), BigRational::zero()).is_integral());
        let k2 = QuadraticField::new(2).unwrap();
        assert!(k2.from_integers(3, -2).is_integral());
        assert!(!k2.element(rat(1, 2), rat(1, 2)).is_integral());
        let (u, v) = k5.element(rat(3, 2), rat(1, 2)).omega_coords();
        assert_eq!((u, v), (rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn display_and_parse() {
        let k5 = f5();
        let e = k5.element(rat(1, 2), rat(-3, 2));
        assert_eq!(e.to_string(), "1/2-3/2*sqrt(5)");
        assert_eq!("1/2 - 3/2*sqrt(5)".parse::<FieldElement>().unwrap(), e);
        assert_eq!("sqrt(5)".parse::<FieldElement>().unwrap(), k5.sqrt_d());
        assert_eq!(
            "-sqrt(5)+2".parse::<FieldElement>().unwrap(),
            k5.from_integers(2, -1)
        );
        assert_eq!(k5.from_integers(4, 0).to_string(), "4");
        assert_eq!(k5.sqrt_d().to_string(), "sqrt(5)");
        assert_eq!((-k5.sqrt_d()).to_string(), "-sqrt(5)");
        assert!(matches!(
            "7/2".parse::<FieldElement>(),
            Err(Error::RationalInput)
        ));
        assert!(matches!(
            "sqrt(5)+sqrt(2)".parse::<FieldElement>(),
            Err(Error::MixedFields(5, 2))
        ));
        assert!("sqrt(4)".parse::<FieldElement>().is_err());
    }

    #[test]
    fn inverse_and_pow() {
        let k = f5();
        let eps = k.element(rat(1, 2), rat(1, 2)); // fundamental unit of Q(sqrt 5)
        let inv = eps.inverse().unwrap();
        assert_eq!(&eps * &inv, k.one());
        assert_eq!(eps.pow(2).unwrap(), k.element(rat(3, 2), rat(1, 2)));
        assert_eq!(eps.pow(-1).unwrap(), inv);
        assert_eq!(eps.pow(0).unwrap(), k.one());
        assert_eq!(k.zero().inverse().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn embeddings_enclose() {
        let k = QuadraticField::new(3).unwrap();
        let a = k.from_integers(2, -1); // 2 - sqrt(3)
        let (e1, e2) = a.embed_intervals();
        // exact containment: subtract the rational endpoint and sign-test
        let lo1 = k.element(e1.lo().clone(), BigRational::zero());
        let hi1 = k.element(e1.hi().clone(), BigRational::zero());
        assert_ne!((&a - &lo1).signum(), Ordering::Less);
        assert_ne!((&hi1 - &a).signum(), Ordering::Less);
        let ac = a.conj();
        let lo2 = k.element(e2.lo().clone(), BigRational::zero());
        let hi2 = k.element(e2.hi().clone(), BigRational::zero());
        assert_ne!((&ac - &lo2).signum(), Ordering::Less);
        assert_ne!((&hi2 - &ac).signum(), Ordering::Less);
        assert!(e1.width() < rat(1, 1_000_000_000));
    }

    fn small_rat() -> impl Strategy<Value = BigRational> {
        (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
    }

    fn some_d() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 13, 17, 21, 33])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn algebra_laws(d in some_d(), ab in (small_rat(), small_rat(), small_rat(), small_rat())) {
            let k = QuadraticField::new(d).unwrap();
            let a = k.element(ab.0, ab.1);
            let b = k.element(ab.2, ab.3);
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
            prop_assert_eq!((&a + &b).trace(), a.trace() + b.trace());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
            // conjugation preserves norm, negates the sqrt part of trace form
            prop_assert_eq!(a.conj().norm(), a.norm());
        }

        #[test]
        fn order_respects_addition(d in some_d(), ab in (small_rat(), small_rat(), small_rat(), small_rat())) {
            let k = QuadraticField::new(d).unwrap();
            let a = k.element(ab.0, ab.1);
            let b = k.element(ab.2, ab.3);
            if a.is_positive() && b.is_positive() {
                prop_assert!((&a + &b).is_positive());
            }
            if a.is_totally_positive() && b.is_totally_positive() {
                prop_assert!((&a + &b).is_totally_positive());
                prop_assert!((&a * &b).is_totally_positive());
            }
        }

        #[test]
        fn floor_matches_interval(d in some_d(), ab in (small_rat(), small_rat())) {
            let k = QuadraticField::new(d).unwrap();
            let a = k.element(ab.0, ab.1);
            let fl = a.floor_embed1();
            let flr = BigRational::from_integer(fl.clone());
            let (e1, _) = a.embed_intervals();
            // floor <= embedding < floor + 1, checked against the certified enclosure
            prop_assert!(&flr <= e1.hi());
            prop_assert!(e1.lo() < &(flr + BigRational::one()));
        }

        #[test]
        fn display_roundtrip(d in some_d(), ab in (small_rat(), small_rat())) {
            let k = QuadraticField::new(d).unwrap();
            let a = k.element(ab.0, ab.1);
            if !a.is_rational() {
                let s = a.to_string();
                prop_assert_eq!(s.parse::<FieldElement>().unwrap(), a);
            }
        }

        #[test]
        fn tp_iff_positive_norm_and_trace(d in some_d(), ab in (small_rat(), small_rat())) {
            let k = QuadraticField::new(d).unwrap();
            let a = k.element(ab.0, ab.1);
            if !a.is_zero() {
                let tp = a.is_totally_positive();
                let by_invariants = a.norm().is_positive() && a.trace().is_positive();
                prop_assert_eq!(tp, by_invariants);
            }
        }
    }
}
