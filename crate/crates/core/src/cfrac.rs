//! Periodic continued fractions of quadratic irrationals.
//!
//! Expansion state is the exact surd triple (P, Q, N) with x = (P + sqrt(N))/Q
//! and Q dividing N - P^2; the period is found by state repetition, never by
//! float convergence. Convergents carry the algebraic integers
//! alpha_i = p_i - q_i * omega', which drive unit and indecomposable
//! computations downstream.
//!
//! The canonical per-field expansion subject is omega (for d = 2,3 mod 4 this
//! coincides with xi = sqrt(d)); its tail is purely periodic, the last period
//! entry is 2*u0 or 2*u0 - 1 according to d mod 4, and alpha_{s-1} is the
//! fundamental unit.

use crate::error::{Error, Result};
use crate::intmath::floor_surd;
use crate::qfield::{FieldElement, QuadraticField};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    subject: FieldElement,
    u0: BigInt,
    /// Non-repeating partial quotients after u0 (empty for canonical subjects).
    preperiod: Vec<BigInt>,
    /// Repeating block u_1..u_s (when preperiod is empty).
    period: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub i: i64,
    pub p: BigInt,
    pub q: BigInt,
    /// p - q * omega', an algebraic integer of the subject's field.
    pub alpha: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    /// The fundamental unit, normalized > 1 in the first embedding.
    pub eps: FieldElement,
    /// N(eps), always +1 or -1.
    pub norm_sign: i8,
    /// Fundamental totally positive unit: eps if N(eps) = 1, else eps^2.
    pub eps_plus: FieldElement,
}

impl CFExpansion {
    /// Expand a quadratic irrational by the exact surd recurrence.
    pub fn expand(x: &FieldElement) -> Result<CFExpansion> {
        if x.is_rational() {
            return Err(Error::RationalInput);
        }
        let d = BigInt::from(x.d());
        // write x = (a + b*sqrt(d)) / c over a common denominator, then flip
        // signs so the sqrt coefficient is positive: x = (P + sqrt(N)) / Q
        let c = x.x().denom().lcm(x.y().denom());
        let a = x.x().numer() * (&c / x.x().denom());
        let b = x.y().numer() * (&c / x.y().denom());
        let (mut p, mut q) = if b.is_negative() { (-a, -c) } else { (a, c) };
        let mut n = &b * &b * &d;
        // enforce the recurrence invariant Q | N - P^2
        if !((&n - &p * &p) % &q).is_zero() {
            let t = q.abs();
            p *= &t;
            n *= &t * &t;
            q *= &t;
        }
        let one = BigInt::one();
        let mut quotients: Vec<BigInt> = Vec::new();
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        loop {
            if let Some(&j) = seen.get(&(p.clone(), q.clone())) {
                let u0 = quotients[0].clone();
                return Ok(if j == 0 {
                    // purely periodic from the top; the tail after u0 is the
                    // same cycle rotated by one
                    let mut period = quotients[1..].to_vec();
                    period.push(quotients[0].clone());
                    CFExpansion {
                        subject: x.clone(),
                        u0,
                        preperiod: Vec::new(),
                        period,
                    }
                } else {
                    CFExpansion {
                        subject: x.clone(),
                        u0,
                        preperiod: quotients[1..j].to_vec(),
                        period: quotients[j..].to_vec(),
                    }
                });
            }
            seen.insert((p.clone(), q.clone()), quotients.len());
            let u = floor_surd(&p, &one, &n, &q);
            let p_next = &u * &q - &p;
            let q_next = (&n - &p_next * &p_next) / &q;
            quotients.push(u);
            p = p_next;
            q = q_next;
            if quotients.len() > 1_000_000 {
                return Err(Error::DomainError(
                    "continued fraction period not found within bound".into(),
                ));
            }
        }
    }

    /// The canonical expansion of the field: subject omega, purely periodic
    /// tail. Memoized per discriminant.
    pub fn of_field(k: &QuadraticField) -> Arc<CFExpansion> {
        static CACHE: Lazy<Mutex<HashMap<i64, Arc<CFExpansion>>>> =
            Lazy::new(|| Mutex::new(HashMap::new()));
        if let Some(hit) = CACHE.lock().unwrap().get(&k.d()) {
            return hit.clone();
        }
        let exp = CFExpansion::expand(&k.omega()).expect("omega is irrational");
        assert!(
            exp.preperiod.is_empty(),
            "field expansion must be purely periodic after u0"
        );
        let arc = Arc::new(exp);
        CACHE
            .lock()
            .unwrap()
            .entry(k.d())
            .or_insert_with(|| arc.clone())
            .clone()
    }

    pub fn subject(&self) -> &FieldElement {
        &self.subject
    }

    pub fn u0(&self) -> &BigInt {
        &self.u0
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// The i-th partial quotient of the infinite expansion (period wraps).
    pub fn u(&self, i: u64) -> BigInt {
        if i == 0 {
            return self.u0.clone();
        }
        let idx = (i - 1) as usize;
        if idx < self.preperiod.len() {
            self.preperiod[idx].clone()
        } else {
            self.period[(idx - self.preperiod.len()) % self.period.len()].clone()
        }
    }

    /// Exact (p_i, q_i, alpha_i); i >= -1 with p_{-1} = 1, q_{-1} = 0.
    pub fn convergent(&self, i: i64) -> Result<Convergent> {
        if i < -1 {
            return Err(Error::IndexTooSmall(i));
        }
        let omega_conj = self.subject.field().omega().conj();
        let make = |i: i64, p: BigInt, q: BigInt| -> Convergent {
            let field = self.subject.field();
            let pe = field.element(
                num_rational::BigRational::from_integer(p.clone()),
                num_rational::BigRational::zero(),
            );
            let qe = field.element(
                num_rational::BigRational::from_integer(q.clone()),
                num_rational::BigRational::zero(),
            );
            let alpha = &pe - &(&qe * &omega_conj);
            Convergent { i, p, q, alpha }
        };
        let (mut pm1, mut qm1) = (BigInt::one(), BigInt::zero());
        if i == -1 {
            return Ok(make(i, pm1, qm1));
        }
        let (mut p, mut q) = (self.u0.clone(), BigInt::one());
        for j in 1..=(i as u64) {
            let u = self.u(j);
            let pn = &u * &p + &pm1;
            let qn = &u * &q + &qm1;
            pm1 = p;
            qm1 = q;
            p = pn;
            q = qn;
        }
        Ok(make(i, p, q))
    }

    /// alpha_i alone.
    pub fn alpha(&self, i: i64) -> Result<FieldElement> {
        Ok(self.convergent(i)?.alpha)
    }

    /// alpha_{i,r} = alpha_i + r*alpha_{i+1}; requires 0 <= r < u_{i+2}.
    pub fn semiconvergent(&self, i: i64, r: &BigInt) -> Result<FieldElement> {
        if i < -1 {
            return Err(Error::IndexTooSmall(i));
        }
        let cap = self.u((i + 2) as u64);
        if r.is_negative() || *r >= cap {
            return Err(Error::RangeError(format!(
                "semiconvergent offset r={r} outside [0, {cap}) at i={i}"
            )));
        }
        let ai = self.alpha(i)?;
        let ai1 = self.alpha(i + 1)?;
        let rr = self
            .subject
            .field()
            .element(num_rational::BigRational::from_integer(r.clone()), num_rational::BigRational::zero());
        Ok(&ai + &(&rr * &ai1))
    }
}

/// Fundamental unit via the canonical expansion: eps = alpha_{s-1}.
pub fn fundamental_unit(k: &QuadraticField) -> FundamentalUnit {
    let exp = CFExpansion::of_field(k);
    let s = exp.period_len() as i64;
    let eps = exp.alpha(s - 1).expect("s >= 1");
    let n = eps.norm();
    let norm_sign: i8 = if n == num_rational::BigRational::one() {
        1
    } else {
        assert!(
            n == -num_rational::BigRational::one(),
            "alpha_(s-1) must be a unit"
        );
        -1
    };
    assert_eq!(
        norm_sign == -1,
        s % 2 == 1,
        "period parity must match unit norm sign"
    );
    assert!(
        eps > k.one(),
        "fundamental unit normalizes above 1 in the first embedding"
    );
    let eps_plus = if norm_sign == 1 {
        eps.clone()
    } else {
        &eps * &eps
    };
    debug_assert!(eps_plus.is_totally_positive());
    FundamentalUnit {
        eps,
        norm_sign,
        eps_plus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::QuadraticField;
    use num_rational::BigRational;

    fn field(d: i64) -> QuadraticField {
        QuadraticField::new(d).unwrap()
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn bis(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| bi(n)).collect()
    }

    #[test]
    fn small_expansions() {
        let e3 = CFExpansion::expand(&field(3).sqrt_d()).unwrap();
        assert_eq!(e3.u0(), &bi(1));
        assert_eq!(e3.period(), bis(&[1, 2]).as_slice());
        assert!(e3.preperiod().is_empty());

        let e2 = CFExpansion::expand(&field(2).sqrt_d()).unwrap();
        assert_eq!(e2.u0(), &bi(1));
        assert_eq!(e2.period(), bis(&[2]).as_slice());

        // xi_5 = (sqrt(5)-1)/2 expands to [0; 1 repeating]
        let e5 = CFExpansion::expand(&field(5).xi()).unwrap();
        assert_eq!(e5.u0(), &bi(0));
        assert_eq!(e5.period(), bis(&[1]).as_slice());
        assert!(e5.preperiod().is_empty());

        // rational input is rejected
        assert_eq!(
            CFExpansion::expand(&field(5).from_integers(3, 0)).unwrap_err(),
            Error::RationalInput
        );
    }

    #[test]
    fn preperiodic_subject() {
        // 1/sqrt(2) = sqrt(2)/2 = [0; 1, 2 repeating]
        let k = field(2);
        let x = k.element(BigRational::zero(), BigRational::new(bi(1), bi(2)));
        let e = CFExpansion::expand(&x).unwrap();
        assert_eq!(e.u0(), &bi(0));
        assert_eq!(e.preperiod(), bis(&[1]).as_slice());
        assert_eq!(e.period(), bis(&[2]).as_slice());
        // u(i) walks preperiod then wraps the period
        assert_eq!(e.u(1), bi(1));
        assert_eq!(e.u(2), bi(2));
        assert_eq!(e.u(3), bi(2));
        // round-trip: the expansion re-derives itself from its subject
        assert_eq!(&CFExpansion::expand(e.subject()).unwrap(), &e);
    }

    #[test]
    fn field_expansions_purely_periodic() {
        // omega_5 = (1+sqrt(5))/2 = [1 repeating]; omega_13 = [2; 3 repeating]
        let e5 = CFExpansion::of_field(&field(5));
        assert_eq!(e5.u0(), &bi(1));
        assert_eq!(e5.period(), bis(&[1]).as_slice());
        let e13 = CFExpansion::of_field(&field(13));
        assert_eq!(e13.u0(), &bi(2));
        assert_eq!(e13.period(), bis(&[3]).as_slice());
        let e7 = CFExpansion::of_field(&field(7));
        assert_eq!(e7.u0(), &bi(2));
        assert_eq!(e7.period(), bis(&[1, 1, 1, 4]).as_slice());
    }

    #[test]
    fn last_period_entry_relation() {
        // u_s = 2*u0 for d = 2,3 mod 4; u_s = 2*u0 - 1 for d = 1 mod 4
        for d in 2..=150i64 {
            if !crate::intmath::is_squarefree(d) {
                continue;
            }
            let k = field(d);
            let e = CFExpansion::of_field(&k);
            let s = e.period_len() as u64;
            let expected = if d % 4 == 1 {
                e.u0() * 2 - 1
            } else {
                e.u0() * 2
            };
            assert_eq!(e.u(s), expected, "d={d}");
        }
    }

    #[test]
    fn convergents_and_alphas() {
        let e2 = CFExpansion::of_field(&field(2));
        let cm1 = e2.convergent(-1).unwrap();
        assert_eq!((cm1.p, cm1.q), (bi(1), bi(0)));
        assert_eq!(cm1.alpha, field(2).one());
        let c0 = e2.convergent(0).unwrap();
        assert_eq!((c0.p.clone(), c0.q.clone()), (bi(1), bi(1)));
        assert_eq!(c0.alpha, field(2).from_integers(1, 1)); // 1 + sqrt(2)
        let e3 = CFExpansion::of_field(&field(3));
        let c1 = e3.convergent(1).unwrap();
        assert_eq!((c1.p.clone(), c1.q.clone()), (bi(2), bi(1)));
        assert_eq!(c1.alpha, field(3).from_integers(2, 1)); // 2 + sqrt(3)
        assert_eq!(e3.convergent(-2).unwrap_err(), Error::IndexTooSmall(-2));
    }

    #[test]
    fn semiconvergents() {
        let e2 = CFExpansion::of_field(&field(2));
        assert_eq!(
            e2.semiconvergent(-1, &bi(0)).unwrap(),
            field(2).one()
        );
        // u_1 = 2 allows r = 1: 1 + (1+sqrt 2) = 2+sqrt(2)
        assert_eq!(
            e2.semiconvergent(-1, &bi(1)).unwrap(),
            field(2).from_integers(2, 1)
        );
        assert!(matches!(
            e2.semiconvergent(-1, &bi(2)),
            Err(Error::RangeError(_))
        ));
        let e3 = CFExpansion::of_field(&field(3));
        // alpha_0 + alpha_1 = (1+sqrt 3) + (2+sqrt 3) = 3+2*sqrt(3); u_2 = 2
        assert_eq!(
            e3.semiconvergent(0, &bi(1)).unwrap(),
            field(3).from_integers(3, 2)
        );
        assert!(matches!(
            e3.semiconvergent(-2, &bi(0)),
            Err(Error::IndexTooSmall(-2))
        ));
    }

    #[test]
    fn fundamental_units_known_values() {
        let u2 = fundamental_unit(&field(2));
        assert_eq!(u2.eps, field(2).from_integers(1, 1));
        assert_eq!(u2.norm_sign, -1);
        assert_eq!(u2.eps_plus, field(2).from_integers(3, 2));
        let u3 = fundamental_unit(&field(3));
        assert_eq!(u3.eps, field(3).from_integers(2, 1));
        assert_eq!(u3.norm_sign, 1);
        assert_eq!(u3.eps_plus, u3.eps);
        let u5 = fundamental_unit(&field(5));
        assert_eq!(u5.eps, field(5).omega());
        assert_eq!(u5.norm_sign, -1);
        let u6 = fundamental_unit(&field(6));
        assert_eq!(u6.eps, field(6).from_integers(5, 2));
        assert_eq!(u6.norm_sign, 1);
        let u7 = fundamental_unit(&field(7));
        assert_eq!(u7.eps, field(7).from_integers(8, 3));
        let u13 = fundamental_unit(&field(13));
        assert_eq!(
            u13.eps,
            field(13).element(
                BigRational::new(bi(3), bi(2)),
                BigRational::new(bi(1), bi(2))
            )
        );
        assert_eq!(u13.norm_sign, -1);
    }

    #[test]
    fn determinant_identity_and_parity() {
        for d in [2i64, 3, 5, 6, 7, 10, 11, 13, 19, 21, 29, 31, 46, 94] {
            let k = field(d);
            let e = CFExpansion::of_field(&k);
            let s = e.period_len() as i64;
            // p_i q_{i-1} - p_{i-1} q_i = (-1)^(i-1)
            for i in 0..(2 * s + 2) {
                let a = e.convergent(i).unwrap();
                let b = e.convergent(i - 1).unwrap();
                let det = &a.p * &b.q - &b.p * &a.q;
                let want = if (i - 1).rem_euclid(2) == 0 { 1 } else { -1 };
                assert_eq!(det, bi(want), "d={d} i={i}");
            }
            // s odd iff N(eps) = -1
            let fu = fundamental_unit(&k);
            assert_eq!(fu.norm_sign == -1, s % 2 == 1, "d={d}");
            // alpha_{s-1} is a unit
            let n = e.alpha(s - 1).unwrap().norm();
            assert!(n.clone().abs() == BigRational::one(), "d={d} norm={n}");
        }
    }

    #[test]
    fn unit_shifts_semiconvergents_by_period() {
        // eps * alpha_{i,r} = alpha_{i+s,r}
        for d in [2i64, 3, 5, 13, 19] {
            let k = field(d);
            let e = CFExpansion::of_field(&k);
            let s = e.period_len() as i64;
            let eps = fundamental_unit(&k).eps;
            for i in -1..=(s + 2) {
                let cap = e.u((i + 2) as u64);
                let mut r = BigInt::zero();
                while r < cap {
                    let lhs = &eps * &e.semiconvergent(i, &r).unwrap();
                    let rhs_i = i + s;
                    let rhs = {
                        let ai = e.alpha(rhs_i).unwrap();
                        let ai1 = e.alpha(rhs_i + 1).unwrap();
                        let rr = k.element(
                            BigRational::from_integer(r.clone()),
                            BigRational::zero(),
                        );
                        &ai + &(&rr * &ai1)
                    };
                    assert_eq!(lhs, rhs, "d={d} i={i} r={r}");
                    r += 1;
                }
            }
        }
    }
}
