//! Fractional ideals of a real quadratic ring in normalized form.
//!
//! An ideal is stored as scale * (Z*a + Z*(b + omega)) with a positive
//! rational scale, 0 <= b < a, and a | N(b + omega). That normal form is
//! unique, so equality is structural. Products and inverses go through the
//! two-row HNF reduction in [`FracIdeal::from_gens`]; factorization splits
//! rational primes by the Kronecker symbol and certifies exponents by exact
//! ideal division.
//!
//! Principality is decided by the classical reduction walk: the continued
//! fraction of (b + omega)/a visits a cycle of surd states, and the ideal is
//! principal exactly when that cycle meets the states of omega's own
//! expansion. The walk also recovers a generator, which the narrow-class
//! operations then push into a canonical totally-positive-unit window.

use crate::cfrac::fundamental_unit;
use crate::error::{Error, Result};
use crate::intmath::{factor_u64, kronecker, mod_sqrt};
use crate::qfield::{FieldElement, QuadraticField};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    field: QuadraticField,
    scale: BigRational,
    a: BigInt,
    b: BigInt,
}

pub type IdealFactorization = Vec<(FracIdeal, u32)>;

/// Trace of omega as an integer (0 or 1).
fn omega_trace(k: &QuadraticField) -> i64 {
    if k.d() % 4 == 1 {
        1
    } else {
        0
    }
}

/// Norm of omega as an integer.
fn omega_norm(k: &QuadraticField) -> i64 {
    if k.d() % 4 == 1 {
        -(k.d() - 1) / 4
    } else {
        -k.d()
    }
}

/// N(b + omega) as an exact integer.
fn norm_b_plus_omega(k: &QuadraticField, b: &BigInt) -> BigInt {
    b * b + b * omega_trace(k) + omega_norm(k)
}

impl FracIdeal {
    pub fn from_hnf(field: QuadraticField, scale: BigRational, a: BigInt, b: BigInt) -> Result<Self> {
        if !scale.is_positive() || !a.is_positive() {
            return Err(Error::ZeroIdeal);
        }
        let b = b.mod_floor(&a);
        if !norm_b_plus_omega(&field, &b).mod_floor(&a).is_zero() {
            return Err(Error::DomainError(format!(
                "module Z*{a} + Z*({b}+w) is not an ideal"
            )));
        }
        Ok(FracIdeal { field, scale, a, b })
    }

    pub fn unit_ideal(field: QuadraticField) -> Self {
        FracIdeal {
            field,
            scale: BigRational::one(),
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    /// Smallest fractional ideal containing all generators.
    pub fn from_gens(field: QuadraticField, gens: &[FieldElement]) -> Result<Self> {
        let omega = field.omega();
        // each generator g contributes rows g and g*omega in omega-coordinates
        let mut rows_rat: Vec<(BigRational, BigRational)> = Vec::new();
        for g in gens {
            if g.d() != field.d() {
                return Err(Error::MixedFields(field.d(), g.d()));
            }
            if g.is_zero() {
                continue;
            }
            rows_rat.push(g.omega_coords());
            rows_rat.push((g * &omega).omega_coords());
        }
        if rows_rat.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        // clear denominators
        let mut den = BigInt::one();
        for (u, v) in &rows_rat {
            den = den.lcm(u.denom()).lcm(v.denom());
        }
        let rows: Vec<(BigInt, BigInt)> = rows_rat
            .iter()
            .map(|(u, v)| {
                (
                    u.numer() * (&den / u.denom()),
                    v.numer() * (&den / v.denom()),
                )
            })
            .collect();
        // two-row HNF: a_cap spans the rational part, (bu, bv) the omega part
        let mut a_cap = BigInt::zero();
        let (mut bu, mut bv) = (BigInt::zero(), BigInt::zero());
        for (u, v) in rows {
            if v.is_zero() {
                a_cap = a_cap.gcd(&u);
                continue;
            }
            if bv.is_zero() {
                bu = u;
                bv = v;
                continue;
            }
            let e = bv.extended_gcd(&v);
            let new_bu = &e.x * &bu + &e.y * &u;
            // eliminate the omega coefficient from the combination left over
            let leftover = (&bv * &u - &v * &bu) / &e.gcd;
            a_cap = a_cap.gcd(&leftover);
            bu = new_bu;
            bv = e.gcd;
        }
        assert!(!bv.is_zero(), "nonzero generators span rank 2");
        if bv.is_negative() {
            bu = -bu;
            bv = -bv;
        }
        a_cap = a_cap.abs();
        assert!(!a_cap.is_zero(), "ideal lattice must have full rank");
        // an ideal's HNF content divides both entries of the top row
        assert!(
            (&a_cap % &bv).is_zero() && (&bu % &bv).is_zero(),
            "generated module is closed under omega, so content divides"
        );
        let a = &a_cap / &bv;
        let b = (&bu / &bv).mod_floor(&a);
        let scale = BigRational::new(bv, den);
        FracIdeal::from_hnf(field, scale, a, b)
    }

    pub fn principal(g: &FieldElement) -> Result<Self> {
        Self::from_gens(g.field(), std::slice::from_ref(g))
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// Z-basis of the ideal: (scale*a, scale*(b + omega)).
    pub fn basis(&self) -> (FieldElement, FieldElement) {
        let first = self
            .field
            .one()
            .scale(&(&self.scale * BigRational::from_integer(self.a.clone())));
        let second_raw = self.field.from_omega_coords(
            BigRational::from_integer(self.b.clone()),
            BigRational::one(),
        );
        (first, second_raw.scale(&self.scale))
    }

    pub fn norm(&self) -> BigRational {
        &self.scale * &self.scale * BigRational::from_integer(self.a.clone())
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    /// The primitive integral ideal obtained by dropping the scale, together
    /// with the dropped rational factor.
    pub fn primitive_part(&self) -> (FracIdeal, BigRational) {
        (
            FracIdeal {
                field: self.field,
                scale: BigRational::one(),
                a: self.a.clone(),
                b: self.b.clone(),
            },
            self.scale.clone(),
        )
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        if e.d() != self.field.d() {
            return false;
        }
        if e.is_zero() {
            return true;
        }
        let scaled = e.scale(&self.scale.clone().recip());
        let (u, v) = scaled.omega_coords();
        if !v.is_integer() {
            return false;
        }
        let rem = u - BigRational::from_integer(v.to_integer() * &self.b);
        rem.is_integer() && (rem.to_integer() % &self.a).is_zero()
    }

    pub fn mul(&self, other: &FracIdeal) -> Result<FracIdeal> {
        if self.field.d() != other.field.d() {
            return Err(Error::MixedFields(self.field.d(), other.field.d()));
        }
        let (x1, x2) = self.basis();
        let (y1, y2) = other.basis();
        FracIdeal::from_gens(self.field, &[&x1 * &y1, &x1 * &y2, &x2 * &y1, &x2 * &y2])
    }

    pub fn mul_element(&self, g: &FieldElement) -> Result<FracIdeal> {
        let (x1, x2) = self.basis();
        FracIdeal::from_gens(self.field, &[&x1 * g, &x2 * g])
    }

    pub fn conj(&self) -> FracIdeal {
        let t = BigInt::from(omega_trace(&self.field));
        let b = (-&self.b - t).mod_floor(&self.a);
        FracIdeal {
            field: self.field,
            scale: self.scale.clone(),
            a: self.a.clone(),
            b,
        }
    }

    pub fn inverse(&self) -> FracIdeal {
        let mut inv = self.conj();
        inv.scale = &inv.scale / self.norm();
        debug_assert!(inv.check_invariant().is_ok());
        inv
    }

    pub fn div(&self, other: &FracIdeal) -> Result<FracIdeal> {
        self.mul(&other.inverse())
    }

    pub fn pow(&self, k: i32) -> Result<FracIdeal> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = FracIdeal::unit_ideal(self.field);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn check_invariant(&self) -> Result<()> {
        if norm_b_plus_omega(&self.field, &self.b)
            .mod_floor(&self.a)
            .is_zero()
        {
            Ok(())
        } else {
            Err(Error::DomainError("ideal invariant violated".into()))
        }
    }

    /// Complete prime factorization of an integral ideal.
    pub fn factor(&self) -> Result<IdealFactorization> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        let n = self.norm().to_integer();
        let n64 = n
            .to_u64()
            .ok_or_else(|| Error::DomainError(format!("ideal norm {n} too large to factor")))?;
        if n64 == 1 {
            return Ok(Vec::new());
        }
        let mut out: IdealFactorization = Vec::new();
        let mut remaining = self.clone();
        for (p, _) in factor_u64(n64) {
            for prime in primes_above(&self.field, p) {
                let mut e = 0u32;
                loop {
                    let next = remaining.div(&prime)?;
                    if next.is_integral() {
                        remaining = next;
                        e += 1;
                    } else {
                        break;
                    }
                }
                if e > 0 {
                    out.push((prime, e));
                }
            }
        }
        assert_eq!(
            remaining,
            FracIdeal::unit_ideal(self.field),
            "factorization must exhaust the ideal"
        );
        let product_norm = out
            .iter()
            .fold(BigRational::one(), |acc, (p, e)| {
                acc * p.norm().pow(*e as i32)
            });
        assert_eq!(product_norm, self.norm(), "norms must reassemble");
        out.sort_by(|(p, _), (q, _)| {
            p.norm()
                .cmp(&q.norm())
                .then_with(|| p.b.cmp(&q.b))
        });
        Ok(out)
    }

    /// Divisor sum over integral divisors, multiplicative over the
    /// factorization.
    pub fn sigma(&self) -> Result<BigInt> {
        let factors = self.factor()?;
        let mut acc = BigInt::one();
        for (p, e) in factors {
            let np = p.norm().to_integer();
            let mut geom = BigInt::one();
            let mut pw = BigInt::one();
            for _ in 0..e {
                pw *= &np;
                geom += &pw;
            }
            acc *= geom;
        }
        Ok(acc)
    }
}

/// The prime ideals above a rational prime p, determined by the Kronecker
/// symbol of the discriminant.
pub fn primes_above(field: &QuadraticField, p: u64) -> Vec<FracIdeal> {
    let chi = kronecker(field.discriminant(), p as i64);
    if chi == -1 {
        // inert: pO is prime of norm p^2
        return vec![FracIdeal {
            field: *field,
            scale: BigRational::from_integer(BigInt::from(p)),
            a: BigInt::one(),
            b: BigInt::zero(),
        }];
    }
    let mut bs: Vec<u64> = Vec::new();
    if p == 2 {
        for b in 0..2u64 {
            if norm_b_plus_omega(field, &BigInt::from(b)).is_even() {
                bs.push(b);
            }
        }
    } else {
        // roots x of omega's minimal polynomial mod p give primes (p, -x + omega)
        let d_mod = (field.d() % p as i64).rem_euclid(p as i64) as u64;
        let r = mod_sqrt(d_mod, p).expect("chi >= 0 means d is a square mod p");
        let xs: Vec<u64> = if field.d() % 4 == 1 {
            let inv2 = (p + 1) / 2;
            let mut v = vec![(1 + r) % p * inv2 % p];
            if r != 0 {
                v.push((1 + p - r) % p * inv2 % p);
            }
            v
        } else {
            let mut v = vec![r];
            if r != 0 {
                v.push(p - r);
            }
            v
        };
        for x in xs {
            bs.push((p - x) % p);
        }
    }
    bs.sort_unstable();
    bs.dedup();
    assert_eq!(bs.len(), if chi == 0 { 1 } else { 2 }, "splitting type count");
    bs.into_iter()
        .map(|b| {
            FracIdeal::from_hnf(
                *field,
                BigRational::one(),
                BigInt::from(p),
                BigInt::from(b),
            )
            .expect("constructed prime satisfies the ideal invariant")
        })
        .collect()
}

/// The different ideal (sqrt of the discriminant) and its inverse.
pub fn different_codifferent(field: &QuadraticField) -> (FracIdeal, FracIdeal) {
    let diff = FracIdeal::principal(&field.sqrt_disc()).expect("sqrt(disc) is nonzero");
    let codiff = diff.inverse();
    debug_assert_eq!(
        diff.norm(),
        BigRational::from_integer(BigInt::from(field.discriminant()))
    );
    (diff, codiff)
}

/// Surd state (P, Q) for x = (P + sqrt(N))/Q with the field's canonical
/// N (= d), plus the element it denotes.
fn surd_element(field: &QuadraticField, p: &BigInt, q: &BigInt) -> FieldElement {
    let qr = BigRational::from_integer(q.clone());
    field.element(
        BigRational::from_integer(p.clone()) / &qr,
        BigRational::one() / qr,
    )
}

/// One continued-fraction step on the state (P, Q) with radicand n.
fn surd_step(p: &BigInt, q: &BigInt, n: &BigInt) -> (BigInt, BigInt, BigInt) {
    let u = crate::intmath::floor_surd(p, &BigInt::one(), n, q);
    let p_next = &u * q - p;
    let q_next = (n - &p_next * &p_next) / q;
    (u, p_next, q_next)
}

/// Initial surd state of (b + omega)/a in the canonical radicand d.
fn ideal_surd_state(field: &QuadraticField, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    if field.d() % 4 == 1 {
        (b * 2 + 1, a * 2)
    } else {
        (b.clone(), a.clone())
    }
}

/// Map from each state of omega's reduction cycle to the accumulated product
/// lambda with Z + Z*gamma_j = (1/lambda) * O.
fn omega_cycle(field: &QuadraticField) -> HashMap<(BigInt, BigInt), FieldElement> {
    let n = BigInt::from(field.d());
    let (mut p, mut q) = ideal_surd_state(field, &BigInt::one(), &BigInt::zero());
    let mut lambda = field.one();
    let mut map = HashMap::new();
    loop {
        if map.contains_key(&(p.clone(), q.clone())) {
            return map;
        }
        map.insert((p.clone(), q.clone()), lambda.clone());
        let gamma = surd_element(field, &p, &q);
        let (u, pn, qn) = surd_step(&p, &q, &n);
        let psi = &gamma
            - &field.element(
                BigRational::from_integer(u),
                BigRational::zero(),
            );
        lambda = &lambda * &psi;
        p = pn;
        q = qn;
    }
}

/// A generator of the ideal if it is principal (any sign), found by the
/// reduction walk; the returned element is positive in the first embedding.
pub fn generator(ideal: &FracIdeal) -> Option<FieldElement> {
    let field = ideal.field;
    let (prim, f) = ideal.primitive_part();
    let target = omega_cycle(&field);
    let n = BigInt::from(field.d());
    let (mut p, mut q) = ideal_surd_state(&field, &prim.a, &prim.b);
    let mut lambda = field.one();
    let mut seen: std::collections::HashSet<(BigInt, BigInt)> = std::collections::HashSet::new();
    loop {
        if let Some(lam_omega) = target.get(&(p.clone(), q.clone())) {
            let a_elem = field.element(
                BigRational::from_integer(prim.a.clone()) * &f,
                BigRational::zero(),
            );
            let g = &(&a_elem * &lambda) / lam_omega;
            let g = if g.is_positive() { g } else { -g };
            debug_assert_eq!(FracIdeal::principal(&g).as_ref(), Ok(ideal));
            return Some(g);
        }
        if !seen.insert((p.clone(), q.clone())) {
            return None;
        }
        let gamma = surd_element(&field, &p, &q);
        let (u, pn, qn) = surd_step(&p, &q, &n);
        let psi = &gamma
            - &field.element(BigRational::from_integer(u), BigRational::zero());
        lambda = &lambda * &psi;
        p = pn;
        q = qn;
    }
}

/// Push a totally positive element into the canonical unit window
/// 1 <= g/g' < eps_plus^2 by exact comparisons.
pub fn normalize_tp_window(g: &FieldElement, eps_plus: &FieldElement) -> FieldElement {
    debug_assert!(g.is_totally_positive());
    let eps2 = eps_plus * eps_plus;
    let mut g = g.clone();
    // ratio < 1  <=>  g < g'
    while (&g - &g.conj()).signum() == Ordering::Less {
        g = &g * eps_plus;
    }
    // ratio >= eps_plus^2  <=>  g >= eps_plus^2 * g'
    while (&g - &(&eps2 * &g.conj())).signum() != Ordering::Less {
        g = &g / eps_plus;
    }
    g
}

/// Totally positive generator in the canonical unit window, if one exists.
pub fn tp_generator(ideal: &FracIdeal) -> Option<FieldElement> {
    let g = generator(ideal)?;
    let fu = fundamental_unit(&ideal.field);
    let tp = if g.is_totally_positive() {
        g
    } else if fu.norm_sign == -1 {
        // mixed-sign generator times the norm -1 unit is totally positive
        let cand = &g * &fu.eps;
        debug_assert!(cand.is_totally_positive());
        cand
    } else {
        return None;
    };
    Some(normalize_tp_window(&tp, &fu.eps_plus))
}

/// Literal finite-box search for a totally positive generator: enumerate
/// gamma in the ideal with N(gamma) = N(I) inside the unit window. Slower
/// than the reduction walk but independent of it; kept as a cross-check.
pub fn tp_generator_boxed(ideal: &FracIdeal) -> Option<FieldElement> {
    let field = ideal.field;
    let n = ideal.norm();
    let fu = fundamental_unit(&field);
    let e_hi = {
        let (e1, _) = fu.eps_plus.embed_intervals();
        e1.hi().clone()
    };
    let lo1 = crate::interval::sqrt_lower(&n);
    let hi1 = crate::interval::sqrt_upper(&n) * &e_hi;
    let hi2 = crate::interval::sqrt_upper(&n);
    let pts = crate::enumerate::ideal_points_in_box(
        ideal,
        (&lo1, &hi1),
        (&BigRational::zero(), &hi2),
    );
    let eps2 = &fu.eps_plus * &fu.eps_plus;
    let mut hits: Vec<FieldElement> = pts
        .into_iter()
        .filter(|g| {
            g.norm() == n
                && g.is_totally_positive()
                && (g - &g.conj()).signum() != Ordering::Less
                && (g - &(&eps2 * &g.conj())).signum() == Ordering::Less
        })
        .collect();
    hits.sort();
    hits.dedup();
    debug_assert!(hits.len() <= 1, "unit window representative is unique");
    hits.into_iter().next()
}

pub fn is_narrow_equivalent(i: &FracIdeal, j: &FracIdeal) -> Result<bool> {
    if i.field.d() != j.field.d() {
        return Err(Error::MixedFields(i.field.d(), j.field.d()));
    }
    Ok(tp_generator(&i.div(j)?).is_some())
}

/// Whether the ideal is principal in the ordinary sense.
pub fn is_principal(ideal: &FracIdeal) -> bool {
    generator(ideal).is_some()
}

/// One integral representative per narrow ideal class.
///
/// Candidates are all integral ideals of norm up to the Minkowski bound
/// sqrt(disc)/2 together with their twists by the mixed-sign principal ideal
/// (sqrt d); the twists pick up the sign classes that split off when no unit
/// of norm -1 exists. Deduplication is by narrow equivalence.
pub fn narrow_class_reps(field: &QuadraticField) -> Vec<FracIdeal> {
    let disc = BigInt::from(field.discriminant());
    let mink = (disc.sqrt() / BigInt::from(2)).max(BigInt::one());
    let mink = mink.to_u64().expect("desk-scale Minkowski bound");
    let mut candidates: Vec<FracIdeal> = Vec::new();
    for n in 1..=mink {
        // integral ideals of norm n = s^2 * a
        let mut s = 1u64;
        while s * s <= n {
            if n % (s * s) == 0 {
                let a = n / (s * s);
                for b in 0..a {
                    if let Ok(id) = FracIdeal::from_hnf(
                        *field,
                        BigRational::from_integer(BigInt::from(s)),
                        BigInt::from(a),
                        BigInt::from(b),
                    ) {
                        candidates.push(id);
                    }
                }
            }
            s += 1;
        }
    }
    let sqrt_d_ideal = FracIdeal::principal(&field.sqrt_d()).expect("sqrt d nonzero");
    let twisted: Vec<FracIdeal> = candidates
        .iter()
        .map(|i| i.mul(&sqrt_d_ideal).expect("same field"))
        .collect();
    candidates.extend(twisted);
    candidates.sort_by_key(|i| {
        (
            i.norm().numer().clone() * i.norm().denom(),
            i.a.clone(),
            i.b.clone(),
        )
    });
    let mut reps: Vec<FracIdeal> = Vec::new();
    'next: for cand in candidates {
        for rep in &reps {
            if is_narrow_equivalent(&cand, rep).expect("same field") {
                continue 'next;
            }
        }
        reps.push(cand);
    }
    reps
}

/// Ordinary class representatives (coarser than narrow classes).
pub fn class_reps(field: &QuadraticField) -> Vec<FracIdeal> {
    let narrow = narrow_class_reps(field);
    let mut reps: Vec<FracIdeal> = Vec::new();
    'next: for cand in narrow {
        for rep in &reps {
            if is_principal(&cand.div(rep).expect("same field")) {
                continue 'next;
            }
        }
        reps.push(cand);
    }
    reps
}

/// Totally positive generator of the codifferent, when one exists; for real
/// quadratic fields this happens exactly when the fundamental unit has
/// norm -1.
pub fn codifferent_tp_principal(field: &QuadraticField) -> Option<FieldElement> {
    let (_, codiff) = different_codifferent(field);
    tp_generator(&codiff)
}
