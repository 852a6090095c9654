//! Indecomposable elements and the generator-count invariant kappa.
//!
//! A totally positive element of an ideal I is I-indecomposable when it is
//! not a sum of two totally positive elements of I. For the ring itself the
//! indecomposables are exactly the odd-index semiconvergents of omega's
//! continued fraction, taken over one period of the totally positive
//! fundamental unit; the (+,-) variant uses the even indices. The brute-force
//! enumerator is independent of that classification: it walks every lattice
//! point under the norm bound disc * N(I)^2 and tests decomposability by an
//! exhaustive box search, so the two paths check each other.
//!
//! kappa(I) is the least number of generators of I^+ as a semigroup over the
//! totally positive part of the ring; only its bounds are computable here.

use crate::cfrac::{fundamental_unit, CFExpansion};
use crate::enumerate::{for_each_coord, ideal_points_in_box, try_for_each_coord};
use crate::error::{Error, Result};
use crate::ideals::{generator, narrow_class_reps, tp_generator, FracIdeal};
use crate::interval::{coarse_upper, sqrt_upper};
use crate::qfield::{FieldElement, QuadraticField};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::ops::ControlFlow;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassSource {
    /// Semiconvergent alpha_{i,r} of the field's canonical expansion.
    Cf { i: i64, r: BigInt },
    /// Found by exhaustive enumeration under the norm bound.
    Brute,
}

/// One unit class of indecomposables, tagged with how it was found and the
/// ideal it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndecClass {
    pub representative: FieldElement,
    pub source: ClassSource,
    pub ideal: FracIdeal,
}

/// Decide whether alpha splits as beta + gamma with both parts in I^+.
///
/// The witness search enumerates every lattice point of I in the open box
/// (0, alpha) x (0, alpha') and is therefore complete. The returned pair has
/// the smaller part first.
pub fn is_decomposable(
    alpha: &FieldElement,
    ideal: &FracIdeal,
) -> Result<Option<(FieldElement, FieldElement)>> {
    if !ideal.contains(alpha) || !alpha.is_totally_positive() {
        return Err(Error::NotInIdealPlus);
    }
    let (i1, i2) = alpha.embed_intervals();
    let zero = BigRational::zero();
    let hi1 = coarse_upper(i1.hi(), 24);
    let hi2 = coarse_upper(i2.hi(), 24);
    let pts = ideal_points_in_box(ideal, (&zero, &hi1), (&zero, &hi2));
    let mut witnesses: Vec<FieldElement> = pts
        .into_iter()
        .filter(|b| b.is_totally_positive() && (alpha - b).is_totally_positive())
        .collect();
    witnesses.sort();
    Ok(witnesses.into_iter().next().map(|b| {
        let g = alpha - &b;
        (b, g)
    }))
}

fn cf_classes(field: &QuadraticField, indices: Vec<i64>, cf: &CFExpansion) -> Vec<IndecClass> {
    let ideal = FracIdeal::unit_ideal(*field);
    let mut out = Vec::new();
    for i in indices {
        let cap = cf.u((i + 2) as u64);
        let mut r = BigInt::zero();
        while r < cap {
            let rep = cf
                .semiconvergent(i, &r)
                .expect("r below the partial quotient is in range");
            out.push(IndecClass {
                representative: rep,
                source: ClassSource::Cf { i, r: r.clone() },
                ideal: ideal.clone(),
            });
            r += 1;
        }
    }
    out
}

/// Unit classes of the indecomposables of the ring of integers, from the
/// odd-index semiconvergents over one totally-positive-unit period.
pub fn indecomposables_ring(field: &QuadraticField) -> Vec<IndecClass> {
    let cf = CFExpansion::of_field(field);
    let s = cf.period_len() as i64;
    let end = if s % 2 == 1 { 2 * s - 1 } else { s - 1 };
    let indices: Vec<i64> = (-1..end).step_by(2).collect();
    cf_classes(field, indices, &cf)
}

/// Unit classes of the (+,-)-indecomposables (alpha > 0 > alpha', not a sum
/// of two such), from the even-index semiconvergents.
pub fn indecomposables_pm(field: &QuadraticField) -> Vec<IndecClass> {
    let cf = CFExpansion::of_field(field);
    let s = cf.period_len() as i64;
    let end = if s % 2 == 1 { 2 * s - 1 } else { s };
    let indices: Vec<i64> = (0..end).step_by(2).collect();
    cf_classes(field, indices, &cf)
}

/// Totally positive elements of the ideal with norm at most `bound`, one per
/// unit orbit: representatives satisfy 1 <= alpha/alpha' < eps_plus^2.
pub fn window_tp_reps(ideal: &FracIdeal, bound: &BigRational) -> Vec<FieldElement> {
    let field = *ideal.field();
    let fu = fundamental_unit(&field);
    let eps2 = &fu.eps_plus * &fu.eps_plus;
    let e_hi = coarse_upper(fu.eps_plus.embed_intervals().0.hi(), 24);
    let sb = coarse_upper(&sqrt_upper(bound), 24);
    let hi1 = &sb * &e_hi;
    let zero = BigRational::zero();
    let scale = ideal.scale().clone();
    let mut out = Vec::new();
    // Window elements sit under the hyperbola a1*a2 = bound with
    // sqrt(N) <= a1 < sqrt(N)*eps_plus, so one bounding rectangle holds
    // ~bound*eps_plus lattice points while the region itself holds only
    // ~bound*log(eps_plus). Cover it with doubling strips in a1, each
    // clipped to the hyperbola; strip edges may repeat points, removed by
    // the final dedup. Norms of nonzero ideal elements are at least N(I),
    // so a1 >= sqrt(N(I)) and the first strip may start there.
    let two = BigRational::from_integer(BigInt::from(2));
    let mut t = sqrt_upper(&ideal.norm()) / &two;
    while t < hi1 {
        let top = (&t * &two).min(hi1.clone());
        let height = (bound / &t).min(sb.clone());
        for_each_coord(ideal, (&t, &top), (&zero, &height), |x, k| {
            let g = field
                .from_omega_coords(BigRational::from_integer(x), BigRational::from_integer(k))
                .scale(&scale);
            if g.is_totally_positive()
                && g.norm() <= *bound
                && (&g - &g.conj()).signum() != Ordering::Less
                && (&g - &(&eps2 * &g.conj())).signum() == Ordering::Less
            {
                out.push(g);
            }
        });
        t = top;
    }
    out.sort();
    out.dedup();
    out
}

/// Existence form of [`is_decomposable`]: stops at the first valid part
/// instead of collecting the canonical witness, which keeps bulk filtering
/// cheap (a decomposable element's box usually yields a part immediately;
/// an indecomposable element's box has no interior points and costs only
/// its line count).
fn has_tp_split(alpha: &FieldElement, ideal: &FracIdeal) -> bool {
    let (i1, i2) = alpha.embed_intervals();
    let zero = BigRational::zero();
    let hi1 = coarse_upper(i1.hi(), 24);
    let hi2 = coarse_upper(i2.hi(), 24);
    let field = *ideal.field();
    let scale = ideal.scale().clone();
    let mut found = false;
    let _ = try_for_each_coord(ideal, (&zero, &hi1), (&zero, &hi2), |x, k| {
        let b = field
            .from_omega_coords(BigRational::from_integer(x), BigRational::from_integer(k))
            .scale(&scale);
        if b.is_totally_positive() && (alpha - &b).is_totally_positive() {
            found = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Complete list of unit classes of I-indecomposables, by exhaustive
/// enumeration under the norm bound disc * N(I)^2. Fractional ideals are
/// rescaled to their primitive integral part first (the class, and hence the
/// list up to that rescale, is unchanged).
pub fn i_indecomposables(ideal: &FracIdeal) -> Vec<IndecClass> {
    let (prim, _) = ideal.primitive_part();
    let field = *prim.field();
    let n = prim.norm();
    let bound = BigRational::from_integer(BigInt::from(field.discriminant())) * &n * &n;
    window_tp_reps(&prim, &bound)
        .into_iter()
        .filter(|rep| !has_tp_split(rep, &prim))
        .map(|rep| IndecClass {
            representative: rep,
            source: ClassSource::Brute,
            ideal: prim.clone(),
        })
        .collect()
}

/// Continued-fraction upper bound for kappa(I), split by the period parity
/// and the sign pattern of a generator.
pub fn kappa_upper_cf(ideal: &FracIdeal) -> Result<u64> {
    let g = generator(ideal).ok_or(Error::NotPrincipal)?;
    let cf = CFExpansion::of_field(ideal.field());
    let s = cf.period_len() as u64;
    let sum_over = |step_start: u64, step: u64| -> u64 {
        let mut acc = BigInt::zero();
        let mut j = step_start;
        while j <= s {
            acc += cf.u(j);
            j += step;
        }
        acc.to_u64().expect("partial quotient sums stay small")
    };
    let value = if s % 2 == 1 {
        sum_over(1, 1)
    } else if g.conj().is_positive() {
        sum_over(1, 2)
    } else {
        sum_over(2, 2)
    };
    Ok(value)
}

/// Upper bound for kappa(I): the number of classes of I-indecomposables.
pub fn kappa_upper_classcount(ideal: &FracIdeal) -> u64 {
    i_indecomposables(ideal).len() as u64
}

/// kappa(I) = 1 exactly when I has a totally positive generator.
pub fn kappa_is_one(ideal: &FracIdeal) -> bool {
    tp_generator(ideal).is_some()
}

/// Bounds for kappa(K) = max over narrow classes of kappa(I).
pub fn kappa_field_bound(field: &QuadraticField) -> (u64, u64) {
    let reps = narrow_class_reps(field);
    let lower = if reps.len() == 1 { 1 } else { 2 };
    let upper = reps
        .iter()
        .map(|rep| {
            if kappa_is_one(rep) {
                1
            } else {
                let cc = kappa_upper_classcount(rep);
                match kappa_upper_cf(rep) {
                    Ok(cf) => cf.min(cc),
                    Err(_) => cc,
                }
            }
        })
        .max()
        .unwrap_or(1);
    (lower, upper)
}

/// A nonzero beta in the ideal whose square is dominated by alpha in both
/// embeddings, when alpha is in I^+. Such a beta always exists once
/// N(alpha) > disc * N(I)^2, which is how the norm bound on indecomposables
/// is certified.
pub fn square_domination_witness(
    alpha: &FieldElement,
    ideal: &FracIdeal,
) -> Result<Option<FieldElement>> {
    if !ideal.contains(alpha) || !alpha.is_totally_positive() {
        return Err(Error::NotInIdealPlus);
    }
    let (i1, i2) = alpha.embed_intervals();
    let s1 = coarse_upper(&sqrt_upper(i1.hi()), 24);
    let s2 = coarse_upper(&sqrt_upper(i2.hi()), 24);
    let pts = ideal_points_in_box(ideal, (&(-&s1), &s1), (&(-&s2), &s2));
    let mut hits: Vec<FieldElement> = pts
        .into_iter()
        .filter(|b| {
            !b.is_zero() && b.is_positive() && (alpha - &(b * b)).is_totally_positive()
        })
        .collect();
    hits.sort();
    Ok(hits.into_iter().next())
}

/// Split w in I^+ into I-indecomposable summands by repeated witness search.
pub fn decompose_fully(w: &FieldElement, ideal: &FracIdeal) -> Result<Vec<FieldElement>> {
    let mut stack = vec![w.clone()];
    let mut out = Vec::new();
    while let Some(cur) = stack.pop() {
        match is_decomposable(&cur, ideal)? {
            Some((b, g)) => {
                stack.push(b);
                stack.push(g);
            }
            None => out.push(cur),
        }
    }
    out.sort();
    Ok(out)
}

/// Same totally-positive-unit orbit: the quotient is an integral totally
/// positive unit either way around.
pub fn same_class(a: &FieldElement, b: &FieldElement) -> bool {
    let q = a / b;
    let qi = b / a;
    q.norm() == BigRational::from_integer(BigInt::from(1))
        && q.is_totally_positive()
        && q.is_integral()
        && qi.is_integral()
}
