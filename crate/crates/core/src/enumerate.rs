//! Exact enumeration of ideal lattice points inside an embedding box.
//!
//! Points of scale * (Z*a + Z*(b + omega)) with both real embeddings inside
//! closed rational intervals. The enumeration basis is first Lagrange-reduced
//! against the box shape in floating point; that choice only affects speed,
//! never the result, because the per-column windows are then computed with
//! exact quadratic-surd floors and ceilings for whatever basis came out. The
//! reduction matters: ideal lattices are sheared by roughly the fundamental
//! unit, so a box hugging one embedding axis makes the naive column count
//! proportional to the box length rather than to the number of points. Every
//! lattice point in the box is visited exactly once.

use crate::ideals::FracIdeal;
use crate::intmath::{ceil_surd, floor_surd};
use crate::qfield::FieldElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::ops::ControlFlow;

/// floor((c + e*sqrt(d))/a) for rationals c, e and a positive integer a.
fn floor_rat_surd(c: &BigRational, e: &BigRational, d: i64, a: &BigInt) -> BigInt {
    let p = c.numer() * e.denom();
    let q = e.numer() * c.denom();
    let r = c.denom() * e.denom() * a;
    floor_surd(&p, &q, &BigInt::from(d), &r)
}

/// ceil((c + e*sqrt(d))/a) for rationals c, e and a positive integer a.
fn ceil_rat_surd(c: &BigRational, e: &BigRational, d: i64, a: &BigInt) -> BigInt {
    let p = c.numer() * e.denom();
    let q = e.numer() * c.denom();
    let r = c.denom() * e.denom() * a;
    ceil_surd(&p, &q, &BigInt::from(d), &r)
}

/// Sign of c + e*sqrt(d). The mixed-sign branch compares c^2 with e^2*d;
/// equality there would force sqrt(d) rational, so it cannot happen for
/// squarefree d unless both parts vanish.
fn surd_sign(c: &BigRational, e: &BigRational, d: i64) -> Ordering {
    let zero = BigRational::zero();
    match (c.cmp(&zero), e.cmp(&zero)) {
        (Ordering::Equal, se) => se,
        (sc, Ordering::Equal) => sc,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (sc, _) => {
            let c2 = c * c;
            let e2d = e * e * BigRational::from_integer(BigInt::from(d));
            if sc == Ordering::Greater {
                c2.cmp(&e2d)
            } else {
                e2d.cmp(&c2)
            }
        }
    }
}

/// A quadratic surd c + e*sqrt(d) with rational parts.
type Surd = (BigRational, BigRational);

fn surd_cmp(a: &Surd, b: &Surd, d: i64) -> Ordering {
    surd_sign(&(&a.0 - &b.0), &(&a.1 - &b.1), d)
}

/// (A/t, B/t) ordered as an integer window for m with m*t in [A, B], where
/// t is a nonzero surd of known sign.
fn coeff_window(
    a_val: &Surd,
    b_val: &Surd,
    t: &Surd,
    t_sign: Ordering,
    d: i64,
) -> (BigInt, BigInt) {
    let dq = BigRational::from_integer(BigInt::from(d));
    let nt = &t.0 * &t.0 - &t.1 * &t.1 * &dq;
    debug_assert!(!nt.is_zero(), "surd norms of nonzero elements are nonzero");
    let div = |v: &Surd| -> Surd {
        (
            (&v.0 * &t.0 - &v.1 * &t.1 * &dq) / &nt,
            (&v.1 * &t.0 - &v.0 * &t.1) / &nt,
        )
    };
    let lo = div(a_val);
    let hi = div(b_val);
    let (lo, hi) = if t_sign == Ordering::Less { (hi, lo) } else { (lo, hi) };
    let one = BigInt::one();
    (
        ceil_rat_surd(&lo.0, &lo.1, d, &one),
        floor_rat_surd(&hi.0, &hi.1, d, &one),
    )
}

/// Lagrange-reduce the basis (a, b + omega) against the box magnitudes, in
/// omega coordinates. Floating point here only picks which unimodular image
/// of the basis the exact enumeration walks; any failure falls back to the
/// input basis.
fn reduced_basis(
    a: &BigInt,
    b: &BigInt,
    w0: f64,
    ysq: f64,
    m1: f64,
    m2: f64,
) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    let ident = ((a.clone(), BigInt::zero()), (b.clone(), BigInt::one()));
    if !(m1.is_finite() && m2.is_finite() && m1 > 0.0 && m2 > 0.0) {
        return ident;
    }
    let (t1, t2) = (1.0 / m1, 1.0 / m2);
    let embed = |ca: &BigInt, cb: &BigInt| -> Option<(f64, f64)> {
        let caf = ca.to_f64()?;
        let cbf = cb.to_f64()?;
        let r = caf + cbf * w0;
        let s = cbf * ysq;
        let v = ((r + s) * t1, (r - s) * t2);
        (v.0.is_finite() && v.1.is_finite()).then_some(v)
    };
    let (mut v, mut w) = ident.clone();
    for _ in 0..48 {
        let (Some(ev), Some(ew)) = (embed(&v.0, &v.1), embed(&w.0, &w.1)) else {
            return ident;
        };
        let nv = ev.0 * ev.0 + ev.1 * ev.1;
        let nw = ew.0 * ew.0 + ew.1 * ew.1;
        if nv > nw {
            std::mem::swap(&mut v, &mut w);
            continue;
        }
        let mu = ((ev.0 * ew.0 + ev.1 * ew.1) / nv).round();
        if !(mu.is_finite() && mu.abs() <= 4.0e15) {
            return ident;
        }
        if mu == 0.0 {
            break;
        }
        let mui = BigInt::from(mu as i64);
        w.0 -= &mui * &v.0;
        w.1 -= &mui * &v.1;
    }
    (v, w)
}

/// Visit the omega-coordinates (x, k) of every ideal point
/// scale * (x + k*omega) whose embeddings lie in the closed boxes
/// `e1` (first embedding) and `e2` (second embedding).
pub fn for_each_coord<F: FnMut(BigInt, BigInt)>(
    ideal: &FracIdeal,
    e1: (&BigRational, &BigRational),
    e2: (&BigRational, &BigRational),
    mut f: F,
) {
    let _ = try_for_each_coord(ideal, e1, e2, |x, k| {
        f(x, k);
        ControlFlow::Continue(())
    });
}

/// [`for_each_coord`] with an early exit: the callback returns
/// `ControlFlow::Break` to stop the walk (existence queries pay for only the
/// points up to the first hit).
pub fn try_for_each_coord<F: FnMut(BigInt, BigInt) -> ControlFlow<()>>(
    ideal: &FracIdeal,
    e1: (&BigRational, &BigRational),
    e2: (&BigRational, &BigRational),
    mut f: F,
) -> ControlFlow<()> {
    let field = *ideal.field();
    let d = field.d();
    let (lo1, hi1) = e1;
    let (lo2, hi2) = e2;
    if lo1 > hi1 || lo2 > hi2 {
        return ControlFlow::Continue(());
    }
    let s = ideal.scale();
    // omega = w + y*sqrt(d)
    let (w0, y) = if d % 4 == 1 {
        (
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::new(BigInt::one(), BigInt::from(2)),
        )
    } else {
        (BigRational::zero(), BigRational::one())
    };
    let mag = |lo: &BigRational, hi: &BigRational| -> f64 {
        let m = lo.abs().max(hi.abs());
        (&m / s).to_f64().unwrap_or(f64::INFINITY)
    };
    let sqd = (d as f64).sqrt();
    let ((va, vb), (wa, wb)) = reduced_basis(
        ideal.a(),
        ideal.b(),
        w0.to_f64().unwrap_or(0.0),
        y.to_f64().unwrap_or(1.0) * sqd,
        mag(lo1, hi1),
        mag(lo2, hi2),
    );
    // basis embeddings as surds: v = va + vb*omega, first embedding vc + ve*sqrt d
    let vc = BigRational::from_integer(va.clone()) + BigRational::from_integer(vb.clone()) * &w0;
    let ve = BigRational::from_integer(vb.clone()) * &y;
    let wc = BigRational::from_integer(wa.clone()) + BigRational::from_integer(wb.clone()) * &w0;
    let we = BigRational::from_integer(wb.clone()) * &y;
    let v1_sign = surd_sign(&vc, &ve, d);
    let v2_sign = surd_sign(&vc, &(-&ve), d);
    debug_assert!(v1_sign != Ordering::Equal && v2_sign != Ordering::Equal);
    // determinant v1*w2 - v2*w1 = g*sqrt(d)
    let g = BigRational::from_integer(BigInt::from(2)) * (&ve * &wc - &vc * &we);
    debug_assert!(!g.is_zero(), "basis vectors are independent");
    let lo1s = lo1 / s;
    let hi1s = hi1 / s;
    let lo2s = lo2 / s;
    let hi2s = hi2 / s;
    // k of a point (p1, p2) is (p2*v1 - p1*v2)/(g*sqrt d); its extremes over
    // the box sit at corners. (C + E*sqrt d)/(g*sqrt d) = E/g + (C/(g d))*sqrt d.
    let gd = &g * BigRational::from_integer(BigInt::from(d));
    let corner = |p1: &BigRational, p2: &BigRational| -> Surd {
        let c = &vc * &(p2 - p1);
        let e = &ve * &(p2 + p1);
        (&e / &g, &c / &gd)
    };
    let corners = [
        corner(&lo1s, &lo2s),
        corner(&lo1s, &hi2s),
        corner(&hi1s, &lo2s),
        corner(&hi1s, &hi2s),
    ];
    let mut k_lo = &corners[0];
    let mut k_hi = &corners[0];
    for c in &corners[1..] {
        if surd_cmp(c, k_lo, d) == Ordering::Less {
            k_lo = c;
        }
        if surd_cmp(c, k_hi, d) == Ordering::Greater {
            k_hi = c;
        }
    }
    let one = BigInt::one();
    let k_min = ceil_rat_surd(&k_lo.0, &k_lo.1, d, &one);
    let k_max = floor_rat_surd(&k_hi.0, &k_hi.1, d, &one);
    let mut k = k_min;
    while k <= k_max {
        let kr = BigRational::from_integer(k.clone());
        // m*v1 in [lo1s, hi1s] - k*w1 and m*v2 in [lo2s, hi2s] - k*w2
        let kc = &kr * &wc;
        let ke = &kr * &we;
        let (l1, h1) = coeff_window(
            &(&lo1s - &kc, -&ke),
            &(&hi1s - &kc, -&ke),
            &(vc.clone(), ve.clone()),
            v1_sign,
            d,
        );
        let (l2, h2) = coeff_window(
            &(&lo2s - &kc, ke.clone()),
            &(&hi2s - &kc, ke.clone()),
            &(vc.clone(), -&ve),
            v2_sign,
            d,
        );
        let m_lo = l1.max(l2);
        let m_hi = h1.min(h2);
        let mut m = m_lo;
        while m <= m_hi {
            f(&m * &va + &k * &wa, &m * &vb + &k * &wb)?;
            m += 1;
        }
        k += 1;
    }
    ControlFlow::Continue(())
}

/// Materialized version of [`for_each_coord`]: the actual field elements.
pub fn ideal_points_in_box(
    ideal: &FracIdeal,
    e1: (&BigRational, &BigRational),
    e2: (&BigRational, &BigRational),
) -> Vec<FieldElement> {
    let field = *ideal.field();
    let s = ideal.scale().clone();
    let mut out = Vec::new();
    for_each_coord(ideal, e1, e2, |x, k| {
        let e = field
            .from_omega_coords(BigRational::from_integer(x), BigRational::from_integer(k))
            .scale(&s);
        out.push(e);
    });
    out
}
