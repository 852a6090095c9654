//! Rank bounds for universal quadratic forms over real quadratic fields.
//!
//! The pipeline: a universal form of rank R transfers to a positive definite
//! Z-lattice of rank 2R whose short vectors are capped by cap_c, while the
//! trace-level count of totally positive codifferent elements grows like
//! disc^{3/2} against Robin's divisor bound. Comparing the two (main_rhs vs
//! cap_c) forces a minimum rank, eventually unbounded in the discriminant
//! (disc_threshold), with a complementary lifting bound cutting the other
//! direction (lifting_disc_bound).
//!
//! Every analytic quantity is a certified interval; every lattice count is an
//! exact integer from a rational LDL^T enumeration.

use crate::error::{Error, Result};
use crate::ideals::{different_codifferent, FracIdeal};
use crate::intmath::{ceil_surd, floor_surd};
use crate::interval::{cbrt_interval, Interval, E_GAMMA, PI};
use crate::qfield::{FieldElement, QuadraticField};
use crate::zeta::{trace_level_codifferent, SiegelData};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Trace cutoff per degree: floor(d/6), plus one unless d = 1 mod 6.
pub fn r_d(d: u32) -> u32 {
    assert!(d >= 1);
    if d % 6 == 1 {
        d / 6
    } else {
        d / 6 + 1
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Short-vector cap 2*binom(r+4i-1, 4i-1) - 1 for a rank-r lattice at norm
/// bound i. The formula extends to r = 0 (value 1: the zero vector).
pub fn cap_c(r: u32, i: u32) -> BigInt {
    assert!(i >= 1);
    BigInt::from(2) * binomial(r as u64 + 4 * i as u64 - 1, 4 * i as u64 - 1) - 1
}

/// The divisor-sum majorant e^gamma x lnln x + 0.6483 x / lnln x; needs
/// x >= 3 so the inner logarithm is positive.
pub fn robin_expr(x: &Interval) -> Result<Interval> {
    let lnln = x.ln()?.ln()?;
    let t1 = E_GAMMA.mul(x).mul(&lnln);
    let t2 = x.scale(&BigRational::new(BigInt::from(6483), BigInt::from(10000))).div(&lnln);
    Ok(t1.add(&t2).compressed())
}

/// Robin's bound on sigma(n) as a certified interval, n >= 3.
pub fn robin_bound(n: u64) -> Result<Interval> {
    if n < 3 {
        return Err(Error::DomainError(format!(
            "Robin's bound needs n >= 3, got {n}"
        )));
    }
    robin_expr(&Interval::point(BigRational::from_integer(BigInt::from(n))))
}

/// g(l, disc): Robin's majorant evaluated at x = l^d disc / d^d, clamped
/// from below by 4; for x < 3 the majorant is inapplicable and the clamp
/// value 4 covers sigma on {1, 2, 3}.
pub fn g_bound(ell: u64, d: u32, disc: &BigInt) -> Interval {
    assert!(ell >= 1 && d >= 2 && disc.is_positive());
    let x = BigRational::new(
        BigInt::from(ell).pow(d) * disc,
        BigInt::from(d).pow(d),
    );
    if x < rat_int(3) {
        return Interval::point(rat_int(4));
    }
    let expr = robin_expr(&Interval::point(x)).expect("x >= 3");
    expr.max_with(&rat_int(4))
}

/// G(disc) = min over trace levels l <= r_d of 1/g(l, disc).
pub fn g_of(disc: &BigInt, d: u32) -> Result<Interval> {
    let r = r_d(d);
    if r == 0 {
        return Err(Error::DegreeTooSmall(d));
    }
    let recips: Vec<Interval> = (1..=r as u64)
        .map(|ell| g_bound(ell, d, disc).recip())
        .collect();
    Ok(Interval::min_of(&recips).compressed())
}

/// B(d): minimum of 1/b over the weights of the sign that degree's formula
/// uses (positive for even d, negative for odd d).
pub fn b_of(d: u32, data: &SiegelData) -> Result<BigRational> {
    if data.d != d {
        return Err(Error::MissingCoefficient(d, 1));
    }
    let mut best: Option<BigRational> = None;
    for b in &data.coeffs {
        let candidate = if d % 2 == 0 && b.is_positive() {
            Some(b.recip())
        } else if d % 2 == 1 && b.is_negative() {
            Some(-b.recip())
        } else {
            None
        };
        if let Some(c) = candidate {
            best = Some(match best {
                None => c,
                Some(old) => old.min(c),
            });
        }
    }
    best.ok_or(Error::NoCoefficientOfRequiredSign(d))
}

/// The right-hand side G/(B 2^d) * disc^{3/2} * (1/4pi)^d that a universal
/// form's short-vector cap must exceed.
pub fn main_rhs(disc: &BigInt, d: u32, data: &SiegelData) -> Result<Interval> {
    assert!(disc.is_positive());
    let g_cap = g_of(disc, d)?;
    let b_cap = b_of(d, data)?;
    let dr = BigRational::from_integer(disc.clone());
    let disc32 = Interval::point(dr.clone()).sqrt().scale(&dr);
    let inv_4pi_d = PI.scale(&rat_int(4)).powi(d).recip();
    let scalar = (b_cap * BigRational::from_integer(BigInt::one() << d)).recip();
    Ok(g_cap
        .scale(&scalar)
        .mul(&disc32)
        .mul(&inv_4pi_d)
        .compressed())
}

/// Least R >= 1 whose transferred lattice cap cap_c(R*d, r_d) still exceeds
/// the certified lower end of main_rhs; ranks below it are impossible for
/// universal forms.
pub fn min_rank_bound(disc: &BigInt, d: u32, data: &SiegelData) -> Result<u32> {
    let rhs = main_rhs(disc, d, data)?;
    let r = r_d(d);
    let mut rank = 1u32;
    while BigRational::from_integer(cap_c(rank * d, r)) <= *rhs.lo() {
        rank += 1;
    }
    Ok(rank)
}

/// Certified discriminant threshold: for every disc > the returned value,
/// min_rank_bound exceeds big_r. Beyond 15*d^d each x_l = l^d disc/d^d
/// satisfies lnln(x) ln(x) >= 2, which makes every disc^{3/2}/g(l) strictly
/// increasing (3g - 2xg' >= 0 term by term), so a single upward crossing
/// found by bisection certifies all larger discriminants.
pub fn disc_threshold(d: u32, big_r: u32, data: &SiegelData) -> Result<BigInt> {
    assert!(big_r >= 1);
    let r = r_d(d);
    if r == 0 {
        return Err(Error::DegreeTooSmall(d));
    }
    let cap = BigRational::from_integer(cap_c(big_r * d, r));
    let start = BigInt::from(15) * BigInt::from(d).pow(d);
    let hits = |delta: &BigInt| -> Result<bool> { Ok(*main_rhs(delta, d, data)?.lo() >= cap) };
    if hits(&start)? {
        // the crossing happened before the certified-monotone region starts;
        // the threshold cannot be placed lower than the region's entry point
        return Ok(start);
    }
    let mut lo = start.clone();
    let mut hi: BigInt = &start * BigInt::from(2);
    let mut guard = 0u32;
    while !hits(&hi)? {
        lo = hi.clone();
        hi *= 2;
        guard += 1;
        assert!(guard < 4000, "threshold search diverged");
    }
    while &lo + BigInt::one() < hi {
        let mid: BigInt = (&lo + &hi) / BigInt::from(2);
        if hits(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // hi is the first discriminant at or beyond `start` whose certified rhs
    // reaches the cap; monotonicity carries the crossing to everything above
    Ok(hi - BigInt::one())
}

/// Lifting bound |b_{r_d} (4 pi^2)^d d|^{2/3}: discriminants above it cannot
/// lift the relevant modular weight, so the remaining fields are finite and
/// explicit. Stated for degrees up to 43.
pub fn lifting_disc_bound(d: u32, data: &SiegelData) -> Result<Interval> {
    assert!(d >= 1);
    if d > 43 {
        return Err(Error::DegreeTooLarge(d));
    }
    let r = r_d(d);
    if r == 0 || data.d != d || (data.coeffs.len() as u32) < r {
        return Err(Error::MissingCoefficient(d, r.max(1)));
    }
    let b = data.coeffs[(r - 1) as usize].abs();
    let four_pi2 = PI.mul(&PI).scale(&rat_int(4));
    let v = four_pi2
        .powi(d)
        .scale(&(b * BigRational::from_integer(BigInt::from(d))));
    let sq = v.mul(&v);
    Ok(Interval::new(
        cbrt_interval(sq.lo()).lo().clone(),
        cbrt_interval(sq.hi()).hi().clone(),
    )
    .compressed())
}

/// Smallest trace of a totally positive codifferent element; the scan is
/// bounded because the trace-dual of 1 has trace 1.
pub fn min_codifferent_trace(field: &QuadraticField) -> u64 {
    for ell in 1..=64 {
        if !trace_level_codifferent(field, ell).is_empty() {
            return ell;
        }
    }
    unreachable!("a quadratic codifferent has elements of small trace");
}

/// Everything the rank-bound CLI verb reports for one discriminant.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub d: u32,
    pub disc: BigInt,
    pub r_d: u32,
    pub g_value: Interval,
    pub b_value: BigRational,
    pub rhs: Interval,
    pub r_min: u32,
    pub notes: String,
}

pub fn bound_report(disc: &BigInt, d: u32, data: &SiegelData) -> Result<BoundReport> {
    let r = r_d(d);
    let g_value = g_of(disc, d)?;
    let b_value = b_of(d, data)?;
    let rhs = main_rhs(disc, d, data)?;
    let r_min = min_rank_bound(disc, d, data)?;
    let x1 = BigRational::new(disc.clone(), BigInt::from(d).pow(d));
    let notes = if x1 < rat_int(3) {
        "divisor majorant clamped at 4 for the first trace level".to_string()
    } else {
        String::new()
    };
    Ok(BoundReport {
        d,
        disc: disc.clone(),
        r_d: r,
        g_value,
        b_value,
        rhs,
        r_min,
        notes,
    })
}

fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !a[r][col].is_zero()) {
            None => return BigRational::zero(),
            Some(p) => p,
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

fn det_field(field: &QuadraticField, m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut det = field.one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !a[r][col].is_zero()) {
            None => return field.zero(),
            Some(p) => p,
        };
        if piv != col {
            a.swap(piv, col);
            det = -&det;
        }
        det = &det * &a[col][col];
        let inv = a[col][col].inverse().expect("pivot is nonzero");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                a[r][c] = &a[r][c] - &(&f * &a[col][c]);
            }
        }
    }
    det
}

/// Positive definite integral quadratic form: rational symmetric Gram with
/// integer diagonal and half-integer off-diagonal entries (classical after
/// doubling), definiteness certified by exact leading principal minors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntGram {
    entries: Vec<Vec<BigRational>>,
}

impl IntGram {
    pub fn new(entries: Vec<Vec<BigRational>>) -> Result<IntGram> {
        let n = entries.len();
        assert!(n >= 1, "empty gram");
        for row in &entries {
            assert_eq!(row.len(), n, "gram must be square");
        }
        let two = rat_int(2);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(entries[i][j], entries[j][i], "gram must be symmetric");
                if !(&entries[i][j] * &two).is_integer()
                    || (i == j && !entries[i][j].is_integer())
                {
                    return Err(Error::NotHalfIntegral);
                }
            }
        }
        for k in 1..=n {
            let sub: Vec<Vec<BigRational>> =
                entries[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !det_rational(&sub).is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(IntGram { entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    /// Classical means the Gram matrix itself is integral.
    pub fn is_classical(&self) -> bool {
        self.entries
            .iter()
            .all(|row| row.iter().all(|e| e.is_integer()))
    }

    pub fn doubled(&self) -> IntGram {
        let two = rat_int(2);
        IntGram {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e * &two).collect())
                .collect(),
        }
    }

    pub fn det(&self) -> BigRational {
        det_rational(&self.entries)
    }

    /// The form's value x^T B x.
    pub fn evaluate(&self, x: &[BigInt]) -> BigRational {
        let n = self.rank();
        assert_eq!(x.len(), n);
        let mut acc = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &self.entries[i][j]
                    * BigRational::from_integer(&x[i] * &x[j]);
            }
        }
        acc
    }
}

/// Transfer an R x R totally positive definite Gram over the ring of
/// integers to the 2R x 2R rational Gram of the trace form twisted by a
/// totally positive codifferent element delta: entries Tr(delta w_k w_l B_ij)
/// on the Z-basis (1, omega) per variable.
pub fn trace_transfer(
    field: &QuadraticField,
    gram: &[Vec<FieldElement>],
    delta: &FieldElement,
) -> Result<IntGram> {
    let r = gram.len();
    assert!(r >= 1, "empty gram");
    for row in gram {
        assert_eq!(row.len(), r, "gram must be square");
    }
    for i in 0..r {
        for j in 0..r {
            assert_eq!(
                gram[i][j].field().d(),
                field.d(),
                "gram entry outside the field"
            );
            assert_eq!(gram[i][j], gram[j][i], "gram must be symmetric");
            let (u, v) = gram[i][j].omega_coords();
            if !u.is_integer() || !v.is_integer() {
                return Err(Error::NotIntegral);
            }
        }
    }
    for k in 1..=r {
        let sub: Vec<Vec<FieldElement>> = gram[..k].iter().map(|row| row[..k].to_vec()).collect();
        if !det_field(field, &sub).is_totally_positive() {
            return Err(Error::NotPositiveDefinite);
        }
    }
    let (_, codiff) = different_codifferent(field);
    if !delta.is_totally_positive() || !codiff.contains(delta) {
        return Err(Error::NotInCodifferent);
    }
    let basis = [field.one(), field.omega()];
    let n = 2 * r;
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for i in 0..r {
        for k in 0..2 {
            for j in 0..r {
                for l in 0..2 {
                    let prod = &(&(delta * &basis[k]) * &basis[l]) * &gram[i][j];
                    let tr = prod.trace();
                    debug_assert!(tr.is_integer(), "codifferent twist must integralize traces");
                    m[2 * i + k][2 * j + l] = tr;
                }
            }
        }
    }
    IntGram::new(m)
}

fn count_rec(
    i: usize,
    rem: &BigRational,
    xs: &mut [BigInt],
    d: &[BigRational],
    l: &[Vec<BigRational>],
    n: usize,
) -> BigInt {
    let mut center = BigRational::zero();
    for j in i + 1..n {
        if !xs[j].is_zero() {
            center += &l[j][i] * BigRational::from_integer(xs[j].clone());
        }
    }
    // window: d_i (x_i + center)^2 <= rem
    let ratio = rem / &d[i];
    let (a, b) = (ratio.numer().clone(), ratio.denom().clone());
    let (ce, cf) = (center.numer().clone(), center.denom().clone());
    let ab = &a * &b;
    let p = -&ce * &b;
    let r = &cf * &b;
    let hi = floor_surd(&p, &cf, &ab, &r);
    let lo = ceil_surd(&p, &(-&cf), &ab, &r);
    let mut total = BigInt::zero();
    let mut x = lo;
    while x <= hi {
        let v = BigRational::from_integer(x.clone()) + &center;
        let rem2 = rem - &(&d[i] * &v * &v);
        debug_assert!(!rem2.is_negative());
        if i == 0 {
            total += 1;
        } else {
            xs[i] = x.clone();
            total += count_rec(i - 1, &rem2, xs, d, l, n);
        }
        x += 1;
    }
    total
}

/// Exact count of lattice vectors with form value at most `bound`, zero
/// vector included. Non-classical Grams are doubled (and the bound with
/// them) so the enumeration runs over an integral matrix.
pub fn count_short_vectors(gram: &IntGram, bound: u32) -> BigInt {
    assert!(bound >= 1);
    let (work, budget) = if gram.is_classical() {
        (gram.clone(), BigInt::from(bound))
    } else {
        (gram.doubled(), BigInt::from(2 * bound))
    };
    let n = work.rank();
    let mut d = vec![BigRational::zero(); n];
    let mut l = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut di = work.entry(i, i).clone();
        for k in 0..i {
            let sub = &d[k] * &l[i][k] * &l[i][k];
            di -= sub;
        }
        debug_assert!(di.is_positive(), "LDL pivot of a definite form");
        for j in i + 1..n {
            let mut v = work.entry(j, i).clone();
            for k in 0..i {
                let sub = &d[k] * &l[j][k] * &l[i][k];
                v -= sub;
            }
            l[j][i] = v / &di;
        }
        d[i] = di;
    }
    let mut xs = vec![BigInt::zero(); n];
    count_rec(
        n - 1,
        &BigRational::from_integer(budget),
        &mut xs,
        &d,
        &l,
        n,
    )
}

/// Deterministic positive definite classical Gram for randomized checks:
/// B = L^T D L with unit lower-triangular integer L and positive integer
/// diagonal D, so definiteness holds by construction.
pub fn seeded_definite_gram(rng: &mut impl rand::Rng, max_rank: usize) -> IntGram {
    let n = rng.gen_range(1..=max_rank);
    let mut l = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        l[i][i] = BigInt::one();
        for j in 0..i {
            l[i][j] = BigInt::from(rng.gen_range(-2i64..=2));
        }
    }
    let d: Vec<BigInt> = (0..n)
        .map(|_| BigInt::from(rng.gen_range(1i64..=3)))
        .collect();
    let mut b = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigInt::zero();
            for k in 0..n {
                acc += &l[k][i] * &d[k] * &l[k][j];
            }
            b[i][j] = BigRational::from_integer(acc);
        }
    }
    IntGram::new(b).expect("construction is definite")
}

/// The counting chain behind the rank bound, on one concrete form: nonzero
/// short vectors of the transferred lattice must dominate the nonzero
/// totally positive codifferent elements up to trace r_d. The twist must
/// generate the codifferent for the chain's bijection to apply.
pub fn verify_counting_chain(
    field: &QuadraticField,
    gram: &[Vec<FieldElement>],
    delta: &FieldElement,
) -> Result<bool> {
    let transfer = trace_transfer(field, gram, delta)?;
    let (_, codiff) = different_codifferent(field);
    if FracIdeal::principal(delta)? != codiff {
        return Err(Error::NotCodifferentGenerator);
    }
    let r = r_d(2);
    let lhs = count_short_vectors(&transfer, r) - BigInt::one();
    let mut rhs = BigInt::zero();
    for ell in 1..=(r as u64) {
        rhs += BigInt::from(trace_level_codifferent(field, ell).len());
    }
    Ok(lhs >= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmath::factor_u64;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(d: i64) -> QuadraticField {
        QuadraticField::new(d).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gram_from_ints(rows: &[&[i64]]) -> Result<IntGram> {
        IntGram::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat_int(v)).collect())
                .collect(),
        )
    }

    fn sigma_u64(n: u64) -> u64 {
        let mut acc = 1u64;
        for (p, k) in factor_u64(n) {
            let mut term = 1u64;
            let mut pk = 1u64;
            for _ in 0..k {
                pk *= p;
                term += pk;
            }
            acc *= term;
        }
        acc
    }

    #[test]
    fn trace_cutoffs() {
        assert_eq!(r_d(1), 0);
        assert_eq!(r_d(2), 1);
        assert_eq!(r_d(6), 2);
        assert_eq!(r_d(7), 1);
        assert_eq!(r_d(12), 3);
        assert_eq!(r_d(13), 2);
    }

    #[test]
    fn short_vector_caps() {
        assert_eq!(cap_c(1, 1), BigInt::from(7));
        assert_eq!(cap_c(2, 1), BigInt::from(19));
        assert_eq!(cap_c(6, 1), BigInt::from(167));
        assert_eq!(cap_c(0, 1), BigInt::from(1));
        // strictly increasing in both arguments
        for r in 1..8u32 {
            for i in 1..4u32 {
                assert!(cap_c(r + 1, i) > cap_c(r, i));
                assert!(cap_c(r, i + 1) > cap_c(r, i));
            }
        }
    }

    #[test]
    fn robin_examples() {
        let b12 = robin_bound(12).unwrap();
        assert!(*b12.lo() > rat_int(28), "sigma(12) = 28 must sit below");
        assert!(*b12.hi() < rat(29, 1));
        let b3 = robin_bound(3).unwrap();
        assert!(*b3.lo() > rat_int(4));
        assert!(matches!(robin_bound(2).unwrap_err(), Error::DomainError(_)));
    }

    #[test]
    fn robin_dominates_divisor_sums() {
        let mut samples: Vec<u64> = (3..=300).collect();
        samples.extend((1..=80).map(|k| 12 * k)); // stress the near-extremal line
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        samples.extend((0..120).map(|_| rng.gen_range(3..=100_000u64)));
        for n in samples {
            let bound = robin_bound(n).unwrap();
            assert!(
                BigRational::from_integer(BigInt::from(sigma_u64(n))) < *bound.lo(),
                "sigma({n}) escapes Robin's bound"
            );
        }
    }

    #[test]
    fn g_examples() {
        let g = g_bound(1, 2, &BigInt::from(5));
        assert_eq!(*g.lo(), rat_int(4));
        assert_eq!(*g.hi(), rat_int(4));
        let g = g_bound(1, 2, &BigInt::from(1000));
        let mid = g.mid().to_f64().unwrap();
        assert!(
            (mid - 855.66).abs() < 0.01,
            "expression at x = 250 moved: {mid}"
        );
        // x = 3 exactly: expression wins over the clamp
        let g = g_bound(1, 2, &BigInt::from(12));
        assert!(*g.lo() > rat_int(20));
        assert!(*g.hi() < rat_int(22));
    }

    #[test]
    fn g_of_examples() {
        let g = g_of(&BigInt::from(5), 2).unwrap();
        assert_eq!(*g.lo(), rat(1, 4));
        assert_eq!(*g.hi(), rat(1, 4));
        let g = g_of(&BigInt::from(8), 2).unwrap();
        assert_eq!(*g.lo(), rat(1, 4));
        let g = g_of(&BigInt::from(1_000_000), 2).unwrap();
        let mid = g.mid().to_f64().unwrap();
        assert!((mid - 8.4287e-7).abs() < 1e-10, "G(10^6) moved: {mid:e}");
        assert_eq!(g_of(&BigInt::from(5), 1).unwrap_err(), Error::DegreeTooSmall(1));
    }

    #[test]
    fn b_examples() {
        let data = SiegelData::derived_quadratic();
        assert_eq!(b_of(2, &data).unwrap(), rat_int(240));
        let bad = SiegelData {
            d: 2,
            coeffs: vec![rat(-1, 7)],
            provenance: crate::zeta::Provenance::External,
        };
        assert_eq!(
            b_of(2, &bad).unwrap_err(),
            Error::NoCoefficientOfRequiredSign(2)
        );
        let odd = SiegelData::external(3, vec![rat(-1, 504)]).unwrap();
        assert_eq!(b_of(3, &odd).unwrap(), rat_int(504));
        assert_eq!(
            b_of(3, &data).unwrap_err(),
            Error::MissingCoefficient(3, 1)
        );
    }

    #[test]
    fn main_rhs_examples() {
        let data = SiegelData::derived_quadratic();
        let rhs = main_rhs(&BigInt::from(5), 2, &data).unwrap();
        let mid = rhs.mid().to_f64().unwrap();
        assert!((mid - 1.8438e-5).abs() < 1e-8, "rhs(5) moved: {mid:e}");
        let rhs8 = main_rhs(&BigInt::from(8), 2, &data).unwrap();
        let mid8 = rhs8.mid().to_f64().unwrap();
        assert!((mid8 - 3.7315e-5).abs() < 1e-8, "rhs(8) moved: {mid8:e}");
    }

    #[test]
    fn rank_bound_examples() {
        let data = SiegelData::derived_quadratic();
        assert_eq!(min_rank_bound(&BigInt::from(5), 2, &data).unwrap(), 1);
        assert_eq!(min_rank_bound(&BigInt::from(8), 2, &data).unwrap(), 1);
        // far beyond the crossing the bound must have moved
        let big: BigInt = BigInt::from(10u64).pow(14);
        assert!(min_rank_bound(&big, 2, &data).unwrap() >= 2);
    }

    #[test]
    fn threshold_certified() {
        let data = SiegelData::derived_quadratic();
        let t1 = disc_threshold(2, 1, &data).unwrap();
        // the crossing of cap 19 sits in the low 10^13 range
        assert!(t1 > BigInt::from(10u64).pow(12), "threshold too small: {t1}");
        assert!(t1 < BigInt::from(10u64).pow(15), "threshold too large: {t1}");
        let just_past = &t1 + BigInt::one();
        assert!(min_rank_bound(&just_past, 2, &data).unwrap() > 1);
        assert_eq!(min_rank_bound(&t1, 2, &data).unwrap(), 1);
        // monotone in the excluded rank
        let t2 = disc_threshold(2, 2, &data).unwrap();
        assert!(t2 >= t1);
        assert!(min_rank_bound(&(&t2 + BigInt::one()), 2, &data).unwrap() > 2);
        // rhs keeps growing past the certified point
        let rhs_a = main_rhs(&just_past, 2, &data).unwrap();
        let doubled: BigInt = &t1 * BigInt::from(2);
        let rhs_b = main_rhs(&doubled, 2, &data).unwrap();
        assert!(rhs_b.lo() > rhs_a.hi());
    }

    #[test]
    fn lifting_examples() {
        let data = SiegelData::derived_quadratic();
        let b = lifting_disc_bound(2, &data).unwrap();
        let mid = b.mid().to_f64().unwrap();
        assert!((mid - 5.525).abs() < 0.01, "lifting bound moved: {mid}");
        // the only real quadratic discriminant below it is 5
        assert!(*b.lo() > rat_int(5));
        assert!(*b.hi() < rat_int(8));
        assert_eq!(
            lifting_disc_bound(44, &data).unwrap_err(),
            Error::DegreeTooLarge(44)
        );
        let empty = SiegelData {
            d: 3,
            coeffs: vec![],
            provenance: crate::zeta::Provenance::External,
        };
        assert_eq!(
            lifting_disc_bound(3, &empty).unwrap_err(),
            Error::MissingCoefficient(3, 1)
        );
    }

    #[test]
    fn min_trace_examples() {
        assert_eq!(min_codifferent_trace(&field(5)), 1);
        assert_eq!(min_codifferent_trace(&field(2)), 1);
        assert_eq!(min_codifferent_trace(&field(3)), 1);
        assert_eq!(min_codifferent_trace(&field(5)), r_d(2) as u64);
    }

    #[test]
    fn transfer_examples() {
        let k5 = field(5);
        let delta5 = k5.element(rat(1, 2), rat(1, 10));
        let unit_gram = vec![vec![k5.one()]];
        let t = trace_transfer(&k5, &unit_gram, &delta5).unwrap();
        assert_eq!(*t.entry(0, 0), rat_int(1));
        assert_eq!(*t.entry(0, 1), rat_int(1));
        assert_eq!(*t.entry(1, 0), rat_int(1));
        assert_eq!(*t.entry(1, 1), rat_int(2));
        // det sanity: 1 = N(delta) * disc
        assert_eq!(t.det(), rat_int(1));
        assert_eq!(delta5.norm() * rat_int(5), rat_int(1));

        let k2 = field(2);
        let delta2 = k2.element(rat(1, 2), rat(1, 4));
        let t2 = trace_transfer(&k2, &[vec![k2.one()]], &delta2).unwrap();
        assert_eq!(*t2.entry(0, 0), rat_int(1));
        assert_eq!(*t2.entry(0, 1), rat_int(1));
        assert_eq!(*t2.entry(1, 1), rat_int(2));

        // 1 lies in every codifferent, so the twist by 1 is legal
        let t_one = trace_transfer(&k5, &unit_gram, &k5.one()).unwrap();
        assert_eq!(*t_one.entry(0, 0), rat_int(2));
        assert_eq!(*t_one.entry(0, 1), rat_int(1));
        assert_eq!(*t_one.entry(1, 1), rat_int(3));

        // 1/2 has trace form values outside Z: rejected
        let half = k5.element(rat(1, 2), rat(0, 1));
        assert_eq!(
            trace_transfer(&k5, &unit_gram, &half).unwrap_err(),
            Error::NotInCodifferent
        );
        // sign failure is rejected by the same gate
        assert_eq!(
            trace_transfer(&k5, &unit_gram, &(-&delta5)).unwrap_err(),
            Error::NotInCodifferent
        );
        // indefinite gram over the field
        let indef = vec![
            vec![k5.one(), k5.element(rat(2, 1), rat(0, 1))],
            vec![k5.element(rat(2, 1), rat(0, 1)), k5.one()],
        ];
        assert_eq!(
            trace_transfer(&k5, &indef, &delta5).unwrap_err(),
            Error::NotPositiveDefinite
        );
        // entries must be algebraic integers
        let frac = vec![vec![half.clone()]];
        assert_eq!(
            trace_transfer(&k5, &frac, &delta5).unwrap_err(),
            Error::NotIntegral
        );
    }

    #[test]
    fn gram_validation() {
        assert!(gram_from_ints(&[&[1, 0], &[0, 1]]).is_ok());
        assert_eq!(
            gram_from_ints(&[&[1, 2], &[2, 1]]).unwrap_err(),
            Error::NotPositiveDefinite
        );
        let third = IntGram::new(vec![
            vec![rat_int(1), rat(1, 3)],
            vec![rat(1, 3), rat_int(1)],
        ]);
        assert_eq!(third.unwrap_err(), Error::NotHalfIntegral);
        let half_diag = IntGram::new(vec![vec![rat(1, 2)]]);
        assert_eq!(half_diag.unwrap_err(), Error::NotHalfIntegral);
        // hexagonal: non-classical but valid
        let hex = IntGram::new(vec![
            vec![rat_int(1), rat(-1, 2)],
            vec![rat(-1, 2), rat_int(1)],
        ])
        .unwrap();
        assert!(!hex.is_classical());
        assert!(hex.doubled().is_classical());
    }

    #[test]
    fn short_vector_counts() {
        let id2 = gram_from_ints(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(count_short_vectors(&id2, 1), BigInt::from(5));
        let t = gram_from_ints(&[&[1, 1], &[1, 2]]).unwrap();
        assert_eq!(count_short_vectors(&t, 1), BigInt::from(5));
        assert_eq!(count_short_vectors(&t, 2), BigInt::from(9));
        let hex = IntGram::new(vec![
            vec![rat_int(1), rat(-1, 2)],
            vec![rat(-1, 2), rat_int(1)],
        ])
        .unwrap();
        assert_eq!(count_short_vectors(&hex, 1), BigInt::from(7));
        // counts agree with direct evaluation on a window
        let g = gram_from_ints(&[&[2, 1], &[1, 3]]).unwrap();
        let mut brute = 0u32;
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let v = [BigInt::from(x), BigInt::from(y)];
                if g.evaluate(&v) <= rat_int(3) {
                    brute += 1;
                }
            }
        }
        assert_eq!(count_short_vectors(&g, 3), BigInt::from(brute));
    }

    #[test]
    fn random_grams_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..250 {
            let gram = seeded_definite_gram(&mut rng, 6);
            let i = rng.gen_range(1..=3u32);
            let count = count_short_vectors(&gram, i);
            assert!(
                count <= cap_c(gram.rank() as u32, i),
                "cap violated at rank {}, bound {i}",
                gram.rank()
            );
            assert!(count >= BigInt::one());
        }
    }

    #[test]
    fn counting_chain_examples() {
        let k5 = field(5);
        let delta5 = k5.element(rat(1, 2), rat(1, 10));
        let one_form = vec![vec![k5.one()]];
        assert_eq!(verify_counting_chain(&k5, &one_form, &delta5), Ok(true));
        // sum of three squares: universal over Q(sqrt 5)
        let mut three = vec![vec![k5.zero(); 3]; 3];
        for i in 0..3 {
            three[i][i] = k5.one();
        }
        assert_eq!(verify_counting_chain(&k5, &three, &delta5), Ok(true));
        // the transferred 6x6 block lattice: 4 nonzero short vectors per block
        let t = trace_transfer(&k5, &three, &delta5).unwrap();
        assert_eq!(t.rank(), 6);
        assert_eq!(count_short_vectors(&t, 1), BigInt::from(13));
        // a twist that is codifferent but not a generator is refused
        let non_gen = k5.element(rat(1, 1), rat(0, 1));
        assert_eq!(
            verify_counting_chain(&k5, &one_form, &non_gen).unwrap_err(),
            Error::NotCodifferentGenerator
        );
    }

    #[test]
    fn end_to_end_rank_three_check() {
        // cap for a rank-3 form over a quadratic field vs the certified rhs
        let data = SiegelData::derived_quadratic();
        let cap = cap_c(3 * 2, r_d(2));
        assert_eq!(cap, BigInt::from(167));
        let rhs = main_rhs(&BigInt::from(5), 2, &data).unwrap();
        assert!(BigRational::from_integer(cap) > *rhs.hi());
        assert!(min_rank_bound(&BigInt::from(5), 2, &data).unwrap() <= 3);
    }
}
