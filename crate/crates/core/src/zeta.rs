//! Dedekind zeta special values for real quadratic fields.
//!
//! Two independent routes to zeta_K(-1) keep each other honest. The Siegel
//! route enumerates totally positive codifferent elements by trace level and
//! sums divisor functions of the associated integral ideals; its single
//! rational weight b_1(4) is not hard-coded but derived from the L-function
//! oracle on sample fields and cross-checked on the rest. The oracle route
//! factors zeta_K = zeta * L(., chi) and evaluates L(-1, chi) through the
//! generalized Bernoulli number B_{2,chi}, all in exact rationals.
//!
//! zeta_K(2) is computed as a certified interval (character sum with an
//! explicit Abel-summation tail bound), which feeds the functional-equation
//! consistency check zeta_K(-1) = disc^{3/2}/(4 pi^4) * zeta_K(2).

use crate::error::{Error, Result};
use crate::ideals::{different_codifferent, FracIdeal};
use crate::intmath::kronecker;
use crate::interval::{sqrt_upper, Interval, PI};
use crate::qfield::{FieldElement, QuadraticField};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Derived,
    External,
}

/// The rational weights of Siegel's formula for one degree.
#[derive(Clone, Debug)]
pub struct SiegelData {
    pub d: u32,
    pub coeffs: Vec<BigRational>,
    pub provenance: Provenance,
}

impl SiegelData {
    /// Quadratic-degree data with the single weight b_1(4) derived from the
    /// Bernoulli oracle on three sample fields.
    pub fn derived_quadratic() -> SiegelData {
        let sample: Vec<QuadraticField> = [5, 2, 3]
            .iter()
            .map(|&d| QuadraticField::new(d).expect("sample fields are valid"))
            .collect();
        let b1 = derive_b1(&sample).expect("sample fields must agree on b_1(4)");
        SiegelData {
            d: 2,
            coeffs: vec![b1],
            provenance: Provenance::Derived,
        }
    }

    /// Externally supplied coefficients for some degree; the expected length
    /// is the trace cutoff r_d of that degree.
    pub fn external(d: u32, coeffs: Vec<BigRational>) -> Result<SiegelData> {
        let expect = crate::bounds::r_d(d) as usize;
        if coeffs.len() != expect {
            return Err(Error::MissingCoefficient(d, coeffs.len() as u32 + 1));
        }
        Ok(SiegelData {
            d,
            coeffs,
            provenance: Provenance::External,
        })
    }
}

/// Parse external coefficient lines "d ell p/q" (blank lines and # comments
/// allowed). Returned triples are (d, ell, value), in file order.
pub fn parse_coeff_lines(text: &str) -> Result<Vec<(u32, u32, BigRational)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::ParseError(format!(
                "line {}: expected 'd ell p/q', got {raw:?}",
                lineno + 1
            )));
        }
        let d: u32 = parts[0]
            .parse()
            .map_err(|_| Error::ParseError(format!("line {}: bad degree", lineno + 1)))?;
        let ell: u32 = parts[1]
            .parse()
            .map_err(|_| Error::ParseError(format!("line {}: bad trace level", lineno + 1)))?;
        let value = parts[2]
            .parse::<BigRational>()
            .map_err(|_| Error::ParseError(format!("line {}: bad rational", lineno + 1)))?;
        out.push((d, ell, value));
    }
    Ok(out)
}

/// Assemble the coefficient vector for one degree from parsed rows. Every
/// trace level 1..=r_d(d) must appear exactly once among the rows for d.
pub fn data_for_degree(d: u32, rows: &[(u32, u32, BigRational)]) -> Result<SiegelData> {
    let want = crate::bounds::r_d(d);
    let mut coeffs: Vec<Option<BigRational>> = vec![None; want as usize];
    for (rd, ell, value) in rows {
        if *rd != d {
            continue;
        }
        if *ell < 1 || *ell > want {
            return Err(Error::InconsistentSample(format!(
                "degree {d} has trace levels 1..={want}, got {ell}"
            )));
        }
        let slot = &mut coeffs[(*ell - 1) as usize];
        if slot.is_some() {
            return Err(Error::InconsistentSample(format!(
                "duplicate coefficient for degree {d} level {ell}"
            )));
        }
        *slot = Some(value.clone());
    }
    let filled: Vec<BigRational> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.clone()
                .ok_or(Error::MissingCoefficient(d, i as u32 + 1))
        })
        .collect::<Result<_>>()?;
    SiegelData::external(d, filled)
}

/// Trace-dual basis (w1, w2) of the integral basis (1, omega): solves the
/// Gram system of the trace form exactly, so Tr(wi * basis_j) = delta_ij.
pub fn dual_basis(field: &QuadraticField) -> (FieldElement, FieldElement) {
    let om = field.omega();
    let t = om.trace();
    let n = om.norm();
    let disc = BigRational::from_integer(BigInt::from(field.discriminant()));
    // inverse Gram [[2, t], [t, t^2 - 2n]] of the trace form has determinant disc
    let tt2n = &t * &t - BigRational::from_integer(BigInt::from(2)) * &n;
    let w1 = (&field.element(tt2n, BigRational::zero()) - &om.scale(&t)).scale(&disc.recip());
    let w2 = field
        .sqrt_disc()
        .inverse()
        .expect("sqrt(disc) is nonzero");
    debug_assert_eq!(w1.trace(), BigRational::one());
    debug_assert_eq!((&w1 * &om).trace(), BigRational::zero());
    debug_assert_eq!(w2.trace(), BigRational::zero());
    debug_assert_eq!((&w2 * &om).trace(), BigRational::one());
    (w1, w2)
}

/// The complete finite set of totally positive codifferent elements with
/// trace ell: gamma = ell*w1 + c*w2 over the integers c in an explicitly
/// bounded window.
pub fn trace_level_codifferent(field: &QuadraticField, ell: u64) -> Vec<FieldElement> {
    assert!(ell >= 1, "totally positive elements have positive trace");
    let (w1, w2) = dual_basis(field);
    let base = w1.scale(&BigRational::from_integer(BigInt::from(ell)));
    // c confined by total positivity: both embeddings of base are positive
    // and w2 embeds as +-1/sqrt(disc)
    let (b1, b2) = base.embed_intervals();
    let sdisc = sqrt_upper(&BigRational::from_integer(BigInt::from(field.discriminant())));
    let lo = -(b1.hi() * &sdisc);
    let hi = b2.hi() * &sdisc;
    let mut out = Vec::new();
    let mut c: BigInt = lo.floor().to_integer() - 1;
    let c_end: BigInt = hi.ceil().to_integer() + 1;
    while c <= c_end {
        let gamma = &base + &w2.scale(&BigRational::from_integer(c.clone()));
        if gamma.is_totally_positive() {
            debug_assert_eq!(gamma.trace(), BigRational::from_integer(BigInt::from(ell)));
            out.push(gamma);
        }
        c += 1;
    }
    out
}

/// s_ell: the divisor-function sum over trace-ell totally positive
/// codifferent elements; each (gamma)*different is checked integral.
pub fn s_ell(field: &QuadraticField, ell: u64) -> BigInt {
    let (diff, _) = different_codifferent(field);
    let mut acc = BigInt::zero();
    for gamma in trace_level_codifferent(field, ell) {
        let ideal = FracIdeal::principal(&gamma)
            .expect("gamma is nonzero")
            .mul(&diff)
            .expect("same field");
        assert!(ideal.is_integral(), "codifferent element times different");
        acc += ideal.sigma().expect("integral ideal has a divisor sum");
    }
    acc
}

/// Siegel's formula at degree 2: zeta_K(-1) = 4 * b_1(4) * s_1.
pub fn zeta_minus1_siegel(field: &QuadraticField, data: &SiegelData) -> Result<BigRational> {
    if data.d != 2 {
        return Err(Error::DegreeUnsupported(data.d));
    }
    let s1 = BigRational::from_integer(s_ell(field, 1));
    Ok(BigRational::from_integer(BigInt::from(4)) * &data.coeffs[0] * s1)
}

/// Independent oracle: zeta_K(-1) = zeta(-1) * L(-1, chi) with L(-1, chi)
/// evaluated through the generalized Bernoulli number B_{2,chi}; everything
/// is an exact rational.
pub fn zeta_minus1_oracle(field: &QuadraticField) -> BigRational {
    let disc = field.discriminant();
    let discq = BigRational::from_integer(BigInt::from(disc));
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    let mut b2chi = BigRational::zero();
    for a in 1..=disc {
        let chi = kronecker(disc, a);
        if chi == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(disc));
        let b2 = &x * &x - &x + &sixth;
        let term = &discq * b2;
        if chi > 0 {
            b2chi += term;
        } else {
            b2chi -= term;
        }
    }
    // zeta(-1) = -1/12 and L(-1, chi) = -B_{2,chi}/2
    b2chi / BigRational::from_integer(BigInt::from(24))
}

/// Solve for b_1(4) from each sample field and insist on agreement.
pub fn derive_b1(sample: &[QuadraticField]) -> Result<BigRational> {
    if sample.is_empty() {
        return Err(Error::InconsistentSample("empty sample".into()));
    }
    let mut common: Option<BigRational> = None;
    for k in sample {
        let s1 = s_ell(k, 1);
        let b = zeta_minus1_oracle(k)
            / (BigRational::from_integer(BigInt::from(4)) * BigRational::from_integer(s1));
        match &common {
            None => common = Some(b),
            Some(c) if *c == b => {}
            Some(c) => {
                return Err(Error::InconsistentSample(format!(
                    "d = {} yields {} but earlier fields gave {}",
                    k.d(),
                    b,
                    c
                )));
            }
        }
    }
    Ok(common.expect("sample checked nonempty"))
}

const L_SCALE_BITS: u32 = 72;

/// Certified enclosure of zeta_K(2) = zeta(2) * L(2, chi): the character sum
/// is accumulated in fixed point with directed rounding and closed with an
/// Abel-summation tail bound 2*disc/(N+1)^2.
pub fn zeta2_numeric(field: &QuadraticField, abs_err: &BigRational) -> Interval {
    assert!(abs_err.is_positive());
    let disc = field.discriminant();
    // tail 2*disc/(N+1)^2 <= abs_err/4
    let n_terms = {
        let target = BigRational::from_integer(BigInt::from(8 * disc)) / abs_err;
        let r = sqrt_upper(&target).ceil().to_integer();
        r.to_u64().expect("term count fits in a machine word").max(8)
    };
    let chi_table: Vec<i32> = (0..disc as u64).map(|r| kronecker(disc, r as i64)).collect();
    let scale: i128 = 1i128 << L_SCALE_BITS;
    let mut lo: i128 = 0;
    let mut hi: i128 = 0;
    for n in 1..=n_terms {
        let chi = chi_table[(n % disc as u64) as usize];
        if chi == 0 {
            continue;
        }
        let nn = (n as i128) * (n as i128);
        let q = scale / nn; // floor
        let r = scale % nn;
        let (term_lo, term_hi) = if chi > 0 {
            (q, if r == 0 { q } else { q + 1 })
        } else {
            (if r == 0 { -q } else { -q - 1 }, -q)
        };
        lo += term_lo;
        hi += term_hi;
    }
    let tail = BigRational::new(
        BigInt::from(2 * disc),
        BigInt::from(n_terms + 1) * BigInt::from(n_terms + 1),
    );
    let denom = BigInt::one() << L_SCALE_BITS;
    let l_interval = Interval::new(
        BigRational::new(BigInt::from(lo), denom.clone()) - &tail,
        BigRational::new(BigInt::from(hi), denom) + &tail,
    );
    // zeta(2) = pi^2/6
    let zeta2 = PI
        .mul(&PI)
        .scale(&BigRational::new(BigInt::one(), BigInt::from(6)));
    let out = zeta2.mul(&l_interval).compressed();
    debug_assert!(out.lo() > &BigRational::one(), "zeta_K(2) > 1");
    out
}

/// Certified interval for disc^{3/2}/(4 pi^4) * zeta2, the value the
/// functional equation equates with zeta_K(-1).
pub fn fe_rhs_interval(field: &QuadraticField, zeta2: &Interval) -> Interval {
    let disc = BigRational::from_integer(BigInt::from(field.discriminant()));
    let disc32 = Interval::point(disc.clone()).sqrt().scale(&disc);
    let pi4 = PI.mul(&PI).mul(&PI).mul(&PI);
    let four_pi4 = pi4.scale(&BigRational::from_integer(BigInt::from(4)));
    disc32.mul(zeta2).div(&four_pi4).compressed()
}

/// Functional-equation consistency: compare the exact Siegel value against
/// the interval transported from zeta_K(2). The residual is the worst-case
/// endpoint distance, so interval slack counts against the check.
pub fn functional_eq_check(field: &QuadraticField, tol: &BigRational) -> (BigRational, bool) {
    assert!(tol.is_positive());
    let data = SiegelData::derived_quadratic();
    let exact = zeta_minus1_siegel(field, &data).expect("degree 2 data");
    let floor_err = BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)));
    let abs_err = (tol / BigRational::from_integer(BigInt::from(1000))).max(floor_err);
    let zeta2 = zeta2_numeric(field, &abs_err);
    let rhs = fe_rhs_interval(field, &zeta2);
    let diff_lo = rhs.lo() - &exact;
    let diff_hi = rhs.hi() - &exact;
    let residual = diff_lo.abs().max(diff_hi.abs());
    let pass = residual <= *tol;
    (residual, pass)
}

/// Everything the zeta CLI verb reports for one field.
#[derive(Clone, Debug)]
pub struct ZetaReport {
    pub d: i64,
    pub disc: i64,
    pub s_values: Vec<(u64, BigInt)>,
    pub zeta_minus1: BigRational,
    pub oracle_minus1: BigRational,
    pub zeta2: Interval,
    pub fe_residual: BigRational,
    pub fe_pass: bool,
}

pub fn zeta_report(field: &QuadraticField, tol: &BigRational) -> ZetaReport {
    let data = SiegelData::derived_quadratic();
    let zeta_minus1 = zeta_minus1_siegel(field, &data).expect("degree 2 data");
    let oracle_minus1 = zeta_minus1_oracle(field);
    let floor_err = BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)));
    let abs_err = (tol / BigRational::from_integer(BigInt::from(1000))).max(floor_err);
    let zeta2 = zeta2_numeric(field, &abs_err);
    let (fe_residual, fe_pass) = functional_eq_check(field, tol);
    ZetaReport {
        d: field.d(),
        disc: field.discriminant(),
        s_values: (1..=3).map(|l| (l, s_ell(field, l))).collect(),
        zeta_minus1,
        oracle_minus1,
        zeta2,
        fe_residual,
        fe_pass,
    }
}
