//! Cross-checking suites behind the `verify` verb.
//!
//! Each suite computes one quantity two independent ways, or checks a proved
//! inequality against exhaustive data, over a discriminant range set by the
//! scope. Work fans out per discriminant on the rayon pool; results keep scan
//! order, so a failing suite always reports its smallest counterexample.

use crate::bounds::{cap_c, count_short_vectors, g_bound, lifting_disc_bound, seeded_definite_gram};
use crate::error::Result;
use crate::ideals::{different_codifferent, FracIdeal};
use crate::indec::{
    i_indecomposables, indecomposables_pm, indecomposables_ring, same_class, IndecClass,
};
use crate::qfield::QuadraticField;
use crate::zeta::{
    data_for_degree, functional_eq_check, trace_level_codifferent, zeta_minus1_oracle,
    zeta_minus1_siegel, SiegelData,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scope {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub outcomes: Vec<SuiteOutcome>,
}

impl VerifyReport {
    /// Skipped suites do not count against the run.
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }
}

fn outcome(name: &'static str, failures: Vec<String>, checked: String) -> SuiteOutcome {
    if failures.is_empty() {
        SuiteOutcome {
            name,
            status: Status::Pass,
            detail: checked,
            counterexample: None,
        }
    } else {
        SuiteOutcome {
            name,
            status: Status::Fail,
            detail: format!("{} failure(s) over {checked}", failures.len()),
            counterexample: failures.into_iter().next(),
        }
    }
}

fn squarefree_range(max: i64) -> Vec<i64> {
    (2..=max).filter(|&d| QuadraticField::new(d).is_ok()).collect()
}

/// The trace-sum value 4 b_1 s_1 against the Bernoulli character sum, which
/// must agree exactly as rationals on every field in range.
fn siegel_vs_oracle(scope: Scope, data: &SiegelData) -> SuiteOutcome {
    let max = match scope {
        Scope::Quick => 100,
        Scope::Full => 500,
    };
    let ds = squarefree_range(max);
    let failures: Vec<String> = ds
        .par_iter()
        .filter_map(|&d| {
            let k = QuadraticField::new(d).expect("range is squarefree");
            let siegel = match zeta_minus1_siegel(&k, data) {
                Ok(v) => v,
                Err(e) => return Some(format!("D = {d}: {e}")),
            };
            let oracle = zeta_minus1_oracle(&k);
            (siegel != oracle)
                .then(|| format!("D = {d}: trace sum {siegel} vs character sum {oracle}"))
        })
        .collect();
    outcome(
        "siegel_vs_oracle",
        failures,
        format!("{} squarefree D <= {max}", ds.len()),
    )
}

/// Orbit-set equality under totally positive units: same length and a
/// perfect matching by `same_class`.
fn orbit_sets_match(a: &[IndecClass], b: &[IndecClass]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|ca| {
        b.iter().enumerate().any(|(j, cb)| {
            if !used[j] && same_class(&ca.representative, &cb.representative) {
                used[j] = true;
                true
            } else {
                false
            }
        })
    })
}

/// Semiconvergent classification against exhaustive search, for the ring and
/// for the ideal (sqrt D). Multiplication by sqrt D swaps the sign-mixed
/// elements (alpha > 0 > alpha') with the totally positive part of (sqrt D),
/// so the even-index semiconvergents must enumerate the latter's classes.
fn indec_cf_vs_brute(scope: Scope) -> SuiteOutcome {
    let max = match scope {
        Scope::Quick => 30,
        Scope::Full => 60,
    };
    let ds = squarefree_range(max);
    let failures: Vec<String> = ds
        .par_iter()
        .filter_map(|&d| {
            let k = QuadraticField::new(d).expect("range is squarefree");
            let ring_cf = indecomposables_ring(&k);
            let ring_brute = i_indecomposables(&FracIdeal::unit_ideal(k));
            if !orbit_sets_match(&ring_cf, &ring_brute) {
                return Some(format!(
                    "D = {d}: ring classes {} by semiconvergents vs {} by search",
                    ring_cf.len(),
                    ring_brute.len()
                ));
            }
            let sd = k.sqrt_d();
            let pm_scaled: Vec<IndecClass> = indecomposables_pm(&k)
                .into_iter()
                .map(|mut c| {
                    c.representative = &c.representative * &sd;
                    c
                })
                .collect();
            let pm_brute =
                i_indecomposables(&FracIdeal::principal(&sd).expect("sqrt D is nonzero"));
            if !orbit_sets_match(&pm_scaled, &pm_brute) {
                return Some(format!(
                    "D = {d}: (sqrt D) classes {} by semiconvergents vs {} by search",
                    pm_scaled.len(),
                    pm_brute.len()
                ));
            }
            None
        })
        .collect();
    outcome(
        "indec_cf_vs_brute",
        failures,
        format!("ring and sign-mixed systems, D <= {max}"),
    )
}

/// Residual between the exact special value and its enclosure through the
/// value at 2, per field, against a fixed tolerance.
fn functional_equation(scope: Scope) -> SuiteOutcome {
    let max_disc = match scope {
        Scope::Quick => 60,
        Scope::Full => 200,
    };
    let tol = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let ds: Vec<i64> = squarefree_range(max_disc)
        .into_iter()
        .filter(|&d| {
            let k = QuadraticField::new(d).expect("range is squarefree");
            k.discriminant() <= max_disc
        })
        .collect();
    let failures: Vec<String> = ds
        .par_iter()
        .filter_map(|&d| {
            let k = QuadraticField::new(d).expect("range is squarefree");
            let (residual, pass) = functional_eq_check(&k, &tol);
            (!pass).then(|| {
                format!(
                    "disc = {}: residual {:.3e}",
                    k.discriminant(),
                    residual.to_f64().unwrap_or(f64::NAN)
                )
            })
        })
        .collect();
    outcome(
        "functional_equation",
        failures,
        format!("{} fields with disc <= {max_disc}, tolerance 1e-6", ds.len()),
    )
}

/// Short-vector counts of random definite forms against the combinatorial
/// cap for their rank and budget.
fn short_vector_caps(scope: Scope) -> SuiteOutcome {
    let trials = match scope {
        Scope::Quick => 200,
        Scope::Full => 1000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();
    for t in 0..trials {
        let gram = seeded_definite_gram(&mut rng, 6);
        let budget = (t % 3) as u32 + 1;
        let count = count_short_vectors(&gram, budget);
        let cap = cap_c(gram.rank() as u32, budget);
        if count > cap || count < BigInt::from(1) {
            failures.push(format!(
                "trial {t}: rank {} budget {budget} count {count} cap {cap}",
                gram.rank()
            ));
            break;
        }
    }
    outcome(
        "short_vector_caps",
        failures,
        format!("{trials} seeded forms, rank <= 6, budget <= 3"),
    )
}

/// Every codifferent element of trace ell, times the different, has divisor
/// sum within the growth bound at that trace level. Only levels up to the
/// trace cutoff r_d participate: that is the range the rank bound consumes,
/// and the inequality genuinely fails above it (split primes inflate an
/// ideal's divisor sum past the divisor sum of its norm; D = 10 at level 3
/// reaches 288 against a bound near 279.9).
fn lemma_domination(scope: Scope) -> SuiteOutcome {
    let max = match scope {
        Scope::Quick => 40,
        Scope::Full => 200,
    };
    let cutoff = crate::bounds::r_d(2) as u64;
    let ds = squarefree_range(max);
    let failures: Vec<String> = ds
        .par_iter()
        .filter_map(|&d| {
            let k = QuadraticField::new(d).expect("range is squarefree");
            let disc = BigInt::from(k.discriminant());
            let (diff, _) = different_codifferent(&k);
            for ell in 1..=cutoff {
                let g = g_bound(ell, 2, &disc);
                for gamma in trace_level_codifferent(&k, ell) {
                    let ideal = FracIdeal::principal(&gamma)
                        .expect("trace-level elements are nonzero")
                        .mul(&diff)
                        .expect("same field");
                    let sigma = ideal.sigma().expect("integral ideal");
                    if BigRational::from_integer(sigma.clone()) > *g.lo() {
                        return Some(format!(
                            "D = {d}, ell = {ell}: sigma {sigma} vs bound >= {:.4}",
                            g.to_f64().0
                        ));
                    }
                }
            }
            None
        })
        .collect();
    outcome(
        "lemma_domination",
        failures,
        format!(
            "{} squarefree D <= {max}, trace levels 1..={cutoff}",
            ds.len()
        ),
    )
}

/// Lifting thresholds for any degrees above 2 present in the external rows.
fn higher_degree(extra: &[(u32, u32, BigRational)]) -> SuiteOutcome {
    let mut degrees: Vec<u32> = extra.iter().map(|(d, _, _)| *d).filter(|&d| d > 2).collect();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.is_empty() {
        return SuiteOutcome {
            name: "higher_degree",
            status: Status::Skipped,
            detail: "no external coefficients for degree > 2".into(),
            counterexample: None,
        };
    }
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for &d in &degrees {
        let step: Result<_> = data_for_degree(d, extra).and_then(|data| {
            let bound = lifting_disc_bound(d, &data)?;
            Ok(bound)
        });
        match step {
            Ok(bound) => details.push(format!("d = {d}: lifting bound <= {:.4}", bound.to_f64().1)),
            Err(e) => failures.push(format!("d = {d}: {e}")),
        }
    }
    outcome("higher_degree", failures, details.join("; "))
}

/// Run every suite at the given scope. `data` carries the degree-2
/// coefficient (derived or externally overridden); `extra` carries raw
/// external rows, of which only degrees above 2 matter here.
pub fn run_verify(
    scope: Scope,
    data: &SiegelData,
    extra: &[(u32, u32, BigRational)],
) -> VerifyReport {
    let outcomes = vec![
        siegel_vs_oracle(scope, data),
        indec_cf_vs_brute(scope),
        functional_equation(scope),
        short_vector_caps(scope),
        lemma_domination(scope),
        higher_degree(extra),
    ];
    VerifyReport { scope, outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_scope_is_green() {
        let data = SiegelData::derived_quadratic();
        let report = run_verify(Scope::Quick, &data, &[]);
        for o in &report.outcomes {
            assert_ne!(o.status, Status::Fail, "{}: {:?}", o.name, o.counterexample);
        }
        assert!(report.all_pass());
        assert_eq!(report.outcomes.len(), 6);
        assert_eq!(report.outcomes[5].status, Status::Skipped);
    }

    #[test]
    fn injected_wrong_coefficient_fails_first_at_two() {
        let bad = SiegelData::external(
            2,
            vec![BigRational::new(BigInt::from(1), BigInt::from(120))],
        )
        .expect("degree 2 takes one coefficient");
        // Scope only widens the range; the first mismatch is at the smallest D.
        let siegel = siegel_vs_oracle(Scope::Quick, &bad);
        assert_eq!(siegel.status, Status::Fail);
        let ce = siegel.counterexample.as_deref().expect("counterexample");
        assert!(ce.starts_with("D = 2:"), "{ce}");
    }

    #[test]
    fn higher_degree_rows_reported() {
        let rows = vec![(
            3u32,
            1u32,
            BigRational::new(BigInt::from(-1), BigInt::from(504)),
        )];
        let out = higher_degree(&rows);
        assert_eq!(out.status, Status::Pass);
        assert!(out.detail.contains("d = 3"), "{}", out.detail);

        let incomplete = vec![(
            12u32,
            1u32,
            BigRational::new(BigInt::from(1), BigInt::from(65520)),
        )];
        let out = higher_degree(&incomplete);
        assert_eq!(out.status, Status::Fail);
    }

    #[test]
    fn orbit_matching_is_a_bijection_test() {
        let k = QuadraticField::new(5).unwrap();
        let ring = indecomposables_ring(&k);
        assert!(orbit_sets_match(&ring, &ring));
        assert!(!orbit_sets_match(&ring, &[]));
    }
}
