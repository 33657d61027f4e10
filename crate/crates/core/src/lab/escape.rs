//! AND wirings of isotropic boxes against the tilted CH facet.
//!
//! With `z± = (1 ± eps)/4`, the `n`-copy AND box of the isotropic box
//! evaluates under `I(q)` to `2^(1-n) - 3 z+^n + (1 + q) z-^n`. A variant
//! with coefficient `q` in place of `1 + q` is kept for comparison only.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{facet_q, in_hull, r_b_polytope, tilted_ch, LinearFunctional, Membership};
use crate::nsbox::{chsh_max, isotropic, NsBox};
use crate::rational::{format_rational, int, rat, serde_str, Rational};
use crate::wiring::and_closed_form;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EscapeCoefficient {
    OnePlusQ,
    Q,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeCondition {
    #[serde(with = "serde_str")]
    pub lhs: Rational,
    pub violated: bool,
}

fn check_range(n: usize, eps: &Rational) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!("AND escape needs n >= 2, got {n}")));
    }
    if eps <= &rat(1, 2) || eps >= &int(1) {
        return Err(Error::Parameter(format!(
            "AND escape needs 1/2 < eps < 1, got {}",
            format_rational(eps)
        )));
    }
    Ok(())
}

/// `2^(1-n) - 3 z+^n + c z-^n` with `c` chosen by `coefficient`.
pub fn escape_lhs(n: usize, eps: &Rational, coefficient: EscapeCoefficient) -> Result<Rational> {
    check_range(n, eps)?;
    let q = facet_q(eps)?;
    let zp = (int(1) + eps) / int(4);
    let zm = (int(1) - eps) / int(4);
    let c = match coefficient {
        EscapeCoefficient::OnePlusQ => int(1) + q,
        EscapeCoefficient::Q => q,
    };
    Ok(int(2) / num_traits::pow(int(2), n) - int(3) * num_traits::pow(zp, n) + c * num_traits::pow(zm, n))
}

/// Sign test of the escape polynomial in the form the facet actually takes.
pub fn and_escape_condition(n: usize, eps: &Rational) -> Result<EscapeCondition> {
    let lhs = escape_lhs(n, eps, EscapeCoefficient::OnePlusQ)?;
    let violated = lhs.is_negative();
    Ok(EscapeCondition { lhs, violated })
}

/// Evidence that the `n`-copy AND box leaves the noisy-PR polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeCertificate {
    pub n: usize,
    #[serde(with = "serde_str")]
    pub eps: Rational,
    #[serde(with = "serde_str")]
    pub q: Rational,
    pub input: NsBox,
    pub output: NsBox,
    pub facet: LinearFunctional,
    /// `I(q)` on the output; negative.
    #[serde(with = "serde_str")]
    pub violation: Rational,
    #[serde(with = "serde_str")]
    pub chsh_input: Rational,
    #[serde(with = "serde_str")]
    pub chsh_output: Rational,
    /// LP separator against the polytope's vertex list.
    pub membership: Membership,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EscapeOutcome {
    Violation(Box<EscapeCertificate>),
    NoViolation {
        #[serde(with = "serde_str")]
        value: Rational,
    },
}

impl EscapeOutcome {
    pub fn certificate(&self) -> Option<&EscapeCertificate> {
        match self {
            EscapeOutcome::Violation(c) => Some(c),
            EscapeOutcome::NoViolation { .. } => None,
        }
    }
}

/// Applies the `n`-copy AND wiring to the isotropic box and tests the result
/// against `I(q)` and the polytope `R_b` at `S = 4 eps`.
pub fn and_escape_box(n: usize, eps: &Rational) -> Result<EscapeOutcome> {
    check_range(n, eps)?;
    let q = facet_q(eps)?;
    let facet = tilted_ch(&q);
    let input = isotropic(eps)?;
    let output = and_closed_form(&input, n)?;
    let value = facet.evaluate(&output);
    if !value.is_negative() {
        return Ok(EscapeOutcome::NoViolation { value });
    }
    let chsh_input = chsh_max(&input);
    let chsh_output = chsh_max(&output);
    assert!(chsh_output <= chsh_input, "AND output exceeds the input CHSH value");
    let poly = r_b_polytope(&(int(4) * eps))?;
    let membership = in_hull(&output, &poly);
    assert!(!membership.is_inside(), "facet violation but LP membership");
    Ok(EscapeOutcome::Violation(Box::new(EscapeCertificate {
        n,
        eps: eps.clone(),
        q,
        input,
        output,
        facet,
        violation: value,
        chsh_input,
        chsh_output,
        membership,
    })))
}

/// Exact bisection for the sign change of the escape polynomial on
/// `(1/2, 1)`. Returns `(lo, hi)` with `lhs(lo) >= 0 > lhs(hi)`, or `(r, r)`
/// when a midpoint hits the root exactly.
pub fn escape_threshold(n: usize, steps: usize) -> Result<(Rational, Rational)> {
    let f = |e: &Rational| escape_lhs(n, e, EscapeCoefficient::OnePlusQ);
    let mut lo = rat(1, 2) + rat(1, 1 << 20);
    let mut hi = int(1) - rat(1, 1 << 20);
    if f(&lo)?.is_negative() || !f(&hi)?.is_negative() {
        return Err(Error::Parameter(format!("no sign change bracketed for n = {n}")));
    }
    for _ in 0..steps {
        let mid = (&lo + &hi) / int(2);
        let v = f(&mid)?;
        if v.is_zero() {
            return Ok((mid.clone(), mid));
        }
        if v.is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Largest `n <= n_max` whose AND box still violates `I(q)`, if any.
pub fn max_escaping_copies(eps: &Rational, n_max: usize) -> Result<Option<usize>> {
    let mut best = None;
    for n in 2..=n_max {
        if and_escape_condition(n, eps)?.violated {
            best = Some(n);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relabel::orbit;

    #[test]
    fn n2_at_four_fifths() {
        let c = and_escape_condition(2, &rat(4, 5)).unwrap();
        assert_eq!(c.lhs, rat(-9, 100));
        assert!(c.violated);
        assert!(!and_escape_condition(2, &rat(3, 5)).unwrap().violated);
    }

    #[test]
    fn facet_value_matches_one_plus_q() {
        for (n, eps) in [(2, rat(4, 5)), (3, rat(9, 10)), (2, rat(3, 5)), (5, rat(19, 20))] {
            let q = facet_q(&eps).unwrap();
            let b = and_closed_form(&isotropic(&eps).unwrap(), n).unwrap();
            let value = tilted_ch(&q).evaluate(&b);
            assert_eq!(value, escape_lhs(n, &eps, EscapeCoefficient::OnePlusQ).unwrap());
            assert_ne!(value, escape_lhs(n, &eps, EscapeCoefficient::Q).unwrap());
        }
    }

    #[test]
    fn root_at_two_thirds() {
        assert_eq!(
            escape_lhs(2, &rat(2, 3), EscapeCoefficient::OnePlusQ).unwrap(),
            Rational::zero()
        );
        // the q variant puts the root elsewhere
        assert!(escape_lhs(2, &rat(2, 3), EscapeCoefficient::Q).unwrap().is_negative());
        let (lo, hi) = escape_threshold(2, 40).unwrap();
        assert!(lo <= rat(2, 3));
        assert!(hi >= rat(2, 3));
        assert!(&hi - &lo < rat(1, 1 << 30));
    }

    #[test]
    fn certificate_contents() {
        let out = and_escape_box(2, &rat(4, 5)).unwrap();
        let c = out.certificate().unwrap();
        assert!(c.violation.is_negative());
        assert!(c.chsh_output <= c.chsh_input);
        match &c.membership {
            Membership::Outside { separator } => assert!(separator.evaluate(&c.output).is_negative()),
            _ => panic!(),
        }
        assert_eq!(orbit(&c.output).len(), 64);
        let none = and_escape_box(2, &rat(3, 5)).unwrap();
        assert!(none.certificate().is_none());
    }

    #[test]
    fn range_errors() {
        assert!(and_escape_condition(1, &rat(4, 5)).is_err());
        assert!(and_escape_condition(2, &int(1)).is_err());
        assert!(and_escape_condition(2, &rat(1, 2)).is_err());
    }
}
