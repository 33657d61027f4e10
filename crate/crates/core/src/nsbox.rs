//! Two-input/two-output boxes `P(ab|xy)` with exact rational entries.
//!
//! Table layout: the 16 entries are stored (and serialized) in `(x, y, a, b)`
//! row-major order, i.e. entry `((x*2 + y)*2 + a)*2 + b`.
//!
//! Marginals use the ±1 convention: `mA_x = P(a=0|x) - P(a=1|x)` and
//! likewise for Bob, so every box is recovered from its correlators by
//! `P(ab|xy) = (1 + (-1)^a mA_x + (-1)^b mB_y + (-1)^(a^b) E_xy) / 4`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, rat, Rational};

pub type Table = [Rational; 16];

#[inline]
pub const fn idx(a: usize, b: usize, x: usize, y: usize) -> usize {
    ((x * 2 + y) * 2 + a) * 2 + b
}

/// Inverse of [`idx`]: returns `(a, b, x, y)`.
#[inline]
pub const fn unidx(i: usize) -> (usize, usize, usize, usize) {
    ((i >> 1) & 1, i & 1, (i >> 3) & 1, (i >> 2) & 1)
}

fn check_bit(name: &str, v: u8) {
    assert!(v < 2, "{name} must be a bit, got {v}");
}

fn zero_table() -> Table {
    std::array::from_fn(|_| Rational::zero())
}

/// A valid non-signalling box.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NsBox {
    p: Table,
}

/// Per-invariant outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub normalization: bool,
    pub non_negativity: bool,
    pub non_signaling: bool,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.normalization && self.non_negativity && self.non_signaling
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "valid");
        }
        write!(f, "{}", self.problems.join("; "))
    }
}

/// Checks normalization, non-negativity and non-signalling of an arbitrary
/// table, exactly.
pub fn validate(p: &Table) -> ValidationReport {
    let mut problems = Vec::new();
    let mut normalization = true;
    for x in 0..2 {
        for y in 0..2 {
            let s: Rational = (0..4).map(|ab| &p[idx(ab >> 1, ab & 1, x, y)]).sum();
            if !s.is_one() {
                normalization = false;
                problems.push(format!("sum over ab at (x,y)=({x},{y}) is {}", format_rational(&s)));
            }
        }
    }
    let mut non_negativity = true;
    for (i, v) in p.iter().enumerate() {
        if v.is_negative() {
            non_negativity = false;
            let (a, b, x, y) = unidx(i);
            problems.push(format!("p({a}{b}|{x}{y}) = {} < 0", format_rational(v)));
        }
    }
    let mut non_signaling = true;
    for a in 0..2 {
        for x in 0..2 {
            let m0 = &p[idx(a, 0, x, 0)] + &p[idx(a, 1, x, 0)];
            let m1 = &p[idx(a, 0, x, 1)] + &p[idx(a, 1, x, 1)];
            if m0 != m1 {
                non_signaling = false;
                problems.push(format!("Alice marginal p(a={a}|x={x}) depends on y"));
            }
        }
    }
    for b in 0..2 {
        for y in 0..2 {
            let m0 = &p[idx(0, b, 0, y)] + &p[idx(1, b, 0, y)];
            let m1 = &p[idx(0, b, 1, y)] + &p[idx(1, b, 1, y)];
            if m0 != m1 {
                non_signaling = false;
                problems.push(format!("Bob marginal p(b={b}|y={y}) depends on x"));
            }
        }
    }
    ValidationReport {
        normalization,
        non_negativity,
        non_signaling,
        problems,
    }
}

impl NsBox {
    pub fn new(p: Table) -> Result<Self> {
        let report = validate(&p);
        if report.passed() {
            Ok(Self { p })
        } else {
            Err(Error::InvalidBox(report))
        }
    }

    /// Skips validation; callers guarantee the invariants hold.
    pub(crate) fn from_table_unchecked(p: Table) -> Self {
        debug_assert!(validate(&p).passed(), "{}", validate(&p));
        Self { p }
    }

    pub fn table(&self) -> &Table {
        &self.p
    }

    pub fn into_table(self) -> Table {
        self.p
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> &Rational {
        &self.p[idx(a, b, x, y)]
    }

    pub fn to_f64(&self) -> [f64; 16] {
        std::array::from_fn(|i| crate::rational::to_f64(&self.p[i]))
    }

    pub fn correlators(&self) -> Correlators {
        correlators(self)
    }
}

impl fmt::Debug for NsBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.p.iter().map(format_rational).collect();
        write!(f, "NsBox[{}]", entries.join(", "))
    }
}

impl fmt::Display for NsBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  xy |   ab=00      ab=01      ab=10      ab=11")?;
        for x in 0..2 {
            for y in 0..2 {
                write!(f, "  {x}{y} |")?;
                for a in 0..2 {
                    for b in 0..2 {
                        write!(f, " {:>10}", format_rational(self.p(a, b, x, y)))?;
                    }
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BoxRepr {
    p: Vec<String>,
}

impl Serialize for NsBox {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoxRepr {
            p: self.p.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NsBox {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = BoxRepr::deserialize(d)?;
        table_from_strings(&repr.p)
            .and_then(NsBox::new)
            .map_err(D::Error::custom)
    }
}

pub fn table_from_strings<S: AsRef<str>>(entries: &[S]) -> Result<Table> {
    if entries.len() != 16 {
        return Err(Error::Parse(format!(
            "a box table has 16 entries, got {}",
            entries.len()
        )));
    }
    let mut p = zero_table();
    for (slot, s) in p.iter_mut().zip(entries) {
        *slot = parse_rational(s.as_ref())?;
    }
    Ok(p)
}

/// CSV header matching [`NsBox::to_csv_row`].
pub fn csv_header() -> String {
    (0..16)
        .map(|i| {
            let (a, b, x, y) = unidx(i);
            format!("p{a}{b}|{x}{y}")
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl NsBox {
    pub fn to_csv_row(&self) -> String {
        self.p
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.trim().split(',').collect();
        NsBox::new(table_from_strings(&fields)?)
    }
}

// ---------------------------------------------------------------------------
// Canonical families

/// Deterministic box `a = mu*x ^ nu`, `b = sigma*y ^ tau`.
pub fn local_deterministic(mu: u8, nu: u8, sigma: u8, tau: u8) -> NsBox {
    for (n, v) in [("mu", mu), ("nu", nu), ("sigma", sigma), ("tau", tau)] {
        check_bit(n, v);
    }
    let mut p = zero_table();
    for x in 0..2u8 {
        for y in 0..2u8 {
            let a = (mu & x) ^ nu;
            let b = (sigma & y) ^ tau;
            p[idx(a as usize, b as usize, x as usize, y as usize)] = Rational::one();
        }
    }
    NsBox::from_table_unchecked(p)
}

/// Extremal non-local box: uniform on `a ^ b = xy ^ mu*x ^ nu*y ^ sigma`.
pub fn extremal_nl(mu: u8, nu: u8, sigma: u8) -> NsBox {
    for (n, v) in [("mu", mu), ("nu", nu), ("sigma", sigma)] {
        check_bit(n, v);
    }
    let mut p = zero_table();
    for i in 0..16 {
        let (a, b, x, y) = unidx(i);
        let (a, b, x, y) = (a as u8, b as u8, x as u8, y as u8);
        if a ^ b == (x & y) ^ (mu & x) ^ (nu & y) ^ sigma {
            p[i] = rat(1, 2);
        }
    }
    NsBox::from_table_unchecked(p)
}

pub fn pr_box() -> NsBox {
    extremal_nl(0, 0, 0)
}

pub fn maximally_mixed() -> NsBox {
    NsBox::from_table_unchecked(std::array::from_fn(|_| rat(1, 4)))
}

/// The 8 extremal non-local boxes (index `4mu + 2nu + sigma`) followed by
/// the 16 deterministic boxes (index `8mu + 4nu + 2sigma + tau`).
pub fn ns_vertices() -> Vec<(String, NsBox)> {
    let mut out = Vec::with_capacity(24);
    for m in 0..8u8 {
        let (mu, nu, sigma) = (m >> 2 & 1, m >> 1 & 1, m & 1);
        out.push((format!("NL{mu}{nu}{sigma}"), extremal_nl(mu, nu, sigma)));
    }
    out.extend(local_vertices());
    out
}

pub fn local_vertices() -> Vec<(String, NsBox)> {
    (0..16u8)
        .map(|m| {
            let (mu, nu, sigma, tau) = (m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1);
            (
                format!("L{mu}{nu}{sigma}{tau}"),
                local_deterministic(mu, nu, sigma, tau),
            )
        })
        .collect()
}

/// Convex combination. Weights must be non-negative and sum to exactly 1.
pub fn mix(terms: &[(Rational, &NsBox)]) -> Result<NsBox> {
    if terms.is_empty() {
        return Err(Error::InvalidMixture("empty mixture".into()));
    }
    let mut total = Rational::zero();
    for (w, _) in terms {
        if w.is_negative() {
            return Err(Error::InvalidMixture(format!(
                "negative weight {}",
                format_rational(w)
            )));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(Error::InvalidMixture(format!(
            "weights sum to {}",
            format_rational(&total)
        )));
    }
    let mut p = zero_table();
    for (w, b) in terms {
        if w.is_zero() {
            continue;
        }
        for (slot, v) in p.iter_mut().zip(b.table()) {
            *slot += w * v;
        }
    }
    Ok(NsBox::from_table_unchecked(p))
}

fn check_unit(name: &str, v: &Rational) -> Result<()> {
    if v.is_negative() || v > &Rational::one() {
        return Err(Error::InvalidMixture(format!(
            "{name} = {} is outside [0, 1]",
            format_rational(v)
        )));
    }
    Ok(())
}

/// `eps PR + (1 - eps) P_L^{0101}`.
pub fn correlated_nl(eps: &Rational) -> Result<NsBox> {
    check_unit("eps", eps)?;
    mix(&[
        (eps.clone(), &pr_box()),
        (Rational::one() - eps, &local_deterministic(0, 1, 0, 1)),
    ])
}

/// `eps PR + (1 - eps) 1`, the PR box with white noise.
pub fn isotropic(eps: &Rational) -> Result<NsBox> {
    check_unit("eps", eps)?;
    isotropic_nl(0, 0, 0, eps)
}

/// White-noise version of any extremal box.
pub fn isotropic_nl(mu: u8, nu: u8, sigma: u8, eps: &Rational) -> Result<NsBox> {
    check_unit("eps", eps)?;
    mix(&[
        (eps.clone(), &extremal_nl(mu, nu, sigma)),
        (Rational::one() - eps, &maximally_mixed()),
    ])
}

/// `eps PR + gamma P_L^{0101} + (1 - eps - gamma) 1`.
pub fn section_box(eps: &Rational, gamma: &Rational) -> Result<NsBox> {
    check_unit("eps", eps)?;
    check_unit("gamma", gamma)?;
    let rest = Rational::one() - eps - gamma;
    if rest.is_negative() {
        return Err(Error::InvalidMixture(format!(
            "eps + gamma = {} exceeds 1",
            format_rational(&(eps + gamma))
        )));
    }
    mix(&[
        (eps.clone(), &pr_box()),
        (gamma.clone(), &local_deterministic(0, 1, 0, 1)),
        (rest, &maximally_mixed()),
    ])
}

/// The deterministic partner of `P_NL^{mu nu sigma}` on a one-dimensional
/// edge: `P_L^{alpha beta gamma delta}` with
/// `delta = (alpha^mu)(gamma^nu) ^ beta ^ sigma`.
pub fn edge_local_partner(mu: u8, nu: u8, sigma: u8, alpha: u8, beta: u8, gamma: u8) -> [u8; 4] {
    let delta = ((alpha ^ mu) & (gamma ^ nu)) ^ beta ^ sigma;
    [alpha, beta, gamma, delta]
}

/// `eps P_NL^{mu nu sigma} + (1 - eps) P_L^{alpha beta gamma delta}`.
#[allow(clippy::too_many_arguments)]
pub fn edge_box(
    mu: u8,
    nu: u8,
    sigma: u8,
    alpha: u8,
    beta: u8,
    gamma: u8,
    eps: &Rational,
) -> Result<NsBox> {
    check_unit("eps", eps)?;
    let [a, b, c, d] = edge_local_partner(mu, nu, sigma, alpha, beta, gamma);
    mix(&[
        (eps.clone(), &extremal_nl(mu, nu, sigma)),
        (Rational::one() - eps, &local_deterministic(a, b, c, d)),
    ])
}

/// All 64 edge boxes at a fixed `eps`, labelled `E{mu nu sigma},{alpha beta gamma}`.
pub fn edge_boxes(eps: &Rational) -> Result<Vec<(String, NsBox)>> {
    let mut out = Vec::with_capacity(64);
    for m in 0..64u8 {
        let bits: Vec<u8> = (0..6).rev().map(|k| m >> k & 1).collect();
        let b = edge_box(bits[0], bits[1], bits[2], bits[3], bits[4], bits[5], eps)?;
        out.push((
            format!("E{}{}{},{}{}{}", bits[0], bits[1], bits[2], bits[3], bits[4], bits[5]),
            b,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Correlators

/// Correlators `E_xy` (index `2x + y`) and ±1 marginals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Correlators {
    #[serde(with = "crate::rational::serde_str::vec")]
    pub e: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str::vec")]
    pub ma: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str::vec")]
    pub mb: Vec<Rational>,
}

impl Correlators {
    pub fn new(e: [Rational; 4], ma: [Rational; 2], mb: [Rational; 2]) -> Self {
        Self {
            e: e.to_vec(),
            ma: ma.to_vec(),
            mb: mb.to_vec(),
        }
    }

    pub fn e(&self, x: usize, y: usize) -> &Rational {
        &self.e[2 * x + y]
    }

    /// `(E00, E01, E10, E11, mA0, mA1, mB0, mB1)`.
    pub fn coords(&self) -> [Rational; 8] {
        [
            self.e[0].clone(),
            self.e[1].clone(),
            self.e[2].clone(),
            self.e[3].clone(),
            self.ma[0].clone(),
            self.ma[1].clone(),
            self.mb[0].clone(),
            self.mb[1].clone(),
        ]
    }

    pub fn from_coords(c: &[Rational; 8]) -> Self {
        Self {
            e: c[0..4].to_vec(),
            ma: c[4..6].to_vec(),
            mb: c[6..8].to_vec(),
        }
    }
}

fn sign(bit: usize) -> Rational {
    if bit == 0 {
        int(1)
    } else {
        int(-1)
    }
}

pub fn correlators(b: &NsBox) -> Correlators {
    let mut e: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for bb in 0..2 {
                    e[2 * x + y] += sign(a ^ bb) * b.p(a, bb, x, y);
                }
            }
        }
    }
    let ma = std::array::from_fn(|x| b.p(0, 0, x, 0) + b.p(0, 1, x, 0) - b.p(1, 0, x, 0) - b.p(1, 1, x, 0));
    let mb = std::array::from_fn(|y| b.p(0, 0, 0, y) + b.p(1, 0, 0, y) - b.p(0, 1, 0, y) - b.p(1, 1, 0, y));
    Correlators::new(e, ma, mb)
}

/// Inverse of [`correlators`]; fails if any reconstructed entry is negative.
pub fn box_from_correlators(c: &Correlators) -> Result<NsBox> {
    if c.e.len() != 4 || c.ma.len() != 2 || c.mb.len() != 2 {
        return Err(Error::Arity("correlators need 4 + 2 + 2 entries".into()));
    }
    let mut p = zero_table();
    for (i, slot) in p.iter_mut().enumerate() {
        let (a, b, x, y) = unidx(i);
        let v = (Rational::one() + sign(a) * &c.ma[x] + sign(b) * &c.mb[y] + sign(a ^ b) * &c.e[2 * x + y])
            / int(4);
        if v.is_negative() {
            return Err(Error::OutsidePolytope(
                format!("{a}{b}|{x}{y}"),
                format_rational(&v),
            ));
        }
        *slot = v;
    }
    Ok(NsBox::from_table_unchecked(p))
}

// ---------------------------------------------------------------------------
// Bell functionals

/// Sign patterns `(s00, s01, s10, s11)` of the 8 CHSH forms, in enumeration
/// order: forms 0..4 carry a single minus sign on `E11, E10, E01, E00`
/// respectively; forms 4..8 are their negations. Form 0 is the standard
/// `E00 + E01 + E10 - E11`.
pub fn chsh_signs(sym: usize) -> [i64; 4] {
    assert!(sym < 8, "CHSH symmetry index is 0..8, got {sym}");
    let mut s = [1i64; 4];
    s[3 - (sym % 4)] = -1;
    if sym >= 4 {
        s.iter_mut().for_each(|v| *v = -*v);
    }
    s
}

pub fn chsh_value(b: &NsBox, sym: usize) -> Rational {
    let c = correlators(b);
    chsh_signs(sym)
        .iter()
        .zip(&c.e)
        .map(|(s, e)| int(*s) * e)
        .sum()
}

pub fn chsh_values(b: &NsBox) -> [Rational; 8] {
    std::array::from_fn(|s| chsh_value(b, s))
}

pub fn chsh_max(b: &NsBox) -> Rational {
    chsh_values(b).into_iter().max().expect("eight forms")
}

/// `CH = 1 - P(11|00) - P(00|10) - P(00|01) + P(00|11)`. On non-signalling
/// boxes `CH = (2 - CHSH_0) / 4`.
pub fn ch_value(b: &NsBox) -> Rational {
    Rational::one() - b.p(1, 1, 0, 0) - b.p(0, 0, 1, 0) - b.p(0, 0, 0, 1) + b.p(0, 0, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for i in 0..16 {
            let (a, b, x, y) = unidx(i);
            assert_eq!(idx(a, b, x, y), i);
        }
    }

    #[test]
    fn constant_local_box() {
        let b = local_deterministic(0, 0, 0, 0);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(b.p(0, 0, x, y), &int(1));
            }
        }
    }

    #[test]
    fn local_boxes_are_distinct_and_bounded() {
        let locals = local_vertices();
        for (i, (_, b)) in locals.iter().enumerate() {
            assert!(validate(b.table()).passed());
            for s in 0..8 {
                let v = chsh_value(b, s);
                assert!(v == int(2) || v == int(-2), "CHSH form {s} = {v}");
            }
            for (_, other) in &locals[i + 1..] {
                assert_ne!(b, other);
            }
        }
    }

    #[test]
    fn pr_correlators_and_chsh() {
        let c = correlators(&pr_box());
        assert_eq!(c.e, vec![int(1), int(1), int(1), int(-1)]);
        assert!(c.ma.iter().chain(&c.mb).all(|m| m.is_zero()));
        assert_eq!(chsh_value(&pr_box(), 0), int(4));
    }

    #[test]
    fn maximally_mixed_values() {
        let m = maximally_mixed();
        assert_eq!(chsh_value(&m, 0), int(0));
        assert_eq!(ch_value(&m), rat(1, 2));
        let avg = mix(&[(rat(1, 2), &pr_box()), (rat(1, 2), &extremal_nl(0, 0, 1))]).unwrap();
        assert_eq!(avg, m);
    }

    #[test]
    fn mixture_errors() {
        let pr = pr_box();
        assert!(matches!(
            mix(&[(rat(1, 2), &pr)]),
            Err(Error::InvalidMixture(_))
        ));
        assert!(matches!(
            mix(&[(rat(3, 2), &pr), (rat(-1, 2), &pr)]),
            Err(Error::InvalidMixture(_))
        ));
        assert_eq!(mix(&[(int(1), &pr)]).unwrap(), pr);
        assert!(section_box(&rat(3, 4), &rat(1, 2)).is_err());
        assert!(correlated_nl(&rat(5, 4)).is_err());
    }

    #[test]
    fn family_chsh_values() {
        let eps = rat(3, 7);
        let c = correlated_nl(&eps).unwrap();
        assert_eq!(chsh_value(&c, 0), int(2) * (int(1) + &eps));
        let iso = isotropic(&eps).unwrap();
        assert_eq!(chsh_value(&iso, 0), int(4) * &eps);
        assert_eq!(chsh_value(&isotropic(&rat(1, 2)).unwrap(), 0), int(2));
        assert_eq!(correlated_nl(&int(1)).unwrap(), pr_box());
    }

    #[test]
    fn section_box_endpoints_and_correlators() {
        let eps = rat(2, 5);
        assert_eq!(
            section_box(&eps, &(int(1) - &eps)).unwrap(),
            correlated_nl(&eps).unwrap()
        );
        assert_eq!(
            section_box(&eps, &int(0)).unwrap(),
            isotropic(&eps).unwrap()
        );
        let g = rat(1, 5);
        let c = correlators(&section_box(&eps, &g).unwrap());
        let s = &eps + &g;
        assert_eq!(c.e, vec![s.clone(), s.clone(), s, &g - &eps]);
    }

    #[test]
    fn canonical_edge_is_correlated_box() {
        let eps = rat(3, 10);
        assert_eq!(edge_local_partner(0, 0, 0, 0, 1, 0), [0, 1, 0, 1]);
        assert_eq!(
            edge_box(0, 0, 0, 0, 1, 0, &eps).unwrap(),
            correlated_nl(&eps).unwrap()
        );
    }

    #[test]
    fn edge_boxes_distinct_with_single_saturated_form() {
        let eps = rat(3, 10);
        let edges = edge_boxes(&eps).unwrap();
        let target = int(2) * (int(1) + &eps);
        for (i, (label, b)) in edges.iter().enumerate() {
            let hits = chsh_values(b).iter().filter(|v| **v == target).count();
            assert_eq!(hits, 1, "{label}");
            for (_, other) in &edges[i + 1..] {
                assert_ne!(b, other);
            }
        }
    }

    #[test]
    fn perfectly_correlated_from_correlators() {
        let c = Correlators::new(
            [int(1), int(1), int(1), int(1)],
            [int(0), int(0)],
            [int(0), int(0)],
        );
        let expected = mix(&[
            (rat(1, 2), &local_deterministic(0, 0, 0, 0)),
            (rat(1, 2), &local_deterministic(0, 1, 0, 1)),
        ])
        .unwrap();
        assert_eq!(box_from_correlators(&c).unwrap(), expected);
        let outside = Correlators::new(
            [int(1), int(1), int(1), int(1)],
            [int(1), int(0)],
            [int(0), int(0)],
        );
        assert!(matches!(
            box_from_correlators(&outside),
            Err(Error::OutsidePolytope(..))
        ));
    }

    #[test]
    fn ns_vertices_round_trip_and_positivity_tightness() {
        let verts = ns_vertices();
        assert_eq!(verts.len(), 24);
        for (_, v) in &verts {
            assert_eq!(&box_from_correlators(&correlators(v)).unwrap(), v);
        }
        // every positivity facet is tight on at least 8 vertices
        for i in 0..16 {
            let tight = verts.iter().filter(|(_, v)| v.table()[i].is_zero()).count();
            assert!(tight >= 8, "entry {i} tight on {tight}");
        }
    }

    #[test]
    fn ch_matches_chsh_affinely() {
        for (_, v) in ns_vertices() {
            assert_eq!(ch_value(&v), (int(2) - chsh_value(&v, 0)) / int(4));
        }
    }

    #[test]
    fn validation_failures() {
        assert!(validate(pr_box().table()).passed());
        // signalling: Alice's marginal at x=0 depends on y
        let mut p = zero_table();
        p[idx(0, 0, 0, 0)] = int(1);
        p[idx(1, 1, 0, 1)] = int(1);
        p[idx(0, 0, 1, 0)] = int(1);
        p[idx(0, 0, 1, 1)] = int(1);
        let r = validate(&p);
        assert!(r.normalization && r.non_negativity && !r.non_signaling);

        let mut q = maximally_mixed().into_table();
        q[0] = rat(-1, 100);
        q[1] = rat(1, 4) + rat(1, 100) + rat(1, 4);
        let r = validate(&q);
        assert!(!r.non_negativity);
        assert!(NsBox::new(q).is_err());
    }

    #[test]
    fn serialization_is_exact() {
        let b = isotropic(&rat(4, 5)).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.starts_with("{\"p\":[\"9/20\""), "{json}");
        let back: NsBox = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        assert_eq!(NsBox::from_csv_row(&b.to_csv_row()).unwrap(), b);
        assert!(serde_json::from_str::<NsBox>("{\"p\":[\"1/2\"]}").is_err());
    }
}
