//! Textual box and wiring specifications.

use anyhow::{Context, Result};
use nsclosure::nsbox::{
    correlated_nl, edge_box, extremal_nl, isotropic, local_deterministic, maximally_mixed, pr_box,
    section_box,
};
use nsclosure::rational::parse_rational;
use nsclosure::wiring::{and_wiring, distillation_wiring, identity_wiring, Wiring};
use nsclosure::{Error, NsBox, Rational};

fn malformed(msg: String) -> anyhow::Error {
    Error::Parse(msg).into()
}

pub fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

fn bits<const N: usize>(s: &str) -> Result<[u8; N]> {
    let b: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(malformed(format!("expected {N} bits, got {s:?}"))),
        })
        .collect::<Result<_>>()?;
    b.try_into().map_err(|_| malformed(format!("expected {N} bits, got {s:?}")))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

pub fn parse_box(spec: &str) -> Result<NsBox> {
    if let Some(path) = spec.strip_prefix('@') {
        return read_json(path);
    }
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let b = match (kind, arg) {
        ("pr", "") => pr_box(),
        ("mixed", "") => maximally_mixed(),
        ("local", a) => {
            let [m, n, s, t] = bits::<4>(a)?;
            local_deterministic(m, n, s, t)
        }
        ("nl", a) => {
            let [m, n, s] = bits::<3>(a)?;
            extremal_nl(m, n, s)
        }
        ("correlated", e) => correlated_nl(&rational(e)?)?,
        ("isotropic", e) => isotropic(&rational(e)?)?,
        ("section", a) => {
            let (e, g) = a
                .split_once(',')
                .ok_or_else(|| malformed(format!("section needs E,G, got {a:?}")))?;
            section_box(&rational(e)?, &rational(g)?)?
        }
        ("edge", a) => {
            let (labels, e) = a
                .split_once(':')
                .ok_or_else(|| malformed(format!("edge needs MNSABG:E, got {a:?}")))?;
            let [m, n, s, al, be, ga] = bits::<6>(labels)?;
            edge_box(m, n, s, al, be, ga, &rational(e)?)?
        }
        _ => return Err(malformed(format!("unknown box spec {spec:?}"))),
    };
    Ok(b)
}

pub fn parse_wiring(spec: &str) -> Result<Wiring> {
    if let Some(path) = spec.strip_prefix('@') {
        return read_json(path);
    }
    match spec.split_once(':').unwrap_or((spec, "")) {
        ("identity", "") => Ok(identity_wiring()),
        ("distill", "") => Ok(distillation_wiring()),
        ("and", n) => {
            let n: usize = n
                .parse()
                .map_err(|_| malformed(format!("and:N needs a count, got {n:?}")))?;
            Ok(and_wiring(n)?)
        }
        _ => Err(malformed(format!("unknown wiring spec {spec:?}"))),
    }
}

pub fn edge_bits(s: &str) -> Result<[u8; 6]> {
    bits::<6>(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsclosure::rational::rat;

    #[test]
    fn named_boxes() {
        assert_eq!(parse_box("pr").unwrap(), pr_box());
        assert_eq!(parse_box("edge:000010:1/2").unwrap(), correlated_nl(&rat(1, 2)).unwrap());
        assert_eq!(parse_box("local:0101").unwrap(), local_deterministic(0, 1, 0, 1));
        assert!(parse_box("isotropic:0.8").is_err());
        assert!(parse_box("local:012").is_err());
        assert!(parse_box("section:1/2,3/4").is_err());
    }

    #[test]
    fn named_wirings() {
        assert_eq!(parse_wiring("and:3").unwrap().n(), 3);
        assert!(parse_wiring("and:0").is_err());
        assert!(parse_wiring("or").is_err());
    }
}
