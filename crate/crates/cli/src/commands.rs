use std::fmt;

use anyhow::{Context, Result};
use nsclosure::dynamics::{
    and_chord_step, correlated_section, distillation_step, field_csv, isotropic_section,
    vector_field,
};
use nsclosure::geometry::{
    facet_orbit, facet_q, in_hull, local_polytope, positivity_facets, r_b_polytope, tilted_ch,
    uffink_lhs,
};
use nsclosure::lab::edge::{certify_exit, distill_edge_out, Edge};
use nsclosure::lab::escape::{and_escape_box, EscapeOutcome};
use nsclosure::lab::hull::iterate_hull;
use nsclosure::lab::search::{two_box_closure_search, SearchConfig};
use nsclosure::lab::uffink::uffink_escape_scan;
use nsclosure::nsbox::{ch_value, chsh_values, correlators};
use nsclosure::rational::{format_rational, int, to_f64};
use nsclosure::wiring::{and_wiring, apply_to_copies, apply_wiring};
use nsclosure::{Error, NsBox};
use serde_json::json;

use crate::spec::{edge_bits, parse_box, parse_wiring, rational};
use crate::{
    selftest, BoxCmd, Command, DistillCmd, EscapeCmd, FieldCmd, HullCmd, Output, SearchCmd,
    UffinkCmd, WireCmd,
};

/// A self-check that ran and did not hold.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse(_)
                | Error::InvalidBox(_)
                | Error::InvalidMixture(_)
                | Error::OutsidePolytope(..) => 3,
                Error::Parameter(_) | Error::DivisionByZero(_) | Error::Arity(_) => 4,
                Error::Overflow(_) => 1,
            };
        }
        if cause.is::<serde_json::Error>() {
            return 3;
        }
        if cause.is::<std::io::Error>() {
            return 5;
        }
        if cause.is::<CheckFailed>() {
            return 6;
        }
    }
    1
}

fn write_out(out: &Output, content: &str) -> Result<()> {
    if let Some(path) = &out.out {
        std::fs::write(path, content).with_context(|| format!("writing {path}"))?;
        println!("wrote {path}");
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(out: &Output, value: &T) -> Result<()> {
    if out.out.is_some() {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        write_out(out, &s)?;
    }
    Ok(())
}

fn strings<'a>(it: impl IntoIterator<Item = &'a nsclosure::Rational>) -> Vec<String> {
    it.into_iter().map(format_rational).collect()
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Box(BoxCmd::Show { spec, out }) => box_show(&spec, &out),
        Command::Wire(WireCmd::Apply { wiring, boxes, out }) => wire_apply(&wiring, &boxes, &out),
        Command::Distill(DistillCmd::Iterate {
            eps,
            k,
            edge,
            exit_s,
            out,
        }) => distill(&eps, k, &edge, exit_s.as_deref(), &out),
        Command::Escape(EscapeCmd::And { eps, n, out }) => escape(&eps, n, &out),
        Command::Hull(HullCmd::Iterate { eps, n_max, out }) => hull(&eps, n_max, &out),
        Command::Search(SearchCmd::TwoBox {
            s,
            workers,
            max_units,
            max_violations,
            out,
        }) => search(&s, workers, max_units, max_violations, &out),
        Command::Uffink(UffinkCmd::Scan { grid, iters, out }) => uffink(grid, iters, &out),
        Command::Field(FieldCmd::Export {
            preset,
            grid,
            eps_ref,
            workers,
            out,
        }) => field(&preset, grid, &eps_ref, workers, &out),
        Command::Selftest(args) => {
            let failures = selftest::run(args.seed, args.cases);
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CheckFailed(failures.join("; ")).into())
            }
        }
    }
}

fn describe(b: &NsBox) {
    print!("{b}");
    let c = correlators(b).coords();
    println!("correlators E00 E01 E10 E11: {}", strings(&c[..4]).join(" "));
    println!("marginals <A0> <A1> <B0> <B1>: {}", strings(&c[4..]).join(" "));
    println!("CHSH forms: {}", strings(&chsh_values(b)).join(" "));
}

fn box_show(spec: &str, out: &Output) -> Result<()> {
    let b = parse_box(spec)?;
    describe(&b);
    let ch = ch_value(&b);
    let uffink = uffink_lhs(&b);
    let local = in_hull(&b, &local_polytope());
    println!("CH: {}", format_rational(&ch));
    println!("Uffink form: {} ({})", format_rational(&uffink), if uffink <= int(4) { "inside" } else { "outside" });
    println!("local: {}", local.is_inside());
    write_json(
        out,
        &json!({
            "box": b,
            "correlators": strings(&correlators(&b).coords()),
            "chsh": strings(&chsh_values(&b)),
            "ch": format_rational(&ch),
            "uffink_lhs": format_rational(&uffink),
            "local": local,
        }),
    )
}

fn wire_apply(wiring: &str, specs: &[String], out: &Output) -> Result<()> {
    let w = parse_wiring(wiring)?;
    let boxes = specs.iter().map(|s| parse_box(s)).collect::<Result<Vec<_>>>()?;
    let result = if boxes.len() == 1 && w.n() > 1 {
        apply_to_copies(&w, &boxes[0])
    } else {
        apply_wiring(&w, &boxes)?
    };
    println!("wiring: {w}");
    describe(&result);
    write_json(out, &json!({ "wiring": w, "inputs": boxes, "output": result }))
}

fn distill(eps: &str, k: usize, edge: &str, exit_s: Option<&str>, out: &Output) -> Result<()> {
    let eps = rational(eps)?;
    let [mu, nu, sigma, alpha, beta, gamma] = edge_bits(edge)?;
    let e = Edge {
        mu,
        nu,
        sigma,
        alpha,
        beta,
        gamma,
    };
    let t = distill_edge_out(&e, &eps, k)?;
    println!("edge {edge}, relabeling {}, CHSH form {}", t.symmetry, t.chsh_form);
    for (i, s) in t.steps.iter().enumerate() {
        let shown = if s.eps.denom().bits() > 64 {
            format!("1 - {:.6e}", to_f64(&(int(1) - &s.eps)))
        } else {
            format_rational(&s.eps)
        };
        println!("step {i}: eps = {shown}");
    }
    let exit = match exit_s {
        Some(s) => {
            let s = rational(s)?;
            let c = certify_exit(&t, &s)?;
            match &c {
                Some(c) => println!(
                    "leaves R_a at S = {} on step {}; stays out: {}",
                    format_rational(&s),
                    c.exit_step,
                    c.later_steps_outside
                ),
                None => println!("still inside R_a at S = {} after {k} steps", format_rational(&s)),
            }
            c
        }
        None => None,
    };
    write_json(out, &json!({ "trajectory": t, "exit": exit }))
}

fn escape(eps: &str, n: usize, out: &Output) -> Result<()> {
    let eps = rational(eps)?;
    let outcome = and_escape_box(n, &eps)?;
    match &outcome {
        EscapeOutcome::Violation(c) => {
            println!(
                "AND of {n} isotropic boxes at eps = {} violates I(q = {}): value {}",
                format_rational(&c.eps),
                format_rational(&c.q),
                format_rational(&c.violation)
            );
            println!(
                "CHSH {} -> {}; outside R_b: {}",
                format_rational(&c.chsh_input),
                format_rational(&c.chsh_output),
                !c.membership.is_inside()
            );
        }
        EscapeOutcome::NoViolation { value } => {
            println!("no violation: I(q) = {}", format_rational(value));
        }
    }
    write_json(out, &outcome)
}

fn hull(eps: &str, n_max: usize, out: &Output) -> Result<()> {
    let eps = rational(eps)?;
    let r = iterate_hull(&eps, n_max)?;
    println!("stage 1: {} vertices", r.initial_vertex_count);
    for s in &r.stages {
        println!(
            "n = {}: outside previous hull: {}, orbit {}, vertices {}",
            s.n,
            s.grew(),
            s.orbit_size,
            s.vertex_count
        );
    }
    write_json(out, &r)
}

fn search(s: &str, workers: usize, max_units: Option<usize>, max_violations: usize, out: &Output) -> Result<()> {
    let s = rational(s)?;
    let poly = r_b_polytope(&s)?;
    let q = facet_q(&(&s / int(4)))?;
    let mut facets = positivity_facets();
    facets.extend(facet_orbit(&tilted_ch(&q)));
    let cfg = SearchConfig {
        workers,
        max_units,
        max_violations,
        probes: vec![("AND2".into(), and_wiring(2)?)],
    };
    let run = two_box_closure_search(&poly, &facets, &cfg)?;
    let r = &run.report;
    println!(
        "S = {}: {} vertices, {} facets ({} scanned up to symmetry)",
        format_rational(&s),
        r.vertex_count,
        r.facet_count,
        r.facet_representatives.len()
    );
    println!(
        "strategies per party: {} raw, {} canonical; {} wirings x {} vertex pairs",
        r.raw_strategies_per_party, r.canonical_strategies_per_party, r.canonical_wirings, r.vertex_pairs
    );
    println!(
        "units scanned {}/{}; violating (unit, Alice class) combinations {}; AND probe hits {}",
        r.units_scanned, r.units_total, r.violating_alice_classes, r.probes[0].violation_count
    );
    println!("status {:?}; closed: {}; {:.1}s", r.status, r.closed(), run.elapsed.as_secs_f64());
    write_json(out, r)
}

fn uffink(grid: usize, iters: usize, out: &Output) -> Result<()> {
    let m = uffink_escape_scan(grid, iters)?;
    println!("{} nodes, {} inside Uffink's set", m.points.len(), m.points.iter().filter(|p| p.inside).count());
    for k in 1..=iters {
        println!("escaped within {k} step(s): {}", m.escaped_within(k));
    }
    println!("quartic mismatches: {}", m.quartic_mismatches().len());
    write_out(out, &m.to_csv())
}

fn field(preset: &str, grid: usize, eps_ref: &str, workers: usize, out: &Output) -> Result<()> {
    let (section, step) = match preset {
        "distill" => (correlated_section(), distillation_step()),
        "and" => (isotropic_section(), and_chord_step(&rational(eps_ref)?)?),
        _ => return Err(Error::Parse(format!("unknown preset {preset:?}")).into()),
    };
    let rows = vector_field(&step, &section, grid, workers)?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    println!("{} nodes; largest out-of-section residual {worst:.3e}", rows.len());
    write_out(out, &field_csv(&rows))
}
