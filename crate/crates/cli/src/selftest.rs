//! Randomised invariant checks runnable from the command line.

use nsclosure::geometry::{facet_orbit, in_hull, local_polytope, ns_polytope, positivity, tilted_ch};
use nsclosure::nsbox::{box_from_correlators, correlators, mix, ns_vertices, validate, NsBox};
use nsclosure::rational::{int, rat, Rational};
use nsclosure::relabel::{group, orbit};
use nsclosure::wiring::{
    and_closed_form, and_wiring, apply_to_copies, apply_wiring, PartyStrategy, TruthTable, Wiring,
};
use nsclosure::nsbox::{local_deterministic, pr_box};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn random_box(rng: &mut StdRng, verts: &[(String, NsBox)]) -> NsBox {
    let w: Vec<i64> = verts.iter().map(|_| rng.gen_range(0..6)).collect();
    let total = w.iter().sum::<i64>().max(1);
    let mut terms: Vec<(Rational, &NsBox)> = w
        .iter()
        .zip(verts)
        .filter(|(w, _)| **w > 0)
        .map(|(&w, (_, b))| (rat(w, total), b))
        .collect();
    if terms.is_empty() {
        terms.push((int(1), &verts[0].1));
    }
    mix(&terms).expect("weights sum to one")
}

fn random_strategy(rng: &mut StdRng, n: usize) -> PartyStrategy {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    PartyStrategy {
        order,
        input_fns: (0..n)
            .map(|j| TruthTable::from_mask(j as u32 + 1, rng.gen()))
            .collect(),
        output_fn: TruthTable::from_mask(n as u32 + 1, rng.gen()),
    }
}

fn random_wiring(rng: &mut StdRng, n: usize) -> Wiring {
    Wiring::new(random_strategy(rng, n), random_strategy(rng, n)).expect("consistent arity")
}

type Suite = fn(&mut StdRng, usize, &[(String, NsBox)]) -> Result<(), String>;

fn non_signalling(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    for i in 0..cases {
        let n = 1 + i % 3;
        let w = random_wiring(rng, n);
        let boxes: Vec<NsBox> = (0..n).map(|_| random_box(rng, v)).collect();
        let out = apply_wiring(&w, &boxes).map_err(|e| e.to_string())?;
        if !validate(out.table()).passed() {
            return Err(format!("wiring {w} signals"));
        }
    }
    Ok(())
}

fn multilinear(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    for i in 0..cases {
        let w = random_wiring(rng, 2);
        let (a, b, c) = (random_box(rng, v), random_box(rng, v), random_box(rng, v));
        let lam = rat(1 + (i % 7) as i64, 8);
        let rest = int(1) - &lam;
        let m = mix(&[(lam.clone(), &a), (rest.clone(), &b)]).map_err(|e| e.to_string())?;
        let lhs = apply_wiring(&w, &[c.clone(), m]).map_err(|e| e.to_string())?;
        let ra = apply_wiring(&w, &[c.clone(), a]).map_err(|e| e.to_string())?;
        let rb = apply_wiring(&w, &[c, b]).map_err(|e| e.to_string())?;
        if lhs != mix(&[(lam, &ra), (rest, &rb)]).map_err(|e| e.to_string())? {
            return Err(format!("not affine for {w}"));
        }
    }
    Ok(())
}

fn and_oracle(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    for n in [2, 3] {
        let w = and_wiring(n).map_err(|e| e.to_string())?;
        for _ in 0..cases {
            let b = random_box(rng, v);
            if and_closed_form(&b, n).map_err(|e| e.to_string())? != apply_to_copies(&w, &b) {
                return Err(format!("closed form differs for n = {n}"));
            }
        }
    }
    Ok(())
}

fn coordinates(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    for _ in 0..cases {
        let b = random_box(rng, v);
        if box_from_correlators(&correlators(&b)).map_err(|e| e.to_string())? != b {
            return Err("correlator round trip".into());
        }
    }
    Ok(())
}

fn symmetry(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    let g = group();
    if g.len() != 128 {
        return Err(format!("group order {}", g.len()));
    }
    let sizes = [
        orbit(&pr_box()).len(),
        orbit(&local_deterministic(0, 0, 0, 0)).len(),
        facet_orbit(&tilted_ch(&int(6))).len(),
        facet_orbit(&positivity(0, 0, 0, 0)).len(),
    ];
    if sizes != [8, 16, 64, 16] {
        return Err(format!("orbit sizes {sizes:?}"));
    }
    for _ in 0..cases {
        let b = random_box(rng, v);
        let (x, y) = (g[rng.gen_range(0..128)], g[rng.gen_range(0..128)]);
        if x.compose(&y).apply(&b) != x.apply(&y.apply(&b)) {
            return Err(format!("action incompatible for {x} and {y}"));
        }
    }
    Ok(())
}

fn certificates(rng: &mut StdRng, cases: usize, v: &[(String, NsBox)]) -> Result<(), String> {
    let polys = [ns_polytope(), local_polytope()];
    for _ in 0..cases {
        let b = random_box(rng, v);
        for p in &polys {
            if !in_hull(&b, p).verify(&b, p) {
                return Err("membership certificate does not verify".into());
            }
        }
    }
    Ok(())
}

/// Runs every suite and returns the failures; one status line per suite.
pub fn run(seed: u64, cases: usize) -> Vec<String> {
    let suites: [(&str, Suite); 6] = [
        ("non-signalling preserved by random wirings", non_signalling),
        ("wirings are multilinear", multilinear),
        ("AND closed form", and_oracle),
        ("correlator coordinates", coordinates),
        ("relabeling group", symmetry),
        ("membership certificates", certificates),
    ];
    let verts = ns_vertices();
    let mut failures = Vec::new();
    for (k, (name, suite)) in suites.iter().enumerate() {
        let mut rng = StdRng::seed_from_u64(seed.wrapping_add(k as u64));
        match suite(&mut rng, cases, &verts) {
            Ok(()) => println!("[ok]   {name}"),
            Err(e) => {
                println!("[FAIL] {name}: {e}");
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    failures
}
