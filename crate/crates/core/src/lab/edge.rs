//! Distilling boxes on the one-dimensional edges of NS \ L towards their
//! extremal vertex, using the canonical protocol conjugated by a relabeling.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{chsh_bound, in_hull, r_a_polytope, LinearFunctional, Membership};
use crate::nsbox::{
    chsh_value, correlated_nl, edge_box, edge_local_partner, extremal_nl, local_deterministic,
    pr_box, NsBox,
};
use crate::rational::{format_rational, int, serde_str, Rational};
use crate::relabel::{group, Relabeling};
use crate::wiring::{apply_to_copies, conjugate_wiring, distillation_wiring, Wiring};

/// Labels of an edge: extremal vertex `P_NL^{mu nu sigma}` and local partner
/// indexed by `(alpha, beta, gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub mu: u8,
    pub nu: u8,
    pub sigma: u8,
    pub alpha: u8,
    pub beta: u8,
    pub gamma: u8,
}

impl Edge {
    pub fn all() -> Vec<Edge> {
        (0..64u8)
            .map(|i| Edge {
                mu: i >> 5 & 1,
                nu: i >> 4 & 1,
                sigma: i >> 3 & 1,
                alpha: i >> 2 & 1,
                beta: i >> 1 & 1,
                gamma: i & 1,
            })
            .collect()
    }

    pub fn at(&self, eps: &Rational) -> Result<NsBox> {
        edge_box(self.mu, self.nu, self.sigma, self.alpha, self.beta, self.gamma, eps)
    }

    fn endpoints(&self) -> (NsBox, NsBox) {
        let l = edge_local_partner(self.mu, self.nu, self.sigma, self.alpha, self.beta, self.gamma);
        (
            extremal_nl(self.mu, self.nu, self.sigma),
            local_deterministic(l[0], l[1], l[2], l[3]),
        )
    }
}

/// A relabeling carrying the canonical edge (PR over `P_L^{0101}`) onto `edge`.
pub fn edge_symmetry(edge: &Edge) -> Option<Relabeling> {
    let (nl, local) = edge.endpoints();
    let canonical_local = local_deterministic(0, 1, 0, 1);
    group()
        .iter()
        .find(|g| g.apply(&pr_box()) == nl && g.apply(&canonical_local) == local)
        .copied()
}

/// Index of the CHSH form that the edge saturates.
pub fn edge_chsh_form(edge: &Edge) -> usize {
    let (nl, _) = edge.endpoints();
    (0..8).find(|&s| chsh_value(&nl, s) == int(4)).expect("extremal box saturates one form")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeStep {
    #[serde(with = "serde_str")]
    pub eps: Rational,
    #[serde(with = "serde_str")]
    pub chsh: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeTrajectory {
    pub edge: Edge,
    pub symmetry: Relabeling,
    pub wiring: Wiring,
    pub chsh_form: usize,
    /// Step 0 is the starting box.
    pub steps: Vec<EdgeStep>,
}

impl EdgeTrajectory {
    pub fn final_eps(&self) -> &Rational {
        &self.steps.last().expect("trajectory has a start").eps
    }

    pub fn strictly_increasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].eps > w[0].eps)
    }

    /// First step whose CHSH value exceeds `s`.
    pub fn exit_step(&self, s: &Rational) -> Option<usize> {
        self.steps.iter().position(|st| &st.chsh > s)
    }
}

/// Iterates the conjugated distillation protocol `k` times on pairs of
/// identical copies, checking each image against the edge formula exactly.
pub fn distill_edge_out(edge: &Edge, eps: &Rational, k: usize) -> Result<EdgeTrajectory> {
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(Error::Parameter(format!(
            "edge weight must satisfy 0 < eps <= 1, got {}",
            format_rational(eps)
        )));
    }
    let g = edge_symmetry(edge).expect("every edge is a relabeling of the canonical one");
    let wiring = conjugate_wiring(&g, &g, &distillation_wiring())?;
    let form = edge_chsh_form(edge);
    let mut b = edge.at(eps)?;
    debug_assert_eq!(b, g.apply(&correlated_nl(eps)?));
    let mut e = eps.clone();
    let mut steps = vec![EdgeStep {
        eps: e.clone(),
        chsh: chsh_value(&b, form),
    }];
    for _ in 0..k {
        b = apply_to_copies(&wiring, &b);
        e = int(2) * &e - &e * &e;
        let expected = edge.at(&e)?;
        assert_eq!(b, expected, "conjugated protocol left the edge");
        steps.push(EdgeStep {
            eps: e.clone(),
            chsh: chsh_value(&b, form),
        });
    }
    Ok(EdgeTrajectory {
        edge: *edge,
        symmetry: g,
        wiring,
        chsh_form: form,
        steps,
    })
}

/// Certificates that a trajectory leaves `R_a` at cut-off `s` and stays out.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitCertificate {
    #[serde(with = "serde_str")]
    pub s: Rational,
    pub exit_step: usize,
    /// LP certificate for the first box outside.
    pub membership: Membership,
    /// `s - CHSH >= 0`, valid on every vertex of `R_a` and negative on
    /// every later box.
    pub bound: LinearFunctional,
    pub later_steps_outside: bool,
}

pub fn certify_exit(t: &EdgeTrajectory, s: &Rational) -> Result<Option<ExitCertificate>> {
    let poly = r_a_polytope(s)?;
    let Some(exit_step) = t.exit_step(s) else {
        return Ok(None);
    };
    let bound = chsh_bound(t.chsh_form, s);
    assert!(
        poly.vertices.iter().all(|v| !bound.evaluate(v).is_negative()),
        "CHSH cut-off is not valid on the restricted polytope"
    );
    let first = t.edge.at(&t.steps[exit_step].eps)?;
    let membership = in_hull(&first, &poly);
    let later_steps_outside = t.steps[exit_step..]
        .iter()
        .map(|st| t.edge.at(&st.eps))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|b| bound.evaluate(b).is_negative());
    Ok(Some(ExitCertificate {
        s: s.clone(),
        exit_step,
        membership,
        bound,
        later_steps_outside,
    }))
}

/// `1 - eps_k = (1 - eps_0)^(2^k)`.
pub fn closed_form_gap(eps0: &Rational, k: u32) -> Rational {
    num_traits::pow(Rational::one() - eps0, 1usize << k)
}

/// Whether some relabeling makes one protocol step strictly increase the
/// weight of the given edge box.
pub fn edge_is_distillable(edge: &Edge, eps: &Rational) -> Result<bool> {
    let b = edge.at(eps)?;
    let (nl, local) = edge.endpoints();
    for g in group() {
        let w = conjugate_wiring(g, g, &distillation_wiring())?;
        let out = apply_to_copies(&w, &b);
        // weight along the edge, if the image stays on it
        let t = out.table();
        let (pn, pl) = (nl.table(), local.table());
        let Some(i) = (0..16).find(|&i| pn[i] != pl[i]) else {
            continue;
        };
        let e = (&t[i] - &pl[i]) / (&pn[i] - &pl[i]);
        if e > *eps && !e.is_zero() && edge.at(&e).as_ref() == Ok(&out) {
            return Ok(true);
        }
    }
    Ok(false)
}
