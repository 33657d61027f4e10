//! The 128-element group of local relabelings: per-party input flips,
//! input-conditioned output flips, and the party swap.
//!
//! An element acts on tables by an index permutation: `(g.P)[i] = P[src(i)]`
//! with, for the local part,
//! `(g.P)(ab|xy) = P(a ^ oA[x], b ^ oB[y] | x ^ iA, y ^ iB)`,
//! followed by the swap `(ab|xy) -> (ba|yx)` when `swap` is set.

use std::collections::HashMap;
use std::fmt;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::nsbox::{idx, unidx, NsBox, Table};

/// One party's part of a relabeling: feed `x ^ input` to the box and flip
/// the returned bit by `output[x]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalFlip {
    pub input: u8,
    pub output: [u8; 2],
}

impl LocalFlip {
    pub const IDENTITY: LocalFlip = LocalFlip {
        input: 0,
        output: [0, 0],
    };

    fn from_bits(bits: usize) -> Self {
        LocalFlip {
            input: (bits >> 2 & 1) as u8,
            output: [(bits >> 1 & 1) as u8, (bits & 1) as u8],
        }
    }

    fn bits(&self) -> usize {
        (self.input as usize) << 2 | (self.output[0] as usize) << 1 | self.output[1] as usize
    }

    /// The flip undoing this one.
    pub fn inverse(&self) -> Self {
        let i = self.input as usize;
        LocalFlip {
            input: self.input,
            output: [self.output[i], self.output[1 ^ i]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relabeling {
    pub swap: bool,
    pub alice: LocalFlip,
    pub bob: LocalFlip,
}

pub type Permutation = [u8; 16];

static GROUP: Lazy<Vec<Relabeling>> = Lazy::new(|| (0..128).map(Relabeling::from_index).collect());

static PERMS: Lazy<Vec<Permutation>> = Lazy::new(|| GROUP.iter().map(|g| g.compute_permutation()).collect());

static BY_PERM: Lazy<HashMap<Permutation, usize>> =
    Lazy::new(|| PERMS.iter().enumerate().map(|(i, p)| (*p, i)).collect());

/// All 128 elements, ordered by [`Relabeling::index`]. Element 0 is the identity.
pub fn group() -> &'static [Relabeling] {
    &GROUP
}

impl Relabeling {
    pub const IDENTITY: Relabeling = Relabeling {
        swap: false,
        alice: LocalFlip::IDENTITY,
        bob: LocalFlip::IDENTITY,
    };

    /// Bit 6 swap, bits 3..6 Alice `(input, out0, out1)`, bits 0..3 Bob.
    pub fn from_index(i: usize) -> Self {
        assert!(i < 128, "relabeling index out of range: {i}");
        Relabeling {
            swap: i >> 6 & 1 == 1,
            alice: LocalFlip::from_bits(i >> 3 & 7),
            bob: LocalFlip::from_bits(i & 7),
        }
    }

    pub fn index(&self) -> usize {
        (self.swap as usize) << 6 | self.alice.bits() << 3 | self.bob.bits()
    }

    pub fn local(alice: LocalFlip, bob: LocalFlip) -> Self {
        Relabeling {
            swap: false,
            alice,
            bob,
        }
    }

    /// The same element without its party swap.
    pub fn local_part(&self) -> Self {
        Relabeling::local(self.alice, self.bob)
    }

    fn compute_permutation(&self) -> Permutation {
        let local = |a: usize, b: usize, x: usize, y: usize| {
            idx(
                a ^ self.alice.output[x] as usize,
                b ^ self.bob.output[y] as usize,
                x ^ self.alice.input as usize,
                y ^ self.bob.input as usize,
            )
        };
        std::array::from_fn(|i| {
            let (a, b, x, y) = unidx(i);
            let src = if self.swap { local(b, a, y, x) } else { local(a, b, x, y) };
            src as u8
        })
    }

    pub fn permutation(&self) -> &'static Permutation {
        &PERMS[self.index()]
    }

    /// `self ∘ other`: act with `other` first, then `self`.
    pub fn compose(&self, other: &Relabeling) -> Relabeling {
        let g = self.permutation();
        let h = other.permutation();
        let p: Permutation = std::array::from_fn(|i| h[g[i] as usize]);
        GROUP[BY_PERM[&p]]
    }

    pub fn inverse(&self) -> Relabeling {
        let g = self.permutation();
        let mut p = [0u8; 16];
        for (i, &s) in g.iter().enumerate() {
            p[s as usize] = i as u8;
        }
        GROUP[BY_PERM[&p]]
    }

    /// Permutes any 16-entry table the same way boxes are permuted. Applied to
    /// the coefficients of a functional `f` this yields `g.f` with
    /// `(g.f)(g.P) = f(P)`.
    pub fn permute<T: Clone>(&self, t: &[T; 16]) -> [T; 16] {
        let g = self.permutation();
        std::array::from_fn(|i| t[g[i] as usize].clone())
    }

    pub fn apply(&self, b: &NsBox) -> NsBox {
        let p: Table = self.permute(b.table());
        NsBox::from_table_unchecked(p)
    }
}

impl fmt::Display for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g{}(swap={}, A: in^{} out^{}{}, B: in^{} out^{}{})",
            self.index(),
            self.swap as u8,
            self.alice.input,
            self.alice.output[0],
            self.alice.output[1],
            self.bob.input,
            self.bob.output[0],
            self.bob.output[1]
        )
    }
}

/// Distinct images of `b` under the whole group, in group order.
pub fn orbit(b: &NsBox) -> Vec<NsBox> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for g in group() {
        let img = g.apply(b);
        if seen.insert(img.clone()) {
            out.push(img);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::*;
    use crate::rational::rat;
    use std::collections::HashSet;

    #[test]
    fn identity_and_indexing() {
        assert_eq!(group().len(), 128);
        assert_eq!(group()[0], Relabeling::IDENTITY);
        for (i, g) in group().iter().enumerate() {
            assert_eq!(g.index(), i);
        }
        let perms: HashSet<_> = group().iter().map(|g| *g.permutation()).collect();
        assert_eq!(perms.len(), 128);
        let b = isotropic(&rat(1, 3)).unwrap();
        assert_eq!(Relabeling::IDENTITY.apply(&b), b);
    }

    #[test]
    fn group_axioms() {
        let b = mix(&[
            (rat(1, 7), &pr_box()),
            (rat(2, 7), &local_deterministic(1, 0, 1, 1)),
            (rat(4, 7), &extremal_nl(0, 1, 1)),
        ])
        .unwrap();
        for g in group() {
            assert_eq!(g.compose(&g.inverse()), Relabeling::IDENTITY);
            assert_eq!(g.inverse().apply(&g.apply(&b)), b);
            let fi = LocalFlip::from_bits(g.alice.bits()).inverse();
            assert_eq!(fi.inverse(), g.alice);
        }
        for g in group().iter().step_by(5) {
            for h in group().iter().step_by(3) {
                assert_eq!(g.compose(h).apply(&b), g.apply(&h.apply(&b)));
            }
        }
    }

    #[test]
    fn local_flip_inverse_matches_group_inverse() {
        for g in group().iter().filter(|g| !g.swap) {
            let inv = g.inverse();
            assert_eq!(inv.alice, g.alice.inverse());
            assert_eq!(inv.bob, g.bob.inverse());
        }
    }

    #[test]
    fn orbits_of_vertices() {
        let nl: HashSet<_> = ns_vertices()[..8].iter().map(|(_, b)| b.clone()).collect();
        let l: HashSet<_> = local_vertices().into_iter().map(|(_, b)| b).collect();
        let pr_orbit: HashSet<_> = orbit(&pr_box()).into_iter().collect();
        assert_eq!(pr_orbit, nl);
        let l_orbit: HashSet<_> = orbit(&local_deterministic(0, 0, 0, 0)).into_iter().collect();
        assert_eq!(l_orbit, l);
    }

    #[test]
    fn chsh_multiset_invariant() {
        let b = section_box(&rat(1, 3), &rat(1, 5)).unwrap();
        let mut base: Vec<_> = chsh_values(&b).to_vec();
        base.sort();
        for g in group() {
            let mut v: Vec<_> = chsh_values(&g.apply(&b)).to_vec();
            v.sort();
            assert_eq!(v, base, "{g}");
        }
    }
}
