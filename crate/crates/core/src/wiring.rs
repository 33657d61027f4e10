//! Deterministic wirings of `N` boxes and their exact evaluation.
//!
//! A party strategy fixes the order in which the party uses its ends of the
//! boxes, one input truth table per step and a final output truth table.
//! Argument packing (the lowest bit is always the party's own input):
//!
//! * step `j` input table: bit 0 = party input, bit `1 + t` = output observed
//!   at step `t < j` (usage order), so it has `2^(j+1)` entries;
//! * output table: bit 0 = party input, bit `1 + k` = output of box `k`
//!   (box index order), so it has `2^(N+1)` entries.
//!
//! Alice and Bob may use the boxes in different orders.

use std::fmt;
use std::ops::{AddAssign, Mul};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nsbox::{idx, NsBox, Table};
use crate::rational::Rational;
use crate::relabel::{LocalFlip, Relabeling};

/// A Boolean function of `arity` bits stored as a little-endian bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: u32,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(arity: u32) -> Self {
        assert!(arity <= 30, "truth table arity {arity} too large");
        let len = (1usize << arity).div_ceil(64);
        TruthTable {
            arity,
            words: vec![0; len],
        }
    }

    pub fn from_fn(arity: u32, f: impl Fn(usize) -> bool) -> Self {
        let mut t = Self::zeros(arity);
        for i in 0..t.len() {
            if f(i) {
                t.set(i, true);
            }
        }
        t
    }

    /// Tables with at most 64 entries can be given as a single mask.
    pub fn from_mask(arity: u32, mask: u64) -> Self {
        let mut t = Self::zeros(arity);
        let n = t.len();
        t.words[0] = if n >= 64 { mask } else { mask & ((1u64 << n) - 1) };
        t
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        (self.words[i >> 6] >> (i & 63) & 1) as u8
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let bit = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    /// Hexadecimal bitmask integer, `"0x"`-prefixed, no leading zeros.
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for w in self.words.iter().rev() {
            if s.is_empty() {
                if *w != 0 {
                    s = format!("{w:x}");
                }
            } else {
                s.push_str(&format!("{w:016x}"));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        format!("0x{s}")
    }

    pub fn from_hex(arity: u32, hex: &str) -> Result<Self> {
        let digits = hex
            .trim()
            .strip_prefix("0x")
            .ok_or_else(|| Error::Parse(format!("truth table {hex:?} must start with 0x")))?;
        let mut t = Self::zeros(arity);
        let bytes = digits.as_bytes();
        let mut end = bytes.len();
        let mut word = 0;
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = std::str::from_utf8(&bytes[start..end]).expect("ascii");
            let v = u64::from_str_radix(chunk, 16)
                .map_err(|_| Error::Parse(format!("bad hex truth table {hex:?}")))?;
            if v != 0 {
                if word >= t.words.len() {
                    return Err(Error::Parse(format!(
                        "truth table {hex:?} has more than 2^{arity} bits"
                    )));
                }
                t.words[word] = v;
            }
            word += 1;
            end = start;
        }
        let n = t.len();
        if n < 64 && t.words[0] >> n != 0 {
            return Err(Error::Parse(format!(
                "truth table {hex:?} has more than 2^{arity} bits"
            )));
        }
        Ok(t)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, {})", self.arity, self.to_hex())
    }
}

/// One party's adaptive local circuit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartyStrategy {
    pub order: Vec<usize>,
    pub input_fns: Vec<TruthTable>,
    pub output_fn: TruthTable,
}

impl PartyStrategy {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        if self.order.len() != n {
            return Err(Error::Arity(format!(
                "usage order has {} entries for {n} boxes",
                self.order.len()
            )));
        }
        for &k in &self.order {
            if k >= n || seen[k] {
                return Err(Error::Arity(format!(
                    "usage order {:?} is not a permutation of 0..{n}",
                    self.order
                )));
            }
            seen[k] = true;
        }
        if self.input_fns.len() != n {
            return Err(Error::Arity(format!(
                "{} input functions for {n} boxes",
                self.input_fns.len()
            )));
        }
        for (j, f) in self.input_fns.iter().enumerate() {
            if f.arity() as usize != j + 1 {
                return Err(Error::Arity(format!(
                    "input function {j} has arity {}, expected {}",
                    f.arity(),
                    j + 1
                )));
            }
        }
        if self.output_fn.arity() as usize != n + 1 {
            return Err(Error::Arity(format!(
                "output function has arity {}, expected {}",
                self.output_fn.arity(),
                n + 1
            )));
        }
        Ok(())
    }

    /// Given the party input and every box output (bit `k` = box `k`),
    /// returns the inputs fed to the boxes (bit `k` = box `k`) and the final
    /// output bit.
    #[inline]
    pub fn resolve(&self, input: u8, outputs: u64) -> (u64, u8) {
        let mut seen = input as usize;
        let mut inputs = 0u64;
        for (j, &k) in self.order.iter().enumerate() {
            inputs |= (self.input_fns[j].get(seen) as u64) << k;
            seen |= ((outputs >> k & 1) as usize) << (1 + j);
        }
        let out = self
            .output_fn
            .get(input as usize | (outputs as usize) << 1);
        (inputs, out)
    }

    /// Uses every box in index order with the party input, outputs `f(outputs)`.
    pub fn non_adaptive(n: usize, output: impl Fn(u8, u64) -> u8) -> Self {
        PartyStrategy {
            order: (0..n).collect(),
            input_fns: (0..n)
                .map(|j| TruthTable::from_fn(j as u32 + 1, |i| i & 1 == 1))
                .collect(),
            output_fn: TruthTable::from_fn(n as u32 + 1, |i| {
                output((i & 1) as u8, (i >> 1) as u64) == 1
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WiringRepr", into = "WiringRepr")]
pub struct Wiring {
    n: usize,
    pub alice: PartyStrategy,
    pub bob: PartyStrategy,
}

impl Wiring {
    pub fn new(alice: PartyStrategy, bob: PartyStrategy) -> Result<Self> {
        let n = alice.n();
        if n == 0 {
            return Err(Error::Arity("a wiring needs at least one box".into()));
        }
        if n > 20 {
            return Err(Error::Arity(format!("{n} boxes is beyond trajectory enumeration")));
        }
        alice.check(n)?;
        bob.check(n)?;
        Ok(Wiring { n, alice, bob })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn party(&self, bob: bool) -> &PartyStrategy {
        if bob {
            &self.bob
        } else {
            &self.alice
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyRepr {
    order: Vec<usize>,
    input_fns: Vec<String>,
    output_fn: String,
}

#[derive(Serialize, Deserialize)]
struct WiringRepr {
    n: usize,
    alice: StrategyRepr,
    bob: StrategyRepr,
}

impl From<Wiring> for WiringRepr {
    fn from(w: Wiring) -> Self {
        let repr = |s: &PartyStrategy| StrategyRepr {
            order: s.order.clone(),
            input_fns: s.input_fns.iter().map(TruthTable::to_hex).collect(),
            output_fn: s.output_fn.to_hex(),
        };
        WiringRepr {
            n: w.n,
            alice: repr(&w.alice),
            bob: repr(&w.bob),
        }
    }
}

impl TryFrom<WiringRepr> for Wiring {
    type Error = Error;

    fn try_from(r: WiringRepr) -> Result<Self> {
        let n = r.n;
        let parse = |s: StrategyRepr| -> Result<PartyStrategy> {
            if s.input_fns.len() != n {
                return Err(Error::Arity(format!(
                    "{} input functions for {n} boxes",
                    s.input_fns.len()
                )));
            }
            Ok(PartyStrategy {
                order: s.order,
                input_fns: s
                    .input_fns
                    .iter()
                    .enumerate()
                    .map(|(j, h)| TruthTable::from_hex(j as u32 + 1, h))
                    .collect::<Result<_>>()?,
                output_fn: TruthTable::from_hex(n as u32 + 1, &s.output_fn)?,
            })
        };
        let w = Wiring::new(parse(r.alice)?, parse(r.bob)?)?;
        if w.n != n {
            return Err(Error::Arity(format!("declared n = {n}, strategies have {}", w.n)));
        }
        Ok(w)
    }
}

impl fmt::Display for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &PartyStrategy| {
            let fns: Vec<String> = s.input_fns.iter().map(TruthTable::to_hex).collect();
            format!("order {:?} in [{}] out {}", s.order, fns.join(" "), s.output_fn.to_hex())
        };
        write!(f, "A: {} | B: {}", show(&self.alice), show(&self.bob))
    }
}

// ---------------------------------------------------------------------------
// Evaluation

/// Numeric types the trajectory enumeration can run over (exact rationals
/// for certificates, `f64` for dynamics).
pub trait Weight: Clone + Zero + One + for<'a> Mul<&'a Self, Output = Self> + AddAssign {}

impl<T> Weight for T where T: Clone + Zero + One + for<'a> Mul<&'a T, Output = T> + AddAssign {}

/// Sums, for every `(x, y)` and every joint output tuple, the product of the
/// constituent probabilities with inputs resolved in each party's own order.
pub fn wire_tables<T: Weight>(w: &Wiring, tables: &[&[T; 16]]) -> Result<[T; 16]> {
    if tables.len() != w.n {
        return Err(Error::Arity(format!(
            "wiring takes {} boxes, got {}",
            w.n,
            tables.len()
        )));
    }
    let n = w.n;
    let m = 1usize << n;
    let resolve_all = |s: &PartyStrategy| -> [Vec<(u64, u8)>; 2] {
        std::array::from_fn(|inp| (0..m as u64).map(|o| s.resolve(inp as u8, o)).collect())
    };
    let alice = resolve_all(&w.alice);
    let bob = resolve_all(&w.bob);
    let mut out: [T; 16] = std::array::from_fn(|_| T::zero());
    for x in 0..2 {
        for y in 0..2 {
            for (ao, &(xin, a)) in alice[x].iter().enumerate() {
                'traj: for (bo, &(yin, b)) in bob[y].iter().enumerate() {
                    let mut prod = T::one();
                    for (k, t) in tables.iter().enumerate() {
                        let e = &t[idx(ao >> k & 1, bo >> k & 1, (xin >> k & 1) as usize, (yin >> k & 1) as usize)];
                        if e.is_zero() {
                            continue 'traj;
                        }
                        prod = prod * e;
                    }
                    out[idx(a as usize, b as usize, x, y)] += prod;
                }
            }
        }
    }
    Ok(out)
}

/// Exact box produced by wiring `boxes` with `w`.
pub fn apply_wiring(w: &Wiring, boxes: &[NsBox]) -> Result<NsBox> {
    let tables: Vec<&Table> = boxes.iter().map(NsBox::table).collect();
    Ok(NsBox::from_table_unchecked(wire_tables(w, &tables)?))
}

/// `apply_wiring` on `w.n()` copies of the same box.
pub fn apply_to_copies(w: &Wiring, b: &NsBox) -> NsBox {
    let tables = vec![b.table(); w.n];
    NsBox::from_table_unchecked(wire_tables(w, &tables).expect("arity matches by construction"))
}

// ---------------------------------------------------------------------------
// Named protocols

/// Single box, used as is.
pub fn identity_wiring() -> Wiring {
    let s = PartyStrategy::non_adaptive(1, |_, o| o as u8 & 1);
    Wiring::new(s.clone(), s).expect("valid")
}

/// The two-box distillation protocol.
/// Alice: `x1 = x`, `x2 = x ^ a1 ^ 1`, `a = a1 ^ a2 ^ 1`.
/// Bob: `y1 = y`, `y2 = y b1`, `b = b1 ^ b2 ^ 1`.
pub fn distillation_wiring() -> Wiring {
    let first = TruthTable::from_fn(1, |i| i & 1 == 1);
    let out = TruthTable::from_fn(3, |i| (i >> 1 & 1) ^ (i >> 2 & 1) ^ 1 == 1);
    let alice = PartyStrategy {
        order: vec![0, 1],
        input_fns: vec![
            first.clone(),
            TruthTable::from_fn(2, |i| (i & 1) ^ (i >> 1 & 1) ^ 1 == 1),
        ],
        output_fn: out.clone(),
    };
    let bob = PartyStrategy {
        order: vec![0, 1],
        input_fns: vec![first, TruthTable::from_fn(2, |i| (i & 1) & (i >> 1 & 1) == 1)],
        output_fn: out,
    };
    Wiring::new(alice, bob).expect("valid")
}

/// Every box gets the party input; the output is the AND of all outputs.
pub fn and_wiring(n: usize) -> Result<Wiring> {
    if n == 0 {
        return Err(Error::Arity("AND wiring needs at least one box".into()));
    }
    let full = (1u64 << n) - 1;
    let s = PartyStrategy::non_adaptive(n, |_, o| (o == full) as u8);
    Wiring::new(s.clone(), s)
}

/// Closed form of the `n`-copy AND wiring:
/// `P'(11) = P(11)^n`, `P'(01) = (P(01) + P(11))^n - P(11)^n`,
/// `P'(10)` symmetric, `P'(00)` by normalization.
pub fn and_closed_form(b: &NsBox, n: usize) -> Result<NsBox> {
    if n == 0 {
        return Err(Error::Arity("AND wiring needs at least one box".into()));
    }
    let pow = |r: &Rational| num_traits::pow(r.clone(), n);
    let mut p: Table = std::array::from_fn(|_| Rational::zero());
    for x in 0..2 {
        for y in 0..2 {
            let p11 = pow(b.p(1, 1, x, y));
            let p01 = pow(&(b.p(0, 1, x, y) + b.p(1, 1, x, y))) - &p11;
            let p10 = pow(&(b.p(1, 0, x, y) + b.p(1, 1, x, y))) - &p11;
            p[idx(0, 0, x, y)] = Rational::one() - &p01 - &p10 - &p11;
            p[idx(0, 1, x, y)] = p01;
            p[idx(1, 0, x, y)] = p10;
            p[idx(1, 1, x, y)] = p11;
        }
    }
    Ok(NsBox::from_table_unchecked(p))
}

// ---------------------------------------------------------------------------
// Symmetries of wirings

/// Exchanges the roles of Alice and Bob.
pub fn exchange_parties(w: &Wiring) -> Wiring {
    Wiring {
        n: w.n,
        alice: w.bob.clone(),
        bob: w.alice.clone(),
    }
}

/// Rewrites a strategy so that each box is seen through `inner` (query with
/// `v` -> feed `v ^ inner.input`, read `r ^ inner.output[v]`) and the final
/// interface through `outer`.
fn conjugate_strategy(s: &PartyStrategy, inner: LocalFlip, outer: LocalFlip) -> PartyStrategy {
    let n = s.n();
    // Replays the first `steps` steps on real outputs (packed by step), returning
    // the packed virtual argument word.
    let replay = |x: usize, real_by_step: usize, steps: usize| -> usize {
        let mut seen = x ^ outer.input as usize;
        for t in 0..steps {
            let v = s.input_fns[t].get(seen);
            let r = (real_by_step >> t & 1) as u8;
            seen |= ((r ^ inner.output[v as usize]) as usize) << (1 + t);
        }
        seen
    };
    let input_fns = (0..n)
        .map(|j| {
            TruthTable::from_fn(j as u32 + 1, |i| {
                let seen = replay(i & 1, i >> 1, j);
                s.input_fns[j].get(seen) ^ inner.input == 1
            })
        })
        .collect();
    let output_fn = TruthTable::from_fn(n as u32 + 1, |i| {
        let x = i & 1;
        let real_by_box = i >> 1;
        let real_by_step = s
            .order
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &k)| acc | (real_by_box >> k & 1) << t);
        let seen = replay(x, real_by_step, n);
        let mut virt_by_box = 0usize;
        for (t, &k) in s.order.iter().enumerate() {
            virt_by_box |= (seen >> (1 + t) & 1) << k;
        }
        let w_out = s.output_fn.get((x ^ outer.input as usize) | virt_by_box << 1);
        w_out ^ outer.output[x] == 1
    });
    PartyStrategy {
        order: s.order.clone(),
        input_fns,
        output_fn,
    }
}

/// The wiring `W'` with `W'(B_1..B_n) = g_out . W(g_in^-1 . B_1, ..)`.
///
/// A party swap is only realisable by local circuits when it appears in
/// both relabelings, so mismatched swap bits are rejected.
pub fn conjugate_wiring(g_in: &Relabeling, g_out: &Relabeling, w: &Wiring) -> Result<Wiring> {
    if g_in.swap != g_out.swap {
        return Err(Error::Parameter(
            "conjugation needs the party swap on both sides or on neither".into(),
        ));
    }
    let inner = g_in.local_part().inverse();
    let local = Wiring {
        n: w.n,
        alice: conjugate_strategy(&w.alice, inner.alice, g_out.alice),
        bob: conjugate_strategy(&w.bob, inner.bob, g_out.bob),
    };
    Ok(if g_in.swap { exchange_parties(&local) } else { local })
}
