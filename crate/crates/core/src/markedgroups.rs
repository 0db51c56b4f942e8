//! Marked groups as normal subgroups of `F_k`, kernel-ball valuations,
//! the Chabauty ultrametric and convergence reports.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contraction::Engine;
use crate::covers::{kernel_member, CoverPresentation};
use crate::error::{Error, Result};
use crate::gomega::{omega_kernel_member, OmegaGroup, OmegaSequence};
use crate::kernel::{Letter, Word};
use crate::metabelian::{britton_reduce, bs_kernel_chain_member, met_eval, wreath_eval, HnnDatum};
use crate::rewriting::RewriteSystem;

/// Largest ball `free_ball` will materialize.
pub const MAX_BALL: usize = 1 << 24;

const MAX_SEEN: usize = 1 << 21;

/// Decidable membership in the kernel `N ⊴ F_k` of a marking.
///
/// Membership is asked on *keys*: words that represent the same element
/// of the marked group as the free word they stand for. The default key
/// is the freely reduced word itself; oracles that know relations holding
/// in their group may normalize more aggressively, which lets ball scans
/// share work between words that collapse to the same key.
pub trait KernelOracle {
    fn extend(&self, key: &Word, l: Letter) -> Word {
        let mut k = key.clone();
        k.push(l);
        k
    }

    fn contains(&self, key: &Word) -> Result<bool>;
}

struct FnOracle<F>(F);

impl<F: Fn(&Word) -> Result<bool>> KernelOracle for FnOracle<F> {
    fn contains(&self, key: &Word) -> Result<bool> {
        (self.0)(key)
    }
}

/// Oracle that first normalizes in a finitely presented cover.
struct NormalizedOracle<F> {
    sys: RewriteSystem,
    test: F,
}

impl<F: Fn(&Word) -> Result<bool>> KernelOracle for NormalizedOracle<F> {
    fn extend(&self, key: &Word, l: Letter) -> Word {
        self.sys.append(key, l)
    }

    fn contains(&self, key: &Word) -> Result<bool> {
        (self.test)(key)
    }
}

/// A group with an ordered generating tuple of length `rank`.
pub struct MarkedGroup {
    name: String,
    rank: usize,
    oracle: Box<dyn KernelOracle>,
}

impl fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedGroup")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .finish()
    }
}

impl MarkedGroup {
    pub fn new(name: impl Into<String>, rank: usize, oracle: Box<dyn KernelOracle>) -> Self {
        MarkedGroup {
            name: name.into(),
            rank,
            oracle,
        }
    }

    pub fn from_fn<F>(name: impl Into<String>, rank: usize, f: F) -> Self
    where
        F: Fn(&Word) -> Result<bool> + 'static,
    {
        MarkedGroup::new(name, rank, Box::new(FnOracle(f)))
    }

    /// Like `from_fn`, but keys are normal forms in `sys`, whose relators
    /// must hold in the group.
    pub fn normalized<F>(name: impl Into<String>, sys: RewriteSystem, f: F) -> Self
    where
        F: Fn(&Word) -> Result<bool> + 'static,
    {
        let rank = sys.generators().len();
        MarkedGroup::new(name, rank, Box::new(NormalizedOracle { sys, test: f }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn oracle(&self) -> &dyn KernelOracle {
        self.oracle.as_ref()
    }

    /// Whether the free word `w` lies in the kernel.
    pub fn contains(&self, w: &Word) -> Result<bool> {
        let mut key = Word::empty();
        for &l in w.letters() {
            key = self.oracle.extend(&key, l);
        }
        self.oracle.contains(&key)
    }

    pub fn free(rank: usize) -> Self {
        MarkedGroup::from_fn(format!("F_{rank}"), rank, |w| Ok(w.is_empty()))
    }

    pub fn trivial(rank: usize) -> Self {
        MarkedGroup::from_fn("1", rank, |_| Ok(true))
    }

    /// A finite-state group decided by bisimulation.
    pub fn contracting(name: impl Into<String>, engine: Engine, sys: Option<RewriteSystem>) -> Self {
        match sys {
            Some(sys) => MarkedGroup::normalized(name, sys, move |w| engine.is_trivial(w)),
            None => {
                let rank = engine.recursion().rank();
                MarkedGroup::from_fn(name, rank, move |w| engine.is_trivial(w))
            }
        }
    }

    /// `G_0 / N_n` for a cover `G_0` with rewriting system `sys`.
    pub fn cover_quotient(cover: CoverPresentation, sys: RewriteSystem, n: usize) -> Self {
        let inner = sys.clone();
        MarkedGroup::normalized(format!("G_{n}"), sys, move |w| kernel_member(&cover, &inner, w, n))
    }

    /// `G_ω`, keyed by normal forms in `C2 ∗ V`.
    pub fn omega_limit(group: OmegaGroup, sys: RewriteSystem) -> Self {
        let name = format!("G_ω({})", group.omega());
        MarkedGroup::normalized(name, sys, move |w| group.is_trivial(w))
    }

    /// `G_{ω,n} = G_0 / N_{ω,n}`.
    pub fn omega_quotient(omega: OmegaSequence, sys: RewriteSystem, n: usize) -> Self {
        let inner = sys.clone();
        let name = format!("G_({omega}),{n}");
        MarkedGroup::normalized(name, sys, move |w| omega_kernel_member(&omega, w, n, &inner))
    }

    /// `F_2 / ker(φ^n ∘ p)` on the generators `s, t` of `BS(ℓ,m)`.
    pub fn bs_tower(l: i64, m: i64, n: usize) -> Result<Self> {
        HnnDatum::bs(l, m)?;
        Ok(MarkedGroup::from_fn(format!("BS({l},{m})/N_{n}"), 2, move |w| {
            bs_kernel_chain_member(l, m, w, n)
        }))
    }

    pub fn met(l: i64, m: i64) -> Result<Self> {
        met_eval(l, m, &Word::empty())?;
        Ok(MarkedGroup::from_fn(format!("Met({l},{m})"), 2, move |w| {
            Ok(met_eval(l, m, w)?.is_identity())
        }))
    }

    /// `A ≀ Z` with `A = Z` (`modulus` 0) or `Z/h`.
    pub fn wreath(modulus: u64) -> Self {
        let name = if modulus == 0 {
            "Z≀Z".to_string()
        } else {
            format!("Z/{modulus}≀Z")
        };
        MarkedGroup::from_fn(name, 2, move |w| Ok(wreath_eval(modulus, w).is_identity()))
    }

    /// The truncation `W_n`.
    pub fn w_n(n: usize) -> Self {
        let d = HnnDatum::w(n);
        MarkedGroup::from_fn(format!("W_{n}"), 2, move |w| Ok(britton_reduce(&d, w).is_trivial()))
    }
}

/// All freely reduced words of length at most `n` over `k` generators,
/// in shortlex order.
pub fn free_ball(k: usize, n: usize) -> Result<Vec<Word>> {
    if k == 0 {
        return Err(Error::invalid("rank must be at least 1"));
    }
    let size = free_ball_size(k, n);
    if size > MAX_BALL as u128 {
        return Err(Error::BudgetExceeded {
            what: "ball size",
            limit: MAX_BALL,
            frontier: n,
        });
    }
    let mut out = vec![Word::empty()];
    let mut start = 0;
    for _ in 0..n {
        let end = out.len();
        for i in start..end {
            for x in 0..2 * k {
                let l = Letter::from_index(x);
                if out[i].last() == Some(l.inverse()) {
                    continue;
                }
                let mut w = out[i].clone();
                w.push(l);
                out.push(w);
            }
        }
        start = end;
    }
    Ok(out)
}

/// `1 + Σ_{i=1..n} 2k(2k−1)^{i−1}`, saturating.
pub fn free_ball_size(k: usize, n: usize) -> u128 {
    let (k, mut sphere, mut total) = (k as u128, 0u128, 1u128);
    for i in 1..=n {
        sphere = if i == 1 {
            2 * k
        } else {
            sphere.saturating_mul(2 * k - 1)
        };
        total = total.saturating_add(sphere);
    }
    total
}

/// Largest `n` with identical kernel intersections on `B(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite {
        v: usize,
        radius: usize,
    },
    /// Full agreement through `radius`; never upgraded to infinity.
    AtLeast {
        radius: usize,
    },
}

impl Valuation {
    /// `v`, or the radius for full agreement.
    pub fn value(&self) -> usize {
        match *self {
            Valuation::Finite { v, .. } => v,
            Valuation::AtLeast { radius } => radius,
        }
    }

    pub fn radius(&self) -> usize {
        match *self {
            Valuation::Finite { radius, .. } | Valuation::AtLeast { radius } => radius,
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Valuation::AtLeast { .. })
    }

    /// `exp(−v)`, displayed as 0 on full agreement.
    pub fn distance(&self) -> f64 {
        match *self {
            Valuation::Finite { v, .. } => (-(v as f64)).exp(),
            Valuation::AtLeast { .. } => 0.0,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Valuation::Finite { v, .. } => write!(f, "{v}"),
            Valuation::AtLeast { radius } => write!(f, "≥ {radius}"),
        }
    }
}

struct Memo<'a> {
    oracle: &'a dyn KernelOracle,
    cache: HashMap<Word, bool>,
}

impl Memo<'_> {
    fn contains(&mut self, key: &Word) -> Result<bool> {
        if let Some(&b) = self.cache.get(key) {
            return Ok(b);
        }
        let b = self.oracle.contains(key)?;
        self.cache.insert(key.clone(), b);
        Ok(b)
    }
}

/// Valuations `v(A_i, B)` for every `A_i`, from a single depth-first scan
/// of `B(radius)` that stops descending once every row has found a
/// disagreement at or above the current depth.
pub fn valuations(rows: &[&MarkedGroup], limit: &MarkedGroup, radius: usize) -> Result<Vec<Valuation>> {
    let k = limit.rank();
    if k == 0 {
        return Err(Error::invalid("rank must be at least 1"));
    }
    if let Some(bad) = rows.iter().find(|g| g.rank() != k) {
        return Err(Error::invalid(format!(
            "rank mismatch: {} has rank {}, {} has rank {k}",
            bad.name(),
            bad.rank(),
            limit.name()
        )));
    }
    let mut memo: Vec<Memo> = rows
        .iter()
        .map(|g| g.oracle())
        .chain(std::iter::once(limit.oracle()))
        .map(|oracle| Memo {
            oracle,
            cache: HashMap::new(),
        })
        .collect();
    // best[i]: length of the shortest disagreement found for row i.
    let mut best = vec![usize::MAX; rows.len()];
    let start = vec![Word::empty(); rows.len() + 1];
    check(&mut memo, &start, 0, &mut best)?;
    // Nodes with equal keys have equal subtrees; skip repeats that are
    // not shallower than an earlier visit.
    let mut seen: HashMap<(Vec<Word>, Option<Letter>), usize> = HashMap::new();
    let mut stack: Vec<(Vec<Word>, Option<Letter>, usize)> = vec![(start, None, 0)];
    while let Some((keys, last, depth)) = stack.pop() {
        if depth >= radius {
            continue;
        }
        if seen.len() < MAX_SEEN {
            match seen.entry((keys.clone(), last)) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if *e.get() <= depth {
                        continue;
                    }
                    e.insert(depth);
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(depth);
                }
            }
        }
        for x in (0..2 * k).rev() {
            let l = Letter::from_index(x);
            if last == Some(l.inverse()) {
                continue;
            }
            // Only rows still open at this length can improve.
            if best.iter().all(|&b| b <= depth + 1) {
                break;
            }
            let next: Vec<Word> = keys.iter().zip(&memo).map(|(key, m)| m.oracle.extend(key, l)).collect();
            check(&mut memo, &next, depth + 1, &mut best)?;
            stack.push((next, Some(l), depth + 1));
        }
    }
    Ok(best
        .into_iter()
        .map(|b| {
            if b > radius {
                Valuation::AtLeast { radius }
            } else {
                Valuation::Finite { v: b - 1, radius }
            }
        })
        .collect())
}

fn check(memo: &mut [Memo], keys: &[Word], len: usize, best: &mut [usize]) -> Result<()> {
    let (rows, limit) = memo.split_at_mut(keys.len() - 1);
    let in_limit = limit[0].contains(&keys[keys.len() - 1])?;
    for (i, m) in rows.iter_mut().enumerate() {
        if best[i] > len && m.contains(&keys[i])? != in_limit {
            best[i] = len;
        }
    }
    Ok(())
}

/// `v(A, B)` scanned through `radius`.
pub fn valuation(a: &MarkedGroup, b: &MarkedGroup, radius: usize) -> Result<Valuation> {
    Ok(valuations(&[a], b, radius)?[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub name: String,
    pub valuation: Valuation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub limit: String,
    pub radius: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// `v` never decreases along the sequence.
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].valuation.value() <= w[1].valuation.value())
    }

    /// `v` goes up at least once.
    pub fn strictly_increases(&self) -> bool {
        self.rows
            .windows(2)
            .any(|w| w[0].valuation.value() < w[1].valuation.value())
    }

    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.name.chars().count())
            .max()
            .unwrap_or(1)
            .max(5);
        let mut out = format!("limit {}  radius {}\n", self.limit, self.radius);
        out += &format!("{:>3}  {:<width$}  {:>5}  {:>12}\n", "n", "group", "v", "d");
        for r in &self.rows {
            out += &format!(
                "{:>3}  {:<width$}  {:>5}  {:>12.6e}\n",
                r.n,
                r.name,
                r.valuation.to_string(),
                r.valuation.distance()
            );
        }
        out += &format!(
            "monotone: {}  strictly increases: {}\n",
            self.is_monotone(),
            self.strictly_increases()
        );
        out
    }

    /// Rows as `{n, v, d, radius}`; `v` is `null` on full agreement.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let v = match r.valuation {
                    Valuation::Finite { v, .. } => serde_json::json!(v),
                    Valuation::AtLeast { .. } => serde_json::Value::Null,
                };
                serde_json::json!({
                    "n": r.n,
                    "group": r.name,
                    "v": v,
                    "d": r.valuation.distance(),
                    "radius": self.radius,
                })
            })
            .collect();
        serde_json::json!({
            "limit": self.limit,
            "radius": self.radius,
            "monotone": self.is_monotone(),
            "strictly_increases": self.strictly_increases(),
            "rows": rows,
        })
    }
}

/// Valuations of a sequence against a limit; row `i` is labelled `n = i`.
pub fn converge_report(sequence: &[MarkedGroup], limit: &MarkedGroup, radius: usize) -> Result<ConvergenceReport> {
    let refs: Vec<&MarkedGroup> = sequence.iter().collect();
    let vals = valuations(&refs, limit, radius)?;
    Ok(ConvergenceReport {
        limit: limit.name().to_string(),
        radius,
        rows: sequence
            .iter()
            .zip(vals)
            .enumerate()
            .map(|(n, (g, valuation))| ConvergenceRow {
                n,
                name: g.name().to_string(),
                valuation,
            })
            .collect(),
    })
}
