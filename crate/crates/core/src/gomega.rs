//! The family `G_ω` indexed by sequences over `{0,1,2}`, restricted to
//! eventually periodic sequences so that every group is a finite
//! automaton group.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contraction::{Budget, Engine};
use crate::error::{Error, Result};
use crate::grig::{A, B, C, D};
use crate::kernel::{Generator, Letter, Permutation, Vertex, Word, WreathRecursion};
use crate::rewriting::RewriteSystem;

/// An eventually periodic sequence `preperiod · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaSequence {
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl OmegaSequence {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("the period must be nonempty"));
        }
        if preperiod.iter().chain(&period).any(|&s| s > 2) {
            return Err(Error::invalid("symbols must be 0, 1 or 2"));
        }
        Ok(OmegaSequence { preperiod, period })
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Number of distinct positions (shifts) the sequence can be in.
    pub fn positions(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// First symbol after `p` shifts.
    pub fn symbol(&self, p: usize) -> u8 {
        if p < self.preperiod.len() {
            self.preperiod[p]
        } else {
            let q = (p - self.preperiod.len()) % self.period.len();
            self.period[q]
        }
    }

    /// Position reached after one more shift, folded into the period.
    pub fn next_position(&self, p: usize) -> usize {
        if p + 1 < self.positions() {
            p + 1
        } else {
            self.preperiod.len()
        }
    }

    pub fn shift(&self) -> OmegaSequence {
        if let Some((_, rest)) = self.preperiod.split_first() {
            OmegaSequence {
                preperiod: rest.to_vec(),
                period: self.period.clone(),
            }
        } else {
            let mut p = self.period.clone();
            p.rotate_left(1);
            OmegaSequence {
                preperiod: Vec::new(),
                period: p,
            }
        }
    }

    /// Eventually constant.
    pub fn is_eventually_constant(&self) -> bool {
        self.period.iter().all(|&s| s == self.period[0])
    }

    /// Every symbol occurs infinitely often.
    pub fn has_all_symbols(&self) -> bool {
        (0..3u8).all(|s| self.period.contains(&s))
    }
}

impl FromStr for OmegaSequence {
    type Err = Error;

    /// `<preperiod>:<period>`, for example `:012` or `0:1`.
    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("expected `<preperiod>:<period>`, got `{s}`")))?;
        let digits = |t: &str| -> Result<Vec<u8>> {
            t.trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    '2' => Ok(2),
                    other => Err(Error::invalid(format!("bad symbol `{other}` in `{s}`"))),
                })
                .collect()
        };
        OmegaSequence::new(digits(pre)?, digits(per)?)
    }
}

impl fmt::Display for OmegaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.preperiod {
            write!(f, "{s}")?;
        }
        f.write_str(":")?;
        for s in &self.period {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Columns of the `β/γ/δ` table: whether `b`, `c`, `d` have section `a`
/// at letter 0 for the symbol `s`.
pub fn has_flip(generator: usize, symbol: u8) -> bool {
    match generator {
        B => symbol != 2,
        C => symbol != 1,
        D => symbol != 0,
        _ => false,
    }
}

/// A word over `a, b, c, d` read at a shift offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaElement {
    pub word: Word,
    pub offset: usize,
}

/// `G_ω` realized as an automaton group on the generators `a` and
/// `b_p, c_p, d_p` for every position `p` of the sequence.
#[derive(Clone, Debug)]
pub struct OmegaGroup {
    omega: OmegaSequence,
    recursion: WreathRecursion,
    engine: Engine,
}

impl OmegaGroup {
    pub fn new(omega: OmegaSequence, budget: Budget) -> Result<Self> {
        let recursion = omega_recursion(&omega);
        let engine = Engine::new(&recursion, budget)?;
        Ok(OmegaGroup {
            omega,
            recursion,
            engine,
        })
    }

    pub fn omega(&self) -> &OmegaSequence {
        &self.omega
    }

    pub fn recursion(&self) -> &WreathRecursion {
        &self.recursion
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    /// Index of `b_p`, `c_p`, `d_p` (or `a`) in the automaton recursion.
    fn letter_index(&self, g: usize, p: usize) -> usize {
        if g == A {
            0
        } else {
            1 + 3 * p + (g - 1)
        }
    }

    fn to_automaton(&self, e: &OmegaElement) -> Word {
        Word::from_letters(
            e.word
                .letters()
                .iter()
                .map(|l| Letter::new(self.letter_index(l.generator(), e.offset), l.is_inverse())),
        )
    }

    fn element_of_automaton_word(&self, w: &Word, offset: usize) -> OmegaElement {
        let word = Word::from_letters(w.letters().iter().map(|l| {
            let g = l.generator();
            let base = if g == 0 { A } else { 1 + (g - 1) % 3 };
            Letter::new(base, l.is_inverse())
        }));
        OmegaElement { word, offset }
    }

    pub fn section(&self, g: &OmegaElement, v: &Vertex) -> Result<OmegaElement> {
        let mut cur = self.to_automaton(g);
        let mut offset = g.offset;
        for &x in &v.0 {
            if x >= 2 {
                return Err(Error::LetterOutOfRange { letter: x, degree: 2 });
            }
            cur = self.recursion.section_at(&cur, x).0;
            offset = self.omega.next_position(offset);
        }
        Ok(self.element_of_automaton_word(&cur, offset))
    }

    pub fn act(&self, g: &Word, v: &Vertex) -> Result<Vertex> {
        self.recursion.act(
            &self.to_automaton(&OmegaElement {
                word: g.clone(),
                offset: 0,
            }),
            v,
        )
    }

    pub fn is_trivial(&self, g: &Word) -> Result<bool> {
        self.engine.is_trivial(&self.to_automaton(&OmegaElement {
            word: g.clone(),
            offset: 0,
        }))
    }

    pub fn are_equal(&self, g: &Word, h: &Word) -> Result<bool> {
        self.is_trivial(&g.mul(&h.inverse()))
    }
}

fn omega_recursion(omega: &OmegaSequence) -> WreathRecursion {
    let mut gens = vec![Generator {
        name: "a".into(),
        perm: Permutation::from_images(vec![1, 0]).expect("swap"),
        sections: vec![Word::empty(), Word::empty()],
    }];
    let a = Word::letter(Letter::pos(0));
    for p in 0..omega.positions() {
        let s = omega.symbol(p);
        let q = omega.next_position(p);
        for (k, g) in [B, C, D].into_iter().enumerate() {
            let first = if has_flip(g, s) { a.clone() } else { Word::empty() };
            gens.push(Generator {
                name: format!("{}{p}", ["b", "c", "d"][k]),
                perm: Permutation::identity(2),
                sections: vec![first, Word::letter(Letter::pos(1 + 3 * q + k))],
            });
        }
    }
    WreathRecursion::new(2, gens).expect("well-formed omega recursion")
}

pub fn omega_section(group: &OmegaGroup, g: &OmegaElement, v: &Vertex) -> Result<OmegaElement> {
    group.section(g, v)
}

pub fn omega_is_trivial(omega: &OmegaSequence, g: &Word, budget: Budget) -> Result<bool> {
    OmegaGroup::new(omega.clone(), budget)?.is_trivial(g)
}

/// The recursion `φ_i` on `C2 ∗ V`: `b ↦ (a^{β(i)}, b)` and so on,
/// `a ↦ (1,1)τ`.
pub fn phi_recursion(i: u8) -> WreathRecursion {
    let a = Word::letter(Letter::pos(A));
    let mut gens = vec![Generator {
        name: "a".into(),
        perm: Permutation::from_images(vec![1, 0]).expect("swap"),
        sections: vec![Word::empty(), Word::empty()],
    }];
    for (g, name) in [(B, "b"), (C, "c"), (D, "d")] {
        let first = if has_flip(g, i) { a.clone() } else { Word::empty() };
        gens.push(Generator {
            name: name.into(),
            perm: Permutation::identity(2),
            sections: vec![first, Word::letter(Letter::pos(g))],
        });
    }
    WreathRecursion::new(2, gens).expect("well-formed phi recursion")
}

/// Level-one image of `w` under `φ_i`: the two sections and the root
/// permutation.
pub fn phi_i_apply(i: u8, w: &Word) -> Result<(Word, Word, Permutation)> {
    if i > 2 {
        return Err(Error::invalid("phi index must be 0, 1 or 2"));
    }
    let r = phi_recursion(i);
    let (s0, _) = r.section_at(w, 0);
    let (s1, _) = r.section_at(w, 1);
    Ok((s0, s1, r.root_permutation(w)))
}

/// Membership in `N_{ω,n}`: apply `φ_{ω_1}, …, φ_{ω_n}` level by level,
/// reducing in `C2 ∗ V` after every step.
pub fn omega_kernel_member(omega: &OmegaSequence, w: &Word, n: usize, sys: &RewriteSystem) -> Result<bool> {
    let phis = [phi_recursion(0), phi_recursion(1), phi_recursion(2)];
    let mut level = vec![sys.normal_form(w)];
    let mut p = 0;
    for _ in 0..n {
        let r = &phis[omega.symbol(p) as usize];
        let mut next = Vec::with_capacity(level.len() * 2);
        for s in level.iter().filter(|s| !s.is_empty()) {
            for x in 0..2 {
                let (sec, y) = r.section_at(s, x);
                if y != x {
                    return Ok(false);
                }
                next.push(sys.normal_form(&sec));
            }
        }
        if next.len() > crate::kernel::DEFAULT_LEVEL_CAP {
            return Err(Error::LevelCap {
                level: n,
                size: next.len() as u128,
                cap: crate::kernel::DEFAULT_LEVEL_CAP,
            });
        }
        level = next;
        p = omega.next_position(p);
    }
    Ok(level.iter().all(|s| s.is_empty()))
}
