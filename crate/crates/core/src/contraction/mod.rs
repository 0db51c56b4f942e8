//! Exact equality of finite-state elements, the word problem for
//! contracting recursions, nuclei and self-replication.

mod automaton;
mod nucleus;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

pub use automaton::FsElement;
pub use nucleus::{
    is_contracting, is_self_replicating_level1, nucleus, nucleus_with, ContractionCertificate, Nucleus,
    SelfReplication, Witness,
};

use crate::error::{Error, Result};
use crate::kernel::{Letter, Permutation, Word, WreathRecursion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_states: usize,
    pub max_depth: usize,
    pub max_word_length: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 10_000,
            max_depth: 64,
            max_word_length: 4_096,
        }
    }
}

/// Evaluates words of a recursion as canonical finite-state elements.
#[derive(Clone, Debug)]
pub struct Engine {
    rec: WreathRecursion,
    letters: Vec<FsElement>,
    budget: Budget,
}

impl Engine {
    pub fn new(rec: &WreathRecursion, budget: Budget) -> Result<Self> {
        let letters = letter_automata(rec, budget.max_states)?;
        Ok(Engine {
            rec: rec.clone(),
            letters,
            budget,
        })
    }

    pub fn recursion(&self) -> &WreathRecursion {
        &self.rec
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn identity(&self) -> FsElement {
        FsElement::identity(self.rec.degree())
    }

    pub fn letter(&self, l: Letter) -> &FsElement {
        &self.letters[l.index()]
    }

    pub fn product(&self, a: &FsElement, b: &FsElement) -> Result<FsElement> {
        a.product(b, self.budget.max_states)
    }

    pub fn element(&self, w: &Word) -> Result<FsElement> {
        if w.len() > self.budget.max_word_length {
            return Err(Error::BudgetExceeded {
                what: "word length",
                limit: self.budget.max_word_length,
                frontier: w.len(),
            });
        }
        self.element_of(w.letters())
    }

    fn element_of(&self, letters: &[Letter]) -> Result<FsElement> {
        match letters.len() {
            0 => Ok(self.identity()),
            1 => Ok(self.letters[letters[0].index()].clone()),
            n => {
                let (l, r) = letters.split_at(n / 2);
                let a = self.element_of(l)?;
                let b = self.element_of(r)?;
                self.product(&a, &b)
            }
        }
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.element(w)?.is_identity())
    }

    pub fn are_equal(&self, g: &Word, h: &Word) -> Result<bool> {
        if g == h {
            return Ok(true);
        }
        self.is_trivial(&g.mul(&h.inverse()))
    }
}

/// Builds the automata of all letters `s` and `s⁻¹` from the closure of
/// section words, merging states by bisimulation.
fn letter_automata(rec: &WreathRecursion, max_states: usize) -> Result<Vec<FsElement>> {
    let d = rec.degree();
    let mut index: HashMap<Word, u32> = HashMap::new();
    let mut words: Vec<Word> = Vec::new();
    let mut roots = Vec::new();
    for g in 0..rec.rank() {
        for inv in [false, true] {
            let w = Word::letter(Letter::new(g, inv));
            let id = *index.entry(w.clone()).or_insert_with(|| {
                words.push(w.clone());
                (words.len() - 1) as u32
            });
            roots.push(id as usize);
        }
    }
    let mut perms: Vec<u16> = Vec::new();
    let mut next: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let w = words[i].clone();
        for x in 0..d {
            let (s, y) = rec.section_at(&w, x);
            perms.push(y as u16);
            let id = match index.get(&s) {
                Some(&id) => id,
                None => {
                    if words.len() >= max_states {
                        return Err(Error::BudgetExceeded {
                            what: "generator section closure",
                            limit: max_states,
                            frontier: words.len(),
                        });
                    }
                    let id = words.len() as u32;
                    index.insert(s.clone(), id);
                    words.push(s);
                    id
                }
            };
            next.push(id);
        }
        i += 1;
    }
    Ok(roots
        .into_iter()
        .map(|r| FsElement::canonical(d, &perms, &next, r))
        .collect())
}

/// The finite section closure of a set of words, with bisimilar states
/// merged. State 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionAutomaton {
    degree: usize,
    reps: Vec<Word>,
    next: Vec<usize>,
    perms: Vec<Permutation>,
    seeds: Vec<usize>,
}

impl SectionAutomaton {
    pub fn num_states(&self) -> usize {
        self.reps.len()
    }

    pub fn identity_state(&self) -> usize {
        0
    }

    pub fn representative(&self, state: usize) -> &Word {
        &self.reps[state]
    }

    pub fn representatives(&self) -> &[Word] {
        &self.reps
    }

    pub fn transition(&self, state: usize, x: usize) -> usize {
        self.next[state * self.degree + x]
    }

    pub fn output(&self, state: usize) -> &Permutation {
        &self.perms[state]
    }

    /// State reached by each seed, in input order.
    pub fn seed_states(&self) -> &[usize] {
        &self.seeds
    }
}

/// Section closure of `seeds`, plus the identity state.
pub fn section_closure(rec: &WreathRecursion, seeds: &[Word], budget: Budget) -> Result<SectionAutomaton> {
    let engine = Engine::new(rec, budget)?;
    section_closure_with(&engine, seeds)
}

pub fn section_closure_with(engine: &Engine, seeds: &[Word]) -> Result<SectionAutomaton> {
    let rec = engine.recursion();
    let d = rec.degree();
    let elems: Vec<FsElement> = seeds.iter().map(|w| engine.element(w)).collect::<Result<_>>()?;
    // disjoint union with the identity at offset 0
    let mut perms: Vec<u16> = (0..d as u16).collect();
    let mut next: Vec<u32> = vec![0; d];
    let mut offsets = Vec::new();
    for e in &elems {
        let off = next.len() / d;
        offsets.push(off);
        let (p, n) = e.raw();
        perms.extend_from_slice(p);
        next.extend(n.iter().map(|&t| t + off as u32));
    }
    let total = next.len() / d;
    if total > engine.budget().max_states {
        return Err(Error::BudgetExceeded {
            what: "section closure states",
            limit: engine.budget().max_states,
            frontier: total,
        });
    }
    let class = automaton::minimize(d, &perms, &next, total);
    let mut id: HashMap<u32, usize> = HashMap::new();
    let mut reps: Vec<Word> = Vec::new();
    let mut rep_state: Vec<usize> = Vec::new();
    id.insert(class[0], 0);
    reps.push(Word::empty());
    rep_state.push(0);
    let mut seed_states = Vec::new();
    for (k, w) in seeds.iter().enumerate() {
        let root = offsets[k];
        let mut queue = VecDeque::new();
        let sid = *id.entry(class[root]).or_insert_with(|| {
            reps.push(w.clone());
            rep_state.push(root);
            reps.len() - 1
        });
        if reps[sid].shortlex_cmp(w).is_gt() {
            reps[sid] = w.clone();
        }
        seed_states.push(sid);
        queue.push_back((root, w.clone()));
        let mut seen = vec![false; total];
        seen[root] = true;
        while let Some((s, word)) = queue.pop_front() {
            for x in 0..d {
                let t = next[s * d + x] as usize;
                let (sec, _) = rec.section_at(&word, x);
                let tid = match id.get(&class[t]) {
                    Some(&tid) => {
                        if reps[tid].shortlex_cmp(&sec).is_gt() {
                            reps[tid] = sec.clone();
                        }
                        tid
                    }
                    None => {
                        reps.push(sec.clone());
                        rep_state.push(t);
                        id.insert(class[t], reps.len() - 1);
                        reps.len() - 1
                    }
                };
                let _ = tid;
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back((t, sec));
                }
            }
        }
    }
    let n = reps.len();
    let mut out_next = Vec::with_capacity(n * d);
    let mut out_perms = Vec::with_capacity(n);
    for &s in &rep_state {
        out_perms.push(Permutation::from_images_unchecked(
            perms[s * d..(s + 1) * d].iter().map(|&p| p as usize).collect(),
        ));
        for x in 0..d {
            out_next.push(id[&class[next[s * d + x] as usize]]);
        }
    }
    Ok(SectionAutomaton {
        degree: d,
        reps,
        next: out_next,
        perms: out_perms,
        seeds: seed_states,
    })
}

pub fn are_equal(rec: &WreathRecursion, g: &Word, h: &Word, budget: Budget) -> Result<bool> {
    Engine::new(rec, budget)?.are_equal(g, h)
}

pub fn is_trivial(rec: &WreathRecursion, g: &Word, budget: Budget) -> Result<bool> {
    Engine::new(rec, budget)?.is_trivial(g)
}
