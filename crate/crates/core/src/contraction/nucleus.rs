use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Budget, Engine, FsElement};
use crate::error::{Error, Result};
use crate::kernel::{Letter, Permutation, Word, WreathRecursion};

/// The nucleus with its section, permutation, inverse and partial
/// multiplication tables. Element 0 is the identity; the rest are sorted by
/// their shortlex-least known representative word.
#[derive(Clone, Debug)]
pub struct Nucleus {
    degree: usize,
    elements: Vec<FsElement>,
    reps: Vec<Word>,
    sections: Vec<Vec<usize>>,
    perms: Vec<Permutation>,
    inverse: Vec<usize>,
    products: Vec<Vec<Option<usize>>>,
    index: HashMap<FsElement, usize>,
}

impl Nucleus {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self, i: usize) -> &FsElement {
        &self.elements[i]
    }

    pub fn representative(&self, i: usize) -> &Word {
        &self.reps[i]
    }

    pub fn representatives(&self) -> &[Word] {
        &self.reps
    }

    pub fn section(&self, i: usize, x: usize) -> usize {
        self.sections[i][x]
    }

    pub fn permutation(&self, i: usize) -> &Permutation {
        &self.perms[i]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Index of `n_i · n_j` when that product lies in the nucleus.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.products[i][j]
    }

    pub fn index_of(&self, e: &FsElement) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &FsElement) -> bool {
        self.index.contains_key(e)
    }

    pub fn show(&self, names: &[String]) -> Vec<String> {
        self.reps.iter().map(|w| w.display(names).to_string()).collect()
    }
}

/// One word per state of `e`, obtained as word-level sections of `root`
/// along breadth-first paths, keeping the shortlex-least candidate.
fn state_words(rec: &WreathRecursion, e: &FsElement, root: &Word) -> Vec<Word> {
    let n = e.num_states();
    let mut words: Vec<Option<Word>> = vec![None; n];
    words[0] = Some(root.clone());
    let mut queue = VecDeque::from([0usize]);
    let mut done = vec![false; n];
    while let Some(s) = queue.pop_front() {
        if done[s] {
            continue;
        }
        done[s] = true;
        let w = words[s].clone().expect("queued states have words");
        for x in 0..e.degree() {
            let t = e.child(s, x);
            let (sec, _) = rec.section_at(&w, x);
            let better = match &words[t] {
                None => true,
                Some(old) => !done[t] && old.shortlex_cmp(&sec).is_gt(),
            };
            if better {
                words[t] = Some(sec);
            }
            if !done[t] {
                queue.push_back(t);
            }
        }
    }
    words.into_iter().map(|w| w.unwrap_or_default()).collect()
}

struct Builder {
    elements: Vec<FsElement>,
    reps: Vec<Word>,
    index: HashMap<FsElement, usize>,
}

impl Builder {
    fn add(&mut self, e: FsElement, rep: Word) -> bool {
        match self.index.get(&e) {
            Some(&i) => {
                if self.reps[i].shortlex_cmp(&rep).is_gt() {
                    self.reps[i] = rep;
                }
                false
            }
            None => {
                self.index.insert(e.clone(), self.elements.len());
                self.elements.push(e);
                self.reps.push(rep);
                true
            }
        }
    }

    fn add_recurrent(&mut self, rec: &WreathRecursion, e: &FsElement, rep: &Word) -> usize {
        let words = state_words(rec, e, rep);
        let mut added = 0;
        for s in e.recurrent_states() {
            if self.add(e.sub(s), words[s].clone()) {
                added += 1;
            }
        }
        added
    }
}

/// Fixed point of "products of pairs, then keep the recurrent part",
/// started from the recurrent parts of the generators and their inverses.
pub fn nucleus(rec: &WreathRecursion, budget: Budget) -> Result<Nucleus> {
    let engine = Engine::new(rec, budget)?;
    nucleus_with(&engine)
}

pub fn nucleus_with(engine: &Engine) -> Result<Nucleus> {
    let rec = engine.recursion();
    let budget = engine.budget();
    let mut b = Builder {
        elements: Vec::new(),
        reps: Vec::new(),
        index: HashMap::new(),
    };
    b.add(engine.identity(), Word::empty());
    for g in 0..rec.rank() {
        for inv in [false, true] {
            let l = Letter::new(g, inv);
            b.add_recurrent(rec, engine.letter(l), &Word::letter(l));
        }
    }
    let mut done = 0usize;
    let mut rounds = 0;
    loop {
        let n = b.elements.len();
        if n > budget.max_states {
            return Err(Error::BudgetExceeded {
                what: "nucleus size",
                limit: budget.max_states,
                frontier: n,
            });
        }
        rounds += 1;
        if rounds > budget.max_depth {
            return Err(Error::BudgetExceeded {
                what: "nucleus rounds",
                limit: budget.max_depth,
                frontier: n,
            });
        }
        let mut added = 0;
        for i in 0..n {
            for j in 0..n {
                if i < done && j < done {
                    continue;
                }
                let p = engine.product(&b.elements[i], &b.elements[j])?;
                let rep = b.reps[i].mul(&b.reps[j]);
                added += b.add_recurrent(rec, &p, &rep);
            }
        }
        done = n;
        if added == 0 {
            break;
        }
    }
    finish(engine, b)
}

fn finish(engine: &Engine, b: Builder) -> Result<Nucleus> {
    let d = engine.recursion().degree();
    let mut order: Vec<usize> = (1..b.elements.len()).collect();
    order.sort_by(|&i, &j| b.reps[i].shortlex_cmp(&b.reps[j]));
    order.insert(0, 0);
    let elements: Vec<FsElement> = order.iter().map(|&i| b.elements[i].clone()).collect();
    let reps: Vec<Word> = order.iter().map(|&i| b.reps[i].clone()).collect();
    let index: HashMap<FsElement, usize> = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let missing = |what: &str| Error::invalid(format!("nucleus not closed under {what}"));
    let mut sections = Vec::with_capacity(elements.len());
    let mut perms = Vec::with_capacity(elements.len());
    let mut inverse = Vec::with_capacity(elements.len());
    for e in &elements {
        let row = (0..d)
            .map(|x| index.get(&e.section(x)).copied().ok_or_else(|| missing("sections")))
            .collect::<Result<Vec<_>>>()?;
        sections.push(row);
        perms.push(e.root_permutation());
        inverse.push(index.get(&e.inverse()).copied().ok_or_else(|| missing("inverses"))?);
    }
    let mut products = Vec::with_capacity(elements.len());
    for a in &elements {
        let row = elements
            .iter()
            .map(|c| Ok(index.get(&engine.product(a, c)?).copied()))
            .collect::<Result<Vec<_>>>()?;
        products.push(row);
    }
    Ok(Nucleus {
        degree: d,
        elements,
        reps,
        sections,
        perms,
        inverse,
        products,
        index,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub nucleus_size: usize,
    /// Largest level at which a section of a product of two nucleus
    /// elements can still lie outside the nucleus.
    pub depth: usize,
}

/// Either a certificate or `BudgetExceeded`; never a definite "no".
pub fn is_contracting(rec: &WreathRecursion, budget: Budget) -> Result<ContractionCertificate> {
    let engine = Engine::new(rec, budget)?;
    let nuc = nucleus_with(&engine)?;
    let mut depth = 0;
    for i in 0..nuc.len() {
        for j in 0..nuc.len() {
            let p = engine.product(nuc.element(i), nuc.element(j))?;
            depth = depth.max(escape_depth(&p, &nuc));
        }
    }
    if depth > budget.max_depth {
        return Err(Error::BudgetExceeded {
            what: "contraction depth",
            limit: budget.max_depth,
            frontier: depth,
        });
    }
    Ok(ContractionCertificate {
        nucleus_size: nuc.len(),
        depth,
    })
}

/// Length of the longest path of states outside the nucleus starting at
/// the root. Such states are never recurrent, so the paths form a DAG.
fn escape_depth(e: &FsElement, nuc: &Nucleus) -> usize {
    let n = e.num_states();
    let inside: Vec<bool> = (0..n).map(|s| nuc.contains(&e.sub(s))).collect();
    let mut memo: Vec<Option<usize>> = vec![None; n];
    fn go(s: usize, e: &FsElement, inside: &[bool], memo: &mut Vec<Option<usize>>) -> usize {
        if inside[s] {
            return 0;
        }
        if let Some(v) = memo[s] {
            return v;
        }
        let mut best = 0;
        for x in 0..e.degree() {
            best = best.max(go(e.child(s, x), e, inside, memo));
        }
        memo[s] = Some(best + 1);
        best + 1
    }
    go(0, e, &inside, &mut memo)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub letter: usize,
    pub element: usize,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfReplication {
    Yes(Vec<Witness>),
    CounterexampleUnknown {
        unresolved: Vec<(usize, usize)>,
        witnesses: Vec<Witness>,
    },
}

impl SelfReplication {
    pub fn holds(&self) -> bool {
        matches!(self, SelfReplication::Yes(_))
    }
}

/// Breadth-first search over group elements for `h` fixing `x` with
/// `h_x = n` for every letter `x` and nucleus element `n`.
pub fn is_self_replicating_level1(rec: &WreathRecursion, nuc: &Nucleus, budget: Budget) -> Result<SelfReplication> {
    let engine = Engine::new(rec, budget)?;
    let d = rec.degree();
    let wanted = d * nuc.len();
    let mut found: HashMap<(usize, usize), Word> = HashMap::new();
    let mut seen: HashSet<FsElement> = HashSet::new();
    let id = engine.identity();
    seen.insert(id.clone());
    let mut frontier = vec![(id, Word::empty())];
    let letters: Vec<Letter> = (0..rec.rank()).flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut length = 0;
    loop {
        for (e, w) in &frontier {
            for x in 0..d {
                if e.image(0, x) != x {
                    continue;
                }
                if let Some(i) = nuc.index_of(&e.section(x)) {
                    found.entry((x, i)).or_insert_with(|| w.clone());
                }
            }
        }
        if found.len() == wanted || length >= budget.max_depth || seen.len() >= budget.max_states {
            break;
        }
        let mut next = Vec::new();
        for (e, w) in &frontier {
            for &l in &letters {
                if w.last() == Some(l.inverse()) {
                    continue;
                }
                let p = engine.product(e, engine.letter(l))?;
                if seen.insert(p.clone()) {
                    let mut nw = w.clone();
                    nw.push(l);
                    next.push((p, nw));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
        length += 1;
    }
    let mut witnesses: Vec<Witness> = found
        .into_iter()
        .map(|((letter, element), word)| Witness { letter, element, word })
        .collect();
    witnesses.sort_by_key(|w| (w.letter, w.element));
    if witnesses.len() == wanted {
        Ok(SelfReplication::Yes(witnesses))
    } else {
        let have: HashSet<(usize, usize)> = witnesses.iter().map(|w| (w.letter, w.element)).collect();
        let unresolved = (0..d)
            .flat_map(|x| (0..nuc.len()).map(move |i| (x, i)))
            .filter(|p| !have.contains(p))
            .collect();
        Ok(SelfReplication::CounterexampleUnknown { unresolved, witnesses })
    }
}
