use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::kernel::Permutation;

/// A finite-state tree automorphism stored as a minimal automaton whose
/// states are numbered breadth-first from the root (state 0).
///
/// Two elements are equal as tree automorphisms exactly when their
/// canonical automata coincide, so `Eq` and `Hash` decide group equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FsElement {
    degree: u32,
    perms: Vec<u16>,
    next: Vec<u32>,
}

impl FsElement {
    pub fn identity(degree: usize) -> Self {
        FsElement {
            degree: degree as u32,
            perms: (0..degree as u16).collect(),
            next: vec![0; degree],
        }
    }

    /// Canonical form of the automaton rooted at `root`. `perms` and `next`
    /// are flat `states × degree` tables.
    pub(crate) fn canonical(degree: usize, perms: &[u16], next: &[u32], root: usize) -> Self {
        let n = next.len() / degree;
        let class = minimize(degree, perms, next, n);
        let mut rep_state: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        let mut new_id: HashMap<u32, u32> = HashMap::new();
        new_id.insert(class[root], 0);
        rep_state.push(root);
        queue.push_back(root);
        while let Some(s) = queue.pop_front() {
            for x in 0..degree {
                let t = next[s * degree + x] as usize;
                let c = class[t];
                if let std::collections::hash_map::Entry::Vacant(e) = new_id.entry(c) {
                    e.insert(rep_state.len() as u32);
                    rep_state.push(t);
                    queue.push_back(t);
                }
            }
        }
        let m = rep_state.len();
        let mut out_perms = Vec::with_capacity(m * degree);
        let mut out_next = Vec::with_capacity(m * degree);
        for &s in &rep_state {
            out_perms.extend_from_slice(&perms[s * degree..(s + 1) * degree]);
            for x in 0..degree {
                out_next.push(new_id[&class[next[s * degree + x] as usize]]);
            }
        }
        FsElement {
            degree: degree as u32,
            perms: out_perms,
            next: out_next,
        }
    }

    /// Renumbers the sub-automaton rooted at `state`; minimality is inherited.
    pub fn sub(&self, state: usize) -> Self {
        if state == 0 {
            return self.clone();
        }
        let d = self.degree();
        let n = self.num_states();
        let mut id = vec![u32::MAX; n];
        let mut order = vec![state];
        id[state] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for x in 0..d {
                let t = self.next[s * d + x] as usize;
                if id[t] == u32::MAX {
                    id[t] = order.len() as u32;
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut perms = Vec::with_capacity(order.len() * d);
        let mut next = Vec::with_capacity(order.len() * d);
        for &s in &order {
            perms.extend_from_slice(&self.perms[s * d..(s + 1) * d]);
            for x in 0..d {
                next.push(id[self.next[s * d + x] as usize]);
            }
        }
        FsElement {
            degree: self.degree,
            perms,
            next,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn num_states(&self) -> usize {
        self.next.len() / self.degree()
    }

    pub fn is_identity(&self) -> bool {
        self.num_states() == 1 && self.perms.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    pub fn image(&self, state: usize, x: usize) -> usize {
        self.perms[state * self.degree() + x] as usize
    }

    pub fn child(&self, state: usize, x: usize) -> usize {
        self.next[state * self.degree() + x] as usize
    }

    pub fn root_permutation(&self) -> Permutation {
        self.state_permutation(0)
    }

    pub fn state_permutation(&self, state: usize) -> Permutation {
        let d = self.degree();
        Permutation::from_images_unchecked(
            self.perms[state * d..(state + 1) * d]
                .iter()
                .map(|&p| p as usize)
                .collect(),
        )
    }

    pub fn section(&self, x: usize) -> Self {
        self.sub(self.child(0, x))
    }

    /// Image of a vertex under the automorphism.
    pub fn act(&self, v: &[usize]) -> Vec<usize> {
        let mut s = 0;
        v.iter()
            .map(|&x| {
                let y = self.image(s, x);
                s = self.child(s, x);
                y
            })
            .collect()
    }

    /// `self · other` (apply `self` first). Fails when the reachable part of
    /// the pair automaton has more than `max_states` states.
    pub fn product(&self, other: &FsElement, max_states: usize) -> Result<Self> {
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        let d = self.degree();
        let nb = other.num_states() as u64;
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = vec![(0, 0)];
        index.insert(0, 0);
        let mut perms: Vec<u16> = Vec::new();
        let mut next: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let (p, q) = (p as usize, q as usize);
            for x in 0..d {
                let y = self.image(p, x);
                perms.push(other.image(q, y) as u16);
                let child = (self.child(p, x) as u32, other.child(q, y) as u32);
                let key = child.0 as u64 * nb + child.1 as u64;
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = pairs.len() as u32;
                        if pairs.len() >= max_states {
                            return Err(Error::BudgetExceeded {
                                what: "product automaton states",
                                limit: max_states,
                                frontier: pairs.len(),
                            });
                        }
                        index.insert(key, id);
                        pairs.push(child);
                        id
                    }
                };
                next.push(id);
            }
            i += 1;
        }
        Ok(FsElement::canonical(d, &perms, &next, 0))
    }

    pub fn inverse(&self) -> Self {
        let d = self.degree();
        let n = self.num_states();
        let mut perms = vec![0u16; n * d];
        let mut next = vec![0u32; n * d];
        for s in 0..n {
            for x in 0..d {
                let y = self.perms[s * d + x] as usize;
                perms[s * d + y] = x as u16;
                next[s * d + y] = self.next[s * d + x];
            }
        }
        FsElement::canonical(d, &perms, &next, 0)
    }

    /// States lying on a cycle or reachable from one; these are the
    /// sections occurring at arbitrarily deep levels.
    pub fn recurrent_states(&self) -> Vec<usize> {
        let d = self.degree();
        let n = self.num_states();
        let comp = tarjan(n, |s| (0..d).map(move |x| self.child(s, x)));
        let mut size = vec![0usize; n];
        for &c in &comp {
            size[c] += 1;
        }
        let mut rec = vec![false; n];
        let mut stack = Vec::new();
        for s in 0..n {
            let on_cycle = size[comp[s]] > 1 || (0..d).any(|x| self.child(s, x) == s);
            if on_cycle && !rec[s] {
                rec[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for x in 0..d {
                let t = self.child(s, x);
                if !rec[t] {
                    rec[t] = true;
                    stack.push(t);
                }
            }
        }
        (0..n).filter(|&s| rec[s]).collect()
    }

    pub(crate) fn raw(&self) -> (&[u16], &[u32]) {
        (&self.perms, &self.next)
    }
}

/// Moore partition refinement; returns the class of every state.
pub(crate) fn minimize(degree: usize, perms: &[u16], next: &[u32], n: usize) -> Vec<u32> {
    let mut class = vec![0u32; n];
    let mut ids: HashMap<&[u16], u32> = HashMap::new();
    for s in 0..n {
        let row = &perms[s * degree..(s + 1) * degree];
        let len = ids.len() as u32;
        class[s] = *ids.entry(row).or_insert(len);
    }
    let mut count = ids.len();
    let mut sig: Vec<u32> = Vec::with_capacity(degree + 1);
    loop {
        let mut table: HashMap<Vec<u32>, u32> = HashMap::with_capacity(count * 2);
        let mut refined = vec![0u32; n];
        for s in 0..n {
            sig.clear();
            sig.push(class[s]);
            for x in 0..degree {
                sig.push(class[next[s * degree + x] as usize]);
            }
            let len = table.len() as u32;
            refined[s] = match table.get(&sig) {
                Some(&c) => c,
                None => {
                    table.insert(sig.clone(), len);
                    len
                }
            };
        }
        let new_count = table.len();
        class = refined;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Iterative Tarjan; returns a component id per vertex.
pub(crate) fn tarjan<F, I>(n: usize, succ: F) -> Vec<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root).collect(), 0));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}
