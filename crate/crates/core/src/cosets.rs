//! Todd–Coxeter coset enumeration (HLT with coincidence processing) and
//! ranks of free finite-index subgroups via Euler characteristics.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Letter, Word};
use crate::rewriting::Presentation;

pub const DEFAULT_MAX_COSETS: usize = 1 << 22;

/// A completed coset table, standardized so that cosets are numbered in
/// breadth-first order from the subgroup coset (coset 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTable {
    gens: Vec<String>,
    subgroup: Vec<Word>,
    action: Vec<Vec<usize>>,
    inverse_action: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.action.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn subgroup_generators(&self) -> &[Word] {
        &self.subgroup
    }

    /// Image of `coset` under generator `g`.
    pub fn act(&self, coset: usize, g: usize) -> usize {
        self.action[coset][g]
    }

    pub fn act_letter(&self, coset: usize, l: Letter) -> usize {
        if l.is_inverse() {
            self.inverse_action[coset][l.generator()]
        } else {
            self.action[coset][l.generator()]
        }
    }

    pub fn act_word(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.act_letter(c, l))
    }

    /// Every relator fixes every coset and every generator acts bijectively.
    pub fn is_consistent(&self, p: &Presentation) -> bool {
        let n = self.index();
        for g in 0..self.gens.len() {
            let mut seen = vec![false; n];
            for c in 0..n {
                let t = self.action[c][g];
                if seen[t] || self.inverse_action[t][g] != c {
                    return false;
                }
                seen[t] = true;
            }
        }
        p.relators().iter().all(|r| (0..n).all(|c| self.act_word(c, r) == c))
            && self.subgroup.iter().all(|w| self.act_word(0, w) == 0)
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.index();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for g in 0..self.gens.len() {
                for t in [self.action[c][g], self.inverse_action[c][g]] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `coset <i>: <gen>-><j> ...`, one line per coset, numbered from 1.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (c, row) in self.action.iter().enumerate() {
            let _ = write!(s, "coset {}:", c + 1);
            for (g, &t) in row.iter().enumerate() {
                let _ = write!(s, " {}->{}", self.gens[g], t + 1);
            }
            s.push('\n');
        }
        s
    }
}

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    defined: usize,
    live: usize,
    max_cosets: usize,
}

#[inline]
fn inv(col: usize) -> usize {
    col ^ 1
}

impl Enumerator {
    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.ncols + x] as usize
    }

    fn set(&mut self, c: usize, x: usize, v: usize) {
        self.table[c * self.ncols + x] = v as u32;
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] as usize != r {
            r = self.parent[r] as usize;
        }
        let mut c = c;
        while self.parent[c] as usize != r {
            let next = self.parent[c] as usize;
            self.parent[c] = r as u32;
            c = next;
        }
        r
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.defined >= self.max_cosets {
            return Err(Error::BudgetExceeded {
                what: "cosets",
                limit: self.max_cosets,
                frontier: self.live,
            });
        }
        self.defined += 1;
        self.live += 1;
        let d = self.defined;
        self.table.extend(std::iter::repeat_n(0, self.ncols));
        self.parent.push(d as u32);
        self.set(c, x, d);
        self.set(d, inv(x), c);
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo as u32;
        self.live -= 1;
        queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.get(g, x);
                if d == 0 {
                    continue;
                }
                self.set(d, inv(x), 0);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != 0 {
                    self.merge(nu, mx, &mut queue);
                    continue;
                }
                let nxi = self.get(nu, inv(x));
                if nxi != 0 {
                    self.merge(mu, nxi, &mut queue);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, inv(x), mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() - 1;
        loop {
            while i <= j && self.get(f, w[i]) != 0 {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i > j {
                if f != c {
                    self.coincidence(f, c);
                }
                return Ok(());
            }
            while j >= i && self.get(b, inv(w[j])) != 0 {
                b = self.get(b, inv(w[j]));
                if j == 0 {
                    // the whole word was traced backwards
                    self.coincidence(f, b);
                    return Ok(());
                }
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                self.set(f, w[i], b);
                self.set(b, inv(w[i]), f);
                return Ok(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.index()).collect()
}

/// HLT enumeration of the cosets of `⟨subgroup⟩` in the presented group.
pub fn enumerate(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable> {
    let k = p.rank();
    let ncols = 2 * k;
    let mut e = Enumerator {
        ncols,
        table: vec![0; 2 * ncols],
        parent: vec![0, 1],
        defined: 1,
        live: 1,
        max_cosets,
    };
    let rels: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    for w in subgroup {
        e.scan_and_fill(1, &columns(w))?;
    }
    let mut c = 1;
    while c <= e.defined {
        for r in &rels {
            if !e.is_live(c) {
                break;
            }
            e.scan_and_fill(c, r)?;
        }
        if e.is_live(c) {
            for x in 0..ncols {
                if e.get(c, x) == 0 {
                    e.define(c, x)?;
                }
            }
        }
        c += 1;
    }
    // standardize: breadth-first from coset 1 over columns in order
    let mut number = vec![usize::MAX; e.defined + 1];
    let mut order = vec![1usize];
    number[1] = 0;
    let mut i = 0;
    while i < order.len() {
        let c = order[i];
        for x in 0..ncols {
            let t = e.rep(e.get(c, x));
            if number[t] == usize::MAX {
                number[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let mut action = Vec::with_capacity(order.len());
    let mut inverse_action = Vec::with_capacity(order.len());
    for &c in &order {
        let mut row = Vec::with_capacity(k);
        let mut irow = Vec::with_capacity(k);
        for g in 0..k {
            row.push(number[e.rep(e.get(c, 2 * g))]);
            irow.push(number[e.rep(e.get(c, 2 * g + 1))]);
        }
        action.push(row);
        inverse_action.push(irow);
    }
    Ok(CosetTable {
        gens: p.generators().to_vec(),
        subgroup: subgroup.to_vec(),
        action,
        inverse_action,
    })
}

/// Free product of finite groups of the given orders and a free group of
/// rank `free_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeProductSignature<I> {
    pub factor_orders: Vec<I>,
    pub free_rank: I,
}

impl<I: Integer + Clone> FreeProductSignature<I> {
    pub fn new(factor_orders: Vec<I>, free_rank: I) -> Self {
        FreeProductSignature {
            factor_orders,
            free_rank,
        }
    }

    /// `χ = Σ 1/mᵢ − (r + f − 1)`.
    pub fn euler_characteristic(&self) -> Ratio<I> {
        let mut chi = Ratio::zero();
        let mut count = I::zero();
        for m in &self.factor_orders {
            chi = chi + Ratio::new(I::one(), m.clone());
            count = count + I::one();
        }
        chi - Ratio::from_integer(count + self.free_rank.clone() - I::one())
    }
}

/// Rank `x` of a free subgroup of the given index, from
/// `1 − x = index · χ`.
pub fn kernel_rank_free_product<I>(sig: &FreeProductSignature<I>, index: I) -> Result<I>
where
    I: Integer + Clone + Signed + std::fmt::Display,
{
    if index < I::one() {
        return Err(Error::invalid("index must be at least 1"));
    }
    if sig.factor_orders.iter().any(|m| *m < I::one() + I::one()) {
        return Err(Error::invalid("finite factors must have order at least 2"));
    }
    let x = Ratio::one() - Ratio::from_integer(index.clone()) * sig.euler_characteristic();
    if !x.is_integer() {
        return Err(Error::invalid(format!(
            "rank {} / {} is not an integer",
            x.numer(),
            x.denom()
        )));
    }
    let x = x.to_integer();
    if x.is_negative() {
        return Err(Error::invalid(format!("negative rank {x}")));
    }
    Ok(x)
}
