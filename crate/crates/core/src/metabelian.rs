//! Lamplighter-type wreath products `A ≀ Z`, HNN extensions with
//! Britton reduction (Baumslag–Solitar groups and the truncations
//! `W_n`), and the matrix groups `Met(ℓ,m)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{parse_word, Letter, Word};

pub const S: usize = 0;
pub const T: usize = 1;

pub fn names() -> Vec<String> {
    vec!["s".into(), "t".into()]
}

pub fn word(text: &str) -> Result<Word> {
    parse_word(text, &["s", "t"])
}

pub fn show(w: &Word) -> String {
    w.display(&["s", "t"]).to_string()
}

/// `[t^-1 s t, s]`, nontrivial in `BS(ℓ,m)` for `ℓ, m ≥ 2` but killed by `φ`.
pub fn non_hopf_witness() -> Word {
    let s = Word::letter(Letter::pos(S));
    Word::commutator(&s.conjugate_by(&Word::letter(Letter::pos(T))), &s)
}

/// Element of `A ≀ Z` with `A = Z` (modulus 0) or `A = Z/h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathElement {
    modulus: u64,
    map: BTreeMap<i64, i64>,
    shift: i64,
}

impl WreathElement {
    pub fn identity(modulus: u64) -> Self {
        WreathElement {
            modulus,
            map: BTreeMap::new(),
            shift: 0,
        }
    }

    /// `s = (δ_0, 0)`.
    pub fn s(modulus: u64) -> Self {
        let mut e = WreathElement::identity(modulus);
        e.add_at(0, 1);
        e
    }

    /// `t = (0, 1)`.
    pub fn t(modulus: u64) -> Self {
        WreathElement {
            shift: 1,
            ..WreathElement::identity(modulus)
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Nonzero values of the finitely supported map.
    pub fn support(&self) -> &BTreeMap<i64, i64> {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.map.is_empty()
    }

    fn add_at(&mut self, x: i64, v: i64) {
        let entry = self.map.entry(x).or_insert(0);
        *entry += v;
        if self.modulus > 0 {
            *entry = entry.rem_euclid(self.modulus as i64);
        }
        if *entry == 0 {
            self.map.remove(&x);
        }
    }

    /// `(f,m)(g,n) = (f + g(· − m), m + n)`.
    pub fn mul(&self, other: &WreathElement) -> WreathElement {
        let mut out = self.clone();
        for (&x, &v) in &other.map {
            out.add_at(x + self.shift, v);
        }
        out.shift += other.shift;
        out
    }

    pub fn inverse(&self) -> WreathElement {
        let mut out = WreathElement::identity(self.modulus);
        out.shift = -self.shift;
        for (&x, &v) in &self.map {
            out.add_at(x - self.shift, -v);
        }
        out
    }
}

impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {v}")?;
        }
        write!(f, "}} shift {}", self.shift)
    }
}

/// Image of a word over `{s,t}` in `A ≀ Z` (`modulus` 0 for `A = Z`).
pub fn wreath_eval(modulus: u64, w: &Word) -> WreathElement {
    let (s, t) = (WreathElement::s(modulus), WreathElement::t(modulus));
    let (si, ti) = (s.inverse(), t.inverse());
    let mut acc = WreathElement::identity(modulus);
    for l in w.letters() {
        let g = match (l.generator(), l.is_inverse()) {
            (S, false) => &s,
            (S, true) => &si,
            (_, false) => &t,
            (_, true) => &ti,
        };
        acc = acc.mul(g);
    }
    acc
}

/// HNN data with abelian base `Z^r`, stable letter `t` acting by
/// `t^-1 k t = ψ(k)` for `k ∈ K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HnnDatum {
    /// `BS(ℓ,m)`: base `⟨s⟩`, `K = ℓZ`, `L = mZ`, `ψ(s^ℓ) = s^m`.
    BaumslagSolitar { l: i64, m: i64 },
    /// `W_n`: base `⟨s_0,…,s_n⟩ ≅ Z^{n+1}`, `ψ(s_i) = s_{i+1}` on `⟨s_0,…,s_{n-1}⟩`.
    Truncation { n: usize },
}

impl HnnDatum {
    pub fn bs(l: i64, m: i64) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::invalid("BS(l,m) needs nonzero l and m"));
        }
        Ok(HnnDatum::BaumslagSolitar { l, m })
    }

    pub fn w(n: usize) -> Self {
        HnnDatum::Truncation { n }
    }

    pub fn base_rank(&self) -> usize {
        match *self {
            HnnDatum::BaumslagSolitar { .. } => 1,
            HnnDatum::Truncation { n } => n + 1,
        }
    }

    fn in_k(&self, h: &[BigInt]) -> bool {
        match *self {
            HnnDatum::BaumslagSolitar { l, .. } => h[0].is_multiple_of(&BigInt::from(l)),
            HnnDatum::Truncation { n } => h[n].is_zero(),
        }
    }

    fn in_l(&self, h: &[BigInt]) -> bool {
        match *self {
            HnnDatum::BaumslagSolitar { m, .. } => h[0].is_multiple_of(&BigInt::from(m)),
            HnnDatum::Truncation { .. } => h[0].is_zero(),
        }
    }

    fn psi(&self, h: &[BigInt]) -> Vec<BigInt> {
        match *self {
            HnnDatum::BaumslagSolitar { l, m } => vec![&h[0] / BigInt::from(l) * BigInt::from(m)],
            HnnDatum::Truncation { n } => {
                let mut out = vec![BigInt::zero(); n + 1];
                out[1..].clone_from_slice(&h[..n]);
                out
            }
        }
    }

    fn psi_inv(&self, h: &[BigInt]) -> Vec<BigInt> {
        match *self {
            HnnDatum::BaumslagSolitar { l, m } => vec![&h[0] / BigInt::from(m) * BigInt::from(l)],
            HnnDatum::Truncation { n } => {
                let mut out = vec![BigInt::zero(); n + 1];
                out[..n].clone_from_slice(&h[1..]);
                out
            }
        }
    }
}

impl fmt::Display for HnnDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HnnDatum::BaumslagSolitar { l, m } => write!(f, "BS({l},{m})"),
            HnnDatum::Truncation { n } => write!(f, "W_{n}"),
        }
    }
}

/// Pinch-free form `h_0 t^{e_1} h_1 … t^{e_k} h_k` with base elements
/// given as exponent vectors over the base generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrittonWord {
    pub bases: Vec<Vec<BigInt>>,
    pub stable: Vec<i8>,
}

impl BrittonWord {
    pub fn is_trivial(&self) -> bool {
        self.stable.is_empty() && self.bases[0].iter().all(Zero::is_zero)
    }

    /// Number of stable letters.
    pub fn t_length(&self) -> usize {
        self.stable.len()
    }
}

impl fmt::Display for BrittonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = |h: &[BigInt]| -> Vec<String> {
            let sub = h.len() > 1;
            h.iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(i, e)| {
                    let name = if sub { format!("s{i}") } else { "s".to_string() };
                    if e.is_one() {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect()
        };
        let mut parts = base(&self.bases[0]);
        for (e, h) in self.stable.iter().zip(&self.bases[1..]) {
            parts.push(if *e > 0 { "t".into() } else { "t^-1".into() });
            parts.extend(base(h));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Stack-based Britton reduction of a word over `{s, t}`; `s` is the
/// first base generator.
pub fn britton_reduce(datum: &HnnDatum, w: &Word) -> BrittonWord {
    let r = datum.base_rank();
    let mut bases = vec![vec![BigInt::zero(); r]];
    let mut stable: Vec<i8> = Vec::new();
    for l in w.letters() {
        if l.generator() == S {
            let top = bases.last_mut().expect("nonempty");
            top[0] += if l.is_inverse() { -1 } else { 1 };
            continue;
        }
        let e: i8 = if l.is_inverse() { -1 } else { 1 };
        let top = bases.last().expect("nonempty");
        let pinch = match stable.last() {
            Some(&prev) if prev == -e => {
                if e > 0 {
                    datum.in_k(top).then(|| datum.psi(top))
                } else {
                    datum.in_l(top).then(|| datum.psi_inv(top))
                }
            }
            _ => None,
        };
        match pinch {
            Some(h) => {
                bases.pop();
                stable.pop();
                let below = bases.last_mut().expect("nonempty");
                for (x, y) in below.iter_mut().zip(h) {
                    *x += y;
                }
            }
            None => {
                stable.push(e);
                bases.push(vec![BigInt::zero(); r]);
            }
        }
    }
    BrittonWord { bases, stable }
}

/// `n`-fold substitution `s ↦ s^ℓ`, `t ↦ t`.
pub fn bs_phi(w: &Word, l: i64, n: usize) -> Word {
    let images = [Word::letter(Letter::pos(S)).pow(l), Word::letter(Letter::pos(T))];
    let mut out = w.clone();
    for _ in 0..n {
        out = out.substitute(&images);
    }
    out
}

/// `w ∈ ker(φ^n ∘ p)`: `φ^n(w)` is trivial in `BS(ℓ,m)`.
pub fn bs_kernel_chain_member(l: i64, m: i64, w: &Word, n: usize) -> Result<bool> {
    let datum = HnnDatum::bs(l, m)?;
    Ok(britton_reduce(&datum, &bs_phi(w, l, n)).is_trivial())
}

/// 2×2 matrix over a commutative ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix2<T> {
    pub entries: [[T; 2]; 2],
}

impl<T> Matrix2<T>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Matrix2 {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn identity() -> Self {
        Matrix2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn is_identity(&self) -> bool
    where
        T: PartialEq,
    {
        *self == Matrix2::identity()
    }

    pub fn determinant(&self) -> T {
        let [[a, b], [c, d]] = self.entries.clone();
        a * d - b * c
    }

    pub fn mul(&self, o: &Matrix2<T>) -> Matrix2<T> {
        let e = |i: usize, j: usize| {
            self.entries[i][0].clone() * o.entries[0][j].clone() + self.entries[i][1].clone() * o.entries[1][j].clone()
        };
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// Inverse over a field; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix2<T>>
    where
        T: std::ops::Div<Output = T> + Neg<Output = T> + PartialEq,
    {
        let det = self.determinant();
        if det.is_zero() {
            return None;
        }
        let [[a, b], [c, d]] = self.entries.clone();
        Some(Matrix2::new(
            d / det.clone(),
            -b / det.clone(),
            -c / det.clone(),
            a / det,
        ))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

pub type RationalMatrix2 = Matrix2<BigRational>;

/// Generator images `μ(s) = [[1,1],[0,1]]`, `μ(t) = [[ℓ/m,0],[0,1]]`.
pub fn met_generators(l: i64, m: i64) -> Result<[RationalMatrix2; 2]> {
    if l <= 0 || m <= 0 || l.gcd(&m) != 1 || (l == 1 && m == 1) {
        return Err(Error::invalid("Met(l,m) needs coprime positive l, m, not both 1"));
    }
    let one = BigRational::one;
    let zero = BigRational::zero;
    let s = Matrix2::new(one(), one(), zero(), one());
    let r = BigRational::new(BigInt::from(l), BigInt::from(m));
    let t = Matrix2::new(r, zero(), zero(), one());
    Ok([s, t])
}

pub fn met_eval(l: i64, m: i64, w: &Word) -> Result<RationalMatrix2> {
    let gens = met_generators(l, m)?;
    let invs = [
        gens[0].inverse().expect("invertible"),
        gens[1].inverse().expect("invertible"),
    ];
    let mut acc = Matrix2::identity();
    for l in w.letters() {
        let g = if l.is_inverse() {
            &invs[l.generator()]
        } else {
            &gens[l.generator()]
        };
        acc = acc.mul(g);
    }
    Ok(acc)
}

/// Length of `φ^n(w)` without building it, saturating.
pub fn bs_phi_length(w: &Word, l: i64, n: usize) -> u128 {
    let (mut s_count, mut t_count) = (0u128, 0u128);
    for x in w.letters() {
        if x.generator() == S {
            s_count += 1;
        } else {
            t_count += 1;
        }
    }
    s_count.saturating_mul((l.unsigned_abs() as u128).saturating_pow(n as u32)) + t_count
}
