//! Ball sizes `γ(n)` by breadth-first search with oracle deduplication,
//! and descriptive growth indicators.

use std::collections::HashMap;
use std::hash::Hash;
use std::time::Instant;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::contraction::{Engine, FsElement};
use crate::error::{Error, Result};
use crate::kernel::{Letter, Word, WreathRecursion};
use crate::metabelian::{self, met_generators, RationalMatrix2, WreathElement};

/// Default cap on the number of distinct elements enumerated.
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 23;

/// Equality of group elements built up letter by letter.
///
/// `key` is a fingerprint: equal elements must have equal keys. When keys
/// are not a complete invariant, `equal` confirms merges between words
/// sharing a key.
pub trait EqualityOracle {
    type Key: Clone + Eq + Hash;

    fn identity(&self) -> Self::Key;

    fn extend(&self, key: &Self::Key, l: Letter) -> Result<Self::Key>;

    fn equal(&self, _a: &Word, _b: &Word) -> Result<bool> {
        Ok(true)
    }
}

/// Free group: freely reduced words are normal forms.
#[derive(Clone, Copy, Debug)]
pub struct FreeOracle;

impl EqualityOracle for FreeOracle {
    type Key = Word;

    fn identity(&self) -> Word {
        Word::empty()
    }

    fn extend(&self, key: &Word, l: Letter) -> Result<Word> {
        let mut k = key.clone();
        k.push(l);
        Ok(k)
    }
}

/// Finite-state elements compared by bisimulation (canonical automata).
#[derive(Clone, Debug)]
pub struct BisimulationOracle<'a> {
    pub engine: &'a Engine,
}

impl EqualityOracle for BisimulationOracle<'_> {
    type Key = FsElement;

    fn identity(&self) -> FsElement {
        self.engine.identity()
    }

    fn extend(&self, key: &FsElement, l: Letter) -> Result<FsElement> {
        self.engine.product(key, self.engine.letter(l))
    }
}

/// Elements compared by their action on level `depth` of the tree.
/// Exact only for groups acting faithfully on that finite level; used as
/// an independent cross-check of bisimulation.
#[derive(Clone, Debug)]
pub struct LevelOracle {
    letters: Vec<Vec<u32>>,
    size: usize,
}

impl LevelOracle {
    pub fn new(rec: &WreathRecursion, depth: usize) -> Result<Self> {
        let size = rec
            .degree()
            .checked_pow(depth as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or(Error::LevelCap {
                level: depth,
                size: (rec.degree() as u128).saturating_pow(depth as u32),
                cap: 1 << 24,
            })?;
        let mut letters = Vec::new();
        for g in 0..rec.rank() {
            for inv in [false, true] {
                let w = Word::letter(Letter::new(g, inv));
                let p = rec.level_permutation_capped(&w, depth, 1 << 24)?;
                letters.push(p.images().iter().map(|&x| x as u32).collect());
            }
        }
        Ok(LevelOracle { letters, size })
    }
}

impl EqualityOracle for LevelOracle {
    type Key = Vec<u32>;

    fn identity(&self) -> Vec<u32> {
        (0..self.size as u32).collect()
    }

    fn extend(&self, key: &Vec<u32>, l: Letter) -> Result<Vec<u32>> {
        let p = &self.letters[l.index()];
        Ok(key.iter().map(|&x| p[x as usize]).collect())
    }
}

/// Oracle from a normal-form function on words.
pub struct NormalFormOracle<F>(pub F);

impl<F: Fn(&Word) -> Result<Word>> EqualityOracle for NormalFormOracle<F> {
    type Key = Word;

    fn identity(&self) -> Word {
        Word::empty()
    }

    fn extend(&self, key: &Word, l: Letter) -> Result<Word> {
        let mut k = key.clone();
        k.push(l);
        (self.0)(&k)
    }
}

/// `A ≀ Z` by exact evaluation.
#[derive(Clone, Copy, Debug)]
pub struct WreathOracle {
    pub modulus: u64,
}

impl EqualityOracle for WreathOracle {
    type Key = WreathElement;

    fn identity(&self) -> WreathElement {
        WreathElement::identity(self.modulus)
    }

    fn extend(&self, key: &WreathElement, l: Letter) -> Result<WreathElement> {
        let g = match l.generator() {
            metabelian::S => WreathElement::s(self.modulus),
            metabelian::T => WreathElement::t(self.modulus),
            g => return Err(Error::invalid(format!("generator {g} out of range"))),
        };
        Ok(key.mul(&if l.is_inverse() { g.inverse() } else { g }))
    }
}

/// `Met(ℓ,m)` by exact rational matrices.
#[derive(Clone, Debug)]
pub struct MatrixOracle {
    letters: Vec<RationalMatrix2>,
}

impl MatrixOracle {
    pub fn new(l: i64, m: i64) -> Result<Self> {
        let [s, t] = met_generators(l, m)?;
        let inv = |x: &RationalMatrix2| x.inverse().ok_or_else(|| Error::invalid("singular generator"));
        let letters = vec![s.clone(), inv(&s)?, t.clone(), inv(&t)?];
        Ok(MatrixOracle { letters })
    }
}

impl EqualityOracle for MatrixOracle {
    type Key = RationalMatrix2;

    fn identity(&self) -> RationalMatrix2 {
        RationalMatrix2::identity()
    }

    fn extend(&self, key: &RationalMatrix2, l: Letter) -> Result<RationalMatrix2> {
        let g = self
            .letters
            .get(l.index())
            .ok_or_else(|| Error::invalid(format!("letter {} out of range", l.index())))?;
        Ok(key.mul(g))
    }
}

/// Keys from a homomorphic image, merges confirmed by an exact test
/// `equal(a, b)`.
pub struct FingerprintOracle<O, F> {
    pub image: O,
    pub equal: F,
}

impl<O: EqualityOracle, F: Fn(&Word, &Word) -> Result<bool>> EqualityOracle for FingerprintOracle<O, F> {
    type Key = O::Key;

    fn identity(&self) -> O::Key {
        self.image.identity()
    }

    fn extend(&self, key: &O::Key, l: Letter) -> Result<O::Key> {
        self.image.extend(key, l)
    }

    fn equal(&self, a: &Word, b: &Word) -> Result<bool> {
        (self.equal)(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub name: String,
    pub generators: usize,
    pub gamma: Vec<u64>,
    pub elapsed_ms: Vec<f64>,
}

impl GrowthTable {
    pub fn is_submultiplicative(&self) -> bool {
        let g = &self.gamma;
        (0..g.len()).all(|m| (0..g.len() - m).all(|n| g[m + n] as u128 <= g[m] as u128 * g[n] as u128))
    }

    pub fn is_monotone(&self) -> bool {
        self.gamma.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gamma,elapsed_ms\n");
        for (n, (g, t)) in self.gamma.iter().zip(&self.elapsed_ms).enumerate() {
            out += &format!("{n},{g},{t:.3}\n");
        }
        out
    }
}

/// `γ(0..=n_max)` for the generating set `generators` (each used with
/// its inverse). Representatives are the shortlex-least words found.
pub fn ball_sizes<O: EqualityOracle>(
    name: &str,
    oracle: &O,
    generators: &[usize],
    n_max: usize,
    max_elements: usize,
) -> Result<GrowthTable> {
    let letters: Vec<Letter> = generators
        .iter()
        .flat_map(|&g| [Letter::pos(g), Letter::neg(g)])
        .collect();
    let start = Instant::now();
    let mut classes: HashMap<O::Key, Vec<usize>> = HashMap::new();
    let mut words: Vec<Word> = vec![Word::empty()];
    let mut keys: Vec<O::Key> = vec![oracle.identity()];
    classes.insert(oracle.identity(), vec![0]);
    let mut gamma = vec![1u64];
    let mut elapsed_ms = vec![start.elapsed().as_secs_f64() * 1e3];
    let mut frontier = 0..1;
    for _ in 0..n_max {
        let begin = words.len();
        for i in frontier.clone() {
            for &l in &letters {
                if words[i].last() == Some(l.inverse()) {
                    continue;
                }
                let key = oracle.extend(&keys[i], l)?;
                let mut w = words[i].clone();
                w.push(l);
                let bucket = classes.entry(key.clone()).or_default();
                let mut known = false;
                for &j in bucket.iter() {
                    if oracle.equal(&words[j], &w)? {
                        known = true;
                        break;
                    }
                }
                if known {
                    continue;
                }
                if words.len() >= max_elements {
                    return Err(Error::BudgetExceeded {
                        what: "ball elements",
                        limit: max_elements,
                        frontier: words.len(),
                    });
                }
                bucket.push(words.len());
                words.push(w);
                keys.push(key);
            }
        }
        frontier = begin..words.len();
        gamma.push(words.len() as u64);
        elapsed_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(GrowthTable {
        name: name.to_string(),
        generators: generators.len(),
        gamma,
        elapsed_ms,
    })
}

/// Least-squares line `y = slope·x + intercept` with coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit<F> {
    pub slope: F,
    pub intercept: F,
    pub r2: F,
}

pub fn linear_fit<F: Float>(xs: &[F], ys: &[F]) -> Option<LinearFit<F>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = F::from(xs.len())?;
    let mx = xs.iter().fold(F::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(F::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
        syy = syy + (y - my) * (y - my);
    }
    if sxx.is_zero() {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy.is_zero() {
        F::one()
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Descriptive indicators; finite data never decides the growth type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthIndicator {
    PolynomialLike,
    ExponentialLike,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub name: String,
    /// Slope of `log γ(n)` against `log n`.
    pub degree: Option<LinearFit<f64>>,
    /// Slope of `log γ(n)` against `n`.
    pub rate: Option<LinearFit<f64>>,
    /// Last ratio `log γ(n) / n`, an upper bound trend for the rate.
    pub root_ratio: Option<f64>,
    pub indicator: GrowthIndicator,
    pub note: String,
}

/// Fits over the upper half of the table (`n ≥ 1`) to limit small-`n`
/// distortion.
pub fn growth_probe(table: &GrowthTable) -> Result<GrowthReport> {
    if table.gamma.is_empty() {
        return Err(Error::invalid("empty growth table"));
    }
    let pts: Vec<(f64, f64)> = table
        .gamma
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &g)| (n as f64, (g as f64).ln()))
        .collect();
    let tail = &pts[pts.len() / 2..];
    let ns: Vec<f64> = tail.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let degree = linear_fit(&log_ns, &logs);
    let rate = linear_fit(&ns, &logs);
    let root_ratio = pts.last().map(|&(n, l)| l / n);
    let indicator = match (degree, rate) {
        (Some(d), Some(r)) if d.r2 >= r.r2 && d.r2 > 0.999 => GrowthIndicator::PolynomialLike,
        (Some(d), Some(r)) if r.r2 > d.r2 && r.r2 > 0.999 => GrowthIndicator::ExponentialLike,
        _ => GrowthIndicator::Undetermined,
    };
    Ok(GrowthReport {
        name: table.name.clone(),
        degree,
        rate,
        root_ratio,
        indicator,
        note: "descriptive only: finite ball sizes cannot determine the growth type".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::tests::{rec, GRIGORCHUK};
    use crate::contraction::Budget;

    #[test]
    fn integers_and_free_groups() {
        let z = ball_sizes("Z", &FreeOracle, &[0], 6, 1000).unwrap();
        assert_eq!(z.gamma, vec![1, 3, 5, 7, 9, 11, 13]);
        let f2 = ball_sizes("F2", &FreeOracle, &[0, 1], 3, 1000).unwrap();
        assert_eq!(f2.gamma, vec![1, 5, 17, 53]);
        assert!(f2.is_submultiplicative() && f2.is_monotone());
        assert!(ball_sizes("F2", &FreeOracle, &[0, 1], 8, 100).unwrap_err().is_budget());
    }

    #[test]
    fn probes() {
        let z = ball_sizes("Z", &FreeOracle, &[0], 12, 1000).unwrap();
        let rz = growth_probe(&z).unwrap();
        assert_eq!(rz.indicator, GrowthIndicator::PolynomialLike);
        assert!((rz.degree.unwrap().slope - 1.0).abs() < 0.1);
        let f2 = ball_sizes("F2", &FreeOracle, &[0, 1], 9, 1 << 20).unwrap();
        let rf = growth_probe(&f2).unwrap();
        assert_eq!(rf.indicator, GrowthIndicator::ExponentialLike);
        assert!((rf.rate.unwrap().slope - 3f64.ln()).abs() < 0.01);
        assert!(z.to_csv().starts_with("n,gamma,elapsed_ms\n0,1,"));
    }

    #[test]
    fn grigorchuk_dual_oracles() {
        let r = rec(GRIGORCHUK);
        let e = Engine::new(&r, Budget::default()).unwrap();
        let a = ball_sizes("G", &BisimulationOracle { engine: &e }, &[0, 1, 2, 3], 6, 1 << 20).unwrap();
        let b = ball_sizes("G", &LevelOracle::new(&r, 6).unwrap(), &[0, 1, 2, 3], 6, 1 << 20).unwrap();
        assert_eq!(a.gamma, b.gamma);
        assert_eq!(&a.gamma[..4], &[1, 5, 11, 23]);
        assert!(a.is_submultiplicative());
    }

    #[test]
    fn fit_degenerate() {
        assert!(linear_fit::<f64>(&[1.0], &[2.0]).is_none());
        let f = linear_fit(&[0.0f32, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-6 && (f.intercept - 1.0).abs() < 1e-6);
    }

    #[test]
    fn metabelian_oracles() {
        use crate::metabelian::{britton_reduce, HnnDatum};
        let met = ball_sizes("Met(1,2)", &MatrixOracle::new(1, 2).unwrap(), &[0, 1], 6, 1 << 16).unwrap();
        let d = HnnDatum::bs(1, 2).unwrap();
        let bs = FingerprintOracle {
            image: MatrixOracle::new(1, 2).unwrap(),
            equal: |a: &Word, b: &Word| Ok(britton_reduce(&d, &a.mul(&b.inverse())).is_trivial()),
        };
        let bs = ball_sizes("BS(1,2)", &bs, &[0, 1], 6, 1 << 16).unwrap();
        assert_eq!(met.gamma, bs.gamma);
        assert_eq!(&met.gamma[..3], &[1, 5, 17]);
        let z = ball_sizes("Z wr Z", &WreathOracle { modulus: 0 }, &[0, 1], 4, 1 << 16).unwrap();
        let free = ball_sizes("F2", &FreeOracle, &[0, 1], 4, 1 << 16).unwrap();
        // [s, t s t^-1] has length 8, so the balls agree up to radius 3
        assert_eq!(&z.gamma[..4], &free.gamma[..4]);
    }
}
