//! Randomized property suites shared by the `properties` and `acceptance`
//! targets. Each suite runs a deterministic proptest runner and returns
//! the first minimized failure as text.

#![allow(dead_code)]

use std::fmt::Debug;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use contracta::catalog::{entry, load, Group, SELF_SIMILAR};
use contracta::contraction::{nucleus_with, Engine, Nucleus};
use contracta::cosets::enumerate;
use contracta::covers::{kernel_member, universal_cover, CoverPresentation};
use contracta::gomega::{has_flip, omega_is_trivial, omega_kernel_member, OmegaElement, OmegaGroup, OmegaSequence};
use contracta::grig::{self, c2_free_v, psi0_image};
use contracta::growth::{ball_sizes, BisimulationOracle, GrowthTable, MatrixOracle, WreathOracle};
use contracta::markedgroups::{converge_report, valuation, MarkedGroup, Valuation};
use contracta::metabelian::{britton_reduce, bs_kernel_chain_member, met_eval, wreath_eval, HnnDatum};
use contracta::rewriting::{complete, CompletionBudget, Presentation, RewriteSystem};
use contracta::{Letter, Vertex, Word, WreathRecursion};

pub type SuiteFn = fn(u32) -> Result<(), String>;

pub const DEFAULT_CASES: u32 = 10_000;

/// `PROPTEST_CASES` overrides the default of 10 000.
pub fn cases() -> u32 {
    std::env::var("PROPTEST_CASES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_CASES)
}

pub const SUITES: &[(&str, SuiteFn)] = &[
    ("right-action law", right_action_law),
    ("section composition", section_composition),
    ("product sections", product_sections),
    ("inverse sections", inverse_sections),
    ("composition law", composition_law),
    ("bisimulation congruence", bisimulation_congruence),
    ("equality implies level permutations", equality_level_permutations),
    ("nucleus closure", nucleus_closure),
    ("relator consistency", relator_consistency),
    ("brute-force action agreement", brute_force_agreement),
    ("rewrite termination", rewrite_termination),
    ("rewrite confluence", rewrite_confluence),
    ("rewrite soundness", rewrite_soundness),
    ("kernel nesting", kernel_nesting),
    ("kernel recursion", kernel_recursion),
    ("cover diagram", cover_diagram),
    ("kernel soundness", kernel_soundness),
    ("coset tables", coset_tables),
    ("psi0 sections", psi0_sections),
    ("omega relations", omega_relations),
    ("omega conjugation", omega_conjugation),
    ("omega specialization", omega_specialization),
    ("omega kernel nesting", omega_kernel_nesting),
    ("valuation ultrametric", valuation_ultrametric),
    ("valuation symmetry", valuation_symmetry),
    ("chain monotonicity", chain_monotonicity),
    ("wreath homomorphism", wreath_homomorphism),
    ("BS(1,m) agreement", bs_met_agreement),
    ("BS kernel tower", bs_kernel_tower),
    ("growth submultiplicativity", growth_submultiplicativity),
    ("dual-oracle agreement", dual_oracle_agreement),
];

pub fn suite(name: &str) -> SuiteFn {
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .unwrap_or_else(|| panic!("no suite `{name}`"))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
    F: Fn(S::Value) -> std::result::Result<(), TestCaseError>,
{
    match runner(cases).run(&strategy, test) {
        Ok(()) => Ok(()),
        Err(TestError::Fail(why, value)) => Err(format!("{why} for {value:?}")),
        Err(TestError::Abort(why)) => Err(format!("aborted: {why}")),
    }
}

/// Lifts library errors into test failures.
fn ok<T>(r: contracta::Result<T>) -> std::result::Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

// ---------------------------------------------------------------- fixtures

pub struct Fixture {
    pub name: &'static str,
    pub group: Group,
    pub nucleus: Nucleus,
    pub relators: Vec<Word>,
    /// Unpruned nucleus cover with a complete rewriting system.
    pub cover: CoverPresentation,
    pub sys: RewriteSystem,
}

impl Fixture {
    pub fn rec(&self) -> &WreathRecursion {
        self.group.recursion().expect("self-similar")
    }

    pub fn engine(&self) -> &Engine {
        self.group.engine().expect("self-similar")
    }

    /// Smallest level on which every nontrivial word of length at most
    /// 12 acts nontrivially (checked by the brute-force suite).
    pub fn separating_depth(&self) -> usize {
        if self.name == "basilica" {
            9
        } else {
            6
        }
    }
}

pub fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        SELF_SIMILAR
            .iter()
            .map(|&name| {
                let group = load(name).expect("catalog");
                let nucleus = nucleus_with(group.engine().unwrap()).expect("contracting");
                let relators = entry(name).unwrap().fact_words("relators").unwrap();
                let cover = universal_cover(&nucleus, group.recursion().unwrap().names(), false);
                let sys = complete(cover.presentation(), CompletionBudget::default()).expect("complete");
                Fixture {
                    name,
                    group,
                    nucleus,
                    relators,
                    cover,
                    sys,
                }
            })
            .collect()
    })
}

fn grigorchuk() -> &'static Fixture {
    &fixtures()[0]
}

fn c2v_system() -> &'static RewriteSystem {
    static CELL: OnceLock<RewriteSystem> = OnceLock::new();
    CELL.get_or_init(|| complete(&c2_free_v(), CompletionBudget::default()).unwrap())
}

// -------------------------------------------------------------- strategies

pub fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

pub fn vertex(degree: usize, max_len: usize) -> impl Strategy<Value = Vertex> {
    prop::collection::vec(0..degree, 0..=max_len).prop_map(Vertex)
}

/// A catalog group index with a word.
fn group_word(max_len: usize) -> impl Strategy<Value = (usize, Word)> {
    (0..fixtures().len()).prop_flat_map(move |i| (Just(i), word(fixtures()[i].rec().rank(), max_len)))
}

fn group_words2(max_len: usize) -> impl Strategy<Value = (usize, Word, Word)> {
    (0..fixtures().len()).prop_flat_map(move |i| {
        let k = fixtures()[i].rec().rank();
        (Just(i), word(k, max_len), word(k, max_len))
    })
}

/// A product of up to three conjugated catalog relators.
fn trivial_word(i: usize) -> impl Strategy<Value = Word> {
    let f = &fixtures()[i];
    let k = f.rec().rank();
    let n = f.relators.len();
    prop::collection::vec((0..n, word(k, 4), any::<bool>()), 1..=3).prop_map(move |parts| {
        let mut w = Word::empty();
        for (r, c, inv) in parts {
            let mut r = fixtures()[i].relators[r].clone();
            if inv {
                r = r.inverse();
            }
            w = w.mul(&c.mul(&r).mul(&c.inverse()));
        }
        w
    })
}

fn omega_sequence() -> impl Strategy<Value = OmegaSequence> {
    (
        prop::collection::vec(0u8..3, 0..=3),
        prop::collection::vec(0u8..3, 1..=4),
    )
        .prop_map(|(pre, period)| OmegaSequence::new(pre, period).expect("valid"))
}

fn cover_word(i: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(fixtures()[i].cover.generators().len(), max_len)
}

/// Cover words that often lie in a level kernel: random words, conjugated
/// commutators of squares, and powers.
fn kernel_candidate(i: usize) -> impl Strategy<Value = Word> {
    let k = fixtures()[i].cover.generators().len();
    prop_oneof![
        word(k, 10),
        (word(k, 3), word(k, 3), word(k, 3))
            .prop_map(|(x, y, c)| { Word::commutator(&x.pow(2), &y.pow(2)).conjugate_by(&c) }),
        (word(k, 3), 1i64..=8).prop_map(|(x, e)| x.pow(e)),
    ]
}

// ------------------------------------------------------------ tree kernel

fn right_action_law(cases: u32) -> Result<(), String> {
    let s =
        group_words2(8).prop_flat_map(|(i, g, h)| (Just(i), Just(g), Just(h), vertex(fixtures()[i].rec().degree(), 6)));
    check(cases, s, |(i, g, h, v)| {
        let rec = fixtures()[i].rec();
        let lhs = ok(rec.act(&h, &ok(rec.act(&g, &v))?))?;
        prop_assert_eq!(lhs, ok(rec.act(&g.mul(&h), &v))?);
        Ok(())
    })
}

fn section_composition(cases: u32) -> Result<(), String> {
    let s = group_word(8).prop_flat_map(|(i, g)| {
        let d = fixtures()[i].rec().degree();
        (Just(i), Just(g), vertex(d, 4), vertex(d, 4))
    });
    check(cases, s, |(i, g, v, w)| {
        let f = &fixtures()[i];
        let mut vw = v.0.clone();
        vw.extend(&w.0);
        let direct = ok(f.rec().section(&g, &Vertex(vw)))?;
        let nested = ok(f.rec().section(&ok(f.rec().section(&g, &v))?, &w))?;
        prop_assert!(ok(f.engine().are_equal(&direct, &nested))?);
        Ok(())
    })
}

fn product_sections(cases: u32) -> Result<(), String> {
    let s =
        group_words2(8).prop_flat_map(|(i, g, h)| (Just(i), Just(g), Just(h), vertex(fixtures()[i].rec().degree(), 5)));
    check(cases, s, |(i, g, h, v)| {
        let f = &fixtures()[i];
        let rec = f.rec();
        let lhs = ok(rec.section(&g.mul(&h), &v))?;
        let rhs = ok(rec.section(&g, &v))?.mul(&ok(rec.section(&h, &ok(rec.act(&g, &v))?))?);
        prop_assert!(ok(f.engine().are_equal(&lhs, &rhs))?);
        Ok(())
    })
}

fn inverse_sections(cases: u32) -> Result<(), String> {
    let s = group_word(10).prop_flat_map(|(i, g)| (Just(i), Just(g), vertex(fixtures()[i].rec().degree(), 5)));
    check(cases, s, |(i, g, v)| {
        let f = &fixtures()[i];
        let rec = f.rec();
        let gi = g.inverse();
        let lhs = ok(rec.section(&gi, &v))?;
        let rhs = ok(rec.section(&g, &ok(rec.act(&gi, &v))?))?.inverse();
        prop_assert!(ok(f.engine().are_equal(&lhs, &rhs))?);
        Ok(())
    })
}

fn composition_law(cases: u32) -> Result<(), String> {
    let s = (group_word(8), 0usize..=2, 0usize..=2);
    check(cases, s, |((i, g), m, n)| {
        let rec = fixtures()[i].rec();
        let d = rec.degree();
        let (all, perm) = ok(rec.iterate_recursion(&g, m + n))?;
        let (outer, outer_perm) = ok(rec.iterate_recursion(&g, n))?;
        let dm = d.pow(m as u32);
        for (u, sec) in outer.iter().enumerate() {
            let (inner, inner_perm) = ok(rec.iterate_recursion(sec, m))?;
            for (v, s) in inner.iter().enumerate() {
                let idx = u * dm + v;
                prop_assert_eq!(&all[idx], s);
                prop_assert_eq!(perm.apply(idx), outer_perm.apply(u) * dm + inner_perm.apply(v));
            }
        }
        Ok(())
    })
}

fn bisimulation_congruence(cases: u32) -> Result<(), String> {
    let s = (0..fixtures().len()).prop_flat_map(|i| {
        let k = fixtures()[i].rec().rank();
        (Just(i), word(k, 6), word(k, 6), trivial_word(i))
    });
    check(cases, s, |(i, g, k, t)| {
        let e = fixtures()[i].engine();
        let h = g.mul(&t);
        prop_assert!(ok(e.are_equal(&g, &h))?);
        prop_assert!(ok(e.are_equal(&h, &g))?);
        prop_assert!(ok(e.are_equal(&g.mul(&k), &h.mul(&k)))?);
        prop_assert!(ok(e.are_equal(&k.mul(&g), &k.mul(&h)))?);
        prop_assert_eq!(ok(e.are_equal(&g, &k))?, ok(e.are_equal(&h, &k))?);
        Ok(())
    })
}

fn equality_level_permutations(cases: u32) -> Result<(), String> {
    let s = (0..fixtures().len()).prop_flat_map(|i| {
        let k = fixtures()[i].rec().rank();
        (
            Just(i),
            word(k, 6),
            prop_oneof![trivial_word(i), word(k, 6)],
            0usize..=5,
        )
    });
    check(cases, s, |(i, g, t, n)| {
        let f = &fixtures()[i];
        let h = g.mul(&t);
        if ok(f.engine().are_equal(&g, &h))? {
            prop_assert_eq!(
                ok(f.rec().level_permutation(&g, n))?,
                ok(f.rec().level_permutation(&h, n))?
            );
        }
        Ok(())
    })
}

fn nucleus_closure(cases: u32) -> Result<(), String> {
    let s = group_word(10).prop_flat_map(|(i, g)| {
        let f = &fixtures()[i];
        (Just(i), Just(g), 0..f.nucleus.len(), 0..f.rec().degree())
    });
    check(cases, s, |(i, g, j, x)| {
        let f = &fixtures()[i];
        let nuc = &f.nucleus;
        let n = nuc.element(j);
        prop_assert!(nuc.contains(&n.section(x)));
        prop_assert!(nuc.contains(&n.inverse()));
        let e = ok(f.engine().element(&g))?;
        for s in e.recurrent_states() {
            prop_assert!(nuc.contains(&e.sub(s)), "recurrent state {} of {}", s, f.group.show(&g));
        }
        Ok(())
    })
}

fn relator_consistency(cases: u32) -> Result<(), String> {
    let s = (0..fixtures().len()).prop_flat_map(|i| (Just(i), trivial_word(i)));
    check(cases, s, |(i, w)| {
        prop_assert!(ok(fixtures()[i].engine().is_trivial(&w))?);
        Ok(())
    })
}

fn brute_force_agreement(cases: u32) -> Result<(), String> {
    check(cases, group_word(12), |(i, w)| {
        let f = &fixtures()[i];
        let trivial = ok(f.engine().is_trivial(&w))?;
        let acts = !ok(f.rec().level_permutation(&w, f.separating_depth()))?.is_identity();
        prop_assert_eq!(trivial, !acts, "{} in {}", f.group.show(&w), f.name);
        Ok(())
    })
}

// -------------------------------------------------------------- rewriting

fn systems() -> &'static [(String, RewriteSystem)] {
    static CELL: OnceLock<Vec<(String, RewriteSystem)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out: Vec<(String, RewriteSystem)> = fixtures()
            .iter()
            .map(|f| (f.cover.presentation().to_string(), f.sys.clone()))
            .collect();
        for (g, r) in [
            (&["a", "b"][..], &["a^2", "b^3", "(ab)^5"][..]),
            (&["a", "b"][..], &["a^3", "b^3", "(ab)^2"][..]),
            (
                &["a", "b", "c"][..],
                &["a^2", "b^2", "c^2", "(ab)^3", "(bc)^3", "(ac)^2"][..],
            ),
        ] {
            let p = Presentation::from_names(g, r).unwrap();
            out.push((p.to_string(), complete(&p, CompletionBudget::default()).unwrap()));
        }
        out
    })
}

fn system_words(max_len: usize) -> impl Strategy<Value = (usize, Word, Word)> {
    (0..systems().len()).prop_flat_map(move |i| {
        let k = systems()[i].1.generators().len();
        (Just(i), word(k, max_len), word(k, max_len))
    })
}

fn rewrite_termination(cases: u32) -> Result<(), String> {
    for (name, sys) in systems() {
        for r in sys.rules() {
            if r.lhs.shortlex_cmp(&r.rhs) != std::cmp::Ordering::Greater {
                return Err(format!("rule {:?} does not decrease in {name}", r));
            }
        }
    }
    check(cases, system_words(14), |(i, u, _)| {
        let sys = &systems()[i].1;
        let nf = sys.normal_form(&u);
        prop_assert!(nf.len() <= u.len());
        prop_assert_eq!(sys.normal_form(&nf), nf);
        Ok(())
    })
}

fn rewrite_confluence(cases: u32) -> Result<(), String> {
    check(cases, system_words(10), |(i, u, v)| {
        let sys = &systems()[i].1;
        prop_assert!(sys.is_complete());
        let direct = sys.normal_form(&u.mul(&v));
        let split = sys.normal_form(&sys.normal_form(&u).mul(&sys.normal_form(&v)));
        prop_assert_eq!(&direct, &split);
        let mut inc = sys.normal_form(&u);
        for &l in v.letters() {
            inc = sys.append(&inc, l);
        }
        prop_assert_eq!(&inc, &direct);
        prop_assert!(sys.normal_form(&u.mul(&u.inverse())).is_empty());
        Ok(())
    })
}

fn rewrite_soundness(cases: u32) -> Result<(), String> {
    let c2v = c2_free_v();
    let rels: Vec<Word> = c2v.relators().to_vec();
    let built = prop::collection::vec((0..rels.len(), word(4, 4)), 1..=3).prop_map(move |parts| {
        parts
            .into_iter()
            .fold(Word::empty(), |w, (r, c)| w.mul(&rels[r].conjugate_by(&c)))
    });
    let s = (prop_oneof![word(4, 12), built], word(4, 6));
    check(cases, s, |(w, x)| {
        let sys = c2v_system();
        let e = grigorchuk().engine();
        let w = w.mul(&sys.normal_form(&x)).mul(&x.inverse());
        let nf = sys.normal_form(&w);
        prop_assert!(ok(e.are_equal(&w, &nf))?);
        if nf.is_empty() {
            prop_assert!(ok(e.is_trivial(&w))?);
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- covers

fn cover_case() -> impl Strategy<Value = (usize, Word, usize)> {
    (0..fixtures().len()).prop_flat_map(|i| (Just(i), kernel_candidate(i), 0usize..=3))
}

fn kernel_nesting(cases: u32) -> Result<(), String> {
    check(cases, cover_case(), |(i, w, n)| {
        let f = &fixtures()[i];
        if ok(kernel_member(&f.cover, &f.sys, &w, n))? {
            prop_assert!(ok(kernel_member(&f.cover, &f.sys, &w, n + 1))?);
        }
        Ok(())
    })
}

fn kernel_recursion(cases: u32) -> Result<(), String> {
    check(cases, cover_case(), |(i, w, n)| {
        let f = &fixtures()[i];
        let n = n + 1;
        let rec = f.cover.recursion();
        let mut expected = rec.root_permutation(&w).is_identity();
        if expected {
            for x in 0..rec.degree() {
                let (s, _) = rec.section_at(&w, x);
                expected &= ok(kernel_member(&f.cover, &f.sys, &s, n - 1))?;
            }
        }
        prop_assert_eq!(ok(kernel_member(&f.cover, &f.sys, &w, n))?, expected);
        Ok(())
    })
}

fn cover_diagram(cases: u32) -> Result<(), String> {
    let s =
        (0..fixtures().len()).prop_flat_map(|i| (Just(i), cover_word(i, 6), vertex(fixtures()[i].rec().degree(), 4)));
    check(cases, s, |(i, w, v)| {
        let f = &fixtures()[i];
        let up = f.cover.project(&ok(f.cover.recursion().section(&w, &v))?);
        let down = ok(f.rec().section(&f.cover.project(&w), &v))?;
        prop_assert!(ok(f.engine().are_equal(&up, &down))?);
        Ok(())
    })
}

fn kernel_soundness(cases: u32) -> Result<(), String> {
    check(cases, cover_case(), |(i, w, n)| {
        let f = &fixtures()[i];
        if ok(kernel_member(&f.cover, &f.sys, &w, n))? {
            prop_assert!(ok(f.engine().is_trivial(&f.cover.project(&w)))?);
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- cosets

fn coset_tables(cases: u32) -> Result<(), String> {
    let groups: Vec<(Presentation, usize)> = vec![
        (
            Presentation::from_names(&["a", "b"], &["a^2", "b^3", "(ab)^5"]).unwrap(),
            60,
        ),
        (
            Presentation::from_names(&["a", "b"], &["a^2", "b^3", "(ab)^4"]).unwrap(),
            24,
        ),
        (
            Presentation::from_names(&["a", "b"], &["a^2", "b^2", "(ab)^6"]).unwrap(),
            12,
        ),
        (
            Presentation::from_names(&["a", "b"], &["a^4", "b^4", "(ab)^2", "(a^-1 b)^2"]).unwrap(),
            16,
        ),
    ];
    let n = groups.len();
    let s = (0..n, prop::collection::vec(word(2, 6), 0..=3));
    check(cases, s, move |(i, gens)| {
        let (p, order) = &groups[i];
        let t = ok(enumerate(p, &gens, 10_000))?;
        prop_assert!(t.is_consistent(p));
        prop_assert!(t.is_transitive());
        prop_assert_eq!(order % t.index(), 0);
        for g in &gens {
            prop_assert_eq!(t.act_word(0, g), 0);
        }
        Ok(())
    })
}

fn psi0_sections(cases: u32) -> Result<(), String> {
    let tokens: Vec<Word> = grig::xi0_generators().into_iter().map(|(_, w)| w).collect();
    let s = prop::collection::vec(0..tokens.len(), 0..=8);
    check(cases, s, move |picks| {
        let w = picks.iter().fold(Word::empty(), |acc, &k| {
            let mut acc = acc;
            acc.extend_from(&tokens[k]);
            acc
        });
        let (l, r) = ok(psi0_image(&w))?;
        let f = grigorchuk();
        let s0 = ok(f.rec().section(&w, &Vertex(vec![0])))?;
        let s1 = ok(f.rec().section(&w, &Vertex(vec![1])))?;
        prop_assert!(ok(f.engine().are_equal(&l, &s0))?);
        prop_assert!(ok(f.engine().are_equal(&r, &s1))?);
        Ok(())
    })
}

// ------------------------------------------------------------------ G_ω

fn omega_relations(cases: u32) -> Result<(), String> {
    let rels: Vec<Word> = c2_free_v().relators().to_vec();
    let s = (omega_sequence(), word(4, 4));
    check(cases, s, move |(omega, c)| {
        let budget = Default::default();
        for r in &rels {
            prop_assert!(ok(omega_is_trivial(&omega, &r.conjugate_by(&c), budget))?);
        }
        Ok(())
    })
}

fn omega_conjugation(cases: u32) -> Result<(), String> {
    check(cases, omega_sequence(), |omega| {
        let g = ok(OmegaGroup::new(omega.clone(), Default::default()))?;
        let first = omega.symbol(0);
        for (x, gen) in [("b", 1usize), ("c", 2), ("d", 3)] {
            let conj = OmegaElement {
                word: ok(grig::word(&format!("a{x}a")))?,
                offset: 0,
            };
            let s0 = ok(g.section(&conj, &Vertex(vec![0])))?;
            let s1 = ok(g.section(&conj, &Vertex(vec![1])))?;
            prop_assert_eq!(s0.word, ok(grig::word(x))?);
            prop_assert_eq!(s0.offset, omega.next_position(0));
            let expect = if has_flip(gen, first) { "a" } else { "" };
            prop_assert_eq!(s1.word, ok(grig::word(expect))?);
        }
        Ok(())
    })
}

fn omega_specialization(cases: u32) -> Result<(), String> {
    let omega: OmegaSequence = ":012".parse().unwrap();
    let g = OmegaGroup::new(omega, Default::default()).unwrap();
    check(cases, word(4, 12), move |w| {
        prop_assert_eq!(ok(g.is_trivial(&w))?, ok(grigorchuk().engine().is_trivial(&w))?);
        Ok(())
    })
}

fn omega_kernel_nesting(cases: u32) -> Result<(), String> {
    let u0 = grig::u0();
    let candidate = prop_oneof![
        word(4, 10),
        word(4, 3).prop_map(move |c| u0.conjugate_by(&c)),
        (word(4, 3), word(4, 3)).prop_map(|(x, y)| Word::commutator(&x.pow(2), &y.pow(2))),
    ];
    let s = (omega_sequence(), candidate, 0usize..=3);
    check(cases, s, |(omega, w, n)| {
        let sys = c2v_system();
        if ok(omega_kernel_member(&omega, &w, n, sys))? {
            prop_assert!(ok(omega_kernel_member(&omega, &w, n + 1, sys))?);
            prop_assert!(ok(omega_is_trivial(&omega, &w, Default::default()))?);
        }
        Ok(())
    })
}

// ---------------------------------------------------------- marked groups

fn rank_two_pool() -> Vec<MarkedGroup> {
    vec![
        MarkedGroup::free(2),
        MarkedGroup::trivial(2),
        MarkedGroup::wreath(0),
        MarkedGroup::wreath(2),
        MarkedGroup::wreath(3),
        MarkedGroup::met(1, 2).unwrap(),
        MarkedGroup::met(2, 3).unwrap(),
        MarkedGroup::bs_tower(2, 3, 0).unwrap(),
        MarkedGroup::w_n(0),
        MarkedGroup::w_n(1),
        MarkedGroup::w_n(2),
        load("gupta_sidki").unwrap().marked().unwrap(),
        load("fabrykowski_gupta").unwrap().marked().unwrap(),
        load("basilica").unwrap().marked().unwrap(),
    ]
}

/// `v(A, B)` for every ordered pair of the pool at radii 1..=5, computed
/// independently in both orders.
fn valuation_tables() -> &'static Vec<Vec<Vec<Valuation>>> {
    static CELL: OnceLock<Vec<Vec<Vec<Valuation>>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let pool = rank_two_pool();
        (1..=5)
            .map(|r| {
                pool.iter()
                    .map(|a| pool.iter().map(|b| valuation(a, b, r).unwrap()).collect())
                    .collect()
            })
            .collect()
    })
}

fn valuation_ultrametric(cases: u32) -> Result<(), String> {
    let n = rank_two_pool().len();
    check(cases, (0usize..5, 0..n, 0..n, 0..n), |(r, a, b, c)| {
        let t = &valuation_tables()[r];
        let (ab, bc, ac) = (t[a][b], t[b][c], t[a][c]);
        prop_assert!(ab.value().min(bc.value()) <= ac.value());
        prop_assert!(ac.distance() <= ab.distance().max(bc.distance()));
        prop_assert_eq!(t[a][a], Valuation::AtLeast { radius: r + 1 });
        Ok(())
    })
}

fn valuation_symmetry(cases: u32) -> Result<(), String> {
    let n = rank_two_pool().len();
    check(cases, (0usize..5, 0..n, 0..n), |(r, a, b)| {
        let tabs = valuation_tables();
        prop_assert_eq!(tabs[r][a][b], tabs[r][b][a]);
        // a finite valuation does not depend on the radius that found it
        if let (true, Valuation::Finite { v, .. }) = (r > 0, tabs[r.saturating_sub(1)][a][b]) {
            prop_assert!(!tabs[r][a][b].is_full());
            prop_assert_eq!(tabs[r][a][b].value(), v);
        }
        Ok(())
    })
}

/// Random `ω` chains against their limits at radius ≤ 5.
fn chain_monotonicity(cases: u32) -> Result<(), String> {
    check(cases, (omega_sequence(), 1usize..=5), |(omega, radius)| {
        let sys = c2v_system().clone();
        let seq: Vec<MarkedGroup> = (0..=3)
            .map(|n| MarkedGroup::omega_quotient(omega.clone(), sys.clone(), n))
            .collect();
        let limit = MarkedGroup::omega_limit(ok(OmegaGroup::new(omega.clone(), Default::default()))?, sys);
        let rep = ok(converge_report(&seq, &limit, radius))?;
        prop_assert!(rep.is_monotone());
        Ok(())
    })
}

// ------------------------------------------------------------- metabelian

fn wreath_homomorphism(cases: u32) -> Result<(), String> {
    let s = (prop::sample::select(vec![0u64, 2, 3, 5]), word(2, 12), word(2, 12));
    check(cases, s, |(h, u, v)| {
        let (eu, ev) = (wreath_eval(h, &u), wreath_eval(h, &v));
        prop_assert_eq!(wreath_eval(h, &u.mul(&v)), eu.mul(&ev));
        prop_assert_eq!(wreath_eval(h, &u.inverse()), eu.inverse());
        prop_assert!(eu.mul(&eu.inverse()).is_identity());
        Ok(())
    })
}

/// Words that are often trivial in `BS(1,m)`: commutators of conjugates
/// of `s`, and relator conjugates.
fn bs_candidate() -> impl Strategy<Value = Word> {
    let sc = |i: i64| {
        let t = Word::letter(Letter::pos(1)).pow(i);
        Word::letter(Letter::pos(0)).conjugate_by(&t)
    };
    prop_oneof![
        word(2, 12),
        (-3i64..=3, -3i64..=3, word(2, 3)).prop_map(move |(i, j, c)| Word::commutator(&sc(i), &sc(j)).conjugate_by(&c)),
        (word(2, 3), word(2, 3), word(2, 3), word(2, 3))
            .prop_map(|(x, y, z, w)| { Word::commutator(&Word::commutator(&x, &y), &Word::commutator(&z, &w)) }),
    ]
}

fn bs_met_agreement(cases: u32) -> Result<(), String> {
    check(cases, (2i64..=4, bs_candidate()), |(m, w)| {
        let d = ok(HnnDatum::bs(1, m))?;
        let britton = britton_reduce(&d, &w).is_trivial();
        let met = ok(met_eval(1, m, &w))?.is_identity();
        prop_assert_eq!(britton, met);
        Ok(())
    })
}

fn bs_kernel_tower(cases: u32) -> Result<(), String> {
    let params = prop::sample::select(vec![(2i64, 3i64), (3, 2), (2, 5), (3, 4)]);
    let s = (params, bs_candidate(), 0usize..=2);
    check(cases, s, |((l, m), w, n)| {
        let member = ok(bs_kernel_chain_member(l, m, &w, n))?;
        if member {
            prop_assert!(ok(bs_kernel_chain_member(l, m, &w, n + 1))?);
            prop_assert!(ok(met_eval(l, m, &w))?.is_identity());
        }
        // metabelian words die in Met and enter the tower
        if w.len() <= 32 && ok(met_eval(l, m, &w))?.is_identity() {
            let mut entered = false;
            for k in 0..=6 {
                if ok(bs_kernel_chain_member(l, m, &w, k))? {
                    entered = true;
                    break;
                }
            }
            prop_assert!(entered, "{} never entered by level 6", contracta::metabelian::show(&w));
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- growth

fn growth_tables() -> &'static Vec<GrowthTable> {
    static CELL: OnceLock<Vec<GrowthTable>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for f in fixtures() {
            let k = f.rec().rank();
            for mask in 1u32..(1 << k) {
                let gens: Vec<usize> = (0..k).filter(|g| mask & (1 << g) != 0).collect();
                let name = format!("{}{:?}", f.name, gens);
                let n = if f.name == "basilica" || f.name == "hanoi3" {
                    7
                } else {
                    8
                };
                out.push(ball_sizes(&name, &BisimulationOracle { engine: f.engine() }, &gens, n, 1 << 20).unwrap());
            }
        }
        for h in [0u64, 2, 3] {
            out.push(ball_sizes("wreath", &WreathOracle { modulus: h }, &[0, 1], 7, 1 << 20).unwrap());
        }
        out.push(ball_sizes("Met(2,3)", &MatrixOracle::new(2, 3).unwrap(), &[0, 1], 7, 1 << 20).unwrap());
        out
    })
}

fn growth_submultiplicativity(cases: u32) -> Result<(), String> {
    let n = growth_tables().len();
    check(cases, (0..n, 0usize..=8, 0usize..=8), |(i, m, k)| {
        let g = &growth_tables()[i].gamma;
        if m + k < g.len() {
            prop_assert!(
                g[m + k] as u128 <= g[m] as u128 * g[k] as u128,
                "{}",
                growth_tables()[i].name
            );
        }
        prop_assert!(g.windows(2).all(|w| w[0] <= w[1]));
        Ok(())
    })
}

/// Two ball elements (length ≤ 6) are equal under bisimulation iff
/// their actions on the separating level agree.
fn dual_oracle_agreement(cases: u32) -> Result<(), String> {
    let s = (0..fixtures().len()).prop_flat_map(|i| {
        let k = fixtures()[i].rec().rank();
        (Just(i), word(k, 6), prop_oneof![word(k, 6), trivial_word(i)])
    });
    check(cases, s, |(i, g, h)| {
        let f = &fixtures()[i];
        let h = if h.len() > 6 { g.mul(&h) } else { h };
        let bisim = ok(f.engine().are_equal(&g, &h))?;
        let depth = f.separating_depth();
        let level = ok(f.rec().level_permutation(&g, depth))? == ok(f.rec().level_permutation(&h, depth))?;
        prop_assert_eq!(bisim, level);
        Ok(())
    })
}
