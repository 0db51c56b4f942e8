//! Acceptance run: one PASS/FAIL line per criterion, with the pinned
//! time limits shown next to the measured times. Exits nonzero if any
//! line fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use contracta::catalog::{entry, load, Group};
use contracta::contraction::{is_contracting, nucleus_with, Budget};
use contracta::cosets::{enumerate, kernel_rank_free_product, FreeProductSignature};
use contracta::covers::{standard_cover, universal_cover};
use contracta::grig::{self, LysenokData, RelatorKind};
use contracta::growth::{ball_sizes, BisimulationOracle, FreeOracle, LevelOracle};
use contracta::markedgroups::converge_report;
use contracta::metabelian::{britton_reduce, bs_phi, met_eval, non_hopf_witness, HnnDatum};
use contracta::rewriting::Presentation;
use contracta::Word;

const NUCLEUS_LIMIT: Duration = Duration::from_secs(5);
const COSET_LIMIT: Duration = Duration::from_secs(60);
const MAX_COSETS: usize = 1 << 22;
const LYSENOK_LIMIT: Duration = Duration::from_secs(120);
const GROWTH_LIMIT: Duration = Duration::from_secs(120);

struct Outcome {
    failed: usize,
}

impl Outcome {
    fn line(&mut self, id: &str, pass: bool, what: &str, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {id:<4} {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

/// Free-product type of a cover presentation: generators joined by a
/// length-three relator among involutions form a Klein four-group, a
/// lone generator with relator `x^k` is `Ck`, one with none is `Z`.
fn free_product_type(p: &Presentation) -> String {
    let n = p.rank();
    let mut order: Vec<Option<usize>> = vec![None; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    for r in p.relators() {
        let gens: Vec<usize> = r.letters().iter().map(|l| l.generator()).collect();
        if gens.iter().all(|&g| g == gens[0]) {
            order[gens[0]] = Some(gens.len());
        } else if gens.len() == 3 {
            for &g in &gens[1..] {
                let (a, b) = (root(&mut parent, gens[0]), root(&mut parent, g));
                parent[b] = a;
            }
        } else {
            return format!("unrecognized relator {}", p.show(r));
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in 0..n {
        comps.entry(root(&mut parent, g)).or_default().push(g);
    }
    let mut factors: Vec<String> = comps
        .values()
        .map(|c| match (c.len(), order[c[0]]) {
            (1, Some(k)) => format!("C{k}"),
            (1, None) => "Z".to_string(),
            (3, _) if c.iter().all(|&g| order[g] == Some(2)) => "V".to_string(),
            _ => "?".to_string(),
        })
        .collect();
    factors.sort();
    // free factors are written as F_k
    let z = factors.iter().filter(|f| *f == "Z").count();
    factors.retain(|f| f != "Z");
    if z > 0 {
        factors.push(format!("F{z}"));
    }
    factors.join("*")
}

fn nucleus_sizes(out: &mut Outcome) {
    let expected = [
        ("grigorchuk", 5),
        ("basilica", 7),
        ("img_z2_plus_i", 4),
        ("gupta_sidki", 5),
        ("fabrykowski_gupta", 5),
        ("hanoi3", 4),
    ];
    for (name, size) in expected {
        let rec = entry(name).unwrap().recursion;
        let start = Instant::now();
        let got = is_contracting(&rec, Budget::default()).map(|c| c.nucleus_size);
        let t = start.elapsed();
        let pass = got.as_ref().ok() == Some(&size) && t < NUCLEUS_LIMIT;
        out.line(
            "C1",
            pass,
            &format!("nucleus of {name}"),
            format!("{got:?} (want {size}) in {} < {}", secs(t), secs(NUCLEUS_LIMIT)),
        );
    }
}

fn covers(out: &mut Outcome) {
    let expected = [
        ("grigorchuk", "C2*V"),
        ("basilica", "F2"),
        ("img_z2_plus_i", "C2*C2*C2"),
        ("gupta_sidki", "C3*C3"),
        ("fabrykowski_gupta", "C3*C3"),
        ("hanoi3", "C2*C2*C2"),
    ];
    for (name, ty) in expected {
        let e = entry(name).unwrap();
        let g = load(name).unwrap();
        let nuc = nucleus_with(g.engine().unwrap()).unwrap();
        let cover = universal_cover(&nuc, e.recursion.names(), e.cover_prune());
        let got = free_product_type(cover.presentation());
        let std = standard_cover(&cover, g.engine().unwrap(), Budget::default()).unwrap();
        let pass = got == ty && std.universal_is_self_replicating();
        out.line(
            "C2",
            pass,
            &format!("cover of {name}"),
            format!(
                "{} = {got} (want {ty}), universal cover already self-replicating: {}",
                cover.presentation(),
                std.universal_is_self_replicating()
            ),
        );
    }
}

fn coset_indices(out: &mut Outcome) {
    let words = |v: Vec<(String, Word)>| v.into_iter().map(|(_, w)| w).collect::<Vec<_>>();
    let g0 = grig::g_n_presentation(0).unwrap();
    let g1 = grig::g_n_presentation(1).unwrap();
    let cases = [
        ("Xi_0 in G_0", &g0, words(grig::xi0_generators()), 2),
        ("B_0 in G_0", &g0, words(grig::b0_generators()), 8),
        ("K_0 in G_0", &g0, words(grig::k0_generators()), 16),
        ("H_1 in G_1", &g1, grig::h_n_generators(1), 64),
    ];
    for (what, p, gens, index) in cases {
        let start = Instant::now();
        let got = enumerate(p, &gens, MAX_COSETS).map(|t| t.index());
        let t = start.elapsed();
        let pass = got.as_ref().ok() == Some(&index) && t < COSET_LIMIT;
        out.line(
            "C3",
            pass,
            &format!("index of {what}"),
            format!(
                "{got:?} (want {index}) in {} < {}, cap {MAX_COSETS} cosets",
                secs(t),
                secs(COSET_LIMIT)
            ),
        );
    }
}

fn ranks(out: &mut Outcome) {
    let cases: [(&str, Vec<i64>, i64, i64); 3] = [
        ("C2*V", vec![2, 4], 8, 3),
        ("C2*C2*C2", vec![2, 2, 2], 8, 5),
        ("C3*C3", vec![3, 3], 9, 4),
    ];
    for (what, orders, index, rank) in cases {
        let got = kernel_rank_free_product(&FreeProductSignature::new(orders, 0), index);
        let pass = got.as_ref().ok() == Some(&rank);
        out.line(
            "C4",
            pass,
            &format!("rank of index-{index} free subgroup of {what}"),
            format!("{got:?} (want {rank})"),
        );
    }
}

fn lysenok(out: &mut Outcome) {
    let g = load("grigorchuk").unwrap();
    let mut data = LysenokData::new();
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 0..=6 {
        for kind in [RelatorKind::U, RelatorKind::V] {
            let r = data.relator(kind, n).unwrap().clone();
            if !g.is_trivial(&r).unwrap_or(false) {
                bad.push(format!("{kind:?}_{n}"));
            }
        }
    }
    let t = start.elapsed();
    out.line(
        "C5",
        bad.is_empty() && t < LYSENOK_LIMIT,
        "u_n, v_n trivial for n <= 6",
        format!("nontrivial: {bad:?} in {} < {}", secs(t), secs(LYSENOK_LIMIT)),
    );
}

fn convergence(out: &mut Outcome) {
    let shape = |r: &contracta::markedgroups::ConvergenceReport| {
        r.rows
            .iter()
            .map(|x| x.valuation.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    for (name, label) in [
        ("grigorchuk", "cover chain of grigorchuk"),
        ("gomega::012", "G_(omega,n), omega = :012"),
    ] {
        let g = load(name).unwrap();
        let rep = converge_report(&g.chain(0..=4).unwrap(), &g.chain_limit().unwrap(), 8).unwrap();
        let pass = rep.is_monotone() && rep.strictly_increases();
        out.line(
            "C6",
            pass,
            &format!("{label} at radius 8"),
            format!(
                "v = {} (monotone {}, strict increase {})",
                shape(&rep),
                rep.is_monotone(),
                rep.strictly_increases()
            ),
        );
    }
    // The first word separating BS(2,3) from Met(2,3) has length 8, so no
    // row can be told apart from the limit inside the radius-6 ball.
    let bs = Group::BaumslagSolitar { l: 2, m: 3 };
    for (radius, levels) in [(6, 4), (8, 3)] {
        let rep = converge_report(&bs.chain(0..=levels).unwrap(), &bs.chain_limit().unwrap(), radius).unwrap();
        let pass = rep.is_monotone() && rep.strictly_increases();
        out.line(
            "C6",
            pass,
            &format!("BS(2,3) tower vs Met(2,3) at radius {radius}"),
            format!(
                "v = {} (monotone {}, strict increase {})",
                shape(&rep),
                rep.is_monotone(),
                rep.strictly_increases()
            ),
        );
    }
}

fn non_hopf(out: &mut Outcome) {
    let w = non_hopf_witness();
    let d = HnnDatum::bs(2, 3).unwrap();
    let britton = britton_reduce(&d, &w).is_trivial();
    let after_phi = britton_reduce(&d, &bs_phi(&w, 2, 1)).is_trivial();
    let met = met_eval(2, 3, &w).unwrap().is_identity();
    out.line(
        "C7",
        !britton && after_phi && met,
        "[t^-1 s t, s] in BS(2,3)",
        format!(
            "Britton trivial {britton} (want false), after phi {after_phi} (want true), Met(2,3) {met} (want true)"
        ),
    );
}

fn property_suites(out: &mut Outcome) {
    let cases = common::cases();
    for (name, suite) in common::SUITES {
        let start = Instant::now();
        let r = suite(cases);
        let t = start.elapsed();
        let detail = match &r {
            Ok(()) => format!("{cases} cases in {}", secs(t)),
            Err(e) => format!("{cases} cases: {e}"),
        };
        out.line("C8", r.is_ok(), name, detail);
    }
}

fn growth(out: &mut Outcome) {
    let start = Instant::now();
    let free = ball_sizes("F_2", &FreeOracle, &[0, 1], 7, usize::MAX).map(|t| t.gamma);
    let t = start.elapsed();
    let want: Vec<u64> = (0..=7).map(|n| 2 * 3u64.pow(n) - 1).collect();
    out.line(
        "C9",
        free.as_ref().ok() == Some(&want) && t < GROWTH_LIMIT,
        "F_2 ball sizes = 2*3^n - 1, n <= 7",
        format!("{free:?} in {} < {}", secs(t), secs(GROWTH_LIMIT)),
    );

    let g = load("grigorchuk").unwrap();
    let gens: Vec<usize> = (0..g.rank()).collect();
    let start = Instant::now();
    let bisim = ball_sizes(
        "grigorchuk",
        &BisimulationOracle {
            engine: g.engine().unwrap(),
        },
        &gens,
        8,
        usize::MAX,
    );
    let t_bisim = start.elapsed();
    let start = Instant::now();
    let level =
        LevelOracle::new(g.recursion().unwrap(), 8).and_then(|o| ball_sizes("grigorchuk", &o, &gens, 8, usize::MAX));
    let t_level = start.elapsed();
    let (bisim, level) = (bisim.map(|t| t.gamma), level.map(|t| t.gamma));
    let pass = bisim.is_ok() && bisim.as_ref().ok() == level.as_ref().ok() && t_bisim.max(t_level) < GROWTH_LIMIT;
    out.line(
        "C9",
        pass,
        "grigorchuk ball sizes n <= 8, bisimulation vs level-8 permutations",
        format!(
            "{bisim:?} in {} vs {level:?} in {} (each < {})",
            secs(t_bisim),
            secs(t_level),
            secs(GROWTH_LIMIT)
        ),
    );
}

fn main() -> ExitCode {
    let mut out = Outcome { failed: 0 };
    nucleus_sizes(&mut out);
    covers(&mut out);
    coset_indices(&mut out);
    ranks(&mut out);
    lysenok(&mut out);
    convergence(&mut out);
    non_hopf(&mut out);
    property_suites(&mut out);
    growth(&mut out);
    println!("acceptance: {} failed", out.failed);
    if out.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
