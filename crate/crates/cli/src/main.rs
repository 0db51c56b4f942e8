//! `contracta`: command-line front end.
//!
//! Exit status is 0 on success, 1 when a predicate query answers
//! false or nontrivial, and 2 on errors or exhausted budgets. With
//! `--json` every invocation prints exactly one JSON document carrying a
//! `schema` field; `elapsed_ms` is its only nondeterministic field.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use contracta::catalog::{self, Group};
use contracta::contraction::{is_contracting, nucleus_with, Budget};
use contracta::cosets::{enumerate, kernel_rank_free_product, FreeProductSignature, DEFAULT_MAX_COSETS};
use contracta::covers::{standard_cover, universal_cover, PruneReason};
use contracta::gomega::{OmegaElement, OmegaGroup, OmegaSequence};
use contracta::grig::{self, LysenokData, RelatorKind};
use contracta::growth::{
    ball_sizes, growth_probe, BisimulationOracle, EqualityOracle, FingerprintOracle, GrowthTable, LevelOracle,
    MatrixOracle, WreathOracle, DEFAULT_MAX_ELEMENTS,
};
use contracta::markedgroups::{converge_report, valuation, MarkedGroup};
use contracta::metabelian::{self, britton_reduce, bs_phi, met_eval, wreath_eval, HnnDatum};
use contracta::rewriting::{complete_partial, CompletionBudget, PresentationFile};
use contracta::{Error, Result, Vertex, Word};

const SCHEMA: &str = "contracta/1";

#[derive(Parser, Debug)]
#[command(
    name = "contracta",
    version,
    about = "Self-similar groups, nucleus covers and marked-group convergence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// State cap for finite-state products.
    #[arg(long, global = true, default_value_t = Budget::default().max_states)]
    max_states: usize,

    /// Depth cap for contraction and section searches.
    #[arg(long, global = true, default_value_t = Budget::default().max_depth)]
    max_depth: usize,

    /// Coset cap for Todd–Coxeter enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
}

#[derive(Args, Debug)]
struct GroupWord {
    /// Catalog name (`grigorchuk`, `gomega::012`, `bs:2:3`, ...) or a `.grp` file.
    #[arg(long, short)]
    group: String,
    /// Word in the generators, e.g. `(ad)^4` or `[a, b^-1 a b]`.
    #[arg(long, short, allow_hyphen_values = true)]
    word: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a word is trivial.
    Wp(GroupWord),
    /// Decide whether two words are equal.
    Eq {
        #[command(flatten)]
        gw: GroupWord,
        #[arg(long, allow_hyphen_values = true)]
        other: String,
    },
    /// Image of a tree vertex under a word.
    Act {
        #[command(flatten)]
        gw: GroupWord,
        /// Vertex as digits (`010`) or a comma-separated list.
        #[arg(long, default_value = "")]
        vertex: String,
    },
    /// Section of a word at a tree vertex.
    Section {
        #[command(flatten)]
        gw: GroupWord,
        #[arg(long, default_value = "")]
        vertex: String,
    },
    /// Nucleus of a contracting group.
    Nucleus {
        #[arg(long, short)]
        group: String,
    },
    /// Universal cover on the nucleus.
    Cover {
        #[arg(long, short)]
        group: String,
        /// Remove generators made redundant by length-3 relators; defaults to the catalog fact.
        #[arg(long)]
        prune: Option<bool>,
    },
    /// Standard cover from self-replication witnesses.
    StandardCover {
        #[arg(long, short)]
        group: String,
        #[arg(long)]
        prune: Option<bool>,
    },
    /// Membership of a word in the level-n kernel of the cover chain.
    KernelMember {
        #[command(flatten)]
        gw: GroupWord,
        #[arg(long, short)]
        level: usize,
    },
    /// Least level whose kernel contains the word.
    ChainProfile {
        #[command(flatten)]
        gw: GroupWord,
        #[arg(long, default_value_t = 6)]
        max_level: usize,
    },
    /// Todd–Coxeter index of a subgroup of a presented group.
    Tc {
        /// Presentation file or catalog name (`gn0`, `c2v`).
        #[arg(long)]
        pres: String,
        /// Comma-separated words or `let` names of the presentation file.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        subgroup: String,
        /// Print the coset table.
        #[arg(long)]
        dump: bool,
    },
    /// Knuth–Bendix completion of a presentation.
    Kb {
        #[arg(long)]
        pres: String,
        #[arg(long, default_value_t = CompletionBudget::default().max_rules)]
        max_rules: usize,
    },
    /// Rank of a free subgroup of finite index in a free product of cyclic groups.
    Rank {
        /// Catalog group whose `factor_orders` and `free_rank` facts to use.
        #[arg(long, short)]
        group: Option<String>,
        /// Finite factor orders, e.g. `2,4`.
        #[arg(long)]
        orders: Option<String>,
        #[arg(long, default_value_t = 0)]
        free_rank: i64,
        /// Subgroup index; defaults to the catalog fact.
        #[arg(long)]
        index: Option<i64>,
    },
    /// Check the L-presentation relators `u_n`, `v_n` in the first Grigorchuk group.
    Lysenok {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Presentation of the cover `G_n` of the first Grigorchuk group.
    GnPres {
        #[arg(long, short)]
        n: usize,
    },
    /// Generators of `H_n`, optionally with their index in `G_n`.
    HnGens {
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        index: bool,
    },
    /// Word problem in `G_ω`.
    GomegaWp {
        /// Sequence as `<preperiod>:<period>` over 0, 1, 2.
        #[arg(long)]
        omega: String,
        #[arg(long, short, allow_hyphen_values = true)]
        word: String,
    },
    /// Chabauty valuation between two marked groups.
    Dist {
        /// Marked group: catalog name, `<name>@<n>` for a chain quotient, `free:<k>`, `trivial:<k>`.
        #[arg(long, short)]
        group: String,
        #[arg(long)]
        other: String,
        #[arg(long, short, default_value_t = 6)]
        radius: usize,
    },
    /// Valuations of the kernel chain `G_0/N_n` against its limit.
    Converge {
        #[arg(long, short)]
        group: String,
        /// Last level `n`; rows are `0..=levels`.
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, short, default_value_t = 8)]
        radius: usize,
    },
    /// Ball sizes of the Cayley graph.
    Growth {
        #[arg(long, short)]
        group: String,
        #[arg(long, short = 'n', default_value_t = 8)]
        max_n: usize,
        /// `bisim` or `level` for self-similar groups.
        #[arg(long, default_value = "bisim")]
        oracle: String,
        /// Tree level for the `level` oracle.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ELEMENTS)]
        max_elements: usize,
    },
    /// Britton reduction in `BS(ℓ,m)`, optionally after `n` applications of `φ`.
    Bs {
        #[arg(long, short)]
        l: i64,
        #[arg(long, short)]
        m: i64,
        #[arg(long, short, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 0)]
        phi: usize,
    },
    /// Evaluate a word in the matrix group `Met(ℓ,m)`.
    Met {
        #[arg(long, short)]
        l: i64,
        #[arg(long, short)]
        m: i64,
        #[arg(long, short, allow_hyphen_values = true)]
        word: String,
    },
    /// Evaluate a word in `A ≀ Z` with `A = Z` or `Z/h`.
    Wreath {
        /// `Z` or an integer `h ≥ 2`.
        #[arg(long, default_value = "Z")]
        modulus: String,
        #[arg(long, short, allow_hyphen_values = true)]
        word: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Wp(_) => "wp",
            Command::Eq { .. } => "eq",
            Command::Act { .. } => "act",
            Command::Section { .. } => "section",
            Command::Nucleus { .. } => "nucleus",
            Command::Cover { .. } => "cover",
            Command::StandardCover { .. } => "standard-cover",
            Command::KernelMember { .. } => "kernel-member",
            Command::ChainProfile { .. } => "chain-profile",
            Command::Tc { .. } => "tc",
            Command::Kb { .. } => "kb",
            Command::Rank { .. } => "rank",
            Command::Lysenok { .. } => "lysenok",
            Command::GnPres { .. } => "gn-pres",
            Command::HnGens { .. } => "hn-gens",
            Command::GomegaWp { .. } => "gomega-wp",
            Command::Dist { .. } => "dist",
            Command::Converge { .. } => "converge",
            Command::Growth { .. } => "growth",
            Command::Bs { .. } => "bs",
            Command::Met { .. } => "met",
            Command::Wreath { .. } => "wreath",
        }
    }
}

/// Text and JSON renderings of one answer; `verdict` is set for predicates.
struct Report {
    text: String,
    json: Value,
    verdict: Option<bool>,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            verdict: None,
        }
    }

    fn predicate(text: String, json: Value, verdict: bool) -> Self {
        Report {
            text,
            json,
            verdict: Some(verdict),
        }
    }
}

struct Ctx {
    budget: Budget,
    max_cosets: usize,
}

impl Ctx {
    fn load(&self, name: &str) -> Result<Group> {
        catalog::load_with(name, self.budget)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        budget: Budget {
            max_states: cli.max_states,
            max_depth: cli.max_depth,
            ..Budget::default()
        },
        max_cosets: cli.max_cosets,
    };
    let start = Instant::now();
    let outcome = run(&cli.command, &ctx);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let name = cli.command.name();
    match outcome {
        Ok(report) => {
            if cli.json {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": name,
                    "result": report.json,
                    "elapsed_ms": elapsed_ms,
                });
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                ));
            } else if report.text.ends_with('\n') {
                emit(&report.text);
            } else {
                emit(&format!("{}\n", report.text));
            }
            match report.verdict {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            if cli.json {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": name,
                    "error": e.to_string(),
                    "budget_exceeded": e.is_budget(),
                    "elapsed_ms": elapsed_ms,
                });
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                ));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<Report> {
    match cmd {
        Command::Wp(gw) => {
            let g = ctx.load(&gw.group)?;
            let w = g.parse_word(&gw.word)?;
            let t = g.is_trivial(&w)?;
            Ok(Report::predicate(
                verdict_word(t, "trivial", "nontrivial"),
                json!({"group": g.name(), "word": g.show(&w), "trivial": t}),
                t,
            ))
        }
        Command::Eq { gw, other } => {
            let g = ctx.load(&gw.group)?;
            let (x, y) = (g.parse_word(&gw.word)?, g.parse_word(other)?);
            let e = g.are_equal(&x, &y)?;
            Ok(Report::predicate(
                verdict_word(e, "equal", "different"),
                json!({"group": g.name(), "word": g.show(&x), "other": g.show(&y), "equal": e}),
                e,
            ))
        }
        Command::Act { gw, vertex } => {
            let g = ctx.load(&gw.group)?;
            let w = g.parse_word(&gw.word)?;
            let rec = tree_recursion(&g)?;
            let d = rec.degree();
            let v = Vertex::parse(vertex, d)?;
            let image = match &g {
                Group::Omega(o) => o.act(&w, &v)?,
                _ => rec.act(&w, &v)?,
            };
            Ok(Report::new(
                format!("{} -> {}", show_vertex(&v, d), show_vertex(&image, d)),
                json!({"group": g.name(), "word": g.show(&w), "vertex": v.0, "image": image.0}),
            ))
        }
        Command::Section { gw, vertex } => {
            let g = ctx.load(&gw.group)?;
            let w = g.parse_word(&gw.word)?;
            let rec = tree_recursion(&g)?;
            let v = Vertex::parse(vertex, rec.degree())?;
            match &g {
                Group::Omega(o) => section_omega(o, &w, &v),
                _ => {
                    let s = rec.section(&w, &v)?;
                    let image = rec.act(&w, &v)?;
                    let shown = g.show(&s);
                    Ok(Report::new(
                        format!(
                            "section {}\nimage {}",
                            or_one(&shown),
                            show_vertex(&image, rec.degree())
                        ),
                        json!({"group": g.name(), "word": g.show(&w), "vertex": v.0, "section": shown, "image": image.0}),
                    ))
                }
            }
        }
        Command::Nucleus { group } => {
            let g = ctx.load(group)?;
            let rec = tree_recursion(&g)?;
            let engine = g.engine().expect("tree group");
            let nuc = nucleus_with(engine)?;
            let cert = is_contracting(rec, ctx.budget)?;
            let shown = nuc.show(rec.names());
            let mut text = format!("nucleus of {}: {} elements\n", g.name(), nuc.len());
            for (i, s) in shown.iter().enumerate() {
                text += &format!("{i:>3}  {s}\n");
            }
            text += &format!("contraction depth {}\n", cert.depth);
            Ok(Report::new(
                text,
                json!({"group": g.name(), "size": nuc.len(), "elements": shown, "depth": cert.depth}),
            ))
        }
        Command::Cover { group, prune } => {
            let (g, cover) = cover_of(ctx, group, *prune)?;
            let mut text = format!("{}\n", cover.presentation());
            let mut images = Vec::new();
            for (name, img) in cover.generators().iter().zip(cover.images()) {
                let shown = g.show(img);
                text += &format!("  {name} = {}\n", or_one(&shown));
                images.push(json!({"generator": name, "image": shown}));
            }
            let nuc_names = nucleus_with(g.engine().expect("tree group"))?.show(tree_recursion(&g)?.names());
            let mut dropped = Vec::new();
            for r in cover.pruned() {
                let why = match r.reason {
                    PruneReason::Identity => "identity".to_string(),
                    PruneReason::InverseOf(j) => format!("inverse of {}", nuc_names[j]),
                    PruneReason::Product(i, j) => format!("({}) ({})", nuc_names[i], nuc_names[j]),
                };
                text += &format!("  dropped {} = {why}\n", nuc_names[r.element]);
                dropped.push(json!({"element": nuc_names[r.element], "reason": why}));
            }
            Ok(Report::new(
                text,
                json!({
                    "group": g.name(),
                    "presentation": cover.presentation().to_string(),
                    "generators": images,
                    "dropped": dropped,
                }),
            ))
        }
        Command::StandardCover { group, prune } => {
            let (g, cover) = cover_of(ctx, group, *prune)?;
            let res = standard_cover(&cover, g.engine().expect("tree group"), ctx.budget)?;
            let p = res.presentation();
            let extra: Vec<String> = res.extra_relators.iter().map(|r| p.show(r)).collect();
            let status = if res.universal_is_self_replicating() {
                "universal cover already self-replicating".to_string()
            } else {
                format!("{} extra relators", extra.len())
            };
            let mut text = format!("{p}\n{status}\n");
            for r in &extra {
                text += &format!("  {r}\n");
            }
            Ok(Report::new(
                text,
                json!({
                    "group": g.name(),
                    "presentation": p.to_string(),
                    "self_replicating": res.universal_is_self_replicating(),
                    "extra_relators": extra,
                    "witnesses": res.witnesses.len(),
                }),
            ))
        }
        Command::KernelMember { gw, level } => {
            let g = ctx.load(&gw.group)?;
            let w = g.parse_word(&gw.word)?;
            let m = g.kernel_member(&w, *level)?;
            Ok(Report::predicate(
                format!("{} N_{level}", if m { "in" } else { "not in" }),
                json!({"group": g.name(), "word": g.show(&w), "level": level, "member": m}),
                m,
            ))
        }
        Command::ChainProfile { gw, max_level } => {
            let g = ctx.load(&gw.group)?;
            let w = g.parse_word(&gw.word)?;
            let n = g.chain_profile(&w, *max_level)?;
            let text = match n {
                Some(n) => format!("first in N_{n}"),
                None => format!("not in N_n for n ≤ {max_level}"),
            };
            Ok(Report::predicate(
                text,
                json!({"group": g.name(), "word": g.show(&w), "max_level": max_level, "level": n}),
                n.is_some(),
            ))
        }
        Command::Tc { pres, subgroup, dump } => {
            let file = catalog::presentation_file(pres)?;
            let gens = subgroup_words(&file, subgroup)?;
            let table = enumerate(&file.presentation, &gens, ctx.max_cosets)?;
            let mut text = format!("index {}\n", table.index());
            if *dump {
                text += &table.dump();
            }
            let shown: Vec<String> = gens.iter().map(|w| file.presentation.show(w)).collect();
            Ok(Report::new(
                text,
                json!({
                    "presentation": file.presentation.to_string(),
                    "subgroup": shown,
                    "index": table.index(),
                }),
            ))
        }
        Command::Kb { pres, max_rules } => {
            let file = catalog::presentation_file(pres)?;
            let budget = CompletionBudget {
                max_rules: *max_rules,
                ..CompletionBudget::default()
            };
            let sys = complete_partial(&file.presentation, budget);
            let rules = sys.show_rules();
            let mut text = format!("{} rules, complete: {}\n", rules.len(), sys.is_complete());
            for r in &rules {
                text += &format!("  {r}\n");
            }
            Ok(Report::predicate(
                text,
                json!({"presentation": file.presentation.to_string(), "complete": sys.is_complete(), "rules": rules}),
                sys.is_complete(),
            ))
        }
        Command::Rank {
            group,
            orders,
            free_rank,
            index,
        } => {
            let (orders, free, index) = match group {
                Some(name) => {
                    let e = catalog::entry(name)?;
                    let orders: Vec<i64> = e.fact_list("factor_orders").into_iter().map(|m| m as i64).collect();
                    let free = e.fact_usize("free_rank").unwrap_or(0) as i64;
                    let idx = index
                        .or(e.fact_usize("free_subgroup_index").map(|i| i as i64))
                        .ok_or_else(|| Error::invalid("no index given"))?;
                    (orders, free, idx)
                }
                None => {
                    let orders = orders
                        .as_deref()
                        .unwrap_or("")
                        .split([',', ' '])
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse::<i64>().map_err(|_| Error::invalid(format!("bad order `{s}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    (
                        orders,
                        *free_rank,
                        index.ok_or_else(|| Error::invalid("--index is required"))?,
                    )
                }
            };
            let sig = FreeProductSignature::new(orders.clone(), free);
            let chi = sig.euler_characteristic();
            let rank = kernel_rank_free_product(&sig, index)?;
            Ok(Report::new(
                format!("euler characteristic {chi}\nrank {rank}\n"),
                json!({
                    "factor_orders": orders,
                    "free_rank": free,
                    "index": index,
                    "euler_characteristic": chi.to_string(),
                    "rank": rank,
                }),
            ))
        }
        Command::Lysenok { max_n } => {
            let g = ctx.load("grigorchuk")?;
            let mut data = LysenokData::new();
            let mut text = String::from("  n  kind  length  trivial\n");
            let mut rows = Vec::new();
            let mut all = true;
            for n in 0..=*max_n {
                for kind in [RelatorKind::U, RelatorKind::V] {
                    let r = data.relator(kind, n)?.clone();
                    let t = g.is_trivial(&r)?;
                    all &= t;
                    let k = if kind == RelatorKind::U { "u" } else { "v" };
                    text += &format!("{n:>3}  {k:>4}  {:>6}  {t}\n", r.len());
                    rows.push(json!({"n": n, "kind": k, "length": r.len(), "trivial": t}));
                }
            }
            Ok(Report::predicate(text, json!({"rows": rows, "all_trivial": all}), all))
        }
        Command::GnPres { n } => {
            let p = grig::g_n_presentation(*n)?;
            let lengths: Vec<usize> = p.relators().iter().map(Word::len).collect();
            Ok(Report::new(
                p.to_text(),
                json!({"n": n, "presentation": p.to_string(), "relator_lengths": lengths}),
            ))
        }
        Command::HnGens { n, index } => {
            let gens = grig::h_n_generators(*n);
            let shown: Vec<String> = gens.iter().map(grig::show).collect();
            let mut text: String = shown.iter().map(|s| format!("{s}\n")).collect();
            let mut doc = json!({"n": n, "generators": shown});
            if *index {
                let p = grig::g_n_presentation(*n)?;
                let table = enumerate(&p, &gens, ctx.max_cosets)?;
                let predicted = grig::predicted_h_index(*n as u32);
                text += &format!("index {} (predicted {predicted})\n", table.index());
                doc["index"] = json!(table.index());
                doc["predicted"] = json!(predicted.to_string());
            }
            Ok(Report::new(text, doc))
        }
        Command::GomegaWp { omega, word } => {
            let omega: OmegaSequence = omega.parse()?;
            let g = OmegaGroup::new(omega.clone(), ctx.budget)?;
            let w = grig::word(word)?;
            let t = g.is_trivial(&w)?;
            Ok(Report::predicate(
                verdict_word(t, "trivial", "nontrivial"),
                json!({"omega": omega.to_string(), "word": grig::show(&w), "trivial": t}),
                t,
            ))
        }
        Command::Dist { group, other, radius } => {
            let a = marked(ctx, group)?;
            let b = marked(ctx, other)?;
            if a.rank() != b.rank() {
                return Err(Error::invalid(format!("ranks differ: {} and {}", a.rank(), b.rank())));
            }
            let v = valuation(&a, &b, *radius)?;
            let value = if v.is_full() { Value::Null } else { json!(v.value()) };
            Ok(Report::new(
                format!("v {v}\nd {:.6e}\n", v.distance()),
                json!({"group": a.name(), "other": b.name(), "radius": radius, "v": value, "d": v.distance()}),
            ))
        }
        Command::Converge { group, levels, radius } => {
            let g = ctx.load(group)?;
            let seq = g.chain(0..=*levels)?;
            let limit = g.chain_limit()?;
            let rep = converge_report(&seq, &limit, *radius)?;
            Ok(Report::new(rep.to_text(), rep.to_json()))
        }
        Command::Growth {
            group,
            max_n,
            oracle,
            depth,
            max_elements,
        } => {
            let g = ctx.load(group)?;
            let table = growth_table(&g, oracle, *depth, *max_n, *max_elements)?;
            let probe = growth_probe(&table)?;
            let mut text = format!("{}  generators {}\n  n  gamma\n", table.name, table.generators);
            for (n, x) in table.gamma.iter().enumerate() {
                text += &format!("{n:>3}  {x}\n");
            }
            text += &format!("indicator {:?}\n", probe.indicator);
            if let Some(fit) = probe.degree {
                text += &format!("log-log slope {:.4} (r2 {:.5})\n", fit.slope, fit.r2);
            }
            if let Some(fit) = probe.rate {
                text += &format!("log-linear slope {:.4} (r2 {:.5})\n", fit.slope, fit.r2);
            }
            text += &format!("{}\n", probe.note);
            Ok(Report::new(
                text,
                json!({
                    "group": table.name,
                    "generators": table.generators,
                    "gamma": table.gamma,
                    "submultiplicative": table.is_submultiplicative(),
                    "probe": probe,
                }),
            ))
        }
        Command::Bs { l, m, word, phi } => {
            let datum = HnnDatum::bs(*l, *m)?;
            let w = metabelian::word(word)?;
            let image = bs_phi(&w, *l, *phi);
            let red = britton_reduce(&datum, &image);
            let t = red.is_trivial();
            let mut text = String::new();
            if *phi > 0 {
                text += &format!("phi^{phi} length {}\n", image.len());
            }
            text += &format!(
                "reduced {red}\nt-length {}\n{}\n",
                red.t_length(),
                verdict_word(t, "trivial", "nontrivial")
            );
            Ok(Report::predicate(
                text,
                json!({
                    "group": datum.to_string(),
                    "word": metabelian::show(&w),
                    "phi": phi,
                    "image_length": image.len(),
                    "reduced": red.to_string(),
                    "t_length": red.t_length(),
                    "trivial": t,
                }),
                t,
            ))
        }
        Command::Met { l, m, word } => {
            let w = metabelian::word(word)?;
            let x = met_eval(*l, *m, &w)?;
            let t = x.is_identity();
            Ok(Report::predicate(
                format!("{x}\n{}\n", verdict_word(t, "trivial", "nontrivial")),
                json!({"l": l, "m": m, "word": metabelian::show(&w), "matrix": x.to_string(), "trivial": t}),
                t,
            ))
        }
        Command::Wreath { modulus, word } => {
            let g = ctx.load(&format!("wreath:{modulus}"))?;
            let Group::Wreath { modulus } = g else {
                unreachable!("wreath family")
            };
            let w = metabelian::word(word)?;
            let x = wreath_eval(modulus, &w);
            let t = x.is_identity();
            Ok(Report::predicate(
                format!("{x}\n{}\n", verdict_word(t, "trivial", "nontrivial")),
                json!({"group": g.name(), "word": metabelian::show(&w), "element": x.to_string(), "trivial": t}),
                t,
            ))
        }
    }
}

fn verdict_word(b: bool, yes: &str, no: &str) -> String {
    (if b { yes } else { no }).to_string()
}

fn or_one(s: &str) -> &str {
    if s.is_empty() {
        "1"
    } else {
        s
    }
}

fn show_vertex(v: &Vertex, degree: usize) -> String {
    let s = v.display(degree);
    if s.is_empty() {
        "∅".into()
    } else {
        s
    }
}

fn tree_recursion(g: &Group) -> Result<&contracta::WreathRecursion> {
    g.recursion()
        .ok_or_else(|| Error::invalid(format!("{} does not act on a rooted tree", g.name())))
}

fn section_omega(o: &OmegaGroup, w: &Word, v: &Vertex) -> Result<Report> {
    let s = o.section(
        &OmegaElement {
            word: w.clone(),
            offset: 0,
        },
        v,
    )?;
    let image = o.act(w, v)?;
    let mut shifted = o.omega().clone();
    for _ in 0..v.level() {
        shifted = shifted.shift();
    }
    let shown = grig::show(&s.word);
    Ok(Report::new(
        format!(
            "section {} in G_({shifted})\nimage {}",
            or_one(&shown),
            show_vertex(&image, 2)
        ),
        json!({
            "omega": o.omega().to_string(),
            "word": grig::show(w),
            "vertex": v.0,
            "section": shown,
            "section_omega": shifted.to_string(),
            "image": image.0,
        }),
    ))
}

fn cover_of(ctx: &Ctx, name: &str, prune: Option<bool>) -> Result<(Group, contracta::covers::CoverPresentation)> {
    let g = ctx.load(name)?;
    let rec = tree_recursion(&g)?;
    let prune = match (&g, prune) {
        (_, Some(p)) => p,
        (Group::SelfSimilar { entry, .. }, None) => entry.cover_prune(),
        _ => false,
    };
    let nuc = nucleus_with(g.engine().expect("tree group"))?;
    let cover = universal_cover(&nuc, rec.names(), prune);
    Ok((g, cover))
}

/// Splits on top-level commas and resolves `let` names.
fn subgroup_words(file: &PresentationFile, text: &str) -> Result<Vec<Word>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    parts.push(cur);
    parts
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| match file.named(s) {
            Some(w) => Ok(w.clone()),
            None => file.presentation.parse_word(s),
        })
        .collect()
}

/// `name`, `name@n` (chain quotient), `free:k` or `trivial:k`.
fn marked(ctx: &Ctx, spec: &str) -> Result<MarkedGroup> {
    if let Some(k) = spec.strip_prefix("free:") {
        return Ok(MarkedGroup::free(parse_usize(k)?));
    }
    if let Some(k) = spec.strip_prefix("trivial:") {
        return Ok(MarkedGroup::trivial(parse_usize(k)?));
    }
    match spec.rsplit_once('@') {
        Some((name, n)) => {
            let n = parse_usize(n)?;
            let mut chain = ctx.load(name)?.chain(n..=n)?;
            Ok(chain.pop().expect("one level"))
        }
        None => ctx.load(spec)?.marked(),
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("expected a nonnegative integer, got `{s}`")))
}

fn growth_table(g: &Group, oracle: &str, depth: usize, n: usize, max: usize) -> Result<GrowthTable> {
    let gens: Vec<usize> = (0..g.rank()).collect();
    let name = g.name();
    fn run<O: EqualityOracle>(name: &str, o: &O, gens: &[usize], n: usize, max: usize) -> Result<GrowthTable> {
        ball_sizes(name, o, gens, n, max)
    }
    match g {
        Group::SelfSimilar { engine, entry } => match oracle {
            "bisim" => run(&name, &BisimulationOracle { engine }, &gens, n, max),
            "level" => run(&name, &LevelOracle::new(&entry.recursion, depth)?, &gens, n, max),
            other => Err(Error::invalid(format!("unknown oracle `{other}`"))),
        },
        // letters 0..4 of the automaton are a, b_0, c_0, d_0
        Group::Omega(o) => match oracle {
            "bisim" => run(&name, &BisimulationOracle { engine: o.engine() }, &gens, n, max),
            "level" => run(&name, &LevelOracle::new(o.recursion(), depth)?, &gens, n, max),
            other => Err(Error::invalid(format!("unknown oracle `{other}`"))),
        },
        Group::Wreath { modulus } => run(&name, &WreathOracle { modulus: *modulus }, &gens, n, max),
        Group::Met { l, m } => run(&name, &MatrixOracle::new(*l, *m)?, &gens, n, max),
        Group::BaumslagSolitar { l, m } => {
            let d = HnnDatum::bs(*l, *m)?;
            let o = FingerprintOracle {
                image: MatrixOracle::new(*l, *m)?,
                equal: |a: &Word, b: &Word| Ok(britton_reduce(&d, &a.mul(&b.inverse())).is_trivial()),
            };
            run(&name, &o, &gens, n, max)
        }
        Group::Truncation { n: k } => {
            let d = HnnDatum::w(*k);
            let o = FingerprintOracle {
                image: WreathOracle { modulus: 0 },
                equal: |a: &Word, b: &Word| Ok(britton_reduce(&d, &a.mul(&b.inverse())).is_trivial()),
            };
            run(&name, &o, &gens, n, max)
        }
    }
}
