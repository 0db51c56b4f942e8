//! Named groups: self-similar definition files with expected facts, the
//! `G_ω` family, and the metabelian families, behind one loader.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::contraction::{nucleus_with, Budget, Engine};
use crate::covers::{kernel_member, universal_cover, CoverPresentation};
use crate::error::{Error, Result};
use crate::gomega::{omega_kernel_member, OmegaGroup, OmegaSequence};
use crate::grig;
use crate::kernel::{parse_recursion, parse_word, Letter, Word, WreathRecursion};
use crate::markedgroups::MarkedGroup;
use crate::metabelian::{self, britton_reduce, bs_kernel_chain_member, met_eval, wreath_eval, HnnDatum};
use crate::rewriting::{complete, parse_presentation, CompletionBudget, Presentation, PresentationFile, RewriteSystem};

/// Environment variable that points the loader at another directory.
pub const CATALOG_ENV: &str = "CONTRACTA_CATALOG";

const BUILTIN: &[(&str, &str)] = &[
    ("grigorchuk.grp", include_str!("../../../catalog/grigorchuk.grp")),
    ("basilica.grp", include_str!("../../../catalog/basilica.grp")),
    ("img_z2_plus_i.grp", include_str!("../../../catalog/img_z2_plus_i.grp")),
    ("gupta_sidki.grp", include_str!("../../../catalog/gupta_sidki.grp")),
    (
        "fabrykowski_gupta.grp",
        include_str!("../../../catalog/fabrykowski_gupta.grp"),
    ),
    ("hanoi3.grp", include_str!("../../../catalog/hanoi3.grp")),
    ("gn0.pres", include_str!("../../../catalog/gn0.pres")),
    ("c2v.pres", include_str!("../../../catalog/c2v.pres")),
];

/// The six self-similar examples, in catalog order.
pub const SELF_SIMILAR: [&str; 6] = [
    "grigorchuk",
    "basilica",
    "img_z2_plus_i",
    "gupta_sidki",
    "fabrykowski_gupta",
    "hanoi3",
];

/// Reads a catalog file, from `CONTRACTA_CATALOG` when set.
pub fn read_file(file: &str) -> Result<String> {
    if let Some(dir) = std::env::var_os(CATALOG_ENV) {
        let path = PathBuf::from(dir).join(file);
        return std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())));
    }
    BUILTIN
        .iter()
        .find(|(n, _)| *n == file)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| Error::UnknownGroup(file.to_string()))
}

/// A self-similar group definition together with its `#@` facts.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub facts: BTreeMap<String, String>,
    pub recursion: WreathRecursion,
}

impl CatalogEntry {
    pub fn parse(text: &str) -> Result<Self> {
        let mut facts = BTreeMap::new();
        for line in text.lines() {
            if let Some(rest) = line.trim_start().strip_prefix("#@") {
                let (k, v) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::invalid(format!("bad fact line `{line}`")))?;
                facts.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let recursion = parse_recursion(text)?;
        let name = facts.get("name").cloned().unwrap_or_else(|| "unnamed".into());
        Ok(CatalogEntry { name, facts, recursion })
    }

    pub fn fact(&self, key: &str) -> Option<&str> {
        self.facts.get(key).map(String::as_str)
    }

    pub fn fact_usize(&self, key: &str) -> Option<usize> {
        self.fact(key)?.parse().ok()
    }

    pub fn fact_list(&self, key: &str) -> Vec<u64> {
        self.fact(key)
            .map(|s| s.split_whitespace().filter_map(|t| t.parse().ok()).collect())
            .unwrap_or_default()
    }

    /// Comma-separated words of a fact, parsed over the generators.
    pub fn fact_words(&self, key: &str) -> Result<Vec<Word>> {
        match self.fact(key) {
            Some(s) => crate::kernel::parse_word_list(s, self.recursion.names()),
            None => Ok(Vec::new()),
        }
    }

    pub fn cover_prune(&self) -> bool {
        self.fact("cover_prune") == Some("true")
    }
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    if !SELF_SIMILAR.contains(&name) {
        return Err(Error::UnknownGroup(name.to_string()));
    }
    CatalogEntry::parse(&read_file(&format!("{name}.grp"))?)
}

/// A presentation file by catalog name (`gn0`) or by path.
pub fn presentation_file(name: &str) -> Result<PresentationFile> {
    let path = Path::new(name);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{name}: {e}")))?
    } else {
        let file = if name.ends_with(".pres") {
            name.to_string()
        } else {
            format!("{name}.pres")
        };
        read_file(&file)?
    };
    parse_presentation(&text)
}

/// A loaded group with its equality oracle.
#[derive(Clone, Debug)]
pub enum Group {
    SelfSimilar { entry: Box<CatalogEntry>, engine: Engine },
    Omega(Box<OmegaGroup>),
    Wreath { modulus: u64 },
    BaumslagSolitar { l: i64, m: i64 },
    Met { l: i64, m: i64 },
    Truncation { n: usize },
}

impl Group {
    pub fn name(&self) -> String {
        match self {
            Group::SelfSimilar { entry, .. } => entry.name.clone(),
            Group::Omega(g) => format!("gomega:{}", g.omega()),
            Group::Wreath { modulus: 0 } => "wreath:Z".into(),
            Group::Wreath { modulus } => format!("wreath:{modulus}"),
            Group::BaumslagSolitar { l, m } => format!("bs:{l}:{m}"),
            Group::Met { l, m } => format!("met:{l}:{m}"),
            Group::Truncation { n } => format!("w_n:{n}"),
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            Group::SelfSimilar { entry, .. } => entry.recursion.names().to_vec(),
            Group::Omega(_) => grig::names(),
            _ => metabelian::names(),
        }
    }

    pub fn rank(&self) -> usize {
        self.generator_names().len()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.generator_names())
    }

    pub fn show(&self, w: &Word) -> String {
        w.display(&self.generator_names()).to_string()
    }

    pub fn recursion(&self) -> Option<&WreathRecursion> {
        match self {
            Group::SelfSimilar { entry, .. } => Some(&entry.recursion),
            Group::Omega(g) => Some(g.recursion()),
            _ => None,
        }
    }

    pub fn engine(&self) -> Option<&Engine> {
        match self {
            Group::SelfSimilar { engine, .. } => Some(engine),
            Group::Omega(g) => Some(g.engine()),
            _ => None,
        }
    }

    /// A finite presentation, where the group has one of its own.
    pub fn presentation(&self) -> Option<Presentation> {
        let st = |rels: Vec<Word>| Presentation::new(metabelian::names(), rels).ok();
        match self {
            Group::BaumslagSolitar { l, m } => st(vec![metabelian::word(&format!("t^-1 s^{l} t s^{}", -m)).ok()?]),
            Group::Truncation { n } => st((1..=*n)
                .map(|i| metabelian::word(&format!("[s, t^-{i} s t^{i}]")))
                .collect::<Result<_>>()
                .ok()?),
            _ => None,
        }
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        match self {
            Group::SelfSimilar { engine, .. } => engine.is_trivial(w),
            Group::Omega(g) => g.is_trivial(w),
            Group::Wreath { modulus } => Ok(wreath_eval(*modulus, w).is_identity()),
            Group::BaumslagSolitar { l, m } => Ok(britton_reduce(&HnnDatum::bs(*l, *m)?, w).is_trivial()),
            Group::Met { l, m } => Ok(met_eval(*l, *m, w)?.is_identity()),
            Group::Truncation { n } => Ok(britton_reduce(&HnnDatum::w(*n), w).is_trivial()),
        }
    }

    pub fn are_equal(&self, g: &Word, h: &Word) -> Result<bool> {
        self.is_trivial(&g.mul(&h.inverse()))
    }

    /// The cover whose level quotients `G_n` form the kernel chain, with a
    /// complete rewriting system. Unpruned, so it keeps the group's
    /// generators.
    pub fn chain_cover(&self) -> Result<(Presentation, RewriteSystem, Option<CoverPresentation>)> {
        match self {
            Group::SelfSimilar { entry, engine } => {
                let nuc = nucleus_with(engine)?;
                let cover = universal_cover(&nuc, entry.recursion.names(), false);
                let sys = complete(cover.presentation(), CompletionBudget::default())?;
                Ok((cover.presentation().clone(), sys, Some(cover)))
            }
            Group::Omega(_) => {
                let p = grig::c2_free_v();
                let sys = complete(&p, CompletionBudget::default())?;
                Ok((p, sys, None))
            }
            _ => Err(Error::invalid(format!("{} has no nucleus cover", self.name()))),
        }
    }

    /// Membership in the level-`n` kernel `N_n` of the cover chain.
    pub fn kernel_member(&self, w: &Word, n: usize) -> Result<bool> {
        match self {
            Group::SelfSimilar { .. } => {
                let (_, sys, cover) = self.chain_cover()?;
                kernel_member(&cover.expect("self-similar"), &sys, w, n)
            }
            Group::Omega(g) => {
                let (_, sys, _) = self.chain_cover()?;
                omega_kernel_member(g.omega(), w, n, &sys)
            }
            Group::BaumslagSolitar { l, m } => bs_kernel_chain_member(*l, *m, w, n),
            _ => Err(Error::invalid(format!("{} has no kernel chain", self.name()))),
        }
    }

    /// Least `n ≤ n_max` with `w ∈ N_n`.
    pub fn chain_profile(&self, w: &Word, n_max: usize) -> Result<Option<usize>> {
        for n in 0..=n_max {
            if self.kernel_member(w, n)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// The chain quotients `G_0 / N_n` for `n` in `levels`.
    pub fn chain(&self, levels: std::ops::RangeInclusive<usize>) -> Result<Vec<MarkedGroup>> {
        match self {
            Group::SelfSimilar { .. } => {
                let (_, sys, cover) = self.chain_cover()?;
                let cover = cover.expect("self-similar");
                Ok(levels
                    .map(|n| MarkedGroup::cover_quotient(cover.clone(), sys.clone(), n))
                    .collect())
            }
            Group::Omega(g) => {
                let (_, sys, _) = self.chain_cover()?;
                Ok(levels
                    .map(|n| MarkedGroup::omega_quotient(g.omega().clone(), sys.clone(), n))
                    .collect())
            }
            Group::BaumslagSolitar { l, m } => levels.map(|n| MarkedGroup::bs_tower(*l, *m, n)).collect(),
            _ => Err(Error::invalid(format!("{} has no kernel chain", self.name()))),
        }
    }

    /// The limit of [`Group::chain`], marked like the chain: the group on
    /// the cover generators for self-similar groups, `G_ω` itself, and
    /// `Met(ℓ,m)` for the `BS(ℓ,m)` tower.
    pub fn chain_limit(&self) -> Result<MarkedGroup> {
        match self {
            Group::BaumslagSolitar { l, m } => MarkedGroup::met(*l, *m),
            Group::SelfSimilar { engine, .. } => {
                let (_, sys, cover) = self.chain_cover()?;
                let cover = cover.expect("self-similar");
                let engine = engine.clone();
                Ok(MarkedGroup::normalized(self.name(), sys, move |w| {
                    engine.is_trivial(&cover.project(w))
                }))
            }
            Group::Omega(_) => self.marked(),
            _ => Err(Error::invalid(format!("{} has no kernel chain", self.name()))),
        }
    }

    /// The group as a point of the space of marked groups, on its own
    /// generators. Self-similar groups are keyed by cover normal forms
    /// when the cover has exactly the group's generators.
    pub fn marked(&self) -> Result<MarkedGroup> {
        let name = self.name();
        Ok(match self {
            Group::SelfSimilar { engine, .. } => {
                let (_, sys, cover) = self.chain_cover()?;
                let cover = cover.expect("self-similar");
                let same = cover.images().len() == self.rank()
                    && cover
                        .images()
                        .iter()
                        .enumerate()
                        .all(|(i, w)| w.letters() == [Letter::pos(i)]);
                MarkedGroup::contracting(name, engine.clone(), same.then_some(sys))
            }
            Group::Omega(g) => {
                let (_, sys, _) = self.chain_cover()?;
                MarkedGroup::omega_limit((**g).clone(), sys)
            }
            Group::Wreath { modulus } => MarkedGroup::wreath(*modulus),
            Group::Truncation { n } => MarkedGroup::w_n(*n),
            Group::Met { l, m } => MarkedGroup::met(*l, *m)?,
            Group::BaumslagSolitar { .. } => {
                let g = self.clone();
                MarkedGroup::from_fn(name, 2, move |w| g.is_trivial(w))
            }
        })
    }
}

fn int(s: &str, what: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad {what} `{s}`")))
}

/// Resolves a catalog name with the default budget.
pub fn load(name: &str) -> Result<Group> {
    load_with(name, Budget::default())
}

pub fn load_with(name: &str, budget: Budget) -> Result<Group> {
    if name.ends_with(".grp") || Path::new(name).is_file() {
        let text = std::fs::read_to_string(name).map_err(|e| Error::Io(format!("{name}: {e}")))?;
        let mut entry = CatalogEntry::parse(&text)?;
        if !entry.facts.contains_key("name") {
            entry.name = Path::new(name)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| name.to_string());
        }
        let engine = Engine::new(&entry.recursion, budget)?;
        return Ok(Group::SelfSimilar {
            entry: Box::new(entry),
            engine,
        });
    }
    let (family, arg) = name.split_once(':').unwrap_or((name, ""));
    match family {
        "gomega" => {
            let omega: OmegaSequence = arg.parse()?;
            Ok(Group::Omega(Box::new(OmegaGroup::new(omega, budget)?)))
        }
        "wreath" => {
            let modulus = match arg.trim() {
                "Z" | "z" | "" => 0,
                h => {
                    let h = int(h, "modulus")?;
                    if h < 2 {
                        return Err(Error::invalid("wreath modulus must be Z or at least 2"));
                    }
                    h as u64
                }
            };
            Ok(Group::Wreath { modulus })
        }
        "bs" | "met" => {
            let (l, m) = arg
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected `{family}:<l>:<m>`")))?;
            let (l, m) = (int(l, "l")?, int(m, "m")?);
            if family == "bs" {
                HnnDatum::bs(l, m)?;
                Ok(Group::BaumslagSolitar { l, m })
            } else {
                metabelian::met_generators(l, m)?;
                Ok(Group::Met { l, m })
            }
        }
        "w_n" => {
            let n = int(arg, "n")?;
            if n < 0 {
                return Err(Error::invalid("n must be nonnegative"));
            }
            Ok(Group::Truncation { n: n as usize })
        }
        _ if arg.is_empty() => {
            let entry = entry(name)?;
            let engine = Engine::new(&entry.recursion, budget)?;
            Ok(Group::SelfSimilar {
                entry: Box::new(entry),
                engine,
            })
        }
        _ => Err(Error::UnknownGroup(name.to_string())),
    }
}
