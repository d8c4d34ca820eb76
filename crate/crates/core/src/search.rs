//! Level-by-level descent through index-2 subgroups of `P`, looking for a
//! subgroup of order `|P| / |Stab|` meeting `Stab` trivially.
//!
//! Level `k` holds the subgroups `T` of order `|P| / 2^k` reachable by a
//! chain of maximal subgroups in which every member meets `Stab` in exactly
//! `|Stab| / 2^k` elements.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{HGroup, PGroup};
use crate::error::{Error, Result};
use crate::pcgroup::{PcPresentation, Subgroup};

pub const DEFAULT_MAX_SURVIVORS: usize = 10_000_000;

/// `X ⋊ <r^2>` inside `P`.
pub fn stab_subgroup(p: &PGroup, h: &HGroup) -> Subgroup {
    let mut gens: Vec<_> = h.group.x.iter().map(|&i| p.pc.generator(i + p.top)).collect();
    gens.push(p.pc.generator(1));
    Subgroup::generated(&p.pc, &gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLevel {
    pub depth: usize,
    pub required_meet: usize,
    pub survivors: Vec<Subgroup>,
}

impl SearchLevel {
    pub fn root(pc: &PcPresentation, stab: &Subgroup) -> Self {
        SearchLevel {
            depth: 0,
            required_meet: 1 << stab.order_log2(),
            survivors: vec![Subgroup::full(pc)],
        }
    }

    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "level {} count {}", self.depth, self.survivors.len())?;
        for s in &self.survivors {
            let rows: Vec<String> = s.rows().iter().map(|r| format!("{r:x}")).collect();
            writeln!(w, "{}", rows.join(" "))?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(pc: &PcPresentation, stab: &Subgroup, r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty checkpoint".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (depth, count) = match fields.as_slice() {
            ["level", k, "count", n] => (
                k.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
                n.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
            ),
            _ => return Err(Error::Parse(format!("bad checkpoint header: {header}"))),
        };
        if depth > stab.order_log2() {
            return Err(Error::Parse(format!("checkpoint depth {depth} out of range")));
        }
        let mut survivors = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rows = line
                .split_whitespace()
                .map(|h| u128::from_str_radix(h, 16).map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            for &r in &rows {
                pc.element(r)?;
            }
            survivors.push(Subgroup::from_rows(pc, &rows));
        }
        if survivors.len() != count {
            return Err(Error::Parse(format!("checkpoint lists {} survivors, header says {count}", survivors.len())));
        }
        Ok(SearchLevel {
            depth,
            required_meet: 1 << (stab.order_log2() - depth),
            survivors,
        })
    }
}

/// Maximal subgroups of every survivor whose meet with `stab` has exactly
/// half the current order, deduplicated and sorted.
pub fn descend(pc: &PcPresentation, stab: &Subgroup, level: &SearchLevel, max_survivors: usize) -> Result<(SearchLevel, usize)> {
    let required = level.required_meet / 2;
    let per_parent: Vec<(usize, Vec<Subgroup>)> = level
        .survivors
        .par_iter()
        .map(|t| {
            let max = t.maximal_subgroups(pc)?;
            let count = max.len();
            let mut keep = Vec::new();
            for m in max {
                if Subgroup::small_intersection_order(pc, &m, stab)? == required {
                    keep.push(m);
                }
            }
            Ok((count, keep))
        })
        .collect::<Result<_>>()?;
    let candidates = per_parent.iter().map(|(c, _)| c).sum();
    let mut set = BTreeSet::new();
    for (_, keep) in per_parent {
        set.extend(keep);
        if set.len() > max_survivors {
            return Err(Error::BudgetExceeded {
                depth: level.depth + 1,
                count: set.len(),
                cap: max_survivors,
            });
        }
    }
    Ok((
        SearchLevel {
            depth: level.depth + 1,
            required_meet: required,
            survivors: set.into_iter().collect(),
        },
        candidates,
    ))
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_survivors: usize,
    pub threads: Option<usize>,
    /// Directory for `level-<k>.txt` checkpoint files.
    pub checkpoint_dir: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_survivors: DEFAULT_MAX_SURVIVORS,
            threads: None,
            checkpoint_dir: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LevelCount {
    pub depth: usize,
    pub required_meet: usize,
    pub candidates: usize,
    pub survivors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub start_depth: usize,
    pub levels: Vec<LevelCount>,
    pub final_depth: usize,
    pub final_survivors: usize,
    /// True iff some subgroup of the right order meets `Stab` trivially.
    pub regular_subgroup_exists: bool,
    pub verdict: String,
    pub wall_seconds: f64,
}

pub fn checkpoint_path(dir: &Path, depth: usize) -> PathBuf {
    dir.join(format!("level-{depth}.txt"))
}

/// Runs the descent from `start` (the root when `None`) down to depth
/// `log2 |stab|`.
pub fn run_search(pc: &PcPresentation, stab: &Subgroup, config: &SearchConfig, start: Option<SearchLevel>) -> Result<SearchReport> {
    let body = || -> Result<SearchReport> {
        let clock = Instant::now();
        let mut level = start.unwrap_or_else(|| SearchLevel::root(pc, stab));
        let start_depth = level.depth;
        let mut levels = Vec::new();
        while level.depth < stab.order_log2() {
            let (next, candidates) = descend(pc, stab, &level, config.max_survivors)?;
            levels.push(LevelCount {
                depth: next.depth,
                required_meet: next.required_meet,
                candidates,
                survivors: next.survivors.len(),
            });
            if let Some(dir) = &config.checkpoint_dir {
                std::fs::create_dir_all(dir)?;
                let file = std::fs::File::create(checkpoint_path(dir, next.depth))?;
                next.write_checkpoint(std::io::BufWriter::new(file))?;
            }
            level = next;
        }
        let exists = !level.survivors.is_empty();
        Ok(SearchReport {
            start_depth,
            levels,
            final_depth: level.depth,
            final_survivors: level.survivors.len(),
            regular_subgroup_exists: exists,
            verdict: if exists { "regular subgroup found" } else { "no regular subgroup" }.into(),
            wall_seconds: clock.elapsed().as_secs_f64(),
        })
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}
