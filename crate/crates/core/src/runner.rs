//! Batch driver behind the `cubic-euler` binary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::curve::{self, PeriodReport, PeriodTally};
use crate::error::{Error, Result};
use crate::invariants::{self, TauInvariants};
use crate::periodic::{self, EnumStats, Enumerator, PeriodicTau, SPLIT_TARGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Period(usize),
    /// Every period `1..=P`.
    Through(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub format: Format,
    pub stats: bool,
    pub verify: bool,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    /// Stop after this many subtrees finish, leaving the rest in the checkpoint.
    pub stop_after: Option<usize>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            format: Format::Table,
            stats: false,
            verify: true,
            workers: 1,
            checkpoint: None,
            resume: None,
            out: None,
            checkpoint_interval: Duration::from_secs(30),
            stop_after: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(Error::Usage(m.to_string()));
        let top = match self.mode {
            Mode::Period(p) | Mode::Through(p) => p,
        };
        if top == 0 || top > periodic::MAX_PERIOD {
            return usage(&format!("period must be in 1..={}", periodic::MAX_PERIOD));
        }
        if self.workers == 0 {
            return usage("worker count must be at least 1");
        }
        if matches!(self.mode, Mode::Through(_))
            && (self.checkpoint.is_some() || self.resume.is_some())
        {
            return usage("--checkpoint and --resume need --period");
        }
        if self.stop_after.is_some() && self.checkpoint.is_none() {
            return usage("stopping early needs a checkpoint path");
        }
        Ok(())
    }
}

/// Everything one period's enumeration contributes to reports.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRun {
    pub stats: EnumStats,
    pub tally: PeriodTally,
    /// Taus with minimal prefix length `>= 2p - 4`, sorted.
    pub late: Vec<PeriodicTau>,
}

#[derive(Default)]
struct Acc {
    tally: PeriodTally,
    late: Vec<PeriodicTau>,
}

impl Acc {
    fn visit(&mut self, t: &PeriodicTau, inv: &TauInvariants) -> Result<()> {
        self.tally.add(inv)?;
        if t.minimal_len() + 4 >= 2 * t.period() {
            self.late.push(t.clone());
        }
        Ok(())
    }

    fn absorb(&mut self, other: Acc) -> Result<()> {
        self.tally.merge(&other.tally)?;
        self.late.extend(other.late);
        Ok(())
    }
}

/// Where and how often to snapshot a running enumeration.
#[derive(Clone, Debug)]
pub struct CheckpointPlan {
    pub path: PathBuf,
    pub interval: Duration,
    pub stop_after: Option<usize>,
}

struct Shared {
    stats: EnumStats,
    acc: Acc,
    done: Vec<bool>,
    completed: usize,
    last_write: Instant,
}

fn snapshot(p: usize, shared: &Shared, items: &[crate::tau::TauPrefix]) -> Checkpoint {
    let mut late = shared.acc.late.clone();
    late.sort();
    Checkpoint {
        period: p,
        stats: shared.stats.clone(),
        tally: shared.acc.tally,
        late,
        pending: items
            .iter()
            .zip(&shared.done)
            .filter(|(_, &d)| !d)
            .map(|(t, _)| t.clone())
            .collect(),
    }
}

/// Enumerates period `p` on `workers` threads, optionally snapshotting to a
/// checkpoint and optionally continuing from one.
pub fn enumerate_period(
    p: usize,
    workers: usize,
    plan: Option<&CheckpointPlan>,
    resume: Option<Checkpoint>,
) -> Result<PeriodRun> {
    let search = Enumerator::new(p)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let mut stats;
    let mut head = Acc::default();
    let frontier = match resume {
        Some(cp) => {
            if cp.period != p {
                return Err(Error::Usage(format!(
                    "checkpoint is for period {}, not {p}",
                    cp.period
                )));
            }
            stats = cp.stats;
            head.tally = cp.tally;
            head.late = cp.late;
            cp.pending
                .iter()
                .map(|t| search.restore(t))
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            stats = EnumStats::new(p);
            let mut emit = |t: &PeriodicTau, spines: u64| {
                let inv = invariants::invariants_with_spines(t, spines)?;
                head.visit(t, &inv)
            };
            let start = search.start(&mut stats, &mut emit)?;
            search.split(start, SPLIT_TARGET, &mut stats, &mut emit)?
        }
    };

    let items: Vec<_> = frontier.iter().map(|w| w.prefix()).collect();
    let shared = Mutex::new(Shared {
        stats,
        acc: head,
        done: vec![false; items.len()],
        completed: 0,
        last_write: Instant::now(),
    });
    if let Some(plan) = plan {
        snapshot(p, &shared.lock().unwrap(), &items).write(&plan.path)?;
    }

    let stop = AtomicBool::new(false);
    pool.install(|| {
        frontier
            .into_par_iter()
            .enumerate()
            .try_for_each(|(i, item)| -> Result<()> {
                if stop.load(Ordering::Relaxed) {
                    return Ok(());
                }
                let mut local = EnumStats::new(p);
                let mut acc = Acc::default();
                let mut emit = |t: &PeriodicTau, spines: u64| {
                    let inv = invariants::invariants_with_spines(t, spines)?;
                    acc.visit(t, &inv)
                };
                search.explore(item, &mut local, &mut emit)?;

                let mut s = shared.lock().unwrap();
                s.stats.merge(&local)?;
                s.acc.absorb(acc)?;
                s.done[i] = true;
                s.completed += 1;
                if let Some(plan) = plan {
                    if plan.stop_after.is_some_and(|n| s.completed >= n) {
                        stop.store(true, Ordering::Relaxed);
                    }
                    if s.last_write.elapsed() >= plan.interval {
                        snapshot(p, &s, &items).write(&plan.path)?;
                        s.last_write = Instant::now();
                    }
                }
                Ok(())
            })
    })?;

    let shared = shared.into_inner().unwrap();
    if let Some(plan) = plan {
        let cp = snapshot(p, &shared, &items);
        cp.write(&plan.path)?;
        if !cp.pending.is_empty() {
            return Err(Error::Interrupted {
                pending: cp.pending.len(),
            });
        }
    }
    let mut late = shared.acc.late;
    late.sort();
    Ok(PeriodRun {
        stats: shared.stats,
        tally: shared.acc.tally,
        late,
    })
}

/// Checks the enumerated late-closing taus against the closed forms.
pub fn verify_exceptions(p: usize, late: &[PeriodicTau]) -> Result<()> {
    if p < 5 {
        return Ok(());
    }
    let expected: BTreeSet<_> = periodic::exception_families(p)?.into_iter().collect();
    let found: BTreeSet<_> = late
        .iter()
        .filter(|t| t.minimal_len() + 5 > 2 * p)
        .cloned()
        .collect();
    if expected != found {
        return Err(Error::ExceptionMismatch { period: p });
    }
    Ok(())
}

/// Reports for the configured periods, in increasing order.
pub fn reports(config: &RunConfig) -> Result<Vec<PeriodReport>> {
    config.validate()?;
    let (targets, top): (Vec<usize>, usize) = match config.mode {
        Mode::Period(p) => (vec![p], p),
        Mode::Through(p) => ((1..=p).collect(), p),
    };
    let plan = config.checkpoint.as_ref().map(|path| CheckpointPlan {
        path: path.clone(),
        interval: config.checkpoint_interval,
        stop_after: config.stop_after,
    });
    let resume = config.resume.as_deref().map(Checkpoint::read).transpose()?;

    let needed: BTreeSet<usize> = targets.iter().flat_map(|&p| curve::divisors(p)).collect();
    let mut runs: BTreeMap<usize, PeriodRun> = BTreeMap::new();
    let mut resume = resume;
    for &k in &needed {
        let run = if k == top {
            enumerate_period(k, config.workers, plan.as_ref(), resume.take())?
        } else {
            enumerate_period(k, config.workers, None, None)?
        };
        runs.insert(k, run);
    }

    let tallies: BTreeMap<usize, PeriodTally> = runs.iter().map(|(&k, r)| (k, r.tally)).collect();
    targets
        .iter()
        .map(|&p| {
            let run = &runs[&p];
            if config.verify {
                verify_exceptions(p, &run.late)?;
            }
            let divisor_tallies = curve::divisors(p)
                .into_iter()
                .map(|k| (k, tallies[&k]))
                .collect();
            let mut report = curve::report_from_tallies(p, &divisor_tallies, config.verify)?;
            if config.stats {
                report.stats = Some(run.stats.clone());
            }
            Ok(report)
        })
        .collect()
}

pub const CSV_HEADER: &str = "period,tau_count,central_ends,num_ends,degree,euler_char,neg_ratio";

pub fn csv_row(r: &PeriodReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.period,
        r.tau_count,
        r.central_ends,
        r.num_ends,
        r.degree,
        r.euler_char,
        r.neg_ratio_text()
    )
}

fn stats_table(out: &mut String, stats: &EnumStats) {
    let _ = writeln!(
        out,
        "{:>6} {:>10} {:>10} {:>10}",
        "Length", "Periodic", "Discard", "Continue"
    );
    for r in &stats.rows {
        let _ = writeln!(
            out,
            "{:>6} {:>10} {:>10} {:>10}",
            r.length, r.periodic, r.discard, r.continued
        );
    }
}

pub fn render(reports: &[PeriodReport], format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.into()))?;
            out.push('\n');
        }
        Format::Csv => {
            let _ = writeln!(out, "{CSV_HEADER}");
            for r in reports {
                let _ = writeln!(out, "{}", csv_row(r));
            }
            if reports.iter().any(|r| r.stats.is_some()) {
                let _ = writeln!(out, "\nperiod,length,periodic,discard,continue");
                for r in reports {
                    for row in r.stats.iter().flat_map(|s| &s.rows) {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            r.period, row.length, row.periodic, row.discard, row.continued
                        );
                    }
                }
            }
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "{:>3} {:>10} {:>14} {:>14} {:>14} {:>16} {:>12}",
                "p", "taus", "central ends", "ends", "degree", "chi", "-chi/3^(p-1)"
            );
            for r in reports {
                let _ = writeln!(
                    out,
                    "{:>3} {:>10} {:>14} {:>14} {:>14} {:>16} {:>12}",
                    r.period,
                    r.tau_count,
                    r.central_ends,
                    r.num_ends,
                    r.degree,
                    r.euler_char,
                    r.neg_ratio_text()
                );
            }
            for r in reports {
                if let Some(stats) = &r.stats {
                    let _ = writeln!(out, "\nperiod {}", r.period);
                    stats_table(&mut out, stats);
                }
            }
        }
    }
    Ok(out)
}

/// Runs `config` and writes the rendered output.
pub fn run(config: &RunConfig) -> Result<()> {
    let text = render(&reports(config)?, config.format)?;
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_small() {
        let mut config = RunConfig::new(Mode::Through(4));
        config.format = Format::Csv;
        let text = render(&reports(&config).unwrap(), Format::Csv).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "1,1,1,1,1,2,-2.000");
        assert_eq!(lines[4], "4,6,13,20,24,-28,1.037");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn invalid_configs() {
        let mut c = RunConfig::new(Mode::Period(0));
        assert!(matches!(reports(&c), Err(Error::Usage(_))));
        c.mode = Mode::Through(3);
        c.checkpoint = Some("x".into());
        assert!(matches!(reports(&c), Err(Error::Usage(_))));
        c.mode = Mode::Period(3);
        c.workers = 0;
        assert!(matches!(reports(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let one = enumerate_period(11, 1, None, None).unwrap();
        let four = enumerate_period(11, 4, None, None).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.tally.tau_count, 1406);
    }
}
