//! Plain-text snapshot of an interrupted enumeration.
//!
//! ```text
//! CUBIC-EULER v1 period=12
//! STATS 12 205 1 435
//! TALLY 1200 30000 31000
//! LATE 0,1,2,...
//! 0,1,0,1
//! END 1
//! ```
//!
//! `STATS`, `TALLY` and `LATE` carry what the finished part of the search
//! already produced; every other line before `END` is a pending work item.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::curve::PeriodTally;
use crate::error::{Error, Result};
use crate::periodic::{EnumStats, PeriodicTau};
use crate::tau::TauPrefix;

const MAGIC: &str = "CUBIC-EULER v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub period: usize,
    pub stats: EnumStats,
    pub tally: PeriodTally,
    /// Taus already emitted whose minimal prefix has length `>= 2p - 4`.
    pub late: Vec<PeriodicTau>,
    pub pending: Vec<TauPrefix>,
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl Checkpoint {
    pub fn new(period: usize) -> Self {
        Checkpoint {
            period,
            stats: EnumStats::new(period),
            tally: PeriodTally::default(),
            late: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{MAGIC} period={}\n", self.period);
        for r in &self.stats.rows {
            out += &format!(
                "STATS {} {} {} {}\n",
                r.length, r.periodic, r.discard, r.continued
            );
        }
        let t = &self.tally;
        out += &format!(
            "TALLY {} {} {}\n",
            t.tau_count, t.ends_weight, t.degree_weight
        );
        for tau in &self.late {
            out += &format!("LATE {}\n", join(&tau.prefix().values()));
        }
        for item in &self.pending {
            out += &format!("{}\n", join(&item.values()));
        }
        out += &format!("END {}\n", self.pending.len());
        out
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path)?;
        Checkpoint::parse(&text).map_err(|(line, reason)| Error::Checkpoint {
            path: path.to_owned(),
            line,
            reason,
        })
    }

    /// Parses `text`; errors carry a 1-based line number.
    pub fn parse(text: &str) -> std::result::Result<Checkpoint, (usize, String)> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or((1, "empty file".to_string()))?;
        let period = header
            .strip_prefix(MAGIC)
            .and_then(|rest| rest.strip_prefix(" period="))
            .ok_or((1, format!("expected header `{MAGIC} period=<p>`")))?
            .parse::<usize>()
            .map_err(|e| (1, format!("bad period: {e}")))?;
        if period == 0 {
            return Err((1, "period must be positive".into()));
        }
        let mut cp = Checkpoint::new(period);

        let numbers =
            |line: usize, s: &str, want: usize| -> std::result::Result<Vec<u64>, (usize, String)> {
                let v = s
                    .split_whitespace()
                    .map(str::parse::<u64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| (line, e.to_string()))?;
                if v.len() != want {
                    return Err((line, format!("expected {want} numbers")));
                }
                Ok(v)
            };
        let values = |line: usize, s: &str| -> std::result::Result<Vec<usize>, (usize, String)> {
            s.split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| (line, format!("bad value list: {e}")))
        };

        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("STATS ") {
                let v = numbers(n, rest, 4)?;
                let row = cp
                    .stats
                    .rows
                    .iter_mut()
                    .find(|r| r.length as u64 == v[0])
                    .ok_or((n, format!("length {} outside p..=2p-2", v[0])))?;
                row.periodic = v[1];
                row.discard = v[2];
                row.continued = v[3];
            } else if let Some(rest) = line.strip_prefix("TALLY ") {
                let v = numbers(n, rest, 3)?;
                cp.tally = PeriodTally {
                    tau_count: v[0],
                    ends_weight: v[1],
                    degree_weight: v[2],
                };
            } else if let Some(rest) = line.strip_prefix("LATE ") {
                let tau = PeriodicTau::from_values(&values(n, rest)?, period)
                    .map_err(|e| (n, e.to_string()))?;
                cp.late.push(tau);
            } else if let Some(rest) = line.strip_prefix("END ") {
                let count: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| (n, "bad END count".to_string()))?;
                if count != cp.pending.len() {
                    return Err((
                        n,
                        format!("END says {count} items, found {}", cp.pending.len()),
                    ));
                }
                return Ok(cp);
            } else {
                let item = TauPrefix::new(&values(n, line)?).map_err(|e| (n, e.to_string()))?;
                cp.pending.push(item);
            }
        }
        Err((text.lines().count() + 1, "missing END line".into()))
    }
}
