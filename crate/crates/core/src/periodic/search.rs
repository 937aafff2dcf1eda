use crate::error::{Error, Result};
use crate::invariants::SpineContext;
use crate::tau::{self, LevelSet, TauPrefix};

use super::{EnumStats, Outcome, PeriodicTau};

/// Largest supported period; continued prefixes reach length `2p - 2`.
pub const MAX_PERIOD: usize = 32;

const CAP: usize = 2 * MAX_PERIOD;

/// A node of the search tree: a prefix still to be expanded.
///
/// Prefixes of length `>= p` held as work items are Continue items and have
/// already been counted; shorter ones are below the classification depth.
#[derive(Clone)]
pub struct WorkItem {
    values: [u8; CAP],
    len: u8,
    markers: LevelSet,
    marked: LevelSet,
    /// Product of the spine factors of all steps so far.
    spines: u64,
    /// Largest `tau(m)` over the markers so far.
    max_marker_level: Option<u8>,
}

impl WorkItem {
    fn root() -> Self {
        let mut marked = LevelSet::new();
        marked.insert(0);
        WorkItem {
            values: [0; CAP],
            len: 1,
            markers: LevelSet::new(),
            marked,
            spines: 1,
            max_marker_level: None,
        }
    }

    #[inline]
    fn values(&self) -> &[u8] {
        &self.values[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prefix(&self) -> TauPrefix {
        TauPrefix::from_bytes_unchecked(self.values())
    }

    fn child(&self, value: usize, factor: u64) -> Result<WorkItem> {
        let n = self.len as usize;
        let mut child = self.clone();
        child.values[n] = value as u8;
        child.len += 1;
        if value <= self.values[n - 1] as usize {
            child.markers.insert(n);
            child.max_marker_level = child.max_marker_level.max(Some(self.values[n - 1]));
            let mut x = n;
            while x > 0 {
                x = tau::at(&child.values, x);
                child.marked.insert(x);
            }
        }
        child.spines = self
            .spines
            .checked_mul(factor)
            .ok_or(Error::Overflow("spines"))?;
        Ok(child)
    }

    /// Some marker of the prefix sits above level `floor`; without one, no
    /// extension can still return to `tau(n) = n - p`.
    #[inline]
    fn marker_above(&self, floor: usize) -> bool {
        self.max_marker_level.is_some_and(|m| m as usize > floor)
    }
}

/// Pruned depth-first search for the tau-functions of one period.
#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    period: usize,
}

impl Enumerator {
    pub fn new(period: usize) -> Result<Self> {
        if period == 0 || period > MAX_PERIOD {
            return Err(Error::UnsupportedPeriod(period));
        }
        Ok(Enumerator { period })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Initial frontier. Period 1 has a single tau, `(0)`, which is emitted
    /// here and leaves nothing to expand.
    pub fn start<F>(&self, stats: &mut EnumStats, emit: &mut F) -> Result<Vec<WorkItem>>
    where
        F: FnMut(&PeriodicTau, u64) -> Result<()>,
    {
        if self.period == 1 {
            stats.record(1, Outcome::Periodic)?;
            emit(&PeriodicTau::new_unchecked(TauPrefix::root(), 1), 1)?;
            return Ok(Vec::new());
        }
        Ok(vec![WorkItem::root()])
    }

    /// Classifies every admissible child of `node`, emitting periodic ones and
    /// pushing the ones to expand further onto `children` (in search order).
    pub fn expand<F>(
        &self,
        node: &WorkItem,
        stats: &mut EnumStats,
        emit: &mut F,
        children: &mut Vec<WorkItem>,
    ) -> Result<()>
    where
        F: FnMut(&PeriodicTau, u64) -> Result<()>,
    {
        let p = self.period;
        let n = node.len();
        let ctx = SpineContext::from_parts(node.values(), &node.marked);
        let ladder = ctx.ladder();

        if n + 1 < p {
            for i in 0..ladder.choices() {
                let child = node.child(ladder.choice_value(i), ctx.factor(i)?)?;
                children.push(child);
            }
        } else if n + 1 == p {
            for i in 0..ladder.choices() {
                let value = ladder.choice_value(i);
                let child = node.child(value, ctx.factor(i)?)?;
                if value == 0 {
                    stats.record(p, Outcome::Periodic)?;
                    self.emit_child(&child, emit)?;
                } else if child.markers.is_empty() {
                    stats.record(p, Outcome::Discard)?;
                } else {
                    stats.record(p, Outcome::Continue)?;
                    children.push(child);
                }
            }
        } else {
            // tau(n+1) = l_i + 1 with l_i = n - p closes the period; larger
            // l_i may still reach it later, smaller ones (and 0) never do
            let floor = n - p;
            let may_continue = n + 3 < 2 * p && node.marker_above(floor);
            for i in 0..ladder.choices() {
                let value = ladder.choice_value(i);
                if value == floor + 1 {
                    stats.record(n + 1, Outcome::Periodic)?;
                    let child = node.child(value, ctx.factor(i)?)?;
                    self.emit_child(&child, emit)?;
                } else if value > floor + 1 && may_continue {
                    stats.record(n + 1, Outcome::Continue)?;
                    children.push(node.child(value, ctx.factor(i)?)?);
                } else {
                    stats.record(n + 1, Outcome::Discard)?;
                }
            }
        }
        Ok(())
    }

    fn emit_child<F>(&self, child: &WorkItem, emit: &mut F) -> Result<()>
    where
        F: FnMut(&PeriodicTau, u64) -> Result<()>,
    {
        let prefix = child.prefix();
        if let Some(level) = child.marked.max().filter(|&l| l >= self.period) {
            return Err(Error::MarkedLevelTooHigh {
                values: prefix.values(),
                period: self.period,
                level,
            });
        }
        emit(
            &PeriodicTau::new_unchecked(prefix, self.period),
            child.spines,
        )
    }

    /// Depth-first expansion of the subtree under `item`.
    pub fn explore<F>(&self, item: WorkItem, stats: &mut EnumStats, emit: &mut F) -> Result<()>
    where
        F: FnMut(&PeriodicTau, u64) -> Result<()>,
    {
        let mut stack = vec![item];
        let mut children = Vec::new();
        while let Some(node) = stack.pop() {
            self.expand(&node, stats, emit, &mut children)?;
            stack.extend(children.drain(..).rev());
        }
        Ok(())
    }

    /// Breadth-first expansion of `frontier` until it holds at least `target`
    /// items or runs dry.
    pub fn split<F>(
        &self,
        mut frontier: Vec<WorkItem>,
        target: usize,
        stats: &mut EnumStats,
        emit: &mut F,
    ) -> Result<Vec<WorkItem>>
    where
        F: FnMut(&PeriodicTau, u64) -> Result<()>,
    {
        while !frontier.is_empty() && frontier.len() < target {
            let mut next = Vec::new();
            for node in &frontier {
                self.expand(node, stats, emit, &mut next)?;
            }
            frontier = next;
        }
        Ok(frontier)
    }

    /// Rebuilds a work item from its values, replaying the spine factors.
    ///
    /// The prefix must be a node this search could hold: admissible, shorter
    /// than `2p - 2`, and when of length `>= p` a Continue item.
    pub fn restore(&self, prefix: &TauPrefix) -> Result<WorkItem> {
        let p = self.period;
        let invalid = || Error::NotPeriodic {
            values: prefix.values(),
            period: p,
            reason: "not a pending work item of this period",
        };
        let n = prefix.len();
        if p == 1 || n + 3 > 2 * p {
            return Err(invalid());
        }
        let mut node = WorkItem::root();
        for j in 2..=n {
            let ctx = SpineContext::from_parts(node.values(), &node.marked);
            let value = prefix.tau(j);
            let choice = ctx.ladder().choice_of(value).ok_or_else(invalid)?;
            let parent_marker_above = j > p && node.marker_above(j - 1 - p);
            node = node.child(value, ctx.factor(choice)?)?;
            let pending = match j.cmp(&p) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => value != 0 && !node.markers.is_empty(),
                std::cmp::Ordering::Greater => value + p > j && parent_marker_above,
            };
            if !pending {
                return Err(invalid());
            }
        }
        Ok(node)
    }
}
