use std::time::Duration;

use cubic_euler::checkpoint::Checkpoint;
use cubic_euler::curve::PeriodTally;
use cubic_euler::invariants::invariants_of;
use cubic_euler::periodic::{EnumStats, Enumerator, PeriodicTau};
use cubic_euler::runner::{enumerate_period, CheckpointPlan};
use cubic_euler::tau::TauPrefix;
use cubic_euler::Error;

/// Runs the first `done` subtrees of a `split`-item frontier by hand and
/// returns a checkpoint holding the rest.
fn partial(p: usize, split: usize, done: usize) -> Checkpoint {
    let search = Enumerator::new(p).unwrap();
    let mut stats = EnumStats::new(p);
    let mut tally = PeriodTally::default();
    let mut late = Vec::new();
    let mut emit = |t: &PeriodicTau, _spines: u64| {
        tally.add(&invariants_of(t)?)?;
        if t.minimal_len() + 4 >= 2 * p {
            late.push(t.clone());
        }
        Ok(())
    };
    let start = search.start(&mut stats, &mut emit).unwrap();
    let mut frontier = search.split(start, split, &mut stats, &mut emit).unwrap();
    assert!(frontier.len() > done);
    let rest = frontier.split_off(done);
    for item in frontier {
        search.explore(item, &mut stats, &mut emit).unwrap();
    }
    late.sort();
    Checkpoint {
        period: p,
        stats,
        tally,
        late,
        pending: rest.iter().map(|w| w.prefix()).collect(),
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p10.ckpt");
    let cp = partial(10, 40, 7);
    cp.write(&path).unwrap();
    assert_eq!(Checkpoint::read(&path).unwrap(), cp);
}

#[test]
fn resume_mid_run_period_ten() {
    let cp = partial(10, 40, 7);
    assert!(cp.tally.tau_count < 649);
    let resumed = enumerate_period(10, 2, None, Some(cp)).unwrap();
    assert_eq!(resumed.tally.tau_count, 649);
    assert_eq!(resumed, enumerate_period(10, 1, None, None).unwrap());
}

#[test]
fn immediate_resume_keeps_stats() {
    let cp = partial(9, 30, 0);
    let text = cp.render();
    let back = Checkpoint::parse(&text).unwrap();
    assert_eq!(back.stats, cp.stats);
    let resumed = enumerate_period(9, 1, None, Some(back)).unwrap();
    assert_eq!(resumed.tally.tau_count, 308);
}

#[test]
fn interrupted_run_resumes_to_the_same_result() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p14.ckpt");
    let plan = CheckpointPlan {
        path: path.clone(),
        interval: Duration::from_secs(3600),
        stop_after: Some(50),
    };
    let err = enumerate_period(14, 1, Some(&plan), None).unwrap_err();
    assert!(matches!(err, Error::Interrupted { .. }));
    let cp = Checkpoint::read(&path).unwrap();
    assert!(!cp.pending.is_empty());

    let resumed = enumerate_period(14, 2, None, Some(cp)).unwrap();
    assert_eq!(resumed, enumerate_period(14, 4, None, None).unwrap());
    assert_eq!(resumed.tally.tau_count, 13636);
}

#[test]
fn wrong_period_is_rejected() {
    let cp = partial(10, 40, 7);
    let err = enumerate_period(11, 1, None, Some(cp)).unwrap_err();
    assert!(matches!(err, Error::Usage(_)));
}

#[test]
fn corrupt_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ckpt");
    std::fs::write(&path, "CUBIC-EULER v1 period=10\n0,1,2\n0,1\nEND 3\n").unwrap();
    assert!(matches!(
        Checkpoint::read(&path),
        Err(Error::Checkpoint { line: 4, .. })
    ));
    std::fs::write(&path, "CUBIC-EULER v0 period=10\nEND 0\n").unwrap();
    assert!(matches!(
        Checkpoint::read(&path),
        Err(Error::Checkpoint { line: 1, .. })
    ));
}

#[test]
fn non_pending_items_are_rejected() {
    // a finished period-10 tau is not a work item
    let mut cp = Checkpoint::new(10);
    cp.pending
        .push(TauPrefix::new(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 0]).unwrap());
    assert!(enumerate_period(10, 1, None, Some(cp)).is_err());
    let mut cp = Checkpoint::new(10);
    cp.pending
        .push(TauPrefix::new(&(0..17).collect::<Vec<_>>()).unwrap());
    assert!(enumerate_period(10, 1, None, Some(cp)).is_err());
}
