//! Discrete-event engine.
//!
//! The wireless uplink is an egalitarian processor-sharing resource: `k`
//! concurrent uploads each progress at `r / k`. It is tracked with a virtual
//! clock counting bits delivered to every active upload; an upload that
//! starts at virtual time `V` finishes when the clock reaches `V + R`.
//! Edge and cloud processors are FIFO single servers. Backhaul and downlink
//! are fixed, uncontended delays.
//!
//! Users are closed-loop: everyone issues task 0 at `t = 0` and the next
//! task the instant the previous result arrives. Offload decisions are
//! taken at arrival from the uncontended estimate.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use super::{generate_tasks, CacheTraceRow, MetricsRecord, Mode, Scenario, TaskRecord};
use crate::cache::CacheStore;
use crate::channel::uplink_rate;
use crate::error::Result;
use crate::offload::{evaluate, LinkProfile, Location, TaskSpec};

/// Processing order among simultaneous events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Arrival,
    UplinkDone,
    EdgeComputeDone,
    BackhaulDone,
    CloudComputeDone,
    DownlinkDone,
}

#[derive(Debug, Clone, Copy)]
struct SimEvent {
    time: f64,
    kind: EventKind,
    task: usize,
}

impl SimEvent {
    fn key(&self) -> (f64, EventKind, usize) {
        (self.time, self.kind, self.task)
    }
}

impl PartialEq for SimEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SimEvent {}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    }
}

/// Time spent by one task in each phase, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseBreakdown {
    pub uplink: f64,
    pub edge_wait: f64,
    pub edge_compute: f64,
    pub backhaul: f64,
    pub cloud_wait: f64,
    pub cloud_compute: f64,
    pub downlink: f64,
}

impl PhaseBreakdown {
    pub fn total(&self) -> f64 {
        self.uplink
            + self.edge_wait
            + self.edge_compute
            + self.backhaul
            + self.cloud_wait
            + self.cloud_compute
            + self.downlink
    }
}

struct SharedUplink {
    solo_rate: f64,
    virtual_bits: f64,
    last_update: f64,
    /// (finish tag, task) for every upload in progress.
    active: Vec<(f64, usize)>,
}

impl SharedUplink {
    fn new(solo_rate: f64) -> Self {
        Self {
            solo_rate,
            virtual_bits: 0.0,
            last_update: 0.0,
            active: Vec::new(),
        }
    }

    fn advance(&mut self, now: f64) {
        if !self.active.is_empty() {
            self.virtual_bits +=
                (now - self.last_update) * self.solo_rate / self.active.len() as f64;
        }
        self.last_update = now;
    }

    fn start(&mut self, now: f64, task: usize, bits: f64) {
        self.advance(now);
        if self.active.is_empty() {
            self.virtual_bits = 0.0;
        }
        self.active.push((self.virtual_bits + bits, task));
    }

    fn next_completion(&self) -> Option<SimEvent> {
        let &(tag, task) = self
            .active
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))?;
        let remaining = (tag - self.virtual_bits).max(0.0);
        Some(SimEvent {
            time: self.last_update + remaining * self.active.len() as f64 / self.solo_rate,
            kind: EventKind::UplinkDone,
            task,
        })
    }

    fn finish(&mut self, now: f64, task: usize) {
        self.advance(now);
        let pos = self
            .active
            .iter()
            .position(|&(_, t)| t == task)
            .expect("task is uploading");
        let (tag, _) = self.active.swap_remove(pos);
        self.virtual_bits = tag;
    }
}

struct FifoServer {
    rate: f64,
    busy: bool,
    queue: VecDeque<(usize, f64)>,
}

impl FifoServer {
    fn new(rate: f64) -> Self {
        Self {
            rate,
            busy: false,
            queue: VecDeque::new(),
        }
    }
}

struct Job {
    user: usize,
    k: usize,
    task: TaskSpec,
    arrival: f64,
    location: Location,
    hit: bool,
    phases: PhaseBreakdown,
}

struct EventSim<'a> {
    scenario: &'a Scenario,
    tasks: Vec<Vec<TaskSpec>>,
    nominal: LinkProfile,
    store: CacheStore,
    now: f64,
    heap: BinaryHeap<Reverse<SimEvent>>,
    uplink: SharedUplink,
    edge: FifoServer,
    cloud: FifoServer,
    jobs: Vec<Job>,
    rows: Vec<TaskRecord>,
    phases: Vec<(u64, PhaseBreakdown)>,
    trace: Vec<CacheTraceRow>,
}

impl<'a> EventSim<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let tasks = generate_tasks(
            scenario.n_users,
            scenario.tasks_per_user,
            &scenario.workload,
            scenario.seed,
        )?;
        let solo = uplink_rate(&scenario.channel)?;
        Ok(Self {
            scenario,
            tasks,
            nominal: LinkProfile {
                uplink_rate_bps: solo,
                downlink_rate_bps: scenario.link.downlink_rate_bps,
                backhaul_latency_s: scenario.link.backhaul_latency_s,
            },
            store: CacheStore::new(scenario.cache_capacity, scenario.metric)?,
            now: 0.0,
            heap: BinaryHeap::new(),
            uplink: SharedUplink::new(solo),
            edge: FifoServer::new(scenario.edge.processing_rate_cps),
            cloud: FifoServer::new(scenario.cloud.processing_rate_cps),
            jobs: Vec::new(),
            rows: Vec::new(),
            phases: Vec::new(),
            trace: Vec::new(),
        })
    }

    fn schedule(&mut self, time: f64, kind: EventKind, task: usize) {
        self.heap.push(Reverse(SimEvent { time, kind, task }));
    }

    fn next_event(&mut self) -> Option<SimEvent> {
        let upload = self.uplink.next_completion();
        let queued = self.heap.peek().map(|Reverse(e)| *e);
        match (upload, queued) {
            (None, None) => None,
            (Some(u), Some(q)) if q < u => self.heap.pop().map(|Reverse(e)| e),
            (None, Some(_)) => self.heap.pop().map(|Reverse(e)| e),
            (Some(u), _) => Some(u),
        }
    }

    fn run(mut self) -> Result<(MetricsRecord, Vec<PhaseBreakdown>)> {
        for user in 0..self.scenario.n_users {
            self.issue(user, 0);
        }
        while let Some(ev) = self.next_event() {
            debug_assert!(ev.time >= self.now);
            self.now = ev.time;
            match ev.kind {
                EventKind::Arrival => self.on_arrival(ev.task)?,
                EventKind::UplinkDone => self.on_uplink_done(ev.task),
                EventKind::EdgeComputeDone => self.on_compute_done(ev.task, Location::Edge)?,
                EventKind::BackhaulDone => self.on_backhaul_done(ev.task),
                EventKind::CloudComputeDone => self.on_compute_done(ev.task, Location::Cloud)?,
                EventKind::DownlinkDone => self.on_downlink_done(ev.task),
            }
        }
        self.phases.sort_by_key(|(id, _)| *id);
        let phases = self.phases.into_iter().map(|(_, p)| p).collect();
        Ok((MetricsRecord::from_rows(self.rows, self.trace), phases))
    }

    fn issue(&mut self, user: usize, k: usize) {
        let idx = self.jobs.len();
        self.jobs.push(Job {
            user,
            k,
            task: self.tasks[user][k].clone(),
            arrival: self.now,
            location: Location::Cloud,
            hit: false,
            phases: PhaseBreakdown::default(),
        });
        self.schedule(self.now, EventKind::Arrival, idx);
    }

    fn on_arrival(&mut self, idx: usize) -> Result<()> {
        if self.scenario.mode == Mode::Cocaco {
            let out = evaluate(
                &self.jobs[idx].task,
                &mut self.store,
                &self.nominal,
                &self.scenario.edge,
                &self.scenario.cloud,
            )?;
            self.trace.push(CacheTraceRow {
                tick: out.lookup.tick,
                best_score: out.lookup.best_score,
                hit: out.lookup.hit,
                matched: out.lookup.matched,
            });
            self.jobs[idx].location = out.location;
            self.jobs[idx].hit = out.cache_hit;
        }
        let bits = self.jobs[idx].task.upload_bits;
        self.uplink.start(self.now, idx, bits);
        Ok(())
    }

    fn on_uplink_done(&mut self, idx: usize) {
        self.uplink.finish(self.now, idx);
        let job = &mut self.jobs[idx];
        job.phases.uplink = self.now - job.arrival;
        match (job.location, job.hit) {
            (Location::Edge, true) => self.start_downlink(idx),
            (Location::Edge, false) => self.enqueue(idx, Location::Edge),
            (Location::Cloud, _) => {
                let alpha = self.scenario.link.backhaul_latency_s;
                self.jobs[idx].phases.backhaul = alpha;
                self.schedule(self.now + alpha, EventKind::BackhaulDone, idx);
            }
        }
    }

    fn on_backhaul_done(&mut self, idx: usize) {
        self.enqueue(idx, Location::Cloud);
    }

    fn server(&mut self, at: Location) -> &mut FifoServer {
        match at {
            Location::Edge => &mut self.edge,
            Location::Cloud => &mut self.cloud,
        }
    }

    fn enqueue(&mut self, idx: usize, at: Location) {
        let now = self.now;
        let server = self.server(at);
        if server.busy {
            server.queue.push_back((idx, now));
        } else {
            self.begin_compute(idx, at, now);
        }
    }

    fn begin_compute(&mut self, idx: usize, at: Location, queued_at: f64) {
        let now = self.now;
        let cycles = self.jobs[idx].task.compute_cycles;
        let server = self.server(at);
        server.busy = true;
        let service = cycles / server.rate;
        let job = &mut self.jobs[idx];
        let (kind, wait, compute) = match at {
            Location::Edge => (
                EventKind::EdgeComputeDone,
                &mut job.phases.edge_wait,
                &mut job.phases.edge_compute,
            ),
            Location::Cloud => (
                EventKind::CloudComputeDone,
                &mut job.phases.cloud_wait,
                &mut job.phases.cloud_compute,
            ),
        };
        *wait = now - queued_at;
        *compute = service;
        self.schedule(now + service, kind, idx);
    }

    fn on_compute_done(&mut self, idx: usize, at: Location) -> Result<()> {
        if self.scenario.mode == Mode::Cocaco {
            let job = &self.jobs[idx];
            self.store
                .admit(job.task.features.clone(), job.task.result_bits)?;
        }
        self.start_downlink(idx);
        let server = self.server(at);
        server.busy = false;
        if let Some((next, queued_at)) = server.queue.pop_front() {
            self.begin_compute(next, at, queued_at);
        }
        Ok(())
    }

    fn start_downlink(&mut self, idx: usize) {
        let d = self.jobs[idx].task.result_bits / self.scenario.link.downlink_rate_bps;
        self.jobs[idx].phases.downlink = d;
        self.schedule(self.now + d, EventKind::DownlinkDone, idx);
    }

    fn on_downlink_done(&mut self, idx: usize) {
        let n = self.scenario.n_users;
        let job = &self.jobs[idx];
        let (user, k) = (job.user, job.k);
        let task_id = (k * n + user) as u64;
        self.rows.push(TaskRecord {
            task_id,
            user_id: user,
            location: job.location,
            hit: job.hit,
            delay_s: self.now - job.arrival,
        });
        self.phases.push((task_id, job.phases));
        if k + 1 < self.scenario.tasks_per_user {
            self.issue(user, k + 1);
        }
    }
}

/// Event-driven run of the scenario.
pub fn run_event(scenario: &Scenario) -> Result<MetricsRecord> {
    run_event_detailed(scenario).map(|(m, _)| m)
}

/// Like [`run_event`], also returning each task's phase breakdown in task-id order.
pub fn run_event_detailed(scenario: &Scenario) -> Result<(MetricsRecord, Vec<PhaseBreakdown>)> {
    EventSim::new(scenario)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_next(link: &mut SharedUplink) -> (f64, usize) {
        let ev = link.next_completion().unwrap();
        link.finish(ev.time, ev.task);
        (ev.time, ev.task)
    }

    #[test]
    fn shorter_upload_leaves_first() {
        // 4 and 1 bits at 1 bit/s: shared until t=2, then 3 bits alone.
        let mut link = SharedUplink::new(1.0);
        link.start(0.0, 0, 4.0);
        link.start(0.0, 1, 1.0);
        assert_eq!(complete_next(&mut link), (2.0, 1));
        assert_eq!(complete_next(&mut link), (5.0, 0));
        assert!(link.next_completion().is_none());
    }

    #[test]
    fn late_joiner_splits_remaining_capacity() {
        // a: 4 bits from t=0; b: 1 bit from t=1. At t=1 a has 3 left;
        // b needs 2 s at half rate, then a has 2 bits alone.
        let mut link = SharedUplink::new(1.0);
        link.start(0.0, 0, 4.0);
        link.start(1.0, 1, 1.0);
        assert_eq!(complete_next(&mut link), (3.0, 1));
        assert_eq!(complete_next(&mut link), (5.0, 0));
    }

    #[test]
    fn equal_uploads_finish_together() {
        let mut link = SharedUplink::new(3.0);
        for t in 0..3 {
            link.start(0.0, t, 6.0);
        }
        let times: Vec<_> = (0..3).map(|_| complete_next(&mut link)).collect();
        assert_eq!(times, vec![(6.0, 0), (6.0, 1), (6.0, 2)]);
    }

    #[test]
    fn event_order_breaks_ties_by_kind_then_task() {
        let e = |time, kind, task| SimEvent { time, kind, task };
        let mut v = [
            e(1.0, EventKind::DownlinkDone, 0),
            e(1.0, EventKind::Arrival, 5),
            e(0.5, EventKind::CloudComputeDone, 9),
            e(1.0, EventKind::Arrival, 2),
        ];
        v.sort();
        let keys: Vec<_> = v.iter().map(|e| (e.kind, e.task)).collect();
        assert_eq!(
            keys,
            vec![
                (EventKind::CloudComputeDone, 9),
                (EventKind::Arrival, 2),
                (EventKind::Arrival, 5),
                (EventKind::DownlinkDone, 0)
            ]
        );
    }
}
