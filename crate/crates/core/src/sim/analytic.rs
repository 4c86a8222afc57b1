use super::{generate_tasks, CacheTraceRow, MetricsRecord, Mode, Scenario, TaskRecord};
use crate::cache::CacheStore;
use crate::channel::shared_uplink_rate;
use crate::error::Result;
use crate::offload::{decide, delay_traditional, LinkProfile, Location};

/// Closed-form evaluation of every task, with the uplink split evenly
/// among all users for the whole run. The cache evolves in round-robin
/// task order.
pub fn run_analytic(scenario: &Scenario) -> Result<MetricsRecord> {
    scenario.validate()?;
    let n = scenario.n_users;
    let tasks = generate_tasks(
        n,
        scenario.tasks_per_user,
        &scenario.workload,
        scenario.seed,
    )?;
    let link = LinkProfile {
        uplink_rate_bps: shared_uplink_rate(&scenario.channel, n)?,
        downlink_rate_bps: scenario.link.downlink_rate_bps,
        backhaul_latency_s: scenario.link.backhaul_latency_s,
    };
    let mut store = CacheStore::new(scenario.cache_capacity, scenario.metric)?;
    let mut rows = Vec::with_capacity(n * scenario.tasks_per_user);
    let mut trace = Vec::new();

    for k in 0..scenario.tasks_per_user {
        for (user, user_tasks) in tasks.iter().enumerate() {
            let task = &user_tasks[k];
            let task_id = (k * n + user) as u64;
            let row = match scenario.mode {
                Mode::Cocaco => {
                    let out = decide(task, &mut store, &link, &scenario.edge, &scenario.cloud)?;
                    trace.push(CacheTraceRow {
                        tick: out.lookup.tick,
                        best_score: out.lookup.best_score,
                        hit: out.lookup.hit,
                        matched: out.lookup.matched,
                    });
                    TaskRecord {
                        task_id,
                        user_id: user,
                        location: out.location,
                        hit: out.cache_hit,
                        delay_s: out.chosen_delay,
                    }
                }
                Mode::Traditional => TaskRecord {
                    task_id,
                    user_id: user,
                    location: Location::Cloud,
                    hit: false,
                    delay_s: delay_traditional(task, &link, &scenario.cloud)?,
                },
            };
            rows.push(row);
        }
    }
    Ok(MetricsRecord::from_rows(rows, trace))
}
