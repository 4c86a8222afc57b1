use crate::cache::EntryId;
use crate::offload::Location;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskRecord {
    pub task_id: u64,
    pub user_id: usize,
    pub location: Location,
    pub hit: bool,
    pub delay_s: f64,
}

/// One row per cache lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheTraceRow {
    pub tick: u64,
    pub best_score: f64,
    pub hit: bool,
    pub matched: Option<EntryId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// Sorted by task id.
    pub rows: Vec<TaskRecord>,
    pub mean_delay_s: f64,
    pub p50_delay_s: f64,
    pub p95_delay_s: f64,
    pub hit_ratio: f64,
    pub cache_trace: Vec<CacheTraceRow>,
}

impl MetricsRecord {
    pub fn from_rows(mut rows: Vec<TaskRecord>, cache_trace: Vec<CacheTraceRow>) -> Self {
        rows.sort_by_key(|r| r.task_id);
        let n = rows.len();
        let mut delays: Vec<f64> = rows.iter().map(|r| r.delay_s).collect();
        let mean = if n == 0 {
            0.0
        } else {
            delays.iter().sum::<f64>() / n as f64
        };
        delays.sort_by(f64::total_cmp);
        let hits = rows.iter().filter(|r| r.hit).count();
        Self {
            mean_delay_s: mean,
            p50_delay_s: nearest_rank(&delays, 0.50),
            p95_delay_s: nearest_rank(&delays, 0.95),
            hit_ratio: if n == 0 { 0.0 } else { hits as f64 / n as f64 },
            rows,
            cache_trace,
        }
    }
}

/// Nearest-rank percentile of an ascending slice.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: u64, delay: f64, hit: bool) -> TaskRecord {
        TaskRecord {
            task_id: id,
            user_id: 0,
            location: Location::Edge,
            hit,
            delay_s: delay,
        }
    }

    #[test]
    fn aggregates() {
        let rows: Vec<_> = (0..20)
            .rev()
            .map(|i| row(i, (i + 1) as f64, i % 4 == 0))
            .collect();
        let m = MetricsRecord::from_rows(rows, Vec::new());
        assert_eq!(m.rows[0].task_id, 0);
        assert_eq!(m.mean_delay_s, 10.5);
        assert_eq!(m.p50_delay_s, 10.0);
        assert_eq!(m.p95_delay_s, 19.0);
        assert_eq!(m.hit_ratio, 0.25);
    }

    #[test]
    fn empty() {
        let m = MetricsRecord::from_rows(Vec::new(), Vec::new());
        assert_eq!(
            (m.mean_delay_s, m.p95_delay_s, m.hit_ratio),
            (0.0, 0.0, 0.0)
        );
    }
}
