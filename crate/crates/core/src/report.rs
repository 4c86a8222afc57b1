//! CSV and plot-data emission.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::offload::DecisionOutcome;
use crate::sim::{CacheTraceRow, MetricsRecord, SweepRow};

/// Formats `v` with `digits` significant digits, `%g` style: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub fn decide_csv(out: &DecisionOutcome, precision: usize) -> String {
    format!(
        "location,T_LtoE_s,T_LtoC_s,hit\n{},{},{},{}\n",
        out.location,
        fmt_sig(out.delay_edge, precision),
        fmt_sig(out.delay_cloud, precision),
        flag(out.cache_hit),
    )
}

/// Per-task rows followed by aggregate footer rows that reuse the first and
/// last columns: `<aggregate name>,,,,<value>`.
pub fn run_csv(m: &MetricsRecord, precision: usize) -> String {
    let mut s = String::from("task_id,user_id,location,hit,delay_s\n");
    for r in &m.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.task_id,
            r.user_id,
            r.location,
            flag(r.hit),
            fmt_sig(r.delay_s, precision)
        );
    }
    for (name, v) in [
        ("mean_delay_s", m.mean_delay_s),
        ("p50_delay_s", m.p50_delay_s),
        ("p95_delay_s", m.p95_delay_s),
        ("hit_ratio", m.hit_ratio),
    ] {
        let _ = writeln!(s, "{name},,,,{}", fmt_sig(v, precision));
    }
    s
}

pub fn trace_csv(trace: &[CacheTraceRow], precision: usize) -> String {
    let mut s = String::from("tick,best_score,hit,matched_id\n");
    for t in trace {
        let matched = t.matched.map(|id| id.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{}",
            t.tick,
            fmt_sig(t.best_score, precision),
            flag(t.hit),
            matched
        );
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow], precision: usize) -> String {
    let mut s = String::from("x,cocaco_mean_s,traditional_mean_s\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{}",
            r.x,
            fmt_sig(r.cocaco_mean_s, precision),
            fmt_sig(r.traditional_mean_s, precision)
        );
    }
    s
}

/// Whitespace-delimited columns with a `#` header, readable by gnuplot.
pub fn plot_data(rows: &[SweepRow], x_label: &str, precision: usize) -> String {
    let mut s = format!("# {x_label} cocaco_mean_s traditional_mean_s\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{} {} {}",
            r.x,
            fmt_sig(r.cocaco_mean_s, precision),
            fmt_sig(r.traditional_mean_s, precision)
        );
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
