use std::thread;

use super::{Mode, Scenario, WorkloadKind, WorkloadSpec};
use crate::error::Result;

/// Image widths of the task-size sweep.
pub const FIG3_WIDTHS_PX: [u32; 10] = [16, 32, 48, 64, 80, 96, 112, 128, 144, 160];
/// User counts of the concurrency sweep.
pub const FIG4_USERS: [usize; 7] = [5, 10, 15, 20, 25, 30, 35];
const FIG4_WIDTH_PX: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: u64,
    pub cocaco_mean_s: f64,
    pub traditional_mean_s: f64,
}

fn paired(x: u64, scenario: Scenario) -> Result<SweepRow> {
    let cocaco = Scenario {
        mode: Mode::Cocaco,
        ..scenario.clone()
    }
    .run()?;
    let traditional = Scenario {
        mode: Mode::Traditional,
        ..scenario
    }
    .run()?;
    Ok(SweepRow {
        x,
        cocaco_mean_s: cocaco.mean_delay_s,
        traditional_mean_s: traditional.mean_delay_s,
    })
}

fn run_points(points: Vec<(u64, Scenario)>) -> Result<Vec<SweepRow>> {
    thread::scope(|s| {
        let handles: Vec<_> = points
            .into_iter()
            .map(|(x, sc)| s.spawn(move || paired(x, sc)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep point panicked"))
            .collect()
    })
}

/// Task-size sweep: one fixed-width scenario per width, both modes, same seed.
/// Widths come from the base workload when it is an image sweep.
pub fn experiment_fig3(base: &Scenario) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let widths = match base.workload.kind {
        WorkloadKind::ImageSweep => base.workload.image_widths_px.clone(),
        WorkloadKind::FixedImage => FIG3_WIDTHS_PX.to_vec(),
    };
    let points = widths
        .into_iter()
        .map(|w| {
            let workload = WorkloadSpec {
                kind: WorkloadKind::FixedImage,
                image_widths_px: Vec::new(),
                image_width_px: Some(w),
                ..base.workload.clone()
            };
            (
                u64::from(w),
                Scenario {
                    workload,
                    ..base.clone()
                },
            )
        })
        .collect();
    run_points(points)
}

/// Concurrency sweep: every user sends the same 16x16 request.
pub fn experiment_fig4(base: &Scenario) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let workload = WorkloadSpec {
        kind: WorkloadKind::FixedImage,
        image_widths_px: Vec::new(),
        image_width_px: Some(FIG4_WIDTH_PX),
        repeat_probability: 1.0,
        ..base.workload.clone()
    };
    let points = FIG4_USERS
        .iter()
        .map(|&n| {
            let sc = Scenario {
                n_users: n,
                workload: workload.clone(),
                ..base.clone()
            };
            (n as u64, sc)
        })
        .collect();
    run_points(points)
}
