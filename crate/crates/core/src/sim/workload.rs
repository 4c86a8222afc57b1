use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cache::FeatureVector;
use crate::error::{require_non_negative, ModelError, Result};
use crate::offload::TaskSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadKind {
    /// Task `k` of every user uses `image_widths_px[k % len]`.
    ImageSweep,
    /// Every task uses `image_width_px`.
    FixedImage,
}

/// Synthetic image-processing workload. An image of width `w` uploads
/// `w^2 * bits_per_pixel` bits and needs `w^2 * cycles_per_pixel` cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub image_widths_px: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_width_px: Option<u32>,
    pub bits_per_pixel: f64,
    pub cycles_per_pixel: f64,
    pub result_bits: f64,
    pub feature_dim: usize,
    /// Chance that a task reuses a previously issued feature vector.
    pub repeat_probability: f64,
}

impl WorkloadSpec {
    pub fn fixed(width_px: u32) -> Self {
        Self {
            kind: WorkloadKind::FixedImage,
            image_widths_px: Vec::new(),
            image_width_px: Some(width_px),
            bits_per_pixel: 24.0,
            cycles_per_pixel: 1e4,
            result_bits: 1024.0,
            feature_dim: 32,
            repeat_probability: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            WorkloadKind::ImageSweep => {
                if self.image_widths_px.is_empty() {
                    return Err(ModelError::domain(
                        "image_widths_px",
                        "image_sweep needs at least one width",
                    ));
                }
                if self.image_widths_px.contains(&0) {
                    return Err(ModelError::domain("image_widths_px", "widths must be > 0"));
                }
            }
            WorkloadKind::FixedImage => match self.image_width_px {
                None => {
                    return Err(ModelError::domain(
                        "image_width_px",
                        "required for fixed_image",
                    ))
                }
                Some(0) => return Err(ModelError::domain("image_width_px", "must be > 0")),
                Some(_) => {}
            },
        }
        require_non_negative("bits_per_pixel", self.bits_per_pixel)?;
        require_non_negative("cycles_per_pixel", self.cycles_per_pixel)?;
        require_non_negative("result_bits", self.result_bits)?;
        if self.feature_dim == 0 {
            return Err(ModelError::domain("feature_dim", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.repeat_probability) {
            return Err(ModelError::domain(
                "repeat_probability",
                format!("must lie in [0, 1], got {}", self.repeat_probability),
            ));
        }
        Ok(())
    }

    /// Image width of a user's `k`-th task.
    pub fn width_for(&self, k: usize) -> u32 {
        match self.kind {
            WorkloadKind::ImageSweep => self.image_widths_px[k % self.image_widths_px.len()],
            WorkloadKind::FixedImage => self.image_width_px.unwrap_or(0),
        }
    }
}

/// Seeded generator state plus every feature vector issued so far.
#[derive(Debug, Clone)]
pub struct WorkloadState {
    rng: ChaCha8Rng,
    history: Vec<FeatureVector>,
}

impl WorkloadState {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            history: Vec::new(),
        }
    }
}

pub fn make_task(
    width_px: u32,
    spec: &WorkloadSpec,
    state: &mut WorkloadState,
) -> Result<TaskSpec> {
    if width_px == 0 {
        return Err(ModelError::domain("image_width_px", "must be > 0"));
    }
    let pixels = f64::from(width_px) * f64::from(width_px);

    let reuse = !state.history.is_empty() && state.rng.random_bool(spec.repeat_probability);
    let features = if reuse {
        let pick = state.rng.random_range(0..state.history.len());
        state.history[pick].clone()
    } else {
        let fresh: Vec<f64> = (0..spec.feature_dim)
            .map(|_| state.rng.random::<f64>())
            .collect();
        let fresh = FeatureVector::new(fresh)?;
        state.history.push(fresh.clone());
        fresh
    };

    Ok(TaskSpec {
        upload_bits: pixels * spec.bits_per_pixel,
        compute_cycles: pixels * spec.cycles_per_pixel,
        result_bits: spec.result_bits,
        features,
    })
}

/// All tasks of a run indexed `[user][k]`, drawn in round-robin order
/// (user 0 task 0, user 1 task 0, ..., user 0 task 1, ...).
pub fn generate_tasks(
    n_users: usize,
    tasks_per_user: usize,
    spec: &WorkloadSpec,
    seed: u64,
) -> Result<Vec<Vec<TaskSpec>>> {
    spec.validate()?;
    let mut state = WorkloadState::new(seed);
    let mut tasks: Vec<Vec<TaskSpec>> = (0..n_users)
        .map(|_| Vec::with_capacity(tasks_per_user))
        .collect();
    for k in 0..tasks_per_user {
        for user in tasks.iter_mut() {
            user.push(make_task(spec.width_for(k), spec, &mut state)?);
        }
    }
    Ok(tasks)
}
