//! Wireless uplink rate model.
//!
//! The achievable rate of a device-to-edge uplink is the Shannon capacity
//! `B * log2(1 + p * h^2 / sigma^2)`. Concurrent uploaders split the
//! bandwidth equally; since the noise power is a fixed total rather than a
//! spectral density, each of `n` uploaders sees exactly `1/n` of the solo rate.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, ModelError, Result};

/// Physical-layer parameters of the device-to-edge uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Channel bandwidth in hertz.
    pub bandwidth_hz: f64,
    /// Device transmit power in watts.
    pub tx_power_w: f64,
    /// Channel gain as an amplitude; squared inside the rate formula.
    pub channel_gain: f64,
    /// Noise power in watts.
    pub noise_power_w: f64,
}

impl ChannelParams {
    pub fn new(bandwidth_hz: f64, tx_power_w: f64, channel_gain: f64, noise_power_w: f64) -> Self {
        Self {
            bandwidth_hz,
            tx_power_w,
            channel_gain,
            noise_power_w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("bandwidth_hz", self.bandwidth_hz)?;
        require_non_negative("tx_power_w", self.tx_power_w)?;
        require_non_negative("channel_gain", self.channel_gain)?;
        require_positive("noise_power_w", self.noise_power_w)?;
        Ok(())
    }

    /// Received signal-to-noise ratio `p * h^2 / sigma^2`.
    pub fn snr(&self) -> f64 {
        self.tx_power_w * self.channel_gain * self.channel_gain / self.noise_power_w
    }
}

/// Achievable uplink rate in bits/second.
pub fn uplink_rate(params: &ChannelParams) -> Result<f64> {
    params.validate()?;
    let rate = params.bandwidth_hz * (1.0 + params.snr()).log2();
    if !rate.is_finite() {
        return Err(ModelError::domain(
            "channel",
            format!("rate overflowed to {rate}"),
        ));
    }
    Ok(rate)
}

/// Rate seen by one of `n_active` uploaders sharing the bandwidth equally.
pub fn shared_uplink_rate(params: &ChannelParams, n_active: usize) -> Result<f64> {
    if n_active == 0 {
        return Err(ModelError::domain("n_active", "must be >= 1"));
    }
    let share = ChannelParams {
        bandwidth_hz: params.bandwidth_hz / n_active as f64,
        ..*params
    };
    uplink_rate(&share)
}
