//! VNF catalog, SFC request templates and synthetic traffic.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VnfKind {
    LoadBalancer,
    WebAppFirewall,
    HttpAccelerator,
    TrafficMonitor,
}

impl VnfKind {
    pub const ALL: [VnfKind; 4] = [
        VnfKind::LoadBalancer,
        VnfKind::WebAppFirewall,
        VnfKind::HttpAccelerator,
        VnfKind::TrafficMonitor,
    ];

    pub const COUNT: usize = Self::ALL.len();

    /// Slot in the VNF one-hot segment.
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn short_name(self) -> &'static str {
        match self {
            VnfKind::LoadBalancer => "lb",
            VnfKind::WebAppFirewall => "waf",
            VnfKind::HttpAccelerator => "ha",
            VnfKind::TrafficMonitor => "tm",
        }
    }
}

impl fmt::Display for VnfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// CPU units consumed per request/s, indexed by [`VnfKind::ordinal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VnfProfile {
    pub load_balancer: f64,
    pub web_app_firewall: f64,
    pub http_accelerator: f64,
    pub traffic_monitor: f64,
}

impl Default for VnfProfile {
    fn default() -> Self {
        Self {
            load_balancer: 0.002,
            web_app_firewall: 0.004,
            http_accelerator: 0.003,
            traffic_monitor: 0.001,
        }
    }
}

impl VnfProfile {
    pub fn cpu_per_request(&self, kind: VnfKind) -> f64 {
        match kind {
            VnfKind::LoadBalancer => self.load_balancer,
            VnfKind::WebAppFirewall => self.web_app_firewall,
            VnfKind::HttpAccelerator => self.http_accelerator,
            VnfKind::TrafficMonitor => self.traffic_monitor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for kind in VnfKind::ALL {
            let d = self.cpu_per_request(kind);
            if !(d > 0.0) {
                return Err(Error::Config(format!("cpu demand of {kind} must be positive, got {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfcRequest {
    pub id: usize,
    /// Which catalog template the request was copied from.
    pub template: usize,
    pub vnfs: Vec<VnfKind>,
    pub strict_order: Vec<VnfKind>,
    pub arrival_rank: usize,
}

impl SfcRequest {
    pub fn new(id: usize, template: usize, vnfs: Vec<VnfKind>, strict_order: Vec<VnfKind>) -> Result<Self> {
        for (i, v) in strict_order.iter().enumerate() {
            if strict_order[..i].contains(v) {
                return Err(Error::Config(format!("strict order repeats {v}")));
            }
            if !vnfs.contains(v) {
                return Err(Error::Config(format!(
                    "strict order names {v}, absent from the request"
                )));
            }
        }
        Ok(Self {
            id,
            template,
            vnfs,
            strict_order,
            arrival_rank: id,
        })
    }
}

/// The four linear chains, each strictly ordered as listed.
pub fn catalog_sfcrs() -> Vec<SfcRequest> {
    use VnfKind::*;
    let chains = [
        vec![LoadBalancer, WebAppFirewall],
        vec![HttpAccelerator, LoadBalancer, WebAppFirewall],
        vec![HttpAccelerator, TrafficMonitor, LoadBalancer, WebAppFirewall],
        vec![LoadBalancer, TrafficMonitor, WebAppFirewall],
    ];
    chains
        .into_iter()
        .enumerate()
        .map(|(i, chain)| SfcRequest {
            id: i,
            template: i,
            strict_order: chain.clone(),
            vnfs: chain,
            arrival_rank: i,
        })
        .collect()
}

/// `copies` of every template, interleaved round-robin: request `i` is a
/// copy of template `i % templates.len()` and arrives `i`-th.
pub fn replicate(templates: &[SfcRequest], copies: usize) -> Vec<SfcRequest> {
    let n = templates.len() * copies;
    (0..n)
        .map(|i| {
            let t = &templates[i % templates.len()];
            SfcRequest {
                id: i,
                template: t.template,
                vnfs: t.vnfs.clone(),
                strict_order: t.strict_order.clone(),
                arrival_rank: i,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrafficVariant {
    A,
    B,
}

impl fmt::Display for TrafficVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrafficVariant::A => "A",
            TrafficVariant::B => "B",
        })
    }
}

impl FromStr for TrafficVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(TrafficVariant::A),
            "B" => Ok(TrafficVariant::B),
            other => Err(Error::Scenario(format!("unknown traffic variant {other:?}"))),
        }
    }
}

/// Shape of the synthetic diurnal curve.
///
/// `rate(t) = base + amplitude * (1 + cos(2*pi*(t - peak_at) / period)) / 2`,
/// so the curve runs from `base` to `base + amplitude` and peaks at
/// `peak_at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiurnalCurve {
    pub base: f64,
    pub amplitude: f64,
    pub period: usize,
    pub peak_at: usize,
}

impl Default for DiurnalCurve {
    fn default() -> Self {
        Self {
            base: 20.0,
            amplitude: 80.0,
            period: 24,
            peak_at: 14,
        }
    }
}

impl DiurnalCurve {
    fn sample(&self, t: usize) -> f64 {
        let phase = 2.0 * PI * (t as f64 - self.peak_at as f64) / self.period as f64;
        self.base + self.amplitude * (1.0 + phase.cos()) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficPattern {
    /// `(timestep, requests/s)`, already scaled and shifted.
    pub samples: Vec<(usize, f64)>,
    pub scale: f64,
    /// Fraction of the period the base curve was rotated by.
    pub phase_shift: f64,
}

impl TrafficPattern {
    pub fn rate(&self, t: usize) -> f64 {
        self.samples[t % self.samples.len()].1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn rates(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|&(_, r)| r)
    }

    pub fn peak_rate(&self) -> f64 {
        self.rates().fold(0.0, f64::max)
    }
}

pub fn traffic_pattern(variant: TrafficVariant, scale: f64) -> TrafficPattern {
    traffic_pattern_with(&DiurnalCurve::default(), variant, scale)
}

/// Variant B is variant A rotated by half a period.
pub fn traffic_pattern_with(curve: &DiurnalCurve, variant: TrafficVariant, scale: f64) -> TrafficPattern {
    let period = curve.period.max(1);
    let shift = match variant {
        TrafficVariant::A => 0,
        TrafficVariant::B => period / 2,
    };
    let samples = (0..period)
        .map(|t| (t, scale * curve.sample((t + shift) % period)))
        .collect();
    TrafficPattern {
        samples,
        scale,
        phase_shift: shift as f64 / period as f64,
    }
}
