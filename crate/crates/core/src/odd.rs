//! Synthetic operating-domain reference trajectories.
//!
//! A trajectory is a chain of constant (speed, curvature) segments joined by
//! cosine blends. Every bound is enforced at construction with a 10% margin:
//! a blend over `τ` seconds changing speed by `Δv` peaks at `a_x = πΔv/(2τ)`,
//! and a curvature is only admitted if `v² |κ|` stays below the limit for the
//! fastest speed it can meet in the neighbouring blends.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Violation};
use crate::scenario::{RefSample, Reference};

/// Output rate [Hz].
pub const SAMPLE_RATE: f64 = 100.0;
/// Speed range of the generated segments [m/s].
pub const SPEED_RANGE: (f64, f64) = (5.0, 15.0);

const MARGIN: f64 = 0.9;
const HOLD: (f64, f64) = (1.0, 3.0);
const MIN_BLEND: f64 = 1.0;
const STRAIGHT_PROBABILITY: f64 = 0.25;

#[derive(Clone, Copy, Debug)]
struct Segment {
    start: f64,
    hold: f64,
    blend: f64,
    v: f64,
    kappa: f64,
}

/// Deterministic reference with `|a_x|, |a_y| ≤ a_limit` at every sample.
pub fn synth_odd_trajectory(seed: u64, duration: f64, a_limit: f64) -> Result<Reference, Error> {
    let mut bad = Vec::new();
    if !(duration.is_finite() && duration > 0.0) {
        bad.push(Violation::new("duration", duration, "must be strictly positive"));
    }
    if !(a_limit.is_finite() && a_limit > 0.0) {
        bad.push(Violation::new("a_limit", a_limit, "must be strictly positive"));
    }
    if !bad.is_empty() {
        return Err(Error::InvalidScenario(bad));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = MARGIN * a_limit;
    let mut segs: Vec<Segment> = Vec::new();
    let mut t = 0.0;
    let mut v = rng.gen_range(SPEED_RANGE.0..SPEED_RANGE.1);
    while t <= duration {
        let next_v = rng.gen_range(SPEED_RANGE.0..SPEED_RANGE.1);
        let hold = rng.gen_range(HOLD.0..HOLD.1);
        let blend = MIN_BLEND.max(std::f64::consts::PI * (next_v - v).abs() / (2.0 * a));
        segs.push(Segment { start: t, hold, blend, v, kappa: 0.0 });
        t += hold + blend;
        v = next_v;
    }
    segs.push(Segment { start: t, hold: f64::INFINITY, blend: 0.0, v, kappa: 0.0 });

    for i in 0..segs.len() {
        let prev = if i > 0 { segs[i - 1].v } else { segs[i].v };
        let next = segs.get(i + 1).map_or(segs[i].v, |s| s.v);
        let v_max = prev.max(segs[i].v).max(next);
        let k_max = a / (v_max * v_max);
        segs[i].kappa = if rng.gen_bool(STRAIGHT_PROBABILITY) {
            0.0
        } else {
            rng.gen_range(-k_max..k_max)
        };
    }

    let n = (duration * SAMPLE_RATE).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let mut seg = 0;
    let mut heading = 0.0;
    for k in 0..=n {
        let t = k as f64 / SAMPLE_RATE;
        while t >= segs[seg + 1].start {
            seg += 1;
        }
        let s = segs[seg];
        let local = t - s.start;
        let (v, kappa, a_x) = if local < s.hold {
            (s.v, s.kappa, 0.0)
        } else {
            let nx = segs[seg + 1];
            let phase = std::f64::consts::PI * (local - s.hold) / s.blend;
            let w = 0.5 * (1.0 - phase.cos());
            let dv = nx.v - s.v;
            (
                s.v + w * dv,
                s.kappa + w * (nx.kappa - s.kappa),
                dv * std::f64::consts::PI / (2.0 * s.blend) * phase.sin(),
            )
        };
        if let Some(prev) = samples.last() {
            let p: &RefSample = prev;
            heading += 0.5 * (p.v * p.kappa + v * kappa) / SAMPLE_RATE;
        }
        samples.push(RefSample { t, v, kappa, a_x, heading });
    }
    Ok(Reference { samples })
}
