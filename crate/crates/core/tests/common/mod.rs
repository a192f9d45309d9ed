#![allow(dead_code)]

use nicholson_core::{Coupling, Harmonic, ModelSpec, PeriodicSignal, RateTerm, Species};
use proptest::prelude::*;

pub fn constant(v: f64) -> PeriodicSignal {
    PeriodicSignal::constant(v).unwrap()
}

/// Nonnegative signal of period `period` with mean in `[lo, hi]` and up to two harmonics.
pub fn signal(period: f64, lo: f64, hi: f64) -> impl Strategy<Value = PeriodicSignal> {
    (lo..=hi, prop::collection::vec((1u32..4, -1.0..1.0f64, -1.0..1.0f64), 0..3), 0.0..0.9f64).prop_map(
        move |(mean, raw, fill)| {
            let total: f64 = raw.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
            let scale = if total > 0.0 { fill * mean / total } else { 0.0 };
            let harmonics = raw.iter().map(|&(m, a, b)| Harmonic::new(m, a * scale, b * scale)).collect();
            PeriodicSignal::new(period, mean, harmonics).unwrap()
        },
    )
}

pub fn rate_term(period: f64, lo: f64, hi: f64) -> impl Strategy<Value = RateTerm> {
    prop_oneof![
        signal(period, lo, hi).prop_map(RateTerm::linear),
        (signal(period, lo, hi), signal(period, lo, hi)).prop_map(|(a, b)| RateTerm::slope_interp(a, b)),
        signal(period, lo, hi).prop_map(RateTerm::saturating),
    ]
}

fn species(period: f64, delays: usize) -> impl Strategy<Value = Species> {
    (
        rate_term(period, 0.0, 3.0),
        prop_oneof![Just(RateTerm::zero()), rate_term(period, 0.0, 1.0)],
        prop::collection::vec(signal(period, 0.0, 4.0), delays),
    )
        .prop_map(|(d, h, p)| Species::new(d, h, p))
}

/// Arbitrary valid spec with `N ≤ 3`, up to two delays on a `1/20` lattice.
pub fn any_spec() -> impl Strategy<Value = ModelSpec> {
    (1usize..=3, prop::sample::select(vec![0.5, 1.0, 2.0]), prop::collection::vec(1u32..=2, 1..=2))
        .prop_flat_map(|(n, period, halves)| {
            let delays: Vec<f64> = halves.iter().map(|&k| 0.5 * k as f64).collect();
            let k = delays.len();
            let links = prop::collection::vec(prop::option::of(rate_term(period, 0.0, 1.0)), n * n);
            (Just(period), Just(delays), prop::collection::vec(species(period, k), n), links)
        })
        .prop_map(|(period, delays, species, links)| {
            let n = species.len();
            let mut couplings = Vec::new();
            for (idx, link) in links.into_iter().enumerate() {
                let (i, l) = (idx / n, idx % n);
                if let (true, Some(term)) = (i != l, link) {
                    couplings.push(Coupling { target: i, source: l, term });
                }
            }
            ModelSpec::new(period, delays, species, couplings).unwrap()
        })
}
