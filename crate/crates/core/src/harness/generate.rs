//! Scenario generation from a seed.
//!
//! Scenario `i` draws only from its own ChaCha8 stream `i`, so any scenario
//! can be regenerated alone and the sweep order does not matter. All draws
//! are integer draws; no floating point is involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::{Contract, StartLaw, SweepSpec};
use crate::geometry::Point;
use crate::labels::LabelSpace;
use crate::scalar::Scalar;
use crate::sim::{Model, Scenario};

/// Stream offset for probe trials, far above any sweep index.
const PROBE_STREAM_BASE: u64 = 1 << 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Random,
    SpecialPair,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generated {
    pub index: usize,
    pub kind: RunKind,
    pub scenario: Scenario,
}

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform multiple of `2^-bits` in `[lo, hi]`.
fn dyadic(rng: &mut ChaCha8Rng, lo: &Scalar, hi: &Scalar, bits: u32) -> Scalar {
    let scale = Scalar::pow2(bits);
    let n_lo = i64::try_from((lo * &scale).ceil()).expect("bounded by spec validation");
    let n_hi = i64::try_from((hi * &scale).floor()).expect("bounded by spec validation");
    let n = if n_hi <= n_lo {
        n_lo
    } else {
        rng.gen_range(n_lo..=n_hi)
    };
    Scalar::from_int(n) / scale
}

/// Radius with a uniformly chosen octave of `[lo, hi]`, then uniform
/// within it, so small and large distances are equally represented.
fn octave_radius(rng: &mut ChaCha8Rng, lo: &Scalar, hi: &Scalar, bits: u32) -> Scalar {
    let mut bounds = vec![lo.clone()];
    while bounds.last().expect("non-empty") < hi {
        let next = (bounds.last().expect("non-empty") * Scalar::from_int(2)).min(hi.clone());
        bounds.push(next);
    }
    if bounds.len() == 1 {
        return lo.clone();
    }
    let i = rng.gen_range(0..bounds.len() - 1);
    dyadic(rng, &bounds[i], &bounds[i + 1], bits)
}

/// Displacement with squared length in `(lo^2, r^2]` (or `[lo^2, r^2]` when
/// `closed_lo`) and, if given, strictly below `cap^2`.
fn displacement(
    rng: &mut ChaCha8Rng,
    lo: &Scalar,
    hi: &Scalar,
    closed_lo: bool,
    cap: Option<&Scalar>,
    bits: u32,
) -> (Scalar, Scalar) {
    let lo_sq = lo.square();
    loop {
        let r = octave_radius(rng, lo, hi, bits);
        let r_sq = r.square();
        for _ in 0..64 {
            let neg = -&r;
            let dx = dyadic(rng, &neg, &r, bits);
            let dy = dyadic(rng, &neg, &r, bits);
            let d2 = dx.square() + dy.square();
            let above = if closed_lo { d2 >= lo_sq } else { d2 > lo_sq };
            let below_cap = cap.is_none_or(|c| d2 < c.square());
            if above && d2 <= r_sq && below_cap {
                return (dx, dy);
            }
        }
    }
}

fn origin(rng: &mut ChaCha8Rng, spec: &SweepSpec) -> Point {
    let r = &spec.distance.max;
    let neg = -r;
    Point::new(
        dyadic(rng, &neg, r, spec.denominator_bits),
        dyadic(rng, &neg, r, spec.denominator_bits),
    )
}

fn labels(rng: &mut ChaCha8Rng, space: LabelSpace) -> (u64, u64) {
    let a = rng.gen_range(0..space.size());
    let mut b = rng.gen_range(0..space.size() - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn starts(rng: &mut ChaCha8Rng, law: &StartLaw, bits: u32) -> (Scalar, Scalar) {
    let random = |rng: &mut ChaCha8Rng, max: &Scalar| {
        let offset = dyadic(rng, &Scalar::pow2_neg(bits), max, bits);
        if rng.gen::<bool>() {
            (Scalar::zero(), offset)
        } else {
            (offset, Scalar::zero())
        }
    };
    match law {
        StartLaw::Simultaneous => (Scalar::zero(), Scalar::zero()),
        StartLaw::Fixed { offset } => (Scalar::zero(), offset.clone()),
        StartLaw::Random { max_offset } => random(rng, max_offset),
        StartLaw::Mixed { max_offset } => {
            if rng.gen::<bool>() {
                (Scalar::zero(), Scalar::zero())
            } else {
                random(rng, max_offset)
            }
        }
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn random_scenario(spec: &SweepSpec, index: usize) -> Scenario {
    let rng = &mut stream(spec.seed, index as u64);
    let bits = spec.denominator_bits;
    let space = LabelSpace::new(*pick(rng, &spec.label_sizes)).expect("validated");
    let pair = labels(rng, space);
    let pos_a = origin(rng, spec);
    let (start_a, start_b) = starts(rng, &spec.start, bits);
    let (lo, hi) = (&spec.distance.min, &spec.distance.max);
    let mut scenario = match spec.model {
        Model::Monotone => {
            let (dx, dy) = displacement(rng, lo, hi, false, None, bits);
            let pos_b = Point::new(&pos_a.x + dx, &pos_a.y + dy);
            Scenario::monotone(space, pair, pos_a, pos_b)
        }
        Model::Binary => {
            let rho = pick(rng, &spec.rho).clone();
            let (dx, dy) = match spec.contract {
                Contract::Inside => displacement(
                    rng,
                    lo,
                    &hi.clone().min(rho.clone()),
                    false,
                    Some(&rho),
                    bits,
                ),
                Contract::Outside => displacement(rng, &rho, &(&rho + hi), true, None, bits),
            };
            let pos_b = Point::new(&pos_a.x + dx, &pos_a.y + dy);
            Scenario::binary(space, pair, pos_a, pos_b, rho)
        }
    };
    scenario.start_a = start_a;
    scenario.start_b = start_b;
    scenario.strict_paper_loop = spec.strict_paper_loop;
    scenario
}

/// Labels differing exactly in transformed bit `j` (1-based, most
/// significant first); the first returned label has the 1.
fn one_bit_pair(rng: &mut ChaCha8Rng, space: LabelSpace, j: usize) -> Option<(u64, u64)> {
    let mask = 1u64 << (space.lambda() - j);
    for _ in 0..64 {
        let base = rng.gen_range(0..space.size()) & !mask;
        if base | mask < space.size() {
            return Some((base | mask, base));
        }
    }
    None
}

fn special_pair(spec: &SweepSpec, index: usize) -> Scenario {
    let rng = &mut stream(spec.seed, index as u64);
    let bits = spec.denominator_bits;
    loop {
        let space = LabelSpace::new(*pick(rng, &spec.label_sizes)).expect("validated");
        let j = rng.gen_range(1..=space.lambda());
        let Some((one, zero)) = one_bit_pair(rng, space, j) else {
            continue;
        };
        let south = origin(rng, spec);
        let mut dx = octave_radius(rng, &spec.distance.min, &spec.distance.max, bits);
        if rng.gen::<bool>() {
            dx = -dx;
        }
        let north = Point::new(&south.x + dx, &south.y + Scalar::pow2_neg(j as u32));
        let (pos_a, pos_b, pair) = if rng.gen::<bool>() {
            (south, north, (one, zero))
        } else {
            (north, south, (zero, one))
        };
        return Scenario::monotone(space, pair, pos_a, pos_b);
    }
}

/// Scenario `index` of the sweep: random runs first, then special pairs.
pub fn scenario_at(spec: &SweepSpec, index: usize) -> Generated {
    if index < spec.count {
        Generated {
            index,
            kind: RunKind::Random,
            scenario: random_scenario(spec, index),
        }
    } else {
        Generated {
            index,
            kind: RunKind::SpecialPair,
            scenario: special_pair(spec, index),
        }
    }
}

pub fn sweep_scenarios(spec: &SweepSpec) -> Vec<Generated> {
    (0..spec.count + spec.special_pairs)
        .map(|i| scenario_at(spec, i))
        .collect()
}

/// Probe scenarios for one trial: the same positions for every label
/// length, labels `2k` and `2k+1`.
pub fn probe_trial(spec: &SweepSpec, trial: usize) -> Vec<(u32, Scenario)> {
    let probe = spec.probe.as_ref().expect("caller checked the probe");
    let rng = &mut stream(spec.seed, PROBE_STREAM_BASE + trial as u64);
    let bits = spec.denominator_bits;
    let pos_a = origin(rng, spec);
    let hi = spec.distance.max.clone().min(probe.rho.clone());
    let (dx, dy) = displacement(rng, &spec.distance.min, &hi, false, Some(&probe.rho), bits);
    let pos_b = Point::new(&pos_a.x + dx, &pos_a.y + dy);
    let odd_first = rng.gen::<bool>();
    probe
        .lambdas
        .iter()
        .map(|&lambda| {
            let space = LabelSpace::new(1u64 << lambda).expect("lambda validated");
            let k = rng.gen_range(0..space.size() / 2);
            let pair = if odd_first {
                (2 * k + 1, 2 * k)
            } else {
                (2 * k, 2 * k + 1)
            };
            let mut s =
                Scenario::binary(space, pair, pos_a.clone(), pos_b.clone(), probe.rho.clone());
            s.strict_paper_loop = spec.strict_paper_loop;
            (lambda, s)
        })
        .collect()
}
