//! Planar kinematics on exact rationals: cardinal motion, squared distances
//! between moving points and the first instant two moving points come
//! within a threshold distance.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Default bracket width exponent for irrational touch times.
pub const DEFAULT_BRACKET_BITS: u32 = 40;

/// A point of the plane. `x` grows East, `y` grows North.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "(Scalar, Scalar)", into = "(Scalar, Scalar)")]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::default()
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Scalar::from_int(x), Scalar::from_int(y))
    }

    /// `self + velocity * dt`.
    pub fn advanced(&self, velocity: Velocity, dt: &Scalar) -> Point {
        match velocity {
            Velocity::Still => self.clone(),
            Velocity::Cardinal(dir) => {
                let (dx, dy) = dir.unit();
                Point::new(
                    &self.x + Scalar::from_int(dx) * dt,
                    &self.y + Scalar::from_int(dy) * dt,
                )
            }
        }
    }
}

impl From<(Scalar, Scalar)> for Point {
    fn from((x, y): (Scalar, Scalar)) -> Self {
        Point { x, y }
    }
}

impl From<Point> for (Scalar, Scalar) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    N,
    E,
    S,
    W,
}

impl Direction {
    /// Unit velocity; speed is exactly 1.
    pub fn unit(self) -> (i64, i64) {
        match self {
            Direction::N => (0, 1),
            Direction::E => (1, 0),
            Direction::S => (0, -1),
            Direction::W => (-1, 0),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::N => Direction::S,
            Direction::E => Direction::W,
            Direction::S => Direction::N,
            Direction::W => Direction::E,
        }
    }
}

/// Velocity of an agent: inert or unit speed along a cardinal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Velocity {
    Still,
    Cardinal(Direction),
}

impl Velocity {
    pub fn components(self) -> (i64, i64) {
        match self {
            Velocity::Still => (0, 0),
            Velocity::Cardinal(d) => d.unit(),
        }
    }
}

/// Position of one agent as a linear function of time over
/// `[start_time, end_time]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionSegment {
    pub start_time: Scalar,
    pub end_time: Scalar,
    pub start_point: Point,
    pub velocity: Velocity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("segment ends before it starts ({start} > {end})")]
    ReversedSegment { start: String, end: String },
    #[error("interval [{t0}, {t1}] is not covered by both segments")]
    IntervalNotCovered { t0: String, t1: String },
}

impl MotionSegment {
    pub fn new(
        start_time: Scalar,
        end_time: Scalar,
        start_point: Point,
        velocity: Velocity,
    ) -> Result<Self, GeometryError> {
        if end_time < start_time {
            return Err(GeometryError::ReversedSegment {
                start: start_time.to_string(),
                end: end_time.to_string(),
            });
        }
        Ok(MotionSegment {
            start_time,
            end_time,
            start_point,
            velocity,
        })
    }

    pub fn inert(start_time: Scalar, end_time: Scalar, at: Point) -> Result<Self, GeometryError> {
        MotionSegment::new(start_time, end_time, at, Velocity::Still)
    }

    pub fn covers(&self, t0: &Scalar, t1: &Scalar) -> bool {
        &self.start_time <= t0 && t0 <= t1 && t1 <= &self.end_time
    }

    /// Position at `t`; the linear law is extended outside the interval.
    pub fn position_at(&self, t: &Scalar) -> Point {
        self.start_point
            .advanced(self.velocity, &(t - &self.start_time))
    }

    pub fn end_point(&self) -> Point {
        self.position_at(&self.end_time)
    }
}

pub fn squared_distance(p: &Point, q: &Point) -> Scalar {
    (&p.x - &q.x).square() + (&p.y - &q.y).square()
}

/// `a * t^2 + b * t + c` in absolute time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl Quadratic {
    pub fn eval(&self, t: &Scalar) -> Scalar {
        (&self.a * t + &self.b) * t + &self.c
    }

    pub fn shifted(&self, dc: &Scalar) -> Quadratic {
        Quadratic {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c - dc,
        }
    }

    pub fn discriminant(&self) -> Scalar {
        self.b.square() - Scalar::from_int(4) * &self.a * &self.c
    }
}

/// Squared distance between two moving points as a quadratic in absolute
/// time, valid on `[t0, t1]`.
pub fn squared_distance_polynomial(
    a: &MotionSegment,
    b: &MotionSegment,
    t0: &Scalar,
    t1: &Scalar,
) -> Result<Quadratic, GeometryError> {
    if !a.covers(t0, t1) || !b.covers(t0, t1) {
        return Err(GeometryError::IntervalNotCovered {
            t0: t0.to_string(),
            t1: t1.to_string(),
        });
    }
    // position(t) = (start_point - v * start_time) + v * t
    let origin = |s: &MotionSegment| s.start_point.advanced(s.velocity, &-&s.start_time);
    let (oa, ob) = (origin(a), origin(b));
    let (vax, vay) = a.velocity.components();
    let (vbx, vby) = b.velocity.components();
    let rx = &oa.x - &ob.x;
    let ry = &oa.y - &ob.y;
    let wx = Scalar::from_int(vax - vbx);
    let wy = Scalar::from_int(vay - vby);
    Ok(Quadratic {
        a: wx.square() + wy.square(),
        b: Scalar::from_int(2) * (&rx * &wx + &ry * &wy),
        c: rx.square() + ry.square(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RootKind {
    Rational(Scalar),
    /// Smaller root of `gap`, irrational, strictly inside `(lo, hi)`.
    Irrational,
}

/// The earliest instant the squared distance reaches the threshold.
///
/// Rational instants are stored exactly. Otherwise the instant is the
/// smaller root of `gap = dist^2 - threshold`, bracketed by `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TouchTime {
    gap: Quadratic,
    root: RootKind,
    lo: Scalar,
    hi: Scalar,
    tangential: bool,
}

impl TouchTime {
    fn rational(gap: Quadratic, t: Scalar, tangential: bool) -> Self {
        TouchTime {
            gap,
            lo: t.clone(),
            hi: t.clone(),
            root: RootKind::Rational(t),
            tangential,
        }
    }

    pub fn exact(&self) -> Option<&Scalar> {
        match &self.root {
            RootKind::Rational(t) => Some(t),
            RootKind::Irrational => None,
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    /// Exact instant when rational, otherwise the bracket midpoint.
    pub fn representative(&self) -> Scalar {
        match &self.root {
            RootKind::Rational(t) => t.clone(),
            RootKind::Irrational => self.lo.midpoint(&self.hi),
        }
    }

    /// The minimum distance over the scanned interval equals the threshold
    /// exactly (the points graze without crossing).
    pub fn is_tangential(&self) -> bool {
        self.tangential
    }

    /// Quadratic whose smaller root (or the stored rational) is the instant.
    pub fn gap_polynomial(&self) -> &Quadratic {
        &self.gap
    }

    /// Exact comparison of the touch instant with a rational.
    pub fn cmp_scalar(&self, s: &Scalar) -> Ordering {
        match &self.root {
            RootKind::Rational(t) => t.cmp(s),
            RootKind::Irrational => {
                if s <= &self.lo {
                    Ordering::Greater
                } else if s >= &self.hi {
                    Ordering::Less
                } else if self.gap.eval(s).is_positive() {
                    // still outside the threshold at s, so s precedes the root
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Touch instant shifted by `-offset`, as a rational bracket.
    pub fn bracket_minus(&self, offset: &Scalar) -> (Scalar, Scalar) {
        (&self.lo - offset, &self.hi - offset)
    }
}

fn is_perfect_square(s: &Scalar) -> Option<Scalar> {
    if s.is_negative() {
        return None;
    }
    let n = s.numer().sqrt();
    let d = s.denom().sqrt();
    if &(&n * &n) == s.numer() && &(&d * &d) == s.denom() {
        Some(Scalar::from_bigint(n) / Scalar::from_bigint(d))
    } else {
        None
    }
}

/// First instant in `[t0, t1]` at which the squared distance between the
/// two segments is at most `threshold_sq`, or `None`.
///
/// If the points are already within the threshold at `t0` the answer is
/// `t0`. Irrational instants are bracketed to width `2^-bracket_bits` by
/// exact sign bisection.
pub fn first_touch_time(
    a: &MotionSegment,
    b: &MotionSegment,
    t0: &Scalar,
    t1: &Scalar,
    threshold_sq: &Scalar,
    bracket_bits: u32,
) -> Result<Option<TouchTime>, GeometryError> {
    let gap = squared_distance_polynomial(a, b, t0, t1)?.shifted(threshold_sq);
    if !gap.eval(t0).is_positive() {
        return Ok(Some(TouchTime::rational(gap, t0.clone(), false)));
    }
    if gap.a.is_zero() {
        // linear (parallel motion or both still)
        if !gap.b.is_negative() {
            return Ok(None);
        }
        let root = -(&gap.c) / &gap.b;
        return Ok((&root <= t1).then(|| TouchTime::rational(gap, root, false)));
    }
    let vertex = -(&gap.b) / (Scalar::from_int(2) * &gap.a);
    let t_min = vertex.clone().max(t0.clone()).min(t1.clone());
    let at_min = gap.eval(&t_min);
    if at_min.is_positive() {
        return Ok(None);
    }
    if at_min.is_zero() {
        let tangential = t_min == vertex;
        return Ok(Some(TouchTime::rational(gap, t_min, tangential)));
    }
    let disc = gap.discriminant();
    if let Some(root_disc) = is_perfect_square(&disc) {
        let root = (-(&gap.b) - root_disc) / (Scalar::from_int(2) * &gap.a);
        return Ok(Some(TouchTime::rational(gap, root, false)));
    }
    let width = Scalar::pow2_neg(bracket_bits);
    let (mut lo, mut hi) = (t0.clone(), t_min);
    while &hi - &lo > width {
        let mid = lo.midpoint(&hi);
        if gap.eval(&mid).is_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(TouchTime {
        gap,
        root: RootKind::Irrational,
        lo,
        hi,
        tangential: false,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn seg(start: i64, end: i64, p: (i64, i64), v: Velocity) -> MotionSegment {
        MotionSegment::new(s(start), s(end), Point::from_ints(p.0, p.1), v).unwrap()
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&Point::origin(), &Point::origin()), s(0));
        assert_eq!(
            squared_distance(&Point::origin(), &Point::from_ints(3, 4)),
            s(25)
        );
        let p = Point::new(Scalar::ratio(1, 2), s(0));
        let q = Point::new(s(0), Scalar::ratio(1, 2));
        assert_eq!(squared_distance(&p, &q), Scalar::ratio(1, 2));
    }

    #[test]
    fn polynomial_examples() {
        let a = seg(0, 10, (0, 0), Velocity::Still);
        let b = seg(0, 10, (3, 0), Velocity::Still);
        let q = squared_distance_polynomial(&a, &b, &s(0), &s(10)).unwrap();
        assert_eq!((q.a, q.b, q.c), (s(0), s(0), s(9)));

        let b = seg(0, 10, (3, 0), Velocity::Cardinal(Direction::W));
        let q = squared_distance_polynomial(&a, &b, &s(0), &s(10)).unwrap();
        assert_eq!((q.a, q.b, q.c), (s(1), s(-6), s(9)));

        let a = seg(0, 10, (0, 0), Velocity::Cardinal(Direction::N));
        let b = seg(0, 10, (0, 5), Velocity::Cardinal(Direction::S));
        let q = squared_distance_polynomial(&a, &b, &s(0), &s(10)).unwrap();
        assert_eq!((q.a, q.b, q.c), (s(4), s(-20), s(25)));
    }

    #[test]
    fn polynomial_rejects_uncovered_interval() {
        let a = seg(0, 2, (0, 0), Velocity::Still);
        let b = seg(1, 5, (3, 0), Velocity::Still);
        assert!(matches!(
            squared_distance_polynomial(&a, &b, &s(0), &s(2)),
            Err(GeometryError::IntervalNotCovered { .. })
        ));
    }

    #[test]
    fn touch_examples() {
        let one = s(1);
        let a = seg(0, 10, (0, 0), Velocity::Still);
        let b = seg(0, 10, (3, 0), Velocity::Cardinal(Direction::W));
        let t = first_touch_time(&a, &b, &s(0), &s(10), &one, 40)
            .unwrap()
            .unwrap();
        assert_eq!(t.exact(), Some(&s(2)));

        let a = seg(0, 10, (0, 0), Velocity::Cardinal(Direction::N));
        let b = seg(0, 10, (0, 5), Velocity::Cardinal(Direction::S));
        let t = first_touch_time(&a, &b, &s(0), &s(10), &one, 40)
            .unwrap()
            .unwrap();
        assert_eq!(t.exact(), Some(&s(2)));

        let a = seg(0, 10, (0, 0), Velocity::Still);
        let b = seg(0, 10, (2, -3), Velocity::Cardinal(Direction::N));
        assert!(first_touch_time(&a, &b, &s(0), &s(10), &one, 40)
            .unwrap()
            .is_none());
    }

    #[test]
    fn touch_outside_interval_is_none() {
        let a = seg(0, 10, (0, 0), Velocity::Still);
        let b = seg(0, 10, (3, 0), Velocity::Cardinal(Direction::W));
        assert!(
            first_touch_time(&a, &b, &s(0), &Scalar::ratio(3, 2), &s(1), 40)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn irrational_touch_is_bracketed() {
        // b passes at horizontal offset 1/2: (3 - t)^2 + 1/4 = 1 -> t = 3 - sqrt(3)/2
        let a = MotionSegment::inert(s(0), s(10), Point::origin()).unwrap();
        let b = MotionSegment::new(
            s(0),
            s(10),
            Point::new(s(3), Scalar::ratio(1, 2)),
            Velocity::Cardinal(Direction::W),
        )
        .unwrap();
        let t = first_touch_time(&a, &b, &s(0), &s(10), &s(1), 40)
            .unwrap()
            .unwrap();
        assert!(t.exact().is_none());
        assert!(t.width() <= Scalar::pow2_neg(40));
        let expected = 3.0 - 3f64.sqrt() / 2.0;
        assert!((t.representative().to_f64() - expected).abs() < 1e-11);
        assert_eq!(t.cmp_scalar(&Scalar::ratio(2, 1)), Ordering::Greater);
        assert_eq!(t.cmp_scalar(&Scalar::ratio(213, 100)), Ordering::Greater);
        assert_eq!(t.cmp_scalar(&Scalar::ratio(214, 100)), Ordering::Less);
    }

    #[test]
    fn grazing_touch_is_tangential() {
        let a = MotionSegment::inert(s(0), s(10), Point::origin()).unwrap();
        let b = seg(0, 10, (3, 1), Velocity::Cardinal(Direction::W));
        let t = first_touch_time(&a, &b, &s(0), &s(10), &s(1), 40)
            .unwrap()
            .unwrap();
        assert_eq!(t.exact(), Some(&s(3)));
        assert!(t.is_tangential());
    }

    #[test]
    fn already_touching_returns_start() {
        let a = MotionSegment::inert(s(2), s(10), Point::origin()).unwrap();
        let b = MotionSegment::inert(s(2), s(10), Point::from_ints(1, 0)).unwrap();
        let t = first_touch_time(&a, &b, &s(2), &s(10), &s(1), 40)
            .unwrap()
            .unwrap();
        assert_eq!(t.exact(), Some(&s(2)));
    }
}
