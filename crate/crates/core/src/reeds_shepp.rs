//! Shortest bounded-curvature paths for a car that drives forwards and backwards.
//!
//! Only eight base words are solved in closed form (for a unit turning radius, in
//! the start frame). The full 48-word catalog is produced from them with three
//! transforms:
//!
//! * time-flip `(x, y, phi) -> (-x, y, -phi)`, which negates every segment length;
//! * reflect `(x, y, phi) -> (x, -y, -phi)`, which swaps left and right turns;
//! * backwards, which solves the reversed query and plays the word in reverse order.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::vehicle::{propagate, ControlAction, Direction, Pose, Steering};

/// Tolerance on sign constraints of the base-word parameters.
const ZERO: f64 = 1e-10;
/// Snap tolerance on inverse-trigonometric arguments at the edge of their domain.
const TRIG_SNAP: f64 = 1e-10;
/// Segments shorter than this (meters) are dropped from materialized paths.
const MIN_SEGMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Left,
    Straight,
    Right,
}

impl SegmentKind {
    pub fn steering(self) -> Steering {
        match self {
            SegmentKind::Left => Steering::Left,
            SegmentKind::Straight => Steering::Straight,
            SegmentKind::Right => Steering::Right,
        }
    }

    fn letter(self) -> char {
        match self {
            SegmentKind::Left => 'L',
            SegmentKind::Straight => 'S',
            SegmentKind::Right => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsSegment {
    pub kind: SegmentKind,
    /// Meters; negative when driven in reverse.
    pub signed_length: f64,
}

impl RsSegment {
    pub fn direction(&self) -> Direction {
        if self.signed_length < 0.0 {
            Direction::Reverse
        } else {
            Direction::Forward
        }
    }

    pub fn action(&self) -> ControlAction {
        ControlAction::new(self.direction(), self.kind.steering())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsPath {
    pub segments: Vec<RsSegment>,
    pub total_length: f64,
}

impl RsPath {
    pub fn empty() -> Self {
        Self {
            segments: Vec::new(),
            total_length: 0.0,
        }
    }

    /// Word signature such as `L+S-R+`.
    pub fn word(&self) -> String {
        self.segments
            .iter()
            .flat_map(|s| {
                [
                    s.kind.letter(),
                    if s.signed_length < 0.0 { '-' } else { '+' },
                ]
            })
            .collect()
    }

    /// Pose reached by driving the segments from `start`.
    pub fn end_pose(&self, start: &Pose, radius: f64) -> Pose {
        self.segments.iter().fold(*start, |p, s| {
            propagate(&p, s.action(), s.signed_length.abs(), radius)
        })
    }

    /// Number of forward/reverse switches between consecutive segments.
    pub fn cusps(&self) -> usize {
        self.segments
            .windows(2)
            .filter(|w| w[0].direction() != w[1].direction())
            .count()
    }
}

use SegmentKind::{Left as L, Right as R, Straight as S};

/// Word shapes produced by the base solvers and their reflections.
const WORDS: [&[SegmentKind]; 18] = [
    &[L, R, L],
    &[R, L, R],
    &[L, R, L, R],
    &[R, L, R, L],
    &[L, R, S, L],
    &[R, L, S, R],
    &[L, S, R, L],
    &[R, S, L, R],
    &[L, R, S, R],
    &[R, L, S, L],
    &[R, S, R, L],
    &[L, S, L, R],
    &[L, S, R],
    &[R, S, L],
    &[L, S, L],
    &[R, S, R],
    &[L, R, S, L, R],
    &[R, L, S, R, L],
];

/// One solved word: index into [`WORDS`] and signed lengths for a unit radius.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    word: usize,
    params: [f64; 5],
}

impl Candidate {
    fn new(word: usize, p: &[f64]) -> Self {
        let mut params = [0.0; 5];
        params[..p.len()].copy_from_slice(p);
        Self { word, params }
    }

    fn length(&self) -> f64 {
        self.params.iter().map(|v| v.abs()).sum()
    }

    fn into_path(self, radius: f64) -> RsPath {
        let segments: Vec<RsSegment> = WORDS[self.word]
            .iter()
            .zip(self.params)
            .map(|(&kind, p)| RsSegment {
                kind,
                signed_length: p * radius,
            })
            .filter(|s| s.signed_length.abs() >= MIN_SEGMENT)
            .collect();
        RsPath {
            total_length: self.length() * radius,
            segments,
        }
    }
}

/// Wraps into `[-π, π)`.
fn mod2pi(x: f64) -> f64 {
    crate::vehicle::normalize_angle(x)
}

fn polar(x: f64, y: f64) -> (f64, f64) {
    (x.hypot(y), y.atan2(x))
}

fn snap_unit(v: f64) -> f64 {
    if v > 1.0 && v - 1.0 < TRIG_SNAP {
        1.0
    } else if v < -1.0 && -1.0 - v < TRIG_SNAP {
        -1.0
    } else {
        v
    }
}

fn tau_omega(u: f64, v: f64, xi: f64, eta: f64, phi: f64) -> (f64, f64) {
    let delta = mod2pi(u - v);
    let a = u.sin() - delta.sin();
    let b = u.cos() - delta.cos() - 1.0;
    let t1 = (eta * a - xi * b).atan2(xi * a + eta * b);
    let t2 = 2.0 * (delta.cos() - v.cos() - u.cos()) + 3.0;
    let tau = if t2 < 0.0 {
        mod2pi(t1 + PI)
    } else {
        mod2pi(t1)
    };
    let omega = mod2pi(tau - u + v - phi);
    (tau, omega)
}

// Base words. Each returns (t, u, v) for the goal (x, y, phi) in the start frame.

fn lp_sp_lp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (u, t) = polar(x - phi.sin(), y - 1.0 + phi.cos());
    if t >= -ZERO {
        let v = mod2pi(phi - t);
        if v >= -ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_sp_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (u1, t1) = polar(x + phi.sin(), y - 1.0 - phi.cos());
    let u1 = u1 * u1;
    if u1 >= 4.0 {
        let u = (u1 - 4.0).sqrt();
        let theta = 2.0f64.atan2(u);
        let t = mod2pi(t1 + theta);
        let v = mod2pi(t - phi);
        if t >= -ZERO && v >= -ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_l(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x - phi.sin();
    let eta = y - 1.0 + phi.cos();
    let (u1, theta) = polar(xi, eta);
    if u1 <= 4.0 + 4.0 * TRIG_SNAP {
        let u = -2.0 * snap_unit(0.25 * u1).asin();
        let t = mod2pi(theta + 0.5 * u + PI);
        let v = mod2pi(phi - t + u);
        if t >= -ZERO && u <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rup_lum_rm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let rho = 0.25 * (2.0 + xi.hypot(eta));
    if rho <= 1.0 + TRIG_SNAP {
        let u = snap_unit(rho).acos();
        let (t, v) = tau_omega(u, -u, xi, eta, phi);
        if t >= -ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rum_lum_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let rho = (20.0 - xi * xi - eta * eta) / 16.0;
    if (-TRIG_SNAP..=1.0 + TRIG_SNAP).contains(&rho) {
        let u = -snap_unit(rho.max(0.0)).acos();
        if u >= -FRAC_PI_2 {
            let (t, v) = tau_omega(u, u, xi, eta, phi);
            if t >= -ZERO && v >= -ZERO {
                return Some((t, u, v));
            }
        }
    }
    None
}

fn lp_rm_sm_lm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x - phi.sin();
    let eta = y - 1.0 + phi.cos();
    let (rho, theta) = polar(xi, eta);
    if rho >= 2.0 {
        let r = (rho * rho - 4.0).sqrt();
        let u = 2.0 - r;
        let t = mod2pi(theta + r.atan2(-2.0));
        let v = mod2pi(phi - FRAC_PI_2 - t);
        if t >= -ZERO && u <= ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_sm_rm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let (rho, theta) = polar(-eta, xi);
    if rho >= 2.0 {
        let t = theta;
        let u = 2.0 - rho;
        let v = mod2pi(t + FRAC_PI_2 - phi);
        if t >= -ZERO && u <= ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_s_lm_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let (rho, _) = polar(xi, eta);
    if rho >= 2.0 {
        let u = 4.0 - (rho * rho - 4.0).sqrt();
        if u <= ZERO {
            let t = mod2pi(((4.0 - u) * xi - 2.0 * eta).atan2(-2.0 * xi + (u - 4.0) * eta));
            let v = mod2pi(t - phi);
            if t >= -ZERO && v >= -ZERO {
                return Some((t, u, v));
            }
        }
    }
    None
}

type BaseWord = fn(f64, f64, f64) -> Option<(f64, f64, f64)>;

/// Runs `base` on the query and its time-flipped, reflected and combined variants.
/// `word` is the shape for the plain/time-flipped variants; `word + 1` holds the
/// reflected shape. `emit` maps `(t, u, v)` to segment parameters.
fn with_symmetries(
    out: &mut Vec<Candidate>,
    base: BaseWord,
    (x, y, phi): (f64, f64, f64),
    word: usize,
    emit: impl Fn(f64, f64, f64) -> Vec<f64>,
) {
    let variants = [
        (x, y, phi, 1.0, word),
        (-x, y, -phi, -1.0, word),
        (x, -y, -phi, 1.0, word + 1),
        (-x, -y, phi, -1.0, word + 1),
    ];
    for (qx, qy, qphi, flip, w) in variants {
        if let Some((t, u, v)) = base(qx, qy, qphi) {
            let p: Vec<f64> = emit(t, u, v).into_iter().map(|p| p * flip).collect();
            out.push(Candidate::new(w, &p));
        }
    }
}

fn csc(out: &mut Vec<Candidate>, q: (f64, f64, f64)) {
    with_symmetries(out, lp_sp_lp, q, 14, |t, u, v| vec![t, u, v]);
    with_symmetries(out, lp_sp_rp, q, 12, |t, u, v| vec![t, u, v]);
}

fn ccc(out: &mut Vec<Candidate>, q: (f64, f64, f64), qb: (f64, f64, f64)) {
    with_symmetries(out, lp_rm_l, q, 0, |t, u, v| vec![t, u, v]);
    with_symmetries(out, lp_rm_l, qb, 0, |t, u, v| vec![v, u, t]);
}

fn cccc(out: &mut Vec<Candidate>, q: (f64, f64, f64)) {
    with_symmetries(out, lp_rup_lum_rm, q, 2, |t, u, v| vec![t, u, -u, v]);
    with_symmetries(out, lp_rum_lum_rp, q, 2, |t, u, v| vec![t, u, u, v]);
}

fn ccsc(out: &mut Vec<Candidate>, q: (f64, f64, f64), qb: (f64, f64, f64)) {
    let h = -FRAC_PI_2;
    with_symmetries(out, lp_rm_sm_lm, q, 4, |t, u, v| vec![t, h, u, v]);
    with_symmetries(out, lp_rm_sm_rm, q, 8, |t, u, v| vec![t, h, u, v]);
    with_symmetries(out, lp_rm_sm_lm, qb, 6, |t, u, v| vec![v, u, h, t]);
    with_symmetries(out, lp_rm_sm_rm, qb, 10, |t, u, v| vec![v, u, h, t]);
}

fn ccscc(out: &mut Vec<Candidate>, q: (f64, f64, f64)) {
    let h = -FRAC_PI_2;
    with_symmetries(out, lp_rm_s_lm_rp, q, 16, |t, u, v| vec![t, h, u, h, v]);
}

/// Every solvable catalog word for the goal expressed in the start frame, scaled
/// to a unit turning radius. Order is the fixed family enumeration order.
fn candidates(start: &Pose, goal: &Pose, radius: f64) -> Vec<Candidate> {
    let rel = start.relative(goal);
    let x = rel.x / radius;
    let y = rel.y / radius;
    let phi = goal.theta - start.theta;
    let q = (x, y, phi);
    let (s, c) = phi.sin_cos();
    let qb = (x * c + y * s, x * s - y * c, phi);
    let mut out = Vec::with_capacity(48);
    csc(&mut out, q);
    ccc(&mut out, q, qb);
    cccc(&mut out, q);
    ccsc(&mut out, q, qb);
    ccscc(&mut out, q);
    out
}

fn shortest(cands: &[Candidate]) -> Option<&Candidate> {
    cands
        .iter()
        .fold(None, |best: Option<&Candidate>, c| match best {
            Some(b) if b.length() <= c.length() => Some(b),
            _ => Some(c),
        })
}

fn is_same_pose(a: &Pose, b: &Pose) -> bool {
    a.x == b.x && a.y == b.y && crate::vehicle::angle_diff(a.theta, b.theta) == 0.0
}

pub fn rs_shortest_path(start: &Pose, goal: &Pose, radius: f64) -> RsPath {
    if is_same_pose(start, goal) {
        return RsPath::empty();
    }
    let cands = candidates(start, goal, radius);
    shortest(&cands)
        .map(|c| c.into_path(radius))
        .expect("the Reeds-Shepp catalog always contains a solution")
}

pub fn rs_length(start: &Pose, goal: &Pose, radius: f64) -> f64 {
    if is_same_pose(start, goal) {
        return 0.0;
    }
    let cands = candidates(start, goal, radius);
    shortest(&cands).map_or(f64::INFINITY, |c| c.length() * radius)
}

/// All solved catalog words, shortest first (stable with respect to catalog order).
pub fn rs_all_paths(start: &Pose, goal: &Pose, radius: f64) -> Vec<RsPath> {
    if is_same_pose(start, goal) {
        return vec![RsPath::empty()];
    }
    let mut cands = candidates(start, goal, radius);
    cands.sort_by(|a, b| a.length().total_cmp(&b.length()));
    let mut out: Vec<RsPath> = Vec::with_capacity(cands.len());
    for c in cands {
        let path = c.into_path(radius);
        // symmetric variants can produce the same word twice
        if !out.iter().any(|p| same_path(p, &path)) {
            out.push(path);
        }
    }
    out
}

fn same_path(a: &RsPath, b: &RsPath) -> bool {
    a.segments.len() == b.segments.len()
        && a.segments
            .iter()
            .zip(&b.segments)
            .all(|(s, t)| s.kind == t.kind && (s.signed_length - t.signed_length).abs() < 1e-9)
}

/// Poses along `path` at arc-length spacing of at most `step`, both endpoints
/// included. Each sample carries the direction of the motion that reaches it; the
/// start sample carries the direction of the first segment.
pub fn rs_sample(path: &RsPath, start: &Pose, radius: f64, step: f64) -> Vec<(Pose, Direction)> {
    assert!(step > 0.0, "sampling step must be positive");
    let first_dir = path
        .segments
        .first()
        .map_or(Direction::Forward, |s| s.direction());
    let mut out = vec![(*start, first_dir)];
    let mut origin = *start;
    for seg in &path.segments {
        let len = seg.signed_length.abs();
        let action = seg.action();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            let s = len * k as f64 / n as f64;
            out.push((propagate(&origin, action, s, radius), action.direction));
        }
        origin = propagate(&origin, action, len, radius);
    }
    out
}
