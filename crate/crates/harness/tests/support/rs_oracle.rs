//! Brute-force Reeds-Shepp lengths for a unit turning radius.
//!
//! Every word shape is a template of steering letters with signed segment lengths.
//! Three of the lengths are unknowns, the rest are fixed or tied to an unknown.
//! Newton's method from a dense grid of seeds solves end pose = goal, and the
//! shortest converged solution wins. Templates carry no sign restrictions, so every
//! solution is a drivable path and the minimum can never beat the true optimum.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Turn {
    L,
    S,
    R,
}

/// Length of one segment as a function of the three unknowns.
#[derive(Clone, Copy, Debug)]
pub enum Len {
    Var(usize),
    Scaled(usize, f64),
    Fixed(f64),
}

#[derive(Clone, Debug)]
pub struct Template {
    pub segs: Vec<(Turn, Len)>,
}

pub fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r < -PI + 1e-15 {
        r + TAU
    } else {
        r
    }
}

/// Drives one segment of signed length `s` from `(x, y, th)` with unit radius.
pub fn drive(p: (f64, f64, f64), turn: Turn, s: f64) -> (f64, f64, f64) {
    let (x, y, th) = p;
    match turn {
        Turn::S => (x + s * th.cos(), y + s * th.sin(), th),
        Turn::L => (
            x + (th + s).sin() - th.sin(),
            y - (th + s).cos() + th.cos(),
            th + s,
        ),
        Turn::R => (
            x - (th - s).sin() + th.sin(),
            y + (th - s).cos() - th.cos(),
            th - s,
        ),
    }
}

fn lengths(t: &Template, v: [f64; 3]) -> Vec<f64> {
    t.segs
        .iter()
        .map(|&(_, l)| match l {
            Len::Var(i) => v[i],
            Len::Scaled(i, k) => k * v[i],
            Len::Fixed(c) => c,
        })
        .collect()
}

fn end(t: &Template, v: [f64; 3]) -> (f64, f64, f64) {
    t.segs
        .iter()
        .zip(lengths(t, v))
        .fold((0.0, 0.0, 0.0), |p, (&(turn, _), s)| drive(p, turn, s))
}

fn residual(t: &Template, v: [f64; 3], goal: (f64, f64, f64)) -> [f64; 3] {
    let e = end(t, v);
    [e.0 - goal.0, e.1 - goal.1, wrap(e.2 - goal.2)]
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        *xc = det(m) / d;
    }
    Some(x)
}

fn newton(t: &Template, mut v: [f64; 3], goal: (f64, f64, f64)) -> Option<[f64; 3]> {
    let h = 1e-7;
    for _ in 0..40 {
        let r = residual(t, v, goal);
        let norm = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if norm < 1e-11 {
            return Some(v);
        }
        let mut j = [[0.0; 3]; 3];
        for c in 0..3 {
            let mut vp = v;
            let mut vm = v;
            vp[c] += h;
            vm[c] -= h;
            let (rp, rm) = (residual(t, vp, goal), residual(t, vm, goal));
            for row in 0..3 {
                j[row][c] = wrap(rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let step = solve3(j, [-r[0], -r[1], -r[2]])?;
        let scale = 1.0f64.min(2.0 / step.iter().map(|x| x.abs()).fold(0.0, f64::max));
        for c in 0..3 {
            v[c] += scale * step[c];
        }
    }
    let r = residual(t, v, goal);
    (r.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-9).then_some(v)
}

fn opposite(t: Turn) -> Turn {
    match t {
        Turn::L => Turn::R,
        Turn::R => Turn::L,
        Turn::S => Turn::S,
    }
}

pub fn templates() -> Vec<Template> {
    use Len::*;
    use Turn::*;
    let mut out = Vec::new();
    for a in [L, R] {
        for b in [L, R] {
            out.push(Template {
                segs: vec![(a, Var(0)), (S, Var(1)), (b, Var(2))],
            });
        }
        let b = opposite(a);
        out.push(Template {
            segs: vec![(a, Var(0)), (b, Var(1)), (a, Var(2))],
        });
        for k in [1.0, -1.0] {
            out.push(Template {
                segs: vec![(a, Var(0)), (b, Var(1)), (a, Scaled(1, k)), (b, Var(2))],
            });
        }
        for c in [L, R] {
            for q in [FRAC_PI_2, -FRAC_PI_2] {
                out.push(Template {
                    segs: vec![(a, Var(0)), (b, Fixed(q)), (S, Var(1)), (c, Var(2))],
                });
                out.push(Template {
                    segs: vec![(c, Var(0)), (S, Var(1)), (a, Fixed(q)), (b, Var(2))],
                });
            }
        }
        for q1 in [FRAC_PI_2, -FRAC_PI_2] {
            for q2 in [FRAC_PI_2, -FRAC_PI_2] {
                out.push(Template {
                    segs: vec![
                        (a, Var(0)),
                        (b, Fixed(q1)),
                        (S, Var(1)),
                        (a, Fixed(q2)),
                        (b, Var(2)),
                    ],
                });
            }
        }
    }
    out
}

/// Seeds per unknown: turn angles and straight lengths sample different ranges.
fn seeds(t: &Template, var: usize) -> Vec<f64> {
    let straight = t
        .segs
        .iter()
        .any(|&(turn, l)| turn == Turn::S && matches!(l, Len::Var(i) if i == var));
    if straight {
        vec![-24.0, -12.0, -6.0, -2.0, 0.0, 2.0, 6.0, 12.0, 24.0]
    } else {
        (-4..=4).map(|k| k as f64 * FRAC_PI_2).collect()
    }
}

/// Shortest converged template solution from the origin to `goal`, unit radius.
pub fn brute_force_length(goal: (f64, f64, f64)) -> f64 {
    let mut best = f64::INFINITY;
    for t in templates() {
        let (s0, s1, s2) = (seeds(&t, 0), seeds(&t, 1), seeds(&t, 2));
        for &a in &s0 {
            for &b in &s1 {
                for &c in &s2 {
                    if let Some(v) = newton(&t, [a, b, c], goal) {
                        let len: f64 = lengths(&t, v).iter().map(|s| s.abs()).sum();
                        best = best.min(len);
                    }
                }
            }
        }
    }
    best
}
