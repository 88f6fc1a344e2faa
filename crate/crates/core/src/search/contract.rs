use super::{PlanResult, SAMPLE_STEP};
use crate::vehicle::{angle_diff, propagate, Pose};
use crate::world::World;

fn menger_curvature(a: &Pose, b: &Pose, c: &Pose) -> f64 {
    let ab = a.distance(b);
    let bc = b.distance(c);
    let ca = c.distance(a);
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if ab * bc * ca < 1e-12 {
        return 0.0;
    }
    2.0 * cross.abs() / (ab * bc * ca)
}

/// Checks a found plan: samples collision-free and at most [`SAMPLE_STEP`] apart,
/// curvature within `1/R_min`, endpoint within tolerance of the goal, and replay of
/// the actions from the start reproducing the samples.
pub fn check_path_contract(
    result: &PlanResult,
    world: &World,
    xy_tol: f64,
    theta_tol: f64,
) -> Result<(), String> {
    let poses = &result.poses;
    let Some(&(last, _)) = poses.last() else {
        return Err("no samples".into());
    };
    for (i, (p, _)) in poses.iter().enumerate() {
        if !world.is_free(p) {
            return Err(format!("sample {i} at ({:.3}, {:.3}) collides", p.x, p.y));
        }
    }
    for (i, w) in poses.windows(2).enumerate() {
        let d = w[0].0.distance(&w[1].0);
        if d > SAMPLE_STEP + 1e-9 {
            return Err(format!("samples {i}/{} are {d:.4} m apart", i + 1));
        }
    }

    let radius = world.min_turning_radius();
    let kappa_max = 1.0 / radius + 1e-6;
    for (i, w) in poses.windows(3).enumerate() {
        if w[0].1 != w[1].1 || w[1].1 != w[2].1 {
            continue;
        }
        let k = menger_curvature(&w[0].0, &w[1].0, &w[2].0);
        if k > kappa_max {
            return Err(format!(
                "curvature {k:.6} at sample {} exceeds {kappa_max:.6}",
                i + 1
            ));
        }
    }

    let dxy = last.distance(&result.goal);
    let dth = angle_diff(last.theta, result.goal.theta).abs();
    if dxy > xy_tol || dth > theta_tol {
        return Err(format!("endpoint off by {dxy:.4} m, {dth:.4} rad"));
    }

    let mut replay = vec![result.start];
    let mut origin = result.start;
    for &(action, len) in &result.actions {
        if len <= 0.0 {
            continue;
        }
        let n = (len / SAMPLE_STEP).ceil().max(1.0) as usize;
        for k in 1..=n {
            replay.push(propagate(
                &origin,
                action,
                len * k as f64 / n as f64,
                radius,
            ));
        }
        origin = propagate(&origin, action, len, radius);
    }
    if replay.len() != poses.len() {
        return Err(format!(
            "replay has {} samples, path has {}",
            replay.len(),
            poses.len()
        ));
    }
    for (i, (r, (p, _))) in replay.iter().zip(poses).enumerate() {
        if r.distance(p) > 1e-6 || angle_diff(r.theta, p.theta).abs() > 1e-6 {
            return Err(format!("replay diverges at sample {i}"));
        }
    }
    Ok(())
}
