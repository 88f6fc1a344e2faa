//! Scenario configuration files.
//!
//! A configuration is a TOML document with the sections `layout`, `grid`,
//! `vehicle`, `planner`, `entry` and optionally `map`. Every key has a default,
//! so an empty file describes the default parallel lot.

use std::fs;
use std::path::{Path, PathBuf};

use parkplan_core::search::PlannerConfig;
use parkplan_core::world::{LayoutSpec, SlotOrientation};
use parkplan_core::{Pose, VehicleParams};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Perpendicular,
    Parallel,
}

impl From<Orientation> for SlotOrientation {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Perpendicular => SlotOrientation::Perpendicular,
            Orientation::Parallel => SlotOrientation::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    pub orientation: Orientation,
    pub slots_per_row: usize,
    pub slot_length_m: f64,
    pub slot_width_m: f64,
    pub aisle_width_m: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        let d = LayoutSpec::default();
        Self {
            orientation: Orientation::Parallel,
            slots_per_row: d.slots_per_row,
            slot_length_m: d.slot_length,
            slot_width_m: d.slot_width,
            aisle_width_m: d.aisle_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub resolution_m: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            resolution_m: LayoutSpec::default().resolution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSection {
    pub wheelbase_m: f64,
    pub length_m: f64,
    pub width_m: f64,
    pub rear_overhang_m: f64,
    pub alpha_max_rad: f64,
    pub n_disks: usize,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let v = VehicleParams::default();
        Self {
            wheelbase_m: v.wheelbase,
            length_m: v.body_length,
            width_m: v.body_width,
            rear_overhang_m: v.rear_overhang,
            alpha_max_rad: v.alpha_max,
            n_disks: v.n_disks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub w1: f64,
    pub w2: f64,
    pub reverse_penalty: f64,
    pub switch_penalty_m: f64,
    pub arc_min_m: f64,
    pub arc_max_m: f64,
    pub d_fw1_m: f64,
    pub d_fw2_m: f64,
    pub goal_xy_tol_m: f64,
    pub goal_theta_tol_rad: f64,
    pub max_iterations: usize,
    pub theta_bins: usize,
}

impl Default for PlannerSection {
    fn default() -> Self {
        let p = PlannerConfig::default();
        Self {
            w1: p.weight_w1,
            w2: p.weight_w2,
            reverse_penalty: p.reverse_penalty,
            switch_penalty_m: p.direction_switch_penalty,
            arc_min_m: p.arc_length_min,
            arc_max_m: p.arc_length_max,
            d_fw1_m: p.d_fw1,
            d_fw2_m: p.d_fw2,
            goal_xy_tol_m: p.goal_xy_tol,
            goal_theta_tol_rad: p.goal_theta_tol,
            max_iterations: p.max_iterations,
            theta_bins: p.theta_bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntrySection {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Default for EntrySection {
    fn default() -> Self {
        Self {
            x: 0.0,
            y: 10.0,
            theta: 0.0,
        }
    }
}

/// Loads the occupancy grid and slots from a map file instead of generating them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSection {
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub layout: LayoutSection,
    pub grid: GridSection,
    pub vehicle: VehicleSection,
    pub planner: PlannerSection,
    pub entry: EntrySection,
    pub map: MapSection,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Reads a configuration file. A relative `map.file` is resolved against the
    /// directory of the configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        if let Some(file) = cfg.map.file.as_mut() {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    pub fn entry_pose(&self) -> Pose {
        Pose::new(self.entry.x, self.entry.y, self.entry.theta)
    }

    pub fn layout_spec(&self) -> LayoutSpec {
        LayoutSpec {
            orientation: self.layout.orientation.into(),
            slots_per_row: self.layout.slots_per_row,
            slot_length: self.layout.slot_length_m,
            slot_width: self.layout.slot_width_m,
            aisle_width: self.layout.aisle_width_m,
            resolution: self.grid.resolution_m,
            entry: self.entry_pose(),
        }
    }

    pub fn vehicle_params(&self) -> VehicleParams {
        let v = &self.vehicle;
        VehicleParams {
            wheelbase: v.wheelbase_m,
            body_length: v.length_m,
            body_width: v.width_m,
            rear_overhang: v.rear_overhang_m,
            alpha_max: v.alpha_max_rad,
            n_disks: v.n_disks,
        }
    }

    /// Planner settings; the clearance steps keep their defaults, clamped to the
    /// configured arc-length range.
    pub fn planner_config(&self) -> Result<PlannerConfig> {
        let p = &self.planner;
        let defaults = PlannerConfig::default();
        let thresholds = if p.arc_min_m <= p.arc_max_m {
            defaults
                .clearance_thresholds
                .iter()
                .map(|&(c, a)| (c, a.clamp(p.arc_min_m, p.arc_max_m)))
                .collect()
        } else {
            defaults.clearance_thresholds.clone()
        };
        let cfg = PlannerConfig {
            weight_w1: p.w1,
            weight_w2: p.w2,
            reverse_penalty: p.reverse_penalty,
            direction_switch_penalty: p.switch_penalty_m,
            arc_length_min: p.arc_min_m,
            arc_length_max: p.arc_max_m,
            clearance_thresholds: thresholds,
            d_fw1: p.d_fw1_m,
            d_fw2: p.d_fw2_m,
            goal_xy_tol: p.goal_xy_tol_m,
            goal_theta_tol: p.goal_theta_tol_rad,
            max_iterations: p.max_iterations,
            theta_bins: p.theta_bins,
            ..defaults
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
