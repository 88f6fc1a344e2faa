//! Parking-lot environment: occupancy grid, Euclidean distance field, footprint
//! collision queries, layout generation and the plain-text map format.

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{PlanError, Result};
use crate::vehicle::{footprint_disks, DiskFootprint, Pose, VehicleParams};

/// Row-major occupancy grid; cell `(ix, iy)` covers
/// `[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)` and row 0 is the minimum y.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, resolution: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(PlanError::InvalidLayout(
                "grid dimensions must be positive".into(),
            ));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(PlanError::InvalidLayout(
                "resolution must be positive".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            resolution,
            cells: vec![false; width * height],
        })
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<bool>,
    ) -> Result<Self> {
        let mut grid = Self::new(width, height, resolution)?;
        if cells.len() != width * height {
            return Err(PlanError::InvalidLayout(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        grid.cells = cells;
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn width_m(&self) -> f64 {
        self.width as f64 * self.resolution
    }

    pub fn height_m(&self) -> f64 {
        self.height as f64 * self.resolution
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    #[inline]
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[self.index(ix, iy)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, occupied: bool) {
        let i = self.index(ix, iy);
        self.cells[i] = occupied;
    }

    /// Cell containing the world point, if inside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let ix = (x / self.resolution).floor() as usize;
        let iy = (y / self.resolution).floor() as usize;
        (ix < self.width && iy < self.height).then_some((ix, iy))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x < self.width_m() && y < self.height_m()
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            (ix as f64 + 0.5) * self.resolution,
            (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Marks every cell whose center lies in `[x0, x1) x [y0, y1)`.
    pub fn fill_rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) {
        let res = self.resolution;
        let lo = |v: f64| ((v / res - 0.5).ceil().max(0.0)) as usize;
        let hi = |v: f64, n: usize| ((v / res - 0.5).ceil().max(0.0) as usize).min(n);
        for iy in lo(y0)..hi(y1, self.height) {
            for ix in lo(x0)..hi(x1, self.width) {
                self.set(ix, iy, true);
            }
        }
    }

    /// Stable digest of the grid contents, used to tag benchmark rows.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.width as u64).to_le_bytes());
        hasher.update((self.height as u64).to_le_bytes());
        hasher.update(self.resolution.to_le_bytes());
        let bytes: Vec<u8> = self.cells.iter().map(|&c| c as u8).collect();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        digest[..8]
            .iter()
            .fold(String::with_capacity(16), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

/// Per-cell Euclidean distance (meters) from each cell center to the nearest
/// occupied cell center. `f64::INFINITY` everywhere when the grid is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    resolution: f64,
    values: Vec<f64>,
}

/// Stand-in for "no obstacle" in the squared-distance passes.
const FAR: f64 = 1e30;

/// 1D lower envelope of parabolas (Felzenszwalb & Huttenlocher) over squared distances.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        if s <= z[k] {
            v[0] = q;
            z[1] = f64::INFINITY;
        } else {
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = f[v[k]] + d * d;
    }
}

pub fn compute_distance_field(grid: &OccupancyGrid) -> DistanceField {
    let (w, h) = (grid.width, grid.height);
    let mut sq: Vec<f64> = grid
        .cells
        .iter()
        .map(|&occ| if occ { 0.0 } else { FAR })
        .collect();
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for ix in 0..w {
        for iy in 0..h {
            f[iy] = sq[iy * w + ix];
        }
        edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for iy in 0..h {
            sq[iy * w + ix] = out[iy];
        }
    }
    for iy in 0..h {
        let row = &mut sq[iy * w..(iy + 1) * w];
        f[..w].copy_from_slice(row);
        edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        row.copy_from_slice(&out[..w]);
    }
    let values = sq
        .into_iter()
        .map(|d| {
            if d >= FAR / 2.0 {
                f64::INFINITY
            } else {
                d.sqrt() * grid.resolution
            }
        })
        .collect();
    DistanceField {
        width: w,
        height: h,
        resolution: grid.resolution,
        values,
    }
}

impl DistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0
            && y >= 0.0
            && x < self.width as f64 * self.resolution
            && y < self.height as f64 * self.resolution
    }

    /// Bilinear interpolation between cell centers, clamped at the border.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let u = (x / self.resolution - 0.5).clamp(0.0, (self.width - 1) as f64);
        let v = (y / self.resolution - 0.5).clamp(0.0, (self.height - 1) as f64);
        let i0 = u.floor() as usize;
        let j0 = v.floor() as usize;
        let i1 = (i0 + 1).min(self.width - 1);
        let j1 = (j0 + 1).min(self.height - 1);
        let fu = u - i0 as f64;
        let fv = v - j0 as f64;
        let d00 = self.at(i0, j0);
        if d00.is_infinite() {
            // an obstacle-free grid is infinite everywhere
            return f64::INFINITY;
        }
        let d10 = self.at(i1, j0);
        let d01 = self.at(i0, j1);
        let d11 = self.at(i1, j1);
        (1.0 - fv) * ((1.0 - fu) * d00 + fu * d10) + fv * ((1.0 - fu) * d01 + fu * d11)
    }

    /// Extra clearance demanded on top of the disk radius to cover interpolation error.
    pub fn safety_margin(&self) -> f64 {
        self.resolution * std::f64::consts::SQRT_2 / 2.0
    }
}

/// True iff every disk center is inside the grid and its interpolated clearance
/// exceeds the disk radius plus the half-cell-diagonal margin.
pub fn is_collision_free(pose: &Pose, footprint: &DiskFootprint, field: &DistanceField) -> bool {
    let margin = field.safety_margin();
    let (s, c) = pose.theta.sin_cos();
    footprint.centers.iter().all(|&(lx, ly)| {
        let x = pose.x + c * lx - s * ly;
        let y = pose.y + s * lx + c * ly;
        field.contains(x, y) && field.sample(x, y) - margin > footprint.radius
    })
}

/// Minimum over disks of (distance at center - radius); 0 for a colliding pose.
pub fn clearance(pose: &Pose, footprint: &DiskFootprint, field: &DistanceField) -> f64 {
    if !is_collision_free(pose, footprint, field) {
        return 0.0;
    }
    footprint
        .transform(pose)
        .iter()
        .map(|&(x, y, r)| field.sample(x, y) - r)
        .fold(f64::INFINITY, f64::min)
}

/// A grid together with its distance field and the vehicle footprint checked against it.
#[derive(Debug, Clone)]
pub struct World {
    pub grid: OccupancyGrid,
    pub field: DistanceField,
    pub footprint: DiskFootprint,
    pub params: VehicleParams,
}

impl World {
    pub fn new(grid: OccupancyGrid, params: VehicleParams) -> Result<Self> {
        params.validate()?;
        let field = compute_distance_field(&grid);
        let footprint = footprint_disks(&params);
        Ok(Self {
            grid,
            field,
            footprint,
            params,
        })
    }

    pub fn is_free(&self, pose: &Pose) -> bool {
        is_collision_free(pose, &self.footprint, &self.field)
    }

    pub fn clearance(&self, pose: &Pose) -> f64 {
        clearance(pose, &self.footprint, &self.field)
    }

    /// Smallest distance from a disk center to the map border.
    pub fn border_distance(&self, pose: &Pose) -> f64 {
        let (w, h) = (self.grid.width_m(), self.grid.height_m());
        self.footprint
            .transform(pose)
            .iter()
            .map(|&(x, y, _)| x.min(y).min(w - x).min(h - y).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_turning_radius(&self) -> f64 {
        self.params.min_turning_radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOrientation {
    Perpendicular,
    Parallel,
}

impl FromStr for SlotOrientation {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "perpendicular" => Ok(Self::Perpendicular),
            "parallel" => Ok(Self::Parallel),
            other => Err(PlanError::InvalidLayout(format!(
                "unknown orientation {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub id: usize,
    pub goal: Pose,
}

/// Parameters of the generated lot.
///
/// The lot has four rows of `slots_per_row` slots: one along the bottom wall,
/// two back-to-back on a central island and one along the top wall, with an
/// aisle on either side of the island. The island spine runs from the left
/// wall, so the upper aisle is reached through the turnaround zone at the right.
/// The entry opening is the left end of the lower aisle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutSpec {
    pub orientation: SlotOrientation,
    pub slots_per_row: usize,
    /// Slot extent along the aisle for parallel slots, perpendicular to it otherwise.
    pub slot_length: f64,
    pub slot_width: f64,
    pub aisle_width: f64,
    pub resolution: f64,
    pub entry: Pose,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self {
            orientation: SlotOrientation::Parallel,
            slots_per_row: 7,
            slot_length: 8.0,
            slot_width: 4.5,
            aisle_width: 8.0,
            resolution: 0.25,
            entry: Pose::new(0.0, 10.0, 0.0),
        }
    }
}

pub const ROWS: usize = 4;
const WALL_M: f64 = 0.5;
const STUB_THICKNESS_M: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct ParkingLayout {
    pub grid: OccupancyGrid,
    pub slots: Vec<Slot>,
    pub entry: Pose,
    pub orientation: SlotOrientation,
}

impl ParkingLayout {
    pub fn slot(&self, id: usize) -> Option<&Slot> {
        self.slots.get(id).filter(|s| s.id == id)
    }
}

pub fn build_parking_layout(spec: &LayoutSpec, params: &VehicleParams) -> Result<ParkingLayout> {
    params.validate()?;
    let bad = |msg: String| Err(PlanError::InvalidLayout(msg));
    for (name, v) in [
        ("slot_length", spec.slot_length),
        ("slot_width", spec.slot_width),
        ("aisle_width", spec.aisle_width),
        ("resolution", spec.resolution),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return bad(format!("{name} must be positive"));
        }
    }
    if spec.slot_length < params.body_length || spec.slot_width < params.body_width {
        return bad(format!(
            "slot {}x{} m cannot contain a {}x{} m vehicle",
            spec.slot_length, spec.slot_width, params.body_length, params.body_width
        ));
    }
    let (frontage, depth) = match spec.orientation {
        SlotOrientation::Parallel => (spec.slot_length, spec.slot_width),
        SlotOrientation::Perpendicular => (spec.slot_width, spec.slot_length),
    };
    let lead_in = spec.aisle_width;
    let rows_end = lead_in + spec.slots_per_row as f64 * frontage;
    let width_m = rows_end + spec.aisle_width + WALL_M;

    // bottom edge of each band, walking upwards
    let row0 = WALL_M;
    let aisle1 = row0 + depth;
    let row1 = aisle1 + spec.aisle_width;
    let spine = row1 + depth;
    let row2 = spine + WALL_M;
    let aisle2 = row2 + depth;
    let row3 = aisle2 + spec.aisle_width;
    let top_wall = row3 + depth;
    let height_m = top_wall + WALL_M;

    if !(spec.entry.y > aisle1 && spec.entry.y < row1) {
        return bad(format!(
            "entry y = {} is outside the lower aisle [{aisle1}, {row1})",
            spec.entry.y
        ));
    }

    let res = spec.resolution;
    let mut grid = OccupancyGrid::new(
        (width_m / res).round() as usize,
        (height_m / res).round() as usize,
        res,
    )?;
    let (w, h) = (grid.width_m(), grid.height_m());
    grid.fill_rect(0.0, 0.0, w, WALL_M);
    grid.fill_rect(0.0, top_wall, w, h);
    grid.fill_rect(w - WALL_M, 0.0, w, h);
    grid.fill_rect(0.0, 0.0, WALL_M, aisle1);
    grid.fill_rect(0.0, row1, WALL_M, h);
    grid.fill_rect(0.0, spine, rows_end, row2);

    // divider stubs grow from the back of each row into the slots
    let stub = (depth / 3.0).min(1.0);
    let backs = [
        (row0, 1.0),
        (row2 - WALL_M, -1.0),
        (row2, 1.0),
        (top_wall, -1.0),
    ];
    for &(back, dir) in &backs {
        let (y0, y1) = if dir > 0.0 {
            (back, back + stub)
        } else {
            (back - stub, back)
        };
        for k in 0..=spec.slots_per_row {
            let x = lead_in + k as f64 * frontage;
            grid.fill_rect(
                x - STUB_THICKNESS_M / 2.0,
                y0,
                x + STUB_THICKNESS_M / 2.0,
                y1,
            );
        }
    }

    let row_bottoms = [row0, row1, row2, row3];
    let mut slots = Vec::with_capacity(ROWS * spec.slots_per_row);
    for (r, &bottom) in row_bottoms.iter().enumerate() {
        let heading = match spec.orientation {
            // traffic flows right in the lower aisle and left in the upper one
            SlotOrientation::Parallel => {
                if r < 2 {
                    0.0
                } else {
                    std::f64::consts::PI
                }
            }
            // nose-in towards the row's back wall
            SlotOrientation::Perpendicular => {
                if r % 2 == 0 {
                    -std::f64::consts::FRAC_PI_2
                } else {
                    std::f64::consts::FRAC_PI_2
                }
            }
        };
        let cy = bottom + depth / 2.0;
        for k in 0..spec.slots_per_row {
            let cx = lead_in + (k as f64 + 0.5) * frontage;
            // place the rear axle so the body is centered in the slot
            let offset = params.body_length / 2.0 - params.rear_overhang;
            let goal = Pose::new(
                cx - offset * heading.cos(),
                cy - offset * heading.sin(),
                heading,
            );
            slots.push(Slot {
                id: slots.len(),
                goal,
            });
        }
    }

    let world = World::new(grid, *params)?;
    if let Some(slot) = slots.iter().find(|s| !world.is_free(&s.goal)) {
        return bad(format!(
            "slot {} cannot contain the vehicle footprint (disk radius {:.3} m)",
            slot.id, world.footprint.radius
        ));
    }
    Ok(ParkingLayout {
        grid: world.grid,
        slots,
        entry: spec.entry,
        orientation: spec.orientation,
    })
}

/// Serializes a grid and its slots in the plain-text map format.
pub fn write_map(grid: &OccupancyGrid, slots: &[Slot]) -> String {
    let mut out = String::with_capacity((grid.width + 1) * grid.height + 64);
    let _ = writeln!(out, "{} {} {}", grid.width, grid.height, grid.resolution);
    for iy in 0..grid.height {
        for ix in 0..grid.width {
            out.push(if grid.is_occupied(ix, iy) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out.push_str("SLOTS\n");
    for s in slots {
        let _ = writeln!(out, "{} {} {} {}", s.id, s.goal.x, s.goal.y, s.goal.theta);
    }
    out
}

pub fn read_map(text: &str) -> Result<(OccupancyGrid, Vec<Slot>)> {
    let err = |line: usize, message: &str| PlanError::MapFormat {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty map file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(err(1, "expected `width height resolution`"));
    }
    let width: usize = fields[0].parse().map_err(|_| err(1, "bad width"))?;
    let height: usize = fields[1].parse().map_err(|_| err(1, "bad height"))?;
    let resolution: f64 = fields[2].parse().map_err(|_| err(1, "bad resolution"))?;
    let mut cells = Vec::with_capacity(width * height);
    for row in 0..height {
        let (n, line) = lines
            .next()
            .ok_or_else(|| err(row + 2, "missing grid row"))?;
        if line.chars().count() != width {
            return Err(err(n, "row length does not match width"));
        }
        for ch in line.chars() {
            match ch {
                '#' => cells.push(true),
                '.' => cells.push(false),
                _ => return Err(err(n, "unexpected cell character")),
            }
        }
    }
    let grid = OccupancyGrid::from_cells(width, height, resolution, cells)?;
    let mut slots = Vec::new();
    match lines.next() {
        None => {}
        Some((_, "SLOTS")) => {
            for (n, line) in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(err(n, "expected `id x y theta`"));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|_| err(n, "bad number"));
                let id: usize = f[0].parse().map_err(|_| err(n, "bad slot id"))?;
                slots.push(Slot {
                    id,
                    goal: Pose {
                        x: num(f[1])?,
                        y: num(f[2])?,
                        theta: num(f[3])?,
                    },
                });
            }
        }
        Some((n, _)) => return Err(err(n, "expected SLOTS section")),
    }
    Ok((grid, slots))
}
