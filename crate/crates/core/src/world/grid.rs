use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::rng::{derive_seed, label_hash};

/// Ground-truth cell class.
///
/// Grass classes are pliable (the robot may push through them); bushes, trees
/// and unknown obstacles are non-pliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VegClass {
    #[default]
    Free,
    SparseGrass,
    DenseGrass,
    Bush,
    Tree,
    Unknown,
}

impl VegClass {
    /// The four classes the classifier knows about, in column order.
    pub const TRAINED: [VegClass; 4] = [
        VegClass::SparseGrass,
        VegClass::DenseGrass,
        VegClass::Bush,
        VegClass::Tree,
    ];

    pub const ALL: [VegClass; 6] = [
        VegClass::Free,
        VegClass::SparseGrass,
        VegClass::DenseGrass,
        VegClass::Bush,
        VegClass::Tree,
        VegClass::Unknown,
    ];

    pub fn is_pliable(self) -> bool {
        matches!(self, VegClass::SparseGrass | VegClass::DenseGrass)
    }

    pub fn is_non_pliable(self) -> bool {
        matches!(self, VegClass::Bush | VegClass::Tree | VegClass::Unknown)
    }

    /// Zero-based column in the prediction matrix, for trained classes only.
    pub fn class_index(self) -> Option<usize> {
        match self {
            VegClass::SparseGrass => Some(0),
            VegClass::DenseGrass => Some(1),
            VegClass::Bush => Some(2),
            VegClass::Tree => Some(3),
            _ => None,
        }
    }

    pub fn from_class_index(idx: usize) -> Option<VegClass> {
        Self::TRAINED.get(idx).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            VegClass::Free => "free",
            VegClass::SparseGrass => "sparse_grass",
            VegClass::DenseGrass => "dense_grass",
            VegClass::Bush => "bush",
            VegClass::Tree => "tree",
            VegClass::Unknown => "unknown",
        }
    }

    pub fn default_height(self) -> f64 {
        match self {
            VegClass::Free => 0.0,
            VegClass::SparseGrass => 0.6,
            VegClass::DenseGrass => 1.0,
            VegClass::Bush => 0.4,
            VegClass::Tree => 3.0,
            VegClass::Unknown => 1.7,
        }
    }

    /// Per-cell drag; summed over the ~29 cells under a 0.3 m footprint.
    pub fn default_drag(self) -> f64 {
        match self {
            VegClass::SparseGrass => 0.003,
            VegClass::DenseGrass => 0.01,
            _ => 0.0,
        }
    }

    fn check_height(self, h: f64) -> Result<()> {
        let ok = match self {
            VegClass::Free => h == 0.0,
            VegClass::SparseGrass | VegClass::DenseGrass => h > 0.3,
            VegClass::Bush => (0.1..=0.5).contains(&h),
            VegClass::Tree => h > 2.0,
            VegClass::Unknown => h > 0.0,
        };
        if ok && h.is_finite() {
            Ok(())
        } else {
            let range = match self {
                VegClass::Free => "exactly 0",
                VegClass::SparseGrass | VegClass::DenseGrass => "> 0.3 m",
                VegClass::Bush => "within [0.1, 0.5] m",
                VegClass::Tree => "> 2 m",
                VegClass::Unknown => "> 0 m",
            };
            Err(Error::config(format!(
                "{} height {h} m out of range (must be {range})",
                self.name()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cell {
    pub class: VegClass,
    pub plant_height: f64,
    pub drag: f64,
}

impl Cell {
    pub const FREE: Cell = Cell {
        class: VegClass::Free,
        plant_height: 0.0,
        drag: 0.0,
    };

    /// True if a horizontal scan plane at height `z` is blocked by this cell.
    pub fn occludes(&self, z: f64) -> bool {
        self.class != VegClass::Free && self.plant_height >= z
    }
}

/// Region covered by a vegetation blob. A cell belongs to the blob when its
/// center lies inside the shape (boundary inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlobShape {
    Rect { min: [f64; 2], max: [f64; 2] },
    Disc { center: [f64; 2], radius: f64 },
    Polygon { points: Vec<[f64; 2]> },
}

impl BlobShape {
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            BlobShape::Rect { min, max } => {
                p.x >= min[0] && p.x <= max[0] && p.y >= min[1] && p.y <= max[1]
            }
            BlobShape::Disc { center, radius } => {
                (p.x - center[0]).hypot(p.y - center[1]) <= *radius
            }
            BlobShape::Polygon { points } => point_in_polygon(points, p),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            BlobShape::Rect { min, max } if min[0] > max[0] || min[1] > max[1] => {
                Err(Error::config("rect blob has min > max"))
            }
            BlobShape::Disc { radius, .. } if !(*radius > 0.0) => {
                Err(Error::config("disc blob radius must be positive"))
            }
            BlobShape::Polygon { points } if points.len() < 3 => {
                Err(Error::config("polygon blob needs at least 3 vertices"))
            }
            _ => Ok(()),
        }
    }
}

// Even-odd rule.
fn point_in_polygon(points: &[[f64; 2]], p: Point2) -> bool {
    let mut inside = false;
    let n = points.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (points[i][0], points[i][1]);
        let (xj, yj) = (points[j][0], points[j][1]);
        if (yi > p.y) != (yj > p.y) && p.x < (xj - xi) * (p.y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VegBlob {
    pub class: VegClass,
    #[serde(flatten)]
    pub shape: BlobShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drag: Option<f64>,
    /// Fraction of covered cells that receive the class, chosen by a seeded
    /// per-cell hash.
    #[serde(default = "one")]
    pub density: f64,
}

fn one() -> f64 {
    1.0
}

impl VegBlob {
    pub fn new(class: VegClass, shape: BlobShape) -> Self {
        Self {
            class,
            shape,
            height: None,
            drag: None,
            density: 1.0,
        }
    }

    pub fn height(&self) -> f64 {
        self.height.unwrap_or_else(|| self.class.default_height())
    }

    pub fn drag(&self) -> f64 {
        self.drag.unwrap_or_else(|| self.class.default_drag())
    }

    fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        self.class.check_height(self.height())?;
        let drag = self.drag();
        if !(0.0..=1.0).contains(&drag) {
            return Err(Error::config(format!("drag {drag} outside [0, 1]")));
        }
        if drag > 0.0 && !self.class.is_pliable() {
            return Err(Error::config(format!(
                "{} blob cannot carry drag (only grass is pliable)",
                self.class.name()
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::config(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        Ok(())
    }
}

/// World description: dimensions plus vegetation blobs painted in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    #[serde(default, rename = "blob")]
    pub blobs: Vec<VegBlob>,
}

/// Row-major grid; cell `(ix, iy)` covers `[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldGrid {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<Cell>,
}

/// Paints `spec` into a grid. `seed` drives partial-density blobs only.
pub fn build_world(spec: &WorldSpec, seed: u64) -> Result<WorldGrid> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::config("world dimensions must be positive"));
    }
    if !(spec.resolution > 0.0) || !spec.resolution.is_finite() {
        return Err(Error::config("world resolution must be positive"));
    }
    let mut grid = WorldGrid::empty(spec.width, spec.height, spec.resolution);
    for (bi, blob) in spec.blobs.iter().enumerate() {
        blob.validate()
            .map_err(|e| Error::config(format!("blob {bi}: {e}")))?;
        let cell = if blob.class == VegClass::Free {
            Cell::FREE
        } else {
            Cell {
                class: blob.class,
                plant_height: blob.height(),
                drag: blob.drag(),
            }
        };
        let blob_seed = derive_seed(&[seed, label_hash("blob"), bi as u64]);
        for iy in 0..spec.height {
            for ix in 0..spec.width {
                if !blob.shape.contains(grid.cell_center(ix, iy)) {
                    continue;
                }
                if blob.density < 1.0 {
                    let u = (derive_seed(&[blob_seed, ix as u64, iy as u64]) >> 11) as f64
                        / (1u64 << 53) as f64;
                    if u >= blob.density {
                        continue;
                    }
                }
                *grid.cell_mut(ix, iy) = cell;
            }
        }
    }
    Ok(grid)
}

impl WorldGrid {
    pub fn empty(width: usize, height: usize, resolution: f64) -> Self {
        Self {
            width,
            height,
            resolution,
            cells: vec![Cell::FREE; width * height],
        }
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

    pub fn extent(&self) -> (f64, f64) {
        (
            self.width as f64 * self.resolution,
            self.height as f64 * self.resolution,
        )
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.width + ix]
    }

    pub fn cell_mut(&mut self, ix: usize, iy: usize) -> &mut Cell {
        &mut self.cells[iy * self.width + ix]
    }

    /// Overwrites one cell. Test fixtures use this to build exact layouts.
    pub fn set(&mut self, ix: usize, iy: usize, cell: Cell) {
        *self.cell_mut(ix, iy) = cell;
    }

    /// Signed cell coordinates, possibly outside the grid.
    pub fn cell_coords(&self, p: Point2) -> (i64, i64) {
        (
            (p.x / self.resolution).floor() as i64,
            (p.y / self.resolution).floor() as i64,
        )
    }

    pub fn cell_index(&self, p: Point2) -> Option<(usize, usize)> {
        let (ix, iy) = self.cell_coords(p);
        self.in_grid(ix, iy).then_some((ix as usize, iy as usize))
    }

    pub fn in_grid(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height
    }

    pub fn contains(&self, p: Point2) -> bool {
        let (w, h) = self.extent();
        p.x >= 0.0 && p.y >= 0.0 && p.x < w && p.y < h
    }

    pub fn cell_at(&self, p: Point2) -> Option<&Cell> {
        self.cell_index(p).map(|(ix, iy)| self.cell(ix, iy))
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            (ix as f64 + 0.5) * self.resolution,
            (iy as f64 + 0.5) * self.resolution,
        )
    }

    pub fn count_class(&self, class: VegClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }

    pub fn count_where(&self, pred: impl Fn(VegClass) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(c.class)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(class: VegClass, min: [f64; 2], max: [f64; 2]) -> VegBlob {
        VegBlob::new(class, BlobShape::Rect { min, max })
    }

    #[test]
    fn tree_blob_at_center_has_tree_height() {
        let spec = WorldSpec {
            width: 20,
            height: 20,
            resolution: 0.1,
            blobs: vec![rect(VegClass::Tree, [0.9, 0.9], [1.1, 1.1])],
        };
        let w = build_world(&spec, 0).unwrap();
        // centers 0.95 and 1.05 in each axis
        assert_eq!(w.count_class(VegClass::Tree), 4);
        let c = w.cell(10, 10);
        assert_eq!(c.class, VegClass::Tree);
        assert_eq!(c.plant_height, 3.0);
        assert_eq!(c.drag, 0.0);
        assert_eq!(*w.cell(0, 0), Cell::FREE);
    }

    #[test]
    fn tall_bush_is_rejected() {
        let mut blob = rect(VegClass::Bush, [0.0, 0.0], [1.0, 1.0]);
        blob.height = Some(1.0);
        let spec = WorldSpec {
            width: 20,
            height: 20,
            resolution: 0.1,
            blobs: vec![blob],
        };
        let err = build_world(&spec, 0).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert!(err.to_string().contains("bush"));
    }

    #[test]
    fn short_grass_and_short_tree_are_rejected() {
        for (class, h) in [(VegClass::DenseGrass, 0.3), (VegClass::Tree, 2.0)] {
            let mut blob = rect(class, [0.0, 0.0], [1.0, 1.0]);
            blob.height = Some(h);
            let spec = WorldSpec {
                width: 10,
                height: 10,
                resolution: 0.1,
                blobs: vec![blob],
            };
            assert!(build_world(&spec, 0).is_err());
        }
    }

    #[test]
    fn drag_on_tree_is_rejected() {
        let mut blob = rect(VegClass::Tree, [0.0, 0.0], [1.0, 1.0]);
        blob.drag = Some(0.1);
        let spec = WorldSpec {
            width: 10,
            height: 10,
            resolution: 0.1,
            blobs: vec![blob],
        };
        assert!(build_world(&spec, 0).is_err());
    }

    #[test]
    fn zero_dimensions_rejected() {
        let spec = WorldSpec {
            width: 0,
            height: 10,
            resolution: 0.1,
            blobs: vec![],
        };
        assert!(build_world(&spec, 0).is_err());
    }

    #[test]
    fn partial_density_is_seeded() {
        let mut blob = rect(VegClass::SparseGrass, [0.0, 0.0], [4.0, 4.0]);
        blob.density = 0.5;
        let spec = WorldSpec {
            width: 40,
            height: 40,
            resolution: 0.1,
            blobs: vec![blob],
        };
        let a = build_world(&spec, 3).unwrap();
        let b = build_world(&spec, 3).unwrap();
        let c = build_world(&spec, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let n = a.count_class(VegClass::SparseGrass) as f64;
        assert!((n / 1600.0 - 0.5).abs() < 0.06, "{n}");
    }

    #[test]
    fn polygon_membership() {
        let tri = BlobShape::Polygon {
            points: vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
        };
        assert!(tri.contains(Point2::new(0.5, 0.5)));
        assert!(!tri.contains(Point2::new(1.5, 1.5)));
    }
}
