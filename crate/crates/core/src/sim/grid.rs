use serde::{Deserialize, Serialize};

use crate::point::{DopplerPoint, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub point: DopplerPoint,
    /// 0 for the ground and other world geometry without an id.
    pub truth_object_id: u32,
    /// Absolute object velocity expressed in sensor axes.
    pub truth_velocity: Vec3,
    pub truth_is_moving: bool,
}

/// Organized frame: `rows` elevation bins by `cols` azimuth bins, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid {
    rows: usize,
    cols: usize,
    cells: Vec<Option<CellRecord>>,
}

impl FrameGrid {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![None; rows * cols],
        }
    }

    /// Panics if `cells.len() != rows * cols`.
    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Option<CellRecord>>) -> Self {
        assert_eq!(cells.len(), rows * cols, "grid shape does not match cell count");
        Self { rows, cols, cells }
    }

    /// Grid of bare Doppler values, used by tests and tools that have no geometry.
    /// `None` entries are empty cells. Positions are placed on a unit sphere.
    pub fn from_dopplers(rows: usize, cols: usize, dopplers: &[Option<f64>]) -> Self {
        assert_eq!(dopplers.len(), rows * cols);
        let cells = dopplers
            .iter()
            .map(|d| {
                d.map(|v| CellRecord {
                    point: DopplerPoint::new(1.0, 0.0, 0.0, v),
                    truth_object_id: 0,
                    truth_velocity: Vec3::zeros(),
                    truth_is_moving: false,
                })
            })
            .collect();
        Self { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&CellRecord> {
        self.cells[self.index(row, col)].as_ref()
    }

    pub fn cell(&self, idx: usize) -> Option<&CellRecord> {
        self.cells[idx].as_ref()
    }

    pub fn cells(&self) -> &[Option<CellRecord>] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Option<CellRecord>] {
        &mut self.cells
    }

    pub fn valid_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Points for the given cell indices. Empty cells are skipped.
    pub fn points(&self, indices: &[usize]) -> Vec<DopplerPoint> {
        indices.iter().filter_map(|&i| self.cells[i].map(|c| c.point)).collect()
    }
}
