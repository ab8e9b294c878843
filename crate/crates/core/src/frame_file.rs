//! Binary frame container.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! header   "FDV1" | rows u32 | cols u32 | sensor 8×f64 | seed u64      84 bytes
//! cell     valid u8 | x y z v 4×f64 | object id u32 | truth v 3×f64 | moving u8
//!                                                                      62 bytes
//! ```
//!
//! The sensor block holds, in order: azimuth FoV, elevation FoV, azimuth
//! resolution, elevation resolution, max range, frame rate, range σ, Doppler σ.
//! Cells follow in row-major order; an empty cell is a zero byte followed by
//! 61 zero bytes.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::point::{DopplerPoint, Vec3};
use crate::sim::{CellRecord, FrameGrid, SensorConfig};

pub const MAGIC: &[u8; 4] = b"FDV1";
pub const HEADER_SIZE: usize = 4 + 4 + 4 + 8 * 8 + 8;
pub const RECORD_SIZE: usize = 1 + 4 * 8 + 4 + 3 * 8 + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFile {
    pub sensor: SensorConfig,
    pub seed: u64,
    pub grid: FrameGrid,
}

fn sensor_fields(s: &SensorConfig) -> [f64; 8] {
    [
        s.azimuth_fov,
        s.elevation_fov,
        s.azimuth_res,
        s.elevation_res,
        s.max_range,
        s.frame_rate,
        s.range_noise_sigma,
        s.velocity_noise_sigma,
    ]
}

impl FrameFile {
    pub fn encode(&self) -> Vec<u8> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(HEADER_SIZE + g.len() * RECORD_SIZE);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(g.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(g.cols() as u32).to_le_bytes());
        for f in sensor_fields(&self.sensor) {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());
        for cell in g.cells() {
            match cell {
                None => out.extend_from_slice(&[0u8; RECORD_SIZE]),
                Some(c) => {
                    out.push(1);
                    for f in [c.point.x, c.point.y, c.point.z, c.point.v] {
                        out.extend_from_slice(&f.to_le_bytes());
                    }
                    out.extend_from_slice(&c.truth_object_id.to_le_bytes());
                    for f in c.truth_velocity.iter() {
                        out.extend_from_slice(&f.to_le_bytes());
                    }
                    out.push(c.truth_is_moving as u8);
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |m: String| Error::BadFrame(m);
        if bytes.len() < HEADER_SIZE {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("magic bytes are not FDV1".into()));
        }
        let mut cur = Cursor { bytes, pos: 4 };
        let rows = cur.u32() as usize;
        let cols = cur.u32() as usize;
        if rows == 0 || cols == 0 {
            return Err(bad(format!("grid is {rows}×{cols}")));
        }
        let f: [f64; 8] = std::array::from_fn(|_| cur.f64());
        let sensor = SensorConfig {
            azimuth_fov: f[0],
            elevation_fov: f[1],
            azimuth_res: f[2],
            elevation_res: f[3],
            max_range: f[4],
            frame_rate: f[5],
            range_noise_sigma: f[6],
            velocity_noise_sigma: f[7],
        };
        let seed = cur.u64();
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(RECORD_SIZE))
            .ok_or_else(|| bad("grid size overflows".into()))?;
        if bytes.len() - HEADER_SIZE != expected {
            return Err(bad(format!(
                "payload is {} bytes, expected {expected} for {rows}×{cols}",
                bytes.len() - HEADER_SIZE
            )));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows * cols {
            let start = cur.pos;
            match cur.u8() {
                0 => {
                    cur.pos = start + RECORD_SIZE;
                    cells.push(None);
                }
                1 => {
                    let point = DopplerPoint::new(cur.f64(), cur.f64(), cur.f64(), cur.f64());
                    let truth_object_id = cur.u32();
                    let truth_velocity = Vec3::new(cur.f64(), cur.f64(), cur.f64());
                    let truth_is_moving = match cur.u8() {
                        0 => false,
                        1 => true,
                        b => return Err(bad(format!("cell {i}: moving flag {b}"))),
                    };
                    cells.push(Some(CellRecord {
                        point,
                        truth_object_id,
                        truth_velocity,
                        truth_is_moving,
                    }));
                }
                b => return Err(bad(format!("cell {i}: validity byte {b}"))),
            }
        }
        Ok(Self {
            sensor,
            seed,
            grid: FrameGrid::from_cells(rows, cols, cells),
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&self.encode())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::io("<reader>", e))?;
        Self::decode(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|e| match e {
            Error::BadFrame(m) => Error::BadFrame(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out = self.bytes[self.pos..self.pos + N].try_into().expect("length checked");
        self.pos += N;
        out
    }

    fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}
