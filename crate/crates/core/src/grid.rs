//! Dense bit-per-voxel occupancy grid, point-cloud voxelization and the
//! binary `RNAV` grid format.
//!
//! Voxel `(x, y, z)` covers the half-open box `origin + [x, x+1) * r` (and
//! likewise for y, z). Linear indices are x-fastest:
//! `idx = x + nx * (y + ny * z)`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRID_MAGIC: [u8; 4] = *b"RNAV";
pub const GRID_VERSION: u32 = 1;
/// Bytes before the occupancy payload.
pub const GRID_HEADER_LEN: usize = 4 + 4 + 3 * 4 + 8 + 3 * 8;

/// Integer voxel coordinate. Ordering is lexicographic `(x, y, z)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct Voxel {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Voxel {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Voxel { x, y, z }
    }

    pub fn offset(self, dx: i32, dy: i32, dz: i32) -> Self {
        Voxel::new(self.x + dx, self.y + dy, self.z + dz)
    }
}

impl From<[i32; 3]> for Voxel {
    fn from(v: [i32; 3]) -> Self {
        Voxel::new(v[0], v[1], v[2])
    }
}

impl From<Voxel> for [i32; 3] {
    fn from(v: Voxel) -> Self {
        [v.x, v.y, v.z]
    }
}

/// Voxel counts along x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Dims { nx, ny, nz }
    }

    pub fn volume(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn contains(&self, v: Voxel) -> bool {
        v.x >= 0
            && v.y >= 0
            && v.z >= 0
            && (v.x as usize) < self.nx
            && (v.y as usize) < self.ny
            && (v.z as usize) < self.nz
    }

    /// Linear index of an in-bounds voxel, `None` otherwise.
    pub fn index(&self, v: Voxel) -> Option<usize> {
        self.contains(v)
            .then(|| v.x as usize + self.nx * (v.y as usize + self.ny * v.z as usize))
    }

    pub fn voxel(&self, idx: usize) -> Voxel {
        let x = idx % self.nx;
        let y = (idx / self.nx) % self.ny;
        let z = idx / (self.nx * self.ny);
        Voxel::new(x as i32, y as i32, z as i32)
    }
}

/// World-frame placement of a voxel lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub dims: Dims,
    pub resolution: f64,
    pub origin: [f64; 3],
}

impl GridGeometry {
    pub fn world_to_voxel(&self, p: [f64; 3]) -> Result<Voxel> {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("{p:?}")));
        }
        let f = |i: usize| ((p[i] - self.origin[i]) / self.resolution).floor() as i32;
        Ok(Voxel::new(f(0), f(1), f(2)))
    }

    pub fn voxel_to_world(&self, v: Voxel) -> [f64; 3] {
        let r = self.resolution;
        [
            self.origin[0] + (v.x as f64 + 0.5) * r,
            self.origin[1] + (v.y as f64 + 0.5) * r,
            self.origin[2] + (v.z as f64 + 0.5) * r,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    geometry: GridGeometry,
    occupancy: BitVec<u8, Lsb0>,
}

impl OccupancyGrid {
    /// An all-free grid.
    pub fn new(dims: Dims, resolution: f64, origin: [f64; 3]) -> Result<Self> {
        Self::validate(dims, resolution, origin)?;
        Ok(OccupancyGrid {
            geometry: GridGeometry {
                dims,
                resolution,
                origin,
            },
            occupancy: bitvec![u8, Lsb0; 0; dims.volume()],
        })
    }

    fn validate(dims: Dims, resolution: f64, origin: [f64; 3]) -> Result<()> {
        if dims.nx == 0 || dims.ny == 0 || dims.nz == 0 {
            return Err(Error::InvalidParams(format!("grid dims must be >= 1, got {dims:?}")));
        }
        if dims.nx > i32::MAX as usize || dims.ny > i32::MAX as usize || dims.nz > i32::MAX as usize {
            return Err(Error::InvalidParams(format!("grid dims too large: {dims:?}")));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidParams(format!("resolution must be finite and > 0, got {resolution}")));
        }
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!("origin must be finite, got {origin:?}")));
        }
        Ok(())
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn dims(&self) -> Dims {
        self.geometry.dims
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    pub fn origin(&self) -> [f64; 3] {
        self.geometry.origin
    }

    /// Total voxel count `V`.
    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.is_empty()
    }

    /// Occupancy with the conservative boundary: anything outside the grid is occupied.
    #[inline]
    pub fn is_occupied(&self, v: Voxel) -> bool {
        match self.geometry.dims.index(v) {
            Some(i) => self.occupancy[i],
            None => true,
        }
    }

    /// Occupancy of an in-bounds voxel; `false` when out of bounds.
    #[inline]
    pub fn is_occupied_in_bounds(&self, v: Voxel) -> bool {
        self.geometry.dims.index(v).is_some_and(|i| self.occupancy[i])
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> bool {
        self.occupancy[idx]
    }

    /// Sets an in-bounds voxel. Out-of-bounds writes are ignored and return `false`.
    pub fn set(&mut self, v: Voxel, occupied: bool) -> bool {
        match self.geometry.dims.index(v) {
            Some(i) => {
                self.occupancy.set(i, occupied);
                true
            }
            None => false,
        }
    }

    pub fn count_occupied(&self) -> usize {
        self.occupancy.count_ones()
    }

    pub fn occupied_voxels(&self) -> impl Iterator<Item = Voxel> + '_ {
        self.occupancy.iter_ones().map(|i| self.geometry.dims.voxel(i))
    }

    pub fn world_to_voxel(&self, p: [f64; 3]) -> Result<Voxel> {
        self.geometry.world_to_voxel(p)
    }

    pub fn voxel_to_world(&self, v: Voxel) -> [f64; 3] {
        self.geometry.voxel_to_world(v)
    }

    /// Packed payload: bit `i` of byte `b` is voxel `8b + i`.
    pub fn payload(&self) -> &[u8] {
        self.occupancy.as_raw_slice()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.geometry;
        w.write_all(&GRID_MAGIC)?;
        w.write_all(&GRID_VERSION.to_le_bytes())?;
        for n in [g.dims.nx, g.dims.ny, g.dims.nz] {
            w.write_all(&(n as u32).to_le_bytes())?;
        }
        w.write_all(&g.resolution.to_le_bytes())?;
        for o in g.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        // Padding bits in the last byte are zero because bitvec never sets them.
        w.write_all(self.payload())?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; GRID_HEADER_LEN];
        read_full(&mut r, &mut header, 0)?;
        if header[0..4] != GRID_MAGIC {
            return Err(Error::Format {
                offset: 0,
                reason: format!("bad magic {:?}", &header[0..4]),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != GRID_VERSION {
            return Err(Error::Format {
                offset: 4,
                reason: format!("unsupported version {version}"),
            });
        }
        let dims = Dims::new(u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
        let resolution = f64_at(20);
        let origin = [f64_at(28), f64_at(36), f64_at(44)];
        Self::validate(dims, resolution, origin).map_err(|e| Error::Format {
            offset: 8,
            reason: e.to_string(),
        })?;
        let volume = dims
            .nx
            .checked_mul(dims.ny)
            .and_then(|v| v.checked_mul(dims.nz))
            .ok_or_else(|| Error::Format {
                offset: 8,
                reason: "voxel count overflows".into(),
            })?;
        let mut payload = vec![0u8; volume.div_ceil(8)];
        read_full(&mut r, &mut payload, GRID_HEADER_LEN as u64)?;
        let mut occupancy = BitVec::<u8, Lsb0>::from_vec(payload);
        occupancy.truncate(volume);
        Ok(OccupancyGrid {
            geometry: GridGeometry {
                dims,
                resolution,
                origin,
            },
            occupancy,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8], base: u64) -> Result<()> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => {
                return Err(Error::Format {
                    offset: base + filled as u64,
                    reason: format!("truncated: expected {} more bytes", buf.len() - filled),
                })
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// World-frame points, meters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>) -> Self {
        PointCloud { points }
    }

    /// Parses `x y z` lines; blank lines and `#` comments are skipped.
    pub fn parse<R: BufRead>(r: R) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let mut p = [0.0; 3];
            for (slot, f) in p.iter_mut().zip(&fields) {
                *slot = f.parse().map_err(|e| Error::Parse {
                    line: i + 1,
                    reason: format!("{f:?}: {e}"),
                })?;
            }
            points.push(p);
        }
        Ok(PointCloud { points })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.points {
            writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
        }
        Ok(())
    }

    /// One point per occupied voxel center.
    pub fn from_grid(grid: &OccupancyGrid) -> Self {
        PointCloud::new(grid.occupied_voxels().map(|v| grid.voxel_to_world(v)).collect())
    }
}

/// Bins `cloud` into a grid aligned to the world lattice `[k·r, (k+1)·r)`.
///
/// The grid spans the voxel bounding box of the points plus one free voxel on
/// every face; a voxel is occupied iff at least `min_points` points fall in it.
pub fn voxelize(cloud: &PointCloud, resolution: f64, min_points: usize) -> Result<OccupancyGrid> {
    if cloud.points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidParams(format!("resolution must be > 0, got {resolution}")));
    }
    if min_points == 0 {
        return Err(Error::InvalidParams("min_points must be >= 1".into()));
    }
    let mut cells = Vec::with_capacity(cloud.points.len());
    for p in &cloud.points {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("{p:?}")));
        }
        let cell = p.map(|c| (c / resolution).floor());
        if cell.iter().any(|c| c.abs() >= i32::MAX as f64 / 2.0) {
            return Err(Error::InvalidPoint(format!("{p:?} is out of range at r = {resolution}")));
        }
        cells.push(cell.map(|c| c as i64));
    }
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for c in &cells {
        for a in 0..3 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    let base = lo.map(|l| l - 1);
    let dims = Dims::new(
        (hi[0] - lo[0] + 3) as usize,
        (hi[1] - lo[1] + 3) as usize,
        (hi[2] - lo[2] + 3) as usize,
    );
    let origin = base.map(|b| b as f64 * resolution);
    let mut grid = OccupancyGrid::new(dims, resolution, origin)?;
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for c in &cells {
        let v = Voxel::new(
            (c[0] - base[0]) as i32,
            (c[1] - base[1]) as i32,
            (c[2] - base[2]) as i32,
        );
        let idx = dims.index(v).expect("padded bounds contain every point");
        *counts.entry(idx).or_default() += 1;
    }
    for (idx, n) in counts {
        if n >= min_points {
            grid.occupancy.set(idx, true);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: [f64; 3], b: [f64; 3]) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn single_point_occupies_center_of_3x3x3() {
        let g = voxelize(&PointCloud::new(vec![[0.05, 0.05, 0.05]]), 0.1, 1).unwrap();
        assert_eq!(g.dims(), Dims::new(3, 3, 3));
        assert_eq!(g.count_occupied(), 1);
        assert!(g.is_occupied(Voxel::new(1, 1, 1)));
    }

    #[test]
    fn cube_corners_land_in_distinct_voxels() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        let g = voxelize(&PointCloud::new(pts.clone()), 0.5, 1).unwrap();
        // Brute force: the half-open lattice puts 0.0 in cell 0 and 1.0 in cell 2.
        let cells: std::collections::BTreeSet<[i64; 3]> = pts
            .iter()
            .map(|p| p.map(|c| (c / 0.5_f64).floor() as i64))
            .collect();
        assert_eq!(cells.len(), 8);
        assert_eq!(g.dims(), Dims::new(5, 5, 5));
        assert_eq!(g.count_occupied(), 8);
        for p in &pts {
            assert!(g.is_occupied(g.world_to_voxel(*p).unwrap()));
        }
    }

    #[test]
    fn min_points_threshold_unmet() {
        let pts = vec![[0.05, 0.05, 0.05], [0.25, 0.05, 0.05], [0.05, 0.45, 0.05]];
        let g = voxelize(&PointCloud::new(pts), 0.1, 2).unwrap();
        assert_eq!(g.count_occupied(), 0);
    }

    #[test]
    fn min_points_threshold_met() {
        let pts = vec![[0.01, 0.01, 0.01], [0.09, 0.02, 0.03]];
        let g = voxelize(&PointCloud::new(pts), 0.1, 2).unwrap();
        assert_eq!(g.count_occupied(), 1);
    }

    #[test]
    fn voxelize_errors() {
        assert!(matches!(voxelize(&PointCloud::default(), 0.1, 1), Err(Error::EmptyInput)));
        assert!(matches!(
            voxelize(&PointCloud::new(vec![[f64::NAN, 0.0, 0.0]]), 0.1, 1),
            Err(Error::InvalidPoint(_))
        ));
    }

    #[test]
    fn world_voxel_transforms() {
        let geo = |origin, r| GridGeometry {
            dims: Dims::new(10, 10, 10),
            resolution: r,
            origin,
        };
        let g = geo([0.0; 3], 0.2);
        assert_eq!(g.world_to_voxel([0.0, 0.0, 0.0]).unwrap(), Voxel::new(0, 0, 0));
        assert_eq!(g.world_to_voxel([0.39, 0.2, 0.61]).unwrap(), Voxel::new(1, 1, 3));
        let g2 = geo([-1.0, -1.0, 0.0], 0.5);
        assert_eq!(g2.world_to_voxel([-0.9, 0.4, 0.0]).unwrap(), Voxel::new(0, 2, 0));
        assert!(g.world_to_voxel([f64::INFINITY, 0.0, 0.0]).is_err());

        assert!(approx(g.voxel_to_world(Voxel::new(0, 0, 0)), [0.1, 0.1, 0.1]));
        assert!(approx(g.voxel_to_world(Voxel::new(3, 1, 0)), [0.7, 0.3, 0.1]));
    }

    #[test]
    fn out_of_bounds_is_occupied() {
        let g = OccupancyGrid::new(Dims::new(2, 2, 2), 0.1, [0.0; 3]).unwrap();
        assert!(!g.is_occupied(Voxel::new(0, 0, 0)));
        assert!(g.is_occupied(Voxel::new(-1, 0, 0)));
        assert!(g.is_occupied(Voxel::new(0, 0, 2)));
        assert!(!g.is_occupied_in_bounds(Voxel::new(0, 0, 2)));
    }

    #[test]
    fn empty_1x1x1_file_is_53_bytes() {
        let g = OccupancyGrid::new(Dims::new(1, 1, 1), 0.2, [0.0; 3]).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 12 + 8 + 24 + 1);
        assert_eq!(&buf[..4], b"RNAV");
        assert_eq!(OccupancyGrid::read_from(&buf[..]).unwrap(), g);
    }

    #[test]
    fn payload_bit_order_is_lsb_first() {
        let mut g = OccupancyGrid::new(Dims::new(10, 1, 1), 1.0, [0.0; 3]).unwrap();
        g.set(Voxel::new(0, 0, 0), true);
        g.set(Voxel::new(3, 0, 0), true);
        g.set(Voxel::new(9, 0, 0), true);
        assert_eq!(g.payload(), &[0b0000_1001, 0b0000_0010]);
    }

    #[test]
    fn format_errors_report_offsets() {
        let g = OccupancyGrid::new(Dims::new(4, 4, 4), 0.2, [0.0; 3]).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(OccupancyGrid::read_from(&bad[..]), Err(Error::Format { offset: 0, .. })));

        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(OccupancyGrid::read_from(&bad[..]), Err(Error::Format { offset: 4, .. })));

        let short = &buf[..buf.len() - 3];
        match OccupancyGrid::read_from(short) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, (GRID_HEADER_LEN + 5) as u64),
            other => panic!("expected format error, got {other:?}"),
        }
        assert!(matches!(
            OccupancyGrid::read_from(&buf[..10]),
            Err(Error::Format { offset: 10, .. })
        ));
    }

    #[test]
    fn cloud_parse_skips_comments() {
        let text = "# header\n1 2 3\n\n  4.5 -1 0 # trailing\n";
        let c = PointCloud::parse(text.as_bytes()).unwrap();
        assert_eq!(c.points, vec![[1.0, 2.0, 3.0], [4.5, -1.0, 0.0]]);
        assert!(matches!(PointCloud::parse("1 2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }
}
