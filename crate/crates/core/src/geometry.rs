//! Coordinates, direction cosines, element positions and link distances.
//!
//! The reflecting surface lies in the y-z plane, centred at the origin, with
//! its normal along +x. All lengths are metres and all angles radians.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};

/// Cartesian point in metres.
pub type Point3 = [f64; 3];

pub(crate) fn norm(p: Point3) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// A direction in front of the surface given by zenith and azimuth angles.
///
/// Caches the direction cosines: `cos_x = sinθ cosφ` (along the surface
/// normal), `cos_y = sinθ sinφ` and `cos_z = cosθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    zenith: f64,
    azimuth: f64,
    cos_x: f64,
    cos_y: f64,
    cos_z: f64,
}

impl Direction {
    /// Zenith must lie in `[0, π]` and azimuth in `[-π/2, π/2]`.
    pub fn new(zenith: f64, azimuth: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&zenith) {
            return Err(domain(format!("zenith {zenith} outside [0, π]")));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&azimuth) {
            return Err(domain(format!(
                "azimuth {azimuth} outside [-π/2, π/2] (behind the surface)"
            )));
        }
        let (st, mut ct) = zenith.sin_cos();
        // cos(fl(π/2)) is 6e-17, not zero.
        if zenith == FRAC_PI_2 {
            ct = 0.0;
        }
        let (sp, cp) = azimuth.sin_cos();
        Ok(Self {
            zenith,
            azimuth,
            cos_x: (st * cp).max(0.0),
            cos_y: st * sp,
            cos_z: ct,
        })
    }

    /// Along the surface normal.
    pub fn boresight() -> Self {
        Self::new(FRAC_PI_2, 0.0).expect("boresight is a valid direction")
    }

    pub fn zenith(&self) -> f64 {
        self.zenith
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    /// Projection on the surface normal; the cosine of the incidence angle
    /// at the surface centre.
    pub fn cos_x(&self) -> f64 {
        self.cos_x
    }

    pub fn cos_y(&self) -> f64 {
        self.cos_y
    }

    pub fn cos_z(&self) -> f64 {
        self.cos_z
    }
}

/// A point given by its range and direction as seen from the surface centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    range: f64,
    dir: Direction,
}

impl Placement {
    pub fn new(range: f64, dir: Direction) -> Result<Self> {
        if !(range > 0.0) || !range.is_finite() {
            return Err(domain(format!("range must be positive, got {range}")));
        }
        Ok(Self { range, dir })
    }

    pub fn from_angles(range: f64, zenith: f64, azimuth: f64) -> Result<Self> {
        Self::new(range, Direction::new(zenith, azimuth)?)
    }

    /// A placement on the surface normal at `range` metres.
    pub fn on_boresight(range: f64) -> Result<Self> {
        Self::new(range, Direction::boresight())
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn direction(&self) -> &Direction {
        &self.dir
    }

    pub fn cartesian(&self) -> Point3 {
        [
            self.range * self.dir.cos_x,
            self.range * self.dir.cos_y,
            self.range * self.dir.cos_z,
        ]
    }

    pub fn with_range(&self, range: f64) -> Result<Self> {
        Self::new(range, self.dir)
    }
}

/// Validates that `count` is a positive odd element count.
fn odd_count(count: usize, axis: &str) -> Result<usize> {
    if count == 0 || count.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "{axis} element count must be odd and positive, got {count}"
        )));
    }
    Ok(count)
}

/// Nearest odd element count covering `length` at `spacing` (at least one).
pub fn odd_count_for_length(length: f64, spacing: f64) -> usize {
    let n = (length / spacing).round().max(1.0) as usize;
    if n.is_multiple_of(2) {
        // Round towards the closer odd neighbour.
        if length / spacing >= n as f64 {
            n + 1
        } else {
            n - 1
        }
    } else {
        n
    }
}

fn check_index(index: i64, count: usize, axis: &'static str) -> Result<()> {
    let limit = ((count - 1) / 2) as i64;
    if index.abs() > limit {
        return Err(Error::IndexRange { axis, index, limit });
    }
    Ok(())
}

/// Uniform planar reflecting surface with odd element counts along y and z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsPanel {
    count_y: usize,
    count_z: usize,
    spacing: f64,
}

impl IrsPanel {
    pub fn new(count_y: usize, count_z: usize, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(domain(format!("element spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            count_y: odd_count(count_y, "y")?,
            count_z: odd_count(count_z, "z")?,
            spacing,
        })
    }

    /// Panel of physical size about `length_y × length_z`, rounded to odd counts.
    pub fn with_size(length_y: f64, length_z: f64, spacing: f64) -> Result<Self> {
        if !(length_y > 0.0 && length_z > 0.0) {
            return Err(domain("panel lengths must be positive"));
        }
        Self::new(
            odd_count_for_length(length_y, spacing),
            odd_count_for_length(length_z, spacing),
            spacing,
        )
    }

    pub fn square(length: f64, spacing: f64) -> Result<Self> {
        Self::with_size(length, length, spacing)
    }

    pub fn count_y(&self) -> usize {
        self.count_y
    }

    pub fn count_z(&self) -> usize {
        self.count_z
    }

    pub fn element_count(&self) -> usize {
        self.count_y * self.count_z
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Largest index magnitude along y.
    pub fn half_y(&self) -> i64 {
        ((self.count_y - 1) / 2) as i64
    }

    pub fn half_z(&self) -> i64 {
        ((self.count_z - 1) / 2) as i64
    }

    pub fn length_y(&self) -> f64 {
        self.count_y as f64 * self.spacing
    }

    pub fn length_z(&self) -> f64 {
        self.count_z as f64 * self.spacing
    }

    /// Radius of the disk inscribed in the panel rectangle.
    pub fn inscribed_radius(&self) -> f64 {
        0.5 * self.length_y().min(self.length_z())
    }

    /// Radius of the disk circumscribing the panel rectangle.
    pub fn circumscribed_radius(&self) -> f64 {
        0.5 * self.length_y().hypot(self.length_z())
    }

    /// Position in channel vectors: `i_y` varies slowest, matching the
    /// Kronecker ordering of the array response.
    pub fn linear_index(&self, i_y: i64, i_z: i64) -> Result<usize> {
        check_index(i_y, self.count_y, "y")?;
        check_index(i_z, self.count_z, "z")?;
        Ok(((i_y + self.half_y()) as usize) * self.count_z + (i_z + self.half_z()) as usize)
    }

    /// All `(i_y, i_z)` pairs in [`linear_index`](Self::linear_index) order.
    pub fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (hy, hz) = (self.half_y(), self.half_z());
        (-hy..=hy).flat_map(move |iy| (-hz..=hz).map(move |iz| (iy, iz)))
    }

    pub fn element_position(&self, i_y: i64, i_z: i64) -> Result<Point3> {
        check_index(i_y, self.count_y, "y")?;
        check_index(i_z, self.count_z, "z")?;
        Ok([0.0, i_y as f64 * self.spacing, i_z as f64 * self.spacing])
    }

    /// Diagonal of the panel rectangle.
    pub fn aperture(&self) -> f64 {
        self.length_y().hypot(self.length_z())
    }
}

/// Uniform planar antenna array at the base station, parallel to the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsArray {
    count_y: usize,
    count_z: usize,
    spacing: f64,
    center: Placement,
}

impl BsArray {
    pub fn new(count_y: usize, count_z: usize, spacing: f64, center: Placement) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(domain(format!("antenna spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            count_y: odd_count(count_y, "antenna y")?,
            count_z: odd_count(count_z, "antenna z")?,
            spacing,
            center,
        })
    }

    pub fn count_y(&self) -> usize {
        self.count_y
    }

    pub fn count_z(&self) -> usize {
        self.count_z
    }

    pub fn antenna_count(&self) -> usize {
        self.count_y * self.count_z
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> &Placement {
        &self.center
    }

    pub fn half_y(&self) -> i64 {
        ((self.count_y - 1) / 2) as i64
    }

    pub fn half_z(&self) -> i64 {
        ((self.count_z - 1) / 2) as i64
    }

    /// Antennas in Kronecker order (`n_y` slowest).
    pub fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (hy, hz) = (self.half_y(), self.half_z());
        (-hy..=hy).flat_map(move |ny| (-hz..=hz).map(move |nz| (ny, nz)))
    }

    pub fn antenna_position(&self, n_y: i64, n_z: i64) -> Result<Point3> {
        check_index(n_y, self.count_y, "antenna y")?;
        check_index(n_z, self.count_z, "antenna z")?;
        let c = self.center.cartesian();
        Ok([c[0], c[1] + n_y as f64 * self.spacing, c[2] + n_z as f64 * self.spacing])
    }

    /// Diagonal of the antenna grid.
    pub fn aperture(&self) -> f64 {
        (self.count_y as f64 * self.spacing).hypot(self.count_z as f64 * self.spacing)
    }
}

/// Squared normalized distance `|src - element|² / r²` written in terms of
/// `ε = d / r`; the kernel every near-field formula is built on.
#[inline]
pub(crate) fn normalized_sq_distance(dir: &Direction, eps: f64, i_y: f64, i_z: f64) -> f64 {
    1.0 - 2.0 * i_y * eps * dir.cos_y - 2.0 * i_z * eps * dir.cos_z + (i_y * i_y + i_z * i_z) * eps * eps
}

/// Distance from `src` to element `(i_y, i_z)`.
pub fn element_distance(src: &Placement, panel: &IrsPanel, i_y: i64, i_z: i64) -> Result<f64> {
    check_index(i_y, panel.count_y, "y")?;
    check_index(i_z, panel.count_z, "z")?;
    let eps = panel.spacing / src.range;
    Ok(src.range * normalized_sq_distance(&src.dir, eps, i_y as f64, i_z as f64).sqrt())
}

/// Distance from BS antenna `(n_y, n_z)` to element `(i_y, i_z)`.
pub fn miso_element_distance(bs: &BsArray, n_y: i64, n_z: i64, panel: &IrsPanel, i_y: i64, i_z: i64) -> Result<f64> {
    check_index(n_y, bs.count_y, "antenna y")?;
    check_index(n_z, bs.count_z, "antenna z")?;
    check_index(i_y, panel.count_y, "y")?;
    check_index(i_z, panel.count_z, "z")?;
    Ok(bs.center.range * miso_kernel(bs, n_y, n_z, panel, i_y, i_z).sqrt())
}

/// `|u - w|² / r_q²` with the offsets `n ε_q0 - i ε_q` combined per axis.
pub(crate) fn miso_kernel(bs: &BsArray, n_y: i64, n_z: i64, panel: &IrsPanel, i_y: i64, i_z: i64) -> f64 {
    let r = bs.center.range;
    let dir = &bs.center.dir;
    let oy = (n_y as f64 * bs.spacing - i_y as f64 * panel.spacing) / r;
    let oz = (n_z as f64 * bs.spacing - i_z as f64 * panel.spacing) / r;
    1.0 + 2.0 * oy * dir.cos_y + 2.0 * oz * dir.cos_z + oy * oy + oz * oz
}

/// Which endpoint of the link is closer to the surface centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nearer {
    Bs,
    User,
    Equal,
}

/// Distance ratio `ρ = min / max` of the two link ranges, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRatio {
    pub rho: f64,
    pub nearer: Nearer,
    /// The smaller of the two ranges.
    pub near_range: f64,
}

pub fn distance_ratio(bs_range: f64, user_range: f64) -> Result<DistanceRatio> {
    if !(bs_range > 0.0 && user_range > 0.0) {
        return Err(domain(format!(
            "link distances must be positive, got ({bs_range}, {user_range})"
        )));
    }
    let nearer = if bs_range < user_range {
        Nearer::Bs
    } else if user_range < bs_range {
        Nearer::User
    } else {
        Nearer::Equal
    };
    Ok(DistanceRatio {
        rho: bs_range.min(user_range) / bs_range.max(user_range),
        nearer,
        near_range: bs_range.min(user_range),
    })
}

/// Margin used to decide whether both endpoints sit close enough to the
/// surface normal for the boresight closed forms.
pub const BORESIGHT_MARGIN_LIMIT: f64 = 0.1;

/// Largest of `|Φ|·L_y/r` and `|Θ|·L_z/r` over both endpoints.
pub fn boresight_margin(panel: &IrsPanel, bs: &Placement, user: &Placement) -> f64 {
    let side = |p: &Placement| {
        (p.dir.cos_y.abs() * panel.length_y() / p.range).max(p.dir.cos_z.abs() * panel.length_z() / p.range)
    };
    side(bs).max(side(user))
}
