//! Domain descriptions and their membership predicates.
//!
//! Every domain is open: points on the boundary are outside. Parametric
//! domains carry an analytic predicate; bitmap domains look up the pixel
//! containing the point (nonzero pixel means interior).

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded open domain in one, two, or three dimensions.
///
/// Placement conventions:
/// - interval, rectangle, box, L-shape: lower corner at the origin
/// - disk, ball, annulus, ellipse: centered at the origin
/// - bitmap: pixel (0, 0) of the bottom image row sits at the origin
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval {
        length: f64,
    },
    Rectangle {
        width: f64,
        height: f64,
    },
    Box {
        width: f64,
        height: f64,
        depth: f64,
    },
    Disk {
        radius: f64,
    },
    Ball {
        radius: f64,
    },
    Annulus {
        r_inner: f64,
        r_outer: f64,
    },
    Ellipse {
        semi_a: f64,
        semi_b: f64,
    },
    /// `[0, arm]^2` with the square `[thickness, arm]^2` removed.
    Lshape {
        arm: f64,
        thickness: f64,
    },
    Bitmap(Bitmap),
}

/// Occupancy image with a physical pixel size. Rows are stored bottom-up,
/// so `rows[0]` covers `0 < y < pixel_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub pixel_size: f64,
    pub interior: Vec<bool>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize, pixel_size: f64, interior: Vec<bool>) -> Result<Self> {
        if interior.len() != width * height {
            return Err(Error::InvalidDomain(format!(
                "bitmap has {} pixels, expected {}x{}",
                interior.len(),
                width,
                height
            )));
        }
        let bitmap = Bitmap {
            width,
            height,
            pixel_size,
            interior,
        };
        DomainSpec::Bitmap(bitmap.clone()).validate()?;
        Ok(bitmap)
    }

    /// Whether pixel `(col, row)` is interior (`row` counted from the bottom).
    pub fn is_interior(&self, col: usize, row: usize) -> bool {
        col < self.width && row < self.height && self.interior[row * self.width + col]
    }

    /// Parse a PGM image (P2 ASCII or P5 binary). Image rows are top-down in
    /// the file and get flipped so that the picture appears upright in the
    /// plane.
    pub fn from_pgm_bytes(bytes: &[u8], pixel_size: f64) -> Result<Self> {
        let mut cursor = PgmCursor { bytes, pos: 0 };
        let magic = cursor.token()?;
        let binary = match magic.as_str() {
            "P2" => false,
            "P5" => true,
            other => return Err(Error::Pgm(format!("unsupported magic `{other}`"))),
        };
        let width = cursor.number()?;
        let height = cursor.number()?;
        let maxval = cursor.number()?;
        if width == 0 || height == 0 {
            return Err(Error::Pgm("zero image dimension".into()));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Pgm(format!("maxval {maxval} out of range")));
        }

        let count = width * height;
        let mut samples = Vec::with_capacity(count);
        if binary {
            // exactly one whitespace byte separates the header from the raster
            cursor.pos += 1;
            let wide = maxval > 255;
            let need = if wide { 2 * count } else { count };
            let raster = bytes
                .get(cursor.pos..cursor.pos + need)
                .ok_or_else(|| Error::Pgm("truncated raster".into()))?;
            if wide {
                samples.extend(
                    raster
                        .chunks_exact(2)
                        .map(|c| u16::from_be_bytes([c[0], c[1]]) as usize),
                );
            } else {
                samples.extend(raster.iter().map(|&b| b as usize));
            }
        } else {
            for _ in 0..count {
                samples.push(cursor.number()?);
            }
        }

        let mut interior = vec![false; count];
        for (file_row, chunk) in samples.chunks_exact(width).enumerate() {
            let row = height - 1 - file_row;
            for (col, &v) in chunk.iter().enumerate() {
                interior[row * width + col] = v != 0;
            }
        }
        Bitmap::new(width, height, pixel_size, interior)
    }

    pub fn from_pgm_path(path: impl AsRef<Path>, pixel_size: f64) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_pgm_bytes(&bytes, pixel_size)
    }

    /// Serialize as binary PGM (P5), interior pixels written as 255.
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for row in (0..self.height).rev() {
            for col in 0..self.width {
                out.push(if self.is_interior(col, row) { 255 } else { 0 });
            }
        }
        out
    }
}

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn token(&mut self) -> Result<String> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(_) => break,
                None => return Err(Error::Pgm("unexpected end of header".into())),
            }
        }
        let start = self.pos;
        while let Some(b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || *b == b'#' {
                break;
            }
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::Pgm(format!("expected an integer, found `{tok}`")))
    }
}

impl DomainSpec {
    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Box { .. } | DomainSpec::Ball { .. } => 3,
            _ => 2,
        }
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            DomainSpec::Interval { length } => format!("interval({length})"),
            DomainSpec::Rectangle { width, height } => format!("rectangle({width},{height})"),
            DomainSpec::Box { width, height, depth } => format!("box({width},{height},{depth})"),
            DomainSpec::Disk { radius } => format!("disk({radius})"),
            DomainSpec::Ball { radius } => format!("ball({radius})"),
            DomainSpec::Annulus { r_inner, r_outer } => format!("annulus({r_inner},{r_outer})"),
            DomainSpec::Ellipse { semi_a, semi_b } => format!("ellipse({semi_a},{semi_b})"),
            DomainSpec::Lshape { arm, thickness } => format!("lshape({arm},{thickness})"),
            DomainSpec::Bitmap(b) => format!("bitmap({}x{},{})", b.width, b.height, b.pixel_size),
        }
    }

    /// Named length parameters, in declaration order.
    pub(crate) fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            DomainSpec::Interval { length } => vec![("length", length)],
            DomainSpec::Rectangle { width, height } => vec![("width", width), ("height", height)],
            DomainSpec::Box { width, height, depth } => {
                vec![("width", width), ("height", height), ("depth", depth)]
            }
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => vec![("radius", radius)],
            DomainSpec::Annulus { r_inner, r_outer } => vec![
                ("r_inner", r_inner),
                ("r_outer", r_outer),
                ("ring width", r_outer - r_inner),
            ],
            DomainSpec::Ellipse { semi_a, semi_b } => vec![("semi_a", semi_a), ("semi_b", semi_b)],
            DomainSpec::Lshape { arm, thickness } => vec![
                ("arm", arm),
                ("thickness", thickness),
                ("arm - thickness", arm - thickness),
            ],
            DomainSpec::Bitmap(ref b) => vec![("pixel_size", b.pixel_size)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.parameters() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidDomain(format!(
                    "{}: `{name}` must be strictly positive, got {value}",
                    self.label()
                )));
            }
        }
        if let DomainSpec::Bitmap(b) = self {
            if b.interior.len() != b.width * b.height {
                return Err(Error::InvalidDomain("bitmap size mismatch".into()));
            }
            if !b.interior.iter().any(|&p| p) {
                return Err(Error::InvalidDomain("bitmap has no interior pixel".into()));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box `(lower, upper)`; unused axes are zero.
    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        match *self {
            DomainSpec::Interval { length } => ([0.0; 3], [length, 0.0, 0.0]),
            DomainSpec::Rectangle { width, height } => ([0.0; 3], [width, height, 0.0]),
            DomainSpec::Box { width, height, depth } => ([0.0; 3], [width, height, depth]),
            DomainSpec::Disk { radius } => ([-radius, -radius, 0.0], [radius, radius, 0.0]),
            DomainSpec::Ball { radius } => ([-radius; 3], [radius; 3]),
            DomainSpec::Annulus { r_outer, .. } => ([-r_outer, -r_outer, 0.0], [r_outer, r_outer, 0.0]),
            DomainSpec::Ellipse { semi_a, semi_b } => ([-semi_a, -semi_b, 0.0], [semi_a, semi_b, 0.0]),
            DomainSpec::Lshape { arm, .. } => ([0.0; 3], [arm, arm, 0.0]),
            DomainSpec::Bitmap(ref b) => (
                [0.0; 3],
                [b.width as f64 * b.pixel_size, b.height as f64 * b.pixel_size, 0.0],
            ),
        }
    }

    /// Signed interior depth: positive exactly on the open domain. For the
    /// polygonal and round kinds this is the distance to the boundary; for
    /// the ellipse and bitmap it is a sign-faithful proxy.
    pub(crate) fn depth(&self, p: &[f64]) -> f64 {
        match *self {
            DomainSpec::Interval { length } => p[0].min(length - p[0]),
            DomainSpec::Rectangle { width, height } => p[0].min(width - p[0]).min(p[1]).min(height - p[1]),
            DomainSpec::Box { width, height, depth } => p[0]
                .min(width - p[0])
                .min(p[1])
                .min(height - p[1])
                .min(p[2])
                .min(depth - p[2]),
            DomainSpec::Disk { radius } => radius - p[0].hypot(p[1]),
            DomainSpec::Ball { radius } => radius - (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt(),
            DomainSpec::Annulus { r_inner, r_outer } => {
                let r = p[0].hypot(p[1]);
                (r - r_inner).min(r_outer - r)
            }
            DomainSpec::Ellipse { semi_a, semi_b } => {
                let f = 1.0 - (p[0] / semi_a).powi(2) - (p[1] / semi_b).powi(2);
                0.5 * f * semi_a.min(semi_b)
            }
            DomainSpec::Lshape { arm, thickness } => {
                let square = p[0].min(arm - p[0]).min(p[1]).min(arm - p[1]);
                let notch = (thickness - p[0]).max(thickness - p[1]);
                square.min(notch)
            }
            DomainSpec::Bitmap(ref b) => {
                if p[0] < 0.0 || p[1] < 0.0 {
                    return -1.0;
                }
                let col = (p[0] / b.pixel_size).floor() as usize;
                let row = (p[1] / b.pixel_size).floor() as usize;
                if b.is_interior(col, row) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Whether `point` lies in the open domain.
pub fn membership(spec: &DomainSpec, point: &[f64]) -> Result<bool> {
    let n = spec.dimension();
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: point.len(),
        });
    }
    let mut p = [0.0; 3];
    p[..n].copy_from_slice(point);
    Ok(spec.depth(&p) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_center_and_boundary() {
        let disk = DomainSpec::Disk { radius: 1.0 };
        assert!(membership(&disk, &[0.0, 0.0]).unwrap());
        assert!(!membership(&disk, &[1.0, 0.0]).unwrap());
    }

    #[test]
    fn annulus_ring() {
        let ring = DomainSpec::Annulus {
            r_inner: 0.5,
            r_outer: 1.0,
        };
        assert!(membership(&ring, &[0.7, 0.0]).unwrap());
        assert!(!membership(&ring, &[0.2, 0.0]).unwrap());
        assert!(!membership(&ring, &[0.5, 0.0]).unwrap());
    }

    #[test]
    fn lshape_notch_is_closed() {
        let l = DomainSpec::Lshape {
            arm: 1.0,
            thickness: 0.5,
        };
        assert!(membership(&l, &[0.25, 0.75]).unwrap());
        assert!(membership(&l, &[0.75, 0.25]).unwrap());
        assert!(!membership(&l, &[0.75, 0.75]).unwrap());
        assert!(!membership(&l, &[0.5, 0.75]).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let disk = DomainSpec::Disk { radius: 1.0 };
        assert!(matches!(
            membership(&disk, &[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn invalid_parameters() {
        assert!(DomainSpec::Disk { radius: -1.0 }.validate().is_err());
        assert!(DomainSpec::Annulus {
            r_inner: 1.0,
            r_outer: 0.5
        }
        .validate()
        .is_err());
        assert!(DomainSpec::Lshape {
            arm: 1.0,
            thickness: 1.5
        }
        .validate()
        .is_err());
        assert!(Bitmap::new(2, 1, 0.1, vec![false, false]).is_err());
    }

    #[test]
    fn pgm_ascii_and_binary_agree() {
        let ascii = b"P2\n# comment\n3 2\n255\n0 9 0\n1 1 0\n";
        let a = Bitmap::from_pgm_bytes(ascii, 0.5).unwrap();
        // top file row becomes row 1
        assert!(a.is_interior(1, 1));
        assert!(!a.is_interior(0, 1));
        assert!(a.is_interior(0, 0) && a.is_interior(1, 0) && !a.is_interior(2, 0));

        let b = Bitmap::from_pgm_bytes(&a.to_pgm_bytes(), 0.5).unwrap();
        assert_eq!(a.interior, b.interior);

        let disk_like = DomainSpec::Bitmap(a);
        assert!(membership(&disk_like, &[0.75, 0.75]).unwrap());
        assert!(!membership(&disk_like, &[0.25, 0.75]).unwrap());
    }

    #[test]
    fn pgm_rejects_garbage() {
        assert!(Bitmap::from_pgm_bytes(b"P6\n1 1\n255\n", 1.0).is_err());
        assert!(Bitmap::from_pgm_bytes(b"P5\n4 4\n255\n\x01", 1.0).is_err());
        assert!(Bitmap::from_pgm_bytes(b"P2\n1 1\n255\n0\n", 1.0).is_err());
    }
}
