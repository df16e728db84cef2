//! Color images, RGB <-> pure quaternion conversion, masks and quality metrics.

use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ImageEncoder, ImageFormat, RgbImage};

use crate::error::{dims, Error, Result};
pub use crate::mask::ObservationMask;
use crate::quat::{Quaternion, QuaternionMatrix};
use crate::scalar::{lit, Real};

/// `M x N x 3` pixels on the `[0, 255]` scale, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ColorImage {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols * 3 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", rows * cols * 3),
                found: format!("{}", data.len()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("pixel values must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(rows * cols * 3);
        for i in 0..rows {
            for j in 0..cols {
                data.extend_from_slice(&f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, rgb: [f64; 3]) -> Self {
        Self::from_fn(rows, cols, |_, _| rgb)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn pixel(&self, i: usize, j: usize) -> [f64; 3] {
        let k = (i * self.cols + j) * 3;
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    #[inline]
    pub fn channel(&self, i: usize, j: usize, c: usize) -> f64 {
        self.data[(i * self.cols + j) * 3 + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Values clamped to `[0, 255]`.
    pub fn clamped(&self) -> Self {
        self.map(|v| v.clamp(0.0, 255.0))
    }

    /// Copy with missing pixels painted `fill`.
    pub fn masked(&self, mask: &ObservationMask, fill: [f64; 3]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if mask.is_observed(i, j) {
                self.pixel(i, j)
            } else {
                fill
            }
        })
    }

    /// Clamps and rounds to 8-bit.
    pub fn to_rgb8(&self) -> RgbImage {
        RgbImage::from_fn(self.cols as u32, self.rows as u32, |x, y| {
            let p = self.pixel(y as usize, x as usize);
            image::Rgb(p.map(|v| v.clamp(0.0, 255.0).round() as u8))
        })
    }

    pub fn from_rgb8(img: &RgbImage) -> Self {
        let (w, h) = img.dimensions();
        Self::from_fn(h as usize, w as usize, |i, j| {
            img.get_pixel(j as u32, i as u32).0.map(f64::from)
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(Self::from_rgb8(&img.to_rgb8()))
    }

    /// Writes PNG, or binary PPM (P6) for `.ppm`/`.pnm` extensions.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: &dyn std::fmt::Display| Error::Io(format!("{}: {e}", path.display()));
        let rgb = self.to_rgb8();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("ppm") | Some("pnm") => {
                let file = std::fs::File::create(path).map_err(|e| io(&e))?;
                PnmEncoder::new(BufWriter::new(file))
                    .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
                    .write_image(
                        rgb.as_raw(),
                        rgb.width(),
                        rgb.height(),
                        image::ExtendedColorType::Rgb8,
                    )
                    .map_err(|e| io(&e))
            }
            _ => rgb
                .save_with_format(path, ImageFormat::Png)
                .map_err(|e| io(&e)),
        }
    }
}

/// `Q1 = R, Q2 = G, Q3 = B`, `Q0 = 0`.
pub fn rgb_to_quaternion<T: Real>(img: &ColorImage) -> QuaternionMatrix<T> {
    QuaternionMatrix::from_fn(img.rows, img.cols, |i, j| {
        let [r, g, b] = img.pixel(i, j);
        Quaternion::pure(lit(r), lit(g), lit(b))
    })
}

/// Drops the real plane and clamps the imaginary planes to `[0, 255]`.
pub fn quaternion_to_rgb<T: Real>(q: &QuaternionMatrix<T>) -> ColorImage {
    ColorImage::from_fn(q.rows(), q.cols(), |i, j| {
        let e = q.get(i, j);
        [e.x, e.y, e.z].map(|v| v.as_f64().clamp(0.0, 255.0))
    })
}

pub fn random_mask(rows: usize, cols: usize, sr: f64, seed: u64) -> Result<ObservationMask> {
    ObservationMask::random(rows, cols, sr, seed)
}

/// Pixels whose channel mean is below `threshold` are missing.
pub fn text_mask(img: &ColorImage, threshold: f64) -> ObservationMask {
    ObservationMask::from_fn(img.rows, img.cols, |i, j| {
        let [r, g, b] = img.pixel(i, j);
        (r + g + b) / 3.0 >= threshold
    })
}

fn same_shape(a: &ColorImage, b: &ColorImage) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: dims(b.rows, b.cols),
            found: dims(a.rows, a.cols),
        });
    }
    Ok(())
}

pub fn mse(x: &ColorImage, reference: &ColorImage) -> Result<f64> {
    same_shape(x, reference)?;
    if x.data.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = x
        .data
        .iter()
        .zip(&reference.data)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / x.data.len() as f64)
}

/// `10 log10(255^2 / MSE)`; `+inf` for identical images.
pub fn psnr(x: &ColorImage, reference: &ColorImage) -> Result<f64> {
    let e = mse(x, reference)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / e).log10())
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn gaussian_window(len: usize) -> Vec<f64> {
    let c = (len as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..len)
        .map(|k| {
            let d = k as f64 - c;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable "valid" filtering of a row-major `rows x cols` plane.
fn filter_valid(plane: &[f64], rows: usize, cols: usize, w: &[f64]) -> Vec<f64> {
    let k = w.len();
    let (orows, ocols) = (rows - k + 1, cols - k + 1);
    let mut tmp = vec![0.0; rows * ocols];
    for i in 0..rows {
        for j in 0..ocols {
            tmp[i * ocols + j] = (0..k).map(|t| w[t] * plane[i * cols + j + t]).sum();
        }
    }
    let mut out = vec![0.0; orows * ocols];
    for i in 0..orows {
        for j in 0..ocols {
            out[i * ocols + j] = (0..k).map(|t| w[t] * tmp[(i + t) * ocols + j]).sum();
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], rows: usize, cols: usize) -> f64 {
    let w = gaussian_window(SSIM_WINDOW.min(rows).min(cols));
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).collect::<Vec<_>>();
    let mu_a = filter_valid(a, rows, cols, &w);
    let mu_b = filter_valid(b, rows, cols, &w);
    let aa = filter_valid(&prod(a, a), rows, cols, &w);
    let bb = filter_valid(&prod(b, b), rows, cols, &w);
    let ab = filter_valid(&prod(a, b), rows, cols, &w);
    let n = mu_a.len();
    let mut total = 0.0;
    for k in 0..n {
        let (ma, mb) = (mu_a[k], mu_b[k]);
        let va = aa[k] - ma * ma;
        let vb = bb[k] - mb * mb;
        let cov = ab[k] - ma * mb;
        total += ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
            / ((ma * ma + mb * mb + SSIM_C1) * (va + vb + SSIM_C2));
    }
    total / n as f64
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5) over the valid
/// region, averaged over the three channels. Images smaller than the window
/// use a window as large as the smaller side.
pub fn ssim(x: &ColorImage, reference: &ColorImage) -> Result<f64> {
    same_shape(x, reference)?;
    let (m, n) = x.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig("SSIM of an empty image".into()));
    }
    if x == reference {
        return Ok(1.0);
    }
    let plane = |img: &ColorImage, c: usize| {
        img.data
            .iter()
            .skip(c)
            .step_by(3)
            .copied()
            .collect::<Vec<_>>()
    };
    let sum: f64 = (0..3)
        .map(|c| ssim_plane(&plane(x, c), &plane(reference, c), m, n))
        .sum();
    Ok(sum / 3.0)
}
