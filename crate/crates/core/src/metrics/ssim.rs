use serde::{Deserialize, Serialize};

use super::{Metric, MetricError, SimilarityScore};

/// Luma weights applied when a color image is ingested.
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

/// Row-major single-channel image with intensities in `[0, dynamic_range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    dynamic_range: f64,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, dynamic_range: f64) -> Result<Self, MetricError> {
        if width == 0 || height == 0 {
            return Err(MetricError::InvalidImage("width and height must be positive".into()));
        }
        if !(dynamic_range.is_finite() && dynamic_range > 0.0) {
            return Err(MetricError::InvalidImage("dynamic range must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(MetricError::InvalidImage(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(0.0..=dynamic_range).contains(p)) {
            return Err(MetricError::InvalidImage(format!("pixel {i} = {} outside [0, {dynamic_range}]", pixels[i])));
        }
        Ok(Self { width, height, pixels, dynamic_range })
    }

    pub fn filled(width: usize, height: usize, value: f64, dynamic_range: f64) -> Result<Self, MetricError> {
        Self::new(width, height, vec![value; width * height], dynamic_range)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn dynamic_range(&self) -> f64 {
        self.dynamic_range
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SsimWindow {
    #[default]
    Global,
    /// Square window of odd side, stride 1, valid positions only.
    Sliding(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub c1: f64,
    pub c2: f64,
    pub window: SsimWindow,
}

impl SsimParams {
    /// `c1 = (0.01 L)^2`, `c2 = (0.03 L)^2`, global window.
    pub fn for_range(dynamic_range: f64) -> Self {
        Self { c1: (0.01 * dynamic_range).powi(2), c2: (0.03 * dynamic_range).powi(2), window: SsimWindow::Global }
    }

    pub fn with_window(mut self, window: SsimWindow) -> Self {
        self.window = window;
        self
    }

    fn validate(&self) -> Result<(), MetricError> {
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(MetricError::InvalidParameter("ssim stabilizers must be positive".into()));
        }
        if let SsimWindow::Sliding(side) = self.window {
            if side == 0 || side % 2 == 0 {
                return Err(MetricError::InvalidParameter(format!("ssim window side {side} must be odd and positive")));
            }
        }
        Ok(())
    }
}

fn ssim_of(x: impl Iterator<Item = f64> + Clone, y: impl Iterator<Item = f64> + Clone, p: &SsimParams) -> f64 {
    let n = x.clone().count() as f64;
    let mu_x = x.clone().sum::<f64>() / n;
    let mu_y = y.clone().sum::<f64>() / n;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    let mut cov = 0.0;
    for (a, b) in x.zip(y) {
        let (dx, dy) = (a - mu_x, b - mu_y);
        var_x += dx * dx;
        var_y += dy * dy;
        cov += dx * dy;
    }
    var_x /= n;
    var_y /= n;
    cov /= n;
    ((2.0 * mu_x * mu_y + p.c1) * (2.0 * cov + p.c2)) / ((mu_x * mu_x + mu_y * mu_y + p.c1) * (var_x + var_y + p.c2))
}

pub fn ssim(x: &GrayImage, y: &GrayImage, params: &SsimParams) -> Result<SimilarityScore, MetricError> {
    params.validate()?;
    if x.width != y.width || x.height != y.height {
        return Err(MetricError::DimensionMismatch {
            left: format!("{}x{}", x.width, x.height),
            right: format!("{}x{}", y.width, y.height),
        });
    }
    if x.dynamic_range != y.dynamic_range {
        return Err(MetricError::DimensionMismatch {
            left: format!("range {}", x.dynamic_range),
            right: format!("range {}", y.dynamic_range),
        });
    }

    let value = match params.window {
        SsimWindow::Global => ssim_of(x.pixels.iter().copied(), y.pixels.iter().copied(), params),
        SsimWindow::Sliding(side) => {
            if side > x.width || side > x.height {
                return Err(MetricError::InvalidParameter(format!(
                    "ssim window {side} larger than {}x{} image",
                    x.width, x.height
                )));
            }
            let mut total = 0.0;
            let mut windows = 0usize;
            for top in 0..=(x.height - side) {
                for left in 0..=(x.width - side) {
                    let coords = (top..top + side).flat_map(move |r| (left..left + side).map(move |c| (c, r)));
                    let xs = coords.clone().map(|(c, r)| x.at(c, r));
                    let ys = coords.map(|(c, r)| y.at(c, r));
                    total += ssim_of(xs, ys, params);
                    windows += 1;
                }
            }
            total / windows as f64
        }
    };
    Ok(SimilarityScore::new(value, Metric::Ssim))
}
