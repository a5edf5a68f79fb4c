//! Procedural stand-ins for the CT corpus.
//!
//! Stage-one-like: a centred bright disc (class 0) against four bright corner
//! blobs (class 1). Stage-two-like: a thick ring close to the centre (class 0)
//! against a thin wide ring reaching toward the corners (class 1), so the
//! centre-versus-periphery features learned in stage one carry over.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{write_pgm, GrayImage, LabeledDataset, Stage, CATEGORY_DIRS};
use crate::error::{Error, Result};
use crate::lenet::IMAGE_SIDE;
use crate::tensor::Tensor;

const INTENSITY: f32 = 0.9;
const NOISE: f32 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthTask {
    StageOneLike,
    StageTwoLike,
}

impl SynthTask {
    pub fn stage(self) -> Stage {
        match self {
            SynthTask::StageOneLike => Stage::StageOne,
            SynthTask::StageTwoLike => Stage::StageTwo,
        }
    }

    pub fn for_stage(stage: Stage) -> Self {
        match stage {
            Stage::StageOne => SynthTask::StageOneLike,
            Stage::StageTwo => SynthTask::StageTwoLike,
        }
    }
}

/// Raw categories of a synthetic dataset directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Healthy,
    Covid,
    NonCovid,
}

enum Shape {
    Disc { cx: f32, cy: f32, r: f32 },
    Ring { cx: f32, cy: f32, inner: f32, outer: f32 },
}

impl Shape {
    fn covers(&self, x: f32, y: f32) -> bool {
        match *self {
            Shape::Disc { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Ring { cx, cy, inner, outer } => {
                let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                d2 >= inner * inner && d2 <= outer * outer
            }
        }
    }
}

struct Canvas<'a> {
    side: usize,
    shapes: Vec<Shape>,
    rng: &'a mut ChaCha8Rng,
}

impl<'a> Canvas<'a> {
    fn new(side: usize, rng: &'a mut ChaCha8Rng) -> Self {
        Self {
            side,
            shapes: Vec::new(),
            rng,
        }
    }

    fn jitter(&mut self, amount: f32) -> f32 {
        self.rng.gen_range(-amount..=amount)
    }

    fn centre(&mut self) -> (f32, f32) {
        (14.0 + self.jitter(1.5), 14.0 + self.jitter(1.5))
    }

    fn disc(mut self) -> Self {
        let (cx, cy) = self.centre();
        let r = 6.0 + self.jitter(0.5);
        self.shapes.push(Shape::Disc { cx, cy, r });
        self
    }

    fn corner_blobs(mut self) -> Self {
        for (bx, by) in [(6.0, 6.0), (22.0, 6.0), (6.0, 22.0), (22.0, 22.0)] {
            let cx = bx + self.jitter(1.0);
            let cy = by + self.jitter(1.0);
            let r = 3.0 + self.jitter(0.4);
            self.shapes.push(Shape::Disc { cx, cy, r });
        }
        self
    }

    fn thick_ring(mut self) -> Self {
        let (cx, cy) = self.centre();
        let outer = 7.0 + self.jitter(0.5);
        self.shapes.push(Shape::Ring { cx, cy, inner: 3.0, outer });
        self
    }

    fn thin_ring(mut self) -> Self {
        let (cx, cy) = self.centre();
        let outer = 11.0 + self.jitter(0.5);
        self.shapes.push(Shape::Ring { cx, cy, inner: outer - 1.5, outer });
        self
    }

    /// Shapes are laid out on a 28-unit grid and scaled to `side`.
    fn render(self) -> GrayImage {
        let scale = IMAGE_SIDE as f32 / self.side as f32;
        let mut pixels = Vec::with_capacity(self.side * self.side);
        for y in 0..self.side {
            for x in 0..self.side {
                let (ux, uy) = ((x as f32 + 0.5) * scale - 0.5, (y as f32 + 0.5) * scale - 0.5);
                let base = if self.shapes.iter().any(|s| s.covers(ux, uy)) {
                    INTENSITY
                } else {
                    0.0
                };
                let noise: f32 = self.rng.gen_range(0.0..NOISE);
                pixels.push((base + noise).min(1.0));
            }
        }
        GrayImage::new(self.side, self.side, pixels).expect("square canvas")
    }
}

fn to_tensor(img: GrayImage) -> Tensor<f32> {
    Tensor::new(vec![1, IMAGE_SIDE, IMAGE_SIDE], img.pixels).expect("28x28 canvas")
}

/// `n_per_class` examples of each class, interleaved 0, 1, 0, 1, ...
pub fn synth_dataset(n_per_class: usize, seed: u64, task: SynthTask) -> Result<LabeledDataset> {
    if n_per_class < 1 {
        return Err(Error::InvalidArgument("n_per_class must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        for label in 0..2u8 {
            let canvas = Canvas::new(IMAGE_SIDE, &mut rng);
            let canvas = match (task, label) {
                (SynthTask::StageOneLike, 0) => canvas.disc(),
                (SynthTask::StageOneLike, _) => canvas.corner_blobs(),
                (SynthTask::StageTwoLike, 0) => canvas.thick_ring(),
                (SynthTask::StageTwoLike, _) => canvas.thin_ring(),
            };
            images.push(to_tensor(canvas.render()));
            labels.push(label);
        }
    }
    LabeledDataset::new(images, labels, task.stage())
}

/// One image of a raw category: healthy is a centred disc; both pneumonia kinds
/// carry corner blobs, with a thin wide ring for covid and a thick ring otherwise.
pub fn render_category(category: Category, side: usize, rng: &mut ChaCha8Rng) -> GrayImage {
    let canvas = Canvas::new(side, rng);
    match category {
        Category::Healthy => canvas.disc(),
        Category::Covid => canvas.corner_blobs().thin_ring(),
        Category::NonCovid => canvas.corner_blobs().thick_ring(),
    }
    .render()
}

/// Writes `root/{healthy,covid,non_covid}/NNNNN.pgm` with `counts` images per
/// category at `side x side` pixels.
pub fn write_synthetic_tree(root: &Path, counts: [usize; 3], side: usize, seed: u64) -> Result<()> {
    if side == 0 {
        return Err(Error::InvalidArgument("image side must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let categories = [Category::Healthy, Category::Covid, Category::NonCovid];
    for ((dir, category), count) in CATEGORY_DIRS.iter().zip(categories).zip(counts) {
        let path = root.join(dir);
        fs::create_dir_all(&path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        for i in 0..count {
            let img = render_category(category, side, &mut rng);
            write_pgm(path.join(format!("{i:05}.pgm")), &img)?;
        }
    }
    Ok(())
}
