use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{load_pgm, resize_bilinear, LabeledDataset, Stage};
use crate::error::{Error, Result};
use crate::lenet::IMAGE_SIDE;
use crate::tensor::Tensor;

/// Sub-directories of a dataset root, in the order healthy, covid, non-covid.
pub const CATEGORY_DIRS: [&str; 3] = ["healthy", "covid", "non_covid"];

/// Class sizes `([healthy, pneumonia], [non_covid, covid])` of the two stage datasets
/// built from the three raw category counts.
pub fn stage_sizes(healthy: usize, covid: usize, non_covid: usize) -> ([usize; 2], [usize; 2]) {
    ([healthy, covid + non_covid], [non_covid, covid])
}

/// Every `*.pgm` in `dir`, sorted by file name, resized to 28x28.
pub fn load_category(dir: &Path) -> Result<Vec<Tensor<f32>>> {
    if !dir.is_dir() {
        return Err(Error::MissingDirectory(dir.to_path_buf()));
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(format!("listing {}", dir.display()), e))?.path();
        let is_pgm = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"));
        if is_pgm && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    files
        .par_iter()
        .map(|path| {
            let img = load_pgm(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            let img = resize_bilinear(&img, IMAGE_SIDE, IMAGE_SIDE)?;
            Tensor::new(vec![1, IMAGE_SIDE, IMAGE_SIDE], img.pixels)
        })
        .collect()
}

/// Builds stage one (Healthy vs Pneumonia = covid + non-covid) and stage two
/// (Non-Covid vs Covid) from `root/{healthy,covid,non_covid}/*.pgm`.
pub fn build_stage_datasets(root: impl AsRef<Path>) -> Result<(LabeledDataset, LabeledDataset)> {
    let root = root.as_ref();
    if !root.is_dir() {
        return Err(Error::MissingDirectory(root.to_path_buf()));
    }
    let mut loaded = Vec::with_capacity(3);
    for name in CATEGORY_DIRS {
        let images = load_category(&root.join(name))?;
        if images.is_empty() {
            return Err(Error::EmptyCategory(name.to_string()));
        }
        loaded.push(images);
    }
    let non_covid = loaded.pop().expect("three categories");
    let covid = loaded.pop().expect("three categories");
    let healthy = loaded.pop().expect("three categories");

    let mut s1_labels = vec![0u8; healthy.len()];
    s1_labels.resize(healthy.len() + covid.len() + non_covid.len(), 1);
    let s1_images: Vec<Tensor<f32>> = healthy
        .into_iter()
        .chain(covid.iter().cloned())
        .chain(non_covid.iter().cloned())
        .collect();
    let stage1 = LabeledDataset::new(s1_images, s1_labels, Stage::StageOne)?;

    let mut s2_labels = vec![0u8; non_covid.len()];
    s2_labels.resize(non_covid.len() + covid.len(), 1);
    let s2_images = non_covid.into_iter().chain(covid).collect();
    let stage2 = LabeledDataset::new(s2_images, s2_labels, Stage::StageTwo)?;
    Ok((stage1, stage2))
}
