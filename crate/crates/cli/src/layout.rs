use std::path::{Path, PathBuf};

use hqf_core::Variant;

/// Fixed file names under the run's output directory:
///
/// ```text
/// <out>/<variant>/fold_<k>/model.ckpt
/// <out>/<variant>/fold_<k>/loss.csv
/// <out>/reports/*.csv
/// ```
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
        }
    }

    pub fn fold_dir(&self, variant: Variant, fold: usize) -> PathBuf {
        self.root.join(variant.name()).join(format!("fold_{fold}"))
    }

    pub fn checkpoint(&self, variant: Variant, fold: usize) -> PathBuf {
        self.fold_dir(variant, fold).join("model.ckpt")
    }

    pub fn loss_trace(&self, variant: Variant, fold: usize) -> PathBuf {
        self.fold_dir(variant, fold).join("loss.csv")
    }

    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn report(&self, name: &str) -> PathBuf {
        self.reports().join(name)
    }
}
