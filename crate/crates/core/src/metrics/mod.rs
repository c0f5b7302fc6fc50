//! Confusion matrices, precision/recall/F1 and evaluation reports.

mod confusion;
mod report;

pub use confusion::{ClassScores, ConfusionMatrix, RowNormalized};
pub use report::{render_report, EvalReport, ReportFormat};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("label {0} is outside 0..5")]
    LabelOutOfRange(usize),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl MetricsError {
    pub fn is_io(&self) -> bool {
        matches!(self, MetricsError::Io { .. })
    }
}
