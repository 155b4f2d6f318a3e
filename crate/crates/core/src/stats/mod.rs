//! Dataset analytics: class histograms, split summaries and augmentation
//! planning for under-represented classes.

mod histogram;
mod plan;
mod split;

pub use histogram::{class_histogram, ClassCounts, ClassHistogram};
pub use plan::{augmented_records, plan_augmentation, AugmentPlan, PlannedOp};
pub use split::{split_summary, SplitCounts, SplitSummary};
