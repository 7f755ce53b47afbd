//! The evaluation protocol: true ranks, rank reports, and signed-rank tests.

pub mod protocol;
pub mod rank;
pub mod report;
pub mod wilcoxon;

pub use protocol::{
    ensemble_auroc, evaluate_selectors, random_split, EnsembleSource, EvalInputs, Evaluation, LlmHook, MethodsConfig,
    ORACLE,
};
pub use rank::{descending_ranks, true_rank, value_rank};
pub use report::{emit_report, rank_report, read_ranks_csv, FiveNumber, RankReport, SelectionRecord, SelectionResult};
pub use wilcoxon::{exact_p, wilcoxon_signed_rank, SignedRankResult, EXACT_MAX_N};
