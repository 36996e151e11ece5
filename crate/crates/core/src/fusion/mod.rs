//! Kernel PCA reduction, inter-field weights, fused node features and the
//! class-weighted cross-entropy.

mod fuse;
mod kpca;
mod loss;
mod weights;

pub use fuse::{
    fuse, fused_width, standardize, Field, FusedFeatureMatrix, FusionWeights, RecordBlocks,
};
pub use kpca::{
    kpca_fit, kpca_fit_components, kpca_project, Kernel, KpcaModel, DEFAULT_TARGET_VARIANCE,
};
pub use loss::{
    class_weights_frequency, class_weights_fusion, weighted_ce_loss, ClassWeightMode, LossMix,
};
pub use weights::{
    action_vector, attention_matrix, weight_attention, weight_hierarchy, weight_verbs,
    AttentionScope, DEFAULT_VERBS,
};
