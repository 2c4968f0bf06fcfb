#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>
#include <vector>

#include "countfit/lambda.hpp"

namespace countfit {

enum class LossVariant { Count, CountPlus };

std::string_view loss_variant_name(LossVariant variant);
std::optional<LossVariant> loss_variant_from_name(std::string_view name);

/// One training step's embeddings: B image rows, B true-caption rows, and a
/// counterfactual block (1 x d or 8 x d) with its count for each of the N
/// counting samples. counting_rows are ascending indices into the batch.
struct EmbeddingBatch {
  Eigen::MatrixXd image_emb;
  Eigen::MatrixXd text_emb;
  std::vector<int> counting_rows;
  std::vector<int> counts;
  std::vector<Eigen::MatrixXd> cf_emb;

  Eigen::Index batch_size() const { return image_emb.rows(); }
  Eigen::Index dim() const { return image_emb.cols(); }
  std::size_t num_counting() const { return counting_rows.size(); }

  /// Throws std::invalid_argument on inconsistent shapes or a counterfactual
  /// block whose row count does not match the variant (1 for Count, 8 for
  /// CountPlus).
  void validate(LossVariant variant) const;
};

struct LossBreakdown {
  double l_clip = 0.0;
  double l_count = 0.0;
  double total = 0.0;
  std::vector<double> per_sample_lambda;
};

/// Symmetric InfoNCE over the B x B similarity matrix scaled by 1/temperature:
/// the mean of the image-to-text and text-to-image cross-entropies. Rows are
/// expected to be unit-normalized by the caller. Requires B >= 2.
double clip_contrastive_loss(const Eigen::MatrixXd& image_emb, const Eigen::MatrixXd& text_emb,
                             double temperature);

struct ClipLossGrad {
  double value = 0.0;
  Eigen::MatrixXd d_image;
  Eigen::MatrixXd d_text;
  double d_scale = 0.0;  // w.r.t. the similarity multiplier 1/temperature
};

ClipLossGrad clip_contrastive_loss_grad(const Eigen::MatrixXd& image_emb,
                                        const Eigen::MatrixXd& text_emb, double temperature);

/// Two-way counting term: -log exp(s) / (exp(s) + exp(s_cf)) with s = ei.et
/// and s_cf = ei.et_cf, via max-subtracted log-sum-exp.
double count_loss(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                  const Eigen::VectorXd& et_cf);

struct CountLossGrad {
  double value = 0.0;
  Eigen::VectorXd d_ei;
  Eigen::VectorXd d_et;
  Eigen::MatrixXd d_et_cf;  // one row per counterfactual
};

CountLossGrad count_loss_grad(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                              const Eigen::VectorXd& et_cf);

/// Nine-way counting term: the true caption against all eight counterfactual
/// rows, a softmax cross-entropy with the true class as the positive.
double count_plus_loss(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                       const Eigen::MatrixXd& et_cf_all);

CountLossGrad count_plus_loss_grad(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                                   const Eigen::MatrixXd& et_cf_all);

/// Combined objective: l_clip over all B samples plus the lambda-weighted
/// mean counting term over the N counting samples,
///   total = l_clip + (1/N) sum_k lambda_k * term_k.
/// The counting terms use unit temperature; temperature applies to the
/// contrastive part only. Counterfactual rows never enter the contrastive
/// negatives. When normalize_embeddings is set (the default), every embedding
/// is unit-normalized before any similarity.
LossBreakdown combined_loss(const EmbeddingBatch& batch, const LambdaTable& lambdas,
                            LossVariant variant, double temperature,
                            bool normalize_embeddings = true);

LossBreakdown combined_loss(const EmbeddingBatch& batch, const LambdaScheme& scheme,
                            const ClassFrequencyTable& table, LossVariant variant,
                            double temperature, bool normalize_embeddings = true);

struct CombinedLossGrad {
  LossBreakdown breakdown;
  Eigen::MatrixXd d_image;               // w.r.t. the raw (pre-normalization) inputs
  Eigen::MatrixXd d_text;
  std::vector<Eigen::MatrixXd> d_cf;     // parallel to batch.cf_emb
  double d_logit_scale = 0.0;            // w.r.t. the contrastive similarity multiplier
};

CombinedLossGrad combined_loss_grad(const EmbeddingBatch& batch, const LambdaTable& lambdas,
                                    LossVariant variant, double temperature,
                                    bool normalize_embeddings = true);

}  // namespace countfit
