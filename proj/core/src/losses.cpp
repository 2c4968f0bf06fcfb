#include "countfit/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace countfit {

namespace {

void check_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("loss: temperature must be positive and finite");
  }
}

// log(sum exp(x_i)) with the max subtracted; stable for |x| well beyond 1e4.
double log_sum_exp(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

// Unit-normalizes every row; stores the inverse norms for the backward pass.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& x, Eigen::VectorXd* inv_norms) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  if (inv_norms != nullptr) inv_norms->resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double n = x.row(i).norm();
    if (n < 1e-12) {
      throw std::domain_error("loss: zero-norm embedding row cannot be normalized");
    }
    out.row(i) = x.row(i) / n;
    if (inv_norms != nullptr) (*inv_norms)(i) = 1.0 / n;
  }
  return out;
}

// Backward through y = x/||x||:  dL/dx = (g - (g.y) y) / ||x||.
Eigen::RowVectorXd normalize_row_backward(const Eigen::RowVectorXd& g,
                                          const Eigen::RowVectorXd& y, double inv_norm) {
  return (g - g.dot(y) * y) * inv_norm;
}

// Shared core for the two- and nine-way counting terms. et_cf rows are the
// counterfactual logit sources; logits = [ei.et, ei.cf_1, ..., ei.cf_m].
CountLossGrad count_term_grad(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                              const Eigen::MatrixXd& et_cf) {
  if (et.size() != ei.size() || et_cf.cols() != ei.size()) {
    throw std::invalid_argument("count loss: embedding dimension mismatch");
  }
  const Eigen::Index m = et_cf.rows();
  Eigen::VectorXd logits(m + 1);
  logits(0) = ei.dot(et);
  logits.tail(m) = et_cf * ei;

  const double lse = log_sum_exp(logits);
  CountLossGrad out;
  out.value = lse - logits(0);

  const Eigen::VectorXd p = (logits.array() - lse).exp();
  out.d_ei = (p(0) - 1.0) * et + et_cf.transpose() * p.tail(m);
  out.d_et = (p(0) - 1.0) * ei;
  out.d_et_cf = p.tail(m) * ei.transpose();
  return out;
}

}  // namespace

std::string_view loss_variant_name(LossVariant variant) {
  return variant == LossVariant::Count ? "count" : "count_plus";
}

std::optional<LossVariant> loss_variant_from_name(std::string_view name) {
  if (name == "count") return LossVariant::Count;
  if (name == "count_plus") return LossVariant::CountPlus;
  return std::nullopt;
}

void EmbeddingBatch::validate(LossVariant variant) const {
  const Eigen::Index b = image_emb.rows();
  const Eigen::Index d = image_emb.cols();
  if (text_emb.rows() != b || text_emb.cols() != d) {
    throw std::invalid_argument("EmbeddingBatch: image/text shapes differ");
  }
  if (counting_rows.size() != counts.size() || counting_rows.size() != cf_emb.size()) {
    throw std::invalid_argument("EmbeddingBatch: counting blocks out of sync");
  }
  const Eigen::Index want_rows = variant == LossVariant::Count ? 1 : kCountClasses - 1;
  int prev_row = -1;
  for (std::size_t k = 0; k < counting_rows.size(); ++k) {
    if (counting_rows[k] <= prev_row || counting_rows[k] >= b) {
      throw std::invalid_argument("EmbeddingBatch: counting_rows must be ascending and in range");
    }
    prev_row = counting_rows[k];
    if (counts[k] < kMinCount || counts[k] > kMaxCount) {
      throw std::invalid_argument("EmbeddingBatch: count out of range");
    }
    if (cf_emb[k].rows() != want_rows || cf_emb[k].cols() != d) {
      throw std::invalid_argument("EmbeddingBatch: counterfactual block shape does not match the loss variant");
    }
  }
}

double clip_contrastive_loss(const Eigen::MatrixXd& image_emb, const Eigen::MatrixXd& text_emb,
                             double temperature) {
  return clip_contrastive_loss_grad(image_emb, text_emb, temperature).value;
}

ClipLossGrad clip_contrastive_loss_grad(const Eigen::MatrixXd& image_emb,
                                        const Eigen::MatrixXd& text_emb, double temperature) {
  check_temperature(temperature);
  const Eigen::Index b = image_emb.rows();
  if (b < 2) {
    throw std::invalid_argument("clip_contrastive_loss: needs at least 2 samples");
  }
  if (text_emb.rows() != b || text_emb.cols() != image_emb.cols()) {
    throw std::invalid_argument("clip_contrastive_loss: image/text shapes differ");
  }
  const double scale = 1.0 / temperature;
  const Eigen::MatrixXd sim = image_emb * text_emb.transpose();
  const Eigen::MatrixXd logits = scale * sim;

  const auto bd = static_cast<double>(b);
  double loss_i2t = 0.0;
  double loss_t2i = 0.0;
  Eigen::MatrixXd grad_logits = Eigen::MatrixXd::Zero(b, b);

  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::VectorXd row = logits.row(i);
    const double lse = log_sum_exp(row);
    loss_i2t += lse - row(i);
    grad_logits.row(i) += ((row.array() - lse).exp().matrix().transpose()) / bd;
    grad_logits(i, i) -= 1.0 / bd;
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    const Eigen::VectorXd col = logits.col(j);
    const double lse = log_sum_exp(col);
    loss_t2i += lse - col(j);
    grad_logits.col(j) += ((col.array() - lse).exp().matrix()) / bd;
    grad_logits(j, j) -= 1.0 / bd;
  }
  grad_logits *= 0.5;

  ClipLossGrad out;
  out.value = 0.5 * (loss_i2t + loss_t2i) / bd;
  out.d_image = scale * grad_logits * text_emb;
  out.d_text = scale * grad_logits.transpose() * image_emb;
  out.d_scale = grad_logits.cwiseProduct(sim).sum();
  return out;
}

double count_loss(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                  const Eigen::VectorXd& et_cf) {
  if (et_cf.size() != ei.size()) {
    throw std::invalid_argument("count_loss: embedding dimension mismatch");
  }
  return count_term_grad(ei, et, et_cf.transpose()).value;
}

CountLossGrad count_loss_grad(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                              const Eigen::VectorXd& et_cf) {
  if (et_cf.size() != ei.size()) {
    throw std::invalid_argument("count_loss: embedding dimension mismatch");
  }
  return count_term_grad(ei, et, et_cf.transpose());
}

double count_plus_loss(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                       const Eigen::MatrixXd& et_cf_all) {
  return count_plus_loss_grad(ei, et, et_cf_all).value;
}

CountLossGrad count_plus_loss_grad(const Eigen::VectorXd& ei, const Eigen::VectorXd& et,
                                   const Eigen::MatrixXd& et_cf_all) {
  if (et_cf_all.rows() != kCountClasses - 1) {
    throw std::invalid_argument("count_plus_loss: expected exactly 8 counterfactual rows");
  }
  return count_term_grad(ei, et, et_cf_all);
}

LossBreakdown combined_loss(const EmbeddingBatch& batch, const LambdaTable& lambdas,
                            LossVariant variant, double temperature, bool normalize_embeddings) {
  return combined_loss_grad(batch, lambdas, variant, temperature, normalize_embeddings).breakdown;
}

LossBreakdown combined_loss(const EmbeddingBatch& batch, const LambdaScheme& scheme,
                            const ClassFrequencyTable& table, LossVariant variant,
                            double temperature, bool normalize_embeddings) {
  return combined_loss(batch, LambdaTable::build(scheme, table), variant, temperature,
                       normalize_embeddings);
}

CombinedLossGrad combined_loss_grad(const EmbeddingBatch& batch, const LambdaTable& lambdas,
                                    LossVariant variant, double temperature,
                                    bool normalize_embeddings) {
  batch.validate(variant);
  check_temperature(temperature);

  Eigen::VectorXd img_inv_norms;
  Eigen::VectorXd txt_inv_norms;
  std::vector<Eigen::VectorXd> cf_inv_norms(batch.cf_emb.size());

  const Eigen::MatrixXd img = normalize_embeddings
                                  ? normalize_rows(batch.image_emb, &img_inv_norms)
                                  : batch.image_emb;
  const Eigen::MatrixXd txt = normalize_embeddings
                                  ? normalize_rows(batch.text_emb, &txt_inv_norms)
                                  : batch.text_emb;
  std::vector<Eigen::MatrixXd> cf(batch.cf_emb.size());
  for (std::size_t k = 0; k < batch.cf_emb.size(); ++k) {
    cf[k] = normalize_embeddings ? normalize_rows(batch.cf_emb[k], &cf_inv_norms[k])
                                 : batch.cf_emb[k];
  }

  ClipLossGrad clip = clip_contrastive_loss_grad(img, txt, temperature);

  CombinedLossGrad out;
  out.breakdown.l_clip = clip.value;
  out.d_logit_scale = clip.d_scale;

  // Gradients w.r.t. the (possibly normalized) embeddings, accumulated over
  // the contrastive and counting terms before undoing the normalization.
  Eigen::MatrixXd d_img = clip.d_image;
  Eigen::MatrixXd d_txt = clip.d_text;
  out.d_cf.resize(batch.cf_emb.size());

  const auto n_counting = batch.num_counting();
  if (n_counting > 0) {
    const double inv_n = 1.0 / static_cast<double>(n_counting);
    out.breakdown.per_sample_lambda.reserve(n_counting);
    for (std::size_t k = 0; k < n_counting; ++k) {
      const int row = batch.counting_rows[k];
      const double lambda_k = lambdas.at(batch.counts[k]);
      out.breakdown.per_sample_lambda.push_back(lambda_k);

      const Eigen::VectorXd ei = img.row(row);
      const Eigen::VectorXd et = txt.row(row);
      const CountLossGrad term = count_term_grad(ei, et, cf[k]);

      const double w = lambda_k * inv_n;
      out.breakdown.l_count += w * term.value;
      d_img.row(row) += w * term.d_ei.transpose();
      d_txt.row(row) += w * term.d_et.transpose();
      out.d_cf[k] = w * term.d_et_cf;
    }
  }
  for (std::size_t k = 0; k < batch.cf_emb.size(); ++k) {
    if (out.d_cf[k].size() == 0) {
      out.d_cf[k] = Eigen::MatrixXd::Zero(batch.cf_emb[k].rows(), batch.cf_emb[k].cols());
    }
  }

  out.breakdown.total = out.breakdown.l_clip + out.breakdown.l_count;

  if (normalize_embeddings) {
    out.d_image.resize(batch.image_emb.rows(), batch.image_emb.cols());
    out.d_text.resize(batch.text_emb.rows(), batch.text_emb.cols());
    for (Eigen::Index i = 0; i < batch.image_emb.rows(); ++i) {
      out.d_image.row(i) = normalize_row_backward(d_img.row(i), img.row(i), img_inv_norms(i));
      out.d_text.row(i) = normalize_row_backward(d_txt.row(i), txt.row(i), txt_inv_norms(i));
    }
    for (std::size_t k = 0; k < out.d_cf.size(); ++k) {
      for (Eigen::Index r = 0; r < out.d_cf[k].rows(); ++r) {
        out.d_cf[k].row(r) =
            normalize_row_backward(out.d_cf[k].row(r), cf[k].row(r), cf_inv_norms[k](r));
      }
    }
  } else {
    out.d_image = std::move(d_img);
    out.d_text = std::move(d_txt);
  }
  return out;
}

}  // namespace countfit
