#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

namespace countfit {

/// A dual encoder: images and captions map into a shared d-dimensional space.
///
/// Training protocol per step: one encode_images call and one encode_texts
/// call while in training mode (the backend keeps a tape of that step's
/// inputs), then apply_gradients with the loss gradients w.r.t. those two
/// output matrices. Encoding is deterministic given fixed weights when not
/// training.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual int embedding_dim() const = 0;

  /// Rows are embeddings, one per input, in input order.
  virtual Eigen::MatrixXd encode_images(std::span<const std::string> image_refs) = 0;
  virtual Eigen::MatrixXd encode_texts(std::span<const std::string> captions) = 0;

  /// Learnable positive multiplier on contrastive similarities.
  virtual double logit_scale() const = 0;

  virtual bool trainable() const { return false; }
  virtual void set_training(bool) {}

  /// d_image / d_text are gradients w.r.t. the outputs of this step's encode
  /// calls; d_logit_scale w.r.t. logit_scale().
  virtual void apply_gradients(const Eigen::MatrixXd& d_image, const Eigen::MatrixXd& d_text,
                               double d_logit_scale, double learning_rate) {
    (void)d_image;
    (void)d_text;
    (void)d_logit_scale;
    (void)learning_rate;
    throw std::logic_error("backend is not trainable");
  }

  virtual void save_weights(const std::filesystem::path& file) const {
    (void)file;
    throw std::logic_error("backend does not support checkpointing");
  }
  virtual void load_weights(const std::filesystem::path& file) {
    (void)file;
    throw std::logic_error("backend does not support checkpointing");
  }
};

}  // namespace countfit
