#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace tnloss {

using SparseFeatures = Eigen::SparseMatrix<double>;

/// A multi-head MLP whose output heads are the learnable predicates of a KB:
/// hidden layers are ReLU, the output layer is a row-wise softmax so the
/// heads form a distribution over mutually exclusive classes. Parameters
/// live in one flat vector (per layer: column-major W, then b) so optimizers
/// can treat the model as a single point in R^n.
class MlpPredicateGroup {
 public:
  /// layer_dims = {n_features, hidden..., n_heads}; head_names must have
  /// size n_heads and name the predicates in output order.
  MlpPredicateGroup(std::vector<int> layer_dims, std::vector<std::string> head_names);

  void init_params(unsigned seed);  // He-normal weights, zero biases

  int n_params() const noexcept { return static_cast<int>(params_.size()); }
  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::vector<int>& layer_dims() const noexcept { return dims_; }
  const std::vector<std::string>& head_names() const noexcept { return heads_; }
  int head_index(const std::string& name) const;

  struct Workspace {
    std::vector<Eigen::MatrixXd> z;  // pre-activations per layer
    std::vector<Eigen::MatrixXd> h;  // post-activations (h.back() is the output)
  };

  /// X is n_examples x n_features. Returns the n_examples x n_heads output.
  const Eigen::MatrixXd& forward(const SparseFeatures& X, Workspace& ws) const;

  /// dY is d(loss)/d(output). Returns d(loss)/d(params) as a flat vector.
  std::vector<double> backward(const SparseFeatures& X, const Workspace& ws,
                               const Eigen::MatrixXd& dY) const;

  void save(const std::string& path) const;
  static MlpPredicateGroup load(const std::string& path);

 private:
  std::vector<int> dims_;
  std::vector<std::string> heads_;
  std::vector<double> params_;
  int layer_count() const noexcept { return static_cast<int>(dims_.size()) - 1; }
};

}  // namespace tnloss
