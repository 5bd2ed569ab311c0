#pragma once

// Dense networks with hand-written reverse mode, Adam, Polyak target
// updates, and the tanh-squashed Gaussian policy head.
//
// Batches are column-major: a batch of B inputs of size n is an n x B matrix.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stlrl/rng.hpp"

namespace stlrl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Activation { Identity, Relu, Tanh };

struct Dense {
  Matrix weight;  // out x in
  Vector bias;    // out
  bool operator==(const Dense& o) const { return weight == o.weight && bias == o.bias; }
};

/// Parameters of a network, layer by layer. Gradients share the layout.
using Params = std::vector<Dense>;

Params zeros_like(const Params& p);

/// Activations recorded by a forward pass: activations[0] is the input,
/// activations[l + 1] the output of layer l.
struct Tape {
  std::vector<Matrix> activations;
  bool empty() const { return activations.empty(); }
};

class Mlp {
 public:
  Mlp() = default;
  /// `sizes` = {input, hidden..., output}.
  Mlp(std::vector<std::size_t> sizes, Activation hidden, Activation output);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void initialize(Rng& rng);

  std::size_t input_dim() const { return layers_.front().weight.cols(); }
  std::size_t output_dim() const { return layers_.back().weight.rows(); }
  std::size_t parameter_count() const;
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  Matrix forward(const Matrix& input, Tape* tape = nullptr) const;

  /// Parameter gradients of sum(grad_output .* output); optionally the input gradient.
  Params backward(const Tape& tape, const Matrix& grad_output, Matrix* grad_input = nullptr) const;
  /// Input gradient only, skipping the parameter gradients.
  Matrix input_gradient(const Tape& tape, const Matrix& grad_output) const;

  Params& params() { return layers_; }
  const Params& params() const { return layers_; }

  bool operator==(const Mlp& o) const {
    return hidden_ == o.hidden_ && output_ == o.output_ && layers_ == o.layers_;
  }

 private:
  Activation activation_of(std::size_t layer) const {
    return layer + 1 == layers_.size() ? output_ : hidden_;
  }
  Matrix backprop(const Tape& tape, const Matrix& grad_output, Params* grads) const;

  Params layers_;
  Activation hidden_ = Activation::Relu;
  Activation output_ = Activation::Identity;
};

struct AdamOptions {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a network's parameters.
class Adam {
 public:
  Adam() = default;
  Adam(const Params& shape, AdamOptions options);

  void step(Params& params, const Params& grads);
  void step(Mlp& net, const Params& grads) { step(net.params(), grads); }

  std::size_t steps() const { return steps_; }
  const AdamOptions& options() const { return options_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);
  bool operator==(const Adam& o) const {
    return steps_ == o.steps_ && m_ == o.m_ && v_ == o.v_;
  }

 private:
  AdamOptions options_;
  Params m_, v_;
  std::size_t steps_ = 0;
};

/// Adam on a single scalar (Lagrange multiplier, entropy temperature).
class ScalarAdam {
 public:
  explicit ScalarAdam(AdamOptions options = {}) : options_(options) {}
  /// Returns the increment to add to the parameter for gradient `grad`.
  double increment(double grad);
  std::size_t steps() const { return steps_; }
  const AdamOptions& options() const { return options_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);
  bool operator==(const ScalarAdam& o) const {
    return steps_ == o.steps_ && m_ == o.m_ && v_ == o.v_;
  }

 private:
  AdamOptions options_;
  double m_ = 0.0, v_ = 0.0;
  std::size_t steps_ = 0;
};

/// target <- xi * main + (1 - xi) * target, elementwise. Requires 0 < xi <= 1.
void soft_update(Mlp& target, const Mlp& main, double xi);

// ----------------------------------------------------------- policy head

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Mean and clamped log standard deviation, split from a 2*n_a x B actor output.
struct GaussianHead {
  Matrix mean;
  Matrix log_std;
  Matrix raw_log_std;  // pre-clamp, for the clamp's gradient mask

  static GaussianHead from_output(const Matrix& output);
  std::size_t action_dim() const { return mean.rows(); }
};

struct SquashedSample {
  Matrix action;      // tanh(mean + std * eps), n_a x B
  Matrix noise;       // eps
  RowVector log_prob; // log density of `action`, including the tanh Jacobian
};

SquashedSample sample_squashed_gaussian(const GaussianHead& head, const Matrix& noise);

/// Gradient w.r.t. the raw actor output (2*n_a x B) of a loss whose
/// gradients w.r.t. the sampled action and log-probability are given.
Matrix squashed_gaussian_backward(const GaussianHead& head, const SquashedSample& sample,
                                  const Matrix& grad_action, const RowVector& grad_log_prob);

/// Standard normal noise matrix.
Matrix standard_normal(std::size_t rows, std::size_t cols, Rng& rng);

// --------------------------------------------------------- serialization

void write_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_u64(std::istream& is);
void write_f64(std::ostream& os, double v);
double read_f64(std::istream& is);
void write_string(std::ostream& os, const std::string& s);
std::string read_string(std::istream& is);

void write_params(std::ostream& os, const Params& p);
/// Reads into `p`, which must already have the stored shapes.
void read_params(std::istream& is, Params& p);
void write_mlp(std::ostream& os, const Mlp& net);
void read_mlp(std::istream& is, Mlp& net);

}  // namespace stlrl::nn
