#include "stlrl/nn.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace stlrl::nn {

Params zeros_like(const Params& p) {
  Params out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i].weight = Matrix::Zero(p[i].weight.rows(), p[i].weight.cols());
    out[i].bias = Vector::Zero(p[i].bias.size());
  }
  return out;
}

Mlp::Mlp(std::vector<std::size_t> sizes, Activation hidden, Activation output)
    : hidden_(hidden), output_(output) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] == 0 || sizes[i + 1] == 0) throw std::invalid_argument("Mlp: zero-width layer");
    layers_.push_back({Matrix::Zero(sizes[i + 1], sizes[i]), Vector::Zero(sizes[i + 1])});
  }
}

void Mlp::initialize(Rng& rng) {
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
        layer.weight(i, j) = rng.uniform(-bound, bound);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = rng.uniform(-bound, bound);
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

static void activate(Matrix& z, Activation a) {
  switch (a) {
    case Activation::Identity: break;
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
  }
}

Matrix Mlp::forward(const Matrix& input, Tape* tape) const {
  if (static_cast<std::size_t>(input.rows()) != input_dim())
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.rows()) +
                                " rows, network expects " + std::to_string(input_dim()));
  if (tape) {
    tape->activations.clear();
    tape->activations.reserve(layers_.size() + 1);
    tape->activations.push_back(input);
  }
  const Matrix* x = &input;
  Matrix current;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z(layers_[l].weight.rows(), x->cols());
    z.noalias() = layers_[l].weight * *x;
    z.colwise() += layers_[l].bias;
    activate(z, activation_of(l));
    if (tape) {
      tape->activations.push_back(std::move(z));
      x = &tape->activations.back();
    } else {
      current = std::move(z);
      x = &current;
    }
  }
  return tape ? tape->activations.back() : current;
}

Matrix Mlp::backprop(const Tape& tape, const Matrix& grad_output, Params* grads) const {
  if (tape.activations.size() != layers_.size() + 1)
    throw std::logic_error("Mlp::backward without a recorded forward pass");
  const Matrix& out = tape.activations.back();
  if (grad_output.rows() != out.rows() || grad_output.cols() != out.cols())
    throw std::invalid_argument("Mlp::backward: gradient shape differs from the output");
  if (grads) *grads = Params(layers_.size());
  Matrix delta = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Matrix& y = tape.activations[l + 1];
    switch (activation_of(l)) {
      case Activation::Identity: break;
      case Activation::Relu: delta = (y.array() > 0.0).select(delta, 0.0); break;
      case Activation::Tanh: delta = (delta.array() * (1.0 - y.array().square())).matrix(); break;
    }
    if (grads) {
      (*grads)[l].weight.noalias() = delta * tape.activations[l].transpose();
      (*grads)[l].bias = delta.rowwise().sum();
    }
    Matrix prev(layers_[l].weight.cols(), delta.cols());
    prev.noalias() = layers_[l].weight.transpose() * delta;
    delta = std::move(prev);
  }
  return delta;
}

Params Mlp::backward(const Tape& tape, const Matrix& grad_output, Matrix* grad_input) const {
  Params grads;
  Matrix gin = backprop(tape, grad_output, &grads);
  if (grad_input) *grad_input = std::move(gin);
  return grads;
}

Matrix Mlp::input_gradient(const Tape& tape, const Matrix& grad_output) const {
  return backprop(tape, grad_output, nullptr);
}

// ------------------------------------------------------------------- Adam

Adam::Adam(const Params& shape, AdamOptions options)
    : options_(options), m_(zeros_like(shape)), v_(zeros_like(shape)) {
  if (!(options.lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
}

void Adam::step(Params& params, const Params& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("Adam::step: layer count mismatch");
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = options_.lr, eps = options_.eps;
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    if (p.size() != g.size() || p.rows() != g.rows())
      throw std::invalid_argument("Adam::step: parameter/gradient shape mismatch");
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weight, m_[l].weight, v_[l].weight, grads[l].weight);
    update(params[l].bias, m_[l].bias, v_[l].bias, grads[l].bias);
  }
}

double ScalarAdam::increment(double grad) {
  ++steps_;
  m_ = options_.beta1 * m_ + (1.0 - options_.beta1) * grad;
  v_ = options_.beta2 * v_ + (1.0 - options_.beta2) * grad * grad;
  const double m_hat = m_ / (1.0 - std::pow(options_.beta1, static_cast<double>(steps_)));
  const double v_hat = v_ / (1.0 - std::pow(options_.beta2, static_cast<double>(steps_)));
  return -options_.lr * m_hat / (std::sqrt(v_hat) + options_.eps);
}

void soft_update(Mlp& target, const Mlp& main, double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("soft_update: xi must be in (0, 1]");
  auto& t = target.params();
  const auto& m = main.params();
  if (t.size() != m.size()) throw std::invalid_argument("soft_update: architecture mismatch");
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (t[l].weight.rows() != m[l].weight.rows() || t[l].weight.cols() != m[l].weight.cols())
      throw std::invalid_argument("soft_update: architecture mismatch");
    t[l].weight = xi * m[l].weight + (1.0 - xi) * t[l].weight;
    t[l].bias = xi * m[l].bias + (1.0 - xi) * t[l].bias;
  }
}

// ----------------------------------------------------------- policy head

GaussianHead GaussianHead::from_output(const Matrix& output) {
  if (output.rows() % 2 != 0) throw std::invalid_argument("Gaussian head needs 2*n_a outputs");
  const Eigen::Index n = output.rows() / 2;
  GaussianHead h;
  h.mean = output.topRows(n);
  h.raw_log_std = output.bottomRows(n);
  h.log_std = h.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  return h;
}

SquashedSample sample_squashed_gaussian(const GaussianHead& head, const Matrix& noise) {
  if (noise.rows() != head.mean.rows() || noise.cols() != head.mean.cols())
    throw std::invalid_argument("squashed Gaussian: noise shape differs from the mean");
  static const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  SquashedSample s;
  s.noise = noise;
  const Matrix std = head.log_std.array().exp().matrix();
  const Matrix u = head.mean + std.cwiseProduct(noise);
  s.action = u.array().tanh().matrix();
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)), stable for large |u|.
  auto softplus = [](double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); };
  s.log_prob = RowVector::Zero(u.cols());
  for (Eigen::Index b = 0; b < u.cols(); ++b) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
      const double uj = u(j, b);
      const double log_det = 2.0 * (std::numbers::ln2 - uj - softplus(-2.0 * uj));
      lp += -0.5 * noise(j, b) * noise(j, b) - head.log_std(j, b) - half_log_2pi - log_det;
    }
    s.log_prob(b) = lp;
  }
  return s;
}

Matrix squashed_gaussian_backward(const GaussianHead& head, const SquashedSample& sample,
                                  const Matrix& grad_action, const RowVector& grad_log_prob) {
  const Eigen::Index n = head.mean.rows(), batch = head.mean.cols();
  Matrix grad(2 * n, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = sample.action(j, b);
      const double std = std::exp(head.log_std(j, b));
      const double du_dlogstd = std * sample.noise(j, b);
      // d log_prob / du = 2 tanh(u); d a / du = 1 - a^2.
      const double g_u = grad_action(j, b) * (1.0 - a * a) + grad_log_prob(b) * 2.0 * a;
      grad(j, b) = g_u;
      const double raw = head.raw_log_std(j, b);
      const bool inside = raw >= kLogStdMin && raw <= kLogStdMax;
      grad(n + j, b) = inside ? g_u * du_dlogstd - grad_log_prob(b) : 0.0;
    }
  }
  return grad;
}

Matrix standard_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  return m;
}

// --------------------------------------------------------- serialization

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("checkpoint truncated");
  return v;
}
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
double read_f64(std::istream& is) {
  double v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("checkpoint truncated");
  return v;
}
void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string read_string(std::istream& is) {
  const auto n = read_u64(is);
  if (n > (1u << 26)) throw std::runtime_error("checkpoint: implausible string length");
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n))) throw std::runtime_error("checkpoint truncated");
  return s;
}

static void write_matrix(std::ostream& os, const Matrix& m) {
  write_u64(os, static_cast<std::uint64_t>(m.rows()));
  write_u64(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * m.size()));
}

static void read_matrix(std::istream& is, Matrix& m) {
  const auto rows = read_u64(is), cols = read_u64(is);
  if (rows != static_cast<std::uint64_t>(m.rows()) || cols != static_cast<std::uint64_t>(m.cols()))
    throw std::runtime_error("checkpoint: tensor shape " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " does not match " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!is.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(sizeof(double) * m.size())))
    throw std::runtime_error("checkpoint truncated");
}

void write_params(std::ostream& os, const Params& p) {
  write_u64(os, p.size());
  for (const auto& l : p) {
    write_matrix(os, l.weight);
    write_matrix(os, l.bias);
  }
}

void read_params(std::istream& is, Params& p) {
  if (read_u64(is) != p.size()) throw std::runtime_error("checkpoint: layer count mismatch");
  for (auto& l : p) {
    read_matrix(is, l.weight);
    Matrix b = l.bias;
    read_matrix(is, b);
    l.bias = b;
  }
}

void write_mlp(std::ostream& os, const Mlp& net) {
  write_u64(os, static_cast<std::uint64_t>(net.hidden_activation()));
  write_u64(os, static_cast<std::uint64_t>(net.output_activation()));
  write_params(os, net.params());
}

void read_mlp(std::istream& is, Mlp& net) {
  const auto hidden = static_cast<Activation>(read_u64(is));
  const auto output = static_cast<Activation>(read_u64(is));
  if (hidden != net.hidden_activation() || output != net.output_activation())
    throw std::runtime_error("checkpoint: activation mismatch");
  read_params(is, net.params());
}

void Adam::save(std::ostream& os) const {
  write_u64(os, steps_);
  write_params(os, m_);
  write_params(os, v_);
}

void Adam::load(std::istream& is) {
  steps_ = read_u64(is);
  read_params(is, m_);
  read_params(is, v_);
}

void ScalarAdam::save(std::ostream& os) const {
  write_u64(os, steps_);
  write_f64(os, m_);
  write_f64(os, v_);
}

void ScalarAdam::load(std::istream& is) {
  steps_ = read_u64(is);
  m_ = read_f64(is);
  v_ = read_f64(is);
}

}  // namespace stlrl::nn
