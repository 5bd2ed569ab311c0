#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "gradcheck.hpp"
#include "stlrl/agent.hpp"
#include "stlrl/nn.hpp"

using namespace stlrl;
using nn::Matrix;

namespace {

// Straight-line forward pass, written without Eigen expressions.
Matrix forward_by_loops(const nn::Mlp& net, const Matrix& x) {
  Matrix cur = x;
  const auto& p = net.params();
  for (std::size_t l = 0; l < p.size(); ++l) {
    Matrix next(p[l].weight.rows(), cur.cols());
    const auto act = l + 1 == p.size() ? net.output_activation() : net.hidden_activation();
    for (Eigen::Index b = 0; b < cur.cols(); ++b)
      for (Eigen::Index i = 0; i < next.rows(); ++i) {
        double s = p[l].bias(i);
        for (Eigen::Index j = 0; j < cur.rows(); ++j) s += p[l].weight(i, j) * cur(j, b);
        if (act == nn::Activation::Relu) s = s > 0 ? s : 0;
        if (act == nn::Activation::Tanh) s = std::tanh(s);
        next(i, b) = s;
      }
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_CASE("mlp forward matches the layer-by-layer definition") {
  Rng rng(3);
  for (auto out : {nn::Activation::Identity, nn::Activation::Tanh}) {
    nn::Mlp net({4, 7, 5, 3}, nn::Activation::Relu, out);
    net.initialize(rng);
    const Matrix x = gradcheck::random_matrix(4, 6, rng, 2.0);
    CHECK((net.forward(x) - forward_by_loops(net, x)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mlp forward examples") {
  nn::Mlp net({1, 1}, nn::Activation::Relu, nn::Activation::Relu);
  net.params()[0].weight(0, 0) = 2.0;
  net.params()[0].bias(0) = 1.0;
  Matrix x(1, 3);
  x << -3.0, 0.0, 1.5;
  const Matrix y = net.forward(x);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(0, 1) == 1.0);
  CHECK(y(0, 2) == 4.0);

  nn::Mlp zero({3, 4, 2}, nn::Activation::Relu, nn::Activation::Identity);
  for (auto& l : zero.params()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  Rng rng(1);
  CHECK(zero.forward(gradcheck::random_matrix(3, 5, rng)).isZero(0.0));
}

TEST_CASE("mlp construction and shape errors") {
  CHECK_THROWS(nn::Mlp({3}, nn::Activation::Relu, nn::Activation::Identity));
  CHECK_THROWS(nn::Mlp({3, 0, 1}, nn::Activation::Relu, nn::Activation::Identity));
  nn::Mlp net({3, 4, 2}, nn::Activation::Relu, nn::Activation::Identity);
  CHECK(net.parameter_count() == 3 * 4 + 4 + 4 * 2 + 2);
  CHECK_THROWS(net.forward(Matrix::Zero(2, 1)));
}

TEST_CASE("initialization bounds follow fan-in") {
  Rng rng(5);
  nn::Mlp net({9, 16, 4}, nn::Activation::Relu, nn::Activation::Identity);
  net.initialize(rng);
  CHECK(net.params()[0].weight.cwiseAbs().maxCoeff() <= 1.0 / 3.0);
  CHECK(net.params()[1].weight.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(net.params()[1].bias.cwiseAbs().maxCoeff() <= 0.25);
}

TEST_CASE("gradients match finite differences on small networks") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = 1 + rng.index(6), h = 2 + rng.index(8), out = 1 + rng.index(3);
    const auto act = std::array{nn::Activation::Identity, nn::Activation::Tanh, nn::Activation::Relu}[rng.index(3)];
    nn::Mlp net({in, h, h, out}, nn::Activation::Relu, act);
    net.initialize(rng);
    const auto c = gradcheck::check_plain(net, 1 + rng.index(5), rng, 0, "plain");
    CHECK(c.param_error < 1e-4);
    CHECK(c.input_error < 1e-4);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t in = 1 + rng.index(6), n_a = 1 + rng.index(2);
    nn::Mlp net({in, 6, 6, 2 * n_a}, nn::Activation::Relu, nn::Activation::Identity);
    net.initialize(rng);
    const auto c = gradcheck::check_gaussian_actor(net, 1 + rng.index(5), rng, 0, "gaussian");
    CHECK(c.param_error < 1e-4);
    CHECK(c.input_error < 1e-4);
  }
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  Rng rng(2);
  nn::Mlp net({3, 5, 2}, nn::Activation::Relu, nn::Activation::Tanh);
  net.initialize(rng);
  nn::Tape tape;
  net.forward(gradcheck::random_matrix(3, 4, rng), &tape);
  Matrix gin;
  const auto g = net.backward(tape, Matrix::Zero(2, 4), &gin);
  for (const auto& l : g) {
    CHECK(l.weight.isZero(0.0));
    CHECK(l.bias.isZero(0.0));
  }
  CHECK(gin.isZero(0.0));
  CHECK_THROWS(net.backward(nn::Tape{}, Matrix::Zero(2, 4)));
}

TEST_CASE("linear network gradient has the closed form") {
  nn::Mlp net({2, 1}, nn::Activation::Relu, nn::Activation::Identity);
  net.params()[0].weight << 0.5, -1.0;
  net.params()[0].bias << 0.25;
  Matrix x(2, 2);
  x << 1.0, 2.0, 3.0, -1.0;
  Matrix w(1, 2);
  w << 1.0, -2.0;
  nn::Tape tape;
  net.forward(x, &tape);
  Matrix gin;
  const auto g = net.backward(tape, w, &gin);
  CHECK(g[0].weight(0, 0) == doctest::Approx(1.0 - 4.0));
  CHECK(g[0].weight(0, 1) == doctest::Approx(3.0 + 2.0));
  CHECK(g[0].bias(0) == doctest::Approx(-1.0));
  CHECK(gin(0, 1) == doctest::Approx(-1.0));
  CHECK(gin(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("adam first step moves by lr against the gradient sign") {
  nn::Params p{{Matrix::Zero(2, 2), nn::Vector::Zero(2)}};
  nn::Params g{{Matrix(2, 2), nn::Vector(2)}};
  g[0].weight << 3.0, -0.01, 1e3, 0.0;
  g[0].bias << -7.0, 0.5;
  nn::Adam adam(p, {.lr = 0.1});
  adam.step(p, g);
  CHECK(p[0].weight(0, 0) == doctest::Approx(-0.1));
  CHECK(p[0].weight(0, 1) == doctest::Approx(0.1));
  CHECK(p[0].weight(1, 0) == doctest::Approx(-0.1));
  CHECK(p[0].weight(1, 1) == 0.0);
  CHECK(p[0].bias(0) == doctest::Approx(0.1));
  CHECK(adam.steps() == 1);
}

TEST_CASE("adam two steps against a scripted trace") {
  const nn::AdamOptions o{.lr = 0.01, .beta1 = 0.9, .beta2 = 0.999, .eps = 1e-8};
  nn::Params p{{Matrix::Constant(1, 1, 1.0), nn::Vector::Zero(1)}};
  nn::Adam adam(p, o);
  double theta = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const double grad = 2.0 * theta;  // d/dθ θ²
    nn::Params g{{Matrix::Constant(1, 1, grad), nn::Vector::Zero(1)}};
    adam.step(p, g);
    m = o.beta1 * m + (1 - o.beta1) * grad;
    v = o.beta2 * v + (1 - o.beta2) * grad * grad;
    const double mh = m / (1 - std::pow(o.beta1, t)), vh = v / (1 - std::pow(o.beta2, t));
    theta -= o.lr * mh / (std::sqrt(vh) + o.eps);
    CHECK(p[0].weight(0, 0) == doctest::Approx(theta).epsilon(1e-14));
  }
  nn::ScalarAdam s(o);
  CHECK(s.increment(4.0) == doctest::Approx(-0.01));
  CHECK(s.increment(0.0) < 0.0);
}

TEST_CASE("soft update is the convex combination") {
  nn::Mlp a({1, 1}, nn::Activation::Relu, nn::Activation::Identity);
  nn::Mlp b = a;
  a.params()[0].weight(0, 0) = 1.0;
  a.params()[0].bias(0) = 0.0;
  b.params()[0].weight(0, 0) = 0.0;
  b.params()[0].bias(0) = 2.0;
  nn::soft_update(b, a, 0.01);
  CHECK(b.params()[0].weight(0, 0) == doctest::Approx(0.01));
  CHECK(b.params()[0].bias(0) == doctest::Approx(1.98));
  nn::soft_update(b, a, 1.0);
  CHECK(b == a);
  CHECK_THROWS(nn::soft_update(b, a, 0.0));
  CHECK_THROWS(nn::soft_update(b, a, 1.5));
  nn::Mlp c({2, 1}, nn::Activation::Relu, nn::Activation::Identity);
  CHECK_THROWS(nn::soft_update(c, a, 0.5));
}

namespace {

nn::GaussianHead head_1d(double mean, double log_std, std::size_t cols = 1) {
  Matrix out(2, static_cast<Eigen::Index>(cols));
  out.row(0).setConstant(mean);
  out.row(1).setConstant(log_std);
  return nn::GaussianHead::from_output(out);
}

double log_prob_at(const nn::GaussianHead& h, double eps) {
  return nn::sample_squashed_gaussian(h, Matrix::Constant(1, 1, eps)).log_prob(0);
}

}  // namespace

TEST_CASE("squashed gaussian examples") {
  const auto h = head_1d(0.0, -5.0);
  const auto s = nn::sample_squashed_gaussian(h, Matrix::Zero(1, 1));
  CHECK(s.action(0, 0) == 0.0);
  const double center = s.log_prob(0);
  CHECK(center == doctest::Approx(5.0 - 0.5 * std::log(2 * std::numbers::pi)));
  for (double e : {-2.0, -0.5, 0.3, 1.0, 3.0}) CHECK(log_prob_at(h, e) < center);

  const auto clamped = head_1d(0.0, 10.0);
  CHECK(clamped.log_std(0, 0) == nn::kLogStdMax);
  CHECK(head_1d(0.0, -50.0).log_std(0, 0) == nn::kLogStdMin);
}

TEST_CASE("squashed gaussian log-density integrates to one") {
  for (auto [mu, ls] : {std::pair{0.2, std::log(0.6)}, std::pair{-0.5, std::log(0.3)}, std::pair{0.0, 0.0}}) {
    const auto h = head_1d(mu, ls);
    const double sigma = std::exp(ls);
    // integrate over u = atanh(a), where da = (1 - a^2) du
    const int n = 200000;
    const double lo = mu - 12 * sigma, hi = mu + 12 * sigma, du = (hi - lo) / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = lo + (i + 0.5) * du;
      const double a = std::tanh(u);
      total += std::exp(log_prob_at(h, (u - mu) / sigma)) * (1 - a * a) * du;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("squashed gaussian pre-squash moments") {
  Rng rng(8);
  const std::size_t n = 200000;
  const auto h = head_1d(0.3, std::log(0.5), n);
  const auto s = nn::sample_squashed_gaussian(h, nn::standard_normal(1, n, rng));
  const Eigen::ArrayXd u = s.action.row(0).array().atanh();
  const double mean = u.mean();
  const double var = (u - mean).square().mean();
  CHECK(mean == doctest::Approx(0.3).epsilon(0.01));
  CHECK(var == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("entropy estimate shrinks with sigma") {
  Rng rng(9);
  const std::size_t n = 20000;
  const Matrix noise = nn::standard_normal(1, n, rng);
  double prev = 1e300;
  for (double ls : {-0.5, -1.0, -2.0, -4.0, -8.0, -16.0}) {
    const auto s = nn::sample_squashed_gaussian(head_1d(0.1, ls, n), noise);
    const double entropy = -s.log_prob.mean();
    CHECK(entropy < prev);
    prev = entropy;
  }
}

TEST_CASE("network and optimizer serialization round trips exactly") {
  Rng rng(4);
  nn::Mlp net({3, 8, 2}, nn::Activation::Relu, nn::Activation::Tanh);
  net.initialize(rng);
  nn::Adam adam(net.params(), {});
  nn::Tape tape;
  net.forward(gradcheck::random_matrix(3, 4, rng), &tape);
  adam.step(net, net.backward(tape, gradcheck::random_matrix(2, 4, rng)));

  std::stringstream ss;
  nn::write_mlp(ss, net);
  adam.save(ss);
  rng.save(ss);

  nn::Mlp net2({3, 8, 2}, nn::Activation::Relu, nn::Activation::Tanh);
  nn::Adam adam2(net2.params(), {});
  Rng rng2;
  nn::read_mlp(ss, net2);
  adam2.load(ss);
  rng2.load(ss);
  CHECK(net2 == net);
  CHECK(adam2 == adam);
  CHECK(rng2 == rng);
  CHECK(rng2.next() == rng.next());

  for (auto wrong : {nn::Mlp({3, 9, 2}, nn::Activation::Relu, nn::Activation::Tanh),
                     nn::Mlp({3, 8, 2}, nn::Activation::Relu, nn::Activation::Identity)}) {
    std::stringstream again;
    nn::write_mlp(again, net);
    CHECK_THROWS(nn::read_mlp(again, wrong));
  }
}

TEST_CASE("agent architectures pass the gradient check at full width") {
  Rng rng(21);
  // critic on flag input, critic on window input, actors for both heads
  nn::Mlp critic = make_mlp(5 + 2, {256, 256}, 1, nn::Activation::Identity, rng);
  nn::Mlp sac_actor = make_mlp(5, {256, 256}, 4, nn::Activation::Identity, rng);
  nn::Mlp ddpg_actor = make_mlp(15, {256, 256}, 2, nn::Activation::Tanh, rng);
  CHECK(gradcheck::check_plain(critic, 4, rng, 60, "critic").param_error < 1e-4);
  const auto a = gradcheck::check_gaussian_actor(sac_actor, 4, rng, 60, "sac");
  CHECK(a.param_error < 1e-4);
  CHECK(a.input_error < 1e-4);
  CHECK(gradcheck::check_plain(ddpg_actor, 4, rng, 60, "ddpg").param_error < 1e-4);
}
