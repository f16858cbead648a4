#pragma once

// Benchmark VIP instances on p-norm balls and the closed-form LO oracles
// they rely on.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "inexvi/core.hpp"

namespace inexvi {

/// argmin of <c, y> over the unit p-ball. Zero cost maps to the origin.
inline Point pnorm_ball_lo(const Point& c, double p) {
  if (!(p >= 1.0)) throw UsageError("pnorm_ball_lo: p must be >= 1");
  const Eigen::Index d = c.size();
  Point y = Point::Zero(d);
  if (d == 0) return y;
  const double scale = c.cwiseAbs().maxCoeff();
  if (scale == 0.0) return y;

  if (p == 1.0) {
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(c[i]) > std::abs(c[j])) j = i;
    }
    y[j] = c[j] > 0 ? -1.0 : 1.0;
    return y;
  }
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < d; ++i) y[i] = c[i] > 0 ? -1.0 : (c[i] < 0 ? 1.0 : 0.0);
    return y;
  }

  // Hoelder equality case: y_i = -sign(c_i) |c_i|^{q-1} / ||c||_q^{q-1}.
  // The formula is homogeneous of degree 0 in c, so work with c / max|c_i|.
  const double q = p / (p - 1.0);
  double sum_q = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double a = std::abs(c[i]) / scale;
    const double aq1 = std::pow(a, q - 1.0);
    y[i] = aq1;
    sum_q += aq1 * a;
  }
  const double denom = std::pow(sum_q, (q - 1.0) / q);
  for (Eigen::Index i = 0; i < d; ++i) {
    y[i] = c[i] > 0 ? -y[i] / denom : (c[i] < 0 ? y[i] / denom : 0.0);
  }
  return y;
}

/// Unit ball {x : (sum |x_i|^p)^(1/p) <= 1}.
class PNormBall {
 public:
  PNormBall(int dim, double p) : dim_(dim), p_(p) {
    if (dim <= 0) throw UsageError("PNormBall: dimension must be positive");
    if (!(p >= 1.0)) throw UsageError("PNormBall: p must be >= 1");
  }

  int dim() const { return dim_; }
  double p() const { return p_; }
  Point lo_oracle(const Point& cost) const {
    if (cost.size() != dim_) throw UsageError("PNormBall: cost has wrong dimension");
    return pnorm_ball_lo(cost, p_);
  }
  bool contains(const Point& x, double tol) const {
    if (x.size() != dim_ || !all_finite(x)) return false;
    return pnorm(x, p_) <= 1.0 + tol * (1.0 + x.norm());
  }
  Point interior_point() const { return Point::Zero(dim_); }
  std::string describe() const {
    std::ostringstream os;
    os << "B^" << dim_ << "_" << p_;
    return os.str();
  }

 private:
  int dim_;
  double p_;
};

/// Axis-aligned box [lo, hi].
class Box {
 public:
  Box(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    require_same_dim(lo_, hi_, "Box");
    if (lo_.size() == 0) throw UsageError("Box: dimension must be positive");
    if ((lo_.array() > hi_.array()).any()) throw UsageError("Box: lo must not exceed hi");
  }

  int dim() const { return static_cast<int>(lo_.size()); }
  Point lo_oracle(const Point& cost) const {
    if (cost.size() != lo_.size()) throw UsageError("Box: cost has wrong dimension");
    if (cost.isZero(0.0)) return interior_point();
    Point y(lo_.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y[i] = cost[i] > 0 ? lo_[i] : (cost[i] < 0 ? hi_[i] : 0.5 * (lo_[i] + hi_[i]));
    }
    return y;
  }
  bool contains(const Point& x, double tol) const {
    if (x.size() != lo_.size() || !all_finite(x)) return false;
    const double slack = tol * (1.0 + x.norm());
    return ((x - lo_).array() >= -slack).all() && ((hi_ - x).array() >= -slack).all();
  }
  Point interior_point() const { return 0.5 * (lo_ + hi_); }
  std::string describe() const { return "box"; }

 private:
  Point lo_;
  Point hi_;
};

enum class Monotonicity { monotone, pseudo_monotone_wrt_solutions, quasimonotone, none };

/// A VIP instance plus the metadata the experiments need. Solvers never
/// branch on `monotonicity`; it is informational.
struct BenchmarkProblem {
  std::string name;
  VectorField field;
  FeasibleSet set;
  Point x_start;
  std::optional<Point> x_ref;
  std::optional<double> lipschitz;
  Monotonicity monotonicity = Monotonicity::none;
};

/// T(x) = A x + b with A = [[-1, -1], [1, -1]], b = (3/2, 1/2) on B^2_10.
inline BenchmarkProblem linear_saddle_operator() {
  Eigen::Matrix2d a;
  a << -1.0, -1.0, 1.0, -1.0;
  const Eigen::Vector2d b(1.5, 0.5);
  BenchmarkProblem prob;
  prob.name = "linear-saddle";
  prob.field = VectorField(2, [a, b](const Point& x) -> Point { return a * x + b; });
  prob.set = PNormBall(2, 10.0);
  prob.x_start = Eigen::Vector2d(0.0, 1.0);
  prob.lipschitz = std::sqrt(2.0);
  // <A u, u> = -||u||^2: the symmetric part of A is -I.
  prob.monotonicity = Monotonicity::none;
  return prob;
}

/// T(x) = -t / (1 + t) (1, 1), t = (x_1 + sqrt(x_1^2 + 4 x_2)) / 2, on
/// B^2_10. The radicand is clamped at 0 so the operator is total on the ball.
inline Point nonlipschitz_eval(const Point& x) {
  const double rad = std::max(0.0, x[0] * x[0] + 4.0 * x[1]);
  const double t = 0.5 * (x[0] + std::sqrt(rad));
  return Point::Constant(2, -t / (1.0 + t));
}

inline BenchmarkProblem nonlipschitz_operator() {
  BenchmarkProblem prob;
  prob.name = "non-lipschitz";
  prob.field = VectorField(2, nonlipschitz_eval);
  prob.set = PNormBall(2, 10.0);
  prob.x_start = Eigen::Vector2d(0.0, 1.0);
  prob.x_ref = Point::Constant(2, std::pow(2.0, -0.1));
  prob.monotonicity = Monotonicity::quasimonotone;
  return prob;
}

/// Reference solution of the T_h problem: alpha e with alpha = sqrt(2 / (d h))
/// when it lies in the ball (T_h vanishes there), otherwise d^(-1/p) e, where
/// T_h is a negative multiple of e and <e, .> is maximized over the ball.
inline Point th_reference_solution(int d, double p, double h) {
  const double alpha = std::sqrt(2.0 / (d * h));
  const Point candidate = Point::Constant(d, alpha);
  if (pnorm(candidate, p) <= 1.0) return candidate;
  return Point::Constant(d, std::pow(static_cast<double>(d), -1.0 / p));
}

/// T_{h,i}(x) = (h x_i S - (h/2) sum x_j^2 - 1) / S^2 with S = sum x_j.
inline BenchmarkProblem th_operator(int d, double p, double h) {
  if (d < 2) throw UsageError("th_operator: d must be >= 2");
  if (!(h >= 0.1 && h <= 1.6)) throw UsageError("th_operator: h must lie in [0.1, 1.6]");
  if (!(p >= 1.0)) throw UsageError("th_operator: p must be >= 1");
  BenchmarkProblem prob;
  std::ostringstream name;
  name << "th:d=" << d << ",p=" << p << ",h=" << h;
  prob.name = name.str();
  prob.field = VectorField(d, [h](const Point& x) -> Point {
    const double s = x.sum();
    if (std::abs(s) < 1e-12) throw OperatorDomainError("T_h: sum of coordinates vanishes");
    const double sq = x.squaredNorm();
    return ((h * s) * x.array() - (0.5 * h * sq + 1.0)).matrix() / (s * s);
  });
  prob.set = PNormBall(d, p);
  prob.x_start = Point::Zero(d);
  prob.x_start[d - 1] = 1.0;
  prob.x_ref = th_reference_solution(d, p, h);
  prob.monotonicity = Monotonicity::pseudo_monotone_wrt_solutions;
  return prob;
}

/// F = 0 on B^d_10: every feasible point is a solution.
inline BenchmarkProblem zero_operator(int d = 2) {
  if (d < 1) throw UsageError("zero_operator: d must be >= 1");
  BenchmarkProblem prob;
  prob.name = "zero";
  prob.field = VectorField(d, [d](const Point&) -> Point { return Point::Zero(d); });
  prob.set = PNormBall(d, 10.0);
  prob.x_start = Point::Zero(d);
  prob.x_start[d - 1] = 1.0;
  prob.x_ref = prob.x_start;
  prob.lipschitz = 0.0;
  prob.monotonicity = Monotonicity::monotone;
  return prob;
}

namespace detail {

inline double parse_number(std::string_view text, std::string_view key) {
  std::string buf(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != buf.size()) {
    throw UsageError("problem name: bad value for '" + std::string(key) + "': " + buf);
  }
  return value;
}

/// Parses "k1=v1,k2=v2" into a map.
inline std::map<std::string, double> parse_params(std::string_view text) {
  std::map<std::string, double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("problem name: expected key=value, got '" + std::string(item) + "'");
    }
    const std::string key(item.substr(0, eq));
    out[key] = parse_number(item.substr(eq + 1), key);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Registry lookup: "linear-saddle", "non-lipschitz", "th:d=<d>,p=<p>,h=<h>",
/// "zero" or "zero:d=<d>".
inline BenchmarkProblem make_problem(std::string_view name) {
  if (name == "linear-saddle") return linear_saddle_operator();
  if (name == "non-lipschitz") return nonlipschitz_operator();
  if (name == "zero") return zero_operator();
  const auto colon = name.find(':');
  const std::string_view head = name.substr(0, colon);
  if (colon != std::string_view::npos && (head == "th" || head == "zero")) {
    const auto params = detail::parse_params(name.substr(colon + 1));
    auto get = [&](const char* key) {
      const auto it = params.find(key);
      if (it == params.end()) throw UsageError("problem name: missing '" + std::string(key) + "'");
      return it->second;
    };
    if (head == "zero") return zero_operator(static_cast<int>(get("d")));
    return th_operator(static_cast<int>(get("d")), get("p"), get("h"));
  }
  throw UsageError("unknown problem '" + std::string(name) + "'");
}

}  // namespace inexvi
