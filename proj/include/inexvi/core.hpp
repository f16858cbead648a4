#pragma once

// Vector arithmetic, the VIP(F, C) building blocks and the feasible-inexact-
// projection certificate.

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace inexvi {

using Point = Eigen::VectorXd;

/// Caller passed arguments that violate a documented precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operator was evaluated outside the region where it is defined.
class OperatorDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Internal numerical failure of a solver (line search exhaustion, vanishing
/// operator, inner-solver budget exhausted, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCertificateTol = 1e-9;
inline constexpr double kFeasibilitySlack = 1e-12;

inline bool all_finite(const Point& a) { return a.allFinite(); }

inline void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

inline double dot(const Point& a, const Point& b) {
  require_same_dim(a, b, "dot");
  return a.dot(b);
}

inline double pnorm(const Point& a, double p) {
  if (!(p >= 1.0)) throw UsageError("pnorm: p must be >= 1");
  if (std::isinf(p)) return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  if (p == 2.0) return a.norm();
  if (p == 1.0) return a.cwiseAbs().sum();
  // Scale by the largest entry so |x_i|^p does not underflow or overflow.
  const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i]) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

inline double norm(const Point& a) { return a.norm(); }

/// Evaluatable operator F: R^d -> R^d.
class VectorField {
 public:
  using Fn = std::function<Point(const Point&)>;

  VectorField() = default;
  VectorField(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {
    if (dim <= 0) throw UsageError("VectorField: dimension must be positive");
  }

  int dim() const { return dim_; }

  Point operator()(const Point& x) const {
    if (x.size() != dim_) throw UsageError("VectorField: argument has wrong dimension");
    Point out = fn_(x);
    if (out.size() != dim_) throw SolverError("VectorField: operator changed the dimension");
    if (!all_finite(out)) throw OperatorDomainError("VectorField: non-finite operator value");
    return out;
  }

 private:
  int dim_ = 0;
  Fn fn_;
};

/// A compact convex set reachable only through a linear-minimization oracle.
/// `lo_oracle(c)` returns a minimizer of <c, y> over the set; for c = 0 it
/// returns `interior_point()`.
template <class S>
concept FeasibleRegion = requires(const S& s, const Point& x, double tol) {
  { s.dim() } -> std::convertible_to<int>;
  { s.lo_oracle(x) } -> std::convertible_to<Point>;
  { s.contains(x, tol) } -> std::convertible_to<bool>;
  { s.interior_point() } -> std::convertible_to<Point>;
};

/// Type-erased feasible set with value semantics (the held set is immutable
/// and shared).
class FeasibleSet {
 public:
  FeasibleSet() = default;

  template <FeasibleRegion S>
    requires(!std::same_as<std::remove_cvref_t<S>, FeasibleSet>)
  FeasibleSet(S set)  // NOLINT(google-explicit-constructor)
      : impl_(std::make_shared<Model<S>>(std::move(set))) {}

  int dim() const { return impl_->dim(); }
  Point lo_oracle(const Point& cost) const { return impl_->lo_oracle(cost); }
  bool contains(const Point& x, double tol = kFeasibilitySlack) const {
    return impl_->contains(x, tol);
  }
  Point interior_point() const { return impl_->interior_point(); }
  std::string describe() const { return impl_->describe(); }

  explicit operator bool() const { return static_cast<bool>(impl_); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual int dim() const = 0;
    virtual Point lo_oracle(const Point&) const = 0;
    virtual bool contains(const Point&, double) const = 0;
    virtual Point interior_point() const = 0;
    virtual std::string describe() const = 0;
  };

  template <class S>
  struct Model final : Concept {
    explicit Model(S s) : set(std::move(s)) {}
    int dim() const override { return set.dim(); }
    Point lo_oracle(const Point& c) const override { return set.lo_oracle(c); }
    bool contains(const Point& x, double tol) const override { return set.contains(x, tol); }
    Point interior_point() const override { return set.interior_point(); }
    std::string describe() const override {
      if constexpr (requires { set.describe(); }) {
        return set.describe();
      } else {
        return "set";
      }
    }
    S set;
  };

  std::shared_ptr<const Concept> impl_;
};

/// Evidence that w is a feasible inexact projection of v onto C relative to u
/// with tolerance gamma, i.e. <v - w, y - w> <= gamma ||w - u||^2 for all y in C.
struct ProjectionCertificate {
  Point w;
  Point u;
  Point v;
  double gamma = 0.0;
  /// max over y in C of <v - w, y - w> - gamma ||w - u||^2.
  double worst_violation = std::numeric_limits<double>::infinity();
  bool feasible = false;
  double tolerance = kCertificateTol;

  bool valid() const { return feasible && worst_violation <= tolerance; }
  std::string reason() const {
    if (!feasible) return "infeasible";
    if (worst_violation > tolerance) return "violated";
    return "ok";
  }
};

/// The maximum of the linear functional <v - w, .> over C is attained at an
/// LO-oracle answer, so a single oracle call gives the exact worst case.
template <FeasibleRegion S>
ProjectionCertificate check_certificate(const Point& w, const Point& u, const Point& v, double gamma,
                                        const S& set, double tol = kCertificateTol) {
  require_same_dim(w, u, "check_certificate");
  require_same_dim(w, v, "check_certificate");
  if (!(gamma >= 0.0)) throw UsageError("check_certificate: gamma must be >= 0");
  ProjectionCertificate cert{w, u, v, gamma};
  cert.tolerance = tol;
  cert.feasible = set.contains(w, kFeasibilitySlack);
  const Point residual = v - w;
  const Point worst = set.lo_oracle(-residual);
  cert.worst_violation = residual.dot(worst - w) - gamma * (w - u).squaredNorm();
  return cert;
}

}  // namespace inexvi
