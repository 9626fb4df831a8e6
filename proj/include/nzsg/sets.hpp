#ifndef NZSG_SETS_HPP
#define NZSG_SETS_HPP

// Compact convex feasible sets: probability simplex, Euclidean ball, box and
// Cartesian products of those. Each kind has an exact projection, an exact
// linear-minimization oracle and a closed-form diameter.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "nzsg/vecmat.hpp"

namespace nzsg {

class FeasibleSet;

struct Simplex {
  std::size_t dim;
};

struct Ball {
  DenseVector center;
  double radius;
};

struct Box {
  DenseVector lo;
  DenseVector hi;
};

struct Product {
  std::vector<FeasibleSet> parts;
};

class FeasibleSet {
 public:
  using Kind = std::variant<Simplex, Ball, Box, Product>;

  static FeasibleSet simplex(std::size_t n) {
    if (n < 1) throw std::invalid_argument("simplex: dimension must be >= 1");
    return FeasibleSet(Simplex{n}, n);
  }

  static FeasibleSet ball(DenseVector center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("ball: radius must be positive");
    if (center.empty()) throw std::invalid_argument("ball: empty center");
    const std::size_t n = center.size();
    return FeasibleSet(Ball{std::move(center), radius}, n);
  }

  static FeasibleSet box(DenseVector lo, DenseVector hi) {
    detail::require_dims(hi.size(), lo.size(), "box");
    if (lo.empty()) throw std::invalid_argument("box: empty bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("box: lo > hi");
    const std::size_t n = lo.size();
    return FeasibleSet(Box{std::move(lo), std::move(hi)}, n);
  }

  static FeasibleSet product(std::vector<FeasibleSet> parts) {
    if (parts.empty()) throw std::invalid_argument("product: no components");
    std::size_t n = 0;
    for (const auto& p : parts) n += p.dim();
    return FeasibleSet(Product{std::move(parts)}, n);
  }

  std::size_t dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return *kind_; }

 private:
  FeasibleSet(Kind k, std::size_t n)
      : kind_(std::make_shared<const Kind>(std::move(k))), dim_(n) {}

  // Shared so copies of large products stay cheap; the set is immutable.
  std::shared_ptr<const Kind> kind_;
  std::size_t dim_ = 0;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

// Sum-to-one tolerance under which a nonnegative vector is treated as
// already lying on the simplex. Keeps projection exactly idempotent.
inline constexpr double kSimplexSlack = 1e-12;

inline void project_simplex(std::span<const double> v, std::span<double> out) {
  const std::size_t n = v.size();
  bool nonneg = true;
  double total = 0.0;
  for (double e : v) {
    nonneg = nonneg && e >= 0.0;
    total += e;
  }
  if (nonneg && std::abs(total - 1.0) <= kSimplexSlack) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - tau, 0.0);
}

inline void project_ball(const Ball& b, std::span<const double> v, std::span<double> out) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - b.center[i];
    d2 += d * d;
  }
  const double d = std::sqrt(d2);
  if (d <= b.radius * (1.0 + 4.0 * DBL_EPSILON)) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  const double s = b.radius / d;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = b.center[i] + s * (v[i] - b.center[i]);
}

inline void project_box(const Box& b, std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], b.lo[i], b.hi[i]);
}

inline void project_into(const FeasibleSet& S, std::span<const double> v,
                         std::span<double> out) {
  std::visit(overloaded{
                 [&](const Simplex&) { project_simplex(v, out); },
                 [&](const Ball& b) { project_ball(b, v, out); },
                 [&](const Box& b) { project_box(b, v, out); },
                 [&](const Product& p) {
                   std::size_t off = 0;
                   for (const auto& part : p.parts) {
                     project_into(part, v.subspan(off, part.dim()),
                                  out.subspan(off, part.dim()));
                     off += part.dim();
                   }
                 },
             },
             S.kind());
}

inline void lmo_into(const FeasibleSet& S, std::span<const double> c, std::span<double> out) {
  std::visit(overloaded{
                 [&](const Simplex&) {
                   std::size_t best = 0;
                   for (std::size_t i = 1; i < c.size(); ++i)
                     if (c[i] < c[best]) best = i;
                   std::fill(out.begin(), out.end(), 0.0);
                   out[best] = 1.0;
                 },
                 [&](const Ball& b) {
                   double n2 = 0.0;
                   for (double e : c) n2 += e * e;
                   const double nc = std::sqrt(n2);
                   for (std::size_t i = 0; i < c.size(); ++i)
                     out[i] = nc > 0.0 ? b.center[i] - b.radius * c[i] / nc : b.center[i];
                 },
                 [&](const Box& b) {
                   for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] < 0.0 ? b.hi[i] : b.lo[i];
                 },
                 [&](const Product& p) {
                   std::size_t off = 0;
                   for (const auto& part : p.parts) {
                     lmo_into(part, c.subspan(off, part.dim()), out.subspan(off, part.dim()));
                     off += part.dim();
                   }
                 },
             },
             S.kind());
}

// max_{w in S} <c, point - w>, summed termwise where the set allows so that
// the value is a sum of nonnegative pieces.
inline double lmo_gap(const FeasibleSet& S, std::span<const double> c,
                      std::span<const double> point) {
  return std::visit(
      overloaded{
          [&](const Simplex&) {
            const double cmin = *std::min_element(c.begin(), c.end());
            double g = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) g += point[i] * (c[i] - cmin);
            return g;
          },
          [&](const Ball& b) {
            double n2 = 0.0;
            double inner = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) {
              n2 += c[i] * c[i];
              inner += c[i] * (point[i] - b.center[i]);
            }
            return inner + b.radius * std::sqrt(n2);
          },
          [&](const Box& b) {
            double g = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i)
              g += c[i] < 0.0 ? c[i] * (point[i] - b.hi[i]) : c[i] * (point[i] - b.lo[i]);
            return g;
          },
          [&](const Product& p) {
            double g = 0.0;
            std::size_t off = 0;
            for (const auto& part : p.parts) {
              g += lmo_gap(part, c.subspan(off, part.dim()), point.subspan(off, part.dim()));
              off += part.dim();
            }
            return g;
          },
      },
      S.kind());
}

}  // namespace detail

inline DenseVector project(const FeasibleSet& S, const DenseVector& v) {
  detail::require_dims(v.size(), S.dim(), "project");
  DenseVector out(v.size());
  detail::project_into(S, v.span(), out.span());
  return out;
}

// argmin_{w in S} <c, w>; ties go to the lowest index (simplex) or the
// lower bound (box).
inline DenseVector lmo(const FeasibleSet& S, const DenseVector& c) {
  detail::require_dims(c.size(), S.dim(), "lmo");
  DenseVector out(c.size());
  detail::lmo_into(S, c.span(), out.span());
  return out;
}

// max_{w in S} <c, point - w>. Always >= 0 for feasible `point`.
inline double lmo_gap(const FeasibleSet& S, const DenseVector& c, const DenseVector& point) {
  detail::require_dims(c.size(), S.dim(), "lmo_gap");
  detail::require_dims(point.size(), S.dim(), "lmo_gap point");
  return detail::lmo_gap(S, c.span(), point.span());
}

inline double squared_diameter(const FeasibleSet& S) {
  return std::visit(overloaded{
                        [](const Simplex& s) { return s.dim >= 2 ? 2.0 : 0.0; },
                        [](const Ball& b) { return 4.0 * b.radius * b.radius; },
                        [](const Box& b) { return squared_distance(b.hi, b.lo); },
                        [](const Product& p) {
                          double d2 = 0.0;
                          for (const auto& part : p.parts) d2 += squared_diameter(part);
                          return d2;
                        },
                    },
                    S.kind());
}

inline double diameter(const FeasibleSet& S) { return std::sqrt(squared_diameter(S)); }

inline bool contains(const FeasibleSet& S, const DenseVector& v, double slack = 1e-10) {
  if (v.size() != S.dim()) return false;
  return std::visit(
      overloaded{
          [&](const Simplex&) {
            double total = 0.0;
            for (double e : v) {
              if (e < -slack) return false;
              total += e;
            }
            return std::abs(total - 1.0) <= slack;
          },
          [&](const Ball& b) { return norm(v - b.center) <= b.radius + slack; },
          [&](const Box& b) {
            for (std::size_t i = 0; i < v.size(); ++i)
              if (v[i] < b.lo[i] - slack || v[i] > b.hi[i] + slack) return false;
            return true;
          },
          [&](const Product& p) {
            std::size_t off = 0;
            for (const auto& part : p.parts) {
              DenseVector piece(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(off),
                                                    v.begin() + static_cast<std::ptrdiff_t>(off + part.dim())));
              if (!contains(part, piece, slack)) return false;
              off += part.dim();
            }
            return true;
          },
      },
      S.kind());
}

// Canonical starting point: barycenter, center or midpoint.
inline DenseVector initial_point(const FeasibleSet& S) {
  return std::visit(overloaded{
                        [](const Simplex& s) {
                          return DenseVector(s.dim, 1.0 / static_cast<double>(s.dim));
                        },
                        [](const Ball& b) { return b.center; },
                        [](const Box& b) { return 0.5 * (b.lo + b.hi); },
                        [](const Product& p) {
                          std::vector<double> out;
                          for (const auto& part : p.parts) {
                            const auto piece = initial_point(part);
                            out.insert(out.end(), piece.begin(), piece.end());
                          }
                          return DenseVector(std::move(out));
                        },
                    },
                    S.kind());
}

// Random feasible point. Uniform on simplex (flat Dirichlet), ball and box.
template <class Rng>
DenseVector sample_point(const FeasibleSet& S, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const Simplex& s) {
            std::exponential_distribution<double> ex(1.0);
            DenseVector v(s.dim);
            double total = 0.0;
            for (auto& e : v) total += (e = ex(rng));
            for (auto& e : v) e /= total;
            return v;
          },
          [&](const Ball& b) {
            std::normal_distribution<double> nd(0.0, 1.0);
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            DenseVector dir(b.center.size());
            for (auto& e : dir) e = nd(rng);
            const double r =
                b.radius * std::pow(ud(rng), 1.0 / static_cast<double>(dir.size()));
            const double nd_ = norm(dir);
            DenseVector out = b.center;
            if (nd_ > 0.0) axpy(r / nd_, dir, out);
            return out;
          },
          [&](const Box& b) {
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            DenseVector out(b.lo.size());
            for (std::size_t i = 0; i < out.size(); ++i)
              out[i] = b.lo[i] + ud(rng) * (b.hi[i] - b.lo[i]);
            return out;
          },
          [&](const Product& p) {
            std::vector<double> out;
            for (const auto& part : p.parts) {
              const auto piece = sample_point(part, rng);
              out.insert(out.end(), piece.begin(), piece.end());
            }
            return DenseVector(std::move(out));
          },
      },
      S.kind());
}

}  // namespace nzsg

#endif  // NZSG_SETS_HPP
