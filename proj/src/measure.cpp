#include "freemult/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "freemult/errors.hpp"
#include "freemult/quadrature.hpp"

namespace freemult {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// Uniform on (0, 1), independent of the standard library's distribution code
// so samples are reproducible across toolchains.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

// Density cells of a DensityGrid: [nodes[i], nodes[i+1]] with linear values.
double cell_mass(const DensityGrid& g, std::size_t i) {
  return 0.5 * (g.nodes[i + 1] - g.nodes[i]) * (g.values[i] + g.values[i + 1]);
}

double grid_tail_mass_beyond(const DensityGrid& g, double x) {
  const double tn = g.nodes.back();
  const double vn = g.values.back();
  const double from = std::max(x, tn);
  if (g.tail_kind == TailKind::Power) {
    return vn * tn / g.tail_rate * std::pow(from / tn, -g.tail_rate);
  }
  return vn / g.tail_rate * std::exp(-g.tail_rate * (from - tn));
}

double grid_density(const DensityGrid& g, double x) {
  if (x < g.nodes.front()) return 0.0;
  const double tn = g.nodes.back();
  if (x >= tn) {
    if (g.tail_kind == TailKind::Power) return g.values.back() * std::pow(x / tn, -g.tail_rate - 1.0);
    return g.values.back() * std::exp(-g.tail_rate * (x - tn));
  }
  const auto it = std::upper_bound(g.nodes.begin(), g.nodes.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - g.nodes.begin()) - 1;
  const double a = g.nodes[i], b = g.nodes[i + 1];
  const double u = (x - a) / (b - a);
  return g.values[i] + u * (g.values[i + 1] - g.values[i]);
}

double free_poisson_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  const double th = std::asin(std::sqrt(x / 4.0));
  return 2.0 / std::numbers::pi * (th + std::sin(th) * std::cos(th));
}

// Mass of an atom located exactly at y (atomic variants only).
double atom_mass_at(const MeasureSpec& mu, double y) {
  if (const auto* a = mu.get_if<Atoms>()) {
    double m = 0.0;
    for (std::size_t i = 0; i < a->locations.size(); ++i) {
      if (a->locations[i] == y) m += a->weights[i];
    }
    return m;
  }
  if (const auto* p = mu.get_if<PointMass>()) return p->a == y ? 1.0 : 0.0;
  if (const auto* pf = mu.get_if<Pushforward>()) {
    if (y <= 0.0) return 0.0;
    return atom_mass_at(*pf->inner, std::pow(y, 1.0 / pf->power));
  }
  return 0.0;
}

// int_{lo}^{hi} f(e^s) weight(s) ds with a breakpoint at log(scale).
quad::Result integrate_log_space(const std::function<double(double)>& f,
                                 const std::function<double(double)>& weight, double s_lo,
                                 double s_hi, double scale) {
  auto g = [&](double s) {
    const double t = std::exp(s);
    if (!std::isfinite(t)) return 0.0;
    const double wv = weight(s);
    if (wv == 0.0) return 0.0;
    return f(t) * wv;
  };
  std::vector<double> cuts{s_lo};
  if (scale > 0.0 && std::isfinite(scale)) {
    const double sb = std::log(scale);
    if (sb > s_lo && sb < s_hi) cuts.push_back(sb);
  }
  cuts.push_back(s_hi);
  return quad::integrate_pieces(g, cuts);
}

quad::Result integrate_grid(const DensityGrid& g, const Integrand& k) {
  quad::Result total;
  auto add = [&](const quad::Result& r) {
    total.value += r.value;
    total.error += r.error;
    total.l1 += r.l1;
  };
  for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
    const double a = g.nodes[i], b = g.nodes[i + 1];
    const double va = g.values[i], vb = g.values[i + 1];
    if (va == 0.0 && vb == 0.0) continue;
    auto h = [&, a, b, va, vb](double t) {
      return k.f(t) * (va + (vb - va) * (t - a) / (b - a));
    };
    std::vector<double> cuts{a};
    if (k.scale > a && k.scale < b) cuts.push_back(k.scale);
    cuts.push_back(b);
    add(quad::integrate_pieces(h, cuts));
  }
  const double tn = g.nodes.back();
  const double vn = g.values.back();
  if (vn > 0.0) {
    if (g.tail_kind == TailKind::Power) {
      const double sn = std::log(tn);
      const double beta = g.tail_rate;
      auto w = [=](double s) { return vn * tn * std::exp(-beta * (s - sn)); };
      add(integrate_log_space(k.f, w, sn, kInf, k.scale));
    } else {
      const double lam = g.tail_rate;
      auto h = [&, lam, tn, vn](double u) { return k.f(tn + u) * vn * std::exp(-lam * u); };
      std::vector<double> cuts{0.0};
      if (k.scale > tn) cuts.push_back(k.scale - tn);
      cuts.push_back(kInf);
      add(quad::integrate_pieces(h, cuts));
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

MeasureSpec MeasureSpec::atoms(std::vector<double> locations, std::vector<double> weights) {
  require(!locations.empty() && locations.size() == weights.size(),
          "atoms: locations and weights must be nonempty and of equal length");
  for (std::size_t i = 0; i < locations.size(); ++i) {
    require(std::isfinite(locations[i]) && locations[i] >= 0.0, "atoms: location must be >= 0");
    require(positive_finite(weights[i]), "atoms: weight must be > 0");
  }
  return MeasureSpec(Atoms{std::move(locations), std::move(weights)});
}

MeasureSpec MeasureSpec::density_grid(std::vector<double> nodes, std::vector<double> values,
                                      TailKind tail_kind, double tail_rate) {
  require(nodes.size() >= 2 && nodes.size() == values.size(),
          "density_grid: need >= 2 nodes with matching values");
  require(nodes.front() >= 0.0, "density_grid: nodes must be >= 0");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require(std::isfinite(nodes[i]) && std::isfinite(values[i]) && values[i] >= 0.0,
            "density_grid: values must be finite and >= 0");
    if (i > 0) require(nodes[i] > nodes[i - 1], "density_grid: nodes must increase");
  }
  require(positive_finite(tail_rate), "density_grid: tail rate must be > 0");
  require(nodes.back() > 0.0, "density_grid: last node must be > 0");
  DensityGrid g{std::move(nodes), std::move(values), tail_kind, tail_rate};
  double mass = grid_tail_mass_beyond(g, g.nodes.back());
  for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) mass += cell_mass(g, i);
  require(positive_finite(mass), "density_grid: total mass must be positive");
  for (double& v : g.values) v /= mass;
  return MeasureSpec(std::move(g));
}

MeasureSpec MeasureSpec::pareto(double alpha) {
  require(positive_finite(alpha), "pareto: alpha must be > 0");
  return MeasureSpec(Pareto{alpha});
}

MeasureSpec MeasureSpec::point_mass(double a) {
  require(positive_finite(a), "point_mass: location must be > 0");
  return MeasureSpec(PointMass{a});
}

MeasureSpec MeasureSpec::free_poisson() { return MeasureSpec(FreePoisson{}); }

MeasureSpec MeasureSpec::mu_alpha_beta(double alpha, double beta) {
  require(std::isfinite(alpha) && alpha >= 0.0 && std::isfinite(beta) && beta >= 0.0,
          "mu_alpha_beta: alpha, beta must be >= 0");
  return MeasureSpec(MuAlphaBeta{alpha, beta});
}

MeasureSpec MeasureSpec::sigma_min(double c, double d, double alpha) {
  require(positive_finite(c) && positive_finite(d), "sigma_min: c, d must be > 0");
  require(std::isfinite(alpha) && alpha >= 0.0, "sigma_min: alpha must be >= 0");
  return MeasureSpec(SigmaMinFamily{c, d, alpha});
}

MeasureSpec MeasureSpec::tail_function(std::function<double(double)> tail_fn) {
  require(static_cast<bool>(tail_fn), "tail_function: empty callable");
  return MeasureSpec(TailFunction{std::move(tail_fn)});
}

MeasureSpec MeasureSpec::symmetric(MeasureSpec inner) {
  require(inner.is_probability() && !inner.get_if<SymmetricWrapper>() &&
              !inner.get_if<MuAlphaBeta>(),
          "symmetric: inner law must be an explicit probability measure on [0, inf)");
  return MeasureSpec(SymmetricWrapper{std::make_shared<const MeasureSpec>(std::move(inner))});
}

MeasureSpec MeasureSpec::pushforward(MeasureSpec inner, double power) {
  require(std::isfinite(power) && power != 0.0, "pushforward: power must be nonzero");
  require(!inner.get_if<SymmetricWrapper>() && !inner.get_if<MuAlphaBeta>(),
          "pushforward: inner law must be explicit on [0, inf)");
  if (power < 0.0 && atom_at_zero(inner) > 0.0) {
    throw Error(ErrorCode::AtomAtZero, "pushforward with negative power needs mu({0}) = 0");
  }
  return MeasureSpec(Pushforward{std::make_shared<const MeasureSpec>(std::move(inner)), power});
}

bool MeasureSpec::is_probability() const noexcept {
  return std::visit(Overloaded{
                        [](const Atoms& a) {
                          const double s = std::accumulate(a.weights.begin(), a.weights.end(), 0.0);
                          return std::abs(s - 1.0) <= 1e-9;
                        },
                        [](const SigmaMinFamily&) { return false; },
                        [](const Pushforward& p) { return p.inner->is_probability(); },
                        [](const auto&) { return true; },
                    },
                    v_);
}

std::string MeasureSpec::family() const {
  return std::visit(Overloaded{
                        [](const Atoms&) { return std::string("atoms"); },
                        [](const DensityGrid&) { return std::string("density_grid"); },
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const PointMass&) { return std::string("point_mass"); },
                        [](const FreePoisson&) { return std::string("free_poisson"); },
                        [](const MuAlphaBeta&) { return std::string("mu_alpha_beta"); },
                        [](const SigmaMinFamily&) { return std::string("sigma_min"); },
                        [](const TailFunction&) { return std::string("tail_function"); },
                        [](const SymmetricWrapper&) { return std::string("symmetric"); },
                        [](const Pushforward&) { return std::string("pushforward"); },
                    },
                    v_);
}

// ---------------------------------------------------------------------------
// Queries

double atom_at_zero(const MeasureSpec& mu) {
  return std::visit(Overloaded{
                        [](const Atoms& a) {
                          double m = 0.0;
                          for (std::size_t i = 0; i < a.locations.size(); ++i) {
                            if (a.locations[i] == 0.0) m += a.weights[i];
                          }
                          return m;
                        },
                        [](const SigmaMinFamily& s) { return s.alpha == 0.0 ? s.c : 0.0; },
                        [](const TailFunction& t) { return 1.0 - t.tail(0.0); },
                        [](const SymmetricWrapper& s) { return atom_at_zero(*s.inner); },
                        [](const Pushforward& p) {
                          return p.power > 0.0 ? atom_at_zero(*p.inner) : 0.0;
                        },
                        [](const auto&) { return 0.0; },
                    },
                    mu.variant());
}

double total_mass(const MeasureSpec& mu) {
  if (const auto* a = mu.get_if<Atoms>()) {
    return std::accumulate(a->weights.begin(), a->weights.end(), 0.0);
  }
  if (const auto* s = mu.get_if<SigmaMinFamily>()) return s->c * std::pow(s->d, s->alpha);
  if (const auto* p = mu.get_if<Pushforward>()) return total_mass(*p->inner);
  return 1.0;
}

double tail(const MeasureSpec& mu, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::OutOfRange, "tail: x must be >= 0");
  return std::visit(
      Overloaded{
          [x](const Atoms& a) {
            double m = 0.0;
            for (std::size_t i = 0; i < a.locations.size(); ++i) {
              if (a.locations[i] > x) m += a.weights[i];
            }
            return m;
          },
          [x](const DensityGrid& g) {
            double m = grid_tail_mass_beyond(g, x);
            for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
              const double a = g.nodes[i], b = g.nodes[i + 1];
              if (b <= x) continue;
              if (a >= x) {
                m += cell_mass(g, i);
              } else {
                m += 0.5 * (b - x) * (grid_density(g, x) + g.values[i + 1]);
              }
            }
            return m;
          },
          [x](const Pareto& p) { return x < 1.0 ? 1.0 : std::pow(x, -p.alpha); },
          [x](const PointMass& p) { return x < p.a ? 1.0 : 0.0; },
          [x](const FreePoisson&) { return 1.0 - free_poisson_cdf(x); },
          [](const MuAlphaBeta&) -> double {
            throw Error(ErrorCode::NotAvailable, "tail: mu_alpha_beta has no explicit CDF");
          },
          [x](const SigmaMinFamily& s) {
            if (s.alpha == 0.0) return 0.0;
            return s.c * (std::pow(s.d, s.alpha) - std::pow(std::min(x, s.d), s.alpha));
          },
          [x](const TailFunction& t) { return t.tail(x); },
          [x](const SymmetricWrapper& s) { return 0.5 * tail(*s.inner, x); },
          [x](const Pushforward& p) {
            const MeasureSpec& in = *p.inner;
            if (p.power > 0.0) return tail(in, std::pow(x, 1.0 / p.power));
            if (x == 0.0) return total_mass(in);
            const double y = std::pow(x, 1.0 / p.power);
            return std::max(0.0, total_mass(in) - tail(in, y) - atom_mass_at(in, y));
          },
      },
      mu.variant());
}

double density(const MeasureSpec& mu, double x) {
  return std::visit(
      Overloaded{
          [x](const DensityGrid& g) { return grid_density(g, x); },
          [x](const Pareto& p) { return x < 1.0 ? 0.0 : p.alpha * std::pow(x, -p.alpha - 1.0); },
          [x](const FreePoisson&) {
            if (x <= 0.0 || x >= 4.0) return 0.0;
            return std::sqrt(x * (4.0 - x)) / (2.0 * std::numbers::pi * x);
          },
          [x](const SigmaMinFamily& s) -> double {
            if (s.alpha == 0.0) throw Error(ErrorCode::NotAvailable, "density: atomic measure");
            if (x <= 0.0 || x >= s.d) return 0.0;
            return s.c * s.alpha * std::pow(x, s.alpha - 1.0);
          },
          [x](const SymmetricWrapper& s) { return 0.5 * density(*s.inner, std::abs(x)); },
          [x](const Pushforward& p) {
            if (x <= 0.0) return 0.0;
            const double r = 1.0 / p.power;
            return density(*p.inner, std::pow(x, r)) * std::abs(r) * std::pow(x, r - 1.0);
          },
          [&mu](const auto&) -> double {
            throw Error(ErrorCode::NotAvailable, "density: not absolutely continuous: " + mu.family());
          },
      },
      mu.variant());
}

namespace {

ExtendedMoment tail_function_moment(const TailFunction& tf, double p) {
  constexpr double kCut = 1e-14;
  constexpr double kDecade = 2.302585092994046;
  if (p > 0.0) {
    // p * int t^{p-1} tail(t) dt = p * int e^{ps} tail(e^s) ds
    auto g = [&](double s) { return p * std::exp(p * s) * tf.tail(std::exp(s)); };
    quad::Result r = quad::integrate(g, -kInf, -30.0 * kDecade);
    double lo = -30.0 * kDecade;
    for (int k = -29;; ++k) {
      const double hi = k * kDecade;
      const quad::Result piece = quad::integrate(g, lo, hi);
      r.value += piece.value;
      r.error += piece.error;
      r.l1 += piece.l1;
      lo = hi;
      if (tf.tail(std::exp(hi)) < kCut) break;
      if (k > 300) return ExtendedMoment::infinite();
    }
    quad::check(r, "moment(tail_function)");
    return {r.value};
  }
  const double delta = 1.0 - tf.tail(0.0);
  if (delta > 0.0) return ExtendedMoment::infinite();
  // |p| * int t^{p-1} mu((0, t]) dt
  const double q = -p;
  auto g = [&](double s) { return q * std::exp(p * s) * (1.0 - tf.tail(std::exp(s))); };
  quad::Result r = quad::integrate(g, 30.0 * kDecade, kInf);
  double hi = 30.0 * kDecade;
  for (int k = 29;; --k) {
    const double lo = k * kDecade;
    const quad::Result piece = quad::integrate(g, lo, hi);
    r.value += piece.value;
    r.error += piece.error;
    r.l1 += piece.l1;
    hi = lo;
    if (1.0 - tf.tail(std::exp(lo)) < kCut) break;
    if (k < -300) return ExtendedMoment::infinite();
  }
  quad::check(r, "moment(tail_function)");
  return {r.value};
}

}  // namespace

ExtendedMoment moment(const MeasureSpec& mu, double p) {
  if (!std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "moment: p must be finite");
  if (p == 0.0) return {total_mass(mu)};
  return std::visit(
      Overloaded{
          [p](const Atoms& a) -> ExtendedMoment {
            double m = 0.0;
            for (std::size_t i = 0; i < a.locations.size(); ++i) {
              if (a.locations[i] == 0.0) {
                if (p < 0.0) return ExtendedMoment::infinite();
                continue;
              }
              m += a.weights[i] * std::pow(a.locations[i], p);
            }
            return {m};
          },
          [p, &mu](const DensityGrid& g) -> ExtendedMoment {
            if (g.tail_kind == TailKind::Power && p >= g.tail_rate) return ExtendedMoment::infinite();
            if (g.nodes.front() == 0.0 && p < 0.0) {
              if (g.values.front() > 0.0 && p <= -1.0) return ExtendedMoment::infinite();
              if (p <= -2.0) return ExtendedMoment::infinite();
            }
            const quad::Result r = integrate_grid(g, Integrand{[p](double t) {
              return t == 0.0 ? 0.0 : std::pow(t, p);
            }, {}, 1.0});
            quad::check(r, "moment(density_grid)");
            (void)mu;
            return {r.value};
          },
          [p](const Pareto& par) -> ExtendedMoment {
            if (p >= par.alpha) return ExtendedMoment::infinite();
            return {par.alpha / (par.alpha - p)};
          },
          [p](const PointMass& pm) -> ExtendedMoment { return {std::pow(pm.a, p)}; },
          [p](const FreePoisson&) -> ExtendedMoment {
            if (p <= -0.5) return ExtendedMoment::infinite();
            return {std::pow(4.0, p + 1.0) / std::numbers::pi * 0.5 * std::beta(p + 0.5, 1.5)};
          },
          [p](const MuAlphaBeta& m) -> ExtendedMoment {
            // Only what the S-transform range and tail indices decide.
            if (p > 0.0) {
              if (m.beta > 0.0 && p >= 1.0 / (m.beta + 1.0)) return ExtendedMoment::infinite();
              if (m.beta == 0.0 && p == 1.0) return {1.0};
            } else {
              if (m.alpha > 0.0 && -p >= 1.0 / (m.alpha + 1.0)) return ExtendedMoment::infinite();
              if (m.alpha == 0.0 && p == -1.0) return {1.0};
            }
            throw Error(ErrorCode::NotAvailable, "moment: mu_alpha_beta moment not known in closed form");
          },
          [p](const SigmaMinFamily& s) -> ExtendedMoment {
            if (s.alpha == 0.0) {
              if (p < 0.0) return ExtendedMoment::infinite();
              return {0.0};
            }
            if (p + s.alpha <= 0.0) return ExtendedMoment::infinite();
            return {s.c * s.alpha * std::pow(s.d, p + s.alpha) / (p + s.alpha)};
          },
          [p](const TailFunction& tf) { return tail_function_moment(tf, p); },
          [p](const SymmetricWrapper& s) { return moment(*s.inner, p); },
          [p](const Pushforward& pf) { return moment(*pf.inner, p * pf.power); },
      },
      mu.variant());
}

MeasureSpec pushforward_inverse(const MeasureSpec& mu) {
  if (mu.get_if<SymmetricWrapper>()) {
    throw Error(ErrorCode::InvalidArgument, "pushforward_inverse: measure must live on [0, inf)");
  }
  if (const auto* m = mu.get_if<MuAlphaBeta>()) {
    // S_hat(w) = 1/S(-1-w) swaps the two exponents.
    return MeasureSpec::mu_alpha_beta(m->beta, m->alpha);
  }
  if (atom_at_zero(mu) > 0.0) {
    throw Error(ErrorCode::AtomAtZero, "pushforward_inverse: mu({0}) > 0");
  }
  if (const auto* a = mu.get_if<Atoms>()) {
    std::vector<double> loc(a->locations.size());
    std::transform(a->locations.begin(), a->locations.end(), loc.begin(),
                   [](double x) { return 1.0 / x; });
    return MeasureSpec::atoms(std::move(loc), a->weights);
  }
  if (const auto* p = mu.get_if<PointMass>()) return MeasureSpec::point_mass(1.0 / p->a);
  if (const auto* pf = mu.get_if<Pushforward>()) {
    if (pf->power == -1.0) return *pf->inner;
    return MeasureSpec::pushforward(*pf->inner, -pf->power);
  }
  return MeasureSpec::pushforward(mu, -1.0);
}

MeasureSpec symmetric_square(const MeasureSpec& mu) {
  const auto* s = mu.get_if<SymmetricWrapper>();
  if (!s) throw Error(ErrorCode::InvalidArgument, "symmetric_square: expects a symmetric wrapper");
  const MeasureSpec& in = *s->inner;
  if (const auto* p = in.get_if<PointMass>()) return MeasureSpec::point_mass(p->a * p->a);
  if (const auto* a = in.get_if<Atoms>()) {
    std::vector<double> loc(a->locations.size());
    std::transform(a->locations.begin(), a->locations.end(), loc.begin(),
                   [](double x) { return x * x; });
    return MeasureSpec::atoms(std::move(loc), a->weights);
  }
  if (const auto* par = in.get_if<Pareto>()) return MeasureSpec::pareto(par->alpha / 2.0);
  return MeasureSpec::pushforward(in, 2.0);
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void sample_into(const MeasureSpec& mu, std::vector<double>& out, Uniform& u) {
  std::visit(
      Overloaded{
          [&](const Atoms& a) {
            std::vector<double> cum(a.weights.size());
            std::partial_sum(a.weights.begin(), a.weights.end(), cum.begin());
            for (double& x : out) {
              const double r = u() * cum.back();
              const auto it = std::upper_bound(cum.begin(), cum.end(), r);
              const std::size_t i = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
              x = a.locations[i];
            }
          },
          [&](const DensityGrid& g) {
            const std::size_t cells = g.nodes.size() - 1;
            std::vector<double> cum(cells);
            double acc = 0.0;
            for (std::size_t i = 0; i < cells; ++i) cum[i] = (acc += cell_mass(g, i));
            const double tail_mass = grid_tail_mass_beyond(g, g.nodes.back());
            for (double& x : out) {
              const double r = u();
              if (r < acc) {
                const auto it = std::upper_bound(cum.begin(), cum.end(), r);
                const std::size_t i = std::min<std::size_t>(it - cum.begin(), cells - 1);
                const double lo = i == 0 ? 0.0 : cum[i - 1];
                const double m = cum[i] - lo;
                const double frac = m > 0.0 ? (r - lo) / m : 0.5;
                x = g.nodes[i] + frac * (g.nodes[i + 1] - g.nodes[i]);
              } else {
                const double q = std::clamp((r - acc) / tail_mass, 0.0, 1.0 - 1e-16);
                const double tn = g.nodes.back();
                x = g.tail_kind == TailKind::Power ? tn * std::pow(1.0 - q, -1.0 / g.tail_rate)
                                                   : tn - std::log1p(-q) / g.tail_rate;
              }
            }
          },
          [&](const Pareto& p) {
            for (double& x : out) x = std::pow(u(), -1.0 / p.alpha);
          },
          [&](const PointMass& p) { std::fill(out.begin(), out.end(), p.a); },
          [&](const FreePoisson&) {
            // Invert F(theta) = (2/pi)(theta + sin theta cos theta), x = 4 sin^2 theta.
            for (double& x : out) {
              const double r = u();
              double lo = 0.0, hi = std::numbers::pi / 2.0;
              for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double f = 2.0 / std::numbers::pi * (mid + std::sin(mid) * std::cos(mid));
                (f < r ? lo : hi) = mid;
              }
              const double s = std::sin(0.5 * (lo + hi));
              x = 4.0 * s * s;
            }
          },
          [&](const SymmetricWrapper& s) {
            sample_into(*s.inner, out, u);
            for (double& x : out) {
              if (u() < 0.5) x = -x;
            }
          },
          [&](const Pushforward& p) {
            sample_into(*p.inner, out, u);
            for (double& x : out) x = std::pow(x, p.power);
          },
          [&](const auto&) {
            throw Error(ErrorCode::NotAvailable, "sample: no sampler for " + mu.family());
          },
      },
      mu.variant());
}

}  // namespace

std::vector<double> sample(const MeasureSpec& mu, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  Uniform u(split_seed(seed, 0));
  sample_into(mu, out, u);
  return out;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

quad::Result integrate_impl(const MeasureSpec& mu, const Integrand& k) {
  return std::visit(
      Overloaded{
          [&](const Atoms& a) {
            quad::Result r;
            for (std::size_t i = 0; i < a.locations.size(); ++i) {
              r.value += a.weights[i] * k.f(a.locations[i]);
            }
            r.l1 = std::abs(r.value);
            return r;
          },
          [&](const DensityGrid& g) { return integrate_grid(g, k); },
          [&](const Pareto& p) {
            const double al = p.alpha;
            return integrate_log_space(k.f, [al](double s) { return al * std::exp(-al * s); }, 0.0,
                                       kInf, k.scale);
          },
          [&](const PointMass& p) {
            const double v = k.f(p.a);
            return quad::Result{v, 0.0, std::abs(v)};
          },
          [&](const FreePoisson&) {
            // t = 4 sin^2(theta) turns the density into (4/pi) cos^2(theta) on [0, pi/2].
            auto h = [&](double th) {
              const double s = std::sin(th), c = std::cos(th);
              return k.f(4.0 * s * s) * (4.0 / std::numbers::pi) * c * c;
            };
            std::vector<double> cuts{0.0};
            if (k.scale > 0.0 && k.scale < 4.0) cuts.push_back(std::asin(std::sqrt(k.scale / 4.0)));
            cuts.push_back(std::numbers::pi / 2.0);
            return quad::integrate_pieces(h, cuts);
          },
          [&](const MuAlphaBeta&) -> quad::Result {
            throw Error(ErrorCode::NotAvailable, "integrate: mu_alpha_beta is defined only through S");
          },
          [&](const SigmaMinFamily& s) {
            if (s.alpha == 0.0) {
              const double v = s.c * k.f(0.0);
              return quad::Result{v, 0.0, std::abs(v)};
            }
            const double ca = s.c * s.alpha, al = s.alpha;
            return integrate_log_space(k.f, [ca, al](double x) { return ca * std::exp(al * x); },
                                       -kInf, std::log(s.d), k.scale);
          },
          [&](const TailFunction& tf) {
            if (!k.df) {
              throw Error(ErrorCode::NotAvailable, "integrate: tail_function needs the kernel derivative");
            }
            // int f dmu = f(0) + int f'(t) tail(t) dt
            auto w = [&](double s) { return tf.tail(std::exp(s)) * std::exp(s); };
            quad::Result r = integrate_log_space(k.df, w, -kInf, kInf, k.scale);
            r.value += k.f(0.0);
            r.l1 += std::abs(k.f(0.0));
            return r;
          },
          [&](const SymmetricWrapper& s) {
            Integrand even{[&](double t) { return 0.5 * (k.f(t) + k.f(-t)); },
                           k.df ? std::function<double(double)>(
                                      [&](double t) { return 0.5 * (k.df(t) - k.df(-t)); })
                                : std::function<double(double)>{},
                           k.scale};
            return integrate_impl(*s.inner, even);
          },
          [&](const Pushforward& p) {
            const double r = p.power;
            Integrand moved{[&, r](double t) { return k.f(std::pow(t, r)); },
                            k.df ? std::function<double(double)>([&, r](double t) {
                              return k.df(std::pow(t, r)) * r * std::pow(t, r - 1.0);
                            })
                                 : std::function<double(double)>{},
                            std::pow(k.scale, 1.0 / r)};
            return integrate_impl(*p.inner, moved);
          },
      },
      mu.variant());
}

}  // namespace

double integrate(const MeasureSpec& mu, const Integrand& k) {
  const quad::Result r = integrate_impl(mu, k);
  quad::check(r, "integrate");
  return r.value;
}

}  // namespace freemult
