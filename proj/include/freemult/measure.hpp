#pragma once

// Positive measures on [0, +inf) (plus symmetric laws on the real line via
// |X|), with tails, moments, pushforwards, sampling and integration of
// kernels against the measure.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace freemult {

class MeasureSpec;

struct Atoms {
  std::vector<double> locations;
  std::vector<double> weights;
};

enum class TailKind { Power, Exponential };

/// Piecewise-linear density through (nodes[i], values[i]), extended past the
/// last node by an analytic tail that is continuous at the last node:
///   Power:       values.back() * (t / nodes.back())^{-(rate + 1)}
///   Exponential: values.back() * exp(-rate * (t - nodes.back()))
/// Values are normalised to unit mass at construction.
struct DensityGrid {
  std::vector<double> nodes;
  std::vector<double> values;
  TailKind tail_kind = TailKind::Power;
  double tail_rate = 1.0;
};

/// Density alpha x^{-alpha-1} on [1, inf).
struct Pareto {
  double alpha;
};

struct PointMass {
  double a;
};

/// Marchenko-Pastur law with rate 1 and scale 1.
struct FreePoisson {};

/// Law defined only through S(w) = (-w)^beta / (1+w)^alpha.
struct MuAlphaBeta {
  double alpha;
  double beta;
};

/// Finite measure with sigma([0, x)) = c * min(x^alpha, d^alpha). Total mass
/// c * d^alpha. alpha = 0 is a single atom of mass c at zero.
struct SigmaMinFamily {
  double c;
  double d;
  double alpha;
};

/// Measure given by x -> mu((x, inf)), assumed nonincreasing.
struct TailFunction {
  std::function<double(double)> tail;
};

/// Symmetric law on the real line; `inner` is the law of |X|.
struct SymmetricWrapper {
  std::shared_ptr<const MeasureSpec> inner;
};

/// Law of X^power for X distributed as `inner` (power is 2 or -1 in practice).
struct Pushforward {
  std::shared_ptr<const MeasureSpec> inner;
  double power;
};

class MeasureSpec {
 public:
  using Variant = std::variant<Atoms, DensityGrid, Pareto, PointMass, FreePoisson, MuAlphaBeta,
                               SigmaMinFamily, TailFunction, SymmetricWrapper, Pushforward>;

  static MeasureSpec atoms(std::vector<double> locations, std::vector<double> weights);
  static MeasureSpec density_grid(std::vector<double> nodes, std::vector<double> values,
                                  TailKind tail_kind, double tail_rate);
  static MeasureSpec pareto(double alpha);
  static MeasureSpec point_mass(double a);
  static MeasureSpec free_poisson();
  static MeasureSpec mu_alpha_beta(double alpha, double beta);
  static MeasureSpec sigma_min(double c, double d, double alpha);
  static MeasureSpec tail_function(std::function<double(double)> tail);
  static MeasureSpec symmetric(MeasureSpec inner);
  static MeasureSpec pushforward(MeasureSpec inner, double power);

  const Variant& variant() const noexcept { return v_; }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

  /// Finite-measure variants (SigmaMinFamily) are not probability measures.
  bool is_probability() const noexcept;
  std::string family() const;

 private:
  explicit MeasureSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Nonnegative real or +infinity.
struct ExtendedMoment {
  double value = 0.0;

  static ExtendedMoment infinite() { return {std::numeric_limits<double>::infinity()}; }
  bool finite() const noexcept { return value < std::numeric_limits<double>::infinity(); }
};

/// Kernel integrated against a measure. `df` is only consulted for
/// TailFunction measures (integration by parts). `scale` is the t-scale at
/// which the kernel changes character (1/|z| for Cauchy-type kernels); it is
/// used as a quadrature breakpoint.
struct Integrand {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double scale = 1.0;
};

double atom_at_zero(const MeasureSpec& mu);
double total_mass(const MeasureSpec& mu);

/// mu((x, inf)).
double tail(const MeasureSpec& mu, double x);

/// Lebesgue density at x for absolutely continuous variants.
double density(const MeasureSpec& mu, double x);

ExtendedMoment moment(const MeasureSpec& mu, double p);

/// Law of 1/X. Requires mu({0}) = 0.
MeasureSpec pushforward_inverse(const MeasureSpec& mu);

/// Law of X^2 for symmetric X.
MeasureSpec symmetric_square(const MeasureSpec& mu);

/// Deterministic in `seed`.
std::vector<double> sample(const MeasureSpec& mu, std::size_t n, std::uint64_t seed);

/// int f dmu over [0, inf).
double integrate(const MeasureSpec& mu, const Integrand& k);

/// splitmix64 finaliser, used to derive independent stream seeds.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace freemult
