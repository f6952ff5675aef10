#pragma once

// Moment transform psi, its inverse chi, and the S-transform on the negative
// real axis. Numeric evaluation goes through quadrature of measure integrals;
// closed forms are available for a few families.

#include <array>
#include <cmath>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "freemult/measure.hpp"

namespace freemult {

/// psi(z) = int z t / (1 - z t) dmu, z < 0.
double psi_eval(const MeasureSpec& mu, double z);

/// k-th derivative of psi at z < 0, 1 <= k <= 4.
double psi_deriv(const MeasureSpec& mu, double z, int k);

/// Unique z < 0 with psi(z) = w, for w in (delta - 1, 0).
double chi_eval(const MeasureSpec& mu, double w);

/// S(w) = (1 + w) / w * chi(w).
double s_eval(const MeasureSpec& mu, double w);

/// S and up to three derivatives at one point; entries past `order` are 0.
using SJet = std::array<double, 4>;

/// Evaluation backend of an STransformHandle. Implementations must be
/// immutable and reentrant.
class SSource {
 public:
  virtual ~SSource() = default;

  /// Lower end delta - 1 of the open domain (lower, 0).
  virtual double lower() const = 0;
  virtual SJet jet(double w, int order) const = 0;
  /// log S(w); overridden where S itself under- or overflows.
  virtual double log_s(double w) const { return std::log(jet(w, 0)[0]); }
  virtual ExtendedMoment m1() const = 0;
  virtual ExtendedMoment m_minus1() const = 0;
  virtual std::string describe() const = 0;
  /// Source of the law of 1/X evaluated without forming -1 - w, when the
  /// backend can provide one; nullptr falls back to 1 / S(-1 - w).
  virtual std::shared_ptr<const SSource> reflected() const { return nullptr; }
};

class STransformHandle {
 public:
  explicit STransformHandle(std::shared_ptr<const SSource> src);

  double lower() const { return src_->lower(); }
  double operator()(double w) const;
  /// S^(p)(w) for 0 <= p <= 3.
  double deriv(double w, int p) const;
  SJet jet(double w, int order) const;
  double log_value(double w) const;

  ExtendedMoment m1() const { return m1_; }
  ExtendedMoment m_minus1() const { return m_minus1_; }
  std::string describe() const { return src_->describe(); }
  const std::shared_ptr<const SSource>& source() const { return src_; }

 private:
  void check_domain(double w) const;

  std::shared_ptr<const SSource> src_;
  ExtendedMoment m1_;
  ExtendedMoment m_minus1_;
};

double s_deriv(const STransformHandle& h, double w, int p);

/// Numeric handle backed by psi inversion. MuAlphaBeta is routed to its
/// closed form since it has no measure-level representation.
STransformHandle s_handle(const MeasureSpec& mu);

struct ClosedFormTag {
  enum class Kind { PointMass, FreePoisson, MuAlphaBeta, SymmetricBernoulli };
  Kind kind = Kind::PointMass;
  double a = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  static ClosedFormTag point_mass(double a);
  static ClosedFormTag free_poisson();
  static ClosedFormTag mu_alpha_beta(double alpha, double beta);
  static ClosedFormTag symmetric_bernoulli();

  /// Names: point_mass (a), free_poisson, mu_alpha_beta (alpha, beta),
  /// symmetric_bernoulli. Unknown names raise UnknownTag.
  static ClosedFormTag from_name(const std::string& name,
                                 const std::map<std::string, double>& params = {});
};

/// S-value of a closed form. For symmetric laws S is purely imaginary on the
/// negative axis; `value` then carries |S| and `imaginary` is set.
struct SValue {
  double value = 0.0;
  bool imaginary = false;
};

SValue closed_form_s(const ClosedFormTag& tag, double w);

/// Handle for a real-valued closed form (not SymmetricBernoulli).
STransformHandle closed_form_handle(const ClosedFormTag& tag);

/// Handle of the law of 1/X: S_hat(w) = 1 / S(-1 - w). Needs domain (-1, 0).
STransformHandle hat(const STransformHandle& h);

/// |S_mu(w)| for a symmetric law, through S_mu(w)^2 = (1 + w)/w * S_{mu^2}(w).
SValue symmetric_s_modulus(const MeasureSpec& mu, double w);

/// Writes "w,S" rows for the given points.
void dump_csv(const STransformHandle& h, std::span<const double> ws, std::ostream& out);

}  // namespace freemult
