#include "freemult/transforms.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "freemult/errors.hpp"

namespace freemult {

namespace {

// Moments of the Cauchy-type kernel: int g^j u^m dmu with u = 1/(1 - z t),
// g = t u. Writing the integrand this way keeps it bounded for large t.
double kernel(const MeasureSpec& mu, double z, int j, int m) {
  auto f = [z, j, m](double t) {
    const double u = 1.0 / (1.0 - z * t);
    return std::pow(t * u, j) * std::pow(u, m);
  };
  auto df = [z, j, m](double t) {
    const double u = 1.0 / (1.0 - z * t);
    const double g = t * u;
    double d = 0.0;
    if (j > 0) d += j * std::pow(g, j - 1) * std::pow(u, m + 2);
    if (m > 0) d += m * z * std::pow(g, j) * std::pow(u, m + 1);
    return d;
  };
  return integrate(mu, Integrand{f, df, 1.0 / -z});
}

// phi(z) = int t / (1 - z t) dmu, so that psi(z) = z phi(z).
double phi(const MeasureSpec& mu, double z) { return kernel(mu, z, 1, 0); }

// Variance of t / (1 - z t) under mu, taken around its mean phi.
double kernel_variance(const MeasureSpec& mu, double z, double ph) {
  auto f = [z, ph](double t) {
    const double d = t / (1.0 - z * t) - ph;
    return d * d;
  };
  auto df = [z, ph](double t) {
    const double u = 1.0 / (1.0 - z * t);
    return 2.0 * (t * u - ph) * u * u;
  };
  return integrate(mu, Integrand{f, df, 1.0 / -z});
}

void require_probability(const MeasureSpec& mu) {
  if (!mu.is_probability() || mu.get_if<SymmetricWrapper>() || mu.get_if<MuAlphaBeta>()) {
    throw Error(ErrorCode::InvalidArgument,
                "expected an explicit probability measure on [0, inf), got " + mu.family());
  }
}

void require_negative(double z) {
  if (!(z < 0.0) || !std::isfinite(z)) throw Error(ErrorCode::OutOfRange, "z must be < 0");
}

void require_w(double w, double lower) {
  if (!(w > lower && w < 0.0)) {
    throw Error(ErrorCode::OutOfRange, "w = " + std::to_string(w) + " outside (" +
                                           std::to_string(lower) + ", 0)");
  }
}

ExtendedMoment handle_moment(const MeasureSpec& mu, double p) {
  const ExtendedMoment m = moment(mu, p);
  return m.value > 1e12 ? ExtendedMoment::infinite() : m;
}

class NumericSource final : public SSource {
 public:
  explicit NumericSource(MeasureSpec mu) : mu_(std::move(mu)), lower_(atom_at_zero(mu_) - 1.0) {}

  double lower() const override { return lower_; }

  SJet jet(double w, int order) const override {
    SJet out{};
    const double z = chi_eval(mu_, w);
    const double ph = phi(mu_, z);
    out[0] = (1.0 + w) / ph;
    if (order < 1) return out;

    const double psi1 = kernel(mu_, z, 1, 1);
    const double chi1 = 1.0 / psi1;
    // 1 + H' with H = 1/phi; equals -Var/phi^2.
    const double h1p = -kernel_variance(mu_, z, ph) / (ph * ph);
    out[1] = chi1 * h1p;
    if (order < 2) return out;

    const double phi1 = kernel(mu_, z, 2, 0);
    const double phi2 = 2.0 * kernel(mu_, z, 3, 0);
    const double psi2 = 2.0 * kernel(mu_, z, 2, 1);
    const double chi2 = -psi2 * chi1 * chi1 * chi1;
    const double p2 = ph * ph, p3 = p2 * ph;
    const double h2 = -phi2 / p2 + 2.0 * phi1 * phi1 / p3;
    out[2] = chi2 * h1p + h2 * chi1 * chi1;
    if (order < 3) return out;

    const double phi3 = 6.0 * kernel(mu_, z, 4, 0);
    const double psi3 = 6.0 * kernel(mu_, z, 3, 1);
    const double chi3 = -(psi3 * chi1 * chi1 * chi1 + 3.0 * psi2 * chi1 * chi2) * chi1;
    const double h3 = -phi3 / p2 + 6.0 * phi1 * phi2 / p3 - 6.0 * phi1 * phi1 * phi1 / (p3 * ph);
    out[3] = chi3 * h1p + 3.0 * h2 * chi1 * chi2 + h3 * chi1 * chi1 * chi1;
    return out;
  }

  ExtendedMoment m1() const override { return handle_moment(mu_, 1.0); }
  ExtendedMoment m_minus1() const override {
    if (lower_ > -1.0) return ExtendedMoment::infinite();
    return handle_moment(mu_, -1.0);
  }
  std::string describe() const override { return "numeric:" + mu_.family(); }
  std::shared_ptr<const SSource> reflected() const override {
    if (lower_ > -1.0) return nullptr;
    return std::make_shared<NumericSource>(pushforward_inverse(mu_));
  }

 private:
  MeasureSpec mu_;
  double lower_;
};

// Falling factorial r (r-1) ... (r-k+1).
double falling(double r, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= r - i;
  return out;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

class ClosedSource final : public SSource {
 public:
  explicit ClosedSource(ClosedFormTag tag) : tag_(tag) {}

  double lower() const override { return -1.0; }

  SJet jet(double w, int order) const override {
    SJet out{};
    switch (tag_.kind) {
      case ClosedFormTag::Kind::PointMass:
        out[0] = 1.0 / tag_.a;
        break;
      case ClosedFormTag::Kind::FreePoisson:
        for (int p = 0; p <= order; ++p) {
          out[p] = (p % 2 ? -1.0 : 1.0) * factorial(p) / std::pow(1.0 + w, p + 1);
        }
        break;
      case ClosedFormTag::Kind::MuAlphaBeta: {
        // Leibniz on f(w) = (-w)^beta and g(w) = (1 + w)^(-alpha).
        const double a = tag_.alpha, b = tag_.beta;
        std::array<double, 4> f{}, g{};
        for (int k = 0; k <= order; ++k) {
          const double fb = falling(b, k);
          f[k] = fb == 0.0 ? 0.0 : (k % 2 ? -1.0 : 1.0) * fb * std::pow(-w, b - k);
          const double ga = falling(-a, k);
          g[k] = ga == 0.0 ? 0.0 : ga * std::pow(1.0 + w, -a - k);
        }
        constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        for (int p = 0; p <= order; ++p) {
          for (int k = 0; k <= p; ++k) out[p] += binom[p][k] * f[k] * g[p - k];
        }
        break;
      }
      case ClosedFormTag::Kind::SymmetricBernoulli:
        throw Error(ErrorCode::InvalidArgument, "symmetric_bernoulli has no real S-transform");
    }
    return out;
  }

  ExtendedMoment m1() const override {
    switch (tag_.kind) {
      case ClosedFormTag::Kind::PointMass:
        return {tag_.a};
      case ClosedFormTag::Kind::MuAlphaBeta:
        return tag_.beta > 0.0 ? ExtendedMoment::infinite() : ExtendedMoment{1.0};
      default:
        return {1.0};
    }
  }

  ExtendedMoment m_minus1() const override {
    switch (tag_.kind) {
      case ClosedFormTag::Kind::PointMass:
        return {1.0 / tag_.a};
      case ClosedFormTag::Kind::MuAlphaBeta:
        return tag_.alpha > 0.0 ? ExtendedMoment::infinite() : ExtendedMoment{1.0};
      default:
        return ExtendedMoment::infinite();
    }
  }

  std::shared_ptr<const SSource> reflected() const override {
    switch (tag_.kind) {
      case ClosedFormTag::Kind::PointMass:
        return std::make_shared<ClosedSource>(ClosedFormTag::point_mass(1.0 / tag_.a));
      case ClosedFormTag::Kind::FreePoisson:
        // S = 1/(1+w) is mu_{1,0}; its reflection is mu_{0,1}.
        return std::make_shared<ClosedSource>(ClosedFormTag::mu_alpha_beta(0.0, 1.0));
      case ClosedFormTag::Kind::MuAlphaBeta:
        return std::make_shared<ClosedSource>(ClosedFormTag::mu_alpha_beta(tag_.beta, tag_.alpha));
      default:
        return nullptr;
    }
  }

  std::string describe() const override {
    switch (tag_.kind) {
      case ClosedFormTag::Kind::PointMass:
        return "closed:point_mass";
      case ClosedFormTag::Kind::FreePoisson:
        return "closed:free_poisson";
      case ClosedFormTag::Kind::MuAlphaBeta:
        return "closed:mu_alpha_beta";
      default:
        return "closed:symmetric_bernoulli";
    }
  }

 private:
  ClosedFormTag tag_;
};

class HatSource final : public SSource {
 public:
  explicit HatSource(STransformHandle inner) : inner_(std::move(inner)) {}

  double lower() const override { return -1.0; }

  SJet jet(double w, int order) const override {
    const SJet s = inner_.jet(-1.0 - w, order);
    const double s0 = s[0], s2 = s0 * s0, s3 = s2 * s0;
    SJet out{};
    out[0] = 1.0 / s0;
    if (order >= 1) out[1] = s[1] / s2;
    if (order >= 2) out[2] = -(s[2] / s2 - 2.0 * s[1] * s[1] / s3);
    if (order >= 3) {
      out[3] = s[3] / s2 - 6.0 * s[1] * s[2] / s3 + 6.0 * s[1] * s[1] * s[1] / (s3 * s0);
    }
    return out;
  }

  double log_s(double w) const override { return -inner_.log_value(-1.0 - w); }

  ExtendedMoment m1() const override { return inner_.m_minus1(); }
  ExtendedMoment m_minus1() const override { return inner_.m1(); }
  std::string describe() const override { return "hat(" + inner_.describe() + ")"; }
  const STransformHandle& inner() const { return inner_; }

 private:
  STransformHandle inner_;
};

}  // namespace

double psi_eval(const MeasureSpec& mu, double z) {
  require_probability(mu);
  require_negative(z);
  return z * phi(mu, z);
}

double psi_deriv(const MeasureSpec& mu, double z, int k) {
  require_probability(mu);
  require_negative(z);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "psi_deriv: order must be >= 1");
  if (k > 4) throw Error(ErrorCode::OrderTooHigh, "psi_deriv: order must be <= 4");
  return factorial(k) * kernel(mu, z, k, 1);
}

double chi_eval(const MeasureSpec& mu, double w) {
  require_probability(mu);
  require_w(w, atom_at_zero(mu) - 1.0);
  // With z = -e^y, log(-psi(z)) = y + log phi(z) increases in y.
  const double target = std::log(-w);
  auto h = [&](double y) { return y + std::log(phi(mu, -std::exp(y))) - target; };

  double a = 0.0, fa = h(a);
  if (fa == 0.0) return -1.0;
  double step = fa < 0.0 ? 1.0 : -1.0;
  double b = a, fb = fa;
  for (int it = 0; it < 64; ++it) {
    b = std::clamp(a + step, -700.0, 700.0);
    fb = h(b);
    if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) break;
    if (std::abs(b) >= 700.0) {
      throw Error(ErrorCode::NoBracket, "chi_eval: psi does not bracket w = " + std::to_string(w));
    }
    a = b;
    fa = fb;
    step *= 2.0;
  }
  if (fb == 0.0) return -std::exp(b);
  if ((fa < 0.0) == (fb < 0.0)) {
    throw Error(ErrorCode::NoBracket, "chi_eval: psi does not bracket w = " + std::to_string(w));
  }
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      h, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), max_iter);
  const double y = 0.5 * (lo + hi);
  const double resid = h(y);
  if (!(std::abs(resid) <= 1e-12)) {
    throw Error(ErrorCode::QuadratureFailure,
                "chi_eval: residual " + std::to_string(resid) + " at w = " + std::to_string(w));
  }
  return -std::exp(y);
}

double s_eval(const MeasureSpec& mu, double w) {
  const double z = chi_eval(mu, w);
  return (1.0 + w) / phi(mu, z);
}

// ---------------------------------------------------------------------------

STransformHandle::STransformHandle(std::shared_ptr<const SSource> src)
    : src_(std::move(src)), m1_(src_->m1()), m_minus1_(src_->m_minus1()) {}

void STransformHandle::check_domain(double w) const { require_w(w, src_->lower()); }

double STransformHandle::operator()(double w) const { return jet(w, 0)[0]; }

double STransformHandle::deriv(double w, int p) const {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (p > 3) throw Error(ErrorCode::OrderTooHigh, "derivative order must be <= 3");
  return jet(w, p)[static_cast<std::size_t>(p)];
}

SJet STransformHandle::jet(double w, int order) const {
  if (order > 3) throw Error(ErrorCode::OrderTooHigh, "derivative order must be <= 3");
  check_domain(w);
  return src_->jet(w, order);
}

double STransformHandle::log_value(double w) const {
  check_domain(w);
  return src_->log_s(w);
}

double s_deriv(const STransformHandle& h, double w, int p) { return h.deriv(w, p); }

STransformHandle s_handle(const MeasureSpec& mu) {
  if (const auto* m = mu.get_if<MuAlphaBeta>()) {
    return closed_form_handle(ClosedFormTag::mu_alpha_beta(m->alpha, m->beta));
  }
  require_probability(mu);
  return STransformHandle(std::make_shared<NumericSource>(mu));
}

ClosedFormTag ClosedFormTag::point_mass(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "point_mass: a > 0");
  ClosedFormTag t;
  t.kind = Kind::PointMass;
  t.a = a;
  return t;
}

ClosedFormTag ClosedFormTag::free_poisson() {
  ClosedFormTag t;
  t.kind = Kind::FreePoisson;
  return t;
}

ClosedFormTag ClosedFormTag::mu_alpha_beta(double alpha, double beta) {
  if (!(alpha >= 0.0 && beta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mu_alpha_beta: alpha, beta >= 0");
  }
  ClosedFormTag t;
  t.kind = Kind::MuAlphaBeta;
  t.alpha = alpha;
  t.beta = beta;
  return t;
}

ClosedFormTag ClosedFormTag::symmetric_bernoulli() {
  ClosedFormTag t;
  t.kind = Kind::SymmetricBernoulli;
  return t;
}

ClosedFormTag ClosedFormTag::from_name(const std::string& name,
                                       const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "point_mass") return point_mass(get("a", 1.0));
  if (name == "free_poisson") return free_poisson();
  if (name == "mu_alpha_beta") return mu_alpha_beta(get("alpha", 0.0), get("beta", 0.0));
  if (name == "symmetric_bernoulli") return symmetric_bernoulli();
  throw Error(ErrorCode::UnknownTag, "unknown closed form '" + name + "'");
}

SValue closed_form_s(const ClosedFormTag& tag, double w) {
  require_w(w, -1.0);
  if (tag.kind == ClosedFormTag::Kind::SymmetricBernoulli) {
    return {std::sqrt((1.0 + w) / -w), true};
  }
  return {ClosedSource(tag).jet(w, 0)[0], false};
}

STransformHandle closed_form_handle(const ClosedFormTag& tag) {
  if (tag.kind == ClosedFormTag::Kind::SymmetricBernoulli) {
    throw Error(ErrorCode::InvalidArgument, "symmetric_bernoulli has no real S-transform handle");
  }
  return STransformHandle(std::make_shared<ClosedSource>(tag));
}

STransformHandle hat(const STransformHandle& h) {
  if (h.lower() != -1.0) {
    throw Error(ErrorCode::AtomAtZero, "hat: the law of 1/X needs mu({0}) = 0");
  }
  if (const auto* inner = dynamic_cast<const HatSource*>(h.source().get())) return inner->inner();
  if (auto direct = h.source()->reflected()) return STransformHandle(std::move(direct));
  return STransformHandle(std::make_shared<HatSource>(h));
}

SValue symmetric_s_modulus(const MeasureSpec& mu, double w) {
  const MeasureSpec sq = symmetric_square(mu);
  const double s2 = s_handle(sq)(w);
  return {std::sqrt((1.0 + w) / -w * s2), true};
}

void dump_csv(const STransformHandle& h, std::span<const double> ws, std::ostream& out) {
  out << "w,S\n" << std::setprecision(17);
  for (const double w : ws) out << w << ',' << h(w) << '\n';
}

}  // namespace freemult
