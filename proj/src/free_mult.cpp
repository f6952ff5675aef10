#include "freemult/free_mult.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "freemult/errors.hpp"

namespace freemult {

namespace {

class ProductSource final : public SSource {
 public:
  explicit ProductSource(std::vector<SPart> parts) : parts_(std::move(parts)) {
    lower_ = -1.0;
    for (const SPart& p : parts_) lower_ = std::max(lower_, p.handle.lower());
  }

  double lower() const override { return lower_; }

  // Log-derivative chain: with l = log S = sum t_i log S_i,
  // S' = S l', S'' = S (l'' + l'^2), S''' = S (l''' + 3 l' l'' + l'^3).
  SJet jet(double w, int order) const override {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    for (const SPart& p : parts_) {
      const SJet s = p.handle.jet(w, order);
      l0 += p.t * std::log(s[0]);
      if (order >= 1) {
        const double r1 = s[1] / s[0];
        l1 += p.t * r1;
        if (order >= 2) {
          const double r2 = s[2] / s[0];
          l2 += p.t * (r2 - r1 * r1);
          if (order >= 3) l3 += p.t * (s[3] / s[0] - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1);
        }
      }
    }
    const double s0 = std::exp(l0);
    return {s0, s0 * l1, s0 * (l2 + l1 * l1), s0 * (l3 + 3.0 * l1 * l2 + l1 * l1 * l1)};
  }

  double log_s(double w) const override {
    double out = 0.0;
    for (const SPart& p : parts_) out += p.t * p.handle.log_value(w);
    return out;
  }

  ExtendedMoment m1() const override {
    double out = 1.0;
    for (const SPart& p : parts_) {
      if (!p.handle.m1().finite()) return ExtendedMoment::infinite();
      out *= std::pow(p.handle.m1().value, p.t);
    }
    return {out};
  }

  ExtendedMoment m_minus1() const override {
    if (lower_ > -1.0) return ExtendedMoment::infinite();
    double out = 1.0;
    for (const SPart& p : parts_) {
      if (!p.handle.m_minus1().finite()) return ExtendedMoment::infinite();
      out *= std::pow(p.handle.m_minus1().value, p.t);
    }
    return {out};
  }

  std::string describe() const override {
    std::string out = "product(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) out += ", ";
      out += parts_[i].handle.describe() + "^" + std::to_string(parts_[i].t);
    }
    return out + ")";
  }

  std::shared_ptr<const SSource> reflected() const override {
    if (lower_ > -1.0) return nullptr;
    std::vector<SPart> hats;
    for (const SPart& p : parts_) hats.push_back({hat(p.handle), p.t});
    return std::make_shared<ProductSource>(std::move(hats));
  }

  const std::vector<SPart>& parts() const { return parts_; }

 private:
  std::vector<SPart> parts_;
  double lower_;
};

}  // namespace

STransformHandle s_combine(std::span<const SPart> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "s_combine: no parts");
  std::vector<SPart> flat;
  for (const SPart& p : parts) {
    if (!(p.t >= 1.0) || !std::isfinite(p.t)) {
      throw Error(ErrorCode::ExponentBelowOne, "s_combine: exponent " + std::to_string(p.t));
    }
    if (const auto* prod = dynamic_cast<const ProductSource*>(p.handle.source().get())) {
      for (const SPart& q : prod->parts()) flat.push_back({q.handle, q.t * p.t});
    } else {
      flat.push_back(p);
    }
  }
  if (flat.size() == 1 && flat.front().t == 1.0) return flat.front().handle;
  return STransformHandle(std::make_shared<ProductSource>(std::move(flat)));
}

STransformHandle s_power(const STransformHandle& h, double t) {
  const SPart part{h, t};
  return s_combine(std::span(&part, 1));
}

double psi_of_combination(const STransformHandle& h, double z) {
  if (!(z < 0.0) || !std::isfinite(z)) throw Error(ErrorCode::OutOfRange, "z must be < 0");
  const double lower = h.lower();
  // w(s) = lower * sigmoid(s) sweeps (lower, 0) with geometric resolution at
  // both ends; -chi(w(s)) increases in s.
  auto w_of = [lower](double s) {
    return s >= 0.0 ? lower / (1.0 + std::exp(-s)) : lower * std::exp(s) / (1.0 + std::exp(s));
  };
  auto one_plus_w = [lower, &w_of](double s) {
    if (lower == -1.0) return s >= 0.0 ? std::exp(-s) / (1.0 + std::exp(-s)) : 1.0 / (1.0 + std::exp(s));
    return 1.0 + w_of(s);
  };
  const double target = std::log(-z);
  auto f = [&](double s) {
    const double w = w_of(s);
    return std::log(-w) + h.log_value(w) - std::log(one_plus_w(s)) - target;
  };
  constexpr double kMax = 36.0, kMin = -700.0;
  auto in_domain = [&](double s) {
    const double w = w_of(s);
    return w > lower && w < 0.0;
  };
  double a = 0.0, fa = f(a);
  double b = a, fb = fa;
  double step = fa < 0.0 ? 1.0 : -1.0;
  for (int it = 0; it < 64 && (fa < 0.0) == (fb < 0.0) && fb != 0.0; ++it) {
    b = std::clamp(a + step, kMin, kMax);
    if (!in_domain(b)) break;
    fb = f(b);
    if ((fa < 0.0) != (fb < 0.0) || b == kMin || b == kMax) break;
    a = b;
    fa = fb;
    step *= 2.0;
  }
  if (fb == 0.0) return w_of(b);
  if ((fa < 0.0) == (fb < 0.0)) {
    throw Error(ErrorCode::NoBracket, "psi_of_combination: chi does not reach z = " + std::to_string(z));
  }
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return w_of(0.5 * (lo + hi));
}

TailAsymptotic breiman_predict(double alpha, double tail_constant, double m1_nu) {
  if (!(alpha >= 0.0) || !(tail_constant > 0.0) || !(m1_nu > 0.0) || !std::isfinite(m1_nu)) {
    throw Error(ErrorCode::InvalidArgument, "breiman_predict: alpha >= 0, c > 0, finite m1 > 0");
  }
  return TailAsymptotic{alpha, LogPowerSV{tail_constant * std::pow(m1_nu, alpha), {}},
                        regime_for_index(alpha, alpha > 1.0), true, std::nullopt};
}

}  // namespace freemult
