#include "freemult/id_laws.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "freemult/errors.hpp"

namespace freemult {

double LevyPair::mass_at_zero() const {
  return atom_zero + (sigma ? atom_at_zero(*sigma) : 0.0);
}

void LevyPair::validate() const {
  if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidArgument, "levy pair: gamma must be finite");
  if (!(atom_zero >= 0.0) || !(atom_inf >= 0.0) || !std::isfinite(atom_zero) ||
      !std::isfinite(atom_inf)) {
    throw Error(ErrorCode::InvalidArgument, "levy pair: endpoint masses must be finite and >= 0");
  }
  if (sigma && !std::isfinite(total_mass(*sigma))) {
    throw Error(ErrorCode::InvalidArgument, "levy pair: sigma must be a finite measure");
  }
}

namespace {

void require_w(double w) {
  if (!(w > -1.0 && w < 0.0)) {
    throw Error(ErrorCode::OutOfRange, "w = " + std::to_string(w) + " outside (-1, 0)");
  }
}

constexpr double kLargeT = 1e100;

// (1 + t z) / (z - t) for k = 0, (1 + t^2) / (z - t)^{k+1} for k >= 1; both
// have finite limits as t -> inf, reached under pushforwards by 1/t.
double kernel_at(double z, int k, double t) {
  if (k == 0) {
    if (t < kLargeT) return (1.0 + t * z) / (z - t);
    return -z + (1.0 + z * z) / (z - t);
  }
  if (t < kLargeT) return (1.0 + t * t) / std::pow(z - t, k + 1);
  if (std::isinf(t)) return k == 1 ? 1.0 : 0.0;
  const double d = t - z, r = t / d;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * (1.0 / (d * d) + r * r) * std::pow(d, 1 - k);
}

double kernel_slope(double z, int k, double t) {
  if (std::isinf(t)) return 0.0;
  const double d = z - t;
  if (k == 0) return (1.0 + z * z) / (d * d);
  return 2.0 * t / std::pow(d, k + 1) + (k + 1) * (1.0 + t * t) / std::pow(d, k + 2);
}

double sigma_kernel(const MeasureSpec& sigma, double z, int k) {
  return integrate(sigma, Integrand{[z, k](double t) { return kernel_at(z, k, t); },
                                    [z, k](double t) { return kernel_slope(z, k, t); }, -z});
}

// Derivatives of v as a function of z.
SJet vbar_jet(const LevyPair& p, double z, int order) {
  SJet out{};
  out[0] = p.gamma + p.atom_zero / z - p.atom_inf * z + (p.sigma ? sigma_kernel(*p.sigma, z, 0) : 0.0);
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    fact *= -k;
    const double inner = p.atom_zero / std::pow(z, k + 1) + (p.sigma ? sigma_kernel(*p.sigma, z, k) : 0.0);
    out[k] = fact * inner - (k == 1 ? p.atom_inf : 0.0);
  }
  return out;
}

class IdSource final : public SSource {
 public:
  explicit IdSource(LevyPair pair) : pair_(std::move(pair)) {}

  double lower() const override { return -1.0; }

  SJet jet(double w, int order) const override {
    const SJet v = v_jet(pair_, w, order);
    const double s = std::exp(v[0]);
    return {s, s * v[1], s * (v[2] + v[1] * v[1]), s * (v[3] + 3.0 * v[1] * v[2] + v[1] * v[1] * v[1])};
  }

  double log_s(double w) const override { return v_eval(pair_, w); }
  ExtendedMoment m1() const override { return id_m1(pair_); }
  ExtendedMoment m_minus1() const override { return id_m_minus1(pair_); }

  std::string describe() const override {
    std::ostringstream os;
    os << "id(gamma=" << pair_.gamma << ", sigma=" << (pair_.sigma ? pair_.sigma->family() : "none")
       << ", zero=" << pair_.atom_zero << ", inf=" << pair_.atom_inf << ")";
    return os.str();
  }

  std::shared_ptr<const SSource> reflected() const override {
    return std::make_shared<IdSource>(id_hat(pair_));
  }

 private:
  LevyPair pair_;
};

bool is_sigma_min_unit_index(const LevyPair& p) {
  if (!p.sigma || p.atom_zero != 0.0 || p.atom_inf != 0.0) return false;
  const auto* s = p.sigma->get_if<SigmaMinFamily>();
  return s && s->alpha == 1.0;
}

}  // namespace

SJet v_jet(const LevyPair& pair, double w, int order) {
  require_w(w);
  if (order < 0 || order > 3) throw Error(ErrorCode::OrderTooHigh, "v_jet: order must be in [0, 3]");
  const double q = 1.0 + w;
  const double z = w / q;
  const SJet b = vbar_jet(pair, z, order);
  const double z1 = 1.0 / (q * q), z2 = -2.0 / (q * q * q), z3 = 6.0 / (q * q * q * q);
  SJet out{b[0], 0.0, 0.0, 0.0};
  if (order >= 1) out[1] = b[1] * z1;
  if (order >= 2) out[2] = b[2] * z1 * z1 + b[1] * z2;
  if (order >= 3) out[3] = b[3] * z1 * z1 * z1 + 3.0 * b[2] * z1 * z2 + b[1] * z3;
  return out;
}

double v_eval(const LevyPair& pair, double w) { return v_jet(pair, w, 0)[0]; }

ExtendedMoment id_m1(const LevyPair& pair) {
  if (pair.atom_zero > 0.0) return ExtendedMoment::infinite();
  double inv = 0.0;
  if (pair.sigma) {
    const ExtendedMoment m = moment(*pair.sigma, -1.0);
    if (!m.finite()) return ExtendedMoment::infinite();
    inv = m.value;
  }
  return {std::exp(-pair.gamma + inv)};
}

ExtendedMoment id_m_minus1(const LevyPair& pair) {
  if (pair.atom_inf > 0.0) return ExtendedMoment::infinite();
  double m = 0.0;
  if (pair.sigma) {
    const ExtendedMoment r = moment(*pair.sigma, 1.0);
    if (!r.finite()) return ExtendedMoment::infinite();
    m = r.value;
  }
  return {std::exp(pair.gamma + m)};
}

STransformHandle s_id_handle(const LevyPair& pair) {
  pair.validate();
  return STransformHandle(std::make_shared<IdSource>(pair));
}

double s_id_eval(const LevyPair& pair, double w) { return std::exp(v_eval(pair, w)); }

TailAsymptotic id_tail_predict(const LevyPair& pair, const SigmaLeftTail& left) {
  const double a = left.alpha;
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::InvalidArgument, "id_tail_predict: alpha must be finite and >= 0");
  }
  if (!(left.L.c > 0.0)) throw Error(ErrorCode::InvalidArgument, "id_tail_predict: L must be positive");

  if (a < 1.0) {
    const double r = 1.0 / (1.0 - a);
    const double k = a == 0.0 ? 1.0 : std::pow(std::numbers::pi * a / std::sin(std::numbers::pi * a), r);
    // L(log^r x)^r with log(log^r x) = r loglog x; deeper iterated logs keep their leading order.
    double c = k * std::pow(left.L.c, r);
    std::vector<double> exps{-r};
    for (std::size_t i = 0; i < left.L.exps.size(); ++i) {
      exps.push_back(r * left.L.exps[i]);
      if (i == 0) c *= std::pow(r, r * left.L.exps[0]);
    }
    return TailAsymptotic{0.0, LogPowerSV{c, std::move(exps)}, Regime::Slow, left.L.is_constant(),
                          std::nullopt};
  }

  if (a == 1.0) {
    if (!left.limit) throw Error(ErrorCode::MissingLimit, "id_tail_predict: alpha = 1 needs lim L");
    const double d = *left.limit;
    if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "id_tail_predict: lim L must be >= 0");
    if (std::isinf(d)) return TailAsymptotic{0.0, LogPowerSV{1.0, {}}, Regime::Slow, false, std::nullopt};
    if (d == 0.0) {
      return TailAsymptotic{1.0, LogPowerSV{1.0, {}}, Regime::Alpha1Critical, false, std::nullopt};
    }
    const double index = 1.0 / (1.0 + d);
    TailAsymptotic out{index, LogPowerSV{1.0, {}}, Regime::Alpha01, false, std::nullopt};
    if (is_sigma_min_unit_index(pair)) {
      const auto& s = *pair.sigma->get_if<SigmaMinFamily>();
      const double lam = 1.0 / (1.0 + s.c);
      const double pl = std::numbers::pi * lam;
      out.index = lam;
      out.sv.c = std::sin(pl) / pl * std::pow(s.d, s.c * lam) * std::exp(-pair.gamma * lam);
      out.constant_known = true;
    }
    return out;
  }

  if (!left.L.is_constant()) {
    throw Error(ErrorCode::RegimeMismatch, "id_tail_predict: alpha > 1 needs a constant L");
  }
  const ExtendedMoment m1 = id_m1(pair);
  if (!m1.finite()) throw Error(ErrorCode::RegimeMismatch, "id_tail_predict: alpha > 1 with infinite mean");
  return TailAsymptotic{a, LogPowerSV{std::pow(m1.value, a) * left.L.c, {}}, regime_for_index(a, true),
                        true, std::nullopt};
}

LevyPair id_hat(const LevyPair& pair) {
  LevyPair out;
  out.gamma = -pair.gamma;
  out.atom_zero = pair.atom_inf;
  out.atom_inf = pair.atom_zero;
  if (!pair.sigma) return out;

  const MeasureSpec& s = *pair.sigma;
  const double zero_mass = atom_at_zero(s);
  if (zero_mass == 0.0) {
    out.sigma = pushforward_inverse(s);
    return out;
  }
  out.atom_inf += zero_mass;
  if (const auto* a = s.get_if<Atoms>()) {
    std::vector<double> loc, wt;
    for (std::size_t i = 0; i < a->locations.size(); ++i) {
      if (a->locations[i] == 0.0) continue;
      loc.push_back(1.0 / a->locations[i]);
      wt.push_back(a->weights[i]);
    }
    if (!loc.empty()) out.sigma = MeasureSpec::atoms(std::move(loc), std::move(wt));
    return out;
  }
  if (const auto* sm = s.get_if<SigmaMinFamily>(); sm && sm->alpha == 0.0) return out;
  throw Error(ErrorCode::AtomAtZero, "id_hat: cannot split the atom at zero of " + s.family());
}

}  // namespace freemult
