#include "freemult/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "freemult/errors.hpp"

namespace freemult::quad {

namespace {

constexpr std::size_t kMaxIntervals = 2000;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

// Integrands may themselves integrate (tail functions defined through
// quadrature), so each nesting level gets its own workspace.
class WorkspaceLease {
 public:
  WorkspaceLease() {
    static const bool handler_off = [] {
      gsl_set_error_handler_off();
      return true;
    }();
    (void)handler_off;
    if (pool().size() <= depth()) pool().emplace_back(gsl_integration_workspace_alloc(kMaxIntervals));
    ws_ = pool()[depth()].get();
    ++depth();
  }
  ~WorkspaceLease() { --depth(); }
  WorkspaceLease(const WorkspaceLease&) = delete;
  WorkspaceLease& operator=(const WorkspaceLease&) = delete;

  gsl_integration_workspace* get() const { return ws_; }

 private:
  static std::vector<Workspace>& pool() {
    thread_local std::vector<Workspace> p;
    return p;
  }
  static std::size_t& depth() {
    thread_local std::size_t d = 0;
    return d;
  }
  gsl_integration_workspace* ws_;
};

double trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

std::pair<double, double> raw(const std::function<double(double)>& f, double a, double b,
                              double rel_tol) {
  WorkspaceLease lease;
  gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
  double value = 0.0, error = 0.0;
  const bool lo_inf = std::isinf(a), hi_inf = std::isinf(b);
  if (lo_inf && hi_inf) {
    gsl_integration_qagi(&gf, 0.0, rel_tol, kMaxIntervals, lease.get(), &value, &error);
  } else if (hi_inf) {
    gsl_integration_qagiu(&gf, a, 0.0, rel_tol, kMaxIntervals, lease.get(), &value, &error);
  } else if (lo_inf) {
    gsl_integration_qagil(&gf, b, 0.0, rel_tol, kMaxIntervals, lease.get(), &value, &error);
  } else {
    gsl_integration_qag(&gf, a, b, 0.0, rel_tol, kMaxIntervals, GSL_INTEG_GAUSS21, lease.get(),
                        &value, &error);
  }
  return {value, error};
}

std::string fmt_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  Result r;
  if (a == b) return r;
  if (a > b) {
    r = integrate(f, b, a, rel_tol);
    r.value = -r.value;
    return r;
  }
  std::tie(r.value, r.error) = raw(f, a, b, rel_tol);
  r.l1 = std::abs(r.value);
  if (r.error > kAcceptTolerance * r.l1) {
    // Sign changes can make |value| much smaller than the scale of the
    // integrand; measure that scale directly before judging the error.
    const std::function<double(double)> g = [&f](double x) { return std::abs(f(x)); };
    r.l1 = std::max(r.l1, raw(g, a, b, 1e-6).first);
  }
  return r;
}

Result integrate_pieces(const std::function<double(double)>& f, std::span<const double> cuts,
                        double rel_tol) {
  Result total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i] < cuts[i + 1])) continue;
    const Result piece = integrate(f, cuts[i], cuts[i + 1], rel_tol);
    total.value += piece.value;
    total.error += piece.error;
    total.l1 += piece.l1;
  }
  return total;
}

void check(const Result& r, const char* what) {
  if (!std::isfinite(r.value) || r.error > kAcceptTolerance * r.l1 + 1e-300) {
    throw Error(ErrorCode::QuadratureFailure,
                std::string(what) + ": estimated error " + fmt_sci(r.error) +
                    " exceeds tolerance (value " + fmt_sci(r.value) + ", l1 " + fmt_sci(r.l1) + ")");
  }
}

}  // namespace freemult::quad
