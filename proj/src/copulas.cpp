#include "blockmax/copulas.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "blockmax/quadrature.hpp"
#include "blockmax/special.hpp"

namespace blockmax {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Lower Cholesky factor of the equicorrelation matrix (unit diagonal,
// off-diagonal theta), d small.
std::vector<std::vector<double>> chol_equicorr(int d, double theta) {
  std::vector<std::vector<double>> P(d, std::vector<double>(d, theta));
  for (int i = 0; i < d; ++i) P[i][i] = 1.0;
  std::vector<std::vector<double>> L(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = P[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (s <= 0) throw std::invalid_argument("correlation matrix not positive definite");
        L[i][i] = std::sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  return L;
}

// frac(k * sqrt(prime)) Kronecker sequence directions for up to 4 dims.
constexpr double kQmcAlpha[4] = {1.4142135623730951, 1.7320508075688772,
                                 2.2360679774997896, 2.6457513110645907};

}  // namespace

void Copula::check_point(const Point& u) const {
  if (static_cast<int>(u.size()) != dim())
    throw std::invalid_argument("copula: point dimension " + std::to_string(u.size()) +
                                " does not match model dimension " + std::to_string(dim()));
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("copula: point coordinate outside [0,1]");
}

double Copula::limit_partial(int, const Point&) const {
  throw std::runtime_error("limit partial derivative unavailable for family " + family());
}

double Copula::rho_phi() const {
  throw std::runtime_error("second-order data unavailable for family " + family());
}

double Copula::phi(double) const {
  throw std::runtime_error("second-order data unavailable for family " + family());
}

double Copula::second_order_S(const Point&) const {
  throw std::runtime_error("second-order S unavailable for family " + family());
}

// ---------------------------------------------------------------------------
// Gumbel-Hougaard
// ---------------------------------------------------------------------------

GumbelHougaard::GumbelHougaard(double beta, int d) : beta_(beta), d_(d) {
  if (!(beta >= 1.0) || !std::isfinite(beta))
    throw std::invalid_argument("GumbelHougaard: beta must be >= 1");
  if (d < 2) throw std::invalid_argument("GumbelHougaard: d must be >= 2");
}

double GumbelHougaard::cdf(const Point& u) const {
  check_point(u);
  double xmax = 0.0;
  for (double v : u) {
    if (v == 0.0) return 0.0;
    xmax = std::max(xmax, -std::log(v));
  }
  if (xmax == 0.0) return 1.0;
  double s = 0.0;
  for (double v : u) s += std::pow(-std::log(v) / xmax, beta_);
  return std::exp(-xmax * std::pow(s, 1.0 / beta_));
}

CopulaPtr GumbelHougaard::attractor() const {
  return std::make_shared<GumbelHougaard>(beta_, d_);
}

double GumbelHougaard::limit_partial(int j, const Point& u) const {
  check_point(u);
  if (j < 0 || j >= d_) throw std::invalid_argument("limit_partial: bad coordinate");
  const double uj = u[static_cast<size_t>(j)];
  if (uj <= 0.0 || uj >= 1.0) return 0.0;
  double xmax = 0.0;
  for (double v : u) {
    if (v == 0.0) return 0.0;
    xmax = std::max(xmax, -std::log(v));
  }
  double s = 0.0;
  for (double v : u) s += std::pow(-std::log(v) / xmax, beta_);
  const double c = std::exp(-xmax * std::pow(s, 1.0 / beta_));
  const double rj = -std::log(uj) / xmax;
  return c * std::pow(rj, beta_ - 1.0) * std::pow(s, (1.0 - beta_) / beta_) / uj;
}

Matrix GumbelHougaard::sample(long n, RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Matrix out(n, d_);
  if (beta_ == 1.0) {
    for (long i = 0; i < n; ++i)
      for (int j = 0; j < d_; ++j) out(i, j) = rng.uniform();
    return out;
  }
  const double alpha = 1.0 / beta_;
  for (long i = 0; i < n; ++i) {
    const double logv = rng.log_positive_stable(alpha);
    for (int j = 0; j < d_; ++j) {
      const double loge = std::log(rng.exponential());
      out(i, j) = std::exp(-std::exp(alpha * (loge - logv)));
    }
  }
  return out;
}

std::map<std::string, std::string> GumbelHougaard::descriptor() const {
  return {{"family", "gumbel"}, {"beta", fmt(beta_)}, {"d", std::to_string(d_)}};
}

// ---------------------------------------------------------------------------
// Outer-power Clayton
// ---------------------------------------------------------------------------

OuterPowerClayton::OuterPowerClayton(double theta, double beta, int d)
    : theta_(theta), beta_(beta), d_(d) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("OuterPowerClayton: theta must be > 0");
  if (!(beta >= 1.0) || !std::isfinite(beta))
    throw std::invalid_argument("OuterPowerClayton: beta must be >= 1");
  if (d < 2) throw std::invalid_argument("OuterPowerClayton: d must be >= 2");
}

double OuterPowerClayton::cdf(const Point& u) const {
  check_point(u);
  double tmax = 0.0;
  for (double v : u) {
    if (v == 0.0) return 0.0;
    tmax = std::max(tmax, std::expm1(-theta_ * std::log(v)));
  }
  if (tmax == 0.0) return 1.0;
  double s = 0.0;
  for (double v : u) s += std::pow(std::expm1(-theta_ * std::log(v)) / tmax, beta_);
  const double g = tmax * std::pow(s, 1.0 / beta_);
  return std::exp(-std::log1p(g) / theta_);
}

CopulaPtr OuterPowerClayton::attractor() const {
  return std::make_shared<GumbelHougaard>(beta_, d_);
}

double OuterPowerClayton::limit_partial(int j, const Point& u) const {
  return GumbelHougaard(beta_, d_).limit_partial(j, u);
}

double OuterPowerClayton::second_order_S(const Point& u) const {
  if (d_ != 2) throw std::runtime_error("second-order S: closed form available for d = 2 only");
  check_point(u);
  for (double v : u)
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("second_order_S: point must be interior");
  const double x = -std::log(u[0]), y = -std::log(u[1]);
  const double sb = std::pow(x, beta_) + std::pow(y, beta_);
  const double ghv = std::exp(-std::pow(sb, 1.0 / beta_));
  const double lambda = ghv * (std::pow(sb, 2.0 / beta_) -
                               std::pow(sb, 1.0 / beta_ - 1.0) *
                                   (std::pow(x, beta_ + 1.0) + std::pow(y, beta_ + 1.0)));
  return theta_ * lambda;
}

Matrix OuterPowerClayton::sample(long n, RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Matrix out(n, d_);
  const double alpha = 1.0 / beta_;
  for (long i = 0; i < n; ++i) {
    // V = V0^beta * S with V0 ~ Gamma(1/theta) and S positive (1/beta)-stable,
    // so that the Laplace transform of V is psi(t) = (1 + t^(1/beta))^(-1/theta).
    const double logv = beta_ * rng.log_gamma_draw(1.0 / theta_) +
                        rng.log_positive_stable(alpha);
    bool ok = std::isfinite(logv);
    if (ok) {
      for (int j = 0; j < d_; ++j) {
        const double w = alpha * (std::log(rng.exponential()) - logv);
        // psi(t) = exp(-log1p(t^alpha)/theta), evaluated from w = log t^alpha
        const double l1p = w > 36.0 ? w + std::exp(-w) : std::log1p(std::exp(w));
        const double uj = std::exp(-l1p / theta_);
        if (!std::isfinite(uj)) {
          ok = false;
          break;
        }
        out(i, j) = uj;
      }
    }
    if (!ok) {
      if (d_ != 2)
        throw std::runtime_error("OuterPowerClayton sampler: degenerate frailty draw");
      const Point row = sample_row_conditional(rng);
      out(i, 0) = row[0];
      out(i, 1) = row[1];
    }
  }
  return out;
}

Point OuterPowerClayton::sample_row_conditional(RngStream& rng) const {
  if (d_ != 2)
    throw std::logic_error("conditional-inversion sampler is bivariate only");
  const double u = rng.uniform();
  const double w = rng.uniform();
  // Solve dC(u,v)/du = w for v; the conditional CDF is increasing in v.
  const auto cond = [&](double v) {
    const double tu = std::expm1(-theta_ * std::log(u));
    const double tv = std::expm1(-theta_ * std::log(v));
    const double T = std::pow(tu, beta_) + std::pow(tv, beta_);
    const double g = std::pow(T, 1.0 / beta_);
    return std::exp(-(1.0 / theta_ + 1.0) * std::log1p(g)) *
           std::pow(T, 1.0 / beta_ - 1.0) * std::pow(tu, beta_ - 1.0) *
           std::pow(u, -theta_ - 1.0);
  };
  double lo = 1e-300, hi = 1.0 - 1e-16;
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cond(mid) < w ? lo : hi) = mid;
  }
  return {u, 0.5 * (lo + hi)};
}

std::map<std::string, std::string> OuterPowerClayton::descriptor() const {
  return {{"family", "opclayton"},
          {"theta", fmt(theta_)},
          {"beta", fmt(beta_)},
          {"d", std::to_string(d_)}};
}

// ---------------------------------------------------------------------------
// t-copula
// ---------------------------------------------------------------------------

TCopula::TCopula(int nu, double theta, int d) : nu_(nu), theta_(theta), d_(d) {
  if (nu < 1) throw std::invalid_argument("TCopula: nu must be >= 1");
  if (!(theta > -1.0 && theta < 1.0))
    throw std::invalid_argument("TCopula: theta must be in (-1,1)");
  if (d < 2) throw std::invalid_argument("TCopula: d must be >= 2");
  if (!(theta > -1.0 / (d - 1)))
    throw std::invalid_argument("TCopula: equicorrelation matrix not positive definite");
}

double TCopula::cdf(const Point& u) const {
  check_point(u);
  for (double v : u)
    if (v == 0.0) return 0.0;
  if (d_ == 2) {
    if (u[0] == 1.0) return u[1];
    if (u[1] == 1.0) return u[0];
    const double q2 = special::t_quantile(u[1], nu_);
    const double oneminus = 1.0 - theta_ * theta_;
    const auto integrand = [&](double p) {
      const double x = special::t_quantile(p, nu_);
      const double scale = std::sqrt((nu_ + 1.0) / (oneminus * (nu_ + x * x)));
      return special::t_cdf((q2 - theta_ * x) * scale, nu_ + 1.0);
    };
    return adaptive_quadrature(integrand, 0.0, u[0], 1e-9, 48);
  }
  if (d_ > 4)
    throw std::runtime_error("t-copula CDF supported for d <= 4");
  return t_copula_cdf_qmc(*this, u, 16384, 8);
}

double t_copula_cdf_qmc(const TCopula& model, const Point& u, int points, int shifts) {
  const int d = model.dim();
  const int nu = model.nu();
  std::vector<double> b(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    if (u[static_cast<size_t>(j)] == 0.0) return 0.0;
    b[static_cast<size_t>(j)] = u[static_cast<size_t>(j)] == 1.0
                                    ? std::numeric_limits<double>::infinity()
                                    : special::t_quantile(u[static_cast<size_t>(j)], nu);
  }
  const auto L = chol_equicorr(d, model.theta());
  RngStream shift_rng(0x51A3D5u);  // fixed seed: evaluation is deterministic
  double total = 0.0;
  std::vector<double> delta(static_cast<size_t>(d));
  std::vector<double> y(static_cast<size_t>(d), 0.0);
  for (int s = 0; s < shifts; ++s) {
    for (int j = 0; j < d; ++j) delta[static_cast<size_t>(j)] = shift_rng.uniform();
    double acc = 0.0;
    for (int k = 1; k <= points; ++k) {
      // Genz separation-of-variables along the Cholesky factor, with the
      // chi scaling variable drawn from the first lattice coordinate. The
      // baker's (tent) transform of the shifted points sharpens the rule's
      // convergence on smooth integrands.
      const auto coord = [&](int j) {
        double w = k * kQmcAlpha[j] + delta[static_cast<size_t>(j)];
        w -= std::floor(w);
        w = 1.0 - std::fabs(2.0 * w - 1.0);
        return std::min(std::max(w, 1e-15), 1.0 - 1e-15);
      };
      const double schi = std::sqrt(special::chi2_quantile(coord(0), nu) / nu);
      double prod = 1.0;
      for (int i = 0; i < d && prod > 0.0; ++i) {
        double num;
        if (std::isinf(b[static_cast<size_t>(i)])) {
          num = std::numeric_limits<double>::infinity();
        } else {
          num = schi * b[static_cast<size_t>(i)];
          for (int j = 0; j < i; ++j) num -= L[i][j] * y[static_cast<size_t>(j)];
        }
        const double e =
            std::isinf(num) ? 1.0 : special::norm_cdf(num / L[i][i]);
        prod *= e;
        if (prod <= 0.0) break;
        if (i < d - 1) {
          const double t = std::min(std::max(coord(i + 1) * e, 1e-300), 1.0 - 1e-16);
          y[static_cast<size_t>(i)] = special::norm_quantile(t);
        }
      }
      acc += prod;
    }
    total += acc / points;
  }
  return total / shifts;
}

CopulaPtr TCopula::attractor() const {
  if (d_ != 2)
    throw std::runtime_error(
        "t-copula extreme-value attractor unavailable for d >= 3 "
        "(requires the (d-1)-dimensional t CDF of the tail limit)");
  return std::make_shared<TExtremeValue>(nu_, theta_);
}

double TCopula::limit_partial(int j, const Point& u) const {
  return attractor()->limit_partial(j, u);
}

Matrix TCopula::sample(long n, RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const auto L = chol_equicorr(d_, theta_);
  Matrix out(n, d_);
  std::vector<double> z(static_cast<size_t>(d_));
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d_; ++j) z[static_cast<size_t>(j)] = rng.normal();
    const double w = rng.chi_square(nu_);
    const double scale = std::sqrt(nu_ / w);
    for (int j = 0; j < d_; ++j) {
      double x = 0.0;
      for (int k = 0; k <= j; ++k) x += L[j][k] * z[static_cast<size_t>(k)];
      out(i, j) = special::t_cdf(x * scale, nu_);
    }
  }
  return out;
}

double TCopula::phi(double m) const {
  if (nu_ == 1) return 1.0 / (2.0 * m);
  if (nu_ == 2) return 3.0 / (2.0 * m);
  return std::pow(m, -2.0 / nu_);
}

double TCopula::stable_tail(double x, double y) const {
  if (d_ != 2) throw std::runtime_error("stable tail dependence: d = 2 only");
  return TExtremeValue(nu_, theta_).stable_tail(x, y);
}

double TCopula::second_order_S(const Point& u) const {
  if (!(nu_ == 1 && d_ == 2))
    throw std::runtime_error(
        "t-copula second-order S implemented for nu = 1, d = 2 only "
        "(nu >= 2 requires the external second-order POT limit M)");
  check_point(u);
  for (double v : u)
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("second_order_S: point must be interior");
  const TExtremeValue ev(nu_, theta_);
  const double x = -std::log(u[0]), y = -std::log(u[1]);
  const double h = 1e-6 * std::max({x, y, 1.0});
  const double l = ev.stable_tail(x, y);
  const double lx = (ev.stable_tail(x + h, y) - ev.stable_tail(x - h, y)) / (2.0 * h);
  const double ly = (ev.stable_tail(x, y + h) - ev.stable_tail(x, y - h)) / (2.0 * h);
  const double gamma2 = x * x * lx + y * y * ly;
  return std::exp(-l) * (gamma2 - l * l);
}

std::map<std::string, std::string> TCopula::descriptor() const {
  return {{"family", "t"},
          {"nu", std::to_string(nu_)},
          {"theta", fmt(theta_)},
          {"d", std::to_string(d_)}};
}

// ---------------------------------------------------------------------------
// t extreme-value copula (attractor of the bivariate t-copula)
// ---------------------------------------------------------------------------

TExtremeValue::TExtremeValue(int nu, double theta) : nu_(nu), theta_(theta) {
  if (nu < 1) throw std::invalid_argument("TExtremeValue: nu must be >= 1");
  if (!(theta > -1.0 && theta < 1.0))
    throw std::invalid_argument("TExtremeValue: theta must be in (-1,1)");
}

double TExtremeValue::stable_tail(double x, double y) const {
  if (!(x >= 0.0) || !(y >= 0.0))
    throw std::invalid_argument("stable_tail: arguments must be nonnegative");
  if (x == 0.0 && y == 0.0)
    throw std::invalid_argument("stable_tail: arguments must not both be zero");
  if (x == 0.0) return y;
  if (y == 0.0) return x;
  const double root = std::sqrt((nu_ + 1.0) / (1.0 - theta_ * theta_));
  const double a1 = (std::pow(y / x, 1.0 / nu_) - theta_) * root;
  const double a2 = (std::pow(x / y, 1.0 / nu_) - theta_) * root;
  return y * special::t_cdf(a1, nu_ + 1.0) + x * special::t_cdf(a2, nu_ + 1.0);
}

double TExtremeValue::cdf(const Point& u) const {
  check_point(u);
  if (u[0] == 0.0 || u[1] == 0.0) return 0.0;
  if (u[0] == 1.0 && u[1] == 1.0) return 1.0;
  if (u[0] == 1.0) return u[1];
  if (u[1] == 1.0) return u[0];
  return std::exp(-stable_tail(-std::log(u[0]), -std::log(u[1])));
}

CopulaPtr TExtremeValue::attractor() const {
  return std::make_shared<TExtremeValue>(nu_, theta_);
}

double TExtremeValue::limit_partial(int j, const Point& u) const {
  check_point(u);
  if (j < 0 || j >= 2) throw std::invalid_argument("limit_partial: bad coordinate");
  const double uj = u[static_cast<size_t>(j)];
  if (uj <= 0.0 || uj >= 1.0) return 0.0;
  if (u[1 - static_cast<size_t>(j)] == 0.0) return 0.0;
  const double x = -std::log(u[0]), y = -std::log(u[1]);
  const double h = 1e-6 * std::max({x, y, 1.0});
  const double c = cdf(u);
  double dl;
  if (j == 0)
    dl = (stable_tail(x + h, y) - stable_tail(std::max(x - h, 0.0), y)) /
         (h + std::min(h, x));
  else
    dl = (stable_tail(x, y + h) - stable_tail(x, std::max(y - h, 0.0))) /
         (h + std::min(h, y));
  return c * dl / uj;
}

Matrix TExtremeValue::sample(long, RngStream&) const {
  throw std::logic_error("t extreme-value copula is a ground-truth object; no sampler");
}

std::map<std::string, std::string> TExtremeValue::descriptor() const {
  return {{"family", "t_ev"}, {"nu", std::to_string(nu_)}, {"theta", fmt(theta_)},
          {"d", "2"}};
}

// ---------------------------------------------------------------------------
// free functions
// ---------------------------------------------------------------------------

double stable_tail_dependence(const Copula& model, double x, double y) {
  if (const auto* t = dynamic_cast<const TCopula*>(&model)) return t->stable_tail(x, y);
  if (const auto* ev = dynamic_cast<const TExtremeValue*>(&model))
    return ev->stable_tail(x, y);
  throw std::invalid_argument("stable_tail_dependence: model is not a bivariate t family");
}

CopulaPtr copula_from_descriptor(const std::map<std::string, std::string>& kv) {
  const auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument("copula descriptor: missing key '" + key + "'");
    return it->second;
  };
  const std::string family = get("family");
  if (family == "gumbel")
    return std::make_shared<GumbelHougaard>(std::stod(get("beta")), std::stoi(get("d")));
  if (family == "opclayton")
    return std::make_shared<OuterPowerClayton>(std::stod(get("theta")),
                                               std::stod(get("beta")), std::stoi(get("d")));
  if (family == "t")
    return std::make_shared<TCopula>(std::stoi(get("nu")), std::stod(get("theta")),
                                     std::stoi(get("d")));
  if (family == "t_ev")
    return std::make_shared<TExtremeValue>(std::stoi(get("nu")), std::stod(get("theta")));
  throw std::invalid_argument("copula descriptor: unknown family '" + family + "'");
}

}  // namespace blockmax
