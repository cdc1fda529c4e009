#include "povmc/cvlab.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "povmc/errors.hpp"

namespace povmc {

double hermite_wavefunction(int k, double x) {
  if (k < 0) throw DomainError("hermite_wavefunction: negative index");
  const double g = std::exp(-0.5 * x * x) / std::pow(M_PI, 0.25);
  double prev = 0.0, cur = g;
  for (int j = 0; j < k; ++j) {
    const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> default_bin_edges(int count) {
  if (count < 1) throw DomainError("default_bin_edges: need at least one bin");
  const double inf = std::numeric_limits<double>::infinity();
  boost::math::normal_distribution<double> n01;
  std::vector<double> edges{-inf};
  for (int k = 1; k < count; ++k)
    edges.push_back(boost::math::quantile(n01, double(k) / count) / std::sqrt(2.0));
  edges.push_back(inf);
  return edges;
}

TruncationConfig default_truncation(int fock_dim, int bins) {
  TruncationConfig cfg;
  cfg.fock_dim = fock_dim;
  cfg.bin_edges = default_bin_edges(bins);
  return cfg;
}

void validate_truncation(const TruncationConfig& cfg) {
  if (cfg.fock_dim < 1) throw ValidationError("truncation: fock_dim must be positive");
  if (cfg.bin_edges.size() < 2) throw ValidationError("truncation: need at least one bin");
  for (std::size_t i = 1; i < cfg.bin_edges.size(); ++i)
    if (!(cfg.bin_edges[i] > cfg.bin_edges[i - 1]))
      throw ValidationError("truncation: bin edges must be strictly increasing");
  if (!(cfg.quadrature_tol > 0.0)) throw ValidationError("truncation: quadrature_tol must be positive");
}

EffectList binned_position_povm(const TruncationConfig& cfg) {
  validate_truncation(cfg);
  const int d = cfg.fock_dim;
  // Beyond this the integrands are below double precision.
  const double cut = std::sqrt(2.0 * d) + 8.0;
  using Gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  EffectList out;
  for (int b = 0; b < cfg.bins(); ++b) {
    const double lo = std::max(cfg.bin_edges[b], -cut);
    const double hi = std::min(cfg.bin_edges[b + 1], cut);
    Matrix m = Matrix::Zero(d, d);
    if (hi > lo) {
      for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
          double err = 0.0;
          auto f = [j, k](double x) { return hermite_wavefunction(j, x) * hermite_wavefunction(k, x); };
          const double v = Gk::integrate(f, lo, hi, 15, cfg.quadrature_tol, &err);
          if (err > 100.0 * cfg.quadrature_tol * std::max(1.0, std::abs(v))) {
            std::ostringstream os;
            os << "binned_position_povm: quadrature error " << err << " on bin " << b;
            throw DomainError(os.str());
          }
          m(j, k) = m(k, j) = v;
        }
    }
    out.push_back(std::move(m));
  }
  return out;
}

EffectList binned_momentum_povm(const TruncationConfig& cfg) {
  EffectList q = binned_position_povm(cfg);
  const cplx phase[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (auto& m : q)
    for (int j = 0; j < m.rows(); ++j)
      for (int k = 0; k < m.cols(); ++k) m(j, k) *= phase[((j - k) % 4 + 4) % 4];
  return q;
}

Matrix scan_sigma(const ScanOptions& opt, int d) {
  Matrix s = Matrix::Zero(d, d);
  if (opt.sigma == SigmaChoice::maximally_mixed) return Matrix::Identity(d, d) / double(d);
  double z = 0.0;
  for (int k = 0; k < d; ++k) z += std::exp(-opt.beta * k);
  for (int k = 0; k < d; ++k) s(k, k) = std::exp(-opt.beta * k) / z;
  return s;
}

std::vector<ScanRow> incompressibility_scan(const ScanOptions& opt) {
  std::vector<ScanRow> rows;
  for (int d : opt.dims) {
    TruncationConfig cfg = default_truncation(d, opt.bins);
    if (!opt.bin_edges.empty()) cfg.bin_edges = opt.bin_edges;
    ScanRow base;
    base.d = d;
    base.bins = cfg.bins();
    std::optional<MeasurementSet> ms;
    std::optional<DensityState> sigma;
    try {
      ms.emplace(MeasurementData{binned_position_povm(cfg), binned_momentum_povm(cfg)});
      sigma.emplace(scan_sigma(opt, d));
      const auto r = jm_depolarizing_robustness(*ms, opt.compat, depolarizing_noise, opt.resolution);
      base.eta_star = r.eta;
      base.eta_certified = r.certified;
    } catch (const Error& e) {
      ScanRow row = base;
      row.cert_status = std::string("error: ") + e.what();
      rows.push_back(row);
      continue;
    }

    ScanRow steer = base;
    steer.seesaw_n = 1;
    try {
      const auto r = lhs_robustness(sandwich(*sigma, *ms), opt.compat, opt.resolution);
      steer.visibility = r.eta;
      steer.cert_status = r.certified && base.eta_certified ? "certified" : "uncertified";
    } catch (const Error& e) {
      steer.cert_status = std::string("error: ") + e.what();
    }
    rows.push_back(steer);

    for (int n : opt.seesaw_ns) {
      ScanRow row = base;
      row.seesaw_n = n;
      if (n >= d) {
        row.visibility = 1.0;
        row.cert_status = "certified";
        rows.push_back(row);
        continue;
      }
      try {
        SeesawOptions so;
        so.n = n;
        so.restarts = opt.seesaw_restarts;
        so.max_rounds = opt.seesaw_max_rounds;
        so.sdp = opt.compat.sdp;
        so.seed = opt.seed;
        so.strategy_cap = opt.compat.strategy_cap;
        const auto r = seesaw_n_prep(sandwich(*sigma, *ms), so);
        row.visibility = r.visibility;
        row.cert_status = "heuristic";
      } catch (const Error& e) {
        row.cert_status = std::string("error: ") + e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "d,bins,eta_star,seesaw_n,visibility,cert_status\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    std::string status = r.cert_status;
    for (auto& c : status)
      if (c == ',' || c == '\n') c = ';';
    os << r.d << ',' << r.bins << ',' << r.eta_star << ',' << r.seesaw_n << ','
       << r.visibility << ',' << status << '\n';
  }
}

}  // namespace povmc
