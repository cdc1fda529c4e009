#pragma once

// Truncated-oscillator discretization of the position/momentum pair:
// binned quadrature POVMs compressed to span{|0>, ..., |d-1>} and a scan of
// their incompatibility and compressibility as d grows. This is a finite
// echo of an infinite-dimensional statement, not a proof of it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "povmc/compat.hpp"
#include "povmc/compress.hpp"
#include "povmc/linalg.hpp"

namespace povmc {

/// Normalized oscillator eigenfunction psi_k(x) (three-term recurrence).
double hermite_wavefunction(int k, double x);

struct TruncationConfig {
  int fock_dim = 2;
  std::vector<double> bin_edges;  // strictly increasing; -inf and +inf at the ends
  double quadrature_tol = 1e-12;

  int bins() const { return static_cast<int>(bin_edges.size()) - 1; }
};

/// Edges at the k/count quantiles of |psi_0(x)|^2 (a normal law with
/// variance 1/2), with infinite outer edges.
std::vector<double> default_bin_edges(int count = 8);
TruncationConfig default_truncation(int fock_dim, int bins = 8);
void validate_truncation(const TruncationConfig& cfg);

/// M_jk(bin) = int_bin psi_j psi_k dx, one effect per bin.
EffectList binned_position_povm(const TruncationConfig& cfg);
/// P_jk(bin) = i^{j-k} M_jk(bin).
EffectList binned_momentum_povm(const TruncationConfig& cfg);

enum class SigmaChoice { maximally_mixed, thermal };

struct ScanOptions {
  std::vector<int> dims{2, 3, 4, 5, 6};
  int bins = 8;
  std::vector<double> bin_edges;  // overrides `bins` when nonempty
  SigmaChoice sigma = SigmaChoice::maximally_mixed;
  double beta = 1.0;              // thermal sigma ~ exp(-beta k)
  std::vector<int> seesaw_ns{2};  // n >= 2 rows (skipped when n >= d)
  int seesaw_restarts = 1;        // 1 = only the start seeded from n = 1
  int seesaw_max_rounds = 20;
  std::uint64_t seed = 0;
  double resolution = 1e-4;
  CompatOptions compat;
};

struct ScanRow {
  int d = 0;
  int bins = 0;
  double eta_star = 0.0;      // JM depolarizing robustness of {Q, P}
  bool eta_certified = false;
  int seesaw_n = 1;
  double visibility = 0.0;    // n = 1: steering robustness; n >= 2: see-saw bound
  std::string cert_status;    // "certified", "uncertified", "heuristic" or "error: ..."
};

Matrix scan_sigma(const ScanOptions& opt, int d);

std::vector<ScanRow> incompressibility_scan(const ScanOptions& opt);

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

}  // namespace povmc
