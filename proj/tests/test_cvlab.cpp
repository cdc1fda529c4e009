#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "povmc/cvlab.hpp"
#include "povmc/errors.hpp"
#include "support.hpp"

using namespace povmc;
using povmc::testing::max_abs;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Explicit sum H_n(x) = n! sum_m (-1)^m (2x)^(n-2m) / (m! (n-2m)!).
double hermite_explicit(int n, double x) {
  double s = 0.0;
  for (int m = 0; 2 * m <= n; ++m)
    s += std::pow(-1.0, m) * std::pow(2 * x, n - 2 * m) / (std::tgamma(m + 1.0) * std::tgamma(n - 2 * m + 1.0));
  return std::tgamma(n + 1.0) * s;
}

double psi_oracle(int n, double x) {
  const double norm = std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(M_PI));
  return hermite_explicit(n, x) * std::exp(-0.5 * x * x) / norm;
}

double trapezoid_overlap(int j, int k, double lo, double hi, int steps = 20000) {
  const double h = (hi - lo) / steps;
  double s = 0.5 * (psi_oracle(j, lo) * psi_oracle(k, lo) + psi_oracle(j, hi) * psi_oracle(k, hi));
  for (int i = 1; i < steps; ++i) {
    const double x = lo + i * h;
    s += psi_oracle(j, x) * psi_oracle(k, x);
  }
  return s * h;
}

TruncationConfig config(int d, std::vector<double> edges) {
  TruncationConfig c;
  c.fock_dim = d;
  c.bin_edges = std::move(edges);
  return c;
}

double eta_star(int d, int bins) {
  const auto cfg = default_truncation(d, bins);
  const MeasurementSet ms(MeasurementData{binned_position_povm(cfg), binned_momentum_povm(cfg)});
  return jm_depolarizing_robustness(ms).eta;
}

}  // namespace

TEST(CvLab, WavefunctionValuesAtOrigin) {
  EXPECT_NEAR(hermite_wavefunction(0, 0.0), std::pow(M_PI, -0.25), 1e-15);
  EXPECT_NEAR(hermite_wavefunction(1, 0.0), 0.0, 1e-15);
  EXPECT_THROW(hermite_wavefunction(-1, 0.0), DomainError);
}

TEST(CvLab, WavefunctionMatchesExplicitPolynomial) {
  for (int n = 0; n < 8; ++n)
    for (double x : {-2.5, -0.7, 0.3, 1.9})
      EXPECT_NEAR(hermite_wavefunction(n, x), psi_oracle(n, x), 1e-12);
}

TEST(CvLab, OrthonormalityAgainstTrapezoid) {
  const auto full = binned_position_povm(config(5, {-kInf, kInf}));
  ASSERT_EQ(full.size(), 1u);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) {
      const double oracle = trapezoid_overlap(j, k, -12.0, 12.0);
      EXPECT_NEAR(full[0](j, k).real(), oracle, 1e-9);
      EXPECT_NEAR(oracle, j == k ? 1.0 : 0.0, 1e-9);
    }
}

TEST(CvLab, FiniteBinAgainstTrapezoid) {
  const auto q = binned_position_povm(config(4, {-kInf, -0.3, 0.8, kInf}));
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(q[1](j, k).real(), trapezoid_overlap(j, k, -0.3, 0.8), 1e-9);
}

TEST(CvLab, DefaultBinsComplete) {
  for (int d : {1, 3, 6}) {
    const auto cfg = default_truncation(d);
    EXPECT_EQ(cfg.bins(), 8);
    for (const auto& povm : {binned_position_povm(cfg), binned_momentum_povm(cfg)}) {
      Matrix s = Matrix::Zero(d, d);
      for (const auto& e : povm) {
        s += e;
        EXPECT_LT(hermiticity_defect(e), 1e-14);
        EXPECT_GE(min_eigenvalue(e), -1e-12);
      }
      EXPECT_LT(max_abs(s - Matrix::Identity(d, d)), 1e-10);
    }
  }
}

TEST(CvLab, DefaultEdgesAreSymmetricQuantiles) {
  const auto e = default_bin_edges(4);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_TRUE(std::isinf(e[0]) && e[0] < 0);
  EXPECT_TRUE(std::isinf(e[4]) && e[4] > 0);
  EXPECT_NEAR(e[2], 0.0, 1e-15);
  EXPECT_NEAR(e[1], -e[3], 1e-14);
  // |psi_0|^2 mass below e[1] is 1/4.
  EXPECT_NEAR(0.5 * std::erfc(-e[1]), 0.25, 1e-12);
}

TEST(CvLab, ParitySelectionRule) {
  // Mirror-symmetric bin pairs only couple levels of equal parity.
  const auto q = binned_position_povm(default_truncation(5, 8));
  for (int b = 0; b < 4; ++b) {
    const Matrix pair = q[b] + q[7 - b];
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k)
        if ((j + k) % 2) EXPECT_LT(std::abs(pair(j, k)), 1e-12);
  }
}

TEST(CvLab, SingleBinIsIdentity) {
  const auto q = binned_position_povm(config(4, {-kInf, kInf}));
  EXPECT_LT(max_abs(q[0] - Matrix::Identity(4, 4)), 1e-10);
}

TEST(CvLab, HalfLineAtGroundState) {
  const auto q = binned_position_povm(config(1, {-kInf, 0.0, kInf}));
  EXPECT_NEAR(q[0](0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(q[1](0, 0).real(), 0.5, 1e-12);
}

TEST(CvLab, HalfLineOffDiagonal) {
  const auto q = binned_position_povm(config(2, {-kInf, 0.0, kInf}));
  const double v = 1.0 / std::sqrt(2.0 * M_PI);
  EXPECT_NEAR(q[0](0, 1).real(), -v, 1e-12);
  EXPECT_NEAR(q[1](0, 1).real(), v, 1e-12);
}

TEST(CvLab, MomentumPhases) {
  const auto cfg = default_truncation(4, 8);
  const auto q = binned_position_povm(cfg);
  const auto p = binned_momentum_povm(cfg);
  for (std::size_t b = 0; b < q.size(); ++b) {
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(p[b](j, j) - q[b](j, j)), 0.0, 1e-15);
    EXPECT_LT(std::abs(p[b](0, 1) - cplx(0, -1) * q[b](0, 1)), 1e-15);
    EXPECT_LT(std::abs(p[b](0, 2) + q[b](0, 2)), 1e-15);
  }
}

TEST(CvLab, RejectsBadEdges) {
  EXPECT_THROW(binned_position_povm(config(2, {0.0})), ValidationError);
  EXPECT_THROW(binned_position_povm(config(2, {-kInf, 1.0, 0.5, kInf})), ValidationError);
  EXPECT_THROW(binned_position_povm(config(0, {-kInf, kInf})), ValidationError);
}

TEST(CvLab, SingleBinIsCompatible) {
  const auto cfg = config(3, {-kInf, kInf});
  const MeasurementSet ms(MeasurementData{binned_position_povm(cfg), binned_momentum_povm(cfg)});
  EXPECT_DOUBLE_EQ(jm_depolarizing_robustness(ms).eta, 1.0);
}

TEST(CvLab, TwoBinsAtQubitAreIncompatible) {
  EXPECT_LT(eta_star(2, 2), 1.0);
}

TEST(CvLab, RefiningBinsDoesNotRaiseEta) {
  // The 4-bin default edges contain the 2-bin ones, so the coarse pair is a
  // post-processing of the fine pair.
  EXPECT_LE(eta_star(3, 4), eta_star(3, 2) + 2e-4);
}

TEST(CvLab, ThermalSigma) {
  ScanOptions o;
  o.sigma = SigmaChoice::thermal;
  o.beta = std::log(2.0);
  const Matrix s = scan_sigma(o, 3);
  EXPECT_NEAR(s(0, 0).real(), 4.0 / 7.0, 1e-14);
  EXPECT_NEAR(s(2, 2).real(), 1.0 / 7.0, 1e-14);
}

TEST(CvLab, SmallScanRowsAndCsv) {
  ScanOptions o;
  o.dims = {2, 3};
  o.bins = 2;
  o.seesaw_ns = {2};
  const auto rows = incompressibility_scan(o);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].seesaw_n, 1);
  EXPECT_EQ(rows[1].seesaw_n, 2);
  EXPECT_EQ(rows[1].cert_status, "certified");
  EXPECT_DOUBLE_EQ(rows[1].visibility, 1.0);
  EXPECT_EQ(rows[3].cert_status, "heuristic");
  EXPECT_GE(rows[3].visibility, rows[2].visibility - 1e-3);
  for (const auto& r : rows) EXPECT_LT(r.eta_star, 1.0);
  std::ostringstream os;
  write_scan_csv(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "d,bins,eta_star,seesaw_n,visibility,cert_status");
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
    ++n;
  }
  EXPECT_EQ(n, 4);
}
