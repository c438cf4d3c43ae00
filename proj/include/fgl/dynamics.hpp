#pragma once

#include <vector>

#include "fgl/geometry.hpp"
#include "fgl/greens.hpp"
#include "fgl/measures.hpp"
#include "fgl/riemann.hpp"

namespace fgl {

struct ThetaTrack {
  int n0 = 0;                               // level of theta[0]
  std::vector<std::vector<double>> theta;   // each entry in [0,1)^{l-1}
  bool exact = false;                       // from a pell_step orbit rather than moments
};

// 1/2 sum_j delta_j omega_k(y_j) mod 1. An endpoint point contributes 1/2 omega_k(y_j), the
// common limit of both sheets since omega_k is 0 or 1 there.
std::vector<double> theta_of(const EquilibriumData& eq, const IntervalSystem& sys,
                             const GapDivisor& div);

ThetaTrack theta_sequence(const EquilibriumData& eq, const IntervalSystem& sys,
                          const std::vector<GapDivisor>& divisors, int n0 = 0);

// Divisors at levels n0..n1 extracted from the moments of a model.
std::vector<GapDivisor> measured_divisors(const OrthoModel& m, const IntervalSystem& sys,
                                          const BranchSeries& bs, int n0, int n1);

// residual[i] = max_k dist(theta(n0+i+1) - theta(n0+i) + omega_k(inf), Z).
std::vector<double> rotation_residuals(const ThetaTrack& track, const std::vector<double>& omega_inf);

struct Subsequence {
  std::vector<long> indices;
  long max_gap = 0;
  double mean_gap = 0.0;
};

// All 0 <= n <= n_max with max_k dist(n omega_k mod 1, gamma_k) < eps, by direct scan.
Subsequence select_subsequence(const std::vector<double>& omega, const std::vector<double>& gamma,
                               double eps, long n_max);

struct WindowReport {
  double diameter = 0.0;  // max pairwise sup-distance among the last K windows
  int used = 0;
};

WindowReport window_convergence(const RecurrenceTable& rt, const std::vector<long>& indices, int l,
                                int K = 10);

struct Orbit {
  std::vector<GapDivisor> divisors;  // K + 1 entries, starting with div0
  std::vector<double> L;             // K Pell constants
  ThetaTrack track;
  int period = 0;                    // 0 when no repetition was found
};

Orbit torus_orbit(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
                  const BranchSeries& bs, const GapDivisor& div0, int K);

// Star discrepancy of points in [0,1)^d; exact for d = 1 and d = 2.
double star_discrepancy(const std::vector<std::vector<double>>& pts);

}  // namespace fgl
