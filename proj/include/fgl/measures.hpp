#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fgl/geometry.hpp"
#include "fgl/poly.hpp"
#include "fgl/riemann.hpp"

namespace fgl {

enum class WeightKind { Equilibrium, PolyTimesEquilibrium, Isospectral };

struct PointMass {
  double position = 0.0;
  double mass = 0.0;
};

struct MeasureSpec {
  IntervalSystem system;
  EquilibriumData eq;
  WeightKind kind = WeightKind::Equilibrium;
  Poly q{std::vector<double>{1.0}};  // factor for PolyTimesEquilibrium
  GapDivisor divisor;                // for Isospectral
  std::vector<PointMass> point_masses;  // user-supplied atoms
  std::vector<PointMass> torus_masses;  // atoms implied by the isospectral divisor
};

MeasureSpec make_equilibrium_spec(const IntervalSystem& sys, const EquilibriumData& eq);
MeasureSpec make_poly_spec(const IntervalSystem& sys, const EquilibriumData& eq, const Poly& q);
// Absolutely continuous part h/(2 pi G), G = prod (t - y_j), plus an atom at every y_j whose
// residue of (F - sqrt(H))/(2G) is positive.
MeasureSpec make_isospectral(const IntervalSystem& sys, const EquilibriumData& eq,
                             const GapDivisor& div);
// Adds an atom and revalidates.
MeasureSpec with_point_mass(MeasureSpec spec, double position, double mass);

// Throws InputError or ConventionError when an invariant fails.
void validate(const MeasureSpec& spec);

// Density of the absolutely continuous part at x (0 off the open bands).
double ac_density(const MeasureSpec& spec, double x);

struct DiscreteMeasure {
  std::vector<double> nodes;
  std::vector<double> weights;
  double total_mass = 0.0;
  int ac_nodes = 0;  // leading nodes that discretize the absolutely continuous part
};

DiscreteMeasure discretize(const MeasureSpec& spec, int nodes_per_band);

// Sum of w_k / (z - x_k).
std::complex<double> markov(const DiscreteMeasure& dm, std::complex<double> z);

struct SzegoResult {
  bool minus_infinity = false;
  double value = 0.0;
};

// Integral over E of log(w) times the equilibrium density.
SzegoResult szego_integral(const MeasureSpec& spec, int nodes_per_band = 512);
SzegoResult szego_integral(const IntervalSystem& sys, const EquilibriumData& eq,
                           const std::function<double(double)>& density, int nodes_per_band);

struct RecurrenceTable {
  std::vector<double> alpha;   // alpha_1..alpha_N at index 0..N-1
  std::vector<double> lambda;  // lambda_1..lambda_N, lambda_1 = total mass
  int N = 0;

  double a(int n) const { return alpha.at(n - 1); }
  double l(int n) const { return lambda.at(n - 1); }
};

RecurrenceTable recurrence(const DiscreteMeasure& dm, int N);

// Discrete measure, its recurrence table and the orthonormal basis on the nodes.
struct OrthoModel {
  DiscreteMeasure dm;
  RecurrenceTable rt;
  std::vector<double> sqrt_w;
  // v[n][k] = sqrt(w_k) P_n(x_k), n = 0..N-1; rows are orthonormal.
  std::vector<std::vector<double>> v;

  double P_at_node(int n, int k) const { return v[n][k] / sqrt_w[k]; }
};

OrthoModel build_model(const DiscreteMeasure& dm, int N);

double eval_orthonormal(const RecurrenceTable& rt, double x, int n);
std::complex<double> eval_orthonormal(const RecurrenceTable& rt, std::complex<double> z, int n);
double eval_monic(const RecurrenceTable& rt, double x, int n);
std::complex<double> eval_monic(const RecurrenceTable& rt, std::complex<double> z, int n);

// Second-kind functions Q_n(z) = sum_k w_k P_n(x_k)/(z - x_k).
double eval_weyl(const OrthoModel& m, double z, int n);
std::complex<double> eval_weyl(const OrthoModel& m, std::complex<double> z, int n);
// Direct node sum, used as the reference definition.
std::complex<double> eval_weyl_direct(const OrthoModel& m, std::complex<double> z, int n);

// k = 0: P_n Q_n; k = +1: P_n Q_{n+1}; k = -1: P_{n+1} Q_n.
double green(const OrthoModel& m, double z, int n, int k);
std::complex<double> green(const OrthoModel& m, std::complex<double> z, int n, int k);

// sqrt(lambda_{n+2}) (P_n Q_{n+1} - Q_n P_{n+1}), identically -1.
double wronskian(const OrthoModel& m, double z, int n);
std::complex<double> wronskian(const OrthoModel& m, std::complex<double> z, int n);

struct GapZeros {
  std::vector<std::vector<double>> p;  // per gap
  std::vector<std::vector<double>> q;
};

GapZeros gap_zeros(const OrthoModel& m, const IntervalSystem& sys, int n);

RecurrenceTable strip(const RecurrenceTable& rt, int m);

}  // namespace fgl
