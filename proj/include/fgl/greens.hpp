#pragma once

#include <vector>

#include "fgl/geometry.hpp"
#include "fgl/measures.hpp"
#include "fgl/poly.hpp"
#include "fgl/riemann.hpp"

namespace fgl {

// 1/sqrt(H(z)) = sum c_j z^{-(l+j)} at infinity; sqrt(H*(x)) = sum h_j x^j near 0, where
// H*(x) = x^{2l} H(1/x). c_0 = h_0 = 1.
struct BranchSeries {
  std::vector<double> c;
  std::vector<double> h;
};

BranchSeries branch_series(const IntervalSystem& sys, int order);

// mu[j] = int x^j P_n^2, nu[j] = sqrt(lambda_{n+2}) int x^j P_{n+1} P_n, j = 0..m.
struct MomentWindow {
  int n = 0;
  std::vector<double> mu;
  std::vector<double> nu;
  double lambda_next = 0.0;  // lambda_{n+2}
};

MomentWindow moment_window(const OrthoModel& m, int n, int max_pow);

struct ExtractedPair {
  Poly G;  // monic, degree l-1
  Poly F;  // monic, degree l
  double drift = 0.0;  // departure from monic normalization before rescaling
};

ExtractedPair extract_pair(const BranchSeries& bs, const MomentWindow& mw, int l);

// Roots of G clamped into the gap closures; delta_j = round(-F(y_j)/sqrt(H(y_j))).
GapDivisor pair_to_divisor(const IntervalSystem& sys, const Poly& G, const Poly& F,
                           double sign_tol = 0.2);

// F^2 - H = L G_next G.
struct PellPair {
  Poly G;
  Poly F;
  Poly G_next;
  double L = 0.0;
  double remainder = 0.0;  // sup of the division remainder relative to sup |H| on the hull
};

PellPair divisor_to_pair(const IntervalSystem& sys, const BranchSeries& bs, const GapDivisor& div);

// ((1/pi) int_E x^j G dx/h)_{j=1..l-1} then ((1/2pi) int_E x^j F dx/h)_{j=1..l-1}. Computed by
// band quadrature and by c-series coefficient extraction; disagreement above 1e-9 throws.
std::vector<double> tau(const IntervalSystem& sys, const BranchSeries& bs, const GapDivisor& div,
                        int nodes = 128);

// Inverse of tau through the two triangular systems in the c-series. RangeError when the
// moments are not in the range of tau.
GapDivisor tau_inverse(const IntervalSystem& sys, const BranchSeries& bs,
                       const std::vector<double>& moments, double range_tol = 1e-8);

struct PellReport {
  double pell = 0.0;    // sup |F^2 - H - L G_next G| / sup |H| on the hull
  double lambda = 0.0;  // |L - 4 lambda_next| / L
  double green = 0.0;   // |L - 4 cap^2 prod phi(y)^delta / phi(y')^delta'| / L, NaN if undefined
};

PellReport pell_certificate(const IntervalSystem& sys, const EquilibriumData& eq, const Poly& G,
                            const Poly& F, const Poly& G_next, double L, double lambda_next);

struct PellStep {
  GapDivisor next;
  double L = 0.0;
  double rotation_residual = 0.0;  // max mod-1 error of the rotation law
};

// One step of the Pell recursion. The new signs are delta' = sign(F(y')/sqrt(H(y'))), checked
// against torus(next) = torus(div) - omega(inf) mod 1; ConventionError beyond 1e-7.
PellStep pell_step(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
                   const BranchSeries& bs, const GapDivisor& div);
PellStep pell_step(const IntervalSystem& sys, const EquilibriumData& eq, const GapDivisor& div);

struct R31Residuals {
  std::vector<double> moment;  // indexed by m' = l .. max
  std::vector<double> cross;   // indexed by m' = l+1 .. max+1
};

R31Residuals corR31_residuals(const BranchSeries& bs, const MomentWindow& mw, int l);

// Window of m alphas and m lambdas around level n. Alphas are x_i = alpha_{n+i} for
// i = x_first..x_first+m-1, lambdas y_i = lambda_{n+i} for i = y_first..y_first+m-1.
struct Window {
  int m = 0;
  std::vector<double> x;
  std::vector<double> y;
  int x_first() const { return 1 - (m - 1) / 2; }
  int y_first() const { return 2 - m / 2; }
};

Window make_window(const std::vector<double>& x, const std::vector<double>& y);
Window window_from_table(const RecurrenceTable& rt, int n, int m);

// (I_{1,0}, sqrt(y_2) I_{1,1}, ..., I_{m,0}, sqrt(y_2) I_{m,1}) with I_{j,k} = (J^j)_{0,k}.
std::vector<double> imap(const Window& w);
// Peels the outermost entries level by level; RangeError on a non-positive lambda.
Window imap_inverse(const std::vector<double>& tuple);

// Shift of a limit window by one level: imap_inverse . tau . pell_step . tau_inverse . imap.
Window psi(const IntervalSystem& sys, const EquilibriumData& eq, const RiemannData& rd,
           const BranchSeries& bs, const Window& w);

struct TwoIntervalLimits {
  double alpha = 0.0;
  double lambda = 0.0;
};

TwoIntervalLimits two_interval_limits(const IntervalSystem& sys, const BranchSeries& bs, double y,
                                      int delta);

}  // namespace fgl
