#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fgl/geometry.hpp"

namespace fgl {

struct DivisorPoint {
  double y = 0.0;
  int delta = 0;  // -1, 0, +1; 0 exactly at gap endpoints
};

// One point per gap, gap j = (a[2j+1], a[2j+2]).
using GapDivisor = std::vector<DivisorPoint>;

// Throws InputError unless div has one valid entry per gap.
void validate_divisor(const IntervalSystem& sys, const GapDivisor& div);

// Loop angle in [0, 2pi): y = mid - half cos(theta), delta = sign(sin(theta)).
double divisor_angle(const IntervalSystem& sys, int j, const DivisorPoint& p);
DivisorPoint divisor_from_angle(const IntervalSystem& sys, int j, double theta);

struct RiemannData {
  Eigen::MatrixXd e;     // row k: coefficients of the numerator of phi_k, degree <= l-2
  Eigen::MatrixXd B;     // symmetric, negative definite
  Eigen::MatrixXd Binv;
  Eigen::MatrixXd full_gap;  // full_gap(j, k) = integral of phi_k over gap j
  int nodes = 0;
};

RiemannData riemann_data(const IntervalSystem& sys, int nodes = 64);

// Integral of phi_k over band j divided by 2*pi*i (the alpha-period), computed with n nodes.
Eigen::MatrixXd alpha_periods(const RiemannData& rd, const IntervalSystem& sys, int nodes);

// Abel map of a gap divisor into R^{l-1}.
Eigen::VectorXd abel_map(const RiemannData& rd, const IntervalSystem& sys, const GapDivisor& div);

// Solves B t = v and reduces each coordinate to [0, 1).
Eigen::VectorXd torus_coords(const RiemannData& rd, const Eigen::VectorXd& v);

GapDivisor jacobi_invert(const RiemannData& rd, const IntervalSystem& sys,
                         const Eigen::VectorXd& t);

// Max over k of the mod-1 distance between 1/2 sum_j delta_j omega_k(y_j) and the Abel torus
// coordinate.
double check_abel_consistency(const RiemannData& rd, const EquilibriumData& eq,
                              const IntervalSystem& sys, const GapDivisor& div);

// Distance of x from the nearest integer.
double dist_mod1(double x);

}  // namespace fgl
