#pragma once

// Global center of gravity and total inertia of the placed assembly, and the
// objective terms built on them.

#include <vector>

#include "spi2/problem.hpp"

namespace spi2 {

struct MassState {
  double total_mass = 0.0;
  Vec3 p_G = Vec3::Zero();
  Mat3 I_tot = Mat3::Zero();
  /// World CoG of each body minus p_G.
  std::vector<Vec3> d;
};

/// Throws ModelError when the total mass is not positive.
MassState mass_state(const WorldFrame& frame);
MassState mass_state(const VecX& x, const ProblemSpec& spec);

Vec3 global_cog(const VecX& x, const ProblemSpec& spec);
Mat3 inertia_about_global_cog(const VecX& x, const ProblemSpec& spec);

/// |p_G - target|^2.
double f_cog(const WorldFrame& frame, const Vec3& target, VecX* grad = nullptr);
double f_cog(const VecX& x, const ProblemSpec& spec, const Vec3& target, VecX* grad = nullptr);

/// w_x I_xx + w_y I_yy + w_z I_zz of the inertia about p_G.
double f_inertia(const WorldFrame& frame, const Vec3& axis_weights, VecX* grad = nullptr);
double f_inertia(const VecX& x, const ProblemSpec& spec, const Vec3& axis_weights,
                 VecX* grad = nullptr);

}  // namespace spi2
