#include "spi2/physics.hpp"

namespace spi2 {

MassState mass_state(const WorldFrame& frame) {
  MassState s;
  std::vector<Vec3> cogs;
  cogs.reserve(frame.n_bodies());
  for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
    const Body& b = frame.body(i);
    cogs.push_back(frame.world_point(i, b.cog_local));
    s.total_mass += b.mass;
    s.p_G += b.mass * cogs.back();
  }
  if (!(s.total_mass > 0.0)) throw ModelError("total mass must be positive");
  s.p_G /= s.total_mass;
  s.d.reserve(cogs.size());
  for (std::size_t i = 0; i < cogs.size(); ++i) {
    const Body& b = frame.body(i);
    const Mat3& r = frame.rotation(i).value;
    const Vec3 d = cogs[i] - s.p_G;
    s.I_tot += r * b.inertia_local * r.transpose();
    s.I_tot += b.mass * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
    s.d.push_back(d);
  }
  s.I_tot = 0.5 * (s.I_tot + s.I_tot.transpose()).eval();
  return s;
}

MassState mass_state(const VecX& x, const ProblemSpec& spec) {
  const DesignLayout layout = spec.layout();
  return mass_state(spec.frame(layout, x));
}

Vec3 global_cog(const VecX& x, const ProblemSpec& spec) { return mass_state(x, spec).p_G; }

Mat3 inertia_about_global_cog(const VecX& x, const ProblemSpec& spec) {
  return mass_state(x, spec).I_tot;
}

double f_cog(const WorldFrame& frame, const Vec3& target, VecX* grad) {
  const MassState s = mass_state(frame);
  const Vec3 e = s.p_G - target;
  if (grad) {
    for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
      const Body& b = frame.body(i);
      frame.add_body_point_gradient(i, b.cog_local, (2.0 * b.mass / s.total_mass) * e, *grad);
    }
  }
  return e.squaredNorm();
}

double f_cog(const VecX& x, const ProblemSpec& spec, const Vec3& target, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return f_cog(spec.frame(layout, x), target, grad);
}

double f_inertia(const WorldFrame& frame, const Vec3& w, VecX* grad) {
  const MassState s = mass_state(frame);
  if (grad) {
    // d(I_aa)/d(d_k) = 2 m d_k for a != k; the p_G dependence cancels
    // because sum_i m_i d_i = 0.
    const Vec3 other(w.y() + w.z(), w.x() + w.z(), w.x() + w.y());
    const std::size_t n = frame.n_bodies();
    for (std::size_t i = 0; i < n; ++i) {
      const Body& b = frame.body(i);
      const Vec3 g = 2.0 * b.mass * s.d[i].cwiseProduct(other);
      frame.add_body_point_gradient(i, b.cog_local, g, *grad);
      const auto& jet = frame.rotation(i);
      const Mat3 ir = b.inertia_local * jet.value.transpose();
      const std::size_t o = frame.layout().pose_offset(i);
      for (int a = 0; a < 3; ++a) {
        const Mat3 dm = jet.partials[a] * ir;
        (*grad)[o + a] += 2.0 * w.dot(dm.diagonal());
      }
    }
  }
  return w.dot(s.I_tot.diagonal());
}

double f_inertia(const VecX& x, const ProblemSpec& spec, const Vec3& w, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return f_inertia(spec.frame(layout, x), w, grad);
}

}  // namespace spi2
