#include "spi2/objectives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spi2/boundary.hpp"
#include "spi2/physics.hpp"
#include "spi2/smooth.hpp"

namespace spi2 {

namespace {

template <typename F>
void for_each_segment(const WorldFrame& frame, F&& f) {
  for (std::size_t r = 0; r < frame.n_routes(); ++r) {
    const auto nodes = frame.route_nodes(r);
    for (std::size_t m = 0; m + 1 < nodes.size(); ++m) f(r, m, nodes[m + 1] - nodes[m]);
  }
}

// grad += dphi/dseg routed to both segment endpoints.
void add_segment_gradient(const WorldFrame& frame, std::size_t r, std::size_t m, const Vec3& g,
                          VecX& grad) {
  frame.add_route_node_gradient(r, m + 1, g, grad);
  frame.add_route_node_gradient(r, m, -g, grad);
}

}  // namespace

double routing_length_sq(const WorldFrame& frame, VecX* grad) {
  double total = 0.0;
  for_each_segment(frame, [&](std::size_t r, std::size_t m, const Vec3& seg) {
    total += seg.squaredNorm();
    if (grad) add_segment_gradient(frame, r, m, 2.0 * seg, *grad);
  });
  return total;
}

double routing_length_sq(const VecX& x, const ProblemSpec& spec, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return routing_length_sq(spec.frame(layout, x), grad);
}

double routing_length_linear(const WorldFrame& frame) {
  double total = 0.0;
  for_each_segment(frame, [&](std::size_t, std::size_t, const Vec3& seg) { total += seg.norm(); });
  return total;
}

double routing_length_linear(const VecX& x, const ProblemSpec& spec) {
  const DesignLayout layout = spec.layout();
  return routing_length_linear(spec.frame(layout, x));
}

double routing_exponential(const WorldFrame& frame, double gamma, VecX* grad) {
  if (!(gamma > 0.0)) throw ModelError("exponential routing gamma must be positive");
  double total = 0.0;
  for_each_segment(frame, [&](std::size_t r, std::size_t m, const Vec3& seg) {
    const double arg = gamma * seg.squaredNorm();
    if (arg >= kExponentCap) {
      total += std::expm1(kExponentCap);
      return;
    }
    total += std::expm1(arg);
    if (grad) add_segment_gradient(frame, r, m, 2.0 * gamma * std::exp(arg) * seg, *grad);
  });
  return total;
}

double routing_exponential(const VecX& x, const ProblemSpec& spec, double gamma, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return routing_exponential(spec.frame(layout, x), gamma, grad);
}

double smooth_aabb_volume(const WorldFrame& frame, double alpha, VecX* grad) {
  if (!(alpha > 0.0)) throw ModelError("volume sharpness must be positive");
  const std::size_t n = frame.total_spheres();
  if (n == 0) throw ModelError("volume needs at least one sphere");
  std::vector<double> hi(n), lo(n);
  std::vector<double> w_hi, w_lo;
  Vec3 extent;
  std::array<std::vector<double>, 3> dext;  // d extent_k / d center_k per sphere
  for (int k = 0; k < 3; ++k) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
      const auto centers = frame.sphere_centers(i);
      for (std::size_t s = 0; s < centers.size(); ++s, ++idx) {
        const double r = frame.sphere_radius(i, s);
        hi[idx] = centers[s][k] + r;
        lo[idx] = centers[s][k] - r;
      }
    }
    extent[k] = boltzmann_max(hi, alpha, grad ? &w_hi : nullptr) -
                boltzmann_min(lo, alpha, grad ? &w_lo : nullptr);
    if (grad) {
      dext[k].resize(n);
      for (std::size_t j = 0; j < n; ++j) dext[k][j] = w_hi[j] - w_lo[j];
    }
  }
  const double volume = extent.prod();
  if (grad) {
    const Vec3 dv(extent.y() * extent.z(), extent.x() * extent.z(), extent.x() * extent.y());
    std::size_t idx = 0;
    for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
      for (std::size_t s = 0; s < frame.body(i).spheres.size(); ++s, ++idx) {
        const Vec3 g(dv.x() * dext[0][idx], dv.y() * dext[1][idx], dv.z() * dext[2][idx]);
        frame.add_sphere_gradient(i, s, g, *grad);
      }
    }
  }
  return volume;
}

double smooth_aabb_volume(const VecX& x, const ProblemSpec& spec, double alpha, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return smooth_aabb_volume(spec.frame(layout, x), alpha, grad);
}

Aabb exact_aabb(const WorldFrame& frame) {
  if (frame.total_spheres() == 0) throw ModelError("volume needs at least one sphere");
  Aabb box{Vec3::Constant(std::numeric_limits<double>::infinity()),
           Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (std::size_t i = 0; i < frame.n_bodies(); ++i) {
    const auto centers = frame.sphere_centers(i);
    for (std::size_t s = 0; s < centers.size(); ++s) {
      const double r = frame.sphere_radius(i, s);
      box.lower = box.lower.cwiseMin(centers[s] - Vec3::Constant(r));
      box.upper = box.upper.cwiseMax(centers[s] + Vec3::Constant(r));
    }
  }
  return box;
}

double exact_aabb_volume(const WorldFrame& frame) { return exact_aabb(frame).volume(); }

double exact_aabb_volume(const VecX& x, const ProblemSpec& spec) {
  const DesignLayout layout = spec.layout();
  return exact_aabb_volume(spec.frame(layout, x));
}

double mean_pairwise_distance(const WorldFrame& frame, VecX* grad) {
  const std::size_t n = frame.n_bodies();
  if (n < 2) throw ModelError("mean pairwise distance needs at least two bodies");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs += frame.sphere_centers(i).size() * frame.sphere_centers(j).size();
    }
  }
  const double scale = 1.0 / static_cast<double>(pairs);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = frame.sphere_centers(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto cj = frame.sphere_centers(j);
      for (std::size_t a = 0; a < ci.size(); ++a) {
        for (std::size_t b = 0; b < cj.size(); ++b) {
          const Vec3 diff = ci[a] - cj[b];
          const double len = guarded_norm(diff);
          sum += len;
          if (grad) {
            const Vec3 g = (scale / len) * diff;
            frame.add_sphere_gradient(i, a, g, *grad);
            frame.add_sphere_gradient(j, b, -g, *grad);
          }
        }
      }
    }
  }
  return sum * scale;
}

double mean_pairwise_distance(const VecX& x, const ProblemSpec& spec, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return mean_pairwise_distance(spec.frame(layout, x), grad);
}

ObjectiveBreakdown total_objective(const WorldFrame& frame, const ProblemSpec& spec,
                                   const ObjectiveWeights& w, VecX* grad) {
  w.validate();
  ObjectiveBreakdown out;
  VecX scratch;
  // Each term's gradient is scaled by its weight, so accumulate per term.
  const auto term = [&](double weight, auto&& eval) {
    if (weight == 0.0) return 0.0;
    if (!grad) return eval(nullptr);
    scratch.setZero(grad->size());
    const double v = eval(&scratch);
    *grad += weight * scratch;
    return v;
  };
  out.routing = term(w.routing, [&](VecX* g) {
    return w.routing_variant == RoutingVariant::Quadratic ? routing_length_sq(frame, g)
                                                          : routing_exponential(frame, w.gamma, g);
  });
  if (spec.boundary) {
    out.boundary = term(w.boundary, [&](VecX* g) {
      return boundary_objective(frame, *spec.boundary, g);
    });
  }
  out.cog = term(w.cog, [&](VecX* g) { return f_cog(frame, spec.cog_target, g); });
  out.inertia = term(w.inertia, [&](VecX* g) { return f_inertia(frame, w.inertia_axes, g); });
  out.volume = term(w.volume, [&](VecX* g) { return smooth_aabb_volume(frame, w.alpha_volume, g); });
  out.mean_distance = term(w.mean_distance, [&](VecX* g) {
    return mean_pairwise_distance(frame, g);
  });
  out.total = w.routing * out.routing + w.boundary * out.boundary + w.cog * out.cog +
              w.inertia * out.inertia + w.volume * out.volume +
              w.mean_distance * out.mean_distance;
  return out;
}

ObjectiveBreakdown total_objective(const VecX& x, const ProblemSpec& spec,
                                   const ObjectiveWeights& weights, VecX* grad) {
  const DesignLayout layout = spec.layout();
  return total_objective(spec.frame(layout, x), spec, weights, grad);
}

}  // namespace spi2
