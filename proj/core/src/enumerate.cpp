#include "spi2/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace spi2 {

std::optional<std::size_t> reference_symmetry_count(const std::string& id) {
  static const std::map<std::string, std::size_t> counts{
      {"cuboid-2", 16}, {"cuboid-4", 44}, {"cuboid-6", 136},
      {"lshape-2", 1},  {"lshape-4", 8},  {"lshape-6", 48}};
  const auto it = counts.find(id);
  if (it == counts.end()) return std::nullopt;
  return it->second;
}

std::vector<Eigen::Matrix3i> axis_rotations(bool reflections) {
  std::vector<Eigen::Matrix3i> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      Eigen::Matrix3i m = Eigen::Matrix3i::Zero();
      for (int r = 0; r < 3; ++r) m(r, perm[r]) = (signs >> r) & 1 ? -1 : 1;
      if (reflections || m.cast<double>().determinant() > 0.0) out.push_back(m);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

using Vec3i = Eigen::Vector3i;

// Cells and ports in doubled coordinates so half-integer ports stay exact.
struct Orientation {
  std::vector<Vec3i> cells;  // cell min corners, lexicographically sorted by (z, y, x)
  std::vector<Vec3i> ports;  // doubled
};

bool lex_less(const Vec3i& a, const Vec3i& b) {
  if (a.z() != b.z()) return a.z() < b.z();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.x() < b.x();
}

std::vector<Orientation> orientations(const CellShape& shape) {
  std::vector<Orientation> out;
  std::set<std::vector<int>> seen;
  for (const auto& rot : axis_rotations()) {
    std::vector<Vec3i> centers;
    for (const auto& c : shape.cells) centers.push_back(rot * (2 * c + Vec3i::Ones()));
    Vec3i lo = centers.front();
    for (const auto& c : centers) lo = lo.cwiseMin(c);
    const Vec3i shift = lo - Vec3i::Ones();
    Orientation o;
    for (const auto& c : centers) o.cells.push_back((c - shift - Vec3i::Ones()) / 2);
    std::sort(o.cells.begin(), o.cells.end(), lex_less);
    for (const auto& p : shape.ports) {
      const Vec3i doubled = (2.0 * p).array().round().cast<int>();
      o.ports.push_back(rot * doubled - shift);
    }
    std::vector<int> key;
    for (const auto& c : o.cells) key.insert(key.end(), {c.x(), c.y(), c.z()});
    for (const auto& p : o.ports) key.insert(key.end(), {p.x(), p.y(), p.z()});
    if (seen.insert(key).second) out.push_back(std::move(o));
  }
  return out;
}

// True when the open segment (a, b) enters the interior of the unit cell.
bool crosses_cell(const Vec3& a, const Vec3& b, const Vec3i& cell) {
  constexpr double eps = 1e-9;
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double lo = cell[k] + eps, hi = cell[k] + 1 - eps;
    const double d = b[k] - a[k];
    if (std::abs(d) < 1e-15) {
      if (a[k] <= lo || a[k] >= hi) return false;
      continue;
    }
    double ta = (lo - a[k]) / d, tb = (hi - a[k]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  return t0 < t1;
}

class Search {
 public:
  Search(const CellBenchmark& bench, Vec3i dims, std::uint64_t budget, std::uint64_t& nodes)
      : bench_(bench), dims_(dims), budget_(budget), nodes_(nodes) {
    for (const auto& s : bench.shapes) orient_.push_back(orientations(s));
    grid_.assign(dims.prod(), -1);
    placed_.resize(bench.shapes.size());
    used_.assign(bench.shapes.size(), false);
  }

  void run(std::set<std::vector<int>>& found) {
    found_ = &found;
    recurse(0);
  }

 private:
  struct Placed {
    const Orientation* o = nullptr;
    Vec3i t = Vec3i::Zero();
  };

  int index(const Vec3i& c) const { return (c.z() * dims_.y() + c.y()) * dims_.x() + c.x(); }
  bool inside(const Vec3i& c) const {
    return (c.array() >= 0).all() && (c.array() < dims_.array()).all();
  }

  void recurse(int from) {
    if (++nodes_ > budget_) throw ModelError("enumeration node budget exceeded");
    int first = from;
    while (first < static_cast<int>(grid_.size()) && grid_[first] >= 0) ++first;
    if (first == static_cast<int>(grid_.size())) {
      if (std::all_of(used_.begin(), used_.end(), [](bool u) { return u; })) record();
      return;
    }
    const Vec3i e(first % dims_.x(), (first / dims_.x()) % dims_.y(), first / (dims_.x() * dims_.y()));
    for (std::size_t b = 0; b < orient_.size(); ++b) {
      if (used_[b]) continue;
      for (const auto& o : orient_[b]) {
        // Every earlier cell is taken, so e must be this body's first cell.
        const Vec3i t = e - o.cells.front();
        bool fits = true;
        for (const auto& c : o.cells) {
          const Vec3i w = c + t;
          if (!inside(w) || grid_[index(w)] >= 0) {
            fits = false;
            break;
          }
        }
        if (!fits) continue;
        for (const auto& c : o.cells) grid_[index(c + t)] = static_cast<int>(b);
        used_[b] = true;
        placed_[b] = {&o, t};
        recurse(first + 1);
        used_[b] = false;
        for (const auto& c : o.cells) grid_[index(c + t)] = -1;
      }
    }
  }

  Vec3 port_world(const PortRef& ref) const {
    const Placed& p = placed_[ref.body];
    return 0.5 * (p.o->ports[ref.port] + 2 * p.t).cast<double>();
  }

  void record() {
    double length = 0.0;
    for (const auto& [from, to] : bench_.routes) {
      const Vec3 a = port_world(from), b = port_world(to);
      length += (b - a).norm();
      if (length > bench_.optimum.routing_length + 1e-9) return;
      for (std::size_t b_i = 0; b_i < placed_.size(); ++b_i) {
        for (const auto& c : placed_[b_i].o->cells) {
          if (crosses_cell(a, b, c + placed_[b_i].t)) return;
        }
      }
    }
    if (std::abs(length - bench_.optimum.routing_length) > 1e-9) return;
    std::vector<int> key;
    for (const auto& p : placed_) {
      std::vector<Vec3i> cells;
      for (const auto& c : p.o->cells) cells.push_back(c + p.t);
      std::sort(cells.begin(), cells.end(), lex_less);
      for (const auto& c : cells) key.insert(key.end(), {c.x(), c.y(), c.z()});
      for (const auto& q : p.o->ports) {
        const Vec3i w = q + 2 * p.t;
        key.insert(key.end(), {w.x(), w.y(), w.z()});
      }
    }
    found_->insert(std::move(key));
  }

  const CellBenchmark& bench_;
  Vec3i dims_;
  std::uint64_t budget_;
  std::uint64_t& nodes_;
  std::vector<std::vector<Orientation>> orient_;
  std::vector<int> grid_;
  std::vector<Placed> placed_;
  std::vector<bool> used_;
  std::set<std::vector<int>>* found_ = nullptr;
};

// Smallest key over every global symmetry, with body blocks sorted.
std::vector<int> canonical_key(const std::vector<int>& key, const std::vector<CellShape>& shapes,
                               const std::vector<Eigen::Matrix3i>& symmetries) {
  std::vector<int> best;
  for (const auto& m : symmetries) {
    // Doubled coordinates: cell min corners become 2c, cell centers 2c + 1.
    std::vector<std::vector<Vec3i>> centers(shapes.size()), ports(shapes.size());
    std::size_t pos = 0;
    Vec3i lo = Vec3i::Constant(std::numeric_limits<int>::max());
    for (std::size_t b = 0; b < shapes.size(); ++b) {
      for (std::size_t k = 0; k < shapes[b].cells.size(); ++k, pos += 3) {
        const Vec3i c(key[pos], key[pos + 1], key[pos + 2]);
        centers[b].push_back(m * (2 * c + Vec3i::Ones()));
        lo = lo.cwiseMin(centers[b].back());
      }
      for (std::size_t k = 0; k < shapes[b].ports.size(); ++k, pos += 3) {
        ports[b].push_back(m * Vec3i(key[pos], key[pos + 1], key[pos + 2]));
      }
    }
    const Vec3i shift = lo - Vec3i::Ones();
    std::vector<std::vector<int>> blocks;
    for (std::size_t b = 0; b < shapes.size(); ++b) {
      std::vector<Vec3i> cells;
      for (const auto& c : centers[b]) cells.push_back((c - shift - Vec3i::Ones()) / 2);
      std::sort(cells.begin(), cells.end(), lex_less);
      std::vector<int> block;
      for (const auto& c : cells) block.insert(block.end(), {c.x(), c.y(), c.z()});
      for (const auto& p : ports[b]) {
        const Vec3i w = p - shift;
        block.insert(block.end(), {w.x(), w.y(), w.z()});
      }
      blocks.push_back(std::move(block));
    }
    std::sort(blocks.begin(), blocks.end());
    std::vector<int> flat;
    for (const auto& b : blocks) flat.insert(flat.end(), b.begin(), b.end());
    if (best.empty() || flat < best) best = std::move(flat);
  }
  return best;
}

}  // namespace

EnumerationResult enumerate_discrete_optima(const std::string& benchmark,
                                            const EnumerationOptions& options) {
  const CellBenchmark bench = cell_benchmark(benchmark);
  const long volume = std::lround(bench.optimum.volume);
  std::size_t total_cells = 0;
  for (const auto& s : bench.shapes) total_cells += s.cells.size();
  if (static_cast<long>(total_cells) != volume) {
    throw ModelError("enumeration needs bodies that exactly fill the optimal volume");
  }
  EnumerationResult out;
  out.id = benchmark;
  out.reference_count = reference_symmetry_count(benchmark);
  std::set<std::vector<int>> found;
  for (long a = 1; a <= volume; ++a) {
    if (volume % a) continue;
    for (long b = 1; b <= volume / a; ++b) {
      if ((volume / a) % b) continue;
      const long c = volume / a / b;
      Search search(bench, Vec3i(a, b, c), options.node_budget, out.nodes);
      search.run(found);
      ++out.boxes;
    }
  }
  out.count = found.size();
  const auto symmetries = axis_rotations(true);
  std::set<std::vector<int>> classes;
  for (const auto& key : found) classes.insert(canonical_key(key, bench.shapes, symmetries));
  out.symmetry_classes = classes.size();
  return out;
}

}  // namespace spi2
