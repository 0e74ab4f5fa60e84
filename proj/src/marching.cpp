#include "marching.hpp"

#include <cstdint>
#include <map>
#include <set>

namespace pauli2d::detail {

MarchingChains marching_squares(const std::function<double(Point2)>& g, BBox box, int n) {
  const double dx = box.width() / n, dy = box.height() / n;
  std::vector<double> val((size_t)(n + 1) * (n + 1));
  auto V = [&](int i, int j) -> double& { return val[(size_t)j * (n + 1) + i]; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      double v = g(Point2{box.lo.x1 + i * dx, box.lo.x2 + j * dy});
      if (v == 0.0) v = 1e-300;  // push exact zeros off the lattice
      V(i, j) = v;
    }

  // Edge keys: horizontal edge (i,j)-(i+1,j) is 2*(j*(n+1)+i), vertical
  // (i,j)-(i,j+1) is the same + 1.
  auto hkey = [&](int i, int j) { return 2 * ((int64_t)j * (n + 1) + i); };
  auto vkey = [&](int i, int j) { return 2 * ((int64_t)j * (n + 1) + i) + 1; };
  auto edge_point = [&](int64_t key) -> Point2 {
    const bool vert = key & 1;
    const int64_t cellid = key >> 1;
    const int i = (int)(cellid % (n + 1)), j = (int)(cellid / (n + 1));
    if (!vert) {
      const double a = V(i, j), b = V(i + 1, j);
      const double t = a / (a - b);
      return {box.lo.x1 + (i + t) * dx, box.lo.x2 + j * dy};
    }
    const double a = V(i, j), b = V(i, j + 1);
    const double t = a / (a - b);
    return {box.lo.x1 + i * dx, box.lo.x2 + (j + t) * dy};
  };

  std::multimap<int64_t, int64_t> links;
  auto add_seg = [&](int64_t k1, int64_t k2) {
    links.insert({k1, k2});
    links.insert({k2, k1});
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v00 = V(i, j), v10 = V(i + 1, j), v11 = V(i + 1, j + 1),
                   v01 = V(i, j + 1);
      int c = 0;
      if (v00 < 0) c |= 1;
      if (v10 < 0) c |= 2;
      if (v11 < 0) c |= 4;
      if (v01 < 0) c |= 8;
      if (c == 0 || c == 15) continue;
      const int64_t bottom = hkey(i, j), top = hkey(i, j + 1);
      const int64_t left = vkey(i, j), right = vkey(i + 1, j);
      switch (c) {
        case 1: case 14: add_seg(left, bottom); break;
        case 2: case 13: add_seg(bottom, right); break;
        case 3: case 12: add_seg(left, right); break;
        case 4: case 11: add_seg(right, top); break;
        case 6: case 9:  add_seg(bottom, top); break;
        case 7: case 8:  add_seg(left, top); break;
        case 5: case 10: {
          const double vc =
              g(Point2{box.lo.x1 + (i + 0.5) * dx, box.lo.x2 + (j + 0.5) * dy});
          if ((c == 5) == (vc < 0)) {
            add_seg(left, bottom);
            add_seg(right, top);
          } else {
            add_seg(left, top);
            add_seg(bottom, right);
          }
          break;
        }
        default: break;
      }
    }

  MarchingChains out;
  std::set<int64_t> used;
  auto walk = [&](int64_t start, bool as_open) {
    std::vector<int64_t> chain{start};
    used.insert(start);
    int64_t prev = -1, cur = start;
    bool closed = false;
    while (true) {
      auto range = links.equal_range(cur);
      int64_t next = -1;
      for (auto it = range.first; it != range.second; ++it) {
        if (it->second == prev) continue;
        if (it->second == start && chain.size() > 2) {
          next = start;
          break;
        }
        if (!used.count(it->second) && next == -1) next = it->second;
      }
      if (next == -1) break;
      if (next == start) {
        closed = true;
        break;
      }
      used.insert(next);
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    if (chain.size() < 2) return;
    if (as_open && closed) return;  // handled in the closed pass
    std::vector<Point2> pts;
    pts.reserve(chain.size());
    for (const int64_t k : chain) pts.push_back(edge_point(k));
    out.chains.push_back(std::move(pts));
    out.closed.push_back(closed);
  };

  // Open chains start at edge keys with exactly one link.
  std::map<int64_t, int> degree;
  for (const auto& kv : links) degree[kv.first]++;
  for (const auto& [key, deg] : degree)
    if (deg == 1 && !used.count(key)) walk(key, /*as_open=*/true);
  for (const auto& kv : links)
    if (!used.count(kv.first)) walk(kv.first, /*as_open=*/false);
  return out;
}

}  // namespace pauli2d::detail
