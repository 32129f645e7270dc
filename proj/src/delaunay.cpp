#include <algorithm>
#include <numeric>
#include <vector>

#include "srefi/error.hpp"
#include "srefi/mesh.hpp"

namespace srefi {

namespace {

// Triangle record for the incremental builder. Vertices are kept in
// positive-orientation order; n[e] is the neighbor across the directed edge
// (v[e], v[(e+1)%3]), or -1 on the boundary.
struct DTri {
  std::array<int, 3> v{-1, -1, -1};
  std::array<int, 3> n{-1, -1, -1};
  bool alive = true;
};

class DelaunayBuilder {
 public:
  explicit DelaunayBuilder(const std::vector<Vec2>& pts) : pts_(pts) {}

  std::vector<Triangle> run();

 private:
  enum class Where { Inside, OnEdge, Outside };
  struct Location {
    Where where;
    int tri = -1;
    int edge = -1;
  };

  const std::vector<Vec2>& pts_;
  std::vector<DTri> tris_;
  std::vector<std::pair<int, int>> flip_stack_;

  int orient(int a, int b, int c) const {
    return orient2d(pts_[a], pts_[b], pts_[c]);
  }

  int make_tri(int a, int b, int c) {
    tris_.push_back(DTri{{a, b, c}, {-1, -1, -1}, true});
    return static_cast<int>(tris_.size()) - 1;
  }

  static int edge_in(const DTri& t, int a, int b) {
    for (int e = 0; e < 3; ++e) {
      if (t.v[e] == a && t.v[(e + 1) % 3] == b) return e;
    }
    return -1;
  }

  // Points u's edge (b, a) at t; t's side is set by the caller.
  void point_back(int u, int b, int a, int t) {
    if (u < 0) return;
    const int f = edge_in(tris_[u], b, a);
    if (f < 0) fail(ErrorKind::Geometry, "delaunay: adjacency out of sync");
    tris_[u].n[f] = t;
  }

  Location locate(int p) const {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      const auto& tv = tris_[t].v;
      int zero_edge = -1;
      int zeros = 0;
      bool outside = false;
      for (int e = 0; e < 3; ++e) {
        const int s = orient(tv[e], tv[(e + 1) % 3], p);
        if (s < 0) {
          outside = true;
          break;
        }
        if (s == 0) {
          zero_edge = e;
          ++zeros;
        }
      }
      if (outside) continue;
      if (zeros == 0) return {Where::Inside, t, -1};
      if (zeros == 1) return {Where::OnEdge, t, zero_edge};
      fail(ErrorKind::Geometry, "delaunay: duplicate point");
    }
    return {Where::Outside, -1, -1};
  }

  void push_flip(int t, int e) { flip_stack_.emplace_back(t, e); }

  void insert_inside(int t, int p) {
    const auto tv = tris_[t].v;
    const auto tn = tris_[t].n;
    tris_[t].alive = false;

    const int a = tv[0], b = tv[1], c = tv[2];
    const int t0 = make_tri(a, b, p);
    const int t1 = make_tri(b, c, p);
    const int t2 = make_tri(c, a, p);
    tris_[t0].n = {tn[0], t1, t2};
    tris_[t1].n = {tn[1], t2, t0};
    tris_[t2].n = {tn[2], t0, t1};
    point_back(tn[0], b, a, t0);
    point_back(tn[1], c, b, t1);
    point_back(tn[2], a, c, t2);
    push_flip(t0, 0);
    push_flip(t1, 0);
    push_flip(t2, 0);
  }

  void insert_on_edge(int t, int e, int p) {
    const auto tv = tris_[t].v;
    const auto tn = tris_[t].n;
    const int a = tv[e], b = tv[(e + 1) % 3], c = tv[(e + 2) % 3];
    const int u = tn[e];

    tris_[t].alive = false;
    const int t1 = make_tri(p, b, c);
    const int t2 = make_tri(a, p, c);
    tris_[t1].n = {-1, tn[(e + 1) % 3], t2};
    tris_[t2].n = {-1, t1, tn[(e + 2) % 3]};
    point_back(tn[(e + 1) % 3], c, b, t1);
    point_back(tn[(e + 2) % 3], a, c, t2);
    push_flip(t1, 1);
    push_flip(t2, 2);

    if (u >= 0) {
      const int f = edge_in(tris_[u], b, a);
      if (f < 0) fail(ErrorKind::Geometry, "delaunay: adjacency out of sync");
      const auto uv = tris_[u].v;
      const auto un = tris_[u].n;
      const int d = uv[(f + 2) % 3];
      tris_[u].alive = false;
      const int u1 = make_tri(b, p, d);
      const int u2 = make_tri(p, a, d);
      tris_[u1].n = {t1, u2, un[(f + 2) % 3]};
      tris_[u2].n = {t2, un[(f + 1) % 3], u1};
      tris_[t1].n[0] = u1;
      tris_[t2].n[0] = u2;
      point_back(un[(f + 2) % 3], b, d, u1);
      point_back(un[(f + 1) % 3], d, a, u2);
      push_flip(u1, 2);
      push_flip(u2, 1);
    }
  }

  void insert_outside(int p) {
    // Collect boundary edges visible from p, fan new triangles over them,
    // then stitch the fan together around p.
    struct NewTri {
      int tri;
      int from;  // fan edge (a -> p) start vertex
      int to;    // fan edge (p -> b) end vertex
    };
    std::vector<NewTri> added;
    const int ntri = static_cast<int>(tris_.size());
    for (int t = 0; t < ntri; ++t) {
      if (!tris_[t].alive) continue;
      for (int e = 0; e < 3; ++e) {
        if (tris_[t].n[e] != -1) continue;
        const int a = tris_[t].v[e];
        const int b = tris_[t].v[(e + 1) % 3];
        if (orient(a, b, p) >= 0) continue;  // not strictly visible
        const int nt = make_tri(b, a, p);
        tris_[nt].n[0] = t;
        tris_[t].n[e] = nt;
        push_flip(nt, 0);
        added.push_back({nt, a, b});
      }
    }
    if (added.empty()) {
      fail(ErrorKind::Geometry, "delaunay: point not connectable");
    }
    // Fan triangle over (a, b) has edges (a, p) and (p, b); pair (a, p) with
    // the (p, a) edge of the fan triangle built over the edge ending at a.
    for (const NewTri& m : added) {
      for (const NewTri& o : added) {
        if (o.to == m.from) {
          tris_[m.tri].n[1] = o.tri;  // m's (a, p) edge
          tris_[o.tri].n[2] = m.tri;  // o's (p, b) edge
        }
      }
    }
  }

  void do_flips() {
    size_t guard = 0;
    const size_t guard_limit = 64 + pts_.size() * pts_.size() * 8;
    while (!flip_stack_.empty()) {
      if (++guard > guard_limit) {
        fail(ErrorKind::Geometry, "delaunay: flip loop exceeded bound");
      }
      auto [t, e] = flip_stack_.back();
      flip_stack_.pop_back();
      if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) continue;
      const int u = tris_[t].n[e];
      if (u < 0 || !tris_[u].alive) continue;

      const int p0 = tris_[t].v[e];
      const int p1 = tris_[t].v[(e + 1) % 3];
      const int p2 = tris_[t].v[(e + 2) % 3];
      const int f = edge_in(tris_[u], p1, p0);
      if (f < 0) fail(ErrorKind::Geometry, "delaunay: adjacency out of sync");
      const int q = tris_[u].v[(f + 2) % 3];

      if (incircle(pts_[p0], pts_[p1], pts_[p2], pts_[q]) <= 0) continue;

      const auto tn = tris_[t].n;
      const auto un = tris_[u].n;
      // Replace (p0,p1,p2)+(p1,p0,q) with (p0,q,p2)+(q,p1,p2).
      tris_[t].v = {p0, q, p2};
      tris_[t].n = {un[(f + 1) % 3], u, tn[(e + 2) % 3]};
      tris_[u].v = {q, p1, p2};
      tris_[u].n = {un[(f + 2) % 3], tn[(e + 1) % 3], t};
      point_back(un[(f + 1) % 3], q, p0, t);
      point_back(tn[(e + 2) % 3], p0, p2, t);
      point_back(un[(f + 2) % 3], p1, q, u);
      point_back(tn[(e + 1) % 3], p2, p1, u);

      push_flip(t, 0);
      push_flip(t, 2);
      push_flip(u, 0);
      push_flip(u, 1);
    }
  }

  void insert(int p) {
    const Location loc = locate(p);
    switch (loc.where) {
      case Where::Inside:
        insert_inside(loc.tri, p);
        break;
      case Where::OnEdge:
        insert_on_edge(loc.tri, loc.edge, p);
        break;
      case Where::Outside:
        insert_outside(p);
        break;
    }
    do_flips();
  }
};

std::vector<Triangle> DelaunayBuilder::run() {
  const int n = static_cast<int>(pts_.size());
  if (n < 3) {
    fail(ErrorKind::Geometry, "delaunay: need at least 3 points");
  }
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return pts_[a].x < pts_[b].x ||
             (pts_[a].x == pts_[b].x && pts_[a].y < pts_[b].y);
    });
    for (int i = 1; i < n; ++i) {
      if (pts_[order[i - 1]] == pts_[order[i]]) {
        fail(ErrorKind::Geometry, "delaunay: duplicate points in input");
      }
    }
  }

  // Seed with the first non-collinear triple.
  int seed = -1;
  for (int j = 2; j < n; ++j) {
    if (orient(0, 1, j) != 0) {
      seed = j;
      break;
    }
  }
  if (seed < 0) {
    fail(ErrorKind::Geometry, "delaunay: all points collinear");
  }
  if (orient(0, 1, seed) > 0) {
    make_tri(0, 1, seed);
  } else {
    make_tri(1, 0, seed);
  }
  for (int p = 2; p < n; ++p) {
    if (p == seed) continue;
    insert(p);
  }

  std::vector<Triangle> out;
  for (const DTri& t : tris_) {
    if (!t.alive) continue;
    Triangle tri;
    tri.v = t.v;
    // Canonical rotation: smallest index first, cyclic order preserved.
    while (!(tri.v[0] < tri.v[1] && tri.v[0] < tri.v[2])) {
      tri.v = {tri.v[1], tri.v[2], tri.v[0]};
    }
    out.push_back(tri);
  }
  std::sort(out.begin(), out.end(), [](const Triangle& a, const Triangle& b) {
    return a.v < b.v;
  });
  return out;
}

}  // namespace

std::vector<Triangle> delaunay_triangulate(const std::vector<Vec2>& points) {
  DelaunayBuilder builder(points);
  return builder.run();
}

}  // namespace srefi
