#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "srefi/error.hpp"
#include "srefi/fixtures.hpp"
#include "srefi/mesh.hpp"

using namespace srefi;

namespace {

// Brute-force signed-area sum, independent of triangulation_area.
double area_sum(const std::vector<Vec2>& verts,
                const std::vector<Triangle>& tris) {
  double acc = 0.0;
  for (const Triangle& t : tris) {
    const Vec2 &a = verts[t.v[0]], &b = verts[t.v[1]], &c = verts[t.v[2]];
    acc += std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) / 2.0;
  }
  return acc;
}

std::map<std::pair<int, int>, int> boundary_edge_counts(
    const std::vector<Triangle>& tris) {
  std::map<std::pair<int, int>, int> counts;
  for (const Triangle& t : tris) {
    for (int e = 0; e < 3; ++e) {
      int a = t.v[e], b = t.v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++counts[{a, b}];
    }
  }
  return counts;
}

}  // namespace

TEST_CASE("delaunay: three non-collinear points give one triangle") {
  const std::vector<Vec2> pts = {{0, 0}, {4, 0}, {0, 4}};
  const auto tris = delaunay_triangulate(pts);
  REQUIRE(tris.size() == 1);
  CHECK(tris[0].v[0] == 0);
}

TEST_CASE("delaunay: unit square splits into two triangles on a diagonal") {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto tris = delaunay_triangulate(pts);
  REQUIRE(tris.size() == 2);
  // The two triangles share exactly one edge (the diagonal).
  int shared = 0;
  for (const auto& [edge, count] : boundary_edge_counts(tris)) {
    if (count == 2) ++shared;
  }
  CHECK(shared == 1);
  CHECK(area_sum(pts, tris) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("delaunay: collinear input and duplicates are geometry errors") {
  CHECK_THROWS_AS(delaunay_triangulate({{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                  Error);
  CHECK_THROWS_AS(delaunay_triangulate({{0, 0}, {1, 0}, {1, 0}, {0, 1}}),
                  Error);
  try {
    delaunay_triangulate({{0, 0}, {1, 1}, {2, 2}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
  }
}

TEST_CASE("delaunay: deterministic and valid on noisy point clouds") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 5; ++round) {
    std::vector<Vec2> pts;
    const int n = 40 + round * 17;
    for (int i = 0; i < n; ++i) {
      pts.push_back({static_cast<double>(rng() % 10000) / 13.0,
                     static_cast<double>(rng() % 10000) / 17.0});
    }
    const auto a = delaunay_triangulate(pts);
    const auto b = delaunay_triangulate(pts);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].v == b[i].v);

    // Tiling checks: manifold edges, convex-hull area covered exactly.
    size_t boundary = 0;
    for (const auto& [edge, count] : boundary_edge_counts(a)) {
      REQUIRE(count <= 2);
      if (count == 1) ++boundary;
    }
    CHECK(boundary >= 3);
    const double hull_area = polygon_area(convex_hull(pts));
    CHECK(area_sum(pts, a) == doctest::Approx(hull_area).epsilon(1e-9));
  }
}

TEST_CASE("triangulate_initial satisfies Euler's formula on fixtures") {
  for (uint64_t seed : {1, 2, 3}) {
    const Landmarks lm = fixture_landmarks(512, seed);
    const InitialTriangulation tri = triangulate_initial(lm, 512);
    REQUIRE(tri.vertices.size() == 68 + 8);

    std::set<int> boundary_vertices;
    for (const auto& [edge, count] : boundary_edge_counts(tri.triangles)) {
      if (count == 1) {
        boundary_vertices.insert(edge.first);
        boundary_vertices.insert(edge.second);
      }
    }
    const int V = static_cast<int>(tri.vertices.size());
    const int B = static_cast<int>(boundary_vertices.size());
    CHECK(static_cast<int>(tri.triangles.size()) == 2 * V - 2 - B);
  }
}

TEST_CASE("centroid_dual: single triangle centroid at the arithmetic mean") {
  const std::vector<Vec2> verts = {{0, 0}, {6, 0}, {0, 6}};
  const std::vector<Triangle> tris = {Triangle{{0, 1, 2}}};
  const DualTriangulation dual = centroid_dual(verts, tris);
  REQUIRE(dual.sources[0].kind == DualVertexSource::Kind::Centroid);
  CHECK(dual.vertices[0].x == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dual.vertices[0].y == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(area_sum(dual.vertices, dual.triangles) ==
        doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("centroid_dual: adjacent centroids get a dual edge") {
  const std::vector<Vec2> verts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Triangle> tris = {Triangle{{0, 1, 2}}, Triangle{{0, 2, 3}}};
  const DualTriangulation dual = centroid_dual(verts, tris);
  REQUIRE(dual.sources.size() >= 2);
  bool linked = false;
  for (const Triangle& t : dual.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t.v[e], b = t.v[(e + 1) % 3];
      if ((a == 0 && b == 1) || (a == 1 && b == 0)) linked = true;
    }
  }
  CHECK(linked);
}

TEST_CASE("centroid_dual rejects non-manifold input") {
  const std::vector<Vec2> verts = {{0, 0}, {2, 0}, {1, 2}, {1, -2}, {3, 2}};
  const std::vector<Triangle> tris = {Triangle{{0, 1, 2}}, Triangle{{0, 1, 3}},
                                      Triangle{{0, 1, 4}}};
  try {
    centroid_dual(verts, tris);
    FAIL("expected topology error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Topology);
  }
}

TEST_CASE("fixture meshes: area conservation, labels, landmark clearance") {
  for (uint64_t seed : {1, 2, 3, 4, 5, 6}) {
    const Landmarks lm = fixture_landmarks(512, seed);
    const FaceMesh mesh = build_face_mesh(lm, 512);

    const double initial = area_sum(mesh.initial_vertices, mesh.initial_triangles);
    const double dual = area_sum(mesh.dual_vertices, mesh.dual_triangles);
    CHECK(std::abs(dual - initial) <= 1e-6 * initial);

    REQUIRE(mesh.region_labels.size() == mesh.dual_triangles.size());
    std::map<Region, int> counts;
    for (Region r : mesh.region_labels) ++counts[r];
    for (Region key : {Region::LeftEye, Region::RightEye, Region::Nose,
                       Region::Mouth}) {
      CHECK(counts[key] > 0);
    }
    CHECK(counts[Region::CheekJaw] > 0);
    CHECK(counts[Region::Outer] > 0);

    // Full invariant bundle (connectivity, manifoldness, vertex clearance).
    CHECK_NOTHROW(validate_mesh(mesh, lm));
  }
}

TEST_CASE("label sanity: key-region triangles sit inside their polygons") {
  const Landmarks lm = fixture_landmarks(512, 9);
  const FaceMesh mesh = build_face_mesh(lm, 512);
  const MeshConfig config;

  const auto hull_of = [&](int begin, int end) {
    std::vector<Vec2> pts(lm.begin() + begin, lm.begin() + end);
    return dilate_polygon(convex_hull(pts), config.region_margin_px);
  };
  const std::map<Region, std::vector<Vec2>> polys = {
      {Region::LeftEye, hull_of(36, 42)},
      {Region::RightEye, hull_of(42, 48)},
      {Region::Nose, hull_of(27, 36)},
      {Region::Mouth, hull_of(48, 68)},
  };
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const auto it = polys.find(mesh.region_labels[i]);
    if (it == polys.end()) continue;
    const Triangle& t = mesh.dual_triangles[i];
    const Vec2 c = (mesh.dual_vertices[t.v[0]] + mesh.dual_vertices[t.v[1]] +
                    mesh.dual_vertices[t.v[2]]) *
                   (1.0 / 3.0);
    CHECK(point_in_convex_polygon(c, it->second));
  }
}

TEST_CASE("corner triangles are labeled outer") {
  const Landmarks lm = fixture_landmarks(512, 4);
  const FaceMesh mesh = build_face_mesh(lm, 512);
  // Find the dual triangle containing a point near the image corner.
  const Vec2 corner{2.0, 2.0};
  bool found = false;
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Triangle& t = mesh.dual_triangles[i];
    const Vec2 &a = mesh.dual_vertices[t.v[0]], &b = mesh.dual_vertices[t.v[1]],
               &c = mesh.dual_vertices[t.v[2]];
    const double s0 = signed_area2(a, b, corner);
    const double s1 = signed_area2(b, c, corner);
    const double s2 = signed_area2(c, a, corner);
    if ((s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0)) {
      CHECK(mesh.region_labels[i] == Region::Outer);
      found = true;
      break;
    }
  }
  CHECK(found);
}

TEST_CASE("mesh build is deterministic") {
  const Landmarks lm = fixture_landmarks(512, 12);
  const FaceMesh a = build_face_mesh(lm, 512);
  const FaceMesh b = build_face_mesh(lm, 512);
  REQUIRE(a.dual_vertices.size() == b.dual_vertices.size());
  for (size_t i = 0; i < a.dual_vertices.size(); ++i) {
    CHECK(a.dual_vertices[i] == b.dual_vertices[i]);
  }
  REQUIRE(a.dual_triangles.size() == b.dual_triangles.size());
  for (size_t i = 0; i < a.dual_triangles.size(); ++i) {
    CHECK(a.dual_triangles[i].v == b.dual_triangles[i].v);
    CHECK(a.region_labels[i] == b.region_labels[i]);
  }
}

TEST_CASE("dual_vertices_for_landmarks reproduces and transfers coordinates") {
  const Landmarks lm = fixture_landmarks(512, 3);
  const FaceMesh mesh = build_face_mesh(lm, 512);

  const auto same = dual_vertices_for_landmarks(mesh, lm, 512);
  REQUIRE(same.size() == mesh.dual_vertices.size());
  for (size_t i = 0; i < same.size(); ++i) {
    CHECK(same[i].x == doctest::Approx(mesh.dual_vertices[i].x).epsilon(1e-12));
    CHECK(same[i].y == doctest::Approx(mesh.dual_vertices[i].y).epsilon(1e-12));
  }

  // On another face's landmarks, centroids must be the arithmetic means of
  // the re-instantiated initial triangles.
  const Landmarks other = fixture_landmarks(512, 8);
  const auto moved = dual_vertices_for_landmarks(mesh, other, 512);
  const InitialTriangulation check = triangulate_initial(other, 512);
  for (size_t i = 0; i < mesh.dual_sources.size(); ++i) {
    if (mesh.dual_sources[i].kind != DualVertexSource::Kind::Centroid) continue;
    const Triangle& t = mesh.initial_triangles[mesh.dual_sources[i].index];
    // Initial vertex k < 68 corresponds to landmark k here (no drops).
    auto coord = [&](int k) {
      return k < 68 ? other[k] : frame_anchors(512)[k - 68];
    };
    const Vec2 mean =
        (coord(t.v[0]) + coord(t.v[1]) + coord(t.v[2])) * (1.0 / 3.0);
    CHECK(moved[i].x == doctest::Approx(mean.x).epsilon(1e-12));
    CHECK(moved[i].y == doctest::Approx(mean.y).epsilon(1e-12));
  }
  (void)check;
}

TEST_CASE("svg export emits one polygon per dual triangle") {
  const Landmarks lm = fixture_landmarks(512, 2);
  const FaceMesh mesh = build_face_mesh(lm, 512);
  const std::string svg = mesh_to_svg(mesh);
  CHECK(svg.find("<svg") != std::string::npos);
  size_t polygons = 0, pos = 0;
  while ((pos = svg.find("<polygon", pos)) != std::string::npos) {
    ++polygons;
    pos += 8;
  }
  CHECK(polygons == mesh.dual_triangles.size());
}

TEST_CASE("dropping landmarks shrinks the initial vertex set") {
  const Landmarks lm = fixture_landmarks(512, 5);
  MeshConfig config;
  config.drop_landmarks = {60, 61, 62, 63, 64, 65, 66, 67};
  const InitialTriangulation tri = triangulate_initial(lm, 512, config);
  CHECK(tri.vertices.size() == 68 - 8 + 8);
  CHECK(tri.landmark_to_initial[60] == -1);
  CHECK(tri.landmark_to_initial[0] == 0);
}
