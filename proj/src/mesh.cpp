#include "srefi/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "landmark_groups.hpp"
#include "srefi/error.hpp"

namespace srefi {

namespace {

using namespace lm68;

std::vector<Vec2> landmark_range(const Landmarks& lm, int begin, int end) {
  return std::vector<Vec2>(lm.begin() + begin, lm.begin() + end);
}

using EdgeKey = std::pair<int, int>;

EdgeKey undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::map<EdgeKey, int> edge_counts(const std::vector<Triangle>& triangles) {
  std::map<EdgeKey, int> counts;
  for (const Triangle& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      ++counts[undirected(t.v[e], t.v[(e + 1) % 3])];
    }
  }
  return counts;
}

Vec2 triangle_centroid(const std::vector<Vec2>& verts, const Triangle& t) {
  return (verts[t.v[0]] + verts[t.v[1]] + verts[t.v[2]]) * (1.0 / 3.0);
}

}  // namespace

const char* region_name(Region r) {
  switch (r) {
    case Region::LeftEye: return "left_eye";
    case Region::RightEye: return "right_eye";
    case Region::Nose: return "nose";
    case Region::Mouth: return "mouth";
    case Region::CheekJaw: return "cheek_jaw";
    case Region::Outer: return "outer";
  }
  return "?";
}

std::vector<Vec2> frame_anchors(int image_size) {
  const double hi = image_size - 1;
  const double mid = hi / 2.0;
  return {
      {0, 0}, {mid, 0}, {hi, 0}, {hi, mid}, {hi, hi}, {mid, hi}, {0, hi}, {0, mid},
  };
}

InitialTriangulation triangulate_initial(const Landmarks& landmarks,
                                         int image_size,
                                         const MeshConfig& config) {
  if (image_size < 2) {
    fail(ErrorKind::Validation, "image_size must be at least 2");
  }
  std::set<int> dropped;
  for (int i : config.drop_landmarks) {
    if (i < 0 || i >= kLandmarkCount) {
      fail(ErrorKind::Config, "drop_landmarks index out of range: " +
                                  std::to_string(i));
    }
    dropped.insert(i);
  }

  InitialTriangulation out;
  out.landmark_to_initial.assign(kLandmarkCount, -1);
  for (int i = 0; i < kLandmarkCount; ++i) {
    if (dropped.count(i)) continue;
    out.landmark_to_initial[i] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(landmarks[i]);
  }
  for (const Vec2& a : frame_anchors(image_size)) {
    out.vertices.push_back(a);
  }
  out.triangles = delaunay_triangulate(out.vertices);
  return out;
}

DualTriangulation centroid_dual(const std::vector<Vec2>& vertices,
                                const std::vector<Triangle>& triangles) {
  if (triangles.empty()) {
    fail(ErrorKind::Topology, "centroid_dual: empty triangulation");
  }
  const auto counts = edge_counts(triangles);
  std::set<int> boundary_vertices;
  for (const auto& [edge, count] : counts) {
    if (count > 2) {
      fail(ErrorKind::Topology,
           "centroid_dual: non-manifold edge (" + std::to_string(edge.first) +
               ", " + std::to_string(edge.second) + ") shared by " +
               std::to_string(count) + " triangles");
    }
    if (count == 1) {
      boundary_vertices.insert(edge.first);
      boundary_vertices.insert(edge.second);
    }
  }

  DualTriangulation dual;
  for (size_t i = 0; i < triangles.size(); ++i) {
    dual.vertices.push_back(triangle_centroid(vertices, triangles[i]));
    dual.sources.push_back(
        {DualVertexSource::Kind::Centroid, static_cast<int>(i)});
  }
  for (int v : boundary_vertices) {
    dual.vertices.push_back(vertices[v]);
    dual.sources.push_back({DualVertexSource::Kind::InitialVertex, v});
  }
  dual.triangles = delaunay_triangulate(dual.vertices);
  return dual;
}

std::vector<Region> label_regions(const FaceMesh& mesh,
                                  const Landmarks& landmarks,
                                  const MeshConfig& config) {
  struct KeyRegion {
    Region region;
    std::vector<Vec2> polygon;
    double area;
  };
  const std::array<std::pair<Region, std::pair<int, int>>, 4> groups = {{
      {Region::LeftEye, {kLeftEyeBegin, kLeftEyeEnd}},
      {Region::RightEye, {kRightEyeBegin, kRightEyeEnd}},
      {Region::Nose, {kNoseBegin, kNoseEnd}},
      {Region::Mouth, {kMouthBegin, kMouthEnd}},
  }};

  std::vector<KeyRegion> keys;
  for (const auto& [region, range] : groups) {
    std::vector<Vec2> hull =
        convex_hull(landmark_range(landmarks, range.first, range.second));
    if (hull.size() < 3) {
      fail(ErrorKind::Labeling, std::string("degenerate ") +
                                    region_name(region) + " landmark polygon");
    }
    hull = dilate_polygon(hull, config.region_margin_px);
    keys.push_back({region, hull, polygon_area(hull)});
  }

  // Hull of the landmark subset that is actually part of the mesh.
  std::vector<Vec2> subset;
  for (int i = 0; i < kLandmarkCount; ++i) {
    if (mesh.landmark_to_initial[i] >= 0) {
      subset.push_back(mesh.initial_vertices[mesh.landmark_to_initial[i]]);
    }
  }
  const std::vector<Vec2> face_hull = convex_hull(subset);
  if (face_hull.size() < 3) {
    fail(ErrorKind::Geometry, "landmark subset hull is degenerate");
  }

  std::vector<Region> labels;
  labels.reserve(mesh.dual_triangles.size());
  for (const Triangle& t : mesh.dual_triangles) {
    const Vec2 c = triangle_centroid(mesh.dual_vertices, t);
    const KeyRegion* best = nullptr;
    for (const KeyRegion& key : keys) {
      if (!point_in_convex_polygon(c, key.polygon)) continue;
      if (!best || key.area < best->area) best = &key;
    }
    if (best) {
      labels.push_back(best->region);
    } else if (point_in_convex_polygon(c, face_hull)) {
      labels.push_back(Region::CheekJaw);
    } else {
      labels.push_back(Region::Outer);
    }
  }

  // Thin regions (the nose bridge especially) can fragment: a straddling
  // triangle's centroid lands outside the dilated polygon and splits the
  // label set. Keep the largest edge-connected component per key region and
  // hand the stray slivers to cheek_jaw.
  {
    std::map<EdgeKey, std::vector<int>> tris_of_edge;
    for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
      const Triangle& t = mesh.dual_triangles[i];
      for (int e = 0; e < 3; ++e) {
        tris_of_edge[undirected(t.v[e], t.v[(e + 1) % 3])].push_back(
            static_cast<int>(i));
      }
    }
    for (const KeyRegion& key : keys) {
      std::vector<int> members;
      for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == key.region) members.push_back(static_cast<int>(i));
      }
      if (members.empty()) continue;
      std::set<int> remaining(members.begin(), members.end());
      std::vector<std::vector<int>> components;
      while (!remaining.empty()) {
        std::vector<int> component{*remaining.begin()};
        remaining.erase(remaining.begin());
        for (size_t f = 0; f < component.size(); ++f) {
          const Triangle& t = mesh.dual_triangles[component[f]];
          for (int e = 0; e < 3; ++e) {
            for (int other : tris_of_edge[undirected(t.v[e], t.v[(e + 1) % 3])]) {
              if (remaining.erase(other)) component.push_back(other);
            }
          }
        }
        components.push_back(std::move(component));
      }
      if (components.size() <= 1) continue;
      size_t keep = 0;
      for (size_t c = 1; c < components.size(); ++c) {
        if (components[c].size() > components[keep].size() ||
            (components[c].size() == components[keep].size() &&
             *std::min_element(components[c].begin(), components[c].end()) <
                 *std::min_element(components[keep].begin(),
                                   components[keep].end()))) {
          keep = c;
        }
      }
      for (size_t c = 0; c < components.size(); ++c) {
        if (c == keep) continue;
        for (int idx : components[c]) labels[idx] = Region::CheekJaw;
      }
    }
  }

  for (const KeyRegion& key : keys) {
    if (std::find(labels.begin(), labels.end(), key.region) == labels.end()) {
      fail(ErrorKind::Labeling, std::string("no dual triangle labeled ") +
                                    region_name(key.region));
    }
  }
  return labels;
}

FaceMesh build_face_mesh(const Landmarks& landmarks, int image_size,
                         const MeshConfig& config) {
  FaceMesh mesh;
  mesh.image_size = image_size;
  InitialTriangulation initial =
      triangulate_initial(landmarks, image_size, config);
  mesh.initial_vertices = std::move(initial.vertices);
  mesh.initial_triangles = std::move(initial.triangles);
  mesh.landmark_to_initial = std::move(initial.landmark_to_initial);

  DualTriangulation dual =
      centroid_dual(mesh.initial_vertices, mesh.initial_triangles);
  mesh.dual_vertices = std::move(dual.vertices);
  mesh.dual_sources = std::move(dual.sources);
  mesh.dual_triangles = std::move(dual.triangles);

  mesh.region_labels = label_regions(mesh, landmarks, config);
  return mesh;
}

std::vector<Vec2> dual_vertices_for_landmarks(const FaceMesh& topology,
                                              const Landmarks& landmarks,
                                              int image_size) {
  const int n_initial = static_cast<int>(topology.initial_vertices.size());
  const int n_selected = n_initial - 8;

  std::vector<Vec2> initial(n_initial);
  std::vector<int> initial_to_landmark(n_initial, -1);
  for (int i = 0; i < kLandmarkCount; ++i) {
    if (topology.landmark_to_initial[i] >= 0) {
      initial_to_landmark[topology.landmark_to_initial[i]] = i;
    }
  }
  const std::vector<Vec2> anchors = frame_anchors(image_size);
  for (int i = 0; i < n_initial; ++i) {
    if (i < n_selected) {
      initial[i] = landmarks[initial_to_landmark[i]];
    } else {
      initial[i] = anchors[i - n_selected];
    }
  }

  std::vector<Vec2> dual(topology.dual_vertices.size());
  for (size_t i = 0; i < topology.dual_sources.size(); ++i) {
    const DualVertexSource& src = topology.dual_sources[i];
    if (src.kind == DualVertexSource::Kind::Centroid) {
      dual[i] =
          triangle_centroid(initial, topology.initial_triangles[src.index]);
    } else {
      dual[i] = initial[src.index];
    }
  }
  return dual;
}

double triangulation_area(const std::vector<Vec2>& vertices,
                          const std::vector<Triangle>& triangles) {
  double acc = 0.0;
  for (const Triangle& t : triangles) {
    acc += std::abs(signed_area2(vertices[t.v[0]], vertices[t.v[1]],
                                 vertices[t.v[2]]))
           * 0.5;
  }
  return acc;
}

void validate_mesh(const FaceMesh& mesh, const Landmarks& landmarks) {
  const double initial_area =
      triangulation_area(mesh.initial_vertices, mesh.initial_triangles);
  const double dual_area =
      triangulation_area(mesh.dual_vertices, mesh.dual_triangles);
  if (initial_area <= 0.0) {
    fail(ErrorKind::Geometry, "mesh: zero initial area");
  }
  if (std::abs(dual_area - initial_area) > 1e-6 * initial_area) {
    std::ostringstream msg;
    msg << "mesh: dual area " << dual_area << " != initial area "
        << initial_area;
    fail(ErrorKind::Geometry, msg.str());
  }

  for (const Triangle& t : mesh.dual_triangles) {
    if (orient2d(mesh.dual_vertices[t.v[0]], mesh.dual_vertices[t.v[1]],
                 mesh.dual_vertices[t.v[2]]) == 0) {
      fail(ErrorKind::Geometry, "mesh: degenerate dual triangle");
    }
  }

  const auto counts = edge_counts(mesh.dual_triangles);
  for (const auto& [edge, count] : counts) {
    if (count > 2) fail(ErrorKind::Topology, "mesh: non-manifold dual edge");
  }

  if (mesh.region_labels.size() != mesh.dual_triangles.size()) {
    fail(ErrorKind::Labeling, "mesh: label count mismatch");
  }

  // Key regions: non-empty and edge-connected.
  std::map<EdgeKey, std::vector<int>> tris_of_edge;
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Triangle& t = mesh.dual_triangles[i];
    for (int e = 0; e < 3; ++e) {
      tris_of_edge[undirected(t.v[e], t.v[(e + 1) % 3])].push_back(
          static_cast<int>(i));
    }
  }
  for (Region region : {Region::LeftEye, Region::RightEye, Region::Nose,
                        Region::Mouth}) {
    std::vector<int> members;
    for (size_t i = 0; i < mesh.region_labels.size(); ++i) {
      if (mesh.region_labels[i] == region) members.push_back(static_cast<int>(i));
    }
    if (members.empty()) {
      fail(ErrorKind::Labeling,
           std::string("mesh: empty region ") + region_name(region));
    }
    std::set<int> in_region(members.begin(), members.end());
    std::set<int> seen{members.front()};
    std::vector<int> frontier{members.front()};
    while (!frontier.empty()) {
      const int cur = frontier.back();
      frontier.pop_back();
      const Triangle& t = mesh.dual_triangles[cur];
      for (int e = 0; e < 3; ++e) {
        for (int other : tris_of_edge[undirected(t.v[e], t.v[(e + 1) % 3])]) {
          if (in_region.count(other) && !seen.count(other)) {
            seen.insert(other);
            frontier.push_back(other);
          }
        }
      }
    }
    if (seen.size() != in_region.size()) {
      fail(ErrorKind::Labeling, std::string("mesh: region ") +
                                    region_name(region) +
                                    " is not edge-connected");
    }
  }

  for (const Vec2& dv : mesh.dual_vertices) {
    for (const Vec2& lm : landmarks) {
      if (dv == lm) {
        fail(ErrorKind::Geometry, "mesh: dual vertex coincides with a landmark");
      }
    }
  }
}

std::string mesh_to_svg(const FaceMesh& mesh) {
  const char* fill_of[] = {"#4da6ff", "#3385ff", "#ffcc66",
                           "#ff6666", "#c2f0c2", "#e0e0e0"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << mesh.image_size
      << "\" height=\"" << mesh.image_size << "\" viewBox=\"0 0 "
      << mesh.image_size << " " << mesh.image_size << "\">\n";
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Triangle& t = mesh.dual_triangles[i];
    svg << "  <polygon points=\"";
    for (int e = 0; e < 3; ++e) {
      const Vec2& p = mesh.dual_vertices[t.v[e]];
      svg << p.x << "," << p.y << (e < 2 ? " " : "");
    }
    const int label = static_cast<int>(mesh.region_labels[i]);
    svg << "\" fill=\"" << fill_of[label]
        << "\" stroke=\"#404040\" stroke-width=\"0.5\" fill-opacity=\"0.55\"/>"
        << "\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace srefi
