#pragma once

#include <map>
#include <string>
#include <vector>

#include "srefi/dataset.hpp"
#include "srefi/geometry.hpp"

namespace srefi {

struct Triangle {
  std::array<int, 3> v{-1, -1, -1};

  bool operator==(const Triangle& o) const { return v == o.v; }
};

enum class Region { LeftEye, RightEye, Nose, Mouth, CheekJaw, Outer };

const char* region_name(Region r);

struct MeshConfig {
  // Landmark indices (0-based) excluded from the initial triangulation.
  std::vector<int> drop_landmarks;
  // Key-region polygons are dilated by this margin before labeling.
  double region_margin_px = 2.0;
};

// Where each dual vertex comes from: the centroid of an initial triangle, or
// an initial vertex on the hull. Needed to re-instantiate the same topology
// on another face's landmarks.
struct DualVertexSource {
  enum class Kind { Centroid, InitialVertex };
  Kind kind = Kind::Centroid;
  int index = -1;  // initial triangle index or initial vertex index
};

struct FaceMesh {
  int image_size = 0;
  std::vector<Vec2> initial_vertices;  // landmark subset, then frame anchors
  std::vector<Triangle> initial_triangles;
  std::vector<int> landmark_to_initial;  // 68 entries; -1 when dropped

  std::vector<Vec2> dual_vertices;
  std::vector<DualVertexSource> dual_sources;
  std::vector<Triangle> dual_triangles;

  std::vector<Region> region_labels;  // one per dual triangle
};

// Exact-predicate incremental Delaunay triangulation. Deterministic for a
// fixed input order; cocircular ties keep the earlier-created diagonal.
// Throws a geometry error on duplicate points or an all-collinear input.
std::vector<Triangle> delaunay_triangulate(const std::vector<Vec2>& points);

// The 8 frame anchor points: 4 corners and 4 edge midpoints, in pixel-center
// coordinates of a size x size image.
std::vector<Vec2> frame_anchors(int image_size);

struct InitialTriangulation {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> landmark_to_initial;
};

InitialTriangulation triangulate_initial(const Landmarks& landmarks,
                                         int image_size,
                                         const MeshConfig& config = {});

struct DualTriangulation {
  std::vector<Vec2> vertices;
  std::vector<DualVertexSource> sources;
  std::vector<Triangle> triangles;
};

// One dual vertex per input triangle at its centroid, plus the hull vertices
// of the input; the dual triangles re-triangulate that point set so the
// covered area is preserved exactly.
DualTriangulation centroid_dual(const std::vector<Vec2>& vertices,
                                const std::vector<Triangle>& triangles);

std::vector<Region> label_regions(const FaceMesh& mesh,
                                  const Landmarks& landmarks,
                                  const MeshConfig& config = {});

// triangulate_initial + centroid_dual + label_regions.
FaceMesh build_face_mesh(const Landmarks& landmarks, int image_size,
                         const MeshConfig& config = {});

// Re-instantiates the mesh topology on another face's landmarks (and frame
// size): same triangles, coordinates recomputed from the given landmarks.
std::vector<Vec2> dual_vertices_for_landmarks(const FaceMesh& topology,
                                              const Landmarks& landmarks,
                                              int image_size);

// Checks the mesh invariants: manifold dual, area conservation against the
// initial triangulation, one label per triangle, non-empty edge-connected
// key regions, and no dual vertex on a landmark. Throws on violation.
void validate_mesh(const FaceMesh& mesh, const Landmarks& landmarks);

// Debug rendering of the dual mesh with region-colored triangles.
std::string mesh_to_svg(const FaceMesh& mesh);

double triangulation_area(const std::vector<Vec2>& vertices,
                          const std::vector<Triangle>& triangles);

}  // namespace srefi
