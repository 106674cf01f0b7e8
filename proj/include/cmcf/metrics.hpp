#pragma once

#include "cmcf/mesh.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace cmcf {

// s = (36 pi V^2)^(1/3) / A, using |V|. Throws MeshError on zero area.
double sphericity(const TriangleMesh& mesh);

// Per-element values with an exclusion mask. Excluded entries hold NaN and do
// not enter any statistic.
struct ElementValues {
  std::vector<double> values;
  std::vector<bool> excluded;
  std::size_t excluded_count() const;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0; // population
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize_values(const ElementValues& v);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
};

// Uniform bins over [lo, hi]; the top edge is inclusive.
Histogram make_histogram(const ElementValues& v, double lo, double hi, int bins = 64);

// Faces whose area in `mesh` is below ratio * (mean face area). Zero-area
// faces are always reported.
std::vector<bool> degenerate_face_mask(const TriangleMesh& mesh, double ratio);

// Per face: max over the three corners of |theta - theta'| / theta, corners
// paired by position in the face. Faces degenerate in either mesh (per
// `degenerate_ratio`) are excluded.
ElementValues angular_distortion(const TriangleMesh& orig, const TriangleMesh& mapped,
                                 double degenerate_ratio = 1e-8);

// l_im * l_jk / (l_mj * l_ki).
double length_cross_ratio(double l_im, double l_jk, double l_mj, double l_ki);

// Length cross ratio of a flap; nullopt when any of the four lengths is zero.
std::optional<double> lcr(const TriangleMesh& mesh, const EdgeFlap& flap);

// c'_ij / c_ij per interior edge in edge_flaps() order. Edges are excluded
// when either flap face is degenerate in either mesh or a length vanishes.
ElementValues lcr_deviation(const TriangleMesh& orig, const TriangleMesh& mapped, double degenerate_ratio = 1e-8);

// Same, with caller-supplied flaps (any consistent orientation convention).
ElementValues lcr_deviation(const TriangleMesh& orig, const TriangleMesh& mapped, const std::vector<EdgeFlap>& flaps,
                            double degenerate_ratio = 1e-8);

struct ConformalityReport {
  ElementValues angular;
  ElementValues lcr;
  Summary angular_summary;
  Summary lcr_summary;
  Histogram angular_histogram;
  Histogram lcr_histogram;
  double sphericity = 0.0;
  bool negative_volume = false;
  std::size_t degenerate_faces = 0; // in the mapped mesh
  bool valid = true;
};

// Throws MeshError if the meshes do not share connectivity.
ConformalityReport summarize(const TriangleMesh& orig, const TriangleMesh& mapped, double degenerate_ratio = 1e-8);

bool same_connectivity(const TriangleMesh& a, const TriangleMesh& b);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const Histogram& h);
// Scalars and summaries only; per-element values go to CSV.
nlohmann::json to_json(const ConformalityReport& r);

// Columns: kind,index,a,b,c,value,excluded. Face rows carry the three vertex
// indices, edge rows the endpoints i,j of the flap; `flaps` must be the list
// the lcr values were computed over.
void write_elements_csv(const ConformalityReport& r, const TriangleMesh& mesh, const std::vector<EdgeFlap>& flaps,
                        const std::filesystem::path& path);

} // namespace cmcf
