#include "cmcf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

namespace cmcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double edge_length(const TriangleMesh& mesh, int a, int b) { return (mesh.position(a) - mesh.position(b)).norm(); }

// Face index of each directed edge a -> b, keyed by (a, b).
struct DirectedEdgeFaces {
  std::vector<std::pair<std::pair<int, int>, std::size_t>> entries;
  explicit DirectedEdgeFaces(const TriangleMesh& mesh) {
    entries.reserve(mesh.num_faces() * 3);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
      const Face& t = mesh.faces[f];
      for (int c = 0; c < 3; ++c) entries.push_back({{t[c], t[(c + 1) % 3]}, f});
    }
    std::sort(entries.begin(), entries.end());
  }
  std::optional<std::size_t> find(int a, int b) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(std::make_pair(a, b), std::size_t{0}));
    if (it != entries.end() && it->first == std::make_pair(a, b)) return it->second;
    return std::nullopt;
  }
};

} // namespace

double sphericity(const TriangleMesh& mesh) {
  double area = total_area(mesh);
  if (!(area > 0.0)) throw MeshError("sphericity undefined for zero total area");
  double volume = std::abs(signed_volume(mesh));
  return std::cbrt(36.0 * std::numbers::pi * volume * volume) / area;
}

std::size_t ElementValues::excluded_count() const {
  return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), true));
}

Summary summarize_values(const ElementValues& v) {
  Summary s;
  double sum = 0.0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    if (v.excluded[n]) continue;
    sum += v.values[n];
    s.min = std::min(s.min, v.values[n]);
    s.max = std::max(s.max, v.values[n]);
    ++s.count;
  }
  if (s.count == 0) {
    s.min = s.max = kNaN;
    s.mean = s.std = kNaN;
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    if (v.excluded[n]) continue;
    double d = v.values[n] - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / static_cast<double>(s.count));
  return s;
}

Histogram make_histogram(const ElementValues& v, double lo, double hi, int bins) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    if (v.excluded[n]) continue;
    double x = v.values[n];
    if (x < lo) {
      ++h.underflow;
    } else if (x > hi) {
      ++h.overflow;
    } else {
      auto b = width > 0.0 ? static_cast<long>((x - lo) / width) : 0L;
      b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
      ++h.counts[static_cast<std::size_t>(b)];
    }
  }
  return h;
}

std::vector<bool> degenerate_face_mask(const TriangleMesh& mesh, double ratio) {
  auto areas = face_areas(mesh);
  double mean = 0.0;
  for (double a : areas) mean += a;
  mean = areas.empty() ? 0.0 : mean / static_cast<double>(areas.size());
  std::vector<bool> mask(areas.size());
  for (std::size_t f = 0; f < areas.size(); ++f) {
    mask[f] = !(areas[f] >= ratio * mean) || face_angles(mesh, f).degenerate;
  }
  return mask;
}

ElementValues angular_distortion(const TriangleMesh& orig, const TriangleMesh& mapped, double degenerate_ratio) {
  if (!same_connectivity(orig, mapped)) throw MeshError("angular_distortion: meshes do not share connectivity");
  auto bad_orig = degenerate_face_mask(orig, degenerate_ratio);
  auto bad_mapped = degenerate_face_mask(mapped, degenerate_ratio);
  ElementValues out;
  out.values.resize(orig.num_faces());
  out.excluded.resize(orig.num_faces());
  for (std::size_t f = 0; f < orig.num_faces(); ++f) {
    if (bad_orig[f] || bad_mapped[f]) {
      out.values[f] = kNaN;
      out.excluded[f] = true;
      continue;
    }
    FaceAngles a = face_angles(orig, f);
    FaceAngles b = face_angles(mapped, f);
    out.values[f] = std::max({std::abs(a.alpha - b.alpha) / a.alpha, std::abs(a.beta - b.beta) / a.beta,
                              std::abs(a.gamma - b.gamma) / a.gamma});
  }
  return out;
}

std::optional<double> lcr(const TriangleMesh& mesh, const EdgeFlap& flap) {
  double l_im = edge_length(mesh, flap.i, flap.m);
  double l_jk = edge_length(mesh, flap.j, flap.k);
  double l_mj = edge_length(mesh, flap.m, flap.j);
  double l_ki = edge_length(mesh, flap.k, flap.i);
  if (l_im == 0.0 || l_jk == 0.0 || l_mj == 0.0 || l_ki == 0.0) return std::nullopt;
  return length_cross_ratio(l_im, l_jk, l_mj, l_ki);
}

double length_cross_ratio(double l_im, double l_jk, double l_mj, double l_ki) {
  return (l_im * l_jk) / (l_mj * l_ki);
}

ElementValues lcr_deviation(const TriangleMesh& orig, const TriangleMesh& mapped, double degenerate_ratio) {
  return lcr_deviation(orig, mapped, edge_flaps(orig), degenerate_ratio);
}

ElementValues lcr_deviation(const TriangleMesh& orig, const TriangleMesh& mapped, const std::vector<EdgeFlap>& flaps,
                            double degenerate_ratio) {
  if (!same_connectivity(orig, mapped)) throw MeshError("lcr_deviation: meshes do not share connectivity");
  auto bad_orig = degenerate_face_mask(orig, degenerate_ratio);
  auto bad_mapped = degenerate_face_mask(mapped, degenerate_ratio);
  DirectedEdgeFaces lookup(orig);
  auto face_bad = [&](int a, int b) {
    auto f = lookup.find(a, b);
    return !f || bad_orig[*f] || bad_mapped[*f];
  };

  ElementValues out;
  out.values.resize(flaps.size());
  out.excluded.resize(flaps.size());
  for (std::size_t e = 0; e < flaps.size(); ++e) {
    const EdgeFlap& fl = flaps[e];
    bool bad = face_bad(fl.i, fl.j) || face_bad(fl.j, fl.i);
    auto c = lcr(orig, fl);
    auto c_mapped = lcr(mapped, fl);
    if (bad || !c || !c_mapped) {
      out.values[e] = kNaN;
      out.excluded[e] = true;
      continue;
    }
    out.values[e] = *c_mapped / *c;
  }
  return out;
}

bool same_connectivity(const TriangleMesh& a, const TriangleMesh& b) {
  return a.num_vertices() == b.num_vertices() && a.faces == b.faces;
}

ConformalityReport summarize(const TriangleMesh& orig, const TriangleMesh& mapped, double degenerate_ratio) {
  if (!same_connectivity(orig, mapped)) {
    throw MeshError("meshes do not share connectivity (" + std::to_string(orig.num_vertices()) + "/" +
                    std::to_string(orig.num_faces()) + " vs " + std::to_string(mapped.num_vertices()) + "/" +
                    std::to_string(mapped.num_faces()) + " vertices/faces)");
  }
  ConformalityReport r;
  r.angular = angular_distortion(orig, mapped, degenerate_ratio);
  r.lcr = lcr_deviation(orig, mapped, degenerate_ratio);
  r.angular_summary = summarize_values(r.angular);
  r.lcr_summary = summarize_values(r.lcr);

  double amax = r.angular_summary.count ? r.angular_summary.max : 0.0;
  r.angular_histogram = make_histogram(r.angular, 0.0, amax);
  double mu = r.lcr_summary.count ? r.lcr_summary.mean : 1.0;
  double half = r.lcr_summary.count ? 4.0 * r.lcr_summary.std : 0.0;
  if (!(half > 0.0)) half = 1e-12;
  r.lcr_histogram = make_histogram(r.lcr, mu - half, mu + half);

  double area = total_area(mapped);
  r.sphericity = area > 0.0 ? sphericity(mapped) : 0.0;
  r.negative_volume = signed_volume(mapped) < 0.0;
  auto bad = degenerate_face_mask(mapped, degenerate_ratio);
  r.degenerate_faces = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), true));
  r.valid = r.degenerate_faces == 0 && r.angular.excluded_count() == 0 && r.lcr.excluded_count() == 0;
  return r;
}

// ===========================================================================
// Serialization

nlohmann::json to_json(const Summary& s) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  return {{"mean", num(s.mean)}, {"std", num(s.std)}, {"count", s.count}, {"min", num(s.min)}, {"max", num(s.max)}};
}

nlohmann::json to_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}, {"underflow", h.underflow}, {"overflow", h.overflow}};
}

nlohmann::json to_json(const ConformalityReport& r) {
  nlohmann::json angular = to_json(r.angular_summary);
  angular["excluded"] = r.angular.excluded_count();
  angular["histogram"] = to_json(r.angular_histogram);
  nlohmann::json lcr = to_json(r.lcr_summary);
  lcr["excluded"] = r.lcr.excluded_count();
  lcr["histogram"] = to_json(r.lcr_histogram);
  return {{"sphericity", r.sphericity},  {"negative_volume", r.negative_volume},
          {"angular", angular},          {"lcr", lcr},
          {"degenerate_faces", r.degenerate_faces}, {"valid", r.valid}};
}

void write_elements_csv(const ConformalityReport& r, const TriangleMesh& mesh, const std::vector<EdgeFlap>& flaps,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV: " + path.string());
  out << std::setprecision(17);
  out << "kind,index,a,b,c,value,excluded\n";
  for (std::size_t f = 0; f < r.angular.values.size(); ++f) {
    const Face& t = mesh.faces[f];
    out << "face," << f << ',' << t[0] << ',' << t[1] << ',' << t[2] << ',';
    if (!r.angular.excluded[f]) out << r.angular.values[f];
    out << ',' << (r.angular.excluded[f] ? 1 : 0) << '\n';
  }
  for (std::size_t e = 0; e < r.lcr.values.size(); ++e) {
    out << "edge," << e << ',' << flaps[e].i << ',' << flaps[e].j << ",,";
    if (!r.lcr.excluded[e]) out << r.lcr.values[e];
    out << ',' << (r.lcr.excluded[e] ? 1 : 0) << '\n';
  }
}

} // namespace cmcf
