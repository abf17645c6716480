// Copyright 2026 The Brainnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Idealized 10-20 electrode geometry on a unit sphere and geodesic distances
// between bipolar channel midpoints.
//
// Axes: +x toward the right ear, +y toward the nasion, +z through the
// vertex (Cz). The nasion-inion arc spans 180 degrees, so 10%/20% steps of
// the 10-20 system are 18/36 degree arcs. The outer ring (Fp1/Fp2 through
// O1/O2) sits 72 degrees from the vertex; F3/F4 and P3/P4 are great-circle
// midpoints of their neighbors on the frontal/parietal coronal arcs, which
// is where the 10-20 construction places them. Ear electrodes A1/A2 hang 18
// degrees below the ring on the lateral meridian.

#pragma once

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "brainnet/edf.hpp"
#include "brainnet/errors.hpp"
#include "brainnet/matrix.hpp"

namespace brainnet::montage {

using Vec3 = std::array<double, 3>;

namespace detail {

inline Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n < 1e-12) throw DegenerateMidpoint("zero-length vector");
  return {v[0] / n, v[1] / n, v[2] / n};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 from_angles(double inclination_deg, double azimuth_deg) {
  const double d = std::numbers::pi / 180.0;
  const double si = std::sin(inclination_deg * d), ci = std::cos(inclination_deg * d);
  return {std::cos(azimuth_deg * d) * si, std::sin(azimuth_deg * d) * si, ci};
}

}  // namespace detail

class ElectrodeTable {
 public:
  const Vec3& position(const std::string& label) const {
    const auto it = by_key_.find(edf::normalize_label(label));
    if (it == by_key_.end())
      throw UnknownElectrode("unknown electrode '" + label + "'", label);
    return it->second;
  }

  bool contains(const std::string& label) const {
    return by_key_.count(edf::normalize_label(label)) > 0;
  }

  void add(const std::string& label, const Vec3& unit_position) {
    by_key_[edf::normalize_label(label)] = unit_position;
  }

  static const ElectrodeTable& builtin() {
    static const ElectrodeTable t = make_builtin();
    return t;
  }

  // CSV rows: label,x,y,z. A header row "label,x,y,z" is allowed. Positions
  // are normalized onto the unit sphere on load.
  static ElectrodeTable from_csv(std::istream& in) {
    ElectrodeTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = edf::detail::trim(line);
      if (trimmed.empty()) continue;
      auto cols = edf::split_csv_line(trimmed);
      if (cols.size() != 4)
        throw MalformedField("electrode table line " + std::to_string(lineno) +
                             ": expected label,x,y,z");
      const std::string label = edf::detail::trim(cols[0]);
      if (lineno == 1 && edf::normalize_label(label) == "label") continue;
      Vec3 v;
      for (int i = 0; i < 3; ++i)
        v[static_cast<std::size_t>(i)] = edf::detail::parse_double_field(cols[static_cast<std::size_t>(i + 1)], "coordinate");
      if (t.contains(label))
        throw MalformedField("duplicate electrode '" + label + "' at line " +
                             std::to_string(lineno));
      try {
        t.add(label, detail::normalized(v));
      } catch (const DegenerateMidpoint&) {
        throw MalformedField("electrode '" + label + "' has a zero position vector");
      }
    }
    if (t.by_key_.empty()) throw MalformedField("electrode table is empty");
    return t;
  }

 private:
  static ElectrodeTable make_builtin() {
    using detail::from_angles;
    ElectrodeTable t;
    t.add("Cz", {0.0, 0.0, 1.0});
    t.add("Fz", from_angles(36.0, 90.0));
    t.add("Pz", from_angles(36.0, -90.0));
    t.add("C4", from_angles(36.0, 0.0));
    t.add("C3", from_angles(36.0, 180.0));
    const std::pair<const char*, double> ring[] = {
        {"T4", 0.0},   {"F8", 36.0},  {"Fp2", 72.0},  {"Fpz", 90.0},
        {"Fp1", 108.0}, {"F7", 144.0}, {"T3", 180.0},  {"T5", -144.0},
        {"O1", -108.0}, {"Oz", -90.0}, {"O2", -72.0},  {"T6", -36.0}};
    for (const auto& [label, az] : ring) t.add(label, from_angles(72.0, az));
    auto mid = [&](const char* a, const char* b) {
      const Vec3& va = t.position(a);
      const Vec3& vb = t.position(b);
      return detail::normalized({va[0] + vb[0], va[1] + vb[1], va[2] + vb[2]});
    };
    t.add("F4", mid("Fz", "F8"));
    t.add("F3", mid("Fz", "F7"));
    t.add("P4", mid("Pz", "T6"));
    t.add("P3", mid("Pz", "T5"));
    t.add("A1", from_angles(108.0, 180.0));
    t.add("A2", from_angles(108.0, 0.0));
    // modern equivalents of the temporal row
    t.add("T7", t.position("T3"));
    t.add("T8", t.position("T4"));
    t.add("P7", t.position("T5"));
    t.add("P8", t.position("T6"));
    return t;
  }

  std::map<std::string, Vec3> by_key_;
};

inline Vec3 electrode_position(const std::string& label,
                               const ElectrodeTable& table = ElectrodeTable::builtin()) {
  return table.position(label);
}

// A bipolar channel "A-B" is represented by the spherical midpoint of its
// two electrodes: normalize(pos(A) + pos(B)). Antipodal pairs have no
// midpoint.
inline Vec3 channel_node(const std::string& channel_label,
                         const ElectrodeTable& table = ElectrodeTable::builtin()) {
  const auto dash = channel_label.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= channel_label.size())
    throw UnknownElectrode("channel '" + channel_label + "' must name an electrode pair A-B",
                           channel_label);
  const Vec3 a = table.position(channel_label.substr(0, dash));
  const Vec3 b = table.position(channel_label.substr(dash + 1));
  const Vec3 sum{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  const double n = std::sqrt(detail::dot(sum, sum));
  if (n < 1e-9)
    throw DegenerateMidpoint("electrodes of '" + channel_label +
                             "' are antipodal; midpoint undefined");
  return {sum[0] / n, sum[1] / n, sum[2] / n};
}

// Pairwise geodesic (great-circle) distances between channel nodes, scaled
// so the largest off-diagonal entry is 1. A single channel yields [[0]];
// coincident nodes keep their zero distances.
inline Matrix distance_matrix(const std::vector<std::string>& channel_labels,
                              const ElectrodeTable& table = ElectrodeTable::builtin()) {
  const std::size_t n = channel_labels.size();
  std::vector<Vec3> nodes;
  nodes.reserve(n);
  for (const auto& l : channel_labels) nodes.push_back(channel_node(l, table));
  Matrix d(n, n);
  double max_off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = std::clamp(detail::dot(nodes[i], nodes[j]), -1.0, 1.0);
      const double ang = std::acos(c);
      d(i, j) = d(j, i) = ang;
      max_off = std::max(max_off, ang);
    }
  }
  if (max_off > 0.0)
    for (double& v : d.data) v /= max_off;
  return d;
}

}  // namespace brainnet::montage
