#pragma once

#include <array>
#include <vector>

#include "hamrep/gridfn.hpp"
#include "hamrep/report.hpp"

namespace hamrep {

struct CoverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Box {
  std::vector<double> lo, hi;

  size_t dim() const { return lo.size(); }
  double volume() const {
    double v = 1.0;
    for (size_t k = 0; k < lo.size(); ++k) v *= (hi[k] - lo[k]);
    return v;
  }
  double width(size_t k) const { return hi[k] - lo[k]; }
  double center(size_t k) const { return 0.5 * (lo[k] + hi[k]); }
};

// Overlap of two boxes on a product of circles (periods[k] <= 0 means the
// axis is not periodic). Returns volume 0 when interiors are disjoint; the
// box returned is expressed in coordinates overlapping `a`.
Box box_intersection(const Box& a, const Box& b, const std::vector<double>& periods);

struct SplitResult {
  std::vector<GridFunction> parts;
  // max_j |D^m part_j| / |D^m f| for m = 1,2,3
  std::array<double, 3> constants_achieved{0, 0, 0};
};

// Telescoping split of a zero-mean function compactly supported in its
// interval box into parts with fiberwise zero mean along one axis each.
SplitResult split_zero_mean(const GridFunction& f, const BumpBasis& profile);

struct LocalizeResult {
  std::vector<GridFunction> parts;
  std::vector<Box> cover;
  double bound_ratio = 0.0;  // max_i |f_i| / |f|
};

// Decompose f on a periodic box into zero-integral parts subordinate to the
// cover. Mass repair runs along a maximum-overlap spanning tree of the
// overlap graph, with transfer bumps of unit integral in pair intersections.
LocalizeResult localize(const GridFunction& f, const std::vector<Box>& cover);

ReportFragment verify_split(const GridFunction& f, const SplitResult& split);
ReportFragment verify_localize(const GridFunction& f, const LocalizeResult& res);

}  // namespace hamrep
