#pragma once

// Internal node interface behind SymplecticMap. Separate header so the
// annulus chart and flow constructions can define their own nodes.

#include "hamrep/hamflow.hpp"

namespace hamrep {

inline constexpr double kHugeCoord = 1e30;

class MapNode {
 public:
  virtual ~MapNode() = default;
  virtual size_t dim() const = 0;
  virtual Vec displacement(const Vec& x) const = 0;
  virtual SmallMat jacobian(const Vec& x) const = 0;
  virtual Box support() const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json to_json() const = 0;
  // Exact inverse when the node has one; otherwise Newton inversion is used.
  virtual NodePtr native_inverse() const { return nullptr; }

  static Box infinite_box(size_t dim);
};

nlohmann::json gridfn_to_json(const GridFunction& f);
GridFunction gridfn_from_json(const nlohmann::json& j);

SymplecticMap psi_h_from_json(const nlohmann::json& j);
SymplecticMap straightening_from_json(const nlohmann::json& j);

}  // namespace hamrep
