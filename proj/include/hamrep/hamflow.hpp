#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamrep/decomp.hpp"
#include "hamrep/gridfn.hpp"
#include "hamrep/report.hpp"

namespace hamrep {

using Vec = std::vector<double>;

struct InversionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small dense square matrix (Jacobians of 2n-dimensional maps).
struct SmallMat {
  size_t n = 0;
  std::vector<double> a;

  SmallMat() = default;
  explicit SmallMat(size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  static SmallMat identity(size_t n);
  double& operator()(size_t i, size_t j) { return a[i * n + j]; }
  double operator()(size_t i, size_t j) const { return a[i * n + j]; }
  SmallMat operator*(const SmallMat& o) const;
  SmallMat transpose() const;
  Vec apply(const Vec& x) const;
  double max_abs() const;
};

// Standard symplectic matrix J0 for dimension 2n: pairs (x1,x2),(x3,x4),...
SmallMat symplectic_j0(size_t dim);

// ||J^T J0 J - J0||_max
double symplectic_defect(const SmallMat& jac);

Vec solve_linear(SmallMat A, Vec b);

// Smooth 1-d profile with derivatives; closed-form backed and serializable.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double value(double t) const = 0;
  virtual double deriv(double t) const = 0;
  virtual double deriv2(double t) const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json params() const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;

// value = amp on [0, r1], 0 beyond r2, monotone C-infinity between.
ProfilePtr plateau_profile(double amp, double r1, double r2);
// 1-d grid function profile (6-point Lagrange interpolation).
ProfilePtr grid_profile(GridFunction f);
// Piecewise-linear-with-smoothed-drops profile for the slab shear family:
// slope `slope` on [c_k - half, c_k + half] for slab centers c_k, descending
// smoothly in the gaps, zero outside the active window.
ProfilePtr slab_profile(double slope, std::vector<double> centers, double half_width,
                        double gap, double active_lo, double active_hi);
ProfilePtr scaled_profile(ProfilePtr base, double scale);
ProfilePtr profile_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------

class MapNode;
using NodePtr = std::shared_ptr<const MapNode>;

struct FlowParams {
  double step = 1e-2;
  size_t max_steps = 200000;
  bool operator==(const FlowParams&) const = default;
};

// A composable area/volume-preserving map of R^{2n}.
class SymplecticMap {
 public:
  SymplecticMap() = default;
  explicit SymplecticMap(NodePtr node) : node_(std::move(node)) {}

  size_t dim() const;
  // apply(x) = x + displacement(x); displacement is computed natively so that
  // near-identity maps keep relative accuracy.
  Vec apply(const Vec& x) const;
  Vec displacement(const Vec& x) const;
  SmallMat jacobian(const Vec& x) const;
  // Box outside which the map is the identity.
  Box support() const;
  std::string kind() const;
  const NodePtr& node() const { return node_; }

  SymplecticMap inverse() const;

  static SymplecticMap identity(size_t dim);
  static SymplecticMap translation(Vec v);
  static SymplecticMap linear(SmallMat m, double tol = 1e-12);
  // x[target] += h(x[source]); (target, source) must form a symplectic pair.
  static SymplecticMap shear(size_t dim, size_t target, size_t source, ProfilePtr h);
  // Rotation of the (ax, ax+1) plane about `center` by angle(radius).
  static SymplecticMap radial_twist(size_t dim, size_t ax, Vec center2, ProfilePtr angle);
  // Function composition: maps.front() applied last (compose({F,G}) = F o G).
  static SymplecticMap composition(std::vector<SymplecticMap> maps);
  // Time-`time` flow of the autonomous Hamiltonian H (implicit midpoint).
  static SymplecticMap hamiltonian_flow(GridFunction H, double time, FlowParams params = {});

  nlohmann::json to_json() const;
  static SymplecticMap from_json(const nlohmann::json& j);

 private:
  NodePtr node_;
};

// Rigid translation of a disk realized as two opposite half-turn twists;
// Hamiltonian, compactly supported, exact closed form. Content within
// `content_radius` of `from` translates rigidly to `to`.
SymplecticMap disk_push(size_t dim, size_t ax, const Vec& from2, const Vec& to2,
                        double content_radius, double support_radius);

// Exchange of the contents of two cubes (centers a, b) by a global half-turn
// around the midpoint composed with local half-turns; identity outside
// `support_radius` of the midpoint.
SymplecticMap cube_swap(size_t dim, size_t ax, const Vec& a2, const Vec& b2,
                        double content_radius, double support_radius);

// Map evaluation helpers -----------------------------------------------------

Vec evaluate(const SymplecticMap& m, const Vec& p);

// u o Phi sampled on u's own grid.
GridFunction pullback(const SymplecticMap& m, const GridFunction& u);

// Max over sample points of ||J^T J0 J - J0||, analytic Jacobians.
double symplectic_residual(const SymplecticMap& m, const std::vector<Vec>& pts);
// Finite-difference variant (4th-order), the independent cross-check.
double symplectic_residual_fd(const SymplecticMap& m, const std::vector<Vec>& pts,
                              double h = 1e-3);
SmallMat fd_jacobian(const SymplecticMap& m, const Vec& x, double h = 1e-3);

// Quasi-random points in a box (Halton), for audits.
std::vector<Vec> halton_points(const Box& box, size_t count);

// ---------------------------------------------------------------------------
// Constructions from the flow side.

// Section-transport map for H = x1 + h: unique symplectomorphism mapping the
// H-flow lines through {x2 = 1} onto the reference x1-flow lines. Satisfies
// pullback(Psi_h, x1) - x1 = h and the displacement bound
// |Psi_h* x_i - x_i| <= 2 |1 - x2| |dh|_inf.
SymplecticMap build_psi_h(const GridFunction& h, double sigma_step = 1.0 / 96.0);

// Compactly supported straightening: Phi* (lambda x1) - lambda x1 = h on
// (-L,L)^{2n}, Phi identity outside a box reported by support().
SymplecticMap build_straightening(const GridFunction& h, double L, double lambda);

struct AnnulusPair {
  // psi: (R/2piZ) x [-x_band, x_band] -> box, symplectic embedding, identity
  // on [-1,1] x [-x_band, x_band].
  std::shared_ptr<const class AnnulusChart> chart;
  SymplecticMap rotation;  // Phi with Phi(psi(t,x)) = psi(t + alpha, x)
};

AnnulusPair build_annulus_rotation();

// Theta with Theta(p) = p and f o Theta = x1 + c near p; requires
// df(p) = dx1 within 1e-8.
struct NormalizerResult {
  SymplecticMap theta;
  double c = 0.0;
  double delta = 0.0;  // half-size of the flattened neighborhood
};
NormalizerResult build_coordinate_normalizer(const GridFunction& f, const Vec& p);

}  // namespace hamrep
