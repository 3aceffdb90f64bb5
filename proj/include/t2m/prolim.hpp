#pragma once

#include "t2m/t2bundle.hpp"

namespace t2m {

// Chart id convention for level manifolds of a tower.
std::string level_chart_id(int level);

// A finite tower of model spaces E^1 ... E^N with surjective connecting
// linear maps rho(j, i): E^j -> E^i for j >= i.  Levels are 1-based.  The
// chart-level connecting maps phi(j, i) default to the linear map rho(j, i)
// (the levels live in limit-compatible charts); a nonlinear override may be
// stored per pair.
class Tower {
public:
    explicit Tower(std::vector<int> level_dims);

    // Canonical tower: rho(j, i) keeps the first dim(i) coordinates.
    // Requires non-decreasing level dimensions.
    static Tower truncation(std::vector<int> level_dims);

    int depth() const { return static_cast<int>(dims_.size()); }
    int dim(int level) const;

    Mat rho(int j, int i) const;  // identity for j == i
    bool has_rho(int j, int i) const;
    void set_rho(int j, int i, Mat m);

    Map2 phi(int j, int i) const;
    bool has_phi_override(int j, int i) const;
    void set_phi(int j, int i, Map2 m);

private:
    void require_level(int level) const;

    std::vector<int> dims_;
    std::map<std::pair<int, int>, Mat> rho_;
    std::map<std::pair<int, int>, Map2> phi_;
};

struct TowerViolation {
    std::string what;
    int j = 0;
    int i = 0;
    int k = 0;
    double residual = 0.0;
};

struct TowerReport {
    bool pass = true;
    double worst = 0.0;
    int checks = 0;
    std::vector<TowerViolation> violations;
};

// Structural audit: rho-composition identities rho(i,k) rho(j,i) = rho(j,k),
// surjectivity of every connecting map, and functoriality of jet projection
// on deterministic sample jets (which exercises any phi overrides).
TowerReport check_tower(const Tower& tower, double tol = 1e-12);

// Project a level-j jet down to level i through phi(j, i); in the default
// linear charts this is (rho y, rho u, rho w).
Jet2 project_jet(const Tower& tower, const Jet2& jet, int j, int i);

// A compatible family of jets, one per level (index 0 holds level 1).
struct TowerJet {
    std::vector<Jet2> levels;
};

// Worst violation of the level-compatibility relations
// project_jet(level j) = stored level i over all pairs j >= i.
double tower_jet_residual(const Tower& tower, const TowerJet& tj);

// The family of all projections of a deepest-level jet — the levelwise
// expansion of a limit jet.
TowerJet project_all(const Tower& tower, const Jet2& top);

// Inverse direction: accept a per-level family, verify the compatibility
// relations within tol (ReconstructionError naming the first violated pair
// otherwise), and realize the limit jet through the polynomial curve
//   h(t) = y + t u + (t^2/2) w
// at the deepest level, whose projections reproduce the family.
TowerJet reconstruct_limit_jet(const Tower& tower, const std::vector<Jet2>& family,
                               double tol = 1e-12);

// An element of the compatibility group over the tower: one invertible
// linear map per level on E^i x E^i (u stacked over v), commuting with the
// doubled connecting maps.
struct TowerLinearMap {
    std::vector<Mat> levels;  // index 0 holds level 1; shape 2 dim(i) square
};

struct MembershipReport {
    bool member = true;
    double worst = 0.0;
    std::string reason;
};

// Membership test: every level map invertible and
// (rho x rho) l^j = l^k (rho x rho) for all j >= k within tol.
MembershipReport tower_membership(const TowerLinearMap& map, const Tower& tower,
                                  double tol = 1e-12);

// Levelwise group operations; compose requires equal depths, invert throws
// SingularError on a singular level.
TowerLinearMap tower_compose(const TowerLinearMap& a, const TowerLinearMap& b);
TowerLinearMap tower_invert(const TowerLinearMap& a);
TowerLinearMap tower_identity(const Tower& tower);

// Random member for closure tests on truncation towers: the deepest-level
// matrix is filled on the entries the level filtration allows (a coordinate
// may only depend on coordinates born at its own or an earlier level) and
// made strictly diagonally dominant, so every level restriction is
// invertible and the commutation relations hold by construction.
TowerLinearMap random_tower_map(const Tower& tower, std::uint64_t seed);

// One Christoffel field per level, in the level charts.
struct TowerChristoffel {
    std::vector<ChristoffelField> levels;
};

// Deviation of the two commuting squares tying level trivializations
// together, maximized over the sample jets (given at level j):
//   base square:  phi(j,i) of the basepoint = basepoint of the projected jet,
//   fiber square: (rho x rho) of the straightened fiber = straightened fiber
//                 of the projected jet.
double limit_square_residual(const std::vector<Trivialization>& trivs, const Tower& tower,
                             int j, int i, const std::vector<Jet2>& samples_level_j);

// Verifies rho-equivariance of the level fields,
//   rho(j,i) Gamma^j(y)(u)(v) = Gamma^i(rho y)(rho u)(rho v),
// and that the local connection map commutes with jet projection, on random
// deepest-level samples pushed down to every pair of levels.
TowerReport limit_connection_check(const TowerChristoffel& gammas, const Tower& tower,
                                   int samples = 20, std::uint64_t seed = 0x7057,
                                   double tol = 1e-10);

}  // namespace t2m
