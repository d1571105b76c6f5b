#pragma once

#include "gdx/brd.hpp"
#include "gdx/game.hpp"
#include "gdx/preference_graph.hpp"

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdx {

struct ZeroWeightArc : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Linear map sending a payoff point with argmax p to its state at the next
/// switch along the arc: M_a = I + u(p) c_a^T with c_a^T u(p) = -1, so M_a is
/// idempotent and singular.
struct ArcMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd covector;  // c_a; c_a^T w is the dwell time before the switch
  Arc arc;
};

ArcMatrix arc_matrix(const Game& game, const Arc& arc);

/// Product of a walk's arc matrices, last arc leftmost: the linear return map
/// of BRD on the walk's section.
struct PoincareMatrix {
  Eigen::MatrixXd matrix;
  Walk walk;
  std::vector<Eigen::MatrixXd> partial_products;  // P_i = M_{a_i} ... M_{a_1}
  std::vector<Eigen::VectorXd> covectors;         // c_{a_1} ... c_{a_K}
};

PoincareMatrix poincare_matrix(const Game& game, const Walk& walk);

struct Eigenpair {
  std::complex<double> lambda;
  Eigen::VectorXd vector;       // real part, unit max-norm, leading entry > 0
  bool simple = false;          // eigenspace of max-modulus value is 1-dim
  bool dominant = false;        // modulus strictly above all others
  double dominance_gap = 0.0;   // (|l1| - |l2|) / |l1|
  Eigen::VectorXcd eigenvalues; // full spectrum, sorted by modulus descending
};

/// Full dense nonsymmetric eigendecomposition; returns the maximum-modulus
/// eigenvalue and flags. Throws std::runtime_error if the solver fails.
Eigenpair dominant_eigenpair(const Eigen::MatrixXd& matrix, double tol = 1e-8);

enum class StabilityStatus { Stable, Unstable, Marginal };

enum class StabilityFailure {
  None,
  NotDominant,
  NotSimple,
  ComplexDominant,
  LambdaNotAboveOne,
  ArgmaxViolation,
  SectionViolation,
};

struct StabilityTolerances {
  double dominance_gap = 1e-8;    // required relative modulus gap
  double realness = 1e-10;        // |Im l| <= realness * |l|
  double lambda_margin = 1e-10;   // l > 1 + margin; Marginal inside the band
  double dwell_strictness = 1e-10;  // dwell > strictness * ||w||_inf
  double argmax_margin = 1e-12;   // strict margin for non-walk strategies
};

struct StabilityVerdict {
  StabilityStatus status = StabilityStatus::Unstable;
  StabilityFailure failure = StabilityFailure::None;
  int failed_step = -1;  // prefix index for argmax/dwell failures
  std::optional<double> lambda;
  std::optional<PayoffPoint> eigvec;
  std::vector<double> dwell_times;
  double dominance_gap = 0.0;
  std::string detail;

  bool stable() const { return status == StabilityStatus::Stable; }
};

/// Spectral stability test of a periodic walk: real simple dominant
/// eigenvalue above 1 whose eigenvector traverses the walk with strictly
/// positive dwell times.
StabilityVerdict stability_test(const Game& game, const Walk& walk,
                                const StabilityTolerances& tols = {});

/// The same walk started at profile i.
Walk rotate_walk(const Walk& walk, int i);

struct FourCycleReport {
  int first_player = -1;   // deviating player switching on arcs 2 and 4
  int second_player = -1;  // deviating player switching on arcs 1 and 3
  std::vector<int> first_strategies;   // full-game indices, cycle order
  std::vector<int> second_strategies;
  MixedProfile fixed_point;  // over the 2x2 subgame, deviators only
  Eigen::VectorXd fixed_point_payoffs;  // per player, full game
  bool persistent = false;
  std::optional<std::pair<int, int>> witness;  // (player, strategy) beating it
};

/// Interior fixed point of the 2x2 subgame spanned by a 4-cycle, from the
/// indifference conditions on the arc weights, plus the no-profitable-
/// deviation check that decides persistence.
FourCycleReport four_cycle_analysis(const Game& game, const Walk& walk);

struct SinkCertificate {
  bool is_sink = false;
  StabilityVerdict verdict;
  bool attractor_claim = false;
  std::optional<FourCycleReport> four_cycle;
};

/// Certifies a simple cycle: a sink cycle of length > 4 must test Stable
/// (anything else is reported as an internal error); a sink 4-cycle is the
/// persistent-but-not-stable subgame case and carries its fixed-point report.
SinkCertificate certify_sink_cycle(const Game& game, const Walk& walk);

}  // namespace gdx
