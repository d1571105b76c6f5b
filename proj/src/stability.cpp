#include "gdx/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gdx {

ArcMatrix arc_matrix(const Game& game, const Arc& arc) {
  if (!(arc.weight > 0.0)) {
    throw ZeroWeightArc("arc matrix needs a positive-weight arc");
  }
  const int dim = game.payoff_dim();
  Eigen::VectorXd covector = Eigen::VectorXd::Zero(dim);
  covector[game.coord(arc.player, arc.from_strategy)] = 1.0 / arc.weight;
  covector[game.coord(arc.player, arc.to_strategy)] = -1.0 / arc.weight;

  const Eigen::VectorXd rates =
      counterfactual_rates(game, game.profile_at(arc.from));
  ArcMatrix result;
  result.matrix =
      Eigen::MatrixXd::Identity(dim, dim) + rates * covector.transpose();
  result.covector = std::move(covector);
  result.arc = arc;
  return result;
}

PoincareMatrix poincare_matrix(const Game& game, const Walk& walk) {
  if (walk.length() < 2) {
    throw std::invalid_argument("walk needs at least 2 profiles");
  }
  PoincareMatrix result;
  result.walk = walk;
  Eigen::MatrixXd product =
      Eigen::MatrixXd::Identity(game.payoff_dim(), game.payoff_dim());
  for (int k = 0; k < walk.length(); ++k) {
    ArcMatrix am = arc_matrix(game, walk.arcs[k]);  // throws on zero weight
    product = am.matrix * product;
    result.partial_products.push_back(product);
    result.covectors.push_back(std::move(am.covector));
  }
  result.matrix = result.partial_products.back();
  return result;
}

Eigenpair dominant_eigenpair(const Eigen::MatrixXd& matrix, double tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0 ||
      !matrix.allFinite()) {
    throw std::invalid_argument("dominant_eigenpair needs a finite square matrix");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed to converge");
  }
  const Eigen::VectorXcd values = solver.eigenvalues();
  const int n = static_cast<int>(values.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]);
    const double mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    if (values[a].real() != values[b].real())
      return values[a].real() > values[b].real();
    return values[a].imag() > values[b].imag();
  });

  Eigenpair pair;
  pair.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) pair.eigenvalues[i] = values[order[i]];
  pair.lambda = pair.eigenvalues[0];

  const double top = std::abs(pair.lambda);
  const double second = n > 1 ? std::abs(pair.eigenvalues[1]) : 0.0;
  pair.dominance_gap = top > 0.0 ? (top - second) / top : 0.0;
  pair.dominant = n > 1 ? pair.dominance_gap > tol : true;

  int multiplicity = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(values[i] - pair.lambda) <= tol * std::max(1.0, top)) {
      ++multiplicity;
    }
  }
  pair.simple = multiplicity == 1;

  // Normalize to unit max-norm with the leading (largest-modulus) entry made
  // real positive; the real part is the meaningful vector when lambda is real.
  Eigen::VectorXcd column = solver.eigenvectors().col(order[0]);
  int lead = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(column[i]) > std::abs(column[lead])) lead = i;
  }
  column /= column[lead];
  pair.vector = column.real();
  return pair;
}

namespace {

struct ConditionCheck {
  bool ok = false;
  bool marginal = false;
  StabilityFailure failure = StabilityFailure::None;
  int failed_step = -1;
  std::vector<double> dwells;
  std::string detail;
};

// Walks the prefix points v_i = M_{a_i}...M_{a_1} w0, checking that each
// segment's argmax stays on the walk and that every dwell time is strictly
// positive. Endpoint checks cover the interior of each segment because the
// flow is linear in between.
ConditionCheck check_section_conditions(const Game& game,
                                        const PoincareMatrix& pm,
                                        const Eigen::VectorXd& w0,
                                        const StabilityTolerances& tols) {
  ConditionCheck check;
  const Walk& walk = pm.walk;
  const int k_count = walk.length();
  const double scale = w0.cwiseAbs().maxCoeff();
  const double dwell_band = tols.dwell_strictness * std::max(scale, 1e-300);

  Eigen::VectorXd v = w0;
  for (int k = 0; k < k_count; ++k) {
    // Playing profile p_{k+1} == walk.profiles[k]; the previous profile
    // (walk.profiles[k-1], wrapping) may sit tied at the top.
    const PureProfile& playing = walk.profiles[k];
    const PureProfile& previous =
        walk.profiles[(k + k_count - 1) % k_count];
    for (int i = 0; i < game.num_players(); ++i) {
      const int off = game.block_offset(i);
      double top = v[off];
      for (int s = 1; s < game.num_strategies(i); ++s) {
        top = std::max(top, v[off + s]);
      }
      const double tie_band = 1e-9 * (1.0 + std::abs(top));
      const double strict_band =
          tols.argmax_margin * (1.0 + std::abs(top));
      for (int s = 0; s < game.num_strategies(i); ++s) {
        const bool allowed =
            s == playing.strategies[i] || s == previous.strategies[i];
        if (s == playing.strategies[i]) {
          if (top - v[off + s] > tie_band) {
            check.failure = StabilityFailure::ArgmaxViolation;
            check.failed_step = k;
            check.detail = "walk strategy of player " + std::to_string(i) +
                           " is not an argmax at prefix " + std::to_string(k);
            return check;
          }
        } else if (!allowed && v[off + s] > top - strict_band) {
          check.failure = StabilityFailure::ArgmaxViolation;
          check.failed_step = k;
          check.detail = "strategy " + std::to_string(s) + " of player " +
                         std::to_string(i) +
                         " reaches the argmax at prefix " + std::to_string(k);
          return check;
        }
      }
    }

    const double dwell = pm.covectors[k].dot(v);
    check.dwells.push_back(dwell);
    if (dwell < -dwell_band) {
      check.failure = StabilityFailure::SectionViolation;
      check.failed_step = k;
      check.detail = "dwell time " + std::to_string(k) + " is negative";
      return check;
    }
    if (dwell <= dwell_band) check.marginal = true;
    v = pm.partial_products[k] * w0;
  }
  check.ok = true;
  return check;
}

std::string format_complex(std::complex<double> z) {
  std::ostringstream out;
  out << z.real();
  if (z.imag() != 0.0) out << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
  return out.str();
}

}  // namespace

StabilityVerdict stability_test(const Game& game, const Walk& walk,
                                const StabilityTolerances& tols) {
  const PoincareMatrix pm = poincare_matrix(game, walk);
  const Eigenpair pair = dominant_eigenpair(pm.matrix, tols.dominance_gap);

  StabilityVerdict verdict;
  verdict.dominance_gap = pair.dominance_gap;

  const double modulus = std::abs(pair.lambda);
  const bool real_lambda =
      std::abs(pair.lambda.imag()) <= tols.realness * std::max(modulus, 1.0);
  if (real_lambda) verdict.lambda = pair.lambda.real();

  if (std::abs(modulus - 1.0) <= tols.lambda_margin) {
    verdict.status = StabilityStatus::Marginal;
    verdict.detail = "spectral radius " + std::to_string(modulus) +
                     " lies on the unit boundary";
    return verdict;
  }
  if (!pair.dominant) {
    verdict.status = StabilityStatus::Unstable;
    verdict.failure = StabilityFailure::NotDominant;
    verdict.detail = "leading eigenvalue " + format_complex(pair.lambda) +
                     " is not dominant (gap " +
                     std::to_string(pair.dominance_gap) + ")";
    return verdict;
  }
  if (!pair.simple) {
    verdict.status = StabilityStatus::Unstable;
    verdict.failure = StabilityFailure::NotSimple;
    verdict.detail = "leading eigenvalue is not simple";
    return verdict;
  }
  if (!real_lambda) {
    verdict.status = StabilityStatus::Unstable;
    verdict.failure = StabilityFailure::ComplexDominant;
    verdict.detail =
        "leading eigenvalue " + format_complex(pair.lambda) + " is not real";
    return verdict;
  }
  const double lambda = pair.lambda.real();
  if (lambda <= 1.0 + tols.lambda_margin) {
    verdict.status = StabilityStatus::Unstable;
    verdict.failure = StabilityFailure::LambdaNotAboveOne;
    verdict.detail = "leading eigenvalue " + std::to_string(lambda) +
                     " does not exceed 1";
    return verdict;
  }

  // Sign of the eigenvector: prefer the sign giving a nonnegative first
  // dwell time; fall back to the other sign if the first fails.
  const double first_dwell = pm.covectors.front().dot(pair.vector);
  std::array<double, 2> signs = first_dwell >= 0.0
                                    ? std::array<double, 2>{1.0, -1.0}
                                    : std::array<double, 2>{-1.0, 1.0};
  ConditionCheck preferred;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Eigen::VectorXd w0 = signs[attempt] * pair.vector;
    ConditionCheck check = check_section_conditions(game, pm, w0, tols);
    if (attempt == 0) preferred = check;
    if (check.ok) {
      verdict.eigvec = PayoffPoint{w0, 0.0};
      verdict.dwell_times = std::move(check.dwells);
      if (check.marginal) {
        verdict.status = StabilityStatus::Marginal;
        verdict.detail = "a dwell time sits within tolerance of 0";
      } else {
        verdict.status = StabilityStatus::Stable;
        verdict.detail = "dominant simple real eigenvalue above 1 with the "
                         "eigenvector traversing the walk";
      }
      return verdict;
    }
  }
  verdict.status = StabilityStatus::Unstable;
  verdict.failure = preferred.failure;
  verdict.failed_step = preferred.failed_step;
  verdict.eigvec = PayoffPoint{signs[0] * pair.vector, 0.0};
  verdict.dwell_times = std::move(preferred.dwells);
  verdict.detail = preferred.detail;
  return verdict;
}

Walk rotate_walk(const Walk& walk, int i) {
  const int k_count = walk.length();
  if (i < 0 || i >= k_count) {
    throw std::invalid_argument("rotation index out of range");
  }
  Walk rotated;
  rotated.profiles.reserve(k_count);
  rotated.arcs.reserve(k_count);
  for (int k = 0; k < k_count; ++k) {
    rotated.profiles.push_back(walk.profiles[(i + k) % k_count]);
    rotated.arcs.push_back(walk.arcs[(i + k) % k_count]);
  }
  return rotated;
}

FourCycleReport four_cycle_analysis(const Game& game, const Walk& walk) {
  if (walk.length() != 4 || !walk.is_simple()) {
    throw std::invalid_argument("four_cycle_analysis needs a simple 4-cycle");
  }
  for (const Arc& arc : walk.arcs) {
    if (!(arc.weight > 0.0)) {
      throw ZeroWeightArc("degenerate 4-cycle: an arc has weight 0");
    }
  }
  // A 4-cycle alternates two deviating players over a 2x2 subgame.
  const int odd_player = walk.arcs[0].player;   // switches on arcs 1 and 3
  const int even_player = walk.arcs[1].player;  // switches on arcs 2 and 4
  if (walk.arcs[2].player != odd_player || walk.arcs[3].player != even_player ||
      odd_player == even_player) {
    throw std::invalid_argument("4-cycle does not alternate two players");
  }

  const double a1 = walk.arcs[0].weight;
  const double a2 = walk.arcs[1].weight;
  const double a3 = walk.arcs[2].weight;
  const double a4 = walk.arcs[3].weight;

  FourCycleReport report;
  report.first_player = even_player;
  report.second_player = odd_player;
  // even_player plays its c1-strategy on segments 1,2 and its c3-strategy on
  // segments 3,4; indifference of the opponent fixes the mix.
  report.first_strategies = {walk.profiles[0].strategies[even_player],
                             walk.profiles[2].strategies[even_player]};
  report.second_strategies = {walk.profiles[0].strategies[odd_player],
                              walk.profiles[1].strategies[odd_player]};

  Eigen::VectorXd first_mix(2), second_mix(2);
  first_mix << a3 / (a1 + a3), a1 / (a1 + a3);
  second_mix << a2 / (a2 + a4), a4 / (a2 + a4);
  report.fixed_point.distributions = {first_mix, second_mix};

  // Full-game mixed profile: deviators at the fixed point, everyone else at
  // their (constant) cycle strategy.
  MixedProfile full;
  full.distributions.resize(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(game.num_strategies(i));
    if (i == even_player) {
      d[report.first_strategies[0]] = first_mix[0];
      d[report.first_strategies[1]] = first_mix[1];
    } else if (i == odd_player) {
      d[report.second_strategies[0]] = second_mix[0];
      d[report.second_strategies[1]] = second_mix[1];
    } else {
      d[walk.profiles[0].strategies[i]] = 1.0;
    }
    full.distributions[i] = d;
  }
  report.fixed_point_payoffs = expected_utility(game, full);

  // Nash condition: no strategy may beat its owner's fixed-point payoff.
  report.persistent = true;
  for (int i = 0; i < game.num_players() && report.persistent; ++i) {
    for (int s = 0; s < game.num_strategies(i); ++s) {
      MixedProfile deviated = full;
      deviated.distributions[i] = Eigen::VectorXd::Zero(game.num_strategies(i));
      deviated.distributions[i][s] = 1.0;
      const double gain = expected_utility(game, deviated)[i];
      const double base = report.fixed_point_payoffs[i];
      if (gain > base + 1e-9 * (1.0 + std::abs(base))) {
        report.persistent = false;
        report.witness = std::make_pair(i, s);
        break;
      }
    }
  }
  return report;
}

SinkCertificate certify_sink_cycle(const Game& game, const Walk& walk) {
  if (!walk.is_simple()) {
    throw std::invalid_argument("certify_sink_cycle needs a simple cycle");
  }
  for (int k = 0; k < walk.length(); ++k) {
    if (!(walk.arcs[k].weight > 0.0)) {
      throw ZeroWeightArc("cycle arc " + std::to_string(k) + " has weight 0");
    }
  }

  SinkCertificate cert;
  const PreferenceGraph graph = build_graph(game);
  cert.is_sink = is_sink_cycle(graph, walk);
  cert.verdict = stability_test(game, walk);

  if (cert.is_sink) {
    if (walk.length() == 4) {
      // 2x2 sink subgame: an attractor, though only persistent (the return
      // map is the identity on the section).
      cert.four_cycle = four_cycle_analysis(game, walk);
      cert.attractor_claim = true;
    } else {
      if (!cert.verdict.stable()) {
        throw std::logic_error(
            "sink cycle of length " + std::to_string(walk.length()) +
            " failed the spectral test (" + cert.verdict.detail +
            "); this contradicts the sink-cycle stability guarantee");
      }
      cert.attractor_claim = true;
    }
  }
  return cert;
}

}  // namespace gdx
