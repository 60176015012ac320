#pragma once

#include "sacbf/barrier.hpp"
#include "sacbf/dynamics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sacbf {

/// The five triangle-inequality terms whose sum bounds |psi_{m-1}''|.
struct PhiTerms {
  double hessian = 0.0;     ///< ||grad2_x psi|| ||F||^2
  double jacobian = 0.0;    ///< ||grad_x psi|| (||f_x|| + ||g_x|| ||u||) ||F||
  double mixed = 0.0;       ///< 2 ||grad2_xt psi|| ||F||
  double time = 0.0;        ///< |grad2_tt psi|
  double time_field = 0.0;  ///< ||grad_x psi|| (||f_t|| + ||g_t|| ||u||)

  double total() const { return hessian + jacobian + mixed + time + time_field; }
};

/// Spectral norms for matrices, 2-norms for vectors. The actuation Jacobian
/// tensor uses sqrt(sum_j ||dg/dx_j||^2), which bounds the bilinear map
/// (w, u) -> sum_j w_j (dg/dx_j) u.
PhiTerms phi_terms(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
                   const Eigen::VectorXd& input, double t, std::size_t piece);

/// Instantaneous bound Phi(x, u, t) >= |psi_{m-1}''| under held input u.
double phi(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
           const Eigen::VectorXd& input, double t);

/// Growth bound (e^{L dt} - 1)/L * ||F(x, u)||, or dt ||F|| when L = 0.
double tube_radius(const SystemModel& model, const Eigen::VectorXd& state, const Eigen::VectorXd& input, double dt,
                   double lipschitz_F, double t = 0.0);
double tube_radius_for_speed(double field_norm, double dt, double lipschitz_F);

struct SampleBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Sampled Lipschitz estimate: max over `samples` seeded pairs (a, b) in the
/// box of ||fn(a) - fn(b)|| / ||a - b||, times `safety_factor`. Pairs are
/// local: b is a perturbation of a by up to 5% of the box width per axis.
/// Axes of zero width are held fixed; a box with no extent returns 0.
double estimate_lipschitz(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn, const SampleBox& box,
                          int samples, std::uint64_t seed, double safety_factor = 1.5);

/// Abscissae of the r-point Gauss-Legendre rule mapped to [0, 1], ascending.
std::vector<double> gauss_legendre_nodes(int r);

/// How the input-variation term of the node correction is formed.
enum class InputVariation {
  /// Half the largest distance between candidate inputs.
  kCandidateSpread,
  /// Zero: the held input does not change between nodes.
  kHeldInput,
};

/// Which inputs the node bound is evaluated at.
enum class CandidateInputs {
  /// Every vertex of the input box plus the held input: covers any input
  /// the QP may pick.
  kBoxVertices,
  /// Only the held input. The bound then certifies that input alone, so the
  /// caller must re-check it against the input actually applied.
  kAppliedInput,
};

struct BoundSettings {
  int nodes = 5;
  double safety_factor = 1.5;
  int lipschitz_samples = 64;
  std::uint64_t seed = 1;
  /// Reuse cached Lipschitz constants while the anchor state moves less than
  /// this fraction of the cached tube radius.
  double cache_fraction = 0.1;
  InputVariation input_variation = InputVariation::kCandidateSpread;
  CandidateInputs candidates = CandidateInputs::kBoxVertices;
  /// Bound/QP rounds allowed per step with kAppliedInput.
  int certify_iterations = 8;
  /// Relative inflation applied when a bound has to be raised to cover the
  /// solved input.
  double certify_margin = 0.1;
};

struct NodeRecord {
  double t = 0.0;
  Eigen::VectorXd state;
  Eigen::VectorXd input;
  double phi = 0.0;
};

struct BoundEstimate {
  double m_hat = 0.0;
  double correction = 0.0;
  double m_bar = 0.0;
  int nodes_used = 0;
  std::vector<NodeRecord> node_records;
  double tube_radius = 0.0;
  double lipschitz_F = 0.0;
  double lipschitz_phi = 0.0;
  double delta_x = 0.0;
  double delta_u = 0.0;
};

/// Lipschitz constants at one anchor, reusable for nearby anchors.
struct LipschitzCacheEntry {
  Eigen::VectorXd anchor;
  std::size_t piece = 0;
  double tube_radius = 0.0;
  double lipschitz_F = 0.0;
  double lipschitz_phi = 0.0;
};

/// Node-based estimate of the inter-sample bound on |psi_{m-1}''| over
/// [t_k, t_k + dt]. Node states are one RK4 propagation under the previous
/// (held) input. Node inputs are the input-box vertices plus the held input,
/// or the held input alone with CandidateInputs::kAppliedInput, in which case
/// L_Phi is taken over the tube at that input and the cache is not used.
/// Pass `cache` to reuse Lipschitz constants across nearby calls.
BoundEstimate estimate_mbar(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
                            double t_k, double dt, const InputBox& input_set, const Eigen::VectorXd& previous_input,
                            const BoundSettings& settings, std::optional<LipschitzCacheEntry>* cache = nullptr);

/// Per-simulation estimator holding one Lipschitz cache per chain id.
/// Not thread-safe; one instance per simulation.
class BoundEstimator {
 public:
  BoundEstimator(SystemModel model, InputBox input_set, BoundSettings settings);

  BoundEstimate estimate(const BarrierChain& chain, const Eigen::VectorXd& state, double t_k, double dt,
                         const Eigen::VectorXd& previous_input);

  const BoundSettings& settings() const { return settings_; }

 private:
  SystemModel model_;
  InputBox input_set_;
  BoundSettings settings_;
  std::map<std::string, std::optional<LipschitzCacheEntry>> cache_;
};

}  // namespace sacbf
