#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cqroute/cq_table.hpp"
#include "cqroute/rng.hpp"
#include "cqroute/types.hpp"

namespace cqroute {

inline constexpr int kNoAction = -1;
inline constexpr int kLocallyGenerated = -1;

/// Fixed-width policy input: best-K confidence and normalised hop rows, their
/// change since the node's previous decision toward the same destination, the
/// previous action and how the routed packet arrived.
struct Observation {
  std::vector<double> c_top;
  std::vector<double> h_top;
  std::vector<double> dc_top;
  std::vector<double> dh_top;
  int prev_action = kNoAction;
  int arrival_mode = kLocallyGenerated;

  static std::size_t width_for(int k) { return 4 * static_cast<std::size_t>(k) + 2; }
  std::size_t width() const { return 4 * c_top.size() + 2; }
  std::vector<double> flatten() const;
};

/// Builds the observation from precomputed top-K rows and refreshes the
/// table's delta snapshot for `dest`.
Observation build_observation_from_rows(CqTable& table, NodeId dest,
                                        std::span<const RouteEntry> rows,
                                        double h_cap, int prev_action,
                                        int arrival_mode);

Observation build_observation(CqTable& table, NodeId dest, int k, double h_cap,
                              int prev_action, int arrival_mode);

enum class Activation { kTanh, kLinear };

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;     // outputs
  Activation activation = Activation::kTanh;
};

/// Feed-forward network ending in two logits (unicast, broadcast).
struct PolicyWeights {
  int k_neighbors = 4;
  std::vector<int> layer_sizes;
  std::vector<DenseLayer> layers;
};

class WeightsError : public std::runtime_error {
 public:
  enum class Kind { kNotFound, kSchema, kDimension, kNonFinite };
  WeightsError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Checks the dimension chain, the 4K+2 input width, the two-way output and
/// finiteness of every parameter.
void validate_weights(const PolicyWeights& w);

PolicyWeights load_weights(const nlohmann::json& doc);
PolicyWeights load_weights_file(const std::filesystem::path& path);
nlohmann::json weights_to_json(const PolicyWeights& w);

struct ActionProbs {
  double unicast = 0.5;
  double broadcast = 0.5;
};

ActionProbs forward(const PolicyWeights& w, std::span<const double> input);

enum class PolicyKind { kCqPlus, kCqPlusHard, kNeural, kExternal };

enum class PrevActionFeature { kSelf, kUpstream };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kCqPlus;
  /// Minimum broadcast probability of the stochastic rule.
  double epsilon = 0.05;
  std::shared_ptr<const PolicyWeights> weights;
  /// Where the weights came from; informational.
  std::string weights_path;
  PrevActionFeature prev_action_feature = PrevActionFeature::kSelf;
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

double cq_plus_broadcast_probability(double c_best, double epsilon);
/// Draws exactly one uniform.
TxMode decide_cq_plus(double c_best, double epsilon, Rng& rng);
/// Broadcast iff c_best * (1 - epsilon) < 1/2.
TxMode decide_cq_plus_hard(double c_best, double epsilon);
/// Samples from forward(); draws exactly one uniform.
TxMode decide_neural(const PolicySpec& spec, std::span<const double> input,
                     Rng& rng);

}  // namespace cqroute
