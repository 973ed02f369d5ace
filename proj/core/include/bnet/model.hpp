#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace bnet {

enum class Population : std::uint8_t { kExcitatory = 0, kInhibitory = 1 };

inline constexpr std::array<Population, 2> kPopulations = {
    Population::kExcitatory, Population::kInhibitory};

constexpr std::size_t index_of(Population p) { return static_cast<std::size_t>(p); }
constexpr char label_of(Population p) { return p == Population::kExcitatory ? 'e' : 'i'; }

/// Directed synaptic channel: spikes of `source` neurons drive `target` neurons.
struct ChannelId {
  Population target;
  Population source;

  constexpr std::size_t index() const { return 2 * index_of(target) + index_of(source); }
  /// Two-letter name, target first ("ee", "ei", "ie", "ii").
  std::string_view name() const;

  friend constexpr bool operator==(ChannelId, ChannelId) = default;
};

inline constexpr ChannelId kEE{Population::kExcitatory, Population::kExcitatory};
inline constexpr ChannelId kEI{Population::kExcitatory, Population::kInhibitory};
inline constexpr ChannelId kIE{Population::kInhibitory, Population::kExcitatory};
inline constexpr ChannelId kII{Population::kInhibitory, Population::kInhibitory};
inline constexpr std::array<ChannelId, 4> kChannels = {kEE, kEI, kIE, kII};

/// x -> scale * (tanh(gain * x) + offset). Positive everywhere when offset >= 1.
struct TanhAffine {
  double scale = 1.0;
  double offset = 1.0;
  double gain = 1.0;
};

/// Arbitrary bounded rate. Derivatives are optional; without them the
/// Jacobians fall back to central differences.
struct CustomRate {
  double bound = 1.0;
  double lipschitz = 0.0;
  std::function<double(double)> value;
  std::function<double(double)> first_derivative;
  std::function<double(double)> second_derivative;
  /// Half-width of a strip around the real axis on which `value` is analytic
  /// and bounded, if known. Selects the trapezoidal Gaussian rule.
  std::optional<double> analytic_strip;
};

class FiringRate {
 public:
  FiringRate();
  FiringRate(TanhAffine family);  // NOLINT(google-explicit-constructor)
  FiringRate(CustomRate family);  // NOLINT(google-explicit-constructor)

  /// f(x) = c for all x, with exact zero derivatives.
  static FiringRate constant(double c);

  double operator()(double x) const;

  bool has_derivative() const;
  bool has_second_derivative() const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// Upper bound C_f used for thinning.
  double bound() const;
  double lipschitz() const;
  /// Greatest lower bound, 0 when unknown.
  double infimum() const;
  std::optional<double> analytic_strip() const;

  const TanhAffine* tanh_affine() const { return std::get_if<TanhAffine>(&family_); }

 private:
  std::variant<TanhAffine, CustomRate> family_;
};

/// Network configuration shared by every module.
struct NetworkParams {
  std::array<double, 4> coupling{};  // C_{target,source}, indexed by ChannelId::index()
  double tau_e = 1.0;
  double tau_i = 1.0;
  std::size_t n = 1;  // neurons per population
  std::array<FiringRate, 4> rate;

  double C(ChannelId ch) const { return coupling[ch.index()]; }
  double& C(ChannelId ch) { return coupling[ch.index()]; }
  const FiringRate& f(ChannelId ch) const { return rate[ch.index()]; }
  FiringRate& f(ChannelId ch) { return rate[ch.index()]; }
  double tau(Population p) const { return p == Population::kExcitatory ? tau_e : tau_i; }

  /// Throws std::invalid_argument when C < 0, tau <= 0 or n == 0.
  void validate() const;
};

/// Parameter values of the two reference experiments; per-population n = 5000.
NetworkParams reference_params();

/// Population means and variances.
struct MacroState {
  double v_e = 0.0;
  double v_i = 0.0;
  double K_e = 0.0;
  double K_i = 0.0;

  double v(Population p) const { return p == Population::kExcitatory ? v_e : v_i; }
  double K(Population p) const { return p == Population::kExcitatory ? K_e : K_i; }

  friend bool operator==(const MacroState&, const MacroState&) = default;
};

/// Per-neuron potentials with lazily applied exponential decay: the true
/// value of neuron j at time `t` is u[j] * exp(-(t - last_update[j]) / tau).
struct MicroState {
  double t = 0.0;
  std::vector<double> u_e;
  std::vector<double> u_i;
  std::vector<double> last_e;
  std::vector<double> last_i;

  MicroState() = default;
  MicroState(std::vector<double> excitatory, std::vector<double> inhibitory, double time = 0.0);

  std::size_t size() const { return u_e.size(); }
  std::vector<double>& u(Population p) { return p == Population::kExcitatory ? u_e : u_i; }
  const std::vector<double>& u(Population p) const {
    return p == Population::kExcitatory ? u_e : u_i;
  }
  std::vector<double>& last(Population p) { return p == Population::kExcitatory ? last_e : last_i; }
  const std::vector<double>& last(Population p) const {
    return p == Population::kExcitatory ? last_e : last_i;
  }

  /// Decays neuron j of population p to time `time` and returns its value.
  double decay_to(Population p, std::size_t j, double time, double tau);
  /// Advances the clock to `time` and decays every neuron to it.
  void sync(double time, double tau_e, double tau_i);
  bool synced() const;

  friend bool operator==(const MicroState&, const MicroState&) = default;
};

/// Empirical means and population variances (divisor n). Requires a synced state.
MacroState macro_of_micro(const MicroState& s);

/// Time grid with macro samples.
struct Trajectory {
  std::vector<double> times;
  std::vector<MacroState> states;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void push(double t, const MacroState& m) {
    times.push_back(t);
    states.push_back(m);
  }
};

/// Pair of per-population quantities, e.g. (F_e, F_i) or (Sigma_e, Sigma_i).
struct PopulationPair {
  double e = 0.0;
  double i = 0.0;
};

}  // namespace bnet
