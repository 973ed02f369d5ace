#include "bnet/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace bnet {

namespace {

// 1 + tanh(y) without cancellation for y << 0.
double one_plus_tanh(double y) { return 2.0 / (1.0 + std::exp(-2.0 * y)); }

// sech^2(y) = 4 e^{-2|y|} / (1 + e^{-2|y|})^2, accurate in the tails.
double sech2(double y) {
  const double e = std::exp(-2.0 * std::abs(y));
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

struct ValueVisitor {
  double x;
  double operator()(const TanhAffine& f) const {
    return f.scale * ((f.offset - 1.0) + one_plus_tanh(f.gain * x));
  }
  double operator()(const CustomRate& f) const { return f.value(x); }
};

}  // namespace

std::string_view ChannelId::name() const {
  static constexpr std::array<std::string_view, 4> kNames = {"ee", "ei", "ie", "ii"};
  return kNames[index()];
}

FiringRate::FiringRate() : family_(TanhAffine{}) {}
FiringRate::FiringRate(TanhAffine family) : family_(family) {}
FiringRate::FiringRate(CustomRate family) : family_(std::move(family)) {
  const auto& c = std::get<CustomRate>(family_);
  if (!c.value) throw std::invalid_argument("CustomRate requires a value function");
}

FiringRate FiringRate::constant(double c) {
  CustomRate r;
  r.bound = c;
  r.lipschitz = 0.0;
  r.value = [c](double) { return c; };
  r.first_derivative = [](double) { return 0.0; };
  r.second_derivative = [](double) { return 0.0; };
  r.analytic_strip = std::numeric_limits<double>::infinity();
  return FiringRate(std::move(r));
}

double FiringRate::operator()(double x) const { return std::visit(ValueVisitor{x}, family_); }

bool FiringRate::has_derivative() const {
  if (std::holds_alternative<TanhAffine>(family_)) return true;
  return static_cast<bool>(std::get<CustomRate>(family_).first_derivative);
}

bool FiringRate::has_second_derivative() const {
  if (std::holds_alternative<TanhAffine>(family_)) return true;
  return static_cast<bool>(std::get<CustomRate>(family_).second_derivative);
}

double FiringRate::derivative(double x) const {
  if (const auto* f = tanh_affine()) {
    return f->scale * f->gain * sech2(f->gain * x);
  }
  const auto& c = std::get<CustomRate>(family_);
  if (!c.first_derivative) throw std::logic_error("firing rate has no analytic derivative");
  return c.first_derivative(x);
}

double FiringRate::second_derivative(double x) const {
  if (const auto* f = tanh_affine()) {
    const double y = f->gain * x;
    return -2.0 * f->scale * f->gain * f->gain * std::tanh(y) * sech2(y);
  }
  const auto& c = std::get<CustomRate>(family_);
  if (!c.second_derivative) throw std::logic_error("firing rate has no analytic second derivative");
  return c.second_derivative(x);
}

double FiringRate::bound() const {
  if (const auto* f = tanh_affine()) return f->scale * (1.0 + f->offset);
  return std::get<CustomRate>(family_).bound;
}

double FiringRate::lipschitz() const {
  if (const auto* f = tanh_affine()) return std::abs(f->scale * f->gain);
  return std::get<CustomRate>(family_).lipschitz;
}

double FiringRate::infimum() const {
  if (const auto* f = tanh_affine()) return f->scale * (f->offset - 1.0);
  return 0.0;
}

std::optional<double> FiringRate::analytic_strip() const {
  if (const auto* f = tanh_affine()) {
    if (f->gain == 0.0) return std::numeric_limits<double>::infinity();
    // tanh(g z) has its nearest poles at Im z = pi / (2 g).
    return std::numbers::pi / (2.0 * std::abs(f->gain));
  }
  return std::get<CustomRate>(family_).analytic_strip;
}

void NetworkParams::validate() const {
  for (const auto ch : kChannels) {
    if (!(C(ch) >= 0.0)) {
      throw std::invalid_argument("coupling C_" + std::string(ch.name()) + " must be non-negative");
    }
  }
  if (!(tau_e > 0.0) || !(tau_i > 0.0)) {
    throw std::invalid_argument("time constants must be positive");
  }
  if (n == 0) throw std::invalid_argument("population size n must be at least 1");
}

NetworkParams reference_params() {
  NetworkParams p;
  p.C(kEE) = 1.0;
  p.C(kEI) = 1.5;
  p.C(kIE) = 0.5;
  p.C(kII) = 0.5;
  p.tau_e = 1.0;
  p.tau_i = 1.0;
  p.n = 5000;
  // Rates follow the source population: excitatory sources use
  // 0.5 (tanh + 2), inhibitory sources use tanh + 1.
  p.f(kEE) = TanhAffine{0.5, 2.0, 1.0};
  p.f(kIE) = TanhAffine{0.5, 2.0, 0.4};
  p.f(kEI) = TanhAffine{1.0, 1.0, 1.25};
  p.f(kII) = TanhAffine{1.0, 1.0, 0.5};
  return p;
}

MicroState::MicroState(std::vector<double> excitatory, std::vector<double> inhibitory, double time)
    : t(time),
      u_e(std::move(excitatory)),
      u_i(std::move(inhibitory)),
      last_e(u_e.size(), time),
      last_i(u_i.size(), time) {
  if (u_e.size() != u_i.size()) {
    throw std::invalid_argument("MicroState populations must have equal size");
  }
}

double MicroState::decay_to(Population p, std::size_t j, double time, double tau) {
  auto& value = u(p)[j];
  auto& stamp = last(p)[j];
  if (time != stamp) {
    value *= std::exp(-(time - stamp) / tau);
    stamp = time;
  }
  return value;
}

void MicroState::sync(double time, double tau_e, double tau_i) {
  for (const auto p : kPopulations) {
    const double tau = p == Population::kExcitatory ? tau_e : tau_i;
    auto& values = u(p);
    auto& stamps = last(p);
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (stamps[j] != time) {
        values[j] *= std::exp(-(time - stamps[j]) / tau);
        stamps[j] = time;
      }
    }
  }
  t = time;
}

bool MicroState::synced() const {
  for (const auto p : kPopulations) {
    for (const double s : last(p)) {
      if (s != t) return false;
    }
  }
  return true;
}

MacroState macro_of_micro(const MicroState& s) {
  if (s.size() == 0) throw std::invalid_argument("macro_of_micro: empty state");
  if (!s.synced()) throw std::logic_error("macro_of_micro: state not synced");
  auto moments = [](const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double mean = 0.0;
    for (const double x : u) mean += x;
    mean /= n;
    double var = 0.0;
    for (const double x : u) var += (x - mean) * (x - mean);
    return std::pair{mean, var / n};
  };
  const auto [ve, ke] = moments(s.u_e);
  const auto [vi, ki] = moments(s.u_i);
  return MacroState{ve, vi, ke, ki};
}

}  // namespace bnet
