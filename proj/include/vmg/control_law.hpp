#pragma once

#include <string>

#include "vmg/model.hpp"

namespace vmg {

/// What a controller reports on each query. `command` is the raw law output,
/// `gamma` the saturated throttle actually handed to the plant.
struct ControlOutput {
  double command = 0.0;
  double gamma = 0.0;
  int phase = 0;
  double err_flow = 0.0;
  double err_pressure = 0.0;
};

/// Throttle controller contract: maps (t, state) to gamma in [gamma_min, gamma_max].
/// Implementations may carry internal state (e.g. a phase), so an instance is
/// owned by one integration at a time.
class ControlLaw {
 public:
  ControlLaw(double gamma_min, double gamma_max);
  virtual ~ControlLaw() = default;

  ControlOutput query(double t, const AnnulusState& state);

  double gamma_min() const noexcept { return gamma_min_; }
  double gamma_max() const noexcept { return gamma_max_; }
  double saturate(double gamma) const noexcept;

  virtual std::string name() const = 0;

 protected:
  /// Unsaturated law; fill `command` and optionally phase / errors.
  virtual ControlOutput evaluate(double t, const AnnulusState& state) = 0;

 private:
  double gamma_min_;
  double gamma_max_;
};

class ConstantThrottle final : public ControlLaw {
 public:
  ConstantThrottle(double gamma, double gamma_min, double gamma_max = 2.0);
  std::string name() const override { return "constant"; }

 protected:
  ControlOutput evaluate(double t, const AnnulusState& state) override;

 private:
  double gamma_;
};

}  // namespace vmg
