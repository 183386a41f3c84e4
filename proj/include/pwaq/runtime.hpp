#ifndef PWAQ_RUNTIME_HPP
#define PWAQ_RUNTIME_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pwaq/certify.hpp"
#include "pwaq/model.hpp"

namespace pwaq {

struct StepRecord {
  int k = 0;
  int mode = -1;
  Vec x;
  Vec u;
  double mu = 1.0;
  Vec q;  // transmitted quantized value (input or state case), or d_k
  bool zoom_event = false;
  bool requantized = false;
  bool saturation = false;
};

struct Trace {
  std::vector<StepRecord> steps;
  Vec x_final;
  bool failed_guarantee = false;
  std::string failure;
  int zoom_events = 0;

  int length() const { return static_cast<int>(steps.size()); }
};

enum class NoiseSource { Seeded, WorstCorner };

struct SimConfig {
  enum class Mode { InputQ, StateQ, Disturbed } mode = Mode::StateQ;
  Vec x0;
  int max_steps = 10000;
  double mu0 = 1.0;
  double stop_radius = 1e-6;
  uint64_t seed = 1;
  NoiseSource noise = NoiseSource::Seeded;
  bool requantize = true;
  bool force = false;  // run even when protocol preconditions fail
};

/// One input-quantized step at the current zoom; does not touch the zoom.
std::pair<Vec, StepRecord> step_input_q(const PwaSystem& sys,
                                        const AffineController& ctrl,
                                        const UniformQuantizer& quant,
                                        const ZoomState& z, const Vec& x);

/// One state-quantized step; requantization applied when enabled and the
/// quantization box straddles a cell boundary.
std::pair<Vec, StepRecord> step_state_q(const PwaSystem& sys,
                                        const AffineController& ctrl,
                                        const UniformQuantizer& quant,
                                        const ZoomState& z, const Vec& x,
                                        bool requantize);

/// Controller-side Chebyshev re-centering of a transmitted value whose
/// quantization box meets more than one cell. Returns the new value and
/// whether recomputation was applied.
std::pair<Vec, bool> requantize_value(const PwaSystem& sys,
                                      const UniformQuantizer& quant,
                                      const ZoomState& z, int mode,
                                      const Vec& q_transmitted);

Trace simulate_input_q(const PwaSystem& sys, const AffineController& ctrl,
                       const UniformQuantizer& quant,
                       const StabilityConstants& consts, const SimConfig& cfg);

Trace simulate_state_q(const PwaSystem& sys, const AffineController& ctrl,
                       const UniformQuantizer& quant,
                       const StabilityConstants& consts, const SimConfig& cfg);

Trace simulate_disturbed(const PwaSystem& sys, const AffineController& ctrl,
                         const SimConfig& cfg, double delta);

}  // namespace pwaq

#endif
