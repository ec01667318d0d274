#pragma once

// Sensitivity-bound construction and fixed-structure controller synthesis.
//
// The bound W_up(s) is an UPPER BOUND on |S(jw)|. Synthesis minimizes
// gamma = max_w |S(jw)| / |W_up(jw)| over a log grid and succeeds when the
// certified gamma is <= 1 (plus the grid tolerance).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "relcon/error.hpp"
#include "relcon/lincore.hpp"

namespace relcon {

/// Low-frequency relaxation of the bound: a lag pair
/// lift (s/corner + 1)/(lift s/corner + 1), unity above `corner` and `lift`
/// below corner/lift.
struct BoundLift {
    double corner = 10.0;  // rad/s
    double lift = 1.5;     // >= 1
};

struct SensitivityBound {
    double dc_level = 1e-3;   // |W_up(0)|
    double bandwidth = 200.0; // rad/s, where the base bound crosses ~1
    double peak = 2.0;        // |W_up(inf)|
    std::optional<BoundLift> lift;

    void validate() const;
    /// Corner frequencies of every pole and zero (rad/s).
    [[nodiscard]] std::vector<double> corners() const;

    static SensitivityBound performance();
    static SensitivityBound reliability();
};

/// W_up(s) = (s + w_b dc)/(s/M + w_b), times the lift pair when present.
TransferFunction build_bound_tf(const SensitivityBound& b);

enum class ControllerStructure { OneDof, TwoDof };

struct Controller {
    TransferFunction feedback;                 // K_y: error/measurement -> u
    std::optional<TransferFunction> feedforward;  // K_r: reference -> u (two-dof)
    ControllerStructure structure = ControllerStructure::OneDof;
};

struct SynthesisOptions {
    std::size_t order = 3;        // integrator/gain stage + (order - 1) lead-lag pairs
    bool integral_action = true;
    std::size_t restarts = 8;
    std::uint64_t seed = 1;
    std::size_t threads = 0;      // 0: hardware concurrency
    std::size_t grid_points = 2000;
    double grid_lo = 1e-3;
    double grid_hi = 1e6;
    /// Two-dof only: K_r = k (b s + z)/s ... (setpoint weight b on the proportional path).
    std::optional<double> setpoint_weight;
    std::size_t max_evaluations = 20000;

    void validate() const;
};

struct SynthesisResult {
    Controller controller;
    double gamma = 0.0;          // certified max |S/W_up|
    double gamma_omega = 0.0;    // where it occurs
    TransferFunction sensitivity;
    TransferFunction closed_loop;  // reference -> current
    FrequencyGrid grid;
    bool stable = false;
    std::vector<double> parameters;  // log-space optimizer coordinates
    std::size_t best_restart = 0;
};

/// Raised when no restart reaches gamma <= 1; carries the best gamma found.
class InfeasibleError : public Error {
public:
    InfeasibleError(double best_gamma, const std::string& what)
        : Error(ErrorKind::Infeasible, what), best_gamma_(best_gamma) {}

    [[nodiscard]] double best_gamma() const noexcept { return best_gamma_; }

private:
    double best_gamma_;
};

inline constexpr double kGammaTolerance = 1.0005;

SynthesisResult synthesize(const TransferFunction& plant, const SensitivityBound& bound,
                           const SynthesisOptions& opt = {});

struct ClosedLoop {
    TransferFunction sensitivity;  // 1/(1 + P K_y)
    TransferFunction tracking;     // P K_r S, K_r = K_y for one-dof
};

ClosedLoop closed_loop(const TransferFunction& plant, const Controller& k);

struct StepMetrics {
    double rise_time = 0.0;      // first 90% crossing (s)
    double settling_time = 0.0;  // last exit from the 2% band (s)
    double overshoot = 0.0;      // fraction above the final value
};

/// Unit-step metrics, linear interpolation between samples. The horizon
/// doubles from 1000 samples until the second half stays inside the band.
StepMetrics step_metrics(const TransferFunction& tracking, double dt);

struct BodeRow {
    double omega = 0.0;
    double s_mag = 0.0;
    double bound = 0.0;
    double tracking_mag = 0.0;
};

std::vector<BodeRow> bode_table(const SynthesisResult& r, const SensitivityBound& b, const FrequencyGrid& grid);

}  // namespace relcon
