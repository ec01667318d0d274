#pragma once

// Continuous-time SISO LTI kernel: rational transfer functions, controllable
// canonical realizations, frequency response, Routh-Hurwitz stability, ZOH
// simulation and a grid-based infinity-norm estimate.
//
// Polynomials are coefficient vectors in DESCENDING powers of s:
// {a0, a1, ..., an} means a0 s^n + a1 s^(n-1) + ... + an.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relcon {

using Complex = std::complex<double>;
using Poly = std::vector<double>;

namespace poly {

/// Drops leading zeros; an all-zero polynomial becomes {0}.
Poly trim(Poly p);
Poly mul(const Poly& a, const Poly& b);
Poly add(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double k);
/// Degree after trimming; the zero polynomial has degree 0.
std::size_t degree(const Poly& p);
Complex eval(const Poly& p, Complex s);
double eval(const Poly& p, double x);

}  // namespace poly

/// Strictly increasing angular frequencies (rad/s), all positive.
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> points);

    static FrequencyGrid log_spaced(double lo, double hi, std::size_t n);

    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<double> points_;
};

class TransferFunction {
public:
    TransferFunction(Poly num, Poly den, std::string io_units = {});

    /// Static gain k.
    static TransferFunction gain(double k, std::string io_units = {});

    [[nodiscard]] const Poly& num() const noexcept { return num_; }
    [[nodiscard]] const Poly& den() const noexcept { return den_; }
    [[nodiscard]] const std::string& io_units() const noexcept { return io_units_; }

    [[nodiscard]] std::size_t order() const noexcept { return poly::degree(den_); }
    [[nodiscard]] bool is_proper() const noexcept;
    [[nodiscard]] bool is_strictly_proper() const noexcept;

    [[nodiscard]] Complex eval(Complex s) const;
    /// num(0)/den(0); infinite for a pole at the origin.
    [[nodiscard]] double dc_gain() const;

    [[nodiscard]] TransferFunction with_units(std::string io_units) const;

    friend TransferFunction operator*(const TransferFunction& a, const TransferFunction& b);
    friend TransferFunction operator+(const TransferFunction& a, const TransferFunction& b);
    friend TransferFunction operator*(double k, const TransferFunction& a);

private:
    Poly num_;
    Poly den_;
    std::string io_units_;
};

/// Negative-feedback interconnection forward/(1 + forward*feedback).
TransferFunction feedback(const TransferFunction& forward, const TransferFunction& loop_return);

struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    StateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

    [[nodiscard]] Eigen::Index states() const noexcept { return A.rows(); }
    [[nodiscard]] Eigen::Index inputs() const noexcept { return B.cols(); }
    [[nodiscard]] Eigen::Index outputs() const noexcept { return C.rows(); }

    /// C (sI - A)^-1 B + D for SISO systems.
    [[nodiscard]] Complex eval(Complex s) const;
};

/// Controllable canonical realization of a proper transfer function.
StateSpace realize(const TransferFunction& tf);

/// Values num(jw)/den(jw) at each grid point. Throws on a pole on the grid.
std::vector<Complex> freq_response(const TransferFunction& tf, const FrequencyGrid& grid);

/// Routh-Hurwitz test: true iff every root has strictly negative real part.
bool is_hurwitz(std::span<const double> poly);
inline bool is_hurwitz(const Poly& p) { return is_hurwitz(std::span<const double>(p)); }

/// Exact zero-order-hold discretization of a state-space model.
class ZohDiscretization {
public:
    ZohDiscretization(const StateSpace& ss, double dt);

    [[nodiscard]] const Eigen::MatrixXd& Ad() const noexcept { return ad_; }
    [[nodiscard]] const Eigen::MatrixXd& Bd() const noexcept { return bd_; }
    [[nodiscard]] const Eigen::MatrixXd& C() const noexcept { return c_; }
    [[nodiscard]] const Eigen::MatrixXd& D() const noexcept { return d_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    Eigen::MatrixXd ad_, bd_, c_, d_;
    double dt_;
};

/// Simulates a SISO model on a zero-order-held input sampled every dt seconds.
/// Output sample k is C x_k + D u_k; the state starts at x0 (zero by default).
std::vector<double> simulate_lti(const StateSpace& ss, std::span<const double> input, double dt,
                                 const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

std::vector<double> simulate_lti(const ZohDiscretization& zoh, std::span<const double> input,
                                 const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

struct NormEstimate {
    double value = 0.0;  // max |tf(jw)| over the refined grid
    double omega = 0.0;  // frequency of the maximum (rad/s)
};

/// Grid estimate of the infinity norm of a stable transfer function. The
/// result is a lower bound of the true norm; the argmax neighbourhood is
/// refined (10x density, up to 3 rounds) until the peak moves by < 0.1%.
NormEstimate hinf_norm_on_grid(const TransferFunction& tf, const FrequencyGrid& grid);

}  // namespace relcon
