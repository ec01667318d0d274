#include "relcon/lincore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "relcon/error.hpp"

namespace relcon {

namespace poly {

Poly trim(Poly p) {
    auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
    if (first == p.end()) {
        return Poly{0.0};
    }
    p.erase(p.begin(), first);
    return p;
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) {
        return Poly{0.0};
    }
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Poly add(const Poly& a, const Poly& b) {
    const std::size_t n = std::max(a.size(), b.size());
    Poly out(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[n - a.size() + i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[n - b.size() + i] += b[i];
    }
    return out;
}

Poly scale(const Poly& a, double k) {
    Poly out(a);
    for (auto& c : out) {
        c *= k;
    }
    return out;
}

std::size_t degree(const Poly& p) {
    const auto t = trim(p);
    return t.size() - 1;
}

Complex eval(const Poly& p, Complex s) {
    Complex acc{0.0, 0.0};
    for (double c : p) {
        acc = acc * s + c;
    }
    return acc;
}

double eval(const Poly& p, double x) {
    double acc = 0.0;
    for (double c : p) {
        acc = acc * x + c;
    }
    return acc;
}

}  // namespace poly

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {
    require(!points_.empty(), "frequency grid is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        require(std::isfinite(points_[i]) && points_[i] > 0.0, "frequency grid points must be finite and > 0");
        if (i > 0) {
            require(points_[i] > points_[i - 1], "frequency grid must be strictly increasing");
        }
    }
}

FrequencyGrid FrequencyGrid::log_spaced(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo && n >= 2, "log_spaced needs 0 < lo < hi and n >= 2");
    std::vector<double> pts(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    pts.front() = lo;
    pts.back() = hi;
    return FrequencyGrid(std::move(pts));
}

// ---------------------------------------------------------------------------

TransferFunction::TransferFunction(Poly num, Poly den, std::string io_units)
    : num_(poly::trim(std::move(num))), den_(std::move(den)), io_units_(std::move(io_units)) {
    require(!den_.empty(), "transfer function denominator is empty");
    require(den_.front() != 0.0, "transfer function denominator has a zero leading coefficient");
    for (double c : num_) {
        require(std::isfinite(c), "transfer function numerator is not finite");
    }
    for (double c : den_) {
        require(std::isfinite(c), "transfer function denominator is not finite");
    }
}

TransferFunction TransferFunction::gain(double k, std::string io_units) {
    return TransferFunction({k}, {1.0}, std::move(io_units));
}

bool TransferFunction::is_proper() const noexcept { return poly::degree(num_) <= poly::degree(den_); }

bool TransferFunction::is_strictly_proper() const noexcept {
    return (num_.size() == 1 && num_[0] == 0.0) || poly::degree(num_) < poly::degree(den_);
}

Complex TransferFunction::eval(Complex s) const { return poly::eval(num_, s) / poly::eval(den_, s); }

double TransferFunction::dc_gain() const {
    const double d = den_.back();
    const double n = num_.back();
    if (d == 0.0) {
        return n == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::copysign(std::numeric_limits<double>::infinity(), n);
    }
    return n / d;
}

TransferFunction TransferFunction::with_units(std::string io_units) const {
    return TransferFunction(num_, den_, std::move(io_units));
}

TransferFunction operator*(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(poly::mul(a.num_, b.num_), poly::mul(a.den_, b.den_));
}

TransferFunction operator+(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(poly::add(poly::mul(a.num_, b.den_), poly::mul(b.num_, a.den_)),
                            poly::mul(a.den_, b.den_));
}

TransferFunction operator*(double k, const TransferFunction& a) {
    return TransferFunction(poly::scale(a.num_, k), a.den_, a.io_units_);
}

TransferFunction feedback(const TransferFunction& forward, const TransferFunction& loop_return) {
    // G/(1+GH) = Ng Dh / (Dg Dh + Ng Nh)
    Poly num = poly::mul(forward.num(), loop_return.den());
    Poly den = poly::add(poly::mul(forward.den(), loop_return.den()), poly::mul(forward.num(), loop_return.num()));
    return TransferFunction(std::move(num), poly::trim(std::move(den)));
}

// ---------------------------------------------------------------------------

StateSpace::StateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    require(A.rows() == A.cols(), "state-space A must be square");
    require(B.rows() == A.rows(), "state-space B row count must match A");
    require(C.cols() == A.cols(), "state-space C column count must match A");
    require(D.rows() == C.rows() && D.cols() == B.cols(), "state-space D must be outputs x inputs");
}

Complex StateSpace::eval(Complex s) const {
    require(inputs() == 1 && outputs() == 1, "StateSpace::eval supports SISO systems only");
    const Eigen::Index n = states();
    if (n == 0) {
        return D(0, 0);
    }
    Eigen::MatrixXcd m = -A.cast<Complex>();
    m.diagonal().array() += s;
    Eigen::VectorXcd x = m.partialPivLu().solve(B.col(0).cast<Complex>());
    return (C.row(0).cast<Complex>() * x)(0) + D(0, 0);
}

StateSpace realize(const TransferFunction& tf) {
    require(tf.is_proper(), "cannot realize an improper transfer function");
    const Poly& den = tf.den();
    const std::size_t n = den.size() - 1;
    const double a0 = den.front();

    // Pad numerator to n+1 coefficients and normalize by the leading denominator term.
    Poly b(n + 1, 0.0);
    const Poly& num = tf.num();
    for (std::size_t i = 0; i < num.size(); ++i) {
        b[n + 1 - num.size() + i] = num[i] / a0;
    }
    Poly a(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        a[i] = den[i] / a0;
    }

    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, N);
    Eigen::MatrixXd D = Eigen::MatrixXd::Constant(1, 1, b[0]);
    if (N > 0) {
        // x' = A x + B u with x = [x1 .. xn], x1' = x2, ..., xn' = -a_n x1 - ... - a_1 xn + u
        for (Eigen::Index i = 0; i + 1 < N; ++i) {
            A(i, i + 1) = 1.0;
        }
        for (Eigen::Index j = 0; j < N; ++j) {
            A(N - 1, j) = -a[n - static_cast<std::size_t>(j)];
        }
        B(N - 1, 0) = 1.0;
        for (Eigen::Index j = 0; j < N; ++j) {
            const std::size_t k = n - static_cast<std::size_t>(j);
            C(0, j) = b[k] - a[k] * b[0];
        }
    }
    return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

std::vector<Complex> freq_response(const TransferFunction& tf, const FrequencyGrid& grid) {
    std::vector<Complex> out;
    out.reserve(grid.size());
    const auto& den = tf.den();
    for (double w : grid.points()) {
        const Complex s{0.0, w};
        const Complex d = poly::eval(den, s);
        // Scale of the denominator terms at this frequency, for a relative zero test.
        double mag = 0.0;
        double wp = 1.0;
        for (auto it = den.rbegin(); it != den.rend(); ++it) {
            mag += std::abs(*it) * wp;
            wp *= w;
        }
        if (std::abs(d) <= 1e-13 * mag) {
            fail(ErrorKind::Numerical, fmt::format("pole on grid at omega = {} rad/s", w));
        }
        out.push_back(poly::eval(tf.num(), s) / d);
    }
    return out;
}

bool is_hurwitz(std::span<const double> p) {
    require(!p.empty() && p.front() != 0.0, "is_hurwitz: leading coefficient must be nonzero");
    for (double c : p) {
        require(std::isfinite(c), "is_hurwitz: coefficients must be finite");
    }
    const std::size_t n = p.size() - 1;
    if (n == 0) {
        return true;
    }
    const double sign = p.front() > 0.0 ? 1.0 : -1.0;
    std::vector<double> a(p.begin(), p.end());
    for (auto& c : a) {
        c *= sign;
    }
    // Necessary condition: all coefficients strictly positive.
    for (double c : a) {
        if (!(c > 0.0)) {
            return false;
        }
    }

    std::vector<double> prev, cur;
    for (std::size_t i = 0; i <= n; i += 2) {
        prev.push_back(a[i]);
    }
    for (std::size_t i = 1; i <= n; i += 2) {
        cur.push_back(a[i]);
    }
    cur.resize(prev.size(), 0.0);

    constexpr double eps = 1e-13;
    for (std::size_t row = 2; row <= n; ++row) {
        const double pivot = cur.front();
        double scale = 0.0;
        for (double c : cur) {
            scale = std::max(scale, std::abs(c));
        }
        for (double c : prev) {
            scale = std::max(scale, std::abs(c));
        }
        if (!(pivot > eps * scale)) {
            return false;
        }
        std::vector<double> next(prev.size(), 0.0);
        for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
            const double c1 = j + 1 < cur.size() ? cur[j + 1] : 0.0;
            next[j] = (pivot * prev[j + 1] - prev.front() * c1) / pivot;
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    double scale = 0.0;
    for (double c : prev) {
        scale = std::max(scale, std::abs(c));
    }
    return cur.front() > eps * scale;
}

// ---------------------------------------------------------------------------

ZohDiscretization::ZohDiscretization(const StateSpace& ss, double dt) : c_(ss.C), d_(ss.D), dt_(dt) {
    require(std::isfinite(dt) && dt > 0.0, "sample period dt must be > 0");
    const Eigen::Index n = ss.states();
    const Eigen::Index m = ss.inputs();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = ss.A * dt;
    aug.topRightCorner(n, m) = ss.B * dt;
    const Eigen::MatrixXd e = aug.exp();
    ad_ = e.topLeftCorner(n, n);
    bd_ = e.topRightCorner(n, m);
    if (!ad_.allFinite() || !bd_.allFinite()) {
        fail(ErrorKind::Numerical, "zero-order-hold discretization produced non-finite matrices");
    }
}

std::vector<double> simulate_lti(const ZohDiscretization& zoh, std::span<const double> input,
                                 const std::optional<Eigen::VectorXd>& x0) {
    require(zoh.Bd().cols() == 1 && zoh.C().rows() == 1, "simulate_lti supports SISO systems only");
    for (double u : input) {
        if (!std::isfinite(u)) {
            fail(ErrorKind::Numerical, "simulate_lti: non-finite input sample");
        }
    }
    const Eigen::Index n = zoh.Ad().rows();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (x0) {
        require(x0->size() == n, "simulate_lti: initial state has the wrong dimension");
        x = *x0;
    }
    const Eigen::MatrixXd& ad = zoh.Ad();
    const Eigen::VectorXd bd = zoh.Bd().col(0);
    const Eigen::RowVectorXd c = zoh.C().row(0);
    const double d = zoh.D()(0, 0);

    std::vector<double> y(input.size());
    Eigen::VectorXd next(n);
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double u = input[k];
        y[k] = c.dot(x) + d * u;
        next.noalias() = ad * x;
        next += bd * u;
        x.swap(next);
    }
    return y;
}

std::vector<double> simulate_lti(const StateSpace& ss, std::span<const double> input, double dt,
                                 const std::optional<Eigen::VectorXd>& x0) {
    return simulate_lti(ZohDiscretization(ss, dt), input, x0);
}

// ---------------------------------------------------------------------------

NormEstimate hinf_norm_on_grid(const TransferFunction& tf, const FrequencyGrid& grid) {
    if (!is_hurwitz(tf.den())) {
        fail(ErrorKind::Numerical, "norm undefined for unstable system");
    }
    const auto& pts = grid.points();
    const auto resp = freq_response(tf, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < resp.size(); ++i) {
        if (std::abs(resp[i]) > std::abs(resp[best])) {
            best = i;
        }
    }
    NormEstimate est{std::abs(resp[best]), pts[best]};

    double lo = pts[best > 0 ? best - 1 : 0];
    double hi = pts[std::min(best + 1, pts.size() - 1)];
    constexpr int kRounds = 3;
    constexpr std::size_t kLocal = 21;
    for (int round = 0; round < kRounds && hi > lo; ++round) {
        const auto local = FrequencyGrid::log_spaced(lo, hi, kLocal);
        const auto r = freq_response(tf, local);
        std::size_t j = 0;
        for (std::size_t i = 1; i < r.size(); ++i) {
            if (std::abs(r[i]) > std::abs(r[j])) {
                j = i;
            }
        }
        const double prev = est.value;
        if (std::abs(r[j]) > est.value) {
            est = {std::abs(r[j]), local[j]};
        }
        lo = local[j > 0 ? j - 1 : 0];
        hi = local[std::min(j + 1, kLocal - 1)];
        if (round > 0 && est.value - prev < 1e-3 * prev) {
            break;
        }
    }
    return est;
}

}  // namespace relcon
