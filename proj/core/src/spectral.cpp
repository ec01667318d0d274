#include "relcon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "relcon/error.hpp"
#include "relcon/special.hpp"

namespace relcon {

void Psd::validate() const {
    require(values.size() == grid.size() && delta_omega.size() == grid.size(), "psd: size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]) && values[i] >= 0.0, "psd: values must be finite and >= 0");
        require(std::isfinite(delta_omega[i]) && delta_omega[i] > 0.0, "psd: bin widths must be > 0");
    }
}

double Psd::variance() const {
    double v = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        v += values[i] * delta_omega[i];
    }
    return v;
}

Psd estimate_psd(std::span<const double> signal, double dt, std::size_t segment_len) {
    require(segment_len >= 8, "estimate_psd: segment length must be >= 8");
    require(segment_len <= signal.size(), "estimate_psd: segment length exceeds the signal length");
    require(std::isfinite(dt) && dt > 0.0, "estimate_psd: dt must be > 0");
    for (double v : signal) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Numerical, "estimate_psd: non-finite sample");
        }
    }

    const std::size_t len = segment_len;
    const std::size_t step = len / 2;
    const std::size_t nseg = (signal.size() - len) / step + 1;
    const double fs = 1.0 / dt;

    std::vector<double> window(len);
    double wss = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        window[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(len)));
        wss += window[n] * window[n];
    }

    const std::size_t nbins = len / 2;  // bins 1..len/2 (DC dropped)
    std::vector<double> acc(nbins, 0.0);
    Eigen::FFT<double> fft;
    std::vector<double> seg(len);
    std::vector<std::complex<double>> spec;
    for (std::size_t s = 0; s < nseg; ++s) {
        const std::size_t off = s * step;
        // offset by the first sample so a constant segment is exactly zero
        const double x0 = signal[off];
        double mean = 0.0;
        for (std::size_t n = 0; n < len; ++n) {
            mean += signal[off + n] - x0;
        }
        mean /= static_cast<double>(len);
        for (std::size_t n = 0; n < len; ++n) {
            seg[n] = (signal[off + n] - x0 - mean) * window[n];
        }
        fft.fwd(spec, seg);
        for (std::size_t k = 1; k <= nbins; ++k) {
            acc[k - 1] += std::norm(spec[k]);
        }
    }

    const double dw = 2.0 * std::numbers::pi * fs / static_cast<double>(len);
    std::vector<double> omega(nbins), values(nbins);
    for (std::size_t k = 1; k <= nbins; ++k) {
        // one-sided: double every bin except Nyquist (even length)
        const bool nyquist = (len % 2 == 0) && k == nbins;
        const double one_sided = nyquist ? 1.0 : 2.0;
        const double per_hz = one_sided * acc[k - 1] / (static_cast<double>(nseg) * fs * wss);
        values[k - 1] = per_hz / (2.0 * std::numbers::pi);
        omega[k - 1] = dw * static_cast<double>(k);
    }
    Psd psd{FrequencyGrid(std::move(omega)), std::move(values), std::vector<double>(nbins, dw)};
    return psd;
}

double single_moment_damage(const Psd& psd, const SnCurve& sn, double duration) {
    psd.validate();
    sn.validate();
    require(duration >= 0.0, "single_moment_damage: duration must be >= 0");
    const double k = sn.k_sn;
    const double g = lanczos_gamma(1.0 + k / 2.0);
    double inner = 0.0;
    for (std::size_t i = 0; i < psd.values.size(); ++i) {
        const double var = psd.values[i] * psd.delta_omega[i];
        if (var <= 0.0) {
            continue;
        }
        const double w = psd.grid[i];
        const double rate = w / (2.0 * std::numbers::pi * sn.c_sn) * std::pow(2.0 * std::sqrt(2.0 * var), k) * g;
        inner += std::pow(rate, 2.0 / k);
    }
    return duration * std::pow(inner, k / 2.0);
}

DamageWeight damage_weight(const FosterNetwork& net, const LossParams& lp, const SnCurve& sn,
                           const FrequencyGrid& grid) {
    lp.validate();
    sn.validate();
    const auto g = freq_response(thermal_tf(net), grid);
    std::vector<double> w(grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[i] = std::pow(grid[i], 1.0 / sn.k_sn) * std::abs(g[i]);
        peak = std::max(peak, w[i]);
    }
    if (peak > 0.0) {
        for (auto& v : w) {
            v /= peak;
        }
    }
    return {grid, std::move(w)};
}

std::vector<double> bin_widths(const FrequencyGrid& grid) {
    const auto& p = grid.points();
    const std::size_t n = p.size();
    std::vector<double> dw(n);
    if (n == 1) {
        dw[0] = p[0];
        return dw;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? p[0] : 0.5 * (p[i - 1] + p[i]);
        const double hi = i + 1 == n ? p[n - 1] : 0.5 * (p[i] + p[i + 1]);
        dw[i] = hi - lo;
    }
    return dw;
}

Psd interpolate_psd(const Psd& psd, const FrequencyGrid& grid) {
    psd.validate();
    const auto& src = psd.grid.points();
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        if (w < src.front() || w > src.back()) {
            continue;
        }
        auto it = std::lower_bound(src.begin(), src.end(), w);
        const auto j = static_cast<std::size_t>(it - src.begin());
        if (src[j] == w) {
            out[i] = psd.values[j];
            continue;
        }
        const double t = (std::log(w) - std::log(src[j - 1])) / (std::log(src[j]) - std::log(src[j - 1]));
        out[i] = (1.0 - t) * psd.values[j - 1] + t * psd.values[j];
    }
    return {grid, std::move(out), bin_widths(grid)};
}

double closed_loop_damage_functional(const DamageWeight& w, const TransferFunction& g_cl, double loss_gain,
                                     const Psd& s_ref, const SnCurve& sn) {
    sn.validate();
    require(w.values.size() == w.grid.size(), "damage functional: weight size mismatch");
    const Psd ref = interpolate_psd(s_ref, w.grid);
    if (s_ref.variance() > 0.0 && ref.variance() == 0.0) {
        fail(ErrorKind::InvalidArgument, "damage functional: reference PSD does not overlap the weight grid");
    }
    const auto g = freq_response(g_cl, w.grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.grid.size(); ++i) {
        const double gp = loss_gain * std::abs(g[i]);
        sum += w.values[i] * w.values[i] * gp * gp * ref.values[i] * ref.delta_omega[i];
    }
    return std::pow(sum, sn.k_sn / 2.0);
}

}  // namespace relcon
