#include "relcon/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace relcon {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            fail(ErrorKind::Io, fmt::format("cannot create directory '{}': {}", path.parent_path().string(),
                                            ec.message()));
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::Io, fmt::format("cannot open '{}' for writing", tmp.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            fail(ErrorKind::Io, fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::Io, fmt::format("cannot move output into place at '{}'", path.string()));
    }
}

double TimeSeries::uniform_dt() const {
    require(time.size() >= 2, "time series needs at least 2 samples");
    const double dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
    require(dt > 0.0, "time series must have increasing time stamps");
    for (std::size_t i = 1; i < time.size(); ++i) {
        const double step = time[i] - time[i - 1];
        if (std::abs(step - dt) > 1e-6 * dt) {
            fail(ErrorKind::InvalidArgument, fmt::format("time series is not uniformly sampled near row {}", i + 1));
        }
    }
    return dt;
}

std::string timeseries_csv(std::span<const double> values, double dt, const std::string& value_name) {
    std::string out = "time_s," + value_name + "\n";
    out.reserve(values.size() * 40);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += format_double(static_cast<double>(i) * dt);
        out += ',';
        out += format_double(values[i]);
        out += '\n';
    }
    return out;
}

namespace {

bool parse_number(std::string_view s, double& v) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(v);
}

}  // namespace

TimeSeries parse_timeseries_csv(const std::string& text) {
    TimeSeries ts;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            fail(ErrorKind::InvalidArgument, fmt::format("csv line {}: expected 2 comma-separated columns", line_no));
        }
        double t = 0.0;
        double v = 0.0;
        const bool ok = parse_number(line.substr(0, comma), t) && parse_number(line.substr(comma + 1), v);
        if (!ok) {
            if (!header_seen && ts.time.empty()) {
                header_seen = true;
                continue;
            }
            fail(ErrorKind::InvalidArgument, fmt::format("csv line {}: malformed number", line_no));
        }
        header_seen = true;
        ts.time.push_back(t);
        ts.value.push_back(v);
    }
    require(!ts.time.empty(), "csv: no data rows");
    return ts;
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::InvalidArgument, fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_timeseries_csv(ss.str());
}

std::string histogram_csv(const CycleHistogram& hist) {
    std::string out = "delta_T_K,mean_T_K,t_on_s,weight\n";
    for (const auto& c : hist.cycles) {
        out += fmt::format("{},{},{},{}\n", format_double(c.delta_t), format_double(c.mean_t), format_double(c.t_on),
                           format_double(c.weight));
    }
    return out;
}

std::string spectrum_csv(const FrequencyGrid& grid, std::span<const double> values) {
    require(values.size() == grid.size(), "spectrum_csv: size mismatch");
    std::string out = "omega_rad_s,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += fmt::format("{},{}\n", format_double(grid[i]), format_double(values[i]));
    }
    return out;
}

std::string bode_csv(const std::vector<BodeRow>& rows) {
    std::string out = "omega_rad_s,abs_S,bound,abs_Tr\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{}\n", format_double(r.omega), format_double(r.s_mag), format_double(r.bound),
                           format_double(r.tracking_mag));
    }
    return out;
}

std::string study_csv(const StudyTable& table) {
    std::string out =
        "bandwidth_rad_s,trial,design,damage_rainflow_norm,damage_spectral_norm,rms_error_norm,max_dT_K,median_Tj_K,"
        "seed\n";
    for (const auto& r : table.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_double(r.bandwidth), r.trial, to_string(r.design),
                           format_double(r.damage_rainflow_norm), format_double(r.damage_spectral_norm),
                           format_double(r.rms_error_norm), format_double(r.max_delta_t),
                           format_double(r.median_tj), r.seed);
    }
    return out;
}

namespace {

json tf_json(const TransferFunction& tf) { return {{"num", tf.num()}, {"den", tf.den()}}; }

double four_digits(double v) {
    if (v == 0.0 || !std::isfinite(v)) {
        return v;
    }
    return std::stod(fmt::format("{:.4g}", v));
}

}  // namespace

json controller_json(const SynthesisResult& r, Design design, const SensitivityBound& bound) {
    json j;
    j["design"] = to_string(design);
    j["structure"] = r.controller.structure == ControllerStructure::OneDof ? "one-dof" : "two-dof";
    j["feedback"] = tf_json(r.controller.feedback);
    j["feedforward"] = r.controller.feedforward ? tf_json(*r.controller.feedforward) : json(nullptr);
    j["gamma"] = four_digits(r.gamma);
    j["gamma_exact"] = r.gamma;
    j["gamma_omega_rad_s"] = r.gamma_omega;
    j["stable"] = r.stable;
    j["sensitivity"] = tf_json(r.sensitivity);
    j["tracking"] = tf_json(r.closed_loop);
    j["bound"] = tf_json(build_bound_tf(bound));
    j["certification_grid"] = {{"points", r.grid.size()}, {"lo", r.grid[0]}, {"hi", r.grid[r.grid.size() - 1]}};
    return j;
}

json study_summary_json(const StudyTable& table) {
    json rows = json::array();
    for (const auto& s : table.summary) {
        rows.push_back({{"bandwidth_rad_s", s.bandwidth},
                        {"damage_performance", s.damage_performance},
                        {"damage_reliability", s.damage_reliability},
                        {"damage_ratio", s.damage_ratio},
                        {"rms_error_performance", s.error_performance},
                        {"rms_error_reliability", s.error_reliability},
                        {"rms_error_ratio", s.error_ratio}});
    }
    return {{"normalization", "damage / max performance-design damage; rms error / sigma"}, {"bandwidths", rows}};
}

json lifetime_json(const LifetimeReport& r) {
    return {{"damage", r.damage},
            {"mission_s", r.mission_s},
            {"lifetime_s", std::isfinite(r.lifetime_s) ? json(r.lifetime_s) : json(nullptr)}};
}

// ---------------------------------------------------------------------------

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string svg_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    constexpr double W = 720, H = 440, ml = 70, mr = 150, mt = 40, mb = 55;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        require(s.x.size() == s.y.size(), "svg_plot: x and y differ in length");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && s.x[i] <= 0.0) || (spec.log_y && s.y[i] <= 0.0)) {
                continue;
            }
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0) {
        x1 = x0 + 1;
    }
    if (y1 == y0) {
        y1 = y0 + 1;
    }
    const double pw = W - ml - mr;
    const double ph = H - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        W, H);
    out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", ml + pw / 2,
                       escape_xml(spec.title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", ml, mt,
                       pw, ph);
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 + (y1 - y0) * i / 4.0;
        const double vx = spec.log_x ? std::pow(10.0, fx) : fx;
        const double vy = spec.log_y ? std::pow(10.0, fy) : fy;
        const double sx = ml + pw * i / 4.0;
        const double sy = mt + ph - ph * i / 4.0;
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx, mt + ph + 18,
                           vx);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", ml - 6, sy + 4, vy);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", ml + pw / 2, H - 12,
                       escape_xml(spec.x_label));
    out += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                       mt + ph / 2, mt + ph / 2, escape_xml(spec.y_label));

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && s.x[i] <= 0.0) || (spec.log_y && s.y[i] <= 0.0)) {
                continue;
            }
            pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
        const double ly = mt + 16 + 18.0 * static_cast<double>(k);
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           ml + pw + 10, ly - 4, ml + pw + 30, ly - 4, color);
        out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", ml + pw + 36, ly, escape_xml(s.label));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace relcon
