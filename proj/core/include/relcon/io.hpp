#pragma once

// File formats: CSV (comma, '.', header row, LF, %.17g numbers), JSON
// exports and small hand-written SVG line plots. Files are written to a
// temporary sibling and renamed into place.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relcon/fatigue.hpp"
#include "relcon/scenario.hpp"
#include "relcon/synthesis.hpp"

namespace relcon {

/// Shortest text that parses back to the same double (%.17g).
std::string format_double(double v);

void atomic_write(const std::filesystem::path& path, const std::string& content);

struct TimeSeries {
    std::vector<double> time;
    std::vector<double> value;

    /// Sample period; requires uniform spacing (relative jitter < 1e-6).
    [[nodiscard]] double uniform_dt() const;
};

/// (time_s, <value_name>) rows sampled every dt from t = 0.
std::string timeseries_csv(std::span<const double> values, double dt, const std::string& value_name);
/// Two numeric columns with a header row. Errors name the offending line.
TimeSeries parse_timeseries_csv(const std::string& text);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

std::string histogram_csv(const CycleHistogram& hist);
/// PSD or damage-weight export: (omega_rad_s, value).
std::string spectrum_csv(const FrequencyGrid& grid, std::span<const double> values);
std::string bode_csv(const std::vector<BodeRow>& rows);
std::string study_csv(const StudyTable& table);

nlohmann::json controller_json(const SynthesisResult& r, Design design, const SensitivityBound& bound);
nlohmann::json study_summary_json(const StudyTable& table);
nlohmann::json lifetime_json(const LifetimeReport& r);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

std::string svg_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace relcon
