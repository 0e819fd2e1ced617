#pragma once

#include <string>
#include <vector>

#include "posctrl/dp.hpp"
#include "posctrl/margin.hpp"
#include "posctrl/sim.hpp"

namespace posctrl {

// %.17g, enough digits that a double survives the round trip through text.
std::string format_double(double v);

// One row per time index. Columns are named in a header line; every writer
// here emits the same file for the same inputs, byte for byte.
std::string value_csv(const ValueSequence& vs);
std::string trajectory_csv(const SimResult& sim);
std::string margin_csv(const MarginReport& rep);
std::string policy_csv(const PolicySchedule& ps);
std::string sweep_csv(const std::vector<Vector>& alphas, const std::vector<MarginReport>& reports);

// Two space-separated columns, one point per line, as gnuplot expects.
std::string plot_data(const std::vector<double>& xs, const std::vector<double>& ys);

void write_file(const std::string& path, const std::string& content);

}  // namespace posctrl
