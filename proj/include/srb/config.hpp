#ifndef SRB_CONFIG_HPP
#define SRB_CONFIG_HPP

#include <string>
#include <vector>

#include "srb/diagnostics.hpp"
#include "srb/response.hpp"
#include "srb/ulam.hpp"
#include "srb/zeta.hpp"

namespace srb {

/// One JSON configuration document drives every subcommand: family and
/// observable descriptors plus numeric knobs (see README for the schema).
struct ToolConfig {
    MapDescriptor family;
    Observable observable;
    bool has_grid = false;
    double grid_min = 0.0;
    double grid_max = 0.0;
    int grid_count = 0;
    std::vector<Method> methods;
    int truncation = 16;
    int ulam_bins = 4096;
    int eta_depth = 14;
    int lambda_c_steps = 40;
    int fit_degree = 4;
    double safety = 0.9;
    double t = 0.0;
    double s = 0.0;
};

ToolConfig parse_config(const std::string& json_text);
ToolConfig load_config(const std::string& path);
SweepConfig make_sweep_config(const ToolConfig& cfg);

// Persisted formats ---------------------------------------------------------

std::string orbits_csv(const std::vector<PeriodicOrbit>& orbits);
std::string density_csv(const DensityEstimate& density);
std::string zeta_csv(const TraceSums& traces, const PowerSeries& series);
std::string diagnostics_csv(const CEReport& report);

std::string leading_zero_json(const LeadingZero& zero, int truncation, double t, double s);
std::string eigen_json(const EigenPair& pair);
std::string ce_report_json(const CEReport& report);
std::string sweep_report_json(const ResponseCurve& curve, const AnalyticityReport& fit);

void write_file(const std::string& path, const std::string& content);

} // namespace srb

#endif
