#pragma once

#include "ecp/harness.hpp"
#include "ecp/limit.hpp"
#include "ecp/point_process.hpp"
#include "ecp/region.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ecp::cli
{

struct PsiQuery
{
    int j = 1;
    int k1 = 0;
    int k2 = 0;
    double t = 0.0;
    double s = 0.0;
};

/// Typed view of a validated configuration document. Every section is
/// optional; missing keys take the defaults recorded in `effective`.
struct RunConfig
{
    DensityModel model = DensityModel::unit_cube(1);
    double n = 1000.0;
    std::vector<double> t_grid{0.25, 0.5, 1.0};
    RegionSpec region = RegionSpec::all_space();

    std::vector<double> n_values{1000.0, 10000.0};
    int replications = 200;
    Centering centering = Centering::empirical;
    int projections = 5;
    double alpha = 0.01;
    double z_threshold = 3.0;
    double normality_pass_fraction = 0.9;

    double epsilon = 1e-6;
    std::uint64_t mc_samples = 1'000'000;
    int jobs = 1;
    std::optional<int> dim_cap;
    std::uint64_t clique_budget = 100'000'000;
    int k_max_cap = 100;
    VolumePolicy volume_policy = VolumePolicy::automatic;
    int grid_resolution = 256;

    std::vector<PsiQuery> psi_queries{PsiQuery{2, 1, 1, 0.5, 0.5}};

    int palm_k = 1;
    double palm_radius = 0.05;
    std::vector<int> palm_overlaps{0, 1};
    int palm_max_pair_k = 2;

    int gp_paths = 10;

    std::optional<std::string> input_cloud;
    std::uint64_t seed = 1;
    std::string output_dir;

    /// The document with every default filled in, as used for the run.
    nlohmann::ordered_json effective;

    CampaignConfig campaign() const;
    LimitOptions limit_options() const;
    PalmConfig palm() const;
};

/// Applies a dotted-path override such as `compute.epsilon=1e-5`. The value is
/// parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::ordered_json& document, const std::string& assignment);

/// Strict parse: unknown keys, wrong types and out-of-range values throw ValidationError.
RunConfig parse_run_config(const nlohmann::ordered_json& document, const std::string& command);

/// FNV-1a 64-bit hash of a string.
std::uint64_t fnv1a64(const std::string& text);

/// Entry point shared by the `ecp` binary and the tests. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

namespace exit_code
{
constexpr int success = 0;
constexpr int failure = 1;
constexpr int validation = 2;
constexpr int gate = 3;
constexpr int guard = 4;
} // namespace exit_code

} // namespace ecp::cli
