#include "ecp/cli.hpp"

#include "ecp/errors.hpp"
#include "ecp/gaussian_process.hpp"
#include "ecp/random.hpp"
#include "ecp/rips.hpp"
#include "ecp/serialize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef ECP_VERSION
#define ECP_VERSION "0.1.0"
#endif

namespace ecp::cli
{

namespace
{

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Artifact
{
    std::string name;
    std::string content;
};

struct Outcome
{
    std::vector<Artifact> artifacts;
    int status = exit_code::success;
    std::string message;
};

struct Overrides
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<double> eps;
    std::optional<int> reps;
    std::optional<int> dim_cap;
    std::optional<std::string> out;
    std::optional<std::string> cloud;
    std::vector<std::string> sets;
};

std::string hex64(std::uint64_t value)
{
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << value;
    return s.str();
}

json load_document(const std::string& path)
{
    if (path.empty())
        return json::object();
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

PointCloud input_or_sampled(const RunConfig& cfg)
{
    const ScalingContext ctx(cfg.n, cfg.model.dimension());
    if (!cfg.input_cloud)
        return sample_poisson(cfg.model, ctx, cfg.seed);
    std::ifstream in(*cfg.input_cloud);
    if (!in)
        throw ValidationError("cannot open cloud file '" + *cfg.input_cloud + "'");
    auto cloud = read_cloud_csv(in, ctx);
    cloud.seed = cfg.seed;
    return cloud;
}

EnumerationOptions enumeration(const RunConfig& cfg)
{
    EnumerationOptions options;
    options.dim_cap = cfg.dim_cap;
    options.clique_budget = cfg.clique_budget;
    return options;
}

Outcome report_outcome(const ExperimentReport& report)
{
    Outcome out;
    std::ostringstream csv;
    write_report_csv(csv, report);
    out.artifacts.push_back({"report.json", dump(to_json(report))});
    out.artifacts.push_back({"report.csv", csv.str()});
    std::ostringstream message;
    message << report.kind << ": " << (report.passed() ? "PASS" : "FAIL");
    for (const auto& gate : report.gates)
        message << "\n  " << gate.name << ": " << (gate.passed ? "pass" : "fail") << " (" << gate.detail << ")";
    out.message = message.str();
    out.status = report.passed() ? exit_code::success : exit_code::gate;
    return out;
}

std::string covariance_csv(const CovarianceGrid& grid)
{
    std::ostringstream csv;
    csv << "t,s,value,std_error\n";
    for (std::size_t a = 0; a < grid.t_grid.size(); ++a)
    {
        for (std::size_t b = 0; b < grid.t_grid.size(); ++b)
        {
            const auto x = static_cast<Eigen::Index>(a);
            const auto y = static_cast<Eigen::Index>(b);
            csv << format_double(grid.t_grid[a]) << ',' << format_double(grid.t_grid[b]) << ','
                << format_double(grid.matrix(x, y)) << ',' << format_double(grid.std_error(x, y)) << '\n';
        }
    }
    return csv.str();
}

Outcome execute(const std::string& command, const RunConfig& cfg)
{
    Outcome out;
    if (command == "sample")
    {
        const auto cloud = sample_poisson(cfg.model, ScalingContext(cfg.n, cfg.model.dimension()), cfg.seed);
        std::ostringstream csv;
        write_cloud_csv(csv, cloud);
        out.artifacts.push_back({"cloud.csv", csv.str()});
        out.message = "sampled " + std::to_string(cloud.size()) + " points";
    }
    else if (command == "euler-curve")
    {
        const auto cloud = input_or_sampled(cfg);
        const auto curve = euler_curve(cloud, cfg.t_grid.back(), cfg.region, enumeration(cfg));
        std::ostringstream csv;
        write_curve_csv(csv, curve);
        out.artifacts.push_back({"curve.csv", csv.str()});
        out.artifacts.push_back({"curve.json", dump(to_json(curve))});
        out.message = "euler curve with " + std::to_string(curve.breakpoints.size()) + " breakpoints";
    }
    else if (command == "psi")
    {
        std::vector<PsiRow> rows;
        json results = json::array();
        const auto options = cfg.limit_options();
        for (std::size_t i = 0; i < cfg.psi_queries.size(); ++i)
        {
            const auto& q = cfg.psi_queries[i];
            McOptions mc = options.mc;
            mc.seed = combine_seed(cfg.seed, i);
            const auto estimate = psi(q.j, q.k1, q.k2, q.t, q.s, cfg.model, cfg.region, mc);
            rows.push_back({q.j, q.k1, q.k2, q.t, q.s, estimate});
            json entry = {{"j", q.j}, {"k1", q.k1}, {"k2", q.k2}, {"t", q.t}, {"s", q.s}};
            entry["estimate"] = to_json(estimate);
            results.push_back(entry);
        }
        std::ostringstream csv;
        write_psi_csv(csv, rows);
        out.artifacts.push_back({"psi.csv", csv.str()});
        out.artifacts.push_back({"psi.json", dump(json{{"region", to_json(cfg.region)}, {"results", results}})});
        out.message = "psi = " + format_double(rows.front().estimate.value);
    }
    else if (command == "limit-mean")
    {
        json results = json::array();
        std::ostringstream csv;
        csv << "t,value,std_error,k_max,tail_bound\n";
        std::ostringstream message;
        for (double t : cfg.t_grid)
        {
            const auto limit = limit_mean(t, cfg.model, cfg.region, cfg.limit_options());
            results.push_back({{"t", t}, {"estimate", to_json(limit.estimate)}, {"truncation", to_json(limit.truncation)}});
            csv << format_double(t) << ',' << format_double(limit.estimate.value) << ','
                << format_double(limit.estimate.std_error) << ',' << limit.truncation.k_max << ','
                << format_double(limit.truncation.tail_bound) << '\n';
            message << (message.tellp() > 0 ? "\n" : "") << "K(" << format_double(t)
                    << ") = " << format_double(limit.estimate.value);
        }
        out.artifacts.push_back({"limit_mean.json", dump(json{{"region", to_json(cfg.region)}, {"results", results}})});
        out.artifacts.push_back({"limit_mean.csv", csv.str()});
        out.message = message.str();
    }
    else if (command == "covariance")
    {
        const auto grid = limit_covariance_grid(cfg.t_grid, cfg.model, cfg.region, cfg.limit_options());
        json doc = to_json(grid);
        doc["increment_check"] = to_json(gp_increment_check(grid));
        out.artifacts.push_back({"covariance.json", dump(doc)});
        out.artifacts.push_back({"covariance.csv", covariance_csv(grid)});
        out.message = "covariance on " + std::to_string(grid.t_grid.size()) + " grid points, k_max " +
                      std::to_string(grid.truncation.k_max);
    }
    else if (command == "gp-sample")
    {
        auto grid = limit_covariance_grid(cfg.t_grid, cfg.model, cfg.region, cfg.limit_options());
        const auto increments = gp_increment_check(grid);
        repair_grid(grid);
        const auto paths = gp_sample_paths(grid, cfg.seed, static_cast<std::size_t>(cfg.gp_paths), cfg.jobs);
        std::ostringstream csv;
        write_paths_csv(csv, paths);
        json doc = {{"covariance", to_json(grid)}, {"increment_check", to_json(increments)}};
        out.artifacts.push_back({"gp.json", dump(doc)});
        out.artifacts.push_back({"gp_paths.csv", csv.str()});
        out.message = "sampled " + std::to_string(paths.size()) + " paths (jitter " + format_double(grid.psd_repair) + ")";
    }
    else if (command == "slln")
    {
        out = report_outcome(run_slln(cfg.campaign()));
    }
    else if (command == "fclt")
    {
        out = report_outcome(run_fclt(cfg.campaign()));
    }
    else if (command == "moments")
    {
        out = report_outcome(run_moment_asymptotics(cfg.campaign()));
    }
    else if (command == "palm-check")
    {
        out = report_outcome(run_palm_check(cfg.palm()));
    }
    else
    {
        throw ValidationError("unknown command '" + command + "'");
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    file << content;
    if (!file)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

int run_command(const std::string& command, const Overrides& overrides, std::ostream& out)
{
    const auto started = std::chrono::steady_clock::now();
    json document = load_document(overrides.config_path);
    if (!document.is_object())
        throw ValidationError("config: the document must be a JSON object");
    for (const auto& assignment : overrides.sets)
        apply_override(document, assignment);
    if (overrides.seed)
        document["seeds"]["base"] = *overrides.seed;
    if (overrides.jobs)
        document["compute"]["jobs"] = *overrides.jobs;
    if (overrides.eps)
        document["compute"]["epsilon"] = *overrides.eps;
    if (overrides.reps)
        document["campaign"]["replications"] = *overrides.reps;
    if (overrides.dim_cap)
        document["compute"]["dim_cap"] = *overrides.dim_cap;
    if (overrides.cloud)
        document["input"]["cloud"] = *overrides.cloud;
    if (overrides.out)
        document["output"]["dir"] = *overrides.out;
    if (!document.contains("output") || !document["output"].contains("dir") || document["output"]["dir"] == "")
    {
        const char* root = std::getenv("ECP_OUTPUT_ROOT");
        document["output"]["dir"] = (fs::path(root && *root ? root : "ecp-out") / command).string();
    }

    const RunConfig cfg = parse_run_config(document, command);
    Outcome outcome = execute(command, cfg);

    const std::string effective = dump(cfg.effective);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    json artifacts = json::array();
    for (const auto& artifact : outcome.artifacts)
    {
        write_file(dir / artifact.name, artifact.content);
        artifacts.push_back(artifact.name);
    }
    write_file(dir / "config.effective.json", effective);
    artifacts.push_back("config.effective.json");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest = {{"tool", "ecp"},
                     {"version", ECP_VERSION},
                     {"command", command},
                     {"config_hash", "fnv1a64:" + hex64(fnv1a64(effective))},
                     {"effective_config", "config.effective.json"},
                     {"seeds", {{"base", cfg.seed}}},
                     {"jobs", cfg.jobs},
                     {"wall_time_seconds", wall},
                     {"exit_status", outcome.status},
                     {"artifacts", artifacts}};
    write_file(dir / "manifest.json", dump(manifest));

    out << outcome.message << '\n' << "artifacts written to " << dir.string() << '\n';
    return outcome.status;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Euler characteristic processes of Vietoris-Rips complexes over Poisson point clouds", "ecp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ECP_VERSION));

    Overrides overrides;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"sample", "Sample a Poisson point cloud and write it as CSV"},
        {"euler-curve", "Exact Euler characteristic curve of a sampled or supplied cloud"},
        {"psi", "Evaluate psi_{j,k1,k2,A}(t,s) terms"},
        {"limit-mean", "Limit mean K_A(t) with a certified truncation"},
        {"covariance", "Limit covariance on the time grid"},
        {"gp-sample", "Sample paths of the limit Gaussian process"},
        {"slln", "Law-of-large-numbers campaign"},
        {"fclt", "Central-limit campaign"},
        {"palm-check", "Palm identities for simplex counts"},
        {"moments", "Mean and covariance asymptotics, including a restricted region"}};
    for (const auto& [name, description] : commands)
    {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("config", overrides.config_path, "JSON configuration file");
        sub->add_option("--seed", overrides.seed, "Base seed");
        sub->add_option("--jobs", overrides.jobs, "Worker threads");
        sub->add_option("--eps", overrides.eps, "Truncation epsilon");
        sub->add_option("--reps", overrides.reps, "Replications");
        sub->add_option("--dim-cap", overrides.dim_cap, "Largest simplex dimension to enumerate");
        sub->add_option("--out", overrides.out, "Output directory");
        sub->add_option("--cloud", overrides.cloud, "Point cloud CSV for euler-curve");
        sub->add_option("--set", overrides.sets, "Override a config value: section.key=value");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForVersion& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e, out, err);
        return exit_code::validation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try
    {
        return run_command(command, overrides, out);
    }
    catch (const ValidationError& e)
    {
        err << "validation error: " << e.what() << '\n';
        return exit_code::validation;
    }
    catch (const GuardTrip& e)
    {
        err << "guard tripped: " << e.what() << '\n';
        return exit_code::guard;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::failure;
    }
}

} // namespace ecp::cli
