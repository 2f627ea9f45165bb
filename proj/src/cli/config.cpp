#include "ecp/cli.hpp"

#include "ecp/errors.hpp"

#include <cmath>
#include <set>

namespace ecp::cli
{

namespace
{

using json = nlohmann::ordered_json;

// Reads one object of the document, records the value actually used for every
// key into `effective`, and rejects keys nobody asked for.
class Section
{
public:
    Section(const json* source, json& effective, std::string path)
        : source_(source), effective_(effective), path_(std::move(path))
    {
        if (source_ && !source_->is_object())
            fail("", "must be an object");
        if (!effective_.is_object())
            effective_ = json::object();
    }

    bool has(const std::string& key) const { return source_ && source_->contains(key); }

    double number(const std::string& key, double fallback)
    {
        const json value = take(key, fallback);
        if (!value.is_number())
            fail(key, "must be a number");
        const double x = value.get<double>();
        if (!std::isfinite(x))
            fail(key, "must be finite");
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        const json value = take(key, fallback);
        if (!value.is_number_integer())
            fail(key, "must be an integer");
        return value.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        const json value = take(key, fallback);
        if (value.is_number_unsigned())
            return value.get<std::uint64_t>();
        if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(value.get<std::int64_t>());
        fail(key, "must be a non-negative integer");
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        const json value = take(key, fallback);
        if (!value.is_string())
            fail(key, "must be a string");
        return value.get<std::string>();
    }

    std::optional<std::string> optional_text(const std::string& key)
    {
        const json value = take(key, nullptr);
        if (value.is_null())
            return std::nullopt;
        if (!value.is_string())
            fail(key, "must be a string or null");
        return value.get<std::string>();
    }

    std::optional<std::int64_t> optional_integer(const std::string& key)
    {
        const json value = take(key, nullptr);
        if (value.is_null())
            return std::nullopt;
        if (!value.is_number_integer())
            fail(key, "must be an integer or null");
        return value.get<std::int64_t>();
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback)
    {
        const json value = take(key, fallback);
        if (!value.is_array())
            fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& item : value)
        {
            if (!item.is_number() || !std::isfinite(item.get<double>()))
                fail(key, "must contain only finite numbers");
            out.push_back(item.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key, const std::vector<int>& fallback)
    {
        const json value = take(key, fallback);
        if (!value.is_array())
            fail(key, "must be an array of integers");
        std::vector<int> out;
        for (const auto& item : value)
        {
            if (!item.is_number_integer())
                fail(key, "must contain only integers");
            out.push_back(item.get<int>());
        }
        return out;
    }

    Section child(const std::string& key)
    {
        used_.insert(key);
        const json* sub = has(key) ? &source_->at(key) : nullptr;
        return Section(sub, effective_[key], path_ + key + ".");
    }

    /// Raw access for arrays of objects; the caller fills the effective entry.
    const json* raw(const std::string& key)
    {
        used_.insert(key);
        return has(key) ? &source_->at(key) : nullptr;
    }
    json& effective(const std::string& key) { return effective_[key]; }

    void finish() const
    {
        if (!source_)
            return;
        for (const auto& item : source_->items())
            if (!used_.count(item.key()))
                throw ValidationError("config: unknown key '" + path_ + item.key() + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const
    {
        throw ValidationError("config: '" + path_ + key + "' " + message);
    }

    const std::string& path() const { return path_; }

private:
    json take(const std::string& key, const json& fallback)
    {
        used_.insert(key);
        const json value = has(key) ? source_->at(key) : fallback;
        effective_[key] = value;
        return value;
    }

    const json* source_;
    json& effective_;
    std::string path_;
    std::set<std::string> used_;
};

int to_int(Section& section, const std::string& key, std::int64_t value, std::int64_t lo, std::int64_t hi)
{
    if (value < lo || value > hi)
        section.fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(value);
}

Box parse_box(Section section, int dimension, const Box* fallback)
{
    const std::vector<double> zeros(static_cast<std::size_t>(dimension), 0.0);
    const std::vector<double> ones(static_cast<std::size_t>(dimension), 1.0);
    Box box{section.numbers("lo", fallback ? fallback->lo : zeros), section.numbers("hi", fallback ? fallback->hi : ones)};
    section.finish();
    if (static_cast<int>(box.lo.size()) != dimension || static_cast<int>(box.hi.size()) != dimension)
        section.fail("", "lo and hi must have one entry per dimension");
    box.validate();
    return box;
}

DensityModel parse_density(Section section)
{
    const std::string kind = section.text("kind", "uniform-cube");
    const int d = to_int(section, "dimension", section.integer("dimension", 1), 1, 64);
    if (kind == "uniform-cube")
    {
        const double side = section.number("side", 1.0);
        auto center = section.numbers("center", std::vector<double>(static_cast<std::size_t>(d), 0.5 * side));
        section.finish();
        return DensityModel::uniform_cube(d, side, std::move(center));
    }
    if (kind == "truncated-gaussian")
    {
        auto mean = section.numbers("mean", std::vector<double>(static_cast<std::size_t>(d), 0.0));
        auto sigma = section.numbers("sigma", std::vector<double>(static_cast<std::size_t>(d), 1.0));
        if (static_cast<int>(mean.size()) != d || static_cast<int>(sigma.size()) != d)
            section.fail("", "mean and sigma must have one entry per dimension");
        Box fallback;
        for (int i = 0; i < d; ++i)
        {
            fallback.lo.push_back(mean[i] - 4.0 * sigma[i]);
            fallback.hi.push_back(mean[i] + 4.0 * sigma[i]);
        }
        Box box = parse_box(section.child("box"), d, &fallback);
        section.finish();
        return DensityModel::truncated_gaussian(std::move(mean), std::move(sigma), std::move(box));
    }
    if (kind == "piecewise-constant")
    {
        Box box = parse_box(section.child("box"), d, nullptr);
        auto shape = section.integers("shape", std::vector<int>(static_cast<std::size_t>(d), 1));
        std::size_t cells = 1;
        for (int s : shape)
            cells *= static_cast<std::size_t>(std::max(s, 0));
        auto weights = section.numbers("weights", std::vector<double>(cells, 1.0));
        section.finish();
        return DensityModel::piecewise_constant(std::move(box), std::move(shape), std::move(weights));
    }
    section.fail("kind", "must be one of uniform-cube, truncated-gaussian, piecewise-constant");
}

RegionSpec parse_region(Section section, int dimension)
{
    const std::string kind = section.text("kind", "all-space");
    if (kind == "all-space")
    {
        section.finish();
        return RegionSpec::all_space();
    }
    if (kind == "box")
    {
        auto lo = section.numbers("lo", std::vector<double>(static_cast<std::size_t>(dimension), 0.0));
        auto hi = section.numbers("hi", std::vector<double>(static_cast<std::size_t>(dimension), 1.0));
        section.finish();
        if (static_cast<int>(lo.size()) != dimension || static_cast<int>(hi.size()) != dimension)
            section.fail("", "lo and hi must have one entry per dimension");
        return RegionSpec::box(std::move(lo), std::move(hi));
    }
    section.fail("kind", "must be all-space or box");
}

void check_increasing(Section& section, const std::string& key, const std::vector<double>& values, bool positive)
{
    if (values.empty())
        section.fail(key, "must be non-empty");
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (positive ? !(values[i] > 0.0) : !(values[i] >= 0.0))
            section.fail(key, positive ? "must contain positive values" : "must contain non-negative values");
        if (i > 0 && !(values[i] > values[i - 1]))
            section.fail(key, "must be strictly increasing");
    }
}

} // namespace

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void apply_override(json& document, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override '" + assignment + "' must have the form section.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try
    {
        value = json::parse(text);
    }
    catch (const json::parse_error&)
    {
        value = text;
    }
    if (!document.is_object())
        document = json::object();
    json* node = &document;
    std::size_t start = 0;
    for (;;)
    {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw ValidationError("override '" + assignment + "' has an empty path component");
        if (dot == std::string::npos)
        {
            (*node)[key] = value;
            return;
        }
        json& next = (*node)[key];
        if (next.is_null())
            next = json::object();
        if (!next.is_object())
            throw ValidationError("override '" + assignment + "': '" + key + "' is not a section");
        node = &next;
        start = dot + 1;
    }
}

RunConfig parse_run_config(const json& document, const std::string& command)
{
    if (!document.is_object())
        throw ValidationError("config: the document must be a JSON object");
    RunConfig cfg;
    cfg.effective = json::object();
    cfg.effective["command"] = command;
    Section root(&document, cfg.effective, "");
    root.text("command", command);
    if (document.contains("command") && document.at("command") != command)
        root.fail("command", "does not match the subcommand being run");

    cfg.model = parse_density(root.child("density"));
    const int d = cfg.model.dimension();

    {
        Section s = root.child("scaling");
        cfg.n = s.number("n", 1000.0);
        if (cfg.n < 0.0)
            s.fail("n", "must be >= 0");
        s.finish();
    }
    {
        Section s = root.child("grid");
        cfg.t_grid = s.numbers("t", {0.25, 0.5, 1.0});
        check_increasing(s, "t", cfg.t_grid, false);
        s.finish();
    }
    cfg.region = parse_region(root.child("region"), d);
    {
        Section s = root.child("campaign");
        cfg.n_values = s.numbers("n_values", {1000.0, 10000.0});
        check_increasing(s, "n_values", cfg.n_values, true);
        cfg.replications = to_int(s, "replications", s.integer("replications", 200), 2, 100'000'000);
        const std::string centering = s.text("centering", "empirical");
        if (centering == "empirical")
            cfg.centering = Centering::empirical;
        else if (centering == "limit")
            cfg.centering = Centering::limit;
        else
            s.fail("centering", "must be empirical or limit");
        cfg.projections = to_int(s, "projections", s.integer("projections", 5), 0, 1000);
        cfg.alpha = s.number("alpha", 0.01);
        cfg.z_threshold = s.number("z_threshold", 3.0);
        if (!(cfg.z_threshold > 0.0))
            s.fail("z_threshold", "must be > 0");
        cfg.normality_pass_fraction = s.number("normality_pass_fraction", 0.9);
        if (!(cfg.normality_pass_fraction >= 0.0 && cfg.normality_pass_fraction <= 1.0))
            s.fail("normality_pass_fraction", "must lie in [0, 1]");
        s.finish();
    }
    {
        Section s = root.child("compute");
        cfg.epsilon = s.number("epsilon", 1e-6);
        if (!(cfg.epsilon > 0.0))
            s.fail("epsilon", "must be > 0");
        cfg.mc_samples = s.unsigned_integer("mc_samples", 1'000'000);
        if (cfg.mc_samples == 0)
            s.fail("mc_samples", "must be > 0");
        cfg.jobs = to_int(s, "jobs", s.integer("jobs", 1), 1, 4096);
        if (const auto cap = s.optional_integer("dim_cap"))
            cfg.dim_cap = to_int(s, "dim_cap", *cap, 0, 1'000'000);
        cfg.clique_budget = s.unsigned_integer("clique_budget", 100'000'000);
        cfg.k_max_cap = to_int(s, "k_max_cap", s.integer("k_max_cap", 100), 0, 10'000);
        cfg.volume_policy = parse_volume_policy(s.text("volume_method", "auto"));
        cfg.grid_resolution = to_int(s, "grid_resolution", s.integer("grid_resolution", 256), 2, 1 << 20);
        s.finish();
    }
    {
        Section s = root.child("psi");
        const json* queries = s.raw("queries");
        json& effective = s.effective("queries");
        effective = json::array();
        if (queries)
        {
            if (!queries->is_array() || queries->empty())
                s.fail("queries", "must be a non-empty array of objects");
            cfg.psi_queries.clear();
            for (std::size_t i = 0; i < queries->size(); ++i)
            {
                effective.push_back(json::object());
                Section q(&queries->at(i), effective.back(), s.path() + "queries[" + std::to_string(i) + "].");
                PsiQuery query;
                query.j = to_int(q, "j", q.integer("j", 1), 1, 10'000);
                query.k1 = to_int(q, "k1", q.integer("k1", 0), 0, 10'000);
                query.k2 = to_int(q, "k2", q.integer("k2", 0), 0, 10'000);
                query.t = q.number("t", 0.5);
                query.s = q.number("s", query.t);
                q.finish();
                cfg.psi_queries.push_back(query);
            }
        }
        else
        {
            for (const auto& query : cfg.psi_queries)
                effective.push_back({{"j", query.j}, {"k1", query.k1}, {"k2", query.k2}, {"t", query.t}, {"s", query.s}});
        }
        s.finish();
    }
    {
        Section s = root.child("palm");
        cfg.palm_k = to_int(s, "k", s.integer("k", 1), 0, 64);
        cfg.palm_radius = s.number("radius", 0.05);
        if (cfg.palm_radius < 0.0)
            s.fail("radius", "must be >= 0");
        cfg.palm_overlaps = s.integers("overlaps", {0, 1});
        cfg.palm_max_pair_k = to_int(s, "max_pair_k", s.integer("max_pair_k", 2), 0, 16);
        s.finish();
    }
    {
        Section s = root.child("gp");
        cfg.gp_paths = to_int(s, "paths", s.integer("paths", 10), 1, 100'000'000);
        s.finish();
    }
    {
        Section s = root.child("input");
        cfg.input_cloud = s.optional_text("cloud");
        s.finish();
    }
    {
        Section s = root.child("seeds");
        cfg.seed = s.unsigned_integer("base", 1);
        s.finish();
    }
    {
        Section s = root.child("output");
        cfg.output_dir = s.text("dir", "");
        s.finish();
    }
    root.finish();
    return cfg;
}

CampaignConfig RunConfig::campaign() const
{
    CampaignConfig c;
    c.model = model;
    c.n_values = n_values;
    c.t_grid = t_grid;
    c.replications = replications;
    c.base_seed = seed;
    c.region = region;
    c.epsilon = epsilon;
    c.mc_samples = mc_samples;
    c.volume_policy = volume_policy;
    c.k_max_cap = k_max_cap;
    c.dim_cap = dim_cap;
    c.clique_budget = clique_budget;
    c.jobs = jobs;
    c.centering = centering;
    c.projections = projections;
    c.alpha = alpha;
    c.z_threshold = z_threshold;
    c.normality_pass_fraction = normality_pass_fraction;
    return c;
}

LimitOptions RunConfig::limit_options() const
{
    LimitOptions options;
    options.epsilon = epsilon;
    options.k_max_cap = k_max_cap;
    options.mc.samples = mc_samples;
    options.mc.seed = seed;
    options.mc.policy = volume_policy;
    options.mc.grid_resolution = grid_resolution;
    options.mc.jobs = jobs;
    return options;
}

PalmConfig RunConfig::palm() const
{
    PalmConfig p;
    p.model = model;
    p.n = n;
    p.k = palm_k;
    p.radius = palm_radius;
    p.replications = replications;
    p.seed = seed;
    p.mc_samples = mc_samples;
    p.overlaps = palm_overlaps;
    p.max_pair_k = palm_max_pair_k;
    p.clique_budget = clique_budget;
    p.jobs = jobs;
    p.z_threshold = z_threshold;
    return p;
}

} // namespace ecp::cli
