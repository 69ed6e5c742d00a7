#include "sasfield/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sasfield/config.hpp"
#include "sasfield/errors.hpp"
#include "sasfield/field.hpp"
#include "sasfield/geometry.hpp"
#include "sasfield/kernel_model.hpp"
#include "sasfield/lattice.hpp"
#include "sasfield/point_process.hpp"

namespace sasfield {

namespace {

using nlohmann::json;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    bool json_output = false;
};

void add_common(CLI::App& cmd, CommonOptions& opt, bool needs_config)
{
    auto* config = cmd.add_option("--config", opt.config_path, "Experiment configuration (JSON)");
    if (needs_config) config->required();
    cmd.add_option("--out", opt.out_dir, "Output directory (overrides outputDir)");
    cmd.add_option("--seed", opt.seed, "Master seed (overrides masterSeed)");
    cmd.add_option("--workers", opt.workers, "Worker threads; 0 uses every hardware thread")->capture_default_str();
    cmd.add_flag("--json", opt.json_output, "Machine-readable output on standard output");
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

json integer_json(const Integer& v)
{
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

json rational_json(const Rational& r) { return {{"value", r.get_d()}, {"exact", r.get_str()}}; }

json columns_json(const IntMatrix& m)
{
    json cols = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
        json col = json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) col.push_back(integer_json(m(i, j)));
        cols.push_back(col);
    }
    return cols;
}

json quotient_json(const QuotientStructure& qs)
{
    json factors = json::array();
    for (const auto& f : qs.invariant_factors()) factors.push_back(integer_json(f));
    return {{"d", qs.dimension()},
            {"p", qs.effective_dimension()},
            {"q", qs.kernel_rank()},
            {"l", qs.torsion_order()},
            {"invariantFactors", factors},
            {"freeBasis", columns_json(qs.free_basis())},
            {"kernelBasis", columns_json(qs.kernel_basis())},
            {"cosetReps", qs.coset_reps()}};
}

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"stdError", e.std_error}, {"exact", e.exact}}; }

json geometry_json(const Geometry& g)
{
    json body = json::array();
    for (const auto& row : g.body().rows()) {
        json normal = json::array();
        for (const auto& x : row.normal) normal.push_back(x.get_str());
        body.push_back({{"normal", normal}, {"bound", row.bound.get_str()}});
    }
    json out = {{"exact", g.exact()},
                {"bodyInequalities", body},
                {"boundingBox", {{"lower", g.box_lower()}, {"upper", g.box_upper()}}},
                {"volume", estimate_json(g.volume())},
                {"integralOfFiberVolume", estimate_json(g.integral_of_fiber_volume())},
                {"torsionTimesIntegral", static_cast<double>(g.torsion_order()) * g.integral_of_fiber_volume().value},
                {"supFiberVolume", g.sup_fiber_volume()}};
    out["scalingConstant"] = g.effective_dimension() > 0 ? json(g.scaling_constant()) : json(nullptr);
    if (g.effective_dimension() == 1) out["halfWidth"] = rational_json(g.half_width());
    if (g.effective_dimension() == 2) {
        json poly = json::array();
        for (const auto& v : g.polygon()) poly.push_back({v[0].get_str(), v[1].get_str()});
        out["polygon"] = poly;
    }
    return out;
}

struct Session {
    ExperimentConfig config;
    std::filesystem::path out_dir;
    std::string hash;
    std::size_t workers = 0;

    json provenance() const
    {
        return {{"configHash", hash}, {"masterSeed", config.master_seed}, {"config", config.document}};
    }
};

Session open_session(const CommonOptions& opt)
{
    Session s;
    s.config = load_config(opt.config_path);
    if (opt.seed) s.config.master_seed = *opt.seed;
    s.out_dir = opt.out_dir.empty() ? std::filesystem::path(s.config.output_dir) : std::filesystem::path(opt.out_dir);
    s.hash = config_hash(s.config.document);
    s.workers = opt.workers;
    std::filesystem::create_directories(s.out_dir);
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

KernelModel require_kernel(const Session& s, const QuotientStructure& qs)
{
    if (!s.config.kernel_model) throw ConfigError("config: kernelModel is required for this command");
    return kernel_model_from_json(*s.config.kernel_model, qs);
}

void require_radii(const Session& s)
{
    if (s.config.radii.empty()) throw ConfigError("config: nList is required and must not be empty");
}

std::size_t require_replicates(const Session& s, std::size_t minimum)
{
    if (!s.config.replicates) throw ConfigError("config: replicates is required for this command");
    if (*s.config.replicates < minimum)
        throw ConfigError("config: replicates must be at least " + std::to_string(minimum));
    return *s.config.replicates;
}

int cmd_analyze(const CommonOptions& opt, std::ostream& out)
{
    const Session s = open_session(opt);
    const QuotientStructure qs = analyze_quotient(s.config.group);
    const Geometry geometry = Geometry::build(qs);
    json report = s.provenance();
    report["quotient"] = quotient_json(qs);
    report["geometry"] = geometry_json(geometry);
    write_file(s.out_dir / "analysis.json", report.dump(2) + "\n");
    if (opt.json_output) {
        out << report.dump(2) << "\n";
    } else {
        out << "p=" << qs.effective_dimension() << " q=" << qs.kernel_rank() << " l=" << qs.torsion_order()
            << " |C|=" << format_double(geometry.volume().value);
        if (qs.effective_dimension() > 0) out << " c=" << format_double(geometry.scaling_constant());
        out << "\nwrote " << (s.out_dir / "analysis.json").string() << "\n";
    }
    return exit_pass;
}

int cmd_simulate(const CommonOptions& opt, std::ostream& out)
{
    const Session s = open_session(opt);
    const QuotientStructure qs = analyze_quotient(s.config.group);
    const KernelModel model = require_kernel(s, qs);
    require_radii(s);
    MaximaOptions mo;
    mo.radii = s.config.radii;
    mo.replicates = require_replicates(s, 1);
    mo.master_seed = s.config.master_seed;
    mo.workers = s.workers;
    mo.truncation.initial_index = s.config.truncation_index;
    const MaximaReport report = run_maxima_experiment(model, qs, mo);

    std::ostringstream csv;
    csv << "replicate,n,maximum,seed\n";
    for (const auto& r : report.records)
        csv << r.replicate << ',' << r.n << ',' << format_double(r.maximum) << ',' << r.seed << '\n';
    write_file(s.out_dir / "maxima.csv", csv.str());

    const double p = static_cast<double>(qs.effective_dimension());
    json levels = json::array();
    for (const auto& l : report.levels)
        levels.push_back({{"n", l.n},
                          {"median", l.median},
                          {"medianOverFreeRate", l.median_over_free_rate},
                          {"medianOverNominalRate", l.median_over_nominal_rate},
                          {"frechetScale", l.frechet_scale},
                          {"ksDistance", l.ks_distance},
                          {"ksPValue", l.ks_p_value},
                          {"truncationWarnings", l.truncation_warnings},
                          {"nonfiniteResamples", l.nonfinite_resamples}});
    json summary = s.provenance();
    summary["alpha"] = model.alpha();
    summary["p"] = qs.effective_dimension();
    summary["d"] = qs.dimension();
    summary["levels"] = levels;
    summary["logLogSlope"] = report.log_log_slope;
    summary["freeRateSlope"] = p / model.alpha();
    summary["slopeWithin0.2OfFreeRate"] = std::abs(report.log_log_slope - p / model.alpha()) <= 0.2;
    write_file(s.out_dir / "maxima_summary.json", summary.dump(2) + "\n");
    if (opt.json_output) {
        out << summary.dump(2) << "\n";
    } else {
        for (const auto& l : report.levels)
            out << "n=" << l.n << " median=" << format_double(l.median)
                << " median/n^(p/alpha)=" << format_double(l.median_over_free_rate) << "\n";
        out << "log-log slope " << format_double(report.log_log_slope) << " (p/alpha = " << format_double(p / model.alpha())
            << ")\n";
    }
    return exit_pass;
}

int cmd_converge(const CommonOptions& opt, bool diagnostics, std::ostream& out)
{
    const Session s = open_session(opt);
    const QuotientStructure qs = analyze_quotient(s.config.group);
    const KernelModel model = require_kernel(s, qs);
    require_radii(s);
    if (s.config.g_suite.empty()) throw ConfigError("config: gSuite must contain at least one test function");
    const Geometry geometry = Geometry::build(qs);
    ConvergenceOptions co;
    co.radii = s.config.radii;
    co.replicates = require_replicates(s, 100);
    co.master_seed = s.config.master_seed;
    co.workers = s.workers;
    co.truncation.initial_index = s.config.truncation_index;
    const ConvergenceReport report = convergence_report(model, qs, geometry, s.config.g_suite, co);

    std::ostringstream csv;
    csv << "n,gId,empirical,SE,theoretical,pass\n";
    const auto row_csv = [&](const std::string& n, const ConvergenceRow& r) {
        csv << n << ',' << r.g_id << ',' << format_double(r.empirical) << ',' << format_double(r.std_error) << ','
            << format_double(r.theoretical) << ',' << (r.pass ? "true" : "false") << '\n';
    };
    for (const auto& r : report.rows) row_csv(std::to_string(r.n), r);
    for (const auto& r : report.limit_rows) row_csv("limit", r);
    write_file(s.out_dir / "laplace.csv", csv.str());

    json summary = s.provenance();
    json theory = json::array();
    for (std::size_t g = 0; g < report.theory.size(); ++g)
        theory.push_back({{"gId", g},
                          {"a", s.config.g_suite[g].a},
                          {"width", s.config.g_suite[g].width},
                          {"beta", s.config.g_suite[g].beta},
                          {"value", report.theory[g].value},
                          {"errorEstimate", report.theory[g].error_estimate}});
    json trends = json::array();
    for (const auto& t : report.trends)
        trends.push_back({{"gId", t.g_id}, {"tau", t.tau}, {"pValue", t.p_value}, {"decreasing", t.decreasing}});
    summary["theoretical"] = theory;
    summary["trends"] = trends;
    summary["truncationWarnings"] = report.truncation_warnings;
    summary["pass"] = report.pass;
    bool ok = report.pass;

    if (diagnostics) {
        const ScalingDiagnostics diag = scaling_diagnostics(model, qs, geometry, s.config.diagnostics, co);
        std::ostringstream sc;
        sc << "n,unnormalizedMass,unnormalizedSE,overScaledMass,underScaledMass\n";
        for (const auto& l : diag.levels)
            sc << l.n << ',' << format_double(l.unnormalized_mass) << ',' << format_double(l.unnormalized_se) << ','
               << format_double(l.over_scaled_mass) << ',' << format_double(l.under_scaled_mass) << '\n';
        write_file(s.out_dir / "scaling.csv", sc.str());
        json ratios = json::array();
        for (const auto& r : diag.ratios) ratios.push_back({{"n", r.n}, {"ratio", r.ratio}, {"pass", r.pass}});
        summary["diagnostics"] = {{"delta", s.config.diagnostics.delta},
                                  {"epsilon", s.config.diagnostics.epsilon},
                                  {"doublingRatios", ratios},
                                  {"overScalingDecreasing", diag.over_scaling_decreasing},
                                  {"underScalingIncreasing", diag.under_scaling_increasing},
                                  {"pass", diag.pass}};
        ok = ok && diag.pass;
    }
    write_file(s.out_dir / "convergence_summary.json", summary.dump(2) + "\n");
    if (opt.json_output) {
        out << summary.dump(2) << "\n";
    } else {
        for (const auto& r : report.rows)
            out << "n=" << r.n << " g" << r.g_id << " empirical=" << format_double(r.empirical) << " +- "
                << format_double(r.std_error) << " theoretical=" << format_double(r.theoretical)
                << (r.pass ? " ok" : " MISMATCH") << "\n";
        for (const auto& r : report.limit_rows)
            out << "limit g" << r.g_id << " empirical=" << format_double(r.empirical) << " +- "
                << format_double(r.std_error) << (r.pass ? " ok" : " MISMATCH") << "\n";
        out << (ok ? "PASS" : "FAIL") << "\n";
    }
    return ok ? exit_pass : exit_assertion_failure;
}

struct Assertion {
    std::string name;
    double value;
    double expected;
};

int cmd_golden(const CommonOptions& opt, std::ostream& out)
{
    double tolerance = 1e-9;
    if (const char* env = std::getenv("SASFIELD_GOLDEN_TOL")) {
        const std::string text(env);
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), tolerance);
        if (ec != std::errc{} || end != text.data() + text.size())
            throw ConfigError("SASFIELD_GOLDEN_TOL is not a number: '" + text + "'");
    }
    const QuotientStructure qs = analyze_quotient(GroupSpec::from_generators(2, {{1, 1}}));
    const Geometry geometry = Geometry::build(qs);
    const auto fiber = [&](double y) { return geometry.fiber_volume(std::vector<double>{y}).value; };
    const auto& u = qs.free_basis();
    const auto& v = qs.kernel_basis();
    std::vector<Assertion> checks = {
        {"effective dimension p", static_cast<double>(qs.effective_dimension()), 1.0},
        {"kernel rank q", static_cast<double>(qs.kernel_rank()), 1.0},
        {"torsion order l", static_cast<double>(qs.torsion_order()), 1.0},
        {"free basis U = (1, 0)", u(0, 0) == 1 && u(1, 0) == 0 ? 1.0 : 0.0, 1.0},
        {"kernel basis V = +-(1, 1)", abs(v(0, 0)) == 1 && v(0, 0) == v(1, 0) ? 1.0 : 0.0, 1.0},
        {"C lower end", -geometry.half_width().get_d(), -2.0},
        {"C upper end", geometry.half_width().get_d(), 2.0},
        {"|C|", geometry.volume().value, 4.0},
        {"V(0)", fiber(0.0), 2.0},
        {"V(0.5)", fiber(0.5), 1.5},
        {"V(-1.25)", fiber(-1.25), 0.75},
        {"V(2)", fiber(2.0), 0.0},
        {"V(-2)", fiber(-2.0), 0.0},
        {"c", geometry.scaling_constant(), 4.0},
        {"l * integral of V", static_cast<double>(qs.torsion_order()) * geometry.integral_of_fiber_volume().value, 4.0},
        {"|H_1|", static_cast<double>(enumerate_Hn(1, qs).size()), 5.0},
        {"m((3, 0), 10)", static_cast<double>(count_m(qs.canonical({3, 0}), 10, qs)), 18.0},
    };

    // End to end: a short field run on the same structure depends on t1 - t2 only.
    const KernelModel model = shift_model(1.5, [](double x) { return x < 1.0 ? 1.0 : 0.0; }, 1.0, 1, qs);
    const auto layout = std::make_shared<const FieldLayout>(model, qs, 4);
    RandomStream rng(opt.seed.value_or(0), {0x474F4C44});
    const FieldSample field = sample_field(model, layout, TruncationPolicy{}, rng);
    double worst = 0.0;
    for (std::int64_t t1 = -4; t1 <= 4; ++t1)
        for (std::int64_t t2 = -4; t2 <= 4; ++t2) {
            const double a = field.values[layout->site_index(qs.canonical({t1, t2}))];
            const double b = field.values[layout->site_index(qs.canonical({t1 - t2, 0}))];
            worst = std::max(worst, std::abs(a - b));
        }
    checks.push_back({"field depends on t1 - t2 only", worst, 0.0});

    bool all = true;
    json rows = json::array();
    for (const auto& c : checks) {
        const bool pass = std::abs(c.value - c.expected) <= tolerance;
        all = all && pass;
        rows.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"pass", pass}});
        if (!opt.json_output)
            out << (pass ? "PASS " : "FAIL ") << c.name << ": " << format_double(c.value) << " (expected "
                << format_double(c.expected) << ")\n";
    }
    if (opt.json_output)
        out << json{{"tolerance", tolerance}, {"assertions", rows}, {"pass", all}}.dump(2) << "\n";
    return all ? exit_pass : exit_assertion_failure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stable random fields over Z^d with a kernel lattice: quotient geometry, simulation and "
                 "point-process diagnostics",
                 "sasfield"};
    app.require_subcommand(1);
    CommonOptions analyze_opt, simulate_opt, converge_opt, golden_opt;
    bool diagnostics = false;
    auto* analyze = app.add_subcommand("analyze", "Quotient structure and polytope geometry report");
    add_common(*analyze, analyze_opt, true);
    auto* simulate = app.add_subcommand("simulate", "Partial maxima experiment");
    add_common(*simulate, simulate_opt, true);
    auto* converge = app.add_subcommand("converge", "Laplace functional convergence report");
    add_common(*converge, converge_opt, true);
    converge->add_flag("--diagnostics", diagnostics, "Also run the non-tightness and wrong-scaling diagnostics");
    auto* golden = app.add_subcommand("golden", "Built-in diagonal-kernel example with fixed expected values");
    add_common(*golden, golden_opt, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_config_error;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_opt, out);
        if (simulate->parsed()) return cmd_simulate(simulate_opt, out);
        if (converge->parsed()) return cmd_converge(converge_opt, diagnostics, out);
        return cmd_golden(golden_opt, out);
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return exit_domain_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_assertion_failure;
    }
}

}  // namespace sasfield
