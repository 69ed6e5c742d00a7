#include "sasfield/config.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sasfield/errors.hpp"

namespace sasfield {

namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key)
{
    if (!doc.contains(key)) throw ConfigError(std::string("config: missing required field '") + key + "'");
    return doc.at(key);
}

std::int64_t integer(const json& v, const std::string& what)
{
    if (!v.is_number_integer()) throw ConfigError("config: " + what + " must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw ConfigError("config: " + what + " is out of range");
    return v.get<std::int64_t>();
}

double positive_number(const json& v, const std::string& what)
{
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("config: " + what + " must be a positive number");
    return v.get<double>();
}

GroupSpec parse_group(const json& g)
{
    if (!g.is_object()) throw ConfigError("config: groupSpec must be an object");
    const std::int64_t d = integer(field(g, "d"), "groupSpec.d");
    if (d < 1 || d > 16) throw ConfigError("config: groupSpec.d must lie in [1, 16]");
    std::vector<IntVec> gens;
    if (g.contains("kernelGens")) {
        const json& k = g.at("kernelGens");
        if (!k.is_array()) throw ConfigError("config: groupSpec.kernelGens must be an array of integer vectors");
        for (const auto& v : k) {
            if (!v.is_array() || v.size() != static_cast<std::size_t>(d))
                throw ConfigError("config: every kernel generator must be an integer array of length d");
            IntVec col;
            for (const auto& x : v) col.push_back(integer(x, "kernel generator entry"));
            gens.push_back(std::move(col));
        }
    }
    try {
        return GroupSpec::from_generators(static_cast<std::size_t>(d), gens);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

TestFunction parse_test_function(const json& g)
{
    TestFunction t;
    if (g.is_array()) {
        if (g.size() != 3) throw ConfigError("config: gSuite arrays must be [a, width, beta]");
        t = {positive_number(g[0], "gSuite a"), positive_number(g[1], "gSuite width"), positive_number(g[2], "gSuite beta")};
    } else if (g.is_object()) {
        t = {positive_number(field(g, "a"), "gSuite a"), positive_number(field(g, "width"), "gSuite width"),
             positive_number(field(g, "beta"), "gSuite beta")};
    } else {
        throw ConfigError("config: gSuite entries must be objects or [a, width, beta] arrays");
    }
    return t;
}

}  // namespace

ExperimentConfig parse_config(const json& doc)
{
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    c.document = doc;
    c.group = parse_group(field(doc, "groupSpec"));

    const json& seed = field(doc, "masterSeed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
        throw ConfigError("config: masterSeed must be a non-negative integer");
    c.master_seed = seed.get<std::uint64_t>();

    if (doc.contains("kernelModel")) {
        if (!doc.at("kernelModel").is_object()) throw ConfigError("config: kernelModel must be an object");
        c.kernel_model = doc.at("kernelModel");
    }
    if (doc.contains("nList")) {
        const json& n = doc.at("nList");
        if (!n.is_array()) throw ConfigError("config: nList must be an array");
        for (const auto& v : n) {
            const std::int64_t r = integer(v, "nList entry");
            if (r < 1) throw ConfigError("config: nList entries must be positive");
            if (!c.radii.empty() && r <= c.radii.back()) throw ConfigError("config: nList must be strictly increasing");
            c.radii.push_back(r);
        }
    }
    if (doc.contains("replicates")) {
        const std::int64_t r = integer(doc.at("replicates"), "replicates");
        if (r < 0) throw ConfigError("config: replicates must be non-negative");
        c.replicates = static_cast<std::size_t>(r);
    }
    if (doc.contains("truncationIndex")) {
        const std::int64_t t = integer(doc.at("truncationIndex"), "truncationIndex");
        if (t < 1) throw ConfigError("config: truncationIndex must be positive");
        c.truncation_index = static_cast<std::size_t>(t);
    }
    if (doc.contains("gSuite")) {
        const json& g = doc.at("gSuite");
        if (!g.is_array()) throw ConfigError("config: gSuite must be an array");
        for (const auto& e : g) c.g_suite.push_back(parse_test_function(e));
    }
    if (doc.contains("outputDir")) {
        if (!doc.at("outputDir").is_string()) throw ConfigError("config: outputDir must be a string");
        c.output_dir = doc.at("outputDir").get<std::string>();
    }
    if (doc.contains("diagnostics")) {
        const json& d = doc.at("diagnostics");
        if (!d.is_object()) throw ConfigError("config: diagnostics must be an object");
        if (d.contains("delta")) c.diagnostics.delta = positive_number(d.at("delta"), "diagnostics.delta");
        if (d.contains("epsilon")) c.diagnostics.epsilon = positive_number(d.at("epsilon"), "diagnostics.epsilon");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

std::string config_hash(const json& doc)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : doc.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sasfield
