#include "sasfield/kernel_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sasfield/errors.hpp"
#include "sasfield/stable.hpp"

namespace sasfield {

KernelModel::KernelModel(double alpha, std::vector<Mark> marks, std::vector<HElement> support,
                         std::vector<KernelEntry> entries)
    : alpha_(alpha), marks_(std::move(marks)), support_(std::move(support))
{
    require_stable_index(alpha_);
    if (alpha_ >= max_alpha) {
        std::ostringstream msg;
        msg << "stable index " << alpha_ << " is at or above " << max_alpha << "; the series converges too slowly";
        throw DomainError(msg.str());
    }
    if (marks_.empty()) throw std::invalid_argument("KernelModel: no marks");
    std::set<std::string> ids;
    for (const auto& m : marks_) {
        if (!(m.weight > 0.0) || !std::isfinite(m.weight))
            throw std::invalid_argument("KernelModel: mark weight must be positive and finite");
        if (!ids.insert(m.id).second) throw std::invalid_argument("KernelModel: duplicate mark id " + m.id);
    }
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    for (auto& e : entries) {
        if (e.mark >= marks_.size()) throw std::invalid_argument("KernelModel: entry refers to an unknown mark");
        if (!std::isfinite(e.value)) throw std::invalid_argument("KernelModel: non-finite kernel value");
        if (!std::binary_search(support_.begin(), support_.end(), e.u))
            throw std::invalid_argument("KernelModel: entry outside the declared support");
        if (e.value == 0.0) continue;
        if (!lookup_.emplace(std::make_pair(e.mark, e.u), e.value).second)
            throw std::invalid_argument("KernelModel: duplicate kernel entry");
        entries_.push_back(std::move(e));
    }
}

double KernelModel::total_weight() const
{
    double s = 0;
    for (const auto& m : marks_) s += m.weight;
    return s;
}

double KernelModel::max_abs_value() const
{
    double m = 0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

double KernelModel::alpha_norm() const
{
    double s = 0;
    for (const auto& e : entries_) s += marks_[e.mark].weight * std::pow(std::abs(e.value), alpha_);
    return s;
}

double KernelModel::h(std::size_t mark, const HElement& u) const
{
    const auto it = lookup_.find({mark, u});
    return it == lookup_.end() ? 0.0 : it->second;
}

std::int64_t KernelModel::support_radius(const QuotientStructure& qs) const
{
    std::int64_t m = 0;
    for (const auto& u : support_) m = std::max(m, norm_N(u, qs));
    return m;
}

KernelModel KernelModel::scaled(double factor) const
{
    std::vector<KernelEntry> entries = entries_;
    for (auto& e : entries) e.value *= factor;
    return KernelModel(alpha_, marks_, support_, std::move(entries));
}

namespace {

IntVec read_vector(const nlohmann::json& v, std::size_t d, const char* what)
{
    if (!v.is_array() || v.size() != d)
        throw ConfigError(std::string("kernelModel: ") + what + " must be an integer array of length " + std::to_string(d));
    IntVec out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) throw ConfigError(std::string("kernelModel: ") + what + " entries must be integers");
        out.push_back(x.get<std::int64_t>());
    }
    return out;
}

const nlohmann::json& require(const nlohmann::json& doc, const char* key)
{
    if (!doc.is_object() || !doc.contains(key)) throw ConfigError(std::string("kernelModel: missing field '") + key + "'");
    return doc.at(key);
}

}  // namespace

KernelModel kernel_model_from_json(const nlohmann::json& doc, const QuotientStructure& qs)
{
    const std::size_t d = qs.dimension();
    const auto& alpha = require(doc, "alpha");
    if (!alpha.is_number()) throw ConfigError("kernelModel: alpha must be a number");
    if (doc.contains("cocycleTrivial") && doc.at("cocycleTrivial") != true)
        throw ConfigError("kernelModel: only trivial cocycles are supported (cocycleTrivial must be true)");

    std::vector<Mark> marks;
    std::map<std::string, std::size_t> mark_index;
    const auto& jm = require(doc, "marks");
    if (!jm.is_array() || jm.empty()) throw ConfigError("kernelModel: marks must be a non-empty array");
    for (const auto& m : jm) {
        if (!m.is_object() || !m.contains("id") || !m.contains("weight") || !m.at("weight").is_number())
            throw ConfigError("kernelModel: each mark needs an id and a numeric weight");
        const std::string id = m.at("id").is_string() ? m.at("id").get<std::string>() : m.at("id").dump();
        mark_index[id] = marks.size();
        marks.push_back({id, m.at("weight").get<double>()});
    }

    std::vector<HElement> support;
    const auto& js = require(doc, "support");
    if (!js.is_array()) throw ConfigError("kernelModel: support must be an array");
    for (const auto& v : js) support.push_back(qs.canonical(read_vector(v, d, "support vector")));

    std::vector<KernelEntry> entries;
    const auto& jh = require(doc, "h");
    if (!jh.is_array()) throw ConfigError("kernelModel: h must be an array");
    for (const auto& e : jh) {
        if (!e.is_object() || !e.contains("w") || !e.contains("u") || !e.contains("value") || !e.at("value").is_number())
            throw ConfigError("kernelModel: each h entry needs w, u and a numeric value");
        const std::string id = e.at("w").is_string() ? e.at("w").get<std::string>() : e.at("w").dump();
        const auto it = mark_index.find(id);
        if (it == mark_index.end()) throw ConfigError("kernelModel: h entry refers to unknown mark '" + id + "'");
        entries.push_back({it->second, qs.canonical(read_vector(e.at("u"), d, "h entry u")), e.at("value").get<double>()});
    }
    try {
        return KernelModel(alpha.get<double>(), std::move(marks), std::move(support), std::move(entries));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
}

nlohmann::json to_json(const KernelModel& model)
{
    nlohmann::json doc;
    doc["alpha"] = model.alpha();
    doc["cocycleTrivial"] = true;
    doc["marks"] = nlohmann::json::array();
    for (const auto& m : model.marks()) doc["marks"].push_back({{"id", m.id}, {"weight", m.weight}});
    doc["support"] = nlohmann::json::array();
    for (const auto& u : model.support()) doc["support"].push_back(u.vec());
    doc["h"] = nlohmann::json::array();
    for (const auto& e : model.entries())
        doc["h"].push_back({{"w", model.marks()[e.mark].id}, {"u", e.u.vec()}, {"value", e.value}});
    return doc;
}

KernelModel single_atom_model(double alpha, double weight, const QuotientStructure& qs)
{
    return KernelModel(alpha, {{"0", weight}}, {qs.identity()}, {{0, qs.identity(), 1.0}});
}

KernelModel shift_model(double alpha, const std::function<double(double)>& f, double length, std::size_t cells,
                        const QuotientStructure& qs)
{
    if (qs.effective_dimension() != 1 || qs.torsion_order() != 1)
        throw DomainError("shift_model: needs a quotient isomorphic to Z (p = 1, l = 1)");
    if (cells == 0 || !(length > 0.0)) throw std::invalid_argument("shift_model: need cells >= 1 and length > 0");
    const auto steps = static_cast<std::int64_t>(std::ceil(length));
    std::vector<Mark> marks;
    std::vector<HElement> support;
    std::vector<KernelEntry> entries;
    for (std::int64_t s = 0; s < steps; ++s) {
        const std::int64_t alpha_coord[] = {s};
        support.push_back(qs.element(0, alpha_coord));
    }
    for (std::size_t c = 0; c < cells; ++c) {
        const double w = (static_cast<double>(c) + 0.5) / static_cast<double>(cells);
        std::ostringstream id;
        id << w;
        marks.push_back({id.str(), 1.0 / static_cast<double>(cells)});
        for (std::int64_t s = 0; s < steps; ++s)
            entries.push_back({c, support[static_cast<std::size_t>(s)], f(w + static_cast<double>(s))});
    }
    return KernelModel(alpha, std::move(marks), std::move(support), std::move(entries));
}

}  // namespace sasfield
