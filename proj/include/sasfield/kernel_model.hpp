// Finite mixed-moving-average kernels h(w, u) on W x H.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sasfield/lattice.hpp"

namespace sasfield {

struct Mark {
    std::string id;
    double weight = 0.0;  ///< nu({w}) > 0
};

struct KernelEntry {
    std::size_t mark = 0;
    HElement u;
    double value = 0.0;
};

/// alpha together with a finite mark space and a kernel table. Entries with
/// value zero are dropped; every entry's u is canonical and in the support.
class KernelModel {
public:
    /// Throws DomainError for alpha outside (0, 1.95); std::invalid_argument
    /// for nonpositive weights, unknown marks, non-finite values or entries
    /// outside the support.
    KernelModel(double alpha, std::vector<Mark> marks, std::vector<HElement> support, std::vector<KernelEntry> entries);

    /// Largest accepted stable index; the series converges too slowly above it.
    static constexpr double max_alpha = 1.95;

    double alpha() const { return alpha_; }
    const std::vector<Mark>& marks() const { return marks_; }
    const std::vector<HElement>& support() const { return support_; }
    const std::vector<KernelEntry>& entries() const { return entries_; }

    /// nu(W)
    double total_weight() const;
    double max_abs_value() const;
    /// sum over w, u of nu(w) |h(w, u)|^alpha
    double alpha_norm() const;
    /// h(w, u) for canonical u; zero off the table.
    double h(std::size_t mark, const HElement& u) const;
    /// M = max N(u) over the support.
    std::int64_t support_radius(const QuotientStructure& qs) const;

    /// Same marks and support with every value multiplied by `factor`.
    KernelModel scaled(double factor) const;

private:
    double alpha_;
    std::vector<Mark> marks_;
    std::vector<HElement> support_;
    std::vector<KernelEntry> entries_;
    std::map<std::pair<std::size_t, HElement>, double> lookup_;
};

/// {alpha, marks:[{id, weight}], support:[[ints]], h:[{w, u, value}]}; the
/// optional "cocycleTrivial" must be true when present. Vectors are reduced
/// to canonical form. Throws ConfigError on schema violations.
KernelModel kernel_model_from_json(const nlohmann::json& doc, const QuotientStructure& qs);
nlohmann::json to_json(const KernelModel& model);

/// One mark of weight `weight`, support {0}, h = 1: the field is i.i.d. SaS
/// across cosets of K.
KernelModel single_atom_model(double alpha, double weight, const QuotientStructure& qs);

/// For a structure with Z^d / K = Z (p = 1, l = 1) and generator u_1: the
/// shift field X_t = integral of f(x + s(t)) M(dx) over the real line, where
/// t = s(t) u_1 modulo K and f vanishes outside [0, length]. The control
/// measure on [0, 1) is split into `cells` marks of weight 1/cells at the cell
/// midpoints, so h(w, s u_1) = f(w + s).
KernelModel shift_model(double alpha, const std::function<double(double)>& f, double length, std::size_t cells,
                        const QuotientStructure& qs);

}  // namespace sasfield
