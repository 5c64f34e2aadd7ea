#include "triquad/rule.hpp"

#include <algorithm>
#include <cmath>

namespace triquad {

int CandidateRule::point_count() const {
    int n = 0;
    for (const auto& o : orbits) n += kind(o).point_count();
    return n;
}

std::vector<ArealPoint> CandidateRule::points() const {
    std::vector<ArealPoint> out;
    for (const auto& o : orbits) {
        const auto pts = expand_orbit(kind(o), o.params);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

std::vector<double> CandidateRule::weights() const {
    std::vector<double> out;
    for (const auto& o : orbits) out.insert(out.end(), kind(o).point_count(), o.weight);
    return out;
}

std::vector<int> CandidateRule::orbit_counts() const {
    std::vector<int> counts(orbit_type_count(mode), 0);
    for (const auto& o : orbits) ++counts.at(o.type);
    return counts;
}

CandidateRule CandidateRule::canonicalized() const {
    CandidateRule out = *this;
    for (auto& o : out.orbits) o.params = canonical_parameters(kind(o), o.params);
    std::stable_sort(out.orbits.begin(), out.orbits.end(), [](const Orbit& a, const Orbit& b) {
        if (a.type != b.type) return a.type < b.type;
        if (a.params != b.params) return a.params < b.params;
        return a.weight < b.weight;
    });
    return out;
}

bool same_rule(const CandidateRule& a, const CandidateRule& b, double tol) {
    if (a.mode != b.mode || a.orbits.size() != b.orbits.size()) return false;
    for (std::size_t k = 0; k < a.orbits.size(); ++k) {
        const Orbit& x = a.orbits[k];
        const Orbit& y = b.orbits[k];
        if (x.type != y.type || x.params.size() != y.params.size()) return false;
        if (std::abs(x.weight - y.weight) > tol) return false;
        for (std::size_t p = 0; p < x.params.size(); ++p) {
            if (std::abs(x.params[p] - y.params[p]) > tol) return false;
        }
    }
    return true;
}

std::string_view to_string(QualityFlag q) {
    switch (q) {
        case QualityFlag::PI: return "PI";
        case QualityFlag::NI: return "NI";
        case QualityFlag::PO: return "PO";
        case QualityFlag::NO: return "NO";
    }
    return "?";
}

std::optional<QualityFlag> parse_quality(std::string_view s) {
    for (QualityFlag q : {QualityFlag::PI, QualityFlag::NI, QualityFlag::PO, QualityFlag::NO}) {
        if (to_string(q) == s) return q;
    }
    return std::nullopt;
}

QualityFlag classify_quality(const CandidateRule& rule) {
    const bool positive = std::all_of(rule.orbits.begin(), rule.orbits.end(),
                                      [](const Orbit& o) { return o.weight > 0.0; });
    bool inside = true;
    for (const auto& p : rule.points()) inside = inside && p.min_coordinate() >= -kInsideTolerance;
    if (positive) return inside ? QualityFlag::PI : QualityFlag::PO;
    return inside ? QualityFlag::NI : QualityFlag::NO;
}

}  // namespace triquad
