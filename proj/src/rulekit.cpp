#include "triquad/rulekit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "triquad/solver.hpp"

namespace triquad {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::string header(const CandidateRule& rule, const VerificationReport& report) {
    std::ostringstream os;
    os << "mode " << to_string(rule.mode) << '\n'
       << "degree " << rule.degree << '\n'
       << "npoints " << rule.point_count() << '\n'
       << "quality " << to_string(report.quality) << '\n';
    return os.str();
}

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
        if (end > pos) out.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

double parse_double(std::string_view s, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw RuleFormatError(line, "bad number '" + std::string(s) + "'");
    }
    return v;
}

int parse_int(std::string_view s, int line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw RuleFormatError(line, "bad integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

double VerificationReport::max_residual_through(int omega) const {
    double m = 0.0;
    for (int w = 0; w <= omega && w < static_cast<int>(residuals.size()); ++w) m = std::max(m, residuals[w]);
    return m;
}

VerificationReport verify(const CandidateRule& rule, double tolerance) {
    if (rule.orbits.empty()) throw std::invalid_argument("verify: rule has no points");
    VerificationReport report;
    report.stated_degree = rule.degree;
    const int top = rule.degree + 1;

    const auto points = rule.points();
    const auto weights = rule.weights();

    // powers[p][c][e] = coordinate c of point p to the e-th power
    std::vector<std::array<std::vector<double>, 3>> powers(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int c = 0; c < 3; ++c) {
            auto& v = powers[p][c];
            v.resize(top + 1);
            v[0] = 1.0;
            for (int e = 1; e <= top; ++e) v[e] = v[e - 1] * points[p][c];
        }
    }

    report.residuals.assign(top + 1, 0.0);
    for (int omega = 0; omega <= top; ++omega) {
        for (const ArealMonomial& m : monomials_of_degree(omega)) {
            CompensatedSum sum;
            for (std::size_t p = 0; p < points.size(); ++p) {
                sum.add(weights[p] * powers[p][0][m.a] * powers[p][1][m.b] * powers[p][2][m.c]);
            }
            const double r = std::abs(sum.value() - to_double(exact_moment(m)));
            report.residuals[omega] = std::max(report.residuals[omega], r);
        }
    }
    report.attained_degree = -1;
    for (int omega = 0; omega <= top && report.residuals[omega] < tolerance; ++omega) {
        report.attained_degree = omega;
    }

    report.quality = classify_quality(rule);
    report.weight_ratio = weight_ratio(rule);
    report.min_coordinate = points.front().min_coordinate();
    for (const auto& p : points) report.min_coordinate = std::min(report.min_coordinate, p.min_coordinate());
    CompensatedSum ws;
    for (double w : weights) ws.add(w);
    report.weight_sum = ws.value();
    return report;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string write_rule(const CandidateRule& rule, const VerificationReport& report) {
    std::string out = header(rule, report);
    for (const auto& o : rule.orbits) {
        out += std::to_string(o.type);
        for (double p : o.params) out += ' ' + format_number(p);
        out += ' ' + format_number(o.weight) + '\n';
    }
    return out;
}

std::string write_expanded(const CandidateRule& rule, const VerificationReport& report) {
    std::string out = header(rule, report);
    const auto points = rule.points();
    const auto weights = rule.weights();
    for (std::size_t p = 0; p < points.size(); ++p) {
        out += format_number(points[p].l1) + ' ' + format_number(points[p].l2) + ' ' +
               format_number(points[p].l3) + ' ' + format_number(weights[p]) + '\n';
    }
    return out;
}

RuleFile read_rule(std::string_view text) {
    static constexpr std::array<std::string_view, 4> kKeys{"mode", "degree", "npoints", "quality"};
    RuleFile file;
    int npoints = 0;
    int npoints_line = 0;
    int header_seen = 0;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto words = split_words(line);
        if (words.empty() || words[0].front() == '#') continue;

        if (header_seen < 4) {
            if (words[0] != kKeys[header_seen]) {
                throw RuleFormatError(line_no, "expected '" + std::string(kKeys[header_seen]) + "' header");
            }
            if (words.size() != 2) throw RuleFormatError(line_no, "header takes exactly one value");
            const std::string_view value = words[1];
            switch (header_seen) {
                case 0:
                    if (value == "full") {
                        file.rule.mode = SymmetryMode::Full;
                    } else if (value == "rot") {
                        file.rule.mode = SymmetryMode::Rotational;
                    } else {
                        throw RuleFormatError(line_no, "unknown mode '" + std::string(value) + "'");
                    }
                    break;
                case 1:
                    file.rule.degree = parse_int(value, line_no);
                    if (file.rule.degree < 0) throw RuleFormatError(line_no, "negative degree");
                    break;
                case 2:
                    npoints = parse_int(value, line_no);
                    npoints_line = line_no;
                    if (npoints < 1) throw RuleFormatError(line_no, "npoints must be positive");
                    break;
                case 3: {
                    const auto q = parse_quality(value);
                    if (!q) throw RuleFormatError(line_no, "unknown quality '" + std::string(value) + "'");
                    file.quality = *q;
                    break;
                }
            }
            ++header_seen;
            continue;
        }

        Orbit orbit;
        orbit.type = parse_int(words[0], line_no);
        if (orbit.type < 0 || orbit.type >= orbit_type_count(file.rule.mode)) {
            throw RuleFormatError(line_no, "orbit type " + std::to_string(orbit.type) + " invalid in " +
                                               to_string(file.rule.mode) + " mode");
        }
        const int nparams = OrbitKind::make(file.rule.mode, orbit.type).parameter_count();
        if (static_cast<int>(words.size()) != nparams + 2) {
            throw RuleFormatError(line_no, "orbit type " + std::to_string(orbit.type) + " needs " +
                                               std::to_string(nparams) + " parameter(s) and a weight");
        }
        for (int p = 0; p < nparams; ++p) orbit.params.push_back(parse_double(words[1 + p], line_no));
        orbit.weight = parse_double(words.back(), line_no);
        file.rule.orbits.push_back(std::move(orbit));
    }
    if (header_seen < 4) {
        throw RuleFormatError(line_no, "missing '" + std::string(kKeys[header_seen]) + "' header");
    }
    if (file.rule.orbits.empty()) throw RuleFormatError(line_no, "no orbit lines");
    if (file.rule.point_count() != npoints) {
        throw RuleFormatError(npoints_line, "npoints header says " + std::to_string(npoints) + " but orbits give " +
                                           std::to_string(file.rule.point_count()));
    }
    return file;
}

std::vector<CorpusEntry> regression_corpus() {
    std::vector<CorpusEntry> corpus;

    CandidateRule centroid{SymmetryMode::Full, 1, {{0, {}, 1.0}}, {}};
    corpus.push_back({"centroid", centroid, 1, QualityFlag::PI});

    CandidateRule three{SymmetryMode::Full, 2, {{1, {1.0 / 6.0}, 1.0 / 3.0}}, {}};
    corpus.push_back({"three-point", three, 2, QualityFlag::PI});

    const double r15 = std::sqrt(15.0);
    CandidateRule seven{SymmetryMode::Full,
                        5,
                        {{0, {}, 9.0 / 40.0},
                         {1, {(6.0 - r15) / 21.0}, (155.0 - r15) / 1200.0},
                         {1, {(6.0 + r15) / 21.0}, (155.0 + r15) / 1200.0}},
                        {}};
    corpus.push_back({"seven-point", seven, 5, QualityFlag::PI});

    // Two rotational orbits, not mirror images of each other.
    CandidateRule rot6{SymmetryMode::Rotational,
                       4,
                       {{1, {8.3785220829289894e-02, 9.8776693263356433e-02}, 1.0917877480091535e-01},
                        {1, {1.0824887544999956e-01, 4.6280488669139336e-01}, 2.2415455853241800e-01}},
                       {}};
    corpus.push_back({"rot-six-point", rot6, 4, QualityFlag::PI});

    return corpus;
}

}  // namespace triquad
