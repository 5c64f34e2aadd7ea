#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "triquad/rule.hpp"

namespace triquad {

struct VerificationReport {
    int stated_degree = 0;
    /// Max |rule sum - exact moment| over areal monomials of each degree
    /// 0 .. stated_degree + 1.
    std::vector<double> residuals;
    /// Largest omega with every residual through omega below tolerance;
    /// -1 if degree 0 already fails.
    int attained_degree = -1;
    QualityFlag quality = QualityFlag::PI;
    double weight_ratio = 0.0;
    /// Smallest areal coordinate over all points (negative means outside).
    double min_coordinate = 0.0;
    double weight_sum = 0.0;

    /// Max residual over degrees 0..omega.
    double max_residual_through(int omega) const;
    bool certifies(int degree) const { return attained_degree >= degree; }
};

/// Checks a rule against exact moments of every areal monomial of degree
/// <= rule.degree + 1. Never consults a search basis.
VerificationReport verify(const CandidateRule& rule, double tolerance = 1e-12);

/// Malformed or inconsistent rule text.
class RuleFormatError : public std::runtime_error {
public:
    RuleFormatError(int line, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct RuleFile {
    CandidateRule rule;
    QualityFlag quality = QualityFlag::PI;
};

/// Orbit form:
///
///     mode full|rot
///     degree <int>
///     npoints <int>
///     quality PI|NI|PO|NO
///     <type> [p1 [p2]] <weight>      one line per orbit
///
/// Numbers use 17 significant digits, so read_rule(write_rule(r)) restores
/// every double bit-exactly.
std::string write_rule(const CandidateRule& rule, const VerificationReport& report);

/// Same header, then one `L1 L2 L3 weight` line per point.
std::string write_expanded(const CandidateRule& rule, const VerificationReport& report);

/// Parses orbit form. Blank lines and lines starting with '#' are ignored.
RuleFile read_rule(std::string_view text);

/// Formats a double with 17 significant digits in exponent notation.
std::string format_number(double v);

struct CorpusEntry {
    std::string name;
    CandidateRule rule;
    int expected_degree = 0;
    QualityFlag expected_quality = QualityFlag::PI;
};

/// Classical rules of degree 1, 2 and 5 plus a rotationally symmetric rule
/// of degree 4 found by this project's solver.
std::vector<CorpusEntry> regression_corpus();

}  // namespace triquad
