#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "triquad/bases.hpp"
#include "triquad/rule.hpp"
#include "triquad/symbasis.hpp"

namespace triquad {

/// Basis used to write the moment equations: one of the PKD index-set
/// kinds, or the orthonormal symmetric (ORTHO_SYM) / rotational (ORTHO_ROT)
/// basis.
class SearchBasis {
public:
    static SearchBasis pkd(BasisKind kind) { return SearchBasis(kind, std::nullopt); }
    static SearchBasis ortho(SymmetryMode mode) { return SearchBasis(std::nullopt, mode); }
    static std::optional<SearchBasis> parse(std::string_view name);

    bool is_ortho() const { return ortho_.has_value(); }
    BasisKind pkd_kind() const { return *pkd_; }
    SymmetryMode ortho_mode() const { return *ortho_; }

    std::string name() const;
    bool accepts(SymmetryMode mode) const;
    /// Number of moment equations at degree phi.
    long size(int phi) const;

    bool operator==(const SearchBasis&) const = default;

private:
    SearchBasis(std::optional<BasisKind> k, std::optional<SymmetryMode> m) : pkd_(k), ortho_(m) {}
    std::optional<BasisKind> pkd_;
    std::optional<SymmetryMode> ortho_;
};

/// Every basis usable for a mode: FULL_F, the mode's objective kinds and its
/// orthonormal basis.
std::vector<SearchBasis> applicable_bases(SymmetryMode mode);

/// MIN_M2 for full symmetry, ROT_R2 for rotational symmetry.
SearchBasis default_basis(SymmetryMode mode);

/// Orbit counts per type: [n0, n1, n2] (FULL) or [n0, n1] (ROTATIONAL).
struct OrbitCombination {
    SymmetryMode mode = SymmetryMode::Full;
    std::vector<int> counts;

    int point_count() const;
    /// Weights plus free orbit coordinates.
    int unknown_count() const;
    /// Orbit types in layout order (all type-0, then type-1, then type-2).
    std::vector<int> orbit_types() const;
    std::string to_string() const;

    bool operator==(const OrbitCombination&) const = default;
};

/// All combinations with n0 <= 1 and the given point count, by n1 ascending.
std::vector<OrbitCombination> enumerate_combinations(SymmetryMode mode, int npoints);

/// Moment equations of a fixed mode, degree and basis.
///
/// Unknowns are packed as all orbit parameters (orbit by orbit) followed by
/// one weight per orbit. Residual row b is
/// sum_orbits weight * (orbit sum of basis b) - (1/A) * integral of basis b.
/// The system is immutable and may be shared across threads; each thread
/// assembles through its own Assembler.
class MomentSystem {
public:
    MomentSystem(SymmetryMode mode, int degree, SearchBasis basis);

    SymmetryMode mode() const { return mode_; }
    int degree() const { return degree_; }
    const SearchBasis& basis() const { return basis_; }
    std::size_t rows() const { return rhs_.size(); }
    const Eigen::VectorXd& rhs() const { return rhs_; }

    class Assembler {
    public:
        explicit Assembler(const MomentSystem& system);

        /// r and (if non-null) J at unknowns x for orbits of the given types.
        void assemble(std::span<const int> types, const Eigen::VectorXd& x, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jacobian);

        /// Orbit-sum matrix A (rows x orbits) at the given parameters, so that
        /// r = A w - rhs.
        Eigen::MatrixXd orbit_sums(std::span<const int> types, const Eigen::VectorXd& x);

    private:
        const MomentSystem& system_;
        std::optional<PkdEvaluator> pkd_;
        std::vector<double> values_, d1_, d2_, d3_;
    };

    Assembler assembler() const { return Assembler(*this); }

private:
    friend class Assembler;
    SymmetryMode mode_;
    int degree_;
    SearchBasis basis_;
    std::optional<BasisIndexSet> index_set_;
    std::shared_ptr<const OrthoSymBasis> ortho_;
    Eigen::VectorXd rhs_;
};

/// Number of free parameters of a layout.
int parameter_count(SymmetryMode mode, std::span<const int> types);

/// Packs a rule's orbits into the unknown vector used by MomentSystem.
Eigen::VectorXd pack_unknowns(const CandidateRule& rule);

/// Rebuilds orbits from a packed vector.
std::vector<Orbit> unpack_unknowns(SymmetryMode mode, std::span<const int> types,
                                   const Eigen::VectorXd& x);

struct ResidualSystem {
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
};

/// Residual and Jacobian of a candidate under a basis of the same degree.
/// Throws std::invalid_argument on a basis/mode mismatch.
ResidualSystem assemble_system(const CandidateRule& candidate, const MomentSystem& system);
ResidualSystem assemble_system(const CandidateRule& candidate, SearchBasis basis);

struct SolverConfig {
    std::optional<SearchBasis> basis;  ///< default_basis(mode) when unset
    double residual_tolerance = 1e-14;  ///< on max |r|
    int max_iterations = 200;           ///< LM trial steps per attempt
    long attempts = 1000;               ///< per combination
    double budget_seconds = 0.0;        ///< wall clock for the whole search, 0 = unlimited
    std::uint64_t seed = 1;
    int jobs = 1;

    // Levenberg-Marquardt damping schedule.
    double lambda_initial = 1e-3;
    double lambda_decrease = 0.3;
    double lambda_increase = 10.0;
    double lambda_max = 1e10;

    /// Stop a combination after this many distinct rules; 0 = never.
    int max_rules_per_combination = 0;
};

struct CombinationOutcome {
    OrbitCombination combination;
    long attempts = 0;
    long converged = 0;
    long distinct = 0;
    bool budget_exhausted = false;
};

struct SearchResult {
    std::vector<CandidateRule> rules;  ///< verified, distinct, by provenance
    std::vector<CombinationOutcome> combinations;
    bool budget_exhausted = false;
    std::string status;
};

/// Outcome of one restart.
struct AttemptResult {
    bool converged = false;
    int iterations = 0;
    double max_residual = 0.0;
    CandidateRule rule;
};

/// One seeded restart on a combination: random orbit parameters, weights by
/// linear least squares, then damped Gauss-Newton on everything.
AttemptResult run_attempt(const MomentSystem& system, const OrbitCombination& combination,
                          const SolverConfig& config, int combination_index, long attempt);

/// Searches every orbit combination of `npoints` for rules of `degree`.
/// Every returned rule verifies at that degree against exact moments.
SearchResult seek_rules(SymmetryMode mode, int degree, int npoints, const SolverConfig& config);

/// Max over min absolute orbit weight.
double weight_ratio(const CandidateRule& rule);

/// Rule minimizing the weight ratio; PI rules with a point within 1e-6 of
/// the boundary lose to any PI rule without one; ties go to the earliest
/// provenance. Throws std::invalid_argument on empty input.
const CandidateRule& select_best(std::span<const CandidateRule> rules);

}  // namespace triquad
