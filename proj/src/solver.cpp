#include "triquad/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "triquad/rulekit.hpp"

namespace triquad {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kBoundaryProximity = 1e-6;

std::mt19937_64 attempt_rng(std::uint64_t seed, int combination, long attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(combination), static_cast<std::uint32_t>(attempt),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(attempt) >> 32)};
    return std::mt19937_64(seq);
}

Eigen::VectorXd random_parameters(SymmetryMode mode, std::span<const int> types, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> half(0.0, 0.5);
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd params(parameter_count(mode, types));
    int k = 0;
    for (int t : types) {
        const OrbitKind kind = OrbitKind::make(mode, t);
        if (kind.parameter_count() == 1) {
            params[k++] = half(rng);
        } else if (kind.parameter_count() == 2) {
            const double a = expo(rng), b = expo(rng), c = expo(rng);
            const double s = a + b + c;
            params[k++] = a / s;
            params[k++] = b / s;
        }
    }
    return params;
}

}  // namespace

// ---------------------------------------------------------------------------
// SearchBasis

std::optional<SearchBasis> SearchBasis::parse(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "ORTHO_SYM") return ortho(SymmetryMode::Full);
    if (upper == "ORTHO_ROT") return ortho(SymmetryMode::Rotational);
    if (auto k = parse_basis_kind(upper)) return pkd(*k);
    return std::nullopt;
}

std::string SearchBasis::name() const {
    if (is_ortho()) return ortho_mode() == SymmetryMode::Full ? "ORTHO_SYM" : "ORTHO_ROT";
    return std::string(to_string(pkd_kind()));
}

bool SearchBasis::accepts(SymmetryMode mode) const {
    return is_ortho() ? ortho_mode() == mode : accepts_mode(pkd_kind(), mode);
}

long SearchBasis::size(int phi) const {
    if (is_ortho()) {
        return ortho_mode() == SymmetryMode::Full ? cardinality(BasisKind::MinM, phi)
                                                  : cardinality(BasisKind::RotR, phi);
    }
    return cardinality(pkd_kind(), phi);
}

std::vector<SearchBasis> applicable_bases(SymmetryMode mode) {
    std::vector<SearchBasis> out;
    for (BasisKind k : kAllBasisKinds) {
        if (accepts_mode(k, mode)) out.push_back(SearchBasis::pkd(k));
    }
    out.push_back(SearchBasis::ortho(mode));
    return out;
}

SearchBasis default_basis(SymmetryMode mode) {
    return SearchBasis::pkd(mode == SymmetryMode::Full ? BasisKind::MinM2 : BasisKind::RotR2);
}

// ---------------------------------------------------------------------------
// Orbit combinations

int OrbitCombination::point_count() const {
    int n = 0;
    for (std::size_t t = 0; t < counts.size(); ++t) n += counts[t] * OrbitKind::make(mode, static_cast<int>(t)).point_count();
    return n;
}

int OrbitCombination::unknown_count() const {
    int n = 0;
    for (std::size_t t = 0; t < counts.size(); ++t) {
        n += counts[t] * (1 + OrbitKind::make(mode, static_cast<int>(t)).parameter_count());
    }
    return n;
}

std::vector<int> OrbitCombination::orbit_types() const {
    std::vector<int> types;
    for (std::size_t t = 0; t < counts.size(); ++t) types.insert(types.end(), counts[t], static_cast<int>(t));
    return types;
}

std::string OrbitCombination::to_string() const {
    std::string s = "[";
    for (std::size_t t = 0; t < counts.size(); ++t) {
        if (t) s += ',';
        s += std::to_string(counts[t]);
    }
    return s + "]";
}

std::vector<OrbitCombination> enumerate_combinations(SymmetryMode mode, int npoints) {
    if (npoints < 1) throw std::invalid_argument("enumerate_combinations: npoints must be positive");
    std::vector<OrbitCombination> out;
    const int n0 = npoints % 3 == 1 ? 1 : 0;
    const int rest = npoints - n0;
    if (rest % 3 != 0) return out;
    if (mode == SymmetryMode::Rotational) {
        out.push_back({mode, {n0, rest / 3}});
        return out;
    }
    for (int n1 = 0; 3 * n1 <= rest; ++n1) {
        if ((rest - 3 * n1) % 6 == 0) out.push_back({mode, {n0, n1, (rest - 3 * n1) / 6}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Moment system

int parameter_count(SymmetryMode mode, std::span<const int> types) {
    int n = 0;
    for (int t : types) n += OrbitKind::make(mode, t).parameter_count();
    return n;
}

Eigen::VectorXd pack_unknowns(const CandidateRule& rule) {
    std::vector<int> types;
    for (const auto& o : rule.orbits) types.push_back(o.type);
    const int np = parameter_count(rule.mode, types);
    Eigen::VectorXd x(np + static_cast<int>(rule.orbits.size()));
    int k = 0;
    for (const auto& o : rule.orbits) {
        for (double p : o.params) x[k++] = p;
    }
    for (const auto& o : rule.orbits) x[k++] = o.weight;
    return x;
}

std::vector<Orbit> unpack_unknowns(SymmetryMode mode, std::span<const int> types, const Eigen::VectorXd& x) {
    std::vector<Orbit> orbits;
    int k = 0;
    for (int t : types) {
        Orbit o{t, {}, 0.0};
        for (int p = 0; p < OrbitKind::make(mode, t).parameter_count(); ++p) o.params.push_back(x[k++]);
        orbits.push_back(std::move(o));
    }
    for (auto& o : orbits) o.weight = x[k++];
    return orbits;
}

MomentSystem::MomentSystem(SymmetryMode mode, int degree, SearchBasis basis)
    : mode_(mode), degree_(degree), basis_(basis) {
    if (degree < 0) throw std::invalid_argument("MomentSystem: negative degree");
    if (!basis.accepts(mode)) {
        throw std::invalid_argument("basis " + basis.name() + " is not compatible with " + to_string(mode) +
                                    " symmetry");
    }
    if (basis.is_ortho()) {
        ortho_ = std::make_shared<const OrthoSymBasis>(orthonormalize(mode, degree));
        rhs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ortho_->size()));
        rhs_[0] = 1.0;
    } else {
        index_set_ = index_set(basis.pkd_kind(), degree);
        rhs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index_set_->size()));
        // (1/A) * integral of psi_00 = sqrt(2); every other psi_ij integrates to 0.
        rhs_[0] = std::sqrt(2.0);
    }
}

MomentSystem::Assembler::Assembler(const MomentSystem& system) : system_(system) {
    const std::size_t n = system.rows();
    values_.resize(n);
    d1_.resize(n);
    d2_.resize(n);
    d3_.resize(n);
    if (system.index_set_) pkd_.emplace(*system.index_set_);
}

void MomentSystem::Assembler::assemble(std::span<const int> types, const Eigen::VectorXd& x,
                                       Eigen::VectorXd& r, Eigen::MatrixXd* jacobian) {
    const SymmetryMode mode = system_.mode_;
    const int rows = static_cast<int>(system_.rows());
    const int np = parameter_count(mode, types);
    const int norb = static_cast<int>(types.size());
    if (x.size() != np + norb) throw std::invalid_argument("assemble: unknown vector has wrong length");

    r = -system_.rhs_;
    if (jacobian) jacobian->setZero(rows, np + norb);

    int pcol = 0;
    for (int o = 0; o < norb; ++o) {
        const OrbitKind kind = OrbitKind::make(mode, types[o]);
        const int nparams = kind.parameter_count();
        const double weight = x[np + o];
        const std::span<const double> params(x.data() + pcol, static_cast<std::size_t>(nparams));
        const ArealPoint gen = orbit_generator(kind, params);
        const auto gen_jac = orbit_generator_jacobian(kind);
        const int wcol = np + o;

        if (system_.ortho_) {
            const double size = kind.point_count();
            const ElementaryValues e = elementary_values(gen);
            system_.ortho_->evaluate_recurrence(e, values_, d1_, d2_, d3_);
            const ElementaryGradient eg = elementary_gradient(gen);
            // d(l2, l3, la)/d param
            std::array<std::array<double, 3>, 2> dl{};
            for (int p = 0; p < nparams; ++p) {
                for (int c = 0; c < 3; ++c) {
                    dl[p][0] += eg.l2[c] * gen_jac[p][c];
                    dl[p][1] += eg.l3[c] * gen_jac[p][c];
                    dl[p][2] += eg.la[c] * gen_jac[p][c];
                }
            }
            for (int b = 0; b < rows; ++b) {
                r[b] += weight * size * values_[b];
                if (!jacobian) continue;
                (*jacobian)(b, wcol) = size * values_[b];
                for (int p = 0; p < nparams; ++p) {
                    (*jacobian)(b, pcol + p) =
                        weight * size * (d1_[b] * dl[p][0] + d2_[b] * dl[p][1] + d3_[b] * dl[p][2]);
                }
            }
        } else {
            const auto coords = gen.coords();
            for (const auto& perm : orbit_permutations(kind)) {
                const ArealPoint pt{coords[perm[0]], coords[perm[1]], coords[perm[2]]};
                pkd_->evaluate(pt, values_, d1_, d2_);
                for (int b = 0; b < rows; ++b) {
                    r[b] += weight * values_[b];
                    if (!jacobian) continue;
                    (*jacobian)(b, wcol) += values_[b];
                    for (int p = 0; p < nparams; ++p) {
                        (*jacobian)(b, pcol + p) +=
                            weight * (d1_[b] * gen_jac[p][perm[0]] + d2_[b] * gen_jac[p][perm[1]]);
                    }
                }
            }
        }
        pcol += nparams;
    }
}

Eigen::MatrixXd MomentSystem::Assembler::orbit_sums(std::span<const int> types, const Eigen::VectorXd& x) {
    const int norb = static_cast<int>(types.size());
    const int np = parameter_count(system_.mode_, types);
    Eigen::MatrixXd a(system_.rows(), norb);
    Eigen::VectorXd unit = x;
    Eigen::VectorXd r;
    for (int o = 0; o < norb; ++o) {
        unit.tail(norb).setZero();
        unit[np + o] = 1.0;
        assemble(types, unit, r, nullptr);
        a.col(o) = r + system_.rhs_;
    }
    return a;
}

ResidualSystem assemble_system(const CandidateRule& candidate, const MomentSystem& system) {
    if (candidate.mode != system.mode()) throw std::invalid_argument("assemble_system: mode mismatch");
    if (candidate.degree != system.degree()) throw std::invalid_argument("assemble_system: degree mismatch");
    std::vector<int> types;
    for (const auto& o : candidate.orbits) types.push_back(o.type);
    ResidualSystem out;
    auto assembler = system.assembler();
    assembler.assemble(types, pack_unknowns(candidate), out.residual, &out.jacobian);
    return out;
}

ResidualSystem assemble_system(const CandidateRule& candidate, SearchBasis basis) {
    if (!basis.accepts(candidate.mode)) {
        throw std::invalid_argument("basis " + basis.name() + " is not compatible with " +
                                    to_string(candidate.mode) + " symmetry");
    }
    return assemble_system(candidate, MomentSystem(candidate.mode, candidate.degree, basis));
}

// ---------------------------------------------------------------------------
// Search

AttemptResult run_attempt(const MomentSystem& system, const OrbitCombination& combination,
                          const SolverConfig& config, int combination_index, long attempt) {
    const std::vector<int> types = combination.orbit_types();
    const int np = parameter_count(system.mode(), types);
    const int norb = static_cast<int>(types.size());
    auto rng = attempt_rng(config.seed, combination_index, attempt);
    auto assembler = system.assembler();

    Eigen::VectorXd x(np + norb);
    x.head(np) = random_parameters(system.mode(), types, rng);
    {
        const Eigen::MatrixXd a = assembler.orbit_sums(types, x);
        x.tail(norb) = a.completeOrthogonalDecomposition().solve(system.rhs());
    }

    AttemptResult result;
    Eigen::VectorXd r, r_trial;
    Eigen::MatrixXd jac;
    assembler.assemble(types, x, r, &jac);
    double cost = r.squaredNorm();
    double lambda = config.lambda_initial;

    for (result.iterations = 0; result.iterations < config.max_iterations; ++result.iterations) {
        if (!std::isfinite(cost)) break;
        if (r.lpNorm<Eigen::Infinity>() < config.residual_tolerance) {
            result.converged = true;
            break;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::MatrixXd lhs = jtj;
        lhs.diagonal().array() += lambda * (jtj.diagonal().array() + 1e-12);
        const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
        const Eigen::VectorXd x_trial = x + step;
        assembler.assemble(types, x_trial, r_trial, nullptr);
        const double trial_cost = r_trial.squaredNorm();
        if (std::isfinite(trial_cost) && trial_cost < cost) {
            x = x_trial;
            cost = trial_cost;
            assembler.assemble(types, x, r, &jac);
            lambda *= config.lambda_decrease;
        } else {
            lambda *= config.lambda_increase;
            if (lambda > config.lambda_max) break;
        }
    }
    if (!result.converged && std::isfinite(cost) && r.lpNorm<Eigen::Infinity>() < config.residual_tolerance) {
        result.converged = true;
    }
    result.max_residual = r.lpNorm<Eigen::Infinity>();
    result.rule.mode = system.mode();
    result.rule.degree = system.degree();
    result.rule.orbits = unpack_unknowns(system.mode(), types, x);
    result.rule.provenance = {config.seed, combination_index, attempt};
    return result;
}

SearchResult seek_rules(SymmetryMode mode, int degree, int npoints, const SolverConfig& config) {
    if (degree < 1) throw std::invalid_argument("seek_rules: degree must be at least 1");
    if (npoints < 1) throw std::invalid_argument("seek_rules: npoints must be positive");
    if (!(config.residual_tolerance > 0.0)) throw std::invalid_argument("seek_rules: tolerance must be positive");
    if (config.budget_seconds < 0.0) throw std::invalid_argument("seek_rules: budget must be non-negative");

    SearchResult result;
    const auto combinations = enumerate_combinations(mode, npoints);
    if (combinations.empty()) {
        result.status = "no orbit combination of " + std::to_string(npoints) + " points exists in " +
                        to_string(mode) + " mode";
        return result;
    }
    const SearchBasis basis = config.basis.value_or(default_basis(mode));
    const MomentSystem system(mode, degree, basis);
    const int jobs = std::max(1, config.jobs);

    const auto start = Clock::now();
    const bool limited = config.budget_seconds > 0.0;
    const auto total_budget = std::chrono::duration<double>(config.budget_seconds);

    for (std::size_t ci = 0; ci < combinations.size(); ++ci) {
        CombinationOutcome outcome{combinations[ci]};
        // Split what is left of the budget evenly over the remaining combinations.
        Clock::time_point deadline = Clock::time_point::max();
        if (limited) {
            const auto left = total_budget - (Clock::now() - start);
            deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                          left / static_cast<double>(combinations.size() - ci));
        }

        std::mutex mutex;
        std::map<long, CandidateRule> found;  // attempt -> verified rule
        std::atomic<long> next{0};
        std::atomic<long> done{0};
        std::atomic<long> converged{0};
        std::atomic<bool> out_of_time{false};
        std::atomic<int> distinct_hint{0};

        auto worker = [&] {
            for (;;) {
                if (config.max_rules_per_combination > 0 &&
                    distinct_hint.load() >= config.max_rules_per_combination) {
                    return;
                }
                if (limited && Clock::now() >= deadline) {
                    out_of_time = true;
                    return;
                }
                const long a = next.fetch_add(1);
                if (a >= config.attempts) return;
                AttemptResult res = run_attempt(system, combinations[ci], config, static_cast<int>(ci), a);
                ++done;
                if (!res.converged) continue;
                ++converged;
                if (!verify(res.rule).certifies(degree)) continue;
                CandidateRule canon = res.rule.canonicalized();
                std::lock_guard lock(mutex);
                const bool dup = std::any_of(found.begin(), found.end(),
                                             [&](const auto& kv) { return same_rule(kv.second, canon); });
                if (!dup) ++distinct_hint;
                found.emplace(a, std::move(canon));
            }
        };
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
            for (auto& t : threads) t.join();
        }

        // Attempt order makes the surviving representative independent of scheduling.
        std::vector<CandidateRule> distinct;
        for (auto& [a, rule] : found) {
            const bool dup = std::any_of(distinct.begin(), distinct.end(),
                                         [&](const CandidateRule& d) { return same_rule(d, rule); });
            if (!dup) distinct.push_back(std::move(rule));
        }
        outcome.attempts = done.load();
        outcome.converged = converged.load();
        outcome.distinct = static_cast<long>(distinct.size());
        outcome.budget_exhausted = out_of_time.load();
        result.budget_exhausted = result.budget_exhausted || outcome.budget_exhausted;
        result.rules.insert(result.rules.end(), std::make_move_iterator(distinct.begin()),
                            std::make_move_iterator(distinct.end()));
        result.combinations.push_back(outcome);
    }

    result.status = std::to_string(result.rules.size()) + " distinct rule(s) found";
    if (result.budget_exhausted) result.status += "; budget exhausted, results are partial";
    return result;
}

double weight_ratio(const CandidateRule& rule) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& o : rule.orbits) {
        lo = std::min(lo, std::abs(o.weight));
        hi = std::max(hi, std::abs(o.weight));
    }
    return hi / lo;
}

const CandidateRule& select_best(std::span<const CandidateRule> rules) {
    if (rules.empty()) throw std::invalid_argument("select_best: no rules");
    auto key = [](const CandidateRule& r) {
        bool near_boundary = false;
        if (classify_quality(r) == QualityFlag::PI) {
            for (const auto& p : r.points()) near_boundary = near_boundary || p.min_coordinate() < kBoundaryProximity;
        }
        return std::tuple(near_boundary, weight_ratio(r), r.provenance);
    };
    std::size_t best = 0;
    auto best_key = key(rules[0]);
    for (std::size_t k = 1; k < rules.size(); ++k) {
        auto kk = key(rules[k]);
        if (kk < best_key) {
            best = k;
            best_key = kk;
        }
    }
    return rules[best];
}

}  // namespace triquad
