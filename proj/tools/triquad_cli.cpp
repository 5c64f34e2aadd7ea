// triquad: search, verify and inspect symmetric cubature rules on the triangle.
//
// Exit codes: 0 success, 1 error, 2 no rule found (find) or rule not
// certified (verify) or table mismatch (tabulate --check).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "triquad/bases.hpp"
#include "triquad/rulekit.hpp"
#include "triquad/solver.hpp"
#include "triquad/symbasis.hpp"

namespace {

using namespace triquad;

std::optional<SymmetryMode> parse_mode(const std::string& s) {
    if (s == "full") return SymmetryMode::Full;
    if (s == "rot") return SymmetryMode::Rotational;
    return std::nullopt;
}

// Prints rows of equal-length cells, either space-aligned or as CSV.
void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows, bool csv) {
    if (rows.empty()) return;
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (csv) {
                os << (c ? "," : "") << r[c];
            } else {
                os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << r[c];
            }
        }
        os << '\n';
    }
}

struct FindOptions {
    std::string mode;
    int degree = -1;
    int points = 0;
    std::string basis;
    std::uint64_t seed = 1;
    long attempts = 1000;
    double budget = 0.0;
    std::string out = ".";
    int jobs = 1;
    double tolerance = 1e-14;
    int max_iterations = 200;
};

int run_find(const FindOptions& o) {
    const auto mode = parse_mode(o.mode);
    if (!mode) {
        std::cerr << "error: --mode must be full or rot\n";
        return 1;
    }
    SolverConfig config;
    config.seed = o.seed;
    config.attempts = o.attempts;
    config.budget_seconds = o.budget;
    config.jobs = o.jobs;
    config.residual_tolerance = o.tolerance;
    config.max_iterations = o.max_iterations;
    if (!o.basis.empty()) {
        config.basis = SearchBasis::parse(o.basis);
        if (!config.basis) {
            std::cerr << "error: unknown basis '" << o.basis << "'\n";
            return 1;
        }
        if (!config.basis->accepts(*mode)) {
            std::cerr << "error: basis " << config.basis->name() << " does not apply to " << o.mode << " mode\n";
            return 1;
        }
    }
    const SearchBasis basis = config.basis.value_or(default_basis(*mode));

    std::cout << "# find mode=" << o.mode << " degree=" << o.degree << " points=" << o.points
              << " basis=" << basis.name() << " seed=" << config.seed << " attempts=" << config.attempts
              << " budget=" << config.budget_seconds << " jobs=" << config.jobs
              << " tolerance=" << config.residual_tolerance << " max-iterations=" << config.max_iterations
              << " lambda=" << config.lambda_initial << "/x" << config.lambda_decrease << "/x"
              << config.lambda_increase << "/max" << config.lambda_max << " out=" << o.out << '\n';

    if (enumerate_combinations(*mode, o.points).empty()) {
        std::cout << "no orbit combination of " << o.points << " points exists in " << o.mode
                  << " mode (type-1 orbits have 3 points, at most one centroid)\n";
        return 2;
    }
    if (o.degree < 1) {
        std::cerr << "error: --degree N (N >= 1) is required\n";
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    const SearchResult result = seek_rules(*mode, o.degree, o.points, config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& c : result.combinations) {
        std::cout << "combination " << c.combination.to_string() << " unknowns=" << c.combination.unknown_count()
                  << " equations=" << basis.size(o.degree) << " attempts=" << c.attempts
                  << " converged=" << c.converged << " rules=" << c.distinct
                  << (c.budget_exhausted ? " (budget exhausted)" : "") << '\n';
    }

    std::filesystem::create_directories(o.out);
    int index = 0;
    for (const auto& rule : result.rules) {
        const VerificationReport report = verify(rule);
        std::ostringstream name;
        name << o.mode << "-d" << o.degree << "-n" << o.points << '-' << to_string(report.quality) << '-' << index++
             << ".txt";
        const auto path = std::filesystem::path(o.out) / name.str();
        std::ofstream(path) << write_rule(rule, report);
        std::ostringstream counts;
        for (int n : rule.orbit_counts()) counts << (counts.tellp() ? "," : "") << n;
        std::cout << "wrote " << path.string() << " [" << counts.str() << "] quality=" << to_string(report.quality)
                  << " ratio=" << report.weight_ratio << " max-residual=" << report.max_residual_through(o.degree)
                  << '\n';
    }
    std::cout << result.status << " in " << std::fixed << std::setprecision(2) << seconds << " s\n";
    return result.rules.empty() ? 2 : 0;
}

int run_verify(const std::string& path, double tolerance, bool expanded) {
    std::cerr << "# verify path=" << path << " tolerance=" << tolerance << '\n';
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << '\n';
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    RuleFile file;
    try {
        file = read_rule(buf.str());
    } catch (const RuleFormatError& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return 1;
    }
    const VerificationReport report = verify(file.rule, tolerance);
    if (expanded) {
        std::cout << write_expanded(file.rule, report);
        return 0;
    }
    std::cout << "mode " << to_string(file.rule.mode) << '\n'
              << "stated-degree " << report.stated_degree << '\n'
              << "attained-degree " << report.attained_degree << '\n'
              << "quality " << to_string(report.quality) << " (header " << to_string(file.quality) << ")\n"
              << "npoints " << file.rule.point_count() << '\n'
              << "weight-sum " << format_number(report.weight_sum) << '\n'
              << "weight-ratio " << report.weight_ratio << '\n'
              << "min-coordinate " << format_number(report.min_coordinate) << '\n';
    for (std::size_t w = 0; w < report.residuals.size(); ++w) {
        std::cout << "residual degree " << w << ' ' << report.residuals[w] << '\n';
    }
    const bool ok = report.certifies(file.rule.degree) && report.quality == file.quality;
    std::cout << (ok ? "verified" : "NOT verified") << '\n';
    return ok ? 0 : 2;
}

int run_tabulate(const std::string& kind_name, int max_degree, bool check, bool csv) {
    std::cerr << "# tabulate kind=" << kind_name << " max-degree=" << max_degree << " check=" << check
              << " csv=" << csv << '\n';
    // Orthonormal bases are tabulated by their monomial sets.
    std::vector<SearchBasis> kinds;
    if (kind_name == "all") {
        for (BasisKind k : kAllBasisKinds) kinds.push_back(SearchBasis::pkd(k));
        kinds.push_back(SearchBasis::ortho(SymmetryMode::Full));
        kinds.push_back(SearchBasis::ortho(SymmetryMode::Rotational));
    } else if (auto b = SearchBasis::parse(kind_name)) {
        kinds.push_back(*b);
    } else {
        std::cerr << "error: unknown kind '" << kind_name << "'\n";
        return 1;
    }
    if (max_degree < 0) {
        std::cerr << "error: --max-degree must be non-negative\n";
        return 1;
    }

    std::vector<std::vector<std::string>> rows{{"kind", "degree", "n", "m"}};
    int mismatches = 0;
    for (const auto& b : kinds) {
        for (int phi = 0; phi <= max_degree; ++phi) {
            const long n = b.size(phi);
            const long m = n - b.size(phi - 1);
            rows.push_back({b.name(), std::to_string(phi), std::to_string(n), std::to_string(m)});
            if (!check) continue;
            long enumerated = 0;
            long enumerated_top = 0;
            if (b.is_ortho()) {
                for (const auto& mono : monomial_set(b.ortho_mode(), phi)) {
                    ++enumerated;
                    if (mono.weighted_degree() == phi) ++enumerated_top;
                }
            } else {
                for (const auto& idx : index_set(b.pkd_kind(), phi).members) {
                    ++enumerated;
                    if (idx.degree() == phi) ++enumerated_top;
                }
                if (per_degree(b.pkd_kind(), phi) != m) ++mismatches;
            }
            if (enumerated != n || enumerated_top != m) {
                ++mismatches;
                std::cerr << "mismatch " << b.name() << " degree " << phi << ": enumerated n=" << enumerated
                          << " m=" << enumerated_top << ", closed form n=" << n << " m=" << m << '\n';
            }
        }
    }
    print_table(std::cout, rows, csv);
    if (check) {
        std::cout << (mismatches == 0 ? "check: all enumerations match closed forms\n" : "check: MISMATCH\n");
        return mismatches == 0 ? 0 : 2;
    }
    return 0;
}

int run_basis_dump(const std::string& kind_name, int degree, bool coeffs) {
    std::cerr << "# basis-dump kind=" << kind_name << " degree=" << degree << " coeffs=" << coeffs << '\n';
    const auto b = SearchBasis::parse(kind_name);
    if (!b) {
        std::cerr << "error: unknown kind '" << kind_name << "'\n";
        return 1;
    }
    if (degree < 0) {
        std::cerr << "error: --degree must be non-negative\n";
        return 1;
    }
    if (!b->is_ortho()) {
        if (coeffs) {
            std::cerr << "error: --coeffs applies to ORTHO_SYM and ORTHO_ROT only\n";
            return 1;
        }
        for (const auto& idx : index_set(b->pkd_kind(), degree).members) std::cout << idx.i << ' ' << idx.j << '\n';
        return 0;
    }
    const OrthoSymBasis basis = orthonormalize(b->ortho_mode(), degree);
    if (!coeffs) {
        for (const auto& m : basis.monomials()) std::cout << m.i << ' ' << m.j << ' ' << m.k << '\n';
        return 0;
    }
    std::cout << "# monomials l2^i l3^j la^k (i j k):";
    for (const auto& m : basis.monomials()) std::cout << ' ' << m.i << ',' << m.j << ',' << m.k;
    std::cout << "\n# line k: N_k c_k0 ... c_kk, with q_k = (sum_t c_kt m_t) / sqrt(N_k)\n";
    std::cout << basis.coefficient_table();
    return 0;
}

int run_bench(const std::string& mode_name, int degree, int points, std::uint64_t seed, double seconds, bool csv) {
    std::cerr << "# bench mode=" << mode_name << " degree=" << degree << " points=" << points << " seed=" << seed
              << " seconds-per-basis=" << seconds << '\n';
    const auto mode = parse_mode(mode_name);
    if (!mode) {
        std::cerr << "error: --mode must be full or rot\n";
        return 1;
    }
    if (degree < 1) {
        std::cerr << "error: --degree must be at least 1\n";
        return 1;
    }
    const auto combinations = enumerate_combinations(*mode, points);
    if (combinations.empty()) {
        std::cerr << "no orbit combination of " << points << " points exists in " << mode_name << " mode\n";
        return 2;
    }

    // Same random trial rules for every basis.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.45);
    std::vector<std::pair<std::vector<int>, Eigen::VectorXd>> trials;
    for (int t = 0; t < 64; ++t) {
        const auto types = combinations[t % combinations.size()].orbit_types();
        Eigen::VectorXd x(parameter_count(*mode, types) + static_cast<int>(types.size()));
        for (auto& v : x) v = unit(rng);
        trials.emplace_back(types, x);
    }

    std::vector<std::vector<std::string>> rows{{"basis", "n", "assemblies/s", "relative"}};
    double reference = 0.0;
    for (const auto& basis : applicable_bases(*mode)) {
        const MomentSystem system(*mode, degree, basis);
        auto assembler = system.assembler();
        Eigen::VectorXd r;
        Eigen::MatrixXd jac;
        long count = 0;
        const auto start = std::chrono::steady_clock::now();
        double elapsed = 0.0;
        do {
            for (const auto& [types, x] : trials) assembler.assemble(types, x, r, &jac);
            count += static_cast<long>(trials.size());
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } while (elapsed < seconds);
        const double rate = count / elapsed;
        if (basis == SearchBasis::pkd(BasisKind::FullF)) reference = rate;
        std::ostringstream rate_s, rel_s;
        rate_s << std::fixed << std::setprecision(0) << rate;
        rel_s << std::fixed << std::setprecision(2) << rate / reference;
        rows.push_back({basis.name(), std::to_string(system.rows()), rate_s.str(), rel_s.str()});
    }
    print_table(std::cout, rows, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetric cubature rules on the triangle"};
    app.require_subcommand(1);

    FindOptions find;
    auto* find_cmd = app.add_subcommand("find", "search for rules and write verified ones to files");
    find_cmd->add_option("--mode", find.mode, "full or rot")->required();
    find_cmd->add_option("--degree", find.degree, "polynomial degree");
    find_cmd->add_option("--points", find.points, "number of points")->required();
    find_cmd->add_option("--basis", find.basis, "FULL_F, OBJ_W, ..., ROT_R2, ORTHO_SYM, ORTHO_ROT");
    find_cmd->add_option("--seed", find.seed, "RNG seed")->capture_default_str();
    find_cmd->add_option("--attempts", find.attempts, "restarts per orbit combination")->capture_default_str();
    find_cmd->add_option("--budget", find.budget, "wall-clock seconds, 0 = unlimited")->capture_default_str();
    find_cmd->add_option("--out", find.out, "output directory")->capture_default_str();
    find_cmd->add_option("--jobs", find.jobs, "worker threads")->capture_default_str();
    find_cmd->add_option("--tolerance", find.tolerance, "max |residual| for convergence")->capture_default_str();
    find_cmd->add_option("--max-iterations", find.max_iterations, "LM steps per attempt")->capture_default_str();

    std::string verify_path;
    double verify_tol = 1e-12;
    bool verify_expanded = false;
    auto* verify_cmd = app.add_subcommand("verify", "check a rule file against exact moments");
    verify_cmd->add_option("path", verify_path, "rule file")->required();
    verify_cmd->add_option("--tolerance", verify_tol, "monomial residual tolerance")->capture_default_str();
    verify_cmd->add_flag("--expanded", verify_expanded, "print the rule point by point instead");

    std::string tab_kind = "all";
    int tab_max = 15;
    bool tab_check = false;
    bool tab_csv = false;
    auto* tab_cmd = app.add_subcommand("tabulate", "print n(phi) and m(omega) tables");
    tab_cmd->add_option("--kind", tab_kind, "basis kind or 'all'")->capture_default_str();
    tab_cmd->add_option("--max-degree", tab_max, "largest degree")->capture_default_str();
    tab_cmd->add_flag("--check", tab_check, "enumerate index sets and compare");
    tab_cmd->add_flag("--csv", tab_csv, "comma-separated output");

    std::string dump_kind;
    int dump_degree = 0;
    bool dump_coeffs = false;
    auto* dump_cmd = app.add_subcommand("basis-dump", "print an index set or orthonormal coefficient table");
    dump_cmd->add_option("--kind", dump_kind, "basis kind")->required();
    dump_cmd->add_option("--degree", dump_degree, "degree")->required();
    dump_cmd->add_flag("--coeffs", dump_coeffs, "exact coefficient table (ORTHO_SYM / ORTHO_ROT)");

    std::string bench_mode = "full";
    int bench_degree = 15;
    int bench_points = 49;
    std::uint64_t bench_seed = 1;
    double bench_seconds = 0.5;
    bool bench_csv = false;
    auto* bench_cmd = app.add_subcommand("bench", "relative residual-assembly throughput per basis");
    bench_cmd->add_option("--mode", bench_mode, "full or rot")->capture_default_str();
    bench_cmd->add_option("--degree", bench_degree, "degree")->capture_default_str();
    bench_cmd->add_option("--points", bench_points, "number of points")->capture_default_str();
    bench_cmd->add_option("--seed", bench_seed, "RNG seed for trial rules")->capture_default_str();
    bench_cmd->add_option("--seconds", bench_seconds, "timing window per basis")->capture_default_str();
    bench_cmd->add_flag("--csv", bench_csv, "comma-separated output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every usage error maps to 1
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*find_cmd) return run_find(find);
        if (*verify_cmd) return run_verify(verify_path, verify_tol, verify_expanded);
        if (*tab_cmd) return run_tabulate(tab_kind, tab_max, tab_check, tab_csv);
        if (*dump_cmd) return run_basis_dump(dump_kind, dump_degree, dump_coeffs);
        if (*bench_cmd) return run_bench(bench_mode, bench_degree, bench_points, bench_seed, bench_seconds, bench_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
