#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkgeo/tensor4.hpp"
#include "qkgeo/transforms.hpp"
#include "qkgeo/zoo.hpp"

namespace qkgeo {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20260810ULL;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string chart_name;  // may be empty when only chartless suites run
    int n = 2;
    double p = 1.0;
    double nu = -1.0;
    std::uint64_t seed = kDefaultSeed;
    int num_points = 20;
    std::vector<std::string> suites;
    std::map<std::string, double> tol_overrides;  // identity name -> tolerance
    std::optional<double> global_tol;             // plain --tol VALUE
    std::string output_path;
};

struct CheckSummary {
    std::string suite;
    std::string identity;
    int points = 0;
    int degenerate_points = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct VerificationReport {
    RunConfig config;
    std::vector<CheckSummary> checks;
    bool overall_pass = true;
    double wall_clock_ms = 0.0;
    std::string timestamp;

    nlohmann::ordered_json to_json(bool with_timing = true) const {
        nlohmann::ordered_json j;
        j["schema_version"] = kReportSchemaVersion;
        j["engine"] = {{"name", "qkgeo"}, {"version", kEngineVersion}};
        nlohmann::ordered_json cfg;
        cfg["chart"] = config.chart_name;
        cfg["n"] = config.n;
        cfg["p"] = config.p;
        cfg["nu"] = config.nu;
        cfg["seed"] = config.seed;
        cfg["points"] = config.num_points;
        cfg["suites"] = config.suites;
        nlohmann::ordered_json tols = nlohmann::ordered_json::object();
        for (const auto& [k, v] : config.tol_overrides) tols[k] = v;
        cfg["tolerance_overrides"] = tols;
        if (config.global_tol) cfg["tolerance_default"] = *config.global_tol;
        j["config"] = cfg;
        nlohmann::ordered_json cj = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json e;
            e["suite"] = c.suite;
            e["identity"] = c.identity;
            e["points"] = c.points;
            e["degenerate_points"] = c.degenerate_points;
            e["max_residual"] = c.max_residual;
            e["tolerance"] = c.tolerance;
            e["status"] = c.pass ? "passed" : "failed";
            cj.push_back(e);
        }
        j["checks"] = cj;
        j["overall_pass"] = overall_pass;
        if (with_timing) j["timing"] = {{"wall_clock_ms", wall_clock_ms}, {"timestamp", timestamp}};
        return j;
    }

    std::string to_string(bool with_timing = true) const { return to_json(with_timing).dump(2) + "\n"; }
};

struct SuiteInfo {
    std::string name;
    std::string description;
    std::vector<std::string> identities;
    bool needs_chart = true;
};

inline std::vector<SuiteInfo> list_suites() {
    return {
        {"contract",
         "chart contract: quaternionic identities, orthogonality of the structure triple, "
         "positive definiteness, Einstein property, curvature symmetries",
         {"structure_quaternion_identities", "structure_orthogonality", "metric_positive_definite",
          "einstein", "riemann_symmetries"},
         true},
        {"nu",
         "reduced scalar curvature: expected value and constancy across sample points",
         {"reduced_scalar_expected", "nu_constancy"},
         true},
        {"lee",
         "Lee form: closed-form match, codifferential vs trace route, connection forms built "
         "from the structure-rotated Lee form, reconstruction residual",
         {"lee_matches_closed_form", "lee_trace_route_agreement", "connection_forms_structure_lee",
          "connection_reconstruction"},
         true},
        {"lemma12",
         "exterior differentials of the Kahler forms against the structure connection, and the "
         "curvature 2-forms of that connection",
         {"kahler_form_differentials", "structure_connection_curvature"},
         true},
        {"eq25",
         "covariant derivative of the Lee form (closed case) and its codifferential trace",
         {"lee_covariant_derivative", "lee_codifferential_trace"},
         true},
        {"rprime",
         "curvature split into the model part and the hyper-Kahler remainder; the remainder's "
         "symmetries, its Lee-vector slice, and vanishing on locally symmetric charts",
         {"rprime_hyperkahler", "rprime_xi_slice", "rprime_vanishes"},
         true},
        {"closedlee",
         "closed-Lee-form differential identities: structure-rotated Lee derivatives, the energy "
         "differential, the exp-weighted constant, the gradient-field Hessian, and the geodesic "
         "acceleration of the Lee vector",
         {"structure_lee_derivative", "lee_energy_differential", "lee_energy_exp_constant",
          "psi_hessian", "structure_psi_derivative", "xi_acceleration"},
         true},
        {"eq64",
         "commutators of the automorphism fields e^f xi and its structure rotations",
         {"brackets_eta_structure", "brackets_structure_pairs"},
         true},
        {"hkpot",
         "hyper-Kahler potential identities on the flat chart: Hessian, structure second "
         "differentials, energy differential",
         {"potential_hessian", "potential_structure_ddbar", "potential_energy_differential"},
         true},
        {"thm2_roundtrip",
         "metric -> hyper-Kahler metric -> one-parameter family at p = nu/4 returns the metric; "
         "the intermediate metric is flat for the model charts and satisfies the potential "
         "identities",
         {"thm2_roundtrip_metric", "thm2_image_flatness", "potential_hessian",
          "potential_structure_ddbar", "potential_energy_differential"},
         true},
        {"algebra",
         "chartless property suite of the flat-model operator algebra: the quadratic relation of "
         "L, projector idempotency, symmetrizer contracts, the model tensor calibration, and the "
         "derivative source terms",
         {"l_quadratic_relation", "projector_idempotent", "projector_split", "pi_pair_swap",
          "tau_cycle", "pi_tau_outer_curvature", "r0_calibration", "source_terms_hyperkahler"},
         false},
        {"fdcheck",
         "finite-difference corroboration of the exact metric derivatives",
         {"metric_gradient_vs_fd", "metric_hessian_vs_fd"},
         true},
    };
}

namespace detail {

class SummaryTable {
public:
    explicit SummaryTable(const RunConfig& cfg) : cfg_(&cfg) {}

    void add(const std::string& suite, const CheckResult& r) {
        auto& e = row(suite, r.identity);
        e.points += 1;
        if (r.status == CheckStatus::degenerate) {
            e.degenerate_points += 1;
            return;
        }
        e.max_residual = std::max(e.max_residual, r.residual);
        e.tolerance = effective_tol(r.identity, r.tolerance);
        if (e.max_residual > e.tolerance) e.pass = false;
    }

    void add_scalar(const std::string& suite, const std::string& identity, double residual,
                    double default_tol, int points, int degenerate = 0) {
        auto& e = row(suite, identity);
        e.points = points;
        e.degenerate_points = degenerate;
        e.max_residual = residual;
        e.tolerance = effective_tol(identity, default_tol);
        e.pass = degenerate == points || residual <= e.tolerance;
    }

    double effective_tol(const std::string& identity, double default_tol) const {
        const auto it = cfg_->tol_overrides.find(identity);
        if (it != cfg_->tol_overrides.end()) return it->second;
        if (cfg_->global_tol) return *cfg_->global_tol;
        return default_tol;
    }

    std::vector<CheckSummary> rows() const { return rows_; }

private:
    CheckSummary& row(const std::string& suite, const std::string& identity) {
        for (auto& e : rows_)
            if (e.suite == suite && e.identity == identity) return e;
        CheckSummary e;
        e.suite = suite;
        e.identity = identity;
        rows_.push_back(e);
        return rows_.back();
    }

    const RunConfig* cfg_;
    std::vector<CheckSummary> rows_;
};

// ---------------------------------------------------------------------------
// chartless property suite

inline void run_algebra_suite(SummaryTable& table, const RunConfig& cfg) {
    const int cases = std::max(cfg.num_points, 1);
    Rng rng(cfg.seed);

    double res_l = 0.0, res_idem = 0.0, res_split = 0.0;
    for (int rep = 0; rep < cases; ++rep) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int dim = 4 * n;
        const SqMat<double> b = random_matrix(rng, dim);
        const double scale = std::max(max_abs(b), 1e-300);
        res_l = std::max(res_l,
                         max_abs(l_apply(l_apply(b)) - (2.0 * l_apply(b) + 3.0 * b)) / scale);
        const SqMat<double> bh = 0.25 * (b + l_apply(b));
        const SqMat<double> bp = b - bh;
        res_idem = std::max(res_idem, max_abs(0.25 * (bh + l_apply(bh)) - bh) / scale);
        res_split = std::max({res_split, max_abs(l_apply(bh) - 3.0 * bh) / scale,
                              max_abs(l_apply(bp) + bp) / scale});
    }
    table.add_scalar("algebra", "l_quadratic_relation", res_l, 1e-12, cases);
    table.add_scalar("algebra", "projector_idempotent", res_idem, 1e-12, cases);
    table.add_scalar("algebra", "projector_split", res_split, 1e-12, cases);

    // symmetrizer contracts on rank-4 tensors (kept at n = 2 for speed)
    const int dim = 8;
    const int tcases = std::max(cases / 10, 10);
    double res_swap = 0.0, res_tau = 0.0, res_curv = 0.0;
    for (int rep = 0; rep < tcases; ++rep) {
        Tensor4 r(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e) r(a, b, c, e) = rng.uniform(-1, 1);
        const Tensor4 pr = big_pi(r);
        double sw = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    for (int e = 0; e < dim; ++e)
                        sw = std::max(sw, std::abs(pr(a, b, c, e) + pr(c, e, b, a)));
        res_swap = std::max(res_swap, sw / std::max(pr.max_abs(), 1e-300));
        res_tau = std::max(res_tau,
                           (tau_apply(tau_apply(tau_apply(r))) - r).max_abs() /
                               std::max(r.max_abs(), 1e-300));
        const Tensor4 t = pi_tau_outer(random_skew(rng, dim), random_skew(rng, dim)) +
                          pi_tau_outer(random_symmetric(rng, dim), random_symmetric(rng, dim));
        const auto prof = symmetry_profile(t, 1e-12);
        res_curv = std::max({res_curv, prof.skew_first_pair, prof.skew_second_pair,
                             prof.pair_symmetric, prof.bianchi_first_three});
    }
    table.add_scalar("algebra", "pi_pair_swap", res_swap, 1e-14, tcases);
    table.add_scalar("algebra", "tau_cycle", res_tau, 1e-15, tcases);
    table.add_scalar("algebra", "pi_tau_outer_curvature", res_curv, 1e-12, tcases);

    double res_r0 = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const double s0 = scalar_curvature_flat(model_curvature_tensor(n));
        const double want = 16.0 * n * (n + 2);
        res_r0 = std::max(res_r0, std::abs(s0 - want) / want);
    }
    table.add_scalar("algebra", "r0_calibration", res_r0, 1e-10, 3);

    double res_a = 0.0;
    for (int rep = 0; rep < tcases; ++rep) {
        std::vector<double> phi(dim);
        for (double& x : phi) x = rng.uniform(-1, 1);
        const Tensor4 rp = pi_h_tau_outer(random_s2e(rng, dim), random_s2e(rng, dim));
        const auto at = derivative_source_terms(phi, random_s2e(rng, dim), rp);
        for (const Tensor4* t : {&at.a1, &at.a2, &at.a3}) {
            const auto prof = symmetry_profile(*t, 1e-10);
            res_a = std::max({res_a, prof.skew_first_pair, prof.skew_second_pair,
                              prof.pair_symmetric, prof.bianchi_first_three,
                              prof.hhermitian_first_pair, prof.hhermitian_second_pair});
        }
    }
    table.add_scalar("algebra", "source_terms_hyperkahler", res_a, 1e-10, tcases);
}

}  // namespace detail

// Execute the configured suites over seeded sample points. Deterministic for
// a fixed config (the sampler stream is a function of the seed only).
inline VerificationReport run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    VerificationReport report;
    report.config = cfg;
    detail::SummaryTable table(cfg);

    if (cfg.suites.empty()) throw ConfigError("no suites selected");
    const auto catalogue = list_suites();
    bool wants_chart = false;
    for (const auto& s : cfg.suites) {
        bool known = false;
        for (const auto& info : catalogue)
            if (info.name == s) {
                known = true;
                wants_chart = wants_chart || info.needs_chart;
            }
        if (!known) throw ConfigError("unknown suite '" + s + "'");
    }

    std::optional<ZooEntry> entry;
    std::vector<Point> points;
    if (wants_chart) {
        if (cfg.chart_name.empty()) throw ConfigError("selected suites require --chart");
        ZooParams params;
        params.n = cfg.n;
        params.p = cfg.p;
        params.nu = cfg.nu;
        try {
            entry = make_zoo_entry(cfg.chart_name, params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        Rng rng(cfg.seed);
        for (int i = 0; i < cfg.num_points; ++i) {
            Point p = entry->sampler(rng);
            if (!entry->chart.in_domain(p)) throw ConfigError("sampler left the chart domain");
            points.push_back(std::move(p));
        }
    }

    for (const auto& suite : cfg.suites) {
        if (suite == "algebra") {
            detail::run_algebra_suite(table, cfg);
            continue;
        }
        const MetricChart& chart = entry->chart;
        const ZooExpected& expected = entry->expected;

        if (suite == "contract") {
            for (const auto& p : points) {
                for (const auto& c : chart_contract(chart, p)) table.add(suite, c);
                table.add(suite, einstein_check(chart, p));
                table.add(suite, riemann_symmetry_check(chart, p));
            }
        } else if (suite == "nu") {
            std::vector<double> nus;
            nus.reserve(points.size());
            for (const auto& p : points) nus.push_back(reduced_scalar(chart, p));
            double mean = 0.0;
            for (double v : nus) mean += v;
            mean /= static_cast<double>(nus.size());
            double dev = 0.0;
            for (double v : nus) dev = std::max(dev, std::abs(v - mean));
            table.add_scalar(suite, "nu_constancy", dev, 1e-7, static_cast<int>(nus.size()));
            if (chart.nominal_nu) {
                double res = 0.0;
                for (double v : nus) res = std::max(res, std::abs(v - *chart.nominal_nu));
                table.add_scalar(suite, "reduced_scalar_expected", res, 1e-7,
                                 static_cast<int>(nus.size()));
            }
        } else if (suite == "lee") {
            for (const auto& p : points) {
                const auto phi = lee_form(chart, p);
                if (chart.lee_closed_form) {
                    const auto closed = chart.lee_closed_form(p);
                    double res = 0.0;
                    for (std::size_t i = 0; i < phi.size(); ++i)
                        res = std::max(res, std::abs(phi[i] - closed[i]));
                    table.add(suite, make_check("lee_matches_closed_form", p, res, 1e-8));
                } else {
                    table.add(suite, make_degenerate("lee_matches_closed_form", p, 1e-8));
                }
                const auto tr = lee_form_trace_route(chart, p);
                double res_tr = 0.0;
                for (std::size_t i = 0; i < phi.size(); ++i)
                    res_tr = std::max(res_tr, std::abs(phi[i] - tr[i]));
                table.add(suite, make_check("lee_trace_route_agreement", p, res_tr, 1e-10));

                const auto forms = connection_abc(chart, p);
                table.add(suite, make_check("connection_reconstruction", p,
                                            forms.reconstruction_residual, 1e-9));
                const auto st = chart.structure<double>(p);
                double res_abc = 0.0;
                const auto iphi = detail::structure_on_covector(st[0], phi);
                const auto jphi = detail::structure_on_covector(st[1], phi);
                const auto kphi = detail::structure_on_covector(st[2], phi);
                for (std::size_t i = 0; i < phi.size(); ++i) {
                    res_abc = std::max(res_abc, std::abs(forms.a[i] - iphi[i]));
                    res_abc = std::max(res_abc, std::abs(forms.b[i] - jphi[i]));
                    res_abc = std::max(res_abc, std::abs(forms.c[i] - kphi[i]));
                }
                table.add(suite, make_check("connection_forms_structure_lee", p, res_abc, 1e-8));
            }
        } else if (suite == "lemma12") {
            for (const auto& p : points) {
                table.add(suite, check_kahler_differentials(chart, p));
                table.add(suite, check_connection_curvature(chart, p));
            }
        } else if (suite == "eq25") {
            for (const auto& p : points)
                for (const auto& c : check_lee_derivative(chart, p)) table.add(suite, c);
        } else if (suite == "rprime") {
            for (const auto& p : points)
                for (const auto& c :
                     remainder_checks(chart, p, expected.rprime_zero, expected.closed_lee))
                    table.add(suite, c);
        } else if (suite == "closedlee") {
            std::vector<double> constants;
            int degenerate = 0;
            for (const auto& p : points) {
                const auto res = check_closed_lee_suite(chart, p);
                for (const auto& c : res.checks) table.add(suite, c);
                if (res.degenerate)
                    degenerate += 1;
                else
                    constants.push_back(res.ef_constant);
            }
            double cres = 0.0;
            if (!constants.empty()) {
                const double ref =
                    expected.ef_constant ? *expected.ef_constant : constants.front();
                for (double c : constants) cres = std::max(cres, std::abs(c - ref));
            }
            table.add_scalar(suite, "lee_energy_exp_constant", cres, 1e-7,
                             static_cast<int>(points.size()), degenerate);
        } else if (suite == "eq64") {
            for (const auto& p : points)
                for (const auto& c : check_commutators(chart, p)) table.add(suite, c);
        } else if (suite == "hkpot") {
            if (cfg.chart_name != "flat")
                throw ConfigError(
                    "suite 'hkpot' needs the flat chart (the only zoo chart with a bundled "
                    "potential)");
            const ScalarField mu = flat_hk_potential();
            for (const auto& p : points)
                for (const auto& c : check_hk_potential(chart, mu, p)) table.add(suite, c);
        } else if (suite == "thm2_roundtrip") {
            HyperKahlerTransform hk;
            try {
                hk = hyperkahler_transform(chart);
            } catch (const ChartError& e) {
                throw ConfigError(std::string("thm2_roundtrip: ") + e.what());
            }
            const MetricChart back = family_transform(hk.chart, hk.potential, 0.25 * hk.source_nu);
            for (const auto& p : points) table.add(suite, check_transform_roundtrip(chart, back, p));
            const int flat_points = std::min<int>(5, static_cast<int>(points.size()));
            for (int i = 0; i < flat_points; ++i) {
                const Point& p = points[i];
                if (expected.hk_image_flat) {
                    const double res = riemann(hk.chart, p).max_abs();
                    table.add(suite, make_check("thm2_image_flatness", p, res, 1e-7));
                }
                for (const auto& c : check_hk_potential(hk.chart, hk.potential, p))
                    table.add(suite, c);
            }
        } else if (suite == "fdcheck") {
            const int fd_points = std::min<int>(10, static_cast<int>(points.size()));
            for (int i = 0; i < fd_points; ++i)
                for (const auto& c : fd_metric_check(chart, points[i])) table.add(suite, c);
        }
    }

    report.checks = table.rows();
    report.overall_pass = true;
    for (const auto& c : report.checks) report.overall_pass = report.overall_pass && c.pass;

    const auto t1 = std::chrono::steady_clock::now();
    report.wall_clock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return report;
}

}  // namespace qkgeo
