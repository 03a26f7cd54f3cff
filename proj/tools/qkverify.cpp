// qkverify: run identity suites of the quaternionic-Kahler verification
// engine over seeded sample points and emit a machine-readable report.
//
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 config or
// usage error.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkgeo/qkgeo.hpp"

namespace {

std::string iso_timestamp() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --tol accepts either NAME=VALUE (per-identity override, repeatable) or a
// plain VALUE used as the default tolerance for every check.
void parse_tolerances(const std::vector<std::string>& specs, qkgeo::RunConfig& cfg) {
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            cfg.global_tol = std::stod(s);
        } else {
            cfg.tol_overrides[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        }
    }
}

void load_config_file(const std::string& path, qkgeo::RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw qkgeo::ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    in >> j;
    if (j.contains("chart")) cfg.chart_name = j["chart"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("p")) cfg.p = j["p"].get<double>();
    if (j.contains("nu")) cfg.nu = j["nu"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("points")) cfg.num_points = j["points"].get<int>();
    if (j.contains("suites")) cfg.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
    if (j.contains("tolerance_default")) cfg.global_tol = j["tolerance_default"].get<double>();
    if (j.contains("tolerance_overrides"))
        for (const auto& [k, v] : j["tolerance_overrides"].items())
            cfg.tol_overrides[k] = v.get<double>();
}

int run_verify(const qkgeo::RunConfig& cfg) {
    qkgeo::VerificationReport report = qkgeo::run(cfg);
    report.timestamp = iso_timestamp();

    for (const auto& c : report.checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.suite << "/" << c.identity
                  << "  max_residual=" << c.max_residual << "  tol=" << c.tolerance << "  points="
                  << c.points;
        if (c.degenerate_points > 0) std::cout << " (" << c.degenerate_points << " degenerate)";
        std::cout << "\n";
    }
    std::cout << (report.overall_pass ? "OVERALL PASS" : "OVERALL FAIL") << "\n";

    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path);
        if (!out) throw qkgeo::ConfigError("cannot write report to '" + cfg.output_path + "'");
        out << report.to_string();
    }
    return report.overall_pass ? 0 : 1;
}

int run_list() {
    for (const auto& info : qkgeo::list_suites()) {
        std::cout << info.name << (info.needs_chart ? "" : "  (chartless)") << "\n    "
                  << info.description << "\n    identities:";
        for (const auto& id : info.identities) std::cout << " " << id;
        std::cout << "\n";
    }
    std::cout << "charts:";
    for (const auto& name : qkgeo::zoo_names()) std::cout << " " << name;
    std::cout << "\n";
    return 0;
}

// Report which orientation conventions the build actually realizes, pinned
// by the two calibration quantities with known values.
int run_calibrate() {
    using namespace qkgeo;
    bool ok = true;

    for (int n = 1; n <= 3; ++n) {
        const double s0 = scalar_curvature_flat(model_curvature_tensor(n));
        const double want = 16.0 * n * (n + 2);
        const bool pass = std::abs(s0 - want) <= 1e-10 * want;
        ok = ok && pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  model tensor scalar curvature n=" << n << ": "
                  << s0 << " (expected " << want << ")\n";
    }

    const ZooEntry hp = projective_chart(2);
    Rng rng(kDefaultSeed);
    const Point p = hp.sampler(rng);
    const double nu = reduced_scalar(hp.chart, p);
    const bool nu_ok = std::abs(nu - 4.0) < 1e-7;
    ok = ok && nu_ok;
    std::cout << (nu_ok ? "PASS" : "FAIL")
              << "  curvature sign convention: reduced scalar of the projective chart = " << nu
              << " (expected +4; R(X,Y) = [nabla_X,nabla_Y] - nabla_[X,Y], "
              << "s = sum R(e_i,e_j,e_j,e_i))\n";

    const auto forms = connection_abc(hp.chart, p);
    const auto phi = lee_form(hp.chart, p);
    const auto st = hp.chart.structure<double>(p);
    double res = 0.0;
    const auto iphi = detail::structure_on_covector(st[0], phi);
    for (std::size_t i = 0; i < phi.size(); ++i)
        res = std::max(res, std::abs(forms.a[i] - iphi[i]));
    const bool abc_ok = res < 1e-8;
    ok = ok && abc_ok;
    std::cout << (abc_ok ? "PASS" : "FAIL")
              << "  connection-form convention: a = I phi on the projective chart (residual " << res
              << "; columns nabla I = cJ - bK, nabla J = aK - cI, nabla K = bI - aJ)\n";

    std::cout << (ok ? "calibration confirmed" : "calibration FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification of quaternionic-Kahler metric identities"};
    app.require_subcommand(1);

    qkgeo::RunConfig cfg;
    if (const char* env_seed = std::getenv("QKVERIFY_SEED")) {
        try {
            cfg.seed = std::stoull(env_seed);
        } catch (...) {
            std::cerr << "invalid QKVERIFY_SEED value '" << env_seed << "'\n";
            return 2;
        }
    }

    std::string config_path;
    std::vector<std::string> tol_specs;

    CLI::App* verify = app.add_subcommand("verify", "run identity suites over seeded points");
    verify->add_option("--config", config_path, "JSON config file (flags win over file values)");
    verify->add_option("--chart", cfg.chart_name, "chart name (see 'list')");
    verify->add_option("--n", cfg.n, "quaternionic dimension (1..3; bundle chart needs >= 2)");
    verify->add_option("--p", cfg.p, "family parameter for the 'gp' chart");
    verify->add_option("--nu", cfg.nu, "reduced scalar curvature for the 'thm6' chart (< 0)");
    verify->add_option("--seed", cfg.seed, "PRNG seed (SplitMix64 stream)");
    verify->add_option("--points", cfg.num_points, "sample points (or cases for 'algebra')");
    verify->add_option("--suite", cfg.suites, "suite name, repeatable (see 'list')");
    verify->add_option("--tol", tol_specs, "NAME=VALUE per-identity override or plain VALUE");
    verify->add_option("--out", cfg.output_path, "write the JSON report to this path");

    CLI::App* list = app.add_subcommand("list", "catalogue of suites, identities and charts");
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "run the orientation calibrations and print conventions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return run_list();
        if (calibrate->parsed()) return run_calibrate();

        // flags win over the config file: parse the file into a fresh config,
        // then re-apply every flag that was given on the command line
        if (!config_path.empty()) {
            qkgeo::RunConfig file_cfg;
            file_cfg.seed = cfg.seed;  // env default
            load_config_file(config_path, file_cfg);
            for (const CLI::Option* opt : verify->get_options()) {
                if (opt->count() == 0) continue;
                const std::string name = opt->get_name();
                if (name == "--chart") file_cfg.chart_name = cfg.chart_name;
                else if (name == "--n") file_cfg.n = cfg.n;
                else if (name == "--p") file_cfg.p = cfg.p;
                else if (name == "--nu") file_cfg.nu = cfg.nu;
                else if (name == "--seed") file_cfg.seed = cfg.seed;
                else if (name == "--points") file_cfg.num_points = cfg.num_points;
                else if (name == "--suite") file_cfg.suites = cfg.suites;
                else if (name == "--out") file_cfg.output_path = cfg.output_path;
            }
            cfg = file_cfg;
        }
        parse_tolerances(tol_specs, cfg);
        return run_verify(cfg);
    } catch (const qkgeo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
