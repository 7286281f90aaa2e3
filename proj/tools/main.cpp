// csvortex: shooting laboratory for the radial self-dual SU(3) Chern-Simons
// system. Subcommands: solve, scan, boundary, check, oracle.
//
// Exit codes: 0 ok, 1 I/O failure, 2 config error, 3 undetermined verdict,
// 4 blow-up verdict, 5 bad bisection bracket.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csvortex/diagnostics.hpp"
#include "csvortex/errors.hpp"
#include "csvortex/omega.hpp"
#include "csvortex/seed.hpp"

using nlohmann::json;
using namespace csvortex;

namespace {

constexpr int kOk = 0, kIoError = 1, kConfigError = 2, kUndetermined = 3, kBlowUp = 4,
              kBadBracket = 5;

struct Options {
    Params params;
    std::optional<double> alpha1, alpha2;
    std::optional<GridSpec> grid;
    std::optional<std::pair<InitialData, InitialData>> segment;
    double r0 = 1e-3;
    int iterations = 2;
    double rtol = 1e-10;
    double tmax = std::log(1e6);
    double boundary_tol = 1e-6;
    int checkpoints = 200;
    int threads = 0;
    std::string out;
    std::string inject;  // test hook: forces one named check to fail
    std::string oracle_bisect;
    double n = 0.0;      // oracle multiplicity
};

ScanOpts make_scan_opts(const Options& o) {
    ScanOpts s;
    s.r0 = o.r0;
    s.picard_iterations = o.iterations;
    s.integ.rtol = o.rtol;
    s.integ.t_max = o.tmax;
    s.threads = o.threads;
    return s;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17e", x);
    return buf;
}

int config_error(const std::string& field, const std::string& why) {
    std::cerr << "config error: " << field << ": " << why << "\n";
    return kConfigError;
}

bool parse_grid_string(const std::string& text, GridSpec& grid) {
    // lo:hi:n,lo:hi:n
    double a, b, c, d;
    int n1, n2;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d,%lf:%lf:%d", &a, &b, &n1, &c, &d, &n2) != 6)
        return false;
    grid = GridSpec{a, b, c, d, n1, n2};
    return true;
}

bool parse_segment_string(const std::string& text, std::pair<InitialData, InitialData>& seg) {
    // a1,a2:b1,b2
    double a, b, c, d;
    if (std::sscanf(text.c_str(), "%lf,%lf:%lf,%lf", &a, &b, &c, &d) != 4) return false;
    seg = {InitialData{a, b}, InitialData{c, d}};
    return true;
}

// JSON config file: provides defaults that explicit flags then override.
bool load_config_file(const std::string& path, Options& o, std::string& err) {
    std::ifstream in(path);
    if (!in) {
        err = "cannot open " + path;
        return false;
    }
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        err = e.what();
        return false;
    }
    if (j.contains("n1")) o.params.n1 = j["n1"].get<double>();
    if (j.contains("n2")) o.params.n2 = j["n2"].get<double>();
    if (j.contains("alpha1")) o.alpha1 = j["alpha1"].get<double>();
    if (j.contains("alpha2")) o.alpha2 = j["alpha2"].get<double>();
    if (j.contains("r0")) o.r0 = j["r0"].get<double>();
    if (j.contains("iterations")) o.iterations = j["iterations"].get<int>();
    if (j.contains("rtol")) o.rtol = j["rtol"].get<double>();
    if (j.contains("tmax")) o.tmax = j["tmax"].get<double>();
    if (j.contains("tol")) o.boundary_tol = j["tol"].get<double>();
    if (j.contains("checkpoints")) o.checkpoints = j["checkpoints"].get<int>();
    if (j.contains("threads")) o.threads = j["threads"].get<int>();
    if (j.contains("out")) o.out = j["out"].get<std::string>();
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        GridSpec spec;
        spec.alpha1_lo = g.at("alpha1").at(0).get<double>();
        spec.alpha1_hi = g.at("alpha1").at(1).get<double>();
        spec.alpha2_lo = g.at("alpha2").at(0).get<double>();
        spec.alpha2_hi = g.at("alpha2").at(1).get<double>();
        spec.n1 = g.at("resolution").at(0).get<int>();
        spec.n2 = g.at("resolution").at(1).get<int>();
        o.grid = spec;
    }
    if (j.contains("segment")) {
        const auto& s = j["segment"];
        o.segment = {InitialData{s.at("inside").at(0).get<double>(), s.at("inside").at(1).get<double>()},
                     InitialData{s.at("outside").at(0).get<double>(), s.at("outside").at(1).get<double>()}};
    }
    return true;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return bool(out);
}

std::string trajectory_csv(const Trajectory& traj, int checkpoints) {
    std::vector<double> ts;
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    const int n = std::max(2, checkpoints);
    for (int i = 0; i < n - 1; ++i) ts.push_back(std::min(t0 + i * (t1 - t0) / (n - 1), t1));
    ts.push_back(t1);
    auto states = resample(traj, ts);
    std::vector<double> pres;
    if (!traj.dense.empty() && std::isfinite(traj.alpha.alpha1))
        pres = pohozaev_residuals(traj, ts);

    std::string out = "r,t,u,v,ru_r,rv_r,f1,f2,pohozaev_residual\n";
    for (size_t i = 0; i < states.size(); ++i) {
        const State& s = states[i];
        const double res = pres.empty() ? std::nan("") : pres[i];
        out += fmt(std::exp(s.t)) + ',' + fmt(s.t) + ',' + fmt(s.u) + ',' + fmt(s.v) + ',' +
               fmt(s.p) + ',' + fmt(s.q) + ',' + fmt(f1(s.u, s.v)) + ',' + fmt(f2(s.u, s.v)) +
               ',' + fmt(res) + '\n';
    }
    return out;
}

json solve_json(const Classification& cls, const DiagnosticsReport& rep) {
    json j = to_json(rep);
    j["kind"] = to_string(cls.kind);
    j["reason"] = cls.reason;
    if (cls.fit) {
        j["beta1"] = cls.fit->beta1;
        j["beta2"] = cls.fit->beta2;
        j["fit_residual"] = cls.fit->residual;
    }
    return j;
}

int exit_code_for(Kind kind) {
    if (kind == Kind::Undetermined) return kUndetermined;
    if (kind == Kind::BlowUp) return kBlowUp;
    return kOk;
}

int run_solve(const Options& o, bool oracle_mode) {
    if (!oracle_mode) {
        if (!o.alpha1) return config_error("alpha1", "required for solve");
        if (!o.alpha2) return config_error("alpha2", "required for solve");
    }
    if (!(o.r0 > 0)) return config_error("r0", "must be positive");
    if (!(o.rtol > 0)) return config_error("rtol", "must be positive");
    if (!(o.tmax > std::log(o.r0))) return config_error("tmax", "must exceed ln(r0)");

    const ScanOpts opts = make_scan_opts(o);
    Trajectory traj;
    Classification cls;
    try {
        if (oracle_mode) {
            std::tie(traj, cls) = scalar_oracle(o.n, o.alpha1.value_or(0.0), opts);
        } else {
            std::tie(traj, cls) = solve_point(o.params, {*o.alpha1, *o.alpha2}, opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return kConfigError;
    }
    const DiagnosticsReport rep = build_report(traj, cls);

    const std::string prefix = o.out.empty() ? (oracle_mode ? "oracle" : "solve") : o.out;
    if (!write_file(prefix + ".csv", trajectory_csv(traj, o.checkpoints))) {
        std::cerr << "cannot write " << prefix << ".csv\n";
        return kIoError;
    }
    if (!write_file(prefix + ".json", solve_json(cls, rep).dump(2) + "\n")) {
        std::cerr << "cannot write " << prefix << ".json\n";
        return kIoError;
    }
    std::cout << "kind=" << to_string(cls.kind) << " reason=\"" << cls.reason << "\""
              << " samples=" << traj.samples.size() << " t_end=" << traj.t_end() << "\n";
    return exit_code_for(cls.kind);
}

int run_scan(const Options& o) {
    if (!o.grid) return config_error("grid", "required for scan");
    if (o.grid->n1 < 2 || o.grid->n2 < 2) return config_error("grid", "resolution must be >= 2");
    if (!(o.grid->alpha1_hi > o.grid->alpha1_lo))
        return config_error("grid", "alpha1 range is degenerate");
    if (!(o.grid->alpha2_hi > o.grid->alpha2_lo))
        return config_error("grid", "alpha2 range is degenerate");

    OmegaMap map = scan(o.params, *o.grid, make_scan_opts(o));

    const std::string prefix = o.out.empty() ? "scan" : o.out;
    if (!write_file(prefix + ".csv", to_csv(map))) {
        std::cerr << "cannot write " << prefix << ".csv\n";
        return kIoError;
    }
    if (!write_file(prefix + ".json", to_json(map).dump(2) + "\n")) {
        std::cerr << "cannot write " << prefix << ".json\n";
        return kIoError;
    }

    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& p : map.points) counts[int(p.kind)]++;
    std::cout << "scan " << map.points.size() << " points:";
    for (int k = 0; k < 6; ++k)
        if (counts[k]) std::cout << " " << to_string(Kind(k)) << "=" << counts[k];
    std::cout << "\n";
    return kOk;
}

int run_boundary(const Options& o) {
    if (!o.segment) return config_error("segment", "required for boundary");
    if (!(o.boundary_tol > 0)) return config_error("tol", "must be positive");
    BoundaryPoint bp;
    try {
        bp = bisect_boundary(o.params, o.segment->first, o.segment->second, o.boundary_tol,
                             make_scan_opts(o));
    } catch (const BadBracket& e) {
        std::cerr << e.what() << "\n";
        return kBadBracket;
    }
    const json j = to_json(bp);
    const std::string prefix = o.out.empty() ? "boundary" : o.out;
    if (!write_file(prefix + ".json", j.dump(2) + "\n")) {
        std::cerr << "cannot write " << prefix << ".json\n";
        return kIoError;
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
}

struct CheckLine {
    std::string name;
    bool applicable;
    bool pass;
    double value;
    double threshold;
};

void run_checks_on(const Trajectory& traj, const Classification& cls,
                   std::vector<CheckLine>& agg) {
    const DiagnosticsReport rep = build_report(traj, cls);
    auto add = [&](const std::string& name, bool applicable, bool pass, double value,
                   double threshold) {
        for (auto& line : agg) {
            if (line.name != name) continue;
            if (applicable) {
                line.applicable = true;
                line.pass = line.pass && pass;
                line.value = std::max(line.value, value);
                line.threshold = threshold;
            }
            return;
        }
        agg.push_back({name, applicable, applicable ? pass : true, value, threshold});
    };

    const bool has_quadrature = !traj.dense.empty();
    // the negativity theorem concerns entire solutions; blow-up data escapes it
    add("negativity", cls.kind != Kind::BlowUp, rep.negativity_ok,
        rep.negativity_ok ? 0.0 : 1.0, 0.5);
    add("pohozaev", has_quadrature, rep.pohozaev_max_rel_residual < 1e-6,
        rep.pohozaev_max_rel_residual, 1e-6);
    add("identity_i1", has_quadrature, rep.identity_residuals[0] < 1e-7,
        rep.identity_residuals[0], 1e-7);
    add("identity_i2", has_quadrature, rep.identity_residuals[1] < 1e-7,
        rep.identity_residuals[1], 1e-7);
    add("identity_i3", has_quadrature, rep.identity_residuals[2] < 1e-7,
        rep.identity_residuals[2], 1e-7);
    add("condition_star", true, !rep.condition_star_flag, rep.condition_star_flag ? 1.0 : 0.0,
        0.5);

    // Topological tails must be intersection-free past the a-priori radius.
    bool inter_ok = true;
    double inter_val = 0.0;
    if (cls.kind == Kind::Topological && rep.apriori_R0 && rep.last_intersection_t) {
        inter_ok = *rep.last_intersection_t <= std::log(*rep.apriori_R0);
        inter_val = inter_ok ? 0.0 : 1.0;
    }
    add("intersections", true, inter_ok, inter_val, 0.5);

    const bool divergent = cls.kind == Kind::NonTopological || cls.kind == Kind::MixedULimit ||
                           cls.kind == Kind::MixedVLimit;
    add("apriori_bound", divergent, rep.apriori_R0.has_value(),
        rep.apriori_R0.has_value() ? 0.0 : 1.0, 0.5);
    add("nontop_inequality", cls.kind == Kind::NonTopological && rep.nontop_inequality_margin,
        rep.nontop_inequality_margin.value_or(-1.0) > 0.0,
        -rep.nontop_inequality_margin.value_or(-1.0), 0.0);
    add("f_positive_tail", divergent, rep.f_positive_tail_t.has_value(),
        rep.f_positive_tail_t.has_value() ? 0.0 : 1.0, 0.5);
}

int run_check(const Options& o) {
    std::vector<CheckLine> agg;
    const ScanOpts opts = make_scan_opts(o);
    try {
        if (o.grid) {
            for (int j = 0; j < o.grid->n2; ++j) {
                for (int i = 0; i < o.grid->n1; ++i) {
                    const double a1 =
                        o.grid->alpha1_lo + i * (o.grid->alpha1_hi - o.grid->alpha1_lo) / (o.grid->n1 - 1);
                    const double a2 =
                        o.grid->alpha2_lo + j * (o.grid->alpha2_hi - o.grid->alpha2_lo) / (o.grid->n2 - 1);
                    auto [traj, cls] = solve_point(o.params, {a1, a2}, opts);
                    run_checks_on(traj, cls, agg);
                }
            }
        } else if (o.alpha1 && o.alpha2) {
            auto [traj, cls] = solve_point(o.params, {*o.alpha1, *o.alpha2}, opts);
            run_checks_on(traj, cls, agg);
        } else {
            return config_error("alpha1", "check needs either alpha or grid");
        }
    } catch (const std::exception& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return kConfigError;
    }

    if (!o.inject.empty()) {
        bool known = false;
        for (auto& line : agg) {
            if (line.name == o.inject) {
                line.pass = false;
                line.applicable = true;
                line.value = std::nan("");
                known = true;
            }
        }
        if (!known) return config_error("inject", "unknown check name " + o.inject);
        std::cout << "note: synthetic violation injected into '" << o.inject << "'\n";
    }

    bool all_pass = true;
    json checks = json::array();
    for (const auto& line : agg) {
        const char* status = !line.applicable ? "n/a " : (line.pass ? "PASS" : "FAIL");
        if (line.applicable && !line.pass) all_pass = false;
        std::cout << status << "  " << line.name;
        if (line.applicable) std::cout << "  value=" << line.value << " threshold=" << line.threshold;
        std::cout << "\n";
        checks.push_back({{"check", line.name},
                          {"applicable", line.applicable},
                          {"pass", line.pass || !line.applicable},
                          {"value", std::isfinite(line.value) ? json(line.value) : json()},
                          {"threshold", line.threshold}});
    }
    if (!o.out.empty()) {
        if (!write_file(o.out + ".json", checks.dump(2) + "\n")) {
            std::cerr << "cannot write " << o.out << ".json\n";
            return kIoError;
        }
    }
    std::cout << (all_pass ? "all checks passed" : "checks FAILED") << "\n";
    return all_pass ? kOk : kUndetermined;
}

int run_oracle(const Options& o) {
    if (!o.oracle_bisect.empty()) {
        double lo, hi;
        if (std::sscanf(o.oracle_bisect.c_str(), "%lf,%lf", &lo, &hi) != 2)
            return config_error("bisect", "expected lo,hi");
        try {
            const double astar = scalar_boundary_alpha(o.n, lo, hi, o.boundary_tol, make_scan_opts(o));
            json j{{"n", o.n}, {"alpha_star", astar}, {"tol", o.boundary_tol}};
            std::cout << j.dump(2) << "\n";
            if (!o.out.empty() && !write_file(o.out + ".json", j.dump(2) + "\n")) {
                std::cerr << "cannot write " << o.out << ".json\n";
                return kIoError;
            }
            return kOk;
        } catch (const BadBracket& e) {
            std::cerr << e.what() << "\n";
            return kBadBracket;
        }
    }
    if (!o.alpha1) return config_error("alpha", "required for oracle");
    return run_solve(o, /*oracle_mode=*/true);
}

} // namespace

int main(int argc, char** argv) {
    Options o;

    // A JSON config file provides defaults; explicit flags override them.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::string err;
            if (!load_config_file(argv[i + 1], o, err)) return config_error("config", err);
        }
    }

    CLI::App app{"radial SU(3) Chern-Simons shooting laboratory"};
    app.require_subcommand(1);

    std::string grid_str, segment_str, config_path;
    double alpha1 = 0, alpha2 = 0, alpha_scalar = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--n1", o.params.n1, "vortex multiplicity N1");
        cmd->add_option("--n2", o.params.n2, "vortex multiplicity N2");
        cmd->add_option("--r0", o.r0, "seed radius");
        cmd->add_option("--iterations", o.iterations, "Picard iterations for the seed");
        cmd->add_option("--rtol", o.rtol, "integrator relative tolerance");
        cmd->add_option("--tmax", o.tmax, "integration horizon in t = ln r");
        cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
        cmd->add_option("--out", o.out, "output path prefix");
    };

    CLI::App* solve = app.add_subcommand("solve", "integrate and classify one shooting point");
    add_common(solve);
    auto* sa1 = solve->add_option("--alpha1", alpha1, "shooting parameter alpha1");
    auto* sa2 = solve->add_option("--alpha2", alpha2, "shooting parameter alpha2");
    solve->add_option("--checkpoints", o.checkpoints, "log-spaced output rows");

    CLI::App* scan_cmd = app.add_subcommand("scan", "classify a grid over the (alpha1, alpha2) plane");
    add_common(scan_cmd);
    scan_cmd->add_option("--grid", grid_str, "grid as lo:hi:n,lo:hi:n");

    CLI::App* boundary = app.add_subcommand("boundary", "bisect the boundary of Omega on a segment");
    add_common(boundary);
    boundary->add_option("--segment", segment_str, "segment as a1,a2:b1,b2 (inside:outside)");
    boundary->add_option("--tol", o.boundary_tol, "bracket tolerance");

    CLI::App* check = app.add_subcommand("check", "run the theorem-conformance suite");
    add_common(check);
    auto* ca1 = check->add_option("--alpha1", alpha1, "shooting parameter alpha1");
    auto* ca2 = check->add_option("--alpha2", alpha2, "shooting parameter alpha2");
    check->add_option("--grid", grid_str, "grid as lo:hi:n,lo:hi:n");
    check->add_option("--inject", o.inject, "test hook: force the named check to fail");

    CLI::App* oracle = app.add_subcommand("oracle", "scalar u=v reduction runs and bisection");
    add_common(oracle);
    oracle->add_option("--n", o.n, "scalar vortex multiplicity");
    auto* oa = oracle->add_option("--alpha", alpha_scalar, "scalar shooting parameter");
    oracle->add_option("--bisect", o.oracle_bisect, "bisect alpha in lo,hi");
    oracle->add_option("--tol", o.boundary_tol, "bisection tolerance");
    oracle->add_option("--checkpoints", o.checkpoints, "log-spaced output rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    if (sa1->count() || ca1->count()) o.alpha1 = alpha1;
    if (sa2->count() || ca2->count()) o.alpha2 = alpha2;
    if (oa->count()) o.alpha1 = alpha_scalar;
    if (!grid_str.empty()) {
        GridSpec g;
        if (!parse_grid_string(grid_str, g)) return config_error("grid", "expected lo:hi:n,lo:hi:n");
        o.grid = g;
    }
    if (!segment_str.empty()) {
        std::pair<InitialData, InitialData> seg;
        if (!parse_segment_string(segment_str, seg))
            return config_error("segment", "expected a1,a2:b1,b2");
        o.segment = seg;
    }

    try {
        if (solve->parsed()) return run_solve(o, false);
        if (scan_cmd->parsed()) return run_scan(o);
        if (boundary->parsed()) return run_boundary(o);
        if (check->parsed()) return run_check(o);
        if (oracle->parsed()) return run_oracle(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kConfigError;
}
