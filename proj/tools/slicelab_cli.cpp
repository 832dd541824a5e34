// Command-line front end: measures of star bodies, central sections,
// box factorizations and the inequality harness.
//
// Exit codes: 0 success, 1 a requested check failed (reports are still
// written), 2 usage or input errors.

#include "slicelab/config.hpp"
#include "slicelab/factorization.hpp"
#include "slicelab/harness.hpp"
#include "slicelab/report.hpp"
#include "slicelab/sections.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace slicelab;

std::vector<double> parse_vector(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse component '" +
                                        item + "' in '" + text + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty vector");
    return out;
}

ordered_json estimate_json(const Estimate& e) {
    return ordered_json{{"value", e.value},
                        {"err", e.err},
                        {"method", e.method},
                        {"n_evals", e.n_evals}};
}

std::string csv_cell(const ordered_json& v) {
    std::string cell;
    if (v.is_string()) {
        cell = v.get<std::string>();
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) cell += ';';
            cell += v[i].dump();
        }
    } else {
        cell = v.dump();
    }
    if (cell.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : cell) {
            q += c;
            if (c == '"') q += '"';
        }
        q += '"';
        return q;
    }
    return cell;
}

// one header row plus one data row; nested objects are flattened with dots
std::string flat_csv(const ordered_json& j) {
    std::string head, row;
    bool first = true;
    std::function<void(const std::string&, const ordered_json&)> emit =
        [&](const std::string& key, const ordered_json& v) {
            if (v.is_object()) {
                for (const auto& [k, sub] : v.items()) emit(key.empty() ? k : key + "." + k, sub);
                return;
            }
            if (!first) {
                head += ',';
                row += ',';
            }
            first = false;
            head += key;
            row += csv_cell(v);
        };
    emit("", j);
    return head + "\n" + row + "\n";
}

struct OutputSink {
    std::string format = "json";  // json | csv
    std::string out_dir;          // also write a file there when set

    void deliver(const std::string& name, const ordered_json& j) const {
        const std::string text = format == "csv" ? flat_csv(j) : j.dump(2) + "\n";
        std::cout << text;
        if (!out_dir.empty()) {
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            const fs::path path = fs::path(out_dir) / (name + (format == "csv" ? ".csv" : ".json"));
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot write " + path.string());
            f << text;
        }
    }
};

struct GlobalArgs {
    std::string body_json;
    std::string density_json;
    QuadScheme quad;
    std::string engine = "deterministic";
    SphereOptConfig search;
    std::string orthant = "auto";
    OutputSink sink;

    StarBody body() const {
        if (body_json.empty()) throw std::invalid_argument("--body is required for this command");
        return parse_body_json(body_json);
    }
    DensitySpec density_spec() const {
        if (density_json.empty()) return DensitySpec{};
        return parse_density_json(density_json);
    }
    QuadScheme scheme() const {
        QuadScheme s = quad;
        s.engine = engine_from_string(engine);
        return s;
    }
    CheckOptions check_options() const {
        CheckOptions co;
        co.search = search;
        if (orthant == "auto") co.orthant = OrthantPolicy::automatic;
        else if (orthant == "on") co.orthant = OrthantPolicy::on;
        else if (orthant == "off") co.orthant = OrthantPolicy::off;
        else throw std::invalid_argument("--orthant must be auto, on or off");
        return co;
    }
};

ordered_json base_output(const std::string& command, const StarBody& body,
                         const Density& d, const QuadScheme& s) {
    return ordered_json{{"command", command},
                        {"body", body.label()},
                        {"density", d.label()},
                        {"n", body.dim()},
                        {"engine", engine_to_string(s.engine)},
                        {"seed", s.seed}};
}

int cmd_volume(const GlobalArgs& g) {
    const StarBody body = g.body();
    const Density d = materialize(g.density_spec(), body.dim());
    const QuadScheme s = g.scheme();
    const Estimate e = integrate_body(body, d, s);
    ordered_json j = base_output("volume", body, d, s);
    j["result"] = estimate_json(e);
    g.sink.deliver("volume", j);
    return 0;
}

int cmd_section(const GlobalArgs& g, const std::string& xi_text) {
    const StarBody body = g.body();
    const Density d = materialize(g.density_spec(), body.dim());
    const QuadScheme s = g.scheme();
    std::vector<double> xi = parse_vector(xi_text, "--xi");
    if (xi.size() != body.dim())
        throw std::invalid_argument("--xi has " + std::to_string(xi.size()) +
                                    " components, body has dimension " +
                                    std::to_string(body.dim()));
    const double norm = std::sqrt(std::inner_product(xi.begin(), xi.end(), xi.begin(), 0.0));
    if (!(norm > 0)) throw std::invalid_argument("--xi must be a nonzero vector");
    for (double& c : xi) c /= norm;
    const Estimate e = integrate_section(body, d, xi, s);
    ordered_json j = base_output("section", body, d, s);
    j["xi"] = xi;
    j["result"] = estimate_json(e);
    g.sink.deliver("section", j);
    return 0;
}

int cmd_max_section(const GlobalArgs& g) {
    const StarBody body = g.body();
    const Density d = materialize(g.density_spec(), body.dim());
    const QuadScheme s = g.scheme();
    const CheckOptions co = g.check_options();
    const MaxSectionResult r = max_section(body, d, s, co.search, co.orthant);
    ordered_json j = base_output("max-section", body, d, s);
    j["xi_star"] = r.xi_star;
    j["starts"] = r.starts;
    j["result"] = estimate_json(r.value);
    g.sink.deliver("max-section", j);
    return 0;
}

int cmd_intersection_body(const GlobalArgs& g, const std::string& dirs_text) {
    const StarBody body = g.body();
    const Density d = materialize(g.density_spec(), body.dim());
    const QuadScheme s = g.scheme();
    const StarBody ib = intersection_body_of(body, d, s);
    ordered_json rows = ordered_json::array();
    std::stringstream ss(dirs_text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const std::vector<double> u = parse_vector(part, "--dirs");
        if (u.size() != body.dim())
            throw std::invalid_argument("--dirs: direction '" + part + "' has " +
                                        std::to_string(u.size()) + " components, body has dimension " +
                                        std::to_string(body.dim()));
        rows.push_back(ordered_json{{"dir", u}, {"radius", ib.radial_ray(u)}});
    }
    if (rows.empty()) throw std::invalid_argument("--dirs: no directions given");
    ordered_json j = base_output("intersection-body", body, d, s);
    j["sections"] = rows;
    g.sink.deliver("intersection-body", j);
    return 0;
}

int cmd_lozanovskii(const GlobalArgs& g, double tol) {
    const StarBody body = g.body();
    const SandwichReport r = lozanovskii_box(body, tol);
    const std::size_t n = body.dim();
    double log_prod = 0.0;
    for (double t : r.t) log_prod += std::log(t);
    // |2 diag(t) B_1-box sandwich| root used by the harness bound
    const double kroot =
        2.0 * static_cast<double>(n) *
        std::exp(log_prod / static_cast<double>(n) - std::lgamma(static_cast<double>(n) + 1) / static_cast<double>(n));
    ordered_json j{{"command", "lozanovskii"},
                   {"body", body.label()},
                   {"n", n},
                   {"t", r.t},
                   {"inner_margin", r.inner_margin},
                   {"inner_ok", r.inner_ok},
                   {"outer_max", r.outer_max},
                   {"outer_ok", r.outer_ok},
                   {"outer_volume_root", kroot}};
    g.sink.deliver("lozanovskii", j);
    return (r.inner_ok && r.outer_ok) ? 0 : 1;
}

int cmd_john(const GlobalArgs& g, int iters) {
    const StarBody body = g.body();
    const std::vector<double> axes = john_diagonal_ellipsoid(body, iters);
    double vol = ball_volume(body.dim());
    for (double a : axes) vol *= a;
    ordered_json j{{"command", "john"},
                   {"body", body.label()},
                   {"n", body.dim()},
                   {"axes", axes},
                   {"ellipsoid_volume", vol}};
    g.sink.deliver("john", j);
    return 0;
}

int cmd_mahler(const GlobalArgs& g) {
    const StarBody body = g.body();
    const QuadScheme s = g.scheme();
    double rel_err = 0.0;
    const double m = mahler_volume(body, s, &rel_err);
    const double ball = ball_volume(body.dim());
    ordered_json j{{"command", "mahler"},
                   {"body", body.label()},
                   {"n", body.dim()},
                   {"engine", engine_to_string(s.engine)},
                   {"mahler", m},
                   {"rel_err", rel_err},
                   {"santalo_ratio", m / (ball * ball)}};
    g.sink.deliver("mahler", j);
    return 0;
}

// single-cell experiment so seeds and skip rules match `run` exactly
int cmd_check(const GlobalArgs& g, const std::string& id) {
    ExperimentConfig cfg;
    cfg.bodies = {g.body()};
    cfg.densities = {g.density_spec()};
    cfg.checks = {id};
    cfg.quad = g.scheme();
    cfg.options = g.check_options();
    const ExperimentRun run = run_experiment(cfg);
    for (const std::string& note : run.notices) std::cerr << "note: " << note << "\n";
    if (run.reports.empty())
        throw std::invalid_argument("check '" + id + "' does not apply to this body");
    const InequalityReport& r = run.reports.front();
    if (g.sink.format == "csv") std::cout << summary_csv(run.reports);
    else std::cout << report_json(r) << "\n";
    if (!g.sink.out_dir.empty()) write_experiment_reports(run, g.sink.out_dir);
    return run.all_pass ? 0 : 1;
}

int cmd_run(GlobalArgs& g, const std::string& config_path, const CLI::App& app) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    // command-line values override the file only when given explicitly
    if (app.count("--engine")) cfg.quad.engine = engine_from_string(g.engine);
    if (app.count("--seed")) cfg.quad.seed = g.quad.seed;
    if (app.count("--mc-samples")) cfg.quad.mc_samples = g.quad.mc_samples;
    if (app.count("--radial-nodes")) cfg.quad.radial_nodes = g.quad.radial_nodes;
    if (app.count("--sphere-nodes")) cfg.quad.sphere_nodes = g.quad.sphere_nodes;
    if (app.count("--threads")) cfg.quad.threads = g.quad.threads;
    if (app.count("--target-rel-err")) cfg.quad.target_rel_err = g.quad.target_rel_err;
    if (app.count("--starts")) cfg.options.search.starts = g.search.starts;
    if (app.count("--orthant")) cfg.options.orthant = g.check_options().orthant;

    const ExperimentRun run = run_experiment(cfg);
    const std::string out = g.sink.out_dir.empty() ? std::string("slicelab-out") : g.sink.out_dir;
    write_experiment_reports(run, out);

    for (const std::string& note : run.notices) std::cerr << "note: " << note << "\n";
    if (g.sink.format == "csv") {
        std::cout << summary_csv(run.reports);
    } else {
        std::size_t failed = 0;
        for (const InequalityReport& r : run.reports) failed += r.pass ? 0 : 1;
        ordered_json j{{"command", "run"},
                       {"config", config_path},
                       {"out", out},
                       {"cells", run.reports.size()},
                       {"failed", failed},
                       {"all_pass", run.all_pass},
                       {"notices", run.notices}};
        std::cout << j.dump(2) << "\n";
    }
    for (const InequalityReport& r : run.reports) {
        std::fprintf(stderr, "[%s] %s  %s  %s  ratio=%.6g  budget=%.2g%s\n",
                     r.pass ? "pass" : "FAIL", r.inequality_id.c_str(),
                     r.body_label.c_str(), r.density_label.c_str(), r.ratio,
                     r.error_budget, r.retried ? "  (retried)" : "");
    }
    return run.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measures of convex bodies, central hyperplane sections and "
                 "section-based inequality checks"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--body", g.body_json, "Body as inline JSON, e.g. '{\"kind\":\"lp\",\"n\":3,\"p\":1}'");
    app.add_option("--density", g.density_json,
                   "Density as inline JSON, e.g. '{\"kind\":\"gaussian\",\"sigma\":1}' (default lebesgue)");
    app.add_option("--engine", g.engine, "deterministic | monte_carlo | grid_oracle")
        ->default_str("deterministic");
    app.add_option("--seed", g.quad.seed, "Seed for Monte Carlo sampling and searches");
    app.add_option("--mc-samples", g.quad.mc_samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    app.add_option("--radial-nodes", g.quad.radial_nodes, "Gauss-Legendre nodes per ray")
        ->check(CLI::PositiveNumber);
    app.add_option("--sphere-nodes", g.quad.sphere_nodes,
                   "Gauss-Legendre order per sphere chart coordinate (0 = per-dimension default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--threads", g.quad.threads, "Worker threads (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--target-rel-err", g.quad.target_rel_err,
                   "Relative error target (0 = engine default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--starts", g.search.starts, "Search restarts for section maximization (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--orthant", g.orthant, "Restrict searches to one orthant: auto | on | off")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    app.add_option("--out", g.sink.out_dir, "Directory for output files");
    app.add_option("--format", g.sink.format, "Stdout format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* volume = app.add_subcommand("volume", "Integral of the density over the body");
    auto* section = app.add_subcommand("section", "Integral over a central hyperplane section");
    std::string xi_text;
    section->add_option("--xi", xi_text, "Section normal, comma separated, e.g. 1,0,0")->required();
    auto* maxsec = app.add_subcommand("max-section", "Largest central hyperplane section");
    auto* ibody = app.add_subcommand("intersection-body",
                                     "Radii of the section-measure body along given directions");
    std::string dirs_text;
    ibody->add_option("--dirs", dirs_text, "Semicolon-separated directions, e.g. '1,0,0;0,1,0'")
        ->required();
    auto* loz = app.add_subcommand("lozanovskii",
                                   "Axis-aligned box with box ⊆ body ⊆ n·(box-scaled cross-polytope)");
    double loz_tol = 1e-10;
    loz->add_option("--tol", loz_tol, "Optimizer movement tolerance")->check(CLI::PositiveNumber);
    auto* john = app.add_subcommand("john", "Largest inscribed axis-aligned ellipsoid");
    int john_iters = 1200;
    john->add_option("--iters", john_iters, "Ascent iterations")->check(CLI::PositiveNumber);
    auto* mahler = app.add_subcommand("mahler", "Volume product |K| · |K°|");
    auto* check = app.add_subcommand("check", "Run one inequality check on a body");
    std::string check_id;
    check->add_option("id", check_id, "eq1 | eq2 | eq3 | prop1 | thm2")->required();
    auto* run = app.add_subcommand("run", "Run every check cell of a JSON experiment config");
    std::string config_path;
    run->add_option("config", config_path, "Path to the experiment JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (volume->parsed()) return cmd_volume(g);
        if (section->parsed()) return cmd_section(g, xi_text);
        if (maxsec->parsed()) return cmd_max_section(g);
        if (ibody->parsed()) return cmd_intersection_body(g, dirs_text);
        if (loz->parsed()) return cmd_lozanovskii(g, loz_tol);
        if (john->parsed()) return cmd_john(g, john_iters);
        if (mahler->parsed()) return cmd_mahler(g);
        if (check->parsed()) return cmd_check(g, check_id);
        if (run->parsed()) return cmd_run(g, config_path, app);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
