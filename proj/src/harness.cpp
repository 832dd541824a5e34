#include "slicelab/harness.hpp"

#include "slicelab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <utility>

namespace slicelab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;
constexpr double kBudgetSlack = 1e-3;

double log_ball_volume(double n) {
    return 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0);
}

double rel(const Estimate& e) {
    return e.value != 0.0 ? std::fabs(e.err / e.value) : std::fabs(e.err);
}

// 4x effort: quadruple samples, or double the radial and sphere orders. An
// explicit sphere order applies to body and section charts alike, so the
// baseline is the larger of the two defaults.
QuadScheme boosted(QuadScheme s, std::size_t n) {
    if (s.engine == Engine::monte_carlo) {
        s.mc_samples *= 4;
        return s;
    }
    s.radial_nodes *= 2;
    int eff = s.sphere_nodes;
    if (eff <= 0)
        eff = std::max(default_sphere_order(n), default_sphere_order(n - 1));
    s.sphere_nodes = 2 * eff;
    return s;
}

CheckOptions boosted_options(CheckOptions co, std::size_t n) {
    int starts = co.search.starts > 0 ? co.search.starts : 8 * int(n + 1);
    co.search.starts = 2 * starts;
    return co;
}

void base_fields(InequalityReport& r, std::string id, const StarBody& body,
                 const std::string& density_label, const QuadScheme& s) {
    r.inequality_id = std::move(id);
    r.body_label = body.label();
    r.density_label = density_label;
    r.n = body.dim();
    r.seed = s.seed;
    r.engine = engine_to_string(s.engine);
}

InequalityReport hyperplane_check(std::string id, double constant,
                                  const StarBody& body, const Density& d,
                                  const QuadScheme& s, const CheckOptions& co,
                                  bool with_box) {
    const std::size_t n = body.dim();
    if (n < 2)
        throw std::invalid_argument("hyperplane checks need dimension >= 2");
    if (d.dim() != n) throw std::invalid_argument("density dimension mismatch");

    InequalityReport r;
    base_fields(r, std::move(id), body, d.label(), s);
    r.constant = constant;

    Estimate mu = integrate_body(body, d, s);
    Estimate vol = mu;
    if (d.kind() != DensityKind::lebesgue)
        vol = integrate_body(body, builtin_density(DensityKind::lebesgue, 0.0, n), s);
    MaxSectionResult ms = max_section(body, d, s, co.search, co.orthant);

    const double vol_root = std::pow(vol.value, 1.0 / double(n));
    r.lhs = mu;
    r.rhs_components["constant"] = constant;
    r.rhs_components["max_section"] = ms.value.value;
    r.rhs_components["vol_root"] = vol_root;
    r.rhs = constant * ms.value.value * vol_root;
    r.ratio = r.lhs.value / r.rhs;
    r.error_budget = rel(mu) + rel(ms.value) + rel(vol) / double(n) + kBudgetSlack;
    r.pass = r.ratio <= 1.0 + r.error_budget;
    r.xi_star = ms.xi_star;
    r.extras["empirical_constant"] = r.ratio * constant;
    r.extras["c_n"] = section_constant(n);

    if (with_box) {
        // route through the box factorization: the body sits inside
        // K = n diag(t) B_1^n, whose volume root is 2n (prod t)^{1/n}/(n!)^{1/n}
        SandwichReport box = lozanovskii_box(body);
        double log_prod = 0.0;
        for (double ti : box.t) log_prod += std::log(ti);
        const double kroot = 2.0 * double(n) *
                             std::exp(log_prod / double(n) -
                                      std::lgamma(double(n) + 1.0) / double(n));
        const double cst = double(n) / double(n - 1) * section_constant(n);
        r.box_t = box.t;
        r.extras["sandwich_vol_root"] = kroot;
        r.extras["sandwich_rhs"] = cst * ms.value.value * kroot;
        r.extras["sandwich_constant"] = cst * kroot / vol_root;
        r.extras["sandwich_ok"] = box.inner_ok && box.outer_ok ? 1.0 : 0.0;
    }
    return r;
}

}  // namespace

double ball_volume(std::size_t n) { return std::exp(log_ball_volume(double(n))); }

double section_constant(std::size_t n) {
    if (n < 2) throw std::invalid_argument("section constant needs n >= 2");
    const double nn = double(n);
    return std::exp((nn - 1.0) / nn * log_ball_volume(nn) - log_ball_volume(nn - 1.0));
}

double general_constant(std::size_t n) {
    return std::sqrt(double(n)) * double(n) / double(n - 1) * section_constant(n);
}

InequalityReport check_hyperplane_unconditional(const StarBody& body,
                                                const Density& d,
                                                const QuadScheme& s,
                                                const CheckOptions& co) {
    if (!body.flags().is_convex || !body.flags().is_unconditional)
        throw std::invalid_argument(
            "the unconditional hyperplane check needs an unconditional convex body");
    InequalityReport r =
        hyperplane_check("eq2_unconditional", kE, body, d, s, co, true);
    if (!r.pass) {
        r = hyperplane_check("eq2_unconditional", kE, body, d,
                             boosted(s, body.dim()), boosted_options(co, body.dim()),
                             true);
        r.retried = true;
    }
    return r;
}

InequalityReport check_hyperplane_general(const StarBody& body, const Density& d,
                                          const QuadScheme& s,
                                          const CheckOptions& co) {
    if (!body.flags().is_convex)
        throw std::invalid_argument("the general hyperplane check needs a convex body");
    const double cst = general_constant(body.dim());
    InequalityReport r = hyperplane_check("eq3_general", cst, body, d, s, co, false);
    if (!r.pass) {
        r = hyperplane_check("eq3_general", cst, body, d, boosted(s, body.dim()),
                             boosted_options(co, body.dim()), false);
        r.retried = true;
    }
    return r;
}

InequalityReport check_hyperplane_volume(const StarBody& body, const QuadScheme& s,
                                         const CheckOptions& co) {
    if (!body.flags().is_convex)
        throw std::invalid_argument("the volume hyperplane check needs a convex body");
    const bool uncond = body.flags().is_unconditional;
    const double cst = uncond ? kE : general_constant(body.dim());
    Density leb = builtin_density(DensityKind::lebesgue, 0.0, body.dim());
    InequalityReport r = hyperplane_check("eq1_volume", cst, body, leb, s, co, uncond);
    if (!r.pass) {
        r = hyperplane_check("eq1_volume", cst, body, leb, boosted(s, body.dim()),
                             boosted_options(co, body.dim()), uncond);
        r.retried = true;
    }
    r.extras["used_general_constant"] = uncond ? 0.0 : 1.0;
    return r;
}

StabilitySpec direct_stability(StarBody body,
                               std::function<double(std::span<const double>)> f,
                               std::string f_label) {
    if (!f) throw std::invalid_argument("stability spec needs a function");
    return StabilitySpec{std::move(body), std::nullopt, std::nullopt, std::move(f),
                         std::move(f_label)};
}

StabilitySpec composite_stability(StarBody body, StarBody inner, Density excess) {
    if (inner.dim() != body.dim() || excess.dim() != body.dim())
        throw std::invalid_argument("stability spec dimension mismatch");
    return StabilitySpec{std::move(body), std::move(inner), std::move(excess),
                         nullptr, std::string{}};
}

namespace {

InequalityReport stability_once(const StabilitySpec& spec, const QuadScheme& s,
                                const CheckOptions& co) {
    const StarBody& K = spec.body;
    const std::size_t n = K.dim();

    // the excess lives on `domain`: K itself in direct mode, the inner body
    // in composite mode
    const StarBody& domain = spec.composite() ? *spec.inner : K;
    std::optional<Density> h = spec.excess;
    std::string density_label;
    if (spec.composite()) {
        density_label = h->label() + " on " + domain.label();
    } else {
        auto f = spec.f;
        h = density_from_function(
            n,
            [f](std::span<const double> x) { return std::max(f(x) - 1.0, 0.0); },
            spec.f_label + " - 1");
        density_label = spec.f_label;
    }

    InequalityReport r;
    base_fields(r, "prop1_stability", K, density_label, s);

    Density leb = builtin_density(DensityKind::lebesgue, 0.0, n);
    Estimate volK = integrate_body(K, leb, s);
    Estimate mass = integrate_body(domain, *h, s);
    MaxSectionResult ms = max_section(domain, *h, s, co.search, co.orthant);

    const double eps = ms.value.value;
    const double vol_root = std::pow(volK.value, 1.0 / double(n));
    const double cst = double(n) / double(n - 1) * section_constant(n);
    r.constant = cst;
    r.lhs = Estimate{volK.value + mass.value, volK.err + mass.err, mass.method,
                     volK.n_evals + mass.n_evals};
    r.rhs_components["volume"] = volK.value;
    r.rhs_components["constant"] = cst;
    r.rhs_components["vol_root"] = vol_root;
    r.rhs_components["epsilon"] = eps;
    r.rhs = volK.value + cst * vol_root * eps;
    r.ratio = r.lhs.value / r.rhs;
    const double d_lhs = volK.err + mass.err;
    const double d_rhs =
        volK.err + cst * vol_root * (ms.value.err + eps * rel(volK) / double(n));
    r.error_budget = (d_lhs + d_rhs) / r.rhs + kBudgetSlack;
    r.pass = r.ratio <= 1.0 + r.error_budget;
    r.xi_star = ms.xi_star;
    r.extras["epsilon"] = eps;
    r.extras["excess_mass"] = mass.value;
    return r;
}

}  // namespace

InequalityReport check_stability(const StabilitySpec& spec, const QuadScheme& s,
                                 const CheckOptions& co) {
    const StarBody& K = spec.body;
    const std::size_t n = K.dim();
    if (n < 2) throw std::invalid_argument("stability check needs dimension >= 2");
    if (!K.flags().is_intersection_body)
        throw std::invalid_argument(
            "stability check requires a body flagged as an intersection body");

    Rng rng(0x73746162, 0);
    std::vector<double> x(n);
    if (spec.composite()) {
        // inner containment: every boundary point of the inner body must have
        // gauge at most 1 in K
        for (int i = 0; i < 256; ++i) {
            auto u = rng.unit_vector(n);
            const double rho = spec.inner->radial(u);
            for (std::size_t j = 0; j < n; ++j) x[j] = rho * u[j];
            if (K.minkowski(x) > 1.0 + 1e-9)
                throw std::invalid_argument(
                    "stability spec: the inner body is not contained in the outer body");
        }
    } else {
        if (!spec.f) throw std::invalid_argument("stability spec needs a function");
        for (int i = 0; i < 256; ++i) {
            auto u = rng.unit_vector(n);
            const double rho = rng.uniform() * K.radial(u);
            for (std::size_t j = 0; j < n; ++j) x[j] = rho * u[j];
            if (!(spec.f(x) >= 1.0 - 1e-9))
                throw std::invalid_argument(
                    "stability spec: f must be at least 1 on the body");
        }
    }

    InequalityReport r = stability_once(spec, s, co);
    if (!r.pass) {
        r = stability_once(spec, boosted(s, n), boosted_options(co, n));
        r.retried = true;
    }
    return r;
}

namespace {

InequalityReport dual_vr_once(const StarBody& body, const Density& d,
                              const QuadScheme& s, const CheckOptions& co) {
    const std::size_t n = body.dim();
    InequalityReport r;
    base_fields(r, "thm2_dual_vr", body, d.label(), s);
    r.constant = kE;

    StarBody dual = polar(body);
    VolumeRatioReport vrr = volume_ratio_report(dual, s);

    Estimate mu = integrate_body(body, d, s);
    Estimate vol = mu;
    if (d.kind() != DensityKind::lebesgue)
        vol = integrate_body(body, builtin_density(DensityKind::lebesgue, 0.0, n), s);
    MaxSectionResult ms = max_section(body, d, s, co.search, co.orthant);

    const double vol_root = std::pow(vol.value, 1.0 / double(n));
    r.lhs = mu;
    r.rhs_components["constant"] = kE;
    r.rhs_components["vr_upper"] = vrr.vr_upper;
    r.rhs_components["max_section"] = ms.value.value;
    r.rhs_components["vol_root"] = vol_root;
    r.rhs = kE * vrr.vr_upper * ms.value.value * vol_root;
    r.ratio = r.lhs.value / r.rhs;
    r.error_budget = rel(mu) + rel(ms.value) + rel(vol) / double(n) +
                     vrr.rel_err / double(n) + kBudgetSlack;
    r.pass = r.ratio <= 1.0 + r.error_budget;
    r.xi_star = ms.xi_star;
    r.ellipsoid_axes = vrr.axes;
    r.extras["empirical_constant"] = r.ratio * kE;
    r.extras["vr_upper"] = vrr.vr_upper;
    r.extras["santalo_ratio"] = vrr.santalo_ratio;
    r.extras["mahler"] = vrr.mahler;
    return r;
}

}  // namespace

InequalityReport check_dual_vr(const StarBody& body, const Density& d,
                               const QuadScheme& s, const CheckOptions& co) {
    if (!body.flags().is_convex)
        throw std::invalid_argument("the dual volume-ratio check needs a convex body");
    InequalityReport r = dual_vr_once(body, d, s, co);
    if (!r.pass) {
        r = dual_vr_once(body, d, boosted(s, body.dim()),
                         boosted_options(co, body.dim()));
        r.retried = true;
    }
    return r;
}

Density materialize(const DensitySpec& spec, std::size_t n) {
    if (spec.kind == DensityKind::custom)
        throw std::invalid_argument("experiment densities must be built-in kinds");
    return builtin_density(spec.kind, spec.param, n);
}

namespace {

struct Cell {
    std::string check;        // canonical id
    std::size_t body = 0;
    std::size_t density = 0;  // npos: density not used by this check
    std::size_t index = 0;    // position in the report order
};

constexpr std::size_t kNoDensity = std::size_t(-1);

std::string canonical_check_id(const std::string& name) {
    if (name == "eq1" || name == "eq1_volume") return "eq1_volume";
    if (name == "eq2" || name == "eq2_unconditional") return "eq2_unconditional";
    if (name == "eq3" || name == "eq3_general") return "eq3_general";
    if (name == "prop1" || name == "prop1_stability") return "prop1_stability";
    if (name == "thm2" || name == "thm2_dual_vr") return "thm2_dual_vr";
    throw std::invalid_argument("unknown check: " + name);
}

// empty reason: eligible
std::string skip_reason(const std::string& id, const StarBody& b) {
    const BodyFlags& f = b.flags();
    if (id == "eq2_unconditional" && !(f.is_convex && f.is_unconditional))
        return "needs an unconditional convex body";
    if ((id == "eq3_general" || id == "eq1_volume" || id == "thm2_dual_vr") &&
        !f.is_convex)
        return "needs a convex body";
    if (id == "prop1_stability" && !f.is_intersection_body)
        return "needs a body flagged as an intersection body";
    return {};
}

InequalityReport run_cell(const ExperimentConfig& cfg, const Cell& cell,
                          const QuadScheme& s) {
    const StarBody& body = cfg.bodies[cell.body];
    CheckOptions co = cfg.options;
    co.search.seed = Rng(s.seed ^ cfg.options.search.seed, 0x5eed).next();

    if (cell.check == "eq1_volume") return check_hyperplane_volume(body, s, co);

    Density d = materialize(cfg.densities[cell.density], body.dim());
    if (cell.check == "eq2_unconditional")
        return check_hyperplane_unconditional(body, d, s, co);
    if (cell.check == "eq3_general") return check_hyperplane_general(body, d, s, co);
    if (cell.check == "thm2_dual_vr") return check_dual_vr(body, d, s, co);
    // prop1: the density rides on the body itself, f = 1 + g on all of K
    return check_stability(composite_stability(body, body, d), s, co);
}

}  // namespace

ExperimentRun run_experiment(const ExperimentConfig& cfg) {
    for (const auto& b : cfg.bodies) {
        if (b.dim() < 2)
            throw std::invalid_argument(
                "bodies must have dimension >= 2; central hyperplane sections are "
                "undefined below that");
        if (cfg.quad.engine == Engine::deterministic && b.dim() > 4)
            throw std::invalid_argument(
                "the deterministic engine is limited to dimension <= 4; use "
                "monte_carlo for " +
                b.label());
    }
    if (cfg.quad.engine == Engine::grid_oracle)
        throw std::invalid_argument(
            "the grid engine is a volume cross-check; checks need deterministic or "
            "monte_carlo");
    if (cfg.densities.empty() && !cfg.bodies.empty()) {
        for (const auto& c : cfg.checks)
            if (canonical_check_id(c) != "eq1_volume")
                throw std::invalid_argument("check " + c + " needs densities");
    }

    ExperimentRun run;
    std::vector<Cell> cells;
    for (const auto& name : cfg.checks) {
        const std::string id = canonical_check_id(name);
        for (std::size_t bi = 0; bi < cfg.bodies.size(); ++bi) {
            const std::string reason = skip_reason(id, cfg.bodies[bi]);
            if (!reason.empty()) {
                run.notices.push_back("skipped " + id + " on " +
                                      cfg.bodies[bi].label() + ": " + reason);
                continue;
            }
            if (id == "eq1_volume") {
                cells.push_back({id, bi, kNoDensity, cells.size()});
                continue;
            }
            for (std::size_t di = 0; di < cfg.densities.size(); ++di)
                cells.push_back({id, bi, di, cells.size()});
        }
    }

    std::vector<std::optional<InequalityReport>> slots(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned pool =
        unsigned(std::min<std::size_t>({cells.size(), std::size_t(hw), 4}));
    const int cell_threads =
        cfg.quad.threads > 0 ? cfg.quad.threads : std::max(1u, hw / std::max(pool, 1u));

    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= cells.size()) return;
            QuadScheme s = cfg.quad;
            s.seed = Rng(cfg.quad.seed, 0xce11 + cells[i].index).next();
            s.threads = cell_threads;
            try {
                slots[i] = run_cell(cfg, cells[i], s);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (unsigned t = 0; t < pool; ++t) threads.emplace_back(worker);
    }

    for (std::size_t i = 0; i < cells.size(); ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
    for (auto& slot : slots) {
        run.all_pass = run.all_pass && slot->pass;
        run.reports.push_back(std::move(*slot));
    }
    return run;
}

}  // namespace slicelab
