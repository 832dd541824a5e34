#include "slicelab/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace slicelab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config error at " + where + ": " + what);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
    return j.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<std::int64_t>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail(where, "expected a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

double parse_p(const json& v, const std::string& where) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
        fail(where, "p must be a positive number or \"inf\"");
    }
    return as_number(v, where);
}

StarBody parse_body(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "body must be an object");
    const std::string kind =
        j.contains("kind") ? as_string(j.at("kind"), where + ".kind") : "lp";

    StarBody body = [&]() -> StarBody {
        try {
            if (kind == "lp") {
                check_keys(j,
                           {"kind", "n", "p", "weights", "label",
                            "is_intersection_body"},
                           where);
                const auto n = as_integer(require(j, "n", where), where + ".n");
                if (n < 1) fail(where + ".n", "dimension must be positive");
                const double p = parse_p(require(j, "p", where), where + ".p");
                std::vector<double> w;
                if (j.contains("weights"))
                    w = as_number_array(j.at("weights"), where + ".weights");
                std::string label;
                if (j.contains("label"))
                    label = as_string(j.at("label"), where + ".label");
                return make_lp_ball(std::size_t(n), p, std::move(w),
                                    std::move(label));
            }
            if (kind == "image") {
                check_keys(j,
                           {"kind", "base", "matrix", "diag", "label",
                            "is_intersection_body"},
                           where);
                StarBody base = parse_body(require(j, "base", where), where + ".base");
                std::string label;
                if (j.contains("label"))
                    label = as_string(j.at("label"), where + ".label");
                if (j.contains("diag")) {
                    auto d = as_number_array(j.at("diag"), where + ".diag");
                    return linear_image(base, DiagonalMap(std::move(d)),
                                        std::move(label));
                }
                auto m = as_number_array(require(j, "matrix", where),
                                         where + ".matrix");
                return linear_image(base, m, std::move(label));
            }
            if (kind == "polar") {
                check_keys(j, {"kind", "base", "is_intersection_body"}, where);
                return polar(parse_body(require(j, "base", where), where + ".base"));
            }
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            if (msg.rfind("config error", 0) == 0) throw;
            fail(where, msg);
        }
        fail(where, "unknown body kind '" + kind + "'");
    }();

    if (j.contains("is_intersection_body")) {
        BodyFlags f = body.flags();
        f.is_intersection_body =
            as_bool(j.at("is_intersection_body"), where + ".is_intersection_body");
        body = override_flags(body, f);
    }
    return body;
}

DensitySpec parse_density(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "density must be an object");
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    DensitySpec spec;
    if (kind == "lebesgue") {
        check_keys(j, {"kind"}, where);
        spec.kind = DensityKind::lebesgue;
    } else if (kind == "gaussian") {
        check_keys(j, {"kind", "sigma"}, where);
        spec.kind = DensityKind::gaussian;
        spec.param = j.contains("sigma")
                         ? as_number(j.at("sigma"), where + ".sigma")
                         : 1.0;
        if (!(spec.param > 0.0)) fail(where + ".sigma", "sigma must be positive");
    } else if (kind == "exp_l1") {
        check_keys(j, {"kind"}, where);
        spec.kind = DensityKind::exp_l1;
    } else if (kind == "radial_power") {
        check_keys(j, {"kind", "alpha"}, where);
        spec.kind = DensityKind::radial_power;
        spec.param = j.contains("alpha")
                         ? as_number(j.at("alpha"), where + ".alpha")
                         : 2.0;
        if (spec.param < 0.0) fail(where + ".alpha", "alpha must be non-negative");
    } else if (kind == "bump") {
        check_keys(j, {"kind", "radius"}, where);
        spec.kind = DensityKind::bump;
        spec.param = j.contains("radius")
                         ? as_number(j.at("radius"), where + ".radius")
                         : 1.0;
        if (!(spec.param > 0.0)) fail(where + ".radius", "radius must be positive");
    } else {
        fail(where + ".kind", "unknown density kind '" + kind + "'");
    }
    return spec;
}

QuadScheme parse_quad(const json& j, const std::string& where) {
    QuadScheme s;
    if (j.is_null()) return s;
    if (!j.is_object()) fail(where, "quad must be an object");
    check_keys(j,
               {"engine", "radial_nodes", "sphere_nodes", "mc_samples", "seed",
                "target_rel_err", "adaptive", "threads"},
               where);
    if (j.contains("engine")) {
        try {
            s.engine = engine_from_string(as_string(j.at("engine"), where + ".engine"));
        } catch (const std::invalid_argument& e) {
            fail(where + ".engine", e.what());
        }
    }
    if (j.contains("radial_nodes")) {
        s.radial_nodes = int(as_integer(j.at("radial_nodes"), where + ".radial_nodes"));
        if (s.radial_nodes < 1) fail(where + ".radial_nodes", "must be >= 1");
    }
    if (j.contains("sphere_nodes")) {
        s.sphere_nodes = int(as_integer(j.at("sphere_nodes"), where + ".sphere_nodes"));
        if (s.sphere_nodes < 0) fail(where + ".sphere_nodes", "must be >= 0");
    }
    if (j.contains("mc_samples")) {
        s.mc_samples = int(as_integer(j.at("mc_samples"), where + ".mc_samples"));
        if (s.mc_samples < 1) fail(where + ".mc_samples", "must be >= 1");
    }
    if (j.contains("seed")) {
        const auto seed = as_integer(j.at("seed"), where + ".seed");
        if (seed < 0) fail(where + ".seed", "must be non-negative");
        s.seed = std::uint64_t(seed);
    }
    if (j.contains("target_rel_err")) {
        s.target_rel_err = as_number(j.at("target_rel_err"), where + ".target_rel_err");
        if (s.target_rel_err < 0.0) fail(where + ".target_rel_err", "must be >= 0");
    }
    if (j.contains("adaptive")) s.adaptive = as_bool(j.at("adaptive"), where + ".adaptive");
    if (j.contains("threads")) {
        s.threads = int(as_integer(j.at("threads"), where + ".threads"));
        if (s.threads < 0) fail(where + ".threads", "must be >= 0");
    }
    return s;
}

CheckOptions parse_opt(const json& j, const std::string& where) {
    CheckOptions co;
    if (j.is_null()) return co;
    if (!j.is_object()) fail(where, "opt must be an object");
    check_keys(j,
               {"starts", "max_iters", "step_init", "step_min", "orthant_restrict",
                "seed"},
               where);
    if (j.contains("starts")) {
        co.search.starts = int(as_integer(j.at("starts"), where + ".starts"));
        if (co.search.starts < 0) fail(where + ".starts", "must be >= 0");
    }
    if (j.contains("max_iters")) {
        co.search.max_iters = int(as_integer(j.at("max_iters"), where + ".max_iters"));
        if (co.search.max_iters < 1) fail(where + ".max_iters", "must be >= 1");
    }
    if (j.contains("step_init"))
        co.search.step_init = as_number(j.at("step_init"), where + ".step_init");
    if (j.contains("step_min"))
        co.search.step_min = as_number(j.at("step_min"), where + ".step_min");
    if (j.contains("seed")) {
        const auto seed = as_integer(j.at("seed"), where + ".seed");
        if (seed < 0) fail(where + ".seed", "must be non-negative");
        co.search.seed = std::uint64_t(seed);
    }
    if (j.contains("orthant_restrict")) {
        const std::string mode =
            as_string(j.at("orthant_restrict"), where + ".orthant_restrict");
        if (mode == "auto")
            co.orthant = OrthantPolicy::automatic;
        else if (mode == "on")
            co.orthant = OrthantPolicy::on;
        else if (mode == "off")
            co.orthant = OrthantPolicy::off;
        else
            fail(where + ".orthant_restrict", "expected auto, on or off");
    }
    return co;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = e.byte > 0 ? e.byte - 1 : 0;
        for (std::size_t i = 0; i < stop && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw std::invalid_argument("config parse error at line " +
                                    std::to_string(line) + ", column " +
                                    std::to_string(col) + ": " + e.what());
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    const json j = parse_text(text);
    if (!j.is_object())
        throw std::invalid_argument("config error at $: expected a JSON object");
    check_keys(j, {"bodies", "densities", "checks", "quad", "opt"}, "$");

    ExperimentConfig cfg;
    if (j.contains("bodies")) {
        const json& bodies = j.at("bodies");
        if (!bodies.is_array()) fail("$.bodies", "expected an array");
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            const std::string where = "$.bodies[" + std::to_string(i) + "]";
            StarBody b = parse_body(bodies[i], where);
            if (b.dim() < 2)
                fail(where,
                     "dimension must be >= 2; central hyperplane sections are "
                     "undefined below that");
            cfg.bodies.push_back(std::move(b));
        }
    }
    if (j.contains("densities")) {
        const json& ds = j.at("densities");
        if (!ds.is_array()) fail("$.densities", "expected an array");
        for (std::size_t i = 0; i < ds.size(); ++i)
            cfg.densities.push_back(
                parse_density(ds[i], "$.densities[" + std::to_string(i) + "]"));
    }
    if (j.contains("checks")) {
        const json& cs = j.at("checks");
        if (!cs.is_array()) fail("$.checks", "expected an array");
        static const std::set<std::string> known = {
            "eq1", "eq2", "eq3", "prop1", "thm2",
            "eq1_volume", "eq2_unconditional", "eq3_general", "prop1_stability",
            "thm2_dual_vr"};
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string where = "$.checks[" + std::to_string(i) + "]";
            const std::string name = as_string(cs[i], where);
            if (!known.count(name)) fail(where, "unknown check '" + name + "'");
            cfg.checks.push_back(name);
        }
    }
    cfg.quad = parse_quad(j.contains("quad") ? j.at("quad") : json(), "$.quad");
    cfg.options = parse_opt(j.contains("opt") ? j.at("opt") : json(), "$.opt");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

StarBody parse_body_json(const std::string& text) {
    return parse_body(parse_text(text), "$");
}

DensitySpec parse_density_json(const std::string& text) {
    return parse_density(parse_text(text), "$");
}

}  // namespace slicelab
