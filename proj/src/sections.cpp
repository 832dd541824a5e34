#include "slicelab/sections.hpp"

#include "slicelab/linalg.hpp"
#include "slicelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace slicelab {
namespace {

QuadScheme search_scheme(const QuadScheme& s, std::size_t section_dim) {
    QuadScheme r = s;
    r.radial_nodes = std::min(s.radial_nodes, 24);
    if (s.sphere_nodes > 0)
        r.sphere_nodes = std::max(16, s.sphere_nodes / 2);
    else
        r.sphere_nodes = section_dim <= 2 ? 128 : (section_dim == 3 ? 32 : 24);
    r.mc_samples = std::max(2048, s.mc_samples / 8);
    r.adaptive = false;
    return r;
}

void canonicalize_sign(std::vector<double>& v) {
    for (double c : v) {
        if (c == 0.0) continue;
        if (c < 0.0)
            for (double& x : v) x = -x;
        return;
    }
}

}  // namespace

MaxSectionResult max_section(const StarBody& body, const Density& d,
                             const QuadScheme& s, const SphereOptConfig& opt_in,
                             OrthantPolicy policy) {
    std::size_t n = body.dim();
    if (n < 2) throw std::invalid_argument("sections need n >= 2");
    if (d.dim() != n) throw std::invalid_argument("body/density dimension mismatch");
    if (s.engine == Engine::grid_oracle)
        throw std::invalid_argument("grid oracle supports body integrals only");

    SphereOptConfig opt = opt_in;
    if (opt.starts == 0) opt.starts = 8 * (n + 1);
    bool sign_invariant = d.kind() != DensityKind::custom;
    switch (policy) {
        case OrthantPolicy::on: opt.orthant_restrict = true; break;
        case OrthantPolicy::off: opt.orthant_restrict = false; break;
        case OrthantPolicy::automatic:
            opt.orthant_restrict = body.flags().is_unconditional && sign_invariant;
            break;
    }

    QuadScheme coarse = search_scheme(s, n - 1);
    auto objective = [&](std::span<const double> xi) {
        std::vector<double> u(xi.begin(), xi.end());
        linalg::normalize(u);
        return integrate_section(body, d, u, coarse).value;
    };
    auto found = maximize_on_sphere(n, objective, opt);

    MaxSectionResult res;
    res.xi_star = found.arg;
    linalg::normalize(res.xi_star);
    canonicalize_sign(res.xi_star);
    res.value = integrate_section(body, d, res.xi_star, s);
    res.starts = opt.starts;
    res.trace = std::move(found.trace);
    return res;
}

StarBody intersection_body_of(const StarBody& base, const Density& d,
                              const QuadScheme& s) {
    std::size_t n = base.dim();
    if (n < 2) throw std::invalid_argument("sections need n >= 2");
    if (d.dim() != n) throw std::invalid_argument("body/density dimension mismatch");
    if (s.engine == Engine::grid_oracle)
        throw std::invalid_argument("grid oracle supports body integrals only");

    struct Cache {
        std::mutex mu;
        std::map<std::vector<std::int64_t>, double> values;
    };
    auto cache = std::make_shared<Cache>();
    auto radial = [base, d, s, cache](std::span<const double> u) {
        std::vector<std::int64_t> key(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            key[i] = std::llround(u[i] * 1e12);
        {
            std::lock_guard<std::mutex> lk(cache->mu);
            auto it = cache->values.find(key);
            if (it != cache->values.end()) return it->second;
        }
        std::vector<double> xi(u.begin(), u.end());
        linalg::normalize(xi);
        double v = integrate_section(base, d, xi, s).value;
        std::lock_guard<std::mutex> lk(cache->mu);
        cache->values.emplace(std::move(key), v);
        return v;
    };

    BodyFlags flags;
    flags.is_convex = false;
    flags.is_unconditional = base.flags().is_unconditional;
    flags.is_intersection_body = true;
    std::ostringstream label;
    label << "I(" << base.label() << ")";
    return custom_radial_body(n, radial, flags, label.str());
}

double radial_distance(const StarBody& a, const StarBody& b, int samples,
                       std::uint64_t seed) {
    std::size_t n = a.dim();
    if (b.dim() != n) throw std::invalid_argument("body dimension mismatch");
    if (samples < 0) throw std::invalid_argument("samples must be >= 0");

    double worst = 0.0;
    auto probe = [&](const std::vector<double>& dir) {
        double da = a.radial_ray(dir);
        double db = b.radial_ray(dir);
        worst = std::max(worst, std::fabs(da - db));
    };

    std::vector<double> dir(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(dir.begin(), dir.end(), 0.0);
        dir[j] = 1.0;
        probe(dir);
    }
    std::size_t diag_count = n >= 1 && n <= 7 ? (std::size_t(1) << (n - 1)) : 64;
    for (std::size_t mask = 0; mask < diag_count; ++mask) {
        for (std::size_t j = 0; j < n; ++j) dir[j] = 1.0;
        for (std::size_t bit = 0; bit + 1 < n && bit < 63; ++bit)
            if (mask >> bit & 1) dir[bit + 1] = -1.0;
        probe(dir);
    }
    Rng rng(seed, 0);
    for (int t = 0; t < samples; ++t) probe(rng.unit_vector(n));
    return worst;
}

}  // namespace slicelab
