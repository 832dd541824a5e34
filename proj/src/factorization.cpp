#include "slicelab/factorization.hpp"

#include "slicelab/linalg.hpp"
#include "slicelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicelab {
namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_ball_volume(std::size_t n) {
    return std::exp(0.5 * double(n) * std::log(kPi) - std::lgamma(0.5 * double(n) + 1.0));
}

// t_i ∂_i gauge(t), central differences, normalized to sum 1; the gauge may
// have kinks, so the raw Euler identity is not trusted
std::vector<double> balance_weights(const StarBody& body, const std::vector<double>& t) {
    std::size_t n = t.size();
    std::vector<double> q(n), probe = t;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double h = std::max(1e-6 * t[i], 1e-12);
        probe[i] = t[i] + h;
        double up = body.minkowski(probe);
        probe[i] = t[i] - h;
        double dn = body.minkowski(probe);
        probe[i] = t[i];
        q[i] = t[i] * (up - dn) / (2.0 * h);
        sum += q[i];
    }
    if (!(sum > 0.0)) throw std::runtime_error("degenerate gauge gradient");
    for (double& v : q) v /= sum;
    return q;
}

void rescale_to_boundary(const StarBody& body, std::vector<double>& t) {
    double g = body.minkowski(t);
    if (!(g > 0.0)) throw std::runtime_error("degenerate gauge value");
    for (double& v : t) v /= g;
}

std::vector<std::vector<double>> corner_set(std::size_t n) {
    std::size_t count = n <= 7 ? (std::size_t(1) << (n - 1)) : 64;
    std::vector<std::vector<double>> corners;
    corners.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<double> c(n, 1.0);
        for (std::size_t bit = 0; bit + 1 < n && bit < 63; ++bit)
            if (mask >> bit & 1) c[bit + 1] = -1.0;
        corners.push_back(std::move(c));
    }
    return corners;
}

}  // namespace

SandwichReport verify_sandwich(const StarBody& body, const std::vector<double>& t) {
    std::size_t n = body.dim();
    if (t.size() != n) throw std::invalid_argument("box size must match dimension");
    for (double v : t)
        if (!(v > 0.0)) throw std::invalid_argument("box semi-axes must be positive");

    SandwichReport rep;
    rep.t = t;

    // inner: every corner of diag(t)·[-1,1]^n must lie in the body
    double worst = 0.0;
    std::vector<double> corner(n);
    for (const auto& signs : corner_set(n)) {
        for (std::size_t i = 0; i < n; ++i) corner[i] = signs[i] * t[i];
        worst = std::max(worst, body.minkowski(corner));
    }
    rep.inner_margin = worst;
    rep.inner_ok = worst <= 1.0 + 1e-9;

    // outer: max of Σ|x_i|/t_i over the body boundary
    auto objective = [&](std::span<const double> theta) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::fabs(theta[i]) / t[i];
        std::vector<double> x(theta.begin(), theta.end());
        return s / body.minkowski(x);
    };

    std::vector<std::vector<double>> probes;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        probes.push_back(std::move(e));
    }
    for (auto& c : corner_set(n)) {
        linalg::normalize(c);
        probes.push_back(std::move(c));
    }
    Rng rng(0x6c6f7a, 0);
    for (int s = 0; s < 512; ++s) probes.push_back(rng.unit_vector(n));

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i)
        ranked.emplace_back(objective(probes[i]), i);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<std::vector<double>> seeds;
    for (std::size_t r = 0; r < std::min<std::size_t>(8, ranked.size()); ++r)
        seeds.push_back(probes[ranked[r].second]);

    SphereOptConfig cfg;
    cfg.starts = 4 * int(n + 1);
    cfg.orthant_restrict = body.flags().is_unconditional;
    auto found = maximize_on_sphere(n, objective, cfg, seeds);
    rep.outer_max = std::max(found.value, ranked.front().first);
    rep.outer_ok = rep.outer_max <= double(n) * (1.0 + 1e-9);
    return rep;
}

SandwichReport lozanovskii_box(const StarBody& body, double tol,
                               std::vector<double> start) {
    std::size_t n = body.dim();
    if (!body.flags().is_unconditional)
        throw std::invalid_argument("box factorization needs an unconditional body");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    std::vector<double> t;
    if (start.empty()) {
        t.assign(n, 1.0);
    } else {
        if (start.size() != n) throw std::invalid_argument("start size must match dimension");
        for (double v : start)
            if (!(v > 0.0)) throw std::invalid_argument("start must be positive");
        t = std::move(start);
    }
    rescale_to_boundary(body, t);

    // Σ log t_i after pushing t∘d^s back to the boundary; concave in s for
    // geometric paths inside an unconditional convex body
    auto log_volume_at = [&](const std::vector<double>& base,
                             const std::vector<double>& d, double s,
                             std::vector<double>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = base[i] * std::pow(d[i], s);
        rescale_to_boundary(body, out);
        double lv = 0.0;
        for (double v : out) lv += std::log(v);
        return lv;
    };

    // balanced directions with golden-section line search; the search is
    // what keeps gauge kinks stable: an unsearched multiplicative step
    // amplifies a corner offset by ~t/h per round, while the 1-d maximum
    // points back onto the kink
    std::vector<double> d(n), cand;
    for (int round = 0; round < 200; ++round) {
        auto q = balance_weights(body, t);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = std::sqrt(1.0 / (double(n) * std::max(q[i], 1e-300)));
            d[i] = std::clamp(d[i], 0.25, 4.0);
        }
        const double gr = 0.6180339887498949;
        double lo = 0.0, hi = 1.0;
        double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
        double f1 = log_volume_at(t, d, m1, cand);
        double f2 = log_volume_at(t, d, m2, cand);
        for (int it = 0; it < 70; ++it) {
            if (f1 < f2) {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + gr * (hi - lo);
                f2 = log_volume_at(t, d, m2, cand);
            } else {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - gr * (hi - lo);
                f1 = log_volume_at(t, d, m1, cand);
            }
        }
        double s_star = f1 > f2 ? m1 : m2;
        log_volume_at(t, d, s_star, cand);
        double movement = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            movement = std::max(movement, std::fabs(std::log(cand[i] / t[i])));
        t = cand;
        if (movement <= std::max(tol, 1e-13)) break;
    }
    return verify_sandwich(body, t);
}

std::vector<double> john_diagonal_ellipsoid(const StarBody& body, int iters) {
    std::size_t n = body.dim();
    if (!body.flags().is_convex)
        throw std::invalid_argument("inscribed ellipsoid needs a convex body");
    if (iters < 1) throw std::invalid_argument("iteration count must be >= 1");
    // diminishing steps: long horizon early, ~1e-3 flip-flop amplitude late

    SphereOptConfig cfg;
    cfg.starts = 4 * int(n + 1);
    cfg.orthant_restrict = body.flags().is_unconditional;

    // Φ(a) = max over unit θ of gauge(a∘θ); E(a) ⊆ K iff Φ(a) <= 1
    auto phi = [&](const std::vector<double>& a, std::vector<double>* arg) {
        auto objective = [&](std::span<const double> theta) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = a[i] * theta[i];
            return body.minkowski(x);
        };
        auto found = maximize_on_sphere(n, objective, cfg);
        if (arg) *arg = found.arg;
        return found.value;
    };

    // subgradient of log Φ in log-a coordinates, averaged over near-active
    // maximizers so tied axes move together
    auto weights = [&](const std::vector<double>& a, const std::vector<double>& theta_star,
                       double phi_val) {
        std::vector<std::vector<double>> actives = {theta_star};
        std::vector<double> e(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            std::vector<double> x(n, 0.0);
            x[j] = a[j];
            if (body.minkowski(x) >= (1.0 - 1e-7) * phi_val) actives.push_back(e);
        }
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 / std::sqrt(double(n));
        {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = a[i] * diag[i];
            if (body.minkowski(x) >= (1.0 - 1e-7) * phi_val) actives.push_back(diag);
        }

        std::vector<double> q(n, 0.0), probe(n);
        for (const auto& th : actives) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = a[i] * th[i];
            double sum = 0.0;
            std::vector<double> qi(n);
            for (std::size_t i = 0; i < n; ++i) {
                double h = std::max(1e-6 * std::fabs(x[i]), 1e-9);
                probe = x;
                probe[i] = x[i] + h;
                double up = body.minkowski(probe);
                probe[i] = x[i] - h;
                double dn = body.minkowski(probe);
                qi[i] = x[i] * (up - dn) / (2.0 * h);
                sum += qi[i];
            }
            if (!(sum > 0.0)) continue;
            for (std::size_t i = 0; i < n; ++i) q[i] += qi[i] / sum;
        }
        double total = 0.0;
        for (double v : q) total += v;
        if (!(total > 0.0)) throw std::runtime_error("degenerate gauge gradient");
        for (double& v : q) v /= total;
        return q;
    };

    std::vector<double> a(n, 1.0), theta_star;
    double p0 = phi(a, nullptr);
    if (!(p0 > 0.0)) throw std::runtime_error("degenerate gauge value");
    for (double& v : a) v /= p0;

    std::vector<double> best = a;
    double best_logvol = 0.0;
    for (double v : a) best_logvol += std::log(v);

    for (int k = 0; k < iters; ++k) {
        double pv = phi(a, &theta_star);
        auto q = weights(a, theta_star, pv);
        double eta = 2.0 / (double(k) + 4.0);
        for (std::size_t i = 0; i < n; ++i)
            a[i] *= std::exp(eta * (1.0 / double(n) - q[i]));
        double pr = phi(a, nullptr);
        for (double& v : a) v /= pr;
        double logvol = 0.0;
        for (double v : a) logvol += std::log(v);
        if (logvol > best_logvol) {
            best_logvol = logvol;
            best = a;
        }
    }
    return best;
}

double mahler_volume(const StarBody& body, const QuadScheme& s, double* rel_err) {
    auto leb = builtin_density(DensityKind::lebesgue, 0.0, body.dim());
    auto vol = integrate_body(body, leb, s);
    auto dual = polar(body);
    auto dual_vol = integrate_body(dual, leb, s);
    if (rel_err) {
        double r1 = vol.value != 0.0 ? vol.err / std::fabs(vol.value) : 0.0;
        double r2 = dual_vol.value != 0.0 ? dual_vol.err / std::fabs(dual_vol.value) : 0.0;
        *rel_err = r1 + r2;
    }
    return vol.value * dual_vol.value;
}

VolumeRatioReport volume_ratio_report(const StarBody& body, const QuadScheme& s) {
    std::size_t n = body.dim();
    VolumeRatioReport rep;
    rep.axes = john_diagonal_ellipsoid(body);
    double prod = 1.0;
    for (double v : rep.axes) prod *= v;
    rep.ellipsoid_volume = unit_ball_volume(n) * prod;

    auto leb = builtin_density(DensityKind::lebesgue, 0.0, n);
    auto vol = integrate_body(body, leb, s);
    rep.body_volume = vol.value;
    rep.vr_upper = std::pow(vol.value / rep.ellipsoid_volume, 1.0 / double(n));

    double mahler_err = 0.0;
    rep.mahler = mahler_volume(body, s, &mahler_err);
    double b2 = unit_ball_volume(n);
    rep.santalo_ratio = rep.mahler / (b2 * b2);
    rep.rel_err = (vol.value != 0.0 ? vol.err / std::fabs(vol.value) : 0.0) + mahler_err;
    return rep;
}

}  // namespace slicelab
