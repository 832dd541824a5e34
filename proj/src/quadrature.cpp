#include "slicelab/quadrature.hpp"

#include "slicelab/detail/basis.hpp"
#include "slicelab/kernels.hpp"
#include "slicelab/linalg.hpp"
#include "slicelab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace slicelab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kChunk = 4096;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1, 1], Newton on the recurrence.
// ---------------------------------------------------------------------------
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            dp = m * (t * p0 - p1) / (t * t - 1.0);
            double step = p0 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        x[i] = -t;
        x[m - 1 - i] = t;
        w[i] = w[m - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Rule for ∫_0^1 f(u) u^k du: nodes u in (0,1), weights premultiplied by u^k.
struct RadialRule {
    std::vector<double> u, vt;
    int k = 0;
};

RadialRule make_radial_rule(int m, int k) {
    if (m < 1) throw std::invalid_argument("radial nodes must be >= 1");
    std::vector<double> x, w;
    gauss_legendre(m, x, w);
    RadialRule r;
    r.k = k;
    r.u.resize(m);
    r.vt.resize(m);
    for (int i = 0; i < m; ++i) {
        r.u[i] = 0.5 * (x[i] + 1.0);
        r.vt[i] = 0.5 * w[i] * std::pow(r.u[i], double(k));
    }
    return r;
}

double pow_int(double x, std::size_t k) {
    double r = 1.0;
    while (k) {
        if (k & 1) r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Box-facet chart over S^{d-1}: radial projection of the boundary of the box
// [-b, b] onto the sphere gives, for any integrand F,
//   ∫_{S^{d-1}} F dσ = Σ_facets ∫_facet F(u/|u|) (u·ν) / |u|^d dA(u).
// Folding to the positive orthant is valid only when F is even in every
// coordinate (unconditional gauge, sign-invariant density).
// ---------------------------------------------------------------------------
struct Chart {
    std::size_t d = 0;
    int m = 0;
    bool folded = false;
    std::vector<double> ext;
    std::vector<double> gx, gw;
    std::size_t per_facet = 0;
    std::size_t total = 0;

    void init(std::size_t dim, int order, bool fold, std::vector<double> extents) {
        d = dim;
        m = order;
        folded = fold;
        ext = std::move(extents);
        gauss_legendre(m, gx, gw);
        per_facet = 1;
        for (std::size_t j = 0; j + 1 < d; ++j) per_facet *= std::size_t(m);
        total = (folded ? d : 2 * d) * per_facet;
    }

    // writes len points from global index beg: dirs d x len coordinate-major,
    // wgt carries everything except the 1/|u|^d factor
    void fill(std::size_t beg, std::size_t len, double* dirs, double* wgt) const {
        for (std::size_t p = 0; p < len; ++p) {
            std::size_t g = beg + p;
            std::size_t f = g / per_facet;
            std::size_t rem = g % per_facet;
            std::size_t axis = folded ? f : f / 2;
            double sgn = (folded || f % 2 == 0) ? 1.0 : -1.0;
            double wacc = ext[axis];
            if (folded) wacc *= double(std::size_t(1) << d);
            for (std::size_t j = 0; j < d; ++j) {
                if (j == axis) {
                    dirs[j * len + p] = sgn * ext[axis];
                    continue;
                }
                std::size_t digit = rem % std::size_t(m);
                rem /= std::size_t(m);
                if (folded) {
                    dirs[j * len + p] = 0.5 * (gx[digit] + 1.0) * ext[j];
                    wacc *= 0.5 * gw[digit] * ext[j];
                } else {
                    dirs[j * len + p] = gx[digit] * ext[j];
                    wacc *= gw[digit] * ext[j];
                }
            }
            wgt[p] = wacc;
        }
    }
};

// ---------------------------------------------------------------------------
// chunked parallel driver; per-chunk results must be combined in index order
// by the caller so the outcome is independent of the thread count
// ---------------------------------------------------------------------------
int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return int(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

template <class Work>
void for_chunks(std::size_t total, int threads, Work&& work) {
    std::size_t n_chunks = (total + kChunk - 1) / kChunk;
    if (n_chunks == 0) return;
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            work(c, c * kChunk, std::min(kChunk, total - c * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        while (true) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                work(c, c * kChunk, std::min(kChunk, total - c * kChunk));
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<std::size_t>(std::size_t(threads), n_chunks);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// direction-batch evaluation of f(θ) = ρ(θ)^d S(θ),
// S(θ) = Σ_j vt_j g(ρ u_j θ)  (the radial Gauss-Legendre factor)
// ---------------------------------------------------------------------------
struct Problem {
    const StarBody* body = nullptr;
    const Density* density = nullptr;
    const std::vector<std::vector<double>>* basis = nullptr;  // section plane
    std::size_t n = 0;  // ambient dimension
    std::size_t d = 0;  // integral dimension
    RadialRule rad;
};

struct EvalCounters {
    std::uint64_t evals = 0;
};

// ys: d x len chart/sample coordinates (unnormalized directions)
void eval_dirs(const Problem& pb, const double* ys, std::size_t len, double* contrib,
               double* norms, EvalCounters& ctr) {
    const auto& k = kernels::active();
    std::size_t n = pb.n, d = pb.d;

    // physical coordinates
    std::vector<double> xs_buf;
    const double* xs = ys;
    if (pb.basis) {
        xs_buf.resize(n * len);
        for (std::size_t c = 0; c < n; ++c) {
            double* row = xs_buf.data() + c * len;
            k.scale(ys, (*pb.basis)[0][c], row, len);
            for (std::size_t j = 1; j < d; ++j)
                k.axpy((*pb.basis)[j][c], ys + j * len, row, len);
        }
        xs = xs_buf.data();
    }

    std::vector<double> s2(len), g(len), rho(len);
    k.sum_sq(ys, len, d, nullptr, s2.data());
    k.vsqrt(s2.data(), norms, len);
    pb.body->minkowski_batch(xs, len, g.data());
    ctr.evals += len;
    for (std::size_t i = 0; i < len; ++i) {
        if (!(g[i] > 0.0))
            throw std::runtime_error("gauge not positive along a sampled direction");
        rho[i] = norms[i] / g[i];
    }

    const Density& dens = *pb.density;
    switch (dens.kind()) {
        case DensityKind::lebesgue: {
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = pow_int(rho[i], d) / double(d);
            return;
        }
        case DensityKind::radial_power: {
            // ∫_0^ρ r^{d-1} r^α dr = ρ^{d+α}/(d+α), exact
            double a = dens.param();
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = std::pow(rho[i], double(d) + a) / (double(d) + a);
            return;
        }
        case DensityKind::gaussian: {
            double sigma = dens.param();
            double c0 = dens.radial_profile(0.0);
            std::vector<double> rho2(len), tmp(len), acc(len, 0.0);
            for (std::size_t i = 0; i < len; ++i) rho2[i] = rho[i] * rho[i];
            for (std::size_t j = 0; j < pb.rad.u.size(); ++j) {
                double a = -pb.rad.u[j] * pb.rad.u[j] / (2.0 * sigma * sigma);
                k.scale(rho2.data(), a, tmp.data(), len);
                k.vexp(tmp.data(), tmp.data(), len);
                k.axpy(pb.rad.vt[j] * c0, tmp.data(), acc.data(), len);
            }
            ctr.evals += len * pb.rad.u.size();
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = pow_int(rho[i], d) * acc[i];
            return;
        }
        case DensityKind::exp_l1: {
            std::vector<double> l1(len), t(len), tmp(len), acc(len, 0.0);
            k.sum_abs(xs, len, n, nullptr, l1.data());
            for (std::size_t i = 0; i < len; ++i) t[i] = rho[i] * l1[i] / norms[i];
            for (std::size_t j = 0; j < pb.rad.u.size(); ++j) {
                k.scale(t.data(), -pb.rad.u[j], tmp.data(), len);
                k.vexp(tmp.data(), tmp.data(), len);
                k.axpy(pb.rad.vt[j], tmp.data(), acc.data(), len);
            }
            ctr.evals += len * pb.rad.u.size();
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = pow_int(rho[i], d) * acc[i];
            return;
        }
        case DensityKind::bump: {
            std::vector<double> acc(len, 0.0);
            for (std::size_t j = 0; j < pb.rad.u.size(); ++j) {
                double uj = pb.rad.u[j], vtj = pb.rad.vt[j];
                for (std::size_t i = 0; i < len; ++i)
                    acc[i] += vtj * dens.radial_profile(rho[i] * uj);
            }
            ctr.evals += len * pb.rad.u.size();
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = pow_int(rho[i], d) * acc[i];
            return;
        }
        case DensityKind::custom: {
            std::vector<double> acc(len, 0.0), pt(n);
            for (std::size_t j = 0; j < pb.rad.u.size(); ++j) {
                double uj = pb.rad.u[j], vtj = pb.rad.vt[j];
                for (std::size_t i = 0; i < len; ++i) {
                    double f = rho[i] * uj / norms[i];
                    for (std::size_t c = 0; c < n; ++c) pt[c] = f * xs[c * len + i];
                    acc[i] += vtj * dens(pt);
                }
            }
            ctr.evals += len * pb.rad.u.size();
            for (std::size_t i = 0; i < len; ++i)
                contrib[i] = pow_int(rho[i], d) * acc[i];
            return;
        }
    }
    throw std::logic_error("unreachable density kind");
}

// Σ_i wgt_i contrib_i / |u_i|^d over a chart, chunk-parallel, order-stable
double chart_value(const Problem& pb, const Chart& chart, int threads,
                   EvalCounters& ctr) {
    std::size_t n_chunks = (chart.total + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);
    std::vector<std::uint64_t> pevals(n_chunks, 0);
    for_chunks(chart.total, threads, [&](std::size_t c, std::size_t beg, std::size_t len) {
        std::vector<double> ys(pb.d * len), wgt(len), contrib(len), norms(len);
        chart.fill(beg, len, ys.data(), wgt.data());
        EvalCounters local;
        eval_dirs(pb, ys.data(), len, contrib.data(), norms.data(), local);
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i)
            acc += wgt[i] * contrib[i] / pow_int(norms[i], pb.d);
        partial[c] = acc;
        pevals[c] = local.evals;
    });
    double sum = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        sum += partial[c];
        ctr.evals += pevals[c];
    }
    return sum;
}

// integral over the two rays ±e of a 1-dimensional slice
double rays_value(const Problem& pb, EvalCounters& ctr) {
    std::vector<double> ys = {1.0, -1.0};
    std::vector<double> contrib(2), norms(2);
    eval_dirs(pb, ys.data(), 2, contrib.data(), norms.data(), ctr);
    return contrib[0] + contrib[1];
}

int default_chart_order(std::size_t d) {
    if (d <= 2) return 256;
    if (d == 3) return 96;
    return 48;
}

Estimate det_integrate(const Problem& pb, std::vector<double> extents, bool folded,
                       const QuadScheme& s, const std::string& method) {
    Estimate est;
    est.method = method;
    EvalCounters ctr;
    if (pb.d == 1) {
        est.value = rays_value(pb, ctr);
        est.err = 0.0;  // radial rule error only; treated as converged
        est.n_evals = ctr.evals;
        return est;
    }

    int m = s.sphere_nodes > 0 ? s.sphere_nodes : default_chart_order(pb.d);
    m = std::max(m, 4);
    int threads = resolve_threads(s.threads);
    double target = s.target_rel_err > 0 ? s.target_rel_err
                                         : default_target_rel_err(Engine::deterministic);

    Chart coarse, fine;
    int rounds = s.adaptive ? 4 : 1;
    double value = 0.0, err = 0.0;
    for (int r = 0; r < rounds; ++r) {
        coarse.init(pb.d, std::max(4, m / 2), folded, extents);
        fine.init(pb.d, m, folded, extents);
        double v1 = chart_value(pb, coarse, threads, ctr);
        double v2 = chart_value(pb, fine, threads, ctr);
        value = v2;
        err = std::fabs(v2 - v1);
        if (err <= target * std::fabs(value)) break;
        m *= 2;
    }
    est.value = value;
    est.err = err;
    est.n_evals = ctr.evals;
    return est;
}

Estimate mc_integrate(const Problem& pb, const QuadScheme& s, const std::string& method) {
    std::size_t count = std::size_t(std::max(1, s.mc_samples));
    int threads = resolve_threads(s.threads);
    std::size_t n_chunks = (count + kChunk - 1) / kChunk;
    std::vector<double> psum(n_chunks, 0.0), psumsq(n_chunks, 0.0);
    std::vector<std::uint64_t> pevals(n_chunks, 0);

    for_chunks(count, threads, [&](std::size_t c, std::size_t beg, std::size_t len) {
        std::vector<double> ys(pb.d * len), contrib(len), norms(len);
        for (std::size_t i = 0; i < len; ++i) {
            Rng rng(s.seed, beg + i);
            for (std::size_t j = 0; j < pb.d; ++j) ys[j * len + i] = rng.normal();
        }
        EvalCounters local;
        eval_dirs(pb, ys.data(), len, contrib.data(), norms.data(), local);
        double acc = 0.0, accsq = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            acc += contrib[i];
            accsq += contrib[i] * contrib[i];
        }
        psum[c] = acc;
        psumsq[c] = accsq;
        pevals[c] = local.evals;
    });

    double sum = 0.0, sumsq = 0.0;
    std::uint64_t evals = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        sum += psum[c];
        sumsq += psumsq[c];
        evals += pevals[c];
    }
    double omega = sphere_surface(pb.d);
    double mean = sum / double(count);
    double var = std::max(0.0, sumsq / double(count) - mean * mean);

    Estimate est;
    est.method = method;
    est.value = omega * mean;
    est.err = omega * std::sqrt(var / double(count));
    est.n_evals = evals;
    return est;
}

bool density_sign_invariant(const Density& d) {
    return d.kind() != DensityKind::custom;
}

// basis columns that are all signed standard basis vectors keep
// unconditionality in section coordinates
bool axis_aligned(const std::vector<std::vector<double>>& basis) {
    for (const auto& b : basis) {
        int nonzero = 0;
        for (double c : b) {
            if (c == 0.0) continue;
            ++nonzero;
            if (c != 1.0 && c != -1.0) return false;
        }
        if (nonzero != 1) return false;
    }
    return true;
}

}  // namespace

Engine engine_from_string(const std::string& s) {
    if (s == "deterministic") return Engine::deterministic;
    if (s == "monte_carlo") return Engine::monte_carlo;
    if (s == "grid_oracle") return Engine::grid_oracle;
    throw std::invalid_argument("unknown engine: " + s);
}

std::string engine_to_string(Engine e) {
    switch (e) {
        case Engine::deterministic: return "deterministic";
        case Engine::monte_carlo: return "monte_carlo";
        case Engine::grid_oracle: return "grid_oracle";
    }
    return "?";
}

double default_target_rel_err(Engine e) {
    return e == Engine::deterministic ? 1e-6 : 1e-3;
}

int default_sphere_order(std::size_t dim) { return default_chart_order(dim); }

double sphere_surface(std::size_t n) {
    if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
    return std::exp(std::log(2.0) + 0.5 * double(n) * std::log(kPi) -
                    std::lgamma(0.5 * double(n)));
}

std::vector<std::vector<double>> hyperplane_basis(std::span<const double> xi) {
    double norm = linalg::norm2(xi);
    if (std::fabs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("hyperplane basis requires a unit vector");
    return detail::orthonormal_complement(xi);
}

Estimate integrate_body(const StarBody& body, const Density& d, const QuadScheme& s) {
    std::size_t n = body.dim();
    if (d.dim() != n) throw std::invalid_argument("body/density dimension mismatch");

    if (s.engine == Engine::grid_oracle) {
        int res = s.sphere_nodes > 0 ? s.sphere_nodes : 256;
        return grid_oracle_volume(body, d, res);
    }

    Problem pb;
    pb.body = &body;
    pb.density = &d;
    pb.basis = nullptr;
    pb.n = n;
    pb.d = n;
    pb.rad = make_radial_rule(std::max(1, s.radial_nodes), int(n) - 1);

    if (s.engine == Engine::monte_carlo) return mc_integrate(pb, s, "mc_sphere");

    if (n > 4)
        throw std::invalid_argument(
            "deterministic sphere rule is limited to n <= 4; use the monte_carlo engine");

    if (n == 1) {
        EvalCounters ctr;
        Estimate est;
        est.method = "det_rays";
        est.value = rays_value(pb, ctr);
        est.err = 0.0;
        est.n_evals = ctr.evals;
        return est;
    }

    std::vector<double> ext(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        ext[j] = body.radial_ray(e);
    }
    bool folded = body.flags().is_unconditional && density_sign_invariant(d);
    return det_integrate(pb, std::move(ext), folded, s, "det_chart");
}

Estimate integrate_section(const StarBody& body, const Density& d,
                           std::span<const double> xi, const QuadScheme& s) {
    std::size_t n = body.dim();
    if (d.dim() != n) throw std::invalid_argument("body/density dimension mismatch");
    if (xi.size() != n) throw std::invalid_argument("direction dimension mismatch");
    if (n < 2) throw std::invalid_argument("sections need n >= 2");
    double norm = linalg::norm2(xi);
    if (std::fabs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("section direction must be unit");
    if (s.engine == Engine::grid_oracle)
        throw std::invalid_argument("grid oracle supports body integrals only");

    auto basis = detail::orthonormal_complement(xi);

    Problem pb;
    pb.body = &body;
    pb.density = &d;
    pb.basis = &basis;
    pb.n = n;
    pb.d = n - 1;
    pb.rad = make_radial_rule(std::max(1, s.radial_nodes), int(n) - 2);

    if (s.engine == Engine::monte_carlo) return mc_integrate(pb, s, "mc_section");

    if (pb.d > 4)
        throw std::invalid_argument(
            "deterministic sphere rule is limited to section dimension <= 4; use the "
            "monte_carlo engine");

    if (pb.d == 1) {
        EvalCounters ctr;
        Estimate est;
        est.method = "det_rays";
        est.value = rays_value(pb, ctr);
        est.err = 0.0;
        est.n_evals = ctr.evals;
        return est;
    }

    std::vector<double> ext(pb.d);
    for (std::size_t j = 0; j < pb.d; ++j) ext[j] = body.radial_ray(basis[j]);
    bool folded = body.flags().is_unconditional && density_sign_invariant(d) &&
                  axis_aligned(basis);
    return det_integrate(pb, std::move(ext), folded, s, "det_section");
}

Estimate grid_oracle_volume(const StarBody& body, const Density& d, int resolution) {
    std::size_t n = body.dim();
    if (n > 3) throw std::invalid_argument("grid oracle is limited to n <= 3");
    if (d.dim() != n) throw std::invalid_argument("body/density dimension mismatch");
    if (resolution < 16) throw std::invalid_argument("grid resolution must be >= 16");

    // bounding radius from sampled radial values
    double max_rho = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        max_rho = std::max(max_rho, body.radial_ray(e));
    }
    for (std::size_t mask = 0; mask < (std::size_t(1) << (n - 1)); ++mask) {
        std::vector<double> diag(n, 1.0);
        for (std::size_t b = 0; b + 1 < n; ++b)
            if (mask >> b & 1) diag[b + 1] = -1.0;
        max_rho = std::max(max_rho, body.radial_ray(diag));
    }
    Rng rng(0x67726964, 0);
    for (int s = 0; s < 1024; ++s)
        max_rho = std::max(max_rho, body.radial_ray(rng.unit_vector(n)));
    double R = 1.01 * max_rho;

    std::size_t res = std::size_t(resolution);
    double h = 2.0 * R / double(res);
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= res;

    std::size_t n_chunks = (total + kChunk - 1) / kChunk;
    std::vector<double> psum(n_chunks, 0.0), pgmax(n_chunks, 0.0);
    bool lebesgue = d.kind() == DensityKind::lebesgue;

    for_chunks(total, resolve_threads(0), [&](std::size_t c, std::size_t beg,
                                              std::size_t len) {
        std::vector<double> xs(n * len), g(len), pt(n);
        for (std::size_t p = 0; p < len; ++p) {
            std::size_t idx = beg + p;
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t digit = idx % res;
                idx /= res;
                xs[j * len + p] = -R + (double(digit) + 0.5) * h;
            }
        }
        body.minkowski_batch(xs.data(), len, g.data());
        double acc = 0.0, gmax = 0.0;
        for (std::size_t p = 0; p < len; ++p) {
            if (g[p] > 1.0) continue;
            double dv = 1.0;
            if (!lebesgue) {
                for (std::size_t j = 0; j < n; ++j) pt[j] = xs[j * len + p];
                dv = d(pt);
            }
            acc += dv;
            gmax = std::max(gmax, dv);
        }
        psum[c] = acc;
        pgmax[c] = gmax;
    });

    double sum = 0.0, gmax = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        sum += psum[c];
        gmax = std::max(gmax, pgmax[c]);
    }

    Estimate est;
    est.method = "grid";
    est.value = sum * pow_int(h, n);
    est.err = gmax * 2.0 * double(n) * pow_int(2.0 * R, n - 1) * h;
    est.n_evals = total;
    return est;
}

}  // namespace slicelab
