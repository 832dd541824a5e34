#include "slicelab/bodies.hpp"

#include "slicelab/kernels.hpp"
#include "slicelab/linalg.hpp"
#include "slicelab/rng.hpp"
#include "slicelab/sphere_opt.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slicelab {
namespace detail {

class BodyCore {
public:
    explicit BodyCore(std::size_t n) : n_(n) {}
    virtual ~BodyCore() = default;

    std::size_t dim() const { return n_; }

    // x is one contiguous point of dim() coordinates
    virtual double gauge(const double* x) const = 0;

    // xs is coordinate-major: xs[j*count + i] = coordinate j of point i
    virtual void gauge_batch(const double* xs, std::size_t count, double* out) const {
        std::vector<double> pt(n_);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < n_; ++j) pt[j] = xs[j * count + i];
            out[i] = gauge(pt.data());
        }
    }

private:
    std::size_t n_;
};

namespace {

class LpCore final : public BodyCore {
public:
    LpCore(std::size_t n, double p, std::vector<double> inv_w)
        : BodyCore(n), p_(p), inv_w_(std::move(inv_w)) {}

    double gauge(const double* x) const override {
        double out;
        gauge_batch(x, 1, &out);  // count=1 batch layout equals a contiguous point
        return out;
    }

    void gauge_batch(const double* xs, std::size_t count, double* out) const override {
        const double* iw = inv_w_.empty() ? nullptr : inv_w_.data();
        const auto& k = kernels::active();
        std::size_t n = dim();
        if (p_ == 1.0) {
            k.sum_abs(xs, count, n, iw, out);
        } else if (p_ == 2.0) {
            k.sum_sq(xs, count, n, iw, out);
            k.vsqrt(out, out, count);
        } else if (std::isinf(p_)) {
            k.max_abs(xs, count, n, iw, out);
        } else {
            k.sum_abs_pow(xs, count, n, iw, p_, out);
            k.vpow_abs(out, 1.0 / p_, out, count);
        }
    }

    double p() const { return p_; }
    const std::vector<double>& inv_weights() const { return inv_w_; }

private:
    double p_;
    std::vector<double> inv_w_;  // empty means all ones
};

class ImageCore final : public BodyCore {
public:
    ImageCore(std::shared_ptr<const BodyCore> base, std::vector<double> fwd,
              std::vector<double> inv, bool diagonal)
        : BodyCore(base->dim()),
          base_(std::move(base)),
          fwd_(std::move(fwd)),
          inv_(std::move(inv)),
          diagonal_(diagonal) {
        if (diagonal_) {
            std::size_t n = dim();
            inv_diag_.resize(n);
            for (std::size_t j = 0; j < n; ++j) inv_diag_[j] = inv_[j * n + j];
        }
    }

    double gauge(const double* x) const override {
        std::size_t n = dim();
        // local storage: nested image cores must not share a scratch buffer
        double stack_buf[16];
        std::vector<double> heap_buf;
        double* y = stack_buf;
        if (n > 16) {
            heap_buf.resize(n);
            y = heap_buf.data();
        }
        if (diagonal_) {
            for (std::size_t j = 0; j < n; ++j) y[j] = inv_diag_[j] * x[j];
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += inv_[j * n + k] * x[k];
                y[j] = s;
            }
        }
        return base_->gauge(y);
    }

    void gauge_batch(const double* xs, std::size_t count, double* out) const override {
        std::size_t n = dim();
        const auto& k = kernels::active();
        // transformed batch lives past base_ call, so it needs its own buffer
        std::vector<double> ys(n * count);
        if (diagonal_) {
            for (std::size_t j = 0; j < n; ++j)
                k.scale(xs + j * count, inv_diag_[j], ys.data() + j * count, count);
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                double* row = ys.data() + j * count;
                k.scale(xs, inv_[j * n], row, count);
                for (std::size_t c = 1; c < n; ++c)
                    k.axpy(inv_[j * n + c], xs + c * count, row, count);
            }
        }
        base_->gauge_batch(ys.data(), count, out);
    }

    const std::shared_ptr<const BodyCore>& base() const { return base_; }
    const std::vector<double>& fwd() const { return fwd_; }
    const std::vector<double>& inv() const { return inv_; }
    bool diagonal() const { return diagonal_; }

private:
    std::shared_ptr<const BodyCore> base_;
    std::vector<double> fwd_, inv_;
    bool diagonal_;
    std::vector<double> inv_diag_;
};

class SupportCore final : public BodyCore {
public:
    SupportCore(std::shared_ptr<const BodyCore> base, SupportSearchConfig cfg)
        : BodyCore(base->dim()), base_(std::move(base)), cfg_(cfg) {}

    double gauge(const double* x) const override {
        std::size_t n = dim();
        std::vector<double> u(x, x + n);
        for (auto& c : u) {
            if (c != 0.0) {
                if (c < 0.0)
                    for (auto& v : u) v = -v;
                break;
            }
        }
        double norm = linalg::norm2(u);
        if (norm == 0.0) return 0.0;
        for (auto& c : u) c /= norm;

        SphereOptConfig scfg;
        scfg.starts = cfg_.starts;
        scfg.max_iters = cfg_.max_iters;
        scfg.step_init = cfg_.step_init;
        scfg.step_min = cfg_.step_min;
        scfg.seed = cfg_.seed;
        auto res = maximize_on_sphere(
            n,
            [&](std::span<const double> theta) {
                return linalg::dot(u, theta) / base_->gauge(theta.data());
            },
            scfg, {u});
        return norm * res.value;
    }

    const std::shared_ptr<const BodyCore>& base() const { return base_; }

private:
    std::shared_ptr<const BodyCore> base_;
    SupportSearchConfig cfg_;
};

class CustomCore final : public BodyCore {
public:
    CustomCore(std::size_t n, std::function<double(std::span<const double>)> fn)
        : BodyCore(n), fn_(std::move(fn)) {}

    double gauge(const double* x) const override {
        return fn_(std::span<const double>(x, dim()));
    }

private:
    std::function<double(std::span<const double>)> fn_;
};

class RadialCore final : public BodyCore {
public:
    RadialCore(std::size_t n, std::function<double(std::span<const double>)> radial_fn)
        : BodyCore(n), radial_(std::move(radial_fn)) {}

    double gauge(const double* x) const override {
        std::size_t n = dim();
        std::vector<double> u(x, x + n);
        for (auto& c : u) {
            if (c != 0.0) {
                if (c < 0.0)
                    for (auto& v : u) v = -v;
                break;
            }
        }
        double norm = linalg::norm2(u);
        if (norm == 0.0) return 0.0;
        for (auto& c : u) c /= norm;
        double r = radial_(u);
        if (!(r > 0.0)) throw std::runtime_error("radial oracle returned non-positive value");
        return norm / r;
    }

private:
    std::function<double(std::span<const double>)> radial_;
};

bool core_is_intersection_body(const BodyCore& core) {
    if (auto* lp = dynamic_cast<const LpCore*>(&core))
        return lp->p() == 1.0 || lp->p() == 2.0;
    if (auto* img = dynamic_cast<const ImageCore*>(&core))
        return core_is_intersection_body(*img->base());
    return false;
}

}  // namespace
}  // namespace detail

using detail::BodyCore;

DiagonalMap::DiagonalMap(std::vector<double> d) : diag(std::move(d)) {
    if (diag.empty()) throw std::invalid_argument("diagonal map needs entries");
    for (double t : diag)
        if (!(t > 0.0)) throw std::invalid_argument("diagonal entries must be positive");
}

double DiagonalMap::determinant() const {
    double det = 1.0;
    for (double t : diag) det *= t;
    return det;
}

StarBody::StarBody(std::shared_ptr<const BodyCore> core, BodyFlags flags,
                   std::string label)
    : core_(std::move(core)), flags_(flags), label_(std::move(label)) {}

std::size_t StarBody::dim() const { return core_->dim(); }
const BodyFlags& StarBody::flags() const { return flags_; }
const std::string& StarBody::label() const { return label_; }

double StarBody::minkowski(std::span<const double> x) const {
    if (x.size() != dim()) throw std::invalid_argument("point dimension mismatch");
    return core_->gauge(x.data());
}

void StarBody::minkowski_batch(const double* xs, std::size_t count, double* out) const {
    core_->gauge_batch(xs, count, out);
}

double StarBody::radial(std::span<const double> theta) const {
    if (theta.size() != dim()) throw std::invalid_argument("direction dimension mismatch");
    double norm = linalg::norm2(theta);
    if (std::fabs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("radial requires a unit direction");
    double g = core_->gauge(theta.data());
    if (!(g > 0.0)) throw std::runtime_error("degenerate gauge along direction");
    return 1.0 / g;
}

double StarBody::radial_ray(std::span<const double> dir) const {
    if (dir.size() != dim()) throw std::invalid_argument("direction dimension mismatch");
    double norm = linalg::norm2(dir);
    if (norm == 0.0) throw std::invalid_argument("zero direction");
    double g = core_->gauge(dir.data());
    if (!(g > 0.0)) throw std::runtime_error("degenerate gauge along direction");
    return norm / g;
}

namespace {

std::string format_scalar(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string default_lp_label(std::size_t n, double p, const std::vector<double>& w) {
    std::ostringstream os;
    os << "B" << (std::isinf(p) ? "inf" : format_scalar(p)) << "^" << n;
    if (!w.empty()) {
        os << "[w=";
        for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
        os << "]";
    }
    return os.str();
}

}  // namespace

StarBody make_lp_ball(std::size_t n, double p, std::vector<double> weights,
                      std::string label) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive or infinite");
    std::vector<double> inv_w;
    if (!weights.empty()) {
        if (weights.size() != n) throw std::invalid_argument("weights length mismatch");
        inv_w.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(weights[i] > 0.0))
                throw std::invalid_argument("weights must be positive");
            inv_w[i] = 1.0 / weights[i];
        }
    }
    BodyFlags flags;
    flags.is_unconditional = true;
    flags.is_convex = (p >= 1.0);
    flags.is_intersection_body = (p == 1.0 || p == 2.0);
    if (label.empty()) label = default_lp_label(n, p, weights);
    return StarBody(std::make_shared<detail::LpCore>(n, p, std::move(inv_w)), flags,
                    std::move(label));
}

StarBody linear_image(const StarBody& body, const std::vector<double>& matrix,
                      std::string label) {
    std::size_t n = body.dim();
    if (matrix.size() != n * n) throw std::invalid_argument("matrix size mismatch");
    auto inv = linalg::invert(matrix, n);
    bool diagonal = true;
    for (std::size_t i = 0; i < n && diagonal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && matrix[i * n + j] != 0.0) {
                diagonal = false;
                break;
            }
    BodyFlags flags = body.flags();
    flags.is_unconditional = body.flags().is_unconditional && diagonal;
    if (label.empty()) label = "T·" + body.label();
    return StarBody(std::make_shared<detail::ImageCore>(body.core_ptr(), matrix,
                                                        std::move(inv), diagonal),
                    flags, std::move(label));
}

StarBody linear_image(const StarBody& body, const DiagonalMap& map, std::string label) {
    std::size_t n = body.dim();
    if (map.diag.size() != n) throw std::invalid_argument("diagonal size mismatch");
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = map.diag[i];
    if (label.empty()) {
        std::ostringstream os;
        os << "diag(";
        for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << map.diag[i];
        os << ")·" << body.label();
        label = os.str();
    }
    return linear_image(body, m, std::move(label));
}

StarBody scale_body(const StarBody& body, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("scale must be positive");
    std::ostringstream os;
    os << s << "·" << body.label();
    return linear_image(body, DiagonalMap(std::vector<double>(body.dim(), s)), os.str());
}

namespace {

StarBody polar_of_core(std::shared_ptr<const BodyCore> core, const StarBody& original,
                       const SupportSearchConfig& cfg, std::string label);

}  // namespace

StarBody polar(const StarBody& body, const SupportSearchConfig& cfg) {
    if (!body.flags().is_convex)
        throw std::invalid_argument("polar requires a convex body");
    return polar_of_core(body.core_ptr(), body, cfg, "polar(" + body.label() + ")");
}

namespace {

StarBody polar_of_core(std::shared_ptr<const BodyCore> core, const StarBody& original,
                       const SupportSearchConfig& cfg, std::string label) {
    std::size_t n = core->dim();
    BodyFlags flags;
    flags.is_convex = true;
    flags.is_unconditional = original.flags().is_unconditional;

    if (auto* lp = dynamic_cast<const detail::LpCore*>(core.get())) {
        double p = lp->p();
        double q;
        if (p == 1.0)
            q = kInf;
        else if (std::isinf(p))
            q = 1.0;
        else if (p > 1.0)
            q = p / (p - 1.0);
        else
            throw std::invalid_argument("polar requires p >= 1");
        // dual of (sum |x_i/w_i|^p)^{1/p} is (sum |w_i x_i|^q)^{1/q}
        std::vector<double> dual_inv_w;
        const auto& iw = lp->inv_weights();
        if (!iw.empty()) {
            dual_inv_w.resize(n);
            for (std::size_t i = 0; i < n; ++i) dual_inv_w[i] = 1.0 / iw[i];
        }
        auto dual = std::make_shared<detail::LpCore>(n, q, std::move(dual_inv_w));
        flags.is_intersection_body = detail::core_is_intersection_body(*dual);
        return StarBody(dual, flags, std::move(label));
    }

    if (auto* img = dynamic_cast<const detail::ImageCore*>(core.get())) {
        // (T B)° = T^{-T} B°
        StarBody base_polar =
            polar_of_core(img->base(), original, cfg, label + "/base");
        auto fwd = linalg::transpose(img->inv(), n);
        auto inv = linalg::transpose(img->fwd(), n);
        auto dual = std::make_shared<detail::ImageCore>(base_polar.core_ptr(),
                                                        std::move(fwd), std::move(inv),
                                                        img->diagonal());
        flags.is_intersection_body = detail::core_is_intersection_body(*dual);
        return StarBody(dual, flags, std::move(label));
    }

    if (auto* sup = dynamic_cast<const detail::SupportCore*>(core.get())) {
        // bipolar: the polar of a support-function body is the body it wraps
        flags.is_intersection_body = detail::core_is_intersection_body(*sup->base());
        return StarBody(sup->base(), flags, std::move(label));
    }

    flags.is_intersection_body = false;
    return StarBody(std::make_shared<detail::SupportCore>(std::move(core), cfg), flags,
                    std::move(label));
}

}  // namespace

StarBody custom_body(std::size_t n,
                     std::function<double(std::span<const double>)> gauge,
                     BodyFlags flags, std::string label) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!gauge) throw std::invalid_argument("gauge oracle required");
    return StarBody(std::make_shared<detail::CustomCore>(n, std::move(gauge)), flags,
                    std::move(label));
}

StarBody custom_radial_body(std::size_t n,
                            std::function<double(std::span<const double>)> radial_fn,
                            BodyFlags flags, std::string label) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!radial_fn) throw std::invalid_argument("radial oracle required");
    return StarBody(std::make_shared<detail::RadialCore>(n, std::move(radial_fn)), flags,
                    std::move(label));
}

StarBody override_flags(const StarBody& body, BodyFlags flags) {
    return StarBody(body.core_ptr(), flags, body.label());
}

UnconditionalityReport unconditionality_witness(const StarBody& body, int sample_count,
                                                std::uint64_t seed) {
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    std::size_t n = body.dim();
    Rng rng(seed, 0x756e63);
    UnconditionalityReport rep;
    std::vector<double> x(n), flipped(n);
    std::vector<int> signs(n);
    for (int s = 0; s < sample_count; ++s) {
        for (auto& c : x) c = rng.normal();
        bool any_flip = false;
        for (std::size_t i = 0; i < n; ++i) {
            signs[i] = (rng.next() & 1) ? -1 : 1;
            if (signs[i] < 0) any_flip = true;
            flipped[i] = signs[i] * x[i];
        }
        if (!any_flip && n > 0) {
            signs[s % n] = -1;
            flipped[s % n] = -x[s % n];
        }
        double dev = std::fabs(body.minkowski(flipped) - body.minkowski(x));
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_x = x;
            rep.worst_signs = signs;
        }
    }
    return rep;
}

double minkowski(const StarBody& body, std::span<const double> x) {
    return body.minkowski(x);
}

double radial(const StarBody& body, std::span<const double> theta) {
    return body.radial(theta);
}

}  // namespace slicelab
