#pragma once

#include "slicelab/bodies.hpp"
#include "slicelab/factorization.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/quadrature.hpp"
#include "slicelab/sections.hpp"
#include "slicelab/sphere_opt.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slicelab {

// |B_2^n|
double ball_volume(std::size_t n);

// c_n = |B_2^n|^{(n-1)/n} / |B_2^{n-1}|; strictly below 1, decreasing in n,
// above the limit e^{-1/2}
double section_constant(std::size_t n);

// sqrt(n) * n/(n-1) * c_n, the multiplier used without unconditionality
double general_constant(std::size_t n);

struct CheckOptions {
    SphereOptConfig search;
    OrthantPolicy orthant = OrthantPolicy::automatic;
};

// Verdict for one inequality instance. rhs_components holds the named
// factors that reconstruct rhs; extras are report-only diagnostics.
// pass is equivalent to ratio <= 1 + error_budget.
struct InequalityReport {
    std::string inequality_id;
    std::string body_label;
    std::string density_label;
    std::size_t n = 0;
    Estimate lhs;
    double rhs = 0.0;
    double ratio = 0.0;
    double constant = 0.0;
    double error_budget = 0.0;
    bool pass = false;
    bool retried = false;  // verdict comes from a re-run at boosted effort
    std::map<std::string, double> rhs_components;
    std::map<std::string, double> extras;
    std::vector<double> xi_star;
    std::vector<double> box_t;          // box factorization witness
    std::vector<double> ellipsoid_axes;  // inscribed ellipsoid of the polar
    std::uint64_t seed = 0;
    std::string engine;
};

// measure(body) <= e * max-section * |body|^{1/n}; requires an unconditional
// convex body. Also records the box-factorization route to the same bound
// and the empirical constant that would make it an equality.
InequalityReport check_hyperplane_unconditional(const StarBody& body,
                                                const Density& d,
                                                const QuadScheme& s,
                                                const CheckOptions& co = {});

// measure(body) <= sqrt(n) * n/(n-1) * c_n * max-section * |body|^{1/n};
// requires convexity only.
InequalityReport check_hyperplane_general(const StarBody& body, const Density& d,
                                          const QuadScheme& s,
                                          const CheckOptions& co = {});

// Lebesgue specialization: the unconditional form when the body qualifies,
// the general form otherwise.
InequalityReport check_hyperplane_volume(const StarBody& body, const QuadScheme& s,
                                         const CheckOptions& co = {});

// Excess mass on K, either as an even continuous f >= 1 on K or as
// f = 1 + g on an inner body L ⊆ K and 1 on K \ L.
struct StabilitySpec {
    StarBody body;
    std::optional<StarBody> inner;
    std::optional<Density> excess;
    std::function<double(std::span<const double>)> f;
    std::string f_label;

    bool composite() const { return inner.has_value(); }
};

StabilitySpec direct_stability(StarBody body,
                               std::function<double(std::span<const double>)> f,
                               std::string f_label);
StabilitySpec composite_stability(StarBody body, StarBody inner, Density excess);

// integral of f over K <= |K| + n/(n-1) * c_n * |K|^{1/n} * eps with
// eps = max over xi of the section excess; K must carry the
// is_intersection_body flag.
InequalityReport check_stability(const StabilitySpec& spec, const QuadScheme& s,
                                 const CheckOptions& co = {});

// measure(body) <= e * vr(polar) * max-section * |body|^{1/n}, where
// vr(polar) is the (upper bound on the) volume ratio of the polar body.
// The gate constant e is a policy; the empirical constant is recorded.
InequalityReport check_dual_vr(const StarBody& body, const Density& d,
                               const QuadScheme& s, const CheckOptions& co = {});

struct DensitySpec {
    DensityKind kind = DensityKind::lebesgue;
    double param = 0.0;
};

Density materialize(const DensitySpec& spec, std::size_t n);

struct ExperimentConfig {
    std::vector<StarBody> bodies;
    std::vector<DensitySpec> densities;
    std::vector<std::string> checks;  // eq1 | eq2 | eq3 | prop1 | thm2
    QuadScheme quad;
    CheckOptions options;
};

struct ExperimentRun {
    std::vector<InequalityReport> reports;  // checks-major, then bodies, densities
    std::vector<std::string> notices;       // skipped cells with reasons
    bool all_pass = true;
};

// Runs the cross product checks x bodies x densities. Cells whose body does
// not meet a check's hypothesis are skipped with a notice. Cells run
// concurrently; per-cell seeds derive from quad.seed and the cell index, so
// the outcome is independent of scheduling.
ExperimentRun run_experiment(const ExperimentConfig& cfg);

}  // namespace slicelab
