#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tanbound/certify.hpp"

namespace tanbound {

/// Recipe for one reproducible test instance: A = X·diag(exterior_eigs,
/// interior_eigs)·Xᴴ with X Haar unitary from `seed`, and Q1 the
/// orthonormalized perturbation of the first k columns of X by
/// perturbation_eps times a seeded Gaussian. The counterexample kind ignores
/// the numeric fields and stands for the canonical 3×3 pair.
struct InstanceSpec {
    enum class Kind { synthetic, counterexample };

    Kind kind = Kind::synthetic;
    Eigen::Index n = 0;
    Eigen::Index k = 0;
    std::vector<double> exterior_eigs;  // length k
    std::vector<double> interior_eigs;  // length n−k
    double perturbation_eps = 0.0;
    std::uint64_t seed = 0;
};

/// Instance realized from a spec. x1 is the exact invariant frame the
/// perturbation started from; absent for the counterexample kind, whose
/// hypotheses fail before any oracle comparison.
struct SynthInstance {
    HermitianMatrix a;
    OrthonormalFrame q1;
    std::optional<OrthonormalFrame> x1;
};

/// One CSV-able record per swept instance. Numeric fields that a failed
/// certificate leaves undefined are NaN.
struct SweepRow {
    std::size_t instance;
    std::uint64_t seed;
    Eigen::Index n;
    Eigen::Index k;
    double rho;
    double gap;
    double tan_bound;
    double exact_tan;
    double ratio;
    std::string status;  // "OK", a violation label, or a failure reason
};

/// Aggregate of a sweep. violations counts valid certificates whose claims
/// were contradicted by the oracle (the sum of the per-category counters);
/// failures_by_reason counts instances whose hypotheses did not hold, which
/// is expected behavior, not a defect.
struct SweepResult {
    std::size_t instances = 0;
    std::size_t violations = 0;
    double max_tightness = 0.0;  // max over valid instances of exact_tan/tan_bound
    std::map<FailureReason, std::size_t> failures_by_reason;

    std::size_t bound_violations = 0;
    std::size_t enclosure_violations = 0;
    std::size_t count_violations = 0;
    std::size_t lemma_violations = 0;
};

/// Haar-distributed n×n unitary: QR of a seeded complex Gaussian matrix with
/// the triangular factor's diagonal phases absorbed into Q. Deterministic
/// for a fixed seed.
Eigen::MatrixXcd haar_unitary(Eigen::Index n, std::uint64_t seed);

SynthInstance synth_instance(const InstanceSpec& spec);

/// Certify every instance, compare each valid certificate against the exact
/// eigendecomposition (bound soundness, enclosure, exterior count, frame
/// intersection), and aggregate. The optional sink receives one row per
/// instance in order.
SweepResult run_sweep(const std::vector<InstanceSpec>& specs);
SweepResult run_sweep(const std::vector<InstanceSpec>& specs,
                      const std::function<void(const SweepRow&)>& sink);

/// One probe point on the family A(ε) = [[2,ε],[ε,0]], Q1 = e1, whose bound
/// ε/2 is approached by the exact tangent as ε ↓ 0.
struct SharpnessRow {
    double eps;
    double tan_bound;
    double exact_tan;
    double ratio;
};

/// Probes the sharp family at each ε ∈ (0,1); ratio = exact_tan/tan_bound.
std::vector<SharpnessRow> sharpness_probe(const std::vector<double>& eps_grid);

/// Knobs for random_spec_list; the defaults match the standard soundness
/// ensemble (n in {4..64}, any k, ε log-uniform in [1e-6, 0.3]).
struct EnsembleConfig {
    std::size_t count = 100;
    std::uint64_t master_seed = 1;
    Eigen::Index n_min = 4;
    Eigen::Index n_max = 64;
    double eps_min = 1e-6;
    double eps_max = 0.3;
    bool include_counterexample = false;
};

/// Deterministic list of random instance specs; per-instance seeds are
/// derived from master_seed and the index, so any sublist reproduces the
/// same instances. When asked, appends the counterexample spec at the end.
std::vector<InstanceSpec> random_spec_list(const EnsembleConfig& config);

namespace detail {

/// splitmix64 step; also the per-index seed derivation hash.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Seeded rows×cols matrix of standard complex Gaussians (Box–Muller over
/// mt19937_64 uniforms); deterministic for a fixed seed.
Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

}  // namespace detail

}  // namespace tanbound
