#include "tanbound/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace tanbound {

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) + index);
}

namespace {

// Uniform doubles in [0,1) from the generator's top 53 bits; hand-rolled so
// streams do not depend on the standard library's distribution internals.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_uniform(rng_);
        } while (u1 <= 0.0);
        const double u2 = next_uniform(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    GaussianStream stream(seed);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = stream.next();
            const double im = stream.next();
            m(i, j) = Complex(re, im);
        }
    return m;
}

}  // namespace detail

Eigen::MatrixXcd haar_unitary(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) fail(errc::invalid_argument, "unitary dimension must be >= 1");
    return detail::qr_phase_normalized(detail::gaussian_matrix(n, n, seed));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dist_to_interval(double x, double lo, double hi) {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

void validate_spec(const InstanceSpec& spec) {
    const Eigen::Index n = spec.n;
    const Eigen::Index k = spec.k;
    if (n < 2 || k < 1 || k > n - 1)
        fail(errc::invalid_argument,
             "instance needs n >= 2 and 1 <= k <= n-1, got n=" + std::to_string(n) +
                 " k=" + std::to_string(k));
    if (static_cast<Eigen::Index>(spec.exterior_eigs.size()) != k)
        fail(errc::invalid_argument, "exterior eigenvalue list must have length k");
    if (static_cast<Eigen::Index>(spec.interior_eigs.size()) != n - k)
        fail(errc::invalid_argument, "interior eigenvalue list must have length n-k");
    if (!(spec.perturbation_eps >= 0.0))
        fail(errc::invalid_argument, "perturbation must be nonnegative");

    const auto [ilo, ihi] =
        std::minmax_element(spec.interior_eigs.begin(), spec.interior_eigs.end());
    double separation = std::numeric_limits<double>::infinity();
    for (double ext : spec.exterior_eigs)
        separation = std::min(separation, dist_to_interval(ext, *ilo, *ihi));
    if (!(separation > 0.0))
        fail(errc::invalid_argument, "declared exterior/interior separation is not positive");
}

}  // namespace

SynthInstance synth_instance(const InstanceSpec& spec) {
    if (spec.kind == InstanceSpec::Kind::counterexample) {
        auto [a, q1] = canonical_counterexample();
        return SynthInstance{std::move(a), std::move(q1), std::nullopt};
    }
    validate_spec(spec);

    const Eigen::Index n = spec.n;
    const Eigen::Index k = spec.k;

    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < k; ++i) lambda(i) = spec.exterior_eigs[i];
    for (Eigen::Index i = k; i < n; ++i) lambda(i) = spec.interior_eigs[i - k];

    const Eigen::MatrixXcd x = haar_unitary(n, spec.seed);
    const Eigen::MatrixXcd a_raw = x * lambda.asDiagonal() * x.adjoint();
    HermitianMatrix a = validate_hermitian(a_raw);

    OrthonormalFrame x1 = OrthonormalFrame::validated(x.leftCols(k));
    const Eigen::MatrixXcd noise =
        detail::gaussian_matrix(n, k, detail::splitmix64(spec.seed));
    OrthonormalFrame q1 = orthonormalize(x1.cols() + spec.perturbation_eps * noise);

    return SynthInstance{std::move(a), std::move(q1), std::move(x1)};
}

SweepResult run_sweep(const std::vector<InstanceSpec>& specs) {
    return run_sweep(specs, [](const SweepRow&) {});
}

SweepResult run_sweep(const std::vector<InstanceSpec>& specs,
                      const std::function<void(const SweepRow&)>& sink) {
    if (specs.empty()) fail(errc::invalid_argument, "sweep needs at least one instance");

    SweepResult result;
    result.instances = specs.size();

    for (std::size_t index = 0; index < specs.size(); ++index) {
        const InstanceSpec& spec = specs[index];
        const SynthInstance inst = synth_instance(spec);
        const AprioriCertificate cert = certify_apriori(inst.a, inst.q1);

        SweepRow row;
        row.instance = index;
        row.seed = spec.seed;
        row.n = inst.a.n();
        row.k = inst.q1.k();
        row.rho = cert.rho;
        row.gap = cert.window ? cert.window->gap : kNaN;
        row.tan_bound = cert.tan_bound;
        row.exact_tan = kNaN;
        row.ratio = kNaN;

        if (!cert.valid) {
            ++result.failures_by_reason[*cert.failure_reason];
            row.status = failure_reason_name(*cert.failure_reason);
            sink(row);
            continue;
        }

        const Spectrum spec_a = hermitian_spectrum(inst.a, true);
        const OrthonormalFrame x1 =
            exact_subspace(spec_a, *cert.window, SubspaceSelect::exterior);

        const double angle = principal_angles(inst.q1, x1).largest();
        row.exact_tan = std::tan(angle);
        row.ratio = cert.tan_bound <= 1e-10 ? 0.0 : row.exact_tan / cert.tan_bound;
        result.max_tightness = std::max(result.max_tightness, row.ratio);

        const bool bound_ok = row.exact_tan <= cert.tan_bound + 1e-9 * (1.0 + cert.tan_bound);
        const bool enclosure_ok = enclosure_check(spec_a, cert);

        const double tol = 1e-9 * (1.0 + spec_a.values.cwiseAbs().maxCoeff());
        Eigen::Index exterior_count = 0;
        for (Eigen::Index i = 0; i < spec_a.values.size(); ++i) {
            const double dist =
                dist_to_interval(spec_a.values(i), cert.window->lo, cert.window->hi);
            if (dist >= cert.window->gap - tol) ++exterior_count;
        }
        const bool count_ok = exterior_count == cert.k;

        // The midpoint selector can return more than k columns when delta_r
        // exceeds gap/2 (an enclosure-edge eigenvalue lands past the
        // threshold). Appending columns can only raise each singular value,
        // so the sigma >= cos(angle bound) test stays valid on the wide
        // cross-Gram too.
        const double sigma =
            x1.k() == inst.q1.k()
                ? lemma_intersection_check(inst.q1, x1)
                : detail::smallest_singular_value(inst.q1.cols().adjoint() * x1.cols());
        const bool lemma_ok = sigma > 0.0 && sigma >= std::cos(cert.angle_bound) - 1e-9;

        std::string status;
        const auto note = [&status](const char* label) {
            if (!status.empty()) status += '+';
            status += label;
        };
        if (!bound_ok) {
            ++result.bound_violations;
            note("BOUND_VIOLATION");
        }
        if (!enclosure_ok) {
            ++result.enclosure_violations;
            note("ENCLOSURE_VIOLATION");
        }
        if (!count_ok) {
            ++result.count_violations;
            note("COUNT_VIOLATION");
        }
        if (!lemma_ok) {
            ++result.lemma_violations;
            note("LEMMA_VIOLATION");
        }
        row.status = status.empty() ? "OK" : status;
        sink(row);
    }

    result.violations = result.bound_violations + result.enclosure_violations +
                        result.count_violations + result.lemma_violations;
    return result;
}

std::vector<SharpnessRow> sharpness_probe(const std::vector<double>& eps_grid) {
    std::vector<SharpnessRow> rows;
    rows.reserve(eps_grid.size());

    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps < 1.0))
            fail(errc::invalid_argument, "probe needs 0 < eps < 1");

        Eigen::MatrixXcd raw(2, 2);
        raw << 2.0, eps, eps, 0.0;
        const HermitianMatrix a = validate_hermitian(raw);
        const OrthonormalFrame q1 =
            OrthonormalFrame::validated(Eigen::MatrixXcd::Identity(2, 2).leftCols(1));

        const AprioriCertificate cert = certify_apriori(a, q1);
        const Spectrum spec_a = hermitian_spectrum(a, true);
        const OrthonormalFrame x1 =
            exact_subspace(spec_a, *cert.window, SubspaceSelect::exterior);
        const double exact_tan = std::tan(principal_angles(q1, x1).largest());

        rows.push_back(SharpnessRow{eps, cert.tan_bound, exact_tan, exact_tan / cert.tan_bound});
    }
    return rows;
}

std::vector<InstanceSpec> random_spec_list(const EnsembleConfig& config) {
    if (config.n_min < 2 || config.n_min > config.n_max || config.n_max > 4096)
        fail(errc::invalid_argument, "need 2 <= n_min <= n_max <= 4096");
    if (!(config.eps_min > 0.0) || !(config.eps_min <= config.eps_max))
        fail(errc::invalid_argument, "need 0 < eps_min <= eps_max");

    std::vector<InstanceSpec> specs;
    specs.reserve(config.count + (config.include_counterexample ? 1 : 0));

    for (std::size_t i = 0; i < config.count; ++i) {
        const std::uint64_t seed = detail::derive_seed(config.master_seed, i);
        std::mt19937_64 rng(seed);
        const auto uniform = [&rng] { return detail::next_uniform(rng); };

        InstanceSpec spec;
        spec.n = config.n_min +
                 static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(
                                                       config.n_max - config.n_min + 1));
        spec.k = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(spec.n - 1));
        spec.seed = detail::splitmix64(seed);
        spec.perturbation_eps =
            std::exp(std::log(config.eps_min) +
                     uniform() * (std::log(config.eps_max) - std::log(config.eps_min)));

        // Interior cluster inside [-1,1]; exterior eigenvalues pushed out by
        // a per-instance margin, with random signs.
        const double margin = std::exp(std::log(0.25) + uniform() * std::log(4.0 / 0.25));
        spec.interior_eigs.resize(spec.n - spec.k);
        for (double& value : spec.interior_eigs) value = 2.0 * uniform() - 1.0;
        spec.exterior_eigs.resize(spec.k);
        for (double& value : spec.exterior_eigs) {
            const double magnitude = 1.0 + margin + 2.0 * uniform();
            value = (rng() & 1u) ? magnitude : -magnitude;
        }
        specs.push_back(std::move(spec));
    }

    if (config.include_counterexample) {
        InstanceSpec spec;
        spec.kind = InstanceSpec::Kind::counterexample;
        spec.n = 3;
        spec.k = 2;
        specs.push_back(std::move(spec));
    }
    return specs;
}

}  // namespace tanbound
