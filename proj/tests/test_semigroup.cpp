#include <cohest/hodge.hpp>
#include <cohest/semigroup.hpp>

#include "oracles.hpp"

#include <catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace cohest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// 60-digit reference values for the spectrum {0, 2} with s = 1, t0 = 250.
constexpr double kEntropy02 = 59.236127155971570361811160825;
constexpr double kExpMinus2 = 0.135335283236612691893999494972;

Spectrum random_spectrum(std::mt19937_64& rng, std::size_t n, double lmax, std::size_t zeros)
{
    std::uniform_real_distribution<double> u(0.0, lmax);
    Spectrum sp;
    sp.eigenvalues.assign(zeros, 0.0);
    while (sp.eigenvalues.size() < n)
        sp.eigenvalues.push_back(u(rng));
    std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end());
    return sp;
}

/// Random symmetric PSD matrix with a kernel of the given dimension and
/// spectrum in [0, lmax].
Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n, int kernel, double lmax)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a.data()[i] = g(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i)
        d(i) = i < kernel ? 0.0 : lmax * u(rng);
    const Eigen::MatrixXd L = Q * d.asDiagonal() * Q.transpose();
    return 0.5 * (L + L.transpose());
}

struct DenseCriteria
{
    double entropy, hs, trace;
};

/// The three criteria from explicit matrix exponentials (and a matrix log of
/// rho); no eigendecomposition of L is involved.
DenseCriteria dense_route(const Eigen::MatrixXd& L, double s, double t0)
{
    const Eigen::MatrixXd es = (-s * L).exp();
    const Eigen::MatrixXd et = (-t0 * L).exp();
    const Eigen::MatrixXd rho = es / es.trace();
    const Eigen::MatrixXd log_rho = rho.log();
    // log(sigma) = -t0 L - log Tr e^{-t0 L}, exactly, since sigma is an exponential.
    const Eigen::MatrixXd log_sigma =
        -t0 * L - std::log(et.trace()) * Eigen::MatrixXd::Identity(L.rows(), L.cols());
    const double h = (rho * (log_rho - log_sigma)).trace();
    return {h, (es - et).norm(), (es - et).trace()};
}

Spectrum spectrum_of(const Eigen::MatrixXd& M)
{
    SymmetrizedLaplacian L;
    L.matrix = M;
    L.weights.assign(static_cast<std::size_t>(M.rows()), 1.0);
    return spectrum(L);
}

} // namespace

TEST_CASE("heat eigenvalues", "[semigroup]")
{
    const Spectrum sp{{0.0, 2.0}};
    const auto h1 = heat_eigenvalues(sp, 1.0);
    CHECK(h1[0] == 1.0);
    CHECK_THAT(h1[1], WithinRel(kExpMinus2, 1e-15));
    const auto h250 = heat_eigenvalues(sp, 250.0);
    CHECK(h250[0] == 1.0);
    CHECK(h250[1] < 1e-200);
}

TEST_CASE("criteria on the spectrum {0, 2}", "[semigroup]")
{
    const Spectrum sp{{0.0, 2.0}};
    const CriterionParams p{1.0, 250.0};
    CHECK_THAT(relative_entropy(sp, p), WithinRel(kEntropy02, 1e-13));
    CHECK_THAT(hilbert_schmidt_distance(sp, p), WithinRel(kExpMinus2, 1e-14));
    CHECK_THAT(trace_difference(sp, p), WithinRel(kExpMinus2, 1e-14));

    const auto ref = oracle::criteria_mp(sp.eigenvalues, 1.0, 250.0);
    CHECK_THAT(relative_entropy(sp, p), WithinRel(ref.entropy, 1e-13));
    CHECK_THAT(hilbert_schmidt_distance(sp, p), WithinRel(ref.hs, 1e-14));
    CHECK_THAT(trace_difference(sp, p), WithinRel(ref.trace, 1e-14));

    CHECK_THAT(criterion_value(CriterionKind::TraceDifference, sp, p).value, WithinRel(kExpMinus2, 1e-14));
}

TEST_CASE("degenerate and trivial configurations", "[semigroup]")
{
    const Spectrum sp{{0.0, 0.3, 1.7, 4.0}};
    CriterionParams same{1.0, 1.0};
    CHECK(std::abs(relative_entropy(sp, same)) < 1e-12);
    CHECK(hilbert_schmidt_distance(sp, same) == 0.0);
    CHECK(trace_difference(sp, same) == 0.0);

    const Spectrum zeros{{0.0, 0.0, 0.0}};
    for (double t0 : {2.0, 250.0, 1e6}) {
        const CriterionParams p{0.5, t0};
        CHECK(relative_entropy(zeros, p) == 0.0);
        CHECK(hilbert_schmidt_distance(zeros, p) == 0.0);
        CHECK(trace_difference(zeros, p) == 0.0);
    }

    CHECK(criterion_value(CriterionKind::RelativeEntropy, Spectrum{{0.0}}, {}).value == 0.0);
    const auto e = criterion_value(CriterionKind::HilbertSchmidt, Spectrum{}, {});
    CHECK(e.value == 0.0);
    CHECK(e.empty);

    // {0, lambda} with lambda large: both heat traces tend to the kernel count.
    CHECK(trace_difference(Spectrum{{0.0, 1e6}}, {}) == 0.0);
    CHECK(trace_difference(Spectrum{{0.0, 1e-3}}, {}) > 0.0);
}

TEST_CASE("parameter validation", "[semigroup]")
{
    CHECK_THROWS_AS((CriterionParams{0.0, 250.0}.validate()), ValidationError);
    CHECK_THROWS_AS((CriterionParams{5.0, 2.0}.validate()), ValidationError);
    CHECK_NOTHROW((CriterionParams{1.0, std::numeric_limits<double>::infinity()}.validate()));
    CHECK(parse_criterion("entropy") == CriterionKind::RelativeEntropy);
    CHECK(parse_criterion("hs") == CriterionKind::HilbertSchmidt);
    CHECK(parse_criterion("trace") == CriterionKind::TraceDifference);
    CHECK_FALSE(parse_criterion("bures"));
}

TEST_CASE("infinite long time uses the kernel projector", "[semigroup]")
{
    const CriterionParams p{1.0, std::numeric_limits<double>::infinity()};
    const Spectrum sp{{0.0, 2.0}};
    CHECK(std::isinf(relative_entropy(sp, p)));
    CHECK(relative_entropy(Spectrum{{0.0, 0.0}}, p) == 0.0);
    CHECK_THAT(hilbert_schmidt_distance(sp, p), WithinRel(kExpMinus2, 1e-14));
    CHECK_THAT(trace_difference(sp, p), WithinRel(kExpMinus2, 1e-14));
    // Far t0 converges to the projector limit for hs and trace.
    const Spectrum wide{{0.0, 0.5, 1.0, 3.0}};
    CHECK_THAT(trace_difference(wide, {1.0, 1e4}), WithinAbs(trace_difference(wide, p), 1e-12));
}

TEST_CASE("relative entropy is non-negative", "[semigroup][property]")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lm(1e-3, 50.0);
    std::uniform_real_distribution<double> st(0.01, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const auto sp = random_spectrum(rng, 1 + i % 40, lm(rng), static_cast<std::size_t>(i % 3));
        const double s = st(rng);
        const double t0 = s * (1.0 + 300.0 * st(rng));
        REQUIRE(relative_entropy(sp, {s, t0}) >= -1e-12);
    }
}

TEST_CASE("spectral criteria agree with a 50-digit evaluation", "[semigroup][property]")
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto sp = random_spectrum(rng, 2 + i % 20, 3.0, static_cast<std::size_t>(i % 3));
        const auto ref = oracle::criteria_mp(sp.eigenvalues, 1.0, 250.0);
        const CriterionParams p{1.0, 250.0};
        REQUIRE_THAT(relative_entropy(sp, p), WithinRel(ref.entropy, 1e-11) || WithinAbs(ref.entropy, 1e-12));
        REQUIRE_THAT(hilbert_schmidt_distance(sp, p), WithinRel(ref.hs, 1e-12) || WithinAbs(ref.hs, 1e-14));
        REQUIRE_THAT(trace_difference(sp, p), WithinRel(ref.trace, 1e-12) || WithinAbs(ref.trace, 1e-14));
    }
}

TEST_CASE("criteria are continuous in the diffusion times", "[semigroup][property]")
{
    std::mt19937_64 rng(3);
    const double eps = 1e-9;
    for (int i = 0; i < 200; ++i) {
        const auto sp = random_spectrum(rng, 2 + i % 30, 10.0, static_cast<std::size_t>(i % 2));
        for (auto kind : kAllCriteria) {
            const double base = criterion_value(kind, sp, {1.0, 250.0}).value;
            REQUIRE(std::abs(criterion_value(kind, sp, {1.0 + eps, 250.0}).value - base) < 1e-5);
            REQUIRE(std::abs(criterion_value(kind, sp, {1.0, 250.0 + eps}).value - base) < 1e-5);
            REQUIRE(std::abs(criterion_value(kind, sp, {1.0 - eps, 250.0 - eps}).value - base) < 1e-5);
        }
    }
}

TEST_CASE("spectral route matches dense matrix exponentials", "[semigroup][property]")
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 30; ++i) {
        const int n = 2 + (i * 7) % 49;
        const Eigen::MatrixXd L = random_psd(rng, n, i % 3, 2.5);
        const auto sp = spectrum_of(L);
        const auto ref = dense_route(L, 1.0, 250.0);
        const CriterionParams p{1.0, 250.0};
        REQUIRE_THAT(relative_entropy(sp, p), WithinRel(ref.entropy, 1e-8));
        REQUIRE_THAT(hilbert_schmidt_distance(sp, p), WithinRel(ref.hs, 1e-8));
        REQUIRE_THAT(trace_difference(sp, p), WithinRel(ref.trace, 1e-8));
    }
}

TEST_CASE("standard and weighted Hilbert-Schmidt norms", "[semigroup]")
{
    // Equal weights make the two inner products coincide.
    std::mt19937_64 rng(5);
    SymmetrizedLaplacian L;
    L.matrix = random_psd(rng, 12, 1, 2.0);
    L.weights.assign(12, 1.0);
    const CriterionParams p{1.0, 250.0};
    CHECK_THAT(hilbert_schmidt_distance_standard(L, p), WithinRel(hilbert_schmidt_distance(spectrum(L), p), 1e-10));

    // With unequal weights the standard norm is the Frobenius norm of
    // W^{-1/2} M W^{1/2}.
    Eigen::VectorXd w(12);
    for (int i = 0; i < 12; ++i)
        w(i) = 0.2 + 0.3 * i;
    L.weights.assign(w.data(), w.data() + 12);
    const Eigen::MatrixXd M = (-p.s * L.matrix).exp() - (-p.t0 * L.matrix).exp();
    const Eigen::MatrixXd conj = w.cwiseSqrt().cwiseInverse().asDiagonal() * M * w.cwiseSqrt().asDiagonal();
    CHECK_THAT(hilbert_schmidt_distance_standard(L, p), WithinRel(conj.norm(), 1e-9));
}

TEST_CASE("criteria stay finite on extreme spectra", "[semigroup][property]")
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        auto sp = random_spectrum(rng, 1 + i % 25, 1e12, static_cast<std::size_t>(i % 2));
        sp.eigenvalues.back() = 1e12;
        for (double t0 : {2.0, 250.0, 1e6})
            for (auto kind : kAllCriteria)
                REQUIRE(std::isfinite(criterion_value(kind, sp, {1.0, t0}).value));
    }
    const Spectrum tiny{{1e-300, 1e-12, 1e12}};
    for (auto kind : kAllCriteria)
        CHECK(std::isfinite(criterion_value(kind, tiny, {1e-6, 1e6}).value));
}
