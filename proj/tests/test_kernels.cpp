#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "kreinlab/batch.hpp"
#include "kreinlab/rng.hpp"
#include "kreinlab/spline.hpp"

using namespace kreinlab;

namespace {

bool same_bits(double a, double b) {
    return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

std::vector<batch::PathOutcome> run_with(batch::BatchFn fn,
                                         const batch::BatchJob& job) {
    std::vector<batch::PathOutcome> out(static_cast<size_t>(job.n));
    fn(job, out.data());
    return out;
}

void require_identical(const std::vector<batch::PathOutcome>& a,
                       const std::vector<batch::PathOutcome>& b) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CAPTURE(i);
        REQUIRE(same_bits(a[i].t, b[i].t));
        REQUIRE(same_bits(a[i].x_final, b[i].x_final));
        REQUIRE(same_bits(a[i].clock, b[i].clock));
        REQUIRE(a[i].censored == b[i].censored);
    }
}

// Smooth bounded stand-in for a log-derivative drift table. The kernels only
// require determinism from the table, not a particular diffusion.
spline::SplineTable make_test_table() {
    auto f = [](double w) { return -0.6 - 0.04 * std::log(w) + 0.3 / (1.0 + w); };
    auto fp = [](double w) {
        return -0.04 / w - 0.3 / ((1.0 + w) * (1.0 + w));
    };
    return spline::build_spline_table(f, fp, 1e-4, 1e4, 0.01, 8);
}

}  // namespace

TEST_CASE("u01_from_bits maps the 52-bit range into (0,1) exactly") {
    CHECK(rng::u01_from_bits(0) == 0x1p-53);
    const double top = rng::u01_from_bits(~0ULL);
    CHECK(top == 1.0 - 0x1p-53);
    CHECK(top < 1.0);
    // (2n+1)/2^53 for a mid-range n, computed independently
    const uint64_t n = 0x8000000000001ULL << 12;
    CHECK(rng::u01_from_bits(n) ==
          (2.0 * static_cast<double>(n >> 12) + 1.0) * 0x1p-53);
    for (uint64_t k = 0; k < 2000; ++k) {
        const double u = rng::u01_from_bits(rng::rng_bits(3, 5, k));
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("counter rng is a pure function of (seed, path, counter)") {
    CHECK(rng::rng_bits(1, 2, 3) == rng::rng_bits(1, 2, 3));
    CHECK(rng::rng_bits(1, 2, 3) != rng::rng_bits(1, 2, 4));
    CHECK(rng::rng_bits(1, 2, 3) != rng::rng_bits(1, 3, 3));
    CHECK(rng::rng_bits(2, 2, 3) != rng::rng_bits(1, 2, 3));
}

TEST_CASE("mix64 avalanches single-bit flips") {
    double total = 0.0;
    int cases = 0;
    for (uint64_t base : {0ULL, 1ULL, 0x0123456789abcdefULL, ~0ULL}) {
        for (int bit = 0; bit < 64; ++bit) {
            const uint64_t d = rng::mix64(base) ^ rng::mix64(base ^ (1ULL << bit));
            total += std::popcount(d);
            ++cases;
        }
    }
    const double mean_flips = total / cases;
    CHECK(mean_flips > 28.0);
    CHECK(mean_flips < 36.0);
}

TEST_CASE("uniform stream moments along counter and path axes") {
    auto stats = [](auto next, int n) {
        double s = 0.0, s2 = 0.0, cross = 0.0, prev = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = next(i);
            s += u;
            s2 += (u - 0.5) * (u - 0.5);
            if (i > 0) cross += (u - 0.5) * (prev - 0.5);
            prev = u;
        }
        const double mean = s / n;
        const double var = s2 / n;
        const double lag1 = (cross / (n - 1)) / var;
        return std::array<double, 3>{mean, var, lag1};
    };

    const int n = 1'000'000;
    auto along_ctr = stats(
        [](int i) {
            return rng::u01_from_bits(
                rng::rng_bits(42, 7, static_cast<uint64_t>(i)));
        },
        n);
    CHECK(std::abs(along_ctr[0] - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(along_ctr[1] - 1.0 / 12.0) < 5e-4);
    CHECK(std::abs(along_ctr[2]) < 5.0 / std::sqrt(double(n)));

    auto along_path = stats(
        [](int i) {
            return rng::u01_from_bits(
                rng::rng_bits(42, static_cast<uint64_t>(i), 11));
        },
        n);
    CHECK(std::abs(along_path[0] - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(along_path[1] - 1.0 / 12.0) < 5e-4);
    CHECK(std::abs(along_path[2]) < 5.0 / std::sqrt(double(n)));
}

TEST_CASE("poly_log tracks std::log to a few ulps over twenty decades") {
    for (double e = -10.0; e <= 10.0; e += 0.1) {
        for (double frac : {1.0, 1.1002, 1.31, 1.414, 1.4143, 1.66, 1.9998}) {
            const double x = frac * std::pow(10.0, e);
            const double want = std::log(x);
            const double got = rng::poly_log(x);
            CAPTURE(x);
            CHECK(std::abs(got - want) <=
                  5e-15 * std::max(1.0, std::abs(want)));
        }
    }
    CHECK(rng::poly_log(1.0) == 0.0);
}

TEST_CASE("norminv matches the reference quantile, center and far tails") {
    boost::math::normal_distribution<double> nd;
    auto ref = [&](double u) { return boost::math::quantile(nd, u); };

    for (double u : {1e-300, 1e-100, 1e-20, 1e-10, 1e-4, 0.01, 0.2, 0.4,
                     0.425, 0.5, 0.575, 0.8, 0.99, 1.0 - 1e-10, 1.0 - 1e-15}) {
        const double want = ref(u);
        const double got = rng::norminv(u);
        CAPTURE(u);
        CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, std::abs(want)));
    }
    CHECK(rng::norminv(0.5) == 0.0);

    // round trip through the cdf. Only the lower tail keeps full relative
    // precision in u (near 1.0 the ulp of u swamps the tail mass), so the
    // upper tail is probed through its reflection.
    for (double z = -8.0; z <= 0.0; z += 0.37) {
        const double u = boost::math::cdf(nd, z);
        CHECK(std::abs(rng::norminv(u) - z) < 1e-11 * std::max(1.0, std::abs(z)));
    }
    for (double z = 0.37; z <= 4.0; z += 0.37) {
        const double u = boost::math::cdf(nd, z);
        CHECK(std::abs(rng::norminv(u) - z) < 1e-10 * std::max(1.0, std::abs(z)));
    }

    // antisymmetry; 1.0 - u itself is only accurate to ~1e-16 absolute,
    // which the tail quantile amplifies
    for (double u : {1e-6, 0.01, 0.2, 0.49}) {
        CHECK(std::abs(rng::norminv(u) + rng::norminv(1.0 - u)) < 1e-10);
    }
}

TEST_CASE("normal draw stream has unit variance and zero mean") {
    const int n = 200'000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng::normal_draw(9, 1, static_cast<uint64_t>(i));
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("spline reproduces affine-in-log functions to roundoff") {
    auto tb = spline::build_spline_table(
        [](double w) { return 2.5 - 0.75 * std::log(w); },
        [](double w) { return -0.75 / w; }, 0.01, 100.0, 0.01, 8);
    for (double w : {0.01, 0.037, 0.5, 1.0, 2.0, 9.99, 55.0, 100.0}) {
        CHECK(std::abs(tb.eval(w) - (2.5 - 0.75 * std::log(w))) < 1e-12);
    }
    // beyond-edge arguments extrapolate the edge cell and stay finite
    CHECK(std::isfinite(tb.eval(1e-4)));
    CHECK(std::isfinite(tb.eval(1e6)));
}

TEST_CASE("spline interpolation error on a curved function is tiny") {
    auto tb = spline::build_spline_table(
        [](double w) { return std::pow(w, 0.3); },
        [](double w) { return 0.3 * std::pow(w, -0.7); }, 0.1, 10.0, 0.01, 8);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double w = 0.1 * std::pow(100.0, i / 1000.0);
        worst = std::max(worst, std::abs(tb.eval(w) - std::pow(w, 0.3)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("spline build rejects bad ranges") {
    auto f = [](double) { return 0.0; };
    CHECK_THROWS_AS(spline::build_spline_table(f, f, -1.0, 2.0),
                    std::domain_error);
    CHECK_THROWS_AS(spline::build_spline_table(f, f, 2.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(spline::build_spline_table(f, f, 1.0, 2.0, -0.01),
                    std::domain_error);
}

TEST_CASE("backend registry") {
    CHECK(batch::backend_by_name("scalar") == &batch::run_batch_scalar);
    CHECK(batch::backend_by_name("bogus") == nullptr);
    CHECK(batch::select_backend() != nullptr);
    if (batch::avx2_available()) {
        CHECK(batch::backend_by_name("avx2") != nullptr);
        CHECK(batch::backend_by_name("avx2") != &batch::run_batch_scalar);
    } else {
        CHECK(batch::backend_by_name("avx2") == nullptr);
    }

    setenv("KREINLAB_BACKEND", "scalar", 1);
    CHECK(batch::backend_name() == "scalar");
    CHECK(batch::select_backend() == &batch::run_batch_scalar);
    setenv("KREINLAB_BACKEND", "not-a-backend", 1);
    CHECK(batch::backend_name() == "scalar");
    unsetenv("KREINLAB_BACKEND");
    CHECK(batch::backend_name() == (batch::avx2_available() ? "avx2" : "scalar"));
}

TEST_CASE("zero-noise kernel integrates the drift ODE") {
    batch::BatchJob job;
    job.x0 = 1.0;
    job.h0 = 1e-4;
    job.halve_below = 0.0;
    job.horizon = 1.0;
    job.seed = 5;
    job.n = 1;
    job.stop = batch::StopRule::RunToHorizon;
    job.model.noise_scale = 0.0;

    SUBCASE("constant drift") {
        job.model.c_const = -0.3;
        auto out = run_with(&batch::run_batch_scalar, job);
        CHECK(out[0].censored == 0);
        CHECK(out[0].t >= 1.0);
        CHECK(std::abs(out[0].x_final - (1.0 - 0.3 * out[0].t)) < 1e-9);
    }
    SUBCASE("linear pullback decays exponentially") {
        job.model.c_lin = -0.5;
        auto out = run_with(&batch::run_batch_scalar, job);
        CHECK(std::abs(out[0].x_final - std::exp(-0.5 * out[0].t)) < 1e-4);
    }
    SUBCASE("zero drift is a fixed point, clock is exact") {
        auto out = run_with(&batch::run_batch_scalar, job);
        CHECK(out[0].x_final == 1.0);
        // 4 * int_0^t 1 ds accumulated as fma(2h, 1+1, .)
        CHECK(std::abs(out[0].clock - 4.0 * out[0].t) < 1e-9);
    }
}

TEST_CASE("step halving below a level equals a finer base step") {
    // With halving always on, the op sequence is identical to a job with
    // half the base step, provided the drift needs no state floor.
    batch::BatchJob coarse;
    coarse.x0 = 1.0;
    coarse.h0 = 2e-4;
    coarse.halve_below = 1e12;
    coarse.horizon = 2.0;
    coarse.seed = 77;
    coarse.n = 16;
    coarse.stop = batch::StopRule::RunToHorizon;
    coarse.model.c_lin = -0.7;

    batch::BatchJob fine = coarse;
    fine.h0 = 0.5 * coarse.h0;
    fine.halve_below = 0.0;

    require_identical(run_with(&batch::run_batch_scalar, coarse),
                      run_with(&batch::run_batch_scalar, fine));
}

TEST_CASE("horizon censoring marks absorbing runs that ran out of time") {
    batch::BatchJob job;
    job.x0 = 1.0;
    job.h0 = 1e-3;
    job.halve_below = 10.0 * std::sqrt(job.h0);
    job.threshold = std::sqrt(job.h0);
    job.horizon = 0.01;  // far too short for a unit-distance passage
    job.seed = 3;
    job.n = 8;
    job.stop = batch::StopRule::AbsorbAtZero;
    job.model.c_inv = 0.25;  // upward push, slow to absorb

    auto out = run_with(&batch::run_batch_scalar, job);
    for (const auto& o : out) {
        CHECK(o.censored == 1);
        CHECK(o.t >= job.horizon);
    }
}

TEST_CASE("bridge crossing absorbs paths that grid monitoring never sees") {
    // pure decay toward 0 with the noise off: the state stays positive at
    // every grid point, so only the bridge test can end the path
    batch::BatchJob job;
    job.x0 = 1.0;
    job.h0 = 1e-3;
    job.halve_below = 10.0 * std::sqrt(job.h0);
    job.threshold = 0.0;
    job.horizon = 30.0;
    job.seed = 77;
    job.n = 16;
    job.stop = batch::StopRule::AbsorbAtZero;
    job.model.c_lin = -1.0;
    job.model.noise_scale = 0.0;

    auto plain = run_with(&batch::run_batch_scalar, job);
    for (const auto& o : plain) CHECK(o.censored == 1);

    job.bridge = true;
    auto bridged = run_with(&batch::run_batch_scalar, job);
    for (const auto& o : bridged) {
        CHECK(o.censored == 0);
        // the crossing probability becomes O(1) once x ~ sqrt(h); for e^{-t}
        // that happens after a few units of time
        CHECK(o.t > 1.0);
        CHECK(o.t < 15.0);
    }
}

TEST_CASE("empty batch is a no-op") {
    batch::BatchJob job;
    job.n = 0;
    batch::run_batch_scalar(job, nullptr);
    if (auto fn = batch::backend_by_name("avx2")) fn(job, nullptr);
}

TEST_CASE("scalar and avx2 backends agree bit for bit") {
    auto avx2 = batch::backend_by_name("avx2");
    if (!avx2) {
        MESSAGE("avx2 backend not available on this build/CPU; skipping");
        return;
    }
    auto table = make_test_table();

    std::vector<batch::BatchJob> jobs;

    {  // absorption with an inverse-x push
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = std::sqrt(j.h0);
        j.horizon = 20.0;
        j.seed = 1001;
        j.n = 37;
        j.stop = batch::StopRule::AbsorbAtZero;
        j.model.c_inv = 0.25;
        jobs.push_back(j);
    }
    {  // upward crossing
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = 2.0;
        j.horizon = 30.0;
        j.seed = 1002;
        j.n = 33;
        j.stop = batch::StopRule::CrossLevel;
        j.model.c_inv = 0.75;
        jobs.push_back(j);
    }
    {  // square-root diffusion run to a horizon
        batch::BatchJob j;
        j.x0 = 0.8;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.horizon = 5.0;
        j.seed = 1003;
        j.n = 29;
        j.stop = batch::StopRule::RunToHorizon;
        j.model.c_const = 1.2;
        j.model.c_lin = -1.0;
        j.model.diffusion = batch::DiffusionKind::TwoSqrtX;
        jobs.push_back(j);
    }
    {  // spline drift, x * L(s x^2) form
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = std::sqrt(j.h0);
        j.horizon = 40.0;
        j.seed = 1004;
        j.n = 25;
        j.stop = batch::StopRule::AbsorbAtZero;
        j.model.c_inv = -0.5;
        j.model.form = batch::DriftForm::LogDerivXSq;
        j.model.mult = 0.8;
        j.model.s = 0.7;
        j.model.table = &table;
        jobs.push_back(j);
    }
    {  // spline drift, L(s x) form
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = 2.2;
        j.horizon = 50.0;
        j.seed = 1005;
        j.n = 21;
        j.stop = batch::StopRule::CrossLevel;
        j.model.c_inv = 0.25;
        j.model.form = batch::DriftForm::LogDerivX;
        j.model.mult = -0.9;
        j.model.s = 1.3;
        j.model.table = &table;
        jobs.push_back(j);
    }
    {  // zero-noise ODE mode
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-4;
        j.horizon = 1.0;
        j.seed = 1006;
        j.n = 5;
        j.stop = batch::StopRule::RunToHorizon;
        j.model.c_lin = -0.5;
        j.model.noise_scale = 0.0;
        jobs.push_back(j);
    }
    {  // bridge absorption at 0 (conditional extra draws near the barrier)
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = 0.0;
        j.bridge = true;
        j.horizon = 20.0;
        j.seed = 1007;
        j.n = 37;
        j.stop = batch::StopRule::AbsorbAtZero;
        j.model.c_inv = -0.25;
        j.model.form = batch::DriftForm::LogDerivX;
        j.model.mult = 0.4;
        j.model.s = 1.1;
        j.model.table = &table;
        jobs.push_back(j);
    }
    {  // bridge on an upward crossing
        batch::BatchJob j;
        j.x0 = 1.0;
        j.h0 = 1e-3;
        j.halve_below = 10.0 * std::sqrt(j.h0);
        j.threshold = 2.0;
        j.bridge = true;
        j.horizon = 30.0;
        j.seed = 1008;
        j.n = 33;
        j.stop = batch::StopRule::CrossLevel;
        j.model.c_inv = 0.5;
        jobs.push_back(j);
    }

    for (size_t k = 0; k < jobs.size(); ++k) {
        CAPTURE(k);
        require_identical(run_with(&batch::run_batch_scalar, jobs[k]),
                          run_with(avx2, jobs[k]));
    }
}

TEST_CASE("outcomes do not depend on how paths are sliced into batches") {
    auto table = make_test_table();
    batch::BatchJob whole;
    whole.x0 = 1.0;
    whole.h0 = 1e-3;
    whole.halve_below = 10.0 * std::sqrt(whole.h0);
    whole.threshold = std::sqrt(whole.h0);
    whole.horizon = 20.0;
    whole.seed = 2024;
    whole.n = 64;
    whole.stop = batch::StopRule::AbsorbAtZero;
    whole.bridge = true;  // masked extra draws must survive lane refills
    whole.model.c_inv = -0.1;
    whole.model.form = batch::DriftForm::LogDerivXSq;
    whole.model.mult = 0.5;
    whole.model.s = 1.0;
    whole.model.table = &table;

    std::vector<batch::BatchFn> fns{&batch::run_batch_scalar};
    if (auto avx2 = batch::backend_by_name("avx2")) fns.push_back(avx2);

    for (auto fn : fns) {
        auto all = run_with(fn, whole);

        std::vector<batch::PathOutcome> sliced(64);
        batch::BatchJob part = whole;
        part.n = 24;
        part.path_begin = 0;
        fn(part, sliced.data());
        part.n = 40;
        part.path_begin = 24;
        fn(part, sliced.data() + 24);

        require_identical(all, sliced);
    }
}
