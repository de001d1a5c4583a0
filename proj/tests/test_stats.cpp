#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rmc/chain.hpp"
#include "rmc/densities.hpp"
#include "rmc/rng.hpp"
#include "rmc/stats.hpp"

using namespace rmc;

TEST_CASE("histogram basics") {
    SUBCASE("all samples in one bin give density 1/width") {
        const std::vector<double> xs = {0.52, 0.55, 0.58};
        const Histogram h = histogram(xs, std::vector<double>{0.0, 0.5, 1.0});
        CHECK(h.density[0] == 0.0);
        CHECK(h.density[1] == doctest::Approx(2.0));
        CHECK(h.count == 3);
    }
    SUBCASE("total mass is one") {
        Rng g = derive_rng({70, 0, 0});
        std::vector<double> xs(5000);
        for (auto& x : xs) x = g.gamma(2.0);
        const Histogram h = histogram(xs);
        double mass = 0.0;
        for (std::size_t k = 0; k < h.density.size(); k++)
            mass += h.density[k] * (h.edges[k + 1] - h.edges[k]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("uniform samples land near density one in every bin") {
        Rng g = derive_rng({71, 0, 0});
        std::vector<double> xs(1000000);
        for (auto& x : xs) x = g.uniform();
        std::vector<double> edges(21);
        for (int k = 0; k <= 20; k++) edges[k] = k / 20.0;
        const Histogram h = histogram(xs, edges);
        for (double d : h.density) {
            CHECK(d > 0.98);
            CHECK(d < 1.02);
        }
    }
    SUBCASE("permutation invariance") {
        Rng g = derive_rng({72, 0, 0});
        std::vector<double> xs(4000);
        for (auto& x : xs) x = g.normal();
        const Histogram a = histogram(xs);
        std::mt19937 shuf(4);
        std::shuffle(xs.begin(), xs.end(), shuf);
        const Histogram b = histogram(xs);
        CHECK(a.edges == b.edges);
        CHECK(a.density == b.density);
        CHECK(a.count == b.count);
    }
    SUBCASE("degenerate input is rejected") {
        CHECK_THROWS_AS(histogram(std::vector<double>{1.0}), std::invalid_argument);
        CHECK_THROWS_AS(histogram(std::vector<double>{2.0, 2.0, 2.0}), std::invalid_argument);
    }
}

TEST_CASE("ks statistic") {
    SUBCASE("single sample at the median of the uniform") {
        const KsResult r = ks_statistic({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); });
        CHECK(r.d == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("samples from the tested cdf stay under the 99% quantile") {
        Rng g = derive_rng({73, 0, 0});
        const int m = 10000;
        std::vector<double> xs(m);
        for (auto& x : xs) x = g.uniform();
        const KsResult r = ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
        CHECK(r.d < 1.63 / std::sqrt(static_cast<double>(m)));
        CHECK(r.p_value > 0.01);
    }
    SUBCASE("mismatched distributions are strongly rejected") {
        // analytic sup difference |3z^2-2z^3-z| peaks at (3±sqrt3)/6 with value 0.09623
        double sup = 0.0;
        for (int k = 1; k < 10000; k++) {
            const double z = k / 10000.0;
            sup = std::max(sup, std::fabs(beta_cdf(z, 2.0, 2.0) - z));
        }
        CHECK(sup == doctest::Approx(0.09623).epsilon(1e-3));
        Rng g = derive_rng({74, 0, 0});
        std::vector<double> xs(1000);
        for (auto& x : xs) {
            const auto col = dirichlet_column({2.0, 2}, g);
            x = col[0];
        }
        const KsResult r = ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
        CHECK(r.d > 0.06);
        CHECK(r.d < 0.14);
        CHECK(r.p_value < 1e-6);
    }
    SUBCASE("non-monotone cdf is rejected") {
        CHECK_THROWS_AS(ks_statistic({0.1, 0.9}, [](double x) { return 1.0 - x; }),
                        std::invalid_argument);
    }
    SUBCASE("d*sqrt(m) respects the Kolmogorov quantile in repetition") {
        int bad = 0;
        const int reps = 300, m = 500;
        for (int rep = 0; rep < reps; rep++) {
            Rng g = derive_rng({75, static_cast<std::uint64_t>(rep), 0});
            std::vector<double> xs(m);
            for (auto& x : xs) x = g.uniform();
            const KsResult r = ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
            if (r.d * std::sqrt(static_cast<double>(m)) > 1.95) bad++;  // 99.9% quantile
        }
        CHECK(bad <= 3);
    }
}

TEST_CASE("gamma fit recovers synthetic parameters") {
    Rng g = derive_rng({76, 0, 0});
    std::vector<double> xs(100000);
    for (auto& x : xs) x = g.gamma(2.0) / 3.0;  // Gamma(2, rate 3)
    const FitResult fit = fit_gamma(xs);
    CHECK(fit.method == "mle");
    CHECK(fit.params[0] > 1.95);
    CHECK(fit.params[0] < 2.05);
    CHECK(fit.params[1] > 2.92);
    CHECK(fit.params[1] < 3.08);
    CHECK(fit.ks_statistic < 0.01);
}

TEST_CASE("gamma fit rejects degenerate input") {
    CHECK_THROWS_AS(fit_gamma(std::vector<double>(100, 1.7)), std::invalid_argument);
    CHECK_THROWS_AS(fit_gamma({1.0, 2.0}), std::invalid_argument);  // too few
    CHECK_THROWS_AS(fit_gamma(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, -1}),
                    std::invalid_argument);
}

TEST_CASE("beta fit") {
    SUBCASE("stationary 2x2 elements at large t fit Beta(2,2)") {
        const int m = 20000;
        std::vector<double> xs(m);
        for (int r = 0; r < m; r++) {
            Rng g = derive_rng({77, static_cast<std::uint64_t>(r), 0});
            ChainOptions opts;
            opts.track_deflated = false;
            xs[r] = chain_product({1.0, 2}, 20, g, opts).product(0, 0);
        }
        const FitResult fit = fit_beta(xs);
        CHECK(fit.params[0] == doctest::Approx(2.0).epsilon(0.05));
        CHECK(fit.params[1] == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("paired symmetric data forces alpha = beta") {
        Rng g = derive_rng({78, 0, 0});
        std::vector<double> xs;
        for (int i = 0; i < 3000; i++) {
            const double x = 0.02 + 0.96 * g.uniform();
            xs.push_back(x);
            xs.push_back(1.0 - x);
        }
        const FitResult fit = fit_beta(xs);
        CHECK(std::fabs(fit.params[0] - fit.params[1]) < 1e-6);
    }
    SUBCASE("domain violations are rejected") {
        CHECK_THROWS_AS(fit_beta(std::vector<double>(50, 0.5)), std::invalid_argument);
        std::vector<double> bad(50, 0.3);
        bad[10] = 1.0;
        CHECK_THROWS_AS(fit_beta(bad), std::invalid_argument);
    }
}

TEST_CASE("gaussian fit matches the perron-element limit at moderate n") {
    const int m = 400, n = 16;
    std::vector<double> elems;
    elems.reserve(m * n);
    for (int r = 0; r < m; r++) {
        Rng g = derive_rng({79, static_cast<std::uint64_t>(r), 0});
        ChainOptions opts;
        opts.track_deflated = false;
        const ChainRecord rec = chain_product({1.0, n}, 20, g, opts);
        const ProbVector v = perron_vector(rec.product);
        for (double x : v) elems.push_back(x);
    }
    const FitResult fit = fit_gaussian(elems);
    CHECK(fit.params[0] == doctest::Approx(1.0 / n).epsilon(0.02));
    // conjectured element variance: (n-1) / (n^2 (n^2+1)) at a=1
    const double conj = (n - 1.0) / (static_cast<double>(n) * n * (static_cast<double>(n) * n + 1.0));
    CHECK(fit.params[1] * fit.params[1] == doctest::Approx(conj).epsilon(0.2));
}

TEST_CASE("fit self-consistency: resampling a fit recovers it") {
    Rng g = derive_rng({80, 0, 0});
    std::vector<double> xs(30000);
    for (auto& x : xs) x = g.gamma(1.9) / 1.3;
    const FitResult first = fit_gamma(xs);
    std::vector<double> ys(30000);
    for (auto& y : ys) y = g.gamma(first.params[0]) / first.params[1];
    const FitResult second = fit_gamma(ys);
    // MLE asymptotic sd of alpha ~ alpha sqrt(2/m) within a factor
    CHECK(second.params[0] == doctest::Approx(first.params[0]).epsilon(0.05));
    CHECK(second.params[1] == doctest::Approx(first.params[1]).epsilon(0.05));
}

TEST_CASE("mean log modulus curve") {
    SUBCASE("single sample") {
        std::map<int, std::vector<double>> per_t;
        per_t[7] = {std::exp(-3.0)};
        const auto curve = mean_log_modulus_curve(per_t);
        REQUIRE(curve.size() == 1);
        CHECK(curve[0].t == 7);
        CHECK(curve[0].neg_log_mean == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("all-degenerate slices are skipped and reported") {
        std::map<int, std::vector<double>> per_t;
        per_t[1] = {0.5, 0.25};
        per_t[2] = {0.0, 0.0};
        std::vector<int> skipped;
        const auto curve = mean_log_modulus_curve(per_t, &skipped);
        CHECK(curve.size() == 1);
        REQUIRE(skipped.size() == 1);
        CHECK(skipped[0] == 2);
    }
}

TEST_CASE("linear fit") {
    const LineFit f = linear_fit({1, 2, 3, 4}, {2.1, 4.2, 6.3, 8.4});
    CHECK(f.slope == doctest::Approx(2.1).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(linear_fit({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
}
