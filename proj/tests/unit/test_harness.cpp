#include <doctest.h>

#include <sstream>

#include "zpsync/error.hpp"
#include "zpsync/harness.hpp"
#include "zpsync/report_io.hpp"

using namespace zpsync;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec s;
    s.base.n_x = 64;
    s.base.n_z = 10;
    s.base.n_h = 5;
    s.base.n_blocks = 3;
    s.base.mod_order = 16;
    s.pdp = DelayProfile::exponential(1.0, 0.2, 5);
    s.axis = SweepAxis::Snr;
    s.values = {0.0, 10.0};
    s.trials = 30;
    s.master_seed = 17;
    s.delays = {-6, 6};
    s.record_timing = false;
    return s;
}

bool same_outcomes(const SweepReport& a, const SweepReport& b) {
    if (a.outcomes.size() != b.outcomes.size()) return false;
    for (std::size_t p = 0; p < a.outcomes.size(); ++p) {
        for (std::size_t t = 0; t < a.outcomes[p].size(); ++t) {
            const auto& x = a.outcomes[p][t];
            const auto& y = b.outcomes[p][t];
            if (x.d_true != y.d_true || x.d_hat != y.d_hat || x.elapsed != y.elapsed) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("sweep axis names round-trip") {
    for (auto a : {SweepAxis::Snr, SweepAxis::Blocks, SweepAxis::Antennas, SweepAxis::P0, SweepAxis::PdpError}) {
        CHECK(parse_sweep_axis(to_string(a)) == a);
    }
    CHECK_THROWS_AS(parse_sweep_axis("doppler"), ConfigError);
}

TEST_CASE("sweeps are reproducible and independent of worker count") {
    auto spec = small_spec();
    const auto a = run_sweep(spec);
    const auto b = run_sweep(spec);
    spec.workers = 3;
    const auto c = run_sweep(spec);
    CHECK(same_outcomes(a, b));
    CHECK(same_outcomes(a, c));
    std::ostringstream ca, cc;
    write_sweep_csv(ca, a);
    write_sweep_csv(cc, c);
    CHECK(ca.str() == cc.str());
    CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("sweep points share their random draws") {
    const auto r = run_sweep(small_spec());
    REQUIRE(r.outcomes.size() == 2);
    for (std::size_t t = 0; t < r.outcomes[0].size(); ++t) {
        CHECK(r.outcomes[0][t].d_true == r.outcomes[1][t].d_true);
        CHECK(r.outcomes[0][t].d_true == draw_delay(17, t, {-6, 6}));
    }
}

TEST_CASE("sweep rows count successes") {
    auto spec = small_spec();
    spec.estimators = {EstimatorId::Aml};
    const auto r = run_sweep(spec);
    REQUIRE(r.rows.size() == 2);
    for (std::size_t p = 0; p < 2; ++p) {
        std::size_t hits = 0;
        for (const auto& o : r.outcomes[p]) hits += o.d_hat[0] == o.d_true ? 1 : 0;
        const auto& row = r.row(p, EstimatorId::Aml);
        CHECK(row.successes == hits);
        CHECK(row.trials == 30);
        CHECK(row.p_hat == doctest::Approx(double(hits) / 30.0));
        CHECK(row.ci.lo <= row.p_hat);
        CHECK(row.ci.hi >= row.p_hat);
        CHECK(row.mean_ns == 0.0);
    }
    CHECK(r.rows[0].axis_value == "0");
    CHECK(r.rows[1].axis_value == "10");
    CHECK_THROWS_AS((void)r.row(0, EstimatorId::Ed), std::out_of_range);
}

TEST_CASE("several estimators run on the same windows") {
    auto spec = small_spec();
    spec.noise = NoiseMixture::gaussian(1.0);
    spec.delays = {0, 8};
    spec.estimators = {EstimatorId::Aml, EstimatorId::Wed, EstimatorId::Ed};
    const auto r = run_sweep(spec);
    CHECK(r.rows.size() == 6);
    for (const auto& o : r.outcomes[1]) CHECK(o.d_hat[0] == o.d_hat[1]);
}

TEST_CASE("spec validation names the problem") {
    auto spec = small_spec();
    spec.estimators = {EstimatorId::Wed};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("WED requires Gaussian noise"), ConfigError);
    spec = small_spec();
    spec.estimators = {EstimatorId::Ed};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("ED requires delays"), ConfigError);
    spec = small_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_spec();
    spec.pdp = DelayProfile({1.0, 0.5});
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = small_spec();
    spec.delays = {-80, 0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("perturbed profiles move each tap by plus or minus alpha") {
    const auto p = DelayProfile::exponential(1.0, 0.05, 10);
    Rng rng(5);
    const auto q = perturb_profile(p, 0.3, rng);
    bool up = false, down = false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double ratio = q[k] / p[k];
        CHECK((ratio == doctest::Approx(1.3) || ratio == doctest::Approx(0.7)));
        up = up || ratio > 1.0;
        down = down || ratio < 1.0;
    }
    CHECK(up);
    CHECK(down);
    Rng again(5);
    const auto same = perturb_profile(p, 0.0, again);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(same[k] == p[k]);
}

TEST_CASE("profile sensitivity rejects alpha of one") {
    auto spec = small_spec();
    CHECK_THROWS_AS(run_pdp_sensitivity(spec, {0.0, 1.0}), ConfigError);
    const auto r = run_pdp_sensitivity(spec, {0.0, 0.5});
    CHECK(r.axis == SweepAxis::PdpError);
    CHECK(r.rows.size() == 2);
}

TEST_CASE("p0 axis keeps the component variances") {
    auto spec = small_spec();
    spec.axis = SweepAxis::P0;
    spec.values = {0.9, 1.0};
    spec.snr_reference = SnrReference::BackgroundComponent;
    spec.trials = 5;
    CHECK_NOTHROW(run_sweep(spec));
    spec.values = {0.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("moment validation matches the analytic variance") {
    MomentSpec spec;
    spec.config.snr_db = 15.0;
    spec.indices = {1, 150};
    spec.trials = 4000;
    const auto r = run_moment_validation(spec);
    REQUIRE(r.rows.size() == 2);
    const auto pdp = DelayProfile::exponential(1.0, 0.05, 10, true);
    const double noise_i = std::pow(10.0, -1.5) / 2.0;
    CHECK(r.rows[0].analytic_variance == doctest::Approx((pdp[0] + pdp[1]) / 2.0 + noise_i));
    CHECK(r.rows[1].analytic_variance == doctest::Approx(0.5 + noise_i));
    for (const auto& row : r.rows) {
        CHECK(row.empirical.count == 4000);
        CHECK(row.empirical.variance == doctest::Approx(row.analytic_variance).epsilon(0.08));
        CHECK(row.analytic_density.size() == row.histogram.counts.size());
    }
    spec.indices = {532};
    CHECK_THROWS_AS(run_moment_validation(spec), RangeError);
}

TEST_CASE("runtime scaling reports one row per size") {
    ScalingSpec spec;
    spec.base.n_x = 64;
    spec.base.n_z = 10;
    spec.base.n_h = 5;
    spec.base.n_blocks = 2;
    spec.pdp = DelayProfile::exponential(1.0, 0.2, 5);
    spec.multipliers = {1, 2, 4};
    spec.trials = 2;
    spec.delays = {-5, 5};
    const auto r = run_runtime_scaling(spec);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[2].samples == 2 * 4 * 74);
    CHECK(r.rows[0].aml_ns > 0.0);
    spec.multipliers = {1, 2};
    CHECK_THROWS_AS(run_runtime_scaling(spec), ConfigError);
}

TEST_CASE("parallel_for visits every index and forwards errors") {
    std::vector<int> seen(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { seen[i] += 1; });
    for (int s : seen) CHECK(s == 1);
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                        if (i == 7) throw RangeError("boom");
                    }),
                    RangeError);
}

TEST_CASE("config hash depends on the spec") {
    auto a = small_spec();
    auto b = small_spec();
    CHECK(config_hash(to_json(a)) == config_hash(to_json(b)));
    b.trials = 31;
    CHECK(config_hash(to_json(a)) != config_hash(to_json(b)));
    CHECK(config_hash(to_json(a)).size() == 16);
}
