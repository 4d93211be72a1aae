#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sgdiff/guidance.hpp"
#include "sgdiff/rng.hpp"

using namespace sgdiff;

namespace {

NoiseTriple triple1(double uncond, double prompt, double safety) {
    return {Tensor({1}, {uncond}), Tensor({1}, {prompt}), Tensor({1}, {safety})};
}

}  // namespace

TEST_CASE("cfg_combine") {
    SUBCASE("prompt equal to uncond collapses to uncond for any scale") {
        Rng rng(1);
        Tensor u = normal_sample(rng, {4});
        NoiseTriple t{u, u, normal_sample(rng, {4})};
        for (double s : {0.0, 1.0, 7.5, 20.0}) {
            CHECK(max_abs_diff(cfg_combine(t, s), u) == 0.0);
        }
    }
    SUBCASE("hand arithmetic") {
        CHECK(cfg_combine(triple1(0.2, 0.6, 0.0), 7.5)[0] ==
              doctest::Approx(3.2).epsilon(1e-14));
    }
    SUBCASE("scale one returns the prompt estimate") {
        Rng rng(2);
        Tensor u = normal_sample(rng, {4});
        Tensor p = normal_sample(rng, {4});
        Tensor r = cfg_combine({u, p, u}, 1.0);
        CHECK(max_abs_diff(r, p) < 1e-15);
    }
}

TEST_CASE("safety_scale") {
    SUBCASE("prompt equal to safety gives mu of one everywhere") {
        Rng rng(3);
        Tensor p = normal_sample(rng, {5});
        Tensor mu = safety_scale({p, p, p}, 100.0, 0.01);
        CHECK(mu.identical(Tensor::full({5}, 1.0)));
    }
    SUBCASE("hand example with one active and one inactive element") {
        NoiseTriple t{Tensor({2}), Tensor({2}, {0.10, 0.50}), Tensor({2}, {0.30, 0.10})};
        Tensor mu = safety_scale(t, 100.0, 0.01);
        CHECK(mu[0] == doctest::Approx(20.0).epsilon(1e-13));
        CHECK(mu[1] == 0.0);
    }
    SUBCASE("threshold below every difference disables the scale") {
        Rng rng(4);
        NoiseTriple t{normal_sample(rng, {6}), normal_sample(rng, {6}), normal_sample(rng, {6})};
        Tensor mu = safety_scale(t, 1000.0, -1e9);
        CHECK(mu.identical(Tensor({6})));
    }
    SUBCASE("a tie at exactly the threshold yields zero") {
        // 0.5 - 0.25 is exactly 0.25; the strict inequality leaves mu at 0
        Tensor mu = safety_scale(triple1(0.0, 0.5, 0.25), 100.0, 0.25);
        CHECK(mu[0] == 0.0);
    }
    SUBCASE("upper clip variant caps at one") {
        NoiseTriple t{Tensor({2}), Tensor({2}, {0.10, 0.3001}), Tensor({2}, {0.30, 0.30})};
        Tensor mu = safety_scale(t, 100.0, 0.5, ScaleClip::UpperClipAt1);
        CHECK(mu[0] == 1.0);                                    // |100 * -0.2| clipped
        CHECK(mu[1] == doctest::Approx(0.01).epsilon(1e-9));    // below the cap
    }
    SUBCASE("mu lies in {0} union [1, inf) for random triples") {
        Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            NoiseTriple t{normal_sample(rng, {8}), normal_sample(rng, {8}),
                          normal_sample(rng, {8})};
            double s = 5000.0 * rng.next_uniform();
            double lambda = rng.next_uniform() - 0.5;
            Tensor mu = safety_scale(t, s, lambda);
            for (std::size_t i = 0; i < mu.size(); ++i) {
                CHECK((mu[i] == 0.0 || mu[i] >= 1.0));
            }
        }
    }
    SUBCASE("negative scale rejected") {
        CHECK_THROWS_AS(safety_scale(triple1(0, 0, 0), -1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("safety_gamma") {
    GuidanceConfig config;
    SUBCASE("hand example") {
        NoiseTriple t{Tensor({2}, {0.0, 0.0}), Tensor({2}), Tensor({2}, {0.1, 0.2})};
        SafetyState state{Tensor({2}, {0.5, 0.5}), 0};
        config.momentum_scale = 0.3;
        Tensor gamma = safety_gamma(t, Tensor({2}, {20.0, 0.0}), state, config);
        CHECK(gamma[0] == doctest::Approx(2.15).epsilon(1e-14));
        CHECK(gamma[1] == doctest::Approx(0.15).epsilon(1e-14));
    }
    SUBCASE("zero momentum scale leaves only the scaled direction") {
        Rng rng(6);
        NoiseTriple t{normal_sample(rng, {4}), normal_sample(rng, {4}), normal_sample(rng, {4})};
        Tensor mu = safety_scale(t, 200.0, 0.05);
        SafetyState state{normal_sample(rng, {4}), 0};
        config.momentum_scale = 0.0;
        Tensor gamma = safety_gamma(t, mu, state, config);
        CHECK(max_abs_diff(gamma, mul(mu, sub(t.safety, t.uncond))) == 0.0);
    }
    SUBCASE("zero mu and zero momentum vanish") {
        NoiseTriple t = triple1(0.4, 0.9, -0.3);
        SafetyState state = SafetyState::initial({1});
        config.momentum_scale = 0.7;
        Tensor gamma = safety_gamma(t, Tensor({1}), state, config);
        CHECK(gamma[0] == 0.0);
    }
}

TEST_CASE("momentum_update") {
    SUBCASE("zero initial state picks up (1 - decay) of gamma") {
        SafetyState state = SafetyState::initial({2});
        Tensor gamma({2}, {1.0, -2.0});
        SafetyState next = momentum_update(state, gamma, 0.25);
        CHECK(next.momentum[0] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(next.momentum[1] == doctest::Approx(-1.5).epsilon(1e-15));
        CHECK(next.step == 1);
    }
    SUBCASE("hand example") {
        SafetyState state{Tensor({1}, {1.0}), 3};
        SafetyState next = momentum_update(state, Tensor({1}, {0.0}), 0.4);
        CHECK(next.momentum[0] == doctest::Approx(0.4).epsilon(1e-15));
        CHECK(next.step == 4);
    }
    SUBCASE("converges to a fixed gamma") {
        SafetyState state = SafetyState::initial({1});
        Tensor g({1}, {0.8});
        for (int i = 0; i < 200; ++i) {
            state = momentum_update(state, g, 0.7);
        }
        CHECK(state.momentum[0] == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("convex combination bounds, element-wise") {
        Rng rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            SafetyState state{normal_sample(rng, {4}), 0};
            Tensor gamma = normal_sample(rng, {4});
            double beta = rng.next_uniform() * 0.999;
            SafetyState next = momentum_update(state, gamma, beta);
            for (std::size_t i = 0; i < gamma.size(); ++i) {
                double lo = std::min(state.momentum[i], gamma[i]);
                double hi = std::max(state.momentum[i], gamma[i]);
                CHECK(next.momentum[i] >= lo - 1e-15);
                CHECK(next.momentum[i] <= hi + 1e-15);
            }
        }
    }
}

TEST_CASE("sld_combine") {
    GuidanceConfig config;
    config.text_scale = 10.0;
    SUBCASE("warm-up never ending reproduces cfg bitwise") {
        Rng rng(8);
        config.warmup_steps = 1000;
        NoiseTriple t{normal_sample(rng, {4}), normal_sample(rng, {4}), normal_sample(rng, {4})};
        Tensor gamma = normal_sample(rng, {4});
        for (int step : {0, 5, 999}) {
            CHECK(sld_combine(t, gamma, config, step).identical(cfg_combine(t, config.text_scale)));
        }
    }
    SUBCASE("zero gamma degenerates to cfg bitwise") {
        Rng rng(9);
        config.warmup_steps = 0;
        NoiseTriple t{normal_sample(rng, {4}), normal_sample(rng, {4}), normal_sample(rng, {4})};
        CHECK(sld_combine(t, Tensor({4}), config, 3).identical(cfg_combine(t, config.text_scale)));
    }
    SUBCASE("hand arithmetic past warm-up") {
        config.warmup_steps = 0;
        Tensor r = sld_combine(triple1(0.0, 1.0, 0.0), Tensor({1}, {0.25}), config, 0);
        CHECK(r[0] == doctest::Approx(7.5).epsilon(1e-14));
    }
}

TEST_CASE("negative_prompt_combine") {
    SUBCASE("safety equal to prompt returns the prompt") {
        Rng rng(10);
        Tensor p = normal_sample(rng, {4});
        CHECK(max_abs_diff(negative_prompt_combine({normal_sample(rng, {4}), p, p}, 7.5), p) ==
              0.0);
    }
    SUBCASE("hand arithmetic") {
        CHECK(negative_prompt_combine(triple1(0.0, 0.6, 0.2), 7.5)[0] ==
              doctest::Approx(3.2).epsilon(1e-14));
    }
    SUBCASE("safety equal to uncond reduces to cfg bitwise") {
        Rng rng(11);
        Tensor u = normal_sample(rng, {4});
        NoiseTriple t{u, normal_sample(rng, {4}), u};
        CHECK(negative_prompt_combine(t, 7.5).identical(cfg_combine(t, 7.5)));
    }
}

TEST_CASE("presets carry the published hyper-parameters") {
    GuidanceConfig weak = preset("weak");
    CHECK(weak.warmup_steps == 15);
    CHECK(weak.safety_scale == 200.0);
    CHECK(weak.threshold == 0.0);
    CHECK(weak.momentum_scale == 0.0);
    CHECK(weak.momentum_decay == 0.0);

    GuidanceConfig medium = preset("medium");
    CHECK(medium.warmup_steps == 10);
    CHECK(medium.safety_scale == 1000.0);
    CHECK(medium.threshold == 0.01);
    CHECK(medium.momentum_scale == 0.3);
    CHECK(medium.momentum_decay == 0.4);

    GuidanceConfig strong = preset("strong");
    CHECK(strong.warmup_steps == 7);
    CHECK(strong.safety_scale == 2000.0);
    CHECK(strong.threshold == 0.025);
    CHECK(strong.momentum_scale == 0.5);
    CHECK(strong.momentum_decay == 0.7);

    GuidanceConfig max = preset("max");
    CHECK(max.warmup_steps == 0);
    CHECK(max.safety_scale == 5000.0);
    CHECK(max.threshold == 1.0);
    CHECK(max.momentum_scale == 0.5);
    CHECK(max.momentum_decay == 0.7);

    CHECK_THROWS_WITH_AS(preset("bogus"), doctest::Contains("weak, medium, strong, max"),
                         std::invalid_argument);
}

TEST_CASE("config validation") {
    GuidanceConfig c;
    c.momentum_scale = 1.5;
    CHECK_THROWS_AS(c.validate(50), std::invalid_argument);
    c = GuidanceConfig{};
    c.momentum_decay = 1.0;
    CHECK_THROWS_AS(c.validate(50), std::invalid_argument);
    c = GuidanceConfig{};
    c.warmup_steps = 51;
    CHECK_THROWS_AS(c.validate(50), std::invalid_argument);
    c.warmup_steps = 50;
    CHECK_NOTHROW(c.validate(50));
    c = GuidanceConfig{};
    c.safety_scale = -1.0;
    CHECK_THROWS_AS(c.validate(50), std::invalid_argument);
}

TEST_CASE("guidance_step") {
    SUBCASE("plain-cfg never touches the momentum") {
        Rng rng(12);
        GuidanceConfig config;
        config.mode = GuidanceMode::PlainCfg;
        SafetyState state = SafetyState::initial({4});
        for (int t = 0; t < 5; ++t) {
            NoiseTriple triple{normal_sample(rng, {4}), normal_sample(rng, {4}),
                               normal_sample(rng, {4})};
            auto [eps, next] = guidance_step(triple, state, config, t);
            CHECK(eps.identical(cfg_combine(triple, config.text_scale)));
            CHECK(next.momentum.identical(Tensor({4})));
            state = next;
        }
    }
    SUBCASE("threshold below any difference makes sld equal plain-cfg bitwise") {
        Rng rng(13);
        GuidanceConfig sld;
        sld.mode = GuidanceMode::Sld;
        sld.threshold = -10.0;
        sld.warmup_steps = 0;
        GuidanceConfig cfg = sld;
        cfg.mode = GuidanceMode::PlainCfg;
        SafetyState sld_state = SafetyState::initial({4});
        SafetyState cfg_state = SafetyState::initial({4});
        for (int t = 0; t < 8; ++t) {
            NoiseTriple triple{normal_sample(rng, {4}), normal_sample(rng, {4}),
                               normal_sample(rng, {4})};
            auto [sld_eps, s1] = guidance_step(triple, sld_state, sld, t);
            auto [cfg_eps, s2] = guidance_step(triple, cfg_state, cfg, t);
            CHECK(sld_eps.identical(cfg_eps));
            CHECK(s1.momentum.identical(Tensor({4})));
            sld_state = s1;
            cfg_state = s2;
        }
    }
    SUBCASE("two-step scalar run under preset medium matches the hand spreadsheet") {
        GuidanceConfig config = preset("medium");
        SafetyState state = SafetyState::initial({1});

        // step 0: diff 0.2 >= lambda, mu = 0, gamma = 0, warm-up output
        NoiseTriple t0 = triple1(0.10, 0.50, 0.30);
        auto [out0, state1] = guidance_step(t0, state, config, 0);
        CHECK(std::fabs(out0[0] - 3.1) <= 1e-12);
        CHECK(std::fabs(state1.momentum[0] - 0.0) <= 1e-12);

        // step 1: diff -0.3 < lambda, phi = -300, mu = 300,
        // gamma = 300 * 0.6 = 180, nu2 = 0.6 * 180 = 108, warm-up output
        NoiseTriple t1 = triple1(-0.20, 0.10, 0.40);
        auto [out1, state2] = guidance_step(t1, state1, config, 1);
        CHECK(std::fabs(out1[0] - 2.05) <= 1e-12);
        CHECK(std::fabs(state2.momentum[0] - 108.0) <= 1e-12);
        CHECK(state2.step == 2);
    }
    SUBCASE("momentum scale zero makes the output independent of the decay, bitwise") {
        Rng rng(14);
        GuidanceConfig a;
        a.mode = GuidanceMode::Sld;
        a.momentum_scale = 0.0;
        a.momentum_decay = 0.1;
        a.warmup_steps = 0;
        GuidanceConfig b = a;
        b.momentum_decay = 0.9;
        SafetyState sa = SafetyState::initial({4});
        SafetyState sb = SafetyState::initial({4});
        for (int t = 0; t < 6; ++t) {
            NoiseTriple triple{normal_sample(rng, {4}), normal_sample(rng, {4}),
                               normal_sample(rng, {4})};
            auto [ea, na] = guidance_step(triple, sa, a, t);
            auto [eb, nb] = guidance_step(triple, sb, b, t);
            CHECK(ea.identical(eb));
            sa = na;
            sb = nb;
        }
    }
    SUBCASE("inputs are not mutated and repeated calls agree") {
        Rng rng(15);
        GuidanceConfig config = preset("strong");
        NoiseTriple triple{normal_sample(rng, {4}), normal_sample(rng, {4}),
                           normal_sample(rng, {4})};
        Tensor u = triple.uncond, p = triple.prompt, s = triple.safety;
        SafetyState state{normal_sample(rng, {4}), 3};
        Tensor nu = state.momentum;
        auto [e1, n1] = guidance_step(triple, state, config, 3);
        auto [e2, n2] = guidance_step(triple, state, config, 3);
        CHECK(e1.identical(e2));
        CHECK(n1.momentum.identical(n2.momentum));
        CHECK(triple.uncond.identical(u));
        CHECK(triple.prompt.identical(p));
        CHECK(triple.safety.identical(s));
        CHECK(state.momentum.identical(nu));
    }
    SUBCASE("state step mismatch is rejected") {
        GuidanceConfig config;
        SafetyState state = SafetyState::initial({1});
        CHECK_THROWS_AS(guidance_step(triple1(0, 0, 0), state, config, 2), std::invalid_argument);
    }
}
