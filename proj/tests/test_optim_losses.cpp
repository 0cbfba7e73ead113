#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nn/losses.hpp"
#include "nn/optim.hpp"
#include "testutil.hpp"

using namespace acdl;
using acdl::test::random_tensor;

namespace {

nn::Param<float> make_param(const std::string& name, std::vector<float> v) {
    const int n = static_cast<int>(v.size());
    nn::Param<float> p;
    p.name = name;
    p.value = TensorF::from_data({n}, std::move(v));
    p.value.set_requires_grad(true);
    return p;
}

void set_grad(nn::Param<float>& p, const std::vector<float>& g) {
    p.value.zero_grad();
    p.value.accumulate_grad(std::span<const float>(g.data(), g.size()));
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    nn::Param<float> p = make_param("w", {1.f, -2.f, 3.f});
    set_grad(p, {0.f, 0.f, 0.f});
    nn::Adam<float> adam;
    adam.step({&p});
    CHECK(test::vals(p.value) == std::vector<float>{1.f, -2.f, 3.f});
}

TEST_CASE("adam: one-step scalar hand computation") {
    // theta=0, g=1, alpha=1e-3, beta1=0.9, beta2=0.999, eps=1e-8.
    // m=0.1 -> mhat=1; v=0.001 -> vhat=1; theta = -alpha * 1/(1+1e-8).
    nn::Param<double> p;
    p.name = "w";
    p.value = TensorD::from_data({1}, {0.0});
    p.value.set_requires_grad(true);
    const std::vector<double> g = {1.0};
    p.value.accumulate_grad(std::span<const double>(g.data(), g.size()));
    nn::Adam<double> adam;
    adam.step({&p});
    const double theta = p.value.values()[0];
    CHECK(std::abs(theta + 0.001) < 1e-8 * 0.001 + 1e-12);
    CHECK(adam.step_count() == 1);
}

TEST_CASE("adam: deterministic across identical runs") {
    auto run = [] {
        nn::Param<float> p = make_param("w", {0.3f, -0.7f});
        nn::Adam<float> adam;
        for (int i = 0; i < 5; ++i) {
            set_grad(p, {0.1f * (i + 1), -0.2f});
            adam.step({&p});
        }
        return test::vals(p.value);
    };
    CHECK(run() == run());
}

TEST_CASE("adam: alpha=0 is the identity") {
    RandomSource rng(3);
    nn::Param<float> p = make_param("w", test::vals(random_tensor<float>({16}, rng)));
    const auto before = test::vals(p.value);
    nn::AdamHyper h;
    h.alpha = 0.0;
    nn::Adam<float> adam(h);
    for (int i = 0; i < 10; ++i) {
        set_grad(p, test::vals(random_tensor<float>({16}, rng)));
        adam.step({&p});
    }
    CHECK(test::vals(p.value) == before);
}

TEST_CASE("adam: second moments stay non-negative and t increments") {
    nn::Param<float> p = make_param("w", {1.f});
    nn::Adam<float> adam;
    for (int i = 1; i <= 7; ++i) {
        set_grad(p, {i % 2 ? 0.5f : -0.5f});
        adam.step({&p});
        CHECK(adam.step_count() == i);
    }
}

TEST_CASE("bce examples") {
    // Perfect prediction (post-clip): loss <= -log(1 - 1e-7).
    TensorF perfect = TensorF::from_data({2}, {1.f, 0.f});
    TensorF labels = TensorF::from_data({2}, {1.f, 0.f});
    const double tiny = -std::log(1.0 - 1e-7);
    CHECK(nn::bce_loss(perfect, labels).item() <= doctest::Approx(tiny).epsilon(1e-3));

    // y=1, p=0.5 -> ln 2.
    CHECK(nn::bce_loss(TensorF::scalar(0.5f), TensorF::scalar(1.f)).item() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-6));

    // Batch loss equals the mean of singleton losses.
    TensorF preds = TensorF::from_data({3}, {0.2f, 0.9f, 0.6f});
    TensorF ys = TensorF::from_data({3}, {0.f, 1.f, 0.f});
    double mean = 0.0;
    for (int i = 0; i < 3; ++i) {
        mean += nn::bce_loss(TensorF::scalar(preds.values()[i]), TensorF::scalar(ys.values()[i])).item();
    }
    mean /= 3.0;
    CHECK(nn::bce_loss(preds, ys).item() == doctest::Approx(mean).epsilon(1e-6));

    // Labels outside {0,1} are rejected.
    CHECK_THROWS_AS(nn::bce_loss(TensorF::scalar(0.5f), TensorF::scalar(0.5f)), ValueError);
    // Length mismatch.
    CHECK_THROWS_AS(nn::bce_loss(preds, TensorF::from_data({2}, {0.f, 1.f})), ShapeError);
}

TEST_CASE("bce is non-negative and decreases toward the label") {
    TensorF one = TensorF::scalar(1.f);
    double prev = 1e9;
    for (double p = 0.05; p <= 0.951; p += 0.05) {
        const double loss = nn::bce_loss(TensorF::scalar(static_cast<float>(p)), one).item();
        CHECK(loss >= 0.0);
        CHECK(loss < prev);
        prev = loss;
    }
    TensorF zero = TensorF::scalar(0.f);
    prev = -1.0;
    for (double p = 0.05; p <= 0.951; p += 0.05) {
        const double loss = nn::bce_loss(TensorF::scalar(static_cast<float>(p)), zero).item();
        CHECK(loss > prev);
        prev = loss;
    }
}

TEST_CASE("lsgan examples") {
    // Perfect discriminator: d_real=1, d_fake=0 -> l_d = 0.
    auto [ld_perfect, lg_at_zero] =
        nn::lsgan_losses(TensorF::scalar(1.f), TensorF::scalar(0.f));
    CHECK(ld_perfect.item() == doctest::Approx(0.0));
    // Perfect generator: d_fake=1 -> l_g = 0.
    CHECK(nn::lsgan_g_loss(TensorF::scalar(1.f)).item() == doctest::Approx(0.0));
    // d_real = d_fake = 0.5 -> l_d = 0.25, l_g = 0.25.
    auto [ld, lg] = nn::lsgan_losses(TensorF::scalar(0.5f), TensorF::scalar(0.5f));
    CHECK(ld.item() == doctest::Approx(0.25));
    CHECK(lg.item() == doctest::Approx(0.25));
}

TEST_CASE("lsgan losses are non-negative with the right minima") {
    double best_ld = 1e9, best_lg = 1e9;
    double best_ld_r = -1, best_ld_f = -1, best_lg_f = -1;
    for (double r = 0.0; r <= 1.0001; r += 0.1) {
        for (double f = 0.0; f <= 1.0001; f += 0.1) {
            auto [ld, lg] = nn::lsgan_losses(TensorF::scalar(static_cast<float>(r)),
                                             TensorF::scalar(static_cast<float>(f)));
            CHECK(ld.item() >= 0.0);
            CHECK(lg.item() >= 0.0);
            if (ld.item() < best_ld) {
                best_ld = ld.item();
                best_ld_r = r;
                best_ld_f = f;
            }
            if (lg.item() < best_lg) {
                best_lg = lg.item();
                best_lg_f = f;
            }
        }
    }
    CHECK(best_ld_r == doctest::Approx(1.0));
    CHECK(best_ld_f == doctest::Approx(0.0));
    CHECK(best_lg_f == doctest::Approx(1.0));
}
