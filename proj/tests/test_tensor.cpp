#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>

#include "core/gradcheck.hpp"
#include "core/ops.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace acdl;
using acdl::test::random_tensor;

namespace {

// Independent convolution oracle: plain nested loops, no im2col.
template <class T>
std::vector<T> conv_reference(const Tensor<T>& x, const Tensor<T>& k, const Tensor<T>& bias,
                              int stride, int pad) {
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int KH = k.dim(0), KW = k.dim(1), CO = k.dim(3);
    const int OH = (H + 2 * pad - KH) / stride + 1;
    const int OW = (W + 2 * pad - KW) / stride + 1;
    std::vector<T> out(static_cast<size_t>(N) * OH * OW * CO, T(0));
    auto xv = x.values();
    auto kv = k.values();
    auto bv = bias.values();
    for (int n = 0; n < N; ++n)
        for (int oy = 0; oy < OH; ++oy)
            for (int ox = 0; ox < OW; ++ox)
                for (int co = 0; co < CO; ++co) {
                    double acc = bv[co];
                    for (int ky = 0; ky < KH; ++ky)
                        for (int kx = 0; kx < KW; ++kx)
                            for (int c = 0; c < C; ++c) {
                                const int iy = oy * stride - pad + ky;
                                const int ix = ox * stride - pad + kx;
                                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                                acc += static_cast<double>(xv[((static_cast<size_t>(n) * H + iy) * W + ix) * C + c]) *
                                       kv[((static_cast<size_t>(ky) * KW + kx) * C + c) * CO + co];
                            }
                    out[((static_cast<size_t>(n) * OH + oy) * OW + ox) * CO + co] = static_cast<T>(acc);
                }
    return out;
}

}  // namespace

TEST_CASE("tensor invariants") {
    TensorF t = TensorF::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.size() == 6);
    CHECK(t.shape() == Shape{2, 3});
    CHECK_THROWS_AS(TensorF::from_data({2, 2}, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(TensorF::from_data({0}, {}), ShapeError);
    CHECK_THROWS_AS(TensorF::from_data({1}, {std::nanf("")}), NumericError);
    CHECK_THROWS_AS(TensorF::from_data({1}, {INFINITY}), NumericError);
    CHECK_THROWS_AS(t.item(), ShapeError);
    CHECK(TensorF::scalar(4.f).item() == 4.f);
}

TEST_CASE("matmul examples") {
    // Identity case.
    TensorF eye = TensorF::from_data({2, 2}, {1, 0, 0, 1});
    TensorF b = TensorF::from_data({2, 2}, {5, 6, 7, 8});
    const std::vector<float> identity_result = test::vals(matmul(eye, b));
    CHECK(identity_result[0] == 5.f);
    CHECK(test::all_close<float>(identity_result, b.values(), 0.0));

    // Hand-multiplication oracle: [[1,2],[3,4]] x [[5,6],[7,8]].
    TensorF a = TensorF::from_data({2, 2}, {1, 2, 3, 4});
    TensorF c = matmul(a, b);
    const auto cv = c.values();
    CHECK(cv[0] == 19.f);
    CHECK(cv[1] == 22.f);
    CHECK(cv[2] == 43.f);
    CHECK(cv[3] == 50.f);

    // Contract violation names both shapes.
    TensorF bad = TensorF::zeros({2, 3});
    try {
        (void)matmul(bad, bad);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[2, 3]") != std::string::npos);
    }
}

TEST_CASE("conv2d examples") {
    // 1x1 kernel, weight 1, bias 0: identity.
    RandomSource rng(7);
    TensorF x = random_tensor<float>({1, 4, 4, 1}, rng);
    TensorF k1 = TensorF::from_data({1, 1, 1, 1}, {1.f});
    TensorF b0 = TensorF::zeros({1});
    CHECK(test::all_close<float>(test::vals(conv2d(x, k1, b0, 1)), x.values(), 0.0));

    // All-ones 3x3 over all-ones 3x3 input: direct summation gives 9.
    TensorF ones = TensorF::full({1, 3, 3, 1}, 1.f);
    TensorF k3 = TensorF::full({3, 3, 1, 1}, 1.f);
    TensorF y = conv2d(ones, k3, b0, 1);
    CHECK(y.shape() == Shape{1, 1, 1, 1});
    CHECK(y.item() == doctest::Approx(9.f));

    // Shape formula floor((5-3)/1)+1 = 3.
    TensorF x5 = random_tensor<float>({1, 5, 5, 1}, rng);
    CHECK(conv2d(x5, k3, b0, 1).shape() == Shape{1, 3, 3, 1});

    // Stride-2 shape.
    CHECK(conv2d(x5, k3, b0, 2).shape() == Shape{1, 2, 2, 1});

    // Kernel larger than input.
    TensorF tiny = random_tensor<float>({1, 2, 2, 1}, rng);
    CHECK_THROWS_AS(conv2d(tiny, k3, b0, 1), ShapeError);
}

TEST_CASE("conv2d matches the nested-loop reference") {
    RandomSource rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + rng.uniform_int(2);
        const int h = 3 + rng.uniform_int(7);   // 3..9
        const int w = 3 + rng.uniform_int(7);
        const int c = 1 + rng.uniform_int(4);   // 1..4
        const int co = 1 + rng.uniform_int(3);
        const int kh = 1 + rng.uniform_int(3);  // 1..3
        const int kw = 1 + rng.uniform_int(3);
        const int stride = 1 + rng.uniform_int(2);
        const int pad = rng.uniform_int(2);
        if (h + 2 * pad < kh || w + 2 * pad < kw) continue;
        TensorF x = random_tensor<float>({n, h, w, c}, rng);
        TensorF k = random_tensor<float>({kh, kw, c, co}, rng);
        TensorF b = random_tensor<float>({co}, rng);
        const TensorF got = conv2d(x, k, b, stride, pad);
        const auto want = conv_reference(x, k, b, stride, pad);
        CHECK(test::max_abs_diff<float>(got.values(), want) < 1e-6);
    }
}

TEST_CASE("conv2d_transpose examples") {
    RandomSource rng(13);
    // stride 1, 1x1 kernel of weight 1, pad 0: identity.
    TensorF x = random_tensor<float>({1, 3, 3, 1}, rng);
    TensorF k1 = TensorF::from_data({1, 1, 1, 1}, {1.f});
    CHECK(test::all_close<float>(test::vals(conv2d_transpose(x, k1, 1, 0)), x.values(), 0.0));

    // (8-1)*2 - 2 + 4 = 16.
    TensorF x8 = random_tensor<float>({1, 8, 8, 2}, rng);
    TensorF k4 = random_tensor<float>({4, 4, 3, 2}, rng);
    CHECK(conv2d_transpose(x8, k4, 2, 1).shape() == Shape{1, 16, 16, 3});

    // Non-positive output extent.
    TensorF x1 = random_tensor<float>({1, 1, 1, 2}, rng);
    TensorF k2 = random_tensor<float>({2, 2, 3, 2}, rng);
    CHECK_THROWS_AS(conv2d_transpose(x1, k2, 1, 1), ShapeError);
}

TEST_CASE("conv2d_transpose is the adjoint of conv2d") {
    RandomSource rng(17);
    // (kernel, stride, pad) combos where the strided conv uses every input
    // row, so the adjoint shape matches exactly (the GAN's 4/2/1 included).
    const int combos[4][3] = {{3, 1, 0}, {3, 1, 1}, {4, 2, 1}, {2, 2, 0}};
    for (int trial = 0; trial < 8; ++trial) {
        const auto& combo = combos[trial % 4];
        const int kside = combo[0], stride = combo[1], pad = combo[2];
        const int ci = 1 + rng.uniform_int(3), co = 1 + rng.uniform_int(3);
        TensorD x = random_tensor<double>({2, 6, 6, ci}, rng);
        TensorD k = random_tensor<double>({kside, kside, ci, co}, rng);
        TensorD bias = TensorD::zeros({co});
        TensorD y = conv2d(x, k, bias, stride, pad);
        TensorD g = random_tensor<double>(y.shape(), rng);

        // Inner-product identity <conv(x), g> == <x, tconv(g)>.
        // The conv kernel [KH,KW,Ci,Co] doubles as the tconv kernel
        // [KH,KW,Cout=Ci,Cin=Co] without reordering.
        TensorD back = conv2d_transpose(g, k, stride, pad);
        REQUIRE(back.shape() == x.shape());
        double lhs = 0.0, rhs = 0.0;
        for (int64_t i = 0; i < y.size(); ++i) lhs += y.values()[i] * g.values()[i];
        for (int64_t i = 0; i < x.size(); ++i) rhs += x.values()[i] * back.values()[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

        // And tconv forward equals the autodiff backward-input of conv2d.
        TensorD x2 = x.clone();
        x2.set_requires_grad(true);
        TensorD loss = sum_all(mul(conv2d(x2, k, bias, stride, pad), g));
        loss.backward();
        CHECK(test::max_abs_diff<double>(x2.grad(), back.values()) < 1e-9);
    }
}

TEST_CASE("maxpool2d examples") {
    // Constant input -> constant output.
    TensorF c = TensorF::full({1, 4, 4, 2}, 0.7f);
    TensorF pooled = maxpool2d(c);
    CHECK(pooled.shape() == Shape{1, 2, 2, 2});
    for (float v : pooled.values()) CHECK(v == 0.7f);

    // Window max oracle.
    TensorF m = TensorF::from_data({1, 2, 2, 1}, {1, 2, 3, 4});
    CHECK(maxpool2d(m).item() == 4.f);

    // Odd rows/columns are dropped: H=5 -> output H=2.
    RandomSource rng(3);
    TensorF x5 = random_tensor<float>({1, 5, 6, 1}, rng);
    CHECK(maxpool2d(x5).shape() == Shape{1, 2, 3, 1});

    // Exact window maxima.
    TensorF x = random_tensor<float>({2, 6, 6, 3}, rng);
    TensorF y = maxpool2d(x);
    auto xv = x.values();
    auto yv = y.values();
    for (int n = 0; n < 2; ++n)
        for (int oy = 0; oy < 3; ++oy)
            for (int ox = 0; ox < 3; ++ox)
                for (int ch = 0; ch < 3; ++ch) {
                    float best = -1e30f;
                    for (int ky = 0; ky < 2; ++ky)
                        for (int kx = 0; kx < 2; ++kx)
                            best = std::max(best,
                                            xv[((static_cast<size_t>(n) * 6 + oy * 2 + ky) * 6 + ox * 2 + kx) * 3 + ch]);
                    CHECK(yv[((static_cast<size_t>(n) * 3 + oy) * 3 + ox) * 3 + ch] == best);
                }

    CHECK_THROWS_AS(maxpool2d(TensorF::zeros({1, 1, 4, 1})), ShapeError);
}

TEST_CASE("maxpool2d routes tied gradients to the first maximum") {
    // Window {5,5,3,1}: both 5s tie; the first-encountered cell (row-major)
    // takes the whole gradient.
    TensorD x = TensorD::from_data({1, 2, 2, 1}, {5, 5, 3, 1});
    x.set_requires_grad(true);
    TensorD loss = sum_all(maxpool2d(x));
    loss.backward();
    const auto g = x.grad();
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);
}

TEST_CASE("activation examples") {
    TensorF x = TensorF::from_data({4}, {-1.f, 0.f, 2.f, -0.5f});
    const auto r = test::vals(relu(x));
    CHECK(r[0] == 0.f);
    CHECK(r[2] == 2.f);
    const auto l = test::vals(leaky_relu(x));
    CHECK(l[0] == doctest::Approx(-0.2f));
    CHECK(l[2] == 2.f);
    CHECK(sigmoid(TensorF::scalar(0.f)).item() == doctest::Approx(0.5f));
    CHECK(tanh_op(TensorF::scalar(0.f)).item() == 0.f);

    // Softmax of a single element is forced to 1.
    CHECK(softmax_lastdim(TensorF::scalar(3.7f)).item() == doctest::Approx(1.f));

    // Rows sum to 1 and are strictly positive.
    TensorF logits = TensorF::from_data({2, 3}, {30.f, 0.f, -30.f, 3.f, 3.f, 3.f});
    TensorF sm = softmax_lastdim(logits);
    const auto sv = sm.values();
    for (int row = 0; row < 2; ++row) {
        double sum = 0.0;
        for (int j = 0; j < 3; ++j) {
            CHECK(sv[row * 3 + j] > 0.f);
            sum += sv[row * 3 + j];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Max subtraction keeps extreme logits finite and normalized.
    TensorF extreme = softmax_lastdim(TensorF::from_data({1, 3}, {1000.f, 0.f, -1000.f}));
    double esum = 0.0;
    for (const float v : extreme.values()) esum += v;
    CHECK(esum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("flatten and reshape keep row-major order") {
    TensorF x = TensorF::from_data({1, 2, 2, 1}, {1, 2, 3, 4});
    TensorF f = flatten(x);
    CHECK(f.shape() == Shape{1, 4});
    const auto fv = f.values();
    CHECK(fv[1] == 2.f);
    CHECK(fv[2] == 3.f);
    // Round trip.
    TensorF back = reshape(f, {1, 2, 2, 1});
    CHECK(test::all_close(back.values(), x.values(), 0.0));
    // Leading batch axis is preserved.
    TensorF batch = TensorF::zeros({3, 2, 2, 2});
    CHECK(flatten(batch).shape() == Shape{3, 8});
    CHECK_THROWS_AS(reshape(x, {5}), ShapeError);
}

TEST_CASE("extract_patches") {
    RandomSource rng(23);
    // H=W=P: one patch equal to the flattened image.
    TensorF img = random_tensor<float>({1, 4, 4, 3}, rng);
    TensorF one = extract_patches(img, 4);
    CHECK(one.shape() == Shape{1, 1, 48});
    CHECK(test::all_close<float>(one.values(), img.values(), 0.0));

    // 32/8 -> 16 patches of dim 192.
    TensorF x32 = random_tensor<float>({2, 32, 32, 3}, rng);
    CHECK(extract_patches(x32, 8).shape() == Shape{2, 16, 192});

    // 224/16 -> 196 patches of dim 768.
    TensorF x224 = TensorF::zeros({1, 224, 224, 3});
    CHECK(extract_patches(x224, 16).shape() == Shape{1, 196, 768});

    // Patch values come from the right window (row-major patches).
    TensorF small = TensorF::from_data({1, 2, 4, 1}, {0, 1, 2, 3, 4, 5, 6, 7});
    TensorF p = extract_patches(small, 2);
    CHECK(p.shape() == Shape{1, 2, 4});
    const std::vector<float> want = {0, 1, 4, 5, 2, 3, 6, 7};
    CHECK(test::all_close<float>(p.values(), want, 0.0));

    CHECK_THROWS_AS(extract_patches(x32, 5), ShapeError);
}

TEST_CASE("reductions") {
    TensorF x = TensorF::from_data({1, 2, 1}, {1.f, 3.f});
    CHECK(mean_axis1(x).item() == doctest::Approx(2.f));
    TensorF c = TensorF::full({2, 5, 3}, 0.25f);
    for (const float v : test::vals(mean_axis1(c))) CHECK(v == doctest::Approx(0.25f));
    TensorF single = TensorF::from_data({1, 1, 2}, {4.f, 8.f});
    const std::vector<float> single_want = {4.f, 8.f};
    CHECK(test::vals(mean_axis1(single)) == single_want);
    CHECK(sum_all(TensorF::from_data({3}, {1, 2, 3})).item() == 6.f);
    CHECK(mean_all(TensorF::from_data({3}, {1, 2, 3})).item() == 2.f);
}

TEST_CASE("backward: analytic examples") {
    // loss = sum(x^2), x=[1,2] -> grad [2,4].
    TensorD x = TensorD::from_data({2}, {1.0, 2.0});
    x.set_requires_grad(true);
    TensorD loss = sum_all(mul(x, x));
    loss.backward();
    CHECK(x.grad()[0] == doctest::Approx(2.0));
    CHECK(x.grad()[1] == doctest::Approx(4.0));

    // Fan-out: grads accumulate across both uses.
    TensorD y = TensorD::from_data({2}, {3.0, -1.0});
    y.set_requires_grad(true);
    TensorD two_paths = add(sum_all(mul(y, TensorD::from_data({2}, {1.0, 1.0}))),
                            sum_all(mul(y, TensorD::from_data({2}, {2.0, 2.0}))));
    two_paths.backward();
    CHECK(y.grad()[0] == doctest::Approx(3.0));
    CHECK(y.grad()[1] == doctest::Approx(3.0));

    // backward on a non-scalar is a contract error.
    TensorD z = TensorD::from_data({2}, {1.0, 1.0});
    z.set_requires_grad(true);
    TensorD v = mul(z, z);
    CHECK_THROWS_AS(v.backward(), ValueError);
}

TEST_CASE("recording and replaying a graph is bit-identical") {
    auto run = [](uint64_t seed) {
        RandomSource rng(seed);
        TensorF x = random_tensor<float>({2, 6, 6, 2}, rng);
        TensorF k = random_tensor<float>({3, 3, 2, 4}, rng);
        TensorF b = random_tensor<float>({4}, rng);
        TensorF y = sigmoid(conv2d(x, k, b, 1));
        TensorF pooled = maxpool2d(y);
        return std::vector<float>(pooled.values().begin(), pooled.values().end());
    };
    const auto a = run(99);
    const auto b = run(99);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

TEST_CASE("non-finite op results are rejected") {
    TensorF big = TensorF::full({2}, 3e38f);
    CHECK_THROWS_AS(mul(big, big), NumericError);
}
