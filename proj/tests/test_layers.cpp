#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nn/layers.hpp"
#include "testutil.hpp"

using namespace acdl;
using acdl::test::random_tensor;

TEST_CASE("dense layer") {
    nn::ForwardCtx ctx;
    // W = I, b = 0, identity activation -> x.
    nn::DenseLayer<float> id("id", TensorF::from_data({2, 2}, {1, 0, 0, 1}), TensorF::zeros({2}),
                             Act::identity);
    RandomSource rng(5);
    TensorF x = random_tensor<float>({3, 2}, rng);
    CHECK(test::all_close<float>(test::vals(id.forward(x, ctx)), x.values(), 0.0));

    // x=[1,1], W=[[1],[1]], b=[0.5], sigmoid -> sigmoid(2.5).
    nn::DenseLayer<float> s("s", TensorF::from_data({2, 1}, {1, 1}),
                            TensorF::from_data({1}, {0.5f}), Act::sigmoid);
    TensorF one = TensorF::from_data({1, 2}, {1, 1});
    CHECK(s.forward(one, ctx).item() == doctest::Approx(0.92414181997875655).epsilon(1e-6));

    // Parameter count: in*out + out (Table-style accounting, 64 -> 64).
    auto d = nn::DenseLayer<float>::make("d", 64, 64, Act::identity, rng);
    CHECK(d->param_count() == 64 * 64 + 64);

    // Shape mismatch names the shapes.
    CHECK_THROWS_AS(s.forward(TensorF::zeros({1, 3}), ctx), ShapeError);

    // Rank-3 input applies the projection per position.
    auto d3 = nn::DenseLayer<float>::make("d3", 4, 2, Act::identity, rng);
    CHECK(d3->forward(random_tensor<float>({2, 5, 4}, rng), ctx).shape() == Shape{2, 5, 2});
}

TEST_CASE("dropout layer") {
    RandomSource rng(7);
    TensorF x = random_tensor<float>({100}, rng, 0.5, 1.5);

    // Eval mode: exact identity.
    nn::DropoutLayer<float> drop(0.5);
    nn::ForwardCtx eval_ctx;
    TensorF eval_out = drop.forward(x, eval_ctx);
    CHECK(eval_out.same_storage(x));

    // Rate 0: identity in both modes.
    nn::DropoutLayer<float> zero(0.0);
    nn::ForwardCtx train_ctx{true, &rng};
    CHECK(zero.forward(x, train_ctx).same_storage(x));
    CHECK(zero.forward(x, eval_ctx).same_storage(x));

    CHECK_THROWS_AS(nn::DropoutLayer<float>(1.0), ValueError);
    CHECK_THROWS_AS(nn::DropoutLayer<float>(-0.1), ValueError);

    // Law of large numbers at rate 0.5 over 1e5 units: kept fraction within
    // [0.49, 0.51] and the output mean within 2% of the input mean.
    TensorF big = TensorF::full({100000}, 1.0f);
    TensorF dropped = drop.forward(big, train_ctx);
    const auto dv = dropped.values();
    int64_t kept = 0;
    double sum = 0.0;
    for (const float v : dv) {
        kept += v != 0.0f ? 1 : 0;
        sum += v;
    }
    const double kept_fraction = static_cast<double>(kept) / static_cast<double>(dv.size());
    CHECK(kept_fraction > 0.49);
    CHECK(kept_fraction < 0.51);
    const double mean = sum / static_cast<double>(dv.size());
    CHECK(std::abs(mean - 1.0) < 0.02);

    // Kept units are scaled by 1/(1-rate).
    for (const float v : dv) CHECK((v == 0.0f || v == 2.0f));
}

TEST_CASE("multi-head attention") {
    RandomSource rng(11);
    nn::ForwardCtx ctx;
    const int dim = 8, heads = 2;
    nn::MultiHeadAttentionLayer<float> attn("attn", dim, heads, rng);
    CHECK(attn.head_dim() == 4);
    CHECK_THROWS_AS(nn::MultiHeadAttentionLayer<float>("bad", 8, 3, rng), ShapeError);

    // Single token: softmax over one score is 1, so the output is the
    // output-projection of the concatenated V vectors.
    TensorF single = random_tensor<float>({1, 1, dim}, rng);
    TensorF got = attn.forward(single, ctx);
    CHECK(got.shape() == Shape{1, 1, dim});
    // Reproduce by hand: v_h = x Wv_h + bv_h, concat, out = concat Wo + bo.
    std::vector<nn::Param<float>*> params;
    attn.collect_params(params);
    auto find = [&](const std::string& name) -> TensorF& {
        for (auto* p : params)
            if (p->name == "attn." + name) return p->value;
        throw std::runtime_error("missing param " + name);
    };
    std::vector<TensorF> vs;
    for (int h = 0; h < heads; ++h) {
        const std::string base = "h" + std::to_string(h);
        vs.push_back(add(bmm(single, find(base + ".v.w")), find(base + ".v.b")));
    }
    TensorF want = add(bmm(concat_lastdim(vs), find("out.w")), find("out.b"));
    CHECK(test::max_abs_diff<float>(got.values(), want.values()) < 1e-6);

    // Attention rows sum to 1.
    TensorF x = random_tensor<float>({2, 5, dim}, rng);
    for (TensorF& map : attn.attention_maps(x)) {
        const auto mv = map.values();
        const int P = map.dim(map.rank() - 1);
        for (int64_t row = 0; row < map.size() / P; ++row) {
            double sum = 0.0;
            for (int j = 0; j < P; ++j) sum += mv[row * P + j];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        }
    }

    // Two identical tokens produce identical output rows.
    TensorF tok = random_tensor<float>({1, 1, dim}, rng);
    std::vector<float> twice(test::vals(tok));
    std::vector<float> tok_v = test::vals(tok);
    twice.insert(twice.end(), tok_v.begin(), tok_v.end());
    TensorF pair = TensorF::from_data({1, 2, dim}, std::move(twice));
    TensorF out2 = attn.forward(pair, ctx);
    const auto ov = out2.values();
    for (int j = 0; j < dim; ++j) CHECK(ov[j] == doctest::Approx(ov[dim + j]).epsilon(1e-6));

    // Permutation equivariance over patches (no positional embedding).
    TensorF seq = random_tensor<float>({1, 4, dim}, rng);
    TensorF fwd = attn.forward(seq, ctx);
    // Reverse the patch order.
    std::vector<float> rev(static_cast<size_t>(seq.size()));
    const auto sv = seq.values();
    for (int p = 0; p < 4; ++p)
        for (int j = 0; j < dim; ++j) rev[static_cast<size_t>(p) * dim + j] = sv[static_cast<size_t>(3 - p) * dim + j];
    TensorF seq_rev = TensorF::from_data({1, 4, dim}, std::move(rev));
    TensorF fwd_rev = attn.forward(seq_rev, ctx);
    const auto fv = fwd.values();
    const auto frv = fwd_rev.values();
    for (int p = 0; p < 4; ++p)
        for (int j = 0; j < dim; ++j)
            CHECK(fv[static_cast<size_t>(p) * dim + j] ==
                  doctest::Approx(frv[static_cast<size_t>(3 - p) * dim + j]).epsilon(1e-5));
}

TEST_CASE("layer norm statistics") {
    RandomSource rng(13);
    nn::ForwardCtx ctx;
    const int dim = 16;
    // Before gamma/beta (gamma=1, beta=0 at init): per-vector mean 0, var 1.
    nn::LayerNormLayer<float> ln("ln", dim);
    TensorF x = random_tensor<float>({6, dim}, rng, -3.0, 3.0);
    TensorF y = ln.forward(x, ctx);
    const auto yv = y.values();
    for (int row = 0; row < 6; ++row) {
        double mean = 0.0, var = 0.0;
        for (int j = 0; j < dim; ++j) mean += yv[row * dim + j];
        mean /= dim;
        for (int j = 0; j < dim; ++j) {
            const double d = yv[row * dim + j] - mean;
            var += d * d;
        }
        var /= dim;
        CHECK(std::abs(mean) < 1e-4);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("batch norm running statistics") {
    RandomSource rng(17);
    nn::BatchNormLayer<float> bn("bn", 2);
    TensorF x = random_tensor<float>({4, 3, 3, 2}, rng, 1.0, 3.0);

    // Eval before any training step uses the (0, 1) initial running stats.
    nn::ForwardCtx eval_ctx;
    TensorF eval0 = bn.forward(x, eval_ctx);
    CHECK(test::max_abs_diff<float>(eval0.values(), x.values()) < 1e-4);

    // Training normalizes with batch statistics.
    nn::ForwardCtx train_ctx{true, &rng};
    TensorF y = bn.forward(x, train_ctx);
    const auto yv = y.values();
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (int64_t i = c; i < y.size(); i += 2) mean += yv[static_cast<size_t>(i)];
        mean /= static_cast<double>(y.size() / 2);
        CHECK(std::abs(mean) < 1e-5);
    }

    // Running stats moved toward the batch statistics (momentum 0.9).
    std::vector<nn::Param<float>*> params;
    bn.collect_params(params);
    for (auto* p : params) {
        if (p->name == "bn.running_mean") {
            CHECK(p->value.values()[0] > 0.05);  // batch mean ~2 -> 0.1*2
            CHECK_FALSE(p->trainable);
        }
    }
}

TEST_CASE("global average pool and patches") {
    nn::ForwardCtx ctx;
    RandomSource rng(19);
    nn::GlobalAvgPoolLayer<float> gap;
    TensorF single = random_tensor<float>({2, 1, 5}, rng);
    TensorF pooled = gap.forward(single, ctx);
    CHECK(test::max_abs_diff<float>(pooled.values(),
                                    test::vals(reshape(single, {2, 5}))) == 0.0);

    nn::PatchExtractLayer<float> pe(8);
    CHECK(pe.forward(TensorF::zeros({1, 32, 32, 3}), ctx).shape() == Shape{1, 16, 192});
}
