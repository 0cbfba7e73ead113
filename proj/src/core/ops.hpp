#pragma once

// Differentiable tensor ops. Every op records a GraphNode when any input
// requires a gradient; backward rules accumulate additively so fan-out just
// works. Convolutions route through im2col + GEMM for speed.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <vector>

#include "core/tensor.hpp"

namespace acdl {

namespace detail {

// C[M,N] += A[M,K] * B[K,N], all row-major.
template <class T>
void gemm_nn(int M, int N, int K, const T* a, const T* b, T* c) {
    for (int i = 0; i < M; ++i) {
        T* ci = c + static_cast<size_t>(i) * N;
        const T* ai = a + static_cast<size_t>(i) * K;
        for (int k = 0; k < K; ++k) {
            const T av = ai[k];
            const T* bk = b + static_cast<size_t>(k) * N;
            for (int j = 0; j < N; ++j) ci[j] += av * bk[j];
        }
    }
}

// C[M,K] += A[M,N] * B[K,N]^T  (dot products of contiguous rows).
template <class T>
void gemm_nt(int M, int N, int K, const T* a, const T* b, T* c) {
    for (int i = 0; i < M; ++i) {
        const T* ai = a + static_cast<size_t>(i) * N;
        T* ci = c + static_cast<size_t>(i) * K;
        for (int k = 0; k < K; ++k) {
            const T* bk = b + static_cast<size_t>(k) * N;
            T acc = 0;
            for (int j = 0; j < N; ++j) acc += ai[j] * bk[j];
            ci[k] += acc;
        }
    }
}

// C[K,N] += A[M,K]^T * B[M,N].
template <class T>
void gemm_tn(int M, int N, int K, const T* a, const T* b, T* c) {
    for (int m = 0; m < M; ++m) {
        const T* am = a + static_cast<size_t>(m) * K;
        const T* bm = b + static_cast<size_t>(m) * N;
        for (int k = 0; k < K; ++k) {
            const T av = am[k];
            T* ck = c + static_cast<size_t>(k) * N;
            for (int j = 0; j < N; ++j) ck[j] += av * bm[j];
        }
    }
}

// Gather one channel-last image [H,W,C] into columns [OH*OW, KH*KW*C].
// Out-of-range taps (from padding) read as zero.
template <class T>
void im2col(const T* x, int H, int W, int C, int KH, int KW, int stride, int pad,
            int OH, int OW, T* col) {
    const int patch = KH * KW * C;
    for (int oy = 0; oy < OH; ++oy) {
        for (int ox = 0; ox < OW; ++ox) {
            T* dst = col + static_cast<size_t>(oy * OW + ox) * patch;
            for (int ky = 0; ky < KH; ++ky) {
                const int iy = oy * stride - pad + ky;
                for (int kx = 0; kx < KW; ++kx) {
                    const int ix = ox * stride - pad + kx;
                    if (iy >= 0 && iy < H && ix >= 0 && ix < W) {
                        std::memcpy(dst, x + (static_cast<size_t>(iy) * W + ix) * C,
                                    sizeof(T) * static_cast<size_t>(C));
                    } else {
                        std::fill_n(dst, C, T(0));
                    }
                    dst += C;
                }
            }
        }
    }
}

// Scatter-add inverse of im2col.
template <class T>
void col2im_add(const T* col, int H, int W, int C, int KH, int KW, int stride, int pad,
                int OH, int OW, T* x) {
    const int patch = KH * KW * C;
    for (int oy = 0; oy < OH; ++oy) {
        for (int ox = 0; ox < OW; ++ox) {
            const T* src = col + static_cast<size_t>(oy * OW + ox) * patch;
            for (int ky = 0; ky < KH; ++ky) {
                const int iy = oy * stride - pad + ky;
                for (int kx = 0; kx < KW; ++kx) {
                    const int ix = ox * stride - pad + kx;
                    if (iy >= 0 && iy < H && ix >= 0 && ix < W) {
                        T* dst = x + (static_cast<size_t>(iy) * W + ix) * C;
                        for (int c = 0; c < C; ++c) dst[c] += src[c];
                    }
                    src += C;
                }
            }
        }
    }
}

template <class T>
Tensor<T> finish(const char* op, Shape shape, std::vector<T> v, bool track,
                 std::vector<Tensor<T>> inputs,
                 std::function<void(const std::vector<T>&, const std::vector<T>&)> backward) {
    std::shared_ptr<GraphNode<T>> node;
    if (track) {
        node = std::make_shared<GraphNode<T>>();
        node->op = op;
        node->inputs = std::move(inputs);
        node->backward = std::move(backward);
    }
    Tensor<T> t = Tensor<T>::make_result(std::move(shape), std::move(v), std::move(node));
    t.check_finite(op);
    return t;
}

// True when `small` is a trailing suffix of `big` (shape broadcasting rule
// used for biases and per-feature affine parameters).
inline bool shape_suffix(const Shape& small, const Shape& big) {
    if (small.size() > big.size()) return false;
    return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

// a + b, where b's shape is a trailing suffix of a's (equal shapes included).
template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    if (!detail::shape_suffix(b.shape(), a.shape())) {
        throw ShapeError("add: shape " + shape_str(b.shape()) + " does not broadcast into " +
                         shape_str(a.shape()));
    }
    const auto av = a.values();
    const auto bv = b.values();
    const size_t bn = bv.size();
    std::vector<T> out(av.size());
    for (size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i % bn];
    const bool track = a.requires_grad() || b.requires_grad();
    Tensor<T> ac = a, bc = b;
    return detail::finish<T>(
        "add", a.shape(), std::move(out), track, {a, b},
        [ac, bc](const std::vector<T>&, const std::vector<T>& g) mutable {
            if (ac.requires_grad()) ac.accumulate_grad(g);
            if (bc.requires_grad()) {
                const size_t bn = bc.values().size();
                std::vector<T> db(bn, T(0));
                for (size_t i = 0; i < g.size(); ++i) db[i % bn] += g[i];
                bc.accumulate_grad(db);
            }
        });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("sub: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) +
                         " differ");
    }
    const auto av = a.values();
    const auto bv = b.values();
    std::vector<T> out(av.size());
    for (size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
    const bool track = a.requires_grad() || b.requires_grad();
    Tensor<T> ac = a, bc = b;
    return detail::finish<T>(
        "sub", a.shape(), std::move(out), track, {a, b},
        [ac, bc](const std::vector<T>&, const std::vector<T>& g) mutable {
            if (ac.requires_grad()) ac.accumulate_grad(g);
            if (bc.requires_grad()) {
                std::vector<T> db(g.size());
                for (size_t i = 0; i < g.size(); ++i) db[i] = -g[i];
                bc.accumulate_grad(db);
            }
        });
}

// a * b elementwise, with the same suffix broadcast as add().
template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    if (!detail::shape_suffix(b.shape(), a.shape())) {
        throw ShapeError("mul: shape " + shape_str(b.shape()) + " does not broadcast into " +
                         shape_str(a.shape()));
    }
    const auto av = a.values();
    const auto bv = b.values();
    const size_t bn = bv.size();
    std::vector<T> out(av.size());
    for (size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i % bn];
    const bool track = a.requires_grad() || b.requires_grad();
    Tensor<T> ac = a, bc = b;
    return detail::finish<T>(
        "mul", a.shape(), std::move(out), track, {a, b},
        [ac, bc](const std::vector<T>&, const std::vector<T>& g) mutable {
            const auto av = ac.values();
            const auto bv = bc.values();
            const size_t bn = bv.size();
            if (ac.requires_grad()) {
                std::vector<T> da(g.size());
                for (size_t i = 0; i < g.size(); ++i) da[i] = g[i] * bv[i % bn];
                ac.accumulate_grad(da);
            }
            if (bc.requires_grad()) {
                std::vector<T> db(bn, T(0));
                for (size_t i = 0; i < g.size(); ++i) db[i % bn] += g[i] * av[i];
                bc.accumulate_grad(db);
            }
        });
}

template <class T>
Tensor<T> scalar_mul(const Tensor<T>& a, T c) {
    const auto av = a.values();
    std::vector<T> out(av.size());
    for (size_t i = 0; i < av.size(); ++i) out[i] = av[i] * c;
    Tensor<T> ac = a;
    return detail::finish<T>("scalar_mul", a.shape(), std::move(out), a.requires_grad(), {a},
                             [ac, c](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 std::vector<T> da(g.size());
                                 for (size_t i = 0; i < g.size(); ++i) da[i] = g[i] * c;
                                 ac.accumulate_grad(da);
                             });
}

template <class T>
Tensor<T> scalar_add(const Tensor<T>& a, T c) {
    const auto av = a.values();
    std::vector<T> out(av.size());
    for (size_t i = 0; i < av.size(); ++i) out[i] = av[i] + c;
    Tensor<T> ac = a;
    return detail::finish<T>("scalar_add", a.shape(), std::move(out), a.requires_grad(), {a},
                             [ac](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 ac.accumulate_grad(g);
                             });
}

// ---------------------------------------------------------------------------
// Matrix products
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    const int M = a.dim(0), K = a.dim(1), N = b.dim(1);
    std::vector<T> out(static_cast<size_t>(M) * N, T(0));
    detail::gemm_nn(M, N, K, a.values().data(), b.values().data(), out.data());
    const bool track = a.requires_grad() || b.requires_grad();
    Tensor<T> ac = a, bc = b;
    return detail::finish<T>(
        "matmul", {M, N}, std::move(out), track, {a, b},
        [ac, bc, M, K, N](const std::vector<T>&, const std::vector<T>& g) mutable {
            if (ac.requires_grad()) {
                std::vector<T> da(static_cast<size_t>(M) * K, T(0));
                detail::gemm_nt(M, N, K, g.data(), bc.values().data(), da.data());
                ac.accumulate_grad(da);
            }
            if (bc.requires_grad()) {
                std::vector<T> db(static_cast<size_t>(K) * N, T(0));
                detail::gemm_tn(M, N, K, ac.values().data(), g.data(), db.data());
                bc.accumulate_grad(db);
            }
        });
}

// Batched matmul over the last two axes: [batch.., M, K] x [batch.., K, N],
// or a rank-2 rhs [K, N] shared across the batch.
template <class T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() < 2 || b.rank() < 2) throw ShapeError("bmm: both operands must have rank >= 2");
    const int M = a.dim(a.rank() - 2), K = a.dim(a.rank() - 1);
    const int Kb = b.dim(b.rank() - 2), N = b.dim(b.rank() - 1);
    const bool shared_rhs = (b.rank() == 2);
    if (K != Kb ||
        (!shared_rhs && !std::equal(a.shape().begin(), a.shape().end() - 2, b.shape().begin(),
                                    b.shape().end() - 2))) {
        throw ShapeError("bmm: incompatible shapes " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    Shape out_shape(a.shape().begin(), a.shape().end() - 1);
    out_shape.push_back(N);
    const int64_t batches = numel(a.shape()) / (static_cast<int64_t>(M) * K);
    std::vector<T> out(static_cast<size_t>(batches) * M * N, T(0));
    const T* ap = a.values().data();
    const T* bp = b.values().data();
    for (int64_t i = 0; i < batches; ++i) {
        detail::gemm_nn(M, N, K, ap + i * M * K, shared_rhs ? bp : bp + i * K * N,
                        out.data() + i * M * N);
    }
    const bool track = a.requires_grad() || b.requires_grad();
    Tensor<T> ac = a, bc = b;
    return detail::finish<T>(
        "bmm", std::move(out_shape), std::move(out), track, {a, b},
        [ac, bc, M, K, N, batches, shared_rhs](const std::vector<T>&, const std::vector<T>& g) mutable {
            const T* ap = ac.values().data();
            const T* bp = bc.values().data();
            if (ac.requires_grad()) {
                std::vector<T> da(ac.values().size(), T(0));
                for (int64_t i = 0; i < batches; ++i) {
                    detail::gemm_nt(M, N, K, g.data() + i * M * N,
                                    shared_rhs ? bp : bp + i * K * N, da.data() + i * M * K);
                }
                ac.accumulate_grad(da);
            }
            if (bc.requires_grad()) {
                std::vector<T> db(bc.values().size(), T(0));
                for (int64_t i = 0; i < batches; ++i) {
                    detail::gemm_tn(M, N, K, ap + i * M * K, g.data() + i * M * N,
                                    shared_rhs ? db.data() : db.data() + i * K * N);
                }
                bc.accumulate_grad(db);
            }
        });
}

template <class T>
Tensor<T> transpose_last2(const Tensor<T>& a) {
    if (a.rank() < 2) throw ShapeError("transpose_last2: rank must be >= 2");
    const int M = a.dim(a.rank() - 2), N = a.dim(a.rank() - 1);
    Shape out_shape = a.shape();
    std::swap(out_shape[out_shape.size() - 2], out_shape[out_shape.size() - 1]);
    const int64_t batches = a.size() / (static_cast<int64_t>(M) * N);
    std::vector<T> out(a.values().size());
    const T* ap = a.values().data();
    for (int64_t i = 0; i < batches; ++i) {
        const T* src = ap + i * M * N;
        T* dst = out.data() + i * M * N;
        for (int r = 0; r < M; ++r)
            for (int c = 0; c < N; ++c) dst[static_cast<size_t>(c) * M + r] = src[static_cast<size_t>(r) * N + c];
    }
    Tensor<T> ac = a;
    return detail::finish<T>(
        "transpose_last2", std::move(out_shape), std::move(out), a.requires_grad(), {a},
        [ac, M, N, batches](const std::vector<T>&, const std::vector<T>& g) mutable {
            std::vector<T> da(g.size());
            for (int64_t i = 0; i < batches; ++i) {
                const T* src = g.data() + i * M * N;
                T* dst = da.data() + i * M * N;
                for (int c = 0; c < N; ++c)
                    for (int r = 0; r < M; ++r) dst[static_cast<size_t>(r) * N + c] = src[static_cast<size_t>(c) * M + r];
            }
            ac.accumulate_grad(da);
        });
}

// ---------------------------------------------------------------------------
// Convolutions and pooling (channel-last layouts)
// ---------------------------------------------------------------------------

// x: [N,H,W,Cin], kernel: [KH,KW,Cin,Cout], bias: [Cout]. Valid padding by
// default; `pad` adds symmetric zero padding (used by the GAN discriminator).
template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias, int stride,
                 int pad = 0) {
    if (x.rank() != 4 || kernel.rank() != 4) throw ShapeError("conv2d: input must be [N,H,W,C], kernel [KH,KW,Cin,Cout]");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int KH = kernel.dim(0), KW = kernel.dim(1), Cout = kernel.dim(3);
    if (kernel.dim(2) != C) {
        throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.dim(2)) +
                         " input channels, input has " + std::to_string(C));
    }
    if (bias.rank() != 1 || bias.dim(0) != Cout) throw ShapeError("conv2d: bias must be [Cout]");
    if (stride < 1) throw ValueError("conv2d: stride must be positive");
    if (pad < 0) throw ValueError("conv2d: pad must be non-negative");
    if (KH > H + 2 * pad || KW > W + 2 * pad) {
        throw ShapeError("conv2d: kernel " + shape_str(kernel.shape()) + " larger than input " +
                         shape_str(x.shape()));
    }
    const int OH = (H + 2 * pad - KH) / stride + 1;
    const int OW = (W + 2 * pad - KW) / stride + 1;
    const int patch = KH * KW * C;
    std::vector<T> out(static_cast<size_t>(N) * OH * OW * Cout);
    std::vector<T> col(static_cast<size_t>(OH) * OW * patch);
    const T* xp = x.values().data();
    const T* kp = kernel.values().data();  // [KH*KW*Cin, Cout] row-major view
    const auto bv = bias.values();
    for (int n = 0; n < N; ++n) {
        detail::im2col(xp + static_cast<size_t>(n) * H * W * C, H, W, C, KH, KW, stride, pad, OH, OW,
                       col.data());
        T* on = out.data() + static_cast<size_t>(n) * OH * OW * Cout;
        for (int i = 0; i < OH * OW; ++i)
            for (int c = 0; c < Cout; ++c) on[static_cast<size_t>(i) * Cout + c] = bv[c];
        detail::gemm_nn(OH * OW, Cout, patch, col.data(), kp, on);
    }
    const bool track = x.requires_grad() || kernel.requires_grad() || bias.requires_grad();
    Tensor<T> xc = x, kc = kernel, bc = bias;
    return detail::finish<T>(
        "conv2d", {N, OH, OW, Cout}, std::move(out), track, {x, kernel, bias},
        [xc, kc, bc, N, H, W, C, KH, KW, Cout, OH, OW, stride, pad](const std::vector<T>&,
                                                                    const std::vector<T>& g) mutable {
            const int patch = KH * KW * C;
            const T* xp = xc.values().data();
            const T* kp = kc.values().data();
            std::vector<T> col(static_cast<size_t>(OH) * OW * patch);
            std::vector<T> dk, dcol;
            const bool want_x = xc.requires_grad(), want_k = kc.requires_grad();
            if (want_k) dk.assign(kc.values().size(), T(0));
            if (want_x) dcol.resize(col.size());
            std::vector<T> dx;
            if (want_x) dx.assign(xc.values().size(), T(0));
            for (int n = 0; n < N; ++n) {
                const T* gn = g.data() + static_cast<size_t>(n) * OH * OW * Cout;
                if (want_k || want_x) {
                    detail::im2col(xp + static_cast<size_t>(n) * H * W * C, H, W, C, KH, KW, stride,
                                   pad, OH, OW, col.data());
                }
                if (want_k) detail::gemm_tn(OH * OW, Cout, patch, col.data(), gn, dk.data());
                if (want_x) {
                    std::fill(dcol.begin(), dcol.end(), T(0));
                    detail::gemm_nt(OH * OW, Cout, patch, gn, kp, dcol.data());
                    detail::col2im_add(dcol.data(), H, W, C, KH, KW, stride, pad, OH, OW,
                                       dx.data() + static_cast<size_t>(n) * H * W * C);
                }
            }
            if (want_x) xc.accumulate_grad(dx);
            if (want_k) kc.accumulate_grad(dk);
            if (bc.requires_grad()) {
                std::vector<T> db(static_cast<size_t>(Cout), T(0));
                for (size_t i = 0; i < g.size(); ++i) db[i % Cout] += g[i];
                bc.accumulate_grad(db);
            }
        });
}

// x: [N,H,W,Cin], kernel: [KH,KW,Cout,Cin]. Adjoint of the strided conv2d
// with the same stride/pad; output is [N, (H-1)*stride - 2*pad + KH, ..., Cout].
template <class T>
Tensor<T> conv2d_transpose(const Tensor<T>& x, const Tensor<T>& kernel, int stride, int pad) {
    if (x.rank() != 4 || kernel.rank() != 4) throw ShapeError("conv2d_transpose: input must be [N,H,W,C], kernel [KH,KW,Cout,Cin]");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int KH = kernel.dim(0), KW = kernel.dim(1), Cout = kernel.dim(2);
    if (kernel.dim(3) != C) {
        throw ShapeError("conv2d_transpose: kernel expects " + std::to_string(kernel.dim(3)) +
                         " input channels, input has " + std::to_string(C));
    }
    if (stride < 1) throw ValueError("conv2d_transpose: stride must be positive");
    if (pad < 0) throw ValueError("conv2d_transpose: pad must be non-negative");
    const int OH = (H - 1) * stride - 2 * pad + KH;
    const int OW = (W - 1) * stride - 2 * pad + KW;
    if (OH <= 0 || OW <= 0) {
        throw ShapeError("conv2d_transpose: non-positive output extent for input " +
                         shape_str(x.shape()));
    }
    const int patch = KH * KW * Cout;
    std::vector<T> out(static_cast<size_t>(N) * OH * OW * Cout, T(0));
    std::vector<T> cols(static_cast<size_t>(H) * W * patch);
    const T* xp = x.values().data();
    const T* kp = kernel.values().data();  // [KH*KW*Cout, Cin] row-major view
    for (int n = 0; n < N; ++n) {
        std::fill(cols.begin(), cols.end(), T(0));
        detail::gemm_nt(H * W, C, patch, xp + static_cast<size_t>(n) * H * W * C, kp, cols.data());
        // The roles of image and column grid swap relative to conv2d.
        detail::col2im_add(cols.data(), OH, OW, Cout, KH, KW, stride, pad, H, W,
                           out.data() + static_cast<size_t>(n) * OH * OW * Cout);
    }
    const bool track = x.requires_grad() || kernel.requires_grad();
    Tensor<T> xc = x, kc = kernel;
    return detail::finish<T>(
        "conv2d_transpose", {N, OH, OW, Cout}, std::move(out), track, {x, kernel},
        [xc, kc, N, H, W, C, KH, KW, Cout, OH, OW, stride, pad](const std::vector<T>&,
                                                                const std::vector<T>& g) mutable {
            const int patch = KH * KW * Cout;
            const T* xp = xc.values().data();
            const T* kp = kc.values().data();
            const bool want_x = xc.requires_grad(), want_k = kc.requires_grad();
            std::vector<T> dcols(static_cast<size_t>(H) * W * patch);
            std::vector<T> dx, dk;
            if (want_x) dx.assign(xc.values().size(), T(0));
            if (want_k) dk.assign(kc.values().size(), T(0));
            for (int n = 0; n < N; ++n) {
                detail::im2col(g.data() + static_cast<size_t>(n) * OH * OW * Cout, OH, OW, Cout, KH,
                               KW, stride, pad, H, W, dcols.data());
                if (want_x) {
                    detail::gemm_nn(H * W, C, patch, dcols.data(), kp,
                                    dx.data() + static_cast<size_t>(n) * H * W * C);
                }
                if (want_k) {
                    detail::gemm_tn(H * W, C, patch, dcols.data(),
                                    xp + static_cast<size_t>(n) * H * W * C, dk.data());
                }
            }
            if (want_x) xc.accumulate_grad(dx);
            if (want_k) kc.accumulate_grad(dk);
        });
}

// 2x2 window, stride 2; a trailing odd row/column is dropped. Gradient routes
// to the first-encountered maximum of each window.
template <class T>
Tensor<T> maxpool2d(const Tensor<T>& x) {
    if (x.rank() != 4) throw ShapeError("maxpool2d: input must be [N,H,W,C]");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    if (H < 2 || W < 2) {
        throw ShapeError("maxpool2d: spatial extent must be >= 2, got " + shape_str(x.shape()));
    }
    const int OH = H / 2, OW = W / 2;
    std::vector<T> out(static_cast<size_t>(N) * OH * OW * C);
    auto argmax = std::make_shared<std::vector<int64_t>>(out.size());
    const T* xp = x.values().data();
    size_t o = 0;
    for (int n = 0; n < N; ++n) {
        const size_t base = static_cast<size_t>(n) * H * W * C;
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                for (int c = 0; c < C; ++c, ++o) {
                    T best{};
                    int64_t best_idx = -1;
                    for (int ky = 0; ky < 2; ++ky) {
                        for (int kx = 0; kx < 2; ++kx) {
                            const int64_t idx = static_cast<int64_t>(base) +
                                                ((static_cast<int64_t>(oy * 2 + ky) * W) + (ox * 2 + kx)) * C + c;
                            const T v = xp[idx];
                            if (best_idx < 0 || v > best) {
                                best = v;
                                best_idx = idx;
                            }
                        }
                    }
                    out[o] = best;
                    (*argmax)[o] = best_idx;
                }
            }
        }
    }
    Tensor<T> xc = x;
    return detail::finish<T>(
        "maxpool2d", {N, OH, OW, C}, std::move(out), x.requires_grad(), {x},
        [xc, argmax](const std::vector<T>&, const std::vector<T>& g) mutable {
            std::vector<T> dx(xc.values().size(), T(0));
            for (size_t i = 0; i < g.size(); ++i) dx[static_cast<size_t>((*argmax)[i])] += g[i];
            xc.accumulate_grad(dx);
        });
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
    const auto xv = x.values();
    std::vector<T> out(xv.size());
    for (size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
    Tensor<T> xc = x;
    return detail::finish<T>("relu", x.shape(), std::move(out), x.requires_grad(), {x},
                             [xc](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 const auto xv = xc.values();
                                 std::vector<T> dx(g.size());
                                 for (size_t i = 0; i < g.size(); ++i) dx[i] = xv[i] > T(0) ? g[i] : T(0);
                                 xc.accumulate_grad(dx);
                             });
}

template <class T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope = T(0.2)) {
    const auto xv = x.values();
    std::vector<T> out(xv.size());
    for (size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : slope * xv[i];
    Tensor<T> xc = x;
    return detail::finish<T>("leaky_relu", x.shape(), std::move(out), x.requires_grad(), {x},
                             [xc, slope](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 const auto xv = xc.values();
                                 std::vector<T> dx(g.size());
                                 for (size_t i = 0; i < g.size(); ++i)
                                     dx[i] = xv[i] > T(0) ? g[i] : slope * g[i];
                                 xc.accumulate_grad(dx);
                             });
}

template <class T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    const auto xv = x.values();
    std::vector<T> out(xv.size());
    for (size_t i = 0; i < xv.size(); ++i) {
        const T v = xv[i];
        if (v >= T(0)) {
            out[i] = T(1) / (T(1) + std::exp(-v));
        } else {
            const T e = std::exp(v);
            out[i] = e / (T(1) + e);
        }
    }
    Tensor<T> xc = x;
    return detail::finish<T>("sigmoid", x.shape(), std::move(out), x.requires_grad(), {x},
                             [xc](const std::vector<T>& y, const std::vector<T>& g) mutable {
                                 std::vector<T> dx(g.size());
                                 for (size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * y[i] * (T(1) - y[i]);
                                 xc.accumulate_grad(dx);
                             });
}

template <class T>
Tensor<T> tanh_op(const Tensor<T>& x) {
    const auto xv = x.values();
    std::vector<T> out(xv.size());
    for (size_t i = 0; i < xv.size(); ++i) out[i] = std::tanh(xv[i]);
    Tensor<T> xc = x;
    return detail::finish<T>("tanh", x.shape(), std::move(out), x.requires_grad(), {x},
                             [xc](const std::vector<T>& y, const std::vector<T>& g) mutable {
                                 std::vector<T> dx(g.size());
                                 for (size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * (T(1) - y[i] * y[i]);
                                 xc.accumulate_grad(dx);
                             });
}

// Softmax over the last axis, computed with max subtraction.
template <class T>
Tensor<T> softmax_lastdim(const Tensor<T>& x) {
    if (x.rank() < 1) throw ShapeError("softmax_lastdim: rank must be >= 1");
    const int D = x.dim(x.rank() - 1);
    const int64_t rows = x.size() / D;
    const auto xv = x.values();
    std::vector<T> out(xv.size());
    for (int64_t r = 0; r < rows; ++r) {
        const T* src = xv.data() + r * D;
        T* dst = out.data() + r * D;
        T mx = src[0];
        for (int j = 1; j < D; ++j) mx = std::max(mx, src[j]);
        double sum = 0.0;
        for (int j = 0; j < D; ++j) {
            dst[j] = std::exp(src[j] - mx);
            sum += static_cast<double>(dst[j]);
        }
        const T inv = static_cast<T>(1.0 / sum);
        for (int j = 0; j < D; ++j) dst[j] *= inv;
    }
    Tensor<T> xc = x;
    return detail::finish<T>(
        "softmax", x.shape(), std::move(out), x.requires_grad(), {x},
        [xc, D, rows](const std::vector<T>& y, const std::vector<T>& g) mutable {
            std::vector<T> dx(g.size());
            for (int64_t r = 0; r < rows; ++r) {
                const T* yr = y.data() + r * D;
                const T* gr = g.data() + r * D;
                T* dr = dx.data() + r * D;
                double dot = 0.0;
                for (int j = 0; j < D; ++j) dot += static_cast<double>(gr[j]) * yr[j];
                for (int j = 0; j < D; ++j) dr[j] = yr[j] * (gr[j] - static_cast<T>(dot));
            }
            xc.accumulate_grad(dx);
        });
}

// ---------------------------------------------------------------------------
// Shape manipulation and reductions
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape new_shape) {
    if (numel(new_shape) != x.size()) {
        throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(new_shape));
    }
    std::vector<T> out(x.values().begin(), x.values().end());
    Tensor<T> xc = x;
    return detail::finish<T>("reshape", std::move(new_shape), std::move(out), x.requires_grad(), {x},
                             [xc](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 xc.accumulate_grad(g);
                             });
}

// [N,H,W,C] -> [N, H*W*C], batch axis preserved.
template <class T>
Tensor<T> flatten(const Tensor<T>& x) {
    if (x.rank() < 2) throw ShapeError("flatten: rank must be >= 2");
    const int n = x.dim(0);
    return reshape(x, {n, static_cast<int>(x.size() / n)});
}

template <class T>
Tensor<T> sum_all(const Tensor<T>& x) {
    double acc = 0.0;
    for (const T v : x.values()) acc += static_cast<double>(v);
    Tensor<T> xc = x;
    return detail::finish<T>("sum", {1}, {static_cast<T>(acc)}, x.requires_grad(), {x},
                             [xc](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 std::vector<T> dx(xc.values().size(), g[0]);
                                 xc.accumulate_grad(dx);
                             });
}

template <class T>
Tensor<T> mean_all(const Tensor<T>& x) {
    double acc = 0.0;
    for (const T v : x.values()) acc += static_cast<double>(v);
    const T inv_n = static_cast<T>(1.0 / static_cast<double>(x.size()));
    Tensor<T> xc = x;
    return detail::finish<T>("mean", {1}, {static_cast<T>(acc) * inv_n}, x.requires_grad(), {x},
                             [xc, inv_n](const std::vector<T>&, const std::vector<T>& g) mutable {
                                 std::vector<T> dx(xc.values().size(), g[0] * inv_n);
                                 xc.accumulate_grad(dx);
                             });
}

// [N,P,D] -> [N,D], mean over the middle axis.
template <class T>
Tensor<T> mean_axis1(const Tensor<T>& x) {
    if (x.rank() != 3) throw ShapeError("mean_axis1: input must be [N,P,D]");
    const int N = x.dim(0), P = x.dim(1), D = x.dim(2);
    std::vector<T> out(static_cast<size_t>(N) * D, T(0));
    const T* xp = x.values().data();
    for (int n = 0; n < N; ++n) {
        for (int p = 0; p < P; ++p) {
            const T* row = xp + (static_cast<size_t>(n) * P + p) * D;
            T* dst = out.data() + static_cast<size_t>(n) * D;
            for (int d = 0; d < D; ++d) dst[d] += row[d];
        }
    }
    const T inv_p = static_cast<T>(1.0 / P);
    for (T& v : out) v *= inv_p;
    Tensor<T> xc = x;
    return detail::finish<T>(
        "mean_axis1", {N, D}, std::move(out), x.requires_grad(), {x},
        [xc, N, P, D, inv_p](const std::vector<T>&, const std::vector<T>& g) mutable {
            std::vector<T> dx(xc.values().size());
            for (int n = 0; n < N; ++n)
                for (int p = 0; p < P; ++p)
                    for (int d = 0; d < D; ++d)
                        dx[(static_cast<size_t>(n) * P + p) * D + d] = g[static_cast<size_t>(n) * D + d] * inv_p;
            xc.accumulate_grad(dx);
        });
}

// [N,H,W,C] -> [N, (H/P)*(W/P), P*P*C]: non-overlapping row-major patches,
// each flattened channel-last.
template <class T>
Tensor<T> extract_patches(const Tensor<T>& x, int P) {
    if (x.rank() != 4) throw ShapeError("extract_patches: input must be [N,H,W,C]");
    const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    if (P <= 0 || H % P != 0 || W % P != 0) {
        throw ShapeError("extract_patches: patch size " + std::to_string(P) +
                         " does not divide spatial extents of " + shape_str(x.shape()));
    }
    const int GH = H / P, GW = W / P;
    const int num_patches = GH * GW;
    const int patch_dim = P * P * C;
    // Forward is a permutation of elements; record it once and reuse for both
    // directions.
    auto perm = std::make_shared<std::vector<int64_t>>(x.values().size());
    std::vector<T> out(x.values().size());
    const T* xp = x.values().data();
    size_t o = 0;
    for (int n = 0; n < N; ++n) {
        for (int gy = 0; gy < GH; ++gy) {
            for (int gx = 0; gx < GW; ++gx) {
                for (int py = 0; py < P; ++py) {
                    for (int px = 0; px < P; ++px) {
                        const size_t src = ((static_cast<size_t>(n) * H + (gy * P + py)) * W + (gx * P + px)) * C;
                        for (int c = 0; c < C; ++c, ++o) {
                            out[o] = xp[src + c];
                            (*perm)[o] = static_cast<int64_t>(src + c);
                        }
                    }
                }
            }
        }
    }
    Tensor<T> xc = x;
    return detail::finish<T>(
        "extract_patches", {N, num_patches, patch_dim}, std::move(out), x.requires_grad(), {x},
        [xc, perm](const std::vector<T>&, const std::vector<T>& g) mutable {
            std::vector<T> dx(xc.values().size());
            for (size_t i = 0; i < g.size(); ++i) dx[static_cast<size_t>((*perm)[i])] = g[i];
            xc.accumulate_grad(dx);
        });
}

// Concatenate along the last axis; all parts share the leading shape.
template <class T>
Tensor<T> concat_lastdim(const std::vector<Tensor<T>>& parts) {
    if (parts.empty()) throw ValueError("concat_lastdim: no inputs");
    Shape lead(parts[0].shape().begin(), parts[0].shape().end() - 1);
    int total = 0;
    bool track = false;
    for (const auto& p : parts) {
        if (!std::equal(lead.begin(), lead.end(), p.shape().begin())) {
            throw ShapeError("concat_lastdim: leading shapes differ");
        }
        total += p.dim(p.rank() - 1);
        track = track || p.requires_grad();
    }
    Shape out_shape = lead;
    out_shape.push_back(total);
    const int64_t rows = numel(lead);
    std::vector<T> out(static_cast<size_t>(rows) * total);
    int offset = 0;
    for (const auto& p : parts) {
        const int d = p.dim(p.rank() - 1);
        const T* src = p.values().data();
        for (int64_t r = 0; r < rows; ++r) {
            std::memcpy(out.data() + r * total + offset, src + r * d, sizeof(T) * static_cast<size_t>(d));
        }
        offset += d;
    }
    std::vector<Tensor<T>> captured = parts;
    return detail::finish<T>(
        "concat_lastdim", std::move(out_shape), std::move(out), track, parts,
        [captured, rows, total](const std::vector<T>&, const std::vector<T>& g) mutable {
            int offset = 0;
            for (auto& p : captured) {
                const int d = p.dim(p.rank() - 1);
                if (p.requires_grad()) {
                    std::vector<T> dp(static_cast<size_t>(rows) * d);
                    for (int64_t r = 0; r < rows; ++r) {
                        std::memcpy(dp.data() + r * d, g.data() + r * total + offset,
                                    sizeof(T) * static_cast<size_t>(d));
                    }
                    p.accumulate_grad(dp);
                }
                offset += d;
            }
        });
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

// Normalize over the last axis, then scale/shift by gamma/beta (each [D]).
template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
    const int D = x.dim(x.rank() - 1);
    if (gamma.size() != D || beta.size() != D) {
        throw ShapeError("layer_norm: gamma/beta must have length " + std::to_string(D));
    }
    const int64_t rows = x.size() / D;
    const auto xv = x.values();
    const auto gv = gamma.values();
    const auto bv = beta.values();
    std::vector<T> out(xv.size());
    auto xhat = std::make_shared<std::vector<T>>(xv.size());
    auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(rows));
    for (int64_t r = 0; r < rows; ++r) {
        const T* src = xv.data() + r * D;
        double mean = 0.0;
        for (int j = 0; j < D; ++j) mean += static_cast<double>(src[j]);
        mean /= D;
        double var = 0.0;
        for (int j = 0; j < D; ++j) {
            const double d = static_cast<double>(src[j]) - mean;
            var += d * d;
        }
        var /= D;
        const T istd = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps)));
        (*inv_std)[static_cast<size_t>(r)] = istd;
        for (int j = 0; j < D; ++j) {
            const T xh = (src[j] - static_cast<T>(mean)) * istd;
            (*xhat)[static_cast<size_t>(r * D + j)] = xh;
            out[static_cast<size_t>(r * D + j)] = gv[j] * xh + bv[j];
        }
    }
    const bool track = x.requires_grad() || gamma.requires_grad() || beta.requires_grad();
    Tensor<T> xc = x, gc = gamma, bc = beta;
    return detail::finish<T>(
        "layer_norm", x.shape(), std::move(out), track, {x, gamma, beta},
        [xc, gc, bc, xhat, inv_std, D, rows](const std::vector<T>&, const std::vector<T>& g) mutable {
            const auto gv = gc.values();
            if (gc.requires_grad() || bc.requires_grad()) {
                std::vector<T> dgamma(static_cast<size_t>(D), T(0)), dbeta(static_cast<size_t>(D), T(0));
                for (int64_t r = 0; r < rows; ++r) {
                    for (int j = 0; j < D; ++j) {
                        dgamma[j] += g[r * D + j] * (*xhat)[r * D + j];
                        dbeta[j] += g[r * D + j];
                    }
                }
                if (gc.requires_grad()) gc.accumulate_grad(dgamma);
                if (bc.requires_grad()) bc.accumulate_grad(dbeta);
            }
            if (xc.requires_grad()) {
                std::vector<T> dx(g.size());
                for (int64_t r = 0; r < rows; ++r) {
                    double sum_dy = 0.0, sum_dy_xhat = 0.0;
                    for (int j = 0; j < D; ++j) {
                        const double dy = static_cast<double>(g[r * D + j]) * gv[j];
                        sum_dy += dy;
                        sum_dy_xhat += dy * (*xhat)[r * D + j];
                    }
                    const double m1 = sum_dy / D, m2 = sum_dy_xhat / D;
                    const T istd = (*inv_std)[static_cast<size_t>(r)];
                    for (int j = 0; j < D; ++j) {
                        const double dy = static_cast<double>(g[r * D + j]) * gv[j];
                        dx[r * D + j] = static_cast<T>((dy - m1 - (*xhat)[r * D + j] * m2) * istd);
                    }
                }
                xc.accumulate_grad(dx);
            }
        });
}

// Batch norm over [N,H,W,C] using batch statistics (training path). The batch
// mean/variance are reported so the layer can maintain running estimates.
template <class T>
Tensor<T> batch_norm_train(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps,
                           std::vector<T>* batch_mean_out = nullptr,
                           std::vector<T>* batch_var_out = nullptr) {
    if (x.rank() != 4) throw ShapeError("batch_norm: input must be [N,H,W,C]");
    const int C = x.dim(3);
    if (gamma.size() != C || beta.size() != C) {
        throw ShapeError("batch_norm: gamma/beta must have length " + std::to_string(C));
    }
    const int64_t rows = x.size() / C;
    const auto xv = x.values();
    const auto gv = gamma.values();
    const auto bv = beta.values();
    std::vector<double> mean(static_cast<size_t>(C), 0.0), var(static_cast<size_t>(C), 0.0);
    for (int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < C; ++c) mean[c] += static_cast<double>(xv[r * C + c]);
    for (int c = 0; c < C; ++c) mean[c] /= static_cast<double>(rows);
    for (int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < C; ++c) {
            const double d = static_cast<double>(xv[r * C + c]) - mean[c];
            var[c] += d * d;
        }
    for (int c = 0; c < C; ++c) var[c] /= static_cast<double>(rows);
    auto xhat = std::make_shared<std::vector<T>>(xv.size());
    auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(C));
    std::vector<T> out(xv.size());
    for (int c = 0; c < C; ++c) {
        (*inv_std)[c] = static_cast<T>(1.0 / std::sqrt(var[c] + static_cast<double>(eps)));
    }
    for (int64_t r = 0; r < rows; ++r) {
        for (int c = 0; c < C; ++c) {
            const T xh = static_cast<T>((static_cast<double>(xv[r * C + c]) - mean[c])) * (*inv_std)[c];
            (*xhat)[r * C + c] = xh;
            out[r * C + c] = gv[c] * xh + bv[c];
        }
    }
    if (batch_mean_out) {
        batch_mean_out->assign(mean.begin(), mean.end());
    }
    if (batch_var_out) {
        batch_var_out->assign(var.begin(), var.end());
    }
    const bool track = x.requires_grad() || gamma.requires_grad() || beta.requires_grad();
    Tensor<T> xc = x, gc = gamma, bc = beta;
    return detail::finish<T>(
        "batch_norm", x.shape(), std::move(out), track, {x, gamma, beta},
        [xc, gc, bc, xhat, inv_std, C, rows](const std::vector<T>&, const std::vector<T>& g) mutable {
            const auto gv = gc.values();
            std::vector<double> sum_dy(static_cast<size_t>(C), 0.0), sum_dy_xhat(static_cast<size_t>(C), 0.0);
            for (int64_t r = 0; r < rows; ++r) {
                for (int c = 0; c < C; ++c) {
                    const double dy = static_cast<double>(g[r * C + c]);
                    sum_dy[c] += dy;
                    sum_dy_xhat[c] += dy * (*xhat)[r * C + c];
                }
            }
            if (gc.requires_grad()) {
                std::vector<T> dgamma(static_cast<size_t>(C));
                for (int c = 0; c < C; ++c) dgamma[c] = static_cast<T>(sum_dy_xhat[c]);
                gc.accumulate_grad(dgamma);
            }
            if (bc.requires_grad()) {
                std::vector<T> dbeta(static_cast<size_t>(C));
                for (int c = 0; c < C; ++c) dbeta[c] = static_cast<T>(sum_dy[c]);
                bc.accumulate_grad(dbeta);
            }
            if (xc.requires_grad()) {
                std::vector<T> dx(g.size());
                const double n = static_cast<double>(rows);
                for (int64_t r = 0; r < rows; ++r) {
                    for (int c = 0; c < C; ++c) {
                        const double dy = static_cast<double>(g[r * C + c]) * gv[c];
                        const double m1 = sum_dy[c] * gv[c] / n;
                        const double m2 = sum_dy_xhat[c] * gv[c] / n;
                        dx[r * C + c] = static_cast<T>((dy - m1 - (*xhat)[r * C + c] * m2) * (*inv_std)[c]);
                    }
                }
                xc.accumulate_grad(dx);
            }
        });
}

// Batch norm with fixed (running) statistics: a per-channel affine map.
template <class T>
Tensor<T> batch_norm_eval(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                          const std::vector<T>& running_mean, const std::vector<T>& running_var,
                          T eps) {
    if (x.rank() != 4) throw ShapeError("batch_norm: input must be [N,H,W,C]");
    const int C = x.dim(3);
    if (gamma.size() != C || beta.size() != C || running_mean.size() != static_cast<size_t>(C) ||
        running_var.size() != static_cast<size_t>(C)) {
        throw ShapeError("batch_norm: parameter length mismatch");
    }
    const int64_t rows = x.size() / C;
    const auto xv = x.values();
    const auto gv = gamma.values();
    const auto bv = beta.values();
    auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(C));
    auto mean = std::make_shared<std::vector<T>>(running_mean);
    for (int c = 0; c < C; ++c) {
        (*inv_std)[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var[c]) + static_cast<double>(eps)));
    }
    std::vector<T> out(xv.size());
    for (int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < C; ++c)
            out[r * C + c] = gv[c] * ((xv[r * C + c] - (*mean)[c]) * (*inv_std)[c]) + bv[c];
    const bool track = x.requires_grad() || gamma.requires_grad() || beta.requires_grad();
    Tensor<T> xc = x, gc = gamma, bc = beta;
    return detail::finish<T>(
        "batch_norm_eval", x.shape(), std::move(out), track, {x, gamma, beta},
        [xc, gc, bc, inv_std, mean, C, rows](const std::vector<T>&, const std::vector<T>& g) mutable {
            const auto gv = gc.values();
            const auto xv = xc.values();
            if (xc.requires_grad()) {
                std::vector<T> dx(g.size());
                for (int64_t r = 0; r < rows; ++r)
                    for (int c = 0; c < C; ++c) dx[r * C + c] = g[r * C + c] * gv[c] * (*inv_std)[c];
                xc.accumulate_grad(dx);
            }
            if (gc.requires_grad() || bc.requires_grad()) {
                std::vector<T> dgamma(static_cast<size_t>(C), T(0)), dbeta(static_cast<size_t>(C), T(0));
                for (int64_t r = 0; r < rows; ++r) {
                    for (int c = 0; c < C; ++c) {
                        dgamma[c] += g[r * C + c] * ((xv[r * C + c] - (*mean)[c]) * (*inv_std)[c]);
                        dbeta[c] += g[r * C + c];
                    }
                }
                if (gc.requires_grad()) gc.accumulate_grad(dgamma);
                if (bc.requires_grad()) bc.accumulate_grad(dbeta);
            }
        });
}

enum class Act { identity, relu, leaky_relu, sigmoid, tanh, softmax };

inline const char* act_name(Act a) {
    switch (a) {
        case Act::identity: return "identity";
        case Act::relu: return "relu";
        case Act::leaky_relu: return "leaky_relu";
        case Act::sigmoid: return "sigmoid";
        case Act::tanh: return "tanh";
        case Act::softmax: return "softmax";
    }
    return "?";
}

template <class T>
Tensor<T> activation(const Tensor<T>& x, Act kind) {
    switch (kind) {
        case Act::identity: return x;
        case Act::relu: return relu(x);
        case Act::leaky_relu: return leaky_relu(x);
        case Act::sigmoid: return sigmoid(x);
        case Act::tanh: return tanh_op(x);
        case Act::softmax: return softmax_lastdim(x);
    }
    throw ValueError("unknown activation");
}

}  // namespace acdl
