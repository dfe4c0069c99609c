#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "nlos/rng.hpp"
#include "nlos/tensor.hpp"

namespace nlos {

// ---------------------------------------------------------------------------
// conv3d: cross-correlation over [C, D1, D2, D3] with odd kernel dims and
// zero same-padding. Inner loops run over the contiguous last axis.
// ---------------------------------------------------------------------------

template <typename T>
inline void conv3d_check(const Tensor<T>& input, const Tensor<T>& weight,
                         const Tensor<T>& bias) {
    if (input.rank() != 4) throw ShapeError("conv3d: input must be [C,D1,D2,D3]");
    if (weight.rank() != 5) throw ShapeError("conv3d: weight must be [Co,Ci,K1,K2,K3]");
    if (weight.dim(1) != input.dim(0)) {
        throw ShapeError("conv3d: weight in-channels do not match input");
    }
    if (weight.dim(2) % 2 == 0 || weight.dim(3) % 2 == 0 || weight.dim(4) % 2 == 0) {
        throw ShapeError("conv3d: kernel dims must be odd for same padding");
    }
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
        throw ShapeError("conv3d: bias does not match out-channels");
    }
}

template <typename T>
Tensor<T> conv3d_forward(const Tensor<T>& input, const Tensor<T>& weight,
                         const Tensor<T>& bias) {
    conv3d_check(input, weight, bias);
    const int Ci = input.dim(0), D1 = input.dim(1), D2 = input.dim(2), D3 = input.dim(3);
    const int Co = weight.dim(0), K1 = weight.dim(2), K2 = weight.dim(3), K3 = weight.dim(4);
    const int P1 = K1 / 2, P2 = K2 / 2, P3 = K3 / 2;
    const std::int64_t plane = static_cast<std::int64_t>(D1) * D2 * D3;
    Tensor<T> out({Co, D1, D2, D3});
    for (int co = 0; co < Co; ++co) {
        T* ob = out.data() + co * plane;
        std::fill(ob, ob + plane, bias[co]);
        for (int ci = 0; ci < Ci; ++ci) {
            const T* ib = input.data() + ci * plane;
            const T* wb = weight.data() +
                          (static_cast<std::int64_t>(co) * Ci + ci) * K1 * K2 * K3;
            for (int ka = 0; ka < K1; ++ka) {
                const int da = ka - P1;
                const int a0 = std::max(0, -da), a1 = std::min(D1, D1 - da);
                for (int kb = 0; kb < K2; ++kb) {
                    const int db = kb - P2;
                    const int b0 = std::max(0, -db), b1 = std::min(D2, D2 - db);
                    for (int kc = 0; kc < K3; ++kc) {
                        const int dc = kc - P3;
                        const int t0 = std::max(0, -dc), t1 = std::min(D3, D3 - dc);
                        const int len = t1 - t0;
                        if (len <= 0 || a0 >= a1 || b0 >= b1) continue;
                        const T w = wb[(ka * K2 + kb) * K3 + kc];
                        for (int a = a0; a < a1; ++a) {
                            for (int b = b0; b < b1; ++b) {
                                T* o = ob + (static_cast<std::int64_t>(a) * D2 + b) * D3 + t0;
                                const T* src = ib +
                                    (static_cast<std::int64_t>(a + da) * D2 + (b + db)) * D3 +
                                    t0 + dc;
                                for (int t = 0; t < len; ++t) o[t] += w * src[t];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv3d_backward(const Tensor<T>& input, const Tensor<T>& weight,
                     const Tensor<T>& grad_out, Tensor<T>& grad_input,
                     Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
    conv3d_check(input, weight, grad_bias);
    check_same_shape(grad_input, input, "conv3d_backward grad_input");
    check_same_shape(grad_weight, weight, "conv3d_backward grad_weight");
    const int Ci = input.dim(0), D1 = input.dim(1), D2 = input.dim(2), D3 = input.dim(3);
    const int Co = weight.dim(0), K1 = weight.dim(2), K2 = weight.dim(3), K3 = weight.dim(4);
    const int P1 = K1 / 2, P2 = K2 / 2, P3 = K3 / 2;
    const std::int64_t plane = static_cast<std::int64_t>(D1) * D2 * D3;
    for (int co = 0; co < Co; ++co) {
        const T* gb = grad_out.data() + co * plane;
        T bias_acc = T(0);
        for (std::int64_t i = 0; i < plane; ++i) bias_acc += gb[i];
        grad_bias[co] += bias_acc;
        for (int ci = 0; ci < Ci; ++ci) {
            const T* ib = input.data() + ci * plane;
            T* gib = grad_input.data() + ci * plane;
            const T* wb = weight.data() +
                          (static_cast<std::int64_t>(co) * Ci + ci) * K1 * K2 * K3;
            T* gwb = grad_weight.data() +
                     (static_cast<std::int64_t>(co) * Ci + ci) * K1 * K2 * K3;
            for (int ka = 0; ka < K1; ++ka) {
                const int da = ka - P1;
                const int a0 = std::max(0, -da), a1 = std::min(D1, D1 - da);
                for (int kb = 0; kb < K2; ++kb) {
                    const int db = kb - P2;
                    const int b0 = std::max(0, -db), b1 = std::min(D2, D2 - db);
                    for (int kc = 0; kc < K3; ++kc) {
                        const int dc = kc - P3;
                        const int t0 = std::max(0, -dc), t1 = std::min(D3, D3 - dc);
                        const int len = t1 - t0;
                        if (len <= 0 || a0 >= a1 || b0 >= b1) continue;
                        const T w = wb[(ka * K2 + kb) * K3 + kc];
                        T w_acc = T(0);
                        for (int a = a0; a < a1; ++a) {
                            for (int b = b0; b < b1; ++b) {
                                const T* go = gb +
                                    (static_cast<std::int64_t>(a) * D2 + b) * D3 + t0;
                                const std::int64_t src_off =
                                    (static_cast<std::int64_t>(a + da) * D2 + (b + db)) * D3 +
                                    t0 + dc;
                                const T* src = ib + src_off;
                                T* gin = gib + src_off;
                                T dot_acc = T(0);
                                for (int t = 0; t < len; ++t) {
                                    dot_acc += src[t] * go[t];
                                    gin[t] += w * go[t];
                                }
                                w_acc += dot_acc;
                            }
                        }
                        gwb[(ka * K2 + kb) * K3 + kc] += w_acc;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// avgpool3d with a window that divides every dim; backward spreads the
// gradient uniformly.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> avgpool3d_forward(const Tensor<T>& input, int w1, int w2, int w3) {
    if (input.rank() != 4) throw ShapeError("avgpool3d: input must be [C,D1,D2,D3]");
    if (w1 < 1 || w2 < 1 || w3 < 1 ||
        input.dim(1) % w1 || input.dim(2) % w2 || input.dim(3) % w3) {
        throw ShapeError("avgpool3d: window must divide dims");
    }
    const int C = input.dim(0);
    const int O1 = input.dim(1) / w1, O2 = input.dim(2) / w2, O3 = input.dim(3) / w3;
    const int D2 = input.dim(2), D3 = input.dim(3);
    Tensor<T> out({C, O1, O2, O3});
    const T inv = T(1) / static_cast<T>(w1 * w2 * w3);
    std::int64_t oi = 0;
    for (int c = 0; c < C; ++c) {
        const T* ib = input.data() + static_cast<std::int64_t>(c) * input.dim(1) * D2 * D3;
        for (int a = 0; a < O1; ++a) {
            for (int b = 0; b < O2; ++b) {
                for (int t = 0; t < O3; ++t) {
                    T acc = T(0);
                    for (int da = 0; da < w1; ++da) {
                        for (int db = 0; db < w2; ++db) {
                            const T* src = ib +
                                (static_cast<std::int64_t>(a * w1 + da) * D2 + (b * w2 + db)) * D3 +
                                t * w3;
                            for (int dt = 0; dt < w3; ++dt) acc += src[dt];
                        }
                    }
                    out[oi++] = acc * inv;
                }
            }
        }
    }
    return out;
}

template <typename T>
void avgpool3d_backward(const Tensor<T>& grad_out, int w1, int w2, int w3,
                        Tensor<T>& grad_input) {
    const int C = grad_out.dim(0);
    const int O1 = grad_out.dim(1), O2 = grad_out.dim(2), O3 = grad_out.dim(3);
    const int D2 = O2 * w2, D3 = O3 * w3;
    if (grad_input.rank() != 4 || grad_input.dim(0) != C || grad_input.dim(1) != O1 * w1 ||
        grad_input.dim(2) != D2 || grad_input.dim(3) != D3) {
        throw ShapeError("avgpool3d_backward: grad shapes do not match");
    }
    const T inv = T(1) / static_cast<T>(w1 * w2 * w3);
    std::int64_t oi = 0;
    for (int c = 0; c < C; ++c) {
        T* gib = grad_input.data() + static_cast<std::int64_t>(c) * (O1 * w1) * D2 * D3;
        for (int a = 0; a < O1; ++a) {
            for (int b = 0; b < O2; ++b) {
                for (int t = 0; t < O3; ++t) {
                    const T g = grad_out[oi++] * inv;
                    for (int da = 0; da < w1; ++da) {
                        for (int db = 0; db < w2; ++db) {
                            T* dst = gib +
                                (static_cast<std::int64_t>(a * w1 + da) * D2 + (b * w2 + db)) * D3 +
                                t * w3;
                            for (int dt = 0; dt < w3; ++dt) dst[dt] += g;
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// conv2d over [C, H, W], odd kernel, zero same-padding.
// ---------------------------------------------------------------------------

template <typename T>
inline void conv2d_check(const Tensor<T>& input, const Tensor<T>& weight,
                         const Tensor<T>& bias) {
    if (input.rank() != 3) throw ShapeError("conv2d: input must be [C,H,W]");
    if (weight.rank() != 4) throw ShapeError("conv2d: weight must be [Co,Ci,Kh,Kw]");
    if (weight.dim(1) != input.dim(0)) {
        throw ShapeError("conv2d: weight in-channels do not match input");
    }
    if (weight.dim(2) % 2 == 0 || weight.dim(3) % 2 == 0) {
        throw ShapeError("conv2d: kernel dims must be odd for same padding");
    }
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
        throw ShapeError("conv2d: bias does not match out-channels");
    }
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const Tensor<T>& weight,
                         const Tensor<T>& bias) {
    conv2d_check(input, weight, bias);
    const int Ci = input.dim(0), H = input.dim(1), W = input.dim(2);
    const int Co = weight.dim(0), Kh = weight.dim(2), Kw = weight.dim(3);
    const int Ph = Kh / 2, Pw = Kw / 2;
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    Tensor<T> out({Co, H, W});
    for (int co = 0; co < Co; ++co) {
        T* ob = out.data() + co * plane;
        std::fill(ob, ob + plane, bias[co]);
        for (int ci = 0; ci < Ci; ++ci) {
            const T* ib = input.data() + ci * plane;
            const T* wb = weight.data() + (static_cast<std::int64_t>(co) * Ci + ci) * Kh * Kw;
            for (int kh = 0; kh < Kh; ++kh) {
                const int dy = kh - Ph;
                const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
                for (int kw = 0; kw < Kw; ++kw) {
                    const int dx = kw - Pw;
                    const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
                    const int len = x1 - x0;
                    if (len <= 0 || y0 >= y1) continue;
                    const T w = wb[kh * Kw + kw];
                    for (int y = y0; y < y1; ++y) {
                        T* o = ob + static_cast<std::int64_t>(y) * W + x0;
                        const T* src = ib + static_cast<std::int64_t>(y + dy) * W + x0 + dx;
                        for (int x = 0; x < len; ++x) o[x] += w * src[x];
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight,
                     const Tensor<T>& grad_out, Tensor<T>& grad_input,
                     Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
    conv2d_check(input, weight, grad_bias);
    check_same_shape(grad_input, input, "conv2d_backward grad_input");
    check_same_shape(grad_weight, weight, "conv2d_backward grad_weight");
    const int Ci = input.dim(0), H = input.dim(1), W = input.dim(2);
    const int Co = weight.dim(0), Kh = weight.dim(2), Kw = weight.dim(3);
    const int Ph = Kh / 2, Pw = Kw / 2;
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    for (int co = 0; co < Co; ++co) {
        const T* gb = grad_out.data() + co * plane;
        T bias_acc = T(0);
        for (std::int64_t i = 0; i < plane; ++i) bias_acc += gb[i];
        grad_bias[co] += bias_acc;
        for (int ci = 0; ci < Ci; ++ci) {
            const T* ib = input.data() + ci * plane;
            T* gib = grad_input.data() + ci * plane;
            const T* wb = weight.data() + (static_cast<std::int64_t>(co) * Ci + ci) * Kh * Kw;
            T* gwb = grad_weight.data() + (static_cast<std::int64_t>(co) * Ci + ci) * Kh * Kw;
            for (int kh = 0; kh < Kh; ++kh) {
                const int dy = kh - Ph;
                const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
                for (int kw = 0; kw < Kw; ++kw) {
                    const int dx = kw - Pw;
                    const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
                    const int len = x1 - x0;
                    if (len <= 0 || y0 >= y1) continue;
                    const T w = wb[kh * Kw + kw];
                    T w_acc = T(0);
                    for (int y = y0; y < y1; ++y) {
                        const T* go = gb + static_cast<std::int64_t>(y) * W + x0;
                        const std::int64_t src_off =
                            static_cast<std::int64_t>(y + dy) * W + x0 + dx;
                        const T* src = ib + src_off;
                        T* gin = gib + src_off;
                        T dot_acc = T(0);
                        for (int x = 0; x < len; ++x) {
                            dot_acc += src[x] * go[x];
                            gin[x] += w * go[x];
                        }
                        w_acc += dot_acc;
                    }
                    gwb[kh * Kw + kw] += w_acc;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// upconv2d: transposed convolution, kernel 2x2, stride 2 (kernel equals
// stride, so output patches never overlap). Weight is [Ci, Co, 2, 2].
// ---------------------------------------------------------------------------

template <typename T>
inline void upconv2d_check(const Tensor<T>& input, const Tensor<T>& weight,
                           const Tensor<T>& bias) {
    if (input.rank() != 3) throw ShapeError("upconv2d: input must be [C,H,W]");
    if (weight.rank() != 4 || weight.dim(2) != 2 || weight.dim(3) != 2) {
        throw ShapeError("upconv2d: weight must be [Ci,Co,2,2]");
    }
    if (weight.dim(0) != input.dim(0)) {
        throw ShapeError("upconv2d: weight in-channels do not match input");
    }
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(1)) {
        throw ShapeError("upconv2d: bias does not match out-channels");
    }
}

template <typename T>
Tensor<T> upconv2d_forward(const Tensor<T>& input, const Tensor<T>& weight,
                           const Tensor<T>& bias) {
    upconv2d_check(input, weight, bias);
    const int Ci = input.dim(0), H = input.dim(1), W = input.dim(2);
    const int Co = weight.dim(1);
    Tensor<T> out({Co, 2 * H, 2 * W});
    const std::int64_t oplane = static_cast<std::int64_t>(4) * H * W;
    for (int co = 0; co < Co; ++co) {
        T* ob = out.data() + co * oplane;
        std::fill(ob, ob + oplane, bias[co]);
    }
    for (int ci = 0; ci < Ci; ++ci) {
        const T* ib = input.data() + static_cast<std::int64_t>(ci) * H * W;
        for (int co = 0; co < Co; ++co) {
            T* ob = out.data() + co * oplane;
            const T* wb = weight.data() + (static_cast<std::int64_t>(ci) * Co + co) * 4;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const T w = wb[dy * 2 + dx];
                    for (int y = 0; y < H; ++y) {
                        const T* src = ib + static_cast<std::int64_t>(y) * W;
                        T* o = ob + static_cast<std::int64_t>(2 * y + dy) * (2 * W) + dx;
                        for (int x = 0; x < W; ++x) o[2 * x] += w * src[x];
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void upconv2d_backward(const Tensor<T>& input, const Tensor<T>& weight,
                       const Tensor<T>& grad_out, Tensor<T>& grad_input,
                       Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
    upconv2d_check(input, weight, grad_bias);
    check_same_shape(grad_input, input, "upconv2d_backward grad_input");
    check_same_shape(grad_weight, weight, "upconv2d_backward grad_weight");
    const int Ci = input.dim(0), H = input.dim(1), W = input.dim(2);
    const int Co = weight.dim(1);
    const std::int64_t oplane = static_cast<std::int64_t>(4) * H * W;
    for (int co = 0; co < Co; ++co) {
        const T* gb = grad_out.data() + co * oplane;
        T bias_acc = T(0);
        for (std::int64_t i = 0; i < oplane; ++i) bias_acc += gb[i];
        grad_bias[co] += bias_acc;
    }
    for (int ci = 0; ci < Ci; ++ci) {
        const T* ib = input.data() + static_cast<std::int64_t>(ci) * H * W;
        T* gib = grad_input.data() + static_cast<std::int64_t>(ci) * H * W;
        for (int co = 0; co < Co; ++co) {
            const T* gb = grad_out.data() + co * oplane;
            const T* wb = weight.data() + (static_cast<std::int64_t>(ci) * Co + co) * 4;
            T* gwb = grad_weight.data() + (static_cast<std::int64_t>(ci) * Co + co) * 4;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const T w = wb[dy * 2 + dx];
                    T w_acc = T(0);
                    for (int y = 0; y < H; ++y) {
                        const T* src = ib + static_cast<std::int64_t>(y) * W;
                        const T* go = gb + static_cast<std::int64_t>(2 * y + dy) * (2 * W) + dx;
                        T* gin = gib + static_cast<std::int64_t>(y) * W;
                        for (int x = 0; x < W; ++x) {
                            const T g = go[2 * x];
                            w_acc += src[x] * g;
                            gin[x] += w * g;
                        }
                    }
                    gwb[dy * 2 + dx] += w_acc;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// dense: affine map over the flattened input.
// ---------------------------------------------------------------------------

template <typename T>
inline void dense_check(const Tensor<T>& input, const Tensor<T>& weight,
                        const Tensor<T>& bias) {
    if (weight.rank() != 2) throw ShapeError("dense: weight must be [out,in]");
    if (weight.dim(1) != input.size()) {
        throw ShapeError("dense: weight in-features do not match input size");
    }
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
        throw ShapeError("dense: bias does not match out-features");
    }
}

template <typename T>
Tensor<T> dense_forward(const Tensor<T>& input, const Tensor<T>& weight,
                        const Tensor<T>& bias) {
    dense_check(input, weight, bias);
    const int M = weight.dim(0);
    const std::int64_t N = weight.dim(1);
    Tensor<T> out({M});
    const T* x = input.data();
    for (int m = 0; m < M; ++m) {
        const T* row = weight.data() + static_cast<std::int64_t>(m) * N;
        T acc = T(0);
        for (std::int64_t i = 0; i < N; ++i) acc += row[i] * x[i];
        out[m] = acc + bias[m];
    }
    return out;
}

template <typename T>
void dense_backward(const Tensor<T>& input, const Tensor<T>& weight,
                    const Tensor<T>& grad_out, Tensor<T>& grad_input,
                    Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
    dense_check(input, weight, grad_bias);
    check_same_shape(grad_input, input, "dense_backward grad_input");
    check_same_shape(grad_weight, weight, "dense_backward grad_weight");
    const int M = weight.dim(0);
    const std::int64_t N = weight.dim(1);
    const T* x = input.data();
    T* gx = grad_input.data();
    for (int m = 0; m < M; ++m) {
        const T g = grad_out[m];
        grad_bias[m] += g;
        const T* row = weight.data() + static_cast<std::int64_t>(m) * N;
        T* grow = grad_weight.data() + static_cast<std::int64_t>(m) * N;
        for (std::int64_t i = 0; i < N; ++i) {
            grow[i] += g * x[i];
            gx[i] += g * row[i];
        }
    }
}

// ---------------------------------------------------------------------------
// relu; the backward mask comes from the stored forward output.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& input) {
    Tensor<T> out = input;
    T* p = out.data();
    for (std::int64_t i = 0; i < out.size(); ++i) p[i] = std::max(T(0), p[i]);
    return out;
}

template <typename T>
void relu_backward(const Tensor<T>& output, const Tensor<T>& grad_out,
                   Tensor<T>& grad_input) {
    check_same_shape(grad_input, output, "relu_backward");
    check_same_shape(grad_out, output, "relu_backward");
    for (std::int64_t i = 0; i < output.size(); ++i) {
        if (output[i] > T(0)) grad_input[i] += grad_out[i];
    }
}

// ---------------------------------------------------------------------------
// Axis shuffles used at the 3D->2D bridge: [C, D1, D2, D3] becomes
// [C*D3, D1, D2] with the temporal axis folded into channels.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> fold_time_forward(const Tensor<T>& input) {
    if (input.rank() != 4) throw ShapeError("fold_time: input must be [C,D1,D2,D3]");
    const int C = input.dim(0), D1 = input.dim(1), D2 = input.dim(2), D3 = input.dim(3);
    Tensor<T> out({C * D3, D1, D2});
    std::int64_t src = 0;
    for (int c = 0; c < C; ++c) {
        for (int a = 0; a < D1; ++a) {
            for (int b = 0; b < D2; ++b) {
                for (int t = 0; t < D3; ++t) {
                    out[((static_cast<std::int64_t>(c) * D3 + t) * D1 + a) * D2 + b] =
                        input[src++];
                }
            }
        }
    }
    return out;
}

template <typename T>
void fold_time_backward(const Tensor<T>& grad_out, Tensor<T>& grad_input) {
    const int C = grad_input.dim(0), D1 = grad_input.dim(1), D2 = grad_input.dim(2),
              D3 = grad_input.dim(3);
    if (grad_out.rank() != 3 || grad_out.dim(0) != C * D3 || grad_out.dim(1) != D1 ||
        grad_out.dim(2) != D2) {
        throw ShapeError("fold_time_backward: shapes do not match");
    }
    std::int64_t dst = 0;
    for (int c = 0; c < C; ++c) {
        for (int a = 0; a < D1; ++a) {
            for (int b = 0; b < D2; ++b) {
                for (int t = 0; t < D3; ++t) {
                    grad_input[dst++] +=
                        grad_out[((static_cast<std::int64_t>(c) * D3 + t) * D1 + a) * D2 + b];
                }
            }
        }
    }
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 3 || b.rank() != 3 || a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2)) {
        throw ShapeError("concat_channels: spatial dims do not match");
    }
    Tensor<T> out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.data(), a.data() + a.size(), out.data());
    std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
    return out;
}

template <typename T>
void split_channels_backward(const Tensor<T>& grad_out, Tensor<T>& grad_a, Tensor<T>& grad_b) {
    if (grad_out.size() != grad_a.size() + grad_b.size()) {
        throw ShapeError("split_channels_backward: sizes do not match");
    }
    for (std::int64_t i = 0; i < grad_a.size(); ++i) grad_a[i] += grad_out[i];
    for (std::int64_t i = 0; i < grad_b.size(); ++i) grad_b[i] += grad_out[grad_a.size() + i];
}

// ---------------------------------------------------------------------------
// Losses: mean over all elements.
// ---------------------------------------------------------------------------

template <typename T>
T mse_loss(const Tensor<T>& pred, const Tensor<T>& target, Tensor<T>& grad_pred) {
    check_same_shape(pred, target, "mse_loss");
    check_same_shape(grad_pred, pred, "mse_loss grad");
    const std::int64_t n = pred.size();
    T loss = T(0);
    const T inv = T(1) / static_cast<T>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const T d = pred[i] - target[i];
        loss += d * d;
        grad_pred[i] = T(2) * d * inv;
    }
    return loss * inv;
}

template <typename T>
T l1_loss(const Tensor<T>& pred, const Tensor<T>& target, Tensor<T>& grad_pred) {
    check_same_shape(pred, target, "l1_loss");
    check_same_shape(grad_pred, pred, "l1_loss grad");
    const std::int64_t n = pred.size();
    T loss = T(0);
    const T inv = T(1) / static_cast<T>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const T d = pred[i] - target[i];
        loss += std::abs(d);
        grad_pred[i] = (d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0))) * inv;
    }
    return loss * inv;
}

// ---------------------------------------------------------------------------
// He initialization: zero-mean normal with variance 2 / fan_in.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> he_init(std::vector<int> shape, std::int64_t fan_in, std::uint64_t seed) {
    if (fan_in < 1) throw ShapeError("he_init: fan_in must be >= 1");
    Tensor<T> out(std::move(shape));
    Rng rng(seed, 0x4E17);
    const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::int64_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<T>(sigma * rng.normal());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Adam with bias correction.
// ---------------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
struct AdamState {
    Tensor<T> m;
    Tensor<T> v;
};

template <typename T>
void adam_step(Tensor<T>& param, const Tensor<T>& grad, AdamState<T>& state,
               std::int64_t t, const AdamConfig& cfg = {}) {
    check_same_shape(param, grad, "adam_step");
    if (state.m.empty()) {
        state.m = Tensor<T>(param.shape());
        state.v = Tensor<T>(param.shape());
    }
    check_same_shape(state.m, param, "adam_step state");
    if (t < 1) throw InputError("adam_step: step index must be >= 1");
    const T b1 = static_cast<T>(cfg.beta1);
    const T b2 = static_cast<T>(cfg.beta2);
    const T corr1 = static_cast<T>(1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
    const T corr2 = static_cast<T>(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
    const T lr = static_cast<T>(cfg.lr);
    const T eps = static_cast<T>(cfg.eps);
    for (std::int64_t i = 0; i < param.size(); ++i) {
        const T g = grad[i];
        state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
        state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
        const T mhat = state.m[i] / corr1;
        const T vhat = state.v[i] / corr2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace nlos
