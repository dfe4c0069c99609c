#pragma once

#include <string>
#include <vector>

#include "nlos/layers.hpp"
#include "nlos/tensor.hpp"
#include "nlos/transient.hpp"

namespace nlos {

// 3D->2D regressor layout. The encoder runs `levels` blocks of two
// conv3d+relu layers followed by 2x2x2 average pooling, with channels
// doubling per level and temporal kernels 9, 7, 5, 3. The bottleneck and
// every skip connection fold the remaining temporal axis into channels.
// The decoder mirrors the encoder with 2x2 up-convolutions and skip
// concatenation, the upsampler doubles resolution until output_res, and
// the regressor is a 1x1 convolution plus dense layers.
struct ArchitectureConfig {
    int nx = 32;
    int ny = 32;
    int nt = 256;
    int levels = 4;
    int base_channels = 8;
    int output_res = 64;
    int dense_layers = 2;
    int regressor_channels = 4;
    bool normalize_input = true;
    std::uint64_t seed = 1;

    int temporal_kernel(int level) const { return 9 - 2 * level; }
    int upsampler_stages() const {
        int stages = 0;
        for (int r = nx; r < output_res; r *= 2) ++stages;
        return stages;
    }

    void validate() const {
        if (nx < 1 || ny < 1 || nt < 1) throw ConfigError("network input: dims must be >= 1");
        if (nx != ny) throw ConfigError("network input: scan grid must be square");
        if (levels < 1 || levels > 4) {
            throw ConfigError("network encoder: levels must be in [1,4] so temporal "
                              "kernels stay >= 3");
        }
        const int div = 1 << levels;
        if (nx % div || ny % div || nt % div) {
            throw ConfigError("network encoder: input dims must be divisible by 2^levels");
        }
        if (base_channels < 1) throw ConfigError("network encoder: base channels must be >= 1");
        int r = nx;
        while (r < output_res) r *= 2;
        if (r != output_res) {
            throw ConfigError("network upsampler: output_res must be nx times a power of 2");
        }
        if (dense_layers != 1 && dense_layers != 2) {
            throw ConfigError("network regressor: dense layer count must be 1 or 2");
        }
        if (regressor_channels < 1) {
            throw ConfigError("network regressor: channel contraction must be >= 1");
        }
    }
};

template <typename T>
class Network {
  public:
    explicit Network(const ArchitectureConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        std::uint64_t pidx = 0;
        auto winit = [&](std::vector<int> shape, std::int64_t fan_in) {
            return he_init<T>(std::move(shape), fan_in, mix_key(cfg_.seed, ++pidx));
        };

        const int L = cfg_.levels;
        int in_ch = 1;
        for (int l = 0; l < L; ++l) {
            const int ch = cfg_.base_channels << l;
            const int kt = cfg_.temporal_kernel(l);
            EncLevel e;
            e.wa = winit({ch, in_ch, 3, 3, kt}, static_cast<std::int64_t>(in_ch) * 9 * kt);
            e.ba = Tensor<T>({ch});
            e.wb = winit({ch, ch, 3, 3, kt}, static_cast<std::int64_t>(ch) * 9 * kt);
            e.bb = Tensor<T>({ch});
            enc_.push_back(std::move(e));
            in_ch = ch;
        }

        const int bottleneck_ch = (cfg_.base_channels << (L - 1)) * (cfg_.nt >> L);
        int cur = bottleneck_ch;
        for (int l = L - 1; l >= 0; --l) {
            const int ch = cfg_.base_channels << l;
            const int skip_ch = (cfg_.base_channels << l) * (cfg_.nt >> l);
            DecLevel d;
            d.wu = winit({cur, ch, 2, 2}, cur);
            d.bu = Tensor<T>({ch});
            d.wc = winit({ch, ch + skip_ch, 3, 3}, static_cast<std::int64_t>(ch + skip_ch) * 9);
            d.bc = Tensor<T>({ch});
            d.wd = winit({ch, ch, 3, 3}, static_cast<std::int64_t>(ch) * 9);
            d.bd = Tensor<T>({ch});
            dec_.push_back(std::move(d));
            cur = ch;
        }

        for (int s = 0; s < cfg_.upsampler_stages(); ++s) {
            UpsStage u;
            u.wu = winit({cur, cur, 2, 2}, cur);
            u.bu = Tensor<T>({cur});
            u.wc = winit({cur, cur, 3, 3}, static_cast<std::int64_t>(cur) * 9);
            u.bc = Tensor<T>({cur});
            u.wd = winit({cur, cur, 3, 3}, static_cast<std::int64_t>(cur) * 9);
            u.bd = Tensor<T>({cur});
            ups_.push_back(std::move(u));
        }

        const int R = cfg_.output_res;
        const int rc = cfg_.regressor_channels;
        reg_w1x1_ = winit({rc, cur, 1, 1}, cur);
        reg_b1x1_ = Tensor<T>({rc});
        const std::int64_t flat = static_cast<std::int64_t>(rc) * R * R;
        reg_wfc1_ = winit({R * R, static_cast<int>(flat)}, flat);
        reg_bfc1_ = Tensor<T>({R * R});
        if (cfg_.dense_layers == 2) {
            reg_wfc2_ = winit({R * R, R * R}, static_cast<std::int64_t>(R) * R);
            reg_bfc2_ = Tensor<T>({R * R});
        }
    }

    const ArchitectureConfig& config() const { return cfg_; }

    struct ParamEntry {
        std::string name;
        Tensor<T>* value;
    };

    std::vector<ParamEntry> parameters() {
        std::vector<ParamEntry> out;
        for (size_t l = 0; l < enc_.size(); ++l) {
            const std::string p = "enc" + std::to_string(l);
            out.push_back({p + ".conv_a.w", &enc_[l].wa});
            out.push_back({p + ".conv_a.b", &enc_[l].ba});
            out.push_back({p + ".conv_b.w", &enc_[l].wb});
            out.push_back({p + ".conv_b.b", &enc_[l].bb});
        }
        for (size_t i = 0; i < dec_.size(); ++i) {
            const std::string p = "dec" + std::to_string(i);
            out.push_back({p + ".up.w", &dec_[i].wu});
            out.push_back({p + ".up.b", &dec_[i].bu});
            out.push_back({p + ".conv_a.w", &dec_[i].wc});
            out.push_back({p + ".conv_a.b", &dec_[i].bc});
            out.push_back({p + ".conv_b.w", &dec_[i].wd});
            out.push_back({p + ".conv_b.b", &dec_[i].bd});
        }
        for (size_t s = 0; s < ups_.size(); ++s) {
            const std::string p = "ups" + std::to_string(s);
            out.push_back({p + ".up.w", &ups_[s].wu});
            out.push_back({p + ".up.b", &ups_[s].bu});
            out.push_back({p + ".conv_a.w", &ups_[s].wc});
            out.push_back({p + ".conv_a.b", &ups_[s].bc});
            out.push_back({p + ".conv_b.w", &ups_[s].wd});
            out.push_back({p + ".conv_b.b", &ups_[s].bd});
        }
        out.push_back({"reg.conv1x1.w", &reg_w1x1_});
        out.push_back({"reg.conv1x1.b", &reg_b1x1_});
        out.push_back({"reg.fc1.w", &reg_wfc1_});
        out.push_back({"reg.fc1.b", &reg_bfc1_});
        if (cfg_.dense_layers == 2) {
            out.push_back({"reg.fc2.w", &reg_wfc2_});
            out.push_back({"reg.fc2.b", &reg_bfc2_});
        }
        return out;
    }

    std::int64_t parameter_count() {
        std::int64_t n = 0;
        for (const auto& p : parameters()) n += p.value->size();
        return n;
    }

    std::vector<Tensor<T>> make_grad_buffers() {
        std::vector<Tensor<T>> grads;
        for (const auto& p : parameters()) grads.emplace_back(p.value->shape());
        return grads;
    }

    // Volume layout matches the tensor layout [1, ny, nx, nt] directly.
    Tensor<T> prepare_input(const TransientVolume& volume) const {
        if (volume.config.nx != cfg_.nx || volume.config.ny != cfg_.ny ||
            volume.config.nt != cfg_.nt) {
            throw InputError("network input: volume dims do not match architecture");
        }
        Tensor<T> input({1, cfg_.ny, cfg_.nx, cfg_.nt});
        T peak = T(0);
        for (std::int64_t i = 0; i < input.size(); ++i) {
            const T v = static_cast<T>(volume.values[static_cast<size_t>(i)]);
            input[i] = v;
            peak = std::max(peak, v);
        }
        if (cfg_.normalize_input && peak > T(0)) {
            const T inv = T(1) / peak;
            for (std::int64_t i = 0; i < input.size(); ++i) input[i] *= inv;
        }
        return input;
    }

    struct Trace {
        Tensor<T> input;
        std::vector<Tensor<T>> enc_a, enc_s, enc_pool;
        Tensor<T> folded;
        std::vector<Tensor<T>> dec_in, dec_up, dec_skip, dec_cat, dec_c1, dec_c2;
        std::vector<Tensor<T>> ups_in, ups_up, ups_q1, ups_q2;
        Tensor<T> reg_in, reg_r, reg_h;
    };

    Tensor<T> forward(const Tensor<T>& input, Trace* trace = nullptr) const {
        Trace local;
        Trace& tr = trace ? *trace : local;
        tr = Trace{};
        tr.input = input;

        Tensor<T> x = input;
        for (int l = 0; l < cfg_.levels; ++l) {
            Tensor<T> a = relu_forward(conv3d_forward(x, enc_[l].wa, enc_[l].ba));
            Tensor<T> s = relu_forward(conv3d_forward(a, enc_[l].wb, enc_[l].bb));
            x = avgpool3d_forward(s, 2, 2, 2);
            tr.enc_a.push_back(std::move(a));
            tr.enc_s.push_back(std::move(s));
            tr.enc_pool.push_back(x);
        }

        tr.folded = fold_time_forward(x);
        Tensor<T> cur = tr.folded;
        for (size_t i = 0; i < dec_.size(); ++i) {
            const int level = cfg_.levels - 1 - static_cast<int>(i);
            tr.dec_in.push_back(cur);
            Tensor<T> up = upconv2d_forward(cur, dec_[i].wu, dec_[i].bu);
            Tensor<T> skip = fold_time_forward(tr.enc_s[static_cast<size_t>(level)]);
            Tensor<T> cat = concat_channels(up, skip);
            Tensor<T> c1 = relu_forward(conv2d_forward(cat, dec_[i].wc, dec_[i].bc));
            Tensor<T> c2 = relu_forward(conv2d_forward(c1, dec_[i].wd, dec_[i].bd));
            cur = c2;
            tr.dec_up.push_back(std::move(up));
            tr.dec_skip.push_back(std::move(skip));
            tr.dec_cat.push_back(std::move(cat));
            tr.dec_c1.push_back(std::move(c1));
            tr.dec_c2.push_back(std::move(c2));
        }

        for (size_t s = 0; s < ups_.size(); ++s) {
            tr.ups_in.push_back(cur);
            Tensor<T> up = upconv2d_forward(cur, ups_[s].wu, ups_[s].bu);
            Tensor<T> q1 = relu_forward(conv2d_forward(up, ups_[s].wc, ups_[s].bc));
            Tensor<T> q2 = relu_forward(conv2d_forward(q1, ups_[s].wd, ups_[s].bd));
            cur = q2;
            tr.ups_up.push_back(std::move(up));
            tr.ups_q1.push_back(std::move(q1));
            tr.ups_q2.push_back(std::move(q2));
        }

        tr.reg_in = cur;
        tr.reg_r = relu_forward(conv2d_forward(cur, reg_w1x1_, reg_b1x1_));
        const int R = cfg_.output_res;
        Tensor<T> out;
        if (cfg_.dense_layers == 2) {
            tr.reg_h = relu_forward(dense_forward(tr.reg_r, reg_wfc1_, reg_bfc1_));
            out = dense_forward(tr.reg_h, reg_wfc2_, reg_bfc2_);
        } else {
            out = dense_forward(tr.reg_r, reg_wfc1_, reg_bfc1_);
        }
        return out.reshaped({R, R});
    }

    // Accumulates parameter gradients (ordered as parameters()) given
    // d(loss)/d(output). The trace must come from a matching forward call.
    void backward(const Trace& tr, const Tensor<T>& grad_output,
                  std::vector<Tensor<T>>& grads) const {
        const int L = cfg_.levels;
        const size_t dec_base = static_cast<size_t>(4) * L;
        const size_t ups_base = dec_base + 6 * dec_.size();
        const size_t reg_base = ups_base + 6 * ups_.size();
        if (grads.size() != reg_base + (cfg_.dense_layers == 2 ? 6 : 4)) {
            throw ShapeError("network backward: gradient buffer count mismatch");
        }

        const int R = cfg_.output_res;
        Tensor<T> go = grad_output.reshaped({R * R});

        // regressor
        Tensor<T> grad_r(tr.reg_r.shape());
        if (cfg_.dense_layers == 2) {
            Tensor<T> gh_post(tr.reg_h.shape());
            dense_backward(tr.reg_h, reg_wfc2_, go, gh_post, grads[reg_base + 4],
                           grads[reg_base + 5]);
            Tensor<T> gh_pre(tr.reg_h.shape());
            relu_backward(tr.reg_h, gh_post, gh_pre);
            Tensor<T> gr_flat(std::vector<int>{static_cast<int>(tr.reg_r.size())});
            dense_backward(tr.reg_r.reshaped({static_cast<int>(tr.reg_r.size())}), reg_wfc1_,
                           gh_pre, gr_flat, grads[reg_base + 2], grads[reg_base + 3]);
            grad_r = gr_flat.reshaped(tr.reg_r.shape());
        } else {
            Tensor<T> gr_flat(std::vector<int>{static_cast<int>(tr.reg_r.size())});
            dense_backward(tr.reg_r.reshaped({static_cast<int>(tr.reg_r.size())}), reg_wfc1_,
                           go, gr_flat, grads[reg_base + 2], grads[reg_base + 3]);
            grad_r = gr_flat.reshaped(tr.reg_r.shape());
        }
        Tensor<T> grad_r_pre(tr.reg_r.shape());
        relu_backward(tr.reg_r, grad_r, grad_r_pre);
        Tensor<T> grad_cur(tr.reg_in.shape());
        conv2d_backward(tr.reg_in, reg_w1x1_, grad_r_pre, grad_cur, grads[reg_base + 0],
                        grads[reg_base + 1]);

        // upsampler, reversed
        for (size_t s = ups_.size(); s-- > 0;) {
            const size_t base = ups_base + 6 * s;
            Tensor<T> gq2_pre(tr.ups_q2[s].shape());
            relu_backward(tr.ups_q2[s], grad_cur, gq2_pre);
            Tensor<T> gq1(tr.ups_q1[s].shape());
            conv2d_backward(tr.ups_q1[s], ups_[s].wd, gq2_pre, gq1, grads[base + 4],
                            grads[base + 5]);
            Tensor<T> gq1_pre(tr.ups_q1[s].shape());
            relu_backward(tr.ups_q1[s], gq1, gq1_pre);
            Tensor<T> gup(tr.ups_up[s].shape());
            conv2d_backward(tr.ups_up[s], ups_[s].wc, gq1_pre, gup, grads[base + 2],
                            grads[base + 3]);
            Tensor<T> gin(tr.ups_in[s].shape());
            upconv2d_backward(tr.ups_in[s], ups_[s].wu, gup, gin, grads[base + 0],
                              grads[base + 1]);
            grad_cur = std::move(gin);
        }

        // decoder, reversed; skip gradients flow back into the encoder
        std::vector<Tensor<T>> grad_enc_s;
        grad_enc_s.reserve(static_cast<size_t>(L));
        for (int l = 0; l < L; ++l) grad_enc_s.emplace_back(tr.enc_s[static_cast<size_t>(l)].shape());

        for (size_t i = dec_.size(); i-- > 0;) {
            const int level = L - 1 - static_cast<int>(i);
            const size_t base = dec_base + 6 * i;
            Tensor<T> gc2_pre(tr.dec_c2[i].shape());
            relu_backward(tr.dec_c2[i], grad_cur, gc2_pre);
            Tensor<T> gc1(tr.dec_c1[i].shape());
            conv2d_backward(tr.dec_c1[i], dec_[i].wd, gc2_pre, gc1, grads[base + 4],
                            grads[base + 5]);
            Tensor<T> gc1_pre(tr.dec_c1[i].shape());
            relu_backward(tr.dec_c1[i], gc1, gc1_pre);
            Tensor<T> gcat(tr.dec_cat[i].shape());
            conv2d_backward(tr.dec_cat[i], dec_[i].wc, gc1_pre, gcat, grads[base + 2],
                            grads[base + 3]);
            Tensor<T> gup(tr.dec_up[i].shape());
            Tensor<T> gskip(tr.dec_skip[i].shape());
            split_channels_backward(gcat, gup, gskip);
            fold_time_backward(gskip, grad_enc_s[static_cast<size_t>(level)]);
            Tensor<T> gin(tr.dec_in[i].shape());
            upconv2d_backward(tr.dec_in[i], dec_[i].wu, gup, gin, grads[base + 0],
                              grads[base + 1]);
            grad_cur = std::move(gin);
        }

        // bottleneck fold back to the last pooled map
        Tensor<T> grad_pool(tr.enc_pool[static_cast<size_t>(L - 1)].shape());
        fold_time_backward(grad_cur, grad_pool);

        // encoder, reversed
        for (int l = L - 1; l >= 0; --l) {
            const size_t base = static_cast<size_t>(4) * l;
            const size_t li = static_cast<size_t>(l);
            avgpool3d_backward(grad_pool, 2, 2, 2, grad_enc_s[li]);
            Tensor<T> gs_pre(tr.enc_s[li].shape());
            relu_backward(tr.enc_s[li], grad_enc_s[li], gs_pre);
            Tensor<T> ga(tr.enc_a[li].shape());
            conv3d_backward(tr.enc_a[li], enc_[li].wb, gs_pre, ga, grads[base + 2],
                            grads[base + 3]);
            Tensor<T> ga_pre(tr.enc_a[li].shape());
            relu_backward(tr.enc_a[li], ga, ga_pre);
            const Tensor<T>& x = (l == 0) ? tr.input : tr.enc_pool[li - 1];
            Tensor<T> gx(x.shape());
            conv3d_backward(x, enc_[li].wa, ga_pre, gx, grads[base + 0], grads[base + 1]);
            grad_pool = std::move(gx);
        }
    }

  private:
    struct EncLevel {
        Tensor<T> wa, ba, wb, bb;
    };
    struct DecLevel {
        Tensor<T> wu, bu, wc, bc, wd, bd;
    };
    struct UpsStage {
        Tensor<T> wu, bu, wc, bc, wd, bd;
    };

    ArchitectureConfig cfg_;
    std::vector<EncLevel> enc_;
    std::vector<DecLevel> dec_;
    std::vector<UpsStage> ups_;
    Tensor<T> reg_w1x1_, reg_b1x1_;
    Tensor<T> reg_wfc1_, reg_bfc1_;
    Tensor<T> reg_wfc2_, reg_bfc2_;
};

} // namespace nlos
