#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/mat.hpp"
#include "fcw/rng.hpp"

namespace fcw {

struct LstmConfig {
    int layers = 2;
    int hidden_nodes = 100;
    int time_step = 1;
    int n_features = 0;
    int n_classes = 4;
    int epochs = 800;
    double learning_rate = 0.01;
    double momentum = 0.0;
    int batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 1;

    void validate() const {
        if (layers < 1) throw DomainError("lstm needs at least one layer");
        if (hidden_nodes < 1) throw DomainError("hidden_nodes must be at least 1");
        if (time_step < 1) throw DomainError("time_step must be at least 1");
        if (n_features < 1) throw DomainError("n_features must be at least 1");
        if (n_classes < 2) throw DomainError("need at least two classes");
        if (epochs < 1) throw DomainError("epochs must be at least 1");
        if (learning_rate <= 0.0) throw DomainError("learning rate must be positive");
    }
};

// Stacked LSTM with a dense softmax head on the final hidden state. Gate
// pre-activations are packed [input, forget, candidate, output], each
// hidden_nodes wide.
class LstmNet {
public:
    explicit LstmNet(const LstmConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        const std::size_t h = cfg_.hidden_nodes;
        for (int l = 0; l < cfg_.layers; ++l) {
            std::size_t in_dim = (l == 0) ? cfg_.n_features : h;
            std::string tag = "lstm" + std::to_string(l + 1);
            w_off_.push_back(layout_.add(tag + ".W", 4 * h, in_dim));
            u_off_.push_back(layout_.add(tag + ".U", 4 * h, h));
            b_off_.push_back(layout_.add(tag + ".b", 4 * h, 1));
        }
        v_off_ = layout_.add("dense.W", cfg_.n_classes, h);
        d_off_ = layout_.add("dense.b", cfg_.n_classes, 1);
    }

    const LstmConfig& config() const { return cfg_; }
    const ParamLayout& layout() const { return layout_; }

    // Weights uniform in +/- sqrt(6 / (fan_in + fan_out)); biases zero.
    void init(double* params, Rng& rng) const {
        for (const TensorShape& t : layout_.tensors()) {
            bool bias = t.cols == 1;
            double a = bias ? 0.0 : std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
            for (std::size_t i = 0; i < t.rows * t.cols; ++i) {
                params[t.offset + i] = bias ? 0.0 : rng.uniform(-a, a);
            }
        }
    }

    std::vector<double> forward(const double* params, const double* features) const {
        Cache cache;
        return softmax(run_forward(params, features, cache));
    }

    double loss(const double* params, const double* features, int label) const {
        Cache cache;
        return cross_entropy_from_logits(run_forward(params, features, cache), label);
    }

    // Adds dLoss/dParams for one sample into grad; returns the sample loss
    // and, if requested, the predicted class.
    double backward(const double* params, const double* features, int label, double* grad,
                    int* predicted = nullptr) const {
        const int T = cfg_.time_step;
        const int L = cfg_.layers;
        const int H = cfg_.hidden_nodes;
        const int C = cfg_.n_classes;

        Cache cache;
        std::vector<double> logits = run_forward(params, features, cache);
        std::vector<double> probs = softmax(logits);
        if (predicted) {
            int best = 0;
            for (int c = 1; c < C; ++c) {
                if (probs[c] > probs[best]) best = c;
            }
            *predicted = best;
        }

        std::vector<double> dlogits(probs);
        dlogits[label] -= 1.0;

        const double* h_top = &cache.hidden[index(T - 1, L - 1) * H];
        outer_add(grad + v_off_, C, H, dlogits.data(), h_top);
        for (int c = 0; c < C; ++c) grad[d_off_ + c] += dlogits[c];

        std::vector<double> dh_dense(H, 0.0);
        matvec_transposed_add(params + v_off_, C, H, dlogits.data(), dh_dense.data());

        std::vector<std::vector<double>> dh_rec(L, std::vector<double>(H, 0.0));
        std::vector<std::vector<double>> dc_rec(L, std::vector<double>(H, 0.0));
        std::vector<double> zero_h(H, 0.0);
        std::vector<double> da(4 * H);
        std::vector<double> dx(H);

        for (int t = T - 1; t >= 0; --t) {
            std::vector<double> dx_above;
            for (int l = L - 1; l >= 0; --l) {
                std::size_t base = index(t, l) * H;
                const double* gi = &cache.gate_i[base];
                const double* gf = &cache.gate_f[base];
                const double* gg = &cache.gate_g[base];
                const double* go = &cache.gate_o[base];
                const double* tc = &cache.tanh_cell[base];
                const double* c_prev =
                    (t == 0) ? zero_h.data() : &cache.cell[index(t - 1, l) * H];
                const double* h_prev =
                    (t == 0) ? zero_h.data() : &cache.hidden[index(t - 1, l) * H];
                const double* x =
                    (l == 0) ? features + static_cast<std::size_t>(t) * cfg_.n_features
                             : &cache.hidden[index(t, l - 1) * H];
                std::size_t in_dim = (l == 0) ? cfg_.n_features : H;

                std::vector<double>& dh = dh_rec[l];
                if (l == L - 1 && t == T - 1) {
                    for (int k = 0; k < H; ++k) dh[k] += dh_dense[k];
                }
                if (l < L - 1) {
                    for (int k = 0; k < H; ++k) dh[k] += dx_above[k];
                }

                std::vector<double>& dc = dc_rec[l];
                for (int k = 0; k < H; ++k) {
                    double dok = dh[k] * tc[k];
                    da[3 * H + k] = dok * go[k] * (1.0 - go[k]);
                    dc[k] += dh[k] * go[k] * (1.0 - tc[k] * tc[k]);
                    double dik = dc[k] * gg[k];
                    da[k] = dik * gi[k] * (1.0 - gi[k]);
                    double dgk = dc[k] * gi[k];
                    da[2 * H + k] = dgk * (1.0 - gg[k] * gg[k]);
                    double dfk = dc[k] * c_prev[k];
                    da[H + k] = dfk * gf[k] * (1.0 - gf[k]);
                    dc[k] *= gf[k];  // flows to t-1
                }

                outer_add(grad + w_off_[l], 4 * H, in_dim, da.data(), x);
                outer_add(grad + u_off_[l], 4 * H, H, da.data(), h_prev);
                for (int k = 0; k < 4 * H; ++k) grad[b_off_[l] + k] += da[k];

                std::fill(dh.begin(), dh.end(), 0.0);
                matvec_transposed_add(params + u_off_[l], 4 * H, H, da.data(), dh.data());

                if (l > 0) {
                    std::fill(dx.begin(), dx.end(), 0.0);
                    matvec_transposed_add(params + w_off_[l], 4 * H, in_dim, da.data(),
                                          dx.data());
                    dx_above = dx;
                }
            }
        }
        return cross_entropy_from_logits(logits, label);
    }

private:
    struct Cache {
        std::vector<double> gate_i, gate_f, gate_g, gate_o, cell, tanh_cell, hidden;
    };

    std::size_t index(int t, int l) const {
        return static_cast<std::size_t>(t) * cfg_.layers + l;
    }

    std::vector<double> run_forward(const double* params, const double* features,
                                    Cache& cache) const {
        const int T = cfg_.time_step;
        const int L = cfg_.layers;
        const int H = cfg_.hidden_nodes;
        const std::size_t cells = static_cast<std::size_t>(T) * L * H;
        cache.gate_i.assign(cells, 0.0);
        cache.gate_f.assign(cells, 0.0);
        cache.gate_g.assign(cells, 0.0);
        cache.gate_o.assign(cells, 0.0);
        cache.cell.assign(cells, 0.0);
        cache.tanh_cell.assign(cells, 0.0);
        cache.hidden.assign(cells, 0.0);

        std::vector<double> a(4 * H);
        std::vector<double> zero_h(H, 0.0);

        for (int t = 0; t < T; ++t) {
            for (int l = 0; l < L; ++l) {
                const double* x =
                    (l == 0) ? features + static_cast<std::size_t>(t) * cfg_.n_features
                             : &cache.hidden[index(t, l - 1) * H];
                std::size_t in_dim = (l == 0) ? cfg_.n_features : H;
                const double* h_prev =
                    (t == 0) ? zero_h.data() : &cache.hidden[index(t - 1, l) * H];
                const double* c_prev =
                    (t == 0) ? zero_h.data() : &cache.cell[index(t - 1, l) * H];

                matvec(params + w_off_[l], 4 * H, in_dim, x, a.data());
                matvec_add(params + u_off_[l], 4 * H, H, h_prev, a.data());
                for (int k = 0; k < 4 * H; ++k) a[k] += params[b_off_[l] + k];

                std::size_t base = index(t, l) * H;
                for (int k = 0; k < H; ++k) {
                    double i_k = sigmoid(a[k]);
                    double f_k = sigmoid(a[H + k]);
                    double g_k = std::tanh(a[2 * H + k]);
                    double o_k = sigmoid(a[3 * H + k]);
                    double c_k = f_k * c_prev[k] + i_k * g_k;
                    cache.gate_i[base + k] = i_k;
                    cache.gate_f[base + k] = f_k;
                    cache.gate_g[base + k] = g_k;
                    cache.gate_o[base + k] = o_k;
                    cache.cell[base + k] = c_k;
                    cache.tanh_cell[base + k] = std::tanh(c_k);
                    cache.hidden[base + k] = o_k * cache.tanh_cell[base + k];
                }
            }
        }

        std::vector<double> logits(cfg_.n_classes);
        const double* h_top = &cache.hidden[index(T - 1, L - 1) * H];
        matvec(params + v_off_, cfg_.n_classes, H, h_top, logits.data());
        for (int c = 0; c < cfg_.n_classes; ++c) logits[c] += params[d_off_ + c];
        return logits;
    }

    LstmConfig cfg_;
    ParamLayout layout_;
    std::vector<std::size_t> w_off_, u_off_, b_off_;
    std::size_t v_off_ = 0, d_off_ = 0;
};

}  // namespace fcw
