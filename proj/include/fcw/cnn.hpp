#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/mat.hpp"
#include "fcw/rng.hpp"

namespace fcw {

struct CnnConfig {
    int conv_layers = 2;  // the architecture below is fixed at two
    std::vector<int> filters = {8, 16};
    int kernel_size = 3;
    int stride = 1;
    int pool_size = 2;
    int time_step = 5;
    int n_features = 0;
    int n_classes = 4;
    int epochs = 800;
    double learning_rate = 0.01;
    double momentum = 0.0;
    int batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 1;

    int pooled_rows() const { return time_step / pool_size; }
    int pooled_cols() const { return n_features / pool_size; }

    void validate() const {
        if (conv_layers != 2 || filters.size() != 2) {
            throw DomainError("this cnn is fixed at two convolution layers");
        }
        if (filters[0] < 1 || filters[1] < 1) throw DomainError("filter counts must be positive");
        if (kernel_size < 1 || kernel_size % 2 == 0) throw DomainError("kernel size must be odd");
        if (stride != 1) throw DomainError("only stride 1 is supported");
        if (pool_size < 2) throw DomainError("pool size must be at least 2");
        if (time_step < 1 || n_features < 1) throw DomainError("window shape must be positive");
        if (pooled_rows() < 1 || pooled_cols() < 1) {
            throw DomainError("window too small: max pooling would leave no outputs");
        }
        if (n_classes < 2) throw DomainError("need at least two classes");
        if (epochs < 1) throw DomainError("epochs must be at least 1");
        if (learning_rate <= 0.0) throw DomainError("learning rate must be positive");
    }
};

namespace detail {

// Zero-padded same-size 2-D cross-correlation of one input channel stack.
// in: [channels][rows][cols], kernel: [channels][k][k], out: [rows][cols].
inline void conv2d_same_add(const double* in, int channels, int rows, int cols,
                            const double* kernel, int k, double* out) {
    const int pad = k / 2;
    for (int ch = 0; ch < channels; ++ch) {
        const double* plane = in + static_cast<std::size_t>(ch) * rows * cols;
        const double* kern = kernel + static_cast<std::size_t>(ch) * k * k;
        for (int y = 0; y < rows; ++y) {
            for (int x = 0; x < cols; ++x) {
                double acc = 0.0;
                for (int dy = 0; dy < k; ++dy) {
                    int sy = y + dy - pad;
                    if (sy < 0 || sy >= rows) continue;
                    for (int dx = 0; dx < k; ++dx) {
                        int sx = x + dx - pad;
                        if (sx < 0 || sx >= cols) continue;
                        acc += kern[dy * k + dx] * plane[sy * cols + sx];
                    }
                }
                out[y * cols + x] += acc;
            }
        }
    }
}

}  // namespace detail

// Two same-padded convolution layers with ReLU, one max-pooling layer, then
// a dense softmax head over the flattened pooled maps. The input window is
// treated as a one-channel image: rows = time steps, columns = frequency
// bins.
class CnnNet {
public:
    explicit CnnNet(const CnnConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        const std::size_t k2 = static_cast<std::size_t>(cfg_.kernel_size) * cfg_.kernel_size;
        const std::size_t c1 = cfg_.filters[0];
        const std::size_t c2 = cfg_.filters[1];
        k1_off_ = layout_.add("conv1.K", c1, k2);
        b1_off_ = layout_.add("conv1.b", c1, 1);
        k2_off_ = layout_.add("conv2.K", c2, c1 * k2);
        b2_off_ = layout_.add("conv2.b", c2, 1);
        flat_ = c2 * cfg_.pooled_rows() * cfg_.pooled_cols();
        v_off_ = layout_.add("dense.W", cfg_.n_classes, flat_);
        d_off_ = layout_.add("dense.b", cfg_.n_classes, 1);
    }

    const CnnConfig& config() const { return cfg_; }
    const ParamLayout& layout() const { return layout_; }

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

    double backward(const double* params, const double* features, int label, double* grad,
                    int* predicted = nullptr) const {
        const int rows = cfg_.time_step;
        const int cols = cfg_.n_features;
        const int c1 = cfg_.filters[0];
        const int c2 = cfg_.filters[1];
        const int k = cfg_.kernel_size;
        const int pad = k / 2;
        const int C = cfg_.n_classes;
        const std::size_t plane = static_cast<std::size_t>(rows) * cols;

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
        outer_add(grad + v_off_, C, flat_, dlogits.data(), cache.pooled.data());
        for (int c = 0; c < C; ++c) grad[d_off_ + c] += dlogits[c];

        std::vector<double> dflat(flat_, 0.0);
        matvec_transposed_add(params + v_off_, C, flat_, dlogits.data(), dflat.data());

        // Max pooling routes each pooled gradient to its argmax source.
        std::vector<double> da2(static_cast<std::size_t>(c2) * plane, 0.0);
        for (std::size_t i = 0; i < flat_; ++i) da2[cache.pool_src[i]] += dflat[i];

        // ReLU mask of layer 2.
        for (std::size_t i = 0; i < da2.size(); ++i) {
            if (cache.z2[i] <= 0.0) da2[i] = 0.0;
        }

        // conv2 parameter gradients and the gradient into layer-1 activations.
        std::vector<double> da1(static_cast<std::size_t>(c1) * plane, 0.0);
        const std::size_t k2sz = static_cast<std::size_t>(k) * k;
        for (int f2 = 0; f2 < c2; ++f2) {
            const double* dz = &da2[static_cast<std::size_t>(f2) * plane];
            double bsum = 0.0;
            for (std::size_t i = 0; i < plane; ++i) bsum += dz[i];
            grad[b2_off_ + f2] += bsum;
            for (int ch = 0; ch < c1; ++ch) {
                const double* a1 = &cache.a1[static_cast<std::size_t>(ch) * plane];
                double* dk = grad + k2_off_ + (static_cast<std::size_t>(f2) * c1 + ch) * k2sz;
                const double* kern =
                    params + k2_off_ + (static_cast<std::size_t>(f2) * c1 + ch) * k2sz;
                double* din = &da1[static_cast<std::size_t>(ch) * plane];
                for (int y = 0; y < rows; ++y) {
                    for (int x = 0; x < cols; ++x) {
                        double d = dz[y * cols + x];
                        if (d == 0.0) continue;
                        for (int dy = 0; dy < k; ++dy) {
                            int sy = y + dy - pad;
                            if (sy < 0 || sy >= rows) continue;
                            for (int dx = 0; dx < k; ++dx) {
                                int sx = x + dx - pad;
                                if (sx < 0 || sx >= cols) continue;
                                dk[dy * k + dx] += d * a1[sy * cols + sx];
                                din[sy * cols + sx] += d * kern[dy * k + dx];
                            }
                        }
                    }
                }
            }
        }

        // ReLU mask of layer 1, then conv1 parameter gradients.
        for (std::size_t i = 0; i < da1.size(); ++i) {
            if (cache.z1[i] <= 0.0) da1[i] = 0.0;
        }
        for (int f1 = 0; f1 < c1; ++f1) {
            const double* dz = &da1[static_cast<std::size_t>(f1) * plane];
            double bsum = 0.0;
            for (std::size_t i = 0; i < plane; ++i) bsum += dz[i];
            grad[b1_off_ + f1] += bsum;
            double* dk = grad + k1_off_ + static_cast<std::size_t>(f1) * k2sz;
            for (int y = 0; y < rows; ++y) {
                for (int x = 0; x < cols; ++x) {
                    double d = dz[y * cols + x];
                    if (d == 0.0) continue;
                    for (int dy = 0; dy < k; ++dy) {
                        int sy = y + dy - pad;
                        if (sy < 0 || sy >= rows) continue;
                        for (int dx = 0; dx < k; ++dx) {
                            int sx = x + dx - pad;
                            if (sx < 0 || sx >= cols) continue;
                            dk[dy * k + dx] += d * features[sy * cols + sx];
                        }
                    }
                }
            }
        }

        return cross_entropy_from_logits(logits, label);
    }

private:
    struct Cache {
        std::vector<double> z1, a1, z2, a2, pooled;
        std::vector<std::size_t> pool_src;
    };

    std::vector<double> run_forward(const double* params, const double* features,
                                    Cache& cache) const {
        const int rows = cfg_.time_step;
        const int cols = cfg_.n_features;
        const int c1 = cfg_.filters[0];
        const int c2 = cfg_.filters[1];
        const int k = cfg_.kernel_size;
        const int p = cfg_.pool_size;
        const std::size_t plane = static_cast<std::size_t>(rows) * cols;
        const std::size_t k2sz = static_cast<std::size_t>(k) * k;

        cache.z1.assign(static_cast<std::size_t>(c1) * plane, 0.0);
        for (int f1 = 0; f1 < c1; ++f1) {
            double* out = &cache.z1[static_cast<std::size_t>(f1) * plane];
            for (std::size_t i = 0; i < plane; ++i) out[i] = params[b1_off_ + f1];
            detail::conv2d_same_add(features, 1, rows, cols,
                                    params + k1_off_ + static_cast<std::size_t>(f1) * k2sz, k,
                                    out);
        }
        cache.a1 = cache.z1;
        for (double& v : cache.a1) v = v > 0.0 ? v : 0.0;

        cache.z2.assign(static_cast<std::size_t>(c2) * plane, 0.0);
        for (int f2 = 0; f2 < c2; ++f2) {
            double* out = &cache.z2[static_cast<std::size_t>(f2) * plane];
            for (std::size_t i = 0; i < plane; ++i) out[i] = params[b2_off_ + f2];
            detail::conv2d_same_add(
                cache.a1.data(), c1, rows, cols,
                params + k2_off_ + static_cast<std::size_t>(f2) * c1 * k2sz, k, out);
        }
        cache.a2 = cache.z2;
        for (double& v : cache.a2) v = v > 0.0 ? v : 0.0;

        const int pr = cfg_.pooled_rows();
        const int pc = cfg_.pooled_cols();
        cache.pooled.assign(flat_, 0.0);
        cache.pool_src.assign(flat_, 0);
        std::size_t idx = 0;
        for (int f2 = 0; f2 < c2; ++f2) {
            const double* a = &cache.a2[static_cast<std::size_t>(f2) * plane];
            for (int py = 0; py < pr; ++py) {
                for (int px = 0; px < pc; ++px) {
                    std::size_t best = static_cast<std::size_t>(py * p) * cols + px * p;
                    double best_v = a[best];
                    for (int dy = 0; dy < p; ++dy) {
                        for (int dx = 0; dx < p; ++dx) {
                            std::size_t src = static_cast<std::size_t>(py * p + dy) * cols +
                                              (px * p + dx);
                            if (a[src] > best_v) {
                                best_v = a[src];
                                best = src;
                            }
                        }
                    }
                    cache.pooled[idx] = best_v;
                    cache.pool_src[idx] = static_cast<std::size_t>(f2) * plane + best;
                    ++idx;
                }
            }
        }

        std::vector<double> logits(cfg_.n_classes);
        matvec(params + v_off_, cfg_.n_classes, flat_, cache.pooled.data(), logits.data());
        for (int c = 0; c < cfg_.n_classes; ++c) logits[c] += params[d_off_ + c];
        return logits;
    }

    CnnConfig cfg_;
    ParamLayout layout_;
    std::size_t k1_off_ = 0, b1_off_ = 0, k2_off_ = 0, b2_off_ = 0;
    std::size_t v_off_ = 0, d_off_ = 0;
    std::size_t flat_ = 0;
};

}  // namespace fcw
