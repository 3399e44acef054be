#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace fcw {

// Row-major dense kernels on raw spans. All model parameters live in one
// flat vector; these helpers operate on named slices of it.

// y = A x
inline void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

// y += A x
inline void matvec_add(const double* a, std::size_t rows, std::size_t cols, const double* x,
                       double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += A^T x  (x has `rows` entries, y has `cols`)
inline void matvec_transposed_add(const double* a, std::size_t rows, std::size_t cols,
                                  const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

// A += u v^T
inline void outer_add(double* a, std::size_t rows, std::size_t cols, const double* u,
                      const double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = a + r * cols;
        double ur = u[r];
        for (std::size_t c = 0; c < cols; ++c) row[c] += ur * v[c];
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numerically stable softmax.
inline std::vector<double> softmax(const std::vector<double>& logits) {
    double top = logits[0];
    for (double z : logits) top = std::max(top, z);
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - top);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// Cross-entropy of the true class directly from logits (log-sum-exp form).
inline double cross_entropy_from_logits(const std::vector<double>& logits, int label) {
    double top = logits[0];
    for (double z : logits) top = std::max(top, z);
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - top);
    return top + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

// Named slices of the flat parameter vector.
struct TensorShape {
    std::string name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
};

class ParamLayout {
public:
    std::size_t add(std::string name, std::size_t rows, std::size_t cols) {
        std::size_t off = total_;
        tensors_.push_back({std::move(name), off, rows, cols});
        total_ += rows * cols;
        return off;
    }

    std::size_t total() const { return total_; }
    const std::vector<TensorShape>& tensors() const { return tensors_; }

private:
    std::vector<TensorShape> tensors_;
    std::size_t total_ = 0;
};

}  // namespace fcw
