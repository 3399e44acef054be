#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fcw/cnn.hpp"
#include "fcw/dataset.hpp"
#include "fcw/error.hpp"
#include "fcw/lstm.hpp"
#include "fcw/mat.hpp"
#include "fcw/rng.hpp"

namespace fcw {

// Degenerate architecture: flatten, dense, softmax. Useful as a baseline and
// as an easy target for gradient verification.
struct DenseConfig {
    int time_step = 1;
    int n_features = 0;
    int n_classes = 4;
    int epochs = 800;
    double learning_rate = 0.01;
    double momentum = 0.0;
    int batch_size = 0;
    std::uint64_t seed = 1;

    void validate() const {
        if (time_step < 1 || n_features < 1) throw DomainError("window shape must be positive");
        if (n_classes < 2) throw DomainError("need at least two classes");
        if (epochs < 1) throw DomainError("epochs must be at least 1");
        if (learning_rate <= 0.0) throw DomainError("learning rate must be positive");
    }
};

class DenseNet {
public:
    explicit DenseNet(const DenseConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        flat_ = static_cast<std::size_t>(cfg_.time_step) * cfg_.n_features;
        v_off_ = layout_.add("dense.W", cfg_.n_classes, flat_);
        d_off_ = layout_.add("dense.b", cfg_.n_classes, 1);
    }

    const DenseConfig& config() const { return cfg_; }
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
        return softmax(logits_of(params, features));
    }

    double loss(const double* params, const double* features, int label) const {
        return cross_entropy_from_logits(logits_of(params, features), label);
    }

    double backward(const double* params, const double* features, int label, double* grad,
                    int* predicted = nullptr) const {
        std::vector<double> logits = logits_of(params, features);
        std::vector<double> probs = softmax(logits);
        if (predicted) {
            int best = 0;
            for (int c = 1; c < cfg_.n_classes; ++c) {
                if (probs[c] > probs[best]) best = c;
            }
            *predicted = best;
        }
        std::vector<double> dlogits(probs);
        dlogits[label] -= 1.0;
        outer_add(grad + v_off_, cfg_.n_classes, flat_, dlogits.data(), features);
        for (int c = 0; c < cfg_.n_classes; ++c) grad[d_off_ + c] += dlogits[c];
        return cross_entropy_from_logits(logits, label);
    }

private:
    std::vector<double> logits_of(const double* params, const double* features) const {
        std::vector<double> logits(cfg_.n_classes);
        matvec(params + v_off_, cfg_.n_classes, flat_, features, logits.data());
        for (int c = 0; c < cfg_.n_classes; ++c) logits[c] += params[d_off_ + c];
        return logits;
    }

    DenseConfig cfg_;
    ParamLayout layout_;
    std::size_t v_off_ = 0, d_off_ = 0;
    std::size_t flat_ = 0;
};

enum class ModelKind { Lstm, Cnn, Dense };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Lstm: return "lstm";
        case ModelKind::Cnn: return "cnn";
        case ModelKind::Dense: return "dense";
    }
    return "unknown";
}

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainedModel {
    ModelKind kind = ModelKind::Dense;
    std::variant<LstmConfig, CnnConfig, DenseConfig> config;
    std::vector<double> parameters;
    std::vector<EpochStats> history;
    // Feature scaling fitted when this model was trained; inference inputs
    // must pass through the same transform.
    Normalization normalization;
};

namespace detail {

template <class Config>
struct NetFor;
template <>
struct NetFor<LstmConfig> {
    using type = LstmNet;
    static constexpr ModelKind kind = ModelKind::Lstm;
};
template <>
struct NetFor<CnnConfig> {
    using type = CnnNet;
    static constexpr ModelKind kind = ModelKind::Cnn;
};
template <>
struct NetFor<DenseConfig> {
    using type = DenseNet;
    static constexpr ModelKind kind = ModelKind::Dense;
};

template <class Net>
void check_window_shape(const Net& net, const LabeledWindow& w) {
    const auto& cfg = net.config();
    if (static_cast<int>(w.n_features) != cfg.n_features) {
        throw DomainError("feature count mismatch: expected " +
                          std::to_string(cfg.n_features) + ", found " +
                          std::to_string(w.n_features));
    }
    if (static_cast<int>(w.time_step) != cfg.time_step) {
        throw DomainError("time step mismatch: expected " + std::to_string(cfg.time_step) +
                          ", found " + std::to_string(w.time_step));
    }
}

}  // namespace detail

// Full-batch (or mini-batch) gradient descent on the mean cross-entropy,
// with optional momentum. Deterministic for a fixed seed: initialization,
// shuffling, and summation order are all fixed.
template <class Config>
TrainedModel train(const Config& cfg, const SplitDataset& data) {
    using Net = typename detail::NetFor<Config>::type;
    Net net(cfg);
    if (data.train.empty()) throw DomainError("training split is empty");
    for (const LabeledWindow& w : data.train) {
        detail::check_window_shape(net, w);
        int label = static_cast<int>(w.label);
        if (label < 0 || label >= cfg.n_classes) throw DomainError("label out of range");
    }

    TrainedModel model;
    model.kind = detail::NetFor<Config>::kind;
    model.config = cfg;
    model.normalization = data.normalization;
    model.parameters.assign(net.layout().total(), 0.0);

    Rng init_rng(cfg.seed);
    net.init(model.parameters.data(), init_rng);
    Rng shuffle_rng(derive_seed(cfg.seed, 1));

    const std::size_t n = data.train.size();
    const std::size_t batch =
        cfg.batch_size > 0 ? std::min<std::size_t>(cfg.batch_size, n) : n;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> grad(model.parameters.size(), 0.0);
    std::vector<double> velocity(model.parameters.size(), 0.0);

    model.history.reserve(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (batch < n) {
            for (std::size_t i = n - 1; i > 0; --i) {
                std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_index(i + 1));
                std::swap(order[i], order[j]);
            }
        }
        double epoch_loss = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += batch) {
            std::size_t stop = std::min(start + batch, n);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const LabeledWindow& w = data.train[order[i]];
                int predicted = -1;
                epoch_loss += net.backward(model.parameters.data(), w.features.data(),
                                           static_cast<int>(w.label), grad.data(), &predicted);
                if (predicted == static_cast<int>(w.label)) ++correct;
            }
            double inv = 1.0 / static_cast<double>(stop - start);
            for (std::size_t p = 0; p < grad.size(); ++p) {
                velocity[p] = cfg.momentum * velocity[p] - cfg.learning_rate * grad[p] * inv;
                model.parameters[p] += velocity[p];
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError(epoch + 1, "loss is not finite; training diverged");
        }
        model.history.push_back({epoch_loss, static_cast<double>(correct) / n});
    }
    return model;
}

inline std::vector<double> lstm_forward(const TrainedModel& model, const LabeledWindow& w) {
    if (model.kind != ModelKind::Lstm) throw DomainError("model is not an lstm");
    LstmNet net(std::get<LstmConfig>(model.config));
    detail::check_window_shape(net, w);
    return net.forward(model.parameters.data(), w.features.data());
}

inline std::vector<double> cnn_forward(const TrainedModel& model, const LabeledWindow& w) {
    if (model.kind != ModelKind::Cnn) throw DomainError("model is not a cnn");
    CnnNet net(std::get<CnnConfig>(model.config));
    detail::check_window_shape(net, w);
    return net.forward(model.parameters.data(), w.features.data());
}

inline std::vector<double> forward(const TrainedModel& model, const LabeledWindow& w) {
    return std::visit(
        [&](const auto& cfg) {
            using Config = std::decay_t<decltype(cfg)>;
            typename detail::NetFor<Config>::type net(cfg);
            detail::check_window_shape(net, w);
            return net.forward(model.parameters.data(), w.features.data());
        },
        model.config);
}

struct Prediction {
    int label = 0;
    std::vector<double> probabilities;
};

// Argmax of the forward pass; ties break toward the lowest class index.
inline Prediction predict(const TrainedModel& model, const LabeledWindow& w) {
    Prediction out;
    out.probabilities = forward(model, w);
    for (std::size_t c = 1; c < out.probabilities.size(); ++c) {
        if (out.probabilities[c] > out.probabilities[out.label]) {
            out.label = static_cast<int>(c);
        }
    }
    return out;
}

// Compares the analytic gradient of the per-sample loss against central
// finite differences for every parameter; returns the worst relative error.
template <class Config>
double gradient_check(const Config& cfg, const LabeledWindow& sample, double step = 1e-5) {
    using Net = typename detail::NetFor<Config>::type;
    Net net(cfg);
    detail::check_window_shape(net, sample);

    std::vector<double> params(net.layout().total(), 0.0);
    Rng rng(cfg.seed);
    net.init(params.data(), rng);

    std::vector<double> analytic(params.size(), 0.0);
    int label = static_cast<int>(sample.label);
    net.backward(params.data(), sample.features.data(), label, analytic.data());

    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        double keep = params[p];
        params[p] = keep + step;
        double up = net.loss(params.data(), sample.features.data(), label);
        params[p] = keep - step;
        double down = net.loss(params.data(), sample.features.data(), label);
        params[p] = keep;
        double numeric = (up - down) / (2.0 * step);
        double denom = std::max(std::fabs(analytic[p]) + std::fabs(numeric), 1e-6);
        worst = std::max(worst, std::fabs(analytic[p] - numeric) / denom);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Model files: a text header (kind plus config fields) followed by the flat
// parameter list, one value per line at 9 significant digits.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_g9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace detail

inline void write_model(std::ostream& os, const TrainedModel& model) {
    os << "fcw_model_version=1\n";
    os << "kind=" << model_kind_name(model.kind) << "\n";
    std::visit(
        [&](const auto& cfg) {
            using Config = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<Config, LstmConfig>) {
                os << "layers=" << cfg.layers << "\n";
                os << "hidden_nodes=" << cfg.hidden_nodes << "\n";
            } else if constexpr (std::is_same_v<Config, CnnConfig>) {
                os << "conv_layers=" << cfg.conv_layers << "\n";
                os << "filters=" << cfg.filters[0] << ";" << cfg.filters[1] << "\n";
                os << "kernel_size=" << cfg.kernel_size << "\n";
                os << "stride=" << cfg.stride << "\n";
                os << "pool_size=" << cfg.pool_size << "\n";
            }
            os << "time_step=" << cfg.time_step << "\n";
            os << "n_features=" << cfg.n_features << "\n";
            os << "n_classes=" << cfg.n_classes << "\n";
            os << "epochs=" << cfg.epochs << "\n";
            os << "learning_rate=" << detail::format_g9(cfg.learning_rate) << "\n";
            os << "momentum=" << detail::format_g9(cfg.momentum) << "\n";
            os << "batch_size=" << cfg.batch_size << "\n";
            os << "seed=" << cfg.seed << "\n";
        },
        model.config);
    os << "norm_min=" << detail::format_g9(model.normalization.min) << "\n";
    os << "norm_max=" << detail::format_g9(model.normalization.max) << "\n";
    os << "n_parameters=" << model.parameters.size() << "\n";
    for (double v : model.parameters) os << detail::format_g9(v) << "\n";
}

inline void write_model(const std::string& path, const TrainedModel& model) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open '" + path + "' for writing");
    write_model(os, model);
}

inline TrainedModel read_model(std::istream& is) {
    std::map<std::string, std::string> header;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_params = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "n_parameters") {
            n_params = static_cast<std::size_t>(std::stoull(value));
            break;
        }
        header[key] = value;
    }
    auto get = [&](const std::string& key) -> std::string {
        auto it = header.find(key);
        if (it == header.end()) throw ParseError(line_no, "missing header key '" + key + "'");
        return it->second;
    };
    auto get_int = [&](const std::string& key) { return std::stoi(get(key)); };
    auto get_double = [&](const std::string& key) { return std::stod(get(key)); };

    if (get("fcw_model_version") != "1") throw ParseError(1, "unsupported model version");

    TrainedModel model;
    std::string kind = get("kind");
    auto fill_common = [&](auto& cfg) {
        cfg.time_step = get_int("time_step");
        cfg.n_features = get_int("n_features");
        cfg.n_classes = get_int("n_classes");
        cfg.epochs = get_int("epochs");
        cfg.learning_rate = get_double("learning_rate");
        cfg.momentum = get_double("momentum");
        cfg.batch_size = get_int("batch_size");
        cfg.seed = std::stoull(get("seed"));
    };
    if (kind == "lstm") {
        LstmConfig cfg;
        cfg.layers = get_int("layers");
        cfg.hidden_nodes = get_int("hidden_nodes");
        fill_common(cfg);
        model.kind = ModelKind::Lstm;
        model.config = cfg;
    } else if (kind == "cnn") {
        CnnConfig cfg;
        cfg.conv_layers = get_int("conv_layers");
        std::string filters = get("filters");
        auto semi = filters.find(';');
        if (semi == std::string::npos) throw ParseError(line_no, "filters need two counts");
        cfg.filters = {std::stoi(filters.substr(0, semi)), std::stoi(filters.substr(semi + 1))};
        cfg.kernel_size = get_int("kernel_size");
        cfg.stride = get_int("stride");
        cfg.pool_size = get_int("pool_size");
        fill_common(cfg);
        model.kind = ModelKind::Cnn;
        model.config = cfg;
    } else if (kind == "dense") {
        DenseConfig cfg;
        fill_common(cfg);
        model.kind = ModelKind::Dense;
        model.config = cfg;
    } else {
        throw ParseError(line_no, "unknown model kind '" + kind + "'");
    }
    model.normalization.min = get_double("norm_min");
    model.normalization.max = get_double("norm_max");

    model.parameters.reserve(n_params);
    while (model.parameters.size() < n_params && std::getline(is, line)) {
        ++line_no;
        model.parameters.push_back(detail::parse_double(line, line_no));
    }
    if (model.parameters.size() != n_params) {
        throw ParseError(line_no, "expected " + std::to_string(n_params) +
                                      " parameters, found " +
                                      std::to_string(model.parameters.size()));
    }

    std::size_t expect = std::visit(
        [&](const auto& cfg) {
            using Config = std::decay_t<decltype(cfg)>;
            typename detail::NetFor<Config>::type net(cfg);
            return net.layout().total();
        },
        model.config);
    if (expect != n_params) {
        throw ParseError(line_no, "parameter count does not match the configured shapes");
    }
    return model;
}

inline TrainedModel read_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open '" + path + "' for reading");
    return read_model(is);
}

}  // namespace fcw
