#include "ntqs/pnet.hpp"

#include "ntqs/error.hpp"
#include "ntqs/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

namespace ntqs {

std::string_view to_string(Activation a) noexcept {
    switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    }
    return "unknown";
}

std::string_view to_string(AngleEncoding e) noexcept { return e == AngleEncoding::SinCos ? "sincos" : "wrapped"; }

Activation parse_activation(std::string_view name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw ValidationError("shape.hidden_activation", fmt::format("unknown activation '{}'", name));
}

AngleEncoding parse_angle_encoding(std::string_view name) {
    if (name == "sincos") return AngleEncoding::SinCos;
    if (name == "wrapped") return AngleEncoding::Wrapped;
    throw ValidationError("shape.encoding", fmt::format("unknown angle encoding '{}'", name));
}

Normalization normalization_for(const Environment& env) {
    Normalization n;
    const auto& ws = env.workspace;
    const std::size_t d = env.dim();
    n.shift.assign(d, 0.0);
    n.scale.assign(d, 1.0);
    if (env.kind() != ConfigKind::Joints) {
        n.shift[0] = 0.5 * (ws.x_min + ws.x_max);
        n.scale[0] = 0.5 * (ws.x_max - ws.x_min);
        n.shift[1] = 0.5 * (ws.y_min + ws.y_max);
        n.scale[1] = 0.5 * (ws.y_max - ws.y_min);
    }
    return n;
}

namespace {

bool angular(ConfigKind kind, std::size_t i) { return kind == ConfigKind::Joints || (kind == ConfigKind::PoseSE2 && i == 2); }

} // namespace

std::size_t encoded_size(ConfigKind kind, std::size_t dim, AngleEncoding enc) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < dim; ++i) n += (angular(kind, i) && enc == AngleEncoding::SinCos) ? 2 : 1;
    return n;
}

std::size_t MlpModel::input_size() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights.front().cols()); }
std::size_t MlpModel::output_size() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights.back().rows()); }
std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

void validate_model(const MlpModel& m) {
    if (m.weights.empty()) throw ValidationError("model.layers", "model has no layers");
    if (m.biases.size() != m.weights.size() || m.activations.size() != m.weights.size())
        throw ValidationError("model.layers", "weights, biases and activations disagree in count");
    if (m.config_dim == 0 || m.config_dim > Configuration::kMaxDim) throw ValidationError("model.config_dim", "out of range");
    const std::size_t enc = encoded_size(m.kind, m.config_dim, m.encoding);
    if (m.input_size() != 2 * enc) throw ValidationError("model.input", "input width does not match the configuration space");
    if (m.output_size() != enc) throw ValidationError("model.output", "output width does not match the configuration space");
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        if (m.biases[l].size() != m.weights[l].rows()) throw ValidationError(fmt::format("model.layers[{}]", l), "bias size mismatch");
        if (l > 0 && m.weights[l].cols() != m.weights[l - 1].rows())
            throw ValidationError(fmt::format("model.layers[{}]", l), "incompatible with the previous layer");
    }
    if (m.norm.shift.size() != m.config_dim || m.norm.scale.size() != m.config_dim)
        throw ValidationError("model.normalization", "size mismatch");
    for (std::size_t i = 0; i < m.config_dim; ++i)
        if (!std::isfinite(m.norm.shift[i]) || !std::isfinite(m.norm.scale[i]) || m.norm.scale[i] == 0.0)
            throw ValidationError("model.normalization", "constants must be finite with nonzero scale");
}

MlpModel make_model(const Environment& env, const ModelShape& shape, std::uint64_t seed) {
    MlpModel m;
    m.kind = env.kind();
    m.config_dim = env.dim();
    m.encoding = shape.encoding;
    m.norm = normalization_for(env);
    const auto enc = static_cast<int>(encoded_size(m.kind, m.config_dim, m.encoding));
    std::vector<int> sizes{2 * enc};
    for (int h : shape.hidden) {
        if (h < 1) throw ValidationError("shape.hidden", "layer widths must be >= 1");
        sizes.push_back(h);
    }
    sizes.push_back(enc);

    Rng rng(derive_seed(seed, {0x1417}));
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l];
        const int fan_out = sizes[l + 1];
        const bool output = l + 2 == sizes.size();
        const double limit = output ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
        m.activations.push_back(output ? Activation::Linear : shape.hidden_activation);
    }
    return m;
}

namespace {

void encode_into(const MlpModel& m, const Configuration& c, double* out) {
    if (c.kind() != m.kind || c.dim() != m.config_dim)
        throw DimensionError(fmt::format("model expects {}[{}], got {}", to_string(m.kind), m.config_dim, c.to_string()));
    std::size_t k = 0;
    for (std::size_t i = 0; i < m.config_dim; ++i) {
        if (angular(m.kind, i)) {
            if (m.encoding == AngleEncoding::SinCos) {
                out[k++] = std::sin(c[i]);
                out[k++] = std::cos(c[i]);
            } else {
                out[k++] = c[i] / kPi;
            }
        } else {
            out[k++] = (c[i] - m.norm.shift[i]) / m.norm.scale[i];
        }
    }
}

} // namespace

Eigen::VectorXd encode_input(const MlpModel& m, const Configuration& current, const Configuration& goal) {
    const std::size_t enc = encoded_size(m.kind, m.config_dim, m.encoding);
    Eigen::VectorXd x(static_cast<Eigen::Index>(2 * enc));
    encode_into(m, current, x.data());
    encode_into(m, goal, x.data() + enc);
    return x;
}

Eigen::VectorXd encode_target(const MlpModel& m, const Configuration& next) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(encoded_size(m.kind, m.config_dim, m.encoding)));
    encode_into(m, next, y.data());
    return y;
}

Configuration decode_output(const MlpModel& m, const Eigen::VectorXd& out) {
    std::array<double, Configuration::kMaxDim> v{};
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < m.config_dim; ++i) {
        if (angular(m.kind, i)) {
            if (m.encoding == AngleEncoding::SinCos) {
                v[i] = std::atan2(out[k], out[k + 1]);
                k += 2;
            } else {
                v[i] = out[k++] * kPi;
            }
        } else {
            v[i] = out[k++] * m.norm.scale[i] + m.norm.shift[i];
        }
    }
    return Configuration::from_values(m.kind, std::span<const double>(v.data(), m.config_dim));
}

namespace {

void activate(Activation a, Eigen::MatrixXd& z) {
    switch (a) {
    case Activation::Linear: break;
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    }
}

/// Multiplies `grad` in place by the activation derivative, given the layer output.
void activation_backward(Activation a, const Eigen::MatrixXd& out, Eigen::MatrixXd& grad) {
    switch (a) {
    case Activation::Linear: break;
    case Activation::Relu: grad = (out.array() > 0.0).select(grad, 0.0); break;
    case Activation::Tanh: grad.array() *= 1.0 - out.array().square(); break;
    }
}

/// Forward pass retaining every layer's output (index 0 is the input).
std::vector<Eigen::MatrixXd> forward_all(const MlpModel& m, const Eigen::MatrixXd& inputs) {
    if (static_cast<std::size_t>(inputs.rows()) != m.input_size())
        throw DimensionError(fmt::format("model input width {} != batch rows {}", m.input_size(), inputs.rows()));
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(m.weights.size() + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        Eigen::MatrixXd z(m.weights[l].rows(), inputs.cols());
        z.noalias() = m.weights[l] * acts.back();
        z.colwise() += m.biases[l];
        activate(m.activations[l], z);
        acts.push_back(std::move(z));
    }
    return acts;
}

/// Output error per coordinate; wrapped angles use the shortest signed arc.
Eigen::MatrixXd output_error(const MlpModel& m, const Eigen::MatrixXd& out, const Eigen::MatrixXd& targets) {
    Eigen::MatrixXd err = out - targets;
    if (m.encoding == AngleEncoding::Wrapped) {
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < m.config_dim; ++i, ++k) {
            if (!angular(m.kind, i)) continue;
            for (Eigen::Index c = 0; c < err.cols(); ++c) err(k, c) = wrap_angle(kPi * err(k, c)) / kPi;
        }
    }
    return err;
}

} // namespace

Eigen::MatrixXd forward_encoded(const MlpModel& m, const Eigen::MatrixXd& inputs) { return forward_all(m, inputs).back(); }

Configuration forward(const MlpModel& m, const Configuration& current, const Configuration& goal) {
    const Eigen::VectorXd out = forward_encoded(m, encode_input(m, current, goal)).col(0);
    return decode_output(m, out);
}

Batch make_batch(const MlpModel& m, const std::vector<DataSample>& samples, const std::vector<std::size_t>& indices) {
    const auto in = static_cast<Eigen::Index>(m.input_size());
    const auto out = static_cast<Eigen::Index>(m.output_size());
    const auto n = static_cast<Eigen::Index>(indices.size());
    Batch b{Eigen::MatrixXd(in, n), Eigen::MatrixXd(out, n)};
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto& s = samples[indices[static_cast<std::size_t>(c)]];
        b.inputs.col(c) = encode_input(m, s.current, s.goal);
        b.targets.col(c) = encode_target(m, s.next);
    }
    return b;
}

double batch_loss(const MlpModel& m, const Batch& batch) {
    const auto acts = forward_all(m, batch.inputs);
    const Eigen::MatrixXd err = output_error(m, acts.back(), batch.targets);
    return err.squaredNorm() / static_cast<double>(err.size());
}

Gradients batch_gradient(const MlpModel& m, const Batch& batch, double* loss) {
    const auto acts = forward_all(m, batch.inputs);
    const Eigen::MatrixXd err = output_error(m, acts.back(), batch.targets);
    if (loss) *loss = err.squaredNorm() / static_cast<double>(err.size());

    const std::size_t layers = m.weights.size();
    Gradients g;
    g.weights.resize(layers);
    g.biases.resize(layers);
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(err.size())) * err;
    for (std::size_t l = layers; l-- > 0;) {
        activation_backward(m.activations[l], acts[l + 1], delta);
        g.weights[l].noalias() = delta * acts[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd prev(m.weights[l].cols(), delta.cols());
            prev.noalias() = m.weights[l].transpose() * delta;
            delta = std::move(prev);
        }
    }
    return g;
}

void validate_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ValidationError("train.epochs", "must be >= 1");
    if (cfg.batch_size < 1) throw ValidationError("train.batch_size", "must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("train.learning_rate", "must be > 0");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) throw ValidationError("train.beta1", "must lie in [0, 1)");
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) throw ValidationError("train.beta2", "must lie in [0, 1)");
    if (!(cfg.epsilon > 0.0)) throw ValidationError("train.epsilon", "must be > 0");
    if (!(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0)) throw ValidationError("train.lr_decay", "must lie in (0, 1]");
    if (!(cfg.validation_split >= 0.0 && cfg.validation_split < 1.0))
        throw ValidationError("train.validation_split", "must lie in [0, 1)");
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

/// Sample order that depends only on sample contents, so training does not
/// depend on how the caller ordered the dataset.
std::vector<std::size_t> canonical_order(const std::vector<DataSample>& samples) {
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto key_less = [&](std::size_t a, std::size_t b) {
        const auto& x = samples[a];
        const auto& y = samples[b];
        if (lex_less(x.current, y.current)) return true;
        if (lex_less(y.current, x.current)) return false;
        if (lex_less(x.goal, y.goal)) return true;
        if (lex_less(y.goal, x.goal)) return false;
        return lex_less(x.next, y.next);
    };
    std::stable_sort(idx.begin(), idx.end(), key_less);
    return idx;
}

struct AdamState {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    long step = 0;

    explicit AdamState(const MlpModel& m) {
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            mw.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
            vw.push_back(mw.back());
            mb.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
            vb.push_back(mb.back());
        }
    }

    void apply(MlpModel& m, const Gradients& g, const TrainConfig& cfg, double lr) {
        ++step;
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        auto update = [&](auto& param, const auto& grad, auto& mom, auto& vel) {
            mom = cfg.beta1 * mom + (1.0 - cfg.beta1) * grad;
            vel = cfg.beta2 * vel + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
            param.array() -= lr * (mom.array() / c1) / ((vel.array() / c2).sqrt() + cfg.epsilon);
        };
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            update(m.weights[l], g.weights[l], mw[l], vw[l]);
            update(m.biases[l], g.biases[l], mb[l], vb[l]);
        }
    }
};

} // namespace

TrainReport train_model(MlpModel& m, const std::vector<DataSample>& samples, const TrainConfig& cfg) {
    validate_train_config(cfg);
    validate_model(m);
    if (samples.empty()) throw TrainingError("cannot train on an empty dataset");
    for (const auto& s : samples)
        if (s.current.kind() != m.kind || s.current.dim() != m.config_dim || !s.current.same_space(s.goal) ||
            !s.current.same_space(s.next))
            throw TrainingError("dataset samples do not match the model's configuration space");

    std::vector<std::size_t> order = canonical_order(samples);
    Rng split_rng(derive_seed(cfg.seed, {0x5b17}));
    shuffle(order, split_rng);
    auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_split * static_cast<double>(order.size())));
    if (n_val >= order.size()) n_val = order.size() - 1;
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> tr(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

    TrainReport report;
    report.train_samples = tr.size();
    report.val_samples = val.size();
    const Batch val_batch = val.empty() ? Batch{} : make_batch(m, samples, val);

    AdamState adam(m);
    double lr = cfg.learning_rate;
    const auto bs = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::size_t> batch_idx;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng epoch_rng(derive_seed(cfg.seed, {0xe90c, static_cast<std::uint64_t>(epoch)}));
        shuffle(tr, epoch_rng);
        double weighted = 0.0;
        for (std::size_t start = 0; start < tr.size(); start += bs) {
            const std::size_t end = std::min(start + bs, tr.size());
            batch_idx.assign(tr.begin() + static_cast<std::ptrdiff_t>(start), tr.begin() + static_cast<std::ptrdiff_t>(end));
            const Batch b = make_batch(m, samples, batch_idx);
            double loss = 0.0;
            const Gradients g = batch_gradient(m, b, &loss);
            if (!std::isfinite(loss))
                throw TrainingError(fmt::format("non-finite loss at epoch {} batch starting {}; lower the learning rate",
                                                epoch + 1, start));
            weighted += loss * static_cast<double>(end - start);
            adam.apply(m, g, cfg, lr);
        }
        report.train_loss.push_back(weighted / static_cast<double>(tr.size()));
        if (!val.empty()) {
            const double vl = batch_loss(m, val_batch);
            if (!std::isfinite(vl)) throw TrainingError(fmt::format("non-finite validation loss at epoch {}", epoch + 1));
            report.val_loss.push_back(vl);
        }
        lr *= cfg.lr_decay;
    }
    return report;
}

MlpModel train(const Dataset& ds, const Environment& env, const TrainConfig& cfg, TrainReport* report) {
    if (ds.samples.empty()) throw TrainingError("cannot train on an empty dataset");
    MlpModel m = make_model(env, cfg.shape, cfg.seed);
    TrainReport r = train_model(m, ds.samples, cfg);
    if (report) *report = std::move(r);
    return m;
}

// Model file layout (little-endian):
//   "NTQSMODL" u32 version u8 kind u8 encoding u16 reserved u32 config_dim u32 layers
//   u32 sizes[layers + 1]  u8 activations[layers]
//   f64 shift[config_dim]  f64 scale[config_dim]
//   per layer: f64 weights row-major [rows x cols], f64 bias[rows]

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

constexpr char kModelMagic[8] = {'N', 'T', 'Q', 'S', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kModelVersion = 1;

template <class T>
void put(std::string& out, const T& v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw ParseError("model file truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

} // namespace

std::string model_to_bytes(const MlpModel& m) {
    validate_model(m);
    std::string out(kModelMagic, sizeof(kModelMagic));
    put(out, kModelVersion);
    put(out, static_cast<std::uint8_t>(m.kind));
    put(out, static_cast<std::uint8_t>(m.encoding));
    put(out, std::uint16_t{0});
    put(out, static_cast<std::uint32_t>(m.config_dim));
    put(out, static_cast<std::uint32_t>(m.weights.size()));
    put(out, static_cast<std::uint32_t>(m.weights.front().cols()));
    for (const auto& w : m.weights) put(out, static_cast<std::uint32_t>(w.rows()));
    for (auto a : m.activations) put(out, static_cast<std::uint8_t>(a));
    for (double v : m.norm.shift) put(out, v);
    for (double v : m.norm.scale) put(out, v);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const auto& w = m.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) put(out, w(r, c));
        for (Eigen::Index r = 0; r < m.biases[l].size(); ++r) put(out, m.biases[l][r]);
    }
    return out;
}

MlpModel model_from_bytes(const std::string& bytes) {
    if (bytes.size() < sizeof(kModelMagic) || std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0)
        throw ParseError("not a model file");
    std::size_t pos = sizeof(kModelMagic);
    const auto version = take<std::uint32_t>(bytes, pos);
    if (version != kModelVersion) throw ParseError(fmt::format("unsupported model version {}", version));
    MlpModel m;
    const auto kind = take<std::uint8_t>(bytes, pos);
    const auto enc = take<std::uint8_t>(bytes, pos);
    if (kind > 2 || enc > 1) throw ParseError("model header holds an unknown kind or encoding");
    m.kind = static_cast<ConfigKind>(kind);
    m.encoding = static_cast<AngleEncoding>(enc);
    take<std::uint16_t>(bytes, pos);
    m.config_dim = take<std::uint32_t>(bytes, pos);
    const auto layers = take<std::uint32_t>(bytes, pos);
    if (layers == 0 || layers > 64) throw ParseError("model layer count out of range");
    std::vector<std::uint32_t> sizes(layers + 1);
    for (auto& s : sizes) {
        s = take<std::uint32_t>(bytes, pos);
        if (s == 0 || s > (1u << 16)) throw ParseError("model layer width out of range");
    }
    for (std::uint32_t l = 0; l < layers; ++l) {
        const auto a = take<std::uint8_t>(bytes, pos);
        if (a > 2) throw ParseError("model holds an unknown activation");
        m.activations.push_back(static_cast<Activation>(a));
    }
    if (m.config_dim == 0 || m.config_dim > Configuration::kMaxDim) throw ParseError("model configuration dimension out of range");
    m.norm.shift.resize(m.config_dim);
    m.norm.scale.resize(m.config_dim);
    for (auto& v : m.norm.shift) v = take<double>(bytes, pos);
    for (auto& v : m.norm.scale) v = take<double>(bytes, pos);
    for (std::uint32_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = take<double>(bytes, pos);
        Eigen::VectorXd b(sizes[l + 1]);
        for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = take<double>(bytes, pos);
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    if (pos != bytes.size()) throw ParseError("trailing bytes after model payload");
    try {
        validate_model(m);
    } catch (const ValidationError& e) {
        throw ParseError(std::string("inconsistent model file: ") + e.what());
    }
    return m;
}

void save_model(const MlpModel& m, const std::filesystem::path& path) { write_file_atomic(path, model_to_bytes(m)); }

MlpModel load_model(const std::filesystem::path& path) { return model_from_bytes(read_file(path)); }

} // namespace ntqs
