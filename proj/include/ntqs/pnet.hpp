#pragma once

#include "ntqs/datagen.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ntqs {

enum class Activation : std::uint8_t { Linear = 0, Relu = 1, Tanh = 2 };

/// How angular coordinates are presented to and read back from the network.
enum class AngleEncoding : std::uint8_t {
    /// Each angle becomes (sin, cos); decoded with atan2.
    SinCos = 0,
    /// Each angle becomes angle / pi; the loss uses the wrapped difference.
    Wrapped = 1,
};

std::string_view to_string(Activation a) noexcept;
std::string_view to_string(AngleEncoding e) noexcept;
Activation parse_activation(std::string_view name);
AngleEncoding parse_angle_encoding(std::string_view name);

/// Per-coordinate affine normalization of linear coordinates:
/// feature = (value - shift) / scale. Angular coordinates ignore it.
struct Normalization {
    std::vector<double> shift;
    std::vector<double> scale;

    friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Workspace centre / half-extent for positions; identity for angles.
Normalization normalization_for(const Environment& env);

/// Fully connected next-state predictor mapping (current, goal) to next.
struct MlpModel {
    ConfigKind kind = ConfigKind::Point2;
    std::size_t config_dim = 2;
    AngleEncoding encoding = AngleEncoding::SinCos;
    Normalization norm;
    /// Layer l maps activations of size rows(weights[l]) <- cols(weights[l]).
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::vector<Activation> activations;

    std::size_t input_size() const;
    std::size_t output_size() const;
    std::size_t parameter_count() const;
};

struct ModelShape {
    std::vector<int> hidden = {256, 256, 256, 256};
    Activation hidden_activation = Activation::Relu;
    AngleEncoding encoding = AngleEncoding::SinCos;
};

/// Width of one encoded configuration.
std::size_t encoded_size(ConfigKind kind, std::size_t dim, AngleEncoding enc);

/// He-uniform hidden weights, Xavier-uniform output layer, zero biases.
MlpModel make_model(const Environment& env, const ModelShape& shape, std::uint64_t seed);

/// Throws ValidationError if layer shapes, activations or normalization are inconsistent.
void validate_model(const MlpModel& m);

/// Encoded network input for (current, goal).
Eigen::VectorXd encode_input(const MlpModel& m, const Configuration& current, const Configuration& goal);
/// Encoded regression target for a configuration.
Eigen::VectorXd encode_target(const MlpModel& m, const Configuration& next);
/// Inverse of encode_target, wrapping angles.
Configuration decode_output(const MlpModel& m, const Eigen::VectorXd& out);

/// Raw network output for a batch of encoded inputs (one column per sample).
Eigen::MatrixXd forward_encoded(const MlpModel& m, const Eigen::MatrixXd& inputs);

/// Predicted next configuration. Obstacle validity is not guaranteed.
Configuration forward(const MlpModel& m, const Configuration& current, const Configuration& goal);

/// Encoded training batch; columns are samples.
struct Batch {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd targets;
};

Batch make_batch(const MlpModel& m, const std::vector<DataSample>& samples, const std::vector<std::size_t>& indices);

/// Mean over samples of the mean squared output error. Angular coordinates
/// under the Wrapped encoding use the wrapped difference.
double batch_loss(const MlpModel& m, const Batch& batch);

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

/// Analytic gradient of batch_loss by backpropagation.
Gradients batch_gradient(const MlpModel& m, const Batch& batch, double* loss = nullptr);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Learning rate multiplier applied after every epoch.
    double lr_decay = 1.0;
    std::uint64_t seed = 1;
    double validation_split = 0.1;
    ModelShape shape;
};

void validate_train_config(const TrainConfig& cfg);

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::size_t train_samples = 0;
    std::size_t val_samples = 0;
};

/// Mini-batch Adam on the dataset. Deterministic given cfg.seed. Throws
/// TrainingError on an empty dataset or a non-finite loss.
MlpModel train(const Dataset& ds, const Environment& env, const TrainConfig& cfg, TrainReport* report = nullptr);

/// Trains an existing model in place (used by tests that construct models by hand).
TrainReport train_model(MlpModel& m, const std::vector<DataSample>& samples, const TrainConfig& cfg);

void save_model(const MlpModel& m, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
std::string model_to_bytes(const MlpModel& m);
MlpModel model_from_bytes(const std::string& bytes);

} // namespace ntqs
