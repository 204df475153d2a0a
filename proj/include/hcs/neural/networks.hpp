#pragma once
// ResNet generator and PatchGAN discriminator (instance norm, reflection
// padding), both fully convolutional.

#include <torch/torch.h>

namespace hcs::neural {

struct GeneratorSpec {
    int in_channels = 2;  // nucleus + tubule
    int out_channels = 2;
    int base_width = 64;
    int n_res_blocks = 9;
};

struct DiscriminatorSpec {
    int in_channels = 2;
    int n_layers = 4;  // convolutions before the 1-channel output layer
    int base_width = 64;
};

void validate(const GeneratorSpec& spec);
void validate(const DiscriminatorSpec& spec);

/// Spatial side factor of the generator: inputs must be a multiple of it.
inline constexpr int kGeneratorStride = 4;

class ResnetBlockImpl : public torch::nn::Module {
public:
    explicit ResnetBlockImpl(int channels);
    torch::Tensor forward(const torch::Tensor& x);

private:
    torch::nn::Sequential body_{nullptr};
};
TORCH_MODULE(ResnetBlock);

/// c7s1-W, d2W, d4W, n x R4W, u2W, uW, c7s1-out, tanh.
class GeneratorImpl : public torch::nn::Module {
public:
    explicit GeneratorImpl(const GeneratorSpec& spec);
    /// x: [N, in_channels, H, W] with H, W multiples of 4 and >= 8.
    torch::Tensor forward(const torch::Tensor& x);
    [[nodiscard]] const GeneratorSpec& spec() const noexcept { return spec_; }

private:
    GeneratorSpec spec_;
    torch::nn::Sequential net_{nullptr};
};
TORCH_MODULE(Generator);

/// PatchGAN: stride-2 4x4 convolutions (the first without normalization), a
/// stride-1 4x4 convolution, then a stride-1 4x4 convolution to one channel.
/// The output is a map of unnormalized real/fake scores.
class DiscriminatorImpl : public torch::nn::Module {
public:
    explicit DiscriminatorImpl(const DiscriminatorSpec& spec);
    torch::Tensor forward(const torch::Tensor& x);
    [[nodiscard]] const DiscriminatorSpec& spec() const noexcept { return spec_; }

private:
    DiscriminatorSpec spec_;
    torch::nn::Sequential net_{nullptr};
    bool warned_small_input_ = false;
};
TORCH_MODULE(Discriminator);

/// Conv weights ~ N(0, 0.02), biases 0, drawn from torch's default generator.
void init_weights(torch::nn::Module& module);

Generator build_generator(const GeneratorSpec& spec);
Discriminator build_discriminator(const DiscriminatorSpec& spec);

/// Side of the score map for a square input of side `input_side`; 0 if the
/// input is too small to produce one.
int patch_map_side(int input_side, int n_layers);

/// Receptive field of one score-map unit.
int receptive_field(int n_layers);

}  // namespace hcs::neural
