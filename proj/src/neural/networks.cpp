#include "hcs/neural/networks.hpp"

#include <algorithm>
#include <string>

#include "hcs/errors.hpp"
#include "hcs/log.hpp"

namespace hcs::neural {
namespace nn = torch::nn;

namespace {

nn::Conv2d conv(int in, int out, int kernel, int stride, int padding, bool bias) {
    return nn::Conv2d(nn::Conv2dOptions(in, out, kernel).stride(stride).padding(padding).bias(bias));
}

nn::InstanceNorm2d instance_norm(int channels) {
    return nn::InstanceNorm2d(nn::InstanceNorm2dOptions(channels));
}

nn::LeakyReLU leaky() { return nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)); }

}  // namespace

void validate(const GeneratorSpec& spec) {
    if (spec.in_channels < 1 || spec.out_channels < 1) throw ParameterError("generator channels must be >= 1");
    if (spec.base_width < 1) throw ParameterError("generator base_width must be >= 1");
    if (spec.n_res_blocks < 1) throw ParameterError("generator needs at least one residual block");
}

void validate(const DiscriminatorSpec& spec) {
    if (spec.in_channels < 1) throw ParameterError("discriminator channels must be >= 1");
    if (spec.base_width < 1) throw ParameterError("discriminator base_width must be >= 1");
    if (spec.n_layers < 2) throw ParameterError("discriminator n_layers must be >= 2");
}

ResnetBlockImpl::ResnetBlockImpl(int channels) {
    body_ = register_module(
        "body", nn::Sequential(nn::ReflectionPad2d(1), conv(channels, channels, 3, 1, 0, false),
                               instance_norm(channels), nn::ReLU(), nn::ReflectionPad2d(1),
                               conv(channels, channels, 3, 1, 0, false), instance_norm(channels)));
}

torch::Tensor ResnetBlockImpl::forward(const torch::Tensor& x) { return x + body_->forward(x); }

GeneratorImpl::GeneratorImpl(const GeneratorSpec& spec) : spec_(spec) {
    validate(spec);
    const int w = spec.base_width;
    nn::Sequential seq;
    seq->push_back(nn::ReflectionPad2d(3));
    seq->push_back(conv(spec.in_channels, w, 7, 1, 0, false));
    seq->push_back(instance_norm(w));
    seq->push_back(nn::ReLU());
    seq->push_back(conv(w, 2 * w, 3, 2, 1, false));
    seq->push_back(instance_norm(2 * w));
    seq->push_back(nn::ReLU());
    seq->push_back(conv(2 * w, 4 * w, 3, 2, 1, false));
    seq->push_back(instance_norm(4 * w));
    seq->push_back(nn::ReLU());
    for (int i = 0; i < spec.n_res_blocks; ++i) seq->push_back(ResnetBlock(4 * w));
    seq->push_back(nn::ConvTranspose2d(
        nn::ConvTranspose2dOptions(4 * w, 2 * w, 3).stride(2).padding(1).output_padding(1).bias(false)));
    seq->push_back(instance_norm(2 * w));
    seq->push_back(nn::ReLU());
    seq->push_back(nn::ConvTranspose2d(
        nn::ConvTranspose2dOptions(2 * w, w, 3).stride(2).padding(1).output_padding(1).bias(false)));
    seq->push_back(instance_norm(w));
    seq->push_back(nn::ReLU());
    seq->push_back(nn::ReflectionPad2d(3));
    seq->push_back(conv(w, spec.out_channels, 7, 1, 0, true));
    seq->push_back(nn::Tanh());
    net_ = register_module("net", seq);
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& x) {
    if (x.dim() != 4 || x.size(1) != spec_.in_channels)
        throw ShapeError("generator expects [N, " + std::to_string(spec_.in_channels) + ", H, W] input");
    const auto h = x.size(2);
    const auto w = x.size(3);
    if (h < 8 || w < 8 || h % kGeneratorStride != 0 || w % kGeneratorStride != 0)
        throw ShapeError("generator input side must be a multiple of 4 and >= 8, got " + std::to_string(h) +
                         "x" + std::to_string(w));
    return net_->forward(x);
}

DiscriminatorImpl::DiscriminatorImpl(const DiscriminatorSpec& spec) : spec_(spec) {
    validate(spec);
    const int w = spec.base_width;
    nn::Sequential seq;
    seq->push_back(conv(spec.in_channels, w, 4, 2, 1, true));
    seq->push_back(leaky());
    int channels = w;
    for (int i = 1; i < spec.n_layers - 1; ++i) {
        const int next = w * std::min(1 << i, 8);
        seq->push_back(conv(channels, next, 4, 2, 1, false));
        seq->push_back(instance_norm(next));
        seq->push_back(leaky());
        channels = next;
    }
    const int next = w * std::min(1 << (spec.n_layers - 1), 8);
    seq->push_back(conv(channels, next, 4, 1, 1, false));
    seq->push_back(instance_norm(next));
    seq->push_back(leaky());
    seq->push_back(conv(next, 1, 4, 1, 1, true));
    net_ = register_module("net", seq);
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& x) {
    if (x.dim() != 4 || x.size(1) != spec_.in_channels)
        throw ShapeError("discriminator expects [N, " + std::to_string(spec_.in_channels) + ", H, W] input");
    const int side = static_cast<int>(std::min(x.size(2), x.size(3)));
    if (patch_map_side(side, spec_.n_layers) < 1)
        throw ShapeError("discriminator input of side " + std::to_string(side) + " yields an empty score map");
    if (side < receptive_field(spec_.n_layers) && !warned_small_input_) {
        log::warn("discriminator input side " + std::to_string(side) + " is smaller than its receptive field " +
                  std::to_string(receptive_field(spec_.n_layers)));
        warned_small_input_ = true;
    }
    return net_->forward(x);
}

void init_weights(nn::Module& module) {
    torch::NoGradGuard no_grad;
    for (auto& m : module.modules(/*include_self=*/true)) {
        if (auto* c = m->as<nn::Conv2d>()) {
            nn::init::normal_(c->weight, 0.0, 0.02);
            if (c->bias.defined()) nn::init::zeros_(c->bias);
        } else if (auto* t = m->as<nn::ConvTranspose2d>()) {
            nn::init::normal_(t->weight, 0.0, 0.02);
            if (t->bias.defined()) nn::init::zeros_(t->bias);
        }
    }
}

Generator build_generator(const GeneratorSpec& spec) {
    Generator g(spec);
    init_weights(*g);
    return g;
}

Discriminator build_discriminator(const DiscriminatorSpec& spec) {
    Discriminator d(spec);
    init_weights(*d);
    return d;
}

int patch_map_side(int input_side, int n_layers) {
    if (n_layers < 2) throw ParameterError("discriminator n_layers must be >= 2");
    // 4x4 kernels with padding 1: out = floor((in - 2) / stride) + 1.
    auto step = [](int side, int stride) { return side < 2 ? 0 : (side - 2) / stride + 1; };
    int side = input_side;
    for (int i = 0; i < n_layers - 1; ++i) side = step(side, 2);
    side = step(side, 1);
    side = step(side, 1);
    return side;
}

int receptive_field(int n_layers) {
    if (n_layers < 2) throw ParameterError("discriminator n_layers must be >= 2");
    // Walk back from one output unit: r <- (r - 1) * stride + kernel.
    int r = 1;
    r = (r - 1) * 1 + 4;
    r = (r - 1) * 1 + 4;
    for (int i = 0; i < n_layers - 1; ++i) r = (r - 1) * 2 + 4;
    return r;
}

}  // namespace hcs::neural
