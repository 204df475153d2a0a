#include "hcs/neural/losses.hpp"

namespace hcs::neural {

std::string to_string(AdversarialLoss mode) {
    return mode == AdversarialLoss::Log ? "log" : "least_squares";
}

AdversarialLoss parse_adversarial_loss(const std::string& text) {
    if (text == "log") return AdversarialLoss::Log;
    if (text == "least_squares") return AdversarialLoss::LeastSquares;
    throw ParameterError("unknown adversarial loss '" + text + "' (expected log or least_squares)");
}

namespace {

torch::Tensor probability(const torch::Tensor& scores) {
    return torch::sigmoid(scores).clamp(kProbEps, 1.0 - kProbEps);
}

}  // namespace

torch::Tensor discriminator_loss(const torch::Tensor& d_real_scores, const torch::Tensor& d_fake_scores,
                                 AdversarialLoss mode) {
    if (mode == AdversarialLoss::LeastSquares)
        return (d_real_scores - 1.0).square().mean() + d_fake_scores.square().mean();
    return -torch::log(probability(d_real_scores)).mean() - torch::log(1.0 - probability(d_fake_scores)).mean();
}

torch::Tensor generator_adversarial_loss(const torch::Tensor& d_fake_scores, AdversarialLoss mode) {
    if (mode == AdversarialLoss::LeastSquares) return (d_fake_scores - 1.0).square().mean();
    return -torch::log(probability(d_fake_scores)).mean();
}

GanLossTerms gan_loss(const torch::Tensor& d_real_scores, const torch::Tensor& d_fake_scores,
                      AdversarialLoss mode) {
    return {discriminator_loss(d_real_scores, d_fake_scores, mode),
            generator_adversarial_loss(d_fake_scores, mode)};
}

torch::Tensor l1_distance(const torch::Tensor& x, const torch::Tensor& y) {
    if (x.sizes() != y.sizes()) throw ShapeError("l1 operands differ in shape");
    return (x - y).abs().mean();
}

}  // namespace hcs::neural
