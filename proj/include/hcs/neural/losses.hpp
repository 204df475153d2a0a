#pragma once

#include <string>

#include <torch/torch.h>

#include "hcs/errors.hpp"

namespace hcs::neural {

enum class AdversarialLoss { Log, LeastSquares };

std::string to_string(AdversarialLoss mode);
AdversarialLoss parse_adversarial_loss(const std::string& text);

/// Probabilities are clamped to [kProbEps, 1 - kProbEps] before the log.
inline constexpr double kProbEps = 1e-7;

struct GanLossTerms {
    torch::Tensor loss_d;
    torch::Tensor loss_g;
};

/// Log form on sigmoid probabilities:
///   loss_D = -mean(log D(real)) - mean(log(1 - D(fake)))
///   loss_G = -mean(log D(fake))                       (non-saturating)
/// Least-squares form on raw scores:
///   loss_D = mean((real - 1)^2) + mean(fake^2),  loss_G = mean((fake - 1)^2)
GanLossTerms gan_loss(const torch::Tensor& d_real_scores, const torch::Tensor& d_fake_scores,
                      AdversarialLoss mode = AdversarialLoss::Log);

torch::Tensor discriminator_loss(const torch::Tensor& d_real_scores, const torch::Tensor& d_fake_scores,
                                 AdversarialLoss mode = AdversarialLoss::Log);
torch::Tensor generator_adversarial_loss(const torch::Tensor& d_fake_scores,
                                         AdversarialLoss mode = AdversarialLoss::Log);

/// mean |x - y| over every element.
torch::Tensor l1_distance(const torch::Tensor& x, const torch::Tensor& y);

/// mean |G_ba(G_ab(a)) - a| + mean |G_ab(G_ba(b)) - b|. The generators are any
/// callables mapping a tensor to a tensor of the same shape.
template <class Gab, class Gba>
torch::Tensor cycle_loss(Gab&& g_ab, Gba&& g_ba, const torch::Tensor& batch_a, const torch::Tensor& batch_b) {
    const torch::Tensor rec_a = g_ba(g_ab(batch_a));
    const torch::Tensor rec_b = g_ab(g_ba(batch_b));
    return l1_distance(rec_a, batch_a) + l1_distance(rec_b, batch_b);
}

/// mean |G(x) - y|.
template <class G>
torch::Tensor l1_paired_loss(G&& g, const torch::Tensor& batch_x, const torch::Tensor& batch_y) {
    if (batch_x.size(0) != batch_y.size(0)) throw ShapeError("paired batches differ in size");
    return l1_distance(g(batch_x), batch_y);
}

}  // namespace hcs::neural
