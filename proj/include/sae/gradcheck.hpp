#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sae/autoencoder.hpp"
#include "sae/network.hpp"
#include "sae/softmax.hpp"

namespace sae {

// Central differences (L(t + eps) - L(t - eps)) / (2 eps) for every scalar in
// `params`. Each entry is perturbed in place and restored exactly, so `loss`
// must read the parameters through the same storage.
std::vector<Matrix> finite_diff(const std::function<double()>& loss,
                                std::span<Matrix* const> params, double epsilon);

LayerGradients finite_diff_gradient(const std::function<double(const AutoencoderParams&)>& loss,
                                    AutoencoderParams params, double epsilon);

// |a - b| / max(1e-8, |a| + |b|)
double relative_error(double a, double b) noexcept;
double max_relative_error(std::span<const Matrix* const> a, std::span<const Matrix* const> b);

struct GradCheckReport {
  std::string component;
  std::size_t configurations = 0;
  double max_relative_error = 0.0;
};

// Randomized gradient checks of the layer, the head, and the full stack;
// `configurations` random tiny problems each.
GradCheckReport check_autoencoder_gradients(std::uint64_t seed, std::size_t configurations);
GradCheckReport check_softmax_gradients(std::uint64_t seed, std::size_t configurations);
GradCheckReport check_stack_gradients(std::uint64_t seed, std::size_t configurations);

inline constexpr double kGradCheckTolerance = 1e-6;
inline constexpr double kGradCheckEpsilon = 1e-5;

}  // namespace sae
