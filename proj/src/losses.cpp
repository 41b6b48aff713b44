#include "cresi/errors.hpp"
#include "cresi/mask_gen.hpp"

#include <cmath>

namespace cresi {

namespace {

void check_pair(const RasterMask& pred, const RasterMask& truth) {
  if (!pred.same_shape(truth)) throw DomainError("loss: prediction and truth shapes differ");
}

template <typename PixelLoss>
double mean_pixel_loss(const RasterMask& pred, const RasterMask& truth, PixelLoss&& loss) {
  check_pair(pred, truth);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < pred.bands.size(); ++b) {
    const Band& p = pred.bands[b];
    const Band& y = truth.bands[b];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double pc = std::clamp(static_cast<double>(p.data()[i]), kLossClip, 1.0 - kLossClip);
      sum += loss(pc, static_cast<double>(y.data()[i]));
    }
    n += static_cast<std::size_t>(p.size());
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

double focal_loss(const RasterMask& pred, const RasterMask& truth, double gamma) {
  return mean_pixel_loss(pred, truth, [gamma](double p, double y) {
    return -(y * std::pow(1.0 - p, gamma) * std::log(p) + (1.0 - y) * std::pow(p, gamma) * std::log(1.0 - p));
  });
}

double cross_entropy_loss(const RasterMask& pred, const RasterMask& truth) {
  return mean_pixel_loss(pred, truth,
                         [](double p, double y) { return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)); });
}

double dice_loss(const RasterMask& pred, const RasterMask& truth) {
  check_pair(pred, truth);
  double dice_sum = 0.0;
  for (std::size_t b = 0; b < pred.bands.size(); ++b) {
    const auto p = pred.bands[b].cast<double>();
    const auto y = truth.bands[b].cast<double>();
    const double inter = (p * y).sum();
    dice_sum += (2.0 * inter + kDiceSmoothing) / (p.sum() + y.sum() + kDiceSmoothing);
  }
  return 1.0 - dice_sum / static_cast<double>(pred.bands.size());
}

double combined_loss_multiclass(const RasterMask& pred, const RasterMask& truth, double alpha, double focal_gamma) {
  return alpha * focal_loss(pred, truth, focal_gamma) + (1.0 - alpha) * dice_loss(pred, truth);
}

double combined_loss_continuous(const RasterMask& pred, const RasterMask& truth, double alpha) {
  return alpha * cross_entropy_loss(pred, truth) + (1.0 - alpha) * dice_loss(pred, truth);
}

}  // namespace cresi
