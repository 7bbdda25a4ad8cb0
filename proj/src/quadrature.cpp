#include "dce_sphere/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace dce {

namespace {

struct RuleCache {
  std::mutex mutex;
  std::map<int, std::unique_ptr<GaussLegendreRule<double>>> rules;
  std::map<int, std::unique_ptr<Eigen::MatrixXd>> cumulative;
};

RuleCache& cache() {
  static RuleCache c;
  return c;
}

}  // namespace

const GaussLegendreRule<double>& gauss_legendre(int order) {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto& slot = c.rules[order];
  if (!slot) slot = std::make_unique<GaussLegendreRule<double>>(order);
  return *slot;
}

const Eigen::MatrixXd& gauss_legendre_cumulative(int order) {
  const auto& rule = gauss_legendre(order);
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto& slot = c.cumulative[order];
  if (!slot) slot = std::make_unique<Eigen::MatrixXd>(rule.cumulative_matrix());
  return *slot;
}

}  // namespace dce
