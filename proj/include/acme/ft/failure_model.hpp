#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acme/common/rng.hpp"
#include "acme/diag/diagnosis_result.hpp"

namespace acme::ft {

using diag::Category;

enum class FitFamily { kLognormal, kExponential };
std::optional<FitFamily> parse_fit_family(std::string_view s);

// Non-negative distribution fitted to a (mean, median) pair.
//
// kLognormal is used when mean > median > 0. Pairs a lognormal cannot
// represent fall back to the shapes below; `infeasible` marks a pair no
// non-negative distribution can match, in which case the mean is kept.
struct FittedDistribution {
  enum class Shape {
    kLognormal,
    kExponential,
    kPointMass,         // value
    kZeroInflatedExp,   // 0 w.p. zero_mass, else exponential(tail_mean)
    kTwoPoint,          // 0 w.p. zero_mass, else value
  };

  Shape shape = Shape::kPointMass;
  double mu = 0;
  double sigma = 0;
  double value = 0;
  double zero_mass = 0;
  double tail_mean = 0;
  bool infeasible = false;

  static constexpr double kZeroInflation = 0.6;

  static FittedDistribution fit(double mean, double median, FitFamily family = FitFamily::kLognormal);

  double mean() const;
  double median() const;
  double sample(Rng& rng) const;
};

std::string_view to_string(FittedDistribution::Shape s);

struct FailureReason {
  std::string name;
  Category category = Category::kUnknown;
  double num = 0;
  double ttf_mean = 0;  // minutes
  double ttf_median = 0;
  double restart_mean = 0;
  double restart_median = 0;
  std::string clusters;  // "S;K"
  FittedDistribution ttf;
  FittedDistribution restart;
};

class FailureModel {
 public:
  // CSV columns: category,reason,num,ttf_mean_min,ttf_median_min,
  // restart_mean_min,restart_median_min,clusters
  static FailureModel parse(std::istream& in, FitFamily family = FitFamily::kLognormal);
  static FailureModel load(const std::filesystem::path& path,
                           FitFamily family = FitFamily::kLognormal);

  explicit FailureModel(std::vector<FailureReason> reasons = {});

  // Throws kInvalid on negative weights or when every weight is 0.
  void validate() const;

  // Subset keeping only the named reasons, in model order.
  FailureModel restricted_to(const std::vector<std::string>& names) const;
  FailureModel restricted_to(const std::vector<Category>& categories) const;

  const std::vector<FailureReason>& reasons() const { return reasons_; }
  const FailureReason* find(std::string_view name) const;
  double total_weight() const;

 private:
  std::vector<FailureReason> reasons_;
};

struct FailureEvent {
  std::string reason;
  Category category = Category::kUnknown;
  double time_to_failure = 0;  // minutes
  double restart_time = 0;     // minutes
  std::vector<int> affected_nodes;
};

// Infrastructure failures mark one node in [0, node_count) as affected when
// node_count > 0.
FailureEvent sample_failure(const FailureModel& model, Rng& rng, int node_count = 0);
FailureEvent sample_failure(const FailureModel& model, std::uint64_t seed, int node_count = 0);

}  // namespace acme::ft
