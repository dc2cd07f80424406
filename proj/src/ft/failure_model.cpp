#include "acme/ft/failure_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "acme/common/csv.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::ft {

std::optional<FitFamily> parse_fit_family(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "lognormal") return FitFamily::kLognormal;
  if (v == "exponential") return FitFamily::kExponential;
  return std::nullopt;
}

std::string_view to_string(FittedDistribution::Shape s) {
  switch (s) {
    case FittedDistribution::Shape::kLognormal: return "lognormal";
    case FittedDistribution::Shape::kExponential: return "exponential";
    case FittedDistribution::Shape::kPointMass: return "point_mass";
    case FittedDistribution::Shape::kZeroInflatedExp: return "zero_inflated_exponential";
    case FittedDistribution::Shape::kTwoPoint: return "two_point";
  }
  return "unknown";
}

FittedDistribution FittedDistribution::fit(double mean, double median, FitFamily family) {
  if (!(mean >= 0) || !(median >= 0) || !std::isfinite(mean) || !std::isfinite(median)) {
    throw Error(ErrorCode::kData, "distribution mean and median must be finite and >= 0");
  }
  FittedDistribution d;
  if (family == FitFamily::kExponential) {
    if (mean == 0) {
      d.shape = Shape::kPointMass;
      d.value = 0;
    } else {
      d.shape = Shape::kExponential;
      d.tail_mean = mean;
    }
    return d;
  }
  if (mean == median) {
    d.shape = Shape::kPointMass;
    d.value = mean;
  } else if (mean > median && median > 0) {
    d.shape = Shape::kLognormal;
    d.mu = std::log(median);
    d.sigma = std::sqrt(2.0 * std::log(mean / median));
  } else if (median == 0) {
    d.shape = Shape::kZeroInflatedExp;
    d.zero_mass = kZeroInflation;
    d.tail_mean = mean / (1.0 - kZeroInflation);
  } else if (2.0 * mean >= median) {
    d.shape = Shape::kTwoPoint;
    d.value = median;
    d.zero_mass = 1.0 - mean / median;
  } else {
    d.shape = Shape::kPointMass;
    d.value = mean;
    d.infeasible = true;
  }
  return d;
}

double FittedDistribution::mean() const {
  switch (shape) {
    case Shape::kLognormal: return std::exp(mu + 0.5 * sigma * sigma);
    case Shape::kExponential: return tail_mean;
    case Shape::kPointMass: return value;
    case Shape::kZeroInflatedExp: return (1.0 - zero_mass) * tail_mean;
    case Shape::kTwoPoint: return (1.0 - zero_mass) * value;
  }
  return 0;
}

double FittedDistribution::median() const {
  switch (shape) {
    case Shape::kLognormal: return std::exp(mu);
    case Shape::kExponential: return tail_mean * std::log(2.0);
    case Shape::kPointMass: return value;
    case Shape::kZeroInflatedExp: {
      if (zero_mass >= 0.5) return 0;
      const double q = (0.5 - zero_mass) / (1.0 - zero_mass);
      return -tail_mean * std::log(1.0 - q);
    }
    case Shape::kTwoPoint: return zero_mass > 0.5 ? 0 : value;
  }
  return 0;
}

double FittedDistribution::sample(Rng& rng) const {
  switch (shape) {
    case Shape::kLognormal: return std::exp(mu + sigma * rng.normal());
    case Shape::kExponential: return rng.exponential(tail_mean);
    case Shape::kPointMass: return value;
    case Shape::kZeroInflatedExp:
      return rng.uniform() < zero_mass ? 0.0 : rng.exponential(tail_mean);
    case Shape::kTwoPoint: return rng.uniform() < zero_mass ? 0.0 : value;
  }
  return 0;
}

namespace {

double field_double(const csv::Row& row, std::size_t i, std::size_t line, const char* what) {
  const auto v = text::parse_double(row[i]);
  if (!v) {
    throw Error(ErrorCode::kData, "failure model line " + std::to_string(line) + ": bad " + what +
                                      " '" + row[i] + "'");
  }
  return *v;
}

}  // namespace

FailureModel FailureModel::parse(std::istream& in, FitFamily family) {
  static const std::vector<std::string> kColumns = {
      "category",         "reason",         "num",
      "ttf_mean_min",     "ttf_median_min", "restart_mean_min",
      "restart_median_min", "clusters"};
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw Error(ErrorCode::kData, "failure model is empty");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[std::string(text::trim(header[i]))] = i;
  std::vector<std::size_t> col;
  for (const auto& name : kColumns) {
    const auto it = index.find(name);
    if (it == index.end()) throw Error(ErrorCode::kData, "failure model lacks column '" + name + "'");
    col.push_back(it->second);
  }

  std::vector<FailureReason> reasons;
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    const std::size_t line = reader.line_number();
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kData, "failure model line " + std::to_string(line) +
                                        ": expected " + std::to_string(header.size()) + " fields");
    }
    FailureReason r;
    const auto cat = diag::parse_category(row[col[0]]);
    if (!cat || *cat == Category::kUnknown) {
      throw Error(ErrorCode::kData, "failure model line " + std::to_string(line) +
                                        ": bad category '" + row[col[0]] + "'");
    }
    r.category = *cat;
    r.name = std::string(text::trim(row[col[1]]));
    r.num = field_double(row, col[2], line, "num");
    r.ttf_mean = field_double(row, col[3], line, "ttf_mean_min");
    r.ttf_median = field_double(row, col[4], line, "ttf_median_min");
    r.restart_mean = field_double(row, col[5], line, "restart_mean_min");
    r.restart_median = field_double(row, col[6], line, "restart_median_min");
    r.clusters = std::string(text::trim(row[col[7]]));
    r.ttf = FittedDistribution::fit(r.ttf_mean, r.ttf_median, family);
    r.restart = FittedDistribution::fit(r.restart_mean, r.restart_median, family);
    reasons.push_back(std::move(r));
  }
  FailureModel model(std::move(reasons));
  model.validate();
  return model;
}

FailureModel FailureModel::load(const std::filesystem::path& path, FitFamily family) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot open failure model " + path.string());
  return parse(in, family);
}

FailureModel::FailureModel(std::vector<FailureReason> reasons) : reasons_(std::move(reasons)) {}

void FailureModel::validate() const {
  for (const auto& r : reasons_) {
    if (!(r.num >= 0)) throw Error(ErrorCode::kInvalid, "negative weight for " + r.name);
  }
  if (!(total_weight() > 0)) throw Error(ErrorCode::kInvalid, "failure model has no positive weight");
}

FailureModel FailureModel::restricted_to(const std::vector<std::string>& names) const {
  std::vector<FailureReason> kept;
  for (const auto& r : reasons_) {
    if (std::find(names.begin(), names.end(), r.name) != names.end()) kept.push_back(r);
  }
  return FailureModel(std::move(kept));
}

FailureModel FailureModel::restricted_to(const std::vector<Category>& categories) const {
  std::vector<FailureReason> kept;
  for (const auto& r : reasons_) {
    if (std::find(categories.begin(), categories.end(), r.category) != categories.end()) {
      kept.push_back(r);
    }
  }
  return FailureModel(std::move(kept));
}

const FailureReason* FailureModel::find(std::string_view name) const {
  for (const auto& r : reasons_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

double FailureModel::total_weight() const {
  double total = 0;
  for (const auto& r : reasons_) total += r.num;
  return total;
}

FailureEvent sample_failure(const FailureModel& model, Rng& rng, int node_count) {
  model.validate();
  const auto& reasons = model.reasons();
  const double target = rng.uniform() * model.total_weight();
  double acc = 0;
  const FailureReason* chosen = nullptr;
  for (const auto& r : reasons) {
    if (r.num <= 0) continue;
    acc += r.num;
    chosen = &r;
    if (target < acc) break;
  }
  FailureEvent ev;
  ev.reason = chosen->name;
  ev.category = chosen->category;
  ev.time_to_failure = chosen->ttf.sample(rng);
  ev.restart_time = chosen->restart.sample(rng);
  if (ev.category == Category::kInfrastructure && node_count > 0) {
    ev.affected_nodes.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(node_count))));
  }
  return ev;
}

FailureEvent sample_failure(const FailureModel& model, std::uint64_t seed, int node_count) {
  Rng rng(seed);
  return sample_failure(model, rng, node_count);
}

}  // namespace acme::ft
