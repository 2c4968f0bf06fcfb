#include "countfit/lambda.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace countfit {

namespace {

void check_table(const ClassFrequencyTable& table) {
  if (!table.consistent()) {
    throw std::invalid_argument("lambda: inconsistent class-frequency table (n_total must equal the class sum and be positive)");
  }
}

void check_lambda0(double lambda0) {
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument("lambda: lambda0 must be finite and non-negative");
  }
}

std::int64_t min_present_frequency(const ClassFrequencyTable& table) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t n : table.n_class) {
    if (n > 0 && n < best) best = n;
  }
  return best;
}

}  // namespace

std::string_view lambda_kind_name(LambdaKind kind) {
  switch (kind) {
    case LambdaKind::Constant: return "constant";
    case LambdaKind::Norm: return "norm";
    case LambdaKind::Modal: return "modal";
    case LambdaKind::Log: return "log";
  }
  return "constant";
}

std::optional<LambdaKind> lambda_kind_from_name(std::string_view name) {
  if (name == "constant") return LambdaKind::Constant;
  if (name == "norm") return LambdaKind::Norm;
  if (name == "modal") return LambdaKind::Modal;
  if (name == "log") return LambdaKind::Log;
  return std::nullopt;
}

double lambda_norm(int count, const ClassFrequencyTable& table, double lambda0) {
  check_table(table);
  check_lambda0(lambda0);
  const double ratio = static_cast<double>(table.at(count)) / static_cast<double>(table.n_total);
  return (1.0 - ratio) * lambda0;
}

double lambda_modal(int count, const ClassFrequencyTable& table, double lambda0) {
  check_table(table);
  check_lambda0(lambda0);
  const auto n_modal = static_cast<double>(table.modal_frequency());
  const std::int64_t n = table.at(count);
  if (n == 0) {
    // Absent class: largest weight among the classes that are present.
    return n_modal / static_cast<double>(min_present_frequency(table)) * lambda0;
  }
  return n_modal / static_cast<double>(n) * lambda0;
}

double sigma_value(int count, const ClassFrequencyTable& table, bool* clamped) {
  check_table(table);
  const std::int64_t n = table.at(count);
  if (n == 0) {
    throw std::domain_error("sigma: undefined for a class with zero frequency");
  }
  const double inner = std::log2(static_cast<double>(table.n_total) / static_cast<double>(n));
  if (inner <= 1.0) {
    // n_total/n_class <= 2: the outer log is non-positive or undefined.
    if (clamped != nullptr) *clamped = true;
    return 0.0;
  }
  if (clamped != nullptr) *clamped = false;
  return std::log2(inner);
}

SigmaTable compute_sigma_table(const ClassFrequencyTable& table) {
  check_table(table);
  SigmaTable out;
  out.sigma_min = std::numeric_limits<double>::infinity();
  out.sigma_max = -std::numeric_limits<double>::infinity();
  for (int count = kMinCount; count <= kMaxCount; ++count) {
    const auto i = static_cast<std::size_t>(count_to_class(count));
    if (table.at(count) == 0) {
      out.sigma[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.present[i] = true;
    bool clamped = false;
    out.sigma[i] = sigma_value(count, table, &clamped);
    out.clamped[i] = clamped;
    out.sigma_min = std::min(out.sigma_min, out.sigma[i]);
    out.sigma_max = std::max(out.sigma_max, out.sigma[i]);
  }
  return out;
}

double lambda_log(int count, const ClassFrequencyTable& table, double lambda0) {
  check_lambda0(lambda0);
  const SigmaTable sig = compute_sigma_table(table);
  if (sig.sigma_max <= 0.0) {
    return lambda0;  // every present class clamps to 0: constant fallback
  }
  const auto i = static_cast<std::size_t>(count_to_class(count));
  if (count < kMinCount || count > kMaxCount) {
    throw std::out_of_range("lambda_log: count out of range");
  }
  const double sigma_class = sig.present[i] ? sig.sigma[i] : sig.sigma_max;
  return ((sigma_class - sig.sigma_min) / sig.sigma_max + 1.0) * lambda0;
}

double lambda_for(const LambdaScheme& scheme, int count, const ClassFrequencyTable& table) {
  switch (scheme.kind) {
    case LambdaKind::Constant:
      check_lambda0(scheme.lambda0);
      if (count < kMinCount || count > kMaxCount) {
        throw std::out_of_range("lambda_for: count out of range");
      }
      return scheme.lambda0;
    case LambdaKind::Norm: return lambda_norm(count, table, scheme.lambda0);
    case LambdaKind::Modal: return lambda_modal(count, table, scheme.lambda0);
    case LambdaKind::Log: return lambda_log(count, table, scheme.lambda0);
  }
  throw std::invalid_argument("lambda_for: unknown scheme");
}

double LambdaTable::at(int count) const {
  if (count < kMinCount || count > kMaxCount) {
    throw std::out_of_range("LambdaTable::at: count out of range");
  }
  return value[static_cast<std::size_t>(count_to_class(count))];
}

LambdaTable LambdaTable::build(const LambdaScheme& scheme, const ClassFrequencyTable& table) {
  check_table(table);
  LambdaTable out;
  out.scheme = scheme;
  const SigmaTable sig = compute_sigma_table(table);
  const bool log_fallback = scheme.kind == LambdaKind::Log && sig.sigma_max <= 0.0;
  for (int count = kMinCount; count <= kMaxCount; ++count) {
    const auto i = static_cast<std::size_t>(count_to_class(count));
    out.value[i] = lambda_for(scheme, count, table);
    const bool absent = table.at(count) == 0;
    switch (scheme.kind) {
      case LambdaKind::Modal:
        out.flagged[i] = absent;
        break;
      case LambdaKind::Log:
        out.flagged[i] = absent || log_fallback || (sig.present[i] && sig.clamped[i]);
        break;
      default:
        out.flagged[i] = false;
    }
  }
  return out;
}

}  // namespace countfit
